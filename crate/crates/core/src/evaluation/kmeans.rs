use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{squared_euclidean, Embedding};
use crate::error::{Error, Result};

/// Cluster index per id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLabels {
    pub ids: Vec<String>,
    pub labels: Vec<usize>,
    pub k: usize,
}

impl ClusterLabels {
    pub fn new(ids: Vec<String>, labels: Vec<usize>, k: usize) -> Result<Self> {
        if ids.len() != labels.len() {
            return Err(Error::Dimension {
                expected: ids.len(),
                actual: labels.len(),
            });
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Argument(format!("label {l} outside [0, {k})")));
        }
        Ok(ClusterLabels { ids, labels, k })
    }

    /// Infers `k` as one more than the largest label.
    pub fn from_labels(ids: Vec<String>, labels: Vec<usize>) -> Result<Self> {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        ClusterLabels::new(ids, labels, k)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn label_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == id).map(|p| self.labels[p])
    }

    pub(crate) fn index(&self) -> HashMap<&str, usize> {
        self.ids
            .iter()
            .zip(&self.labels)
            .map(|(id, &l)| (id.as_str(), l))
            .collect()
    }

    /// Reorders to follow `ids`, failing if one is missing.
    pub fn aligned_to(&self, ids: &[String]) -> Result<ClusterLabels> {
        let index = self.index();
        let labels = ids
            .iter()
            .map(|id| index.get(id.as_str()).copied().ok_or_else(|| Error::Lookup(id.clone())))
            .collect::<Result<Vec<_>>>()?;
        ClusterLabels::new(ids.to_vec(), labels, self.k)
    }
}

pub fn write_labels_tsv<W: Write>(mut w: W, labels: &ClusterLabels) -> Result<()> {
    writeln!(w, "id\tlabel")?;
    for (id, l) in labels.ids.iter().zip(&labels.labels) {
        writeln!(w, "{id}\t{l}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_labels_tsv<R: BufRead>(r: R) -> Result<ClusterLabels> {
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() || (n == 0 && line == "id\tlabel") {
            continue;
        }
        let (id, l) = line.split_once('\t').ok_or_else(|| Error::Parse {
            line: n + 1,
            message: "expected id<TAB>label".into(),
        })?;
        ids.push(id.to_string());
        labels.push(l.trim().parse().map_err(|_| Error::Parse {
            line: n + 1,
            message: format!("bad label {l:?}"),
        })?);
    }
    ClusterLabels::from_labels(ids, labels)
}

/// `k x d` cluster centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroids {
    pub k: usize,
    pub dim: usize,
    pub values: Vec<f64>,
}

impl Centroids {
    pub fn new(k: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 || dim == 0 {
            return Err(Error::Argument("centroids need k >= 1 and dim >= 1".into()));
        }
        if values.len() != k * dim {
            return Err(Error::Dimension {
                expected: k * dim,
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("centroids must be finite".into()));
        }
        Ok(Centroids { k, dim, values })
    }

    pub fn center(&self, c: usize) -> &[f64] {
        &self.values[c * self.dim..(c + 1) * self.dim]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KMeansInit {
    /// k-means++ seeding driven by the given seed.
    PlusPlus { seed: u64 },
    /// Start from these centers.
    Fixed(Centroids),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub labels: ClusterLabels,
    pub centroids: Centroids,
    /// Sum of squared distances to the assigned center after each assignment step.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

/// Lloyd iterations until no center moves by `tol` or more, or `max_iter`
/// assignment steps have run. A center left without points is moved onto
/// the point farthest from its own center, so `k` never shrinks.
pub fn kmeans(emb: &Embedding, k: usize, init: &KMeansInit, max_iter: usize, tol: f64) -> Result<KMeansResult> {
    let n = emb.len();
    let dim = emb.dim();
    if k == 0 || k > n {
        return Err(Error::Argument(format!("k = {k} must be between 1 and the point count {n}")));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Argument(format!("tolerance {tol} must be >= 0")));
    }
    if max_iter == 0 {
        return Err(Error::Argument("max_iter must be >= 1".into()));
    }
    let mut centers = match init {
        KMeansInit::PlusPlus { seed } => plus_plus(emb, k, *seed),
        KMeansInit::Fixed(c) => {
            if c.k != k || c.dim != dim {
                return Err(Error::Argument(format!(
                    "initial centroids are {}x{}, expected {k}x{dim}",
                    c.k, c.dim
                )));
            }
            c.values.clone()
        }
    };

    let mut assign = vec![0usize; n];
    let mut objective = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut total = 0.0;
        for (i, a) in assign.iter_mut().enumerate() {
            let p = emb.point(i);
            let (best, d2) = nearest(p, &centers, dim);
            *a = best;
            total += d2;
        }
        objective.push(total);

        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for (i, &a) in assign.iter().enumerate() {
            counts[a] += 1;
            for (s, &x) in sums[a * dim..(a + 1) * dim].iter_mut().zip(emb.point(i)) {
                *s += x;
            }
        }
        let mut taken: Vec<usize> = Vec::new();
        let mut movement: f64 = 0.0;
        for c in 0..k {
            let new_center: Vec<f64> = if counts[c] > 0 {
                sums[c * dim..(c + 1) * dim].iter().map(|s| s / counts[c] as f64).collect()
            } else {
                // farthest point from its assigned center, not yet used for a repair
                let far = (0..n)
                    .filter(|i| !taken.contains(i))
                    .max_by(|&a, &b| {
                        let da = squared_euclidean(emb.point(a), &centers[assign[a] * dim..(assign[a] + 1) * dim]);
                        let db = squared_euclidean(emb.point(b), &centers[assign[b] * dim..(assign[b] + 1) * dim]);
                        da.total_cmp(&db).then(b.cmp(&a))
                    })
                    .expect("k <= n leaves a candidate");
                taken.push(far);
                emb.point(far).to_vec()
            };
            let old = &mut centers[c * dim..(c + 1) * dim];
            movement = movement.max(squared_euclidean(old, &new_center).sqrt());
            old.copy_from_slice(&new_center);
        }
        if movement < tol || iterations >= max_iter {
            if movement > 0.0 {
                // labels must agree with the returned centers
                for (i, a) in assign.iter_mut().enumerate() {
                    *a = nearest(emb.point(i), &centers, dim).0;
                }
            }
            break;
        }
    }

    Ok(KMeansResult {
        labels: ClusterLabels::new(emb.ids().to_vec(), assign, k)?,
        centroids: Centroids::new(k, dim, centers)?,
        objective,
        iterations,
    })
}

/// Nearest center, lowest index on ties.
fn nearest(p: &[f64], centers: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.chunks_exact(dim).enumerate() {
        let d = squared_euclidean(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus(emb: &Embedding, k: usize, seed: u64) -> Vec<f64> {
    let n = emb.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![rng.gen_range(0..n)];
    let mut d2: Vec<f64> = (0..n).map(|i| squared_euclidean(emb.point(i), emb.point(chosen[0]))).collect();
    while chosen.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(dist) => dist.sample(&mut rng),
            // every remaining point coincides with a chosen center
            Err(_) => (0..n).find(|i| !chosen.contains(i)).expect("k <= n"),
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(squared_euclidean(emb.point(i), emb.point(next)));
        }
    }
    chosen.iter().flat_map(|&i| emb.point(i).to_vec()).collect()
}
