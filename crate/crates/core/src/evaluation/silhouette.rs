use rayon::prelude::*;

use super::ClusterLabels;
use crate::embedding::Embedding;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Silhouette {
    pub mean: f64,
    pub per_point: Vec<f64>,
}

/// Silhouette coefficient with Euclidean distances in embedding space.
///
/// `s(i) = (b - a) / max(a, b)` where `a` is the mean distance to the rest
/// of the point's own cluster and `b` the smallest mean distance to another
/// cluster. Points in singleton clusters, and points with `a = b = 0`, score 0.
pub fn silhouette(emb: &Embedding, labels: &ClusterLabels) -> Result<Silhouette> {
    if labels.k < 2 {
        return Err(Error::Argument(format!("silhouette needs k >= 2, got {}", labels.k)));
    }
    if labels.len() != emb.len() || labels.ids.iter().zip(emb.ids()).any(|(a, b)| a != b) {
        return Err(Error::Argument("labels do not line up with embedding ids".into()));
    }
    let k = labels.k;
    let mut sizes = vec![0usize; k];
    for &l in &labels.labels {
        sizes[l] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::Argument(format!("cluster {empty} has no members")));
    }

    let per_point: Vec<f64> = (0..emb.len())
        .into_par_iter()
        .map(|i| {
            let own = labels.labels[i];
            if sizes[own] == 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for j in 0..emb.len() {
                if j != i {
                    sums[labels.labels[j]] += emb.distance(i, j);
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            let denom = a.max(b);
            if denom == 0.0 {
                0.0
            } else {
                (b - a) / denom
            }
        })
        .collect();
    let mean = per_point.iter().sum::<f64>() / per_point.len() as f64;
    Ok(Silhouette { mean, per_point })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labelled(points: Vec<f64>, dim: usize, labels: Vec<usize>) -> (Embedding, ClusterLabels) {
        let n = points.len() / dim;
        let ids: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        (
            Embedding::new(ids.clone(), dim, points).unwrap(),
            ClusterLabels::from_labels(ids, labels).unwrap(),
        )
    }

    /// Straight double loop over the definition, one cluster at a time.
    fn brute_force(e: &Embedding, l: &ClusterLabels) -> Vec<f64> {
        let n = e.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let dist = |j: usize| -> f64 {
                e.point(i)
                    .iter()
                    .zip(e.point(j))
                    .map(|(x, y)| (x - y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            };
            let own: Vec<usize> = (0..n).filter(|&j| j != i && l.labels[j] == l.labels[i]).collect();
            if own.is_empty() {
                out.push(0.0);
                continue;
            }
            let a = own.iter().map(|&j| dist(j)).sum::<f64>() / own.len() as f64;
            let mut b = f64::INFINITY;
            for c in 0..l.k {
                if c == l.labels[i] {
                    continue;
                }
                let members: Vec<usize> = (0..n).filter(|&j| l.labels[j] == c).collect();
                let mean = members.iter().map(|&j| dist(j)).sum::<f64>() / members.len() as f64;
                b = b.min(mean);
            }
            out.push(if a.max(b) == 0.0 { 0.0 } else { (b - a) / a.max(b) });
        }
        out
    }

    #[test]
    fn separated_clusters_score_near_one() {
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for i in 0..10 {
            pts.extend([0.01 * i as f64, 0.0]);
            labels.push(0);
            pts.extend([100.0 + 0.01 * i as f64, 0.0]);
            labels.push(1);
        }
        let (e, l) = labelled(pts, 2, labels);
        assert!(silhouette(&e, &l).unwrap().mean > 0.95);
    }

    #[test]
    fn identical_points_score_zero() {
        let (e, l) = labelled(vec![1.0; 6], 1, vec![0, 1, 0, 1, 0, 1]);
        let s = silhouette(&e, &l).unwrap();
        assert!(s.per_point.iter().all(|&v| v == 0.0));
        assert_eq!(s.mean, 0.0);
    }

    #[test]
    fn singleton_cluster_scores_zero() {
        let (e, l) = labelled(vec![0.0, 0.1, 5.0], 1, vec![0, 0, 1]);
        let s = silhouette(&e, &l).unwrap();
        assert_eq!(s.per_point[2], 0.0);
    }

    #[test]
    fn needs_two_nonempty_clusters() {
        let (e, l) = labelled(vec![0.0, 1.0], 1, vec![0, 0]);
        assert!(silhouette(&e, &l).is_err());
        let gap = ClusterLabels::new(l.ids.clone(), vec![0, 2], 3).unwrap();
        assert!(silhouette(&e, &gap).is_err());
    }

    #[test]
    fn matches_brute_force_and_is_relabel_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pts: Vec<f64> = (0..300).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let labels: Vec<usize> = (0..100).map(|i| if i < 4 { i } else { rng.gen_range(0..4) }).collect();
        let (e, l) = labelled(pts, 3, labels.clone());
        let s = silhouette(&e, &l).unwrap();
        let oracle = brute_force(&e, &l);
        let oracle_mean = oracle.iter().sum::<f64>() / oracle.len() as f64;
        assert!((s.mean - oracle_mean).abs() < 1e-12);
        assert!(s.per_point.iter().all(|v| (-1.0..=1.0).contains(v)));

        let perm = [2, 0, 3, 1];
        let relabelled = ClusterLabels::new(l.ids.clone(), labels.iter().map(|&x| perm[x]).collect(), 4).unwrap();
        assert_eq!(silhouette(&e, &relabelled).unwrap(), s);
    }
}
