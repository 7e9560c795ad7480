use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alignment::{sw_score, DistanceMatrix, ScoringScheme};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::sequences::SequenceSet;

/// Where the input-space distances come from.
pub enum InputDistances<'a> {
    Matrix(&'a DistanceMatrix),
    /// Computed on demand for each sampled pair.
    Sequences(&'a SequenceSet, ScoringScheme),
}

impl InputDistances<'_> {
    fn len(&self) -> usize {
        match self {
            InputDistances::Matrix(m) => m.rows(),
            InputDistances::Sequences(s, _) => s.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSampling {
    /// `pairs` ordered pairs `(i, j)`, `i != j`, drawn uniformly with replacement.
    Random { pairs: usize, seed: u64 },
    /// Every unordered pair `i < j` once.
    All,
}

/// 2D histogram of (input distance, normalized embedded distance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub bins: usize,
    /// Row-major `bins x bins`; rows index the input distance, columns the
    /// embedded distance, both over `[0, 1]`.
    pub counts: Vec<u64>,
    pub pairs: usize,
    pub seed: Option<u64>,
    /// Pearson correlation of raw input and raw embedded distances.
    pub pearson: f64,
    /// Range used to min-max normalize embedded distances.
    pub embedded_min: f64,
    pub embedded_max: f64,
}

impl HeatmapGrid {
    pub fn count(&self, input_bin: usize, embedded_bin: usize) -> u64 {
        self.counts[input_bin * self.bins + embedded_bin]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

pub fn distance_heatmap(
    input: &InputDistances<'_>,
    emb: &Embedding,
    sampling: PairSampling,
    bins: usize,
) -> Result<HeatmapGrid> {
    let n = emb.len();
    if input.len() != n {
        return Err(Error::Dimension {
            expected: n,
            actual: input.len(),
        });
    }
    if let InputDistances::Matrix(m) = input {
        if m.rows() != m.cols() {
            return Err(Error::Argument("heatmap input matrix must be square".into()));
        }
    }
    if n < 2 {
        return Err(Error::Argument("heatmap needs at least two points".into()));
    }
    if bins < 2 {
        return Err(Error::Argument(format!("heatmap needs at least 2 bins, got {bins}")));
    }

    let pairs: Vec<(usize, usize)> = match sampling {
        PairSampling::Random { pairs, seed } => {
            if pairs == 0 {
                return Err(Error::Argument("pair count must be >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..pairs)
                .map(|_| {
                    let i = rng.gen_range(0..n);
                    let j = rng.gen_range(0..n - 1);
                    (i, if j >= i { j + 1 } else { j })
                })
                .collect()
        }
        PairSampling::All => (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect(),
    };

    let self_scores: Option<Vec<i32>> = match input {
        InputDistances::Sequences(set, scheme) => {
            Some(set.iter().map(|s| sw_score(&s.residues, &s.residues, scheme)).collect())
        }
        InputDistances::Matrix(_) => None,
    };
    let input_distance = |i: usize, j: usize| -> f64 {
        match input {
            InputDistances::Matrix(m) => f64::from(m.get(i, j)),
            InputDistances::Sequences(set, scheme) => {
                let (a, b) = (&set.sequences()[i].residues, &set.sequences()[j].residues);
                let selfs = self_scores.as_ref().expect("computed above");
                scheme.normalize(sw_score(a, b, scheme), selfs[i], selfs[j])
            }
        }
    };

    let xs: Vec<f64> = pairs.iter().map(|&(i, j)| input_distance(i, j)).collect();
    let ys: Vec<f64> = pairs.iter().map(|&(i, j)| emb.distance(i, j)).collect();
    let lo = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;

    let bin_of = |v: f64| ((v * bins as f64) as usize).min(bins - 1);
    let mut counts = vec![0u64; bins * bins];
    for (&x, &y) in xs.iter().zip(&ys) {
        let yn = if span > 0.0 { (y - lo) / span } else { 0.0 };
        counts[bin_of(x.clamp(0.0, 1.0)) * bins + bin_of(yn)] += 1;
    }

    Ok(HeatmapGrid {
        bins,
        counts,
        pairs: pairs.len(),
        seed: match sampling {
            PairSampling::Random { seed, .. } => Some(seed),
            PairSampling::All => None,
        },
        pearson: pearson(&xs, &ys),
        embedded_min: lo,
        embedded_max: hi,
    })
}

/// Pearson correlation; 0 when either side has no variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// CSV grid: a header of embedded-bin lower edges, then one row per input
/// bin led by its lower edge.
pub fn write_heatmap_csv<W: Write>(mut w: W, grid: &HeatmapGrid) -> Result<()> {
    let edge = |b: usize| b as f64 / grid.bins as f64;
    let header: Vec<String> = (0..grid.bins).map(|b| format!("{}", edge(b))).collect();
    writeln!(w, "input\\embedded,{}", header.join(","))?;
    for r in 0..grid.bins {
        let row: Vec<String> = (0..grid.bins).map(|c| grid.count(r, c).to_string()).collect();
        writeln!(w, "{},{}", edge(r), row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// JSON sidecar with everything except the counts.
pub fn heatmap_metadata(grid: &HeatmapGrid) -> serde_json::Value {
    serde_json::json!({
        "pairs": grid.pairs,
        "bins": grid.bins,
        "seed": grid.seed,
        "pearson": grid.pearson,
        "embedded_min": grid.embedded_min,
        "embedded_max": grid.embedded_max,
        "normalization": "min-max over sampled embedded distances",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn line_points(xs: &[f64]) -> Embedding {
        Embedding::new((0..xs.len()).map(|i| format!("p{i}")).collect(), 1, xs.to_vec()).unwrap()
    }

    fn matrix_from(xs: &[f64]) -> DistanceMatrix {
        let n = xs.len();
        let vals = (0..n * n).map(|k| (xs[k / n] - xs[k % n]).abs() as f32).collect();
        DistanceMatrix::from_values(n, n, true, vals).unwrap()
    }

    #[test]
    fn isometry_correlates_perfectly() {
        let xs: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37) % 1.0).collect();
        let m = matrix_from(&xs);
        let e = line_points(&xs.iter().map(|&x| f64::from(x as f32)).collect::<Vec<_>>());
        let g = distance_heatmap(&InputDistances::Matrix(&m), &e, PairSampling::Random { pairs: 500, seed: 3 }, 10).unwrap();
        assert!((g.pearson - 1.0).abs() < 1e-9, "{}", g.pearson);
        assert_eq!(g.total(), 500);
    }

    #[test]
    fn independent_embedding_is_uncorrelated() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let xs: Vec<f64> = (0..300).map(|_| rng.gen_range(0.0..1.0)).collect();
        let m = matrix_from(&xs);
        let coords: Vec<f64> = (0..900).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let e = Embedding::new((0..300).map(|i| format!("p{i}")).collect(), 3, coords).unwrap();
        let g = distance_heatmap(&InputDistances::Matrix(&m), &e, PairSampling::Random { pairs: 10_000, seed: 5 }, 20).unwrap();
        assert!(g.pearson.abs() < 0.1, "{}", g.pearson);
    }

    #[test]
    fn exhaustive_matches_manual_histogram() {
        let xs = [0.0, 0.1, 0.45, 0.9];
        let m = matrix_from(&xs);
        let e = line_points(&[0.0, 2.0, 1.0, 3.0]);
        let g = distance_heatmap(&InputDistances::Matrix(&m), &e, PairSampling::All, 2).unwrap();
        assert_eq!(g.pairs, 6);
        let mut manual = vec![0u64; 4];
        let ys: Vec<f64> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(i, j)| e.distance(i, j))
            .collect();
        for (k, &(i, j)) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)].iter().enumerate() {
            let x = f64::from(m.get(i, j));
            let yn = (ys[k] - 1.0) / (3.0 - 1.0);
            let bx = if x >= 0.5 { 1 } else { 0 };
            let by = if yn >= 0.5 { 1 } else { 0 };
            manual[bx * 2 + by] += 1;
        }
        assert_eq!(g.counts, manual);
        assert_eq!((g.embedded_min, g.embedded_max), (1.0, 3.0));
    }

    #[test]
    fn sequence_input_matches_matrix_input() {
        use crate::alignment::pairwise_matrix;
        use crate::sequences::{synth_dataset, SynthConfig};
        let s = synth_dataset(&SynthConfig {
            n_clusters: 3,
            per_cluster: 5,
            seed_len: 30,
            ..SynthConfig::default()
        })
        .unwrap()
        .set;
        let scheme = ScoringScheme::default();
        let (m, _) = pairwise_matrix(&s, &scheme, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = Embedding::new(s.ids(), 2, (0..30).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
        let sampling = PairSampling::Random { pairs: 200, seed: 9 };
        let a = distance_heatmap(&InputDistances::Matrix(&m), &e, sampling, 8).unwrap();
        let b = distance_heatmap(&InputDistances::Sequences(&s, scheme), &e, sampling, 8).unwrap();
        assert_eq!(a.counts, b.counts);
        assert!((a.pearson - b.pearson).abs() < 1e-6);
    }

    #[test]
    fn argument_errors() {
        let m = matrix_from(&[0.0]);
        let e = line_points(&[0.0]);
        assert!(distance_heatmap(&InputDistances::Matrix(&m), &e, PairSampling::All, 4).is_err());
        let m = matrix_from(&[0.0, 0.5]);
        let e = line_points(&[0.0, 1.0]);
        assert!(distance_heatmap(&InputDistances::Matrix(&m), &e, PairSampling::All, 1).is_err());
        assert!(distance_heatmap(&InputDistances::Matrix(&m), &e, PairSampling::Random { pairs: 0, seed: 0 }, 4).is_err());
    }

    #[test]
    fn csv_layout() {
        let m = matrix_from(&[0.0, 0.75]);
        let e = line_points(&[0.0, 1.0]);
        let g = distance_heatmap(&InputDistances::Matrix(&m), &e, PairSampling::All, 2).unwrap();
        let mut out = Vec::new();
        write_heatmap_csv(&mut out, &g).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "input\\embedded,0,0.5\n0,0,0\n0.5,1,0\n");
    }
}
