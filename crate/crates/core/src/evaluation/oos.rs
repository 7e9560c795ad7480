use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{affine_align, kmeans, ClusterLabels, KMeansInit};
use crate::alignment::AlignmentStats;
use crate::autoencoder::{embed, train, NetworkSpec, TrainConfig};
use crate::encoding::{reference_encode, ReferencePanel};
use crate::error::{Error, Result};
use crate::sequences::SequenceSet;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OosAccuracy {
    pub total: usize,
    pub mismatches: usize,
    pub accuracy: f64,
    pub mismatched_ids: Vec<String>,
}

impl OosAccuracy {
    /// Percentage truncated (not rounded) to two decimals.
    pub fn percent(&self) -> Percent {
        let hits = (self.total - self.mismatches) as u128;
        Percent((hits * 10_000 / self.total as u128) as u32)
    }
}

/// Hundredths of a percent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Percent(pub u32);

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}%", self.0 / 100, self.0 % 100)
    }
}

/// Fraction of `heldout_ids` that land in the same cluster in both labelings.
pub fn oos_accuracy<S: AsRef<str>>(
    baseline: &ClusterLabels,
    oos: &ClusterLabels,
    heldout_ids: &[S],
) -> Result<OosAccuracy> {
    if heldout_ids.is_empty() {
        return Err(Error::Argument("no held-out ids".into()));
    }
    let (base_index, oos_index) = (baseline.index(), oos.index());
    let mut mismatched_ids = Vec::new();
    for id in heldout_ids {
        let id = id.as_ref();
        let lookup = |index: &HashMap<&str, usize>, which: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::Lookup(format!("id {id:?} missing from {which} labels")))
        };
        if lookup(&base_index, "baseline")? != lookup(&oos_index, "out-of-sample")? {
            mismatched_ids.push(id.to_string());
        }
    }
    mismatched_ids.sort();
    let total = heldout_ids.len();
    let mismatches = mismatched_ids.len();
    Ok(OosAccuracy {
        total,
        mismatches,
        accuracy: 1.0 - mismatches as f64 / total as f64,
        mismatched_ids,
    })
}

/// How the retrained embedding is brought into the baseline's frame before
/// clustering from the baseline centers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameAlignment {
    /// Use the retrained coordinates as they are.
    None,
    /// Least-squares affine map fitted on the training points only.
    #[default]
    Affine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OosOptions {
    pub k: usize,
    pub holdout: f64,
    pub rng_seed: u64,
    pub kmeans_max_iter: usize,
    pub kmeans_tol: f64,
    pub align: FrameAlignment,
    pub threads: usize,
}

impl OosOptions {
    pub fn new(k: usize, holdout: f64, rng_seed: u64) -> Self {
        OosOptions {
            k,
            holdout,
            rng_seed,
            kmeans_max_iter: 300,
            kmeans_tol: 1e-9,
            align: FrameAlignment::default(),
            threads: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OosReport {
    pub n: usize,
    pub k: usize,
    pub panel_size: usize,
    pub panel_seed: u64,
    pub holdout_fraction: f64,
    pub holdout_seed: u64,
    pub align: FrameAlignment,
    pub network: NetworkSpec,
    pub training: TrainConfig,
    pub heldout_ids: Vec<String>,
    pub baseline_final_loss: f64,
    pub retrained_final_loss: f64,
    pub result: OosAccuracy,
    /// Agreement on the points both networks were trained on.
    pub in_sample_accuracy: f64,
    pub percent: String,
    pub alignments: AlignmentStats,
}

/// Baseline train + cluster, retrain without a random holdout, re-embed every
/// point and cluster from the baseline centers, then compare holdout labels.
///
/// Two trainings can land in differently rotated or reflected frames; with
/// [`FrameAlignment::Affine`] the retrained coordinates are mapped onto the
/// baseline using the points both runs trained on.
///
/// Held-out points are drawn from sequences outside the panel, so the panel
/// stays part of the training data.
pub fn oos_protocol(
    set: &SequenceSet,
    panel: &ReferencePanel,
    spec: &NetworkSpec,
    cfg: &TrainConfig,
    opts: &OosOptions,
) -> Result<OosReport> {
    if !(opts.holdout > 0.0 && opts.holdout < 1.0) {
        return Err(Error::Argument(format!("holdout fraction {} must be in (0, 1)", opts.holdout)));
    }
    let n = set.len();
    let m = (opts.holdout * n as f64).round() as usize;
    if m == 0 {
        return Err(Error::Argument(format!("holdout {} of {n} points selects nothing", opts.holdout)));
    }
    let in_panel: HashSet<&str> = panel.ref_ids.iter().map(String::as_str).collect();
    let candidates: Vec<usize> = (0..n).filter(|&i| !in_panel.contains(set.sequences()[i].id.as_str())).collect();
    if m > candidates.len() {
        return Err(Error::Argument(format!(
            "holdout needs {m} points but only {} lie outside the panel",
            candidates.len()
        )));
    }

    let (data, alignments) = reference_encode(set, panel, None, opts.threads)?;

    let baseline_fit = train(&data, spec, cfg)?;
    let baseline_emb = embed(&baseline_fit.weights, &data)?;
    let baseline = kmeans(
        &baseline_emb,
        opts.k,
        &KMeansInit::PlusPlus { seed: opts.rng_seed },
        opts.kmeans_max_iter,
        opts.kmeans_tol,
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut heldout: Vec<usize> = rand::seq::index::sample(&mut rng, candidates.len(), m)
        .iter()
        .map(|c| candidates[c])
        .collect();
    heldout.sort_unstable();
    let held: HashSet<usize> = heldout.iter().copied().collect();
    let train_idx: Vec<usize> = (0..n).filter(|i| !held.contains(i)).collect();

    let retrained = train(&data.select(&train_idx), spec, cfg)?;
    let mut oos_emb = embed(&retrained.weights, &data)?;
    if opts.align == FrameAlignment::Affine {
        oos_emb = affine_align(&oos_emb, &baseline_emb, &train_idx)?;
    }
    let oos = kmeans(
        &oos_emb,
        opts.k,
        &KMeansInit::Fixed(baseline.centroids.clone()),
        opts.kmeans_max_iter,
        opts.kmeans_tol,
    )?;

    let ids = set.ids();
    let heldout_ids: Vec<String> = heldout.iter().map(|&i| ids[i].clone()).collect();
    let result = oos_accuracy(&baseline.labels, &oos.labels, &heldout_ids)?;
    let trained_ids: Vec<&String> = train_idx.iter().map(|&i| &ids[i]).collect();
    let in_sample = oos_accuracy(&baseline.labels, &oos.labels, &trained_ids)?;

    Ok(OosReport {
        n,
        k: opts.k,
        panel_size: panel.len(),
        panel_seed: panel.rng_seed,
        holdout_fraction: opts.holdout,
        holdout_seed: opts.rng_seed,
        align: opts.align,
        network: spec.clone(),
        training: cfg.clone(),
        heldout_ids,
        baseline_final_loss: baseline_fit.history.last().copied().unwrap_or(f64::NAN),
        retrained_final_loss: retrained.history.last().copied().unwrap_or(f64::NAN),
        percent: result.percent().to_string(),
        in_sample_accuracy: in_sample.accuracy,
        result,
        alignments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize, f: impl Fn(usize) -> usize) -> ClusterLabels {
        ClusterLabels::new((0..n).map(|i| format!("s{i}")).collect(), (0..n).map(f).collect(), 3).unwrap()
    }

    fn accuracy_for(total: usize, wrong: usize) -> OosAccuracy {
        let base = labels(total, |_| 0);
        let oos = labels(total, |i| usize::from(i < wrong));
        let ids: Vec<String> = (0..total).map(|i| format!("s{i}")).collect();
        oos_accuracy(&base, &oos, &ids).unwrap()
    }

    #[test]
    fn table_values() {
        let a = accuracy_for(4000, 17);
        assert_eq!(a.mismatches, 17);
        assert!((a.accuracy - 0.99575).abs() < 1e-12);
        assert_eq!(a.percent().to_string(), "99.57%");
        assert_eq!(accuracy_for(8000, 17).percent().to_string(), "99.78%");
        let perfect = accuracy_for(50, 0);
        assert_eq!(perfect.accuracy, 1.0);
        assert_eq!(perfect.percent().to_string(), "100.00%");
    }

    #[test]
    fn order_of_ids_does_not_matter() {
        let base = labels(20, |i| i % 3);
        let oos = labels(20, |i| (i / 2) % 3);
        let ids: Vec<String> = (0..20).map(|i| format!("s{i}")).collect();
        let mut rev = ids.clone();
        rev.reverse();
        assert_eq!(oos_accuracy(&base, &oos, &ids).unwrap(), oos_accuracy(&base, &oos, &rev).unwrap());
    }

    #[test]
    fn missing_id_is_a_lookup_error() {
        let base = labels(3, |_| 0);
        assert!(matches!(oos_accuracy(&base, &base, &["nope"]), Err(Error::Lookup(_))));
    }

    #[test]
    fn zero_holdout_rejected() {
        use crate::alignment::ScoringScheme;
        use crate::encoding::sample_references;
        use crate::sequences::{synth_dataset, SynthConfig};
        let s = synth_dataset(&SynthConfig {
            n_clusters: 2,
            per_cluster: 5,
            seed_len: 20,
            ..SynthConfig::default()
        })
        .unwrap()
        .set;
        let panel = sample_references(&s, 3, 1, ScoringScheme::default()).unwrap();
        let spec = NetworkSpec::new(3, vec![4, 2]).unwrap();
        let cfg = TrainConfig::default();
        for h in [0.0, 0.01, 1.0] {
            assert!(oos_protocol(&s, &panel, &spec, &cfg, &OosOptions::new(2, h, 0)).is_err());
        }
    }
}
