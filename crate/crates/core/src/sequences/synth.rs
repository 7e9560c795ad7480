use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Alphabet, Sequence, SequenceSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_clusters: usize,
    pub per_cluster: usize,
    pub seed_len: usize,
    pub mutation_rate: f64,
    pub rng_seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_clusters: 5,
            per_cluster: 100,
            seed_len: 200,
            mutation_rate: 0.05,
            rng_seed: 42,
        }
    }
}

/// A generated dataset together with the cluster each member was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSet {
    pub set: SequenceSet,
    /// Cluster index per sequence, aligned with `set`.
    pub labels: Vec<usize>,
}

/// Generates `n_clusters` random seed sequences and `per_cluster` mutated
/// copies of each. Every position is substituted with probability
/// `mutation_rate`; when the rate is nonzero each copy also changes length
/// by up to 10% of `seed_len` through random single-residue indels.
pub fn synth_dataset(cfg: &SynthConfig) -> Result<SyntheticSet> {
    if !(0.0..=0.5).contains(&cfg.mutation_rate) {
        return Err(Error::Argument(format!(
            "mutation_rate {} outside [0, 0.5]",
            cfg.mutation_rate
        )));
    }
    if cfg.n_clusters == 0 || cfg.per_cluster == 0 || cfg.seed_len == 0 {
        return Err(Error::Argument("cluster count, cluster size and seed length must be >= 1".into()));
    }

    let alphabet = Alphabet::dna();
    let symbols = alphabet.symbols();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let max_indel = cfg.seed_len / 10;

    let mut sequences = Vec::with_capacity(cfg.n_clusters * cfg.per_cluster);
    let mut labels = Vec::with_capacity(cfg.n_clusters * cfg.per_cluster);
    for cluster in 0..cfg.n_clusters {
        let seed: Vec<u8> = (0..cfg.seed_len)
            .map(|_| symbols[rng.gen_range(0..symbols.len())])
            .collect();
        for member in 0..cfg.per_cluster {
            let mut residues = seed.clone();
            if cfg.mutation_rate > 0.0 {
                for r in residues.iter_mut() {
                    if rng.gen_bool(cfg.mutation_rate) {
                        // uniform over the other symbols
                        let cur = alphabet.index(*r).expect("seed drawn from alphabet");
                        let shift = rng.gen_range(1..symbols.len());
                        *r = symbols[(cur + shift) % symbols.len()];
                    }
                }
                let change = rng.gen_range(-(max_indel as i64)..=max_indel as i64);
                if change > 0 {
                    for _ in 0..change {
                        let pos = rng.gen_range(0..=residues.len());
                        residues.insert(pos, symbols[rng.gen_range(0..symbols.len())]);
                    }
                } else {
                    for _ in 0..(-change) {
                        if residues.len() <= 1 {
                            break;
                        }
                        let pos = rng.gen_range(0..residues.len());
                        residues.remove(pos);
                    }
                }
            }
            sequences.push(Sequence {
                id: format!("c{cluster}_m{member}"),
                residues,
            });
            labels.push(cluster);
        }
    }

    Ok(SyntheticSet {
        set: SequenceSet::new(sequences, &alphabet)?,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_mutation_gives_identical_copies() {
        let s = synth_dataset(&SynthConfig {
            n_clusters: 1,
            per_cluster: 5,
            seed_len: 100,
            mutation_rate: 0.0,
            rng_seed: 3,
        })
        .unwrap();
        assert_eq!(s.set.len(), 5);
        let first = &s.set.sequences()[0].residues;
        assert_eq!(first.len(), 100);
        assert!(s.set.iter().all(|x| &x.residues == first));
        assert!(s.labels.iter().all(|&l| l == 0));
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SynthConfig::default();
        assert_eq!(synth_dataset(&cfg).unwrap(), synth_dataset(&cfg).unwrap());
        let other = synth_dataset(&SynthConfig { rng_seed: 43, ..cfg }).unwrap();
        assert_ne!(other, synth_dataset(&SynthConfig::default()).unwrap());
    }

    #[test]
    fn lengths_stay_within_ten_percent() {
        let s = synth_dataset(&SynthConfig::default()).unwrap();
        assert_eq!(s.set.len(), 500);
        assert!(s.set.iter().all(|x| (180..=220).contains(&x.len())));
        let distinct: std::collections::HashSet<usize> = s.set.iter().map(Sequence::len).collect();
        assert!(distinct.len() > 1, "indels should produce unequal lengths");
    }

    #[test]
    fn rejects_bad_arguments() {
        let bad_rate = SynthConfig {
            mutation_rate: 0.6,
            ..SynthConfig::default()
        };
        assert!(synth_dataset(&bad_rate).is_err());
        let zero = SynthConfig {
            per_cluster: 0,
            ..SynthConfig::default()
        };
        assert!(synth_dataset(&zero).is_err());
    }
}
