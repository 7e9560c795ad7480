use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::alignment::ScoringScheme;
use crate::autoencoder::{Activation, NetworkSpec, Optimizer, TrainConfig};
use crate::error::{Error, Result};
use crate::evaluation::FrameAlignment;
use crate::mds::MdsConfig;
use crate::sequences::{Alphabet, SynthConfig};

/// Environment variable naming the default work directory.
pub const WORKDIR_ENV: &str = "SEQEMBED_WORKDIR";

/// Every knob of a run. Stage seeds left unset are derived from `seed`
/// by [`PipelineConfig::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// 0 uses every available core.
    pub threads: usize,
    /// Residue symbols accepted in input sequences.
    pub alphabet: String,
    pub paths: Paths,
    pub synth: SynthSection,
    pub scheme: ScoringScheme,
    pub encoding: EncodingSection,
    pub network: NetworkSection,
    pub training: TrainingSection,
    pub evaluation: EvaluationSection,
    pub mds: MdsSection,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// FASTA input; a synthetic set is generated when absent.
    pub input: Option<PathBuf>,
    pub work_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub n_clusters: usize,
    pub per_cluster: usize,
    pub seed_len: usize,
    pub mutation_rate: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EncodingKind {
    OneHot,
    Ordinal,
    #[default]
    Reference,
}

impl std::str::FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onehot" | "one-hot" => Ok(EncodingKind::OneHot),
            "ordinal" => Ok(EncodingKind::Ordinal),
            "reference" | "ref" => Ok(EncodingKind::Reference),
            _ => Err(Error::Argument(format!("unknown encoding {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodingSection {
    pub kind: EncodingKind,
    /// Reference panel size.
    pub k: usize,
    pub seed: Option<u64>,
    pub target_len: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub encoder_hidden: Vec<usize>,
    pub alpha: f64,
    pub hidden_activation: Activation,
    pub bottleneck_activation: Activation,
    pub output_activation: Activation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingSection {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: Optimizer,
    pub shuffle_seed: Option<u64>,
    pub init_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationSection {
    /// Number of KMeans clusters.
    pub k: usize,
    pub kmeans_max_iter: usize,
    pub kmeans_tol: f64,
    pub kmeans_seed: Option<u64>,
    pub heatmap_pairs: usize,
    pub heatmap_bins: usize,
    pub heatmap_seed: Option<u64>,
    pub holdout: f64,
    pub holdout_seed: Option<u64>,
    pub align: FrameAlignment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MdsSection {
    pub target_dim: usize,
    pub max_iter: usize,
    pub eps: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub ks: Vec<usize>,
    pub repeats: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            threads: 0,
            alphabet: "ATGC".into(),
            paths: Paths::default(),
            synth: SynthSection::default(),
            scheme: ScoringScheme::default(),
            encoding: EncodingSection::default(),
            network: NetworkSection::default(),
            training: TrainingSection::default(),
            evaluation: EvaluationSection::default(),
            mds: MdsSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

impl Default for SynthSection {
    fn default() -> Self {
        let s = SynthConfig::default();
        SynthSection {
            n_clusters: s.n_clusters,
            per_cluster: s.per_cluster,
            seed_len: s.seed_len,
            mutation_rate: s.mutation_rate,
            seed: None,
        }
    }
}

impl Default for EncodingSection {
    fn default() -> Self {
        EncodingSection {
            kind: EncodingKind::Reference,
            k: 50,
            seed: None,
            target_len: None,
        }
    }
}

impl Default for NetworkSection {
    fn default() -> Self {
        let s = NetworkSpec::new(1, vec![128, 3]).expect("valid default");
        NetworkSection {
            encoder_hidden: s.encoder_hidden,
            alpha: s.alpha,
            hidden_activation: s.hidden_activation,
            bottleneck_activation: s.bottleneck_activation,
            output_activation: s.output_activation,
        }
    }
}

impl Default for TrainingSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        TrainingSection {
            epochs: t.epochs,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            optimizer: t.optimizer,
            shuffle_seed: None,
            init_seed: None,
        }
    }
}

impl Default for EvaluationSection {
    fn default() -> Self {
        EvaluationSection {
            k: 5,
            kmeans_max_iter: 300,
            kmeans_tol: 1e-9,
            kmeans_seed: None,
            heatmap_pairs: 10_000,
            heatmap_bins: 20,
            heatmap_seed: None,
            holdout: 0.1,
            holdout_seed: None,
            align: FrameAlignment::default(),
        }
    }
}

impl Default for MdsSection {
    fn default() -> Self {
        let m = MdsConfig::default();
        MdsSection {
            target_dim: m.target_dim,
            max_iter: m.max_iter,
            eps: m.eps,
            seed: None,
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            ks: vec![25, 50],
            repeats: 5,
        }
    }
}

/// Kept below 2^63 so the value survives a TOML round trip.
fn derive(seed: u64, stage: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(stage) & (u64::MAX >> 1)
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).at("config", path))?;
        Self::from_toml(&text).map_err(|e| e.at("config", path))
    }

    /// Fills every unset stage seed from the global seed, and the work
    /// directory from the environment (or `.`).
    pub fn resolve(mut self) -> Result<Self> {
        let s = self.seed;
        self.synth.seed.get_or_insert(derive(s, 1));
        self.encoding.seed.get_or_insert(derive(s, 2));
        self.training.init_seed.get_or_insert(derive(s, 3));
        self.training.shuffle_seed.get_or_insert(derive(s, 4));
        self.evaluation.kmeans_seed.get_or_insert(derive(s, 5));
        self.evaluation.heatmap_seed.get_or_insert(derive(s, 6));
        self.evaluation.holdout_seed.get_or_insert(derive(s, 7));
        self.mds.seed.get_or_insert(derive(s, 8));
        if self.paths.work_dir.is_none() {
            let dir = std::env::var_os(WORKDIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
            self.paths.work_dir = Some(dir);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.alphabet()?;
        self.scheme.validate()?;
        self.train_config()?;
        self.mds_config().validate()?;
        if self.evaluation.k == 0 {
            return Err(Error::Config("evaluation.k must be >= 1".into()));
        }
        if self.encoding.k == 0 {
            return Err(Error::Config("encoding.k must be >= 1".into()));
        }
        if self.sweep.repeats == 0 {
            return Err(Error::Config("sweep.repeats must be >= 1".into()));
        }
        NetworkSpec::new(1, self.network.encoder_hidden.clone())?;
        Ok(())
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.alphabet.as_bytes())
    }

    pub fn work_dir(&self) -> PathBuf {
        self.paths.work_dir.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn synth_config(&self) -> SynthConfig {
        SynthConfig {
            n_clusters: self.synth.n_clusters,
            per_cluster: self.synth.per_cluster,
            seed_len: self.synth.seed_len,
            mutation_rate: self.synth.mutation_rate,
            rng_seed: self.synth.seed.unwrap_or(derive(self.seed, 1)),
        }
    }

    pub fn panel_seed(&self) -> u64 {
        self.encoding.seed.unwrap_or(derive(self.seed, 2))
    }

    pub fn network_spec(&self, input_dim: usize) -> Result<NetworkSpec> {
        let n = &self.network;
        let spec = NetworkSpec {
            input_dim,
            encoder_hidden: n.encoder_hidden.clone(),
            alpha: n.alpha,
            hidden_activation: n.hidden_activation,
            bottleneck_activation: n.bottleneck_activation,
            output_activation: n.output_activation,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let t = &self.training;
        let cfg = TrainConfig {
            epochs: t.epochs,
            batch_size: t.batch_size,
            learning_rate: t.learning_rate,
            optimizer: t.optimizer,
            shuffle_seed: t.shuffle_seed.unwrap_or(derive(self.seed, 4)),
            init_seed: t.init_seed.unwrap_or(derive(self.seed, 3)),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn kmeans_seed(&self) -> u64 {
        self.evaluation.kmeans_seed.unwrap_or(derive(self.seed, 5))
    }

    pub fn heatmap_seed(&self) -> u64 {
        self.evaluation.heatmap_seed.unwrap_or(derive(self.seed, 6))
    }

    pub fn holdout_seed(&self) -> u64 {
        self.evaluation.holdout_seed.unwrap_or(derive(self.seed, 7))
    }

    pub fn mds_config(&self) -> MdsConfig {
        MdsConfig {
            target_dim: self.mds.target_dim,
            max_iter: self.mds.max_iter,
            eps: self.mds.eps,
            rng_seed: self.mds.seed.unwrap_or(derive(self.seed, 8)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_after_resolution() {
        let cfg = PipelineConfig {
            paths: Paths {
                input: Some("in.fa".into()),
                work_dir: Some("/tmp/w".into()),
            },
            ..PipelineConfig::default()
        }
        .resolve()
        .unwrap();
        assert!(cfg.synth.seed.is_some() && cfg.mds.seed.is_some() && cfg.training.init_seed.is_some());
        let text = cfg.to_toml().unwrap();
        assert_eq!(PipelineConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg = PipelineConfig::from_toml(
            "seed = 7\n[encoding]\nk = 20\n[training]\nepochs = 3\n[network]\nencoder_hidden = [16, 2]\n",
        )
        .unwrap();
        assert_eq!(cfg.encoding.k, 20);
        assert_eq!(cfg.training.batch_size, 256);
        assert_eq!(cfg.network_spec(20).unwrap().bottleneck(), 2);
        let resolved = cfg.clone().resolve().unwrap();
        assert_eq!(resolved.panel_seed(), cfg.panel_seed());
    }

    #[test]
    fn explicit_seeds_win() {
        let cfg = PipelineConfig::from_toml("seed = 1\n[mds]\nseed = 99\n").unwrap().resolve().unwrap();
        assert_eq!(cfg.mds_config().rng_seed, 99);
        let other = PipelineConfig::from_toml("seed = 2\n[mds]\nseed = 99\n").unwrap().resolve().unwrap();
        assert_eq!(other.mds_config().rng_seed, 99);
        assert_ne!(cfg.panel_seed(), other.panel_seed());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(PipelineConfig::from_toml("[training]\nepoch = 3\n").is_err());
        assert!(PipelineConfig::from_toml("[training]\nepochs = 0\n").unwrap().resolve().is_err());
    }
}
