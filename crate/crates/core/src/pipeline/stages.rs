use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::{EncodingKind, PipelineConfig};
use crate::alignment::{pairwise_matrix, read_matrix_file, write_matrix_csv, write_matrix_file, AlignmentStats};
use crate::autoencoder::{embed, load_model_file, save_model_file, train};
use crate::embedding::{read_embedding_file, write_embedding_file};
use crate::encoding::{
    read_encoded_file, read_panel_file, reference_encode, sample_references, write_encoded_file, write_panel_file,
    EncodedDataset, OneHotEncoder, OrdinalMap,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    distance_heatmap, heatmap_metadata, kmeans, oos_protocol, read_labels_tsv, silhouette, write_heatmap_csv,
    write_labels_tsv, ClusterLabels, InputDistances, KMeansInit, OosOptions, OosReport, PairSampling,
};
use crate::mds::smacof;
use crate::sequences::{dedup, read_fasta_file, synth_dataset, write_fasta_file, write_multiplicity_tsv, SequenceSet};

fn create(stage: &str, path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::from(e).at(stage, dir))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::from(e).at(stage, path))
}

fn write_json(stage: &str, path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = create(stage, path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(w, "{text}").and_then(|_| w.flush()).map_err(|e| Error::from(e).at(stage, path))
}

fn read_sequences(stage: &str, cfg: &PipelineConfig, path: &Path) -> Result<SequenceSet> {
    read_fasta_file(path, &cfg.alphabet()?).map_err(|e| e.at(stage, path))
}

fn ensure_parent(stage: &str, path: &Path) -> Result<()> {
    create(stage, path).map(drop)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthReport {
    pub sequences: usize,
    pub clusters: usize,
    pub seed: u64,
}

/// Writes the synthetic set as FASTA and its true labels as TSV.
pub fn run_synth(cfg: &PipelineConfig, fasta: &Path, labels: &Path) -> Result<SynthReport> {
    let sc = cfg.synth_config();
    let syn = synth_dataset(&sc).map_err(|e| e.at("synth", fasta))?;
    ensure_parent("synth", fasta)?;
    write_fasta_file(fasta, &syn.set).map_err(|e| e.at("synth", fasta))?;
    let truth = ClusterLabels::from_labels(syn.set.ids(), syn.labels)?;
    write_labels_tsv(create("synth", labels)?, &truth).map_err(|e| e.at("synth", labels))?;
    Ok(SynthReport {
        sequences: syn.set.len(),
        clusters: sc.n_clusters,
        seed: sc.rng_seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DedupReport {
    pub input: usize,
    pub unique: usize,
    pub recurrent: usize,
}

pub fn run_dedup(cfg: &PipelineConfig, input: &Path, out: &Path, counts: &Path) -> Result<DedupReport> {
    let set = read_sequences("dedup", cfg, input)?;
    let d = dedup(&set);
    ensure_parent("dedup", out)?;
    write_fasta_file(out, &d.unique).map_err(|e| e.at("dedup", out))?;
    write_multiplicity_tsv(create("dedup", counts)?, &d.multiplicity).map_err(|e| e.at("dedup", counts))?;
    Ok(DedupReport {
        input: set.len(),
        unique: d.unique.len(),
        recurrent: d.recurrent.len(),
    })
}

pub fn run_distmat(cfg: &PipelineConfig, input: &Path, out: &Path, csv: Option<&Path>) -> Result<AlignmentStats> {
    let set = read_sequences("distmat", cfg, input)?;
    let (m, stats) = pairwise_matrix(&set, &cfg.scheme, cfg.threads).map_err(|e| e.at("distmat", input))?;
    ensure_parent("distmat", out)?;
    write_matrix_file(out, &m).map_err(|e| e.at("distmat", out))?;
    if let Some(csv) = csv {
        write_matrix_csv(create("distmat", csv)?, &m).map_err(|e| e.at("distmat", csv))?;
    }
    Ok(stats)
}

pub fn run_sample_refs(cfg: &PipelineConfig, input: &Path, out: &Path) -> Result<usize> {
    let set = read_sequences("sample-refs", cfg, input)?;
    let panel = sample_references(&set, cfg.encoding.k, cfg.panel_seed(), cfg.scheme)
        .map_err(|e| e.at("sample-refs", input))?;
    let refs = panel.resolve(&set)?;
    ensure_parent("sample-refs", out)?;
    write_panel_file(out, &panel, &refs).map_err(|e| e.at("sample-refs", out))?;
    Ok(panel.len())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodeReport {
    pub kind: EncodingKind,
    pub rows: usize,
    pub width: usize,
    pub alignments: AlignmentStats,
}

fn ordinal_map(cfg: &PipelineConfig) -> Result<OrdinalMap> {
    let alphabet = cfg.alphabet()?;
    if alphabet.as_str() == "ATGC" {
        return Ok(OrdinalMap::default());
    }
    let c = alphabet.len() as f32;
    let pairs: Vec<(u8, f32)> = alphabet.symbols().iter().enumerate().map(|(i, &s)| (s, (i + 1) as f32 / c)).collect();
    OrdinalMap::new(alphabet, &pairs)
}

/// Encodes `input` with `cfg.encoding.kind`. Reference encoding needs a panel file.
pub fn run_encode(cfg: &PipelineConfig, input: &Path, panel: Option<&Path>, out: &Path) -> Result<EncodeReport> {
    let set = read_sequences("encode", cfg, input)?;
    let target_len = cfg.encoding.target_len;
    let encoded: Result<(EncodedDataset, AlignmentStats)> = match cfg.encoding.kind {
        EncodingKind::OneHot => OneHotEncoder::new(cfg.alphabet()?)
            .encode(&set, target_len)
            .map(|d| (d, AlignmentStats::default())),
        EncodingKind::Ordinal => ordinal_map(cfg)?
            .encode(&set, target_len)
            .map(|d| (d, AlignmentStats::default())),
        EncodingKind::Reference => {
            let path = panel.ok_or_else(|| Error::Argument("reference encoding needs a panel file".into()))?;
            let (p, refs) = read_panel_file(path, &cfg.alphabet()?).map_err(|e| e.at("encode", path))?;
            reference_encode(&set, &p, Some(&refs), cfg.threads)
        }
    };
    let (data, alignments) = encoded.map_err(|e| e.at("encode", input))?;
    ensure_parent("encode", out)?;
    write_encoded_file(out, &data).map_err(|e| e.at("encode", out))?;
    Ok(EncodeReport {
        kind: cfg.encoding.kind,
        rows: data.len(),
        width: data.width(),
        alignments,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    pub epochs: usize,
    pub updates: usize,
    pub parameters: usize,
    pub first_loss: f64,
    pub final_loss: f64,
}

/// Trains on an encoded dataset; writes the model and a per-epoch loss TSV.
pub fn run_train(cfg: &PipelineConfig, input: &Path, model: &Path, history: &Path) -> Result<TrainReport> {
    let data = read_encoded_file(input).map_err(|e| e.at("train", input))?;
    let spec = cfg.network_spec(data.width())?;
    let tc = cfg.train_config()?;
    let fit = train(&data, &spec, &tc).map_err(|e| e.at("train", input))?;
    ensure_parent("train", model)?;
    save_model_file(model, &fit.weights).map_err(|e| e.at("train", model))?;
    let mut w = create("train", history)?;
    let mut lines = String::from("epoch\tloss\n");
    for (i, l) in fit.history.iter().enumerate() {
        lines.push_str(&format!("{}\t{l:?}\n", i + 1));
    }
    w.write_all(lines.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::from(e).at("train", history))?;
    Ok(TrainReport {
        epochs: fit.history.len(),
        updates: fit.updates,
        parameters: spec.parameter_count(),
        first_loss: fit.history[0],
        final_loss: *fit.history.last().expect("at least one epoch"),
    })
}

pub fn run_embed(model: &Path, input: &Path, out: &Path) -> Result<usize> {
    let w = load_model_file(model).map_err(|e| e.at("embed", model))?;
    let data = read_encoded_file(input).map_err(|e| e.at("embed", input))?;
    let emb = embed(&w, &data).map_err(|e| e.at("embed", input))?;
    ensure_parent("embed", out)?;
    write_embedding_file(out, &emb).map_err(|e| e.at("embed", out))?;
    Ok(emb.len())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMeansReport {
    pub k: usize,
    pub seed: u64,
    pub iterations: usize,
    pub objective: f64,
}

pub fn run_kmeans(cfg: &PipelineConfig, embedding: &Path, out: &Path) -> Result<KMeansReport> {
    let emb = read_embedding_file(embedding).map_err(|e| e.at("kmeans", embedding))?;
    let ev = &cfg.evaluation;
    let seed = cfg.kmeans_seed();
    let r = kmeans(&emb, ev.k, &KMeansInit::PlusPlus { seed }, ev.kmeans_max_iter, ev.kmeans_tol)
        .map_err(|e| e.at("kmeans", embedding))?;
    write_labels_tsv(create("kmeans", out)?, &r.labels).map_err(|e| e.at("kmeans", out))?;
    Ok(KMeansReport {
        k: ev.k,
        seed,
        iterations: r.iterations,
        objective: r.objective.last().copied().unwrap_or(0.0),
    })
}

pub fn run_silhouette(embedding: &Path, labels: &Path) -> Result<f64> {
    let emb = read_embedding_file(embedding).map_err(|e| e.at("silhouette", embedding))?;
    let file = File::open(labels).map_err(|e| Error::from(e).at("silhouette", labels))?;
    let l = read_labels_tsv(BufReader::new(file))
        .and_then(|l| l.aligned_to(emb.ids()))
        .map_err(|e| e.at("silhouette", labels))?;
    Ok(silhouette(&emb, &l).map_err(|e| e.at("silhouette", labels))?.mean)
}

/// Where heatmap input distances come from.
pub enum HeatmapSource<'a> {
    Matrix(&'a Path),
    Sequences(&'a Path),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapReport {
    pub pairs: usize,
    pub bins: usize,
    pub pearson: f64,
}

/// Writes the CSV grid at `out` and its JSON sidecar at `out` + `.json`.
pub fn run_heatmap(cfg: &PipelineConfig, embedding: &Path, source: HeatmapSource<'_>, out: &Path) -> Result<HeatmapReport> {
    let emb = read_embedding_file(embedding).map_err(|e| e.at("heatmap", embedding))?;
    let sampling = PairSampling::Random {
        pairs: cfg.evaluation.heatmap_pairs,
        seed: cfg.heatmap_seed(),
    };
    let bins = cfg.evaluation.heatmap_bins;
    let grid = match source {
        HeatmapSource::Matrix(p) => {
            let m = read_matrix_file(p).map_err(|e| e.at("heatmap", p))?;
            distance_heatmap(&InputDistances::Matrix(&m), &emb, sampling, bins).map_err(|e| e.at("heatmap", p))?
        }
        HeatmapSource::Sequences(p) => {
            let set = read_sequences("heatmap", cfg, p)?;
            let set = set.select_ids(emb.ids()).map_err(|e| e.at("heatmap", p))?;
            distance_heatmap(&InputDistances::Sequences(&set, cfg.scheme), &emb, sampling, bins)
                .map_err(|e| e.at("heatmap", p))?
        }
    };
    write_heatmap_csv(create("heatmap", out)?, &grid).map_err(|e| e.at("heatmap", out))?;
    write_json("heatmap", &sidecar(out), &heatmap_metadata(&grid))?;
    Ok(HeatmapReport {
        pairs: grid.pairs,
        bins: grid.bins,
        pearson: grid.pearson,
    })
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn run_oos(cfg: &PipelineConfig, input: &Path, panel: &Path, out: &Path) -> Result<OosReport> {
    let set = read_sequences("oos", cfg, input)?;
    let (p, _) = read_panel_file(panel, &cfg.alphabet()?).map_err(|e| e.at("oos", panel))?;
    let ev = &cfg.evaluation;
    let opts = OosOptions {
        kmeans_max_iter: ev.kmeans_max_iter,
        kmeans_tol: ev.kmeans_tol,
        align: ev.align,
        threads: cfg.threads,
        ..OosOptions::new(ev.k, ev.holdout, cfg.holdout_seed())
    };
    let spec = cfg.network_spec(p.len())?;
    let report = oos_protocol(&set, &p, &spec, &cfg.train_config()?, &opts).map_err(|e| e.at("oos", input))?;
    write_json("oos", out, &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MdsReport {
    pub iterations: usize,
    pub converged: bool,
    pub initial_stress: f64,
    pub final_stress: f64,
}

/// SMACOF on a distance matrix. Point ids come from `ids_fasta` when given,
/// otherwise they are the row indices.
pub fn run_smacof(cfg: &PipelineConfig, distmat: &Path, ids_fasta: Option<&Path>, out: &Path) -> Result<MdsReport> {
    let m = read_matrix_file(distmat).map_err(|e| e.at("smacof", distmat))?;
    let ids = match ids_fasta {
        Some(p) => read_sequences("smacof", cfg, p)?.ids(),
        None => (0..m.rows()).map(|i| i.to_string()).collect(),
    };
    let r = smacof(&m, &ids, &cfg.mds_config()).map_err(|e| e.at("smacof", distmat))?;
    ensure_parent("smacof", out)?;
    write_embedding_file(out, &r.embedding).map_err(|e| e.at("smacof", out))?;
    let mut hist = create("smacof", &out.with_extension("stress.tsv"))?;
    let mut lines = String::from("iteration\tstress\n");
    for (i, s) in r.stress_history.iter().enumerate() {
        lines.push_str(&format!("{i}\t{s:?}\n"));
    }
    hist.write_all(lines.as_bytes())
        .and_then(|_| hist.flush())
        .map_err(|e| Error::from(e).at("smacof", out))?;
    Ok(MdsReport {
        iterations: r.iterations,
        converged: r.converged,
        initial_stress: r.stress_history[0],
        final_stress: *r.stress_history.last().expect("initial stress recorded"),
    })
}

/// The three dimension-reduction routes compared by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arm {
    /// Full pairwise distances, then SMACOF.
    Mds,
    /// One-hot vectors into the autoencoder.
    OneHot,
    /// Distances to a random reference panel into the autoencoder.
    Reference,
}

impl Arm {
    pub fn name(self) -> &'static str {
        match self {
            Arm::Mds => "mds",
            Arm::OneHot => "onehot",
            Arm::Reference => "reference",
        }
    }
}

impl std::str::FromStr for Arm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "mds" => Ok(Arm::Mds),
            "b" | "onehot" | "one-hot" => Ok(Arm::OneHot),
            "c" | "reference" | "ref" => Ok(Arm::Reference),
            _ => Err(Error::Argument(format!("unknown arm {s:?}; expected a, b or c"))),
        }
    }
}

/// File layout of a work directory.
#[derive(Debug, Clone)]
pub struct Workspace {
    pub dir: PathBuf,
}

impl Workspace {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Workspace { dir: dir.into() }
    }

    pub fn sequences(&self) -> PathBuf {
        self.dir.join("sequences.fasta")
    }

    pub fn true_labels(&self) -> PathBuf {
        self.dir.join("labels.true.tsv")
    }

    pub fn multiplicity(&self) -> PathBuf {
        self.dir.join("multiplicity.tsv")
    }

    /// `<arm>.<name>` inside the work directory.
    pub fn artifact(&self, arm: Arm, name: &str) -> PathBuf {
        self.dir.join(format!("{}.{name}", arm.name()))
    }
}

/// Machine-readable record of one pipeline run. Holds no timings so that a
/// replay reproduces it byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub arm: Arm,
    pub seed: u64,
    pub sequences: usize,
    pub alignments: AlignmentStats,
    pub stages: Vec<StageRecord>,
    pub silhouette_kmeans: f64,
    pub silhouette_true: Option<f64>,
    pub pearson: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub outputs: Vec<String>,
    pub details: serde_json::Value,
}

fn record(stage: &str, outputs: &[&Path], details: impl Serialize) -> Result<StageRecord> {
    Ok(StageRecord {
        stage: stage.into(),
        outputs: outputs
            .iter()
            .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
            .collect(),
        details: serde_json::to_value(details).map_err(|e| Error::Format(e.to_string()))?,
    })
}

/// Prepares `sequences.fasta` in the work directory: deduplicated input
/// when one is configured, a synthetic set otherwise.
pub fn prepare_sequences(cfg: &PipelineConfig, ws: &Workspace) -> Result<StageRecord> {
    match &cfg.paths.input {
        Some(input) => {
            let r = run_dedup(cfg, input, &ws.sequences(), &ws.multiplicity())?;
            record("dedup", &[&ws.sequences(), &ws.multiplicity()], r)
        }
        None => {
            let r = run_synth(cfg, &ws.sequences(), &ws.true_labels())?;
            record("synth", &[&ws.sequences(), &ws.true_labels()], r)
        }
    }
}

/// Runs one arm end to end inside the configured work directory, echoing
/// the resolved config and a run summary next to the artifacts.
pub fn run_pipeline(cfg: &PipelineConfig, arm: Arm) -> Result<RunSummary> {
    let cfg = cfg.clone().resolve()?;
    let ws = Workspace::new(cfg.work_dir());
    std::fs::create_dir_all(&ws.dir).map_err(|e| Error::from(e).at("pipeline", &ws.dir))?;
    let config_path = ws.artifact(arm, "config.toml");
    std::fs::write(&config_path, cfg.to_toml()?).map_err(|e| Error::from(e).at("pipeline", &config_path))?;

    let mut stages = vec![prepare_sequences(&cfg, &ws)?];
    let seqs = ws.sequences();
    let embedding = ws.artifact(arm, "embedding.tsv");
    let mut alignments = AlignmentStats::default();
    let dm = ws.artifact(arm, "distances.swdm");

    let heatmap_source = match arm {
        Arm::Mds => {
            let stats = run_distmat(&cfg, &seqs, &dm, None)?;
            alignments = alignments + stats;
            stages.push(record("distmat", &[&dm], stats)?);
            let r = run_smacof(&cfg, &dm, Some(&seqs), &embedding)?;
            stages.push(record("smacof", &[&embedding], r)?);
            HeatmapSource::Matrix(&dm)
        }
        Arm::OneHot | Arm::Reference => {
            let mut enc_cfg = cfg.clone();
            let encoded = ws.artifact(arm, "encoded");
            let panel_path = ws.artifact(arm, "panel.tsv");
            let panel = if arm == Arm::Reference {
                enc_cfg.encoding.kind = EncodingKind::Reference;
                let k = run_sample_refs(&enc_cfg, &seqs, &panel_path)?;
                stages.push(record("sample-refs", &[&panel_path], json!({ "k": k, "seed": cfg.panel_seed() }))?);
                Some(panel_path.as_path())
            } else {
                enc_cfg.encoding.kind = EncodingKind::OneHot;
                None
            };
            let r = run_encode(&enc_cfg, &seqs, panel, &encoded)?;
            alignments = alignments + r.alignments;
            stages.push(record("encode", &[&encoded], r)?);
            let model = ws.artifact(arm, "model");
            let history = ws.artifact(arm, "loss.tsv");
            let r = run_train(&cfg, &encoded, &model, &history)?;
            stages.push(record("train", &[&model, &history], r)?);
            let n = run_embed(&model, &encoded, &embedding)?;
            stages.push(record("embed", &[&embedding], json!({ "points": n }))?);
            HeatmapSource::Sequences(&seqs)
        }
    };

    let labels = ws.artifact(arm, "kmeans.tsv");
    let r = run_kmeans(&cfg, &embedding, &labels)?;
    stages.push(record("kmeans", &[&labels], r)?);
    let silhouette_kmeans = run_silhouette(&embedding, &labels)?;
    let silhouette_true = if cfg.paths.input.is_none() {
        Some(run_silhouette(&embedding, &ws.true_labels())?)
    } else {
        None
    };
    stages.push(record(
        "silhouette",
        &[],
        json!({ "kmeans_labels": silhouette_kmeans, "true_labels": silhouette_true }),
    )?);

    let heatmap = ws.artifact(arm, "heatmap.csv");
    let r = run_heatmap(&cfg, &embedding, heatmap_source, &heatmap)?;
    stages.push(record("heatmap", &[&heatmap, &sidecar(&heatmap)], &r)?);

    let summary = RunSummary {
        arm,
        seed: cfg.seed,
        sequences: read_embedding_file(&embedding)?.len(),
        alignments,
        stages,
        silhouette_kmeans,
        silhouette_true,
        pearson: r.pearson,
    };
    write_json("pipeline", &ws.artifact(arm, "summary.json"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub max: f64,
    pub min: f64,
    pub avg: f64,
    pub runs: Vec<SweepRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRun {
    pub panel_seed: u64,
    pub silhouette: f64,
    pub final_loss: f64,
}

/// Reference-arm runs for every `K` in `cfg.sweep.ks`, each repeated with
/// `cfg.sweep.repeats` panel seeds. Silhouettes use the true labels of a
/// synthetic set, KMeans labels otherwise. Writes `sweep.tsv` and
/// `sweep.json` in the work directory.
pub fn run_sweep(cfg: &PipelineConfig) -> Result<Vec<SweepRow>> {
    let cfg = cfg.clone().resolve()?;
    let ws = Workspace::new(cfg.work_dir().join("sweep"));
    std::fs::create_dir_all(&ws.dir).map_err(|e| Error::from(e).at("sweep", &ws.dir))?;
    std::fs::write(ws.dir.join("config.toml"), cfg.to_toml()?).map_err(|e| Error::from(e).at("sweep", &ws.dir))?;
    prepare_sequences(&cfg, &ws)?;
    let seqs = ws.sequences();

    let mut rows = Vec::new();
    for &k in &cfg.sweep.ks {
        let mut runs = Vec::new();
        for r in 0..cfg.sweep.repeats {
            let mut run_cfg = cfg.clone();
            run_cfg.encoding.kind = EncodingKind::Reference;
            run_cfg.encoding.k = k;
            run_cfg.encoding.seed = Some(cfg.panel_seed().wrapping_add(r as u64));
            let tag = |name: &str| ws.dir.join(format!("k{k}.r{r}.{name}"));
            run_sample_refs(&run_cfg, &seqs, &tag("panel.tsv"))?;
            run_encode(&run_cfg, &seqs, Some(&tag("panel.tsv")), &tag("encoded"))?;
            let t = run_train(&run_cfg, &tag("encoded"), &tag("model"), &tag("loss.tsv"))?;
            run_embed(&tag("model"), &tag("encoded"), &tag("embedding.tsv"))?;
            let labels = if run_cfg.paths.input.is_none() {
                ws.true_labels()
            } else {
                run_kmeans(&run_cfg, &tag("embedding.tsv"), &tag("kmeans.tsv"))?;
                tag("kmeans.tsv")
            };
            runs.push(SweepRun {
                panel_seed: run_cfg.panel_seed(),
                silhouette: run_silhouette(&tag("embedding.tsv"), &labels)?,
                final_loss: t.final_loss,
            });
        }
        let scs: Vec<f64> = runs.iter().map(|r| r.silhouette).collect();
        rows.push(SweepRow {
            k,
            max: scs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            min: scs.iter().copied().fold(f64::INFINITY, f64::min),
            avg: scs.iter().sum::<f64>() / scs.len() as f64,
            runs,
        });
    }

    let table = ws.dir.join("sweep.tsv");
    let mut w = create("sweep", &table)?;
    let mut text = String::from("k\tmax_sc\tmin_sc\tavg_sc\n");
    for r in &rows {
        text.push_str(&format!("{}\t{:.4}\t{:.4}\t{:.4}\n", r.k, r.max, r.min, r.avg));
    }
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::from(e).at("sweep", &table))?;
    write_json("sweep", &ws.dir.join("sweep.json"), &rows)?;
    Ok(rows)
}
