use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use seqembed::pipeline::{self as pl, Arm, EncodingKind, HeatmapSource, PipelineConfig};
use seqembed::Result;

#[derive(Parser)]
#[command(name = "seqembed", version, about = "Embed gene sequences in low dimension")]
struct Cli {
    /// TOML config; flags given here override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for alignment (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Defaults to $SEQEMBED_WORKDIR, then the current directory.
    #[arg(long, global = true)]
    work_dir: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a clustered synthetic FASTA set with its true labels.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        clusters: Option<usize>,
        #[arg(long)]
        per_cluster: Option<usize>,
        #[arg(long)]
        seed_len: Option<usize>,
        #[arg(long)]
        mutation_rate: Option<f64>,
    },
    /// Collapse identical sequences.
    Dedup {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        counts: PathBuf,
    },
    /// All-pairs Smith-Waterman distance matrix.
    Distmat {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Draw a random reference panel.
    SampleRefs {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn sequences into fixed-width vectors.
    Encode {
        #[arg(long)]
        input: PathBuf,
        /// onehot, ordinal or reference
        #[arg(long)]
        kind: Option<EncodingKind>,
        #[arg(long)]
        panel: Option<PathBuf>,
        #[arg(long)]
        target_len: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train an autoencoder on an encoded dataset.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        history: Option<PathBuf>,
        /// Encoder widths ending at the bottleneck, e.g. 128x3.
        #[arg(long)]
        layers: Option<String>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
    },
    /// Map encoded sequences through a trained encoder.
    Embed {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Kmeans {
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    Silhouette {
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
    /// Input-distance vs embedded-distance histogram.
    Heatmap {
        #[arg(long)]
        embedding: PathBuf,
        #[arg(long, conflicts_with = "fasta")]
        distmat: Option<PathBuf>,
        #[arg(long, required_unless_present = "distmat")]
        fasta: Option<PathBuf>,
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hold out points, retrain, and check they land in the same clusters.
    Oos {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        panel: PathBuf,
        #[arg(long)]
        holdout: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// SMACOF layout of a distance matrix.
    Smacof {
        #[arg(long)]
        distmat: PathBuf,
        /// FASTA whose ids name the matrix rows.
        #[arg(long)]
        ids: Option<PathBuf>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// One arm end to end in the work directory: a (mds), b (onehot), c (reference).
    Pipeline {
        #[arg(long, default_value = "c")]
        arm: Arm,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Silhouette max/min/avg over repeated panels for several K.
    Sweep {
        /// Comma-separated panel sizes.
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<usize>>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn emit(stage: &str, started: Instant, report: &impl Serialize) {
    eprintln!("[{stage}] done in {:.2?}", started.elapsed());
    println!("{}", serde_json::to_string(report).expect("reports serialize"));
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(d) = &cli.work_dir {
        cfg.paths.work_dir = Some(d.clone());
    }
    Ok(cfg)
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = load_config(&cli)?;
    let t = Instant::now();
    match cli.cmd {
        Cmd::Synth {
            out,
            labels,
            clusters,
            per_cluster,
            seed_len,
            mutation_rate,
        } => {
            set(&mut cfg.synth.n_clusters, clusters);
            set(&mut cfg.synth.per_cluster, per_cluster);
            set(&mut cfg.synth.seed_len, seed_len);
            set(&mut cfg.synth.mutation_rate, mutation_rate);
            let r = pl::run_synth(&cfg.resolve()?, &out, &labels)?;
            eprintln!("[synth] {} sequences in {} clusters", r.sequences, r.clusters);
            emit("synth", t, &r);
        }
        Cmd::Dedup { input, out, counts } => {
            let r = pl::run_dedup(&cfg.resolve()?, &input, &out, &counts)?;
            eprintln!("[dedup] {} -> {} unique", r.input, r.unique);
            emit("dedup", t, &r);
        }
        Cmd::Distmat { input, out, csv } => {
            let r = pl::run_distmat(&cfg.resolve()?, &input, &out, csv.as_deref())?;
            eprintln!("[distmat] {} alignments, {} cells", r.pair_alignments, r.cells);
            emit("distmat", t, &r);
        }
        Cmd::SampleRefs { input, k, out } => {
            set(&mut cfg.encoding.k, k);
            let cfg = cfg.resolve()?;
            let n = pl::run_sample_refs(&cfg, &input, &out)?;
            emit("sample-refs", t, &serde_json::json!({ "k": n, "seed": cfg.panel_seed() }));
        }
        Cmd::Encode {
            input,
            kind,
            panel,
            target_len,
            out,
        } => {
            set(&mut cfg.encoding.kind, kind);
            if target_len.is_some() {
                cfg.encoding.target_len = target_len;
            }
            let r = pl::run_encode(&cfg.resolve()?, &input, panel.as_deref(), &out)?;
            eprintln!("[encode] {} rows x {} ({} alignments)", r.rows, r.width, r.alignments.pair_alignments);
            emit("encode", t, &r);
        }
        Cmd::Train {
            input,
            out,
            history,
            layers,
            epochs,
            batch_size,
            learning_rate,
        } => {
            if let Some(l) = layers {
                cfg.network.encoder_hidden = seqembed::autoencoder::NetworkSpec::parse_widths(&l)?;
            }
            set(&mut cfg.training.epochs, epochs);
            set(&mut cfg.training.batch_size, batch_size);
            set(&mut cfg.training.learning_rate, learning_rate);
            let history = history.unwrap_or_else(|| out.with_extension("loss.tsv"));
            let r = pl::run_train(&cfg.resolve()?, &input, &out, &history)?;
            eprintln!("[train] {} epochs, loss {:.6} -> {:.6}", r.epochs, r.first_loss, r.final_loss);
            emit("train", t, &r);
        }
        Cmd::Embed { model, input, out } => {
            let n = pl::run_embed(&model, &input, &out)?;
            emit("embed", t, &serde_json::json!({ "points": n }));
        }
        Cmd::Kmeans { embedding, k, out } => {
            set(&mut cfg.evaluation.k, k);
            let r = pl::run_kmeans(&cfg.resolve()?, &embedding, &out)?;
            emit("kmeans", t, &r);
        }
        Cmd::Silhouette { embedding, labels } => {
            let sc = pl::run_silhouette(&embedding, &labels)?;
            eprintln!("[silhouette] mean {sc:.4}");
            emit("silhouette", t, &serde_json::json!({ "silhouette": sc }));
        }
        Cmd::Heatmap {
            embedding,
            distmat,
            fasta,
            pairs,
            bins,
            out,
        } => {
            set(&mut cfg.evaluation.heatmap_pairs, pairs);
            set(&mut cfg.evaluation.heatmap_bins, bins);
            let source = match (&distmat, &fasta) {
                (Some(d), _) => HeatmapSource::Matrix(d),
                (None, Some(f)) => HeatmapSource::Sequences(f),
                (None, None) => unreachable!("clap requires one source"),
            };
            let r = pl::run_heatmap(&cfg.resolve()?, &embedding, source, &out)?;
            eprintln!("[heatmap] pearson {:.4} over {} pairs", r.pearson, r.pairs);
            emit("heatmap", t, &r);
        }
        Cmd::Oos {
            input,
            panel,
            holdout,
            k,
            out,
        } => {
            set(&mut cfg.evaluation.holdout, holdout);
            set(&mut cfg.evaluation.k, k);
            let r = pl::run_oos(&cfg.resolve()?, &input, &panel, &out)?;
            eprintln!(
                "[oos] {}/{} held-out points moved cluster, accuracy {}",
                r.result.mismatches, r.result.total, r.percent
            );
            emit("oos", t, &serde_json::json!({ "accuracy": r.result.accuracy, "percent": r.percent }));
        }
        Cmd::Smacof { distmat, ids, dim, out } => {
            set(&mut cfg.mds.target_dim, dim);
            let r = pl::run_smacof(&cfg.resolve()?, &distmat, ids.as_deref(), &out)?;
            eprintln!(
                "[smacof] stress {:.6e} -> {:.6e} in {} iterations",
                r.initial_stress, r.final_stress, r.iterations
            );
            emit("smacof", t, &r);
        }
        Cmd::Pipeline { arm, input } => {
            if input.is_some() {
                cfg.paths.input = input;
            }
            let summary = pl::run_pipeline(&cfg, arm)?;
            for s in &summary.stages {
                eprintln!("[{}] {}", s.stage, s.details);
            }
            eprintln!(
                "[pipeline] arm {} on {} sequences: {} alignments, {} cells",
                arm.name(),
                summary.sequences,
                summary.alignments.pair_alignments,
                summary.alignments.cells
            );
            emit("pipeline", t, &summary);
        }
        Cmd::Sweep { ks, repeats, input } => {
            set(&mut cfg.sweep.ks, ks);
            set(&mut cfg.sweep.repeats, repeats);
            if input.is_some() {
                cfg.paths.input = input;
            }
            let rows = pl::run_sweep(&cfg)?;
            eprintln!("K\tmax SC\tmin SC\tavg SC");
            for r in &rows {
                eprintln!("{}\t{:.4}\t{:.4}\t{:.4}", r.k, r.max, r.min, r.avg);
            }
            emit("sweep", t, &rows);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                if !e.to_string().contains(&s.to_string()) {
                    eprintln!("  caused by: {s}");
                }
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
