//! Config-driven runs: one arm end to end, then a small panel-size sweep.
//! Artifacts go to a temporary directory unless SEQEMBED_WORKDIR is set.

use seqembed::pipeline::{run_pipeline, run_sweep, Arm, PipelineConfig, WORKDIR_ENV};

const CONFIG: &str = r#"
seed = 11

[synth]
n_clusters = 4
per_cluster = 25
seed_len = 80

[encoding]
k = 20

[training]
epochs = 30
batch_size = 16

[evaluation]
k = 4
heatmap_pairs = 2000

[sweep]
ks = [10, 20]
repeats = 3
"#;

fn main() -> seqembed::Result<()> {
    let mut cfg = PipelineConfig::from_toml(CONFIG)?;
    let dir = std::env::var_os(WORKDIR_ENV)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("seqembed-example"));
    cfg.paths.work_dir = Some(dir);

    for arm in [Arm::Mds, Arm::Reference] {
        let s = run_pipeline(&cfg, arm)?;
        println!(
            "{:>9}: SC(kmeans) {:.3}  SC(true) {:.3}  pearson {:.3}  alignments {}",
            arm.name(),
            s.silhouette_kmeans,
            s.silhouette_true.unwrap_or(f64::NAN),
            s.pearson,
            s.alignments.pair_alignments
        );
    }

    println!("K\tmax\tmin\tavg");
    for row in run_sweep(&cfg)? {
        println!("{}\t{:.3}\t{:.3}\t{:.3}", row.k, row.max, row.min, row.avg);
    }
    Ok(())
}
