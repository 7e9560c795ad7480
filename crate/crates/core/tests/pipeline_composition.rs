use std::fs;
use std::path::Path;

use seqembed::pipeline::{run_embed, run_encode, run_pipeline, run_sample_refs, run_train, Arm, PipelineConfig};
use seqembed::Error;

const SMALL: &str = "seed = 9\n\
[synth]\nn_clusters = 3\nper_cluster = 10\nseed_len = 40\n\
[encoding]\nk = 8\n\
[training]\nepochs = 5\nbatch_size = 8\n\
[evaluation]\nk = 3\nheatmap_pairs = 100\n";

fn config(dir: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::from_toml(SMALL).unwrap();
    cfg.paths.work_dir = Some(dir.to_path_buf());
    cfg
}

#[test]
fn stages_compose_to_the_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let whole = tmp.path().join("whole");
    run_pipeline(&config(&whole), Arm::Reference).unwrap();

    // Rerun the learned stages by hand on the pipeline's own sequences.
    let cfg = config(&whole).resolve().unwrap();
    let seqs = whole.join("sequences.fasta");
    let manual = tmp.path().join("manual");
    fs::create_dir_all(&manual).unwrap();
    let panel = manual.join("panel.tsv");
    run_sample_refs(&cfg, &seqs, &panel).unwrap();
    let encoded = manual.join("encoded");
    run_encode(&cfg, &seqs, Some(&panel), &encoded).unwrap();
    let model = manual.join("model");
    run_train(&cfg, &encoded, &model, &manual.join("loss.tsv")).unwrap();
    let emb = manual.join("embedding.tsv");
    run_embed(&model, &encoded, &emb).unwrap();

    for (mine, theirs) in [
        ("panel.tsv", "reference.panel.tsv"),
        ("encoded", "reference.encoded"),
        ("model", "reference.model"),
        ("embedding.tsv", "reference.embedding.tsv"),
    ] {
        assert_eq!(
            fs::read(manual.join(mine)).unwrap(),
            fs::read(whole.join(theirs)).unwrap(),
            "{mine}"
        );
    }
}

#[test]
fn every_arm_runs_on_a_small_set() {
    let tmp = tempfile::tempdir().unwrap();
    for arm in [Arm::Mds, Arm::OneHot, Arm::Reference] {
        let s = run_pipeline(&config(tmp.path()), arm).unwrap();
        assert_eq!(s.sequences, 30);
        assert!(s.pearson.is_finite());
        assert!(tmp.path().join(format!("{}.summary.json", arm.name())).exists());
    }
}

#[test]
fn errors_name_the_stage_and_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path()).resolve().unwrap();
    let missing = tmp.path().join("absent.fasta");
    let err = run_encode(&cfg, &missing, None, &tmp.path().join("x")).unwrap_err();
    match &err {
        Error::Stage { stage, path, .. } => {
            assert_eq!(stage, "encode");
            assert_eq!(path, &missing);
        }
        other => panic!("unexpected {other:?}"),
    }

    let bad = tmp.path().join("bad.fasta");
    fs::write(&bad, ">a\nACGN\n").unwrap();
    let msg = run_encode(&cfg, &bad, None, &tmp.path().join("y")).unwrap_err().to_string();
    assert!(msg.starts_with("encode: ") && msg.contains("bad.fasta") && msg.contains('N'), "{msg}");
}
