//! Config-driven stages over files in a work directory, plus the fused
//! pipeline and the panel-size sweep built from them.

mod config;
mod stages;

pub use config::{
    EncodingKind, EncodingSection, EvaluationSection, MdsSection, NetworkSection, Paths, PipelineConfig, SweepSection,
    SynthSection, TrainingSection, WORKDIR_ENV,
};
pub use stages::{
    prepare_sequences, run_dedup, run_distmat, run_embed, run_encode, run_heatmap, run_kmeans, run_oos, run_pipeline,
    run_sample_refs, run_silhouette, run_smacof, run_sweep, run_synth, run_train, Arm, DedupReport, EncodeReport,
    HeatmapReport, HeatmapSource, KMeansReport, MdsReport, RunSummary, StageRecord, SweepRow, SweepRun, SynthReport,
    TrainReport, Workspace,
};
