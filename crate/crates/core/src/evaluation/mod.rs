//! Clustering and agreement measures for embeddings.

mod align;
mod heatmap;
mod kmeans;
mod oos;
mod silhouette;

pub use align::affine_align;
pub use heatmap::{distance_heatmap, heatmap_metadata, pearson, write_heatmap_csv, HeatmapGrid, InputDistances, PairSampling};
pub use kmeans::{
    kmeans, read_labels_tsv, write_labels_tsv, Centroids, ClusterLabels, KMeansInit, KMeansResult,
};
pub use oos::{oos_accuracy, oos_protocol, FrameAlignment, OosAccuracy, OosOptions, OosReport, Percent};
pub use silhouette::{silhouette, Silhouette};
