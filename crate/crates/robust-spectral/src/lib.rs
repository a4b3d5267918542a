//! Spectral clustering with noise-robust node selection.
//!
//! The library treats a clustering pipeline as a function graph and asks how
//! stable its spectral embedding is under perturbations of the input
//! neighborhood structure. Nodes whose local embedding distortion is large are
//! likely to sit on noisy or adversarially placed edges; clustering only the
//! low-distortion ("robust") nodes and assigning the remainder to the nearest
//! centroid both improves accuracy on noisy data and shrinks the
//! eigendecomposition that dominates runtime.
//!
//! Modules follow the pipeline order:
//!
//! * [`dataset`] — loading IDX and CSV point sets, synthetic Gaussian blobs
//! * [`graph`] — symmetric k-NN graphs and unnormalized Laplacians
//! * [`eigen`] — dense and iterative (standard and generalized) eigensolvers
//! * [`clustering`] — spectral embedding, k-means, plain spectral clustering
//! * [`spade`] — per-node embedding-distortion scores and robust selection
//! * [`pipeline`] — the end-to-end robust clustering flow with stage timings
//! * [`metrics`] — clustering accuracy via optimal label matching
//! * [`experiment`] — config-driven experiment runs and report files

pub mod clustering;
pub mod dataset;
pub mod eigen;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod pipeline;
pub mod spade;

pub use clustering::{
    kmeans, spectral_clustering, spectral_embed, ClusterAssignment, Embedding,
};
pub use dataset::{add_bridge_noise, load_csv, load_idx, make_blobs, PointSet};
pub use eigen::{
    bottom_nonzero_eigenpairs, dense_eig_oracle, generalized_top_eigenpairs, timed, EigenPairs,
    SolverOptions, SolverPath,
};
pub use error::{Error, Result};
pub use experiment::{
    load_dataset, run_experiment, write_report, DatasetKind, ExperimentConfig, ExperimentReport,
};
pub use graph::{
    build_knn_graph, build_knn_graph_points, connected_components, laplacian, LaplacianMatrix,
    Metric, NeighborGraph,
};
pub use metrics::{acc, hungarian_max_assignment, ConfusionMatrix};
pub use pipeline::{
    centroid_assign, robust_spectral_clustering, RobustClusteringResult, RobustParams,
    StageTimings,
};
pub use spade::{
    build_vk, robustness_report, select_robust, spade_scores, write_score_csv, SpadeReport,
};
