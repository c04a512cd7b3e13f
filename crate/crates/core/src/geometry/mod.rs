//! Attractors, projections and box-counting estimates.

mod boxdim;
mod cloud;
mod experiment;
mod hausdorff;
pub mod io;
mod projection;

pub use boxdim::{box_dimension, box_dimension_seeded, BoxCountRow, BoxDimEstimate, ScaleRange, GRID_OFFSETS};
pub use cloud::{
    attractor_cloud, attractor_cloud_with_budget, canonical_point, condensation_decomposition,
    condensation_decomposition_with_budget, CloudSource, Condensation, PointCloud,
};
pub use experiment::{
    random_translations, theorem_experiment, theorem_experiment_with, DimensionRow, ExperimentConfig,
    ExperimentReport, Hypothesis, HypothesisStatus, Outcome, ProjectionRow, Scenario,
};
pub use hausdorff::{directed_distance, hausdorff_distance};
pub use projection::{project_cloud, Projection};
