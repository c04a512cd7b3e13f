//! Subadditive pressure and the quantities derived from it.

mod affdim;
mod estimate;
mod gibbs;
mod logsum;

pub use affdim::{affinity_dimension, pressure_gap, AffdimConfig, AffinityBracket, GapConfig, GapResult};
pub use estimate::{
    dispatch_kind, pressure_dispatch, pressure_dispatch_with, pressure_estimate, pressure_estimate_with_budget,
    Certificate, PressureEstimate,
};
pub use gibbs::{
    gibbs_weights, level_count, measure_diagnostics, phi_weights, quasi_multiplicativity, CylinderMeasure,
    MeasureDiagnostics, Provenance, QuasiRow,
};
pub use logsum::LogSum;
