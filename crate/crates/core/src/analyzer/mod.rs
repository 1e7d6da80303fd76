//! Verification of the convergence and normal-continuity hypotheses, and
//! the empirical checks of their conclusions.

mod blf;
mod report;
mod rings;

pub use blf::{basic_limit_function, sup_diff, BLFSample, PartitionValue};
pub use report::{
    verify_convergence_conditions, verify_normal_continuity_conditions, AnalysisOptions,
    ConditionReport, Hypothesis, Status, Theorem, CONVERGENT_WHITELIST, SCHEMA_VERSION,
};
pub use rings::{
    estimate_limit_normal, generate_rings, ring_normals, sample_characteristic_ring,
    CharMapOptions, JacobianSignReport, NormalEstimate, RingCell, RingSample, CELL_ORIGINS,
};
