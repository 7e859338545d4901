//! The time-zigzag construction: τ parametrization, four-segment assembly
//! and comparison with the ordinary amplitude.

mod engine;
mod tau;

pub use engine::{
    analytic_amplitudes, analytic_segment, assemble_zigzag, assemble_zigzag_with,
    block_identity_deviation, compare, compare_analytic, compare_with, direct_amplitude,
    sample_kernel, zigzag_operator, AnalyticAmplitudes, CompareOptions, EquivalenceReport,
    MiddleBranches, ZigzagScenario,
};
pub use tau::{build_tau_map, Piece, TauMap};
