//! Kernels as matrices on a finite spatial grid, built by time slicing.

mod matrix;
mod propagate;
mod rules;
mod space;

pub use matrix::{
    compose_matrices, identity_deviation, relative_difference, relative_l2_on_grid,
    unitarity_deviation, Direction, KernelMatrix,
};
pub use propagate::{
    propagate_segment, propagate_segment_with, short_time_backward, short_time_backward_with,
    short_time_forward, short_time_forward_with,
};
pub use rules::{
    default_rule, nyquist_ratio, EndpointSpectral, SampledClosedForm, SliceRule, SliceRuleRegistry,
    SymmetricSpectral, DEFAULT_SLICE_RULE,
};
pub use space::{build_grid, CustomPotential, Grid, Potential, MIN_GRID_POINTS};

use ndarray::Array1;
use num_complex::Complex64;

use crate::kernel::GaussianState;

/// Samples a Gaussian state on the grid points.
pub fn sample_state(state: &GaussianState, grid: &Grid) -> Array1<Complex64> {
    grid.points().mapv(|q| state.evaluate(q))
}
