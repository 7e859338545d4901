//! Exact complex-Gaussian kernel algebra.

mod delta;
mod gaussian;
mod state;

pub use delta::{classify_analytic, classify_delta, classify_operator, DeltaReport};
pub use gaussian::{
    compose, compose_gaussian, make_free_kernel, make_oscillator_kernel, reverse_kernel,
    AnalyticKernel, ComplexGaussianKernel, DeltaKernel, CAUSTIC_BAND, DELTA_THRESHOLD,
};
pub use state::{
    apply_analytic, apply_delta, apply_to_state, l2_distance, random_probes, relative_l2,
    GaussianState,
};
