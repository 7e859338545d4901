//! Transition amplitudes with a single time zigzag.
//!
//! The crate builds propagators for a particle (ħ = m = 1) that runs
//! forward in time, turns back between two turning instants and then runs
//! forward again. The backward segment carries `exp(−iS)`, and composing it
//! with the matching forward segment gives a delta function, so the zigzag
//! amplitude reduces to the ordinary time-ordered one.
//!
//! * [`kernel`]: closed-form Gaussian kernels (free particle, oscillator),
//!   reversal, composition and delta classification.
//! * [`grid`]: the same operators as matrices on a spatial grid, built by
//!   time slicing for arbitrary potentials.
//! * [`zigzag`]: the piecewise time parametrization and the four-segment
//!   amplitude, compared against the direct amplitude.
//! * [`field`]: a free scalar field as independent oscillator modes.
//! * [`backend`]: scenario configuration and the registry of runnable backends.

pub mod backend;
pub mod error;
pub mod field;
pub mod grid;
pub mod kernel;
pub mod zigzag;

pub use error::{CoreError, Result};
