use num_complex::Complex64;
use serde::Serialize;

use super::gaussian::{AnalyticKernel, ComplexGaussianKernel};
use super::state::{apply_analytic, apply_to_state, l2_distance, GaussianState};
use crate::error::{domain, Result};

/// How closely an operator acts as `c · δ(q_out − q_in)` on a set of probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaReport {
    pub measured_coefficient: Complex64,
    pub displacement_error: f64,
    pub is_delta_like: bool,
    pub tolerance: f64,
}

impl DeltaReport {
    /// Phase of the measured coefficient, in `(−π, π]`.
    pub fn phase(&self) -> f64 {
        self.measured_coefficient.arg()
    }
}

/// Applies `earlier` then `later` to each probe and fits a single complex
/// coefficient `c` with `K ψ ≈ c ψ` for all probes.
pub fn classify_delta(
    later: &ComplexGaussianKernel,
    earlier: &ComplexGaussianKernel,
    probes: &[GaussianState],
    tol: f64,
) -> Result<DeltaReport> {
    classify_operator(
        |psi| apply_to_state(earlier, psi).and_then(|mid| apply_to_state(later, &mid)),
        probes,
        tol,
    )
}

pub fn classify_analytic(
    op: &AnalyticKernel,
    probes: &[GaussianState],
    tol: f64,
) -> Result<DeltaReport> {
    classify_operator(|psi| apply_analytic(op, psi), probes, tol)
}

/// Delta classification for any operator acting on Gaussian states.
///
/// A probe the operator cannot propagate makes the report fail with an
/// infinite displacement error rather than an `Err`.
pub fn classify_operator<F>(op: F, probes: &[GaussianState], tol: f64) -> Result<DeltaReport>
where
    F: Fn(&GaussianState) -> Result<GaussianState>,
{
    if probes.is_empty() {
        return domain("classify_delta needs at least one probe");
    }
    let images: Vec<Option<GaussianState>> = probes.iter().map(|p| op(p).ok()).collect();
    if images.iter().any(Option::is_none) {
        return Ok(DeltaReport {
            measured_coefficient: Complex64::new(f64::NAN, f64::NAN),
            displacement_error: f64::INFINITY,
            is_delta_like: false,
            tolerance: tol,
        });
    }
    let images: Vec<GaussianState> = images.into_iter().flatten().collect();

    let (num, den) = probes
        .iter()
        .zip(&images)
        .fold((Complex64::new(0.0, 0.0), 0.0), |(n, d), (p, img)| {
            (n + p.inner(img), d + p.inner(p).re)
        });
    let c = num / den;

    let displacement_error = probes
        .iter()
        .zip(&images)
        .map(|(p, img)| {
            let scale = img.norm().max(c.norm() * p.norm());
            if scale == 0.0 {
                return 0.0;
            }
            if c.norm() == 0.0 {
                return img.norm() / scale;
            }
            l2_distance(img, &p.scaled(c)) / scale
        })
        .fold(0.0, f64::max);

    Ok(DeltaReport {
        measured_coefficient: c,
        displacement_error,
        is_delta_like: displacement_error <= tol,
        tolerance: tol,
    })
}
