//! Closed-form complex Gaussian kernels and their composition.
//!
//! A kernel is `A · exp(i(α q_out² + β q_in² + γ q_out q_in))` in units
//! ħ = m = 1. Free-particle and oscillator propagators are of this form, and
//! the integral over a shared endpoint of two such kernels is again one,
//! unless the quadratic coefficient at the shared endpoint vanishes. In that
//! case the pair collapses to a multiple of a delta function, represented
//! here by [`DeltaKernel`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, CoreError, Result};

/// Kernels with `|sin(ωT)|` below this are rejected as caustics.
pub const CAUSTIC_BAND: f64 = 1e-6;

/// A shared-endpoint quadratic coefficient below this (relative to the
/// coefficients it is built from) is treated as exactly zero.
pub const DELTA_THRESHOLD: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexGaussianKernel {
    prefactor: Complex64,
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    phase_branch: i32,
}

impl ComplexGaussianKernel {
    /// Builds a kernel from raw coefficients. A vanishing `gamma` describes a
    /// caustic (no propagation between the endpoints) and is rejected.
    pub fn from_parts(
        prefactor: Complex64,
        alpha: Complex64,
        beta: Complex64,
        gamma: Complex64,
        phase_branch: i32,
    ) -> Result<Self> {
        let all = [prefactor, alpha, beta, gamma];
        if all.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return domain("kernel coefficients must be finite");
        }
        if gamma.norm() == 0.0 {
            return Err(CoreError::Degenerate(
                "gamma = 0: kernel does not connect its endpoints".into(),
            ));
        }
        Ok(Self {
            prefactor,
            alpha,
            beta,
            gamma,
            phase_branch,
        })
    }

    pub fn prefactor(&self) -> Complex64 {
        self.prefactor
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    /// Half-turn counter of the square-root branch. For kernels with real
    /// coefficients `arg(prefactor) = −π/4 − (π/2)·phase_branch (mod 2π)`.
    pub fn phase_branch(&self) -> i32 {
        self.phase_branch
    }

    pub fn evaluate(&self, q_out: f64, q_in: f64) -> Complex64 {
        let exponent =
            self.alpha * q_out * q_out + self.beta * q_in * q_in + self.gamma * q_out * q_in;
        self.prefactor * (I * exponent).exp()
    }

    /// The time-reversed kernel: its value at every real pair of endpoints is
    /// the complex conjugate of this kernel's value there.
    pub fn reversed(&self) -> Self {
        Self {
            prefactor: self.prefactor.conj(),
            alpha: -self.alpha.conj(),
            beta: -self.beta.conj(),
            gamma: -self.gamma.conj(),
            phase_branch: -self.phase_branch - 1,
        }
    }

    fn has_real_coefficients(&self) -> bool {
        [self.alpha, self.beta, self.gamma]
            .iter()
            .all(|z| z.im.abs() <= 1e-14 * z.norm().max(1.0))
    }
}

/// `c · exp(iκ q_out²) · δ(q_in − λ q_out)`: what is left of a Gaussian pair
/// whose shared-endpoint integral degenerates. Acting on a state it gives
/// `ψ(q) ↦ c · e^{iκq²} · ψ(λq)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaKernel {
    pub coefficient: Complex64,
    pub scale: f64,
    pub quadratic_phase: Complex64,
}

impl DeltaKernel {
    pub fn identity() -> Self {
        Self {
            coefficient: Complex64::new(1.0, 0.0),
            scale: 1.0,
            quadratic_phase: Complex64::new(0.0, 0.0),
        }
    }

    pub fn reversed(&self) -> Self {
        Self {
            coefficient: self.coefficient.conj(),
            scale: self.scale,
            quadratic_phase: -self.quadratic_phase.conj(),
        }
    }

    /// True when the operator is `c·δ(q_out − q_in)` for some `c`.
    pub fn is_pure_delta(&self, tol: f64) -> bool {
        (self.scale - 1.0).abs() <= tol && self.quadratic_phase.norm() <= tol
    }
}

/// Result of composing analytic kernels: either a Gaussian again or a delta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticKernel {
    Gaussian(ComplexGaussianKernel),
    Delta(DeltaKernel),
}

impl AnalyticKernel {
    pub fn identity() -> Self {
        AnalyticKernel::Delta(DeltaKernel::identity())
    }

    pub fn reversed(&self) -> Self {
        match self {
            AnalyticKernel::Gaussian(k) => AnalyticKernel::Gaussian(k.reversed()),
            AnalyticKernel::Delta(d) => AnalyticKernel::Delta(d.reversed()),
        }
    }

    /// Pointwise value; `None` for a delta, which has no finite values.
    pub fn evaluate(&self, q_out: f64, q_in: f64) -> Option<Complex64> {
        match self {
            AnalyticKernel::Gaussian(k) => Some(k.evaluate(q_out, q_in)),
            AnalyticKernel::Delta(_) => None,
        }
    }

    pub fn as_gaussian(&self) -> Option<&ComplexGaussianKernel> {
        match self {
            AnalyticKernel::Gaussian(k) => Some(k),
            AnalyticKernel::Delta(_) => None,
        }
    }

    pub fn as_delta(&self) -> Option<&DeltaKernel> {
        match self {
            AnalyticKernel::Delta(d) => Some(d),
            AnalyticKernel::Gaussian(_) => None,
        }
    }

    /// `∫ dq_c later(q_out, q_c) · earlier(q_c, q_in)` in closed form.
    pub fn then(&self, later: &AnalyticKernel) -> Result<AnalyticKernel> {
        compose(later, self)
    }
}

impl From<ComplexGaussianKernel> for AnalyticKernel {
    fn from(k: ComplexGaussianKernel) -> Self {
        AnalyticKernel::Gaussian(k)
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return domain(format!("{name} must be positive and finite, got {value}"));
    }
    Ok(())
}

/// Free-particle kernel `(2πiT)^{-1/2} exp(i(q_out − q_in)²/(2T))`.
pub fn make_free_kernel(duration: f64) -> Result<ComplexGaussianKernel> {
    check_positive("duration", duration)?;
    let c = 0.5 / duration;
    let prefactor = Complex64::from_polar((2.0 * PI * duration).sqrt().recip(), -FRAC_PI_4);
    ComplexGaussianKernel::from_parts(prefactor, c.into(), c.into(), (-1.0 / duration).into(), 0)
}

/// Harmonic-oscillator (Mehler) kernel for `V = ω²q²/2`.
///
/// The prefactor `[ω/(2πi sin ωT)]^{1/2}` is continued through the caustics
/// rather than taken on the principal branch: after `n = ⌊ωT/π⌋` caustics it
/// carries the extra phase `e^{−iπn/2}`.
pub fn make_oscillator_kernel(omega: f64, duration: f64) -> Result<ComplexGaussianKernel> {
    check_positive("omega", omega)?;
    check_positive("duration", duration)?;
    let angle = omega * duration;
    let (sin, cos) = angle.sin_cos();
    if sin.abs() < CAUSTIC_BAND {
        return Err(CoreError::Caustic {
            omega,
            duration,
            sin_abs: sin.abs(),
            band: CAUSTIC_BAND,
        });
    }
    let branch = (angle / PI).floor() as i32;
    let magnitude = (omega / (2.0 * PI * sin.abs())).sqrt();
    let prefactor = Complex64::from_polar(magnitude, -FRAC_PI_4 - FRAC_PI_2 * f64::from(branch));
    let diag = omega * cos / (2.0 * sin);
    ComplexGaussianKernel::from_parts(
        prefactor,
        diag.into(),
        diag.into(),
        (-omega / sin).into(),
        branch,
    )
}

pub fn reverse_kernel(k: &ComplexGaussianKernel) -> ComplexGaussianKernel {
    k.reversed()
}

/// Composes two Gaussian kernels over their shared endpoint.
///
/// Returns [`AnalyticKernel::Delta`] when the shared-endpoint coefficient
/// `later.beta + earlier.alpha` vanishes and the remaining linear coupling
/// is real, which is the forward/backward annihilation case.
pub fn compose_gaussian(
    later: &ComplexGaussianKernel,
    earlier: &ComplexGaussianKernel,
) -> Result<AnalyticKernel> {
    let a = later.beta + earlier.alpha;
    let scale = 1f64.max(later.beta.norm()).max(earlier.alpha.norm());
    if a.norm() <= DELTA_THRESHOLD * scale {
        return delta_from_pair(later, earlier).map(AnalyticKernel::Delta);
    }
    if a.im < -1e-14 * a.norm() {
        return Err(CoreError::Degenerate(format!(
            "shared-endpoint integral diverges: coefficient {a} has negative imaginary part"
        )));
    }
    let root = (PI / (-I * a)).sqrt();
    let four_a = 4.0 * a;
    let alpha = later.alpha - later.gamma * later.gamma / four_a;
    let beta = earlier.beta - earlier.gamma * earlier.gamma / four_a;
    let gamma = -later.gamma * earlier.gamma / (2.0 * a);
    let branch = later.phase_branch + earlier.phase_branch + i32::from(a.re < 0.0);
    ComplexGaussianKernel::from_parts(
        later.prefactor * earlier.prefactor * root,
        alpha,
        beta,
        gamma,
        branch,
    )
    .map(AnalyticKernel::Gaussian)
}

// ∫ dq_c e^{i q_c (γ_L q_out + γ_E q_in)} = 2π δ(γ_L q_out + γ_E q_in)
fn delta_from_pair(
    later: &ComplexGaussianKernel,
    earlier: &ComplexGaussianKernel,
) -> Result<DeltaKernel> {
    if !(later.has_real_coefficients() && earlier.has_real_coefficients()) {
        return Err(CoreError::Degenerate(
            "vanishing shared-endpoint coefficient with complex coupling".into(),
        ));
    }
    let g_out = later.gamma.re;
    let g_in = earlier.gamma.re;
    if g_out == 0.0 || g_in == 0.0 {
        return Err(CoreError::Degenerate(
            "vanishing shared-endpoint coefficient with zero coupling".into(),
        ));
    }
    let scale = -g_out / g_in;
    let coefficient = 2.0 * PI * later.prefactor * earlier.prefactor / g_in.abs();
    let quadratic_phase = later.alpha + earlier.beta * scale * scale;
    Ok(DeltaKernel {
        coefficient,
        scale,
        quadratic_phase,
    })
}

/// Composes any two analytic kernels (`later ∘ earlier`).
pub fn compose(later: &AnalyticKernel, earlier: &AnalyticKernel) -> Result<AnalyticKernel> {
    use AnalyticKernel::{Delta, Gaussian};
    match (later, earlier) {
        (Gaussian(l), Gaussian(e)) => compose_gaussian(l, e),
        (Gaussian(g), Delta(d)) => {
            let lam = d.scale;
            ComplexGaussianKernel::from_parts(
                g.prefactor * d.coefficient / lam.abs(),
                g.alpha,
                (g.beta + d.quadratic_phase) / (lam * lam),
                g.gamma / lam,
                g.phase_branch,
            )
            .map(Gaussian)
        }
        (Delta(d), Gaussian(g)) => {
            let lam = d.scale;
            ComplexGaussianKernel::from_parts(
                d.coefficient * g.prefactor,
                g.alpha * lam * lam + d.quadratic_phase,
                g.beta,
                g.gamma * lam,
                g.phase_branch,
            )
            .map(Gaussian)
        }
        (Delta(l), Delta(e)) => Ok(Delta(DeltaKernel {
            coefficient: l.coefficient * e.coefficient,
            scale: l.scale * e.scale,
            quadratic_phase: l.quadratic_phase + e.quadratic_phase * l.scale * l.scale,
        })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn free_kernel_at_origin() {
        let k = make_free_kernel(1.0).unwrap();
        let v = k.evaluate(0.0, 0.0);
        // (2πi)^{-1/2} = (2π)^{-1/2} e^{-iπ/4}
        let expected = Complex64::new(0.282_094_791_773_878_1, -0.282_094_791_773_878_1);
        assert!(close(v, expected, 1e-15), "{v}");
        assert_eq!(k.evaluate(1.0, 0.0), k.evaluate(0.0, 1.0));
    }

    #[test]
    fn free_kernel_rejects_non_positive_duration() {
        assert!(matches!(make_free_kernel(0.0), Err(CoreError::Domain(_))));
        assert!(matches!(make_free_kernel(-1.0), Err(CoreError::Domain(_))));
        assert!(matches!(
            make_free_kernel(f64::NAN),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn oscillator_quarter_period() {
        let k = make_oscillator_kernel(1.0, FRAC_PI_2).unwrap();
        assert!(k.alpha().norm() < 1e-15);
        assert!(k.beta().norm() < 1e-15);
        assert!(close(k.gamma(), (-1.0).into(), 1e-15));
        let expected = Complex64::from_polar((2.0 * PI).sqrt().recip(), -FRAC_PI_4);
        assert!(close(k.prefactor(), expected, 1e-15));
        assert_eq!(k.phase_branch(), 0);
    }

    #[test]
    fn oscillator_caustic_is_rejected() {
        let err = make_oscillator_kernel(1.0, PI).unwrap_err();
        assert!(matches!(err, CoreError::Caustic { .. }));
        assert!(err.is_numerical());
        assert!(matches!(
            make_oscillator_kernel(0.0, 1.0),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn oscillator_branch_counts_caustics() {
        assert_eq!(make_oscillator_kernel(1.0, 2.0).unwrap().phase_branch(), 0);
        assert_eq!(make_oscillator_kernel(1.0, 4.0).unwrap().phase_branch(), 1);
        assert_eq!(make_oscillator_kernel(1.0, 7.0).unwrap().phase_branch(), 2);
    }

    #[test]
    fn reversed_oscillator_prefactor_matches_backward_form() {
        let (omega, t) = (1.0, 0.8);
        let k = make_oscillator_kernel(omega, t).unwrap().reversed();
        let expected = (Complex64::from(-omega) / (2.0 * PI * I * (omega * t).sin())).sqrt();
        assert!(close(k.prefactor(), expected, 1e-14));
    }

    #[test]
    fn reverse_is_an_involution() {
        let k = make_oscillator_kernel(1.0, 1.0).unwrap();
        assert_eq!(k.reversed().reversed(), k);
        let free = make_free_kernel(1.0).unwrap();
        let v = free.evaluate(0.0, 0.0);
        assert_eq!(free.reversed().evaluate(0.0, 0.0), v.conj());
    }

    #[test]
    fn gamma_zero_is_rejected() {
        let z = Complex64::new(0.0, 0.0);
        let err = ComplexGaussianKernel::from_parts(1.0.into(), z, z, z, 0).unwrap_err();
        assert!(matches!(err, CoreError::Degenerate(_)));
    }

    #[test]
    fn free_semigroup() {
        let one = make_free_kernel(1.0).unwrap();
        let two = make_free_kernel(2.0).unwrap();
        let composed = compose_gaussian(&one, &one).unwrap();
        let k = composed.as_gaussian().unwrap();
        for (a, b) in [
            (k.alpha(), two.alpha()),
            (k.beta(), two.beta()),
            (k.gamma(), two.gamma()),
            (k.prefactor(), two.prefactor()),
        ] {
            assert!(close(a, b, 1e-12), "{a} vs {b}");
        }
        assert_eq!(k.phase_branch(), 0);
    }

    #[test]
    fn oscillator_composition_matches_closed_form() {
        let k = compose_gaussian(
            &make_oscillator_kernel(1.0, 0.3).unwrap(),
            &make_oscillator_kernel(1.0, 0.4).unwrap(),
        )
        .unwrap();
        let direct = make_oscillator_kernel(1.0, 0.7).unwrap();
        let (a, b) = (k.evaluate(0.5, -0.2).unwrap(), direct.evaluate(0.5, -0.2));
        assert!((a - b).norm() <= 1e-10 * b.norm());
    }

    #[test]
    fn composition_across_a_caustic_tracks_the_branch() {
        let half = make_oscillator_kernel(1.0, 2.0).unwrap();
        let full = make_oscillator_kernel(1.0, 4.0).unwrap();
        let k = compose_gaussian(&half, &half).unwrap();
        let k = k.as_gaussian().unwrap();
        assert_eq!(k.phase_branch(), full.phase_branch());
        assert!(close(k.prefactor(), full.prefactor(), 1e-12));
    }

    #[test]
    fn forward_backward_pair_collapses_to_unit_delta() {
        let k = make_oscillator_kernel(1.0, 0.7).unwrap();
        let out = compose_gaussian(&k.reversed(), &k).unwrap();
        let d = out.as_delta().expect("delta-degenerate");
        assert!(d.is_pure_delta(1e-12));
        assert!(close(d.coefficient, 1.0.into(), 1e-12), "{}", d.coefficient);
    }

    #[test]
    fn delta_then_gaussian_is_gaussian() {
        let k = make_free_kernel(1.5).unwrap();
        let id = AnalyticKernel::identity();
        let left = compose(&k.into(), &id).unwrap();
        let right = compose(&id, &k.into()).unwrap();
        assert_eq!(left, AnalyticKernel::Gaussian(k));
        assert_eq!(right, AnalyticKernel::Gaussian(k));
    }
}
