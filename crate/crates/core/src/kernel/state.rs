//! Gaussian wave packets used as probes for kernel operators.
//!
//! A state is `N · exp(−(1/(4σ²) − iκ)(q − x₀)² + ip(q − x₀))`. Internally
//! it is held as the exponent `−A q² + B q + C`, which is closed under
//! Gaussian kernels, delta kernels and products.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::gaussian::{AnalyticKernel, ComplexGaussianKernel, DeltaKernel};
use crate::error::{domain, CoreError, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianState {
    center: f64,
    width: f64,
    momentum: f64,
    chirp: f64,
    log_norm: Complex64,
}

impl GaussianState {
    /// `width` is the standard deviation of `|ψ|²`; `chirp` is the
    /// coefficient of the quadratic phase `e^{iκ(q − x₀)²}`.
    pub fn new(
        center: f64,
        width: f64,
        momentum: f64,
        chirp: f64,
        normalization: Complex64,
    ) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return domain(format!("state width must be positive, got {width}"));
        }
        if ![center, momentum, chirp].iter().all(|v| v.is_finite()) {
            return domain("state parameters must be finite");
        }
        if normalization.norm() == 0.0 || !normalization.norm().is_finite() {
            return domain("state normalization must be finite and nonzero");
        }
        Ok(Self {
            center,
            width,
            momentum,
            chirp,
            log_norm: normalization.ln(),
        })
    }

    /// Unit-norm packet without chirp.
    pub fn packet(center: f64, width: f64, momentum: f64) -> Result<Self> {
        let n = (2.0 * PI).powf(-0.25) / width.sqrt();
        Self::new(center, width, momentum, 0.0, n.into())
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn momentum(&self) -> f64 {
        self.momentum
    }

    pub fn chirp(&self) -> f64 {
        self.chirp
    }

    pub fn normalization(&self) -> Complex64 {
        self.log_norm.exp()
    }

    pub fn evaluate(&self, q: f64) -> Complex64 {
        let d = q - self.center;
        let a = self.a();
        (self.log_norm - a * d * d + I * self.momentum * d).exp()
    }

    /// Closed-form L2 norm.
    pub fn norm(&self) -> f64 {
        let n2 = (2.0 * self.log_norm.re).exp();
        (n2 * (2.0 * PI).sqrt() * self.width).sqrt()
    }

    /// `⟨self|other⟩ = ∫ conj(self) · other`, in closed form.
    pub fn inner(&self, other: &GaussianState) -> Complex64 {
        let (a1, b1, c1) = self.quadratic();
        let (a2, b2, c2) = other.quadratic();
        let s = a1.conj() + a2;
        let t = b1.conj() + b2;
        let u = c1.conj() + c2;
        (PI / s).sqrt() * (t * t / (4.0 * s) + u).exp()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            log_norm: self.log_norm + factor.ln(),
            ..*self
        }
    }

    fn a(&self) -> Complex64 {
        Complex64::new(0.25 / (self.width * self.width), -self.chirp)
    }

    // exponent −A q² + B q + C
    fn quadratic(&self) -> (Complex64, Complex64, Complex64) {
        let a = self.a();
        let x0 = self.center;
        let p = self.momentum;
        let b = 2.0 * a * x0 + I * p;
        let c = self.log_norm - a * x0 * x0 - I * p * x0;
        (a, b, c)
    }

    fn from_quadratic(a: Complex64, b: Complex64, c: Complex64) -> Result<Self> {
        if a.re.is_nan()
            || a.re <= 0.0
            || ![a, b, c]
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(CoreError::Degenerate(format!(
                "propagated state is not normalizable (quadratic coefficient {a})"
            )));
        }
        let width = 0.5 / a.re.sqrt();
        let center = b.re / (2.0 * a.re);
        let momentum = b.im - 2.0 * a.im * center;
        let log_norm = c + a * center * center + I * momentum * center;
        Ok(Self {
            center,
            width,
            momentum,
            chirp: -a.im,
            log_norm,
        })
    }

    /// Local wavenumber bound over `[lo, hi]`, for choosing quadrature steps.
    fn max_wavenumber(&self, lo: f64, hi: f64) -> f64 {
        let k = |q: f64| (2.0 * self.chirp * (q - self.center) + self.momentum).abs();
        k(lo).max(k(hi))
    }
}

/// Propagates a Gaussian state through a Gaussian kernel exactly.
pub fn apply_to_state(k: &ComplexGaussianKernel, psi: &GaussianState) -> Result<GaussianState> {
    let (a, b, c) = psi.quadratic();
    // ∫ dy exp(−(A − iβ) y² + (B + iγx) y)
    let shared = a - I * k.beta();
    if shared.re.is_nan() || shared.re <= 0.0 {
        return Err(CoreError::Degenerate(format!(
            "Gaussian integral over the input endpoint diverges (coefficient {shared})"
        )));
    }
    let gamma = k.gamma();
    let a_new = -I * k.alpha() + gamma * gamma / (4.0 * shared);
    let b_new = I * gamma * b / (2.0 * shared);
    let c_new = c + b * b / (4.0 * shared) + k.prefactor().ln() + 0.5 * (PI / shared).ln();
    GaussianState::from_quadratic(a_new, b_new, c_new)
}

/// `ψ(q) ↦ c · e^{iκq²} · ψ(λq)`.
pub fn apply_delta(d: &DeltaKernel, psi: &GaussianState) -> Result<GaussianState> {
    if d.coefficient.norm() == 0.0 {
        return Err(CoreError::Degenerate("zero delta coefficient".into()));
    }
    let (a, b, c) = psi.quadratic();
    let lam = d.scale;
    GaussianState::from_quadratic(
        a * lam * lam - I * d.quadratic_phase,
        b * lam,
        c + d.coefficient.ln(),
    )
}

pub fn apply_analytic(k: &AnalyticKernel, psi: &GaussianState) -> Result<GaussianState> {
    match k {
        AnalyticKernel::Gaussian(g) => apply_to_state(g, psi),
        AnalyticKernel::Delta(d) => apply_delta(d, psi),
    }
}

/// `‖a − b‖` by trapezoidal quadrature on a window covering both packets.
///
/// Evaluating the difference pointwise keeps small distances resolvable;
/// the closed-form route through inner products loses them to cancellation
/// below ~1e-8.
pub fn l2_distance(a: &GaussianState, b: &GaussianState) -> f64 {
    const SPAN: f64 = 12.0;
    const MAX_POINTS: usize = 1 << 22;
    let lo = (a.center - SPAN * a.width).min(b.center - SPAN * b.width);
    let hi = (a.center + SPAN * a.width).max(b.center + SPAN * b.width);
    let k_max = a.max_wavenumber(lo, hi).max(b.max_wavenumber(lo, hi));
    let mut step = a.width.min(b.width) / 8.0;
    if k_max > 0.0 {
        step = step.min(PI / (4.0 * k_max));
    }
    let n = (((hi - lo) / step).ceil() as usize + 1).clamp(64, MAX_POINTS);
    let h = (hi - lo) / (n - 1) as f64;
    let sum: f64 = (0..n)
        .map(|j| {
            let q = lo + h * j as f64;
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            w * (a.evaluate(q) - b.evaluate(q)).norm_sqr()
        })
        .sum();
    (sum * h).sqrt()
}

/// `‖a − b‖ / ‖b‖`.
pub fn relative_l2(a: &GaussianState, b: &GaussianState) -> f64 {
    l2_distance(a, b) / b.norm()
}

/// Deterministic unit-norm probe packets placed well inside `|q| ≲ 3`.
pub fn random_probes(count: usize, seed: u64) -> Vec<GaussianState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let center = rng.random_range(-1.5..1.5);
            let width = rng.random_range(0.6..1.4);
            let momentum = rng.random_range(-1.0..1.0);
            GaussianState::packet(center, width, momentum).expect("probe parameters are valid")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::gaussian::{make_free_kernel, make_oscillator_kernel};

    #[test]
    fn zero_width_is_rejected() {
        assert!(GaussianState::packet(0.0, 0.0, 0.0).is_err());
        assert!(GaussianState::packet(0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn packet_is_unit_norm() {
        let psi = GaussianState::packet(0.3, 0.7, 1.2).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-14);
        assert!((psi.inner(&psi).re - 1.0).abs() < 1e-14);
        assert!(psi.inner(&psi).im.abs() < 1e-14);
    }

    #[test]
    fn quadratic_round_trip() {
        let psi = GaussianState::new(0.4, 1.3, -0.8, 0.25, Complex64::new(0.3, -0.2)).unwrap();
        let (a, b, c) = psi.quadratic();
        let back = GaussianState::from_quadratic(a, b, c).unwrap();
        for q in [-2.0, -0.1, 0.0, 1.7] {
            assert!((back.evaluate(q) - psi.evaluate(q)).norm() < 1e-14);
        }
    }

    #[test]
    fn quadrature_norm_matches_closed_form() {
        let psi = GaussianState::new(0.4, 1.3, -0.8, 0.25, Complex64::new(0.3, -0.2)).unwrap();
        let zero = psi.scaled(Complex64::new(1e-300, 0.0));
        let q = l2_distance(&psi, &zero);
        assert!((q - psi.norm()).abs() < 1e-12 * psi.norm());
    }

    #[test]
    fn evolution_preserves_norm() {
        let psi = GaussianState::packet(0.5, 0.8, 0.3).unwrap();
        for k in [
            make_free_kernel(0.9).unwrap(),
            make_oscillator_kernel(1.3, 2.1).unwrap(),
        ] {
            let out = apply_to_state(&k, &psi).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12, "{}", out.norm());
        }
    }

    #[test]
    fn divergent_integral_is_reported() {
        // a kernel with a strongly negative imaginary beta makes the integral grow
        let k = ComplexGaussianKernel::from_parts(
            1.0.into(),
            0.0.into(),
            Complex64::new(0.0, -10.0),
            (-1.0).into(),
            0,
        )
        .unwrap();
        let psi = GaussianState::packet(0.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            apply_to_state(&k, &psi),
            Err(CoreError::Degenerate(_))
        ));
    }

    #[test]
    fn probes_are_deterministic() {
        assert_eq!(random_probes(5, 7), random_probes(5, 7));
        assert_ne!(random_probes(5, 7), random_probes(5, 8));
    }
}
