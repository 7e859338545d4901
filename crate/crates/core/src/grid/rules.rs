//! Short-time slice rules: how one time slice `ε` of the propagator is
//! realized as a matrix on the grid.
//!
//! Every rule produces the forward slice; the backward slice is always its
//! elementwise complex conjugate. Rules are registered by name and picked at
//! run time.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use super::space::{Grid, Potential};
use crate::error::{CoreError, Result};

pub const DEFAULT_SLICE_RULE: &str = "symmetric";

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `spacing² / (2ε)`: the free kinetic phase between neighbouring points.
pub fn nyquist_ratio(grid: &Grid, eps: f64) -> f64 {
    grid.spacing().powi(2) / (2.0 * eps)
}

pub trait SliceRule: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Rejects steps the rule cannot resolve on this grid.
    fn check_step(&self, grid: &Grid, eps: f64) -> Result<()>;

    /// Entries `K(q_j, q_k)` of the forward slice (before the measure weight).
    fn forward_entries(&self, grid: &Grid, v: &Potential, eps: f64) -> Result<Array2<Complex64>>;
}

/// `exp(−iεp²/2)` restricted to the grid's momenta, as a circulant matrix.
/// Column `k` is the image of a unit spike at `q_k`; the grid is periodic
/// with period `n·spacing`.
fn spectral_kinetic(grid: &Grid, eps: f64) -> Array2<Complex64> {
    let n = grid.len();
    let period = n as f64 * grid.spacing();
    let lo = -(n as i64 / 2);
    let modes: Vec<(f64, Complex64)> = (lo..lo + n as i64)
        .map(|m| {
            let p = 2.0 * PI * m as f64 / period;
            (m as f64, (-I * (0.5 * eps * p * p)).exp())
        })
        .collect();
    let column: Vec<Complex64> = (0..n)
        .map(|d| {
            let s: Complex64 = modes
                .iter()
                .map(|&(m, phase)| phase * (I * (2.0 * PI * m * d as f64 / n as f64)).exp())
                .sum();
            s / n as f64
        })
        .collect();
    Array2::from_shape_fn((n, n), |(j, k)| column[(j + n - k) % n])
}

fn spectral_guard(rule: &'static str, grid: &Grid, eps: f64) -> Result<()> {
    let ratio = nyquist_ratio(grid, eps);
    // ratio ≥ π/4 ⇔ the fastest grid mode turns by at most π per slice
    if !(eps > 0.0 && eps.is_finite()) || ratio < FRAC_PI_4 {
        return Err(CoreError::Nyquist {
            rule,
            ratio,
            relation: ">=",
            bound: FRAC_PI_4,
        });
    }
    Ok(())
}

/// Band-limited kinetic factor, potential phase shared between endpoints:
/// `K = e^{−iεV(q_j)/2} U_{jk} e^{−iεV(q_k)/2} / spacing`. The matrix is
/// symmetric, so its conjugate is its adjoint.
pub struct SymmetricSpectral;

impl SliceRule for SymmetricSpectral {
    fn name(&self) -> &'static str {
        "symmetric"
    }

    fn description(&self) -> &'static str {
        "band-limited kinetic factor, potential phase split between both endpoints"
    }

    fn check_step(&self, grid: &Grid, eps: f64) -> Result<()> {
        spectral_guard(self.name(), grid, eps)
    }

    fn forward_entries(&self, grid: &Grid, v: &Potential, eps: f64) -> Result<Array2<Complex64>> {
        let half: Vec<Complex64> = v
            .sample(grid)?
            .iter()
            .map(|&x| (-I * (0.5 * eps * x)).exp())
            .collect();
        let inv = grid.spacing().recip();
        let mut k = spectral_kinetic(grid, eps);
        k.indexed_iter_mut()
            .for_each(|((j, l), z)| *z *= half[j] * half[l] * inv);
        Ok(k)
    }
}

/// Band-limited kinetic factor with the potential phase at the earlier
/// endpoint: `K = U_{jk} e^{−iεV(q_k)} / spacing`.
pub struct EndpointSpectral;

impl SliceRule for EndpointSpectral {
    fn name(&self) -> &'static str {
        "endpoint"
    }

    fn description(&self) -> &'static str {
        "band-limited kinetic factor, potential phase at the earlier endpoint"
    }

    fn check_step(&self, grid: &Grid, eps: f64) -> Result<()> {
        spectral_guard(self.name(), grid, eps)
    }

    fn forward_entries(&self, grid: &Grid, v: &Potential, eps: f64) -> Result<Array2<Complex64>> {
        let phase: Vec<Complex64> = v
            .sample(grid)?
            .iter()
            .map(|&x| (-I * (eps * x)).exp())
            .collect();
        let inv = grid.spacing().recip();
        let mut k = spectral_kinetic(grid, eps);
        k.indexed_iter_mut()
            .for_each(|((_, l), z)| *z *= phase[l] * inv);
        Ok(k)
    }
}

/// The closed-form short-time kernel sampled pointwise:
/// `(2πiε)^{-1/2} exp[i(q_j − q_k)²/(2ε) − iεV(q_k)]`.
///
/// Only meaningful when neighbouring points differ by a small kinetic phase,
/// `spacing²/(2ε) ≤ π/4`; the sampled kernel is not band-limited, so far
/// off-diagonal entries alias even then.
pub struct SampledClosedForm;

impl SliceRule for SampledClosedForm {
    fn name(&self) -> &'static str {
        "sampled"
    }

    fn description(&self) -> &'static str {
        "closed-form short-time kernel sampled on the grid, potential at the earlier endpoint"
    }

    fn check_step(&self, grid: &Grid, eps: f64) -> Result<()> {
        let ratio = nyquist_ratio(grid, eps);
        if !(eps > 0.0 && eps.is_finite()) || ratio > FRAC_PI_4 {
            return Err(CoreError::Nyquist {
                rule: self.name(),
                ratio,
                relation: "<=",
                bound: FRAC_PI_4,
            });
        }
        Ok(())
    }

    fn forward_entries(&self, grid: &Grid, v: &Potential, eps: f64) -> Result<Array2<Complex64>> {
        let vk = v.sample(grid)?;
        let q = grid.points();
        let prefactor = (2.0 * PI * I * eps).powf(-0.5);
        Ok(Array2::from_shape_fn((grid.len(), grid.len()), |(j, k)| {
            let d = q[j] - q[k];
            prefactor * (I * (0.5 * d * d / eps - eps * vk[k])).exp()
        }))
    }
}

/// Slice rules by name.
#[derive(Clone)]
pub struct SliceRuleRegistry {
    rules: Vec<Arc<dyn SliceRule>>,
}

impl Default for SliceRuleRegistry {
    fn default() -> Self {
        let mut r = Self { rules: Vec::new() };
        r.register(Arc::new(SymmetricSpectral));
        r.register(Arc::new(EndpointSpectral));
        r.register(Arc::new(SampledClosedForm));
        r
    }
}

impl SliceRuleRegistry {
    /// Adds a rule, replacing any rule with the same name.
    pub fn register(&mut self, rule: Arc<dyn SliceRule>) {
        self.rules.retain(|r| r.name() != rule.name());
        self.rules.push(rule);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn SliceRule>> {
        self.rules
            .iter()
            .find(|r| r.name() == name)
            .cloned()
            .ok_or_else(|| CoreError::UnknownStrategy {
                kind: "slice rule",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.rules.iter().map(|r| r.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn SliceRule>> {
        self.rules.iter()
    }
}

pub fn default_rule() -> Arc<dyn SliceRule> {
    Arc::new(SymmetricSpectral)
}
