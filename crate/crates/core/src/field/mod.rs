//! A free scalar field as independent oscillator modes, `ω_p² = p² + m²`.
//!
//! Each mode is checked on its own with the closed-form zigzag comparison;
//! the field amplitude is the product of the mode factors, evaluated on a
//! product-Gaussian probe configuration.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, CoreError, Result};
use crate::grid::{build_grid, Grid, Potential};
use crate::kernel::{apply_analytic, GaussianState};
use crate::zigzag::{
    analytic_amplitudes, compare_analytic, CompareOptions, MiddleBranches, TauMap, ZigzagScenario,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSet {
    mass: f64,
    momenta: Vec<f64>,
    frequencies: Vec<f64>,
}

/// `n_modes` momenta evenly spaced in `(0, p_max]`; the zero mode is left out.
pub fn build_mode_set(mass: f64, p_max: f64, n_modes: usize) -> Result<ModeSet> {
    if n_modes == 0 {
        return domain("need at least one mode");
    }
    if !(mass.is_finite() && mass >= 0.0) {
        return domain(format!("mass must be non-negative, got {mass}"));
    }
    if !(p_max.is_finite() && p_max > 0.0) {
        return domain(format!("p_max must be positive, got {p_max}"));
    }
    let momenta: Vec<f64> = (1..=n_modes)
        .map(|k| p_max * k as f64 / n_modes as f64)
        .collect();
    let frequencies: Vec<f64> = momenta
        .iter()
        .map(|p| (p * p + mass * mass).sqrt())
        .collect();
    if frequencies.iter().any(|w| w.is_nan() || *w <= 0.0) {
        return domain("zero-frequency mode");
    }
    Ok(ModeSet {
        mass,
        momenta,
        frequencies,
    })
}

impl ModeSet {
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCheck {
    /// Interior relative Frobenius distance, zigzag vs direct kernel.
    pub relative_error: f64,
    pub delta_coefficient: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeResult {
    pub momentum: f64,
    pub omega: f64,
    pub relative_error: f64,
    pub delta_coefficient: Complex64,
    /// `|z_p − d_p| / |d_p|` for the mode's factor at the reference configuration.
    pub factor_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedMode {
    pub momentum: f64,
    pub omega: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldAmplitudeReport {
    pub per_mode: Vec<ModeResult>,
    pub skipped: Vec<SkippedMode>,
    /// `|Π z_p − Π d_p| / |Π d_p|`; `None` when every mode was skipped.
    pub product_consistency_error: Option<f64>,
    pub reference_configuration: f64,
}

impl FieldAmplitudeReport {
    pub fn all_skipped(&self) -> bool {
        self.per_mode.is_empty()
    }

    pub fn max_mode_error(&self) -> Option<f64> {
        self.per_mode
            .iter()
            .map(|m| m.relative_error)
            .reduce(f64::max)
    }
}

/// Value every mode coordinate takes in the reference field configuration.
pub const REFERENCE_CONFIGURATION: f64 = 0.2;

fn sample_grid() -> Grid {
    build_grid(64, -4.0, 4.0).expect("static grid is valid")
}

/// Zigzag vs direct for one oscillator mode, through the closed-form algebra.
pub fn mode_zigzag_check(mode_frequency: f64, schedule: &TauMap) -> Result<ModeCheck> {
    let scenario = ZigzagScenario::new(
        *schedule,
        Potential::harmonic(mode_frequency)?,
        sample_grid(),
        1,
    )?;
    let report = compare_analytic(&scenario, &CompareOptions::default())?;
    let delta = report
        .delta
        .expect("analytic comparison always classifies the middle block");
    Ok(ModeCheck {
        relative_error: report.relative_difference,
        delta_coefficient: delta.measured_coefficient,
    })
}

/// Probe state of a mode: a displaced, boosted ground-state packet.
pub fn mode_probe(omega: f64) -> GaussianState {
    GaussianState::packet(0.5, (0.5 / omega).sqrt(), 0.3).expect("omega > 0 gives a valid probe")
}

// (zigzag factor, direct factor) at the reference configuration
fn mode_factors(omega: f64, schedule: &TauMap) -> Result<(Complex64, Complex64)> {
    let amps = analytic_amplitudes(
        schedule,
        &Potential::harmonic(omega)?,
        MiddleBranches::TurnBack,
    )?;
    let psi = mode_probe(omega);
    let z = apply_analytic(&amps.zigzag, &psi)?.evaluate(REFERENCE_CONFIGURATION);
    let d = apply_analytic(&amps.direct, &psi)?.evaluate(REFERENCE_CONFIGURATION);
    Ok((z, d))
}

pub fn field_transition_report(modes: &ModeSet, schedule: &TauMap) -> FieldAmplitudeReport {
    let mut per_mode = Vec::new();
    let mut skipped = Vec::new();
    let mut zigzag_product = Complex64::new(1.0, 0.0);
    let mut direct_product = Complex64::new(1.0, 0.0);

    for (&momentum, &omega) in modes.momenta.iter().zip(&modes.frequencies) {
        let outcome = mode_zigzag_check(omega, schedule)
            .and_then(|check| mode_factors(omega, schedule).map(|f| (check, f)));
        match outcome {
            Ok((check, (z, d))) => {
                zigzag_product *= z;
                direct_product *= d;
                per_mode.push(ModeResult {
                    momentum,
                    omega,
                    relative_error: check.relative_error,
                    delta_coefficient: check.delta_coefficient,
                    factor_error: (z - d).norm() / d.norm(),
                });
            }
            Err(e) => skipped.push(SkippedMode {
                momentum,
                omega,
                reason: e.to_string(),
            }),
        }
    }

    let product_consistency_error = (!per_mode.is_empty())
        .then(|| (zigzag_product - direct_product).norm() / direct_product.norm());
    FieldAmplitudeReport {
        per_mode,
        skipped,
        product_consistency_error,
        reference_configuration: REFERENCE_CONFIGURATION,
    }
}

/// True if the error is a caustic; such modes are skipped rather than failed.
pub fn is_caustic(e: &CoreError) -> bool {
    matches!(e, CoreError::Caustic { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zigzag::build_tau_map;
    use std::f64::consts::PI;

    #[test]
    fn mode_construction() {
        let m = build_mode_set(1.0, 3.0, 10).unwrap();
        assert_eq!(m.len(), 10);
        assert!((m.momenta()[0] - 0.3).abs() < 1e-15);
        assert!(m.frequencies().windows(2).all(|w| w[0] < w[1]));

        let massless = build_mode_set(0.0, 3.0, 1).unwrap();
        assert_eq!(massless.frequencies(), &[3.0]);

        let one = build_mode_set(1.0, 1.0, 1).unwrap();
        assert!((one.frequencies()[0] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_mode_sets() {
        assert!(build_mode_set(1.0, 3.0, 0).is_err());
        assert!(build_mode_set(-1.0, 3.0, 4).is_err());
        assert!(build_mode_set(0.0, 0.0, 4).is_err());
    }

    #[test]
    fn single_mode_check() {
        let schedule = build_tau_map(0.0, 1.0, 2.0, 3.0).unwrap();
        let c = mode_zigzag_check(1.0, &schedule).unwrap();
        assert!(c.relative_error <= 1e-10);
        assert!((c.delta_coefficient.norm() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn caustic_mode_is_skipped() {
        // ω·(t_c − t_d) = π on the backward segment
        let schedule = build_tau_map(0.0, 1.0, 2.0, 3.0).unwrap();
        let err = mode_zigzag_check(PI, &schedule).unwrap_err();
        assert!(is_caustic(&err));

        let modes = ModeSet {
            mass: PI,
            momenta: vec![0.0],
            frequencies: vec![PI],
        };
        let report = field_transition_report(&modes, &schedule);
        assert!(report.all_skipped());
        assert_eq!(report.product_consistency_error, None);
        assert_eq!(report.skipped.len(), 1);
    }

    #[test]
    fn single_mode_report_matches_check() {
        let schedule = build_tau_map(0.0, 1.0, 2.0, 3.0).unwrap();
        let modes = build_mode_set(0.0, 1.3, 1).unwrap();
        let report = field_transition_report(&modes, &schedule);
        let check = mode_zigzag_check(1.3, &schedule).unwrap();
        assert_eq!(report.per_mode[0].relative_error, check.relative_error);
        assert_eq!(
            report.per_mode[0].delta_coefficient,
            check.delta_coefficient
        );
        assert!(report.product_consistency_error.unwrap() <= 1e-9);
    }
}
