//! Scenario backends: one per run mode, registered by name.
//!
//! A backend takes a [`ScenarioConfig`], runs the comparison it stands for
//! and returns a [`RunOutcome`] holding pass/fail checks, a serializable
//! summary and the two sampled kernels.

mod config;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

pub use config::{
    FieldSpec, GridSpec, PotentialSpec, ScenarioConfig, Times, Tolerances, ANALYTIC_SAMPLE_GRID,
};

use crate::error::{CoreError, Result};
use crate::field::{build_mode_set, field_transition_report, FieldAmplitudeReport, ModeSet};
use crate::grid::{Direction, KernelMatrix, Potential, SliceRuleRegistry, DEFAULT_SLICE_RULE};
use crate::kernel::{random_probes, DeltaReport};
use crate::zigzag::{
    analytic_amplitudes, compare_analytic, compare_with, sample_kernel, CompareOptions,
    EquivalenceReport, MiddleBranches, ZigzagScenario,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`; NaN fails.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaSummary {
    pub coefficient_re: f64,
    pub coefficient_im: f64,
    pub magnitude: f64,
    pub phase: f64,
    /// `arg(c) − π/2`: distance from a pure `i` coefficient.
    pub phase_gap_to_i: f64,
    pub displacement_error: f64,
    pub is_delta_like: bool,
}

impl From<DeltaReport> for DeltaSummary {
    fn from(d: DeltaReport) -> Self {
        let c = d.measured_coefficient;
        Self {
            coefficient_re: c.re,
            coefficient_im: c.im,
            magnitude: c.norm(),
            phase: d.phase(),
            phase_gap_to_i: d.phase() - FRAC_PI_2,
            displacement_error: d.displacement_error,
            is_delta_like: d.is_delta_like,
        }
    }
}

impl DeltaSummary {
    pub fn coefficient(&self) -> Complex64 {
        Complex64::new(self.coefficient_re, self.coefficient_im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceSummary {
    pub relative_difference: f64,
    pub annihilation_deviation: f64,
    pub delta: Option<DeltaSummary>,
    pub slice_rule: Option<String>,
    pub grid_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSummary {
    pub mass: f64,
    pub momenta: Vec<f64>,
    pub frequencies: Vec<f64>,
    pub report: FieldAmplitudeReport,
    /// Delta fit of the lowest non-skipped mode.
    pub lowest_mode_delta: Option<DeltaSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunDetails {
    Equivalence(EquivalenceSummary),
    Field(FieldSummary),
}

impl RunDetails {
    pub fn delta(&self) -> Option<DeltaSummary> {
        match self {
            RunDetails::Equivalence(e) => e.delta,
            RunDetails::Field(f) => f.lowest_mode_delta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub backend: &'static str,
    pub checks: Vec<Check>,
    pub details: RunDetails,
    pub zigzag_kernel: KernelMatrix,
    pub direct_kernel: KernelMatrix,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub trait ScenarioBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn run(&self, cfg: &ScenarioConfig) -> Result<RunOutcome>;
}

fn compare_options(cfg: &ScenarioConfig) -> CompareOptions {
    CompareOptions {
        probes: random_probes(cfg.probes, cfg.seed),
        delta_tolerance: cfg.tolerances.delta,
        middle: MiddleBranches::TurnBack,
    }
}

fn delta_checks(checks: &mut Vec<Check>, d: &DeltaSummary, t: &Tolerances) {
    checks.push(Check::at_most(
        "delta_magnitude",
        (d.magnitude - 1.0).abs(),
        t.delta,
    ));
    checks.push(Check::at_most(
        "delta_displacement",
        d.displacement_error,
        t.analytic,
    ));
}

fn equivalence_outcome(
    backend: &'static str,
    report: EquivalenceReport,
    checks: Vec<Check>,
    slice_rule: Option<String>,
) -> RunOutcome {
    let grid_points = report.zigzag_amplitude.grid().len();
    RunOutcome {
        backend,
        checks,
        details: RunDetails::Equivalence(EquivalenceSummary {
            relative_difference: report.relative_difference,
            annihilation_deviation: report.annihilation_deviation,
            delta: report.delta.map(DeltaSummary::from),
            slice_rule,
            grid_points,
        }),
        zigzag_kernel: report.zigzag_amplitude,
        direct_kernel: report.direct_amplitude,
    }
}

/// Closed-form Gaussian algebra, sampled on a grid for output.
#[derive(Debug, Default)]
pub struct AnalyticBackend;

impl ScenarioBackend for AnalyticBackend {
    fn name(&self) -> &'static str {
        "analytic"
    }

    fn description(&self) -> &'static str {
        "closed-form kernel composition (free and harmonic potentials)"
    }

    fn run(&self, cfg: &ScenarioConfig) -> Result<RunOutcome> {
        cfg.validate()?;
        let scenario = ZigzagScenario::new(
            cfg.tau_map()?,
            cfg.potential.build()?,
            cfg.build_grid(Some(ANALYTIC_SAMPLE_GRID))?,
            cfg.slices_per_unit_time,
        )?;
        let report = compare_analytic(&scenario, &compare_options(cfg))?;
        let t = cfg.tolerances;
        let mut checks = vec![
            Check::at_most("zigzag_vs_direct", report.relative_difference, t.analytic),
            Check::at_most("annihilation", report.annihilation_deviation, t.analytic),
        ];
        if let Some(d) = report.delta {
            delta_checks(&mut checks, &d.into(), &t);
        }
        Ok(equivalence_outcome(self.name(), report, checks, None))
    }
}

/// Time-sliced matrices on a finite grid.
#[derive(Default)]
pub struct GridBackend {
    rules: SliceRuleRegistry,
}

impl std::fmt::Debug for GridBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridBackend")
            .field("rules", &self.rules.names())
            .finish()
    }
}

impl GridBackend {
    pub fn with_rules(rules: SliceRuleRegistry) -> Self {
        Self { rules }
    }

    pub fn rules(&self) -> &SliceRuleRegistry {
        &self.rules
    }
}

impl ScenarioBackend for GridBackend {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn description(&self) -> &'static str {
        "time-sliced grid propagators for any sampled potential"
    }

    fn run(&self, cfg: &ScenarioConfig) -> Result<RunOutcome> {
        cfg.validate()?;
        let rule_name = cfg.slice_rule.as_deref().unwrap_or(DEFAULT_SLICE_RULE);
        let rule = self.rules.get(rule_name)?;
        let scenario = ZigzagScenario::new(
            cfg.tau_map()?,
            cfg.potential.build()?,
            cfg.build_grid(None)?,
            cfg.slices_per_unit_time,
        )?
        .with_slice_rule(rule);
        let report = compare_with(&scenario, &compare_options(cfg))?;
        let t = cfg.tolerances;
        let mut checks = vec![
            Check::at_most("zigzag_vs_direct", report.relative_difference, t.grid),
            Check::at_most(
                "annihilation",
                report.annihilation_deviation,
                t.annihilation,
            ),
        ];
        if let Some(d) = report.delta {
            delta_checks(&mut checks, &d.into(), &t);
        }
        Ok(equivalence_outcome(
            self.name(),
            report,
            checks,
            Some(rule_name.to_string()),
        ))
    }
}

/// Free scalar field as a product of independent oscillator modes.
#[derive(Debug, Default)]
pub struct FieldBackend;

impl FieldBackend {
    fn lowest_mode(
        cfg: &ScenarioConfig,
        modes: &ModeSet,
        report: &FieldAmplitudeReport,
    ) -> Result<(KernelMatrix, KernelMatrix, DeltaSummary)> {
        let lowest = report
            .per_mode
            .iter()
            .min_by(|a, b| a.omega.total_cmp(&b.omega))
            .ok_or_else(|| {
                CoreError::Degenerate(format!(
                    "all {} modes hit a caustic; nothing to compare",
                    modes.len()
                ))
            })?;
        let scenario = ZigzagScenario::new(
            cfg.tau_map()?,
            Potential::harmonic(lowest.omega)?,
            cfg.build_grid(Some(ANALYTIC_SAMPLE_GRID))?,
            cfg.slices_per_unit_time,
        )?;
        let opts = compare_options(cfg);
        let amps = analytic_amplitudes(&scenario.tau_map, &scenario.potential, opts.middle)?;
        let zigzag = sample_kernel(&amps.zigzag, &scenario.grid, Direction::Mixed)?;
        let direct = sample_kernel(&amps.direct, &scenario.grid, Direction::Forward)?;
        let delta = compare_analytic(&scenario, &opts)?
            .delta
            .expect("analytic comparison always classifies the middle block");
        Ok((zigzag, direct, delta.into()))
    }
}

impl ScenarioBackend for FieldBackend {
    fn name(&self) -> &'static str {
        "field"
    }

    fn description(&self) -> &'static str {
        "free scalar field, mode by mode (the potential setting is ignored)"
    }

    fn run(&self, cfg: &ScenarioConfig) -> Result<RunOutcome> {
        cfg.validate()?;
        let spec = cfg.field_spec();
        let modes = build_mode_set(spec.mass, spec.p_max, spec.n_modes)?;
        let schedule = cfg.tau_map()?;
        let report = field_transition_report(&modes, &schedule);
        let (zigzag, direct, lowest_delta) = Self::lowest_mode(cfg, &modes, &report)?;

        let t = cfg.tolerances;
        let mut checks = Vec::new();
        for m in &report.per_mode {
            checks.push(Check::at_most(
                format!("mode_p={:.6}", m.momentum),
                m.relative_error,
                t.field,
            ));
        }
        let worst_factor = report
            .per_mode
            .iter()
            .map(|m| m.factor_error)
            .fold(0.0, f64::max);
        checks.push(Check::at_most("mode_factor", worst_factor, t.field));
        if let Some(p) = report.product_consistency_error {
            checks.push(Check::at_most("product_consistency", p, t.field));
        }
        let worst_delta = report
            .per_mode
            .iter()
            .map(|m| (m.delta_coefficient.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        checks.push(Check::at_most("delta_magnitude", worst_delta, t.delta));

        Ok(RunOutcome {
            backend: self.name(),
            checks,
            details: RunDetails::Field(FieldSummary {
                mass: modes.mass(),
                momenta: modes.momenta().to_vec(),
                frequencies: modes.frequencies().to_vec(),
                report,
                lowest_mode_delta: Some(lowest_delta),
            }),
            zigzag_kernel: zigzag,
            direct_kernel: direct,
        })
    }
}

/// Backends by name. `Default` registers analytic, grid and field.
#[derive(Clone)]
pub struct BackendRegistry {
    backends: BTreeMap<&'static str, Arc<dyn ScenarioBackend>>,
}

impl Default for BackendRegistry {
    fn default() -> Self {
        let mut r = Self {
            backends: BTreeMap::new(),
        };
        r.register(Arc::new(AnalyticBackend));
        r.register(Arc::new(GridBackend::default()));
        r.register(Arc::new(FieldBackend));
        r
    }
}

impl BackendRegistry {
    /// Replaces any backend already registered under the same name.
    pub fn register(&mut self, backend: Arc<dyn ScenarioBackend>) {
        self.backends.insert(backend.name(), backend);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ScenarioBackend>> {
        self.backends
            .get(name)
            .cloned()
            .ok_or_else(|| CoreError::UnknownStrategy {
                kind: "backend",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.backends.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn ScenarioBackend>> {
        self.backends.values()
    }

    /// Runs the backend named by `cfg.mode`.
    pub fn run(&self, cfg: &ScenarioConfig) -> Result<RunOutcome> {
        self.get(&cfg.mode)?.run(cfg)
    }
}
