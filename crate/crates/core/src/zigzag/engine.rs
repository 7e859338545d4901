//! Four-segment zigzag amplitude `K_IV ∘ K_III ∘ K_II ∘ K_I` and its
//! comparison with the direct amplitude `K_IV ∘ K_I`.

use std::sync::Arc;
use std::thread;

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use super::tau::TauMap;
use crate::error::{domain, CoreError, Result};
use crate::grid::{
    compose_matrices, default_rule, identity_deviation, propagate_segment_with,
    relative_difference, Direction, Grid, KernelMatrix, Potential, SliceRule,
};
use crate::kernel::{
    apply_analytic, classify_delta, compose, l2_distance, make_free_kernel, make_oscillator_kernel,
    random_probes, AnalyticKernel, ComplexGaussianKernel, DeltaReport, GaussianState,
};

/// Orientation of the two middle segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MiddleBranches {
    /// Segment III runs backward in physical time.
    #[default]
    TurnBack,
    /// Both middle segments run forward; used as a negative control.
    BothForward,
}

#[derive(Clone)]
pub struct ZigzagScenario {
    pub tau_map: TauMap,
    pub potential: Potential,
    pub grid: Grid,
    pub slices_per_unit_time: usize,
    pub slice_rule: Arc<dyn SliceRule>,
}

impl std::fmt::Debug for ZigzagScenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZigzagScenario")
            .field("tau_map", &self.tau_map)
            .field("potential", &self.potential)
            .field("grid", &self.grid)
            .field("slices_per_unit_time", &self.slices_per_unit_time)
            .field("slice_rule", &self.slice_rule.name())
            .finish()
    }
}

impl ZigzagScenario {
    pub fn new(
        tau_map: TauMap,
        potential: Potential,
        grid: Grid,
        slices_per_unit_time: usize,
    ) -> Result<Self> {
        if slices_per_unit_time == 0 {
            return domain("slices_per_unit_time must be at least 1");
        }
        Ok(Self {
            tau_map,
            potential,
            grid,
            slices_per_unit_time,
            slice_rule: default_rule(),
        })
    }

    pub fn with_slice_rule(mut self, rule: Arc<dyn SliceRule>) -> Self {
        self.slice_rule = rule;
        self
    }

    /// `⌈duration × slices_per_unit_time⌉`, at least one.
    pub fn slices_for(&self, duration: f64) -> usize {
        let exact = duration * self.slices_per_unit_time as f64;
        ((exact - 1e-9).ceil() as usize).max(1)
    }

    fn segment(&self, duration: f64, direction: Direction) -> Result<KernelMatrix> {
        propagate_segment_with(
            self.slice_rule.as_ref(),
            &self.grid,
            &self.potential,
            duration,
            self.slices_for(duration),
            direction,
        )
    }
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub zigzag_amplitude: KernelMatrix,
    pub direct_amplitude: KernelMatrix,
    /// Interior-restricted relative Frobenius distance zigzag vs direct.
    pub relative_difference: f64,
    /// Distance of the II–III block from the identity.
    pub annihilation_deviation: f64,
    /// Delta classification of the II–III pair, when the potential has a
    /// closed-form kernel.
    pub delta: Option<DeltaReport>,
}

impl EquivalenceReport {
    pub fn measured_delta_coefficient(&self) -> Option<Complex64> {
        self.delta.map(|d| d.measured_coefficient)
    }

    pub fn measured_delta_phase(&self) -> Option<f64> {
        self.delta.map(|d| d.phase())
    }
}

#[derive(Debug, Clone)]
pub struct CompareOptions {
    pub probes: Vec<GaussianState>,
    pub delta_tolerance: f64,
    pub middle: MiddleBranches,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            probes: random_probes(5, 0),
            delta_tolerance: 1e-8,
            middle: MiddleBranches::TurnBack,
        }
    }
}

struct GridSegments {
    first: KernelMatrix,
    second: KernelMatrix,
    third: KernelMatrix,
    fourth: KernelMatrix,
}

fn grid_segments(s: &ZigzagScenario, middle: MiddleBranches) -> Result<GridSegments> {
    let [d1, d2, d3, d4] = s.tau_map.segment_durations();
    let third_dir = match middle {
        MiddleBranches::TurnBack => Direction::Backward,
        MiddleBranches::BothForward => Direction::Forward,
    };
    let (first, second, third, fourth) = thread::scope(|scope| {
        let h1 = scope.spawn(|| s.segment(d1, Direction::Forward));
        let h2 = scope.spawn(|| s.segment(d2, Direction::Forward));
        let h3 = scope.spawn(|| s.segment(d3, third_dir));
        let h4 = s.segment(d4, Direction::Forward);
        (
            h1.join().expect("segment worker panicked"),
            h2.join().expect("segment worker panicked"),
            h3.join().expect("segment worker panicked"),
            h4,
        )
    });
    Ok(GridSegments {
        first: first?,
        second: second?,
        third: third?,
        fourth: fourth?,
    })
}

pub fn assemble_zigzag(s: &ZigzagScenario) -> Result<KernelMatrix> {
    assemble_zigzag_with(s, MiddleBranches::TurnBack)
}

pub fn assemble_zigzag_with(s: &ZigzagScenario, middle: MiddleBranches) -> Result<KernelMatrix> {
    let seg = grid_segments(s, middle)?;
    let block = compose_matrices(&seg.third, &seg.second)?;
    compose_matrices(&seg.fourth, &compose_matrices(&block, &seg.first)?)
}

/// Forward propagation `t_a → t_f`, sliced like the outer zigzag segments.
pub fn direct_amplitude(s: &ZigzagScenario) -> Result<KernelMatrix> {
    let [d1, _, _, d4] = s.tau_map.segment_durations();
    let first = s.segment(d1, Direction::Forward)?;
    let fourth = s.segment(d4, Direction::Forward)?;
    compose_matrices(&fourth, &first)
}

/// Grid comparison of the zigzag and direct amplitudes.
pub fn compare(s: &ZigzagScenario) -> Result<EquivalenceReport> {
    compare_with(s, &CompareOptions::default())
}

pub fn compare_with(s: &ZigzagScenario, opts: &CompareOptions) -> Result<EquivalenceReport> {
    let seg = grid_segments(s, opts.middle)?;
    let block = compose_matrices(&seg.third, &seg.second)?;
    let zigzag = compose_matrices(&seg.fourth, &compose_matrices(&block, &seg.first)?)?;
    let direct = compose_matrices(&seg.fourth, &seg.first)?;
    let delta = match analytic_segment(&s.potential, s.tau_map.zigzag_duration()) {
        Ok(k) => Some(classify_middle(&k, opts)?),
        Err(CoreError::Domain(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(EquivalenceReport {
        relative_difference: relative_difference(&zigzag, &direct)?,
        annihilation_deviation: identity_deviation(&block),
        zigzag_amplitude: zigzag,
        direct_amplitude: direct,
        delta,
    })
}

/// Closed-form forward kernel of one segment. Only free and harmonic
/// potentials have one.
pub fn analytic_segment(v: &Potential, duration: f64) -> Result<ComplexGaussianKernel> {
    match v {
        Potential::Free => make_free_kernel(duration),
        Potential::Harmonic { omega } => make_oscillator_kernel(*omega, duration),
        Potential::Custom(c) => {
            domain(format!("potential {} has no closed-form kernel", c.label()))
        }
    }
}

fn classify_middle(forward: &ComplexGaussianKernel, opts: &CompareOptions) -> Result<DeltaReport> {
    let backward = match opts.middle {
        MiddleBranches::TurnBack => forward.reversed(),
        MiddleBranches::BothForward => *forward,
    };
    classify_delta(&backward, forward, &opts.probes, opts.delta_tolerance)
}

/// Closed-form pieces of a zigzag scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticAmplitudes {
    pub zigzag: AnalyticKernel,
    pub direct: AnalyticKernel,
    /// `K_III ∘ K_II`.
    pub middle_block: AnalyticKernel,
}

/// Zigzag operator from segment lengths; a zero outer length is the
/// identity, so `(0, Δ, 0)` reduces to the middle block alone.
pub fn zigzag_operator(
    v: &Potential,
    first: f64,
    middle: f64,
    last: f64,
    branches: MiddleBranches,
) -> Result<(AnalyticKernel, AnalyticKernel)> {
    let outer = |d: f64| -> Result<AnalyticKernel> {
        if d == 0.0 {
            Ok(AnalyticKernel::identity())
        } else {
            analytic_segment(v, d).map(AnalyticKernel::from)
        }
    };
    let second = analytic_segment(v, middle)?;
    let third = match branches {
        MiddleBranches::TurnBack => second.reversed(),
        MiddleBranches::BothForward => second,
    };
    let block = compose(&third.into(), &second.into())?;
    let inner = compose(&block, &outer(first)?)?;
    Ok((compose(&outer(last)?, &inner)?, block))
}

pub fn analytic_amplitudes(
    tau_map: &TauMap,
    v: &Potential,
    branches: MiddleBranches,
) -> Result<AnalyticAmplitudes> {
    let [d1, d2, _, d4] = tau_map.segment_durations();
    let (zigzag, middle_block) = zigzag_operator(v, d1, d2, d4, branches)?;
    let direct = analytic_segment(v, tau_map.total_duration())?.into();
    Ok(AnalyticAmplitudes {
        zigzag,
        direct,
        middle_block,
    })
}

/// Samples a Gaussian kernel on the grid.
pub fn sample_kernel(
    k: &AnalyticKernel,
    grid: &Grid,
    direction: Direction,
) -> Result<KernelMatrix> {
    let g = k
        .as_gaussian()
        .ok_or_else(|| CoreError::Degenerate("a delta kernel has no pointwise samples".into()))?;
    let q = grid.points();
    let entries = Array2::from_shape_fn((grid.len(), grid.len()), |(j, l)| g.evaluate(q[j], q[l]));
    KernelMatrix::new(*grid, entries, direction)
}

/// Closed-form comparison: the same report as [`compare`], with every
/// kernel built from the Gaussian algebra and sampled on the scenario grid.
pub fn compare_analytic(s: &ZigzagScenario, opts: &CompareOptions) -> Result<EquivalenceReport> {
    let amps = analytic_amplitudes(&s.tau_map, &s.potential, opts.middle)?;
    let zigzag = sample_kernel(&amps.zigzag, &s.grid, Direction::Mixed)?;
    let direct = sample_kernel(&amps.direct, &s.grid, Direction::Forward)?;
    let forward = analytic_segment(&s.potential, s.tau_map.zigzag_duration())?;
    let delta = classify_middle(&forward, opts)?;
    let annihilation_deviation = block_identity_deviation(&amps.middle_block, &opts.probes)?;
    Ok(EquivalenceReport {
        relative_difference: relative_difference(&zigzag, &direct)?,
        annihilation_deviation,
        zigzag_amplitude: zigzag,
        direct_amplitude: direct,
        delta: Some(delta),
    })
}

/// `max ‖Bψ − ψ‖ / ‖ψ‖` over the probes.
pub fn block_identity_deviation(block: &AnalyticKernel, probes: &[GaussianState]) -> Result<f64> {
    if probes.is_empty() {
        return domain("need at least one probe");
    }
    probes.iter().try_fold(0.0f64, |acc, psi| {
        let out = apply_analytic(block, psi)?;
        Ok(acc.max(l2_distance(&out, psi) / psi.norm()))
    })
}
