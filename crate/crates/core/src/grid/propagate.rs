use ndarray::Array2;
use num_complex::Complex64;

use super::matrix::{Direction, KernelMatrix};
use super::rules::{default_rule, SliceRule};
use super::space::{Grid, Potential};
use crate::error::{domain, Result};

pub fn short_time_forward(grid: &Grid, v: &Potential, eps: f64) -> Result<KernelMatrix> {
    short_time_forward_with(default_rule().as_ref(), grid, v, eps)
}

pub fn short_time_backward(grid: &Grid, v: &Potential, eps: f64) -> Result<KernelMatrix> {
    short_time_backward_with(default_rule().as_ref(), grid, v, eps)
}

pub fn short_time_forward_with(
    rule: &dyn SliceRule,
    grid: &Grid,
    v: &Potential,
    eps: f64,
) -> Result<KernelMatrix> {
    rule.check_step(grid, eps)?;
    KernelMatrix::new(
        *grid,
        rule.forward_entries(grid, v, eps)?,
        Direction::Forward,
    )
}

/// Backward slice: the elementwise conjugate of the forward slice, which
/// carries `exp(−iS)` for a real potential.
pub fn short_time_backward_with(
    rule: &dyn SliceRule,
    grid: &Grid,
    v: &Potential,
    eps: f64,
) -> Result<KernelMatrix> {
    short_time_forward_with(rule, grid, v, eps).map(|k| k.conj())
}

pub fn propagate_segment(
    grid: &Grid,
    v: &Potential,
    duration: f64,
    slices: usize,
    direction: Direction,
) -> Result<KernelMatrix> {
    propagate_segment_with(
        default_rule().as_ref(),
        grid,
        v,
        duration,
        slices,
        direction,
    )
}

/// `slices`-fold composition of one short-time slice of length
/// `duration / slices`.
pub fn propagate_segment_with(
    rule: &dyn SliceRule,
    grid: &Grid,
    v: &Potential,
    duration: f64,
    slices: usize,
    direction: Direction,
) -> Result<KernelMatrix> {
    if slices == 0 {
        return domain("a segment needs at least one slice");
    }
    if !(duration.is_finite() && duration > 0.0) {
        return domain(format!("segment duration must be positive, got {duration}"));
    }
    let step = match direction {
        Direction::Forward => short_time_forward_with(rule, grid, v, duration / slices as f64)?,
        Direction::Backward => short_time_backward_with(rule, grid, v, duration / slices as f64)?,
        Direction::Mixed => return domain("a segment runs either forward or backward"),
    };
    if slices == 1 {
        return Ok(step);
    }
    let op = matrix_power(step.operator(), slices);
    KernelMatrix::from_operator(*grid, op, direction)
}

// Identical slices commute with each other, so the product can be formed by
// repeated squaring.
fn matrix_power(base: Array2<Complex64>, mut exp: usize) -> Array2<Complex64> {
    let mut acc: Option<Array2<Complex64>> = None;
    let mut sq = base;
    loop {
        if exp & 1 == 1 {
            acc = Some(match acc {
                None => sq.clone(),
                Some(a) => a.dot(&sq),
            });
        }
        exp >>= 1;
        if exp == 0 {
            break;
        }
        sq = sq.dot(&sq);
    }
    acc.expect("exponent is at least one")
}
