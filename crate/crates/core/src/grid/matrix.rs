use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use serde::Serialize;

use super::space::Grid;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
    /// Composition of forward and backward factors.
    Mixed,
}

impl Direction {
    fn join(self, other: Direction) -> Direction {
        if self == other {
            self
        } else {
            Direction::Mixed
        }
    }

    pub fn conj(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
            Direction::Mixed => Direction::Mixed,
        }
    }
}

/// A kernel sampled on a grid. Integration over a shared endpoint is the
/// rectangle rule, so the operator acting on grid vectors is
/// `measure_weight · entries`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    grid: Grid,
    entries: Array2<Complex64>,
    measure_weight: f64,
    direction: Direction,
}

impl KernelMatrix {
    pub fn new(grid: Grid, entries: Array2<Complex64>, direction: Direction) -> Result<Self> {
        let n = grid.len();
        if entries.dim() != (n, n) {
            return Err(CoreError::GridMismatch(format!(
                "entries are {:?}, grid has {n} points",
                entries.dim()
            )));
        }
        if entries
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(CoreError::Degenerate(
                "kernel matrix has non-finite entries".into(),
            ));
        }
        Ok(Self {
            grid,
            entries,
            measure_weight: grid.spacing(),
            direction,
        })
    }

    /// Builds from the operator `measure_weight · entries`.
    pub(crate) fn from_operator(
        grid: Grid,
        op: Array2<Complex64>,
        direction: Direction,
    ) -> Result<Self> {
        let inv = grid.spacing().recip();
        Self::new(grid, op * inv, direction)
    }

    /// `δ(q_out − q_in)` on the grid: identity divided by the spacing.
    pub fn identity(grid: Grid) -> Self {
        let entries = Array2::from_diag_elem(grid.len(), Complex64::from(grid.spacing().recip()));
        Self {
            grid,
            entries,
            measure_weight: grid.spacing(),
            direction: Direction::Forward,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn measure_weight(&self) -> f64 {
        self.measure_weight
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn operator(&self) -> Array2<Complex64> {
        &self.entries * self.measure_weight
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            grid: self.grid,
            entries: self.entries.mapv(|z| z.conj()),
            measure_weight: self.measure_weight,
            direction: self.direction.conj(),
        }
    }

    /// `∫ dq_in K(q_out, q_in) ψ(q_in)` on the grid.
    pub fn apply(&self, psi: &Array1<Complex64>) -> Array1<Complex64> {
        self.entries.dot(psi) * self.measure_weight
    }
}

/// `spacing · (later × earlier)`.
pub fn compose_matrices(later: &KernelMatrix, earlier: &KernelMatrix) -> Result<KernelMatrix> {
    if !later.grid.same_as(&earlier.grid) {
        return Err(CoreError::GridMismatch(format!(
            "cannot compose kernels on {:?} and {:?}",
            later.grid, earlier.grid
        )));
    }
    let entries = later.entries.dot(&earlier.entries) * later.measure_weight;
    KernelMatrix::new(later.grid, entries, later.direction.join(earlier.direction))
}

fn interior_identity_distance(op: &Array2<Complex64>, grid: &Grid) -> f64 {
    let r = grid.interior();
    let block = op.slice(s![r.clone(), r.clone()]);
    let m = r.len();
    let sum: f64 = block
        .indexed_iter()
        .map(|((i, j), z)| {
            let d = if i == j { z - 1.0 } else { *z };
            d.norm_sqr()
        })
        .sum();
    (sum / m as f64).sqrt()
}

/// `‖spacing·K − I‖_F / ‖I‖_F` on the interior block.
pub fn identity_deviation(k: &KernelMatrix) -> f64 {
    interior_identity_distance(&k.operator(), &k.grid)
}

/// `‖spacing²·K†K − I‖_F / ‖I‖_F` on the interior block.
pub fn unitarity_deviation(k: &KernelMatrix) -> f64 {
    let op = k.operator();
    let adjoint = op.t().mapv(|z| z.conj());
    interior_identity_distance(&adjoint.dot(&op), &k.grid)
}

/// Interior-restricted `‖a − b‖_F / ‖b‖_F`.
pub fn relative_difference(a: &KernelMatrix, b: &KernelMatrix) -> Result<f64> {
    if !a.grid.same_as(&b.grid) {
        return Err(CoreError::GridMismatch(
            "comparing kernels on different grids".into(),
        ));
    }
    let r = a.grid.interior();
    let ea = a.entries.slice(s![r.clone(), r.clone()]);
    let eb = b.entries.slice(s![r.clone(), r.clone()]);
    let diff: f64 = ea
        .iter()
        .zip(eb.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let base: f64 = eb.iter().map(|y| y.norm_sqr()).sum();
    Ok((diff / base).sqrt())
}

/// Interior-restricted relative L2 distance between grid vectors,
/// `‖a − b‖ / ‖b‖`.
pub fn relative_l2_on_grid(a: &Array1<Complex64>, b: &Array1<Complex64>, grid: &Grid) -> f64 {
    let r = grid.interior();
    let diff: f64 = r.clone().map(|j| (a[j] - b[j]).norm_sqr()).sum();
    let base: f64 = r.map(|j| b[j].norm_sqr()).sum();
    (diff / base).sqrt()
}
