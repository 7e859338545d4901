use std::fmt;
use std::sync::Arc;

use ndarray::Array1;
use serde::Serialize;

use crate::error::{domain, Result};

pub const MIN_GRID_POINTS: usize = 16;

/// Evenly spaced points `q_min, …, q_max` (both ends included).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    n: usize,
    q_min: f64,
    q_max: f64,
    spacing: f64,
}

pub fn build_grid(n: usize, q_min: f64, q_max: f64) -> Result<Grid> {
    Grid::new(n, q_min, q_max)
}

impl Grid {
    pub fn new(n: usize, q_min: f64, q_max: f64) -> Result<Self> {
        if n < MIN_GRID_POINTS {
            return domain(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {n}"
            ));
        }
        if !(q_min.is_finite() && q_max.is_finite() && q_min < q_max) {
            return domain(format!(
                "grid bounds must satisfy q_min < q_max, got [{q_min}, {q_max}]"
            ));
        }
        Ok(Self {
            n,
            q_min,
            q_max,
            spacing: (q_max - q_min) / (n - 1) as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q_max
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn point(&self, j: usize) -> f64 {
        self.q_min + self.spacing * j as f64
    }

    pub fn points(&self) -> Array1<f64> {
        Array1::from_iter((0..self.n).map(|j| self.point(j)))
    }

    /// Index range of the interior 80%: the outer tenth on each side is
    /// excluded from every deviation metric.
    pub fn interior(&self) -> std::ops::Range<usize> {
        let skip = self.n / 10;
        skip..self.n - skip
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.q_min == other.q_min && self.q_max == other.q_max
    }
}

type PotentialFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A real potential evaluated pointwise.
#[derive(Clone)]
pub struct CustomPotential {
    label: String,
    f: Arc<PotentialFn>,
}

impl CustomPotential {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    /// `Σ c_k q^k`.
    pub fn polynomial(coefficients: Vec<f64>) -> Self {
        let label = format!("polynomial{coefficients:?}");
        Self::new(label, move |q| {
            coefficients.iter().rev().fold(0.0, |acc, c| acc * q + c)
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for CustomPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomPotential")
            .field("label", &self.label)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum Potential {
    Free,
    /// `V = ω²q²/2`.
    Harmonic {
        omega: f64,
    },
    Custom(CustomPotential),
}

impl Potential {
    pub fn harmonic(omega: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return domain(format!("harmonic frequency must be positive, got {omega}"));
        }
        Ok(Potential::Harmonic { omega })
    }

    pub fn evaluate(&self, q: f64) -> f64 {
        match self {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => 0.5 * omega * omega * q * q,
            Potential::Custom(c) => (c.f)(q),
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<Array1<f64>> {
        let v = grid.points().mapv(|q| self.evaluate(q));
        if v.iter().any(|x| !x.is_finite()) {
            return domain(format!(
                "potential {} is not finite on the grid",
                self.label()
            ));
        }
        Ok(v)
    }

    pub fn label(&self) -> String {
        match self {
            Potential::Free => "free".into(),
            Potential::Harmonic { omega } => format!("harmonic(omega={omega})"),
            Potential::Custom(c) => c.label().to_string(),
        }
    }
}
