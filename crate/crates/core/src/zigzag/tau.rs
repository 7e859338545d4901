use serde::Serialize;

use crate::error::{domain, Result};

/// Piecewise-linear map from the trajectory parameter τ to physical time.
///
/// The particle runs forward from `t_a` to the turning instant `t_c`, back
/// down to `t_d`, then forward again to `t_f`. In τ the trajectory is single
/// valued:
///
/// ```text
/// t = τ                    τ ≤ τ_c
/// t = 2τ_c − τ             τ_c ≤ τ ≤ τ_d = 2t_c − t_d
/// t = τ + 2(τ_c − τ_d)     τ ≥ τ_d
/// ```
///
/// and `τ_b = t_d` is the earlier parameter value with the same physical
/// time as `τ_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauMap {
    pub t_a: f64,
    pub t_d: f64,
    pub t_c: f64,
    pub t_f: f64,
    pub tau_a: f64,
    pub tau_b: f64,
    pub tau_c: f64,
    pub tau_d: f64,
    pub tau_f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    Forward,
    Backward,
    ForwardAgain,
}

pub fn build_tau_map(t_a: f64, t_d: f64, t_c: f64, t_f: f64) -> Result<TauMap> {
    TauMap::new(t_a, t_d, t_c, t_f)
}

impl TauMap {
    pub fn new(t_a: f64, t_d: f64, t_c: f64, t_f: f64) -> Result<Self> {
        if ![t_a, t_d, t_c, t_f].iter().all(|t| t.is_finite()) {
            return domain("turning times must be finite");
        }
        if !(t_a < t_d && t_d < t_c && t_c < t_f) {
            return domain(format!(
                "times must satisfy t_a < t_d < t_c < t_f, got ({t_a}, {t_d}, {t_c}, {t_f})"
            ));
        }
        let tau_d = 2.0 * t_c - t_d;
        Ok(Self {
            t_a,
            t_d,
            t_c,
            t_f,
            tau_a: t_a,
            tau_b: t_d,
            tau_c: t_c,
            tau_d,
            tau_f: t_f + 2.0 * (t_c - t_d),
        })
    }

    pub fn piece(&self, tau: f64) -> Piece {
        if tau <= self.tau_c {
            Piece::Forward
        } else if tau <= self.tau_d {
            Piece::Backward
        } else {
            Piece::ForwardAgain
        }
    }

    pub fn t_of_tau(&self, tau: f64) -> f64 {
        match self.piece(tau) {
            Piece::Forward => tau,
            Piece::Backward => 2.0 * self.tau_c - tau,
            Piece::ForwardAgain => tau + 2.0 * (self.tau_c - self.tau_d),
        }
    }

    /// τ-durations of segments I–IV: `(τ_a, τ_b)`, `(τ_b, τ_c)`, `(τ_c, τ_d)`,
    /// `(τ_d, τ_f)`. The middle two are equal by construction.
    pub fn segment_durations(&self) -> [f64; 4] {
        [
            self.tau_b - self.tau_a,
            self.tau_c - self.tau_b,
            self.tau_d - self.tau_c,
            self.tau_f - self.tau_d,
        ]
    }

    /// Length of each half of the zigzag, `t_c − t_d`.
    pub fn zigzag_duration(&self) -> f64 {
        self.t_c - self.t_d
    }

    /// Physical duration of the direct (time-ordered) amplitude.
    pub fn total_duration(&self) -> f64 {
        self.t_f - self.t_a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_parameters() {
        let m = build_tau_map(0.0, 1.0, 2.0, 3.0).unwrap();
        assert_eq!((m.tau_b, m.tau_c, m.tau_d, m.tau_f), (1.0, 2.0, 3.0, 5.0));
        assert_eq!(m.t_of_tau(2.5), 1.5);
        assert_eq!(m.piece(2.5), Piece::Backward);
        assert_eq!(m.t_of_tau(m.tau_b), m.t_of_tau(m.tau_d));
        assert_eq!(m.t_of_tau(m.tau_f), 3.0);
        assert_eq!(m.segment_durations(), [1.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn ordering_is_enforced() {
        assert!(build_tau_map(0.0, 2.0, 2.0, 3.0).is_err());
        assert!(build_tau_map(0.0, 2.5, 2.0, 3.0).is_err());
        assert!(build_tau_map(1.0, 1.0, 2.0, 3.0).is_err());
        assert!(build_tau_map(0.0, 1.0, 3.0, 3.0).is_err());
        assert!(build_tau_map(0.0, 1.0, f64::NAN, 3.0).is_err());
    }
}
