use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::grid::{build_grid, CustomPotential, Grid, Potential};
use crate::zigzag::{build_tau_map, TauMap};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Free,
    Harmonic {
        omega: f64,
    },
    /// `Σ c_k q^k`, grid mode only.
    Polynomial {
        coefficients: Vec<f64>,
    },
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Harmonic { omega: 1.0 }
    }
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        match self {
            PotentialSpec::Free => Ok(Potential::Free),
            PotentialSpec::Harmonic { omega } => Potential::harmonic(*omega),
            PotentialSpec::Polynomial { coefficients } => {
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return domain("polynomial coefficients must be finite");
                }
                Ok(Potential::Custom(CustomPotential::polynomial(
                    coefficients.clone(),
                )))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Times {
    pub t_a: f64,
    pub t_d: f64,
    pub t_c: f64,
    pub t_f: f64,
}

impl Default for Times {
    fn default() -> Self {
        Self {
            t_a: 0.0,
            t_d: 1.0,
            t_c: 2.0,
            t_f: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub extent: [f64; 2],
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n: 256,
            extent: [-10.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub mass: f64,
    pub p_max: f64,
    pub n_modes: usize,
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self {
            mass: 1.0,
            p_max: 3.0,
            n_modes: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Zigzag vs direct, closed-form path.
    pub analytic: f64,
    /// Zigzag vs direct, grid path.
    pub grid: f64,
    /// Identity deviation of the II–III block on the grid.
    pub annihilation: f64,
    /// `||c| − 1|` and displacement error of the delta fit.
    pub delta: f64,
    /// Per-mode and product errors in field mode.
    pub field: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            analytic: 1e-10,
            grid: 2e-2,
            annihilation: 1e-2,
            delta: 1e-8,
            field: 1e-9,
        }
    }
}

fn default_mode() -> String {
    "analytic".into()
}

fn default_slices() -> usize {
    1000
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_probes() -> usize {
    5
}

/// Everything a scenario run needs. Serialized as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub times: Times,
    /// Required in grid mode; in analytic mode it only sets where kernels
    /// are sampled.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_slices")]
    pub slices_per_unit_time: usize,
    #[serde(default)]
    pub slice_rule: Option<String>,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_probes")]
    pub probes: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            mode: default_mode(),
            potential: PotentialSpec::default(),
            times: Times::default(),
            grid: None,
            slices_per_unit_time: default_slices(),
            slice_rule: None,
            field: None,
            tolerances: Tolerances::default(),
            output_dir: default_output(),
            seed: 0,
            probes: default_probes(),
        }
    }
}

/// Kernels in analytic mode are sampled here unless a grid is configured.
pub const ANALYTIC_SAMPLE_GRID: GridSpec = GridSpec {
    n: 64,
    extent: [-4.0, 4.0],
};

impl ScenarioConfig {
    pub fn tau_map(&self) -> Result<TauMap> {
        let t = self.times;
        build_tau_map(t.t_a, t.t_d, t.t_c, t.t_f)
    }

    pub fn build_grid(&self, fallback: Option<GridSpec>) -> Result<Grid> {
        let spec = match (self.grid, fallback) {
            (Some(g), _) | (None, Some(g)) => g,
            (None, None) => return domain(format!("mode '{}' needs a grid spec", self.mode)),
        };
        build_grid(spec.n, spec.extent[0], spec.extent[1])
    }

    pub fn field_spec(&self) -> FieldSpec {
        self.field.unwrap_or_default()
    }

    /// Checks the parts every mode uses; mode-specific checks happen in the
    /// backend.
    pub fn validate(&self) -> Result<()> {
        self.tau_map()?;
        self.potential.build()?;
        if self.slices_per_unit_time == 0 {
            return domain("slices_per_unit_time must be at least 1");
        }
        if self.probes == 0 {
            return domain("probes must be at least 1");
        }
        let t = self.tolerances;
        for (name, v) in [
            ("analytic", t.analytic),
            ("grid", t.grid),
            ("annihilation", t.annihilation),
            ("delta", t.delta),
            ("field", t.field),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("tolerance '{name}' must be positive, got {v}"));
            }
        }
        if let Some(g) = self.grid {
            build_grid(g.n, g.extent[0], g.extent[1])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn bad_ordering_is_a_domain_error() {
        let cfg = ScenarioConfig {
            times: Times {
                t_a: 0.0,
                t_d: 2.0,
                t_c: 2.0,
                t_f: 3.0,
            },
            ..Default::default()
        };
        assert!(!cfg.validate().unwrap_err().is_numerical());
    }

    #[test]
    fn grid_is_required_without_fallback() {
        let cfg = ScenarioConfig::default();
        assert!(cfg.build_grid(None).is_err());
        assert_eq!(
            cfg.build_grid(Some(ANALYTIC_SAMPLE_GRID)).unwrap().len(),
            64
        );
    }
}
