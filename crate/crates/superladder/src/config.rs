//! Run configuration: parsing and field-level validation.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use superladder_core::algebra::MAX_AXIS_POINTS;
use superladder_core::diffop::GridSpec;
use superladder_core::models::{ModelRegistry, ModelSpec};

pub const SCHEMA_VERSION: u32 = 1;

/// Smallest 1D grid accepted from configuration.
pub const MIN_GRID_POINTS: usize = 200;

/// Largest parameter sweep.
pub const MAX_SWEEP_POINTS: usize = 10_000;

#[derive(Debug, thiserror::Error)]
#[error("config error at `{field}`: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridConfig {
    pub fn spec(&self) -> GridSpec {
        GridSpec::new(self.lo, self.hi, self.n)
    }
}

/// Numerical thresholds. Unlike physical parameters these may default.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Eigenvalue two-grid tolerance.
    pub eigen: f64,
    pub orthonormality: f64,
    /// `[H, A†] − ħωA†` residual.
    pub commutator: f64,
    pub adjoint: f64,
    /// Operator product identity and per-level `A†Aψ = Q(E)ψ` residuals.
    pub product: f64,
    /// Relative departure of the fitted `Q` normalization from the model's.
    pub calibration: f64,
    /// `‖Aψ‖/‖ψ‖` for normalizable zero modes.
    pub zero_mode: f64,
    /// Ladder and eigen-equation residuals of every zero mode, relative to term sizes.
    pub zero_mode_relative: f64,
    /// Distance between a normalizable zero-mode energy and its nearest level.
    pub level_match: f64,
    /// Minimal overlap of `A†ψ_E` with the level at `E + ħω`.
    pub overlap: f64,
    pub algebra_commutator: f64,
    pub algebra_product: f64,
    /// Zero-crossing residual of accepted representations.
    pub representation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eigen: 1e-4,
            orthonormality: 1e-6,
            commutator: 1e-5,
            adjoint: 1e-10,
            product: 1e-4,
            calibration: 1e-3,
            zero_mode: 1e-4,
            zero_mode_relative: 1e-6,
            level_match: 1e-3,
            overlap: 0.99,
            algebra_commutator: 1e-4,
            algebra_product: 1e-3,
            representation: 1e-8,
        }
    }
}

impl Tolerances {
    fn values(&self) -> [(&'static str, f64); 13] {
        [
            ("eigen", self.eigen),
            ("orthonormality", self.orthonormality),
            ("commutator", self.commutator),
            ("adjoint", self.adjoint),
            ("product", self.product),
            ("calibration", self.calibration),
            ("zero_mode", self.zero_mode),
            ("zero_mode_relative", self.zero_mode_relative),
            ("level_match", self.level_match),
            ("overlap", self.overlap),
            ("algebra_commutator", self.algebra_commutator),
            ("algebra_product", self.algebra_product),
            ("representation", self.representation),
        ]
    }
}

/// Parameter axes of a sweep; an absent axis keeps the base model's value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
}

impl SweepAxes {
    pub fn axes(&self) -> [(&'static str, Option<&Vec<f64>>); 4] {
        [
            ("a", self.a.as_ref()),
            ("b", self.b.as_ref()),
            ("c", self.c.as_ref()),
            ("omega", self.omega.as_ref()),
        ]
    }

    pub fn len(&self) -> usize {
        self.axes().iter().map(|(_, v)| v.map_or(1, |v| v.len())).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cartesian product in `a, b, c, omega` order, last axis fastest.
    pub fn points(&self) -> Vec<Vec<(&'static str, f64)>> {
        let mut out: Vec<Vec<(&'static str, f64)>> = vec![Vec::new()];
        for (name, vals) in self.axes() {
            let Some(vals) = vals else { continue };
            out = out
                .into_iter()
                .flat_map(|p| {
                    vals.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push((name, *v));
                        q
                    })
                })
                .collect();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub task: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    /// The two factors of a 2D system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub models: Option<[ModelSpec; 2]>,
    /// Ladder powers `(n₁, n₂)` of a 2D system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub powers: Option<[u32; 2]>,
    /// 1D grid; defaults to the model's own grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    /// Per-axis collocation grids of the 2D algebra check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor_grid: Option<[GridConfig; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_range: Option<[f64; 2]>,
    /// Largest module dimension searched is `max_p + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepAxes>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Not echoed into reports.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { "<root>".to_string() } else { path };
            ConfigError::new(field, e.into_inner().to_string())
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn require_model(&self) -> Result<&ModelSpec, ConfigError> {
        self.model.as_ref().ok_or_else(|| ConfigError::new("model", "required by this task"))
    }

    pub fn require_models(&self) -> Result<(&[ModelSpec; 2], [u32; 2]), ConfigError> {
        let m = self.models.as_ref().ok_or_else(|| ConfigError::new("models", "required by this task"))?;
        let p = self.powers.ok_or_else(|| ConfigError::new("powers", "required by this task"))?;
        Ok((m, p))
    }

    /// Checks shared by every task; task-specific requirements are checked by the task.
    pub fn validate(&self, models: &ModelRegistry) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::new(
                "schema_version",
                format!("unsupported version {}, this binary reads {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if let Some(m) = &self.model {
            check_model("model", m, models)?;
        }
        if let Some(ms) = &self.models {
            for (i, m) in ms.iter().enumerate() {
                check_model(&format!("models[{i}]"), m, models)?;
            }
        }
        if let Some([n1, n2]) = self.powers {
            if n1 == 0 || n2 == 0 {
                return Err(ConfigError::new("powers", "ladder powers must be positive"));
            }
        }
        if let Some(g) = &self.grid {
            check_grid("grid", g, MIN_GRID_POINTS, usize::MAX)?;
        }
        if let Some(gs) = &self.tensor_grid {
            for (i, g) in gs.iter().enumerate() {
                check_grid(&format!("tensor_grid[{i}]"), g, 8, MAX_AXIS_POINTS)?;
            }
        }
        if self.levels == Some(0) {
            return Err(ConfigError::new("levels", "must be at least 1"));
        }
        for (name, r) in [("energy_range", self.energy_range), ("u_range", self.u_range)] {
            if let Some([lo, hi]) = r {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(ConfigError::new(name, format!("need finite lo < hi, got [{lo}, {hi}]")));
                }
            }
        }
        for (name, v) in self.tolerances.values() {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError::new(format!("tolerances.{name}"), format!("must be finite and positive, got {v}")));
            }
        }
        if self.tolerances.overlap > 1.0 {
            return Err(ConfigError::new("tolerances.overlap", "an overlap bound cannot exceed 1"));
        }
        if let Some(s) = &self.sweep {
            for (name, vals) in s.axes() {
                if let Some(v) = vals.and_then(|v| v.iter().find(|x| !x.is_finite())) {
                    return Err(ConfigError::new(format!("sweep.{name}"), format!("non-finite value {v}")));
                }
            }
            if s.len() > MAX_SWEEP_POINTS {
                return Err(ConfigError::new(
                    "sweep",
                    format!("{} points exceed the limit of {MAX_SWEEP_POINTS}", s.len()),
                ));
            }
        }
        Ok(())
    }
}

fn check_model(field: &str, spec: &ModelSpec, models: &ModelRegistry) -> Result<(), ConfigError> {
    let params = models.resolve(spec).map_err(|e| ConfigError::new(field, e.to_string()))?;
    match params.get("n") {
        Some(&n) if n.fract() != 0.0 || n < MIN_GRID_POINTS as f64 => Err(ConfigError::new(
            format!("{field}.params.n"),
            format!("{n} grid points, need an integer ≥ {MIN_GRID_POINTS}"),
        )),
        _ => Ok(()),
    }
}

fn check_grid(field: &str, g: &GridConfig, min: usize, max: usize) -> Result<(), ConfigError> {
    if !(g.lo.is_finite() && g.hi.is_finite() && g.lo < g.hi) {
        return Err(ConfigError::new(field, format!("need finite lo < hi, got [{}, {}]", g.lo, g.hi)));
    }
    if g.n < min || g.n > max {
        let bound = if max == usize::MAX { format!("≥ {min}") } else { format!("in {min}..={max}") };
        return Err(ConfigError::new(format!("{field}.n"), format!("{} points, need {bound}", g.n)));
    }
    Ok(())
}
