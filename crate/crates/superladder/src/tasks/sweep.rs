use rayon::prelude::*;
use serde::Serialize;
use superladder_core::models::{build_zero_modes, ModelSpec, ZeroModeKind};
use superladder_core::report::Check;
use superladder_core::spectral::{classify_chains, eigensolve, ChainKind, EigenOptions};

use super::spectrum::DEFAULT_LEVELS;
use super::{Env, Task};
use crate::config::{ConfigError, RunConfig};
use crate::output::{emit, num, Row};
use crate::report::RunContext;

pub struct Sweep;

const AXES: [&str; 4] = ["a", "b", "c", "omega"];

#[derive(Clone, Debug, Default, Serialize)]
pub struct PointResult {
    pub params: Vec<(String, f64)>,
    pub infinite_chains: usize,
    pub finite_chains: usize,
    pub interrupted_chains: usize,
    pub finite_lengths: Vec<usize>,
    pub bottoms: Vec<f64>,
    /// Largest `residual / threshold` among construction checks.
    pub worst_check_ratio: f64,
    pub max_eigen_error: f64,
    pub error: Option<String>,
}

fn evaluate(env: &Env, base: &ModelSpec, point: &[(&str, f64)], cfg: &RunConfig) -> PointResult {
    let mut spec = base.clone();
    for (k, v) in point {
        spec.params.insert(k.to_string(), *v);
    }
    let mut out = PointResult {
        params: AXES.iter().map(|a| (a.to_string(), spec.params.get(*a).copied().unwrap_or(f64::NAN))).collect(),
        ..Default::default()
    };
    let mut run = || -> superladder_core::Result<()> {
        let m = env.models.build(&spec)?;
        out.worst_check_ratio = m
            .checks
            .iter()
            .map(|c| if c.threshold > 0.0 { c.residual / c.threshold } else { c.residual })
            .fold(0.0, f64::max);
        let grid = cfg.grid.map(|g| g.spec()).unwrap_or(m.grid);
        let levels = cfg.levels.unwrap_or(DEFAULT_LEVELS);
        let s = eigensolve(&m, &grid, levels, &EigenOptions { tol: cfg.tolerances.eigen })?;
        out.max_eigen_error = s.errors.iter().copied().fold(0.0, f64::max);
        let mut modes = Vec::new();
        if m.has_zero_modes() {
            modes.extend(build_zero_modes(&m, &grid, ZeroModeKind::Annihilation)?);
            modes.extend(build_zero_modes(&m, &grid, ZeroModeKind::Creation)?);
        }
        let chains = classify_chains(&s, &modes);
        for c in &chains.chains {
            match c.kind {
                ChainKind::Infinite => {
                    out.infinite_chains += 1;
                    out.bottoms.push(c.bottom);
                }
                ChainKind::Capped => {
                    out.finite_chains += 1;
                    out.finite_lengths.push(c.len());
                }
                ChainKind::Interrupted => out.interrupted_chains += 1,
            }
        }
        Ok(())
    };
    if let Err(e) = run() {
        out.error = Some(e.to_string());
    }
    out
}

fn row(p: &PointResult) -> Row {
    let join = |v: Vec<String>| v.join(";");
    let mut r: Vec<String> = p.params.iter().map(|(_, v)| num(*v)).collect();
    r.extend([
        p.infinite_chains.to_string(),
        p.finite_chains.to_string(),
        p.interrupted_chains.to_string(),
        join(p.finite_lengths.iter().map(|l| l.to_string()).collect()),
        join(p.bottoms.iter().map(|b| num(*b)).collect()),
        num(p.worst_check_ratio),
        num(p.max_eigen_error),
        p.error.clone().unwrap_or_default(),
    ]);
    r
}

impl Task for Sweep {
    fn name(&self) -> &'static str {
        "sweep"
    }

    fn about(&self) -> &'static str {
        "classify ladder chains across a grid of (a, b, c, omega)"
    }

    fn validate(&self, cfg: &RunConfig) -> Result<(), ConfigError> {
        cfg.require_model()?;
        cfg.sweep
            .as_ref()
            .ok_or_else(|| ConfigError::new("sweep", "required by this task"))?;
        Ok(())
    }

    fn execute(&self, cfg: &RunConfig, env: &Env, ctx: &mut RunContext) {
        let base = cfg.model.as_ref().expect("validated");
        let points = cfg.sweep.as_ref().expect("validated").points();
        // indexed collection keeps rows in grid order whatever the scheduling
        let results: Vec<PointResult> = ctx
            .stage("sweep", || {
                Ok::<_, String>(points.par_iter().map(|p| evaluate(env, base, p, cfg)).collect())
            })
            .unwrap_or_default();
        let failed = results.iter().filter(|r| r.error.is_some()).count();
        ctx.check(Check::new("sweep.failed_points", failed as f64, 0.0));
        ctx.result("points", &results.len());
        ctx.result("failed_points", &failed);
        let header = [
            "a",
            "b",
            "c",
            "omega",
            "infinite_chains",
            "finite_chains",
            "interrupted_chains",
            "finite_lengths",
            "infinite_bottoms",
            "worst_check_ratio",
            "max_eigen_error",
            "error",
        ];
        emit(ctx, "sweep.csv", "chain classification per parameter point", &header, results.iter().map(row).collect());
    }
}
