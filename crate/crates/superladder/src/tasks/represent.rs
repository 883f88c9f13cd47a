use superladder_core::algebra::{assemble_2d, find_representations, verify_degeneracies, StructureFunction, Superintegrable2D};
use superladder_core::models::PotentialModel1D;
use superladder_core::report::Check;
use superladder_core::spectral::{eigensolve, EigenOptions};
use superladder_core::Error;

use super::{Env, Task};
use crate::config::{ConfigError, RunConfig};
use crate::output::{emit, num, Row};
use crate::report::RunContext;

/// Depth schedule when `levels` is not configured.
const LEVEL_STEP: usize = 8;
const MAX_AUTO_LEVELS: usize = 64;
pub const DEFAULT_MAX_P: usize = 20;
pub const DEFAULT_U_RANGE: [f64; 2] = [-20.0, 20.0];

pub struct Represent;

/// Builds both factors and assembles the 2D system.
pub(crate) fn assemble(ctx: &mut RunContext, env: &Env, cfg: &RunConfig) -> Option<Superintegrable2D> {
    let (specs, [n1, n2]) = cfg.require_models().ok()?;
    let mut factors: Vec<PotentialModel1D> = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        let m = ctx.stage(&format!("build_model_{i}"), || env.models.build(s))?;
        ctx.checks_prefixed(&format!("construction_{i}"), m.checks.clone());
        factors.push(m);
    }
    let sys = ctx.stage("assemble_2d", || assemble_2d(&factors[0], &factors[1], n1, n2))?;
    let orders = ctx.stage("integrals", || sys.integrals());
    ctx.result("integrals", &orders);
    ctx.result("expected_integral_order", &sys.expected_integral_order());
    ctx.result("lambda", &sys.lambda);
    Some(sys)
}

fn join<T>(v: &[T], f: impl Fn(&T) -> String) -> String {
    v.iter().map(f).collect::<Vec<_>>().join(";")
}

impl Task for Represent {
    fn name(&self) -> &'static str {
        "represent"
    }

    fn about(&self) -> &'static str {
        "find unitary modules of a 2D system and compare with tensor-sum degeneracies"
    }

    fn validate(&self, cfg: &RunConfig) -> Result<(), ConfigError> {
        cfg.require_models()?;
        cfg.energy_range
            .ok_or_else(|| ConfigError::new("energy_range", "required by this task"))?;
        Ok(())
    }

    fn execute(&self, cfg: &RunConfig, env: &Env, ctx: &mut RunContext) {
        let Some(sys) = assemble(ctx, env, cfg) else { return };
        let t = cfg.tolerances;
        let [e_lo, e_hi] = cfg.energy_range.expect("validated");
        let [u_lo, u_hi] = cfg.u_range.unwrap_or(DEFAULT_U_RANGE);
        let phi = StructureFunction::new(&sys);
        let reps = ctx
            .stage("find_representations", || {
                Ok::<_, String>(find_representations(&phi, (e_lo, e_hi), (u_lo, u_hi), cfg.max_p.unwrap_or(DEFAULT_MAX_P)))
            })
            .unwrap_or_default();
        let worst = reps.iter().map(|r| r.residual).fold(0.0, f64::max);
        ctx.check(Check::new("representations.boundary_zeros", worst, t.representation));
        let nonpositive = reps.iter().filter(|r| r.min_positive <= 0.0).count();
        ctx.check(Check::new("representations.positivity", nonpositive as f64, 0.0));
        ctx.result("representations", &reps);
        let rows: Vec<Row> = reps
            .iter()
            .map(|r| {
                vec![
                    num(r.energy),
                    r.p.to_string(),
                    r.dimension.to_string(),
                    num(r.u),
                    r.branch.clone(),
                    num(r.residual),
                ]
            })
            .collect();
        emit(
            ctx,
            "representations.csv",
            "finite-dimensional unitary modules",
            &["E", "p", "degeneracy", "u", "branch", "residual"],
            rows,
        );

        let eig = EigenOptions { tol: t.eigen };
        // without an explicit depth, deepen until every level below the cut is resolved
        let depths: Vec<usize> = match cfg.levels {
            Some(l) => vec![l],
            None => (1..=MAX_AUTO_LEVELS / LEVEL_STEP).map(|k| k * LEVEL_STEP).collect(),
        };
        let mut found = None;
        for (attempt, &levels) in depths.iter().enumerate() {
            let mut spectra = Vec::new();
            for (i, m) in sys.factors.iter().enumerate() {
                let grid = cfg.grid.map(|g| g.spec()).unwrap_or(m.grid);
                let Some(s) = ctx.stage(&format!("eigensolve_{i}"), || eigensolve(m, &grid, levels, &eig)) else {
                    return;
                };
                spectra.push(s);
            }
            match verify_degeneracies(&sys, &reps, [&spectra[0], &spectra[1]], e_hi) {
                Err(Error::DepthInsufficient { .. }) if attempt + 1 < depths.len() => continue,
                r => {
                    found = Some((spectra, r));
                    break;
                }
            }
        }
        let (spectra, d) = found.expect("at least one depth is tried");
        for (i, s) in spectra.iter().enumerate() {
            // only levels that can contribute below the cut
            let err = s
                .eigenvalues
                .iter()
                .zip(&s.errors)
                .filter(|(e, _)| **e < e_hi)
                .map(|(_, r)| *r)
                .fold(0.0, f64::max);
            ctx.check(Check::new(format!("spectrum_{i}.convergence"), err, t.eigen));
            ctx.result(&format!("levels_{i}"), &s.eigenvalues);
        }
        let Some(d) = ctx.stage("verify_degeneracies", || d) else {
            return;
        };
        ctx.check(Check::new("degeneracy.mismatches", d.mismatches as f64, 0.0));
        let rows: Vec<Row> = d
            .rows
            .iter()
            .map(|r| {
                vec![
                    num(r.energy),
                    r.observed.to_string(),
                    r.predicted.to_string(),
                    join(&r.p, |p| p.to_string()),
                    join(&r.u, |u| num(*u)),
                    join(&r.residuals, |x| num(*x)),
                ]
            })
            .collect();
        ctx.result("degeneracies", &d);
        emit(
            ctx,
            "degeneracy.csv",
            "observed against predicted multiplicities",
            &["E", "multiplicity_observed", "multiplicity_predicted", "p", "u", "residuals"],
            rows,
        );
    }
}
