use superladder_core::diffop::GridSpec;
use superladder_core::models::{LadderTolerances, PotentialModel1D, ZeroModeKind};
use superladder_core::report::Check;

use super::{build_model, grid_for, zero_modes, Env, Task};
use crate::config::{ConfigError, RunConfig};
use crate::report::RunContext;

/// Points of the default operator-check grid.
const CHECK_POINTS: usize = 400;

pub struct Verify;

/// The model grid pulled in by 1% at each end, where probes stay clear of walls.
fn check_grid(cfg: &RunConfig, m: &PotentialModel1D) -> GridSpec {
    if let Some(g) = cfg.grid {
        return g.spec();
    }
    let pad = 0.01 * (m.grid.hi - m.grid.lo);
    GridSpec::new(m.grid.lo + pad, m.grid.hi - pad, CHECK_POINTS)
}

impl Task for Verify {
    fn name(&self) -> &'static str {
        "verify"
    }

    fn about(&self) -> &'static str {
        "certify construction, ladder identities and zero modes of a model"
    }

    fn validate(&self, cfg: &RunConfig) -> Result<(), ConfigError> {
        cfg.require_model().map(|_| ())
    }

    fn execute(&self, cfg: &RunConfig, env: &Env, ctx: &mut RunContext) {
        let Some(m) = build_model(ctx, env, cfg) else { return };
        let t = &cfg.tolerances;
        let tol = LadderTolerances {
            commutator: t.commutator,
            adjoint: t.adjoint,
            product: t.product,
        };
        let grid = check_grid(cfg, &m);
        ctx.result("check_grid", &grid);
        if let Some(checks) = ctx.stage("ladder", || Ok::<_, String>(m.ladder_checks(&grid, &tol))) {
            ctx.checks_prefixed("ladder", checks);
        }
        let modes = zero_modes(ctx, &m, &grid_for(cfg, &m));
        for z in &modes {
            let kind = match z.kind {
                ZeroModeKind::Annihilation => "annihilation",
                ZeroModeKind::Creation => "creation",
            };
            let name = format!("zero_mode.{kind}_{}", z.branch);
            ctx.check(Check::new(format!("{name}.ladder_relative"), z.ladder_relative, t.zero_mode_relative));
            ctx.check(Check::new(format!("{name}.eigen_relative"), z.eigen_residual, t.zero_mode_relative));
            if z.normalizable {
                ctx.check(Check::new(format!("{name}.ladder"), z.ladder_residual, t.zero_mode));
            }
        }
        ctx.result("zero_modes", &modes);
        ctx.result("q_roots", &m.q_roots);
    }
}
