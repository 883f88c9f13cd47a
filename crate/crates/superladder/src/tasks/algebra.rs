use superladder_core::algebra::{algebra_residuals, AlgebraTolerances, StructureFunction};

use super::represent::assemble;
use super::{Env, Task};
use crate::config::{ConfigError, RunConfig};
use crate::output::{emit, num, Row};
use crate::report::RunContext;

pub struct Algebra;

impl Task for Algebra {
    fn name(&self) -> &'static str {
        "algebra"
    }

    fn about(&self) -> &'static str {
        "check the 2D integrals' commutation and product relations on a tensor grid"
    }

    fn validate(&self, cfg: &RunConfig) -> Result<(), ConfigError> {
        cfg.require_models()?;
        cfg.tensor_grid
            .ok_or_else(|| ConfigError::new("tensor_grid", "required by this task"))?;
        Ok(())
    }

    fn execute(&self, cfg: &RunConfig, env: &Env, ctx: &mut RunContext) {
        let Some(sys) = assemble(ctx, env, cfg) else { return };
        let [gx, gy] = cfg.tensor_grid.expect("validated");
        let t = cfg.tolerances;
        let tol = AlgebraTolerances {
            commutator: t.algebra_commutator,
            product: t.algebra_product,
            overlap: t.overlap,
        };
        let phi = StructureFunction::new(&sys);
        let Some(r) = ctx.stage("algebra_residuals", || algebra_residuals(&sys, &phi, [gx.spec(), gy.spec()], &tol, cfg.seed()))
        else {
            return;
        };
        ctx.checks_prefixed("algebra", r.checks.clone());
        let rows: Vec<Row> = r
            .probes
            .iter()
            .map(|p| {
                vec![
                    p.m.to_string(),
                    p.n.to_string(),
                    num(p.energy),
                    num(p.k),
                    num(p.plus_minus[0]),
                    num(p.plus_minus[1]),
                    num(p.minus_plus[0]),
                    num(p.minus_plus[1]),
                ]
            })
            .collect();
        ctx.result("algebra", &r);
        emit(
            ctx,
            "algebra_probes.csv",
            "product relations on product eigenstates",
            &["m", "n", "E", "K", "plus_minus", "plus_minus_predicted", "minus_plus", "minus_plus_predicted"],
            rows,
        );
    }
}
