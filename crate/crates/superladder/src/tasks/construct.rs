use super::{build_model, grid_for, zero_modes, Env, Task};
use crate::config::{ConfigError, RunConfig};
use crate::output::{emit, potential_rows, zero_mode_table};
use crate::report::RunContext;

/// Potential samples so that the report stays small.
const RECORD_SAMPLES: usize = 200;

pub struct Construct;

impl Task for Construct {
    fn name(&self) -> &'static str {
        "construct"
    }

    fn about(&self) -> &'static str {
        "build a catalog model and write its potential and zero modes"
    }

    fn validate(&self, cfg: &RunConfig) -> Result<(), ConfigError> {
        cfg.require_model().map(|_| ())
    }

    fn execute(&self, cfg: &RunConfig, env: &Env, ctx: &mut RunContext) {
        let Some(m) = build_model(ctx, env, cfg) else { return };
        let grid = grid_for(cfg, &m);
        ctx.result("model", &m.summary(RECORD_SAMPLES));
        emit(ctx, "potential.csv", "potential samples", &["x", "V"], potential_rows(&m.v, &grid));
        let modes = zero_modes(ctx, &m, &grid);
        if !modes.is_empty() {
            ctx.result("zero_modes", &modes);
            let (header, rows) = zero_mode_table(&modes);
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            emit(ctx, "zeromodes.csv", "closed-form zero modes", &header, rows);
        }
    }
}
