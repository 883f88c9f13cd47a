use superladder_core::models::ZeroModeKind;
use superladder_core::report::Check;
use superladder_core::spectral::{classify_chains, eigensolve, match_zero_modes, verify_ladder_action, EigenOptions};

use super::{build_model, grid_for, zero_modes, Env, Task};
use crate::config::{ConfigError, RunConfig};
use crate::output::{eigenfunction_table, emit, potential_rows, spectrum_rows, zero_mode_table};
use crate::report::RunContext;

pub const DEFAULT_LEVELS: usize = 8;

/// Levels whose `A†Aψ = Q(E)ψ` residual is checked; higher ones feel the walls.
const PRODUCT_LEVELS: usize = 4;

pub struct Spectrum;

impl Task for Spectrum {
    fn name(&self) -> &'static str {
        "spectrum"
    }

    fn about(&self) -> &'static str {
        "eigensolve a model, check the ladder on its eigenstates and classify chains"
    }

    fn validate(&self, cfg: &RunConfig) -> Result<(), ConfigError> {
        cfg.require_model().map(|_| ())
    }

    fn execute(&self, cfg: &RunConfig, env: &Env, ctx: &mut RunContext) {
        let Some(m) = build_model(ctx, env, cfg) else { return };
        let t = cfg.tolerances;
        let grid = grid_for(cfg, &m);
        let levels = cfg.levels.unwrap_or(DEFAULT_LEVELS);
        emit(ctx, "potential.csv", "potential samples", &["x", "V"], potential_rows(&m.v, &grid));
        let Some(report) = ctx.stage("eigensolve", || eigensolve(&m, &grid, levels, &EigenOptions { tol: t.eigen })) else {
            return;
        };
        let max_err = report.errors.iter().copied().fold(0.0, f64::max);
        ctx.check(Check::new("spectrum.convergence", max_err, t.eigen));
        ctx.check(Check::new("spectrum.orthonormality", report.orthonormality_defect, t.orthonormality));
        ctx.result("spectrum", &report);

        if let Some(d) = ctx.stage("ladder_action", || verify_ladder_action(&m, &report)) {
            let n = PRODUCT_LEVELS.min(d.levels.len());
            let product = d.levels[..n].iter().map(|l| l.product_residual).fold(0.0, f64::max);
            ctx.check(Check::new("ladder.product_on_eigenstates", product, t.product));
            let calib = (d.calibrated_norm / d.model_norm - 1.0).abs();
            ctx.check(Check::new("ladder.q_calibration", calib, t.calibration));
            let overlap = d.levels.iter().filter_map(|l| l.raised.map(|r| r.1)).fold(1.0, f64::min);
            ctx.check(Check::new("ladder.raising_overlap", 1.0 - overlap, 1.0 - t.overlap));
            ctx.result("ladder", &d);

            let modes = zero_modes(ctx, &m, &grid);
            let matches = match_zero_modes(&report, &modes);
            for z in matches
                .iter()
                .filter(|z| z.kind == ZeroModeKind::Annihilation && z.normalizable)
            {
                let Some((i, dist)) = z.nearest else { continue };
                ctx.check(Check::new(format!("zero_mode.annihilation_{}.level_match", z.branch), dist, t.level_match));
                ctx.check(Check::new(
                    format!("zero_mode.annihilation_{}.lowering_norm", z.branch),
                    d.levels[i].lowering_norm,
                    t.level_match,
                ));
            }
            let chains = classify_chains(&report, &modes);
            ctx.check(Check::new("chains.ambiguous_levels", chains.ambiguous.len() as f64, 0.0));
            ctx.result("zero_mode_matches", &matches);
            ctx.result("chains", &chains);
            emit(
                ctx,
                "spectrum.csv",
                "energies with multiplicity and chain",
                &["E", "degeneracy", "chain_id"],
                spectrum_rows(&report, Some(&chains)),
            );
            if !modes.is_empty() {
                let (header, rows) = zero_mode_table(&modes);
                let header: Vec<&str> = header.iter().map(String::as_str).collect();
                emit(ctx, "zeromodes.csv", "closed-form zero modes", &header, rows);
            }
        } else {
            emit(ctx, "spectrum.csv", "energies with multiplicity", &["E", "degeneracy", "chain_id"], spectrum_rows(&report, None));
        }
        let (header, rows) = eigenfunction_table(&report, &m.v);
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        emit(ctx, "eigenfunctions.csv", "potential and orthonormal eigenfunctions", &header, rows);
    }
}
