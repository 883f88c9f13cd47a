use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use super::registry::{grid_size, positive, ModelBuilder, Param};
use super::{ladder_pair, PotentialModel1D, ZeroModeBranch, ZeroModeKind};
use crate::diffop::{GridSpec, LinearDiffOp};
use crate::error::Result;
use crate::interval::Interval;
use crate::smooth::SmoothFn;

/// `V = ω²x²/2` with `A† = (−ħD + ωx)/√2`.
pub struct Harmonic;

const PARAMS: &[Param] = &[
    Param::required("hbar", "reduced Planck constant"),
    Param::required("omega", "angular frequency"),
    Param::optional("half_width", 12.0, "grid half-width in oscillator lengths √(ħ/ω)"),
    Param::optional("n", 2000.0, "interior grid points"),
];

impl ModelBuilder for Harmonic {
    fn name(&self) -> &'static str {
        "harmonic"
    }

    fn parameters(&self) -> &'static [Param] {
        PARAMS
    }

    fn build(&self, params: &BTreeMap<String, f64>) -> Result<PotentialModel1D> {
        let hbar = positive(params, "hbar")?;
        let omega = positive(params, "omega")?;
        let half = positive(params, "half_width")? * (hbar / omega).sqrt();
        let n = grid_size(params)?;
        let domain = Interval::real_line();
        let v = SmoothFn::analytic(move |x| x * x * (0.5 * omega * omega));
        let a_dag = LinearDiffOp::new(
            vec![SmoothFn::identity().scale(omega * FRAC_1_SQRT_2), SmoothFn::constant(-hbar * FRAC_1_SQRT_2)],
            domain,
        );
        let (a, a_dag) = ladder_pair(a_dag)?;
        let model = PotentialModel1D {
            tag: self.name().into(),
            params: params.clone(),
            v,
            domain,
            hbar,
            omega,
            spacing: hbar * omega,
            ladder_order: 1,
            a,
            a_dag,
            q_roots: vec![0.5 * hbar * omega],
            q_norm: 1.0,
            energy_shift: 0.0,
            inverse_square: None,
            grid: GridSpec::new(-half, half, n),
            checks: Vec::new(),
            branches: None,
        };
        let k = omega / hbar;
        Ok(model.with_branches(move |kind| {
            let (sign, energy) = match kind {
                ZeroModeKind::Annihilation => (-1.0, 0.5 * hbar * omega),
                ZeroModeKind::Creation => (1.0, -0.5 * hbar * omega),
            };
            vec![ZeroModeBranch {
                branch: 1,
                energy,
                prefactor: SmoothFn::constant(1.0),
                log_derivative: SmoothFn::identity().scale(sign * k),
            }]
        }))
    }
}
