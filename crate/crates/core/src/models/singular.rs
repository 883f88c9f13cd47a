use std::collections::BTreeMap;

use super::registry::{grid_size, p, positive, ModelBuilder, Param};
use super::{ladder_pair, PotentialModel1D, ZeroModeBranch, ZeroModeKind};
use crate::diffop::{GridSpec, LinearDiffOp};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::smooth::SmoothFn;

/// `V = ω²x²/2 + l/x²` on `x > 0` with a second-order ladder of step `2ħω`.
pub struct SingularOscillator;

/// Smallest `γ = l/ħ²` for which the half-line Hamiltonian is bounded below.
pub const CRITICAL_GAMMA: f64 = -0.125;

const PARAMS: &[Param] = &[
    Param::required("hbar", "reduced Planck constant"),
    Param::required("omega", "angular frequency"),
    Param::required("l", "inverse-square coupling"),
    Param::optional("width", 12.0, "grid length in oscillator lengths √(ħ/ω)"),
    Param::optional("n", 2000.0, "interior grid points"),
];

impl ModelBuilder for SingularOscillator {
    fn name(&self) -> &'static str {
        "singular_oscillator"
    }

    fn parameters(&self) -> &'static [Param] {
        PARAMS
    }

    fn build(&self, params: &BTreeMap<String, f64>) -> Result<PotentialModel1D> {
        let hbar = positive(params, "hbar")?;
        let omega = positive(params, "omega")?;
        let l = p(params, "l");
        let gamma = l / (hbar * hbar);
        if gamma < CRITICAL_GAMMA {
            return Err(Error::Subcritical {
                gamma,
                critical: CRITICAL_GAMMA,
            });
        }
        let len = positive(params, "width")? * (hbar / omega).sqrt();
        let n = grid_size(params)?;
        let domain = Interval::positive();
        let v = SmoothFn::analytic(move |x| x * x * (0.5 * omega * omega) + (x * x).recip() * l);
        // A† = ½(ħ²D² − 2ħωxD + ω²x² − ħω − 2l/x²)
        let a_dag = LinearDiffOp::new(
            vec![
                SmoothFn::analytic(move |x| (x * x * (omega * omega) - hbar * omega - (x * x).recip() * (2.0 * l)) * 0.5),
                SmoothFn::identity().scale(-hbar * omega),
                SmoothFn::constant(0.5 * hbar * hbar),
            ],
            domain,
        );
        let (a, a_dag) = ladder_pair(a_dag)?;
        let nu = (0.25 + 2.0 * gamma).sqrt();
        let model = PotentialModel1D {
            tag: self.name().into(),
            params: params.clone(),
            v,
            domain,
            hbar,
            omega,
            spacing: 2.0 * hbar * omega,
            ladder_order: 2,
            a,
            a_dag,
            q_roots: vec![hbar * omega * (1.0 + nu), hbar * omega * (1.0 - nu)],
            q_norm: 1.0,
            energy_shift: 0.0,
            inverse_square: Some(gamma),
            grid: GridSpec::new(0.0, len, n),
            checks: Vec::new(),
            branches: None,
        };
        let k = omega / hbar;
        Ok(model.with_branches(move |kind| {
            [1.0, -1.0]
                .iter()
                .enumerate()
                .map(|(i, &s)| {
                    // ψ = x^m e^{∓ωx²/2ħ}, m = ½ ± ν
                    let m = 0.5 + s * nu;
                    let (sign, energy) = match kind {
                        ZeroModeKind::Annihilation => (-1.0, hbar * omega * (m + 0.5)),
                        ZeroModeKind::Creation => (1.0, -hbar * omega * (1.5 - m)),
                    };
                    let m = match kind {
                        ZeroModeKind::Annihilation => m,
                        ZeroModeKind::Creation => 1.0 - m,
                    };
                    ZeroModeBranch {
                        branch: i as u8 + 1,
                        energy,
                        prefactor: SmoothFn::constant(1.0),
                        log_derivative: SmoothFn::analytic(move |x| x.recip() * m + x * (sign * k)),
                    }
                })
                .collect()
        }))
    }
}
