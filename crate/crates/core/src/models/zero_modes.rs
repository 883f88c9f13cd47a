use serde::{Deserialize, Serialize};

use super::PotentialModel1D;
use crate::diffop::GridSpec;
use crate::error::{Error, Result};
use crate::smooth::SmoothFn;

/// Ratio `|ψ(end)| / max|ψ|` below which an end counts as decayed.
pub const DECAY_RATIO: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroModeKind {
    Annihilation,
    Creation,
}

/// `ψ = F · exp ∫ u dx`, known in closed form up to the integration constant.
#[derive(Clone, Debug)]
pub struct ZeroModeBranch {
    pub branch: u8,
    pub energy: f64,
    pub prefactor: SmoothFn,
    pub log_derivative: SmoothFn,
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroMode {
    pub kind: ZeroModeKind,
    pub branch: u8,
    pub energy: f64,
    pub normalizable: bool,
    /// `‖Aψ‖/‖ψ‖` (annihilation) or `‖A†ψ‖/‖ψ‖` (creation).
    pub ladder_residual: f64,
    /// The same residual divided by the summed magnitudes of its terms.
    pub ladder_relative: f64,
    /// `‖Hψ − Eψ‖` relative to its term magnitudes.
    pub eigen_residual: f64,
    #[serde(skip)]
    pub x: Vec<f64>,
    #[serde(skip)]
    pub psi: Vec<f64>,
}

/// Evaluates every closed-form zero mode of `model` on `grid`.
///
/// The exponent is a cumulative Simpson quadrature anchored at the grid
/// midpoint, then shifted so the largest sample is of order one.
pub fn build_zero_modes(model: &PotentialModel1D, grid: &GridSpec, kind: ZeroModeKind) -> Result<Vec<ZeroMode>> {
    let xs = grid.points();
    let h = grid.h();
    let op = match kind {
        ZeroModeKind::Annihilation => &model.a,
        ZeroModeKind::Creation => &model.a_dag,
    };
    let ham = model.hamiltonian();
    let mut out = Vec::new();
    for br in model.zero_mode_branches(kind) {
        let u = |x: f64| -> Result<f64> {
            let v = br.log_derivative.eval(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::SingularPoint { x })
            }
        };
        let n = xs.len();
        let anchor = n / 2;
        let mut phi = vec![0.0; n];
        for i in anchor..n - 1 {
            let s = h / 6.0 * (u(xs[i])? + 4.0 * u(xs[i] + 0.5 * h)? + u(xs[i + 1])?);
            phi[i + 1] = phi[i] + s;
        }
        for i in (1..=anchor).rev() {
            let s = h / 6.0 * (u(xs[i - 1])? + 4.0 * u(xs[i - 1] + 0.5 * h)? + u(xs[i])?);
            phi[i - 1] = phi[i] - s;
        }
        let prefactor: Vec<f64> = xs.iter().map(|&x| br.prefactor.eval(x)).collect();
        let log_abs: Vec<f64> = phi
            .iter()
            .zip(&prefactor)
            .map(|(p, f)| p + f.abs().ln())
            .filter(|v| v.is_finite())
            .collect();
        let top = log_abs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let top = if top.is_finite() { top } else { 0.0 };
        let psi: Vec<f64> = prefactor.iter().zip(&phi).map(|(f, p)| f * (p - top).exp()).collect();

        // residuals relative to the summed term magnitudes Σ|c_k ψ^(k)|
        let k = op.order().max(2);
        let (mut num, mut num_h, mut den, mut den_h, mut norm) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, &x) in xs.iter().enumerate() {
            let f = br.prefactor.jet(x, k)?;
            let e = br.log_derivative.jet(x, k - 1)?.integral(phi[i] - top).exp();
            let jet = &f * &e;
            let size = |c: Vec<f64>| c.iter().enumerate().map(|(j, c)| (c * jet.derivative(j)).abs()).sum::<f64>();
            let a = op.apply_jet(x, &jet);
            let r = ham.apply_jet(x, &jet) - br.energy * jet.value();
            num += a * a;
            num_h += r * r;
            den += size(op.coeffs_at(x)).powi(2);
            norm += jet.value() * jet.value();
            den_h += (size(ham.coeffs_at(x)) + (br.energy * jet.value()).abs()).powi(2);
        }
        let ratio = |n: f64, d: f64| if d > 0.0 { (n / d).sqrt() } else { 0.0 };
        let peak = psi.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let decayed = |v: f64| peak > 0.0 && v.abs() / peak < DECAY_RATIO;
        out.push(ZeroMode {
            kind,
            branch: br.branch,
            energy: br.energy,
            normalizable: decayed(psi[0]) && decayed(psi[n - 1]),
            ladder_residual: ratio(num, norm),
            ladder_relative: ratio(num, den),
            eigen_residual: ratio(num_h, den_h),
            x: xs.clone(),
            psi,
        });
    }
    Ok(out)
}
