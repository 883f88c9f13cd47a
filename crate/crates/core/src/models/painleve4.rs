use std::collections::BTreeMap;
use std::sync::Arc;

use super::registry::{grid_size, p, positive, ModelBuilder, Param};
use super::PotentialModel1D;
use crate::diffop::GridSpec;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::jet::Jet;
use crate::ode::Stop;
use crate::painleve::{integrate_p4, P4Solution};
use crate::report::{random_points, require, scaled_residual, Check};
use crate::smooth::SmoothFn;
use crate::susy::{first_order_pair, second_order_pair, Branch, POINTWISE_TOL};

/// Third-order ladder family built from a fourth-Painlevé transcendent by
/// chaining a first- and a second-order supercharge.
///
/// `V = ħω[½(z+P)² + (ε/2)P′ + (ε−α)/3]`, `z = √(ω/ħ)x`, `ε = ±1`.
pub struct Painleve4;

const PARAMS: &[Param] = &[
    Param::required("hbar", "reduced Planck constant"),
    Param::required("omega", "angular frequency"),
    Param::required("alpha", "P4 parameter α"),
    Param::required("beta", "P4 parameter β (≤ 0 for real ladder roots)"),
    Param::required("epsilon", "branch sign ±1"),
    Param::required("z0", "initial point"),
    Param::required("p0", "P(z0)"),
    Param::required("p0p", "P′(z0)"),
    Param::required("z_lo", "left end of the integration window"),
    Param::required("z_hi", "right end of the integration window"),
    Param::optional("n", 2000.0, "interior grid points"),
];

impl ModelBuilder for Painleve4 {
    fn name(&self) -> &'static str {
        "painleve4"
    }

    fn parameters(&self) -> &'static [Param] {
        PARAMS
    }

    fn build(&self, params: &BTreeMap<String, f64>) -> Result<PotentialModel1D> {
        let hbar = positive(params, "hbar")?;
        let omega = positive(params, "omega")?;
        let alpha = p(params, "alpha");
        let beta = p(params, "beta");
        let eps = p(params, "epsilon");
        if eps != 1.0 && eps != -1.0 {
            return Err(Error::InvalidParameter(format!("epsilon must be ±1, got {eps}")));
        }
        if beta > 0.0 {
            return Err(Error::InvalidParameter(format!("beta = {beta} > 0 gives complex ladder roots")));
        }
        let span = Interval::new(p(params, "z_lo"), p(params, "z_hi"));
        let sol = integrate_p4(alpha, beta, p(params, "z0"), p(params, "p0"), p(params, "p0p"), span)?;
        for s in [sol.truncation().left, sol.truncation().right] {
            if let Stop::Guard { at } = s {
                return Err(Error::SingularPoint { x: at });
            }
        }
        build_p4(hbar, omega, alpha, beta, eps, sol, grid_size(params)?, params.clone())
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn build_p4(
    hbar: f64,
    omega: f64,
    alpha: f64,
    beta: f64,
    eps: f64,
    sol: P4Solution,
    n: usize,
    params: BTreeMap<String, f64>,
) -> Result<PotentialModel1D> {
    let s = (omega / hbar).sqrt();
    let e = hbar * omega;
    let re = e.sqrt();
    let d = sol.domain();
    let grid = GridSpec::new(d.lo / s, d.hi / s, n);
    let domain = Interval::new(grid.lo, grid.hi);
    let sol = Arc::new(sol);

    // jets in x of z and P(z)
    let zp = {
        let sol = sol.clone();
        move |x: f64, r: usize| -> (Jet, Jet) {
            let z = Jet::variable(x, r) * s;
            (z, sol.jet(s * x, r).stretch(s))
        }
    };
    let v_closed = {
        let zp = zp.clone();
        SmoothFn::from_jets(
            move |x, r| {
                let (z, _) = zp(x, r);
                let pz = sol.jet(s * x, r + 1);
                let dp = pz.diff().stretch(s);
                let p = pz.truncate(r).stretch(s);
                let w = &z + &p;
                ((&w * &w) * 0.5 + dp * (0.5 * eps) + (eps - alpha) / 3.0) * e
            },
            None,
        )
    };
    let (eps_f, d_tilde) = if eps > 0.0 {
        let ef = 0.5 + (1.0 - alpha) / 3.0;
        (ef, alpha + 2.0 * ef - 1.0)
    } else {
        let ef = -0.5 - (1.0 + alpha) / 3.0;
        (ef, alpha + 2.0 * ef + 1.0)
    };
    let c_tilde = -beta / 2.0;
    let superpot = {
        let zp = zp.clone();
        SmoothFn::from_jets(
            move |x, r| {
                let (z, p) = zp(x, r);
                (z + p) * (eps * re)
            },
            None,
        )
    };
    let g = {
        let zp = zp.clone();
        SmoothFn::from_jets(move |x, r| zp(x, r).1 * (eps * re), None)
    };
    let first = first_order_pair(&superpot, eps_f * e, hbar, &grid)?;
    let second = second_order_pair(&g, c_tilde * hbar.powi(3) * omega * omega, d_tilde * hbar * hbar * omega, hbar, Branch::A, &grid)?;

    let pts = random_points(domain, 1000, 0x44);
    let (mut rv, mut rl): (f64, f64) = (0.0, 0.0);
    for &x in &pts {
        let v = v_closed.eval(x);
        rv = rv.max(scaled_residual(v, second.v_a.eval(x), &[]));
        rv = rv.max(scaled_residual(v + eps * e, first.v_a.eval(x), &[]));
        rl = rl.max(scaled_residual(first.v_b.eval(x), second.v_b.eval(x), &[]));
    }
    let mut checks = vec![
        Check::new("potential", rv, POINTWISE_TOL),
        Check::new("partner_chain", rl, POINTWISE_TOL),
    ];
    checks.extend(first.checks.iter().map(|c| Check { name: format!("first_order.{}", c.name), ..c.clone() }));
    checks.extend(second.checks.iter().map(|c| Check { name: format!("second_order.{}", c.name), ..c.clone() }));
    require(&checks)?;

    let root = (c_tilde / 4.0).sqrt();
    let (a, a_dag, q_roots) = if eps > 0.0 {
        let a_dag = second.l.compose(&first.l_dag)?;
        let roots = vec![eps_f, d_tilde / 2.0 + root, d_tilde / 2.0 - root];
        (a_dag.formal_adjoint()?, a_dag, roots)
    } else {
        let a = second.l.compose(&first.l_dag)?;
        let roots = vec![1.0 + eps_f, 1.0 + d_tilde / 2.0 + root, 1.0 + d_tilde / 2.0 - root];
        (a.clone(), a.formal_adjoint()?, roots)
    };
    Ok(PotentialModel1D {
        tag: "painleve4".into(),
        params,
        v: v_closed,
        domain,
        hbar,
        omega,
        spacing: e,
        ladder_order: 3,
        a,
        a_dag,
        q_roots: q_roots.into_iter().map(|r| r * e).collect(),
        q_norm: 1.0,
        energy_shift: 0.0,
        inverse_square: None,
        grid,
        checks,
        branches: None,
    })
}
