//! First- and second-order supersymmetric factorizations.
//!
//! Conventions: `H = −ħ²/2 D² + V`. A first-order supercharge is
//! `L† = (−ħD + α)/√2`, a second-order one `L† = (ħ²D² − ħgD + h)/2`.
//! In both cases the intertwining that holds is `H_b L† = L† H_a`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use serde::Serialize;

use crate::diffop::{residual_norm, GridSpec, LinearDiffOp};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::jet::Jet;
use crate::ode::{integrate_first_order, taylor_jet_first_order, FirstOrderOde, IntegrationOptions, Stop, Trajectory};
use crate::report::{random_points, require, scaled_residual, Check};
use crate::smooth::SmoothFn;

pub const RICCATI_CAP: f64 = 1e6;
pub const OPERATOR_TOL_FIRST: f64 = 1e-6;
pub const OPERATOR_TOL_SECOND: f64 = 1e-5;
pub const POINTWISE_TOL: f64 = 1e-8;
const PROBES: usize = 12;
const POINT_SAMPLES: usize = 1000;

struct Riccati {
    v: SmoothFn,
    eps: f64,
    hbar: f64,
}

impl FirstOrderOde for Riccati {
    fn rhs(&self, t: f64, u: f64) -> f64 {
        (2.0 * (self.v.eval(t) - self.eps) - u * u) / self.hbar
    }

    fn rhs_jet(&self, t0: f64, u: &Jet) -> Jet {
        let v = self.v.jet_unchecked(t0, u.order());
        ((v - self.eps) * 2.0 - u * u) / self.hbar
    }

    fn singular_distance(&self, _t: f64, u: f64) -> f64 {
        if u.abs() > RICCATI_CAP {
            0.0
        } else {
            1.0
        }
    }
}

/// Superpotential obtained by integrating `ħα′ + α² = 2(V − ε)`.
#[derive(Clone, Debug)]
pub struct RiccatiSolution {
    pub alpha: SmoothFn,
    pub domain: Interval,
    pub blow_up_left: bool,
    pub blow_up_right: bool,
    pub residual_bound: f64,
}

impl RiccatiSolution {
    pub fn blew_up(&self) -> bool {
        self.blow_up_left || self.blow_up_right
    }
}

/// Integrates the Riccati flow left and right of `(x0, α0)` across `span`.
///
/// Reaching `|α| > RICCATI_CAP` truncates that side and raises its flag.
/// Fails with `BlowUp` only when nothing survives around `x0`.
pub fn solve_riccati(v: &SmoothFn, eps: f64, hbar: f64, x0: f64, alpha0: f64, span: Interval) -> Result<RiccatiSolution> {
    if !span.contains(x0) || !span.is_finite() {
        return Err(Error::InvalidParameter(format!("x0 = {x0} must lie in the finite span {span:?}")));
    }
    if hbar <= 0.0 {
        return Err(Error::InvalidParameter("ħ must be positive".into()));
    }
    let eq = Riccati {
        v: v.clone(),
        eps,
        hbar,
    };
    let mut opts = IntegrationOptions::default();
    if let Some(m) = v.max_order() {
        opts.taylor_order = opts.taylor_order.min(m + 1);
    }
    let traj = integrate_first_order(&eq, x0, alpha0, span, &opts);
    let flagged = |s: &Stop| !matches!(s, Stop::Reached);
    let tr = traj.truncation();
    if traj.domain().length() <= 0.0 {
        return Err(Error::BlowUp { x: x0 });
    }
    let domain = traj.domain();
    let residual_bound = traj.residual_bound();
    let max_order = v.max_order().map(|m| m + 1);
    let traj: Arc<Trajectory> = Arc::new(traj);
    let eq = Arc::new(eq);
    let alpha = SmoothFn::from_jets(
        move |x, r| {
            let a = traj.jet(x, 0).value();
            taylor_jet_first_order(eq.as_ref(), x, a, r)
        },
        max_order,
    );
    Ok(RiccatiSolution {
        alpha,
        domain,
        blow_up_left: flagged(&tr.left),
        blow_up_right: flagged(&tr.right),
        residual_bound,
    })
}

/// Residual of `H_a L† − L†(H_b + shift)` on the grid, compared with `tol`.
pub fn verify_intertwining(
    h_a: &LinearDiffOp,
    h_b: &LinearDiffOp,
    l_dag: &LinearDiffOp,
    shift: f64,
    grid: &GridSpec,
    tol: f64,
) -> Check {
    let name = "intertwining";
    let x = h_a
        .compose(l_dag)
        .and_then(|left| left.sub(&l_dag.compose(&h_b.shift(shift))?));
    match x {
        Ok(x) => Check::new(name, residual_norm(&x, grid, PROBES), tol),
        Err(_) => Check::failed(name, tol),
    }
}

fn operator_check(name: &str, lhs: Result<LinearDiffOp>, rhs: Result<LinearDiffOp>, grid: &GridSpec, tol: f64) -> Check {
    match (lhs, rhs) {
        (Ok(l), Ok(r)) => match l.sub(&r) {
            Ok(x) => Check::new(name, residual_norm(&x, grid, PROBES), tol),
            Err(_) => Check::failed(name, tol),
        },
        _ => Check::failed(name, tol),
    }
}

fn grid_domain(grid: &GridSpec) -> Interval {
    Interval::new(grid.lo, grid.hi)
}

#[derive(Clone, Debug)]
pub struct FirstOrderSusyPair {
    pub alpha: SmoothFn,
    pub eps: f64,
    pub hbar: f64,
    pub v_a: SmoothFn,
    pub v_b: SmoothFn,
    pub l_dag: LinearDiffOp,
    pub l: LinearDiffOp,
    pub checks: Vec<Check>,
}

impl FirstOrderSusyPair {
    pub fn h_a(&self) -> LinearDiffOp {
        LinearDiffOp::schrodinger(self.v_a.clone(), self.hbar, self.l_dag.domain())
    }

    pub fn h_b(&self) -> LinearDiffOp {
        LinearDiffOp::schrodinger(self.v_b.clone(), self.hbar, self.l_dag.domain())
    }

    pub fn record(&self, xs: &[f64]) -> PairRecord {
        PairRecord {
            kind: "first_order",
            parameters: vec![("epsilon", self.eps), ("hbar", self.hbar)],
            x: xs.to_vec(),
            v_a: xs.iter().map(|&x| self.v_a.eval(x)).collect(),
            v_b: xs.iter().map(|&x| self.v_b.eval(x)).collect(),
            functions: vec![("alpha", xs.iter().map(|&x| self.alpha.eval(x)).collect())],
            checks: self.checks.clone(),
        }
    }
}

/// `V_a = (ħα′ + α²)/2 + ε`, `V_b = V_a − ħα′`, certified on `grid`.
pub fn first_order_pair(alpha: &SmoothFn, eps: f64, hbar: f64, grid: &GridSpec) -> Result<FirstOrderSusyPair> {
    let domain = grid_domain(grid);
    let da = alpha.derivative_fn();
    let v_a = alpha.zip(&da, move |a, d| (d * hbar + a * a) * 0.5 + eps);
    let v_b = v_a.zip(&da, move |v, d| v - &(d * hbar));
    let l_dag = LinearDiffOp::new(
        vec![alpha.scale(FRAC_1_SQRT_2), SmoothFn::constant(-hbar * FRAC_1_SQRT_2)],
        domain,
    );
    let l = l_dag.formal_adjoint()?;
    let mut pair = FirstOrderSusyPair {
        alpha: alpha.clone(),
        eps,
        hbar,
        v_a,
        v_b,
        l_dag,
        l,
        checks: Vec::new(),
    };

    let pts = random_points(domain, POINT_SAMPLES, 0x5a5a);
    let mut riccati: f64 = 0.0;
    let mut partner: f64 = 0.0;
    for &x in &pts {
        let a = pair.alpha.jet(x, 1)?;
        let (va, vb) = (pair.v_a.eval(x), pair.v_b.eval(x));
        let (a0, a1) = (a.value(), a.derivative(1));
        riccati = riccati.max(scaled_residual(hbar * a1 + a0 * a0, 2.0 * (va - eps), &[a0 * a0, hbar * a1]));
        partner = partner.max(scaled_residual(vb, va - hbar * a1, &[hbar * a1]));
    }
    let (h_a, h_b) = (pair.h_a(), pair.h_b());
    let (l, ld) = (&pair.l, &pair.l_dag);
    pair.checks = vec![
        Check::new("riccati", riccati, POINTWISE_TOL),
        Check::new("partner_potential", partner, POINTWISE_TOL),
        operator_check("factorization_a", Ok(h_a.clone()), l.compose(ld).map(|x| x.shift(eps)), grid, OPERATOR_TOL_FIRST),
        operator_check("factorization_b", Ok(h_b.clone()), ld.compose(l).map(|x| x.shift(eps)), grid, OPERATOR_TOL_FIRST),
        verify_intertwining(&h_b, &h_a, ld, 0.0, grid, OPERATOR_TOL_FIRST),
    ];
    require(&pair.checks)?;
    Ok(pair)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// The upper sign of the partner-potential formula.
    A,
    /// The lower sign.
    B,
}

#[derive(Clone, Debug)]
pub struct SecondOrderSusyPair {
    pub g: SmoothFn,
    pub h: SmoothFn,
    pub c: f64,
    pub d: f64,
    pub hbar: f64,
    pub branch: Branch,
    /// Upper-sign potential.
    pub v_a: SmoothFn,
    /// Lower-sign potential, `V_a − ħg′`.
    pub v_b: SmoothFn,
    pub l_dag: LinearDiffOp,
    pub l: LinearDiffOp,
    pub checks: Vec<Check>,
}

impl SecondOrderSusyPair {
    pub fn h_a(&self) -> LinearDiffOp {
        LinearDiffOp::schrodinger(self.v_a.clone(), self.hbar, self.l_dag.domain())
    }

    pub fn h_b(&self) -> LinearDiffOp {
        LinearDiffOp::schrodinger(self.v_b.clone(), self.hbar, self.l_dag.domain())
    }

    /// The potential selected by `branch`.
    pub fn selected(&self) -> &SmoothFn {
        match self.branch {
            Branch::A => &self.v_a,
            Branch::B => &self.v_b,
        }
    }

    pub fn record(&self, xs: &[f64]) -> PairRecord {
        PairRecord {
            kind: "second_order",
            parameters: vec![("c", self.c), ("d", self.d), ("hbar", self.hbar)],
            x: xs.to_vec(),
            v_a: xs.iter().map(|&x| self.v_a.eval(x)).collect(),
            v_b: xs.iter().map(|&x| self.v_b.eval(x)).collect(),
            functions: vec![
                ("g", xs.iter().map(|&x| self.g.eval(x)).collect()),
                ("h", xs.iter().map(|&x| self.h.eval(x)).collect()),
            ],
            checks: self.checks.clone(),
        }
    }
}

/// `(V_upper, V_lower, h)` as jets, given the jet of `g`.
pub fn second_order_functions(g: &Jet, c: f64, d: f64, hbar: f64) -> (Jet, Jet, Jet) {
    let g1 = g.diff();
    let g2 = g1.diff();
    let n = g.order().saturating_sub(2);
    let (g0, g1, g2) = (g.resize(n), g1.resize(n), g2.resize(n));
    let ginv = g0.recip();
    let ginv2 = &ginv * &ginv;
    let h2 = hbar * hbar;
    let common = &g2 * &ginv * (h2 / 4.0) - &(&g1 * &g1) * &ginv2 * (h2 / 8.0) + &g0 * &g0 / 8.0
        + d / (2.0 * hbar)
        + ginv2.clone() * (c / (2.0 * hbar));
    let upper = common.clone() + g1.clone() * (hbar / 2.0);
    let lower = common - g1.clone() * (hbar / 2.0);
    let h = -(&g2 * &ginv) * (h2 / 2.0) + &(&g1 * &g1) * &ginv2 * (h2 / 4.0) - g1 * (hbar / 2.0) + &g0 * &g0 / 4.0
        - ginv2 * (c / hbar);
    (upper, lower, h)
}

/// Second-order pair from `(g, c, d)`, certified on `grid`.
pub fn second_order_pair(g: &SmoothFn, c: f64, d: f64, hbar: f64, branch: Branch, grid: &GridSpec) -> Result<SecondOrderSusyPair> {
    let domain = grid_domain(grid);
    let scan = GridSpec::new(grid.lo, grid.hi, 4 * grid.n + 1);
    let mut prev = g.eval(grid.lo);
    for x in std::iter::once(grid.lo).chain(scan.points()).chain(std::iter::once(grid.hi)) {
        let v = g.eval(x);
        if !v.is_finite() || v.abs() < 1e-12 || v.signum() != prev.signum() {
            return Err(Error::SingularPoint { x });
        }
        prev = v;
    }
    let max_order = g.max_order().map(|m| m.saturating_sub(2));
    let part = move |which: usize| {
        let g = g.clone();
        SmoothFn::from_jets(
            move |x, r| {
                let (u, l, h) = second_order_functions(&g.jet_unchecked(x, r + 2), c, d, hbar);
                [u, l, h][which].clone()
            },
            max_order,
        )
    };
    let (v_a, v_b, h) = (part(0), part(1), part(2));
    let l_dag = LinearDiffOp::new(
        vec![h.scale(0.5), g.scale(-0.5 * hbar), SmoothFn::constant(0.5 * hbar * hbar)],
        domain,
    );
    let l = l_dag.formal_adjoint()?;
    let mut pair = SecondOrderSusyPair {
        g: g.clone(),
        h,
        c,
        d,
        hbar,
        branch,
        v_a,
        v_b,
        l_dag,
        l,
        checks: Vec::new(),
    };

    let pts = random_points(domain, POINT_SAMPLES, 0xa5a5);
    let (mut r21, mut r22, mut r23): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for &x in &pts {
        let gj = pair.g.jet(x, 2)?;
        let va = pair.v_a.jet(x, 2)?;
        let vb = pair.v_b.jet(x, 0)?.value();
        let hj = pair.h.jet(x, 2)?;
        let (g0, g1, g2) = (gj.value(), gj.derivative(1), gj.derivative(2));
        let (va0, va1, va2) = (va.value(), va.derivative(1), va.derivative(2));
        let (h0, h1, h2) = (hj.value(), hj.derivative(1), hj.derivative(2));
        let hb2 = hbar * hbar;
        r21 = r21.max(scaled_residual(vb, va0 - hbar * g1, &[hbar * g1]));
        r22 = r22.max(scaled_residual(
            hb2 * g2 / 2.0 - hbar * h1 - g0 * vb,
            2.0 * hbar * va1 - g0 * va0,
            &[hb2 * g2, hbar * h1, g0 * vb, g0 * va0],
        ));
        r23 = r23.max(scaled_residual(
            2.0 * h0 * vb - hb2 * h2,
            2.0 * hb2 * va2 - 2.0 * hbar * g0 * va1 + 2.0 * h0 * va0,
            &[h0 * vb, hb2 * h2, hb2 * va2, hbar * g0 * va1, h0 * va0],
        ));
    }
    let (h_a, h_b) = (pair.h_a(), pair.h_b());
    let shift = d / (2.0 * hbar);
    let gap = c / (4.0 * hbar);
    let (l, ld) = (&pair.l, &pair.l_dag);
    pair.checks = vec![
        Check::new("partner_potential", r21, POINTWISE_TOL),
        Check::new("first_order_condition", r22, POINTWISE_TOL),
        Check::new("second_order_condition", r23, POINTWISE_TOL),
        operator_check(
            "product_a",
            l.compose(ld),
            h_a.polynomial(&[shift, shift], 1.0).map(|x| x.shift(-gap)),
            grid,
            OPERATOR_TOL_SECOND,
        ),
        operator_check(
            "product_b",
            ld.compose(l),
            h_b.polynomial(&[shift, shift], 1.0).map(|x| x.shift(-gap)),
            grid,
            OPERATOR_TOL_SECOND,
        ),
        verify_intertwining(&h_b, &h_a, ld, 0.0, grid, OPERATOR_TOL_SECOND),
    ];
    require(&pair.checks)?;
    Ok(pair)
}

/// Serializable snapshot of a pair on sample points.
#[derive(Clone, Debug, Serialize)]
pub struct PairRecord {
    pub kind: &'static str,
    pub parameters: Vec<(&'static str, f64)>,
    pub x: Vec<f64>,
    pub v_a: Vec<f64>,
    pub v_b: Vec<f64>,
    pub functions: Vec<(&'static str, Vec<f64>)>,
    pub checks: Vec<Check>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn osc() -> SmoothFn {
        SmoothFn::analytic(|x| x * x * 0.5)
    }

    #[test]
    fn riccati_ground_state_superpotential() {
        let s = solve_riccati(&osc(), -0.5, 1.0, 0.0, 0.0, Interval::new(-5.0, 5.0)).unwrap();
        assert!(!s.blew_up());
        for x in [-4.0, -1.0, 0.3, 2.5, 5.0] {
            assert!((s.alpha.eval(x) - x).abs() < 1e-8, "{x}");
            assert!((s.alpha.derivative(x, 1).unwrap() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn riccati_excited_energy_blows_up() {
        let s = solve_riccati(&osc(), 5.0, 1.0, 0.0, 0.0, Interval::new(-5.0, 5.0)).unwrap();
        assert!(s.blew_up());
        assert!(s.domain.length() < 10.0);
    }

    #[test]
    fn constant_superpotential_gives_flat_pair() {
        let grid = GridSpec::new(-3.0, 3.0, 400);
        let p = first_order_pair(&SmoothFn::constant(1.5), 0.0, 1.0, &grid).unwrap();
        assert!((p.v_a.eval(0.7) - 1.125).abs() < 1e-15);
        assert!((p.v_b.eval(-2.0) - 1.125).abs() < 1e-15);
    }

    #[test]
    fn constant_g_second_order_pair() {
        let grid = GridSpec::new(-3.0, 3.0, 400);
        let p = second_order_pair(&SmoothFn::constant(2.0), 0.0, 0.6, 1.0, Branch::A, &grid).unwrap();
        assert!((p.v_a.eval(0.1) - (0.5 + 0.3)).abs() < 1e-14);
        assert!((p.v_b.eval(1.1) - (0.5 + 0.3)).abs() < 1e-14);
        assert!((p.h.eval(0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vanishing_g_is_rejected() {
        let grid = GridSpec::new(-1.0, 1.0, 400);
        let e = second_order_pair(&SmoothFn::identity(), 0.0, 0.0, 1.0, Branch::A, &grid);
        assert!(matches!(e, Err(Error::SingularPoint { .. })));
    }
}
