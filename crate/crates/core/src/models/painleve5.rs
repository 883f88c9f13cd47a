//! Fourth-order ladder family built from a fifth-Painlevé transcendent.
//!
//! Dimensionless variables: `z = √(ω/ħ)x`, `y = z²`, `P = W(y)`, `Q = dW/dy`.
//! Physical quantities: `V = ħω·Ṽ`, `g = √(ħω)·g̃`, `h = ħω·h̃`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::registry::{grid_size, opt, p, positive, ModelBuilder, Param};
use super::{PotentialModel1D, ZeroModeBranch, ZeroModeKind};
use crate::diffop::{GridSpec, LinearDiffOp};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::jet::Jet;
use crate::ode::Stop;
use crate::painleve::{constant_p5_solutions, integrate_p5, P5Params, PainleveVSolution, SolutionKind};
use crate::report::{random_points, require, scaled_residual, Check};
use crate::smooth::SmoothFn;
use crate::susy::{verify_intertwining, OPERATOR_TOL_SECOND, POINTWISE_TOL};

/// Smallest grid that a truncated window may leave.
pub const MIN_GRID_POINTS: usize = 200;

#[derive(Clone, Debug)]
pub struct P5ModelParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub hbar: f64,
    pub omega: f64,
    pub p5: PainleveVSolution,
    /// Requested window in `x`; `x_lo = 0` puts a wall at the singular point.
    pub x_lo: f64,
    pub x_hi: f64,
    pub n: usize,
}

/// How the transcendent is obtained from configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum P5Solution {
    Constant(f64),
    Numeric { y0: f64, w0: f64, w0p: f64 },
}

impl P5ModelParams {
    /// Resolves the transcendent on the `y`-image of `[x_lo, x_hi]`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(a: f64, b: f64, c: f64, hbar: f64, omega: f64, solution: P5Solution, x_lo: f64, x_hi: f64, n: usize) -> Result<Self> {
        if !(hbar > 0.0 && omega > 0.0) {
            return Err(Error::InvalidParameter("ħ and ω must be positive".into()));
        }
        if !(0.0..x_hi).contains(&x_lo) {
            return Err(Error::InvalidParameter(format!("window [{x_lo}, {x_hi}] must satisfy 0 ≤ x_lo < x_hi")));
        }
        real_energies(a, b)?;
        let params = P5Params::new(a, b, c, P5Params::MODEL_D);
        let s2 = omega / hbar;
        let y_hi = s2 * x_hi * x_hi;
        let p5 = match solution {
            P5Solution::Constant(k) => {
                if !constant_p5_solutions(&params)?.iter().any(|c| (c - k).abs() < 1e-12) {
                    return Err(Error::InvalidParameter(format!("W ≡ {k} does not solve P5 for these parameters")));
                }
                let y_lo = (s2 * x_lo * x_lo).max(1e-12 * y_hi);
                PainleveVSolution::constant(params, k, Interval::new(y_lo, y_hi))?
            }
            P5Solution::Numeric { y0, w0, w0p } => {
                if x_lo <= 0.0 {
                    return Err(Error::InvalidParameter("numeric transcendents need x_lo > 0".into()));
                }
                let s = integrate_p5(params, y0, w0, w0p, Interval::new(s2 * x_lo * x_lo, y_hi))?;
                for stop in [s.truncation().left, s.truncation().right] {
                    if let Stop::Guard { at } = stop {
                        return Err(Error::SingularPoint { x: (at / s2).sqrt() });
                    }
                }
                s
            }
        };
        Ok(P5ModelParams {
            a,
            b,
            c,
            hbar,
            omega,
            p5,
            x_lo,
            x_hi,
            n,
        })
    }

    fn scale(&self) -> f64 {
        (self.omega / self.hbar).sqrt()
    }

    /// Window actually covered by the transcendent, with its grid.
    fn grid(&self) -> Result<GridSpec> {
        let s = self.scale();
        let (lo, hi) = match self.p5.kind() {
            SolutionKind::Constant => (self.x_lo, self.x_hi),
            SolutionKind::Numeric => {
                let d = self.p5.domain();
                (self.x_lo.max(d.lo.sqrt() / s), self.x_hi.min(d.hi.sqrt() / s))
            }
        };
        let keep = ((hi - lo) / (self.x_hi - self.x_lo) * self.n as f64).floor() as usize;
        if !(hi > lo) || keep < MIN_GRID_POINTS {
            return Err(Error::DomainMismatch(format!(
                "only {keep} grid points survive on the pole-free window (need {MIN_GRID_POINTS})"
            )));
        }
        Ok(GridSpec::new(lo, hi, keep))
    }
}

/// Jets of `(z, P, Q)` in the variable `z`.
#[derive(Clone)]
struct Kernel {
    sol: Arc<PainleveVSolution>,
    a: f64,
    b: f64,
    c: f64,
}

struct Fields {
    v: Jet,
    g1: Jet,
    g2: Jet,
    h1: Jet,
    h2: Jet,
}

impl Kernel {
    fn zjets(&self, z0: f64, r: usize) -> (Jet, Jet, Jet) {
        let z = Jet::variable(z0, r);
        let y = &z * &z;
        let w = self.sol.jet(y.value(), r + 1);
        let p = Jet::compose(&w.truncate(r), &y);
        let q = Jet::compose(&w.diff(), &y);
        (z, p, q)
    }

    /// Potential and supercharge functions per the closed-form expressions.
    fn fields(&self, z: &Jet, p: &Jet, q: &Jet) -> Fields {
        let (a, b, c) = (self.a, self.b, self.c);
        let y = z * z;
        let pm1 = p - 1.0;
        let pm1sq = &pm1 * &pm1;
        let ppq = p + q;
        let v = &y / 8.0 * (1.0 + &(&(&ppq * &ppq) * 4.0 - p * p) / &(&pm1sq * p))
            + &((1.0 / &y) * (a - b - 0.125 + &(b - &(p * p) * a) / p))
            - (1.0 + &(1.0 + p * (2.0 * c)) / &(&pm1 * 2.0));
        let g2 = -(z / &pm1);
        let g1 = z - &g2;
        let inv = (-8.0 * b + p * &(1.0 - 8.0 * a + 8.0 * b + p * (8.0 * a))) / &(&y * p * 4.0);
        let den = &pm1sq * p * 4.0;
        let h1 = (4.0 * c - p.clone()) * 2.0 / &(&pm1 * 4.0)
            + &inv
            + &(&y * &(p * &(-1.0 + &pm1 * p) + p * q * 4.0 - q * q * 4.0) / &den);
        let h2 = (1.0 + p * (4.0 * c)) * 2.0 / &(&pm1 * 4.0) + &inv
            - &(&y * &(p * p + p * p * p + q * q * 4.0 + p * &(-1.0 + q * 4.0)) / &den);
        Fields { v, g1, g2, h1, h2 }
    }
}

/// Physical supercharges `L_i† = ½(ħ²D² − ħg_iD + h_i)` with their certificates.
#[derive(Clone, Debug)]
pub struct P5Supercharges {
    pub g1: SmoothFn,
    pub h1: SmoothFn,
    pub g2: SmoothFn,
    pub h2: SmoothFn,
    pub v_a: SmoothFn,
    pub v_b: SmoothFn,
    pub l1_dag: LinearDiffOp,
    pub l2_dag: LinearDiffOp,
    pub checks: Vec<Check>,
}

fn field_fn(k: &Kernel, s: f64, scale: f64, pick: fn(Fields) -> Jet) -> SmoothFn {
    let k = k.clone();
    SmoothFn::from_jets(
        move |x, r| {
            let (z, p, q) = k.zjets(s * x, r);
            pick(k.fields(&z, &p, &q)).stretch(s) * scale
        },
        None,
    )
}

/// Pointwise residuals of the scaled determining equations at random `z`.
fn determining_checks(k: &Kernel, zdom: Interval) -> Vec<Check> {
    let (a, b, c) = (k.a, k.b, k.c);
    let d1 = -2.0 * c - 1.0;
    let mut r = [0.0_f64; 7];
    for z0 in random_points(zdom, 1000, 0x35) {
        let (z, p, q) = k.zjets(z0, 3);
        let f = k.fields(&z, &p, &q);
        let d = |j: &Jet| [j.value(), j.derivative(1), j.derivative(2)];
        let [g1, g1p, g1pp] = d(&f.g1);
        let [g2, g2p, g2pp] = d(&f.g2);
        let v = f.v.value();
        let vb = v - g2p;
        let base = |g: f64, gp: f64, gpp: f64| gpp / (2.0 * g) - (gp / (2.0 * g)).powi(2) + g * g / 4.0;
        let b1 = base(g1, g1p, g1pp);
        let b2 = base(g2, g2p, g2pp);
        let t1 = -2.0 * b / (g1 * g1);
        let t2 = 2.0 * a / (g2 * g2);
        let terms1 = [b1, g1p, t1, d1];
        let terms2 = [b2, g2p, t2];
        r[0] = r[0].max(scaled_residual(b1 - g1p + t1 + d1, 2.0 * v, &terms1));
        r[1] = r[1].max(scaled_residual(b1 + g1p + t1 + d1 - 2.0, 2.0 * vb, &terms1));
        r[2] = r[2].max(scaled_residual(b2 + g2p + t2 - 2.0, 2.0 * v, &terms2));
        r[3] = r[3].max(scaled_residual(b2 - g2p + t2 - 2.0, 2.0 * vb, &terms2));
        let h = |g: f64, gp: f64, gpp: f64, t: f64| -gpp / (2.0 * g) + (gp / (2.0 * g)).powi(2) - gp / 2.0 + g * g / 4.0 - t;
        r[4] = r[4].max(scaled_residual(h(g1, g1p, g1pp, -2.0 * b / (g1 * g1)), f.h1.value(), &[f.h1.value(), t1]));
        r[5] = r[5].max(scaled_residual(h(g2, g2p, g2pp, 2.0 * a / (g2 * g2)), f.h2.value(), &[f.h2.value(), t2]));
        r[6] = r[6].max(scaled_residual(g1p - 1.0, -g2p, &[g1p, g2p]));
    }
    let names = [
        "first_supercharge_a",
        "first_supercharge_b",
        "second_supercharge_a",
        "second_supercharge_b",
        "first_h",
        "second_h",
        "partner_potentials",
    ];
    names.iter().zip(r).map(|(n, v)| Check::new(*n, v, POINTWISE_TOL)).collect()
}

fn kernel(p: &P5ModelParams) -> Result<Kernel> {
    let pr = p.p5.params();
    if pr.a != p.a || pr.b != p.b || pr.c != p.c || pr.d != P5Params::MODEL_D {
        return Err(Error::InvalidParameter(format!(
            "transcendent parameters {pr:?} differ from the model's (a, b, c, −1/8)"
        )));
    }
    Ok(Kernel {
        sol: Arc::new(p.p5.clone()),
        a: p.a,
        b: p.b,
        c: p.c,
    })
}

fn check_poles(k: &Kernel, grid: &GridSpec, s: f64) -> Result<()> {
    let scan = GridSpec::new(grid.lo, grid.hi, 4 * grid.n + 1);
    for x in scan.points() {
        let w = k.sol.eval(s * s * x * x)[0];
        if !w.is_finite() || w.abs() < 1e-3 || (w - 1.0).abs() < 1e-3 {
            return Err(Error::SingularPoint { x });
        }
    }
    Ok(())
}

pub fn build_p5_supercharges(p: &P5ModelParams) -> Result<P5Supercharges> {
    let k = kernel(p)?;
    let grid = p.grid()?;
    let s = p.scale();
    check_poles(&k, &grid, s)?;
    let domain = Interval::new(grid.lo, grid.hi);
    let (hbar, e) = (p.hbar, p.hbar * p.omega);
    let re = e.sqrt();
    let g1 = field_fn(&k, s, re, |f| f.g1);
    let g2 = field_fn(&k, s, re, |f| f.g2);
    let h1 = field_fn(&k, s, e, |f| f.h1);
    let h2 = field_fn(&k, s, e, |f| f.h2);
    let v_a = field_fn(&k, s, e, |f| f.v);
    let v_b = v_a.zip(&g2.derivative_fn(), move |v, d| v - &(d * hbar));
    let supercharge = |second: bool| {
        let k = k.clone();
        LinearDiffOp::from_coeff_jets(2, domain, None, move |x, r| {
            let (z, pj, q) = k.zjets(s * x, r);
            let f = k.fields(&z, &pj, &q);
            let (g, h) = if second { (f.g2, f.h2) } else { (f.g1, f.h1) };
            vec![
                h.stretch(s) * (0.5 * e),
                g.stretch(s) * (-0.5 * hbar * re),
                Jet::constant(0.5 * hbar * hbar, r),
            ]
        })
    };
    let l1_dag = supercharge(false);
    let l2_dag = supercharge(true);

    let mut checks = determining_checks(&k, Interval::new(s * grid.lo.max(grid.h() * 0.5), s * grid.hi));
    let h_a = LinearDiffOp::schrodinger(v_a.clone(), hbar, domain);
    let h_b = LinearDiffOp::schrodinger(v_b.clone(), hbar, domain);
    checks.push(Check {
        name: "second_intertwining".into(),
        ..verify_intertwining(&h_b, &h_a, &l2_dag, 0.0, &grid, OPERATOR_TOL_SECOND)
    });
    checks.push(Check {
        name: "first_intertwining".into(),
        ..verify_intertwining(&h_a, &h_b, &l1_dag, e, &grid, OPERATOR_TOL_SECOND)
    });
    Ok(P5Supercharges {
        g1,
        h1,
        g2,
        h2,
        v_a,
        v_b,
        l1_dag,
        l2_dag,
        checks,
    })
}

/// `√(a/2)` and `√(−b/2)` enter the zero-mode energies.
fn real_energies(a: f64, b: f64) -> Result<()> {
    let bad = if a < 0.0 {
        format!("a = {a} < 0")
    } else if b > 0.0 {
        format!("b = {b} > 0")
    } else {
        return Ok(());
    };
    Err(Error::InvalidParameter(format!("{bad} gives complex zero-mode energies")))
}

/// `(A, A†, Q roots)` with `A† = L₁†L₂†`, `A = L₂L₁`.
pub fn build_p5_ladder(p: &P5ModelParams, sc: &P5Supercharges) -> Result<(LinearDiffOp, LinearDiffOp, Vec<f64>)> {
    real_energies(p.a, p.b)?;
    let a_dag = sc.l1_dag.compose(&sc.l2_dag)?;
    let a = sc.l2_dag.formal_adjoint()?.compose(&sc.l1_dag.formal_adjoint()?)?;
    let e = p.hbar * p.omega;
    let ra = (p.a / 2.0).sqrt();
    let rb = (-p.b / 2.0).sqrt();
    let roots = vec![ra, -ra, -p.c - 0.5 - rb, -p.c - 0.5 + rb]
        .into_iter()
        .map(|r| r * e)
        .collect();
    Ok((a, a_dag, roots))
}

pub fn build_p5_model(p: &P5ModelParams) -> Result<PotentialModel1D> {
    let sc = build_p5_supercharges(p)?;
    require(&sc.checks)?;
    let (a, a_dag, q_roots) = build_p5_ladder(p, &sc)?;
    let grid = p.grid()?;
    let k = kernel(p)?;
    let s = p.scale();
    let e = p.hbar * p.omega;
    let inverse_square = (grid.lo == 0.0).then(|| {
        let w0 = k.sol.eval(k.sol.domain().lo)[0];
        p.a - p.b - 0.125 + (p.b - p.a * w0 * w0) / w0
    });
    let mut params = BTreeMap::new();
    for (n, v) in [
        ("a", p.a),
        ("b", p.b),
        ("c", p.c),
        ("hbar", p.hbar),
        ("omega", p.omega),
        ("x_lo", grid.lo),
        ("x_hi", grid.hi),
    ] {
        params.insert(n.to_string(), v);
    }
    let model = PotentialModel1D {
        tag: "painleve5".into(),
        params,
        v: sc.v_a.clone(),
        domain: Interval::new(grid.lo, grid.hi),
        hbar: p.hbar,
        omega: p.omega,
        spacing: e,
        ladder_order: 4,
        a,
        a_dag,
        q_roots,
        q_norm: 1.0,
        energy_shift: 0.0,
        inverse_square,
        grid,
        checks: sc.checks,
        branches: None,
    };
    let (pa, pb, pc) = (p.a, p.b, p.c);
    Ok(model.with_branches(move |kind| zero_mode_branches(&k, s, e, pa, pb, pc, kind)))
}

fn zero_mode_branches(k: &Kernel, s: f64, e: f64, a: f64, b: f64, c: f64, kind: ZeroModeKind) -> Vec<ZeroModeBranch> {
    let ra = (a / 2.0).sqrt();
    let r8a = (8.0 * a).sqrt();
    let rb = (-b / 2.0).sqrt();
    // (prefactor, log-derivative in z) as functions of jets (z, P, Q)
    type Form = Arc<dyn Fn(&Jet, &Jet, &Jet) -> (Jet, Jet) + Send + Sync>;
    let mut forms: Vec<(u8, f64, Form)> = Vec::new();
    match kind {
        ZeroModeKind::Annihilation => {
            for (br, sg) in [(1u8, 1.0), (2, -1.0)] {
                forms.push((
                    br,
                    sg * ra,
                    Arc::new(move |z, p, q| {
                        let y = z * z;
                        let pm1 = p - 1.0;
                        let f = &pm1 * (sg * ra) - (0.5 + c) + &(&y * &(p + &(q * 2.0))) / &(&pm1 * 4.0);
                        let u = (-1.0 + &y - &(&pm1 * &pm1) * (sg * r8a) + p - &(&y * q) * 2.0) / &(z * &pm1 * 2.0);
                        (f, u)
                    }),
                ));
            }
            for (br, r) in [(3u8, -rb), (4, rb)] {
                forms.push((
                    br,
                    -c - 0.5 + r,
                    Arc::new(move |z, p, q| {
                        let y = z * z;
                        let pm1 = p - 1.0;
                        let pp = p * p;
                        let num = &(&pm1 * &pm1) * (-4.0 * r) + &pp * &y - &pp + p + &(q * &y) * 2.0;
                        let u = -(num / &(p * z * &pm1 * 2.0));
                        (Jet::constant(1.0, z.order()), u)
                    }),
                ));
            }
        }
        ZeroModeKind::Creation => {
            for (br, sg) in [(1u8, 1.0), (2, -1.0)] {
                forms.push((
                    br,
                    sg * ra - 1.0,
                    Arc::new(move |z, p, q| {
                        let y = z * z;
                        let pm1 = p - 1.0;
                        let u = (-1.0 - &y + &(&pm1 * &pm1) * (sg * r8a) + p - &(&y * q) * 2.0) / &(z * &pm1 * 2.0);
                        (Jet::constant(1.0, z.order()), u)
                    }),
                ));
            }
            for (br, r) in [(3u8, -rb), (4, rb)] {
                forms.push((
                    br,
                    -c - 1.5 + r,
                    Arc::new(move |z, p, q| {
                        let y = z * z;
                        let pm1 = p - 1.0;
                        let pp = p * p;
                        let f = c + 0.5 - &(&pm1 * r / p) - &(&y * &(p + &(q * 2.0))) / &(p * &pm1 * 4.0);
                        let num = &(&pm1 * &pm1) * (-4.0 * r) + &y * &(&pp - &(q * 2.0)) + &pp - p;
                        let u = num / &(p * z * &pm1 * 2.0);
                        (f, u)
                    }),
                ));
            }
        }
    }
    forms
        .into_iter()
        .map(|(branch, energy, form)| {
            let (k1, k2) = (k.clone(), k.clone());
            let f1 = form.clone();
            let prefactor = SmoothFn::from_jets(
                move |x, r| {
                    let (z, p, q) = k1.zjets(s * x, r);
                    f1(&z, &p, &q).0.stretch(s)
                },
                None,
            );
            let log_derivative = SmoothFn::from_jets(
                move |x, r| {
                    let (z, p, q) = k2.zjets(s * x, r);
                    form(&z, &p, &q).1.stretch(s) * s
                },
                None,
            );
            ZeroModeBranch {
                branch,
                energy: energy * e,
                prefactor,
                log_derivative,
            }
        })
        .collect()
}

pub struct Painleve5;

const PARAMS: &[Param] = &[
    Param::required("hbar", "reduced Planck constant"),
    Param::required("omega", "angular frequency"),
    Param::required("a", "P5 parameter a (≥ 0 for real energies)"),
    Param::required("b", "P5 parameter b (≤ 0 for real energies)"),
    Param::required("c", "P5 parameter c"),
    Param::required("x_hi", "right end of the window"),
    Param::optional("x_lo", 0.0, "left end of the window (0 puts a wall at the singular point)"),
    Param::optional("n", 2000.0, "interior grid points"),
    Param::optional("w_const", f64::NAN, "use the constant transcendent W ≡ w_const"),
    Param::optional("y0", f64::NAN, "initial point of a numeric transcendent"),
    Param::optional("w0", f64::NAN, "W(y0)"),
    Param::optional("w0p", f64::NAN, "W′(y0)"),
];

impl ModelBuilder for Painleve5 {
    fn name(&self) -> &'static str {
        "painleve5"
    }

    fn parameters(&self) -> &'static [Param] {
        PARAMS
    }

    fn build(&self, params: &BTreeMap<String, f64>) -> Result<PotentialModel1D> {
        let solution = match (opt(params, "w_const"), opt(params, "y0"), opt(params, "w0"), opt(params, "w0p")) {
            (Some(k), None, None, None) => P5Solution::Constant(k),
            (None, Some(y0), Some(w0), Some(w0p)) => P5Solution::Numeric { y0, w0, w0p },
            _ => {
                return Err(Error::InvalidParameter(
                    "give either w_const or all of y0, w0, w0p".into(),
                ))
            }
        };
        let mp = P5ModelParams::new(
            p(params, "a"),
            p(params, "b"),
            p(params, "c"),
            positive(params, "hbar")?,
            positive(params, "omega")?,
            solution,
            p(params, "x_lo"),
            p(params, "x_hi"),
            grid_size(params)?,
        )?;
        let mut m = build_p5_model(&mp)?;
        for (k, v) in params {
            if !v.is_nan() && !m.params.contains_key(k) {
                m.params.insert(k.clone(), *v);
            }
        }
        Ok(m)
    }
}
