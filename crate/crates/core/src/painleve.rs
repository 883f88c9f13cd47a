//! Painlevé IV and V transcendents and the `g̃₂` equation that reduces to P5.
//!
//! * P4: `P'' = P'²/(2P) + (3/2)P³ + 4zP² + 2(z² − α)P + β/P`
//! * P5: `W'' = (1/(2W) + 1/(W−1))W'² − W'/y + (W−1)²/y²·(aW + b/W) + cW/y + dW(W+1)/(W−1)`
//! * G2: the ODE for `g̃₂(z)` obtained from the fourth-order intertwining system;
//!   `g̃₂ = −z/(W−1)`, `y = z²` maps it onto P5 with
//!   `a = Δ₁²/2, b = −Δ₂²/2, c = −ε − 1/2, d = −1/8`.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::jet::{Jet, Scalar};
use crate::ode::{self, IntegrationOptions, SecondOrderOde, Trajectory, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct P5Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl P5Params {
    /// The value of `d` used by every potential of the P5 family.
    pub const MODEL_D: f64 = -0.125;

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        P5Params { a, b, c, d }
    }

    pub fn from_shifts(shifts: G2Shifts) -> Self {
        P5Params {
            a: 0.5 * shifts.delta1 * shifts.delta1,
            b: -0.5 * shifts.delta2 * shifts.delta2,
            c: -shifts.epsilon - 0.5,
            d: Self::MODEL_D,
        }
    }

    /// Inverse of [`P5Params::from_shifts`]; needs `a ≥ 0`, `b ≤ 0`, `d = −1/8`.
    pub fn to_shifts(&self) -> Result<G2Shifts> {
        if self.a < 0.0 || self.b > 0.0 || (self.d - Self::MODEL_D).abs() > 1e-15 {
            return Err(Error::InvalidParameter(format!(
                "no real shifts for a={}, b={}, d={} (need a ≥ 0, b ≤ 0, d = −1/8)",
                self.a, self.b, self.d
            )));
        }
        Ok(G2Shifts {
            epsilon: -self.c - 0.5,
            delta1: (2.0 * self.a).sqrt(),
            delta2: (-2.0 * self.b).sqrt(),
        })
    }
}

/// Shift parameters `ε, Δ₁, Δ₂` of the `g̃₂` equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct G2Shifts {
    pub epsilon: f64,
    pub delta1: f64,
    pub delta2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Constant,
    Numeric,
}

pub fn p5_rhs<T: Scalar>(p: &P5Params, y: T, w: T, wp: T) -> T {
    let wm1 = w.clone() - 1.0;
    let t1 = (w.recip() * 0.5 + wm1.recip()) * wp.sq();
    let t2 = wp / y.clone();
    let t3 = wm1.sq() / y.sq() * (w.clone() * p.a + w.recip() * p.b);
    let t4 = w.clone() * p.c / y;
    let t5 = w.clone() * (w.clone() + 1.0) / wm1 * p.d;
    t1 - t2 + t3 + t4 + t5
}

/// `W'' − RHS(W, W', y)`.
pub fn p5_residual(state: [f64; 3], params: &P5Params, y: f64) -> Result<f64> {
    let [w, wp, wpp] = state;
    if y == 0.0 {
        return Err(Error::SingularPoint { x: y });
    }
    if w == 0.0 || w == 1.0 {
        return Err(Error::SingularPoint { x: y });
    }
    Ok(wpp - p5_rhs(params, y, w, wp))
}

pub fn g2_rhs<T: Scalar>(s: &G2Shifts, z: T, g: T, gp: T) -> T {
    let (e, d1s, d2s) = (s.epsilon, s.delta1 * s.delta1, s.delta2 * s.delta2);
    let zmg = z.clone() - g.clone();
    let g2 = g.sq();
    let g3 = g2.clone() * g.clone();
    let g4 = g2.sq();
    let g5 = g4.clone() * g.clone();
    let z2 = z.sq();
    let num = g5 * z.clone() * -2.0
        + g4 * (z2.clone() * 5.0 + (8.0 * e + 4.0))
        - g3 * z.clone() * (z2.clone() + (4.0 * e + 2.0)) * 4.0
        + g2 * (z2.sq() + z2.clone() * (4.0 * (2.0 * e + 1.0)) + (4.0 * (d2s - d1s) - 1.0))
        - z.clone() * (z.clone() - g.clone() * 2.0) * (4.0 * d1s);
    let t1 = (z.clone() - g.clone() * 2.0) / (g.clone() * zmg.clone() * 2.0) * gp.sq();
    let t2 = g.clone() / (z.clone() * zmg.clone()) * gp;
    let t3 = num / (z * g * zmg * 2.0);
    t1 + t2 + t3
}

/// `g̃₂'' − RHS(g̃₂, g̃₂', z)`.
pub fn g2_residual(state: [f64; 3], shifts: &G2Shifts, z: f64) -> Result<f64> {
    let [g, gp, gpp] = state;
    if z == 0.0 || g == 0.0 || g == z {
        return Err(Error::SingularPoint { x: z });
    }
    Ok(gpp - g2_rhs(shifts, z, g, gp))
}

pub fn p4_rhs<T: Scalar>(alpha: f64, beta: f64, z: T, p: T, pp: T) -> T {
    pp.sq() / (p.clone() * 2.0)
        + p.powi(3) * 1.5
        + z.clone() * p.sq() * 4.0
        + (z.sq() - alpha) * p.clone() * 2.0
        + p.recip() * beta
}

pub fn p4_residual(state: [f64; 3], alpha: f64, beta: f64, z: f64) -> Result<f64> {
    let [p, pp, ppp] = state;
    if p == 0.0 {
        return Err(Error::SingularPoint { x: z });
    }
    Ok(ppp - p4_rhs(alpha, beta, z, p, pp))
}

struct P5Eq(P5Params);
impl SecondOrderOde for P5Eq {
    fn rhs<T: Scalar>(&self, t: T, u: T, up: T) -> T {
        p5_rhs(&self.0, t, u, up)
    }
    fn singular_distance(&self, t: f64, u: f64) -> f64 {
        u.abs().min((u - 1.0).abs()).min(t.abs()).min(u.abs().recip())
    }
}

struct G2Eq(G2Shifts);
impl SecondOrderOde for G2Eq {
    fn rhs<T: Scalar>(&self, t: T, u: T, up: T) -> T {
        g2_rhs(&self.0, t, u, up)
    }
    fn singular_distance(&self, t: f64, u: f64) -> f64 {
        u.abs().min((u - t).abs()).min(t.abs()).min(u.abs().recip())
    }
}

struct P4Eq(f64, f64);
impl SecondOrderOde for P4Eq {
    fn rhs<T: Scalar>(&self, t: T, u: T, up: T) -> T {
        p4_rhs(self.0, self.1, t, u, up)
    }
    fn singular_distance(&self, _t: f64, u: f64) -> f64 {
        u.abs().min(u.abs().recip())
    }
}

/// Something that can report Taylor jets of a scalar function.
pub trait JetSource: Send + Sync {
    fn jet(&self, t: f64, order: usize) -> Jet;
}

struct ConstantSource(f64);
impl JetSource for ConstantSource {
    fn jet(&self, _t: f64, order: usize) -> Jet {
        Jet::constant(self.0, order)
    }
}

impl JetSource for Trajectory {
    fn jet(&self, t: f64, order: usize) -> Jet {
        Trajectory::jet(self, t, order)
    }
}

/// `W(y) = 1 − √y / g̃₂(√y)`.
struct P5FromG2(Arc<dyn JetSource>);
impl JetSource for P5FromG2 {
    fn jet(&self, y: f64, order: usize) -> Jet {
        let z = Jet::variable(y, order).sqrt();
        let g = Jet::compose(&self.0.jet(z.value(), order), &z);
        1.0 - &z / &g
    }
}

/// `g̃₂(z) = −z / (W(z²) − 1)`.
struct G2FromP5(Arc<dyn JetSource>);
impl JetSource for G2FromP5 {
    fn jet(&self, z: f64, order: usize) -> Jet {
        let zj = Jet::variable(z, order);
        let y = &zj * &zj;
        let w = Jet::compose(&self.0.jet(y.value(), order), &y);
        -(&zj / &(w - 1.0))
    }
}

fn eval3(src: &dyn JetSource, t: f64) -> [f64; 3] {
    let j = src.jet(t, 2);
    [j.derivative(0), j.derivative(1), j.derivative(2)]
}

/// Sample record used for JSON export.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionRecord<P> {
    pub params: P,
    pub domain: Interval,
    pub samples: Vec<[f64; 3]>,
    pub residual_bound: f64,
    pub kind: SolutionKind,
}

fn sample_rows(src: &dyn JetSource, domain: Interval, n: usize) -> Vec<[f64; 3]> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let t = domain.lo + domain.length() * i as f64 / (n - 1) as f64;
            let e = eval3(src, t);
            [t, e[0], e[1]]
        })
        .collect()
}

fn write_rows<W: Write>(mut out: W, header: &str, rows: &[[f64; 3]]) -> std::io::Result<()> {
    writeln!(out, "{header}")?;
    for r in rows {
        writeln!(out, "{},{},{}", r[0], r[1], r[2])?;
    }
    Ok(())
}

/// Certified solution `W(y)` of P5.
#[derive(Clone)]
pub struct PainleveVSolution {
    params: P5Params,
    domain: Interval,
    residual_bound: f64,
    kind: SolutionKind,
    truncation: Truncation,
    source: Arc<dyn JetSource>,
}

impl std::fmt::Debug for PainleveVSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PainleveVSolution")
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("residual_bound", &self.residual_bound)
            .field("kind", &self.kind)
            .finish()
    }
}

impl PainleveVSolution {
    /// The constant solution `W ≡ κ`, certified on `domain`.
    pub fn constant(params: P5Params, kappa: f64, domain: Interval) -> Result<Self> {
        if domain.lo <= 0.0 {
            return Err(Error::InvalidParameter("P5 domain must lie in y > 0".into()));
        }
        if kappa == 0.0 || kappa == 1.0 {
            return Err(Error::SingularPoint { x: domain.lo });
        }
        let src: Arc<dyn JetSource> = Arc::new(ConstantSource(kappa));
        let bound = certify_p5(&*src, &params, domain)?;
        Ok(PainleveVSolution {
            params,
            domain,
            residual_bound: bound,
            kind: SolutionKind::Constant,
            truncation: Truncation::complete(),
            source: src,
        })
    }

    pub fn params(&self) -> P5Params {
        self.params
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    pub fn kind(&self) -> SolutionKind {
        self.kind
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// `(W, W', W'')` at `y`.
    pub fn eval(&self, y: f64) -> [f64; 3] {
        eval3(&*self.source, y)
    }

    /// Taylor jet of `W` at `y`.
    pub fn jet(&self, y: f64, order: usize) -> Jet {
        self.source.jet(y, order)
    }

    pub fn source(&self) -> Arc<dyn JetSource> {
        self.source.clone()
    }

    /// Restricts the certified domain.
    pub fn restrict(&self, domain: Interval) -> Result<Self> {
        let d = self
            .domain
            .intersect(&domain)
            .ok_or_else(|| Error::DomainMismatch(format!("{domain:?} misses {:?}", self.domain)))?;
        Ok(PainleveVSolution {
            domain: d,
            ..self.clone()
        })
    }

    pub fn record(&self, samples: usize) -> SolutionRecord<P5Params> {
        SolutionRecord {
            params: self.params,
            domain: self.domain,
            samples: sample_rows(&*self.source, self.domain, samples),
            residual_bound: self.residual_bound,
            kind: self.kind,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W, samples: usize) -> std::io::Result<()> {
        write_rows(out, "y,W,dW", &sample_rows(&*self.source, self.domain, samples))
    }
}

fn certify_p5(src: &dyn JetSource, p: &P5Params, domain: Interval) -> Result<f64> {
    let mut err = None;
    let b = ode::certify(domain, 2001, 1000, 0xc0ffee, 4.0, |y| {
        match p5_residual(eval3(src, y), p, y) {
            Ok(r) => r,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(b),
    }
}

fn certify_g2(src: &dyn JetSource, s: &G2Shifts, domain: Interval) -> Result<f64> {
    let mut err = None;
    let b = ode::certify(domain, 2001, 1000, 0xc0ffee, 4.0, |z| {
        match g2_residual(eval3(src, z), s, z) {
            Ok(r) => r,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(b),
    }
}

/// Certified solution `g̃₂(z)`.
#[derive(Clone)]
pub struct G2Solution {
    shifts: G2Shifts,
    domain: Interval,
    residual_bound: f64,
    kind: SolutionKind,
    truncation: Truncation,
    source: Arc<dyn JetSource>,
}

impl std::fmt::Debug for G2Solution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("G2Solution")
            .field("shifts", &self.shifts)
            .field("domain", &self.domain)
            .field("residual_bound", &self.residual_bound)
            .finish()
    }
}

impl G2Solution {
    pub fn shifts(&self) -> G2Shifts {
        self.shifts
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    pub fn kind(&self) -> SolutionKind {
        self.kind
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// `(g̃₂, g̃₂', g̃₂'')` at `z`.
    pub fn eval(&self, z: f64) -> [f64; 3] {
        eval3(&*self.source, z)
    }

    pub fn jet(&self, z: f64, order: usize) -> Jet {
        self.source.jet(z, order)
    }

    pub fn record(&self, samples: usize) -> SolutionRecord<G2Shifts> {
        SolutionRecord {
            params: self.shifts,
            domain: self.domain,
            samples: sample_rows(&*self.source, self.domain, samples),
            residual_bound: self.residual_bound,
            kind: self.kind,
        }
    }
}

/// Certified solution of P4.
#[derive(Clone)]
pub struct P4Solution {
    pub alpha: f64,
    pub beta: f64,
    domain: Interval,
    residual_bound: f64,
    truncation: Truncation,
    source: Arc<dyn JetSource>,
}

impl std::fmt::Debug for P4Solution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("P4Solution")
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("domain", &self.domain)
            .field("residual_bound", &self.residual_bound)
            .finish()
    }
}

impl P4Solution {
    /// Wraps a closed-form solution given by a jet closure and certifies it.
    pub fn closed_form(
        alpha: f64,
        beta: f64,
        domain: Interval,
        f: impl Fn(&Jet) -> Jet + Send + Sync + 'static,
    ) -> Result<Self> {
        struct Closure<F>(F);
        impl<F: Fn(&Jet) -> Jet + Send + Sync> JetSource for Closure<F> {
            fn jet(&self, t: f64, order: usize) -> Jet {
                (self.0)(&Jet::variable(t, order))
            }
        }
        let src: Arc<dyn JetSource> = Arc::new(Closure(f));
        let mut err = None;
        let bound = ode::certify(domain, 2001, 1000, 0xc0ffee, 4.0, |z| {
            p4_residual(eval3(&*src, z), alpha, beta, z).unwrap_or_else(|e| {
                err.get_or_insert(e);
                0.0
            })
        });
        if let Some(e) = err {
            return Err(e);
        }
        Ok(P4Solution {
            alpha,
            beta,
            domain,
            residual_bound: bound,
            truncation: Truncation::complete(),
            source: src,
        })
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    /// `(P, P', P'')` at `z`.
    pub fn eval(&self, z: f64) -> [f64; 3] {
        eval3(&*self.source, z)
    }

    pub fn jet(&self, z: f64, order: usize) -> Jet {
        self.source.jet(z, order)
    }
}

fn check_span(t0: f64, span: Interval, positive: bool) -> Result<()> {
    if !(span.lo <= t0 && t0 <= span.hi) {
        return Err(Error::InvalidParameter(format!(
            "initial point {t0} outside span [{}, {}]",
            span.lo, span.hi
        )));
    }
    if positive && span.lo <= 0.0 {
        return Err(Error::InvalidParameter("span must lie in (0, ∞)".into()));
    }
    if !span.is_finite() {
        return Err(Error::InvalidParameter("span must be finite".into()));
    }
    Ok(())
}

pub fn integrate_p5(params: P5Params, y0: f64, w0: f64, w0p: f64, span: Interval) -> Result<PainleveVSolution> {
    integrate_p5_with(params, y0, w0, w0p, span, &IntegrationOptions::default())
}

pub fn integrate_p5_with(
    params: P5Params,
    y0: f64,
    w0: f64,
    w0p: f64,
    span: Interval,
    opts: &IntegrationOptions,
) -> Result<PainleveVSolution> {
    check_span(y0, span, true)?;
    if w0 == 0.0 || w0 == 1.0 {
        return Err(Error::SingularPoint { x: y0 });
    }
    let tr = ode::integrate(&P5Eq(params), y0, w0, w0p, span, opts);
    Ok(PainleveVSolution {
        params,
        domain: tr.domain(),
        residual_bound: tr.residual_bound(),
        kind: SolutionKind::Numeric,
        truncation: tr.truncation(),
        source: Arc::new(tr),
    })
}

pub fn integrate_g2(shifts: G2Shifts, z0: f64, g0: f64, g0p: f64, span: Interval) -> Result<G2Solution> {
    integrate_g2_with(shifts, z0, g0, g0p, span, &IntegrationOptions::default())
}

pub fn integrate_g2_with(
    shifts: G2Shifts,
    z0: f64,
    g0: f64,
    g0p: f64,
    span: Interval,
    opts: &IntegrationOptions,
) -> Result<G2Solution> {
    check_span(z0, span, true)?;
    if g0 == 0.0 || g0 == z0 {
        return Err(Error::SingularPoint { x: z0 });
    }
    let tr = ode::integrate(&G2Eq(shifts), z0, g0, g0p, span, opts);
    Ok(G2Solution {
        shifts,
        domain: tr.domain(),
        residual_bound: tr.residual_bound(),
        kind: SolutionKind::Numeric,
        truncation: tr.truncation(),
        source: Arc::new(tr),
    })
}

pub fn integrate_p4(alpha: f64, beta: f64, z0: f64, p0: f64, p0p: f64, span: Interval) -> Result<P4Solution> {
    integrate_p4_with(alpha, beta, z0, p0, p0p, span, &IntegrationOptions::default())
}

pub fn integrate_p4_with(
    alpha: f64,
    beta: f64,
    z0: f64,
    p0: f64,
    p0p: f64,
    span: Interval,
    opts: &IntegrationOptions,
) -> Result<P4Solution> {
    check_span(z0, span, false)?;
    if p0 == 0.0 {
        return Err(Error::SingularPoint { x: z0 });
    }
    let tr = ode::integrate(&P4Eq(alpha, beta), z0, p0, p0p, span, opts);
    Ok(P4Solution {
        alpha,
        beta,
        domain: tr.domain(),
        residual_bound: tr.residual_bound(),
        truncation: tr.truncation(),
        source: Arc::new(tr),
    })
}

/// Constants `κ ∉ {0, 1}` with `W ≡ κ` solving P5 for every `y`.
///
/// Substituting a constant leaves three independent powers of `y`:
/// `(κ−1)²(aκ² + b)/κ`, `cκ` and `dκ(κ+1)/(κ−1)`, all of which must vanish.
/// Returns an error for `a = b = c = d = 0`, where every constant solves it.
pub fn constant_p5_solutions(p: &P5Params) -> Result<Vec<f64>> {
    let tol = 1e-12;
    let zero = |v: f64, s: f64| v.abs() <= tol * s.max(1.0);
    if !zero(p.c, 1.0) {
        return Ok(Vec::new());
    }
    let scale = p.a.abs().max(p.b.abs());
    if p.d != 0.0 {
        return Ok(if zero(p.a + p.b, scale) { vec![-1.0] } else { Vec::new() });
    }
    if p.a == 0.0 && p.b == 0.0 {
        return Err(Error::InvalidParameter(
            "every constant solves P5 when a = b = c = d = 0".into(),
        ));
    }
    if p.a == 0.0 {
        return Ok(Vec::new());
    }
    let r = -p.b / p.a;
    if r <= 0.0 {
        return Ok(Vec::new());
    }
    let k = r.sqrt();
    Ok([-k, k].into_iter().filter(|&v| v != 1.0).collect())
}

pub enum Transformed {
    P5(PainleveVSolution),
    G2(G2Solution),
}

/// `g̃₂ → W`: `W(y) = 1 − √y/g̃₂(√y)`; the result is re-certified against P5.
pub fn g2_to_p5(g: &G2Solution) -> Result<PainleveVSolution> {
    let d = g.domain;
    if d.lo <= 0.0 {
        return Err(Error::InvalidParameter("g̃₂ domain must lie in z > 0".into()));
    }
    let params = P5Params::from_shifts(g.shifts);
    let domain = Interval::new(d.lo * d.lo, d.hi * d.hi);
    let src: Arc<dyn JetSource> = Arc::new(P5FromG2(g.source.clone()));
    let bound = certify_p5(&*src, &params, domain)?;
    Ok(PainleveVSolution {
        params,
        domain,
        residual_bound: bound,
        kind: g.kind,
        truncation: g.truncation,
        source: src,
    })
}

/// `W → g̃₂`: `g̃₂(z) = −z/(W(z²) − 1)`; needs `a ≥ 0, b ≤ 0, d = −1/8`.
pub fn p5_to_g2(w: &PainleveVSolution) -> Result<G2Solution> {
    let shifts = w.params.to_shifts()?;
    let d = w.domain;
    let domain = Interval::new(d.lo.sqrt(), d.hi.sqrt());
    let src: Arc<dyn JetSource> = Arc::new(G2FromP5(w.source.clone()));
    let bound = certify_g2(&*src, &shifts, domain)?;
    Ok(G2Solution {
        shifts,
        domain,
        residual_bound: bound,
        kind: w.kind,
        truncation: w.truncation,
        source: src,
    })
}

/// Direction-tagged wrapper over [`g2_to_p5`] and [`p5_to_g2`].
pub fn g2_p5_transform(input: &Transformed) -> Result<Transformed> {
    match input {
        Transformed::G2(g) => g2_to_p5(g).map(Transformed::P5),
        Transformed::P5(w) => p5_to_g2(w).map(Transformed::G2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(a: f64, b: f64, c: f64) -> P5Params {
        P5Params::new(a, b, c, P5Params::MODEL_D)
    }

    #[test]
    fn residual_examples() {
        let r = p5_residual([-1.0, 0.0, 0.0], &model(1.0, -1.0, 0.0), 2.0).unwrap();
        assert_eq!(r, 0.0);
        let r = p5_residual([-1.0, 0.0, 0.0], &model(1.0, -1.0, 0.3), 2.0).unwrap();
        assert!((r - 0.15).abs() < 1e-15);
        assert!(p5_residual([1.0, 0.3, 0.0], &model(1.0, -1.0, 0.0), 2.0).is_err());
        assert!(p5_residual([0.0, 0.3, 0.0], &model(1.0, -1.0, 0.0), 2.0).is_err());
    }

    #[test]
    fn constant_solutions() {
        assert_eq!(constant_p5_solutions(&model(3.0, -3.0, 0.0)).unwrap(), vec![-1.0]);
        assert!(constant_p5_solutions(&model(3.0, -3.0, 0.1)).unwrap().is_empty());
        assert!(constant_p5_solutions(&model(3.0, 2.0, 0.0)).unwrap().is_empty());
        let k = constant_p5_solutions(&P5Params::new(1.0, -4.0, 0.0, 0.0)).unwrap();
        assert_eq!(k, vec![-2.0, 2.0]);
    }

    #[test]
    fn constant_trajectory_from_integration() {
        let s = integrate_p5(model(2.0, -2.0, 0.0), 1.0, -1.0, 0.0, Interval::new(0.5, 10.0)).unwrap();
        assert_eq!(s.domain(), Interval::new(0.5, 10.0));
        assert!(s.residual_bound() < 1e-10);
        for y in [0.5, 3.3, 10.0] {
            assert!((s.eval(y)[0] + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_initial_value_rejected() {
        let e = integrate_p5(model(2.0, -2.0, 0.0), 1.0, 1.0, 0.0, Interval::new(0.5, 2.0));
        assert!(matches!(e, Err(Error::SingularPoint { .. })));
        assert!(integrate_p4(0.0, -2.0, 1.0, 0.0, 1.0, Interval::new(0.0, 2.0)).is_err());
    }

    #[test]
    fn half_z_maps_to_minus_one() {
        let shifts = G2Shifts {
            epsilon: -0.5,
            delta1: 2.0,
            delta2: 2.0,
        };
        // g̃₂ = z/2 solves the G2 equation exactly when the P5 image W ≡ −1 does.
        let w = PainleveVSolution::constant(P5Params::from_shifts(shifts), -1.0, Interval::new(0.25, 4.0)).unwrap();
        let g = p5_to_g2(&w).unwrap();
        for z in [0.5, 1.0, 1.7] {
            assert!((g.eval(z)[0] - 0.5 * z).abs() < 1e-14);
        }
        assert!(g.residual_bound() < 1e-12);
    }

    #[test]
    fn p4_closed_form_certifies() {
        let s = P4Solution::closed_form(0.0, -2.0, Interval::new(0.2, 3.0), |z| z.clone() * -2.0).unwrap();
        assert!(s.residual_bound() < 1e-12);
    }
}
