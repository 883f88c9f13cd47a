//! Ordinary differential operators `Σ c_k(x) d^k/dx^k` with smooth coefficients.

mod grid;
mod residual;

pub use grid::{discretize, GridMatrix, GridSpec};
pub use residual::{apply_on_grid, bump_probes, residual_norm, Probe};

use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::jet::{binomial, factorial, Jet};
use crate::smooth::{min_order, SmoothFn};

type CoeffJets = dyn Fn(f64, usize) -> Vec<Jet> + Send + Sync;

/// `Σ_{k=0}^{order} c_k(x) d^k/dx^k` on `domain`.
///
/// Coefficients are produced together as jets: `coeffs(x, r)` returns
/// `order + 1` jets of order `r`. `max_jet` bounds `r` when some coefficient
/// only has finitely many derivatives available.
#[derive(Clone)]
pub struct LinearDiffOp {
    order: usize,
    domain: Interval,
    coeffs: Arc<CoeffJets>,
    max_jet: Option<usize>,
}

impl fmt::Debug for LinearDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearDiffOp")
            .field("order", &self.order)
            .field("domain", &self.domain)
            .field("max_jet", &self.max_jet)
            .finish()
    }
}

impl LinearDiffOp {
    /// Operator from coefficient functions `c_0, …, c_order`.
    pub fn new(coeffs: Vec<SmoothFn>, domain: Interval) -> Self {
        assert!(!coeffs.is_empty(), "an operator needs at least c_0");
        let order = coeffs.len() - 1;
        let max_jet = coeffs
            .iter()
            .fold(None, |acc, c| min_order(acc, c.max_order()));
        LinearDiffOp {
            order,
            domain,
            coeffs: Arc::new(move |x, r| coeffs.iter().map(|c| c.jet_unchecked(x, r)).collect()),
            max_jet,
        }
    }

    pub fn from_coeff_jets(
        order: usize,
        domain: Interval,
        max_jet: Option<usize>,
        f: impl Fn(f64, usize) -> Vec<Jet> + Send + Sync + 'static,
    ) -> Self {
        LinearDiffOp {
            order,
            domain,
            coeffs: Arc::new(f),
            max_jet,
        }
    }

    pub fn identity(domain: Interval) -> Self {
        Self::new(vec![SmoothFn::constant(1.0)], domain)
    }

    pub fn zero(domain: Interval) -> Self {
        Self::new(vec![SmoothFn::zero()], domain)
    }

    /// `d^k/dx^k`.
    pub fn derivative(k: usize, domain: Interval) -> Self {
        let mut c = vec![SmoothFn::zero(); k + 1];
        c[k] = SmoothFn::constant(1.0);
        Self::new(c, domain)
    }

    pub fn multiplication(f: SmoothFn, domain: Interval) -> Self {
        Self::new(vec![f], domain)
    }

    /// `-ħ²/2 d²/dx² + V`.
    pub fn schrodinger(v: SmoothFn, hbar: f64, domain: Interval) -> Self {
        Self::new(
            vec![v, SmoothFn::zero(), SmoothFn::constant(-0.5 * hbar * hbar)],
            domain,
        )
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn max_jet(&self) -> Option<usize> {
        self.max_jet
    }

    pub fn with_domain(&self, domain: Interval) -> Self {
        LinearDiffOp {
            domain,
            ..self.clone()
        }
    }

    fn check_jet(&self, r: usize) -> Result<()> {
        match self.max_jet {
            Some(m) if r > m => Err(Error::DerivativeUnavailable {
                requested: r,
                available: m,
            }),
            _ => Ok(()),
        }
    }

    /// Jets of order `r` of every coefficient at `x`.
    pub fn coeff_jets(&self, x: f64, r: usize) -> Result<Vec<Jet>> {
        self.check_jet(r)?;
        Ok((self.coeffs)(x, r))
    }

    pub fn coeffs_at(&self, x: f64) -> Vec<f64> {
        (self.coeffs)(x, 0).iter().map(Jet::value).collect()
    }

    /// `(L f)(x)` given the jet of `f` at `x` (order at least `self.order()`).
    pub fn apply_jet(&self, x: f64, f: &Jet) -> f64 {
        let c = (self.coeffs)(x, 0);
        Self::apply_with(&c, f)
    }

    /// `Σ c_k f^(k)` for precomputed coefficient jets (only values are used).
    pub fn apply_with(coeffs: &[Jet], f: &Jet) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .take(f.order() + 1)
            .map(|(k, c)| c.value() * f.taylor()[k] * factorial(k))
            .sum()
    }

    /// Jet of order `r` of `L f`, given the jet of `f` of order at least `r + order`.
    pub fn apply_jet_jet(&self, x: f64, f: &Jet, r: usize) -> Result<Jet> {
        let c = self.coeff_jets(x, r)?;
        let mut out = Jet::constant(0.0, r);
        for (k, ck) in c.iter().enumerate() {
            out = out + ck * &f.diff_n(k).resize(r);
        }
        Ok(out)
    }

    /// `self ∘ m` by the generalized Leibniz rule.
    pub fn compose(&self, m: &LinearDiffOp) -> Result<LinearDiffOp> {
        let domain = self.domain.intersect(&m.domain).ok_or_else(|| {
            Error::DomainMismatch(format!("{:?} and {:?} do not overlap", self.domain, m.domain))
        })?;
        let lo = self.order;
        let mo = m.order;
        if let Some(mm) = m.max_jet {
            if mm < lo {
                return Err(Error::DerivativeUnavailable {
                    requested: lo,
                    available: mm,
                });
            }
        }
        let max_jet = min_order(self.max_jet, m.max_jet.map(|v| v - lo));
        let (l, m) = (self.clone(), m.clone());
        Ok(LinearDiffOp {
            order: lo + mo,
            domain,
            max_jet,
            coeffs: Arc::new(move |x, r| {
                let a = (l.coeffs)(x, r);
                let b = (m.coeffs)(x, r + lo);
                // bd[j][p] = jet of b_j^(p), truncated to order r
                let bd: Vec<Vec<Jet>> = b
                    .iter()
                    .map(|bj| {
                        let mut v = Vec::with_capacity(lo + 1);
                        let mut cur = bj.clone();
                        for _ in 0..=lo {
                            v.push(cur.resize(r));
                            cur = cur.diff();
                        }
                        v
                    })
                    .collect();
                let mut out = vec![Jet::constant(0.0, r); lo + mo + 1];
                for (i, ai) in a.iter().enumerate() {
                    for mm in 0..=i {
                        let w = binomial(i, mm);
                        for (j, bdj) in bd.iter().enumerate() {
                            let term = ai * &bdj[i - mm];
                            out[j + mm] = &out[j + mm] + &(term * w);
                        }
                    }
                }
                out
            }),
        })
    }

    /// `Σ (-d/dx)^k ∘ c_k`, expanded to standard form.
    pub fn formal_adjoint(&self) -> Result<LinearDiffOp> {
        let n = self.order;
        if let Some(m) = self.max_jet {
            if m < n {
                return Err(Error::DerivativeUnavailable {
                    requested: n,
                    available: m,
                });
            }
        }
        let l = self.clone();
        Ok(LinearDiffOp {
            order: n,
            domain: self.domain,
            max_jet: self.max_jet.map(|m| m - n),
            coeffs: Arc::new(move |x, r| {
                let c = (l.coeffs)(x, r + n);
                let mut out = vec![Jet::constant(0.0, r); n + 1];
                for (k, ck) in c.iter().enumerate() {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let mut d = ck.clone();
                    // d holds c_k^(k - m) while m runs downward
                    let mut derivs = Vec::with_capacity(k + 1);
                    for _ in 0..=k {
                        derivs.push(d.resize(r));
                        d = d.diff();
                    }
                    for m in 0..=k {
                        let w = sign * binomial(k, m);
                        out[m] = &out[m] + &(derivs[k - m].clone() * w);
                    }
                }
                out
            }),
        })
    }

    fn combine(&self, other: &LinearDiffOp, s: f64) -> Result<LinearDiffOp> {
        let domain = self.domain.intersect(&other.domain).ok_or_else(|| {
            Error::DomainMismatch(format!("{:?} and {:?} do not overlap", self.domain, other.domain))
        })?;
        let order = self.order.max(other.order);
        let (a, b) = (self.clone(), other.clone());
        Ok(LinearDiffOp {
            order,
            domain,
            max_jet: min_order(self.max_jet, other.max_jet),
            coeffs: Arc::new(move |x, r| {
                let mut out = vec![Jet::constant(0.0, r); order + 1];
                for (k, c) in (a.coeffs)(x, r).into_iter().enumerate() {
                    out[k] = &out[k] + &c;
                }
                for (k, c) in (b.coeffs)(x, r).into_iter().enumerate() {
                    out[k] = &out[k] + &(c * s);
                }
                out
            }),
        })
    }

    pub fn add(&self, other: &LinearDiffOp) -> Result<LinearDiffOp> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &LinearDiffOp) -> Result<LinearDiffOp> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, s: f64) -> LinearDiffOp {
        let a = self.clone();
        LinearDiffOp {
            coeffs: Arc::new(move |x, r| (a.coeffs)(x, r).into_iter().map(|c| c * s).collect()),
            ..self.clone()
        }
    }

    /// `self + λ·I`.
    pub fn shift(&self, lambda: f64) -> LinearDiffOp {
        let a = self.clone();
        LinearDiffOp {
            coeffs: Arc::new(move |x, r| {
                let mut c = (a.coeffs)(x, r);
                c[0] = c[0].clone() + lambda;
                c
            }),
            ..self.clone()
        }
    }

    /// `[self, other] = self∘other − other∘self`.
    pub fn commutator(&self, other: &LinearDiffOp) -> Result<LinearDiffOp> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// `c · Π_j (self − r_j)` for the given roots.
    pub fn polynomial(&self, roots: &[f64], c: f64) -> Result<LinearDiffOp> {
        let mut acc = LinearDiffOp::identity(self.domain).scale(c);
        for &r in roots {
            acc = self.shift(-r).compose(&acc)?;
        }
        Ok(acc)
    }

    /// Largest coefficient-wise gap between `self` and `other` at the sample points.
    pub fn coefficient_gap(&self, other: &LinearDiffOp, samples: &[f64]) -> f64 {
        let n = self.order.max(other.order);
        samples
            .iter()
            .map(|&x| {
                let a = self.coeffs_at(x);
                let b = other.coeffs_at(x);
                (0..=n)
                    .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Relative coefficient gap between `self` and its formal adjoint, or `None`
    /// if the adjoint is unavailable.
    pub fn self_adjoint_defect(&self, samples: &[f64]) -> Option<f64> {
        let adj = self.formal_adjoint().ok()?;
        let scale = samples
            .iter()
            .flat_map(|&x| self.coeffs_at(x))
            .fold(1.0_f64, |m, v| m.max(v.abs()));
        Some(self.coefficient_gap(&adj, samples) / scale)
    }

    /// Human-readable table of coefficient values at the sample points.
    pub fn coefficient_table(&self, samples: &[f64]) -> String {
        let mut s = String::from("x");
        for k in 0..=self.order {
            let _ = write!(s, "\tc{k}");
        }
        s.push('\n');
        for &x in samples {
            let _ = write!(s, "{x:.6}");
            for c in self.coeffs_at(x) {
                let _ = write!(s, "\t{c:.10e}");
            }
            s.push('\n');
        }
        s
    }
}
