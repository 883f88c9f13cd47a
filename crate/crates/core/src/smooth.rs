//! Smooth real functions with derivative access.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fd;
use crate::jet::Jet;

type JetFn = dyn Fn(f64, usize) -> Jet + Send + Sync;

/// A pure function of one real variable that can report its Taylor jet.
///
/// Analytic functions are built from closures over [`Jet`]s and supply every
/// derivative exactly. Plain `f64` closures get a central-difference fallback
/// capped at [`SmoothFn::FD_MAX_ORDER`].
#[derive(Clone)]
pub struct SmoothFn {
    f: Arc<JetFn>,
    max_order: Option<usize>,
}

impl fmt::Debug for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFn")
            .field("max_order", &self.max_order)
            .finish()
    }
}

impl SmoothFn {
    pub const FD_MAX_ORDER: usize = 4;

    /// Wraps a closure that receives the jet of the identity at `x` and
    /// returns the jet of the function.
    pub fn analytic(f: impl Fn(&Jet) -> Jet + Send + Sync + 'static) -> Self {
        SmoothFn {
            f: Arc::new(move |x, order| f(&Jet::variable(x, order))),
            max_order: None,
        }
    }

    /// Wraps a closure that directly produces jets of a given order at `x`.
    pub fn from_jets(f: impl Fn(f64, usize) -> Jet + Send + Sync + 'static, max_order: Option<usize>) -> Self {
        SmoothFn {
            f: Arc::new(f),
            max_order,
        }
    }

    pub fn constant(v: f64) -> Self {
        SmoothFn {
            f: Arc::new(move |_, order| Jet::constant(v, order)),
            max_order: None,
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn identity() -> Self {
        Self::analytic(|x| x.clone())
    }

    /// Derivatives by centred differences. The step for derivative `k` is
    /// `eps^(1/(k+2)) * scale`, i.e. `eps^(1/3) * scale` for the first derivative.
    pub fn finite_difference(f: impl Fn(f64) -> f64 + Send + Sync + 'static, scale: f64) -> Self {
        let f = Arc::new(f);
        let g = move |x: f64, order: usize| {
            let mut d = Vec::with_capacity(order + 1);
            d.push(f(x));
            for k in 1..=order {
                let h = f64::EPSILON.powf(1.0 / (k as f64 + 2.0)) * scale;
                let w = fd::central_weights(k);
                let r = fd::central_radius(k) as i64;
                let s: f64 = (-r..=r)
                    .zip(&w)
                    .map(|(i, wi)| wi * f(x + i as f64 * h))
                    .sum();
                d.push(s / h.powi(k as i32));
            }
            Jet::from_derivatives(&d)
        };
        SmoothFn {
            f: Arc::new(g),
            max_order: Some(Self::FD_MAX_ORDER),
        }
    }

    pub fn max_order(&self) -> Option<usize> {
        self.max_order
    }

    pub fn supports(&self, order: usize) -> bool {
        self.max_order.map_or(true, |m| order <= m)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x, 0).value()
    }

    /// Jet of order `order` at `x`.
    pub fn jet(&self, x: f64, order: usize) -> Result<Jet> {
        if let Some(m) = self.max_order {
            if order > m {
                return Err(Error::DerivativeUnavailable {
                    requested: order,
                    available: m,
                });
            }
        }
        Ok((self.f)(x, order))
    }

    /// Jet without the availability check; callers must have checked `supports`.
    pub(crate) fn jet_unchecked(&self, x: f64, order: usize) -> Jet {
        (self.f)(x, order)
    }

    pub fn derivative(&self, x: f64, k: usize) -> Result<f64> {
        Ok(self.jet(x, k)?.derivative(k))
    }

    /// Pointwise combination; the result supports the minimum available order.
    pub fn zip(&self, other: &SmoothFn, op: impl Fn(&Jet, &Jet) -> Jet + Send + Sync + 'static) -> SmoothFn {
        let (a, b) = (self.clone(), other.clone());
        SmoothFn {
            f: Arc::new(move |x, order| op(&a.jet_unchecked(x, order), &b.jet_unchecked(x, order))),
            max_order: min_order(self.max_order, other.max_order),
        }
    }

    pub fn map(&self, op: impl Fn(&Jet) -> Jet + Send + Sync + 'static) -> SmoothFn {
        let a = self.clone();
        SmoothFn {
            f: Arc::new(move |x, order| op(&a.jet_unchecked(x, order))),
            max_order: self.max_order,
        }
    }

    pub fn add(&self, other: &SmoothFn) -> SmoothFn {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SmoothFn) -> SmoothFn {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &SmoothFn) -> SmoothFn {
        self.zip(other, |a, b| a * b)
    }

    pub fn scale(&self, s: f64) -> SmoothFn {
        self.map(move |a| a.clone() * s)
    }

    pub fn offset(&self, s: f64) -> SmoothFn {
        self.map(move |a| a.clone() + s)
    }

    /// The derivative as a smooth function (one order of availability is consumed).
    pub fn derivative_fn(&self) -> SmoothFn {
        let a = self.clone();
        SmoothFn {
            f: Arc::new(move |x, order| a.jet_unchecked(x, order + 1).diff()),
            max_order: self.max_order.map(|m| m.saturating_sub(1)),
        }
    }
}

pub(crate) fn min_order(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn analytic_derivatives() {
        let f = SmoothFn::analytic(|x| (x * x).exp());
        let x0: f64 = 0.7;
        let e = (x0 * x0).exp();
        assert_relative_eq!(f.derivative(x0, 1).unwrap(), 2.0 * x0 * e, epsilon = 1e-13);
        assert_relative_eq!(f.derivative(x0, 2).unwrap(), (2.0 + 4.0 * x0 * x0) * e, epsilon = 1e-12);
    }

    #[test]
    fn finite_difference_fallback() {
        let f = SmoothFn::finite_difference(|x| x.sin(), 1.0);
        let x0: f64 = 0.4;
        assert!((f.derivative(x0, 1).unwrap() - x0.cos()).abs() < 1e-9);
        assert!((f.derivative(x0, 2).unwrap() + x0.sin()).abs() < 1e-6);
        assert!(matches!(f.jet(x0, 5), Err(Error::DerivativeUnavailable { .. })));
    }

    #[test]
    fn derivative_fn_consumes_order() {
        let f = SmoothFn::finite_difference(|x| x * x * x, 1.0);
        assert_eq!(f.derivative_fn().max_order(), Some(3));
        let g = SmoothFn::analytic(|x| x.powi(3)).derivative_fn();
        assert_relative_eq!(g.eval(2.0), 12.0, epsilon = 1e-14);
    }
}
