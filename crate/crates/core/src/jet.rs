//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] stores the normalized Taylor coefficients `c[k] = f^(k)(x0) / k!`
//! of a function about some expansion point. Arithmetic on jets propagates
//! exact derivatives (up to rounding), which is how every coefficient function
//! in this crate supplies the high derivatives that operator composition needs.
//!
//! The [`Scalar`] trait lets formulas be written once and evaluated either on
//! plain `f64` values or on jets.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    /// Jet of a constant function, truncated at `order`.
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Jet { c }
    }

    /// Jet of the identity function `x ↦ x` expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    /// Builds a jet from normalized Taylor coefficients.
    pub fn from_taylor(c: Vec<f64>) -> Self {
        assert!(!c.is_empty(), "a jet needs at least a value");
        Jet { c }
    }

    /// Builds a jet from plain derivatives `f, f', f'', ...`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        assert!(!d.is_empty(), "a jet needs at least a value");
        let mut fact = 1.0;
        let c = d
            .iter()
            .enumerate()
            .map(|(k, v)| {
                if k > 0 {
                    fact *= k as f64;
                }
                v / fact
            })
            .collect();
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn taylor(&self) -> &[f64] {
        &self.c
    }

    /// The k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * factorial(k)
    }

    pub fn derivatives(&self) -> Vec<f64> {
        (0..self.c.len()).map(|k| self.derivative(k)).collect()
    }

    /// Jet of `f'`; the order drops by one (a zero-order jet differentiates to zero).
    pub fn diff(&self) -> Jet {
        if self.c.len() == 1 {
            return Jet { c: vec![0.0] };
        }
        let c = (1..self.c.len())
            .map(|k| k as f64 * self.c[k])
            .collect();
        Jet { c }
    }

    pub fn diff_n(&self, n: usize) -> Jet {
        let mut j = self.clone();
        for _ in 0..n {
            j = j.diff();
        }
        j
    }

    /// Antiderivative with value `c0` at the expansion point; order grows by one.
    pub fn integral(&self, c0: f64) -> Jet {
        let mut c = Vec::with_capacity(self.c.len() + 1);
        c.push(c0);
        for (k, v) in self.c.iter().enumerate() {
            c.push(v / (k + 1) as f64);
        }
        Jet { c }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let n = (order + 1).min(self.c.len());
        Jet {
            c: self.c[..n].to_vec(),
        }
    }

    /// Pads with zero coefficients (or truncates) to exactly `order`.
    pub fn resize(&self, order: usize) -> Jet {
        let mut c = self.c.clone();
        c.resize(order + 1, 0.0);
        Jet { c }
    }

    /// Value of the Taylor polynomial at offset `dx` from the expansion point.
    pub fn eval_offset(&self, dx: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &v| acc * dx + v)
    }

    /// Re-expands the Taylor polynomial about `x0 + dx`, keeping `order` terms.
    pub fn shift(&self, dx: f64, order: usize) -> Jet {
        let n = self.c.len();
        let keep = (order + 1).min(n);
        // Repeated synthetic division: coefficient k of p(x0+dx+t) in t.
        let mut work = self.c.clone();
        let mut out = Vec::with_capacity(keep);
        while out.len() < keep && !work.is_empty() {
            let m = work.len();
            let mut quot = vec![0.0; m - 1];
            let mut carry = 0.0;
            for i in (1..m).rev() {
                carry = carry * dx + work[i];
                quot[i - 1] = carry;
            }
            out.push(carry * dx + work[0]);
            work = quot;
        }
        out.resize(order + 1, 0.0);
        Jet { c: out }
    }

    /// Jet of `t ↦ f(s·t)` given the jet of `f` at `s·x0`.
    pub fn stretch(&self, s: f64) -> Jet {
        let mut p = 1.0;
        let c = self
            .c
            .iter()
            .map(|v| {
                let out = v * p;
                p *= s;
                out
            })
            .collect();
        Jet { c }
    }

    pub fn recip(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut r = vec![0.0; n];
        r[0] = 1.0 / a0;
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += self.c[j] * r[k - j];
            }
            r[k] = -s / a0;
        }
        Jet { c: r }
    }

    pub fn sqrt(&self) -> Jet {
        let n = self.c.len();
        let mut r = vec![0.0; n];
        r[0] = self.c[0].sqrt();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..k {
                s += r[j] * r[k - j];
            }
            r[k] = (self.c[k] - s) / (2.0 * r[0]);
        }
        Jet { c: r }
    }

    pub fn exp(&self) -> Jet {
        let n = self.c.len();
        let mut r = vec![0.0; n];
        r[0] = self.c[0].exp();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * r[k - j];
            }
            r[k] = s / k as f64;
        }
        Jet { c: r }
    }

    pub fn ln(&self) -> Jet {
        let n = self.c.len();
        let a0 = self.c[0];
        let mut r = vec![0.0; n];
        r[0] = a0.ln();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..k {
                s += j as f64 * r[j] * self.c[k - j];
            }
            r[k] = (self.c[k] - s / k as f64) / a0;
        }
        Jet { c: r }
    }

    pub fn powi(&self, n: i32) -> Jet {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Jet::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// `outer ∘ inner`, where `outer` is expanded about `inner.value()`.
    pub fn compose(outer: &Jet, inner: &Jet) -> Jet {
        let order = outer.order().min(inner.order());
        let mut t = inner.truncate(order);
        t.c[0] = 0.0;
        // Horner in jets.
        let mut acc = Jet::constant(outer.c[order], order);
        for k in (0..order).rev() {
            acc = &acc * &t;
            acc.c[0] += outer.c[k];
        }
        acc
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let n = self.c.len().min(other.c.len());
        Jet {
            c: (0..n).map(|k| f(self.c[k], other.c[k])).collect(),
        }
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, v| acc * v as f64)
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        let mut c = vec![0.0; n];
        for (i, &a) in self.c[..n].iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.c[..n - i].iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Jet { c }
    }
}

impl Div<&Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        let n = self.c.len().min(rhs.c.len());
        let b0 = rhs.c[0];
        let mut q = vec![0.0; n];
        for k in 0..n {
            let mut s = self.c[k];
            for j in 1..=k {
                s -= rhs.c[j] * q[k - j];
            }
            q[k] = s / b0;
        }
        Jet { c: q }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.c[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.c[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self.c.iter_mut().for_each(|v| *v *= rhs);
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(mut self, rhs: f64) -> Jet {
        self.c.iter_mut().for_each(|v| *v /= rhs);
        self
    }
}

macro_rules! ref_scalar_op {
    ($tr:ident, $m:ident) => {
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet {
                self.clone().$m(rhs)
            }
        }
    };
}

ref_scalar_op!(Add, add);
ref_scalar_op!(Sub, sub);
ref_scalar_op!(Mul, mul);
ref_scalar_op!(Div, div);

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        rhs.recip() * self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.c.iter_mut().for_each(|v| *v = -*v);
        self
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -self.clone()
    }
}

/// Numbers that closed-form formulas can be evaluated on: `f64` or [`Jet`].
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn value(&self) -> f64;
    /// A constant of the same shape as `self`.
    fn lift(&self, v: f64) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn recip(&self) -> Self {
        self.lift(1.0) / self.clone()
    }
    fn sq(&self) -> Self {
        self.clone() * self.clone()
    }
    fn powi(&self, n: i32) -> Self;
}

macro_rules! scalar_ref_op {
    ($tr:ident, $m:ident) => {
        impl $tr<&Jet> for f64 {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                self.$m(rhs.clone())
            }
        }
    };
}

scalar_ref_op!(Add, add);
scalar_ref_op!(Sub, sub);
scalar_ref_op!(Mul, mul);
scalar_ref_op!(Div, div);

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, v: f64) -> f64 {
        v
    }
    fn sqrt(&self) -> f64 {
        f64::sqrt(*self)
    }
    fn exp(&self) -> f64 {
        f64::exp(*self)
    }
    fn ln(&self) -> f64 {
        f64::ln(*self)
    }
    fn recip(&self) -> f64 {
        1.0 / *self
    }
    fn powi(&self, n: i32) -> f64 {
        f64::powi(*self, n)
    }
}

impl Scalar for Jet {
    fn value(&self) -> f64 {
        self.c[0]
    }
    fn lift(&self, v: f64) -> Jet {
        Jet::constant(v, self.order())
    }
    fn sqrt(&self) -> Jet {
        Jet::sqrt(self)
    }
    fn exp(&self) -> Jet {
        Jet::exp(self)
    }
    fn ln(&self) -> Jet {
        Jet::ln(self)
    }
    fn recip(&self) -> Jet {
        Jet::recip(self)
    }
    fn powi(&self, n: i32) -> Jet {
        Jet::powi(self, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_rule_matches_closed_form() {
        // f = x^2 * exp(x) at x0 = 0.3
        let x = Jet::variable(0.3, 5);
        let f = &(&x * &x) * &x.exp();
        let e = 0.3f64.exp();
        // d/dx (x^2 e^x) = (x^2 + 2x) e^x ; second: (x^2 + 4x + 2) e^x
        assert_relative_eq!(f.derivative(1), (0.09 + 0.6) * e, epsilon = 1e-14);
        assert_relative_eq!(f.derivative(2), (0.09 + 1.2 + 2.0) * e, epsilon = 1e-14);
    }

    #[test]
    fn division_and_recip_agree() {
        let x = Jet::variable(1.7, 6);
        let a = (&x * &x) + 1.0;
        let q = &x / &a;
        let r = &x * &a.recip();
        for k in 0..=6 {
            assert_relative_eq!(q.taylor()[k], r.taylor()[k], epsilon = 1e-14, max_relative = 1e-12);
        }
        // d/dx x/(1+x^2) = (1-x^2)/(1+x^2)^2
        let d = (1.0 - 1.7f64.powi(2)) / (1.0 + 1.7f64.powi(2)).powi(2);
        assert_relative_eq!(q.derivative(1), d, epsilon = 1e-14);
    }

    #[test]
    fn sqrt_ln_exp_round_trip() {
        let x = Jet::variable(2.5, 7);
        let s = x.sqrt();
        let back = &s * &s;
        let l = x.ln().exp();
        for k in 0..=7 {
            assert!((back.taylor()[k] - x.taylor()[k]).abs() < 1e-13);
            assert!((l.taylor()[k] - x.taylor()[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn shift_reexpands_polynomial() {
        // p(t) = 1 + 2t + 3t^2 about 0; re-expand about 0.5
        let p = Jet::from_taylor(vec![1.0, 2.0, 3.0]);
        let q = p.shift(0.5, 2);
        assert_relative_eq!(q.taylor()[0], 1.0 + 1.0 + 0.75, epsilon = 1e-15);
        assert_relative_eq!(q.taylor()[1], 2.0 + 3.0, epsilon = 1e-15);
        assert_relative_eq!(q.taylor()[2], 3.0, epsilon = 1e-15);
        assert_relative_eq!(p.eval_offset(0.5), 2.75, epsilon = 1e-15);
    }

    #[test]
    fn compose_chain_rule() {
        // sin-free check: exp(x^2) at x0 = 0.4 via composition of exp-jet with x^2 jet
        let x = Jet::variable(0.4, 4);
        let inner = &x * &x;
        let outer = Jet::variable(inner.value(), 4).exp();
        let direct = inner.exp();
        let composed = Jet::compose(&outer, &inner);
        for k in 0..=4 {
            assert_relative_eq!(composed.taylor()[k], direct.taylor()[k], epsilon = 1e-14);
        }
    }

    #[test]
    fn powi_negative() {
        let x = Jet::variable(1.3, 3);
        let a = x.powi(-2);
        assert_relative_eq!(a.derivative(1), -2.0 / 1.3f64.powi(3), epsilon = 1e-13);
    }
}
