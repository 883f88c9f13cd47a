//! Two-dimensional superintegrable systems built from two one-dimensional
//! ladder models, their polynomial algebra and its unitary representations.
//!
//! Frequencies enter only through the ladder steps `ħω_i`, so `λ = n₁ħω₁ = n₂ħω₂`
//! is an energy and `K = (H₁ − H₂)/2λ` is dimensionless.

mod degeneracy;
mod dvr;
mod residuals;
mod structure;

pub use degeneracy::{verify_degeneracies, DegeneracyReport, DegeneracyRow};
pub use dvr::sinc_matrix;
pub use residuals::{algebra_residuals, AlgebraReport, AlgebraTolerances, ProductProbe, MAX_AXIS_POINTS};
pub use structure::{find_representations, Branch, Representation, StructureFunction, DEDUP_TOL};

use num_rational::BigRational;
use serde::Serialize;

use crate::diffop::LinearDiffOp;
use crate::error::{Error, Result};
use crate::models::PotentialModel1D;

/// `coeff · (x₁ ∘ x₂ ∘ …) ⊗ (y₁ ∘ y₂ ∘ …)`.
#[derive(Clone, Debug)]
pub struct TensorTerm {
    pub coeff: f64,
    pub x: Vec<LinearDiffOp>,
    pub y: Vec<LinearDiffOp>,
}

fn chain_order(ops: &[LinearDiffOp]) -> Result<usize> {
    match ops.split_first() {
        None => Ok(0),
        Some((first, rest)) => {
            let mut acc = first.clone();
            for op in rest {
                acc = acc.compose(op)?;
            }
            Ok(acc.order())
        }
    }
}

impl TensorTerm {
    /// Order of the composed two-variable operator.
    pub fn order(&self) -> Result<usize> {
        Ok(chain_order(&self.x)? + chain_order(&self.y)?)
    }
}

/// Finite sum of separable terms.
#[derive(Clone, Debug, Default)]
pub struct TensorOp {
    pub terms: Vec<TensorTerm>,
}

impl TensorOp {
    pub fn term(coeff: f64, x: Vec<LinearDiffOp>, y: Vec<LinearDiffOp>) -> Self {
        TensorOp {
            terms: vec![TensorTerm { coeff, x, y }],
        }
    }

    pub fn plus(&self, other: &TensorOp, sign: f64) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| TensorTerm {
            coeff: sign * t.coeff,
            ..t.clone()
        }));
        TensorOp { terms }
    }

    pub fn order(&self) -> Result<usize> {
        self.terms.iter().map(TensorTerm::order).try_fold(0, |m, o| o.map(|o| m.max(o)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralSummary {
    pub name: &'static str,
    pub order: usize,
}

#[derive(Clone, Debug)]
pub struct Superintegrable2D {
    pub factors: [PotentialModel1D; 2],
    pub n1: u32,
    pub n2: u32,
    /// `n₁ħω₁ = n₂ħω₂`.
    pub lambda: f64,
    pub hbar: f64,
    pub k: TensorOp,
    pub i_minus: TensorOp,
    pub i_plus: TensorOp,
}

impl Superintegrable2D {
    /// `I₁ = I₋ − I₊`.
    pub fn i1(&self) -> TensorOp {
        self.i_minus.plus(&self.i_plus, -1.0)
    }

    /// `I₂ = I₋ + I₊`.
    pub fn i2(&self) -> TensorOp {
        self.i_minus.plus(&self.i_plus, 1.0)
    }

    pub fn hamiltonian(&self) -> TensorOp {
        let [m1, m2] = &self.factors;
        TensorOp::term(1.0, vec![m1.hamiltonian()], vec![]).plus(&TensorOp::term(1.0, vec![], vec![m2.hamiltonian()]), 1.0)
    }

    pub fn integrals(&self) -> Result<Vec<IntegralSummary>> {
        Ok(vec![
            IntegralSummary {
                name: "K",
                order: self.k.order()?,
            },
            IntegralSummary {
                name: "I+",
                order: self.i_plus.order()?,
            },
            IntegralSummary {
                name: "I-",
                order: self.i_minus.order()?,
            },
            IntegralSummary {
                name: "I1",
                order: self.i1().order()?,
            },
            IntegralSummary {
                name: "I2",
                order: self.i2().order()?,
            },
        ])
    }

    /// `k₁n₁ + k₂n₂` from the ladder orders.
    pub fn expected_integral_order(&self) -> usize {
        self.factors[0].ladder_order * self.n1 as usize + self.factors[1].ladder_order * self.n2 as usize
    }
}

fn exact(v: f64) -> Result<BigRational> {
    BigRational::from_float(v).ok_or_else(|| Error::InvalidParameter(format!("{v} is not finite")))
}

/// Ladder step of `m` as an integer multiple of its declared `ħω`.
fn step_multiple(m: &PotentialModel1D) -> Result<u32> {
    let r = m.spacing / (m.hbar * m.omega);
    let k = r.round();
    if k < 1.0 || (r - k).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "ladder step {} of '{}' is not an integer multiple of ħω",
            m.spacing, m.tag
        )));
    }
    Ok(k as u32)
}

pub fn assemble_2d(m1: &PotentialModel1D, m2: &PotentialModel1D, n1: u32, n2: u32) -> Result<Superintegrable2D> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidParameter("n₁ and n₂ must be positive".into()));
    }
    if m1.hbar != m2.hbar {
        return Err(Error::InvalidParameter(format!("factors use different ħ ({} and {})", m1.hbar, m2.hbar)));
    }
    // n₁·k₁·ω₁ = n₂·k₂·ω₂ in exact arithmetic on the declared frequencies
    let (k1, k2) = (step_multiple(m1)?, step_multiple(m2)?);
    let lhs = exact(m1.omega)? * BigRational::from_integer((n1 * k1).into());
    let rhs = exact(m2.omega)? * BigRational::from_integer((n2 * k2).into());
    if lhs != rhs {
        return Err(Error::FrequencyMismatch {
            n1,
            w1: m1.omega,
            n2,
            w2: m2.omega,
        });
    }
    let lambda = n1 as f64 * m1.spacing;
    let pow = |op: &LinearDiffOp, n: u32| vec![op.clone(); n as usize];
    let k = TensorOp::term(0.5 / lambda, vec![m1.hamiltonian()], vec![]).plus(
        &TensorOp::term(0.5 / lambda, vec![], vec![m2.hamiltonian()]),
        -1.0,
    );
    let i_minus = TensorOp::term(1.0, pow(&m1.a, n1), pow(&m2.a_dag, n2));
    let i_plus = TensorOp::term(1.0, pow(&m1.a_dag, n1), pow(&m2.a, n2));
    Ok(Superintegrable2D {
        factors: [m1.clone(), m2.clone()],
        n1,
        n2,
        lambda,
        hbar: m1.hbar,
        k,
        i_minus,
        i_plus,
    })
}
