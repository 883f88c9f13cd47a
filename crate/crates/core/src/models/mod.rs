//! One-dimensional Hamiltonians with polynomial ladder algebras.

mod harmonic;
mod painleve4;
pub mod painleve5;
mod registry;
mod singular;
mod zero_modes;

pub use harmonic::Harmonic;
pub use painleve4::Painleve4;
pub use painleve5::{build_p5_ladder, build_p5_model, build_p5_supercharges, P5ModelParams, P5Solution, P5Supercharges, Painleve5};
pub use registry::{ModelBuilder, ModelRegistry, ModelSpec, Param};
pub use singular::{SingularOscillator, CRITICAL_GAMMA};
pub use zero_modes::{build_zero_modes, ZeroMode, ZeroModeBranch, ZeroModeKind};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::diffop::{residual_norm, GridSpec, LinearDiffOp};
use crate::error::Result;
use crate::interval::Interval;
use crate::report::Check;
use crate::smooth::SmoothFn;

pub(crate) const PROBES: usize = 12;

type BranchFn = dyn Fn(ZeroModeKind) -> Vec<ZeroModeBranch> + Send + Sync;

/// Tolerances applied when a model certifies its own ladder algebra.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LadderTolerances {
    pub commutator: f64,
    pub adjoint: f64,
    pub product: f64,
}

impl Default for LadderTolerances {
    fn default() -> Self {
        LadderTolerances {
            commutator: 1e-5,
            adjoint: 1e-10,
            product: 1e-4,
        }
    }
}

/// `H = −ħ²/2 D² + V` with ladder operators `[H, A†] = spacing · A†` and
/// `A†A = q_norm · Π_j (H − ε_j)`.
#[derive(Clone)]
pub struct PotentialModel1D {
    pub tag: String,
    pub params: BTreeMap<String, f64>,
    pub v: SmoothFn,
    pub domain: Interval,
    pub hbar: f64,
    pub omega: f64,
    /// Energy step of the ladder.
    pub spacing: f64,
    pub ladder_order: usize,
    pub a: LinearDiffOp,
    pub a_dag: LinearDiffOp,
    pub q_roots: Vec<f64>,
    pub q_norm: f64,
    /// Constant subtracted from the construction's natural potential.
    pub energy_shift: f64,
    /// `γ` in `V ≈ ħ²γ/x²` when the domain ends at the singular point `x = 0`.
    pub inverse_square: Option<f64>,
    pub grid: GridSpec,
    pub checks: Vec<Check>,
    branches: Option<Arc<BranchFn>>,
}

impl std::fmt::Debug for PotentialModel1D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PotentialModel1D")
            .field("tag", &self.tag)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("ladder_order", &self.ladder_order)
            .field("q_roots", &self.q_roots)
            .finish()
    }
}

impl PotentialModel1D {
    pub fn hamiltonian(&self) -> LinearDiffOp {
        LinearDiffOp::schrodinger(self.v.clone(), self.hbar, self.domain)
    }

    /// `q_norm · Π (E − ε_j)`.
    pub fn q(&self, e: f64) -> f64 {
        self.q_norm * self.q_roots.iter().map(|r| e - r).product::<f64>()
    }

    pub fn has_zero_modes(&self) -> bool {
        self.branches.is_some()
    }

    pub fn zero_mode_branches(&self, kind: ZeroModeKind) -> Vec<ZeroModeBranch> {
        self.branches.as_ref().map(|f| f(kind)).unwrap_or_default()
    }

    pub(crate) fn with_branches(mut self, f: impl Fn(ZeroModeKind) -> Vec<ZeroModeBranch> + Send + Sync + 'static) -> Self {
        self.branches = Some(Arc::new(f));
        self
    }

    /// Ladder identities as operator residuals on `grid`.
    pub fn ladder_checks(&self, grid: &GridSpec, tol: &LadderTolerances) -> Vec<Check> {
        let h = self.hamiltonian();
        let comm = h
            .commutator(&self.a_dag)
            .and_then(|c| c.sub(&self.a_dag.scale(self.spacing)));
        let comm_down = h
            .commutator(&self.a)
            .and_then(|c| c.add(&self.a.scale(self.spacing)));
        let samples: Vec<f64> = grid.points().iter().step_by((grid.n / 64).max(1)).copied().collect();
        let adj = self.a_dag.formal_adjoint().map(|ad| {
            let scale = samples
                .iter()
                .flat_map(|&x| self.a.coeffs_at(x))
                .fold(1.0_f64, |m, v| m.max(v.abs()));
            ad.coefficient_gap(&self.a, &samples) / scale
        });
        // relative to the size of Q(H): high-order terms dominate the absolute residual
        let product = self.a_dag.compose(&self.a).and_then(|p| {
            let q = h.polynomial(&self.q_roots, self.q_norm)?;
            Ok((p.sub(&q)?, residual_norm(&q, grid, PROBES).max(1.0)))
        });
        let op = |name: &str, r: Result<LinearDiffOp>, t: f64| match r {
            Ok(x) => Check::new(name, residual_norm(&x, grid, PROBES), t),
            Err(_) => Check::failed(name, t),
        };
        vec![
            op("raising_commutator", comm, tol.commutator),
            op("lowering_commutator", comm_down, tol.commutator),
            match adj {
                Ok(g) => Check::new("adjointness", g, tol.adjoint),
                Err(_) => Check::failed("adjointness", tol.adjoint),
            },
            match product {
                Ok((d, scale)) => Check::new("product_identity", residual_norm(&d, grid, PROBES) / scale, tol.product),
                Err(_) => Check::failed("product_identity", tol.product),
            },
        ]
    }

    pub fn summary(&self, samples: usize) -> ModelRecord {
        let pts = self.grid.points();
        let step = (pts.len() / samples.max(1)).max(1);
        let x: Vec<f64> = pts.iter().step_by(step).copied().collect();
        ModelRecord {
            tag: self.tag.clone(),
            params: self.params.clone(),
            domain: self.domain,
            hbar: self.hbar,
            omega: self.omega,
            spacing: self.spacing,
            ladder_order: self.ladder_order,
            q_roots: self.q_roots.clone(),
            q_norm: self.q_norm,
            shift: self.energy_shift,
            v: x.iter().map(|&x| [x, self.v.eval(x)]).collect(),
            checks: self.checks.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelRecord {
    pub tag: String,
    pub params: BTreeMap<String, f64>,
    pub domain: Interval,
    pub hbar: f64,
    pub omega: f64,
    pub spacing: f64,
    pub ladder_order: usize,
    pub q_roots: Vec<f64>,
    pub q_norm: f64,
    pub shift: f64,
    pub v: Vec<[f64; 2]>,
    pub checks: Vec<Check>,
}

/// Builds `(A, A†)` from `A†` via the formal adjoint.
pub(crate) fn ladder_pair(a_dag: LinearDiffOp) -> Result<(LinearDiffOp, LinearDiffOp)> {
    let a = a_dag.formal_adjoint()?;
    Ok((a, a_dag))
}
