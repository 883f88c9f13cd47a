use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::dvr::sinc_matrix;
use super::{StructureFunction, Superintegrable2D, TensorOp};
use crate::diffop::GridSpec;
use crate::error::{Error, Result};
use crate::report::Check;

/// Largest grid per axis; the two-dimensional state space is at most `48²`.
pub const MAX_AXIS_POINTS: usize = 48;

/// Probe states per axis are the lowest `n / PROBE_FRACTION` levels; higher
/// ones are not resolved by a sinc grid this small.
pub const PROBE_FRACTION: usize = 8;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AlgebraTolerances {
    pub commutator: f64,
    pub product: f64,
    pub overlap: f64,
}

impl Default for AlgebraTolerances {
    fn default() -> Self {
        AlgebraTolerances {
            commutator: 1e-4,
            product: 1e-3,
            overlap: 0.99,
        }
    }
}

/// `⟨v, I₊I₋ v⟩` and `⟨v, I₋I₊ v⟩` on a product eigenstate against `Φ(K, H)` and `Φ(K+1, H)`.
#[derive(Clone, Debug, Serialize)]
pub struct ProductProbe {
    pub m: usize,
    pub n: usize,
    pub energy: f64,
    pub k: f64,
    pub plus_minus: [f64; 2],
    pub minus_plus: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraReport {
    pub grids: [GridSpec; 2],
    pub probe_levels: [usize; 2],
    pub checks: Vec<Check>,
    pub probes: Vec<ProductProbe>,
}

struct Discrete {
    terms: Vec<(f64, DMatrix<f64>, DMatrix<f64>)>,
}

impl Discrete {
    fn new(op: &TensorOp, grids: &[GridSpec; 2]) -> Result<Self> {
        let chain = |ops: &[crate::diffop::LinearDiffOp], g: &GridSpec| -> Result<DMatrix<f64>> {
            let mut m = DMatrix::identity(g.n, g.n);
            for o in ops {
                m *= sinc_matrix(o, g)?;
            }
            Ok(m)
        };
        let terms = op
            .terms
            .iter()
            .map(|t| Ok((t.coeff, chain(&t.x, &grids[0])?, chain(&t.y, &grids[1])?)))
            .collect::<Result<_>>()?;
        Ok(Discrete { terms })
    }

    /// `Σ c · Mx X Myᵀ`, with `X[i][j]` the value at `(x_i, y_j)`.
    fn apply(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for (c, mx, my) in &self.terms {
            out += (mx * x * my.transpose()) * *c;
        }
        out
    }
}

fn eigenpairs(m: &DMatrix<f64>) -> Vec<(f64, nalgebra::DVector<f64>)> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut pairs: Vec<(f64, nalgebra::DVector<f64>)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(e, v)| (*e, v.into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Discrete residuals of `[K, I±] = ±I±` and of the products `I₊I₋ = Φ(K, H)`,
/// `I₋I₊ = Φ(K+1, H)` on a sinc-collocation tensor grid.
///
/// Probes are the product eigenstates of the lowest eighth of each axis'
/// discrete spectrum and seeded superpositions of them, so every probe is
/// resolved well inside the grid.
pub fn algebra_residuals(
    sys: &Superintegrable2D,
    phi: &StructureFunction,
    grids: [GridSpec; 2],
    tol: &AlgebraTolerances,
    seed: u64,
) -> Result<AlgebraReport> {
    for g in &grids {
        if g.n > MAX_AXIS_POINTS {
            return Err(Error::MemoryCap {
                points: grids[0].n * grids[1].n,
                cap: MAX_AXIS_POINTS * MAX_AXIS_POINTS,
            });
        }
    }
    let [m1, m2] = &sys.factors;
    let k = Discrete::new(&sys.k, &grids)?;
    let ip = Discrete::new(&sys.i_plus, &grids)?;
    let im = Discrete::new(&sys.i_minus, &grids)?;
    let e1 = eigenpairs(&sinc_matrix(&m1.hamiltonian(), &grids[0])?);
    let e2 = eigenpairs(&sinc_matrix(&m2.hamiltonian(), &grids[1])?);
    let levels = [(grids[0].n / PROBE_FRACTION).max(2), (grids[1].n / PROBE_FRACTION).max(2)];
    let product = |a: usize, b: usize| &e1[a].1 * e2[b].1.transpose();
    let dot = |a: &DMatrix<f64>, b: &DMatrix<f64>| a.dot(b);

    let mut probes_v: Vec<DMatrix<f64>> = Vec::new();
    for a in 0..levels[0] {
        for b in 0..levels[1] {
            probes_v.push(product(a, b));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        let mut v = DMatrix::zeros(grids[0].n, grids[1].n);
        for a in 0..levels[0] {
            for b in 0..levels[1] {
                v += product(a, b) * rng.gen_range(-1.0..1.0);
            }
        }
        let nrm = v.norm();
        probes_v.push(v / nrm);
    }
    let (mut up, mut down) = (0.0_f64, 0.0_f64);
    for v in &probes_v {
        let pv = ip.apply(v);
        let mv = im.apply(v);
        let r_up = k.apply(&pv) - ip.apply(&k.apply(v)) - &pv;
        let r_down = k.apply(&mv) - im.apply(&k.apply(v)) + &mv;
        up = up.max(r_up.norm() / v.norm());
        down = down.max(r_down.norm() / v.norm());
    }

    let mut probes = Vec::new();
    let mut overlap_min = 1.0_f64;
    let (w1, w2) = (m1.spacing * sys.n1 as f64, m2.spacing * sys.n2 as f64);
    for a in 0..levels[0] {
        for b in 0..levels[1] {
            let v = product(a, b);
            let (ea, eb) = (e1[a].0, e2[b].0);
            let kv = (ea - eb) / (2.0 * sys.lambda);
            let pm = dot(&v, &ip.apply(&im.apply(&v)));
            let mp = dot(&v, &im.apply(&ip.apply(&v)));
            probes.push(ProductProbe {
                m: a,
                n: b,
                energy: ea + eb,
                k: kv,
                plus_minus: [pm, phi.eval_k(kv, ea + eb)],
                minus_plus: [mp, phi.eval_k(kv + 1.0, ea + eb)],
            });
            // I₊ moves (E₁, E₂) to (E₁ + n₁ħω₁, E₂ − n₂ħω₂)
            let target_a = (0..levels[0]).find(|&t| (e1[t].0 - ea - w1).abs() < 1e-3);
            let target_b = (0..levels[1]).find(|&t| (e2[t].0 - eb + w2).abs() < 1e-3);
            if let (Some(ta), Some(tb)) = (target_a, target_b) {
                let pv = ip.apply(&v);
                if pv.norm() > 1e-8 {
                    overlap_min = overlap_min.min(dot(&product(ta, tb), &pv).abs() / pv.norm());
                }
            }
        }
    }
    let scale = probes
        .iter()
        .flat_map(|p| [p.plus_minus[1].abs(), p.minus_plus[1].abs()])
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let rel = |[obs, pred]: [f64; 2]| {
        if pred.abs() > 1e-8 * scale {
            (obs - pred).abs() / pred.abs()
        } else {
            (obs - pred).abs() / scale
        }
    };
    let pm_err = probes.iter().map(|p| rel(p.plus_minus)).fold(0.0, f64::max);
    let mp_err = probes.iter().map(|p| rel(p.minus_plus)).fold(0.0, f64::max);
    Ok(AlgebraReport {
        grids,
        probe_levels: levels,
        checks: vec![
            Check::new("k_raising_commutator", up, tol.commutator),
            Check::new("k_lowering_commutator", down, tol.commutator),
            Check::new("plus_minus_product", pm_err, tol.product),
            Check::new("minus_plus_product", mp_err, tol.product),
            Check::new("raising_overlap", 1.0 - overlap_min, 1.0 - tol.overlap),
        ],
        probes,
    })
}
