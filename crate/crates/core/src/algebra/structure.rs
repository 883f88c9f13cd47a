use rayon::prelude::*;
use serde::Serialize;

use super::Superintegrable2D;

/// `Φ(N, u, E) = Π_{i=1}^{n₁} Q₁(E/2 + n₁ω₁(N+u) − (n₁−i)ω₁) · Π_{j=1}^{n₂} Q₂(E/2 − n₂ω₂(N+u) + jω₂)`,
/// with `ω_i` standing for the ladder steps `ħω_i`.
#[derive(Clone, Debug, Serialize)]
pub struct StructureFunction {
    pub q1_roots: Vec<f64>,
    pub q1_norm: f64,
    pub q2_roots: Vec<f64>,
    pub q2_norm: f64,
    pub n1: u32,
    pub n2: u32,
    pub w1: f64,
    pub w2: f64,
}

fn q(roots: &[f64], norm: f64, h: f64) -> f64 {
    norm * roots.iter().map(|r| h - r).product::<f64>()
}

impl StructureFunction {
    pub fn new(sys: &Superintegrable2D) -> Self {
        let [m1, m2] = &sys.factors;
        StructureFunction {
            q1_roots: m1.q_roots.clone(),
            q1_norm: m1.q_norm,
            q2_roots: m2.q_roots.clone(),
            q2_norm: m2.q_norm,
            n1: sys.n1,
            n2: sys.n2,
            w1: m1.spacing,
            w2: m2.spacing,
        }
    }

    /// Copy with replaced normalization constants.
    pub fn with_norms(&self, q1_norm: f64, q2_norm: f64) -> Self {
        StructureFunction {
            q1_norm,
            q2_norm,
            ..self.clone()
        }
    }

    /// Degree in `N`.
    pub fn degree(&self) -> usize {
        self.q1_roots.len() * self.n1 as usize + self.q2_roots.len() * self.n2 as usize
    }

    /// `Φ` with `K = N + u` already combined.
    pub fn eval_k(&self, k: f64, e: f64) -> f64 {
        let (n1, n2) = (self.n1 as f64, self.n2 as f64);
        let a: f64 = (1..=self.n1)
            .map(|i| q(&self.q1_roots, self.q1_norm, e / 2.0 + n1 * self.w1 * k - (n1 - i as f64) * self.w1))
            .product();
        let b: f64 = (1..=self.n2)
            .map(|j| q(&self.q2_roots, self.q2_norm, e / 2.0 - n2 * self.w2 * k + j as f64 * self.w2))
            .product();
        a * b
    }

    pub fn eval(&self, n: f64, u: f64, e: f64) -> f64 {
        self.eval_k(n + u, e)
    }

    /// Every linear branch `u(E)` on which `Φ(0, u, E)` vanishes through one factor.
    pub fn zero_branches(&self) -> Vec<Branch> {
        let (n1, n2) = (self.n1 as f64, self.n2 as f64);
        let mut out = Vec::new();
        for i in 1..=self.n1 {
            for (k, r) in self.q1_roots.iter().enumerate() {
                // E/2 + n₁ω₁u − (n₁−i)ω₁ = r
                out.push(Branch {
                    label: format!("q1[{k}] i={i}"),
                    offset: (r + (n1 - i as f64) * self.w1) / (n1 * self.w1),
                    slope: -0.5 / (n1 * self.w1),
                });
            }
        }
        for j in 1..=self.n2 {
            for (k, r) in self.q2_roots.iter().enumerate() {
                // E/2 − n₂ω₂u + jω₂ = r
                out.push(Branch {
                    label: format!("q2[{k}] j={j}"),
                    offset: (j as f64 * self.w2 - r) / (n2 * self.w2),
                    slope: 0.5 / (n2 * self.w2),
                });
            }
        }
        out
    }
}

/// `u = offset + slope·E`.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub label: String,
    pub offset: f64,
    pub slope: f64,
}

impl Branch {
    pub fn u(&self, e: f64) -> f64 {
        self.offset + self.slope * e
    }
}

/// A `(p+1)`-dimensional unitary module.
#[derive(Clone, Debug, Serialize)]
pub struct Representation {
    pub branch: String,
    pub u: f64,
    pub energy: f64,
    pub p: usize,
    pub dimension: usize,
    /// `|Φ(0)|` and `|Φ(p+1)|`, relative to the scale of `Φ` near the solution.
    pub residual: f64,
    /// `min_{1≤n≤p} Φ(n)`, `+∞` when `p = 0`.
    pub min_positive: f64,
}

const SCAN: usize = 4000;
/// Deduplication tolerance on `(u, E)`.
pub const DEDUP_TOL: f64 = 1e-8;

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..200 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Roots of `f` on `[lo, hi]`: sign changes plus touching zeros.
fn roots_on(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let xs: Vec<f64> = (0..=SCAN).map(|i| lo + (hi - lo) * i as f64 / SCAN as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let scale = ys.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for i in 0..SCAN {
        if ys[i] == 0.0 {
            out.push(xs[i]);
        } else if ys[i] * ys[i + 1] < 0.0 {
            out.push(bisect(&f, xs[i], xs[i + 1]));
        } else if i > 0 && ys[i].abs() < ys[i - 1].abs() && ys[i].abs() < ys[i + 1].abs() && ys[i].abs() < 1e-6 * scale {
            let x = golden_min(&|x| f(x).abs(), xs[i - 1], xs[i + 1]);
            if f(x).abs() < 1e-12 * scale {
                out.push(x);
            }
        }
    }
    if ys[SCAN] == 0.0 {
        out.push(xs[SCAN]);
    }
    out
}

/// Finite-dimensional unitary modules: `Φ(0) = Φ(p+1) = 0`, `Φ(n) > 0` for `1 ≤ n ≤ p`.
pub fn find_representations(phi: &StructureFunction, e_range: (f64, f64), u_range: (f64, f64), p_max: usize) -> Vec<Representation> {
    let p_max = p_max.min(64);
    if !(e_range.1 > e_range.0) {
        return Vec::new();
    }
    let branches = phi.zero_branches();
    let cells: Vec<(usize, usize)> = (0..branches.len()).flat_map(|b| (0..=p_max).map(move |p| (b, p))).collect();
    let mut found: Vec<Representation> = cells
        .par_iter()
        .flat_map_iter(|&(b, p)| {
            let br = &branches[b];
            let f = |e: f64| phi.eval((p + 1) as f64, br.u(e), e);
            roots_on(f, e_range.0, e_range.1)
                .into_iter()
                .filter_map(|e| {
                    let u = br.u(e);
                    if u < u_range.0 || u > u_range.1 {
                        return None;
                    }
                    let local = |n: f64| phi.eval(n, u, e).abs();
                    let scale = (0..=p + 1).map(|n| local(n as f64)).fold(0.0, f64::max).max(1.0);
                    let residual = local(0.0).max(local((p + 1) as f64)) / scale;
                    let min_positive = (1..=p).map(|n| phi.eval(n as f64, u, e)).fold(f64::INFINITY, f64::min);
                    (min_positive > 1e-9 * scale && residual < 1e-8).then(|| Representation {
                        branch: br.label.clone(),
                        u,
                        energy: e,
                        p,
                        dimension: p + 1,
                        residual,
                        min_positive,
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.p.cmp(&b.p)).then(a.u.total_cmp(&b.u)));
    let mut out: Vec<Representation> = Vec::new();
    for r in found {
        if !out
            .iter()
            .any(|o| o.p == r.p && (o.u - r.u).abs() < DEDUP_TOL && (o.energy - r.energy).abs() < DEDUP_TOL)
        {
            out.push(r);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(n1: u32, n2: u32, w1: f64, w2: f64) -> StructureFunction {
        StructureFunction {
            q1_roots: vec![w1 / 2.0],
            q1_norm: 1.0,
            q2_roots: vec![w2 / 2.0],
            q2_norm: 1.0,
            n1,
            n2,
            w1,
            w2,
        }
    }

    #[test]
    fn isotropic_closed_form() {
        // with u = (1 − E)/2, Φ(N) = N(E − N)
        let phi = oscillator(1, 1, 1.0, 1.0);
        for (n, e) in [(0.0, 3.0), (1.0, 3.0), (2.5, 4.0), (1.0, 0.7)] {
            let u = 0.5 - e / 2.0;
            assert!((phi.eval(n, u, e) - n * (e - n)).abs() < 1e-12);
        }
    }

    #[test]
    fn roots_include_double_zeros() {
        let r = roots_on(|x| (x - 0.3) * (x - 0.3) * (x + 0.5), -1.0, 1.0);
        assert_eq!(r.len(), 2, "{r:?}");
        assert!((r[0] + 0.5).abs() < 1e-12 && (r[1] - 0.3).abs() < 1e-6);
    }

    #[test]
    fn empty_range_gives_nothing() {
        assert!(find_representations(&oscillator(1, 1, 1.0, 1.0), (2.0, 2.0), (-10.0, 10.0), 5).is_empty());
    }
}
