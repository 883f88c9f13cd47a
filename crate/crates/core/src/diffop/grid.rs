use std::io::Write;

use serde::{Deserialize, Serialize};

use super::LinearDiffOp;
use crate::error::{Error, Result};
use crate::fd;

/// Uniform grid of `n` interior points on `(lo, hi)`; Dirichlet walls sit at
/// `lo` and `hi`, so `x_i = lo + i·h` for `i = 1..=n` with `h = (hi − lo)/(n + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, n: usize) -> Self {
        GridSpec { lo, hi, n }
    }

    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / (self.n + 1) as f64
    }

    /// Abscissa of interior point `i` (zero-based).
    pub fn x(&self, i: usize) -> f64 {
        self.lo + (i + 1) as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// The nested grid with half the spacing.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            n: 2 * self.n + 1,
            ..*self
        }
    }
}

/// Banded matrix acting on grid values; row `i` stores columns `i−w ..= i+w`.
#[derive(Clone, Debug)]
pub struct GridMatrix {
    spec: GridSpec,
    half_width: usize,
    band: Vec<f64>,
    asymmetry_before: f64,
    symmetrized: bool,
}

impl GridMatrix {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn grid(&self) -> Vec<f64> {
        self.spec.points()
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// Frobenius norm of `(M − Mᵀ)/2` before symmetrization.
    pub fn asymmetry_before(&self) -> f64 {
        self.asymmetry_before
    }

    /// Frobenius norm of `(M − Mᵀ)/2` of the stored matrix.
    pub fn asymmetry(&self) -> f64 {
        asymmetry_of(&self.band, self.spec.n, self.half_width)
    }

    fn idx(&self, i: usize, off: usize) -> usize {
        i * (2 * self.half_width + 1) + off
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let w = self.half_width;
        if j + w < i || j > i + w {
            return 0.0;
        }
        self.band[self.idx(i, j + w - i)]
    }

    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.spec.n;
        let w = self.half_width;
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(w);
                let hi = (i + w).min(n - 1);
                (lo..=hi).map(|j| self.get(i, j) * v[j]).sum()
            })
            .collect()
    }

    /// Diagonal and first off-diagonal, for tridiagonal (second-order) operators.
    pub fn tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.half_width > 1 || !self.symmetrized && self.asymmetry() > 0.0 {
            return None;
        }
        let n = self.spec.n;
        let d = (0..n).map(|i| self.get(i, i)).collect();
        let e = (0..n.saturating_sub(1)).map(|i| self.get(i, i + 1)).collect();
        Some((d, e))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.spec.n;
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Dense CSV dump with the abscissae as the first column.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let xs = self.grid();
        write!(out, "x")?;
        for j in 0..self.spec.n {
            write!(out, ",c{j}")?;
        }
        writeln!(out)?;
        for (i, x) in xs.iter().enumerate() {
            write!(out, "{x}")?;
            for j in 0..self.spec.n {
                write!(out, ",{}", self.get(i, j))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn asymmetry_of(band: &[f64], n: usize, w: usize) -> f64 {
    let width = 2 * w + 1;
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..=(i + w).min(n.saturating_sub(1)) {
            let a = band[i * width + (j + w - i)];
            let b = band[j * width + (i + w - j)];
            s += 2.0 * (0.5 * (a - b)).powi(2);
        }
    }
    s.sqrt()
}

/// Second-order centred finite differences with Dirichlet walls.
///
/// Formally self-adjoint operators are symmetrized as `(M + Mᵀ)/2`.
pub fn discretize(op: &LinearDiffOp, spec: &GridSpec) -> Result<GridMatrix> {
    let n = spec.n;
    let order = op.order();
    let w = (0..=order).map(fd::central_radius).max().unwrap_or(0);
    if 2 * w + 1 > n {
        return Err(Error::GridTooCoarse {
            width: 2 * w + 1,
            points: n,
        });
    }
    if !op.domain().contains(spec.x(0)) || !op.domain().contains(spec.x(n - 1)) {
        return Err(Error::DomainMismatch(format!(
            "grid [{}, {}] leaves operator domain {:?}",
            spec.x(0),
            spec.x(n - 1),
            op.domain()
        )));
    }
    let h = spec.h();
    let stencils: Vec<Vec<f64>> = (0..=order)
        .map(|k| {
            let hk = h.powi(k as i32);
            fd::central_weights(k).into_iter().map(|v| v / hk).collect()
        })
        .collect();
    let width = 2 * w + 1;
    let mut band = vec![0.0; n * width];
    for i in 0..n {
        let c = op.coeffs_at(spec.x(i));
        for (k, ck) in c.iter().enumerate() {
            if *ck == 0.0 {
                continue;
            }
            let r = fd::central_radius(k) as i64;
            for (s, wk) in (-r..=r).zip(&stencils[k]) {
                let j = i as i64 + s;
                if j < 0 || j >= n as i64 {
                    continue;
                }
                band[i * width + (j - i as i64 + w as i64) as usize] += ck * wk;
            }
        }
    }
    let asymmetry_before = asymmetry_of(&band, n, w);
    let samples: Vec<f64> = (0..16).map(|k| spec.x(k * (n - 1) / 15)).collect();
    let self_adjoint = op.self_adjoint_defect(&samples).is_some_and(|d| d < 1e-10);
    if self_adjoint {
        for i in 0..n {
            for j in (i + 1)..=(i + w).min(n - 1) {
                let a = i * width + (j + w - i);
                let b = j * width + (i + w - j);
                let m = 0.5 * (band[a] + band[b]);
                band[a] = m;
                band[b] = m;
            }
        }
    }
    Ok(GridMatrix {
        spec: *spec,
        half_width: w,
        band,
        asymmetry_before,
        symmetrized: self_adjoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::smooth::SmoothFn;

    #[test]
    fn grid_geometry() {
        let g = GridSpec::new(0.0, 1.0, 3);
        assert_eq!(g.points(), vec![0.25, 0.5, 0.75]);
        let r = g.refined();
        assert_eq!(r.n, 7);
        assert!((r.x(1) - g.x(0)).abs() < 1e-15);
    }

    #[test]
    fn laplacian_stencil() {
        let op = LinearDiffOp::derivative(2, Interval::real_line());
        let m = discretize(&op, &GridSpec::new(0.0, 1.0, 9)).unwrap();
        let h2 = 0.01;
        assert!((m.get(3, 3) + 2.0 / h2).abs() < 1e-9);
        assert!((m.get(3, 4) - 1.0 / h2).abs() < 1e-9);
        assert_eq!(m.get(0, 5), 0.0);
        assert!(m.symmetrized());
        assert!(m.asymmetry() < 1e-12);
    }

    #[test]
    fn coarse_grid_rejected() {
        let op = LinearDiffOp::derivative(4, Interval::real_line());
        let e = discretize(&op, &GridSpec::new(0.0, 1.0, 4));
        assert!(matches!(e, Err(Error::GridTooCoarse { width: 5, points: 4 })));
    }

    #[test]
    fn first_derivative_not_symmetrized() {
        let op = LinearDiffOp::new(vec![SmoothFn::zero(), SmoothFn::identity()], Interval::real_line());
        let m = discretize(&op, &GridSpec::new(0.0, 1.0, 20)).unwrap();
        assert!(!m.symmetrized());
        assert!(m.asymmetry() > 0.0);
    }

    #[test]
    fn csv_export_shape() {
        let op = LinearDiffOp::derivative(2, Interval::real_line());
        let m = discretize(&op, &GridSpec::new(0.0, 1.0, 4)).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("x,c0,c1,c2,c3"));
    }
}
