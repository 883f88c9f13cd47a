//! Sinc (Whittaker cardinal) collocation on a uniform grid.

use nalgebra::DMatrix;

use crate::diffop::{GridSpec, LinearDiffOp};
use crate::error::{Error, Result};

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// `S^{(k)}(n)` for `S(t) = sin(πt)/(πt)` at integer `n`.
fn sinc_derivative(n: i64, k: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let mut c = vec![0.0; k + 1];
    if n == 0 {
        for (j, cj) in c.iter_mut().enumerate() {
            if j % 2 == 0 {
                let m = j / 2;
                *cj = (-1f64).powi(m as i32) * pi.powi(j as i32) / factorial(j + 1);
            }
        }
    } else {
        let nf = n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        // sin(π(n+s)) = (−1)^n sin(πs),  1/(π(n+s)) = Σ_j (−1)^j s^j / (π n^{j+1})
        let sin: Vec<f64> = (0..=k)
            .map(|j| {
                if j % 2 == 1 {
                    let m = (j - 1) / 2;
                    sign * (-1f64).powi(m as i32) * pi.powi(j as i32) / factorial(j)
                } else {
                    0.0
                }
            })
            .collect();
        let inv: Vec<f64> = (0..=k).map(|j| (-1f64).powi(j as i32) / (pi * nf.powi(j as i32 + 1))).collect();
        for (j, cj) in c.iter_mut().enumerate() {
            *cj = (0..=j).map(|i| sin[i] * inv[j - i]).sum();
        }
    }
    factorial(k) * c[k]
}

/// Dense collocation matrix of `op` on the interior points of `grid`.
pub fn sinc_matrix(op: &LinearDiffOp, grid: &GridSpec) -> Result<DMatrix<f64>> {
    let n = grid.n;
    let h = grid.h();
    let xs = grid.points();
    if !op.domain().contains(xs[0]) || !op.domain().contains(xs[n - 1]) {
        return Err(Error::DomainMismatch(format!(
            "grid [{}, {}] leaves operator domain {:?}",
            xs[0],
            xs[n - 1],
            op.domain()
        )));
    }
    let order = op.order();
    let table: Vec<Vec<f64>> = (0..=order)
        .map(|k| (0..n as i64).map(|d| sinc_derivative(d, k) / h.powi(k as i32)).collect())
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for (i, &x) in xs.iter().enumerate() {
        let c = op.coeffs_at(x);
        for (k, ck) in c.iter().enumerate() {
            if *ck == 0.0 {
                continue;
            }
            for j in 0..n {
                let d = i as i64 - j as i64;
                // S^{(k)} has parity (−1)^k
                let s = if d < 0 && k % 2 == 1 { -1.0 } else { 1.0 };
                m[(i, j)] += ck * s * table[k][d.unsigned_abs() as usize];
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_sinc_derivatives() {
        let pi = std::f64::consts::PI;
        assert!((sinc_derivative(0, 0) - 1.0).abs() < 1e-15);
        assert_eq!(sinc_derivative(3, 0).abs() < 1e-15, true);
        // S′(n) = (−1)^n / n,  S″(0) = −π²/3,  S″(n) = −2(−1)^n/n²
        for n in 1..5_i64 {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((sinc_derivative(n, 1) - s / n as f64).abs() < 1e-13);
            assert!((sinc_derivative(n, 2) + 2.0 * s / (n * n) as f64).abs() < 1e-13);
        }
        assert!((sinc_derivative(0, 2) + pi * pi / 3.0).abs() < 1e-13);
        assert!(sinc_derivative(0, 1).abs() < 1e-15);
    }
}
