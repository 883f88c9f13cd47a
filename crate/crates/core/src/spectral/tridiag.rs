//! Lowest eigenpairs of a symmetric tridiagonal matrix.

/// Number of eigenvalues strictly below `lambda` (Sturm sequence).
pub fn sturm_count(d: &[f64], e: &[f64], lambda: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let off = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - lambda - if i == 0 { 0.0 } else { off / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + lambda.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(d: &[f64], e: &[f64]) -> (f64, f64) {
    let n = d.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    (lo, hi)
}

/// The `k`-th smallest eigenvalue (zero-based) by bisection.
pub fn kth_eigenvalue(d: &[f64], e: &[f64], k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(d, e);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T − λ)x = b` by Gaussian elimination with partial pivoting.
fn shifted_solve(d: &[f64], e: &[f64], lambda: f64, b: &[f64]) -> Vec<f64> {
    let n = d.len();
    // rows carry (diag, sup1, sup2) after pivoting
    let mut a: Vec<[f64; 3]> = (0..n)
        .map(|i| [d[i] - lambda, if i + 1 < n { e[i] } else { 0.0 }, 0.0])
        .collect();
    let mut sub: Vec<f64> = (0..n).map(|i| if i > 0 { e[i - 1] } else { 0.0 }).collect();
    let mut rhs = b.to_vec();
    let tiny = f64::EPSILON * d.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    for i in 0..n.saturating_sub(1) {
        let l = sub[i + 1];
        if l.abs() > a[i][0].abs() {
            // swap rows i and i+1
            let below = [l, a[i + 1][0], a[i + 1][1]];
            let above = [a[i][0], a[i][1], a[i][2]];
            a[i] = below;
            rhs.swap(i, i + 1);
            let m = above[0] / below[0];
            a[i + 1] = [above[1] - m * below[1], above[2] - m * below[2], 0.0];
            rhs[i + 1] -= m * rhs[i];
        } else {
            if a[i][0] == 0.0 {
                a[i][0] = tiny;
            }
            let m = l / a[i][0];
            a[i + 1][0] -= m * a[i][1];
            a[i + 1][1] -= m * a[i][2];
            rhs[i + 1] -= m * rhs[i];
        }
        sub[i + 1] = 0.0;
    }
    if a[n - 1][0] == 0.0 {
        a[n - 1][0] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= a[i][1] * x[i + 1];
        }
        if i + 2 < n {
            s -= a[i][2] * x[i + 2];
        }
        x[i] = s / a[i][0];
    }
    x
}

fn normalize(v: &mut [f64]) {
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= s);
}

/// Eigenvector for an isolated eigenvalue by inverse iteration, Euclidean-normalized
/// with a positive first significant component.
pub fn eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    // deterministic start with no special symmetry
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_7).fract()).collect();
    normalize(&mut v);
    for _ in 0..4 {
        v = shifted_solve(d, e, lambda, &v);
        normalize(&mut v);
    }
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-3 * peak) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    v
}

/// Lowest `m` eigenpairs.
pub fn lowest(d: &[f64], e: &[f64], m: usize) -> Vec<(f64, Vec<f64>)> {
    (0..m.min(d.len()))
        .map(|k| {
            let l = kth_eigenvalue(d, e, k);
            (l, eigenvector(d, e, l))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Discrete Laplacian: eigenvalues 2 − 2cos(kπ/(n+1)).
    #[test]
    fn laplacian_spectrum() {
        let n = 50;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        for (k, (l, v)) in lowest(&d, &e, 5).into_iter().enumerate() {
            let th = (k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64;
            assert!((l - (2.0 - 2.0 * th.cos())).abs() < 1e-13);
            for (i, vi) in v.iter().enumerate() {
                let exact = ((i + 1) as f64 * th).sin() * (2.0 / (n + 1) as f64).sqrt();
                assert!((vi - exact).abs() < 1e-10, "{k} {i}");
            }
        }
    }

    #[test]
    fn pivoting_solve_matches_dense() {
        let d = [0.0, 1.0, -2.0, 3.0];
        let e = [5.0, 0.5, 4.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        let x = shifted_solve(&d, &e, 0.25, &b);
        for i in 0..4 {
            let mut r = (d[i] - 0.25) * x[i];
            if i > 0 {
                r += e[i - 1] * x[i - 1];
            }
            if i < 3 {
                r += e[i] * x[i + 1];
            }
            assert!((r - b[i]).abs() < 1e-12);
        }
    }
}
