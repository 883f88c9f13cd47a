//! Finite-difference weights.

/// Fornberg's algorithm: weights `w[k][j]` such that
/// `f^(k)(z) ≈ Σ_j w[k][j] f(x[j])` for `k = 0..=m`.
pub fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Symmetric stencil radius giving second-order accuracy for derivative `k`.
pub fn central_radius(k: usize) -> usize {
    if k == 0 {
        0
    } else {
        (k + 1) / 2
    }
}

/// Weights of the centred second-order stencil for derivative `k` on unit spacing,
/// indexed by offset `-r..=r`.
pub fn central_weights(k: usize) -> Vec<f64> {
    let r = central_radius(k) as i64;
    let pts: Vec<f64> = (-r..=r).map(|i| i as f64).collect();
    fornberg(0.0, &pts, k).swap_remove(k)
}
