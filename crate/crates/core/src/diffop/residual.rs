use super::{GridSpec, LinearDiffOp};
use crate::fd;
use crate::jet::Jet;

/// Smooth compactly supported test function
/// `exp(1 − 1/(1 − t²)) · m(t)`, `t = (x − center)/radius`, with a low-degree
/// polynomial modulation `m` selected by `mode`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probe {
    pub center: f64,
    pub radius: f64,
    pub mode: u8,
}

impl Probe {
    pub fn jet(&self, x: f64, order: usize) -> Jet {
        let t0 = (x - self.center) / self.radius;
        if t0.abs() >= 0.99 {
            return Jet::constant(0.0, order);
        }
        let t = Jet::variable(x, order);
        let t = (t - self.center) / self.radius;
        let s = 1.0 - &t * &t;
        let bump = (1.0 - s.recip()).exp();
        let m = match self.mode % 3 {
            0 => Jet::constant(1.0, order),
            1 => t.clone() + 0.5,
            _ => (&t * &t) * 1.5 - 0.5 + t.clone() * 0.3,
        };
        &bump * &m
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x, 0).value()
    }
}

/// Deterministic probes supported inside `[lo, hi]`.
pub fn bump_probes(lo: f64, hi: f64, count: usize) -> Vec<Probe> {
    let len = hi - lo;
    if len <= 0.0 {
        return Vec::new();
    }
    let phi = 0.618_033_988_749_894_8;
    let sqrt2 = std::f64::consts::SQRT_2 - 1.0;
    (0..count)
        .map(|j| {
            let a = ((j as f64 + 0.5) * phi).fract();
            let b = ((j as f64 + 0.5) * sqrt2).fract();
            let radius = 0.5 * len * (0.12 + 0.3 * a);
            let center = lo + radius + b * (len - 2.0 * radius);
            Probe {
                center,
                radius,
                mode: (j % 3) as u8,
            }
        })
        .collect()
}

/// `(L f)(x_i)` for a function known through its jets.
pub fn apply_on_grid(op: &LinearDiffOp, xs: &[f64], f: impl Fn(f64, usize) -> Jet) -> Vec<f64> {
    let k = op.order();
    xs.iter().map(|&x| op.apply_jet(x, &f(x, k))).collect()
}

/// Width of the boundary band excluded from probe supports.
pub(crate) fn boundary_band(op: &LinearDiffOp, grid: &GridSpec) -> f64 {
    let k = op.order();
    (fd::central_radius(k).max(1) * k.max(1)) as f64 * grid.h()
}

/// `max_f ‖X f‖₂ / ‖f‖₂` over deterministic bump probes, sampled on the grid.
///
/// `X f` is evaluated exactly from the coefficient values and the probe jets,
/// so an operator that vanishes identically yields rounding-level residuals.
pub fn residual_norm(op: &LinearDiffOp, grid: &GridSpec, probe_count: usize) -> f64 {
    let xs = grid.points();
    let band = boundary_band(op, grid);
    let (lo, hi) = (xs[0] + band, xs[xs.len() - 1] - band);
    let probes = bump_probes(lo, hi, probe_count);
    if probes.is_empty() {
        return 0.0;
    }
    let k = op.order();
    let mut num = vec![0.0; probes.len()];
    let mut den = vec![0.0; probes.len()];
    for &x in &xs {
        let mut coeffs = None;
        for (p, probe) in probes.iter().enumerate() {
            if (x - probe.center).abs() >= 0.99 * probe.radius {
                continue;
            }
            let c = coeffs.get_or_insert_with(|| op.coeffs_at_jets(x));
            let f = probe.jet(x, k);
            let v = LinearDiffOp::apply_with(c, &f);
            num[p] += v * v;
            den[p] += f.value() * f.value();
        }
    }
    num.iter()
        .zip(&den)
        .filter(|(_, d)| **d > 0.0)
        .map(|(n, d)| (n / d).sqrt())
        .fold(0.0, f64::max)
}

impl LinearDiffOp {
    pub(crate) fn coeffs_at_jets(&self, x: f64) -> Vec<Jet> {
        (self.coeffs)(x, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::smooth::SmoothFn;

    #[test]
    fn probes_stay_inside() {
        for p in bump_probes(-3.0, 5.0, 12) {
            assert!(p.center - p.radius >= -3.0 - 1e-12);
            assert!(p.center + p.radius <= 5.0 + 1e-12);
        }
    }

    #[test]
    fn zero_operator_has_zero_residual() {
        let l = LinearDiffOp::new(
            vec![SmoothFn::analytic(|x| x * x), SmoothFn::constant(1.0), SmoothFn::constant(-0.5)],
            Interval::real_line(),
        );
        let z = l.sub(&l).unwrap();
        assert!(residual_norm(&z, &GridSpec::new(-5.0, 5.0, 400), 8) < 1e-12);
    }

    #[test]
    fn identity_residual_is_one() {
        let id = LinearDiffOp::identity(Interval::real_line());
        let r = residual_norm(&id, &GridSpec::new(-5.0, 5.0, 400), 8);
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probe_jet_matches_finite_difference() {
        let p = Probe {
            center: 0.3,
            radius: 1.2,
            mode: 2,
        };
        let x = 0.55;
        let h = 1e-5;
        let fd = (p.value(x + h) - p.value(x - h)) / (2.0 * h);
        assert!((p.jet(x, 1).derivative(1) - fd).abs() < 1e-8);
    }
}
