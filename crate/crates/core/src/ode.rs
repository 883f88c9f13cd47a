//! Adaptive integration of scalar second-order ODEs `u'' = F(t, u, u')` with
//! a posteriori residual certification.
//!
//! Steps are taken with the Dormand–Prince 5(4) pair. At every accepted node the
//! local Taylor expansion of the solution is generated by jet recursion on `F`;
//! the piecewise Taylor polynomials (nearest node wins) form the dense output.
//! The certified residual is measured on that dense output by sampling, never
//! taken from the step controller.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::interval::Interval;
use crate::jet::{Jet, Scalar};

/// `u'' = rhs(t, u, u')`, generic so it can be evaluated on jets.
pub trait SecondOrderOde: Sync {
    fn rhs<T: Scalar>(&self, t: T, u: T, up: T) -> T;

    /// Distance of the state from the nearest excluded value (a pole of `F`).
    fn singular_distance(&self, t: f64, u: f64) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Trajectories stop this close to an excluded value.
    pub guard: f64,
    /// Dense-output residual above this truncates the trajectory.
    pub residual_tol: f64,
    pub taylor_order: usize,
    pub max_steps: usize,
    pub samples_per_interval: usize,
    pub random_samples: usize,
    pub seed: u64,
    /// Multiplier applied to the largest sampled residual.
    pub safety: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            rtol: 1e-12,
            atol: 1e-12,
            guard: 1e-3,
            residual_tol: 1e-9,
            taylor_order: 20,
            max_steps: 200_000,
            samples_per_interval: 8,
            random_samples: 1000,
            seed: 0x5eed,
            safety: 4.0,
        }
    }
}

/// Why integration stopped on one side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Stop {
    Reached,
    Guard { at: f64 },
    Residual { at: f64 },
    StepCollapse { at: f64 },
    StepLimit { at: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub left: Stop,
    pub right: Stop,
}

impl Truncation {
    pub fn complete() -> Self {
        Truncation {
            left: Stop::Reached,
            right: Stop::Reached,
        }
    }

    pub fn truncated(&self) -> bool {
        self.left != Stop::Reached || self.right != Stop::Reached
    }

    pub fn step_collapsed(&self) -> bool {
        matches!(self.left, Stop::StepCollapse { .. }) || matches!(self.right, Stop::StepCollapse { .. })
    }
}

/// Piecewise-Taylor dense output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    nodes: Vec<f64>,
    jets: Vec<Jet>,
    domain: Interval,
    residual_bound: f64,
    continuity_defect: f64,
    truncation: Truncation,
}

impl Trajectory {
    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    /// Largest mismatch between neighbouring Taylor pieces at their junctions.
    pub fn continuity_defect(&self) -> f64 {
        self.continuity_defect
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn nearest(&self, t: f64) -> usize {
        let i = self.nodes.partition_point(|&n| n < t);
        if i == 0 {
            0
        } else if i == self.nodes.len() {
            i - 1
        } else if t - self.nodes[i - 1] <= self.nodes[i] - t {
            i - 1
        } else {
            i
        }
    }

    /// Jet of order `order` of the dense output at `t`.
    pub fn jet(&self, t: f64, order: usize) -> Jet {
        let i = self.nearest(t);
        self.jets[i].shift(t - self.nodes[i], order)
    }

    pub fn eval(&self, t: f64) -> [f64; 3] {
        let j = self.jet(t, 2);
        [j.derivative(0), j.derivative(1), j.derivative(2)]
    }
}

/// Normalized Taylor coefficients of the solution through `(t0, u0, up0)`.
pub fn taylor_jet<E: SecondOrderOde>(eq: &E, t0: f64, u0: f64, up0: f64, order: usize) -> Jet {
    let mut c = vec![0.0; order + 1];
    c[0] = u0;
    if order >= 1 {
        c[1] = up0;
    }
    for k in 0..order.saturating_sub(1) {
        let u = Jet::from_taylor(c[..=k].to_vec());
        let up = Jet::from_taylor((0..=k).map(|j| (j + 1) as f64 * c[j + 1]).collect());
        let t = Jet::variable(t0, k);
        let f = eq.rhs(t, u, up);
        c[k + 2] = f.taylor()[k] / ((k + 1) * (k + 2)) as f64;
    }
    Jet::from_taylor(c)
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const BS: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One-directional sweep; returns the accepted nodes (excluding the start) and the stop reason.
fn sweep<const N: usize>(
    f: impl Fn(f64, [f64; N]) -> [f64; N],
    singular: impl Fn(f64, f64) -> f64,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &IntegrationOptions,
) -> (Vec<(f64, [f64; N])>, Stop) {
    let dir = (t_end - t0).signum();
    let span = (t_end - t0).abs();
    let mut out = Vec::new();
    if span == 0.0 {
        return (out, Stop::Reached);
    }
    let h_max = 0.1 * span;
    let mut h = (1e-3 * span).min(1e-2);
    let (mut t, mut y) = (t0, y0);
    let mut k1 = f(t, y);
    for _ in 0..opts.max_steps {
        let remaining = (t_end - t) * dir;
        if remaining <= 1e-14 * t_end.abs().max(1.0) {
            return (out, Stop::Reached);
        }
        h = h.min(remaining);
        if h < 1e-14 * t.abs().max(1.0) {
            return (out, Stop::StepCollapse { at: t });
        }
        let hs = h * dir;
        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        let mut finite = true;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..N {
                    ys[i] += hs * A[s][j] * kj[i];
                }
            }
            k[s] = f(t + C[s] * hs, ys);
            finite &= k[s].iter().all(|v| v.is_finite());
        }
        let mut yn = y;
        let mut err: f64 = 0.0;
        for i in 0..N {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for s in 0..7 {
                hi += B[s] * k[s][i];
                lo += BS[s] * k[s][i];
            }
            yn[i] = y[i] + hs * hi;
            let sc = opts.atol + opts.rtol * y[i].abs().max(yn[i].abs());
            err = err.max((hs * (hi - lo)).abs() / sc);
        }
        if !finite || !err.is_finite() {
            h *= 0.25;
            continue;
        }
        if err <= 1.0 {
            let tn = t + hs;
            if singular(tn, yn[0]) < opts.guard {
                return (out, Stop::Guard { at: tn });
            }
            t = tn;
            y = yn;
            k1 = k[6];
            out.push((t, y));
            h *= (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
        h = h.min(h_max);
    }
    (out, Stop::StepLimit { at: t })
}

/// Certifies a freshly built trajectory: walks outward from `start`, cutting at
/// the first interval whose dense-output residual or pole distance fails, then
/// samples the retained domain.
fn finish(
    mut traj: Trajectory,
    start: usize,
    mut stops: (Stop, Stop),
    resid: impl Fn(&Trajectory, f64) -> (f64, f64),
    opts: &IntegrationOptions,
) -> Trajectory {
    let bad = |r: (f64, f64)| !(r.0 <= opts.residual_tol) || r.1 < opts.guard;
    let s = opts.samples_per_interval.max(2);
    let check_interval = |tr: &Trajectory, i: usize| -> Option<f64> {
        let (a, b) = (tr.nodes[i], tr.nodes[i + 1]);
        let mut worst: f64 = 0.0;
        for j in 0..=s {
            let r = resid(tr, a + (b - a) * j as f64 / s as f64);
            if bad(r) {
                return None;
            }
            worst = worst.max(r.0);
        }
        Some(worst)
    };
    let mut worst: f64 = 0.0;
    let mut hi = start;
    while hi + 1 < traj.nodes.len() {
        match check_interval(&traj, hi) {
            Some(w) => worst = worst.max(w),
            None => {
                stops.1 = Stop::Residual { at: traj.nodes[hi] };
                break;
            }
        }
        hi += 1;
    }
    let mut lo = start;
    while lo > 0 {
        match check_interval(&traj, lo - 1) {
            Some(w) => worst = worst.max(w),
            None => {
                stops.0 = Stop::Residual { at: traj.nodes[lo] };
                break;
            }
        }
        lo -= 1;
    }
    traj.nodes = traj.nodes[lo..=hi].to_vec();
    traj.jets = traj.jets[lo..=hi].to_vec();
    traj.domain = Interval::new(traj.nodes[0], traj.nodes[traj.nodes.len() - 1]);
    traj.truncation = Truncation {
        left: stops.0,
        right: stops.1,
    };
    let mut defect: f64 = 0.0;
    for i in 0..traj.nodes.len().saturating_sub(1) {
        let mid = 0.5 * (traj.nodes[i] + traj.nodes[i + 1]);
        let a = traj.jets[i].shift(mid - traj.nodes[i], 1);
        let b = traj.jets[i + 1].shift(mid - traj.nodes[i + 1], 1);
        defect = defect
            .max((a.value() - b.value()).abs())
            .max((a.taylor()[1] - b.taylor()[1]).abs());
    }
    traj.continuity_defect = defect;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let d = traj.domain;
    if d.length() > 0.0 {
        for _ in 0..opts.random_samples {
            let t = rng.gen_range(d.lo..=d.hi);
            worst = worst.max(resid(&traj, t).0);
        }
    }
    traj.residual_bound = opts.safety * worst;
    traj
}

fn assemble<const N: usize>(
    left: Vec<(f64, [f64; N])>,
    origin: (f64, [f64; N]),
    right: Vec<(f64, [f64; N])>,
    jet: impl Fn(f64, [f64; N]) -> Jet,
) -> (Trajectory, usize) {
    let mut states: Vec<(f64, [f64; N])> = left.into_iter().rev().collect();
    let start = states.len();
    states.push(origin);
    states.extend(right);
    let jets: Vec<Jet> = states.iter().map(|(t, y)| jet(*t, *y)).collect();
    let nodes: Vec<f64> = states.iter().map(|s| s.0).collect();
    let traj = Trajectory {
        domain: Interval::new(nodes[0], nodes[nodes.len() - 1]),
        nodes,
        jets,
        residual_bound: 0.0,
        continuity_defect: 0.0,
        truncation: Truncation::complete(),
    };
    (traj, start)
}

/// Integrates from `(t0, u0, up0)` across `span` in both directions and certifies
/// the dense output.
pub fn integrate<E: SecondOrderOde>(
    eq: &E,
    t0: f64,
    u0: f64,
    up0: f64,
    span: Interval,
    opts: &IntegrationOptions,
) -> Trajectory {
    let f = |t: f64, y: [f64; 2]| [y[1], eq.rhs(t, y[0], y[1])];
    let sing = |t: f64, u: f64| eq.singular_distance(t, u);
    let (right, stop_r) = sweep(f, sing, t0, [u0, up0], span.hi, opts);
    let (left, stop_l) = sweep(f, sing, t0, [u0, up0], span.lo, opts);
    let order = opts.taylor_order;
    let (traj, start) = assemble(left, (t0, [u0, up0]), right, |t, y| taylor_jet(eq, t, y[0], y[1], order));
    let resid = |tr: &Trajectory, t: f64| -> (f64, f64) {
        let [u, up, upp] = tr.eval(t);
        ((upp - eq.rhs(t, u, up)).abs(), eq.singular_distance(t, u))
    };
    finish(traj, start, (stop_l, stop_r), resid, opts)
}

/// `u' = F(t, u)` where `F` may depend on externally supplied jets in `t`.
pub trait FirstOrderOde: Sync {
    fn rhs(&self, t: f64, u: f64) -> f64;

    /// Jet of `F(t, u(t))` about `t0`, given the jet of `u` about `t0`.
    fn rhs_jet(&self, t0: f64, u: &Jet) -> Jet;

    fn singular_distance(&self, t: f64, u: f64) -> f64;
}

pub fn taylor_jet_first_order<E: FirstOrderOde>(eq: &E, t0: f64, u0: f64, order: usize) -> Jet {
    let mut c = vec![0.0; order + 1];
    c[0] = u0;
    for k in 0..order {
        let u = Jet::from_taylor(c[..=k].to_vec());
        let f = eq.rhs_jet(t0, &u);
        c[k + 1] = f.taylor()[k] / (k + 1) as f64;
    }
    Jet::from_taylor(c)
}

pub fn integrate_first_order<E: FirstOrderOde>(
    eq: &E,
    t0: f64,
    u0: f64,
    span: Interval,
    opts: &IntegrationOptions,
) -> Trajectory {
    let f = |t: f64, y: [f64; 1]| [eq.rhs(t, y[0])];
    let sing = |t: f64, u: f64| eq.singular_distance(t, u);
    let (right, stop_r) = sweep(f, sing, t0, [u0], span.hi, opts);
    let (left, stop_l) = sweep(f, sing, t0, [u0], span.lo, opts);
    let order = opts.taylor_order;
    let (traj, start) = assemble(left, (t0, [u0]), right, |t, y| taylor_jet_first_order(eq, t, y[0], order));
    let resid = |tr: &Trajectory, t: f64| -> (f64, f64) {
        let j = tr.jet(t, 1);
        ((j.derivative(1) - eq.rhs(t, j.value())).abs(), eq.singular_distance(t, j.value()))
    };
    finish(traj, start, (stop_l, stop_r), resid, opts)
}

/// Largest sampled residual of `residual` over `n_uniform` equispaced and
/// `n_random` seeded random points of `domain`, times `safety`.
pub fn certify(
    domain: Interval,
    n_uniform: usize,
    n_random: usize,
    seed: u64,
    safety: f64,
    mut residual: impl FnMut(f64) -> f64,
) -> f64 {
    let mut worst: f64 = 0.0;
    if domain.length() <= 0.0 {
        return safety * residual(domain.lo).abs();
    }
    for i in 0..n_uniform.max(2) {
        let t = domain.lo + domain.length() * i as f64 / (n_uniform.max(2) - 1) as f64;
        worst = worst.max(residual(t).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_random {
        worst = worst.max(residual(rng.gen_range(domain.lo..=domain.hi)).abs());
    }
    safety * worst
}

#[cfg(test)]
mod tests {
    use super::*;

    /// u'' = −u
    struct Harmonic;
    impl SecondOrderOde for Harmonic {
        fn rhs<T: Scalar>(&self, _t: T, u: T, _up: T) -> T {
            -u
        }
        fn singular_distance(&self, _t: f64, _u: f64) -> f64 {
            f64::INFINITY
        }
    }

    /// u'' = 2u³ has the movable pole u = 1/(1 − t) through (0, 1, 1).
    struct Cubic;
    impl SecondOrderOde for Cubic {
        fn rhs<T: Scalar>(&self, _t: T, u: T, _up: T) -> T {
            u.clone() * u.clone() * u * 2.0
        }
        fn singular_distance(&self, _t: f64, u: f64) -> f64 {
            1.0 / u.abs().max(1e-300)
        }
    }

    #[test]
    fn taylor_jet_of_cosine() {
        let j = taylor_jet(&Harmonic, 0.0, 1.0, 0.0, 8);
        assert!((j.taylor()[2] + 0.5).abs() < 1e-15);
        assert!((j.taylor()[4] - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_trajectory_is_accurate_and_certified() {
        let tr = integrate(&Harmonic, 0.0, 1.0, 0.0, Interval::new(-3.0, 6.0), &IntegrationOptions::default());
        assert_eq!(tr.truncation(), Truncation::complete());
        for &t in &[-2.9, -0.3, 1.0, 4.4, 6.0] {
            let [u, up, _] = tr.eval(t);
            assert!((u - t.cos()).abs() < 1e-10, "{t}: {u}");
            assert!((up + t.sin()).abs() < 1e-10);
        }
        assert!(tr.residual_bound() < 1e-10);
    }

    #[test]
    fn movable_pole_truncates() {
        let opts = IntegrationOptions {
            guard: 1e-2,
            ..Default::default()
        };
        let tr = integrate(&Cubic, 0.0, 1.0, 1.0, Interval::new(-0.5, 2.0), &opts);
        assert!(tr.truncation().truncated());
        assert!(tr.domain().hi < 1.0);
        assert!(tr.domain().hi > 0.9);
        let t = 0.5 * tr.domain().hi;
        assert!((tr.eval(t)[0] - 1.0 / (1.0 - t)).abs() < 1e-8);
    }

    #[test]
    fn certify_takes_max() {
        let b = certify(Interval::new(0.0, 1.0), 11, 10, 1, 2.0, |t| t);
        assert!((b - 2.0).abs() < 1e-15);
    }
}
