use std::collections::BTreeMap;

use proptest::prelude::*;
use superladder_core::algebra::{find_representations, StructureFunction};
use superladder_core::diffop::{bump_probes, Probe, GridSpec, LinearDiffOp};
use superladder_core::models::{ModelRegistry, ModelSpec};
use superladder_core::spectral::{classify_chains, eigensolve, EigenOptions, SpectrumReport1D};
use superladder_core::{Interval, Jet, SmoothFn};

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn falling(i: usize, m: usize) -> f64 {
    (0..m).map(|j| (i - j) as f64).product()
}

/// `p^{(m)}(x)` for `p = Σ c_i x^i`, straight from the power rule.
fn poly_deriv(c: &[f64], m: usize, x: f64) -> f64 {
    c.iter()
        .enumerate()
        .filter(|(i, _)| *i >= m)
        .map(|(i, ci)| ci * falling(i, m) * x.powi((i - m) as i32))
        .sum()
}

fn poly_jet(c: &[f64], x: &Jet) -> Jet {
    let mut out = Jet::constant(0.0, x.order());
    for ci in c.iter().rev() {
        out = &out * x + *ci;
    }
    out
}

fn poly_fn(c: Vec<f64>) -> SmoothFn {
    SmoothFn::analytic(move |x| poly_jet(&c, x))
}

fn poly_op(coeffs: &[Vec<f64>]) -> LinearDiffOp {
    LinearDiffOp::new(coeffs.iter().cloned().map(poly_fn).collect(), Interval::real_line())
}

fn coeff() -> impl Strategy<Value = f64> {
    -2.0..2.0f64
}

fn poly(deg: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(coeff(), deg + 1)
}

fn op2() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(poly(2), 3)
}

/// Trapezoid sum; exact to rounding for smooth integrands vanishing at both ends.
fn integrate(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (hi - lo) / n as f64;
    (1..n).map(|i| f(lo + i as f64 * h)).sum::<f64>() * h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jet_products_obey_leibniz(a in -1.5..1.5f64, c in poly(4), x0 in -1.0..1.0f64) {
        let order = 6;
        let x = Jet::variable(x0, order);
        let prod = &(&x * a).exp() * &poly_jet(&c, &x);
        for k in 0..=order {
            let expected: f64 = (0..=k)
                .map(|j| binom(k, j) * a.powi(j as i32) * (a * x0).exp() * poly_deriv(&c, k - j, x0))
                .sum();
            let scale = 1.0 + expected.abs();
            prop_assert!((prod.derivative(k) - expected).abs() < 1e-10 * scale * 10f64.powi(k as i32),
                "k={} {} vs {}", k, prod.derivative(k), expected);
        }
    }

    #[test]
    fn composition_matches_sequential_application(
        a in op2(), b in op2(), s in -1.0..1.0f64, x0 in -1.0..1.0f64,
    ) {
        let (a, b) = (poly_op(&a), poly_op(&b));
        let ab = a.compose(&b).unwrap();
        let f = (&Jet::variable(x0, 6) * s).exp();
        let bf = b.apply_jet_jet(x0, &f, 2).unwrap();
        let seq = a.apply_jet(x0, &bf);
        let direct = ab.apply_jet(x0, &f);
        prop_assert!((seq - direct).abs() < 1e-10 * (1.0 + seq.abs()), "{} vs {}", seq, direct);
    }

    #[test]
    fn adjoint_is_an_involution_and_pairs_correctly(l in op2(), j in 0usize..6) {
        let l = poly_op(&l);
        let adj = l.formal_adjoint().unwrap();
        let samples: Vec<f64> = (0..9).map(|i| -1.0 + 0.25 * i as f64).collect();
        prop_assert!(adj.formal_adjoint().unwrap().coefficient_gap(&l, &samples) < 1e-10);

        let probes = bump_probes(-1.0, 1.0, 8);
        let p = probes[j];
        let q = Probe { center: p.center + 0.3 * p.radius, mode: p.mode + 1, ..p };
        let lo = q.center - q.radius;
        let hi = p.center + p.radius;
        let n = 4000;
        let lhs = integrate(lo, hi, n, |x| p.value(x) * l.apply_jet(x, &q.jet(x, 2)));
        let rhs = integrate(lo, hi, n, |x| adj.apply_jet(x, &p.jet(x, 2)) * q.value(x));
        let scale = integrate(lo, hi, n, |x| (p.value(x) * l.apply_jet(x, &q.jet(x, 2))).abs());
        prop_assert!((lhs - rhs).abs() < 1e-8 * (scale + 1e-3), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn chains_partition_synthetic_spectra(
        spacing in 0.5..2.0f64,
        chains in prop::collection::vec((0.0..1.0f64, 1usize..6), 1..5),
    ) {
        // bottoms spread over one step so no two chains can merge
        let k = chains.len();
        let mut eigenvalues = Vec::new();
        let mut expected = Vec::new();
        for (c, (jitter, len)) in chains.iter().enumerate() {
            let bottom = spacing * (c as f64 + 0.1 + 0.5 * jitter / k as f64) / k as f64;
            expected.push(*len);
            eigenvalues.extend((0..*len).map(|n| bottom + n as f64 * spacing));
        }
        eigenvalues.sort_by(f64::total_cmp);
        let m = eigenvalues.len();
        let report = SpectrumReport1D {
            model: "synthetic".into(),
            params: BTreeMap::new(),
            hbar: 1.0,
            spacing,
            grid: GridSpec::new(0.0, 1.0, 200),
            eigenvalues: eigenvalues.clone(),
            errors: vec![0.0; m],
            orthonormality_defect: 0.0,
            x: Vec::new(),
            eigenfunctions: Vec::new(),
        };
        let d = classify_chains(&report, &[]);
        let mut seen = vec![0usize; m];
        for ch in &d.chains {
            for &l in &ch.levels {
                seen[l] += 1;
            }
            for w in ch.levels.windows(2) {
                prop_assert!((eigenvalues[w[1]] - eigenvalues[w[0]] - spacing).abs() < 1e-9);
            }
        }
        prop_assert!(seen.iter().all(|&s| s == 1));
        prop_assert!(d.ambiguous.is_empty());
        let mut got: Vec<usize> = d.chains.iter().map(|c| c.len()).collect();
        got.sort();
        expected.sort();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn structure_function_matches_its_definition(
        r1 in prop::collection::vec(-2.0..2.0f64, 1..4),
        r2 in prop::collection::vec(-2.0..2.0f64, 1..4),
        norms in (0.5..2.0f64, 0.5..2.0f64),
        n1 in 1u32..4, n2 in 1u32..4,
        w in (0.5..2.0f64, 0.5..2.0f64),
        k in -2.0..2.0f64, e in -3.0..3.0f64,
    ) {
        let phi = StructureFunction {
            q1_roots: r1.clone(), q1_norm: norms.0, q2_roots: r2.clone(), q2_norm: norms.1,
            n1, n2, w1: w.0, w2: w.1,
        };
        // monomial coefficients of each Q, evaluated by Horner
        let expand = |roots: &[f64], norm: f64| {
            let mut c = vec![norm];
            for r in roots {
                let mut next = vec![0.0; c.len() + 1];
                for (i, ci) in c.iter().enumerate() {
                    next[i + 1] += ci;
                    next[i] -= r * ci;
                }
                c = next;
            }
            c
        };
        let horner = |c: &[f64], h: f64| c.iter().rev().fold(0.0, |acc, ci| acc * h + ci);
        let (c1, c2) = (expand(&r1, norms.0), expand(&r2, norms.1));
        let mut direct = 1.0;
        for i in 1..=n1 {
            direct *= horner(&c1, e / 2.0 + n1 as f64 * w.0 * k - (n1 - i) as f64 * w.0);
        }
        for j in 1..=n2 {
            direct *= horner(&c2, e / 2.0 - n2 as f64 * w.1 * k + j as f64 * w.1);
        }
        let got = phi.eval_k(k, e);
        prop_assert!((got - direct).abs() < 1e-9 * (1.0 + direct.abs()), "{} vs {}", got, direct);
        prop_assert_eq!(phi.degree(), r1.len() * n1 as usize + r2.len() * n2 as usize);
        for b in phi.zero_branches() {
            let u = b.u(e);
            // a root: tiny next to nearby values, whatever its multiplicity
            let h = 1e-2;
            let near = phi.eval(0.0, u - h, e).abs().max(phi.eval(0.0, u + h, e).abs());
            prop_assert!(phi.eval(0.0, u, e).abs() <= 1e-6 * near, "{}", b.label);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn representation_search_is_deterministic(w1 in 0.5..2.0f64, w2 in 0.5..2.0f64, e_hi in 2.0..8.0f64) {
        let phi = StructureFunction {
            q1_roots: vec![0.5 * w1], q1_norm: 1.0, q2_roots: vec![0.5 * w2], q2_norm: 1.0,
            n1: 1, n2: 1, w1, w2,
        };
        let run = || serde_json::to_string(&find_representations(&phi, (0.0, e_hi), (-20.0, 20.0), 10)).unwrap();
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn eigensolve_is_deterministic(omega in 0.5..2.0f64) {
        let m = ModelRegistry::default()
            .build(&ModelSpec::new("harmonic", &[("hbar", 1.0), ("omega", omega)]))
            .unwrap();
        let grid = GridSpec::new(m.grid.lo, m.grid.hi, 300);
        let opts = EigenOptions { tol: 1e-2 };
        let a = eigensolve(&m, &grid, 4, &opts).unwrap();
        let b = eigensolve(&m, &grid, 4, &opts).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
