use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use superladder_core::algebra::*;
use superladder_core::diffop::GridSpec;
use superladder_core::models::*;
use superladder_core::spectral::{eigensolve, EigenOptions};
use superladder_core::Error;

fn harmonic(hbar: f64, omega: f64) -> PotentialModel1D {
    ModelRegistry::default()
        .build(&ModelSpec::new("harmonic", &[("hbar", hbar), ("omega", omega)]))
        .unwrap()
}

fn degenerate_p5() -> PotentialModel1D {
    ModelRegistry::default()
        .build(&ModelSpec::new(
            "painleve5",
            &[("hbar", 1.0), ("omega", 1.0), ("a", 2.0), ("b", -2.0), ("c", 0.0), ("w_const", -1.0), ("x_hi", 30.0)],
        ))
        .unwrap()
}

/// All (E, multiplicity) of E₁ + E₂ below the cut, from closed-form level lists.
fn tensor_sum(l1: &[f64], l2: &[f64], cut: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut s: Vec<f64> = l1.iter().flat_map(|a| l2.iter().map(move |b| a + b)).filter(|e| *e < cut).collect();
    s.sort_by(f64::total_cmp);
    for e in s {
        match out.last_mut() {
            Some((c, n)) if (e - *c).abs() < 1e-9 => *n += 1,
            _ => out.push((e, 1)),
        }
    }
    out
}

#[test]
fn integral_orders() {
    let h = harmonic(1.0, 1.0);
    let sys = assemble_2d(&h, &h, 1, 1).unwrap();
    let orders: Vec<usize> = sys.integrals().unwrap().iter().map(|i| i.order).collect();
    assert_eq!(orders, vec![2, 2, 2, 2, 2]);
    let sys = assemble_2d(&harmonic(1.0, 2.0), &h, 1, 2).unwrap();
    assert_eq!(sys.lambda, 2.0);
    assert_eq!(sys.i_plus.order().unwrap(), 3);
    assert_eq!(sys.expected_integral_order(), 3);
    let p5 = degenerate_p5();
    let sys = assemble_2d(&p5, &p5, 1, 1).unwrap();
    assert_eq!(sys.i_plus.order().unwrap(), 8);
}

#[test]
fn incommensurable_frequencies_rejected() {
    let e = assemble_2d(&harmonic(1.0, 1.0), &harmonic(1.0, 2f64.sqrt()), 1, 1).unwrap_err();
    assert!(matches!(e, Error::FrequencyMismatch { .. }), "{e}");
    // close but not exactly rational
    let e = assemble_2d(&harmonic(1.0, 1.0), &harmonic(1.0, 0.5 + 1e-15), 1, 2).unwrap_err();
    assert!(matches!(e, Error::FrequencyMismatch { .. }));
}

#[test]
fn structure_function_matches_direct_product() {
    let p5 = degenerate_p5();
    let h = harmonic(1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (m1, m2, n1, n2) in [(&p5, &p5, 1u32, 1u32), (&h, &p5, 2, 2), (&harmonic(1.0, 2.0), &h, 1, 2)] {
        let sys = assemble_2d(m1, m2, n1, n2).unwrap();
        let phi = StructureFunction::new(&sys);
        let q1 = |x: f64| m1.q_roots.iter().map(|r| x - r).product::<f64>() * m1.q_norm;
        let q2 = |x: f64| m2.q_roots.iter().map(|r| x - r).product::<f64>() * m2.q_norm;
        for _ in 0..100 {
            let (n, u, e) = (rng.gen_range(0.0..6.0), rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..8.0));
            let (w1, w2) = (m1.spacing, m2.spacing);
            let mut direct = 1.0;
            for i in 1..=n1 {
                direct *= q1(e / 2.0 + n1 as f64 * w1 * (n + u) - (n1 - i) as f64 * w1);
            }
            for j in 1..=n2 {
                direct *= q2(e / 2.0 - n2 as f64 * w2 * (n + u) + j as f64 * w2);
            }
            let got = phi.eval(n, u, e);
            assert!((got - direct).abs() <= 1e-10 * direct.abs().max(1e-300), "{got} vs {direct}");
        }
    }
    let sys = assemble_2d(&p5, &p5, 1, 1).unwrap();
    assert_eq!(StructureFunction::new(&sys).degree(), 8);
}

#[test]
fn isotropic_modules_and_degeneracies() {
    let h = harmonic(1.0, 1.0);
    let sys = assemble_2d(&h, &h, 1, 1).unwrap();
    let phi = StructureFunction::new(&sys);
    let reps = find_representations(&phi, (0.5, 10.5), (-20.0, 20.0), 12);
    let got: Vec<(usize, f64)> = reps.iter().map(|r| (r.p, r.energy)).collect();
    assert_eq!(got.len(), 10, "{reps:#?}");
    for (p, e) in got {
        assert!((e - (p + 1) as f64).abs() < 1e-10);
    }
    let s = eigensolve(&h, &h.grid, 12, &EigenOptions::default()).unwrap();
    let d = verify_degeneracies(&sys, &reps, [&s, &s], 10.5).unwrap();
    assert_eq!(d.mismatches, 0, "{d:#?}");
    let oracle = tensor_sum(&(0..12).map(|n| n as f64 + 0.5).collect::<Vec<_>>(), &(0..12).map(|n| n as f64 + 0.5).collect::<Vec<_>>(), 10.5);
    let rows: Vec<(f64, usize)> = d.rows.iter().map(|r| (r.energy, r.observed)).collect();
    assert_eq!(rows.len(), oracle.len());
    for ((e, n), (eo, no)) in rows.iter().zip(&oracle) {
        assert!((e - eo).abs() < 1e-5);
        assert_eq!(n, no);
    }
}

#[test]
fn anisotropic_two_to_one() {
    let (h2, h1) = (harmonic(1.0, 2.0), harmonic(1.0, 1.0));
    let sys = assemble_2d(&h2, &h1, 1, 2).unwrap();
    let phi = StructureFunction::new(&sys);
    let reps = find_representations(&phi, (0.0, 8.0), (-20.0, 20.0), 10);
    let s1 = eigensolve(&h2, &GridSpec::new(-9.0, 9.0, 2000), 8, &EigenOptions::default()).unwrap();
    let s2 = eigensolve(&h1, &h1.grid, 10, &EigenOptions::default()).unwrap();
    let d = verify_degeneracies(&sys, &reps, [&s1, &s2], 8.0).unwrap();
    assert_eq!(d.mismatches, 0, "{d:#?}");
    // oracle: levels 2n + m + 3/2 with multiplicity ⌊(E − 3/2)/2⌋ + 1
    for r in &d.rows {
        let q = r.energy - 1.5;
        assert_eq!(r.observed, (q / 2.0).floor() as usize + 1, "{r:?}");
    }
}

#[test]
fn wrong_unit_is_caught_by_degeneracy_check() {
    let h = harmonic(1.0, 1.0);
    let sys = assemble_2d(&h, &h, 1, 1).unwrap();
    let mut phi = StructureFunction::new(&sys);
    phi.w1 = 1.1;
    phi.w2 = 1.1;
    let reps = find_representations(&phi, (0.5, 6.5), (-20.0, 20.0), 8);
    let s = eigensolve(&h, &h.grid, 8, &EigenOptions::default()).unwrap();
    let d = verify_degeneracies(&sys, &reps, [&s, &s], 6.5).unwrap();
    assert!(d.mismatches > 0);
}

#[test]
fn shallow_spectrum_is_rejected() {
    let h = harmonic(1.0, 1.0);
    let sys = assemble_2d(&h, &h, 1, 1).unwrap();
    let s = eigensolve(&h, &h.grid, 3, &EigenOptions::default()).unwrap();
    let e = verify_degeneracies(&sys, &[], [&s, &s], 6.0).unwrap_err();
    assert!(matches!(e, Error::DepthInsufficient { .. }), "{e}");
}

#[test]
fn degenerate_p5_tensor_sums_reported() {
    let p5 = degenerate_p5();
    let sys = assemble_2d(&p5, &p5, 1, 1).unwrap();
    let reps = find_representations(&StructureFunction::new(&sys), (0.5, 4.6), (-20.0, 20.0), 10);
    let s = eigensolve(&p5, &p5.grid, 10, &EigenOptions::default()).unwrap();
    let d = verify_degeneracies(&sys, &reps, [&s, &s], 4.6).unwrap();
    let levels: Vec<f64> = (0..10).map(|n| 0.5 + n as f64 / 2.0).collect();
    let oracle = tensor_sum(&levels, &levels, 4.6);
    let observed: Vec<(f64, usize)> = d.rows.iter().filter(|r| r.observed > 0).map(|r| (r.energy, r.observed)).collect();
    assert_eq!(observed.len(), oracle.len());
    for ((e, n), (eo, no)) in observed.iter().zip(&oracle) {
        assert!((e - eo).abs() < 1e-4 && n == no, "{e} {n} vs {eo} {no}");
    }
    // positivity structure of every accepted module
    for r in &reps {
        let phi = StructureFunction::new(&sys);
        assert!(phi.eval(0.0, r.u, r.energy).abs() < 1e-6 && phi.eval((r.p + 1) as f64, r.u, r.energy).abs() < 1e-6);
        for n in 1..=r.p {
            assert!(phi.eval(n as f64, r.u, r.energy) > 0.0);
        }
    }
}

#[test]
fn oscillator_algebra_on_tensor_grid() {
    let h = harmonic(1.0, 1.0);
    let sys = assemble_2d(&h, &h, 1, 1).unwrap();
    let phi = StructureFunction::new(&sys);
    let g = GridSpec::new(-8.0, 8.0, 32);
    let r = algebra_residuals(&sys, &phi, [g, g], &AlgebraTolerances::default(), 1).unwrap();
    assert!(r.checks.iter().all(|c| c.passed), "{:#?}", r.checks);
    // doubled normalization → observed/predicted = 1/2
    let wrong = phi.with_norms(2.0, 1.0);
    let r = algebra_residuals(&sys, &wrong, [g, g], &AlgebraTolerances::default(), 1).unwrap();
    for p in r.probes.iter().filter(|p| p.plus_minus[1].abs() > 1e-6) {
        assert!((p.plus_minus[0] / p.plus_minus[1] - 0.5).abs() < 1e-3, "{p:?}");
    }
    assert!(!r.checks[2].passed);
}

#[test]
fn anisotropic_algebra_on_tensor_grid() {
    let sys = assemble_2d(&harmonic(1.0, 2.0), &harmonic(1.0, 1.0), 1, 2).unwrap();
    let phi = StructureFunction::new(&sys);
    let r = algebra_residuals(&sys, &phi, [GridSpec::new(-6.0, 6.0, 48), GridSpec::new(-9.0, 9.0, 48)], &AlgebraTolerances::default(), 2).unwrap();
    assert!(r.checks.iter().all(|c| c.passed), "{:#?}", r.checks);
}

#[test]
fn oversized_grid_hits_memory_cap() {
    let h = harmonic(1.0, 1.0);
    let sys = assemble_2d(&h, &h, 1, 1).unwrap();
    let g = GridSpec::new(-8.0, 8.0, 64);
    let e = algebra_residuals(&sys, &StructureFunction::new(&sys), [g, g], &AlgebraTolerances::default(), 1).unwrap_err();
    assert!(matches!(e, Error::MemoryCap { .. }));
}
