use superladder_core::diffop::GridSpec;
use superladder_core::models::*;
use superladder_core::spectral::*;
use superladder_core::Error;

fn build(kind: &str, params: &[(&str, f64)]) -> PotentialModel1D {
    ModelRegistry::default().build(&ModelSpec::new(kind, params)).unwrap()
}

fn harmonic() -> PotentialModel1D {
    build("harmonic", &[("hbar", 1.0), ("omega", 1.0)])
}

fn degenerate_p5() -> PotentialModel1D {
    build(
        "painleve5",
        &[("hbar", 1.0), ("omega", 1.0), ("a", 2.0), ("b", -2.0), ("c", 0.0), ("w_const", -1.0), ("x_hi", 30.0)],
    )
}

#[test]
fn harmonic_spectrum_matches_closed_form() {
    let m = harmonic();
    let r = eigensolve(&m, &m.grid, 5, &EigenOptions::default()).unwrap();
    for (n, e) in r.eigenvalues.iter().enumerate() {
        assert!((e - (n as f64 + 0.5)).abs() < 1e-6, "{n}: {e}");
        assert!(r.errors[n] < 1e-4);
    }
    assert!(r.orthonormality_defect < 1e-8);
    assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn scaled_oscillator_spectrum() {
    let m = build("harmonic", &[("hbar", 0.5), ("omega", 3.0)]);
    let r = eigensolve(&m, &m.grid, 4, &EigenOptions::default()).unwrap();
    for (n, e) in r.eigenvalues.iter().enumerate() {
        assert!((e - 1.5 * (n as f64 + 0.5)).abs() < 1e-6, "{n}: {e}");
    }
}

#[test]
fn singular_oscillator_spectrum() {
    // E_n = ħω(2n + 1 + ν), ν = √(1/4 + 2γ)
    for l in [1.0, 0.1, -0.1] {
        let m = build("singular_oscillator", &[("hbar", 1.0), ("omega", 1.0), ("l", l), ("n", 3000.0)]);
        let nu = (0.25_f64 + 2.0 * l).sqrt();
        let r = eigensolve(&m, &m.grid, 4, &EigenOptions { tol: 1e-3 }).unwrap();
        for (n, e) in r.eigenvalues.iter().enumerate() {
            let exact = 2.0 * n as f64 + 1.0 + nu;
            let tol = if l < 0.0 { 2e-2 } else { 1e-4 };
            assert!((e - exact).abs() < tol, "l = {l}, {n}: {e} vs {exact}");
        }
    }
}

#[test]
fn subcritical_coupling_rejected_by_solver() {
    let mut m = build("singular_oscillator", &[("hbar", 1.0), ("omega", 1.0), ("l", 0.0)]);
    m.inverse_square = Some(-0.2);
    let e = eigensolve(&m, &m.grid, 3, &EigenOptions::default()).unwrap_err();
    assert!(matches!(e, Error::Subcritical { .. }), "{e}");
}

#[test]
fn coarse_grid_is_reported_as_nonconvergent() {
    let m = harmonic();
    let g = GridSpec::new(-12.0, 12.0, 200);
    let e = eigensolve(&m, &g, 5, &EigenOptions { tol: 1e-6 }).unwrap_err();
    assert!(matches!(e, Error::NonConvergence { .. }), "{e}");
}

#[test]
fn discretization_is_second_order() {
    let models = [
        harmonic(),
        build("singular_oscillator", &[("hbar", 1.0), ("omega", 1.0), ("l", 1.0)]),
        degenerate_p5(),
    ];
    for m in &models {
        let g = GridSpec::new(m.grid.lo, m.grid.hi, 400);
        let a = eigensolve(m, &g, 5, &EigenOptions { tol: 1e-1 }).unwrap();
        let b = eigensolve(m, &g.refined(), 5, &EigenOptions { tol: 1e-1 }).unwrap();
        for k in 0..5 {
            let ratio = a.errors[k] / b.errors[k];
            assert!((3.5..4.5).contains(&ratio), "{} level {k}: ratio {ratio}", m.tag);
        }
    }
}

#[test]
fn harmonic_ladder_action() {
    let m = harmonic();
    let r = eigensolve(&m, &m.grid, 6, &EigenOptions::default()).unwrap();
    let d = verify_ladder_action(&m, &r).unwrap();
    assert!((d.calibrated_norm - 1.0).abs() < 1e-5, "{}", d.calibrated_norm);
    for l in &d.levels[..5] {
        let (j, overlap) = l.raised.unwrap();
        assert_eq!(j, l.index + 1);
        assert!(overlap > 0.99999, "{l:?}");
        if let Some(ratio) = l.norm_ratio {
            assert!((ratio - 1.0).abs() < 1e-5, "{l:?}");
        }
        assert!(l.product_residual < 1e-4, "{l:?}");
    }
    assert!(d.levels[0].lowering_norm < 1e-3);
    let chains = classify_chains(&r, &[]);
    assert_eq!(chains.chains.len(), 1);
    assert!(chains.chains[0].is_infinite());
    assert!((chains.chains[0].bottom - 0.5).abs() < 1e-6);
}

#[test]
fn degenerate_p5_spectrum_ladders_and_chains() {
    let m = degenerate_p5();
    let r = eigensolve(&m, &m.grid, 8, &EigenOptions::default()).unwrap();
    // E_n = n/2 − 1/2 + √(a/2)
    for (n, e) in r.eigenvalues.iter().enumerate() {
        assert!((e - (n as f64 / 2.0 + 0.5)).abs() < 1e-4, "{n}: {e}");
    }
    let d = verify_ladder_action(&m, &r).unwrap();
    for l in &d.levels[..5] {
        let (j, overlap) = l.raised.unwrap();
        assert_eq!(j, l.index + 2);
        assert!(overlap > 0.999, "{l:?}");
    }
    for l in &d.levels[..4] {
        assert!(l.product_residual < 1e-4, "{l:?}");
    }
    let zm = build_zero_modes(&m, &m.grid, ZeroModeKind::Annihilation).unwrap();
    let cm = build_zero_modes(&m, &m.grid, ZeroModeKind::Creation).unwrap();
    for z in zm.iter().filter(|z| z.normalizable) {
        let (i, dist) = match_zero_modes(&r, std::slice::from_ref(z))[0].nearest.unwrap();
        assert!(dist < 1e-3, "{z:?}");
        assert!(d.levels[i].lowering_norm < 1e-3, "{:?}", d.levels[i]);
    }
    let all: Vec<ZeroMode> = zm.into_iter().chain(cm).collect();
    let chains = classify_chains(&r, &all);
    let inf: Vec<f64> = chains.infinite().map(|c| c.bottom).collect();
    assert_eq!(inf.len(), 2, "{chains:#?}");
    assert!((inf[0] - 0.5).abs() < 1e-4 && (inf[1] - 1.0).abs() < 1e-4);
    assert!(chains.ambiguous.is_empty());
}
