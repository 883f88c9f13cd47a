use superladder_core::diffop::{residual_norm, GridSpec, LinearDiffOp};
use superladder_core::susy::*;
use superladder_core::{Interval, SmoothFn};

fn grid() -> GridSpec {
    GridSpec::new(-10.0, 10.0, 2000)
}

#[test]
fn riccati_reproduces_both_linear_superpotentials() {
    let v = SmoothFn::analytic(|x| x * x * 0.5);
    let down = solve_riccati(&v, -0.5, 1.0, 0.0, 0.0, Interval::new(-6.0, 6.0)).unwrap();
    let up = solve_riccati(&v, 0.5, 1.0, 0.0, 0.0, Interval::new(-3.0, 3.0)).unwrap();
    for i in 0..=60 {
        let x = -3.0 + 0.1 * i as f64;
        assert!((down.alpha.eval(x) - x).abs() < 1e-8);
        assert!((up.alpha.eval(x) + x).abs() < 1e-8);
    }
    assert!(!up.blew_up());
}

#[test]
fn oscillator_pair_matches_closed_form() {
    let p = first_order_pair(&SmoothFn::identity(), -0.5, 1.0, &grid()).unwrap();
    for x in [-7.5, -1.0, 0.0, 2.2, 9.0] {
        assert!((p.v_a.eval(x) - x * x / 2.0).abs() < 1e-12);
        assert!((p.v_b.eval(x) - (x * x / 2.0 - 1.0)).abs() < 1e-12);
    }
    for c in &p.checks {
        assert!(c.passed, "{c:?}");
    }
    // L is the hand-integrated adjoint (ħD + α)/√2
    let l = LinearDiffOp::new(
        vec![SmoothFn::identity().scale(0.5f64.sqrt()), SmoothFn::constant(0.5f64.sqrt())],
        Interval::real_line(),
    );
    assert!(p.l.coefficient_gap(&l, &[-3.0, 0.0, 1.7]) < 1e-15);
}

#[test]
fn wrong_shift_is_detected() {
    let p = first_order_pair(&SmoothFn::identity(), -0.5, 1.0, &grid()).unwrap();
    let ok = verify_intertwining(&p.h_b(), &p.h_a(), &p.l_dag, 0.0, &grid(), 1e-6);
    let bad = verify_intertwining(&p.h_b(), &p.h_a(), &p.l_dag, 1.0, &grid(), 1e-6);
    assert!(ok.passed && ok.residual < 1e-6);
    assert!(!bad.passed && bad.residual > 0.1);
}

#[test]
fn linear_g_gives_singular_oscillator_partners() {
    let g = GridSpec::new(0.5, 8.0, 2000);
    let (c, d) = (0.7, 0.4);
    let p = second_order_pair(&SmoothFn::identity(), c, d, 1.0, Branch::A, &g).unwrap();
    for x in [0.6, 1.0, 3.3, 7.9] {
        let common = -1.0 / (8.0 * x * x) + x * x / 8.0 + d / 2.0 + c / (2.0 * x * x);
        assert!((p.v_a.eval(x) - (common + 0.5)).abs() < 1e-12);
        assert!((p.v_b.eval(x) - (common - 0.5)).abs() < 1e-12);
    }
    let h_a = p.h_a();
    let x = p
        .l
        .compose(&p.l_dag)
        .unwrap()
        .sub(&h_a.polynomial(&[d / 2.0, d / 2.0], 1.0).unwrap().shift(-c / 4.0))
        .unwrap();
    assert!(residual_norm(&x, &g, 12) < 1e-5);
    assert!(p.checks.iter().all(|c| c.passed), "{:?}", p.checks);
}

#[test]
fn product_with_wrong_sign_fails() {
    // the printed "+c/4ħ" sign on the second product is not an identity
    let g = GridSpec::new(0.5, 8.0, 2000);
    let c = 0.7;
    let p = second_order_pair(&SmoothFn::identity(), c, 0.0, 1.0, Branch::B, &g).unwrap();
    let x = p
        .l_dag
        .compose(&p.l)
        .unwrap()
        .sub(&p.h_b().polynomial(&[0.0, 0.0], 1.0).unwrap().shift(c / 4.0))
        .unwrap();
    assert!((residual_norm(&x, &g, 12) - c / 2.0).abs() < 1e-6);
}
