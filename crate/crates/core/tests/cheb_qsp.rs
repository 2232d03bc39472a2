use proptest::prelude::*;
use qwave::cheb::*;
use qwave::qsp::*;
use qwave::qsvt::{inverse_phases, InverseSpec};
use std::f64::consts::PI;

/// Independent coefficient oracle: midpoint rule on `∫_0^π f(cos θ) cos(kθ) dθ`.
fn quadrature_coeff(f: impl Fn(f64) -> f64, k: usize, m: usize) -> f64 {
    let h = PI / m as f64;
    let s: f64 = (0..m)
        .map(|j| {
            let t = (j as f64 + 0.5) * h;
            f(t.cos()) * (k as f64 * t).cos()
        })
        .sum();
    s * h * if k == 0 { 1.0 } else { 2.0 } / PI
}

#[test]
fn regularized_inverse_coefficients_match_quadrature() {
    let f = TargetFunction::RegInverse { kappa: 8.0 };
    let s = fourier_cheb_coeffs(&f, 41, 400).unwrap();
    for k in 0..=41 {
        let want = quadrature_coeff(|x| f.eval(x), k, 20000);
        assert!((s.coeffs[k] - want).abs() < 1e-9, "k={k}: {} vs {want}", s.coeffs[k]);
    }
    assert!(s.coeffs.iter().step_by(2).all(|c| *c == 0.0), "odd target has even coefficients");
}

#[test]
fn gaussian_coefficients_are_even() {
    let f = TargetFunction::Gaussian { mu: 0.2, beta: 0.5, x_c: 0.0 };
    let s = fourier_cheb_coeffs(&f, 30, 64).unwrap();
    assert!(s.coeffs.iter().skip(1).step_by(2).all(|c| *c == 0.0));
    let want = quadrature_coeff(|x| f.eval(x), 4, 20000);
    assert!((s.coeffs[4] - want).abs() < 1e-9);
}

#[test]
fn truncation_meets_eps_on_dense_grid() {
    let kappa = 10.0;
    let f = TargetFunction::RegInverse { kappa };
    for eps in [1e-2, 1e-4] {
        let s = truncate_to_eps(&f, eps, DEFAULT_DEGREE_CAP).unwrap();
        let worst = (0..5001)
            .map(|i| 1.0 / kappa + (1.0 - 1.0 / kappa) * i as f64 / 5000.0)
            .map(|x| (s.eval(x).unwrap() - f.eval(x)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1.05 * eps, "eps={eps}: {worst}");
        // one degree lower fails the certification (minimality)
        let lower = s.truncated(s.degree() - 2);
        let worse = (0..5001)
            .map(|i| 1.0 / kappa + (1.0 - 1.0 / kappa) * i as f64 / 5000.0)
            .map(|x| (lower.eval(x).unwrap() - f.eval(x)).abs())
            .fold(0.0, f64::max);
        assert!(worse > eps * 0.9);
    }
}

#[test]
fn degree_cap_is_reported() {
    let f = TargetFunction::RegInverse { kappa: 200.0 };
    let e = truncate_to_eps(&f, 1e-6, 64).unwrap_err();
    assert!(matches!(e, qwave::Error::BudgetExceeded(_)));
    assert_eq!(e.exit_code(), 4);
}

#[test]
fn scaled_target_peaks_at_target_max() {
    let f = TargetFunction::RegInverse { kappa: 12.0 };
    let s = truncate_to_eps(&f, 1e-3, DEFAULT_DEGREE_CAP).unwrap();
    let (sc, beta) = scale_for_qsp(&s, 12.0, 0.5);
    assert!((sc.max_abs_on_unit(4.0 / 12.0) - 0.5).abs() < 1e-12);
    assert!(beta > 0.0);
}

#[test]
fn inverse_phases_reproduce_scaled_target() {
    let (pv, target, stats) = inverse_phases(&InverseSpec::new(6.0, 1e-4)).unwrap();
    assert!(stats.converged);
    assert!(node_residual(&pv, &target) <= 1e-10);
    for i in 0..200 {
        let x = -1.0 + 2.0 * i as f64 / 199.0;
        let got = qsp_eval(&pv.phases, x).unwrap().re;
        assert!((got - target.eval(x).unwrap()).abs() < 1e-9, "x={x}");
    }
    // |p| ≤ 1 everywhere
    assert!((0..1000).all(|i| qsp_eval(&pv.phases, -1.0 + i as f64 / 500.0).unwrap().norm() <= 1.0 + 1e-12));
}

#[test]
fn phase_csv_roundtrip() {
    let (pv, _, _) = inverse_phases(&InverseSpec::new(4.0, 1e-3)).unwrap();
    let back = PhaseVector::from_csv(&pv.to_csv()).unwrap();
    assert_eq!(back.phases, pv.phases);
    assert_eq!(back.beta_sc, pv.beta_sc);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_matches_finite_differences(phases in proptest::collection::vec(-PI..PI, 2..12), x in -0.99f64..0.99) {
        let g = qsp_real_gradient(&phases, x).unwrap();
        let h = 1e-6;
        for k in 0..phases.len() {
            let mut p = phases.clone();
            p[k] += h;
            let up = qsp_eval(&p, x).unwrap().re;
            p[k] -= 2.0 * h;
            let dn = qsp_eval(&p, x).unwrap().re;
            let fd = (up - dn) / (2.0 * h);
            prop_assert!((fd - g[k]).abs() <= 1e-6 * fd.abs().max(1.0), "k={} fd={} g={}", k, fd, g[k]);
        }
    }

    #[test]
    fn qsp_is_bounded(phases in proptest::collection::vec(-PI..PI, 1..16), x in -1.0f64..1.0) {
        prop_assert!(qsp_eval(&phases, x).unwrap().norm() <= 1.0 + 1e-12);
    }
}
