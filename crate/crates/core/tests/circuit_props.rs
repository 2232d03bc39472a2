use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qwave::block_encode::encode_value_rotation;
use qwave::circuit::*;
use qwave::measure::ae::swap_test;
use std::f64::consts::PI;

fn layout(n: usize) -> RegisterLayout {
    let mut l = RegisterLayout::new();
    l.add("r", n).unwrap();
    l
}

fn normalized(vals: &[f64], m: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..m).map(|i| C64::new(vals[(2 * i) % vals.len()], vals[(2 * i + 1) % vals.len()])).collect();
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|a| a / n).collect()
}

#[test]
fn rx_on_zero() {
    let t = 0.7;
    let mut s = QuantumState::zero(layout(1));
    apply_gate(&mut s, &Gate::rx(0, t)).unwrap();
    assert!((s.amps[0] - C64::new((t / 2.0).cos(), 0.0)).norm() < 1e-15);
    assert!((s.amps[1] - C64::new(0.0, -(t / 2.0).sin())).norm() < 1e-15);
}

#[test]
fn value_rotation_amplitude() {
    // general complex value: Rz then Ry
    let v = C64::new(0.3, -0.4);
    let mut s = QuantumState::zero(layout(1));
    for g in encode_value_rotation(v, 1.0, 0).unwrap() {
        apply_gate(&mut s, &g).unwrap();
    }
    let theta1 = -2.0 * v.arg();
    let theta2 = 2.0 * (v.norm()).asin();
    let want = C64::from_polar((theta2 / 2.0).sin(), -theta1 / 2.0);
    assert!((s.amps[1] - want).norm() < 1e-12);
    assert!((s.amps[1] - v).norm() < 1e-12);
}

#[test]
fn qft_matches_dft_matrix() {
    for n in 1..=5usize {
        let m = 1usize << n;
        let mut c = Circuit::new();
        c.extend(qft_gates(&(0..n).collect::<Vec<_>>(), false));
        let u = c.to_matrix(n).unwrap();
        for y in 0..m {
            for x in 0..m {
                let want = C64::from_polar(1.0 / (m as f64).sqrt(), 2.0 * PI * (x * y) as f64 / m as f64);
                assert!((u[(y, x)] - want).norm() < 1e-12, "n={n} ({y},{x})");
            }
        }
        let mut ci = Circuit::new();
        ci.extend(qft_gates(&(0..n).collect::<Vec<_>>(), true));
        assert!(ci.to_matrix(n).unwrap().matmul(&u).sub(&qwave::linalg::ComplexMatrix::identity(m)).max_abs() < 1e-12);
    }
}

#[test]
fn zero_polarity_multi_control() {
    let mut l = layout(2);
    let t = l.add("t", 1).unwrap();
    let g = Gate::x(t).ctrls(&[(0, false), (1, true)]);
    let mut s = QuantumState::basis(l.clone(), 0b10);
    apply_gate(&mut s, &g).unwrap();
    assert!((s.amps[0b110].norm() - 1.0).abs() < 1e-15);
    let mut s = QuantumState::basis(l, 0b11);
    apply_gate(&mut s, &g).unwrap();
    assert!((s.amps[0b011].norm() - 1.0).abs() < 1e-15);
}

#[test]
fn bad_indices_rejected() {
    let mut s = QuantumState::zero(layout(2));
    assert!(matches!(apply_gate(&mut s, &Gate::x(5)), Err(qwave::Error::IndexError(_))));
    assert!(apply_gate(&mut s, &Gate::x(0).ctrl(0, true)).is_err());
}

#[test]
fn layout_cap_enforced() {
    let mut l = RegisterLayout::with_cap(4);
    l.add("a", 3).unwrap();
    assert!(matches!(l.add("b", 2), Err(qwave::Error::CapExceeded { need: 5, cap: 4 })));
    assert!(l.add("a", 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn ry_angles_add(a in -6.0f64..6.0, b in -6.0f64..6.0, vals in proptest::collection::vec(-1.0f64..1.0, 4)) {
        prop_assume!(vals.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let amps = normalized(&vals, 2);
        let mut s1 = QuantumState::from_amps(layout(1), amps.clone()).unwrap();
        apply_gate(&mut s1, &Gate::ry(0, a)).unwrap();
        apply_gate(&mut s1, &Gate::ry(0, b)).unwrap();
        let mut s2 = QuantumState::from_amps(layout(1), amps).unwrap();
        apply_gate(&mut s2, &Gate::ry(0, a + b)).unwrap();
        for (x, y) in s1.amps.iter().zip(&s2.amps) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn gates_preserve_norm_and_adjoint_inverts(ops in proptest::collection::vec((0usize..7, 0usize..3, 0usize..3, -3.0f64..3.0), 1..30),
                                               vals in proptest::collection::vec(-1.0f64..1.0, 16)) {
        prop_assume!(vals.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let mut c = Circuit::new();
        for (k, t, ctl, a) in ops {
            let g = match k {
                0 => Gate::x(t), 1 => Gate::h(t), 2 => Gate::rx(t, a), 3 => Gate::ry(t, a),
                4 => Gate::rz(t, a), 5 => Gate::p(t, a), _ => Gate::z(t),
            };
            c.push(if ctl != t { g.ctrl(ctl, a > 0.0) } else { g });
        }
        let amps = normalized(&vals, 8);
        let mut s = QuantumState::from_amps(layout(3), amps.clone()).unwrap();
        c.apply(&mut s).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        c.adjoint().apply(&mut s).unwrap();
        for (x, y) in s.amps.iter().zip(&amps) {
            prop_assert!((x - y).norm() < 1e-11);
        }
    }

    #[test]
    fn swap_test_overlap(v1 in proptest::collection::vec(-1.0f64..1.0, 8), v2 in proptest::collection::vec(-1.0f64..1.0, 8)) {
        prop_assume!(v1.iter().map(|v| v * v).sum::<f64>() > 1e-3 && v2.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let a = normalized(&v1, 4);
        let b = normalized(&v2, 4);
        let ov: C64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
        let p = swap_test(&a, &b).unwrap();
        prop_assert!((p - (1.0 - ov.norm_sqr()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn state_prep_first_column(vals in proptest::collection::vec(-1.0f64..1.0, 16)) {
        prop_assume!(vals.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        let v = normalized(&vals, 8);
        let m = state_prep_matrix(&v);
        prop_assert!(m.unitarity_residual() < 1e-12);
        for (i, x) in v.iter().enumerate() {
            prop_assert!((m[(i, 0)] - x).norm() < 1e-12);
        }
    }
}
