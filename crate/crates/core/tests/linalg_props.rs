use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qwave::linalg::*;

fn matrix_from(n: usize, vals: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        C64::new(vals[k % vals.len()], vals[(k + 1) % vals.len()])
    })
}

fn entries() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 128)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn svd_reconstructs(n in 1usize..8, vals in entries()) {
        let a = matrix_from(n, &vals);
        let s = svd(&a).unwrap();
        let err = s.reconstruct().sub(&a).max_abs();
        prop_assert!(err <= 1e-10 * a.max_abs().max(1.0), "err {err}");
        prop_assert!(s.singulars.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(s.singulars.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn singular_values_match_gram_eigenvalues(n in 1usize..6, vals in entries()) {
        let a = matrix_from(n, &vals);
        let s = svd(&a).unwrap();
        let (mut ev, _) = hermitian_eigen(&a.adjoint().matmul(&a), 100).unwrap();
        ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (sv, e) in s.singulars.iter().zip(&ev) {
            prop_assert!((sv * sv - e.max(0.0)).abs() < 1e-9 * (1.0 + e.abs()));
        }
    }

    #[test]
    fn solve_residual_small(n in 1usize..8, vals in entries(), shift in 1.5f64..3.0) {
        // diagonal shift keeps the system well conditioned
        let mut a = matrix_from(n, &vals);
        for i in 0..n {
            a[(i, i)] += C64::new(shift * n as f64, 0.0);
        }
        let b: Vec<C64> = (0..n).map(|i| C64::new(vals[i], -vals[i + 1])).collect();
        let x = gauss_jordan_solve(&a, &b).unwrap();
        let r: Vec<C64> = a.mul_vec(&x).iter().zip(&b).map(|(u, v)| u - v).collect();
        prop_assert!(vec_max_abs(&r) < 1e-12 * (1.0 + vec_max_abs(&b)));
    }

    #[test]
    fn pseudoinverse_equals_inverse(n in 1usize..7, vals in entries()) {
        let mut a = matrix_from(n, &vals);
        for i in 0..n {
            a[(i, i)] += C64::new(2.0 * n as f64, 0.5);
        }
        let p = pseudoinverse_via_svt(&a).unwrap();
        let inv = inverse(&a).unwrap();
        prop_assert!(p.sub(&inv).max_abs() < 1e-10);
        prop_assert!(condition_number(&a).unwrap() >= 1.0 - 1e-12);
    }
}

#[test]
fn singular_matrix_is_reported() {
    let a = ComplexMatrix::from_rows(&[
        vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
        vec![C64::new(2.0, 0.0), C64::new(4.0, 0.0)],
    ])
    .unwrap();
    assert!(matches!(gauss_jordan_solve(&a, &[C64::new(1.0, 0.0); 2]), Err(qwave::Error::SingularMatrix(_))));
}

#[test]
fn max_norm_is_largest_row_sum() {
    let a = ComplexMatrix::from_rows(&[
        vec![C64::new(3.0, 4.0), C64::new(0.0, -1.0)],
        vec![C64::new(0.0, 0.0), C64::new(-2.0, 0.0)],
    ])
    .unwrap();
    assert!((max_norm(&a) - 6.0).abs() < 1e-15);
}

#[test]
fn line_fit_recovers_slope() {
    let x = [1.0, 2.0, 3.0, 4.0];
    let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
    let (a, b, r2) = linear_fit(&x, &y).unwrap();
    assert!((a - 2.5).abs() < 1e-12 && (b + 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
}
