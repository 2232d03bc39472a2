use num_complex::Complex64 as C64;
use qwave::block_encode::{wave_encoding, wave_layout, EncodingKind};
use qwave::config::Half;
use qwave::measure::ae::*;
use qwave::measure::gauss::*;
use qwave::measure::power::*;
use qwave::measure::spectrum::*;
use qwave::qsp::PhaseVector;
use qwave::qsvt::*;
use qwave::wave::WaveProblem;

fn small_solve() -> (WaveProblem, PhaseVector) {
    let p = WaveProblem::new(3, 9.0, 1.0, 4.0).unwrap();
    let (_, ke) = condition_numbers(&p).unwrap();
    let (pv, _, _) = inverse_phases(&InverseSpec::new(1.5 * ke, 1e-4)).unwrap();
    (p, pv)
}

#[test]
fn qft_spectrum_equals_dft_of_solver_field() {
    let (p, pv) = small_solve();
    let l = wave_layout(3, EncodingKind::Dilation, &[]).unwrap();
    let enc = wave_encoding(&p, &l, EncodingKind::Dilation).unwrap();
    let run = inverse_run(&l, &enc, &pv).unwrap();
    let rec = record_from_run(&p, &enc, &pv, &run).unwrap();
    for half in [Half::Full, Half::Left, Half::Right] {
        let s = spectrum(&run.state, half, p.dx()).unwrap();
        let c = classical_fft_reference(&select_field(&rec.quantum.e, half), p.dx()).unwrap();
        assert!(s.max_deviation(&c) < 1e-8, "{half:?}");
        assert!((s.prob.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let n = if half == Half::Full { 8 } else { 4 };
        assert_eq!(s.k.len(), n);
    }
}

#[test]
fn parseval_for_reference_dft() {
    let f: Vec<C64> = (0..16).map(|i| C64::new((i as f64 * 0.3).sin(), (i as f64).cos())).collect();
    let c = classical_fft_reference(&f, 1.0 / 16.0).unwrap();
    assert!((c.prob.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn ae_bound_holds_with_high_probability() {
    for p in [0.1, 0.25, 0.5] {
        for n_y in [5, 6] {
            let (prep, ry) = simplified_prep(p, n_y).unwrap();
            let r = amplitude_estimation(&prep, &ry).unwrap();
            assert!(r.success_mass(p) >= 0.81, "p={p} n_y={n_y}");
            assert!((r.distribution.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn reference_delta_and_outcome() {
    let (prep, ry) = simplified_prep(0.25, 6).unwrap();
    let r = amplitude_estimation(&prep, &ry).unwrap();
    let d = ae_delta(0.25, 64);
    assert!((d - 0.0449).abs() < 1e-4);
    assert!((r.p_tilde - 0.25).abs() <= d);
}

#[test]
fn doubling_counting_qubits_shrinks_delta() {
    let d5 = ae_delta(0.3, 1 << 5);
    let d6 = ae_delta(0.3, 1 << 6);
    assert!((d5 / d6 - 2.0).abs() < 0.2);
}

#[test]
fn full_and_simplified_ae_agree() {
    let amps: Vec<C64> = (0..8).map(|i| C64::new(1.0 + i as f64, 0.5 * i as f64)).collect();
    let nrm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let good = |i: usize| i >= 4;
    let p: f64 = amps.iter().enumerate().filter(|(i, _)| good(*i)).map(|(_, a)| a.norm_sqr()).sum::<f64>() / nrm;
    let (full, ry_f) = state_prep_with_flag(&amps, good, 5).unwrap();
    assert!((full.good_probability().unwrap() - p).abs() < 1e-12);
    let (sim, ry_s) = simplified_prep(p, 5).unwrap();
    let a = amplitude_estimation(&full, &ry_f).unwrap();
    let b = amplitude_estimation(&sim, &ry_s).unwrap();
    for (x, y) in a.distribution.iter().zip(&b.distribution) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn zero_energy_estimate() {
    let (prep, ry) = simplified_prep(0.0, 5).unwrap();
    let r = amplitude_estimation(&prep, &ry).unwrap();
    let (e, d) = energy_estimate(&r, 0.5, 10.0, 8).unwrap();
    assert_eq!(e, 0.0);
    assert!(d > 0.0);
    assert!(energy_estimate(&r, 0.5, 10.0, 0).is_err());
}

#[test]
fn gaussian_peak_follows_shift() {
    let r = gaussian_qsvt(4, 0.2, 0.5, -0.25, 1e-4).unwrap();
    assert!(r.max_deviation <= 1e-4);
    let arg = (0..16).fold(0, |b, i| if r.values[i] > r.values[b] { i } else { b });
    // the grid point nearest the shifted centre carries the peak
    let nearest = (0..16).fold(0, |b, i| if r.x[i].abs() < r.x[b].abs() { i } else { b });
    assert_eq!(arg, nearest);
    assert!(r.x[arg].abs() < 0.07);
}

#[test]
fn two_gaussians_classical_sum() {
    let t = two_gaussians_demo(5, 0.2, 0.5, 1e-4, 6).unwrap();
    // direct oracle: each lobe is G on the 16-point half grid scaled by 2^{-5/2}
    let xg: Vec<f64> = (0..16).map(|i| -1.0 + 2.0 * i as f64 / 15.0).collect();
    let mid: f64 = (0..32usize)
        .filter(|i| ((i >> 4) ^ (i >> 3)) & 1 == 1)
        .map(|i| gaussian(xg[i % 16], 0.2, 0.5).powi(2) / 32.0)
        .sum();
    assert!((t.p_m1_classical - mid).abs() < 1e-14);
    assert!((t.p_m1 - mid).abs() < 1e-4);
    assert!(t.within_bound);
    for w in t.lobe_widths {
        assert!((w / 0.1 - 1.0).abs() < 0.1, "width {w}");
    }
}

#[test]
fn constant_filter_scales_fields() {
    let (p, pv) = small_solve();
    let beta = 0.4;
    let mut g = PhaseVector::from_phases(vec![f64::acos(beta)]);
    g.beta_sc = beta;
    let f = gaussian_filter(&p, EncodingKind::Dilation, &pv, &g, 1e9, 0.0).unwrap();
    assert!(f.max_dev_vs_solver < 1e-12);
}

#[test]
fn vacuum_filter_matches_pointwise_product() {
    let p = WaveProblem::new(3, 5.0, 1.0, 1.0).unwrap();
    let (_, ke) = condition_numbers(&p).unwrap();
    let (pv, _, _) = inverse_phases(&InverseSpec::new(1.5 * ke, 1e-4)).unwrap();
    let (g, _) = gaussian_phases(0.3, 0.5, 0.0, 1e-4).unwrap();
    let f = gaussian_filter(&p, EncodingKind::Dilation, &pv, &g, 0.3, 0.0).unwrap();
    let scale = f.expected.iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(f.max_dev_vs_solver <= 1e-4 * scale * 2.0 / 0.5);
    assert!(f.max_dev_vs_classical <= 2e-3 * scale);
    // E and B halves are both filtered
    let n = p.n_points();
    assert!(f.filtered[..n].iter().any(|v| v.norm() > 0.0) && f.filtered[n..].iter().any(|v| v.norm() > 0.0));
}

#[test]
fn power_matches_double_sum_and_vanishes_on_empty_window() {
    let w = PowerWindow { k_b: 4, n_eb: 2, n_hw: 3, n_w: 3 };
    let (g, _) = gaussian_phases(0.4, 0.5, w.x_c(), 1e-5).unwrap();
    let e: Vec<C64> = (0..16).map(|k| C64::from_polar(1.0 + 0.1 * k as f64, 0.7 * k as f64)).collect();
    let r = absorbed_power(&e, &w, &g, 0.4).unwrap();
    assert!(r.p0 >= r.p1 - 1e-12);
    assert!((r.d_abs - r.d_brute).abs() < 5.0 * 1e-5 * 4.0 * 7.0, "{} vs {}", r.d_abs, r.d_brute);
    assert_eq!(r.qubits, 22);

    let mut z = e.clone();
    for v in z.iter_mut().take(w.k_e() + w.n_hw + 1).skip(w.k_b) {
        *v = C64::new(0.0, 0.0);
    }
    let r0 = absorbed_power(&z, &w, &g, 0.4).unwrap();
    assert!(r0.d_abs <= 1e-8, "{}", r0.d_abs);
    assert!(r0.p0 >= r0.p1 - 1e-12);
}

#[test]
fn power_window_errors() {
    let w = PowerWindow { k_b: 12, n_eb: 2, n_hw: 3, n_w: 3 };
    let (g, _) = gaussian_phases(0.4, 0.5, w.x_c(), 1e-3).unwrap();
    let e = vec![C64::new(1.0, 0.0); 16];
    assert!(matches!(absorbed_power(&e, &w, &g, 0.4), Err(qwave::Error::WindowOutOfRange(_))));
}
