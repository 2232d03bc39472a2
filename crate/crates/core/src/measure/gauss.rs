//! Gaussian QSVT over a sine encoding, the two-Gaussians AE demo and the
//! Gaussian filter applied to the solver output.

use super::ae::{amplitude_estimation, ae_delta, AEResult, AePrep};
use crate::block_encode::{gauss_grid_params, sine_encoding, sine_grid, wave_encoding, wave_layout, BlockEncoding, EncodingKind};
use crate::cheb::{truncate_to_eps, ChebSeries, TargetFunction, DEFAULT_DEGREE_CAP};
use crate::circuit::{apply_gate, Circuit, Gate, QuantumState, RegisterLayout};
use crate::qsp::{solve_phases, PhaseVector};
use crate::qsvt::{apply_qsvt_angles, prepare_b, real_polynomial_action};
use crate::wave::{align_global_phase, WaveProblem};
use crate::{Error, Result, C64};
use serde::Serialize;

/// `β e^{-x²/(2μ²)}`.
pub fn gaussian(x: f64, mu: f64, beta: f64) -> f64 {
    beta * (-x * x / (2.0 * mu * mu)).exp()
}

/// Sine-grid parameters `(α_0, α)` putting the grid on `[-1 - x_c, 1 - x_c]`.
pub fn grid_alphas(n: usize, x_c: f64) -> (f64, f64) {
    gauss_grid_params(n, x_c)
}

/// Phases for the even Gaussian target. The series is certified at `ε/2` so
/// the realized polynomial stays within `ε` after the phase solve.
pub fn gaussian_phases(mu: f64, beta: f64, x_c: f64, eps: f64) -> Result<(PhaseVector, ChebSeries)> {
    if !(mu > 0.0) || !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Config(format!("need mu > 0 and 0 < beta < 1, got mu={mu} beta={beta}")));
    }
    let f = TargetFunction::Gaussian { mu, beta, x_c };
    let series = truncate_to_eps(&f, 0.5 * eps, DEFAULT_DEGREE_CAP)?;
    let mut pv = solve_phases(&series, 1e-12)?;
    pv.beta_sc = beta;
    pv.eps_qsvt = eps;
    Ok((pv, series))
}

/// Real-part QSVT of `phases` over the sine encoding, with Hadamards on `q`.
fn gauss_stage(enc: &BlockEncoding, phases: &PhaseVector, q: usize, state: &mut QuantumState) -> Result<usize> {
    apply_gate(state, &Gate::h(q))?;
    let c = apply_qsvt_angles(enc, &phases.reflection_angles(), q, false, state)?;
    apply_gate(state, &Gate::h(q))?;
    Ok(c.queries())
}

fn gauss_stage_circuit(enc: &BlockEncoding, phases: &PhaseVector, q: usize) -> Circuit {
    let psi = phases.reflection_angles();
    let proj = enc.projector();
    let rot = |c: &mut Circuit, a: f64| {
        c.push(Gate::x(q).ctrls(&proj));
        c.push(Gate::rz(q, 2.0 * a));
        c.push(Gate::x(q).ctrls(&proj));
    };
    let d = psi.len() - 1;
    let mut c = Circuit::new();
    c.push(Gate::h(q));
    rot(&mut c, psi[d]);
    for k in (1..=d).rev() {
        if (d - k) % 2 == 0 {
            c.append(enc.circuit());
        } else {
            c.append(&enc.circuit().adjoint());
        }
        rot(&mut c, psi[k - 1]);
    }
    c.push(Gate::h(q));
    c
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussResult {
    pub x: Vec<f64>,
    /// Block values recovered from the uniform-input amplitudes.
    pub values: Vec<f64>,
    pub expected: Vec<f64>,
    pub max_deviation: f64,
    pub n_pol: usize,
    pub p0: f64,
    #[serde(skip)]
    pub state: QuantumState,
}

/// Gaussian on `2^n_x` points: uniform input, zero-ancilla amplitudes `∝ G(x_j)`.
pub fn gaussian_qsvt(n_x: usize, mu: f64, beta: f64, x_c: f64, eps: f64) -> Result<GaussResult> {
    let (pv, _) = gaussian_phases(mu, beta, x_c, eps)?;
    gaussian_qsvt_with(n_x, &pv, mu, x_c)
}

pub fn gaussian_qsvt_with(n_x: usize, pv: &PhaseVector, mu: f64, x_c: f64) -> Result<GaussResult> {
    let mut l = RegisterLayout::new();
    l.add("r_x", n_x)?;
    let a = l.add("a", 1)?;
    let q = l.add("q", 1)?;
    let rx = l.qubits("r_x")?;
    let (a0, al) = grid_alphas(n_x, x_c);
    let enc = sine_encoding(&rx, a, a0, al);
    let mut s = QuantumState::zero(l);
    for &r in &rx {
        apply_gate(&mut s, &Gate::h(r))?;
    }
    gauss_stage(&enc, pv, q, &mut s)?;
    let succ = [(a, false), (q, false)];
    let scale = ((1usize << n_x) as f64).sqrt();
    let amps = s.slice(&rx, &succ);
    let values: Vec<f64> = amps.iter().map(|v| v.re * scale).collect();
    let x = sine_grid(n_x, a0, al);
    let expected: Vec<f64> = x.iter().map(|&xj| gaussian(xj, mu, pv.beta_sc)).collect();
    let max_deviation = values.iter().zip(&expected).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    let p0 = s.probability(&succ);
    Ok(GaussResult { x, values, expected, max_deviation, n_pol: pv.degree(), p0, state: s })
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoGaussResult {
    pub ae: AEResult,
    /// `p_{m,1}` of the prepared state.
    pub p_m1: f64,
    /// `β_init² Σ_{middle} G²` from the direct formula.
    pub p_m1_classical: f64,
    pub s_g_quantum: f64,
    pub s_g_classical: f64,
    /// AE error bound check in probability units.
    pub within_bound: bool,
    /// Fitted widths of the two lobes on the full `[-1, 1]` grid.
    pub lobe_widths: [f64; 2],
    pub n_pol: usize,
}

/// Two Gaussians from one QSVT on the low `n_x - 1` qubits; the middle half of
/// the domain is flagged on `m` and integrated by gate-level AE.
pub fn two_gaussians_demo(n_x: usize, mu: f64, beta: f64, eps: f64, n_y: usize) -> Result<TwoGaussResult> {
    let (pv, _) = gaussian_phases(mu, beta, 0.0, eps)?;
    two_gaussians_with(n_x, &pv, mu, n_y)
}

pub fn two_gaussians_with(n_x: usize, pv: &PhaseVector, mu: f64, n_y: usize) -> Result<TwoGaussResult> {
    if n_x < 3 {
        return Err(Error::Config("two-Gaussians demo needs n_x >= 3".into()));
    }
    let mut l = RegisterLayout::new();
    l.add("r_x", n_x)?;
    let a = l.add("a", 1)?;
    let q = l.add("q", 1)?;
    let m = l.add("m", 1)?;
    let y0 = l.add("r_y", n_y)?;
    let rx = l.qubits("r_x")?;
    let low = &rx[..n_x - 1];
    let (a0, al) = grid_alphas(n_x - 1, 0.0);
    let enc = sine_encoding(low, a, a0, al);
    let mut prep = Circuit::new();
    for &r in &rx {
        prep.push(Gate::h(r));
    }
    prep.append(&gauss_stage_circuit(&enc, pv, q));
    let (msb, next) = (rx[n_x - 1], rx[n_x - 2]);
    prep.push(Gate::x(m).ctrls(&[(msb, true), (a, false), (q, false)]));
    prep.push(Gate::x(m).ctrls(&[(next, true), (a, false), (q, false)]));
    let mut zero = rx.clone();
    zero.extend([a, q, m]);
    let ae_prep = AePrep { layout: l, prep, zero_qubits: zero, m };

    let mut s = QuantumState::zero(ae_prep.layout.clone());
    ae_prep.prep.apply(&mut s)?;
    let p_m1 = s.probability(&[(m, true)]);
    // m marks half of each lobe; the two branches have disjoint support
    let amps: Vec<C64> = s
        .slice(&rx, &[(a, false), (q, false), (m, false)])
        .iter()
        .zip(s.slice(&rx, &[(a, false), (q, false), (m, true)]))
        .map(|(u, v)| u + v)
        .collect();

    let n = 1usize << n_x;
    let half = n / 2;
    let xg = sine_grid(n_x - 1, a0, al);
    let beta_init2 = 1.0 / n as f64;
    let p_m1_classical: f64 = (0..n)
        .filter(|i| ((i >> (n_x - 1)) ^ (i >> (n_x - 2))) & 1 == 1)
        .map(|i| beta_init2 * gaussian(xg[i % half], mu, pv.beta_sc).powi(2))
        .sum();

    let pos = |i: usize| -1.0 + 2.0 * i as f64 / (n - 1) as f64;
    let width = |range: std::ops::Range<usize>| -> f64 {
        let w: Vec<(f64, f64)> = range.map(|i| (pos(i), amps[i].norm())).collect();
        let tot: f64 = w.iter().map(|p| p.1).sum();
        let mean = w.iter().map(|p| p.0 * p.1).sum::<f64>() / tot;
        (w.iter().map(|p| (p.0 - mean).powi(2) * p.1).sum::<f64>() / tot).sqrt()
    };
    let lobe_widths = [width(0..half), width(half..n)];

    let ry: Vec<usize> = (y0..y0 + n_y).collect();
    let ae = amplitude_estimation(&ae_prep, &ry)?;
    let within_bound = (ae.p_tilde - p_m1_classical).abs() <= ae_delta(p_m1_classical, ae.n_aa());
    Ok(TwoGaussResult {
        s_g_quantum: ae.p_tilde / n as f64,
        s_g_classical: p_m1_classical / n as f64,
        ae,
        p_m1,
        p_m1_classical,
        within_bound,
        lobe_widths,
        n_pol: pv.degree(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FilterResult {
    /// Zero-ancilla amplitudes over `(r_j, r_d)` after both QSVT stages.
    #[serde(skip)]
    pub filtered: Vec<C64>,
    /// `G(x_j)` times the solver output amplitudes.
    #[serde(skip)]
    pub expected: Vec<C64>,
    /// `G(x_j)` times the classical solution, scaled to the same units.
    #[serde(skip)]
    pub classical: Vec<C64>,
    pub max_dev_vs_solver: f64,
    pub max_dev_vs_classical: f64,
    pub p0: f64,
    pub queries_inverse: usize,
    pub queries_gauss: usize,
}

/// Inverse QSVT followed by the Gaussian QSVT over `r_j` (own sine ancilla
/// `a_G` and rotation qubit `q_G`). Both fields are filtered in parallel.
pub fn gaussian_filter(
    p: &WaveProblem,
    kind: EncodingKind,
    phases_inverse: &PhaseVector,
    phases_gauss: &PhaseVector,
    mu: f64,
    x_c: f64,
) -> Result<FilterResult> {
    let layout = wave_layout(p.n_x, kind, &[("a_G", 1), ("q_G", 1)])?;
    let enc = wave_encoding(p, &layout, kind)?;
    let q = layout.qubit("q")?;
    let (ag, qg) = (layout.qubit("a_G")?, layout.qubit("q_G")?);
    let rj = layout.qubits("r_j")?;
    let run = real_polynomial_action(&enc, phases_inverse, q, true, &prepare_b(&layout)?)?;
    let v = run.amplitudes(&enc.system);
    let (a0, al) = grid_alphas(p.n_x, x_c);
    let genc = sine_encoding(&rj, ag, a0, al);
    let mut s = run.state;
    let queries_gauss = gauss_stage(&genc, phases_gauss, qg, &mut s)?;
    let mut succ = run.success.clone();
    succ.extend([(ag, false), (qg, false)]);
    let filtered = s.slice(&enc.system, &succ);
    let p0 = s.probability(&succ);
    let n = p.n_points();
    let g: Vec<f64> = sine_grid(p.n_x, a0, al).iter().map(|&x| gaussian(x, mu, phases_gauss.beta_sc)).collect();
    let gk = |k: usize| g[k % n];
    let expected: Vec<C64> = v.iter().enumerate().map(|(k, a)| a * gk(k)).collect();
    let scale = enc.nu / (phases_inverse.beta_sc * phases_inverse.kappa_qsvt);
    let cl = p.classical_solve()?.psi();
    let classical_raw: Vec<C64> = cl.iter().enumerate().map(|(k, a)| a * scale * gk(k)).collect();
    let classical = align_global_phase(&filtered, &classical_raw);
    let dev = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    Ok(FilterResult {
        max_dev_vs_solver: dev(&filtered, &expected),
        max_dev_vs_classical: dev(&filtered, &classical),
        filtered,
        expected,
        classical,
        p0,
        queries_inverse: run.counters.queries(),
        queries_gauss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphas_span_unit_interval() {
        let (a0, al) = grid_alphas(3, 0.25);
        let g = sine_grid(3, a0, al);
        assert!((g[0] + 1.25).abs() < 1e-15 && (g[7] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn gaussian_symmetric_for_centered_grid() {
        let r = gaussian_qsvt(4, 0.2, 0.5, 0.0, 1e-4).unwrap();
        assert!(r.max_deviation <= 1e-4);
        for j in 0..8 {
            assert!((r.values[j] - r.values[15 - j]).abs() < 1e-9);
        }
    }
}
