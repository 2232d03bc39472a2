//! Absorbed power `D = Σ_k E*_{k_B+k} Σ_j G_j E_{k_B+k+j-N_hw}` via two field
//! registers, register arithmetic, a Gaussian QSVT filter and a SWAP test.

use super::gauss::{gaussian, grid_alphas};
use crate::block_encode::{sine_encoding, sine_grid};
use crate::circuit::arith::{compare_const_gates, subtract_const_gates, subtract_register_gates};
use crate::circuit::{Circuit, Gate, QuantumState, RegisterLayout};
use crate::linalg::vec_norm;
use crate::qsp::PhaseVector;
use crate::qsvt::apply_qsvt_angles;
use crate::{Error, Result, C64};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PowerWindow {
    pub k_b: usize,
    /// `N_EB = 2^n_eb` points starting at `k_B`.
    pub n_eb: usize,
    pub n_hw: usize,
    /// Qubits for the `N_w = 2 N_hw + 1` window offsets.
    pub n_w: usize,
}

impl PowerWindow {
    pub fn n_eb_points(&self) -> usize {
        1 << self.n_eb
    }

    pub fn n_w_points(&self) -> usize {
        2 * self.n_hw + 1
    }

    pub fn k_e(&self) -> usize {
        self.k_b + self.n_eb_points() - 1
    }

    /// Grid shift placing the Gaussian peak on offset `N_hw`.
    pub fn x_c(&self) -> f64 {
        -1.0 + 2.0 * self.n_hw as f64 / ((1usize << self.n_w) - 1) as f64
    }

    pub fn validate(&self, n_x: usize) -> Result<()> {
        let n = 1usize << n_x;
        let bad = |m: String| Err(Error::WindowOutOfRange(m));
        if self.n_w_points() > 1 << self.n_w {
            return bad(format!("N_w = {} does not fit {} qubits", self.n_w_points(), self.n_w));
        }
        if self.n_eb > n_x || self.n_w > n_x {
            return bad("window registers wider than the field register".into());
        }
        if self.k_b < self.n_hw || self.k_e() + self.n_hw >= n {
            return bad(format!("window [{}, {}] ± {} leaves the grid of {n}", self.k_b, self.k_e(), self.n_hw));
        }
        Ok(())
    }

    /// `G_j` on the window offsets, from the direct formula.
    pub fn gaussian_weights(&self, mu: f64, beta: f64) -> Vec<f64> {
        let (a0, al) = grid_alphas(self.n_w, self.x_c());
        sine_grid(self.n_w, a0, al).iter().take(self.n_w_points()).map(|&x| gaussian(x, mu, beta)).collect()
    }
}

/// The double sum evaluated directly.
pub fn brute_force_d(e: &[C64], w: &PowerWindow, g: &[f64]) -> C64 {
    (0..w.n_eb_points())
        .map(|k| {
            let inner: C64 = (0..w.n_w_points()).map(|j| e[w.k_b + k + j - w.n_hw] * g[j]).sum();
            e[w.k_b + k].conj() * inner
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerResult {
    pub window: PowerWindow,
    pub k_e: usize,
    pub n_eb_points: usize,
    pub n_w_points: usize,
    pub p0: f64,
    pub p1: f64,
    pub d_abs: f64,
    /// `P = |D| / (2 N_w N_EB)`.
    pub power: f64,
    /// `|D|` from the direct double sum with the same field and the direct Gaussian.
    pub d_brute: f64,
    pub qubits: usize,
    pub gauss_queries: usize,
}

/// Run the pipeline on a field `e` (normalized internally).
pub fn absorbed_power(e: &[C64], w: &PowerWindow, gauss: &PhaseVector, mu: f64) -> Result<PowerResult> {
    let n_x = e.len().trailing_zeros() as usize;
    if e.len() != 1 << n_x {
        return Err(Error::DimensionMismatch(format!("field length {}", e.len())));
    }
    w.validate(n_x)?;
    let ne = vec_norm(e);
    if ne == 0.0 {
        return Err(Error::ZeroProbability(0.0));
    }
    let e: Vec<C64> = e.iter().map(|v| v / ne).collect();

    let mut l = RegisterLayout::new();
    let ii0 = l.add("II", n_x)?;
    let s_ii = l.add("sign_II", 1)?;
    let c_ii = l.add("com_II", 1)?;
    let eb0 = l.add("r_EB", w.n_eb)?;
    let i0 = l.add("I", n_x)?;
    let s_i1 = l.add("sign_I1", 1)?;
    let s_i2 = l.add("sign_I2", 1)?;
    let c_i = l.add("com_I", 1)?;
    let w0 = l.add("r_w", w.n_w)?;
    let ag = l.add("a_G", 1)?;
    let qg = l.add("q_G", 1)?;
    let sel = l.add("sel", 1)?;
    let sw = l.add("swap", 1)?;
    let ii: Vec<usize> = (ii0..ii0 + n_x).collect();
    let eb: Vec<usize> = (eb0..eb0 + w.n_eb).collect();
    let reg_i: Vec<usize> = (i0..i0 + n_x).collect();
    let rw: Vec<usize> = (w0..w0 + w.n_w).collect();

    let mut amps = vec![C64::new(0.0, 0.0); 1 << l.n_qubits()];
    for (k, ek) in e.iter().enumerate() {
        for (p, ep) in e.iter().enumerate() {
            amps[k << ii0 | p << i0] = ek * ep;
        }
    }
    let mut s = QuantumState::from_amps(l.clone(), amps)?;

    let mut c = Circuit::new();
    c.extend(eb.iter().chain(&rw).map(|&q| Gate::h(q)));
    c.extend(subtract_register_gates(&reg_i, s_i1, &eb));
    c.extend(subtract_const_gates(&ii, s_ii, w.k_b as u64));
    c.extend(compare_const_gates(&ii, s_ii, w.n_eb_points() as u64, c_ii));
    c.extend(subtract_const_gates(&reg_i, s_i2, (w.k_b - w.n_hw) as u64));
    c.extend(compare_const_gates(&reg_i, s_i2, w.n_w_points() as u64, c_i));
    c.apply(&mut s)?;

    let (a0, al) = grid_alphas(w.n_w, w.x_c());
    let genc = sine_encoding(&reg_i[..w.n_w], ag, a0, al);
    crate::circuit::apply_gate(&mut s, &Gate::h(qg))?;
    let gq = apply_qsvt_angles(&genc, &gauss.reflection_angles(), qg, false, &mut s)?.queries();
    crate::circuit::apply_gate(&mut s, &Gate::h(qg))?;

    let mut t = Circuit::new();
    t.push(Gate::x(sel).ctrls(&[
        (s_ii, false),
        (c_ii, true),
        (s_i1, false),
        (s_i2, false),
        (c_i, true),
        (ag, false),
        (qg, false),
    ]));
    t.push(Gate::h(sw));
    for b in 0..w.n_eb {
        t.push(Gate::swap(ii[b], eb[b]).ctrl(sw, true));
    }
    for b in 0..w.n_w {
        t.push(Gate::swap(reg_i[b], rw[b]).ctrl(sw, true));
    }
    t.push(Gate::h(sw));
    t.apply(&mut s)?;

    let p0 = s.probability(&[(sel, true), (sw, false)]);
    let p1 = s.probability(&[(sel, true), (sw, true)]);
    let eta = 2f64.powf(-((w.n_eb + w.n_w) as f64) / 2.0);
    let d_abs = (p0 - p1).max(0.0).sqrt() / eta;
    let g = w.gaussian_weights(mu, gauss.beta_sc);
    Ok(PowerResult {
        window: *w,
        k_e: w.k_e(),
        n_eb_points: w.n_eb_points(),
        n_w_points: w.n_w_points(),
        p0,
        p1,
        d_abs,
        power: d_abs / (2.0 * w.n_w_points() as f64 * w.n_eb_points() as f64),
        d_brute: brute_force_d(&e, w, &g).norm(),
        qubits: l.n_qubits(),
        gauss_queries: gq,
    })
}
