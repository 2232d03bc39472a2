//! Wave-number spectrum of the E field via a QFT on `r_j`.

use crate::circuit::{qft_gates, Circuit, QuantumState, RegisterLayout};
use crate::config::Half;
use crate::{Error, Result, C64};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// `k_j = -k_max + Δk j`.
    pub k: Vec<f64>,
    pub prob: Vec<f64>,
    /// Probability of the post-selection (E field and chosen half).
    pub selection_probability: f64,
}

impl SpectrumResult {
    /// Bin indices sorted by decreasing probability (ties by index).
    pub fn ranked_bins(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.prob.len()).collect();
        idx.sort_by(|&a, &b| self.prob[b].partial_cmp(&self.prob[a]).unwrap().then(a.cmp(&b)));
        idx
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,k,prob\n");
        for (j, (k, p)) in self.k.iter().zip(&self.prob).enumerate() {
            let _ = writeln!(s, "{j},{k:.12e},{p:.12e}");
        }
        s
    }

    pub fn max_deviation(&self, other: &SpectrumResult) -> f64 {
        self.prob.iter().zip(&other.prob).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// k-grid for `n` points with spacing `dx` in position.
pub fn k_grid(n: usize, dx: f64) -> Vec<f64> {
    let kmax = PI / dx;
    let dk = 2.0 * kmax / n as f64;
    (0..n).map(|j| -kmax + dk * j as f64).collect()
}

/// QFT output index holding bin `j`: the forward QFT has kernel `e^{+2πi xy/N}`.
pub fn bin_to_qft_index(j: usize, n: usize) -> usize {
    (n / 2 + n - j) % n
}

/// Post-select E (and optionally a half domain), QFT the remaining `r_j` qubits.
pub fn spectrum(state: &QuantumState, half: Half, dx: f64) -> Result<SpectrumResult> {
    let l = &state.layout;
    let rj = l.qubits("r_j")?;
    let rd = l.qubit("r_d")?;
    let mut conds = vec![(rd, false)];
    let msb = *rj.last().unwrap();
    let active: Vec<usize> = match half {
        Half::Full => rj.clone(),
        Half::Left | Half::Right => {
            conds.push((msb, half == Half::Right));
            rj[..rj.len() - 1].to_vec()
        }
    };
    // every qubit outside r_j/r_d is an ancilla that must be |0⟩ in the data branch
    for q in 0..state.n_qubits() {
        if !rj.contains(&q) && q != rd {
            conds.push((q, false));
        }
    }
    let (mut s, p) = state.project_and_renormalize(&conds)?;
    let mut c = Circuit::new();
    c.extend(qft_gates(&active, false));
    c.apply(&mut s)?;
    let n = 1usize << active.len();
    let amps = s.slice(&active, &conds);
    let prob: Vec<f64> = (0..n).map(|j| amps[bin_to_qft_index(j, n)].norm_sqr()).collect();
    Ok(SpectrumResult { k: k_grid(n, dx), prob, selection_probability: p })
}

/// Normalized DFT `F(k) = N^{-1/2} Σ_x f_x e^{-ik x Δx}` on the same grid.
pub fn classical_fft_reference(field: &[C64], dx: f64) -> Result<SpectrumResult> {
    let n = field.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!("field length {n} is not a power of two")));
    }
    let norm: f64 = field.iter().map(|v| v.norm_sqr()).sum();
    if norm == 0.0 {
        return Err(Error::ZeroProbability(0.0));
    }
    let ks = k_grid(n, dx);
    let prob = ks
        .iter()
        .map(|&k| {
            let f: C64 = field.iter().enumerate().map(|(x, v)| v * C64::from_polar(1.0, -k * x as f64 * dx)).sum();
            f.norm_sqr() / (n as f64 * norm)
        })
        .collect();
    Ok(SpectrumResult { k: ks, prob, selection_probability: 1.0 })
}

/// The E field (or one half of it) that [`spectrum`] sees.
pub fn select_field(e: &[C64], half: Half) -> Vec<C64> {
    let n = e.len();
    match half {
        Half::Full => e.to_vec(),
        Half::Left => e[..n / 2].to_vec(),
        Half::Right => e[n / 2..].to_vec(),
    }
}

/// State over `(r_j, r_d)` holding `psi = (E, B)`.
pub fn field_state(psi: &[C64]) -> Result<QuantumState> {
    let n_x = (psi.len() / 2).trailing_zeros() as usize;
    let mut l = RegisterLayout::new();
    l.add("r_j", n_x)?;
    l.add("r_d", 1)?;
    QuantumState::from_amps(l, psi.to_vec())
}
