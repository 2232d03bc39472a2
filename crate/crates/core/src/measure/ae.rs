//! Amplitude estimation by phase estimation over `AA = U_prep REF_0 U_prep† REF_G`.

use crate::circuit::{qft_gates, state_prep_matrix, Circuit, Gate, QuantumState, RegisterLayout};
use crate::{Error, Result, C64};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// `2π√(p(1-p))/N + π²/N²`.
pub fn ae_delta(p: f64, n_aa: usize) -> f64 {
    let n = n_aa as f64;
    2.0 * PI * (p * (1.0 - p)).max(0.0).sqrt() / n + PI * PI / (n * n)
}

/// `p̃ = 1 - sin²(π i_y / N)`.
pub fn p_tilde(i_y: usize, n_aa: usize) -> f64 {
    1.0 - (PI * i_y as f64 / n_aa as f64).sin().powi(2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AEResult {
    pub n_y: usize,
    pub i_y: usize,
    pub p_tilde: f64,
    /// Half-width with `p̃` in place of the unknown probability.
    pub delta: f64,
    /// Exact outcome distribution over `i_y`.
    pub distribution: Vec<f64>,
}

impl AEResult {
    fn from_distribution(n_y: usize, distribution: Vec<f64>) -> Self {
        let n = 1usize << n_y;
        let i_y = (0..n).fold(0, |b, i| if distribution[i] > distribution[b] + 1e-15 { i } else { b });
        let p = p_tilde(i_y, n);
        Self { n_y, i_y, p_tilde: p, delta: ae_delta(p, n), distribution }
    }

    pub fn n_aa(&self) -> usize {
        1 << self.n_y
    }

    /// Total probability of outcomes whose `p̃` is within the bound for `p_true`.
    pub fn success_mass(&self, p_true: f64) -> f64 {
        let n = self.n_aa();
        let bound = ae_delta(p_true, n);
        (0..n).filter(|&i| (p_tilde(i, n) - p_true).abs() <= bound + 1e-12).map(|i| self.distribution[i]).sum()
    }

    /// Seeded multinomial draws from the exact distribution.
    pub fn sample(&self, shots: usize, seed: u64) -> Result<Vec<usize>> {
        let w = WeightedIndex::new(self.distribution.iter().map(|p| p.max(0.0)))
            .map_err(|e| Error::Config(format!("bad AE distribution: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..shots).map(|_| w.sample(&mut rng)).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("i_y,p_tilde,prob\n");
        for (i, p) in self.distribution.iter().enumerate() {
            let _ = writeln!(s, "{i},{:.12e},{p:.12e}", p_tilde(i, self.n_aa()));
        }
        s
    }
}

/// State preparation for AE: `prep` maps |0…0⟩ to a state whose good part is
/// flagged by `m = 1`; `zero_qubits` are all qubits `prep` acts on, `m` included.
#[derive(Clone, Debug)]
pub struct AePrep {
    pub layout: RegisterLayout,
    pub prep: Circuit,
    pub zero_qubits: Vec<usize>,
    pub m: usize,
}

impl AePrep {
    /// Grover iterate `U_prep REF_0 U_prep† REF_G` as a gate list (REF_G applied first).
    pub fn grover(&self) -> Circuit {
        let others: Vec<(usize, bool)> = self.zero_qubits.iter().filter(|&&q| q != self.m).map(|&q| (q, false)).collect();
        let mut c = Circuit::new();
        c.push(Gate::z(self.m));
        c.append(&self.prep.adjoint());
        c.push(Gate::x(self.m));
        c.push(Gate::z(self.m).ctrls(&others));
        c.push(Gate::x(self.m));
        c.append(&self.prep);
        c
    }

    pub fn good_probability(&self) -> Result<f64> {
        let mut s = QuantumState::zero(self.layout.clone());
        self.prep.apply(&mut s)?;
        Ok(s.probability(&[(self.m, true)]))
    }
}

/// Gate-level AE: `r_y` must be a register of `prep.layout` disjoint from the
/// prep qubits.
pub fn amplitude_estimation(prep: &AePrep, r_y: &[usize]) -> Result<AEResult> {
    if r_y.iter().any(|q| prep.zero_qubits.contains(q)) {
        return Err(Error::LayoutMismatch("counting register overlaps the prep qubits".into()));
    }
    let mut s = QuantumState::zero(prep.layout.clone());
    prep.prep.apply(&mut s)?;
    let grover = prep.grover();
    for (k, &y) in r_y.iter().enumerate() {
        crate::circuit::apply_gate(&mut s, &Gate::h(y))?;
        let cg = grover.controlled(y, true);
        for _ in 0..1usize << k {
            cg.apply(&mut s)?;
        }
    }
    let mut iq = Circuit::new();
    iq.extend(qft_gates(r_y, true));
    iq.apply(&mut s)?;
    let n = 1usize << r_y.len();
    let mut dist = vec![0.0; n];
    for (i, a) in s.amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let y = r_y.iter().enumerate().fold(0, |acc, (b, &q)| acc | ((i >> q) & 1) << b);
        dist[y] += a.norm_sqr();
    }
    Ok(AEResult::from_distribution(r_y.len(), dist))
}

/// `U_sim = Ry(2θ_E)` on a single flag qubit, `sin²θ_E = p`.
pub fn simplified_prep(p: f64, n_y: usize) -> Result<(AePrep, Vec<usize>)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError(p));
    }
    let mut l = RegisterLayout::new();
    let m = l.add("m", 1)?;
    let y0 = l.add("r_y", n_y)?;
    let theta = p.sqrt().asin();
    let mut prep = Circuit::new();
    prep.push(Gate::ry(m, 2.0 * theta));
    Ok((AePrep { layout: l, prep, zero_qubits: vec![m], m }, (y0..y0 + n_y).collect()))
}

/// Multi-qubit prep: dense state preparation of `amps` on a data register,
/// flag `m` set on the indices where `good` holds.
pub fn state_prep_with_flag(amps: &[C64], good: impl Fn(usize) -> bool, n_y: usize) -> Result<(AePrep, Vec<usize>)> {
    let n_d = amps.len().trailing_zeros() as usize;
    if amps.len() != 1 << n_d {
        return Err(Error::DimensionMismatch(format!("{} amplitudes", amps.len())));
    }
    let mut l = RegisterLayout::new();
    let d0 = l.add("data", n_d)?;
    let m = l.add("m", 1)?;
    let y0 = l.add("r_y", n_y)?;
    let data: Vec<usize> = (d0..d0 + n_d).collect();
    let mut prep = Circuit::new();
    prep.push(Gate::dense(data.clone(), state_prep_matrix(amps)));
    for idx in (0..amps.len()).filter(|&i| good(i)) {
        prep.push(Gate::x(m).ctrls(&crate::circuit::conditions_for_value(&data, idx)));
    }
    let mut zero = data;
    zero.push(m);
    Ok((AePrep { layout: l, prep, zero_qubits: zero, m }, (y0..y0 + n_y).collect()))
}

/// `Ẽ = (β_sc κ)² / N_area · (p̃ ± δ)`; returns `(Ẽ, half-width)`.
pub fn energy_estimate(ae: &AEResult, beta_sc: f64, kappa: f64, n_area: usize) -> Result<(f64, f64)> {
    if n_area == 0 {
        return Err(Error::Config("N_x_area must be >= 1".into()));
    }
    let f = (beta_sc * kappa).powi(2) / n_area as f64;
    Ok((f * ae.p_tilde, f * ae.delta))
}

/// `p(flag = 1)` of a SWAP test between two registers holding `psi` and `lambda`.
pub fn swap_test(psi: &[C64], lambda: &[C64]) -> Result<f64> {
    if psi.len() != lambda.len() || !psi.len().is_power_of_two() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", psi.len(), lambda.len())));
    }
    let n = psi.len().trailing_zeros() as usize;
    let mut l = RegisterLayout::new();
    let a0 = l.add("a", n)?;
    let b0 = l.add("b", n)?;
    let f = l.add("flag", 1)?;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << (2 * n + 1)];
    for (i, x) in psi.iter().enumerate() {
        for (j, y) in lambda.iter().enumerate() {
            amps[i | j << n] = x * y;
        }
    }
    let mut s = QuantumState::from_amps(l, amps)?;
    let mut c = Circuit::new();
    c.push(Gate::h(f));
    for b in 0..n {
        c.push(Gate::swap(a0 + b, b0 + b).ctrl(f, true));
    }
    c.push(Gate::h(f));
    c.apply(&mut s)?;
    Ok(s.probability(&[(f, true)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_reference_value() {
        assert!((ae_delta(0.25, 64) - 0.0449).abs() < 1e-4);
    }

    #[test]
    fn zero_probability_maps_to_half_range() {
        let (prep, ry) = simplified_prep(0.0, 4).unwrap();
        let r = amplitude_estimation(&prep, &ry).unwrap();
        assert!((r.distribution[8] - 1.0).abs() < 1e-12);
        assert_eq!(r.p_tilde, 0.0);
    }

    #[test]
    fn swap_test_identity() {
        let a = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let b = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let p = swap_test(&a, &b).unwrap();
        assert!((p - (1.0 - 0.36) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn sampling_is_seeded() {
        let (prep, ry) = simplified_prep(0.3, 4).unwrap();
        let r = amplitude_estimation(&prep, &ry).unwrap();
        assert_eq!(r.sample(50, 7).unwrap(), r.sample(50, 7).unwrap());
    }
}
