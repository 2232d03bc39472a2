//! Statevector simulator: named registers, gates with mixed-polarity controls,
//! circuits as gate lists.
//!
//! Qubit 0 is the least significant bit of the amplitude index. Registers
//! occupy contiguous qubit ranges in the order they are added.

pub mod arith;

use crate::linalg::ComplexMatrix;
use crate::{Error, Result, C64};
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

pub const DEFAULT_QUBIT_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub offset: usize,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    regs: Vec<Register>,
    n_qubits: usize,
    cap: usize,
}

impl Default for RegisterLayout {
    fn default() -> Self {
        Self::new()
    }
}

impl RegisterLayout {
    pub fn new() -> Self {
        Self::with_cap(DEFAULT_QUBIT_CAP)
    }

    pub fn with_cap(cap: usize) -> Self {
        Self { regs: Vec::new(), n_qubits: 0, cap }
    }

    /// Append a register above the existing ones; returns its first qubit.
    pub fn add(&mut self, name: &str, size: usize) -> Result<usize> {
        if self.regs.iter().any(|r| r.name == name) {
            return Err(Error::LayoutMismatch(format!("duplicate register {name}")));
        }
        if self.n_qubits + size > self.cap {
            return Err(Error::CapExceeded { need: self.n_qubits + size, cap: self.cap });
        }
        let offset = self.n_qubits;
        self.regs.push(Register { name: name.into(), offset, size });
        self.n_qubits += size;
        Ok(offset)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn registers(&self) -> &[Register] {
        &self.regs
    }

    pub fn get(&self, name: &str) -> Result<&Register> {
        self.regs
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| Error::IndexError(format!("no register {name}")))
    }

    pub fn has(&self, name: &str) -> bool {
        self.regs.iter().any(|r| r.name == name)
    }

    /// Qubits of a register, least significant first.
    pub fn qubits(&self, name: &str) -> Result<Vec<usize>> {
        let r = self.get(name)?;
        Ok((r.offset..r.offset + r.size).collect())
    }

    pub fn qubit(&self, name: &str) -> Result<usize> {
        let r = self.get(name)?;
        if r.size != 1 {
            return Err(Error::IndexError(format!("register {name} has {} qubits", r.size)));
        }
        Ok(r.offset)
    }
}

/// Pairs `(qubit, value)` used for controls and projections.
pub type Conditions = Vec<(usize, bool)>;

pub fn conditions_for_value(qubits: &[usize], value: usize) -> Conditions {
    qubits.iter().enumerate().map(|(b, &q)| (q, (value >> b) & 1 == 1)).collect()
}

fn mask_of(conds: &[(usize, bool)]) -> (usize, usize) {
    conds.iter().fold((0, 0), |(m, v), &(q, pol)| (m | 1 << q, if pol { v | 1 << q } else { v }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    pub layout: RegisterLayout,
    pub amps: Vec<C64>,
}

impl QuantumState {
    pub fn zero(layout: RegisterLayout) -> Self {
        Self::basis(layout, 0)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << layout.n_qubits()];
        amps[index] = C64::new(1.0, 0.0);
        Self { layout, amps }
    }

    pub fn from_amps(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << layout.n_qubits() {
            return Err(Error::LayoutMismatch(format!("{} amplitudes for {} qubits", amps.len(), layout.n_qubits())));
        }
        Ok(Self { layout, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.n_qubits()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probability(&self, conds: &[(usize, bool)]) -> f64 {
        let (m, v) = mask_of(conds);
        self.amps.iter().enumerate().filter(|(i, _)| i & m == v).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Zero every amplitude that violates `conds` (an unnormalized projection).
    pub fn project(&mut self, conds: &[(usize, bool)]) {
        let (m, v) = mask_of(conds);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m != v {
                *a = C64::new(0.0, 0.0);
            }
        }
    }

    pub fn project_and_renormalize(&self, conds: &[(usize, bool)]) -> Result<(QuantumState, f64)> {
        let p = self.probability(conds);
        if p < 1e-30 {
            return Err(Error::ZeroProbability(p));
        }
        let mut s = self.clone();
        s.project(conds);
        let k = 1.0 / p.sqrt();
        s.amps.iter_mut().for_each(|a| *a *= k);
        Ok((s, p))
    }

    /// Amplitudes `⟨x, fixed| ψ⟩` as a vector over the values `x` of `qubits`,
    /// with the remaining qubits pinned by `fixed`.
    pub fn slice(&self, qubits: &[usize], fixed: &[(usize, bool)]) -> Vec<C64> {
        let (_, v) = mask_of(fixed);
        (0..1usize << qubits.len())
            .map(|x| {
                let idx = qubits.iter().enumerate().fold(v, |acc, (b, &q)| acc | ((x >> b) & 1) << q);
                self.amps[idx]
            })
            .collect()
    }

    /// Write `vals` into the amplitudes addressed like [`QuantumState::slice`].
    pub fn set_slice(&mut self, qubits: &[usize], fixed: &[(usize, bool)], vals: &[C64]) {
        let (_, v) = mask_of(fixed);
        for (x, &val) in vals.iter().enumerate() {
            let idx = qubits.iter().enumerate().fold(v, |acc, (b, &q)| acc | ((x >> b) & 1) << q);
            self.amps[idx] = val;
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,re,im\n");
        for (i, a) in self.amps.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{}", a.re, a.im);
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    P(f64),
    Swap,
    /// Arbitrary single-qubit unitary.
    U2([[C64; 2]; 2]),
    /// Dense unitary on all targets (first target is the least significant).
    Dense(ComplexMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Conditions,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Gate {
    pub fn new(kind: GateKind, target: usize) -> Self {
        Self { kind, targets: vec![target], controls: Vec::new() }
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, q)
    }
    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, q)
    }
    pub fn z(q: usize) -> Self {
        Self::new(GateKind::Z, q)
    }
    pub fn rx(q: usize, t: f64) -> Self {
        Self::new(GateKind::Rx(t), q)
    }
    pub fn ry(q: usize, t: f64) -> Self {
        Self::new(GateKind::Ry(t), q)
    }
    pub fn rz(q: usize, t: f64) -> Self {
        Self::new(GateKind::Rz(t), q)
    }
    pub fn p(q: usize, t: f64) -> Self {
        Self::new(GateKind::P(t), q)
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self { kind: GateKind::Swap, targets: vec![a, b], controls: Vec::new() }
    }
    pub fn dense(targets: Vec<usize>, m: ComplexMatrix) -> Self {
        Self { kind: GateKind::Dense(m), targets, controls: Vec::new() }
    }

    pub fn ctrl(mut self, q: usize, polarity: bool) -> Self {
        self.controls.push((q, polarity));
        self
    }

    pub fn ctrls(mut self, conds: &[(usize, bool)]) -> Self {
        self.controls.extend_from_slice(conds);
        self
    }

    /// 2×2 matrix of a single-target gate.
    pub fn matrix2(&self) -> Option<[[C64; 2]; 2]> {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        Some(match &self.kind {
            GateKind::X => [[z, o], [o, z]],
            GateKind::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
            GateKind::Z => [[o, z], [z, -o]],
            GateKind::H => [[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]],
            GateKind::Rx(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            GateKind::Ry(t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            GateKind::Rz(t) => [[C64::from_polar(1.0, -t / 2.0), z], [z, C64::from_polar(1.0, t / 2.0)]],
            GateKind::P(t) => [[o, z], [z, C64::from_polar(1.0, *t)]],
            GateKind::U2(m) => *m,
            GateKind::Swap | GateKind::Dense(_) => return None,
        })
    }

    pub fn adjoint(&self) -> Self {
        let kind = match &self.kind {
            GateKind::Rx(t) => GateKind::Rx(-t),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rz(t) => GateKind::Rz(-t),
            GateKind::P(t) => GateKind::P(-t),
            GateKind::U2(m) => GateKind::U2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]),
            GateKind::Dense(m) => GateKind::Dense(m.adjoint()),
            k => k.clone(),
        };
        Self { kind, targets: self.targets.clone(), controls: self.controls.clone() }
    }

    /// Matrix transpose in the computational basis (controls are unaffected).
    pub fn transpose(&self) -> Self {
        let kind = match &self.kind {
            GateKind::Y => GateKind::U2([[c(0.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(0.0, 0.0)]]),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::U2(m) => GateKind::U2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]]),
            GateKind::Dense(m) => GateKind::Dense(m.transpose()),
            k => k.clone(),
        };
        Self { kind, targets: self.targets.clone(), controls: self.controls.clone() }
    }

    fn name(&self) -> &'static str {
        match self.kind {
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::Rx(_) => "RX",
            GateKind::Ry(_) => "RY",
            GateKind::Rz(_) => "RZ",
            GateKind::P(_) => "P",
            GateKind::Swap => "SWAP",
            GateKind::U2(_) => "U2",
            GateKind::Dense(_) => "DENSE",
        }
    }

    /// `KIND targets | controls(+/-) | params`
    pub fn dump(&self) -> String {
        let t: Vec<String> = self.targets.iter().map(|q| q.to_string()).collect();
        let cs: Vec<String> = self.controls.iter().map(|&(q, p)| format!("{}{q}", if p { '+' } else { '-' })).collect();
        let params = match &self.kind {
            GateKind::Rx(v) | GateKind::Ry(v) | GateKind::Rz(v) | GateKind::P(v) => v.to_string(),
            GateKind::Dense(m) => format!("dim={}", m.rows),
            _ => String::new(),
        };
        format!("{} {} | {} | {}", self.name(), t.join(" "), cs.join(" "), params).trim_end().to_string()
    }
}

pub fn apply_gate(state: &mut QuantumState, gate: &Gate) -> Result<()> {
    let n = state.n_qubits();
    let check = |q: usize| if q < n { Ok(()) } else { Err(Error::IndexError(format!("qubit {q} of {n}"))) };
    for &q in &gate.targets {
        check(q)?;
    }
    for &(q, _) in &gate.controls {
        check(q)?;
        if gate.targets.contains(&q) {
            return Err(Error::IndexError(format!("qubit {q} is both target and control")));
        }
    }
    let (cm, cv) = mask_of(&gate.controls);
    let amps = &mut state.amps;
    match &gate.kind {
        GateKind::Swap => {
            let (a, b) = (1usize << gate.targets[0], 1usize << gate.targets[1]);
            for i in 0..amps.len() {
                if i & cm == cv && i & a != 0 && i & b == 0 {
                    amps.swap(i, i ^ a ^ b);
                }
            }
        }
        GateKind::Dense(m) => apply_dense(amps, &gate.targets, m, cm, cv)?,
        _ => {
            let u = gate.matrix2().unwrap();
            let t = 1usize << gate.targets[0];
            let dim = amps.len();
            let mut base = 0;
            while base < dim {
                for i in base..base + t {
                    if i & cm == cv {
                        let (a0, a1) = (amps[i], amps[i | t]);
                        amps[i] = u[0][0] * a0 + u[0][1] * a1;
                        amps[i | t] = u[1][0] * a0 + u[1][1] * a1;
                    }
                }
                base += 2 * t;
            }
        }
    }
    Ok(())
}

fn apply_dense(amps: &mut [C64], targets: &[usize], m: &ComplexMatrix, cm: usize, cv: usize) -> Result<()> {
    let k = targets.len();
    if m.rows != 1 << k || m.cols != 1 << k {
        return Err(Error::LayoutMismatch(format!("dense gate {}x{} on {k} targets", m.rows, m.cols)));
    }
    let tmask: usize = targets.iter().map(|&q| 1usize << q).sum();
    let offs: Vec<usize> = (0..1usize << k)
        .map(|x| targets.iter().enumerate().fold(0, |acc, (b, &q)| acc | ((x >> b) & 1) << q))
        .collect();
    let mut buf = vec![C64::new(0.0, 0.0); 1 << k];
    let mut out = vec![C64::new(0.0, 0.0); 1 << k];
    for base in 0..amps.len() {
        if base & tmask != 0 || base & cm != cv {
            continue;
        }
        for (x, &o) in offs.iter().enumerate() {
            buf[x] = amps[base | o];
        }
        for (r, slot) in out.iter_mut().enumerate() {
            *slot = m.row(r).iter().zip(&buf).map(|(a, b)| a * b).sum();
        }
        for (x, &o) in offs.iter().enumerate() {
            amps[base | o] = out[x];
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, g: Gate) -> &mut Self {
        self.gates.push(g);
        self
    }

    pub fn extend(&mut self, gs: impl IntoIterator<Item = Gate>) -> &mut Self {
        self.gates.extend(gs);
        self
    }

    pub fn append(&mut self, other: &Circuit) -> &mut Self {
        self.gates.extend(other.gates.iter().cloned());
        self
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        for g in &self.gates {
            apply_gate(state, g)?;
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self { gates: self.gates.iter().rev().map(Gate::adjoint).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self { gates: self.gates.iter().rev().map(Gate::transpose).collect() }
    }

    /// Add the same control to every gate.
    pub fn controlled(&self, q: usize, polarity: bool) -> Self {
        Self { gates: self.gates.iter().map(|g| g.clone().ctrl(q, polarity)).collect() }
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            let _ = writeln!(s, "{}", g.dump());
        }
        s
    }

    /// Dense matrix over the first `n` qubits (columns are images of basis states).
    pub fn to_matrix(&self, n: usize) -> Result<ComplexMatrix> {
        let dim = 1usize << n;
        let layout = {
            let mut l = RegisterLayout::with_cap(n.max(1));
            l.add("all", n)?;
            l
        };
        let mut m = ComplexMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut s = QuantumState::basis(layout.clone(), col);
            self.apply(&mut s)?;
            for (r, a) in s.amps.iter().enumerate() {
                m[(r, col)] = *a;
            }
        }
        Ok(m)
    }
}

/// Standard QFT `|x⟩ → 2^{-n/2} Σ_y e^{2πi xy/2^n} |y⟩` (or its inverse) on `reg`.
pub fn qft_gates(reg: &[usize], inverse: bool) -> Vec<Gate> {
    let n = reg.len();
    let mut g = Vec::new();
    for j in (0..n).rev() {
        g.push(Gate::h(reg[j]));
        for k in (0..j).rev() {
            let angle = std::f64::consts::PI / (1u64 << (j - k)) as f64;
            g.push(Gate::p(reg[j], angle).ctrl(reg[k], true));
        }
    }
    for i in 0..n / 2 {
        g.push(Gate::swap(reg[i], reg[n - 1 - i]));
    }
    if inverse {
        Circuit { gates: g }.adjoint().gates
    } else {
        g
    }
}

pub fn qft(state: &mut QuantumState, register: &str, inverse: bool) -> Result<()> {
    let reg = state.layout.qubits(register)?;
    Circuit { gates: qft_gates(&reg, inverse) }.apply(state)
}

pub fn increment(state: &mut QuantumState, register: &str, controls: &[(usize, bool)]) -> Result<()> {
    let reg = state.layout.qubits(register)?;
    Circuit { gates: arith::increment_gates(&reg, controls) }.apply(state)
}

pub fn decrement(state: &mut QuantumState, register: &str, controls: &[(usize, bool)]) -> Result<()> {
    let reg = state.layout.qubits(register)?;
    Circuit { gates: arith::decrement_gates(&reg, controls) }.apply(state)
}

/// Unitary whose first column is `v` (normalized): a Householder reflection
/// with a phase fix. Useful for preparing arbitrary small states.
pub fn state_prep_matrix(v: &[C64]) -> ComplexMatrix {
    let n = v.len();
    let nv = crate::linalg::vec_norm(v);
    let u: Vec<C64> = v.iter().map(|x| x / nv).collect();
    let ph = if u[0].norm() > 0.0 { u[0] / u[0].norm() } else { c(1.0, 0.0) };
    // reflect e0 onto u·conj(ph) (real first entry), then restore the phase
    let target: Vec<C64> = u.iter().map(|x| x * ph.conj()).collect();
    let mut w: Vec<C64> = target.iter().map(|x| -x).collect();
    w[0] += c(1.0, 0.0);
    let wn = crate::linalg::vec_norm(&w);
    let mut m = ComplexMatrix::identity(n);
    if wn > 1e-14 {
        for r in 0..n {
            for k in 0..n {
                m[(r, k)] -= w[r] * w[k].conj() * (2.0 / (wn * wn));
            }
        }
    }
    m.scale(ph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layout(n: usize) -> RegisterLayout {
        let mut l = RegisterLayout::new();
        l.add("r", n).unwrap();
        l
    }

    #[test]
    fn rx_on_zero() {
        let mut s = QuantumState::zero(layout(1));
        apply_gate(&mut s, &Gate::rx(0, 0.8)).unwrap();
        assert!((s.amps[0] - c(0.4f64.cos(), 0.0)).norm() < 1e-15);
        assert!((s.amps[1] - c(0.0, -0.4f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn zero_polarity_control() {
        let mut s = QuantumState::zero(layout(2));
        apply_gate(&mut s, &Gate::x(1).ctrl(0, false)).unwrap();
        assert_eq!(s.amps[2], c(1.0, 0.0));
    }

    #[test]
    fn target_control_overlap_rejected() {
        let mut s = QuantumState::zero(layout(2));
        assert!(apply_gate(&mut s, &Gate::x(1).ctrl(1, true)).is_err());
        assert!(apply_gate(&mut s, &Gate::x(5)).is_err());
    }

    #[test]
    fn project_plus() {
        let mut s = QuantumState::zero(layout(1));
        apply_gate(&mut s, &Gate::h(0)).unwrap();
        let (t, p) = s.project_and_renormalize(&[(0, false)]).unwrap();
        assert!((p - 0.5).abs() < 1e-15 && (t.amps[0].norm() - 1.0).abs() < 1e-15);
        let z = QuantumState::zero(layout(1));
        assert!(matches!(z.project_and_renormalize(&[(0, true)]), Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn qft_of_zero_is_uniform() {
        let mut s = QuantumState::zero(layout(3));
        qft(&mut s, "r", false).unwrap();
        for a in &s.amps {
            assert!((a - c(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn inc_dec_wrap() {
        let mut s = QuantumState::zero(layout(3));
        decrement(&mut s, "r", &[]).unwrap();
        assert_eq!(s.amps[7], c(1.0, 0.0));
        let mut s = QuantumState::basis(layout(3), 5);
        increment(&mut s, "r", &[]).unwrap();
        assert_eq!(s.amps[6], c(1.0, 0.0));
    }

    #[test]
    fn state_prep_first_column() {
        let v = vec![c(0.1, 0.2), c(-0.3, 0.0), c(0.0, 0.5), c(0.4, -0.1)];
        let m = state_prep_matrix(&v);
        let n = crate::linalg::vec_norm(&v);
        for (r, x) in v.iter().enumerate() {
            assert!((m[(r, 0)] - x / n).norm() < 1e-14);
        }
        assert!(m.unitarity_residual() < 1e-14);
    }
}
