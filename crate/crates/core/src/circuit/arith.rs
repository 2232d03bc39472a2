//! Gate-level integer arithmetic: incrementor/decrementor, QFT-based constant
//! adder and subtractor with a sign qubit, comparator, register subtractor.

use super::{apply_gate, qft_gates, Circuit, Gate, QuantumState};
use crate::Result;
use std::f64::consts::PI;

/// `|k⟩ → |k+1 mod 2^n⟩`, optionally controlled.
pub fn increment_gates(reg: &[usize], controls: &[(usize, bool)]) -> Vec<Gate> {
    (0..reg.len())
        .rev()
        .map(|i| {
            let lower: Vec<(usize, bool)> = reg[..i].iter().map(|&q| (q, true)).collect();
            Gate::x(reg[i]).ctrls(&lower).ctrls(controls)
        })
        .collect()
}

/// `|k⟩ → |k-1 mod 2^n⟩`.
pub fn decrement_gates(reg: &[usize], controls: &[(usize, bool)]) -> Vec<Gate> {
    let mut g = increment_gates(reg, controls);
    g.reverse();
    g
}

/// Phase-space addition of a constant: between a QFT and its inverse this turns
/// `|x⟩` into `|x+k mod 2^n⟩`.
fn phase_add(reg: &[usize], k: i64, controls: &[(usize, bool)]) -> Vec<Gate> {
    let modulus = (1u64 << reg.len()) as f64;
    reg.iter()
        .enumerate()
        .filter_map(|(b, &q)| {
            let angle = 2.0 * PI * ((k as f64 * (1u64 << b) as f64) % modulus) / modulus;
            (angle != 0.0).then(|| Gate::p(q, angle).ctrls(controls))
        })
        .collect()
}

/// `|j⟩ → |j + k mod 2^n⟩`.
pub fn add_const_gates(reg: &[usize], k: i64) -> Vec<Gate> {
    let mut g = qft_gates(reg, false);
    g.extend(phase_add(reg, k, &[]));
    g.extend(qft_gates(reg, true));
    g
}

fn x_all(qs: &[usize]) -> Vec<Gate> {
    qs.iter().map(|&q| Gate::x(q)).collect()
}

/// `|w⟩ → |w - k mod 2^{n+1}⟩` on `w = reg ∪ {sign}` via `~(~w + k)`.
fn modular_subtract_const(reg: &[usize], sign: usize, k: u64) -> Vec<Gate> {
    let w: Vec<usize> = reg.iter().copied().chain([sign]).collect();
    let mut g = x_all(&w);
    g.extend(add_const_gates(&w, k as i64));
    g.extend(x_all(&w));
    g
}

/// Replace the two's-complement low bits by the absolute value when `sign = 1`.
fn abs_fix(reg: &[usize], sign: usize) -> Vec<Gate> {
    let mut g: Vec<Gate> = reg.iter().map(|&q| Gate::x(q).ctrl(sign, true)).collect();
    g.extend(increment_gates(reg, &[(sign, true)]));
    g
}

/// `|k⟩|0⟩_sign → ||k - k_sub|⟩|k < k_sub⟩`.
pub fn subtract_const_gates(reg: &[usize], sign: usize, k_sub: u64) -> Vec<Gate> {
    let mut g = modular_subtract_const(reg, sign, k_sub);
    g.extend(abs_fix(reg, sign));
    g
}

/// Flip `com` iff `k_com > k`; `reg` and `sign` are restored.
pub fn compare_const_gates(reg: &[usize], sign: usize, k_com: u64, com: usize) -> Vec<Gate> {
    let sub = modular_subtract_const(reg, sign, k_com);
    let mut g = sub.clone();
    g.push(Gate::x(com).ctrl(sign, true));
    g.extend(Circuit { gates: sub }.adjoint().gates);
    g
}

/// `|k⟩_t|0⟩_sign|l⟩_s → ||k - l|⟩_t|k < l⟩_sign|l⟩_s` with phase gates
/// controlled by the subtrahend qubits.
pub fn subtract_register_gates(target: &[usize], sign: usize, sub: &[usize]) -> Vec<Gate> {
    let w: Vec<usize> = target.iter().copied().chain([sign]).collect();
    let mut g = x_all(&w);
    g.extend(qft_gates(&w, false));
    for (c, &sq) in sub.iter().enumerate() {
        g.extend(phase_add(&w, 1i64 << c, &[(sq, true)]));
    }
    g.extend(qft_gates(&w, true));
    g.extend(x_all(&w));
    g.extend(abs_fix(target, sign));
    g
}

fn run(state: &mut QuantumState, gates: &[Gate]) -> Result<()> {
    for g in gates {
        apply_gate(state, g)?;
    }
    Ok(())
}

pub fn subtract_const(state: &mut QuantumState, register: &str, sign: &str, k_sub: u64) -> Result<()> {
    let (r, s) = (state.layout.qubits(register)?, state.layout.qubit(sign)?);
    run(state, &subtract_const_gates(&r, s, k_sub))
}

pub fn add_const(state: &mut QuantumState, register: &str, k: i64) -> Result<()> {
    let r = state.layout.qubits(register)?;
    run(state, &add_const_gates(&r, k))
}

pub fn compare_const(state: &mut QuantumState, register: &str, sign: &str, k_com: u64, com: &str) -> Result<()> {
    let (r, s, c) = (state.layout.qubits(register)?, state.layout.qubit(sign)?, state.layout.qubit(com)?);
    run(state, &compare_const_gates(&r, s, k_com, c))
}

pub fn subtract_register(state: &mut QuantumState, target: &str, sign: &str, subtrahend: &str) -> Result<()> {
    let (t, s, l) = (state.layout.qubits(target)?, state.layout.qubit(sign)?, state.layout.qubits(subtrahend)?);
    run(state, &subtract_register_gates(&t, s, &l))
}
