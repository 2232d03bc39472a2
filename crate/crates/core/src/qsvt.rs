//! QSVT sequences over a block encoding and the wave-problem inversion.
//!
//! The operator is `e^{iψ_0 Z_Π} O_1 e^{iψ_1 Z_Π} … O_d e^{iψ_d Z_Π}` where `O_d`
//! (applied first) is `U_A`, then `U_A†`, alternating. With `inverse = true`
//! the roles of `U_A` and `U_A†` are swapped so an odd polynomial acts as
//! `p(A†)`, which approximates `A⁻¹` up to scale.
//!
//! Projector rotations go through qubit `q`: a multi-controlled X flags the
//! zero-ancilla subspace, `Rz(2ψ)` acts on `q`, and the flag is undone.

use crate::block_encode::{normalize_matrix, wave_encoding, wave_layout, BlockEncoding, EncodingKind};
use crate::cheb::{scale_for_qsp, truncate_to_eps, ChebSeries, TargetFunction};
use crate::circuit::{apply_gate, Conditions, Gate, QuantumState, RegisterLayout};
use crate::linalg::{svd, vec_norm};
use crate::qsp::{solve_phases_with, PhaseVector, SolveStats, SolverOptions};
use crate::wave::{align_global_phase, compare_solutions, ErrorReport, FieldSolution, WaveProblem};
use crate::{Error, Result, C64};
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounters {
    pub forward: usize,
    pub adjoint: usize,
    pub projector_rotations: usize,
}

impl QueryCounters {
    pub fn queries(&self) -> usize {
        self.forward + self.adjoint
    }
}

fn projector_rotation(state: &mut QuantumState, proj: &Conditions, q: usize, psi: f64) -> Result<()> {
    let flag = Gate::x(q).ctrls(proj);
    apply_gate(state, &flag)?;
    apply_gate(state, &Gate::rz(q, 2.0 * psi))?;
    apply_gate(state, &flag)
}

fn check_layout(enc: &BlockEncoding, q: usize, state: &QuantumState) -> Result<()> {
    if q >= state.n_qubits() || enc.system.contains(&q) || enc.ancillas.contains(&q) {
        return Err(Error::LayoutMismatch(format!("rotation qubit {q} collides with the encoding or is out of range")));
    }
    if enc.system.iter().chain(&enc.ancillas).any(|&x| x >= state.n_qubits()) {
        return Err(Error::LayoutMismatch("encoding qubits exceed the state".into()));
    }
    Ok(())
}

/// Run the sequence with raw projector angles `psi` (length `d+1`).
pub fn apply_qsvt_angles(
    enc: &BlockEncoding,
    psi: &[f64],
    q: usize,
    inverse: bool,
    state: &mut QuantumState,
) -> Result<QueryCounters> {
    check_layout(enc, q, state)?;
    if psi.is_empty() {
        return Err(Error::LayoutMismatch("empty phase vector".into()));
    }
    let proj = enc.projector();
    let d = psi.len() - 1;
    let mut c = QueryCounters::default();
    projector_rotation(state, &proj, q, psi[d])?;
    c.projector_rotations += 1;
    for k in (1..=d).rev() {
        // O_d is U_A (or U_A† for inversion), then alternate
        let use_forward = ((d - k) % 2 == 0) != inverse;
        if use_forward {
            enc.apply(state)?;
            c.forward += 1;
        } else {
            enc.apply_adjoint(state)?;
            c.adjoint += 1;
        }
        projector_rotation(state, &proj, q, psi[k - 1])?;
        c.projector_rotations += 1;
    }
    Ok(c)
}

/// Full-space state after the QSVT sequence for `phases`.
pub fn apply_qsvt(
    enc: &BlockEncoding,
    phases: &PhaseVector,
    q: usize,
    inverse: bool,
    state: &QuantumState,
) -> Result<(QuantumState, QueryCounters)> {
    let mut s = state.clone();
    if s.probability(&enc.projector()) < 1.0 - 1e-12 {
        return Err(Error::LayoutMismatch("encoding ancillas must start in |0⟩".into()));
    }
    let c = apply_qsvt_angles(enc, &phases.reflection_angles(), q, inverse, &mut s)?;
    Ok((s, c))
}

/// Result of a QSVT run with the success subspace attached.
#[derive(Clone, Debug)]
pub struct QsvtRun {
    pub state: QuantumState,
    /// Success conditions: encoding ancillas and `q` at |0⟩.
    pub success: Conditions,
    pub p0: f64,
    pub counters: QueryCounters,
}

impl QsvtRun {
    /// Unnormalized amplitudes over `qubits` in the success subspace.
    pub fn amplitudes(&self, qubits: &[usize]) -> Vec<C64> {
        self.state.slice(qubits, &self.success)
    }

    pub fn conditional_state(&self) -> Result<QuantumState> {
        Ok(self.state.project_and_renormalize(&self.success)?.0)
    }
}

/// Apply `Re p` through the SVT of the encoded block: Hadamards on `q` around
/// the sequence turn the two `q` branches into `±ψ` runs whose average is
/// kept by projecting `q` onto |0⟩.
pub fn real_polynomial_action(
    enc: &BlockEncoding,
    phases: &PhaseVector,
    q: usize,
    inverse: bool,
    state: &QuantumState,
) -> Result<QsvtRun> {
    let mut s = state.clone();
    check_layout(enc, q, &s)?;
    apply_gate(&mut s, &Gate::h(q))?;
    let counters = apply_qsvt_angles(enc, &phases.reflection_angles(), q, inverse, &mut s)?;
    apply_gate(&mut s, &Gate::h(q))?;
    let mut success = enc.projector();
    success.push((q, false));
    let p0 = s.probability(&success);
    if p0 < 1e-30 {
        return Err(Error::ZeroProbability(p0));
    }
    Ok(QsvtRun { state: s, success, p0, counters })
}

/// Same action computed as the average of the `ψ` and `-ψ` sequences.
pub fn real_part_by_averaging(
    enc: &BlockEncoding,
    phases: &PhaseVector,
    q: usize,
    inverse: bool,
    state: &QuantumState,
) -> Result<QuantumState> {
    let psi = phases.reflection_angles();
    let neg: Vec<f64> = psi.iter().map(|v| -v).collect();
    let mut a = state.clone();
    let mut b = state.clone();
    apply_qsvt_angles(enc, &psi, q, inverse, &mut a)?;
    apply_qsvt_angles(enc, &neg, q, inverse, &mut b)?;
    let amps = a.amps.iter().zip(&b.amps).map(|(x, y)| (x + y) * 0.5).collect();
    QuantumState::from_amps(state.layout.clone(), amps)
}

/// `|1⟩_{r_d}|N-1⟩_{r_j}` by X gates on every qubit of both registers.
pub fn prepare_b(layout: &RegisterLayout) -> Result<QuantumState> {
    let mut s = QuantumState::zero(layout.clone());
    for q in layout.qubits("r_j")?.into_iter().chain(layout.qubits("r_d")?) {
        apply_gate(&mut s, &Gate::x(q))?;
    }
    Ok(s)
}

/// Parameters of an inverse-polynomial phase computation.
#[derive(Clone, Debug)]
pub struct InverseSpec {
    pub kappa_qsvt: f64,
    pub eps_qsvt: f64,
    /// Max of the scaled polynomial on [-1, 1].
    pub target_max: f64,
    pub degree_cap: usize,
    pub solver: SolverOptions,
}

impl InverseSpec {
    pub fn new(kappa_qsvt: f64, eps_qsvt: f64) -> Self {
        Self {
            kappa_qsvt,
            eps_qsvt,
            target_max: 0.5,
            degree_cap: crate::cheb::DEFAULT_DEGREE_CAP,
            solver: SolverOptions::default(),
        }
    }
}

/// Phases realizing `P_f / (β_sc κ_qsvt)` for the regularized inverse `f`,
/// together with that scaled series (the phases' target).
pub fn inverse_phases(spec: &InverseSpec) -> Result<(PhaseVector, ChebSeries, SolveStats)> {
    if !(spec.kappa_qsvt >= 1.0) {
        return Err(Error::Config(format!("kappa_qsvt must be >= 1, got {}", spec.kappa_qsvt)));
    }
    let f = TargetFunction::RegInverse { kappa: spec.kappa_qsvt };
    let series = truncate_to_eps(&f, spec.eps_qsvt, spec.degree_cap)?;
    let (scaled, beta) = scale_for_qsp(&series, spec.kappa_qsvt, spec.target_max);
    let (mut pv, stats) = solve_phases_with(&scaled, &spec.solver)?;
    if !stats.converged {
        return Err(Error::NoConvergence(format!(
            "phase solve for degree {} stopped at residual {:e}",
            pv.degree(),
            pv.residual
        )));
    }
    pv.kappa_qsvt = spec.kappa_qsvt;
    pv.eps_qsvt = spec.eps_qsvt;
    pv.beta_sc = beta;
    Ok((pv, scaled, stats))
}

/// Condition numbers of the wave matrix: `κ(A)` and `κ_enc = 1/s_min(A/ν)`.
pub fn condition_numbers(p: &WaveProblem) -> Result<(f64, f64)> {
    let (a, _) = p.build_matrix();
    let (an, _) = normalize_matrix(&a)?;
    let s = svd(&an)?;
    let smin = *s.singulars.last().unwrap();
    if smin <= 1e-14 * s.singulars[0] {
        return Err(Error::SingularMatrix(smin));
    }
    Ok((s.singulars[0] / smin, 1.0 / smin))
}

#[derive(Clone, Debug, Serialize)]
pub struct SolutionRecord {
    pub problem: WaveProblem,
    pub oracle: EncodingKind,
    #[serde(skip)]
    pub quantum: FieldSolution,
    #[serde(skip)]
    pub classical: FieldSolution,
    /// Normalized solution state over `(r_d, r_j)`.
    #[serde(skip)]
    pub psi_x: Vec<C64>,
    /// `β_sc κ_qsvt / ν`: converts zero-ancilla amplitudes to physical fields.
    pub prefactor: f64,
    pub nu: f64,
    pub kappa: f64,
    pub kappa_enc: f64,
    pub kappa_qsvt: f64,
    pub eps_qsvt: f64,
    pub beta_sc: f64,
    pub n_pol: usize,
    pub p0: f64,
    pub queries: usize,
    /// Error of E against the classical solve after phase alignment.
    pub error: ErrorReport,
    /// Same for the full `ψ = (E, B)`.
    pub error_psi: ErrorReport,
}

impl SolutionRecord {
    pub fn fields_csv(&self) -> String {
        let mut s = String::from("j,re_e_q,im_e_q,re_b_q,im_b_q,re_e_c,im_e_c,re_b_c,im_b_c\n");
        let aligned = align_global_phase(&self.classical.psi(), &self.quantum.psi());
        let q = FieldSolution::from_psi(&aligned);
        for j in 0..q.e.len() {
            let _ = writeln!(
                s,
                "{j},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                q.e[j].re,
                q.e[j].im,
                q.b[j].re,
                q.b[j].im,
                self.classical.e[j].re,
                self.classical.e[j].im,
                self.classical.b[j].re,
                self.classical.b[j].im
            );
        }
        s
    }
}

/// Solve the wave problem with the QSVT inverse and compare with the direct solve.
pub fn invert_apply(p: &WaveProblem, kind: EncodingKind, phases: &PhaseVector) -> Result<SolutionRecord> {
    let layout = wave_layout(p.n_x, kind, &[])?;
    let enc = wave_encoding(p, &layout, kind)?;
    invert_with_encoding(p, &layout, &enc, phases)
}

/// The inverse QSVT acting on `|b⟩`, before any readout.
pub fn inverse_run(layout: &RegisterLayout, enc: &BlockEncoding, phases: &PhaseVector) -> Result<QsvtRun> {
    real_polynomial_action(enc, phases, layout.qubit("q")?, true, &prepare_b(layout)?)
}

pub fn invert_with_encoding(
    p: &WaveProblem,
    layout: &RegisterLayout,
    enc: &BlockEncoding,
    phases: &PhaseVector,
) -> Result<SolutionRecord> {
    let run = inverse_run(layout, enc, phases)?;
    record_from_run(p, enc, phases, &run)
}

/// Read the solution out of a finished inverse run and compare with the direct solve.
pub fn record_from_run(p: &WaveProblem, enc: &BlockEncoding, phases: &PhaseVector, run: &QsvtRun) -> Result<SolutionRecord> {
    let v = run.amplitudes(&enc.system);
    let prefactor = phases.beta_sc * phases.kappa_qsvt / enc.nu;
    let x: Vec<C64> = v.iter().map(|a| a * prefactor).collect();
    let nv = vec_norm(&v);
    let psi_x: Vec<C64> = v.iter().map(|a| a / nv).collect();
    let classical = p.classical_solve()?;
    let quantum = FieldSolution::from_psi(&x);
    let (kappa, kappa_enc) = condition_numbers(p)?;
    let error = compare_solutions(&classical.e, &quantum.e)?;
    let error_psi = compare_solutions(&classical.psi(), &x)?;
    Ok(SolutionRecord {
        problem: *p,
        oracle: enc.kind,
        quantum,
        classical,
        psi_x,
        prefactor,
        nu: enc.nu,
        kappa,
        kappa_enc,
        kappa_qsvt: phases.kappa_qsvt,
        eps_qsvt: phases.eps_qsvt,
        beta_sc: phases.beta_sc,
        n_pol: phases.degree(),
        p0: run.p0,
        queries: run.counters.queries(),
        error,
        error_psi,
    })
}
