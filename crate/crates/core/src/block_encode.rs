//! Block encodings `⟨0|_anc U |0⟩_anc = A/ν`.
//!
//! * [`exact_dilation`]: a dense unitary built from the SVD of `A/ν`.
//! * [`structured_oracle`]: the gate-level oracle for the wave matrix with
//!   ancillas `a_d`, `a_j`, `a_v`.
//! * [`sine_encoding`]: diagonal `sin(x_j)` for the Gaussian pipeline.

use crate::circuit::{conditions_for_value, Circuit, Conditions, Gate, QuantumState, RegisterLayout};
use crate::linalg::{max_norm, svd, ComplexMatrix};
use crate::wave::WaveProblem;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Sparsity-related factor; `ν = d_H² ‖A‖_max`.
pub const D_H: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Dilation,
    Structured,
    Sine,
}

#[derive(Clone, Debug)]
pub struct BlockEncoding {
    pub kind: EncodingKind,
    /// `A_enc = A / ν`.
    pub nu: f64,
    /// Qubits carrying the matrix index, least significant first.
    pub system: Vec<usize>,
    /// Projector: all of these at |0⟩.
    pub ancillas: Vec<usize>,
    /// Extra power of two applied to ν to keep rotation arguments in range.
    pub rescale_exponent: u32,
    pub angles: Option<OracleAngles>,
    forward: Circuit,
    backward: Circuit,
}

impl BlockEncoding {
    fn new(kind: EncodingKind, nu: f64, system: Vec<usize>, ancillas: Vec<usize>, forward: Circuit) -> Self {
        let backward = forward.adjoint();
        Self { kind, nu, system, ancillas, rescale_exponent: 0, angles: None, forward, backward }
    }

    pub fn apply(&self, state: &mut QuantumState) -> Result<()> {
        self.forward.apply(state)
    }

    pub fn apply_adjoint(&self, state: &mut QuantumState) -> Result<()> {
        self.backward.apply(state)
    }

    pub fn circuit(&self) -> &Circuit {
        &self.forward
    }

    pub fn projector(&self) -> Conditions {
        self.ancillas.iter().map(|&q| (q, false)).collect()
    }

    pub fn dim(&self) -> usize {
        1 << self.system.len()
    }

    fn local_layout(&self) -> Result<(RegisterLayout, Vec<usize>)> {
        let used: Vec<usize> = self.system.iter().chain(&self.ancillas).copied().collect();
        let top = used.iter().copied().max().unwrap_or(0) + 1;
        let mut l = RegisterLayout::with_cap(top.max(1));
        l.add("all", top)?;
        Ok((l, used))
    }

    /// `⟨row, 0| U |col, 0⟩` for all system indices.
    pub fn block_readback(&self) -> Result<ComplexMatrix> {
        let (layout, _) = self.local_layout()?;
        let zero = self.projector();
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for col in 0..n {
            let mut s = QuantumState::zero(layout.clone());
            s.amps.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            s.set_slice(&self.system, &zero, &[C64::new(1.0, 0.0)]);
            let mut basis = s.clone();
            basis.amps.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            let idx_vals: Vec<C64> = (0..n).map(|x| C64::new(if x == col { 1.0 } else { 0.0 }, 0.0)).collect();
            basis.set_slice(&self.system, &zero, &idx_vals);
            self.apply(&mut basis)?;
            let out = basis.slice(&self.system, &zero);
            for (r, v) in out.into_iter().enumerate() {
                m[(r, col)] = v;
            }
        }
        Ok(m)
    }

    /// `max |U†U - I|` over the qubits the encoding touches.
    pub fn unitarity_residual(&self) -> Result<f64> {
        let (layout, used) = self.local_layout()?;
        let k = used.len();
        let mut u = ComplexMatrix::zeros(1 << k, 1 << k);
        for col in 0..1usize << k {
            let idx = used.iter().enumerate().fold(0, |acc, (b, &q)| acc | ((col >> b) & 1) << q);
            let mut s = QuantumState::basis(layout.clone(), idx);
            self.apply(&mut s)?;
            let out = s.slice(&used, &[]);
            for (r, v) in out.into_iter().enumerate() {
                u[(r, col)] = v;
            }
        }
        Ok(u.unitarity_residual())
    }
}

/// `A_norm = A / (d_H² ‖A‖_max)`.
pub fn normalize_matrix(a: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let m = max_norm(a);
    if m == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let nu = D_H * D_H * m;
    Ok((a.scale(C64::new(1.0 / nu, 0.0)), nu))
}

/// Dense unitary `[[A, U_L√(I-S²)U_L†], [U_R√(I-S²)U_R†, -A†]]`; the dilation
/// ancilla is the most significant qubit of the dense gate.
pub fn dilation_unitary(a_norm: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = svd(a_norm)?;
    let smax = d.singulars[0];
    if smax > 1.0 + 1e-12 {
        return Err(Error::NormTooLarge(smax));
    }
    let c: Vec<C64> = d.singulars.iter().map(|&s| C64::new((1.0 - s * s).max(0.0).sqrt(), 0.0)).collect();
    let cd = ComplexMatrix::diag(&c);
    let cl = d.u_left.matmul(&cd).matmul(&d.u_left.adjoint());
    let cr = d.u_right.matmul(&cd).matmul(&d.u_right.adjoint());
    let n = a_norm.rows;
    let mut u = ComplexMatrix::zeros(2 * n, 2 * n);
    for r in 0..n {
        for k in 0..n {
            u[(r, k)] = a_norm[(r, k)];
            u[(r, n + k)] = cl[(r, k)];
            u[(n + r, k)] = cr[(r, k)];
            u[(n + r, n + k)] = -a_norm[(k, r)].conj();
        }
    }
    Ok(u)
}

pub fn exact_dilation(a_norm: &ComplexMatrix, nu: f64, system: &[usize], ancilla: usize) -> Result<BlockEncoding> {
    if a_norm.rows != 1 << system.len() || !a_norm.is_square() {
        return Err(Error::LayoutMismatch(format!("{}x{} matrix on {} qubits", a_norm.rows, a_norm.cols, system.len())));
    }
    let u = dilation_unitary(a_norm)?;
    let mut targets = system.to_vec();
    targets.push(ancilla);
    let mut c = Circuit::new();
    c.push(Gate::dense(targets, u));
    Ok(BlockEncoding::new(EncodingKind::Dilation, nu, system.to_vec(), vec![ancilla], c))
}

/// Rotation angles of the structured oracle, computed for the normalized matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleAngles {
    pub theta_omega_eps: [f64; 2],
    pub theta_omega: f64,
    pub theta_omega_eps0_e: f64,
    pub theta_omega_e: f64,
    pub theta_eta_plus_1: f64,
    pub theta_eta_minus_1: f64,
    pub theta_eta_plus_2: f64,
    pub theta_eta_minus_2: f64,
    pub theta_plus_sigma: f64,
    pub theta_minus_sigma: f64,
    pub theta_plus_sigma_e: f64,
    pub theta_minus_sigma_e: f64,
    pub theta_plus_pi: f64,
    pub theta_minus_pi: f64,
}

fn arcsin_checked(v: f64) -> Result<f64> {
    if v.abs() > 1.0 {
        return Err(Error::AngleDomain(v));
    }
    Ok(2.0 * v.asin())
}

/// Largest arcsin argument needed by the oracle for normalization `nu`.
fn max_angle_argument(p: &WaveProblem, nu: f64) -> f64 {
    let dh32 = D_H.powf(1.5);
    let w = p.omega / nu;
    let s = p.sigma() / nu;
    let emax = p.eps0.max(p.eps1);
    [
        w * emax * D_H,
        w * D_H,
        w * p.eps0 * dh32,
        w * dh32,
        p.eta_plus().norm() / nu * dh32,
        p.eta_minus().norm() / nu * D_H * D_H,
        s * D_H * D_H,
        s * dh32,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

impl OracleAngles {
    pub fn compute(p: &WaveProblem, nu: f64) -> Result<Self> {
        let dh32 = D_H.powf(1.5);
        let w = p.omega / nu;
        let s = p.sigma() / nu;
        let (ep, em) = (p.eta_plus() / nu, p.eta_minus() / nu);
        let tps = arcsin_checked(s * D_H * D_H)?;
        let tms = arcsin_checked(-s * D_H * D_H)?;
        Ok(Self {
            theta_omega_eps: [arcsin_checked(-w * p.eps0 * D_H)?, arcsin_checked(-w * p.eps1 * D_H)?],
            theta_omega: arcsin_checked(-w * D_H)?,
            theta_omega_eps0_e: arcsin_checked(-w * p.eps0 * dh32)?,
            theta_omega_e: arcsin_checked(-w * dh32)?,
            theta_eta_plus_1: -2.0 * ep.arg(),
            theta_eta_minus_1: -2.0 * em.arg(),
            theta_eta_plus_2: arcsin_checked(ep.norm() * dh32)?,
            theta_eta_minus_2: arcsin_checked(em.norm() * D_H * D_H)?,
            theta_plus_sigma: tps,
            theta_minus_sigma: tms,
            theta_plus_sigma_e: arcsin_checked(s * dh32)? - tps,
            theta_minus_sigma_e: arcsin_checked(-s * dh32)? - tms,
            theta_plus_pi: -tps,
            theta_minus_pi: -tms,
        })
    }
}

/// Rotation sequence putting `v_des / c_d` into the |1⟩ amplitude of `target`
/// (Rx for imaginary, Ry for real, `R_c = Ry·Rz` otherwise).
pub fn encode_value_rotation(v_des: C64, c_d: f64, target: usize) -> Result<Vec<Gate>> {
    let r = v_des.norm() / c_d;
    if r > 1.0 + 1e-15 {
        return Err(Error::AngleDomain(r));
    }
    if v_des.re == 0.0 {
        Ok(vec![Gate::rx(target, arcsin_checked(-v_des.im / c_d)?)])
    } else if v_des.im == 0.0 {
        Ok(vec![Gate::ry(target, arcsin_checked(v_des.re / c_d)?)])
    } else {
        Ok(vec![Gate::rz(target, -2.0 * v_des.arg()), Gate::ry(target, arcsin_checked(r.min(1.0))?)])
    }
}

fn rc(q: usize, t1: f64, t2: f64, conds: &[(usize, bool)]) -> [Gate; 2] {
    [Gate::rz(q, t1).ctrls(conds), Gate::ry(q, t2).ctrls(conds)]
}

/// Named qubits of the structured oracle.
#[derive(Clone, Debug)]
pub struct StructuredQubits {
    pub r_j: Vec<usize>,
    pub r_d: usize,
    pub a_d: usize,
    pub a_j: usize,
    pub a_v: usize,
}

impl StructuredQubits {
    pub fn from_layout(l: &RegisterLayout) -> Result<Self> {
        Ok(Self {
            r_j: l.qubits("r_j")?,
            r_d: l.qubit("r_d")?,
            a_d: l.qubit("a_d")?,
            a_j: l.qubit("a_j")?,
            a_v: l.qubit("a_v")?,
        })
    }
}

/// Gate-level oracle for the wave matrix.
///
/// The circuit below is written with row semantics (input row index, output
/// column index) as `O_bulk† O_B O_M O_H O_F O_bulk`; its block is `A^T/ν`, so
/// the returned encoding is its gate-level transpose.
pub fn structured_oracle(p: &WaveProblem, qb: &StructuredQubits) -> Result<BlockEncoding> {
    if p.n_x < 2 || qb.r_j.len() != p.n_x {
        return Err(Error::LayoutMismatch("structured oracle needs n_x >= 2 and |r_j| = n_x".into()));
    }
    let (a, _) = p.build_matrix();
    let (_, nu0) = normalize_matrix(&a)?;
    let mut nu = nu0;
    let mut rescale = 0u32;
    while max_angle_argument(p, nu) > 1.0 {
        nu *= 2.0;
        rescale += 1;
    }
    let th = OracleAngles::compute(p, nu)?;
    let n = p.n_points();
    let (rd, ad, aj, av) = (qb.r_d, qb.a_d, qb.a_j, qb.a_v);
    let msb = *qb.r_j.last().unwrap();
    let row = |d: bool, j: usize| -> Conditions {
        let mut c = conditions_for_value(&qb.r_j, j);
        c.push((rd, d));
        c
    };
    let slot = |j1: bool, d1: bool| -> Conditions { vec![(aj, j1), (ad, d1)] };
    let cat = |a: Conditions, b: Conditions| -> Conditions { a.into_iter().chain(b).collect() };

    let mut o_bulk = Circuit::new();
    o_bulk.push(Gate::h(ad));
    o_bulk.push(Gate::h(aj).ctrl(ad, true).ctrl(rd, false));
    o_bulk.push(Gate::h(aj).ctrl(ad, false).ctrl(rd, true));

    let mut o_f = Circuit::new();
    o_f.push(Gate::h(aj).ctrl(ad, false).ctrls(&row(false, 0)));
    o_f.push(Gate::h(aj).ctrl(ad, true).ctrls(&row(true, n - 1)));

    let mut o_h = Circuit::new();
    // bulk values
    o_h.push(Gate::rx(av, th.theta_omega_eps[0]).ctrls(&[(rd, false), (aj, false), (ad, false), (msb, false)]));
    o_h.push(Gate::rx(av, th.theta_omega_eps[1]).ctrls(&[(rd, false), (aj, false), (ad, false), (msb, true)]));
    o_h.push(Gate::rx(av, th.theta_omega).ctrls(&[(rd, true), (aj, false), (ad, true)]));
    o_h.push(Gate::ry(av, th.theta_plus_sigma).ctrls(&[(rd, false), (ad, true), (aj, false)]));
    o_h.push(Gate::ry(av, th.theta_minus_sigma).ctrls(&[(rd, false), (ad, true), (aj, true)]));
    o_h.push(Gate::ry(av, th.theta_minus_sigma).ctrls(&[(rd, true), (ad, false), (aj, false)]));
    o_h.push(Gate::ry(av, th.theta_plus_sigma).ctrls(&[(rd, true), (ad, false), (aj, true)]));
    // row k = 0: η+ on the diagonal slot, η- on the slot opened by O_F, σ slots removed
    let r0 = row(false, 0);
    o_h.push(Gate::rx(av, -th.theta_omega_eps[0]).ctrls(&cat(r0.clone(), slot(false, false))));
    o_h.extend(rc(av, th.theta_eta_plus_1, th.theta_eta_plus_2, &cat(r0.clone(), slot(false, false))));
    o_h.extend(rc(av, th.theta_eta_minus_1, th.theta_eta_minus_2, &cat(r0.clone(), slot(true, false))));
    o_h.push(Gate::ry(av, th.theta_plus_pi).ctrls(&cat(r0.clone(), slot(false, true))));
    o_h.push(Gate::ry(av, th.theta_minus_pi).ctrls(&cat(r0, slot(true, true))));
    // diagonal entries whose column amplitude is modified by O_B
    o_h.push(
        Gate::rx(av, th.theta_omega_eps0_e - th.theta_omega_eps[0]).ctrls(&cat(row(false, 1), slot(false, false))),
    );
    o_h.push(Gate::rx(av, th.theta_omega_e - th.theta_omega).ctrls(&cat(row(true, n - 2), slot(false, true))));
    // row k = 2N-1
    let rl = row(true, n - 1);
    o_h.push(Gate::rx(av, -th.theta_omega).ctrls(&cat(rl.clone(), slot(false, true))));
    o_h.extend(rc(av, th.theta_eta_plus_1, th.theta_eta_plus_2, &cat(rl.clone(), slot(false, true))));
    o_h.extend(rc(av, th.theta_eta_minus_1, th.theta_eta_minus_2, &cat(rl.clone(), slot(true, true))));
    o_h.push(Gate::ry(av, th.theta_minus_pi).ctrls(&cat(rl.clone(), slot(false, false))));
    o_h.push(Gate::ry(av, th.theta_plus_pi).ctrls(&cat(rl, slot(true, false))));
    o_h.push(Gate::x(av));

    let mut o_m = Circuit::new();
    o_m.extend(crate::circuit::arith::increment_gates(&qb.r_j, &[(aj, true), (ad, false)]));
    o_m.extend(crate::circuit::arith::decrement_gates(&qb.r_j, &[(aj, true), (ad, true)]));
    o_m.push(Gate::swap(ad, rd));

    let mut o_b = Circuit::new();
    o_b.push(Gate::h(aj).ctrl(ad, false).ctrls(&row(false, 1)));
    o_b.push(Gate::h(aj).ctrl(ad, true).ctrls(&row(true, n - 2)));

    let mut rows = Circuit::new();
    rows.append(&o_bulk).append(&o_f).append(&o_h).append(&o_m).append(&o_b).append(&o_bulk.adjoint());
    let mut system = qb.r_j.clone();
    system.push(rd);
    let mut enc = BlockEncoding::new(EncodingKind::Structured, nu, system, vec![ad, aj, av], rows.transpose());
    enc.rescale_exponent = rescale;
    enc.angles = Some(th);
    Ok(enc)
}

/// Build and verify the structured oracle against the normalized matrix.
pub fn verified_structured_oracle(p: &WaveProblem, qb: &StructuredQubits, tol: f64) -> Result<BlockEncoding> {
    let enc = structured_oracle(p, qb)?;
    let dev = block_deviation(&enc, p)?;
    if dev > tol {
        return Err(Error::BlockMismatch(dev));
    }
    Ok(enc)
}

/// Max entry deviation between the encoded block and `A/ν`.
pub fn block_deviation(enc: &BlockEncoding, p: &WaveProblem) -> Result<f64> {
    let (a, _) = p.build_matrix();
    let blk = enc.block_readback()?;
    Ok(blk.sub(&a.scale(C64::new(1.0 / enc.nu, 0.0))).max_abs())
}

/// Diagonal encoding `⟨j,0|U|j,0⟩ = sin(x_j)`, `x_j = α_0 + jΔx`, `Δx = 2α/N`.
pub fn sine_encoding(reg: &[usize], ancilla: usize, alpha0: f64, alpha: f64) -> BlockEncoding {
    let n = 1usize << reg.len();
    let dx = 2.0 * alpha / n as f64;
    let mut c = Circuit::new();
    c.push(Gate::ry(ancilla, std::f64::consts::PI - 2.0 * alpha0));
    for (b, &q) in reg.iter().enumerate() {
        c.push(Gate::ry(ancilla, -2.0 * dx * (1u64 << b) as f64).ctrl(q, true));
    }
    BlockEncoding::new(EncodingKind::Sine, 1.0, reg.to_vec(), vec![ancilla], c)
}

/// Grid parameters spanning `[-1 - x_c, 1 - x_c]` on `2^n` points.
pub fn gauss_grid_params(n: usize, x_c: f64) -> (f64, f64) {
    let nx = (1usize << n) as f64;
    (-1.0 - x_c, nx / (nx - 1.0))
}

pub fn sine_grid(n: usize, alpha0: f64, alpha: f64) -> Vec<f64> {
    let nx = 1usize << n;
    (0..nx).map(|j| alpha0 + j as f64 * 2.0 * alpha / nx as f64).collect()
}

/// Registers for the wave solver: `r_j`, `r_d`, encoding ancillas, `q`.
pub fn wave_layout(n_x: usize, kind: EncodingKind, extra: &[(&str, usize)]) -> Result<RegisterLayout> {
    let mut l = RegisterLayout::new();
    l.add("r_j", n_x)?;
    l.add("r_d", 1)?;
    match kind {
        EncodingKind::Dilation => {
            l.add("a_dil", 1)?;
        }
        EncodingKind::Structured => {
            l.add("a_d", 1)?;
            l.add("a_j", 1)?;
            l.add("a_v", 1)?;
        }
        EncodingKind::Sine => return Err(Error::LayoutMismatch("sine encoding is not a wave oracle".into())),
    }
    l.add("q", 1)?;
    for (name, size) in extra {
        l.add(name, *size)?;
    }
    Ok(l)
}

/// Encoding of the wave matrix on a layout from [`wave_layout`].
pub fn wave_encoding(p: &WaveProblem, layout: &RegisterLayout, kind: EncodingKind) -> Result<BlockEncoding> {
    let mut system = layout.qubits("r_j")?;
    system.push(layout.qubit("r_d")?);
    match kind {
        EncodingKind::Dilation => {
            let (a, _) = p.build_matrix();
            let (an, nu) = normalize_matrix(&a)?;
            exact_dilation(&an, nu, &system, layout.qubit("a_dil")?)
        }
        EncodingKind::Structured => verified_structured_oracle(p, &StructuredQubits::from_layout(layout)?, 1e-8),
        EncodingKind::Sine => Err(Error::LayoutMismatch("sine encoding is not a wave oracle".into())),
    }
}
