//! QSP phase factors: scalar evaluation, analytic gradient and an L-BFGS solver
//! over the symmetric phase parameterization.
//!
//! Phases are stored in the `W(x) = e^{i arccos(x) X}` convention:
//! `U = e^{iφ_0 Z} Π_{k=1..d} W(x) e^{iφ_k Z}` and `p(x) = U_00`.
//! [`PhaseVector::reflection_angles`] converts them to the projector-rotation
//! angles used by the circuit, where the signal operator is a reflection.

use crate::cheb::{clenshaw, ChebSeries, Parity};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub phases: Vec<f64>,
    pub parity: Parity,
    pub kappa_qsvt: f64,
    pub eps_qsvt: f64,
    pub beta_sc: f64,
    /// Max node residual reached by the solver.
    pub residual: f64,
}

impl PhaseVector {
    pub fn from_phases(phases: Vec<f64>) -> Self {
        let d = phases.len().saturating_sub(1);
        Self { phases, parity: Parity::of_degree(d), kappa_qsvt: 0.0, eps_qsvt: 0.0, beta_sc: 1.0, residual: 0.0 }
    }

    pub fn degree(&self) -> usize {
        self.phases.len() - 1
    }

    /// Angles `ψ_k` for the sequence `e^{iψ_0 Z_Π} O e^{iψ_1 Z_Π} … O e^{iψ_d Z_Π}`
    /// whose block equals `p(x)` exactly (no leftover global phase).
    pub fn reflection_angles(&self) -> Vec<f64> {
        let d = self.degree();
        if d == 0 {
            return self.phases.clone();
        }
        self.phases
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                if k == 0 {
                    p - FRAC_PI_4 + (d % 4) as f64 * FRAC_PI_2
                } else if k == d {
                    p - FRAC_PI_4
                } else {
                    p - FRAC_PI_2
                }
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# parity={} kappa_qsvt={} eps_qsvt={} beta_sc={} residual={:e} n_pol={}\nk,phi\n",
            self.parity.as_str(),
            self.kappa_qsvt,
            self.eps_qsvt,
            self.beta_sc,
            self.residual,
            self.degree()
        );
        for (k, p) in self.phases.iter().enumerate() {
            let _ = writeln!(s, "{k},{p}");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Io(format!("phase csv: {m}"));
        let mut pv = PhaseVector::from_phases(Vec::new());
        for line in text.lines() {
            let line = line.trim();
            if let Some(h) = line.strip_prefix('#') {
                for kv in h.split_whitespace() {
                    let Some((k, v)) = kv.split_once('=') else { continue };
                    let num = || v.parse::<f64>().map_err(|_| bad(format!("header {k}")));
                    match k {
                        "kappa_qsvt" => pv.kappa_qsvt = num()?,
                        "eps_qsvt" => pv.eps_qsvt = num()?,
                        "beta_sc" => pv.beta_sc = num()?,
                        "residual" => pv.residual = num()?,
                        _ => {}
                    }
                }
            } else if let Some((_, v)) = line.split_once(',') {
                if let Ok(p) = v.parse::<f64>() {
                    pv.phases.push(p);
                }
            }
        }
        if pv.phases.is_empty() {
            return Err(bad("no phases".into()));
        }
        pv.parity = Parity::of_degree(pv.degree());
        Ok(pv)
    }
}

/// SU(2) element `[[a, b], [-b*, a*]]`.
#[derive(Clone, Copy, Debug)]
struct Su2 {
    a: C64,
    b: C64,
}

impl Su2 {
    fn phase(phi: f64) -> Self {
        Su2 { a: C64::from_polar(1.0, phi), b: C64::new(0.0, 0.0) }
    }

    /// `self · e^{iφZ}`
    #[inline]
    fn mul_phase(self, e: C64) -> Self {
        Su2 { a: self.a * e, b: self.b * e.conj() }
    }

    /// `self · W(x)` with `s = √(1-x²)`
    #[inline]
    fn mul_w(self, x: f64, s: f64) -> Self {
        Su2 {
            a: self.a * x + C64::new(-self.b.im * s, self.b.re * s),
            b: C64::new(-self.a.im * s, self.a.re * s) + self.b * x,
        }
    }

    #[inline]
    fn mul(self, o: Su2) -> Self {
        Su2 { a: self.a * o.a - self.b * o.b.conj(), b: self.a * o.b + self.b * o.a.conj() }
    }

    fn transpose(self) -> Self {
        Su2 { a: self.a, b: -self.b.conj() }
    }
}

/// `⟨0| e^{iφ_0 Z} Π_k W(x) e^{iφ_k Z} |0⟩`.
pub fn qsp_eval(phases: &[f64], x: f64) -> Result<C64> {
    if x.abs() > 1.0 {
        return Err(Error::DomainError(x));
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut u = Su2::phase(phases[0]);
    for &p in &phases[1..] {
        u = u.mul_w(x, s).mul_phase(C64::from_polar(1.0, p));
    }
    Ok(u.a)
}

/// Expand reduced phases to the full symmetric vector of length `d+1`.
pub fn expand_symmetric(reduced: &[f64], d: usize) -> Vec<f64> {
    (0..=d).map(|k| reduced[k.min(d - k)]).collect()
}

pub fn reduced_len(d: usize) -> usize {
    d / 2 + 1
}

/// Positive Chebyshev nodes `cos((2j-1)π/(4 d̃))`, `j = 1..d̃`.
pub fn chebyshev_nodes(dt: usize) -> Vec<f64> {
    (1..=dt).map(|j| ((2 * j - 1) as f64 * PI / (4 * dt) as f64).cos()).collect()
}

/// Objective workspace for one degree.
struct Objective {
    d: usize,
    nodes: Vec<(f64, f64)>,
    targets: Vec<f64>,
}

impl Objective {
    /// Returns `(Re p(x_j) - target_j)` per node and, if requested, the
    /// gradient of `½ Σ r_j²` with respect to the reduced phases.
    fn eval(&self, red: &[f64], grad: Option<&mut [f64]>) -> Vec<f64> {
        let d = self.d;
        let nr = red.len();
        let odd = d % 2 == 1;
        // number of reduced phases inside the half product X
        let nx = if odd { nr } else { nr - 1 };
        let ph: Vec<C64> = red.iter().map(|&p| C64::from_polar(1.0, p)).collect();
        let mut res = Vec::with_capacity(self.nodes.len());
        let mut g_acc = grad.as_ref().map(|_| vec![0.0; nr]);
        for (j, &(x, s)) in self.nodes.iter().enumerate() {
            let mut xm = Su2 { a: ph[0], b: C64::new(0.0, 0.0) };
            for p in &ph[1..nx] {
                xm = xm.mul_w(x, s).mul_phase(*p);
            }
            let (u, mid) = if d == 0 {
                (xm, xm)
            } else if odd {
                (xm.mul_w(x, s).mul(xm.transpose()), xm)
            } else {
                let m = xm.mul_w(x, s).mul_phase(ph[nr - 1]);
                (m.mul_w(x, s).mul(xm.transpose()), m)
            };
            let r = u.a.re - self.targets[j];
            res.push(r);
            if let Some(g) = g_acc.as_mut() {
                let alpha = u.a;
                let bconj = u.b.conj();
                let term = |p: Su2| -> f64 {
                    let z = alpha * (p.a.norm_sqr() - p.b.norm_sqr()) + p.a * p.b * bconj * 2.0;
                    -z.im
                };
                let w = if d == 0 { 1.0 } else { 2.0 };
                let mut pk = Su2 { a: ph[0], b: C64::new(0.0, 0.0) };
                g[0] += r * w * term(pk);
                for k in 1..nx {
                    pk = pk.mul_w(x, s).mul_phase(ph[k]);
                    g[k] += r * 2.0 * term(pk);
                }
                if !odd && d > 0 {
                    g[nr - 1] += r * term(mid);
                }
            }
        }
        if let (Some(out), Some(acc)) = (grad, g_acc) {
            out.copy_from_slice(&acc);
        }
        res
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub tol: f64,
    /// `None` means `50·N_pol` (at least 200).
    pub max_iter: Option<usize>,
    pub memory: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: None, memory: 12 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Solve for phases whose `Re p` matches `target` at the Chebyshev nodes.
pub fn solve_phases(target: &ChebSeries, tol: f64) -> Result<PhaseVector> {
    let (pv, stats) = solve_phases_with(target, &SolverOptions { tol, ..Default::default() })?;
    if !stats.converged {
        return Err(Error::NoConvergence(format!(
            "phase solve stopped after {} iterations with residual {:e}",
            stats.iterations, pv.residual
        )));
    }
    Ok(pv)
}

/// Like [`solve_phases`] but returns the best iterate even without convergence.
pub fn solve_phases_with(target: &ChebSeries, opts: &SolverOptions) -> Result<(PhaseVector, SolveStats)> {
    if target.parity == Parity::None {
        return Err(Error::Config("phase solve needs a definite-parity target".into()));
    }
    let d = target.degree();
    let d = if Parity::of_degree(d) != target.parity { d + 1 } else { d };
    let nr = reduced_len(d);
    let nodes = chebyshev_nodes(nr);
    let obj = Objective {
        d,
        targets: nodes.iter().map(|&x| clenshaw(&target.coeffs, x)).collect(),
        nodes: nodes.iter().map(|&x| (x, (1.0 - x * x).sqrt())).collect(),
    };
    let mut stats = SolveStats { iterations: 0, evaluations: 0, converged: false };
    let finish = |red: &[f64], residual: f64| PhaseVector {
        phases: expand_symmetric(red, d),
        parity: Parity::of_degree(d),
        kappa_qsvt: 0.0,
        eps_qsvt: target.eps,
        beta_sc: 1.0,
        residual,
    };
    if d == 0 {
        let c0 = target.coeffs.first().copied().unwrap_or(0.0);
        if c0.abs() > 1.0 {
            return Err(Error::DomainError(c0));
        }
        let red = [c0.acos()];
        let res = obj.eval(&red, None)[0].abs();
        stats.converged = res <= opts.tol;
        return Ok((finish(&red, res), stats));
    }
    let max_iter = opts.max_iter.unwrap_or((50 * d).max(200));
    let mut x = vec![0.0; nr];
    x[0] = FRAC_PI_4;
    let mut g = vec![0.0; nr];
    let mut r = obj.eval(&x, Some(&mut g));
    stats.evaluations += 1;
    let loss = |r: &[f64]| 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    let maxres = |r: &[f64]| r.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut f = loss(&r);
    let mut best = (maxres(&r), x.clone());
    let mut hist: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut gn = vec![0.0; nr];
    while stats.iterations < max_iter {
        if best.0 <= opts.tol {
            stats.converged = true;
            break;
        }
        stats.iterations += 1;
        let mut p = lbfgs_direction(&g, &hist);
        let mut slope: f64 = dot(&p, &g);
        if !(slope < 0.0) {
            hist.clear();
            p = g.iter().map(|v| -v).collect();
            slope = dot(&p, &g);
        }
        if hist.is_empty() {
            let gnorm = dot(&g, &g).sqrt().max(1e-300);
            let scale = (1.0 / gnorm).min(1.0);
            p.iter_mut().for_each(|v| *v *= scale);
            slope *= scale;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            let rn = obj.eval(&xn, Some(&mut gn));
            stats.evaluations += 1;
            let fnew = loss(&rn);
            if fnew <= f + 1e-4 * step * slope || fnew == 0.0 {
                accepted = Some((xn, rn, fnew));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, rn, fnew)) = accepted else {
            if hist.is_empty() {
                break;
            }
            hist.clear();
            continue;
        };
        let sv: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let yv: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&sv, &yv);
        if sy > 1e-16 * dot(&yv, &yv).sqrt() * dot(&sv, &sv).sqrt() {
            if hist.len() == opts.memory {
                hist.remove(0);
            }
            hist.push((sv, yv, 1.0 / sy));
        }
        x = xn;
        r = rn;
        f = fnew;
        g.copy_from_slice(&gn);
        let mr = maxres(&r);
        if mr < best.0 {
            best = (mr, x.clone());
        }
    }
    if best.0 <= opts.tol {
        stats.converged = true;
    }
    Ok((finish(&best.1, best.0), stats))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lbfgs_direction(g: &[f64], hist: &[(Vec<f64>, Vec<f64>, f64)]) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = vec![0.0; hist.len()];
    for (i, (s, y, rho)) in hist.iter().enumerate().rev() {
        let a = rho * dot(s, &q);
        alphas[i] = a;
        q.iter_mut().zip(y).for_each(|(qv, yv)| *qv -= a * yv);
    }
    if let Some((s, y, _)) = hist.last() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for (i, (s, y, rho)) in hist.iter().enumerate() {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qv, sv)| *qv += (alphas[i] - b) * sv);
    }
    q.iter().map(|v| -v).collect()
}

/// Gradient of `Re p(x)` for a full (not necessarily symmetric) phase vector by
/// prefix/suffix accumulation. Used for finite-difference validation.
pub fn qsp_real_gradient(phases: &[f64], x: f64) -> Result<Vec<f64>> {
    if x.abs() > 1.0 {
        return Err(Error::DomainError(x));
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let u = {
        let mut u = Su2::phase(phases[0]);
        for &p in &phases[1..] {
            u = u.mul_w(x, s).mul_phase(C64::from_polar(1.0, p));
        }
        u
    };
    let bconj = u.b.conj();
    let mut pk = Su2::phase(phases[0]);
    let mut out = Vec::with_capacity(phases.len());
    for (k, &p) in phases.iter().enumerate() {
        if k > 0 {
            pk = pk.mul_w(x, s).mul_phase(C64::from_polar(1.0, p));
        }
        let z = u.a * (pk.a.norm_sqr() - pk.b.norm_sqr()) + pk.a * pk.b * bconj * 2.0;
        out.push(-z.im);
    }
    Ok(out)
}

/// Max residual of `Re p` against `target` at the solver nodes for degree `d`.
pub fn node_residual(pv: &PhaseVector, target: &ChebSeries) -> f64 {
    let nodes = chebyshev_nodes(reduced_len(pv.degree()));
    nodes
        .iter()
        .map(|&x| (qsp_eval(&pv.phases, x).unwrap().re - clenshaw(&target.coeffs, x)).abs())
        .fold(0.0, f64::max)
}
