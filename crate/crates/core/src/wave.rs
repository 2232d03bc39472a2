//! Two-layer 1D electromagnetic boundary-value problem on a staggered grid.
//!
//! Unknowns are `ψ = [E_0..E_{N-1}, B_0..B_{N-1}]`. E lives at `x_j = jΔx`,
//! B at `x_j + h` with `Δx = 1/N`, `h = Δx/2`. The source drives the last row.

use crate::linalg::{gauss_jordan_solve, vec_max_abs, vec_norm, ComplexMatrix};
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveProblem {
    pub n_x: usize,
    pub omega: f64,
    pub eps0: f64,
    pub eps1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldSolution {
    pub e: Vec<C64>,
    pub b: Vec<C64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    pub max_abs: f64,
    /// `max_abs / max|E_classical|`.
    pub max_rel: f64,
    pub l2: f64,
    /// |⟨c|q⟩|² of the normalized vectors.
    pub fidelity: f64,
}

/// `ω = L_x k_{x,0} / √ε_0` on the unit domain.
pub fn frequency_from_case(lx_kx0: f64, eps0: f64) -> f64 {
    lx_kx0 / eps0.sqrt()
}

impl WaveProblem {
    pub fn new(n_x: usize, omega: f64, eps0: f64, eps1: f64) -> Result<Self> {
        if n_x < 2 {
            return Err(Error::Config(format!("n_x must be >= 2, got {n_x}")));
        }
        if !(omega > 0.0 && eps0 > 0.0 && eps1 > 0.0) {
            return Err(Error::Config("omega, eps0, eps1 must be positive".into()));
        }
        Ok(Self { n_x, omega, eps0, eps1 })
    }

    pub fn n_points(&self) -> usize {
        1 << self.n_x
    }

    /// Points per layer.
    pub fn m_points(&self) -> usize {
        self.n_points() / 2
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n_points() as f64
    }

    pub fn h(&self) -> f64 {
        self.dx() / 2.0
    }

    pub fn sigma(&self) -> f64 {
        1.0 / (2.0 * self.h())
    }

    pub fn eta_plus(&self) -> C64 {
        C64::new(1.0 / self.h(), self.omega)
    }

    pub fn eta_minus(&self) -> C64 {
        C64::new(-1.0 / self.h(), self.omega)
    }

    pub fn permittivity(&self, j: usize) -> f64 {
        if j < self.m_points() {
            self.eps0
        } else {
            self.eps1
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.n_points()
    }

    pub fn e_grid(&self) -> Vec<f64> {
        (0..self.n_points()).map(|j| j as f64 * self.dx()).collect()
    }

    pub fn b_grid(&self) -> Vec<f64> {
        (0..self.n_points()).map(|j| j as f64 * self.dx() + self.h()).collect()
    }

    /// Matrix `A` and source `b` of `Aψ = b`.
    pub fn build_matrix(&self) -> (ComplexMatrix, Vec<C64>) {
        let n = self.n_points();
        let s = self.sigma();
        let iw = C64::new(0.0, self.omega);
        let mut a = ComplexMatrix::zeros(2 * n, 2 * n);
        a[(0, 0)] = self.eta_plus();
        a[(0, 1)] = self.eta_minus();
        for k in 1..n {
            a[(k, k)] = iw * self.permittivity(k);
            a[(k, n + k)] = C64::new(s, 0.0);
            a[(k, n + k - 1)] = C64::new(-s, 0.0);
        }
        for j in 0..n - 1 {
            a[(n + j, n + j)] = iw;
            a[(n + j, j)] = C64::new(-s, 0.0);
            a[(n + j, j + 1)] = C64::new(s, 0.0);
        }
        a[(2 * n - 1, 2 * n - 2)] = self.eta_minus();
        a[(2 * n - 1, 2 * n - 1)] = self.eta_plus();
        let mut b = vec![C64::new(0.0, 0.0); 2 * n];
        b[2 * n - 1] = C64::new(1.0, 0.0);
        (a, b)
    }

    pub fn classical_solve(&self) -> Result<FieldSolution> {
        let (a, b) = self.build_matrix();
        let psi = gauss_jordan_solve(&a, &b)?;
        Ok(FieldSolution::from_psi(&psi))
    }
}

impl FieldSolution {
    pub fn from_psi(psi: &[C64]) -> Self {
        let n = psi.len() / 2;
        Self { e: psi[..n].to_vec(), b: psi[n..].to_vec() }
    }

    pub fn psi(&self) -> Vec<C64> {
        [self.e.clone(), self.b.clone()].concat()
    }
}

/// Rotate `q` by a global phase so that it agrees in phase with `c` at the
/// component where `|c|` is largest.
pub fn align_global_phase(c: &[C64], q: &[C64]) -> Vec<C64> {
    let m = (0..c.len())
        .max_by(|&i, &j| c[i].norm().partial_cmp(&c[j].norm()).unwrap())
        .unwrap_or(0);
    if q[m].norm() == 0.0 {
        return q.to_vec();
    }
    let rot = (c[m] / c[m].norm()) / (q[m] / q[m].norm());
    q.iter().map(|v| v * rot).collect()
}

/// Error of `quantum` against `classical` after global-phase alignment.
pub fn compare_solutions(classical: &[C64], quantum: &[C64]) -> Result<ErrorReport> {
    if classical.len() != quantum.len() || classical.is_empty() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", classical.len(), quantum.len())));
    }
    let q = align_global_phase(classical, quantum);
    let diff: Vec<C64> = classical.iter().zip(&q).map(|(a, b)| a - b).collect();
    let max_abs = vec_max_abs(&diff);
    let cmax = vec_max_abs(classical);
    let (nc, nq) = (vec_norm(classical), vec_norm(quantum));
    let fidelity = if nc > 0.0 && nq > 0.0 {
        crate::linalg::inner(classical, quantum).norm_sqr() / (nc * nc * nq * nq)
    } else {
        0.0
    };
    Ok(ErrorReport {
        max_abs,
        max_rel: if cmax > 0.0 { max_abs / cmax } else { max_abs },
        l2: vec_norm(&diff),
        fidelity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_frequencies() {
        assert_eq!(frequency_from_case(20.0, 1.0), 20.0);
        assert_eq!(frequency_from_case(28.8, 1.0), 28.8);
        assert_eq!(frequency_from_case(20.0, 4.0), 10.0);
    }

    #[test]
    fn edge_rows_and_source() {
        let p = WaveProblem::new(3, 20.0, 1.0, 4.0).unwrap();
        let (a, b) = p.build_matrix();
        assert_eq!(a[(0, 0)], p.eta_plus());
        assert_eq!(a[(0, 1)], p.eta_minus());
        assert_eq!(b.iter().filter(|v| v.norm() > 0.0).count(), 1);
        assert_eq!(b[15], C64::new(1.0, 0.0));
        for i in 0..a.rows {
            assert!(a.count_nonzeros_in_row(i) <= 3);
        }
    }

    #[test]
    fn alignment_removes_global_phase() {
        let c = vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let rot = C64::from_polar(1.0, 0.7);
        let q: Vec<C64> = c.iter().map(|v| v * rot).collect();
        let r = compare_solutions(&c, &q).unwrap();
        assert!(r.max_abs < 1e-15 && (r.fidelity - 1.0).abs() < 1e-15);
        assert!(compare_solutions(&c, &q[..1]).is_err());
    }
}
