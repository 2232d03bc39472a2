//! Dense complex linear algebra: storage, Gauss-Jordan solve, Jacobi SVD,
//! norms and the singular-value transform used as the classical reference.

use crate::{Error, Result, C64};
use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

/// Relative pivot / singular-value threshold.
pub const SINGULAR_TOL: f64 = 1e-14;
/// Default sweep limit for the Jacobi eigen-solver.
pub const DEFAULT_SWEEPS: usize = 100;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<C64>,
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged or empty rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.concat() })
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&v| v * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "mul_vec shape");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn count_nonzeros_in_row(&self, i: usize) -> usize {
        self.row(i).iter().filter(|v| v.norm() > 0.0).count()
    }

    /// max |U†U − I| entry.
    pub fn unitarity_residual(&self) -> f64 {
        self.adjoint().matmul(self).sub(&Self::identity(self.cols)).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Plain-text dump: header `rows cols`, then one `re im` pair per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for v in &self.data {
            let _ = writeln!(s, "{} {}", v.re, v.im);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Io(format!("matrix text: {m}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("header")))
            .collect::<Result<_>>()?;
        if dims.len() != 2 || dims[0] == 0 || dims[1] == 0 {
            return Err(bad("header"));
        }
        let mut data = Vec::with_capacity(dims[0] * dims[1]);
        for l in lines {
            let p: Vec<f64> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| bad("entry")))
                .collect::<Result<_>>()?;
            if p.len() != 2 {
                return Err(bad("entry"));
            }
            data.push(C64::new(p[0], p[1]));
        }
        if data.len() != dims[0] * dims[1] {
            return Err(bad("entry count"));
        }
        Ok(Self { rows: dims[0], cols: dims[1], data })
    }
}

pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Least-squares line `y = a x + b`; returns `(a, b, R²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DimensionMismatch(format!("fit needs two equal-length series, got {} and {}", x.len(), y.len())));
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::SingularMatrix(0.0));
    }
    let a = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((a, my - a * mx, r2))
}

pub fn vec_max_abs(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// ⟨a|b⟩ with the first argument conjugated.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Solve `A x = b` by Gauss-Jordan elimination with partial pivoting.
pub fn gauss_jordan_solve(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let cols = gauss_jordan_multi(a, &[b.to_vec()])?;
    Ok(cols.into_iter().next().unwrap())
}

fn gauss_jordan_multi(a: &ComplexMatrix, rhs: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} not square", a.rows, a.cols)));
    }
    let n = a.rows;
    if rhs.iter().any(|b| b.len() != n) {
        return Err(Error::DimensionMismatch("rhs length".into()));
    }
    let m = rhs.len();
    let w = n + m;
    // augmented [A | B]
    let mut aug = vec![C64::new(0.0, 0.0); n * w];
    for i in 0..n {
        aug[i * w..i * w + n].copy_from_slice(a.row(i));
        for (j, b) in rhs.iter().enumerate() {
            aug[i * w + n + j] = b[i];
        }
    }
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (piv, pmax) = (col..n)
            .map(|r| (r, aug[r * w + col].norm()))
            .fold((col, -1.0), |best, x| if x.1 > best.1 { x } else { best });
        if pmax < SINGULAR_TOL * scale {
            return Err(Error::SingularMatrix(pmax));
        }
        if piv != col {
            for k in 0..w {
                aug.swap(col * w + k, piv * w + k);
            }
        }
        let inv = C64::new(1.0, 0.0) / aug[col * w + col];
        for k in col..w {
            aug[col * w + k] *= inv;
        }
        let pivot_row: Vec<C64> = aug[col * w..(col + 1) * w].to_vec();
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = aug[r * w + col];
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for k in col..w {
                aug[r * w + k] -= f * pivot_row[k];
            }
        }
    }
    Ok((0..m).map(|j| (0..n).map(|i| aug[i * w + n + j]).collect()).collect())
}

/// Matrix inverse through Gauss-Jordan on the identity.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows;
    let eye: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let cols = gauss_jordan_multi(a, &eye)?;
    Ok(ComplexMatrix::from_fn(n, n, |r, c| cols[c][r]))
}

/// `max_k Σ_j |A_kj|`.
pub fn max_norm(a: &ComplexMatrix) -> f64 {
    (0..a.rows)
        .map(|i| a.row(i).iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Returns eigenvalues (descending) and eigenvectors as columns.
pub fn hermitian_eigen(h: &ComplexMatrix, max_sweeps: usize) -> Result<(Vec<f64>, ComplexMatrix)> {
    assert!(h.is_square());
    let n = h.rows;
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let total = a.frobenius_norm();
    let mut converged = n < 2 || total == 0.0;
    for _ in 0..max_sweeps {
        if converged {
            break;
        }
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= 1e-15 * total {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let hpq = a[(p, q)];
                let g = hpq.norm();
                if g <= 1e-300 {
                    continue;
                }
                let ph = hpq / g; // e^{iα}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let em = ph.conj(); // e^{-iα}
                // columns: H ← H G, V ← V G
                for k in 0..n {
                    let hp = a[(k, p)];
                    let hq = a[(k, q)];
                    a[(k, p)] = hp * c - hq * em * s;
                    a[(k, q)] = hp * s + hq * em * c;
                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = vp * c - vq * em * s;
                    v[(k, q)] = vp * s + vq * em * c;
                }
                // rows: H ← G† H
                for k in 0..n {
                    let hp = a[(p, k)];
                    let hq = a[(q, k)];
                    a[(p, k)] = hp * c - hq * ph * s;
                    a[(q, k)] = hp * s + hq * ph * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(format!("Jacobi after {max_sweeps} sweeps")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let vals = order.iter().map(|&i| a[(i, i)].re).collect();
    let vecs = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((vals, vecs))
}

#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u_left: ComplexMatrix,
    /// Descending, nonnegative.
    pub singulars: Vec<f64>,
    pub u_right: ComplexMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let s: Vec<C64> = self.singulars.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.u_left.matmul(&ComplexMatrix::diag(&s)).matmul(&self.u_right.adjoint())
    }
}

pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    svd_with_sweeps(a, DEFAULT_SWEEPS)
}

/// SVD through the Hermitian eigenproblem of `A†A`; `u_left` is re-orthonormalized
/// and completed to a unitary when some singular values vanish.
pub fn svd_with_sweeps(a: &ComplexMatrix, max_sweeps: usize) -> Result<SvdResult> {
    if a.rows < a.cols {
        let t = svd_with_sweeps(&a.adjoint(), max_sweeps)?;
        return Ok(SvdResult { u_left: t.u_right, singulars: t.singulars, u_right: t.u_left });
    }
    let (vals, v) = hermitian_eigen(&a.adjoint().matmul(a), max_sweeps)?;
    let singulars: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let smax = singulars.first().copied().unwrap_or(0.0);
    let av = a.matmul(&v);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(a.cols);
    for (j, &s) in singulars.iter().enumerate() {
        let mut u: Vec<C64> = if s > 1e-13 * smax && s > 0.0 {
            av.column(j).iter().map(|x| x / s).collect()
        } else {
            completion_vector(a.rows, &cols)
        };
        orthonormalize_against(&mut u, &cols);
        cols.push(u);
    }
    let u_left = ComplexMatrix::from_fn(a.rows, a.cols, |r, c| cols[c][r]);
    Ok(SvdResult { u_left, singulars, u_right: v })
}

fn orthonormalize_against(u: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let p = inner(b, u);
            for (x, y) in u.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
    }
    let n = vec_norm(u);
    for x in u.iter_mut() {
        *x /= n;
    }
}

fn completion_vector(dim: usize, basis: &[Vec<C64>]) -> Vec<C64> {
    // the standard basis vector with the largest residual after projection
    let mut best = (0, -1.0);
    for e in 0..dim {
        let res = 1.0 - basis.iter().map(|b| b[e].norm_sqr()).sum::<f64>();
        if res > best.1 {
            best = (e, res);
        }
    }
    let mut u = vec![C64::new(0.0, 0.0); dim];
    u[best.0] = C64::new(1.0, 0.0);
    u
}

pub fn condition_number(a: &ComplexMatrix) -> Result<f64> {
    let s = svd(a)?.singulars;
    let (smax, smin) = (s[0], *s.last().unwrap());
    if smin <= SINGULAR_TOL * smax {
        return Err(Error::SingularMatrix(smin));
    }
    Ok(smax / smin)
}

/// `U_L f(S) U_R†`: the classical singular-value transform.
pub fn singular_value_transform(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let d = svd(a)?;
    let fs: Vec<C64> = d.singulars.iter().map(|&s| C64::new(f(s), 0.0)).collect();
    Ok(d.u_left.matmul(&ComplexMatrix::diag(&fs)).matmul(&d.u_right.adjoint()))
}

/// Moore-Penrose pseudoinverse `U_R S⁻¹ U_L†`.
pub fn pseudoinverse_via_svt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = svd(a)?;
    let smin = *d.singulars.last().unwrap();
    if smin <= 1e-12 {
        return Err(Error::SingularMatrix(smin));
    }
    let inv: Vec<C64> = d.singulars.iter().map(|&s| C64::new(1.0 / s, 0.0)).collect();
    Ok(d.u_right.matmul(&ComplexMatrix::diag(&inv)).matmul(&d.u_left.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_solve() {
        let x = gauss_jordan_solve(&ComplexMatrix::identity(4), &[c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]).unwrap();
        assert_eq!(x, vec![c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
    }

    #[test]
    fn diagonal_solve() {
        let a = ComplexMatrix::diag(&[c(0., 2.), c(0., -1.)]);
        let x = gauss_jordan_solve(&a, &[c(0., 2.), c(1., 0.)]).unwrap();
        assert!((x[0] - c(1., 0.)).norm() < 1e-15);
        assert!((x[1] - c(0., 1.)).norm() < 1e-15);
    }

    #[test]
    fn singular_pivot() {
        let a = ComplexMatrix::from_rows(&[vec![c(1., 0.), c(2., 0.)], vec![c(2., 0.), c(4., 0.)]]).unwrap();
        assert!(matches!(gauss_jordan_solve(&a, &[c(1., 0.), c(1., 0.)]), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn svd_trivial() {
        assert_eq!(svd(&ComplexMatrix::identity(2)).unwrap().singulars, vec![1.0, 1.0]);
        let s = svd(&ComplexMatrix::diag(&[c(0.5, 0.), c(3., 0.)])).unwrap().singulars;
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 0.5).abs() < 1e-14);
        assert!((condition_number(&ComplexMatrix::diag(&[c(4., 0.), c(1., 0.)])).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_svd_is_unitary() {
        let d = svd(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!(d.u_left.unitarity_residual() < 1e-14);
        assert!(d.singulars.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn max_norm_small() {
        assert_eq!(max_norm(&ComplexMatrix::identity(5)), 1.0);
        let a = ComplexMatrix::from_rows(&[vec![c(1., 0.), c(0., 1.)], vec![c(0., 0.), c(2., 0.)]]).unwrap();
        assert_eq!(max_norm(&a), 2.0);
    }

    #[test]
    fn pinv_diag() {
        let p = pseudoinverse_via_svt(&ComplexMatrix::diag(&[c(2., 0.), c(4., 0.)])).unwrap();
        assert!((p[(0, 0)] - c(0.5, 0.)).norm() < 1e-14);
        assert!((p[(1, 1)] - c(0.25, 0.)).norm() < 1e-14);
        assert!(p[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn text_roundtrip() {
        let a = ComplexMatrix::from_fn(2, 3, |r, k| c(r as f64 + 0.1, -(k as f64) / 3.0));
        assert_eq!(ComplexMatrix::from_text(&a.to_text()).unwrap(), a);
    }
}
