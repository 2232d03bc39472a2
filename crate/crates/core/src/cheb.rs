//! Chebyshev-series approximation via the trigonometric (Fourier) coefficient sum.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Certification sample count.
pub const CERT_SAMPLES: usize = 2001;
/// Default cap on the series degree.
pub const DEFAULT_DEGREE_CAP: usize = 20000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
    None,
}

impl Parity {
    pub fn of_degree(d: usize) -> Self {
        if d % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
            Parity::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TargetFunction {
    /// `(1 - exp(-(5 s κ)²)) / s`
    RegInverse { kappa: f64 },
    /// `β exp(-arcsin²(ψ) / (2μ²))`; `x_c` only shifts the sine-encoding grid.
    Gaussian { mu: f64, beta: f64, x_c: f64 },
    /// A finite Chebyshev sum, mostly for tests.
    Chebyshev(Vec<f64>),
}

impl TargetFunction {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            TargetFunction::RegInverse { kappa } => {
                if s == 0.0 {
                    0.0
                } else {
                    -(-(5.0 * s * kappa).powi(2)).exp_m1() / s
                }
            }
            TargetFunction::Gaussian { mu, beta, .. } => {
                let a = s.clamp(-1.0, 1.0).asin();
                beta * (-a * a / (2.0 * mu * mu)).exp()
            }
            TargetFunction::Chebyshev(c) => clenshaw(c, s),
        }
    }

    pub fn parity(&self) -> Parity {
        match self {
            TargetFunction::RegInverse { .. } => Parity::Odd,
            TargetFunction::Gaussian { .. } => Parity::Even,
            TargetFunction::Chebyshev(c) => {
                let odd = c.iter().step_by(2).all(|v| *v == 0.0);
                let even = c.iter().skip(1).step_by(2).all(|v| *v == 0.0);
                match (odd, even) {
                    (true, _) => Parity::Odd,
                    (_, true) => Parity::Even,
                    _ => Parity::None,
                }
            }
        }
    }

    pub fn kind_name(&self) -> String {
        match self {
            TargetFunction::RegInverse { kappa } => format!("reg_inverse(kappa={kappa})"),
            TargetFunction::Gaussian { mu, beta, x_c } => format!("gaussian(mu={mu},beta={beta},x_c={x_c})"),
            TargetFunction::Chebyshev(c) => format!("chebyshev(n={})", c.len()),
        }
    }

    /// Uniformly spaced points on the domain where the approximation is certified.
    pub fn certification_points(&self, count: usize) -> Vec<f64> {
        match self {
            TargetFunction::RegInverse { kappa } => {
                let lo = (1.0 / kappa).min(1.0);
                let half = count / 2;
                let pos: Vec<f64> = (0..count - half)
                    .map(|i| lo + (1.0 - lo) * i as f64 / (count - half - 1).max(1) as f64)
                    .collect();
                let mut pts: Vec<f64> = pos.iter().take(half).map(|x| -x).collect();
                pts.extend(pos);
                pts
            }
            _ => (0..count).map(|i| -1.0 + 2.0 * i as f64 / (count - 1) as f64).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebSeries {
    pub coeffs: Vec<f64>,
    pub parity: Parity,
    /// Target absolute error.
    pub eps: f64,
    pub kind: String,
}

/// Clenshaw recurrence for `Σ c_k T_k(s)`.
pub fn clenshaw(c: &[f64], s: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * s * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + s * b1 - b2
}

impl ChebSeries {
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        if s.abs() > 1.0 + 1e-12 {
            return Err(Error::DomainError(s));
        }
        Ok(clenshaw(&self.coeffs, s.clamp(-1.0, 1.0)))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            parity: self.parity,
            eps: self.eps * factor.abs(),
            kind: self.kind.clone(),
        }
    }

    pub fn truncated(&self, n_c: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(n_c + 1);
        s
    }

    /// Sampled max of `|P(s)|` on `[-1, 1]`, refined near the origin where the
    /// inverse-like targets peak.
    pub fn max_abs_on_unit(&self, inner_radius: f64) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..=4000 {
            m = m.max(clenshaw(&self.coeffs, -1.0 + i as f64 / 2000.0).abs());
        }
        let r = inner_radius.clamp(0.0, 1.0);
        if r > 0.0 {
            for i in 0..=4000 {
                m = m.max(clenshaw(&self.coeffs, -r + r * i as f64 / 2000.0).abs());
            }
        }
        m
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# kind={} parity={} eps={}\nk,c_k\n", self.kind, self.parity.as_str(), self.eps);
        for (k, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(s, "{k},{c}");
        }
        s
    }
}

/// `c_k = ((2-δ_k0)/(2N_q)) (-1)^k Σ_{j<2N_q} f(-cos(jπ/N_q)) e^{ikjπ/N_q}`, `k = 0..=N_c`.
pub fn fourier_cheb_coeffs(f: &TargetFunction, n_c: usize, n_q: usize) -> Result<ChebSeries> {
    if n_q < n_c || n_q == 0 {
        return Err(Error::Config(format!("need N_q >= N_c, got N_q={n_q}, N_c={n_c}")));
    }
    let m = 2 * n_q;
    // -cos(jπ/N_q) written as an odd sine so mirrored nodes agree bit for bit
    let node = |j: usize| ((2.0 * j as f64 - n_q as f64) * PI / (2.0 * n_q as f64)).sin();
    let samples: Vec<f64> = (0..m).map(|j| f.eval(node(if j <= n_q { j } else { m - j }))).collect();
    let table: Vec<(f64, f64)> = (0..m).map(|t| (2.0 * PI * t as f64 / m as f64).sin_cos()).collect();
    let tol = 1e-8 * samples.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let parity = f.parity();
    let mut coeffs = vec![0.0; n_c + 1];
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let skip = matches!((parity, k % 2), (Parity::Odd, 0) | (Parity::Even, 1));
        let (mut re, mut im) = (0.0, 0.0);
        if !skip {
            let mut idx = 0usize;
            for &fj in &samples {
                let (s, c) = table[idx];
                re += fj * c;
                im += fj * s;
                idx += k;
                if idx >= m {
                    idx -= m;
                }
            }
        }
        let w = if k == 0 { 1.0 } else { 2.0 } / m as f64 * if k % 2 == 1 { -1.0 } else { 1.0 };
        let (re, im) = (re * w, im * w);
        if im.abs() > tol {
            return Err(Error::NonRealCoefficient { k, im });
        }
        *ck = re;
    }
    Ok(ChebSeries { coeffs, parity, eps: 0.0, kind: f.kind_name() })
}

fn sampled_error(coeffs: &[f64], pts: &[(f64, f64)]) -> f64 {
    pts.iter().map(|&(x, fx)| (clenshaw(coeffs, x) - fx).abs()).fold(0.0, f64::max)
}

fn quadrature_points(n_c: usize) -> usize {
    (2 * n_c + 16).max(64)
}

/// Smallest degree whose sampled max error on the certification domain is `<= eps`.
pub fn truncate_to_eps(f: &TargetFunction, eps: f64, cap: usize) -> Result<ChebSeries> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let pts: Vec<(f64, f64)> = f.certification_points(CERT_SAMPLES).into_iter().map(|x| (x, f.eval(x))).collect();
    let mut hi = 1usize;
    let full = loop {
        let n = hi.min(cap);
        let s = fourier_cheb_coeffs(f, n, quadrature_points(n))?;
        if sampled_error(&s.coeffs, &pts) <= eps {
            hi = n;
            break s;
        }
        if n == cap {
            return Err(Error::BudgetExceeded(format!("degree cap {cap} reached for eps={eps}")));
        }
        hi *= 2;
    };
    let (mut lo, mut hi_ok) = (hi / 2, hi);
    // invariant: degree lo fails (or lo = 0 untested), hi_ok passes
    if lo == 0 && sampled_error(&full.coeffs[..1], &pts) <= eps {
        hi_ok = 0;
    }
    while hi_ok > lo + 1 {
        let mid = (lo + hi_ok) / 2;
        if sampled_error(&full.coeffs[..=mid], &pts) <= eps {
            hi_ok = mid;
        } else {
            lo = mid;
        }
    }
    let mut out = full.truncated(hi_ok);
    out.eps = eps;
    Ok(out)
}

/// Scale an inverse-type series to `P_f / (β_sc κ)` with `max|·|` on `[-1,1]` equal
/// to `target_max`. Returns the scaled series and `β_sc`.
pub fn scale_for_qsp(series: &ChebSeries, kappa: f64, target_max: f64) -> (ChebSeries, f64) {
    let m = series.max_abs_on_unit(4.0 / kappa);
    let beta = m / (kappa * target_max);
    (series.scaled(1.0 / (beta * kappa)), beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_coefficients() {
        let s = fourier_cheb_coeffs(&TargetFunction::Chebyshev(vec![0.0, 1.0]), 4, 8).unwrap();
        assert!((s.coeffs[1] - 1.0).abs() < 1e-12);
        for (k, c) in s.coeffs.iter().enumerate() {
            if k != 1 {
                assert!(c.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn t3_coefficients() {
        let f = TargetFunction::Chebyshev(vec![0.0, 0.0, 0.0, 1.0]);
        let s = fourier_cheb_coeffs(&f, 6, 12).unwrap();
        assert!((s.coeffs[3] - 1.0).abs() < 1e-12);
        assert!(s.coeffs.iter().enumerate().all(|(k, c)| k == 3 || c.abs() < 1e-12));
    }

    #[test]
    fn clenshaw_basics() {
        let c0 = ChebSeries { coeffs: vec![1.0], parity: Parity::Even, eps: 0.0, kind: String::new() };
        assert_eq!(c0.eval(0.3).unwrap(), 1.0);
        let c2 = ChebSeries { coeffs: vec![0.0, 0.0, 1.0], parity: Parity::Even, eps: 0.0, kind: String::new() };
        assert!((c2.eval(0.5).unwrap() + 0.5).abs() < 1e-15);
        assert!(matches!(c2.eval(1.1), Err(Error::DomainError(_))));
    }

    #[test]
    fn truncate_identity() {
        let s = truncate_to_eps(&TargetFunction::Chebyshev(vec![0.0, 1.0]), 1e-6, 100).unwrap();
        assert_eq!(s.degree(), 1);
    }

    #[test]
    fn budget_exceeded() {
        let r = truncate_to_eps(&TargetFunction::RegInverse { kappa: 50.0 }, 1e-6, 64);
        assert!(matches!(r, Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn reg_inverse_midpoint() {
        let f = TargetFunction::RegInverse { kappa: 10.0 };
        let s = truncate_to_eps(&f, 1e-4, DEFAULT_DEGREE_CAP).unwrap();
        assert!((s.eval(0.5).unwrap() - 2.0).abs() <= 1e-4);
        assert_eq!(s.degree() % 2, 1);
    }
}
