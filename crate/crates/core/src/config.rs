//! Run configuration: a flat JSON object, validated on load.

use crate::block_encode::EncodingKind;
use crate::measure::power::PowerWindow;
use crate::wave::{frequency_from_case, WaveProblem};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Left,
    Right,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanAxis {
    Kappa,
    Eps,
    Nx,
}

fn d_eps1() -> f64 {
    1.0
}
fn d_eps_qsvt() -> f64 {
    1e-3
}
fn d_target_max() -> f64 {
    0.5
}
fn d_half() -> Half {
    Half::Full
}
fn d_ny() -> usize {
    6
}
fn d_mu() -> f64 {
    0.15
}
fn d_beta_gauss() -> f64 {
    0.5
}
fn d_oracle() -> EncodingKind {
    EncodingKind::Dilation
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_x: usize,
    #[serde(rename = "Lx_kx0")]
    pub lx_kx0: f64,
    pub eps0: f64,
    #[serde(default = "d_eps1")]
    pub eps1: f64,
    /// Absolute κ_qsvt; when absent `kappa_factor · κ_enc` is used.
    #[serde(default)]
    pub kappa_qsvt: Option<f64>,
    #[serde(default)]
    pub kappa_factor: Option<f64>,
    #[serde(default = "d_eps_qsvt")]
    pub eps_qsvt: f64,
    #[serde(default = "d_target_max")]
    pub target_max: f64,
    #[serde(default = "d_oracle")]
    pub oracle: EncodingKind,
    #[serde(default = "d_half")]
    pub half: Half,
    #[serde(default = "d_ny")]
    pub n_y: usize,
    #[serde(default = "d_mu")]
    pub mu: f64,
    #[serde(default)]
    pub x_c: f64,
    /// Gaussian peak value `β_sc`, below 1.
    #[serde(default = "d_beta_gauss")]
    pub beta_gauss: f64,
    /// Absorbed-power window: start `k_B`, `2^n_eb` points, half-width `N_hw`
    /// on an `n_w`-qubit offset register.
    #[serde(default)]
    pub k_b: usize,
    #[serde(default)]
    pub n_eb: usize,
    #[serde(default)]
    pub n_hw: usize,
    #[serde(default)]
    pub n_w: usize,
    #[serde(default)]
    pub scan_axis: Option<ScanAxis>,
    #[serde(default)]
    pub scan_values: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Number of sampled shots for measurement commands; 0 means exact distributions.
    #[serde(default)]
    pub shots: usize,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(2..=10).contains(&self.n_x) {
            return bad(format!("n_x must be in 2..=10, got {}", self.n_x));
        }
        if !(self.lx_kx0 > 0.0 && self.eps0 > 0.0 && self.eps1 > 0.0) {
            return bad("Lx_kx0, eps0 and eps1 must be positive".into());
        }
        if let Some(k) = self.kappa_qsvt {
            if !(k >= 1.0) {
                return bad(format!("kappa_qsvt must be >= 1, got {k}"));
            }
        }
        if let Some(f) = self.kappa_factor {
            if !(f > 0.0) {
                return bad(format!("kappa_factor must be positive, got {f}"));
            }
        }
        if !(self.eps_qsvt > 0.0 && self.eps_qsvt < 1.0) {
            return bad(format!("eps_qsvt must be in (0, 1), got {}", self.eps_qsvt));
        }
        if !(self.target_max > 0.0 && self.target_max < 1.0) {
            return bad(format!("target_max must be in (0, 1), got {}", self.target_max));
        }
        if !(1..=12).contains(&self.n_y) {
            return bad(format!("n_y must be in 1..=12, got {}", self.n_y));
        }
        if !(self.mu > 0.0) {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if !(self.beta_gauss > 0.0 && self.beta_gauss < 1.0) {
            return bad(format!("beta_gauss must be in (0, 1), got {}", self.beta_gauss));
        }
        if self.shots > 0 && self.seed.is_none() {
            return bad("sampling (shots > 0) needs a seed".into());
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<WaveProblem> {
        WaveProblem::new(self.n_x, frequency_from_case(self.lx_kx0, self.eps0), self.eps0, self.eps1)
    }

    pub fn window(&self) -> PowerWindow {
        PowerWindow { k_b: self.k_b, n_eb: self.n_eb, n_hw: self.n_hw, n_w: self.n_w }
    }

    /// κ_qsvt from the explicit value, or `factor · κ_enc` (factor defaults to 1.5).
    pub fn resolve_kappa(&self, kappa_enc: f64) -> f64 {
        self.kappa_qsvt.unwrap_or_else(|| self.kappa_factor.unwrap_or(1.5) * kappa_enc)
    }

    /// Short SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// Header line written at the top of every output file.
    pub fn header(&self, command: &str) -> String {
        format!("# qwave {} command={command} config_hash={}", env!("CARGO_PKG_VERSION"), self.hash())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIN: &str = r#"{"n_x": 4, "Lx_kx0": 5.0, "eps0": 1.0}"#;

    #[test]
    fn defaults_and_problem() {
        let c = RunConfig::from_json(MIN).unwrap();
        assert_eq!(c.eps1, 1.0);
        assert_eq!(c.oracle, EncodingKind::Dilation);
        assert_eq!(c.problem().unwrap().omega, 5.0);
        assert_eq!(c.resolve_kappa(10.0), 15.0);
    }

    #[test]
    fn missing_key_is_config_error() {
        let e = RunConfig::from_json(r#"{"n_x": 4, "eps0": 1.0}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(RunConfig::from_json(r#"{"n_x": 4, "Lx_kx0": 5.0, "eps0": 1.0, "bogus": 1}"#).is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = RunConfig::from_json(MIN).unwrap();
        let b = RunConfig::from_json(MIN).unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig::from_json(r#"{"n_x": 4, "Lx_kx0": 5.5, "eps0": 1.0}"#).unwrap();
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn shots_need_seed() {
        assert!(RunConfig::from_json(r#"{"n_x": 4, "Lx_kx0": 5.0, "eps0": 1.0, "shots": 10}"#).is_err());
    }
}
