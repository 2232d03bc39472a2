//! Measurement pipelines.

pub mod ae;
pub mod gauss;
pub mod power;
pub mod spectrum;

pub use ae::{amplitude_estimation, energy_estimate, AEResult, AePrep};
pub use gauss::{gaussian_filter, gaussian_qsvt, two_gaussians_demo, FilterResult, GaussResult, TwoGaussResult};
pub use power::{absorbed_power, brute_force_d, PowerResult, PowerWindow};
pub use spectrum::{classical_fft_reference, spectrum, SpectrumResult};
