//! Statevector emulation of a QSVT-based solver for a 1D stationary wave problem.
//!
//! The pipeline builds a finite-difference matrix for a two-layer dielectric
//! slab, block-encodes it into a unitary, inverts it with a QSVT sequence whose
//! phases come from a Chebyshev approximation of a regularized `1/s`, and then
//! runs measurement circuits (QFT spectrum, amplitude estimation, SWAP tests)
//! on the resulting state. Everything is checked against dense classical
//! linear algebra.

pub mod block_encode;
pub mod cheb;
pub mod circuit;
pub mod config;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod qsp;
pub mod qsvt;
pub mod wave;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
