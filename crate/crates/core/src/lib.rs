//! Spectral recovery of integrated covolatility from noisy high-frequency prices.
//!
//! The library simulates contaminated price panels, forms pre-averaged and
//! time-variation-adjusted covariance estimators, and inverts their empirical
//! spectral distributions back to the spectrum of the latent integrated
//! covolatility matrix. Everything downstream of a seed is deterministic.

pub mod error;
pub mod estimators;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod recovery;
pub mod rng;
pub mod simulate;
pub mod solvers;

pub use error::Error;

/// Convenience alias used throughout.
pub type Result<T> = std::result::Result<T, Error>;
