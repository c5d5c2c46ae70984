//! Predictions and Monte-Carlo measurements of the SINR loss of adaptive
//! full-rank and low-rank filters under low-rank-plus-white Gaussian
//! interference.
//!
//! * [`linalg`] — dense complex algebra, Hermitian eigensolvers, sampling.
//! * [`scenario`] — ULA jamming scenario, true covariance, secondary data.
//! * [`estimators`] — projectors, filters, SINR losses, spectral transforms.
//! * [`rmt`] — spiked-model closed forms and deterministic equivalents.
//! * [`experiments`] — Monte-Carlo harness and parameter sweeps.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod linalg;
pub mod rmt;
pub mod scenario;

pub use error::{Error, Result};
