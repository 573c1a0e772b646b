//! Estimator for per-channel SNR, mutual information, and total achievable
//! information rates of wideband Nyquist-spaced WDM optical links under
//! lumped (EDFA) or distributed backward-pumped Raman amplification.
//!
//! The model treats Kerr nonlinear distortion as additive Gaussian noise
//! whose per-channel coefficient eta(k) comes from a first-order
//! perturbation double integral over the band, accumulated over spans as
//! N^(1+eps) for signal-signal mixing and via xi for signal-ASE mixing.
//! Receiver SNR feeds symbol-wise mutual information of square QAM
//! constellations (optionally Maxwell-Boltzmann shaped), evaluated by
//! Gauss-Hermite quadrature, and per-channel rates sum to the link AIR.
//!
//! Module map:
//! - [`units`]: parameter bundles, unit conversions, presets, validation.
//! - [`gn`]: the nonlinear-interference integrals and accumulation factors.
//! - [`budget`]: ASE budgets, SNR modes, launch-power optimization.
//! - [`shaping`]: constellations, shaping, mutual information, AIR totals.
//! - [`cache`]: versioned spectrum serialization for disk caching.

pub mod budget;
pub mod cache;
pub mod error;
pub mod gn;
pub mod quad;
pub mod shaping;
pub mod units;

pub use error::{Error, Result};
