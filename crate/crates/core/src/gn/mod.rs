//! First-order perturbation model of nonlinear interference.
//!
//! Computes the single-span nonlinear distortion coefficient spectrum
//! eta(k) from the four-wave-mixing efficiency of the span power profile,
//! and the multi-span accumulation factors (coherence factor epsilon and
//! the signal-noise sum xi) from the phased-array factor.

mod kernel;
mod spectrum;

pub use kernel::{
    build_kappa_kernel, kappa, phased_array_chi, rho_edfa, rho_raman, ChiWeightedPrefix,
    KappaKernel,
};
pub use spectrum::{
    eta_channel, eta_spectrum, fit_epsilon, nli_psd, xi_factor, EpsilonFit, NliSpectrum, Sampling,
    SpectrumMeta,
};
