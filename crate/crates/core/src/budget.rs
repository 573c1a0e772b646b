//! ASE budgets, per-channel SNR under the three compensation modes, and
//! launch-power optimization.
//!
//! SNR = P / (P_n + P_ss + P_sn) with P_ss = N_s^(1+eps) eta P^3 and
//! P_sn = 3 xi eta P_n1 P^2. P_n in the denominator is the link total
//! (N_s spans); the P_n inside the signal-noise term is the per-span ASE,
//! since xi already carries the span accumulation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gn::NliSpectrum;
use crate::quad::adaptive;
use crate::units::{watt_to_dbm, AmplifierScheme, SystemConfig, H_PLANCK};

/// Compensation mode for the SNR denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Electronic dispersion compensation only: both NLI terms present.
    Edc,
    /// Full-field nonlinearity compensation: signal-signal term removed.
    FfNlc,
    /// ASE noise only.
    AseOnly,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Edc => "edc",
            Mode::FfNlc => "ffnlc",
            Mode::AseOnly => "ase_only",
        }
    }
}

/// Dual-polarization ASE powers in the symbol band, per channel.
#[derive(Debug, Clone, Copy)]
pub struct AseBudget {
    /// ASE power added per span, W.
    pub p_n_span: f64,
    /// Link total: num_spans * p_n_span, W.
    pub p_n_total: f64,
}

/// Per-span EDFA ASE: F_n h nu0 (G - 1) R_s with G = e^(alpha L), dual-pol.
pub fn ase_span_edfa(cfg: &SystemConfig) -> Result<f64> {
    let noise_figure = match cfg.amplifier {
        AmplifierScheme::Edfa { noise_figure } => noise_figure,
        _ => return Err(Error::InvalidMode("ase_span_edfa needs an EDFA scheme".into())),
    };
    let gain = (cfg.fiber.alpha * cfg.spans.span_length).exp();
    Ok(noise_figure * H_PLANCK * cfg.grid.center_frequency * (gain - 1.0) * cfg.grid.symbol_rate)
}

/// Per-span Raman ASE: spontaneous scattering along the span, amplified to
/// the span end; 2 phi h nu0 R_s C_R int P_p(z) g(L)/g(z) dz, dual-pol.
pub fn ase_span_raman(cfg: &SystemConfig) -> Result<f64> {
    let (pump, phi) = match cfg.amplifier {
        AmplifierScheme::Raman {
            total_pump_power,
            phonon_factor,
            ..
        } => (total_pump_power, phonon_factor),
        _ => return Err(Error::InvalidMode("ase_span_raman needs a Raman scheme".into())),
    };
    let f = &cfg.fiber;
    let l = cfg.spans.span_length;
    if f.c_r == 0.0 {
        return Ok(0.0);
    }
    let gain = f.c_r * pump / f.alpha_p;
    let e_l = (-f.alpha_p * l).exp();
    let ln_g = |z: f64| -f.alpha * z + gain * ((-f.alpha_p * (l - z)).exp() - e_l);
    let ln_g_end = ln_g(l);
    let integral = adaptive(
        |z: f64| pump * (-f.alpha_p * (l - z)).exp() * (ln_g_end - ln_g(z)).exp(),
        0.0,
        l,
        8,
        cfg.quad.z_rel_tol,
        0.0,
        50_000,
    )
    .map_err(|e| match e {
        Error::Quadrature { achieved, required, .. } => Error::Quadrature {
            context: "Raman ASE z-integral".into(),
            achieved,
            required,
        },
        other => other,
    })?;
    Ok(2.0 * phi * H_PLANCK * cfg.grid.center_frequency * cfg.grid.symbol_rate * f.c_r
        * integral.value)
}

/// Per-span and total ASE for the configured amplifier.
pub fn ase_budget(cfg: &SystemConfig) -> Result<AseBudget> {
    let p_n_span = match cfg.amplifier {
        AmplifierScheme::Edfa { .. } => ase_span_edfa(cfg)?,
        AmplifierScheme::Raman { .. } => ase_span_raman(cfg)?,
    };
    Ok(AseBudget {
        p_n_span,
        p_n_total: cfg.spans.num_spans as f64 * p_n_span,
    })
}

/// Noise decomposition at one channel and launch power.
#[derive(Debug, Clone, Copy)]
pub struct NoiseTerms {
    pub p_ss: f64,
    pub p_sn: f64,
    pub p_n_total: f64,
}

pub fn noise_terms(k: i32, power: f64, spectrum: &NliSpectrum, ase: &AseBudget) -> NoiseTerms {
    let eta = spectrum.eta_at(k);
    NoiseTerms {
        p_ss: spectrum.span_accumulation() * eta * power.powi(3),
        p_sn: 3.0 * spectrum.xi * eta * ase.p_n_span * power * power,
        p_n_total: ase.p_n_total,
    }
}

/// Linear SNR for channel k at launch power `power` (W, dual-pol).
pub fn snr_channel(
    k: i32,
    power: f64,
    spectrum: &NliSpectrum,
    ase: &AseBudget,
    mode: Mode,
) -> f64 {
    let t = noise_terms(k, power, spectrum, ase);
    let denom = match mode {
        Mode::Edc => t.p_n_total + t.p_ss + t.p_sn,
        Mode::FfNlc => t.p_n_total + t.p_sn,
        Mode::AseOnly => t.p_n_total,
    };
    power / denom
}

/// Stationary-point launch power of the mode's SNR expression, W.
///
/// EDC: (P_n,total / (2 N_s^(1+eps) eta))^(1/3), the maximizer of
/// P/(P_n + P_ss); FF-NLC: (P_n,total / (3 xi eta P_n,span))^(1/2), the
/// maximizer of P/(P_n + P_sn).
pub fn optimal_power_closed_form(
    k: i32,
    spectrum: &NliSpectrum,
    ase: &AseBudget,
    mode: Mode,
) -> Result<f64> {
    let eta = spectrum.eta_at(k);
    if eta <= 0.0 {
        return Err(Error::Domain(format!(
            "optimal power undefined for eta(k={k}) = {eta}"
        )));
    }
    match mode {
        Mode::Edc => Ok((ase.p_n_total / (2.0 * spectrum.span_accumulation() * eta)).cbrt()),
        Mode::FfNlc => {
            Ok((ase.p_n_total / (3.0 * spectrum.xi * eta * ase.p_n_span)).sqrt())
        }
        Mode::AseOnly => Err(Error::InvalidMode(
            "ASE-only SNR has no optimum launch power".into(),
        )),
    }
}

/// Uniform per-channel launch power maximizing total Gaussian capacity
/// sum_k log2(1 + SNR(k, P, mode)), by golden-section search on a 20 dB
/// window seeded at the central-channel closed form. Tolerance 0.01 dB.
pub fn optimize_uniform_power(
    spectrum: &NliSpectrum,
    ase: &AseBudget,
    mode: Mode,
) -> Result<f64> {
    if mode == Mode::AseOnly {
        return Err(Error::InvalidMode(
            "ASE-only capacity increases monotonically with power".into(),
        ));
    }
    let p0 = optimal_power_closed_form(0, spectrum, ase, mode)?;
    let edge = spectrum.edge_index();
    let capacity = |p_dbm: f64| -> f64 {
        let p = 10f64.powf(p_dbm / 10.0) * 1e-3;
        let mut total = 0.0;
        for k in -edge..=edge {
            total += (1.0 + snr_channel(k, p, spectrum, ase, mode)).log2();
        }
        total
    };
    let seed = watt_to_dbm(p0);
    let (mut a, mut b) = (seed - 10.0, seed + 10.0);
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = capacity(x1);
    let mut f2 = capacity(x2);
    while b - a > 0.01 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = capacity(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = capacity(x1);
        }
    }
    Ok(10f64.powf(0.5 * (a + b) / 10.0) * 1e-3)
}

/// Per-channel SNR rows at one optimized uniform launch power.
#[derive(Debug, Clone, Copy)]
pub struct SnrRecord {
    pub k: i32,
    pub f_offset_hz: f64,
    pub eta: f64,
    /// Optimized uniform per-channel launch power, W (dual-pol).
    pub launch_power: f64,
    pub p_ss: f64,
    pub p_sn: f64,
    pub snr_edc: f64,
    pub snr_nlc: f64,
    pub snr_ase: f64,
}

/// Full-band SNR records at the power optimized for `mode` (ASE-only mode
/// borrows the FF-NLC optimum, since its own capacity has no maximum).
pub fn snr_spectrum(
    cfg: &SystemConfig,
    spectrum: &NliSpectrum,
    ase: &AseBudget,
    mode: Mode,
) -> Result<Vec<SnrRecord>> {
    let power_mode = if mode == Mode::AseOnly { Mode::FfNlc } else { mode };
    let power = optimize_uniform_power(spectrum, ase, power_mode)?;
    let edge = spectrum.edge_index();
    Ok((-edge..=edge)
        .into_par_iter()
        .map(|k| {
            let t = noise_terms(k, power, spectrum, ase);
            SnrRecord {
                k,
                f_offset_hz: cfg.grid.offset_hz(k),
                eta: spectrum.eta_at(k),
                launch_power: power,
                p_ss: t.p_ss,
                p_sn: t.p_sn,
                snr_edc: snr_channel(k, power, spectrum, ase, Mode::Edc),
                snr_nlc: snr_channel(k, power, spectrum, ase, Mode::FfNlc),
                snr_ase: snr_channel(k, power, spectrum, ase, Mode::AseOnly),
            }
        })
        .collect())
}
