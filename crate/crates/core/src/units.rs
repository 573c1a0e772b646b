//! Physical parameters, unit conversions, and the two system presets.
//!
//! Everything downstream consumes SI values only: attenuations in Np/m,
//! dispersion as beta2/beta3 in s^2/m and s^3/m, frequencies in Hz, powers
//! in W. The conversions from data-sheet units (dB/km, ps/nm/km, ...) live
//! here and nowhere else.

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;
/// Planck constant, J*s.
pub const H_PLANCK: f64 = 6.626_070_15e-34;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

pub fn watt_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1e3).log10()
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// dB/km power attenuation to Np/m.
pub fn attenuation_db_km_to_np_m(a_db_km: f64) -> Result<f64> {
    if a_db_km < 0.0 {
        return Err(Error::Domain(format!(
            "attenuation must be non-negative, got {a_db_km} dB/km"
        )));
    }
    Ok(a_db_km * std::f64::consts::LN_10 / 10.0 / 1000.0)
}

/// Dispersion parameter D (s/m^2) at `lambda_ref` (m) to beta2 (s^2/m).
pub fn dispersion_to_beta2(d: f64, lambda_ref: f64) -> Result<f64> {
    if lambda_ref <= 0.0 {
        return Err(Error::Domain(format!(
            "reference wavelength must be positive, got {lambda_ref} m"
        )));
    }
    Ok(-d * lambda_ref * lambda_ref / (2.0 * std::f64::consts::PI * C_LIGHT))
}

/// Inverse of [`dispersion_to_beta2`].
pub fn beta2_to_dispersion(beta2: f64, lambda_ref: f64) -> Result<f64> {
    if lambda_ref <= 0.0 {
        return Err(Error::Domain(format!(
            "reference wavelength must be positive, got {lambda_ref} m"
        )));
    }
    Ok(-beta2 * 2.0 * std::f64::consts::PI * C_LIGHT / (lambda_ref * lambda_ref))
}

/// Dispersion slope S (s/m^3) and D (s/m^2) at `lambda_ref` (m) to beta3 (s^3/m).
pub fn slope_to_beta3(s: f64, d: f64, lambda_ref: f64) -> Result<f64> {
    if lambda_ref <= 0.0 {
        return Err(Error::Domain(format!(
            "reference wavelength must be positive, got {lambda_ref} m"
        )));
    }
    let c = lambda_ref * lambda_ref / (2.0 * std::f64::consts::PI * C_LIGHT);
    Ok(c * c * (s + 2.0 * d / lambda_ref))
}

/// Fibre constants, all SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    /// Signal power attenuation, Np/m.
    pub alpha: f64,
    /// Pump power attenuation, Np/m.
    pub alpha_p: f64,
    /// Group-velocity dispersion, s^2/m.
    pub beta2: f64,
    /// Dispersion slope term, s^3/m.
    pub beta3: f64,
    /// Nonlinear coefficient, 1/(W*m).
    pub gamma: f64,
    /// Raman gain coefficient, 1/(W*m).
    pub c_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanPlan {
    /// Span length, m.
    pub span_length: f64,
    pub num_spans: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGrid {
    /// Odd, so channel index k runs -(N-1)/2 ..= (N-1)/2 with k = 0 central.
    pub num_channels: usize,
    /// Symbol rate, Hz.
    pub symbol_rate: f64,
    /// Channel spacing, Hz.
    pub spacing: f64,
    /// Absolute centre frequency of channel k = 0, Hz.
    pub center_frequency: f64,
}

impl ChannelGrid {
    /// Total optical bandwidth B = N_ch * spacing, Hz.
    pub fn total_bandwidth(&self) -> f64 {
        self.num_channels as f64 * self.spacing
    }

    /// Largest channel index; k runs -edge ..= edge.
    pub fn edge_index(&self) -> i32 {
        ((self.num_channels - 1) / 2) as i32
    }

    /// Frequency offset of channel k from band centre, Hz.
    pub fn offset_hz(&self, k: i32) -> f64 {
        k as f64 * self.spacing
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplifierScheme {
    Edfa {
        /// Noise figure as a linear ratio (>= 1).
        noise_figure: f64,
    },
    Raman {
        /// Total backward pump power launched at span end, W.
        total_pump_power: f64,
        /// Phonon occupancy factor (>= 1); 1.13 at room temperature.
        phonon_factor: f64,
        /// True when c_r was chosen for exact span transparency.
        transparency_calibrated: bool,
    },
}

impl AmplifierScheme {
    pub fn is_raman(&self) -> bool {
        matches!(self, AmplifierScheme::Raman { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AmplifierScheme::Edfa { .. } => "edfa",
            AmplifierScheme::Raman { .. } => "raman",
        }
    }
}

/// Quadrature and sampling knobs; defaults are fine for production runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Relative tolerance for the 2-D NLI PSD integral S(f).
    pub sf_rel_tol: f64,
    /// Relative tolerance for the Raman z-integrals.
    pub z_rel_tol: f64,
    /// Gauss-Legendre order for the per-channel band integral (>= 4).
    pub channel_gl_order: usize,
    /// Gauss-Hermite order per real dimension for mutual information.
    pub gh_order: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            sf_rel_tol: 1e-3,
            z_rel_tol: 1e-6,
            channel_gl_order: 6,
            gh_order: 16,
        }
    }
}

/// One validated bundle of everything the model needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub fiber: FiberParams,
    pub spans: SpanPlan,
    pub grid: ChannelGrid,
    pub amplifier: AmplifierScheme,
    /// beta3 term in the phase mismatch; off by default.
    pub include_beta3: bool,
    pub quad: QuadOptions,
}

impl SystemConfig {
    /// Checks every type invariant, collecting all violations.
    pub fn validate(&self) -> Result<()> {
        validate_config(self).map(|_| ())
    }
}

/// Validates a config, returning it on success or the full violation list.
///
/// Comparisons are written in negated form (`!(x > 0.0)`) so NaN fails.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn validate_config(cfg: &SystemConfig) -> Result<&SystemConfig> {
    let mut errs = Vec::new();
    let f = &cfg.fiber;
    if !(f.alpha > 0.0) {
        errs.push(format!("fiber.alpha must be > 0 Np/m, got {}", f.alpha));
    }
    if !(f.alpha_p > 0.0) {
        errs.push(format!("fiber.alpha_p must be > 0 Np/m, got {}", f.alpha_p));
    }
    if !(f.gamma > 0.0) {
        errs.push(format!("fiber.gamma must be > 0 1/(W m), got {}", f.gamma));
    }
    if !(f.c_r >= 0.0) {
        errs.push(format!("fiber.c_r must be >= 0 1/(W m), got {}", f.c_r));
    }
    if f.beta2 == 0.0 || !f.beta2.is_finite() {
        errs.push("fiber.beta2 must be finite and non-zero (dispersion-unmanaged model)".into());
    }
    if !f.beta3.is_finite() {
        errs.push("fiber.beta3 must be finite".into());
    }
    let s = &cfg.spans;
    if !(s.span_length > 0.0) {
        errs.push(format!("spans.span_length must be > 0 m, got {}", s.span_length));
    }
    if s.num_spans < 1 {
        errs.push("spans.num_spans must be >= 1".into());
    }
    let g = &cfg.grid;
    if g.num_channels.is_multiple_of(2) || g.num_channels == 0 {
        errs.push(format!("grid.num_channels must be odd, got {}", g.num_channels));
    }
    if !(g.symbol_rate > 0.0) {
        errs.push(format!("grid.symbol_rate must be > 0 Hz, got {}", g.symbol_rate));
    }
    if !(g.spacing >= g.symbol_rate) {
        errs.push(format!(
            "grid.spacing ({} Hz) must be >= symbol_rate ({} Hz)",
            g.spacing, g.symbol_rate
        ));
    }
    if !(g.center_frequency > 0.0) {
        errs.push(format!(
            "grid.center_frequency must be > 0 Hz, got {}",
            g.center_frequency
        ));
    }
    match cfg.amplifier {
        AmplifierScheme::Edfa { noise_figure } => {
            if !(noise_figure >= 1.0) {
                errs.push(format!(
                    "amplifier.noise_figure must be >= 1 linear, got {noise_figure}"
                ));
            }
        }
        AmplifierScheme::Raman {
            total_pump_power,
            phonon_factor,
            ..
        } => {
            if !(total_pump_power > 0.0) {
                errs.push(format!(
                    "amplifier.total_pump_power must be > 0 W, got {total_pump_power}"
                ));
            }
            if !(phonon_factor >= 1.0) {
                errs.push(format!(
                    "amplifier.phonon_factor must be >= 1, got {phonon_factor}"
                ));
            }
        }
    }
    let q = &cfg.quad;
    if !(q.sf_rel_tol > 0.0 && q.sf_rel_tol < 1.0) {
        errs.push(format!("quad.sf_rel_tol must be in (0, 1), got {}", q.sf_rel_tol));
    }
    if !(q.z_rel_tol > 0.0 && q.z_rel_tol < 1.0) {
        errs.push(format!("quad.z_rel_tol must be in (0, 1), got {}", q.z_rel_tol));
    }
    if q.channel_gl_order < 4 {
        errs.push(format!(
            "quad.channel_gl_order must be >= 4, got {}",
            q.channel_gl_order
        ));
    }
    if q.gh_order < 8 {
        errs.push(format!("quad.gh_order must be >= 8, got {}", q.gh_order));
    }
    if errs.is_empty() {
        Ok(cfg)
    } else {
        Err(Error::Config(errs))
    }
}

/// Raman gain coefficient (1/(W m)) making the on-off gain equal the span
/// loss: c_r * P_p0 * (1 - exp(-alpha_p L)) / alpha_p = alpha * L.
pub fn calibrate_transparent_cr(alpha: f64, alpha_p: f64, pump_power: f64, span_length: f64) -> f64 {
    alpha * span_length * alpha_p / (pump_power * (1.0 - (-alpha_p * span_length).exp()))
}

/// Reference wavelength used by both presets (C-band centre).
pub const PRESET_LAMBDA_REF: f64 = 1550e-9;

fn preset_fiber(c_r: f64) -> FiberParams {
    let d = 17.0e-6; // 17 ps/nm/km in s/m^2
    let s = 0.067e3; // 0.067 ps/nm^2/km in s/m^3
    FiberParams {
        alpha: attenuation_db_km_to_np_m(0.20).unwrap(),
        alpha_p: attenuation_db_km_to_np_m(0.25).unwrap(),
        beta2: dispersion_to_beta2(d, PRESET_LAMBDA_REF).unwrap(),
        beta3: slope_to_beta3(s, d, PRESET_LAMBDA_REF).unwrap(),
        gamma: 1.20e-3,
        c_r,
    }
}

/// 501 x 10 GHz EDFA system (~5 THz band), 80 km spans, 25 spans by default.
pub fn preset_edfa() -> SystemConfig {
    SystemConfig {
        fiber: preset_fiber(0.0),
        spans: SpanPlan {
            span_length: 80e3,
            num_spans: 25,
        },
        grid: ChannelGrid {
            num_channels: 501,
            symbol_rate: 10e9,
            spacing: 10e9,
            center_frequency: C_LIGHT / PRESET_LAMBDA_REF,
        },
        amplifier: AmplifierScheme::Edfa {
            noise_figure: db_to_linear(4.5),
        },
        include_beta3: false,
        quad: QuadOptions::default(),
    }
}

/// 1251 x 10 GHz backward-pumped Raman system (~12.5 THz band), 3.4 W pump,
/// c_r calibrated for span transparency.
pub fn preset_raman() -> SystemConfig {
    let span_length = 80e3;
    let pump = 3.4;
    let mut fiber = preset_fiber(0.0);
    fiber.c_r = calibrate_transparent_cr(fiber.alpha, fiber.alpha_p, pump, span_length);
    SystemConfig {
        fiber,
        spans: SpanPlan {
            span_length,
            num_spans: 25,
        },
        grid: ChannelGrid {
            num_channels: 1251,
            symbol_rate: 10e9,
            spacing: 10e9,
            center_frequency: C_LIGHT / PRESET_LAMBDA_REF,
        },
        amplifier: AmplifierScheme::Raman {
            total_pump_power: pump,
            phonon_factor: 1.13,
            transparency_calibrated: true,
        },
        include_beta3: false,
        quad: QuadOptions::default(),
    }
}

/// FNV-1a content hash of the config plus quadrature settings; keys the
/// spectrum cache, so any physical or tolerance change invalidates it.
pub fn config_hash(cfg: &SystemConfig, sampling_tag: &str) -> u64 {
    fn eat(h: &mut u64, bytes: &[u8]) {
        for &b in bytes {
            *h ^= b as u64;
            *h = h.wrapping_mul(0x100000001b3);
        }
    }
    fn eat_f(h: &mut u64, x: f64) {
        eat(h, &x.to_bits().to_le_bytes());
    }
    let mut h = 0xcbf29ce484222325u64;
    let f = &cfg.fiber;
    for v in [f.alpha, f.alpha_p, f.beta2, f.beta3, f.gamma, f.c_r] {
        eat_f(&mut h, v);
    }
    eat_f(&mut h, cfg.spans.span_length);
    eat_f(&mut h, cfg.spans.num_spans as f64);
    let g = &cfg.grid;
    for v in [
        g.num_channels as f64,
        g.symbol_rate,
        g.spacing,
        g.center_frequency,
    ] {
        eat_f(&mut h, v);
    }
    match cfg.amplifier {
        AmplifierScheme::Edfa { noise_figure } => {
            eat(&mut h, b"edfa");
            eat_f(&mut h, noise_figure);
        }
        AmplifierScheme::Raman {
            total_pump_power,
            phonon_factor,
            transparency_calibrated,
        } => {
            eat(&mut h, b"raman");
            eat_f(&mut h, total_pump_power);
            eat_f(&mut h, phonon_factor);
            eat(&mut h, &[transparency_calibrated as u8]);
        }
    }
    eat(&mut h, &[cfg.include_beta3 as u8]);
    let q = &cfg.quad;
    eat_f(&mut h, q.sf_rel_tol);
    eat_f(&mut h, q.z_rel_tol);
    eat_f(&mut h, q.channel_gl_order as f64);
    eat(&mut h, sampling_tag.as_bytes());
    h
}
