//! Config-file parsing: key = value pairs in [fiber], [spans], [grid],
//! [amplifier], and [run] sections. Units are embedded in key names;
//! values are converted to SI here and nowhere else.

use std::collections::BTreeMap;
use std::path::Path;

use airlink_core::gn::Sampling;
use airlink_core::units::{
    attenuation_db_km_to_np_m, calibrate_transparent_cr, db_to_linear, dispersion_to_beta2,
    slope_to_beta3, AmplifierScheme, ChannelGrid, FiberParams, QuadOptions, SpanPlan,
    SystemConfig, C_LIGHT,
};
use anyhow::{anyhow, bail, Context, Result};

/// Parsed run options that live outside SystemConfig.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// None = auto (full for small grids, sampled(33) otherwise).
    pub sampling: Option<Sampling>,
}

pub struct ParsedConfig {
    pub system: SystemConfig,
    pub run: RunOptions,
}

type Section = BTreeMap<String, String>;

fn parse_sections(text: &str, path: &Path) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            let name = line[1..line.len() - 1].trim().to_lowercase();
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            anyhow!(
                "{}:{}: expected 'key = value', got '{raw}'",
                path.display(),
                lineno + 1
            )
        })?;
        let section = current.clone().ok_or_else(|| {
            anyhow!(
                "{}:{}: key outside any [section]",
                path.display(),
                lineno + 1
            )
        })?;
        sections
            .get_mut(&section)
            .unwrap()
            .insert(key.trim().to_lowercase(), value.trim().to_string());
    }
    Ok(sections)
}

struct SectionReader {
    name: &'static str,
    map: Section,
}

impl SectionReader {
    fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .with_context(|| format!("[{}] {key} = {v}: not a number", self.name)),
        }
    }

    fn need_f64(&mut self, key: &str) -> Result<f64> {
        self.take_f64(key)?
            .ok_or_else(|| anyhow!("[{}] missing required key '{key}'", self.name))
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .with_context(|| format!("[{}] {key} = {v}: not a non-negative integer", self.name)),
        }
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(v) => match v.to_lowercase().as_str() {
                "true" | "yes" | "on" | "1" => Ok(Some(true)),
                "false" | "no" | "off" | "0" => Ok(Some(false)),
                other => bail!("[{}] {key} = {other}: not a boolean", self.name),
            },
        }
    }

    fn take_str(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.map.keys().next() {
            bail!("[{}] unknown key '{key}'", self.name);
        }
        Ok(())
    }
}

/// Loads and converts a config file; every value is validated downstream by
/// `SystemConfig::validate`.
pub fn load_config(path: &Path) -> Result<ParsedConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let mut sections = parse_sections(&text, path)?;
    let mut grab = |name: &'static str| -> Result<SectionReader> {
        sections
            .remove(name)
            .map(|map| SectionReader { name, map })
            .ok_or_else(|| anyhow!("missing [{name}] section"))
    };

    // [grid] first: the reference wavelength feeds the dispersion conversion
    let mut grid_s = grab("grid")?;
    let num_channels = grid_s
        .take_usize("num_channels")?
        .ok_or_else(|| anyhow!("[grid] missing required key 'num_channels'"))?;
    let symbol_rate = grid_s.need_f64("symbol_rate_gbaud")? * 1e9;
    let spacing = grid_s.need_f64("spacing_ghz")? * 1e9;
    let center_frequency = match (
        grid_s.take_f64("center_wavelength_nm")?,
        grid_s.take_f64("center_frequency_thz")?,
    ) {
        (Some(_), Some(_)) => {
            bail!("[grid] give either center_wavelength_nm or center_frequency_thz, not both")
        }
        (Some(nm), None) => C_LIGHT / (nm * 1e-9),
        (None, Some(thz)) => thz * 1e12,
        (None, None) => C_LIGHT / 1550e-9,
    };
    grid_s.finish()?;
    let lambda_ref = C_LIGHT / center_frequency;

    let mut fiber_s = grab("fiber")?;
    let alpha = attenuation_db_km_to_np_m(fiber_s.need_f64("attenuation_db_km")?)?;
    let alpha_p = attenuation_db_km_to_np_m(
        fiber_s.take_f64("pump_attenuation_db_km")?.unwrap_or(0.25),
    )?;
    let d_si = fiber_s.need_f64("dispersion_ps_nm_km")? * 1e-6;
    let slope_si = fiber_s
        .take_f64("dispersion_slope_ps_nm2_km")?
        .unwrap_or(0.0)
        * 1e3;
    let gamma = fiber_s.need_f64("gamma_per_w_km")? * 1e-3;
    let cr_explicit = fiber_s.take_f64("raman_gain_per_w_km")?.map(|v| v * 1e-3);
    fiber_s.finish()?;

    let mut spans_s = grab("spans")?;
    let span_length = spans_s.need_f64("span_length_km")? * 1e3;
    let num_spans = spans_s
        .take_usize("num_spans")?
        .ok_or_else(|| anyhow!("[spans] missing required key 'num_spans'"))?;
    spans_s.finish()?;

    let mut amp_s = grab("amplifier")?;
    let kind = amp_s
        .take_str("type")
        .ok_or_else(|| anyhow!("[amplifier] missing required key 'type'"))?
        .to_lowercase();
    let (amplifier, c_r) = match kind.as_str() {
        "edfa" => {
            let nf_db = amp_s.need_f64("noise_figure_db")?;
            (
                AmplifierScheme::Edfa {
                    noise_figure: db_to_linear(nf_db),
                },
                cr_explicit.unwrap_or(0.0),
            )
        }
        "raman" => {
            let pump = amp_s.need_f64("pump_power_w")?;
            let phonon = amp_s.take_f64("phonon_factor")?.unwrap_or(1.13);
            let (c_r, calibrated) = match cr_explicit {
                Some(v) => (v, false),
                None => (
                    calibrate_transparent_cr(alpha, alpha_p, pump, span_length),
                    true,
                ),
            };
            (
                AmplifierScheme::Raman {
                    total_pump_power: pump,
                    phonon_factor: phonon,
                    transparency_calibrated: calibrated,
                },
                c_r,
            )
        }
        other => bail!("[amplifier] type must be 'edfa' or 'raman', got '{other}'"),
    };
    amp_s.finish()?;

    let mut quad = QuadOptions::default();
    let mut include_beta3 = false;
    let mut sampling = None;
    if let Some(map) = sections.remove("run") {
        let mut run_s = SectionReader { name: "run", map };
        if let Some(b) = run_s.take_bool("include_beta3")? {
            include_beta3 = b;
        }
        if let Some(v) = run_s.take_f64("sf_rel_tol")? {
            quad.sf_rel_tol = v;
        }
        if let Some(v) = run_s.take_f64("z_rel_tol")? {
            quad.z_rel_tol = v;
        }
        if let Some(v) = run_s.take_usize("channel_gl_order")? {
            quad.channel_gl_order = v;
        }
        if let Some(v) = run_s.take_usize("gh_order")? {
            quad.gh_order = v;
        }
        if let Some(v) = run_s.take_usize("sample_channels")? {
            sampling = Some(if v == 0 {
                Sampling::Full
            } else {
                Sampling::Sampled(v)
            });
        }
        run_s.finish()?;
    }
    if let Some(section) = sections.keys().next() {
        bail!("unknown section [{section}]");
    }

    let system = SystemConfig {
        fiber: FiberParams {
            alpha,
            alpha_p,
            beta2: dispersion_to_beta2(d_si, lambda_ref)?,
            beta3: slope_to_beta3(slope_si, d_si, lambda_ref)?,
            gamma,
            c_r,
        },
        spans: SpanPlan {
            span_length,
            num_spans,
        },
        grid: ChannelGrid {
            num_channels,
            symbol_rate,
            spacing,
            center_frequency,
        },
        amplifier,
        include_beta3,
        quad,
    };
    Ok(ParsedConfig {
        system,
        run: RunOptions { sampling },
    })
}
