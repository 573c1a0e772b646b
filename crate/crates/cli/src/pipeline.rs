//! Shared command plumbing: config resolution, cache-backed spectrum
//! computation, and the rayon pool setup.

use std::path::{Path, PathBuf};

use airlink_core::budget::{ase_budget, AseBudget};
use airlink_core::cache::{cache_path, load_spectrum, store_spectrum};
use airlink_core::gn::{eta_spectrum, NliSpectrum, Sampling};
use airlink_core::units::{config_hash, preset_edfa, preset_raman, SystemConfig};
use anyhow::{bail, Context, Result};

use crate::config::load_config;
use crate::output::Manifest;

#[derive(Debug, Clone, clap::Args)]
pub struct SourceOpts {
    /// Config file path ([fiber]/[spans]/[grid]/[amplifier]/[run] sections).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Built-in system preset.
    #[arg(long, value_parser = ["edfa", "raman"])]
    pub preset: Option<String>,

    /// Override the number of spans (distance = spans x span length).
    #[arg(long, value_name = "N")]
    pub num_spans: Option<usize>,

    /// Integrate every channel instead of sampling + interpolation.
    #[arg(long)]
    pub full_spectrum: bool,

    /// Gauss-Hermite order per real dimension for mutual information.
    #[arg(long, value_name = "N")]
    pub gh_order: Option<usize>,

    /// Relative tolerance for the NLI PSD integral S(f).
    #[arg(long = "tol", value_name = "X")]
    pub sf_rel_tol: Option<f64>,
}

impl SourceOpts {
    /// Resolves flags + file/preset into a validated config and sampling.
    pub fn resolve(&self) -> Result<(SystemConfig, Sampling, String)> {
        let (mut cfg, mut sampling, label) = match (&self.config, &self.preset) {
            (Some(path), None) => {
                let parsed = load_config(path)?;
                (
                    parsed.system,
                    parsed.run.sampling,
                    path.display().to_string(),
                )
            }
            (None, Some(name)) => {
                let cfg = match name.as_str() {
                    "edfa" => preset_edfa(),
                    "raman" => preset_raman(),
                    _ => unreachable!(),
                };
                (cfg, None, format!("preset:{name}"))
            }
            (Some(_), Some(_)) => bail!("give either --config or --preset, not both"),
            (None, None) => bail!("one of --config or --preset is required"),
        };
        if let Some(n) = self.num_spans {
            cfg.spans.num_spans = n;
        }
        if let Some(n) = self.gh_order {
            cfg.quad.gh_order = n;
        }
        if let Some(t) = self.sf_rel_tol {
            cfg.quad.sf_rel_tol = t;
        }
        if self.full_spectrum {
            sampling = Some(Sampling::Full);
        }
        let sampling = sampling.unwrap_or_else(|| Sampling::auto(cfg.grid.num_channels));
        cfg.validate().context("configuration rejected")?;
        Ok((cfg, sampling, label))
    }
}

/// Cache directory: AIRLINK_CACHE_DIR env var, else `.airlink-cache`.
pub fn cache_dir() -> PathBuf {
    std::env::var_os("AIRLINK_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".airlink-cache"))
}

/// Loads the spectrum from cache or computes and stores it.
pub fn spectrum_cached(
    cfg: &SystemConfig,
    sampling: Sampling,
    dir: &Path,
    manifest: &mut Manifest,
) -> Result<NliSpectrum> {
    let hash = config_hash(cfg, &sampling.tag());
    let path = cache_path(dir, hash);
    let (hit, warning) = load_spectrum(dir, hash);
    if let Some(w) = warning {
        eprintln!("warning: {w}");
        manifest.note(&format!("warning: {w}"));
    }
    if let Some(spec) = hit {
        manifest.cache_event(true, &path);
        return Ok(spec);
    }
    eprintln!(
        "computing spectrum ({}, {} channels, {} spans) ...",
        sampling.tag(),
        cfg.grid.num_channels,
        cfg.spans.num_spans
    );
    let spec = eta_spectrum(cfg, sampling)?;
    for w in &spec.meta.warnings {
        eprintln!("warning: {w}");
        manifest.note(&format!("warning: {w}"));
    }
    let stored = store_spectrum(dir, &spec)?;
    manifest.cache_event(false, &stored);
    Ok(spec)
}

/// Spectrum plus ASE, the pair every link-level command needs.
pub fn link_inputs(
    cfg: &SystemConfig,
    sampling: Sampling,
    dir: &Path,
    manifest: &mut Manifest,
) -> Result<(NliSpectrum, AseBudget)> {
    let spec = spectrum_cached(cfg, sampling, dir, manifest)?;
    let ase = ase_budget(cfg)?;
    manifest.note(&format!(
        "ase: per span {:.6e} W, total {:.6e} W",
        ase.p_n_span, ase.p_n_total
    ));
    Ok((spec, ase))
}
