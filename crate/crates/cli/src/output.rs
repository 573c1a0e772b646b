//! Output plumbing: run manifests, CSV writers, and gnuplot scripts.
//!
//! Every CSV starts with a `# manifest:` comment tying it to the manifest
//! entry that produced it (gnuplot and most CSV readers treat `#` lines as
//! comments). The manifest log itself is append-only.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use airlink_core::units::{
    linear_to_db, watt_to_dbm, AmplifierScheme, SystemConfig,
};
use anyhow::{Context, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Accumulates one run's manifest entry; flushed to `<out>/manifest.log`.
pub struct Manifest {
    command: String,
    config_hash: u64,
    lines: Vec<String>,
    outputs: Vec<PathBuf>,
    started: Instant,
}

impl Manifest {
    pub fn new(command: &str, cfg: &SystemConfig, config_hash: u64) -> Self {
        let mut m = Self {
            command: command.to_string(),
            config_hash,
            lines: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        };
        m.note(&format!("tool_version = {TOOL_VERSION}"));
        m.note(&format!("config_hash = {config_hash:016x}"));
        m.describe_config(cfg);
        m
    }

    fn describe_config(&mut self, cfg: &SystemConfig) {
        let f = &cfg.fiber;
        self.note(&format!(
            "fiber: alpha = {:.6e} Np/m, alpha_p = {:.6e} Np/m, beta2 = {:.6e} s^2/m, beta3 = {:.6e} s^3/m (include_beta3 = {}), gamma = {:.6e} 1/(W m), c_r = {:.6e} 1/(W m)",
            f.alpha, f.alpha_p, f.beta2, f.beta3, cfg.include_beta3, f.gamma, f.c_r
        ));
        self.note(&format!(
            "spans: {} x {:.3} km",
            cfg.spans.num_spans,
            cfg.spans.span_length / 1e3
        ));
        self.note(&format!(
            "grid: {} channels x {:.3} GHz spacing, {:.3} GBd, nu0 = {:.6e} Hz",
            cfg.grid.num_channels,
            cfg.grid.spacing / 1e9,
            cfg.grid.symbol_rate / 1e9,
            cfg.grid.center_frequency
        ));
        match cfg.amplifier {
            AmplifierScheme::Edfa { noise_figure } => self.note(&format!(
                "amplifier: EDFA, noise figure {:.3} dB",
                linear_to_db(noise_figure)
            )),
            AmplifierScheme::Raman {
                total_pump_power,
                phonon_factor,
                transparency_calibrated,
            } => self.note(&format!(
                "amplifier: Raman backward pump {:.3} W, phonon factor {:.3}, c_r {}",
                total_pump_power,
                phonon_factor,
                if transparency_calibrated {
                    "calibrated for span transparency"
                } else {
                    "explicit (residual span gain compensated by an ideal lumped element)"
                }
            )),
        }
        self.note(&format!(
            "quad: sf_rel_tol = {:.1e}, z_rel_tol = {:.1e}, channel_gl_order = {}, gh_order = {}",
            cfg.quad.sf_rel_tol, cfg.quad.z_rel_tol, cfg.quad.channel_gl_order, cfg.quad.gh_order
        ));
        // standing model decisions, recorded with every run
        self.note("decision: nu0 defaults to c/1550 nm unless the grid sets it");
        self.note("decision: Raman c_r defaults to span-transparency calibration");
        self.note(
            "decision: signal-noise NLI uses per-span ASE inside 3 xi eta P_n1 P^2; the SNR denominator uses the link total",
        );
    }

    pub fn note(&mut self, line: &str) {
        self.lines.push(line.to_string());
    }

    pub fn cache_event(&mut self, hit: bool, path: &Path) {
        self.note(&format!(
            "cache: {} {}",
            if hit { "hit" } else { "miss" },
            path.display()
        ));
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// CSV comment line referencing this manifest entry (deterministic:
    /// no timestamps, so identical runs produce identical files).
    pub fn csv_reference(&self) -> String {
        format!(
            "# manifest: manifest.log command {} config {:016x}",
            self.command, self.config_hash
        )
    }

    /// Appends the entry to `<out>/manifest.log`.
    pub fn flush(self, out_dir: &Path) -> Result<()> {
        let mut text = String::new();
        let ts = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(
            text,
            "[run command={} config={:016x} unix_time={ts}]",
            self.command, self.config_hash
        )?;
        for line in &self.lines {
            writeln!(text, "  {line}")?;
        }
        for out in &self.outputs {
            writeln!(text, "  output = {}", out.display())?;
        }
        writeln!(text, "  wall_ms = {}", self.started.elapsed().as_millis())?;
        let path = out_dir.join("manifest.log");
        fs::create_dir_all(out_dir)?;
        use std::io::Write;
        let mut file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .with_context(|| format!("cannot append to {}", path.display()))?;
        file.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// Writes a CSV with the manifest reference comment and an exact header row.
pub fn write_csv(
    out_dir: &Path,
    name: &str,
    manifest: &mut Manifest,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    let mut text = String::new();
    writeln!(text, "{}", manifest.csv_reference())?;
    writeln!(text, "{header}")?;
    for row in rows {
        writeln!(text, "{row}")?;
    }
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    manifest.output(&path);
    Ok(path)
}

/// Writes a gnuplot script next to the CSVs it plots.
pub fn write_gnuplot(
    out_dir: &Path,
    name: &str,
    manifest: &mut Manifest,
    body: &str,
) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(name);
    let mut text = String::from("# gnuplot script; run from this directory\n");
    text.push_str("set datafile separator ','\n");
    text.push_str(body);
    fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
    manifest.output(&path);
    Ok(path)
}

/// Formats a float with full round-trip precision (canonical CSV cell).
pub fn cell(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.12e}")
    } else {
        // numeric outputs are checked finite before writing; this is a guard
        "nan".into()
    }
}

pub fn cell_db(linear: f64) -> String {
    cell(linear_to_db(linear))
}

pub fn cell_dbm(watt: f64) -> String {
    cell(watt_to_dbm(watt))
}
