//! Versioned text serialization of [`NliSpectrum`] for disk caching.
//!
//! Floats are stored as hexadecimal IEEE-754 bit patterns, so a cache hit
//! reproduces the spectrum byte-identically. Files are keyed by the content
//! hash of the configuration plus quadrature settings; a version or hash
//! mismatch is a miss, never a crash.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gn::{NliSpectrum, SpectrumMeta};

pub const FORMAT_VERSION: &str = "airlink-spectrum-v1";

fn f64_to_hex(x: f64) -> String {
    format!("{:016x}", x.to_bits())
}

fn f64_from_hex(s: &str) -> Result<f64> {
    u64::from_str_radix(s.trim(), 16)
        .map(f64::from_bits)
        .map_err(|e| Error::Cache(format!("bad float field '{s}': {e}")))
}

/// Serializes a spectrum to the cache text format.
pub fn serialize_spectrum(spec: &NliSpectrum) -> String {
    let m = &spec.meta;
    let mut out = String::new();
    out.push_str(FORMAT_VERSION);
    out.push('\n');
    out.push_str(&format!("config_hash {:016x}\n", m.config_hash));
    out.push_str(&format!("sampling {}\n", m.sampling));
    out.push_str(&format!("num_spans {}\n", spec.num_spans));
    out.push_str(&format!("epsilon {}\n", f64_to_hex(spec.epsilon)));
    out.push_str(&format!("xi {}\n", f64_to_hex(spec.xi)));
    out.push_str(&format!("sf_rel_tol {}\n", f64_to_hex(m.sf_rel_tol)));
    out.push_str(&format!("z_rel_tol {}\n", f64_to_hex(m.z_rel_tol)));
    out.push_str(&format!("channel_gl_order {}\n", m.channel_gl_order));
    out.push_str(&format!("max_sf_rel_err {}\n", f64_to_hex(m.max_sf_rel_err)));
    out.push_str(&format!(
        "epsilon_fit_residual {}\n",
        f64_to_hex(m.epsilon_fit_residual)
    ));
    for w in &m.warnings {
        out.push_str(&format!("warning {w}\n"));
    }
    out.push_str(&format!("eta {}\n", spec.eta.len()));
    for &e in &spec.eta {
        out.push_str(&f64_to_hex(e));
        out.push('\n');
    }
    out
}

/// Parses the cache text format.
pub fn deserialize_spectrum(text: &str) -> Result<NliSpectrum> {
    let mut lines = text.lines();
    let version = lines
        .next()
        .ok_or_else(|| Error::Cache("empty cache file".into()))?;
    if version.trim() != FORMAT_VERSION {
        return Err(Error::Cache(format!(
            "version mismatch: found '{}', expected '{FORMAT_VERSION}'",
            version.trim()
        )));
    }
    let mut config_hash = None;
    let mut sampling = String::new();
    let mut num_spans = None;
    let mut epsilon = None;
    let mut xi = None;
    let mut sf_rel_tol = None;
    let mut z_rel_tol = None;
    let mut channel_gl_order = None;
    let mut max_sf_rel_err = None;
    let mut epsilon_fit_residual = None;
    let mut warnings = Vec::new();
    let mut eta = Vec::new();
    let mut eta_expected = None;

    while let Some(line) = lines.next() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
        match key {
            "config_hash" => {
                config_hash = Some(
                    u64::from_str_radix(rest.trim(), 16)
                        .map_err(|e| Error::Cache(format!("bad config_hash: {e}")))?,
                )
            }
            "sampling" => sampling = rest.trim().to_string(),
            "num_spans" => {
                num_spans = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Cache(format!("bad num_spans: {e}")))?,
                )
            }
            "epsilon" => epsilon = Some(f64_from_hex(rest)?),
            "xi" => xi = Some(f64_from_hex(rest)?),
            "sf_rel_tol" => sf_rel_tol = Some(f64_from_hex(rest)?),
            "z_rel_tol" => z_rel_tol = Some(f64_from_hex(rest)?),
            "channel_gl_order" => {
                channel_gl_order = Some(
                    rest.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Cache(format!("bad channel_gl_order: {e}")))?,
                )
            }
            "max_sf_rel_err" => max_sf_rel_err = Some(f64_from_hex(rest)?),
            "epsilon_fit_residual" => epsilon_fit_residual = Some(f64_from_hex(rest)?),
            "warning" => warnings.push(rest.to_string()),
            "eta" => {
                let n: usize = rest
                    .trim()
                    .parse()
                    .map_err(|e| Error::Cache(format!("bad eta count: {e}")))?;
                eta_expected = Some(n);
                eta.reserve(n);
                for _ in 0..n {
                    let l = lines
                        .next()
                        .ok_or_else(|| Error::Cache("truncated eta block".into()))?;
                    eta.push(f64_from_hex(l)?);
                }
            }
            other => return Err(Error::Cache(format!("unknown field '{other}'"))),
        }
    }
    let miss = |f: &str| Error::Cache(format!("missing field '{f}'"));
    let n = eta_expected.ok_or_else(|| miss("eta"))?;
    if eta.len() != n {
        return Err(Error::Cache("eta length mismatch".into()));
    }
    Ok(NliSpectrum {
        eta,
        epsilon: epsilon.ok_or_else(|| miss("epsilon"))?,
        xi: xi.ok_or_else(|| miss("xi"))?,
        num_spans: num_spans.ok_or_else(|| miss("num_spans"))?,
        meta: SpectrumMeta {
            config_hash: config_hash.ok_or_else(|| miss("config_hash"))?,
            sampling,
            sf_rel_tol: sf_rel_tol.ok_or_else(|| miss("sf_rel_tol"))?,
            z_rel_tol: z_rel_tol.ok_or_else(|| miss("z_rel_tol"))?,
            channel_gl_order: channel_gl_order.ok_or_else(|| miss("channel_gl_order"))?,
            max_sf_rel_err: max_sf_rel_err.ok_or_else(|| miss("max_sf_rel_err"))?,
            epsilon_fit_residual: epsilon_fit_residual.ok_or_else(|| miss("epsilon_fit_residual"))?,
            warnings,
        },
    })
}

/// Cache file path for a config hash.
pub fn cache_path(dir: &Path, config_hash: u64) -> PathBuf {
    dir.join(format!("spectrum-{config_hash:016x}.txt"))
}

/// Attempts to load a cached spectrum; any problem is a miss (`None`),
/// with a human-readable reason for logging.
pub fn load_spectrum(dir: &Path, config_hash: u64) -> (Option<NliSpectrum>, Option<String>) {
    let path = cache_path(dir, config_hash);
    if !path.exists() {
        return (None, None);
    }
    match fs::read_to_string(&path) {
        Ok(text) => match deserialize_spectrum(&text) {
            Ok(spec) if spec.meta.config_hash == config_hash => (Some(spec), None),
            Ok(_) => (
                None,
                Some(format!("{}: config hash mismatch, recomputing", path.display())),
            ),
            Err(e) => (
                None,
                Some(format!("{}: corrupted cache ({e}), recomputing", path.display())),
            ),
        },
        Err(e) => (
            None,
            Some(format!("{}: unreadable cache ({e}), recomputing", path.display())),
        ),
    }
}

/// Writes the spectrum atomically (temp file, then rename).
pub fn store_spectrum(dir: &Path, spec: &NliSpectrum) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = cache_path(dir, spec.meta.config_hash);
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serialize_spectrum(spec))?;
    fs::rename(&tmp, &path)?;
    Ok(path)
}
