//! The command implementations behind the CLI surface.

use std::path::Path;

use airlink_core::budget::{snr_spectrum, Mode};
use airlink_core::gn::Sampling;
use airlink_core::shaping::{air_report, AirReport, Shaping};
use airlink_core::units::{config_hash, linear_to_db, ChannelGrid};
use anyhow::{bail, Context, Result};

use crate::output::{cell, cell_db, cell_dbm, write_csv, write_gnuplot, Manifest};
use crate::pipeline::{cache_dir, link_inputs, SourceOpts};

fn parse_modes(s: &[String]) -> Result<Vec<Mode>> {
    s.iter()
        .map(|m| match m.as_str() {
            "edc" => Ok(Mode::Edc),
            "ffnlc" => Ok(Mode::FfNlc),
            "ase_only" => Ok(Mode::AseOnly),
            other => bail!("unknown mode '{other}' (edc | ffnlc | ase_only)"),
        })
        .collect()
}

fn parse_shapings(s: &[String]) -> Result<Vec<Shaping>> {
    s.iter()
        .map(|m| match m.as_str() {
            "uniform" => Ok(Shaping::Uniform),
            "mb" => Ok(Shaping::MaxwellBoltzmann),
            other => bail!("unknown shaping '{other}' (uniform | mb)"),
        })
        .collect()
}

/// eta: per-channel NL distortion coefficients plus SNR columns, Fig-1 style.
pub fn cmd_eta(src: &SourceOpts, out_dir: &Path) -> Result<()> {
    let (cfg, sampling, label) = src.resolve()?;
    let mut manifest = Manifest::new("eta", &cfg, config_hash(&cfg, &sampling.tag()));
    manifest.note(&format!("source = {label}"));
    let (spec, ase) = link_inputs(&cfg, sampling, &cache_dir(), &mut manifest)?;
    let recs_edc = snr_spectrum(&cfg, &spec, &ase, Mode::Edc)?;
    let recs_nlc = snr_spectrum(&cfg, &spec, &ase, Mode::FfNlc)?;
    let eta0 = spec.eta_at(0);
    let rows = recs_edc.iter().zip(&recs_nlc).map(|(e, n)| {
        format!(
            "{},{},{},{},{},{}",
            e.k,
            cell(e.f_offset_hz),
            cell(e.eta),
            cell_db(e.eta / eta0),
            cell_db(e.snr_edc),
            cell_db(n.snr_nlc),
        )
    });
    write_csv(
        out_dir,
        "eta.csv",
        &mut manifest,
        "k,f_offset_hz,eta_w2,eta_rel_db,snr_edc_db,snr_nlc_db",
        rows,
    )?;
    write_gnuplot(
        out_dir,
        "eta.gp",
        &mut manifest,
        "set xlabel 'frequency offset (Hz)'\n\
         set y2tics\n\
         set ylabel 'eta relative to centre (dB)'\n\
         set y2label 'SNR (dB)'\n\
         plot 'eta.csv' using 2:4 with lines title 'eta (dB rel)', \\\n\
              'eta.csv' using 2:5 axes x1y2 with lines title 'SNR EDC', \\\n\
              'eta.csv' using 2:6 axes x1y2 with lines title 'SNR FF-NLC'\n",
    )?;
    println!(
        "eta: {} channels, eta(0) = {:.4e} 1/W^2, epsilon = {:.4}, xi = {:.1}",
        cfg.grid.num_channels,
        eta0,
        spec.epsilon,
        spec.xi
    );
    println!(
        "central SNR: EDC {:.2} dB, FF-NLC {:.2} dB (each at its optimal power)",
        linear_to_db(recs_edc[recs_edc.len() / 2].snr_edc),
        linear_to_db(recs_nlc[recs_nlc.len() / 2].snr_nlc),
    );
    manifest.flush(out_dir)
}

/// snr: the SnrRecord table at one mode's optimized uniform power.
pub fn cmd_snr(src: &SourceOpts, mode: &str, out_dir: &Path) -> Result<()> {
    let mode = parse_modes(&[mode.to_string()])?[0];
    let (cfg, sampling, label) = src.resolve()?;
    let mut manifest = Manifest::new("snr", &cfg, config_hash(&cfg, &sampling.tag()));
    manifest.note(&format!("source = {label}"));
    manifest.note(&format!("power optimized for mode = {}", mode.name()));
    let (spec, ase) = link_inputs(&cfg, sampling, &cache_dir(), &mut manifest)?;
    let recs = snr_spectrum(&cfg, &spec, &ase, mode)?;
    let rows = recs.iter().map(|r| {
        format!(
            "{},{},{},{},{},{},{}",
            r.k,
            cell(r.f_offset_hz),
            cell(r.eta),
            cell_dbm(r.launch_power),
            cell_db(r.snr_edc),
            cell_db(r.snr_nlc),
            cell_db(r.snr_ase),
        )
    });
    write_csv(
        out_dir,
        "snr.csv",
        &mut manifest,
        "k,f_offset_hz,eta_w2,p_opt_dbm,snr_edc_db,snr_nlc_db,snr_ase_db",
        rows,
    )?;
    println!(
        "snr: optimized launch power {:.2} dBm per channel ({})",
        airlink_core::units::watt_to_dbm(recs[0].launch_power),
        mode.name()
    );
    manifest.flush(out_dir)
}

fn air_summary_rows(report: &AirReport) -> Vec<String> {
    report
        .entries
        .iter()
        .map(|e| {
            format!(
                "{},{},{},{},{},{}",
                e.mode.name(),
                e.order,
                e.shaping.name(),
                cell(e.air_total / 1e12),
                cell(report.limit_signal_ase / 1e12),
                cell(report.limit_ase_only / 1e12),
            )
        })
        .collect()
}

/// air: AIR summary plus per-channel MI tables for each combination.
pub fn cmd_air(
    src: &SourceOpts,
    modes: &[String],
    formats: &[usize],
    shapings: &[String],
    out_dir: &Path,
) -> Result<()> {
    let modes = parse_modes(modes)?;
    let shapings = parse_shapings(shapings)?;
    let (cfg, sampling, label) = src.resolve()?;
    let mut manifest = Manifest::new("air", &cfg, config_hash(&cfg, &sampling.tag()));
    manifest.note(&format!("source = {label}"));
    let (spec, ase) = link_inputs(&cfg, sampling, &cache_dir(), &mut manifest)?;
    let report = air_report(&cfg, &spec, &ase, &modes, formats, &shapings)?;
    let mut summary = air_summary_rows(&report);
    if modes.contains(&Mode::AseOnly) {
        // format-independent flat limit, reported as its own row
        summary.push(format!(
            "ase_only,-,-,{},{},{}",
            cell(report.limit_ase_only / 1e12),
            cell(report.limit_signal_ase / 1e12),
            cell(report.limit_ase_only / 1e12),
        ));
    }
    write_csv(
        out_dir,
        "air_summary.csv",
        &mut manifest,
        "mode,format,shaping,air_tbps,limit_signal_ase_tbps,limit_ase_only_tbps",
        summary,
    )?;
    for e in &report.entries {
        let rows = e.per_channel.iter().map(|r| {
            format!(
                "{},{},{},{}",
                r.k,
                cell_db(r.snr_used),
                cell(r.mi_dp),
                cell(r.lambda)
            )
        });
        write_csv(
            out_dir,
            &format!("air_channels_{}_{}_{}.csv", e.mode.name(), e.order, e.shaping.name()),
            &mut manifest,
            "k,snr_db,mi_dp_bits,lambda",
            rows,
        )?;
        println!(
            "air: {} {} {} -> {:.2} Tb/s",
            e.mode.name(),
            e.order,
            e.shaping.name(),
            e.air_total / 1e12
        );
    }
    println!(
        "limits: signal-ASE {:.2} Tb/s, ASE-only {:.2} Tb/s",
        report.limit_signal_ase / 1e12,
        report.limit_ase_only / 1e12
    );
    let mut plot = String::from("set xlabel 'channel index'\nset ylabel 'MI (bit/symbol, DP)'\nplot ");
    let files: Vec<String> = report
        .entries
        .iter()
        .map(|e| {
            format!(
                "'air_channels_{}_{}_{}.csv' using 1:3 with lines title '{} {} {}'",
                e.mode.name(),
                e.order,
                e.shaping.name(),
                e.mode.name(),
                e.order,
                e.shaping.name()
            )
        })
        .collect();
    plot.push_str(&files.join(", \\\n     "));
    plot.push('\n');
    write_gnuplot(out_dir, "air.gp", &mut manifest, &plot)?;
    manifest.flush(out_dir)
}

/// sweep: AIR vs distance with per-distance epsilon and power re-optimization.
#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    src: &SourceOpts,
    distances_km: &[f64],
    modes: &[String],
    formats: &[usize],
    shapings: &[String],
    crossover_tol: f64,
    out_dir: &Path,
) -> Result<()> {
    let modes = parse_modes(modes)?;
    let shapings = parse_shapings(shapings)?;
    let (base_cfg, sampling, label) = src.resolve()?;
    if distances_km.is_empty() {
        bail!("sweep needs at least one --distances value");
    }
    let span_km = base_cfg.spans.span_length / 1e3;
    let mut span_counts = Vec::new();
    for &d in distances_km {
        let n = d / span_km;
        if (n - n.round()).abs() > 1e-9 || n < 1.0 {
            bail!(
                "distance {d} km is not a whole number of {span_km} km spans"
            );
        }
        span_counts.push(n.round() as usize);
    }
    let mut manifest = Manifest::new("sweep", &base_cfg, config_hash(&base_cfg, &sampling.tag()));
    manifest.note(&format!("source = {label}"));
    manifest.note(&format!("distances_km = {distances_km:?}"));

    let mut rows = Vec::new();
    // (format_lo, format_hi) -> per-distance AIR pairs for crossover search
    let mut mb_nlc: Vec<(f64, f64, f64)> = Vec::new(); // (km, a256, a1024)
    for &n in &span_counts {
        let mut cfg = base_cfg.clone();
        cfg.spans.num_spans = n;
        let km = n as f64 * span_km;
        let (spec, ase) = link_inputs(&cfg, sampling, &cache_dir(), &mut manifest)?;
        let report = air_report(&cfg, &spec, &ase, &modes, formats, &shapings)?;
        let mut pair = (0.0f64, 0.0f64);
        for e in &report.entries {
            rows.push(format!(
                "{},{},{},{},{},{},{}",
                cell(km),
                e.mode.name(),
                e.order,
                e.shaping.name(),
                cell(e.air_total / 1e12),
                cell(report.limit_signal_ase / 1e12),
                cell(report.limit_ase_only / 1e12),
            ));
            if e.mode == Mode::FfNlc && e.shaping == Shaping::MaxwellBoltzmann {
                if e.order == 256 {
                    pair.0 = e.air_total;
                }
                if e.order == 1024 {
                    pair.1 = e.air_total;
                }
            }
        }
        if pair.0 > 0.0 && pair.1 > 0.0 {
            mb_nlc.push((km, pair.0, pair.1));
        }
        eprintln!("sweep: {km} km done");
    }
    write_csv(
        out_dir,
        "sweep.csv",
        &mut manifest,
        "distance_km,mode,format,shaping,air_tbps,limit_signal_ase_tbps,limit_ase_only_tbps",
        rows,
    )?;

    // crossover: first distance where the 256/1024 MB+FF-NLC AIRs agree
    let mut cross_rows = Vec::new();
    let crossover = mb_nlc
        .iter()
        .find(|(_, a256, a1024)| (a1024 - a256).abs() / a1024 < crossover_tol);
    match crossover {
        Some((km, a256, a1024)) => {
            println!(
                "crossover: 256QAM and 1024QAM (FF-NLC+MB) differ by {:.3}% at {km} km (threshold {:.2}%)",
                100.0 * (a1024 - a256) / a1024,
                100.0 * crossover_tol
            );
            cross_rows.push(format!(
                "256,1024,ffnlc,mb,{},{}",
                cell(crossover_tol),
                cell(*km)
            ));
        }
        None => {
            if !mb_nlc.is_empty() {
                let (km, a256, a1024) = mb_nlc.last().unwrap();
                println!(
                    "crossover: not reached; at {km} km the 256/1024 (FF-NLC+MB) difference is still {:.3}% (threshold {:.2}%)",
                    100.0 * (a1024 - a256) / a1024,
                    100.0 * crossover_tol
                );
                cross_rows.push(format!("256,1024,ffnlc,mb,{},", cell(crossover_tol)));
            }
        }
    }
    if !cross_rows.is_empty() {
        write_csv(
            out_dir,
            "crossover.csv",
            &mut manifest,
            "format_lo,format_hi,mode,shaping,threshold_rel,crossover_km",
            cross_rows,
        )?;
    }
    write_gnuplot(
        out_dir,
        "sweep.gp",
        &mut manifest,
        "set xlabel 'distance (km)'\nset ylabel 'AIR (Tb/s)'\n\
         # one curve per (mode, format, shaping); filter rows externally or in gnuplot\n\
         plot 'sweep.csv' using 1:5 with points title 'AIR'\n",
    )?;
    manifest.flush(out_dir)
}

/// Reference throughput the record-check scenario is compared against.
pub const RECORD_RATE_TBPS: f64 = 49.3;
pub const RECORD_DISTANCE_KM: f64 = 9100.0;

/// record-check: C+L-band EDFA scenario vs the reference record throughput.
pub fn cmd_record_check(
    channels: usize,
    spans: Option<usize>,
    record_tbps: f64,
    gh_order: Option<usize>,
    sf_rel_tol: Option<f64>,
    full_spectrum: bool,
    out_dir: &Path,
) -> Result<()> {
    let mut cfg = airlink_core::units::preset_edfa();
    cfg.grid = ChannelGrid {
        num_channels: channels,
        ..cfg.grid
    };
    let span_km = cfg.spans.span_length / 1e3;
    let n_spans = spans.unwrap_or((RECORD_DISTANCE_KM / span_km).floor() as usize);
    cfg.spans.num_spans = n_spans;
    if let Some(n) = gh_order {
        cfg.quad.gh_order = n;
    }
    if let Some(t) = sf_rel_tol {
        cfg.quad.sf_rel_tol = t;
    }
    cfg.validate().context("record scenario configuration")?;
    let sampling = if full_spectrum {
        Sampling::Full
    } else {
        Sampling::auto(cfg.grid.num_channels)
    };

    let mut manifest = Manifest::new("record-check", &cfg, config_hash(&cfg, &sampling.tag()));
    let assumptions = [
        format!(
            "assumption: contiguous {:.2} THz band = {} x 10 GHz channels (odd channel count; the C+L gap is ignored)",
            cfg.grid.total_bandwidth() / 1e12,
            channels
        ),
        format!(
            "assumption: {RECORD_DISTANCE_KM} km mapped to {n_spans} whole spans = {} km (remainder dropped)",
            n_spans as f64 * span_km
        ),
        "assumption: DP-16QAM, EDC only, uniform launch power at the capacity optimum".into(),
        format!("assumption: reference record throughput {record_tbps} Tb/s"),
    ];
    for a in &assumptions {
        manifest.note(a);
        println!("{a}");
    }

    let (spec, ase) = link_inputs(&cfg, sampling, &cache_dir(), &mut manifest)?;
    let report = air_report(
        &cfg,
        &spec,
        &ase,
        &[Mode::Edc, Mode::FfNlc],
        &[16, 256],
        &[Shaping::Uniform, Shaping::MaxwellBoltzmann],
    )?;
    let mut rows = Vec::new();
    let mut ratio_16_edc = None;
    let mut upgrade = None;
    for e in &report.entries {
        let ratio = record_tbps / (e.air_total / 1e12);
        if e.mode == Mode::Edc && e.order == 16 && e.shaping == Shaping::Uniform {
            ratio_16_edc = Some(ratio);
        }
        if e.mode == Mode::FfNlc && e.order == 256 && e.shaping == Shaping::MaxwellBoltzmann {
            upgrade = Some((e.air_total / 1e12) / record_tbps);
        }
        rows.push(format!(
            "{},{},{},{},{}",
            e.mode.name(),
            e.order,
            e.shaping.name(),
            cell(e.air_total / 1e12),
            cell(ratio),
        ));
    }
    write_csv(
        out_dir,
        "record_check.csv",
        &mut manifest,
        "mode,format,shaping,air_tbps,record_over_air",
        rows,
    )?;
    if let Some(r) = ratio_16_edc {
        println!(
            "record check: {record_tbps} Tb/s is {:.1}% of the modeled DP-16QAM EDC AIR ({:.2} Tb/s)",
            100.0 * r,
            record_tbps / r
        );
        manifest.note(&format!("ratio record/air(16,edc,uniform) = {r:.4}"));
    }
    if let Some(u) = upgrade {
        println!(
            "with DP-256QAM + FF-NLC + MB the scenario reaches {u:.2}x the record rate"
        );
        manifest.note(&format!("upgrade factor air(256,ffnlc,mb)/record = {u:.4}"));
    }
    manifest.flush(out_dir)
}

/// cache: inspect or clear the spectrum cache.
pub fn cmd_cache(action: &crate::CacheAction) -> Result<()> {
    let dir = cache_dir();
    match action {
        crate::CacheAction::Status => {
            if !dir.exists() {
                println!("cache {}: empty", dir.display());
                return Ok(());
            }
            let mut total = 0u64;
            let mut count = 0usize;
            let mut entries: Vec<_> = std::fs::read_dir(&dir)?
                .filter_map(|e| e.ok())
                .filter(|e| e.path().extension().is_some_and(|x| x == "txt"))
                .collect();
            entries.sort_by_key(|e| e.file_name());
            for e in entries {
                let size = e.metadata().map(|m| m.len()).unwrap_or(0);
                total += size;
                count += 1;
                let head = std::fs::read_to_string(e.path())
                    .ok()
                    .map(|t| {
                        t.lines()
                            .take(4)
                            .map(str::to_string)
                            .collect::<Vec<_>>()
                            .join(" | ")
                    })
                    .unwrap_or_else(|| "unreadable".into());
                println!("{}  {size} bytes  [{head}]", e.file_name().to_string_lossy());
            }
            println!("cache {}: {count} entries, {total} bytes", dir.display());
        }
        crate::CacheAction::Clear { all, hash } => {
            if !dir.exists() {
                println!("cache {}: nothing to clear", dir.display());
                return Ok(());
            }
            match (all, hash) {
                (true, None) => {
                    let mut n = 0;
                    for e in std::fs::read_dir(&dir)?.filter_map(|e| e.ok()) {
                        if e.path().extension().is_some_and(|x| x == "txt") {
                            std::fs::remove_file(e.path())?;
                            n += 1;
                        }
                    }
                    println!("cleared {n} cache entries");
                }
                (false, Some(h)) => {
                    let hash = u64::from_str_radix(h.trim_start_matches("0x"), 16)
                        .context("--hash must be hexadecimal")?;
                    let path = airlink_core::cache::cache_path(&dir, hash);
                    if path.exists() {
                        std::fs::remove_file(&path)?;
                        println!("removed {}", path.display());
                    } else {
                        println!("no cache entry {}", path.display());
                    }
                }
                _ => bail!("cache clear needs exactly one of --all or --hash"),
            }
        }
    }
    Ok(())
}

