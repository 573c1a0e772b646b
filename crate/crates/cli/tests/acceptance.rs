//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `-- --nocapture` to see them).
//!
//! Criteria 1-6 are quantitative targets for the built-in presets; 7-12 are
//! property checks with independent oracles. Tests 5 and 6 document known
//! model/target disagreements in their output before asserting.

use std::process::Command;
use std::sync::OnceLock;

use airlink_core::budget::{
    ase_budget, noise_terms, optimal_power_closed_form, snr_spectrum, AseBudget, Mode,
};
use airlink_core::gn::{
    build_kappa_kernel, eta_spectrum, fit_epsilon, phased_array_chi, rho_edfa, rho_raman,
    xi_factor, NliSpectrum, Sampling,
};
use airlink_core::shaping::{
    air_report, apply_mb, mi_gauss_hermite, mi_monte_carlo, optimize_lambda, square_qam, Shaping,
};
use airlink_core::units::{
    db_to_linear, linear_to_db, preset_edfa, preset_raman, watt_to_dbm, SystemConfig,
};

struct LinkSetup {
    cfg: SystemConfig,
    spec: NliSpectrum,
    ase: AseBudget,
}

fn setup(cfg: SystemConfig) -> LinkSetup {
    let spec = eta_spectrum(&cfg, Sampling::auto(cfg.grid.num_channels)).unwrap();
    let ase = ase_budget(&cfg).unwrap();
    LinkSetup { cfg, spec, ase }
}

fn edfa() -> &'static LinkSetup {
    static S: OnceLock<LinkSetup> = OnceLock::new();
    S.get_or_init(|| setup(preset_edfa()))
}

fn raman() -> &'static LinkSetup {
    static S: OnceLock<LinkSetup> = OnceLock::new();
    S.get_or_init(|| setup(preset_raman()))
}

fn central_snr_db(s: &LinkSetup, mode: Mode) -> f64 {
    let recs = snr_spectrum(&s.cfg, &s.spec, &s.ase, mode).unwrap();
    let mid = recs.len() / 2;
    linear_to_db(match mode {
        Mode::Edc => recs[mid].snr_edc,
        Mode::FfNlc => recs[mid].snr_nlc,
        Mode::AseOnly => recs[mid].snr_ase,
    })
}

#[test]
fn acceptance_01_raman_over_edfa_snr_advantage() {
    let d_edc = central_snr_db(raman(), Mode::Edc) - central_snr_db(edfa(), Mode::Edc);
    let d_nlc = central_snr_db(raman(), Mode::FfNlc) - central_snr_db(edfa(), Mode::FfNlc);
    let pass = (d_edc - 3.2).abs() <= 0.5 && (d_nlc - 4.9).abs() <= 0.5;
    println!(
        "ACCEPTANCE 1 central-channel Raman-EDFA advantage: {} — EDC {d_edc:.2} dB (target 3.2±0.5), FF-NLC {d_nlc:.2} dB (target 4.9±0.5)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn acceptance_02_nlc_gain_difference() {
    let gain_edfa = central_snr_db(edfa(), Mode::FfNlc) - central_snr_db(edfa(), Mode::Edc);
    let gain_raman = central_snr_db(raman(), Mode::FfNlc) - central_snr_db(raman(), Mode::Edc);
    let diff = gain_raman - gain_edfa;
    let pass = (diff - 1.63).abs() <= 0.3;
    println!(
        "ACCEPTANCE 2 FF-NLC gain difference: {} — {diff:.2} dB (target 1.63±0.3)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

fn air_tbps(s: &LinkSetup, mode: Mode, format: usize, shaping: Shaping) -> f64 {
    let report = air_report(&s.cfg, &s.spec, &s.ase, &[mode], &[format], &[shaping]).unwrap();
    report.entries[0].air_total / 1e12
}

#[test]
fn acceptance_03_air_totals_dp1024_2000km() {
    let cases = [
        (edfa(), Shaping::Uniform, 70.0, "EDFA FF-NLC"),
        (edfa(), Shaping::MaxwellBoltzmann, 75.0, "EDFA FF-NLC+MB"),
        (raman(), Shaping::Uniform, 215.0, "Raman FF-NLC"),
        (raman(), Shaping::MaxwellBoltzmann, 223.0, "Raman FF-NLC+MB"),
    ];
    let mut all = true;
    let mut detail = String::new();
    for (s, shaping, target, name) in cases {
        let air = air_tbps(s, Mode::FfNlc, 1024, shaping);
        let ok = (air - target).abs() / target <= 0.07;
        all &= ok;
        detail.push_str(&format!("{name} {air:.1} (target {target}±7%) "));
    }
    println!(
        "ACCEPTANCE 3 DP-1024QAM AIR at 2000 km: {} — {detail}",
        if all { "PASS" } else { "FAIL" }
    );
    assert!(all);
}

#[test]
fn acceptance_04_dp64qam_ffnlc_saturation() {
    let mut all = true;
    let mut detail = String::new();
    for (s, name) in [(edfa(), "EDFA"), (raman(), "Raman")] {
        let report =
            air_report(&s.cfg, &s.spec, &s.ase, &[Mode::FfNlc], &[64], &[Shaping::Uniform])
                .unwrap();
        let min_dp = report.entries[0]
            .per_channel
            .iter()
            .map(|r| r.mi_dp)
            .fold(f64::MAX, f64::min);
        let ok = (12.0 - 0.2..=12.0 + 1e-6).contains(&min_dp);
        all &= ok;
        detail.push_str(&format!("{name} min MI {min_dp:.3} bit DP "));
    }
    println!(
        "ACCEPTANCE 4 DP-64QAM FF-NLC saturation at 12 bit: {} — {detail}(tolerance -0.2)",
        if all { "PASS" } else { "FAIL" }
    );
    assert!(all);
}

/// AIR for 256/1024 FF-NLC+MB at one distance, reusing a fixed kernel and
/// single-span eta array; only epsilon, xi, and powers are distance-bound.
fn mb_pair_at_distance(
    base: &LinkSetup,
    kernel: &airlink_core::gn::KappaKernel,
    n_spans: usize,
) -> (f64, f64) {
    let mut cfg = base.cfg.clone();
    cfg.spans.num_spans = n_spans;
    let fit = fit_epsilon(&cfg, kernel).unwrap();
    let spec = NliSpectrum {
        eta: base.spec.eta.clone(),
        epsilon: fit.epsilon,
        xi: xi_factor(n_spans, fit.epsilon),
        num_spans: n_spans,
        meta: base.spec.meta.clone(),
    };
    let ase_span = base.ase.p_n_span;
    let ase = AseBudget {
        p_n_span: ase_span,
        p_n_total: n_spans as f64 * ase_span,
    };
    let report = air_report(
        &cfg,
        &spec,
        &ase,
        &[Mode::FfNlc],
        &[256, 1024],
        &[Shaping::MaxwellBoltzmann],
    )
    .unwrap();
    let a256 = report.entries[0].air_total;
    let a1024 = report.entries[1].air_total;
    (a256, a1024)
}

#[test]
fn acceptance_05_crossover_distances() {
    let mut all = true;
    let mut detail = String::new();
    for (base, target_km, scan, name) in [
        (edfa(), 3200.0, (30usize..=55), "EDFA"),
        (raman(), 6000.0, (65usize..=90), "Raman"),
    ] {
        let kernel = build_kappa_kernel(&base.cfg).unwrap();
        let mut crossover = None;
        let mut diff_at_target = None;
        for n in scan {
            let km = n as f64 * 80.0;
            let (a256, a1024) = mb_pair_at_distance(base, &kernel, n);
            let rel = (a1024 - a256) / a1024;
            if (km - target_km).abs() < 1.0 {
                diff_at_target = Some(rel);
            }
            if rel < 0.005 && crossover.is_none() {
                crossover = Some(km);
            }
        }
        let ok = crossover.is_some_and(|km| (km - target_km).abs() <= 160.0);
        all &= ok;
        detail.push_str(&format!(
            "{name}: 0.5%-crossover at {} (target {target_km}±160 km; 256/1024 AIR difference at {target_km} km is {:.2}%) ",
            crossover.map_or("none in scan".into(), |km| format!("{km} km")),
            100.0 * diff_at_target.unwrap_or(f64::NAN),
        ));
    }
    println!(
        "ACCEPTANCE 5 256/1024 FF-NLC+MB crossover: {} — {detail}",
        if all { "PASS" } else { "FAIL" }
    );
    println!(
        "  note: the model reproduces the AIR curves themselves (criterion 3) but the \
         0.5% equality threshold lands beyond the target distances; the AIR difference \
         at the targets is 1.0-1.3%, so the stated crossover window and the 0.5% rule \
         are mutually inconsistent under this model."
    );
    assert!(all);
}

#[test]
fn acceptance_06_record_check_ratio() {
    let mut cfg = preset_edfa();
    cfg.grid.num_channels = 959;
    cfg.spans.num_spans = 113; // 9100 km floored to whole 80 km spans
    let s = setup(cfg);
    let report = air_report(
        &s.cfg,
        &s.spec,
        &s.ase,
        &[Mode::Edc],
        &[16],
        &[Shaping::Uniform],
    )
    .unwrap();
    let air = report.entries[0].air_total / 1e12;
    let ratio = 49.3 / air;
    let pass = (ratio - 0.76).abs() <= 0.06;
    println!(
        "ACCEPTANCE 6 record check: {} — 49.3 Tb/s is {:.1}% of the modeled DP-16QAM EDC AIR ({air:.1} Tb/s); target 76%±6pp",
        if pass { "PASS" } else { "FAIL" },
        100.0 * ratio
    );
    println!(
        "  note: under the documented scenario (9.59 THz, 959x10 GHz, 113x80 km spans, \
         DP-16QAM, EDC) the modeled AIR is ~{air:.0} Tb/s with central EDC SNR {:.1} dB; \
         a 76% ratio would require ~65 Tb/s (about 11 dB EDC SNR at this distance), \
         which this SNR model cannot produce at 9040 km.",
        central_snr_db(&s, Mode::Edc)
    );
    assert!(pass);
}

#[test]
fn acceptance_07_gn_brute_force_oracle() {
    // dense fixed-grid Riemann evaluation of the NLI double integral on a
    // 5-channel toy grid, with rho evaluated directly (no kernel machinery)
    fn eta_brute(cfg: &SystemConfig, k: i32, n_inner: usize, n_f: usize) -> f64 {
        let band = cfg.grid.total_bandwidth();
        let rs = cfg.grid.symbol_rate;
        let (pump, raman) = match cfg.amplifier {
            airlink_core::units::AmplifierScheme::Raman {
                total_pump_power, ..
            } => (total_pump_power, true),
            _ => (0.0, false),
        };
        let mut eta_acc = 0.0;
        for fi in 0..n_f {
            let f = k as f64 * cfg.grid.spacing + ((fi as f64 + 0.5) / n_f as f64 - 0.5) * rs;
            let mut total = 0.0;
            let df2 = band / n_inner as f64;
            for i2 in 0..n_inner {
                let f2 = -band / 2.0 + (i2 as f64 + 0.5) * df2;
                let lo = (-band / 2.0).max(f - f2 - band / 2.0);
                let hi = (band / 2.0).min(f - f2 + band / 2.0);
                if hi <= lo {
                    continue;
                }
                let df1 = (hi - lo) / n_inner as f64;
                let mut col = 0.0;
                for i1 in 0..n_inner {
                    let f1 = lo + (i1 as f64 + 0.5) * df1;
                    let kap = airlink_core::gn::kappa(f1, f2, f, &cfg.fiber, false);
                    col += if raman {
                        rho_raman(kap, &cfg.fiber, pump, cfg.spans.span_length, 1e-8).unwrap()
                    } else {
                        rho_edfa(kap, cfg.fiber.alpha, cfg.spans.span_length)
                    };
                }
                total += col * df1 * df2;
            }
            eta_acc += 16.0 * cfg.fiber.gamma * cfg.fiber.gamma / (27.0 * rs * rs) * total;
        }
        eta_acc / n_f as f64
    }

    let mut all = true;
    let mut detail = String::new();
    for (preset, n_inner, name) in [(preset_edfa(), 1500, "EDFA"), (preset_raman(), 400, "Raman")]
    {
        let mut cfg = preset;
        cfg.grid.num_channels = 5;
        let spec = eta_spectrum(&cfg, Sampling::Full).unwrap();
        let mut worst = 0.0f64;
        for k in [0i32, 2] {
            let brute = eta_brute(&cfg, k, n_inner, 3);
            let rel = (spec.eta_at(k) - brute).abs() / brute;
            worst = worst.max(rel);
        }
        all &= worst < 0.01;
        detail.push_str(&format!("{name} worst dev {:.3}% ", 100.0 * worst));
    }
    println!(
        "ACCEPTANCE 7 brute-force GN oracle (5-channel toy): {} — {detail}(limit 1%)",
        if all { "PASS" } else { "FAIL" }
    );
    assert!(all);
}

#[test]
fn acceptance_08_rho_and_chi_properties() {
    let cfg = preset_raman();
    let mut fiber = cfg.fiber;
    fiber.c_r = 0.0;
    let l = cfg.spans.span_length;
    // kappa range of a 100 GHz toy band
    let kmax = 4.0 * std::f64::consts::PI.powi(2) * cfg.fiber.beta2.abs() * 1e22;
    let mut worst = 0.0f64;
    for i in 0..1000u64 {
        let kap = (2.0 * airlink_core::quad::uniform01(77, i) - 1.0) * kmax;
        let direct = rho_raman(kap, &fiber, 3.4, l, 1e-12).unwrap();
        let closed = rho_edfa(kap, fiber.alpha, l);
        worst = worst.max((direct - closed).abs() / closed);
    }
    let even_ok = (0..50u64).all(|i| {
        let kap = kmax * airlink_core::quad::uniform01(78, i);
        (rho_edfa(kap, fiber.alpha, l) - rho_edfa(-kap, fiber.alpha, l)).abs() == 0.0
    });
    let mut one_span = preset_edfa();
    one_span.spans.num_spans = 1;
    let chi_one = phased_array_chi(0.7e12, -0.3e12, 0.1e12, &one_span);
    let n2 = {
        let cfg25 = preset_edfa();
        phased_array_chi(1e9, 1e9 + 1.0, 1e9, &cfg25) // theta ~ 0
    };
    let pass = worst < 1e-9 && even_ok && (chi_one - 1.0).abs() < 1e-12 && (n2 - 625.0).abs() < 1e-6;
    println!(
        "ACCEPTANCE 8 rho/chi properties: {} — rho_raman(C_R=0) vs rho_edfa worst {worst:.2e} (limit 1e-9), rho even: {even_ok}, chi(N=1)=1, chi(theta->0)={n2:.3}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn acceptance_09_closed_form_power_vs_search() {
    let s = edfa();
    let mut all = true;
    let mut detail = String::new();
    for (mode, name) in [(Mode::Edc, "EDC"), (Mode::FfNlc, "FF-NLC")] {
        let closed = optimal_power_closed_form(0, &s.spec, &s.ase, mode).unwrap();
        // golden-section maximization of the SNR expression whose stationary
        // point the closed form is (the respective two-term denominator)
        let snr_two = |p: f64| {
            let t = noise_terms(0, p, &s.spec, &s.ase);
            match mode {
                Mode::Edc => p / (t.p_n_total + t.p_ss),
                Mode::FfNlc => p / (t.p_n_total + t.p_sn),
                Mode::AseOnly => unreachable!(),
            }
        };
        let (mut a, mut b) = (watt_to_dbm(closed) - 12.0, watt_to_dbm(closed) + 12.0);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let to_w = |dbm: f64| 10f64.powf(dbm / 10.0) * 1e-3;
        let (mut x1, mut x2) = (b - g * (b - a), a + g * (b - a));
        let (mut f1, mut f2) = (snr_two(to_w(x1)), snr_two(to_w(x2)));
        while b - a > 1e-5 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = snr_two(to_w(x2));
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = snr_two(to_w(x1));
            }
        }
        let golden_dbm = 0.5 * (a + b);
        let dev = (golden_dbm - watt_to_dbm(closed)).abs();
        // stationarity identities, exact
        let t = noise_terms(0, closed, &s.spec, &s.ase);
        let stat = match mode {
            Mode::Edc => (t.p_ss - s.ase.p_n_total / 2.0).abs() / t.p_ss,
            Mode::FfNlc => (t.p_sn - s.ase.p_n_total).abs() / t.p_sn,
            Mode::AseOnly => unreachable!(),
        };
        all &= dev <= 0.01 && stat < 1e-12;
        detail.push_str(&format!("{name}: |golden-closed| {dev:.4} dB, stationarity {stat:.1e} "));
    }
    println!(
        "ACCEPTANCE 9 closed-form optimum powers: {} — {detail}(limits 0.01 dB, exact)",
        if all { "PASS" } else { "FAIL" }
    );
    assert!(all);
}

#[test]
fn acceptance_10_gh_vs_monte_carlo_and_mi_properties() {
    let mut all = true;
    let mut worst_z = 0.0f64;
    for m in [4usize, 16, 64] {
        let c = square_qam(m).unwrap();
        let mut prev = -1.0;
        for snr_db in [0.0, 5.0, 10.0, 15.0, 20.0] {
            let snr = db_to_linear(snr_db);
            let gh = mi_gauss_hermite(&c, snr, 16);
            let (mc, se) = mi_monte_carlo(&c, snr, 200_000, 0xA_11CE).unwrap();
            // saturated cells collapse the sample variance while the
            // quadrature itself truncates tails at the ~1e-6 bit level, so
            // allow an absolute slack far below the 1e-3 bit order-stability
            // scale of the quadrature
            let z = ((gh - mc).abs() - 1e-4).max(0.0) / (se + 1e-12);
            worst_z = worst_z.max(z);
            all &= z < 3.0;
            all &= gh >= prev - 1e-9; // monotone in snr
            all &= gh <= (1.0 + snr).log2() + 1e-9; // below capacity
            prev = gh;
        }
    }
    // the 16-QAM @ 10 dB showcase cell with a 1e7-draw oracle
    {
        let c = square_qam(16).unwrap();
        let snr = db_to_linear(10.0);
        let gh = mi_gauss_hermite(&c, snr, 16);
        let (mc, se) = mi_monte_carlo(&c, snr, 10_000_000, 0xA_11CE).unwrap();
        let z = (gh - mc).abs() / se;
        worst_z = worst_z.max(z);
        all &= z < 3.0;
    }
    // lambda = 0 equals uniform bit-exactly; shaped beats uniform
    let uni = square_qam(64).unwrap();
    let mb0 = apply_mb(&uni, 0.0).unwrap();
    all &= uni.points == mb0.points && uni.probs == mb0.probs;
    let snr = db_to_linear(12.0);
    all &= mi_gauss_hermite(&mb0, snr, 16) == mi_gauss_hermite(&uni, snr, 16);
    let (_, mi_shaped) = optimize_lambda(64, snr, 16).unwrap();
    all &= mi_shaped >= mi_gauss_hermite(&uni, snr, 16);
    println!(
        "ACCEPTANCE 10 GH vs Monte-Carlo: {} — worst |z| {worst_z:.2} over {{4,16,64}}x{{0..20 dB}} (limit 3), monotone, below capacity, MB(0)==uniform, shaped>=uniform",
        if all { "PASS" } else { "FAIL" }
    );
    assert!(all);
}

#[test]
fn acceptance_11_shaping_gain_bounded_by_ultimate() {
    let ultimate_db = 10.0 * (std::f64::consts::PI * std::f64::consts::E / 6.0).log10();
    let mut max_gain = 0.0f64;
    let mut all = true;
    for step in 0..=20 {
        let snr_db = 5.0 + step as f64;
        let snr = db_to_linear(snr_db);
        let (_, mi_shaped) = optimize_lambda(1024, snr, 16).unwrap();
        // SNR-equivalent gain: uniform input needs this much more SNR
        let uni = square_qam(1024).unwrap();
        let (mut lo, mut hi) = (snr_db - 0.01, snr_db + 1.8);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if mi_gauss_hermite(&uni, db_to_linear(mid), 16) < mi_shaped {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let gain = 0.5 * (lo + hi) - snr_db;
        max_gain = max_gain.max(gain);
        all &= gain <= ultimate_db + 0.005;
    }
    all &= max_gain >= 1.2;
    println!(
        "ACCEPTANCE 11 shaping gain (M=1024, 5-25 dB): {} — max {max_gain:.3} dB, bound {ultimate_db:.3} dB never exceeded",
        if all { "PASS" } else { "FAIL" }
    );
    assert!(all);
}

#[test]
fn acceptance_12_thread_count_determinism() {
    let bin = env!("CARGO_BIN_EXE_airlink");
    let base = std::env::temp_dir().join(format!("airlink-acc12-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&base);
    std::fs::create_dir_all(&base).unwrap();
    let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
    for threads in ["1", "8"] {
        let out = base.join(format!("out-{threads}"));
        let cache = base.join(format!("cache-{threads}"));
        for args in [
            vec!["eta", "--preset", "edfa"],
            vec![
                "air", "--preset", "edfa", "--modes", "ffnlc", "--formats", "256", "--shaping",
                "mb",
            ],
        ] {
            let status = Command::new(bin)
                .args(&args)
                .args(["--threads", threads, "--out", out.to_str().unwrap()])
                .env("AIRLINK_CACHE_DIR", &cache)
                .status()
                .unwrap();
            assert!(status.success(), "{args:?} failed");
        }
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.path().extension().is_some_and(|x| x == "csv"))
            .map(|e| {
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        files.sort();
        // include the cache file: spectrum bytes must reproduce too
        let mut cache_files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&cache)
            .unwrap()
            .filter_map(|e| e.ok())
            .map(|e| {
                (
                    e.file_name().to_string_lossy().into_owned(),
                    std::fs::read(e.path()).unwrap(),
                )
            })
            .collect();
        cache_files.sort();
        files.extend(cache_files);
        outputs.push(files);
    }
    let names: Vec<_> = outputs[0].iter().map(|(n, _)| n.clone()).collect();
    let pass = outputs[0] == outputs[1];
    println!(
        "ACCEPTANCE 12 determinism across thread counts {{1,8}}: {} — {} files byte-compared ({names:?})",
        if pass { "PASS" } else { "FAIL" },
        outputs[0].len()
    );
    let _ = std::fs::remove_dir_all(&base);
    assert!(pass);
}
