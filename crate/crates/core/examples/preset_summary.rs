//! Prints the headline numbers for both presets at 2000 km.

use airlink_core::budget::{ase_budget, snr_spectrum, Mode};
use airlink_core::gn::{eta_spectrum, Sampling};
use airlink_core::shaping::{air_report, Shaping};
use airlink_core::units::{linear_to_db, preset_edfa, preset_raman, watt_to_dbm};

fn main() {
    let t0 = std::time::Instant::now();
    let mut snr_central = Vec::new();
    for cfg in [preset_edfa(), preset_raman()] {
        let name = cfg.amplifier.name();
        let t = std::time::Instant::now();
        let spec = eta_spectrum(&cfg, Sampling::auto(cfg.grid.num_channels)).unwrap();
        let ase = ase_budget(&cfg).unwrap();
        println!(
            "{name}: eta(0) = {:.4e} 1/W^2, eps = {:.4}, xi = {:.1}, P_n1 = {:.4e} W ({:.2} dBm)  [{:.2?}]",
            spec.eta_at(0),
            spec.epsilon,
            spec.xi,
            ase.p_n_span,
            watt_to_dbm(ase.p_n_span),
            t.elapsed()
        );
        let t = std::time::Instant::now();
        let recs_edc = snr_spectrum(&cfg, &spec, &ase, Mode::Edc).unwrap();
        let recs_nlc = snr_spectrum(&cfg, &spec, &ase, Mode::FfNlc).unwrap();
        let mid = recs_edc.len() / 2;
        println!(
            "  central SNR: EDC = {:.2} dB @ {:.2} dBm | NLC = {:.2} dB @ {:.2} dBm  [{:.2?}]",
            linear_to_db(recs_edc[mid].snr_edc),
            watt_to_dbm(recs_edc[mid].launch_power),
            linear_to_db(recs_nlc[mid].snr_nlc),
            watt_to_dbm(recs_nlc[mid].launch_power),
            t.elapsed()
        );
        snr_central.push((
            linear_to_db(recs_edc[mid].snr_edc),
            linear_to_db(recs_nlc[mid].snr_nlc),
        ));
        let t = std::time::Instant::now();
        let report = air_report(
            &cfg,
            &spec,
            &ase,
            &[Mode::FfNlc],
            &[64, 256, 1024],
            &[Shaping::Uniform, Shaping::MaxwellBoltzmann],
        )
        .unwrap();
        for e in &report.entries {
            let mid = e.per_channel.len() / 2;
            println!(
                "  {} {} {}: AIR = {:.2} Tb/s (MIdp central {:.3}, edge {:.3})",
                e.mode.name(),
                e.order,
                e.shaping.name(),
                e.air_total / 1e12,
                e.per_channel[mid].mi_dp,
                e.per_channel[0].mi_dp,
            );
        }
        println!(
            "  limits: signal-ASE {:.2} Tb/s, ASE-only {:.2} Tb/s  [{:.2?}]",
            report.limit_signal_ase / 1e12,
            report.limit_ase_only / 1e12,
            t.elapsed()
        );
    }
    let (e, r) = (snr_central[0], snr_central[1]);
    println!(
        "delta SNR Raman-EDFA: EDC {:.2} dB, NLC {:.2} dB, NLC-gain diff {:.2} dB",
        r.0 - e.0,
        r.1 - e.1,
        (r.1 - r.0) - (e.1 - e.0)
    );
    println!("total {:.2?}", t0.elapsed());
}
