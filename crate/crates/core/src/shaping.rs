//! Constellations, Maxwell-Boltzmann shaping, mutual information by
//! Gauss-Hermite quadrature, and the per-channel AIR aggregation.
//!
//! MI is the symbol-wise soft-decision mutual information of the complex
//! AWGN channel, per polarization; dual-polarization values are twice that.
//! For square grids with a product pmf (every constellation built here) the
//! 2-D quadrature factorizes exactly into two PAM problems, which is the
//! fast path; the general 2-D form is kept for arbitrary constellations and
//! as a cross-check.

use rayon::prelude::*;

use crate::budget::{optimize_uniform_power, snr_channel, AseBudget, Mode};
use crate::error::{Error, Result};
use crate::gn::NliSpectrum;
use crate::quad::{self, normal_pair, uniform01};
use crate::units::SystemConfig;

/// Complex constellation with a probability mass function.
///
/// Points are scaled so the shaped average power is exactly one; `lambda`
/// is the Maxwell-Boltzmann rate parameter on the raw odd-integer grid
/// (lambda = 0 is uniform).
#[derive(Debug, Clone)]
pub struct ShapedConstellation {
    pub points: Vec<(f64, f64)>,
    pub probs: Vec<f64>,
    pub order: usize,
    pub lambda: f64,
    /// Raw one-dimensional PAM levels when the constellation is a square
    /// grid with a separable pmf; enables the factorized MI path.
    pam_raw: Option<Vec<f64>>,
}

fn is_square_power_of_four(m: usize) -> bool {
    if !(4..=4096).contains(&m) {
        return false;
    }
    let side = (m as f64).sqrt().round() as usize;
    side * side == m && side.is_power_of_two()
}

/// Uniform square M-QAM on the odd-integer grid, unit average power.
pub fn square_qam(m: usize) -> Result<ShapedConstellation> {
    if !is_square_power_of_four(m) {
        return Err(Error::UnsupportedFormat(m));
    }
    let side = (m as f64).sqrt().round() as usize;
    let pam: Vec<f64> = (0..side).map(|i| (2 * i as i64 - (side as i64 - 1)) as f64).collect();
    let mut points = Vec::with_capacity(m);
    for &re in &pam {
        for &im in &pam {
            points.push((re, im));
        }
    }
    let energy: f64 = points.iter().map(|(x, y)| x * x + y * y).sum::<f64>() / m as f64;
    let scale = 1.0 / energy.sqrt();
    Ok(ShapedConstellation {
        points: points.iter().map(|&(x, y)| (x * scale, y * scale)).collect(),
        probs: vec![1.0 / m as f64; m],
        order: m,
        lambda: 0.0,
        pam_raw: Some(pam),
    })
}

/// Applies a Maxwell-Boltzmann pmf p_i proportional to exp(-lambda |x_i|^2)
/// on the raw grid, then rescales points to unit shaped average power.
pub fn apply_mb(c: &ShapedConstellation, lambda: f64) -> Result<ShapedConstellation> {
    if lambda < 0.0 {
        return Err(Error::Domain(format!("lambda must be >= 0, got {lambda}")));
    }
    let side = (c.order as f64).sqrt().round() as usize;
    let pam = c
        .pam_raw
        .clone()
        .unwrap_or_else(|| (0..side).map(|i| (2 * i as i64 - (side as i64 - 1)) as f64).collect());
    if lambda == 0.0 {
        let mut uniform = square_qam(c.order)?;
        uniform.pam_raw = Some(pam);
        return Ok(uniform);
    }
    let mut points = Vec::with_capacity(c.order);
    let mut probs = Vec::with_capacity(c.order);
    // log-domain normalization for numerical hygiene at large lambda
    let mut logs = Vec::with_capacity(c.order);
    for &re in &pam {
        for &im in &pam {
            points.push((re, im));
            logs.push(-lambda * (re * re + im * im));
        }
    }
    let max_log = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut norm = 0.0;
    for &l in &logs {
        norm += (l - max_log).max(LN_FLOOR).exp();
    }
    for &l in &logs {
        // floored in the log domain so probabilities stay strictly positive
        probs.push((l - max_log).max(LN_FLOOR).exp() / norm);
    }
    let energy: f64 = points
        .iter()
        .zip(&probs)
        .map(|(&(x, y), &p)| p * (x * x + y * y))
        .sum();
    let scale = 1.0 / energy.sqrt();
    Ok(ShapedConstellation {
        points: points.iter().map(|&(x, y)| (x * scale, y * scale)).collect(),
        probs,
        order: c.order,
        lambda,
        pam_raw: Some(pam),
    })
}

/// Shannon entropy of the pmf, bits.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Gaussian-input capacity log2(1 + snr), bit/symbol per polarization.
pub fn gaussian_capacity(snr: f64) -> f64 {
    assert!(snr >= 0.0);
    (1.0 + snr).log2()
}

const LN_FLOOR: f64 = -700.0; // densities never evaluated below e^-700

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return LN_FLOOR;
    }
    let s: f64 = terms.iter().map(|&t| (t - m).max(LN_FLOOR).exp()).sum();
    m + s.ln()
}

/// One-dimensional PAM mutual information by Gauss-Hermite quadrature.
///
/// `levels` carry pmf `probs`; noise is real Gaussian with variance
/// E[levels^2] / snr_per_dim.
fn mi_pam_gh(levels: &[f64], probs: &[f64], snr_per_dim: f64, order: usize) -> f64 {
    let rule = quad::gauss_hermite_cached(order);
    let es: f64 = levels.iter().zip(probs).map(|(&x, &p)| p * x * x).sum();
    let var = es / snr_per_dim;
    let sqrt2var = (2.0 * var).sqrt();
    let ln_p: Vec<f64> = probs.iter().map(|&p| p.ln()).collect();
    let inv_pi_sqrt = 1.0 / std::f64::consts::PI.sqrt();
    let mut mi = 0.0;
    let mut terms = vec![0.0f64; levels.len()];
    for (i, (&xi, &pi)) in levels.iter().zip(probs).enumerate() {
        let mut acc = 0.0;
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let y = xi + sqrt2var * t;
            for (m, &xm) in levels.iter().enumerate() {
                let d = y - xm;
                terms[m] = ln_p[m] - d * d / (2.0 * var);
            }
            let ln_num = -t * t + ln_p[i];
            acc += w * (ln_num - log_sum_exp(&terms));
        }
        mi += pi * acc * inv_pi_sqrt;
    }
    // ln_num folded the prior ln p_i into the numerator; remove it again
    let h: f64 = probs.iter().map(|&p| p * p.ln()).sum();
    (mi - h) / std::f64::consts::LN_2
}

/// Symbol-wise MI of the complex AWGN channel, bit/symbol per polarization.
///
/// Evaluates the 2-D Gauss-Hermite sum
/// sum_i p_i pi^-1 sum_{a,b} w_a w_b log2[q(x_i + sigma(t_a + j t_b) | x_i)
/// / sum_m p_m q(. | x_m)] with sigma^2 = 1/snr, all likelihood ratios in
/// the log domain. Square-grid product constellations take an exactly
/// equivalent factorized path (two PAM quadratures).
pub fn mi_gauss_hermite(c: &ShapedConstellation, snr: f64, order: usize) -> f64 {
    assert!(snr > 0.0, "snr must be positive");
    assert!(order >= 8, "Gauss-Hermite order must be >= 8");
    if let Some(pam) = &c.pam_raw {
        // separable: per-dimension snr equals the complex snr (both signal
        // power and noise variance halve per dimension)
        let side = pam.len();
        let mut q = vec![0.0f64; side];
        for (idx, &p) in c.probs.iter().enumerate() {
            q[idx / side] += p;
        }
        return 2.0 * mi_pam_gh(pam, &q, snr, order);
    }
    mi_gh_2d(c, snr, order)
}

/// General 2-D quadrature form (any points, any pmf).
pub(crate) fn mi_gh_2d(c: &ShapedConstellation, snr: f64, order: usize) -> f64 {
    let rule = quad::gauss_hermite_cached(order);
    let sigma2 = 1.0 / snr;
    let sigma = sigma2.sqrt();
    let ln_p: Vec<f64> = c.probs.iter().map(|&p| p.ln()).collect();
    let inv_pi = 1.0 / std::f64::consts::PI;
    let mut terms = vec![0.0f64; c.points.len()];
    let mut mi = 0.0;
    for (i, (&(xr, xi_), &pi_prob)) in c.points.iter().zip(&c.probs).enumerate() {
        let mut acc = 0.0;
        for (&ta, &wa) in rule.nodes.iter().zip(&rule.weights) {
            for (&tb, &wb) in rule.nodes.iter().zip(&rule.weights) {
                let yr = xr + sigma * ta;
                let yi = xi_ + sigma * tb;
                for (m, &(mr, mi_)) in c.points.iter().enumerate() {
                    let (dr, di) = (yr - mr, yi - mi_);
                    terms[m] = ln_p[m] - (dr * dr + di * di) / sigma2;
                }
                let ln_num = -(ta * ta + tb * tb) + ln_p[i];
                acc += wa * wb * (ln_num - log_sum_exp(&terms));
            }
        }
        mi += pi_prob * acc * inv_pi;
    }
    let h: f64 = c.probs.iter().map(|&p| p * p.ln()).sum();
    (mi - h) / std::f64::consts::LN_2
}

/// Monte-Carlo estimate of the same MI integral; the independent oracle for
/// the quadrature. Deterministic for a fixed seed (counter-based RNG), so
/// parallel or repeated runs reproduce bit-identically.
pub fn mi_monte_carlo(
    c: &ShapedConstellation,
    snr: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if n_samples < 100_000 {
        return Err(Error::Domain(format!(
            "mi_monte_carlo needs n_samples >= 1e5, got {n_samples}"
        )));
    }
    let sigma2 = 1.0 / snr;
    let sigma_dim = (sigma2 / 2.0).sqrt();
    let ln_p: Vec<f64> = c.probs.iter().map(|&p| p.ln()).collect();
    // inverse-CDF lookup for symbol draws
    let mut cdf = Vec::with_capacity(c.probs.len());
    let mut acc = 0.0;
    for &p in &c.probs {
        acc += p;
        cdf.push(acc);
    }
    // fixed chunking with an ordered collect keeps the summation order (and
    // therefore the estimate) bit-identical for any thread count
    const CHUNK: u64 = 8192;
    let n_chunks = (n_samples as u64).div_ceil(CHUNK);
    let chunk_sums: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(n_samples as u64);
            let mut acc = (0.0, 0.0);
            let mut terms = vec![0.0f64; c.points.len()];
            for i in lo..hi {
                let u = uniform01(seed, 3 * i);
                let sym = cdf.partition_point(|&cp| cp < u).min(c.points.len() - 1);
                let (g1, g2) = normal_pair(seed, 3 * i + 1);
                let (zr, zi) = (sigma_dim * g1, sigma_dim * g2);
                let (xr, xi_) = c.points[sym];
                let (yr, yi) = (xr + zr, xi_ + zi);
                for (m, &(mr, mi_)) in c.points.iter().enumerate() {
                    let (dr, di) = (yr - mr, yi - mi_);
                    terms[m] = ln_p[m] - (dr * dr + di * di) / sigma2;
                }
                let ln_num = -(zr * zr + zi * zi) / sigma2;
                let v = (ln_num - log_sum_exp(&terms)) / std::f64::consts::LN_2;
                acc.0 += v;
                acc.1 += v * v;
            }
            acc
        })
        .collect();
    let stats = chunk_sums
        .iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = n_samples as f64;
    let mean = stats.0 / n;
    let var = (stats.1 / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Maximizes Gauss-Hermite MI over the Maxwell-Boltzmann family for one
/// constellation order and SNR; returns (lambda*, MI*). MI(lambda*) is
/// never below the uniform MI.
pub fn optimize_lambda(m: usize, snr: f64, order: usize) -> Result<(f64, f64)> {
    assert!(snr > 0.0);
    let base = square_qam(m)?;
    let mi_at = |lambda: f64| -> Result<f64> {
        Ok(mi_gauss_hermite(&apply_mb(&base, lambda)?, snr, order))
    };
    // bracket: raise lambda until the source entropy drops far below log2 M
    // (capped: a 4-point constellation never drops below 2 bits)
    let target_h = (m as f64).log2() - 4.0;
    let target_h = target_h.max(2.0 + 1e-9);
    let raw_energy: f64 = {
        let side = (m as f64).sqrt().round() as usize;
        let pam: Vec<f64> = (0..side).map(|i| (2 * i as i64 - (side as i64 - 1)) as f64).collect();
        pam.iter().map(|&x| x * x).sum::<f64>() / side as f64 * 2.0
    };
    let mut hi = 1.0 / raw_energy;
    for _ in 0..60 {
        let shaped = apply_mb(&base, hi)?;
        if entropy_bits(&shaped.probs) <= target_h {
            break;
        }
        hi *= 2.0;
    }
    // golden-section maximization on [0, hi]
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (0.0f64, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = mi_at(x1)?;
    let mut f2 = mi_at(x2)?;
    for _ in 0..48 {
        // MI is flat near the maximum: a bracket of 1e-3 lambda_hi moves MI
        // by well under 1e-6 bit
        if b - a < 1e-3 * hi {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = mi_at(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = mi_at(x1)?;
        }
    }
    let (lam, mi) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let uniform = mi_at(0.0)?;
    if uniform >= mi {
        Ok((0.0, uniform))
    } else {
        Ok((lam, mi))
    }
}

/// Shaping selection per AIR entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shaping {
    Uniform,
    /// Maxwell-Boltzmann with lambda maximized per channel.
    MaxwellBoltzmann,
}

impl Shaping {
    pub fn name(&self) -> &'static str {
        match self {
            Shaping::Uniform => "uniform",
            Shaping::MaxwellBoltzmann => "mb",
        }
    }
}

/// Per-channel MI at one (mode, format, shaping) combination.
#[derive(Debug, Clone, Copy)]
pub struct MiResult {
    pub k: i32,
    pub snr_used: f64,
    pub mi_per_pol: f64,
    pub mi_dp: f64,
    pub lambda: f64,
    pub quad_order: usize,
}

/// One (mode, format, shaping) AIR row.
#[derive(Debug, Clone)]
pub struct AirEntry {
    pub mode: Mode,
    pub order: usize,
    pub shaping: Shaping,
    /// Optimized uniform per-channel launch power, W.
    pub launch_power: f64,
    pub per_channel: Vec<MiResult>,
    /// Total AIR = sum_k 2 R_s MI_per_pol(k), bit/s.
    pub air_total: f64,
}

/// AIR rows plus the two capacity limits, both evaluated at the FF-NLC
/// optimal launch power.
#[derive(Debug, Clone)]
pub struct AirReport {
    pub entries: Vec<AirEntry>,
    pub limit_signal_ase: f64,
    pub limit_ase_only: f64,
}

/// Computes AIR for every requested (mode, format, shaping) combination.
pub fn air_report(
    cfg: &SystemConfig,
    spectrum: &NliSpectrum,
    ase: &AseBudget,
    modes: &[Mode],
    formats: &[usize],
    shapings: &[Shaping],
) -> Result<AirReport> {
    cfg.validate()?;
    let edge = spectrum.edge_index();
    let rs = cfg.grid.symbol_rate;
    let order = cfg.quad.gh_order;

    let p_nlc = optimize_uniform_power(spectrum, ase, Mode::FfNlc)?;
    let mut limit_signal_ase = 0.0;
    let mut limit_ase_only = 0.0;
    for k in -edge..=edge {
        limit_signal_ase +=
            2.0 * rs * gaussian_capacity(snr_channel(k, p_nlc, spectrum, ase, Mode::FfNlc));
        limit_ase_only +=
            2.0 * rs * gaussian_capacity(snr_channel(k, p_nlc, spectrum, ase, Mode::AseOnly));
    }

    let mut entries = Vec::new();
    for &mode in modes {
        if mode == Mode::AseOnly {
            continue; // represented by the ASE-only limit
        }
        let power = if mode == Mode::FfNlc {
            p_nlc
        } else {
            optimize_uniform_power(spectrum, ase, mode)?
        };
        for &m in formats {
            if !is_square_power_of_four(m) {
                return Err(Error::UnsupportedFormat(m));
            }
            for &shaping in shapings {
                let per_channel: Vec<MiResult> = (-edge..=edge)
                    .into_par_iter()
                    .map(|k| -> Result<MiResult> {
                        let snr = snr_channel(k, power, spectrum, ase, mode);
                        let (lambda, mi) = match shaping {
                            Shaping::Uniform => {
                                (0.0, mi_gauss_hermite(&square_qam(m)?, snr, order))
                            }
                            Shaping::MaxwellBoltzmann => optimize_lambda(m, snr, order)?,
                        };
                        Ok(MiResult {
                            k,
                            snr_used: snr,
                            mi_per_pol: mi,
                            mi_dp: 2.0 * mi,
                            lambda,
                            quad_order: order,
                        })
                    })
                    .collect::<Result<_>>()?;
                let air_total: f64 =
                    per_channel.iter().map(|r| 2.0 * rs * r.mi_per_pol).sum();
                entries.push(AirEntry {
                    mode,
                    order: m,
                    shaping,
                    launch_power: power,
                    per_channel,
                    air_total,
                });
            }
        }
    }
    Ok(AirReport {
        entries,
        limit_signal_ase,
        limit_ase_only,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::db_to_linear;

    #[test]
    fn square_qam_normalization_and_symmetry() {
        // M = 4: points (+-1 +- j)/sqrt(2), probs 1/4
        let c = square_qam(4).unwrap();
        let s = 0.5f64.sqrt();
        for &(x, y) in &c.points {
            assert!((x.abs() - s).abs() < 1e-15 && (y.abs() - s).abs() < 1e-15);
        }
        assert!(c.probs.iter().all(|&p| (p - 0.25).abs() < 1e-15));
        // M = 16: unit power after 1/sqrt(10) scaling
        let c = square_qam(16).unwrap();
        let e: f64 = c
            .points
            .iter()
            .zip(&c.probs)
            .map(|(&(x, y), &p)| p * (x * x + y * y))
            .sum();
        assert!((e - 1.0).abs() < 1e-12);
        let raw_scale = c.points.iter().map(|&(x, _)| x.abs()).fold(0.0f64, f64::max);
        assert!((raw_scale - 3.0 / 10f64.sqrt()).abs() < 1e-12);
        // 4-fold rotational symmetry: the point set is closed under (x,y) -> (-y,x)
        for m in [4usize, 16, 64, 256, 1024] {
            let c = square_qam(m).unwrap();
            for &(x, y) in &c.points {
                let rotated = (-y, x);
                assert!(
                    c.points
                        .iter()
                        .any(|&(a, b)| (a - rotated.0).abs() < 1e-12
                            && (b - rotated.1).abs() < 1e-12),
                    "M={m}: missing rotation of ({x},{y})"
                );
            }
        }
        // unsupported orders rejected
        for bad in [2usize, 8, 32, 128, 512, 2048, 8192] {
            assert!(square_qam(bad).is_err(), "M={bad}");
        }
    }

    #[test]
    fn mb_shaping_invariants() {
        let base = square_qam(64).unwrap();
        // lambda = 0 identical to uniform input
        let u = apply_mb(&base, 0.0).unwrap();
        assert_eq!(u.probs, base.probs);
        assert_eq!(u.points, base.points);
        for lambda in [0.01, 0.05, 0.2, 1.0, 10.0] {
            let s = apply_mb(&base, lambda).unwrap();
            let psum: f64 = s.probs.iter().sum();
            assert!((psum - 1.0).abs() < 1e-12);
            let e: f64 = s
                .points
                .iter()
                .zip(&s.probs)
                .map(|(&(x, y), &p)| p * (x * x + y * y))
                .sum();
            assert!((e - 1.0).abs() < 1e-12, "lambda {lambda}: power {e}");
            assert!(s.probs.iter().all(|&p| p > 0.0));
        }
        // lambda -> infinity: mass concentrates on the 4 innermost points
        let s = apply_mb(&base, 50.0).unwrap();
        let inner: f64 = s
            .points
            .iter()
            .zip(&s.probs)
            .filter(|(&(x, y), _)| {
                let r2 = x * x + y * y;
                r2 < 1.01 * s.points.iter().map(|&(a, b)| a * a + b * b).fold(f64::MAX, f64::min)
            })
            .map(|(_, &p)| p)
            .sum();
        assert!(inner > 0.999, "inner mass {inner}");
        // entropy strictly decreasing in lambda
        let mut prev = entropy_bits(&base.probs);
        for lambda in [0.02, 0.06, 0.15, 0.4, 1.2] {
            let h = entropy_bits(&apply_mb(&base, lambda).unwrap().probs);
            assert!(h < prev, "entropy not decreasing at lambda {lambda}");
            prev = h;
        }
        assert!(apply_mb(&base, -0.1).is_err());
    }

    #[test]
    fn gaussian_capacity_points() {
        assert_eq!(gaussian_capacity(0.0), 0.0);
        assert!((gaussian_capacity(1.0) - 1.0).abs() < 1e-15);
        assert!((gaussian_capacity(15.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn mi_saturation_and_low_snr_limits() {
        let c = square_qam(4).unwrap();
        // QPSK at 20 dB saturates at 2 bits
        let mi = mi_gauss_hermite(&c, db_to_linear(20.0), 16);
        assert!((mi - 2.0).abs() < 1e-3, "mi = {mi}");
        // snr -> 0 gives MI -> 0
        let mi = mi_gauss_hermite(&c, 1e-6, 16);
        assert!(mi.abs() < 1e-3);
        let c = square_qam(64).unwrap();
        let mi = mi_gauss_hermite(&c, db_to_linear(40.0), 16);
        assert!((mi - 6.0).abs() < 1e-3);
    }

    #[test]
    fn factorized_path_matches_general_2d() {
        for m in [4usize, 16, 64] {
            for snr_db in [2.0, 10.0, 18.0] {
                let snr = db_to_linear(snr_db);
                for lambda in [0.0, 0.07] {
                    let c = apply_mb(&square_qam(m).unwrap(), lambda).unwrap();
                    let fast = mi_gauss_hermite(&c, snr, 12);
                    let full = mi_gh_2d(&c, snr, 12);
                    assert!(
                        (fast - full).abs() < 1e-9,
                        "M={m} snr={snr_db} lambda={lambda}: {fast} vs {full}"
                    );
                }
            }
        }
    }

    #[test]
    fn mi_monotone_in_snr_and_below_capacity() {
        let c = square_qam(16).unwrap();
        let mut prev = 0.0;
        for snr_db in [-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0] {
            let snr = db_to_linear(snr_db);
            let mi = mi_gauss_hermite(&c, snr, 16);
            assert!(mi >= prev - 1e-9, "not monotone at {snr_db} dB");
            assert!(mi <= gaussian_capacity(snr) + 1e-9);
            assert!(mi <= 4.0 + 1e-9);
            prev = mi;
        }
    }

    #[test]
    fn monte_carlo_oracle_consistency() {
        let c = square_qam(16).unwrap();
        let snr = db_to_linear(10.0);
        let gh = mi_gauss_hermite(&c, snr, 16);
        let (mc, se) = mi_monte_carlo(&c, snr, 200_000, 1234).unwrap();
        assert!((gh - mc).abs() < 3.0 * se, "gh {gh} mc {mc} se {se}");
        // identical seed, identical estimate
        let (mc2, se2) = mi_monte_carlo(&c, snr, 200_000, 1234).unwrap();
        assert_eq!(mc, mc2);
        assert_eq!(se, se2);
        // doubling samples shrinks the std error by about sqrt(2)
        let (_, se4) = mi_monte_carlo(&c, snr, 800_000, 1234).unwrap();
        let ratio = se / se4;
        assert!(ratio > 1.7 && ratio < 2.3, "se ratio {ratio}");
        assert!(mi_monte_carlo(&c, snr, 10_000, 1).is_err());
    }

    #[test]
    fn lambda_optimization_properties() {
        // shaped MI never below uniform; lambda* -> 0 at very high snr
        for snr_db in [8.0, 14.0, 20.0] {
            let snr = db_to_linear(snr_db);
            let (lam, mi) = optimize_lambda(64, snr, 16).unwrap();
            let uni = mi_gauss_hermite(&square_qam(64).unwrap(), snr, 16);
            assert!(mi >= uni - 1e-12, "snr {snr_db}: {mi} < {uni}");
            assert!(mi <= gaussian_capacity(snr) + 1e-9);
            assert!(lam >= 0.0);
        }
        let (lam_sat, mi_sat) = optimize_lambda(16, db_to_linear(35.0), 16).unwrap();
        assert!((mi_sat - 4.0).abs() < 1e-6, "saturates at log2 M");
        assert_eq!(lam_sat, 0.0, "uniform optimal when noise vanishes");
        // M = 4: all raw energies equal, MB cannot beat uniform
        let (lam, _) = optimize_lambda(4, db_to_linear(5.0), 16).unwrap();
        assert_eq!(lam, 0.0);
    }

    #[test]
    fn gh_order_stability() {
        for m in [16usize, 256, 1024] {
            for snr_db in [10.0, 20.0, 30.0] {
                let c = apply_mb(&square_qam(m).unwrap(), 0.005).unwrap();
                let a = mi_gauss_hermite(&c, db_to_linear(snr_db), 16);
                let b = mi_gauss_hermite(&c, db_to_linear(snr_db), 24);
                assert!(
                    (a - b).abs() < 1e-3,
                    "M={m} snr={snr_db}: order16 {a} vs order24 {b}"
                );
            }
        }
    }
}
