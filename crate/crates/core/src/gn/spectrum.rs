//! The NLI PSD double integral, per-channel distortion coefficients, and
//! the multi-span accumulation factors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gn::kernel::{build_kappa_kernel, chi_theta, kappa, ChiWeightedPrefix, KappaKernel};
use crate::quad::{self, adaptive, Pchip};
use crate::units::{config_hash, SystemConfig};

/// Channel sampling strategy for [`eta_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Integrate every channel.
    Full,
    /// Integrate at n symmetric sample indices (n >= 9, odd effective count)
    /// and fill the rest by monotone cubic interpolation.
    Sampled(usize),
}

impl Sampling {
    pub fn tag(&self) -> String {
        match self {
            Sampling::Full => "full".into(),
            Sampling::Sampled(n) => format!("sampled:{n}"),
        }
    }

    /// Default policy: full evaluation for small grids, sampled above.
    pub fn auto(num_channels: usize) -> Self {
        if num_channels > 101 {
            Sampling::Sampled(33)
        } else {
            Sampling::Full
        }
    }
}

/// Quadrature provenance carried by every spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMeta {
    pub config_hash: u64,
    pub sampling: String,
    pub sf_rel_tol: f64,
    pub z_rel_tol: f64,
    pub channel_gl_order: usize,
    /// Worst achieved relative error estimate among the S(f) evaluations.
    pub max_sf_rel_err: f64,
    /// Max absolute residual of the log-log epsilon fit.
    pub epsilon_fit_residual: f64,
    pub warnings: Vec<String>,
}

/// Per-channel single-span NL distortion coefficients plus accumulation
/// factors for the configured span count.
#[derive(Debug, Clone, PartialEq)]
pub struct NliSpectrum {
    /// eta in 1/W^2, indexed by position; channel k lives at k + edge.
    pub eta: Vec<f64>,
    /// Coherence factor in the N_s^(1+epsilon) accumulation law.
    pub epsilon: f64,
    /// Signal-noise accumulation sum: sum_{k=1..N_s} k^(1+epsilon).
    pub xi: f64,
    pub num_spans: usize,
    pub meta: SpectrumMeta,
}

impl NliSpectrum {
    pub fn edge_index(&self) -> i32 {
        ((self.eta.len() - 1) / 2) as i32
    }

    /// eta for channel index k (k = 0 central).
    pub fn eta_at(&self, k: i32) -> f64 {
        self.eta[(k + self.edge_index()) as usize]
    }

    /// N_s^(1+epsilon), the signal-signal accumulation factor.
    pub fn span_accumulation(&self) -> f64 {
        (self.num_spans as f64).powf(1.0 + self.epsilon)
    }
}

/// Integrator for S(f) with a fixed chi_N weight.
struct PsdIntegrator<'a> {
    kernel: &'a KappaKernel,
    prefix: &'a ChiWeightedPrefix,
    cfg: &'a SystemConfig,
    band: f64,
    prefactor: f64,
}

impl<'a> PsdIntegrator<'a> {
    fn new(kernel: &'a KappaKernel, prefix: &'a ChiWeightedPrefix, cfg: &'a SystemConfig) -> Self {
        let rs = cfg.grid.symbol_rate;
        let gamma = cfg.fiber.gamma;
        Self {
            kernel,
            prefix,
            cfg,
            band: cfg.grid.total_bandwidth(),
            prefactor: 16.0 * gamma * gamma / (27.0 * rs * rs),
        }
    }

    /// Inner integral over f1 for fixed (f2, f): the rectangular support of
    /// the NLI integrand clips f1 to one interval, and with beta3 off the
    /// integrand depends on f1 only through kappa, so the integral is a
    /// difference of kernel prefix integrals.
    fn inner(&self, f2: f64, f: f64) -> f64 {
        let half = 0.5 * self.band;
        let lo = (-half).max(f - f2 - half);
        let hi = half.min(f - f2 + half);
        if hi <= lo {
            return 0.0;
        }
        if self.cfg.include_beta3 {
            return self.inner_beta3(f2, f, lo, hi);
        }
        let a = 4.0 * std::f64::consts::PI * std::f64::consts::PI * self.cfg.fiber.beta2 * (f2 - f);
        if a == 0.0 {
            let rho0 = self.kernel.rho(0.0);
            let chi0 = if self.prefix.n_spans() > 1 {
                (self.prefix.n_spans() * self.prefix.n_spans()) as f64
            } else {
                1.0
            };
            return rho0 * chi0 * (hi - lo);
        }
        let k1 = a * (lo - f);
        let k2 = a * (hi - f);
        (self.kernel.w_query(k2, self.prefix) - self.kernel.w_query(k1, self.prefix)) / a
    }

    /// Slow general path with the beta3 term: kappa is quadratic in f1, so
    /// integrate f1 directly. Only used when include_beta3 is set.
    fn inner_beta3(&self, f2: f64, f: f64, lo: f64, hi: f64) -> f64 {
        let n = self.prefix.n_spans();
        let l = self.kernel.span_length;
        let corners = [
            kappa(lo, f2, f, &self.cfg.fiber, true).abs(),
            kappa(hi, f2, f, &self.cfg.fiber, true).abs(),
        ];
        let kmax = corners[0].max(corners[1]);
        let presplit = ((kmax * l / std::f64::consts::PI).ceil() as usize).clamp(8, 200_000);
        let res = adaptive(
            |f1: f64| {
                let kap = kappa(f1, f2, f, &self.cfg.fiber, true);
                let mut v = self.kernel.rho(kap);
                if n > 1 {
                    v *= chi_theta(0.5 * kap * l, n);
                }
                v
            },
            lo,
            hi,
            presplit,
            self.cfg.quad.sf_rel_tol * 0.25,
            0.0,
            presplit * 8 + 512,
        );
        match res {
            Ok(r) => r.value,
            Err(_) => 0.0, // propagated via the outer error estimate
        }
    }

    /// S(f): outer adaptive integral over f2, split at the f2 = f ridge.
    fn s_of_f(&self, f: f64) -> Result<(f64, f64)> {
        let half = 0.5 * self.band;
        if f.abs() > half * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "nli_psd: |f| = {:.4e} Hz outside band half-width {:.4e} Hz",
                f.abs(),
                half
            )));
        }
        let rtol = self.cfg.quad.sf_rel_tol;
        let mut value = 0.0;
        let mut err = 0.0;
        for (a, b) in [(-half, f), (f, half)] {
            if b <= a {
                continue;
            }
            let r = adaptive(
                |f2: f64| self.inner(f2, f),
                a,
                b,
                16,
                rtol,
                0.0,
                20_000,
            )
            .map_err(|e| match e {
                Error::Quadrature { achieved, required, .. } => Error::Quadrature {
                    context: format!("S(f) outer integral at f = {f:.4e} Hz"),
                    achieved,
                    required,
                },
                other => other,
            })?;
            value += r.value;
            err += r.error;
        }
        let rel = if value > 0.0 { err / value } else { 0.0 };
        Ok((self.prefactor * value, rel))
    }
}

/// NLI power spectral density S(f) for a single span (chi = 1), in the
/// units of eta per Hz; returns (value, achieved relative error estimate).
pub fn nli_psd(f: f64, kernel: &KappaKernel, cfg: &SystemConfig) -> Result<(f64, f64)> {
    let integ = PsdIntegrator::new(kernel, kernel.prefix1(), cfg);
    integ.s_of_f(f)
}

/// eta(k): average of S(f) over the channel band via fixed-order
/// Gauss-Legendre; returns (value, worst relative error of the S evals).
pub fn eta_channel(k: i32, kernel: &KappaKernel, cfg: &SystemConfig) -> Result<(f64, f64)> {
    eta_channel_weighted(k, kernel, kernel.prefix1(), cfg)
}

fn eta_channel_weighted(
    k: i32,
    kernel: &KappaKernel,
    prefix: &ChiWeightedPrefix,
    cfg: &SystemConfig,
) -> Result<(f64, f64)> {
    let edge = cfg.grid.edge_index();
    if k.abs() > edge {
        return Err(Error::Domain(format!(
            "eta_channel: channel index {k} outside grid (edge {edge})"
        )));
    }
    let integ = PsdIntegrator::new(kernel, prefix, cfg);
    let rs = cfg.grid.symbol_rate;
    let center = cfg.grid.offset_hz(k);
    let rule = quad::gauss_legendre(cfg.quad.channel_gl_order.max(4));
    let mut acc = 0.0;
    let mut worst = 0.0f64;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let f = center + 0.5 * rs * x;
        let (s, rel) = integ
            .s_of_f(f)
            .map_err(|e| wrap_channel_err(e, k, cfg.quad.sf_rel_tol))?;
        acc += w * s;
        worst = worst.max(rel);
    }
    // (1/Rs) * integral over the Rs-wide band = (1/2) * sum w S
    Ok((0.5 * acc, worst))
}

fn wrap_channel_err(e: Error, k: i32, required: f64) -> Error {
    match e {
        Error::Quadrature { context, achieved, .. } => Error::Quadrature {
            context: format!("channel {k}: {context}"),
            achieved,
            required,
        },
        other => other,
    }
}

/// Result of the coherence-factor fit.
#[derive(Debug, Clone)]
pub struct EpsilonFit {
    pub epsilon: f64,
    /// Max absolute residual of the least-squares line in log space.
    pub residual: f64,
    /// (N, eta_N(0)) pairs the fit was taken over.
    pub eta_multi_span: Vec<(usize, f64)>,
}

/// Fits the coherence factor: computes the multi-span central-channel NLI
/// eta_N(0) for N in {1, 2, 4, N_s} with the phased-array factor inserted in
/// the integrand, then least-squares fits log eta_N = (1+eps) log N + c.
///
/// The result is clamped to [0, 0.5].
pub fn fit_epsilon(cfg: &SystemConfig, kernel: &KappaKernel) -> Result<EpsilonFit> {
    if cfg.spans.num_spans < 2 {
        return Err(Error::Domain(
            "fit_epsilon requires num_spans >= 2".into(),
        ));
    }
    let mut ns: Vec<usize> = vec![1, 2, 4, cfg.spans.num_spans];
    ns.sort_unstable();
    ns.dedup();
    let eta_multi_span: Vec<(usize, f64)> = ns
        .par_iter()
        .map(|&n| {
            let prefix = if n == 1 {
                kernel.prefix1().clone()
            } else {
                kernel.build_prefix(n)
            };
            eta_channel_weighted(0, kernel, &prefix, cfg).map(|(v, _)| (n, v))
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = eta_multi_span.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = eta_multi_span.iter().map(|&(_, e)| e.ln()).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0f64, f64::max);
    let epsilon = (slope - 1.0).clamp(0.0, 0.5);
    Ok(EpsilonFit {
        epsilon,
        residual,
        eta_multi_span,
    })
}

/// xi = sum_{k=1..n_spans} k^(1+epsilon), the signal-noise accumulation sum.
pub fn xi_factor(n_spans: usize, epsilon: f64) -> f64 {
    assert!(n_spans >= 1 && epsilon >= 0.0);
    (1..=n_spans).map(|k| (k as f64).powf(1.0 + epsilon)).sum()
}

/// Computes the full per-channel spectrum, epsilon, and xi.
///
/// With `Sampled(n)`, eta is integrated at n symmetric channel indices and
/// interpolated in between (monotone cubic, so positivity is preserved).
/// With beta3 off the spectrum is mirrored from k >= 0 (the integrand is
/// exactly even); with beta3 on every sample index is integrated directly.
pub fn eta_spectrum(cfg: &SystemConfig, sampling: Sampling) -> Result<NliSpectrum> {
    cfg.validate()?;
    let kernel = build_kappa_kernel(cfg)?;
    eta_spectrum_with_kernel(cfg, &kernel, sampling)
}

pub(crate) fn eta_spectrum_with_kernel(
    cfg: &SystemConfig,
    kernel: &KappaKernel,
    sampling: Sampling,
) -> Result<NliSpectrum> {
    let edge = cfg.grid.edge_index();
    let n_ch = cfg.grid.num_channels;

    // half-spectrum sample indices 0..=edge
    let half_samples: Vec<i32> = match sampling {
        Sampling::Full => (0..=edge).collect(),
        Sampling::Sampled(n) => {
            if n < 9 {
                return Err(Error::Domain(format!(
                    "sampled spectrum needs n >= 9 indices, got {n}"
                )));
            }
            // sine-clustered placement: eta(k) curves fastest near the band
            // edge, so put more samples there
            let half = n.div_ceil(2);
            let mut ks: Vec<i32> = (0..half)
                .map(|i| {
                    let t = i as f64 / (half.max(2) - 1) as f64;
                    (edge as f64 * (std::f64::consts::FRAC_PI_2 * t).sin()).round() as i32
                })
                .collect();
            ks.dedup();
            ks
        }
    };

    let eval_indices: Vec<i32> = if cfg.include_beta3 {
        let mut v: Vec<i32> = half_samples.iter().map(|&k| -k).rev().collect();
        v.extend(half_samples.iter().skip(1));
        v
    } else {
        half_samples.clone()
    };

    let results: Vec<(f64, f64)> = eval_indices
        .par_iter()
        .map(|&k| eta_channel(k, kernel, cfg))
        .collect::<Result<_>>()?;
    let max_sf_rel_err = results.iter().map(|r| r.1).fold(0.0f64, f64::max);

    // assemble the full array, interpolating if sampled
    let mut eta = vec![0.0f64; n_ch];
    let fill = |eta: &mut [f64], xs: &[f64], ys: &[f64]| {
        if xs.len() == ys.len() && xs.len() >= 2 {
            let p = Pchip::new(xs.to_vec(), ys.to_vec());
            for (i, slot) in eta.iter_mut().enumerate() {
                *slot = p.eval(i as f64 - edge as f64);
            }
        }
    };
    match (cfg.include_beta3, sampling) {
        _ if edge == 0 => eta[0] = results[0].0,
        (false, _) => {
            // mirrored from the computed half (exact symmetry of the integrand)
            let xs: Vec<f64> = half_samples.iter().map(|&k| k as f64).collect();
            let ys: Vec<f64> = results.iter().map(|r| r.0).collect();
            if matches!(sampling, Sampling::Full) {
                for k in 0..=edge {
                    let v = ys[k as usize];
                    eta[(edge + k) as usize] = v;
                    eta[(edge - k) as usize] = v;
                }
            } else {
                let p = Pchip::new(xs, ys);
                for k in 0..=edge {
                    let v = p.eval(k as f64);
                    eta[(edge + k) as usize] = v;
                    eta[(edge - k) as usize] = v;
                }
            }
        }
        (true, Sampling::Full) => {
            for (&k, r) in eval_indices.iter().zip(&results) {
                eta[(k + edge) as usize] = r.0;
            }
        }
        (true, Sampling::Sampled(_)) => {
            let xs: Vec<f64> = eval_indices.iter().map(|&k| k as f64).collect();
            let ys: Vec<f64> = results.iter().map(|r| r.0).collect();
            fill(&mut eta, &xs, &ys);
        }
    }

    let mut warnings = Vec::new();
    let (epsilon, residual) = if cfg.spans.num_spans >= 2 {
        let fit = fit_epsilon(cfg, kernel)?;
        if fit.residual > 0.05 {
            warnings.push(format!(
                "epsilon fit residual {:.3e} exceeds 0.05 in log space",
                fit.residual
            ));
        }
        (fit.epsilon, fit.residual)
    } else {
        warnings.push("single span: epsilon set to 0 (fit needs num_spans >= 2)".into());
        (0.0, 0.0)
    };
    let xi = xi_factor(cfg.spans.num_spans, epsilon);

    Ok(NliSpectrum {
        eta,
        epsilon,
        xi,
        num_spans: cfg.spans.num_spans,
        meta: SpectrumMeta {
            config_hash: config_hash(cfg, &sampling.tag()),
            sampling: sampling.tag(),
            sf_rel_tol: cfg.quad.sf_rel_tol,
            z_rel_tol: cfg.quad.z_rel_tol,
            channel_gl_order: cfg.quad.channel_gl_order,
            max_sf_rel_err,
            epsilon_fit_residual: residual,
            warnings,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{preset_edfa, preset_raman};

    fn toy_edfa(n_ch: usize) -> SystemConfig {
        let mut cfg = preset_edfa();
        cfg.grid.num_channels = n_ch;
        cfg
    }

    #[test]
    fn psd_prefactor_scalings() {
        let cfg = toy_edfa(5);
        let kernel = build_kappa_kernel(&cfg).unwrap();
        let (s0, _) = nli_psd(0.0, &kernel, &cfg).unwrap();
        assert!(s0 > 0.0);
        // gamma = 0 -> S = 0 (prefactor); gamma doubled -> eta x4
        let mut cfg2 = cfg.clone();
        cfg2.fiber.gamma *= 2.0;
        let kernel2 = build_kappa_kernel(&cfg2).unwrap();
        let (s2, _) = nli_psd(0.0, &kernel2, &cfg2).unwrap();
        assert!((s2 / s0 - 4.0).abs() < 1e-9);
        // beta2 sign flip leaves S unchanged (rho depends on |kappa| only)
        let mut cfg3 = cfg.clone();
        cfg3.fiber.beta2 = -cfg3.fiber.beta2;
        let kernel3 = build_kappa_kernel(&cfg3).unwrap();
        let (s3, _) = nli_psd(0.0, &kernel3, &cfg3).unwrap();
        assert!((s3 - s0).abs() / s0 < 1e-9);
    }

    #[test]
    fn psd_is_even_and_rejects_out_of_band() {
        let cfg = toy_edfa(5);
        let kernel = build_kappa_kernel(&cfg).unwrap();
        for f in [5e9, 12e9, 24e9] {
            let (sp, _) = nli_psd(f, &kernel, &cfg).unwrap();
            let (sm, _) = nli_psd(-f, &kernel, &cfg).unwrap();
            assert!((sp - sm).abs() / sp < 1e-9, "f = {f}");
        }
        assert!(nli_psd(26e9, &kernel, &cfg).is_err());
    }

    #[test]
    fn psd_halved_tolerance_within_error_estimate() {
        let cfg = toy_edfa(5);
        let kernel = build_kappa_kernel(&cfg).unwrap();
        let (s1, rel1) = nli_psd(0.0, &kernel, &cfg).unwrap();
        let mut cfg2 = cfg.clone();
        cfg2.quad.sf_rel_tol *= 0.5;
        let (s2, _) = nli_psd(0.0, &kernel, &cfg2).unwrap();
        assert!((s1 - s2).abs() <= (rel1 + 1e-12) * s1.abs() + 1e-300);
    }

    #[test]
    fn eta_channel_symmetry_and_ordering() {
        let cfg = toy_edfa(5);
        let kernel = build_kappa_kernel(&cfg).unwrap();
        let (e0, _) = eta_channel(0, &kernel, &cfg).unwrap();
        let (e2, _) = eta_channel(2, &kernel, &cfg).unwrap();
        let (em2, _) = eta_channel(-2, &kernel, &cfg).unwrap();
        assert!((e2 - em2).abs() / e2 < 1e-9);
        assert!(e0 >= e2, "central channel dominates: {e0} vs {e2}");
        assert!(eta_channel(3, &kernel, &cfg).is_err());
    }

    #[test]
    fn sampled_close_to_full_on_toy_grid() {
        let cfg = toy_edfa(51);
        let full = eta_spectrum(&cfg, Sampling::Full).unwrap();
        let sampled = eta_spectrum(&cfg, Sampling::Sampled(25)).unwrap();
        let mut worst = 0.0f64;
        for i in 0..51 {
            let rel = (sampled.eta[i] - full.eta[i]).abs() / full.eta[i];
            worst = worst.max(rel);
        }
        assert!(worst < 0.01, "max interpolation deviation {worst:.4}");
        // symmetric to high accuracy
        for k in 0..=full.edge_index() {
            let a = full.eta_at(k);
            let b = full.eta_at(-k);
            assert!((a - b).abs() / a < 1e-6);
        }
    }

    #[test]
    fn epsilon_fit_behaviour() {
        let mut cfg = toy_edfa(5);
        cfg.spans.num_spans = 25;
        let kernel = build_kappa_kernel(&cfg).unwrap();
        let fit = fit_epsilon(&cfg, &kernel).unwrap();
        assert!(fit.epsilon > 0.0 && fit.epsilon < 0.5);
        // fitted epsilon reproduces the end-to-end accumulation within 5%
        let eta1 = fit.eta_multi_span[0].1;
        let eta_ns = fit.eta_multi_span.last().unwrap().1;
        let predicted = (25.0f64).powf(1.0 + fit.epsilon);
        assert!(
            (predicted - eta_ns / eta1).abs() / (eta_ns / eta1) < 0.05,
            "predicted {predicted}, measured {}",
            eta_ns / eta1
        );
        // larger dispersion decorrelates spans: epsilon falls toward the
        // incoherent limit (a 5-channel toy band keeps it well above zero)
        let mut disp = cfg.clone();
        disp.fiber.beta2 *= 300.0;
        let kd = build_kappa_kernel(&disp).unwrap();
        let fd = fit_epsilon(&disp, &kd).unwrap();
        assert!(fd.epsilon < 0.5 * fit.epsilon, "epsilon {} vs {}", fd.epsilon, fit.epsilon);
        assert!(fd.epsilon < 0.08, "epsilon {}", fd.epsilon);
        // precondition
        let mut one = cfg.clone();
        one.spans.num_spans = 1;
        let k1 = build_kappa_kernel(&one).unwrap();
        assert!(fit_epsilon(&one, &k1).is_err());
    }

    #[test]
    fn xi_factor_values() {
        assert_eq!(xi_factor(1, 0.0), 1.0);
        assert_eq!(xi_factor(25, 0.0), 325.0);
        // integral lower bound
        for &(n, eps) in &[(10usize, 0.05f64), (25, 0.0), (113, 0.04), (80, 0.3)] {
            let xi = xi_factor(n, eps);
            let bound = (n as f64).powf(2.0 + eps) / (2.0 + eps);
            assert!(xi >= bound, "n {n} eps {eps}: {xi} < {bound}");
        }
    }

    #[test]
    fn beta3_path_finite_and_slightly_asymmetric() {
        let mut cfg = toy_edfa(5);
        cfg.include_beta3 = true;
        let kernel = build_kappa_kernel(&cfg).unwrap();
        let spec = eta_spectrum_with_kernel(&cfg, &kernel, Sampling::Full).unwrap();
        for &e in &spec.eta {
            assert!(e.is_finite() && e > 0.0);
        }
        // with beta3 on, the mirror symmetry is broken but only slightly
        let rel = (spec.eta_at(2) - spec.eta_at(-2)).abs() / spec.eta_at(2);
        assert!(rel < 0.05, "beta3 asymmetry unexpectedly large: {rel}");
        // and beta3 off is recovered continuously as beta3 -> 0
        let mut tiny = cfg.clone();
        tiny.fiber.beta3 *= 1e-6;
        let kt = build_kappa_kernel(&tiny).unwrap();
        let st = eta_spectrum_with_kernel(&tiny, &kt, Sampling::Full).unwrap();
        let mut off = cfg.clone();
        off.include_beta3 = false;
        let ko = build_kappa_kernel(&off).unwrap();
        let so = eta_spectrum_with_kernel(&off, &ko, Sampling::Full).unwrap();
        let rel = (st.eta_at(0) - so.eta_at(0)).abs() / so.eta_at(0);
        assert!(rel < 5e-3, "beta3 -> 0 continuity: {rel}");
    }

    #[test]
    fn raman_toy_spectrum_works() {
        let mut cfg = preset_raman();
        cfg.grid.num_channels = 5;
        let spec = eta_spectrum(&cfg, Sampling::Full).unwrap();
        assert!(spec.eta.iter().all(|&e| e > 0.0));
        assert!(spec.eta_at(0) >= spec.eta_at(2));
        assert!(spec.epsilon >= 0.0 && spec.epsilon <= 0.5);
        assert!(spec.xi >= spec.num_spans as f64);
        // metadata carries tolerances and achieved error estimates
        assert_eq!(spec.meta.sf_rel_tol, cfg.quad.sf_rel_tol);
        assert_eq!(spec.meta.z_rel_tol, cfg.quad.z_rel_tol);
        assert!(spec.meta.max_sf_rel_err > 0.0);
        assert!(spec.meta.max_sf_rel_err <= cfg.quad.sf_rel_tol);
        assert_eq!(spec.meta.sampling, "full");
    }

    #[test]
    fn single_channel_grid_is_handled() {
        let mut cfg = preset_edfa();
        cfg.grid.num_channels = 1;
        let spec = eta_spectrum(&cfg, Sampling::Full).unwrap();
        assert_eq!(spec.eta.len(), 1);
        assert!(spec.eta[0] > 0.0);
    }
}
