//! FWM efficiency kernel: rho as a function of the scalar phase mismatch
//! kappa, plus the accumulation machinery used by the 2-D NLI integral.
//!
//! With beta3 disabled, rho and the phased-array factor depend on the
//! frequency triple only through kappa, so the inner f1 integration of the
//! NLI double integral collapses to differences of W(kappa) = int_0^kappa
//! rho(u) chi(u) du. W is tabulated once per span configuration: an
//! oscillation-resolved cell-prefix table up to kappa_c, and an analytic
//! power-law antiderivative of the envelope mean beyond (the cos(kappa L)
//! ripple integrates to a negligible remainder out there).
//!
//! rho itself is evaluated three ways:
//!   - EDFA: closed form.
//!   - Raman, small kappa: direct z-integral of the signal power profile,
//!     tabulated on a dense grid and spline-interpolated.
//!   - Raman, large kappa: integration-by-parts asymptotic series, which
//!     splits the integral into smooth envelopes times exp(j kappa L).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::{self, CubicSpline, Rule};
use crate::units::{AmplifierScheme, FiberParams, SystemConfig};

/// Number of integration-by-parts terms kept in the asymptotic series.
const IBP_TERMS: usize = 9;
/// Asymptotic series is used above `IBP_SCALE_FACTOR * max(alpha, alpha_p, c_r P_p0)`.
const IBP_SCALE_FACTOR: f64 = 25.0;
/// Oscillation-resolved region extends to kappa = RESOLVED_PHASE / L_s.
const RESOLVED_PHASE: f64 = 2000.0;
/// Cells per half-oscillation of cos(kappa L) in the resolved region.
const CELLS_PER_PI: f64 = 8.0;
/// Raman small-kappa table spacing, radians of kappa*L per point.
const TABLE_PHASE_STEP: f64 = std::f64::consts::PI / 32.0;
/// Relative accuracy demanded of the small-kappa table at build time.
const TABLE_CHECK_LIMIT: f64 = 1e-3;

/// Scalar phase mismatch kappa = 4 pi^2 (f1-f)(f2-f) [beta2 + pi beta3 (f1+f2)], rad/m.
pub fn kappa(f1: f64, f2: f64, f: f64, fiber: &FiberParams, include_beta3: bool) -> f64 {
    let bracket = if include_beta3 {
        fiber.beta2 + std::f64::consts::PI * fiber.beta3 * (f1 + f2)
    } else {
        fiber.beta2
    };
    4.0 * std::f64::consts::PI * std::f64::consts::PI * (f1 - f) * (f2 - f) * bracket
}

/// Phased-array factor sin^2(N theta)/sin^2(theta) with theta = kappa L/2.
///
/// Finite everywhere: near sin(theta) = 0 it takes the analytic limit N^2
/// via a series expansion instead of small-denominator arithmetic.
pub fn phased_array_chi(f1: f64, f2: f64, f: f64, cfg: &SystemConfig) -> f64 {
    let kap = kappa(f1, f2, f, &cfg.fiber, cfg.include_beta3);
    let theta = 0.5 * kap * cfg.spans.span_length;
    chi_theta(theta, cfg.spans.num_spans)
}

/// chi as a function of theta directly.
pub(crate) fn chi_theta(theta: f64, n_spans: usize) -> f64 {
    let n = n_spans as f64;
    // reduce theta mod pi into [-pi/2, pi/2]; sin^2 of both numerator and
    // denominator are invariant under integer-pi shifts
    let r = theta / std::f64::consts::PI;
    let t = (r - r.round()) * std::f64::consts::PI;
    if t.abs() < 1e-6 {
        // sin(N t)^2 / sin(t)^2 -> N^2 (1 - (N^2 - 1) t^2 / 3) + O(t^4)
        return n * n * (1.0 - (n * n - 1.0) * t * t / 3.0);
    }
    let s = (n * t).sin() / t.sin();
    s * s
}

/// EDFA FWM efficiency: |(1 - e^{-alpha L} e^{j kappa L}) / (alpha - j kappa)|^2, m^2.
pub fn rho_edfa(kap: f64, alpha: f64, span_length: f64) -> f64 {
    let r = (-alpha * span_length).exp();
    let phase = kap * span_length;
    let num = 1.0 + r * r - 2.0 * r * phase.cos();
    num / (alpha * alpha + kap * kap)
}

/// Normalized signal power profile under backward Raman pumping.
///
/// g(z) = exp(-alpha z + (C_R P_p0 / alpha_p)(e^{-alpha_p (L-z)} - e^{-alpha_p L})),
/// so g(0) = 1; with c_r = 0 it reduces to plain fibre loss.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerProfile {
    alpha: f64,
    alpha_p: f64,
    /// C_R * P_p0 / alpha_p (dimensionless gain strength).
    gain: f64,
    pub length: f64,
}

impl PowerProfile {
    pub fn new(fiber: &FiberParams, pump_power: f64, span_length: f64) -> Self {
        Self {
            alpha: fiber.alpha,
            alpha_p: fiber.alpha_p,
            gain: fiber.c_r * pump_power / fiber.alpha_p,
            length: span_length,
        }
    }

    pub fn ln_g(&self, z: f64) -> f64 {
        -self.alpha * z
            + self.gain
                * ((-self.alpha_p * (self.length - z)).exp() - (-self.alpha_p * self.length).exp())
    }

    pub fn g(&self, z: f64) -> f64 {
        self.ln_g(z).exp()
    }
}

/// Raman FWM efficiency |int_0^L g(z) e^{j kappa z} dz|^2 by direct
/// quadrature of the oscillatory z-integral, m^2.
///
/// This is the reference evaluation; [`KappaKernel`] wraps it with tabulation
/// and asymptotics for speed. With c_r = 0 it equals [`rho_edfa`] exactly.
pub fn rho_raman(
    kap: f64,
    fiber: &FiberParams,
    pump_power: f64,
    span_length: f64,
    rel_tol: f64,
) -> Result<f64> {
    let profile = PowerProfile::new(fiber, pump_power, span_length);
    Ok(raman_field_integral(kap, &profile, rel_tol)?.norm_sqr())
}

/// Complex field integral A(kappa) = int_0^L g(z) e^{j kappa z} dz.
///
/// Composite 15-point Gauss with one chunk per half-oscillation, verified by
/// doubling the chunk count until two passes agree. A per-chunk error-sum
/// estimator would be hopelessly pessimistic here: millions of tiny chunk
/// estimates add up while the true errors cancel.
fn raman_field_integral(kap: f64, profile: &PowerProfile, rel_tol: f64) -> Result<Complex64> {
    let l = profile.length;
    let composite = |n: usize| -> Complex64 {
        let h = l / n as f64;
        let chunks: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = i as f64 * h;
                let mid = a + 0.5 * h;
                let f = |z: f64| Complex64::new(profile.ln_g(z), kap * z).exp();
                let mut acc = f(mid) * crate::quad::WGK_CENTER;
                for j in 0..7 {
                    let x = 0.5 * h * crate::quad::XGK_POS[j];
                    acc += (f(mid - x) + f(mid + x)) * crate::quad::WGK_POS[j];
                }
                acc * (0.5 * h)
            })
            .collect();
        chunks.iter().fold(Complex64::new(0.0, 0.0), |a, &c| a + c)
    };
    let mut n = ((kap.abs() * l / std::f64::consts::PI).ceil() as usize).clamp(4, 8_000_000);
    let mut prev = composite(n);
    let atol = 1e-13 * l;
    for _ in 0..5 {
        n *= 2;
        let cur = composite(n);
        let diff = (cur - prev).norm();
        if diff <= (rel_tol * cur.norm()).max(atol) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature {
        context: format!("rho_raman z-integral at kappa = {kap:.4e} rad/m"),
        achieved: if prev.norm() > 0.0 {
            (composite(2 * n) - prev).norm() / prev.norm()
        } else {
            f64::INFINITY
        },
        required: rel_tol,
    })
}

/// Integration-by-parts series data: derivatives of g at both span ends.
///
/// A(kappa) = e^{j kappa L} U(kappa) - V(kappa) with
/// U = sum_n (-1)^{n-1} g^{(n-1)}(L) / (j kappa)^n (V likewise at z = 0);
/// both are smooth in kappa, all oscillation is in the explicit phase factor.
#[derive(Debug, Clone)]
struct IbpSeries {
    /// g^{(m)}(L) for m = 0..IBP_TERMS-1.
    d_end: [f64; IBP_TERMS],
    /// g^{(m)}(0).
    d_start: [f64; IBP_TERMS],
    span_length: f64,
    /// Envelope antiderivative coefficients c_p for p = 2..=2*IBP_TERMS.
    tail_coeff: Vec<f64>,
}

impl IbpSeries {
    fn new(profile: &PowerProfile) -> Self {
        // g^(m) = g * P_m(E) where E = e^{-alpha_p (L - z)}; the P_m satisfy
        // P_1 = -alpha + c E, P_{m+1} = P_m (-alpha + c E) + alpha_p E dP_m/dE
        // with c = C_R P_p0 (since gain = c / alpha_p).
        let c = profile.gain * profile.alpha_p;
        let mut poly = vec![0.0f64; IBP_TERMS + 1];
        poly[0] = -profile.alpha;
        poly[1] = c;
        let e0 = (-profile.alpha_p * profile.length).exp();
        let g_end = profile.g(profile.length);

        let eval = |p: &[f64], e: f64| {
            let mut acc = 0.0;
            for &coef in p.iter().rev() {
                acc = acc * e + coef;
            }
            acc
        };

        let mut d_end = [0.0f64; IBP_TERMS];
        let mut d_start = [0.0f64; IBP_TERMS];
        d_end[0] = g_end;
        d_start[0] = 1.0;
        let mut cur = poly.clone();
        for m in 1..IBP_TERMS {
            d_end[m] = g_end * eval(&cur, 1.0);
            d_start[m] = eval(&cur, e0);
            // advance: P_{m+1} = P_m * (-alpha + c E) + alpha_p E dP_m/dE
            let mut next = vec![0.0f64; IBP_TERMS + 1];
            for (j, &pj) in cur.iter().enumerate() {
                next[j] += -profile.alpha * pj + j as f64 * profile.alpha_p * pj;
                if j < IBP_TERMS {
                    next[j + 1] += c * pj;
                }
            }
            cur = next;
        }

        // envelope |U|^2 + |V|^2 = sum_p c_p / kappa^p with
        // c_p = sum_{n+m=p, m-n even} (-1)^{(m-n)/2} (u_n u_m + v_n v_m),
        // u_n = (-1)^{n-1} g^{(n-1)}(L), v_n likewise at z = 0.
        let mut tail_coeff = vec![0.0f64; 2 * IBP_TERMS + 1];
        for n in 1..=IBP_TERMS {
            for m in 1..=IBP_TERMS {
                if (m + n) % 2 != 0 {
                    continue;
                }
                let sign = if ((m as i64 - n as i64) / 2).rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                let u = |d: &[f64; IBP_TERMS], i: usize| {
                    (if (i - 1).is_multiple_of(2) { 1.0 } else { -1.0 }) * d[i - 1]
                };
                tail_coeff[n + m] +=
                    sign * (u(&d_end, n) * u(&d_end, m) + u(&d_start, n) * u(&d_start, m));
            }
        }

        Self {
            d_end,
            d_start,
            span_length: profile.length,
            tail_coeff,
        }
    }

    /// Smooth series parts U, V of A(kappa) = e^{j kappa L} U - V.
    fn uv(&self, kap: f64) -> (Complex64, Complex64) {
        let inv = Complex64::new(0.0, -1.0 / kap); // 1/(j kappa)
        let mut u = Complex64::new(0.0, 0.0);
        let mut v = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for n in 0..IBP_TERMS {
            pw *= inv;
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            u += s * self.d_end[n] * pw;
            v += s * self.d_start[n] * pw;
        }
        (u, v)
    }

    /// Full rho including the oscillatory cross term.
    fn rho(&self, kap: f64) -> f64 {
        let (u, v) = self.uv(kap);
        let phase = Complex64::new(0.0, kap * self.span_length).exp();
        (phase * u - v).norm_sqr()
    }

    /// Oscillation-averaged envelope |U|^2 + |V|^2.
    #[cfg(test)]
    fn rho_mean(&self, kap: f64) -> f64 {
        let (u, v) = self.uv(kap);
        u.norm_sqr() + v.norm_sqr()
    }

    /// Antiderivative of the envelope: int rho_mean dkappa (to a constant).
    fn mean_antiderivative(&self, kap: f64) -> f64 {
        let inv2 = 1.0 / (kap * kap);
        let mut acc = 0.0;
        // sum c_p kappa^{1-p}/(1-p), p even from 2 to 2*IBP_TERMS
        let mut pw = 1.0 / kap; // kappa^{1-p} for p = 2
        for p in (2..=2 * IBP_TERMS).step_by(2) {
            acc += self.tail_coeff[p] * pw / (1.0 - p as f64);
            pw *= inv2;
        }
        acc
    }
}

enum RhoEval {
    /// Closed form.
    Edfa { alpha: f64 },
    /// Complex field integral tabulated below `kappa_asym` (real and
    /// imaginary parts are interpolated separately, so rho = re^2 + im^2
    /// keeps its relative accuracy through the oscillation nulls and is
    /// non-negative by construction); IBP series above.
    Raman {
        table_re: CubicSpline,
        table_im: CubicSpline,
        kappa_asym: f64,
    },
}

/// Prefix-integral table of W_N(kappa) = int_0^kappa rho(u) chi_N(u) du for
/// one chi weight N (N = 1 is the single-span case).
#[derive(Debug, Clone)]
pub struct ChiWeightedPrefix {
    n_spans: usize,
    /// Uniform cell width over the resolved region.
    cell_width: f64,
    /// Prefix sums at cell edges; w[i] = int_0^{i h} rho chi.
    prefix: Vec<f64>,
}

impl ChiWeightedPrefix {
    /// The chi weight this prefix was built for (1 = single span).
    pub fn n_spans(&self) -> usize {
        self.n_spans
    }
}

/// Performance layer over the FWM efficiency factors for one configuration.
///
/// Wraps rho(kappa) (closed form for EDFA, table + asymptotics for Raman)
/// and owns the single-span prefix integrals used by the 2-D NLI integral.
pub struct KappaKernel {
    eval: RhoEval,
    ibp: IbpSeries,
    pub(crate) span_length: f64,
    /// Largest |kappa| reachable by the configured band.
    pub kappa_max: f64,
    /// End of the oscillation-resolved prefix region.
    resolved_end: f64,
    partial_rule: Rule,
    prefix1: ChiWeightedPrefix,
    profile: PowerProfile,
    z_rel_tol: f64,
}

impl KappaKernel {
    /// rho(kappa), m^2; even in kappa.
    pub fn rho(&self, kap: f64) -> f64 {
        let k = kap.abs();
        match &self.eval {
            RhoEval::Edfa { alpha } => rho_edfa(k, *alpha, self.span_length),
            RhoEval::Raman {
                table_re,
                table_im,
                kappa_asym,
            } => {
                if k >= *kappa_asym {
                    self.ibp.rho(k)
                } else {
                    let re = table_re.eval(k);
                    let im = table_im.eval(k);
                    re * re + im * im
                }
            }
        }
    }

    fn mean_antiderivative(&self, kap: f64) -> f64 {
        match &self.eval {
            RhoEval::Edfa { alpha } => {
                let r = (-alpha * self.span_length).exp();
                (1.0 + r * r) / alpha * (kap / alpha).atan()
            }
            RhoEval::Raman { .. } => self.ibp.mean_antiderivative(kap),
        }
    }

    /// Single-span prefix (chi = 1).
    pub(crate) fn prefix1(&self) -> &ChiWeightedPrefix {
        &self.prefix1
    }

    /// Builds the prefix table for a chi_N weight; N = 1 is precomputed.
    pub fn build_prefix(&self, n_spans: usize) -> ChiWeightedPrefix {
        let h = std::f64::consts::PI / (CELLS_PER_PI * n_spans as f64 * self.span_length);
        let n_cells = (self.resolved_end / h).ceil() as usize;
        let rule = &self.partial_rule;
        let cells: Vec<f64> = (0..n_cells)
            .into_par_iter()
            .map(|i| {
                let a = i as f64 * h;
                let b = (i + 1) as f64 * h;
                self.cell_integral(a, b, n_spans, rule)
            })
            .collect();
        let mut prefix = Vec::with_capacity(n_cells + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for c in cells {
            acc += c;
            prefix.push(acc);
        }
        ChiWeightedPrefix {
            n_spans,
            cell_width: h,
            prefix,
        }
    }

    fn cell_integral(&self, a: f64, b: f64, n_spans: usize, rule: &Rule) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let k = mid + half * x;
            let mut v = self.rho(k);
            if n_spans > 1 {
                v *= chi_theta(0.5 * k * self.span_length, n_spans);
            }
            acc += w * v;
        }
        acc * half
    }

    /// Signed W_N(kappa) = int_0^kappa rho chi_N; odd in kappa.
    pub fn w_query(&self, kap: f64, prefix: &ChiWeightedPrefix) -> f64 {
        let sign = if kap < 0.0 { -1.0 } else { 1.0 };
        let k = kap.abs();
        let h = prefix.cell_width;
        let n_cells = prefix.prefix.len() - 1;
        let resolved_end = n_cells as f64 * h;
        let val = if k < resolved_end {
            let i = ((k / h) as usize).min(n_cells - 1);
            prefix.prefix[i] + self.cell_integral(i as f64 * h, k, prefix.n_spans, &self.partial_rule)
        } else {
            prefix.prefix[n_cells]
                + prefix.n_spans as f64
                    * (self.mean_antiderivative(k) - self.mean_antiderivative(resolved_end))
        };
        sign * val
    }

    /// Direct reference rho for this kernel's span (adaptive z-integral for
    /// Raman, closed form for EDFA); used as the tabulation oracle.
    pub fn rho_direct(&self, kap: f64) -> Result<f64> {
        match &self.eval {
            RhoEval::Edfa { alpha } => Ok(rho_edfa(kap, *alpha, self.span_length)),
            RhoEval::Raman { .. } => {
                Ok(raman_field_integral(kap, &self.profile, self.z_rel_tol)?.norm_sqr())
            }
        }
    }
}

/// Builds the kappa kernel for a validated configuration.
///
/// For Raman the small-kappa table is self-checked against direct evaluation
/// at deterministic probe points; failure is a hard error naming the worst
/// probe.
pub fn build_kappa_kernel(cfg: &SystemConfig) -> Result<KappaKernel> {
    cfg.validate()?;
    let fiber = &cfg.fiber;
    let l = cfg.spans.span_length;
    let band = cfg.grid.total_bandwidth();
    let bracket = fiber.beta2.abs()
        + if cfg.include_beta3 {
            std::f64::consts::PI * fiber.beta3.abs() * band
        } else {
            0.0
        };
    let kappa_max = 4.0 * std::f64::consts::PI * std::f64::consts::PI * bracket * band * band;

    let (pump, is_raman) = match cfg.amplifier {
        AmplifierScheme::Edfa { .. } => (0.0, false),
        AmplifierScheme::Raman {
            total_pump_power, ..
        } => (total_pump_power, true),
    };
    let profile = PowerProfile::new(fiber, pump, l);
    let ibp = IbpSeries::new(&profile);

    let mu_scale = fiber
        .alpha
        .max(fiber.alpha_p)
        .max(fiber.c_r * pump);
    let kappa_asym = IBP_SCALE_FACTOR * mu_scale;

    let eval = if is_raman && fiber.c_r > 0.0 {
        let step = TABLE_PHASE_STEP / l;
        let n_pts = ((kappa_asym / step).ceil() as usize).clamp(8, 400_000);
        let kappa_asym = n_pts as f64 * step; // snap so the table ends exactly at the switchover
        let xs: Vec<f64> = (0..=n_pts).map(|i| i as f64 * step).collect();
        let field: Vec<Complex64> = xs
            .par_iter()
            .map(|&k| raman_field_integral(k, &profile, cfg.quad.z_rel_tol))
            .collect::<Result<_>>()?;
        let table_re = CubicSpline::new(xs.clone(), field.iter().map(|a| a.re).collect());
        let table_im = CubicSpline::new(xs, field.iter().map(|a| a.im).collect());
        let rho_interp = |k: f64| {
            let (re, im) = (table_re.eval(k), table_im.eval(k));
            re * re + im * im
        };
        // accuracy check against direct evaluation at pseudo-random probes
        let mut worst = (0.0f64, 0.0f64);
        for i in 0..24u64 {
            let t = quad::uniform01(0x5eed_cafe, i);
            let k = step + t * (kappa_asym - 2.0 * step);
            let direct = raman_field_integral(k, &profile, cfg.quad.z_rel_tol)?.norm_sqr();
            let rel = (rho_interp(k) - direct).abs() / direct.max(1e-300);
            if rel > worst.0 {
                worst = (rel, k);
            }
        }
        // and probe the series side of the switchover
        for i in 0..4u64 {
            let k = kappa_asym * (1.1 + 0.8 * quad::uniform01(0x0fac_e0ff, i));
            let direct = raman_field_integral(k, &profile, cfg.quad.z_rel_tol)?.norm_sqr();
            let series = ibp.rho(k);
            let rel = (series - direct).abs() / direct.max(1e-300);
            if rel > worst.0 {
                worst = (rel, k);
            }
        }
        if worst.0 > TABLE_CHECK_LIMIT {
            return Err(Error::KernelAccuracy {
                kappa: worst.1,
                rel_err: worst.0,
                limit: TABLE_CHECK_LIMIT,
            });
        }
        RhoEval::Raman {
            table_re,
            table_im,
            kappa_asym,
        }
    } else {
        RhoEval::Edfa { alpha: fiber.alpha }
    };

    let resolved_end = (RESOLVED_PHASE / l)
        .max(2.0 * kappa_asym)
        .min(kappa_max * 1.000001);

    let mut kernel = KappaKernel {
        eval,
        ibp,
        span_length: l,
        kappa_max,
        resolved_end,
        partial_rule: quad::gauss_legendre(6),
        prefix1: ChiWeightedPrefix {
            n_spans: 1,
            cell_width: 1.0,
            prefix: vec![0.0],
        },
        profile,
        z_rel_tol: cfg.quad.z_rel_tol,
    };
    kernel.prefix1 = kernel.build_prefix(1);
    Ok(kernel)
}
