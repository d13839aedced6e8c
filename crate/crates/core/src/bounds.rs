//! Analytic benchmarks for maximum-likelihood decoding over the
//! binary-input AWGN channel, plus the list-size analysis for erasure
//! decoding.
//!
//! Three families live here:
//!
//! - a sphere-packing *lower* bound on frame error rate, evaluated through
//!   the cone half-angle `theta0` (no code structure enters beyond `(n, R)`);
//! - the tangential-sphere *upper* bound driven by a weight spectrum, built
//!   around the cone radius `r0` and conditional chi-squared tail masses;
//! - closed-form list-size results for erasure decoding: the average list
//!   bound, the asymptotic exponent `phi`, and its largest zero.
//!
//! Everything that multiplies huge against tiny (binomials to the n-th
//! power, Gaussian densities across dozens of sigmas) is assembled as sums
//! of logs with one final exponentiation, so lengths in the hundreds stay
//! well inside f64 range.

use crate::logmath::{
    ln_chi2_cdf, ln_chi2_sf, ln_integrate_gl32, ln_q_func, log_add_exp, log_sub_exp,
};
use crate::spectra::SpectrumTable;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

/// Failure modes of the bound evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    /// A bisection bracket never saw a sign change.
    #[error("no root inside the search bracket")]
    NoRoot,
    /// The spectrum carries too little mass to pin a finite cone radius.
    #[error("spectrum too thin to determine a cone radius")]
    DegenerateSpectrum,
    /// Refining the quadrature kept moving the answer.
    #[error("quadrature failed to converge (relative change {rel_change:e})")]
    QuadratureDiverged { rel_change: f64 },
    /// Inputs outside the region where the closed form means anything.
    #[error("parameters outside the approximation's validity region")]
    OutOfDomain,
}

// ============================================================================
// Powers of sine: ln of the partial integral
// ============================================================================

/// ln of the full integral `int_0^pi sin^m(t) dt = sqrt(pi) G((m+1)/2) / G(m/2 + 1)`.
#[must_use]
fn ln_full_sin_integral(m: u64) -> f64 {
    let m = m as f64;
    0.5 * std::f64::consts::PI.ln() + ln_gamma((m + 1.0) / 2.0) - ln_gamma(m / 2.0 + 1.0)
}

/// ln of `int_0^theta sin^m(t) dt` for `0 <= theta <= pi`.
///
/// The integrand is concentrated just left of `theta` (for `theta <= pi/2`),
/// so the panel widths start at the local decay length of `sin^m` and grow
/// geometrically toward zero, each panel handled by a 32-node rule in log
/// domain. `refine` halves the starting width that many times; the default
/// callers use refine 0 and check self-consistency one level up.
#[must_use]
pub fn ln_int_sin_pow(m: u64, theta: f64, refine: u32) -> f64 {
    assert!(m >= 1, "exponent must be positive");
    assert!(
        (0.0..=std::f64::consts::PI + 1e-12).contains(&theta),
        "angle must lie in [0, pi]"
    );
    if theta <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let half = std::f64::consts::FRAC_PI_2;
    if theta > half {
        // Symmetry about pi/2: int_0^theta = int_0^pi - int_0^{pi - theta}.
        let full = ln_full_sin_integral(m);
        let rest = std::f64::consts::PI - theta;
        if rest <= 0.0 {
            return full;
        }
        return log_sub_exp(full, ln_int_sin_pow(m, rest, refine));
    }

    // Local decay length of sin^m at the right endpoint: the smaller of the
    // curvature scale sin(theta)/sqrt(m) and the slope scale tan(theta)/m.
    let mf = m as f64;
    let mut ell = (theta / 2.0).min(theta.sin() / mf.sqrt());
    if theta.cos() > 0.0 {
        ell = ell.min(theta.sin() / (mf * theta.cos()));
    }
    ell /= f64::powi(2.0, refine as i32);

    let ln_f = |t: f64| mf * t.sin().ln();
    let mut total = f64::NEG_INFINITY;
    let mut hi = theta;
    let mut width = ell;
    while hi > 0.0 {
        let lo = (hi - width).max(0.0);
        total = log_add_exp(total, ln_integrate_gl32(lo, hi, ln_f));
        hi = lo;
        // Remaining mass is below hi * sin(hi)^m; once that is negligible
        // relative to what we already hold, stop.
        if hi > 0.0 && hi.ln() + mf * hi.sin().ln() < total - 46.0 {
            break;
        }
        width *= 2.0;
    }
    total
}

// ============================================================================
// Sphere-packing lower bound
// ============================================================================

/// Cone half-angle together with the auxiliary constant of the closed form.
#[derive(Debug, Clone)]
pub struct ShannonEval {
    pub n: usize,
    pub rate: f64,
    pub sigma: f64,
    /// Half-angle of the cone claiming a `2^{-nR}` fraction of solid angle.
    pub theta0: f64,
    /// `(cos t0 + sqrt(cos^2 t0 + 4 s^2)) / (2 s)`.
    pub g: f64,
}

/// Solves `ratio(theta) = 2^{-n R}` for the cone half-angle, where `ratio`
/// is the fraction of the sphere's solid angle inside a cone of half-angle
/// `theta`: `int_0^theta sin^{n-2} / int_0^pi sin^{n-2}`.
///
/// Bisection in log domain until the ratio matches to `1e-10` relative.
pub fn solve_theta0(n: usize, rate: f64) -> Result<f64, BoundsError> {
    assert!(n >= 2, "length must be at least 2");
    assert!(rate >= 0.0, "rate must be nonnegative");
    let ln_target = -(n as f64) * rate * std::f64::consts::LN_2;
    if ln_target == 0.0 {
        // The whole space: ratio 1.
        return Ok(std::f64::consts::PI);
    }
    let m = (n - 2).max(1) as u64;
    let ln_full = ln_full_sin_integral(m);
    let ln_ratio = |theta: f64| ln_int_sin_pow(m, theta, 0) - ln_full;

    let mut lo = 1e-12;
    let mut hi = std::f64::consts::PI;
    if ln_ratio(lo) > ln_target {
        return Err(BoundsError::NoRoot);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = ln_ratio(mid);
        if (v - ln_target).abs() <= 1e-11 {
            return Ok(mid);
        }
        if v < ln_target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < f64::EPSILON * hi {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    if (ln_ratio(mid) - ln_target).abs() <= 1e-9 {
        Ok(mid)
    } else {
        Err(BoundsError::NoRoot)
    }
}

impl ShannonEval {
    /// Solves for the cone half-angle and assembles the auxiliary constant.
    pub fn new(n: usize, rate: f64, sigma: f64) -> Result<Self, BoundsError> {
        assert!(sigma > 0.0, "noise level must be positive");
        let theta0 = solve_theta0(n, rate)?;
        let c = theta0.cos();
        let g = (c + (c * c + 4.0 * sigma * sigma).sqrt()) / (2.0 * sigma);
        debug_assert!(g > 0.0 && theta0 > 0.0 && theta0 <= std::f64::consts::PI);
        Ok(Self {
            n,
            rate,
            sigma,
            theta0,
            g,
        })
    }

    /// ln of the sphere-packing frame-error-rate estimate.
    ///
    /// The closed form is only claimed accurate where the resulting error
    /// rate is below 0.1; outside that region the value is reported as-is,
    /// and parameter combinations that break its sign assumptions yield
    /// `OutOfDomain`.
    pub fn ln_fer(&self) -> Result<f64, BoundsError> {
        let n = self.n as f64;
        let (s, t, g) = (self.sigma, self.theta0, self.g);
        let denom = g * t.sin() * t.sin() / s - t.cos();
        if denom <= 0.0 || t.sin() <= 0.0 {
            return Err(BoundsError::OutOfDomain);
        }
        let per_symbol = g.ln() + t.sin().ln() - 1.0 / (2.0 * s * s) + g * t.cos() / (2.0 * s);
        Ok(
            -0.5 * (n * std::f64::consts::PI).ln() - 0.5 * (1.0 + g * g).ln() - t.sin().ln()
                + n * per_symbol
                - denom.ln(),
        )
    }

    /// The estimate itself (may exceed 1 far outside the validity region).
    pub fn fer(&self) -> Result<f64, BoundsError> {
        Ok(self.ln_fer()?.exp())
    }
}

/// Sphere-packing lower bound on ML frame error rate at blocklength `n`,
/// rate `rate`, and noise level `sigma`.
pub fn shannon_lower(n: usize, rate: f64, sigma: f64) -> Result<f64, BoundsError> {
    ShannonEval::new(n, rate, sigma)?.fer()
}

/// Noise standard deviation for a BPSK-normalized channel at the given
/// information SNR in dB: `sigma^2 = 1 / (2 R 10^{dB/10})`.
#[must_use]
pub fn sigma_from_ebn0_db(rate: f64, ebn0_db: f64) -> f64 {
    assert!(rate > 0.0, "rate must be positive");
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

// ============================================================================
// Tangential-sphere upper bound
// ============================================================================

/// Quadrature controls for the tangential-sphere bound.
///
/// `base_refine` halves all panel widths that many times before the first
/// evaluation; the evaluator then keeps refining until two consecutive
/// levels agree to `rel_tol` (or gives up at `max_refine`).
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub base_refine: u32,
    pub max_refine: u32,
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            base_refine: 0,
            max_refine: 5,
            rel_tol: 1e-6,
        }
    }
}

/// Finds the cone radius: the root in `r` of
///
/// `sum_{w : mu_w(r) < 1} S_w int_0^{arccos mu_w(r)} sin^{n-3} = int_0^pi sin^{n-3}`
///
/// with `mu_w(r) = sqrt(w / (1 - w/n)) / r`. Only weights strictly inside
/// `(0, n)` participate; each term activates once `r` passes its weight's
/// radius and then grows, so the left side is nondecreasing and bisection
/// is safe. The right side equals the full sine integral, so a root exists
/// only when the spectrum carries enough mass (the left side's supremum is
/// half the total spectrum mass times the right side).
pub fn solve_r0(n: usize, spectrum: &SpectrumTable) -> Result<f64, BoundsError> {
    solve_r0_refined(n, spectrum, 0)
}

fn solve_r0_refined(n: usize, spectrum: &SpectrumTable, refine: u32) -> Result<f64, BoundsError> {
    assert!(n >= 4, "length too short for the cone geometry");
    assert_eq!(n, spectrum.n, "spectrum length mismatch");
    let m = (n - 3) as u64;
    let ln_rhs = ln_full_sin_integral(m);

    // (weight radius, ln S_w), ascending radius.
    let terms: Vec<(f64, f64)> = (1..n)
        .filter(|&w| spectrum.log_avg[w] > f64::NEG_INFINITY)
        .map(|w| {
            let wf = w as f64;
            ((wf / (1.0 - wf / n as f64)).sqrt(), spectrum.log_avg[w])
        })
        .collect();
    if terms.is_empty() {
        return Err(BoundsError::DegenerateSpectrum);
    }

    let ln_lhs = |r: f64| -> f64 {
        let mut acc = f64::NEG_INFINITY;
        for &(radius, ln_s) in &terms {
            let mu = radius / r;
            if mu < 1.0 {
                acc = log_add_exp(acc, ln_s + ln_int_sin_pow(m, mu.acos(), refine));
            }
        }
        acc
    };

    // Bracket: below the smallest weight radius the left side is empty;
    // double upward until it clears the right side.
    let mut lo = terms.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
    let mut hi = lo * 2.0;
    let mut doublings = 0;
    while ln_lhs(hi) < ln_rhs {
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(BoundsError::DegenerateSpectrum);
        }
    }
    debug_assert!(ln_lhs(lo) <= ln_lhs(hi), "left side must be nondecreasing");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = ln_lhs(mid);
        if (v - ln_rhs).abs() <= 1e-9 {
            return Ok(mid);
        }
        if v < ln_rhs {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Tangential-sphere bound evaluator with the cone radius precomputed.
///
/// The radius `r0` does not depend on the noise level, so one evaluator can
/// serve a whole SNR sweep of the same spectrum. When the spectrum is too
/// thin for the radius equation to have a root, `r0` is `+inf`: the cone
/// opens into a half-space, the radial residual term vanishes, and the
/// bound degenerates toward the plain tail `Q(sqrt(n)/sigma)` plus the
/// surviving weight terms.
#[derive(Debug, Clone)]
pub struct TsbEval<'a> {
    pub spectrum: &'a SpectrumTable,
    pub r0: f64,
    /// Largest weight inside the cone: `floor(r0^2 n / (r0^2 + n))`.
    pub w0: usize,
}

impl<'a> TsbEval<'a> {
    /// Solves for the cone radius; an unsolvable radius equation is mapped
    /// to the infinite-radius degenerate form rather than an error.
    #[must_use]
    pub fn new(spectrum: &'a SpectrumTable) -> Self {
        match solve_r0(spectrum.n, spectrum) {
            Ok(r0) => Self::with_r0(spectrum, r0),
            Err(_) => Self::with_r0(spectrum, f64::INFINITY),
        }
    }

    /// Wraps a spectrum with an externally obtained radius.
    #[must_use]
    pub fn with_r0(spectrum: &'a SpectrumTable, r0: f64) -> Self {
        let n = spectrum.n as f64;
        let w0 = if r0.is_finite() {
            (r0 * r0 * n / (r0 * r0 + n)).floor() as usize
        } else {
            spectrum.n
        };
        Self { spectrum, r0, w0 }
    }

    /// ln of the bound at noise level `sigma`, refining the quadrature until
    /// two consecutive levels agree.
    pub fn ln_fer(&self, sigma: f64, cfg: &QuadratureConfig) -> Result<f64, BoundsError> {
        assert!(sigma > 0.0, "noise level must be positive");
        let mut prev = self.ln_fer_at(sigma, cfg.base_refine);
        let mut rel_change = f64::INFINITY;
        for refine in cfg.base_refine + 1..=cfg.max_refine {
            let cur = self.ln_fer_at(sigma, refine);
            rel_change = (cur - prev).abs();
            if rel_change <= cfg.rel_tol {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(BoundsError::QuadratureDiverged { rel_change })
    }

    /// The bound itself, clamped to 1 (it is a probability bound; the raw
    /// integral may exceed 1 deep in the waterfall region).
    pub fn fer(&self, sigma: f64, cfg: &QuadratureConfig) -> Result<f64, BoundsError> {
        Ok(self.ln_fer(sigma, cfg)?.exp().min(1.0))
    }

    /// Single-resolution evaluation of the bound's log.
    fn ln_fer_at(&self, sigma: f64, refine: u32) -> f64 {
        let n = self.spectrum.n;
        let nf = n as f64;
        let sqrt_n = nf.sqrt();
        let ln_phi_norm = -(sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();

        // Active weights: inside the cone and present in the spectrum,
        // ascending, with the suffix maximum of ln S for safe pruning.
        let active: Vec<(f64, f64)> = (1..=self.w0.min(n - 1))
            .filter(|&w| self.spectrum.log_avg[w] > f64::NEG_INFINITY)
            .map(|w| {
                let wf = w as f64;
                ((wf / (1.0 - wf / nf)).sqrt(), self.spectrum.log_avg[w])
            })
            .collect();
        let mut suffix_max = vec![f64::NEG_INFINITY; active.len() + 1];
        for i in (0..active.len()).rev() {
            suffix_max[i] = suffix_max[i + 1].max(active[i].1);
        }

        // ln of the conditional error mass at axial offset x: chi-squared
        // residual outside the cone's sphere plus one tangential term per
        // active weight, capped at 1 (ln <= 0) by the caller.
        let ln_raw = |x: f64| -> f64 {
            let scale = 1.0 - x / sqrt_n;
            let rx = self.r0 * scale;
            let mut acc = if rx.is_finite() {
                ln_chi2_sf(rx * rx / (sigma * sigma), (n - 1) as u64)
            } else {
                f64::NEG_INFINITY
            };
            for (i, &(radius, ln_s)) in active.iter().enumerate() {
                let beta = scale * radius;
                if beta >= rx {
                    continue;
                }
                // Theta_w <= Q(beta/sigma); prune terms that cannot matter.
                let cutoff = acc - 46.0;
                if suffix_max[i] + ln_q_func(beta / sigma) < cutoff {
                    break;
                }
                if ln_s + ln_q_func(beta / sigma) < cutoff {
                    continue;
                }
                acc = log_add_exp(acc, ln_s + self.ln_theta(beta, rx, sigma, refine));
            }
            acc
        };

        // Outer integral over the axial noise component, panels fanning out
        // from the origin where the Gaussian weight is largest.
        let h0 = sigma / f64::powi(2.0, 1 + refine as i32);
        let cap = 2.0 * sigma / f64::powi(2.0, refine as i32);
        let ln_node =
            |x: f64| -> f64 { ln_phi_norm - x * x / (2.0 * sigma * sigma) + ln_raw(x).min(0.0) };

        let mut total = f64::NEG_INFINITY;
        // Rightward to the sphere's edge at sqrt(n).
        let mut lo = 0.0;
        let mut width = h0;
        let mut quiet = 0;
        while lo < sqrt_n && quiet < 3 {
            let hi = (lo + width).min(sqrt_n);
            let part = ln_integrate_gl32(lo, hi, ln_node);
            total = log_add_exp(total, part);
            quiet = if part < total - 46.0 { quiet + 1 } else { 0 };
            lo = hi;
            width = (width * 2.0).min(cap);
        }
        if quiet >= 3 && lo < sqrt_n {
            // The remainder integrates a clipped integrand (<= the Gaussian
            // density), so it is bounded by the Gaussian tail mass.
            total = log_add_exp(total, ln_q_func(lo / sigma));
        }
        // Leftward into the tail; both factors fall, so stop once panels
        // stay negligible.
        let mut hi = 0.0;
        let mut width = h0;
        let mut quiet = 0;
        while hi > -50.0 * sigma && quiet < 3 {
            let lo = hi - width;
            let part = ln_integrate_gl32(lo, hi, ln_node);
            total = log_add_exp(total, part);
            quiet = if part < total - 46.0 { quiet + 1 } else { 0 };
            hi = lo;
            width = (width * 2.0).min(cap);
        }
        // Mass beyond the sphere's edge.
        log_add_exp(total, ln_q_func(sqrt_n / sigma))
    }

    /// ln of `int_beta^rx phi_sigma(y) C_{n-2}((rx^2 - y^2)/sigma^2) dy`
    /// where `C` is the chi-squared CDF: the tangential error mass for one
    /// weight class at one axial offset.
    fn ln_theta(&self, beta: f64, rx: f64, sigma: f64, refine: u32) -> f64 {
        let n = self.spectrum.n;
        let ln_phi_norm = -(sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
        let ln_f = |y: f64| -> f64 {
            let arg = (rx * rx - y * y) / (sigma * sigma);
            if arg <= 0.0 {
                return f64::NEG_INFINITY;
            }
            ln_phi_norm - y * y / (2.0 * sigma * sigma) + ln_chi2_cdf(arg, (n - 2) as u64)
        };
        // Both factors decay as y grows past beta; the Gaussian alone drops
        // below relative 1e-21 within sqrt(beta^2 + 96 sigma^2).
        let y_max = (beta * beta + 96.0 * sigma * sigma).sqrt().min(rx);
        if y_max <= beta {
            return f64::NEG_INFINITY;
        }
        let mut total = f64::NEG_INFINITY;
        let mut lo = beta;
        let mut width = ((sigma / 2.0).min(y_max - beta)) / f64::powi(2.0, refine as i32);
        let cap = 2.0 * sigma / f64::powi(2.0, refine as i32);
        while lo < y_max {
            let hi = (lo + width).min(y_max);
            let part = ln_integrate_gl32(lo, hi, ln_f);
            total = log_add_exp(total, part);
            if part < total - 46.0 {
                break;
            }
            lo = hi;
            width = (width * 2.0).min(cap);
        }
        total
    }
}

/// Tangential-sphere upper bound on ML frame error rate for a code (or
/// ensemble average) with the given weight spectrum, at noise level `sigma`,
/// with default quadrature controls.
pub fn tsb_upper(spectrum: &SpectrumTable, sigma: f64) -> Result<f64, BoundsError> {
    TsbEval::new(spectrum).fer(sigma, &QuadratureConfig::default())
}

// ============================================================================
// List-size analysis for erasure decoding
// ============================================================================

/// Asymptotic exponent of the expected list size when a fraction
/// `alpha = nu/r` of the redundancy is erased:
/// `phi = alpha - 1 + log2(1 + (1 - alpha J / K)^K)`.
#[must_use]
pub fn list_exponent(alpha: f64, j: usize, k: usize) -> f64 {
    let ratio = k as f64 / j as f64;
    assert!(
        (-1e-12..=ratio + 1e-12).contains(&alpha),
        "alpha must lie in [0, K/J]"
    );
    let base = (1.0 - alpha / ratio).max(0.0);
    alpha - 1.0 + (1.0 + base.powi(k as i32)).log2()
}

/// Largest zero of the list exponent in `(0, 1]`.
///
/// `phi(1) > 0` and the exponent dips negative immediately right of its
/// root at zero, so scanning down from 1 in steps of 0.01 finds a negative
/// value; bisection inside that step pins the crossing to 1e-5.
#[must_use]
pub fn critical_alpha(j: usize, k: usize) -> f64 {
    assert!(j >= 2, "column weight must be at least 2");
    assert!(k > j, "row weight must exceed column weight");
    let mut hi = 1.0f64;
    let mut lo = hi;
    loop {
        lo = (lo - 0.01).max(0.0);
        let v = list_exponent(lo, j, k);
        if v < 0.0 {
            break;
        }
        if v == 0.0 {
            return lo;
        }
        hi = lo;
        assert!(lo > 0.0, "exponent never went negative");
    }
    while hi - lo > 1e-5 {
        let mid = 0.5 * (lo + hi);
        if list_exponent(mid, j, k) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ensemble-average bound on the erasure-decoding list size with `nu`
/// erasures: `2^{nu - r} (1 + (1 - nu/n)^K)^r`.
#[must_use]
pub fn avg_list_bound(nu: usize, n: usize, r: usize, k_weight: usize) -> f64 {
    assert!(nu <= n, "cannot erase more positions than exist");
    let base = (1.0 - nu as f64 / n as f64).max(0.0);
    let ln_bound = (nu as f64 - r as f64) * std::f64::consts::LN_2
        + r as f64 * base.powi(k_weight as i32).ln_1p();
    ln_bound.exp()
}

// ============================================================================
// Tests
// ============================================================================
