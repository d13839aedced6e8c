//! Log-domain numerics shared by the spectrum and bound computations.
//!
//! Weight spectra and error bounds routinely mix terms like `e^{+400}` with
//! terms like `e^{-700}`, so everything here works with natural logarithms
//! of nonnegative quantities and only exponentiates at well-scaled points.
//! `f64::NEG_INFINITY` represents log(0) throughout.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use statrs::function::gamma::{gamma_lr, ln_gamma};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MathError {
    #[error("binomial coefficient undefined for k > n (k = {k}, n = {n})")]
    BinomialDomain { n: u64, k: u64 },
}

// ============================================================================
// Elementary log-domain helpers
// ============================================================================

/// log(e^a + e^b) without overflow; handles -inf on either side.
#[must_use]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// log(e^a - e^b) for a >= b; returns -inf when a == b.
#[must_use]
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    assert!(a >= b, "log_sub_exp requires a >= b (a = {a}, b = {b})");
    if b == f64::NEG_INFINITY {
        return a;
    }
    if a == b {
        return f64::NEG_INFINITY;
    }
    a + (-(b - a).exp()).ln_1p()
}

/// log sum of exponentials over a slice; empty input gives -inf.
#[must_use]
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let s: f64 = values.iter().map(|&v| (v - m).exp()).sum();
    m + s.ln()
}

/// Natural log of a nonnegative big integer; log(0) = -inf. Accurate to one
/// unit in the last place of the 64-bit mantissa extracted from the top of
/// the number.
#[must_use]
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (x.to_u64().expect("fits in u64") as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("top word fits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// ln C(n, k). Errors when k > n. Exact zero at the k = 0 and k = n edges.
pub fn ln_binomial(n: u64, k: u64) -> Result<f64, MathError> {
    if k > n {
        return Err(MathError::BinomialDomain { n, k });
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    Ok(ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
}

/// Gaussian tail function Q(x) = P(N(0,1) > x), evaluated through the
/// regularized upper incomplete gamma function for full f64 accuracy.
#[must_use]
pub fn q_func(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - q_func(-x);
    }
    ln_q_func(x).exp()
}

/// ln Q(x) for x >= 0; usable far into the tail where Q underflows.
#[must_use]
pub fn ln_q_func(x: f64) -> f64 {
    assert!(x >= 0.0, "ln_q_func requires x >= 0");
    if x == 0.0 {
        return -std::f64::consts::LN_2;
    }
    ln_gamma_ur(0.5, 0.5 * x * x) - std::f64::consts::LN_2
}

// ============================================================================
// Regularized incomplete gamma in log domain
// ============================================================================

/// ln P(a, x) where P is the regularized lower incomplete gamma function.
/// Stays accurate deep in the left tail where P underflows f64.
#[must_use]
pub fn ln_gamma_lr(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "ln_gamma_lr domain: a > 0, x >= 0");
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    if x < a + 1.0 {
        // Series: P = x^a e^-x / Gamma(a+1) * (1 + x/(a+1) + x^2/((a+1)(a+2)) + ...)
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut k = 0.0f64;
        while term > sum * 1e-17 {
            k += 1.0;
            term *= x / (a + k);
            sum += term;
        }
        a * x.ln() - x - ln_gamma(a + 1.0) + sum.ln()
    } else {
        // Q < ~0.5 here, so 1 - Q loses no significant precision.
        (-ln_gamma_ur(a, x).exp()).ln_1p()
    }
}

/// ln Q(a, x) where Q is the regularized upper incomplete gamma function.
/// Stays accurate deep in the right tail.
#[must_use]
pub fn ln_gamma_ur(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0, "ln_gamma_ur domain: a > 0, x >= 0");
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        // P is moderate here; evaluate it linearly and subtract.
        (-gamma_lr(a, x)).ln_1p()
    } else {
        // Continued fraction (modified Lentz): Q = e^{a ln x - x - lnG(a)} * h.
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 3e-16 {
                break;
            }
        }
        a * x.ln() - x - ln_gamma(a) + h.ln()
    }
}

/// Chi-squared CDF with `k` degrees of freedom, evaluated via the
/// regularized incomplete gamma function.
#[must_use]
pub fn chi2_cdf(x: f64, k: u64) -> f64 {
    ln_chi2_cdf(x, k).exp()
}

/// ln of the chi-squared CDF with `k` degrees of freedom.
#[must_use]
pub fn ln_chi2_cdf(x: f64, k: u64) -> f64 {
    assert!(k >= 1 && x >= 0.0, "chi-squared domain: k >= 1, x >= 0");
    ln_gamma_lr(k as f64 / 2.0, x / 2.0)
}

/// ln of the chi-squared survival function (upper tail) with `k` degrees of
/// freedom.
#[must_use]
pub fn ln_chi2_sf(x: f64, k: u64) -> f64 {
    assert!(k >= 1 && x >= 0.0, "chi-squared domain: k >= 1, x >= 0");
    ln_gamma_ur(k as f64 / 2.0, x / 2.0)
}

// ============================================================================
// Gauss-Legendre panel integration of log-domain integrands
// ============================================================================

const GL32_NODES: [f64; 32] = [
    -0.9972638618494815635,
    -0.9856115115452683354,
    -0.9647622555875064308,
    -0.9349060759377396892,
    -0.896321155766052124,
    -0.8493676137325699701,
    -0.794483795967942407,
    -0.7321821187402896804,
    -0.663044266930215201,
    -0.587715757240762329,
    -0.50689990893222939,
    -0.4213512761306353454,
    -0.3318686022821276498,
    -0.2392873622521370745,
    -0.1444719615827964935,
    -0.04830766568773831623,
    0.04830766568773831623,
    0.1444719615827964935,
    0.2392873622521370745,
    0.3318686022821276498,
    0.4213512761306353454,
    0.50689990893222939,
    0.587715757240762329,
    0.663044266930215201,
    0.7321821187402896804,
    0.794483795967942407,
    0.8493676137325699701,
    0.896321155766052124,
    0.9349060759377396892,
    0.9647622555875064308,
    0.9856115115452683354,
    0.9972638618494815635,
];

const GL32_WEIGHTS: [f64; 32] = [
    0.0070186100094700966,
    0.01627439473090567061,
    0.02539206530926205946,
    0.0342738629130214331,
    0.04283589802222668066,
    0.0509980592623761762,
    0.05868409347853554715,
    0.06582222277636184684,
    0.07234579410884850623,
    0.07819389578707030647,
    0.08331192422694675522,
    0.08765209300440381114,
    0.09117387869576388471,
    0.09384439908080456564,
    0.09563872007927485942,
    0.09654008851472780057,
    0.09654008851472780057,
    0.09563872007927485942,
    0.09384439908080456564,
    0.09117387869576388471,
    0.08765209300440381114,
    0.08331192422694675522,
    0.07819389578707030647,
    0.07234579410884850623,
    0.06582222277636184684,
    0.05868409347853554715,
    0.0509980592623761762,
    0.04283589802222668066,
    0.0342738629130214331,
    0.02539206530926205946,
    0.01627439473090567061,
    0.0070186100094700966,
];

/// log of the integral of `e^{ln_f(x)}` over `[a, b]` using a 32-node
/// Gauss-Legendre rule on that single panel. The log-sum-exp accumulation
/// keeps the result meaningful even when the integrand underflows f64.
#[must_use]
pub fn ln_integrate_gl32(a: f64, b: f64, mut ln_f: impl FnMut(f64) -> f64) -> f64 {
    assert!(b >= a, "integration bounds out of order");
    if a == b {
        return f64::NEG_INFINITY;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut vals = [f64::NEG_INFINITY; 32];
    for (i, (&x, &w)) in GL32_NODES.iter().zip(&GL32_WEIGHTS).enumerate() {
        vals[i] = ln_f(mid + half * x) + w.ln();
    }
    log_sum_exp(&vals) + half.ln()
}

// ============================================================================
// Tests
// ============================================================================
