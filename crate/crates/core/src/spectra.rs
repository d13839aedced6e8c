//! Ensemble-average weight spectra.
//!
//! A regular low-density ensemble is built from `J` independent strips, each
//! a block-diagonal stack of `M = n/K` disjoint weight-`K` checks. The strip
//! weight enumerator is an exact integer vector (coefficients of
//! `(((1+s)^K + (1-s)^K)/2)^M`); ensemble averaging over the column
//! permutations gives `E{A_w} = C(n,w)^{1-J} G_w^J`, which this module keeps
//! in natural-log form (the counts themselves overflow fixed-width floats
//! long before interesting block lengths).
//!
//! Binary images of nonbinary regular codes compose the symbol-weight strip
//! enumerator with the per-symbol image-weight polynomial
//! `psi(s) = ((1+s)^m - 1)/(q-1)`; scaling by `(q-1)^{KM}` keeps every
//! intermediate coefficient an exact integer.

use crate::logmath::{ln_big, ln_binomial};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("check weight {k} does not divide length {n}")]
    BlockMismatch { k: usize, n: usize },
    #[error("bits per symbol must be at least 1")]
    BadField,
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

// ============================================================================
// Table
// ============================================================================

/// Log-domain average spectrum of an ensemble at block length `n` bits.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumTable {
    pub n: usize,
    /// `ln E{A_w}` for w = 0..=n; exactly -inf where the average count is 0.
    pub log_avg: Vec<f64>,
    /// Exact strip coefficients when they are plain integers (binary
    /// ensembles); `None` for composed nonbinary-image spectra.
    pub exact_strip: Option<Vec<BigUint>>,
}

impl SpectrumTable {
    /// Serializes as an export file: a comment header followed by one
    /// "w ln_E" line per weight (`-inf` for impossible weights).
    #[must_use]
    pub fn to_export_string(&self, j: usize, k: usize, m: usize) -> String {
        let mut out = String::new();
        writeln!(out, "# J={} K={} n={} m={}", j, k, self.n, m).unwrap();
        for (w, v) in self.log_avg.iter().enumerate() {
            writeln!(out, "{w} {v}").unwrap();
        }
        out
    }

    /// Parses the export format: `#` comments ignored, remaining lines must
    /// be "w ln_E" with contiguous weights from 0.
    pub fn parse(text: &str) -> Result<Self, SpectrumError> {
        let mut log_avg = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut it = t.split_whitespace();
            let (w, v) = match (it.next(), it.next(), it.next()) {
                (Some(w), Some(v), None) => (w, v),
                _ => {
                    return Err(SpectrumError::Parse {
                        line,
                        reason: "expected exactly two fields: weight and ln value".into(),
                    })
                }
            };
            let w: usize = w.parse().map_err(|_| SpectrumError::Parse {
                line,
                reason: format!("bad weight '{w}'"),
            })?;
            if w != log_avg.len() {
                return Err(SpectrumError::Parse {
                    line,
                    reason: format!("expected weight {}, found {w}", log_avg.len()),
                });
            }
            let v: f64 = v.parse().map_err(|_| SpectrumError::Parse {
                line,
                reason: format!("bad value '{v}'"),
            })?;
            if v.is_nan() || v == f64::INFINITY {
                return Err(SpectrumError::Parse {
                    line,
                    reason: "ln value must be finite or -inf".into(),
                });
            }
            log_avg.push(v);
        }
        if log_avg.is_empty() {
            return Err(SpectrumError::Parse {
                line: 0,
                reason: "no spectrum lines found".into(),
            });
        }
        Ok(Self {
            n: log_avg.len() - 1,
            log_avg,
            exact_strip: None,
        })
    }
}

// ============================================================================
// Polynomial helpers
// ============================================================================

fn poly_mul(a: &[BigUint], b: &[BigUint]) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn binomials(k: usize) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for i in 0..k {
        let next = row[i].clone() * (k - i) / (i + 1);
        row.push(next);
    }
    row
}

// ============================================================================
// Binary ensemble
// ============================================================================

/// Exact weight enumerator of one strip: `m_blocks` disjoint weight-`k`
/// checks, i.e. the coefficients of `(((1+s)^k + (1-s)^k)/2)^m_blocks`.
/// Index w runs 0..=k*m_blocks.
#[must_use]
pub fn strip_spectrum(k_weight: usize, m_blocks: usize) -> Vec<BigUint> {
    // Single check: even binomial coefficients only.
    let binom = binomials(k_weight);
    let g: Vec<BigUint> = (0..=k_weight)
        .map(|i| {
            if i % 2 == 0 {
                binom[i].clone()
            } else {
                BigUint::zero()
            }
        })
        .collect();
    let mut acc = vec![BigUint::one()];
    for _ in 0..m_blocks {
        acc = poly_mul(&acc, &g);
    }
    acc
}

/// Average spectrum of the `(j_strips, k_weight)`-regular ensemble at block
/// length `n`: `ln E{A_w} = (1-J) ln C(n,w) + J ln G_w`.
pub fn gallager_avg_spectrum(
    j_strips: usize,
    k_weight: usize,
    n: usize,
) -> Result<SpectrumTable, SpectrumError> {
    if k_weight == 0 || !n.is_multiple_of(k_weight) {
        return Err(SpectrumError::BlockMismatch { k: k_weight, n });
    }
    let g = strip_spectrum(k_weight, n / k_weight);
    debug_assert_eq!(g.len(), n + 1);
    let log_avg = (0..=n)
        .map(|w| {
            if g[w].is_zero() {
                f64::NEG_INFINITY
            } else {
                let lnc = ln_binomial(n as u64, w as u64).expect("w <= n");
                (1.0 - j_strips as f64) * lnc + j_strips as f64 * ln_big(&g[w])
            }
        })
        .collect();
    Ok(SpectrumTable {
        n,
        log_avg,
        exact_strip: Some(g),
    })
}

/// Average spectrum of a random linear code with `r` independent uniform
/// checks: every nonzero word survives with probability `2^-r`.
#[must_use]
pub fn random_linear_spectrum(n: usize, r: usize) -> SpectrumTable {
    let log_avg = (0..=n)
        .map(|w| {
            if w == 0 {
                0.0
            } else {
                ln_binomial(n as u64, w as u64).expect("w <= n") - r as f64 * std::f64::consts::LN_2
            }
        })
        .collect();
    SpectrumTable {
        n,
        log_avg,
        exact_strip: None,
    }
}

// ============================================================================
// Nonbinary binary images
// ============================================================================

/// Strip enumerator of the binary image, scaled by `(q-1)^{k*m_blocks}` so
/// all coefficients are exact integers: coefficient of `s^w` in
/// `(q-1)^{KM} * F(psi(s))` where `F = f^M` is the symbol-weight strip
/// enumerator and `psi(s) = ((1+s)^m - 1)/(q-1)`.
pub fn nb_strip_scaled_spectrum(
    k_weight: usize,
    m_blocks: usize,
    m_bits: usize,
) -> Result<Vec<BigUint>, SpectrumError> {
    if m_bits < 1 {
        return Err(SpectrumError::BadField);
    }
    let q = 1usize << m_bits;
    let qm1 = BigUint::from(q - 1);

    // Symbol-weight enumerator of one check:
    // f_i = C(K,i) * ((q-1)^i + (-1)^i (q-1)) / q, exact integers.
    let binom = binomials(k_weight);
    let f: Vec<BigUint> = (0..=k_weight)
        .map(|i| {
            let pw = qm1.pow(i as u32);
            let num = if i % 2 == 0 { pw + &qm1 } else { pw - &qm1 };
            binom[i].clone() * num / q
        })
        .collect();
    let mut big_f = vec![BigUint::one()];
    for _ in 0..m_blocks {
        big_f = poly_mul(&big_f, &f);
    }

    // Compose with psi: sum_v F_v (q-1)^{W-v} ((1+s)^m - 1)^v.
    let w_cap = k_weight * m_blocks;
    let base: Vec<BigUint> = {
        let mut b = binomials(m_bits);
        b[0] = BigUint::zero(); // (1+s)^m - 1
        b
    };
    let mut out = vec![BigUint::zero(); w_cap * m_bits + 1];
    let mut psi_pow = vec![BigUint::one()];
    for v in 0..=w_cap {
        if !big_f[v].is_zero() {
            let scale = big_f[v].clone() * qm1.pow((w_cap - v) as u32);
            for (d, c) in psi_pow.iter().enumerate() {
                if !c.is_zero() {
                    out[d] += &scale * c;
                }
            }
        }
        if v < w_cap {
            psi_pow = poly_mul(&psi_pow, &base);
        }
    }
    Ok(out)
}

/// Average binary-image spectrum of the `(j_strips, k_weight)`-regular
/// ensemble over GF(2^m_bits) with `n_symbols` symbols per block; the
/// resulting bit length is `n_symbols * m_bits`.
pub fn nb_image_avg_spectrum(
    j_strips: usize,
    k_weight: usize,
    n_symbols: usize,
    m_bits: usize,
) -> Result<SpectrumTable, SpectrumError> {
    if m_bits < 1 {
        return Err(SpectrumError::BadField);
    }
    if k_weight == 0 || !n_symbols.is_multiple_of(k_weight) {
        return Err(SpectrumError::BlockMismatch {
            k: k_weight,
            n: n_symbols,
        });
    }
    let m_blocks = n_symbols / k_weight;
    let scaled = nb_strip_scaled_spectrum(k_weight, m_blocks, m_bits)?;
    let w_cap = k_weight * m_blocks;
    let ln_scale = w_cap as f64 * ((1usize << m_bits) as f64 - 1.0).ln();
    let n_bits = n_symbols * m_bits;
    debug_assert_eq!(scaled.len(), n_bits + 1);
    let log_avg = (0..=n_bits)
        .map(|w| {
            if scaled[w].is_zero() {
                f64::NEG_INFINITY
            } else {
                let lnc = ln_binomial(n_bits as u64, w as u64).expect("w <= n");
                let ln_g = ln_big(&scaled[w]) - ln_scale;
                (1.0 - j_strips as f64) * lnc + j_strips as f64 * ln_g
            }
        })
        .collect();
    Ok(SpectrumTable {
        n: n_bits,
        log_avg,
        exact_strip: None,
    })
}

// ============================================================================
// Tests
// ============================================================================
