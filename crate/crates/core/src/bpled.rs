//! Combined BP / list-erasure decoding for the AWGN channel.
//!
//! Belief propagation handles the easy instances. When it fails to reach a
//! codeword, the least-reliable positions are erased and handed to the list
//! erasure decoder: a fixed block of `l1` erasures plus, for each of a small
//! set of masks, `l2` more spread over the next `2*l2` least-reliable
//! positions. Every consistent erasure run contributes up to `j_max`
//! candidate codewords (free positions seeded from channel hard decisions,
//! then flipped in ascending-weight order); the candidate closest to the
//! channel vector in Euclidean distance wins.
//!
//! Masks are weight-`l2` codewords of the first-order Reed-Muller code of
//! length `2*l2` when `l2` is a power of two — complementary, well-spread
//! patterns — and seeded random weight-`l2` vectors otherwise.

use crate::bpdec::{channel_llrs, BpDecoder, BpResult, LLR_CLIP};
use crate::codes::ParityCheck;
use crate::gf2::BitVec;
use crate::led::{led_decode, PartialWord};
use crate::logmath::ln_binomial;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use thiserror::Error;

/// Free-position budget above which a mask's candidate enumeration is
/// abandoned (2^30 completions would dwarf any j_max in use).
pub const MAX_FREE_POSITIONS: usize = 30;

#[derive(Debug, Error, PartialEq)]
pub enum BpLedError {
    #[error("erasure budget nu={nu} is smaller than the mask block l2={l2}")]
    ErasureBudget { nu: usize, l2: usize },
    #[error("l1={l1} plus a 2*l2={window} mask window exceeds block length {n}")]
    WindowTooLarge { l1: usize, window: usize, n: usize },
    #[error("only {available} distinct masks exist, {requested} requested")]
    MaskExhausted { requested: usize, available: usize },
    #[error("invalid parameter: {0}")]
    BadParam(&'static str),
}

// ============================================================================
// Parameters
// ============================================================================

/// How the `l2` mask-stage erasures are patterned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaskMode {
    /// Weight-`l2` first-order Reed-Muller codewords; `l2` is rounded to the
    /// largest power of two not exceeding `beta * n`.
    ReedMuller,
    /// Seeded random distinct weight-`l2` vectors with `l2 = round(beta * n)`.
    Random,
}

#[derive(Clone, Copy, Debug)]
pub struct BpLedParams {
    /// Scale on the redundancy: `nu = round(alpha * (1 - R) * n)` total
    /// erasures, with `R` the actual rate of the bound code.
    pub alpha: f64,
    /// Mask-stage fraction: `l2` is derived from `beta * n` (see `MaskMode`).
    pub beta: f64,
    /// Number of masks tried per BP failure.
    pub n_masks: usize,
    /// Candidate completions per mask (capped at `2^L` at runtime).
    pub j_max: u64,
    /// BP iteration budget.
    pub max_iter: usize,
    /// Reliability window override; `None` derives it from the girth.
    pub window: Option<usize>,
    /// Seed for mask selection.
    pub mask_seed: u64,
    pub mask_mode: MaskMode,
}

impl Default for BpLedParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.18,
            n_masks: 5,
            j_max: 1 << 8,
            max_iter: 50,
            window: None,
            mask_seed: 1,
            mask_mode: MaskMode::ReedMuller,
        }
    }
}

// ============================================================================
// Erasure selection
// ============================================================================

/// Indices of the `l1` smallest reliabilities, ties broken by ascending
/// index; returned ascending.
#[must_use]
pub fn select_erasures(reliability: &[f64], l1: usize) -> Vec<usize> {
    assert!(
        l1 <= reliability.len(),
        "cannot erase more positions than exist"
    );
    let mut order: Vec<usize> = (0..reliability.len()).collect();
    order.sort_by(|&a, &b| reliability[a].total_cmp(&reliability[b]).then(a.cmp(&b)));
    let mut picked = order[..l1].to_vec();
    picked.sort_unstable();
    picked
}

/// Applies one mask to the `mask.len()` least-reliable positions outside
/// `already_erased`: positions under a 1 bit are selected. Returned
/// ascending; disjoint from `already_erased` by construction.
#[must_use]
pub fn apply_mask(reliability: &[f64], already_erased: &[usize], mask: &[u8]) -> Vec<usize> {
    let n = reliability.len();
    assert!(
        already_erased.len() + mask.len() <= n,
        "mask window does not fit in the non-erased positions"
    );
    let mut blocked = vec![false; n];
    for &i in already_erased {
        blocked[i] = true;
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| !blocked[i]).collect();
    order.sort_by(|&a, &b| reliability[a].total_cmp(&reliability[b]).then(a.cmp(&b)));
    let mut picked: Vec<usize> = order[..mask.len()]
        .iter()
        .zip(mask)
        .filter(|&(_, &m)| m == 1)
        .map(|(&i, _)| i)
        .collect();
    picked.sort_unstable();
    picked
}

// ============================================================================
// Masks
// ============================================================================

/// Builds `n_masks` distinct length-`2*l2`, weight-`l2` mask vectors.
///
/// For power-of-two `l2` these are first-order Reed-Muller codewords of
/// length `2*l2` (every non-constant codeword has weight exactly `l2`),
/// drawn from the full set in seeded shuffled order. Otherwise they are
/// seeded random distinct weight-`l2` vectors.
pub fn make_masks(l2: usize, n_masks: usize, seed: u64) -> Result<Vec<Vec<u8>>, BpLedError> {
    if l2 == 0 {
        return Err(BpLedError::BadParam("l2 must be at least 1"));
    }
    if n_masks == 0 {
        return Err(BpLedError::BadParam("n_masks must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if l2.is_power_of_two() {
        // m with 2^m = 2*l2; codeword bits b_u = a0 + <a, u> over GF(2).
        let m = l2.trailing_zeros() + 1;
        let len = 2 * l2;
        let available = 2 * len - 2;
        if n_masks > available {
            return Err(BpLedError::MaskExhausted {
                requested: n_masks,
                available,
            });
        }
        let mut all: Vec<Vec<u8>> = Vec::with_capacity(available);
        for a in 1..1usize << m {
            for a0 in 0..2u8 {
                let word: Vec<u8> = (0..len)
                    .map(|u| a0 ^ ((a & u).count_ones() as u8 & 1))
                    .collect();
                all.push(word);
            }
        }
        all.shuffle(&mut rng);
        all.truncate(n_masks);
        Ok(all)
    } else {
        // ln C(2*l2, l2) bounds the number of distinct weight-l2 vectors.
        let ln_available = ln_binomial(2 * l2 as u64, l2 as u64).expect("k <= n holds");
        if ln_available < (n_masks as f64).ln() - 1e-9 {
            let available = (ln_available.exp()).round() as usize;
            return Err(BpLedError::MaskExhausted {
                requested: n_masks,
                available,
            });
        }
        let len = 2 * l2;
        let mut seen: HashSet<Vec<u8>> = HashSet::new();
        let mut out = Vec::with_capacity(n_masks);
        let mut positions: Vec<usize> = (0..len).collect();
        while out.len() < n_masks {
            for i in 0..l2 {
                let pick = rng.random_range(i..len);
                positions.swap(i, pick);
            }
            let mut word = vec![0u8; len];
            for &p in &positions[..l2] {
                word[p] = 1;
            }
            if seen.insert(word.clone()) {
                out.push(word);
            }
        }
        Ok(out)
    }
}

// ============================================================================
// Candidate enumeration and metric
// ============================================================================

/// Iterator over length-`l` binary words in ascending-weight order, ties in
/// ascending numeric value (bit `i` of the yielded integer is position `i`).
/// Yields at most `min(j_max, 2^l)` words, starting with the all-zero word.
#[derive(Clone, Debug)]
pub struct WeightOrdered {
    l: u32,
    remaining: u64,
    weight: u32,
    word: u64,
}

impl WeightOrdered {
    #[must_use]
    pub fn new(l: u32, j_max: u64) -> Self {
        assert!(l <= 63, "word length above 63 bits is unsupported");
        let total = if l == 63 { u64::MAX / 2 + 1 } else { 1u64 << l };
        Self {
            l,
            remaining: j_max.min(total),
            weight: 0,
            word: 0,
        }
    }
}

impl Iterator for WeightOrdered {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let out = self.word;
        // Gosper's hack: next word of equal weight, else the smallest word
        // of the next weight.
        let limit = 1u64 << self.l;
        let next_same = if self.word == 0 {
            limit // weight 0 has a single word
        } else {
            let u = self.word & self.word.wrapping_neg();
            let v = self.word + u;
            if v >= limit {
                limit
            } else {
                v | (((self.word ^ v) / u) >> 2)
            }
        };
        if next_same < limit {
            self.word = next_same;
        } else {
            self.weight += 1;
            self.word = (1u64 << self.weight.min(63)) - 1;
        }
        Some(out)
    }
}

/// Convenience collector over [`WeightOrdered`].
#[must_use]
pub fn enumerate_weight_ordered(l: u32, j_max: u64) -> Vec<u64> {
    WeightOrdered::new(l, j_max).collect()
}

/// Squared Euclidean distance between the channel vector and the BPSK image
/// (0 -> -1, 1 -> +1) of a candidate word.
#[must_use]
pub fn metric(channel: &[f64], candidate: &[u8]) -> f64 {
    assert_eq!(channel.len(), candidate.len(), "length mismatch");
    channel
        .iter()
        .zip(candidate)
        .map(|(&r, &c)| {
            let s = if c == 1 { 1.0 } else { -1.0 };
            (r - s) * (r - s)
        })
        .sum()
}

// ============================================================================
// Decoder
// ============================================================================

/// How the returned word was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    /// BP reached a codeword; no erasure decoding ran.
    BpConverged,
    /// BP failed; the metric-best erasure-decoding candidate is returned.
    LedRecovered,
    /// BP failed and no mask produced a consistent completion; the BP hard
    /// decisions are returned as-is (generally not a codeword).
    Fallback,
}

impl std::fmt::Display for DecodeStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecodeStatus::BpConverged => "bp_converged",
            DecodeStatus::LedRecovered => "led_recovered",
            DecodeStatus::Fallback => "fallback",
        })
    }
}

/// Outcome of one BP-LED decoding attempt.
#[derive(Clone, Debug)]
pub struct BpLedOutcome {
    /// The decoder's answer.
    pub word: Vec<u8>,
    pub status: DecodeStatus,
    /// What BP alone would have answered (hard decisions at exit).
    pub bp_word: Vec<u8>,
    pub bp_iterations: usize,
}

/// BP-LED decoder bound to one code, with masks and erasure sizes resolved
/// up front.
#[derive(Clone, Debug)]
pub struct BpLedDecoder {
    h: ParityCheck,
    bp: BpDecoder,
    params: BpLedParams,
    nu: usize,
    l1: usize,
    l2: usize,
    rate: f64,
    masks: Vec<Vec<u8>>,
}

impl BpLedDecoder {
    pub fn new(h: &ParityCheck, params: BpLedParams) -> Result<Self, BpLedError> {
        if params.alpha <= 0.0 || !params.alpha.is_finite() {
            return Err(BpLedError::BadParam("alpha must be positive and finite"));
        }
        if params.beta <= 0.0 || !params.beta.is_finite() {
            return Err(BpLedError::BadParam("beta must be positive and finite"));
        }
        if params.j_max == 0 {
            return Err(BpLedError::BadParam("j_max must be at least 1"));
        }
        if params.max_iter == 0 {
            return Err(BpLedError::BadParam("max_iter must be at least 1"));
        }
        let n = h.n();
        let rate = h.rate();
        let nu = (params.alpha * (1.0 - rate) * n as f64).round() as usize;
        let l2 = match params.mask_mode {
            MaskMode::ReedMuller => {
                let cap = (params.beta * n as f64).floor() as usize;
                if cap < 1 {
                    return Err(BpLedError::BadParam("beta * n is below 1"));
                }
                // Largest power of two not exceeding beta * n.
                1usize << (usize::BITS - 1 - cap.leading_zeros())
            }
            MaskMode::Random => (params.beta * n as f64).round() as usize,
        };
        if l2 > nu {
            return Err(BpLedError::ErasureBudget { nu, l2 });
        }
        let l1 = nu - l2;
        if l1 + 2 * l2 > n {
            return Err(BpLedError::WindowTooLarge {
                l1,
                window: 2 * l2,
                n,
            });
        }
        let masks = make_masks(l2, params.n_masks, params.mask_seed)?;
        let bp = match params.window {
            Some(w) => BpDecoder::with_window(h, params.max_iter, w),
            None => BpDecoder::new(h, params.max_iter),
        };
        Ok(Self {
            h: h.clone(),
            bp,
            params,
            nu,
            l1,
            l2,
            rate,
            masks,
        })
    }

    /// Total erasures per mask run (`l1 + l2`).
    #[must_use]
    pub fn nu(&self) -> usize {
        self.nu
    }

    #[must_use]
    pub fn l1(&self) -> usize {
        self.l1
    }

    #[must_use]
    pub fn l2(&self) -> usize {
        self.l2
    }

    #[must_use]
    pub fn rate(&self) -> f64 {
        self.rate
    }

    #[must_use]
    pub fn params(&self) -> &BpLedParams {
        &self.params
    }

    #[must_use]
    pub fn masks(&self) -> &[Vec<u8>] {
        &self.masks
    }

    #[must_use]
    pub fn code(&self) -> &ParityCheck {
        &self.h
    }

    /// Decodes one received vector (`sigma` is the channel noise standard
    /// deviation used to form BP's channel LLRs).
    #[must_use]
    pub fn decode(&self, received: &[f64], sigma: f64) -> BpLedOutcome {
        let llr = channel_llrs(received, sigma);
        let bp_res: BpResult = self.bp.decode(&llr);
        if bp_res.converged {
            return BpLedOutcome {
                word: bp_res.hard.clone(),
                status: DecodeStatus::BpConverged,
                bp_word: bp_res.hard,
                bp_iterations: bp_res.iterations,
            };
        }

        let i1 = select_erasures(&bp_res.reliability, self.l1);
        let mut y_base = PartialWord::from_bits(&bp_res.hard);
        for &i in &i1 {
            y_base.erase(i);
        }
        let r_hard: Vec<u8> = received.iter().map(|&r| u8::from(r > 0.0)).collect();

        let mut best: Option<(f64, Vec<u8>)> = None;
        let mut candidate = Vec::with_capacity(self.h.n());
        for mask in &self.masks {
            let i2 = apply_mask(&bp_res.reliability, &i1, mask);
            let mut y = y_base.clone();
            for &i in &i2 {
                y.erase(i);
            }
            let led = led_decode(&self.h, &y);
            if !led.consistent {
                continue;
            }
            let l = led.free_count();
            if l > MAX_FREE_POSITIONS {
                continue;
            }
            // Free positions start at the channel hard decisions; flip words
            // visit their neighborhoods in ascending weight.
            let mut aa = BitVec::zeros(l);
            for flips in WeightOrdered::new(l as u32, self.params.j_max) {
                for (j, &pos) in led.aa_positions.iter().enumerate() {
                    aa.set(j, (r_hard[pos] == 1) ^ (flips >> j & 1 == 1));
                }
                led.complete_into(&aa, &mut candidate);
                let m = metric(received, &candidate);
                if best.as_ref().is_none_or(|(b, _)| m < *b) {
                    best = Some((m, candidate.clone()));
                }
            }
        }

        match best {
            Some((_, word)) => BpLedOutcome {
                word,
                status: DecodeStatus::LedRecovered,
                bp_word: bp_res.hard,
                bp_iterations: bp_res.iterations,
            },
            None => BpLedOutcome {
                word: bp_res.hard.clone(),
                status: DecodeStatus::Fallback,
                bp_word: bp_res.hard,
                bp_iterations: bp_res.iterations,
            },
        }
    }
}

// ============================================================================
// Nonbinary adapter
// ============================================================================

/// Converts a probability vector over GF(2^m) symbol values into per-bit
/// LLRs (positive favors bit 0; bit `j` is the `j`-th binary digit of the
/// symbol index, least significant first). Probabilities must be
/// nonnegative and sum to 1 within 1e-9.
#[must_use]
pub fn symbol_probs_to_bit_llrs(symbol_probs: &[f64]) -> Vec<f64> {
    let q = symbol_probs.len();
    assert!(
        q >= 2 && q.is_power_of_two(),
        "symbol alphabet must be a power of two"
    );
    assert!(
        symbol_probs.iter().all(|&p| p >= 0.0),
        "probabilities must be nonnegative"
    );
    let sum: f64 = symbol_probs.iter().sum();
    assert!((sum - 1.0).abs() <= 1e-9, "probabilities must sum to 1");
    let m = q.trailing_zeros() as usize;
    (0..m)
        .map(|j| {
            let mut p0 = 0.0;
            let mut p1 = 0.0;
            for (s, &p) in symbol_probs.iter().enumerate() {
                if s >> j & 1 == 0 {
                    p0 += p;
                } else {
                    p1 += p;
                }
            }
            (p0 / p1).ln().clamp(-LLR_CLIP, LLR_CLIP)
        })
        .collect()
}

// ============================================================================
// Tests
// ============================================================================
