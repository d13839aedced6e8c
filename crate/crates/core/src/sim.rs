//! Monte-Carlo frame-error-rate estimation for BPSK over AWGN.
//!
//! Reproducibility contract: every trial derives a private RNG stream from
//! `(master seed, SNR index, trial index)`, results are folded in trial
//! order, and stopping decisions scan that same order. Estimates therefore
//! never depend on worker count, scheduling, or whether the `parallel`
//! feature is compiled in — reruns produce identical records (the wall-time
//! field aside, which measures rather than describes the run).

use crate::bpled::{BpLedDecoder, BpLedError, BpLedParams};
use crate::codes::ParityCheck;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::io::{self, Write};
use std::time::Instant;

/// Trials evaluated per scheduling quantum. Stopping is decided by an
/// in-order scan, so the batch size only affects how much speculative work
/// a run may discard, never the records it produces.
const TRIAL_BATCH: u64 = 1024;

// ============================================================================
// Channel
// ============================================================================

/// AWGN channel parameters for a BPSK-modulated code of a given rate.
#[derive(Debug, Clone, Copy)]
pub struct ChannelConfig {
    pub rate: f64,
    /// E_b/N_0 in dB.
    pub snr_db: f64,
    /// Noise standard deviation: `sigma^2 = 1 / (2 R 10^{dB/10})` at unit
    /// symbol energy.
    pub sigma: f64,
}

impl ChannelConfig {
    #[must_use]
    pub fn new(rate: f64, snr_db: f64) -> Self {
        assert!(rate > 0.0, "rate must be positive");
        let sigma = (1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0))).sqrt();
        Self {
            rate,
            snr_db,
            sigma,
        }
    }
}

/// BPSK-modulates a codeword (bit 0 to -1, bit 1 to +1) and adds white
/// Gaussian noise of standard deviation `sigma`. Returns raw channel
/// values; the decoder converts them to LLRs at its own boundary.
#[must_use]
pub fn transmit_awgn(codeword: &[u8], sigma: f64, rng: &mut impl rand::Rng) -> Vec<f64> {
    assert!(sigma > 0.0, "noise level must be positive");
    let noise = Normal::new(0.0, sigma).expect("finite positive sigma");
    codeword
        .iter()
        .map(|&c| (2.0 * f64::from(c) - 1.0) + noise.sample(rng))
        .collect()
}

// ============================================================================
// Per-trial RNG streams
// ============================================================================

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the RNG stream for one trial from the master seed and the
/// trial's coordinates. The derivation is a fixed splitmix64 chain, so any
/// worker can reconstruct any trial's stream independently of execution
/// order.
#[must_use]
pub fn trial_rng(master_seed: u64, snr_index: u64, trial_index: u64) -> ChaCha8Rng {
    let mut state = master_seed;
    let a = splitmix64(&mut state);
    state ^= snr_index.wrapping_mul(0xA24B_AED4_963E_E407);
    let b = splitmix64(&mut state);
    state ^= trial_index.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    let c = splitmix64(&mut state);
    let d = splitmix64(&mut state);
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&a.to_le_bytes());
    seed[8..16].copy_from_slice(&b.to_le_bytes());
    seed[16..24].copy_from_slice(&c.to_le_bytes());
    seed[24..32].copy_from_slice(&d.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

// ============================================================================
// FER sweep
// ============================================================================

/// One SNR point's outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct FerRecord {
    pub snr_db: f64,
    pub trials: u64,
    pub bp_errors: u64,
    pub bpled_errors: u64,
    pub fer_bp: f64,
    pub fer_bpled: f64,
    pub seed: u64,
    /// Measured duration; the only field allowed to differ between reruns.
    pub wall_seconds: f64,
    /// True when `max_trials` ran out before `stop_errors` errors.
    pub censored: bool,
}

impl FerRecord {
    /// Equality over everything reruns must reproduce (wall time excluded).
    #[must_use]
    pub fn same_statistics(&self, other: &Self) -> bool {
        self.snr_db == other.snr_db
            && self.trials == other.trials
            && self.bp_errors == other.bp_errors
            && self.bpled_errors == other.bpled_errors
            && self.fer_bp == other.fer_bp
            && self.fer_bpled == other.fer_bpled
            && self.seed == other.seed
            && self.censored == other.censored
    }
}

/// Runs one trial: all-zero codeword through AWGN, then the full decoder.
/// Returns (BP stage erred, BP-LED erred).
fn run_trial(
    decoder: &BpLedDecoder,
    sigma: f64,
    master_seed: u64,
    snr_index: u64,
    trial_index: u64,
    zeros: &[u8],
) -> (bool, bool) {
    let mut rng = trial_rng(master_seed, snr_index, trial_index);
    let received = transmit_awgn(zeros, sigma, &mut rng);
    let outcome = decoder.decode(&received, sigma);
    let bp_err = outcome.bp_word.iter().any(|&b| b != 0);
    let bpled_err = outcome.word.iter().any(|&b| b != 0);
    (bp_err, bpled_err)
}

fn run_point(
    decoder: &BpLedDecoder,
    snr_db: f64,
    snr_index: u64,
    stop_errors: u64,
    max_trials: u64,
    master_seed: u64,
    parallel: bool,
) -> FerRecord {
    let started = Instant::now();
    let sigma = ChannelConfig::new(decoder.rate(), snr_db).sigma;
    let zeros = vec![0u8; decoder.code().n()];

    let mut trials = 0u64;
    let mut bp_errors = 0u64;
    let mut bpled_errors = 0u64;
    let mut next = 0u64;
    'outer: while next < max_trials {
        let batch_end = (next + TRIAL_BATCH).min(max_trials);
        let indices: Vec<u64> = (next..batch_end).collect();
        let results: Vec<(bool, bool)> = if parallel {
            eval_batch_parallel(decoder, sigma, master_seed, snr_index, &indices, &zeros)
        } else {
            indices
                .iter()
                .map(|&t| run_trial(decoder, sigma, master_seed, snr_index, t, &zeros))
                .collect()
        };
        // In-order fold; stop exactly at the stop_errors-th block error, so
        // the record is identical no matter how the batch was scheduled.
        for (bp_err, bpled_err) in results {
            trials += 1;
            bp_errors += u64::from(bp_err);
            bpled_errors += u64::from(bpled_err);
            if bpled_errors >= stop_errors {
                break 'outer;
            }
        }
        next = batch_end;
    }

    let censored = bpled_errors < stop_errors;
    FerRecord {
        snr_db,
        trials,
        bp_errors,
        bpled_errors,
        fer_bp: bp_errors as f64 / trials.max(1) as f64,
        fer_bpled: bpled_errors as f64 / trials.max(1) as f64,
        seed: master_seed,
        wall_seconds: started.elapsed().as_secs_f64(),
        censored,
    }
}

#[cfg(feature = "parallel")]
fn eval_batch_parallel(
    decoder: &BpLedDecoder,
    sigma: f64,
    master_seed: u64,
    snr_index: u64,
    indices: &[u64],
    zeros: &[u8],
) -> Vec<(bool, bool)> {
    indices
        .par_iter()
        .map(|&t| run_trial(decoder, sigma, master_seed, snr_index, t, zeros))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn eval_batch_parallel(
    decoder: &BpLedDecoder,
    sigma: f64,
    master_seed: u64,
    snr_index: u64,
    indices: &[u64],
    zeros: &[u8],
) -> Vec<(bool, bool)> {
    indices
        .iter()
        .map(|&t| run_trial(decoder, sigma, master_seed, snr_index, t, zeros))
        .collect()
}

fn run_fer_impl(
    code: &ParityCheck,
    params: BpLedParams,
    snr_grid_db: &[f64],
    stop_errors: u64,
    max_trials: u64,
    master_seed: u64,
    parallel: bool,
) -> Result<Vec<FerRecord>, BpLedError> {
    assert!(!snr_grid_db.is_empty(), "SNR grid must be nonempty");
    assert!(stop_errors >= 1, "stop threshold must be at least 1");
    let decoder = BpLedDecoder::new(code, params)?;
    if max_trials == 0 {
        return Ok(Vec::new());
    }
    Ok(snr_grid_db
        .iter()
        .enumerate()
        .map(|(i, &db)| {
            run_point(
                &decoder,
                db,
                i as u64,
                stop_errors,
                max_trials,
                master_seed,
                parallel,
            )
        })
        .collect())
}

/// Sweeps the SNR grid, transmitting the all-zero codeword and counting BP
/// and BP-LED block errors per point until `stop_errors` BP-LED errors or
/// `max_trials` trials, whichever first (the latter flags the record as
/// censored). All-zero transmission is justified by channel and decoder
/// symmetry, which a regression test checks against random codewords.
///
/// SNR is E_b/N_0 in dB against the code's actual rate (from the rank of
/// its parity-check matrix). `max_trials = 0` yields no records.
pub fn run_fer(
    code: &ParityCheck,
    params: BpLedParams,
    snr_grid_db: &[f64],
    stop_errors: u64,
    max_trials: u64,
    master_seed: u64,
) -> Result<Vec<FerRecord>, BpLedError> {
    run_fer_impl(
        code,
        params,
        snr_grid_db,
        stop_errors,
        max_trials,
        master_seed,
        cfg!(feature = "parallel"),
    )
}

/// Single-threaded variant of `run_fer`; compiled regardless of features
/// and guaranteed to produce the same records.
pub fn run_fer_serial(
    code: &ParityCheck,
    params: BpLedParams,
    snr_grid_db: &[f64],
    stop_errors: u64,
    max_trials: u64,
    master_seed: u64,
) -> Result<Vec<FerRecord>, BpLedError> {
    run_fer_impl(
        code,
        params,
        snr_grid_db,
        stop_errors,
        max_trials,
        master_seed,
        false,
    )
}

// ============================================================================
// CSV emission
// ============================================================================

pub const FER_CSV_HEADER: &str =
    "snr_db,trials,bp_errors,bpled_errors,fer_bp,fer_bpled,seed,wall_seconds,censored";

/// Writes records as CSV with the fixed header. Reruns with the same seed
/// produce byte-identical output except for the wall_seconds column.
pub fn write_fer_csv(records: &[FerRecord], mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{FER_CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.snr_db,
            r.trials,
            r.bp_errors,
            r.bpled_errors,
            r.fer_bp,
            r.fer_bpled,
            r.seed,
            r.wall_seconds,
            r.censored
        )?;
    }
    Ok(())
}

// ============================================================================
// Tests
// ============================================================================
