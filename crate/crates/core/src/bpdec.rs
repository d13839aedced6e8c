//! Flooding sum-product decoder for the binary-input AWGN channel.
//!
//! Messages live on edges of the Tanner graph in flat check-major arrays.
//! Check updates use the exact tanh rule with per-edge exclusion done by
//! recomputing the leave-one-out product (O(d^2) per check, numerically
//! exact; the product/divide shortcut loses precision near saturated
//! messages). All messages and channel inputs are clipped to +/-25.
//!
//! Besides hard decisions the decoder reports a per-bit reliability: the
//! minimum absolute posterior over the first `g` iterations, where `g`
//! defaults to the Tanner-graph girth. Within the first `girth` iterations
//! incoming evidence is cycle-free, so a posterior that dips close to zero
//! early marks a bit the graph itself cannot pin down.

use crate::codes::{girth, ParityCheck};

/// Message and channel-LLR saturation bound.
pub const LLR_CLIP: f64 = 25.0;

#[inline]
fn clip(x: f64) -> f64 {
    x.clamp(-LLR_CLIP, LLR_CLIP)
}

/// Hard decision from an LLR (positive means bit 0; ties go to 0).
#[inline]
#[must_use]
pub fn hard_decision(llr: f64) -> u8 {
    u8::from(llr < 0.0)
}

/// Channel LLRs for BPSK (bit 0 -> -1, bit 1 -> +1) over AWGN with noise
/// standard deviation `sigma`: `-2 r / sigma^2`, clipped.
#[must_use]
pub fn channel_llrs(received: &[f64], sigma: f64) -> Vec<f64> {
    assert!(sigma > 0.0, "sigma must be positive");
    let scale = -2.0 / (sigma * sigma);
    received.iter().map(|&r| clip(scale * r)).collect()
}

/// Outcome of one decoding attempt.
#[derive(Clone, Debug)]
pub struct BpResult {
    /// Hard decisions from the final posteriors.
    pub hard: Vec<u8>,
    /// Final posterior LLRs (channel plus all check messages, unclipped).
    pub posterior: Vec<f64>,
    /// Per-bit min |posterior| over the first `reliability_window` iterations.
    pub reliability: Vec<f64>,
    /// True when the hard decisions satisfied every check.
    pub converged: bool,
    /// Iterations actually performed (at least 1, at most `max_iter`).
    pub iterations: usize,
}

/// Sum-product decoder bound to one parity-check matrix.
///
/// The decoder is immutable after construction; `decode` allocates its own
/// working buffers, so one instance can serve many threads.
#[derive(Clone, Debug)]
pub struct BpDecoder {
    n: usize,
    max_iter: usize,
    reliability_window: usize,
    /// Edge structure, check-major: edge e covers variable `edge_var[e]`,
    /// check c owns edges `check_start[c]..check_start[c+1]`.
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    /// Var-major view: variable v owns edge indices
    /// `var_edges[var_start[v]..var_start[v+1]]`.
    var_start: Vec<usize>,
    var_edges: Vec<usize>,
}

impl BpDecoder {
    /// Builds a decoder with the reliability window set to the girth of `h`
    /// (or to `max_iter` when the graph is acyclic or the girth exceeds it).
    #[must_use]
    pub fn new(h: &ParityCheck, max_iter: usize) -> Self {
        let window = girth(h).unwrap_or(max_iter).min(max_iter);
        Self::with_window(h, max_iter, window)
    }

    /// Builds a decoder with an explicit reliability window.
    #[must_use]
    pub fn with_window(h: &ParityCheck, max_iter: usize, window: usize) -> Self {
        assert!(max_iter >= 1, "at least one iteration is required");
        let n = h.n();
        let mut check_start = Vec::with_capacity(h.num_checks() + 1);
        let mut edge_var = Vec::new();
        check_start.push(0);
        for row in h.rows() {
            edge_var.extend_from_slice(row);
            check_start.push(edge_var.len());
        }
        let mut var_start = vec![0usize; n + 1];
        for &v in &edge_var {
            var_start[v + 1] += 1;
        }
        for v in 0..n {
            var_start[v + 1] += var_start[v];
        }
        let mut cursor = var_start.clone();
        let mut var_edges = vec![0usize; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            var_edges[cursor[v]] = e;
            cursor[v] += 1;
        }
        Self {
            n,
            max_iter,
            reliability_window: window.clamp(1, max_iter),
            check_start,
            edge_var,
            var_start,
            var_edges,
        }
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn max_iter(&self) -> usize {
        self.max_iter
    }

    /// Number of leading iterations that feed the reliability minimum.
    #[must_use]
    pub fn reliability_window(&self) -> usize {
        self.reliability_window
    }

    /// Runs flooding sum-product on one channel-LLR vector.
    #[must_use]
    pub fn decode(&self, channel_llr: &[f64]) -> BpResult {
        assert_eq!(
            channel_llr.len(),
            self.n,
            "LLR length must equal code length"
        );
        let llr: Vec<f64> = channel_llr.iter().map(|&x| clip(x)).collect();
        let num_edges = self.edge_var.len();
        let num_checks = self.check_start.len() - 1;

        let mut v2c: Vec<f64> = (0..num_edges).map(|e| llr[self.edge_var[e]]).collect();
        let mut c2v = vec![0.0f64; num_edges];
        let mut tanh_buf: Vec<f64> = Vec::new();
        let mut posterior = vec![0.0f64; self.n];
        let mut hard = vec![0u8; self.n];
        let mut reliability = vec![f64::INFINITY; self.n];
        let mut converged = false;
        let mut iterations = 0;

        for iter in 1..=self.max_iter {
            iterations = iter;
            // Check update: leave-one-out tanh products, recomputed per edge.
            for c in 0..num_checks {
                let lo = self.check_start[c];
                let hi = self.check_start[c + 1];
                tanh_buf.clear();
                tanh_buf.extend(v2c[lo..hi].iter().map(|&m| (0.5 * m).tanh()));
                for i in 0..hi - lo {
                    let mut prod = 1.0;
                    for (j, &t) in tanh_buf.iter().enumerate() {
                        if j != i {
                            prod *= t;
                        }
                    }
                    c2v[lo + i] = clip(2.0 * prod.atanh());
                }
            }
            // Variable update, posteriors, hard decisions.
            for v in 0..self.n {
                let mut sum = llr[v];
                for &e in &self.var_edges[self.var_start[v]..self.var_start[v + 1]] {
                    sum += c2v[e];
                }
                posterior[v] = sum;
                hard[v] = hard_decision(sum);
                if iter <= self.reliability_window {
                    reliability[v] = reliability[v].min(sum.abs());
                }
                for &e in &self.var_edges[self.var_start[v]..self.var_start[v + 1]] {
                    v2c[e] = clip(sum - c2v[e]);
                }
            }
            // Early exit on a satisfied syndrome.
            let satisfied = (0..num_checks).all(|c| {
                self.edge_var[self.check_start[c]..self.check_start[c + 1]]
                    .iter()
                    .fold(0u8, |acc, &v| acc ^ hard[v])
                    == 0
            });
            if satisfied {
                converged = true;
                break;
            }
        }

        BpResult {
            hard,
            posterior,
            reliability,
            converged,
            iterations,
        }
    }
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;

    fn single_check(n: usize) -> ParityCheck {
        ParityCheck::new(n, vec![(0..n).collect()])
    }

    fn hamming_7_4() -> ParityCheck {
        let rows = (0..3)
            .map(|b| {
                (1usize..=7)
                    .filter(|c| c >> b & 1 == 1)
                    .map(|c| c - 1)
                    .collect()
            })
            .collect();
        ParityCheck::new(7, rows)
    }

    #[test]
    fn channel_llr_sign_and_clipping() {
        // bit 0 -> -1: a negative sample must produce a positive LLR.
        let llr = channel_llrs(&[-1.0, 1.0, 0.26, -10.0], 0.5);
        assert_eq!(llr[0], 8.0);
        assert_eq!(llr[1], -8.0);
        assert!((llr[2] - -2.08).abs() < 1e-12);
        assert_eq!(llr[3], LLR_CLIP);
        assert_eq!(hard_decision(llr[0]), 0);
        assert_eq!(hard_decision(llr[1]), 1);
        assert_eq!(hard_decision(0.0), 0);
        assert_eq!(hard_decision(-0.0), 0);
    }

    #[test]
    fn single_check_posteriors_match_hand_computation() {
        // One parity check over (2.0, 2.0, -0.5); exact tanh-rule values.
        let dec = BpDecoder::new(&single_check(3), 1);
        let res = dec.decode(&[2.0, 2.0, -0.5]);
        assert!((res.posterior[0] - 1.62252354369020279).abs() < 1e-14);
        assert!((res.posterior[1] - 1.62252354369020279).abs() < 1e-14);
        assert!((res.posterior[2] - 0.825002747357864431).abs() < 1e-14);
        // The weak negative observation is overruled by the check.
        assert_eq!(res.hard, vec![0, 0, 0]);
        assert!(res.converged);
        assert_eq!(res.iterations, 1);
        for (r, p) in res.reliability.iter().zip(&res.posterior) {
            assert_eq!(r, &p.abs());
        }
    }

    #[test]
    fn degree_two_checks_pass_messages_through() {
        // 2*atanh(tanh(x/2)) == x, so posteriors are exact sums.
        let dec = BpDecoder::new(&ParityCheck::new(2, vec![vec![0, 1]]), 1);
        let res = dec.decode(&[1.5, -0.7]);
        assert!((res.posterior[0] - 0.8).abs() < 1e-12);
        assert!((res.posterior[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn bitwise_map_fixpoint_need_not_be_a_codeword() {
        // All three bits weakly favor 1 but 111 fails the check. On a
        // cycle-free graph messages are stationary after one iteration, so
        // the decoder runs out its budget at the exact marginals.
        let dec = BpDecoder::new(&single_check(3), 7);
        let res = dec.decode(&[-1.0, -1.0, -1.0]);
        assert!(!res.converged);
        assert_eq!(res.iterations, 7);
        assert_eq!(res.hard, vec![1, 1, 1]);
        for &p in &res.posterior {
            assert!((p - -0.566219169516972813).abs() < 1e-14);
        }
    }

    #[test]
    fn noiseless_words_converge_in_one_iteration() {
        let h = hamming_7_4();
        for c in [[0u8; 7], [1, 1, 1, 0, 0, 0, 0], [1, 1, 1, 1, 1, 1, 1]] {
            assert!(h.is_codeword(&c));
            let received: Vec<f64> = c.iter().map(|&b| if b == 1 { 1.0 } else { -1.0 }).collect();
            let dec = BpDecoder::new(&h, 50);
            let res = dec.decode(&channel_llrs(&received, 0.8));
            assert!(res.converged);
            assert_eq!(res.iterations, 1);
            assert_eq!(res.hard, c);
        }
    }

    #[test]
    fn corrects_a_weak_single_error() {
        let h = hamming_7_4();
        // All-zero transmitted; position 4 received on the wrong side of 0.
        let mut received = vec![-1.0; 7];
        received[4] = 0.1;
        let dec = BpDecoder::new(&h, 50);
        let res = dec.decode(&channel_llrs(&received, 0.8));
        assert!(res.converged);
        assert_eq!(res.hard, vec![0; 7]);
    }

    #[test]
    fn reliability_window_defaults_to_girth() {
        // Two checks sharing two variables: girth 4.
        let h = ParityCheck::new(4, vec![vec![0, 1, 2], vec![0, 1, 3]]);
        assert_eq!(BpDecoder::new(&h, 50).reliability_window(), 4);
        // Acyclic graph: window falls back to the iteration budget.
        assert_eq!(
            BpDecoder::new(&single_check(3), 50).reliability_window(),
            50
        );
        // Window never exceeds the budget.
        assert_eq!(BpDecoder::new(&h, 2).reliability_window(), 2);
    }

    #[test]
    fn reliability_is_a_running_minimum() {
        let h = ParityCheck::new(4, vec![vec![0, 1, 2], vec![0, 1, 3]]);
        let llr = [0.9, -1.1, 1.3, -0.4];
        let full = BpDecoder::with_window(&h, 8, 8).decode(&llr);
        // Window 8 minimum can only be <= the window-1 value.
        let first = BpDecoder::with_window(&h, 1, 1).decode(&llr);
        for v in 0..4 {
            assert_eq!(first.reliability[v], first.posterior[v].abs());
            assert!(full.reliability[v] <= first.reliability[v] + 1e-12);
        }
    }

    #[test]
    fn saturated_inputs_stay_finite() {
        let h = hamming_7_4();
        let dec = BpDecoder::new(&h, 30);
        let res = dec.decode(&[1e9, -1e9, 1e9, -1e9, 1e9, -1e9, 1e9]);
        for &p in &res.posterior {
            assert!(p.is_finite());
        }
        for &r in &res.reliability {
            assert!(r.is_finite());
        }
    }
}
