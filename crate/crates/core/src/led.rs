//! List erasure decoding.
//!
//! Given a word whose positions are each known or erased, the decoder
//! characterizes *all* codewords that agree with the known positions. The
//! result is an affine solution list: a handful of erased positions become
//! free ("arbitrarily assigned") while every other erased position is an
//! affine function of them, so a list of `2^L` candidates is represented in
//! `O(L)` space and individual candidates are materialized on demand.
//!
//! The implementation peels degree-1 checks to a fixpoint (cheap, resolves
//! most positions on sparse codes) and hands the residual system to
//! [`crate::gf2::diagonalize`]. Interleaving peeling with elimination pivots
//! would produce the same solution set; peeling first is just the simpler
//! schedule.

use crate::codes::ParityCheck;
use crate::gf2::{diagonalize, BitMatrix, BitVec, EliminationResult};

// ============================================================================
// Partial words
// ============================================================================

/// Value of one position of a partial word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symbol {
    Zero,
    One,
    Erased,
}

impl Symbol {
    #[must_use]
    pub fn from_bit(b: u8) -> Self {
        match b {
            0 => Symbol::Zero,
            1 => Symbol::One,
            _ => panic!("bit values must be 0 or 1"),
        }
    }

    /// The known bit, or `None` when erased.
    #[must_use]
    pub fn bit(self) -> Option<u8> {
        match self {
            Symbol::Zero => Some(0),
            Symbol::One => Some(1),
            Symbol::Erased => None,
        }
    }
}

/// A word over {0, 1, erased}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialWord {
    syms: Vec<Symbol>,
}

impl PartialWord {
    #[must_use]
    pub fn new(syms: Vec<Symbol>) -> Self {
        Self { syms }
    }

    /// Fully known word.
    #[must_use]
    pub fn from_bits(bits: &[u8]) -> Self {
        Self {
            syms: bits.iter().map(|&b| Symbol::from_bit(b)).collect(),
        }
    }

    /// Word with every position erased.
    #[must_use]
    pub fn all_erased(len: usize) -> Self {
        Self {
            syms: vec![Symbol::Erased; len],
        }
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.syms.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    #[must_use]
    pub fn get(&self, i: usize) -> Symbol {
        self.syms[i]
    }

    pub fn set(&mut self, i: usize, s: Symbol) {
        self.syms[i] = s;
    }

    pub fn erase(&mut self, i: usize) {
        self.syms[i] = Symbol::Erased;
    }

    #[must_use]
    pub fn erased_positions(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.syms[i] == Symbol::Erased)
            .collect()
    }

    #[must_use]
    pub fn count_erased(&self) -> usize {
        self.syms.iter().filter(|&&s| s == Symbol::Erased).count()
    }
}

// ============================================================================
// Decoder
// ============================================================================

/// Affine description of every codeword compatible with a partial word.
#[derive(Clone, Debug)]
pub struct LedResult {
    /// The input with all resolvable positions assigned; only the free
    /// positions remain erased. Assigned values correspond to the all-zero
    /// free assignment.
    pub base: PartialWord,
    /// Free ("arbitrarily assigned") positions, ascending.
    pub aa_positions: Vec<usize>,
    /// False when the known positions already contradict some check; the
    /// solution list is then empty.
    pub consistent: bool,
    /// Affine map from free assignments to the residual dependent positions.
    pub completion: EliminationResult,
    /// Positions whose value depends on the free assignment, ascending.
    dep_positions: Vec<usize>,
}

impl LedResult {
    /// log2 of the solution-list size.
    #[must_use]
    pub fn free_count(&self) -> usize {
        self.aa_positions.len()
    }

    /// Materializes the codeword for one free assignment (`aa` indexed like
    /// `aa_positions`). Must not be called on an inconsistent result.
    #[must_use]
    pub fn complete(&self, aa: &BitVec) -> Vec<u8> {
        let mut out = vec![0u8; self.base.len()];
        self.complete_into(aa, &mut out);
        out
    }

    /// In-place variant of [`Self::complete`] for enumeration loops.
    pub fn complete_into(&self, aa: &BitVec, out: &mut Vec<u8>) {
        assert!(
            self.consistent,
            "cannot complete an inconsistent solution list"
        );
        assert_eq!(
            aa.len(),
            self.aa_positions.len(),
            "free assignment length mismatch"
        );
        out.clear();
        out.extend(self.base.syms.iter().map(|s| s.bit().unwrap_or(0)));
        for (j, &pos) in self.aa_positions.iter().enumerate() {
            out[pos] = u8::from(aa.get(j));
        }
        for (i, &pos) in self.dep_positions.iter().enumerate() {
            out[pos] = u8::from(
                self.completion.completion_offset.get(i)
                    ^ self.completion.completion_matrix.row(i).dot(aa),
            );
        }
    }

    /// Full solution list in free-assignment counting order. Guarded against
    /// blowing up: requires `free_count() <= 20`.
    #[must_use]
    pub fn solutions(&self) -> Vec<Vec<u8>> {
        if !self.consistent {
            return Vec::new();
        }
        let l = self.free_count();
        assert!(
            l <= 20,
            "solution list of 2^{l} entries is too large to materialize"
        );
        let mut out = Vec::with_capacity(1 << l);
        let mut aa = BitVec::zeros(l);
        for bits in 0u64..1 << l {
            for j in 0..l {
                aa.set(j, bits >> j & 1 == 1);
            }
            out.push(self.complete(&aa));
        }
        out
    }
}

/// Decodes a partial word against `h`, returning the affine list of all
/// compatible codewords.
#[must_use]
pub fn led_decode(h: &ParityCheck, y: &PartialWord) -> LedResult {
    assert_eq!(y.len(), h.n(), "word length must equal code length");
    let n = h.n();
    let num_checks = h.num_checks();

    // Per-check state: number of erased positions and parity of known bits.
    let mut erased_count = vec![0usize; num_checks];
    let mut parity = vec![0u8; num_checks];
    let mut value: Vec<Symbol> = (0..n).map(|i| y.get(i)).collect();
    for (ci, row) in h.rows().iter().enumerate() {
        for &v in row {
            match value[v] {
                Symbol::Erased => erased_count[ci] += 1,
                Symbol::One => parity[ci] ^= 1,
                Symbol::Zero => {}
            }
        }
    }

    let var_adj = h.var_adjacency();

    // Peel degree-1 checks to a fixpoint.
    let mut queue: std::collections::VecDeque<usize> =
        (0..num_checks).filter(|&c| erased_count[c] == 1).collect();
    while let Some(c) = queue.pop_front() {
        if erased_count[c] != 1 {
            continue;
        }
        let v = *h
            .row(c)
            .iter()
            .find(|&&v| value[v] == Symbol::Erased)
            .expect("check with one erased position");
        let bit = parity[c];
        value[v] = Symbol::from_bit(bit);
        for &c2 in &var_adj[v] {
            erased_count[c2] -= 1;
            parity[c2] ^= bit;
            if erased_count[c2] == 1 {
                queue.push_back(c2);
            }
        }
    }

    // Fully known checks must now be satisfied.
    let peel_consistent = (0..num_checks).all(|c| erased_count[c] > 0 || parity[c] == 0);

    // Residual system over the still-erased positions.
    let residual_cols: Vec<usize> = (0..n).filter(|&v| value[v] == Symbol::Erased).collect();
    let col_of: std::collections::HashMap<usize, usize> = residual_cols
        .iter()
        .enumerate()
        .map(|(j, &v)| (v, j))
        .collect();
    let residual_checks: Vec<usize> = (0..num_checks).filter(|&c| erased_count[c] > 0).collect();
    let mut w = BitMatrix::zeros(residual_checks.len(), residual_cols.len());
    let mut s = BitVec::zeros(residual_checks.len());
    for (ri, &c) in residual_checks.iter().enumerate() {
        for &v in h.row(c) {
            if let Some(&j) = col_of.get(&v) {
                w.set(ri, j, true);
            }
        }
        if parity[c] == 1 {
            s.set(ri, true);
        }
    }
    let elim = diagonalize(&w, &s);

    let aa_positions: Vec<usize> = elim.aa_columns.iter().map(|&j| residual_cols[j]).collect();
    let dep_positions: Vec<usize> = elim
        .dependent_columns
        .iter()
        .map(|&j| residual_cols[j])
        .collect();

    // Base word: peeled values plus the all-zero free assignment.
    let mut base = PartialWord::new(value);
    for (i, &pos) in dep_positions.iter().enumerate() {
        base.set(
            pos,
            Symbol::from_bit(u8::from(elim.completion_offset.get(i))),
        );
    }

    LedResult {
        base,
        aa_positions,
        consistent: peel_consistent && elim.consistent,
        completion: elim,
        dep_positions,
    }
}

/// Exhaustive reference decoder: tries all `2^nu` fillings of the erased
/// positions and keeps the codewords. Guarded to `nu <= 20`.
#[must_use]
pub fn brute_force_erasure_list(h: &ParityCheck, y: &PartialWord) -> Vec<Vec<u8>> {
    assert_eq!(y.len(), h.n(), "word length must equal code length");
    let erased = y.erased_positions();
    let nu = erased.len();
    assert!(nu <= 20, "brute force over 2^{nu} fillings is too large");
    let mut word: Vec<u8> = (0..y.len()).map(|i| y.get(i).bit().unwrap_or(0)).collect();
    let mut out = Vec::new();
    for bits in 0u64..1 << nu {
        for (j, &pos) in erased.iter().enumerate() {
            word[pos] = (bits >> j & 1) as u8;
        }
        if h.is_codeword(&word) {
            out.push(word.clone());
        }
    }
    out
}

// ============================================================================
// Tests
// ============================================================================
