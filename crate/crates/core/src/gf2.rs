//! Bit-packed linear algebra over GF(2).
//!
//! The central operation is [`diagonalize`]: reduced row-echelon elimination
//! of a binary system `W z = s` that classifies columns into *dependent*
//! (pivot) columns and *free* columns, and returns an affine map that
//! reconstructs every solution from an assignment of the free columns.
//! Erasure decoding reduces to exactly this computation, with one column per
//! erased position.
//!
//! Matrices are stored row-major with 64 columns per machine word, so row
//! updates cost one XOR per word.

// ============================================================================
// BitVec
// ============================================================================

/// Fixed-length bit vector packed into `u64` words. Bit `i` lives in word
/// `i / 64` at bit offset `i % 64`. Unused high bits of the last word are
/// kept zero so that word-wise operations need no masking.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// Builds from a slice of 0/1 values.
    #[must_use]
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            debug_assert!(b <= 1, "bit values must be 0 or 1");
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    #[must_use]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    /// XORs `other` into `self`. Lengths must match.
    pub fn xor_with(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch in xor_with");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    #[must_use]
    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the AND with `other`, i.e. the GF(2) inner product.
    #[must_use]
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Expands to a dense 0/1 byte vector.
    #[must_use]
    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| u8::from(self.get(i))).collect()
    }
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

// ============================================================================
// BitMatrix
// ============================================================================

/// Dense bit-packed binary matrix, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    #[must_use]
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    /// Builds from a predicate over (row, col).
    #[must_use]
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    #[must_use]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[must_use]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r},{c}) out of range"
        );
        (self.words[r * self.stride + c / 64] >> (c % 64)) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r},{c}) out of range"
        );
        let mask = 1u64 << (c % 64);
        let w = &mut self.words[r * self.stride + c / 64];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Row `dst` ^= row `src`.
    pub fn xor_rows(&mut self, dst: usize, src: usize) {
        assert!(dst < self.rows && src < self.rows && dst != src);
        let (d, s) = (dst * self.stride, src * self.stride);
        for k in 0..self.stride {
            let v = self.words[s + k];
            self.words[d + k] ^= v;
        }
    }

    #[must_use]
    pub fn row(&self, r: usize) -> BitVec {
        assert!(r < self.rows);
        let start = r * self.stride;
        BitVec {
            len: self.cols,
            words: self.words[start..start + self.stride].to_vec(),
        }
    }

    #[must_use]
    pub fn row_is_zero(&self, r: usize) -> bool {
        self.words[r * self.stride..(r + 1) * self.stride]
            .iter()
            .all(|&w| w == 0)
    }

    #[must_use]
    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Matrix-vector product over GF(2): returns `self * v`.
    #[must_use]
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.row(r).dot(v) {
                out.set(r, true);
            }
        }
        out
    }

    /// Rank over GF(2). Operates on a scratch copy.
    #[must_use]
    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut used = vec![false; work.rows];
        let mut rank = 0;
        for col in 0..work.cols {
            let Some(p) = (0..work.rows).find(|&r| !used[r] && work.get(r, col)) else {
                continue;
            };
            used[p] = true;
            rank += 1;
            for r in 0..work.rows {
                if r != p && work.get(r, col) {
                    work.xor_rows(r, p);
                }
            }
        }
        rank
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

// ============================================================================
// Elimination with an affine completion map
// ============================================================================

/// Outcome of [`diagonalize`] on a system `W z = s`.
///
/// Columns split into `dependent_columns` (one pivot row each) and free
/// `aa_columns` ("arbitrarily assigned"). When `consistent`, every solution
/// is obtained by choosing the free values `z` and completing the dependent
/// values as `completion_matrix * z + completion_offset` (GF(2) arithmetic),
/// where row `i` of the completion map corresponds to `dependent_columns[i]`
/// and column `j` to `aa_columns[j]`.
#[derive(Clone, Debug)]
pub struct EliminationResult {
    /// Rank of the coefficient matrix; equals `dependent_columns.len()`.
    pub rank: usize,
    /// Free column indices, ascending.
    pub aa_columns: Vec<usize>,
    /// Pivot column indices, ascending.
    pub dependent_columns: Vec<usize>,
    /// `rank x aa_columns.len()` dependence of pivot values on free values.
    pub completion_matrix: BitMatrix,
    /// Constant term of the affine completion map, length `rank`.
    pub completion_offset: BitVec,
    /// False when a zero row of the reduced matrix meets a nonzero syndrome
    /// bit; the system then has no solution.
    pub consistent: bool,
}

impl EliminationResult {
    /// Number of free columns; the solution set has `2^free_count()`
    /// elements when consistent.
    #[must_use]
    pub fn free_count(&self) -> usize {
        self.aa_columns.len()
    }

    /// Number of dependent columns whose value actually varies with the free
    /// assignment (nonzero completion row). The remaining
    /// `rank - residual_rank()` columns are uniquely determined.
    #[must_use]
    pub fn residual_rank(&self) -> usize {
        (0..self.rank)
            .filter(|&i| !self.completion_matrix.row_is_zero(i))
            .count()
    }

    /// Reconstructs a full column assignment (length = total columns) from a
    /// free-column assignment `aa` of length `free_count()`.
    #[must_use]
    pub fn complete(&self, aa: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.rank + self.aa_columns.len());
        self.complete_into(aa, &mut out);
        out
    }

    /// In-place variant of [`Self::complete`]; `out` must have length
    /// `rank + free_count()`.
    pub fn complete_into(&self, aa: &BitVec, out: &mut BitVec) {
        assert_eq!(
            aa.len(),
            self.aa_columns.len(),
            "free assignment length mismatch"
        );
        assert_eq!(
            out.len(),
            self.rank + self.aa_columns.len(),
            "output length mismatch"
        );
        for (j, &c) in self.aa_columns.iter().enumerate() {
            out.set(c, aa.get(j));
        }
        for (i, &c) in self.dependent_columns.iter().enumerate() {
            let bit = self.completion_offset.get(i) ^ self.completion_matrix.row(i).dot(aa);
            out.set(c, bit);
        }
    }
}

/// Gauss-Jordan elimination of `W z = s` over GF(2).
///
/// Columns are scanned in ascending index order; each pivot is the
/// lowest-index row not yet used as one. The pivot column is cleared from
/// every other row, so the result is a reduced row-echelon form in which
/// never-pivoted rows are entirely zero and each pivot row involves only its
/// own column plus free columns.
#[must_use]
pub fn diagonalize(w: &BitMatrix, syndrome: &BitVec) -> EliminationResult {
    assert_eq!(
        syndrome.len(),
        w.rows(),
        "syndrome length must equal row count"
    );
    let mut work = w.clone();
    let mut s = syndrome.clone();
    let mut pivot_row = vec![usize::MAX; w.cols()];
    let mut used = vec![false; w.rows()];

    for col in 0..w.cols() {
        let Some(p) = (0..w.rows()).find(|&r| !used[r] && work.get(r, col)) else {
            continue;
        };
        used[p] = true;
        pivot_row[col] = p;
        let sp = s.get(p);
        for r in 0..w.rows() {
            if r != p && work.get(r, col) {
                work.xor_rows(r, p);
                if sp {
                    s.set(r, !s.get(r));
                }
            }
        }
    }

    let dependent_columns: Vec<usize> = (0..w.cols())
        .filter(|&c| pivot_row[c] != usize::MAX)
        .collect();
    let aa_columns: Vec<usize> = (0..w.cols())
        .filter(|&c| pivot_row[c] == usize::MAX)
        .collect();
    let rank = dependent_columns.len();

    let mut completion_matrix = BitMatrix::zeros(rank, aa_columns.len());
    let mut completion_offset = BitVec::zeros(rank);
    for (i, &c) in dependent_columns.iter().enumerate() {
        let p = pivot_row[c];
        for (j, &a) in aa_columns.iter().enumerate() {
            if work.get(p, a) {
                completion_matrix.set(i, j, true);
            }
        }
        if s.get(p) {
            completion_offset.set(i, true);
        }
    }

    // Never-pivoted rows are entirely zero after full reduction, so a
    // nonzero syndrome bit on one of them leaves the system unsolvable.
    let consistent = (0..w.rows()).all(|r| {
        if used[r] {
            true
        } else {
            debug_assert!(work.row_is_zero(r));
            !s.get(r)
        }
    });

    EliminationResult {
        rank,
        aa_columns,
        dependent_columns,
        completion_matrix,
        completion_offset,
        consistent,
    }
}

// ============================================================================
// Tests
// ============================================================================
