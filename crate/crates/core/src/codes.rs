//! LDPC code construction: quasi-cyclic expansion of degree matrices,
//! Gallager-ensemble sampling, and structural queries (girth, regularity,
//! rank).
//!
//! # Degree matrix file format
//!
//! A degree matrix is stored as plain text. The first line holds three
//! integers `rows cols lift`; each of the following `rows` lines holds
//! `cols` integers. Entry `-1` marks an all-zero block; an entry `w >= 0`
//! expands to the `lift x lift` circulant permutation that shifts the
//! identity cyclically right by `w`. Entries must be below `lift`. Lines
//! starting with `#` are comments.

use crate::gf2::BitMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodeError {
    #[error("row weight {k} must divide block length {n}")]
    BlockLengthNotDivisible { n: usize, k: usize },
    #[error("lift size {lift} must exceed the largest exponent {max_exp}")]
    LiftTooSmall { lift: usize, max_exp: i32 },
    #[error("degree matrix parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

// ============================================================================
// Degree matrix
// ============================================================================

/// Base matrix of circulant exponents for a quasi-cyclic code. `-1` denotes
/// an all-zero block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeMatrix {
    rows: usize,
    cols: usize,
    /// Lift size declared alongside the exponents.
    pub lift: usize,
    exponents: Vec<i32>,
}

impl DegreeMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        lift: usize,
        exponents: Vec<i32>,
    ) -> Result<Self, CodeError> {
        assert_eq!(
            exponents.len(),
            rows * cols,
            "exponent count must equal rows * cols"
        );
        for &e in &exponents {
            if e < -1 || e as i64 >= lift as i64 {
                return Err(CodeError::Parse {
                    line: 0,
                    reason: format!("exponent {e} outside -1..{}", lift as i64 - 1),
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            lift,
            exponents,
        })
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
    pub fn get(&self, r: usize, c: usize) -> i32 {
        self.exponents[r * self.cols + c]
    }

    /// Largest exponent; -1 when every block is zero. Any valid lift must
    /// exceed this (the declared lift always does).
    #[must_use]
    pub fn max_exponent(&self) -> i32 {
        self.exponents.iter().copied().max().unwrap_or(-1)
    }

    /// Parses the text format described in the module docs.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (line_no, header) = lines.next().ok_or(CodeError::Parse {
            line: 0,
            reason: "empty file".into(),
        })?;
        let head: Vec<&str> = header.split_whitespace().collect();
        if head.len() != 3 {
            return Err(CodeError::Parse {
                line: line_no,
                reason: "header must be `rows cols lift`".into(),
            });
        }
        let parse_usize = |s: &str, line: usize| -> Result<usize, CodeError> {
            s.parse().map_err(|_| CodeError::Parse {
                line,
                reason: format!("invalid integer `{s}`"),
            })
        };
        let rows = parse_usize(head[0], line_no)?;
        let cols = parse_usize(head[1], line_no)?;
        let lift = parse_usize(head[2], line_no)?;
        if rows == 0 || cols == 0 || lift == 0 {
            return Err(CodeError::Parse {
                line: line_no,
                reason: "rows, cols, and lift must be positive".into(),
            });
        }

        let mut exponents = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let (line_no, line) = lines.next().ok_or(CodeError::Parse {
                line: 0,
                reason: format!("expected {rows} exponent rows"),
            })?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != cols {
                return Err(CodeError::Parse {
                    line: line_no,
                    reason: format!("expected {cols} entries, found {}", entries.len()),
                });
            }
            for s in entries {
                let e: i32 = s.parse().map_err(|_| CodeError::Parse {
                    line: line_no,
                    reason: format!("invalid integer `{s}`"),
                })?;
                if e < -1 || e as i64 >= lift as i64 {
                    return Err(CodeError::Parse {
                        line: line_no,
                        reason: format!("exponent {e} outside -1..{}", lift as i64 - 1),
                    });
                }
                exponents.push(e);
            }
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(CodeError::Parse {
                line: line_no,
                reason: "trailing content after exponent rows".into(),
            });
        }
        Ok(Self {
            rows,
            cols,
            lift,
            exponents,
        })
    }

    /// Renders back to the text format; `parse` round-trips this.
    #[must_use]
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.lift);
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

// ============================================================================
// Parity-check matrix
// ============================================================================

/// Provenance of a quasi-cyclic expansion, kept for reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcMeta {
    pub base: DegreeMatrix,
    pub lift: usize,
}

/// Sparse binary parity-check matrix. Each check row is a strictly
/// ascending list of variable indices. Linearly dependent rows are retained:
/// the code dimension is `n - rank`, not `n - rows.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheck {
    n: usize,
    rows: Vec<Vec<usize>>,
    pub qc: Option<QcMeta>,
}

impl ParityCheck {
    /// Builds from per-check variable lists; lists are sorted and must not
    /// contain duplicates or out-of-range indices.
    #[must_use]
    pub fn new(n: usize, mut rows: Vec<Vec<usize>>) -> Self {
        for row in &mut rows {
            row.sort_unstable();
            assert!(
                row.windows(2).all(|w| w[0] < w[1]),
                "duplicate variable index within a check row"
            );
            assert!(row.iter().all(|&c| c < n), "variable index out of range");
        }
        Self { n, rows, qc: None }
    }

    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of check rows (including any dependent ones).
    #[must_use]
    pub fn num_checks(&self) -> usize {
        self.rows.len()
    }

    #[must_use]
    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    #[must_use]
    pub fn row(&self, r: usize) -> &[usize] {
        &self.rows[r]
    }

    /// Per-variable adjacency (which checks touch each variable).
    #[must_use]
    pub fn var_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (ci, row) in self.rows.iter().enumerate() {
            for &v in row {
                adj[v].push(ci);
            }
        }
        adj
    }

    #[must_use]
    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n];
        for row in &self.rows {
            for &v in row {
                w[v] += 1;
            }
        }
        w
    }

    #[must_use]
    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    #[must_use]
    pub fn to_bit_matrix(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows.len(), self.n);
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                m.set(r, c, true);
            }
        }
        m
    }

    /// GF(2) rank of the parity-check matrix.
    #[must_use]
    pub fn rank(&self) -> usize {
        self.to_bit_matrix().rank()
    }

    /// Code dimension `k = n - rank`.
    #[must_use]
    pub fn dimension(&self) -> usize {
        self.n - self.rank()
    }

    /// Code rate `k / n`.
    #[must_use]
    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.n as f64
    }

    /// Checks whether `word` (0/1 per variable) satisfies every row.
    #[must_use]
    pub fn is_codeword(&self, word: &[u8]) -> bool {
        assert_eq!(word.len(), self.n, "word length mismatch");
        self.rows
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &v| acc ^ word[v]) == 0)
    }
}

// ============================================================================
// Construction
// ============================================================================

/// Expands a degree matrix into a parity-check matrix with circulant
/// permutation blocks of size `lift`. Entry `w` in block `(i, j)` places a
/// one at expanded position `(i*lift + r, j*lift + (r + w) mod lift)` for
/// every `r`; entry `-1` contributes nothing.
pub fn expand_qc(base: &DegreeMatrix, lift: usize) -> Result<ParityCheck, CodeError> {
    if lift == 0 || (lift as i64) <= base.max_exponent() as i64 {
        return Err(CodeError::LiftTooSmall {
            lift,
            max_exp: base.max_exponent(),
        });
    }
    let n = base.cols() * lift;
    let mut rows = Vec::with_capacity(base.rows() * lift);
    for i in 0..base.rows() {
        for r in 0..lift {
            let mut row = Vec::new();
            for j in 0..base.cols() {
                let w = base.get(i, j);
                if w >= 0 {
                    row.push(j * lift + (r + w as usize) % lift);
                }
            }
            rows.push(row);
        }
    }
    let mut h = ParityCheck::new(n, rows);
    h.qc = Some(QcMeta {
        base: base.clone(),
        lift,
    });
    Ok(h)
}

/// Fisher-Yates shuffle of `0..n` driven by explicit 64-bit draws, so the
/// permutation for a given seed is fixed independent of library internals.
fn permutation(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        p.swap(i, j);
    }
    p
}

/// Samples a parity-check matrix from the (J, K)-regular ensemble: J strips
/// of `n / K` rows each, the first block-diagonal with K consecutive ones
/// per row, the others independent uniform column permutations of it. The
/// PRNG is ChaCha8 seeded with `seed`; identical seeds reproduce the matrix.
pub fn sample_gallager(j: usize, k: usize, n: usize, seed: u64) -> Result<ParityCheck, CodeError> {
    assert!(
        j >= 1 && k >= 1,
        "strip count and row weight must be positive"
    );
    if n == 0 || !n.is_multiple_of(k) {
        return Err(CodeError::BlockLengthNotDivisible { n, k });
    }
    let m = n / k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(j * m);
    for block in 0..m {
        rows.push((block * k..(block + 1) * k).collect::<Vec<_>>());
    }
    for _ in 1..j {
        let p = permutation(n, &mut rng);
        let mut strip = vec![Vec::with_capacity(k); m];
        for (c, &pc) in p.iter().enumerate() {
            strip[pc / k].push(c);
        }
        rows.extend(strip);
    }
    Ok(ParityCheck::new(n, rows))
}

// ============================================================================
// Structural queries
// ============================================================================

/// Average column weight, average row weight, and whether the matrix is
/// strictly regular (all column weights equal and all row weights equal).
#[must_use]
pub fn regularity(h: &ParityCheck) -> (f64, f64, bool) {
    let cw = h.col_weights();
    let rw = h.row_weights();
    let edges: usize = rw.iter().sum();
    let avg_col = edges as f64 / h.n() as f64;
    let avg_row = edges as f64 / h.num_checks().max(1) as f64;
    let regular = cw.windows(2).all(|w| w[0] == w[1]) && rw.windows(2).all(|w| w[0] == w[1]);
    (avg_col, avg_row, regular)
}

/// Girth of the Tanner graph: length of its shortest cycle (always even and
/// at least 4), or `None` when the graph is acyclic.
///
/// Runs a BFS from every variable node; the shortest cycle through the BFS
/// root is detected when a non-tree edge closes two root paths, and every
/// cycle is seen from the roots it passes through.
#[must_use]
pub fn girth(h: &ParityCheck) -> Option<usize> {
    let n = h.n();
    let r = h.num_checks();
    // Nodes 0..n are variables, n..n+r are checks.
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n + r];
    for (ci, row) in h.rows().iter().enumerate() {
        for &v in row {
            adj[v].push((n + ci) as u32);
            adj[n + ci].push(v as u32);
        }
    }

    let mut best: Option<usize> = None;
    let mut dist = vec![u32::MAX; n + r];
    let mut parent = vec![u32::MAX; n + r];
    let mut queue = std::collections::VecDeque::new();

    for start in 0..n {
        dist.fill(u32::MAX);
        parent.fill(u32::MAX);
        queue.clear();
        dist[start] = 0;
        queue.push_back(start as u32);
        while let Some(u) = queue.pop_front() {
            // No cycle through the root can still beat `best` beyond this depth.
            if let Some(b) = best {
                if (dist[u as usize] as usize) * 2 >= b {
                    break;
                }
            }
            for &w in &adj[u as usize] {
                if w == parent[u as usize] {
                    continue;
                }
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u as usize] + 1;
                    parent[w as usize] = u;
                    queue.push_back(w);
                } else {
                    let cycle = (dist[u as usize] + dist[w as usize] + 1) as usize;
                    if best.is_none_or(|b| cycle < b) {
                        best = Some(cycle);
                    }
                }
            }
        }
    }
    debug_assert!(best.is_none_or(|b| b % 2 == 0 && b >= 4));
    best
}

// ============================================================================
// Tests
// ============================================================================
