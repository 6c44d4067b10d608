//! Binary linear algebra over GF(2).
//!
//! [`BinMatrix`] stores each row as packed `u64` words so that row XOR and
//! elimination run a word at a time. Parity-check matrices of the larger
//! codes handled here reach a few thousand rows by several thousand columns.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Dense bit-packed binary matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(WORD);
        BinMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from row slices of 0/1 values. Any nonzero entry is a one.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            for (j, &b) in r.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        (self.words[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        let w = &mut self.words[r * self.stride + c / WORD];
        let bit = 1u64 << (c % WORD);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of bounds");
        self.words[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    /// `row[dst] ^= row[src]`
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        if src == dst {
            self.words[dst * self.stride..(dst + 1) * self.stride].fill(0);
            return;
        }
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.words.split_at_mut(dst * s);
            (&lo[src * s..src * s + s], &mut hi[..s])
        } else {
            let (lo, hi) = self.words.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..dst * s + s])
        };
        for (d, w) in b.iter_mut().zip(a) {
            *d ^= *w;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.words.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let (x, y) = (self.get(r, a), self.get(r, b));
            if x != y {
                self.flip(r, a);
                self.flip(r, b);
            }
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Column indices of the ones in row `r`, ascending.
    pub fn row_ones(&self, r: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.row_words(r).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let t = w.trailing_zeros() as usize;
                out.push(wi * WORD + t);
                w &= w - 1;
            }
        }
        out
    }

    /// Row indices of the ones in each column.
    pub fn col_lists(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.cols];
        for r in 0..self.rows {
            for c in self.row_ones(r) {
                cols[c].push(r);
            }
        }
        cols
    }

    pub fn row_lists(&self) -> Vec<Vec<usize>> {
        (0..self.rows).map(|r| self.row_ones(r)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Reduces in place to reduced row echelon form and returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, c)) else {
                continue;
            };
            self.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && self.get(r, c) {
                    self.xor_row_into(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(32) {
            for c in 0..self.cols.min(96) {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// GF(2) rank of `m`. The input is not modified.
pub fn rank(m: &BinMatrix) -> usize {
    m.clone().rref().len()
}

/// `h · cᵀ` over GF(2).
pub fn syndrome(h: &BinMatrix, c: &[u8]) -> Result<Vec<u8>> {
    if c.len() != h.cols() {
        return Err(Error::DimensionMismatch {
            expected: h.cols(),
            got: c.len(),
        });
    }
    let packed = pack_bits(c);
    Ok((0..h.rows())
        .map(|r| parity_and(h.row_words(r), &packed))
        .collect())
}

pub(crate) fn pack_bits(bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(WORD)];
    for (i, &b) in bits.iter().enumerate() {
        if b != 0 {
            out[i / WORD] |= 1 << (i % WORD);
        }
    }
    out
}

#[inline]
fn parity_and(a: &[u64], b: &[u64]) -> u8 {
    let ones: u32 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum();
    (ones & 1) as u8
}

/// Systematic encoder derived from a parity-check matrix.
///
/// Gauss-Jordan elimination brings `h` to `[I | P]` form up to a column
/// permutation. Message bits land on the non-pivot (information) columns and
/// parity bits on the pivot columns, so codewords stay in the original column
/// order of `h`.
#[derive(Clone, Debug)]
pub struct SystematicEncoder {
    n: usize,
    k: usize,
    /// Information columns followed by pivot (parity) columns.
    column_permutation: Vec<usize>,
    /// One row per parity bit, one column per message bit.
    parity_generator: BinMatrix,
}

impl SystematicEncoder {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn column_permutation(&self) -> &[usize] {
        &self.column_permutation
    }

    pub fn parity_generator(&self) -> &BinMatrix {
        &self.parity_generator
    }

    /// Positions of the codeword that carry message bits verbatim.
    pub fn info_positions(&self) -> &[usize] {
        &self.column_permutation[..self.k]
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: message.len(),
            });
        }
        let packed = pack_bits(message);
        let mut cw = vec![0u8; self.n];
        for (j, &col) in self.info_positions().iter().enumerate() {
            cw[col] = message[j] & 1;
        }
        for (r, &col) in self.column_permutation[self.k..].iter().enumerate() {
            cw[col] = parity_and(self.parity_generator.row_words(r), &packed);
        }
        Ok(cw)
    }

    /// Reads the message back out of a codeword.
    pub fn extract(&self, codeword: &[u8]) -> Vec<u8> {
        self.info_positions().iter().map(|&c| codeword[c]).collect()
    }
}

/// Builds a systematic encoder for the null space of `h`.
///
/// Rank-deficient matrices are fine: `k = cols - rank(h)`.
pub fn make_encoder(h: &BinMatrix) -> Result<SystematicEncoder> {
    let mut red = h.clone();
    let pivots = red.rref();
    let r = pivots.len();
    let n = h.cols();
    if h.rows() == 0 || r == 0 || r >= n {
        return Err(Error::DegenerateCode { rank: r, cols: n });
    }
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let info: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let k = info.len();
    let mut gen = BinMatrix::zeros(r, k);
    for row in 0..r {
        for (j, &c) in info.iter().enumerate() {
            if red.get(row, c) {
                gen.set(row, j, true);
            }
        }
    }
    let mut perm = info;
    perm.extend_from_slice(&pivots);
    Ok(SystematicEncoder {
        n,
        k,
        column_permutation: perm,
        parity_generator: gen,
    })
}
