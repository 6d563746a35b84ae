//! Dense GF(2) matrices, bit-packed 64 columns per word.
//!
//! Everything here is defined purely mod 2; the packing is an implementation
//! detail. Sizes stay small (code tables, syndrome matrices), so all
//! algorithms favour being exhaustive and auditable over being clever.

use crate::error::{Error, Result};
use std::fmt;

/// Hard cap on `min_weight` enumeration: 2^k codewords are visited.
pub const MIN_WEIGHT_MAX_RANK: usize = 24;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(WORD_BITS)
}

/// A rows×cols matrix over GF(2). Rows are contiguous runs of `u64` words,
/// bit `c % 64` of word `c / 64` holding column `c`.
#[derive(Clone, PartialEq, Eq)]
pub struct BinMatrix {
    rows: usize,
    cols: usize,
    wpr: usize,
    data: Vec<u64>,
}

impl BinMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let wpr = words_for(cols);
        BinMatrix {
            rows,
            cols,
            wpr,
            data: vec![0; rows * wpr],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from explicit 0/1 rows. All rows must share a length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Malformed("ragged rows".into()));
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                if b > 1 {
                    return Err(Error::Malformed(format!("entry {b} is not 0/1")));
                }
                m.set(i, j, b == 1);
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
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.wpr + c / WORD_BITS] >> (c % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.wpr + c / WORD_BITS];
        let mask = 1u64 << (c % WORD_BITS);
        if v {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.wpr..(r + 1) * self.wpr]
    }

    pub fn row(&self, r: usize) -> BinVec {
        BinVec {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn set_row(&mut self, r: usize, v: &BinVec) {
        assert_eq!(v.len, self.cols);
        self.data[r * self.wpr..(r + 1) * self.wpr].copy_from_slice(&v.words);
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (a, b) = (dst * self.wpr, src * self.wpr);
        for k in 0..self.wpr {
            let v = self.data[b + k];
            self.data[a + k] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.wpr {
            self.data.swap(a * self.wpr + k, b * self.wpr + k);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix product mod 2.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}×{} · {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let (o, s) = (r * out.wpr, k * other.wpr);
                    for w in 0..other.wpr {
                        out.data[o + w] ^= other.data[s + w];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let mut out = Self::zeros(self.rows + other.rows, self.cols);
        out.data[..self.data.len()].copy_from_slice(&self.data);
        out.data[self.data.len()..].copy_from_slice(&other.data);
        Ok(out)
    }

    /// Place `other` to the right of `self`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form with rank and pivot columns.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.swap_rows(r, p);
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.xor_rows(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel {v : A·vᵀ = 0}, one basis vector per row.
    /// Row count is always cols − rank.
    pub fn nullspace(&self) -> Self {
        let Rref { matrix, pivots } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(free.len(), self.cols);
        for (bi, &f) in free.iter().enumerate() {
            basis.set(bi, f, true);
            for (ri, &p) in pivots.iter().enumerate() {
                if matrix.get(ri, f) {
                    basis.set(bi, p, true);
                }
            }
        }
        basis
    }

    /// Minimum Hamming weight over the nonzero span of the rows, by Gray-code
    /// walk over all 2^rank combinations. Exact; errors out above
    /// [`MIN_WEIGHT_MAX_RANK`] independent rows, and on a zero row space.
    pub fn min_weight(&self) -> Result<usize> {
        let rref = self.rref();
        let k = rref.pivots.len();
        if k == 0 {
            return Err(Error::Malformed("zero row space has no distance".into()));
        }
        if k > MIN_WEIGHT_MAX_RANK {
            return Err(Error::Capacity(format!(
                "min_weight needs 2^{k} codewords, cap is 2^{MIN_WEIGHT_MAX_RANK}"
            )));
        }
        let basis: Vec<Vec<u64>> = (0..k).map(|i| rref.matrix.row_words(i).to_vec()).collect();
        let mut acc = vec![0u64; self.wpr];
        let mut best = usize::MAX;
        // Gray code: combination g(i) = i ^ (i >> 1); step i flips trailing_zeros(i).
        for i in 1u64..(1u64 << k) {
            let flip = i.trailing_zeros() as usize;
            for (a, b) in acc.iter_mut().zip(&basis[flip]) {
                *a ^= b;
            }
            let w: usize = acc.iter().map(|w| w.count_ones() as usize).sum();
            if w < best {
                best = w;
                if best == 1 {
                    break;
                }
            }
        }
        Ok(best)
    }

    /// True iff every nonempty set of at most `w` columns is linearly
    /// independent (no such set XORs to the zero column).
    pub fn cols_independent_up_to(&self, w: usize) -> bool {
        assert!(w <= self.cols, "w exceeds column count");
        if w == 0 {
            return true;
        }
        let t = self.transpose();
        let cols: Vec<Vec<u64>> = (0..t.rows).map(|r| t.row_words(r).to_vec()).collect();
        let mut acc = vec![0u64; t.wpr];
        let mut chosen = Vec::with_capacity(w);
        subsets_dependent(&cols, &mut acc, &mut chosen, 0, w)
            .is_none()
    }

    /// Parse the plain-text format: one row per line, whitespace-separated
    /// 0/1 tokens, `#` starting a comment that runs to end of line. A row may
    /// also be written without separators (`1011`). Blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<u8>> = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<u8> = if line.contains(char::is_whitespace) {
                line.split_whitespace()
                    .map(|tok| match tok {
                        "0" => Ok(0),
                        "1" => Ok(1),
                        other => Err(Error::Malformed(format!("bad token '{other}'"))),
                    })
                    .collect::<Result<_>>()?
            } else {
                line.chars()
                    .map(|ch| match ch {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(Error::Malformed(format!("bad character '{other}'"))),
                    })
                    .collect::<Result<_>>()?
            };
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Malformed("no matrix rows in input".into()));
        }
        Self::from_rows(&rows)
    }

    /// Inverse of [`from_text`]: space-separated tokens, no comments.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    out.push(' ');
                }
                out.push(if self.get(r, c) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// Depth-first search for a dependent column subset of size ≤ w; returns the
/// indices if one exists.
fn subsets_dependent(
    cols: &[Vec<u64>],
    acc: &mut Vec<u64>,
    chosen: &mut Vec<usize>,
    start: usize,
    w: usize,
) -> Option<Vec<usize>> {
    for j in start..cols.len() {
        for (a, b) in acc.iter_mut().zip(&cols[j]) {
            *a ^= b;
        }
        chosen.push(j);
        if acc.iter().all(|&x| x == 0) {
            return Some(chosen.clone());
        }
        if chosen.len() < w {
            if let Some(hit) = subsets_dependent(cols, acc, chosen, j + 1, w) {
                return Some(hit);
            }
        }
        chosen.pop();
        for (a, b) in acc.iter_mut().zip(&cols[j]) {
            *a ^= b;
        }
    }
    None
}

impl fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinMatrix {}×{}", self.rows, self.cols)?;
        f.write_str(&self.to_text())
    }
}

/// Row-reduced form: `matrix` is the RREF, `pivots` its pivot columns in
/// increasing order (so rank = pivots.len()).
pub struct Rref {
    pub matrix: BinMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Membership of `v` in the row space: reduce against the RREF rows.
    pub fn contains(&self, v: &BinVec) -> bool {
        assert_eq!(v.len, self.matrix.cols);
        let mut v = v.clone();
        for (i, &p) in self.pivots.iter().enumerate() {
            if v.get(p) {
                v.xor_assign(&self.matrix.row(i));
            }
        }
        v.is_zero()
    }
}

/// A length-n GF(2) vector with the same packing as a matrix row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinVec {
    len: usize,
    words: Vec<u64>,
}

impl BinVec {
    pub fn zeros(len: usize) -> Self {
        BinVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if v {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Concatenate two vectors (used to build (z|x) symplectic rows).
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in 0..self.len {
            if self.get(i) {
                out.set(i, true);
            }
        }
        for i in 0..other.len {
            if other.get(i) {
                out.set(self.len + i, true);
            }
        }
        out
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        let mut out = Self::zeros(range.len());
        for (k, i) in range.enumerate() {
            if self.get(i) {
                out.set(k, true);
            }
        }
        out
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

impl fmt::Debug for BinVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming3() -> BinMatrix {
        // columns are the binary representations of 1..7
        BinMatrix::from_rows(&[
            vec![0, 0, 0, 1, 1, 1, 1],
            vec![0, 1, 1, 0, 0, 1, 1],
            vec![1, 0, 1, 0, 1, 0, 1],
        ])
        .unwrap()
    }

    #[test]
    fn rref_identity() {
        let id = BinMatrix::identity(4);
        let r = id.rref();
        assert_eq!(r.rank(), 4);
        assert_eq!(r.matrix, id);
    }

    #[test]
    fn rref_zero() {
        let z = BinMatrix::zeros(3, 5);
        let r = z.rref();
        assert_eq!(r.rank(), 0);
        assert!(r.matrix.is_zero());
    }

    #[test]
    fn rref_hamming_rank() {
        assert_eq!(hamming3().rank(), 3);
    }

    #[test]
    fn nullspace_identity_empty() {
        assert_eq!(BinMatrix::identity(5).nullspace().rows(), 0);
    }

    #[test]
    fn nullspace_parity_pair() {
        let m = BinMatrix::from_rows(&[vec![1, 1]]).unwrap();
        let n = m.nullspace();
        assert_eq!(n.rows(), 1);
        assert!(n.get(0, 0) && n.get(0, 1));
    }

    #[test]
    fn nullspace_hamming() {
        let h = hamming3();
        let n = h.nullspace();
        assert_eq!(n.rows(), 4);
        assert!(h.mul(&n.transpose()).unwrap().is_zero());
    }

    #[test]
    fn min_weight_single_row() {
        let m = BinMatrix::from_rows(&[vec![1, 1, 1]]).unwrap();
        assert_eq!(m.min_weight().unwrap(), 3);
    }

    #[test]
    fn min_weight_hamming_code() {
        // generator of the [7,4] Hamming code = nullspace of its check matrix
        let g = hamming3().nullspace();
        assert_eq!(g.min_weight().unwrap(), 3);
    }

    #[test]
    fn min_weight_rejects_zero_space() {
        let z = BinMatrix::zeros(2, 4);
        assert!(z.min_weight().is_err());
    }

    #[test]
    fn cols_independent_identity() {
        let id = BinMatrix::identity(6);
        for w in 0..=6 {
            assert!(id.cols_independent_up_to(w));
        }
    }

    #[test]
    fn cols_independent_zero_column() {
        let m = BinMatrix::from_rows(&[vec![1, 0], vec![0, 0]]).unwrap();
        assert!(!m.cols_independent_up_to(1));
    }

    #[test]
    fn cols_independent_hamming() {
        let h = hamming3();
        assert!(h.cols_independent_up_to(2));
        assert!(!h.cols_independent_up_to(3)); // cols 1 ⊕ 2 ⊕ 3 = 0
    }

    #[test]
    fn text_round_trip() {
        let m = hamming3();
        let again = BinMatrix::from_text(&m.to_text()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn text_comments_and_compact_rows() {
        let m = BinMatrix::from_text("# header\n101 # trailing\n011\n").unwrap();
        assert_eq!(m.rows(), 2);
        assert!(m.get(0, 0) && !m.get(0, 1) && m.get(0, 2));
        let compact = BinMatrix::from_text("101\n011\n").unwrap();
        assert_eq!(m, compact);
    }

    #[test]
    fn text_rejects_garbage() {
        assert!(BinMatrix::from_text("1 2 0\n").is_err());
        assert!(BinMatrix::from_text("10\n101\n").is_err());
        assert!(BinMatrix::from_text("# only comments\n").is_err());
    }

    #[test]
    fn rref_membership() {
        let m = BinMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let r = m.rref();
        let mut v = BinVec::zeros(3);
        v.set(0, true);
        v.set(2, true); // 101 = 110 ⊕ 011
        assert!(r.contains(&v));
        assert!(!r.contains(&BinVec::unit(3, 0)));
    }
}
