//! Dense bit-packed linear algebra over GF(2).
//!
//! Every map in this crate is ultimately a matrix over the two-element
//! field: addition is XOR, multiplication is AND. Rows are packed into
//! `u64` words, so elimination works a word at a time.
//!
//! Entry `(i, j)` is the coefficient of target basis element `i` in the
//! image of source basis element `j`; matrices act on column vectors.
//! Matrices with zero rows or zero columns are legal and behave as the
//! zero map.

use std::fmt;
use std::ops::{Add, Mul};

use rand::Rng;

const WORD_BITS: usize = 64;

/// A dense matrix over GF(2) with rows packed into 64-bit words.
///
/// Bits past `cols` in the last word of each row are kept zero; all
/// constructors and mutations preserve this, so whole-word operations
/// (XOR, equality, zero tests) are safe.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    /// Words per row.
    stride: usize,
    /// Row-major packed entries; bit `j % 64` of `words[i * stride + j / 64]`
    /// is entry `(i, j)`.
    words: Vec<u64>,
}

/// Result of Gauss-Jordan elimination: `transform * input = reduced`,
/// with `reduced` in reduced row-echelon form and `transform` invertible.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: BitMatrix,
    /// Pivot column indices, ascending. `pivots.len()` is the rank.
    pub pivots: Vec<usize>,
    pub transform: BitMatrix,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(WORD_BITS);
        Self {
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

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from dense 0/1 rows.
    ///
    /// Panics if the rows are ragged or contain entries other than 0 and 1;
    /// callers that parse untrusted input must check shapes first.
    pub fn from_rows(rows: &[Vec<u8>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(
                row.len(),
                cols,
                "row {i} has length {}, expected {cols}",
                row.len()
            );
            for (j, &e) in row.iter().enumerate() {
                assert!(e <= 1, "entry ({i}, {j}) is {e}, expected 0 or 1");
                if e == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| u8::from(self.get(i, j))).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// True when either dimension is zero; such a matrix is the zero map.
    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i}, {j}) out of range for {}x{}",
            self.rows,
            self.cols
        );
        (self.words[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(
            i < self.rows && j < self.cols,
            "entry ({i}, {j}) out of range for {}x{}",
            self.rows,
            self.cols
        );
        let w = i * self.stride + j / WORD_BITS;
        let bit = 1u64 << (j % WORD_BITS);
        if value {
            self.words[w] |= bit;
        } else {
            self.words[w] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        let v = self.get(i, j);
        self.set(i, j, !v);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn row_is_zero(&self, i: usize) -> bool {
        self.words[i * self.stride..(i + 1) * self.stride]
            .iter()
            .all(|&w| w == 0)
    }

    /// XORs row `src` into row `dst`.
    pub fn row_xor(&mut self, dst: usize, src: usize) {
        for w in 0..self.stride {
            let v = self.words[src * self.stride + w];
            self.words[dst * self.stride + w] ^= v;
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

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Horizontal concatenation `[self | other]`. Panics on row mismatch.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(
            self.rows, other.rows,
            "hstack: {} rows vs {}",
            self.rows, other.rows
        );
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        m.paste(0, 0, self);
        m.paste(0, self.cols, other);
        m
    }

    /// Copies `block` into this matrix with its (0,0) entry at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Self) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "paste: {}x{} block at ({r0}, {c0}) exceeds {}x{}",
            block.rows,
            block.cols,
            self.rows,
            self.cols
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                if block.get(i, j) {
                    self.set(r0 + i, c0 + j, true);
                }
            }
        }
    }

    /// Restriction to the given rows and columns, in the given order.
    pub fn submatrix(&self, keep_rows: &[usize], keep_cols: &[usize]) -> Self {
        Self::from_fn(keep_rows.len(), keep_cols.len(), |i, j| {
            self.get(keep_rows[i], keep_cols[j])
        })
    }

    /// Kronecker product; entry `((i1, i2), (j1, j2))` lands at
    /// `(i1 * other.rows + i2, j1 * other.cols + j2)`, matching the
    /// pairing order used for tensor-product basis labels.
    pub fn kronecker(&self, other: &Self) -> Self {
        let mut m = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                if self.get(i1, j1) {
                    m.paste(i1 * other.rows, j1 * other.cols, other);
                }
            }
        }
        m
    }

    /// Uniformly random matrix.
    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let mut m = Self::zeros(rows, cols);
        let tail = cols % WORD_BITS;
        let mask = if tail == 0 {
            u64::MAX
        } else {
            (1u64 << tail) - 1
        };
        for i in 0..rows {
            for w in 0..m.stride {
                let mut v: u64 = rng.random();
                if w + 1 == m.stride {
                    v &= mask;
                }
                m.words[i * m.stride + w] = v;
            }
        }
        m
    }

    /// Random invertible matrix, by rejection; over GF(2) roughly 29% of
    /// square matrices are invertible, so this terminates quickly.
    pub fn random_invertible(n: usize, rng: &mut impl Rng) -> Self {
        loop {
            let m = Self::random(n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    /// GF(2) rank via word-packed elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            for r in 0..m.rows {
                if r != rank && m.get(r, col) {
                    m.row_xor(r, rank);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Reduced row-echelon form with the recording transform.
    ///
    /// Pivots are chosen leftmost-column, topmost-row, so the output is
    /// deterministic for a given input.
    pub fn rref(&self) -> Rref {
        let mut reduced = self.clone();
        let mut transform = Self::identity(self.rows);
        let mut pivots = Vec::new();
        for col in 0..reduced.cols {
            let rank = pivots.len();
            let Some(pivot) = (rank..reduced.rows).find(|&r| reduced.get(r, col)) else {
                continue;
            };
            reduced.swap_rows(rank, pivot);
            transform.swap_rows(rank, pivot);
            for r in 0..reduced.rows {
                if r != rank && reduced.get(r, col) {
                    reduced.row_xor(r, rank);
                    transform.row_xor(r, rank);
                }
            }
            pivots.push(col);
            if pivots.len() == reduced.rows {
                break;
            }
        }
        Rref {
            reduced,
            pivots,
            transform,
        }
    }

    /// Columns form a basis of the kernel; there are `cols - rank` of them.
    pub fn kernel_basis(&self) -> Self {
        let Rref {
            reduced, pivots, ..
        } = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(self.cols, free.len());
        for (fi, &f) in free.iter().enumerate() {
            basis.set(f, fi, true);
            for (ri, &pc) in pivots.iter().enumerate() {
                if reduced.get(ri, f) {
                    basis.set(pc, fi, true);
                }
            }
        }
        basis
    }

    /// Inverse, when square and full rank.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let r = self.rref();
        (r.pivots.len() == self.rows).then_some(r.transform)
    }

    /// True iff the column spans coincide as subspaces of the common
    /// target space. Panics if the row counts differ.
    pub fn column_space_equal(&self, other: &Self) -> bool {
        assert_eq!(
            self.rows, other.rows,
            "column_space_equal: ambient dimensions differ ({} vs {})",
            self.rows, other.rows
        );
        let ra = self.rank();
        let rb = other.rank();
        ra == rb && self.hstack(other).rank() == ra
    }
}

impl Mul for &BitMatrix {
    type Output = BitMatrix;

    fn mul(self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "dimension mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            if self.row_is_zero(i) {
                continue;
            }
            for j in 0..self.cols {
                if self.get(i, j) {
                    for w in 0..rhs.stride {
                        let v = rhs.words[j * rhs.stride + w];
                        out.words[i * out.stride + w] ^= v;
                    }
                }
            }
        }
        out
    }
}

impl Add for &BitMatrix {
    type Output = BitMatrix;

    fn add(self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "dimension mismatch: {}x{} + {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(rhs.words.iter()) {
            *a ^= b;
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{})", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "\n  ")?;
            for j in 0..self.cols {
                write!(f, "{}", u8::from(self.get(i, j)))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                write!(f, "{}", u8::from(self.get(i, j)))?;
            }
            if i + 1 < self.rows {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Plain `Vec<Vec<u8>>` Gaussian elimination, kept independent of the
    /// packed implementation it checks.
    #[allow(clippy::needless_range_loop)]
    fn naive_rank(m: &[Vec<u8>]) -> usize {
        let mut m = m.to_vec();
        let rows = m.len();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..rows).find(|&r| m[r][c] == 1) {
                m.swap(rank, p);
                for r in 0..rows {
                    if r != rank && m[r][c] == 1 {
                        for cc in 0..cols {
                            m[r][cc] ^= m[rank][cc];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn rank_identity() {
        assert_eq!(BitMatrix::identity(3).rank(), 3);
    }

    #[test]
    fn rank_zero_map() {
        assert_eq!(BitMatrix::zeros(2, 5).rank(), 0);
    }

    #[test]
    fn rank_equal_rows() {
        let m = BitMatrix::from_rows(&[vec![1, 1], vec![1, 1]], 2);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn rank_matches_naive_oracle() {
        let mut r = rng(7);
        for _ in 0..200 {
            let m = BitMatrix::random(6, 6, &mut r);
            assert_eq!(m.rank(), naive_rank(&m.to_rows()));
        }
    }

    #[test]
    fn rref_identity() {
        let r = BitMatrix::identity(4).rref();
        assert_eq!(r.reduced, BitMatrix::identity(4));
        assert_eq!(r.pivots, vec![0, 1, 2, 3]);
        assert_eq!(r.transform, BitMatrix::identity(4));
    }

    #[test]
    fn rref_zero() {
        let r = BitMatrix::zeros(3, 2).rref();
        assert!(r.reduced.is_zero());
        assert!(r.pivots.is_empty());
        assert_eq!(r.transform, BitMatrix::identity(3));
    }

    #[test]
    fn rref_transform_recomputes_reduced() {
        let mut r = rng(11);
        for _ in 0..100 {
            let m = BitMatrix::random(5, 7, &mut r);
            let out = m.rref();
            assert_eq!(&out.transform * &m, out.reduced);
            assert_eq!(out.transform.rank(), m.rows());
        }
    }

    #[test]
    fn kernel_identity_is_empty() {
        let k = BitMatrix::identity(4).kernel_basis();
        assert_eq!((k.rows(), k.cols()), (4, 0));
    }

    #[test]
    fn kernel_zero_is_full() {
        let k = BitMatrix::zeros(3, 3).kernel_basis();
        assert_eq!(k.cols(), 3);
        assert_eq!(k.rank(), 3);
    }

    #[test]
    fn kernel_fuzz() {
        let mut r = rng(13);
        for _ in 0..100 {
            let m = BitMatrix::random(4, 9, &mut r);
            let k = m.kernel_basis();
            assert_eq!(k.cols(), m.cols() - m.rank());
            assert!((&m * &k).is_zero());
            assert_eq!(k.rank(), k.cols(), "kernel columns must be independent");
        }
    }

    #[test]
    fn multiply_identity() {
        let mut r = rng(17);
        let m = BitMatrix::random(4, 6, &mut r);
        assert_eq!(&BitMatrix::identity(4) * &m, m);
        assert_eq!(&m * &BitMatrix::identity(6), m);
    }

    #[test]
    fn add_self_is_zero() {
        let mut r = rng(19);
        let m = BitMatrix::random(5, 5, &mut r);
        assert!((&m + &m).is_zero());
    }

    #[test]
    fn column_space_equal_basic() {
        let a = BitMatrix::from_rows(&[vec![1], vec![0]], 1);
        assert!(a.column_space_equal(&a));
        let b = BitMatrix::from_rows(&[vec![0], vec![1]], 1);
        assert!(!a.column_space_equal(&b));
        // Same span, different generating sets.
        let c = BitMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 1]], 3);
        let d = BitMatrix::from_rows(&[vec![1, 1], vec![1, 0]], 2);
        assert!(c.column_space_equal(&d));
    }

    #[test]
    fn empty_matrices_behave() {
        let e = BitMatrix::zeros(0, 4);
        assert_eq!(e.rank(), 0);
        assert_eq!(e.kernel_basis().cols(), 4);
        let f = BitMatrix::zeros(4, 0);
        assert_eq!(f.rank(), 0);
        assert_eq!((&e * &f).rows(), 0);
        let g = &BitMatrix::zeros(3, 0) * &BitMatrix::zeros(0, 2);
        assert!(g.is_zero());
        assert_eq!((g.rows(), g.cols()), (3, 2));
    }

    #[test]
    fn inverse_roundtrip() {
        let mut r = rng(23);
        for n in [1usize, 2, 5, 9] {
            let m = BitMatrix::random_invertible(n, &mut r);
            let inv = m.inverse().expect("full rank");
            assert_eq!(&inv * &m, BitMatrix::identity(n));
            assert_eq!(&m * &inv, BitMatrix::identity(n));
        }
    }

    #[test]
    fn kronecker_identity() {
        let a = BitMatrix::identity(2);
        let b = BitMatrix::identity(3);
        assert_eq!(a.kronecker(&b), BitMatrix::identity(6));
    }

    #[test]
    fn word_boundary_entries() {
        let mut m = BitMatrix::zeros(2, 130);
        m.set(0, 63, true);
        m.set(0, 64, true);
        m.set(1, 129, true);
        assert_eq!(m.rank(), 2);
        let t = m.transpose();
        assert!(t.get(64, 0) && t.get(63, 0) && t.get(129, 1));
        assert_eq!(t.transpose(), m);
    }

    fn arb_matrix(max: usize) -> impl Strategy<Value = BitMatrix> {
        (0..=max, 0..=max, any::<u64>())
            .prop_map(|(r, c, seed)| BitMatrix::random(r, c, &mut rng(seed)))
    }

    proptest! {
        #[test]
        fn prop_rank_transpose(m in arb_matrix(10)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn prop_rank_nullity(m in arb_matrix(10)) {
            prop_assert_eq!(m.rank() + m.kernel_basis().cols(), m.cols());
        }

        #[test]
        fn prop_rank_of_product(seed in any::<u64>(), a in 0usize..8, b in 0usize..8, c in 0usize..8) {
            let mut r = rng(seed);
            let m = BitMatrix::random(a, b, &mut r);
            let n = BitMatrix::random(b, c, &mut r);
            let p = &m * &n;
            prop_assert!(p.rank() <= m.rank().min(n.rank()));
        }

        #[test]
        fn prop_rref_idempotent(m in arb_matrix(8)) {
            let once = m.rref().reduced;
            let twice = once.rref().reduced;
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn prop_packed_rank_matches_naive(m in arb_matrix(12)) {
            prop_assert_eq!(m.rank(), super::tests::naive_rank(&m.to_rows()));
        }
    }
}
