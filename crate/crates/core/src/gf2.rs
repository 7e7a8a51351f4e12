//! Dense linear algebra over GF(2).
//!
//! Vectors and matrices are stored as packed `u64` words, row-major, with the
//! bit for column `j` at position `j % 64` of word `j / 64`. Padding bits past
//! the logical length are always zero, so word-level equality and popcounts
//! can be used directly.
//!
//! Codes handled by this crate have at most 64 qubits, so most hot paths
//! operate on single words through [`BitVector::to_word`] and
//! [`RowSpace::reduce_word`]. The general multi-word layout is kept for the
//! protocol-sized registers and for tests.

use std::fmt;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// Mask with the low `bits` bits set (`bits <= 64`).
#[inline]
pub fn low_mask(bits: usize) -> u64 {
    debug_assert!(bits <= WORD_BITS);
    if bits == WORD_BITS {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector from 0/1 entries; any nonzero value counts as one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    /// Builds a vector of length `len <= 64` from the low bits of `word`.
    pub fn from_word(len: usize, word: u64) -> Self {
        assert!(len <= WORD_BITS, "from_word supports at most 64 bits, got {len}");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = word & low_mask(len);
        }
        v
    }

    /// Returns the vector as a single word. Panics if `len > 64`.
    pub fn to_word(&self) -> u64 {
        assert!(self.len <= WORD_BITS, "to_word on a {}-bit vector", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let bit = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= bit;
        } else {
            self.words[i / WORD_BITS] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot product");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| u8::from(self.get(i))).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, ")")
    }
}

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from equal-length rows. `cols` is needed when `rows` is empty.
    pub fn from_rows(cols: usize, rows: &[BitVector]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has length {} but expected {cols}", r.len());
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Builds a matrix from nested 0/1 slices. All rows must have equal length.
    pub fn from_bit_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let vecs: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bits(r.as_ref())).collect();
        Self::from_rows(cols, &vecs)
    }

    /// Builds a matrix with `cols <= 64` from one word per row.
    pub fn from_words(cols: usize, rows: &[u64]) -> Self {
        let vecs: Vec<BitVector> = rows.iter().map(|&w| BitVector::from_word(cols, w)).collect();
        Self::from_rows(cols, &vecs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        (self.data[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        let bit = 1u64 << (c % WORD_BITS);
        let w = &mut self.data[r * self.stride + c / WORD_BITS];
        if value {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        assert!(r < self.rows, "row {r} out of range");
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn row_vectors(&self) -> Vec<BitVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    /// Row `r` as a single word. Panics if `cols > 64`.
    pub fn row_word(&self, r: usize) -> u64 {
        assert!(
            self.cols <= WORD_BITS,
            "row_word on a matrix with {} columns",
            self.cols
        );
        assert!(r < self.rows, "row {r} out of range");
        if self.stride == 0 {
            0
        } else {
            self.data[r * self.stride]
        }
    }

    /// All rows as words. Panics if `cols > 64`.
    pub fn row_words64(&self) -> Vec<u64> {
        (0..self.rows).map(|r| self.row_word(r)).collect()
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Number of nonzero entries.
    pub fn nnz(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Returns a copy with column `dst` replaced by `dst ^ src`.
    pub fn col_add(&self, src: usize, dst: usize) -> BitMatrix {
        let mut out = self.clone();
        out.col_add_in_place(src, dst);
        out
    }

    pub fn col_add_in_place(&mut self, src: usize, dst: usize) {
        assert!(src < self.cols && dst < self.cols, "column index out of range");
        assert_ne!(src, dst, "col_add requires distinct columns");
        let (sw, sb) = (src / WORD_BITS, src % WORD_BITS);
        let (dw, db) = (dst / WORD_BITS, dst % WORD_BITS);
        for r in 0..self.rows {
            let base = r * self.stride;
            let bit = (self.data[base + sw] >> sb) & 1;
            self.data[base + dw] ^= bit << db;
        }
    }

    /// `row[dst] ^= row[src]`.
    pub fn row_add_in_place(&mut self, src: usize, dst: usize) {
        assert!(src < self.rows && dst < self.rows, "row index out of range");
        if src == dst {
            self.row_words_mut(dst).fill(0);
            return;
        }
        for w in 0..self.stride {
            let v = self.data[src * self.stride + w];
            self.data[dst * self.stride + w] ^= v;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// Vertical concatenation. Column counts must agree.
    pub fn stack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "column mismatch in stack");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            stride: self.stride,
            data,
        }
    }

    /// Matrix-vector product `self · v`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let parity: u32 = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if parity % 2 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Reduced row-echelon form and rank. Pivot columns increase with row index
    /// and every pivot column is zero outside its pivot row.
    pub fn rref(&self) -> (BitMatrix, usize) {
        let (m, pivots) = self.rref_with_pivots();
        (m, pivots.len())
    }

    pub fn rref_with_pivots(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == m.rows {
                break;
            }
            let Some(p) = (next..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(next, p);
            for r in 0..m.rows {
                if r != next && m.get(r, c) {
                    m.row_add_in_place(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// True iff `v` is a GF(2) combination of the rows of `self`.
    pub fn in_row_space(&self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.cols, "length mismatch in in_row_space");
        RowSpace::new(self).contains(v)
    }

    /// Basis of the right null space `{v : self · v = 0}` as rows of the result.
    pub fn kernel(&self) -> BitMatrix {
        let (r, pivots) = self.rref_with_pivots();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::zeros(self.cols);
            v.set(f, true);
            for (row, &p) in pivots.iter().enumerate() {
                if r.get(row, f) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix::from_rows(self.cols, &basis)
    }

    /// Keeps the first maximal linearly independent subset of rows, in order.
    pub fn independent_rows(&self) -> (BitMatrix, Vec<usize>) {
        let mut space = RowSpace::empty(self.cols);
        let mut kept = Vec::new();
        for r in 0..self.rows {
            if space.insert(&self.row(r)) {
                kept.push(r);
            }
        }
        let rows: Vec<BitVector> = kept.iter().map(|&r| self.row(r)).collect();
        (BitMatrix::from_rows(self.cols, &rows), kept)
    }

    /// Column permutation: column `i` of `self` becomes column `perm[i]` of the result.
    pub fn permute_columns(&self, perm: &[usize]) -> BitMatrix {
        assert_eq!(perm.len(), self.cols, "permutation length mismatch");
        let mut out = BitMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in self.row(r).iter_ones() {
                out.set(r, perm[c], true);
            }
        }
        out
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `a · bᵀ` over GF(2); shape `a.rows × b.rows`.
pub fn mat_mul_t(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    assert_eq!(a.cols, b.cols, "dimension mismatch in mat_mul_t");
    let mut out = BitMatrix::zeros(a.rows, b.rows);
    for i in 0..a.rows {
        for j in 0..b.rows {
            let parity: u32 = a
                .row_words(i)
                .iter()
                .zip(b.row_words(j))
                .map(|(x, y)| (x & y).count_ones())
                .sum();
            if parity % 2 == 1 {
                out.set(i, j, true);
            }
        }
    }
    out
}

/// A subspace held as a fully reduced echelon basis.
///
/// Reduction against the basis maps every vector to a canonical coset
/// representative (zero on all pivot columns), so membership and coset
/// equality are single reductions. The map is linear.
#[derive(Clone, Debug)]
pub struct RowSpace {
    len: usize,
    basis: Vec<BitVector>,
    pivots: Vec<usize>,
    // (pivot bit, row) pairs mirroring `basis` when len <= 64
    words: Vec<(u64, u64)>,
}

impl RowSpace {
    pub fn empty(len: usize) -> Self {
        Self {
            len,
            basis: Vec::new(),
            pivots: Vec::new(),
            words: Vec::new(),
        }
    }

    pub fn new(m: &BitMatrix) -> Self {
        let mut s = Self::empty(m.cols());
        for r in 0..m.rows() {
            s.insert(&m.row(r));
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical representative of `v + span`.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.len, "length mismatch in reduce");
        let mut out = v.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if out.get(p) {
                out.xor_assign(row);
            }
        }
        out
    }

    /// Word form of [`RowSpace::reduce`] for spaces of length at most 64.
    #[inline]
    pub fn reduce_word(&self, mut v: u64) -> u64 {
        debug_assert!(self.len <= WORD_BITS);
        for &(pivot, row) in &self.words {
            if v & pivot != 0 {
                v ^= row;
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    #[inline]
    pub fn contains_word(&self, v: u64) -> bool {
        self.reduce_word(v) == 0
    }

    /// Adds `v` to the space. Returns false if it was already contained.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.iter_ones().next() else {
            return false;
        };
        // keep the basis fully reduced: clear the new pivot from existing rows
        for row in &mut self.basis {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, r);
        if self.len <= WORD_BITS {
            self.words = self
                .basis
                .iter()
                .zip(&self.pivots)
                .map(|(row, &q)| (1u64 << q, row.to_word()))
                .collect();
        }
        true
    }

    /// The basis as a matrix in reduced echelon form.
    pub fn to_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.len, &self.basis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn steane_hx() -> BitMatrix {
        BitMatrix::from_bit_rows(&[[1, 0, 1, 0, 1, 0, 1], [0, 1, 1, 0, 0, 1, 1], [0, 0, 0, 1, 1, 1, 1]])
    }

    // exhaustive span membership, independent of any elimination
    fn span_contains(m: &BitMatrix, v: &BitVector) -> bool {
        (0u64..(1 << m.rows())).any(|mask| {
            let mut acc = BitVector::zeros(m.cols());
            for r in 0..m.rows() {
                if mask >> r & 1 == 1 {
                    acc.xor_assign(&m.row(r));
                }
            }
            &acc == v
        })
    }

    fn span_size(m: &BitMatrix) -> usize {
        let mut seen = std::collections::HashSet::new();
        for mask in 0u64..(1 << m.rows()) {
            let mut acc = BitVector::zeros(m.cols());
            for r in 0..m.rows() {
                if mask >> r & 1 == 1 {
                    acc.xor_assign(&m.row(r));
                }
            }
            seen.insert(acc);
        }
        seen.len()
    }

    #[test]
    fn col_add_examples() {
        let m = BitMatrix::from_bit_rows(&[[1, 1], [0, 1]]);
        assert_eq!(m.col_add(0, 1), BitMatrix::from_bit_rows(&[[1, 0], [0, 1]]));

        let z = BitMatrix::zeros(2, 2);
        assert_eq!(z.col_add(0, 1), z);

        let h = steane_hx().col_add(0, 2);
        assert_eq!(h.column(2).to_bits(), vec![0, 1, 0]);
        for c in [0, 1, 3, 4, 5, 6] {
            assert_eq!(h.column(c), steane_hx().column(c));
        }
    }

    #[test]
    #[should_panic]
    fn col_add_rejects_out_of_range() {
        BitMatrix::zeros(2, 2).col_add(0, 2);
    }

    #[test]
    fn rref_examples() {
        let (r, rank) = BitMatrix::identity(3).rref();
        assert_eq!(r, BitMatrix::identity(3));
        assert_eq!(rank, 3);

        let (r, rank) = BitMatrix::from_bit_rows(&[[1, 1], [1, 1]]).rref();
        assert_eq!(r, BitMatrix::from_bit_rows(&[[1, 1], [0, 0]]));
        assert_eq!(rank, 1);

        let (_, rank) = steane_hx().rref();
        assert_eq!(rank, 3);
        // 2^3 distinct combinations means three independent rows
        assert_eq!(span_size(&steane_hx()), 8);
    }

    #[test]
    fn row_space_examples() {
        let h = steane_hx();
        assert!(h.in_row_space(&BitVector::zeros(7)));
        assert!(h.in_row_space(&BitVector::from_bits(&[1, 0, 1, 0, 1, 0, 1])));
        let logical = BitVector::from_bits(&[1, 1, 1, 0, 0, 0, 0]);
        assert!(!h.in_row_space(&logical));
        assert!(!span_contains(&h, &logical));
    }

    #[test]
    fn mat_mul_t_examples() {
        let i = BitMatrix::identity(4);
        assert_eq!(mat_mul_t(&i, &i), i);
        assert!(mat_mul_t(&steane_hx(), &steane_hx()).is_zero());
        let a = BitMatrix::from_bit_rows(&[[1, 1]]);
        let b = BitMatrix::from_bit_rows(&[[1, 0]]);
        assert_eq!(mat_mul_t(&a, &b), BitMatrix::from_bit_rows(&[[1]]));
    }

    #[test]
    fn kernel_is_orthogonal_complement() {
        let h = steane_hx();
        let k = h.kernel();
        assert_eq!(k.rows(), 4);
        assert!(mat_mul_t(&h, &k).is_zero());
        assert_eq!(k.rank(), 4);
    }

    #[test]
    fn multiword_vectors() {
        let mut v = BitVector::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.weight(), 3);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        let m = BitMatrix::from_rows(130, &[v.clone()]);
        assert!(m.in_row_space(&v));
        let moved = m.col_add(129, 100);
        assert!(moved.get(0, 100));
    }

    fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
        (0..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(0u8..2, c), r).prop_map(move |rows| {
                let vecs: Vec<BitVector> = rows.iter().map(|x| BitVector::from_bits(x)).collect();
                BitMatrix::from_rows(c, &vecs)
            })
        })
    }

    proptest! {
        #[test]
        fn col_add_is_involution(m in arb_matrix(6, 10), a in 0usize..10, b in 0usize..10) {
            prop_assume!(a < m.cols() && b < m.cols() && a != b);
            prop_assert_eq!(m.col_add(a, b).col_add(a, b), m);
        }

        #[test]
        fn rref_is_idempotent(m in arb_matrix(8, 12)) {
            let (r, rank) = m.rref();
            let (rr, rank2) = r.rref();
            prop_assert_eq!(&rr, &r);
            prop_assert_eq!(rank, rank2);
            let nonzero_rows = (0..r.rows()).filter(|&i| !r.row(i).is_zero()).count();
            prop_assert_eq!(rank, nonzero_rows);
        }

        #[test]
        fn row_space_matches_enumeration(m in arb_matrix(12, 10), bits in proptest::collection::vec(0u8..2, 10)) {
            let v = BitVector::from_bits(&bits[..m.cols()]);
            prop_assert_eq!(m.in_row_space(&v), span_contains(&m, &v));
        }

        #[test]
        fn reduce_word_matches_reduce(m in arb_matrix(8, 20), w in any::<u64>()) {
            let space = RowSpace::new(&m);
            let v = BitVector::from_word(m.cols(), w);
            prop_assert_eq!(space.reduce(&v).to_word(), space.reduce_word(v.to_word()));
        }
    }
}
