//! Exact linear algebra over the two-element field.
//!
//! Vectors and matrix rows are packed into `u64` words; elimination is
//! word-parallel XOR. Subspaces are kept in reduced row-echelon form with the
//! pivot of a row being its lowest set index, so two subspaces are equal
//! exactly when their stored bases are equal.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector of `len` elements of F2.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct F2Vector {
    len: usize,
    words: Vec<u64>,
}

impl F2Vector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    /// Builds a vector whose coordinate `i` is bit `i` of `bits`.
    pub fn from_u64(len: usize, bits: u64) -> Self {
        assert!(len <= WORD, "from_u64 needs len <= 64, got {len}");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = bits & low_mask(len);
        }
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    /// Integer value of the bit pattern; only defined for `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD, "to_u64 needs len <= 64, got {}", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
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
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let t = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    /// Standard dot product over F2.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors of different length");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of vectors of different length");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Coordinates `start..start+len`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len);
        let mut out = Self::zeros(len);
        for i in self.ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }
}

fn low_mask(len: usize) -> u64 {
    if len >= WORD {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Orders by length, then by the integer value of the bit pattern
/// (coordinate `i` has weight `2^i`).
impl Ord for F2Vector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for F2Vector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// A `rows × cols` matrix over F2, stored as packed rows.
///
/// Linear maps use the column convention: the matrix of `f: F2^n → F2^m` is
/// `m × n` and column `j` is `f(e_j)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<F2Vector>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![F2Vector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<F2Vector>, cols: usize) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length does not match column count");
        }
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[F2Vector], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length does not match row count");
            for i in c.ones() {
                m.data[i].set(j, true);
            }
        }
        m
    }

    pub fn from_bits(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(rows.iter().map(|r| F2Vector::from_bits(r)).collect(), cols)
    }

    pub fn to_bits(&self) -> Vec<Vec<u8>> {
        self.data.iter().map(F2Vector::to_bits).collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value);
    }

    pub fn row(&self, i: usize) -> &F2Vector {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[F2Vector] {
        &self.data
    }

    pub fn column(&self, j: usize) -> F2Vector {
        let mut c = F2Vector::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn columns(&self) -> Vec<F2Vector> {
        self.transpose().data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F2Vector::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.rows)
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "cannot multiply {}x{} by {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc = F2Vector::zeros(other.cols);
                for k in r.ones() {
                    acc.xor_assign(&other.data[k]);
                }
                acc
            })
            .collect();
        Self {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &F2Vector) -> F2Vector {
        assert_eq!(self.cols, v.len(), "matrix/vector shape mismatch");
        let mut out = F2Vector::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.xor(b))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Kronecker product; index `(i, k)` of the result is `i * other.rows + k`.
    pub fn kronecker(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = Vec::with_capacity(rows);
        for a in &self.data {
            for b in &other.data {
                let mut r = F2Vector::zeros(cols);
                for j in a.ones() {
                    for l in b.ones() {
                        r.set(j * other.cols + l, true);
                    }
                }
                data.push(r);
            }
        }
        Self { rows, cols, data }
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols);
        for r in &self.data {
            e.insert(r.clone());
        }
        e.rank()
    }

    pub fn row_space(&self) -> Subspace {
        Subspace::span(self.data.iter().cloned(), self.cols)
    }

    pub fn column_space(&self) -> Subspace {
        self.transpose().row_space()
    }

    /// Basis of `{v : self · v = 0}`.
    pub fn kernel_basis(&self) -> Subspace {
        let rref = self.row_space();
        let mut pivot_of = vec![None; self.cols];
        for (r, &p) in rref.pivots.iter().enumerate() {
            pivot_of[p] = Some(r);
        }
        let vectors = (0..self.cols).filter(|&f| pivot_of[f].is_none()).map(|f| {
            let mut v = F2Vector::unit(self.cols, f);
            for (row, &p) in rref.basis.iter().zip(&rref.pivots) {
                if row.get(f) {
                    v.set(p, true);
                }
            }
            v
        });
        Subspace::span(vectors, self.cols)
    }

    /// Some `x` with `self · x = b`.
    pub fn solve(&self, b: &F2Vector) -> Option<F2Vector> {
        assert_eq!(b.len(), self.rows);
        // Row-reduce [A | b] while tracking which original rows were combined.
        let mut map = SpanMap::new(self.cols, 1);
        for (i, r) in self.data.iter().enumerate() {
            let _ = map.insert(r.clone(), F2Vector::from_u64(1, b.get(i) as u64));
        }
        if !map.consistent {
            return None;
        }
        // Particular solution: set pivot variables from the reduced rows.
        let mut x = F2Vector::zeros(self.cols);
        for (row, img) in map.rows.iter().zip(&map.images) {
            if img.get(0) {
                x.set(row.first_one().expect("nonzero row"), true);
            }
        }
        (self.mul_vec(&x) == *b).then_some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut map = SpanMap::new(n, n);
        for (i, r) in self.data.iter().enumerate() {
            map.insert(r.clone(), F2Vector::unit(n, i)).ok()?;
        }
        if map.rank() != n {
            return None;
        }
        // Row r of A^{-1}·A = e_r, so row r of the inverse is the combination of
        // rows of A producing e_r: read it off the tracked images.
        let rows = (0..n)
            .map(|r| map.eval(&F2Vector::unit(n, r)).expect("full rank"))
            .collect();
        // rows[r] = c with c·A = e_r, i.e. row r of A^{-1}.
        Some(Self::from_rows(rows, n))
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// Incremental reduced row-echelon basis.
#[derive(Clone, Debug)]
pub struct Echelon {
    n: usize,
    rows: Vec<F2Vector>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.n
    }

    fn reduce(&self, v: &mut F2Vector) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut v: F2Vector) -> bool {
        assert_eq!(v.len(), self.n, "vector does not live in the ambient space");
        if self.is_full() {
            return false;
        }
        self.reduce(&mut v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        let mut v = v.clone();
        self.reduce(&mut v);
        v.is_zero()
    }

    pub fn into_subspace(self) -> Subspace {
        let mut pairs: Vec<_> = self.pivots.into_iter().zip(self.rows).collect();
        pairs.sort_by_key(|(p, _)| *p);
        let (pivots, basis) = pairs.into_iter().unzip();
        Subspace {
            ambient_dim: self.n,
            basis,
            pivots,
        }
    }
}

/// A linear map defined on the span of a set of generators, built by
/// recording `generator ↦ image` pairs and row-reducing them together.
///
/// Inserting a generator that is already in the span but whose image
/// disagrees with the value forced by earlier generators marks the map as
/// inconsistent: the prescribed assignment is not well defined.
#[derive(Clone, Debug)]
pub struct SpanMap {
    n: usize,
    m: usize,
    rows: Vec<F2Vector>,
    images: Vec<F2Vector>,
    pivots: Vec<usize>,
    consistent: bool,
}

impl SpanMap {
    pub fn new(source_dim: usize, target_dim: usize) -> Self {
        Self {
            n: source_dim,
            m: target_dim,
            rows: Vec::new(),
            images: Vec::new(),
            pivots: Vec::new(),
            consistent: true,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Records `v ↦ image`. Errors if this contradicts earlier records.
    pub fn insert(&mut self, mut v: F2Vector, mut image: F2Vector) -> Result<bool> {
        assert_eq!(v.len(), self.n);
        assert_eq!(image.len(), self.m);
        for ((row, img), &p) in self.rows.iter().zip(&self.images).zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
                image.xor_assign(img);
            }
        }
        let Some(p) = v.first_one() else {
            if image.is_zero() {
                return Ok(false);
            }
            self.consistent = false;
            return Err(Error::NotWellDefined(
                "generator relation does not hold on images".into(),
            ));
        };
        for (row, img) in self.rows.iter_mut().zip(self.images.iter_mut()) {
            if row.get(p) {
                row.xor_assign(&v);
                img.xor_assign(&image);
            }
        }
        self.rows.push(v);
        self.images.push(image);
        self.pivots.push(p);
        Ok(true)
    }

    /// Image of `u`, or `None` when `u` is outside the span of the generators.
    pub fn eval(&self, u: &F2Vector) -> Option<F2Vector> {
        let mut u = u.clone();
        let mut out = F2Vector::zeros(self.m);
        for ((row, img), &p) in self.rows.iter().zip(&self.images).zip(&self.pivots) {
            if u.get(p) {
                u.xor_assign(row);
                out.xor_assign(img);
            }
        }
        u.is_zero().then_some(out)
    }

    pub fn domain(&self) -> Subspace {
        Subspace::span(self.rows.iter().cloned(), self.n)
    }
}

/// A subspace of `F2^ambient_dim`, stored as a reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<F2Vector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: (0..ambient_dim)
                .map(|i| F2Vector::unit(ambient_dim, i))
                .collect(),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn span(vectors: impl IntoIterator<Item = F2Vector>, ambient_dim: usize) -> Self {
        let mut e = Echelon::new(ambient_dim);
        for v in vectors {
            e.insert(v);
        }
        e.into_subspace()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[F2Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// The basis as the rows of a `dim × ambient_dim` matrix.
    pub fn basis_matrix(&self) -> F2Matrix {
        F2Matrix::from_rows(self.basis.clone(), self.ambient_dim)
    }

    pub fn non_pivots(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient_dim];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient_dim).filter(|&i| !is_pivot[i]).collect()
    }

    /// `v` minus its component in this subspace along the pivot coordinates;
    /// the result vanishes on every pivot column.
    pub fn reduce(&self, v: &F2Vector) -> F2Vector {
        let mut v = v.clone();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Coefficients of `v` in the stored basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &F2Vector) -> Option<F2Vector> {
        let mut c = F2Vector::zeros(self.dim());
        let mut rest = v.clone();
        for (k, (row, &p)) in self.basis.iter().zip(&self.pivots).enumerate() {
            if rest.get(p) {
                rest.xor_assign(row);
                c.set(k, true);
            }
        }
        rest.is_zero().then_some(c)
    }

    /// Linear combination of the basis with the given coefficients.
    pub fn combine(&self, coefficients: &F2Vector) -> F2Vector {
        assert_eq!(coefficients.len(), self.dim());
        let mut v = F2Vector::zeros(self.ambient_dim);
        for k in coefficients.ones() {
            v.xor_assign(&self.basis[k]);
        }
        v
    }

    /// Coordinates of the class of `v` in the quotient by this subspace,
    /// using the non-pivot standard basis vectors as coset representatives.
    pub fn quotient_coordinates(&self, v: &F2Vector) -> F2Vector {
        let r = self.reduce(v);
        let np = self.non_pivots();
        let mut out = F2Vector::zeros(np.len());
        for (k, &i) in np.iter().enumerate() {
            if r.get(i) {
                out.set(k, true);
            }
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        Self::span(
            self.basis.iter().chain(&other.basis).cloned(),
            self.ambient_dim,
        )
    }

    pub fn intersection(&self, other: &Self) -> Self {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        // x = Σ a_i s_i = Σ b_j t_j  ⇔  (a, b) in the kernel of [S^T | T^T].
        let cols: Vec<F2Vector> = self.basis.iter().chain(&other.basis).cloned().collect();
        let m = F2Matrix::from_columns(&cols, self.ambient_dim);
        let k = m.kernel_basis();
        let vectors = k.basis.iter().map(|c| {
            let a = c.slice(0, self.dim());
            self.combine(&a)
        });
        Self::span(vectors, self.ambient_dim)
    }

    /// Every vector of the subspace, in the order of its coefficient vectors.
    pub fn elements(&self) -> Vec<F2Vector> {
        assert!(self.dim() < 32, "refusing to list 2^{} vectors", self.dim());
        (0u64..(1u64 << self.dim()))
            .map(|c| self.combine(&F2Vector::from_u64(self.dim(), c)))
            .collect()
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}: ", self.dim(), self.ambient_dim)?;
        f.debug_list().entries(&self.basis).finish()?;
        write!(f, ")")
    }
}

/// Row-reduced basis of bit-vectors of length at most 64, each row carrying
/// a tag that is combined along with it. Tags let the same structure solve
/// linear systems and track change-of-basis data.
#[derive(Clone, Debug, Default)]
pub struct Echelon64 {
    rows: Vec<u64>,
    tags: Vec<u64>,
}

impl Echelon64 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn tags(&self) -> &[u64] {
        &self.tags
    }

    /// Residue of `v` after elimination and the accumulated tag.
    #[inline]
    pub fn reduce(&self, mut v: u64, mut tag: u64) -> (u64, u64) {
        for (&row, &t) in self.rows.iter().zip(&self.tags) {
            if v & (row & row.wrapping_neg()) != 0 {
                v ^= row;
                tag ^= t;
            }
        }
        (v, tag)
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v, 0).0 == 0
    }

    /// Adds `v` (tagged) to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: u64, tag: u64) -> bool {
        let (v, tag) = self.reduce(v, tag);
        if v == 0 {
            return false;
        }
        let low = v & v.wrapping_neg();
        for (row, t) in self.rows.iter_mut().zip(self.tags.iter_mut()) {
            if *row & low != 0 {
                *row ^= v;
                *t ^= tag;
            }
        }
        self.rows.push(v);
        self.tags.push(tag);
        true
    }

    /// The tag of `v` as a combination of inserted rows, if `v` is in the span.
    pub fn eval(&self, v: u64) -> Option<u64> {
        let (r, t) = self.reduce(v, 0);
        (r == 0).then_some(t)
    }
}

/// Solutions `w ∈ F2^n` of the system `popcount(a_j & w) ≡ c_j (mod 2)`.
///
/// Returns a particular solution and a basis of the homogeneous solutions,
/// or `None` if the system is inconsistent.
pub fn solve_dot_system(constraints: &[(u64, bool)], n: usize) -> Option<(u64, Vec<u64>)> {
    let mut e = Echelon64::new();
    for &(a, c) in constraints {
        let (r, t) = e.reduce(a, c as u64);
        if r == 0 {
            if t != 0 {
                return None;
            }
            continue;
        }
        e.insert(a, c as u64);
    }
    let mut particular = 0u64;
    let mut pivot_mask = 0u64;
    for (&row, &t) in e.rows.iter().zip(&e.tags) {
        let p = row.trailing_zeros();
        pivot_mask |= 1 << p;
        if t & 1 == 1 {
            particular |= 1 << p;
        }
    }
    let kernel = (0..n)
        .filter(|&f| pivot_mask >> f & 1 == 0)
        .map(|f| {
            let mut v = 1u64 << f;
            for &row in &e.rows {
                if row >> f & 1 == 1 {
                    v |= row & row.wrapping_neg();
                }
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Number of `k`-dimensional subspaces of `F2^n`.
pub fn gaussian_binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= (1u128 << (n - i)) - 1;
        den *= (1u128 << (i + 1)) - 1;
    }
    num / den
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..k).rev().find(|&i| c[i] != i + n - k) else {
            return out;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Position of the sorted subset `s` in the lexicographic list `k_subsets(n, s.len())`.
pub fn subset_rank(n: usize, s: &[usize]) -> usize {
    let k = s.len();
    let mut rank = 0;
    let mut prev = 0;
    for (i, &c) in s.iter().enumerate() {
        for j in prev..c {
            rank += binomial(n - 1 - j, k - 1 - i);
        }
        prev = c + 1;
    }
    rank
}

/// Iterator over all `k`-dimensional subspaces of `F2^n`, each exactly once.
///
/// Walks the reduced echelon forms: a choice of pivot columns together with
/// an assignment of the free entries to the right of each pivot.
pub struct SubspaceIter {
    n: usize,
    pivot_sets: std::vec::IntoIter<Vec<usize>>,
    current: Option<(Vec<usize>, Vec<(usize, usize)>)>,
    counter: u64,
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        loop {
            if let Some((pivots, free)) = &self.current {
                if self.counter < (1u64 << free.len()) {
                    let mut basis: Vec<F2Vector> =
                        pivots.iter().map(|&p| F2Vector::unit(self.n, p)).collect();
                    for (bit, &(row, col)) in free.iter().enumerate() {
                        if (self.counter >> bit) & 1 == 1 {
                            basis[row].set(col, true);
                        }
                    }
                    self.counter += 1;
                    return Some(Subspace {
                        ambient_dim: self.n,
                        basis,
                        pivots: pivots.clone(),
                    });
                }
            }
            let pivots = self.pivot_sets.next()?;
            let mut free = Vec::new();
            for (row, &p) in pivots.iter().enumerate() {
                for col in p + 1..self.n {
                    if !pivots.contains(&col) {
                        free.push((row, col));
                    }
                }
            }
            self.current = Some((pivots, free));
            self.counter = 0;
        }
    }
}

pub fn enumerate_subspaces(n: usize, k: usize) -> SubspaceIter {
    assert!(k <= n, "no {k}-dimensional subspaces of F2^{n}");
    SubspaceIter {
        n,
        pivot_sets: k_subsets(n, k).into_iter(),
        current: None,
        counter: 0,
    }
}

/// Determinant over F2 of a square matrix given as row bitmasks.
fn det_small(mut rows: Vec<u64>) -> bool {
    let k = rows.len();
    for col in 0..k {
        let Some(p) = (col..k).find(|&r| (rows[r] >> col) & 1 == 1) else {
            return false;
        };
        rows.swap(col, p);
        let pivot = rows[col];
        for r in rows.iter_mut().skip(col + 1) {
            if (*r >> col) & 1 == 1 {
                *r ^= pivot;
            }
        }
    }
    true
}

/// Coordinates of `v_1 ∧ … ∧ v_k` in the basis of `Λ^k(F2^n)` indexed by
/// lexicographically ordered `k`-subsets; the coefficient on `S` is the
/// determinant of the `k × k` minor on the columns `S`.
pub fn wedge_coordinates(vectors: &[F2Vector], n: usize) -> F2Vector {
    let k = vectors.len();
    for v in vectors {
        assert_eq!(v.len(), n, "wedge factor outside the ambient space");
    }
    let subsets = k_subsets(n, k);
    let mut out = F2Vector::zeros(subsets.len());
    for (idx, s) in subsets.iter().enumerate() {
        let rows = vectors
            .iter()
            .map(|v| {
                s.iter()
                    .enumerate()
                    .fold(0u64, |acc, (c, &col)| acc | ((v.get(col) as u64) << c))
            })
            .collect();
        if det_small(rows) {
            out.set(idx, true);
        }
    }
    out
}
