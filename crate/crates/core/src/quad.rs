//! Quadratic spaces over F2 and their isometries.
//!
//! A space of dimension `n <= 64` stores `q` on the basis and the Gram matrix
//! of the associated alternating form `B`; vectors are `u64` bit patterns with
//! coordinate `i` at bit `i`.

use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::{solve_dot_system, Echelon64, F2Matrix, F2Vector, Subspace};

pub const MAX_DIM: usize = 64;

#[inline]
fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

fn mask(dim: usize) -> u64 {
    if dim >= 64 {
        u64::MAX
    } else {
        (1u64 << dim) - 1
    }
}

/// A finite-dimensional quadratic space over F2.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadSpace {
    dim: usize,
    q_diag: u64,
    gram: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    dim: usize,
    q_diag: Vec<u8>,
    gram: Vec<Vec<u8>>,
}

impl QuadSpace {
    /// `gram[i]` is the bit row `B(e_i, ·)`.
    pub fn new(dim: usize, q_diag: u64, gram: Vec<u64>) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::TooLarge(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        if gram.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "gram has {} rows for dimension {dim}",
                gram.len()
            )));
        }
        let m = mask(dim);
        if q_diag & !m != 0 || gram.iter().any(|r| r & !m != 0) {
            return Err(Error::DimensionMismatch("bits set outside the space".into()));
        }
        for i in 0..dim {
            if gram[i] >> i & 1 == 1 {
                return Err(Error::InvalidParameter(format!(
                    "B(e_{i}, e_{i}) = 1; the form must be alternating"
                )));
            }
            for j in 0..dim {
                if (gram[i] >> j & 1) != (gram[j] >> i & 1) {
                    return Err(Error::InvalidParameter(format!(
                        "gram is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { dim, q_diag, gram })
    }

    pub fn from_forms(q_diag: &F2Vector, gram: &F2Matrix) -> Result<Self> {
        let dim = q_diag.len();
        if gram.rows() != dim || gram.cols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "gram is {}x{} for dimension {dim}",
                gram.rows(),
                gram.cols()
            )));
        }
        if dim > MAX_DIM {
            return Err(Error::TooLarge(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        Self::new(
            dim,
            q_diag.to_u64(),
            (0..dim).map(|i| gram.row(i).to_u64()).collect(),
        )
    }

    pub fn zero() -> Self {
        Self {
            dim: 0,
            q_diag: 0,
            gram: Vec::new(),
        }
    }

    /// H0: hyperbolic plane with `q(a) = q(b) = 0`.
    pub fn h0() -> Self {
        Self {
            dim: 2,
            q_diag: 0,
            gram: vec![0b10, 0b01],
        }
    }

    /// H1: the anisotropic plane, `q(a) = q(b) = 1`.
    pub fn h1() -> Self {
        Self {
            dim: 2,
            q_diag: 0b11,
            gram: vec![0b10, 0b01],
        }
    }

    /// The degenerate line `(x, alpha)`.
    pub fn line(alpha: bool) -> Self {
        Self {
            dim: 1,
            q_diag: alpha as u64,
            gram: vec![0],
        }
    }

    pub fn h0_power(k: usize) -> Self {
        (0..k).fold(Self::zero(), |acc, _| acc.orthogonal_sum(&Self::h0()))
    }

    pub fn orthogonal_sum(&self, other: &Self) -> Self {
        assert!(
            self.dim + other.dim <= MAX_DIM,
            "orthogonal sum exceeds dimension {MAX_DIM}"
        );
        let mut gram = self.gram.clone();
        gram.extend(other.gram.iter().map(|r| r << self.dim));
        Self {
            dim: self.dim + other.dim,
            q_diag: self.q_diag | other.q_diag << self.dim,
            gram,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q_diag(&self) -> u64 {
        self.q_diag
    }

    pub fn gram_rows(&self) -> &[u64] {
        &self.gram
    }

    pub fn gram_matrix(&self) -> F2Matrix {
        F2Matrix::from_rows(
            self.gram
                .iter()
                .map(|&r| F2Vector::from_u64(self.dim, r))
                .collect(),
            self.dim,
        )
    }

    /// Bit mask of all vectors of the space.
    pub fn full_mask(&self) -> u64 {
        mask(self.dim)
    }

    /// Number of vectors, `2^dim`; only meaningful for small spaces.
    pub fn size(&self) -> u64 {
        assert!(self.dim < 64);
        1u64 << self.dim
    }

    /// The functional `B(v, ·)` as a bit row.
    #[inline]
    pub fn b_row(&self, v: u64) -> u64 {
        let mut acc = 0;
        let mut rest = v;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            acc ^= self.gram[i];
            rest &= rest - 1;
        }
        acc
    }

    #[inline]
    pub fn b(&self, u: u64, v: u64) -> bool {
        parity(self.b_row(u) & v)
    }

    /// `q(Σ x_i e_i) = Σ x_i q(e_i) + Σ_{i<j} x_i x_j B(e_i, e_j)`.
    #[inline]
    pub fn q(&self, v: u64) -> bool {
        let mut acc = (v & self.q_diag).count_ones();
        let mut rest = v;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc += (self.gram[i] & rest).count_ones();
        }
        acc & 1 == 1
    }

    pub fn q_vec(&self, v: &F2Vector) -> Result<bool> {
        self.check_vec(v)?;
        Ok(self.q(v.to_u64()))
    }

    pub fn b_vec(&self, u: &F2Vector, v: &F2Vector) -> Result<bool> {
        self.check_vec(u)?;
        self.check_vec(v)?;
        Ok(self.b(u.to_u64(), v.to_u64()))
    }

    fn check_vec(&self, v: &F2Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a space of dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Basis of `{x : B(x, b) = 0 for all b in basis}`.
    pub fn orthogonal_complement(&self, basis: &[u64]) -> Vec<u64> {
        let constraints: Vec<(u64, bool)> = basis.iter().map(|&b| (self.b_row(b), false)).collect();
        solve_dot_system(&constraints, self.dim)
            .expect("homogeneous system is consistent")
            .1
    }

    pub fn radical_basis(&self) -> Vec<u64> {
        let all: Vec<u64> = (0..self.dim).map(|i| 1u64 << i).collect();
        self.orthogonal_complement(&all)
    }

    pub fn radical(&self) -> Subspace {
        Subspace::span(
            self.radical_basis()
                .into_iter()
                .map(|v| F2Vector::from_u64(self.dim, v)),
            self.dim,
        )
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical_basis().is_empty()
    }

    fn require_nondegenerate(&self, what: &str) -> Result<()> {
        if self.is_nondegenerate() {
            Ok(())
        } else {
            Err(Error::Degenerate(format!(
                "{what} needs a nondegenerate space; radical has dimension {}",
                self.radical_basis().len()
            )))
        }
    }

    /// The form induced on the span of `basis`, as a space in its own right.
    pub fn restrict(&self, basis: &[u64]) -> Self {
        let k = basis.len();
        let mut q_diag = 0;
        let mut gram = vec![0u64; k];
        for (i, &u) in basis.iter().enumerate() {
            if self.q(u) {
                q_diag |= 1 << i;
            }
            let row = self.b_row(u);
            for (j, &v) in basis.iter().enumerate() {
                if parity(row & v) {
                    gram[i] |= 1 << j;
                }
            }
        }
        Self { dim: k, q_diag, gram }
    }

    /// Nonzero vectors with `q = alpha`, ascending.
    pub fn vectors_with_q(&self, alpha: bool) -> Vec<u64> {
        (1..self.size()).filter(|&v| self.q(v) == alpha).collect()
    }

    pub fn count_zeros(&self) -> u64 {
        (0..self.size()).filter(|&v| !self.q(v)).count() as u64
    }

    /// Hyperbolic pairs `(a_i, b_i)` with `B(a_i, b_i) = 1` and all other
    /// pairings zero. Isotropic pairs are preferred, so at most the last pair
    /// has `q(a) = q(b) = 1`.
    pub fn symplectic_basis(&self) -> Result<Vec<(u64, u64)>> {
        self.require_nondegenerate("a symplectic basis")?;
        let mut pairs = Vec::new();
        let mut rest: Vec<u64> = (0..self.dim).map(|i| 1u64 << i).collect();
        while !rest.is_empty() {
            let span: Vec<u64> = span_elements(&rest);
            let nonzero = || span.iter().copied().filter(|&v| v != 0);
            let a = nonzero()
                .find(|&v| !self.q(v))
                .or_else(|| nonzero().next())
                .expect("nonempty span");
            let b = nonzero()
                .find(|&v| self.b(a, v))
                .expect("restriction of a nondegenerate form is nondegenerate");
            let b = if !self.q(a) && self.q(b) { a ^ b } else { b };
            pairs.push((a, b));
            let used: Vec<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            rest = self.orthogonal_complement(&used);
        }
        Ok(pairs)
    }

    pub fn arf(&self) -> Result<bool> {
        let pairs = self.symplectic_basis()?;
        Ok(pairs
            .iter()
            .fold(false, |acc, &(a, b)| acc ^ (self.q(a) & self.q(b))))
    }

    /// Normal form `H0^m ⊥ H1^e` and an explicit isometry onto it.
    pub fn classify(&self) -> Result<Classification> {
        let pairs = self.symplectic_basis()?;
        let arf = pairs
            .iter()
            .fold(false, |acc, &(a, b)| acc ^ (self.q(a) & self.q(b)));
        let h1_blocks = arf as usize;
        let h0_blocks = self.dim / 2 - h1_blocks;
        let mut normal = Self::h0_power(h0_blocks);
        if arf {
            normal = normal.orthogonal_sum(&Self::h1());
        }
        // Every pair but possibly the last is isotropic, so the pairs line up
        // with the blocks of the normal form.
        let mut images = Vec::with_capacity(self.dim);
        for &(a, b) in &pairs {
            images.push(a);
            images.push(b);
        }
        let from_normal = IsoMap::new(normal.clone(), self.clone(), images)?;
        let to_normal = from_normal.inverse()?;
        Ok(Classification {
            dim: self.dim,
            arf,
            h0_blocks,
            h1_blocks,
            normal_form: normal,
            isometry: to_normal,
        })
    }

    /// Parses `H0`, `H1`, `x0`, `x1`, `0`, optionally raised to a power
    /// (`H0^3`), joined by `+`; or a JSON object; or a path to a JSON file.
    pub fn parse(expr: &str) -> Result<Self> {
        let trimmed = expr.trim();
        if trimmed.starts_with('{') {
            return Self::from_json(trimmed);
        }
        if trimmed.ends_with(".json") {
            let text = std::fs::read_to_string(Path::new(trimmed))
                .map_err(|e| Error::Io(format!("{trimmed}: {e}")))?;
            return Self::from_json(&text);
        }
        let mut acc = Self::zero();
        let mut pos = 0;
        for token in expr.split('+') {
            let start = pos + (token.len() - token.trim_start().len());
            pos += token.len() + 1;
            let token = token.trim();
            if token.is_empty() {
                return Err(Error::Parse {
                    pos: start,
                    msg: "empty summand".into(),
                });
            }
            let (base, power) = match token.split_once('^') {
                Some((b, p)) => {
                    let k = p.trim().parse::<usize>().map_err(|_| Error::Parse {
                        pos: start + b.len() + 1,
                        msg: format!("bad exponent `{p}`"),
                    })?;
                    (b.trim(), k)
                }
                None => (token, 1),
            };
            let piece = match base {
                "H0" | "h0" => Self::h0(),
                "H1" | "h1" => Self::h1(),
                "x0" => Self::line(false),
                "x1" => Self::line(true),
                "0" => Self::zero(),
                other => {
                    return Err(Error::Parse {
                        pos: start,
                        msg: format!("unknown summand `{other}`; expected H0, H1, x0, x1 or 0"),
                    })
                }
            };
            for _ in 0..power {
                if acc.dim + piece.dim > MAX_DIM {
                    return Err(Error::TooLarge(format!("`{expr}` exceeds dimension {MAX_DIM}")));
                }
                acc = acc.orthogonal_sum(&piece);
            }
        }
        Ok(acc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SpaceJson = serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: e.column().saturating_sub(1),
            msg: e.to_string(),
        })?;
        if raw.q_diag.len() != raw.dim || raw.gram.iter().any(|r| r.len() != raw.dim) {
            return Err(Error::DimensionMismatch(format!(
                "q_diag/gram sizes do not match dim {}",
                raw.dim
            )));
        }
        let gram = F2Matrix::from_rows(
            raw.gram.iter().map(|r| F2Vector::from_bits(r)).collect(),
            raw.dim,
        );
        Self::from_forms(&F2Vector::from_bits(&raw.q_diag), &gram)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SpaceJson {
            dim: self.dim,
            q_diag: (0..self.dim).map(|i| (self.q_diag >> i & 1) as u8).collect(),
            gram: self
                .gram
                .iter()
                .map(|r| (0..self.dim).map(|j| (r >> j & 1) as u8).collect())
                .collect(),
        })
        .expect("serializable")
    }

    /// Renders a vector as a sum of basis names, e.g. `e0+e3`; `0` for zero.
    pub fn format_vector(&self, v: u64) -> String {
        format_bits(v)
    }
}

pub fn format_bits(v: u64) -> String {
    if v == 0 {
        return "0".into();
    }
    let mut parts = Vec::new();
    let mut rest = v;
    while rest != 0 {
        parts.push(format!("e{}", rest.trailing_zeros()));
        rest &= rest - 1;
    }
    parts.join("+")
}

fn span_elements(basis: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &b in basis {
        let extra: Vec<u64> = out.iter().map(|&v| v ^ b).collect();
        out.extend(extra);
    }
    out
}

impl fmt::Debug for QuadSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadSpace(dim {}, q ", self.dim)?;
        for i in 0..self.dim {
            write!(f, "{}", self.q_diag >> i & 1)?;
        }
        write!(f, ", gram [")?;
        for (k, r) in self.gram.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            for j in 0..self.dim {
                write!(f, "{}", r >> j & 1)?;
            }
        }
        write!(f, "])")
    }
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub dim: usize,
    pub arf: bool,
    pub h0_blocks: usize,
    pub h1_blocks: usize,
    pub normal_form: QuadSpace,
    /// Isometry from the classified space onto `normal_form`.
    pub isometry: IsoMap,
}

impl Classification {
    pub fn normal_form_name(&self) -> String {
        let mut parts = vec!["H0"; self.h0_blocks];
        parts.extend(vec!["H1"; self.h1_blocks]);
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("⊥")
        }
    }
}

/// An injective linear map preserving `q`, stored by the images of the
/// source basis vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IsoMap {
    source: QuadSpace,
    target: QuadSpace,
    images: Vec<u64>,
}

impl IsoMap {
    /// Validates injectivity and that `q` and `B` are preserved on the basis,
    /// which by polarization fixes `q` on every vector.
    pub fn new(source: QuadSpace, target: QuadSpace, images: Vec<u64>) -> Result<Self> {
        if images.len() != source.dim {
            return Err(Error::DimensionMismatch(format!(
                "{} images for a source of dimension {}",
                images.len(),
                source.dim
            )));
        }
        if images.iter().any(|&w| w & !target.full_mask() != 0) {
            return Err(Error::DimensionMismatch("image outside the target".into()));
        }
        let mut e = Echelon64::new();
        for (i, &w) in images.iter().enumerate() {
            if !e.insert(w, 0) {
                return Err(Error::NotIsometry(format!(
                    "not injective: image of e{i} depends on earlier images"
                )));
            }
            if target.q(w) != (source.q_diag >> i & 1 == 1) {
                return Err(Error::NotIsometry(format!("q(e{i}) is not preserved")));
            }
            let row = target.b_row(w);
            for (j, &u) in images.iter().enumerate().take(i) {
                if parity(row & u) != (source.gram[i] >> j & 1 == 1) {
                    return Err(Error::NotIsometry(format!("B(e{i}, e{j}) is not preserved")));
                }
            }
        }
        Ok(Self {
            source,
            target,
            images,
        })
    }

    pub(crate) fn new_unchecked(source: QuadSpace, target: QuadSpace, images: Vec<u64>) -> Self {
        debug_assert!(Self::new(source.clone(), target.clone(), images.clone()).is_ok());
        Self {
            source,
            target,
            images,
        }
    }

    pub fn from_matrix(source: QuadSpace, target: QuadSpace, m: &F2Matrix) -> Result<Self> {
        if m.rows() != target.dim || m.cols() != source.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} for a map of dimension {} -> {}",
                m.rows(),
                m.cols(),
                source.dim,
                target.dim
            )));
        }
        let images = m.columns().iter().map(F2Vector::to_u64).collect();
        Self::new(source, target, images)
    }

    pub fn identity(space: &QuadSpace) -> Self {
        Self {
            source: space.clone(),
            target: space.clone(),
            images: (0..space.dim).map(|i| 1u64 << i).collect(),
        }
    }

    /// `space ↪ space ⊥ extra` onto the first summand.
    pub fn first_summand(space: &QuadSpace, extra: &QuadSpace) -> Self {
        Self {
            source: space.clone(),
            target: space.orthogonal_sum(extra),
            images: (0..space.dim).map(|i| 1u64 << i).collect(),
        }
    }

    /// `space ↪ before ⊥ space` onto the second summand.
    pub fn second_summand(before: &QuadSpace, space: &QuadSpace) -> Self {
        Self {
            source: space.clone(),
            target: before.orthogonal_sum(space),
            images: (0..space.dim).map(|i| 1u64 << (before.dim + i)).collect(),
        }
    }

    pub fn source(&self) -> &QuadSpace {
        &self.source
    }

    pub fn target(&self) -> &QuadSpace {
        &self.target
    }

    pub fn images(&self) -> &[u64] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, v: u64) -> u64 {
        let mut acc = 0;
        let mut rest = v;
        while rest != 0 {
            acc ^= self.images[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        acc
    }

    pub fn matrix(&self) -> F2Matrix {
        let cols: Vec<F2Vector> = self
            .images
            .iter()
            .map(|&w| F2Vector::from_u64(self.target.dim, w))
            .collect();
        F2Matrix::from_columns(&cols, self.target.dim)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &IsoMap) -> Result<IsoMap> {
        if first.target != self.source {
            return Err(Error::ObjectMismatch(
                "composing isometries through different spaces".into(),
            ));
        }
        Ok(Self {
            source: first.source.clone(),
            target: self.target.clone(),
            images: first.images.iter().map(|&v| self.apply(v)).collect(),
        })
    }

    /// Inverse of a bijective isometry.
    pub fn inverse(&self) -> Result<IsoMap> {
        if self.source.dim != self.target.dim {
            return Err(Error::DimensionMismatch("only bijections are invertible".into()));
        }
        let mut e = Echelon64::new();
        for (i, &w) in self.images.iter().enumerate() {
            e.insert(w, 1u64 << i);
        }
        let images = (0..self.target.dim)
            .map(|j| e.eval(1u64 << j).expect("bijective"))
            .collect();
        Ok(Self::new_unchecked(
            self.target.clone(),
            self.source.clone(),
            images,
        ))
    }

    /// Preimage of `w` under this injective map, if `w` is in the image.
    pub fn preimage(&self, w: u64) -> Option<u64> {
        let mut e = Echelon64::new();
        for (i, &img) in self.images.iter().enumerate() {
            e.insert(img, 1u64 << i);
        }
        e.eval(w)
    }

    /// Exhaustive check of `q(f(v)) = q(v)` over the whole source.
    pub fn preserves_q_exhaustively(&self) -> bool {
        (0..self.source.size()).all(|v| self.target.q(self.apply(v)) == self.source.q(v))
    }
}

impl fmt::Debug for IsoMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IsoMap[")?;
        for (i, &w) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "e{i}->{}", format_bits(w))?;
        }
        write!(f, "]")
    }
}

/// Constraint data for choosing the images of a source basis one at a time.
struct ExtensionSearch<'a> {
    target: &'a QuadSpace,
    q: Vec<bool>,
    /// `gram[i]` bit `j`: required `B(image_i, image_j)`.
    gram: Vec<u64>,
}

/// Above this many free bits candidate sets are sampled instead of listed.
const LIST_LIMIT: usize = 22;

impl<'a> ExtensionSearch<'a> {
    fn for_embedding(source: &QuadSpace, target: &'a QuadSpace) -> Self {
        Self {
            target,
            q: (0..source.dim).map(|i| source.q_diag >> i & 1 == 1).collect(),
            gram: source.gram.clone(),
        }
    }

    /// Affine solution set of the `B` constraints for step `prefix.len()`.
    fn coset(&self, prefix: &[u64]) -> Option<(u64, Vec<u64>)> {
        let i = prefix.len();
        let constraints: Vec<(u64, bool)> = prefix
            .iter()
            .enumerate()
            .map(|(j, &w)| (self.target.b_row(w), self.gram[i] >> j & 1 == 1))
            .collect();
        solve_dot_system(&constraints, self.target.dim)
    }

    fn admissible(&self, w: u64, i: usize, span: &Echelon64) -> bool {
        self.target.q(w) == self.q[i] && !span.contains(w)
    }

    fn candidates(&self, prefix: &[u64], span: &Echelon64) -> Vec<u64> {
        let Some((p, kernel)) = self.coset(prefix) else {
            return Vec::new();
        };
        assert!(
            kernel.len() <= LIST_LIMIT,
            "refusing to list 2^{} candidates",
            kernel.len()
        );
        let i = prefix.len();
        let mut out: Vec<u64> = (0u64..1 << kernel.len())
            .map(|c| combine(p, &kernel, c))
            .filter(|&w| self.admissible(w, i, span))
            .collect();
        out.sort_unstable();
        out
    }

    fn for_each(&self, prefix: &mut Vec<u64>, span: &Echelon64, visit: &mut dyn FnMut(&[u64]) -> bool) -> bool {
        if prefix.len() == self.q.len() {
            return visit(prefix);
        }
        for w in self.candidates(prefix, span) {
            let mut next = span.clone();
            next.insert(w, 0);
            prefix.push(w);
            let go_on = self.for_each(prefix, &next, visit);
            prefix.pop();
            if !go_on {
                return false;
            }
        }
        true
    }

    fn random<R: Rng + ?Sized>(&self, prefix: &mut Vec<u64>, span: &Echelon64, rng: &mut R, budget: &mut usize) -> bool {
        if prefix.len() == self.q.len() {
            return true;
        }
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let Some((p, kernel)) = self.coset(prefix) else {
            return false;
        };
        let i = prefix.len();
        let mut tries: Vec<u64> = (0..48)
            .map(|_| combine(p, &kernel, rng.gen::<u64>()))
            .filter(|&w| self.admissible(w, i, span))
            .collect();
        if tries.is_empty() && kernel.len() <= 16 {
            tries = (0u64..1 << kernel.len())
                .map(|c| combine(p, &kernel, c))
                .filter(|&w| self.admissible(w, i, span))
                .collect();
            tries.shuffle(rng);
        }
        tries.dedup();
        for w in tries.into_iter().take(4) {
            let mut next = span.clone();
            next.insert(w, 0);
            prefix.push(w);
            if self.random(prefix, &next, rng, budget) {
                return true;
            }
            prefix.pop();
        }
        false
    }
}

#[inline]
fn combine(p: u64, kernel: &[u64], c: u64) -> u64 {
    let mut w = p;
    for (k, &b) in kernel.iter().enumerate() {
        if c >> k & 1 == 1 {
            w ^= b;
        }
    }
    w
}

/// All isometric embeddings `D → W`, ordered lexicographically by the
/// tuple of basis images.
pub fn enumerate_embeddings(d: &QuadSpace, w: &QuadSpace) -> Vec<IsoMap> {
    let mut out = Vec::new();
    if d.dim > w.dim {
        return out;
    }
    let search = ExtensionSearch::for_embedding(d, w);
    search.for_each(&mut Vec::new(), &Echelon64::new(), &mut |imgs| {
        out.push(IsoMap::new_unchecked(d.clone(), w.clone(), imgs.to_vec()));
        true
    });
    out
}

/// A pseudorandom isometric embedding `D → W`, if the search finds one.
pub fn random_embedding<R: Rng + ?Sized>(d: &QuadSpace, w: &QuadSpace, rng: &mut R) -> Option<IsoMap> {
    if d.dim > w.dim {
        return None;
    }
    let search = ExtensionSearch::for_embedding(d, w);
    let mut prefix = Vec::new();
    let mut budget = 256;
    search
        .random(&mut prefix, &Echelon64::new(), rng, &mut budget)
        .then(|| IsoMap::new_unchecked(d.clone(), w.clone(), prefix))
}

pub const ORTHOGONAL_GROUP_MAX_DIM: usize = 6;

pub fn orthogonal_group(v: &QuadSpace) -> Result<Vec<IsoMap>> {
    if v.dim > ORTHOGONAL_GROUP_MAX_DIM {
        return Err(Error::TooLarge(format!(
            "orthogonal group enumeration is limited to dimension {ORTHOGONAL_GROUP_MAX_DIM}"
        )));
    }
    Ok(enumerate_embeddings(v, v))
}

/// Extends the isometry `d_basis[i] ↦ images[i]` between subspaces of `V`
/// to an element of `O(V)`, by backtracking over the images of a completing
/// basis.
pub fn witt_extend(v: &QuadSpace, d_basis: &[u64], images: &[u64]) -> Result<IsoMap> {
    v.require_nondegenerate("Witt extension")?;
    if d_basis.len() != images.len() {
        return Err(Error::DimensionMismatch("basis and images differ in length".into()));
    }
    let d = v.restrict(d_basis);
    let mut span = Echelon64::new();
    for &b in d_basis {
        if !span.insert(b, 0) {
            return Err(Error::InvalidParameter("subspace basis is dependent".into()));
        }
    }
    IsoMap::new(d, v.clone(), images.to_vec())?;
    let mut basis = d_basis.to_vec();
    for i in 0..v.dim {
        if span.insert(1u64 << i, 0) {
            basis.push(1u64 << i);
        }
    }
    let full = v.restrict(&basis);
    let search = ExtensionSearch::for_embedding(&full, v);
    let mut prefix = images.to_vec();
    let mut img_span = Echelon64::new();
    for &w in images {
        img_span.insert(w, 0);
    }
    let mut found = None;
    search.for_each(&mut prefix, &img_span, &mut |imgs| {
        found = Some(imgs.to_vec());
        false
    });
    let found = found.ok_or_else(|| {
        Error::WittFailure(format!("no extension of {images:?} on {d_basis:?}"))
    })?;
    // g(basis_k) = found_k; read off g on the standard basis.
    let mut e = Echelon64::new();
    for (&b, &g) in basis.iter().zip(&found) {
        e.insert(b, g);
    }
    let std_images = (0..v.dim)
        .map(|i| e.eval(1u64 << i).expect("basis spans V"))
        .collect();
    IsoMap::new(v.clone(), v.clone(), std_images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const A: u64 = 0b01;
    const B: u64 = 0b10;

    #[test]
    fn q_eval_examples() {
        assert!(QuadSpace::h0().q(A | B));
        assert!(!QuadSpace::h0().q(0));
        assert!(QuadSpace::h1().q(A | B));
        assert_eq!(
            QuadSpace::h0().q_vec(&F2Vector::from_u64(3, 1)),
            Err(Error::DimensionMismatch(
                "vector of length 3 in a space of dimension 2".into()
            ))
        );
    }

    #[test]
    fn radical_examples() {
        assert!(QuadSpace::h0().is_nondegenerate());
        assert_eq!(QuadSpace::line(true).radical(), Subspace::full(1));
        let s = QuadSpace::h0().orthogonal_sum(&QuadSpace::line(false));
        assert_eq!(s.radical_basis(), vec![0b100]);
    }

    #[test]
    fn arf_examples() {
        let h0 = QuadSpace::h0();
        let h1 = QuadSpace::h1();
        assert!(!h0.arf().unwrap());
        assert!(h1.arf().unwrap());
        let s = h0.orthogonal_sum(&h1);
        assert!(s.arf().unwrap());
        assert_eq!(s.count_zeros(), 6);
        assert!(matches!(QuadSpace::line(false).arf(), Err(Error::Degenerate(_))));
    }

    #[test]
    fn classify_h1_plus_h1() {
        let s = QuadSpace::parse("H1+H1").unwrap();
        let c = s.classify().unwrap();
        assert_eq!((c.h0_blocks, c.h1_blocks), (2, 0));
        assert_eq!(c.normal_form_name(), "H0⊥H0");
        assert!(c.isometry.preserves_q_exhaustively());
        assert_eq!(c.isometry.target(), &QuadSpace::h0_power(2));
        let c = QuadSpace::parse("H0+H1").unwrap().classify().unwrap();
        assert_eq!((c.h0_blocks, c.h1_blocks), (1, 1));
    }

    #[test]
    fn symplectic_basis_is_hyperbolic() {
        for expr in ["H0", "H1", "H0+H0", "H1+H1+H0", "H1^3"] {
            let s = QuadSpace::parse(expr).unwrap();
            let pairs = s.symplectic_basis().unwrap();
            let flat: Vec<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
            assert_eq!(flat.len(), s.dim());
            for (i, &u) in flat.iter().enumerate() {
                for (j, &v) in flat.iter().enumerate() {
                    let expect = i / 2 == j / 2 && i != j;
                    assert_eq!(s.b(u, v), expect, "{expr}: pairing ({i},{j})");
                }
            }
        }
        let h1 = QuadSpace::h1().symplectic_basis().unwrap();
        assert!(QuadSpace::h1().q(h1[0].0) && QuadSpace::h1().q(h1[0].1));
    }

    #[test]
    fn embedding_examples() {
        let h0 = QuadSpace::h0();
        let e: Vec<Vec<u64>> = enumerate_embeddings(&QuadSpace::line(false), &h0)
            .iter()
            .map(|f| f.images().to_vec())
            .collect();
        assert_eq!(e, vec![vec![A], vec![B]]);
        let e = enumerate_embeddings(&QuadSpace::line(true), &h0);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].images(), &[A | B]);
        assert!(enumerate_embeddings(&QuadSpace::line(false), &QuadSpace::h1()).is_empty());
    }

    #[test]
    fn orthogonal_group_orders() {
        assert_eq!(orthogonal_group(&QuadSpace::line(true)).unwrap().len(), 1);
        assert_eq!(orthogonal_group(&QuadSpace::h0()).unwrap().len(), 2);
        assert_eq!(orthogonal_group(&QuadSpace::h1()).unwrap().len(), 6);
        assert!(orthogonal_group(&QuadSpace::h0_power(4)).is_err());
    }

    /// Brute force: every invertible matrix checked against q on all vectors.
    fn brute_group_order(s: &QuadSpace) -> usize {
        let n = s.dim();
        let mut count = 0;
        let mut stack: Vec<Vec<u64>> = vec![vec![]];
        while let Some(cols) = stack.pop() {
            if cols.len() == n {
                let f = |v: u64| {
                    (0..n).filter(|i| v >> i & 1 == 1).fold(0, |acc, i| acc ^ cols[i])
                };
                let injective = (1..1u64 << n).all(|v| f(v) != 0);
                if injective && (0..1u64 << n).all(|v| s.q(f(v)) == s.q(v)) {
                    count += 1;
                }
                continue;
            }
            for w in 1..1u64 << n {
                let mut c = cols.clone();
                c.push(w);
                stack.push(c);
            }
        }
        count
    }

    #[test]
    fn group_orders_match_brute_force() {
        for expr in ["H0", "H1", "x0+x1", "H0+x1", "H0+H0"] {
            let s = QuadSpace::parse(expr).unwrap();
            let g = orthogonal_group(&s).unwrap();
            assert_eq!(g.len(), brute_group_order(&s), "{expr}");
            let set: HashSet<_> = g.iter().map(|f| f.images().to_vec()).collect();
            assert_eq!(set.len(), g.len());
            for f in &g {
                for h in &g {
                    assert!(set.contains(f.after(h).unwrap().images()));
                }
                assert!(set.contains(f.inverse().unwrap().images()));
            }
        }
        assert_eq!(orthogonal_group(&QuadSpace::h0_power(2)).unwrap().len(), 72);
    }

    #[test]
    fn witt_examples() {
        let h0 = QuadSpace::h0();
        let g = witt_extend(&h0, &[A], &[B]).unwrap();
        assert_eq!(g.images(), &[B, A]);
        let g = witt_extend(&h0, &[A], &[A]).unwrap();
        assert_eq!(g.apply(A), A);
        let h00 = QuadSpace::h0_power(2);
        let g = witt_extend(&h00, &[0b0001], &[0b0100]).unwrap();
        assert_eq!(g.apply(0b0001), 0b0100);
        assert!(g.preserves_q_exhaustively());
        assert!(witt_extend(&h0, &[A], &[A | B]).is_err());
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(QuadSpace::parse("H0+H0").unwrap(), QuadSpace::h0_power(2));
        assert_eq!(QuadSpace::parse(" H0^3 ").unwrap(), QuadSpace::h0_power(3));
        assert_eq!(QuadSpace::parse("0").unwrap(), QuadSpace::zero());
        assert_eq!(QuadSpace::parse("H0+0").unwrap(), QuadSpace::h0());
        match QuadSpace::parse("H0+H7") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(QuadSpace::parse("H0++H1"), Err(Error::Parse { pos: 3, .. })));
        let s = QuadSpace::parse("H1+x0").unwrap();
        assert_eq!(QuadSpace::parse(&s.to_json()).unwrap(), s);
        assert!(QuadSpace::new(2, 0, vec![0b11, 0b01]).is_err());
        assert!(QuadSpace::new(2, 0, vec![0b10, 0b00]).is_err());
    }

    #[test]
    fn orthogonal_sum_examples() {
        let s = QuadSpace::h0().orthogonal_sum(&QuadSpace::zero());
        assert_eq!(s, QuadSpace::h0());
        let t = QuadSpace::line(false).orthogonal_sum(&QuadSpace::line(true));
        assert_eq!(t.dim(), 2);
        assert_eq!(t.radical(), Subspace::full(2));
        assert!(!QuadSpace::h0_power(2).arf().unwrap());
    }

    #[test]
    fn isomap_rejects_non_isometries() {
        let h0 = QuadSpace::h0();
        assert!(matches!(
            IsoMap::new(h0.clone(), h0.clone(), vec![A | B, B]),
            Err(Error::NotIsometry(_))
        ));
        assert!(matches!(
            IsoMap::new(h0.clone(), h0.clone(), vec![A, A]),
            Err(Error::NotIsometry(_))
        ));
    }
}
