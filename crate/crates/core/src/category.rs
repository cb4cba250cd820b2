//! Morphisms of Tq: cospans `V →f X ←g W` of isometries into a
//! nondegenerate apex, composed by the pseudo push-out.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::f2::{Echelon64, F2Matrix, F2Vector};
use crate::quad::{random_embedding, IsoMap, QuadSpace};

/// One representative `[V →left X ←right W]` of a morphism `V → W`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TqMorphism {
    left: IsoMap,
    right: IsoMap,
}

/// Reads `x ∈ X` back into `W` through the orthogonal projection onto
/// `g(W)`; needs `W` nondegenerate.
#[derive(Clone, Debug)]
pub struct Projector {
    /// `B_X(g(e_j), ·)` for each basis vector of `W`.
    pairing: Vec<u64>,
    /// Rows of the inverse Gram matrix of `W`.
    gram_inv: Vec<u64>,
}

impl Projector {
    pub fn new(g: &IsoMap) -> Result<Self> {
        let w = g.source();
        if !w.is_nondegenerate() {
            return Err(Error::Degenerate("projection onto a degenerate subspace".into()));
        }
        let x = g.target();
        let pairing = g.images().iter().map(|&v| x.b_row(v)).collect();
        let mut e = Echelon64::new();
        for (j, &row) in w.gram_rows().iter().enumerate() {
            e.insert(row, 1u64 << j);
        }
        let gram_inv = (0..w.dim())
            .map(|k| e.eval(1u64 << k).expect("nondegenerate Gram matrix"))
            .collect();
        Ok(Self { pairing, gram_inv })
    }

    /// The `w` with `B_W(w', w) = B_X(g(w'), x)` for all `w'`.
    #[inline]
    pub fn project(&self, x: u64) -> u64 {
        let mut w = 0;
        for (k, &p) in self.pairing.iter().enumerate() {
            if (p & x).count_ones() & 1 == 1 {
                w ^= self.gram_inv[k];
            }
        }
        w
    }
}

/// Pulls vectors of `V` back along the cospan: `x ↦ right⁻¹(left(x))` when
/// `left(x)` lies in the image of `right`.
#[derive(Clone, Debug)]
pub struct Transporter {
    left: Vec<u64>,
    right_inv: Echelon64,
}

impl Transporter {
    pub fn new(t: &TqMorphism) -> Self {
        let mut right_inv = Echelon64::new();
        for (j, &img) in t.right.images().iter().enumerate() {
            right_inv.insert(img, 1u64 << j);
        }
        Self {
            left: t.left.images().to_vec(),
            right_inv,
        }
    }

    #[inline]
    pub fn pull(&self, v: u64) -> Option<u64> {
        let mut x = 0;
        let mut rest = v;
        while rest != 0 {
            x ^= self.left[rest.trailing_zeros() as usize];
            rest &= rest - 1;
        }
        self.right_inv.eval(x)
    }
}

impl TqMorphism {
    pub fn new(left: IsoMap, right: IsoMap) -> Result<Self> {
        if left.target() != right.target() {
            return Err(Error::ObjectMismatch("the two legs end in different apexes".into()));
        }
        for (what, s) in [
            ("apex", left.target()),
            ("source", left.source()),
            ("target", right.source()),
        ] {
            if !s.is_nondegenerate() {
                return Err(Error::Degenerate(format!("{what} of a Tq morphism")));
            }
        }
        Ok(Self { left, right })
    }

    pub fn identity(v: &QuadSpace) -> Self {
        Self {
            left: IsoMap::identity(v),
            right: IsoMap::identity(v),
        }
    }

    /// `[V →g V' ←id V']` for a bijective isometry `g`.
    pub fn from_isometry(g: &IsoMap) -> Result<Self> {
        Self::new(g.clone(), IsoMap::identity(g.target()))
    }

    /// `[V → V⊥E ←id V⊥E]`.
    pub fn inclusion(v: &QuadSpace, extra: &QuadSpace) -> Result<Self> {
        let incl = IsoMap::first_summand(v, extra);
        Self::new(incl.clone(), IsoMap::identity(incl.target()))
    }

    /// `[V⊥E →id V⊥E ← V]`.
    pub fn retraction(v: &QuadSpace, extra: &QuadSpace) -> Result<Self> {
        let incl = IsoMap::first_summand(v, extra);
        Self::new(IsoMap::identity(incl.target()), incl)
    }

    pub fn source(&self) -> &QuadSpace {
        self.left.source()
    }

    pub fn target(&self) -> &QuadSpace {
        self.right.source()
    }

    pub fn apex(&self) -> &QuadSpace {
        self.left.target()
    }

    pub fn left(&self) -> &IsoMap {
        &self.left
    }

    pub fn right(&self) -> &IsoMap {
        &self.right
    }

    /// Images under `ε(T)` of the source basis vectors.
    pub fn epsilon_images(&self) -> Vec<u64> {
        let p = Projector::new(&self.right).expect("target of a Tq morphism is nondegenerate");
        self.left.images().iter().map(|&x| p.project(x)).collect()
    }

    /// The linear map `ε(T)` as a `dim W × dim V` matrix.
    pub fn epsilon(&self) -> F2Matrix {
        let n = self.target().dim();
        let cols: Vec<F2Vector> = self
            .epsilon_images()
            .into_iter()
            .map(|w| F2Vector::from_u64(n, w))
            .collect();
        F2Matrix::from_columns(&cols, n)
    }

    /// `next ∘ self` through the pseudo push-out: with `C = right(W)^⊥` in the
    /// first apex, the new apex is `X₂ ⊥ C` and `right(w) + c ↦ left₂(w) + c`.
    pub fn then(&self, next: &TqMorphism) -> Result<TqMorphism> {
        if self.target() != next.source() {
            return Err(Error::ObjectMismatch(
                "middle objects of the composite differ".into(),
            ));
        }
        let x1 = self.apex();
        let x2 = next.apex();
        let c_basis = x1.orthogonal_complement(self.right.images());
        let c = x1.restrict(&c_basis);
        if x2.dim() + c.dim() > crate::quad::MAX_DIM {
            return Err(Error::TooLarge("composite apex exceeds 64 dimensions".into()));
        }
        let apex = x2.orthogonal_sum(&c);
        let proj = Projector::new(&self.right)?;
        let mut c_coords = Echelon64::new();
        for (k, &b) in c_basis.iter().enumerate() {
            c_coords.insert(b, 1u64 << k);
        }
        let push = |x: u64| -> u64 {
            let w = proj.project(x);
            let gw = self.right.apply(w);
            let rest = c_coords
                .eval(x ^ gw)
                .expect("X = g(W) ⊥ C decomposes every vector");
            next.left.apply(w) | rest << x2.dim()
        };
        let left_imgs = self.left.images().iter().map(|&x| push(x)).collect();
        let left = IsoMap::new(self.source().clone(), apex.clone(), left_imgs)?;
        let right_imgs = next.right.images().to_vec();
        let right = IsoMap::new(next.target().clone(), apex, right_imgs)?;
        TqMorphism::new(left, right)
    }

    /// Replaces the representative by `(α∘left, α∘right)`.
    pub fn relation_move(&self, alpha: &IsoMap) -> Result<TqMorphism> {
        TqMorphism::new(alpha.after(&self.left)?, alpha.after(&self.right)?)
    }

    /// A morphism `V → W` with `ε = f`, given the images `f(e_i) ∈ W`.
    ///
    /// The apex is `W ⊥ H0^k` and `e_i ↦ f(e_i) + c_i`, where the correction
    /// `c_i` uses one hyperbolic block per pair `i < j` whose pairing must be
    /// repaired, one block per basis vector whose `q` must be repaired, and a
    /// fresh isotropic vector for each kernel direction of `v ↦ (f v, c v)`.
    pub fn lift_linear_images(v: &QuadSpace, w: &QuadSpace, images: &[u64]) -> Result<TqMorphism> {
        let n = v.dim();
        if images.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} images for a source of dimension {n}",
                images.len()
            )));
        }
        if !v.is_nondegenerate() || !w.is_nondegenerate() {
            return Err(Error::Degenerate("lift of a linear map".into()));
        }
        let mut blocks = 0usize;
        let mut c = vec![0u64; n];
        for i in 0..n {
            for j in i + 1..n {
                let want = v.b(1 << i, 1 << j);
                if want != w.b(images[i], images[j]) {
                    c[i] |= 1 << (2 * blocks);
                    c[j] |= 1 << (2 * blocks + 1);
                    blocks += 1;
                }
            }
        }
        for i in 0..n {
            if v.q(1 << i) != w.q(images[i]) {
                c[i] |= 0b11 << (2 * blocks);
                blocks += 1;
            }
        }
        let wd = w.dim();
        let joint_cols: Vec<u64> = (0..n).map(|i| images[i] | c[i] << wd).collect();
        let height = wd + 2 * blocks;
        if height > crate::quad::MAX_DIM {
            return Err(Error::TooLarge("lift needs more than 64 dimensions".into()));
        }
        let joint = F2Matrix::from_columns(
            &joint_cols
                .iter()
                .map(|&x| F2Vector::from_u64(height, x))
                .collect::<Vec<_>>(),
            height,
        );
        for &p in joint.kernel_basis().pivots() {
            c[p] |= 1 << (2 * blocks);
            blocks += 1;
        }
        if wd + 2 * blocks > crate::quad::MAX_DIM {
            return Err(Error::TooLarge("lift needs more than 64 dimensions".into()));
        }
        let apex = w.orthogonal_sum(&QuadSpace::h0_power(blocks));
        let left_imgs = (0..n).map(|i| images[i] | c[i] << wd).collect();
        let left = IsoMap::new(v.clone(), apex.clone(), left_imgs)?;
        let right = IsoMap::first_summand(w, &QuadSpace::h0_power(blocks));
        TqMorphism::new(left, right)
    }

    pub fn lift_linear(f: &F2Matrix, v: &QuadSpace, w: &QuadSpace) -> Result<TqMorphism> {
        if f.rows() != w.dim() || f.cols() != v.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, map is {} -> {}",
                f.rows(),
                f.cols(),
                v.dim(),
                w.dim()
            )));
        }
        let images: Vec<u64> = f.columns().iter().map(F2Vector::to_u64).collect();
        Self::lift_linear_images(v, w, &images)
    }

    /// An endomorphism of `V` with `ε = id` that transports exactly the
    /// vectors of `span{u}`: each basis vector of a basis starting with `u`,
    /// except `u` itself, is pushed off `V` by a fresh isotropic vector.
    pub fn line_projector(v: &QuadSpace, u: u64) -> Result<TqMorphism> {
        if u == 0 || u & !v.full_mask() != 0 {
            return Err(Error::InvalidParameter("projector needs a nonzero vector".into()));
        }
        let mut basis = vec![u];
        let mut span = Echelon64::new();
        span.insert(u, 0);
        for i in 0..v.dim() {
            if span.insert(1 << i, 0) {
                basis.push(1 << i);
            }
        }
        let extra = QuadSpace::h0_power(v.dim() - 1);
        let apex = v.orthogonal_sum(&extra);
        let mut e = Echelon64::new();
        for (k, &b) in basis.iter().enumerate() {
            let shift = if k == 0 { 0 } else { 1u64 << (v.dim() + 2 * (k - 1)) };
            e.insert(b, b | shift);
        }
        let left_imgs = (0..v.dim())
            .map(|i| e.eval(1 << i).expect("basis"))
            .collect();
        let left = IsoMap::new(v.clone(), apex, left_imgs)?;
        TqMorphism::new(left, IsoMap::first_summand(v, &extra))
    }

    /// A pseudorandom morphism `V → W`: both legs are random embeddings into
    /// a random nondegenerate apex of dimension at most `max_apex`.
    pub fn random<R: Rng + ?Sized>(v: &QuadSpace, w: &QuadSpace, max_apex: usize, rng: &mut R) -> Result<TqMorphism> {
        let lo = v.dim().max(w.dim());
        let hi = max_apex.max(lo).min(v.dim() + w.dim() + 2);
        for _ in 0..32 {
            let half = rng.gen_range(lo / 2..=hi / 2).max(1);
            let arf = rng.gen_bool(0.5);
            let mut apex = QuadSpace::h0_power(half - arf as usize);
            if arf {
                apex = apex.orthogonal_sum(&QuadSpace::h1());
            }
            if let (Some(f), Some(g)) = (random_embedding(v, &apex, rng), random_embedding(w, &apex, rng)) {
                return TqMorphism::new(f, g);
            }
        }
        let apex = v.orthogonal_sum(w);
        let f = IsoMap::first_summand(v, w);
        let g = random_embedding(w, &apex, rng).unwrap_or_else(|| IsoMap::second_summand(v, w));
        TqMorphism::new(f, g)
    }
}

/// `T2 ∘ T1`.
pub fn compose_tq(t1: &TqMorphism, t2: &TqMorphism) -> Result<TqMorphism> {
    t1.then(t2)
}

/// `h' = right⁻¹ ∘ left ∘ h` when `left(h(D)) ⊆ right(W)`.
pub fn transport_embedding(h: &IsoMap, t: &TqMorphism) -> Result<Option<IsoMap>> {
    if h.target() != t.source() {
        return Err(Error::ObjectMismatch("embedding does not land in the source".into()));
    }
    let tr = Transporter::new(t);
    let imgs: Option<Vec<u64>> = h.images().iter().map(|&x| tr.pull(x)).collect();
    Ok(imgs.map(|imgs| IsoMap::new(h.source().clone(), t.target().clone(), imgs).expect("transport preserves q")))
}

impl fmt::Debug for TqMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Tq[dim {} -> apex {} <- dim {}; left {:?}; right {:?}]",
            self.source().dim(),
            self.apex().dim(),
            self.target().dim(),
            self.left,
            self.right
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const A: u64 = 0b01;
    const B: u64 = 0b10;

    #[test]
    fn identity_has_identity_epsilon() {
        let v = QuadSpace::parse("H0+H1").unwrap();
        assert!(TqMorphism::identity(&v).epsilon().is_identity());
    }

    #[test]
    fn orthogonal_blocks_give_zero_epsilon() {
        let h0 = QuadSpace::h0();
        let t = TqMorphism::new(
            IsoMap::first_summand(&h0, &h0),
            IsoMap::second_summand(&h0, &h0),
        )
        .unwrap();
        assert!(t.epsilon().is_zero());
    }

    #[test]
    fn epsilon_is_projection_after_left() {
        // X = W ⊥ W' in coordinates, so projecting onto W masks the low bits.
        let h0 = QuadSpace::h0();
        let x = QuadSpace::h0_power(2);
        for g in crate::quad::orthogonal_group(&x).unwrap() {
            let t = TqMorphism::new(g.clone(), IsoMap::first_summand(&h0, &h0)).unwrap();
            let masked: Vec<u64> = g.images().iter().map(|&img| img & 0b11).collect();
            assert_eq!(t.epsilon_images(), masked);
        }
    }

    #[test]
    fn inclusion_then_retraction() {
        let v = QuadSpace::h0();
        let extra = QuadSpace::h0();
        let t1 = TqMorphism::inclusion(&v, &extra).unwrap();
        let t2 = TqMorphism::retraction(&v, &extra).unwrap();
        let c = t1.then(&t2).unwrap();
        assert_eq!(c.source(), &v);
        assert_eq!(c.target(), &v);
        assert_eq!(c.apex().dim(), 4);
        assert!(c.epsilon().is_identity());
    }

    #[test]
    fn lift_examples() {
        let h0 = QuadSpace::h0();
        let id = TqMorphism::lift_linear(&F2Matrix::identity(2), &h0, &h0).unwrap();
        assert!(id.epsilon().is_identity());
        let zero = TqMorphism::lift_linear(&F2Matrix::zeros(2, 2), &h0, &h0).unwrap();
        assert!(zero.epsilon().is_zero());
        let f = F2Matrix::from_bits(&[vec![1, 0], vec![1, 1]]);
        let t = TqMorphism::lift_linear(&f, &h0, &h0).unwrap();
        assert_eq!(t.epsilon(), f);
    }

    #[test]
    fn lift_of_every_linear_map_on_small_spaces() {
        for (vs, ws) in [("H0", "H1"), ("H1", "H0+H0"), ("H0+H0", "H1")] {
            let v = QuadSpace::parse(vs).unwrap();
            let w = QuadSpace::parse(ws).unwrap();
            let cells = v.dim() * w.dim();
            for bits in 0u64..1 << cells {
                let images: Vec<u64> = (0..v.dim())
                    .map(|i| (bits >> (i * w.dim())) & w.full_mask())
                    .collect();
                let t = TqMorphism::lift_linear_images(&v, &w, &images).unwrap();
                assert_eq!(t.epsilon_images(), images);
            }
        }
    }

    #[test]
    fn transport_examples() {
        let h0 = QuadSpace::h0();
        let x1 = QuadSpace::line(true);
        let h = IsoMap::new(x1.clone(), h0.clone(), vec![A | B]).unwrap();
        let id = TqMorphism::identity(&h0);
        assert_eq!(transport_embedding(&h, &id).unwrap(), Some(h.clone()));
        let second = TqMorphism::new(
            IsoMap::first_summand(&h0, &h0),
            IsoMap::second_summand(&h0, &h0),
        )
        .unwrap();
        assert_eq!(transport_embedding(&h, &second).unwrap(), None);
        let incl = TqMorphism::inclusion(&h0, &h0).unwrap();
        let moved = transport_embedding(&h, &incl).unwrap().unwrap();
        assert_eq!(moved.images(), &[A | B]);
        assert_eq!(moved.target().dim(), 4);
    }

    #[test]
    fn relation_moves() {
        let h0 = QuadSpace::h0();
        let t = TqMorphism::inclusion(&h0, &h0).unwrap();
        assert_eq!(t.relation_move(&IsoMap::identity(t.apex())).unwrap(), t);
        let bigger = t
            .relation_move(&IsoMap::first_summand(t.apex(), &QuadSpace::h0()))
            .unwrap();
        assert_eq!(bigger.apex().dim(), 6);
        assert_eq!(bigger.epsilon(), t.epsilon());
        let bad = IsoMap::new(h0.clone(), h0.clone(), vec![A, B]).unwrap();
        assert!(t.relation_move(&bad).is_err());
    }

    #[test]
    fn projector_keeps_only_its_line() {
        let v = QuadSpace::h0_power(2);
        for u in 1..16u64 {
            let t = TqMorphism::line_projector(&v, u).unwrap();
            assert!(t.epsilon().is_identity());
            let tr = Transporter::new(&t);
            for x in 1..16u64 {
                assert_eq!(tr.pull(x).is_some(), x == u, "u={u} x={x}");
            }
        }
    }

    #[test]
    fn epsilon_is_functorial_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let objs: Vec<QuadSpace> = ["H0", "H1", "H0+H0", "H0+H1"]
            .iter()
            .map(|s| QuadSpace::parse(s).unwrap())
            .collect();
        for k in 0..200 {
            let a = &objs[k % 4];
            let b = &objs[(k / 4) % 4];
            let c = &objs[(k / 16) % 4];
            let t1 = TqMorphism::random(a, b, 8, &mut rng).unwrap();
            let t2 = TqMorphism::random(b, c, 8, &mut rng).unwrap();
            let comp = t1.then(&t2).unwrap();
            assert_eq!(comp.epsilon(), t2.epsilon().mul(&t1.epsilon()));
            assert_eq!(t1.then(&TqMorphism::identity(b)).unwrap().epsilon(), t1.epsilon());
        }
    }
}
