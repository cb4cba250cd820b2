//! Functors with a monomial action: each basis label goes to one label or
//! to zero (`P_F`, `P^F_V`, `iso_D`), exterior powers, and tensor products.

use std::sync::Arc;

use crate::category::{TqMorphism, Transporter};
use crate::error::{Error, Result};
use crate::f2::{k_subsets, wedge_coordinates, F2Vector};
use crate::quad::{enumerate_embeddings, QuadSpace};

use super::{sparse_columns, Cache, Functor, FunctorMap, FunctorRef, FunctorValue, Label};

const MAX_VECTOR_BASIS_DIM: usize = 20;

fn guard(w: &QuadSpace, what: &str) -> Result<()> {
    if w.dim() > MAX_VECTOR_BASIS_DIM {
        return Err(Error::TooLarge(format!(
            "{what} at an object of dimension {} has more than 2^{MAX_VECTOR_BASIS_DIM} basis elements",
            w.dim()
        )));
    }
    Ok(())
}

/// Applies `ε(T)` given by its basis images.
#[inline]
pub(crate) fn apply_images(images: &[u64], v: u64) -> u64 {
    let mut acc = 0;
    let mut rest = v;
    while rest != 0 {
        acc ^= images[rest.trailing_zeros() as usize];
        rest &= rest - 1;
    }
    acc
}

/// Builds `F(T)` for a functor whose labels move one at a time.
pub(crate) fn monomial_map(
    name: &str,
    src: Arc<FunctorValue>,
    tgt: Arc<FunctorValue>,
    mut image: impl FnMut(&Label) -> Option<Label>,
) -> Result<FunctorMap> {
    let cols = src
        .labels()
        .iter()
        .map(|l| match image(l) {
            None => Ok(Vec::new()),
            Some(out) => tgt.index_of(&out).map(|i| vec![i]).ok_or_else(|| {
                Error::SubfunctorDefect(format!("{name}: image {out} of {l} is not a basis label"))
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    FunctorMap::new(src, tgt.clone(), sparse_columns(tgt.dim(), &cols))
}

/// `P_F`: basis all vectors of `W`, acting through `ε`.
#[derive(Default)]
pub struct PFunctor {
    cache: Cache<Arc<FunctorValue>>,
}

impl PFunctor {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Functor for PFunctor {
    fn name(&self) -> String {
        "pf".into()
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        guard(w, "P_F")?;
        self.cache.get_or_try(w, || {
            let labels = (0..w.size()).map(Label::Vector).collect();
            Ok(Arc::new(FunctorValue::new(w.clone(), labels)))
        })
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let src = self.on_object(t.source())?;
        let tgt = self.on_object(t.target())?;
        let eps = t.epsilon_images();
        let cols: Vec<Vec<usize>> = (0..t.source().size())
            .map(|v| vec![apply_images(&eps, v) as usize])
            .collect();
        FunctorMap::new(src, tgt.clone(), sparse_columns(tgt.dim(), &cols))
    }
}

/// `P^F_V` for `V = F2^k`: basis all linear maps `V → W`.
pub struct PVFunctor {
    k: usize,
    cache: Cache<Arc<FunctorValue>>,
}

impl PVFunctor {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            cache: Cache::default(),
        }
    }
}

pub(crate) fn all_maps(k: usize, w: &QuadSpace) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..w.size()).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

impl Functor for PVFunctor {
    fn name(&self) -> String {
        format!("pfv:v={}", self.k)
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        if w.dim() * self.k > MAX_VECTOR_BASIS_DIM {
            return Err(Error::TooLarge("too many linear maps to list".into()));
        }
        self.cache.get_or_try(w, || {
            let labels = all_maps(self.k, w).into_iter().map(Label::Map).collect();
            Ok(Arc::new(FunctorValue::new(w.clone(), labels)))
        })
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let src = self.on_object(t.source())?;
        let tgt = self.on_object(t.target())?;
        let eps = t.epsilon_images();
        monomial_map(&self.name(), src, tgt, |l| match l {
            Label::Map(imgs) => Some(Label::Map(imgs.iter().map(|&v| apply_images(&eps, v)).collect())),
            _ => None,
        })
    }
}

/// `Λⁿ`: basis `e_S` over `n`-subsets `S` in lexicographic order.
pub struct Lambda {
    n: usize,
    cache: Cache<Arc<FunctorValue>>,
}

impl Lambda {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            cache: Cache::default(),
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }
}

impl Functor for Lambda {
    fn name(&self) -> String {
        format!("lambda:n={}", self.n)
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        self.cache.get_or_try(w, || {
            let labels = k_subsets(w.dim(), self.n).into_iter().map(Label::Wedge).collect();
            Ok(Arc::new(FunctorValue::new(w.clone(), labels)))
        })
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let src = self.on_object(t.source())?;
        let tgt = self.on_object(t.target())?;
        let m = t.target().dim();
        let eps: Vec<F2Vector> = t
            .epsilon_images()
            .into_iter()
            .map(|v| F2Vector::from_u64(m, v))
            .collect();
        let cols: Vec<F2Vector> = k_subsets(t.source().dim(), self.n)
            .iter()
            .map(|s| {
                let vs: Vec<F2Vector> = s.iter().map(|&i| eps[i].clone()).collect();
                wedge_coordinates(&vs, m)
            })
            .collect();
        FunctorMap::new(src, tgt.clone(), crate::f2::F2Matrix::from_columns(&cols, tgt.dim()))
    }
}

/// `iso_D`: basis the isometric embeddings `D → W`; a morphism moves `[h]`
/// to the pulled-back embedding when `left(h(D))` lies in the image of
/// `right`, and to zero otherwise.
pub struct Iso {
    d: QuadSpace,
    label: String,
    cache: Cache<Arc<FunctorValue>>,
}

impl Iso {
    pub fn new(d: QuadSpace, label: impl Into<String>) -> Self {
        Self {
            d,
            label: label.into(),
            cache: Cache::default(),
        }
    }

    /// `iso_{(x, alpha)}`.
    pub fn line(alpha: bool) -> Self {
        Self::new(QuadSpace::line(alpha), if alpha { "x1" } else { "x0" })
    }

    pub fn source_space(&self) -> &QuadSpace {
        &self.d
    }
}

impl Functor for Iso {
    fn name(&self) -> String {
        format!("iso:{}", self.label)
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        guard(w, "iso")?;
        self.cache.get_or_try(w, || {
            let labels = enumerate_embeddings(&self.d, w)
                .into_iter()
                .map(|h| Label::Embedding(h.images().to_vec()))
                .collect();
            Ok(Arc::new(FunctorValue::new(w.clone(), labels)))
        })
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let src = self.on_object(t.source())?;
        let tgt = self.on_object(t.target())?;
        let tr = Transporter::new(t);
        monomial_map(&self.name(), src, tgt, |l| match l {
            Label::Embedding(imgs) => imgs
                .iter()
                .map(|&x| tr.pull(x))
                .collect::<Option<Vec<u64>>>()
                .map(Label::Embedding),
            _ => None,
        })
    }
}

/// `F ⊗ G`, basis `f ⊗ g` with `F` major; acts by Kronecker products.
pub struct Tensor {
    left: FunctorRef,
    right: FunctorRef,
    cache: Cache<Arc<FunctorValue>>,
}

impl Tensor {
    pub fn new(left: FunctorRef, right: FunctorRef) -> Self {
        Self {
            left,
            right,
            cache: Cache::default(),
        }
    }

    pub fn factors(&self) -> (&FunctorRef, &FunctorRef) {
        (&self.left, &self.right)
    }
}

impl Functor for Tensor {
    fn name(&self) -> String {
        format!("{}(x){}", self.left.name(), self.right.name())
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        self.cache.get_or_try(w, || {
            let a = self.left.on_object(w)?;
            let b = self.right.on_object(w)?;
            let labels = a
                .labels()
                .iter()
                .flat_map(|x| {
                    b.labels()
                        .iter()
                        .map(move |y| Label::Tensor(Box::new(x.clone()), Box::new(y.clone())))
                })
                .collect();
            Ok(Arc::new(FunctorValue::new(w.clone(), labels)))
        })
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let a = self.left.on_morphism(t)?;
        let b = self.right.on_morphism(t)?;
        FunctorMap::new(
            self.on_object(t.source())?,
            self.on_object(t.target())?,
            a.matrix.kronecker(&b.matrix),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functors::ZeroFunctor;
    use crate::quad::IsoMap;

    fn sp(s: &str) -> QuadSpace {
        QuadSpace::parse(s).unwrap()
    }

    #[test]
    fn iso_dimensions() {
        assert_eq!(Iso::line(true).dim(&sp("H0")).unwrap(), 1);
        assert_eq!(Iso::line(false).dim(&sp("H1")).unwrap(), 0);
        assert_eq!(Iso::line(false).dim(&sp("H0+H0")).unwrap(), 9);
    }

    #[test]
    fn iota_dimensions() {
        let pf = PFunctor::new().on_object(&sp("H0")).unwrap();
        assert_eq!(pf.dim(), 4);
        assert_eq!(pf.labels()[3], Label::Vector(0b11));
        assert_eq!(Lambda::new(2).dim(&sp("H0")).unwrap(), 1);
        assert_eq!(Lambda::new(0).dim(&sp("0")).unwrap(), 1);
    }

    #[test]
    fn tensor_dimensions() {
        let t = Tensor::new(Arc::new(Lambda::new(1)), Arc::new(Iso::line(true)));
        assert_eq!(t.dim(&sp("H0")).unwrap(), 2);
        let t = Tensor::new(Arc::new(PFunctor::new()), Arc::new(Iso::line(true)));
        assert_eq!(t.dim(&sp("H0")).unwrap(), 4);
        let z = Tensor::new(Arc::new(PFunctor::new()), Arc::new(ZeroFunctor));
        assert_eq!(z.dim(&sp("H0+H1")).unwrap(), 0);
    }

    #[test]
    fn pf_acts_through_epsilon() {
        let h0 = sp("H0");
        let swap = IsoMap::new(h0.clone(), h0.clone(), vec![0b10, 0b01]).unwrap();
        let t = TqMorphism::from_isometry(&swap).unwrap();
        let m = PFunctor::new().on_morphism(&t).unwrap().matrix;
        assert!(m.get(2, 1) && m.get(1, 2) && m.get(0, 0) && m.get(3, 3));
        assert_eq!(m.rank(), 4);
    }
}
