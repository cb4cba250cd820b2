//! `Mix` functors, the swap involution, the orbit functor `m_{α,1}` and the
//! maps relating them.

use std::sync::Arc;

use crate::category::{TqMorphism, Transporter};
use crate::error::{Error, Result};
use crate::f2::{F2Matrix, F2Vector, Subspace};
use crate::quad::{enumerate_embeddings, QuadSpace};

use super::basic::{all_maps, apply_images, monomial_map, Iso, PFunctor};
use super::natural::{FnNatural, NaturalMap};
use super::{sparse_columns, Cache, Functor, FunctorMap, FunctorRef, FunctorValue, Label, SubFunctor, Tensor};

/// The subfunctor of `P^F_V ⊗ iso_D` spanned by the `[f]⊗[h]` with
/// `B(f(v_i), h(d_k)) = η(v_i ⊗ d_k)`; `η` is indexed by `i * dim D + k`.
pub struct MixGeneral {
    v: usize,
    d: QuadSpace,
    eta: F2Vector,
    label: String,
    cache: Cache<Arc<FunctorValue>>,
}

impl MixGeneral {
    pub fn new(v: usize, d: QuadSpace, eta: F2Vector, label: impl Into<String>) -> Result<Self> {
        if eta.len() != v * d.dim() {
            return Err(Error::InvalidParameter(format!(
                "η needs {} bits, got {}",
                v * d.dim(),
                eta.len()
            )));
        }
        Ok(Self {
            v,
            d,
            eta,
            label: label.into(),
            cache: Cache::default(),
        })
    }

    fn satisfies(&self, w: &QuadSpace, f: &[u64], h: &[u64]) -> bool {
        let dd = self.d.dim();
        f.iter().enumerate().all(|(i, &fv)| {
            h.iter()
                .enumerate()
                .all(|(k, &hd)| w.b(fv, hd) == self.eta.get(i * dd + k))
        })
    }
}

impl Functor for MixGeneral {
    fn name(&self) -> String {
        format!("mixgen:v={},d={},eta={}", self.v, self.label, self.eta)
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        if w.dim() * self.v > 20 {
            return Err(Error::TooLarge("too many linear maps to list".into()));
        }
        self.cache.get_or_try(w, || {
            let embs = enumerate_embeddings(&self.d, w);
            let mut labels = Vec::new();
            for f in all_maps(self.v, w) {
                for h in &embs {
                    if self.satisfies(w, &f, h.images()) {
                        labels.push(Label::Tensor(
                            Box::new(Label::Map(f.clone())),
                            Box::new(Label::Embedding(h.images().to_vec())),
                        ));
                    }
                }
            }
            Ok(Arc::new(FunctorValue::new(w.clone(), labels)))
        })
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let src = self.on_object(t.source())?;
        let tgt = self.on_object(t.target())?;
        let eps = t.epsilon_images();
        let tr = Transporter::new(t);
        monomial_map(&self.name(), src, tgt, |l| {
            let Label::Tensor(f, h) = l else { return None };
            let (Label::Map(f), Label::Embedding(h)) = (f.as_ref(), h.as_ref()) else {
                return None;
            };
            let h2: Vec<u64> = h.iter().map(|&x| tr.pull(x)).collect::<Option<_>>()?;
            let f2: Vec<u64> = f.iter().map(|&v| apply_images(&eps, v)).collect();
            Some(Label::Tensor(
                Box::new(Label::Map(f2)),
                Box::new(Label::Embedding(h2)),
            ))
        })
    }
}

/// `Mix_{α,β}` with basis the pairs `(w₁, w₂)`, `w₁ ≠ w₂`,
/// `q(w₁+w₂) = α`, `B(w₁, w₂) = β`, lexicographic.
pub struct MixAB {
    alpha: bool,
    beta: bool,
    cache: Cache<Arc<FunctorValue>>,
}

impl MixAB {
    pub fn new(alpha: bool, beta: bool) -> Self {
        Self {
            alpha,
            beta,
            cache: Cache::default(),
        }
    }
}

fn move_pair(eps: &[u64], tr: &Transporter, w1: u64, w2: u64) -> Option<(u64, u64)> {
    let u = tr.pull(w1 ^ w2)?;
    let (a, b) = (apply_images(eps, w1), apply_images(eps, w2));
    debug_assert_eq!(a ^ b, u);
    Some((a, b))
}

impl Functor for MixAB {
    fn name(&self) -> String {
        format!("mix:a={},b={}", self.alpha as u8, self.beta as u8)
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        if w.dim() > 12 {
            return Err(Error::TooLarge("Mix basis is listed pairwise".into()));
        }
        self.cache.get_or_try(w, || {
            let mut labels = Vec::new();
            for w1 in 0..w.size() {
                let row = w.b_row(w1);
                for w2 in 0..w.size() {
                    if w1 != w2
                        && w.q(w1 ^ w2) == self.alpha
                        && ((row & w2).count_ones() & 1 == 1) == self.beta
                    {
                        labels.push(Label::Pair(w1, w2));
                    }
                }
            }
            Ok(Arc::new(FunctorValue::new(w.clone(), labels)))
        })
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let src = self.on_object(t.source())?;
        let tgt = self.on_object(t.target())?;
        let eps = t.epsilon_images();
        let tr = Transporter::new(t);
        monomial_map(&self.name(), src, tgt, |l| {
            let Label::Pair(w1, w2) = *l else { return None };
            move_pair(&eps, &tr, w1, w2).map(|(a, b)| Label::Pair(a, b))
        })
    }
}

/// `m_{α,1}`: basis the unordered pairs `{w₁, w₂}` (orbits of the swap).
pub struct MFunctor {
    alpha: bool,
    cache: Cache<Arc<FunctorValue>>,
}

impl MFunctor {
    pub fn new(alpha: bool) -> Self {
        Self {
            alpha,
            cache: Cache::default(),
        }
    }

    pub fn alpha(&self) -> bool {
        self.alpha
    }
}

impl Functor for MFunctor {
    fn name(&self) -> String {
        format!("m:a={}", self.alpha as u8)
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        if w.dim() > 12 {
            return Err(Error::TooLarge("m basis is listed pairwise".into()));
        }
        self.cache.get_or_try(w, || {
            let mut labels = Vec::new();
            for w1 in 0..w.size() {
                let row = w.b_row(w1);
                for w2 in w1 + 1..w.size() {
                    if w.q(w1 ^ w2) == self.alpha && (row & w2).count_ones() & 1 == 1 {
                        labels.push(Label::UnorderedPair(w1, w2));
                    }
                }
            }
            Ok(Arc::new(FunctorValue::new(w.clone(), labels)))
        })
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let src = self.on_object(t.source())?;
        let tgt = self.on_object(t.target())?;
        let eps = t.epsilon_images();
        let tr = Transporter::new(t);
        monomial_map(&self.name(), src, tgt, |l| {
            let Label::UnorderedPair(w1, w2) = *l else { return None };
            move_pair(&eps, &tr, w1, w2).map(|(a, b)| Label::unordered(a, b))
        })
    }
}

/// Matrix of `(w₁, w₂) ↦ (w₂, w₁)` on a `Mix` value.
fn swap_matrix(value: &FunctorValue) -> Result<F2Matrix> {
    let cols = value
        .labels()
        .iter()
        .map(|l| match *l {
            Label::Pair(a, b) => value
                .index_of(&Label::Pair(b, a))
                .map(|i| vec![i])
                .ok_or_else(|| Error::NotWellDefined("swapped pair missing".into())),
            _ => Err(Error::InvalidParameter("swap acts on pair labels".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(sparse_columns(value.dim(), &cols))
}

/// The swap involution `τ` on `Mix_{α,β}`.
pub fn tau(alpha: bool, beta: bool) -> impl NaturalMap {
    let mix: FunctorRef = Arc::new(MixAB::new(alpha, beta));
    let src = mix.clone();
    FnNatural::new(format!("tau:a={},b={}", alpha as u8, beta as u8), mix.clone(), mix, move |w| {
        let value = src.on_object(w)?;
        swap_matrix(&value)
    })
}

/// `Σ_{α,β}`: the invariants of the swap.
pub fn sigma_functor(alpha: bool, beta: bool) -> SubFunctor {
    let mix: FunctorRef = Arc::new(MixAB::new(alpha, beta));
    SubFunctor::new(
        format!("sigma:a={},b={}", alpha as u8, beta as u8),
        mix,
        |_, value| {
            let t = swap_matrix(value)?;
            Ok(t.add(&F2Matrix::identity(value.dim())).kernel_basis())
        },
    )
}

fn pair_index_maps(m_val: &FunctorValue, mix_val: &FunctorValue) -> Result<Vec<(usize, usize, usize)>> {
    m_val
        .labels()
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let Label::UnorderedPair(a, b) = *l else {
                return Err(Error::InvalidParameter("expected unordered pairs".into()));
            };
            let i = mix_val.index_of(&Label::Pair(a, b));
            let j = mix_val.index_of(&Label::Pair(b, a));
            match (i, j) {
                (Some(i), Some(j)) => Ok((k, i, j)),
                _ => Err(Error::NotWellDefined("orbit missing from Mix".into())),
            }
        })
        .collect()
}

/// Norm `m_{α,1} → Mix_{α,1}`, `{w₁,w₂} ↦ (w₁,w₂) + (w₂,w₁)`.
pub fn norm(alpha: bool) -> impl NaturalMap {
    let m: FunctorRef = Arc::new(MFunctor::new(alpha));
    let mix: FunctorRef = Arc::new(MixAB::new(alpha, true));
    let (m2, mix2) = (m.clone(), mix.clone());
    FnNatural::new(format!("norm:a={}", alpha as u8), m, mix, move |w| {
        let mv = m2.on_object(w)?;
        let xv = mix2.on_object(w)?;
        let cols: Vec<Vec<usize>> = pair_index_maps(&mv, &xv)?
            .into_iter()
            .map(|(_, i, j)| vec![i, j])
            .collect();
        Ok(sparse_columns(xv.dim(), &cols))
    })
}

/// Orbit projection `Mix_{α,1} → m_{α,1}`, `(w₁,w₂) ↦ {w₁,w₂}`.
pub fn orbit_projection(alpha: bool) -> impl NaturalMap {
    let m: FunctorRef = Arc::new(MFunctor::new(alpha));
    let mix: FunctorRef = Arc::new(MixAB::new(alpha, true));
    let (m2, mix2) = (m.clone(), mix.clone());
    FnNatural::new(format!("orbit:a={}", alpha as u8), mix, m, move |w| {
        let mv = m2.on_object(w)?;
        let xv = mix2.on_object(w)?;
        let mut cols = vec![Vec::new(); xv.dim()];
        for (k, i, j) in pair_index_maps(&mv, &xv)? {
            cols[i].push(k);
            cols[j].push(k);
        }
        Ok(sparse_columns(mv.dim(), &cols))
    })
}

/// The bijection `[f]⊗[h] ↦ (f(a) + h(x), f(a))` from the general `Mix` with
/// `V = F2`, `D = (x, α)`, `η = β` onto `Mix_{α,β}`.
pub fn relabel(alpha: bool, beta: bool) -> Result<impl NaturalMap> {
    let general: FunctorRef = Arc::new(MixGeneral::new(
        1,
        QuadSpace::line(alpha),
        F2Vector::from_u64(1, beta as u64),
        if alpha { "x1" } else { "x0" },
    )?);
    let ab: FunctorRef = Arc::new(MixAB::new(alpha, beta));
    let (g2, ab2) = (general.clone(), ab.clone());
    Ok(FnNatural::new(
        format!("relabel:a={},b={}", alpha as u8, beta as u8),
        general,
        ab,
        move |w| {
            let gv = g2.on_object(w)?;
            let av = ab2.on_object(w)?;
            let cols = gv
                .labels()
                .iter()
                .map(|l| {
                    let Label::Tensor(f, h) = l else { unreachable!() };
                    let (Label::Map(f), Label::Embedding(h)) = (f.as_ref(), h.as_ref()) else {
                        unreachable!()
                    };
                    av.index_of(&Label::Pair(f[0] ^ h[0], f[0]))
                        .map(|i| vec![i])
                        .ok_or_else(|| Error::NotWellDefined("relabeled pair is not a Mix label".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(sparse_columns(av.dim(), &cols))
        },
    ))
}

/// `m_{α,1} → P_F ⊗ iso_α`, `{w₁,w₂} ↦ ([w₁]+[w₂]) ⊗ [x ↦ w₁+w₂]`.
pub fn m_inclusion(alpha: bool) -> impl NaturalMap {
    let m: FunctorRef = Arc::new(MFunctor::new(alpha));
    let iso: FunctorRef = Arc::new(Iso::line(alpha));
    let target: FunctorRef = Arc::new(Tensor::new(Arc::new(PFunctor::new()), iso.clone()));
    let m2 = m.clone();
    FnNatural::new(format!("m_incl:a={}", alpha as u8), m, target, move |w| {
        let mv = m2.on_object(w)?;
        let iv = iso.on_object(w)?;
        let di = iv.dim();
        let cols = mv
            .labels()
            .iter()
            .map(|l| {
                let Label::UnorderedPair(a, b) = *l else { unreachable!() };
                let h = iv
                    .index_of(&Label::Embedding(vec![a ^ b]))
                    .ok_or_else(|| Error::NotWellDefined("pair sum is not an embedding".into()))?;
                Ok(vec![a as usize * di + h, b as usize * di + h])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(sparse_columns(w.size() as usize * di, &cols))
    })
}

/// The image of the norm as a subspace of `Mix_{α,1}(W)`.
pub fn norm_image(alpha: bool, w: &QuadSpace) -> Result<Subspace> {
    let n = norm(alpha).at(w)?;
    Ok(n.matrix.column_space())
}
