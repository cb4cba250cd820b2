//! The polynomial filtration `k_d P_F` of `P_F`, the filtration `k_d m_{α,1}`
//! of the orbit functor, and the maps from its layers to `Λ^{d+1} ⊗ iso_α`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::f2::{enumerate_subspaces, wedge_coordinates, Echelon, F2Matrix, F2Vector, SpanMap, Subspace};
use crate::quad::QuadSpace;

use super::basic::{Iso, Lambda, PFunctor};
use super::exterior::{l_functor, lambda_iso};
use super::mix::{m_inclusion, MFunctor};
use super::natural::{compose, identity, tensor, FnNatural, NaturalMap, NaturalRef};
use super::{Functor, FunctorRef, Label, QuotientFunctor, SubFunctor, Tensor};

fn a(alpha: bool) -> u8 {
    alpha as u8
}

/// All elements of the span of `basis`, indexed by coefficient masks.
pub fn span_elements(basis: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &b in basis {
        let more: Vec<u64> = out.iter().map(|&v| v ^ b).collect();
        out.extend(more);
    }
    out
}

/// Subspaces of the span of `ambient` of dimension `k`, each by a basis.
fn subspaces_in(ambient: &[u64], k: usize) -> impl Iterator<Item = Vec<u64>> + '_ {
    enumerate_subspaces(ambient.len(), k).map(move |s| {
        s.basis()
            .iter()
            .map(|c| c.ones().fold(0u64, |acc, i| acc ^ ambient[i]))
            .collect()
    })
}

/// `k_d P_F`, spanned by `Σ_{z∈L} [z]` over `(d+1)`-dimensional `L`.
pub fn kdpf(d: usize) -> Arc<SubFunctor> {
    Arc::new(SubFunctor::new(format!("kdpf:d={d}"), Arc::new(PFunctor::new()), move |w, value| {
        let n = value.dim();
        if d + 1 > w.dim() {
            return Ok(Subspace::zero(n));
        }
        let units: Vec<u64> = (0..w.dim()).map(|i| 1u64 << i).collect();
        let mut e = Echelon::new(n);
        for l in subspaces_in(&units, d + 1) {
            e.insert(F2Vector::from_indices(n, span_elements(&l).into_iter().map(|z| z as usize)));
            if e.is_full() {
                break;
            }
        }
        Ok(e.into_subspace())
    }))
}

/// `q_d P_F = P_F / k_d P_F`.
pub fn qdpf(d: usize) -> Arc<QuotientFunctor> {
    Arc::new(QuotientFunctor::new(format!("qdpf:d={d}"), kdpf(d)))
}

/// `f_d : P_F → q_d P_F`.
pub fn f_d(quotient: Arc<QuotientFunctor>) -> FnNatural {
    let q2 = quotient.clone();
    FnNatural::new(
        format!("f[{}]", quotient.name()),
        Arc::new(PFunctor::new()),
        quotient,
        move |w| q2.projection_matrix(w),
    )
}

/// `g_d : k_d P_F → Λ^{d+1}`, `Σ_{z∈L}[z] ↦ l_1 ∧ … ∧ l_{d+1}`; fails with
/// `NotWellDefined` if the assignment is inconsistent on relations.
pub fn g_d(kd: Arc<SubFunctor>, d: usize) -> FnNatural {
    let k2 = kd.clone();
    FnNatural::new(format!("g:d={d}"), kd, Arc::new(Lambda::new(d + 1)), move |w| {
        let sub = k2.subspace(w)?;
        let n = sub.ambient_dim();
        let dim = w.dim();
        let m = crate::f2::binomial(dim, d + 1);
        if sub.dim() == 0 {
            return Ok(F2Matrix::zeros(m, 0));
        }
        let units: Vec<u64> = (0..dim).map(|i| 1u64 << i).collect();
        let mut map = SpanMap::new(n, m);
        for l in subspaces_in(&units, d + 1) {
            let ind = F2Vector::from_indices(n, span_elements(&l).into_iter().map(|z| z as usize));
            let vs: Vec<F2Vector> = l.iter().map(|&v| F2Vector::from_u64(dim, v)).collect();
            map.insert(ind, wedge_coordinates(&vs, dim))?;
        }
        let cols = sub
            .basis()
            .iter()
            .map(|b| {
                map.eval(b)
                    .ok_or_else(|| Error::NotWellDefined("k_d P_F vector outside the generators".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(F2Matrix::from_columns(&cols, m))
    })
}

/// `k_d m_{α,1}`, spanned by `Σ_{z∈L} [{x+z, y+z}]` over `d`-dimensional
/// `L ⊆ (x+y)^⊥`. Generators only mix pairs with the same sum, so the
/// span is assembled block by block.
pub fn kd_m(alpha: bool, d: usize) -> Arc<SubFunctor> {
    Arc::new(SubFunctor::new(
        format!("kd_m:a={},d={d}", a(alpha)),
        Arc::new(MFunctor::new(alpha)),
        move |w, value| {
            let n = value.dim();
            let mut blocks: HashMap<u64, Vec<(usize, u64)>> = HashMap::new();
            for (i, l) in value.labels().iter().enumerate() {
                let Label::UnorderedPair(x, y) = *l else {
                    return Err(Error::InvalidParameter("m values carry unordered pairs".into()));
                };
                blocks.entry(x ^ y).or_default().push((i, x));
            }
            let mut keys: Vec<u64> = blocks.keys().copied().collect();
            keys.sort_unstable();
            let mut gens = Vec::new();
            for u in keys {
                let block = &blocks[&u];
                let local: HashMap<u64, usize> = block
                    .iter()
                    .enumerate()
                    .map(|(k, &(_, x))| (x.min(x ^ u), k))
                    .collect();
                let perp = w.orthogonal_complement(&[u]);
                if d > perp.len() {
                    continue;
                }
                let mut e = Echelon::new(block.len());
                'outer: for l in subspaces_in(&perp, d) {
                    let elems = span_elements(&l);
                    if elems[1..].contains(&u) {
                        continue;
                    }
                    for &(_, x) in block {
                        let mut v = F2Vector::zeros(block.len());
                        for &z in &elems {
                            let y = x ^ z;
                            v.flip(local[&y.min(y ^ u)]);
                        }
                        e.insert(v);
                        if e.is_full() {
                            break 'outer;
                        }
                    }
                }
                for b in e.into_subspace().basis() {
                    gens.push(F2Vector::from_indices(n, b.ones().map(|k| block[k].0)));
                }
            }
            Ok(Subspace::span(gens, n))
        },
    ))
}

/// The layer `k_d m / k_{d+1} m`, in coordinates of `k_d m`.
pub fn layer(upper: Arc<SubFunctor>, lower: Arc<SubFunctor>, name: impl Into<String>) -> Arc<QuotientFunctor> {
    let name = name.into();
    let rel = Arc::new(SubFunctor::relative(format!("{name}:sub"), lower, upper));
    Arc::new(QuotientFunctor::new(name, rel))
}

/// `i_d : k_d m_{α,1} → k_d P_F ⊗ iso_α`; fails with `SubfunctorDefect` if
/// some image leaves `k_d P_F ⊗ iso_α`.
pub fn i_d(alpha: bool, kdm: Arc<SubFunctor>, kd: Arc<SubFunctor>) -> FnNatural {
    let iso: FunctorRef = Arc::new(Iso::line(alpha));
    let target: FunctorRef = Arc::new(Tensor::new(kd.clone(), iso.clone()));
    let incl = m_inclusion(alpha);
    let km = kdm.clone();
    FnNatural::new(format!("i[{}]", kdm.name()), kdm, target, move |w| {
        let di = iso.dim(w)?;
        let pf = kd.subspace(w)?;
        let size = pf.ambient_dim();
        let full = incl.at(w)?.matrix.mul(&km.inclusion_matrix(w)?);
        let cols = full
            .columns()
            .iter()
            .map(|col| {
                let mut out = F2Vector::zeros(pf.dim() * di);
                for j in 0..di {
                    let part = F2Vector::from_indices(size, (0..size).filter(|&v| col.get(v * di + j)));
                    let c = pf.coordinates(&part).ok_or_else(|| {
                        Error::SubfunctorDefect("image of k_d m leaves k_d P_F ⊗ iso".into())
                    })?;
                    for k in c.ones() {
                        out.set(k * di + j, true);
                    }
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(F2Matrix::from_columns(&cols, pf.dim() * di))
    })
}

/// `Φ_d = (g_d ⊗ iso_α) ∘ i_d : k_d m_{α,1} → Λ^{d+1} ⊗ iso_α`.
pub fn phi_d(alpha: bool, d: usize, kdm: Arc<SubFunctor>) -> FnNatural {
    let kd = kdpf(d);
    let inc: NaturalRef = Arc::new(i_d(alpha, kdm, kd.clone()));
    let iso: FunctorRef = Arc::new(Iso::line(alpha));
    let g: NaturalRef = Arc::new(g_d(kd, d));
    let gi: NaturalRef = Arc::new(tensor(g, Arc::new(identity(iso))));
    let composite = compose(inc.clone(), gi);
    let name = composite.name();
    let target = lambda_iso(alpha, d + 1);
    FnNatural::new(name, inc.source(), target, move |w| Ok(composite.at(w)?.matrix))
}

/// The induced map `σ : k_d m / k_{d+1} m → L^{d+1}_α`, where `quotient`
/// is the layer built on `upper = k_d m`. Fails with `NotWellDefined` if
/// `Φ_d` does not vanish on `k_{d+1} m`, and with `SubfunctorDefect` if a
/// value leaves `L^{d+1}_α`.
pub fn sigma_layer(alpha: bool, d: usize, upper: Arc<SubFunctor>, quotient: Arc<QuotientFunctor>) -> FnNatural {
    let inner = quotient.sub().clone();
    let lf = l_functor(alpha, d + 1);
    let phi = phi_d(alpha, d, upper);
    let l2 = lf.clone();
    FnNatural::new(format!("sigma_layer:a={},d={d}", a(alpha)), quotient, lf, move |w| {
        let p = phi.at(w)?.matrix;
        let rel = inner.subspace(w)?;
        for b in rel.basis() {
            if !p.mul_vec(b).is_zero() {
                return Err(Error::NotWellDefined("Φ does not vanish on the next filtration step".into()));
            }
        }
        let target = l2.subspace(w)?;
        let n = rel.ambient_dim();
        let cols = rel
            .non_pivots()
            .into_iter()
            .map(|i| {
                target
                    .coordinates(&p.mul_vec(&F2Vector::unit(n, i)))
                    .ok_or_else(|| Error::SubfunctorDefect("a layer value leaves L".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(F2Matrix::from_columns(&cols, target.dim()))
    })
}

/// The head map `m_{α,1} → iso_α`, `[{w₁, w₂}] ↦ [x ↦ w₁+w₂]`.
pub fn head_map(alpha: bool) -> FnNatural {
    let m = Arc::new(MFunctor::new(alpha));
    let iso = Arc::new(Iso::line(alpha));
    let (m2, iso2) = (m.clone(), iso.clone());
    FnNatural::new(format!("head:a={}", a(alpha)), m, iso, move |w| {
        let mv = m2.on_object(w)?;
        let iv = iso2.on_object(w)?;
        let cols = mv
            .labels()
            .iter()
            .map(|l| {
                let Label::UnorderedPair(x, y) = *l else {
                    return Err(Error::InvalidParameter("m values carry unordered pairs".into()));
                };
                iv.index_of(&Label::Embedding(vec![x ^ y]))
                    .map(|i| vec![i])
                    .ok_or_else(|| Error::NotWellDefined("pair sum is not an embedding".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(super::sparse_columns(iv.dim(), &cols))
    })
}

/// An explicit element of `k_d m_{α,1}(H0^{⊥(d+1)})`: with `a_i, b_i` the
/// hyperbolic pairs, `Σ_{z∈L} [{y+z, y'+z}]` for `L = ⟨a_1, …, a_d⟩` and
/// `{y, y'} = {a_0, b_0}` (`α = 1`) or `{a_0, a_0+b_0}` (`α = 0`).
pub struct Witness {
    pub space: QuadSpace,
    pub pair: (u64, u64),
    pub l_basis: Vec<u64>,
    /// The element in coordinates of `m_{α,1}`.
    pub element: F2Vector,
    /// `a_1 ∧ … ∧ a_d ∧ (y+y') ⊗ [h]` in coordinates of `Λ^{d+1} ⊗ iso_α`.
    pub expected: F2Vector,
}

pub fn witness(alpha: bool, d: usize) -> Result<Witness> {
    let space = QuadSpace::h0_power(d + 1);
    let (y, y2) = if alpha { (0b01, 0b10) } else { (0b01, 0b11) };
    let l_basis: Vec<u64> = (1..=d).map(|i| 1u64 << (2 * i)).collect();
    let m = MFunctor::new(alpha).on_object(&space)?;
    let idx = span_elements(&l_basis)
        .into_iter()
        .map(|z| {
            m.index_of(&Label::unordered(y ^ z, y2 ^ z))
                .ok_or_else(|| Error::InvalidParameter("witness pair is not an m label".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let element = F2Vector::from_indices(m.dim(), idx);
    let iso = Iso::line(alpha).on_object(&space)?;
    let di = iso.dim();
    let j = iso
        .index_of(&Label::Embedding(vec![y ^ y2]))
        .ok_or_else(|| Error::InvalidParameter("y+y' is not an embedding".into()))?;
    let dim = space.dim();
    let mut vs: Vec<F2Vector> = l_basis.iter().map(|&v| F2Vector::from_u64(dim, v)).collect();
    vs.push(F2Vector::from_u64(dim, y ^ y2));
    let wedge = wedge_coordinates(&vs, dim);
    let expected = F2Vector::from_indices(wedge.len() * di, wedge.ones().map(|s| s * di + j));
    Ok(Witness {
        space,
        pair: (y, y2),
        l_basis,
        element,
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::binomial;

    fn sp(s: &str) -> QuadSpace {
        QuadSpace::parse(s).unwrap()
    }

    #[test]
    fn polynomial_filtration_dims() {
        let w = sp("H0+H0");
        for d in 0..=4 {
            let expected: usize = (d + 1..=4).map(|j| binomial(4, j)).sum();
            assert_eq!(kdpf(d).dim(&w).unwrap(), expected);
            assert_eq!(qdpf(d).dim(&w).unwrap(), 16 - expected);
        }
        assert_eq!(kdpf(1).dim(&sp("H0")).unwrap(), 1);
    }

    #[test]
    fn g_is_onto_lambda() {
        let w = sp("H0+H1");
        for d in 0..3 {
            let g = g_d(kdpf(d), d).at(&w).unwrap();
            assert_eq!(g.rank(), binomial(4, d + 1));
        }
    }

    #[test]
    fn m_filtration_at_h0() {
        let h0 = sp("H0");
        assert_eq!(kd_m(true, 0).dim(&h0).unwrap(), 1);
        assert_eq!(kd_m(true, 1).dim(&h0).unwrap(), 0);
    }

    #[test]
    fn witness_maps_to_expected_wedge() {
        for alpha in [false, true] {
            for d in 0..=2 {
                let wit = witness(alpha, d).unwrap();
                let kdm = kd_m(alpha, d);
                let coords = kdm.coordinates(&wit.space, &wit.element).unwrap();
                let phi = phi_d(alpha, d, kdm).at(&wit.space).unwrap();
                let image = phi.matrix.mul_vec(&coords);
                assert!(!image.is_zero());
                assert_eq!(image, wit.expected);
            }
        }
    }

    #[test]
    fn head_kernel_is_k1() {
        let w = sp("H0+H1");
        for alpha in [false, true] {
            let h = head_map(alpha).at(&w).unwrap();
            assert_eq!(h.rank(), Iso::line(alpha).dim(&w).unwrap());
            assert_eq!(h.matrix.kernel_basis(), *kd_m(alpha, 1).subspace(&w).unwrap());
        }
    }

    #[test]
    fn layer_maps_into_l() {
        let w = sp("H0+H0");
        for alpha in [false, true] {
            for d in 0..3 {
                let upper = kd_m(alpha, d);
                let lower = kd_m(alpha, d + 1);
                let q = layer(upper.clone(), lower, "layer");
                let s = sigma_layer(alpha, d, upper, q.clone()).at(&w).unwrap();
                assert_eq!(s.rank(), q.dim(&w).unwrap());
            }
        }
    }
}
