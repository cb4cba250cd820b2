//! `Λⁿ ⊗ iso_α`, the maps `μ_n` (wedge with `h(x)`) and `ν_n` (contraction
//! against `h(x)`), and the subfunctors `Kⁿ_α`, `Lⁿ_α` cut out by them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::f2::{k_subsets, subset_rank, wedge_coordinates, F2Matrix, F2Vector, Subspace};
use crate::quad::QuadSpace;

use super::basic::{Iso, Lambda};
use super::natural::{restrict, FnNatural, NaturalRef};
use super::{sparse_columns, Functor, FunctorRef, FunctorValue, Label, SubFunctor, Tensor};

fn a(alpha: bool) -> u8 {
    alpha as u8
}

/// `Λⁿ ⊗ iso_{(x,α)}`.
pub fn lambda_iso(alpha: bool, n: usize) -> Arc<Tensor> {
    Arc::new(Tensor::new(Arc::new(Lambda::new(n)), Arc::new(Iso::line(alpha))))
}

/// `h(x)` for every basis embedding of `iso_α(W)`.
fn embedding_vectors(iso: &FunctorValue) -> Vec<u64> {
    iso.labels()
        .iter()
        .map(|l| match l {
            Label::Embedding(v) => v[0],
            _ => unreachable!("iso values carry embedding labels"),
        })
        .collect()
}

fn iso_vectors(alpha: bool, w: &QuadSpace) -> Result<Vec<u64>> {
    let value = Iso::line(alpha).on_object(w)?;
    Ok(embedding_vectors(&value))
}

/// Matrix of `μ_n : Λⁿ⊗iso → Λⁿ⁺¹⊗iso`, `e_S⊗[h] ↦ (e_S ∧ h(x))⊗[h]`.
pub fn mu_n_matrix(alpha: bool, n: usize, w: &QuadSpace) -> Result<F2Matrix> {
    let hs = iso_vectors(alpha, w)?;
    let di = hs.len();
    let dim = w.dim();
    let subsets = k_subsets(dim, n);
    let mut cols = Vec::with_capacity(subsets.len() * di);
    for s in &subsets {
        for (j, &u) in hs.iter().enumerate() {
            let mut col = Vec::new();
            for i in (0..dim).filter(|&i| u >> i & 1 == 1 && !s.contains(&i)) {
                let mut t = s.clone();
                t.push(i);
                t.sort_unstable();
                col.push(subset_rank(dim, &t) * di + j);
            }
            cols.push(col);
        }
    }
    Ok(sparse_columns(crate::f2::binomial(dim, n + 1) * di, &cols))
}

/// Matrix of `ν_n : Λⁿ⁺¹⊗iso → Λⁿ⊗iso`,
/// `e_S⊗[h] ↦ Σ_{i∈S} B(e_i, h(x)) e_{S∖i}⊗[h]`.
pub fn nu_n_matrix(alpha: bool, n: usize, w: &QuadSpace) -> Result<F2Matrix> {
    let hs = iso_vectors(alpha, w)?;
    let di = hs.len();
    let dim = w.dim();
    let subsets = k_subsets(dim, n + 1);
    let mut cols = Vec::with_capacity(subsets.len() * di);
    for s in &subsets {
        for (j, &u) in hs.iter().enumerate() {
            let bu = w.b_row(u);
            let mut col = Vec::new();
            for (pos, &i) in s.iter().enumerate() {
                if bu >> i & 1 == 1 {
                    let mut t = s.clone();
                    t.remove(pos);
                    col.push(subset_rank(dim, &t) * di + j);
                }
            }
            cols.push(col);
        }
    }
    Ok(sparse_columns(crate::f2::binomial(dim, n) * di, &cols))
}

pub fn mu_n(alpha: bool, n: usize) -> FnNatural {
    FnNatural::new(
        format!("mu:a={},n={n}", a(alpha)),
        lambda_iso(alpha, n),
        lambda_iso(alpha, n + 1),
        move |w| mu_n_matrix(alpha, n, w),
    )
}

pub fn nu_n(alpha: bool, n: usize) -> FnNatural {
    FnNatural::new(
        format!("nu:a={},n={n}", a(alpha)),
        lambda_iso(alpha, n + 1),
        lambda_iso(alpha, n),
        move |w| nu_n_matrix(alpha, n, w),
    )
}

/// `μ : iso_α → Λ¹⊗iso_α`, `[h] ↦ h(x)⊗[h]`.
pub fn mu(alpha: bool) -> FnNatural {
    FnNatural::new(
        format!("mu:a={}", a(alpha)),
        Arc::new(Iso::line(alpha)),
        lambda_iso(alpha, 1),
        move |w| {
            let hs = iso_vectors(alpha, w)?;
            let di = hs.len();
            let cols: Vec<Vec<usize>> = hs
                .iter()
                .enumerate()
                .map(|(j, &u)| (0..w.dim()).filter(|&i| u >> i & 1 == 1).map(|i| i * di + j).collect())
                .collect();
            Ok(sparse_columns(w.dim() * di, &cols))
        },
    )
}

/// `ν : Λ¹⊗iso_α → iso_α`, `w⊗[h] ↦ B(w, h(x))[h]`.
pub fn nu(alpha: bool) -> FnNatural {
    FnNatural::new(
        format!("nu:a={}", a(alpha)),
        lambda_iso(alpha, 1),
        Arc::new(Iso::line(alpha)),
        move |w| {
            let hs = iso_vectors(alpha, w)?;
            let di = hs.len();
            let mut cols = Vec::with_capacity(w.dim() * di);
            for i in 0..w.dim() {
                for (j, &u) in hs.iter().enumerate() {
                    cols.push(if w.b(1 << i, u) { vec![j] } else { Vec::new() });
                }
            }
            Ok(sparse_columns(di, &cols))
        },
    )
}

/// `Kⁿ_α = ker μ_n`.
pub fn k_functor(alpha: bool, n: usize) -> Arc<SubFunctor> {
    Arc::new(SubFunctor::new(
        format!("K:a={},n={n}", a(alpha)),
        lambda_iso(alpha, n),
        move |w, _| Ok(mu_n_matrix(alpha, n, w)?.kernel_basis()),
    ))
}

/// Span of `e_T ∧ h(x) ⊗ [h]` over `(n-1)`-subsets `T`.
pub fn k_span(alpha: bool, n: usize, w: &QuadSpace) -> Result<Subspace> {
    if n == 0 {
        return Err(Error::InvalidParameter("K needs n >= 1".into()));
    }
    let m = mu_n_matrix(alpha, n - 1, w)?;
    Ok(m.column_space())
}

/// `Lⁿ_α = ker(ν_{n-1} restricted to Kⁿ)` for `n ≥ 2`, and `L¹ = K¹`.
pub fn l_functor(alpha: bool, n: usize) -> Arc<SubFunctor> {
    let k = k_functor(alpha, n);
    let name = format!("L:a={},n={n}", a(alpha));
    if n <= 1 {
        let k2 = k.clone();
        return Arc::new(SubFunctor::new(name, lambda_iso(alpha, n), move |w, _| {
            Ok((*k2.subspace(w)?).clone())
        }));
    }
    Arc::new(SubFunctor::new(name, lambda_iso(alpha, n), move |w, _| {
        let kn = k.subspace(w)?;
        let nu = nu_n_matrix(alpha, n - 1, w)?;
        let basis = F2Matrix::from_columns(kn.basis(), kn.ambient_dim());
        let images = nu.mul(&basis);
        let combos = images.kernel_basis();
        Ok(Subspace::span(
            combos.basis().iter().map(|c| kn.combine(c)),
            kn.ambient_dim(),
        ))
    }))
}

/// Span of `z ∧ h(x) ⊗ [h]` over `z ∈ Λⁿ⁻¹(h(x)^⊥)`.
pub fn l_span(alpha: bool, n: usize, w: &QuadSpace) -> Result<Subspace> {
    if n == 0 {
        return Err(Error::InvalidParameter("L needs n >= 1".into()));
    }
    let hs = iso_vectors(alpha, w)?;
    let di = hs.len();
    let dim = w.dim();
    let total = crate::f2::binomial(dim, n) * di;
    let mut gens = Vec::new();
    for (j, &u) in hs.iter().enumerate() {
        let perp = w.orthogonal_complement(&[u]);
        for t in k_subsets(perp.len(), n - 1) {
            let mut vs: Vec<F2Vector> = t.iter().map(|&i| F2Vector::from_u64(dim, perp[i])).collect();
            vs.push(F2Vector::from_u64(dim, u));
            let coords = wedge_coordinates(&vs, dim);
            gens.push(F2Vector::from_indices(total, coords.ones().map(|s| s * di + j)));
        }
    }
    Ok(Subspace::span(gens, total))
}

/// `ν_n^K : Kⁿ⁺¹ → Kⁿ`.
pub fn nu_k(alpha: bool, n: usize) -> FnNatural {
    let phi: NaturalRef = Arc::new(nu_n(alpha, n));
    restrict(phi, k_functor(alpha, n + 1), k_functor(alpha, n))
}

/// `ν̃ : Kⁿ⁺¹ → Lⁿ`, the corestriction of `ν_n^K`.
pub fn nu_tilde(alpha: bool, n: usize) -> FnNatural {
    let phi: NaturalRef = Arc::new(nu_n(alpha, n));
    restrict(phi, k_functor(alpha, n + 1), l_functor(alpha, n))
}

/// `σ : K¹ → iso_α`, `h(x)⊗[h] ↦ [h]`.
pub fn sigma_k1(alpha: bool) -> FnNatural {
    let k1 = k_functor(alpha, 1);
    let k1b = k1.clone();
    FnNatural::new(
        format!("sigma_K1:a={}", a(alpha)),
        k1,
        Arc::new(Iso::line(alpha)),
        move |w| {
            let hs = iso_vectors(alpha, w)?;
            let di = hs.len();
            let sub = k1b.subspace(w)?;
            let cols = sub
                .basis()
                .iter()
                .map(|b| {
                    let mut col = Vec::new();
                    for (j, &u) in hs.iter().enumerate() {
                        let comp = (0..w.dim())
                            .filter(|&i| b.get(i * di + j))
                            .fold(0u64, |acc, i| acc | 1 << i);
                        if comp == u {
                            col.push(j);
                        } else if comp != 0 {
                            return Err(Error::NotWellDefined(
                                "K¹ component is not a multiple of h(x)".into(),
                            ));
                        }
                    }
                    Ok(col)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(sparse_columns(di, &cols))
        },
    )
}

/// The functor `Λⁿ⊗iso_α` as a trait object.
pub fn lambda_iso_ref(alpha: bool, n: usize) -> FunctorRef {
    lambda_iso(alpha, n)
}
