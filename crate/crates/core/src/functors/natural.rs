//! Natural maps between functors and the naturality test against a family
//! of morphisms.

use std::sync::Arc;

use crate::category::TqMorphism;
use crate::error::{Error, Result};
use crate::f2::F2Matrix;
use crate::quad::QuadSpace;

use super::{FunctorMap, FunctorRef, SubFunctor};

/// A family `φ_W : F(W) → G(W)`.
pub trait NaturalMap: Send + Sync {
    fn name(&self) -> String;
    fn source(&self) -> FunctorRef;
    fn target(&self) -> FunctorRef;
    fn at(&self, w: &QuadSpace) -> Result<FunctorMap>;
}

pub type NaturalRef = Arc<dyn NaturalMap>;

type Component = dyn Fn(&QuadSpace) -> Result<F2Matrix> + Send + Sync;

/// A natural map given by a closure producing each component matrix.
pub struct FnNatural {
    name: String,
    source: FunctorRef,
    target: FunctorRef,
    component: Box<Component>,
}

impl FnNatural {
    pub fn new(
        name: impl Into<String>,
        source: FunctorRef,
        target: FunctorRef,
        component: impl Fn(&QuadSpace) -> Result<F2Matrix> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            source,
            target,
            component: Box::new(component),
        }
    }
}

impl NaturalMap for FnNatural {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn source(&self) -> FunctorRef {
        self.source.clone()
    }

    fn target(&self) -> FunctorRef {
        self.target.clone()
    }

    fn at(&self, w: &QuadSpace) -> Result<FunctorMap> {
        let m = (self.component)(w)?;
        FunctorMap::new(self.source.on_object(w)?, self.target.on_object(w)?, m)
    }
}

/// The identity natural map of `F`.
pub fn identity(f: FunctorRef) -> FnNatural {
    let g = f.clone();
    FnNatural::new(format!("id[{}]", f.name()), f.clone(), f, move |w| {
        Ok(F2Matrix::identity(g.dim(w)?))
    })
}

/// `second ∘ first`.
pub fn compose(first: NaturalRef, second: NaturalRef) -> FnNatural {
    let name = format!("{}∘{}", second.name(), first.name());
    let (s, t) = (first.source(), second.target());
    FnNatural::new(name, s, t, move |w| {
        let a = first.at(w)?;
        let b = second.at(w)?;
        if a.matrix.rows() != b.matrix.cols() {
            return Err(Error::ObjectMismatch("composed natural maps do not meet".into()));
        }
        Ok(b.matrix.mul(&a.matrix))
    })
}

/// `φ ⊗ ψ : F ⊗ F' → G ⊗ G'` with the Kronecker convention of `Tensor`.
pub fn tensor(phi: NaturalRef, psi: NaturalRef) -> FnNatural {
    let name = format!("{}(x){}", phi.name(), psi.name());
    let s: FunctorRef = Arc::new(super::Tensor::new(phi.source(), psi.source()));
    let t: FunctorRef = Arc::new(super::Tensor::new(phi.target(), psi.target()));
    FnNatural::new(name, s, t, move |w| {
        Ok(phi.at(w)?.matrix.kronecker(&psi.at(w)?.matrix))
    })
}

/// Restriction of `φ : F → G` to subfunctors `F' ⊆ F` and `G' ⊆ G`; fails
/// with `SubfunctorDefect` if `φ(F'(W)) ⊄ G'(W)`.
pub fn restrict(phi: NaturalRef, source: Arc<SubFunctor>, target: Arc<SubFunctor>) -> FnNatural {
    let name = format!("{}|{}", phi.name(), source.name_str());
    let (s, t): (FunctorRef, FunctorRef) = (source.clone(), target.clone());
    FnNatural::new(name, s, t, move |w| {
        let a = phi.at(w)?;
        let src = source.subspace(w)?;
        let tgt = target.subspace(w)?;
        let cols = src
            .basis()
            .iter()
            .map(|b| {
                tgt.coordinates(&a.matrix.mul_vec(b)).ok_or_else(|| {
                    Error::SubfunctorDefect(format!("{} does not land in {}", phi.name(), target.name_str()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(F2Matrix::from_columns(&cols, tgt.dim()))
    })
}

/// `φ` with the entry `(0, 0)` of every nonempty component flipped; a
/// negative control for the naturality test.
pub fn corrupted(phi: NaturalRef) -> FnNatural {
    let name = format!("corrupt[{}]", phi.name());
    let (s, t) = (phi.source(), phi.target());
    FnNatural::new(name, s, t, move |w| {
        let mut m = phi.at(w)?.matrix;
        if m.rows() > 0 && m.cols() > 0 {
            let v = m.get(0, 0);
            m.set(0, 0, !v);
        }
        Ok(m)
    })
}

#[derive(Clone, Debug, Default)]
pub struct NaturalityReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl NaturalityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Tests `φ_Z ∘ F(T) = G(T) ∘ φ_W` for every supplied `T : W → Z`.
pub fn natural_check(phi: &dyn NaturalMap, morphisms: &[TqMorphism]) -> Result<NaturalityReport> {
    let f = phi.source();
    let g = phi.target();
    let mut report = NaturalityReport::default();
    for (k, t) in morphisms.iter().enumerate() {
        let ft = f.on_morphism(t)?;
        let gt = g.on_morphism(t)?;
        let pw = phi.at(t.source())?;
        let pz = phi.at(t.target())?;
        if pz.matrix.cols() != ft.matrix.rows() || gt.matrix.cols() != pw.matrix.rows() {
            return Err(Error::ObjectMismatch(format!(
                "{}: components do not match the functor values",
                phi.name()
            )));
        }
        report.checked += 1;
        if pz.matrix.mul(&ft.matrix) != gt.matrix.mul(&pw.matrix) {
            report.failures.push(format!(
                "{}: square {k} (dim {} -> dim {}) does not commute",
                phi.name(),
                t.source().dim(),
                t.target().dim()
            ));
        }
    }
    Ok(report)
}

impl SubFunctor {
    pub(crate) fn name_str(&self) -> String {
        use super::Functor;
        self.name()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functors::{Iso, Lambda};

    fn family(w: &QuadSpace) -> Vec<TqMorphism> {
        let mut out = vec![TqMorphism::identity(w)];
        for g in crate::quad::orthogonal_group(w).unwrap() {
            out.push(TqMorphism::from_isometry(&g).unwrap());
        }
        out.push(TqMorphism::line_projector(w, 0b11).unwrap());
        out
    }

    #[test]
    fn identity_is_natural_and_corruption_is_caught() {
        let w = QuadSpace::h0();
        let f: FunctorRef = Arc::new(Lambda::new(1));
        let id: NaturalRef = Arc::new(identity(f));
        assert!(natural_check(id.as_ref(), &family(&w)).unwrap().ok());
        let bad = corrupted(id);
        assert!(!natural_check(&bad, &family(&w)).unwrap().ok());
        let iso: FunctorRef = Arc::new(Iso::line(false));
        let id: NaturalRef = Arc::new(identity(iso));
        assert!(natural_check(id.as_ref(), &family(&w)).unwrap().ok());
    }
}
