//! Functors on Tq, evaluated as labeled bases on objects and F2 matrices on
//! morphisms, together with the natural maps between them.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::category::TqMorphism;
use crate::error::{Error, Result};
use crate::f2::{F2Matrix, F2Vector, Subspace};
use crate::quad::{format_bits, QuadSpace};

pub mod basic;
pub mod exterior;
pub mod filtration;
pub mod mix;
pub mod natural;
pub mod registry;

pub use basic::{Iso, Lambda, PFunctor, PVFunctor, Tensor};
pub use exterior::{k_functor, l_functor, lambda_iso};
pub use mix::{MFunctor, MixAB, MixGeneral};
pub use natural::{natural_check, NaturalMap, NaturalityReport};
pub use registry::{parse_functor, FunctorRegistry};

/// A basis element of a functor value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Label {
    Unit,
    Vector(u64),
    /// A linear map `F2^k → W` by its basis images.
    Map(Vec<u64>),
    /// An isometric embedding by its basis images.
    Embedding(Vec<u64>),
    Pair(u64, u64),
    /// Stored with the smaller vector first.
    UnorderedPair(u64, u64),
    Wedge(Vec<usize>),
    Tensor(Box<Label>, Box<Label>),
    /// Class of an ambient basis element in a quotient.
    Coset(Box<Label>),
    /// A subfunctor basis vector, by the ambient labels in its support.
    Combination(Vec<usize>),
}

impl Label {
    pub fn unordered(a: u64, b: u64) -> Label {
        Label::UnorderedPair(a.min(b), a.max(b))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Unit => write!(f, "1"),
            Label::Vector(w) => write!(f, "[{}]", format_bits(*w)),
            Label::Map(imgs) | Label::Embedding(imgs) => {
                write!(f, "[")?;
                for (i, w) in imgs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", format_bits(*w))?;
                }
                write!(f, "]")
            }
            Label::Pair(a, b) => write!(f, "({}, {})", format_bits(*a), format_bits(*b)),
            Label::UnorderedPair(a, b) => write!(f, "{{{}, {}}}", format_bits(*a), format_bits(*b)),
            Label::Wedge(s) if s.is_empty() => write!(f, "1"),
            Label::Wedge(s) => {
                let parts: Vec<String> = s.iter().map(|i| format!("e{i}")).collect();
                write!(f, "{}", parts.join("∧"))
            }
            Label::Tensor(a, b) => write!(f, "{a}⊗{b}"),
            Label::Coset(l) => write!(f, "<{l}>"),
            Label::Combination(s) => {
                let parts: Vec<String> = s.iter().map(|i| format!("#{i}")).collect();
                write!(f, "Σ{{{}}}", parts.join(","))
            }
        }
    }
}

/// `F(W)`: an ordered, labeled basis.
pub struct FunctorValue {
    object: QuadSpace,
    labels: Vec<Label>,
    index: OnceLock<HashMap<Label, usize>>,
}

impl FunctorValue {
    pub fn new(object: QuadSpace, labels: Vec<Label>) -> Self {
        Self {
            object,
            labels,
            index: OnceLock::new(),
        }
    }

    pub fn object(&self) -> &QuadSpace {
        &self.object
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.index
            .get_or_init(|| {
                self.labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (l.clone(), i))
                    .collect()
            })
            .get(label)
            .copied()
    }
}

impl fmt::Debug for FunctorValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunctorValue(dim {})", self.dim())
    }
}

/// `F(T)` or a component of a natural map: a matrix between two values.
#[derive(Clone, Debug)]
pub struct FunctorMap {
    pub source: Arc<FunctorValue>,
    pub target: Arc<FunctorValue>,
    pub matrix: F2Matrix,
}

impl FunctorMap {
    pub fn new(source: Arc<FunctorValue>, target: Arc<FunctorValue>, matrix: F2Matrix) -> Result<Self> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix {}x{} between values of dimension {} and {}",
                matrix.rows(),
                matrix.cols(),
                source.dim(),
                target.dim()
            )));
        }
        Ok(Self {
            source,
            target,
            matrix,
        })
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn is_iso(&self) -> bool {
        self.matrix.rows() == self.matrix.cols() && self.rank() == self.matrix.rows()
    }
}

/// A functor `Tq → F2-vector spaces`.
pub trait Functor: Send + Sync {
    fn name(&self) -> String;
    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>>;
    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap>;

    fn dim(&self, w: &QuadSpace) -> Result<usize> {
        Ok(self.on_object(w)?.dim())
    }
}

pub type FunctorRef = Arc<dyn Functor>;

/// Memo table keyed by the exact object.
pub struct Cache<V: Clone> {
    map: Mutex<HashMap<QuadSpace, V>>,
}

impl<V: Clone> Default for Cache<V> {
    fn default() -> Self {
        Self {
            map: Mutex::new(HashMap::new()),
        }
    }
}

impl<V: Clone> Cache<V> {
    /// Computation runs outside the lock; racing workers compute the same
    /// deterministic value and the first insert wins.
    pub fn get_or_try(&self, key: &QuadSpace, f: impl FnOnce() -> Result<V>) -> Result<V> {
        if let Some(v) = self.map.lock().expect("cache lock").get(key) {
            return Ok(v.clone());
        }
        let v = f()?;
        Ok(self
            .map
            .lock()
            .expect("cache lock")
            .entry(key.clone())
            .or_insert(v)
            .clone())
    }
}

/// Builds a matrix whose column `j` is the XOR of unit vectors at `cols[j]`.
pub fn sparse_columns(rows: usize, cols: &[Vec<usize>]) -> F2Matrix {
    let mut m = F2Matrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for &i in c {
            let v = m.get(i, j);
            m.set(i, j, !v);
        }
    }
    m
}

fn combination_label(v: &F2Vector) -> Label {
    Label::Combination(v.ones().collect())
}

type SubGenerator = dyn Fn(&QuadSpace, &FunctorValue) -> Result<Subspace> + Send + Sync;

/// A subfunctor, given extensionally on each object as a subspace of the
/// ambient value. The action is the ambient matrix restricted, and fails
/// with `SubfunctorDefect` if an image leaves the target subspace.
pub struct SubFunctor {
    name: String,
    ambient: FunctorRef,
    generator: Box<SubGenerator>,
    cache: Cache<(Arc<Subspace>, Arc<FunctorValue>)>,
}

impl SubFunctor {
    pub fn new(
        name: impl Into<String>,
        ambient: FunctorRef,
        generator: impl Fn(&QuadSpace, &FunctorValue) -> Result<Subspace> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            ambient,
            generator: Box::new(generator),
            cache: Cache::default(),
        }
    }

    /// The whole ambient functor, seen as a subfunctor of itself.
    pub fn full(ambient: FunctorRef) -> Self {
        let name = ambient.name();
        Self::new(name, ambient, |_, value| Ok(Subspace::full(value.dim())))
    }

    /// `inner` expressed in the coordinates of `outer`; both must be
    /// subfunctors of the same ambient functor.
    pub fn relative(name: impl Into<String>, inner: Arc<SubFunctor>, outer: Arc<SubFunctor>) -> Self {
        let ambient: FunctorRef = outer.clone();
        Self::new(name, ambient, move |w, _| {
            let small = inner.subspace(w)?;
            let big = outer.subspace(w)?;
            let coords = small
                .basis()
                .iter()
                .map(|b| {
                    big.coordinates(b).ok_or_else(|| {
                        Error::SubfunctorDefect(format!(
                            "{} is not contained in {}",
                            inner.name, outer.name
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Subspace::span(coords, big.dim()))
        })
    }

    pub fn ambient(&self) -> &FunctorRef {
        &self.ambient
    }

    fn entry(&self, w: &QuadSpace) -> Result<(Arc<Subspace>, Arc<FunctorValue>)> {
        self.cache.get_or_try(w, || {
            let amb = self.ambient.on_object(w)?;
            let sub = (self.generator)(w, &amb)?;
            if sub.ambient_dim() != amb.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "{}: subspace of a {}-dimensional space inside a {}-dimensional value",
                    self.name,
                    sub.ambient_dim(),
                    amb.dim()
                )));
            }
            let labels = sub.basis().iter().map(combination_label).collect();
            Ok((Arc::new(sub), Arc::new(FunctorValue::new(w.clone(), labels))))
        })
    }

    /// The subspace `F'(W) ⊆ F(W)` in ambient coordinates.
    pub fn subspace(&self, w: &QuadSpace) -> Result<Arc<Subspace>> {
        Ok(self.entry(w)?.0)
    }

    /// Columns are the basis vectors of `F'(W)` in ambient coordinates.
    pub fn inclusion_matrix(&self, w: &QuadSpace) -> Result<F2Matrix> {
        let sub = self.subspace(w)?;
        Ok(F2Matrix::from_columns(sub.basis(), sub.ambient_dim()))
    }

    /// Coordinates in the subfunctor basis of an ambient vector.
    pub fn coordinates(&self, w: &QuadSpace, v: &F2Vector) -> Result<F2Vector> {
        self.subspace(w)?.coordinates(v).ok_or_else(|| {
            Error::SubfunctorDefect(format!("vector outside {} at an object of dimension {}", self.name, w.dim()))
        })
    }
}

impl Functor for SubFunctor {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        Ok(self.entry(w)?.1)
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let (src_sub, src_val) = self.entry(t.source())?;
        let (tgt_sub, tgt_val) = self.entry(t.target())?;
        let amb = self.ambient.on_morphism(t)?;
        let cols = src_sub
            .basis()
            .iter()
            .map(|b| {
                tgt_sub.coordinates(&amb.matrix.mul_vec(b)).ok_or_else(|| {
                    Error::SubfunctorDefect(format!("{}: image of a basis vector leaves the target", self.name))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FunctorMap::new(src_val, tgt_val, F2Matrix::from_columns(&cols, tgt_sub.dim()))
    }
}

/// `F / F'` with the non-pivot ambient basis vectors as coset representatives.
pub struct QuotientFunctor {
    name: String,
    sub: Arc<SubFunctor>,
    cache: Cache<Arc<FunctorValue>>,
}

impl QuotientFunctor {
    pub fn new(name: impl Into<String>, sub: Arc<SubFunctor>) -> Self {
        Self {
            name: name.into(),
            sub,
            cache: Cache::default(),
        }
    }

    pub fn sub(&self) -> &Arc<SubFunctor> {
        &self.sub
    }

    /// Matrix of the projection `F(W) → (F/F')(W)`.
    pub fn projection_matrix(&self, w: &QuadSpace) -> Result<F2Matrix> {
        let sub = self.sub.subspace(w)?;
        let n = sub.ambient_dim();
        let cols: Vec<F2Vector> = (0..n)
            .map(|i| sub.quotient_coordinates(&F2Vector::unit(n, i)))
            .collect();
        Ok(F2Matrix::from_columns(&cols, n - sub.dim()))
    }
}

impl Functor for QuotientFunctor {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        self.cache.get_or_try(w, || {
            let amb = self.sub.ambient().on_object(w)?;
            let sub = self.sub.subspace(w)?;
            let labels = sub
                .non_pivots()
                .into_iter()
                .map(|i| Label::Coset(Box::new(amb.labels()[i].clone())))
                .collect();
            Ok(Arc::new(FunctorValue::new(w.clone(), labels)))
        })
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        let src = self.on_object(t.source())?;
        let tgt = self.on_object(t.target())?;
        let src_sub = self.sub.subspace(t.source())?;
        let tgt_sub = self.sub.subspace(t.target())?;
        let amb = self.sub.ambient().on_morphism(t)?;
        for b in src_sub.basis() {
            if !tgt_sub.contains(&amb.matrix.mul_vec(b)) {
                return Err(Error::NotWellDefined(format!(
                    "{}: the quotiented subspace is not preserved",
                    self.name
                )));
            }
        }
        let n = src_sub.ambient_dim();
        let cols: Vec<F2Vector> = src_sub
            .non_pivots()
            .into_iter()
            .map(|i| tgt_sub.quotient_coordinates(&amb.matrix.mul_vec(&F2Vector::unit(n, i))))
            .collect();
        FunctorMap::new(src, tgt, F2Matrix::from_columns(&cols, tgt_sub.ambient_dim() - tgt_sub.dim()))
    }
}

/// The functor that is zero everywhere.
pub struct ZeroFunctor;

impl Functor for ZeroFunctor {
    fn name(&self) -> String {
        "zero".into()
    }

    fn on_object(&self, w: &QuadSpace) -> Result<Arc<FunctorValue>> {
        Ok(Arc::new(FunctorValue::new(w.clone(), Vec::new())))
    }

    fn on_morphism(&self, t: &TqMorphism) -> Result<FunctorMap> {
        FunctorMap::new(
            self.on_object(t.source())?,
            self.on_object(t.target())?,
            F2Matrix::zeros(0, 0),
        )
    }
}
