//! Quadratic spaces over F2, the cospan category Tq, and evaluation of the
//! functors built on it as explicit F2 matrices.

pub mod category;
pub mod error;
pub mod family;
pub mod f2;
pub mod functors;
pub mod quad;

pub use category::TqMorphism;
pub use error::{Error, Result};
pub use f2::{F2Matrix, F2Vector, Subspace};
pub use quad::{IsoMap, QuadSpace};
