//! Exact computations with modules over bound quiver algebras: saguaros,
//! uniserials, syzygies and right approximations.

pub mod algebra;
pub mod approximation;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod graph;
pub mod hom;
pub mod homological;
pub mod linalg;
pub mod module;
pub mod phantom;
pub mod presentation;
pub mod random;
pub mod saguaro;
pub mod uniserial;

pub use algebra::{Algebra, AlgebraRef};
pub use error::{Error, Result};
pub use field::{Field, FieldConfig, Fp, Rationals};
