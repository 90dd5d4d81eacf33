//! Exact computations with free and almost free divisors: logarithmic vector
//! fields, Saito certificates, the modified Kähler complexes, singular Milnor
//! numbers and A_e-codimensions of map germs.

pub mod checked;
pub mod deformation;
pub mod dimension;
pub mod error;
pub mod forms;
pub mod groebner;
pub mod job;
pub mod linalg;
pub mod logarithmic;
pub mod mingens;
pub mod module;
pub mod order;
pub mod parse;
pub mod poly;

pub use dimension::{quotient_dimension, Dimension, GradedDimensionTable};
pub use error::{Error, Result};
pub use groebner::{groebner_basis, normal_form, syzygy_module, Submodule};
pub use module::{FreeElement, Grading, ModulePresentation};
pub use order::{MonomialOrder, OrderKind, Term, TermOrder};
pub use poly::{Monomial, Poly, Rational};
