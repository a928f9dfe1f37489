//! Exact calculus of polynomial differential forms on odd symplectic
//! superspace, plus the verification suites built on top of it: the wedge
//! bicomplex, slice cohomology, the induced odd Laplacian, coordinate
//! changes with Berezinian factors, and a small expression language.

pub mod cohomology;
pub mod form;
pub mod geometry;
pub mod matrix;
pub mod monomial;
pub mod operators;
pub mod parser;
pub mod printer;
pub mod spectral;
pub mod scalar;
pub mod subst;
pub mod suites;

pub use form::SuperForm;
pub use monomial::{Context, GenKind, Generator, Monomial, MultiDegree};
pub use operators::{HbarForm, OperatorError};
pub use scalar::Scalar;
