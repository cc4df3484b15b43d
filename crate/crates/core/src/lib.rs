//! Exact computer algebra for commutative differential graded algebras over
//! the rationals, with the Sullivan-model constructions and the sectional
//! category bounds built on them.

pub mod algebra;
pub mod certificate;
pub mod construct;
pub mod document;
pub mod error;
pub mod expr;
pub mod homology;
pub mod ideal;
pub mod invariants;
pub mod linalg;
pub mod morphism;
pub mod msecat;
pub mod relative;
pub mod report;
pub mod sullivan;

pub use algebra::{Element, Flags, Generator, Monomial, Presentation, PresentationBuilder};
pub use error::{Error, Result};
pub use linalg::Q;
