//! Exact computations with bounded DG algebras and modules over the rationals.

pub mod cache;
pub mod complex;
pub mod dg;
pub mod error;
pub mod flatness;
pub mod gen;
pub mod homotopy;
pub mod io;
pub mod linalg;
pub mod resolution;
pub mod spectral;
pub mod suites;

pub use complex::{ChainMap, Complex, GradedSpace, HomologyData};
pub use error::{Error, Result};
pub use linalg::{Matrix, Rational, SubQuotient, Subspace, Vector};
