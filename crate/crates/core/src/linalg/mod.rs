//! Exact linear algebra over the rationals.

pub mod echelon;
pub mod matrix;
pub mod rational;
pub mod subspace;
pub mod vector;

pub use echelon::{kernel_basis, rank, rref, solve, solve_each, solve_many, Echelon};
pub use matrix::Matrix;
pub use rational::{ParseRationalError, Rational};
pub use subspace::{Quotient, SubQuotient, Subspace};
pub use vector::Vector;
