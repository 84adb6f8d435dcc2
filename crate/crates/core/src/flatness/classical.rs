//! Flatness of a finite-dimensional module over a finite-dimensional
//! commutative algebra in degree 0.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dg::{DgAlgebra, DgModule};
use crate::error::{Error, Result};
use crate::linalg::{vector, Matrix, Rational, Subspace, Vector};
use crate::resolution::graded_tor;

/// `Tor_1(R/I, M)` for one ideal of the test family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealTest {
    pub ideal: String,
    pub ideal_dim: usize,
    pub tor1: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H0Flatness {
    pub flat: bool,
    /// Dimension of the Jacobson radical `J`.
    pub radical_dim: usize,
    /// `dim Tor_1(R/J, M)`; zero exactly when `M` is flat.
    pub residue_tor1: usize,
    pub family: Vec<IdealTest>,
}

fn trace(m: &Matrix) -> Rational {
    (0..m.rows().min(m.cols())).fold(Rational::zero(), |acc, i| &acc + &m.get(i, i))
}

fn check_commutative(r: &DgAlgebra) -> Result<()> {
    if r.top() != 0 {
        return Err(Error::Input("algebra is not concentrated in degree 0".into()));
    }
    let n = r.dim(0);
    for i in 0..n {
        for j in i + 1..n {
            if r.mul_basis(0, i, 0, j) != r.mul_basis(0, j, 0, i) {
                return Err(Error::Input(format!("algebra is not commutative on basis pair ({i}, {j})")));
            }
        }
    }
    Ok(())
}

/// Radical of the trace form `(x, y) -> tr(L_{xy})`, which is the nilradical
/// (and so the Jacobson radical) of a commutative algebra in characteristic 0.
pub fn jacobson_radical(r: &DgAlgebra) -> Result<Subspace> {
    check_commutative(r)?;
    let n = r.dim(0);
    let left: Vec<Matrix> = (0..n).map(|i| r.left(0, i, 0).expect("degree 0").clone()).collect();
    let mut trip = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let t = trace(&left[i].mul(&left[j]));
            if !t.is_zero() {
                trip.push((i, j, t));
            }
        }
    }
    Ok(Subspace::kernel(&Matrix::from_triplets(n, n, trip)))
}

/// The ideal generated by the given elements.
pub fn ideal(r: &DgAlgebra, gens: &[Vector]) -> Subspace {
    let n = r.dim(0);
    let mut span = Vec::new();
    for g in gens {
        for i in 0..n {
            span.push(r.mul(0, &vector::unit(i), 0, g));
        }
    }
    Subspace::span(n, &span)
}

fn tor1_against(r: &Arc<DgAlgebra>, ideal: &Subspace, m: &DgModule) -> Result<usize> {
    let (quotient, _) = DgModule::free_rank_one(r).quotient(vec![ideal.clone()]);
    Ok(graded_tor(&quotient, m, 1, 0)?.dim(1, 0))
}

/// Decide flatness of `m` over `r` exactly through `Tor_1(R/J, M) = 0`, and
/// report `Tor_1(R/I, M)` for the principal ideals of basis elements and any
/// extra ideals given by generators.
pub fn h0_flat(r: &Arc<DgAlgebra>, m: &DgModule, extra: &[Vec<Vector>]) -> Result<H0Flatness> {
    if m.algebra() != r {
        return Err(Error::Input("module over a different algebra".into()));
    }
    if m.top() > 0 {
        return Err(Error::Input("module is not concentrated in degree 0".into()));
    }
    let radical = jacobson_radical(r)?;
    let residue_tor1 = tor1_against(r, &radical, m)?;
    let mut family = Vec::new();
    for i in 0..r.dim(0) {
        let id = ideal(r, &[vector::unit(i)]);
        family.push(IdealTest { ideal: format!("(b{i})"), ideal_dim: id.dim(), tor1: tor1_against(r, &id, m)? });
    }
    for (k, gens) in extra.iter().enumerate() {
        let id = ideal(r, gens);
        family.push(IdealTest { ideal: format!("extra {k}"), ideal_dim: id.dim(), tor1: tor1_against(r, &id, m)? });
    }
    let flat = residue_tor1 == 0;
    if flat && family.iter().any(|t| t.tor1 > 0) {
        return Err(Error::Internal("a test ideal has nonzero Tor_1 against a flat module".into()));
    }
    Ok(H0Flatness { flat, radical_dim: radical.dim(), residue_tor1, family })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::examples;

    #[test]
    fn ground_field_is_flat_over_itself() {
        let k = DgAlgebra::ground();
        let m = DgModule::free_rank_one(&k);
        assert!(h0_flat(&k, &m, &[]).unwrap().flat);
    }

    #[test]
    fn residue_over_dual_numbers() {
        let a = examples::dual_numbers();
        let k = examples::residue_module(&a);
        let v = h0_flat(&a, &k, &[]).unwrap();
        assert!(!v.flat);
        assert_eq!((v.radical_dim, v.residue_tor1), (1, 1));
        assert!(h0_flat(&a, &DgModule::free_rank_one(&a).power(2), &[]).unwrap().flat);
    }

    #[test]
    fn product_of_fields_has_zero_radical() {
        let a = examples::split_algebra();
        assert_eq!(jacobson_radical(&a).unwrap().dim(), 0);
        let e = vec![(1, Rational::one())];
        let (part, _) = DgModule::free_rank_one(&a).idempotent_part(&e).unwrap();
        assert!(h0_flat(&a, &part, &[]).unwrap().flat);
    }
}
