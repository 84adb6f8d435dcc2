//! Small algebras and modules used throughout the tests and the CLI fixtures.

use std::sync::Arc;

use super::{DgAlgebra, DgModule};
use crate::complex::Complex;
use crate::linalg::{Matrix, Rational, Vector};

type Product = ((i32, usize), (i32, usize), Vec<(usize, i64)>);
type Entry = ((i32, usize), (i32, usize), Vector);

/// Algebra with unit the first basis vector of degree 0; unit products are
/// filled in automatically.
pub fn build_algebra(dims: Vec<usize>, diffs: Vec<Matrix>, products: Vec<Product>) -> Arc<DgAlgebra> {
    let complex = Complex::new(0, dims.clone(), diffs).expect("example complex");
    let mut all: Vec<Entry> = Vec::new();
    for (q, &n) in dims.iter().enumerate() {
        for j in 0..n {
            let v = vec![(j, Rational::one())];
            all.push(((0, 0), (q as i32, j), v.clone()));
            if (q, j) != (0, 0) {
                all.push(((q as i32, j), (0, 0), v));
            }
        }
    }
    for (a, b, v) in products {
        let v: Vector = v.into_iter().map(|(i, x)| (i, Rational::from_int(x))).collect();
        all.push((a, b, v));
    }
    Arc::new(DgAlgebra::from_products(complex, all, vec![(0, Rational::one())]).expect("example algebra"))
}

/// `k[ε]/(ε²)` in degree 0.
pub fn dual_numbers() -> Arc<DgAlgebra> {
    build_algebra(vec![2], vec![], vec![])
}

/// `k × k` in degree 0, basis `1, e` with `e² = e`.
pub fn split_algebra() -> Arc<DgAlgebra> {
    build_algebra(vec![2], vec![], vec![((0, 1), (0, 1), vec![(1, 1)])])
}

/// `k[x]/(x^n)` in degree 0.
pub fn truncated_polynomial(n: usize) -> Arc<DgAlgebra> {
    let mut prods = Vec::new();
    for i in 1..n {
        for j in 1..n {
            let v = if i + j < n { vec![(i + j, 1)] } else { vec![] };
            prods.push(((0, i), (0, j), v));
        }
    }
    build_algebra(vec![n], vec![], prods)
}

/// Exterior algebra on one generator of degree `deg >= 1`, zero differential.
pub fn exterior(deg: i32) -> Arc<DgAlgebra> {
    let mut dims = vec![0; deg as usize + 1];
    dims[0] = 1;
    dims[deg as usize] = 1;
    build_algebra(dims, vec![], vec![])
}

/// `k[x]/(x²) ⊗ Λ(y)` with `|y| = 1` and `dy = x`.
pub fn koszul_dual_numbers() -> Arc<DgAlgebra> {
    let d1 = Matrix::from_ints(&[&[0, 0], &[1, 0]]);
    build_algebra(
        vec![2, 2],
        vec![d1],
        vec![
            ((0, 1), (0, 1), vec![]),
            ((0, 1), (1, 0), vec![(1, 1)]),
            ((1, 0), (0, 1), vec![(1, 1)]),
            ((0, 1), (1, 1), vec![]),
            ((1, 1), (0, 1), vec![]),
        ],
    )
}

/// The residue field in degree 0: the unit acts as 1, every other basis
/// vector by 0. Valid when those vectors span an ideal.
pub fn residue_module(a: &Arc<DgAlgebra>) -> DgModule {
    let complex = Complex::new(0, vec![1], vec![]).expect("residue complex");
    DgModule::from_fn(a.clone(), complex, |p, i, q| {
        if p == 0 && i == 0 && q == 0 {
            Matrix::identity(1)
        } else {
            Matrix::zeros(if p + q == 0 { 1 } else { 0 }, 1)
        }
    })
    .and_then(|m| m.validate().map(|_| m))
    .expect("residue module")
}
