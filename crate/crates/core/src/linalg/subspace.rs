//! Subspaces of `Q^n` in canonical form, quotients and subquotients.
//!
//! A subspace is stored as the reduced row echelon form of any spanning set,
//! read as column vectors. Equal subspaces therefore have identical bases,
//! and the coordinates of a member are its entries at the pivot positions.

use super::echelon::{kernel_basis, rref};
use super::vector::{self, Vector};
use super::Matrix;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    ambient: usize,
    pivots: Vec<usize>,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, pivots: Vec::new(), basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, pivots: (0..ambient).collect(), basis: (0..ambient).map(vector::unit).collect() }
    }

    pub fn span<'a>(ambient: usize, vectors: impl IntoIterator<Item = &'a Vector>) -> Self {
        let rows: Vec<Vector> = vectors.into_iter().cloned().collect();
        debug_assert!(rows.iter().all(|v| v.iter().all(|(i, _)| *i < ambient)));
        let e = rref(&rows, ambient);
        Subspace { ambient, pivots: e.pivots, basis: e.rows }
    }

    /// Column space of `m`.
    pub fn image(m: &Matrix) -> Self {
        Subspace::span(m.rows(), m.columns())
    }

    pub fn kernel(m: &Matrix) -> Self {
        Subspace::image(&kernel_basis(m))
    }

    /// `{x : m x in target}`.
    pub fn preimage(m: &Matrix, target: &Subspace) -> Self {
        assert_eq!(m.rows(), target.ambient);
        let q = Quotient::new(target.clone());
        Subspace::kernel(&q.projection_matrix().mul(m))
    }

    /// Image of this subspace under `m`.
    pub fn map(&self, m: &Matrix) -> Self {
        assert_eq!(m.cols(), self.ambient);
        let imgs: Vec<Vector> = self.basis.iter().map(|b| m.mul_vec(b)).collect();
        Subspace::span(m.rows(), &imgs)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    /// Basis as the columns of an `ambient x dim` matrix.
    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_columns(self.ambient, self.basis.clone())
    }

    /// Positions that are not pivots, ascending.
    pub fn free_positions(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&i| !is_pivot[i]).collect()
    }

    /// `x` minus its component along the basis, read off at the pivots.
    /// Zero exactly when `x` lies in the subspace.
    pub fn reduce(&self, x: &Vector) -> Vector {
        let mut r = x.clone();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            let c = vector::get(x, p);
            if !c.is_zero() {
                r = vector::axpy(&r, &-c, b);
            }
        }
        r
    }

    pub fn contains(&self, x: &Vector) -> bool {
        self.reduce(x).is_empty()
    }

    /// Coordinates in the canonical basis, if `x` is a member.
    pub fn coordinates(&self, x: &Vector) -> Option<Vector> {
        self.contains(x).then(|| self.coordinates_unchecked(x))
    }

    pub fn coordinates_unchecked(&self, x: &Vector) -> Vector {
        self.pivots
            .iter()
            .enumerate()
            .filter_map(|(k, &p)| {
                let c = vector::get(x, p);
                (!c.is_zero()).then_some((k, c))
            })
            .collect()
    }

    /// Vector with the given coordinates.
    pub fn combine(&self, coords: &Vector) -> Vector {
        let mut acc = Vec::new();
        for (k, c) in coords {
            acc = vector::axpy(&acc, c, &self.basis[*k]);
        }
        acc
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        Subspace::span(self.ambient, self.basis.iter().chain(&other.basis))
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient);
        }
        let a = self.basis_matrix();
        let b = other.basis_matrix();
        let k = kernel_basis(&Matrix::hstack(&[&a, &b.neg()]));
        let top = k.block(0, self.dim(), 0, k.cols());
        Subspace::image(&a.mul(&top))
    }
}

/// `V / S` with a chosen section and the projection it determines.
///
/// The section sends the `t`-th quotient coordinate to the unit vector at the
/// `t`-th free position of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    sub: Subspace,
    free: Vec<usize>,
    free_index: Vec<Option<usize>>,
}

impl Quotient {
    pub fn new(sub: Subspace) -> Self {
        let free = sub.free_positions();
        let mut free_index = vec![None; sub.ambient];
        for (t, &j) in free.iter().enumerate() {
            free_index[j] = Some(t);
        }
        Quotient { sub, free, free_index }
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn ambient(&self) -> usize {
        self.sub.ambient
    }

    pub fn sub(&self) -> &Subspace {
        &self.sub
    }

    pub fn project(&self, x: &Vector) -> Vector {
        let r = self.sub.reduce(x);
        vector::reindex(&r, |i| self.free_index[i])
    }

    pub fn lift(&self, y: &Vector) -> Vector {
        y.iter().map(|(t, v)| (self.free[*t], v.clone())).collect()
    }

    pub fn projection_matrix(&self) -> Matrix {
        let n = self.ambient();
        let cols = (0..n).map(|i| self.project(&vector::unit(i))).collect();
        Matrix::from_columns(self.dim(), cols)
    }

    pub fn section_matrix(&self) -> Matrix {
        let cols = self.free.iter().map(|&j| vector::unit(j)).collect();
        Matrix::from_columns(self.ambient(), cols)
    }
}

/// `num / den` for subspaces `den <= num` of a common ambient space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubQuotient {
    num: Subspace,
    quotient: Quotient,
}

impl SubQuotient {
    /// Panics unless `den` is contained in `num`.
    pub fn new(num: Subspace, den: &Subspace) -> Self {
        assert!(den.is_subspace_of(&num), "denominator is not contained in numerator");
        let den_coords: Vec<Vector> = den.basis().iter().map(|b| num.coordinates_unchecked(b)).collect();
        let inner = Subspace::span(num.dim(), &den_coords);
        SubQuotient { num, quotient: Quotient::new(inner) }
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }

    pub fn ambient(&self) -> usize {
        self.num.ambient()
    }

    pub fn num(&self) -> &Subspace {
        &self.num
    }

    /// Representative in the ambient space of the `t`-th class.
    pub fn representative(&self, t: usize) -> Vector {
        self.num.basis()[self.quotient.free[t]].clone()
    }

    pub fn representatives(&self) -> Matrix {
        Matrix::from_columns(self.ambient(), (0..self.dim()).map(|t| self.representative(t)).collect())
    }

    /// Class of a member of `num`; `None` if `x` is not a member.
    pub fn project(&self, x: &Vector) -> Option<Vector> {
        self.num.coordinates(x).map(|c| self.quotient.project(&c))
    }

    /// Class of `x`, assuming membership without checking.
    pub fn project_unchecked(&self, x: &Vector) -> Vector {
        self.quotient.project(&self.num.coordinates_unchecked(x))
    }

    pub fn lift(&self, y: &Vector) -> Vector {
        let mut acc = Vec::new();
        for (t, c) in y {
            acc = vector::axpy(&acc, c, &self.representative(*t));
        }
        acc
    }

    /// Whether `x` is a member of the denominator.
    pub fn is_trivial_class(&self, x: &Vector) -> bool {
        self.project(x).is_some_and(|c| c.is_empty())
    }

    /// Matrix of the map `self -> target` induced by `m` on representatives.
    /// `None` if `m` does not carry numerator into numerator.
    pub fn induced(&self, m: &Matrix, target: &SubQuotient) -> Option<Matrix> {
        let mut cols = Vec::with_capacity(self.dim());
        for t in 0..self.dim() {
            cols.push(target.project(&m.mul_vec(&self.representative(t)))?);
        }
        Some(Matrix::from_columns(target.dim(), cols))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn image_of_column() {
        let s = Subspace::image(&Matrix::from_ints(&[&[1], &[2]]));
        assert_eq!(s.basis(), &[vec![(0, q(1)), (1, q(2))]]);
    }

    #[test]
    fn kernel_of_row() {
        let s = Subspace::kernel(&Matrix::from_ints(&[&[1, 1]]));
        assert_eq!(s, Subspace::span(2, &[vec![(0, q(1)), (1, q(-1))]]));
    }

    #[test]
    fn quotient_plane_by_diagonal() {
        let s = Subspace::span(2, &[vec![(0, q(1)), (1, q(1))]]);
        let qt = Quotient::new(s);
        assert_eq!(qt.dim(), 1);
        assert!(qt.project(&vec![(0, q(1)), (1, q(1))]).is_empty());
        let e0 = qt.project(&vector::unit(0));
        let e1 = qt.project(&vector::unit(1));
        assert_eq!(e0, vector::neg(&e1));
        let pm = qt.projection_matrix();
        assert!(pm.mul(&qt.section_matrix()).is_identity());
    }

    #[test]
    fn intersection_and_sum() {
        let a = Subspace::span(3, &[vector::unit(0), vector::unit(1)]);
        let b = Subspace::span(3, &[vector::unit(1), vector::unit(2)]);
        assert_eq!(a.intersection(&b), Subspace::span(3, &[vector::unit(1)]));
        assert_eq!(a.sum(&b), Subspace::full(3));
    }

    #[test]
    fn subquotient_classes() {
        let num = Subspace::span(3, &[vector::unit(0), vector::unit(1)]);
        let den = Subspace::span(3, &[vec![(0, q(1)), (1, q(1))]]);
        let sq = SubQuotient::new(num, &den);
        assert_eq!(sq.dim(), 1);
        assert!(sq.project(&vector::unit(2)).is_none());
        assert!(sq.is_trivial_class(&vec![(0, q(2)), (1, q(2))]));
        let r = sq.representative(0);
        assert_eq!(sq.project(&r), Some(vector::unit(0)));
    }
}
