//! Reduced row echelon form and the solvers built on it.
//!
//! Elimination walks columns left to right. Among the unpivoted rows whose
//! leading entry sits in the current column, the pivot is the entry with the
//! smallest bit length, ties going to the lowest row. Every other row is then
//! cleared in that column, so the output is the unique reduced echelon form.
//! Narrow systems use dense rows, wide ones sparse rows; both share the same
//! elimination routine.

use super::vector::{self, Vector};
use super::{Matrix, Rational};

/// Below this many columns dense rows are used.
pub const DENSE_COLUMN_LIMIT: usize = 32;

/// Row storage the elimination routine is generic over.
pub trait Row: Clone {
    fn from_sparse(v: &Vector, ncols: usize) -> Self;
    fn to_sparse(&self) -> Vector;
    fn lead(&self) -> Option<usize>;
    fn entry(&self, j: usize) -> Rational;
    fn is_zero(&self) -> bool;
    fn scale(&mut self, c: &Rational);
    /// `self += c * other`.
    fn axpy(&mut self, c: &Rational, other: &Self);
}

#[derive(Clone, Debug)]
pub struct SparseRow(Vector);

impl Row for SparseRow {
    fn from_sparse(v: &Vector, _ncols: usize) -> Self {
        SparseRow(v.clone())
    }
    fn to_sparse(&self) -> Vector {
        self.0.clone()
    }
    fn lead(&self) -> Option<usize> {
        self.0.first().map(|e| e.0)
    }
    fn entry(&self, j: usize) -> Rational {
        vector::get(&self.0, j)
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn scale(&mut self, c: &Rational) {
        self.0 = vector::scale(&self.0, c);
    }
    fn axpy(&mut self, c: &Rational, other: &Self) {
        self.0 = vector::axpy(&self.0, c, &other.0);
    }
}

#[derive(Clone, Debug)]
pub struct DenseRow(Vec<Rational>);

impl Row for DenseRow {
    fn from_sparse(v: &Vector, ncols: usize) -> Self {
        DenseRow(vector::to_dense(v, ncols))
    }
    fn to_sparse(&self) -> Vector {
        vector::from_dense(&self.0)
    }
    fn lead(&self) -> Option<usize> {
        self.0.iter().position(|x| !x.is_zero())
    }
    fn entry(&self, j: usize) -> Rational {
        self.0[j].clone()
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }
    fn scale(&mut self, c: &Rational) {
        for x in &mut self.0 {
            if !x.is_zero() {
                *x *= c;
            }
        }
    }
    fn axpy(&mut self, c: &Rational, other: &Self) {
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            if !y.is_zero() {
                *x += &(c * y);
            }
        }
    }
}

/// Result of elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub ncols: usize,
    /// Pivot column of each reduced row, strictly increasing.
    pub pivots: Vec<usize>,
    /// Reduced rows with unit pivots, in pivot order.
    pub rows: Vec<Vector>,
    /// Nonzero rows left without a pivot because their support lies at or
    /// beyond `pivot_limit`.
    pub residual: Vec<Vector>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Eliminate using only columns `< pivot_limit` as pivot columns.
pub fn rref_with<R: Row>(input: &[Vector], ncols: usize, pivot_limit: usize) -> Echelon {
    let mut active: Vec<R> = input
        .iter()
        .filter(|v| !v.is_empty())
        .map(|v| R::from_sparse(v, ncols))
        .collect();
    let mut pivoted: Vec<(usize, R)> = Vec::new();
    for j in 0..pivot_limit.min(ncols) {
        if active.is_empty() {
            break;
        }
        let mut best: Option<(usize, u64)> = None;
        for (k, r) in active.iter().enumerate() {
            if r.lead() == Some(j) {
                let bits = r.entry(j).bit_len();
                if best.is_none_or(|(_, b)| bits < b) {
                    best = Some((k, bits));
                }
            }
        }
        let Some((k, _)) = best else { continue };
        let mut p = active.remove(k);
        p.scale(&p.entry(j).recip());
        for r in active.iter_mut() {
            if r.lead() == Some(j) {
                let c = -r.entry(j);
                r.axpy(&c, &p);
            }
        }
        active.retain(|r| !r.is_zero());
        for (_, r) in pivoted.iter_mut() {
            let c = r.entry(j);
            if !c.is_zero() {
                r.axpy(&-c, &p);
            }
        }
        pivoted.push((j, p));
    }
    Echelon {
        ncols,
        pivots: pivoted.iter().map(|(j, _)| *j).collect(),
        rows: pivoted.iter().map(|(_, r)| r.to_sparse()).collect(),
        residual: active.iter().map(R::to_sparse).collect(),
    }
}

/// Eliminate with a pivot column limit, choosing the row storage by width.
pub fn rref_limited(rows: &[Vector], ncols: usize, pivot_limit: usize) -> Echelon {
    if ncols < DENSE_COLUMN_LIMIT {
        rref_with::<DenseRow>(rows, ncols, pivot_limit)
    } else {
        rref_with::<SparseRow>(rows, ncols, pivot_limit)
    }
}

pub fn rref(rows: &[Vector], ncols: usize) -> Echelon {
    rref_limited(rows, ncols, ncols)
}

pub fn rref_matrix(m: &Matrix) -> Echelon {
    rref(&m.to_rows(), m.cols())
}

pub fn rank(m: &Matrix) -> usize {
    // Row rank of the transpose: the stored columns are its rows.
    rref(m.columns(), m.rows()).rank()
}

/// Basis of the null space, one vector per free column, as matrix columns.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let e = rref_matrix(m);
    let mut is_pivot = vec![false; m.cols()];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut columns = Vec::new();
    for f in (0..m.cols()).filter(|&f| !is_pivot[f]) {
        let mut v: Vector = vec![(f, Rational::one())];
        for (row, &p) in e.rows.iter().zip(&e.pivots) {
            let c = vector::get(row, f);
            if !c.is_zero() {
                v.push((p, -c));
            }
        }
        columns.push(vector::normalize(v));
    }
    Matrix::from_columns(m.cols(), columns)
}

/// Solve `m x = b_t` for every column `b_t` of `rhs`; `None` where inconsistent.
pub fn solve_each(m: &Matrix, rhs: &Matrix) -> Vec<Option<Vector>> {
    assert_eq!(m.rows(), rhs.rows(), "right-hand side has the wrong length");
    let n = m.cols();
    let mut rows = m.to_rows();
    for (r, c, v) in rhs.triplets() {
        rows[r].push((n + c, v.clone()));
    }
    let e = rref_limited(&rows, n + rhs.cols(), n);
    (0..rhs.cols())
        .map(|t| {
            let col = n + t;
            if e.residual.iter().any(|r| !vector::get(r, col).is_zero()) {
                return None;
            }
            Some(
                e.rows
                    .iter()
                    .zip(&e.pivots)
                    .filter_map(|(row, &p)| {
                        let v = vector::get(row, col);
                        (!v.is_zero()).then_some((p, v))
                    })
                    .collect(),
            )
        })
        .collect()
}

/// A particular solution of `m x = b`, if one exists.
pub fn solve(m: &Matrix, b: &Vector) -> Option<Vector> {
    solve_each(m, &Matrix::column_vector(b.clone(), m.rows())).pop().flatten()
}

/// Solve `m X = rhs` column by column; `None` if any column is inconsistent.
pub fn solve_many(m: &Matrix, rhs: &Matrix) -> Option<Matrix> {
    let cols: Option<Vec<Vector>> = solve_each(m, rhs).into_iter().collect();
    cols.map(|c| Matrix::from_columns(m.cols(), c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn kernel_of_row_vector() {
        let k = kernel_basis(&Matrix::from_ints(&[&[1, 1]]));
        assert_eq!(k, Matrix::from_ints(&[&[-1], &[1]]));
    }

    #[test]
    fn solve_scalar() {
        let x = solve(&Matrix::from_ints(&[&[2]]), &vec![(0, q(3))]).unwrap();
        assert_eq!(x, vec![(0, Rational::new(3, 2))]);
    }

    #[test]
    fn inconsistent_system() {
        let m = Matrix::from_ints(&[&[1, 1], &[2, 2]]);
        assert!(solve(&m, &vec![(0, q(1)), (1, q(3))]).is_none());
        let x = solve(&m, &vec![(0, q(1)), (1, q(2))]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![(0, q(1)), (1, q(2))]);
    }

    #[test]
    fn solve_each_mixes_outcomes() {
        let m = Matrix::from_ints(&[&[1, 0], &[0, 0]]);
        let rhs = Matrix::from_ints(&[&[1, 0, 5], &[0, 1, 0]]);
        let sols = solve_each(&m, &rhs);
        assert_eq!(sols[0], Some(vec![(0, q(1))]));
        assert_eq!(sols[1], None);
        assert_eq!(sols[2], Some(vec![(0, q(5))]));
        assert!(solve_many(&m, &rhs).is_none());
    }

    #[test]
    fn smallest_pivot_is_chosen_but_form_is_unique() {
        let rows = vec![
            vec![(0, Rational::new(1000003, 7)), (1, q(1))],
            vec![(0, q(1)), (1, q(2))],
        ];
        let e = rref(&rows, 2);
        assert_eq!(e.pivots, vec![0, 1]);
        assert_eq!(e.rows, vec![vec![(0, q(1))], vec![(1, q(1))]]);
    }
}
