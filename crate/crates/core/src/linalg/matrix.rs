use std::fmt;

use serde::{Deserialize, Serialize};

use super::vector::{self, Vector};
use super::Rational;

/// Sparse matrix over the rationals, stored column by column.
///
/// Columns are sorted `(row, value)` lists with no stored zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vector>,
}

impl Matrix {
    /// The 0x0 matrix.
    pub const EMPTY: Matrix = Matrix { rows: 0, cols: 0, columns: Vec::new() };

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix { rows: n, cols: n, columns: (0..n).map(vector::unit).collect() }
    }

    /// Columns must already be sorted and zero-free with indices below `rows`.
    pub fn from_columns(rows: usize, columns: Vec<Vector>) -> Self {
        debug_assert!(columns.iter().all(|c| c.iter().all(|(i, v)| *i < rows && !v.is_zero())));
        debug_assert!(columns.iter().all(|c| c.windows(2).all(|w| w[0].0 < w[1].0)));
        Matrix { rows, cols: columns.len(), columns }
    }

    /// Sum duplicate triplets; panics on out-of-range indices.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Self {
        let mut columns: Vec<Vector> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            columns[c].push((r, v));
        }
        let columns = columns.into_iter().map(vector::normalize).collect();
        Matrix { rows, cols, columns }
    }

    pub fn from_rows(cols: usize, rows: &[Vector]) -> Self {
        Matrix::from_triplets(
            rows.len(),
            cols,
            rows.iter()
                .enumerate()
                .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v.clone()))),
        )
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        Matrix::from_triplets(
            nr,
            nc,
            rows.iter().enumerate().flat_map(|(r, row)| {
                assert_eq!(row.len(), nc, "ragged integer matrix");
                row.iter().enumerate().map(move |(c, v)| (r, c, Rational::from_int(*v)))
            }),
        )
    }

    pub fn column_vector(v: Vector, rows: usize) -> Self {
        Matrix::from_columns(rows, vec![v])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn column(&self, j: usize) -> &Vector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vector] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Vector> {
        self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        vector::get(&self.columns[c], r)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self
                .columns
                .iter()
                .enumerate()
                .all(|(j, c)| c.len() == 1 && c[0].0 == j && c[0].1.is_one())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    /// Row-major sparse rows.
    pub fn to_rows(&self) -> Vec<Vector> {
        let mut rows: Vec<Vector> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                rows[*r].push((c, v.clone()));
            }
        }
        rows
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            out[r][c] = v.clone();
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix { rows: self.cols, cols: self.rows, columns: self.to_rows() }
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        let mut acc: Vector = Vec::new();
        for (j, x) in v {
            debug_assert!(*j < self.cols);
            acc = vector::axpy(&acc, x, &self.columns[*j]);
        }
        acc
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "product of {:?} and {:?}", self.shape(), rhs.shape());
        let columns = rhs.columns.iter().map(|c| self.mul_vec(c)).collect();
        Matrix { rows: self.rows, cols: rhs.cols, columns }
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        let columns =
            self.columns.iter().zip(&rhs.columns).map(|(a, b)| vector::add(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, columns }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape());
        let columns =
            self.columns.iter().zip(&rhs.columns).map(|(a, b)| vector::sub(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, columns }
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        let columns = self.columns.iter().map(|col| vector::scale(col, c)).collect();
        Matrix { rows: self.rows, cols: self.cols, columns }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&Rational::from_int(-1))
    }

    /// Side-by-side concatenation.
    pub fn hstack(blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let mut columns = Vec::new();
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            columns.extend(b.columns.iter().cloned());
        }
        Matrix { rows, cols: columns.len(), columns }
    }

    /// Vertical concatenation.
    pub fn vstack(blocks: &[&Matrix]) -> Matrix {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut columns: Vec<Vector> = vec![Vec::new(); cols];
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            for (j, col) in b.columns.iter().enumerate() {
                columns[j].extend(col.iter().map(|(i, v)| (i + off, v.clone())));
            }
            off += b.rows;
        }
        Matrix { rows: off, cols, columns }
    }

    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut columns = Vec::new();
        let mut off = 0;
        for b in blocks {
            columns.extend(b.columns.iter().map(|c| vector::offset(c, off)));
            off += b.rows;
        }
        Matrix { rows, cols: columns.len(), columns }
    }

    /// Kronecker product; row `i1 * rhs.rows + i2`, column `j1 * rhs.cols + j2`.
    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let mut columns = Vec::with_capacity(self.cols * rhs.cols);
        for a in &self.columns {
            for b in &rhs.columns {
                let mut col = Vec::with_capacity(a.len() * b.len());
                for (i1, x) in a {
                    for (i2, y) in b {
                        col.push((i1 * rhs.rows + i2, x * y));
                    }
                }
                columns.push(col);
            }
        }
        Matrix { rows: self.rows * rhs.rows, cols: self.cols * rhs.cols, columns }
    }

    /// Assemble from blocks `(block_row, block_col, matrix)` on a grid with
    /// the given block sizes; absent blocks are zero.
    pub fn from_blocks(row_dims: &[usize], col_dims: &[usize], blocks: Vec<(usize, usize, Matrix)>) -> Matrix {
        let row_off: Vec<usize> = offsets(row_dims);
        let col_off: Vec<usize> = offsets(col_dims);
        let rows = row_dims.iter().sum();
        let cols: usize = col_dims.iter().sum();
        let mut columns: Vec<Vector> = vec![Vec::new(); cols];
        for (bi, bj, m) in blocks {
            assert_eq!(m.shape(), (row_dims[bi], col_dims[bj]), "block ({bi},{bj}) has the wrong shape");
            for (j, col) in m.columns.iter().enumerate() {
                columns[col_off[bj] + j].extend(col.iter().map(|(i, v)| (i + row_off[bi], v.clone())));
            }
        }
        let columns = columns.into_iter().map(vector::normalize).collect();
        Matrix { rows, cols, columns }
    }

    /// Place `self` inside a `rows x cols` zero matrix at the given offsets.
    pub fn embed(&self, rows: usize, cols: usize, row_off: usize, col_off: usize) -> Matrix {
        assert!(row_off + self.rows <= rows && col_off + self.cols <= cols);
        let mut columns = vec![Vec::new(); cols];
        for (j, c) in self.columns.iter().enumerate() {
            columns[col_off + j] = vector::offset(c, row_off);
        }
        Matrix { rows, cols, columns }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let columns = idx.iter().map(|&j| self.columns[j].clone()).collect();
        Matrix { rows: self.rows, cols: idx.len(), columns }
    }

    /// Rows `idx` in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut pos = vec![usize::MAX; self.rows];
        for (k, &i) in idx.iter().enumerate() {
            pos[i] = k;
        }
        let columns = self
            .columns
            .iter()
            .map(|c| {
                vector::normalize(
                    c.iter()
                        .filter(|(i, _)| pos[*i] != usize::MAX)
                        .map(|(i, v)| (pos[*i], v.clone()))
                        .collect(),
                )
            })
            .collect();
        Matrix { rows: idx.len(), cols: self.cols, columns }
    }

    /// Contiguous block `rows r0..r1`, `cols c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let columns = self.columns[c0..c1].iter().map(|c| vector::window(c, r0, r1)).collect();
        Matrix { rows: r1 - r0, cols: c1 - c0, columns }
    }
}

/// Running offsets of consecutive blocks.
pub fn offsets(dims: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    dims.iter()
        .map(|d| {
            let o = acc;
            acc += d;
            o
        })
        .collect()
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Serialized as `{rows, cols, entries: [[r, c, "p/q"], ...]}`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, Rational)>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.triplets().map(|(r, c, v)| (r, c, v.clone())).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(d)?;
        if let Some((r, c, _)) =
            repr.entries.iter().find(|(r, c, _)| *r >= repr.rows || *c >= repr.cols)
        {
            return Err(serde::de::Error::custom(format!(
                "entry ({r},{c}) outside {}x{}",
                repr.rows, repr.cols
            )));
        }
        Ok(Matrix::from_triplets(repr.rows, repr.cols, repr.entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_transpose() {
        let a = Matrix::from_ints(&[&[1, 2], &[0, 1], &[3, 0]]);
        let b = Matrix::from_ints(&[&[1, 0, 1], &[1, 1, 0]]);
        let ab = a.mul(&b);
        assert_eq!(ab, Matrix::from_ints(&[&[3, 2, 1], &[1, 1, 0], &[3, 0, 3]]));
        assert_eq!(ab.transpose().transpose(), ab);
        assert_eq!(b.transpose().mul(&a.transpose()), ab.transpose());
    }

    #[test]
    fn stacking_and_blocks() {
        let a = Matrix::from_ints(&[&[1, 2]]);
        let b = Matrix::from_ints(&[&[3, 4]]);
        let v = Matrix::vstack(&[&a, &b]);
        assert_eq!(v, Matrix::from_ints(&[&[1, 2], &[3, 4]]));
        assert_eq!(v.block(1, 2, 0, 2), b);
        assert_eq!(Matrix::hstack(&[&a, &b]), Matrix::from_ints(&[&[1, 2, 3, 4]]));
        let d = Matrix::block_diag(&[&a, &b]);
        assert_eq!(d, Matrix::from_ints(&[&[1, 2, 0, 0], &[0, 0, 3, 4]]));
        assert_eq!(v.select_rows(&[1, 0]), Matrix::from_ints(&[&[3, 4], &[1, 2]]));
    }

    #[test]
    fn kronecker_layout() {
        let a = Matrix::from_ints(&[&[1, 2]]);
        let b = Matrix::from_ints(&[&[0], &[3]]);
        assert_eq!(a.kron(&b), Matrix::from_ints(&[&[0, 0], &[3, 6]]));
        let i2 = Matrix::identity(2);
        assert!(i2.kron(&Matrix::identity(3)).is_identity());
    }

    #[test]
    fn serde_triplets() {
        let m = Matrix::from_triplets(2, 2, [(0, 1, Rational::new(-3, 4))]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":2,"entries":[[0,1,"-3/4"]]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix>(r#"{"rows":1,"cols":1,"entries":[[1,0,"1"]]}"#)
            .is_err());
    }
}
