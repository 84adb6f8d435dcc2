use std::sync::Arc;

use crate::complex::{homology, Complex, HomologyData};
use crate::error::{Error, Result};
use crate::linalg::{vector, Matrix, Rational, Vector};

/// `(row, col, value)` entry of a sparse matrix.
type Triplet = (usize, usize, Rational);

/// Graded-commutative DG algebra, finite and bounded.
///
/// Multiplication is stored as left-multiplication matrices: `left(p, i, q)`
/// sends `A_q` to `A_{p+q}` by multiplying with the `i`-th basis vector of
/// `A_p`. Products above the top degree are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgAlgebra {
    complex: Complex,
    mult: Vec<Vec<Vec<Matrix>>>,
    unit: Vector,
}

impl DgAlgebra {
    /// Validate and build. `mult[p][i][q]` must have shape `dim(p+q) x dim(q)`.
    pub fn new(complex: Complex, mult: Vec<Vec<Vec<Matrix>>>, unit: Vector) -> Result<Self> {
        let a = Self::unchecked(complex, mult, unit)?;
        a.validate()?;
        Ok(a)
    }

    /// Shape checks only.
    pub fn unchecked(complex: Complex, mult: Vec<Vec<Vec<Matrix>>>, unit: Vector) -> Result<Self> {
        if complex.min_degree() != 0 {
            return Err(Error::Input("algebra must start in degree 0".into()));
        }
        if complex.exact_to().is_some() {
            return Err(Error::Input("algebra must be a bounded object".into()));
        }
        let top = complex.top();
        if mult.len() != complex.dims().len() {
            return Err(Error::DimensionMismatch("multiplication table has the wrong number of degrees".into()));
        }
        for p in 0..=top {
            if mult[p as usize].len() != complex.dim(p) {
                return Err(Error::DimensionMismatch(format!("multiplication table for degree {p}")));
            }
            for (i, row) in mult[p as usize].iter().enumerate() {
                if row.len() != complex.dims().len() {
                    return Err(Error::DimensionMismatch(format!("left multiplication by a_{p},{i}")));
                }
                for q in 0..=top {
                    let want = (complex.dim(p + q), complex.dim(q));
                    if row[q as usize].shape() != want {
                        return Err(Error::DimensionMismatch(format!(
                            "left multiplication by a_{p},{i} on degree {q} has shape {:?}, expected {:?}",
                            row[q as usize].shape(),
                            want
                        )));
                    }
                }
            }
        }
        if unit.iter().any(|(i, _)| *i >= complex.dim(0)) {
            return Err(Error::DimensionMismatch("unit outside degree 0".into()));
        }
        Ok(DgAlgebra { complex, mult, unit })
    }

    /// Build from products of basis vectors `(p, i, q, j) -> value in A_{p+q}`;
    /// unlisted products are zero.
    pub fn from_products(
        complex: Complex,
        products: impl IntoIterator<Item = ((i32, usize), (i32, usize), Vector)>,
        unit: Vector,
    ) -> Result<Self> {
        let top = complex.top();
        let mut trip: Vec<Vec<Vec<Vec<Triplet>>>> = (0..=top)
            .map(|p| vec![vec![Vec::new(); (top + 1) as usize]; complex.dim(p)])
            .collect();
        for ((p, i), (q, j), v) in products {
            if p < 0 || q < 0 || p > top || q > top || i >= complex.dim(p) || j >= complex.dim(q) {
                return Err(Error::Input(format!("product of ({p},{i}) and ({q},{j}) is out of range")));
            }
            if p + q > top {
                if !v.is_empty() {
                    return Err(Error::Input(format!(
                        "product of ({p},{i}) and ({q},{j}) lands above the top degree"
                    )));
                }
                continue;
            }
            for (r, x) in v {
                if r >= complex.dim(p + q) {
                    return Err(Error::Input(format!("product of ({p},{i}) and ({q},{j}) has an entry out of range")));
                }
                trip[p as usize][i][q as usize].push((r, j, x));
            }
        }
        let mult = trip
            .into_iter()
            .enumerate()
            .map(|(p, rows)| {
                rows.into_iter()
                    .map(|per_q| {
                        per_q
                            .into_iter()
                            .enumerate()
                            .map(|(q, t)| {
                                Matrix::from_triplets(complex.dim(p as i32 + q as i32), complex.dim(q as i32), t)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        DgAlgebra::new(complex, mult, unit)
    }

    /// The ground field in degree 0.
    pub fn ground() -> Arc<Self> {
        let c = Complex::new(0, vec![1], vec![]).expect("ground complex");
        Arc::new(DgAlgebra::new(c, vec![vec![vec![Matrix::identity(1)]]], vector::unit(0)).expect("ground field"))
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn top(&self) -> i32 {
        self.complex.top()
    }

    pub fn dim(&self, p: i32) -> usize {
        self.complex.dim(p)
    }

    pub fn d(&self, p: i32) -> &Matrix {
        self.complex.d(p)
    }

    pub fn unit(&self) -> &Vector {
        &self.unit
    }

    /// `L(a_{p,i}) : A_q -> A_{p+q}`; `None` outside the stored range.
    pub fn left(&self, p: i32, i: usize, q: i32) -> Option<&Matrix> {
        if p < 0 || q < 0 || p > self.top() || q > self.top() {
            return None;
        }
        Some(&self.mult[p as usize][i][q as usize])
    }

    /// `L(a) : A_q -> A_{p+q}` for an element `a` of degree `p`.
    pub fn left_element(&self, p: i32, a: &Vector, q: i32) -> Matrix {
        let mut acc = Matrix::zeros(self.dim(p + q), self.dim(q));
        for (i, c) in a {
            if let Some(m) = self.left(p, *i, q) {
                acc = acc.add(&m.scale(c));
            }
        }
        acc
    }

    pub fn mul(&self, p: i32, a: &Vector, q: i32, b: &Vector) -> Vector {
        if p < 0 || q < 0 || p + q > self.top() {
            return Vec::new();
        }
        let mut acc = Vec::new();
        for (i, c) in a {
            let prod = self.mult[p as usize][*i][q as usize].mul_vec(b);
            acc = vector::axpy(&acc, c, &prod);
        }
        acc
    }

    pub fn mul_basis(&self, p: i32, i: usize, q: i32, j: usize) -> Vector {
        if p + q > self.top() {
            return Vec::new();
        }
        self.mult[p as usize][i][q as usize].column(j).clone()
    }

    pub fn is_graded(&self) -> bool {
        self.complex.differentials().iter().all(Matrix::is_zero)
    }

    /// Total dimension.
    pub fn total_dim(&self) -> usize {
        self.complex.dims().iter().sum()
    }

    /// Check unit, graded commutativity, associativity and Leibniz on bases.
    pub fn validate(&self) -> Result<()> {
        self.complex.check_d_squared()?;
        let top = self.top();
        let unit_left = |q: i32| self.left_element(0, &self.unit, q);
        for q in 0..=top {
            if !unit_left(q).is_identity() {
                return Err(Error::Axiom(format!("unit does not act as the identity on degree {q}")));
            }
        }
        for p in 0..=top {
            for i in 0..self.dim(p) {
                for q in 0..=top {
                    for j in 0..self.dim(q) {
                        let ab = self.mul_basis(p, i, q, j);
                        let ba = self.mul_basis(q, j, p, i);
                        if ab != vector::scale(&ba, &Rational::sign((p * q) as i64)) {
                            return Err(Error::Axiom(format!(
                                "graded commutativity fails on basis pair (a_{p},{i}, a_{q},{j})"
                            )));
                        }
                        if p + q <= top + 1 {
                            let lhs = if p + q <= top { self.d(p + q).mul_vec(&ab) } else { Vec::new() };
                            let da = self.d(p).mul_vec(&vector::unit(i));
                            let db = self.d(q).mul_vec(&vector::unit(j));
                            let t1 = self.mul(p - 1, &da, q, &vector::unit(j));
                            let t2 = self.mul(p, &vector::unit(i), q - 1, &db);
                            let rhs = vector::axpy(&t1, &Rational::sign(p as i64), &t2);
                            if lhs != rhs {
                                return Err(Error::Axiom(format!(
                                    "Leibniz rule fails on basis pair (a_{p},{i}, a_{q},{j}) in degree {}",
                                    p + q
                                )));
                            }
                        }
                        if p + q > top {
                            continue;
                        }
                        for r in 0..=(top - p - q) {
                            let lhs = self.left_element(p + q, &ab, r);
                            let rhs = self.mult[p as usize][i][(q + r) as usize].mul(&self.mult[q as usize][j][r as usize]);
                            if lhs != rhs {
                                return Err(Error::Axiom(format!(
                                    "associativity fails on (a_{p},{i}, a_{q},{j}) against degree {r}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Raw table `mult[p][i][q]`.
    pub fn mult_table(&self) -> &Vec<Vec<Vec<Matrix>>> {
        &self.mult
    }
}

/// `H(A)` as a graded algebra together with cycle representatives.
#[derive(Clone, Debug)]
pub struct HomologyAlgebra {
    pub algebra: Arc<DgAlgebra>,
    pub data: HomologyData,
}

/// Homology algebra with the induced product `[a][b] = [ab]`.
pub fn homology_algebra(a: &DgAlgebra) -> Result<HomologyAlgebra> {
    let data = homology(a.complex());
    let top = a.top();
    let dims: Vec<usize> = (0..=top).map(|n| data.dim(n)).collect();
    let complex = Complex::new(0, dims.clone(), vec![])?;
    let mut mult = Vec::with_capacity(dims.len());
    for p in 0..=top {
        let mut per_i = Vec::with_capacity(dims[p as usize]);
        for i in 0..dims[p as usize] {
            let rep_i = data.representative(p, i);
            let mut per_q = Vec::with_capacity(dims.len());
            for q in 0..=top {
                let rows = if p + q <= top { dims[(p + q) as usize] } else { 0 };
                let mut cols = Vec::with_capacity(dims[q as usize]);
                for j in 0..dims[q as usize] {
                    if p + q > top {
                        cols.push(Vec::new());
                        continue;
                    }
                    let prod = a.mul(p, &rep_i, q, &data.representative(q, j));
                    cols.push(data.class_of(p + q, &prod)?);
                }
                per_q.push(Matrix::from_columns(rows, cols));
            }
            per_i.push(per_q);
        }
        mult.push(per_i);
    }
    let unit = data.class_of(0, a.unit())?;
    let algebra = Arc::new(DgAlgebra::new(complex, mult, unit)?);
    Ok(HomologyAlgebra { algebra, data })
}

/// `H_0(A) = A_0 / d(A_1)` as an algebra concentrated in degree 0, with
/// cycle representatives.
pub fn h0_algebra(a: &DgAlgebra) -> Result<HomologyAlgebra> {
    let ha = homology_algebra(a)?;
    Ok(HomologyAlgebra { algebra: Arc::new(truncate_algebra(&ha.algebra, 0)), data: ha.data })
}

/// Keep degrees `0..=n`; valid because products only raise degree.
pub fn truncate_algebra(a: &DgAlgebra, n: i32) -> DgAlgebra {
    let top = a.top().min(n);
    let dims: Vec<usize> = (0..=top).map(|p| a.dim(p)).collect();
    let diffs = (1..=top).map(|p| a.d(p).clone()).collect();
    let complex = Complex::new(0, dims.clone(), diffs).expect("truncated complex");
    let mult = (0..=top)
        .map(|p| {
            (0..dims[p as usize])
                .map(|i| {
                    (0..=top)
                        .map(|q| {
                            if p + q <= top {
                                a.left(p, i, q).expect("in range").clone()
                            } else {
                                Matrix::zeros(0, dims[q as usize])
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    DgAlgebra::unchecked(complex, mult, a.unit().clone()).expect("truncated algebra")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::examples;

    #[test]
    fn ground_field_is_valid() {
        let k = DgAlgebra::ground();
        assert_eq!(k.total_dim(), 1);
        assert!(k.is_graded());
    }

    #[test]
    fn dual_numbers_homology() {
        let a = examples::dual_numbers();
        let h = homology_algebra(&a).unwrap();
        assert_eq!(h.algebra.complex().dims(), &[2]);
        assert_eq!(h.algebra.mul_basis(0, 1, 0, 1), Vec::new());
    }

    #[test]
    fn koszul_algebra_keeps_top_class() {
        let a = examples::koszul_dual_numbers();
        let h = homology_algebra(&a).unwrap();
        assert_eq!(h.data.dims(), vec![1, 1]);
    }

    #[test]
    fn rejects_noncommutative_table() {
        let a = examples::exterior(1);
        let mut mult = a.mult_table().clone();
        // y * 1 = -y breaks commutativity against 1 * y = y.
        mult[1][0][0] = mult[1][0][0].neg();
        let err = DgAlgebra::new(a.complex().clone(), mult, a.unit().clone()).unwrap_err();
        assert!(err.to_string().contains("basis pair"), "{err}");
    }
}
