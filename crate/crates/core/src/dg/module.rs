use std::sync::Arc;

use super::algebra::{DgAlgebra, HomologyAlgebra};
use crate::complex::{self, homology, min_bound, ChainMap, Complex, HomologyData};
use crate::error::{Error, Result};
use crate::linalg::{vector, Matrix, Quotient, Rational, Subspace, Vector};

/// `(row, col, value)` entry of a sparse matrix.
type Triplet = (usize, usize, Rational);

/// Left DG module over a [`DgAlgebra`], stored as action matrices
/// `action(p, i, q) : M_q -> M_{p+q}` for each basis vector `a_{p,i}`.
///
/// A module carrying an `exact_to` bound is the truncation of a larger
/// object; actions landing above its top degree are then unknown rather than
/// zero, and validation skips them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgModule {
    algebra: Arc<DgAlgebra>,
    complex: Complex,
    action: Vec<Vec<Vec<Matrix>>>,
}

impl DgModule {
    pub fn new(algebra: Arc<DgAlgebra>, complex: Complex, action: Vec<Vec<Vec<Matrix>>>) -> Result<Self> {
        let m = Self::unchecked(algebra, complex, action)?;
        m.validate()?;
        Ok(m)
    }

    /// Shape checks only.
    pub fn unchecked(algebra: Arc<DgAlgebra>, complex: Complex, action: Vec<Vec<Vec<Matrix>>>) -> Result<Self> {
        if complex.min_degree() != 0 {
            return Err(Error::Input("module must start in degree 0".into()));
        }
        let ta = algebra.top();
        let tm = complex.top();
        if action.len() != (ta + 1) as usize {
            return Err(Error::DimensionMismatch("action table has the wrong number of algebra degrees".into()));
        }
        for p in 0..=ta {
            if action[p as usize].len() != algebra.dim(p) {
                return Err(Error::DimensionMismatch(format!("action table for algebra degree {p}")));
            }
            for (i, row) in action[p as usize].iter().enumerate() {
                if row.len() != (tm + 1).max(0) as usize {
                    return Err(Error::DimensionMismatch(format!("action of a_{p},{i}")));
                }
                for q in 0..=tm {
                    let want = (complex.dim(p + q), complex.dim(q));
                    if row[q as usize].shape() != want {
                        return Err(Error::DimensionMismatch(format!(
                            "action of a_{p},{i} on degree {q} has shape {:?}, expected {:?}",
                            row[q as usize].shape(),
                            want
                        )));
                    }
                }
            }
        }
        Ok(DgModule { algebra, complex, action })
    }

    /// Build action matrices from a function `(p, i, q) -> matrix`.
    pub fn from_fn(
        algebra: Arc<DgAlgebra>,
        complex: Complex,
        f: impl Fn(i32, usize, i32) -> Matrix,
    ) -> Result<Self> {
        let action = (0..=algebra.top())
            .map(|p| {
                (0..algebra.dim(p))
                    .map(|i| (0..=complex.top()).map(|q| f(p, i, q)).collect())
                    .collect()
            })
            .collect();
        Self::unchecked(algebra, complex, action)
    }

    /// Build from actions of basis vectors `((p, i), (q, j)) -> value`;
    /// unlisted entries are zero.
    pub fn from_actions(
        algebra: Arc<DgAlgebra>,
        complex: Complex,
        entries: impl IntoIterator<Item = ((i32, usize), (i32, usize), Vector)>,
    ) -> Result<Self> {
        let ta = algebra.top();
        let tm = complex.top();
        let mut trip: Vec<Vec<Vec<Vec<Triplet>>>> = (0..=ta)
            .map(|p| vec![vec![Vec::new(); (tm + 1).max(0) as usize]; algebra.dim(p)])
            .collect();
        for ((p, i), (q, j), v) in entries {
            if p < 0 || q < 0 || p > ta || q > tm || i >= algebra.dim(p) || j >= complex.dim(q) {
                return Err(Error::Input(format!("action of ({p},{i}) on ({q},{j}) is out of range")));
            }
            for (r, x) in v {
                if r >= complex.dim(p + q) {
                    return Err(Error::Input(format!("action of ({p},{i}) on ({q},{j}) has an entry out of range")));
                }
                trip[p as usize][i][q as usize].push((r, j, x));
            }
        }
        let action = trip
            .into_iter()
            .enumerate()
            .map(|(p, rows)| {
                rows.into_iter()
                    .map(|per_q| {
                        per_q
                            .into_iter()
                            .enumerate()
                            .map(|(q, t)| {
                                let (p, q) = (p as i32, q as i32);
                                Matrix::from_triplets(complex.dim(p + q), complex.dim(q), t)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        DgModule::new(algebra, complex, action)
    }

    /// `A` as a module over itself.
    pub fn free_rank_one(algebra: &Arc<DgAlgebra>) -> Self {
        let a = algebra.clone();
        DgModule::from_fn(a.clone(), a.complex().clone(), |p, i, q| {
            a.left(p, i, q).expect("in range").clone()
        })
        .expect("algebra as a module")
    }

    pub fn zero(algebra: &Arc<DgAlgebra>) -> Self {
        DgModule::from_fn(algebra.clone(), Complex::zero(), |_, _, _| Matrix::zeros(0, 0)).expect("zero module")
    }

    pub fn algebra(&self) -> &Arc<DgAlgebra> {
        &self.algebra
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn top(&self) -> i32 {
        self.complex.top()
    }

    pub fn dim(&self, n: i32) -> usize {
        self.complex.dim(n)
    }

    pub fn d(&self, n: i32) -> &Matrix {
        self.complex.d(n)
    }

    pub fn exact_to(&self) -> Option<i32> {
        self.complex.exact_to()
    }

    pub fn with_exact_to(mut self, e: Option<i32>) -> Self {
        self.complex = self.complex.with_exact_to(e);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.complex.dims().iter().all(|&d| d == 0)
    }

    /// `a_{p,i} : M_q -> M_{p+q}`; `None` when `q` is outside the module.
    pub fn action(&self, p: i32, i: usize, q: i32) -> Option<&Matrix> {
        if p < 0 || q < 0 || p > self.algebra.top() || q > self.top() {
            return None;
        }
        Some(&self.action[p as usize][i][q as usize])
    }

    /// Action matrix of an element `a` of degree `p` on `M_q`.
    pub fn action_element(&self, p: i32, a: &Vector, q: i32) -> Matrix {
        let mut acc = Matrix::zeros(self.dim(p + q), self.dim(q));
        for (i, c) in a {
            if let Some(m) = self.action(p, *i, q) {
                acc = acc.add(&m.scale(c));
            }
        }
        acc
    }

    pub fn act(&self, p: i32, a: &Vector, q: i32, m: &Vector) -> Vector {
        let mut acc = Vec::new();
        for (i, c) in a {
            if let Some(mat) = self.action(p, *i, q) {
                acc = vector::axpy(&acc, c, &mat.mul_vec(m));
            }
        }
        acc
    }

    /// Highest degree in which products are known.
    fn known_to(&self) -> i32 {
        match self.exact_to() {
            None => self.top(),
            Some(e) => e.min(self.top()),
        }
    }

    /// Unit, associativity and Leibniz on basis vectors.
    pub fn validate(&self) -> Result<()> {
        self.complex.check_d_squared()?;
        let a = &self.algebra;
        let known = self.known_to();
        for q in 0..=self.top() {
            if !self.action_element(0, a.unit(), q).is_identity() {
                return Err(Error::Axiom(format!("unit does not act as the identity on degree {q}")));
            }
        }
        for p in 0..=a.top() {
            for i in 0..a.dim(p) {
                for q in 0..=self.top() {
                    if p + q > known + 1 || (self.exact_to().is_some() && p + q > known) {
                        continue;
                    }
                    let am = &self.action[p as usize][i][q as usize];
                    let da = a.d(p).mul_vec(&vector::unit(i));
                    for j in 0..self.dim(q) {
                        let lhs = if p + q <= self.top() {
                            self.d(p + q).mul_vec(am.column(j))
                        } else {
                            Vec::new()
                        };
                        let t1 = self.act(p - 1, &da, q, &vector::unit(j));
                        let dm = self.d(q).mul_vec(&vector::unit(j));
                        let t2 = if q >= 1 { self.act(p, &vector::unit(i), q - 1, &dm) } else { Vec::new() };
                        let rhs = vector::axpy(&t1, &Rational::sign(p as i64), &t2);
                        if lhs != rhs {
                            return Err(Error::Axiom(format!(
                                "Leibniz rule fails on basis pair (a_{p},{i}, m_{q},{j}) in degree {}",
                                p + q
                            )));
                        }
                    }
                    for r in 0..=a.top() {
                        if p + q + r > known {
                            continue;
                        }
                        for k in 0..a.dim(r) {
                            // (a_i a_k) m = a_i (a_k m)
                            let prod = a.mul_basis(p, i, r, k);
                            let lhs = self.action_element(p + r, &prod, q);
                            let rhs = self.action[p as usize][i][(r + q) as usize]
                                .mul(&self.action[r as usize][k][q as usize]);
                            if lhs != rhs {
                                return Err(Error::Axiom(format!(
                                    "associativity fails on (a_{p},{i}, a_{r},{k}) acting on degree {q}"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether a chain map between modules over the same algebra commutes
    /// with the action.
    pub fn check_linear(f: &ChainMap, src: &DgModule, tgt: &DgModule) -> Result<()> {
        f.check(src.complex(), tgt.complex())?;
        let a = &src.algebra;
        let known = src.known_to().min(tgt.known_to());
        for p in 0..=a.top() {
            for i in 0..a.dim(p) {
                for q in 0..=src.top() {
                    if p + q > known {
                        continue;
                    }
                    let lhs = tgt.action(p, i, q).map(|m| m.mul(f.component(q)));
                    let rhs = src.action(p, i, q).map(|m| f.component(p + q).mul(m));
                    match (lhs, rhs) {
                        (Some(l), Some(r)) if l == r => {}
                        (Some(l), Some(r)) if l.is_zero() && r.is_zero() => {}
                        (None, None) => {}
                        _ => {
                            return Err(Error::Axiom(format!(
                                "map is not linear for a_{p},{i} on degree {q}"
                            )))
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Blocks ordered `self` then `other` in every degree.
    pub fn direct_sum(&self, other: &DgModule) -> DgModule {
        let complex = self.complex.direct_sum(&other.complex);
        DgModule::from_fn(self.algebra.clone(), complex, |p, i, q| {
            Matrix::block_diag(&[&pad_action(self, p, i, q), &pad_action(other, p, i, q)])
        })
        .expect("direct sum")
    }

    /// Direct sum of `n` copies.
    pub fn power(&self, n: usize) -> DgModule {
        let mut acc = DgModule::zero(&self.algebra).with_exact_to(self.exact_to());
        for _ in 0..n {
            acc = acc.direct_sum(self);
        }
        acc
    }

    /// `ΣM`: degree `n` holds `M_{n-1}`, `d` negated, action twisted by `(-1)^{|a|}`.
    pub fn suspension(&self) -> DgModule {
        let complex = complex::suspension(&self.complex);
        DgModule::from_fn(self.algebra.clone(), complex.clone(), |p, i, q| {
            if q == 0 {
                Matrix::zeros(complex.dim(p), 0)
            } else {
                pad_action(self, p, i, q - 1).scale(&Rational::sign(p as i64))
            }
        })
        .expect("suspension")
    }

    /// `ΩM`: good truncation of `M[-1]`, action twisted by `(-1)^{|a|}`.
    pub fn loop_module(&self) -> DgModule {
        let t = complex::truncate_geq0(&complex::shift_down(&self.complex));
        let kernel = t.kernel.clone();
        let basis = kernel.basis_matrix();
        DgModule::from_fn(self.algebra.clone(), t.complex.clone(), |p, i, q| {
            let sign = Rational::sign(p as i64);
            let raw = pad_action(self, p, i, q + 1).scale(&sign);
            let src = if q == 0 { raw.mul(&basis) } else { raw };
            if p + q == 0 {
                let cols = src.columns().iter().map(|c| kernel.coordinates_unchecked(c)).collect();
                Matrix::from_columns(kernel.dim(), cols)
            } else {
                src
            }
        })
        .expect("loop module")
    }

    /// Quotient by a DG submodule given degreewise; returns the projection.
    pub fn quotient(&self, sub: Vec<Subspace>) -> (DgModule, ChainMap) {
        let top = self.top();
        let quots: Vec<Quotient> = sub.into_iter().map(Quotient::new).collect();
        let dims: Vec<usize> = quots.iter().map(Quotient::dim).collect();
        let proj: Vec<Matrix> = quots.iter().map(Quotient::projection_matrix).collect();
        let sect: Vec<Matrix> = quots.iter().map(Quotient::section_matrix).collect();
        let diffs = (1..=top)
            .map(|n| proj[(n - 1) as usize].mul(self.d(n)).mul(&sect[n as usize]))
            .collect();
        let complex = Complex::from_parts_unchecked(0, dims, diffs).with_exact_to(self.exact_to());
        let q = DgModule::from_fn(self.algebra.clone(), complex.clone(), |p, i, deg| {
            if p + deg > top {
                return Matrix::zeros(0, complex.dim(deg));
            }
            proj[(p + deg) as usize]
                .mul(self.action(p, i, deg).expect("in range"))
                .mul(&sect[deg as usize])
        })
        .expect("quotient module");
        let map = ChainMap::from_fn(&self.complex, &complex, |n| {
            if n < 0 || n > top {
                Matrix::zeros(complex.dim(n), self.dim(n))
            } else {
                proj[n as usize].clone()
            }
        });
        (q, map)
    }

    /// DG submodule given degreewise (closed under `d` and the action);
    /// returns the inclusion.
    pub fn submodule(&self, sub: &[Subspace]) -> Result<(DgModule, ChainMap)> {
        let top = self.top();
        let coords = |n: i32, m: &Matrix| -> Result<Matrix> {
            let s = &sub[n as usize];
            let mut cols = Vec::with_capacity(m.cols());
            for c in m.columns() {
                cols.push(s.coordinates(c).ok_or_else(|| Error::Internal(format!("submodule not closed in degree {n}")))?);
            }
            Ok(Matrix::from_columns(s.dim(), cols))
        };
        let dims: Vec<usize> = sub.iter().map(Subspace::dim).collect();
        let mut diffs = Vec::new();
        for n in 1..=top {
            diffs.push(coords(n - 1, &self.d(n).mul(&sub[n as usize].basis_matrix()))?);
        }
        let complex = Complex::from_parts_unchecked(0, dims, diffs).with_exact_to(self.exact_to());
        let a = self.algebra.clone();
        let mut action = Vec::new();
        for p in 0..=a.top() {
            let mut per_i = Vec::new();
            for i in 0..a.dim(p) {
                let mut per_q = Vec::new();
                for q in 0..=top {
                    if p + q > top {
                        per_q.push(Matrix::zeros(0, complex.dim(q)));
                    } else {
                        let m = self.action(p, i, q).expect("in range").mul(&sub[q as usize].basis_matrix());
                        per_q.push(coords(p + q, &m)?);
                    }
                }
                per_i.push(per_q);
            }
            action.push(per_i);
        }
        let m = DgModule::unchecked(a, complex.clone(), action)?;
        let incl = ChainMap::from_fn(&complex, &self.complex, |n| {
            if n < 0 || n > top {
                Matrix::zeros(self.dim(n), complex.dim(n))
            } else {
                sub[n as usize].basis_matrix()
            }
        });
        Ok((m, incl))
    }

    /// DG submodule generated by homogeneous elements, `A·span(S ∪ dS)`.
    pub fn generated_submodule(&self, gens: &[(i32, Vector)]) -> Vec<Subspace> {
        let a = &self.algebra;
        let top = self.top();
        let mut spans: Vec<Vec<Vector>> = vec![Vec::new(); (top + 1) as usize];
        let mut seeds: Vec<(i32, Vector)> = Vec::new();
        for (k, s) in gens {
            seeds.push((*k, s.clone()));
            if *k >= 1 {
                seeds.push((k - 1, self.d(*k).mul_vec(s)));
            }
        }
        for (k, s) in seeds {
            for p in 0..=a.top() {
                if p + k > top {
                    break;
                }
                for i in 0..a.dim(p) {
                    let v = self.act(p, &vector::unit(i), k, &s);
                    if !v.is_empty() {
                        spans[(p + k) as usize].push(v);
                    }
                }
            }
        }
        spans
            .iter()
            .enumerate()
            .map(|(n, vs)| Subspace::span(self.dim(n as i32), vs))
            .collect()
    }

    /// `M / A·span(S ∪ dS)` with its projection.
    pub fn quotient_by_generated(&self, gens: &[(i32, Vector)]) -> (DgModule, ChainMap) {
        self.quotient(self.generated_submodule(gens))
    }

    /// `e·M` for an idempotent `e` in `A_0`: the image of the action of `e`.
    pub fn idempotent_part(&self, e: &Vector) -> Result<(DgModule, ChainMap)> {
        let sub: Vec<Subspace> = (0..=self.top())
            .map(|q| Subspace::image(&self.action_element(0, e, q)))
            .collect();
        self.submodule(&sub)
    }
}

fn pad_action(m: &DgModule, p: i32, i: usize, q: i32) -> Matrix {
    m.padded_action(p, i, q)
}

impl DgModule {
    /// Action matrix with shape `dim(p+q) x dim(q)`, zero outside the stored range.
    pub fn padded_action(&self, p: i32, i: usize, q: i32) -> Matrix {
        match self.action(p, i, q) {
            Some(x) if p + q <= self.top() => x.clone(),
            _ => Matrix::zeros(self.dim(p + q), self.dim(q)),
        }
    }
}

/// Module over `H0(A)` viewed over `A` through `A -> H0(A)`:
/// degree-0 elements act through their classes, positive degrees act by zero.
pub fn inflate(algebra: &Arc<DgAlgebra>, h0: &HomologyAlgebra, x: &DgModule) -> Result<DgModule> {
    if x.algebra().top() != 0 {
        return Err(Error::Input("inflation expects a module over an algebra in degree 0".into()));
    }
    let classes: Vec<Vector> = (0..algebra.dim(0))
        .map(|i| h0.data.class_of(0, &vector::unit(i)))
        .collect::<Result<_>>()?;
    let m = DgModule::from_fn(algebra.clone(), x.complex().clone(), |p, i, q| {
        if p == 0 {
            x.action_element(0, &classes[i], q)
        } else {
            Matrix::zeros(x.dim(p + q), x.dim(q))
        }
    })?;
    m.validate()?;
    Ok(m)
}

/// `H(M)` as a graded module over `H(A)`, in the certified degrees of `M`.
#[derive(Clone, Debug)]
pub struct HomologyModule {
    pub module: DgModule,
    pub data: HomologyData,
}

pub fn homology_module(m: &DgModule, ha: &HomologyAlgebra) -> Result<HomologyModule> {
    let data = homology(m.complex());
    let top = data.certified_to().min(m.top());
    let dims: Vec<usize> = (0..=top.max(-1)).map(|n| data.dim(n)).collect();
    let dims = if dims.is_empty() { vec![0] } else { dims };
    let complex = Complex::new(0, dims.clone(), vec![])?.with_exact_to(m.exact_to().map(|_| top));
    let a = &ha.algebra;
    let mut action = Vec::new();
    for p in 0..=a.top() {
        let mut per_i = Vec::new();
        for i in 0..a.dim(p) {
            let rep = ha.data.representative(p, i);
            let mut per_q = Vec::new();
            for q in 0..dims.len() as i32 {
                let rows = complex.dim(p + q);
                let mut cols = Vec::new();
                for j in 0..complex.dim(q) {
                    if p + q > top || q > top {
                        cols.push(Vec::new());
                        continue;
                    }
                    let v = m.act(p, &rep, q, &data.representative(q, j));
                    cols.push(data.class_of(p + q, &v)?);
                }
                per_q.push(Matrix::from_columns(rows, cols));
            }
            per_i.push(per_q);
        }
        action.push(per_i);
    }
    let module = DgModule::new(a.clone(), complex, action)?;
    Ok(HomologyModule { module, data })
}

/// Validity bound of a module built from two inputs.
pub fn combined_bound(a: &DgModule, b: &DgModule) -> Option<i32> {
    min_bound(a.exact_to(), b.exact_to())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::algebra::homology_algebra;
    use crate::dg::examples;

    #[test]
    fn free_module_validates() {
        let a = examples::koszul_dual_numbers();
        let m = DgModule::free_rank_one(&a);
        m.validate().unwrap();
        let s = m.suspension();
        s.validate().unwrap();
        assert_eq!(s.complex().dims(), &[0, 2, 2]);
        let l = s.loop_module();
        l.validate().unwrap();
        assert_eq!(l.complex().dims(), m.complex().dims());
    }

    #[test]
    fn augmentation_module_over_dual_numbers() {
        let a = examples::dual_numbers();
        let k = examples::residue_module(&a);
        k.validate().unwrap();
        let ha = homology_algebra(&a).unwrap();
        let hm = homology_module(&k, &ha).unwrap();
        assert_eq!(hm.data.dims(), vec![1]);
    }

    #[test]
    fn quotient_by_generated_element() {
        let a = examples::dual_numbers();
        let m = DgModule::free_rank_one(&a);
        let (q, proj) = m.quotient_by_generated(&[(0, vector::unit(1))]);
        q.validate().unwrap();
        assert_eq!(q.complex().dims(), &[1]);
        DgModule::check_linear(&proj, &m, &q).unwrap();
    }

    #[test]
    fn leibniz_violation_is_reported() {
        let a = examples::exterior(1);
        // y maps degree 0 onto degree 1, which no differential can absorb.
        let c = Complex::new(0, vec![1, 1], vec![Matrix::identity(1)]).unwrap();
        let err = DgModule::from_actions(
            a.clone(),
            c,
            [((0, 0), (0, 0), vector::unit(0)), ((0, 0), (1, 0), vector::unit(0)), ((1, 0), (0, 0), vector::unit(0))],
        )
        .unwrap_err();
        assert!(err.to_string().contains("Leibniz"), "{err}");
    }
}
