//! First-quadrant double complexes with commuting differentials.

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Grid `C_{pq}` with `d^h: C_{pq} -> C_{p-1,q}` and `d^v: C_{pq} -> C_{p,q-1}`
/// satisfying `d^v d^h = d^h d^v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleComplex {
    dims: Vec<Vec<usize>>,
    dh: Vec<Vec<Matrix>>,
    dv: Vec<Vec<Matrix>>,
    certified_to: i32,
}

impl DoubleComplex {
    /// `dims[p][q]`; `dh(p, q)` is only asked for `p >= 1`, `dv(p, q)` for `q >= 1`.
    pub fn from_fn(
        dims: Vec<Vec<usize>>,
        certified_to: i32,
        dh: impl Fn(usize, usize) -> Matrix,
        dv: impl Fn(usize, usize) -> Matrix,
    ) -> Result<Self> {
        let get = |p: usize, q: usize| dims.get(p).and_then(|c| c.get(q)).copied().unwrap_or(0);
        let mut h = Vec::with_capacity(dims.len());
        let mut v = Vec::with_capacity(dims.len());
        for (p, col) in dims.iter().enumerate() {
            let mut hp = Vec::with_capacity(col.len());
            let mut vp = Vec::with_capacity(col.len());
            for q in 0..col.len() {
                let mh = if p == 0 { Matrix::zeros(0, col[q]) } else { dh(p, q) };
                let mv = if q == 0 { Matrix::zeros(0, col[q]) } else { dv(p, q) };
                let want_h = (if p == 0 { 0 } else { get(p - 1, q) }, col[q]);
                let want_v = (if q == 0 { 0 } else { col[q - 1] }, col[q]);
                if mh.shape() != want_h || mv.shape() != want_v {
                    return Err(Error::DimensionMismatch(format!("grid differential at ({p},{q}) has the wrong shape")));
                }
                hp.push(mh);
                vp.push(mv);
            }
            h.push(hp);
            v.push(vp);
        }
        let dc = DoubleComplex { dims, dh: h, dv: v, certified_to };
        dc.validate()?;
        Ok(dc)
    }

    pub fn validate(&self) -> Result<()> {
        for p in 0..self.dims.len() {
            for q in 0..self.dims[p].len() {
                if p >= 2 && !self.dh(p - 1, q).mul(self.dh(p, q)).is_zero() {
                    return Err(Error::Axiom(format!("horizontal differential squares to nonzero at ({p},{q})")));
                }
                if q >= 2 && !self.dv(p, q - 1).mul(self.dv(p, q)).is_zero() {
                    return Err(Error::Axiom(format!("vertical differential squares to nonzero at ({p},{q})")));
                }
                if p >= 1 && q >= 1 && self.dv(p - 1, q).mul(self.dh(p, q)) != self.dh(p, q - 1).mul(self.dv(p, q)) {
                    return Err(Error::Axiom(format!("differentials do not commute at ({p},{q})")));
                }
            }
        }
        Ok(())
    }

    pub fn p_top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn dim(&self, p: i32, q: i32) -> usize {
        if p < 0 || q < 0 {
            return 0;
        }
        self.dims.get(p as usize).and_then(|c| c.get(q as usize)).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[Vec<usize>] {
        &self.dims
    }

    /// Highest total degree whose homology is meaningful.
    pub fn certified_to(&self) -> i32 {
        self.certified_to
    }

    pub fn dh(&self, p: usize, q: usize) -> &Matrix {
        &self.dh[p][q]
    }

    pub fn dv(&self, p: usize, q: usize) -> &Matrix {
        &self.dv[p][q]
    }

    /// Highest total degree with a nonzero cell slot.
    pub fn total_top(&self) -> i32 {
        self.dims
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(p, c)| (p + c.len() - 1) as i32)
            .max()
            .unwrap_or(0)
    }

    /// Swap the roles of `p` and `q`.
    pub fn transpose(&self) -> DoubleComplex {
        let q_top = self.dims.iter().map(Vec::len).max().unwrap_or(0);
        let dims: Vec<Vec<usize>> = (0..q_top)
            .map(|q| {
                let len = (0..self.dims.len()).rev().find(|&p| self.dims[p].len() > q).map_or(0, |p| p + 1);
                (0..len).map(|p| self.dim(p as i32, q as i32)).collect()
            })
            .collect();
        let pick = |m: Option<&Matrix>, rows: usize, cols: usize| m.cloned().unwrap_or_else(|| Matrix::zeros(rows, cols));
        let dh = |q: usize, p: usize| {
            pick(self.dv.get(p).and_then(|c| c.get(q)), self.dim(p as i32, q as i32 - 1), self.dim(p as i32, q as i32))
        };
        let dv = |q: usize, p: usize| {
            pick(self.dh.get(p).and_then(|c| c.get(q)), self.dim(p as i32 - 1, q as i32), self.dim(p as i32, q as i32))
        };
        DoubleComplex::from_fn(dims, self.certified_to, dh, dv).expect("transpose of a valid grid")
    }

    /// Cell sizes of total degree `n`, indexed by `p`.
    pub fn blocks(&self, n: i32) -> Vec<usize> {
        (0..=n).map(|p| self.dim(p, n - p)).collect()
    }

    /// `Tot_n = ⊕_{p+q=n} C_{pq}` ordered by `p`, with `d = d^h + (-1)^p d^v`.
    pub fn total_complex(&self) -> Complex {
        let top = self.total_top();
        let dims: Vec<usize> = (0..=top).map(|n| self.blocks(n).iter().sum()).collect();
        let diffs = (1..=top)
            .map(|n| {
                let mut blocks = Vec::new();
                for p in 0..=n {
                    let q = n - p;
                    if self.dim(p, q) == 0 {
                        continue;
                    }
                    let (pu, qu) = (p as usize, q as usize);
                    if p >= 1 && self.dim(p - 1, q) > 0 {
                        blocks.push((pu - 1, pu, self.dh(pu, qu).clone()));
                    }
                    if q >= 1 && self.dim(p, q - 1) > 0 {
                        let sign = crate::linalg::Rational::sign(p as i64);
                        blocks.push((pu, pu, self.dv(pu, qu).scale(&sign)));
                    }
                }
                Matrix::from_blocks(&self.blocks(n - 1), &self.blocks(n), blocks)
            })
            .collect();
        let bound = if self.certified_to < top { Some(self.certified_to + 1) } else { None };
        Complex::new(0, dims, diffs).expect("total complex").with_exact_to(bound)
    }

    /// Length of `F_p Tot_n`, the prefix of cells with index `<= p`.
    pub fn filtration_dim(&self, n: i32, p: i32) -> usize {
        if p < 0 || n < 0 {
            return 0;
        }
        self.blocks(n)[..=p.min(n) as usize].iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::homology;

    /// Square `k -> k` in both directions, all maps identity.
    fn square() -> DoubleComplex {
        DoubleComplex::from_fn(vec![vec![1, 1], vec![1, 1]], 2, |_, _| Matrix::identity(1), |_, _| Matrix::identity(1)).unwrap()
    }

    #[test]
    fn total_of_square_is_acyclic() {
        let t = square().total_complex();
        t.check_d_squared().unwrap();
        assert!(homology(&t).is_zero_to(2));
    }

    #[test]
    fn single_cell() {
        let dc = DoubleComplex::from_fn(vec![vec![2]], 0, |_, _| unreachable!(), |_, _| unreachable!()).unwrap();
        assert_eq!(dc.total_complex().dims(), &[2]);
    }

    #[test]
    fn rejects_anticommuting_square() {
        let bad = DoubleComplex::from_fn(
            vec![vec![1, 1], vec![1, 1]],
            2,
            |_, q| if q == 1 { Matrix::identity(1).neg() } else { Matrix::identity(1) },
            |_, _| Matrix::identity(1),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn transpose_twice() {
        let dc = square();
        assert_eq!(dc.transpose().transpose(), dc);
    }
}
