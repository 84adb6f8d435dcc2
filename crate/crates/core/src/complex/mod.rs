//! Bounded chain complexes over the rationals.
//!
//! A complex is supported on a contiguous degree range starting at
//! `min_degree` (0, or -1 for the intermediate produced by [`shift_down`]).
//! Objects built from infinite constructions are cut off at a window; the
//! `exact_to` bound records up to which degree the stored data agrees with the
//! untruncated object, and homology is certified one degree below it.

mod constructions;
mod homology;

pub use constructions::{
    long_exact_sequence, mapping_fiber, path0, shift_down, suspension, truncate_geq0, FiberData,
    LesNode, LongExactSequence, Truncation,
};
pub use homology::{homology, induced_map, is_quasi_iso, HomologyData};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rank, Matrix};

static EMPTY: Matrix = Matrix::EMPTY;

/// Dimensions of a finite graded vector space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedSpace {
    pub min_degree: i32,
    pub dims: Vec<usize>,
}

impl GradedSpace {
    pub fn new(dims: Vec<usize>) -> Self {
        GradedSpace { min_degree: 0, dims }
    }

    pub fn dim(&self, n: i32) -> usize {
        let k = n - self.min_degree;
        if k < 0 {
            0
        } else {
            self.dims.get(k as usize).copied().unwrap_or(0)
        }
    }

    /// Highest stored degree (`min_degree - 1` when empty).
    pub fn top(&self) -> i32 {
        self.min_degree + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.min_degree..=self.top()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// Dimensions for degrees `0..=top`, padding with zeros.
    pub fn dims_from_zero(&self, top: i32) -> Vec<usize> {
        (0..=top).map(|n| self.dim(n)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Complex {
    space: GradedSpace,
    /// `diffs[k]` is `d` leaving degree `min_degree + k`; one extra trailing
    /// entry maps the empty degree above the top.
    diffs: Vec<Matrix>,
    exact_to: Option<i32>,
}

impl Complex {
    /// `diffs[k]` is `d_{min_degree + 1 + k}`; missing ones are zero.
    pub fn new(min_degree: i32, dims: Vec<usize>, diffs: Vec<Matrix>) -> Result<Self> {
        let space = GradedSpace { min_degree, dims };
        let n = space.dims.len();
        if diffs.len() > n.saturating_sub(1) {
            return Err(Error::DimensionMismatch(format!(
                "{} differentials for {} degrees",
                diffs.len(),
                n
            )));
        }
        let mut all = Vec::with_capacity(n + 1);
        all.push(Matrix::zeros(0, space.dim(min_degree)));
        for k in 1..n {
            let deg = min_degree + k as i32;
            let want = (space.dim(deg - 1), space.dim(deg));
            let m = diffs.get(k - 1).cloned().unwrap_or_else(|| Matrix::zeros(want.0, want.1));
            if m.shape() != want {
                return Err(Error::DimensionMismatch(format!(
                    "d_{deg} has shape {:?}, expected {:?}",
                    m.shape(),
                    want
                )));
            }
            all.push(m);
        }
        all.push(Matrix::zeros(space.dim(space.top()), 0));
        let c = Complex { space, diffs: all, exact_to: None };
        c.check_d_squared()?;
        Ok(c)
    }

    /// Build from differentials `d_{min+1} ..` without checking `d^2 = 0`.
    pub(crate) fn from_parts_unchecked(min_degree: i32, dims: Vec<usize>, diffs: Vec<Matrix>) -> Self {
        let space = GradedSpace { min_degree, dims };
        let n = space.dims.len();
        let mut all = Vec::with_capacity(n + 1);
        all.push(Matrix::zeros(0, space.dim(min_degree)));
        all.extend(diffs);
        debug_assert_eq!(all.len(), n.max(1));
        all.push(Matrix::zeros(space.dim(space.top()), 0));
        Complex { space, diffs: all, exact_to: None }
    }

    pub fn zero() -> Self {
        Complex::from_parts_unchecked(0, vec![0], vec![])
    }

    /// The field in degree `n >= 0`.
    pub fn sphere(n: i32) -> Self {
        assert!(n >= 0);
        let mut dims = vec![0; n as usize + 1];
        dims[n as usize] = 1;
        let diffs = (1..=n).map(|k| Matrix::zeros(dims[k as usize - 1], dims[k as usize])).collect();
        Complex::from_parts_unchecked(0, dims, diffs)
    }

    /// The field in degrees `n` and `n - 1` joined by the identity, `n >= 1`.
    pub fn disk(n: i32) -> Self {
        assert!(n >= 1);
        let mut dims = vec![0; n as usize + 1];
        dims[n as usize] = 1;
        dims[n as usize - 1] = 1;
        let diffs = (1..=n)
            .map(|k| {
                if k == n {
                    Matrix::identity(1)
                } else {
                    Matrix::zeros(dims[k as usize - 1], dims[k as usize])
                }
            })
            .collect();
        Complex::from_parts_unchecked(0, dims, diffs)
    }

    pub fn with_exact_to(mut self, exact_to: Option<i32>) -> Self {
        self.exact_to = exact_to;
        self
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn min_degree(&self) -> i32 {
        self.space.min_degree
    }

    pub fn top(&self) -> i32 {
        self.space.top()
    }

    pub fn dim(&self, n: i32) -> usize {
        self.space.dim(n)
    }

    pub fn dims(&self) -> &[usize] {
        &self.space.dims
    }

    /// Degree up to which the data is that of the untruncated object;
    /// `None` when the complex is genuinely bounded.
    pub fn exact_to(&self) -> Option<i32> {
        self.exact_to
    }

    /// Highest degree whose homology is certified.
    pub fn certified_to(&self) -> i32 {
        match self.exact_to {
            None => self.top(),
            Some(e) => (e - 1).min(self.top()),
        }
    }

    /// `d_n : C_n -> C_{n-1}`.
    pub fn d(&self, n: i32) -> &Matrix {
        let k = n - self.space.min_degree;
        if k < 0 || k as usize >= self.diffs.len() {
            &EMPTY
        } else {
            &self.diffs[k as usize]
        }
    }

    /// Differentials `d_{min+1} ..= d_top`.
    pub fn differentials(&self) -> &[Matrix] {
        let n = self.diffs.len();
        &self.diffs[1..n - 1]
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for n in self.space.degrees() {
            if !self.d(n).mul(self.d(n + 1)).is_zero() {
                return Err(Error::Axiom(format!("d_{} d_{} != 0", n, n + 1)));
            }
        }
        Ok(())
    }

    pub fn is_acyclic_to(&self, top: i32) -> bool {
        (self.min_degree()..=top).all(|n| {
            let z = self.dim(n) - rank(self.d(n));
            z == rank(self.d(n + 1))
        })
    }

    /// Direct sum with blocks ordered `self` then `other` in every degree.
    pub fn direct_sum(&self, other: &Complex) -> Complex {
        let lo = self.min_degree().min(other.min_degree());
        let hi = self.top().max(other.top());
        let dims = (lo..=hi).map(|n| self.dim(n) + other.dim(n)).collect();
        let diffs = (lo + 1..=hi)
            .map(|n| Matrix::block_diag(&[&self.padded_d(n), &other.padded_d(n)]))
            .collect();
        Complex::from_parts_unchecked(lo, dims, diffs).with_exact_to(min_bound(self.exact_to, other.exact_to))
    }

    /// `d_n` with the shape `dim(n-1) x dim(n)` even outside the stored range.
    pub fn padded_d(&self, n: i32) -> Matrix {
        let m = self.d(n);
        if m.shape() == (self.dim(n - 1), self.dim(n)) {
            m.clone()
        } else {
            Matrix::zeros(self.dim(n - 1), self.dim(n))
        }
    }
}

/// Minimum of two validity bounds, `None` meaning unbounded.
pub fn min_bound(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

/// Degreewise linear maps commuting with the differentials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    min_degree: i32,
    components: Vec<Matrix>,
}

impl ChainMap {
    /// Components listed from degree `min(source.min, target.min)`;
    /// missing trailing components are zero.
    pub fn new(source: &Complex, target: &Complex, components: Vec<Matrix>) -> Result<Self> {
        let f = Self::unchecked(source, target, components)?;
        f.check(source, target)?;
        Ok(f)
    }

    fn unchecked(source: &Complex, target: &Complex, mut components: Vec<Matrix>) -> Result<Self> {
        let lo = source.min_degree().min(target.min_degree());
        let hi = source.top().max(target.top());
        let count = (hi - lo + 1).max(0) as usize;
        if components.len() > count {
            return Err(Error::DimensionMismatch(format!(
                "{} components for {} degrees",
                components.len(),
                count
            )));
        }
        for n in lo + components.len() as i32..=hi {
            components.push(Matrix::zeros(target.dim(n), source.dim(n)));
        }
        for (k, m) in components.iter().enumerate() {
            let n = lo + k as i32;
            if m.shape() != (target.dim(n), source.dim(n)) {
                return Err(Error::DimensionMismatch(format!(
                    "component in degree {n} has shape {:?}, expected {:?}",
                    m.shape(),
                    (target.dim(n), source.dim(n))
                )));
            }
        }
        Ok(ChainMap { min_degree: lo, components })
    }

    /// Build from a function of the degree without verifying commutation.
    pub fn from_fn(source: &Complex, target: &Complex, f: impl Fn(i32) -> Matrix) -> Self {
        let lo = source.min_degree().min(target.min_degree());
        let hi = source.top().max(target.top());
        let components = (lo..=hi).map(&f).collect();
        let m = ChainMap { min_degree: lo, components };
        debug_assert!(m.shapes_match(source, target));
        m
    }

    fn shapes_match(&self, source: &Complex, target: &Complex) -> bool {
        self.components
            .iter()
            .enumerate()
            .all(|(k, m)| {
                let n = self.min_degree + k as i32;
                m.shape() == (target.dim(n), source.dim(n))
            })
    }

    pub fn identity(c: &Complex) -> Self {
        Self::from_fn(c, c, |n| Matrix::identity(c.dim(n)))
    }

    pub fn zero(source: &Complex, target: &Complex) -> Self {
        Self::from_fn(source, target, |n| Matrix::zeros(target.dim(n), source.dim(n)))
    }

    pub fn component(&self, n: i32) -> &Matrix {
        let k = n - self.min_degree;
        if k < 0 || k as usize >= self.components.len() {
            &EMPTY
        } else {
            &self.components[k as usize]
        }
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.min_degree..=self.min_degree + self.components.len() as i32 - 1
    }

    /// Shapes and `d f = f d` in every degree.
    pub fn check(&self, source: &Complex, target: &Complex) -> Result<()> {
        if !self.shapes_match(source, target) {
            return Err(Error::DimensionMismatch("chain map components have wrong shapes".into()));
        }
        for n in self.degrees() {
            let lhs = target.padded_d(n).mul(&self.padded(source, target, n));
            let rhs = self.padded(source, target, n - 1).mul(&source.padded_d(n));
            if lhs != rhs {
                return Err(Error::Axiom(format!("chain map does not commute with d in degree {n}")));
            }
        }
        Ok(())
    }

    /// Component in degree `n` with the shape `target.dim(n) x source.dim(n)`.
    pub fn padded(&self, source: &Complex, target: &Complex, n: i32) -> Matrix {
        let m = self.component(n);
        if m.shape() == (target.dim(n), source.dim(n)) {
            m.clone()
        } else {
            Matrix::zeros(target.dim(n), source.dim(n))
        }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &ChainMap, source: &Complex, mid: &Complex, target: &Complex) -> ChainMap {
        ChainMap::from_fn(source, target, |n| {
            self.padded(mid, target, n).mul(&first.padded(source, mid, n))
        })
    }

    /// Surjective in every degree `n > 0` of the target.
    pub fn is_fibration(&self, source: &Complex, target: &Complex) -> bool {
        (1..=target.top()).all(|n| rank(&self.padded(source, target, n)) == target.dim(n))
    }

    pub fn is_degreewise_surjective(&self, source: &Complex, target: &Complex) -> bool {
        (target.min_degree()..=target.top()).all(|n| rank(&self.padded(source, target, n)) == target.dim(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_and_disk_shapes() {
        let s = Complex::sphere(2);
        assert_eq!(s.dims(), &[0, 0, 1]);
        let d = Complex::disk(1);
        assert_eq!(d.dims(), &[1, 1]);
        assert!(d.d(1).is_identity());
        assert!(d.is_acyclic_to(1));
        assert!(!s.is_acyclic_to(2));
    }

    #[test]
    fn rejects_nonzero_square() {
        let one = Matrix::identity(1);
        let err = Complex::new(0, vec![1, 1, 1], vec![one.clone(), one]).unwrap_err();
        assert!(err.to_string().contains("d_1 d_2"));
    }

    #[test]
    fn chain_map_commutation() {
        let d = Complex::disk(1);
        let s = Complex::sphere(0);
        let proj = ChainMap::new(&d, &s, vec![Matrix::identity(1), Matrix::zeros(0, 1)]);
        assert!(proj.is_err());
        let incl = ChainMap::new(&s, &d, vec![Matrix::identity(1)]).unwrap();
        assert_eq!(incl.component(1).shape(), (1, 0));
    }
}
