use std::collections::BTreeMap;

use super::{ChainMap, Complex};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, SubQuotient, Subspace, Vector};

/// Homology with explicit representatives and class projections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyData {
    min_degree: i32,
    groups: Vec<SubQuotient>,
    certified_to: i32,
}

/// `ker d_n / im d_{n+1}` in every stored degree.
pub fn homology(c: &Complex) -> HomologyData {
    let groups = c
        .space()
        .degrees()
        .map(|n| {
            let z = Subspace::kernel(&c.padded_d(n));
            let b = Subspace::image(&c.padded_d(n + 1));
            SubQuotient::new(z, &b)
        })
        .collect();
    HomologyData { min_degree: c.min_degree(), groups, certified_to: c.certified_to() }
}

impl HomologyData {
    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    pub fn top(&self) -> i32 {
        self.min_degree + self.groups.len() as i32 - 1
    }

    /// Highest degree whose value is that of the untruncated object.
    pub fn certified_to(&self) -> i32 {
        self.certified_to
    }

    pub fn group(&self, n: i32) -> Option<&SubQuotient> {
        let k = n - self.min_degree;
        if k < 0 {
            None
        } else {
            self.groups.get(k as usize)
        }
    }

    pub fn dim(&self, n: i32) -> usize {
        self.group(n).map_or(0, SubQuotient::dim)
    }

    /// Dimensions for degrees `0..=top`.
    pub fn dims(&self) -> Vec<usize> {
        (0..=self.top()).map(|n| self.dim(n)).collect()
    }

    /// Certified dimensions, degrees `0..=certified_to`.
    pub fn certified_dims(&self) -> Vec<usize> {
        (0..=self.certified_to.min(self.top())).map(|n| self.dim(n)).collect()
    }

    pub fn total_dim_to(&self, top: i32) -> usize {
        (self.min_degree..=top).map(|n| self.dim(n)).sum()
    }

    pub fn representative(&self, n: i32, t: usize) -> Vector {
        self.group(n).expect("degree out of range").representative(t)
    }

    /// Representatives as the columns of a matrix.
    pub fn representatives(&self, n: i32, ambient: usize) -> Matrix {
        match self.group(n) {
            Some(g) => g.representatives(),
            None => Matrix::zeros(ambient, 0),
        }
    }

    /// Class of a cycle; an error if `z` is not a cycle.
    pub fn class_of(&self, n: i32, z: &Vector) -> Result<Vector> {
        match self.group(n) {
            None if z.is_empty() => Ok(Vec::new()),
            None => Err(Error::Internal(format!("nonzero vector in empty degree {n}"))),
            Some(g) => g
                .project(z)
                .ok_or_else(|| Error::Internal(format!("vector in degree {n} is not a cycle"))),
        }
    }

    pub fn is_zero_to(&self, top: i32) -> bool {
        (self.min_degree..=top).all(|n| self.dim(n) == 0)
    }
}

/// `H_n(f)` for every degree where both homologies are stored.
pub fn induced_map(f: &ChainMap, hs: &HomologyData, ht: &HomologyData) -> Result<BTreeMap<i32, Matrix>> {
    let lo = hs.min_degree().min(ht.min_degree());
    let hi = hs.top().max(ht.top());
    let mut out = BTreeMap::new();
    for n in lo..=hi {
        let (ds, dt) = (hs.dim(n), ht.dim(n));
        let mut cols = Vec::with_capacity(ds);
        for t in 0..ds {
            let image = f.component(n).mul_vec(&hs.representative(n, t));
            cols.push(ht.class_of(n, &image)?);
        }
        out.insert(n, Matrix::from_columns(dt, cols));
    }
    Ok(out)
}

/// Whether `f` induces isomorphisms in every degree `<= top`.
pub fn is_quasi_iso(f: &ChainMap, source: &Complex, target: &Complex, top: i32) -> Result<bool> {
    let hs = homology(source);
    let ht = homology(target);
    let maps = induced_map(f, &hs, &ht)?;
    Ok(maps
        .range(..=top)
        .all(|(_, m)| m.rows() == m.cols() && crate::linalg::rank(m) == m.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_and_disk_homology() {
        let h = homology(&Complex::sphere(2));
        assert_eq!(h.dims(), vec![0, 0, 1]);
        assert!(homology(&Complex::disk(3)).is_zero_to(3));
        assert!(homology(&Complex::zero()).is_zero_to(0));
    }

    #[test]
    fn quotient_from_disk_induces_zero() {
        let d = Complex::disk(1);
        let s = Complex::sphere(1);
        let f = ChainMap::new(&d, &s, vec![Matrix::zeros(0, 1), Matrix::identity(1)]).unwrap();
        let maps = induced_map(&f, &homology(&d), &homology(&s)).unwrap();
        assert_eq!(maps[&1].shape(), (1, 0));
        assert_eq!(maps[&0].shape(), (0, 0));
    }

    #[test]
    fn identity_induces_identity() {
        let c = Complex::new(0, vec![2, 3, 1], vec![
            Matrix::from_ints(&[&[1, 0, 1], &[0, 0, 0]]),
            Matrix::from_ints(&[&[1], &[0], &[-1]]),
        ])
        .unwrap();
        let h = homology(&c);
        assert_eq!(h.dims(), vec![1, 1, 0]);
        let maps = induced_map(&ChainMap::identity(&c), &h, &h).unwrap();
        assert!(maps.values().all(Matrix::is_identity));
    }
}
