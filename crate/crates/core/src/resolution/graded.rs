//! Free resolutions of graded modules over graded algebras, and graded Tor.

use std::sync::Arc;


use crate::complex::{ChainMap, Complex};
use crate::dg::{free_tensor, morphism_from_free, DgAlgebra, DgModule, FreeElement, GenLayout, SemifreeModule};
use crate::dg::semifree::free_map_tensor;
use crate::error::{Error, Result};
use crate::linalg::{rank, Matrix, SubQuotient, Subspace, Vector};

/// `⋯ -> P_1 -> P_0 -> M` in internal degrees `<= window`.
#[derive(Clone, Debug)]
pub struct GradedFreeResolution {
    pub algebra: Arc<DgAlgebra>,
    pub module: DgModule,
    pub window: i32,
    pub free: Vec<SemifreeModule>,
    pub modules: Vec<DgModule>,
    pub layouts: Vec<GenLayout>,
    /// `maps[0]` is the augmentation, `maps[p]: P_p -> P_{p-1}`.
    pub maps: Vec<ChainMap>,
    /// `∂(1 ⊗ g)` in `P_{p-1}` for `p >= 1`; empty at `p = 0`.
    pub images: Vec<Vec<FreeElement>>,
}

fn is_graded_module(m: &DgModule) -> bool {
    m.algebra().is_graded() && m.complex().differentials().iter().all(Matrix::is_zero)
}

/// Greedy homogeneous generators of the submodule `sub` of `ambient`.
fn generators(ambient: &DgModule, sub: &[Subspace], window: i32) -> (SemifreeModule, Vec<Vector>) {
    let a = ambient.algebra().clone();
    let mut free = SemifreeModule::new(a.clone());
    let mut values: Vec<Vector> = Vec::new();
    for n in 0..=window.min(ambient.top()) {
        let span_of = |free: &SemifreeModule, values: &[Vector]| {
            let mut vs = Vec::new();
            for (g, v) in free.generators().iter().zip(values) {
                let k = n - g.degree;
                if k < 0 || k > a.top() {
                    continue;
                }
                for i in 0..a.dim(k) {
                    if let Some(m) = ambient.action(k, i, g.degree) {
                        vs.push(m.mul_vec(v));
                    }
                }
            }
            Subspace::span(ambient.dim(n), &vs)
        };
        let mut image = span_of(&free, &values);
        for v in sub[n as usize].basis() {
            if image.contains(v) {
                continue;
            }
            free.attach(n, Vec::new()).expect("generator");
            values.push(v.clone());
            image = span_of(&free, &values);
        }
    }
    (free, values)
}

/// Free resolution with `len + 1` terms `P_0..=P_len`.
pub fn graded_free_resolution(m: &DgModule, len: usize, window: i32) -> Result<GradedFreeResolution> {
    if !is_graded_module(m) {
        return Err(Error::Input("graded resolution needs zero differentials".into()));
    }
    let a = m.algebra().clone();
    let mut res = GradedFreeResolution {
        algebra: a.clone(),
        module: m.clone(),
        window,
        free: Vec::new(),
        modules: Vec::new(),
        layouts: Vec::new(),
        maps: Vec::new(),
        images: Vec::new(),
    };
    let mut ambient = m.clone();
    let mut sub: Vec<Subspace> = (0..=window).map(|n| Subspace::full(m.dim(n))).collect();
    for p in 0..=len {
        let (free, values) = generators(&ambient, &sub, window);
        let (pm, layout) = free.to_module(Some(window));
        let map = morphism_from_free(&free, &layout, pm.complex(), &ambient, &values)?;
        let images = if p == 0 {
            Vec::new()
        } else {
            let prev = &res.layouts[p - 1];
            free.generators().iter().zip(&values).map(|(g, v)| prev.split(g.degree, v)).collect()
        };
        sub = (0..=window).map(|n| Subspace::kernel(map.component(n))).collect();
        res.free.push(free);
        res.modules.push(pm.clone());
        res.layouts.push(layout);
        res.maps.push(map);
        res.images.push(images);
        ambient = pm;
    }
    res.check_exact()?;
    Ok(res)
}

impl GradedFreeResolution {
    pub fn len(&self) -> usize {
        self.free.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.free.iter().all(SemifreeModule::is_empty)
    }

    /// Generator degrees of `P_p`.
    pub fn ranks(&self, p: usize) -> Vec<i32> {
        self.free[p].degrees()
    }

    /// Exactness at every node in every internal degree of the window.
    pub fn check_exact(&self) -> Result<()> {
        for q in 0..=self.window {
            let eps = self.maps[0].component(q);
            if rank(eps) != self.module.dim(q) {
                return Err(Error::Internal(format!("augmentation is not onto in degree {q}")));
            }
            for p in 0..self.len() {
                let out = self.maps[p].component(q);
                let inc = self.maps[p + 1].component(q);
                if !out.mul(inc).is_zero() {
                    return Err(Error::Internal(format!("composite at node {p} is nonzero in degree {q}")));
                }
                if rank(inc) + rank(out) != self.modules[p].dim(q) {
                    return Err(Error::Internal(format!("resolution is not exact at node {p} in degree {q}")));
                }
            }
        }
        Ok(())
    }
}

/// `Tor_p(M, N)_q` with explicit subquotients of `P_p ⊗ N`.
#[derive(Clone, Debug)]
pub struct TorTable {
    pub window: i32,
    /// `groups[p][q]`.
    pub groups: Vec<Vec<SubQuotient>>,
    pub complexes: Vec<Complex>,
}

impl TorTable {
    pub fn dim(&self, p: usize, q: i32) -> usize {
        if q < 0 || q > self.window {
            return 0;
        }
        self.groups.get(p).map_or(0, |row| row[q as usize].dim())
    }

    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.groups.iter().map(|row| row.iter().map(SubQuotient::dim).collect()).collect()
    }

    pub fn p_max(&self) -> usize {
        self.groups.len().saturating_sub(1)
    }
}

/// `Tor^A_p(M, N)_q` for `p <= p_max` and `q <= window`.
pub fn graded_tor(m: &DgModule, n: &DgModule, p_max: usize, window: i32) -> Result<TorTable> {
    if !is_graded_module(n) {
        return Err(Error::Input("graded Tor needs zero differentials".into()));
    }
    let res = graded_free_resolution(m, p_max + 1, window)?;
    tor_from_resolution(&res, n)
}

pub fn tor_from_resolution(res: &GradedFreeResolution, n: &DgModule) -> Result<TorTable> {
    let window = res.window;
    let tensors: Vec<_> = res.free.iter().map(|f| free_tensor(f, n, Some(window))).collect();
    let mut boundaries: Vec<ChainMap> = Vec::new();
    for p in 1..tensors.len() {
        boundaries.push(free_map_tensor(
            &tensors[p],
            &res.free[p].degrees(),
            &tensors[p - 1],
            &res.free[p - 1].degrees(),
            &res.images[p],
            n,
        ));
    }
    let mut groups = Vec::new();
    for p in 0..res.len() {
        let row = (0..=window)
            .map(|q| {
                let dim = tensors[p].layout.dim(q);
                let cycles = if p == 0 { Subspace::full(dim) } else { Subspace::kernel(boundaries[p - 1].component(q)) };
                let bounds = Subspace::image(boundaries[p].component(q));
                SubQuotient::new(cycles, &bounds)
            })
            .collect();
        groups.push(row);
    }
    let complexes = tensors.into_iter().map(|t| t.module.complex().clone()).collect();
    Ok(TorTable { window, groups, complexes })
}

/// Symmetry `Tor(M, N) ≅ Tor(N, M)` dimensionwise.
pub fn tor_symmetric(m: &DgModule, n: &DgModule, p_max: usize, window: i32) -> Result<bool> {
    Ok(graded_tor(m, n, p_max, window)?.dims() == graded_tor(n, m, p_max, window)?.dims())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::examples;

    #[test]
    fn residue_field_over_dual_numbers() {
        let a = examples::dual_numbers();
        let k = examples::residue_module(&a);
        let res = graded_free_resolution(&k, 4, 0).unwrap();
        for p in 0..=4 {
            assert_eq!(res.ranks(p), vec![0]);
        }
        let tor = graded_tor(&k, &k, 4, 0).unwrap();
        assert_eq!(tor.dims(), vec![vec![1]; 5]);
    }

    #[test]
    fn free_module_has_length_zero() {
        let a = examples::dual_numbers();
        let m = DgModule::free_rank_one(&a);
        let res = graded_free_resolution(&m, 2, 0).unwrap();
        assert_eq!(res.ranks(0), vec![0]);
        assert!(res.ranks(1).is_empty());
        let k = examples::residue_module(&a);
        let tor = graded_tor(&m, &k, 2, 0).unwrap();
        assert_eq!(tor.dims(), vec![vec![1], vec![0], vec![0]]);
        assert!(tor_symmetric(&m, &k, 2, 0).unwrap());
    }
}
