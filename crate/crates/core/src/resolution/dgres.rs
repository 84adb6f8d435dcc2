//! Resolution `⋯ -> P_1 -> P_0 -> X` of a semifree module by semifree modules
//! with free homology, built from `X_{p+1} = ker(P_p -> X_p)`.

use crate::complex::{homology, induced_map, ChainMap, HomologyData};
use crate::dg::{morphism_from_free, DgModule, FreeElement, GenLayout, HomologyAlgebra, SemifreeModule};
use crate::error::{Error, Result};
use crate::linalg::{rank, Subspace};

use super::cover::{cover, StageLog};
use super::replace::{semifree_replace_with, SemifreeReplacement};

#[derive(Clone, Debug)]
pub struct DgResolution {
    /// `X_0 = Q(M)`.
    pub replacement: SemifreeReplacement,
    /// `X_0` in degrees `<= bounds[0]`.
    pub x0: DgModule,
    pub free: Vec<SemifreeModule>,
    pub modules: Vec<DgModule>,
    pub layouts: Vec<GenLayout>,
    /// `P_p` is exact against its neighbours in degrees `<= bounds[p]`.
    pub bounds: Vec<i32>,
    /// `π̃_p: P_p -> P_{p-1}` for `p >= 1`, and `π_0: P_0 -> X_0`.
    pub maps: Vec<ChainMap>,
    /// `π̃_p(1 ⊗ g)` as elements of `P_{p-1}` (of `X_0` when `p = 0`).
    pub images: Vec<Vec<FreeElement>>,
    pub logs: Vec<Vec<StageLog>>,
}

/// Resolution with `p_max + 1` terms; `P_p` is built through degree `window - p`.
pub fn dg_resolution_for_ss(m: &DgModule, window: i32, p_max: usize, ha: &HomologyAlgebra) -> Result<DgResolution> {
    if p_max as i32 > window {
        return Err(Error::Window(format!("resolution length {p_max} exceeds the window {window}")));
    }
    let replacement = semifree_replace_with(m, window, ha)?;
    let n = replacement.valid_to;
    let (x0, x0_layout) = replacement.free.to_module(Some(n));
    let x0 = x0.with_exact_to(Some(n));
    let p_max = p_max.min(n as usize);
    let mut res = DgResolution {
        replacement,
        x0: x0.clone(),
        free: Vec::new(),
        modules: Vec::new(),
        layouts: Vec::new(),
        bounds: Vec::new(),
        maps: Vec::new(),
        images: Vec::new(),
        logs: Vec::new(),
    };
    let mut x = x0;
    let mut x_layout = x0_layout;
    let mut inclusion: Option<ChainMap> = None;
    for p in 0..=p_max {
        let t = n - p as i32;
        let c = cover(&x, ha, t, t, true)?;
        let (pm, pl) = c.free.to_module(Some(t));
        let pm = pm.with_exact_to(Some(t));
        let pi = morphism_from_free(&c.free, &pl, pm.complex(), &x, &c.values)?;
        for k in 0..=t.min(x.top()) {
            if rank(pi.component(k)) != x.dim(k) {
                return Err(Error::Internal(format!("cover of X_{p} is not onto in degree {k}")));
            }
        }
        let (tilde, images) = match &inclusion {
            None => {
                let imgs = c.free.generators().iter().zip(&c.values).map(|(g, v)| x_layout.split(g.degree, v)).collect();
                (pi.clone(), imgs)
            }
            Some(inc) => {
                let prev = &res.modules[p - 1];
                let tilde = inc.compose(&pi, pm.complex(), x.complex(), prev.complex());
                let imgs = c
                    .free
                    .generators()
                    .iter()
                    .zip(&c.values)
                    .map(|(g, v)| x_layout.split(g.degree, &inc.component(g.degree).mul_vec(v)))
                    .collect();
                (tilde, imgs)
            }
        };
        let kernels: Vec<Subspace> = (0..=pm.top()).map(|k| Subspace::kernel(pi.component(k))).collect();
        let (next, inc) = pm.submodule(&kernels)?;
        res.free.push(c.free);
        res.modules.push(pm.clone());
        res.layouts.push(pl.clone());
        res.bounds.push(t);
        res.maps.push(tilde);
        res.images.push(images);
        res.logs.push(c.log);
        x = next.with_exact_to(Some(t));
        x_layout = pl;
        inclusion = Some(inc);
    }
    Ok(res)
}

impl DgResolution {
    pub fn len(&self) -> usize {
        self.free.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.free.iter().all(SemifreeModule::is_empty)
    }

    fn target(&self, p: usize) -> &DgModule {
        if p == 0 {
            &self.x0
        } else {
            &self.modules[p - 1]
        }
    }

    /// Exactness of `⋯ -> P_1 -> P_0 -> X_0 -> 0` degreewise.
    pub fn check_exact(&self) -> Result<()> {
        for p in 0..=self.len() {
            let t = self.bounds[p];
            for k in 0..=t {
                let out = self.maps[p].component(k);
                let target_dim = self.target(p).dim(k);
                if p == 0 && rank(out) != target_dim {
                    return Err(Error::Internal(format!("augmentation is not onto in degree {k}")));
                }
                if p < self.len() && k <= self.bounds[p + 1] {
                    let inc = self.maps[p + 1].component(k);
                    if !out.mul(inc).is_zero() || rank(inc) + rank(out) != self.modules[p].dim(k) {
                        return Err(Error::Internal(format!("resolution is not exact at node {p} in degree {k}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Exactness of `⋯ -> H(P_1) -> H(P_0) -> H(X_0) -> 0` in certified degrees.
    pub fn check_homology_exact(&self) -> Result<()> {
        let hs: Vec<HomologyData> = self.modules.iter().map(|m| homology(m.complex())).collect();
        let hx = homology(self.x0.complex());
        let induced = |p: usize| -> Result<_> {
            let target = if p == 0 { &hx } else { &hs[p - 1] };
            induced_map(&self.maps[p], &hs[p], target)
        };
        let maps: Vec<_> = (0..=self.len()).map(induced).collect::<Result<_>>()?;
        for p in 0..=self.len() {
            for k in 0..self.bounds[p] {
                let out = maps[p].get(&k).map(rank).unwrap_or(0);
                if p == 0 && out != hx.dim(k) {
                    return Err(Error::Internal(format!("homology augmentation is not onto in degree {k}")));
                }
                if p < self.len() && k < self.bounds[p + 1] {
                    let inc = maps[p + 1].get(&k).map(rank).unwrap_or(0);
                    if inc + out != hs[p].dim(k) {
                        return Err(Error::Internal(format!("homology resolution is not exact at node {p} in degree {k}")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::{examples, homology_algebra};

    #[test]
    fn residue_field_resolution_is_exact() {
        let a = examples::dual_numbers();
        let ha = homology_algebra(&a).unwrap();
        let k = examples::residue_module(&a);
        let r = dg_resolution_for_ss(&k, 3, 3, &ha).unwrap();
        r.check_exact().unwrap();
        r.check_homology_exact().unwrap();
    }

    #[test]
    fn koszul_resolution_is_exact() {
        let a = examples::koszul_dual_numbers();
        let ha = homology_algebra(&a).unwrap();
        for m in [examples::residue_module(&a), DgModule::free_rank_one(&a)] {
            let r = dg_resolution_for_ss(&m, 3, 3, &ha).unwrap();
            r.check_exact().unwrap();
            r.check_homology_exact().unwrap();
        }
        let zero = DgModule::zero(&a);
        let r = dg_resolution_for_ss(&zero, 3, 2, &ha).unwrap();
        assert!(r.is_empty());
    }
}
