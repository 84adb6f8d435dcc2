//! Strong modules and the comparison maps out of tensor products over `H_0(A)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{homology, induced_map, HomologyData};
use crate::dg::semifree::push_through;
use crate::dg::{
    free_tensor, homology_algebra, homology_module, tensor_over_algebra, DgAlgebra, DgModule, HomologyAlgebra,
    TensorProduct,
};
use crate::error::{Error, Result};
use crate::linalg::{rank, solve, vector, Matrix, Vector};
use crate::resolution::semifree_replace_with;

/// `H(A)` and `H_0(A)` computed once per algebra.
#[derive(Clone, Debug)]
pub struct AlgebraHomology {
    pub algebra: Arc<DgAlgebra>,
    pub ha: HomologyAlgebra,
    /// `H_0(A)` as an algebra concentrated in degree 0.
    pub h0: HomologyAlgebra,
}

impl AlgebraHomology {
    pub fn new(a: &Arc<DgAlgebra>) -> Result<Self> {
        let ha = homology_algebra(a)?;
        let h0 = HomologyAlgebra {
            algebra: Arc::new(crate::dg::truncate_algebra(&ha.algebra, 0)),
            data: ha.data.clone(),
        };
        Ok(AlgebraHomology { algebra: a.clone(), ha, h0 })
    }

    /// A graded `H(A)`-module seen over `H_0(A)` in degrees `<= top`.
    pub fn restrict(&self, m: &DgModule, top: i32) -> Result<DgModule> {
        let top = top.min(m.top());
        let dims: Vec<usize> = (0..=top).map(|q| m.dim(q)).collect();
        let dims = if dims.is_empty() { vec![0] } else { dims };
        let complex = crate::complex::Complex::new(0, dims, vec![])?;
        let r = DgModule::from_fn(self.h0.algebra.clone(), complex.clone(), |_, i, q| {
            m.action(0, i, q).cloned().unwrap_or_else(|| Matrix::zeros(complex.dim(q), complex.dim(q)))
        })?;
        r.validate()?;
        Ok(r)
    }

    /// `H_0(M)` over `H_0(A)`, with its homology data.
    pub fn h0_module(&self, m: &DgModule) -> Result<(DgModule, HomologyData)> {
        let hm = homology_module(m, &self.ha)?;
        Ok((self.restrict(&hm.module, 0)?, hm.data))
    }
}

/// Per-degree bijectivity of a comparison map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub window: i32,
    pub source_dims: Vec<usize>,
    pub target_dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub iso: Vec<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<Matrix>,
}

impl ComparisonReport {
    fn from_matrices(window: i32, matrices: Vec<Matrix>) -> Self {
        let ranks: Vec<usize> = matrices.iter().map(rank).collect();
        let iso = matrices.iter().zip(&ranks).map(|(m, &r)| m.rows() == m.cols() && r == m.rows()).collect();
        ComparisonReport {
            window,
            source_dims: matrices.iter().map(Matrix::cols).collect(),
            target_dims: matrices.iter().map(Matrix::rows).collect(),
            ranks,
            iso,
            matrices,
        }
    }

    pub fn holds(&self) -> bool {
        self.iso.iter().all(|&b| b)
    }

    /// Drop the matrices, keeping dimensions and ranks.
    pub fn summary(mut self) -> Self {
        self.matrices.clear();
        self
    }
}

/// `(H(A) ⊗_{H_0 A} H_0 M)_k -> H_k(M)`, `[a] ⊗ [m] -> [a m]`, for `k <= window`.
pub type StrongnessReport = ComparisonReport;

/// Degrees where the homology of `m` is known, capped by `window`; a
/// genuinely bounded module is known everywhere and `reach` is used instead.
fn module_window(m: &DgModule, window: Option<i32>, reach: i32) -> i32 {
    let c = match m.exact_to() {
        None => reach.max(m.top()),
        Some(_) => m.complex().certified_to().max(0),
    };
    window.map_or(c, |w| w.min(c))
}

pub fn strongness(ah: &AlgebraHomology, m: &DgModule, window: Option<i32>) -> Result<StrongnessReport> {
    if m.algebra() != &ah.algebra {
        return Err(Error::Input("module over a different algebra".into()));
    }
    let top = module_window(m, window, ah.ha.algebra.top());
    let ha_mod = ah.restrict(&DgModule::free_rank_one(&ah.ha.algebra), ah.ha.algebra.top())?;
    let (h0m, hm) = ah.h0_module(m)?;
    let t = tensor_over_algebra(&ha_mod, &h0m, Some(top))?;
    let mut matrices = Vec::new();
    for k in 0..=top {
        let cols = (0..t.module.dim(k))
            .map(|col| {
                let mut acc = Vec::new();
                for (idx, c) in t.section(k, col) {
                    let (r, i, _, j) = t.layout.decode(k, idx);
                    let x = ah.ha.data.representative(r, i);
                    let y = hm.representative(0, j);
                    acc = vector::axpy(&acc, &c, &m.act(r, &x, 0, &y));
                }
                hm.class_of(k, &acc)
            })
            .collect::<Result<Vec<_>>>()?;
        matrices.push(Matrix::from_columns(hm.dim(k), cols));
    }
    Ok(ComparisonReport::from_matrices(top, matrices))
}

pub(crate) fn lift_class(map: Option<&Matrix>, source: &HomologyData, deg: i32, class: &Vector) -> Result<Vector> {
    let map = map.ok_or_else(|| Error::Internal(format!("no homology comparison in degree {deg}")))?;
    let coords = solve(map, class).ok_or_else(|| Error::Internal(format!("class in degree {deg} does not lift")))?;
    let group = source.group(deg).ok_or_else(|| Error::Internal(format!("no homology in degree {deg}")))?;
    Ok(group.lift(&coords))
}

/// `H(N) ⊗_{H_0 A} H_0(M) -> H(N ⊗^L M)`, `[n] ⊗ [m] -> [ñ ⊗ m]` with `ñ` a
/// cycle of the semifree replacement of `N`, in degrees `< window`.
pub fn homology_tensor_h0(ah: &AlgebraHomology, n: &DgModule, m: &DgModule, window: i32) -> Result<ComparisonReport> {
    let qn = semifree_replace_with(n, window, &ah.ha)?;
    let bound = qn.valid_to;
    let fast = free_tensor(&qn.free, m, Some(bound));
    let hf = homology(fast.module.complex());
    let hqn = homology(qn.module.complex());
    let hn = homology_module(n, &ah.ha)?;
    let to_n = induced_map(&qn.quasi_iso, &hqn, &hn.data)?;
    let (h0m, hm) = ah.h0_module(m)?;
    let top = (bound - 1).min(hf.certified_to()).min(module_window(n, None, i32::MAX)).max(-1);
    let t: TensorProduct = tensor_over_algebra(&ah.restrict(&hn.module, top.max(0))?, &h0m, Some(top.max(0)))?;
    let degs = qn.free.degrees();
    let mut matrices = Vec::new();
    for l in 0..=top {
        let cols = (0..t.module.dim(l))
            .map(|col| {
                let mut acc = Vec::new();
                for (idx, c) in t.section(l, col) {
                    let (r, i, _, j) = t.layout.decode(l, idx);
                    let x = lift_class(to_n.get(&r), &hqn, r, &vector::unit(i))?;
                    let x = qn.layout.split(r, &x);
                    let e = push_through(&x, &degs, r, m, 0, &hm.representative(0, j), &fast.layout);
                    acc = vector::axpy(&acc, &c, &e);
                }
                hf.class_of(l, &acc)
            })
            .collect::<Result<Vec<_>>>()?;
        matrices.push(Matrix::from_columns(hf.dim(l), cols));
    }
    Ok(ComparisonReport::from_matrices(top, matrices))
}

/// `H_0(N ⊗_A M) -> N ⊗_{H_0 A} H_0(M)`, `[n ⊗ m] -> n ⊗ [m]`, for `N`
/// concentrated in degree 0.
pub fn h0_lemma(ah: &AlgebraHomology, n: &DgModule, m: &DgModule) -> Result<ComparisonReport> {
    if n.top() > 0 {
        return Err(Error::Input("the degree-0 comparison needs N concentrated in degree 0".into()));
    }
    let nm = tensor_over_algebra(n, m, Some(1))?;
    let h = homology(nm.module.complex());
    let (h0m, hm) = ah.h0_module(m)?;
    let n0 = DgModule::from_fn(ah.h0.algebra.clone(), n.complex().clone(), |_, i, q| {
        // the action of A_0 on N factors through H_0(A)
        let rep = ah.ha.data.representative(0, i);
        n.action_element(0, &rep, q)
    })?;
    n0.validate()?;
    let t = tensor_over_algebra(&n0, &h0m, Some(0))?;
    let cols = (0..h.dim(0))
        .map(|c| {
            let z = nm.quotients[0].lift(&h.representative(0, c));
            let mut acc = Vec::new();
            for (idx, v) in z {
                let (_, i, _, j) = nm.layout.decode(0, idx);
                let class = hm.class_of(0, &vector::unit(j))?;
                acc = vector::axpy(&acc, &v, &t.class(0, &vector::unit(i), 0, &class));
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport::from_matrices(0, vec![Matrix::from_columns(t.module.dim(0), cols)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::dg::examples;

    #[test]
    fn algebra_is_strong() {
        for a in [examples::dual_numbers(), examples::exterior(1), examples::koszul_dual_numbers()] {
            let ah = AlgebraHomology::new(&a).unwrap();
            let r = strongness(&ah, &DgModule::free_rank_one(&a), None).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn residue_over_exterior_is_not_strong() {
        let a = examples::exterior(1);
        let ah = AlgebraHomology::new(&a).unwrap();
        let k = examples::residue_module(&a);
        let r = strongness(&ah, &k, Some(2)).unwrap();
        assert_eq!(r.source_dims[1], 1);
        assert_eq!(r.target_dims[1], 0);
        assert!(!r.holds());
    }

    #[test]
    fn ground_field_strongness_sees_higher_homology() {
        let k = DgAlgebra::ground();
        let ah = AlgebraHomology::new(&k).unwrap();
        let s0 = crate::gen::over_ground(&Complex::sphere(0));
        let s1 = crate::gen::over_ground(&Complex::sphere(1));
        assert!(strongness(&ah, &s0, None).unwrap().holds());
        assert!(!strongness(&ah, &s1, None).unwrap().holds());
    }

    #[test]
    fn comparison_for_free_and_residue() {
        let a = examples::dual_numbers();
        let ah = AlgebraHomology::new(&a).unwrap();
        let k = examples::residue_module(&a);
        let free = DgModule::free_rank_one(&a);
        assert!(homology_tensor_h0(&ah, &k, &free, 3).unwrap().holds());
        let r = homology_tensor_h0(&ah, &k, &k, 3).unwrap();
        assert!(!r.holds(), "{r:?}");
        assert!(h0_lemma(&ah, &k, &k).unwrap().holds());
        assert!(h0_lemma(&ah, &k, &free).unwrap().holds());
    }
}
