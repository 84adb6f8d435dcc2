//! Derived tensor products through semifree replacements.

use serde::{Deserialize, Serialize};

use crate::complex::{homology, is_quasi_iso, HomologyData};
use crate::dg::semifree::{free_tensor_with_map, push_through};
use crate::dg::{
    free_tensor, homology_algebra, homology_module, tensor_over_algebra, DgModule, FreeTensor, HomologyAlgebra,
    IsoCertificate, SemifreeModule,
};
use crate::error::{Error, Result};
use crate::linalg::{rank, vector, Matrix};

use super::replace::{semifree_replace_with, SemifreeReplacement};

/// `Q(M) ⊗_A N`, presented as `V ⊗ N`.
#[derive(Clone, Debug)]
pub struct DerivedTensor {
    pub replacement: SemifreeReplacement,
    pub tensor: FreeTensor,
    pub homology: HomologyData,
}

impl DerivedTensor {
    /// Highest degree whose homology is certified.
    pub fn certified_to(&self) -> i32 {
        self.homology.certified_to()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.homology.certified_dims()
    }
}

pub fn derived_tensor(m: &DgModule, n: &DgModule, window: i32) -> Result<DerivedTensor> {
    let ha = homology_algebra(m.algebra())?;
    derived_tensor_with(m, n, window, &ha)
}

pub fn derived_tensor_with(m: &DgModule, n: &DgModule, window: i32, ha: &HomologyAlgebra) -> Result<DerivedTensor> {
    same_algebra(m, n)?;
    let replacement = semifree_replace_with(m, window, ha)?;
    let tensor = bounded_tensor(&replacement.free, n, replacement.valid_to);
    let homology = homology(tensor.module.complex());
    Ok(DerivedTensor { replacement, tensor, homology })
}

/// `Q(M) ⊗_A N` for a replacement computed elsewhere, e.g. read from a cache.
pub fn derived_tensor_from(replacement: SemifreeReplacement, n: &DgModule) -> Result<DerivedTensor> {
    if replacement.free.algebra() != n.algebra() {
        return Err(Error::Input("modules over different algebras".into()));
    }
    let tensor = bounded_tensor(&replacement.free, n, replacement.valid_to);
    let homology = homology(tensor.module.complex());
    Ok(DerivedTensor { replacement, tensor, homology })
}

pub(crate) fn same_algebra(m: &DgModule, n: &DgModule) -> Result<()> {
    if m.algebra() != n.algebra() {
        return Err(Error::Input("modules over different algebras".into()));
    }
    Ok(())
}

/// `V ⊗ N` in degrees `<= bound`, marked valid only below `bound`.
pub(crate) fn bounded_tensor(f: &SemifreeModule, n: &DgModule, bound: i32) -> FreeTensor {
    let mut t = free_tensor(f, n, Some(bound));
    let e = crate::complex::min_bound(t.module.exact_to(), Some(bound));
    t.module = t.module.with_exact_to(e);
    t
}

/// Homology of `QM ⊗ QN`, `QM ⊗ N` and `M ⊗ QN`, and whether the comparison
/// maps `id ⊗ q_N` and `q_M ⊗ id` are quasi-isomorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneSidedReport {
    pub certified_to: i32,
    pub two_sided: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub left_quasi_iso: bool,
    pub right_quasi_iso: bool,
}

impl OneSidedReport {
    pub fn holds(&self) -> bool {
        self.left_quasi_iso && self.right_quasi_iso && self.two_sided == self.left && self.left == self.right
    }
}

pub fn one_sided_check(m: &DgModule, n: &DgModule, window: i32) -> Result<OneSidedReport> {
    same_algebra(m, n)?;
    let ha = homology_algebra(m.algebra())?;
    let qm = semifree_replace_with(m, window, &ha)?;
    let qn = semifree_replace_with(n, window, &ha)?;
    let w = qm.valid_to.min(qn.valid_to);
    let top = w - 1;
    let dims = |t: &FreeTensor| {
        let h = homology(t.module.complex());
        (0..=top).map(|l| h.dim(l)).collect::<Vec<_>>()
    };
    // QM ⊗ QN -> QM ⊗ N
    let two = bounded_tensor(&qm.free, &qn.module, w);
    let left = bounded_tensor(&qm.free, n, w);
    let id_q = free_tensor_with_map(&two, &left, &qm.free.degrees(), &qn.quasi_iso);
    id_q.check(two.module.complex(), left.module.complex())?;
    let left_quasi_iso = is_quasi_iso(&id_q, two.module.complex(), left.module.complex(), top)?;
    // QN ⊗ QM -> QN ⊗ M, the mirror of QM ⊗ QN -> M ⊗ QN
    let two_mirror = bounded_tensor(&qn.free, &qm.module, w);
    let right = bounded_tensor(&qn.free, m, w);
    let q_id = free_tensor_with_map(&two_mirror, &right, &qn.free.degrees(), &qm.quasi_iso);
    q_id.check(two_mirror.module.complex(), right.module.complex())?;
    let right_quasi_iso = is_quasi_iso(&q_id, two_mirror.module.complex(), right.module.complex(), top)?;
    let two_sided = dims(&two);
    if dims(&two_mirror) != two_sided {
        return Err(Error::Internal("two-sided tensor is not symmetric".into()));
    }
    Ok(OneSidedReport { certified_to: top, two_sided, left: dims(&left), right: dims(&right), left_quasi_iso, right_quasi_iso })
}

/// `H(P) ⊗_{H(A)} H(N) -> H(P ⊗_A N)`, `[x] ⊗ [y] -> [x ⊗ y]`, for semifree
/// `P`; bijective when `H(P)` is free over `H(A)`.
pub fn homology_tensor_map(p: &SemifreeModule, n: &DgModule, window: i32, ha: &HomologyAlgebra) -> Result<(IsoCertificate, Vec<Matrix>)> {
    let (pm, pl) = p.to_module(Some(window + 1));
    let hp = homology_module(&pm, ha)?;
    let hn = homology_module(n, ha)?;
    let t = tensor_over_algebra(&hp.module, &hn.module, Some(window))?;
    let fast = free_tensor(p, n, Some(window + 1));
    let hf = homology(fast.module.complex());
    let top = window.min(hf.certified_to()).min(t.layout.top());
    let degs = p.degrees();
    let mut maps = Vec::new();
    let mut dims_source = Vec::new();
    let mut dims_target = Vec::new();
    let mut bijective = true;
    for l in 0..=top {
        let cols = (0..t.module.dim(l))
            .map(|col| {
                let mut acc = Vec::new();
                for (idx, c) in t.section(l, col) {
                    let (r, i, s, j) = t.layout.decode(l, idx);
                    let x = pl.split(r, &hp.data.representative(r, i));
                    let y = hn.data.representative(s, j);
                    let e = push_through(&x, &degs, r, n, s, &y, &fast.layout);
                    acc = vector::axpy(&acc, &c, &e);
                }
                hf.class_of(l, &acc)
            })
            .collect::<Result<Vec<_>>>()?;
        let mat = Matrix::from_columns(hf.dim(l), cols);
        dims_source.push(mat.cols());
        dims_target.push(mat.rows());
        bijective &= mat.rows() == mat.cols() && rank(&mat) == mat.rows();
        maps.push(mat);
    }
    Ok((IsoCertificate { dims_source, dims_target, bijective }, maps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::dg::{examples, DgAlgebra, SphereBasis};

    #[test]
    fn residue_field_over_dual_numbers() {
        let a = examples::dual_numbers();
        let k = examples::residue_module(&a);
        let d = derived_tensor(&k, &k, 5).unwrap();
        assert_eq!(d.dims(), vec![1; 5]);
    }

    #[test]
    fn ground_field_is_kunneth() {
        let k = DgAlgebra::ground();
        let c1 = Complex::sphere(1).direct_sum(&Complex::disk(2));
        let c2 = Complex::sphere(0).direct_sum(&Complex::sphere(1));
        let wrap = |c: Complex| DgModule::from_fn(k.clone(), c.clone(), |_, _, q| Matrix::identity(c.dim(q))).unwrap();
        let d = derived_tensor(&wrap(c1), &wrap(c2), 4).unwrap();
        assert_eq!(d.dims(), vec![0, 1, 1, 0]);
    }

    #[test]
    fn one_sided_agreement() {
        let a = examples::koszul_dual_numbers();
        let k = examples::residue_module(&a);
        let free = DgModule::free_rank_one(&a);
        for (m, n) in [(&k, &k), (&free, &k), (&k, &free)] {
            let r = one_sided_check(m, n, 3).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn homology_of_free_tensor() {
        let a = examples::koszul_dual_numbers();
        let ha = homology_algebra(&a).unwrap();
        let p = SemifreeModule::from_basis(a.clone(), &SphereBasis::spheres(&[0, 1])).unwrap();
        let k = examples::residue_module(&a);
        let (cert, _) = homology_tensor_map(&p, &k, 3, &ha).unwrap();
        assert!(cert.bijective, "{cert:?}");
    }
}
