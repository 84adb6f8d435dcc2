//! Semifree replacement by stagewise cell attachment.

use crate::complex::{homology, induced_map, ChainMap};
use crate::dg::{homology_algebra, morphism_from_free, DgModule, GenLayout, HomologyAlgebra, SemifreeModule};
use crate::dg::CellKind;
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, rank, solve, Subspace, Vector};

use super::cover::{cover, cycle_of, StageLog};

/// `q: F -> M` with `F` semifree, `H_n(q)` bijective for `n < valid_to` and
/// onto for `n = valid_to`, `q_n` onto for `1 <= n <= valid_to`.
#[derive(Clone, Debug)]
pub struct SemifreeReplacement {
    pub free: SemifreeModule,
    /// `q(1 ⊗ g)` for every generator.
    pub values: Vec<Vector>,
    pub valid_to: i32,
    /// Set when the input's own validity bound forced `valid_to` below the
    /// requested window.
    pub reduced: bool,
    pub log: Vec<StageLog>,
    /// `F` in degrees `<= valid_to + 1`.
    pub module: DgModule,
    pub layout: GenLayout,
    pub quasi_iso: ChainMap,
}

impl SemifreeReplacement {
    pub fn generator_count(&self) -> usize {
        self.free.len()
    }
}

pub fn semifree_replace(m: &DgModule, window: i32) -> Result<SemifreeReplacement> {
    let ha = homology_algebra(m.algebra())?;
    semifree_replace_with(m, window, &ha)
}

pub fn semifree_replace_with(m: &DgModule, window: i32, ha: &HomologyAlgebra) -> Result<SemifreeReplacement> {
    if window < 0 {
        return Err(Error::Window(format!("window {window} is negative")));
    }
    let n_top = m.exact_to().map_or(window, |e| window.min(e));
    if n_top < 0 {
        return Err(Error::Window("input module has no certified degrees".into()));
    }
    let mut c = cover(m, ha, n_top, n_top, false)?;
    let hm = homology(m.complex());
    let a = m.algebra().clone();
    for n in 0..n_top {
        let (fm, layout) = c.free.to_module(Some(n + 1));
        let q = morphism_from_free(&c.free, &layout, fm.complex(), m, &c.values)?;
        let hf = homology(fm.complex());
        let hq = induced_map(&q, &hf, &hm)?;
        let Some(hq_n) = hq.get(&n) else { continue };
        let ker = kernel_basis(hq_n);
        if ker.cols() == 0 {
            continue;
        }
        let mut killed: Vec<Vector> = Subspace::image(fm.d(n + 1)).basis().to_vec();
        let mut stage = StageLog { label: format!("kill degree {n}"), cells: Vec::new() };
        for coords in ker.columns() {
            let z = cycle_of(&hf, n, coords);
            if Subspace::span(fm.dim(n), &killed).contains(&z) {
                continue;
            }
            let qz = q.component(n).mul_vec(&z);
            let lift = solve(m.d(n + 1), &qz)
                .ok_or_else(|| Error::Internal(format!("kernel class in degree {n} does not bound in the target")))?;
            c.free.attach(n + 1, layout.split(n, &z))?;
            c.values.push(lift);
            stage.cells.push((n + 1, CellKind::Sphere));
            for i in 0..a.dim(0) {
                if let Some(act) = fm.action(0, i, n) {
                    killed.push(act.mul_vec(&z));
                }
            }
        }
        c.log.push(stage);
    }
    let (module, layout) = c.free.to_module(Some(n_top + 1));
    let quasi_iso = morphism_from_free(&c.free, &layout, module.complex(), m, &c.values)?;
    let out = SemifreeReplacement {
        free: c.free,
        values: c.values,
        valid_to: n_top,
        reduced: n_top < window,
        log: c.log,
        module,
        layout,
        quasi_iso,
    };
    certify(&out, m)?;
    Ok(out)
}

/// Re-check the replacement invariants against the target.
pub fn certify(r: &SemifreeReplacement, m: &DgModule) -> Result<()> {
    r.quasi_iso.check(r.module.complex(), m.complex())?;
    DgModule::check_linear(&r.quasi_iso, &r.module, m)?;
    let hf = homology(r.module.complex());
    let hm = homology(m.complex());
    let maps = induced_map(&r.quasi_iso, &hf, &hm)?;
    for n in 0..=r.valid_to {
        let target = hm.dim(n);
        let mat = maps.get(&n).cloned().unwrap_or_else(|| crate::linalg::Matrix::zeros(target, hf.dim(n)));
        let rk = rank(&mat);
        if rk != target || (n < r.valid_to && rk != hf.dim(n)) {
            return Err(Error::Internal(format!("replacement fails to match homology in degree {n}")));
        }
        if n >= 1 && n <= m.top() && rank(r.quasi_iso.component(n)) != m.dim(n) {
            return Err(Error::Internal(format!("replacement is not onto in degree {n}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::dg::examples;
    use crate::dg::DgAlgebra;

    #[test]
    fn zero_module() {
        let a = examples::dual_numbers();
        let r = semifree_replace(&DgModule::zero(&a), 4).unwrap();
        assert_eq!(r.generator_count(), 0);
    }

    #[test]
    fn residue_field_over_dual_numbers_is_periodic() {
        let a = examples::dual_numbers();
        let k = examples::residue_module(&a);
        let r = semifree_replace(&k, 5).unwrap();
        // one generator per degree 0..=5, each killing the previous class
        assert_eq!(r.free.degrees(), vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn over_the_ground_field() {
        let k = DgAlgebra::ground();
        let c = Complex::sphere(1).direct_sum(&Complex::disk(2)).direct_sum(&Complex::sphere(0));
        let m = DgModule::from_fn(k.clone(), c.clone(), |_, _, q| crate::linalg::Matrix::identity(c.dim(q))).unwrap();
        let r = semifree_replace(&m, 4).unwrap();
        assert_eq!(homology(r.module.complex()).dims()[..3], homology(&c).dims()[..]);
    }

    #[test]
    fn free_input_needs_no_killing() {
        let a = examples::koszul_dual_numbers();
        let m = DgModule::free_rank_one(&a);
        let r = semifree_replace(&m, 3).unwrap();
        assert!(r.log.iter().filter(|s| s.label.starts_with("kill")).all(|s| s.cells.is_empty()));
    }
}
