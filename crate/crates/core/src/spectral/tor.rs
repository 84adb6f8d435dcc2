//! The Tor spectral sequence of a pair of DG modules.
//!
//! The grid is `C_{pq} = (P_p ⊗_A QN)_q` for the resolution `P_• -> QM` with
//! free homology. Its horizontal sequence has `E²_{pq} = Tor^{H(A)}_p(HM, HN)_q`
//! and abuts to `H(QM ⊗_A QN)`.

use serde::{Deserialize, Serialize};

use super::double::DoubleComplex;
use super::pages::{spectral_sequence, ConvergenceReport, Direction, SpectralSequence};
use crate::complex::{homology, induced_map, is_quasi_iso, ChainMap, HomologyData};
use crate::dg::semifree::{free_map_tensor, push_through};
use crate::dg::{free_tensor, homology_algebra, homology_module, tensor_over_algebra, DgModule, FreeTensor, HomologyAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{rank, solve, vector, Matrix, Subspace, Vector};
use crate::resolution::{dg_resolution_for_ss, graded_tor, semifree_replace_with, DgResolution, SemifreeReplacement, TorTable};

/// One cell where the grid's `E²` and the graded Tor disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E2Mismatch {
    pub p: i32,
    pub q: i32,
    pub grid: usize,
    pub tor: usize,
}

#[derive(Clone, Debug)]
pub struct TorSpectralSequence {
    pub window: i32,
    /// Number of resolution columns actually built, minus one.
    pub p_max: usize,
    /// Total degrees `<= certified_to` carry certified statements.
    pub certified_to: i32,
    pub grid: DoubleComplex,
    pub horizontal: SpectralSequence,
    pub vertical: SpectralSequence,
    /// `Tor^{H(A)}(HM, HN)` from a graded free resolution of `HM`.
    pub tor: TorTable,
    pub e2_mismatches: Vec<E2Mismatch>,
    pub convergence: ConvergenceReport,
    /// `H(QM ⊗_A QN)` in certified degrees.
    pub abutment: Vec<usize>,
    /// `Tot -> QM ⊗_A QN` induced by the augmentation is a quasi-isomorphism.
    pub augmentation_quasi_iso: bool,
    /// Vertical `E²` vanishes off the bottom row and the bottom row is the abutment.
    pub vertical_collapse: bool,
    resolution: DgResolution,
    qn: SemifreeReplacement,
    target: FreeTensor,
    target_homology: HomologyData,
    augmentation: ChainMap,
    hm: crate::dg::HomologyModule,
    hn: crate::dg::HomologyModule,
}

/// Serializable summary of a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorSsReport {
    pub window: i32,
    pub p_max: usize,
    pub certified_to: i32,
    /// `E²` dimensions `[p][q]` over the certified region.
    pub e2: Vec<Vec<usize>>,
    pub e_infinity: Vec<Vec<usize>>,
    pub tor: Vec<Vec<usize>>,
    pub e2_matches: bool,
    pub e2_mismatches: Vec<E2Mismatch>,
    pub abutment: Vec<usize>,
    pub convergence: ConvergenceReport,
    pub augmentation_quasi_iso: bool,
    pub vertical_collapse: bool,
    /// First page from which every differential in the certified region vanishes.
    pub collapse_page: usize,
}

impl TorSpectralSequence {
    pub fn e2_matches(&self) -> bool {
        self.e2_mismatches.is_empty()
    }

    /// Whether every certificate of the run holds.
    pub fn holds(&self) -> bool {
        self.e2_matches() && self.convergence.holds() && self.augmentation_quasi_iso && self.vertical_collapse
    }

    /// Cells `(p, q)` of the certified region, `p <= p_max - 1`.
    fn region(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        let pm = self.p_max as i32 - 1;
        (0..=self.certified_to).flat_map(move |n| (0..=n.min(pm)).map(move |p| (p, n - p)))
    }

    fn page_grid(&self, r: usize) -> Vec<Vec<usize>> {
        let page = self.horizontal.page(r).unwrap_or_else(|| self.horizontal.infinity());
        let pm = (self.p_max as i32 - 1).min(self.certified_to);
        (0..=pm).map(|p| (0..=self.certified_to - p).map(|q| page.dim(p, q)).collect()).collect()
    }

    /// First page `r >= 2` with `d^s = 0` for all `s >= r` on the certified region.
    pub fn collapse_page(&self) -> usize {
        let zero_from = |r: usize| {
            self.horizontal.pages.iter().skip(r - 1).all(|page| {
                self.region().all(|(p, q)| page.differentials.get(&(p, q)).is_none_or(Matrix::is_zero))
            })
        };
        (2..=self.horizontal.pages.len().max(2)).find(|&r| zero_from(r)).unwrap_or(self.horizontal.pages.len() + 1)
    }

    /// `E²_{pq} = 0` for all `p > 0` in the certified region.
    pub fn concentrated_in_column_zero(&self) -> bool {
        self.region().filter(|&(p, _)| p > 0).all(|(p, q)| self.tor.dim(p as usize, q) == 0)
    }

    pub fn report(&self) -> TorSsReport {
        let pm = (self.p_max as i32 - 1).min(self.certified_to);
        let tor = (0..=pm)
            .map(|p| (0..=self.certified_to - p).map(|q| self.tor.dim(p as usize, q)).collect())
            .collect();
        TorSsReport {
            window: self.window,
            p_max: self.p_max,
            certified_to: self.certified_to,
            e2: self.page_grid(2),
            e_infinity: self.page_grid(usize::MAX),
            tor,
            e2_matches: self.e2_matches(),
            e2_mismatches: self.e2_mismatches.clone(),
            abutment: self.abutment.clone(),
            convergence: self.convergence.clone(),
            augmentation_quasi_iso: self.augmentation_quasi_iso,
            vertical_collapse: self.vertical_collapse,
            collapse_page: self.collapse_page(),
        }
    }
}

pub fn tor_spectral_sequence(m: &DgModule, n: &DgModule, window: i32, p_max: usize) -> Result<TorSpectralSequence> {
    if m.algebra() != n.algebra() {
        return Err(Error::Input("modules over different algebras".into()));
    }
    let ha = homology_algebra(m.algebra())?;
    tor_spectral_sequence_with(m, n, window, p_max, &ha)
}

pub fn tor_spectral_sequence_with(
    m: &DgModule,
    n: &DgModule,
    window: i32,
    p_max: usize,
    ha: &HomologyAlgebra,
) -> Result<TorSpectralSequence> {
    let res = dg_resolution_for_ss(m, window, p_max, ha)?;
    let qn = semifree_replace_with(n, window, ha)?;
    let big_n = res.replacement.valid_to;
    let p_eff = res.len();
    let certified_to = big_n.min(p_eff as i32).min(qn.valid_to) - 1;
    let q_mod = &qn.module;

    let columns: Vec<FreeTensor> =
        (0..=p_eff).map(|p| free_tensor(&res.free[p], q_mod, Some(res.bounds[p]))).collect();
    let degrees: Vec<Vec<i32>> = res.free.iter().map(|f| f.degrees()).collect();
    let dh: Vec<ChainMap> = (1..=p_eff)
        .map(|p| free_map_tensor(&columns[p], &degrees[p], &columns[p - 1], &degrees[p - 1], &res.images[p], q_mod))
        .collect();
    let dims: Vec<Vec<usize>> =
        columns.iter().enumerate().map(|(p, c)| (0..=res.bounds[p]).map(|q| c.module.dim(q)).collect()).collect();
    let grid = DoubleComplex::from_fn(
        dims,
        certified_to,
        |p, q| dh[p - 1].component(q as i32).clone(),
        |p, q| columns[p].module.d(q as i32).clone(),
    )?;
    let horizontal = spectral_sequence(&grid, Direction::Horizontal, None)?;
    horizontal.check_pages()?;
    let convergence = horizontal.converge_check()?;
    let vertical = spectral_sequence(&grid, Direction::Vertical, Some(2))?;
    vertical.check_pages()?;

    // independent E²
    let hm = homology_module(m, ha)?;
    let hn = homology_module(n, ha)?;
    let tor = graded_tor(&hm.module, &hn.module, p_eff, window)?;
    let e2 = horizontal.page(2).ok_or_else(|| Error::Internal("no second page".into()))?;
    let mut e2_mismatches = Vec::new();
    for total in 0..=certified_to {
        for p in 0..=total.min(p_eff as i32 - 1) {
            let q = total - p;
            let (g, t) = (e2.dim(p, q), tor.dim(p as usize, q));
            if g != t {
                e2_mismatches.push(E2Mismatch { p, q, grid: g, tor: t });
            }
        }
    }

    // abutment through the augmentation P_0 ⊗ QN -> QM ⊗ QN
    let target = free_tensor(&res.replacement.free, q_mod, Some(big_n));
    let target_homology = homology(target.module.complex());
    let x0_degrees = res.replacement.free.degrees();
    let aug0 = free_map_tensor(&columns[0], &degrees[0], &target, &x0_degrees, &res.images[0], q_mod);
    let tot = &horizontal.total;
    let augmentation = ChainMap::from_fn(tot, target.module.complex(), |l| {
        let c = aug0.component(l);
        let cols = tot.dim(l);
        let rows = target.module.dim(l);
        if c.rows() != rows {
            return Matrix::zeros(rows, cols);
        }
        c.embed(rows, cols, 0, 0)
    });
    augmentation.check(tot, target.module.complex())?;
    let augmentation_quasi_iso = is_quasi_iso(&augmentation, tot, target.module.complex(), certified_to)?;
    let abutment = (0..=certified_to).map(|l| target_homology.dim(l)).collect::<Vec<_>>();

    // vertical: resolution index is the second coordinate after transposing
    let v2 = vertical.page(2).ok_or_else(|| Error::Internal("no second page".into()))?;
    let mut vertical_collapse = true;
    for total in 0..=certified_to {
        for b in 0..=total.min(p_eff as i32 - 1) {
            let a = total - b;
            let want = if b == 0 { abutment[a as usize] } else { 0 };
            vertical_collapse &= v2.dim(a, b) == want;
        }
    }

    Ok(TorSpectralSequence {
        window,
        p_max: p_eff,
        certified_to,
        grid,
        horizontal,
        vertical,
        tor,
        e2_mismatches,
        convergence,
        abutment,
        augmentation_quasi_iso,
        vertical_collapse,
        resolution: res,
        qn,
        target,
        target_homology,
        augmentation,
        hm,
        hn,
    })
}

/// `(HM ⊗_{H(A)} HN)_q -> H_q(QM ⊗_A QN)` for each certified `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeMaps {
    pub certified_to: i32,
    pub matrices: Vec<Matrix>,
    pub ranks: Vec<usize>,
    pub bijective: Vec<bool>,
    /// The image agrees with the classes coming from the `p = 0` column of `Tot`.
    pub image_matches_column_zero: bool,
}

impl EdgeMaps {
    pub fn all_bijective(&self) -> bool {
        self.bijective.iter().all(|&b| b)
    }
}

/// Preimage of a class of the target under a homology isomorphism, as a cycle.
fn lift_class(map: Option<&Matrix>, source: &HomologyData, deg: i32, class: &Vector) -> Result<Vector> {
    let map = map.ok_or_else(|| Error::Internal(format!("no homology comparison in degree {deg}")))?;
    let coords = solve(map, class).ok_or_else(|| Error::Internal(format!("class in degree {deg} does not lift")))?;
    let group = source.group(deg).ok_or_else(|| Error::Internal(format!("no homology in degree {deg}")))?;
    Ok(group.lift(&coords))
}

/// `[m] ⊗ [n] ↦ [m̃ ⊗ ñ]` with `m̃, ñ` cycles of the replacements.
pub fn edge_homomorphism(ss: &TorSpectralSequence) -> Result<EdgeMaps> {
    let top = ss.certified_to;
    let qm = &ss.resolution.replacement;
    let hqm = homology(qm.module.complex());
    let hqn = homology(ss.qn.module.complex());
    let to_m = induced_map(&qm.quasi_iso, &hqm, &ss.hm.data)?;
    let to_n = induced_map(&ss.qn.quasi_iso, &hqn, &ss.hn.data)?;
    let t = tensor_over_algebra(&ss.hm.module, &ss.hn.module, Some(top.max(0)))?;
    let degs = qm.free.degrees();
    let hx = &ss.target_homology;
    let mut matrices = Vec::new();
    let mut ranks = Vec::new();
    let mut bijective = Vec::new();
    let mut image_matches_column_zero = true;
    let tot = &ss.horizontal.total;
    let th = ss.horizontal.total_homology.as_ref().expect("complete tower");
    for l in 0..=top {
        let cols = (0..t.module.dim(l))
            .map(|col| {
                let mut acc = Vec::new();
                for (idx, c) in t.section(l, col) {
                    let (r, i, s, j) = t.layout.decode(l, idx);
                    let x = lift_class(to_m.get(&r), &hqm, r, &vector::unit(i))?;
                    let y = lift_class(to_n.get(&s), &hqn, s, &vector::unit(j))?;
                    let x = qm.layout.split(r, &x);
                    let e = push_through(&x, &degs, r, &ss.qn.module, s, &y, &ss.target.layout);
                    acc = vector::axpy(&acc, &c, &e);
                }
                hx.class_of(l, &acc)
            })
            .collect::<Result<Vec<_>>>()?;
        let mat = Matrix::from_columns(hx.dim(l), cols);
        let rk = rank(&mat);
        // F_0 H_l(Tot) pushed forward along the augmentation
        let column0 = ss.grid.filtration_dim(l, 0);
        let cycles = Subspace::kernel(tot.d(l));
        let units: Vec<Vector> = (0..column0).map(vector::unit).collect();
        let f0 = cycles.intersection(&Subspace::span(tot.dim(l), &units));
        let mut classes = Vec::new();
        for z in f0.basis() {
            th.class_of(l, z)?;
            classes.push(hx.class_of(l, &ss.augmentation.component(l).mul_vec(z))?);
        }
        image_matches_column_zero &= Subspace::span(hx.dim(l), &classes) == Subspace::image(&mat);
        bijective.push(mat.rows() == mat.cols() && rk == mat.rows());
        ranks.push(rk);
        matrices.push(mat);
    }
    Ok(EdgeMaps { certified_to: top, matrices, ranks, bijective, image_matches_column_zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::dg::{examples, DgAlgebra};

    #[test]
    fn residue_field_over_dual_numbers() {
        let a = examples::dual_numbers();
        let k = examples::residue_module(&a);
        let ss = tor_spectral_sequence(&k, &k, 4, 4).unwrap();
        assert!(ss.holds(), "{:?}", ss.report());
        let rep = ss.report();
        for p in 0..=ss.certified_to.min(ss.p_max as i32 - 1) {
            assert_eq!(rep.e2[p as usize][0], 1);
        }
        assert_eq!(rep.abutment, vec![1; (ss.certified_to + 1) as usize]);
        let edge = edge_homomorphism(&ss).unwrap();
        assert!(edge.image_matches_column_zero);
        assert!(edge.bijective[0]);
        assert!(!edge.bijective[1], "k ⊗ k has nothing in degree 1");
    }

    #[test]
    fn ground_field_concentrates_in_column_zero() {
        let k = DgAlgebra::ground();
        let c1 = Complex::sphere(1).direct_sum(&Complex::disk(2));
        let c2 = Complex::sphere(0).direct_sum(&Complex::sphere(1));
        let wrap = |c: Complex| DgModule::from_fn(k.clone(), c.clone(), |_, _, q| Matrix::identity(c.dim(q))).unwrap();
        let ss = tor_spectral_sequence(&wrap(c1), &wrap(c2), 4, 3).unwrap();
        assert!(ss.holds(), "{:?}", ss.report());
        assert!(ss.concentrated_in_column_zero());
        let edge = edge_homomorphism(&ss).unwrap();
        assert!(edge.all_bijective() && edge.image_matches_column_zero);
    }

    #[test]
    fn free_module_collapses() {
        let a = examples::koszul_dual_numbers();
        let free = DgModule::free_rank_one(&a);
        let k = examples::residue_module(&a);
        let ss = tor_spectral_sequence(&free, &k, 3, 3).unwrap();
        assert!(ss.holds(), "{:?}", ss.report());
        assert!(ss.concentrated_in_column_zero());
        assert_eq!(ss.collapse_page(), 2);
        assert!(edge_homomorphism(&ss).unwrap().all_bijective());
    }
}
