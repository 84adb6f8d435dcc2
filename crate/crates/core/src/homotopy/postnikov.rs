//! Postnikov towers `M -> M_{<=n} -> M_{<=n-1}`.

use serde::{Deserialize, Serialize};

use super::square::{is_homotopy_fiber_sequence, kernel_square};
use crate::complex::{homology, induced_map, ChainMap};
use crate::dg::DgModule;
use crate::error::{Error, Result};
use crate::linalg::{rank, solve_many, Matrix, Subspace};

/// Certified properties of one stage `M_{<=n}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageReport {
    pub n: i32,
    pub dims: Vec<usize>,
    pub homology: Vec<usize>,
    /// `H_k(phi_n)` is an isomorphism for `k <= n`.
    pub iso_below: bool,
    /// `H_k(M_{<=n}) = 0` for `k > n`.
    pub vanishes_above: bool,
    /// Homology of `ker p_n`; `None` at `n = 0`.
    pub fiber_homology: Option<Vec<usize>>,
    /// `ker p_n` has homology `H_n(M)` concentrated in degree `n`.
    pub fiber_is_homology: bool,
    /// `ker p_n -> M_{<=n} -> M_{<=n-1}` passes the fiber sequence check.
    pub fiber_sequence: bool,
    /// `p_n phi_n = phi_{n-1}`, both maps linear and degreewise onto.
    pub compatible: bool,
}

impl StageReport {
    pub fn holds(&self) -> bool {
        self.iso_below && self.vanishes_above && self.fiber_is_homology && self.fiber_sequence && self.compatible
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostnikovReport {
    pub window: i32,
    pub stages: Vec<StageReport>,
    /// The strict inverse limit agrees with `M` in degrees `<= window`.
    pub limit_matches: bool,
}

impl PostnikovReport {
    pub fn holds(&self) -> bool {
        self.limit_matches && self.stages.iter().all(StageReport::holds)
    }
}

#[derive(Clone, Debug)]
pub struct PostnikovTower {
    pub module: DgModule,
    pub window: i32,
    /// `stages[n] = M_{<=n}`.
    pub stages: Vec<DgModule>,
    /// `phi[n] : M -> M_{<=n}`.
    pub phi: Vec<ChainMap>,
    /// `p[n] : M_{<=n} -> M_{<=n-1}` for `n >= 1`; `p[0]` is the map to zero.
    pub p: Vec<ChainMap>,
    pub report: PostnikovReport,
}

/// Quotient of `M` by `Z_{n+1}` in degree `n+1` and everything above, so
/// that degree `n+1` becomes `Im d_{n+1}`.
fn stage(m: &DgModule, n: i32) -> (DgModule, ChainMap) {
    let sub = (0..=m.top())
        .map(|k| {
            if k <= n {
                Subspace::zero(m.dim(k))
            } else if k == n + 1 {
                Subspace::kernel(m.d(k))
            } else {
                Subspace::full(m.dim(k))
            }
        })
        .collect();
    let (q, phi) = m.quotient(sub);
    let exact = match m.exact_to() {
        Some(e) if n + 1 > e => Some(e),
        _ => None,
    };
    (q.with_exact_to(exact), phi)
}

/// `p` with `p phi_n = phi_{n-1}`.
fn descend(phi_n: &ChainMap, phi_prev: &ChainMap, m: &DgModule, sn: &DgModule, sp: &DgModule) -> Result<ChainMap> {
    let mut comps = Vec::new();
    for k in 0..=m.top() {
        let a = phi_n.padded(m.complex(), sn.complex(), k);
        let right_inverse = solve_many(&a, &Matrix::identity(sn.dim(k)))
            .ok_or_else(|| Error::Internal(format!("stage projection is not onto in degree {k}")))?;
        comps.push(phi_prev.padded(m.complex(), sp.complex(), k).mul(&right_inverse));
    }
    Ok(ChainMap::from_fn(sn.complex(), sp.complex(), |k| comps[k as usize].clone()))
}

/// Stages `M_{<=0}, ..., M_{<=N}` with `N = min(window, top)`, every stage
/// property certified.
pub fn postnikov_tower(m: &DgModule, window: Option<i32>) -> Result<PostnikovTower> {
    let top = window.map_or(m.top(), |w| w.min(m.top())).max(0);
    let hm = homology(m.complex());
    let mut stages: Vec<DgModule> = Vec::new();
    let mut phi: Vec<ChainMap> = Vec::new();
    let mut p: Vec<ChainMap> = Vec::new();
    let mut reports = Vec::new();
    for n in 0..=top {
        let (s, f) = stage(m, n);
        s.validate()?;
        DgModule::check_linear(&f, m, &s)?;
        let hs = homology(s.complex());
        let known = s.complex().certified_to();
        let maps = induced_map(&f, &hm, &hs)?;
        let iso_below = (0..=n.min(hm.certified_to()).min(known)).all(|k| {
            let x = &maps[&k];
            x.rows() == x.cols() && rank(x) == x.rows()
        });
        let vanishes_above = (n + 1..=known).all(|k| hs.dim(k) == 0);
        let mut compatible = f.is_degreewise_surjective(m.complex(), s.complex());
        let (pn, fiber_homology, fiber_is_homology, fiber_sequence) = if n == 0 {
            let zero = DgModule::zero(m.algebra());
            (ChainMap::zero(s.complex(), zero.complex()), None, true, true)
        } else {
            let prev = &stages[(n - 1) as usize];
            let pn = descend(&f, &phi[(n - 1) as usize], m, &s, prev)?;
            DgModule::check_linear(&pn, &s, prev)?;
            compatible &= pn.is_degreewise_surjective(s.complex(), prev.complex())
                && pn.compose(&f, m.complex(), s.complex(), prev.complex()) == phi[(n - 1) as usize];
            let sq = kernel_square(&pn, &s, prev)?;
            let hk = homology(sq.a.complex());
            let dims: Vec<usize> = (0..=known).map(|k| hk.dim(k)).collect();
            let expected: Vec<usize> = (0..=known).map(|k| if k == n { hm.dim(n) } else { 0 }).collect();
            let seq = is_homotopy_fiber_sequence(&sq)?.is_fiber_sequence;
            (pn, Some(dims.clone()), dims == expected, seq)
        };
        reports.push(StageReport {
            n,
            dims: s.complex().dims().to_vec(),
            homology: (0..=known).map(|k| hs.dim(k)).collect(),
            iso_below,
            vanishes_above,
            fiber_homology,
            fiber_is_homology,
            fiber_sequence,
            compatible,
        });
        stages.push(s);
        phi.push(f);
        p.push(pn);
    }
    let limit_matches = limit_matches(m, &stages, &phi, &p, top);
    let report = PostnikovReport { window: top, stages: reports, limit_matches };
    Ok(PostnikovTower { module: m.clone(), window: top, stages, phi, p, report })
}

/// In each degree `k <= top`, the compatible families `(x_n)` with
/// `p_n x_n = x_{n-1}` are exactly the images of `M_k`.
fn limit_matches(m: &DgModule, stages: &[DgModule], phi: &[ChainMap], p: &[ChainMap], top: i32) -> bool {
    (0..=top).all(|k| {
        let dims: Vec<usize> = stages.iter().map(|s| s.dim(k)).collect();
        let mut blocks = Vec::new();
        for n in 1..stages.len() {
            let pn = p[n].padded(stages[n].complex(), stages[n - 1].complex(), k);
            blocks.push((n - 1, n, pn));
            blocks.push((n - 1, n - 1, Matrix::identity(dims[n - 1]).neg()));
        }
        let rows = &dims[..dims.len() - 1];
        let system = Matrix::from_blocks(rows, &dims, blocks);
        let limit = Subspace::kernel(&system);
        let stacked: Vec<Matrix> = phi.iter().zip(stages).map(|(f, s)| f.padded(m.complex(), s.complex(), k)).collect();
        let refs: Vec<&Matrix> = stacked.iter().collect();
        let image = Subspace::image(&Matrix::vstack(&refs));
        image == limit && image.dim() == m.dim(k)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::dg::examples;
    use crate::gen;

    #[test]
    fn degree_zero_module_is_constant() {
        let m = gen::over_ground(&Complex::new(0, vec![2], vec![]).unwrap());
        let t = postnikov_tower(&m, Some(3)).unwrap();
        assert!(t.report.holds());
        assert_eq!(t.stages.len(), 1);
        assert!(t.phi[0].component(0).is_identity());
    }

    #[test]
    fn disk_stages_are_acyclic() {
        let m = gen::over_ground(&Complex::disk(1));
        let t = postnikov_tower(&m, None).unwrap();
        assert!(t.report.holds());
        // M_{<=0} is D^1 itself with degree 1 replaced by Im d_1
        assert_eq!(t.stages[0].complex().dims(), &[1, 1]);
        for s in &t.report.stages {
            assert!(s.homology.iter().all(|&h| h == 0));
        }
    }

    #[test]
    fn two_step_fiber_is_degree_one_homology() {
        // S^0 + S^1 + D^2: H_0 = H_1 = k
        let c = Complex::sphere(0).direct_sum(&Complex::sphere(1)).direct_sum(&Complex::disk(2));
        let m = gen::over_ground(&c);
        let t = postnikov_tower(&m, None).unwrap();
        assert!(t.report.holds(), "{:?}", t.report);
        assert_eq!(t.report.stages[1].fiber_homology.as_deref().unwrap()[..2], [0, 1]);
    }

    #[test]
    fn random_modules_over_dual_numbers() {
        let a = examples::dual_numbers();
        let mut rng = gen::rng(5);
        for _ in 0..10 {
            let m = gen::random_module(&mut rng, &a, 3);
            let t = postnikov_tower(&m, Some(4)).unwrap();
            assert!(t.report.holds(), "{:?}", t.report);
        }
    }
}
