//! Seeded property suites. Each suite draws `cases` independent instances,
//! case `i` from its own generator, and records every failing case with a
//! reason, so a failure reproduces from `(suite, seed, i)` alone.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::{homology, induced_map, long_exact_sequence, mapping_fiber, path0, suspension, ChainMap, Complex};
use crate::dg::semifree::SphereBasis;
use crate::dg::tensor::{check_kunneth, check_prop_tri, koszul_symmetry};
use crate::dg::{homology_algebra, homology_module, tensor_over_algebra, CellKind, DgModule, SemifreeModule};
use crate::error::Result;
use crate::flatness::harness::random_strongly_flat;
use crate::flatness::{equivalence_harness, strongly_flat, AlgebraHomology, HarnessConfig};
use crate::gen::{self, AlgebraShape, Rng64};
use crate::homotopy::{based_path, is_homotopy_fiber_sequence, is_model_square, mapping_fiber_square, pasting_check, postnikov_tower, Square};
use crate::linalg::Matrix;
use crate::resolution::graded_tor;
use crate::resolution::{homology_tensor_map, one_sided_check};
use crate::spectral::{edge_homomorphism, tor_spectral_sequence};
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub cases: usize,
    /// `"case i: reason"` for every failing case.
    pub failures: Vec<String>,
    /// SHA-256 of the evidence recorded by all cases, in order.
    pub evidence_digest: String,
}

/// Evidence recorded by the cases of one run; only its digest is kept.
pub struct Evidence(Sha256);

impl Evidence {
    pub fn record(&mut self, x: &impl Serialize) {
        let text = serde_json::to_string(x).expect("evidence serializes");
        self.0.update(text.as_bytes());
        self.0.update(b"\n");
    }
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Generator for case `i` of a run with seed `seed`.
pub fn case_rng(seed: u64, i: usize) -> Rng64 {
    gen::rng(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64))
}

/// Runs `case` on `cases` instances. `Ok(None)` is a pass, `Ok(Some(why))` a
/// failed property and `Err` an unexpected error, which also fails.
pub fn run(suite: &str, seed: u64, cases: usize, mut case: impl FnMut(&mut Rng64, &mut Evidence) -> Result<Option<String>>) -> SuiteReport {
    let mut evidence = Evidence(Sha256::new());
    let failures = (0..cases)
        .filter_map(|i| match case(&mut case_rng(seed, i), &mut evidence) {
            Ok(None) => None,
            Ok(Some(why)) => Some(format!("case {i}: {why}")),
            Err(e) => Some(format!("case {i}: error: {e}")),
        })
        .collect();
    let evidence_digest = hex::encode(evidence.0.finalize());
    SuiteReport { suite: suite.to_string(), seed, cases, failures, evidence_digest }
}

fn fail_unless(ok: bool, why: impl FnOnce() -> String) -> Option<String> {
    (!ok).then(why)
}

fn random_complex_upto(rng: &mut Rng64, tops: std::ops::RangeInclusive<i32>, max_dim: usize) -> Complex {
    let top = rng.random_range(tops);
    gen::random_complex(rng, top, max_dim)
}

fn small_algebra(rng: &mut Rng64) -> std::sync::Arc<crate::dg::DgAlgebra> {
    gen::random_algebra(rng, AlgebraShape { max_dim: 3, max_top: 2 })
}

/// `d² = 0` and the algebra and module axioms on everything constructed
/// from random inputs.
pub fn axioms(seed: u64, cases: usize) -> SuiteReport {
    run("axioms", seed, cases, |rng, ev| {
        let a = small_algebra(rng);
        a.validate()?;
        let ha = homology_algebra(&a)?;
        ha.algebra.validate()?;
        let m = gen::random_module(rng, &a, 2);
        let n = gen::random_module(rng, &a, 2);
        for x in [&m, &n] {
            x.validate()?;
            x.suspension().validate()?;
            x.loop_module().validate()?;
            homology_module(x, &ha)?.module.validate()?;
        }
        tensor_over_algebra(&m, &n, Some(4))?.module.validate()?;
        gen::random_semifree(rng, &a, 3, 2).to_module(Some(4)).0.validate()?;
        let c = gen::random_complex(rng, 3, 3);
        let d = gen::random_complex(rng, 3, 3);
        let f = gen::random_chain_map(rng, &c, &d);
        mapping_fiber(&f, &c, &d)?.fiber.check_d_squared()?;
        path0(&d).0.complex.check_d_squared()?;
        suspension(&c).check_d_squared()?;
        let grid = gen::random_double_complex(rng, 2);
        grid.validate()?;
        grid.total_complex().check_d_squared()?;
        ev.record(&(m.complex().dims(), n.complex().dims(), grid.dims()));
        Ok(None)
    })
}

/// `Path_0 D` and the module path objects are acyclic, and their projections
/// are fibrations.
pub fn path_objects(seed: u64, cases: usize) -> SuiteReport {
    run("path objects", seed, cases, |rng, ev| {
        let top = rng.random_range(0..=3);
        let d = gen::random_complex(rng, top, 3);
        let (p, proj) = path0(&d);
        proj.check(&p.complex, &d)?;
        if !homology(&p.complex).is_zero_to(p.complex.top()) {
            return Ok(Some(format!("Path_0 of {:?} has homology", d.dims())));
        }
        if !proj.is_fibration(&p.complex, &d) {
            return Ok(Some("Path_0 D -> D is not a fibration".into()));
        }
        let a = small_algebra(rng);
        let m = gen::random_module(rng, &a, 2);
        let (bp, _) = based_path(&m)?;
        if !homology(bp.complex()).is_zero_to(bp.top()) {
            return Ok(Some("based path module has homology".into()));
        }
        let po = crate::homotopy::two_sided_path_object(&m)?;
        ev.record(&(p.complex.dims(), po.module.complex().dims()));
        Ok(fail_unless(po.diag_quasi_iso && po.ends_fibration, || {
            format!("two-sided path object: diag quasi-iso {}, ends fibration {}", po.diag_quasi_iso, po.ends_fibration)
        }))
    })
}

/// The long exact sequence of a random mapping fiber is exact at every node,
/// and homology is functorial on composable pairs.
pub fn long_exact_sequences(seed: u64, cases: usize) -> SuiteReport {
    run("long exact sequences", seed, cases, |rng, ev| {
        let top = rng.random_range(0..=3);
        let b = gen::random_complex(rng, top, 3);
        let d = random_complex_upto(rng, 0..=3, 3);
        let e = random_complex_upto(rng, 0..=3, 2);
        let f = gen::random_chain_map(rng, &b, &d);
        let g = gen::random_chain_map(rng, &d, &e);
        let les = long_exact_sequence(&mapping_fiber(&f, &b, &d)?)?;
        ev.record(&les.nodes.iter().map(|(_, d)| *d).collect::<Vec<_>>());
        if les.nodes.is_empty() {
            return Ok(Some("empty sequence".into()));
        }
        if let Err(err) = les.check_exact() {
            return Ok(Some(err.to_string()));
        }
        let (hb, hd, he) = (homology(&b), homology(&d), homology(&e));
        let gf = g.compose(&f, &b, &d, &e);
        let lhs = induced_map(&gf, &hb, &he)?;
        let hf = induced_map(&f, &hb, &hd)?;
        let hg = induced_map(&g, &hd, &he)?;
        for (n, m) in &lhs {
            let (Some(x), Some(y)) = (hg.get(n), hf.get(n)) else { continue };
            if &x.mul(y) != m {
                return Ok(Some(format!("H_{n}(g f) != H_{n}(g) H_{n}(f)")));
            }
        }
        Ok(None)
    })
}

/// `(M ⊗ A) ⊗_A N ≅ M ⊗ N` for random complexes `M` and modules `N`.
pub fn prop_tri(seed: u64, cases: usize) -> SuiteReport {
    run("(M ⊗ A) ⊗_A N", seed, cases, |rng, ev| {
        let a = small_algebra(rng);
        let m = random_complex_upto(rng, 0..=2, 2);
        let n = gen::random_module(rng, &a, 2);
        let cert = check_prop_tri(&m, &n, Some(4))?;
        ev.record(&cert);
        Ok(fail_unless(cert.bijective, || format!("{cert:?}")))
    })
}

/// `S ⊗ H(N) ≅ H(S ⊗ N)` for sphere sums `S`.
pub fn kunneth(seed: u64, cases: usize) -> SuiteReport {
    run("Künneth for sphere sums", seed, cases, |rng, ev| {
        let top = rng.random_range(0..=2);
        let dims: Vec<usize> = (0..=top).map(|_| rng.random_range(0..=2)).collect();
        let zeros = (1..dims.len()).map(|k| Matrix::zeros(dims[k - 1], dims[k])).collect();
        let s = Complex::new(0, dims, zeros)?;
        let n = random_complex_upto(rng, 0..=3, 3);
        let cert = check_kunneth(&s, &n, None)?;
        ev.record(&cert);
        Ok(fail_unless(cert.bijective, || format!("{cert:?}")))
    })
}

/// `H(P) ⊗_{H(A)} H(N) ≅ H(P ⊗_A N)` for `P` built from spheres and disks,
/// so that `H(P)` is free.
pub fn free_homology_tensor(seed: u64, cases: usize) -> SuiteReport {
    run("H(P) ⊗ H(N) for free H(P)", seed, cases, |rng, ev| {
        let a = small_algebra(rng);
        let ha = homology_algebra(&a)?;
        let mut basis = SphereBasis::default();
        for _ in 0..rng.random_range(1..=3) {
            let kind = if rng.random_bool(0.7) { CellKind::Sphere } else { CellKind::Disk };
            let lo = if kind == CellKind::Disk { 1 } else { 0 };
            basis.push(rng.random_range(lo..=2), kind);
        }
        let p = SemifreeModule::from_basis(a.clone(), &basis)?;
        let n = gen::random_module(rng, &a, 2);
        let (cert, _) = homology_tensor_map(&p, &n, 3, &ha)?;
        ev.record(&cert);
        Ok(fail_unless(cert.bijective, || format!("{:?}: {cert:?}", basis.cells)))
    })
}

/// `M ⊗_A N ≅ N ⊗_A M` through the Koszul braiding.
pub fn koszul(seed: u64, cases: usize) -> SuiteReport {
    run("Koszul symmetry", seed, cases, |rng, ev| {
        let a = small_algebra(rng);
        let m = gen::random_module(rng, &a, 2);
        let n = gen::random_module(rng, &a, 2);
        let cert = koszul_symmetry(&m, &n, Some(4))?;
        ev.record(&cert);
        Ok(fail_unless(cert.bijective, || format!("{cert:?}")))
    })
}

/// The four properties of the Postnikov tower on random modules.
pub fn postnikov(seed: u64, cases: usize) -> SuiteReport {
    run("Postnikov tower", seed, cases, |rng, ev| {
        let a = small_algebra(rng);
        let m = gen::random_module(rng, &a, 3);
        let tower = postnikov_tower(&m, Some(4))?;
        ev.record(&tower.report);
        Ok(fail_unless(tower.report.holds(), || format!("{:?}", tower.report)))
    })
}

fn random_strict_square(rng: &mut Rng64, a: &std::sync::Arc<crate::dg::DgAlgebra>) -> Result<Square> {
    let b = gen::random_module(rng, a, 2);
    let c = gen::random_module(rng, a, 2);
    let d = gen::random_module(rng, a, 2);
    let f = gen::random_module_map(rng, &b, &d);
    let g = gen::random_module_map(rng, &c, &d);
    Square::strict(&f, &b, &g, &c, &d)
}

/// Pasting strict pullback squares: if the right square is a model square,
/// the left one is exactly when the composite is.
pub fn pasting(seed: u64, cases: usize) -> SuiteReport {
    run("pasting law", seed, cases, |rng, ev| {
        let a = small_algebra(rng);
        let right = random_strict_square(rng, &a)?;
        let v = gen::random_module(rng, &a, 2);
        let h = gen::random_module_map(rng, &v, &right.c);
        let left = Square::strict(&right.left, &right.a, &h, &v, &right.c)?;
        let verdict = pasting_check(&left, &right)?;
        ev.record(&verdict);
        Ok(fail_unless(verdict.law_holds, || format!("{verdict:?}")))
    })
}

/// Both legs of the homotopy pullback give the same verdict, and every
/// mapping fiber square is a homotopy fiber sequence.
pub fn leg_independence(seed: u64, cases: usize) -> SuiteReport {
    run("leg independence", seed, cases, |rng, ev| {
        let a = small_algebra(rng);
        let s = random_strict_square(rng, &a)?;
        let v = is_model_square(&s)?;
        ev.record(&v.evidence);
        if !v.evidence.leg_independent {
            return Ok(Some(format!("legs disagree: {:?}", v.evidence)));
        }
        let fib = is_homotopy_fiber_sequence(&mapping_fiber_square(&s.right, &s.b, &s.d)?)?;
        Ok(fail_unless(fib.is_fiber_sequence, || format!("mapping fiber square rejected: {:?}", fib.square.evidence)))
    })
}

/// Replacing the corner `A` by `A ⊕ Path_0 A` through the projection keeps
/// the model-square verdict.
pub fn quasi_iso_invariance(seed: u64, cases: usize) -> SuiteReport {
    run("quasi-isomorphism invariance", seed, cases, |rng, ev| {
        let a = small_algebra(rng);
        let s = random_strict_square(rng, &a)?;
        let (path, _) = based_path(&s.a)?;
        let bigger = s.a.direct_sum(&path);
        let e = ChainMap::from_fn(bigger.complex(), s.a.complex(), |n| {
            Matrix::hstack(&[&Matrix::identity(s.a.dim(n)), &Matrix::zeros(s.a.dim(n), path.dim(n))])
        });
        DgModule::check_linear(&e, &bigger, &s.a)?;
        let before = is_model_square(&s)?.is_model_square;
        let after = is_model_square(&s.precompose(&bigger, &e)?)?.is_model_square;
        ev.record(&(before, after));
        Ok(fail_unless(before == after, || format!("verdict {before} became {after}")))
    })
}

/// `H(QM ⊗ QN)`, `H(QM ⊗ N)` and `H(M ⊗ QN)` agree through the comparison maps.
pub fn one_sided(seed: u64, cases: usize, window: i32) -> SuiteReport {
    run("one-sided resolutions", seed, cases, |rng, ev| {
        let a = gen::random_algebra(rng, AlgebraShape::default());
        let m = gen::random_module(rng, &a, 3);
        let n = gen::random_module(rng, &a, 3);
        let r = one_sided_check(&m, &n, window)?;
        ev.record(&r);
        Ok(fail_unless(r.holds(), || format!("{r:?}")))
    })
}

/// `Tor(HM, HN) ≅ Tor(HN, HM)` over `H(A)`, dimensionwise.
pub fn tor_symmetry(seed: u64, cases: usize) -> SuiteReport {
    run("Tor symmetry", seed, cases, |rng, ev| {
        let a = small_algebra(rng);
        let ha = homology_algebra(&a)?;
        let m = homology_module(&gen::random_module(rng, &a, 2), &ha)?.module;
        let n = homology_module(&gen::random_module(rng, &a, 2), &ha)?.module;
        let tor = graded_tor(&m, &n, 3, 4)?.dims();
        ev.record(&tor);
        Ok(fail_unless(tor == graded_tor(&n, &m, 3, 4)?.dims(), || "dimensions differ".into()))
    })
}

/// Every certificate of the Tor spectral sequence: `E²` against the graded
/// Tor, `E^∞` against the filtration of the derived tensor, the vertical
/// collapse and the page recursion.
pub fn tor_ss(seed: u64, cases: usize, window: i32, p_max: usize) -> SuiteReport {
    run("Tor spectral sequence", seed, cases, |rng, ev| {
        let a = gen::random_algebra(rng, AlgebraShape::default());
        let m = gen::random_module(rng, &a, 2);
        let n = gen::random_module(rng, &a, 2);
        let ss = tor_spectral_sequence(&m, &n, window, p_max)?;
        ss.horizontal.check_pages()?;
        ev.record(&ss.report());
        Ok(fail_unless(ss.holds(), || format!("{:?}", ss.report())))
    })
}

/// For strongly flat `M` the edge maps `(HM ⊗ HN)_q -> H_q(M ⊗^L N)` are
/// bijective for every `q <= window - 1`.
pub fn collapse(seed: u64, cases: usize, window: i32, p_max: usize) -> SuiteReport {
    run("collapse for strongly flat modules", seed, cases, |rng, ev| {
        let a = gen::random_algebra(rng, AlgebraShape::default());
        let (label, m) = random_strongly_flat(rng, &a, 2)?;
        if !strongly_flat(&AlgebraHomology::new(&a)?, &m)?.strongly_flat {
            return Ok(Some(format!("{label} is not certified strongly flat")));
        }
        let n = gen::random_module(rng, &a, 2);
        let ss = tor_spectral_sequence(&m, &n, window, p_max)?;
        let edge = edge_homomorphism(&ss)?;
        ev.record(&edge);
        Ok(fail_unless(edge.certified_to >= window - 1 && edge.all_bijective(), || {
            format!("{label}: certified to {}, bijective {:?}", edge.certified_to, edge.bijective)
        }))
    })
}

/// The three flatness predicates agree on random modules, half of them
/// strongly flat by construction.
pub fn flatness(seed: u64, cases: usize, config: HarnessConfig) -> SuiteReport {
    run("flatness equivalence", seed, cases, |rng, ev| {
        let a = gen::random_algebra(rng, AlgebraShape::default());
        let ah = AlgebraHomology::new(&a)?;
        let m = if rng.random_bool(0.5) { random_strongly_flat(rng, &a, 2)?.1 } else { gen::random_module(rng, &a, 2) };
        let config = HarnessConfig { seed: rng.random(), ..config };
        let v = equivalence_harness(&ah, &m, &config)?;
        ev.record(&v);
        Ok(fail_unless(v.agree, || format!("{:?}", v.counterexample)))
    })
}
