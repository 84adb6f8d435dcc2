//! The three flatness predicates and the harness that compares them on
//! shared test families.

use serde::{Deserialize, Serialize};

use super::classical::{h0_flat, ideal, jacobson_radical, H0Flatness};
use super::strong::{homology_tensor_h0, strongness, AlgebraHomology, StrongnessReport};
use crate::complex::ChainMap;
use crate::dg::semifree::free_tensor_with_map;
use crate::dg::{inflate, DgModule};
use crate::error::Result;
use crate::gen;
use crate::homotopy::{is_homotopy_fiber_sequence, mapping_fiber_square, Square, SquareEvidence};
use crate::linalg::{vector, Matrix, Subspace};
use crate::resolution::derived::bounded_tensor;
use crate::resolution::{semifree_replace_with, SemifreeReplacement};
use crate::spectral::{edge_homomorphism, tor_spectral_sequence_with};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StronglyFlatVerdict {
    pub strong: StrongnessReport,
    pub h0: H0Flatness,
    pub strongly_flat: bool,
}

/// Strong, with `H_0(M)` flat over `H_0(A)`. Decided exactly.
pub fn strongly_flat(ah: &AlgebraHomology, m: &DgModule) -> Result<StronglyFlatVerdict> {
    let strong = strongness(ah, m, None)?.summary();
    let (h0m, _) = ah.h0_module(m)?;
    let h0 = h0_flat(&ah.h0.algebra, &h0m, &[])?;
    let strongly_flat = strong.holds() && h0.flat;
    Ok(StronglyFlatVerdict { strong, h0, strongly_flat })
}

#[derive(Clone, Debug)]
pub struct TestModule {
    pub label: String,
    pub module: DgModule,
}

#[derive(Clone, Debug)]
pub struct TestMap {
    pub label: String,
    pub source: DgModule,
    pub target: DgModule,
    pub map: ChainMap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub window: i32,
    pub p_max: usize,
    pub seed: u64,
    pub random_modules: usize,
    pub random_maps: usize,
    /// Top degree of the random test modules.
    pub max_top: i32,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig { window: 4, p_max: 4, seed: 0, random_modules: 2, random_maps: 2, max_top: 2 }
    }
}

#[derive(Clone, Debug)]
pub struct TestFamilies {
    pub seed: u64,
    pub modules: Vec<TestModule>,
    pub maps: Vec<TestMap>,
}

fn size(m: &DgModule) -> usize {
    m.complex().dims().iter().sum()
}

/// `H_0(A)/I` seen over `A`.
fn cyclic_h0(ah: &AlgebraHomology, i: &Subspace) -> Result<DgModule> {
    let (x, _) = DgModule::free_rank_one(&ah.h0.algebra).quotient(vec![i.clone()]);
    inflate(&ah.algebra, &ah.h0, &x)
}

/// Right multiplication by a degree-0 element, an `A`-linear self map of `A`.
fn right_multiplication(a: &DgModule, i: usize) -> ChainMap {
    let alg = a.algebra();
    ChainMap::from_fn(a.complex(), a.complex(), |q| {
        let cols = (0..alg.dim(q)).map(|j| alg.mul(q, &vector::unit(j), 0, &vector::unit(i))).collect();
        Matrix::from_columns(alg.dim(q), cols)
    })
}

/// Test modules `A`, `H_0(A)`, `H_0(A)/J`, the cyclic modules `H_0(A)/(b)`
/// for basis elements `b`, and random modules; test maps `0 -> X` and
/// `A -> X` for every test module `X`, right multiplications on `A`, and
/// random maps between random modules.
pub fn test_families(ah: &AlgebraHomology, config: &HarnessConfig) -> Result<TestFamilies> {
    let a = &ah.algebra;
    let mut rng = gen::rng(config.seed);
    let free = DgModule::free_rank_one(a);
    let r = &ah.h0.algebra;
    let mut modules = vec![TestModule { label: "A".into(), module: free.clone() }];
    modules.push(TestModule { label: "H0(A)".into(), module: cyclic_h0(ah, &Subspace::zero(r.dim(0)))? });
    let radical = jacobson_radical(r)?;
    if radical.dim() > 0 {
        modules.push(TestModule { label: "H0(A)/J".into(), module: cyclic_h0(ah, &radical)? });
    }
    for i in 0..r.dim(0) {
        let id = ideal(r, &[vector::unit(i)]);
        if id.dim() > 0 && id.dim() < r.dim(0) && id != radical {
            modules.push(TestModule { label: format!("H0(A)/(b{i})"), module: cyclic_h0(ah, &id)? });
        }
    }
    let mut random = Vec::new();
    for k in 0..config.random_modules {
        let x = gen::random_module(&mut rng, a, config.max_top);
        random.push(x.clone());
        modules.push(TestModule { label: format!("random {k}"), module: x });
    }
    let zero = DgModule::zero(a);
    let mut maps = Vec::new();
    for t in &modules {
        maps.push(TestMap {
            label: format!("0 -> {}", t.label),
            source: zero.clone(),
            target: t.module.clone(),
            map: ChainMap::zero(zero.complex(), t.module.complex()),
        });
        maps.push(TestMap {
            label: format!("A -> {}", t.label),
            source: free.clone(),
            target: t.module.clone(),
            map: gen::random_module_map(&mut rng, &free, &t.module),
        });
    }
    for i in 1..a.dim(0) {
        maps.push(TestMap { label: format!("(. a{i}) on A"), source: free.clone(), target: free.clone(), map: right_multiplication(&free, i) });
    }
    if !random.is_empty() {
        for k in 0..config.random_maps {
            let s = &random[k % random.len()];
            let t = &random[(k + 1) % random.len()];
            maps.push(TestMap {
                label: format!("random map {k}"),
                source: s.clone(),
                target: t.clone(),
                map: gen::random_module_map(&mut rng, s, t),
            });
        }
    }
    Ok(TestFamilies { seed: config.seed, modules, maps })
}

/// A module that is strongly flat by construction: a free module, possibly
/// with an acyclic summand, or a path object of a free module.
pub fn random_strongly_flat(rng: &mut impl rand::Rng, a: &std::sync::Arc<crate::dg::DgAlgebra>, max_top: i32) -> Result<(String, DgModule)> {
    let r = rng.random_range(1..=2);
    let free = DgModule::free_rank_one(a).power(r);
    Ok(match rng.random_range(0..3) {
        0 => (format!("A^{r}"), free),
        1 => {
            let x = gen::random_module(rng, a, max_top);
            let (path, _) = crate::homotopy::based_path(&x)?;
            (format!("A^{r} + Path_0(X)"), free.direct_sum(&path))
        }
        _ => (format!("P(A^{r})"), crate::homotopy::two_sided_path_object(&free)?.module),
    })
}

/// Collapse of the Tor spectral sequence against one test module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseInstance {
    pub label: String,
    pub size: usize,
    pub certified_to: i32,
    /// `E²_{p,q} = 0` for `p > 0`.
    pub e2_vanishes: bool,
    pub edge_bijective: bool,
    /// `H(N) ⊗_{H_0 A} H_0(M) -> H(N ⊗^L M)` is bijective.
    pub comparison_bijective: bool,
    pub collapses: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseEvidence {
    pub instances: Vec<CollapseInstance>,
    pub flat: bool,
}

pub fn flat_by_collapse(
    ah: &AlgebraHomology,
    m: &DgModule,
    tests: &[TestModule],
    window: i32,
    p_max: usize,
) -> Result<CollapseEvidence> {
    let mut instances = Vec::new();
    for t in tests {
        let ss = tor_spectral_sequence_with(m, &t.module, window, p_max, &ah.ha)?;
        let e2_vanishes = ss.concentrated_in_column_zero();
        let edge_bijective = edge_homomorphism(&ss)?.all_bijective();
        let comparison_bijective = homology_tensor_h0(ah, &t.module, m, window)?.holds();
        instances.push(CollapseInstance {
            label: t.label.clone(),
            size: size(&t.module),
            certified_to: ss.certified_to,
            e2_vanishes,
            edge_bijective,
            comparison_bijective,
            collapses: e2_vanishes && edge_bijective && comparison_bijective,
        });
    }
    let flat = instances.iter().all(|i| i.collapses);
    Ok(CollapseEvidence { instances, flat })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberInstance {
    pub label: String,
    pub size: usize,
    pub preserved: bool,
    pub corner_acyclic: bool,
    pub evidence: SquareEvidence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberEvidence {
    pub instances: Vec<FiberInstance>,
    pub flat: bool,
}

/// `QM ⊗_A -` applied to every corner and edge of a square.
fn tensor_square(q: &SemifreeReplacement, s: &Square) -> Result<Square> {
    let bound = q.valid_to;
    let degs = q.free.degrees();
    let t = |x: &DgModule| bounded_tensor(&q.free, x, bound);
    let (ta, tb, tc, td) = (t(&s.a), t(&s.b), t(&s.c), t(&s.d));
    let m = |src, tgt, f: &ChainMap| free_tensor_with_map(src, tgt, &degs, f);
    Square::new(
        ta.module.clone(),
        tb.module.clone(),
        tc.module.clone(),
        td.module.clone(),
        m(&ta, &tb, &s.top),
        m(&ta, &tc, &s.left),
        m(&tb, &td, &s.right),
        m(&tc, &td, &s.bottom),
    )
}

/// For each test map `f: B -> D`, the image of `K_f -> B -> D` under
/// `QM ⊗_A -` is checked to be a homotopy fiber sequence.
pub fn flat_by_fiber_preservation(ah: &AlgebraHomology, m: &DgModule, maps: &[TestMap], window: i32) -> Result<FiberEvidence> {
    let q = semifree_replace_with(m, window, &ah.ha)?;
    let mut instances = Vec::new();
    for t in maps {
        let square = mapping_fiber_square(&t.map, &t.source, &t.target)?;
        let image = tensor_square(&q, &square)?;
        let v = is_homotopy_fiber_sequence(&image)?;
        instances.push(FiberInstance {
            label: t.label.clone(),
            size: size(&t.source) + size(&t.target),
            preserved: v.is_fiber_sequence,
            corner_acyclic: v.corner_acyclic,
            evidence: v.square.evidence,
        });
    }
    let flat = instances.iter().all(|i| i.preserved);
    Ok(FiberEvidence { instances, flat })
}

/// The smallest instance on which a predicate disagrees with strong flatness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub predicate: String,
    /// `None` when the module is not strongly flat but no test instance
    /// detected it.
    pub instance: Option<String>,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatnessVerdict {
    pub seed: u64,
    pub window: i32,
    pub p_max: usize,
    pub strongly_flat: StronglyFlatVerdict,
    pub collapse: CollapseEvidence,
    pub fiber_preservation: FiberEvidence,
    pub agree: bool,
    pub counterexample: Option<Counterexample>,
}

impl FlatnessVerdict {
    pub fn flat(&self) -> bool {
        self.strongly_flat.strongly_flat
    }
}

fn minimize<'a>(predicate: &str, expected: bool, failures: impl Iterator<Item = (&'a str, usize)>) -> Counterexample {
    let smallest = failures.min_by_key(|&(_, s)| s);
    match (expected, smallest) {
        (true, Some((label, size))) => Counterexample { predicate: predicate.into(), instance: Some(label.into()), size },
        _ => Counterexample { predicate: predicate.into(), instance: None, size: 0 },
    }
}

pub fn equivalence_harness(ah: &AlgebraHomology, m: &DgModule, config: &HarnessConfig) -> Result<FlatnessVerdict> {
    let families = test_families(ah, config)?;
    equivalence_harness_on(ah, m, &families, config)
}

pub fn equivalence_harness_on(
    ah: &AlgebraHomology,
    m: &DgModule,
    families: &TestFamilies,
    config: &HarnessConfig,
) -> Result<FlatnessVerdict> {
    let sf = strongly_flat(ah, m)?;
    let collapse = flat_by_collapse(ah, m, &families.modules, config.window, config.p_max)?;
    let fiber = flat_by_fiber_preservation(ah, m, &families.maps, config.window)?;
    let expected = sf.strongly_flat;
    let counterexample = if collapse.flat != expected {
        let fails = collapse.instances.iter().filter(|i| !i.collapses).map(|i| (i.label.as_str(), i.size));
        Some(minimize("collapse", expected, fails))
    } else if fiber.flat != expected {
        let fails = fiber.instances.iter().filter(|i| !i.preserved).map(|i| (i.label.as_str(), i.size));
        Some(minimize("fiber preservation", expected, fails))
    } else {
        None
    };
    Ok(FlatnessVerdict {
        seed: families.seed,
        window: config.window,
        p_max: config.p_max,
        strongly_flat: sf,
        collapse,
        fiber_preservation: fiber,
        agree: counterexample.is_none(),
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::examples;

    fn config() -> HarnessConfig {
        HarnessConfig { window: 3, p_max: 3, random_modules: 1, random_maps: 1, ..HarnessConfig::default() }
    }

    #[test]
    fn algebra_is_flat_everywhere() {
        let a = examples::dual_numbers();
        let ah = AlgebraHomology::new(&a).unwrap();
        let v = equivalence_harness(&ah, &DgModule::free_rank_one(&a), &config()).unwrap();
        assert!(v.agree && v.flat(), "{v:?}");
    }

    #[test]
    fn residue_over_dual_numbers_fails_everywhere() {
        let a = examples::dual_numbers();
        let ah = AlgebraHomology::new(&a).unwrap();
        let v = equivalence_harness(&ah, &examples::residue_module(&a), &config()).unwrap();
        assert!(v.agree && !v.flat(), "{v:?}");
        assert!(!v.strongly_flat.h0.flat);
        let eps = v.fiber_preservation.instances.iter().find(|i| i.label == "(. a1) on A").unwrap();
        assert!(!eps.preserved);
    }

    #[test]
    fn residue_over_exterior_is_not_strong() {
        let a = examples::exterior(1);
        let ah = AlgebraHomology::new(&a).unwrap();
        let v = equivalence_harness(&ah, &examples::residue_module(&a), &config()).unwrap();
        assert!(v.agree && !v.flat(), "{v:?}");
        assert!(!v.strongly_flat.strong.holds());
    }
}
