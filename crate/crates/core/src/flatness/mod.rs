//! Strong, strongly flat and flat modules.

pub mod classical;
pub mod harness;
pub mod strong;

pub use classical::{h0_flat, ideal, jacobson_radical, H0Flatness, IdealTest};
pub use harness::{
    equivalence_harness, equivalence_harness_on, flat_by_collapse, flat_by_fiber_preservation, strongly_flat, test_families,
    CollapseEvidence, CollapseInstance, Counterexample, FiberEvidence, FiberInstance, FlatnessVerdict, HarnessConfig,
    StronglyFlatVerdict, TestFamilies, TestMap, TestModule,
};
pub use strong::{h0_lemma, homology_tensor_h0, strongness, AlgebraHomology, ComparisonReport, StrongnessReport};
