use std::time::Instant;

use dgtor::flatness::HarnessConfig;
use dgtor::suites::{self, SuiteReport};

const CASES: usize = 100;
const SEED: u64 = 2024;

fn check(report: SuiteReport, started: Instant) {
    eprintln!("{}: {} cases in {:.1?}", report.suite, report.cases, started.elapsed());
    assert!(report.passed(), "{}: {:#?}", report.suite, report.failures);
}

macro_rules! suite {
    ($name:ident, $call:expr) => {
        #[test]
        fn $name() {
            let t = Instant::now();
            check($call, t);
        }
    };
}

suite!(axioms, suites::axioms(SEED, CASES));
suite!(path_objects, suites::path_objects(SEED, CASES));
suite!(long_exact_sequences, suites::long_exact_sequences(SEED, CASES));
suite!(extension_of_scalars, suites::prop_tri(SEED, CASES));
suite!(kunneth, suites::kunneth(SEED, CASES));
suite!(free_homology_tensor, suites::free_homology_tensor(SEED, CASES));
suite!(koszul_symmetry, suites::koszul(SEED, CASES));
suite!(postnikov, suites::postnikov(SEED, CASES));
suite!(pasting, suites::pasting(SEED, CASES));
suite!(leg_independence, suites::leg_independence(SEED, CASES));
suite!(quasi_iso_invariance, suites::quasi_iso_invariance(SEED, CASES));
suite!(one_sided, suites::one_sided(SEED, CASES, 4));
suite!(tor_symmetry, suites::tor_symmetry(SEED, CASES));
suite!(tor_spectral_sequence, suites::tor_ss(SEED, 40, 5, 5));
suite!(collapse, suites::collapse(SEED, 40, 5, 5));
suite!(flatness, suites::flatness(SEED, 20, HarnessConfig { window: 4, p_max: 4, seed: 0, random_modules: 2, random_maps: 2, max_top: 2 }));

#[test]
fn reports_are_reproducible() {
    assert_eq!(suites::koszul(7, 10), suites::koszul(7, 10));
    let a = serde_json::to_string(&suites::postnikov(7, 10)).unwrap();
    let b = serde_json::to_string(&suites::postnikov(7, 10)).unwrap();
    assert_eq!(a, b);
}
