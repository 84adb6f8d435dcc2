//! Acceptance run: one PASS/FAIL line per criterion. Every certificate is
//! exact, so the tolerances below are mismatch counts and all of them are 0.

// the pinned tolerance of zero makes some comparisons trivially true
#![allow(clippy::absurd_extreme_comparisons)]

use std::process::ExitCode;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use dgtor::complex::homology;
use dgtor::dg::{examples, free_tensor, DgModule, SemifreeModule};
use dgtor::flatness::{equivalence_harness, AlgebraHomology, HarnessConfig};
use dgtor::gen;
use dgtor::resolution::{derived_tensor, graded_tor};
use dgtor::suites::{self, SuiteReport};
use dgtor::{Complex, Rational, Result};

const SEED: u64 = 20_240_601;

/// Failing instances tolerated by any criterion.
const MAX_FAILURES: usize = 0;

const TOR_SS_CASES: usize = 200;
const TOR_SS_WINDOW: i32 = 6;
const TOR_SS_P_MAX: usize = 6;
/// Wall-clock budget for criterion 1.
const TOR_SS_BUDGET_SECS: f64 = 300.0;

const ONE_SIDED_CASES: usize = 100;
const ONE_SIDED_WINDOW: i32 = 5;

const FLATNESS_CASES: usize = 100;
const FLATNESS: HarnessConfig = HarnessConfig { window: 4, p_max: 4, seed: 0, random_modules: 2, random_maps: 2, max_top: 2 };

const COLLAPSE_CASES: usize = 100;
const COLLAPSE_WINDOW: i32 = 6;

const STRUCTURAL_CASES: usize = 100;

#[derive(Serialize)]
struct Outcome {
    id: u32,
    name: &'static str,
    passed: bool,
    summary: String,
    evidence: Value,
}

fn suite_outcome(id: u32, name: &'static str, reports: Vec<SuiteReport>, extra: impl FnOnce(&[SuiteReport]) -> (bool, String)) -> Outcome {
    let failures: usize = reports.iter().map(|r| r.failures.len()).sum();
    let cases: usize = reports.iter().map(|r| r.cases).sum();
    let (ok, note) = extra(&reports);
    let mut summary = format!("{cases} instances, {failures} failing (tolerance {MAX_FAILURES})");
    if !note.is_empty() {
        summary.push_str(", ");
        summary.push_str(&note);
    }
    for r in reports.iter().filter(|r| !r.passed()) {
        summary.push_str(&format!("; {}: {}", r.suite, r.failures.first().map_or("", String::as_str)));
    }
    Outcome { id, name, passed: ok && failures <= MAX_FAILURES, summary, evidence: json!(reports) }
}

fn tor_ss(seed: u64) -> Outcome {
    let t = Instant::now();
    let r = suites::tor_ss(seed, TOR_SS_CASES, TOR_SS_WINDOW, TOR_SS_P_MAX);
    let secs = t.elapsed().as_secs_f64();
    // the elapsed time stays out of the evidence so reruns compare equal
    suite_outcome(1, "Tor spectral sequence: E2 = Tor, E-infinity = filtration of H(M ⊗^L N)", vec![r], |_| {
        (secs <= TOR_SS_BUDGET_SECS, format!("window {TOR_SS_WINDOW}, p_max {TOR_SS_P_MAX}, within {TOR_SS_BUDGET_SECS:.0}s budget: {}", secs <= TOR_SS_BUDGET_SECS))
    })
}

fn one_sided(seed: u64) -> Outcome {
    let r = suites::one_sided(seed, ONE_SIDED_CASES, ONE_SIDED_WINDOW);
    suite_outcome(2, "one-sided resolutions: H(QM ⊗ QN) = H(QM ⊗ N) = H(M ⊗ QN)", vec![r], |_| (true, format!("window {ONE_SIDED_WINDOW}")))
}

fn curated() -> Vec<(&'static str, DgModule, bool)> {
    let eps = examples::dual_numbers();
    let ext = examples::exterior(1);
    vec![
        ("A over k[e]", DgModule::free_rank_one(&eps), true),
        ("k over k[e]", examples::residue_module(&eps), false),
        ("k over exterior", examples::residue_module(&ext), false),
        ("free of rank 2 over exterior", DgModule::free_rank_one(&ext).power(2), true),
        ("A + k over k[e]", DgModule::free_rank_one(&eps).direct_sum(&examples::residue_module(&eps)), false),
        ("A over Koszul algebra", DgModule::free_rank_one(&examples::koszul_dual_numbers()), true),
        ("sA over Koszul algebra", DgModule::free_rank_one(&examples::koszul_dual_numbers()).suspension(), false),
        ("S0 + D2 over k", gen::over_ground(&Complex::sphere(0).direct_sum(&Complex::disk(2))), true),
        ("S1 over k", gen::over_ground(&Complex::sphere(1)), false),
    ]
}

fn flatness(seed: u64) -> Outcome {
    let mut curated_report = Vec::new();
    let mut curated_ok = true;
    let mut wrong = Vec::new();
    for (i, (label, m, expected)) in curated().into_iter().enumerate() {
        let verdict = AlgebraHomology::new(m.algebra())
            .and_then(|ah| equivalence_harness(&ah, &m, &HarnessConfig { seed: seed + i as u64, ..FLATNESS }));
        let (agree, flat) = match &verdict {
            Ok(v) => (v.agree, v.flat()),
            Err(_) => (false, !expected),
        };
        if !(agree && flat == expected) {
            curated_ok = false;
            wrong.push(format!("{label}: {:?}", verdict.map(|v| (v.flat(), v.counterexample))));
        }
        curated_report.push(json!({ "module": label, "expected": expected, "flat": flat, "agree": agree }));
    }
    let random = suites::flatness(seed, FLATNESS_CASES, FLATNESS);
    let mut out = suite_outcome(3, "flatness: strongly flat = collapse = fiber preservation", vec![random], |_| {
        (curated_ok, format!("curated suite of {} modules correct: {curated_ok}{}", curated_report.len(), wrong.iter().map(|w| format!("; {w}")).collect::<String>()))
    });
    out.evidence = json!({ "curated": curated_report, "random": out.evidence });
    out
}

fn collapse(seed: u64) -> Outcome {
    let r = suites::collapse(seed, COLLAPSE_CASES, COLLAPSE_WINDOW, COLLAPSE_WINDOW as usize);
    suite_outcome(4, "collapse: edge maps bijective for strongly flat M, q <= window - 1", vec![r], |_| {
        (true, format!("window {COLLAPSE_WINDOW}"))
    })
}

/// `k` over `k[e]/(e²)` against the periodic resolution `g_p`, `d g_p = e g_{p-1}`.
fn dual_numbers_oracle() -> Result<(bool, Value)> {
    let a = examples::dual_numbers();
    let k = examples::residue_module(&a);
    let eps = vec![(1, Rational::from(1))];
    let mut periodic = SemifreeModule::new(a.clone());
    periodic.attach(0, Vec::new())?;
    for p in 1..=6 {
        periodic.attach(p, vec![(p as usize - 1, eps.clone())])?;
    }
    // the resolution resolves k through degree 5; its top cycle is cut off
    let (pm, _) = periodic.to_module(None);
    let hp = homology(pm.complex());
    let resolves = (0..=5).all(|n| hp.dim(n) == usize::from(n == 0));
    let hand = homology(free_tensor(&periodic, &k, None).module.complex());
    let hand: Vec<usize> = (0..=5).map(|n| hand.dim(n)).collect();
    let tor = graded_tor(&k, &k, 6, 0)?;
    let tor: Vec<usize> = (0..=6).map(|p| tor.dim(p, 0)).collect();
    let derived = derived_tensor(&k, &k, 6)?;
    let certified = derived.certified_to() >= 5;
    let derived: Vec<usize> = (0..=5).map(|n| derived.homology.dim(n)).collect();
    let ok = resolves && certified && hand == vec![1; 6] && tor == vec![1; 7] && derived == hand;
    Ok((ok, json!({ "tor_p_0": tor, "derived": derived, "periodic": hand, "periodic_resolves": resolves })))
}

fn oracle() -> Outcome {
    let (passed, evidence) = dual_numbers_oracle().unwrap_or_else(|e| (false, json!(e.to_string())));
    let summary = format!(
        "Tor_p(k,k)_0 = {} for p <= 6, H_p(k ⊗^L k) = {} for p <= 5, periodic resolution gives {}",
        evidence["tor_p_0"], evidence["derived"], evidence["periodic"]
    );
    Outcome { id: 5, name: "k[e]/(e²) oracle", passed, summary, evidence }
}

fn structural(seed: u64) -> Outcome {
    let n = STRUCTURAL_CASES;
    let reports = vec![
        suites::axioms(seed, n),
        suites::path_objects(seed, n),
        suites::long_exact_sequences(seed, n),
        suites::prop_tri(seed, n),
        suites::kunneth(seed, n),
        suites::free_homology_tensor(seed, n),
        suites::koszul(seed, n),
        suites::postnikov(seed, n),
        suites::pasting(seed, n),
        suites::leg_independence(seed, n),
        suites::quasi_iso_invariance(seed, n),
        suites::tor_symmetry(seed, n),
    ];
    suite_outcome(6, "structural suites", reports, |rs| {
        let least = rs.iter().map(|r| r.cases).min().unwrap_or(0);
        (least >= STRUCTURAL_CASES, format!("{} suites of at least {least} cases", rs.len()))
    })
}

fn all(seed: u64) -> Vec<(Outcome, f64)> {
    let steps: Vec<Box<dyn Fn(u64) -> Outcome>> = vec![
        Box::new(tor_ss),
        Box::new(one_sided),
        Box::new(flatness),
        Box::new(collapse),
        Box::new(|_| oracle()),
        Box::new(structural),
    ];
    steps
        .iter()
        .map(|step| {
            let t = Instant::now();
            let o = step(seed);
            (o, t.elapsed().as_secs_f64())
        })
        .collect()
}

fn cli_reports(seed: u64) -> Vec<String> {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/workspace.json");
    let commands: [&[&str]; 4] = [&["tor-ss", file, "k", "k"], &["equiv", file, "k"], &["square", file, "pullback"], &["postnikov", file, "k"]];
    commands
        .iter()
        .map(|cmd| {
            let mut args = vec!["dgtor".to_string(), "--json".into(), "--seed".into(), seed.to_string()];
            args.extend(cmd.iter().map(|s| s.to_string()));
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = dgtor_cli::main_with(args, &mut out, &mut err);
            format!("{code}\n{}", String::from_utf8_lossy(&out))
        })
        .collect()
}

fn print(o: &Outcome, secs: f64) {
    println!("{} [{}] {}: {} ({secs:.1}s)", if o.passed { "PASS" } else { "FAIL" }, o.id, o.name, o.summary);
}

fn main() -> ExitCode {
    let first = all(SEED);
    for (o, secs) in &first {
        print(o, *secs);
    }
    let t = Instant::now();
    let report = |runs: &[(Outcome, f64)]| {
        serde_json::to_string(&runs.iter().map(|(o, _)| o).collect::<Vec<_>>()).expect("outcomes serialize")
    };
    let second = all(SEED);
    let library_same = report(&first) == report(&second);
    let cli_same = cli_reports(SEED) == cli_reports(SEED);
    let determinism = Outcome {
        id: 7,
        name: "determinism",
        passed: library_same && cli_same,
        summary: format!(
            "second run of criteria 1-6 byte-identical: {library_same}; CLI JSON reports byte-identical: {cli_same}; {} bytes compared",
            report(&first).len()
        ),
        evidence: Value::Null,
    };
    print(&determinism, t.elapsed().as_secs_f64());
    let passed = first.iter().all(|(o, _)| o.passed) && determinism.passed;
    println!("{}", if passed { "acceptance: all criteria pass" } else { "acceptance: FAILED" });
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
