//! Command-line front end: workspace loading, command dispatch, report
//! rendering and the resolution cache.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use dgtor::cache::ResolutionCache;
use dgtor::complex::{homology, long_exact_sequence, mapping_fiber, LesNode};
use dgtor::dg::{homology_algebra, homology_module, tensor_over_algebra, DgModule};
use dgtor::flatness::{equivalence_harness, strongness, AlgebraHomology, HarnessConfig};
use dgtor::homotopy::{is_homotopy_fiber_sequence, mapping_fiber_square, postnikov_tower};
use dgtor::io::{self, Workspace};
use dgtor::resolution::{derived_tensor_from, graded_tor};
use dgtor::spectral::{edge_homomorphism, tor_spectral_sequence, TorSpectralSequence};
use dgtor::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dgtor", version, about = "Exact derived tensor products, Tor spectral sequences and flatness over bounded DG algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Degree window; defaults to the workspace value.
    #[arg(long, global = true)]
    pub window: Option<i32>,
    /// Number of resolution columns; defaults to the workspace value.
    #[arg(long, global = true)]
    pub pmax: Option<usize>,
    /// Seed for generated test families.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Include matrices in the evidence.
    #[arg(long, global = true)]
    pub verbose_evidence: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a workspace and check every object.
    Validate { file: PathBuf },
    /// Homology of a module.
    Homology { file: PathBuf, module: String },
    /// Homology of the plain tensor product `M ⊗_A N`.
    Tensor { file: PathBuf, m: String, n: String },
    /// Homology of the derived tensor product through a cached replacement of `M`.
    Dtensor { file: PathBuf, m: String, n: String },
    /// `Tor^{H(A)}(H(M), H(N))` as a `p x q` table.
    Tor { file: PathBuf, m: String, n: String },
    /// The Tor spectral sequence with its pages and certificates.
    TorSs { file: PathBuf, m: String, n: String },
    /// Edge maps `(HM ⊗_{HA} HN)_q -> H_q(M ⊗^L N)`.
    Edge { file: PathBuf, m: String, n: String },
    /// Whether a named square is a model square and a fiber sequence.
    Square { file: PathBuf, square: String },
    /// Mapping fiber of a named map with its long exact sequence.
    Fiber { file: PathBuf, map: String },
    /// Postnikov tower of a module.
    Postnikov { file: PathBuf, module: String },
    /// Whether `H(A) ⊗_{H_0 A} H_0 M -> H(M)` is an isomorphism.
    Strong { file: PathBuf, module: String },
    /// Flatness verdict with evidence.
    Flat { file: PathBuf, module: String },
    /// The three flatness predicates side by side on shared test families.
    Equiv { file: PathBuf, module: String },
    /// Resolution cache maintenance; `DGTOR_CACHE_DIR` sets the location.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CacheAction {
    List,
    Clear,
    Verify,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub exit_code: i32,
    pub result: Value,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub text: String,
}

impl Outcome {
    pub fn code(&self) -> i32 {
        self.report.exit_code
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("report serializes")
    }
}

struct Computed {
    code: i32,
    result: Value,
    text: String,
    window: Option<i32>,
    p_max: Option<usize>,
    seed: Option<u64>,
}

impl Computed {
    fn new(code: i32, result: Value, text: String) -> Self {
        Computed { code, result, text, window: None, p_max: None, seed: None }
    }

    fn region(mut self, window: i32, p_max: Option<usize>) -> Self {
        self.window = Some(window);
        self.p_max = p_max;
        self
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

fn verdict(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Dimension table with `p` across and `q` increasing upward.
pub fn render_grid(title: &str, grid: &[Vec<usize>]) -> String {
    let mut s = format!("{title}\n");
    let q_top = grid.iter().map(|col| col.len()).max().unwrap_or(0);
    for q in (0..q_top).rev() {
        let _ = write!(s, "{q:>4} |");
        for col in grid {
            match col.get(q) {
                Some(0) => s.push_str("   ."),
                Some(d) => {
                    let _ = write!(s, "{d:>4}");
                }
                None => s.push_str("    "),
            }
        }
        s.push('\n');
    }
    let _ = writeln!(s, "     +{}", "-".repeat(4 * grid.len()));
    s.push_str("  q/p ");
    for p in 0..grid.len() {
        let _ = write!(s, "{p:>4}");
    }
    s.push('\n');
    s
}

fn render_dims(name: &str, dims: &[usize]) -> String {
    let mut s = String::new();
    for (n, d) in dims.iter().enumerate() {
        let _ = writeln!(s, "{name}_{n} = {d}");
    }
    s
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn window(&self, ws: &Workspace) -> i32 {
        self.cli.window.unwrap_or(ws.window)
    }

    /// An explicit `--pmax` is taken as given; the workspace value is
    /// capped by the window.
    fn p_max(&self, ws: &Workspace) -> usize {
        self.cli.pmax.unwrap_or_else(|| ws.p_max.min(self.window(ws).max(1) as usize))
    }

    fn pair<'w>(&self, ws: &'w Workspace, m: &str, n: &str) -> dgtor::Result<(&'w DgModule, &'w DgModule)> {
        let (x, y) = (ws.module(m)?, ws.module(n)?);
        if x.algebra() != y.algebra() {
            return Err(Error::Input(format!("'{m}' and '{n}' are modules over different algebras")));
        }
        Ok((x, y))
    }

    fn run(&self) -> dgtor::Result<Computed> {
        match &self.cli.command {
            Command::Validate { file } => validate(file),
            Command::Homology { file, module } => {
                let ws = io::load(file)?;
                let h = homology(ws.module(module)?.complex());
                let dims = h.certified_dims();
                let text = render_dims("H", &dims);
                Ok(Computed::new(EXIT_OK, json!({ "certified_to": h.certified_to(), "homology": dims }), text))
            }
            Command::Tensor { file, m, n } => {
                let ws = io::load(file)?;
                let w = self.window(&ws);
                let (x, y) = self.pair(&ws, m, n)?;
                let t = tensor_over_algebra(x, y, Some(w))?;
                let h = homology(t.module.complex());
                let dims = h.certified_dims();
                let result = json!({ "chain_dims": t.module.complex().dims(), "certified_to": h.certified_to(), "homology": dims });
                Ok(Computed::new(EXIT_OK, result, render_dims("H", &dims)).region(w, None))
            }
            Command::Dtensor { file, m, n } => {
                let ws = io::load(file)?;
                let w = self.window(&ws);
                let (x, y) = self.pair(&ws, m, n)?;
                let ha = homology_algebra(x.algebra())?;
                let r = ResolutionCache::from_env().replacement(x, w, &ha)?;
                let d = derived_tensor_from(r, y)?;
                let dims = d.dims();
                let result = json!({
                    "certified_to": d.certified_to(),
                    "homology": dims,
                    "generators": d.replacement.free.degrees(),
                });
                Ok(Computed::new(EXIT_OK, result, render_dims("H", &dims)).region(w, None))
            }
            Command::Tor { file, m, n } => {
                let ws = io::load(file)?;
                let (w, pm) = (self.window(&ws), self.p_max(&ws));
                let (x, y) = self.pair(&ws, m, n)?;
                let ha = homology_algebra(x.algebra())?;
                let (hx, hy) = (homology_module(x, &ha)?, homology_module(y, &ha)?);
                let tor = graded_tor(&hx.module, &hy.module, pm, w)?;
                let grid = tor.dims();
                let text = render_grid("Tor_p(HM, HN)_q", &grid);
                Ok(Computed::new(EXIT_OK, json!({ "tor": grid }), text).region(w, Some(pm)))
            }
            Command::TorSs { file, m, n } => {
                let ws = io::load(file)?;
                let (w, pm) = (self.window(&ws), self.p_max(&ws));
                let (x, y) = self.pair(&ws, m, n)?;
                let ss = tor_spectral_sequence(x, y, w, pm)?;
                Ok(tor_ss(&ss).region(w, Some(pm)))
            }
            Command::Edge { file, m, n } => {
                let ws = io::load(file)?;
                let (w, pm) = (self.window(&ws), self.p_max(&ws));
                let (x, y) = self.pair(&ws, m, n)?;
                let ss = tor_spectral_sequence(x, y, w, pm)?;
                let e = edge_homomorphism(&ss)?;
                let code = if !e.image_matches_column_zero { EXIT_INTERNAL } else { verdict(e.all_bijective()) };
                let mut result = json!({
                    "certified_to": e.certified_to,
                    "ranks": e.ranks,
                    "bijective": e.bijective,
                    "image_matches_column_zero": e.image_matches_column_zero,
                });
                if self.cli.verbose_evidence {
                    result["matrices"] = to_value(&e.matrices);
                }
                let mut text = String::new();
                for (q, (r, b)) in e.ranks.iter().zip(&e.bijective).enumerate() {
                    let (src, tgt) = (e.matrices[q].cols(), e.matrices[q].rows());
                    let _ = writeln!(text, "q = {q}: {src} -> {tgt}, rank {r}, bijective {}", yes(*b));
                }
                Ok(Computed::new(code, result, text).region(w, Some(pm)))
            }
            Command::Square { file, square } => {
                let ws = io::load(file)?;
                let s = ws.square(square)?;
                let v = is_homotopy_fiber_sequence(&s)?;
                let ev = &v.square.evidence;
                let code = if !ev.factorization_certified || !ev.leg_independent {
                    EXIT_INTERNAL
                } else {
                    verdict(v.square.is_model_square)
                };
                let result = json!({
                    "is_model_square": v.square.is_model_square,
                    "corner_acyclic": v.corner_acyclic,
                    "is_fiber_sequence": v.is_fiber_sequence,
                    "evidence": to_value(ev),
                });
                let text = format!(
                    "model square: {}\nfiber sequence: {}\nH(A)       = {:?}\nH(holim)   = {:?}\nranks      = {:?}\n",
                    yes(v.square.is_model_square),
                    yes(v.is_fiber_sequence),
                    ev.corner_homology,
                    ev.holim_homology,
                    ev.universal_ranks
                );
                Ok(Computed::new(code, result, text))
            }
            Command::Fiber { file, map } => {
                let ws = io::load(file)?;
                let f = ws.map(map)?;
                let (b, d) = (ws.module(&f.source)?, ws.module(&f.target)?);
                let fib = mapping_fiber(&f.map, b.complex(), d.complex())?;
                let les = long_exact_sequence(&fib)?;
                let hk = homology(&fib.fiber).certified_dims();
                let v = is_homotopy_fiber_sequence(&mapping_fiber_square(&f.map, b, d)?)?;
                let nodes: Vec<Value> = les
                    .nodes
                    .iter()
                    .map(|(node, dim)| {
                        let (kind, n) = match node {
                            LesNode::Fiber(n) => ("K", n),
                            LesNode::Source(n) => ("B", n),
                            LesNode::Target(n) => ("D", n),
                        };
                        json!({ "group": format!("H_{n}({kind})"), "dim": dim })
                    })
                    .collect();
                let code = if v.is_fiber_sequence { EXIT_OK } else { EXIT_INTERNAL };
                let mut text = render_dims("H(K)", &hk);
                let seq: Vec<String> = nodes.iter().map(|x| format!("{}={}", x["group"].as_str().unwrap_or(""), x["dim"])).collect();
                let _ = writeln!(text, "exact: {}", seq.join(" -> "));
                let _ = writeln!(text, "fiber sequence: {}", yes(v.is_fiber_sequence));
                let result = json!({
                    "fiber_homology": hk,
                    "long_exact_sequence": nodes,
                    "is_fiber_sequence": v.is_fiber_sequence,
                    "evidence": to_value(&v.square.evidence),
                });
                Ok(Computed::new(code, result, text))
            }
            Command::Postnikov { file, module } => {
                let ws = io::load(file)?;
                let w = self.window(&ws);
                let t = postnikov_tower(ws.module(module)?, Some(w))?;
                let r = &t.report;
                let mut text = String::new();
                for s in &r.stages {
                    let _ = writeln!(text, "M<={}: dims {:?}, homology {:?}, all properties {}", s.n, s.dims, s.homology, yes(s.holds()));
                }
                let _ = writeln!(text, "limit recovers M: {}", yes(r.limit_matches));
                let code = if r.holds() { EXIT_OK } else { EXIT_INTERNAL };
                Ok(Computed::new(code, to_value(r), text).region(w, None))
            }
            Command::Strong { file, module } => {
                let ws = io::load(file)?;
                let w = self.window(&ws);
                let m = ws.module(module)?;
                let ah = AlgebraHomology::new(m.algebra())?;
                let mut r = strongness(&ah, m, Some(w))?;
                let mut text = String::new();
                for k in 0..r.iso.len() {
                    let _ = writeln!(
                        text,
                        "k = {k}: {} -> {}, rank {}, iso {}",
                        r.source_dims[k],
                        r.target_dims[k],
                        r.ranks[k],
                        yes(r.iso[k])
                    );
                }
                let _ = writeln!(text, "strong: {}", yes(r.holds()));
                let code = verdict(r.holds());
                if !self.cli.verbose_evidence {
                    r = r.summary();
                }
                Ok(Computed::new(code, json!({ "strong": r.holds(), "report": to_value(&r) }), text).region(w, None))
            }
            Command::Flat { file, module } => self.flat(file, module, false),
            Command::Equiv { file, module } => self.flat(file, module, true),
            Command::Cache { action } => cache(*action),
        }
    }

    fn flat(&self, file: &Path, module: &str, full: bool) -> dgtor::Result<Computed> {
        let ws = io::load(file)?;
        let (w, pm) = (self.window(&ws), self.p_max(&ws));
        let m = ws.module(module)?;
        let ah = AlgebraHomology::new(m.algebra())?;
        let config = HarnessConfig { window: w, p_max: pm, seed: self.cli.seed, ..HarnessConfig::default() };
        let mut v = equivalence_harness(&ah, m, &config)?;
        if self.cli.verbose_evidence {
            v.strongly_flat.strong = strongness(&ah, m, None)?;
        }
        let sf = &v.strongly_flat;
        let mut text = format!(
            "strong: {}\nH_0 flat: {} (radical dim {}, Tor_1(R/J, H_0 M) dim {})\nstrongly flat: {}\n",
            yes(sf.strong.holds()),
            yes(sf.h0.flat),
            sf.h0.radical_dim,
            sf.h0.residue_tor1,
            yes(sf.strongly_flat)
        );
        let collapsing = v.collapse.instances.iter().filter(|i| i.collapses).count();
        let preserved = v.fiber_preservation.instances.iter().filter(|i| i.preserved).count();
        let _ = writeln!(text, "collapse: {} ({collapsing}/{} test modules)", yes(v.collapse.flat), v.collapse.instances.len());
        let _ = writeln!(
            text,
            "fiber preservation: {} ({preserved}/{} test maps)",
            yes(v.fiber_preservation.flat),
            v.fiber_preservation.instances.len()
        );
        if full {
            for i in &v.collapse.instances {
                let _ = writeln!(
                    text,
                    "  N = {}: E2 in column 0 {}, edge {}, comparison {}",
                    i.label,
                    yes(i.e2_vanishes),
                    yes(i.edge_bijective),
                    yes(i.comparison_bijective)
                );
            }
            for i in &v.fiber_preservation.instances {
                let _ = writeln!(text, "  f = {}: preserved {}", i.label, yes(i.preserved));
            }
        }
        let _ = writeln!(text, "predicates agree: {}", yes(v.agree));
        if let Some(c) = &v.counterexample {
            let _ = writeln!(text, "counterexample: {} on {}", c.predicate, c.instance.as_deref().unwrap_or("no detecting instance"));
        }
        let code = if !v.agree { EXIT_INTERNAL } else { verdict(v.flat()) };
        let result = if full {
            to_value(&v)
        } else {
            json!({
                "flat": v.flat(),
                "agree": v.agree,
                "strongly_flat": to_value(&v.strongly_flat),
                "collapse": { "flat": v.collapse.flat, "instances": v.collapse.instances.len(), "collapsing": collapsing },
                "fiber_preservation": {
                    "flat": v.fiber_preservation.flat,
                    "instances": v.fiber_preservation.instances.len(),
                    "preserved": preserved,
                },
                "counterexample": to_value(&v.counterexample),
            })
        };
        let mut c = Computed::new(code, result, text).region(w, Some(pm));
        c.seed = Some(self.cli.seed);
        Ok(c)
    }
}

fn validate(file: &Path) -> dgtor::Result<Computed> {
    let ws = io::load(file)?;
    let names = |keys: Vec<&String>| keys.into_iter().cloned().collect::<Vec<_>>();
    let result = json!({
        "valid": true,
        "algebras": names(ws.algebras.keys().collect()),
        "modules": names(ws.modules.keys().collect()),
        "maps": names(ws.maps.keys().collect()),
        "squares": names(ws.squares.keys().collect()),
        "cospans": names(ws.cospans.keys().collect()),
    });
    let text = format!(
        "OK: {} algebras, {} modules, {} maps, {} squares, {} cospans\n",
        ws.algebras.len(),
        ws.modules.len(),
        ws.maps.len(),
        ws.squares.len(),
        ws.cospans.len()
    );
    Ok(Computed::new(EXIT_OK, result, text))
}

fn tor_ss(ss: &TorSpectralSequence) -> Computed {
    let report = ss.report();
    let pm = (ss.p_max as i32 - 1).min(ss.certified_to);
    let grid_of = |page: &dgtor::spectral::Page| -> Vec<Vec<usize>> {
        (0..=pm).map(|p| (0..=ss.certified_to - p).map(|q| page.dim(p, q)).collect()).collect()
    };
    let last = report.collapse_page.min(ss.horizontal.pages.len());
    let pages: Vec<Value> = (2..=last)
        .filter_map(|r| ss.horizontal.page(r).map(|pg| json!({ "r": r, "grid": grid_of(pg) })))
        .collect();
    let mut text = String::new();
    for pg in &pages {
        let grid: Vec<Vec<usize>> = serde_json::from_value(pg["grid"].clone()).unwrap_or_default();
        text.push_str(&render_grid(&format!("E^{}", pg["r"]), &grid));
    }
    text.push_str(&render_grid("E^inf", &report.e_infinity));
    let _ = writeln!(text, "H(M ⊗^L N) = {:?}", report.abutment);
    let _ = writeln!(
        text,
        "E2 = Tor: {}, converges: {}, collapse page: {}",
        yes(report.e2_matches),
        yes(report.convergence.holds()),
        report.collapse_page
    );
    let code = if ss.holds() { EXIT_OK } else { EXIT_INTERNAL };
    Computed::new(code, json!({ "report": to_value(&report), "pages": pages }), text)
}

fn cache(action: CacheAction) -> dgtor::Result<Computed> {
    let c = ResolutionCache::from_env();
    let dir = c.dir().display().to_string();
    Ok(match action {
        CacheAction::List => {
            let entries = c.list()?;
            let mut text = String::new();
            for e in &entries {
                let _ = writeln!(text, "{}  digest {}  window {}  {} generators", e.key, e.digest, e.window, e.generators);
            }
            if entries.is_empty() {
                text.push_str("cache is empty\n");
            }
            Computed::new(EXIT_OK, json!({ "dir": dir, "entries": to_value(&entries) }), text)
        }
        CacheAction::Clear => {
            let n = c.clear()?;
            Computed::new(EXIT_OK, json!({ "dir": dir, "removed": n }), format!("removed {n} entries\n"))
        }
        CacheAction::Verify => {
            let out = c.verify()?;
            let mut text = String::new();
            for v in &out {
                match &v.problem {
                    None => {
                        let _ = writeln!(text, "{}  ok", v.key);
                    }
                    Some(p) => {
                        let _ = writeln!(text, "{}  FAILED ({p}), evicted", v.key);
                    }
                }
            }
            let ok = out.iter().all(|v| v.ok);
            Computed::new(verdict(ok), json!({ "dir": dir, "entries": to_value(&out) }), text)
        }
    })
}

/// Execute a parsed command line. `echo` is recorded in the report.
pub fn run(cli: &Cli, echo: Vec<String>) -> Outcome {
    let (computed, code) = match (Ctx { cli }).run() {
        Ok(c) => {
            let code = c.code;
            (c, code)
        }
        Err(e) => {
            let code = error_code(&e);
            (Computed::new(code, json!({ "error": e.to_string() }), format!("error: {e}\n")), code)
        }
    };
    Outcome {
        report: Report {
            command: echo,
            window: computed.window,
            p_max: computed.p_max,
            seed: computed.seed,
            exit_code: code,
            result: computed.result,
        },
        text: computed.text,
    }
}

/// Parse `args` (including the program name), run, and print to `out`.
pub fn main_with(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{e}");
            return code;
        }
    };
    let o = run(&cli, args.into_iter().skip(1).collect());
    let printed = if cli.json { o.json() + "\n" } else { o.text.clone() };
    let target: &mut dyn Write = if o.code() >= EXIT_INPUT && !cli.json { err } else { out };
    let _ = target.write_all(printed.as_bytes());
    o.code()
}
