//! Workspace files: named algebras, modules, maps, squares and cospans in
//! JSON, with rationals written as `"p/q"` and matrices as triplet lists.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::{ChainMap, Complex};
use crate::dg::{DgAlgebra, DgModule};
use crate::error::{Error, Result};
use crate::homotopy::Square;
use crate::linalg::{Matrix, Vector};

pub const FIELD: &str = "QQ";

fn default_field() -> String {
    FIELD.into()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    /// `(degree, index)` of the left factor.
    pub left: (i32, usize),
    pub right: (i32, usize),
    pub value: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<Vec<String>>,
    /// `d_1, ..., d_top`.
    #[serde(default)]
    pub differentials: Vec<Matrix>,
    /// Nonzero products of basis vectors; unlisted products are zero.
    #[serde(default)]
    pub products: Vec<ProductEntry>,
    pub unit: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    /// `(degree, index)` of the algebra basis vector.
    pub element: (i32, usize),
    /// `(degree, index)` of the module basis vector.
    pub on: (i32, usize),
    pub value: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub algebra: String,
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<Vec<String>>,
    #[serde(default)]
    pub differentials: Vec<Matrix>,
    /// Nonzero actions of basis vectors, including the unit.
    #[serde(default)]
    pub actions: Vec<ActionEntry>,
    /// Set for a truncation: homology is known below this degree only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_to: Option<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub source: String,
    pub target: String,
    /// Components from degree 0; missing trailing components are zero.
    pub components: Vec<Matrix>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareSpec {
    pub top: String,
    pub left: String,
    pub right: String,
    pub bottom: String,
}

/// `B -right-> D <-bottom- C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CospanSpec {
    pub right: String,
    pub bottom: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceFile {
    pub window: i32,
    pub p_max: usize,
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default)]
    pub algebras: BTreeMap<String, AlgebraSpec>,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default)]
    pub squares: BTreeMap<String, SquareSpec>,
    #[serde(default)]
    pub cospans: BTreeMap<String, CospanSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedModule {
    pub algebra: String,
    pub labels: Vec<Vec<String>>,
    pub module: DgModule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMap {
    pub source: String,
    pub target: String,
    pub map: ChainMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedAlgebra {
    pub labels: Vec<Vec<String>>,
    pub algebra: Arc<DgAlgebra>,
}

/// A loaded workspace; every reference resolves and every object validates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Workspace {
    pub window: i32,
    pub p_max: usize,
    pub algebras: BTreeMap<String, NamedAlgebra>,
    pub modules: BTreeMap<String, NamedModule>,
    pub maps: BTreeMap<String, NamedMap>,
    pub squares: BTreeMap<String, SquareSpec>,
    pub cospans: BTreeMap<String, CospanSpec>,
}

fn complex(dims: &[usize], diffs: &[Matrix]) -> Result<Complex> {
    let dims = if dims.is_empty() { vec![0] } else { dims.to_vec() };
    if diffs.len() + 1 != dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} differentials for {} degrees, expected {}",
            diffs.len(),
            dims.len(),
            dims.len() - 1
        )));
    }
    Complex::new(0, dims, diffs.to_vec())
}

fn check_labels(labels: &[Vec<String>], dims: &[usize]) -> Result<()> {
    if labels.is_empty() {
        return Ok(());
    }
    if labels.len() != dims.len() || labels.iter().zip(dims).any(|(l, &d)| l.len() != d) {
        return Err(Error::DimensionMismatch("basis labels do not match the dimensions".into()));
    }
    Ok(())
}

fn lookup<'a, T>(table: &'a BTreeMap<String, T>, kind: &str, name: &str) -> Result<&'a T> {
    table.get(name).ok_or_else(|| Error::Input(format!("unknown {kind} '{name}'")))
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<DgAlgebra> {
        check_labels(&self.labels, &self.dims)?;
        let c = complex(&self.dims, &self.differentials)?;
        let products = self.products.iter().map(|e| (e.left, e.right, e.value.clone()));
        DgAlgebra::from_products(c, products, self.unit.clone())
    }

    pub fn from_algebra(a: &DgAlgebra, labels: Vec<Vec<String>>) -> Self {
        let top = a.top();
        let mut products = Vec::new();
        for p in 0..=top {
            for i in 0..a.dim(p) {
                for q in 0..=top - p {
                    for j in 0..a.dim(q) {
                        let value = a.mul_basis(p, i, q, j);
                        if !value.is_empty() {
                            products.push(ProductEntry { left: (p, i), right: (q, j), value });
                        }
                    }
                }
            }
        }
        AlgebraSpec {
            dims: a.complex().dims().to_vec(),
            labels,
            differentials: a.complex().differentials().to_vec(),
            products,
            unit: a.unit().clone(),
        }
    }
}

impl ModuleSpec {
    pub fn build(&self, algebra: &Arc<DgAlgebra>) -> Result<DgModule> {
        check_labels(&self.labels, &self.dims)?;
        let c = complex(&self.dims, &self.differentials)?.with_exact_to(self.exact_to);
        let entries = self.actions.iter().map(|e| (e.element, e.on, e.value.clone()));
        DgModule::from_actions(algebra.clone(), c, entries)
    }

    pub fn from_module(name: &str, m: &DgModule, labels: Vec<Vec<String>>) -> Self {
        let a = m.algebra();
        let mut actions = Vec::new();
        for p in 0..=a.top() {
            for i in 0..a.dim(p) {
                for q in 0..=m.top() {
                    let Some(x) = m.action(p, i, q) else { continue };
                    for j in 0..m.dim(q) {
                        let value = x.column(j).clone();
                        if !value.is_empty() {
                            actions.push(ActionEntry { element: (p, i), on: (q, j), value });
                        }
                    }
                }
            }
        }
        ModuleSpec {
            algebra: name.into(),
            dims: m.complex().dims().to_vec(),
            labels,
            differentials: m.complex().differentials().to_vec(),
            actions,
            exact_to: m.exact_to(),
        }
    }
}

impl WorkspaceFile {
    /// Resolve names and validate every object, reporting the first failure
    /// with the name of the offending object.
    pub fn resolve(&self) -> Result<Workspace> {
        if self.field != FIELD {
            return Err(Error::Input(format!("unsupported field '{}', only {FIELD} is available", self.field)));
        }
        if self.window < 0 {
            return Err(Error::Input(format!("window {} is negative", self.window)));
        }
        let mut algebras = BTreeMap::new();
        for (name, spec) in &self.algebras {
            let a = spec.build().map_err(|e| e.context(&format!("algebra '{name}'")))?;
            algebras.insert(name.clone(), NamedAlgebra { labels: spec.labels.clone(), algebra: Arc::new(a) });
        }
        let mut modules = BTreeMap::new();
        for (name, spec) in &self.modules {
            let a = lookup(&algebras, "algebra", &spec.algebra).map_err(|e| e.context(&format!("module '{name}'")))?;
            let m = spec.build(&a.algebra).map_err(|e| e.context(&format!("module '{name}'")))?;
            modules.insert(name.clone(), NamedModule { algebra: spec.algebra.clone(), labels: spec.labels.clone(), module: m });
        }
        let mut maps = BTreeMap::new();
        for (name, spec) in &self.maps {
            let ctx = |e: Error| e.context(&format!("map '{name}'"));
            let s = lookup(&modules, "module", &spec.source).map_err(ctx)?;
            let t = lookup(&modules, "module", &spec.target).map_err(ctx)?;
            if s.algebra != t.algebra {
                return Err(ctx(Error::Input("source and target are over different algebras".into())));
            }
            let f = ChainMap::new(s.module.complex(), t.module.complex(), spec.components.clone()).map_err(ctx)?;
            DgModule::check_linear(&f, &s.module, &t.module).map_err(ctx)?;
            maps.insert(name.clone(), NamedMap { source: spec.source.clone(), target: spec.target.clone(), map: f });
        }
        let ws = Workspace {
            window: self.window,
            p_max: self.p_max,
            algebras,
            modules,
            maps,
            squares: self.squares.clone(),
            cospans: self.cospans.clone(),
        };
        for name in ws.squares.keys() {
            ws.square(name)?;
        }
        for name in ws.cospans.keys() {
            ws.cospan(name)?;
        }
        Ok(ws)
    }
}

/// A resolved cospan `B -f-> D <-g- C`.
#[derive(Clone, Debug)]
pub struct Cospan {
    pub b: DgModule,
    pub c: DgModule,
    pub d: DgModule,
    pub f: ChainMap,
    pub g: ChainMap,
}

impl Workspace {
    pub fn algebra(&self, name: &str) -> Result<&Arc<DgAlgebra>> {
        Ok(&lookup(&self.algebras, "algebra", name)?.algebra)
    }

    pub fn module(&self, name: &str) -> Result<&DgModule> {
        Ok(&lookup(&self.modules, "module", name)?.module)
    }

    pub fn map(&self, name: &str) -> Result<&NamedMap> {
        lookup(&self.maps, "map", name)
    }

    pub fn square(&self, name: &str) -> Result<Square> {
        let ctx = |e: Error| e.context(&format!("square '{name}'"));
        let spec = lookup(&self.squares, "square", name).map_err(ctx)?;
        let [top, left, right, bottom] =
            [&spec.top, &spec.left, &spec.right, &spec.bottom].map(|m| self.map(m).map_err(ctx));
        let (top, left, right, bottom) = (top?, left?, right?, bottom?);
        if top.source != left.source || top.target != right.source || left.target != bottom.source || right.target != bottom.target {
            return Err(ctx(Error::Input("maps do not form a square".into())));
        }
        Square::new(
            self.module(&top.source)?.clone(),
            self.module(&top.target)?.clone(),
            self.module(&left.target)?.clone(),
            self.module(&right.target)?.clone(),
            top.map.clone(),
            left.map.clone(),
            right.map.clone(),
            bottom.map.clone(),
        )
        .map_err(ctx)
    }

    pub fn cospan(&self, name: &str) -> Result<Cospan> {
        let ctx = |e: Error| e.context(&format!("cospan '{name}'"));
        let spec = lookup(&self.cospans, "cospan", name).map_err(ctx)?;
        let f = self.map(&spec.right).map_err(ctx)?;
        let g = self.map(&spec.bottom).map_err(ctx)?;
        if f.target != g.target {
            return Err(ctx(Error::Input("the two maps have different targets".into())));
        }
        Ok(Cospan {
            b: self.module(&f.source)?.clone(),
            c: self.module(&g.source)?.clone(),
            d: self.module(&f.target)?.clone(),
            f: f.map.clone(),
            g: g.map.clone(),
        })
    }

    pub fn to_file(&self) -> WorkspaceFile {
        WorkspaceFile {
            window: self.window,
            p_max: self.p_max,
            field: FIELD.into(),
            algebras: self
                .algebras
                .iter()
                .map(|(n, a)| (n.clone(), AlgebraSpec::from_algebra(&a.algebra, a.labels.clone())))
                .collect(),
            modules: self
                .modules
                .iter()
                .map(|(n, m)| (n.clone(), ModuleSpec::from_module(&m.algebra, &m.module, m.labels.clone())))
                .collect(),
            maps: self
                .maps
                .iter()
                .map(|(n, f)| {
                    let s = self.modules[&f.source].module.complex();
                    let t = self.modules[&f.target].module.complex();
                    let top = s.top().max(t.top());
                    let components = (0..=top).map(|k| f.map.padded(s, t, k)).collect();
                    (n.clone(), MapSpec { source: f.source.clone(), target: f.target.clone(), components })
                })
                .collect(),
            squares: self.squares.clone(),
            cospans: self.cospans.clone(),
        }
    }
}

pub fn parse(text: &str) -> Result<Workspace> {
    let file: WorkspaceFile = serde_json::from_str(text)?;
    file.resolve()
}

pub fn load(path: &Path) -> Result<Workspace> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| e.context(&path.display().to_string()))
}

pub fn to_json(ws: &Workspace) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ws.to_file())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::examples;

    fn sample() -> Workspace {
        let a = examples::dual_numbers();
        let k = examples::residue_module(&a);
        let free = DgModule::free_rank_one(&a);
        let mut ws = Workspace {
            window: 4,
            p_max: 4,
            algebras: BTreeMap::new(),
            modules: BTreeMap::new(),
            maps: BTreeMap::new(),
            squares: BTreeMap::new(),
            cospans: BTreeMap::new(),
        };
        ws.algebras.insert("A".into(), NamedAlgebra { labels: vec![vec!["1".into(), "e".into()]], algebra: a.clone() });
        ws.modules.insert("A".into(), NamedModule { algebra: "A".into(), labels: vec![], module: free.clone() });
        ws.modules.insert("k".into(), NamedModule { algebra: "A".into(), labels: vec![], module: k.clone() });
        let proj = ChainMap::new(free.complex(), k.complex(), vec![Matrix::from_ints(&[&[1, 0]])]).unwrap();
        ws.maps.insert("q".into(), NamedMap { source: "A".into(), target: "k".into(), map: proj });
        ws.maps.insert("id".into(), NamedMap { source: "A".into(), target: "A".into(), map: ChainMap::identity(free.complex()) });
        ws.maps.insert("idk".into(), NamedMap { source: "k".into(), target: "k".into(), map: ChainMap::identity(k.complex()) });
        ws.squares.insert(
            "S".into(),
            SquareSpec { top: "id".into(), left: "q".into(), right: "q".into(), bottom: "idk".into() },
        );
        ws.cospans.insert("C".into(), CospanSpec { right: "q".into(), bottom: "idk".into() });
        ws
    }

    #[test]
    fn round_trip() {
        let ws = sample();
        let text = to_json(&ws).unwrap();
        let back = parse(&text).unwrap();
        assert_eq!(back, ws);
        assert_eq!(to_json(&back).unwrap(), text);
        assert!(text.contains("\"1\""));
    }

    #[test]
    fn broken_differential_names_the_degree() {
        let mut f = sample().to_file();
        let m = f.modules.get_mut("A").unwrap();
        m.dims = vec![1, 1, 1];
        m.differentials = vec![Matrix::identity(1), Matrix::identity(1)];
        m.actions.clear();
        let e = f.resolve().unwrap_err().to_string();
        assert!(e.contains("module 'A'") && e.contains("d_1 d_2"), "{e}");
    }

    #[test]
    fn non_commutative_table_names_the_pair() {
        let mut f = sample().to_file();
        let a = f.algebras.get_mut("A").unwrap();
        a.dims = vec![3];
        a.labels.clear();
        let one = || vec![(2, crate::Rational::one())];
        a.products.push(ProductEntry { left: (0, 0), right: (0, 2), value: one() });
        a.products.push(ProductEntry { left: (0, 2), right: (0, 0), value: one() });
        a.products.push(ProductEntry { left: (0, 1), right: (0, 2), value: vec![(1, crate::Rational::one())] });
        let e = f.resolve().unwrap_err().to_string();
        assert!(e.contains("algebra 'A'") && e.contains("commutativity") && e.contains("(a_0,1, a_0,2)"), "{e}");
    }

    #[test]
    fn unknown_reference_is_an_input_error() {
        let mut f = sample().to_file();
        f.maps.get_mut("q").unwrap().target = "nope".into();
        assert!(matches!(f.resolve(), Err(Error::Input(_))));
    }
}
