//! Stage-zero cell attachment: spheres on homology generators, disks for
//! degreewise surjectivity.

use serde::{Deserialize, Serialize};

use crate::complex::{homology, HomologyData};
use crate::dg::{CellKind, DgModule, HomologyAlgebra, SemifreeModule};
use crate::error::Result;
use crate::linalg::{vector, Subspace, Vector};

/// Which cells a stage attached, by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLog {
    pub label: String,
    pub cells: Vec<(i32, CellKind)>,
}

/// A semifree module with the values of its generators in a target module.
#[derive(Clone, Debug)]
pub struct Cover {
    pub free: SemifreeModule,
    pub values: Vec<Vector>,
    pub log: Vec<StageLog>,
}

impl Cover {
    pub fn new(x: &DgModule) -> Self {
        Cover { free: SemifreeModule::new(x.algebra().clone()), values: Vec::new(), log: Vec::new() }
    }

    fn sphere(&mut self, degree: i32, value: Vector) -> usize {
        let g = self.free.attach(degree, Vec::new()).expect("sphere");
        self.values.push(value);
        g
    }

    fn disk(&mut self, x: &DgModule, degree: i32, value: Vector) {
        let low = self.free.attach(degree - 1, Vec::new()).expect("disk partner");
        self.values.push(x.d(degree).mul_vec(&value));
        let unit = self.free.algebra().unit().clone();
        self.free.attach(degree, vec![(low, unit)]).expect("disk");
        self.values.push(value);
    }

    /// Image of the cover in `X_n`: all `a ◁ value(g)`.
    pub fn image(&self, x: &DgModule, n: i32) -> Subspace {
        let a = self.free.algebra();
        let mut vs = Vec::new();
        for (g, v) in self.free.generators().iter().zip(&self.values) {
            let k = n - g.degree;
            if k < 0 || k > a.top() {
                continue;
            }
            for i in 0..a.dim(k) {
                if let Some(m) = x.action(k, i, g.degree) {
                    let w = m.mul_vec(v);
                    if !w.is_empty() {
                        vs.push(w);
                    }
                }
            }
        }
        Subspace::span(x.dim(n), &vs)
    }
}

/// Classes `[a][v]` in `H(X)` spanned by a cycle `v` of degree `n`,
/// added to the running spans.
fn add_orbit(spans: &mut [Vec<Vector>], x: &DgModule, hx: &HomologyData, ha: &HomologyAlgebra, n: i32, v: &Vector, top: i32) -> Result<()> {
    for k in 0..=ha.algebra.top() {
        if n + k > top {
            break;
        }
        for t in 0..ha.data.dim(k) {
            let a = ha.data.representative(k, t);
            let w = x.act(k, &a, n, v);
            spans[(n + k) as usize].push(hx.class_of(n + k, &w)?);
        }
    }
    Ok(())
}

/// Spheres generating `H_{<= h_top}(X)` over `H(A)`, disks making the map onto
/// `X_n` for `1 <= n <= s_top`, and with `degree_zero` extra spheres making it
/// onto `X_0`.
pub fn cover(x: &DgModule, ha: &HomologyAlgebra, h_top: i32, s_top: i32, degree_zero: bool) -> Result<Cover> {
    let mut c = Cover::new(x);
    let hx = homology(x.complex());
    let h_top = h_top.min(hx.top());
    let mut spans: Vec<Vec<Vector>> = vec![Vec::new(); (h_top.max(0) + 1) as usize];
    let mut spheres = StageLog { label: "spheres".into(), cells: Vec::new() };
    for n in 0..=h_top {
        for t in 0..hx.dim(n) {
            let span = Subspace::span(hx.dim(n), &spans[n as usize]);
            let class = vector::unit(t);
            if span.contains(&class) {
                continue;
            }
            let rep = hx.representative(n, t);
            c.sphere(n, rep.clone());
            spheres.cells.push((n, CellKind::Sphere));
            add_orbit(&mut spans, x, &hx, ha, n, &rep, h_top)?;
        }
    }
    c.log.push(spheres);
    let mut disks = StageLog { label: "disks".into(), cells: Vec::new() };
    if degree_zero && x.top() >= 0 {
        let mut image = c.image(x, 0);
        for i in 0..x.dim(0) {
            let e = vector::unit(i);
            if image.contains(&e) {
                continue;
            }
            c.sphere(0, e);
            disks.cells.push((0, CellKind::Sphere));
            image = c.image(x, 0);
        }
    }
    for n in 1..=s_top.min(x.top()) {
        let mut image = c.image(x, n);
        for i in 0..x.dim(n) {
            let e = vector::unit(i);
            if image.contains(&e) {
                continue;
            }
            c.disk(x, n, e);
            disks.cells.push((n, CellKind::Disk));
            image = c.image(x, n);
        }
    }
    c.log.push(disks);
    Ok(c)
}

/// `Σ c_t rep_t` for a coordinate vector of classes.
pub(crate) fn cycle_of(hx: &HomologyData, n: i32, coords: &Vector) -> Vector {
    let mut out = Vec::new();
    for (t, c) in coords {
        out = vector::axpy(&out, c, &hx.representative(n, *t));
    }
    out
}
