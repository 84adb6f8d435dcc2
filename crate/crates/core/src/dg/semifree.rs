//! Semifree modules `A ⊗ V` with a lowering differential on generators,
//! module maps out of them, and the fast route to `(A ⊗ V) ⊗_A N ≅ V ⊗ N`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::algebra::DgAlgebra;
use super::module::DgModule;
use super::tensor::{tensor_over_algebra, IsoCertificate};
use crate::complex::{min_bound, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::linalg::{rank, vector, Matrix, Rational, Vector};

/// Element `Σ c_h ⊗ h` of a semifree module: generator index and a
/// coefficient in `A_{deg - |h|}`. Sorted by generator, no zero coefficients.
pub type FreeElement = Vec<(usize, Vector)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub degree: i32,
    /// `d(1 ⊗ g)`, written in earlier generators.
    pub boundary: FreeElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    Sphere,
    Disk,
}

/// Free generators on spheres and disks; a disk of degree `n` contributes a
/// generator `g` in degree `n` and its partner `g'` in degree `n - 1` with
/// `dg = g'`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereBasis {
    pub cells: Vec<(i32, CellKind)>,
}

impl SphereBasis {
    pub fn spheres(degrees: &[i32]) -> Self {
        SphereBasis { cells: degrees.iter().map(|&n| (n, CellKind::Sphere)).collect() }
    }

    pub fn push(&mut self, degree: i32, kind: CellKind) {
        self.cells.push((degree, kind));
    }
}

/// Offsets of the blocks `F_{l - |g|}` of `V ⊗ F`, one block per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenLayout {
    degrees: Vec<i32>,
    fiber: Vec<usize>,
    top: i32,
    offsets: Vec<Vec<usize>>,
}

impl GenLayout {
    pub fn new(degrees: Vec<i32>, fiber: Vec<usize>, top: i32) -> Self {
        let fd = |k: i32| if k < 0 { 0 } else { fiber.get(k as usize).copied().unwrap_or(0) };
        let offsets = (0..=top)
            .map(|l| {
                let mut acc = 0;
                let mut offs = Vec::with_capacity(degrees.len() + 1);
                for &g in &degrees {
                    offs.push(acc);
                    acc += fd(l - g);
                }
                offs.push(acc);
                offs
            })
            .collect();
        GenLayout { degrees, fiber, top, offsets }
    }

    pub fn top(&self) -> i32 {
        self.top
    }

    pub fn fiber_dim(&self, k: i32) -> usize {
        if k < 0 {
            0
        } else {
            self.fiber.get(k as usize).copied().unwrap_or(0)
        }
    }

    pub fn dim(&self, l: i32) -> usize {
        if l < 0 || l > self.top {
            0
        } else {
            *self.offsets[l as usize].last().expect("offsets")
        }
    }

    pub fn offset(&self, l: i32, g: usize) -> usize {
        self.offsets[l as usize][g]
    }

    pub fn blocks(&self, l: i32) -> Vec<usize> {
        self.degrees.iter().map(|&g| self.fiber_dim(l - g)).collect()
    }

    /// `(generator, index in the fiber)` of a basis index of degree `l`.
    pub fn decode(&self, l: i32, idx: usize) -> (usize, usize) {
        let offs = &self.offsets[l as usize];
        let g = offs.partition_point(|&o| o <= idx) - 1;
        (g, idx - offs[g])
    }

    /// Place a fiber vector in the block of generator `g`.
    pub fn place(&self, l: i32, g: usize, x: &Vector) -> Vector {
        vector::offset(x, self.offset(l, g))
    }

    /// Vector of degree `l` from a free element; coefficients beyond the
    /// top are dropped.
    pub fn embed(&self, l: i32, e: &FreeElement) -> Vector {
        if l < 0 || l > self.top {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (g, c) in e {
            out.extend(self.place(l, *g, c));
        }
        out
    }

    /// Inverse of [`GenLayout::embed`].
    pub fn split(&self, l: i32, v: &Vector) -> FreeElement {
        let mut out: FreeElement = Vec::new();
        for (idx, x) in v {
            let (g, i) = self.decode(l, *idx);
            match out.last_mut() {
                Some((h, c)) if *h == g => c.push((i, x.clone())),
                _ => out.push((g, vec![(i, x.clone())])),
            }
        }
        out
    }
}

/// `A ⊗ V` with generators in attachment order.
#[derive(Clone, Debug, PartialEq)]
pub struct SemifreeModule {
    algebra: Arc<DgAlgebra>,
    gens: Vec<Generator>,
}

impl SemifreeModule {
    pub fn new(algebra: Arc<DgAlgebra>) -> Self {
        SemifreeModule { algebra, gens: Vec::new() }
    }

    pub fn from_basis(algebra: Arc<DgAlgebra>, basis: &SphereBasis) -> Result<Self> {
        let mut f = SemifreeModule::new(algebra.clone());
        for &(n, kind) in &basis.cells {
            match kind {
                CellKind::Sphere => {
                    f.attach(n, Vec::new())?;
                }
                CellKind::Disk => {
                    if n < 1 {
                        return Err(Error::Input(format!("disk generator in degree {n}")));
                    }
                    let low = f.attach(n - 1, Vec::new())?;
                    f.attach(n, vec![(low, algebra.unit().clone())])?;
                }
            }
        }
        Ok(f)
    }

    pub fn algebra(&self) -> &Arc<DgAlgebra> {
        &self.algebra
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.gens.iter().map(|g| g.degree).collect()
    }

    /// Highest degree in which `A ⊗ V` is nonzero.
    pub fn natural_top(&self) -> i32 {
        self.gens.iter().map(|g| g.degree + self.algebra.top()).max().unwrap_or(0)
    }

    /// Append a generator of degree `n` with `d(1 ⊗ g) = boundary`.
    pub fn attach(&mut self, degree: i32, boundary: FreeElement) -> Result<usize> {
        if degree < 0 {
            return Err(Error::Input(format!("generator in negative degree {degree}")));
        }
        let boundary = normalize(boundary);
        for (h, c) in &boundary {
            let Some(gh) = self.gens.get(*h) else {
                return Err(Error::Input(format!("boundary uses generator {h} before it exists")));
            };
            let k = degree - 1 - gh.degree;
            if k < 0 || k > self.algebra.top() || c.iter().any(|(i, _)| *i >= self.algebra.dim(k)) {
                return Err(Error::Input(format!("boundary coefficient on generator {h} has the wrong degree")));
            }
        }
        if !self.d_element(degree - 1, &boundary).is_empty() {
            return Err(Error::Input("boundary of a new generator must be a cycle".into()));
        }
        self.gens.push(Generator { degree, boundary });
        Ok(self.gens.len() - 1)
    }

    /// Differential of an element of degree `deg`.
    pub fn d_element(&self, deg: i32, e: &FreeElement) -> FreeElement {
        let a = &self.algebra;
        let mut terms: Vec<(usize, Vector)> = Vec::new();
        for (g, c) in e {
            let gd = self.gens[*g].degree;
            let k = deg - gd;
            if k >= 1 {
                terms.push((*g, a.d(k).mul_vec(c)));
            }
            let sign = Rational::sign(k as i64);
            for (h, ch) in &self.gens[*g].boundary {
                let kh = gd - 1 - self.gens[*h].degree;
                let prod = vector::scale(&a.mul(k, c, kh, ch), &sign);
                terms.push((*h, prod));
            }
        }
        normalize(terms)
    }

    /// Action `b ◁ e` for `b` in `A_p` and `e` of degree `deg`.
    pub fn act_element(&self, p: i32, b: &Vector, deg: i32, e: &FreeElement) -> FreeElement {
        let terms = e
            .iter()
            .map(|(g, c)| (*g, self.algebra.mul(p, b, deg - self.gens[*g].degree, c)))
            .collect();
        normalize(terms)
    }

    pub fn layout(&self, top: i32) -> GenLayout {
        GenLayout::new(self.degrees(), self.algebra.complex().space().dims_from_zero(self.algebra.top()), top)
    }

    /// The underlying DG module, truncated at `window` if given.
    pub fn to_module(&self, window: Option<i32>) -> (DgModule, GenLayout) {
        let natural = self.natural_top();
        let top = window.map_or(natural, |w| w.min(natural)).max(0);
        let layout = self.layout(top);
        let a = &self.algebra;
        let dims: Vec<usize> = (0..=top).map(|l| layout.dim(l)).collect();
        let diffs = (1..=top)
            .map(|l| {
                let cols = (0..layout.dim(l))
                    .map(|idx| {
                        let (g, i) = layout.decode(l, idx);
                        let e = vec![(g, vec![(i, Rational::one())])];
                        layout.embed(l - 1, &self.d_element(l, &e))
                    })
                    .collect();
                Matrix::from_columns(layout.dim(l - 1), cols)
            })
            .collect();
        let bound = match window {
            Some(w) if w < natural => Some(w),
            _ => None,
        };
        let complex = Complex::from_parts_unchecked(0, dims, diffs).with_exact_to(bound);
        let degs = self.degrees();
        let module = DgModule::from_fn(a.clone(), complex, |p, i, l| {
            if p + l > top {
                return Matrix::zeros(0, layout.dim(l));
            }
            let blocks = degs
                .iter()
                .enumerate()
                .filter_map(|(g, &gd)| {
                    let k = l - gd;
                    if k < 0 || k > a.top() || p + k > a.top() {
                        return None;
                    }
                    Some((g, g, a.left(p, i, k).expect("in range").clone()))
                })
                .collect();
            Matrix::from_blocks(&layout.blocks(p + l), &layout.blocks(l), blocks)
        })
        .expect("semifree module");
        (module, layout)
    }
}

fn normalize(mut terms: Vec<(usize, Vector)>) -> FreeElement {
    terms.sort_by_key(|(g, _)| *g);
    let mut out: FreeElement = Vec::new();
    for (g, c) in terms {
        match out.last_mut() {
            Some((h, acc)) if *h == g => *acc = vector::add(acc, &c),
            _ => out.push((g, vector::normalize(c))),
        }
    }
    out.retain(|(_, c)| !c.is_empty());
    out
}

/// The `A`-linear map `a ⊗ g -> a ◁ values[g]`; fails unless it commutes
/// with differentials in the shared range.
pub fn morphism_from_free(f: &SemifreeModule, layout: &GenLayout, source: &Complex, target: &DgModule, values: &[Vector]) -> Result<ChainMap> {
    if values.len() != f.len() {
        return Err(Error::Input(format!("{} values for {} generators", values.len(), f.len())));
    }
    for (g, v) in f.generators().iter().zip(values) {
        if v.iter().any(|(i, _)| *i >= target.dim(g.degree)) {
            return Err(Error::Input(format!("value of a degree {} generator is out of range", g.degree)));
        }
        if g.boundary.is_empty() && !target.d(g.degree).mul_vec(v).is_empty() {
            return Err(Error::Input(format!("value of a sphere generator in degree {} is not a cycle", g.degree)));
        }
    }
    let map = ChainMap::from_fn(source, target.complex(), |l| {
        let rows = target.dim(l);
        if l < 0 || l > layout.top() {
            return Matrix::zeros(rows, source.dim(l));
        }
        let cols = (0..layout.dim(l))
            .map(|idx| {
                let (g, i) = layout.decode(l, idx);
                let gd = f.generators()[g].degree;
                match target.action(l - gd, i, gd) {
                    Some(m) if l <= target.top() => m.mul_vec(&values[g]),
                    _ => Vec::new(),
                }
            })
            .collect();
        Matrix::from_columns(rows, cols)
    });
    map.check(source, target.complex())
        .map_err(|_| Error::Input("generator values are not compatible with the differential".into()))?;
    Ok(map)
}

/// `(A ⊗ V) ⊗_A N` presented as `V ⊗ N`.
#[derive(Clone, Debug)]
pub struct FreeTensor {
    pub module: DgModule,
    pub layout: GenLayout,
}

/// Image of `g ⊗ x` under `α ⊗ id`, where `α(1 ⊗ g) = Σ c_h ⊗ h` has degree
/// `gd` and `x` lies in `N_k`:
/// `Σ (-1)^{|c_h||h|} h ⊗ (c_h ◁ x)`.
pub fn push_through(
    image: &FreeElement,
    tgt_degrees: &[i32],
    gd: i32,
    n: &DgModule,
    k: i32,
    x: &Vector,
    out_layout: &GenLayout,
) -> Vector {
    let mut out = Vec::new();
    let l = gd + k;
    for (h, c) in image {
        let hd = tgt_degrees[*h];
        let p = gd - hd;
        if hd + p + k > out_layout.top() || p + k > n.top() {
            continue;
        }
        let sign = Rational::sign((p * hd) as i64);
        let y = vector::scale(&n.act(p, c, k, x), &sign);
        out.extend(out_layout.place(l, *h, &y));
    }
    vector::normalize(out)
}

/// `V ⊗ N` with `d(g ⊗ n) = Σ (-1)^{|c_h||h|} h ⊗ (c_h ◁ n) + (-1)^{|g|} g ⊗ dn`
/// and `a ◁ (g ⊗ n) = (-1)^{|a||g|} g ⊗ (a ◁ n)`.
pub fn free_tensor(f: &SemifreeModule, n: &DgModule, window: Option<i32>) -> FreeTensor {
    let degs = f.degrees();
    let natural = degs.iter().map(|&g| g + n.top()).max().unwrap_or(0);
    let top = window.map_or(natural, |w| w.min(natural)).max(0);
    let layout = GenLayout::new(degs.clone(), n.complex().space().dims_from_zero(n.top()), top);
    let dims: Vec<usize> = (0..=top).map(|l| layout.dim(l)).collect();
    let diffs = (1..=top)
        .map(|l| {
            let cols = (0..layout.dim(l))
                .map(|idx| {
                    let (g, j) = layout.decode(l, idx);
                    let gd = degs[g];
                    let k = l - gd;
                    let x = vec![(j, Rational::one())];
                    let mut col = push_through(&f.generators()[g].boundary, &degs, gd - 1, n, k, &x, &layout);
                    if k >= 1 {
                        let dn = vector::scale(&n.d(k).mul_vec(&x), &Rational::sign(gd as i64));
                        col = vector::add(&col, &layout.place(l - 1, g, &dn));
                    }
                    col
                })
                .collect();
            Matrix::from_columns(layout.dim(l - 1), cols)
        })
        .collect();
    let cut = match window {
        Some(w) if w < natural => Some(w),
        _ => None,
    };
    let complex = Complex::from_parts_unchecked(0, dims, diffs).with_exact_to(min_bound(n.exact_to(), cut));
    let a = f.algebra().clone();
    let module = DgModule::from_fn(a, complex, |p, i, l| {
        if p + l > top {
            return Matrix::zeros(0, layout.dim(l));
        }
        let blocks = degs
            .iter()
            .enumerate()
            .filter_map(|(g, &gd)| {
                let k = l - gd;
                if k < 0 || k > n.top() || p + k > n.top() {
                    return None;
                }
                let m = n.action(p, i, k)?.scale(&Rational::sign((p * gd) as i64));
                Some((g, g, m))
            })
            .collect();
        Matrix::from_blocks(&layout.blocks(p + l), &layout.blocks(l), blocks)
    })
    .expect("free tensor");
    FreeTensor { module, layout }
}

/// `α ⊗ id_N : V ⊗ N -> W ⊗ N` for the `A`-linear map with
/// `α(1 ⊗ g) = images[g]`.
pub fn free_map_tensor(
    src: &FreeTensor,
    src_degrees: &[i32],
    tgt: &FreeTensor,
    tgt_degrees: &[i32],
    images: &[FreeElement],
    n: &DgModule,
) -> ChainMap {
    ChainMap::from_fn(src.module.complex(), tgt.module.complex(), |l| {
        let rows = tgt.module.dim(l);
        if l < 0 || l > src.layout.top() {
            return Matrix::zeros(rows, src.module.dim(l));
        }
        let cols = (0..src.layout.dim(l))
            .map(|idx| {
                let (g, j) = src.layout.decode(l, idx);
                let gd = src_degrees[g];
                if l > tgt.layout.top() {
                    return Vec::new();
                }
                push_through(&images[g], tgt_degrees, gd, n, l - gd, &vec![(j, Rational::one())], &tgt.layout)
            })
            .collect();
        Matrix::from_columns(rows, cols)
    })
}

/// `id_V ⊗ q : V ⊗ N -> V ⊗ N'` for a module map `q`.
pub fn free_tensor_with_map(src: &FreeTensor, tgt: &FreeTensor, degrees: &[i32], q: &ChainMap) -> ChainMap {
    ChainMap::from_fn(src.module.complex(), tgt.module.complex(), |l| {
        let rows = tgt.module.dim(l);
        if l < 0 || l > src.layout.top().min(tgt.layout.top()) {
            return Matrix::zeros(rows, src.module.dim(l));
        }
        let blocks = degrees
            .iter()
            .enumerate()
            .filter(|(_, &gd)| l - gd >= 0)
            .map(|(g, &gd)| {
                let k = l - gd;
                let shape = (tgt.layout.fiber_dim(k), src.layout.fiber_dim(k));
                let qk = q.component(k);
                let m = if qk.shape() == shape { qk.clone() } else { Matrix::zeros(shape.0, shape.1) };
                (g, g, m)
            })
            .collect();
        Matrix::from_blocks(&tgt.layout.blocks(l), &src.layout.blocks(l), blocks)
    })
}

/// Certify `V ⊗ N ≅ (A ⊗ V) ⊗_A N` via `g ⊗ n -> (1 ⊗ g) ⊗ n`.
pub fn cross_check_free_tensor(f: &SemifreeModule, n: &DgModule, window: Option<i32>) -> Result<IsoCertificate> {
    let fast = free_tensor(f, n, window);
    let (fm, fl) = f.to_module(window);
    let slow = tensor_over_algebra(&fm, n, window)?;
    let top = fast.layout.top().min(slow.layout.top());
    let unit = f.algebra().unit().clone();
    let map = ChainMap::from_fn(fast.module.complex(), slow.module.complex(), |l| {
        let rows = slow.module.dim(l);
        if l < 0 || l > top {
            return Matrix::zeros(rows, fast.module.dim(l));
        }
        let cols = (0..fast.layout.dim(l))
            .map(|idx| {
                let (g, j) = fast.layout.decode(l, idx);
                let gd = f.generators()[g].degree;
                if gd > fl.top() {
                    return Vec::new();
                }
                let one_g = fl.place(gd, g, &unit);
                slow.class(gd, &one_g, l - gd, &vec![(j, Rational::one())])
            })
            .collect();
        Matrix::from_columns(rows, cols)
    });
    DgModule::check_linear(&map, &fast.module, &slow.module)?;
    let src = fast.module.complex();
    let tgt = slow.module.complex();
    let dims_source: Vec<usize> = (0..=top).map(|l| src.dim(l)).collect();
    let dims_target: Vec<usize> = (0..=top).map(|l| tgt.dim(l)).collect();
    let bijective = dims_source == dims_target
        && (0..=top).all(|l| rank(map.component(l)) == src.dim(l))
        && map.check(src, tgt).is_ok();
    Ok(IsoCertificate { dims_source, dims_target, bijective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::homology;
    use crate::dg::examples;

    #[test]
    fn sphere_at_zero_is_the_algebra() {
        let a = examples::koszul_dual_numbers();
        let f = SemifreeModule::from_basis(a.clone(), &SphereBasis::spheres(&[0])).unwrap();
        let (m, _) = f.to_module(None);
        assert_eq!(m, DgModule::free_rank_one(&a));
        let empty = SemifreeModule::from_basis(a.clone(), &SphereBasis::default()).unwrap();
        assert!(empty.to_module(None).0.is_zero());
    }

    #[test]
    fn disks_are_acyclic() {
        let a = examples::koszul_dual_numbers();
        let mut basis = SphereBasis::default();
        basis.push(1, CellKind::Disk);
        basis.push(2, CellKind::Disk);
        let f = SemifreeModule::from_basis(a, &basis).unwrap();
        let (m, _) = f.to_module(None);
        m.validate().unwrap();
        assert!(homology(m.complex()).is_zero_to(m.top()));
    }

    #[test]
    fn periodic_resolution_of_residue_field() {
        let a = examples::dual_numbers();
        let mut f = SemifreeModule::new(a.clone());
        let eps = vec![(1, Rational::one())];
        let mut prev = f.attach(0, vec![]).unwrap();
        for n in 1..5 {
            prev = f.attach(n, vec![(prev, eps.clone())]).unwrap();
        }
        let (m, _) = f.to_module(None);
        m.validate().unwrap();
        assert_eq!(homology(m.complex()).dims(), vec![1, 0, 0, 0, 1]);
        let k = examples::residue_module(&a);
        let t = free_tensor(&f, &k, None);
        t.module.validate().unwrap();
        assert_eq!(homology(t.module.complex()).dims(), vec![1, 1, 1, 1, 1]);
        assert!(cross_check_free_tensor(&f, &k, None).unwrap().bijective);
    }

    #[test]
    fn attach_rejects_non_cycles() {
        let a = examples::dual_numbers();
        let mut f = SemifreeModule::new(a.clone());
        let g = f.attach(0, vec![]).unwrap();
        let h = f.attach(1, vec![(g, a.unit().clone())]).unwrap();
        assert!(f.attach(2, vec![(h, a.unit().clone())]).is_err());
    }

    #[test]
    fn morphism_values() {
        let a = examples::koszul_dual_numbers();
        let f = SemifreeModule::from_basis(a.clone(), &SphereBasis::spheres(&[0])).unwrap();
        let (fm, layout) = f.to_module(None);
        let target = DgModule::free_rank_one(&a);
        let id = morphism_from_free(&f, &layout, fm.complex(), &target, &[a.unit().clone()]).unwrap();
        assert_eq!(id, ChainMap::identity(target.complex()));
        let zero = morphism_from_free(&f, &layout, fm.complex(), &target, &[vec![]]).unwrap();
        assert!((0..=2).all(|n| zero.component(n).is_zero()));
        // y in degree 1 is not a cycle
        let s1 = SemifreeModule::from_basis(a.clone(), &SphereBasis::spheres(&[1])).unwrap();
        let (s1m, l1) = s1.to_module(None);
        assert!(morphism_from_free(&s1, &l1, s1m.complex(), &target, &[vec![(0, Rational::one())]]).is_err());
        let mut disk = SphereBasis::default();
        disk.push(1, CellKind::Disk);
        let d = SemifreeModule::from_basis(a.clone(), &disk).unwrap();
        let (dm, dl) = d.to_module(None);
        let y = vec![(0, Rational::one())];
        let x = a.d(1).mul_vec(&y);
        let map = morphism_from_free(&d, &dl, dm.complex(), &target, &[x, y]).unwrap();
        DgModule::check_linear(&map, &dm, &target).unwrap();
    }

    #[test]
    fn fast_tensor_agrees_over_koszul() {
        let a = examples::koszul_dual_numbers();
        let mut basis = SphereBasis::spheres(&[0, 1]);
        basis.push(2, CellKind::Disk);
        let f = SemifreeModule::from_basis(a.clone(), &basis).unwrap();
        for n in [examples::residue_module(&a), DgModule::free_rank_one(&a)] {
            assert!(cross_check_free_tensor(&f, &n, None).unwrap().bijective);
            assert!(cross_check_free_tensor(&f, &n, Some(2)).unwrap().bijective);
        }
    }
}
