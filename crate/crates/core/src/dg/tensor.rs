//! Tensor products over the ground field and over a DG algebra.
//!
//! Basis of `(M ⊗ N)_l`: blocks `M_r ⊗ N_{l-r}` for `r` ascending, and inside
//! a block the pair `(i, j)` sits at `i * dim N_{l-r} + j`. The differential
//! is `d(m ⊗ n) = dm ⊗ n + (-1)^{|m|} m ⊗ dn`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::algebra::DgAlgebra;
use super::module::DgModule;
use crate::complex::{homology, min_bound, ChainMap, Complex};
use crate::error::{Error, Result};
use crate::linalg::{rank, Matrix, Quotient, Rational, Subspace, Vector};

/// Index bookkeeping for `M ⊗ N` truncated at `top`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorLayout {
    left: Vec<usize>,
    right: Vec<usize>,
    top: i32,
    offsets: Vec<Vec<usize>>,
}

impl TensorLayout {
    pub fn new(left: Vec<usize>, right: Vec<usize>, top: i32) -> Self {
        let dl = |r: i32| left.get(r as usize).copied().unwrap_or(0);
        let dr = |s: i32| if s < 0 { 0 } else { right.get(s as usize).copied().unwrap_or(0) };
        let offsets = (0..=top)
            .map(|l| {
                let mut acc = 0;
                (0..=l + 1)
                    .map(|r| {
                        let o = acc;
                        if r <= l {
                            acc += dl(r) * dr(l - r);
                        }
                        o
                    })
                    .collect()
            })
            .collect();
        TensorLayout { left, right, top, offsets }
    }

    pub fn top(&self) -> i32 {
        self.top
    }

    pub fn left_dim(&self, r: i32) -> usize {
        if r < 0 {
            0
        } else {
            self.left.get(r as usize).copied().unwrap_or(0)
        }
    }

    pub fn right_dim(&self, s: i32) -> usize {
        if s < 0 {
            0
        } else {
            self.right.get(s as usize).copied().unwrap_or(0)
        }
    }

    pub fn dim(&self, l: i32) -> usize {
        if l < 0 || l > self.top {
            0
        } else {
            *self.offsets[l as usize].last().expect("offsets")
        }
    }

    /// Start of block `M_r ⊗ N_{l-r}` inside degree `l`.
    pub fn offset(&self, l: i32, r: i32) -> usize {
        self.offsets[l as usize][r as usize]
    }

    pub fn index(&self, r: i32, i: usize, s: i32, j: usize) -> usize {
        self.offset(r + s, r) + i * self.right_dim(s) + j
    }

    /// `(r, i, s, j)` for a basis index of degree `l`.
    pub fn decode(&self, l: i32, idx: usize) -> (i32, usize, i32, usize) {
        let offs = &self.offsets[l as usize];
        let r = offs.partition_point(|&o| o <= idx) as i32 - 1;
        let s = l - r;
        let within = idx - offs[r as usize];
        let w = self.right_dim(s);
        (r, within / w, s, within % w)
    }

    /// `x ⊗ y` for `x` in `M_r`, `y` in `N_s`.
    pub fn elem(&self, r: i32, x: &Vector, s: i32, y: &Vector) -> Vector {
        let base = self.offset(r + s, r);
        let w = self.right_dim(s);
        let mut out = Vec::with_capacity(x.len() * y.len());
        for (i, a) in x {
            for (j, b) in y {
                out.push((base + i * w + j, a * b));
            }
        }
        out
    }

    /// Block sizes of degree `l`, indexed by `r`.
    pub fn blocks(&self, l: i32) -> Vec<usize> {
        (0..=l).map(|r| self.left_dim(r) * self.right_dim(l - r)).collect()
    }
}

fn cap(top_sum: i32, window: Option<i32>) -> i32 {
    match window {
        Some(w) => w.min(top_sum),
        None => top_sum,
    }
}

/// Validity bound of a tensor of objects with bounds `a`, `b`, cut at `window`.
fn tensor_bound(a: Option<i32>, b: Option<i32>, top_sum: i32, window: Option<i32>) -> Option<i32> {
    let cut = match window {
        Some(w) if w < top_sum => Some(w),
        _ => None,
    };
    min_bound(min_bound(a, b), cut)
}

/// `M ⊗ N` over the ground field, degrees up to `window`.
pub fn tensor_complexes(m: &Complex, n: &Complex, window: Option<i32>) -> (Complex, TensorLayout) {
    assert!(m.min_degree() >= 0 && n.min_degree() >= 0);
    let top = cap(m.top() + n.top(), window).max(0);
    let layout = TensorLayout::new(m.space().dims_from_zero(m.top()), n.space().dims_from_zero(n.top()), top);
    let dims: Vec<usize> = (0..=top).map(|l| layout.dim(l)).collect();
    let diffs = (1..=top)
        .map(|l| {
            let mut blocks = Vec::new();
            for r in 0..=l {
                let s = l - r;
                let (dm_r, dn_s) = (layout.left_dim(r), layout.right_dim(s));
                if dm_r * dn_s == 0 {
                    continue;
                }
                if r >= 1 {
                    blocks.push((r as usize - 1, r as usize, m.padded_d(r).kron(&Matrix::identity(dn_s))));
                }
                if s >= 1 {
                    let id = Matrix::identity(dm_r).scale(&Rational::sign(r as i64));
                    blocks.push((r as usize, r as usize, id.kron(&n.padded_d(s))));
                }
            }
            Matrix::from_blocks(&layout.blocks(l - 1), &layout.blocks(l), blocks)
        })
        .collect();
    let bound = tensor_bound(m.exact_to(), n.exact_to(), m.top() + n.top(), window);
    (Complex::from_parts_unchecked(0, dims, diffs).with_exact_to(bound), layout)
}

/// `M ⊗_A N` with the data needed to move between it and `M ⊗ N`.
#[derive(Clone, Debug)]
pub struct TensorProduct {
    pub module: DgModule,
    /// `M ⊗ N` over the ground field.
    pub tensor: Complex,
    pub layout: TensorLayout,
    pub quotients: Vec<Quotient>,
}

impl TensorProduct {
    /// Class of an element of `(M ⊗ N)_l`.
    pub fn project(&self, l: i32, v: &Vector) -> Vector {
        if l < 0 || l > self.layout.top() {
            return Vec::new();
        }
        self.quotients[l as usize].project(v)
    }

    /// Class of `x ⊗ y`.
    pub fn class(&self, r: i32, x: &Vector, s: i32, y: &Vector) -> Vector {
        if r + s > self.layout.top() {
            return Vec::new();
        }
        self.project(r + s, &self.layout.elem(r, x, s, y))
    }

    /// Lift of a basis vector of degree `l` to `(M ⊗ N)_l`.
    pub fn section(&self, l: i32, t: usize) -> Vector {
        self.quotients[l as usize].lift(&vec![(t, Rational::one())])
    }
}

/// `M ⊗_A N`: the quotient of `M ⊗ N` by `(a◁m) ⊗ n - (-1)^{|a||m|} m ⊗ (a◁n)`,
/// with left action `a ◁ (m ⊗ n) = (a◁m) ⊗ n`.
pub fn tensor_over_algebra(m: &DgModule, n: &DgModule, window: Option<i32>) -> Result<TensorProduct> {
    if !Arc::ptr_eq(m.algebra(), n.algebra()) && m.algebra() != n.algebra() {
        return Err(Error::Input("modules over different algebras".into()));
    }
    let a = m.algebra().clone();
    let (tensor, layout) = tensor_complexes(m.complex(), n.complex(), window);
    let top = layout.top();
    let mut quotients = Vec::with_capacity((top + 1) as usize);
    for l in 0..=top {
        let mut rels: Vec<Vector> = Vec::new();
        for p in 0..=a.top().min(l) {
            for i in 0..a.dim(p) {
                if p == 0 && a.unit() == &vec![(i, Rational::one())] {
                    continue;
                }
                for r in 0..=(l - p) {
                    let s = l - p - r;
                    let (dr, ds) = (layout.left_dim(r), layout.right_dim(s));
                    if dr == 0 || ds == 0 {
                        continue;
                    }
                    let sign = Rational::sign((p * r) as i64);
                    let am = m.action(p, i, r);
                    let an = n.action(p, i, s);
                    for x in 0..dr {
                        let ax: Vector = am.map(|mat| mat.column(x).clone()).unwrap_or_default();
                        for y in 0..ds {
                            let ay: Vector = an.map(|mat| mat.column(y).clone()).unwrap_or_default();
                            let t1 = if ax.is_empty() { Vec::new() } else { layout.elem(p + r, &ax, s, &unit(y)) };
                            let t2 = if ay.is_empty() { Vec::new() } else { layout.elem(r, &unit(x), p + s, &ay) };
                            let rel = crate::linalg::vector::axpy(&t1, &-sign.clone(), &t2);
                            if !rel.is_empty() {
                                rels.push(rel);
                            }
                        }
                    }
                }
            }
        }
        quotients.push(Quotient::new(Subspace::span(layout.dim(l), &rels)));
    }
    let proj: Vec<Matrix> = quotients.iter().map(Quotient::projection_matrix).collect();
    let sect: Vec<Matrix> = quotients.iter().map(Quotient::section_matrix).collect();
    let dims: Vec<usize> = quotients.iter().map(Quotient::dim).collect();
    let diffs = (1..=top).map(|l| proj[(l - 1) as usize].mul(tensor.d(l)).mul(&sect[l as usize])).collect();
    let complex = Complex::from_parts_unchecked(0, dims, diffs).with_exact_to(tensor.exact_to());
    let module = DgModule::from_fn(a.clone(), complex.clone(), |p, i, l| {
        if p + l > top {
            return Matrix::zeros(0, complex.dim(l));
        }
        let mut blocks = Vec::new();
        for r in 0..=l {
            let s = l - r;
            let ds = layout.right_dim(s);
            if layout.left_dim(r) * ds == 0 || p + r > m.top() {
                continue;
            }
            if let Some(am) = m.action(p, i, r) {
                blocks.push((r as usize + p as usize, r as usize, am.kron(&Matrix::identity(ds))));
            }
        }
        let full = Matrix::from_blocks(&layout.blocks(p + l), &layout.blocks(l), blocks);
        proj[(p + l) as usize].mul(&full).mul(&sect[l as usize])
    })?;
    Ok(TensorProduct { module, tensor, layout, quotients })
}

fn unit(i: usize) -> Vector {
    vec![(i, Rational::one())]
}

/// Certificate that a chain map is an isomorphism in degrees `<= top`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoCertificate {
    pub dims_source: Vec<usize>,
    pub dims_target: Vec<usize>,
    pub bijective: bool,
}

fn certify_iso(f: &ChainMap, src: &Complex, tgt: &Complex, top: i32) -> IsoCertificate {
    let dims_source: Vec<usize> = (0..=top).map(|n| src.dim(n)).collect();
    let dims_target: Vec<usize> = (0..=top).map(|n| tgt.dim(n)).collect();
    let bijective = dims_source == dims_target
        && (0..=top).all(|n| rank(f.component(n)) == src.dim(n))
        && f.check(src, tgt).is_ok();
    IsoCertificate { dims_source, dims_target, bijective }
}

/// `M ⊗_A N ≅ N ⊗_A M`, `m ⊗ n -> (-1)^{|m||n|} n ⊗ m`, certified as an
/// isomorphism of DG modules.
pub fn koszul_symmetry(m: &DgModule, n: &DgModule, window: Option<i32>) -> Result<IsoCertificate> {
    let mn = tensor_over_algebra(m, n, window)?;
    let nm = tensor_over_algebra(n, m, window)?;
    let top = mn.layout.top();
    let f = ChainMap::from_fn(mn.module.complex(), nm.module.complex(), |l| {
        if l < 0 || l > top {
            return Matrix::zeros(nm.module.dim(l), mn.module.dim(l));
        }
        let cols = (0..mn.module.dim(l))
            .map(|t| {
                let v = mn.section(l, t);
                let mut acc = Vec::new();
                for (idx, c) in &v {
                    let (r, i, s, j) = mn.layout.decode(l, *idx);
                    let sign = Rational::sign((r * s) as i64);
                    let w = nm.layout.elem(s, &unit(j), r, &unit(i));
                    acc = crate::linalg::vector::axpy(&acc, &(c * &sign), &w);
                }
                nm.project(l, &acc)
            })
            .collect();
        Matrix::from_columns(nm.module.dim(l), cols)
    });
    DgModule::check_linear(&f, &mn.module, &nm.module)?;
    Ok(certify_iso(&f, mn.module.complex(), nm.module.complex(), top))
}

/// `M ⊗ A` with the action `a ◁ (m ⊗ b) = (-1)^{|a||m|} m ⊗ ab`.
pub fn extend_scalars(m: &Complex, a: &Arc<DgAlgebra>, window: Option<i32>) -> Result<(DgModule, TensorLayout)> {
    let (c, layout) = tensor_complexes(m, a.complex(), window);
    let top = layout.top();
    let module = DgModule::from_fn(a.clone(), c.clone(), |p, i, l| {
        if p + l > top {
            return Matrix::zeros(0, c.dim(l));
        }
        let mut blocks = Vec::new();
        for r in 0..=l {
            let q = l - r;
            if layout.left_dim(r) * layout.right_dim(q) == 0 || p + q > a.top() {
                continue;
            }
            let la = a.left(p, i, q).expect("in range");
            let id = Matrix::identity(layout.left_dim(r)).scale(&Rational::sign((p * r) as i64));
            blocks.push((r as usize, r as usize, id.kron(la)));
        }
        Matrix::from_blocks(&layout.blocks(p + l), &layout.blocks(l), blocks)
    })?;
    Ok((module, layout))
}

/// `(M ⊗ A) ⊗_A N ≅ M ⊗ N` via `m ⊗ n -> (m ⊗ 1) ⊗ n`.
pub fn check_prop_tri(m: &Complex, n: &DgModule, window: Option<i32>) -> Result<IsoCertificate> {
    let a = n.algebra().clone();
    let (ma, ma_layout) = extend_scalars(m, &a, window)?;
    let lhs = tensor_over_algebra(&ma, n, window)?;
    let (rhs, rhs_layout) = tensor_complexes(m, n.complex(), window);
    let top = rhs_layout.top().min(lhs.layout.top());
    let one = a.unit().clone();
    let f = ChainMap::from_fn(&rhs, lhs.module.complex(), |l| {
        if l < 0 || l > top {
            return Matrix::zeros(lhs.module.dim(l), rhs.dim(l));
        }
        let cols = (0..rhs.dim(l))
            .map(|idx| {
                let (r, i, s, j) = rhs_layout.decode(l, idx);
                let m1 = ma_layout.elem(r, &unit(i), 0, &one);
                lhs.class(r, &m1, s, &unit(j))
            })
            .collect();
        Matrix::from_columns(lhs.module.dim(l), cols)
    });
    Ok(certify_iso(&f, &rhs, lhs.module.complex(), top))
}

/// `S ⊗ H(N) ≅ H(S ⊗ N)` for `S` with zero differential, via
/// `s ⊗ [n] -> [s ⊗ n]`; checked in every certified degree.
pub fn check_kunneth(s: &Complex, n: &Complex, window: Option<i32>) -> Result<IsoCertificate> {
    if !s.differentials().iter().all(Matrix::is_zero) {
        return Err(Error::Input("first factor must have zero differential".into()));
    }
    let hn = homology(n);
    let (sn, layout) = tensor_complexes(s, n, window);
    let hsn = homology(&sn);
    let top = hsn.certified_to();
    let mut dims_source = Vec::new();
    let mut dims_target = Vec::new();
    let mut bijective = true;
    for l in 0..=top {
        let mut cols = Vec::new();
        for r in 0..=l {
            let q = l - r;
            for i in 0..s.dim(r) {
                for t in 0..hn.dim(q) {
                    let v = layout.elem(r, &unit(i), q, &hn.representative(q, t));
                    cols.push(hsn.class_of(l, &v)?);
                }
            }
        }
        dims_source.push(cols.len());
        dims_target.push(hsn.dim(l));
        let mat = Matrix::from_columns(hsn.dim(l), cols);
        bijective &= mat.rows() == mat.cols() && rank(&mat) == mat.rows();
    }
    Ok(IsoCertificate { dims_source, dims_target, bijective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::homology;
    use crate::dg::examples;

    #[test]
    fn spheres_multiply() {
        let (c, _) = tensor_complexes(&Complex::sphere(1), &Complex::sphere(2), None);
        assert_eq!(homology(&c).dims(), vec![0, 0, 0, 1]);
        let (c, _) = tensor_complexes(&Complex::disk(1), &Complex::sphere(1), None);
        c.check_d_squared().unwrap();
        assert!(homology(&c).is_zero_to(c.top()));
    }

    #[test]
    fn decode_inverts_index() {
        let l = TensorLayout::new(vec![1, 2, 1], vec![2, 1], 3);
        for deg in 0..=3 {
            for idx in 0..l.dim(deg) {
                let (r, i, s, j) = l.decode(deg, idx);
                assert_eq!(l.index(r, i, s, j), idx);
            }
        }
    }

    #[test]
    fn residue_over_dual_numbers() {
        let a = examples::dual_numbers();
        let k = examples::residue_module(&a);
        let t = tensor_over_algebra(&k, &k, None).unwrap();
        assert_eq!(t.module.complex().dims(), &[1]);
    }

    #[test]
    fn unit_relation() {
        let a = examples::koszul_dual_numbers();
        let free = DgModule::free_rank_one(&a);
        let k = examples::residue_module(&a);
        let t = tensor_over_algebra(&free, &k, None).unwrap();
        assert_eq!(t.module.complex().dim(0), 1);
        assert_eq!(t.module.complex().space().total_dim(), 1);
        t.module.validate().unwrap();
    }

    #[test]
    fn symmetry_and_tri() {
        let a = examples::koszul_dual_numbers();
        let free = DgModule::free_rank_one(&a);
        let k = examples::residue_module(&a);
        assert!(koszul_symmetry(&free, &k, None).unwrap().bijective);
        assert!(koszul_symmetry(&free, &free, None).unwrap().bijective);
        let m = Complex::disk(1).direct_sum(&Complex::sphere(0));
        assert!(check_prop_tri(&m, &k, None).unwrap().bijective);
        assert!(check_prop_tri(&Complex::sphere(0), &free, None).unwrap().bijective);
    }

    #[test]
    fn kunneth_for_spheres() {
        let s = Complex::sphere(1).direct_sum(&Complex::sphere(0));
        let n = Complex::disk(2).direct_sum(&Complex::sphere(1));
        assert!(check_kunneth(&s, &n, None).unwrap().bijective);
    }
}
