use super::homology::{homology, HomologyData};
use super::{ChainMap, Complex};
use crate::error::{Error, Result};
use crate::linalg::{rank, vector, Matrix, Subspace, Vector};

fn bump(e: Option<i32>, by: i32) -> Option<i32> {
    e.map(|e| e + by)
}

/// `D[-1]`: degree `n` holds `D_{n+1}`, differential negated.
pub fn shift_down(c: &Complex) -> Complex {
    let diffs = c.differentials().iter().map(Matrix::neg).collect();
    Complex::from_parts_unchecked(c.min_degree() - 1, c.dims().to_vec(), diffs)
        .with_exact_to(bump(c.exact_to(), -1))
}

/// `ΣD`: degree `n` holds `D_{n-1}`, differential negated, nothing below 0.
pub fn suspension(c: &Complex) -> Complex {
    let mut dims = c.dims().to_vec();
    let mut diffs: Vec<Matrix> = c.differentials().iter().map(Matrix::neg).collect();
    let mut min = c.min_degree() + 1;
    while min > 0 {
        diffs.insert(0, Matrix::zeros(0, dims.first().copied().unwrap_or(0)));
        dims.insert(0, 0);
        min -= 1;
    }
    if min < 0 {
        let drop = (-min) as usize;
        assert!(dims[..drop].iter().all(|&d| d == 0), "suspension of a complex with negative support");
        dims.drain(..drop);
        diffs.drain(..drop);
    }
    Complex::from_parts_unchecked(0, dims, diffs).with_exact_to(bump(c.exact_to(), 1))
}

/// Good truncation together with its inclusion.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub complex: Complex,
    /// Inclusion into the untruncated complex.
    pub inclusion: ChainMap,
    /// Cycles of degree 0 in the untruncated complex.
    pub kernel: Subspace,
}

impl Truncation {
    /// Coordinates of a degree-0 cycle of the untruncated complex.
    pub fn coords0(&self, v: &Vector) -> Result<Vector> {
        self.kernel
            .coordinates(v)
            .ok_or_else(|| Error::Internal("vector is not a degree-0 cycle".into()))
    }

    /// Express a vector of the untruncated complex in truncated coordinates.
    pub fn coords(&self, n: i32, v: &Vector) -> Result<Vector> {
        if n == 0 {
            self.coords0(v)
        } else {
            Ok(v.clone())
        }
    }
}

/// Replace degree 0 by `ker d_0` and drop negative degrees.
pub fn truncate_geq0(c: &Complex) -> Truncation {
    if c.min_degree() >= 0 {
        return Truncation {
            complex: c.clone(),
            inclusion: ChainMap::identity(c),
            kernel: Subspace::full(c.dim(0)),
        };
    }
    assert_eq!(c.min_degree(), -1, "truncation supports a single negative degree");
    let kernel = Subspace::kernel(&c.padded_d(0));
    let mut dims = vec![kernel.dim()];
    dims.extend((1..=c.top()).map(|n| c.dim(n)));
    let mut diffs = Vec::new();
    for n in 1..=c.top() {
        if n == 1 {
            let cols = c
                .d(1)
                .columns()
                .iter()
                .map(|col| kernel.coordinates_unchecked(col))
                .collect();
            diffs.push(Matrix::from_columns(kernel.dim(), cols));
        } else {
            diffs.push(c.d(n).clone());
        }
    }
    let complex = Complex::from_parts_unchecked(0, dims, diffs).with_exact_to(c.exact_to());
    let basis = kernel.basis_matrix();
    let inclusion = ChainMap::from_fn(&complex, c, |n| match n {
        -1 => Matrix::zeros(c.dim(-1), 0),
        0 => basis.clone(),
        _ => Matrix::identity(c.dim(n)),
    });
    Truncation { complex, inclusion, kernel }
}

/// Chain map between truncations induced by degreewise maps `f` of the
/// untruncated complexes.
fn truncated_map(src: &Truncation, tgt: &Truncation, f: impl Fn(i32) -> Matrix) -> Result<ChainMap> {
    let f0 = f(0).mul(&src.kernel.basis_matrix());
    let mut cols = Vec::with_capacity(f0.cols());
    for col in f0.columns() {
        cols.push(tgt.coords0(col)?);
    }
    let c0 = Matrix::from_columns(tgt.kernel.dim(), cols);
    Ok(ChainMap::from_fn(&src.complex, &tgt.complex, |n| if n == 0 { c0.clone() } else { f(n) }))
}

fn first_projection(a: usize, b: usize) -> Matrix {
    Matrix::from_blocks(&[a], &[a, b], vec![(0, 0, Matrix::identity(a))])
}

/// Based path object with its projection onto `d`.
///
/// Degree `n` is `D_n + D_{n+1}` with `d(x, y) = (dx, -x - dy)`, good-truncated.
pub fn path0(d: &Complex) -> (Truncation, ChainMap) {
    assert!(d.min_degree() >= 0);
    let top = d.top();
    let part = |n: i32| (d.dim(n), d.dim(n + 1));
    let dims: Vec<usize> = (-1..=top).map(|n| d.dim(n) + d.dim(n + 1)).collect();
    let diffs = (0..=top)
        .map(|n| {
            let (a, b) = part(n);
            let (a1, b1) = part(n - 1);
            let mut blocks = vec![(1, 0, Matrix::identity(a).neg()), (1, 1, d.padded_d(n + 1).neg())];
            if a1 > 0 {
                blocks.push((0, 0, d.padded_d(n)));
            }
            Matrix::from_blocks(&[a1, b1], &[a, b], blocks)
        })
        .collect();
    let unbounded =
        Complex::from_parts_unchecked(-1, dims, diffs).with_exact_to(bump(d.exact_to(), -1));
    let t = truncate_geq0(&unbounded);
    let src = Truncation { complex: d.clone(), inclusion: ChainMap::identity(d), kernel: Subspace::full(d.dim(0)) };
    let proj = truncated_map(&t, &src, |n| {
        let (a, b) = part(n);
        first_projection(a, b)
    })
    .expect("projection of a path cycle");
    (t, proj)
}

/// Mapping fiber of `f: B -> D` with its structure maps.
#[derive(Clone, Debug)]
pub struct FiberData {
    pub source: Complex,
    pub target: Complex,
    pub map: ChainMap,
    /// `K_f`, degree `n` being `B_n + D_{n+1}` (degree 0 truncated).
    pub fiber: Complex,
    pub fiber_truncation: Truncation,
    /// `π_f : K_f -> B`.
    pub pi: ChainMap,
    pub path: Truncation,
    pub path_projection: ChainMap,
    /// `p_f : K_f -> Path_0 D`, `(b, y) -> (f b, y)`.
    pub to_path: ChainMap,
    /// `ΩD`, the truncated down-shift of `D`.
    pub omega: Truncation,
    /// `δ_f : ΩD -> K_f`, `y -> (0, y)`.
    pub delta: ChainMap,
}

pub fn mapping_fiber(f: &ChainMap, b: &Complex, d: &Complex) -> Result<FiberData> {
    f.check(b, d)?;
    if b.min_degree() < 0 || d.min_degree() < 0 {
        return Err(Error::Input("mapping fiber needs non-negatively graded complexes".into()));
    }
    let top = b.top().max(d.top() - 1);
    let part = |n: i32| (b.dim(n), d.dim(n + 1));
    let dims: Vec<usize> = (-1..=top).map(|n| b.dim(n) + d.dim(n + 1)).collect();
    let fcomp = |n: i32| {
        let m = f.component(n);
        if m.shape() == (d.dim(n), b.dim(n)) {
            m.clone()
        } else {
            Matrix::zeros(d.dim(n), b.dim(n))
        }
    };
    let diffs = (0..=top)
        .map(|n| {
            let (a, y) = part(n);
            let (a1, y1) = part(n - 1);
            let mut blocks = vec![(1, 0, fcomp(n).neg()), (1, 1, d.padded_d(n + 1).neg())];
            if a1 > 0 {
                blocks.push((0, 0, b.padded_d(n)));
            }
            Matrix::from_blocks(&[a1, y1], &[a, y], blocks)
        })
        .collect();
    let exact = super::min_bound(b.exact_to(), bump(d.exact_to(), -1));
    let unbounded = Complex::from_parts_unchecked(-1, dims, diffs).with_exact_to(exact);
    let kt = truncate_geq0(&unbounded);
    let plain = |c: &Complex| Truncation {
        complex: c.clone(),
        inclusion: ChainMap::identity(c),
        kernel: Subspace::full(c.dim(0)),
    };
    let pi = truncated_map(&kt, &plain(b), |n| {
        let (a, y) = part(n);
        first_projection(a, y)
    })?;
    let (path, path_projection) = path0(d);
    let to_path = truncated_map(&kt, &path, |n| {
        let (a, y) = part(n);
        Matrix::from_blocks(&[d.dim(n), y], &[a, y], vec![(0, 0, fcomp(n)), (1, 1, Matrix::identity(y))])
    })?;
    let omega = truncate_geq0(&shift_down(d));
    let delta = truncated_map(&omega, &kt, |n| {
        let (a, y) = part(n);
        Matrix::from_blocks(&[a, y], &[y], vec![(1, 0, Matrix::identity(y))])
    })?;
    Ok(FiberData {
        source: b.clone(),
        target: d.clone(),
        map: f.clone(),
        fiber: kt.complex.clone(),
        fiber_truncation: kt,
        pi,
        path,
        path_projection,
        to_path,
        omega,
        delta,
    })
}

/// A node `H_n(K_f)`, `H_n(B)` or `H_n(D)` of the long exact sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LesNode {
    Fiber(i32),
    Source(i32),
    Target(i32),
}

#[derive(Clone, Debug)]
pub struct LongExactSequence {
    /// Nodes in the order of the sequence, from high degree down to `H_0(D)`.
    pub nodes: Vec<(LesNode, usize)>,
    /// `maps[i]` goes from `nodes[i]` to `nodes[i + 1]`.
    pub maps: Vec<Matrix>,
    /// Highest degree `n` with `H_n(K_f)` in the sequence.
    pub certified_to: i32,
}

impl LongExactSequence {
    /// Exactness at every interior node: composites vanish and ranks add up.
    pub fn check_exact(&self) -> Result<()> {
        for i in 1..self.nodes.len().saturating_sub(1) {
            let (a, b) = (&self.maps[i - 1], &self.maps[i]);
            if !b.mul(a).is_zero() {
                return Err(Error::Internal(format!("composite through {:?} is nonzero", self.nodes[i].0)));
            }
            if rank(a) + rank(b) != self.nodes[i].1 {
                return Err(Error::Internal(format!("sequence not exact at {:?}", self.nodes[i].0)));
            }
        }
        Ok(())
    }
}

/// `... -> H_{n+1}(D) -> H_n(K_f) -> H_n(B) -> H_n(D) -> ... -> H_0(D)`,
/// certified exact at every interior node.
pub fn long_exact_sequence(fib: &FiberData) -> Result<LongExactSequence> {
    let hk = homology(&fib.fiber);
    let hb = homology(&fib.source);
    let hd = homology(&fib.target);
    // a genuinely bounded complex has known (zero) homology above its top
    let known = |h: &HomologyData, c: &Complex| if c.exact_to().is_none() { i32::MAX - 1 } else { h.certified_to() };
    let reach = fib.fiber.top().max(fib.source.top()).max(fib.target.top() - 1);
    let top = known(&hk, &fib.fiber).min(known(&hb, &fib.source)).min(known(&hd, &fib.target) - 1).min(reach);
    let pi = super::induced_map(&fib.pi, &hk, &hb)?;
    let fstar = super::induced_map(&fib.map, &hb, &hd)?;
    let mut nodes = Vec::new();
    let mut maps = Vec::new();
    if top >= 0 {
        nodes.push((LesNode::Target(top + 1), hd.dim(top + 1)));
    }
    for n in (0..=top).rev() {
        maps.push(connecting(fib, &hd, &hk, n + 1)?);
        nodes.push((LesNode::Fiber(n), hk.dim(n)));
        maps.push(pi.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(hb.dim(n), hk.dim(n))));
        nodes.push((LesNode::Source(n), hb.dim(n)));
        maps.push(fstar.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(hd.dim(n), hb.dim(n))));
        nodes.push((LesNode::Target(n), hd.dim(n)));
    }
    let les = LongExactSequence { nodes, maps, certified_to: top };
    les.check_exact()?;
    Ok(les)
}

/// `H_n(D) -> H_{n-1}(K_f)`, `[y] -> [(0, y)]`.
fn connecting(fib: &FiberData, hd: &HomologyData, hk: &HomologyData, n: i32) -> Result<Matrix> {
    let offset = fib.source.dim(n - 1);
    let mut cols = Vec::with_capacity(hd.dim(n));
    for t in 0..hd.dim(n) {
        let v = vector::offset(&hd.representative(n, t), offset);
        let v = fib.fiber_truncation.coords(n - 1, &v)?;
        cols.push(hk.class_of(n - 1, &v)?);
    }
    Ok(Matrix::from_columns(hk.dim(n - 1), cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::homology;

    #[test]
    fn shifts() {
        let s1 = Complex::sphere(1);
        let t = truncate_geq0(&shift_down(&s1));
        assert_eq!(t.complex, Complex::sphere(0));
        assert!(homology(&truncate_geq0(&shift_down(&Complex::sphere(0))).complex).is_zero_to(0));
        let d1 = shift_down(&Complex::disk(1));
        assert_eq!(d1.min_degree(), -1);
        assert_eq!(d1.d(0), &Matrix::identity(1).neg());
        assert_eq!(truncate_geq0(&d1).complex.dims(), &[0]);
        assert_eq!(suspension(&Complex::sphere(0)), Complex::sphere(1));
    }

    #[test]
    fn suspension_right_inverse() {
        let c = Complex::new(0, vec![2, 3, 1], vec![
            Matrix::from_ints(&[&[1, 0, 1], &[0, 0, 0]]),
            Matrix::from_ints(&[&[1], &[0], &[-1]]),
        ])
        .unwrap();
        assert_eq!(truncate_geq0(&shift_down(&suspension(&c))).complex, c);
    }

    #[test]
    fn path_objects_are_acyclic() {
        for c in [Complex::zero(), Complex::sphere(0), Complex::disk(1), Complex::sphere(2)] {
            let (p, proj) = path0(&c);
            p.complex.check_d_squared().unwrap();
            assert!(homology(&p.complex).is_zero_to(p.complex.top()));
            proj.check(&p.complex, &c).unwrap();
            assert!(proj.is_fibration(&p.complex, &c));
        }
    }

    #[test]
    fn fiber_of_identity_is_acyclic() {
        let c = Complex::disk(2).direct_sum(&Complex::sphere(1));
        let fib = mapping_fiber(&ChainMap::identity(&c), &c, &c).unwrap();
        assert!(homology(&fib.fiber).is_zero_to(fib.fiber.top()));
        long_exact_sequence(&fib).unwrap();
    }

    #[test]
    fn fiber_of_zero_map_splits() {
        let b = Complex::sphere(1);
        let d = Complex::sphere(2);
        let fib = mapping_fiber(&ChainMap::zero(&b, &d), &b, &d).unwrap();
        assert_eq!(homology(&fib.fiber).dims(), vec![0, 2]);
        let les = long_exact_sequence(&fib).unwrap();
        assert_eq!(les.maps[0].shape(), (2, 1));
        assert_eq!(crate::linalg::rank(&les.maps[0]), 1);
    }

    #[test]
    fn fiber_into_contractible_target() {
        let b = Complex::disk(1);
        let f = ChainMap::new(&Complex::sphere(0), &b, vec![Matrix::identity(1)]).unwrap();
        let fib = mapping_fiber(&f, &Complex::sphere(0), &b).unwrap();
        assert_eq!(homology(&fib.fiber).dims(), vec![1]);
        long_exact_sequence(&fib).unwrap();
    }
}
