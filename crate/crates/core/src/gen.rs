//! Seeded random algebras, modules, maps and grids for fuzzing.
//!
//! Algebras are graded-commutative monomial algebras
//! `k[x]/(x^a) ⊗ Λ(y_1) ⊗ k[z]/(z²) ⊗ Λ(y_3)` (subscripts are degrees) with
//! `dy_1 = λ x^j`, `dy_3 = μ x^i z`, put through a random change of basis.

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{ChainMap, Complex};
use crate::dg::{examples, DgAlgebra, DgModule, SemifreeModule};
use crate::linalg::{kernel_basis, solve_many, vector, Matrix, Rational, Subspace, Vector};
use crate::spectral::DoubleComplex;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero small rational.
pub fn unit_scalar(rng: &mut impl Rng) -> Rational {
    let n = *[-3i64, -2, -1, 1, 1, 2, 3].choose(rng).unwrap();
    if rng.random_bool(0.15) {
        Rational::new(n, 2)
    } else {
        Rational::from_int(n)
    }
}

/// Small rational, zero about a third of the time.
pub fn scalar(rng: &mut impl Rng) -> Rational {
    if rng.random_bool(0.35) {
        Rational::zero()
    } else {
        unit_scalar(rng)
    }
}

pub fn random_vector(rng: &mut impl Rng, len: usize) -> Vector {
    vector::from_dense(&(0..len).map(|_| scalar(rng)).collect::<Vec<_>>())
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_columns(rows, (0..cols).map(|_| random_vector(rng, rows)).collect())
}

/// Random element of a subspace.
pub fn random_member(rng: &mut impl Rng, s: &Subspace) -> Vector {
    let mut acc = Vec::new();
    for b in s.basis() {
        acc = vector::axpy(&acc, &scalar(rng), b);
    }
    acc
}

/// Invertible matrix `L U` with `L` unitriangular and `U` upper triangular;
/// with `fix_first` the first basis vector and the span of the others are kept.
pub fn random_invertible(rng: &mut impl Rng, n: usize, fix_first: bool) -> Matrix {
    let start = usize::from(fix_first && n > 0);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for c in 0..n {
        for r in 0..n {
            if c < start || r < start {
                if r == c {
                    lower.push((r, c, Rational::one()));
                    upper.push((r, c, Rational::one()));
                }
                continue;
            }
            match r.cmp(&c) {
                std::cmp::Ordering::Equal => {
                    lower.push((r, c, Rational::one()));
                    upper.push((r, c, unit_scalar(rng)));
                }
                std::cmp::Ordering::Greater => lower.push((r, c, scalar(rng))),
                std::cmp::Ordering::Less => upper.push((r, c, scalar(rng))),
            }
        }
    }
    let keep = |t: Vec<(usize, usize, Rational)>| t.into_iter().filter(|(_, _, v)| !v.is_zero()).collect::<Vec<_>>();
    Matrix::from_triplets(n, n, keep(lower)).mul(&Matrix::from_triplets(n, n, keep(upper)))
}

pub fn inverse(m: &Matrix) -> Matrix {
    solve_many(m, &Matrix::identity(m.rows())).expect("invertible matrix")
}

/// Size limits for generated algebras.
#[derive(Clone, Copy, Debug)]
pub struct AlgebraShape {
    pub max_dim: usize,
    pub max_top: i32,
}

impl Default for AlgebraShape {
    fn default() -> Self {
        AlgebraShape { max_dim: 3, max_top: 3 }
    }
}

type Mono = Vec<u8>;

struct MonoAlgebra {
    degrees: Vec<i32>,
    orders: Vec<u8>,
    /// `d` of each generator as a polynomial.
    diff: Vec<Vec<(Mono, Rational)>>,
    basis: Vec<Vec<Mono>>,
}

impl MonoAlgebra {
    fn degree(&self, m: &Mono) -> i32 {
        m.iter().zip(&self.degrees).map(|(&e, &d)| e as i32 * d).sum()
    }

    fn mul(&self, a: &Mono, b: &Mono) -> Option<(Mono, Rational)> {
        let mut out = Vec::with_capacity(a.len());
        let mut sign = 0i64;
        for g in 0..a.len() {
            let e = a[g] + b[g];
            if e >= self.orders[g] {
                return None;
            }
            out.push(e);
            // b's g-part moves left past a's later generators
            let later: i64 = (g + 1..a.len()).map(|h| a[h] as i64 * self.degrees[h] as i64).sum();
            sign += b[g] as i64 * self.degrees[g] as i64 * later;
        }
        Some((out, Rational::sign(sign)))
    }

    fn mul_poly(&self, a: &[(Mono, Rational)], b: &[(Mono, Rational)]) -> Vec<(Mono, Rational)> {
        let mut out: Vec<(Mono, Rational)> = Vec::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                if let Some((m, s)) = self.mul(ma, mb) {
                    let c = &(ca * cb) * &s;
                    match out.iter_mut().find(|(x, _)| *x == m) {
                        Some((_, acc)) => *acc = &*acc + &c,
                        None => out.push((m, c)),
                    }
                }
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        out
    }

    fn d(&self, m: &Mono) -> Vec<(Mono, Rational)> {
        let mut out = Vec::new();
        let mut passed = 0i64;
        for g in 0..m.len() {
            if m[g] == 1 && self.degrees[g] % 2 == 1 {
                let mut left = vec![0; m.len()];
                left[..g].copy_from_slice(&m[..g]);
                let mut right = vec![0; m.len()];
                right[g + 1..].copy_from_slice(&m[g + 1..]);
                let one = Rational::one();
                let term = self.mul_poly(&self.mul_poly(&[(left, one.clone())], &self.diff[g]), &[(right, one)]);
                let s = Rational::sign(passed);
                out.extend(term.into_iter().map(|(mm, c)| (mm, &c * &s)));
            }
            passed += m[g] as i64 * self.degrees[g] as i64;
        }
        let mut merged: Vec<(Mono, Rational)> = Vec::new();
        for (mm, c) in out {
            match merged.iter_mut().find(|(x, _)| *x == mm) {
                Some((_, acc)) => *acc = &*acc + &c,
                None => merged.push((mm, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        merged
    }

    fn index(&self, m: &Mono) -> (i32, usize) {
        let deg = self.degree(m);
        (deg, self.basis[deg as usize].iter().position(|b| b == m).expect("basis monomial"))
    }

    fn to_vector(&self, deg: i32, p: &[(Mono, Rational)]) -> Vector {
        let mut v: Vec<(usize, Rational)> = p
            .iter()
            .map(|(m, c)| {
                let (d, i) = self.index(m);
                debug_assert_eq!(d, deg);
                (i, c.clone())
            })
            .collect();
        v.sort_by_key(|(i, _)| *i);
        v
    }
}

fn monomial_algebra(rng: &mut impl Rng) -> MonoAlgebra {
    let a: u8 = rng.random_range(1..=3);
    let with_y1 = rng.random_bool(0.6);
    let with_z = rng.random_bool(0.35);
    let with_y3 = with_z && rng.random_bool(0.4);
    let mut degrees = vec![0];
    let mut orders = vec![a];
    let mut diff: Vec<Vec<(Mono, Rational)>> = vec![vec![]];
    let gens = 1 + usize::from(with_y1) + usize::from(with_z) + usize::from(with_y3);
    let mono = |x: u8, z: bool| {
        let mut m = vec![0u8; gens];
        m[0] = x;
        if z {
            m[1 + usize::from(with_y1)] = 1;
        }
        m
    };
    if with_y1 {
        degrees.push(1);
        orders.push(2);
        let d = if a >= 2 {
            let j = rng.random_range(1..a);
            let c = scalar(rng);
            if c.is_zero() { vec![] } else { vec![(mono(j, false), c)] }
        } else {
            vec![]
        };
        diff.push(d);
    }
    if with_z {
        degrees.push(2);
        orders.push(2);
        diff.push(vec![]);
    }
    if with_y3 {
        degrees.push(3);
        orders.push(2);
        let j = rng.random_range(0..a);
        let c = scalar(rng);
        diff.push(if c.is_zero() { vec![] } else { vec![(mono(j, true), c)] });
    }
    let top: i32 = degrees.iter().zip(&orders).map(|(&d, &o)| d * (o as i32 - 1)).sum();
    let mut basis: Vec<Vec<Mono>> = vec![Vec::new(); (top + 1) as usize];
    let mut stack = vec![Vec::<u8>::new()];
    while let Some(m) = stack.pop() {
        if m.len() == gens {
            let deg: i32 = m.iter().zip(&degrees).map(|(&e, &d)| e as i32 * d).sum();
            basis[deg as usize].push(m);
            continue;
        }
        for e in (0..orders[m.len()]).rev() {
            let mut next = m.clone();
            next.push(e);
            stack.push(next);
        }
    }
    for b in &mut basis {
        b.sort();
    }
    MonoAlgebra { degrees, orders, diff, basis }
}

fn algebra_from_monomials(ma: &MonoAlgebra) -> DgAlgebra {
    let dims: Vec<usize> = ma.basis.iter().map(Vec::len).collect();
    let diffs = (1..dims.len())
        .map(|n| {
            let cols = ma.basis[n].iter().map(|m| ma.to_vector(n as i32 - 1, &ma.d(m))).collect();
            Matrix::from_columns(dims[n - 1], cols)
        })
        .collect();
    let complex = Complex::new(0, dims, diffs).expect("monomial complex");
    let mut products = Vec::new();
    for (p, bp) in ma.basis.iter().enumerate() {
        for (i, mi) in bp.iter().enumerate() {
            for (q, bq) in ma.basis.iter().enumerate() {
                for (j, mj) in bq.iter().enumerate() {
                    let v = match ma.mul(mi, mj) {
                        Some((m, s)) => ma.to_vector((p + q) as i32, &[(m, s)]),
                        None => Vec::new(),
                    };
                    products.push(((p as i32, i), (q as i32, j), v));
                }
            }
        }
    }
    let unit = ma.to_vector(0, &[(vec![0; ma.degrees.len()], Rational::one())]);
    DgAlgebra::from_products(complex, products, unit).expect("monomial algebra")
}

/// The same algebra in the basis given by the columns of `p[n]`.
pub fn change_basis(a: &DgAlgebra, p: &[Matrix]) -> DgAlgebra {
    let top = a.top();
    let inv: Vec<Matrix> = p.iter().map(inverse).collect();
    let dims: Vec<usize> = (0..=top).map(|n| a.dim(n)).collect();
    let diffs = (1..=top).map(|n| inv[(n - 1) as usize].mul(a.d(n)).mul(&p[n as usize])).collect();
    let complex = Complex::new(0, dims.clone(), diffs).expect("changed complex");
    let mut products = Vec::new();
    for pd in 0..=top {
        for i in 0..dims[pd as usize] {
            let x = p[pd as usize].column(i).clone();
            for qd in 0..=top - pd {
                for j in 0..dims[qd as usize] {
                    let y = p[qd as usize].column(j).clone();
                    let v = inv[(pd + qd) as usize].mul_vec(&a.mul(pd, &x, qd, &y));
                    products.push(((pd, i), (qd, j), v));
                }
            }
        }
    }
    let unit = inv[0].mul_vec(a.unit());
    DgAlgebra::from_products(complex, products, unit).expect("changed algebra")
}

/// Random algebra; the unit is the first basis vector and the remaining
/// degree-0 basis vectors span the augmentation ideal.
pub fn random_algebra(rng: &mut impl Rng, shape: AlgebraShape) -> Arc<DgAlgebra> {
    loop {
        let ma = monomial_algebra(rng);
        let top = ma.basis.len() as i32 - 1;
        if top > shape.max_top || ma.basis.iter().any(|b| b.len() > shape.max_dim) {
            continue;
        }
        let a = algebra_from_monomials(&ma);
        let p: Vec<Matrix> = (0..=top).map(|n| random_invertible(rng, a.dim(n), n == 0)).collect();
        let b = change_basis(&a, &p);
        debug_assert!(b.validate().is_ok());
        return Arc::new(b);
    }
}

/// A random cycle-boundary semifree module, genuinely bounded.
pub fn random_semifree(rng: &mut impl Rng, a: &Arc<DgAlgebra>, max_gens: usize, max_degree: i32) -> SemifreeModule {
    let mut f = SemifreeModule::new(a.clone());
    let count = rng.random_range(1..=max_gens);
    let mut degrees: Vec<i32> = (0..count).map(|_| rng.random_range(0..=max_degree)).collect();
    degrees.sort();
    for deg in degrees {
        let boundary = if deg == 0 || f.is_empty() {
            Vec::new()
        } else {
            let (m, layout) = f.to_module(None);
            let cycles = Subspace::kernel(m.d(deg - 1));
            let z = if rng.random_bool(0.7) { random_member(rng, &cycles) } else { Vec::new() };
            layout.split(deg - 1, &z)
        };
        f.attach(deg, boundary).expect("cycle boundary");
    }
    f
}

/// Random genuinely bounded module with top degree at most `max_top`
/// (when achievable).
pub fn random_module(rng: &mut impl Rng, a: &Arc<DgAlgebra>, max_top: i32) -> DgModule {
    loop {
        let m = random_module_once(rng, a, max_top, 2);
        if m.top() <= max_top.max(a.top()) {
            return m;
        }
    }
}

fn random_module_once(rng: &mut impl Rng, a: &Arc<DgAlgebra>, max_top: i32, depth: u32) -> DgModule {
    let kind = rng.random_range(0..if depth == 0 { 4 } else { 6 });
    match kind {
        0 => DgModule::free_rank_one(a),
        1 => examples::residue_module(a),
        2 => {
            let room = (max_top - a.top()).max(0);
            random_semifree(rng, a, 2, room.min(2)).to_module(None).0
        }
        3 => {
            let base = if rng.random_bool(0.5) {
                DgModule::free_rank_one(a).power(2)
            } else {
                DgModule::free_rank_one(a).direct_sum(&DgModule::free_rank_one(a).suspension())
            };
            let gens: Vec<(i32, Vector)> = (0..rng.random_range(1..=2))
                .map(|_| {
                    let k = rng.random_range(0..=base.top());
                    (k, random_vector(rng, base.dim(k)))
                })
                .collect();
            base.quotient_by_generated(&gens).0
        }
        4 => random_module_once(rng, a, max_top - 1, depth - 1).suspension(),
        _ => {
            let x = random_module_once(rng, a, max_top, depth - 1);
            let y = random_module_once(rng, a, max_top, depth - 1);
            x.direct_sum(&y)
        }
    }
}

/// Random `A`-linear chain map, a random point of the solution space of the
/// linear conditions `d f = f d` and `f(a m) = a f(m)`.
pub fn random_module_map(rng: &mut impl Rng, src: &DgModule, tgt: &DgModule) -> ChainMap {
    let top = src.top().max(tgt.top());
    let mut offs = Vec::new();
    let mut total = 0;
    for n in 0..=top {
        offs.push(total);
        total += src.dim(n) * tgt.dim(n);
    }
    let var = |n: i32, r: usize, c: usize| offs[n as usize] + c * tgt.dim(n) + r;
    let mut rows: Vec<Vector> = Vec::new();
    // entries of `L f_a - f_b R = 0`
    let push = |rows: &mut Vec<Vector>, left: Option<(&Matrix, i32)>, right: Option<(&Matrix, i32)>, out_rows: usize, in_cols: usize| {
        for c in 0..in_cols {
            for r in 0..out_rows {
                let mut row: Vec<(usize, Rational)> = Vec::new();
                if let Some((l, a)) = left {
                    // (l f_a)[r][c] = Σ_k l[r][k] f_a[k][c]
                    for k in 0..l.cols() {
                        let x = l.get(r, k);
                        if !x.is_zero() {
                            row.push((var(a, k, c), x));
                        }
                    }
                }
                if let Some((rm, b)) = right {
                    for (k, x) in rm.column(c) {
                        row.push((var(b, r, *k), -x.clone()));
                    }
                }
                let row = merge(row);
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    };
    for n in 1..=top {
        push(&mut rows, Some((tgt.d(n), n)), Some((src.d(n), n - 1)), tgt.dim(n - 1), src.dim(n));
    }
    let alg = src.algebra();
    for p in 0..=alg.top() {
        for i in 0..alg.dim(p) {
            for n in 0..=top - p {
                let (Some(at), Some(as_)) = (tgt.action(p, i, n), src.action(p, i, n)) else { continue };
                push(&mut rows, Some((at, n)), Some((as_, p + n)), tgt.dim(p + n), src.dim(n));
            }
        }
    }
    let system = Matrix::from_rows(total, &rows);
    let sols = kernel_basis(&system);
    let mut x = Vec::new();
    for col in sols.columns() {
        x = vector::axpy(&x, &scalar(rng), col);
    }
    let comps = (0..=top)
        .map(|n| {
            let cols = (0..src.dim(n))
                .map(|c| {
                    let lo = var(n, 0, c);
                    vector::window(&x, lo, lo + tgt.dim(n))
                })
                .collect();
            Matrix::from_columns(tgt.dim(n), cols)
        })
        .collect();
    ChainMap::new(src.complex(), tgt.complex(), comps).expect("solution is a chain map")
}

fn merge(mut row: Vec<(usize, Rational)>) -> Vector {
    row.sort_by_key(|(i, _)| *i);
    let mut out: Vector = Vec::new();
    for (i, x) in row {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc = &*acc + &x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|(_, x)| !x.is_zero());
    out
}

/// Random complex in degrees `0..=top`.
pub fn random_complex(rng: &mut impl Rng, top: i32, max_dim: usize) -> Complex {
    let dims: Vec<usize> = (0..=top).map(|_| rng.random_range(0..=max_dim)).collect();
    let mut diffs: Vec<Matrix> = Vec::new();
    for n in 1..=top as usize {
        let below = if n == 1 { Subspace::full(dims[0]) } else { Subspace::kernel(&diffs[n - 2]) };
        let cols = (0..dims[n]).map(|_| if rng.random_bool(0.8) { random_member(rng, &below) } else { Vec::new() }).collect();
        diffs.push(Matrix::from_columns(dims[n - 1], cols));
    }
    Complex::new(0, dims, diffs).expect("random complex")
}

/// A complex as a module over the ground field.
pub fn over_ground(c: &Complex) -> DgModule {
    DgModule::from_fn(DgAlgebra::ground(), c.clone(), |_, _, q| Matrix::identity(c.dim(q))).expect("module over k")
}

pub fn random_chain_map(rng: &mut impl Rng, src: &Complex, tgt: &Complex) -> ChainMap {
    random_module_map(rng, &over_ground(src), &over_ground(tgt))
}

/// Cell dimensions and horizontal and vertical differentials of a grid.
type GridData = (Vec<Vec<usize>>, Vec<Vec<Matrix>>, Vec<Vec<Matrix>>);

/// Random first-quadrant grid: a tensor product of two complexes or the
/// two-column grid of a chain map, with cells in random bases.
pub fn random_double_complex(rng: &mut impl Rng, max_dim: usize) -> DoubleComplex {
    let (dims, dh, dv): GridData = if rng.random_bool(0.5) {
        let (tc, td) = (rng.random_range(0..=2), rng.random_range(0..=2));
        let c = random_complex(rng, tc, max_dim);
        let d = random_complex(rng, td, max_dim);
        let dims = (0..=c.top()).map(|p| (0..=d.top()).map(|q| c.dim(p) * d.dim(q)).collect()).collect();
        let dh = (0..=c.top())
            .map(|p| (0..=d.top()).map(|q| c.d(p).kron(&Matrix::identity(d.dim(q)))).collect())
            .collect();
        let dv = (0..=c.top())
            .map(|p| (0..=d.top()).map(|q| Matrix::identity(c.dim(p)).kron(d.d(q))).collect())
            .collect();
        (dims, dh, dv)
    } else {
        let top = rng.random_range(1..=3);
        let c = random_complex(rng, top, max_dim);
        let d = random_complex(rng, top, max_dim);
        let f = random_chain_map(rng, &c, &d);
        let dims = vec![(0..=top).map(|q| d.dim(q)).collect(), (0..=top).map(|q| c.dim(q)).collect()];
        let dh = vec![(0..=top).map(|q| Matrix::zeros(0, d.dim(q))).collect(), (0..=top).map(|q| f.component(q).clone()).collect()];
        let dv = vec![(0..=top).map(|q| d.d(q).clone()).collect(), (0..=top).map(|q| c.d(q).clone()).collect()];
        (dims, dh, dv)
    };
    let bases: Vec<Vec<Matrix>> = dims.iter().map(|col| col.iter().map(|&n| random_invertible(rng, n, false)).collect()).collect();
    let inv: Vec<Vec<Matrix>> = bases.iter().map(|col| col.iter().map(inverse).collect()).collect();
    let top = dims.iter().enumerate().map(|(p, c)| p + c.len() - 1).max().unwrap_or(0) as i32;
    DoubleComplex::from_fn(
        dims,
        top,
        |p, q| inv[p - 1][q].mul(&dh[p][q]).mul(&bases[p][q]),
        |p, q| inv[p][q - 1].mul(&dv[p][q]).mul(&bases[p][q]),
    )
    .expect("random grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebras_validate() {
        let mut r = rng(7);
        for _ in 0..40 {
            let a = random_algebra(&mut r, AlgebraShape::default());
            a.validate().unwrap();
            assert!((0..=a.top()).all(|n| a.dim(n) <= 3));
            examples::residue_module(&a);
        }
    }

    #[test]
    fn modules_and_maps_validate() {
        let mut r = rng(11);
        for _ in 0..30 {
            let a = random_algebra(&mut r, AlgebraShape::default());
            let m = random_module(&mut r, &a, 4);
            m.validate().unwrap();
            let n = random_module(&mut r, &a, 4);
            let f = random_module_map(&mut r, &m, &n);
            DgModule::check_linear(&f, &m, &n).unwrap();
        }
    }

    #[test]
    fn grids_validate() {
        let mut r = rng(3);
        for _ in 0..30 {
            random_double_complex(&mut r, 2).validate().unwrap();
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_algebra(&mut rng(5), AlgebraShape::default());
        let b = random_algebra(&mut rng(5), AlgebraShape::default());
        assert_eq!(a, b);
    }
}
