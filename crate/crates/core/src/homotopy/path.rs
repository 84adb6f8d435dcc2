//! Path objects, strict pullbacks and homotopy pullbacks of cospans.

use std::sync::Arc;

use crate::complex::{is_quasi_iso, min_bound, truncate_geq0, ChainMap, Complex};
use crate::dg::{DgAlgebra, DgModule};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rational, Subspace};

/// `f_n` padded to `target.dim(n) x source.dim(n)`.
pub(crate) fn comp(f: &ChainMap, source: &DgModule, target: &DgModule, n: i32) -> Matrix {
    f.padded(source.complex(), target.complex(), n)
}

pub(crate) fn compose(second: &ChainMap, first: &ChainMap, a: &DgModule, b: &DgModule, c: &DgModule) -> ChainMap {
    second.compose(first, a.complex(), b.complex(), c.complex())
}

/// Module structure on the good truncation of a complex starting in degree
/// `-1`, given the action on the untruncated degrees.
fn truncated_module(
    algebra: &Arc<DgAlgebra>,
    unbounded: &Complex,
    act: impl Fn(i32, usize, i32) -> Matrix,
) -> (DgModule, Matrix) {
    let t = truncate_geq0(unbounded);
    let kernel = t.kernel.clone();
    let basis = kernel.basis_matrix();
    let m = DgModule::from_fn(algebra.clone(), t.complex.clone(), |p, i, q| {
        let raw = act(p, i, q);
        let src = if q == 0 { raw.mul(&basis) } else { raw };
        if p + q == 0 {
            let cols = src.columns().iter().map(|c| kernel.coordinates_unchecked(c)).collect();
            Matrix::from_columns(kernel.dim(), cols)
        } else {
            src
        }
    })
    .expect("truncated module");
    (m, basis)
}

/// `P` with `P_n = D_n + D_n + D_{n+1}`, `d(x, y, h) = (dx, dy, x - y - dh)`,
/// good-truncated in degree 0 so that it is a path object for `D`.
#[derive(Clone, Debug)]
pub struct PathObject {
    pub base: DgModule,
    pub module: DgModule,
    /// `x -> (x, x, 0)`.
    pub diag: ChainMap,
    /// `(x, y, h) -> (x, y)` into `D + D`.
    pub ends: ChainMap,
    pub ends_target: DgModule,
    /// `(x, y, h) -> x` and `(x, y, h) -> y`.
    pub ev: [ChainMap; 2],
    pub diag_quasi_iso: bool,
    pub ends_fibration: bool,
}

pub fn two_sided_path_object(d: &DgModule) -> Result<PathObject> {
    let a = d.algebra();
    let top = d.top();
    let part = |n: i32| [d.dim(n), d.dim(n), d.dim(n + 1)];
    let dims: Vec<usize> = (-1..=top).map(|n| part(n).iter().sum()).collect();
    let diffs = (0..=top)
        .map(|n| {
            let (src, tgt) = (part(n), part(n - 1));
            let dn = d.complex().padded_d(n);
            let blocks = vec![
                (0, 0, dn.clone()),
                (1, 1, dn),
                (2, 0, Matrix::identity(src[0])),
                (2, 1, Matrix::identity(src[1]).neg()),
                (2, 2, d.complex().padded_d(n + 1).neg()),
            ];
            Matrix::from_blocks(&tgt, &src, blocks)
        })
        .collect();
    let exact = d.exact_to().map(|e| e - 1);
    let unbounded = Complex::new(-1, dims, diffs)?.with_exact_to(exact);
    let (p, basis0) = truncated_module(a, &unbounded, |deg, i, q| {
        let sign = Rational::sign(deg as i64);
        Matrix::block_diag(&[
            &d.padded_action(deg, i, q),
            &d.padded_action(deg, i, q),
            &d.padded_action(deg, i, q + 1).scale(&sign),
        ])
    });
    let restrict = |n: i32, m: Matrix| if n == 0 { m.mul(&basis0) } else { m };
    let dd = d.direct_sum(d);
    let ends = ChainMap::from_fn(p.complex(), dd.complex(), |n| {
        let [x, y, h] = part(n);
        restrict(n, Matrix::from_blocks(&[x, y], &[x, y, h], vec![(0, 0, Matrix::identity(x)), (1, 1, Matrix::identity(y))]))
    });
    let ev = [0usize, 1].map(|k| {
        ChainMap::from_fn(p.complex(), d.complex(), |n| {
            let [x, y, h] = part(n);
            restrict(n, Matrix::from_blocks(&[x], &[x, y, h], vec![(0, k, Matrix::identity(x))]))
        })
    });
    let kernel0 = Subspace::image(&basis0);
    let diag = ChainMap::from_fn(d.complex(), p.complex(), |n| {
        let [x, y, h] = part(n);
        let m = Matrix::from_blocks(&[x, y, h], &[x], vec![(0, 0, Matrix::identity(x)), (1, 0, Matrix::identity(x))]);
        if n == 0 {
            let cols = m.columns().iter().map(|c| kernel0.coordinates_unchecked(c)).collect();
            Matrix::from_columns(kernel0.dim(), cols)
        } else {
            m
        }
    });
    DgModule::check_linear(&diag, d, &p)?;
    DgModule::check_linear(&ends, &p, &dd)?;
    let certified = p.complex().certified_to().min(d.complex().certified_to());
    let diag_quasi_iso = is_quasi_iso(&diag, d.complex(), p.complex(), certified)?;
    let ends_fibration = ends.is_fibration(p.complex(), dd.complex());
    Ok(PathObject { base: d.clone(), module: p, diag, ends, ends_target: dd, ev, diag_quasi_iso, ends_fibration })
}

/// `B x_D C`, the degreewise kernel of `(f, -g) : B + C -> D`.
#[derive(Clone, Debug)]
pub struct StrictPullback {
    pub module: DgModule,
    /// The pullback as a subspace of `B_n + C_n`.
    pub sub: Vec<Subspace>,
    pub to_left: ChainMap,
    pub to_right: ChainMap,
}

impl StrictPullback {
    /// Factor maps `X -> B` and `X -> C` with `f u = g v` through the pullback.
    pub fn lift(&self, x: &DgModule, u: &ChainMap, b: &DgModule, v: &ChainMap, c: &DgModule) -> Result<ChainMap> {
        let mut comps = Vec::new();
        for n in 0..=x.top().max(self.module.top()) {
            let joined = Matrix::vstack(&[&comp(u, x, b, n), &comp(v, x, c, n)]);
            let Some(sub) = self.sub.get(n as usize) else {
                comps.push(Matrix::zeros(0, x.dim(n)));
                continue;
            };
            let mut cols = Vec::with_capacity(joined.cols());
            for col in joined.columns() {
                cols.push(sub.coordinates(col).ok_or_else(|| {
                    Error::Axiom(format!("maps do not agree over the cospan in degree {n}"))
                })?);
            }
            comps.push(Matrix::from_columns(sub.dim(), cols));
        }
        Ok(ChainMap::from_fn(x.complex(), self.module.complex(), |n| comps[n as usize].clone()))
    }
}

pub fn strict_pullback(f: &ChainMap, b: &DgModule, g: &ChainMap, c: &DgModule, d: &DgModule) -> Result<StrictPullback> {
    DgModule::check_linear(f, b, d)?;
    DgModule::check_linear(g, c, d)?;
    let ambient = b.direct_sum(c);
    let sub: Vec<Subspace> = (0..=ambient.top())
        .map(|n| Subspace::kernel(&Matrix::hstack(&[&comp(f, b, d, n), &comp(g, c, d, n).neg()])))
        .collect();
    let (module, incl) = ambient.submodule(&sub)?;
    let module = module.with_exact_to(min_bound(ambient.exact_to(), d.exact_to()));
    let proj = |first: bool| {
        ChainMap::from_fn(ambient.complex(), if first { b.complex() } else { c.complex() }, |n| {
            let (x, y) = (b.dim(n), c.dim(n));
            let blk = if first { (0, 0, Matrix::identity(x)) } else { (0, 1, Matrix::identity(y)) };
            Matrix::from_blocks(&[if first { x } else { y }], &[x, y], vec![blk])
        })
    };
    let to_left = compose(&proj(true), &incl, &module, &ambient, b);
    let to_right = compose(&proj(false), &incl, &module, &ambient, c);
    Ok(StrictPullback { module, sub, to_left, to_right })
}

/// Which leg of the cospan is replaced by a fibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Leg {
    Left,
    Right,
}

/// `B x^h_D C` with the factorization used to build it.
#[derive(Clone, Debug)]
pub struct HomotopyPullback {
    pub leg: Leg,
    pub path: PathObject,
    /// `N = C x_D P` (or `B x_D P`), the replaced leg's source.
    pub replacement: StrictPullback,
    /// `C -> N`, a quasi-isomorphism.
    pub equivalence: ChainMap,
    /// `N -> D`, a fibration.
    pub fibration: ChainMap,
    pub pullback: StrictPullback,
    pub equivalence_certified: bool,
    pub fibration_certified: bool,
}

impl HomotopyPullback {
    pub fn module(&self) -> &DgModule {
        &self.pullback.module
    }

    /// Projection onto `B`.
    pub fn to_left(&self, b: &DgModule, c: &DgModule) -> ChainMap {
        self.projection(Leg::Left, b, c)
    }

    /// Projection onto `C`.
    pub fn to_right(&self, b: &DgModule, c: &DgModule) -> ChainMap {
        self.projection(Leg::Right, b, c)
    }

    fn projection(&self, side: Leg, b: &DgModule, c: &DgModule) -> ChainMap {
        let n = &self.replacement.module;
        let h = &self.pullback;
        match (self.leg, side) {
            (Leg::Right, Leg::Left) => h.to_left.clone(),
            (Leg::Left, Leg::Right) => h.to_right.clone(),
            (Leg::Right, Leg::Right) => compose(&self.replacement.to_left, &h.to_right, &h.module, n, c),
            (Leg::Left, Leg::Left) => compose(&self.replacement.to_left, &h.to_left, &h.module, n, b),
        }
    }

    /// The canonical map from a commutative square's corner `A`.
    pub fn universal(&self, a: &DgModule, u: &ChainMap, b: &DgModule, v: &ChainMap, c: &DgModule) -> Result<ChainMap> {
        let n = &self.replacement.module;
        match self.leg {
            Leg::Right => {
                let into_n = compose(&self.equivalence, v, a, c, n);
                self.pullback.lift(a, u, b, &into_n, n)
            }
            Leg::Left => {
                let into_n = compose(&self.equivalence, u, a, b, n);
                self.pullback.lift(a, &into_n, n, v, c)
            }
        }
    }
}

/// Replace one leg of `B -f-> D <-g- C` by `N -> D` through the two-sided
/// path object and take the strict pullback.
pub fn homotopy_pullback(f: &ChainMap, b: &DgModule, g: &ChainMap, c: &DgModule, d: &DgModule, leg: Leg) -> Result<HomotopyPullback> {
    let path = two_sided_path_object(d)?;
    let p = &path.module;
    let (h, x) = match leg {
        Leg::Right => (g, c),
        Leg::Left => (f, b),
    };
    let replacement = strict_pullback(h, x, &path.ev[0], p, d)?;
    let n = &replacement.module;
    let fibration = compose(&path.ev[1], &replacement.to_right, n, p, d);
    let h_then_diag = compose(&path.diag, h, x, d, p);
    let equivalence = replacement.lift(x, &ChainMap::identity(x.complex()), x, &h_then_diag, p)?;
    let pullback = match leg {
        Leg::Right => strict_pullback(f, b, &fibration, n, d)?,
        Leg::Left => strict_pullback(&fibration, n, g, c, d)?,
    };
    let certified = n.complex().certified_to().min(x.complex().certified_to());
    let equivalence_certified = is_quasi_iso(&equivalence, x.complex(), n.complex(), certified)?;
    let fibration_certified = fibration.is_fibration(n.complex(), d.complex());
    Ok(HomotopyPullback {
        leg,
        path,
        replacement,
        equivalence,
        fibration,
        pullback,
        equivalence_certified,
        fibration_certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{homology, mapping_fiber};
    use crate::dg::examples;
    use crate::gen;

    fn ground(c: Complex) -> DgModule {
        gen::over_ground(&c)
    }

    #[test]
    fn path_of_zero_is_zero() {
        let z = DgModule::zero(&DgAlgebra::ground());
        let p = two_sided_path_object(&z).unwrap();
        assert!(p.module.is_zero());
    }

    #[test]
    fn path_of_sphere_is_equivalent() {
        let s = ground(Complex::sphere(0));
        let p = two_sided_path_object(&s).unwrap();
        assert!(p.diag_quasi_iso && p.ends_fibration);
        assert_eq!(homology(p.module.complex()).dims(), vec![1]);
    }

    #[test]
    fn path_over_dual_numbers() {
        let a = examples::dual_numbers();
        let mut rng = gen::rng(3);
        for _ in 0..10 {
            let m = gen::random_module(&mut rng, &a, 3);
            let p = two_sided_path_object(&m).unwrap();
            p.module.validate().unwrap();
            assert!(p.diag_quasi_iso && p.ends_fibration);
        }
    }

    #[test]
    fn pullback_over_zero_is_product() {
        let b = ground(Complex::sphere(1));
        let c = ground(Complex::disk(1));
        let d = DgModule::zero(&DgAlgebra::ground());
        let f = ChainMap::zero(b.complex(), d.complex());
        let g = ChainMap::zero(c.complex(), d.complex());
        let h = homotopy_pullback(&f, &b, &g, &c, &d, Leg::Right).unwrap();
        assert_eq!(h.module().complex().dims(), b.direct_sum(&c).complex().dims());
    }

    #[test]
    fn fibration_with_acyclic_source_gives_mapping_fiber() {
        let c = ground(Complex::disk(1));
        let d = ground(Complex::sphere(1));
        let b = ground(Complex::sphere(0));
        let g = ChainMap::new(c.complex(), d.complex(), vec![Matrix::zeros(0, 1), Matrix::identity(1)]).unwrap();
        let f = ChainMap::zero(b.complex(), d.complex());
        let h = homotopy_pullback(&f, &b, &g, &c, &d, Leg::Right).unwrap();
        let fib = mapping_fiber(&f, b.complex(), d.complex()).unwrap();
        assert!(h.equivalence_certified && h.fibration_certified);
        let dims = |c: &Complex| (0..=1).map(|n| homology(c).dim(n)).collect::<Vec<_>>();
        assert_eq!(dims(h.module().complex()), dims(&fib.fiber));
        assert_eq!(dims(&fib.fiber), vec![2, 0]);
    }
}
