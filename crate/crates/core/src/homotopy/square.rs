//! Commutative squares, model squares, homotopy fiber sequences and pasting.

use serde::{Deserialize, Serialize};

use super::path::{comp, compose, homotopy_pullback, strict_pullback, two_sided_path_object, HomotopyPullback, Leg};
use crate::complex::{homology, induced_map, ChainMap};
use crate::dg::DgModule;
use crate::error::{Error, Result};
use crate::linalg::rank;

/// ```text
/// A --top--> B
/// |          |
/// left     right
/// v          v
/// C -bottom-> D
/// ```
#[derive(Clone, Debug)]
pub struct Square {
    pub a: DgModule,
    pub b: DgModule,
    pub c: DgModule,
    pub d: DgModule,
    pub top: ChainMap,
    pub left: ChainMap,
    pub right: ChainMap,
    pub bottom: ChainMap,
}

impl Square {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: DgModule,
        b: DgModule,
        c: DgModule,
        d: DgModule,
        top: ChainMap,
        left: ChainMap,
        right: ChainMap,
        bottom: ChainMap,
    ) -> Result<Self> {
        let s = Square { a, b, c, d, top, left, right, bottom };
        s.validate()?;
        Ok(s)
    }

    /// Linearity of the four maps and `right . top = bottom . left` in every degree.
    pub fn validate(&self) -> Result<()> {
        if [&self.b, &self.c, &self.d].iter().any(|m| m.algebra() != self.a.algebra()) {
            return Err(Error::Input("square corners live over different algebras".into()));
        }
        DgModule::check_linear(&self.top, &self.a, &self.b)?;
        DgModule::check_linear(&self.left, &self.a, &self.c)?;
        DgModule::check_linear(&self.right, &self.b, &self.d)?;
        DgModule::check_linear(&self.bottom, &self.c, &self.d)?;
        for n in 0..=self.a.top() {
            let via_b = comp(&self.right, &self.b, &self.d, n).mul(&comp(&self.top, &self.a, &self.b, n));
            let via_c = comp(&self.bottom, &self.c, &self.d, n).mul(&comp(&self.left, &self.a, &self.c, n));
            if via_b != via_c {
                return Err(Error::Axiom(format!("square does not commute in degree {n}")));
            }
        }
        Ok(())
    }

    /// All four maps the identity of `m`.
    pub fn identity(m: &DgModule) -> Self {
        let id = ChainMap::identity(m.complex());
        Square {
            a: m.clone(),
            b: m.clone(),
            c: m.clone(),
            d: m.clone(),
            top: id.clone(),
            left: id.clone(),
            right: id.clone(),
            bottom: id,
        }
    }

    /// The strict pullback square of `B -f-> D <-g- C`.
    pub fn strict(f: &ChainMap, b: &DgModule, g: &ChainMap, c: &DgModule, d: &DgModule) -> Result<Self> {
        let pb = strict_pullback(f, b, g, c, d)?;
        Square::new(pb.module, b.clone(), c.clone(), d.clone(), pb.to_left, pb.to_right, f.clone(), g.clone())
    }

    /// Precompose the corner `A` with `e : A' -> A`.
    pub fn precompose(&self, a2: &DgModule, e: &ChainMap) -> Result<Self> {
        Square::new(
            a2.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
            compose(&self.top, e, a2, &self.a, &self.b),
            compose(&self.left, e, a2, &self.a, &self.c),
            self.right.clone(),
            self.bottom.clone(),
        )
    }

    /// Horizontal pasting: `self` on the left, `right` on the right, sharing
    /// the edge `B -> D`.
    pub fn paste(&self, right: &Square) -> Result<Self> {
        if self.b != right.a || self.d != right.c || self.right != right.left {
            return Err(Error::Input("squares do not share an edge".into()));
        }
        Square::new(
            self.a.clone(),
            right.b.clone(),
            self.c.clone(),
            right.d.clone(),
            compose(&right.top, &self.top, &self.a, &self.b, &right.b),
            self.left.clone(),
            right.right.clone(),
            compose(&right.bottom, &self.bottom, &self.c, &self.d, &right.d),
        )
    }
}

/// Homology evidence for one square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareEvidence {
    pub window: i32,
    pub corner_homology: Vec<usize>,
    pub holim_homology: Vec<usize>,
    /// Rank of `H_n` of the universal map.
    pub universal_ranks: Vec<usize>,
    pub factorization_certified: bool,
    /// Both legs give the same homology and the same verdict.
    pub leg_independent: bool,
}

#[derive(Clone, Debug)]
pub struct ModelSquareVerdict {
    pub holim: HomotopyPullback,
    pub universal: ChainMap,
    pub is_model_square: bool,
    pub evidence: SquareEvidence,
}

/// Highest degree in which homology of both complexes is known, zero
/// homology above a genuine top degree counting as known.
pub(crate) fn common_window(x: &crate::complex::Complex, y: &crate::complex::Complex) -> i32 {
    let bound = |c: &crate::complex::Complex| c.exact_to().map_or(i32::MAX, |e| e - 1);
    x.top().max(y.top()).min(bound(x)).min(bound(y))
}

fn decide(s: &Square, leg: Leg) -> Result<(HomotopyPullback, ChainMap, bool, SquareEvidence)> {
    let h = homotopy_pullback(&s.right, &s.b, &s.bottom, &s.c, &s.d, leg)?;
    let u = h.universal(&s.a, &s.top, &s.b, &s.left, &s.c)?;
    let hm = h.module();
    let window = common_window(s.a.complex(), hm.complex());
    let ha = homology(s.a.complex());
    let hh = homology(hm.complex());
    let maps = induced_map(&u, &ha, &hh)?;
    let mut quasi = true;
    let mut ranks = Vec::new();
    for n in 0..=window {
        let m = &maps[&n];
        let r = rank(m);
        quasi &= m.rows() == m.cols() && r == m.rows();
        ranks.push(r);
    }
    let evidence = SquareEvidence {
        window,
        corner_homology: (0..=window).map(|n| ha.dim(n)).collect(),
        holim_homology: (0..=window).map(|n| hh.dim(n)).collect(),
        universal_ranks: ranks,
        factorization_certified: h.equivalence_certified && h.fibration_certified && h.path.diag_quasi_iso,
        leg_independent: true,
    };
    Ok((h, u, quasi, evidence))
}

/// Whether the canonical map from `A` to the homotopy pullback of the cospan
/// is a quasi-isomorphism in every certified degree. The other leg is
/// replaced as well and the two answers are cross-checked.
pub fn is_model_square(s: &Square) -> Result<ModelSquareVerdict> {
    s.validate()?;
    let (holim, universal, is_model_square, mut evidence) = decide(s, Leg::Right)?;
    let (_, _, other, other_evidence) = decide(s, Leg::Left)?;
    let w = evidence.window.min(other_evidence.window) as usize;
    evidence.leg_independent = other == is_model_square
        && evidence.holim_homology[..=w] == other_evidence.holim_homology[..=w];
    Ok(ModelSquareVerdict { holim, universal, is_model_square, evidence })
}

#[derive(Clone, Debug)]
pub struct FiberSequenceVerdict {
    pub square: ModelSquareVerdict,
    pub corner_acyclic: bool,
    pub is_fiber_sequence: bool,
}

/// `A -> B -> D` with `A -> C -> D` through an acyclic corner `C`.
pub fn is_homotopy_fiber_sequence(s: &Square) -> Result<FiberSequenceVerdict> {
    let square = is_model_square(s)?;
    let corner_acyclic = s.c.complex().is_acyclic_to(s.c.complex().certified_to());
    let is_fiber_sequence = corner_acyclic && square.is_model_square;
    Ok(FiberSequenceVerdict { square, corner_acyclic, is_fiber_sequence })
}

/// The square `A -i-> B -f-> D` through the zero module; it commutes only
/// when `f i = 0`.
pub fn fiber_square(f: &ChainMap, b: &DgModule, d: &DgModule, a: &DgModule, i: &ChainMap) -> Result<Square> {
    let zero = DgModule::zero(a.algebra());
    Square::new(
        a.clone(),
        b.clone(),
        zero.clone(),
        d.clone(),
        i.clone(),
        ChainMap::zero(a.complex(), zero.complex()),
        f.clone(),
        ChainMap::zero(zero.complex(), d.complex()),
    )
}

/// Based path object `Path_0 D`, the kernel of the second end of the two-sided
/// one, with its projection to `D`.
pub fn based_path(d: &DgModule) -> Result<(DgModule, ChainMap)> {
    let path = two_sided_path_object(d)?;
    let zero = DgModule::zero(d.algebra());
    let pb = strict_pullback(&path.ev[1], &path.module, &ChainMap::zero(zero.complex(), d.complex()), &zero, d)?;
    let proj = compose(&path.ev[0], &pb.to_left, &pb.module, &path.module, d);
    Ok((pb.module, proj))
}

/// The mapping fiber `K_f = B x_D Path_0 D` with its strict square through
/// the acyclic corner `Path_0 D`.
pub fn mapping_fiber_square(f: &ChainMap, b: &DgModule, d: &DgModule) -> Result<Square> {
    let (path, proj) = based_path(d)?;
    Square::strict(f, b, &proj, &path, d)
}

/// The kernel of `f` with its inclusion.
pub fn kernel_square(f: &ChainMap, b: &DgModule, d: &DgModule) -> Result<Square> {
    let zero = DgModule::zero(b.algebra());
    let g = ChainMap::zero(zero.complex(), d.complex());
    let pb = strict_pullback(f, b, &g, &zero, d)?;
    fiber_square(f, b, d, &pb.module, &pb.to_left)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PastingVerdict {
    pub left: bool,
    pub right: bool,
    pub total: bool,
    /// `right and total => left` and `left and right => total`.
    pub law_holds: bool,
}

pub fn pasting_check(left: &Square, right: &Square) -> Result<PastingVerdict> {
    let total = left.paste(right)?;
    let l = is_model_square(left)?.is_model_square;
    let r = is_model_square(right)?.is_model_square;
    let t = is_model_square(&total)?.is_model_square;
    let law_holds = !(r && t && !l) && !(l && r && !t);
    Ok(PastingVerdict { left: l, right: r, total: t, law_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{mapping_fiber, Complex};
    use crate::dg::examples;
    use crate::gen;
    use crate::linalg::Matrix;

    fn ground(c: Complex) -> DgModule {
        gen::over_ground(&c)
    }

    #[test]
    fn identity_square_is_model() {
        let m = ground(Complex::disk(2).direct_sum(&Complex::sphere(1)));
        let v = is_model_square(&Square::identity(&m)).unwrap();
        assert!(v.is_model_square && v.evidence.leg_independent);
    }

    fn zero_square(d: DgModule) -> Square {
        let z = DgModule::zero(d.algebra());
        let zm = ChainMap::zero(z.complex(), d.complex());
        let id = ChainMap::identity(z.complex());
        Square::new(z.clone(), z.clone(), z, d, id.clone(), id, zm.clone(), zm).unwrap()
    }

    #[test]
    fn zero_squares_over_spheres() {
        // the homotopy pullback of 0 -> S^n <- 0 is the loop module, with
        // homology k in degree n - 1; for n = 0 it is truncated away
        let v = is_model_square(&zero_square(ground(Complex::sphere(0)))).unwrap();
        assert!(v.is_model_square);
        assert_eq!(v.evidence.holim_homology, vec![0]);
        let v = is_model_square(&zero_square(ground(Complex::sphere(2)))).unwrap();
        assert!(!v.is_model_square);
        assert_eq!(v.evidence.holim_homology, vec![0, 1, 0]);
    }

    #[test]
    fn strict_pullback_of_fibration_is_model() {
        let c = ground(Complex::disk(1));
        let d = ground(Complex::sphere(1));
        let b = ground(Complex::sphere(1).direct_sum(&Complex::sphere(0)));
        let g = ChainMap::new(c.complex(), d.complex(), vec![Matrix::zeros(0, 1), Matrix::identity(1)]).unwrap();
        let f = ChainMap::new(b.complex(), d.complex(), vec![Matrix::zeros(0, 1), Matrix::identity(1)]).unwrap();
        let s = Square::strict(&f, &b, &g, &c, &d).unwrap();
        assert!(is_model_square(&s).unwrap().is_model_square);
    }

    #[test]
    fn mapping_fiber_is_fiber_sequence() {
        let a = examples::dual_numbers();
        let mut rng = gen::rng(11);
        for _ in 0..8 {
            let b = gen::random_module(&mut rng, &a, 3);
            let d = gen::random_module(&mut rng, &a, 3);
            let f = gen::random_module_map(&mut rng, &b, &d);
            let s = mapping_fiber_square(&f, &b, &d).unwrap();
            let v = is_homotopy_fiber_sequence(&s).unwrap();
            assert!(v.is_fiber_sequence);
            let fib = mapping_fiber(&f, b.complex(), d.complex()).unwrap();
            let w = v.square.evidence.window;
            let dims = |c: &crate::complex::Complex| (0..=w).map(|n| homology(c).dim(n)).collect::<Vec<_>>();
            assert_eq!(dims(s.a.complex()), dims(&fib.fiber));
        }
    }

    #[test]
    fn non_commuting_square_is_rejected() {
        let m = ground(Complex::sphere(0));
        let id = ChainMap::identity(m.complex());
        let zero = ChainMap::zero(m.complex(), m.complex());
        assert!(Square::new(m.clone(), m.clone(), m.clone(), m, id.clone(), zero, id.clone(), id).is_err());
    }
}
