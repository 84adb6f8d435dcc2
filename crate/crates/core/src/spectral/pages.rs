//! Spectral sequence of the filtration of `Tot` by columns.
//!
//! With `F_p` the first `p + 1` columns, `Z^r_p = F_p ∩ d^{-1}(F_{p-r})` and
//! `E^r_p = Z^r_p / (Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1})`, all inside `Tot`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::double::DoubleComplex;
use crate::complex::{homology, Complex, HomologyData};
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, rank, vector, Matrix, SubQuotient, Subspace, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Filtration by `p`.
    Horizontal,
    /// Filtration by `q`.
    Vertical,
}

/// `E^r` cells and the differentials `d^r: E^r_{pq} -> E^r_{p-r,q+r-1}`.
#[derive(Clone, Debug)]
pub struct Page {
    pub r: usize,
    pub cells: HashMap<(i32, i32), SubQuotient>,
    pub differentials: HashMap<(i32, i32), Matrix>,
}

impl Page {
    pub fn dim(&self, p: i32, q: i32) -> usize {
        self.cells.get(&(p, q)).map_or(0, SubQuotient::dim)
    }

    /// Dimensions `[p][q]` over the given total-degree range.
    pub fn grid(&self, top: i32) -> Vec<Vec<usize>> {
        (0..=top).map(|p| (0..=top - p).map(|q| self.dim(p, q)).collect()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralSequence {
    pub direction: Direction,
    /// The grid the filtration is taken on (transposed for the vertical case).
    pub grid: DoubleComplex,
    pub total: Complex,
    /// `H(Tot)`, computed for complete towers.
    pub total_homology: Option<HomologyData>,
    /// Pages `E^1, E^2, ...`; the last one is `E^∞`.
    pub pages: Vec<Page>,
    /// Highest total degree with computed pages.
    pub top: i32,
    /// Whether the last page is `E^∞`.
    pub complete: bool,
}

struct Filtered<'a> {
    grid: &'a DoubleComplex,
    total: &'a Complex,
    z: HashMap<(i32, i32, i32), Subspace>,
    dz: HashMap<(i32, i32, i32), Subspace>,
}

impl Filtered<'_> {
    /// `F_p ∩ d^{-1}(F_{p-r})`, cut down one filtration step at a time.
    fn z(&mut self, n: i32, p: i32, r: i32) -> Subspace {
        let dim = self.total.dim(n);
        if p < 0 || n < 0 {
            return Subspace::zero(dim);
        }
        let (p, r) = canonical(n, p, r);
        if let Some(s) = self.z.get(&(n, p, r)) {
            return s.clone();
        }
        let s = if r == 0 {
            let units: Vec<Vector> = (0..self.grid.filtration_dim(n, p)).map(vector::unit).collect();
            Subspace::span(dim, &units)
        } else {
            let prev = self.z(n, p, r - 1);
            let (lo, hi) = (self.grid.filtration_dim(n - 1, p - r), self.grid.filtration_dim(n - 1, p - r + 1));
            if lo == hi {
                prev
            } else {
                let d = self.total.d(n);
                let images: Vec<Vector> = prev.basis().iter().map(|b| vector::window(&d.mul_vec(b), lo, hi)).collect();
                let k = kernel_basis(&Matrix::from_columns(hi - lo, images));
                let basis: Vec<Vector> = k.columns().iter().map(|c| prev.combine(c)).collect();
                Subspace::span(dim, &basis)
            }
        };
        self.z.insert((n, p, r), s.clone());
        s
    }

    fn dz(&mut self, n: i32, p: i32, r: i32) -> Subspace {
        if p < 0 {
            return Subspace::zero(self.total.dim(n - 1));
        }
        let (p, r) = canonical(n, p, r);
        if let Some(s) = self.dz.get(&(n, p, r)) {
            return s.clone();
        }
        let s = self.z(n, p, r).map(self.total.d(n));
        self.dz.insert((n, p, r), s.clone());
        s
    }

    fn denominator(&mut self, n: i32, p: i32, r: i32) -> Subspace {
        let low = self.z(n, p - 1, r - 1);
        if n + 1 > self.total.top() {
            return low;
        }
        low.sum(&self.dz(n + 1, p + r - 1, r - 1))
    }

    /// `E^r_{p,n-p}`, reusing `prev` when numerator and denominator are unchanged.
    fn cell(&mut self, n: i32, p: i32, r: i32, prev: Option<&(SubQuotient, Subspace)>) -> (SubQuotient, Subspace) {
        let num = self.z(n, p, r);
        let den = self.denominator(n, p, r);
        match prev {
            Some((cell, d)) if *d == den && *cell.num() == num => (cell.clone(), den),
            _ => (SubQuotient::new(num, &den), den),
        }
    }
}

/// A representative key for `F_p ∩ d^{-1}(F_{p-r})` in degree `n`: filtration
/// indices past `n` describe the whole space, and `r > p` asks for a cycle.
fn canonical(n: i32, p: i32, r: i32) -> (i32, i32) {
    let (p, r) = if p > n { (n, (r - (p - n)).max(0)) } else { (p, r) };
    (p, r.clamp(0, p + 1))
}

/// Pages `E^1..E^{r_max}` in all total degrees of `Tot`; without `r_max` the
/// tower runs to `E^{top+2}`, past which nothing changes, and its last page is `E^∞`.
pub fn spectral_sequence(dc: &DoubleComplex, direction: Direction, r_max: Option<usize>) -> Result<SpectralSequence> {
    let grid = match direction {
        Direction::Horizontal => dc.clone(),
        Direction::Vertical => dc.transpose(),
    };
    let total = grid.total_complex();
    let top = total.top();
    let full = (top + 2).max(1) as usize;
    let r_max = r_max.map_or(full, |r| r.clamp(1, full));
    let mut f = Filtered { grid: &grid, total: &total, z: HashMap::new(), dz: HashMap::new() };
    let mut pages = Vec::with_capacity(r_max);
    let mut last: HashMap<(i32, i32), (SubQuotient, Subspace)> = HashMap::new();
    for r in 1..=r_max {
        let ri = r as i32;
        let mut cells = HashMap::new();
        for n in 0..=top {
            for p in 0..=n {
                let c = f.cell(n, p, ri, last.get(&(p, n - p)));
                cells.insert((p, n - p), c.0.clone());
                last.insert((p, n - p), c);
            }
        }
        let mut differentials = HashMap::new();
        for n in 0..=top {
            for p in 0..=n {
                let src = &cells[&(p, n - p)];
                let (tp, tq) = (p - ri, n - p + ri - 1);
                let m = match cells.get(&(tp, tq)) {
                    Some(tgt) if tp >= 0 && n >= 1 => src
                        .induced(total.d(n), tgt)
                        .ok_or_else(|| Error::Internal(format!("page {r} differential at ({p},{}) is not well defined", n - p)))?,
                    _ => Matrix::zeros(0, src.dim()),
                };
                differentials.insert((p, n - p), m);
            }
        }
        pages.push(Page { r, cells, differentials });
    }
    let complete = r_max == full;
    let total_homology = complete.then(|| homology(&total));
    Ok(SpectralSequence { direction, grid, total, total_homology, pages, top, complete })
}

/// Per-cell comparison of `E^∞` with the graded pieces of `H(Tot)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceEntry {
    pub p: i32,
    pub q: i32,
    /// First page equal to `E^∞` at this cell.
    pub stable_page: usize,
    pub e_infinity: usize,
    pub graded_piece: usize,
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub certified_to: i32,
    pub entries: Vec<ConvergenceEntry>,
    /// `Σ_p dim E^∞_{p,n-p}` against `dim H_n(Tot)`.
    pub totals: Vec<(usize, usize)>,
}

impl ConvergenceReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(|e| e.matches) && self.totals.iter().all(|(a, b)| a == b)
    }
}

impl SpectralSequence {
    pub fn page(&self, r: usize) -> Option<&Page> {
        self.pages.get(r.checked_sub(1)?)
    }

    /// The last computed page, `E^∞` when the tower is complete.
    pub fn infinity(&self) -> &Page {
        self.pages.last().expect("at least one page")
    }

    /// `d^r ∘ d^r = 0` and `E^{r+1} ≅ H(E^r, d^r)` through explicit maps, in
    /// total degrees `< top` (the incoming differential at `top` needs `Tot_{top+2}`).
    pub fn check_pages(&self) -> Result<()> {
        for (idx, page) in self.pages.iter().enumerate() {
            let r = page.r as i32;
            for ((p, q), d) in &page.differentials {
                if let Some(d2) = page.differentials.get(&(p - r, q + r - 1)) {
                    if d2.cols() == d.rows() && !d2.mul(d).is_zero() {
                        return Err(Error::Internal(format!("d^{r} squares to nonzero at ({p},{q})")));
                    }
                }
            }
            let Some(next) = self.pages.get(idx + 1) else { continue };
            for n in 0..self.top {
                for p in 0..=n {
                    let q = n - p;
                    let cell = &page.cells[&(p, q)];
                    let out = &page.differentials[&(p, q)];
                    let incoming = page
                        .differentials
                        .get(&(p + r, q - r + 1))
                        .filter(|m| m.rows() == cell.dim())
                        .cloned()
                        .unwrap_or_else(|| Matrix::zeros(cell.dim(), 0));
                    let ker = Subspace::kernel(out);
                    let im = Subspace::image(&incoming);
                    let homology = SubQuotient::new(ker.clone(), &im);
                    let nc = &next.cells[&(p, q)];
                    let cols = (0..nc.dim())
                        .map(|t| {
                            let coords = cell.project(&nc.representative(t)).ok_or_else(|| {
                                Error::Internal(format!("E^{} representative at ({p},{q}) leaves E^{r}", r + 1))
                            })?;
                            homology.project(&coords).ok_or_else(|| {
                                Error::Internal(format!("E^{} representative at ({p},{q}) is not a d^{r}-cycle", r + 1))
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let m = Matrix::from_columns(homology.dim(), cols);
                    if m.rows() != m.cols() || rank(&m) != m.rows() {
                        return Err(Error::Internal(format!("E^{} differs from the homology of E^{r} at ({p},{q})", r + 1)));
                    }
                }
            }
        }
        Ok(())
    }

    /// Compare `E^∞_{pq}` with `F_p H_n / F_{p-1} H_n` by sending
    /// representatives to their classes.
    pub fn converge_check(&self) -> Result<ConvergenceReport> {
        let Some(h) = self.total_homology.as_ref().filter(|_| self.complete) else {
            return Err(Error::Input("convergence needs the complete tower of pages".into()));
        };
        let certified_to = self.top.min(self.grid.certified_to()).min(h.certified_to());
        let inf = self.infinity();
        let mut entries = Vec::new();
        let mut totals = Vec::new();
        for n in 0..=certified_to {
            let ambient = self.total.dim(n);
            let cycles = Subspace::kernel(self.total.d(n));
            let filt = |p: i32| -> Result<Subspace> {
                let units: Vec<_> = (0..self.grid.filtration_dim(n, p)).map(vector::unit).collect();
                let part = cycles.intersection(&Subspace::span(ambient, &units));
                let classes = part.basis().iter().map(|v| h.class_of(n, v)).collect::<Result<Vec<_>>>()?;
                Ok(Subspace::span(h.dim(n), &classes))
            };
            let mut sum_inf = 0;
            for p in 0..=n {
                let q = n - p;
                let cell = &inf.cells[&(p, q)];
                let graded = SubQuotient::new(filt(p)?, &filt(p - 1)?);
                let cols = (0..cell.dim())
                    .map(|t| {
                        let class = h.class_of(n, &cell.representative(t))?;
                        graded.project(&class).ok_or_else(|| Error::Internal(format!("E^∞ class at ({p},{q}) leaves F_p")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let m = Matrix::from_columns(graded.dim(), cols);
                let matches = m.rows() == m.cols() && rank(&m) == m.rows();
                let stable_page = self.pages.iter().find(|pg| &pg.cells[&(p, q)] == cell).map_or(self.pages.len(), |pg| pg.r);
                sum_inf += cell.dim();
                entries.push(ConvergenceEntry { p, q, stable_page, e_infinity: cell.dim(), graded_piece: graded.dim(), matches });
            }
            totals.push((sum_inf, h.dim(n)));
        }
        Ok(ConvergenceReport { certified_to, entries, totals })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_exact() -> DoubleComplex {
        // columns 0 and 1, each the complex k <- k; rows k <- k
        DoubleComplex::from_fn(vec![vec![1, 1], vec![1, 1]], 2, |_, _| Matrix::identity(1), |_, _| Matrix::identity(1)).unwrap()
    }

    #[test]
    fn acyclic_square_converges_to_zero() {
        let dc = rows_exact();
        for dir in [Direction::Horizontal, Direction::Vertical] {
            let ss = spectral_sequence(&dc, dir, None).unwrap();
            ss.check_pages().unwrap();
            let rep = ss.converge_check().unwrap();
            assert!(rep.holds(), "{rep:?}");
            assert_eq!(ss.page(1).unwrap().dim(0, 0), 0);
        }
    }

    #[test]
    fn single_cell_is_its_own_limit() {
        let dc = DoubleComplex::from_fn(vec![vec![3, 0]], 1, |_, _| unreachable!(), |_, _| Matrix::zeros(3, 0)).unwrap();
        let ss = spectral_sequence(&dc, Direction::Horizontal, None).unwrap();
        assert_eq!(ss.page(2).unwrap().dim(0, 0), 3);
        assert_eq!(ss.infinity().dim(0, 0), 3);
        assert!(ss.converge_check().unwrap().holds());
    }

    #[test]
    fn nontrivial_d2() {
        // a at (2,0) hits b at (1,0); c at (1,1) hits b vertically and e at
        // (0,1) horizontally, so a + c carries a transgression a -> e.
        let dc = DoubleComplex::from_fn(
            vec![vec![0, 1], vec![1, 1], vec![1]],
            2,
            |p, q| if (p, q) == (1, 0) { Matrix::zeros(0, 1) } else { Matrix::identity(1) },
            |p, _| if p == 0 { Matrix::zeros(0, 1) } else { Matrix::identity(1) },
        )
        .unwrap();
        let ss = spectral_sequence(&dc, Direction::Horizontal, None).unwrap();
        ss.check_pages().unwrap();
        let e2 = ss.page(2).unwrap();
        assert_eq!((e2.dim(2, 0), e2.dim(0, 1)), (1, 1));
        assert_eq!(rank(&e2.differentials[&(2, 0)]), 1);
        assert_eq!(ss.page(3).unwrap().dim(2, 0), 0);
        let rep = ss.converge_check().unwrap();
        assert!(rep.holds(), "{rep:?}");
    }
}
