//! Sparse vectors as sorted `(index, value)` lists with no stored zeros.

use super::Rational;

pub type Vector = Vec<(usize, Rational)>;

/// Build from a dense slice, dropping zeros.
pub fn from_dense(values: &[Rational]) -> Vector {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| (i, v.clone()))
        .collect()
}

pub fn to_dense(v: &Vector, len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

pub fn unit(i: usize) -> Vector {
    vec![(i, Rational::one())]
}

pub fn get(v: &Vector, i: usize) -> Rational {
    match v.binary_search_by_key(&i, |(j, _)| *j) {
        Ok(k) => v[k].1.clone(),
        Err(_) => Rational::zero(),
    }
}

/// Sort by index and merge duplicates; used after unordered accumulation.
pub fn normalize(mut v: Vector) -> Vector {
    v.sort_by_key(|(i, _)| *i);
    let mut out: Vector = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y += &x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|(_, x)| !x.is_zero());
    out
}

/// `x + c * y`.
pub fn axpy(x: &Vector, c: &Rational, y: &Vector) -> Vector {
    if c.is_zero() || y.is_empty() {
        return x.clone();
    }
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut a, mut b) = (0, 0);
    while a < x.len() || b < y.len() {
        let ia = x.get(a).map(|e| e.0).unwrap_or(usize::MAX);
        let ib = y.get(b).map(|e| e.0).unwrap_or(usize::MAX);
        if ia < ib {
            out.push(x[a].clone());
            a += 1;
        } else if ib < ia {
            out.push((ib, c * &y[b].1));
            b += 1;
        } else {
            let s = &x[a].1 + &(c * &y[b].1);
            if !s.is_zero() {
                out.push((ia, s));
            }
            a += 1;
            b += 1;
        }
    }
    out
}

pub fn add(x: &Vector, y: &Vector) -> Vector {
    axpy(x, &Rational::one(), y)
}

pub fn sub(x: &Vector, y: &Vector) -> Vector {
    axpy(x, &Rational::from_int(-1), y)
}

pub fn scale(x: &Vector, c: &Rational) -> Vector {
    if c.is_zero() {
        return Vec::new();
    }
    x.iter().map(|(i, v)| (*i, v * c)).collect()
}

pub fn neg(x: &Vector) -> Vector {
    x.iter().map(|(i, v)| (*i, -v)).collect()
}

pub fn dot(x: &Vector, y: &Vector) -> Rational {
    let (mut a, mut b) = (0, 0);
    let mut acc = Rational::zero();
    while a < x.len() && b < y.len() {
        match x[a].0.cmp(&y[b].0) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                acc += &(&x[a].1 * &y[b].1);
                a += 1;
                b += 1;
            }
        }
    }
    acc
}

/// Shift every index by `offset`.
pub fn offset(x: &Vector, offset: usize) -> Vector {
    x.iter().map(|(i, v)| (i + offset, v.clone())).collect()
}

/// Keep the entries with index in `lo..hi`, re-based to start at zero.
pub fn window(x: &Vector, lo: usize, hi: usize) -> Vector {
    x.iter()
        .filter(|(i, _)| *i >= lo && *i < hi)
        .map(|(i, v)| (i - lo, v.clone()))
        .collect()
}

/// Re-index through `map`; entries whose index maps to `None` are dropped.
pub fn reindex(x: &Vector, map: impl Fn(usize) -> Option<usize>) -> Vector {
    normalize(x.iter().filter_map(|(i, v)| map(*i).map(|j| (j, v.clone()))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn axpy_cancels_to_sparse() {
        let x = vec![(0, q(1)), (2, q(3))];
        let y = vec![(2, q(1)), (5, q(1))];
        assert_eq!(axpy(&x, &q(-3), &y), vec![(0, q(1)), (5, q(-3))]);
    }

    #[test]
    fn normalize_merges() {
        let v = vec![(3, q(1)), (1, q(2)), (3, q(-1)), (1, q(1))];
        assert_eq!(normalize(v), vec![(1, q(3))]);
    }

    #[test]
    fn dot_and_get() {
        let x = vec![(0, q(2)), (4, q(1))];
        let y = vec![(4, q(5)), (7, q(1))];
        assert_eq!(dot(&x, &y), q(5));
        assert_eq!(get(&x, 4), q(1));
        assert_eq!(get(&x, 3), q(0));
    }
}
