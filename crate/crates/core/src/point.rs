//! Lattice points of `Z^r` and branch index sets.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point of `Z^r`, indexed by branch.
///
/// The derived `Ord` is lexicographic and is used only for sorting and
/// deduplication. The partial (product) order of the theory is exposed
/// through [`Point::le`] and [`Point::lt_strict`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        assert!(!coords.is_empty(), "points live in Z^r with r >= 1");
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn coord(&self, i: usize) -> i64 {
        self.0[i]
    }

    /// Componentwise minimum. Errors on dimension mismatch.
    pub fn meet(&self, other: &Point) -> Result<Point> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (*a).min(*b))
                .collect(),
        ))
    }

    /// Componentwise maximum. Errors on dimension mismatch.
    pub fn join(&self, other: &Point) -> Result<Point> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (*a).max(*b))
                .collect(),
        ))
    }

    /// Product order: `self <= other` in every coordinate.
    pub fn le(&self, other: &Point) -> bool {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Strict product order: `self < other` in every coordinate.
    pub fn lt_strict(&self, other: &Point) -> bool {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a < b)
    }

    /// Copy with coordinate `i` shifted by `delta`.
    pub fn bumped(&self, i: usize, delta: i64) -> Point {
        let mut c = self.0.clone();
        c[i] += delta;
        Point(c)
    }

    /// Copy with coordinate `i` replaced by `v`.
    pub fn with_coord(&self, i: usize, v: i64) -> Point {
        let mut c = self.0.clone();
        c[i] = v;
        Point(c)
    }

    /// Restriction to the coordinates of `j`, in ascending index order.
    pub fn restrict(&self, j: &IndexSet) -> Point {
        Point(j.iter().map(|i| self.0[i]).collect())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<&[i64]> for Point {
    fn from(s: &[i64]) -> Self {
        Point::new(s.to_vec())
    }
}

impl<const N: usize> From<[i64; N]> for Point {
    fn from(s: [i64; N]) -> Self {
        Point::new(s.to_vec())
    }
}

/// A sorted set of branch indices, `0`-based, drawn from `{0, .., r-1}`.
///
/// Index sets built through [`IndexSet::new`] are nonempty; the empty set can
/// only arise as the complement of the full set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(indices: impl IntoIterator<Item = usize>, r: usize) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        if let Some(&bad) = v.iter().find(|&&i| i >= r) {
            return Err(Error::IndexOutOfRange { index: bad, r });
        }
        Ok(IndexSet(v))
    }

    pub fn full(r: usize) -> Self {
        IndexSet((0..r).collect())
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(vec![i])
    }

    /// Complement within `{0, .., r-1}`; empty when `self` is full.
    pub fn complement(&self, r: usize) -> IndexSet {
        IndexSet((0..r).filter(|i| !self.contains(*i)).collect())
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_full(&self, r: usize) -> bool {
        self.0.len() == r
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Iterate every lattice point of the box `[lo, hi]` in lexicographic order.
pub(crate) fn box_lattice(lo: &Point, hi: &Point) -> BoxIter {
    assert_eq!(lo.dim(), hi.dim());
    let empty = lo.coords().iter().zip(hi.coords()).any(|(a, b)| a > b);
    BoxIter {
        lo: lo.clone(),
        hi: hi.clone(),
        cur: if empty { None } else { Some(lo.coords().to_vec()) },
    }
}

pub(crate) struct BoxIter {
    lo: Point,
    hi: Point,
    cur: Option<Vec<i64>>,
}

impl Iterator for BoxIter {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        let cur = self.cur.as_mut()?;
        let out = Point::new(cur.clone());
        // Odometer increment, last coordinate fastest: lexicographic order.
        let mut k = cur.len();
        loop {
            if k == 0 {
                self.cur = None;
                break;
            }
            k -= 1;
            if cur[k] < self.hi.coord(k) {
                cur[k] += 1;
                for j in k + 1..cur.len() {
                    cur[j] = self.lo.coord(j);
                }
                break;
            }
        }
        Some(out)
    }
}
