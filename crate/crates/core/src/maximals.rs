//! Fibers, maximal points, and reconstruction from relative maximals.
//!
//! For a nonempty `J` inside `I = {0, .., r-1}`, the fiber of `a` over `J`
//! collects the members agreeing with `a` on `J` and strictly exceeding it
//! off `J`; the closed fiber relaxes strict excess to `>=`. A member is
//! maximal when every single-index fiber is empty, absolute maximal when
//! every proper fiber is empty, and relative maximal when every proper fiber
//! over two or more indices is nonempty. For `r = 2` the three notions
//! coincide; intermediate maximals require `r >= 4`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::point::{box_lattice, IndexSet, Point};
use crate::valueset::ValueSet;
use crate::{Error, Result};

/// A fiber-emptiness query: the members matching `target` on `indices` and
/// exceeding it elsewhere (strictly, or weakly when `closed`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberQuery {
    pub target: Point,
    pub indices: IndexSet,
    pub closed: bool,
}

impl FiberQuery {
    pub fn open(target: Point, indices: IndexSet) -> Self {
        FiberQuery {
            target,
            indices,
            closed: false,
        }
    }

    pub fn closed(target: Point, indices: IndexSet) -> Self {
        FiberQuery {
            target,
            indices,
            closed: true,
        }
    }
}

/// Decide emptiness of a fiber of `e`; on success returns a witness member,
/// reported as its capped box representative.
///
/// A box point `w` stands for every member obtained by raising coordinates
/// sitting on the conductor face, so the conditions below quantify over the
/// whole infinite set even though only the box is scanned.
pub fn fiber_nonempty(e: &ValueSet, q: &FiberQuery) -> Result<Option<Point>> {
    if q.target.dim() != e.r() {
        return Err(Error::DimensionMismatch {
            expected: e.r(),
            got: q.target.dim(),
        });
    }
    if q.indices.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    if let Some(bad) = q.indices.iter().find(|&i| i >= e.r()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            r: e.r(),
        });
    }
    Ok(fiber_witness(e, &q.target, &q.indices, q.closed).cloned())
}

fn fiber_witness<'a>(
    e: &'a ValueSet,
    target: &Point,
    indices: &IndexSet,
    closed: bool,
) -> Option<&'a Point> {
    let gamma = e.conductor();
    e.box_points().iter().find(|w| {
        for i in 0..e.r() {
            let (wi, ti, gi) = (w.coord(i), target.coord(i), gamma.coord(i));
            let ok = if indices.contains(i) {
                // Exact agreement: reachable iff w sits at min(t_i, gamma_i),
                // raising from the conductor face when t_i >= gamma_i.
                wi == ti.min(gi)
            } else if closed {
                wi >= ti.min(gi)
            } else if ti < gi {
                wi > ti
            } else {
                wi == gi
            };
            if !ok {
                return false;
            }
        }
        true
    })
}

/// Is `a` in the fiber of `b` taken over the whole lattice `Z^r`? True iff
/// the coordinates agree somewhere and `a` strictly exceeds `b` everywhere
/// else. This is the membership obstruction produced by a relative maximal.
pub fn in_lattice_fiber(a: &Point, b: &Point) -> bool {
    debug_assert_eq!(a.dim(), b.dim());
    (0..a.dim()).any(|i| {
        a.coord(i) == b.coord(i)
            && (0..a.dim()).all(|j| j == i || a.coord(j) > b.coord(j))
    })
}

/// Classification of a member point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    NotMaximal,
    /// Maximal, with the two refinements. For `r <= 2` both flags are set;
    /// both clear means intermediate (possible only for `r >= 4`).
    Maximal { relative: bool, absolute: bool },
}

impl PointClass {
    pub fn is_maximal(&self) -> bool {
        matches!(self, PointClass::Maximal { .. })
    }

    pub fn is_relative(&self) -> bool {
        matches!(self, PointClass::Maximal { relative: true, .. })
    }

    pub fn is_absolute(&self) -> bool {
        matches!(self, PointClass::Maximal { absolute: true, .. })
    }

    pub fn is_intermediate(&self) -> bool {
        matches!(
            self,
            PointClass::Maximal {
                relative: false,
                absolute: false
            }
        )
    }
}

/// Classify a member of `e` by scanning its proper fibers.
pub fn classify_point(e: &ValueSet, a: &Point) -> Result<PointClass> {
    if a.dim() != e.r() {
        return Err(Error::DimensionMismatch {
            expected: e.r(),
            got: a.dim(),
        });
    }
    if !e.contains(a)? {
        return Err(Error::PointNotInSet { point: a.clone() });
    }
    let r = e.r();
    for i in 0..r {
        if fiber_witness(e, a, &IndexSet::singleton(i), false).is_some() {
            return Ok(PointClass::NotMaximal);
        }
    }
    let mut relative = true;
    let mut absolute = true;
    // Proper subsets with at least two indices; singletons are known empty.
    for mask in 1u32..(1 << r) - 1 {
        if (mask.count_ones() as usize) < 2 {
            continue;
        }
        let j = IndexSet::new((0..r).filter(|i| mask & (1 << i) != 0), r)
            .expect("nonempty by mask");
        if fiber_witness(e, a, &j, false).is_some() {
            absolute = false;
        } else {
            relative = false;
        }
        if !relative && !absolute && r >= 4 {
            break;
        }
    }
    Ok(PointClass::Maximal { relative, absolute })
}

/// Counts of relative and absolute maximals sharing a last coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LevelCounts {
    pub rm: usize,
    pub am: usize,
}

/// All maximal points of a set, split by kind.
///
/// `rm`, `am`, and `int` cover `m`; for `r <= 2` the kinds collapse, so
/// `rm` and `am` coincide, while for `r >= 3` they partition `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalReport {
    #[serde(rename = "M")]
    pub m: Vec<Point>,
    #[serde(rename = "RM")]
    pub rm: Vec<Point>,
    #[serde(rename = "AM")]
    pub am: Vec<Point>,
    #[serde(rename = "INT")]
    pub int: Vec<Point>,
    /// Last-coordinate level to maximal counts.
    pub by_level: BTreeMap<i64, LevelCounts>,
}

/// Classify every candidate in the half-open box `[min, conductor)`.
/// Maximal points cannot touch the conductor in any coordinate.
pub fn maximal_report(e: &ValueSet) -> MaximalReport {
    let mut report = MaximalReport {
        m: Vec::new(),
        rm: Vec::new(),
        am: Vec::new(),
        int: Vec::new(),
        by_level: BTreeMap::new(),
    };
    let last = e.r() - 1;
    for p in e.box_points() {
        if !p.lt_strict(e.conductor()) {
            continue;
        }
        let class = classify_point(e, p).expect("box points are members");
        if let PointClass::Maximal { relative, absolute } = class {
            report.m.push(p.clone());
            let level = report.by_level.entry(p.coord(last)).or_default();
            if relative {
                report.rm.push(p.clone());
                level.rm += 1;
            }
            if absolute {
                report.am.push(p.clone());
                level.am += 1;
            }
            if !relative && !absolute {
                report.int.push(p.clone());
            }
        }
    }
    report
}

/// Sufficient criterion for a relative maximal: some `i` with empty
/// single-index fiber whose pair fibers `F_{i,j}` are all nonempty. The pair
/// fibers must be proper, so this returns false for `r <= 2`.
pub fn relative_criterion(e: &ValueSet, a: &Point) -> Result<bool> {
    if !e.contains(a)? {
        return Err(Error::PointNotInSet { point: a.clone() });
    }
    let r = e.r();
    if r <= 2 {
        return Ok(false);
    }
    for i in 0..r {
        if fiber_witness(e, a, &IndexSet::singleton(i), false).is_some() {
            continue;
        }
        let all_pairs = (0..r).filter(|&j| j != i).all(|j| {
            let pair = IndexSet::new([i, j], r).expect("two indices");
            fiber_witness(e, a, &pair, false).is_some()
        });
        if all_pairs {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Sufficient criterion for an absolute maximal: every proper fiber through
/// `i` is empty.
pub fn absolute_criterion(e: &ValueSet, a: &Point, i: usize) -> Result<bool> {
    if i >= e.r() {
        return Err(Error::IndexOutOfRange { index: i, r: e.r() });
    }
    if !e.contains(a)? {
        return Err(Error::PointNotInSet { point: a.clone() });
    }
    let r = e.r();
    for mask in 1u32..(1 << r) - 1 {
        if mask & (1 << i) == 0 {
            continue;
        }
        let j = IndexSet::new((0..r).filter(|k| mask & (1 << k) != 0), r)
            .expect("nonempty by mask");
        if fiber_witness(e, a, &j, false).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An axis-aligned rectangle in a fixed last-coordinate plane of `Z^3`,
/// spanned by two corner points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub a: Point,
    pub b: Point,
}

impl Rect {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        if a.dim() != 3 || b.dim() != 3 {
            return Err(Error::WrongDimension {
                required: 3,
                actual: a.dim().max(b.dim()),
            });
        }
        if a.coord(2) != b.coord(2) {
            return Err(Error::CornersNotAbsolute);
        }
        Ok(Rect { a, b })
    }

    fn lo(&self) -> Point {
        self.a.meet(&self.b).expect("dims equal")
    }

    fn hi(&self) -> Point {
        self.a.join(&self.b).expect("dims equal")
    }
}

/// Adjacent pairs of relative maximals at a last-coordinate level of an
/// `r = 3` set: pairs `(b, b')` with `b_1 < b'_1` and no relative maximal
/// strictly inside the open rectangle they span in the level plane. Same-level
/// maximals descend in the second coordinate as the first grows, so the pairs
/// are the consecutive ones: `s` maximals at a level yield `s - 1` pairs,
/// returned in increasing first coordinate.
pub fn adjacent_rm_pairs(e: &ValueSet, level: i64) -> Result<Vec<(Point, Point)>> {
    if e.r() != 3 {
        return Err(Error::WrongDimension {
            required: 3,
            actual: e.r(),
        });
    }
    let report = maximal_report(e);
    let mut at_level: Vec<Point> = report
        .rm
        .into_iter()
        .filter(|p| p.coord(2) == level)
        .collect();
    at_level.sort_by_key(|p| (p.coord(0), p.coord(1)));
    let strictly_inside = |lo: i64, x: i64, hi: i64| lo.min(hi) < x && x < lo.max(hi);
    let mut pairs = Vec::new();
    for (k, a) in at_level.iter().enumerate() {
        for b in &at_level[k + 1..] {
            if a.coord(0) >= b.coord(0) {
                continue;
            }
            let blocked = at_level.iter().any(|t| {
                strictly_inside(a.coord(0), t.coord(0), b.coord(0))
                    && strictly_inside(a.coord(1), t.coord(1), b.coord(1))
            });
            if !blocked {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(pairs)
}

/// How an absolute maximal of an `r = 3` set arises from the surrounding
/// relative maximals and plane projections. Every absolute maximal matches
/// one of the three shapes; the classifier returning `None` would contradict
/// the axioms and is asserted against in the test suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsoluteOrigin {
    /// The componentwise join of an adjacent pair of relative maximals.
    AdjacentRmJoin,
    /// Shares one plane projection through the last axis with a relative
    /// maximal while the other plane projection is maximal in its projection
    /// set.
    RmAndEdge,
    /// Both plane projections through the last axis are maximal in their
    /// projection sets.
    BothEdges,
}

/// Classify how the absolute maximal `a` of an `r = 3` set arises. Checks the
/// three shapes in order and returns the first match.
pub fn absolute_origin(e: &ValueSet, a: &Point) -> Result<Option<AbsoluteOrigin>> {
    if e.r() != 3 {
        return Err(Error::WrongDimension {
            required: 3,
            actual: e.r(),
        });
    }
    if !classify_point(e, a)?.is_absolute() {
        return Err(Error::PointNotInSet { point: a.clone() });
    }
    let level = a.coord(2);
    for (b, b2) in adjacent_rm_pairs(e, level)? {
        if b.join(&b2)? == *a {
            return Ok(Some(AbsoluteOrigin::AdjacentRmJoin));
        }
    }
    let rm_at_level: Vec<Point> = maximal_report(e)
        .rm
        .into_iter()
        .filter(|p| p.coord(2) == level)
        .collect();
    let rm_shares_first = rm_at_level.iter().any(|p| p.coord(0) == a.coord(0));
    let rm_shares_second = rm_at_level.iter().any(|p| p.coord(1) == a.coord(1));
    let edge_maximal = |keep: [usize; 2], coords: [i64; 2]| -> Result<bool> {
        let j = IndexSet::new(keep, 3)?;
        let proj = e.project(&j)?;
        let q = Point::from(coords);
        if !proj.contains(&q)? {
            return Ok(false);
        }
        Ok(classify_point(&proj, &q)?.is_maximal())
    };
    let first_edge = edge_maximal([0, 2], [a.coord(0), level])?;
    let second_edge = edge_maximal([1, 2], [a.coord(1), level])?;
    if (rm_shares_first && second_edge) || (rm_shares_second && first_edge) {
        return Ok(Some(AbsoluteOrigin::RmAndEdge));
    }
    if first_edge && second_edge {
        return Ok(Some(AbsoluteOrigin::BothEdges));
    }
    Ok(None)
}

/// Does the closed rectangle spanned by two same-level absolute maximals
/// contain a relative maximal? The corners must be absolute maximals of `e`.
pub fn rect_contains_rm(e: &ValueSet, rect: &Rect) -> Result<bool> {
    if e.r() != 3 {
        return Err(Error::WrongDimension {
            required: 3,
            actual: e.r(),
        });
    }
    for corner in [&rect.a, &rect.b] {
        if !classify_point(e, corner)?.is_absolute() {
            return Err(Error::CornersNotAbsolute);
        }
    }
    let (lo, hi) = (rect.lo(), rect.hi());
    let report = maximal_report(e);
    Ok(report.rm.iter().any(|p| lo.le(p) && p.le(&hi)))
}

/// Verify the generation property over the box: a lattice point whose
/// `(r-1)`-projections are all members belongs to `e` exactly when it avoids
/// every lattice fiber of a relative maximal. Vacuous at `r = 1`.
pub fn generation_check(e: &ValueSet) -> bool {
    let r = e.r();
    if r < 2 {
        return true;
    }
    let mut projections = Vec::with_capacity(r);
    for omit in 0..r {
        let j = IndexSet::new((0..r).filter(|&i| i != omit), r).expect("r >= 2");
        let proj = match e.project(&j) {
            Ok(p) => p,
            Err(_) => return false,
        };
        projections.push((j, proj));
    }
    let rm = maximal_report(e).rm;
    for alpha in box_lattice(e.min(), e.conductor()) {
        let hypotheses = projections
            .iter()
            .all(|(j, proj)| proj.member(&alpha.restrict(j)));
        if !hypotheses {
            continue;
        }
        let blocked = rm.iter().any(|beta| in_lattice_fiber(&alpha, beta));
        let is_member = e.member(&alpha);
        if is_member != !blocked {
            return false;
        }
    }
    true
}

/// Rebuild a value set over the box `[m, gamma]` from its `r` projections of
/// dimension `r - 1` and its relative maximals.
///
/// `projections[k]` must be the projection omitting coordinate `k`. A lattice
/// point is a member iff each of its projections is a member of the matching
/// projection set and it avoids every lattice fiber of a relative maximal.
/// The result is normalized and validated; inconsistent inputs fail.
pub fn reconstruct(
    projections: &[ValueSet],
    rm: &[Point],
    m: &Point,
    gamma: &Point,
) -> Result<ValueSet> {
    let r = m.dim();
    if r < 2 {
        return Err(Error::DimensionTooSmall { min_r: 2, actual: r });
    }
    if gamma.dim() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: gamma.dim(),
        });
    }
    if projections.len() != r || projections.iter().any(|p| p.r() != r - 1) {
        return Err(Error::BadProjections {
            expected: r,
            dims: r - 1,
            got: projections.len(),
        });
    }
    for p in rm {
        if p.dim() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: p.dim(),
            });
        }
    }
    let omitted: Vec<IndexSet> = (0..r)
        .map(|omit| IndexSet::new((0..r).filter(|&i| i != omit), r).expect("r >= 2"))
        .collect();
    let mut points = Vec::new();
    for alpha in box_lattice(m, gamma) {
        let projected_in = omitted
            .iter()
            .zip(projections)
            .all(|(j, proj)| proj.member(&alpha.restrict(j)));
        if !projected_in {
            continue;
        }
        if rm.iter().any(|beta| in_lattice_fiber(&alpha, beta)) {
            continue;
        }
        points.push(alpha);
    }
    ValueSet::normalize(r, m.clone(), gamma.clone(), points)
}
