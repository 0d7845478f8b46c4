//! Finite representation of value sets and the axioms they must satisfy.
//!
//! A value set `E` of `Z^r` is determined by three axioms:
//!
//! * (A) closure under componentwise minimum,
//! * (B) for distinct members `a`, `b` sharing coordinate `i` there is a
//!   member `w` with `w_i > a_i`, `w_j >= min(a_j, b_j)` elsewhere, with
//!   equality forced wherever `a_j != b_j`,
//! * (C) a least element `gamma` with `gamma + N^r` contained in `E`.
//!
//! Such a set is infinite but fully determined by its points inside the box
//! `[m, gamma]`, where `m` is the unique minimum: membership of any `a >= m`
//! is decided by capping, `a` is a member iff `min(a, gamma)` (taken
//! componentwise) is a stored box point. Capping downwards is exact by
//! axiom (A); extension upwards from a box point sitting on the conductor
//! face follows from (A) and (C). The capped rule is enforced here as the
//! representation contract and is cross-checked against the power-series
//! oracle in the test suite.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::point::{box_lattice, IndexSet, Point};
use crate::{Error, Result};

/// A value set in capped-box representation. Immutable once constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSet {
    r: usize,
    m: Point,
    gamma: Point,
    /// Lex-sorted, deduplicated, all within `[m, gamma]`.
    points: Vec<Point>,
}

/// Identifies one axiom or structural requirement checked by `validate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Structure,
    UniqueMinimum,
    MinClosure,
    Alternation,
    ConductorMember,
    ConductorMinimal,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Structure => "structure",
            Axiom::UniqueMinimum => "unique minimum",
            Axiom::MinClosure => "min closure (A)",
            Axiom::Alternation => "alternation (B)",
            Axiom::ConductorMember => "conductor membership (C)",
            Axiom::ConductorMinimal => "conductor minimality (C)",
        };
        f.write_str(s)
    }
}

/// A concrete witness for a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Failure {
    /// Box points `a`, `b` whose meet is missing.
    MinAbsent { a: Point, b: Point, missing: Point },
    /// Pair sharing coordinate `index` for which no admissible witness exists.
    NoWitness { a: Point, b: Point, index: usize },
    /// The stated minimum is not a box point.
    MinimumAbsent { m: Point },
    /// A box point not above the stated minimum.
    NotAboveMinimum { point: Point },
    /// `gamma` itself is not a box point.
    ConductorAbsent { gamma: Point },
    /// `gamma - e_index` still dominates, so `gamma` is not minimal.
    ConductorNotMinimal { index: usize },
    /// Malformed representation data.
    Malformed { reason: String },
}

/// Outcome of a single axiom check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    /// First few witnesses on failure; empty when passed.
    pub failures: Vec<Failure>,
}

/// Per-axiom pass/fail with concrete witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<(&AxiomCheck, &Failure)> {
        self.checks
            .iter()
            .find(|c| !c.passed)
            .and_then(|c| c.failures.first().map(|f| (c, f)))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_failure() {
            Some((check, failure)) => {
                let total: usize = self
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .count();
                write!(f, "{} failed ({failure:?}); {total} check(s) failing", check.axiom)
            }
            None => write!(f, "all axioms pass"),
        }
    }
}

const MAX_WITNESSES: usize = 4;

impl ValueSet {
    /// Dimension `r` (number of branches).
    pub fn r(&self) -> usize {
        self.r
    }

    /// The unique minimum of the set.
    pub fn min(&self) -> &Point {
        &self.m
    }

    /// The conductor: least `gamma` with `gamma + N^r` inside the set.
    pub fn conductor(&self) -> &Point {
        &self.gamma
    }

    /// The stored members of `E` inside `[min, conductor]`, lex-sorted.
    pub fn box_points(&self) -> &[Point] {
        &self.points
    }

    /// Componentwise `min(a, gamma)`.
    pub fn cap(&self, a: &Point) -> Point {
        a.meet(&self.gamma).expect("dimension checked by caller")
    }

    /// Membership under the capped rule. Errors on dimension mismatch.
    pub fn contains(&self, a: &Point) -> Result<bool> {
        if a.dim() != self.r {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                got: a.dim(),
            });
        }
        Ok(self.member(a))
    }

    /// Unchecked-membership fast path; `a` must have dimension `r`.
    pub(crate) fn member(&self, a: &Point) -> bool {
        if !self.m.le(a) {
            return false;
        }
        let capped = self.cap(a);
        self.points.binary_search(&capped).is_ok()
    }

    fn has_box_point(&self, p: &Point) -> bool {
        self.points.binary_search(p).is_ok()
    }

    /// Build from explicit parts without normalization. The parts must
    /// already satisfy every axiom, including conductor minimality; this is
    /// the strict path used when reading files.
    pub fn from_parts(r: usize, m: Point, gamma: Point, points: Vec<Point>) -> Result<Self> {
        let candidate = Self::assemble(r, m, gamma, points)?;
        let report = candidate.validate();
        if report.is_valid() {
            Ok(candidate)
        } else {
            Err(Error::Invalid(Box::new(report)))
        }
    }

    /// Build from a generating list of points and a dominating `gamma`.
    ///
    /// Supplied points are capped at `gamma`; the minimum is the
    /// componentwise minimum of the supplied points; `gamma` itself is
    /// inserted. Axioms (A), (B) and the unique minimum are then checked
    /// as-is; nothing is silently completed, so a missing meet is reported
    /// rather than inserted. Afterwards the conductor is shrunk to the true
    /// minimal one and the box re-capped.
    pub fn from_points(r: usize, points: &[Point], gamma: Point) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid(Box::new(ValidationReport {
                checks: vec![AxiomCheck {
                    axiom: Axiom::Structure,
                    passed: false,
                    failures: vec![Failure::Malformed {
                        reason: "no points supplied".into(),
                    }],
                }],
            })));
        }
        for p in points {
            if p.dim() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    got: p.dim(),
                });
            }
        }
        if gamma.dim() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: gamma.dim(),
            });
        }
        let mut m = points[0].clone();
        for p in &points[1..] {
            m = m.meet(p)?;
        }
        let mut box_points: Vec<Point> = points
            .iter()
            .map(|p| p.meet(&gamma).expect("dims checked"))
            .collect();
        box_points.push(gamma.clone());
        Self::normalize(r, m, gamma, box_points)
    }

    /// Shared pipeline: stage-validate (A), (B), unique minimum on the given
    /// box, then shrink the conductor to the minimal one, re-cap, and run the
    /// full validation. Used by `from_points`, `project`, reconstruction,
    /// the corpus generators, and the series oracle.
    pub(crate) fn normalize(
        r: usize,
        m: Point,
        gamma: Point,
        points: Vec<Point>,
    ) -> Result<Self> {
        let staged = Self::assemble(r, m, gamma, points)?;
        let mut failing: Vec<AxiomCheck> = Vec::new();
        for check in [
            staged.check_structure(),
            staged.check_unique_minimum(),
            staged.check_min_closure(),
            staged.check_alternation(),
            staged.check_conductor_member(),
        ] {
            if !check.passed {
                failing.push(check);
            }
        }
        if !failing.is_empty() {
            return Err(Error::Invalid(Box::new(ValidationReport { checks: failing })));
        }
        let shrunk = staged.shrink_conductor();
        let report = shrunk.validate();
        if report.is_valid() {
            Ok(shrunk)
        } else {
            Err(Error::Invalid(Box::new(report)))
        }
    }

    /// Sort, dedup, and bounds-check the raw parts. Structural errors only.
    fn assemble(r: usize, m: Point, gamma: Point, mut points: Vec<Point>) -> Result<Self> {
        if r == 0 {
            return Err(Error::DimensionTooSmall { min_r: 1, actual: 0 });
        }
        if m.dim() != r {
            return Err(Error::DimensionMismatch { expected: r, got: m.dim() });
        }
        if gamma.dim() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: gamma.dim(),
            });
        }
        for p in &points {
            if p.dim() != r {
                return Err(Error::DimensionMismatch { expected: r, got: p.dim() });
            }
        }
        points.sort();
        points.dedup();
        Ok(ValueSet { r, m, gamma, points })
    }

    /// Check every axiom and report pass/fail with witnesses.
    pub fn validate(&self) -> ValidationReport {
        ValidationReport {
            checks: vec![
                self.check_structure(),
                self.check_unique_minimum(),
                self.check_min_closure(),
                self.check_alternation(),
                self.check_conductor_member(),
                self.check_conductor_minimal(),
            ],
        }
    }

    fn check_structure(&self) -> AxiomCheck {
        let mut failures = Vec::new();
        if !self.m.le(&self.gamma) {
            failures.push(Failure::Malformed {
                reason: format!("minimum {} exceeds conductor {}", self.m, self.gamma),
            });
        }
        for p in &self.points {
            if !(self.m.le(p) && p.le(&self.gamma)) {
                failures.push(Failure::Malformed {
                    reason: format!("box point {p} outside [{}, {}]", self.m, self.gamma),
                });
                if failures.len() >= MAX_WITNESSES {
                    break;
                }
            }
        }
        AxiomCheck {
            axiom: Axiom::Structure,
            passed: failures.is_empty(),
            failures,
        }
    }

    fn check_unique_minimum(&self) -> AxiomCheck {
        let mut failures = Vec::new();
        if !self.has_box_point(&self.m) {
            failures.push(Failure::MinimumAbsent { m: self.m.clone() });
        }
        for p in &self.points {
            if !self.m.le(p) {
                failures.push(Failure::NotAboveMinimum { point: p.clone() });
                if failures.len() >= MAX_WITNESSES {
                    break;
                }
            }
        }
        AxiomCheck {
            axiom: Axiom::UniqueMinimum,
            passed: failures.is_empty(),
            failures,
        }
    }

    fn check_min_closure(&self) -> AxiomCheck {
        let mut failures = Vec::new();
        'outer: for (k, a) in self.points.iter().enumerate() {
            for b in &self.points[k + 1..] {
                let meet = a.meet(b).expect("box points share dimension");
                if !self.has_box_point(&meet) {
                    failures.push(Failure::MinAbsent {
                        a: a.clone(),
                        b: b.clone(),
                        missing: meet,
                    });
                    if failures.len() >= MAX_WITNESSES {
                        break 'outer;
                    }
                }
            }
        }
        AxiomCheck {
            axiom: Axiom::MinClosure,
            passed: failures.is_empty(),
            failures,
        }
    }

    /// Axiom (B) over box pairs. The witness search stays inside the box:
    /// a pinned coordinate `min(a_j, b_j)` with `a_j != b_j` is always below
    /// `gamma_j`, and a required strict raise past a coordinate already at
    /// `gamma_i` is realized by a box point sitting on that conductor face,
    /// which extends upward under the capped rule.
    fn check_alternation(&self) -> AxiomCheck {
        let mut failures = Vec::new();
        'outer: for (k, a) in self.points.iter().enumerate() {
            for b in self.points[k + 1..].iter() {
                for i in 0..self.r {
                    if a.coord(i) != b.coord(i) {
                        continue;
                    }
                    if self.alternation_witness(a, b, i).is_none() {
                        failures.push(Failure::NoWitness {
                            a: a.clone(),
                            b: b.clone(),
                            index: i,
                        });
                        if failures.len() >= MAX_WITNESSES {
                            break 'outer;
                        }
                    }
                }
            }
        }
        AxiomCheck {
            axiom: Axiom::Alternation,
            passed: failures.is_empty(),
            failures,
        }
    }

    /// Box representative of a (B)-witness for the pair `(a, b)` at shared
    /// coordinate `i`, or `None` when no witness exists.
    fn alternation_witness(&self, a: &Point, b: &Point, i: usize) -> Option<&Point> {
        let shared = a.coord(i);
        self.points.iter().find(|w| {
            let wi = w.coord(i);
            let raise_ok = wi > shared || (shared == self.gamma.coord(i) && wi == shared);
            if !raise_ok {
                return false;
            }
            (0..self.r).all(|j| {
                if j == i {
                    return true;
                }
                let (aj, bj) = (a.coord(j), b.coord(j));
                if aj != bj {
                    w.coord(j) == aj.min(bj)
                } else {
                    w.coord(j) >= aj
                }
            })
        })
    }

    fn check_conductor_member(&self) -> AxiomCheck {
        let mut failures = Vec::new();
        if !self.has_box_point(&self.gamma) {
            failures.push(Failure::ConductorAbsent {
                gamma: self.gamma.clone(),
            });
        }
        AxiomCheck {
            axiom: Axiom::ConductorMember,
            passed: failures.is_empty(),
            failures,
        }
    }

    /// Under the capped rule, `(gamma - e_i) + N^r` lies inside the set iff
    /// both `gamma` and `gamma - e_i` are box points.
    fn check_conductor_minimal(&self) -> AxiomCheck {
        let mut failures = Vec::new();
        for i in 0..self.r {
            if self.has_box_point(&self.gamma.bumped(i, -1)) {
                failures.push(Failure::ConductorNotMinimal { index: i });
            }
        }
        AxiomCheck {
            axiom: Axiom::ConductorMinimal,
            passed: failures.is_empty(),
            failures,
        }
    }

    /// Greedy per-coordinate descent to the least dominating `gamma`,
    /// followed by re-capping the box points. Sound whenever (A), (B) and
    /// the unique minimum hold, which `normalize` checks beforehand.
    fn shrink_conductor(&self) -> ValueSet {
        let mut g = self.gamma.clone();
        loop {
            let mut lowered = false;
            for i in 0..self.r {
                if g.coord(i) <= self.m.coord(i) {
                    continue;
                }
                let cand = g.bumped(i, -1);
                if self.dominates(&cand) {
                    g = cand;
                    lowered = true;
                }
            }
            if !lowered {
                break;
            }
        }
        if g == self.gamma {
            return self.clone();
        }
        let mut points: Vec<Point> = self
            .points
            .iter()
            .map(|p| p.meet(&g).expect("dims match"))
            .collect();
        points.sort();
        points.dedup();
        ValueSet {
            r: self.r,
            m: self.m.clone(),
            gamma: g,
            points,
        }
    }

    /// Does `g + N^r` lie inside the set, judged by the current box?
    fn dominates(&self, g: &Point) -> bool {
        box_lattice(g, &self.gamma).all(|p| self.member(&p))
    }

    /// Projection onto the coordinates of `j`: the value set of the image.
    ///
    /// The image of the box generates the projection, its conductor is then
    /// minimized (it can drop strictly below the projected conductor), and
    /// the box is re-capped.
    pub fn project(&self, j: &IndexSet) -> Result<ValueSet> {
        if j.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        if let Some(bad) = j.iter().find(|&i| i >= self.r) {
            return Err(Error::IndexOutOfRange { index: bad, r: self.r });
        }
        if j.is_full(self.r) {
            return Ok(self.clone());
        }
        let m = self.m.restrict(j);
        let gamma = self.gamma.restrict(j);
        let points: Vec<Point> = self.points.iter().map(|p| p.restrict(j)).collect();
        ValueSet::normalize(j.len(), m, gamma, points)
    }

    /// Gaps of the branch projection `E_i`: the integers missing from the
    /// numerical set `project(E, {i})` strictly between its minimum and its
    /// conductor.
    pub fn gaps(&self, i: usize) -> Result<BTreeSet<i64>> {
        if i >= self.r {
            return Err(Error::IndexOutOfRange { index: i, r: self.r });
        }
        let line = self.project(&IndexSet::singleton(i))?;
        let lo = line.min().coord(0);
        let hi = line.conductor().coord(0);
        Ok((lo + 1..hi)
            .filter(|&n| !line.member(&Point::new(vec![n])))
            .collect())
    }

    /// The set with coordinates permuted by `perm` (old index `i` moves to
    /// position `perm[i]`). Validity is preserved; useful for symmetry checks.
    pub fn permuted(&self, perm: &[usize]) -> Result<ValueSet> {
        if perm.len() != self.r {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                got: perm.len(),
            });
        }
        let mut seen = vec![false; self.r];
        for &p in perm {
            if p >= self.r || seen[p] {
                return Err(Error::Parse(format!("not a permutation: {perm:?}")));
            }
            seen[p] = true;
        }
        let apply = |p: &Point| {
            let mut c = vec![0i64; self.r];
            for (i, &target) in perm.iter().enumerate() {
                c[target] = p.coord(i);
            }
            Point::new(c)
        };
        ValueSet::normalize(
            self.r,
            apply(&self.m),
            apply(&self.gamma),
            self.points.iter().map(apply).collect(),
        )
    }

    /// The set translated by `shift`. All structure is translation-invariant.
    pub fn translated(&self, shift: &Point) -> Result<ValueSet> {
        if shift.dim() != self.r {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                got: shift.dim(),
            });
        }
        let apply = |p: &Point| {
            Point::new(
                p.coords()
                    .iter()
                    .zip(shift.coords())
                    .map(|(a, s)| a + s)
                    .collect(),
            )
        };
        ValueSet::normalize(
            self.r,
            apply(&self.m),
            apply(&self.gamma),
            self.points.iter().map(apply).collect(),
        )
    }
}

/// Serialized file form of a value set.
#[derive(Debug, Serialize, Deserialize)]
struct SetFile {
    #[serde(default = "default_version")]
    version: u32,
    r: usize,
    min: Vec<i64>,
    conductor: Vec<i64>,
    points: Vec<Vec<i64>>,
}

fn default_version() -> u32 {
    1
}

pub const FORMAT_VERSION: u32 = 1;

impl ValueSet {
    /// JSON form: sorted points, stable field order, newline-terminated.
    pub fn to_json(&self) -> String {
        let file = SetFile {
            version: FORMAT_VERSION,
            r: self.r,
            min: self.m.coords().to_vec(),
            conductor: self.gamma.coords().to_vec(),
            points: self.points.iter().map(|p| p.coords().to_vec()).collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("serializable");
        s.push('\n');
        s
    }

    /// Parse and re-validate a JSON value set. Anything failing the axioms,
    /// including a non-minimal stored conductor, is rejected.
    pub fn from_json(s: &str) -> Result<ValueSet> {
        let file: SetFile = serde_json::from_str(s)?;
        ValueSet::from_parts(
            file.r,
            Point::new(file.min),
            Point::new(file.conductor),
            file.points.into_iter().map(Point::new).collect(),
        )
    }
}
