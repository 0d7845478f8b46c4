//! Colengths of value sets, by four independent routes.
//!
//! The colength of a value set `E` at a corner `g` dominating the conductor
//! counts, along any monotone staircase from the minimum to `g`, the unit
//! steps whose closed single-axis fiber is inhabited. The count is path
//! independent. Three further routes reach the same number: saturated chains
//! of members, a recursion that drops the last coordinate, and closed
//! formulas for two and three branches. The routes share no code beyond
//! fiber queries, so agreement is a meaningful cross-check; [`all_methods`]
//! runs every applicable one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::maximals::{self, FiberQuery};
use crate::point::{box_lattice, IndexSet, Point};
use crate::valueset::ValueSet;
use crate::{Error, Result};

/// Computation route for a colength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Chain,
    Saturated,
    Recursive,
    Closed,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Method::Chain => "chain",
            Method::Saturated => "saturated",
            Method::Recursive => "recursive",
            Method::Closed => "closed",
        };
        f.write_str(name)
    }
}

/// A colength value together with the evidence the route produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColengthReport {
    pub method: Method,
    /// Corner the colength was evaluated at.
    pub gamma: Point,
    pub value: i64,
    pub breakdown: Breakdown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Breakdown {
    /// Every unit step of the staircase, flagged when it carried length.
    Chain { steps: Vec<ChainStep> },
    /// The member chain from the minimum to the corner; value = links.
    Saturated { chain: Vec<Point> },
    /// One branch: members of the set below the corner.
    Base { members: i64 },
    /// Two branches: spans minus per-branch gaps minus maximals.
    ClosedTwo {
        spans: Vec<i64>,
        gaps: Vec<usize>,
        maximals: usize,
    },
    /// Three branches: spans minus gaps and pair maximals, corrected by
    /// relative and absolute maximal counts.
    ClosedThree {
        spans: Vec<i64>,
        gaps: Vec<usize>,
        pair_maximals: Vec<usize>,
        relative: usize,
        absolute: usize,
    },
    Recursive(RecursiveTrace),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainStep {
    pub axis: usize,
    pub counted: bool,
}

/// One unrolling of the last-coordinate recursion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecursiveTrace {
    /// Colength of the projection dropping the last coordinate, at the
    /// restricted corner.
    pub prefix_value: i64,
    /// Corner minus minimum in the last coordinate.
    pub span: i64,
    /// Gap count of the last-coordinate projection.
    pub gaps: usize,
    /// Last coordinates of relative maximals, over every projection keeping
    /// the last axis and at least one other; sorted and deduplicated.
    pub blocked_levels: Vec<i64>,
    /// The level set each projection contributed to `blocked_levels`.
    pub contributors: Vec<UnionContributor>,
    /// The blocked levels never collide with the projection's gaps.
    pub gaps_disjoint: bool,
    /// Replacing relative maximals by all maximals yields the same levels.
    pub union_stable: bool,
}

/// Levels one projection feeds into the blocked-level union.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionContributor {
    /// Axes kept by the projection, increasing; always ends in the last axis.
    pub axes: Vec<usize>,
    /// Last coordinates of the projection's relative maximals, sorted and
    /// deduplicated.
    pub levels: Vec<i64>,
}

fn check_gamma(e: &ValueSet, gamma: &Point) -> Result<()> {
    if gamma.dim() != e.r() {
        return Err(Error::DimensionMismatch {
            expected: e.r(),
            got: gamma.dim(),
        });
    }
    for i in 0..e.r() {
        if gamma.coord(i) < e.conductor().coord(i) {
            return Err(Error::GammaBelowConductor { index: i });
        }
    }
    Ok(())
}

/// Does the unit step from `at` along `axis` carry length? True iff some
/// member agrees with `at` on `axis` and weakly dominates it elsewhere.
pub fn step(e: &ValueSet, at: &Point, axis: usize) -> Result<bool> {
    let q = FiberQuery::closed(at.clone(), IndexSet::singleton(axis));
    Ok(maximals::fiber_nonempty(e, &q)?.is_some())
}

/// A monotone staircase: a start point and the axis of each unit step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    start: Point,
    axes: Vec<usize>,
}

impl Chain {
    pub fn new(start: Point, axes: Vec<usize>) -> Result<Self> {
        let r = start.dim();
        if let Some(&bad) = axes.iter().find(|&&a| a >= r) {
            return Err(Error::IndexOutOfRange { index: bad, r });
        }
        Ok(Chain { start, axes })
    }

    /// The staircase from `from` to `to` exhausting axis 0 first, then
    /// axis 1, and so on.
    pub fn axis_ordered(from: &Point, to: &Point) -> Result<Self> {
        if from.dim() != to.dim() {
            return Err(Error::DimensionMismatch {
                expected: from.dim(),
                got: to.dim(),
            });
        }
        if !from.le(to) {
            return Err(Error::BadChain {
                reason: format!("target {to} does not dominate the start {from}"),
            });
        }
        let mut axes = Vec::new();
        for i in 0..from.dim() {
            for _ in 0..(to.coord(i) - from.coord(i)) {
                axes.push(i);
            }
        }
        Ok(Chain { start: from.clone(), axes })
    }

    pub fn start(&self) -> &Point {
        &self.start
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn end(&self) -> Point {
        let mut end = self.start.clone();
        for &a in &self.axes {
            end = end.bumped(a, 1);
        }
        end
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }
}

/// Staircase colength along the default axis-ordered chain.
pub fn chain(e: &ValueSet, gamma: &Point) -> Result<ColengthReport> {
    check_gamma(e, gamma)?;
    along(e, &Chain::axis_ordered(e.min(), gamma)?)
}

/// Staircase colength along a caller-supplied chain. The chain must start
/// at the minimum and end at a corner dominating the conductor.
pub fn along(e: &ValueSet, path: &Chain) -> Result<ColengthReport> {
    if path.start() != e.min() {
        return Err(Error::BadChain {
            reason: format!(
                "chain starts at {}, expected the minimum {}",
                path.start(),
                e.min()
            ),
        });
    }
    let end = path.end();
    check_gamma(e, &end)?;
    let mut at = path.start().clone();
    let mut steps = Vec::with_capacity(path.len());
    let mut value = 0i64;
    for &axis in path.axes() {
        let counted = step(e, &at, axis)?;
        if counted {
            value += 1;
        }
        steps.push(ChainStep { axis, counted });
        at = at.bumped(axis, 1);
    }
    Ok(ColengthReport {
        method: Method::Chain,
        gamma: end,
        value,
        breakdown: Breakdown::Chain { steps },
    })
}

/// Colength as the link count of a saturated chain of members from the
/// minimum to the corner: consecutive members with no member strictly
/// between them. Inside the conductor box the next member is the first one
/// in lexicographic order that dominates the current link, which is minimal
/// in the product order; past the conductor every unit step is a link.
pub fn saturated(e: &ValueSet, gamma: &Point) -> Result<ColengthReport> {
    check_gamma(e, gamma)?;
    let mut chain = vec![e.min().clone()];
    let mut at = e.min().clone();
    while &at != e.conductor() {
        let next = e
            .box_points()
            .iter()
            .find(|q| at.le(q) && **q != at)
            .expect("the conductor closes every chain")
            .clone();
        chain.push(next.clone());
        at = next;
    }
    for i in 0..e.r() {
        for _ in 0..(gamma.coord(i) - e.conductor().coord(i)) {
            at = at.bumped(i, 1);
            chain.push(at.clone());
        }
    }
    Ok(ColengthReport {
        method: Method::Saturated,
        gamma: gamma.clone(),
        value: (chain.len() - 1) as i64,
        breakdown: Breakdown::Saturated { chain },
    })
}

/// Closed formula for two branches: spans minus per-branch gap counts minus
/// the number of maximal points.
pub fn closed_two(e: &ValueSet, gamma: &Point) -> Result<ColengthReport> {
    if e.r() != 2 {
        return Err(Error::WrongDimension {
            required: 2,
            actual: e.r(),
        });
    }
    check_gamma(e, gamma)?;
    let spans: Vec<i64> = (0..2).map(|i| gamma.coord(i) - e.min().coord(i)).collect();
    let gaps: Vec<usize> = (0..2)
        .map(|i| e.gaps(i).map(|g| g.len()))
        .collect::<Result<_>>()?;
    let maximals = maximals::maximal_report(e).m.len();
    let value = spans.iter().sum::<i64>() - gaps.iter().sum::<usize>() as i64 - maximals as i64;
    Ok(ColengthReport {
        method: Method::Closed,
        gamma: gamma.clone(),
        value,
        breakdown: Breakdown::ClosedTwo { spans, gaps, maximals },
    })
}

/// Closed formula for three branches: spans minus per-branch gaps, minus
/// maximals of the three pair projections, minus relative maximals, plus
/// absolute maximals.
pub fn closed_three(e: &ValueSet, gamma: &Point) -> Result<ColengthReport> {
    if e.r() != 3 {
        return Err(Error::WrongDimension {
            required: 3,
            actual: e.r(),
        });
    }
    check_gamma(e, gamma)?;
    let spans: Vec<i64> = (0..3).map(|i| gamma.coord(i) - e.min().coord(i)).collect();
    let gaps: Vec<usize> = (0..3)
        .map(|i| e.gaps(i).map(|g| g.len()))
        .collect::<Result<_>>()?;
    let mut pair_maximals = Vec::with_capacity(3);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let pair = e.project(&IndexSet::new([i, j], 3)?)?;
        pair_maximals.push(maximals::maximal_report(&pair).m.len());
    }
    let report = maximals::maximal_report(e);
    let (relative, absolute) = (report.rm.len(), report.am.len());
    let value = spans.iter().sum::<i64>()
        - gaps.iter().sum::<usize>() as i64
        - pair_maximals.iter().sum::<usize>() as i64
        - relative as i64
        + absolute as i64;
    Ok(ColengthReport {
        method: Method::Closed,
        gamma: gamma.clone(),
        value,
        breakdown: Breakdown::ClosedThree {
            spans,
            gaps,
            pair_maximals,
            relative,
            absolute,
        },
    })
}

/// Recursion on the last coordinate. For one branch the colength is the
/// number of members below the corner. Otherwise it is the colength of the
/// drop-last projection at the restricted corner, plus the last span, minus
/// the gaps of the last-coordinate projection, minus the number of levels
/// blocked by a relative maximal of some projection keeping the last axis.
pub fn recursive(e: &ValueSet, gamma: &Point) -> Result<ColengthReport> {
    check_gamma(e, gamma)?;
    let r = e.r();
    if r == 1 {
        let inside = e.box_points().len() as i64 - 1;
        let members = inside + gamma.coord(0) - e.conductor().coord(0);
        return Ok(ColengthReport {
            method: Method::Recursive,
            gamma: gamma.clone(),
            value: members,
            breakdown: Breakdown::Base { members },
        });
    }
    let last = r - 1;
    let prefix = IndexSet::new(0..last, r)?;
    let sub = recursive(&e.project(&prefix)?, &gamma.restrict(&prefix))?;
    let span = gamma.coord(last) - e.min().coord(last);
    let gap_set = e.gaps(last)?;
    let mut rm_levels = BTreeSet::new();
    let mut m_levels = BTreeSet::new();
    let mut contributors = Vec::new();
    for mask in 1u32..1 << r {
        if mask & (1 << last) == 0 || mask.count_ones() < 2 {
            continue;
        }
        let j = IndexSet::new((0..r).filter(|i| mask & (1 << i) != 0), r)?;
        let part = if j.is_full(r) { e.clone() } else { e.project(&j)? };
        // `last` is the largest axis, so it stays last after restriction.
        let pos = j.len() - 1;
        let report = maximals::maximal_report(&part);
        let own: BTreeSet<i64> = report.rm.iter().map(|p| p.coord(pos)).collect();
        rm_levels.extend(own.iter().copied());
        m_levels.extend(report.m.iter().map(|p| p.coord(pos)));
        contributors.push(UnionContributor {
            axes: j.as_slice().to_vec(),
            levels: own.into_iter().collect(),
        });
    }
    let value = sub.value + span - gap_set.len() as i64 - rm_levels.len() as i64;
    let trace = RecursiveTrace {
        prefix_value: sub.value,
        span,
        gaps: gap_set.len(),
        blocked_levels: rm_levels.iter().copied().collect(),
        contributors,
        gaps_disjoint: rm_levels.is_disjoint(&gap_set),
        union_stable: rm_levels == m_levels,
    };
    Ok(ColengthReport {
        method: Method::Recursive,
        gamma: gamma.clone(),
        value,
        breakdown: Breakdown::Recursive(trace),
    })
}

/// Dispatch on a method name; `Closed` picks the formula matching `r`.
pub fn by_method(e: &ValueSet, method: Method, gamma: &Point) -> Result<ColengthReport> {
    match method {
        Method::Chain => chain(e, gamma),
        Method::Saturated => saturated(e, gamma),
        Method::Recursive => recursive(e, gamma),
        Method::Closed => match e.r() {
            2 => closed_two(e, gamma),
            3 => closed_three(e, gamma),
            r => Err(Error::WrongDimension {
                required: if r < 2 { 2 } else { 3 },
                actual: r,
            }),
        },
    }
}

/// Run every method applicable at this `r`.
pub fn all_methods(e: &ValueSet, gamma: &Point) -> Result<Vec<ColengthReport>> {
    let mut methods = vec![Method::Chain, Method::Saturated, Method::Recursive];
    if e.r() == 2 || e.r() == 3 {
        methods.push(Method::Closed);
    }
    methods.into_iter().map(|m| by_method(e, m, gamma)).collect()
}

/// Do all reports carry one value?
pub fn agree(reports: &[ColengthReport]) -> bool {
    reports.windows(2).all(|w| w[0].value == w[1].value)
}

/// The distance between nested value sets, with colengths on both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: i64,
    pub gamma: Point,
    pub big_colength: i64,
    pub small_colength: i64,
    pub method: Method,
    /// Term-by-term expansion, present for three branches.
    pub terms: Option<DistanceTerms>,
}

/// The three-branch distance split into intrinsic differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceTerms {
    /// How far the small minimum sits above the big one, summed.
    pub min_shift: i64,
    /// Per-branch gap surplus of the small set.
    pub gap_surplus: i64,
    /// Pair-projection maximal surplus of the small set.
    pub pair_maximal_surplus: i64,
    /// Relative maximal surplus of the small set.
    pub relative_surplus: i64,
    /// Absolute maximals the big set has beyond the small one.
    pub absolute_deficit: i64,
}

impl DistanceTerms {
    pub fn total(&self) -> i64 {
        self.min_shift
            + self.gap_surplus
            + self.pair_maximal_surplus
            + self.relative_surplus
            + self.absolute_deficit
    }
}

/// Distance from `small` up to `big`: the colength difference at a common
/// corner, independent of which corner is used. Fails with a witness when
/// `small` is not contained in `big`.
pub fn distance(big: &ValueSet, small: &ValueSet, gamma: Option<&Point>) -> Result<DistanceReport> {
    if small.r() != big.r() {
        return Err(Error::DimensionMismatch {
            expected: big.r(),
            got: small.r(),
        });
    }
    let join = big.conductor().join(small.conductor())?;
    // Inclusion is decidable on the joint box: capping beyond it changes
    // neither membership.
    for alpha in box_lattice(small.min(), &join) {
        if small.member(&alpha) && !big.member(&alpha) {
            return Err(Error::NotNested { witness: alpha });
        }
    }
    let gamma = match gamma {
        Some(g) => {
            if g.dim() != big.r() {
                return Err(Error::DimensionMismatch {
                    expected: big.r(),
                    got: g.dim(),
                });
            }
            for i in 0..big.r() {
                if g.coord(i) < join.coord(i) {
                    return Err(Error::GammaBelowConductor { index: i });
                }
            }
            g.clone()
        }
        None => join,
    };
    let method = match big.r() {
        2 | 3 => Method::Closed,
        _ => Method::Chain,
    };
    let big_report = by_method(big, method, &gamma)?;
    let small_report = by_method(small, method, &gamma)?;
    let value = big_report.value - small_report.value;
    let terms = if big.r() == 3 {
        let mut gap_surplus = 0i64;
        let mut min_shift = 0i64;
        for i in 0..3 {
            min_shift += small.min().coord(i) - big.min().coord(i);
            gap_surplus += small.gaps(i)?.len() as i64 - big.gaps(i)?.len() as i64;
        }
        let mut pair_maximal_surplus = 0i64;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let axes = IndexSet::new([i, j], 3)?;
            let small_pair = maximals::maximal_report(&small.project(&axes)?);
            let big_pair = maximals::maximal_report(&big.project(&axes)?);
            pair_maximal_surplus += small_pair.m.len() as i64 - big_pair.m.len() as i64;
        }
        let small_report = maximals::maximal_report(small);
        let big_report = maximals::maximal_report(big);
        Some(DistanceTerms {
            min_shift,
            gap_surplus,
            pair_maximal_surplus,
            relative_surplus: small_report.rm.len() as i64 - big_report.rm.len() as i64,
            absolute_deficit: big_report.am.len() as i64 - small_report.am.len() as i64,
        })
    } else {
        None
    };
    Ok(DistanceReport {
        value,
        gamma,
        big_colength: big_report.value,
        small_colength: small_report.value,
        method,
        terms,
    })
}

/// Level-by-level audit of absolute maximal counts for three branches.
///
/// Write `a` when the level (a value of the last coordinate) hosts a maximal
/// of the projection onto axes `{0, 2}`, `b` for `{1, 2}`, and count the
/// relative maximals of the full set at the level as `s`. A level qualifies
/// for absolute maximals when `s > 0` or when it carries both `a` and `b`,
/// and then falls into exactly one of five cases with an exact prediction:
///
/// | case  | tags            | predicted |
/// |-------|-----------------|-----------|
/// | `i`   | `a`, `s > 0`    | `s`       |
/// | `ii`  | `b`, `s > 0`    | `s`       |
/// | `iii` | `a` and `b`     | `1`       |
/// | `iv`  | all three       | `s + 1`   |
/// | `v`   | `s > 0` alone   | `s - 1`   |
///
/// Every case is the one formula `a + b + s - 1`. Non-qualifying levels are
/// reported as case `none` and must host no absolute maximal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelAudit {
    pub level: i64,
    pub in_a: bool,
    pub in_b: bool,
    /// Relative maximals of the full set at this level.
    pub relative: usize,
    /// Absolute maximals of the full set at this level.
    pub absolute: usize,
    pub case: String,
    pub predicted: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaAudit {
    pub levels: Vec<LevelAudit>,
    /// Sum of the per-level predictions; must equal the absolute count.
    pub eta: i64,
    pub absolute_total: usize,
    /// Levels below the conductor whose unit step along the last axis at the
    /// corner carries no length, counted directly from the set.
    pub blocked_direct: usize,
    /// The same count from the audit: last-projection gaps plus maximals of
    /// the two pair projections plus relative maximals minus eta.
    pub blocked_formula: i64,
    pub all_pass: bool,
}

/// Audit the three-branch level accounting of absolute maximals.
pub fn eta_audit(e: &ValueSet) -> Result<EtaAudit> {
    if e.r() != 3 {
        return Err(Error::WrongDimension {
            required: 3,
            actual: e.r(),
        });
    }
    let a_report = maximals::maximal_report(&e.project(&IndexSet::new([0, 2], 3)?)?);
    let b_report = maximals::maximal_report(&e.project(&IndexSet::new([1, 2], 3)?)?);
    let a_levels: BTreeSet<i64> = a_report.m.iter().map(|p| p.coord(1)).collect();
    let b_levels: BTreeSet<i64> = b_report.m.iter().map(|p| p.coord(1)).collect();
    let full = maximals::maximal_report(e);
    let mut rm_at: BTreeMap<i64, usize> = BTreeMap::new();
    for p in &full.rm {
        *rm_at.entry(p.coord(2)).or_default() += 1;
    }
    let mut am_at: BTreeMap<i64, usize> = BTreeMap::new();
    for p in &full.am {
        *am_at.entry(p.coord(2)).or_default() += 1;
    }
    let mut tagged: BTreeSet<i64> = a_levels.union(&b_levels).copied().collect();
    tagged.extend(rm_at.keys());
    let mut levels = Vec::new();
    let mut eta = 0i64;
    let mut all_pass = true;
    for &level in tagged.iter().chain(am_at.keys().filter(|l| !tagged.contains(l))) {
        let in_a = a_levels.contains(&level);
        let in_b = b_levels.contains(&level);
        let relative = rm_at.get(&level).copied().unwrap_or(0);
        let absolute = am_at.get(&level).copied().unwrap_or(0);
        let qualifies = relative > 0 || (in_a && in_b);
        let predicted = if qualifies {
            in_a as i64 + in_b as i64 + relative as i64 - 1
        } else {
            0
        };
        let case = if !qualifies {
            "none"
        } else if relative == 0 {
            "iii"
        } else {
            match (in_a, in_b) {
                (true, false) => "i",
                (false, true) => "ii",
                (true, true) => "iv",
                (false, false) => "v",
            }
        };
        let pass = predicted == absolute as i64;
        if !pass {
            all_pass = false;
        }
        eta += predicted;
        levels.push(LevelAudit {
            level,
            in_a,
            in_b,
            relative,
            absolute,
            case: case.to_string(),
            predicted,
            pass,
        });
    }
    let gaps = e.gaps(2)?;
    let g = e.conductor();
    let mut blocked_direct = 0usize;
    for t in e.min().coord(2)..g.coord(2) {
        if !step(e, &g.with_coord(2, t), 2)? {
            blocked_direct += 1;
        }
    }
    let blocked_formula = gaps.len() as i64
        + a_report.m.len() as i64
        + b_report.m.len() as i64
        + full.rm.len() as i64
        - eta;
    if blocked_direct as i64 != blocked_formula {
        all_pass = false;
    }
    Ok(EtaAudit {
        levels,
        eta,
        absolute_total: full.am.len(),
        blocked_direct,
        blocked_formula,
        all_pass,
    })
}
