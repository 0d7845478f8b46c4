//! Seeded random generation of value sets and ideals.
//!
//! Three flavors: products of per-axis sets (which never have maximal
//! points), repaired random samples (min-closed, then grown until every
//! alternation obligation has a witness), and random ideals run through the
//! series engine. Everything is deterministic in the seed, so a failing
//! case can be replayed from its seed alone, and [`shrink`] cuts a failing
//! set down to a minimal example still exhibiting the property.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::maximals::maximal_report;
use crate::point::Point;
use crate::series::{axes_ring, three_lines, two_lines, value_set_auto, BranchIdeal};
use crate::valueset::ValueSet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Product,
    Repair,
    Series,
}

/// Everything needed to regenerate one case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub r: usize,
    /// Upper bound for sampled conductor coordinates.
    pub box_bound: i64,
    pub flavor: Flavor,
}

pub fn generate(spec: &GenSpec) -> Result<ValueSet> {
    match spec.flavor {
        Flavor::Product => gen_product(spec.seed, spec.r, spec.box_bound),
        Flavor::Repair => gen_repair(spec.seed, spec.r, spec.box_bound),
        Flavor::Series => {
            // The ideal is fixed by the seed; only the window widens on an
            // inconclusive verdict.
            for round in 0..4usize {
                let ideal = gen_ideal(spec.seed, spec.r, 12 + 4 * round)?;
                match value_set_auto(&ideal) {
                    Ok(e) => return Ok(e),
                    Err(Error::TruncationInconclusive { .. }) | Err(Error::Unstable { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Err(Error::RetriesExhausted { seed: spec.seed, attempts: 4 })
        }
    }
}

/// A product of independent per-axis sets. Every coordinate can always be
/// raised inside a product, so these have no maximal points at all.
pub fn gen_product(seed: u64, r: usize, box_bound: i64) -> Result<ValueSet> {
    if r == 0 {
        return Err(Error::DimensionTooSmall { min_r: 1, actual: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = box_bound.max(1);
    let mut factors = Vec::with_capacity(r);
    let mut gamma = Vec::with_capacity(r);
    for _ in 0..r {
        let g = rng.gen_range(1..=bound);
        let mut vals = vec![0];
        for v in 1..g - 1 {
            if rng.gen_bool(0.5) {
                vals.push(v);
            }
        }
        vals.push(g);
        factors.push(vals);
        gamma.push(g);
    }
    let mut points = vec![Vec::new()];
    for vals in &factors {
        points = points
            .iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let points: Vec<Point> = points.into_iter().map(Point::new).collect();
    ValueSet::from_points(r, &points, Point::new(gamma))
}

/// A random sample grown into a valid set: min-close, then add the canonical
/// witness for every unmet alternation obligation, repeating to a fixpoint.
/// The box is finite and points are only added, so this terminates; a sample
/// whose fixpoint still fails validation is discarded and redrawn.
pub fn gen_repair(seed: u64, r: usize, box_bound: i64) -> Result<ValueSet> {
    if r == 0 {
        return Err(Error::DimensionTooSmall { min_r: 1, actual: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = box_bound.max(1);
    const ATTEMPTS: u32 = 32;
    for _ in 0..ATTEMPTS {
        let gamma = Point::new((0..r).map(|_| rng.gen_range(1..=bound)).collect());
        // Coordinates come from a small per-axis palette so sampled points
        // actually share coordinates; without that the alternation axiom is
        // mostly vacuous and the repaired sets are structureless.
        let palette: Vec<Vec<i64>> = (0..r)
            .map(|i| {
                let mut vals = vec![0, gamma.coord(i)];
                for _ in 0..2 {
                    vals.push(rng.gen_range(0..=gamma.coord(i)));
                }
                vals
            })
            .collect();
        let mut pts: BTreeSet<Point> = BTreeSet::new();
        pts.insert(Point::new(vec![0; r]));
        pts.insert(gamma.clone());
        let k = rng.gen_range(r + 2..=2 * r + 4);
        for _ in 0..k {
            pts.insert(Point::new(
                (0..r)
                    .map(|i| *palette[i].choose(&mut rng).expect("nonempty"))
                    .collect(),
            ));
        }
        if let Some(e) = repair(r, pts, &gamma) {
            return Ok(e);
        }
    }
    Err(Error::RetriesExhausted { seed, attempts: ATTEMPTS })
}

fn min_close(pts: &mut BTreeSet<Point>) {
    loop {
        let list: Vec<Point> = pts.iter().cloned().collect();
        let mut added = false;
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                let m = a.meet(b).expect("equal dimensions");
                added |= pts.insert(m);
            }
        }
        if !added {
            return;
        }
    }
}

/// Witnesses still owed under the alternation rule, one canonical candidate
/// per unmet pair: pinned coordinates at the pair minimum, the shared
/// coordinate raised by a single step, the rest kept as low as allowed.
/// Low witnesses leave the sampled conductor intact; pushing them to the
/// conductor face instead makes normalization collapse the box.
fn alternation_deficits(r: usize, pts: &BTreeSet<Point>, gamma: &Point) -> Vec<Point> {
    let list: Vec<&Point> = pts.iter().collect();
    let mut missing = Vec::new();
    for (k, a) in list.iter().enumerate() {
        for b in &list[k + 1..] {
            for i in 0..r {
                if a.coord(i) != b.coord(i) {
                    continue;
                }
                let shared = a.coord(i);
                let found = list.iter().any(|w| {
                    let raised =
                        w.coord(i) > shared || (shared == gamma.coord(i) && w.coord(i) == shared);
                    raised
                        && (0..r).all(|j| {
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
                });
                if !found {
                    let z = Point::new(
                        (0..r)
                            .map(|j| {
                                let (aj, bj) = (a.coord(j), b.coord(j));
                                if j == i {
                                    (shared + 1).min(gamma.coord(i))
                                } else if aj != bj {
                                    aj.min(bj)
                                } else {
                                    aj
                                }
                            })
                            .collect(),
                    );
                    missing.push(z);
                }
            }
        }
    }
    missing
}

fn repair(r: usize, mut pts: BTreeSet<Point>, gamma: &Point) -> Option<ValueSet> {
    let volume: i64 = (0..r).map(|i| gamma.coord(i) + 1).product();
    for _ in 0..=volume {
        min_close(&mut pts);
        let missing = alternation_deficits(r, &pts, gamma);
        if missing.is_empty() {
            let list: Vec<Point> = pts.into_iter().collect();
            return ValueSet::from_points(r, &list, gamma.clone()).ok();
        }
        pts.extend(missing);
    }
    None
}

/// A random ideal over one of the fixture rings, with every branch reached
/// by some module generator.
pub fn gen_ideal(seed: u64, r: usize, truncation: usize) -> Result<BranchIdeal> {
    if r < 2 {
        return Err(Error::DimensionTooSmall { min_r: 2, actual: r });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = match r {
        2 => two_lines(truncation),
        3 if seed % 2 == 0 => three_lines(truncation),
        _ => axes_ring(r, truncation),
    };
    let lead: [i64; 4] = [-2, -1, 1, 2];
    let count = rng.gen_range(1..=r);
    let mut module = vec![vec![Vec::new(); r]; count];
    for gen in module.iter_mut() {
        for branch in gen.iter_mut() {
            if !rng.gen_bool(0.75) {
                continue;
            }
            let order = rng.gen_range(0..=2usize);
            let extra = rng.gen_range(0..=1usize);
            let mut coeffs = vec![0i64; order + 1 + extra];
            coeffs[order] = *lead.choose(&mut rng).expect("nonempty");
            for c in coeffs[order + 1..].iter_mut() {
                *c = rng.gen_range(-2..=2);
            }
            *branch = crate::series::int_poly(&coeffs);
        }
    }
    for i in 0..r {
        if module.iter().all(|gen| gen[i].iter().all(num::Zero::is_zero)) {
            let order = rng.gen_range(0..=2usize);
            let mut coeffs = vec![0i64; order + 1];
            coeffs[order] = *lead.choose(&mut rng).expect("nonempty");
            module[i % count][i] = crate::series::int_poly(&coeffs);
        }
    }
    base.with_module(module)
}

/// Greedily remove box points while the property holds, restarting after
/// every successful removal. The result still satisfies `keep` and no single
/// further removal does.
pub fn shrink<F>(e: &ValueSet, keep: F) -> ValueSet
where
    F: Fn(&ValueSet) -> bool,
{
    let r = e.min().dim();
    let mut cur = e.clone();
    'outer: loop {
        let pts = cur.box_points().to_vec();
        for p in &pts {
            if p == cur.min() || p == cur.conductor() {
                continue;
            }
            let rest: Vec<Point> = pts.iter().filter(|q| *q != p).cloned().collect();
            if let Ok(cand) = ValueSet::from_points(r, &rest, cur.conductor().clone()) {
                if keep(&cand) {
                    cur = cand;
                    continue 'outer;
                }
            }
        }
        return cur;
    }
}

/// What a seed sweep of repaired sets actually exercised.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageReport {
    pub scanned: usize,
    pub generated: usize,
    /// Seeds whose set has two or more relative maximals on one level.
    pub rm_pair_seeds: Vec<u64>,
    /// Seeds whose set has two or more absolute maximals on one level.
    pub am_pair_seeds: Vec<u64>,
    pub box_bound: i64,
    pub widenings: u32,
}

impl CoverageReport {
    pub fn covered(&self) -> bool {
        !self.rm_pair_seeds.is_empty() && !self.am_pair_seeds.is_empty()
    }
}

/// Sweep `count` seeds of repaired sets and record which ones produce
/// same-level maximal pairs; widen the box (three times at most) when a kind
/// never shows up.
pub fn coverage(base_seed: u64, count: usize, r: usize, box_bound: i64) -> Result<CoverageReport> {
    let mut bound = box_bound;
    let mut widenings = 0u32;
    loop {
        let mut report = CoverageReport {
            scanned: count,
            generated: 0,
            rm_pair_seeds: Vec::new(),
            am_pair_seeds: Vec::new(),
            box_bound: bound,
            widenings,
        };
        for offset in 0..count as u64 {
            let seed = base_seed.wrapping_add(offset);
            let Ok(e) = gen_repair(seed, r, bound) else {
                continue;
            };
            report.generated += 1;
            let m = maximal_report(&e);
            if m.by_level.values().any(|c| c.rm >= 2) {
                report.rm_pair_seeds.push(seed);
            }
            if m.by_level.values().any(|c| c.am >= 2) {
                report.am_pair_seeds.push(seed);
            }
        }
        if report.covered() || widenings >= 3 {
            return Ok(report);
        }
        bound += 5;
        widenings += 1;
    }
}
