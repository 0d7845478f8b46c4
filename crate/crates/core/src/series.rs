//! Value sets computed from explicit branch series.
//!
//! This is an independent route to everything the combinatorial side builds
//! from stored points. An ideal is given by power series generators over `r`
//! branches, truncated to a window of exact rational coefficients. Linear
//! algebra over the window recovers the value set: a point `a` is a value
//! precisely when, for every axis, constraining orders to exceed `a` on that
//! axis drops the dimension of the constrained module by one. Colengths come
//! out as rank differences. None of this shares code with the staircase
//! engine, so agreement between the two is evidence, not tautology.
//!
//! Truncation is explicit and audited: windows too small for a requested
//! corner are rejected, derived conductors hugging the window bound are
//! rejected, and every published result is recomputed in a wider window and
//! compared before it is returned.

use std::collections::BTreeMap;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::point::{box_lattice, Point};
use crate::valueset::ValueSet;
use crate::{Error, Result};

type Q = BigRational;

/// Rational coefficients from integers, for writing generators inline.
pub fn int_poly(coeffs: &[i64]) -> Vec<Q> {
    coeffs.iter().map(|&c| Q::from_integer(BigInt::from(c))).collect()
}

/// One power series truncated to a window of `truncation + 1` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Q>,
}

impl Series {
    fn windowed(truncation: usize, coeffs: &[Q]) -> Result<Series> {
        if coeffs.len() > truncation + 1 && coeffs[truncation + 1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::BadIdeal {
                reason: format!(
                    "generator has a nonzero coefficient beyond degree {truncation}"
                ),
            });
        }
        let mut cs = coeffs.to_vec();
        cs.resize(truncation + 1, Q::zero());
        Ok(Series { coeffs: cs })
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, d: usize) -> &Q {
        &self.coeffs[d]
    }

    /// Degree of the lowest nonzero coefficient; `None` when the window is
    /// all zero.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.order().is_none()
    }

    fn mul(&self, other: &Series) -> Series {
        let n = self.coeffs.len();
        let mut out = vec![Q::zero(); n];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().take(n - a).enumerate() {
                if !cb.is_zero() {
                    out[a + b] += ca * cb;
                }
            }
        }
        Series { coeffs: out }
    }

    fn minus_constant(&self, c: &Q) -> Series {
        let mut out = self.clone();
        out.coeffs[0] -= c;
        out
    }
}

/// An element of the product of branch series rings: one series per branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchVec {
    comps: Vec<Series>,
}

impl BranchVec {
    fn windowed(r: usize, truncation: usize, branches: &[Vec<Q>]) -> Result<BranchVec> {
        if branches.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: branches.len(),
            });
        }
        let comps = branches
            .iter()
            .map(|b| Series::windowed(truncation, b))
            .collect::<Result<_>>()?;
        Ok(BranchVec { comps })
    }

    pub fn r(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, i: usize) -> &Series {
        &self.comps[i]
    }

    fn is_zero(&self) -> bool {
        self.comps.iter().all(Series::is_zero)
    }

    fn mul(&self, other: &BranchVec) -> BranchVec {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.mul(b))
            .collect();
        BranchVec { comps }
    }

    /// Window coefficients in degree-major order: position `d*r + i` holds
    /// the degree-`d` coefficient of branch `i`.
    fn flatten(&self) -> Vec<Q> {
        let r = self.comps.len();
        let n = self.comps[0].coeffs.len();
        let mut out = vec![Q::zero(); n * r];
        for (i, s) in self.comps.iter().enumerate() {
            for (d, c) in s.coeffs.iter().enumerate() {
                out[d * r + i] = c.clone();
            }
        }
        out
    }
}

/// Exact row space in reduced echelon form, degree-major pivot order.
struct Echelon {
    width: usize,
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(width: usize) -> Echelon {
        Echelon { width, rows: Vec::new(), pivots: Vec::new() }
    }

    fn reduce(&self, row: &mut [Q]) {
        for (i, &p) in self.pivots.iter().enumerate() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (a, b) in row.iter_mut().zip(&self.rows[i]) {
                    *a -= &f * b;
                }
            }
        }
    }

    /// Add a vector to the span. Returns false when it was already inside.
    fn insert(&mut self, mut row: Vec<Q>) -> bool {
        debug_assert_eq!(row.len(), self.width);
        self.reduce(&mut row);
        let Some(lead) = row.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = row[lead].clone();
        for c in row.iter_mut() {
            *c /= &inv;
        }
        for other in self.rows.iter_mut() {
            if !other[lead].is_zero() {
                let f = other[lead].clone();
                for (a, b) in other.iter_mut().zip(&row) {
                    *a -= &f * b;
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < lead);
        self.pivots.insert(at, lead);
        self.rows.insert(at, row);
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn contains(&self, row: &[Q]) -> bool {
        let mut probe = row.to_vec();
        self.reduce(&mut probe);
        probe.iter().all(Q::is_zero)
    }
}

/// An ideal over a branch series ring: ring generators cut out the ring, the
/// module generators span the ideal over it. Coefficients are kept as given;
/// all computation happens in the stated truncation window.
#[derive(Debug, Clone)]
pub struct BranchIdeal {
    r: usize,
    truncation: usize,
    ring_coeffs: Vec<Vec<Vec<Q>>>,
    module_coeffs: Vec<Vec<Vec<Q>>>,
    ring: Vec<BranchVec>,
    module: Vec<BranchVec>,
}

impl BranchIdeal {
    /// Build and check an ideal. `ring` and `module` list generators, each a
    /// per-branch list of polynomial coefficients. Ring generators must share
    /// one constant term across branches (it is subtracted), and every branch
    /// must be reached by some ring generator of positive order.
    pub fn new(
        r: usize,
        truncation: usize,
        ring: Vec<Vec<Vec<Q>>>,
        module: Vec<Vec<Vec<Q>>>,
    ) -> Result<BranchIdeal> {
        if r == 0 {
            return Err(Error::DimensionTooSmall { min_r: 1, actual: 0 });
        }
        if module.is_empty() {
            return Err(Error::BadIdeal { reason: "no module generators".into() });
        }
        let mut ring_norm = Vec::new();
        for gen in &ring {
            let v = BranchVec::windowed(r, truncation, gen)?;
            let c = v.comp(0).coeff(0).clone();
            if (1..r).any(|i| v.comp(i).coeff(0) != &c) {
                return Err(Error::BadIdeal {
                    reason: "ring generator constant terms differ across branches".into(),
                });
            }
            let comps = v.comps.iter().map(|s| s.minus_constant(&c)).collect();
            let v = BranchVec { comps };
            if !v.is_zero() {
                ring_norm.push(v);
            }
        }
        for i in 0..r {
            if ring_norm.iter().all(|g| g.comp(i).is_zero()) {
                return Err(Error::ZeroDivisor { branch: i });
            }
        }
        let module_vecs: Vec<BranchVec> = module
            .iter()
            .map(|gen| BranchVec::windowed(r, truncation, gen))
            .collect::<Result<_>>()?;
        if module_vecs.iter().all(BranchVec::is_zero) {
            return Err(Error::BadIdeal {
                reason: "module generators are zero in the window".into(),
            });
        }
        Ok(BranchIdeal {
            r,
            truncation,
            ring_coeffs: ring,
            module_coeffs: module,
            ring: ring_norm,
            module: module_vecs,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn ring_coefficients(&self) -> &[Vec<Vec<Q>>] {
        &self.ring_coeffs
    }

    pub fn module_coefficients(&self) -> &[Vec<Vec<Q>>] {
        &self.module_coeffs
    }

    /// The same ideal recomputed in a different window. Generators are
    /// polynomials, so this is exact in both directions.
    pub fn with_truncation(&self, truncation: usize) -> Result<BranchIdeal> {
        BranchIdeal::new(
            self.r,
            truncation,
            self.ring_coeffs.clone(),
            self.module_coeffs.clone(),
        )
    }

    /// A different ideal over the same ring.
    pub fn with_module(&self, module: Vec<Vec<Vec<Q>>>) -> Result<BranchIdeal> {
        BranchIdeal::new(self.r, self.truncation, self.ring_coeffs.clone(), module)
    }

    /// The ideal spanned by the pure monomials `t^{gamma_i}` on each branch:
    /// its value set is everything above `gamma`.
    pub fn cut(&self, gamma: &Point) -> Result<BranchIdeal> {
        if gamma.dim() != self.r {
            return Err(Error::DimensionMismatch { expected: self.r, got: gamma.dim() });
        }
        let mut module = Vec::with_capacity(self.r);
        for i in 0..self.r {
            let d = gamma.coord(i);
            if d < 0 || d as usize > self.truncation {
                return Err(Error::BadIdeal {
                    reason: format!("cut exponent {d} outside the window"),
                });
            }
            let mut mono = vec![Q::zero(); d as usize + 1];
            mono[d as usize] = Q::one();
            let mut gen = vec![Vec::new(); self.r];
            gen[i] = mono;
            module.push(gen);
        }
        self.with_module(module)
    }
}

/// Window image of the module: reduced rows spanning every product of a
/// module generator by a monomial in the ring generators.
struct ModuleBasis {
    r: usize,
    truncation: usize,
    ech: Echelon,
}

fn module_basis(ideal: &BranchIdeal) -> Result<ModuleBasis> {
    let width = (ideal.truncation + 1) * ideal.r;
    let mut ech = Echelon::new(width);
    let mut frontier: Vec<BranchVec> = Vec::new();
    for f in &ideal.module {
        if ech.insert(f.flatten()) {
            frontier.push(f.clone());
        }
    }
    let mut degree = 0usize;
    while !frontier.is_empty() {
        degree += 1;
        // Normalized generators have positive order on every branch they
        // touch, so products of window-many of them vanish; more rounds
        // than that means the closure logic is broken.
        if degree > ideal.truncation + 2 {
            return Err(Error::NotStabilized { degree });
        }
        let mut next = Vec::new();
        for v in &frontier {
            for g in &ideal.ring {
                let p = v.mul(g);
                if !p.is_zero() && ech.insert(p.flatten()) {
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    Ok(ModuleBasis { r: ideal.r, truncation: ideal.truncation, ech })
}

impl ModuleBasis {
    fn rows(&self) -> &[Vec<Q>] {
        &self.ech.rows
    }

    /// Per-branch minimum order over the basis rows. Combinations only raise
    /// orders, so this is the minimum over the whole module.
    fn derived_min(&self) -> Result<Point> {
        let mut m = Vec::with_capacity(self.r);
        for i in 0..self.r {
            let best = self
                .rows()
                .iter()
                .filter_map(|row| branch_order(row, self.r, i))
                .min();
            match best {
                Some(d) => m.push(d as i64),
                None => {
                    return Err(Error::BadIdeal {
                        reason: format!("module vanishes on branch {i} within the window"),
                    })
                }
            }
        }
        Ok(Point::new(m))
    }

    /// Per-branch conductor: on each branch, the first degree from which
    /// every higher pure monomial lies in the module. A branch that never
    /// fills up reports just past the window, which any corner check then
    /// rejects.
    fn derived_conductor(&self) -> Point {
        let mut c = Vec::with_capacity(self.r);
        for i in 0..self.r {
            let mut rows = self.rows().to_vec();
            for d in 0..=self.truncation {
                for j in 0..self.r {
                    if j != i {
                        impose_zero(&mut rows, d * self.r + j);
                    }
                }
            }
            let mut pure = Echelon::new((self.truncation + 1) * self.r);
            for row in rows {
                pure.insert(row);
            }
            let degrees: Vec<usize> = pure.pivots.iter().map(|p| p / self.r).collect();
            let mut first = self.truncation as i64 + 1;
            for d in (0..=self.truncation as i64).rev() {
                if degrees.contains(&(d as usize)) {
                    first = d;
                } else {
                    break;
                }
            }
            c.push(first);
        }
        Point::new(c)
    }
}

fn branch_order(row: &[Q], r: usize, i: usize) -> Option<usize> {
    (0..row.len() / r).find(|&d| !row[d * r + i].is_zero())
}

/// Restrict a spanning set to the subspace where one window coefficient
/// vanishes: eliminate with any row that has it nonzero, then drop that row.
fn impose_zero(rows: &mut Vec<Vec<Q>>, pos: usize) {
    let Some(k) = rows.iter().position(|row| !row[pos].is_zero()) else {
        return;
    };
    let pivot = rows.swap_remove(k);
    for row in rows.iter_mut() {
        if !row[pos].is_zero() {
            let f = &row[pos] / &pivot[pos];
            for (a, b) in row.iter_mut().zip(&pivot) {
                *a -= &f * b;
            }
        }
    }
}

/// Dimensions of the constrained spaces `V(a)` (module elements of order at
/// least `a`) for every `a` in `[lo, hi]`, by one descent that adds a single
/// vanishing condition per unit step.
fn grid_dims(basis: &ModuleBasis, lo: &Point, hi: &Point) -> BTreeMap<Point, usize> {
    fn rec(
        rows: Vec<Vec<Q>>,
        r: usize,
        axis: usize,
        lo: &Point,
        hi: &Point,
        prefix: &mut Vec<i64>,
        out: &mut BTreeMap<Point, usize>,
    ) {
        if axis == r {
            out.insert(Point::new(prefix.clone()), rows.len());
            return;
        }
        let mut cur = rows;
        for a in lo.coord(axis)..=hi.coord(axis) {
            prefix.push(a);
            rec(cur.clone(), r, axis + 1, lo, hi, prefix, out);
            prefix.pop();
            if a < hi.coord(axis) {
                impose_zero(&mut cur, a as usize * r + axis);
            }
        }
    }

    let mut out = BTreeMap::new();
    let mut prefix = Vec::with_capacity(basis.r);
    rec(basis.rows().to_vec(), basis.r, 0, lo, hi, &mut prefix, &mut out);
    out
}

/// Members of `[lo, hi]`: points where every single-axis tightening costs
/// one dimension, so some element realizes each coordinate exactly.
fn members_in(basis: &ModuleBasis, lo: &Point, hi: &Point) -> Vec<Point> {
    let mut above = hi.clone();
    for i in 0..basis.r {
        above = above.bumped(i, 1);
    }
    let dims = grid_dims(basis, lo, &above);
    let mut members = Vec::new();
    for a in box_lattice(lo, hi) {
        let d = dims[&a];
        let hit = (0..basis.r).all(|i| {
            let drop = d - dims[&a.bumped(i, 1)];
            debug_assert!(drop <= 1, "one condition cannot cost more than one");
            drop == 1
        });
        if hit {
            members.push(a);
        }
    }
    members
}

fn window_guard(ideal: &BranchIdeal, gamma: &Point) -> Result<()> {
    let need = (0..ideal.r).map(|i| gamma.coord(i)).max().unwrap_or(0) + 2;
    if (ideal.truncation as i64) < need {
        return Err(Error::TruncationInconclusive {
            window: ideal.truncation,
            reason: format!("corner {gamma} needs a window of at least {need}"),
        });
    }
    Ok(())
}

fn boxed(ideal: &BranchIdeal, m: &Point, gamma: &Point) -> Result<ValueSet> {
    if m.dim() != ideal.r || gamma.dim() != ideal.r {
        return Err(Error::DimensionMismatch {
            expected: ideal.r,
            got: if m.dim() != ideal.r { m.dim() } else { gamma.dim() },
        });
    }
    window_guard(ideal, gamma)?;
    let basis = module_basis(ideal)?;
    let derived = basis.derived_min()?;
    if &derived != m {
        return Err(Error::MinMismatch { derived, requested: m.clone() });
    }
    let conductor = basis.derived_conductor();
    for i in 0..ideal.r {
        if conductor.coord(i) > gamma.coord(i) {
            return Err(Error::GammaBelowConductor { index: i });
        }
    }
    let members = members_in(&basis, m, gamma);
    ValueSet::from_points(ideal.r, &members, gamma.clone())
}

fn same_set(a: &ValueSet, b: &ValueSet) -> bool {
    a.min() == b.min() && a.conductor() == b.conductor() && a.box_points() == b.box_points()
}

/// The value set of the ideal on the box `[m, gamma]`. `m` must be the true
/// minimum and `gamma` must dominate the true conductor; both claims are
/// checked, and the result is recomputed in a wider window before release.
pub fn value_set_in_box(ideal: &BranchIdeal, m: &Point, gamma: &Point) -> Result<ValueSet> {
    let narrow = boxed(ideal, m, gamma)?;
    let wide = boxed(&ideal.with_truncation(ideal.truncation + 2)?, m, gamma)?;
    if !same_set(&narrow, &wide) {
        return Err(Error::Unstable {
            detail: format!(
                "windows {} and {} disagree about the box {m}..{gamma}",
                ideal.truncation,
                ideal.truncation + 2
            ),
        });
    }
    Ok(narrow)
}

/// The value set with minimum and conductor derived from the ideal itself.
/// Fails as inconclusive when the window leaves no safety margin around the
/// derived conductor.
pub fn value_set_auto(ideal: &BranchIdeal) -> Result<ValueSet> {
    let basis = module_basis(ideal)?;
    let m = basis.derived_min()?;
    let bound = ideal.truncation as i64 - 2;
    if (0..ideal.r).any(|i| m.coord(i) > bound - 2) {
        return Err(Error::TruncationInconclusive {
            window: ideal.truncation,
            reason: format!("minimum {m} leaves no room below the window bound {bound}"),
        });
    }
    let hi = Point::new(vec![bound; ideal.r]);
    let members = members_in(&basis, &m, &hi);
    let mut full: BTreeMap<Point, bool> = members.iter().map(|p| (p.clone(), true)).collect();
    // A point is full when everything above it in the scanned box is a
    // member; scanning in reverse makes that one lookup per neighbor.
    let mut corners = Vec::new();
    for a in box_lattice(&m, &hi).collect::<Vec<_>>().into_iter().rev() {
        let ok = full.get(&a).copied().unwrap_or(false)
            && (0..ideal.r).all(|i| {
                let up = a.bumped(i, 1);
                up.coord(i) > bound || full.get(&up).copied().unwrap_or(false)
            });
        full.insert(a.clone(), ok);
        if ok {
            corners.push(a);
        }
    }
    let mut gamma = match corners.pop() {
        Some(c) => c,
        None => {
            return Err(Error::TruncationInconclusive {
                window: ideal.truncation,
                reason: "no corner of full membership below the window bound".into(),
            })
        }
    };
    for c in &corners {
        gamma = gamma.meet(c)?;
    }
    if (0..ideal.r).any(|i| gamma.coord(i) > bound - 2) {
        return Err(Error::TruncationInconclusive {
            window: ideal.truncation,
            reason: format!("derived conductor {gamma} sits too close to the window bound"),
        });
    }
    value_set_in_box(ideal, &m, &gamma)
}

/// Length of the quotient of two ideals over one ring, as an exact rank
/// difference. The smaller ideal must be contained in the larger; both are
/// recomputed in a wider window before the value is released.
pub fn colength_dim(big: &BranchIdeal, small: &BranchIdeal) -> Result<i64> {
    let value = colength_once(big, small)?;
    let again = colength_once(
        &big.with_truncation(big.truncation + 2)?,
        &small.with_truncation(small.truncation + 2)?,
    )?;
    if value != again {
        return Err(Error::Unstable {
            detail: format!(
                "windows {} and {} disagree: {value} vs {again}",
                big.truncation,
                big.truncation + 2
            ),
        });
    }
    Ok(value)
}

fn colength_once(big: &BranchIdeal, small: &BranchIdeal) -> Result<i64> {
    if big.r != small.r {
        return Err(Error::DimensionMismatch { expected: big.r, got: small.r });
    }
    if big.truncation != small.truncation {
        return Err(Error::BadIdeal {
            reason: "ideals use different truncation windows".into(),
        });
    }
    if big.ring != small.ring {
        return Err(Error::BadIdeal {
            reason: "ideals live over different rings".into(),
        });
    }
    let big_basis = module_basis(big)?;
    let small_basis = module_basis(small)?;
    // The window must close over the small ideal, or ranks undercount the
    // quotient: its conductor needs clearance from the bound.
    let c = small_basis.derived_conductor();
    if (0..small.r).any(|i| c.coord(i) > small.truncation as i64 - 1) {
        return Err(Error::TruncationInconclusive {
            window: small.truncation,
            reason: format!("small ideal's conductor {c} reaches the window bound"),
        });
    }
    for row in small_basis.rows() {
        if !big_basis.ech.contains(row) {
            return Err(Error::BadIdeal {
                reason: "second ideal is not contained in the first".into(),
            });
        }
    }
    Ok(big_basis.ech.rank() as i64 - small_basis.ech.rank() as i64)
}

/// Two transversal smooth branches: the ring is spanned by `(t, 0)` and
/// `(0, t)` over matching constants; the ideal is the whole ring.
pub fn two_lines(truncation: usize) -> BranchIdeal {
    BranchIdeal::new(
        2,
        truncation,
        vec![
            vec![int_poly(&[0, 1]), int_poly(&[])],
            vec![int_poly(&[]), int_poly(&[0, 1])],
        ],
        vec![vec![int_poly(&[1]), int_poly(&[1])]],
    )
    .expect("fixture is well formed")
}

/// Three concurrent plane lines: branches `t`, `s`, and `t + s` pulled back,
/// ideal the whole ring.
pub fn three_lines(truncation: usize) -> BranchIdeal {
    BranchIdeal::new(
        3,
        truncation,
        vec![
            vec![int_poly(&[0, 1]), int_poly(&[]), int_poly(&[0, 1])],
            vec![int_poly(&[]), int_poly(&[0, 1]), int_poly(&[0, 1])],
        ],
        vec![vec![int_poly(&[1]), int_poly(&[1]), int_poly(&[1])]],
    )
    .expect("fixture is well formed")
}

/// The ring of `r` coordinate axes: each branch reached by its own
/// uniformizer, constants shared; ideal the whole ring.
pub fn axes_ring(r: usize, truncation: usize) -> BranchIdeal {
    let mut ring = Vec::with_capacity(r);
    for i in 0..r {
        let mut gen = vec![Vec::new(); r];
        gen[i] = int_poly(&[0, 1]);
        ring.push(gen);
    }
    BranchIdeal::new(r, truncation, ring, vec![vec![int_poly(&[1]); r]])
        .expect("fixture is well formed")
}

/// The full product of branch rings as an ideal over the axes ring: unit
/// vectors generate, so every order pattern occurs.
pub fn normalization(r: usize, truncation: usize) -> BranchIdeal {
    let mut module = Vec::with_capacity(r);
    for i in 0..r {
        let mut gen = vec![Vec::new(); r];
        gen[i] = int_poly(&[1]);
        module.push(gen);
    }
    axes_ring(r, truncation)
        .with_module(module)
        .expect("fixture is well formed")
}

fn series_version_default() -> u32 {
    1
}

pub const SERIES_FORMAT_VERSION: u32 = 1;

/// Serialized form of a [`BranchIdeal`]: generators as per-branch lists of
/// rational coefficient strings (`"3"`, `"-1/2"`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesFile {
    #[serde(default = "series_version_default")]
    pub version: u32,
    pub r: usize,
    pub truncation: usize,
    pub ring_generators: Vec<Vec<Vec<String>>>,
    pub module_generators: Vec<Vec<Vec<String>>>,
}

fn parse_gens(gens: &[Vec<Vec<String>>]) -> Result<Vec<Vec<Vec<Q>>>> {
    gens.iter()
        .map(|gen| {
            gen.iter()
                .map(|branch| {
                    branch
                        .iter()
                        .map(|s| {
                            Q::from_str(s).map_err(|e| Error::Parse(format!("coefficient {s:?}: {e}")))
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn print_gens(gens: &[Vec<Vec<Q>>]) -> Vec<Vec<Vec<String>>> {
    gens.iter()
        .map(|gen| {
            gen.iter()
                .map(|branch| branch.iter().map(Q::to_string).collect())
                .collect()
        })
        .collect()
}

impl SeriesFile {
    pub fn from_ideal(ideal: &BranchIdeal) -> SeriesFile {
        SeriesFile {
            version: SERIES_FORMAT_VERSION,
            r: ideal.r(),
            truncation: ideal.truncation(),
            ring_generators: print_gens(ideal.ring_coefficients()),
            module_generators: print_gens(ideal.module_coefficients()),
        }
    }

    /// Parse the coefficients and rebuild the ideal, revalidating everything.
    pub fn to_ideal(&self) -> Result<BranchIdeal> {
        BranchIdeal::new(
            self.r,
            self.truncation,
            parse_gens(&self.ring_generators)?,
            parse_gens(&self.module_generators)?,
        )
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<SeriesFile> {
        Ok(serde_json::from_str(s)?)
    }
}
