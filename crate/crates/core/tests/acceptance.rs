//! The release gate: nine independent checks over hand-derived fixtures,
//! seeded random corpora, and the series oracle. Each prints one line with
//! its runtime; the test fails if any check fails or blows its time budget.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use valset::colength::{self, eta_audit, Chain, Method};
use valset::corpus::{gen_ideal, gen_product, gen_repair};
use valset::maximals::{
    adjacent_rm_pairs, generation_check, maximal_report, reconstruct, rect_contains_rm, Rect,
};
use valset::series::{colength_dim, three_lines, two_lines, value_set_auto, BranchIdeal};
use valset::{Error, IndexSet, Point, ValueSet};

fn set(r: usize, pts: &[&[i64]], gamma: &[i64]) -> ValueSet {
    let points: Vec<Point> = pts.iter().map(|c| Point::from(*c)).collect();
    ValueSet::from_points(r, &points, Point::from(gamma)).expect("fixture is valid")
}

fn e2l() -> ValueSet {
    set(2, &[&[0, 0], &[1, 1]], &[1, 1])
}

fn e3a() -> ValueSet {
    set(3, &[&[0, 0, 0], &[1, 1, 1]], &[1, 1, 1])
}

fn e3c() -> ValueSet {
    set(
        3,
        &[
            &[0, 0, 0],
            &[1, 1, 1],
            &[1, 1, 2],
            &[1, 2, 1],
            &[2, 1, 1],
            &[2, 2, 2],
        ],
        &[2, 2, 2],
    )
}

/// The numerical set {0, 2, 3, ...}.
fn s1() -> ValueSet {
    set(1, &[&[0], &[2]], &[2])
}

fn prod_ss() -> ValueSet {
    set(2, &[&[0, 0], &[0, 2], &[2, 0], &[2, 2]], &[2, 2])
}

fn prod_sss() -> ValueSet {
    let vals = [0i64, 2];
    let mut pts = Vec::new();
    for a in vals {
        for b in vals {
            for c in vals {
                pts.push(Point::from([a, b, c]));
            }
        }
    }
    ValueSet::from_points(3, &pts, Point::from([2, 2, 2])).expect("fixture is valid")
}

fn naturals(r: usize) -> ValueSet {
    let zero: Vec<i64> = vec![0; r];
    set(r, &[&zero], &zero)
}

/// Shared seeded corpora; regenerating is deterministic, caching is faster.
fn corpus_r2() -> &'static [ValueSet] {
    static C: OnceLock<Vec<ValueSet>> = OnceLock::new();
    C.get_or_init(|| {
        let mut sets = Vec::with_capacity(1000);
        let repair_bounds = [5i64, 8, 12, 16, 20];
        for seed in 0..600u64 {
            let bound = repair_bounds[seed as usize % repair_bounds.len()];
            if let Ok(e) = gen_repair(seed, 2, bound) {
                sets.push(e);
            }
        }
        let product_bounds = [6i64, 10, 14, 18, 20];
        for seed in 0..400u64 {
            let bound = product_bounds[seed as usize % product_bounds.len()];
            if let Ok(e) = gen_product(seed, 2, bound) {
                sets.push(e);
            }
        }
        sets
    })
}

fn corpus_r3() -> &'static [ValueSet] {
    static C: OnceLock<Vec<ValueSet>> = OnceLock::new();
    C.get_or_init(|| {
        let mut sets = Vec::with_capacity(500);
        let repair_bounds = [4i64, 6, 8, 10, 15];
        for seed in 0..350u64 {
            let bound = repair_bounds[seed as usize % repair_bounds.len()];
            if let Ok(e) = gen_repair(seed, 3, bound) {
                sets.push(e);
            }
        }
        let product_bounds = [5i64, 8, 11, 15];
        for seed in 0..150u64 {
            let bound = product_bounds[seed as usize % product_bounds.len()];
            if let Ok(e) = gen_product(seed, 3, bound) {
                sets.push(e);
            }
        }
        sets
    })
}

fn corpus_r4() -> &'static [ValueSet] {
    static C: OnceLock<Vec<ValueSet>> = OnceLock::new();
    C.get_or_init(|| {
        (0..120u64)
            .filter_map(|seed| gen_repair(seed, 4, 5).ok())
            .collect()
    })
}

fn fail(msg: String) -> Result<String, String> {
    Err(msg)
}

fn check_colength(e: &ValueSet, gamma: &[i64], want: i64, label: &str) -> Result<(), String> {
    let gamma = Point::from(gamma);
    let reports =
        colength::all_methods(e, &gamma).map_err(|err| format!("{label}: {err}"))?;
    if !colength::agree(&reports) {
        return Err(format!("{label}: methods disagree"));
    }
    if reports[0].value != want {
        return Err(format!("{label}: got {} want {want}", reports[0].value));
    }
    Ok(())
}

fn check_distance(big: &ValueSet, small: &ValueSet, want: i64, label: &str) -> Result<(), String> {
    let d = colength::distance(big, small, None).map_err(|e| format!("{label}: {e}"))?;
    if d.value != want {
        return Err(format!("{label}: got {} want {want}", d.value));
    }
    Ok(())
}

fn c1_fixtures() -> Result<String, String> {
    check_colength(&e2l(), &[2, 2], 3, "two lines at (2,2)")?;
    check_colength(&prod_ss(), &[2, 2], 2, "square product at (2,2)")?;
    check_colength(&prod_ss(), &[3, 3], 4, "square product at (3,3)")?;
    check_colength(&e3a(), &[1, 1, 1], 1, "three axes at (1,1,1)")?;
    check_colength(&e3c(), &[2, 2, 2], 3, "three lines at (2,2,2)")?;
    check_colength(&prod_sss(), &[2, 2, 2], 3, "cube product at (2,2,2)")?;
    check_distance(&naturals(2), &e2l(), 1, "plane vs two lines")?;
    check_distance(&naturals(3), &e3a(), 2, "space vs three axes")?;
    check_distance(&naturals(3), &e3c(), 3, "space vs three lines")?;
    // One-branch pairs, where the distance is the plain count of the
    // difference set.
    check_distance(&naturals(1), &s1(), 1, "line vs {0,2,..}")?;
    check_distance(&s1(), &set(1, &[&[0], &[3]], &[3]), 1, "{0,2,..} vs {0,3,..}")?;
    check_distance(&naturals(1), &set(1, &[&[0], &[5]], &[5]), 4, "line vs {0,5,..}")?;
    Ok("12 fixture values".into())
}

fn cross_method(sets: &[ValueSet], bump_every: usize) -> Result<usize, String> {
    let mut checked = 0;
    for (k, e) in sets.iter().enumerate() {
        let mut corners = vec![e.conductor().clone()];
        if k % bump_every == 0 {
            let mut g = e.conductor().clone();
            for i in 0..g.dim() {
                g = g.bumped(i, (k % 3) as i64 + 1);
            }
            corners.push(g);
        }
        for gamma in &corners {
            let reports = colength::all_methods(e, gamma)
                .map_err(|err| format!("set {k} at {gamma}: {err}"))?;
            if !colength::agree(&reports) {
                let vals: Vec<i64> = reports.iter().map(|r| r.value).collect();
                return Err(format!("set {k} at {gamma}: methods give {vals:?}"));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn c2_cross_method_r2() -> Result<String, String> {
    let sets = corpus_r2();
    if sets.len() < 1000 {
        return fail(format!("only {} sets generated", sets.len()));
    }
    let checked = cross_method(sets, 10)?;
    Ok(format!("{} sets, {checked} corners", sets.len()))
}

fn c3_cross_method_r3() -> Result<String, String> {
    let sets = corpus_r3();
    if sets.len() < 500 {
        return fail(format!("only {} sets generated", sets.len()));
    }
    let checked = cross_method(sets, 10)?;
    Ok(format!("{} sets, {checked} corners", sets.len()))
}

fn c4_eta_audit() -> Result<String, String> {
    let allowed = ["i", "ii", "iii", "iv", "v", "none"];
    let mut levels = 0usize;
    for (k, e) in corpus_r3().iter().enumerate() {
        let audit = eta_audit(e).map_err(|err| format!("set {k}: {err}"))?;
        if !audit.all_pass {
            return Err(format!(
                "set {k}: eta audit failed (eta {} vs absolute {}, blocked {} vs {})",
                audit.eta, audit.absolute_total, audit.blocked_direct, audit.blocked_formula
            ));
        }
        for level in &audit.levels {
            if !allowed.contains(&level.case.as_str()) {
                return Err(format!("set {k} level {}: case {:?}", level.level, level.case));
            }
            let qualifying = level.relative > 0 || (level.in_a && level.in_b);
            if qualifying == (level.case == "none") {
                return Err(format!(
                    "set {k} level {}: qualifying {qualifying} but case {:?}",
                    level.level, level.case
                ));
            }
            levels += 1;
        }
    }
    Ok(format!("{levels} levels audited"))
}

fn roundtrip(e: &ValueSet, label: &str) -> Result<(), String> {
    let r = e.min().dim();
    let mut projections = Vec::with_capacity(r);
    for k in 0..r {
        let keep =
            IndexSet::new((0..r).filter(|&j| j != k), r).map_err(|err| format!("{label}: {err}"))?;
        projections.push(e.project(&keep).map_err(|err| format!("{label}: {err}"))?);
    }
    let rm = maximal_report(e).rm;
    let back = reconstruct(&projections, &rm, e.min(), e.conductor())
        .map_err(|err| format!("{label}: {err}"))?;
    if back.box_points() != e.box_points() {
        return Err(format!("{label}: rebuilt set differs"));
    }
    if !generation_check(e) {
        return Err(format!("{label}: membership rule failed"));
    }
    Ok(())
}

fn c5_reconstruction() -> Result<String, String> {
    for (k, e) in corpus_r2().iter().enumerate() {
        roundtrip(e, &format!("r2 set {k}"))?;
    }
    for (k, e) in corpus_r3().iter().enumerate() {
        roundtrip(e, &format!("r3 set {k}"))?;
    }
    for (k, e) in corpus_r4().iter().enumerate() {
        roundtrip(e, &format!("r4 set {k}"))?;
    }
    Ok(format!(
        "{} + {} + {} sets rebuilt",
        corpus_r2().len(),
        corpus_r3().len(),
        corpus_r4().len()
    ))
}

fn c6_geometry() -> Result<String, String> {
    let mut rm_pairs = 0usize;
    let mut am_pairs = 0usize;
    for (k, e) in corpus_r3().iter().enumerate() {
        let report = maximal_report(e);
        let levels: Vec<i64> = report.by_level.keys().copied().collect();
        for &level in &levels {
            for (a, b) in
                adjacent_rm_pairs(e, level).map_err(|err| format!("set {k}: {err}"))?
            {
                let join = a.join(&b).map_err(|err| format!("set {k}: {err}"))?;
                if !report.am.contains(&join) {
                    return Err(format!(
                        "set {k}: adjacent pair {a}, {b} joins to {join} which is not absolute"
                    ));
                }
                rm_pairs += 1;
            }
        }
        for (i, a) in report.am.iter().enumerate() {
            for b in &report.am[i + 1..] {
                if a.coord(2) != b.coord(2) {
                    continue;
                }
                let rect = Rect::new(a.clone(), b.clone())
                    .map_err(|err| format!("set {k}: {err}"))?;
                if !rect_contains_rm(e, &rect).map_err(|err| format!("set {k}: {err}"))? {
                    return Err(format!(
                        "set {k}: rectangle {a}..{b} holds no relative maximal"
                    ));
                }
                am_pairs += 1;
            }
        }
    }
    Ok(format!("{rm_pairs} adjacent pairs, {am_pairs} rectangles"))
}

/// One ideal's worth of oracle agreement: the derived set validates, the
/// rank colength of the conductor cut matches the staircase count, and a
/// nested generator pair (when a valid one exists) matches the set distance.
/// `Ok(None)` means the window was inconclusive; `Ok(Some(nested))` records
/// whether a nested pair was exercised.
fn oracle_case(ideal: &BranchIdeal, label: &str) -> Result<Option<bool>, String> {
    let e = match value_set_auto(ideal) {
        Ok(e) => e,
        Err(Error::TruncationInconclusive { .. }) | Err(Error::Unstable { .. }) => {
            return Ok(None)
        }
        Err(err) => return Err(format!("{label}: {err}")),
    };
    if !e.validate().is_valid() {
        return Err(format!("{label}: derived set fails validation"));
    }
    let gamma = e.conductor().clone();
    let cut = ideal.cut(&gamma).map_err(|err| format!("{label}: {err}"))?;
    let by_rank = match colength_dim(ideal, &cut) {
        Ok(v) => v,
        Err(Error::TruncationInconclusive { .. }) | Err(Error::Unstable { .. }) => {
            return Ok(None)
        }
        Err(err) => return Err(format!("{label}: {err}")),
    };
    let by_chain = colength::chain(&e, &gamma)
        .map_err(|err| format!("{label}: {err}"))?
        .value;
    if by_rank != by_chain {
        return Err(format!("{label}: rank {by_rank} vs staircase {by_chain}"));
    }
    // A nested pair that is not a cut: drop generators, keeping the first.
    // The survivor may miss a branch entirely, in which case there is no
    // valid smaller ideal and nothing to compare.
    if ideal.module_coefficients().len() >= 2 {
        let small = match ideal.with_module(ideal.module_coefficients()[..1].to_vec()) {
            Ok(s) => s,
            Err(_) => return Ok(Some(false)),
        };
        let se = match value_set_auto(&small) {
            Ok(se) => se,
            Err(Error::TruncationInconclusive { .. })
            | Err(Error::Unstable { .. })
            | Err(Error::BadIdeal { .. }) => return Ok(Some(false)),
            Err(err) => return Err(format!("{label} nested: {err}")),
        };
        let by_rank = match colength_dim(ideal, &small) {
            Ok(v) => v,
            Err(Error::TruncationInconclusive { .. }) | Err(Error::Unstable { .. }) => {
                return Ok(Some(false))
            }
            Err(err) => return Err(format!("{label} nested: {err}")),
        };
        let by_distance = colength::distance(&e, &se, None)
            .map_err(|err| format!("{label} nested: {err}"))?
            .value;
        if by_rank != by_distance {
            return Err(format!(
                "{label} nested: rank {by_rank} vs distance {by_distance}"
            ));
        }
        return Ok(Some(true));
    }
    Ok(Some(false))
}

fn c7_series_oracle() -> Result<String, String> {
    // The named rings first, with the whole-product pair checked directly.
    for (label, ideal, unit_count) in [
        ("two lines", two_lines(8), 2usize),
        ("three lines", three_lines(8), 3),
    ] {
        if oracle_case(&ideal, label)?.is_none() {
            return Err(format!("{label}: inconclusive at this window"));
        }
        let mut units = Vec::new();
        for i in 0..unit_count {
            let mut gen = vec![Vec::new(); unit_count];
            gen[i] = valset::series::int_poly(&[1]);
            units.push(gen);
        }
        let whole = ideal
            .with_module(units)
            .map_err(|err| format!("{label}: {err}"))?;
        let by_rank =
            colength_dim(&whole, &ideal).map_err(|err| format!("{label}: {err}"))?;
        let e = value_set_auto(&ideal).map_err(|err| format!("{label}: {err}"))?;
        let big = value_set_auto(&whole).map_err(|err| format!("{label}: {err}"))?;
        let by_distance = colength::distance(&big, &e, None)
            .map_err(|err| format!("{label}: {err}"))?
            .value;
        if by_rank != by_distance {
            return Err(format!(
                "{label} whole product: rank {by_rank} vs distance {by_distance}"
            ));
        }
    }
    // Random ideals until five conclusive cases per branch count, keeping
    // track of how many exercised a non-cut nested pair along the way.
    let mut conclusive = [0usize; 2];
    let mut nested = 0usize;
    for (slot, r) in [(0usize, 2usize), (1, 3)] {
        for seed in 0..60u64 {
            if conclusive[slot] >= 5 {
                break;
            }
            let ideal = gen_ideal(seed, r, 10).map_err(|err| format!("seed {seed}: {err}"))?;
            match oracle_case(&ideal, &format!("random r{r} seed {seed}"))? {
                Some(ran_nested) => {
                    conclusive[slot] += 1;
                    nested += ran_nested as usize;
                }
                None => {}
            }
        }
        if conclusive[slot] < 5 {
            return Err(format!("only {} conclusive random ideals at r={r}", conclusive[slot]));
        }
    }
    if nested == 0 {
        return Err("no random seed produced a valid nested generator pair".into());
    }
    Ok(format!(
        "2 named rings + {} + {} random ideals, {nested} nested pairs",
        conclusive[0], conclusive[1]
    ))
}

fn c8_structural() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    // Path independence: ten shuffled staircase walks reach the same value.
    let mut walks = 0usize;
    for (k, e) in corpus_r2().iter().take(60).chain(corpus_r3().iter().take(60)).enumerate() {
        let gamma = e.conductor().clone();
        let want = colength::chain(e, &gamma)
            .map_err(|err| format!("walk set {k}: {err}"))?
            .value;
        let mut axes = Vec::new();
        for i in 0..gamma.dim() {
            for _ in 0..(gamma.coord(i) - e.min().coord(i)) {
                axes.push(i);
            }
        }
        for _ in 0..10 {
            axes.shuffle(&mut rng);
            let path = Chain::new(e.min().clone(), axes.clone())
                .map_err(|err| format!("walk set {k}: {err}"))?;
            let got = colength::along(e, &path)
                .map_err(|err| format!("walk set {k}: {err}"))?
                .value;
            if got != want {
                return Err(format!("walk set {k}: path gives {got}, axis order gives {want}"));
            }
            walks += 1;
        }
    }
    // Permutation equivariance of the recursive route at three branches.
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for (k, e) in corpus_r3().iter().take(120).enumerate() {
        let gamma = e.conductor().clone();
        let want = colength::by_method(e, Method::Recursive, &gamma)
            .map_err(|err| format!("perm set {k}: {err}"))?
            .value;
        for perm in &perms {
            let moved = e.permuted(perm).map_err(|err| format!("perm set {k}: {err}"))?;
            let mut g = vec![0i64; 3];
            for i in 0..3 {
                g[perm[i]] = gamma.coord(i);
            }
            let got = colength::by_method(&moved, Method::Recursive, &Point::new(g))
                .map_err(|err| format!("perm set {k}: {err}"))?
                .value;
            if got != want {
                return Err(format!("perm set {k} {perm:?}: {got} vs {want}"));
            }
        }
    }
    // Distance does not depend on the corner it is read at.
    for (k, e) in corpus_r3().iter().take(60).enumerate() {
        let n = naturals(3);
        let base = colength::distance(&n, e, None)
            .map_err(|err| format!("offset set {k}: {err}"))?;
        for _ in 0..5 {
            let g = Point::new(
                (0..3)
                    .map(|i| base.gamma.coord(i) + rng.gen_range(0..=3))
                    .collect(),
            );
            let got = colength::distance(&n, e, Some(&g))
                .map_err(|err| format!("offset set {k}: {err}"))?
                .value;
            if got != base.value {
                return Err(format!("offset set {k} at {g}: {got} vs {}", base.value));
            }
        }
    }
    // Projections never need more conductor than the set provides.
    let mut projections = 0usize;
    for (k, e) in corpus_r2().iter().chain(corpus_r3()).enumerate() {
        let r = e.min().dim();
        for mask in 1..(1u32 << r) - 1 {
            let j = IndexSet::new((0..r).filter(|i| mask & (1 << i) != 0), r)
                .map_err(|err| format!("bound set {k}: {err}"))?;
            let proj = e.project(&j).map_err(|err| format!("bound set {k}: {err}"))?;
            let cap = e.conductor().restrict(&j);
            if !proj.conductor().le(&cap) {
                return Err(format!(
                    "bound set {k} axes {:?}: projection conductor {} exceeds {}",
                    j.as_slice(),
                    proj.conductor(),
                    cap
                ));
            }
            projections += 1;
        }
    }
    Ok(format!("{walks} walks, 720 permutations, 300 offsets, {projections} projections"))
}

fn c9_r4_probe() -> Result<String, String> {
    let sets = corpus_r4();
    if sets.len() < 100 {
        return fail(format!("only {} sets generated", sets.len()));
    }
    for (k, e) in sets.iter().enumerate() {
        let gamma = e.conductor().clone();
        let chain = colength::chain(e, &gamma)
            .map_err(|err| format!("set {k}: {err}"))?
            .value;
        let recursive = colength::by_method(e, Method::Recursive, &gamma)
            .map_err(|err| format!("set {k}: {err}"))?
            .value;
        if chain != recursive {
            return Err(format!("set {k}: staircase {chain} vs recursive {recursive}"));
        }
    }
    Ok(format!("{} four-branch sets", sets.len()))
}

#[test]
fn acceptance() {
    let criteria: &[(&str, Duration, fn() -> Result<String, String>)] = &[
        ("1 fixture exactness", Duration::from_secs(1), c1_fixtures),
        ("2 cross-method r=2", Duration::from_secs(300), c2_cross_method_r2),
        ("3 cross-method r=3", Duration::from_secs(600), c3_cross_method_r3),
        ("4 level eta audit", Duration::from_secs(600), c4_eta_audit),
        ("5 projection rebuild", Duration::from_secs(600), c5_reconstruction),
        ("6 maximal geometry", Duration::from_secs(600), c6_geometry),
        ("7 series oracle", Duration::from_secs(300), c7_series_oracle),
        ("8 structural properties", Duration::from_secs(600), c8_structural),
        ("9 four-branch probe", Duration::from_secs(600), c9_r4_probe),
    ];
    let mut failures = Vec::new();
    let mut timings: BTreeMap<&str, Duration> = BTreeMap::new();
    for (name, budget, run) in criteria {
        let t0 = Instant::now();
        let outcome = run();
        let dt = t0.elapsed();
        timings.insert(name, dt);
        match outcome {
            Ok(note) => {
                if dt <= *budget {
                    println!("PASS {name} [{dt:.2?}] {note}");
                } else {
                    println!("FAIL {name} [{dt:.2?}] over budget {budget:?}");
                    failures.push(format!("{name}: over budget"));
                }
            }
            Err(why) => {
                println!("FAIL {name} [{dt:.2?}] {why}");
                failures.push(format!("{name}: {why}"));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("; "));
}
