//! Command line front end: validate and inspect set files, compare the
//! colength routes, convert between a set and its projection split, compute
//! sets from series ideal files, and fuzz the whole stack from seeds.
//!
//! Exit codes: 0 success, 1 a validation or cross-check failure, 2 bad
//! usage, 3 unreadable or unparsable input. Failures also print one JSON
//! object to stderr: `{"error":{"kind":...,"detail":...}}`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use valset::colength::{self, Method};
use valset::corpus::{self, Flavor, GenSpec};
use valset::maximals::{self, maximal_report};
use valset::series::{value_set_auto, SeriesFile};
use valset::{Error, IndexSet, Point, ValueSet};

#[derive(Parser)]
#[command(name = "valset", version, about = "Value sets of fractional ideals: validate, classify, measure")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a set file against every structural rule
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Classify maximal points and group them by level
    Classify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Colength of the region between the minimum and a corner
    Colength {
        file: PathBuf,
        /// Corner as comma separated coordinates; defaults to the conductor
        #[arg(long)]
        gamma: Option<String>,
        /// chain, saturated, recursive, closed, or all
        #[arg(long, default_value = "all")]
        method: String,
        #[arg(long)]
        json: bool,
    },
    /// Distance between a set and a nested subset
    Distance {
        big: PathBuf,
        small: PathBuf,
        /// Corner as comma separated coordinates; defaults to the join of conductors
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Split a set into projections plus relative maximals, or rebuild a set
    /// from such a split (direction chosen by the file's shape)
    Reconstruct { file: PathBuf },
    /// Compute the value set of a series ideal file
    Ingest { file: PathBuf },
    /// Generate seeded random cases, run the cross-check battery on each,
    /// and stream one JSON line per seed
    Fuzz {
        #[arg(long, default_value_t = 16)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 6)]
        box_bound: i64,
        /// repair, product, or series
        #[arg(long, default_value = "repair")]
        flavor: String,
        /// Write the JSONL here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure the process reports before exiting: JSON on stderr plus a code.
struct Failed {
    kind: String,
    detail: String,
    code: u8,
}

impl Failed {
    fn io(path: &Path, e: io::Error) -> Failed {
        Failed {
            kind: "io".into(),
            detail: format!("{}: {e}", path.display()),
            code: 3,
        }
    }

    fn usage(detail: String) -> Failed {
        Failed { kind: "usage".into(), detail, code: 2 }
    }

    fn property(detail: String) -> Failed {
        Failed { kind: "property".into(), detail, code: 1 }
    }

    fn report(&self) -> String {
        json!({"error": {"kind": self.kind, "detail": self.detail}}).to_string()
    }
}

impl From<Error> for Failed {
    fn from(e: Error) -> Failed {
        let code = match e {
            Error::Parse(_) | Error::Json(_) => 3,
            _ => 1,
        };
        Failed { kind: kind_of(&e), detail: e.to_string(), code }
    }
}

/// Variant name of the error, snake cased, for machine matching.
fn kind_of(e: &Error) -> String {
    let dbg = format!("{e:?}");
    let mut out = String::new();
    for ch in dbg.chars() {
        if ch.is_ascii_uppercase() {
            if !out.is_empty() {
                out.push('_');
            }
            out.push(ch.to_ascii_lowercase());
        } else if ch.is_ascii_alphanumeric() {
            out.push(ch);
        } else {
            break;
        }
    }
    out
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> Result<String, Failed> {
    fs::read_to_string(path).map_err(|e| Failed::io(path, e))
}

fn load_set(path: &Path) -> Result<ValueSet, Failed> {
    Ok(ValueSet::from_json(&read(path)?)?)
}

fn parse_point(flag: &str, s: &str) -> Result<Point, Failed> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<Vec<i64>, _>>()
        .map(Point::new)
        .map_err(|e| Failed::usage(format!("{flag} {s:?}: {e}")))
}

fn run(cli: Cli) -> Result<(), Failed> {
    match cli.cmd {
        Cmd::Validate { file, json } => validate(&file, json),
        Cmd::Classify { file, json } => classify(&file, json),
        Cmd::Colength { file, gamma, method, json } => colength_cmd(&file, gamma, &method, json),
        Cmd::Distance { big, small, gamma, json } => distance_cmd(&big, &small, gamma, json),
        Cmd::Reconstruct { file } => reconstruct_cmd(&file),
        Cmd::Ingest { file } => ingest(&file),
        Cmd::Fuzz { count, seed, r, box_bound, flavor, out } => {
            fuzz(count, seed, r, box_bound, &flavor, out)
        }
    }
}

fn validate(file: &Path, json: bool) -> Result<(), Failed> {
    let text = read(file)?;
    match ValueSet::from_json(&text) {
        Ok(set) => {
            if json {
                println!(
                    "{}",
                    json!({
                        "valid": true,
                        "r": set.min().dim(),
                        "min": set.min().coords(),
                        "conductor": set.conductor().coords(),
                        "box_points": set.box_points().len(),
                    })
                );
            } else {
                println!(
                    "valid: {} box points between {} and {}",
                    set.box_points().len(),
                    set.min(),
                    set.conductor()
                );
            }
            Ok(())
        }
        Err(Error::Invalid(report)) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&*report).expect("serializable"));
            } else {
                for check in &report.checks {
                    if !check.passed {
                        println!("failed: {} ({} witnesses)", check.axiom, check.failures.len());
                    }
                }
            }
            let detail = report
                .first_failure()
                .map(|(check, _)| format!("failed {}", check.axiom))
                .unwrap_or_else(|| "invalid".into());
            Err(Failed { kind: "invalid".into(), detail, code: 1 })
        }
        Err(e) => Err(e.into()),
    }
}

fn classify(file: &Path, json: bool) -> Result<(), Failed> {
    let set = load_set(file)?;
    let report = maximal_report(&set);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
        return Ok(());
    }
    println!(
        "maximal {}  relative {}  absolute {}  intermediate {}",
        report.m.len(),
        report.rm.len(),
        report.am.len(),
        report.int.len()
    );
    for (level, counts) in &report.by_level {
        println!("level {level}: relative {} absolute {}", counts.rm, counts.am);
    }
    for p in &report.rm {
        println!("relative {p}");
    }
    for p in &report.am {
        println!("absolute {p}");
    }
    Ok(())
}

fn colength_cmd(file: &Path, gamma: Option<String>, method: &str, json: bool) -> Result<(), Failed> {
    let set = load_set(file)?;
    let gamma = match gamma {
        Some(s) => parse_point("--gamma", &s)?,
        None => set.conductor().clone(),
    };
    let reports = match method {
        "all" => colength::all_methods(&set, &gamma)?,
        "chain" => vec![colength::by_method(&set, Method::Chain, &gamma)?],
        "saturated" => vec![colength::by_method(&set, Method::Saturated, &gamma)?],
        "recursive" => vec![colength::by_method(&set, Method::Recursive, &gamma)?],
        "closed" => vec![colength::by_method(&set, Method::Closed, &gamma)?],
        other => return Err(Failed::usage(format!("--method {other:?} is not a route"))),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&reports).expect("serializable"));
    } else {
        for r in &reports {
            println!("{}: {}", r.method, r.value);
        }
    }
    if !colength::agree(&reports) {
        return Err(Failed::property("colength routes disagree".into()));
    }
    Ok(())
}

fn distance_cmd(
    big: &Path,
    small: &Path,
    gamma: Option<String>,
    json: bool,
) -> Result<(), Failed> {
    let big = load_set(big)?;
    let small = load_set(small)?;
    let gamma = gamma.map(|s| parse_point("--gamma", &s)).transpose()?;
    let report = colength::distance(&big, &small, gamma.as_ref())?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        println!(
            "distance {} at corner {} (enclosing {}, nested {})",
            report.value, report.gamma, report.big_colength, report.small_colength
        );
    }
    Ok(())
}

fn one() -> u32 {
    1
}

/// A set split into its coordinate projections and relative maximals; enough
/// to rebuild the set, and the `reconstruct` verb converts both directions.
#[derive(Serialize, Deserialize)]
struct ReconFile {
    #[serde(default = "one")]
    version: u32,
    r: usize,
    min: Vec<i64>,
    conductor: Vec<i64>,
    /// Full set files, entry `k` the projection omitting coordinate `k`.
    projections: Vec<serde_json::Value>,
    rm: Vec<Vec<i64>>,
}

fn reconstruct_cmd(file: &Path) -> Result<(), Failed> {
    let text = read(file)?;
    let probe: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Failed::from(Error::from(e)))?;
    if probe.get("projections").is_some() {
        let rf: ReconFile = serde_json::from_value(probe).map_err(|e| Failed::from(Error::from(e)))?;
        let projections = rf
            .projections
            .iter()
            .map(|v| ValueSet::from_json(&v.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        let rm: Vec<Point> = rf.rm.into_iter().map(Point::new).collect();
        let set = maximals::reconstruct(
            &projections,
            &rm,
            &Point::new(rf.min),
            &Point::new(rf.conductor),
        )?;
        print!("{}", set.to_json());
        return Ok(());
    }
    let set = ValueSet::from_json(&text)?;
    let r = set.min().dim();
    let mut projections = Vec::with_capacity(r);
    for k in 0..r {
        let keep = IndexSet::new((0..r).filter(|&j| j != k), r)?;
        let proj = set.project(&keep)?;
        let value: serde_json::Value =
            serde_json::from_str(&proj.to_json()).expect("round-trippable");
        projections.push(value);
    }
    let report = maximal_report(&set);
    let rf = ReconFile {
        version: 1,
        r,
        min: set.min().coords().to_vec(),
        conductor: set.conductor().coords().to_vec(),
        projections: projections.clone(),
        rm: report.rm.iter().map(|p| p.coords().to_vec()).collect(),
    };
    // The split must actually determine the set before it is published.
    let back = maximals::reconstruct(
        &projections
            .iter()
            .map(|v| ValueSet::from_json(&v.to_string()))
            .collect::<Result<Vec<_>, _>>()?,
        &report.rm,
        set.min(),
        set.conductor(),
    )?;
    if back.box_points() != set.box_points() {
        return Err(Failed::property("projection split does not determine the set".into()));
    }
    let mut text = serde_json::to_string_pretty(&rf).expect("serializable");
    text.push('\n');
    print!("{text}");
    Ok(())
}

fn ingest(file: &Path) -> Result<(), Failed> {
    let ideal = SeriesFile::from_json(&read(file)?)?.to_ideal()?;
    let set = value_set_auto(&ideal)?;
    print!("{}", set.to_json());
    Ok(())
}

/// Cross-checks every generated case must pass; the failure string names the
/// first broken property.
fn battery(set: &ValueSet, flavor: Flavor) -> Result<i64, String> {
    if !set.validate().is_valid() {
        return Err("structural rules".into());
    }
    let reports = colength::all_methods(set, set.conductor())
        .map_err(|e| format!("colength routes: {e}"))?;
    if !colength::agree(&reports) {
        return Err("colength routes disagree".into());
    }
    let report = maximal_report(set);
    if flavor == Flavor::Product && !report.m.is_empty() {
        return Err("a product grew maximal points".into());
    }
    if !maximals::generation_check(set) {
        return Err("projection membership rule".into());
    }
    let r = set.min().dim();
    if r >= 2 {
        let projections = (0..r)
            .map(|k| {
                let keep = IndexSet::new((0..r).filter(|&j| j != k), r)?;
                set.project(&keep)
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("projection: {e}"))?;
        let back = maximals::reconstruct(&projections, &report.rm, set.min(), set.conductor())
            .map_err(|e| format!("rebuild: {e}"))?;
        if back.box_points() != set.box_points() {
            return Err("rebuild from projections disagrees".into());
        }
    }
    Ok(reports[0].value)
}

fn fuzz(
    count: u64,
    seed: u64,
    r: usize,
    box_bound: i64,
    flavor: &str,
    out: Option<PathBuf>,
) -> Result<(), Failed> {
    let flavor = match flavor {
        "repair" => Flavor::Repair,
        "product" => Flavor::Product,
        "series" => Flavor::Series,
        other => return Err(Failed::usage(format!("--flavor {other:?} is not a generator"))),
    };
    let mut sink: Box<dyn Write> = match &out {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| Failed::io(p, e))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut failures = 0u64;
    for seed in seed..seed.wrapping_add(count) {
        let spec = GenSpec { seed, r, box_bound, flavor };
        let line = match corpus::generate(&spec) {
            Err(Error::RetriesExhausted { attempts, .. }) => {
                json!({"seed": seed, "status": "skip", "attempts": attempts})
            }
            Err(e) => {
                failures += 1;
                json!({"seed": seed, "status": "error",
                       "error": {"kind": kind_of(&e), "detail": e.to_string()}})
            }
            Ok(set) => match battery(&set, flavor) {
                Ok(value) => json!({
                    "seed": seed, "status": "ok",
                    "box_points": set.box_points().len(),
                    "colength": value,
                }),
                Err(why) => {
                    failures += 1;
                    let small = corpus::shrink(&set, |s| battery(s, flavor).is_err());
                    let shrunk: serde_json::Value =
                        serde_json::from_str(&small.to_json()).expect("round-trippable");
                    json!({"seed": seed, "status": "fail", "why": why, "shrunk": shrunk})
                }
            },
        };
        writeln!(sink, "{line}").map_err(|e| Failed {
            kind: "io".into(),
            detail: e.to_string(),
            code: 3,
        })?;
    }
    if failures > 0 {
        return Err(Failed::property(format!("{failures} of {count} seeds failed")));
    }
    Ok(())
}
