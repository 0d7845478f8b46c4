//! Value sets of fractional ideals over a ring with `r` branches.
//!
//! A value set is a subset `E` of `Z^r` that is closed under componentwise
//! minimum, satisfies the alternation property for pairs sharing a
//! coordinate, and contains a translated full orthant `gamma + N^r`. This
//! crate stores such sets in a finite capped-box representation, classifies
//! their maximal points, and computes colengths `l(E, gamma)` by several
//! independent methods that are cross-checked against each other and against
//! an exact-arithmetic power-series oracle.

pub mod colength;
pub mod corpus;
pub mod maximals;
pub mod point;
pub mod series;
pub mod valueset;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use point::{IndexSet, Point};
pub use valueset::{ValidationReport, ValueSet};

use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index set is empty")]
    EmptyIndexSet,

    #[error("branch index {index} out of range for r = {r}")]
    IndexOutOfRange { index: usize, r: usize },

    #[error("validation failed: {0}")]
    Invalid(Box<ValidationReport>),

    #[error("gamma below conductor at coordinate {index}")]
    GammaBelowConductor { index: usize },

    #[error("point {point} is not a member of the set")]
    PointNotInSet { point: Point },

    #[error("operation requires r = {required}, set has r = {actual}")]
    WrongDimension { required: usize, actual: usize },

    #[error("operation needs r >= {min_r}, set has r = {actual}")]
    DimensionTooSmall { min_r: usize, actual: usize },

    #[error("rectangle corners must be absolute maximals sharing the last coordinate")]
    CornersNotAbsolute,

    #[error("smaller set is not contained in the larger one (witness {witness})")]
    NotNested { witness: Point },

    #[error("expected {expected} projections of dimension {dims}, got {got}")]
    BadProjections {
        expected: usize,
        dims: usize,
        got: usize,
    },

    #[error("zero divisor: branch {branch} vanishes identically")]
    ZeroDivisor { branch: usize },

    #[error("truncation window {window} is inconclusive: {reason}")]
    TruncationInconclusive { window: usize, reason: String },

    #[error("module span still growing at monomial degree {degree}")]
    NotStabilized { degree: usize },

    #[error("result unstable under window growth: {detail}")]
    Unstable { detail: String },

    #[error("ideal is malformed: {reason}")]
    BadIdeal { reason: String },

    #[error("derived minimum {derived} does not match the requested box minimum {requested}")]
    MinMismatch { derived: Point, requested: Point },

    #[error("generator gave up after {attempts} attempts for seed {seed}")]
    RetriesExhausted { seed: u64, attempts: u32 },

    #[error("chain is malformed: {reason}")]
    BadChain { reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
