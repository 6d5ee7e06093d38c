//! Shifts of finite type on ℤ^d.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: sites, shapes, hypercubes, the ℓ∞ metric.
//! * [`pattern`]: finite patterns, occurrences, lexicographic ranking.
//! * [`search`]: the backtracking core shared by every search below.
//! * [`sft`]: SFT specifications, admissibility, language enumeration,
//!   entropy estimates.
//! * [`mixing`]: safe symbols, single-site fillability, first offenders,
//!   g-extension and block gluing checks.
//! * [`conjugacy`]: sliding block codes and transport of forbidden lists.
//! * [`factor`]: markers, determined zones and the staged fill that
//!   realizes a factor map onto an SFT with a fixed point.
//! * [`format`] and [`snapshot`]: text file formats and PGM stage snapshots.

pub mod conjugacy;
pub mod factor;
pub mod format;
pub mod geometry;
pub mod mixing;
pub mod pattern;
pub mod search;
pub mod sft;
pub mod snapshot;

pub use geometry::{hypercube, inner_boundary, linf_distance, set_distance, Cube, Region, Shape, Site};
pub use pattern::{Alphabet, Pattern, Symbol};
pub use search::SearchBudget;
pub use sft::SftSpec;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape is empty")]
    EmptyShape,
    #[error("negative size {0}")]
    NegativeSize(i64),
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabet has {0} symbols, more than supported")]
    AlphabetTooLarge(usize),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("undeclared symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol index {0} outside the alphabet")]
    UnknownSymbolIndex(u16),
    #[error("duplicate site {0}")]
    DuplicateSite(Site),
    #[error("shapes overlap at {0}")]
    OverlappingShapes(Site),
    #[error("site {0} is not in the pattern's shape")]
    NotContained(Site),
    #[error("pattern shape does not match the ranking universe")]
    ShapeMismatch,
    #[error("assignment count does not fit in 128 bits")]
    RankOverflow,
    #[error("rank {rank} out of range (total {total})")]
    RankOutOfRange { rank: u128, total: u128 },
    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("pattern has empty shape")]
    EmptyPattern,
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
    #[error("forbidden pattern #{0} is not a nearest-neighbor domino")]
    NotNearestNeighbor(usize),
    #[error("code rule undefined on the neighborhood of {0}")]
    UndefinedNeighborhood(Site),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("zones at {first} and {second} are {distance} apart; non-adjacent zones need distance > {required}")]
    SeparationViolation { first: Site, second: Site, distance: u64, required: u64 },
    #[error("stage {stage}: no admissible fill for the region starting at {region}")]
    EmptyCandidates { stage: u8, region: Site },
    #[error("pattern is not in the codec domain")]
    NotInDomain,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
