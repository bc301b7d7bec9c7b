use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Row, column and message numbers carried by the variants are 1-based so they
/// can be shown to users verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime in 2..=251")]
    InvalidModulus(u32),

    #[error("entry {value} is out of range for GF({p})")]
    EntryOutOfRange { value: u64, p: u8 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u8, right: u8 },

    #[error("row {row} contains {count} ones, expected exactly one")]
    RowOneCount { row: usize, count: usize },

    #[error("column {0} is not demanded by any row")]
    ColumnUncovered(usize),

    #[error("X-fitting matrix contains a 1 at row {row}, column {col}")]
    OneInXPattern { row: usize, col: usize },

    #[error("invalid index coding problem: {0}")]
    InvalidProblem(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("code length {r} is outside 1..={k}")]
    RankOutOfRange { r: usize, k: usize },

    #[error("resource guard: {count} candidate {r}-dimensional subspaces exceed the ceiling of {ceiling}")]
    ResourceGuard { r: usize, count: u128, ceiling: u128 },

    #[error("no code of length at most {0} exists")]
    RankLimit(usize),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("permutation {0} is not an involution")]
    NotInvolutory(String),

    #[error("matrix is not involutory (C·C != I)")]
    MatrixNotInvolutory,

    #[error("seed code is not an index code for the problem")]
    InvalidSeedCode,

    #[error("code block {0} does not commute with C")]
    CommutationViolation(usize),

    #[error("invalid block layout: {0}")]
    InvalidLayout(String),

    #[error("code is rank deficient: rank {rank} with {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("missing side information value for message {0}")]
    MissingSideValue(usize),

    #[error("containment violation: {0}")]
    ContainmentViolation(String),

    #[error("invalid ABC specification: {0}")]
    InvalidSpec(String),

    #[error("constructed extension failed verification")]
    ExtensionUnverified,
}

pub type Result<T> = std::result::Result<T, Error>;
