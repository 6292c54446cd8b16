use thiserror::Error;

/// Errors shared across the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("N = {n} is not divisible by K = {k}")]
    NotDivisible { n: usize, k: usize },
    #[error("cyclic prefix Gamma = {gamma} is shorter than ceil(L/K) = {required}")]
    CpTooShort { gamma: usize, required: usize },
    #[error("cyclic prefix Gamma = {gamma} must be shorter than N = {n}")]
    PrefixTooLong { gamma: usize, n: usize },
    #[error("vector shift {shift} is out of range for N = {n}")]
    ShiftOutOfRange { shift: usize, n: usize },
    #[error("the first antenna must have shift 0, got {shift}")]
    FirstShiftNonzero { shift: usize },
    #[error("need one shift per antenna ({expected}), got {actual}")]
    ShiftCountMismatch { expected: usize, actual: usize },
    #[error("{nt} transmit antennas exceed the full-diversity limit floor(N*K/L) = {max}")]
    TooManyAntennas { nt: usize, max: usize },
    #[error("parameter {name} must be positive")]
    NonPositive { name: &'static str },
    #[error("unsupported rate R = {rate} bits/symbol")]
    UnsupportedRate { rate: u32 },
    #[error("length mismatch: expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("joint ML search over {candidates} candidates exceeds the limit {limit}")]
    SearchTooLarge { candidates: u64, limit: u64 },
    #[error("not enough qualifying points: need {needed}, have {available}")]
    InsufficientData { needed: usize, available: usize },
    #[error("matrix is singular to working precision")]
    SingularMatrix,
    #[error("SNR grid must be non-empty and strictly increasing")]
    GridNotIncreasing,
    #[error("mode {mode} requires {requirement}")]
    ModeMismatch {
        mode: &'static str,
        requirement: &'static str,
    },
}

pub type Result<T> = core::result::Result<T, Error>;
