use thiserror::Error;

use crate::types::JointType;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be in 1..=256, got {0}")]
    InvalidAlphabet(usize),

    #[error("letter {letter} at position {position} is outside an alphabet of size {size}")]
    LetterOutOfRange {
        letter: u8,
        position: usize,
        size: usize,
    },

    #[error("sequences must be non-empty")]
    EmptySequence,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("alphabet mismatch: expected size {expected}, got {actual}")]
    AlphabetMismatch { expected: usize, actual: usize },

    #[error("counts {counts:?} do not form a valid type of length {n}")]
    InvalidType { counts: Vec<u32>, n: usize },

    #[error("rank {rank} out of range for a class of size {size}")]
    RankOutOfRange { rank: String, size: String },

    #[error("sequence is not of the row-marginal type of joint type {0}")]
    WrongMarginalType(JointType),

    #[error("invalid source distribution: {0}")]
    InvalidSource(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("coding table for joint type {jt} needs {needed} edges, budget is {budget}")]
    ResourceLimit {
        jt: JointType,
        needed: String,
        budget: u64,
    },

    #[error("pair is not in the joint type class of table {0}")]
    PairNotInTable(JointType),

    #[error("symbol {symbol} not present in {side} {index} of table {jt}")]
    SymbolNotFound {
        jt: JointType,
        side: &'static str,
        index: usize,
        symbol: u64,
    },

    #[error("type index {index} out of range (only {count} types)")]
    TypeIndexOutOfRange { index: u64, count: usize },

    #[error("malformed codeword: {0}")]
    MalformedCodeword(String),

    #[error("truncated codeword stream")]
    Truncated,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
