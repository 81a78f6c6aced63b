use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown character {ch:?} in word {text:?}")]
    UnknownCharacter { ch: char, text: String },

    #[error("letter x{index} is beyond the declared rank {rank}")]
    LetterBeyondRank { index: usize, rank: usize },

    #[error("substitution template uses x{index} but only {available} images were given")]
    ImageIndexOutOfRange { index: usize, available: usize },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("arity mismatch: {left} source words against {right} target words")]
    ArityMismatch { left: usize, right: usize },

    #[error("rank must be at least 1")]
    ZeroRank,

    #[error("tuple must contain at least one word")]
    EmptyTuple,
}

pub type Result<T> = std::result::Result<T, Error>;
