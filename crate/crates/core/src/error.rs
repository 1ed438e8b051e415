use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero undefined")]
    ValuationOfZero,
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("{0} is out of range: {1}")]
    OutOfRange(i64, &'static str),
    #[error("{0} is not a valid character modulus (must be positive and 0 or 1 mod 4)")]
    InvalidModulus(i64),
    #[error("modulus not a multiple of conductor")]
    ConductorMismatch,
    #[error("character must be nontrivial")]
    TrivialCharacter,
    #[error("character must be primitive")]
    ImprimitiveCharacter,
    #[error("invalid subfactor {0}: not a non-empty product of d-factors")]
    InvalidSubfactor(u64),
    #[error("{0} has no admissible d-factorization")]
    NoDFactorization(u64),
    #[error("invalid d-factorization: {0}")]
    InvalidFactorization(String),
    #[error("too many d-factors ({0}, at most {max})", max = crate::induction::MAX_FACTORS)]
    TooManyFactors(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(&'static str),
    #[error("no prediction available")]
    NoPrediction,
    #[error("hypothesis r4 = 0 required")]
    Rank4Hypothesis,
    #[error("2-rank of S-class group not determined by implemented theory")]
    IndeterminateSClassRank,
    #[error("corollary requires D > 8")]
    SmallDiscriminant,
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
}
