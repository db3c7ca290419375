use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty restriction")]
    EmptyRestriction,
    #[error("candidate {0} is outside the candidate set")]
    UnknownCandidate(usize),
    #[error("voter {0} is outside the electorate")]
    UnknownVoter(usize),
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),
    #[error("self-comparison of candidate {0}")]
    SelfComparison(usize),
    #[error("voter not available: {0}")]
    VoterNotAvailable(usize),
    #[error("no release in random access")]
    NoReleaseInRandomAccess,
    #[error("requires random access")]
    RequiresRandomAccess,
    #[error("requires sequential access")]
    RequiresSequentialAccess,
    #[error("too many distinct votes: {n} > {max}")]
    TooManyDistinct { n: usize, max: usize },
    #[error("no splitting pair found (votes not distinct or not single crossing)")]
    NoSplittingPair,
    #[error("answers are not consistent with a single-crossing profile")]
    InconsistentAnswers,
    #[error("brute force limit: n = {0} exceeds 10")]
    BruteForceLimit(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
