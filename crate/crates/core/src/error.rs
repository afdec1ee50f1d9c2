use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degenerate layout: at least two distinct factor levels are required")]
    DegenerateLayout,
    #[error("malformed input: {0}")]
    MalformedInput(&'static str),
    #[error("invalid degree {degree} for {levels} levels (need 1 <= d < p)")]
    InvalidDegree { degree: usize, levels: usize },
    #[error("unordered levels: factor levels must be strictly increasing")]
    UnorderedLevels,
    #[error("asymmetric matrix")]
    AsymmetricMatrix,
    #[error("eigensolver failed to converge after {sweeps} sweeps")]
    EigensolverFailed { sweeps: usize },
    #[error("penalty/layout mismatch: {0}")]
    PenaltyLayoutMismatch(&'static str),
    #[error("invalid q = {q}: need 1 <= q <= min(p, n - 1) = {max}")]
    InvalidQ { q: usize, max: usize },
    #[error("invalid penalty weight: nu must be a nonnegative number or infinity")]
    InvalidPenaltyWeight,
    #[error("vacuous problem: all isotonic weights are zero")]
    VacuousProblem,
    #[error("empty input")]
    EmptyInput,
    #[error("invalid split: alpha must lie in [0, 1]")]
    InvalidSplit,
    #[error("no family requested")]
    NoFamily,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("bound computation failed")]
    BoundFailed,
    #[error("instance too large for oracle (at most {max} entries)")]
    InstanceTooLarge { max: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}
