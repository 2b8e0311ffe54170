use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("an instance needs at least two arms, got {0}")]
    TooFewArms(usize),
    #[error("feature vectors must have dimension at least 1")]
    ZeroDimension,
    #[error("feature vector of arm {arm} has dimension {got}, expected {expected}")]
    DimensionMismatch { arm: usize, expected: usize, got: usize },
    #[error("expected {expected} reward laws, got {got}")]
    LawCount { expected: usize, got: usize },
    #[error("invalid reward law: {0}")]
    InvalidRewardLaw(&'static str),
    #[error("arm {arm}: reward-law mean {law_mean} differs from the linear mean {linear_mean}")]
    MeanMismatch { arm: usize, law_mean: f64, linear_mean: f64 },
    #[error("mean of arm {arm} is {mean}, outside [0, 1]")]
    MeanOutOfRange { arm: usize, mean: f64 },
    #[error("best arm is not unique: arms {first} and {second} share the largest mean")]
    NonUniqueBest { first: usize, second: usize },
    #[error("arm index {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
    #[error("epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),
    #[error("delta must lie in [0, 1), got {0}")]
    InvalidDelta(f64),
    #[error("the Gaussian mechanism needs 0 < delta < 1, got {0}")]
    GaussianDelta(f64),
    #[error("noise spec does not describe the {0} mechanism")]
    MechanismMismatch(&'static str),
    #[error("pull count must be positive")]
    ZeroPulls,
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("vectors span a space of dimension {rank}, need {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error("the phase schedule needs d >= 2, got d = {0}")]
    DimensionTooSmall(usize),
    #[error("the phase schedule needs K >= 2, got K = {0}")]
    ScheduleArms(usize),
    #[error("budget T = {budget} is infeasible; the minimal feasible budget is {minimum}")]
    InsufficientBudget { budget: usize, minimum: usize },
    #[error("hardness needs min(d^2, K) >= 2, got {0}")]
    HardnessRange(usize),
    #[error("phase Gram matrix is singular")]
    SingularGram,
    #[error("invalid early-stopping parameters: {0}")]
    InvalidEarlyStop(&'static str),
    #[error("budget of {0} pulls exhausted")]
    BudgetExhausted(usize),
    #[error("reward table error: {0}")]
    Table(&'static str),
    #[error("unknown policy id `{0}`")]
    UnknownPolicy(alloc::string::String),
}
