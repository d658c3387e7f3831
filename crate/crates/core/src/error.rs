use thiserror::Error;

/// Errors shared by the solver suite.
#[derive(Debug, Error)]
pub enum Error {
    #[error("instance has no items")]
    EmptyInstance,
    #[error("item {index} has non-positive profit")]
    NonPositiveProfit { index: usize },
    #[error("item {index} has probability {prob} outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, prob: f64 },
    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("support is empty")]
    EmptySupport,
    #[error("item {index} in support has zero probability")]
    ZeroProbabilityInSupport { index: usize },
    #[error("instance has {n} items; enumeration is capped at {max}")]
    TooLargeForEnumeration { n: usize, max: usize },
    #[error("profit capacity overflows the platform integer range")]
    CapacityOverflow,
    #[error("no subset reaches profit {profit} exactly")]
    UnreachableProfit { profit: u64 },
    #[error("epsilon {eps} outside the open interval (0, 1)")]
    EpsilonOutOfRange { eps: f64 },
    #[error("item {index} is not in the low-probability set")]
    ExtraNotLow { index: usize },
    #[error("argument outside the function domain: {0}")]
    BadDomain(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("target {target} is below 2; no rounding scheme applies")]
    TargetTooSmall { target: u64 },
    #[error("every weight exceeds the target {target}")]
    AllWeightsExceedTarget { target: u64 },
    #[error("weight {index} is zero; weights must be positive")]
    ZeroWeight { index: usize },
    #[error("subset-sum instance has no weights")]
    EmptyWeights,
    #[error("certified comparison did not separate at maximum precision")]
    PrecisionExhausted,
    #[error("bad distribution spec: {0}")]
    BadDistributionSpec(String),
    #[error("bad instance file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
