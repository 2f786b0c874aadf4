use thiserror::Error;

use crate::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("total mass must be exactly 1, found {0}")]
    MassNotOne(Rational),
    #[error("masses and weights must be non-negative, found {0}")]
    NegativeMass(Rational),
    #[error("degenerate interval [{0}, {1}]: left end must be below right end")]
    EmptyInterval(Rational, Rational),
    #[error("mixture needs one weight per part ({weights} weights, {parts} parts)")]
    MixtureArity { weights: usize, parts: usize },
    #[error("convolution of two distributions with continuous parts leaves the piecewise-uniform class")]
    UnsupportedConvolution,
    #[error("parameter `{name}` must be strictly positive, found {value}")]
    NonPositive { name: &'static str, value: Rational },
    #[error("F-net must be a non-empty strictly increasing list")]
    MalformedNet,
    #[error("F-net point {0} is a discontinuity of the center")]
    NetAtJump(Rational),
    #[error("family must contain at least one member")]
    EmptyFamily,
    #[error("tail locations must be strictly increasing (position {0})")]
    LocationsNotIncreasing(usize),
    #[error("template `{template}` does not accept these locations: {reason}")]
    TemplateMismatch { template: &'static str, reason: String },
    #[error("weight {0} lies outside [0, 1]")]
    WeightOutOfRange(Rational),
    #[error("tail {tail}: horizon {horizon} too short to realise the escape profile at window {window}")]
    HorizonTooShort {
        tail: usize,
        horizon: usize,
        window: Rational,
    },
    #[error("values at grid point {point} do not stabilise within horizon {horizon}")]
    Unstabilised { point: Rational, horizon: usize },
    #[error("window [{low}, {high}) lets {escape} of the mass escape, above the admissible {admissible}")]
    WindowTooNarrow {
        low: Rational,
        high: Rational,
        escape: Rational,
        admissible: Rational,
    },
    #[error("diagonal extraction exhausted at refinement level {0}")]
    DiagonalExhausted(usize),
    #[error("alpha grid must be non-empty and contain positive values")]
    EmptyGrid,
    #[error("operation not supported for this gauge/template combination: {0}")]
    Unsupported(String),
    #[error("invalid finite space: {0}")]
    InvalidSpace(String),
    #[error("space too large for exhaustive enumeration ({0} gauge selections)")]
    EnumerationTooLarge(u128),
    #[error("contract violated: {0}")]
    Contract(String),
}
