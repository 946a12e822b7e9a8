use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree {needed} required but only {available} available")]
    DegreeInsufficient { needed: usize, available: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not representable in {mode} mode: {what}")]
    UnrepresentableInMode { mode: String, what: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("scalar mode mismatch: {left} vs {right}")]
    ModeMismatch { left: String, right: String },

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("weight is negative at {at}")]
    NegativeWeightDetected { at: String },

    #[error("Hankel matrix is not positive definite (pivot {index})")]
    NotPositiveDefinite { index: usize },

    #[error("precision exhausted at step {step}: {detail}")]
    PrecisionExhausted { step: usize, detail: String },

    #[error("a non-real evaluation point is required")]
    NonRealPointRequired,

    #[error("pencil is degenerate at degree {degree}")]
    DegeneratePencil { degree: usize },

    #[error("even moment of order {order} is not positive")]
    NonpositiveEvenMoment { order: usize },

    #[error(
        "sequence is not Stieltjes admissible (continued fraction coefficient {index} negative)"
    )]
    NotStieltjesAdmissible { index: usize },

    #[error("sequence is not admissible: {0}")]
    NotAdmissible(String),

    #[error("wrong support: {0}")]
    WrongSupport(String),

    #[error("Taylor coefficient {index} breaks the complete monotonicity sign pattern")]
    NotCompletelyMonotonicCoefficients { index: usize },

    #[error("linear program unbounded: {0}")]
    LpUnbounded(String),

    #[error("linear program infeasible: {0}")]
    LpInfeasible(String),

    #[error("direction is not interior to the cone: {0}")]
    NotInteriorDirection(String),

    #[error("invalid orthant polynomial h: {0}")]
    InvalidH(String),

    #[error("unknown curve `{0}`")]
    UnknownCurve(String),

    #[error("curve `{0}` has no polynomial parametrization")]
    ImplicitOnlyCurve(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable variant name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegreeInsufficient { .. } => "DegreeInsufficient",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::UnrepresentableInMode { .. } => "UnrepresentableInMode",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ModeMismatch { .. } => "ModeMismatch",
            Error::InvalidDirection(_) => "InvalidDirection",
            Error::NegativeWeightDetected { .. } => "NegativeWeightDetected",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::PrecisionExhausted { .. } => "PrecisionExhausted",
            Error::NonRealPointRequired => "NonRealPointRequired",
            Error::DegeneratePencil { .. } => "DegeneratePencil",
            Error::NonpositiveEvenMoment { .. } => "NonpositiveEvenMoment",
            Error::NotStieltjesAdmissible { .. } => "NotStieltjesAdmissible",
            Error::NotAdmissible(_) => "NotAdmissible",
            Error::WrongSupport(_) => "WrongSupport",
            Error::NotCompletelyMonotonicCoefficients { .. } => {
                "NotCompletelyMonotonicCoefficients"
            }
            Error::LpUnbounded(_) => "LpUnbounded",
            Error::LpInfeasible(_) => "LpInfeasible",
            Error::NotInteriorDirection(_) => "NotInteriorDirection",
            Error::InvalidH(_) => "InvalidH",
            Error::UnknownCurve(_) => "UnknownCurve",
            Error::ImplicitOnlyCurve(_) => "ImplicitOnlyCurve",
            Error::InvalidCurve(_) => "InvalidCurve",
            Error::Parse(_) => "Parse",
        }
    }
}
