use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("unramified modulus is reducible modulo p")]
    ReducibleModulus,
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("invalid context parameter: {0}")]
    InvalidParameter(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("division by an element indistinguishable from zero")]
    DivisionByIndistinguishableZero,
    #[error("Hensel criterion v(g(x0)) > 2 v(g'(x0)) fails")]
    HenselCriterionFailed,
    #[error("operands live in different rings")]
    RingMismatch,
    #[error("composition requires an inner series with zero constant term")]
    NonzeroConstantTerm,
    #[error("reversion requires a unit linear coefficient")]
    NonUnitLinearCoefficient,
    #[error("reciprocal requires a unit constant term")]
    NonUnitConstantTerm,
    #[error("evaluation point must have positive valuation")]
    NonPositiveValuationPoint,
    #[error("partial sums do not stabilise: {0}")]
    NoStabilization(String),
    #[error("coefficient {index} has negative valuation {valuation}")]
    IntegralityViolation { index: String, valuation: String },
    #[error("vector is not in the image of the ghost map (level {level})")]
    NotInGhostImage { level: usize },
    #[error("valuation is not determined at the available precision")]
    IndeterminateValuation,
    #[error("two computation routes disagree: {0}")]
    RouteMismatch(String),
    #[error("congruence violated: {0}")]
    CongruenceViolation(String),
    #[error("polynomial division leaves a nonzero remainder")]
    NonzeroRemainder,
    #[error("requested threshold exceeds available precision: {0}")]
    ThresholdTooHigh(String),
    #[error("element is not invariant under the subgroup: {0}")]
    InvarianceViolation(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl LtError {
    /// True for failures caused by running out of tracked precision rather
    /// than by a false mathematical claim.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            LtError::PrecisionExhausted(_)
                | LtError::IndeterminateValuation
                | LtError::ThresholdTooHigh(_)
                | LtError::NoStabilization(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, LtError>;
