use thiserror::Error;

/// Every failure the library can report. Variant names double as the
/// machine-readable error names printed by the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("NotPrime: {0} is not a prime")]
    NotPrime(u64),
    #[error("MismatchedBase: magnitudes over bases {0} and {1}")]
    MismatchedBase(u64, u64),
    #[error("DivisionByIndistinguishableZero: divisor is zero to its stated precision")]
    DivisionByIndistinguishableZero,
    #[error("NegativeValuation: element has valuation {0}, expected a valuation ring element")]
    NegativeValuation(i64),
    #[error("InsufficientPrecision: need precision {needed}, have {available}")]
    InsufficientPrecision { needed: i64, available: i64 },
    #[error("DomainError: {0}")]
    DomainError(String),
    #[error("InadmissibleRadius: tail profile does not vanish at radius exponent {0}")]
    InadmissibleRadius(i64),
    #[error("InsufficientTerms: {needed} stored coefficients needed, {stored} available")]
    InsufficientTerms { needed: usize, stored: usize },
    #[error("DerivativeIndistinguishableFromZero")]
    DerivativeIndistinguishableFromZero,
    #[error("HypothesesFail: {0}")]
    HypothesesFail(String),
    #[error("PrecisionExhausted: {0}")]
    PrecisionExhausted(String),
    #[error("ContractionFails: {0}")]
    ContractionFails(String),
    #[error("AllCoefficientsIndistinguishableFromZero")]
    AllCoefficientsIndistinguishableFromZero,
    #[error("TailInconclusive: {0}")]
    TailInconclusive(String),
    #[error("UndecidedMultipleRoot: residue class {0}")]
    UndecidedMultipleRoot(String),
    #[error("InsufficientCenterPrecision: center known to {available}, ball needs {needed}")]
    InsufficientCenterPrecision { needed: i64, available: i64 },
    #[error("NotCertified: {0}")]
    NotCertified(String),
    #[error("NotContained: ball is not inside the admissible ball")]
    NotContained,
    #[error("ZeroScalar")]
    ZeroScalar,
    #[error("EmptyDigitSet")]
    EmptyDigitSet,
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error("ParseError at {position}: {message}")]
    Parse { position: usize, message: String },
}

impl Error {
    /// Stable name of the variant, as printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "NotPrime",
            Error::MismatchedBase(..) => "MismatchedBase",
            Error::DivisionByIndistinguishableZero => "DivisionByIndistinguishableZero",
            Error::NegativeValuation(_) => "NegativeValuation",
            Error::InsufficientPrecision { .. } => "InsufficientPrecision",
            Error::DomainError(_) => "DomainError",
            Error::InadmissibleRadius(_) => "InadmissibleRadius",
            Error::InsufficientTerms { .. } => "InsufficientTerms",
            Error::DerivativeIndistinguishableFromZero => "DerivativeIndistinguishableFromZero",
            Error::HypothesesFail(_) => "HypothesesFail",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::ContractionFails(_) => "ContractionFails",
            Error::AllCoefficientsIndistinguishableFromZero => {
                "AllCoefficientsIndistinguishableFromZero"
            }
            Error::TailInconclusive(_) => "TailInconclusive",
            Error::UndecidedMultipleRoot(_) => "UndecidedMultipleRoot",
            Error::InsufficientCenterPrecision { .. } => "InsufficientCenterPrecision",
            Error::NotCertified(_) => "NotCertified",
            Error::NotContained => "NotContained",
            Error::ZeroScalar => "ZeroScalar",
            Error::EmptyDigitSet => "EmptyDigitSet",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse { .. } => "ParseError",
        }
    }

    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
