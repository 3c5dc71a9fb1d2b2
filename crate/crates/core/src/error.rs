use thiserror::Error;

/// Errors raised by validation, information measures, region construction
/// and the coding simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("negative entry {value} at flat index {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("row for inputs (x1={x1}, x2={x2}, x3={x3}) sums to {sum}, expected 1")]
    RowSumMismatch { x1: usize, x2: usize, x3: usize, sum: f64 },

    #[error("flat array has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),

    #[error("joint pmf would hold {entries} entries, cap is {cap}")]
    JointTooLarge { entries: usize, cap: usize },

    #[error("pmf mass sums to {0}, expected 1")]
    MassMismatch(f64),

    #[error("conditional mutual information {0} is below the numeric-integrity floor")]
    NumericIntegrity(f64),

    #[error("factor {index} has signature ({produced:?} | {given:?}), scheme expects ({expected_produced:?} | {expected_given:?})")]
    SignatureMismatch {
        index: usize,
        produced: Vec<String>,
        given: Vec<String>,
        expected_produced: Vec<String>,
        expected_given: Vec<String>,
    },

    #[error("cardinality of `{var}` is {got}, expected {expected}")]
    CardinalityMismatch { var: String, expected: usize, got: usize },

    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),

    #[error("scheme `{got}` does not match the mode's scheme `{expected}`")]
    ModeSchemeMismatch { expected: String, got: String },

    #[error("rate definition references undeclared variable `{0}`")]
    UndeclaredVariableInDef(String),

    #[error("channel is incompatible with corollary {corollary}: {reason}")]
    IncompatibleChannel { corollary: u8, reason: String },

    #[error("channel does not carry the structural degradedness flag")]
    NotDegraded,

    #[error("candidate index space needs {bits:.2} bits, cap is {cap} bits")]
    IndexSpaceTooLarge { bits: f64, cap: u32 },

    #[error("projected region is unbounded in rate space")]
    UnboundedRegion,

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable discriminant for error reporting.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::RowSumMismatch { .. } => "RowSumMismatch",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::OverlappingSets(_) => "OverlappingSets",
            Error::JointTooLarge { .. } => "JointTooLarge",
            Error::MassMismatch(_) => "MassMismatch",
            Error::NumericIntegrity(_) => "NumericIntegrity",
            Error::SignatureMismatch { .. } => "SignatureMismatch",
            Error::CardinalityMismatch { .. } => "CardinalityMismatch",
            Error::UnknownScheme(_) => "UnknownScheme",
            Error::ModeSchemeMismatch { .. } => "ModeSchemeMismatch",
            Error::UndeclaredVariableInDef(_) => "UndeclaredVariableInDef",
            Error::IncompatibleChannel { .. } => "IncompatibleChannel",
            Error::NotDegraded => "NotDegraded",
            Error::IndexSpaceTooLarge { .. } => "IndexSpaceTooLarge",
            Error::UnboundedRegion => "UnboundedRegion",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
