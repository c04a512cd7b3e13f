use thiserror::Error;

/// Errors raised by the analyses in this crate.
///
/// Every message starts with the name of the module that raised it so that
/// front ends can surface it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{module}: rank precondition violated: {detail}")]
    Rank { module: &'static str, detail: String },

    #[error("{module}: node budget of {budget} exceeded")]
    BudgetExceeded { module: &'static str, budget: u64 },

    #[error("symbolic: cannot shift the empty word")]
    EmptyWord,

    #[error("classify: letter {index} is the zero matrix; domination needs nonzero letters")]
    RankZeroLetter { index: usize },

    #[error("{module}: the tuple has no invertible letters")]
    NoInvertibleLetters { module: &'static str },

    #[error("pressure: certificate failed re-verification: {0}")]
    InvalidCertificate(String),

    #[error("pressure: affinity bracket [{lo}, {hi}] not separated within budget (depth {depth})")]
    InconclusiveBracket { lo: f64, hi: f64, depth: usize },

    #[error("pressure: pressure gap needs a rank-one letter and the tuple has none")]
    MissingRankOne,

    #[error("pressure: pressure gap needs an invertible letter and the tuple has none")]
    MissingInvertible,

    #[error("pressure: the nonzero-product shift is empty at depth {depth}")]
    EmptySigma { depth: usize },

    #[error("pressure: measure has words of length {found}, expected depth {expected}")]
    DepthMismatch { expected: usize, found: usize },

    #[error("{module}: maps must be contractive, largest linear norm is {max_norm}")]
    NotContractive { module: &'static str, max_norm: f64 },

    #[error("geometry: condensation decomposition needs invertible and non-invertible maps ({detail})")]
    NotNonInvertible { detail: String },

    #[error("geometry: box size {scale} is below four times the cloud resolution {resolution}")]
    ScaleBelowResolution { scale: f64, resolution: f64 },

    #[error("{module}: invalid input: {detail}")]
    InvalidInput { module: &'static str, detail: String },

    #[error("geometry: i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(module: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidInput {
            module,
            detail: detail.into(),
        }
    }

    /// True for errors caused by running out of enumeration budget, as
    /// opposed to violated preconditions.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::InconclusiveBracket { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
