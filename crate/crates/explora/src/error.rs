use thiserror::Error;

/// Errors produced by the library.
///
/// Errors split into two classes: *validation* errors, raised when an input
/// violates a documented precondition, and *runtime* errors (numerical
/// failures, I/O). The CLI maps the former to exit code 1 and the latter to
/// exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("arm index {arm} out of range for {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },

    #[error("need at least two arms, got {arms}")]
    TooFewArms { arms: usize },

    #[error("{what} has a non-finite entry at position {index}")]
    NotFinite { what: &'static str, index: usize },

    #[error("expected a point of the simplex: {reason}")]
    NotASimplex { reason: String },

    #[error("weight vector must be strictly positive, arm {arm} has {value}")]
    NonPositiveWeight { arm: usize, value: f64 },

    #[error("gradient components must be nonnegative, arm {arm} has {value}")]
    NegativeGradient { arm: usize, value: f64 },

    #[error("confidence level delta must lie in (0, 1/2), got {delta}")]
    InvalidDelta { delta: f64 },

    #[error("arm {arm} has no pulls yet; empirical statistics are undefined")]
    UnpulledArm { arm: usize },

    #[error("instance lies on a class boundary, {what} is undefined there")]
    UndefinedInstance { what: &'static str },

    #[error("sampling rule {rule} only supports the {family} family")]
    UnsupportedRule {
        rule: &'static str,
        family: &'static str,
    },

    #[error("{what} did not converge within {max_iter} iterations")]
    NoConvergence { what: &'static str, max_iter: usize },

    #[error("search grid contains no point of the alternative set")]
    EmptyGrid,

    #[error("{what} only supports up to {max} arms, got {arms}")]
    TooManyArms {
        what: &'static str,
        max: usize,
        arms: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("episode {stream} failed: {source}")]
    Episode {
        stream: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
}

impl Error {
    /// True for errors caused by invalid inputs rather than runtime failures.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::ArmOutOfRange { .. }
            | Error::TooFewArms { .. }
            | Error::NotFinite { .. }
            | Error::NotASimplex { .. }
            | Error::NonPositiveWeight { .. }
            | Error::NegativeGradient { .. }
            | Error::InvalidDelta { .. }
            | Error::UnpulledArm { .. }
            | Error::UndefinedInstance { .. }
            | Error::UnsupportedRule { .. }
            | Error::TooManyArms { .. }
            | Error::InvalidConfig(_) => true,
            Error::Episode { source, .. } => source.is_validation(),
            Error::NoConvergence { .. }
            | Error::EmptyGrid
            | Error::Io { .. }
            | Error::MalformedRecord { .. } => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
