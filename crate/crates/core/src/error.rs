use thiserror::Error;

/// Errors raised by the library.
///
/// Every variant maps to a stable machine-readable reason code (see
/// [`Error::reason`]) which the command-line front end prints on stderr.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violates an operation's precondition (probability outside
    /// `[0,1]`, `s > r`, zero trials, ...).
    #[error("invalid {what}: {detail}")]
    Validation { what: &'static str, detail: String },

    /// The input lies outside the mathematical domain of a quantity, e.g.
    /// the expectation threshold requires `np > 1`.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured size or work limit was exceeded.
    #[error("{what} capacity exceeded: {detail}")]
    Capacity { what: &'static str, detail: String },

    /// The high-precision recomputation disagreed with the working precision.
    #[error(
        "numeric instability: value {value:e} at {bits} bits vs {check:e} at {check_bits} bits"
    )]
    NumericInstability {
        value: f64,
        bits: usize,
        check: f64,
        check_bits: usize,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            what,
            detail: detail.into(),
        }
    }

    pub(crate) fn capacity(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Capacity {
            what,
            detail: detail.into(),
        }
    }

    /// Stable reason code, e.g. `capacity:solver` or `validation:p`.
    pub fn reason(&self) -> String {
        match self {
            Error::Validation { what, .. } => format!("validation:{what}"),
            Error::Domain(_) => "domain".to_string(),
            Error::Capacity { what, .. } => format!("capacity:{what}"),
            Error::NumericInstability { .. } => "numeric:precision".to_string(),
            Error::Io(_) => "io".to_string(),
        }
    }

    /// True for errors caused by the caller's input rather than by the run.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Domain(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(what: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::validation(what, format!("{p} is not in [0, 1]")))
    }
}
