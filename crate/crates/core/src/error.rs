use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in coverage analysis, factor derivation and
/// set construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("strength t={t} is outside 1..={k}")]
    Strength { t: usize, k: usize },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("schema admits no valid {t}-way combinations")]
    DegenerateSchema { t: usize },

    #[error("ratio undefined: {0}")]
    UndefinedRatio(String),

    #[error("combination count overflows 64 bits")]
    Overflow,

    #[error("cannot fit: {0}")]
    Fit(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("degenerate projection: {0}")]
    DegenerateProjection(String),

    #[error(
        "pool of {pool} records cannot supply {n_random} random + {n_not_covered} not-covered \
         (at most {pool} in total)"
    )]
    Selection {
        pool: usize,
        n_random: usize,
        n_not_covered: usize,
    },
}

impl Error {
    /// Coarse category used for user-facing messages and exit codes.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Strength { .. } | Error::Schema(_) | Error::Validation(_) => "validation",
            Error::NonFinite(_) => "input",
            Error::DegenerateSchema { .. }
            | Error::UndefinedRatio(_)
            | Error::Overflow
            | Error::Fit(_)
            | Error::DegenerateProjection(_) => "computation",
            Error::Selection { .. } => "selection",
        }
    }
}
