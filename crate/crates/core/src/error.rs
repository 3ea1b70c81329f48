use alloc::boxed::Box;

/// Errors produced by the beamforming core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument or scenario field failed validation.
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: &'static str, reason: &'static str },

    /// A matrix that must be positive definite failed to factor.
    #[error("{matrix} is numerically singular (pivot {pivot} = {value:e})")]
    NumericalRank {
        matrix: &'static str,
        pivot: usize,
        value: f64,
    },

    /// The constraint set does not have full column rank.
    #[error("degenerate constraints: {reason}")]
    DegenerateConstraints { reason: &'static str },

    /// A Monte Carlo trial failed; the trial index is attached.
    #[error("trial {index}: {source}")]
    Trial {
        index: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: &'static str) -> Self {
        Error::InvalidInput { field, reason }
    }

    /// Field name carried by an [`Error::InvalidInput`], looking through trial wrappers.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            Error::InvalidInput { field, .. } => Some(field),
            Error::Trial { source, .. } => source.field(),
            _ => None,
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
