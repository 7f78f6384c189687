//! Error type shared by every module in the crate.

use core::fmt;

/// Failure modes of the closed-form routines.
///
/// `Domain` covers parameter preconditions (negative occupations, fractions
/// outside `[0,1]`, non-physical covariance matrices, unnormalized coefficient
/// vectors). `Undefined` marks quantities that have no value at the requested
/// point rather than a wrong one (the Fano factor of the vacuum).
/// `NumericalConsistency` is reserved for internal contradictions — a
/// discriminant that should be non-negative coming out clearly negative, a
/// fidelity exceeding 1 past round-off — and always indicates a bug or a
/// pathological input, never a tight tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoreError {
    /// Input violates a documented precondition.
    Domain(&'static str),
    /// The requested quantity is undefined at this input.
    Undefined(&'static str),
    /// An internal identity failed beyond its round-off allowance.
    NumericalConsistency(&'static str),
    /// A truncated representation was requested below its certified cutoff.
    CutoffInsufficient {
        /// Cutoff that was requested.
        requested: usize,
        /// Smallest cutoff the tail bound certifies.
        required: usize,
    },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Domain(msg) => write!(f, "domain error: {msg}"),
            CoreError::Undefined(msg) => write!(f, "undefined quantity: {msg}"),
            CoreError::NumericalConsistency(msg) => {
                write!(f, "numerical consistency error: {msg}")
            }
            CoreError::CutoffInsufficient { requested, required } => write!(
                f,
                "cutoff insufficient: requested n_max = {requested}, tail bound requires {required}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CoreError {}
