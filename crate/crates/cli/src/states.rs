//! State descriptions on disk: serde DTOs, parsing with path-carrying
//! errors, and the dispatch from parsed descriptions to core states.
//!
//! Five Gaussian forms and three photon-number forms are accepted; the
//! untagged enum tries them in declaration order, so field sets must stay
//! disjoint. States written by [`write_state`] re-parse to identical values
//! (energy forms round-trip the exact floats through 17-digit JSON).

use cvfid_core::single_mode::{dsts1_from_energy, fidelity1};
use cvfid_core::two_mode::{fidelity2, sts2_from_energy};
use cvfid_core::{
    pnes, EnergyParams1, EnergyParams2, GaussianState1, GaussianState2, Mat2, Mat4, PnesState,
    Variant,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{CliError, Result};

/// On-disk state description. JSON by construction, TOML accepted for
/// configs embedding a state.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum StateSpec {
    /// Single-mode displaced squeezed thermal state by energy parameters.
    SingleEnergy { n: f64, beta: f64, x: f64 },
    /// Two-mode squeezed thermal state by energy parameters.
    TwoEnergy { n: f64, beta: f64, gamma: f64 },
    /// Two-mode state from covariance block scalars.
    Blocks { a: f64, b: f64, c: f64 },
    /// Single-mode state from an explicit mean and covariance matrix.
    MeanCm { mean: [f64; 2], cm: [[f64; 2]; 2] },
    /// Two-mode state from an explicit 4×4 covariance matrix.
    FullCm { cm: [[f64; 4]; 4] },
    /// Photon-number entangled state.
    Pnes { pnes: PnesSpec },
}

/// Photon-number entangled state description.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum PnesSpec {
    /// Twin beam with geometric coefficients; cutoff chosen by the
    /// certified-tail rule when omitted.
    Twb {
        y: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        n_max: Option<usize>,
    },
    /// Photon-subtracted squeezed vacuum.
    Pssv {
        y: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        n_max: Option<usize>,
    },
    /// Explicit normalized coefficient vector.
    Custom { coeffs: Vec<f64> },
}

/// A state parsed and validated into its core representation.
#[derive(Debug, Clone)]
pub enum ParsedState {
    One(GaussianState1),
    Two(GaussianState2),
    Pnes(PnesState),
}

impl ParsedState {
    pub fn family_name(&self) -> &'static str {
        match self {
            ParsedState::One(_) => "single-mode Gaussian",
            ParsedState::Two(_) => "two-mode Gaussian",
            ParsedState::Pnes(_) => "photon-number entangled",
        }
    }
}

impl StateSpec {
    /// Validate and build the core state.
    pub fn build(&self) -> Result<ParsedState> {
        match self {
            StateSpec::SingleEnergy { n, beta, x } => {
                let p = EnergyParams1::new(*n, *beta, *x)?;
                Ok(ParsedState::One(dsts1_from_energy(&p)?))
            }
            StateSpec::TwoEnergy { n, beta, gamma } => {
                let p = EnergyParams2::new(*n, *beta, *gamma)?;
                Ok(ParsedState::Two(sts2_from_energy(&p)?))
            }
            StateSpec::Blocks { a, b, c } => {
                Ok(ParsedState::Two(GaussianState2::from_blocks(*a, *b, *c)?))
            }
            StateSpec::MeanCm { mean, cm } => {
                Ok(ParsedState::One(GaussianState1::new(*mean, Mat2::new(*cm))?))
            }
            StateSpec::FullCm { cm } => {
                Ok(ParsedState::Two(GaussianState2::from_cm(Mat4::new(*cm))?))
            }
            StateSpec::Pnes { pnes } => {
                let state = match pnes {
                    PnesSpec::Twb { y, n_max: Some(m) } => PnesState::twb(*y, *m)?,
                    PnesSpec::Twb { y, n_max: None } => PnesState::twb_auto(*y)?,
                    PnesSpec::Pssv { y, n_max: Some(m) } => PnesState::pssv(*y, *m)?,
                    PnesSpec::Pssv { y, n_max: None } => PnesState::pssv_auto(*y)?,
                    PnesSpec::Custom { coeffs } => PnesState::custom(coeffs.clone())?,
                };
                Ok(ParsedState::Pnes(state))
            }
        }
    }
}

/// Read and build a state, wrapping every failure with the file path so
/// the caller can map it to the invalid-state-file exit code.
pub fn load_state(path: &Path) -> Result<ParsedState> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let spec: StateSpec =
        serde_json::from_str(&text).map_err(|e| CliError::StateFile {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
    spec.build().map_err(|e| CliError::StateFile {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

/// Serialize a state description as pretty JSON.
pub fn write_state(path: &Path, spec: &StateSpec) -> Result<()> {
    let mut text = serde_json::to_string_pretty(spec).map_err(|e| CliError::Config(
        format!("failed to serialize state: {e}"),
    ))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Describe a parsed photon-number state for serialization.
pub fn pnes_to_spec(state: &PnesState) -> StateSpec {
    let pnes = match (state.variant(), state.y()) {
        (Variant::Twb, Some(y)) => PnesSpec::Twb {
            y,
            n_max: Some(state.coeffs().len() - 1),
        },
        (Variant::Pssv, Some(y)) => PnesSpec::Pssv {
            y,
            n_max: Some(state.coeffs().len() - 1),
        },
        _ => PnesSpec::Custom {
            coeffs: state.coeffs().to_vec(),
        },
    };
    StateSpec::Pnes { pnes }
}

/// Fidelity between two parsed states of the same family.
pub fn fidelity(a: &ParsedState, b: &ParsedState) -> Result<f64> {
    match (a, b) {
        (ParsedState::One(s1), ParsedState::One(s2)) => Ok(fidelity1(s1, s2)?),
        (ParsedState::Two(s1), ParsedState::Two(s2)) => Ok(fidelity2(s1, s2)?),
        (ParsedState::Pnes(p1), ParsedState::Pnes(p2)) => Ok(pnes::fidelity_pnes(p1, p2)?),
        _ => Err(CliError::Config(format!(
            "cannot compare a {} state with a {} state",
            a.family_name(),
            b.family_name()
        ))),
    }
}
