//! Closed-form toolkit for continuous-variable quantum states.
//!
//! The crate covers three state families and the measures that make them
//! comparable:
//!
//! * [`single_mode`] — displaced squeezed thermal states as mean vector plus
//!   2×2 covariance matrix: energy parametrization, photon statistics (Fano
//!   factor), P-function classicality and the closed-form fidelity.
//! * [`two_mode`] — two-mode squeezed thermal states as 4×4 covariance
//!   matrices: symplectic invariants, the partial-transpose separability test
//!   and the closed-form two-mode fidelity.
//! * [`pnes`] — photon-number entangled states `Σ ψ_n |n,n⟩` (twin-beam and
//!   photon-subtracted variants): coefficient generation with certified
//!   truncation tails, overlap fidelity and the non-Gaussianity measure.
//!
//! [`distance`] adds the Bures distance and the trace-distance sandwich that
//! turn a fidelity into metric statements.
//!
//! Everything here is pure `f64` arithmetic on small fixed-size matrices and
//! coefficient vectors: `no_std` with `alloc` (enable the `libm` feature for
//! the float intrinsics), immutable values, no globals, safe to parallel-map.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(not(any(feature = "std", feature = "libm")))]
compile_error!("cvfid-core needs either the `std` or the `libm` feature for float intrinsics");

extern crate alloc;

pub mod distance;
pub mod error;
pub(crate) mod math;
pub mod mat;
pub mod pnes;
pub mod single_mode;
pub mod two_mode;

pub use error::CoreError;
pub use mat::{Mat2, Mat4};
pub use pnes::{PnesState, Variant};
pub use single_mode::{EnergyParams1, GaussianState1};
pub use two_mode::{EnergyParams2, GaussianState2};

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, CoreError>;
