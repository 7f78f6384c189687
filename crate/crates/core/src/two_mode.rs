//! Two-mode squeezed thermal states: covariance construction, separability
//! via the partial-transpose symplectic test, and the closed-form fidelity.
//!
//! States are zero-mean with 4×4 covariance matrices in mode ordering
//! `(x₁, p₁, x₂, p₂)`; the family generated here has the block form
//! `σ = ½·[[A·I₂, C·σ_z], [C·σ_z, B·I₂]]` with scalars `A, B ≥ 1`, `C ≥ 0`.

use crate::mat::{complex_det4, Mat4, OMEGA};
use crate::math;
use crate::{CoreError, Result};

/// Margin on the bona-fide condition `d₋ ≥ 1/2` at construction.
const BONA_FIDE_TOL: f64 = 1e-10;
/// Margin on the separability boundary `d̃₋ ≥ 1/2`.
const SEPARABLE_TOL: f64 = 1e-12;
/// Snap width for the non-negative determinant factors in the fidelity.
const FACTOR_SNAP: f64 = 1e-12;

/// Two-mode zero-mean Gaussian state, held as its 4×4 covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState2 {
    cm: Mat4,
}

impl GaussianState2 {
    /// Build from a full covariance matrix, validating symmetry, positive
    /// definiteness and the bona-fide condition (ordinary symplectic
    /// eigenvalues at least 1/2).
    pub fn from_cm(cm: Mat4) -> Result<Self> {
        if !cm.is_symmetric(1e-10) {
            return Err(CoreError::Domain("covariance matrix must be symmetric"));
        }
        if !cm.is_positive_definite() {
            return Err(CoreError::Domain("covariance matrix must be positive definite"));
        }
        let state = GaussianState2 { cm };
        let (_, d_minus) = state.symplectic_eigenvalues()?;
        if d_minus < 0.5 - BONA_FIDE_TOL {
            return Err(CoreError::Domain(
                "covariance matrix violates the uncertainty relation (symplectic eigenvalue below 1/2)",
            ));
        }
        Ok(state)
    }

    /// Build from block scalars: `σ = ½·[[A·I₂, C·σ_z], [C·σ_z, B·I₂]]`.
    pub fn from_blocks(a: f64, b: f64, c: f64) -> Result<Self> {
        let ha = 0.5 * a;
        let hb = 0.5 * b;
        let hc = 0.5 * c;
        GaussianState2::from_cm(Mat4::new([
            [ha, 0.0, hc, 0.0],
            [0.0, ha, 0.0, -hc],
            [hc, 0.0, hb, 0.0],
            [0.0, -hc, 0.0, hb],
        ]))
    }

    pub fn cm(&self) -> &Mat4 {
        &self.cm
    }

    /// Recover `(A, B, C)` when the matrix has the two-mode block structure,
    /// `None` for a general covariance.
    pub fn block_scalars(&self) -> Option<(f64, f64, f64)> {
        let m = &self.cm.m;
        let tol = 1e-10;
        let structured = math::abs(m[0][0] - m[1][1]) <= tol
            && math::abs(m[2][2] - m[3][3]) <= tol
            && math::abs(m[0][2] + m[1][3]) <= tol
            && math::abs(m[0][1]) <= tol
            && math::abs(m[0][3]) <= tol
            && math::abs(m[1][2]) <= tol;
        if structured {
            Some((2.0 * m[0][0], 2.0 * m[2][2], 2.0 * m[0][2]))
        } else {
            None
        }
    }

    /// The four symplectic block invariants `(I₁, I₂, I₃, I₄)`: determinants
    /// of the two diagonal blocks, the off-diagonal block, and the full CM.
    pub fn invariants(&self) -> (f64, f64, f64, f64) {
        (
            self.cm.block2_det(0, 0),
            self.cm.block2_det(2, 2),
            self.cm.block2_det(0, 2),
            self.cm.det(),
        )
    }

    /// Ordinary symplectic eigenvalues `(d₊, d₋)` from
    /// `Δ = I₁ + I₂ + 2I₃`, `d±² = (Δ ± √(Δ² − 4I₄))/2`.
    pub fn symplectic_eigenvalues(&self) -> Result<(f64, f64)> {
        let (i1, i2, i3, i4) = self.invariants();
        eigenvalues_from_invariant(i1 + i2 + 2.0 * i3, i4)
    }

    /// Symplectic eigenvalues of the partial transpose, `(d̃₊, d̃₋)`.
    /// Transposing one mode flips the sign of the off-diagonal invariant:
    /// `Δ̃ = I₁ + I₂ − 2I₃`.
    pub fn ppt_symplectic_eigenvalues(&self) -> Result<(f64, f64)> {
        let (i1, i2, i3, i4) = self.invariants();
        eigenvalues_from_invariant(i1 + i2 - 2.0 * i3, i4)
    }

    /// Separability test: a two-mode Gaussian state is separable exactly when
    /// the smaller partial-transpose symplectic eigenvalue stays at or above
    /// the vacuum value 1/2.
    pub fn is_separable(&self) -> Result<bool> {
        let (_, d_minus) = self.ppt_symplectic_eigenvalues()?;
        Ok(d_minus >= 0.5 - SEPARABLE_TOL)
    }
}

fn eigenvalues_from_invariant(delta: f64, i4: f64) -> Result<(f64, f64)> {
    let disc = delta * delta - 4.0 * i4;
    // The cancellation Δ² − 4I₄ carries round-off proportional to Δ². Snap
    // the whole tolerance band to a degenerate spectrum: a +1e-15 residue
    // left under the square root would inflate to a 1e-8 splitting.
    let tol = 1e-10 * math::fmax(1.0, delta * delta);
    if disc < -tol {
        return Err(CoreError::NumericalConsistency(
            "symplectic discriminant Δ² − 4·det σ is negative",
        ));
    }
    let root = if disc <= tol { 0.0 } else { math::sqrt(disc) };
    let plus = math::sqrt(math::fmax(0.5 * (delta + root), 0.0));
    let minus = math::sqrt(math::fmax(0.5 * (delta - root), 0.0));
    Ok((plus, minus))
}

/// Energy parametrization of the two-mode family: total energy `N`, fraction
/// `beta` of squeezed photons, fraction `gamma` of the thermal photons that
/// sit in mode 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams2 {
    pub n: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EnergyParams2 {
    pub fn new(n: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !n.is_finite() || n < 0.0 {
            return Err(CoreError::Domain("total energy N must be finite and ≥ 0"));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(CoreError::Domain("squeezed fraction beta must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(CoreError::Domain("thermal split gamma must lie in [0, 1]"));
        }
        Ok(EnergyParams2 { n, beta, gamma })
    }
}

/// Split the total energy: `n_s = βN/2`, `n_T1 + n_T2 = (1−β)N/(1+βN)`,
/// `n_T1 = γ·(n_T1 + n_T2)`. Returns `(n_s, n_T1, n_T2)`.
pub fn physical_from_energy(p: &EnergyParams2) -> Result<(f64, f64, f64)> {
    EnergyParams2::new(p.n, p.beta, p.gamma)?;
    let n_s = 0.5 * p.beta * p.n;
    let thermal_total = (1.0 - p.beta) * p.n / (1.0 + p.beta * p.n);
    Ok((n_s, p.gamma * thermal_total, (1.0 - p.gamma) * thermal_total))
}

/// Inverse energy map: `N = 2n_s + (n_T1 + n_T2)(1 + 2n_s)`,
/// `beta = 2n_s/N`, `gamma = n_T1/(n_T1 + n_T2)` (½ when there are no
/// thermal photons, where the split is immaterial).
pub fn physical_to_energy(n_s: f64, n_t1: f64, n_t2: f64) -> (f64, f64, f64) {
    let thermal_total = n_t1 + n_t2;
    let n = 2.0 * n_s + thermal_total * (1.0 + 2.0 * n_s);
    let beta = if n > 0.0 { 2.0 * n_s / n } else { 0.0 };
    let gamma = if thermal_total > 0.0 {
        n_t1 / thermal_total
    } else {
        0.5
    };
    (n, beta, gamma)
}

/// Construct the two-mode squeezed thermal covariance from energy parameters:
///
/// `A = 1 + [2γ(1−β)N + βN(1+N)]/(1+βN)`, `B` the same with `1−γ`,
/// `C = (1+N)·√(βN(2+βN))/(1+βN)`.
pub fn sts2_from_energy(p: &EnergyParams2) -> Result<GaussianState2> {
    EnergyParams2::new(p.n, p.beta, p.gamma)?;
    let bn = p.beta * p.n;
    let denom = 1.0 + bn;
    let squeezed = bn * (1.0 + p.n);
    let a = 1.0 + (2.0 * p.gamma * (1.0 - p.beta) * p.n + squeezed) / denom;
    let b = 1.0 + (2.0 * (1.0 - p.gamma) * (1.0 - p.beta) * p.n + squeezed) / denom;
    let c = (1.0 + p.n) * math::sqrt(bn * (2.0 + bn)) / denom;
    GaussianState2::from_blocks(a, b, c)
}

/// Closed-form fidelity between two-mode zero-mean Gaussian states:
///
/// `F = (√X + √(X−1))² / √det(σ₁+σ₂)` with `X = 2√E₁ + 2√E₂ + ½`,
/// `E₁ = det(Ωσ₁Ωσ₂ − I/4)/det(σ₁+σ₂)` (matrix-valued subtraction — the
/// scalar reading breaks self-fidelity on pure states) and
/// `E₂ = det(σ₁ + iΩ/2)·det(σ₂ + iΩ/2)/det(σ₁+σ₂)`, whose factors are real
/// for valid covariances (imaginary residue asserted below 1e-10).
pub fn fidelity2(s1: &GaussianState2, s2: &GaussianState2) -> Result<f64> {
    let (_, _, _, f) = fidelity2_parts(s1, s2)?;
    Ok(f)
}

/// `(E₁, E₂, X, F)` — split out so the intermediate quantities can be pinned
/// by tests against hand evaluations.
pub(crate) fn fidelity2_parts(s1: &GaussianState2, s2: &GaussianState2) -> Result<(f64, f64, f64, f64)> {
    let sum = s1.cm.add(&s2.cm);
    if !sum.is_positive_definite() {
        return Err(CoreError::Domain("σ₁ + σ₂ must be positive definite"));
    }
    let det_sum = sum.det();

    let quarter_id = Mat4::identity_scaled(0.25);
    let product = OMEGA.mul(&s1.cm).mul(&OMEGA).mul(&s2.cm).sub(&quarter_id);
    let e1 = snap_nonnegative(product.det() / det_sum, "E₁ factor of the two-mode fidelity")?;

    let mut half_omega = OMEGA;
    for i in 0..4 {
        for j in 0..4 {
            half_omega.m[i][j] *= 0.5;
        }
    }
    let factor = |cm: &Mat4| -> Result<f64> {
        let d = complex_det4(cm, &half_omega);
        if math::abs(d.im) > 1e-10 {
            return Err(CoreError::NumericalConsistency(
                "det(σ + iΩ/2) has a non-negligible imaginary part",
            ));
        }
        snap_nonnegative(d.re, "det(σ + iΩ/2) factor of the two-mode fidelity")
    };
    let e2 = factor(&s1.cm)? * factor(&s2.cm)? / det_sum;

    let mut x = 2.0 * math::sqrt(e1) + 2.0 * math::sqrt(e2) + 0.5;
    if x < 1.0 - 1e-9 {
        return Err(CoreError::NumericalConsistency(
            "two-mode fidelity auxiliary X fell below 1",
        ));
    }
    // X sits exactly at 1 when the states coincide and are pure; round-off
    // residue left above the floor would inflate through √(X−1) to ~1e-6
    // in the fidelity, so the whole tolerance band collapses onto it.
    x = if x <= 1.0 + 1e-9 { 1.0 } else { x };
    let root = math::sqrt(x) + math::sqrt(x - 1.0);
    let f = math::clamp_unit_fidelity(root * root / math::sqrt(det_sum))?;
    Ok((e1, e2, x, f))
}

/// These determinant combinations are non-negative for bona-fide covariances;
/// tolerate round-off undershoot and reject anything structurally negative.
fn snap_nonnegative(x: f64, what: &'static str) -> Result<f64> {
    if x < -FACTOR_SNAP {
        let _ = what;
        return Err(CoreError::NumericalConsistency(
            "determinant factor that must be non-negative came out negative",
        ));
    }
    Ok(math::fmax(x, 0.0))
}
