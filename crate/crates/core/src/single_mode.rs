//! Single-mode displaced squeezed thermal states and their closed forms.
//!
//! Conventions: quadratures are normalized so the vacuum covariance matrix is
//! `diag(1/2, 1/2)`; a real displacement amplitude `x` enters the mean vector
//! as `(√2·x, 0)`; squeezing with parameter `r > 0` scales the quadrature
//! variances by `e^{±2r}`. A state is the pair (mean, covariance) and every
//! derived quantity below is an explicit function of that pair.

use crate::mat::Mat2;
use crate::math;
use crate::{CoreError, Result};

/// Tolerance for the uncertainty-relation bound `det σ ≥ 1/4`.
const DET_TOL: f64 = 1e-12;
/// Snap width for pure-state determinants in the fidelity denominator.
const PURITY_SNAP: f64 = 1e-12;
/// Classicality margin on the smallest covariance eigenvalue.
const CLASSICAL_TOL: f64 = 1e-12;

/// Single-mode Gaussian state: quadrature mean vector and 2×2 covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState1 {
    mean: [f64; 2],
    cm: Mat2,
}

impl GaussianState1 {
    /// Build from raw moments, validating symmetry, positivity and the
    /// uncertainty relation `det σ ≥ 1/4`.
    pub fn new(mean: [f64; 2], cm: Mat2) -> Result<Self> {
        if !mean[0].is_finite() || !mean[1].is_finite() {
            return Err(CoreError::Domain("mean vector must be finite"));
        }
        if !cm.is_symmetric(1e-12) {
            return Err(CoreError::Domain("covariance matrix must be symmetric"));
        }
        if !cm.is_positive_definite() {
            return Err(CoreError::Domain("covariance matrix must be positive definite"));
        }
        if cm.det() < 0.25 - DET_TOL {
            return Err(CoreError::Domain(
                "covariance matrix violates the uncertainty relation det σ ≥ 1/4",
            ));
        }
        Ok(GaussianState1 { mean, cm })
    }

    pub fn mean(&self) -> [f64; 2] {
        self.mean
    }

    pub fn cm(&self) -> &Mat2 {
        &self.cm
    }

    /// Total mean photon number `(Tr σ − 1)/2 + |m|²/2`.
    pub fn mean_photon(&self) -> f64 {
        0.5 * (self.cm.trace() - 1.0) + 0.5 * (self.mean[0] * self.mean[0] + self.mean[1] * self.mean[1])
    }

    /// Photon-number variance `½·Tr(σ²) − ¼ + mᵀσm`.
    pub fn photon_variance(&self) -> f64 {
        0.5 * self.cm.trace_of_square() - 0.25 + self.cm.quad_form(self.mean)
    }

    /// Fano factor `R = Var(n)/⟨n⟩`; undefined for the vacuum.
    pub fn fano_factor(&self) -> Result<f64> {
        let n = self.mean_photon();
        if n <= 0.0 {
            return Err(CoreError::Undefined(
                "Fano factor of a state with ⟨n⟩ = 0 (vacuum)",
            ));
        }
        Ok(self.photon_variance() / n)
    }

    /// `R < 1` certifies nonclassical photon statistics.
    pub fn is_sub_poissonian(&self) -> Result<bool> {
        Ok(self.fano_factor()? < 1.0)
    }

    /// Regular P-function test for Gaussian states: the covariance dominates
    /// the vacuum, i.e. the smallest eigenvalue of σ is at least 1/2. The
    /// boundary counts as classical.
    pub fn is_classical(&self) -> bool {
        self.cm.sym_eigenvalues().0 >= 0.5 - CLASSICAL_TOL
    }
}

/// Energy parametrization of a displaced squeezed thermal state: kernel mean
/// photon number `N`, squeezing fraction `beta = n_S/N`, displacement `x`.
/// The total energy is `⟨n⟩ = x² + N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams1 {
    pub n: f64,
    pub beta: f64,
    pub x: f64,
}

impl EnergyParams1 {
    pub fn new(n: f64, beta: f64, x: f64) -> Result<Self> {
        if !n.is_finite() || n < 0.0 {
            return Err(CoreError::Domain("kernel energy N must be finite and ≥ 0"));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(CoreError::Domain("squeezing fraction beta must lie in [0, 1]"));
        }
        if !x.is_finite() {
            return Err(CoreError::Domain("displacement x must be finite"));
        }
        Ok(EnergyParams1 { n, beta, x })
    }
}

/// Construct from physical parameters: displacement `x`, squeezing `r`,
/// thermal occupation `n_T`. The covariance is
/// `diag((n_T+1/2)e^{2r}, (n_T+1/2)e^{−2r})`.
pub fn dsts1_from_physical(x: f64, r: f64, n_t: f64) -> Result<GaussianState1> {
    if !n_t.is_finite() || n_t < 0.0 {
        return Err(CoreError::Domain("thermal occupation n_T must be finite and ≥ 0"));
    }
    if !r.is_finite() || !x.is_finite() {
        return Err(CoreError::Domain("squeezing r and displacement x must be finite"));
    }
    let tau = n_t + 0.5;
    let cm = Mat2::diag(tau * math::exp(2.0 * r), tau * math::exp(-2.0 * r));
    GaussianState1::new([core::f64::consts::SQRT_2 * x, 0.0], cm)
}

/// Split the kernel energy into thermal and squeezed parts:
/// `n_T = (1−β)N/(1+2βN)`, `n_S = βN`, `r = arcsinh(√n_S) ≥ 0`.
pub fn energy_to_physical(p: &EnergyParams1) -> Result<(f64, f64, f64)> {
    EnergyParams1::new(p.n, p.beta, p.x)?;
    let n_s = p.beta * p.n;
    let n_t = (1.0 - p.beta) * p.n / (1.0 + 2.0 * p.beta * p.n);
    let r = math::asinh(math::sqrt(n_s));
    Ok((n_t, n_s, r))
}

/// Inverse of [`energy_to_physical`] on the kernel: `N = n_T + n_S + 2n_Tn_S`
/// and `beta = n_S/N` (zero for the vacuum kernel).
pub fn physical_to_energy(n_t: f64, n_s: f64) -> (f64, f64) {
    let n = n_t + n_s + 2.0 * n_t * n_s;
    let beta = if n > 0.0 { n_s / n } else { 0.0 };
    (n, beta)
}

/// Construct the state described by an energy parametrization.
///
/// The displacement is placed along the *squeezed* quadrature (the covariance
/// is `diag((n_T+1/2)e^{−2r}, (n_T+1/2)e^{+2r})` with `r = arcsinh(√n_S)`).
/// Aligning it with the anti-squeezed quadrature instead provably yields a
/// Fano factor ≥ 1 for every parameter choice, which would erase the
/// sub-Poissonian region this family is built to expose.
pub fn dsts1_from_energy(p: &EnergyParams1) -> Result<GaussianState1> {
    let (n_t, _n_s, r) = energy_to_physical(p)?;
    dsts1_from_physical(p.x, -r, n_t)
}

/// Closed-form fidelity between two single-mode Gaussian states:
///
/// `F = exp(−½·dᵀ(σ₁+σ₂)⁻¹d) / (√(Δ+δ) − √δ)`
///
/// with `d` the mean difference, `Δ = det(σ₁+σ₂)` and
/// `δ = 4·(det σ₁ − ¼)(det σ₂ − ¼)`. The exponent must be negative —
/// the opposite sign sends fidelities of distinct coherent states above 1.
/// Pure-state determinants are snapped to exactly ¼ within 1e-12 so `δ`
/// cannot go negative under round-off.
pub fn fidelity1(s1: &GaussianState1, s2: &GaussianState1) -> Result<f64> {
    let d = [s1.mean[0] - s2.mean[0], s1.mean[1] - s2.mean[1]];
    let s = s1.cm.add(&s2.cm);
    if !s.is_positive_definite() {
        return Err(CoreError::Domain("σ₁ + σ₂ must be positive definite"));
    }
    let s_inv = s
        .inverse()
        .ok_or(CoreError::Domain("σ₁ + σ₂ must be invertible"))?;
    let expo = math::exp(-0.5 * s_inv.quad_form(d));

    let big_delta = s.det();
    let purity_defect = |det: f64| {
        let excess = det - 0.25;
        if math::abs(excess) < PURITY_SNAP {
            0.0
        } else {
            excess
        }
    };
    let small_delta = 4.0 * purity_defect(s1.cm.det()) * purity_defect(s2.cm.det());

    let denom = math::sqrt(big_delta + small_delta) - math::sqrt(small_delta);
    math::clamp_unit_fidelity(expo / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const TOL: f64 = 1e-12;

    fn coherent(x: f64) -> GaussianState1 {
        dsts1_from_physical(x, 0.0, 0.0).unwrap()
    }

    fn thermal(n_t: f64) -> GaussianState1 {
        dsts1_from_physical(0.0, 0.0, n_t).unwrap()
    }

    #[test]
    fn vacuum_construction() {
        let s = dsts1_from_physical(0.0, 0.0, 0.0).unwrap();
        assert_eq!(s.mean(), [0.0, 0.0]);
        assert_abs_diff_eq!(s.cm().m[0][0], 0.5, epsilon = TOL);
        assert_abs_diff_eq!(s.cm().m[1][1], 0.5, epsilon = TOL);
    }

    #[test]
    fn displaced_thermal_construction() {
        let s = dsts1_from_physical(0.5, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(s.mean()[0], core::f64::consts::SQRT_2 * 0.5, epsilon = TOL);
        assert_abs_diff_eq!(s.cm().m[0][0], 1.5, epsilon = TOL);
        assert_abs_diff_eq!(s.cm().m[1][1], 1.5, epsilon = TOL);
    }

    #[test]
    fn unit_sinh_squeezing_gives_silver_ratio_variances() {
        // sinh r = 1 → e^{±2r} = 3 ± 2√2.
        let r = math::asinh(1.0);
        let s = dsts1_from_physical(0.0, r, 0.0).unwrap();
        let sqrt8 = math::sqrt(8.0);
        assert_abs_diff_eq!(s.cm().m[0][0], (3.0 + sqrt8) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.cm().m[1][1], (3.0 - sqrt8) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn negative_thermal_occupation_is_rejected() {
        assert!(matches!(
            dsts1_from_physical(0.0, 0.0, -0.1),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn energy_split_limits() {
        let (n_t, n_s, _) = energy_to_physical(&EnergyParams1::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(n_t, 1.0, epsilon = TOL);
        assert_abs_diff_eq!(n_s, 0.0, epsilon = TOL);

        let (n_t, n_s, _) = energy_to_physical(&EnergyParams1::new(1.0, 1.0, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(n_t, 0.0, epsilon = TOL);
        assert_abs_diff_eq!(n_s, 1.0, epsilon = TOL);
    }

    #[test]
    fn energy_split_reconstructs_kernel_energy() {
        // N = n_T + n_S + 2·n_T·n_S at β = 1/2: 0.25 + 0.5 + 0.25 = 1.
        let (n_t, n_s, _) = energy_to_physical(&EnergyParams1::new(1.0, 0.5, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(n_t, 0.25, epsilon = TOL);
        assert_abs_diff_eq!(n_s, 0.5, epsilon = TOL);
        assert_abs_diff_eq!(n_t + n_s + 2.0 * n_t * n_s, 1.0, epsilon = TOL);
        let (n, beta) = physical_to_energy(n_t, n_s);
        assert_abs_diff_eq!(n, 1.0, epsilon = TOL);
        assert_abs_diff_eq!(beta, 0.5, epsilon = TOL);
    }

    #[test]
    fn mean_photon_examples() {
        assert_abs_diff_eq!(coherent(0.0).mean_photon(), 0.0, epsilon = TOL);
        let s = dsts1_from_energy(&EnergyParams1::new(1.0, 0.5, 0.5).unwrap()).unwrap();
        assert_abs_diff_eq!(s.mean_photon(), 1.25, epsilon = TOL);
        assert_abs_diff_eq!(thermal(2.0).mean_photon(), 2.0, epsilon = TOL);
    }

    #[test]
    fn fano_factor_special_cases() {
        assert_abs_diff_eq!(coherent(1.0).fano_factor().unwrap(), 1.0, epsilon = 1e-14);
        // Thermal: Var = n_T(n_T+1) → R = n_T + 1.
        assert_abs_diff_eq!(thermal(1.0).fano_factor().unwrap(), 2.0, epsilon = TOL);
        // Squeezed vacuum with n_S = 1: Var = 2·n_S(n_S+1) = 4, ⟨n⟩ = 1.
        let sv = dsts1_from_physical(0.0, math::asinh(1.0), 0.0).unwrap();
        assert_abs_diff_eq!(sv.fano_factor().unwrap(), 4.0, epsilon = 1e-12);
    }

    #[test]
    fn fano_factor_frozen_reference_point() {
        // Independently derived moments for (N, β, x) = (1, 0.5, 0.5).
        let s = dsts1_from_energy(&EnergyParams1::new(1.0, 0.5, 0.5).unwrap()).unwrap();
        assert_abs_diff_eq!(s.photon_variance(), 3.787980947161671, epsilon = 1e-12);
        assert_abs_diff_eq!(s.fano_factor().unwrap(), 3.030384757729337, epsilon = 1e-12);
    }

    #[test]
    fn fano_factor_of_vacuum_is_undefined() {
        assert!(matches!(
            coherent(0.0).fano_factor(),
            Err(CoreError::Undefined(_))
        ));
    }

    #[test]
    fn sub_poissonian_classification() {
        assert!(!coherent(1.0).is_sub_poissonian().unwrap());
        assert!(!thermal(1.0).is_sub_poissonian().unwrap());
        // Displacement along the squeezed quadrature with a weakly thermal
        // kernel pushes the statistics below Poissonian.
        let s = dsts1_from_energy(&EnergyParams1::new(0.1, 0.5, 0.5).unwrap()).unwrap();
        assert!(s.is_sub_poissonian().unwrap());
    }

    #[test]
    fn classicality_boundary_is_inclusive() {
        assert!(thermal(0.0).is_classical());
        assert!(thermal(3.0).is_classical());
        let sv = dsts1_from_physical(0.0, 0.3, 0.0).unwrap();
        assert!(!sv.is_classical());
        // e^{−2r}(2n_T+1) = 1 exactly: smallest eigenvalue is 1/2.
        let r: f64 = 0.5;
        let n_t = ((2.0 * r).exp() - 1.0) / 2.0;
        let boundary = dsts1_from_physical(0.0, r, n_t).unwrap();
        assert!(boundary.is_classical());
    }

    #[test]
    fn self_fidelity_is_one() {
        let s = dsts1_from_energy(&EnergyParams1::new(1.7, 0.3, 0.9).unwrap()).unwrap();
        assert_abs_diff_eq!(fidelity1(&s, &s).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_fidelity_matches_analytic_overlap() {
        // |⟨α₁|α₂⟩|² = e^{−(x₁−x₂)²·... } = e^{−1} for x = 0 vs 1.
        let f = fidelity1(&coherent(0.0), &coherent(1.0)).unwrap();
        assert_abs_diff_eq!(f, (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn thermal_pair_fidelity_closed_form() {
        // F = 1/(√((1+n₁)(1+n₂)) − √(n₁n₂))² for two thermal states.
        let f = fidelity1(&thermal(1.0), &thermal(2.0)).unwrap();
        let expect = 1.0 / (math::sqrt(6.0) - math::sqrt(2.0)).powi(2);
        assert_abs_diff_eq!(f, expect, epsilon = 1e-12);
        assert_abs_diff_eq!(f, 0.9330127018922193, epsilon = 1e-12);
    }

    #[test]
    fn squeezed_vacuum_versus_vacuum() {
        // F = 1/cosh r.
        let sv = dsts1_from_physical(0.0, 0.8, 0.0).unwrap();
        let f = fidelity1(&sv, &coherent(0.0)).unwrap();
        assert_abs_diff_eq!(f, 1.0 / (0.8f64).cosh(), epsilon = 1e-12);
        assert_abs_diff_eq!(f, 0.7476999182374195, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_frozen_reference_pairs() {
        // Values pinned by an independent high-precision evaluation.
        let a = dsts1_from_energy(&EnergyParams1::new(1.0, 0.5, 0.5).unwrap()).unwrap();
        let b = dsts1_from_energy(&EnergyParams1::new(1.0, 0.3, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(fidelity1(&a, &b).unwrap(), 0.603972222874003, epsilon = 1e-12);

        let c = dsts1_from_energy(&EnergyParams1::new(0.5, 0.2, 0.3).unwrap()).unwrap();
        let d = dsts1_from_energy(&EnergyParams1::new(2.0, 0.8, 1.5).unwrap()).unwrap();
        assert_abs_diff_eq!(fidelity1(&c, &d).unwrap(), 0.04294412017484722, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric() {
        let a = dsts1_from_energy(&EnergyParams1::new(0.9, 0.6, 0.2).unwrap()).unwrap();
        let b = dsts1_from_energy(&EnergyParams1::new(1.4, 0.1, 1.1).unwrap()).unwrap();
        let fab = fidelity1(&a, &b).unwrap();
        let fba = fidelity1(&b, &a).unwrap();
        assert_abs_diff_eq!(fab, fba, epsilon = 1e-15);
    }

    #[test]
    fn uncertainty_violating_cm_is_rejected() {
        let cm = Mat2::diag(0.4, 0.4);
        assert!(matches!(
            GaussianState1::new([0.0, 0.0], cm),
            Err(CoreError::Domain(_))
        ));
    }
}
