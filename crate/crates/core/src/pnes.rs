//! Photon-number entangled states `|ψ⟩ = Σ ψ_n |n,n⟩` with real coefficients:
//! twin-beam (geometric) and photon-subtracted variants, overlap fidelity,
//! and the non-Gaussianity measure δ with its energy renormalization.
//!
//! In terms of the generating parameter `y ∈ [0,1)`:
//!
//! * twin-beam: `ψ_n = √(1−y²)·yⁿ`, per-mode energy `N_T = y²/(1−y²)`;
//! * photon-subtracted: `ψ_n = √((1−y²)³/(1+y²))·(1+n)·yⁿ`, per-mode energy
//!   `N_S = 2y²(y²+2)/(1−y⁴)`.
//!
//! Coefficient vectors are truncated at a cutoff certified by exact geometric
//! tail bounds, so normalization and energy sums hold at the documented
//! tolerances all the way to `y = 0.99`.

use alloc::vec::Vec;

use crate::math::{self, KahanSum};
use crate::{CoreError, Result};

/// Tail-mass budget that sets the certified cutoff.
const TAIL_MASS: f64 = 1e-12;
/// Budget for the photon-number-weighted tail; without this second condition
/// the energy sums silently lose ~n_max × the mass budget near y = 1.
const TAIL_ENERGY: f64 = 1e-11;
/// Normalization tolerance of generated states.
const NORM_TOL: f64 = 1e-10;
/// Normalization tolerance accepted on inputs to the series routines.
const INPUT_NORM_TOL: f64 = 1e-8;
/// Width of the snap to δ = 0 at the pure-Gaussian floor d₋ = 1/2. The
/// discriminant is evaluated in a cancellation-free factored form, but f64
/// round-off still leaves ~1e-12 residue for a twin beam near y = 0.99.
const FLOOR_SNAP: f64 = 1e-10;

/// Coefficient family of a photon-number entangled state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Twin beam (two-mode squeezed vacuum): geometric coefficients, Gaussian.
    Twb,
    /// Photon-subtracted squeezed vacuum: `(1+n)`-weighted geometric, non-Gaussian.
    Pssv,
    /// Caller-supplied normalized coefficients.
    Custom,
}

/// A photon-number entangled state as its coefficient vector `ψ_0..ψ_{n_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PnesState {
    coeffs: Vec<f64>,
    variant: Variant,
    y: Option<f64>,
}

impl PnesState {
    /// Twin-beam coefficients at an explicit cutoff, which must meet the
    /// certified tail rule for this `y` (see [`required_cutoff`]).
    pub fn twb(y: f64, n_max: usize) -> Result<Self> {
        check_y(y)?;
        let required = required_cutoff(y);
        if n_max < required {
            return Err(CoreError::CutoffInsufficient {
                requested: n_max,
                required,
            });
        }
        let scale = math::sqrt(1.0 - y * y);
        let mut coeffs = Vec::with_capacity(n_max + 1);
        let mut power = 1.0;
        for _ in 0..=n_max {
            coeffs.push(scale * power);
            power *= y;
        }
        Self::validated(coeffs, Variant::Twb, Some(y))
    }

    /// Twin-beam coefficients at the smallest certified cutoff.
    pub fn twb_auto(y: f64) -> Result<Self> {
        check_y(y)?;
        Self::twb(y, required_cutoff(y))
    }

    /// Photon-subtracted coefficients at an explicit cutoff (same rule).
    pub fn pssv(y: f64, n_max: usize) -> Result<Self> {
        check_y(y)?;
        let required = required_cutoff(y);
        if n_max < required {
            return Err(CoreError::CutoffInsufficient {
                requested: n_max,
                required,
            });
        }
        let q = y * y;
        let scale = math::sqrt((1.0 - q) * (1.0 - q) * (1.0 - q) / (1.0 + q));
        let mut coeffs = Vec::with_capacity(n_max + 1);
        let mut power = 1.0;
        for n in 0..=n_max {
            coeffs.push(scale * (1.0 + n as f64) * power);
            power *= y;
        }
        Self::validated(coeffs, Variant::Pssv, Some(y))
    }

    /// Photon-subtracted coefficients at the smallest certified cutoff.
    pub fn pssv_auto(y: f64) -> Result<Self> {
        check_y(y)?;
        Self::pssv(y, required_cutoff(y))
    }

    /// Wrap caller-supplied coefficients; they must be finite and normalized.
    pub fn custom(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(CoreError::Domain("coefficient vector must be nonempty"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(CoreError::Domain("coefficients must be finite"));
        }
        Self::validated(coeffs, Variant::Custom, None)
    }

    fn validated(coeffs: Vec<f64>, variant: Variant, y: Option<f64>) -> Result<Self> {
        let state = PnesState { coeffs, variant, y };
        if math::abs(state.norm_sq() - 1.0) > NORM_TOL {
            return Err(CoreError::Domain(
                "coefficients must be normalized: Σψ_n² = 1 within 1e-10",
            ));
        }
        Ok(state)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn y(&self) -> Option<f64> {
        self.y
    }

    /// `Σ ψ_n²`.
    pub fn norm_sq(&self) -> f64 {
        let mut acc = KahanSum::default();
        for &c in &self.coeffs {
            acc.add(c * c);
        }
        acc.value()
    }

    /// Per-mode mean photon number `Σ n·ψ_n²`.
    pub fn mean_photon(&self) -> f64 {
        let mut acc = KahanSum::default();
        for (n, &c) in self.coeffs.iter().enumerate() {
            acc.add(n as f64 * c * c);
        }
        acc.value()
    }
}

fn check_y(y: f64) -> Result<()> {
    if !(0.0..1.0).contains(&y) {
        return Err(CoreError::Domain("generating parameter y must lie in [0, 1)"));
    }
    Ok(())
}

/// Exact tail `Σ_{n>M} (1+n)²·qⁿ` of the photon-subtracted weight series.
fn tail_mass(q: f64, m: f64) -> f64 {
    let omq = 1.0 - q;
    let a = q / omq;
    let b = q / (omq * omq);
    let c = q * (1.0 + q) / (omq * omq * omq);
    powi(q, m) * ((m + 1.0) * (m + 1.0) * a + 2.0 * (m + 1.0) * b + c)
}

/// Exact tail `Σ_{n>M} n(1+n)²·qⁿ`.
fn tail_energy(q: f64, m: f64) -> f64 {
    let omq = 1.0 - q;
    let a = q / omq;
    let b = q / (omq * omq);
    let c = q * (1.0 + q) / (omq * omq * omq);
    let d = q * (1.0 + 4.0 * q + q * q) / (omq * omq * omq * omq);
    let s3 = m * m * m * a + 3.0 * m * m * b + 3.0 * m * c + d;
    let s2 = m * m * a + 2.0 * m * b + c;
    let s1 = m * a + b;
    powi(q, m) * (s3 + 2.0 * s2 + s1)
}

fn powi(q: f64, m: f64) -> f64 {
    // q^m via exp/ln is fine here: q ∈ (0,1), m ≤ a few thousand.
    math::exp(m * math::ln(q))
}

/// Smallest cutoff `n_max` whose exact residual tails satisfy both budgets:
/// mass below 1e-12 and photon-weighted mass below 1e-11. The bound uses the
/// photon-subtracted weights, which dominate the twin-beam ones, so one rule
/// serves both variants.
pub fn required_cutoff(y: f64) -> usize {
    let q = y * y;
    if q < 1e-300 {
        return 8;
    }
    let c_sq = (1.0 - q) * (1.0 - q) * (1.0 - q) / (1.0 + q);
    let mut m = 8usize;
    loop {
        let mf = m as f64;
        if c_sq * tail_mass(q, mf) < TAIL_MASS && c_sq * tail_energy(q, mf) < TAIL_ENERGY {
            return m;
        }
        m += core::cmp::max(8, m / 8);
    }
}

/// Twin-beam per-mode energy `N_T(y) = y²/(1−y²)`.
pub fn twb_mean_photon(y: f64) -> f64 {
    let q = y * y;
    q / (1.0 - q)
}

/// Photon-subtracted per-mode energy `N_S(y) = 2y²(y²+2)/(1−y⁴)`.
pub fn pssv_mean_photon(y: f64) -> f64 {
    let q = y * y;
    2.0 * q * (q + 2.0) / (1.0 - q * q)
}

/// Invert the per-mode energy for a generating variant: closed form for the
/// twin beam, bisection on the strictly increasing `N_S` otherwise.
pub fn y_from_energy(n: f64, variant: Variant) -> Result<f64> {
    if !n.is_finite() || n < 0.0 {
        return Err(CoreError::Domain("per-mode energy N must be finite and ≥ 0"));
    }
    match variant {
        Variant::Twb => Ok(math::sqrt(n / (1.0 + n))),
        Variant::Pssv => {
            if n == 0.0 {
                return Ok(0.0);
            }
            let mut lo = 0.0f64;
            let mut hi = 0.5f64;
            while pssv_mean_photon(hi) < n {
                hi = 0.5 * (1.0 + hi);
                if 1.0 - hi < 1e-17 {
                    break;
                }
            }
            let mut best = hi;
            let mut best_res = math::abs(pssv_mean_photon(hi) - n);
            for _ in 0..300 {
                let mid = 0.5 * (lo + hi);
                let res = pssv_mean_photon(mid) - n;
                if math::abs(res) < best_res {
                    best = mid;
                    best_res = math::abs(res);
                }
                if best_res <= 1e-12 {
                    return Ok(best);
                }
                if res < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < f64::EPSILON * hi {
                    break;
                }
            }
            if best_res <= 1e-12 {
                Ok(best)
            } else {
                Err(CoreError::NumericalConsistency(
                    "energy bisection could not reach |N_S(y) − N| ≤ 1e-12",
                ))
            }
        }
        Variant::Custom => Err(CoreError::Domain(
            "custom states have no generating parameter to invert",
        )),
    }
}

/// Overlap fidelity `F = (Σ ψ_n^a ψ_n^b)²` between two normalized states.
pub fn fidelity_pnes(a: &PnesState, b: &PnesState) -> Result<f64> {
    for s in [a, b] {
        if math::abs(s.norm_sq() - 1.0) > INPUT_NORM_TOL {
            return Err(CoreError::Domain("fidelity inputs must be normalized"));
        }
    }
    let mut acc = KahanSum::default();
    for (&ca, &cb) in a.coeffs.iter().zip(b.coeffs.iter()) {
        acc.add(ca * cb);
    }
    let overlap = acc.value();
    math::clamp_unit_fidelity(overlap * overlap)
}

/// Closed form of the twin-beam × photon-subtracted overlap fidelity,
/// `F = (1−y_T²)·(1−y_S²)³ / [(1+y_S²)·(1−y_T·y_S)⁴]`, used to cross-check
/// the series and to make large grid scans cheap.
pub fn fst_closed(y_t: f64, y_s: f64) -> Result<f64> {
    check_y(y_t)?;
    check_y(y_s)?;
    let qt = y_t * y_t;
    let qs = y_s * y_s;
    let omqs = 1.0 - qs;
    let geom = 1.0 - y_t * y_s;
    math::clamp_unit_fidelity((1.0 - qt) * omqs * omqs * omqs / ((1.0 + qs) * geom * geom * geom * geom))
}

/// Non-Gaussianity `δ[ψ]`: the entropy of the Gaussian state sharing the
/// state's covariance,
///
/// `d₋ = √((N+½)² − E²)`, `E = Σ (1+n)·ψ_n·ψ_{n+1}`,
/// `δ = 2[(d₋+½)ln(d₋+½) − (d₋−½)ln(d₋−½)]` (natural log; `0·ln 0 = 0`).
///
/// The discriminant is accumulated in the factored form
/// `f₁·f₂ = Σψ_n[(n+½)ψ_n − (n+1)ψ_{n+1}] · Σψ_n[(n+½)ψ_n + (n+1)ψ_{n+1}]`,
/// which avoids the ten-digit cancellation of `(N+½)² − E²` near the
/// pure-Gaussian floor.
pub fn nongaussianity(p: &PnesState) -> Result<f64> {
    if math::abs(p.norm_sq() - 1.0) > INPUT_NORM_TOL {
        return Err(CoreError::Domain("non-Gaussianity input must be normalized"));
    }
    let c = &p.coeffs;
    let mut f1 = KahanSum::default();
    let mut f2 = KahanSum::default();
    for n in 0..c.len() {
        let nf = n as f64;
        let diag = (nf + 0.5) * c[n];
        let off = if n + 1 < c.len() {
            (nf + 1.0) * c[n + 1]
        } else {
            0.0
        };
        f1.add(c[n] * (diag - off));
        f2.add(c[n] * (diag + off));
    }
    let disc = f1.value() * f2.value();
    if disc < -1e-12 {
        return Err(CoreError::NumericalConsistency(
            "discriminant (N+½)² − E² is negative",
        ));
    }
    delta_from_dminus_squared(math::fmax(disc, 0.0))
}

/// Entropy of the Gaussian reference with smaller symplectic eigenvalue
/// `d₋ = √(disc)`, snapping to zero on the pure-Gaussian floor.
fn delta_from_dminus_squared(disc: f64) -> Result<f64> {
    let above_floor = disc - 0.25;
    if above_floor < -FLOOR_SNAP {
        return Err(CoreError::NumericalConsistency(
            "symplectic eigenvalue fell below the vacuum floor 1/2",
        ));
    }
    if above_floor <= FLOOR_SNAP {
        return Ok(0.0);
    }
    let d = math::sqrt(disc);
    Ok(2.0 * ((d + 0.5) * math::ln(d + 0.5) - (d - 0.5) * math::ln(d - 0.5)))
}

/// δ of the photon-subtracted family straight from the generating parameter:
/// `d₋(q) = √(9q² + 2q + 1)/(2(1+q))` with `q = y²`. Used by the asymptote
/// ladder, where the series form is out of reach.
fn pssv_delta_closed(q: f64) -> Result<f64> {
    let d = math::sqrt(9.0 * q * q + 2.0 * q + 1.0) / (2.0 * (1.0 + q));
    delta_from_dminus_squared(d * d)
}

/// Generating parameter of the photon-subtracted state at per-mode energy N,
/// as the exact root of the energy relation (quadratic in q = y²).
fn pssv_q_from_energy(n: f64) -> f64 {
    (math::sqrt(4.0 + 2.0 * n + n * n) - 2.0) / (2.0 + n)
}

/// Asymptotic non-Gaussianity `δ_∞ = lim_{N→∞} δ` of the photon-subtracted
/// family, evaluated on an energy-doubling ladder `N_k = 2^k` until
/// successive values differ by less than 1e-8 (about 28 rungs). Never
/// hard-coded: each call re-runs the cheap closed-form ladder.
pub fn delta_asymptote() -> f64 {
    let mut n = 1.0f64;
    let mut prev = f64::NAN;
    loop {
        let delta = pssv_delta_closed(pssv_q_from_energy(n))
            .expect("closed-form ladder stays above the vacuum floor");
        if prev.is_finite() && math::abs(delta - prev) < 1e-8 {
            return delta;
        }
        prev = delta;
        n *= 2.0;
    }
}

/// `δ_R = δ/δ_∞ ∈ [0, 1]`, the non-Gaussianity renormalized to its
/// large-energy limit. Only the photon-subtracted family has this
/// normalization constant; other variants are a domain error.
pub fn renormalized_nongaussianity(p: &PnesState) -> Result<f64> {
    if p.variant != Variant::Pssv {
        return Err(CoreError::Domain(
            "renormalized non-Gaussianity is defined for the photon-subtracted family",
        ));
    }
    let delta = nongaussianity(p)?;
    Ok(math::fmin(delta / delta_asymptote(), 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_parameter_states_are_vacuum() {
        let t = PnesState::twb_auto(0.0).unwrap();
        assert_abs_diff_eq!(t.coeffs()[0], 1.0, epsilon = 1e-15);
        assert!(t.coeffs()[1..].iter().all(|&c| c == 0.0));
        let s = PnesState::pssv_auto(0.0).unwrap();
        assert_abs_diff_eq!(s.coeffs()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn twb_leading_coefficients() {
        let t = PnesState::twb_auto(0.5).unwrap();
        assert_abs_diff_eq!(t.coeffs()[0], math::sqrt(0.75), epsilon = 1e-15);
        assert_abs_diff_eq!(t.coeffs()[1], 0.5 * math::sqrt(0.75), epsilon = 1e-15);
    }

    #[test]
    fn generated_states_are_normalized_up_to_high_y() {
        for &y in &[0.0, 0.3, 0.7, 0.9, 0.99] {
            let t = PnesState::twb_auto(y).unwrap();
            let s = PnesState::pssv_auto(y).unwrap();
            assert_abs_diff_eq!(t.norm_sq(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(s.norm_sq(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn energies_match_closed_forms() {
        for &y in &[0.1, 0.5, 0.9, 0.99] {
            let t = PnesState::twb_auto(y).unwrap();
            let s = PnesState::pssv_auto(y).unwrap();
            assert_abs_diff_eq!(t.mean_photon(), twb_mean_photon(y), epsilon = 1e-10);
            assert_abs_diff_eq!(s.mean_photon(), pssv_mean_photon(y), epsilon = 1e-9);
        }
    }

    #[test]
    fn insufficient_cutoff_is_rejected() {
        let required = required_cutoff(0.9);
        assert!(required > 40);
        assert!(matches!(
            PnesState::twb(0.9, 40),
            Err(CoreError::CutoffInsufficient { .. })
        ));
    }

    #[test]
    fn y_outside_unit_interval_is_rejected() {
        assert!(PnesState::twb_auto(1.0).is_err());
        assert!(PnesState::pssv_auto(-0.1).is_err());
    }

    #[test]
    fn energy_inversion_twb() {
        assert_abs_diff_eq!(y_from_energy(0.0, Variant::Twb).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            y_from_energy(1.0, Variant::Twb).unwrap(),
            1.0 / math::sqrt(2.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn energy_inversion_pssv_hits_the_residual_target() {
        for &n in &[0.1, 1.0, 7.0, 100.0] {
            let y = y_from_energy(n, Variant::Pssv).unwrap();
            assert!(math::abs(pssv_mean_photon(y) - n) <= 1e-12);
        }
        // Frozen root at N = 1 from a 50-digit evaluation.
        let y1 = y_from_energy(1.0, Variant::Pssv).unwrap();
        assert_abs_diff_eq!(y1, 0.463950899364933, epsilon = 1e-12);
    }

    #[test]
    fn self_fidelity_is_one() {
        let s = PnesState::pssv_auto(0.6).unwrap();
        assert_abs_diff_eq!(fidelity_pnes(&s, &s).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn series_fidelity_matches_closed_form() {
        for &(yt, ys) in &[(0.6, 0.3), (0.9, 0.8), (0.5, 0.5), (0.99, 0.9)] {
            // Build both states at the common cutoff: the overlap sum stops
            // at the shorter vector, so unequal cutoffs would reintroduce a
            // cross-term tail far above each state's own certified budget.
            let m = core::cmp::max(required_cutoff(yt), required_cutoff(ys));
            let t = PnesState::twb(yt, m).unwrap();
            let s = PnesState::pssv(ys, m).unwrap();
            let series = fidelity_pnes(&t, &s).unwrap();
            let closed = fst_closed(yt, ys).unwrap();
            assert_abs_diff_eq!(series, closed, epsilon = 1e-10);
        }
    }

    #[test]
    fn equal_energy_fidelity_frozen_point_and_large_energy_limit() {
        let n = 1.0;
        let yt = y_from_energy(n, Variant::Twb).unwrap();
        let ys = y_from_energy(n, Variant::Pssv).unwrap();
        assert_abs_diff_eq!(
            fst_closed(yt, ys).unwrap(),
            0.9754000976902639,
            epsilon = 1e-12
        );
        // Large-energy limit approaches 27/32 from above.
        let y100_t = y_from_energy(100.0, Variant::Twb).unwrap();
        let y100_s = y_from_energy(100.0, Variant::Pssv).unwrap();
        let f100 = fst_closed(y100_t, y100_s).unwrap();
        assert!(f100 > 27.0 / 32.0);
        assert!(f100 - 27.0 / 32.0 < 0.01);
    }

    #[test]
    fn twin_beam_is_exactly_gaussian() {
        for &y in &[0.0, 0.3, 0.7, 0.9, 0.99] {
            let t = PnesState::twb_auto(y).unwrap();
            assert_eq!(nongaussianity(&t).unwrap(), 0.0);
        }
    }

    #[test]
    fn pssv_series_discriminant_matches_the_closed_eigenvalue() {
        // The coefficient-series route and the generating-parameter closed
        // form d₋(q) = √(9q² + 2q + 1)/(2(1+q)) must agree on the whole
        // photon-subtracted family.
        for k in 1..19 {
            let y = 0.05 * k as f64;
            let series = nongaussianity(&PnesState::pssv_auto(y).unwrap()).unwrap();
            let closed = pssv_delta_closed(y * y).unwrap();
            assert_abs_diff_eq!(series, closed, epsilon = 1e-9);
        }
    }

    #[test]
    fn pssv_nongaussianity_frozen_points_and_monotonicity() {
        let d1 = nongaussianity(
            &PnesState::pssv_auto(y_from_energy(1.0, Variant::Pssv).unwrap()).unwrap(),
        )
        .unwrap();
        let d2 = nongaussianity(
            &PnesState::pssv_auto(y_from_energy(2.0, Variant::Pssv).unwrap()).unwrap(),
        )
        .unwrap();
        assert_abs_diff_eq!(d1, 0.4567482234409674, epsilon = 1e-10);
        assert_abs_diff_eq!(d2, 0.7952488642195429, epsilon = 1e-10);
        assert!(d1 < d2);
    }

    #[test]
    fn asymptote_ladder_converges_to_the_analytic_limit() {
        let ladder = delta_asymptote();
        // Analytic N→∞ limit: d₋ → √3/2.
        let d: f64 = math::sqrt(3.0) / 2.0;
        let analytic = 2.0 * ((d + 0.5) * (d + 0.5f64).ln() - (d - 0.5) * (d - 0.5f64).ln());
        assert_abs_diff_eq!(ladder, analytic, epsilon = 2e-8);
        assert_abs_diff_eq!(ladder, 1.5878907998453649, epsilon = 1e-9);
    }

    #[test]
    fn renormalized_nongaussianity_frozen_point() {
        let s = PnesState::pssv_auto(y_from_energy(1.0, Variant::Pssv).unwrap()).unwrap();
        let dr = renormalized_nongaussianity(&s).unwrap();
        assert_abs_diff_eq!(dr, 0.2876446059675183, epsilon = 1e-9);
    }

    #[test]
    fn renormalization_rejects_other_variants() {
        let t = PnesState::twb_auto(0.5).unwrap();
        assert!(matches!(
            renormalized_nongaussianity(&t),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn custom_states_round_trip_through_the_measures() {
        // Single photon pair |1,1⟩: N = 1, E = 0, d₋ = 3/2.
        let s = PnesState::custom(vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(s.mean_photon(), 1.0, epsilon = 1e-15);
        let d: f64 = 1.5;
        let expect = 2.0 * ((d + 0.5) * (d + 0.5f64).ln() - (d - 0.5) * (d - 0.5f64).ln());
        assert_abs_diff_eq!(nongaussianity(&s).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn unnormalized_custom_coefficients_are_rejected() {
        assert!(matches!(
            PnesState::custom(vec![0.5, 0.5]),
            Err(CoreError::Domain(_))
        ));
    }
}
