//! Property tests for the structural invariants of the state families and
//! the fidelity / nonclassicality / non-Gaussianity measures.

use cvfid_core::distance::{bures_distance, trace_distance_bounds};
use cvfid_core::pnes::{
    self, fidelity_pnes, fst_closed, nongaussianity, renormalized_nongaussianity, y_from_energy,
};
use cvfid_core::single_mode::{
    dsts1_from_energy, dsts1_from_physical, energy_to_physical, fidelity1, physical_to_energy,
};
use cvfid_core::two_mode::{fidelity2, physical_from_energy, sts2_from_energy};
use cvfid_core::{EnergyParams1, EnergyParams2, PnesState, Variant};
use proptest::prelude::*;

const SELF_FID_TOL: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;
const ROUND_TRIP_TOL: f64 = 1e-12;
const NORM_TOL: f64 = 1e-10;

proptest! {
    #[test]
    fn single_mode_self_fidelity_is_unity(
        n in 0.0..3.0f64,
        beta in 0.0..=1.0f64,
        x in 0.0..2.0f64,
    ) {
        let s = dsts1_from_energy(&EnergyParams1::new(n, beta, x).unwrap()).unwrap();
        let f = fidelity1(&s, &s).unwrap();
        prop_assert!((f - 1.0).abs() <= SELF_FID_TOL, "self-fidelity {f}");
    }

    #[test]
    fn single_mode_fidelity_is_symmetric_and_bounded(
        n1 in 0.0..3.0f64, beta1 in 0.0..=1.0f64, x1 in 0.0..2.0f64,
        n2 in 0.0..3.0f64, beta2 in 0.0..=1.0f64, x2 in 0.0..2.0f64,
    ) {
        let a = dsts1_from_energy(&EnergyParams1::new(n1, beta1, x1).unwrap()).unwrap();
        let b = dsts1_from_energy(&EnergyParams1::new(n2, beta2, x2).unwrap()).unwrap();
        let fab = fidelity1(&a, &b).unwrap();
        let fba = fidelity1(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() <= SYMMETRY_TOL);
        prop_assert!((0.0..=1.0).contains(&fab));
    }

    #[test]
    fn single_mode_energy_round_trip(
        n in 1e-6..3.0f64,
        beta in 0.0..=1.0f64,
        x in 0.0..2.0f64,
    ) {
        let p = EnergyParams1::new(n, beta, x).unwrap();
        let (n_t, n_s, _r) = energy_to_physical(&p).unwrap();
        let (n_back, beta_back) = physical_to_energy(n_t, n_s);
        prop_assert!((n_back - n).abs() <= ROUND_TRIP_TOL * n.max(1.0));
        prop_assert!((beta_back - beta).abs() <= ROUND_TRIP_TOL);
    }

    #[test]
    fn thermal_occupation_grows_with_kernel_energy(
        na in 0.0..3.0f64,
        nb in 0.0..3.0f64,
        beta in 0.0..0.999f64,
    ) {
        let (lo, hi) = if na <= nb { (na, nb) } else { (nb, na) };
        let (t_lo, _, _) = energy_to_physical(&EnergyParams1::new(lo, beta, 0.0).unwrap()).unwrap();
        let (t_hi, _, _) = energy_to_physical(&EnergyParams1::new(hi, beta, 0.0).unwrap()).unwrap();
        prop_assert!(t_lo <= t_hi + ROUND_TRIP_TOL);
    }

    #[test]
    fn fully_squeezed_single_mode_states_are_pure(
        n in 0.0..3.0f64,
        x in 0.0..2.0f64,
    ) {
        let s = dsts1_from_energy(&EnergyParams1::new(n, 1.0, x).unwrap()).unwrap();
        prop_assert!((s.cm().det() - 0.25).abs() <= 1e-12);
    }

    #[test]
    fn classical_states_are_never_sub_poissonian(
        n_t in 0.0..3.0f64,
        u in 0.0..=1.0f64,
        x in 0.0..2.0f64,
    ) {
        // r ≤ ½·ln(2n_T + 1) keeps the squeezed variance at or above vacuum.
        let r = 0.5 * u * (2.0 * n_t + 1.0).ln();
        let s = dsts1_from_physical(x, r, n_t).unwrap();
        prop_assert!(s.is_classical());
        if s.mean_photon() > 1e-9 {
            prop_assert!(s.fano_factor().unwrap() >= 1.0 - 1e-10);
            prop_assert!(!s.is_sub_poissonian().unwrap());
        }
    }

    #[test]
    fn two_mode_self_fidelity_is_unity(
        n in 0.0..3.0f64,
        beta in 0.0..=1.0f64,
        gamma in 0.0..=1.0f64,
    ) {
        let s = sts2_from_energy(&EnergyParams2::new(n, beta, gamma).unwrap()).unwrap();
        let f = fidelity2(&s, &s).unwrap();
        prop_assert!((f - 1.0).abs() <= 1e-9, "self-fidelity {f}");
    }

    #[test]
    fn two_mode_fidelity_is_symmetric_and_bounded(
        n1 in 0.0..3.0f64, beta1 in 0.0..=1.0f64, gamma1 in 0.0..=1.0f64,
        n2 in 0.0..3.0f64, beta2 in 0.0..=1.0f64, gamma2 in 0.0..=1.0f64,
    ) {
        let a = sts2_from_energy(&EnergyParams2::new(n1, beta1, gamma1).unwrap()).unwrap();
        let b = sts2_from_energy(&EnergyParams2::new(n2, beta2, gamma2).unwrap()).unwrap();
        let fab = fidelity2(&a, &b).unwrap();
        let fba = fidelity2(&b, &a).unwrap();
        prop_assert!((fab - fba).abs() <= SYMMETRY_TOL);
        prop_assert!((0.0..=1.0).contains(&fab));
    }

    #[test]
    fn two_mode_energy_round_trip(
        n in 1e-6..3.0f64,
        beta in 0.0..0.999f64,
        gamma in 0.0..=1.0f64,
    ) {
        let p = EnergyParams2::new(n, beta, gamma).unwrap();
        let (n_s, n_t1, n_t2) = physical_from_energy(&p).unwrap();
        let (n_back, beta_back, gamma_back) =
            cvfid_core::two_mode::physical_to_energy(n_s, n_t1, n_t2);
        prop_assert!((n_back - n).abs() <= ROUND_TRIP_TOL * n.max(1.0));
        prop_assert!((beta_back - beta).abs() <= ROUND_TRIP_TOL);
        prop_assert!((gamma_back - gamma).abs() <= 1e-10);
    }

    #[test]
    fn states_without_squeezing_are_separable(
        n in 0.0..3.0f64,
        gamma in 0.0..=1.0f64,
    ) {
        let s = sts2_from_energy(&EnergyParams2::new(n, 0.0, gamma).unwrap()).unwrap();
        prop_assert!(s.is_separable().unwrap());
    }

    #[test]
    fn two_mode_symplectic_spectrum_is_ordered_and_bona_fide(
        n in 0.0..3.0f64,
        beta in 0.0..=1.0f64,
        gamma in 0.0..=1.0f64,
    ) {
        let s = sts2_from_energy(&EnergyParams2::new(n, beta, gamma).unwrap()).unwrap();
        let (dp, dm) = s.symplectic_eigenvalues().unwrap();
        prop_assert!(dm <= dp + 1e-12);
        prop_assert!(dm >= 0.5 - 1e-10);
    }

    #[test]
    fn generated_pnes_states_meet_their_certified_budgets(y in 0.0..0.95f64) {
        let t = PnesState::twb_auto(y).unwrap();
        let s = PnesState::pssv_auto(y).unwrap();
        prop_assert!((t.norm_sq() - 1.0).abs() <= NORM_TOL);
        prop_assert!((s.norm_sq() - 1.0).abs() <= NORM_TOL);
        prop_assert!((t.mean_photon() - pnes::twb_mean_photon(y)).abs() <= 1e-9);
        prop_assert!((s.mean_photon() - pnes::pssv_mean_photon(y)).abs() <= 1e-9);
    }

    #[test]
    fn twin_beams_have_exactly_zero_nongaussianity(y in 0.0..0.95f64) {
        let t = PnesState::twb_auto(y).unwrap();
        prop_assert_eq!(nongaussianity(&t).unwrap(), 0.0);
    }

    #[test]
    fn overlap_fidelity_matches_its_closed_form(
        y_t in 0.0..0.9f64,
        y_s in 0.0..0.9f64,
    ) {
        // A common cutoff keeps the cross-overlap free of truncation tails.
        let m = pnes::required_cutoff(y_t).max(pnes::required_cutoff(y_s));
        let t = PnesState::twb(y_t, m).unwrap();
        let s = PnesState::pssv(y_s, m).unwrap();
        let series = fidelity_pnes(&t, &s).unwrap();
        let closed = fst_closed(y_t, y_s).unwrap();
        prop_assert!((series - closed).abs() <= 1e-10);
    }

    #[test]
    fn renormalized_nongaussianity_is_monotone_in_unit_range(
        na in 0.01..20.0f64,
        nb in 0.01..20.0f64,
    ) {
        let (lo, hi) = if na <= nb { (na, nb) } else { (nb, na) };
        let dr = |n: f64| {
            let y = y_from_energy(n, Variant::Pssv).unwrap();
            renormalized_nongaussianity(&PnesState::pssv_auto(y).unwrap()).unwrap()
        };
        let d_lo = dr(lo);
        let d_hi = dr(hi);
        prop_assert!((0.0..=1.0).contains(&d_lo));
        prop_assert!((0.0..=1.0).contains(&d_hi));
        prop_assert!(d_lo <= d_hi + 1e-9);
    }

    #[test]
    fn trace_distance_bracket_is_ordered(f in 0.0..=1.0f64) {
        let (lo, hi) = trace_distance_bounds(f).unwrap();
        prop_assert!(lo >= -1e-15);
        prop_assert!(lo <= hi + 1e-15);
        prop_assert!(hi <= 1.0 + 1e-15);
        let b = bures_distance(f).unwrap();
        prop_assert!((0.0..=std::f64::consts::SQRT_2 + 1e-15).contains(&b));
    }
}
