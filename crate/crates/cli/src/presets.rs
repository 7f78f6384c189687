//! Named scan configurations reproducing the four demonstration figures.
//!
//! Axis ranges and densities are read off the figures rather than printed
//! numbers, chosen to contain all described phenomena: kernel energies
//! N ∈ [0.05, 3], fractions β, γ ∈ [0, 1], displacement x ∈ [0, 2], and
//! photon-number energies on a log grid spanning 10⁻²–10². All of them are
//! CLI-overridable.

use crate::error::{CliError, Result};
use crate::scan::{Axis, Family, PnesScanSpec, Property, ScanSpec, TargetSpec};
use std::collections::BTreeMap;

/// A named configuration: either a Gaussian grid scan or a photon-number
/// scan.
#[derive(Debug, Clone)]
pub enum Preset {
    Scan(ScanSpec),
    Pnes(PnesScanSpec),
}

pub const PRESET_NAMES: [&str; 6] = ["fig1", "fig2a", "fig2b", "fig3", "fig4a", "fig4b"];

fn fixed(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect()
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Result<Preset> {
    match name {
        // Displaced squeezed thermal states against the equal-energy target
        // (β = 0.5, x = 0.5): the F > 0.99 region straddles the Fano-factor
        // boundary, containing sub- and super-Poissonian states.
        "fig1" => Ok(Preset::Scan(ScanSpec {
            family: Family::Dsts1,
            axes: vec![
                Axis::new("N", 0.05, 3.0, 60),
                Axis::new("beta", 0.0, 1.0, 41),
                Axis::new("x", 0.0, 2.0, 41),
            ],
            target: TargetSpec {
                fixed: fixed(&[("beta", 0.5), ("x", 0.5)]),
                shared: vec!["N".to_string()],
                free: None,
                require_flag: None,
            },
            threshold: 0.99,
            property: Property::SubPoissonian,
        })),
        // Squeezed thermal states against the nonclassical target family
        // β' = 0.3: classical probes reach F > 0.95.
        "fig2a" => Ok(Preset::Scan(ScanSpec {
            family: Family::Sts1,
            axes: vec![
                Axis::new("N", 0.05, 3.0, 60),
                Axis::new("beta", 0.0, 1.0, 51),
            ],
            target: TargetSpec {
                fixed: fixed(&[("beta", 0.3)]),
                shared: vec![],
                free: Some(Axis::new("N", 0.05, 3.0, 60)),
                require_flag: Some(false),
            },
            threshold: 0.95,
            property: Property::Classical,
        })),
        // Same overlap with the target family pinned at N' = 0.6 and the
        // squeezing fraction swept instead.
        "fig2b" => Ok(Preset::Scan(ScanSpec {
            family: Family::Sts1,
            axes: vec![
                Axis::new("N", 0.05, 3.0, 60),
                Axis::new("beta", 0.0, 1.0, 51),
            ],
            target: TargetSpec {
                fixed: fixed(&[("N", 0.6)]),
                shared: vec![],
                free: Some(Axis::new("beta", 0.0, 1.0, 51)),
                require_flag: Some(false),
            },
            threshold: 0.95,
            property: Property::Classical,
        })),
        // Two-mode squeezed thermal states against the entangled equal-energy
        // target (β = 0.2, γ = 0.5): separable probes reach F > 0.99.
        "fig3" => Ok(Preset::Scan(ScanSpec {
            family: Family::Sts2,
            axes: vec![
                Axis::new("N", 0.05, 3.0, 60),
                Axis::new("beta", 0.0, 1.0, 21),
                Axis::new("gamma", 0.0, 1.0, 21),
            ],
            target: TargetSpec {
                fixed: fixed(&[("beta", 0.2), ("gamma", 0.5)]),
                shared: vec!["N".to_string()],
                free: None,
                require_flag: None,
            },
            threshold: 0.99,
            property: Property::Separable,
        })),
        // Twin-beam vs photon-subtracted fidelity over independent energies,
        // with level sets at 0.94 / 0.92 / 0.90.
        "fig4a" => Ok(Preset::Pnes(PnesScanSpec {
            grid: Some((
                Axis::log("N_T", 1e-2, 1e2, 60),
                Axis::log("N_S", 1e-2, 1e2, 60),
            )),
            curve: None,
            thresholds: vec![0.94, 0.92, 0.90],
        })),
        // Equal-energy diagonal: fidelity decreasing toward 27/32 while the
        // renormalized non-Gaussianity grows.
        "fig4b" => Ok(Preset::Pnes(PnesScanSpec {
            grid: None,
            curve: Some(Axis::log("N", 1e-2, 1e2, 200)),
            thresholds: vec![0.94, 0.92, 0.90],
        })),
        other => Err(CliError::Config(format!(
            "unknown preset {other}; available: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_resolve_and_validate() {
        for name in PRESET_NAMES {
            match preset(name).unwrap() {
                Preset::Scan(spec) => spec.validate().unwrap(),
                Preset::Pnes(spec) => spec.validate().unwrap(),
            }
        }
        assert!(preset("fig9").is_err());
        assert!(preset("").is_err());
    }

    /// The grids must contain the parameter points quoted in the narrative
    /// exactly, so scans reproduce those fidelities rather than neighbors.
    #[test]
    fn quoted_parameter_points_sit_on_the_grids() {
        let Preset::Scan(fig1) = preset("fig1").unwrap() else {
            panic!()
        };
        assert_eq!(fig1.axes[0].value(1), 0.1); // N
        assert_eq!(fig1.axes[1].value(12), 0.3); // beta
        assert_eq!(fig1.axes[2].value(10), 0.5); // x

        let Preset::Scan(fig2b) = preset("fig2b").unwrap() else {
            panic!()
        };
        assert_eq!(fig2b.axes[0].value(4), 0.25); // N
        assert!((fig2b.axes[1].value(3) - 0.06).abs() < 1e-15); // beta

        let Preset::Scan(fig3) = preset("fig3").unwrap() else {
            panic!()
        };
        assert!((fig3.axes[0].value(3) - 0.2).abs() < 1e-15); // N
        assert_eq!(fig3.axes[1].value(1), 0.05); // beta
        assert_eq!(fig3.axes[2].value(10), 0.5); // gamma
    }

    #[test]
    fn log_presets_span_four_decades() {
        let Preset::Pnes(fig4b) = preset("fig4b").unwrap() else {
            panic!()
        };
        let axis = fig4b.curve.unwrap();
        assert!((axis.value(0) - 1e-2).abs() < 1e-15);
        assert!((axis.value(axis.steps - 1) - 1e2).abs() < 1e-12);
    }
}
