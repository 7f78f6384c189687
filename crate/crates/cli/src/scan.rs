//! Parameter-grid scans and counterexample search: evaluate fidelity to a
//! target (or target family) and a physical property over a grid, flag the
//! high-fidelity region, and hunt for state pairs that combine high fidelity
//! with opposite physical properties.

use cvfid_core::single_mode::{dsts1_from_energy, fidelity1};
use cvfid_core::two_mode::{fidelity2, sts2_from_energy};
use cvfid_core::{pnes, EnergyParams1, EnergyParams2, GaussianState1, GaussianState2, PnesState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, Result};
use crate::states::StateSpec;

/// State family a scan ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Dsts1,
    Sts1,
    Sts2,
    Pnes,
}

impl Family {
    /// Grid parameters the family requires, in canonical order.
    fn params(self) -> &'static [&'static str] {
        match self {
            Family::Dsts1 => &["N", "beta", "x"],
            Family::Sts1 => &["N", "beta"],
            Family::Sts2 => &["N", "beta", "gamma"],
            Family::Pnes => &[],
        }
    }
}

/// Physical property evaluated at every grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    SubPoissonian,
    Classical,
    Separable,
    Nongaussianity,
}

impl Property {
    fn compatible(self, family: Family) -> bool {
        match self {
            Property::SubPoissonian | Property::Classical => {
                matches!(family, Family::Dsts1 | Family::Sts1)
            }
            Property::Separable => family == Family::Sts2,
            Property::Nongaussianity => family == Family::Pnes,
        }
    }
}

/// Axis spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// One scan axis: `steps` evaluation points with both endpoints included.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, steps: usize) -> Axis {
        Axis {
            name: name.to_string(),
            min,
            max,
            steps,
            scale: Scale::Linear,
        }
    }

    pub fn log(name: &str, min: f64, max: f64, steps: usize) -> Axis {
        Axis {
            name: name.to_string(),
            min,
            max,
            steps,
            scale: Scale::Log,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(CliError::Config(format!(
                "axis {} needs at least 2 steps",
                self.name
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(CliError::Config(format!(
                "axis {} needs finite min < max",
                self.name
            )));
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return Err(CliError::Config(format!(
                "log axis {} needs min > 0",
                self.name
            )));
        }
        Ok(())
    }

    /// Value at the normalized position `t ∈ [0, 1]`.
    fn at(&self, t: f64) -> f64 {
        match self.scale {
            Scale::Linear => self.min + (self.max - self.min) * t,
            Scale::Log => {
                let (lo, hi) = (self.min.log10(), self.max.log10());
                10f64.powf(lo + (hi - lo) * t)
            }
        }
    }

    /// Value at grid index `i ∈ [0, steps)`.
    pub fn value(&self, i: usize) -> f64 {
        self.at(i as f64 / (self.steps - 1) as f64)
    }

    fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.value(i)).collect()
    }
}

/// Target binding: every family parameter is pinned (`fixed`), tied to a
/// probe axis of the same name (`shared`), or swept over a free axis to form
/// a target family whose best fidelity counts (`free`). `require_flag`
/// restricts a target family to members with that property flag.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default)]
    pub shared: Vec<String>,
    #[serde(default)]
    pub free: Option<Axis>,
    #[serde(default)]
    pub require_flag: Option<bool>,
}

/// Full scan description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub family: Family,
    pub axes: Vec<Axis>,
    pub target: TargetSpec,
    pub threshold: f64,
    pub property: Property,
}

/// Property column content: a boolean flag or a real value (δ_R).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PropertyValue {
    Flag(bool),
    Value(f64),
}

/// One evaluated grid point.
#[derive(Debug, Clone, Serialize)]
pub struct ScanCell {
    pub coords: Vec<f64>,
    pub fidelity: f64,
    pub property: PropertyValue,
    pub in_region: bool,
    /// Per-threshold membership when the scan carries several levels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<bool>>,
}

/// Scan output: axis names in column order plus the evaluated cells in
/// row-major order (last axis fastest).
#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub axis_names: Vec<String>,
    pub thresholds: Vec<f64>,
    pub cells: Vec<ScanCell>,
}

// -------------------------------------------------------------------------
// Internal state plumbing.
// -------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum GState {
    One(GaussianState1),
    Two(GaussianState2),
}

fn build_state(family: Family, get: &dyn Fn(&str) -> f64) -> Result<(GState, StateSpec)> {
    match family {
        Family::Dsts1 => {
            let (n, beta, x) = (get("N"), get("beta"), get("x"));
            let p = EnergyParams1::new(n, beta, x)?;
            Ok((
                GState::One(dsts1_from_energy(&p)?),
                StateSpec::SingleEnergy { n, beta, x },
            ))
        }
        Family::Sts1 => {
            let (n, beta) = (get("N"), get("beta"));
            let p = EnergyParams1::new(n, beta, 0.0)?;
            Ok((
                GState::One(dsts1_from_energy(&p)?),
                StateSpec::SingleEnergy { n, beta, x: 0.0 },
            ))
        }
        Family::Sts2 => {
            let (n, beta, gamma) = (get("N"), get("beta"), get("gamma"));
            let p = EnergyParams2::new(n, beta, gamma)?;
            Ok((
                GState::Two(sts2_from_energy(&p)?),
                StateSpec::TwoEnergy { n, beta, gamma },
            ))
        }
        Family::Pnes => Err(CliError::Config(
            "photon-number scans use the dedicated pnes command".into(),
        )),
    }
}

fn eval_flag(property: Property, state: &GState) -> Result<bool> {
    match (property, state) {
        (Property::SubPoissonian, GState::One(s)) => Ok(s.is_sub_poissonian()?),
        (Property::Classical, GState::One(s)) => Ok(s.is_classical()),
        (Property::Separable, GState::Two(s)) => Ok(s.is_separable()?),
        _ => Err(CliError::Config(
            "property is not defined for this state family".into(),
        )),
    }
}

fn fidelity_g(a: &GState, b: &GState) -> Result<f64> {
    match (a, b) {
        (GState::One(x), GState::One(y)) => Ok(fidelity1(x, y)?),
        (GState::Two(x), GState::Two(y)) => Ok(fidelity2(x, y)?),
        _ => Err(CliError::Config("family mismatch inside scan".into())),
    }
}

/// One member of the target set, ready for repeated fidelity evaluation.
#[derive(Debug, Clone)]
struct Member {
    state: GState,
    flag: bool,
    spec: StateSpec,
}

/// Validated, precomputed scan context.
struct Context {
    spec: ScanSpec,
    axis_values: Vec<Vec<f64>>,
    /// Probe-axis indices whose value the target shares.
    shared_axes: Vec<usize>,
    /// Target members per flattened shared-index combination.
    targets: Vec<Vec<Member>>,
}

impl ScanSpec {
    /// Check the configuration for structural errors before any state is
    /// built: axis coverage, target binding, threshold range.
    pub fn validate(&self) -> Result<()> {
        if self.family == Family::Pnes || self.property == Property::Nongaussianity {
            return Err(CliError::Config(
                "photon-number scans use the dedicated pnes command".into(),
            ));
        }
        if self.axes.is_empty() {
            return Err(CliError::Config("scan needs at least one axis".into()));
        }
        for axis in &self.axes {
            axis.validate()?;
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(CliError::Config(
                "fidelity threshold must lie in (0, 1]".into(),
            ));
        }
        if !self.property.compatible(self.family) {
            return Err(CliError::Config(
                "property is incompatible with the scan family".into(),
            ));
        }
        let params = self.family.params();
        let axis_names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
        for (i, n) in axis_names.iter().enumerate() {
            if axis_names[i + 1..].contains(n) {
                return Err(CliError::Config(format!("duplicate axis {n}")));
            }
            if !params.contains(n) {
                return Err(CliError::Config(format!(
                    "axis {n} is not a parameter of the scan family"
                )));
            }
        }
        for p in params {
            if !axis_names.contains(p) {
                return Err(CliError::Config(format!(
                    "family parameter {p} has no axis"
                )));
            }
        }
        // Each family parameter must be bound exactly once on the target side.
        let mut bound: Vec<&str> = Vec::new();
        for name in self.target.fixed.keys() {
            bound.push(name.as_str());
        }
        for name in &self.target.shared {
            if !axis_names.contains(&name.as_str()) {
                return Err(CliError::Config(format!(
                    "shared target parameter {name} is not a scan axis"
                )));
            }
            bound.push(name.as_str());
        }
        if let Some(free) = &self.target.free {
            free.validate()?;
            bound.push(free.name.as_str());
        } else if self.target.require_flag.is_some() {
            return Err(CliError::Config(
                "require_flag only applies to a free target axis".into(),
            ));
        }
        for p in params {
            match bound.iter().filter(|b| *b == p).count() {
                1 => {}
                0 => {
                    return Err(CliError::Config(format!(
                        "target leaves parameter {p} unbound"
                    )))
                }
                _ => {
                    return Err(CliError::Config(format!(
                        "target binds parameter {p} more than once"
                    )))
                }
            }
        }
        for name in bound {
            if !params.contains(&name) {
                return Err(CliError::Config(format!(
                    "target parameter {name} is not a parameter of the scan family"
                )));
            }
        }
        Ok(())
    }
}

impl Context {
    fn new(spec: &ScanSpec) -> Result<Context> {
        spec.validate()?;
        let axis_values: Vec<Vec<f64>> = spec.axes.iter().map(|a| a.values()).collect();
        let shared_axes: Vec<usize> = spec
            .target
            .shared
            .iter()
            .map(|name| {
                spec.axes
                    .iter()
                    .position(|a| &a.name == name)
                    .expect("validated")
            })
            .collect();
        let shared_total: usize = shared_axes
            .iter()
            .map(|&k| spec.axes[k].steps)
            .product();
        if shared_total > 100_000 {
            return Err(CliError::Config(
                "shared target combinations exceed the supported size".into(),
            ));
        }
        let free_values: Vec<Option<f64>> = match &spec.target.free {
            Some(axis) => axis.values().into_iter().map(Some).collect(),
            None => vec![None],
        };
        let mut targets = Vec::with_capacity(shared_total);
        for flat in 0..shared_total {
            let shared_vals = decode_shared(flat, &shared_axes, &axis_values);
            let mut members = Vec::new();
            for free in &free_values {
                let get = |name: &str| -> f64 {
                    if let Some(v) = spec.target.fixed.get(name) {
                        return *v;
                    }
                    for (pos, &axis_idx) in shared_axes.iter().enumerate() {
                        if spec.axes[axis_idx].name == name {
                            return shared_vals[pos];
                        }
                    }
                    if let (Some(f), Some(v)) = (&spec.target.free, free) {
                        if f.name == name {
                            return *v;
                        }
                    }
                    f64::NAN
                };
                let (state, member_spec) = build_state(spec.family, &get)?;
                let flag = eval_flag(spec.property, &state)?;
                if let Some(required) = spec.target.require_flag {
                    if flag != required {
                        continue;
                    }
                }
                members.push(Member {
                    state,
                    flag,
                    spec: member_spec,
                });
            }
            if members.is_empty() {
                return Err(CliError::Config(
                    "target family is empty after require_flag filtering".into(),
                ));
            }
            targets.push(members);
        }
        Ok(Context {
            spec: spec.clone(),
            axis_values,
            shared_axes,
            targets,
        })
    }

    fn total_cells(&self) -> usize {
        self.axis_values.iter().map(|v| v.len()).product()
    }

    /// Row-major decomposition: last axis fastest.
    fn indices(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axis_values.len()];
        for k in (0..self.axis_values.len()).rev() {
            let steps = self.axis_values[k].len();
            idx[k] = flat % steps;
            flat /= steps;
        }
        idx
    }

    fn shared_flat(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for &k in &self.shared_axes {
            flat = flat * self.axis_values[k].len() + idx[k];
        }
        flat
    }

    fn probe(&self, idx: &[usize]) -> Result<(Vec<f64>, GState, StateSpec)> {
        let coords: Vec<f64> = idx
            .iter()
            .enumerate()
            .map(|(k, &i)| self.axis_values[k][i])
            .collect();
        let get = |name: &str| -> f64 {
            for (k, axis) in self.spec.axes.iter().enumerate() {
                if axis.name == name {
                    return coords[k];
                }
            }
            f64::NAN
        };
        let (state, spec) = build_state(self.spec.family, &get)?;
        Ok((coords, state, spec))
    }

    /// Best fidelity over the cell's target members and the attaining index.
    fn best_fidelity(&self, idx: &[usize], state: &GState) -> Result<(f64, usize)> {
        let members = &self.targets[self.shared_flat(idx)];
        let mut best = f64::NEG_INFINITY;
        let mut best_at = 0;
        for (m, member) in members.iter().enumerate() {
            let f = fidelity_g(state, &member.state)?;
            if f > best {
                best = f;
                best_at = m;
            }
        }
        Ok((best, best_at))
    }
}

fn decode_shared(mut flat: usize, shared_axes: &[usize], axis_values: &[Vec<f64>]) -> Vec<f64> {
    let mut vals = vec![0.0; shared_axes.len()];
    for (pos, &k) in shared_axes.iter().enumerate().rev() {
        let steps = axis_values[k].len();
        vals[pos] = axis_values[k][flat % steps];
        flat /= steps;
    }
    vals
}

/// Evaluate fidelity-to-target and the property over the whole grid.
/// Cells are independent and evaluated in parallel; the output order is
/// fixed by the row-major cell index, never by completion time.
pub fn scan(spec: &ScanSpec) -> Result<ScanResult> {
    let ctx = Context::new(spec)?;
    let cells: Vec<ScanCell> = (0..ctx.total_cells())
        .into_par_iter()
        .map(|flat| -> Result<ScanCell> {
            let idx = ctx.indices(flat);
            let (coords, state, _) = ctx.probe(&idx)?;
            let (fidelity, _) = ctx.best_fidelity(&idx, &state)?;
            let flag = eval_flag(spec.property, &state)?;
            Ok(ScanCell {
                coords,
                fidelity,
                property: PropertyValue::Flag(flag),
                in_region: fidelity >= spec.threshold,
                levels: None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScanResult {
        axis_names: spec.axes.iter().map(|a| a.name.clone()).collect(),
        thresholds: vec![spec.threshold],
        cells,
    })
}

/// A verified high-fidelity/opposite-property pair.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub probe: StateSpec,
    pub target: StateSpec,
    pub fidelity: f64,
    pub probe_flag: bool,
    pub target_flag: bool,
}

/// Search outcome; absence of a witness is a result, not an error.
#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(Box<Witness>),
    NotFound,
}

/// Find a probe cell with fidelity ≥ threshold whose property flag is
/// opposite to the best target member's, then refine it by per-axis
/// bisection toward higher fidelity while holding the flags opposite.
/// Axes shared with the target stay frozen during refinement so pair
/// constraints like "equal kernel energy" survive. The witness is
/// re-verified from its serialized parameters before being returned.
pub fn find_counterexample(spec: &ScanSpec) -> Result<SearchOutcome> {
    let ctx = Context::new(spec)?;
    // Grid stage: qualifying cell with maximal fidelity, lowest index on ties.
    let best = (0..ctx.total_cells())
        .into_par_iter()
        .map(|flat| -> Result<Option<(f64, usize, usize)>> {
            let idx = ctx.indices(flat);
            let (_, state, _) = ctx.probe(&idx)?;
            let (fidelity, best_at) = ctx.best_fidelity(&idx, &state)?;
            if fidelity < spec.threshold {
                return Ok(None);
            }
            let flag = eval_flag(spec.property, &state)?;
            let members = &ctx.targets[ctx.shared_flat(&idx)];
            // Prefer the best member overall when flags already differ,
            // otherwise the best member with the opposite flag.
            if members[best_at].flag != flag {
                return Ok(Some((fidelity, flat, best_at)));
            }
            let mut alt: Option<(f64, usize, usize)> = None;
            for (m, member) in members.iter().enumerate() {
                if member.flag == flag {
                    continue;
                }
                let f = fidelity_g(&state, &member.state)?;
                if f >= spec.threshold && alt.map(|(bf, _, _)| f > bf).unwrap_or(true) {
                    alt = Some((f, flat, m));
                }
            }
            Ok(alt)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        // Sequential reduction in cell-index order: strict improvement only,
        // so ties resolve to the lowest index deterministically.
        .fold(None::<(f64, usize, usize)>, |acc, cand| match acc {
            Some((bf, _, _)) if bf >= cand.0 => acc,
            _ => Some(cand),
        });

    let Some((_, flat, member_idx)) = best else {
        return Ok(SearchOutcome::NotFound);
    };
    let idx = ctx.indices(flat);
    let member = ctx.targets[ctx.shared_flat(&idx)][member_idx].clone();

    // Refinement stage (lattice witness kept as fallback).
    let lattice = witness_at(&ctx, &idx, &member)?;
    let refined = refine(&ctx, &idx, &member).and_then(|w| verify_witness(spec, &w).map(|_| w));
    match refined {
        Ok(w) => Ok(SearchOutcome::Found(Box::new(w))),
        Err(_) => {
            verify_witness(spec, &lattice)?;
            Ok(SearchOutcome::Found(Box::new(lattice)))
        }
    }
}

fn witness_at(ctx: &Context, idx: &[usize], member: &Member) -> Result<Witness> {
    let (_, state, probe_spec) = ctx.probe(idx)?;
    let fidelity = fidelity_g(&state, &member.state)?;
    Ok(Witness {
        probe: probe_spec,
        target: member.spec.clone(),
        fidelity,
        probe_flag: eval_flag(ctx.spec.property, &state)?,
        target_flag: member.flag,
    })
}

/// Coordinate bisection: move one unshared axis at a time in normalized
/// [0,1] space with a halving step, accepting moves that raise the pair
/// fidelity while keeping the probe flag opposite to the target's.
fn refine(ctx: &Context, idx: &[usize], member: &Member) -> Result<Witness> {
    let spec = &ctx.spec;
    let n_axes = spec.axes.len();
    let mut t: Vec<f64> = idx
        .iter()
        .enumerate()
        .map(|(k, &i)| i as f64 / (spec.axes[k].steps - 1) as f64)
        .collect();

    let eval = |t: &[f64]| -> Result<(f64, bool, StateSpec)> {
        let get = |name: &str| -> f64 {
            for (k, axis) in spec.axes.iter().enumerate() {
                if axis.name == name {
                    return axis.at(t[k]);
                }
            }
            f64::NAN
        };
        let (state, probe_spec) = build_state(spec.family, &get)?;
        Ok((
            fidelity_g(&state, &member.state)?,
            eval_flag(spec.property, &state)?,
            probe_spec,
        ))
    };

    let (mut f_cur, flag, mut probe_spec) = eval(&t)?;
    for _pass in 0..4 {
        for k in 0..n_axes {
            if ctx.shared_axes.contains(&k) {
                continue;
            }
            let mut step = 1.0 / (spec.axes[k].steps - 1) as f64;
            for _ in 0..24 {
                let mut moved = false;
                for dir in [-1.0, 1.0] {
                    let cand = (t[k] + dir * step).clamp(0.0, 1.0);
                    if cand == t[k] {
                        continue;
                    }
                    let mut tc = t.clone();
                    tc[k] = cand;
                    let (f, fl, ps) = eval(&tc)?;
                    if fl == flag && f > f_cur {
                        t = tc;
                        f_cur = f;
                        probe_spec = ps;
                        moved = true;
                        break;
                    }
                }
                if !moved {
                    step *= 0.5;
                    if step < 1e-9 {
                        break;
                    }
                }
            }
        }
    }
    Ok(Witness {
        probe: probe_spec,
        target: member.spec.clone(),
        fidelity: f_cur,
        probe_flag: flag,
        target_flag: member.flag,
    })
}

/// Rebuild both witness states from their serialized parameters and check
/// that fidelity, flags, and the threshold qualification all reproduce.
pub fn verify_witness(spec: &ScanSpec, w: &Witness) -> Result<()> {
    let probe = w.probe.build()?;
    let target = w.target.build()?;
    let f = crate::states::fidelity(&probe, &target)?;
    let probe_flag = parsed_flag(spec.property, &probe)?;
    let target_flag = parsed_flag(spec.property, &target)?;
    let ok = (f - w.fidelity).abs() <= 1e-12
        && probe_flag == w.probe_flag
        && target_flag == w.target_flag
        && probe_flag != target_flag
        && f >= spec.threshold;
    if ok {
        Ok(())
    } else {
        Err(cvfid_core::CoreError::NumericalConsistency(
            "counterexample witness failed re-verification",
        )
        .into())
    }
}

fn parsed_flag(property: Property, state: &crate::states::ParsedState) -> Result<bool> {
    let g = match state {
        crate::states::ParsedState::One(s) => GState::One(*s),
        crate::states::ParsedState::Two(s) => GState::Two(*s),
        crate::states::ParsedState::Pnes(_) => {
            return Err(CliError::Config(
                "photon-number states have no boolean property here".into(),
            ))
        }
    };
    eval_flag(property, &g)
}

// -------------------------------------------------------------------------
// Photon-number scans.
// -------------------------------------------------------------------------

/// Photon-number scan: a (N_T, N_S) fidelity grid between twin beams and
/// photon-subtracted states, several fidelity level sets, and optionally
/// the equal-energy curve (N, F_ST, δ_R) instead of the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PnesScanSpec {
    #[serde(default)]
    pub grid: Option<(Axis, Axis)>,
    #[serde(default)]
    pub curve: Option<Axis>,
    pub thresholds: Vec<f64>,
}

impl PnesScanSpec {
    /// Check that exactly one of grid/curve is present and that all
    /// thresholds sit strictly inside (0, 1).
    pub fn validate(&self) -> Result<()> {
        match (&self.grid, &self.curve) {
            (Some((nt, ns)), None) => {
                nt.validate()?;
                ns.validate()?;
            }
            (None, Some(axis)) => axis.validate()?,
            _ => {
                return Err(CliError::Config(
                    "photon-number scan needs exactly one of grid or curve".into(),
                ))
            }
        }
        if self.thresholds.is_empty() {
            return Err(CliError::Config("at least one threshold required".into()));
        }
        for t in &self.thresholds {
            if !(*t > 0.0 && *t < 1.0) {
                return Err(CliError::Config("thresholds must lie in (0, 1)".into()));
            }
        }
        Ok(())
    }

    fn strictest(&self) -> f64 {
        self.thresholds.iter().cloned().fold(0.0, f64::max)
    }
}

/// Run the photon-number scan. Grid cells carry F_ST between the twin beam
/// at energy N_T and the photon-subtracted state at energy N_S, the
/// subtracted state's renormalized non-Gaussianity as the property value,
/// and level flags per threshold; `in_region` uses the strictest one.
pub fn pnes_scan(spec: &PnesScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    let strictest = spec.strictest();
    if let Some((nt_axis, ns_axis)) = &spec.grid {
        let nt_vals = nt_axis.values();
        let ns_vals = ns_axis.values();
        let y_t: Vec<f64> = nt_vals
            .iter()
            .map(|&n| pnes::y_from_energy(n, cvfid_core::Variant::Twb))
            .collect::<cvfid_core::Result<_>>()?;
        let ns_data: Vec<(f64, f64)> = ns_vals
            .par_iter()
            .map(|&n| -> Result<(f64, f64)> {
                let y = pnes::y_from_energy(n, cvfid_core::Variant::Pssv)?;
                let state = PnesState::pssv_auto(y)?;
                Ok((y, pnes::renormalized_nongaussianity(&state)?))
            })
            .collect::<Result<_>>()?;
        let mut cells = Vec::with_capacity(nt_vals.len() * ns_vals.len());
        for (i, &nt) in nt_vals.iter().enumerate() {
            for (j, &ns) in ns_vals.iter().enumerate() {
                let f = pnes::fst_closed(y_t[i], ns_data[j].0)?;
                let levels: Vec<bool> = spec.thresholds.iter().map(|&t| f >= t).collect();
                cells.push(ScanCell {
                    coords: vec![nt, ns],
                    fidelity: f,
                    property: PropertyValue::Value(ns_data[j].1),
                    in_region: f >= strictest,
                    levels: Some(levels),
                });
            }
        }
        Ok(ScanResult {
            axis_names: vec![nt_axis.name.clone(), ns_axis.name.clone()],
            thresholds: spec.thresholds.clone(),
            cells,
        })
    } else {
        let axis = spec.curve.as_ref().expect("validated");
        let cells: Vec<ScanCell> = axis
            .values()
            .into_par_iter()
            .map(|n| -> Result<ScanCell> {
                let y_t = pnes::y_from_energy(n, cvfid_core::Variant::Twb)?;
                let y_s = pnes::y_from_energy(n, cvfid_core::Variant::Pssv)?;
                let state = PnesState::pssv_auto(y_s)?;
                let f = pnes::fst_closed(y_t, y_s)?;
                let delta_r = pnes::renormalized_nongaussianity(&state)?;
                let levels: Vec<bool> = spec.thresholds.iter().map(|&t| f >= t).collect();
                Ok(ScanCell {
                    coords: vec![n],
                    fidelity: f,
                    property: PropertyValue::Value(delta_r),
                    in_region: f >= strictest,
                    levels: Some(levels),
                })
            })
            .collect::<Result<_>>()?;
        Ok(ScanResult {
            axis_names: vec![axis.name.clone()],
            thresholds: spec.thresholds.clone(),
            cells,
        })
    }
}

// -------------------------------------------------------------------------
// Output files.
// -------------------------------------------------------------------------

/// CSV rendering: one column per axis, then `fidelity`, `property`,
/// `in_region`. All reals printed with 12 fixed decimals; byte-identical
/// for identical inputs.
pub fn to_csv(result: &ScanResult) -> String {
    let mut out = String::new();
    for name in &result.axis_names {
        out.push_str(name);
        out.push(',');
    }
    out.push_str("fidelity,property,in_region\n");
    for cell in &result.cells {
        for c in &cell.coords {
            out.push_str(&format!("{c:.12},"));
        }
        out.push_str(&format!("{:.12},", cell.fidelity));
        match cell.property {
            PropertyValue::Flag(b) => out.push_str(if b { "true" } else { "false" }),
            PropertyValue::Value(v) => out.push_str(&format!("{v:.12}")),
        }
        out.push(',');
        out.push_str(if cell.in_region { "true" } else { "false" });
        out.push('\n');
    }
    out
}

/// JSON rendering of the same cells (full float precision, level flags
/// included when present).
pub fn to_json(result: &ScanResult) -> Result<String> {
    let mut s = serde_json::to_string_pretty(result)
        .map_err(|e| CliError::Config(format!("failed to serialize scan result: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Write the result in the chosen format.
pub fn write_result(result: &ScanResult, path: &Path, format: OutputFormat) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => to_csv(result),
        OutputFormat::Json => to_json(result)?,
    };
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}
