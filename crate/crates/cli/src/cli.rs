//! Argument parsing and subcommand dispatch for the `cvfid` binary.
//!
//! Exit codes: 0 on success, 1 for generic configuration or I/O failures,
//! 2 for usage errors (unknown subcommand, malformed flags), 3 for an
//! invalid state file, 4 for a numerical-consistency failure reported by
//! any layer. All numeric output carries 12 digits after the point.

use crate::error::{CliError, Result};
use crate::fock;
use crate::presets::{preset, Preset, PRESET_NAMES};
use crate::scan::{self, Axis, OutputFormat, PnesScanSpec, ScanSpec, SearchOutcome, Witness};
use crate::states;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cvfid_core::distance::trace_distance_bounds;
use cvfid_core::single_mode::{self, fidelity1};
use cvfid_core::two_mode::{self, fidelity2};
use cvfid_core::{CoreError, EnergyParams1, EnergyParams2, PnesState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

/// Top-level command-line configuration.
#[derive(Parser, Debug)]
#[command(
    name = "cvfid",
    version,
    about = "Closed-form fidelities, nonclassicality, separability, and \
             non-Gaussianity for Gaussian and photon-number-entangled states"
)]
pub struct CliConfig {
    /// Worker threads for parallel scans (overrides CVFID_PARALLELISM).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fidelity between two states stored in JSON files.
    Fidelity(FidelityArgs),
    /// Grid scan of fidelity-to-target plus a physical property flag.
    Scan(ScanArgs),
    /// Search a scan grid for a probe/target pair with opposite flags.
    Counterexample(CounterArgs),
    /// Photon-number scans: twin-beam vs photon-subtracted fidelity.
    Pnes(PnesArgs),
    /// Cross-validate closed forms against the truncated number-basis oracle.
    OracleCheck(OracleArgs),
}

#[derive(Args, Debug)]
struct FidelityArgs {
    /// First state file.
    #[arg(long)]
    a: PathBuf,
    /// Second state file.
    #[arg(long)]
    b: PathBuf,
    /// Also print the Bures distance and the trace-distance bounds.
    #[arg(long)]
    distances: bool,
}

/// Where a scan configuration comes from: a named preset or a config file,
/// optionally with axes replaced from the command line.
#[derive(Args, Debug)]
struct SpecSource {
    /// Named configuration: fig1, fig2a, fig2b, fig3, fig4a, fig4b.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Configuration file (.toml, or JSON otherwise).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replace an axis: name=min:max:steps or name=min:max:steps:log.
    #[arg(long = "axis", value_name = "NAME=MIN:MAX:STEPS[:log]")]
    axes: Vec<String>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    source: SpecSource,
    /// Override the fidelity threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Output file for the cell table.
    #[arg(long)]
    out: PathBuf,
    /// Output format; default follows the file extension, falling back to csv.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct CounterArgs {
    #[command(flatten)]
    source: SpecSource,
    /// Override the fidelity threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Write the outcome JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PnesArgs {
    #[command(flatten)]
    source: SpecSource,
    /// Override the fidelity level set(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    thresholds: Vec<f64>,
    /// Output file for the cell table.
    #[arg(long)]
    out: PathBuf,
    /// Output format; default follows the file extension, falling back to csv.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleFamily {
    /// Displaced squeezed thermal states, mean photon number ≤ 3.
    Dsts1,
    /// Two-mode squeezed thermal states, total energy ≤ 1.5.
    Sts2,
    /// Photon-number entangled states, y ≤ 0.4.
    Pnes,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// State family to sample.
    #[arg(long, value_enum)]
    family: OracleFamily,
    /// Number of random state pairs.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// RNG seed; equal seeds reproduce the run bit-for-bit.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Largest allowed |closed form − oracle|.
    /// Defaults: dsts1 1e-6, sts2 1e-4, pnes 1e-8.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Fock cutoff override; default picks a certified cutoff per pair.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Write per-pair records as pretty JSON.
    #[arg(long)]
    dump: Option<PathBuf>,
}

/// Parse `argv` and execute; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match CliConfig::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    init_parallelism(cli.threads);
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            err.exit_code()
        }
    }
}

/// Thread-pool size: `--threads` wins, then `CVFID_PARALLELISM`, then the
/// rayon default. Pool construction failure (already initialized) is benign.
fn init_parallelism(threads: Option<usize>) {
    let n = threads.or_else(|| {
        std::env::var("CVFID_PARALLELISM")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        if n >= 1 {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Fidelity(args) => cmd_fidelity(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Counterexample(args) => cmd_counterexample(args),
        Command::Pnes(args) => cmd_pnes(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
    }
}

fn cmd_fidelity(args: FidelityArgs) -> Result<()> {
    let a = states::load_state(&args.a)?;
    let b = states::load_state(&args.b)?;
    let f = states::fidelity(&a, &b)?;
    if args.distances {
        let bures = cvfid_core::distance::bures_distance(f)?;
        let (lower, upper) = trace_distance_bounds(f)?;
        println!("fidelity {f:.12}");
        println!("bures {bures:.12}");
        println!("tdist_lower {lower:.12}");
        println!("tdist_upper {upper:.12}");
    } else {
        println!("{f:.12}");
    }
    Ok(())
}

fn cmd_scan(args: ScanArgs) -> Result<()> {
    let mut spec = resolve_spec(&args.source)?;
    if let Some(t) = args.threshold {
        match &mut spec {
            Preset::Scan(s) => s.threshold = t,
            Preset::Pnes(s) => s.thresholds = vec![t],
        }
    }
    let result = match &spec {
        Preset::Scan(s) => scan::scan(s)?,
        Preset::Pnes(s) => scan::pnes_scan(s)?,
    };
    let format = resolve_format(args.format, &args.out);
    scan::write_result(&result, &args.out, format)?;
    let hits = result.cells.iter().filter(|c| c.in_region).count();
    println!(
        "cells {} in_region {} -> {}",
        result.cells.len(),
        hits,
        args.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct OutcomeJson<'a> {
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a Witness>,
}

fn cmd_counterexample(args: CounterArgs) -> Result<()> {
    let spec = resolve_spec(&args.source)?;
    let Preset::Scan(mut spec) = spec else {
        return Err(CliError::Config(
            "counterexample search needs a Gaussian grid configuration".into(),
        ));
    };
    if let Some(t) = args.threshold {
        spec.threshold = t;
    }
    let outcome = scan::find_counterexample(&spec)?;
    let (found, witness) = match &outcome {
        SearchOutcome::Found(w) => (true, Some(w.as_ref())),
        SearchOutcome::NotFound => (false, None),
    };
    let mut text = serde_json::to_string_pretty(&OutcomeJson { found, witness })
        .map_err(|e| CliError::Config(format!("cannot serialize outcome: {e}")))?;
    text.push('\n');
    match &args.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            println!("outcome -> {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_pnes(args: PnesArgs) -> Result<()> {
    let spec = resolve_spec(&args.source)?;
    let Preset::Pnes(mut spec) = spec else {
        return Err(CliError::Config(
            "this configuration is a Gaussian grid scan; use the scan command".into(),
        ));
    };
    if !args.thresholds.is_empty() {
        spec.thresholds = args.thresholds.clone();
    }
    let result = scan::pnes_scan(&spec)?;
    let format = resolve_format(args.format, &args.out);
    scan::write_result(&result, &args.out, format)?;
    let hits = result.cells.iter().filter(|c| c.in_region).count();
    println!(
        "cells {} in_region {} -> {}",
        result.cells.len(),
        hits,
        args.out.display()
    );
    Ok(())
}

/// Resolve a preset name or config file into a runnable spec and apply
/// axis overrides.
fn resolve_spec(source: &SpecSource) -> Result<Preset> {
    let mut resolved = match (&source.preset, &source.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => load_config(path)?,
        (None, None) => {
            return Err(CliError::Config(format!(
                "either --preset or --config is required; presets: {}",
                PRESET_NAMES.join(", ")
            )))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    for text in &source.axes {
        let axis = parse_axis_override(text)?;
        apply_axis_override(&mut resolved, axis)?;
    }
    match &resolved {
        Preset::Scan(s) => s.validate()?,
        Preset::Pnes(s) => s.validate()?,
    }
    Ok(resolved)
}

/// Read a configuration file. `.toml` parses as TOML, anything else as
/// JSON; a Gaussian grid spec is tried first, then a photon-number spec.
fn load_config(path: &Path) -> Result<Preset> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let is_toml = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    let (scan_err, pnes_err) = if is_toml {
        match toml::from_str::<ScanSpec>(&text) {
            Ok(spec) => return Ok(Preset::Scan(spec)),
            Err(e) => {
                let scan_err = e.to_string();
                match toml::from_str::<PnesScanSpec>(&text) {
                    Ok(spec) => return Ok(Preset::Pnes(spec)),
                    Err(e) => (scan_err, e.to_string()),
                }
            }
        }
    } else {
        match serde_json::from_str::<ScanSpec>(&text) {
            Ok(spec) => return Ok(Preset::Scan(spec)),
            Err(e) => {
                let scan_err = e.to_string();
                match serde_json::from_str::<PnesScanSpec>(&text) {
                    Ok(spec) => return Ok(Preset::Pnes(spec)),
                    Err(e) => (scan_err, e.to_string()),
                }
            }
        }
    };
    Err(CliError::Config(format!(
        "{} parses neither as a grid scan ({scan_err}) nor as a photon-number scan ({pnes_err})",
        path.display()
    )))
}

/// Parse `name=min:max:steps` with an optional `:log` suffix.
fn parse_axis_override(text: &str) -> Result<Axis> {
    let bad = || {
        CliError::Config(format!(
            "axis override {text} must look like name=min:max:steps or name=min:max:steps:log"
        ))
    };
    let (name, rest) = text.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = rest.split(':').collect();
    let log = match parts.len() {
        3 => false,
        4 if parts[3] == "log" => true,
        _ => return Err(bad()),
    };
    let min: f64 = parts[0].parse().map_err(|_| bad())?;
    let max: f64 = parts[1].parse().map_err(|_| bad())?;
    let steps: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(if log {
        Axis::log(name, min, max, steps)
    } else {
        Axis::new(name, min, max, steps)
    })
}

fn apply_axis_override(preset: &mut Preset, axis: Axis) -> Result<()> {
    let slot = match preset {
        Preset::Scan(spec) => spec.axes.iter_mut().find(|a| a.name == axis.name),
        Preset::Pnes(spec) => {
            let mut found = None;
            if let Some((a, b)) = &mut spec.grid {
                if a.name == axis.name {
                    found = Some(a);
                } else if b.name == axis.name {
                    found = Some(b);
                }
            }
            if found.is_none() {
                if let Some(c) = &mut spec.curve {
                    if c.name == axis.name {
                        found = Some(c);
                    }
                }
            }
            found
        }
    };
    match slot {
        Some(slot) => {
            *slot = axis;
            Ok(())
        }
        None => Err(CliError::Config(format!(
            "no axis named {} in this configuration",
            axis.name
        ))),
    }
}

fn resolve_format(flag: Option<Format>, out: &Path) -> OutputFormat {
    match flag {
        Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Json) => OutputFormat::Json,
        None => match out.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        },
    }
}

/// One sampled pair in an oracle-check run.
#[derive(Serialize)]
struct PairRecord {
    params_a: Vec<f64>,
    params_b: Vec<f64>,
    n_max: usize,
    closed: f64,
    oracle: f64,
    diff: f64,
    tdist: f64,
    tdist_lower: f64,
    tdist_upper: f64,
}

/// Allowance on the trace-distance bounds, matching the closed-form
/// sandwich tolerance.
const SANDWICH_TOL: f64 = 1e-10;

impl PairRecord {
    fn violates_sandwich(&self) -> bool {
        self.tdist < self.tdist_lower - SANDWICH_TOL || self.tdist > self.tdist_upper + SANDWICH_TOL
    }
}

fn cmd_oracle_check(args: OracleArgs) -> Result<()> {
    if args.trials == 0 {
        return Err(CliError::Config("trials must be at least 1".into()));
    }
    let tolerance = args.tolerance.unwrap_or(match args.family {
        OracleFamily::Dsts1 => 1e-6,
        OracleFamily::Sts2 => 1e-4,
        OracleFamily::Pnes => 1e-8,
    });
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(CliError::Config("tolerance must be ≥ 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut records = Vec::with_capacity(args.trials);
    for _ in 0..args.trials {
        records.push(match args.family {
            OracleFamily::Dsts1 => dsts1_pair(&mut rng, args.cutoff)?,
            OracleFamily::Sts2 => sts2_pair(&mut rng, args.cutoff)?,
            OracleFamily::Pnes => pnes_pair(&mut rng, args.cutoff)?,
        });
    }

    let (worst_idx, worst) = records
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.diff.total_cmp(&b.1.diff))
        .expect("trials ≥ 1");
    let violations = records.iter().filter(|r| r.violates_sandwich()).count();
    let family = match args.family {
        OracleFamily::Dsts1 => "dsts1",
        OracleFamily::Sts2 => "sts2",
        OracleFamily::Pnes => "pnes",
    };
    println!(
        "oracle-check family={family} trials={} seed={} tolerance={:.12e}",
        args.trials, args.seed, tolerance
    );
    println!(
        "max |closed - oracle| = {:.12e} (pair {worst_idx}, n_max {})",
        worst.diff, worst.n_max
    );
    println!("trace-distance bound violations: {violations}");

    if let Some(path) = &args.dump {
        let mut text = serde_json::to_string_pretty(&records)
            .map_err(|e| CliError::Config(format!("cannot serialize records: {e}")))?;
        text.push('\n');
        fs::write(path, text).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        println!("records -> {}", path.display());
    }

    if worst.diff > tolerance || violations > 0 {
        println!("FAIL");
        return Err(CoreError::NumericalConsistency(
            "oracle cross-check exceeded the allowed deviation",
        )
        .into());
    }
    println!("PASS");
    Ok(())
}

/// Energy parameters with mean photon number `x² + N ≤ 3`.
fn sample_energy1(rng: &mut ChaCha8Rng) -> EnergyParams1 {
    let x = rng.gen::<f64>() * 3f64.sqrt();
    let n = rng.gen::<f64>() * (3.0 - x * x);
    let beta = rng.gen::<f64>();
    EnergyParams1 { n, beta, x }
}

fn dsts1_pair(rng: &mut ChaCha8Rng, cutoff: Option<usize>) -> Result<PairRecord> {
    let pa = sample_energy1(rng);
    let pb = sample_energy1(rng);
    let ga = single_mode::dsts1_from_energy(&pa)?;
    let gb = single_mode::dsts1_from_energy(&pb)?;
    let closed = fidelity1(&ga, &gb)?;
    // The energy form squeezes the displaced quadrature, so the oracle gets
    // the negated squeezing parameter.
    let (nta, _, ra) = single_mode::energy_to_physical(&pa)?;
    let (ntb, _, rb) = single_mode::energy_to_physical(&pb)?;
    let n_max = cutoff.unwrap_or_else(|| {
        fock::single_mode_cutoff(pa.x, -ra, nta).max(fock::single_mode_cutoff(pb.x, -rb, ntb))
    });
    let fa = fock::gaussian1_to_fock(pa.x, -ra, nta, n_max)?;
    let fb = fock::gaussian1_to_fock(pb.x, -rb, ntb, n_max)?;
    finish_pair(
        vec![pa.n, pa.beta, pa.x],
        vec![pb.n, pb.beta, pb.x],
        n_max,
        closed,
        &fa,
        &fb,
    )
}

/// Rejection-sample a two-mode state whose thermal envelope admits a
/// certified cutoff within the two-mode cap.
fn sample_energy2(rng: &mut ChaCha8Rng) -> Result<(EnergyParams2, usize)> {
    for _ in 0..1000 {
        let p = EnergyParams2 {
            n: rng.gen::<f64>() * 1.5,
            beta: rng.gen(),
            gamma: rng.gen(),
        };
        let g = two_mode::sts2_from_energy(&p)?;
        let (a, b, _) = g
            .block_scalars()
            .expect("squeezed thermal states have block structure");
        if let Some(n_max) = fock::two_mode_cutoff(a, b) {
            return Ok((p, n_max));
        }
    }
    Err(CliError::Config(
        "could not sample a two-mode state within the cutoff envelope".into(),
    ))
}

fn sts2_pair(rng: &mut ChaCha8Rng, cutoff: Option<usize>) -> Result<PairRecord> {
    let (pa, nma) = sample_energy2(rng)?;
    let (pb, nmb) = sample_energy2(rng)?;
    let n_max = cutoff.unwrap_or(nma.max(nmb));
    let ga = two_mode::sts2_from_energy(&pa)?;
    let gb = two_mode::sts2_from_energy(&pb)?;
    let closed = fidelity2(&ga, &gb)?;
    let fa = fock::sts2_to_fock(&pa, n_max)?;
    let fb = fock::sts2_to_fock(&pb, n_max)?;
    finish_pair(
        vec![pa.n, pa.beta, pa.gamma],
        vec![pb.n, pb.beta, pb.gamma],
        n_max,
        closed,
        &fa,
        &fb,
    )
}

/// Sample `(y, variant)` with `y ∈ [0, 0.4]`; the variant flag is recorded
/// as 0 (twin beam) or 1 (photon subtracted).
fn pnes_pair(rng: &mut ChaCha8Rng, cutoff: Option<usize>) -> Result<PairRecord> {
    let n_max = cutoff.unwrap_or(24);
    let ya = rng.gen::<f64>() * 0.4;
    let sub_a = rng.gen::<bool>();
    let yb = rng.gen::<f64>() * 0.4;
    let sub_b = rng.gen::<bool>();
    let build = |y: f64, subtracted: bool| -> Result<PnesState> {
        Ok(if subtracted {
            PnesState::pssv(y, n_max)?
        } else {
            PnesState::twb(y, n_max)?
        })
    };
    let sa = build(ya, sub_a)?;
    let sb = build(yb, sub_b)?;
    let closed = cvfid_core::pnes::fidelity_pnes(&sa, &sb)?;
    let fa = fock::pnes_to_fock(&sa, n_max)?;
    let fb = fock::pnes_to_fock(&sb, n_max)?;
    finish_pair(
        vec![ya, f64::from(u8::from(sub_a))],
        vec![yb, f64::from(u8::from(sub_b))],
        n_max,
        closed,
        &fa,
        &fb,
    )
}

fn finish_pair(
    params_a: Vec<f64>,
    params_b: Vec<f64>,
    n_max: usize,
    closed: f64,
    fa: &fock::FockDensity,
    fb: &fock::FockDensity,
) -> Result<PairRecord> {
    let oracle = fock::uhlmann(fa, fb)?;
    let tdist = fock::trace_distance(fa, fb)?;
    let (tdist_lower, tdist_upper) = trace_distance_bounds(closed)?;
    Ok(PairRecord {
        params_a,
        params_b,
        n_max,
        closed,
        oracle,
        diff: (closed - oracle).abs(),
        tdist,
        tdist_lower,
        tdist_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::StateSpec;
    use std::io::Write as _;

    fn write_temp(content: &str, ext: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new()
            .suffix(ext)
            .tempfile()
            .expect("temp file");
        f.write_all(content.as_bytes()).expect("write");
        f
    }

    #[test]
    fn unknown_subcommands_exit_with_the_usage_code() {
        assert_eq!(run(["cvfid", "frobnicate"]), 2);
        assert_eq!(run(["cvfid"]), 2);
        assert_eq!(run(["cvfid", "--help"]), 0);
    }

    #[test]
    fn fidelity_of_identical_files_succeeds() {
        let spec = serde_json::to_string(&StateSpec::SingleEnergy {
            n: 0.4,
            beta: 0.3,
            x: 0.5,
        })
        .unwrap();
        let f = write_temp(&spec, ".json");
        let path = f.path().to_str().unwrap();
        assert_eq!(run(["cvfid", "fidelity", "--a", path, "--b", path]), 0);
    }

    #[test]
    fn missing_and_malformed_state_files_map_to_their_exit_codes() {
        let garbage = write_temp("{\"flavor\": \"strawberry\"}", ".json");
        let good = write_temp(
            &serde_json::to_string(&StateSpec::SingleEnergy {
                n: 0.4,
                beta: 0.3,
                x: 0.5,
            })
            .unwrap(),
            ".json",
        );
        let g = garbage.path().to_str().unwrap();
        let ok = good.path().to_str().unwrap();
        assert_eq!(run(["cvfid", "fidelity", "--a", g, "--b", ok]), 3);
        assert_eq!(
            run(["cvfid", "fidelity", "--a", "/nonexistent/state.json", "--b", ok]),
            1
        );
    }

    #[test]
    fn axis_override_parsing() {
        let ax = parse_axis_override("N=0.1:2:11").unwrap();
        assert_eq!(ax.name, "N");
        assert_eq!(ax.steps, 11);
        assert_eq!(ax.value(0), 0.1);
        let lg = parse_axis_override("N_S=0.01:100:5:log").unwrap();
        assert!((lg.value(2) - 1.0).abs() < 1e-12);
        assert!(parse_axis_override("N:0.1:2:11").is_err());
        assert!(parse_axis_override("N=0.1:2").is_err());
        assert!(parse_axis_override("N=0.1:2:11:cubic").is_err());
    }

    #[test]
    fn format_resolution_follows_flag_then_extension() {
        let p = |s: &str| PathBuf::from(s);
        assert_eq!(
            resolve_format(None, &p("out.json")),
            OutputFormat::Json
        );
        assert_eq!(resolve_format(None, &p("out.csv")), OutputFormat::Csv);
        assert_eq!(resolve_format(None, &p("out.dat")), OutputFormat::Csv);
        assert_eq!(
            resolve_format(Some(Format::Json), &p("out.csv")),
            OutputFormat::Json
        );
    }

    #[test]
    fn config_files_load_in_both_formats() {
        let json = r#"{
            "family": "dsts1",
            "axes": [
                {"name": "N", "min": 0.1, "max": 0.5, "steps": 3},
                {"name": "beta", "min": 0.0, "max": 1.0, "steps": 3},
                {"name": "x", "min": 0.0, "max": 1.0, "steps": 3}
            ],
            "target": {"fixed": {"beta": 0.5, "x": 0.5}, "shared": ["N"]},
            "threshold": 0.9,
            "property": "sub_poissonian"
        }"#;
        let f = write_temp(json, ".json");
        let Preset::Scan(spec) = load_config(f.path()).unwrap() else {
            panic!("expected a grid scan");
        };
        assert_eq!(spec.axes.len(), 3);

        let toml_text = r#"
            thresholds = [0.9]
            [curve]
            name = "N"
            min = 0.01
            max = 100.0
            steps = 5
            scale = "log"
        "#;
        let f = write_temp(toml_text, ".toml");
        let Preset::Pnes(spec) = load_config(f.path()).unwrap() else {
            panic!("expected a photon-number scan");
        };
        assert_eq!(spec.thresholds, vec![0.9]);

        let f = write_temp("not a config at all", ".json");
        assert!(load_config(f.path()).is_err());
    }

    #[test]
    fn oracle_check_runs_and_zero_tolerance_fails_numerically() {
        let dump = tempfile::NamedTempFile::new().unwrap();
        let dump_path = dump.path().to_str().unwrap().to_string();
        assert_eq!(
            run([
                "cvfid",
                "oracle-check",
                "--family",
                "pnes",
                "--trials",
                "3",
                "--seed",
                "7",
                "--dump",
                &dump_path,
            ]),
            0
        );
        let text = fs::read_to_string(&dump_path).unwrap();
        let records: Vec<serde_json::Value> = serde_json::from_str(&text).unwrap();
        assert_eq!(records.len(), 3);

        assert_eq!(
            run([
                "cvfid",
                "oracle-check",
                "--family",
                "pnes",
                "--trials",
                "2",
                "--seed",
                "7",
                "--tolerance",
                "0",
            ]),
            4
        );
    }
}
