//! The `ftsp` command line.
//!
//! Exit codes: 0 success, 1 violations found, 2 usage or parse errors,
//! 3 synthesis exhaustion.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::circuit::PrepCircuit;
use crate::code::{parse_check_file, registry_lookup, registry_summaries, CssCode};
use crate::ftcheck::{quadruple_witnesses, verify_quadruple};
use crate::protocol::{build_protocol, ProtocolSchedule};
use crate::sim::{
    estimate_both, estimate_x_logical, exhaustive::DEFAULT_BUDGET, exhaustive_inject, loglog_slope, replay_witness,
    to_csv, FrameSim, InjectConfig, NoiseModel, SimResult,
};
use crate::synth::{identical_quadruple, synth_quadruple, SynthConfig};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "ftsp", version, about = "Fault-tolerant state preparation for CSS codes")]
pub struct Cli {
    /// Seed for synthesis and sampling (overrides the config file's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sampling.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Synthesis config (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the built-in codes.
    Codes,
    /// Synthesize a verified circuit quadruple.
    Synth {
        #[command(flatten)]
        code: CodeArg,
        /// Write the non-fault-tolerant identical quadruple instead.
        #[arg(long)]
        baseline: bool,
    },
    /// Check the three distinctness conditions of a quadruple.
    Verify {
        #[command(flatten)]
        code: CodeArg,
        #[command(flatten)]
        quad: QuadArg,
    },
    /// Estimate acceptance and logical error rates.
    Simulate {
        #[command(flatten)]
        code: CodeArg,
        #[command(flatten)]
        quad: QuadArg,
        /// Physical error rates, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, value_enum, default_value_t = EstimatorArg::Both)]
        estimator: EstimatorArg,
        /// Simulate even if the quadruple fails verification.
        #[arg(long)]
        force: bool,
        /// Fit the log-log slope of the logical error rate over the p values.
        #[arg(long, alias = "sweep")]
        fit: bool,
    },
    /// Inject every combination of up to `t` faults.
    Inject {
        #[command(flatten)]
        code: CodeArg,
        #[command(flatten)]
        quad: QuadArg,
        #[arg(long, default_value_t = 2)]
        max_faults: usize,
        /// Largest number of combinations to enumerate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        /// Restrict faults to initialization and preparation layers.
        #[arg(long)]
        prep_only: bool,
        /// Also replay every distinctness witness of the quadruple.
        #[arg(long)]
        witnesses: bool,
    },
}

#[derive(Args, Debug)]
pub struct CodeArg {
    /// Registry name or path to a check-matrix file.
    #[arg(long)]
    pub code: String,
}

#[derive(Args, Debug)]
pub struct QuadArg {
    /// Four circuit files C1..C4; synthesized on the fly when omitted.
    #[arg(long, num_args = 4, value_names = ["C1", "C2", "C3", "C4"])]
    pub circuits: Option<Vec<PathBuf>>,
    /// Directory holding c1.txt..c4.txt (as written by `synth`).
    #[arg(long, conflicts_with = "circuits")]
    pub dir: Option<PathBuf>,
    /// Synthesize the identical baseline quadruple when no files are given.
    #[arg(long)]
    pub baseline: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    X,
    Z,
    Both,
}

/// Provenance of every artifact a command writes.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub code: String,
    pub config: SynthConfig,
    pub seed: u64,
    pub threads: usize,
    pub tool_version: &'static str,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

/// Per-circuit metrics written by `synth`.
#[derive(Debug, Serialize)]
pub struct Metrics {
    pub code: String,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub cx: [usize; 4],
    pub depth: [usize; 4],
    pub total_cx: usize,
    pub protocol_cx: usize,
    pub protocol_depth: usize,
    pub protocol_depth_with_init_and_measurement: usize,
    pub restarts: [usize; 4],
    pub backtracks: [usize; 4],
}

struct Ctx {
    args: Vec<String>,
    seed: u64,
    threads: usize,
    config: SynthConfig,
    out: Option<PathBuf>,
    start: Instant,
}

impl Ctx {
    fn manifest(&self, command: &str, code: &CssCode, outputs: &[PathBuf]) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            args: self.args.clone(),
            code: code.name().to_string(),
            config: self.config.clone(),
            seed: self.seed,
            threads: self.threads,
            tool_version: env!("CARGO_PKG_VERSION"),
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            wall_clock_seconds: self.start.elapsed().as_secs_f64(),
        }
    }

    // Writes the artifacts and a manifest next to them.
    fn write_all(&self, dir: &Path, command: &str, code: &CssCode, files: &[(&str, String)]) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut outputs = Vec::new();
        for (name, text) in files {
            let path = dir.join(name);
            fs::write(&path, text)?;
            outputs.push(path);
        }
        let manifest = self.manifest(command, code, &outputs);
        fs::write(
            dir.join(format!("{command}.manifest.json")),
            serde_json::to_string_pretty(&manifest)? + "\n",
        )?;
        Ok(())
    }
}

/// Resolves a code reference: an existing file is parsed, anything else is
/// looked up in the registry.
pub fn resolve_code(reference: &str) -> Result<CssCode> {
    let path = Path::new(reference);
    if path.is_file() {
        let text = fs::read_to_string(path)?;
        let (h_x, h_z) = parse_check_file(&text)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(reference);
        return CssCode::validate_named(name, &h_x, &h_z);
    }
    registry_lookup(reference)
}

fn read_circuit(path: &Path) -> Result<PrepCircuit> {
    let text = fs::read_to_string(path)?;
    PrepCircuit::parse(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn load_quadruple(ctx: &Ctx, code: &CssCode, quad: &QuadArg) -> Result<[PrepCircuit; 4]> {
    let paths: Option<Vec<PathBuf>> = match (&quad.circuits, &quad.dir) {
        (Some(c), _) => Some(c.clone()),
        (None, Some(d)) => Some((1..=4).map(|i| d.join(format!("c{i}.txt"))).collect()),
        (None, None) => None,
    };
    let circuits = match paths {
        Some(paths) => {
            let mut errors = Vec::new();
            let mut out = Vec::new();
            for p in &paths {
                match read_circuit(p) {
                    Ok(c) => out.push(c),
                    Err(e) => errors.push(e.to_string()),
                }
            }
            if !errors.is_empty() {
                return Err(Error::Invalid(errors.join("\n")));
            }
            out.try_into().expect("four circuits")
        }
        None if quad.baseline => identical_quadruple(code, &ctx.config)?,
        None => synth_quadruple(code, &ctx.config)?.circuits,
    };
    for c in &circuits {
        if c.n() != code.n() {
            return Err(Error::Invalid(format!(
                "circuit has {} qubits but {} has {}",
                c.n(),
                code.name(),
                code.n()
            )));
        }
    }
    Ok(circuits)
}

fn refs(c: &[PrepCircuit; 4]) -> [&PrepCircuit; 4] {
    [&c[0], &c[1], &c[2], &c[3]]
}

fn cmd_codes() -> Result<i32> {
    for (name, summary) in registry_summaries() {
        println!("{name:<14} {summary}");
    }
    Ok(EXIT_OK)
}

fn cmd_synth(ctx: &Ctx, code: &CssCode, baseline: bool) -> Result<i32> {
    let (circuits, stats) = if baseline {
        (identical_quadruple(code, &ctx.config)?, Default::default())
    } else {
        let q = synth_quadruple(code, &ctx.config)?;
        (q.circuits, q.stats)
    };
    let schedule = build_protocol(refs(&circuits), code)?;
    let depth = schedule.depth();
    let metrics = Metrics {
        code: code.name().to_string(),
        n: code.n(),
        k: code.k(),
        d: code.d()?,
        cx: circuits.each_ref().map(|c| c.cx_count()),
        depth: circuits.each_ref().map(|c| c.depth()),
        total_cx: circuits.iter().map(|c| c.cx_count()).sum(),
        protocol_cx: schedule.total_cx(),
        protocol_depth: depth.cnot_layers,
        protocol_depth_with_init_and_measurement: depth.with_init_and_measurement,
        restarts: stats.each_ref().map(|s: &crate::synth::SynthStats| s.restarts),
        backtracks: stats.each_ref().map(|s: &crate::synth::SynthStats| s.backtracks),
    };
    println!(
        "{}: #CX {} / {} / {} / {} (total {}), depth {} / {} / {} / {}, protocol depth {} ({} with init and measurement)",
        code.name(),
        metrics.cx[0],
        metrics.cx[1],
        metrics.cx[2],
        metrics.cx[3],
        metrics.total_cx,
        metrics.depth[0],
        metrics.depth[1],
        metrics.depth[2],
        metrics.depth[3],
        metrics.protocol_depth,
        metrics.protocol_depth_with_init_and_measurement
    );
    let dir = ctx.out.clone().unwrap_or_else(|| PathBuf::from("ftsp-out"));
    let mut files: Vec<(&str, String)> = vec![
        ("c1.txt", circuits[0].serialize()),
        ("c2.txt", circuits[1].serialize()),
        ("c3.txt", circuits[2].serialize()),
        ("c4.txt", circuits[3].serialize()),
    ];
    files.push(("protocol.txt", schedule.serialize()));
    files.push(("metrics.json", serde_json::to_string_pretty(&metrics)? + "\n"));
    ctx.write_all(&dir, "synth", code, &files)?;
    Ok(EXIT_OK)
}

fn cmd_verify(ctx: &Ctx, code: &CssCode, quad: &QuadArg) -> Result<i32> {
    let circuits = load_quadruple(ctx, code, quad)?;
    let report = verify_quadruple(refs(&circuits), code)?;
    let json = report.to_json() + "\n";
    print!("{json}");
    if let Some(dir) = &ctx.out {
        ctx.write_all(dir, "verify", code, &[("verify.json", json)])?;
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Serialize)]
struct Fit {
    estimator: String,
    points: Vec<(f64, f64)>,
    slope: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    ctx: &Ctx,
    code: &CssCode,
    quad: &QuadArg,
    ps: &[f64],
    shots: u64,
    estimator: EstimatorArg,
    force: bool,
    fit: bool,
) -> Result<i32> {
    if let Some(&bad) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Invalid(format!("error rate {bad} outside [0, 1]")));
    }
    let circuits = load_quadruple(ctx, code, quad)?;
    if !force {
        let report = verify_quadruple(refs(&circuits), code)?;
        if !report.passed {
            eprintln!("quadruple fails verification; rerun with --force to simulate anyway");
            eprint!("{}", report.to_json());
            return Ok(EXIT_VIOLATION);
        }
    }
    let schedule = build_protocol(refs(&circuits), code)?;
    let mut results: Vec<SimResult> = Vec::new();
    for &p in ps {
        let noise = NoiseModel::new(p);
        match estimator {
            EstimatorArg::X => results.push(estimate_x_logical(&schedule, noise, shots, ctx.seed, ctx.threads)?),
            EstimatorArg::Z => results.push(estimate_both(&schedule, noise, shots, ctx.seed, ctx.threads)?.1),
            EstimatorArg::Both => {
                let (x, z) = estimate_both(&schedule, noise, shots, ctx.seed, ctx.threads)?;
                results.push(x);
                results.push(z);
            }
        }
    }
    let csv = to_csv(code.name(), &results)?;
    let mut files = vec![("results.csv", csv.clone())];
    if fit {
        let mut fits = Vec::new();
        for est in [crate::sim::Estimator::X, crate::sim::Estimator::Z] {
            let points: Vec<(f64, f64)> = results
                .iter()
                .filter(|r| r.estimator == est)
                .map(|r| (r.p, r.logical_error_rate))
                .collect();
            if points.is_empty() {
                continue;
            }
            let slope = loglog_slope(&points);
            match slope {
                Some(s) => eprintln!("{est} slope: {s:.3}"),
                None => eprintln!("{est} slope: undetermined (fewer than two nonzero points)"),
            }
            fits.push(Fit {
                estimator: est.to_string(),
                points,
                slope,
            });
        }
        files.push(("fit.json", serde_json::to_string_pretty(&fits)? + "\n"));
    }
    match &ctx.out {
        Some(dir) => ctx.write_all(dir, "simulate", code, &files)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct WitnessReplay {
    condition: usize,
    faults: Vec<crate::sim::exhaustive::FaultEvent>,
    accepted: bool,
    residual_x: Vec<usize>,
    residual_z: Vec<usize>,
    too_heavy: bool,
}

#[derive(Serialize)]
struct InjectOutput {
    exhaustive: crate::sim::InjectReport,
    witnesses: Vec<WitnessReplay>,
}

/// Replays every distinctness witness of a schedule as concrete gate faults.
fn replay_all(schedule: &ProtocolSchedule, circuits: &[PrepCircuit; 4]) -> Result<Vec<WitnessReplay>> {
    let code = schedule.code();
    let sim = FrameSim::new(schedule, false);
    let mut out = Vec::new();
    for (condition, w) in quadruple_witnesses(refs(circuits), code)? {
        let faults = replay_witness(schedule, &sim, condition, &w)?;
        let shot = sim.inject(&faults);
        let (hx, hz) = crate::sim::exhaustive::residual_too_heavy(code, &shot.effect, faults.len())?;
        let bits = |w: u64| (0..64).filter(|q| w >> q & 1 == 1).collect();
        out.push(WitnessReplay {
            condition,
            faults: faults
                .iter()
                .map(|&(l, p)| crate::sim::exhaustive::describe(&sim, l, p))
                .collect(),
            accepted: shot.accepted,
            residual_x: bits(shot.effect.residual_x),
            residual_z: bits(shot.effect.residual_z),
            too_heavy: hx || hz,
        });
    }
    Ok(out)
}

fn cmd_inject(
    ctx: &Ctx,
    code: &CssCode,
    quad: &QuadArg,
    max_faults: usize,
    budget: u128,
    prep_only: bool,
    witnesses: bool,
) -> Result<i32> {
    let circuits = load_quadruple(ctx, code, quad)?;
    let schedule = build_protocol(refs(&circuits), code)?;
    let mut cfg = InjectConfig::new(max_faults);
    cfg.budget = budget;
    cfg.prep_only = prep_only;
    let exhaustive = exhaustive_inject(&schedule, &cfg)?;
    let replays = if witnesses {
        replay_all(&schedule, &circuits)?
    } else {
        Vec::new()
    };
    eprintln!(
        "{} combinations, {} accepted, {} counterexamples",
        exhaustive.combinations, exhaustive.accepted, exhaustive.counterexample_count
    );
    let violated = !exhaustive.passed() || replays.iter().any(|r| r.accepted && r.too_heavy);
    let json = serde_json::to_string_pretty(&InjectOutput {
        exhaustive,
        witnesses: replays,
    })? + "\n";
    match &ctx.out {
        Some(dir) => ctx.write_all(dir, "inject", code, &[("inject.json", json)])?,
        None => print!("{json}"),
    }
    Ok(if violated { EXIT_VIOLATION } else { EXIT_OK })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SynthesisExhausted { .. } => EXIT_EXHAUSTED,
        _ => EXIT_USAGE,
    }
}

fn dispatch(cli: Cli, args: Vec<String>) -> Result<i32> {
    let mut config = match &cli.config {
        Some(path) => SynthConfig::from_json(&fs::read_to_string(path)?)?,
        None => SynthConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    let ctx = Ctx {
        args,
        seed: config.seed,
        threads: cli.threads.max(1),
        config,
        out: cli.out.clone(),
        start: Instant::now(),
    };
    match &cli.command {
        Command::Codes => cmd_codes(),
        Command::Synth { code, baseline } => cmd_synth(&ctx, &resolve_code(&code.code)?, *baseline),
        Command::Verify { code, quad } => cmd_verify(&ctx, &resolve_code(&code.code)?, quad),
        Command::Simulate {
            code,
            quad,
            p,
            shots,
            estimator,
            force,
            fit,
        } => cmd_simulate(
            &ctx,
            &resolve_code(&code.code)?,
            quad,
            p,
            *shots,
            *estimator,
            *force,
            *fit,
        ),
        Command::Inject {
            code,
            quad,
            max_faults,
            budget,
            prep_only,
            witnesses,
        } => cmd_inject(
            &ctx,
            &resolve_code(&code.code)?,
            quad,
            *max_faults,
            *budget,
            *prep_only,
            *witnesses,
        ),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let shown = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match dispatch(cli, shown) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["ftsp", "synth", "--code", "nonexistent"]), EXIT_USAGE);
        assert_eq!(run(["ftsp", "bogus"]), EXIT_USAGE);
        assert_eq!(run(["ftsp", "codes"]), EXIT_OK);
        let e = Error::SynthesisExhausted {
            stage: "C2".into(),
            restarts: 1,
            backtracks: 1,
            best_gates: 0,
        };
        assert_eq!(exit_code(&e), EXIT_EXHAUSTED);
    }

    #[test]
    fn code_file_reference() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mine.txt");
        fs::write(&path, registry_lookup("steane").unwrap().serialize()).unwrap();
        let code = resolve_code(path.to_str().unwrap()).unwrap();
        assert_eq!((code.name(), code.n(), code.k()), ("mine", 7, 1));
    }
}
