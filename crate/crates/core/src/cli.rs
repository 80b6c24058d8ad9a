//! Command-line front end.
//!
//! ```text
//! qmpc compile       --topology T --calibration C [--crosstalk X] a.qasm b.qasm ...
//! qmpc partition     --topology T --calibration C [--crosstalk X] a.qasm b.qasm ...
//! qmpc verify        --merged merged_0.qasm --manifest manifest_0.json a.qasm b.qasm ...
//! qmpc xtalk-filter  --crosstalk X --calibration C [--topology T]
//! qmpc pst           --counts counts.json (--expected 01 ... | --circuit a.qasm)
//! ```
//!
//! Exit status is 0 on success, 1 for bad input or a failed check and 2 for
//! an internal failure.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::circuit::{load_qasm, parse_program, QuantumCircuit};
use crate::error::{Error, Result};
use crate::hardware::{
    extract_strong_crosstalk, load_hardware, CalibrationFile, CrosstalkTable, HardwareModel,
    TopologyFile,
};
use crate::partition::{Partition, PartitionMethod};
use crate::pipeline::{compile, plan, RunConfig};
use crate::scheduler::Manifest;
use crate::verify::{check_equivalence, compute_pst, expected_outcomes, Counts};

/// Overrides `--seed` when set.
pub const SEED_ENV: &str = "QMPC_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "qmpc",
    version,
    about = "Compile several quantum circuits into one job on a shared device"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan, partition and route circuits; write merged programs, manifests and stats.
    Compile(CompileArgs),
    /// Print the partitions the planner would use, without routing.
    Partition(PlanArgs),
    /// Check that a merged program reproduces its source circuits.
    Verify(VerifyArgs),
    /// Keep only the strong pairs of a crosstalk table.
    XtalkFilter(XtalkArgs),
    /// Probability of a successful trial from hardware counts.
    Pst(PstArgs),
}

#[derive(Debug, Args)]
pub struct DeviceArgs {
    /// Coupling graph JSON.
    #[arg(long)]
    pub topology: PathBuf,
    /// Calibration snapshot JSON.
    #[arg(long)]
    pub calibration: PathBuf,
    /// Measured conditional CNOT errors JSON.
    #[arg(long)]
    pub crosstalk: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    /// OpenQASM 2.0 sources; each circuit is named after its file stem.
    #[arg(required = true)]
    pub circuits: Vec<PathBuf>,
    /// Partitioning strategy: qhsp (greedy) or gsp (exhaustive, up to 8 qubits).
    #[arg(long, default_value = "qhsp")]
    pub method: PartitionMethod,
    /// Weight of CNOT fidelity in the QHSP fidelity degree.
    #[arg(long, default_value_t = 2.0)]
    pub lambda: f64,
    /// Largest mean partition-score loss accepted for running together.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    /// Worker threads for candidate scoring (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    /// Weight of the lookahead term in the routing cost.
    #[arg(long = "weight-w", default_value_t = 0.5)]
    pub weight_w: f64,
    /// Weight of hop distance in the routing distance.
    #[arg(long, default_value_t = 0.5)]
    pub alpha1: f64,
    /// Weight of swap error in the routing distance.
    #[arg(long, default_value_t = 0.5)]
    pub alpha2: f64,
    /// Upcoming two-qubit gates considered by the routing cost.
    #[arg(long = "ext-layer", default_value_t = 20)]
    pub ext_layer: usize,
    /// Initial placements tried per circuit.
    #[arg(long, default_value_t = 10)]
    pub attempts: usize,
    /// Random seed; QMPC_SEED takes precedence. Defaults to the clock
    /// outside CI.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Route with SWAPs only.
    #[arg(long = "swap-only")]
    pub swap_only: bool,
    /// Leave a candidate's own gates out of its routing cost.
    #[arg(long = "no-self-cost")]
    pub no_self_cost: bool,
    /// Directory for merged_<i>.qasm, manifest_<i>.json, stats_<i>.json and plans.json.
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Merged program written by `compile`.
    #[arg(long)]
    pub merged: PathBuf,
    /// Manifest written next to it.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Source circuits that went into the merged program.
    #[arg(required = true)]
    pub sources: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct XtalkArgs {
    #[arg(long)]
    pub crosstalk: PathBuf,
    #[arg(long)]
    pub calibration: PathBuf,
    /// Coupling graph; by default the calibrated CNOT edges.
    #[arg(long)]
    pub topology: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["expected", "circuit"])))]
pub struct PstArgs {
    /// Results JSON: {"counts": {"bitstring": n, ...}, "shots": n}.
    #[arg(long)]
    pub counts: PathBuf,
    /// Outcomes that count as success.
    #[arg(long, num_args = 1..)]
    pub expected: Vec<String>,
    /// Take the most likely noiseless outcomes of this circuit as success.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
}

/// Parse arguments, run, and return the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli, &mut std::io::stdout().lock()) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Run a parsed command, writing its report to `out`. `Ok(false)` means the
/// command ran but its check failed.
pub fn run(cli: Cli, out: &mut impl Write) -> Result<bool> {
    match cli.command {
        Command::Compile(args) => cmd_compile(&args, out).map(|_| true),
        Command::Partition(args) => cmd_partition(&args, out).map(|_| true),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::XtalkFilter(args) => cmd_xtalk_filter(&args, out).map(|_| true),
        Command::Pst(args) => cmd_pst(&args, out).map(|_| true),
    }
}

/// Seed from `QMPC_SEED`, then `--seed`. Without either, CI runs fail and
/// other runs use the clock.
pub fn resolve_seed(flag: Option<u64>, env: impl Fn(&str) -> Option<String>) -> Result<u64> {
    if let Some(text) = env(SEED_ENV) {
        return text.trim().parse().map_err(|_| {
            Error::Config(format!(
                "{SEED_ENV} must be an unsigned integer, got `{text}`"
            ))
        });
    }
    if let Some(seed) = flag {
        return Ok(seed);
    }
    if env("CI").is_some_and(|v| !v.is_empty() && v != "0" && v != "false") {
        return Err(Error::Config(format!(
            "a seed is required in CI: pass --seed or set {SEED_ENV}"
        )));
    }
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default();
    Ok(now.as_nanos() as u64)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::from(e).in_file(path))
}

fn emit(output: Option<&Path>, text: &str, out: &mut impl Write) -> Result<()> {
    match output {
        Some(path) => write_file(path, &format!("{text}\n")),
        None => Ok(writeln!(out, "{text}")?),
    }
}

fn load_inputs(args: &PlanArgs) -> Result<(HardwareModel, CrosstalkTable, Vec<QuantumCircuit>)> {
    let model = load_hardware(&args.device.topology, &args.device.calibration)?;
    let crosstalk = match &args.device.crosstalk {
        Some(path) => CrosstalkTable::load(path)?,
        None => CrosstalkTable::new(),
    };
    let circuits = args.circuits.iter().map(load_qasm).collect::<Result<_>>()?;
    Ok((model, crosstalk, circuits))
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        None => f(),
        Some(0) => Err(Error::Config("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {n} worker threads: {e}")))?
            .install(f),
    }
}

pub fn cmd_compile(args: &CompileArgs, out: &mut impl Write) -> Result<()> {
    let (model, crosstalk, circuits) = load_inputs(&args.plan)?;
    let config = RunConfig {
        method: args.plan.method,
        lambda: args.plan.lambda,
        delta: args.plan.delta,
        weight_w: args.weight_w,
        alpha1: args.alpha1,
        alpha2: args.alpha2,
        ext_layer: args.ext_layer,
        attempts: args.attempts,
        seed: resolve_seed(args.seed, |k| std::env::var(k).ok())?,
        swap_only: args.swap_only,
        no_self_cost: args.no_self_cost,
    };
    let compiled = with_pool(args.plan.jobs, || {
        compile(&model, &circuits, &crosstalk, &config)
    })?;

    fs::create_dir_all(&args.out_dir).map_err(|e| Error::from(e).in_file(&args.out_dir))?;
    let mut summary = String::new();
    for (i, job) in compiled.iter().enumerate() {
        write_file(&args.out_dir.join(format!("merged_{i}.qasm")), &job.qasm)?;
        write_file(
            &args.out_dir.join(format!("manifest_{i}.json")),
            &job.manifest.to_json(),
        )?;
        write_file(
            &args.out_dir.join(format!("stats_{i}.json")),
            &job.stats.to_json(),
        )?;
        summary += &format!(
            "job {i}: {} [{}] +{} CNOTs, depth {}, ESP {:.4}\n",
            job.plan.verdict,
            job.plan.selected.join(", "),
            job.stats.additional_cnots,
            job.stats.depth,
            job.stats.esp
        );
    }
    let plans: Vec<_> = compiled.iter().map(|j| &j.plan).collect();
    let plans_json = serde_json::to_string_pretty(&plans)?;
    write_file(&args.out_dir.join("plans.json"), &plans_json)?;
    summary += &format!("seed {}\n", config.seed);
    emit(args.plan.output.as_deref(), summary.trim_end(), out)
}

pub fn cmd_partition(args: &PlanArgs, out: &mut impl Write) -> Result<()> {
    let (model, crosstalk, circuits) = load_inputs(args)?;
    let config = RunConfig {
        method: args.method,
        lambda: args.lambda,
        delta: args.delta,
        ..RunConfig::default()
    };
    let plans = with_pool(args.jobs, || plan(&model, &circuits, &crosstalk, &config))?;
    let partitions: Vec<&Partition> = plans.iter().flat_map(|p| &p.partitions).collect();
    emit(
        args.output.as_deref(),
        &serde_json::to_string_pretty(&partitions)?,
        out,
    )
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> Result<bool> {
    let text =
        fs::read_to_string(&args.merged).map_err(|e| Error::from(e).in_file(&args.merged))?;
    let merged = parse_program(&text)
        .map_err(|e| e.in_file(&args.merged))?
        .circuit;
    let manifest = Manifest::load(&args.manifest)?;
    let sources: Vec<QuantumCircuit> = args.sources.iter().map(load_qasm).collect::<Result<_>>()?;
    let refs: Vec<&QuantumCircuit> = sources.iter().collect();
    let report = check_equivalence(&refs, &merged, &manifest)?;
    writeln!(out, "{report}")?;
    for (id, tv) in &report.per_circuit {
        writeln!(out, "  {id}: TV={tv}")?;
    }
    Ok(report.passed)
}

pub fn cmd_xtalk_filter(args: &XtalkArgs, out: &mut impl Write) -> Result<()> {
    let model = match &args.topology {
        Some(topology) => load_hardware(topology, &args.calibration)?,
        None => {
            let text = fs::read_to_string(&args.calibration)
                .map_err(|e| Error::from(e).in_file(&args.calibration))?;
            let calibration: CalibrationFile = serde_json::from_str(&text)
                .map_err(|e| Error::from(e).in_file(&args.calibration))?;
            let topology = TopologyFile {
                num_qubits: calibration.readout_errors.len(),
                edges: calibration
                    .cnot_errors
                    .iter()
                    .map(|&(a, b, _)| [a, b])
                    .collect(),
            };
            HardwareModel::from_files(topology, calibration)
                .map_err(|e| e.in_file(&args.calibration))?
        }
    };
    let table = CrosstalkTable::load(&args.crosstalk)?;
    let strong =
        extract_strong_crosstalk(&table, &model).map_err(|e| e.in_file(&args.crosstalk))?;
    emit(args.output.as_deref(), &strong.to_json(), out)
}

pub fn cmd_pst(args: &PstArgs, out: &mut impl Write) -> Result<()> {
    let counts = Counts::load(&args.counts)?;
    let expected: BTreeSet<String> = match &args.circuit {
        Some(path) => expected_outcomes(&load_qasm(path)?)?,
        None => args.expected.iter().cloned().collect(),
    };
    let pst = compute_pst(&counts, &expected).map_err(|e| e.in_file(&args.counts))?;
    writeln!(out, "{pst}")?;
    Ok(())
}
