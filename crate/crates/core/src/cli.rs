//! Command-line front end: argument parsing into a [`RunConfig`] and the
//! pipelines behind each subcommand.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::circuits::{
    oracle_trace, preset_circuit, sample_circuit, sweep_plane, trace_circuit_with, Circuit, Preset,
};
use crate::error::{Error, Result};
use crate::geometry::{monopole_transport_trace, MonopoleScene};
use crate::io;
use crate::phase::{winding_of_change, wrap_phase, PancharatnamReading, PhaseTrace, TraceMeta};
use crate::spinsys::{FieldParams, PropagationSettings, SamplingRule};

pub const THREADS_ENV: &str = "GEOMPHASE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "geomphase",
    version,
    about = "Geometric-phase windings of spin states around field degeneracies"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Propagate both arms along a circuit and unwrap the relative phase.
    Simulate(TraceArgs),
    /// Solid-angle prediction along a circuit, without propagation.
    Oracle(TraceArgs),
    /// Overlap modulus and phase over a rectangular (b1, bz) grid.
    Sweep(SweepArgs),
    /// Two-path phase of a current loop carried around a monopole.
    Monopole(MonopoleArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; nothing is written without it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to json for a .json output path, csv otherwise.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Worker threads for sample evaluation (falls back to GEOMPHASE_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct TraceArgs {
    /// abcda, efghe, spqrs, or a circuit JSON file.
    #[arg(long)]
    circuit: String,
    /// Required for circuit files; overrides the preset value otherwise.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 1)]
    two_j: u32,
    #[arg(long, default_value_t = 20_000)]
    n_steps: usize,
    #[arg(long)]
    points_per_segment: Option<usize>,
    /// Bisect segments whose phase step exceeds pi/2.
    #[arg(long)]
    refine: bool,
    /// Starting eigenstate of H(0), counted from the lowest.
    #[arg(long, default_value_t = 0)]
    branch: usize,
    #[arg(long, value_enum, default_value_t = Sampling::Left)]
    sampling: Sampling,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    omega_sign: i8,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// lo:hi
    #[arg(long, default_value = "0.5:1.5", allow_hyphen_values = true)]
    b1_range: String,
    /// lo:hi
    #[arg(long, default_value = "-0.1:0.1", allow_hyphen_values = true)]
    bz_range: String,
    /// NXxNY
    #[arg(long, default_value = "21x21")]
    grid: String,
    #[arg(long, default_value_t = 200.0)]
    beta: f64,
    #[arg(long, default_value_t = 1)]
    two_j: u32,
    #[arg(long, default_value_t = 20_000)]
    n_steps: usize,
    #[arg(long, default_value_t = 0)]
    branch: usize,
    #[arg(long, value_enum, default_value_t = Sampling::Left)]
    sampling: Sampling,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct MonopoleArgs {
    #[arg(long)]
    circuit: String,
    #[arg(long)]
    points_per_segment: Option<usize>,
    /// Half-integer monopole strength g.
    #[arg(long, allow_hyphen_values = true)]
    strength: f64,
    #[arg(long, default_value_t = 0.0)]
    string_thickness: f64,
    /// x,y,z unit vector.
    #[arg(long, default_value = "0,0,-1", allow_hyphen_values = true)]
    string_direction: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Sampling {
    Left,
    Mid,
}

impl From<Sampling> for SamplingRule {
    fn from(s: Sampling) -> Self {
        match s {
            Sampling::Left => SamplingRule::LeftEndpoint,
            Sampling::Mid => SamplingRule::Midpoint,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Oracle,
    Sweep,
    Monopole,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub b1_range: (f64, f64),
    pub bz_range: (f64, f64),
    pub grid: (usize, usize),
}

/// Fully resolved and validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// Absent for sweeps.
    pub circuit: Option<Circuit>,
    /// Everything but (b1, bz) of the Hamiltonian.
    pub params: FieldParams,
    pub settings: PropagationSettings,
    pub refine: bool,
    pub sweep: Option<SweepSpec>,
    pub monopole: Option<MonopoleScene>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub threads: Option<usize>,
}

/// Outcome of argument parsing that does not produce a config.
#[derive(Debug)]
pub enum ParseFailure {
    /// --help or --version; the text goes to stdout with exit 0.
    Info(String),
    Invalid(String),
}

fn resolve_circuit(
    spec: &str,
    points_per_segment: Option<usize>,
) -> Result<(Circuit, Option<f64>)> {
    let (mut circuit, beta) = match spec.parse::<Preset>() {
        Ok(p) => {
            let (c, beta) = preset_circuit(p);
            (c, Some(beta))
        }
        Err(_) => (io::load_circuit(Path::new(spec))?, None),
    };
    if let Some(n) = points_per_segment {
        circuit.points_per_segment = n;
    }
    circuit.validate()?;
    Ok((circuit, beta))
}

fn parse_range(text: &str) -> Result<(f64, f64)> {
    let bad = || Error::InvalidParameter(format!("range must be lo:hi, got '{text}'"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidParameter(format!("grid must be NXxNY, got '{text}'"));
    let (nx, ny) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        nx.trim().parse().map_err(|_| bad())?,
        ny.trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_direction(text: &str) -> Result<[f64; 3]> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidParameter(format!("direction must be x,y,z, got '{text}'")))?;
    <[f64; 3]>::try_from(parts)
        .map_err(|_| Error::InvalidParameter(format!("direction must be x,y,z, got '{text}'")))
}

fn resolve_output(args: OutputArgs) -> Result<(Option<PathBuf>, OutputFormat, Option<usize>)> {
    let format = args.format.unwrap_or_else(|| match &args.out {
        Some(p)
            if p.extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("json")) =>
        {
            OutputFormat::Json
        }
        _ => OutputFormat::Csv,
    });
    let threads = match args.threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!(
                    "{THREADS_ENV} must be a positive integer, got '{v}'"
                ))
            })?),
            Err(_) => None,
        },
    };
    if threads == Some(0) {
        return Err(Error::InvalidParameter("thread count must be >= 1".into()));
    }
    Ok((args.out, format, threads))
}

fn trace_config(command: Command, a: TraceArgs) -> Result<RunConfig> {
    let (circuit, preset_beta) = resolve_circuit(&a.circuit, a.points_per_segment)?;
    let beta = match (a.beta, preset_beta) {
        (Some(b), _) | (None, Some(b)) => b,
        // the oracle does not depend on beta
        (None, None) if command == Command::Oracle => 1.0,
        (None, None) => {
            return Err(Error::InvalidParameter(
                "--beta is required for circuit files".into(),
            ))
        }
    };
    let params = FieldParams::new(0.0, 0.0, beta)
        .with_spin(a.two_j)
        .with_omega_sign(a.omega_sign);
    params.validate()?;
    if a.branch > a.two_j as usize {
        return Err(Error::InvalidParameter(format!(
            "branch {} out of range for two_j = {}",
            a.branch, a.two_j
        )));
    }
    let settings = PropagationSettings {
        sampling_rule: a.sampling.into(),
        eigen_branch: a.branch,
        ..PropagationSettings::default().with_steps(a.n_steps)
    };
    settings.validate()?;
    let (out, format, threads) = resolve_output(a.output)?;
    Ok(RunConfig {
        command,
        circuit: Some(circuit),
        params,
        settings,
        refine: a.refine,
        sweep: None,
        monopole: None,
        out,
        format,
        threads,
    })
}

fn sweep_config(a: SweepArgs) -> Result<RunConfig> {
    let sweep = SweepSpec {
        b1_range: parse_range(&a.b1_range)?,
        bz_range: parse_range(&a.bz_range)?,
        grid: parse_grid(&a.grid)?,
    };
    if sweep.grid.0 < 2 || sweep.grid.1 < 2 {
        return Err(Error::InvalidParameter(
            "sweep grid must be at least 2x2".into(),
        ));
    }
    let params = FieldParams::new(0.0, 0.0, a.beta).with_spin(a.two_j);
    params.validate()?;
    if a.branch > a.two_j as usize {
        return Err(Error::InvalidParameter(format!(
            "branch {} out of range",
            a.branch
        )));
    }
    let settings = PropagationSettings {
        sampling_rule: a.sampling.into(),
        eigen_branch: a.branch,
        ..PropagationSettings::default().with_steps(a.n_steps)
    };
    settings.validate()?;
    let (out, format, threads) = resolve_output(a.output)?;
    Ok(RunConfig {
        command: Command::Sweep,
        circuit: None,
        params,
        settings,
        refine: false,
        sweep: Some(sweep),
        monopole: None,
        out,
        format,
        threads,
    })
}

fn monopole_config(a: MonopoleArgs) -> Result<RunConfig> {
    let (circuit, _) = resolve_circuit(&a.circuit, a.points_per_segment)?;
    let scene = MonopoleScene::new(a.strength)
        .with_thickness(a.string_thickness)
        .with_direction(parse_direction(&a.string_direction)?);
    scene.validate()?;
    let (out, format, threads) = resolve_output(a.output)?;
    Ok(RunConfig {
        command: Command::Monopole,
        circuit: Some(circuit),
        params: FieldParams::new(0.0, 0.0, 0.0),
        settings: PropagationSettings::default(),
        refine: false,
        sweep: None,
        monopole: Some(scene),
        out,
        format,
        threads,
    })
}

/// Parse and validate a full argument vector (program name first).
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return Err(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    ParseFailure::Info(e.to_string())
                }
                _ => ParseFailure::Invalid(
                    e.to_string()
                        .lines()
                        .next()
                        .unwrap_or("invalid arguments")
                        .to_string(),
                ),
            });
        }
    };
    let config = match cli.command {
        Cmd::Simulate(a) => trace_config(Command::Simulate, a),
        Cmd::Oracle(a) => trace_config(Command::Oracle, a),
        Cmd::Sweep(a) => sweep_config(a),
        Cmd::Monopole(a) => monopole_config(a),
    };
    config.map_err(|e| ParseFailure::Invalid(format!("error: {e}")))
}

/// Summary of a finished run, printed as one line.
#[derive(Clone, Debug, PartialEq)]
pub enum Summary {
    Winding {
        winding: i64,
        residual: f64,
        max_oracle_dev: f64,
    },
    Sweep {
        min_c: f64,
        b1: f64,
        bz: f64,
    },
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Summary::Winding {
                winding,
                residual,
                max_oracle_dev,
            } => write!(
                f,
                "winding={winding} residual={residual:e} max_oracle_dev={max_oracle_dev:e}"
            ),
            Summary::Sweep { min_c, b1, bz } => write!(f, "min_c={min_c:e} b1={b1} bz={bz}"),
        }
    }
}

fn emit(
    config: &RunConfig,
    csv: impl FnOnce() -> String,
    json: impl FnOnce() -> Result<String>,
) -> Result<()> {
    if let Some(path) = &config.out {
        let text = match config.format {
            OutputFormat::Csv => csv(),
            OutputFormat::Json => json()?,
        };
        io::write_output(path, &text)?;
    }
    Ok(())
}

fn emit_trace(config: &RunConfig, trace: &PhaseTrace) -> Result<()> {
    emit(
        config,
        || io::trace_to_csv(trace),
        || io::trace_to_json(trace),
    )
}

fn winding_summary(trace: &PhaseTrace) -> Result<Summary> {
    let (winding, residual) = winding_of_change(trace.total_change())?;
    Ok(Summary::Winding {
        winding,
        residual,
        max_oracle_dev: trace.max_oracle_deviation().unwrap_or(f64::NAN),
    })
}

/// Execute a config; the output file is written before the winding check so
/// a non-quantized trace can still be inspected.
pub fn execute(config: &RunConfig) -> Result<Summary> {
    match config.command {
        Command::Simulate => {
            let circuit = config.circuit.as_ref().expect("simulate has a circuit");
            let trace =
                trace_circuit_with(circuit, &config.params, &config.settings, config.refine)?;
            emit_trace(config, &trace)?;
            winding_summary(&trace)
        }
        Command::Oracle => {
            let circuit = config.circuit.as_ref().expect("oracle has a circuit");
            let trace = oracle_trace(circuit, &config.params, config.settings.eigen_branch)?;
            emit_trace(config, &trace)?;
            winding_summary(&trace)
        }
        Command::Sweep => {
            let spec = config.sweep.as_ref().expect("sweep has a spec");
            let grid = sweep_plane(
                spec.b1_range,
                spec.bz_range,
                spec.grid,
                config.params.beta,
                config.params.two_j,
                &config.settings,
            )?;
            emit(
                config,
                || io::sweep_to_csv(&grid),
                || io::sweep_to_json(&grid),
            )?;
            let (min_c, b1, bz) = grid
                .min_modulus()
                .map(|(_, c)| (c.modulus_c.unwrap_or(f64::NAN), c.b1, c.bz))
                .unwrap_or((f64::NAN, f64::NAN, f64::NAN));
            Ok(Summary::Sweep { min_c, b1, bz })
        }
        Command::Monopole => {
            let circuit = config.circuit.as_ref().expect("monopole has a circuit");
            let scene = config.monopole.as_ref().expect("monopole has a scene");
            let points = sample_circuit(circuit);
            let phases = monopole_transport_trace(&points, scene)?;
            let mut trace = PhaseTrace::new(TraceMeta {
                circuit: circuit.name.clone(),
                ..TraceMeta::default()
            });
            for (p, phase) in points.iter().zip(&phases) {
                trace.unwrap_append(
                    *p,
                    &PancharatnamReading {
                        modulus_c: 2.0,
                        alpha_wrapped: wrap_phase(*phase),
                    },
                );
            }
            // the transport phase is continuous already; keep it verbatim
            for (s, phase) in trace.samples.iter_mut().zip(&phases) {
                s.alpha_unwrapped = *phase;
            }
            emit_trace(config, &trace)?;
            winding_summary(&trace)
        }
    }
}

fn report(e: &Error) -> i32 {
    match e.sample_index() {
        Some(i) => eprintln!("error: kind={} index={i}: {e}", e.kind()),
        None => eprintln!("error: kind={}: {e}", e.kind()),
    }
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INVALID
    }
}

/// Run a config and print the summary; returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    let outcome = match config.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(config)),
            Err(e) => {
                eprintln!("error: kind=InvalidParameter: cannot start thread pool: {e}");
                return EXIT_INVALID;
            }
        },
        None => execute(config),
    };
    match outcome {
        Ok(summary) => {
            println!("{summary}");
            EXIT_OK
        }
        Err(e) => report(&e),
    }
}

/// Parse `argv` and run it.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(config) => run(&config),
        Err(ParseFailure::Info(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(ParseFailure::Invalid(msg)) => {
            eprintln!("{msg}");
            EXIT_INVALID
        }
    }
}
