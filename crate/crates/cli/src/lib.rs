//! Command-line front end: one subcommand per model, flat parameters that can
//! come from a JSON file or flags, optional one-dimensional sweeps, and
//! deterministic CSV/JSON output.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use zenolab::table::Cell;
use zenolab::Table;

pub mod commands;
pub mod params;

use commands::Runner;
use params::{Params, Sweep};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Model(#[from] zenolab::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use zenolab::Error as E;
        match self {
            CliError::Model(E::DecompositionFailure | E::UnstableStep(_) | E::NonHermitianDrift(_)) => 3,
            _ => 2,
        }
    }
}

/// Which subcommand exercises each library operation.
pub const COVERAGE: &[(&str, &str)] = &[
    ("herm_propagator", "zeno"),
    ("expectation", "chain"),
    ("partial_trace", "chain"),
    ("survival_probability", "zeno"),
    ("energy_variance", "zeno"),
    ("short_time_prediction", "zeno"),
    ("repeated_measurement_survival", "zeno"),
    ("exponential_survival", "zeno"),
    ("apply_dephasing", "chain"),
    ("two_step_chain", "chain"),
    ("entangle_measurement", "chain"),
    ("diagonal_freeze_rate", "rates"),
    ("n_step_measured_chain", "chain"),
    ("two_state_transition", "pointer2"),
    ("two_state_rate_regime", "pointer2"),
    ("transition_probability_alpha_e", "regimes"),
    ("transition_probability_alpha", "regimes"),
    ("golden_rule_rate", "regimes"),
    ("regime_scan", "regimes"),
    ("localization_rate", "table1"),
    ("decoherence_timescales", "table1"),
    ("decoherence_relaxation_ratio", "ratio"),
    ("evolve_master", "spatial"),
    ("moments", "spatial"),
    ("run_ifm", "ifm"),
    ("ifm_sweep", "ifm"),
    ("solve_rate_equation", "rates"),
    ("pauli_equation_step", "rates"),
    ("freeze_contrast", "rates"),
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// JSON object of parameters; flags override its values
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file, written atomically (stdout when absent)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Sweep one parameter: name=start:stop:count[:log]
    #[arg(long, value_name = "SPEC")]
    pub sweep: Option<String>,
    /// Evaluate everything on one thread
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Parser)]
#[command(
    name = "zenolab",
    version,
    about = "Numerical lab for measurement, decoherence and the quantum Zeno effect",
    after_help = "Environment: ZENOLAB_THREADS sets the worker count (0 = all cores).\n\
                  Exit codes: 0 ok, 1 usage, 2 invalid input, 3 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

macro_rules! subcommands {
    ($( $(#[doc = $doc:literal])* $variant:ident => $module:ident ),* $(,)?) => {
        #[derive(Debug, Subcommand)]
        enum Command {
            $(
                $(#[doc = $doc])*
                $variant {
                    #[command(flatten)]
                    common: Common,
                    #[command(flatten)]
                    flags: commands::$module::Flags,
                },
            )*
        }

        impl Command {
            fn dispatch(self) -> Result<(Common, String), CliError> {
                match self {
                    $(
                        Command::$variant { common, flags } => {
                            let text = execute::<commands::$module::Params, _>(
                                &common,
                                &flags,
                                commands::$module::PATH_KEYS,
                                commands::$module::run,
                            )?;
                            Ok((common, text))
                        }
                    )*
                }
            }
        }
    };
}

subcommands! {
    /// Survival probability, its short-time law and repeated checks
    Zeno => zeno,
    /// Two-level measurement chains and pointer entanglement
    Chain => chain,
    /// Two-state system continuously watched by a momentum pointer
    Pointer2 => pointer2,
    /// Decay into a level continuum: Zeno, golden-rule and anti-Zeno regimes
    Regimes => regimes,
    /// Position-space density matrix under localization and friction
    Spatial => spatial,
    /// Localization rates for scattering environments and object sizes
    Table1 => table1,
    /// Decoherence versus relaxation rate for a macroscopic body
    Ratio => ratio,
    /// Interaction-free detection with a polarization loop
    Ifm => ifm,
    /// Classical rate equations and the frozen diagonal
    Rates => rates,
}

/// Settings that apply to the whole evaluation of one subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub parallel: bool,
}

fn execute<P, F>(
    common: &Common,
    flags: &F,
    path_keys: &[&str],
    run: Runner<P>,
) -> Result<String, CliError>
where
    P: Serialize + DeserializeOwned + Default + Sync,
    F: Serialize,
{
    let mut base = params::defaults::<P>();
    if let Some(path) = &common.config {
        let mut config = params::read_config(path)?;
        params::anchor_paths(&mut config, path_keys, path);
        params::overlay(&mut base, config)?;
    }
    let set = match serde_json::to_value(flags).expect("flags serialize") {
        serde_json::Value::Object(map) => map,
        _ => Params::new(),
    };
    params::overlay(&mut base, set)?;
    let ctx = Context {
        parallel: !common.sequential,
    };

    let table = match &common.sweep {
        None => run(&params::resolve(&base)?, &ctx)?,
        Some(spec) => sweep(&Sweep::parse(spec)?, &base, run, &ctx)?,
    };
    Ok(match common.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&table.to_json()).expect("json");
            s.push('\n');
            s
        }
    })
}

fn sweep<P>(sweep: &Sweep, base: &Params, run: Runner<P>, ctx: &Context) -> Result<Table, CliError>
where
    P: DeserializeOwned + Sync,
{
    let points = sweep.expand(base)?;
    let resolved = points
        .iter()
        .map(|(_, p)| params::resolve::<P>(p))
        .collect::<Result<Vec<_>, _>>()?;
    // Points run concurrently; each point then runs its own inner work serially.
    let inner = Context { parallel: false };
    let tables: Vec<Table> = if ctx.parallel {
        resolved.par_iter().map(|p| run(p, &inner)).collect::<Result<_, _>>()?
    } else {
        resolved.iter().map(|p| run(p, &inner)).collect::<Result<_, _>>()?
    };
    let mut out: Option<Table> = None;
    for ((value, _), mut table) in points.into_iter().zip(tables) {
        let present = table.columns.iter().any(|c| c.eq_ignore_ascii_case(&sweep.key));
        if !present {
            let cell = match value.as_u64() {
                Some(v) => Cell::from(v),
                None => Cell::from(value.as_f64().expect("numeric sweep value")),
            };
            table.prepend_column(&sweep.key, cell);
        }
        match &mut out {
            None => out = Some(table),
            Some(acc) => acc.extend(table),
        }
    }
    Ok(out.expect("a sweep has at least two points"))
}

/// Writes to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn thread_count(raw: &str) -> Result<usize, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value for `ZENOLAB_THREADS`: `{raw}`")))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ZENOLAB_THREADS") else {
        return Ok(());
    };
    let n = thread_count(&raw)?;
    if n > 0 {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs the command line with the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Runs the command line and returns the process exit code. Results go to
/// `out` unless `--out` names a file; diagnostics go to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if args.len() <= 1 {
        let mut cmd = <Cli as clap::CommandFactory>::command();
        let _ = writeln!(err, "{}", cmd.render_usage());
        let _ = writeln!(err, "Run `zenolab --help` for the list of subcommands.");
        return 1;
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                kind => {
                    let _ = write!(err, "{text}");
                    if kind == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 1 } else { 2 }
                }
            };
        }
    };
    let outcome = configure_threads().and_then(|()| cli.command.dispatch()).and_then(|(common, text)| {
        match &common.out {
            Some(path) => write_atomic(path, &text),
            None => out
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io(format!("stdout: {e}"))),
        }
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
