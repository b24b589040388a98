//! `tipping-lab` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input or validation error,
//! 3 prediction and simulation disagree (`verify` only).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use tipping_core::experiments::{
    politeness_pad, random_scenario, run_sweep, verify_prediction, ScenarioConstraints,
};
use tipping_core::io;
use tipping_core::{generate, n_star_approx, n_star_exact, vectors_from_gram, NetMode, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tipping-lab",
    version,
    about = "Predict and simulate the tipping point of a single self-attention head"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form n* (exact and approximate), regime and predicted tip as JSON
    Predict(Options),
    /// Run the attention head and emit the full trace as JSON
    Simulate(Options),
    /// Compare prediction with simulation; exits 3 on disagreement
    Verify(Options),
    /// Run a sweep spec (--spec) and emit CSV or JSON rows
    Sweep(Options),
    /// Insert --count orthogonal neutral tokens before the final prompt token
    Pad(Options),
    /// Emit a random tipping scenario for --seed
    Random(Options),
    /// Realize vectors from a Gram matrix JSON given with --spec
    Gram(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NetModeArg {
    Sum,
    Mean,
}

#[derive(Debug, Args)]
struct Options {
    /// Scenario JSON file
    #[arg(long, value_name = "PATH")]
    scenario: Option<PathBuf>,
    /// Sweep spec JSON (sweep) or Gram matrix JSON (gram)
    #[arg(long, value_name = "PATH")]
    spec: Option<PathBuf>,
    /// Write output here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format; csv is only available for sweep [default: csv for sweep, json otherwise]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Override max_iterations [random default: 200]
    #[arg(long, value_name = "N")]
    iterations: Option<usize>,
    /// Number of pads for `pad`
    #[arg(long, value_name = "K", default_value_t = 1)]
    count: usize,
    /// Length of each pad vector
    #[arg(long, value_name = "X", default_value_t = 1.0)]
    norm: f64,
    /// Seed for `random`
    #[arg(long, value_name = "S", default_value_t = 1)]
    seed: u64,
    /// Net-vector construction for the approximate n*
    #[arg(long, value_enum, default_value_t = NetModeArg::Sum)]
    net_mode: NetModeArg,
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    path.as_deref()
        .ok_or_else(|| Failure::usage(format!("missing required option --{flag}")))
}

fn load_scenario(opts: &Options) -> Result<Scenario, Failure> {
    let path = required(&opts.scenario, "scenario")?;
    let scenario = io::parse_scenario(&read(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok(match opts.iterations {
        Some(n) => scenario.with_max_iterations(n),
        None => scenario,
    })
}

fn json_only(opts: &Options) -> Result<(), Failure> {
    if opts.format == Some(Format::Csv) {
        return Err(Failure::usage("--format csv is only supported by `sweep`"));
    }
    Ok(())
}

/// Output text plus the exit code to return once it is written.
fn execute(command: &Command) -> Result<(String, i32), Failure> {
    match command {
        Command::Predict(opts) => {
            json_only(opts)?;
            let scenario = load_scenario(opts)?;
            let mut prediction = n_star_exact(&scenario);
            if opts.net_mode == NetModeArg::Mean {
                prediction.n_star_approx = n_star_approx(&scenario, NetMode::Mean);
            }
            Ok((io::prediction_to_json(&prediction), EXIT_OK))
        }
        Command::Simulate(opts) => {
            json_only(opts)?;
            let scenario = load_scenario(opts)?;
            let trace = generate(&scenario).map_err(|e| Failure::input(e.to_string()))?;
            Ok((io::emit_trace_json(&trace), EXIT_OK))
        }
        Command::Verify(opts) => {
            json_only(opts)?;
            let scenario = load_scenario(opts)?;
            let report = verify_prediction(&scenario).map_err(|e| Failure::input(e.to_string()))?;
            let code = if report.agree { EXIT_OK } else { EXIT_DISAGREE };
            Ok((io::report_to_json(&report), code))
        }
        Command::Sweep(opts) => {
            let spec_path = required(&opts.spec, "spec")?;
            let fallback = match opts.scenario {
                Some(_) => Some(load_scenario(opts)?),
                None => None,
            };
            let mut spec = io::parse_sweep_spec(&read(spec_path)?, fallback)
                .map_err(|e| Failure::input(format!("{}: {e}", spec_path.display())))?;
            if let Some(n) = opts.iterations {
                spec.max_iterations = Some(n);
            }
            let rows = run_sweep(&spec, true);
            let text = match opts.format.unwrap_or(Format::Csv) {
                Format::Csv => io::emit_sweep_csv(&rows),
                Format::Json => io::sweep_rows_to_json(&rows),
            };
            Ok((text, EXIT_OK))
        }
        Command::Pad(opts) => {
            json_only(opts)?;
            let scenario = load_scenario(opts)?;
            let padded = politeness_pad(&scenario, opts.count, opts.norm)
                .map_err(|e| Failure::input(e.to_string()))?;
            Ok((io::scenario_to_json(&padded), EXIT_OK))
        }
        Command::Random(opts) => {
            json_only(opts)?;
            let mut constraints = ScenarioConstraints::default();
            if let Some(n) = opts.iterations {
                constraints.max_iterations = n;
            }
            let scenario =
                random_scenario(opts.seed, &constraints).map_err(|e| Failure::input(e.to_string()))?;
            Ok((io::scenario_to_json(&scenario), EXIT_OK))
        }
        Command::Gram(opts) => {
            json_only(opts)?;
            let path = required(&opts.spec, "spec")?;
            let gram = io::parse_gram(&read(path)?)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            let vectors = vectors_from_gram(&gram).map_err(|e| Failure::input(e.to_string()))?;
            Ok((io::vectors_to_json(&vectors), EXIT_OK))
        }
    }
}

fn out_path(command: &Command) -> Option<&Path> {
    let opts = match command {
        Command::Predict(o)
        | Command::Simulate(o)
        | Command::Verify(o)
        | Command::Sweep(o)
        | Command::Pad(o)
        | Command::Random(o)
        | Command::Gram(o) => o,
    };
    opts.out.as_deref()
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                // --help / --version
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };

    let result = execute(&cli.command).and_then(|(text, code)| {
        match out_path(&cli.command) {
            Some(path) => fs::write(path, &text)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?,
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::input(format!("stdout: {e}")))?,
        }
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            if f.code == EXIT_USAGE {
                let _ = writeln!(stderr, "run `tipping-lab --help` for usage");
            }
            f.code
        }
    }
}
