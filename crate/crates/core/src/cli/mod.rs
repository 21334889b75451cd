//! The `qfi` command-line front end.
//!
//! Subcommands: `qfi` (one point), `sweep` (CSV over a grid), `optimize`
//! (optimal probe report) and `verify` (brute-force cross-check). Exit codes:
//! 0 on success, 1 when verification fails, 2 on usage or validation errors.

mod commands;
pub mod format;
pub mod settings;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::channel::PresetKind;
use settings::{Column, KappaChoice, Settings, Spacing, Variable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] crate::Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    VerifyFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => EXIT_VERIFY_FAILED,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qfi",
    version,
    about = "Quantum Fisher information of noisy entangled qubit probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fisher information of a single probe configuration, as one CSV row.
    Qfi {
        #[command(flatten)]
        common: CommonArgs,
        /// Interaction time T; adds the Fisher information about ν = ξ/T.
        #[arg(long)]
        time: Option<f64>,
    },
    /// Evaluate columns over a parameter or probe-size grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        variable: Option<Variable>,
        #[arg(long, allow_hyphen_values = true)]
        start: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        stop: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum)]
        spacing: Option<Spacing>,
        /// Parameter values for a sweep over n, comma separated.
        #[arg(long, value_delimiter = ',')]
        params: Option<Vec<f64>>,
        #[arg(long, value_enum, value_delimiter = ',')]
        columns: Option<Vec<Column>>,
        /// Scan sizes with one extra inactive qubit in optimum columns.
        #[arg(long)]
        inactive: bool,
    },
    /// Optimal probe size and entanglement for one noise configuration.
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        /// Scan active sizes with one extra inactive qubit.
        #[arg(long)]
        inactive: bool,
        /// Total qubits for the block-strategy summary.
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Compare the closed form with the dense oracle on random configurations.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        trials: Option<usize>,
        /// Force at least one inactive qubit whenever n >= 2.
        #[arg(long)]
        inactive: bool,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML file whose keys mirror these flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<PresetKind>,
    /// Scalar parameter of the preset (α, μ2 or μ1).
    #[arg(long, allow_hyphen_values = true)]
    param: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu2: Option<f64>,
    #[arg(long = "omega-t", allow_hyphen_values = true)]
    omega_t: Option<f64>,
    /// Total probe size.
    #[arg(long)]
    n: Option<usize>,
    /// Qubits exposed to the rotation and the noise.
    #[arg(long = "n-active")]
    n_active: Option<usize>,
    /// Schmidt coefficient, or `opt`.
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<KappaChoice>,
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonArgs {
    fn into_settings(self) -> (Option<PathBuf>, Settings) {
        let s = Settings {
            preset: self.preset,
            param: self.param,
            mu: self.mu,
            mu1: self.mu1,
            mu2: self.mu2,
            omega_t: self.omega_t,
            n: self.n,
            n_active: self.n_active,
            kappa: self.kappa,
            n_max: self.n_max,
            out: self.out,
            seed: self.seed,
            ..Settings::default()
        };
        (self.config, s)
    }
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

fn resolve(common: CommonArgs, extra: Settings) -> Result<Settings, CliError> {
    let (config, flags) = common.into_settings();
    let flags = extra.over(flags);
    match config {
        Some(path) => Ok(flags.over(Settings::load(&path)?)),
        None => Ok(flags),
    }
}

/// `#` lines opening every CSV file the tool writes.
pub fn metadata(command: &str, settings: &Settings) -> String {
    let seed = settings
        .seed
        .map_or_else(|| "none".to_owned(), |s| s.to_string());
    format!(
        "# qfi {}\n# command: {command}\n# settings: {}\n# seed: {seed}\n",
        env!("CARGO_PKG_VERSION"),
        settings.describe()
    )
}

/// Writes `text` to `settings.out` when set, otherwise to `stdout`.
pub(crate) fn emit(
    settings: &Settings,
    text: &str,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    match &settings.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Qfi { common, time } => {
            let s = resolve(
                common,
                Settings {
                    time,
                    ..Settings::default()
                },
            )?;
            commands::qfi(&s, stdout)
        }
        Command::Sweep {
            common,
            variable,
            start,
            stop,
            steps,
            spacing,
            params,
            columns,
            inactive,
        } => {
            let extra = Settings {
                variable,
                start,
                stop,
                steps,
                spacing,
                params,
                columns,
                inactive: flag(inactive),
                ..Settings::default()
            };
            let s = resolve(common, extra)?;
            let text = sweep::SweepPlan::new(s.clone())?.render()?;
            emit(&s, &text, stdout)
        }
        Command::Optimize {
            common,
            inactive,
            budget,
        } => {
            let s = resolve(
                common,
                Settings {
                    inactive: flag(inactive),
                    budget,
                    ..Settings::default()
                },
            )?;
            commands::optimize(&s, stdout)
        }
        Command::Verify {
            common,
            trials,
            inactive,
        } => {
            let s = resolve(
                common,
                Settings {
                    trials,
                    inactive: flag(inactive),
                    ..Settings::default()
                },
            )?;
            commands::verify(&s, stdout)
        }
    }
}
