// Range guards are written `!(x > 0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod logger;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use commands::Report;
use config::{AbParams, ChiralParams, CirculatorParams, ExperimentConfig, FourierParams, Format, LadderParams, RabiParams};
use error::CliError;

const PRESETS: &str = "\
Presets (frequencies in MHz):
  fourier --figure2      lambda = 0.5, phi = 0, nmax = 8
  rabi --figure3         g12 = 1, g_p = 60, Delta_p = 600, omega_d = 15, lambda = 0.5
  chiral --figure5       g12 = 0.042, g13 = g23 = 1.1, g_p = 60, Delta_p = 600, omega_d = -20,
  circulator --figure5   lambda = 0.5, Phi_B = pi/2, kappa = 0.2
  ab --figure7           J = 0.1, kappa = 0.2, kappa_p = 0.02 and 0.2

Explicit flags override --config parameters, which override presets.
FLOQLAT_THREADS caps the worker threads used by sweeps.";

#[derive(Parser, Debug)]
#[command(name = "floqlat", version, about = "Floquet-engineered gauge fields in coupled phonon cavities", after_help = PRESETS)]
struct Cli {
    /// JSON experiment file: {"command", "parameters", "output", "out_path"}
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Data format
    #[arg(long, global = true, value_enum)]
    output: Option<Format>,
    /// Data file; without it data go to stdout and the summary to stderr
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Echo info (-v) or debug (-vv) messages
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fourier harmonics ξₙ, φₙ of the driven dispersive shift
    Fourier {
        #[arg(long)]
        figure2: bool,
        #[command(flatten)]
        params: FourierParams,
    },
    /// Full versus effective two-cavity Rabi oscillation
    Rabi {
        #[arg(long)]
        figure3: bool,
        #[command(flatten)]
        params: RabiParams,
    },
    /// Chiral phonon circulation in the three-cavity loop
    Chiral {
        #[arg(long)]
        figure5: bool,
        #[command(flatten)]
        params: ChiralParams,
    },
    /// Three-port transmission of the loop versus probe detuning
    Circulator {
        #[arg(long)]
        figure5: bool,
        #[command(flatten)]
        params: CirculatorParams,
    },
    /// Two-path interference T₄₁ versus loop flux
    Ab {
        #[arg(long)]
        figure7: bool,
        #[command(flatten)]
        params: AbParams,
    },
    /// Two-leg flux ladder spectrum
    Ladder {
        #[command(flatten)]
        params: LadderParams,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Fourier { .. } => "fourier",
            Command::Rabi { .. } => "rabi",
            Command::Chiral { .. } => "chiral",
            Command::Circulator { .. } => "circulator",
            Command::Ab { .. } => "ab",
            Command::Ladder { .. } => "ladder",
        }
    }

    fn empty(name: &str) -> Result<Self, CliError> {
        Ok(match name {
            "fourier" => Command::Fourier { figure2: false, params: Default::default() },
            "rabi" => Command::Rabi { figure3: false, params: Default::default() },
            "chiral" => Command::Chiral { figure5: false, params: Default::default() },
            "circulator" => Command::Circulator { figure5: false, params: Default::default() },
            "ab" => Command::Ab { figure7: false, params: Default::default() },
            "ladder" => Command::Ladder { params: Default::default() },
            other => {
                return Err(CliError::Validation(format!(
                    "unknown command `{other}` (expected fourier, rabi, chiral, circulator, ab or ladder)"
                )))
            }
        })
    }

    fn run(&self, file: &Map<String, Value>) -> Result<Report, CliError> {
        match self {
            Command::Fourier { figure2, params } => commands::fourier(*figure2, file, params),
            Command::Rabi { figure3, params } => commands::rabi(*figure3, file, params),
            Command::Chiral { figure5, params } => commands::chiral(*figure5, file, params),
            Command::Circulator { figure5, params } => commands::circulator(*figure5, file, params),
            Command::Ab { figure7, params } => commands::ab(*figure7, file, params),
            Command::Ladder { params } => commands::ladder(file, params),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FLOQLAT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Validation(format!("FLOQLAT_THREADS = {raw:?} must be an integer >= 1")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(format!("FLOQLAT_THREADS: {e}")))
}

fn write_summary(out: &mut dyn Write, command: &str, report: &Report) -> std::io::Result<()> {
    writeln!(out, "# {command}")?;
    let width = report.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in &report.summary {
        writeln!(out, "{k:<width$} = {v}")?;
    }
    for w in logger::warnings() {
        writeln!(out, "warning: {w}")?;
    }
    for n in &report.notes {
        writeln!(out, "note: {n}")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let command = match (cli.command, cfg.command.as_deref()) {
        (Some(c), Some(name)) if c.name() != name => {
            return Err(CliError::Validation(format!(
                "config command `{name}` conflicts with subcommand `{}`",
                c.name()
            )))
        }
        (Some(c), _) => c,
        (None, Some(name)) => Command::empty(name)?,
        (None, None) => return Err(CliError::Validation("no command given (see --help)".to_string())),
    };
    let report = command.run(&cfg.parameters)?;

    let format = cli.output.or(cfg.output).unwrap_or(Format::Csv);
    let data = match format {
        Format::Csv => report.table.to_csv(),
        Format::Json => report.table.to_json(),
    };
    match cli.out.or(cfg.out_path) {
        Some(path) => {
            std::fs::write(&path, data).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            write_summary(&mut std::io::stdout().lock(), command.name(), &report)
                .map_err(|e| CliError::Io("stdout".to_string(), e))?;
        }
        None => {
            std::io::stdout()
                .lock()
                .write_all(data.as_bytes())
                .map_err(|e| CliError::Io("stdout".to_string(), e))?;
            write_summary(&mut std::io::stderr().lock(), command.name(), &report)
                .map_err(|e| CliError::Io("stderr".to_string(), e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    logger::install(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
