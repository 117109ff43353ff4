//! `ris-mimo`: command-line front end of the RIS link simulator.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ris_mimo::harness::AlgorithmKind;
use thiserror::Error;

use manifest::RunManifest;

/// Exit statuses. Usage errors exit with 2 (reported by the argument
/// parser).
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;
pub const EXIT_IO: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<ris_mimo::Error> for CliError {
    fn from(e: ris_mimo::Error) -> Self {
        match e {
            ris_mimo::Error::Io(io) => CliError::Io(io.to_string()),
            e if e.is_numerical() => CliError::Numeric(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

const EXIT_HELP: &str = "Exit status: 0 success, 2 usage error, 3 configuration error \
(schema, validation, refused search), 4 numerical failure, 5 I/O error.";

#[derive(Debug, Parser)]
#[command(name = "ris-mimo", version, about = "RIS-assisted MIMO-OFDM link simulator", after_help = EXIT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long, short)]
    config: PathBuf,
    /// Master seed; replaces `seeds.master`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    /// `dotted.key=value` applied to the scenario file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure the link with a fixed codeword or without the RIS.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Remove the RIS from the channel.
        #[arg(long)]
        no_ris: bool,
        /// Space-separated phase indices; all zeros when absent.
        #[arg(long, conflicts_with = "no_ris")]
        codeword: Option<String>,
    },
    /// Run a control algorithm and report the state table and traces.
    Optimize {
        #[command(flatten)]
        common: Common,
        /// Replaces `algorithm.kind`.
        #[arg(long)]
        algorithm: Option<AlgorithmKind>,
        /// Codebook file for mpc; replaces `algorithm.codebook`.
        #[arg(long)]
        codebook: Option<PathBuf>,
    },
    /// Learn the MPC direction codebook.
    Codebook {
        #[command(flatten)]
        common: Common,
    },
    /// Gain/size or algorithm-efficiency sweep from the `[sweep]` section.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Capacity-increase map over the `[map]` grid.
    Map {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        algorithm: Option<AlgorithmKind>,
        #[arg(long)]
        codebook: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common) = match &cli.command {
        Command::Simulate { common, .. } => ("simulate", common),
        Command::Optimize { common, .. } => ("optimize", common),
        Command::Codebook { common } => ("codebook", common),
        Command::Sweep { common } => ("sweep", common),
        Command::Map { common, .. } => ("map", common),
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let mut overrides = common.overrides.clone();
    if let Some(s) = common.seed {
        overrides.push(format!("seeds.master={s}"));
    }
    match &cli.command {
        Command::Optimize {
            algorithm, codebook, ..
        }
        | Command::Map {
            algorithm, codebook, ..
        } => {
            if let Some(a) = algorithm {
                overrides.push(format!("algorithm.kind=\"{a}\""));
            }
            if let Some(p) = codebook {
                overrides.push(format!(
                    "algorithm.codebook={}",
                    toml::Value::String(p.display().to_string())
                ));
            }
        }
        _ => {}
    }
    let cfg = config::load(&common.config, &overrides)?;
    let out = &common.out;
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;

    let mut manifest = RunManifest::begin(name, &cfg, rayon::current_num_threads());
    manifest.write(out)?;
    let outcome = match &cli.command {
        Command::Simulate { no_ris, codeword, .. } => commands::simulate(&cfg, out, *no_ris, codeword.as_deref()),
        Command::Optimize { .. } => commands::optimize(&cfg, out),
        Command::Codebook { .. } => commands::codebook(&cfg, out),
        Command::Sweep { .. } => commands::sweep(&cfg, out),
        Command::Map { .. } => commands::map(&cfg, out),
    }
    .and_then(|mut files| {
        files.push(commands::write_config_snapshot(&cfg, out)?);
        Ok(files)
    });
    manifest.finish(&outcome);
    manifest.write(out)?;
    outcome.map(|_| ())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
