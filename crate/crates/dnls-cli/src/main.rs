//! `dnls-gibbs`: experiment drivers for the gauged DNLS verification suite.
//!
//! Exit codes: 0 all rows pass, 1 at least one FAIL row, 2 usage or
//! configuration error, 3 numeric abort (blow-up, sampler starvation,
//! ensemble collapse, step-budget exhaustion).

use clap::{Parser, Subcommand, ValueEnum};
use dnls_cli::{CommandName, FileConfig, DEFAULT_SEED};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "dnls-gibbs",
    about = "Pseudospectral verification experiments for the gauged derivative NLS hierarchy",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file (one table per command; flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// RNG seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<CliFormat>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Mass and conserved-functional drift along the truncated flow.
    Conservation,
    /// Jacobian-trace and simplex-volume checks of phase-space volume preservation.
    Liouville,
    /// Gauge group law, norm preservation, divergence decay and Jacobian determinant.
    GaugeSuite,
    /// L²(γ̃) decay of the time derivative of the gauged functionals.
    DecayScan,
    /// Approximate invariance of the weighted Gibbs ensemble under the flow.
    Invariance,
    /// Truncated flow against the best-resolved run.
    FlowNearness,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let file_cfg = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match FileConfig::from_toml(&text) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(2);
                }
            },
            Err(e) => {
                eprintln!("config error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => FileConfig::default(),
    };

    let seed = cli.seed.or(file_cfg.seed).unwrap_or(DEFAULT_SEED);
    let workers = cli.workers.or(file_cfg.workers).unwrap_or(0);
    if workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    }

    let command = match cli.command {
        Command::Conservation => CommandName::Conservation,
        Command::Liouville => CommandName::Liouville,
        Command::GaugeSuite => CommandName::GaugeSuite,
        Command::DecayScan => CommandName::DecayScan,
        Command::Invariance => CommandName::Invariance,
        Command::FlowNearness => CommandName::FlowNearness,
    };

    let started = Instant::now();
    let report = match command.run(&file_cfg, seed) {
        Ok(report) => report,
        Err(e) if e.is_numeric_abort() => {
            eprintln!("numeric abort: {e}");
            return ExitCode::from(3);
        }
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    eprintln!(
        "{}: {} rows in {:.1}s",
        report.command,
        report.rows.len(),
        started.elapsed().as_secs_f64()
    );

    let format = cli
        .format
        .map(|f| match f {
            CliFormat::Csv => dnls_cli::OutputFormat::Csv,
            CliFormat::Json => dnls_cli::OutputFormat::Json,
        })
        .or(file_cfg.format)
        .unwrap_or(dnls_cli::OutputFormat::Csv);
    let body = match format {
        dnls_cli::OutputFormat::Csv => report.to_csv(),
        dnls_cli::OutputFormat::Json => report.to_json(),
    };

    let out = cli.out.or(file_cfg.out);
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &body) {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }

    for row in report.failures() {
        eprintln!("FAIL {}/{}: {:.6e}", row.section, row.label, row.estimate);
    }
    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
