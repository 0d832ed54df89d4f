//! Experiment drivers behind the `dnls-gibbs` binary.
//!
//! Every command is a deterministic function of its configuration
//! (including the seed): report bodies are byte-identical across runs and
//! worker counts. The library surface exists so the acceptance suite can
//! call the drivers directly.

pub mod commands;
pub mod config;
pub mod observables;
pub mod tolerances;

pub use commands::*;
pub use config::{FileConfig, OutputFormat};

use dnls_core::report::ExperimentReport;
use dnls_core::Result;

pub const DEFAULT_SEED: u64 = 20260810;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandName {
    Conservation,
    Liouville,
    GaugeSuite,
    DecayScan,
    Invariance,
    FlowNearness,
}

impl CommandName {
    pub fn run(self, cfg: &FileConfig, seed: u64) -> Result<ExperimentReport> {
        match self {
            CommandName::Conservation => cmd_conservation(&cfg.conservation, seed),
            CommandName::Liouville => cmd_liouville(&cfg.liouville, seed),
            CommandName::GaugeSuite => cmd_gauge_suite(&cfg.gauge_suite, seed),
            CommandName::DecayScan => cmd_decay_scan(&cfg.decay_scan, seed),
            CommandName::Invariance => cmd_invariance(&cfg.invariance, seed),
            CommandName::FlowNearness => cmd_flow_nearness(&cfg.flow_nearness, seed),
        }
    }
}
