//! Command-line front end wiring the analysis crates together.
//!
//! Every invocation resolves its settings with precedence command line >
//! config file > built-in default, derives a named seed sub-stream per
//! randomized step from one root seed, and writes a `manifest.toml` next to
//! its outputs describing parameters, input digests, and produced files.
//! The manifest is written even when the command fails, with the error in
//! its status field.

pub mod cli;
pub mod commands;
pub mod config;
pub mod manifest;
pub mod seeds;

use std::path::PathBuf;

use cli::{Cli, Command, InfoCmd, LinsimCmd, MechCmd, QaCmd};
use manifest::RunRecorder;

/// Root seed used when neither the command line nor the config provides one.
pub const DEFAULT_SEED: u64 = 11;
/// Output directory used when none is given.
pub const DEFAULT_OUT: &str = "relmem-out";

/// Runs one parsed invocation end to end.
pub fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = config::load_config(cli.config.as_deref())?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let mut rec = RunRecorder::new(command_name(&cli.command), seed, &out)?;
    let result = dispatch(&cli.command, &cfg, seed, &mut rec);
    rec.finish(result.as_ref().map(|_| ()))?;
    result
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Info(c) => match c {
            InfoCmd::Entropy { .. } => "info.entropy",
            InfoCmd::Mi { .. } => "info.mi",
            InfoCmd::Decompose { .. } => "info.decompose",
        },
        Command::Mech(c) => match c {
            MechCmd::Make { .. } => "mech.make",
            MechCmd::Epsilon { .. } => "mech.epsilon",
            MechCmd::Factorize { .. } => "mech.factorize",
            MechCmd::Drp { .. } => "mech.drp",
            MechCmd::Adversarial { .. } => "mech.adversarial",
            MechCmd::Decompose { .. } => "mech.decompose",
        },
        Command::Linsim(c) => match c {
            LinsimCmd::Curve { .. } => "linsim.curve",
            LinsimCmd::Converge { .. } => "linsim.converge",
            LinsimCmd::Spectrum { .. } => "linsim.spectrum",
        },
        Command::Qa(c) => match c {
            QaCmd::Corrupt { .. } => "qa.corrupt",
            QaCmd::Report { .. } => "qa.report",
            QaCmd::Epochs { .. } => "qa.epochs",
        },
        Command::VerifyTheorems { .. } => "verify-theorems",
    }
}

fn dispatch(
    cmd: &Command,
    cfg: &config::FileConfig,
    seed: u64,
    rec: &mut RunRecorder,
) -> anyhow::Result<()> {
    match cmd {
        Command::Info(c) => commands::info::run(c, rec),
        Command::Mech(c) => commands::mech::run(c, cfg, seed, rec),
        Command::Linsim(c) => commands::linsim::run(c, cfg, seed, rec),
        Command::Qa(c) => commands::qa::run(c, cfg, rec),
        Command::VerifyTheorems { trials } => commands::verify::run(*trials, cfg, seed, rec),
    }
}
