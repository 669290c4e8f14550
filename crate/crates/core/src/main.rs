use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use aimmimic::harness::{
    cmd_calibrate, cmd_detect, cmd_experiment, cmd_record, cmd_report, cmd_simulate, HarnessError, LoadedConfig,
    RunSummary,
};

#[derive(Parser)]
#[command(name = "aimmimic", version, about = "Aim-assist evasion experiments on simulated matches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long, default_value = "configs/experiment.toml")]
    config: PathBuf,
    /// Overrides `seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `out` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Record genuine matches and build gated profiles.
    Record(Common),
    /// Play the genuine, naive and adaptive conditions.
    Simulate(Common),
    /// Run the detectors over the simulated conditions.
    Detect(Common),
    /// Render summary tables and figures from the detector tables.
    Report(Common),
    /// simulate, detect and report.
    Experiment(Common),
    /// Fit rule thresholds on a genuine population.
    Calibrate(Common),
}

fn load(c: &Common) -> Result<LoadedConfig, HarnessError> {
    let mut cfg = LoadedConfig::from_path(&c.config)?;
    if let Some(s) = c.seed {
        cfg.config.seed = s;
    }
    if let Some(o) = &c.out {
        cfg.config.out = o.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<RunSummary, HarnessError> {
    match cli.command {
        Command::Record(c) => cmd_record(&load(&c)?),
        Command::Simulate(c) => cmd_simulate(&load(&c)?),
        Command::Detect(c) => cmd_detect(&load(&c)?),
        Command::Report(c) => {
            let out = match c.out {
                Some(o) => o,
                None => load(&c)?.config.out,
            };
            cmd_report(&out)
        }
        Command::Experiment(c) => cmd_experiment(&load(&c)?),
        Command::Calibrate(c) => cmd_calibrate(&load(&c)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(s) => {
            for m in &s.messages {
                println!("{m}");
            }
            for f in &s.findings {
                eprintln!("finding: {f}");
            }
            if s.findings.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
