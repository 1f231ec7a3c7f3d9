use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use wsi_cli::config::{load_config, load_document};
use wsi_cli::run::{run, sweep, Status};
use wsi_cli::verify::{run_criterion, Suite, VerifyOptions};

#[derive(Parser)]
#[command(name = "wsi", version, about = "Coupled wave / sliding-solid simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Expand the `[sweep]` block and run every point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Overrides the `workers` key.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run acceptance checks.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Fail any check that would draw random data.
        #[arg(long)]
        seedless: bool,
        /// Picard stopping tolerance.
        #[arg(long, default_value_t = VerifyOptions::default().picard_tol)]
        tol: f64,
        /// Picard horizon.
        #[arg(long, default_value_t = VerifyOptions::default().picard_horizon)]
        horizon: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    LakeAtRest,
    Dispersion,
    Picard,
    Energy,
    VelocityBound,
    Convergence,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::LakeAtRest => Suite::LakeAtRest,
            SuiteArg::Dispersion => Suite::Dispersion,
            SuiteArg::Picard => Suite::Picard,
            SuiteArg::Energy => Suite::Energy,
            SuiteArg::VelocityBound => Suite::VelocityBound,
            SuiteArg::Convergence => Suite::Convergence,
            SuiteArg::All => Suite::All,
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let manifest = run(&cfg, &out)?;
            match &manifest.error {
                None => println!("ok: {} outputs, {} steps -> {}", manifest.outputs, manifest.steps, out.display()),
                Some(e) => eprintln!("failed at t = {:?}: {e}", manifest.failing_time.unwrap_or_default()),
            }
            Ok(manifest.status == Status::Ok)
        }
        Command::Sweep { config, out, workers } => {
            let doc = load_document(&config)?;
            let runs = doc.expand()?;
            let workers = workers.or(runs.first().map(|r| r.workers)).unwrap_or(1);
            let entries = sweep(&runs, &doc.axes(), &out, workers).context("running the sweep")?;
            let failed = entries.iter().filter(|e| e.status == Status::Failed).count();
            for e in entries.iter().filter(|e| e.status == Status::Failed) {
                eprintln!("{}: {}", e.dir.display(), e.error.as_deref().unwrap_or("failed"));
            }
            println!("{} runs, {failed} failed -> {}", entries.len(), out.display());
            Ok(failed == 0)
        }
        Command::Verify {
            suite,
            seedless,
            tol,
            horizon,
        } => {
            let opts = VerifyOptions {
                seedless,
                picard_tol: tol,
                picard_horizon: horizon,
            };
            let mut ok = true;
            for id in Suite::from(suite).criteria() {
                let outcome = run_criterion(id, &opts);
                println!("{outcome}");
                ok &= outcome.passed;
            }
            Ok(ok)
        }
    }
}
