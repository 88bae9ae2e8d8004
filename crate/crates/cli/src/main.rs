//! `rabi`: level diagrams, emission spectra and inversion dynamics for the
//! Jaynes–Cummings model with counter-rotating terms.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 invariant
//! violation or failed verification, 3 truncation too small.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Failure, EXIT_USAGE};
use config::Overrides;
use output::{Meta, Sink};

#[derive(Debug, Parser)]
#[command(name = "rabi", version, about = "Quantum Rabi model in the displaced Fock basis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Lowest levels and ground-state photon number over the coupling grid
    Levels,
    /// Emission spectrum after exciting the dressed ground state
    Spectrum,
    /// Population inversion for |g>|alpha>
    Dynamics,
    /// Compare the displaced-basis solver with bare-Fock diagonalization
    Verify,
    /// Levels, photon number and spectrum summary over the coupling grid
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Levels => "levels",
            Command::Spectrum => "spectrum",
            Command::Dynamics => "dynamics",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let cfg = cli.overrides.resolve().map_err(commands::usage)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            return Err(commands::usage("--jobs must be at least 1"));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| commands::usage(format!("thread pool: {e}")))?;
    let mut sink = Sink::new(&cfg)?;
    let results = pool.install(|| match cli.command {
        Command::Levels => commands::levels(&cfg, &mut sink),
        Command::Spectrum => commands::spectrum(&cfg, &mut sink),
        Command::Dynamics => commands::dynamics(&cfg, &mut sink),
        Command::Verify => commands::verify(&cfg, &mut sink),
        Command::Sweep => commands::sweep(&cfg, &mut sink),
    })?;
    let meta = Meta {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: cli.command.name().to_string(),
        config: cfg.clone(),
        results,
    };
    sink.json("meta.json", &meta)?;
    log::info!("wrote {} to {}", sink.files().join(", "), cfg.output_dir.display());
    if let Command::Verify = cli.command {
        commands::verify_gate(&meta.results, cfg.model.n_tr)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("rabi: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
