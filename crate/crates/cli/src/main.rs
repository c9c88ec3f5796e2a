use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracdiff_cli::battery::Battery;
use fracdiff_cli::commands::{self, load_config};
use fracdiff_cli::config::Method;
use fracdiff_cli::{CliError, Outcome, Overrides};

/// Fractional diffusion: forward runs, parameter recovery and experiment batteries.
///
/// Thread count follows RAYON_NUM_THREADS.
#[derive(Parser)]
#[command(name = "fracdiff", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides output.dir)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for noise and multi-start points (overrides noise.seed)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured model; write solution.csv and observation.csv
    Forward(Common),
    /// Recover parameters from an observation CSV
    Invert {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Number of terms for multiterm recovery
        #[arg(long)]
        ell: Option<usize>,
        /// Tikhonov weight
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run a named experiment battery; exit 0 iff every check passes
    Battery {
        #[arg(value_enum)]
        name: Battery,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Add seeded relative Gaussian noise to an observation CSV
    Noise(Common),
}

fn overrides(c: &Common) -> Overrides {
    Overrides {
        out: c.out.clone(),
        seed: c.seed,
        ..Default::default()
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Forward(c) => commands::cmd_forward(&load_config(&c.config, &overrides(&c))?),
        Command::Invert {
            common,
            method,
            ell,
            epsilon,
        } => {
            let ov = Overrides {
                method,
                ell,
                epsilon,
                ..overrides(&common)
            };
            commands::cmd_invert(&load_config(&common.config, &ov)?)
        }
        Command::Battery {
            name,
            config,
            out,
            seed,
        } => {
            let ov = Overrides {
                out: out.clone(),
                seed,
                ..Default::default()
            };
            let cfg = config.map(|p| load_config(&p, &ov)).transpose()?;
            let dir = match (&out, &cfg) {
                (Some(o), _) => o.clone(),
                (None, Some(c)) => c.output.dir.clone(),
                (None, None) => PathBuf::from("out"),
            };
            commands::cmd_battery(name, cfg.as_ref(), &dir)
        }
        Command::Noise(c) => commands::cmd_noise(&load_config(&c.config, &overrides(&c))?),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            if let Outcome::Unmet(why) = &outcome {
                eprintln!("fracdiff: {why}");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("fracdiff: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
