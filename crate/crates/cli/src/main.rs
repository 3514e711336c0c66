//! `plantsis` — seasonal SIS simulation and likelihood-free inference on
//! plantation networks, driven by a TOML run configuration.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use plantsis::ErrorCategory;

use commands::{InferMode, Overrides};
use config::RunConfig;

#[derive(Parser)]
#[command(name = "plantsis", version, about = "Seasonal SIS simulation and ABC inference")]
struct Cli {
    /// Run configuration file.
    #[arg(short, long, global = true, default_value = "plantsis.toml")]
    config: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads, overriding the config. Results never depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Rejection,
    Mcmc,
}

#[derive(Subcommand)]
enum Command {
    /// Run one forward simulation and write the trajectory matrix.
    Simulate {
        /// Months to simulate, overriding the config.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Estimate the posterior by ABC and write the draws file.
    Infer {
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Tolerance ε, overriding the config.
        #[arg(long)]
        epsilon: Option<f64>,
        /// MCMC chain length, overriding the config.
        #[arg(long)]
        iterations: Option<u64>,
        /// Rejection attempts, overriding the config.
        #[arg(long)]
        attempts: Option<u64>,
    },
    /// Sample prior-predictive discrepancies to choose a tolerance.
    Pilot {
        #[arg(long)]
        attempts: Option<u64>,
    },
    /// Summarize a draws file: posterior statistics, mixing, densities.
    Diagnose,
    /// Re-filter a draws file at a stricter tolerance.
    Filter {
        /// Filter tolerance ε′, overriding the config.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Posterior predictive forecast under a what-if scenario.
    Forecast {
        /// calendar | all-summer | all-winter, overriding the config.
        #[arg(long)]
        season_mode: Option<String>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Score posterior predictions against hold-out snapshots.
    Validate {
        /// Hold-out month count, overriding the config.
        #[arg(long)]
        holdout: Option<usize>,
        #[arg(long)]
        replicates: Option<usize>,
    },
    /// Bin point observations into subsection snapshots.
    Bin,
    /// Structural summary of the network files.
    NetStats,
}

fn run(cli: Cli) -> plantsis::Result<()> {
    let mut cfg = RunConfig::load(&cli.config)?;
    commands::apply_overrides(
        &mut cfg,
        &Overrides { seed: cli.seed, workers: cli.workers, out_dir: cli.out_dir },
    );

    // The CLI owns the worker pool; core modules only ever see task indices.
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count())
        .build_global()
        .map_err(|e| plantsis::Error::InvalidInput(format!("worker pool: {e}")))?;

    match cli.command {
        Command::Simulate { horizon } => {
            if let (Some(h), Some(sim)) = (horizon, cfg.simulate.as_mut()) {
                sim.horizon = h;
            }
            commands::simulate(&cfg)
        }
        Command::Infer { mode, epsilon, iterations, attempts } => {
            match mode {
                ModeArg::Rejection => {
                    if let Some(rej) = cfg.rejection.as_mut() {
                        if let Some(e) = epsilon {
                            rej.epsilon = e;
                        }
                        if let Some(a) = attempts {
                            rej.attempts = a;
                        }
                    }
                }
                // The [mcmc] section is optional, so materialize it when a
                // flag needs somewhere to land.
                ModeArg::Mcmc if epsilon.is_some() || iterations.is_some() => {
                    let mcmc = cfg.mcmc.get_or_insert_with(Default::default);
                    if let Some(e) = epsilon {
                        mcmc.epsilon = Some(e);
                    }
                    if let Some(i) = iterations {
                        mcmc.iterations = Some(i);
                    }
                }
                ModeArg::Mcmc => {}
            }
            let mode = match mode {
                ModeArg::Rejection => InferMode::Rejection,
                ModeArg::Mcmc => InferMode::Mcmc,
            };
            commands::infer(&cfg, mode)
        }
        Command::Pilot { attempts } => {
            if let (Some(a), Some(pilot)) = (attempts, cfg.pilot.as_mut()) {
                pilot.attempts = a;
            }
            commands::pilot(&cfg)
        }
        Command::Diagnose => commands::diagnose(&cfg),
        Command::Filter { epsilon } => {
            if let (Some(e), Some(filter)) = (epsilon, cfg.filter.as_mut()) {
                filter.epsilon = e;
            }
            commands::filter(&cfg)
        }
        Command::Forecast { season_mode, horizon, replicates } => {
            if let Some(fc) = cfg.forecast.as_mut() {
                if season_mode.is_some() {
                    fc.season_mode = season_mode;
                }
                if horizon.is_some() {
                    fc.horizon = horizon;
                }
                if replicates.is_some() {
                    fc.replicates = replicates;
                }
            }
            commands::forecast(&cfg)
        }
        Command::Validate { holdout, replicates } => {
            if let Some(val) = cfg.validate.as_mut() {
                if holdout.is_some() {
                    val.holdout_months = holdout;
                }
                if replicates.is_some() {
                    val.replicates = replicates;
                }
            }
            commands::validate(&cfg)
        }
        Command::Bin => commands::bin(&cfg),
        Command::NetStats => commands::net_stats(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version are not failures.
            if err.use_stderr() {
                let _ = err.print();
                return ExitCode::from(1);
            }
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err.category() {
                ErrorCategory::Config => 1,
                ErrorCategory::Data => 2,
                ErrorCategory::Numeric => 3,
            })
        }
    }
}
