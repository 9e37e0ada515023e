use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ris_cli::{
    load_scenario, parse_grid, rbd_check, render_csv, run_sweep, validate, SweepMode, SweepParam,
    SweepSpec,
};

/// Double-RIS multiuser downlink simulator: closed-form rate analysis with
/// Monte Carlo cross-validation.
#[derive(Parser)]
#[command(name = "ris-sim", version, about)]
struct Cli {
    /// Worker threads for Monte Carlo trials and sweep grid points
    /// (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep one parameter over a grid and write per-user rates as CSV.
    Sweep {
        /// Scenario file (JSON); missing fields take the standard defaults.
        #[arg(long)]
        config: PathBuf,
        /// Swept parameter: total_power_dbm, rho_magnitude, kappa,
        /// bs_antennas, or element_spacing_m.
        #[arg(long)]
        param: String,
        /// Comma-separated grid values, e.g. `0,5,10,15,20`.
        #[arg(long)]
        grid: String,
        /// Rate routes to evaluate: closed, mc, or both.
        #[arg(long, default_value = "both")]
        mode: String,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the validation suite: covariance, bound, and optimality checks.
    Validate {
        /// Scenario file (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Monte Carlo trials (default: the scenario's `trials`).
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Verify by sampling that no random phase configuration beats the
    /// all-equal-phase design.
    RbdCheck {
        /// Scenario file (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Number of random configurations to sample.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Sweep {
            config,
            param,
            grid,
            mode,
            out,
        } => {
            let scenario = load_scenario(&config)?;
            let param: SweepParam = param.parse()?;
            let mode: SweepMode = mode.parse()?;
            let spec = SweepSpec::new(param, parse_grid(&grid)?, scenario)?;
            let rows = run_sweep(&spec, mode)?;
            std::fs::write(&out, render_csv(&rows))?;
            eprintln!(
                "wrote {} rows ({} grid points) to {}",
                rows.len(),
                spec.grid.len(),
                out.display()
            );
            Ok(true)
        }
        Command::Validate { config, trials } => {
            let scenario = load_scenario(&config)?;
            let report = validate(&scenario, trials)?;
            println!("{report}");
            Ok(report.all_passed())
        }
        Command::RbdCheck { config, samples } => {
            let scenario = load_scenario(&config)?;
            let report = rbd_check(&scenario, samples)?;
            println!("{report}");
            Ok(report.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} threads: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
