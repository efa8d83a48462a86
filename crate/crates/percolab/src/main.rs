//! Batch front-end for the percolation laboratory.
//!
//! Every subcommand reads a flat `key = value` config, runs its experiment,
//! and writes CSV/JSON artifacts plus a reproducibility manifest into the
//! output directory. Exit codes: 0 success, 1 runtime or numeric failure,
//! 2 config error. Thread count comes from `PERCOLAB_THREADS` (default:
//! hardware parallelism); outputs are byte-identical at any thread count.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use percolab::config::ConfigError;
use percolab::runner::{
    run_degree, run_power_design, run_simulate, run_sweep, run_validate_geometry, RunError,
};

#[derive(Parser)]
#[command(
    name = "percolab",
    version,
    about = "Connectivity experiments for a secondary network overlaid on a primary Poisson network"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat key = value experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for CSV/JSON artifacts and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run realizations at one density point; export nodes, edges, flags,
    /// and a crossing/component summary.
    Simulate(Common),
    /// Estimate the empirical connectivity boundary over a density grid and
    /// overlay the analytic bound curves.
    Sweep(Common),
    /// Tabulate the conditional average degree vs transmission range,
    /// quadrature and simulation side by side.
    Degree(Common),
    /// Tabulate the primary-density cap vs the secondary interference range
    /// and report the maximizer.
    PowerDesign(Common),
    /// Compare every analytic area against Monte-Carlo rejection oracles.
    ValidateGeometry(Common),
}

fn configure_threads() {
    if let Ok(v) = std::env::var("PERCOLAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                // Ignore the error if a pool was already installed.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid PERCOLAB_THREADS = {v:?}"),
        }
    }
}

fn read_config(path: &PathBuf) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|e| {
        RunError::Config(ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })
    })
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Simulate(c) => {
            let text = read_config(&c.config)?;
            let outcome = run_simulate(&text, c.seed, &c.out)?;
            println!(
                "simulate: {} realizations, L-R crossing fraction {:.3}, T-B {:.3}",
                outcome.realizations, outcome.left_right_fraction, outcome.top_bottom_fraction
            );
            println!(
                "  flagged fraction {:.3}, largest component fraction {:.3}",
                outcome.flagged_fraction_mean, outcome.largest_component_fraction_mean
            );
            if let Some(deg) = outcome.empirical_conditional_degree {
                println!("  empirical conditional degree {deg:.4}");
            }
            println!("  outputs in {}", c.out.display());
        }
        Command::Sweep(c) => {
            let text = read_config(&c.config)?;
            let outcome = run_sweep(&text, c.seed, &c.out)?;
            for curve in &outcome.curves {
                println!(
                    "sweep: {} curve with {} samples",
                    curve.method.as_str(),
                    curve.samples.len()
                );
            }
            println!("  outputs in {}", c.out.display());
        }
        Command::Degree(c) => {
            let text = read_config(&c.config)?;
            let outcome = run_degree(&text, c.seed, &c.out)?;
            println!("degree: {} sweep points", outcome.points.len());
            if let Some(peak) = outcome
                .points
                .iter()
                .max_by(|a, b| a.mu_quadrature.total_cmp(&b.mu_quadrature))
            {
                println!(
                    "  quadrature peak mu = {:.4} at r_p = {} m",
                    peak.mu_quadrature, peak.r_p
                );
            }
            println!("  outputs in {}", c.out.display());
        }
        Command::PowerDesign(c) => {
            let text = read_config(&c.config)?;
            let outcome = run_power_design(&text, &c.out)?;
            println!(
                "power-design: cap peaks at r_I = {} m ({:.4} km^-2)",
                outcome.argmax_r_i,
                outcome.peak_lambda_pt * 1e6
            );
            println!("  outputs in {}", c.out.display());
        }
        Command::ValidateGeometry(c) => {
            let text = read_config(&c.config)?;
            let outcome = run_validate_geometry(&text, c.seed, &c.out)?;
            println!(
                "validate-geometry: {} comparisons, max |z| = {:.3}",
                outcome.checks.len(),
                outcome.max_abs_z
            );
            println!("  outputs in {}", c.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
