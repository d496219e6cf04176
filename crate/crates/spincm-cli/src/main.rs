use clap::{Parser, Subcommand};
use spincm_cli::config::RunConfig;
use spincm_cli::{commands, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spin Calogero-Moser simulations and r-matrix checks.
#[derive(Parser)]
#[command(name = "spincm", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for random-sample suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Multiplies every residual threshold.
    #[arg(long, global = true, default_value_t = 1.0)]
    threshold_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the unreduced system; writes a CSV trajectory and JSON diagnostics.
    Simulate,
    /// Run a verification suite and write a JSON report.
    Verify {
        /// axioms, cdybe, mdybe, lax, involution, spectral or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Project a trajectory file onto the reduced phase space.
    Reduce {
        /// Trajectory CSV (defaults to the configured trajectory in --out).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Print the root system and r-matrix data as JSON.
    Info,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let path = cli.config.ok_or_else(|| CliError::Config("--config is required".into()))?;
    if cli.threshold_scale.is_nan() || cli.threshold_scale <= 0.0 {
        return Err(CliError::Config("--threshold-scale must be positive".into()));
    }
    let setup = RunConfig::load(&path)?.validate()?;
    let th = setup.config.verify.thresholds.resolve(setup.config.family, cli.threshold_scale);
    match cli.command {
        Command::Simulate => {
            let d = commands::simulate(&setup, &cli.out)?;
            println!("{} steps to t = {}, energy drift {:.3e}", d.steps, d.t_final, d.energy_drift);
            Ok(true)
        }
        Command::Verify { suite } => {
            let reports = commands::verify(&setup, &suite, cli.seed, &th, &cli.out)?;
            for r in &reports {
                for c in &r.checks {
                    let tag = if c.pass { "pass" } else { "FAIL" };
                    println!("{tag} {}/{}: max {:.3e} < {:.1e} over {} samples", r.suite, c.name, c.max_residual, c.threshold, c.samples);
                }
            }
            Ok(reports.iter().all(|r| r.pass))
        }
        Command::Reduce { input } => {
            let input = input.unwrap_or_else(|| cli.out.join(&setup.config.outputs.trajectory));
            let n = commands::reduce(&setup, &input, &cli.out)?;
            println!("reduced {n} steps");
            Ok(true)
        }
        Command::Info => {
            println!("{}", serde_json::to_string_pretty(&commands::info(&setup, &th)).expect("info serializes"));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
