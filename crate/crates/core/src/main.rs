use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ehgo_quad::harness::{cmd_compare, cmd_run, cmd_scaling};
use ehgo_quad::scaling::{ObserverKind, DEFAULT_EPSILONS};
use ehgo_quad::{ControllerKind, Error, Scenario};

/// Quadrotor simulator with extended high-gain observers.
///
/// Exit codes: 0 success, 2 usage error, 3 configuration error,
/// 4 simulation fault, 5 I/O error.
#[derive(Parser)]
#[command(version, about, long_about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one controller; writes a trajectory CSV and a summary JSON.
    Run {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Controller overriding the scenario's (cascaded-ehgo, standard-ehgo, pid, off).
        #[arg(long)]
        controller: Option<ControllerKind>,
        /// Seed overriding the scenario's.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Simulate several controllers and write a comparison report.
    Compare {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Controller to include; repeat for several. Defaults to the scenario's list.
        #[arg(long)]
        controller: Vec<ControllerKind>,
        /// Seed overriding the scenario's.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit the log-log slope of the steady-state estimation residual against ε.
    Scaling {
        /// Observer under test: cascaded-ehgo or standard-ehgo.
        #[arg(long, default_value = "cascaded-ehgo")]
        controller: ControllerKind,
        /// Comma-separated ε values (at least three distinct).
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EPSILONS)]
        epsilon: Vec<f64>,
        /// Optional output directory for scaling.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the JSON schema of scenario files.
    Schema,
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            scenario,
            out,
            controller,
            seed,
        } => {
            let art = cmd_run(&scenario, &out, controller, seed)?;
            println!(
                "{} records -> {}, {}",
                art.log.records.len(),
                art.trajectory.display(),
                art.summary.display()
            );
        }
        Command::Compare {
            scenario,
            out,
            controller,
            seed,
        } => {
            let art = cmd_compare(&scenario, &out, &controller, seed)?;
            print!("{}", art.report.to_text());
        }
        Command::Scaling {
            controller,
            epsilon,
            out,
        } => {
            let kind = match controller {
                ControllerKind::CascadedEhgo => ObserverKind::Cascaded,
                ControllerKind::StandardEhgo => ObserverKind::Standard,
                other => {
                    return Err(Error::Usage(format!(
                        "scaling needs an observer-based controller, got '{other}'"
                    )))
                }
            };
            let report = cmd_scaling(kind, &epsilon, out.as_deref())?;
            print!("{}", report.to_text());
        }
        Command::Schema => println!("{}", Scenario::json_schema()),
    }
    Ok(())
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
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
