use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twopulse_cli::config::SolverKind;
use twopulse_cli::{parse_config, print_area_curves, run_experiment, CliError};

/// Coherent two-pulse propagation in three-level lambda media: full
/// Maxwell-Bloch marching, the reduced far-detuned model, and closed-form
/// reference solutions, with CSV/SVG artifacts.
#[derive(Parser)]
#[command(name = "twopulse", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Experiment configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's out_dir).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of snapshot stations (overrides the config).
    #[arg(long)]
    stations: Option<usize>,
    /// Suppress progress output.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// March the full three-level system through the medium.
    Simulate(CommonArgs),
    /// Evaluate the closed-form solution on the grid (oracle mode).
    Analytic(CommonArgs),
    /// March the reduced two-level (far-detuned) system.
    Adiabatic(CommonArgs),
    /// Run the desk-scale verification suite and print a pass/fail table.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
    /// Print the closed-form pulse-area curves for the configured medium.
    Areas {
        #[arg(long)]
        config: PathBuf,
        /// Write the curves to DIR/areas_theory.csv instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: &PathBuf) -> Result<twopulse_cli::ExperimentConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
    parse_config(&text).map_err(CliError::Config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(), CliError> = match cli.command {
        Command::Simulate(args) => run_solver(args, SolverKind::Full),
        Command::Analytic(args) => run_solver(args, SolverKind::Analytic),
        Command::Adiabatic(args) => run_solver(args, SolverKind::Adiabatic),
        Command::Verify { config, quiet } => {
            let config = match load_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let checks = twopulse_cli::verify::verify(&config);
            let failed = checks.iter().filter(|c| !c.pass).count();
            for c in &checks {
                println!(
                    "{}\t{}\t{}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if !quiet {
                eprintln!("{} of {} checks passed", checks.len() - failed, checks.len());
            }
            if failed > 0 {
                Err(CliError::Verification { failed, total: checks.len() })
            } else {
                Ok(())
            }
        }
        Command::Areas { config, out } => (|| {
            let config = load_config(&config)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(CliError::Io)?;
                    let mut file = fs::File::create(dir.join("areas_theory.csv"))
                        .map_err(CliError::Io)?;
                    print_area_curves(&config, &mut file)
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    print_area_curves(&config, &mut lock)
                }
            }
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn run_solver(args: CommonArgs, solver: SolverKind) -> Result<(), CliError> {
    let mut config = load_config(&args.config)?;
    config.solver = solver;
    if solver == SolverKind::Adiabatic {
        // Re-check the constraints the parser enforces for configs that
        // name the adiabatic solver explicitly.
        let mut violations = Vec::new();
        if config.delta_bar == 0.0 {
            violations.push("the adiabatic solver requires delta_bar != 0".into());
        }
        if !matches!(config.line, twopulse::LineShape::Sharp) {
            violations.push("the adiabatic solver supports only the sharp line".into());
        }
        if !violations.is_empty() {
            return Err(CliError::Config(violations));
        }
    }
    run_experiment(&config, args.out.as_deref(), args.stations, args.quiet)?;
    Ok(())
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}
