mod config;
mod plots;
mod run;

use clap::{Parser, Subcommand};

/// Batch diagnostics for perturbed Stark operators.
#[derive(Parser)]
#[command(name = "starkspec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the per-energy diagnostic survey over a λ-grid.
    Survey(run::SurveyArgs),
    /// Dump one Prüfer trajectory as CSV.
    Trajectory(run::TrajectoryArgs),
    /// Tabulate oscillatory tail integrals as CSV.
    Tails(run::TailsArgs),
    /// Exceptional-set diagnostics (windowed transform + maximal average).
    Sset(run::SsetArgs),
    /// List the built-in potential presets.
    Presets,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Survey(args) => run::cmd_survey(args),
        Command::Trajectory(args) => run::cmd_trajectory(args),
        Command::Tails(args) => run::cmd_tails(args),
        Command::Sset(args) => run::cmd_sset(args),
        Command::Presets => run::cmd_presets(),
    };
    match code {
        Ok(c) => std::process::exit(c),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
