use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cech_cli::commands;
use cech_cli::error::CliError;
use cech_cli::report::Report;
use cech_cli::scene::{read_scene, Scene};
use clap::{Parser, Subcommand};

/// Čech cohomology of sheaves on finite covers, with certificates.
///
/// Exit status: 0 when every claim is verified, 1 when a claim is refuted,
/// 2 on malformed input.
#[derive(Parser)]
#[command(name = "cech", version)]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the nerve of the cover.
    Nerve {
        #[arg(long)]
        scene: PathBuf,
    },
    /// Check every sheaf, sequence and extension of the scene.
    Validate {
        #[arg(long)]
        scene: PathBuf,
    },
    /// Compute H^p of a sheaf, optionally classifying a cocycle.
    Cohomology {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        sheaf: String,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        cocycle: Option<String>,
    },
    /// Apply the connecting map of a short exact sequence to a cocycle.
    Connect {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long = "seq")]
        sequence: String,
        #[arg(long)]
        cocycle: String,
        /// Lifting choices from the scene to use instead of the defaults.
        #[arg(long)]
        lifts: Option<String>,
    },
    /// Apply the two-stage connecting map of a spliced extension.
    StagedConnect {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long = "ext")]
        extension: String,
        #[arg(long)]
        cocycle: String,
    },
    /// Compute the classes of descent data.
    DescentCheck {
        #[arg(long)]
        scene: PathBuf,
        /// Only this datum (default: all).
        #[arg(long)]
        datum: Option<String>,
    },
    /// Glue local complete-intersection tuples on a projective window.
    Lci {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        data: String,
    },
    /// The transposition cocycle on the standard window of P².
    P2Demo,
    /// Re-check the certificates of a report (or a single certificate).
    Verify {
        #[arg(long)]
        certificates: PathBuf,
        /// Scene to check against (default: the one embedded in the report).
        #[arg(long)]
        scene: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<Scene, CliError> {
    Scene::load(read_scene(path)?)
}

fn run(command: Command) -> Result<Report, CliError> {
    match command {
        Command::Nerve { scene } => commands::nerve(&load(&scene)?),
        Command::Validate { scene } => commands::validate(&load(&scene)?),
        Command::Cohomology {
            scene,
            sheaf,
            degree,
            cocycle,
        } => commands::cohomology(&load(&scene)?, &sheaf, degree, cocycle.as_deref()),
        Command::Connect {
            scene,
            sequence,
            cocycle,
            lifts,
        } => commands::connect(&load(&scene)?, &sequence, &cocycle, lifts.as_deref()),
        Command::StagedConnect {
            scene,
            extension,
            cocycle,
        } => commands::staged_connect(&load(&scene)?, &extension, &cocycle),
        Command::DescentCheck { scene, datum } => commands::descent_check(&load(&scene)?, datum.as_deref()),
        Command::Lci { scene, data } => commands::lci(&load(&scene)?, &data),
        Command::P2Demo => commands::p2_demo(),
        Command::Verify { certificates, scene } => commands::verify(&certificates, scene.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = report.render();
    match &cli.output {
        None => print!("{text}"),
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
    }
    ExitCode::from(report.exit_code())
}
