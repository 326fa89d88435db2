//! `painleve`: reproducible drivers for the maps, recurrences, symmetry checks,
//! ODE integrations and blow-up resolutions of `painleve-core`.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime diagnostic.

mod commands;
mod config;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Map;

use commands::{ContourArgs, IterateArgs, OdeArgs, OrthoArgs, Report, ResolveArgs, ThreadArgs, WeylArgs};
use config::{known_keys, layer, load_file, reject_unknown, CliError, GlobalArgs};

#[derive(Parser, Debug)]
#[command(name = "painleve", version, about = "Discrete and continuous Painlevé computations")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterate one of the discrete maps from a seed pair.
    Iterate(IterateArgs),
    /// Sample the autonomous invariant on an exact grid.
    Contours(ContourArgs),
    /// Contour grid together with a q-map orbit threading it.
    Thread(ThreadArgs),
    /// Recurrence coefficients of the quartic weight and their recurrence residuals.
    Ortho(OrthoArgs),
    /// Affine Weyl group checks.
    Weyl {
        #[command(subcommand)]
        action: WeylAction,
    },
    /// Integrate a Painlevé equation or the three-field system.
    Ode(OdeArgs),
    /// Resolve the base points of a pencil by blow-ups.
    Resolve(ResolveArgs),
}

#[derive(Subcommand, Debug)]
enum WeylAction {
    /// Check the defining relations and the translation on random exact states.
    Check(WeylArgs),
}

/// Layers global and command flags over the config file, then runs `f`.
/// Returns the report together with the layered output path.
fn with_config<T, F>(global: &GlobalArgs, args: &T, f: F) -> Result<(Report, Option<PathBuf>), CliError>
where
    T: Serialize + DeserializeOwned + Default,
    F: FnOnce(GlobalArgs, T) -> Result<Report, CliError>,
{
    let file = match &global.config {
        Some(path) => load_file(path)?,
        None => Map::new(),
    };
    let known: BTreeSet<String> = known_keys::<GlobalArgs>().into_iter().chain(known_keys::<T>()).collect();
    reject_unknown(&file, &known)?;
    let g: GlobalArgs = layer(global, &file)?;
    let a: T = layer(args, &file)?;
    let out = g.out.clone();
    Ok((f(g, a)?, out))
}

fn run(cli: &Cli) -> Result<(Report, Option<PathBuf>), CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Iterate(a) => with_config(g, a, commands::iterate),
        Command::Contours(a) => with_config(g, a, commands::contours),
        Command::Thread(a) => with_config(g, a, commands::thread),
        Command::Ortho(a) => with_config(g, a, commands::ortho),
        Command::Weyl { action: WeylAction::Check(a) } => with_config(g, a, commands::weyl_check),
        Command::Ode(a) => with_config(g, a, commands::ode),
        Command::Resolve(a) => with_config(g, a, commands::resolve),
    }
}

fn emit(report: &Report, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, &report.body).map_err(|e| CliError::field("out", format!("{}: {e}", path.display()))),
        None => {
            print!("{}", report.body);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = run(&cli).and_then(|(report, out)| emit(&report, out.as_deref()).map(|_| report));
    match outcome {
        Ok(report) => {
            if let Some(note) = &report.note {
                eprintln!("{note}");
            }
            ExitCode::from(report.code as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
