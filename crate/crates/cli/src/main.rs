//! `qii`: loops, inequalities, model bands and bound chains from the shell.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 when an inequality is
//! violated or a computation fails.

mod commands;
mod run;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::Value;

use commands::{apps, figure1, loop_io, models, search, verify};
use run::{load_config, overlay, CliError, CliResult, Format, Run};

#[derive(Parser, Debug)]
#[command(name = "qii", version, about, long_about = None)]
struct Cli {
    /// JSON file with the same keys as the flags; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run directory for tables, plots and the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Table format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check both inequalities on random Fourier loops.
    Verify(verify::VerifyArgs),
    /// Isoperimetric quotients of regular polygons, plane and sphere.
    Figure1(figure1::Figure1Args),
    /// Distance and Berry phase of a model band loop.
    Models(models::ModelsArgs),
    /// Physical bound chains.
    Apps(apps::AppsArgs),
    /// Search for loops with a negative strong-inequality margin.
    Search(search::SearchArgs),
    /// Import or export loop CSV files.
    LoopIo(loop_io::LoopIoArgs),
}

fn setup_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("QII_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("QII_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the worker pool: {e}")))
}

fn execute(cli: Cli) -> CliResult<()> {
    setup_threads()?;
    let file = load_config(cli.config.as_deref())?;
    let out_dir = match (cli.out, file.get("out")) {
        (Some(p), _) => p,
        (None, Some(Value::String(s))) => PathBuf::from(s),
        (None, Some(_)) => return Err(CliError::Usage("config key \"out\" must be a string".into())),
        (None, None) => PathBuf::from("qii-out"),
    };
    let format = match (cli.format, file.get("format")) {
        (Some(f), _) => f,
        (None, Some(v)) => serde_json::from_value(v.clone())
            .map_err(|_| CliError::Usage("config key \"format\" must be \"csv\" or \"json\"".into()))?,
        (None, None) => Format::Csv,
    };
    // Validate the merged arguments before touching the file system.
    macro_rules! merged {
        ($a:expr) => {
            overlay($a, &file)?
        };
    }
    match cli.command {
        Command::Verify(a) => {
            let a = merged!(&a);
            a.resolve()?;
            verify::run(&a, &Run::create(out_dir, format)?)
        }
        Command::Figure1(a) => {
            let a = merged!(&a);
            a.resolve()?;
            figure1::run(&a, &Run::create(out_dir, format)?)
        }
        Command::Models(a) => models::run(&merged!(&a), &Run::create(out_dir, format)?),
        Command::Apps(a) => apps::run(&merged!(&a), &Run::create(out_dir, format)?),
        Command::Search(a) => {
            let a = merged!(&a);
            a.resolve()?;
            search::run(&a, &Run::create(out_dir, format)?)
        }
        Command::LoopIo(a) => loop_io::run(&merged!(&a), &Run::create(out_dir, format)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qii: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
