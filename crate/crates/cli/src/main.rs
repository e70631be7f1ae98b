mod bench;
mod eval;
mod gen;
mod output;
mod select;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "uniprot", version, about = "Uniform-weight prototype selection with partial optimal transport")]
struct Cli {
    /// Worker threads for candidate scoring and trials (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
enum Command {
    /// Generate a balanced source and a long-tailed target from Gaussian classes.
    Gen(gen::GenArgs),
    /// Select prototypes from a source set for a target set.
    Select(select::SelectArgs),
    /// Score a selection with a 1-NN classifier and report weight skew.
    Eval(eval::EvalArgs),
    /// Run randomized property checks against brute-force optima.
    Verify(verify::VerifyArgs),
    /// Gain-ratio traces and scaling timings.
    Bench(bench::BenchArgs),
}

/// Where results go.
#[derive(Args, Debug, Clone, Serialize)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long, short = 'o', default_value = ".")]
    out: PathBuf,
    /// Format of the tabular results next to the JSON.
    #[arg(long, value_enum, default_value_t = output::Format::Json)]
    format: output::Format,
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let manifest = output::Manifest::new(&cli.command, cli.threads);
    match &cli.command {
        Command::Gen(args) => gen::run(args, manifest),
        Command::Select(args) => select::run(args, manifest),
        Command::Eval(args) => eval::run(args, manifest),
        Command::Verify(args) => verify::run(args, manifest),
        Command::Bench(args) => bench::run(args, manifest),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = err
                .downcast_ref::<uniprot::Error>()
                .map_or(1, uniprot::Error::code);
            ExitCode::from(code as u8)
        }
    }
}
