mod config;
mod entropy;
mod functions;
mod tables;
mod translate;

use clap::{Parser, Subcommand};
use metrep::Error;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "metrep", version, about = "Experiments on representations of compact metric and Banach spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Packing and covering numbers of a seeded sample against its dialog classes.
    #[command(after_long_help = entropy::ENTROPY_COLUMNS)]
    Entropy(entropy::EntropyArgs),
    /// Dialog classes of the equality program on a seeded sample.
    #[command(name = "dialog-cover", after_long_help = entropy::DIALOG_COLUMNS)]
    DialogCover(entropy::EntropyArgs),
    /// Translates a name between representations and prints its trace.
    #[command(after_long_help = translate::HELP)]
    Translate(translate::TranslateArgs),
    /// Basis evaluation tables.
    #[command(after_long_help = tables::EVAL_COLUMNS)]
    Eval(tables::EvalArgs),
    /// Bound tables.
    #[command(after_long_help = tables::BOUNDS_COLUMNS)]
    Bounds(tables::BoundsArgs),
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Contract(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ContractViolation(_) | Error::BudgetExhausted(_) | Error::BoundViolation { .. } => {
                Failure::Contract(e.to_string())
            }
            _ => Failure::Config(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Entropy(a) => entropy::cmd_entropy(&a),
        Command::DialogCover(a) => entropy::cmd_dialog_cover(&a),
        Command::Translate(a) => translate::cmd_translate(&a),
        Command::Eval(a) => tables::cmd_eval(&a),
        Command::Bounds(a) => tables::cmd_bounds(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("metrep: config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Contract(m)) => {
            eprintln!("metrep: {m}");
            ExitCode::from(3)
        }
    }
}
