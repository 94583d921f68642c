//! `objcmp`: command-line front end for the object comparison calculus.

mod commands;
mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use objcmp::{ExprError, GraphError, IdealError, RingError, SpectralError, WeightsError};

use report::Format;

#[derive(Parser)]
#[command(name = "objcmp", version, about = "Compare objects with Boolean ring formulas, committors and spectral sorting")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Decimal places for real numbers.
    #[arg(long, global = true, default_value_t = 5)]
    precision: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boolean ring operations.
    #[command(subcommand)]
    Ring(RingCommand),
    /// Reduce assumptions to a principal ideal and list relevant characteristics.
    Extract {
        #[arg(long)]
        generators: String,
        /// One relation per line: `EXPR = 0` or `EXPR >= EXPR`.
        #[arg(long)]
        relations: String,
        /// Also list every element of the ideal.
        #[arg(long)]
        list_ideal: bool,
    },
    /// Committor functions of a comparison graph.
    Committor {
        /// Build the order graph of this ring.
        #[arg(long, conflicts_with = "graph", required_unless_present = "graph")]
        generators: Option<String>,
        /// JSON graph file `{"vertices": [...], "edges": [[from, to], ...]}`.
        #[arg(long)]
        graph: Option<String>,
        /// Print committors as exact fractions.
        #[arg(long)]
        exact: bool,
    },
    /// Sort objects from a rating matrix.
    Sort {
        /// CSV with a header row of labels and one labelled row per object.
        #[arg(long)]
        ratings: String,
    },
    /// Learn characteristic weights from coordinates.
    Weights {
        /// CSV of 0/1 characteristic bits, one labelled row per object.
        #[arg(long)]
        coding: String,
        /// CSV of object coordinates, one labelled row per object.
        #[arg(long)]
        coords: String,
        #[arg(long, default_value_t = objcmp::weights::DEFAULT_SCALE)]
        scale: f64,
    },
}

#[derive(Subcommand)]
enum RingCommand {
    /// Evaluate an expression.
    Eval {
        #[arg(long)]
        generators: String,
        expression: String,
        /// `NAME=EXPR`, or `NAME=@K` for element K in normal-form numbering.
        #[arg(long = "bind")]
        bindings: Vec<String>,
    },
    /// Operation tables of a small ring.
    Table {
        #[arg(long)]
        generators: String,
        #[arg(long, value_enum, default_value_t = Numbering::Normal)]
        numbering: Numbering,
    },
}

/// Element numbering for ring tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Numbering {
    /// By number of monomials, then monomial order.
    Normal,
    /// By atom bitmask.
    Mask,
}

impl Numbering {
    pub fn name(self) -> &'static str {
        match self {
            Numbering::Normal => "normal",
            Numbering::Mask => "mask",
        }
    }
}

/// Exit status 2 for bad input, 3 for violated model assumptions.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Model(String),
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure::Input(message.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Model(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Model(m) => m,
        }
    }
}

macro_rules! input_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::Input(e.to_string())
            }
        }
    )*};
}

input_errors!(RingError, ExprError, IdealError, GraphError, WeightsError);

impl From<SpectralError> for Failure {
    fn from(e: SpectralError) -> Self {
        if e.is_model_violation() {
            Failure::Model(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn run(cli: &Cli) -> Result<report::Report, Failure> {
    let mut report = match &cli.command {
        Command::Ring(RingCommand::Eval { generators, expression, bindings }) => commands::ring_eval(generators, expression, bindings),
        Command::Ring(RingCommand::Table { generators, numbering }) => commands::ring_table(generators, *numbering),
        Command::Extract { generators, relations, list_ideal } => commands::extract(generators, relations, *list_ideal),
        Command::Committor { generators, graph, exact } => commands::committor(generators.as_deref(), graph.as_deref(), *exact),
        Command::Sort { ratings } => commands::sort(ratings),
        Command::Weights { coding, coords, scale } => commands::weights(coding, coords, *scale),
    }?;
    report.config("precision", cli.precision);
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.render(cli.format, cli.precision).as_bytes()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
