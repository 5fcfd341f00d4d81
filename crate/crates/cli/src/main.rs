use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gramcov_cli::{
    cmd_coverage, cmd_instrument, cmd_reduce, cmd_run, cmd_suspects, cmd_validate, Format, Level, ReportOptions,
    Style, DEFAULT_CAP,
};
use gramcov_core::analysis::SuspicionParams;
use gramcov_core::instrument::InstrumentOptions;

#[derive(Parser)]
#[command(name = "gramcov", version, about = "Disjunct coverage analysis for unification grammars")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Equivalence,
    Similarity,
}

#[derive(clap::Args)]
struct Report {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Exit with status 1 when the analysis finds something.
    #[arg(long)]
    strict: bool,
    /// Instrumented grammar the database must have been produced with.
    #[arg(long)]
    grammar: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Add a marker to every disjunct and write the grammar plus its inventory.
    Instrument {
        grammar: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
        /// Inventory path (default: the output path with extension `inv`).
        #[arg(long)]
        inventory: Option<PathBuf>,
        /// Treat each lexicon entry as a disjunct of its category.
        #[arg(long)]
        include_lexicon: bool,
    },
    /// Parse every suite case with an instrumented grammar and record disjunct usage.
    Run {
        grammar: PathBuf,
        suite: PathBuf,
        #[arg(short = 'o', long)]
        output: PathBuf,
        #[arg(long)]
        inventory: Option<PathBuf>,
        /// Maximum readings per sentence.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Report disjunct coverage of a usage database.
    Coverage {
        db: PathBuf,
        #[command(flatten)]
        report: Report,
    },
    /// Drop redundant cases and optionally write the reduced suite.
    Reduce {
        db: PathBuf,
        #[arg(long, value_enum, default_value = "similarity")]
        level: LevelArg,
        /// Where to write the reduced suite.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        report: Report,
    },
    /// Rank disjuncts used by parseable ungrammatical cases.
    Suspects {
        db: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[command(flatten)]
        report: Report,
    },
    /// Check a grammar for unreachable categories, missing rules and unary cycles.
    Validate {
        grammar: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        #[arg(long)]
        strict: bool,
    },
}

fn style() -> Style {
    let disabled = std::env::var_os("GRAMCOV_NO_COLOR").is_some_and(|v| !v.is_empty());
    Style {
        color: !disabled && std::io::stdout().is_terminal(),
    }
}

fn options(format: FormatArg, strict: bool) -> ReportOptions {
    ReportOptions {
        format: match format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
        strict,
        style: style(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Instrument {
            grammar,
            output,
            inventory,
            include_lexicon,
        } => cmd_instrument(&grammar, &output, inventory.as_deref(), InstrumentOptions { include_lexicon }),
        Command::Run {
            grammar,
            suite,
            output,
            inventory,
            cap,
        } => cmd_run(&grammar, inventory.as_deref(), &suite, &output, cap),
        Command::Coverage { db, report } => {
            cmd_coverage(&db, report.grammar.as_deref(), options(report.format, report.strict))
        }
        Command::Reduce {
            db,
            level,
            output,
            report,
        } => {
            let level = match level {
                LevelArg::Equivalence => Level::Equivalence,
                LevelArg::Similarity => Level::Similarity,
            };
            cmd_reduce(
                &db,
                report.grammar.as_deref(),
                level,
                output.as_deref(),
                options(report.format, report.strict),
            )
        }
        Command::Suspects {
            db,
            alpha,
            tau,
            report,
        } => cmd_suspects(
            &db,
            report.grammar.as_deref(),
            SuspicionParams { alpha, tau },
            options(report.format, report.strict),
        ),
        Command::Validate {
            grammar,
            format,
            strict,
        } => cmd_validate(&grammar, options(format, strict)),
    };
    match result {
        Ok(out) => {
            eprint!("{}", out.stderr);
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(out.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
