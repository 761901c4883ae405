use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lexistat::phylogeny::{DEFAULT_COLLECTION_YEAR, DEFAULT_ROOT_YEAR, DEFAULT_SCALE};
use lexistat::wordlist::{DEFAULT_COVERAGE_FLOOR, DEFAULT_MEANINGS};
use lexistat::ErrorKind;

mod commands;
mod output;

/// Lexical distances between Swadesh lists, UPGMA dating, and dialect
/// analyses.
///
/// Matrix arguments accept a file (appendix, csv or json layout, picked by
/// --format or the file extension) or `@fixture` for the embedded
/// 23-dialect Malagasy table.
#[derive(Debug, Parser)]
#[command(name = "lexistat", version)]
pub struct Cli {
    /// Number of meanings M in each list.
    #[arg(long, global = true, default_value_t = DEFAULT_MEANINGS)]
    meanings: u32,

    /// Output format (csv, json, appendix or newick, depending on the command).
    #[arg(long, global = true)]
    format: Option<String>,

    /// Suppress informational messages on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pairwise lexical distance matrix from a directory of .tsv word lists.
    Distances {
        lists_dir: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Calibrated UPGMA tree from a distance matrix.
    Tree {
        matrix: String,
        #[arg(long, default_value_t = DEFAULT_ROOT_YEAR, allow_negative_numbers = true)]
        root_year: i32,
        #[arg(long, default_value_t = DEFAULT_COLLECTION_YEAR)]
        collection_year: i32,
        #[arg(long, default_value_t = DEFAULT_SCALE)]
        scale: f64,
        /// Newick file; a .json tree dump is written alongside.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Mean distance of each language to all the others, ranked.
    Averages {
        matrix: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Distances of each dialect to two reference languages and their ratio.
    CompareRef {
        lists_dir: PathBuf,
        #[arg(long)]
        ref1: PathBuf,
        #[arg(long)]
        ref2: PathBuf,
        /// Display name of reference 1 in column headers.
        #[arg(long, default_value = "Malay")]
        ref1_name: String,
        #[arg(long, default_value = "Maanyan")]
        ref2_name: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Embedded reference data.
    Fixture {
        #[command(subcommand)]
        action: FixtureAction,
    },
    /// Check a directory of word lists for coverage gaps and duplicate ids.
    Validate {
        lists_dir: PathBuf,
        /// Coverage below this count produces a warning.
        #[arg(long, default_value_t = DEFAULT_COVERAGE_FLOOR)]
        min_coverage: usize,
        /// JSON report file.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum FixtureAction {
    /// Write the 23x23 reference matrix.
    Export {
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Write the dialect registry as CSV or JSON.
    Registry {
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

/// A failed run: exit status plus one or more diagnostics.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub messages: Vec<String>,
}

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_CONTRACT: u8 = 3;

impl CliError {
    pub fn validation(msg: impl fmt::Display) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            messages: vec![msg.to_string()],
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            messages: vec![format!("{}: {err}", path.display())],
        }
    }

    pub fn context(path: &Path, err: lexistat::Error) -> Self {
        let mut e = CliError::from(err);
        for m in &mut e.messages {
            *m = format!("{}: {m}", path.display());
        }
        e
    }
}

impl From<lexistat::Error> for CliError {
    fn from(err: lexistat::Error) -> Self {
        let code = match err.kind() {
            ErrorKind::Validation => EXIT_VALIDATION,
            ErrorKind::Io => EXIT_IO,
            ErrorKind::Contract => EXIT_CONTRACT,
        };
        CliError {
            code,
            messages: vec![err.to_string()],
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            for m in &e.messages {
                eprintln!("error: {m}");
            }
            ExitCode::from(e.code)
        }
    }
}
