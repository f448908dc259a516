use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use pairtransfer::app::catalog;
use pairtransfer::app::document::{parse_aux, parse_matrix, PairDocument};
use pairtransfer::app::report::{digest, RunReport};
use pairtransfer::app::{cmd_catalog, run, Command, RunOptions, DEFAULT_ARITY, DEFAULT_TRUNCATION};
use pairtransfer::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Output {
    Json,
    Text,
}

/// Exact transferred A∞ structures for Lie pairs.
#[derive(Debug, Parser)]
#[command(name = "pairtransfer", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Filtration weight cap N [default: 3, or the document's value]
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Arity cap for m_n and Taylor coefficients [default: 4, or the document's value]
    #[arg(long, global = true)]
    max_arity: Option<usize>,
    /// Splitting matrix file (JSON rows or TOML `matrix = [...]`)
    #[arg(long, global = true)]
    splitting: Option<PathBuf>,
    /// Auxiliary connection file (JSON list of {x, y, z, coeff})
    #[arg(long, global = true)]
    aux_connection: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    output: Output,
    /// Worker threads; 0 picks the machine default
    #[arg(long, global = true, default_value_t = 0)]
    parallel: usize,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Check antisymmetry, Jacobi and subalgebra closure
    Validate { input: String },
    /// Verify the contractions and the perturbed data
    Contraction { input: String },
    /// Emit the transferred operations m_1 … m_K
    Transfer { input: String },
    /// Stasheff defects at arities 1 … K
    Stasheff { input: String },
    /// Cohomology classes and the induced product
    Cohomology { input: String },
    /// Compare the structures of the document's two choice sets
    Compare { input: String },
    /// List the catalog, or print one entry as a document
    Catalog { name: Option<String> },
}

fn read_input(input: &str) -> Result<PairDocument, Error> {
    if let Some(name) = input.strip_prefix("catalog:") {
        return catalog::lookup(name).ok_or_else(|| Error::InvalidInput(format!("no catalog entry {name:?}")));
    }
    let text = if input == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::InvalidInput(format!("stdin: {e}")))?
    } else {
        std::fs::read_to_string(input).map_err(|e| Error::InvalidInput(format!("{input}: {e}")))?
    };
    PairDocument::parse(&text)
}

fn read_file(p: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))
}

fn load(cli: &Cli, input: &str) -> Result<PairDocument, Error> {
    let mut doc = read_input(input)?;
    if let Some(p) = &cli.splitting {
        doc.splitting_matrix = Some(parse_matrix(&read_file(p)?)?);
    }
    if let Some(p) = &cli.aux_connection {
        doc.aux_connection = Some(parse_aux(&read_file(p)?)?);
    }
    doc.check_schema()?;
    Ok(doc)
}

fn emit(cli: &Cli, r: &RunReport) -> ExitCode {
    match cli.output {
        Output::Json => println!("{}", r.to_json()),
        Output::Text => print!("{}", r.to_text()),
    }
    ExitCode::from(r.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, input) = match &cli.command {
        Cmd::Validate { input } => (Command::Validate, input),
        Cmd::Contraction { input } => (Command::Contraction, input),
        Cmd::Transfer { input } => (Command::Transfer, input),
        Cmd::Stasheff { input } => (Command::Stasheff, input),
        Cmd::Cohomology { input } => (Command::Cohomology, input),
        Cmd::Compare { input } => (Command::Compare, input),
        Cmd::Catalog { name: None } => {
            for n in cmd_catalog() {
                println!("{n}");
            }
            return ExitCode::SUCCESS;
        }
        Cmd::Catalog { name: Some(n) } => {
            return match catalog::lookup(n) {
                Some(d) => {
                    println!("{}", d.canonical_json());
                    ExitCode::SUCCESS
                }
                None => {
                    eprintln!("no catalog entry {n:?}");
                    ExitCode::from(2)
                }
            };
        }
    };
    let doc = match load(&cli, input) {
        Ok(d) => d,
        Err(e) => {
            let mut r = RunReport::new(
                cmd.name(),
                None,
                digest(input),
                cli.truncation.unwrap_or(DEFAULT_TRUNCATION),
                cli.max_arity.unwrap_or(DEFAULT_ARITY),
            );
            r.fail_with(&e);
            return emit(&cli, &r);
        }
    };
    let opts = RunOptions::resolve(&doc, cli.truncation, cli.max_arity);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.parallel).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let report = pool.install(|| run(cmd, &doc, opts));
    if let Output::Text = cli.output {
        eprintln!("elapsed {:.3}s", start.elapsed().as_secs_f64());
    }
    emit(&cli, &report)
}
