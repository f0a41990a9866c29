use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use guillotine::Limits;
use guillotine_cli::builtin::{self, Builtin};
use guillotine_cli::model::parse_offsets;
use guillotine_cli::{commands, ModelFile, Status};

/// Partition functions, boundary weights and Gibbs-measure checks for
/// lattice Markov processes on rectangles.
#[derive(Parser)]
#[command(name = "guillotine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// JSON model document
    #[arg(long, value_name = "PATH", conflicts_with = "builtin")]
    model: Option<PathBuf>,
    /// Generate an exactly solvable model instead of reading one
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    /// First matrix of the built-in model: `ones<n>`, `random<n>` or rows like `1,2;3,4`
    #[arg(long, default_value = "ones2")]
    a: String,
    /// Second matrix of the built-in model
    #[arg(long, default_value = "ones2")]
    b: String,
    /// Seed for `random<n>` matrices
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest number of edges any enumeration may visit
    #[arg(long, default_value_t = Limits::default().max_edges)]
    max_edges: usize,
}

impl ModelArgs {
    fn load(&self) -> Result<ModelFile> {
        match (&self.model, self.builtin) {
            (Some(path), _) => ModelFile::read(path),
            (None, Some(kind)) => builtin::build(kind, &self.a, &self.b, self.seed),
            (None, None) => bail!("either --model or --builtin is required"),
        }
    }

    fn limits(&self) -> Limits {
        Limits { max_edges: self.max_edges, ..Limits::default() }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Boundary-weighted partition function of a p×q rectangle
    Partition {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        /// Also enumerate every configuration and report the deviation
        #[arg(long)]
        bruteforce: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Total-variation distance between the marginal of the outer law and the inner law
    CheckConsistency {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        /// Widths removed from the W, E, S, N sides
        #[arg(long, value_name = "n1,n2,m1,m2", value_parser = parse_offsets)]
        offsets: Option<guillotine::Offsets>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Residuals of the half-strip and corner equations and the full-plane check
    EigenVerify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 3)]
        p_max: usize,
        #[arg(long, default_value_t = 3)]
        q_max: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// One- and two-point functions along a horizontal line
    Correlate {
        #[command(flatten)]
        model: ModelArgs,
        /// Segment length L
        #[arg(long = "len", default_value_t = 2)]
        len: usize,
        #[arg(long, default_value_t = 0)]
        u: usize,
        #[arg(long, default_value_t = 0)]
        v: usize,
        /// Cross-check against the middle row of an L×2 rectangle
        #[arg(long)]
        bruteforce: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Write the model document (e.g. a generated built-in) as JSON
    WriteModel {
        #[command(flatten)]
        model: ModelArgs,
        /// Output path; stdout when absent
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<Status> {
    match cli.command {
        Command::Partition { model, p, q, bruteforce, tol } => {
            commands::partition(&model.load()?, p, q, bruteforce, tol, &model.limits(), out)
        }
        Command::CheckConsistency { model, p, q, offsets, tol } => {
            commands::check(&model.load()?, p, q, offsets, tol, &model.limits(), out)
        }
        Command::EigenVerify { model, p_max, q_max, tol } => {
            commands::eigen_verify(&model.load()?, p_max, q_max, tol, &model.limits(), out)
        }
        Command::Correlate { model, len, u, v, bruteforce, tol } => {
            commands::correlate(&model.load()?, len, u, v, bruteforce, tol, &model.limits(), out)
        }
        Command::WriteModel { model, out: path } => {
            let m = model.load()?;
            match path {
                Some(path) => m.write(&path)?,
                None => out.write_all(m.to_json().as_bytes())?,
            }
            Ok(Status::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
