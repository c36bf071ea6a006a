use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod io;

/// Exactly verified equilateral sets in subspaces of l-infinity and related norms.
///
/// Exit status: 0 ok, 2 invalid input, 3 verification failure, 4 enumeration
/// budget exceeded, 5 fixed-point non-convergence, 6 sandwich violation.
#[derive(Parser, Debug)]
#[command(name = "equilat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an equilateral set in ker A from a subspace file.
    Construct(ConstructArgs),
    /// Equilateral set for the norm of an origin-symmetric polytope.
    Polytope(PolytopeArgs),
    /// Fixed-point equilateral set in a norm close to l-infinity on ker A.
    Perturb(PerturbArgs),
    /// Table of the lower bounds for given n and k.
    Bounds(BoundsArgs),
    /// Re-check a certificate file.
    Verify(VerifyArgs),
    /// Seeded random instances.
    Gen(GenArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Budget {
    /// Largest number of vectors an enumeration may visit.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Largest candidate count searched exhaustively by pivot selection.
    #[arg(long)]
    pub exhaustive_cap: Option<u64>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    Auto,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// Subspace file `{ "k", "n", "A" }`.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub bound: BoundArg,
    /// Block / group size, or `auto` for the best for the chosen bound.
    #[arg(long, default_value = "auto")]
    pub ell: String,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PolytopeArgs {
    /// Polytope file `{ "d", "normals" }`.
    pub input: PathBuf,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PerturbArgs {
    /// Subspace file.
    pub input: PathBuf,
    /// Norm file `{ "kind", "c", "params" }`.
    pub norm: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long)]
    pub exhaustive_cap: Option<u64>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub certificate: PathBuf,
    /// Subspace the points must lie in.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Spec,
    Degenerate,
    Polytope,
    Norm,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 6)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, default_value_t = 5)]
    pub f: usize,
    /// Sandwich constant for `norm`.
    #[arg(long, default_value = "1/5")]
    pub c: String,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => commands::construct(a),
        Command::Polytope(a) => commands::polytope(a),
        Command::Perturb(a) => commands::perturb(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Verify(a) => commands::verify(a),
        Command::Gen(a) => commands::gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
