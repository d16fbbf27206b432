//! `twvrp`: solve, verify, generate and decompose routing instances.
//!
//! Exit codes: 0 success (including an infeasible optimum), 1 infeasible routing
//! under `verify`, 2 malformed input or an algorithm that does not apply, 4 refused
//! by the scale guard.

mod gen;
mod solve;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use twvrp_core::decomposition::{emit_td, heuristic_decompose};
use twvrp_core::{parse_instance, routing_from_map, verify_routing_with, VerifyOptions, VrpInstance};

#[derive(Parser)]
#[command(name = "twvrp", version, about = "Exact vehicle routing on graphs of bounded treewidth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an optimal routing (or decide a weight bound).
    Solve(SolveArgs),
    /// Check a routing against an instance.
    Verify(VerifyArgs),
    /// Write a generated instance.
    Gen(gen::GenArgs),
    /// Write a tree decomposition of an instance's graph.
    Decompose(DecomposeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Auto,
    TwDp,
    Clients,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    /// A plain bin-packing document: {"items": [...], "B": .., "k": ..}.
    Binpacking,
}

#[derive(Args)]
pub struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    algorithm: Algorithm,
    /// Tree decomposition in `.td` format, for the treewidth DPs.
    #[arg(long)]
    td: Option<PathBuf>,
    /// Answer whether a routing of weight at most R exists.
    #[arg(long, value_name = "R")]
    decide: Option<u64>,
    /// Write the result document here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Read the instance file as a different problem.
    #[arg(long, value_enum)]
    variant: Option<InputKind>,
    /// A walk that never leaves its depot does not visit it.
    #[arg(long)]
    strict_zero_length: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Routing document; solve result documents are accepted too.
    #[arg(long)]
    routing: PathBuf,
    #[arg(long)]
    strict_zero_length: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl fmt::Display) -> Failure {
        Failure { code: 2, message: message.to_string() }
    }

    pub fn guard(message: impl fmt::Display) -> Failure {
        Failure { code: 4, message: message.to_string() }
    }
}

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure { code: 1, message: format!("{}: {e}", p.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn load_instance(path: &Path) -> Result<VrpInstance, Failure> {
    parse_instance(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let inst = load_instance(&args.instance)?;
    let text = read(&args.routing)?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: malformed document: {e}", args.routing.display())))?;
    let map = doc.as_object().ok_or_else(|| Failure::input(format!("{}: expected an object", args.routing.display())))?;
    let routing = routing_from_map(map).map_err(|e| Failure::input(format!("{}: {e}", args.routing.display())))?;
    let report = verify_routing_with(&inst, &routing, &VerifyOptions { zero_length_walks_visit: !args.strict_zero_length });
    if report.feasible {
        println!("feasible, weight {}", report.total_weight);
        Ok(0)
    } else {
        println!("infeasible");
        for v in &report.violations {
            println!("  {v}");
        }
        Ok(1)
    }
}

fn decompose(args: &DecomposeArgs) -> Result<u8, Failure> {
    let inst = load_instance(&args.instance)?;
    write_or_print(args.out.as_deref(), &emit_td(&heuristic_decompose(&inst.graph)))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(a) => solve::run(a),
        Command::Verify(a) => verify(a),
        Command::Gen(a) => gen::run(a),
        Command::Decompose(a) => decompose(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
