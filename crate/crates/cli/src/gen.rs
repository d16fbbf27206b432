use std::path::PathBuf;

use clap::{Args, ValueEnum};

use twvrp_core::binpack::BinPackingInstance;
use twvrp_core::reductions::{from_binpacking, from_ntdm, from_trianglepacking, random_instance, NtdmMode, RandomSpec, UNARY_CAP};
use twvrp_core::{emit_instance, Graph, Variant};

use crate::{write_or_print, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Binpacking,
    Triangle,
    Ntdm,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Weights,
    Demands,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    from: Family,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Target variant (binpacking, random).
    #[arg(long)]
    variant: Option<String>,

    /// Item sizes, comma separated (binpacking).
    #[arg(long, value_delimiter = ',')]
    items: Vec<u64>,
    /// Bin capacity B (binpacking).
    #[arg(long)]
    capacity: Option<u64>,
    /// Number of bins k (binpacking).
    #[arg(long)]
    bins: Option<usize>,

    /// Vertex count (triangle).
    #[arg(long)]
    n: Option<usize>,
    /// Edges as u-v pairs, comma separated (triangle).
    #[arg(long, value_delimiter = ',')]
    edges: Vec<String>,
    /// Add the gas budget g = 3 (triangle).
    #[arg(long)]
    gas: bool,

    #[arg(long, value_delimiter = ',')]
    x: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    y: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    z: Vec<u64>,
    /// Target sum of each triple (ntdm).
    #[arg(long)]
    b: Option<u64>,
    /// Where the numbers go (ntdm).
    #[arg(long, value_enum, default_value = "weights")]
    mode: Mode,

    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 7)]
    max_n: usize,
    #[arg(long, default_value_t = 10)]
    max_edges: usize,
    /// Keep the random graph at treewidth at most 2.
    #[arg(long)]
    tw2: bool,
}

fn variant(args: &GenArgs, default: Variant) -> Result<Variant, Failure> {
    match &args.variant {
        Some(s) => Variant::parse(s).ok_or_else(|| Failure::input(format!("unknown variant {s:?}"))),
        None => Ok(default),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::input(format!("--{flag} is required")))
}

fn parse_edges(n: usize, edges: &[String]) -> Result<Graph, Failure> {
    let mut g = Graph::new(n);
    for e in edges {
        let (u, v) = e.split_once('-').ok_or_else(|| Failure::input(format!("edge {e:?}: expected u-v")))?;
        let parse = |s: &str| s.trim().parse::<usize>().ok().filter(|&x| x < n);
        match (parse(u), parse(v)) {
            (Some(u), Some(v)) if u != v => {
                g.add_edge(u, v, 1);
            }
            _ => return Err(Failure::input(format!("edge {e:?}: endpoints must be distinct vertices below {n}"))),
        }
    }
    Ok(g)
}

pub fn run(args: &GenArgs) -> Result<u8, Failure> {
    let inst = match args.from {
        Family::Binpacking => {
            let bp = BinPackingInstance { sizes: args.items.clone(), capacity: need(args.capacity, "capacity")?, bins: need(args.bins, "bins")? };
            from_binpacking(&bp, variant(args, Variant::LoadCvrp)?, UNARY_CAP).map_err(Failure::input)?.instance
        }
        Family::Triangle => {
            let g = parse_edges(need(args.n, "n")?, &args.edges)?;
            from_trianglepacking(&g, args.gas).map_err(Failure::input)?
        }
        Family::Ntdm => {
            let mode = match args.mode {
                Mode::Weights => NtdmMode::Weights,
                Mode::Demands => NtdmMode::Demands,
            };
            from_ntdm(&args.x, &args.y, &args.z, need(args.b, "b")?, mode).map_err(Failure::input)?
        }
        Family::Random => {
            let spec = RandomSpec {
                vertices: (1, args.max_n.max(1)),
                max_edges: args.max_edges,
                variant: variant(args, Variant::Vrp)?,
                treewidth_two: args.tw2,
                ..RandomSpec::default()
            };
            random_instance(&spec, args.seed)
        }
    };
    write_or_print(args.out.as_deref(), &emit_instance(&inst))?;
    Ok(0)
}
