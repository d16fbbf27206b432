//! Hardness gadgets (bin packing, triangle packing, numerical 3-dimensional
//! matching) and a seeded random instance generator.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{Graph, Routing, Variant, Vertex, VrpInstance, Walk};
use crate::binpack::BinPackingInstance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("variant {0} cannot encode this problem")]
    WrongVariant(Variant),
    #[error("item {0} has size 0")]
    ZeroSize(usize),
    #[error("total size {total} exceeds the unary cap {cap}")]
    TooLarge { total: u64, cap: u64 },
    #[error("vertex count {0} is not a multiple of 3")]
    NotTriples(usize),
    #[error("malformed matching instance: {0}")]
    Ntdm(String),
}

/// Default ceiling on the sum of item sizes, since the gadget is unary.
pub const UNARY_CAP: u64 = 10_000;

/// A bin-packing gadget: the routing instance plus the client path of every item.
#[derive(Clone, Debug)]
pub struct BinPackingGadget {
    pub instance: VrpInstance,
    /// Clients of item `i`, from the depot outwards.
    pub item_paths: Vec<Vec<Vertex>>,
    /// Edge indices along each item path, aligned with `item_paths`.
    pub item_edges: Vec<Vec<usize>>,
}

impl BinPackingGadget {
    /// One walk per nonempty bin, running out and back along each item path.
    pub fn routing_for(&self, bins: &[Vec<usize>]) -> Routing {
        let mut walks = Vec::new();
        let mut assignment = BTreeMap::new();
        for bin in bins.iter().filter(|b| !b.is_empty()) {
            let mut w = Walk::single(0);
            for &item in bin {
                let path = &self.item_paths[item];
                let edges = &self.item_edges[item];
                for (&v, &e) in path.iter().zip(edges) {
                    w.vertices.push(v);
                    w.edges.push(e);
                    assignment.insert(v, walks.len());
                }
                for i in (0..path.len()).rev() {
                    w.vertices.push(if i == 0 { 0 } else { path[i - 1] });
                    w.edges.push(edges[i]);
                }
            }
            walks.push(w);
        }
        Routing { walks, assignment }
    }

    /// Items grouped by the walk that serves their clients.
    pub fn bins_from(&self, routing: &Routing) -> Vec<Vec<usize>> {
        let mut bins: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, path) in self.item_paths.iter().enumerate() {
            if let Some(&w) = routing.assignment.get(&path[0]) {
                bins.entry(w).or_default().push(i);
            }
        }
        bins.into_values().collect()
    }
}

/// Depot 0 with a unit-weight path of `s_i` clients hanging off it per item.
/// Load variants get unit demands and `ell = B`, gas variants `g = 2B`; the
/// weight target is twice the edge count.
pub fn from_binpacking(bp: &BinPackingInstance, variant: Variant, unary_cap: u64) -> Result<BinPackingGadget, ReductionError> {
    if !variant.is_capacitated() {
        return Err(ReductionError::WrongVariant(variant));
    }
    if let Some(i) = bp.sizes.iter().position(|&s| s == 0) {
        return Err(ReductionError::ZeroSize(i));
    }
    let total: u64 = bp.sizes.iter().sum();
    if total > unary_cap {
        return Err(ReductionError::TooLarge { total, cap: unary_cap });
    }
    let mut g = Graph::new(1 + total as usize);
    let mut next = 1;
    let mut item_paths = Vec::new();
    let mut item_edges = Vec::new();
    for &s in &bp.sizes {
        let mut path = Vec::new();
        let mut edges = Vec::new();
        let mut prev = 0;
        for _ in 0..s {
            edges.push(g.add_edge(prev, next, 1));
            path.push(next);
            prev = next;
            next += 1;
        }
        item_paths.push(path);
        item_edges.push(edges);
    }
    let clients: Vec<Vertex> = (1..next).collect();
    let mut inst = VrpInstance::new(g, vec![0], clients.clone(), bp.bins, variant);
    if variant.has_load() {
        inst.load_cap = Some(bp.capacity);
        inst.demands = Some(clients.iter().map(|&c| (c, 1)).collect());
    }
    if variant.has_gas() {
        inst.gas_cap = Some(2 * bp.capacity);
    }
    inst.weight_bound = Some(2 * total);
    Ok(BinPackingGadget { instance: inst, item_paths, item_edges })
}

/// Every vertex a unit-demand depot-client with `ell = 3`, unit weights and
/// `k = |V|/3`; feasible at weight `|V|` exactly when `g` has a triangle packing.
/// With `gas` the variant becomes LoadGasCVRP with `g = 3`.
pub fn from_trianglepacking(g: &Graph, gas: bool) -> Result<VrpInstance, ReductionError> {
    let n = g.vertex_count;
    if n % 3 != 0 {
        return Err(ReductionError::NotTriples(n));
    }
    let mut unit = Graph::new(n);
    for e in g.edges.iter().filter(|e| !e.is_loop()) {
        unit.add_edge(e.u, e.v, 1);
    }
    let all: Vec<Vertex> = (0..n).collect();
    let variant = if gas { Variant::LoadGasCvrp } else { Variant::LoadCvrp };
    let mut inst = VrpInstance::new(unit, all.clone(), all.clone(), n / 3, variant);
    inst.load_cap = Some(3);
    inst.demands = Some(all.iter().map(|&v| (v, 1)).collect());
    if gas {
        inst.gas_cap = Some(3);
    }
    inst.weight_bound = Some(n as u64);
    Ok(inst)
}

/// Which budget carries the numbers of a matching instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NtdmMode {
    /// Numbers in edge weights, `ell = 3`, gas budget `2(64b + 21)`.
    Weights,
    /// Numbers in demands on a unit star, `ell = 64b + 21`, `g = 6`.
    Demands,
}

pub const NTDM_TAGS: [u64; 3] = [1, 4, 16];

/// Star around depot 0 with one leaf per number: leaves `1..=m` carry `x`,
/// `m+1..=2m` carry `y`, `2m+1..=3m` carry `z`. Each number `a` of the j-th set
/// is encoded as `64a + tag_j`, so a budget of `64b + 21` can only be met by one
/// number from each set.
pub fn from_ntdm(x: &[u64], y: &[u64], z: &[u64], b: u64, mode: NtdmMode) -> Result<VrpInstance, ReductionError> {
    let m = x.len();
    if y.len() != m || z.len() != m {
        return Err(ReductionError::Ntdm("sets differ in size".into()));
    }
    let sum: u64 = x.iter().chain(y).chain(z).sum();
    if sum != m as u64 * b {
        return Err(ReductionError::Ntdm(format!("numbers sum to {sum}, expected {}", m as u64 * b)));
    }
    let all: Vec<u64> = x.iter().chain(y).chain(z).copied().collect();
    if all.iter().collect::<BTreeSet<_>>().len() != all.len() {
        return Err(ReductionError::Ntdm("numbers are not distinct".into()));
    }
    let mut g = Graph::new(3 * m + 1);
    let mut demands = BTreeMap::new();
    for (j, set) in [x, y, z].into_iter().enumerate() {
        for (i, &a) in set.iter().enumerate() {
            let leaf = 1 + j * m + i;
            let encoded = 64 * a + NTDM_TAGS[j];
            match mode {
                NtdmMode::Weights => {
                    g.add_edge(0, leaf, encoded);
                    demands.insert(leaf, 1);
                }
                NtdmMode::Demands => {
                    g.add_edge(0, leaf, 1);
                    demands.insert(leaf, encoded);
                }
            }
        }
    }
    let mut inst = VrpInstance::new(g, vec![0], (1..=3 * m).collect(), m, Variant::LoadGasCvrp);
    inst.demands = Some(demands);
    let (ell, gas) = match mode {
        NtdmMode::Weights => (3, 2 * (64 * b + 21)),
        NtdmMode::Demands => (64 * b + 21, 6),
    };
    inst.load_cap = Some(ell);
    inst.gas_cap = Some(gas);
    inst.weight_bound = Some(m as u64 * gas);
    Ok(inst)
}

/// Walks `0 - x_i - 0 - y_j - 0 - z_l - 0` for each triple `(i, j, l)` of indices.
pub fn ntdm_routing(m: usize, triples: &[(usize, usize, usize)]) -> Routing {
    let mut walks = Vec::new();
    let mut assignment = BTreeMap::new();
    for (w, &(i, j, l)) in triples.iter().enumerate() {
        let mut walk = Walk::single(0);
        for leaf in [1 + i, 1 + m + j, 1 + 2 * m + l] {
            // edge index equals leaf - 1 by construction
            walk.vertices.extend([leaf, 0]);
            walk.edges.extend([leaf - 1, leaf - 1]);
            assignment.insert(leaf, w);
        }
        walks.push(walk);
    }
    Routing { walks, assignment }
}

/// Shape of a random instance. Ranges are inclusive.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub vertices: (usize, usize),
    pub max_edges: usize,
    pub weights: (u64, u64),
    pub vehicles: (usize, usize),
    pub variant: Variant,
    /// Keep the graph inside a random 2-tree, so its treewidth is at most 2.
    pub treewidth_two: bool,
    pub load_cap: (u64, u64),
    pub gas_cap: (u64, u64),
    pub max_demand: u64,
    /// Probability that a vertex is a client.
    pub client_density: f64,
    /// EVRP only: per-copy cap range.
    pub edge_cap: (u64, u64),
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            vertices: (2, 7),
            max_edges: 10,
            weights: (1, 5),
            vehicles: (1, 3),
            variant: Variant::Vrp,
            treewidth_two: false,
            load_cap: (1, 3),
            gas_cap: (2, 8),
            max_demand: 2,
            client_density: 0.5,
            edge_cap: (0, 3),
        }
    }
}

/// A connected random instance drawn deterministically from `seed`.
pub fn random_instance(spec: &RandomSpec, seed: u64) -> VrpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(spec.vertices.0..=spec.vertices.1.max(spec.vertices.0)).max(1);
    let mut pool: Vec<(Vertex, Vertex)> = Vec::new();
    let mut tree: Vec<(Vertex, Vertex)> = Vec::new();
    if spec.treewidth_two {
        // grow a 2-tree, keeping one spanning-tree edge per new vertex
        if n >= 2 {
            pool.push((0, 1));
            tree.push((0, 1));
        }
        for v in 2..n {
            let (a, b) = pool[rng.gen_range(0..pool.len())];
            let first = if rng.gen_bool(0.5) { a } else { b };
            tree.push((first, v));
            pool.push((a, v));
            pool.push((b, v));
        }
    } else {
        for v in 1..n {
            tree.push((rng.gen_range(0..v), v));
        }
        for u in 0..n {
            for v in u + 1..n {
                pool.push((u, v));
            }
        }
    }
    let mut extra: Vec<(Vertex, Vertex)> = pool.into_iter().filter(|p| !tree.contains(p)).collect();
    extra.shuffle(&mut rng);
    let room = spec.max_edges.saturating_sub(tree.len());
    let take = rng.gen_range(0..=room.min(extra.len()));
    let mut pairs = tree;
    pairs.extend(extra.into_iter().take(take));
    pairs.sort_unstable();

    let mut g = Graph::new(n);
    for &(u, v) in &pairs {
        g.add_edge(u, v, rng.gen_range(spec.weights.0..=spec.weights.1));
    }
    let mut depots: Vec<Vertex> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
    if depots.is_empty() {
        depots.push(rng.gen_range(0..n));
    }
    let clients: Vec<Vertex> = (0..n).filter(|_| rng.gen_bool(spec.client_density)).collect();
    let k = rng.gen_range(spec.vehicles.0..=spec.vehicles.1);
    let mut inst = VrpInstance::new(g, depots, clients, k, spec.variant);
    if spec.variant == Variant::Evrp {
        inst.edge_caps = Some(pairs.iter().map(|_| rng.gen_range(spec.edge_cap.0..=spec.edge_cap.1)).collect());
    }
    if spec.variant.has_load() {
        inst.load_cap = Some(rng.gen_range(spec.load_cap.0..=spec.load_cap.1));
        let d = inst.clients.iter().map(|&c| (c, rng.gen_range(1..=spec.max_demand.max(1)))).collect();
        inst.demands = Some(d);
    }
    if spec.variant.has_gas() {
        inst.gas_cap = Some(rng.gen_range(spec.gas_cap.0..=spec.gas_cap.1));
    }
    inst
}
