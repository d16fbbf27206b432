//! Solvers whose running time is exponential only in the number of clients, and the
//! weight-bound and capacity deciders built on them.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use thiserror::Error;

use crate::instance::{contract_zero_edges, Graph, InstanceError, Routing, Variant, Vertex, VerifyOptions, VrpInstance, Walk};
use crate::vrp_dp::Solution;

#[derive(Debug, Error)]
pub enum CompactError {
    #[error("variant {0} is not handled by this solver")]
    WrongVariant(Variant),
    #[error("{clients} clients exceed the cap of {cap}")]
    TooManyClients { clients: usize, cap: usize },
    #[error("zero-weight edge {0} in a load-constrained instance")]
    ZeroWeightEdge(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Shortest paths from every vertex, with the last edge on each path.
#[derive(Clone, Debug)]
pub struct Apsp {
    pub dist: Vec<Vec<Option<u64>>>,
    pred: Vec<Vec<Option<(Vertex, usize)>>>,
}

pub fn apsp(g: &Graph) -> Apsp {
    let n = g.vertex_count;
    let inc = g.incidence();
    let mut dist = vec![vec![None; n]; n];
    let mut pred = vec![vec![None; n]; n];
    for s in 0..n {
        let d = &mut dist[s];
        let p = &mut pred[s];
        d[s] = Some(0);
        let mut heap = BinaryHeap::from([Reverse((0u64, s))]);
        while let Some(Reverse((dx, x))) = heap.pop() {
            if d[x] != Some(dx) {
                continue;
            }
            for &e in &inc[x] {
                let edge = &g.edges[e];
                if edge.is_loop() {
                    continue;
                }
                let y = edge.other(x);
                let nd = dx + edge.weight;
                if d[y].is_none_or(|dy| nd < dy) {
                    d[y] = Some(nd);
                    p[y] = Some((x, e));
                    heap.push(Reverse((nd, y)));
                }
            }
        }
    }
    Apsp { dist, pred }
}

impl Apsp {
    pub fn distance(&self, u: Vertex, v: Vertex) -> Option<u64> {
        self.dist[u][v]
    }

    /// Vertices and edges of a shortest `u`-`v` path.
    pub fn path(&self, u: Vertex, v: Vertex) -> Option<(Vec<Vertex>, Vec<usize>)> {
        self.dist[u][v]?;
        let mut vertices = vec![v];
        let mut edges = Vec::new();
        let mut x = v;
        while x != u {
            let (p, e) = self.pred[u][x].expect("reachable");
            vertices.push(p);
            edges.push(e);
            x = p;
        }
        vertices.reverse();
        edges.reverse();
        Some((vertices, edges))
    }
}

#[derive(Clone, Debug)]
pub struct ClientOptions {
    /// `None` disables the cap.
    pub client_cap: Option<usize>,
    pub threads: usize,
    pub verify: VerifyOptions,
}

impl Default for ClientOptions {
    fn default() -> Self {
        ClientOptions { client_cap: Some(crate::limits::ScaleLimits::default().client_cap), threads: 1, verify: VerifyOptions::default() }
    }
}

struct Ctx<'a> {
    inst: &'a VrpInstance,
    paths: Apsp,
    load_cap: Option<u64>,
    gas_cap: Option<u64>,
    strict: bool,
    /// Cheapest out-and-back along a single edge, per vertex.
    bounce: Vec<Option<(u64, usize)>>,
}

/// (weight, blocks with their depots), compared lexicographically for determinism.
type Candidate = (u64, Vec<(Vec<Vertex>, Vertex)>);

impl Ctx<'_> {
    /// Cheapest closed tour serving `block` in order, with its depot.
    fn tour(&self, block: &[Vertex]) -> Option<(u64, Vertex)> {
        let mut inner = 0u64;
        for w in block.windows(2) {
            inner += self.paths.distance(w[0], w[1])?;
        }
        let mut best: Option<(u64, Vertex)> = None;
        for &d in &self.inst.depots {
            let (Some(a), Some(b)) = (self.paths.distance(d, block[0]), self.paths.distance(*block.last().expect("nonempty"), d)) else {
                continue;
            };
            let mut cost = a + inner + b;
            if self.strict && block.len() == 1 && d == block[0] {
                match self.bounce[d] {
                    Some((w, _)) => cost = w,
                    None => continue,
                }
            }
            if best.is_none_or(|(bc, bd)| (cost, d) < (bc, bd)) {
                best = Some((cost, d));
            }
        }
        let best = best?;
        if self.gas_cap.is_some_and(|g| best.0 > g) {
            return None;
        }
        Some(best)
    }

    fn load(&self, block: &[Vertex]) -> u64 {
        block.iter().map(|&c| self.inst.demand(c)).sum()
    }

    fn evaluate(&self, blocks: &[Vec<Vertex>]) -> Option<Candidate> {
        let mut total = 0;
        let mut out = Vec::with_capacity(blocks.len());
        for b in blocks {
            let (w, d) = self.tour(b)?;
            total += w;
            out.push((b.clone(), d));
        }
        Some((total, out))
    }

    /// Inserts clients one by one into an existing block (any position) or a new
    /// block, which yields every ordered set partition exactly once.
    fn search(&self, i: usize, blocks: &mut Vec<Vec<Vertex>>, best: &mut Option<Candidate>) {
        let clients = &self.inst.clients;
        if i == clients.len() {
            if let Some(c) = self.evaluate(blocks) {
                if best.as_ref().is_none_or(|b| c < *b) {
                    *best = Some(c);
                }
            }
            return;
        }
        let c = clients[i];
        for bi in 0..blocks.len() {
            if self.load_cap.is_some_and(|l| self.load(&blocks[bi]) + self.inst.demand(c) > l) {
                continue;
            }
            for pos in 0..=blocks[bi].len() {
                blocks[bi].insert(pos, c);
                self.search(i + 1, blocks, best);
                blocks[bi].remove(pos);
            }
        }
        if blocks.len() < self.inst.vehicles && self.load_cap.is_none_or(|l| self.inst.demand(c) <= l) {
            blocks.push(vec![c]);
            self.search(i + 1, blocks, best);
            blocks.pop();
        }
    }

    fn walk(&self, block: &[Vertex], depot: Vertex) -> Walk {
        if self.strict && block.len() == 1 && block[0] == depot {
            let (_, e) = self.bounce[depot].expect("checked in tour");
            let x = self.inst.graph.edges[e].other(depot);
            return Walk { vertices: vec![depot, x, depot], edges: vec![e, e] };
        }
        let mut w = Walk::single(depot);
        let mut stops: Vec<Vertex> = block.to_vec();
        stops.push(depot);
        let mut at = depot;
        for s in stops {
            let (vs, es) = self.paths.path(at, s).expect("reachable");
            w.vertices.extend_from_slice(&vs[1..]);
            w.edges.extend(es);
            at = s;
        }
        w
    }
}

/// Exact optimum over every grouping of the clients into at most `k` ordered blocks.
pub fn solve_by_clients(inst: &VrpInstance, opts: &ClientOptions) -> Result<Option<Solution>, CompactError> {
    if inst.variant == Variant::Evrp {
        return Err(CompactError::WrongVariant(inst.variant));
    }
    if let Some(cap) = opts.client_cap {
        if inst.clients.len() > cap {
            return Err(CompactError::TooManyClients { clients: inst.clients.len(), cap });
        }
    }
    let g = &inst.graph;
    let mut bounce = vec![None; g.vertex_count];
    for (i, e) in g.edges.iter().enumerate() {
        if e.is_loop() {
            continue;
        }
        for x in [e.u, e.v] {
            let cand = (2 * e.weight, i);
            if bounce[x].is_none_or(|b| cand < b) {
                bounce[x] = Some(cand);
            }
        }
    }
    let ctx = Ctx {
        inst,
        paths: apsp(g),
        load_cap: if inst.variant.has_load() { inst.load_cap } else { None },
        gas_cap: if inst.variant.has_gas() { inst.gas_cap } else { None },
        strict: !opts.verify.zero_length_walks_visit,
        bounce,
    };
    let best = if inst.clients.is_empty() {
        Some((0, Vec::new()))
    } else if opts.threads <= 1 || inst.clients.len() < 3 {
        let mut best = None;
        ctx.search(0, &mut Vec::new(), &mut best);
        best
    } else {
        parallel_search(&ctx, opts.threads)
    };
    let Some((weight, blocks)) = best else { return Ok(None) };
    let mut walks = Vec::new();
    let mut assignment = BTreeMap::new();
    for (block, depot) in &blocks {
        for &c in block {
            assignment.insert(c, walks.len());
        }
        walks.push(ctx.walk(block, *depot));
    }
    let routing = Routing { walks, assignment };
    debug_assert_eq!(routing.weight(g), weight);
    Ok(Some(Solution { weight, routing }))
}

/// Splits the search on the placement of the first two clients.
fn parallel_search(ctx: &Ctx<'_>, threads: usize) -> Option<Candidate> {
    let c = &ctx.inst.clients;
    let mut prefixes: Vec<Vec<Vec<Vertex>>> = vec![vec![vec![c[0], c[1]]], vec![vec![c[1], c[0]]]];
    if ctx.inst.vehicles >= 2 {
        prefixes.push(vec![vec![c[0]], vec![c[1]]]);
    }
    if ctx.load_cap.is_some_and(|l| ctx.load(&[c[0], c[1]]) > l) {
        prefixes.retain(|p| p.len() == 2);
    }
    let chunk = prefixes.len().div_ceil(threads.min(prefixes.len()).max(1));
    let results: Vec<Option<Candidate>> = std::thread::scope(|s| {
        let handles: Vec<_> = prefixes
            .chunks(chunk)
            .map(|group| {
                s.spawn(move || {
                    let mut best = None;
                    for p in group {
                        let mut blocks = p.clone();
                        ctx.search(2, &mut blocks, &mut best);
                    }
                    best
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    results.into_iter().flatten().min()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecisionReason {
    /// Rejected by a counting argument before any search.
    VolumeBound,
    /// Settled by running the client solver.
    Search,
}

#[derive(Clone, Debug)]
pub struct Decision {
    pub feasible: bool,
    pub reason: DecisionReason,
    pub solution: Option<Solution>,
}

fn rejected() -> Decision {
    Decision { feasible: false, reason: DecisionReason::VolumeBound, solution: None }
}

/// Clients that can be served at weight 0 by a walk that never leaves them.
fn free_clients(inst: &VrpInstance, opts: &ClientOptions) -> usize {
    if !opts.verify.zero_length_walks_visit {
        return 0;
    }
    inst.clients.iter().filter(|&&c| inst.is_depot(c)).count().min(inst.vehicles)
}

/// Is there a routing of weight at most `r`? Without zero-weight edges a walk of
/// weight `w` visits at most `w` vertices, so too few weight units reject outright.
pub fn decide_weight_bound(inst: &VrpInstance, r: u64, opts: &ClientOptions) -> Result<Decision, CompactError> {
    let reduced = match inst.variant {
        Variant::Vrp | Variant::GasCvrp => contract_zero_edges(inst)?.0,
        Variant::LoadCvrp | Variant::LoadGasCvrp => {
            if let Some(i) = inst.graph.edges.iter().position(|e| e.weight == 0) {
                return Err(CompactError::ZeroWeightEdge(i));
            }
            inst.clone()
        }
        Variant::Evrp => return Err(CompactError::WrongVariant(inst.variant)),
    };
    let must_pay = reduced.clients.len() - free_clients(&reduced, opts);
    if r < must_pay as u64 {
        return Ok(rejected());
    }
    let solution = solve_by_clients(inst, opts)?;
    let feasible = solution.as_ref().is_some_and(|s| s.weight <= r);
    Ok(Decision { feasible, reason: DecisionReason::Search, solution })
}

/// Optimum for capacitated instances, rejecting early when `k` walks cannot cover
/// all clients within the per-walk budget.
pub fn decide_k_capacity(inst: &VrpInstance, opts: &ClientOptions) -> Result<Decision, CompactError> {
    let k = inst.vehicles as u64;
    match inst.variant {
        Variant::LoadCvrp | Variant::LoadGasCvrp => {
            let ell = inst.load_cap.unwrap_or(u64::MAX);
            if k.saturating_mul(ell) < inst.clients.len() as u64 {
                return Ok(rejected());
            }
        }
        Variant::GasCvrp => {
            let reduced = contract_zero_edges(inst)?.0;
            let g = inst.gas_cap.unwrap_or(u64::MAX);
            // a walk of weight w >= 1 meets at most w vertices; weight 0 means it stays put
            let per_walk = if opts.verify.zero_length_walks_visit { g.max(1) } else { g };
            if k.saturating_mul(per_walk) < reduced.clients.len() as u64 {
                return Ok(rejected());
            }
        }
        v => return Err(CompactError::WrongVariant(v)),
    }
    let solution = solve_by_clients(inst, opts)?;
    Ok(Decision { feasible: solution.is_some(), reason: DecisionReason::Search, solution })
}
