//! Treewidth DP for LoadCVRP, GasCVRP and LoadGasCVRP.
//!
//! A partial solution is a multiset of walk pieces with both ends in the current
//! bag, each summarised by its endpoints, the demand it serves, its weight and
//! whether it touches a depot, plus the number of walks already closed. Pieces
//! are only concatenated when a shared endpoint is forgotten: at that point every
//! piece end at the vertex has to be paired with another one, since no further
//! edge can reach it. Dimensions a variant does not constrain are zeroed in the key.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::binpack::{eulerian_trail_predicate, solve_het, BinKind, EndpointPair, HetInstance, HetItem};
use crate::decomposition::{heuristic_decompose, nicify_with, EdgeCopy, NiceDecomposition, NodeKind, TreeDecomposition};
use crate::instance::{Routing, Variant, Vertex, VerifyOptions, VrpInstance, Walk};
use crate::routing::trim_walk;
use crate::vrp_dp::{DpError, Solution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Piece {
    pub a: Vertex,
    pub b: Vertex,
    pub load: u64,
    pub gas: u64,
    pub depot: bool,
}

impl Piece {
    pub fn new(a: Vertex, b: Vertex, load: u64, gas: u64, depot: bool) -> Piece {
        Piece { a: a.min(b), b: a.max(b), load, gas, depot }
    }

    fn is_loop_at(&self, v: Vertex) -> bool {
        self.a == v && self.b == v
    }

    fn touches(&self, v: Vertex) -> bool {
        self.a == v || self.b == v
    }

    fn other_end(&self, v: Vertex) -> Vertex {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CvrpKey {
    /// Bag clients already served.
    pub served: Vec<Vertex>,
    /// Walks closed off so far.
    pub closed: usize,
    /// Sorted.
    pub pieces: Vec<Piece>,
}

/// (forgotten vertex, pieces at it with halves first, number of halves, walk room)
type MergeKey = (Vertex, Vec<Piece>, usize, usize);

/// How a forget node concatenated the child's pieces (indices into the child key).
#[derive(Clone, Debug, Default)]
struct MergePlan {
    chains: Vec<Vec<usize>>,
    cycles: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
enum Back {
    Leaf,
    Keep(usize),
    Serve(usize),
    Edge(usize, u32),
    Forget(usize, Arc<MergePlan>),
    Join(usize, usize),
}

#[derive(Clone, Debug)]
pub struct CvrpCell {
    pub key: CvrpKey,
    pub weight: u64,
    back: Back,
}

#[derive(Default)]
struct Table {
    cells: Vec<CvrpCell>,
    index: HashMap<CvrpKey, usize>,
}

impl Table {
    fn offer(&mut self, key: CvrpKey, weight: u64, back: Back) {
        match self.index.get(&key) {
            Some(&i) => {
                if weight < self.cells[i].weight {
                    self.cells[i].weight = weight;
                    self.cells[i].back = back;
                }
            }
            None => {
                self.index.insert(key.clone(), self.cells.len());
                self.cells.push(CvrpCell { key, weight, back });
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CvrpOptions {
    /// Re-derive every forget merge that has no zero-size pieces through the
    /// bin-packing reducibility test and panic on disagreement.
    pub cross_check_reducible: bool,
}

#[derive(Clone, Copy)]
struct Limits {
    load: Option<u64>,
    gas: Option<u64>,
    vehicles: usize,
}

impl Limits {
    fn fits(&self, load: u64, gas: u64) -> bool {
        self.load.is_none_or(|l| load <= l) && self.gas.is_none_or(|g| gas <= g)
    }
}

pub struct CvrpTable {
    nd: NiceDecomposition,
    tables: Vec<Table>,
}

impl CvrpTable {
    pub fn cells(&self, node: usize) -> &[CvrpCell] {
        &self.tables[node].cells
    }

    pub fn state_count(&self) -> usize {
        self.tables.iter().map(|t| t.cells.len()).sum()
    }

    pub fn best_root(&self) -> Option<(u64, usize)> {
        self.tables[self.nd.root()].cells.iter().enumerate().map(|(i, c)| (c.weight, i)).min()
    }
}

/// One introduce-edge node per non-loop edge entry.
pub fn simple_edges(inst: &VrpInstance) -> Vec<EdgeCopy> {
    inst.graph
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_loop())
        .map(|(i, e)| EdgeCopy { edge: i, copy: 0, u: e.u, v: e.v })
        .collect()
}

pub fn run_cvrp_dp(inst: &VrpInstance, nd: &NiceDecomposition, opts: &CvrpOptions) -> Result<CvrpTable, DpError> {
    if !inst.variant.is_capacitated() {
        return Err(DpError::WrongVariant(inst.variant));
    }
    let mut expected = simple_edges(inst);
    let mut given = nd.edges.clone();
    expected.sort();
    given.sort();
    if expected != given {
        return Err(DpError::Mismatch("introduced edges differ from the instance's edge list".into()));
    }
    let has_load = inst.variant.has_load();
    let has_gas = inst.variant.has_gas();
    let limits = Limits {
        load: if has_load { inst.load_cap } else { None },
        gas: if has_gas { inst.gas_cap } else { None },
        vehicles: inst.vehicles,
    };
    let total_gas = limits.gas.map(|g| g.saturating_mul(inst.vehicles as u64));
    let mut introductions = vec![0usize; inst.n()];
    for node in &nd.nodes {
        if let NodeKind::IntroduceVertex(v) = node.kind {
            introductions[v] += 1;
        }
    }
    let mut reducible_memo: HashMap<(Vec<Piece>, Vec<Piece>), bool> = HashMap::new();
    let mut merge_memo: HashMap<MergeKey, Arc<Vec<(Vec<Piece>, usize, MergePlan)>>> = HashMap::new();

    let mut tables: Vec<Table> = Vec::with_capacity(nd.nodes.len());
    for node in &nd.nodes {
        let mut t = Table::default();
        match node.kind {
            NodeKind::Leaf => t.offer(CvrpKey { served: vec![], closed: 0, pieces: vec![] }, 0, Back::Leaf),
            NodeKind::IntroduceVertex(v) => {
                let child = &tables[node.children[0]];
                for (i, cell) in child.cells.iter().enumerate() {
                    if !inst.is_client(v) {
                        t.offer(cell.key.clone(), cell.weight, Back::Keep(i));
                        continue;
                    }
                    if introductions[v] > 1 {
                        t.offer(cell.key.clone(), cell.weight, Back::Keep(i));
                    }
                    let load = if has_load { inst.demand(v) } else { 0 };
                    if !limits.fits(load, 0) {
                        continue;
                    }
                    let mut key = cell.key.clone();
                    key.served.push(v);
                    key.served.sort_unstable();
                    key.pieces.push(Piece::new(v, v, load, 0, inst.is_depot(v)));
                    key.pieces.sort_unstable();
                    t.offer(key, cell.weight, Back::Serve(i));
                }
            }
            NodeKind::IntroduceEdge(copy) => {
                let child = &tables[node.children[0]];
                let e = &inst.graph.edges[nd.edges[copy].edge];
                let gas = if has_gas { e.weight } else { 0 };
                let piece = Piece::new(e.u, e.v, 0, gas, inst.is_depot(e.u) || inst.is_depot(e.v));
                let max_copies = if limits.fits(0, gas) { 2 * inst.vehicles as u32 } else { 0 };
                for (i, cell) in child.cells.iter().enumerate() {
                    let mut key = cell.key.clone();
                    let mut weight = cell.weight;
                    t.offer(key.clone(), weight, Back::Keep(i));
                    for count in 1..=max_copies {
                        weight = weight.checked_add(e.weight).ok_or(crate::partition::PartitionError::Overflow)?;
                        if total_gas.is_some_and(|tg| weight > tg) {
                            break;
                        }
                        key.pieces.push(piece);
                        let mut sorted = key.clone();
                        sorted.pieces.sort_unstable();
                        t.offer(sorted, weight, Back::Edge(i, count));
                    }
                }
            }
            NodeKind::Forget(v) => {
                let child = &tables[node.children[0]];
                for (i, cell) in child.cells.iter().enumerate() {
                    let key = &cell.key;
                    if inst.is_client(v) && !key.served.contains(&v) {
                        continue;
                    }
                    let served: Vec<Vertex> = key.served.iter().copied().filter(|&x| x != v).collect();
                    let mut halves = Vec::new();
                    let mut loops = Vec::new();
                    let mut rest = Vec::new();
                    for (j, p) in key.pieces.iter().enumerate() {
                        if p.is_loop_at(v) {
                            loops.push(j);
                        } else if p.touches(v) {
                            halves.push(j);
                        } else {
                            rest.push(*p);
                        }
                    }
                    if halves.len() % 2 == 1 {
                        continue;
                    }
                    if halves.is_empty() && loops.is_empty() {
                        t.offer(CvrpKey { served, closed: key.closed, pieces: key.pieces.clone() }, cell.weight, Back::Keep(i));
                        continue;
                    }
                    let room = limits.vehicles - key.closed;
                    // merges depend only on the pieces at v, so share them across cells
                    let local: Vec<Piece> = halves.iter().chain(&loops).map(|&j| key.pieces[j]).collect();
                    let merges = merge_memo
                        .entry((v, local.clone(), halves.len(), room))
                        .or_insert_with(|| {
                            let h: Vec<usize> = (0..halves.len()).collect();
                            let l: Vec<usize> = (halves.len()..local.len()).collect();
                            Arc::new(forget_merges(v, &local, &h, &l, room, limits))
                        })
                        .clone();
                    let global = |m: &usize| if *m < halves.len() { halves[*m] } else { loops[*m - halves.len()] };
                    for (chains, cycles, plan) in merges.iter() {
                        let (chains, cycles) = (chains.clone(), *cycles);
                        let plan = MergePlan {
                            chains: plan.chains.iter().map(|c| c.iter().map(global).collect()).collect(),
                            cycles: plan.cycles.iter().map(|c| c.iter().map(global).collect()).collect(),
                        };
                        if opts.cross_check_reducible && cycles == 0 {
                            let from: Vec<Piece> = halves.iter().chain(&loops).map(|&j| key.pieces[j]).collect();
                            if from.iter().all(|p| p.load > 0 || p.gas > 0) && has_load && has_gas {
                                let mut from_sorted = from.clone();
                                from_sorted.sort_unstable();
                                let memo_key = (from_sorted, chains.clone());
                                let ok = *reducible_memo.entry(memo_key).or_insert_with(|| reducible(&from, &chains));
                                assert!(ok, "forget merge at {v} not confirmed by the reducibility test");
                            }
                        }
                        let mut pieces = rest.clone();
                        pieces.extend(chains);
                        pieces.sort_unstable();
                        let k = CvrpKey { served: served.clone(), closed: key.closed + cycles, pieces };
                        t.offer(k, cell.weight, Back::Forget(i, Arc::new(plan)));
                    }
                }
            }
            NodeKind::Join => {
                let (left, right) = (&tables[node.children[0]], &tables[node.children[1]]);
                for (i, a) in left.cells.iter().enumerate() {
                    for (j, b) in right.cells.iter().enumerate() {
                        let closed = a.key.closed + b.key.closed;
                        if closed > limits.vehicles || a.key.served.iter().any(|x| b.key.served.contains(x)) {
                            continue;
                        }
                        let weight = a.weight.checked_add(b.weight).ok_or(crate::partition::PartitionError::Overflow)?;
                        if total_gas.is_some_and(|tg| weight > tg) {
                            continue;
                        }
                        let mut served = a.key.served.clone();
                        served.extend_from_slice(&b.key.served);
                        served.sort_unstable();
                        let mut pieces = a.key.pieces.clone();
                        pieces.extend_from_slice(&b.key.pieces);
                        pieces.sort_unstable();
                        t.offer(CvrpKey { served, closed, pieces }, weight, Back::Join(i, j));
                    }
                }
            }
        }
        tables.push(t);
    }
    Ok(CvrpTable { nd: nd.clone(), tables })
}

/// A merged walk under construction at a forget node: its piece (both far ends,
/// totals) and the child pieces it is made of.
#[derive(Clone)]
struct Part {
    piece: Piece,
    members: Vec<usize>,
}

fn canonical(parts: &[Part]) -> Vec<Piece> {
    let mut k: Vec<Piece> = parts.iter().map(|p| p.piece).collect();
    k.sort_unstable();
    k
}

type Frontier = BTreeMap<(Vec<Piece>, Vec<Piece>), (Vec<Part>, Vec<Part>)>;

/// All ways to pair the piece ends at `v`: halves pair into chains, loops join a
/// chain or form closed walks. Returns (merged chains, closed walk count, plan),
/// deduplicated by outcome.
///
/// Pieces are added one at a time and partial states are deduplicated by their
/// piece multisets, since equal pieces are interchangeable.
fn forget_merges(v: Vertex, pieces: &[Piece], halves: &[usize], loops: &[usize], room: usize, limits: Limits) -> Vec<(Vec<Piece>, usize, MergePlan)> {
    // (finished chains, halves waiting for a partner)
    let mut frontier: Frontier = BTreeMap::new();
    frontier.insert((vec![], vec![]), (vec![], vec![]));
    for (pos, &h) in halves.iter().enumerate() {
        let p = pieces[h];
        let left = halves.len() - pos - 1;
        let mut next = BTreeMap::new();
        for (done, wait) in frontier.into_values() {
            if wait.len() < left {
                let mut w = wait.clone();
                w.push(Part { piece: p, members: vec![h] });
                next.entry((canonical(&done), canonical(&w))).or_insert((done.clone(), w));
            }
            let mut tried = Vec::new();
            for (i, partner) in wait.iter().enumerate() {
                let q = partner.piece;
                if tried.contains(&q) || !limits.fits(p.load + q.load, p.gas + q.gas) {
                    continue;
                }
                tried.push(q);
                let mut w = wait.clone();
                w.remove(i);
                let mut d = done.clone();
                let piece = Piece::new(q.other_end(v), p.other_end(v), p.load + q.load, p.gas + q.gas, p.depot || q.depot);
                d.push(Part { piece, members: vec![partner.members[0], h] });
                next.entry((canonical(&d), canonical(&w))).or_insert((d, w));
            }
        }
        frontier = next;
    }
    // now (chains, closed walks); a closed walk's piece is a loop at v
    let mut states: Frontier = BTreeMap::new();
    for (done, wait) in frontier.into_values() {
        if wait.is_empty() {
            states.insert((canonical(&done), vec![]), (done, vec![]));
        }
    }
    for &j in loops {
        let p = pieces[j];
        let mut next = BTreeMap::new();
        for (chains, cycles) in states.into_values() {
            for into_chain in [true, false] {
                let list = if into_chain { &chains } else { &cycles };
                let mut tried = Vec::new();
                for (i, part) in list.iter().enumerate() {
                    let q = part.piece;
                    if tried.contains(&q) || !limits.fits(p.load + q.load, p.gas + q.gas) {
                        continue;
                    }
                    tried.push(q);
                    let (mut c, mut y) = (chains.clone(), cycles.clone());
                    let target = if into_chain { &mut c[i] } else { &mut y[i] };
                    target.piece = Piece::new(q.a, q.b, p.load + q.load, p.gas + q.gas, p.depot || q.depot);
                    target.members.push(j);
                    next.entry((canonical(&c), canonical(&y))).or_insert((c, y));
                }
            }
            if cycles.len() < room {
                let mut y = cycles.clone();
                y.push(Part { piece: Piece::new(v, v, p.load, p.gas, p.depot), members: vec![j] });
                next.entry((canonical(&chains), canonical(&y))).or_insert((chains.clone(), y));
            }
        }
        states = next;
    }
    let mut seen: BTreeMap<(Vec<Piece>, usize), MergePlan> = BTreeMap::new();
    for ((chain_key, _), (chains, cycles)) in states {
        if cycles.iter().any(|c| !c.piece.depot) {
            continue;
        }
        seen.entry((chain_key, cycles.len())).or_insert_with(|| MergePlan {
            chains: chains.into_iter().map(|c| c.members).collect(),
            cycles: cycles.into_iter().map(|c| c.members).collect(),
        });
    }
    seen.into_iter().map(|((p, c), plan)| (p, c, plan)).collect()
}

/// Whether the walks `from` can be concatenated into exactly the walks `to`:
/// demand and weight totals agree and the bin-packing instance with one bin per
/// target walk (capacity = its demand, weight and zero-size flag) and the trail
/// predicate as validity is feasible.
pub fn reducible(from: &[Piece], to: &[Piece]) -> bool {
    let sum = |ps: &[Piece]| (ps.iter().map(|p| p.load).sum::<u64>(), ps.iter().map(|p| p.gas).sum::<u64>());
    if sum(from) != sum(to) {
        return false;
    }
    let size = |p: &Piece| vec![p.load, p.gas, u64::from(p.load == 0 && p.gas == 0)];
    let items = from.iter().map(|p| HetItem { size: size(p), fingerprint: EndpointPair::new(p.a, p.b, p.depot) }).collect();
    let mut grouped: Vec<(Piece, usize)> = Vec::new();
    let mut sorted = to.to_vec();
    sorted.sort_unstable();
    for p in sorted {
        match grouped.last_mut() {
            Some((q, c)) if *q == p => *c += 1,
            _ => grouped.push((p, 1)),
        }
    }
    grouped.sort_by_key(|(p, _)| std::cmp::Reverse(size(p).iter().sum::<u64>()));
    let kinds = grouped
        .into_iter()
        .map(|(p, count)| BinKind {
            capacity: size(&p),
            count,
            valid: Arc::new(move |fps: &[EndpointPair]| eulerian_trail_predicate(fps, (p.a, p.b), p.depot)),
        })
        .collect();
    let inst = HetInstance { dims: 3, items, kinds };
    matches!(solve_het(&inst), Ok(Some(_)))
}

#[derive(Clone, Debug)]
struct Frag {
    vertices: Vec<Vertex>,
    edges: Vec<usize>,
    served: Vec<Vertex>,
}

impl Frag {
    fn reversed(mut self) -> Frag {
        self.vertices.reverse();
        self.edges.reverse();
        self
    }

    fn append(&mut self, other: Frag) {
        debug_assert_eq!(self.vertices.last(), other.vertices.first());
        self.vertices.extend_from_slice(&other.vertices[1..]);
        self.edges.extend(other.edges);
        self.served.extend(other.served);
    }

    /// Oriented so that it starts at `v`.
    fn from_vertex(self, v: Vertex) -> Frag {
        if self.vertices[0] == v {
            self
        } else {
            self.reversed()
        }
    }
}

struct Rebuild<'a> {
    inst: &'a VrpInstance,
    table: &'a CvrpTable,
    closed: Vec<Frag>,
}

impl Rebuild<'_> {
    /// Concrete fragments aligned with the cell's piece list.
    fn frags(&mut self, node: usize, cell: usize) -> Vec<Frag> {
        let nd = &self.table.nd;
        let n = &nd.nodes[node];
        let c = &self.table.tables[node].cells[cell];
        let pieces_of = |t: usize, i: usize| self.table.tables[t].cells[i].key.pieces.clone();
        let mut tagged: Vec<(Piece, Frag)> = match &c.back {
            Back::Leaf => Vec::new(),
            Back::Keep(j) => return self.frags(n.children[0], *j),
            Back::Serve(j) => {
                let v = match n.kind {
                    NodeKind::IntroduceVertex(v) => v,
                    _ => unreachable!(),
                };
                let child = self.frags(n.children[0], *j);
                let mut out: Vec<(Piece, Frag)> = pieces_of(n.children[0], *j).into_iter().zip(child).collect();
                let load = if self.inst.variant.has_load() { self.inst.demand(v) } else { 0 };
                out.push((Piece::new(v, v, load, 0, self.inst.is_depot(v)), Frag { vertices: vec![v], edges: vec![], served: vec![v] }));
                out
            }
            Back::Edge(j, count) => {
                let copy = match n.kind {
                    NodeKind::IntroduceEdge(e) => e,
                    _ => unreachable!(),
                };
                let ec = nd.edges[copy];
                let e = &self.inst.graph.edges[ec.edge];
                let gas = if self.inst.variant.has_gas() { e.weight } else { 0 };
                let piece = Piece::new(e.u, e.v, 0, gas, self.inst.is_depot(e.u) || self.inst.is_depot(e.v));
                let child = self.frags(n.children[0], *j);
                let mut out: Vec<(Piece, Frag)> = pieces_of(n.children[0], *j).into_iter().zip(child).collect();
                for _ in 0..*count {
                    let (a, b) = (e.u.min(e.v), e.u.max(e.v));
                    out.push((piece, Frag { vertices: vec![a, b], edges: vec![ec.edge], served: vec![] }));
                }
                out
            }
            Back::Join(a, b) => {
                let mut out: Vec<(Piece, Frag)> = pieces_of(n.children[0], *a).into_iter().zip(self.frags(n.children[0], *a)).collect();
                out.extend(pieces_of(n.children[1], *b).into_iter().zip(self.frags(n.children[1], *b)));
                out
            }
            Back::Forget(j, plan) => {
                let v = match n.kind {
                    NodeKind::Forget(v) => v,
                    _ => unreachable!(),
                };
                let child_pieces = pieces_of(n.children[0], *j);
                let mut child: Vec<Option<Frag>> = self.frags(n.children[0], *j).into_iter().map(Some).collect();
                let mut out = Vec::new();
                for chain in &plan.chains {
                    // first and second members are the two halves; the rest are loops at v
                    let first = child[chain[0]].take().expect("used once").from_vertex(v).reversed();
                    let last = child[chain[1]].take().expect("used once").from_vertex(v);
                    let mut acc = first;
                    let mut piece = child_pieces[chain[0]];
                    for &m in &chain[2..] {
                        acc.append(child[m].take().expect("used once"));
                        piece.load += child_pieces[m].load;
                        piece.gas += child_pieces[m].gas;
                        piece.depot |= child_pieces[m].depot;
                    }
                    let pl = child_pieces[chain[1]];
                    acc.append(last);
                    let (x, y) = (acc.vertices[0], *acc.vertices.last().expect("nonempty"));
                    let merged = Piece::new(x, y, piece.load + pl.load, piece.gas + pl.gas, piece.depot || pl.depot);
                    let acc = if x <= y { acc } else { acc.reversed() };
                    out.push((merged, acc));
                }
                for cycle in &plan.cycles {
                    let mut acc = Frag { vertices: vec![v], edges: vec![], served: vec![] };
                    for &m in cycle {
                        acc.append(child[m].take().expect("used once"));
                    }
                    self.closed.push(acc);
                }
                for (i, f) in child.into_iter().enumerate() {
                    if let Some(f) = f {
                        out.push((child_pieces[i], f));
                    }
                }
                out
            }
        };
        tagged.sort_by(|a, b| a.0.cmp(&b.0));
        debug_assert_eq!(tagged.iter().map(|t| t.0).collect::<Vec<_>>(), c.key.pieces);
        tagged.into_iter().map(|t| t.1).collect()
    }
}

fn into_routing(inst: &VrpInstance, closed: Vec<Frag>) -> Routing {
    let mut walks = Vec::new();
    let mut assignment = std::collections::BTreeMap::new();
    for f in closed {
        let start_idx = (0..f.vertices.len()).filter(|&i| inst.is_depot(f.vertices[i])).min_by_key(|&i| (f.vertices[i], i)).expect("closed walk meets a depot");
        let len = f.edges.len();
        let walk = if len == 0 {
            Walk::single(f.vertices[0])
        } else {
            let s = start_idx % len;
            let mut vertices: Vec<Vertex> = f.vertices[s..len].to_vec();
            vertices.extend_from_slice(&f.vertices[..=s]);
            let mut edges = f.edges[s..].to_vec();
            edges.extend_from_slice(&f.edges[..s]);
            trim_walk(&inst.graph, &Walk { vertices, edges })
        };
        for c in f.served {
            assignment.insert(c, walks.len());
        }
        walks.push(walk);
    }
    Routing { walks, assignment }
}

pub fn solve_cvrp_tw_nice(inst: &VrpInstance, nd: &NiceDecomposition, opts: &CvrpOptions, verify: &VerifyOptions) -> Result<Option<Solution>, DpError> {
    if !verify.zero_length_walks_visit {
        return Err(DpError::Unsupported("strict zero-length walk semantics in the treewidth DP"));
    }
    let table = run_cvrp_dp(inst, nd, opts)?;
    let Some((weight, cell)) = table.best_root() else { return Ok(None) };
    let mut rb = Rebuild { inst, table: &table, closed: Vec::new() };
    let leftover = rb.frags(nd.root(), cell);
    debug_assert!(leftover.is_empty());
    let routing = into_routing(inst, rb.closed);
    debug_assert_eq!(routing.weight(&inst.graph), weight);
    Ok(Some(Solution { weight: routing.weight(&inst.graph), routing }))
}

/// Solves with the given decomposition, or a min-fill one when none is supplied.
pub fn solve_cvrp_tw(inst: &VrpInstance, td: Option<&TreeDecomposition>) -> Result<Option<Solution>, DpError> {
    let own;
    let td = match td {
        Some(td) => td,
        None => {
            own = heuristic_decompose(&inst.graph);
            &own
        }
    };
    let nd = nicify_with(td, &inst.graph, simple_edges(inst))?;
    solve_cvrp_tw_nice(inst, &nd, &CvrpOptions::default(), &VerifyOptions::default())
}

pub fn variant_supported(v: Variant) -> bool {
    v.is_capacitated()
}
