//! Treewidth DP for VRP and EVRP over marked partitions.
//!
//! A cell is keyed by the bag vertices touched by the partial solution (the
//! partition universe), the odd-degree subset, the number of components already
//! closed off, and the marked partition itself. Only reachable cells are built.

use std::collections::HashMap;

use thiserror::Error;

use crate::decomposition::{heuristic_decompose, nicify_with, EdgeCopy, NiceDecomposition, NodeKind, TdError, TreeDecomposition};
use crate::instance::{Routing, Variant, Vertex, VerifyOptions, VrpInstance};
use crate::partition::{MarkedPartition, Partition, PartitionError};
use crate::routing::{extract_walks, EdgeMultiset, RoutingError};

#[derive(Debug, Error)]
pub enum DpError {
    #[error("variant {0} is not handled by this solver")]
    WrongVariant(Variant),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("decomposition does not match the instance: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Decomposition(#[from] TdError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub weight: u64,
    pub routing: Routing,
}

/// Copies each edge may contribute: `min(cap, 2)`, where VRP edges are uncapped.
/// Zero-capacity edges and loops vanish.
pub fn expand_capacities(inst: &VrpInstance) -> Vec<EdgeCopy> {
    let mut out = Vec::new();
    for (i, e) in inst.graph.edges.iter().enumerate() {
        if e.is_loop() {
            continue;
        }
        let copies = inst.edge_usage_cap(i).map_or(2, |c| c.min(2)) as u32;
        for copy in 0..copies {
            out.push(EdgeCopy { edge: i, copy, u: e.u, v: e.v });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub odd: Vec<Vertex>,
    pub components: usize,
    pub partition: Partition,
    pub marked: Vec<Vertex>,
}

impl Signature {
    pub fn used(&self) -> &[Vertex] {
        self.partition.universe()
    }

    fn entry(&self, weight: u64) -> MarkedPartition {
        MarkedPartition { partition: self.partition.clone(), marked: self.marked.clone(), weight }
    }

    fn with_entry(&self, e: MarkedPartition, odd: Vec<Vertex>, components: usize) -> (Signature, u64) {
        (Signature { odd, components, partition: e.partition, marked: e.marked }, e.weight)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Back {
    Leaf,
    Keep(usize),
    Edge(usize, usize),
    Join(usize, usize),
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub signature: Signature,
    pub weight: u64,
    back: Back,
}

#[derive(Default)]
struct Table {
    cells: Vec<Cell>,
    index: HashMap<Signature, usize>,
}

impl Table {
    fn offer(&mut self, signature: Signature, weight: u64, back: Back) {
        match self.index.get(&signature) {
            Some(&i) => {
                if weight < self.cells[i].weight {
                    self.cells[i].weight = weight;
                    self.cells[i].back = back;
                }
            }
            None => {
                self.index.insert(signature.clone(), self.cells.len());
                self.cells.push(Cell { signature, weight, back });
            }
        }
    }
}

pub struct DpTable {
    nd: NiceDecomposition,
    tables: Vec<Table>,
}

fn sym_diff(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = a.iter().filter(|x| !b.contains(x)).chain(b.iter().filter(|x| !a.contains(x))).copied().collect();
    out.sort_unstable();
    out
}

pub fn run_dp(inst: &VrpInstance, nd: &NiceDecomposition) -> Result<DpTable, DpError> {
    if !matches!(inst.variant, Variant::Vrp | Variant::Evrp) {
        return Err(DpError::WrongVariant(inst.variant));
    }
    let mut expected = expand_capacities(inst);
    let mut given = nd.edges.clone();
    expected.sort();
    given.sort();
    if expected != given {
        return Err(DpError::Mismatch("introduced edge copies differ from the capacity expansion".into()));
    }
    let cap = inst.vehicles.min(inst.depots.len());
    let weight_of = |copy: usize| inst.graph.edges[nd.edges[copy].edge].weight;
    let mut tables: Vec<Table> = Vec::with_capacity(nd.nodes.len());
    for node in &nd.nodes {
        let mut t = Table::default();
        match node.kind {
            NodeKind::Leaf => {
                let sig = Signature { odd: vec![], components: 0, partition: Partition::empty(), marked: vec![] };
                t.offer(sig, 0, Back::Leaf);
            }
            NodeKind::IntroduceVertex(v) => {
                let child = &tables[node.children[0]];
                let depots: &[Vertex] = if inst.is_depot(v) { &[v][..] } else { &[] };
                for (i, cell) in child.cells.iter().enumerate() {
                    let s = &cell.signature;
                    let e = s.entry(cell.weight).inserted(&[v], depots)?;
                    let (sig, w) = s.with_entry(e, s.odd.clone(), s.components);
                    t.offer(sig, w, Back::Keep(i));
                    if !inst.is_client(v) {
                        t.offer(s.clone(), cell.weight, Back::Keep(i));
                    }
                }
            }
            NodeKind::IntroduceEdge(copy) => {
                let child = &tables[node.children[0]];
                let (u, v) = (nd.edges[copy].u, nd.edges[copy].v);
                for (i, cell) in child.cells.iter().enumerate() {
                    let s = &cell.signature;
                    t.offer(s.clone(), cell.weight, Back::Keep(i));
                    if s.partition.contains(u) && s.partition.contains(v) {
                        let e = s.entry(cell.weight).glued(u, v)?.shifted(weight_of(copy))?;
                        let (sig, w) = s.with_entry(e, sym_diff(&s.odd, &[u, v]), s.components);
                        t.offer(sig, w, Back::Edge(i, copy));
                    }
                }
            }
            NodeKind::Forget(v) => {
                let child = &tables[node.children[0]];
                for (i, cell) in child.cells.iter().enumerate() {
                    let s = &cell.signature;
                    if !s.partition.contains(v) {
                        t.offer(s.clone(), cell.weight, Back::Keep(i));
                        continue;
                    }
                    if s.odd.contains(&v) {
                        continue;
                    }
                    let e = s.entry(cell.weight);
                    if let Some(p) = e.projected(&[v])? {
                        let (sig, w) = s.with_entry(p, s.odd.clone(), s.components);
                        t.offer(sig, w, Back::Keep(i));
                    }
                    if s.components < cap {
                        if let Some(d) = e.detached(&[v])? {
                            let (sig, w) = s.with_entry(d, s.odd.clone(), s.components + 1);
                            t.offer(sig, w, Back::Keep(i));
                        }
                    }
                }
            }
            NodeKind::Join => {
                let (left, right) = (&tables[node.children[0]], &tables[node.children[1]]);
                let mut by_used: HashMap<&[Vertex], Vec<usize>> = HashMap::new();
                for (j, cell) in right.cells.iter().enumerate() {
                    by_used.entry(cell.signature.used()).or_default().push(j);
                }
                for (i, a) in left.cells.iter().enumerate() {
                    let Some(partners) = by_used.get(a.signature.used()) else { continue };
                    for &j in partners {
                        let b = &right.cells[j];
                        let components = a.signature.components + b.signature.components;
                        if components > cap {
                            continue;
                        }
                        let e = a.signature.entry(a.weight).joined(&b.signature.entry(b.weight))?;
                        let (sig, w) = a.signature.with_entry(e, sym_diff(&a.signature.odd, &b.signature.odd), components);
                        t.offer(sig, w, Back::Join(i, j));
                    }
                }
            }
        }
        tables.push(t);
    }
    Ok(DpTable { nd: nd.clone(), tables })
}

impl DpTable {
    pub fn cells(&self, node: usize) -> &[Cell] {
        &self.tables[node].cells
    }

    /// Best root weight per number of components.
    pub fn root_weights(&self) -> Vec<(usize, u64)> {
        let mut out: Vec<(usize, u64)> = self.tables[self.nd.root()].cells.iter().map(|c| (c.signature.components, c.weight)).collect();
        out.sort_unstable();
        out
    }

    /// Edge copies (as original edge indices) chosen below `cell` at `node`.
    pub fn partial_solution(&self, node: usize, cell: usize) -> EdgeMultiset {
        let mut h = EdgeMultiset::new();
        let mut stack = vec![(node, cell)];
        while let Some((t, i)) = stack.pop() {
            let n = &self.nd.nodes[t];
            match self.tables[t].cells[i].back {
                Back::Leaf => {}
                Back::Keep(j) => stack.push((n.children[0], j)),
                Back::Edge(j, copy) => {
                    *h.entry(self.nd.edges[copy].edge).or_insert(0) += 1;
                    stack.push((n.children[0], j));
                }
                Back::Join(a, b) => {
                    stack.push((n.children[0], a));
                    stack.push((n.children[1], b));
                }
            }
        }
        h
    }

    pub fn best_root(&self) -> Option<(u64, usize)> {
        let root = self.nd.root();
        self.tables[root].cells.iter().enumerate().map(|(i, c)| (c.weight, i)).min()
    }
}

pub fn solve_vrp_tw_nice(inst: &VrpInstance, nd: &NiceDecomposition, opts: &VerifyOptions) -> Result<Option<Solution>, DpError> {
    if !opts.zero_length_walks_visit {
        return Err(DpError::Unsupported("strict zero-length walk semantics in the treewidth DP"));
    }
    let table = run_dp(inst, nd)?;
    let Some((weight, cell)) = table.best_root() else { return Ok(None) };
    let h = table.partial_solution(nd.root(), cell);
    let routing = extract_walks(inst, &h)?;
    debug_assert_eq!(routing.weight(&inst.graph), weight);
    Ok(Some(Solution { weight, routing }))
}

/// Solves with the given decomposition, or a min-fill one when none is supplied.
pub fn solve_vrp_tw(inst: &VrpInstance, td: Option<&TreeDecomposition>) -> Result<Option<Solution>, DpError> {
    let own;
    let td = match td {
        Some(td) => td,
        None => {
            own = heuristic_decompose(&inst.graph);
            &own
        }
    };
    let nd = nicify_with(td, &inst.graph, expand_capacities(inst))?;
    solve_vrp_tw_nice(inst, &nd, &VerifyOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{verify_routing, Graph};

    fn inst(n: usize, edges: &[(usize, usize, u64)], depots: &[usize], clients: &[usize], k: usize) -> VrpInstance {
        let mut g = Graph::new(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        VrpInstance::new(g, depots.to_vec(), clients.to_vec(), k, Variant::Vrp)
    }

    fn optimum(i: &VrpInstance) -> Option<u64> {
        let s = solve_vrp_tw(i, None).unwrap();
        if let Some(s) = &s {
            let rep = verify_routing(i, &s.routing);
            assert!(rep.feasible, "{:?}", rep.violations);
            assert_eq!(rep.total_weight, s.weight);
        }
        s.map(|s| s.weight)
    }

    #[test]
    fn expansion_copies() {
        let mut i = inst(3, &[(0, 1, 3), (1, 2, 1), (0, 2, 1)], &[0], &[1], 1);
        assert_eq!(expand_capacities(&i).len(), 6);
        i.variant = Variant::Evrp;
        i.edge_caps = Some(vec![1, 5, 0]);
        let copies: Vec<usize> = expand_capacities(&i).iter().map(|c| c.edge).collect();
        assert_eq!(copies, vec![0, 1, 1]);
    }

    #[test]
    fn triangle_one_vehicle() {
        let i = inst(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], &[0, 1, 2], &[0, 1, 2], 1);
        assert_eq!(optimum(&i), Some(3));
    }

    #[test]
    fn star_uses_edges_twice() {
        let mut i = inst(3, &[(0, 1, 1), (0, 2, 1)], &[0], &[1, 2], 1);
        assert_eq!(optimum(&i), Some(4));
        i.vehicles = 2;
        assert_eq!(optimum(&i), Some(4));
    }

    #[test]
    fn no_clients_and_unreachable_client() {
        let i = inst(2, &[(0, 1, 1)], &[0], &[], 1);
        assert_eq!(optimum(&i), Some(0));
        let j = inst(3, &[(0, 1, 1)], &[0], &[2], 1);
        assert_eq!(optimum(&j), None);
    }

    #[test]
    fn zero_vehicles() {
        let i = inst(2, &[(0, 1, 1)], &[0], &[1], 0);
        assert_eq!(optimum(&i), None);
    }

    #[test]
    fn evrp_single_copy_forces_cycle() {
        // path 0-1 with cap 1 cannot be used twice; the detour 0-2-1 must close the loop
        let mut i = inst(3, &[(0, 1, 1), (1, 2, 5), (0, 2, 5)], &[0], &[1], 1);
        assert_eq!(optimum(&i), Some(2));
        i.variant = Variant::Evrp;
        i.edge_caps = Some(vec![1, 1, 1]);
        assert_eq!(optimum(&i), Some(11));
    }

    #[test]
    fn strict_mode_refused() {
        let i = inst(1, &[], &[0], &[0], 1);
        let nd = nicify_with(&heuristic_decompose(&i.graph), &i.graph, expand_capacities(&i)).unwrap();
        let strict = VerifyOptions { zero_length_walks_visit: false };
        assert!(matches!(solve_vrp_tw_nice(&i, &nd, &strict), Err(DpError::Unsupported(_))));
    }

    #[test]
    fn parity_of_stored_cells() {
        let i = inst(5, &[(0, 1, 2), (1, 2, 1), (2, 3, 3), (3, 0, 1), (1, 3, 2), (3, 4, 1)], &[0, 4], &[1, 2, 4], 2);
        let nd = nicify_with(&heuristic_decompose(&i.graph), &i.graph, expand_capacities(&i)).unwrap();
        let table = run_dp(&i, &nd).unwrap();
        for node in 0..nd.nodes.len() {
            for (ci, cell) in table.cells(node).iter().enumerate().step_by(3) {
                let h = table.partial_solution(node, ci);
                let mut deg = vec![0u32; i.n()];
                let mut w = 0;
                for (&e, &c) in &h {
                    deg[i.graph.edges[e].u] += c;
                    deg[i.graph.edges[e].v] += c;
                    w += i.graph.edges[e].weight * c as u64;
                }
                let odd: Vec<usize> = (0..i.n()).filter(|&v| deg[v] % 2 == 1).collect();
                assert_eq!(odd, cell.signature.odd);
                assert_eq!(w, cell.weight);
            }
        }
    }
}
