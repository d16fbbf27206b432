//! Brute-force reference solvers. Slow on purpose and independent of the DPs and
//! the client solver: the uncapacitated oracle enumerates edge-copy counts, the
//! capacitated one enumerates client-to-vehicle maps over a Floyd-Warshall closure.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::instance::{Routing, Variant, Vertex, VerifyOptions, VrpInstance, Walk};
use crate::limits::OracleLimits;
use crate::routing::{extract_walks, EdgeMultiset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("variant {0} is not handled by this oracle")]
    WrongVariant(Variant),
    #[error("instance too large for the oracle: {0}")]
    TooLarge(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleOutcome {
    pub weight: u64,
    pub routing: Routing,
}

/// Minimum over all 0/1/2-copy choices per edge that form an Eulerian multigraph
/// whose edge-carrying components each contain a depot, cover every client and
/// need at most `k` walks.
pub fn oracle_vrp(inst: &VrpInstance, limits: &OracleLimits, opts: &VerifyOptions) -> Result<Option<OracleOutcome>, OracleError> {
    if !matches!(inst.variant, Variant::Vrp | Variant::Evrp) {
        return Err(OracleError::WrongVariant(inst.variant));
    }
    let n = inst.n();
    if n > limits.max_vertices {
        return Err(OracleError::TooLarge(format!("{n} vertices > {}", limits.max_vertices)));
    }
    let edges: Vec<(usize, u64)> = inst
        .graph
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_loop())
        .map(|(i, _)| (i, inst.edge_usage_cap(i).map_or(2, |c| c.min(2))))
        .filter(|&(_, c)| c > 0)
        .collect();
    let copies: u64 = edges.iter().map(|e| e.1).sum();
    if copies as usize > limits.max_edge_copies {
        return Err(OracleError::TooLarge(format!("{copies} edge copies > {}", limits.max_edge_copies)));
    }
    let mut counts = vec![0u64; edges.len()];
    let mut best: Option<(u64, Vec<u64>)> = None;
    loop {
        if let Some(w) = evaluate_vrp(inst, &edges, &counts, opts) {
            if best.as_ref().is_none_or(|b| w < b.0) {
                best = Some((w, counts.clone()));
            }
        }
        // mixed-radix increment
        let mut i = 0;
        while i < counts.len() && counts[i] == edges[i].1 {
            counts[i] = 0;
            i += 1;
        }
        if i == counts.len() {
            break;
        }
        counts[i] += 1;
    }
    let Some((weight, counts)) = best else { return Ok(None) };
    let h: EdgeMultiset = edges.iter().zip(&counts).filter(|(_, &c)| c > 0).map(|(&(e, _), &c)| (e, c as u32)).collect();
    let routing = extract_walks(inst, &h).expect("oracle choice is a valid Eulerian subgraph");
    Ok(Some(OracleOutcome { weight, routing }))
}

fn evaluate_vrp(inst: &VrpInstance, edges: &[(usize, u64)], counts: &[u64], opts: &VerifyOptions) -> Option<u64> {
    let n = inst.n();
    let mut degree = vec![0u64; n];
    let mut label: Vec<usize> = (0..n).collect();
    let mut weight = 0;
    for (&(e, _), &c) in edges.iter().zip(counts) {
        if c == 0 {
            continue;
        }
        let edge = &inst.graph.edges[e];
        degree[edge.u] += c;
        degree[edge.v] += c;
        weight += edge.weight * c;
        // relabel: slow and obviously correct
        let (from, to) = (label[edge.u], label[edge.v]);
        if from != to {
            for l in label.iter_mut() {
                if *l == from {
                    *l = to;
                }
            }
        }
    }
    if degree.iter().any(|d| d % 2 == 1) {
        return None;
    }
    let mut walks = 0;
    let mut seen_labels = Vec::new();
    for v in 0..n {
        if degree[v] > 0 && !seen_labels.contains(&label[v]) {
            seen_labels.push(label[v]);
            if !(0..n).any(|x| label[x] == label[v] && inst.is_depot(x)) {
                return None;
            }
            walks += 1;
        }
    }
    for &c in &inst.clients {
        if degree[c] == 0 {
            if inst.is_depot(c) && opts.zero_length_walks_visit {
                walks += 1;
            } else {
                return None;
            }
        }
    }
    (walks <= inst.vehicles).then_some(weight)
}

/// Minimum over every map from clients to `k` vehicles, every depot and every
/// visiting order per vehicle, of the concatenated shortest-path walks that meet
/// the demand and weight budgets.
pub fn oracle_cvrp(inst: &VrpInstance, limits: &OracleLimits, opts: &VerifyOptions) -> Result<Option<OracleOutcome>, OracleError> {
    if inst.variant == Variant::Evrp {
        return Err(OracleError::WrongVariant(inst.variant));
    }
    let c = inst.clients.len();
    if c > limits.max_clients {
        return Err(OracleError::TooLarge(format!("{c} clients > {}", limits.max_clients)));
    }
    let k = inst.vehicles;
    if k > limits.max_vehicles {
        return Err(OracleError::TooLarge(format!("{k} vehicles > {}", limits.max_vehicles)));
    }
    if c == 0 {
        return Ok(Some(OracleOutcome { weight: 0, routing: Routing::default() }));
    }
    if k == 0 {
        return Ok(None);
    }
    let fw = FloydWarshall::new(inst);
    let load_cap = if inst.variant.has_load() { inst.load_cap } else { None };
    let gas_cap = if inst.variant.has_gas() { inst.gas_cap } else { None };
    // best tour per client subset, as (weight, depot, order)
    let mut tours: HashMap<u32, Option<(u64, Vertex, Vec<Vertex>)>> = HashMap::new();
    let mut best: Option<(u64, Vec<u32>)> = None;
    let total = (k as u64).pow(c as u32);
    for code in 0..total {
        let mut masks = vec![0u32; k];
        let mut x = code;
        for i in 0..c {
            masks[(x % k as u64) as usize] |= 1 << i;
            x /= k as u64;
        }
        let mut sum = 0;
        let mut ok = true;
        for &m in &masks {
            if m == 0 {
                continue;
            }
            let t = tours.entry(m).or_insert_with(|| best_tour(inst, &fw, m, load_cap, gas_cap, opts));
            match t {
                Some((w, _, _)) => sum += *w,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && best.as_ref().is_none_or(|b| sum < b.0) {
            best = Some((sum, masks));
        }
    }
    let Some((weight, masks)) = best else { return Ok(None) };
    let mut walks = Vec::new();
    let mut assignment = BTreeMap::new();
    for m in masks.into_iter().filter(|&m| m != 0) {
        let (_, depot, order) = tours[&m].clone().expect("feasible");
        for &cl in &order {
            assignment.insert(cl, walks.len());
        }
        walks.push(fw.walk(inst, depot, &order, opts));
    }
    Ok(Some(OracleOutcome { weight, routing: Routing { walks, assignment } }))
}

fn best_tour(inst: &VrpInstance, fw: &FloydWarshall, mask: u32, load_cap: Option<u64>, gas_cap: Option<u64>, opts: &VerifyOptions) -> Option<(u64, Vertex, Vec<Vertex>)> {
    let members: Vec<Vertex> = inst.clients.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &c)| c).collect();
    let load: u64 = members.iter().map(|&c| inst.demand(c)).sum();
    if load_cap.is_some_and(|l| load > l) {
        return None;
    }
    let mut best: Option<(u64, Vertex, Vec<Vertex>)> = None;
    for order in permutations(&members) {
        for &d in &inst.depots {
            let Some(w) = fw.tour_weight(inst, d, &order, opts) else { continue };
            if gas_cap.is_some_and(|g| w > g) {
                continue;
            }
            if best.as_ref().is_none_or(|b| w < b.0) {
                best = Some((w, d, order.clone()));
            }
        }
    }
    best
}

/// All orderings of `items` (Heap's algorithm).
fn permutations(items: &[Vertex]) -> Vec<Vec<Vertex>> {
    let mut a = items.to_vec();
    let mut out = vec![a.clone()];
    let mut c = vec![0; a.len()];
    let mut i = 0;
    while i < a.len() {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

struct FloydWarshall {
    dist: Vec<Vec<Option<u64>>>,
    next: Vec<Vec<Option<(Vertex, usize)>>>,
    /// cheapest incident edge per vertex, for a forced out-and-back
    cheapest: Vec<Option<(u64, usize)>>,
}

impl FloydWarshall {
    fn new(inst: &VrpInstance) -> FloydWarshall {
        let n = inst.n();
        let mut dist = vec![vec![None; n]; n];
        let mut next = vec![vec![None; n]; n];
        let mut cheapest: Vec<Option<(u64, usize)>> = vec![None; n];
        for v in 0..n {
            dist[v][v] = Some(0);
        }
        for (i, e) in inst.graph.edges.iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                if dist[a][b].is_none_or(|d| e.weight < d) {
                    dist[a][b] = Some(e.weight);
                    next[a][b] = Some((b, i));
                }
                if cheapest[a].is_none_or(|c| e.weight < c.0) {
                    cheapest[a] = Some((e.weight, i));
                }
            }
        }
        for m in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if let (Some(x), Some(y)) = (dist[a][m], dist[m][b]) {
                        if dist[a][b].is_none_or(|d| x + y < d) {
                            dist[a][b] = Some(x + y);
                            next[a][b] = next[a][m];
                        }
                    }
                }
            }
        }
        FloydWarshall { dist, next, cheapest }
    }

    fn tour_weight(&self, inst: &VrpInstance, depot: Vertex, order: &[Vertex], opts: &VerifyOptions) -> Option<u64> {
        if !opts.zero_length_walks_visit && order == [depot] {
            return self.cheapest[depot].map(|c| 2 * c.0);
        }
        let _ = inst;
        let mut at = depot;
        let mut w = 0;
        for &x in order.iter().chain(std::iter::once(&depot)) {
            w += self.dist[at][x]?;
            at = x;
        }
        Some(w)
    }

    fn walk(&self, inst: &VrpInstance, depot: Vertex, order: &[Vertex], opts: &VerifyOptions) -> Walk {
        if !opts.zero_length_walks_visit && order == [depot] {
            let (_, e) = self.cheapest[depot].expect("checked");
            let x = inst.graph.edges[e].other(depot);
            return Walk { vertices: vec![depot, x, depot], edges: vec![e, e] };
        }
        let mut w = Walk::single(depot);
        let mut at = depot;
        for &x in order.iter().chain(std::iter::once(&depot)) {
            while at != x {
                let (y, e) = self.next[at][x].expect("reachable");
                w.vertices.push(y);
                w.edges.push(e);
                at = y;
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{verify_routing_with, Graph};

    fn inst(n: usize, edges: &[(usize, usize, u64)], depots: &[usize], clients: &[usize], k: usize, variant: Variant) -> VrpInstance {
        let mut g = Graph::new(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        VrpInstance::new(g, depots.to_vec(), clients.to_vec(), k, variant)
    }

    fn vrp(i: &VrpInstance) -> Option<u64> {
        let out = oracle_vrp(i, &OracleLimits::default(), &VerifyOptions::default()).unwrap();
        if let Some(o) = &out {
            assert!(verify_routing_with(i, &o.routing, &VerifyOptions::default()).feasible);
        }
        out.map(|o| o.weight)
    }

    fn cvrp(i: &VrpInstance) -> Option<u64> {
        let out = oracle_cvrp(i, &OracleLimits::default(), &VerifyOptions::default()).unwrap();
        if let Some(o) = &out {
            let rep = verify_routing_with(i, &o.routing, &VerifyOptions::default());
            assert!(rep.feasible, "{:?}", rep.violations);
            assert_eq!(rep.total_weight, o.weight);
        }
        out.map(|o| o.weight)
    }

    #[test]
    fn vrp_examples() {
        assert_eq!(vrp(&inst(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], &[0], &[0, 1, 2], 1, Variant::Vrp)), Some(3));
        assert_eq!(vrp(&inst(3, &[(0, 1, 1)], &[0], &[2], 1, Variant::Vrp)), None);
        assert_eq!(vrp(&inst(3, &[(0, 1, 1), (0, 2, 1)], &[0], &[1, 2], 1, Variant::Vrp)), Some(4));
    }

    #[test]
    fn cvrp_examples() {
        let mut star = inst(3, &[(0, 1, 1), (0, 2, 1)], &[0], &[1, 2], 2, Variant::LoadCvrp);
        star.load_cap = Some(1);
        star.demands = Some([(1, 1), (2, 1)].into_iter().collect());
        assert_eq!(cvrp(&star), Some(4));
        star.vehicles = 1;
        assert_eq!(cvrp(&star), None);
    }

    #[test]
    fn oracles_agree_without_budgets() {
        let i = inst(5, &[(0, 1, 2), (1, 2, 1), (2, 3, 3), (3, 0, 1), (1, 3, 2), (3, 4, 1)], &[0, 4], &[1, 2, 4], 2, Variant::Vrp);
        assert_eq!(vrp(&i), cvrp(&i));
    }

    #[test]
    fn guards() {
        let big = inst(9, &[], &[0], &[], 1, Variant::Vrp);
        assert!(matches!(oracle_vrp(&big, &OracleLimits::default(), &VerifyOptions::default()), Err(OracleError::TooLarge(_))));
        let many = inst(8, &[], &[0], &[1, 2, 3, 4, 5, 6, 7], 1, Variant::Vrp);
        assert!(matches!(oracle_cvrp(&many, &OracleLimits::default(), &VerifyOptions::default()), Err(OracleError::TooLarge(_))));
    }

    #[test]
    fn heap_permutation_count() {
        assert_eq!(permutations(&[1, 2, 3, 4]).len(), 24);
        let mut p = permutations(&[1, 2, 3]);
        p.sort();
        p.dedup();
        assert_eq!(p.len(), 6);
    }
}
