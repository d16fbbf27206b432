//! Conversion between Eulerian edge multisets and walk-based routings.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::instance::{Graph, Routing, Vertex, VrpInstance, Walk};

/// Edge index -> number of copies used.
pub type EdgeMultiset = BTreeMap<usize, u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RoutingError {
    #[error("not Eulerian at {0}")]
    NotEulerian(Vertex),
    #[error("component containing {0} has no depot")]
    NoDepot(Vertex),
    #[error("client {0} is not covered")]
    Uncovered(Vertex),
    #[error("{needed} walks needed, only {vehicles} vehicles")]
    TooManyWalks { needed: usize, vehicles: usize },
    #[error("edge {0} does not exist")]
    UnknownEdge(usize),
}

/// Closed walk from `start` using every copy in `h` exactly once, or `None` if the
/// copies are not a connected Eulerian multigraph touching `start`.
pub fn euler_tour(g: &Graph, start: Vertex, h: &EdgeMultiset) -> Option<Walk> {
    let mut copies: Vec<usize> = Vec::new();
    for (&e, &c) in h {
        for _ in 0..c {
            copies.push(e);
        }
    }
    if copies.is_empty() {
        return Some(Walk::single(start));
    }
    let mut inc: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (i, &e) in copies.iter().enumerate() {
        let edge = &g.edges[e];
        inc.entry(edge.u).or_default().push(i);
        if !edge.is_loop() {
            inc.entry(edge.v).or_default().push(i);
        }
    }
    if !inc.contains_key(&start) {
        return None;
    }
    let mut used = vec![false; copies.len()];
    let mut cursor: BTreeMap<Vertex, usize> = BTreeMap::new();
    // stack of (vertex, edge used to arrive)
    let mut stack: Vec<(Vertex, Option<usize>)> = vec![(start, None)];
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    while let Some(&(x, _)) = stack.last() {
        let list = &inc[&x];
        let pos = cursor.entry(x).or_insert(0);
        while *pos < list.len() && used[list[*pos]] {
            *pos += 1;
        }
        if *pos < list.len() {
            let i = list[*pos];
            used[i] = true;
            let y = g.edges[copies[i]].other(x);
            stack.push((y, Some(copies[i])));
        } else {
            let (v, via) = stack.pop().expect("nonempty");
            vertices.push(v);
            if let Some(e) = via {
                edges.push(e);
            }
        }
    }
    if used.iter().any(|u| !u) {
        return None;
    }
    vertices.reverse();
    edges.reverse();
    if vertices.first() != Some(&start) || vertices.last() != Some(&start) {
        return None;
    }
    Some(Walk { vertices, edges })
}

/// One closed walk per component of `h`, each starting at the component's smallest
/// depot; clients that are depots but untouched by `h` get zero-length walks.
pub fn extract_walks(inst: &VrpInstance, h: &EdgeMultiset) -> Result<Routing, RoutingError> {
    let g = &inst.graph;
    let n = g.vertex_count;
    let mut degree = vec![0u64; n];
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut touched = BTreeSet::new();
    for (&e, &c) in h {
        if c == 0 {
            continue;
        }
        let edge = g.edges.get(e).ok_or(RoutingError::UnknownEdge(e))?;
        degree[edge.u] += c as u64;
        degree[edge.v] += c as u64;
        touched.insert(edge.u);
        touched.insert(edge.v);
        let (a, b) = (root(&mut parent, edge.u), root(&mut parent, edge.v));
        parent[a.max(b)] = a.min(b);
    }
    if let Some(v) = (0..n).find(|&v| degree[v] % 2 == 1) {
        return Err(RoutingError::NotEulerian(v));
    }
    let mut components: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
    for &v in &touched {
        let r = root(&mut parent, v);
        components.entry(r).or_default().push(v);
    }
    let mut walks = Vec::new();
    for (rep, members) in &components {
        let start = members.iter().copied().find(|&v| inst.is_depot(v)).ok_or(RoutingError::NoDepot(*rep))?;
        let part: EdgeMultiset = h
            .iter()
            .filter(|(&e, &c)| c > 0 && members.contains(&g.edges[e].u))
            .map(|(&e, &c)| (e, c))
            .collect();
        walks.push(euler_tour(g, start, &part).expect("even degrees and connected"));
    }
    for &c in &inst.clients {
        if !touched.contains(&c) {
            if inst.is_depot(c) {
                walks.push(Walk::single(c));
            } else {
                return Err(RoutingError::Uncovered(c));
            }
        }
    }
    if walks.len() > inst.vehicles {
        return Err(RoutingError::TooManyWalks { needed: walks.len(), vehicles: inst.vehicles });
    }
    let assignment = assign_lowest(&inst.clients, &walks);
    Ok(Routing { walks, assignment })
}

/// Each client goes to the first walk that contains it.
pub fn assign_lowest(clients: &[Vertex], walks: &[Walk]) -> BTreeMap<Vertex, usize> {
    let mut out = BTreeMap::new();
    for &c in clients {
        if let Some(i) = walks.iter().position(|w| w.contains(c)) {
            out.insert(c, i);
        }
    }
    out
}

pub fn walks_to_subgraph(r: &Routing) -> EdgeMultiset {
    let mut out = EdgeMultiset::new();
    for w in &r.walks {
        for &e in &w.edges {
            *out.entry(e).or_insert(0) += 1;
        }
    }
    out
}

pub fn multiset_weight(g: &Graph, h: &EdgeMultiset) -> u64 {
    h.iter().map(|(&e, &c)| g.edges[e].weight * c as u64).sum()
}

/// Drops pairs of copies of any edge the walk uses more than twice and re-tours it
/// from the same start. Parity, connectivity and the visited vertex set survive.
pub fn trim_walk(g: &Graph, walk: &Walk) -> Walk {
    let mut h = EdgeMultiset::new();
    for &e in &walk.edges {
        *h.entry(e).or_insert(0) += 1;
    }
    if h.values().all(|&c| c <= 2) {
        return walk.clone();
    }
    for c in h.values_mut() {
        while *c > 2 {
            *c -= 2;
        }
    }
    let start = walk.start().expect("nonempty walk");
    euler_tour(g, start, &h).expect("trimming keeps the walk Eulerian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Variant, verify_routing};
    use proptest::prelude::*;

    fn inst(n: usize, edges: &[(usize, usize, u64)], depots: &[usize], clients: &[usize], k: usize) -> VrpInstance {
        let mut g = Graph::new(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w);
        }
        VrpInstance::new(g, depots.to_vec(), clients.to_vec(), k, Variant::Vrp)
    }

    #[test]
    fn triangle_single_walk() {
        let i = inst(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)], &[0], &[0, 1, 2], 1);
        let h = EdgeMultiset::from([(0, 1), (1, 1), (2, 1)]);
        let r = extract_walks(&i, &h).unwrap();
        assert_eq!(r.walks.len(), 1);
        assert_eq!(r.walks[0].edges.len(), 3);
        assert_eq!(r.walks[0].start(), Some(0));
        assert!(verify_routing(&i, &r).feasible);
    }

    #[test]
    fn two_cycles_two_walks() {
        let i = inst(6, &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)], &[0, 3], &[1, 4], 2);
        let h: EdgeMultiset = (0..6).map(|e| (e, 1)).collect();
        let r = extract_walks(&i, &h).unwrap();
        assert_eq!(r.walks.len(), 2);
        assert!(verify_routing(&i, &r).feasible);
    }

    #[test]
    fn odd_degree_rejected() {
        let i = inst(3, &[(0, 1, 1), (1, 2, 1)], &[0], &[2], 1);
        let h = EdgeMultiset::from([(0, 1), (1, 2)]);
        assert_eq!(extract_walks(&i, &h).unwrap_err().to_string(), "not Eulerian at 0");
    }

    #[test]
    fn depot_client_gets_zero_length_walk() {
        let i = inst(2, &[(0, 1, 1)], &[0], &[0], 1);
        let r = extract_walks(&i, &EdgeMultiset::new()).unwrap();
        assert_eq!(r.walks, vec![Walk::single(0)]);
        let far = inst(2, &[(0, 1, 1)], &[0], &[1], 1);
        assert_eq!(extract_walks(&far, &EdgeMultiset::new()), Err(RoutingError::Uncovered(1)));
    }

    #[test]
    fn subgraph_examples() {
        let r = Routing { walks: vec![Walk { vertices: vec![0, 1, 0], edges: vec![0, 0] }], assignment: BTreeMap::new() };
        assert_eq!(walks_to_subgraph(&r), EdgeMultiset::from([(0, 2)]));
        assert!(walks_to_subgraph(&Routing::default()).is_empty());
        let two = Routing {
            walks: vec![Walk { vertices: vec![0, 1, 2, 0], edges: vec![0, 1, 2] }, Walk { vertices: vec![1, 0, 1], edges: vec![0, 0] }],
            assignment: BTreeMap::new(),
        };
        assert_eq!(walks_to_subgraph(&two)[&0], 3);
    }

    #[test]
    fn trim_reduces_heavy_edge() {
        let i = inst(3, &[(0, 1, 1), (1, 2, 1)], &[0], &[1, 2], 1);
        // 0-1 used four times
        let w = Walk { vertices: vec![0, 1, 0, 1, 2, 1, 0], edges: vec![0, 0, 0, 1, 1, 0] };
        let t = trim_walk(&i.graph, &w);
        assert_eq!(t.edges.len(), 4);
        assert!(t.contains(2));
    }

    proptest! {
        // random closed walks round-trip through the edge multiset
        #[test]
        fn round_trip_preserves_weight_and_clients(steps in proptest::collection::vec(0..4usize, 1..12)) {
            let edges = [(0, 1, 2), (1, 2, 3), (2, 3, 1), (3, 0, 4), (0, 2, 5)];
            let i = inst(4, &edges, &[0], &[1, 2, 3], 3);
            let g = &i.graph;
            let inc = g.incidence();
            let mut v = 0;
            let mut walk = Walk::single(0);
            for s in steps {
                let e = inc[v][s % inc[v].len()];
                v = g.edges[e].other(v);
                walk.vertices.push(v);
                walk.edges.push(e);
            }
            // return along the same steps
            let back: Vec<usize> = walk.edges.iter().rev().copied().collect();
            for e in back {
                v = g.edges[e].other(v);
                walk.vertices.push(v);
                walk.edges.push(e);
            }
            let covered: Vec<usize> = i.clients.iter().copied().filter(|&c| walk.contains(c)).collect();
            let r = Routing { assignment: assign_lowest(&covered, std::slice::from_ref(&walk)), walks: vec![walk] };
            let h = walks_to_subgraph(&r);
            let partial = VrpInstance { clients: covered.clone(), ..i.clone() };
            let again = extract_walks(&partial, &h).unwrap();
            prop_assert_eq!(again.weight(g), r.weight(g));
            prop_assert_eq!(again.weight(g), multiset_weight(g, &h));
            let cov: Vec<usize> = i.clients.iter().copied().filter(|&c| again.walks.iter().any(|w| w.contains(c))).collect();
            prop_assert_eq!(cov, covered);
        }
    }
}
