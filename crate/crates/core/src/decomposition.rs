//! Tree decompositions: min-fill construction, validation, PACE `.td` I/O, and
//! conversion to nice decompositions with one introduce-edge node per edge copy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{Graph, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TdError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid tree decomposition: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

fn parse_err(line: usize, message: impl Into<String>) -> TdError {
    TdError::Parse { line, message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub vertex_count: usize,
    /// Sorted vertex sets.
    pub bags: Vec<Vec<Vertex>>,
    pub tree_edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Largest bag size minus one; 0 when every bag is empty.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.tree_edges {
            if a < self.bags.len() && b < self.bags.len() {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }
}

/// Min-fill elimination ordering (ties: fewer neighbours, then lower id).
pub fn min_fill_ordering(g: &Graph) -> Vec<Vertex> {
    let n = g.vertex_count;
    let mut adj: Vec<BTreeSet<Vertex>> = g.adjacency();
    for (v, a) in adj.iter_mut().enumerate() {
        a.remove(&v);
    }
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, usize, Vertex)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let nb: Vec<Vertex> = adj[v].iter().copied().collect();
            let mut fill = 0;
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if !adj[nb[i]].contains(&nb[j]) {
                        fill += 1;
                    }
                }
            }
            let key = (fill, nb.len(), v);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let (_, _, v) = best.expect("some vertex alive");
        let nb: Vec<Vertex> = adj[v].iter().copied().collect();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                adj[nb[i]].insert(nb[j]);
                adj[nb[j]].insert(nb[i]);
            }
        }
        for &u in &nb {
            adj[u].remove(&v);
        }
        adj[v].clear();
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Builds a decomposition from an elimination ordering. Components are tied
/// together through one extra empty bag.
pub fn decompose_with_ordering(g: &Graph, order: &[Vertex]) -> TreeDecomposition {
    let n = g.vertex_count;
    if n == 0 {
        return TreeDecomposition { vertex_count: 0, bags: vec![Vec::new()], tree_edges: Vec::new() };
    }
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut adj: Vec<BTreeSet<Vertex>> = g.adjacency();
    for (v, a) in adj.iter_mut().enumerate() {
        a.remove(&v);
    }
    let mut bags = Vec::with_capacity(n + 1);
    let mut later_neighbours = Vec::with_capacity(n);
    for &v in order {
        let later: Vec<Vertex> = adj[v].iter().copied().filter(|&u| position[u] > position[v]).collect();
        for i in 0..later.len() {
            for j in i + 1..later.len() {
                adj[later[i]].insert(later[j]);
                adj[later[j]].insert(later[i]);
            }
        }
        let mut bag = later.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        later_neighbours.push(later);
    }
    let mut tree_edges = Vec::new();
    let mut roots = Vec::new();
    for (i, later) in later_neighbours.iter().enumerate() {
        match later.iter().min_by_key(|&&u| position[u]) {
            Some(&u) => tree_edges.push((i, position[u])),
            None => roots.push(i),
        }
    }
    if roots.len() > 1 {
        let hub = bags.len();
        bags.push(Vec::new());
        for r in roots {
            tree_edges.push((hub, r));
        }
    }
    TreeDecomposition { vertex_count: n, bags, tree_edges }
}

pub fn heuristic_decompose(g: &Graph) -> TreeDecomposition {
    decompose_with_ordering(g, &min_fill_ordering(g))
}

/// Lists every violated condition; empty means valid.
pub fn validate(td: &TreeDecomposition, g: &Graph) -> Vec<String> {
    let mut out = Vec::new();
    let nb = td.bags.len();
    if nb == 0 {
        out.push("no bags".to_string());
        return out;
    }
    if td.vertex_count != g.vertex_count {
        out.push(format!("decomposition has {} vertices, graph has {}", td.vertex_count, g.vertex_count));
    }
    for &(a, b) in &td.tree_edges {
        if a >= nb || b >= nb {
            out.push(format!("tree edge ({a},{b}) references a missing bag"));
        }
    }
    let adj = td.neighbours();
    if td.tree_edges.len() + 1 != nb || reachable(&adj, 0, |_| true).len() != nb {
        out.push("bags do not form a tree".to_string());
    }
    let mut holders: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= g.vertex_count {
                out.push(format!("bag {i} holds unknown vertex {v}"));
            }
            holders.entry(v).or_default().push(i);
        }
    }
    for v in 0..g.vertex_count {
        if !holders.contains_key(&v) {
            out.push(format!("vertex {v} is in no bag"));
        }
    }
    for (i, e) in g.edges.iter().enumerate() {
        if !td.bags.iter().any(|b| b.contains(&e.u) && b.contains(&e.v)) {
            out.push(format!("edge {i} {{{},{}}} is in no bag", e.u, e.v));
        }
    }
    for (v, hs) in &holders {
        let inside: BTreeSet<usize> = hs.iter().copied().collect();
        if reachable(&adj, hs[0], |b| inside.contains(&b)).len() != inside.len() {
            out.push(format!("bags containing vertex {v} are not connected"));
        }
    }
    out
}

fn reachable(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if allowed(y) && seen.insert(y) {
                stack.push(y);
            }
        }
    }
    seen
}

pub fn parse_td(text: &str) -> Result<TreeDecomposition, TdError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: Vec<Option<Vec<Vertex>>> = Vec::new();
    let mut tree_edges = Vec::new();
    let num = |tok: &str, line: usize| tok.parse::<usize>().map_err(|_| parse_err(line, format!("expected a number, got {tok:?}")));
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first() {
            None | Some(&"c") => continue,
            Some(&"s") => {
                if header.is_some() {
                    return Err(parse_err(line, "duplicate header"));
                }
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(parse_err(line, "header must be `s td <bags> <width+1> <n>`"));
                }
                let h = (num(toks[2], line)?, num(toks[3], line)?, num(toks[4], line)?);
                bags = vec![None; h.0];
                header = Some(h);
            }
            Some(&"b") => {
                let (_, _, n) = header.ok_or_else(|| parse_err(line, "bag before header"))?;
                if toks.len() < 2 {
                    return Err(parse_err(line, "bag line without id"));
                }
                let id = num(toks[1], line)?;
                if id == 0 || id > bags.len() {
                    return Err(parse_err(line, format!("bag id {id} out of range")));
                }
                if bags[id - 1].is_some() {
                    return Err(parse_err(line, format!("bag {id} listed twice")));
                }
                let mut bag = Vec::new();
                for t in &toks[2..] {
                    let v = num(t, line)?;
                    if v == 0 || v > n {
                        return Err(parse_err(line, format!("vertex {v} out of range")));
                    }
                    bag.push(v - 1);
                }
                bag.sort_unstable();
                bag.dedup();
                bags[id - 1] = Some(bag);
            }
            Some(_) => {
                header.ok_or_else(|| parse_err(line, "edge before header"))?;
                if toks.len() != 2 {
                    return Err(parse_err(line, "tree edge line must hold two bag ids"));
                }
                let (a, b) = (num(toks[0], line)?, num(toks[1], line)?);
                if a == 0 || b == 0 || a > bags.len() || b > bags.len() {
                    return Err(parse_err(line, format!("tree edge {a} {b} out of range")));
                }
                tree_edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, declared, n) = header.ok_or_else(|| parse_err(0, "missing header"))?;
    let mut out = Vec::with_capacity(bags.len());
    for (i, b) in bags.into_iter().enumerate() {
        out.push(b.ok_or_else(|| parse_err(0, format!("bag {} missing", i + 1)))?);
    }
    let largest = out.iter().map(Vec::len).max().unwrap_or(0);
    if largest != declared {
        return Err(parse_err(0, format!("header declares largest bag {declared}, bags have {largest}")));
    }
    Ok(TreeDecomposition { vertex_count: n, bags: out, tree_edges })
}

pub fn emit_td(td: &TreeDecomposition) -> String {
    let largest = td.bags.iter().map(Vec::len).max().unwrap_or(0);
    let mut s = format!("s td {} {} {}\n", td.bags.len(), largest, td.vertex_count);
    for (i, bag) in td.bags.iter().enumerate() {
        write!(s, "b {}", i + 1).unwrap();
        for v in bag {
            write!(s, " {}", v + 1).unwrap();
        }
        s.push('\n');
    }
    for &(a, b) in &td.tree_edges {
        writeln!(s, "{} {}", a + 1, b + 1).unwrap();
    }
    s
}

/// One copy of an edge to be introduced; `edge` indexes the original graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeCopy {
    pub edge: usize,
    pub copy: u32,
    pub u: Vertex,
    pub v: Vertex,
}

/// Every copy of every non-loop edge, following the graph's multiplicities.
pub fn edge_copies(g: &Graph) -> Vec<EdgeCopy> {
    let mut out = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if e.is_loop() {
            continue;
        }
        for c in 0..e.multiplicity {
            out.push(EdgeCopy { edge: i, copy: c, u: e.u, v: e.v });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    IntroduceVertex(Vertex),
    /// Index into the edge-copy list passed to `nicify_with`.
    IntroduceEdge(usize),
    Forget(Vertex),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    pub bag: Vec<Vertex>,
    pub children: Vec<usize>,
}

/// Nodes are stored in postorder; the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceDecomposition {
    pub nodes: Vec<NiceNode>,
    pub edges: Vec<EdgeCopy>,
}

impl NiceDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0).saturating_sub(1)
    }

    /// Structural check against the rules every node kind must satisfy.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut introduced = vec![0usize; self.edges.len()];
        for (i, node) in self.nodes.iter().enumerate() {
            if node.children.iter().any(|&c| c >= i) {
                out.push(format!("node {i} has a child after it"));
                continue;
            }
            let child_bag = |j: usize| &self.nodes[node.children[j]].bag;
            let with = |b: &Vec<Vertex>, v: Vertex| {
                let mut x = b.clone();
                x.push(v);
                x.sort_unstable();
                x
            };
            let ok = match node.kind {
                NodeKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NodeKind::IntroduceVertex(v) => {
                    node.children.len() == 1 && !child_bag(0).contains(&v) && node.bag == with(child_bag(0), v)
                }
                NodeKind::IntroduceEdge(e) => {
                    let ok = e < self.edges.len()
                        && node.children.len() == 1
                        && node.bag == *child_bag(0)
                        && node.bag.contains(&self.edges[e].u)
                        && node.bag.contains(&self.edges[e].v);
                    if ok {
                        introduced[e] += 1;
                    }
                    ok
                }
                NodeKind::Forget(v) => {
                    node.children.len() == 1 && !node.bag.contains(&v) && *child_bag(0) == with(&node.bag, v)
                }
                NodeKind::Join => node.children.len() == 2 && node.bag == *child_bag(0) && node.bag == *child_bag(1),
            };
            if !ok {
                out.push(format!("node {i} ({:?}) breaks its bag rule", node.kind));
            }
        }
        match self.nodes.last() {
            Some(r) if r.bag.is_empty() => {}
            _ => out.push("root bag not empty".to_string()),
        }
        for (e, &c) in introduced.iter().enumerate() {
            if c != 1 {
                out.push(format!("edge copy {e} introduced {c} times"));
            }
        }
        out
    }
}

/// Nice decomposition introducing every copy of every non-loop edge of `g`.
pub fn nicify(td: &TreeDecomposition, g: &Graph) -> Result<NiceDecomposition, TdError> {
    nicify_with(td, g, edge_copies(g))
}

/// Nice decomposition introducing exactly the given edge copies. Each copy is
/// introduced directly below the forget node of whichever endpoint is forgotten
/// first, copies sharing that spot ordered by (edge, copy).
pub fn nicify_with(td: &TreeDecomposition, g: &Graph, mut edges: Vec<EdgeCopy>) -> Result<NiceDecomposition, TdError> {
    let violations = validate(td, g);
    if !violations.is_empty() {
        return Err(TdError::Invalid(violations));
    }
    edges.sort();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count];
    for (i, e) in edges.iter().enumerate() {
        incident[e.u].push(i);
        incident[e.v].push(i);
    }
    let mut b = Builder { nodes: Vec::new(), edges: &edges, incident, placed: vec![false; edges.len()] };

    // root the tree at bag 0 and compute a DFS order
    let adj = td.neighbours();
    let mut parent = vec![usize::MAX; td.bags.len()];
    let mut order = vec![0];
    let mut seen = vec![false; td.bags.len()];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                order.push(y);
            }
        }
        i += 1;
    }
    let mut children = vec![Vec::new(); td.bags.len()];
    for &x in &order[1..] {
        children[parent[x]].push(x);
    }

    let mut top: Vec<usize> = vec![usize::MAX; td.bags.len()];
    for &t in order.iter().rev() {
        let bag = &td.bags[t];
        let mut subs = Vec::new();
        for &c in &children[t] {
            let mut cur = top[c];
            let leaving: Vec<Vertex> = td.bags[c].iter().copied().filter(|v| !bag.contains(v)).collect();
            for v in leaving {
                cur = b.forget(cur, v);
            }
            let entering: Vec<Vertex> = bag.iter().copied().filter(|v| !td.bags[c].contains(v)).collect();
            for v in entering {
                cur = b.introduce(cur, v);
            }
            subs.push(cur);
        }
        let node = if subs.is_empty() {
            let mut cur = b.push(NodeKind::Leaf, Vec::new(), Vec::new());
            for &v in bag {
                cur = b.introduce(cur, v);
            }
            cur
        } else {
            let mut cur = subs[0];
            for &s in &subs[1..] {
                cur = b.push(NodeKind::Join, bag.clone(), vec![cur, s]);
            }
            cur
        };
        top[t] = node;
    }
    let mut cur = top[0];
    for &v in &td.bags[0] {
        cur = b.forget(cur, v);
    }
    debug_assert_eq!(cur, b.nodes.len() - 1);
    Ok(NiceDecomposition { nodes: b.nodes, edges })
}

struct Builder<'a> {
    nodes: Vec<NiceNode>,
    edges: &'a [EdgeCopy],
    incident: Vec<Vec<usize>>,
    placed: Vec<bool>,
}

impl Builder<'_> {
    fn push(&mut self, kind: NodeKind, bag: Vec<Vertex>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    fn introduce(&mut self, child: usize, v: Vertex) -> usize {
        let mut bag = self.nodes[child].bag.clone();
        bag.push(v);
        bag.sort_unstable();
        self.push(NodeKind::IntroduceVertex(v), bag, vec![child])
    }

    fn forget(&mut self, child: usize, v: Vertex) -> usize {
        let mut cur = child;
        let bag = self.nodes[child].bag.clone();
        for k in 0..self.incident[v].len() {
            let e = self.incident[v][k];
            if self.placed[e] {
                continue;
            }
            let other = if self.edges[e].u == v { self.edges[e].v } else { self.edges[e].u };
            debug_assert!(bag.contains(&other));
            self.placed[e] = true;
            cur = self.push(NodeKind::IntroduceEdge(e), bag.clone(), vec![cur]);
        }
        let smaller: Vec<Vertex> = bag.into_iter().filter(|&x| x != v).collect();
        self.push(NodeKind::Forget(v), smaller, vec![cur])
    }
}
