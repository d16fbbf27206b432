//! Problem instances, routings, and their JSON documents.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

/// Vertex id, dense in `[0, n)`.
pub type Vertex = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "VRP")]
    Vrp,
    #[serde(rename = "EVRP")]
    Evrp,
    #[serde(rename = "LoadCVRP")]
    LoadCvrp,
    #[serde(rename = "GasCVRP")]
    GasCvrp,
    #[serde(rename = "LoadGasCVRP")]
    LoadGasCvrp,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Vrp => "VRP",
            Variant::Evrp => "EVRP",
            Variant::LoadCvrp => "LoadCVRP",
            Variant::GasCvrp => "GasCVRP",
            Variant::LoadGasCvrp => "LoadGasCVRP",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Some(match s {
            "VRP" => Variant::Vrp,
            "EVRP" => Variant::Evrp,
            "LoadCVRP" => Variant::LoadCvrp,
            "GasCVRP" => Variant::GasCvrp,
            "LoadGasCVRP" => Variant::LoadGasCvrp,
            _ => return None,
        })
    }

    pub fn has_load(self) -> bool {
        matches!(self, Variant::LoadCvrp | Variant::LoadGasCvrp)
    }

    pub fn has_gas(self) -> bool {
        matches!(self, Variant::GasCvrp | Variant::LoadGasCvrp)
    }

    pub fn is_capacitated(self) -> bool {
        self.has_load() || self.has_gas()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub weight: u64,
    /// Number of parallel copies of this edge, each with the same weight.
    pub multiplicity: u32,
}

impl Edge {
    pub fn new(u: Vertex, v: Vertex, weight: u64) -> Edge {
        Edge { u, v, weight, multiplicity: 1 }
    }

    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    pub vertex_count: usize,
    pub edges: Vec<Edge>,
}

impl Graph {
    pub fn new(vertex_count: usize) -> Graph {
        Graph { vertex_count, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex, weight: u64) -> usize {
        self.edges.push(Edge::new(u, v, weight));
        self.edges.len() - 1
    }

    /// Edge indices incident to each vertex (loops listed once).
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            if e.v != e.u {
                inc[e.v].push(i);
            }
        }
        inc
    }

    /// Simple adjacency sets, ignoring weights, multiplicities and loops.
    pub fn adjacency(&self) -> Vec<BTreeSet<Vertex>> {
        let mut adj = vec![BTreeSet::new(); self.vertex_count];
        for e in &self.edges {
            if e.u != e.v {
                adj[e.u].insert(e.v);
                adj[e.v].insert(e.u);
            }
        }
        adj
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight * e.multiplicity as u64).sum()
    }
}

/// An instance of one of the five routing variants.
///
/// Optional fields are present exactly when the variant needs them; `parse_instance`
/// and `VrpInstance::validate` enforce that.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VrpInstance {
    pub graph: Graph,
    pub depots: Vec<Vertex>,
    pub clients: Vec<Vertex>,
    pub vehicles: usize,
    pub variant: Variant,
    /// Per edge usage cap, aligned with `graph.edges` (EVRP only).
    pub edge_caps: Option<Vec<u64>>,
    pub load_cap: Option<u64>,
    pub demands: Option<BTreeMap<Vertex, u64>>,
    pub gas_cap: Option<u64>,
    pub weight_bound: Option<u64>,
    /// Optional display names, never used by the solvers.
    pub names: Option<Vec<String>>,
}

impl VrpInstance {
    /// A bare instance with no capacity fields; callers fill in what the variant needs.
    pub fn new(graph: Graph, depots: Vec<Vertex>, clients: Vec<Vertex>, vehicles: usize, variant: Variant) -> VrpInstance {
        let mut depots = depots;
        depots.sort_unstable();
        depots.dedup();
        let mut clients = clients;
        clients.sort_unstable();
        clients.dedup();
        VrpInstance {
            graph,
            depots,
            clients,
            vehicles,
            variant,
            edge_caps: None,
            load_cap: None,
            demands: None,
            gas_cap: None,
            weight_bound: None,
            names: None,
        }
    }

    pub fn n(&self) -> usize {
        self.graph.vertex_count
    }

    pub fn is_depot(&self, v: Vertex) -> bool {
        self.depots.binary_search(&v).is_ok()
    }

    pub fn is_client(&self, v: Vertex) -> bool {
        self.clients.binary_search(&v).is_ok()
    }

    /// Demand of a client; 1 when the variant carries no demands.
    pub fn demand(&self, c: Vertex) -> u64 {
        self.demands.as_ref().and_then(|d| d.get(&c).copied()).unwrap_or(1)
    }

    /// Usage cap of an edge entry over all its parallel copies, `None` meaning unbounded.
    pub fn edge_usage_cap(&self, edge: usize) -> Option<u64> {
        self.edge_caps
            .as_ref()
            .map(|caps| caps[edge].saturating_mul(self.graph.edges[edge].multiplicity as u64))
    }

    pub fn validate(&self, opts: &ParseOptions) -> Result<(), InstanceError> {
        let n = self.graph.vertex_count;
        for (i, e) in self.graph.edges.iter().enumerate() {
            if e.u >= n || e.v >= n {
                return Err(InstanceError::at(format!("edges[{i}]"), format!("vertex out of range [0, {n})")));
            }
            if e.u == e.v && !opts.allow_loops {
                return Err(InstanceError::at(format!("edges[{i}]"), "self-loop not allowed"));
            }
            if e.multiplicity == 0 {
                return Err(InstanceError::at(format!("edges[{i}]"), "multiplicity must be positive"));
            }
        }
        if self.depots.is_empty() {
            return Err(InstanceError::at("depots", "at least one depot required"));
        }
        for (field, set) in [("depots", &self.depots), ("clients", &self.clients)] {
            for (i, &v) in set.iter().enumerate() {
                if v >= n {
                    return Err(InstanceError::at(format!("{field}[{i}]"), format!("vertex out of range [0, {n})")));
                }
            }
        }
        let variant = self.variant;
        let check = |present: bool, field: &str, required: bool| -> Result<(), InstanceError> {
            if present && !required {
                Err(InstanceError::at(field, format!("field {field} forbidden for {variant}")))
            } else if !present && required {
                Err(InstanceError::at(field, format!("field {field} required for {variant}")))
            } else {
                Ok(())
            }
        };
        check(self.edge_caps.is_some(), "kappa", variant == Variant::Evrp)?;
        check(self.load_cap.is_some(), "ell", variant.has_load())?;
        check(self.demands.is_some(), "demands", variant.has_load())?;
        check(self.gas_cap.is_some(), "g", variant.has_gas())?;
        if let Some(caps) = &self.edge_caps {
            if caps.len() != self.graph.edges.len() {
                return Err(InstanceError::at("kappa", "must have one entry per edge"));
            }
        }
        if let Some(ell) = self.load_cap {
            if ell == 0 {
                return Err(InstanceError::at("ell", "load capacity must be positive"));
            }
        }
        if let Some(demands) = &self.demands {
            for (&c, &d) in demands {
                if !self.is_client(c) {
                    return Err(InstanceError::at(format!("demands.{c}"), "demand given for a non-client"));
                }
                if d == 0 {
                    return Err(InstanceError::at(format!("demands.{c}"), "demand must be positive"));
                }
            }
            for &c in &self.clients {
                if !demands.contains_key(&c) {
                    return Err(InstanceError::at(format!("demands.{c}"), "missing demand for client"));
                }
            }
        }
        if let Some(names) = &self.names {
            if names.len() != n {
                return Err(InstanceError::at("names", "must have one entry per vertex"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    pub allow_loops: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("malformed document: {0}")]
    Syntax(String),
    #[error("contraction unsupported for {0}")]
    UnsupportedVariant(Variant),
}

impl InstanceError {
    pub fn at(path: impl Into<String>, message: impl Into<String>) -> InstanceError {
        InstanceError::Field { path: path.into(), message: message.into() }
    }
}

fn as_u64(v: &Value, path: &str) -> Result<u64, InstanceError> {
    v.as_u64().ok_or_else(|| InstanceError::at(path, "expected a nonnegative integer"))
}

fn as_usize_list(v: &Value, path: &str) -> Result<Vec<usize>, InstanceError> {
    let arr = v.as_array().ok_or_else(|| InstanceError::at(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| as_u64(x, &format!("{path}[{i}]")).map(|x| x as usize))
        .collect()
}

fn parse_json(text: &str) -> Result<Map<String, Value>, InstanceError> {
    let value: Value = serde_json::from_str(text).map_err(|e| InstanceError::Syntax(e.to_string()))?;
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(InstanceError::Syntax("top level must be an object".into())),
    }
}

const INSTANCE_FIELDS: &[&str] = &["n", "variant", "edges", "depots", "clients", "k", "kappa", "ell", "demands", "g", "r", "names"];

pub fn parse_instance(text: &str) -> Result<VrpInstance, InstanceError> {
    parse_instance_with(text, &ParseOptions::default())
}

pub fn parse_instance_with(text: &str, opts: &ParseOptions) -> Result<VrpInstance, InstanceError> {
    let doc = parse_json(text)?;
    for key in doc.keys() {
        if !INSTANCE_FIELDS.contains(&key.as_str()) {
            return Err(InstanceError::at(key.clone(), "unknown field"));
        }
    }
    let get = |key: &str| doc.get(key).ok_or_else(|| InstanceError::at(key, "missing field"));

    let n = as_u64(get("n")?, "n")? as usize;
    let variant_str = get("variant")?.as_str().ok_or_else(|| InstanceError::at("variant", "expected a string"))?;
    let variant = Variant::parse(variant_str).ok_or_else(|| InstanceError::at("variant", format!("unknown variant {variant_str}")))?;

    let edge_values = get("edges")?.as_array().ok_or_else(|| InstanceError::at("edges", "expected an array"))?;
    let mut graph = Graph::new(n);
    for (i, ev) in edge_values.iter().enumerate() {
        let path = format!("edges[{i}]");
        let parts = ev.as_array().ok_or_else(|| InstanceError::at(path.clone(), "expected [u, v, w] or [u, v, w, mult]"))?;
        if parts.len() != 3 && parts.len() != 4 {
            return Err(InstanceError::at(path, "expected [u, v, w] or [u, v, w, mult]"));
        }
        let u = as_u64(&parts[0], &path)? as usize;
        let v = as_u64(&parts[1], &path)? as usize;
        let weight = as_u64(&parts[2], &path)?;
        let multiplicity = if parts.len() == 4 {
            let m = as_u64(&parts[3], &path)?;
            u32::try_from(m).map_err(|_| InstanceError::at(path.clone(), "multiplicity too large"))?
        } else {
            1
        };
        graph.edges.push(Edge { u, v, weight, multiplicity });
    }

    let depots = as_usize_list(get("depots")?, "depots")?;
    let clients = as_usize_list(get("clients")?, "clients")?;
    let vehicles = as_u64(get("k")?, "k")? as usize;
    let mut inst = VrpInstance::new(graph, depots, clients, vehicles, variant);

    if let Some(v) = doc.get("kappa") {
        let caps = v.as_array().ok_or_else(|| InstanceError::at("kappa", "expected an array"))?;
        inst.edge_caps = Some(
            caps.iter()
                .enumerate()
                .map(|(i, x)| as_u64(x, &format!("kappa[{i}]")))
                .collect::<Result<_, _>>()?,
        );
    }
    if let Some(v) = doc.get("ell") {
        inst.load_cap = Some(as_u64(v, "ell")?);
    }
    if let Some(v) = doc.get("demands") {
        let m = v.as_object().ok_or_else(|| InstanceError::at("demands", "expected an object"))?;
        let mut demands = BTreeMap::new();
        for (key, val) in m {
            let path = format!("demands.{key}");
            let c: usize = key.parse().map_err(|_| InstanceError::at(path.clone(), "key must be a vertex id"))?;
            demands.insert(c, as_u64(val, &path)?);
        }
        inst.demands = Some(demands);
    }
    if let Some(v) = doc.get("g") {
        inst.gas_cap = Some(as_u64(v, "g")?);
    }
    if let Some(v) = doc.get("r") {
        inst.weight_bound = Some(as_u64(v, "r")?);
    }
    if let Some(v) = doc.get("names") {
        let arr = v.as_array().ok_or_else(|| InstanceError::at("names", "expected an array"))?;
        inst.names = Some(
            arr.iter()
                .enumerate()
                .map(|(i, x)| x.as_str().map(str::to_owned).ok_or_else(|| InstanceError::at(format!("names[{i}]"), "expected a string")))
                .collect::<Result<_, _>>()?,
        );
    }
    inst.validate(opts)?;
    Ok(inst)
}

fn numeric_map<T: Into<Value> + Copy>(m: &BTreeMap<usize, T>) -> Value {
    let mut out = Map::new();
    for (k, v) in m {
        out.insert(k.to_string(), (*v).into());
    }
    Value::Object(out)
}

pub fn instance_to_value(inst: &VrpInstance) -> Value {
    let mut doc = Map::new();
    doc.insert("n".into(), inst.graph.vertex_count.into());
    doc.insert("variant".into(), inst.variant.name().into());
    let edges: Vec<Value> = inst
        .graph
        .edges
        .iter()
        .map(|e| {
            let mut parts = vec![Value::from(e.u), Value::from(e.v), Value::from(e.weight)];
            if e.multiplicity != 1 {
                parts.push(Value::from(e.multiplicity));
            }
            Value::Array(parts)
        })
        .collect();
    doc.insert("edges".into(), Value::Array(edges));
    doc.insert("depots".into(), inst.depots.clone().into());
    doc.insert("clients".into(), inst.clients.clone().into());
    doc.insert("k".into(), inst.vehicles.into());
    if let Some(caps) = &inst.edge_caps {
        doc.insert("kappa".into(), caps.clone().into());
    }
    if let Some(ell) = inst.load_cap {
        doc.insert("ell".into(), ell.into());
    }
    if let Some(d) = &inst.demands {
        doc.insert("demands".into(), numeric_map(d));
    }
    if let Some(g) = inst.gas_cap {
        doc.insert("g".into(), g.into());
    }
    if let Some(r) = inst.weight_bound {
        doc.insert("r".into(), r.into());
    }
    if let Some(names) = &inst.names {
        doc.insert("names".into(), names.clone().into());
    }
    Value::Object(doc)
}

/// Canonical text form: compact JSON with a trailing newline.
pub fn emit_instance(inst: &VrpInstance) -> String {
    let mut s = serde_json::to_string(&instance_to_value(inst)).expect("instance serializes");
    s.push('\n');
    s
}

/// A closed walk. `edges[i]` is the edge entry used between `vertices[i]` and `vertices[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Walk {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<usize>,
}

impl Walk {
    pub fn single(v: Vertex) -> Walk {
        Walk { vertices: vec![v], edges: Vec::new() }
    }

    pub fn start(&self) -> Option<Vertex> {
        self.vertices.first().copied()
    }

    pub fn weight(&self, g: &Graph) -> u64 {
        self.edges.iter().map(|&e| g.edges[e].weight).sum()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Routing {
    pub walks: Vec<Walk>,
    /// Client to walk index.
    pub assignment: BTreeMap<Vertex, usize>,
}

impl Routing {
    pub fn weight(&self, g: &Graph) -> u64 {
        self.walks.iter().map(|w| w.weight(g)).sum()
    }
}

pub fn routing_to_value(r: &Routing) -> Value {
    let walks: Vec<Value> = r
        .walks
        .iter()
        .map(|w| {
            let mut m = Map::new();
            m.insert("vertices".into(), w.vertices.clone().into());
            m.insert("edges".into(), w.edges.clone().into());
            Value::Object(m)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("walks".into(), Value::Array(walks));
    doc.insert("assignment".into(), numeric_map(&r.assignment.iter().map(|(&c, &i)| (c, i as u64)).collect()));
    Value::Object(doc)
}

pub fn emit_routing(r: &Routing) -> String {
    let mut s = serde_json::to_string(&routing_to_value(r)).expect("routing serializes");
    s.push('\n');
    s
}

/// Parses a routing document. Walks are either plain vertex arrays or objects with
/// `vertices` and optional `edges`; missing edge choices are left empty and resolved
/// against an instance by [`resolve_walk_edges`].
pub fn parse_routing(text: &str) -> Result<Routing, InstanceError> {
    let doc = parse_json(text)?;
    routing_from_map(&doc)
}

pub fn routing_from_map(doc: &Map<String, Value>) -> Result<Routing, InstanceError> {
    let walks_v = doc
        .get("walks")
        .and_then(Value::as_array)
        .ok_or_else(|| InstanceError::at("walks", "expected an array"))?;
    let mut walks = Vec::new();
    for (i, wv) in walks_v.iter().enumerate() {
        let path = format!("walks[{i}]");
        let walk = match wv {
            Value::Array(_) => Walk { vertices: as_usize_list(wv, &path)?, edges: Vec::new() },
            Value::Object(m) => {
                let vertices = as_usize_list(m.get("vertices").ok_or_else(|| InstanceError::at(path.clone(), "missing vertices"))?, &format!("{path}.vertices"))?;
                let edges = match m.get("edges") {
                    Some(e) => as_usize_list(e, &format!("{path}.edges"))?,
                    None => Vec::new(),
                };
                Walk { vertices, edges }
            }
            _ => return Err(InstanceError::at(path, "expected an array or object")),
        };
        if walk.vertices.is_empty() {
            return Err(InstanceError::at(format!("walks[{i}]"), "walk must contain at least one vertex"));
        }
        if !walk.edges.is_empty() && walk.edges.len() + 1 != walk.vertices.len() {
            return Err(InstanceError::at(format!("walks[{i}].edges"), "must have one entry per step"));
        }
        walks.push(walk);
    }
    let assign_v = doc
        .get("assignment")
        .and_then(Value::as_object)
        .ok_or_else(|| InstanceError::at("assignment", "expected an object"))?;
    let mut assignment = BTreeMap::new();
    for (key, val) in assign_v {
        let path = format!("assignment.{key}");
        let c: usize = key.parse().map_err(|_| InstanceError::at(path.clone(), "key must be a vertex id"))?;
        assignment.insert(c, as_u64(val, &path)? as usize);
    }
    Ok(Routing { walks, assignment })
}

/// Fills in missing edge choices with the cheapest edge between consecutive vertices
/// (lowest index on ties). Returns the offending step if two consecutive vertices are
/// not adjacent.
pub fn resolve_walk_edges(g: &Graph, walk: &mut Walk) -> Result<(), usize> {
    if walk.vertices.len() <= 1 || !walk.edges.is_empty() {
        return Ok(());
    }
    let mut edges = Vec::with_capacity(walk.vertices.len() - 1);
    for (step, pair) in walk.vertices.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let best = g
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| (e.u == a && e.v == b) || (e.u == b && e.v == a))
            .min_by_key(|(i, e)| (e.weight, *i))
            .map(|(i, _)| i);
        match best {
            Some(i) => edges.push(i),
            None => return Err(step),
        }
    }
    walk.edges = edges;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// When false, a walk consisting of a single depot vertex does not count as
    /// visiting that vertex, so a depot-client needs a walk with at least one edge.
    pub zero_length_walks_visit: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { zero_length_walks_visit: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub feasible: bool,
    pub total_weight: u64,
    pub violations: Vec<String>,
}

pub fn verify_routing(inst: &VrpInstance, routing: &Routing) -> VerificationReport {
    verify_routing_with(inst, routing, &VerifyOptions::default())
}

pub fn verify_routing_with(inst: &VrpInstance, routing: &Routing, opts: &VerifyOptions) -> VerificationReport {
    let g = &inst.graph;
    let mut violations = Vec::new();
    let mut total: u64 = 0;
    let mut usage: BTreeMap<usize, u64> = BTreeMap::new();
    let mut walks = routing.walks.clone();

    if walks.len() > inst.vehicles {
        violations.push(format!("too many walks: {} > k = {}", walks.len(), inst.vehicles));
    }
    let mut well_formed = vec![true; walks.len()];
    for (i, walk) in walks.iter_mut().enumerate() {
        if walk.vertices.iter().any(|&v| v >= g.vertex_count) {
            violations.push(format!("walk {i} references a vertex out of range"));
            well_formed[i] = false;
            continue;
        }
        if let Err(step) = resolve_walk_edges(g, walk) {
            violations.push(format!("walk {i} step {step}: no edge between {} and {}", walk.vertices[step], walk.vertices[step + 1]));
            well_formed[i] = false;
            continue;
        }
        for (step, &e) in walk.edges.iter().enumerate() {
            let (a, b) = (walk.vertices[step], walk.vertices[step + 1]);
            match g.edges.get(e) {
                Some(edge) if (edge.u == a && edge.v == b) || (edge.u == b && edge.v == a) => {
                    total += edge.weight;
                    *usage.entry(e).or_insert(0) += 1;
                }
                _ => {
                    violations.push(format!("walk {i} step {step}: edge {e} does not join {a} and {b}"));
                    well_formed[i] = false;
                }
            }
        }
        let first = walk.vertices[0];
        if walk.vertices.last() != Some(&first) {
            violations.push(format!("walk {i} is not closed"));
        }
        if !inst.is_depot(first) {
            violations.push(format!("walk {i} does not start at a depot"));
        }
    }

    if let Some(_caps) = &inst.edge_caps {
        for (&e, &used) in &usage {
            let cap = inst.edge_usage_cap(e).unwrap_or(u64::MAX);
            if used > cap {
                violations.push(format!("edge {e} used {used} times, capacity {cap}"));
            }
        }
    }

    let visits = |walk: &Walk, c: Vertex| -> bool {
        if walk.edges.is_empty() && walk.vertices.len() == 1 && !opts.zero_length_walks_visit {
            return false;
        }
        walk.contains(c)
    };
    let mut load = vec![0u64; walks.len()];
    for &c in &inst.clients {
        match routing.assignment.get(&c) {
            None => violations.push(format!("client {c} not assigned")),
            Some(&idx) if idx >= walks.len() => violations.push(format!("client {c} assigned to missing walk {idx}")),
            Some(&idx) => {
                if well_formed[idx] && !visits(&walks[idx], c) {
                    violations.push(format!("client {c} not on walk {idx}"));
                }
                load[idx] += inst.demand(c);
            }
        }
    }
    for &c in routing.assignment.keys() {
        if !inst.is_client(c) {
            violations.push(format!("assignment names non-client {c}"));
        }
    }
    if let Some(ell) = inst.load_cap {
        for (i, &l) in load.iter().enumerate() {
            if l > ell {
                violations.push(format!("load exceeded on walk {i}"));
            }
        }
    }
    if let Some(gas) = inst.gas_cap {
        for (i, walk) in walks.iter().enumerate() {
            if well_formed[i] && walk.weight(g) > gas {
                violations.push(format!("gas exceeded on walk {i}"));
            }
        }
    }
    if let Some(r) = inst.weight_bound {
        if total > r {
            violations.push(format!("weight {total} exceeds bound {r}"));
        }
    }
    VerificationReport { feasible: violations.is_empty(), total_weight: total, violations }
}

/// Merges the endpoints of every zero-weight edge.
///
/// Returns the contracted instance and the map from old to new vertex ids. New ids
/// follow the smallest original id of each merged group. Edges that end up inside a
/// group are dropped.
pub fn contract_zero_edges(inst: &VrpInstance) -> Result<(VrpInstance, Vec<Vertex>), InstanceError> {
    if !matches!(inst.variant, Variant::Vrp | Variant::GasCvrp) {
        return Err(InstanceError::UnsupportedVariant(inst.variant));
    }
    let n = inst.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for e in &inst.graph.edges {
        if e.weight == 0 {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut new_id = vec![usize::MAX; n];
    let mut map = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        let r = find(&mut parent, v);
        if new_id[r] == usize::MAX {
            new_id[r] = next;
            next += 1;
        }
        map[v] = new_id[r];
    }
    let mut graph = Graph::new(next);
    for e in &inst.graph.edges {
        let (a, b) = (map[e.u], map[e.v]);
        if a != b {
            graph.edges.push(Edge { u: a, v: b, weight: e.weight, multiplicity: e.multiplicity });
        }
    }
    let depots = inst.depots.iter().map(|&d| map[d]).collect();
    let clients = inst.clients.iter().map(|&c| map[c]).collect();
    let mut out = VrpInstance::new(graph, depots, clients, inst.vehicles, inst.variant);
    out.gas_cap = inst.gas_cap;
    out.weight_bound = inst.weight_bound;
    Ok((out, map))
}
