//! Exact heterogeneous multidimensional bin packing with fingerprint validity
//! predicates, plus plain one-dimensional bin packing on top of it.
//!
//! Items with equal (size, fingerprint) are interchangeable, so the search runs over
//! bin configurations (count per item key) and memoizes failed residual censuses.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::instance::Vertex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BinPackError {
    #[error("item {0} has zero size")]
    ZeroSizeItem(usize),
    #[error("item {item} has {got} dimensions, expected {expected}")]
    Dimension { item: usize, got: usize, expected: usize },
    #[error("kind {kind} has {got} dimensions, expected {expected}")]
    KindDimension { kind: usize, got: usize, expected: usize },
}

pub type Validity<F> = Arc<dyn Fn(&[F]) -> bool + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HetItem<F> {
    pub size: Vec<u64>,
    pub fingerprint: F,
}

#[derive(Clone)]
pub struct BinKind<F> {
    pub capacity: Vec<u64>,
    pub count: usize,
    /// Receives the sorted fingerprint multiset of one bin.
    pub valid: Validity<F>,
}

impl<F> fmt::Debug for BinKind<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BinKind").field("capacity", &self.capacity).field("count", &self.count).finish()
    }
}

pub fn always_valid<F>() -> Validity<F> {
    Arc::new(|_: &[F]| true)
}

#[derive(Clone, Debug)]
pub struct HetInstance<F> {
    pub dims: usize,
    pub items: Vec<HetItem<F>>,
    pub kinds: Vec<BinKind<F>>,
}

/// Count per item key.
pub type Configuration = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Packing {
    /// (kind, item indices) for every bin, kinds in input order.
    pub bins: Vec<(usize, Vec<usize>)>,
}

/// Distinct (size, fingerprint) pairs in sorted order and how many items carry each.
pub fn item_keys<F: Clone + Ord>(items: &[HetItem<F>]) -> (Vec<(Vec<u64>, F)>, Vec<u32>) {
    let mut census: BTreeMap<(Vec<u64>, F), u32> = BTreeMap::new();
    for it in items {
        *census.entry((it.size.clone(), it.fingerprint.clone())).or_insert(0) += 1;
    }
    let keys: Vec<_> = census.keys().cloned().collect();
    let counts = census.into_values().collect();
    (keys, counts)
}

impl<F: Clone + Ord> HetInstance<F> {
    pub fn check(&self) -> Result<(), BinPackError> {
        for (i, it) in self.items.iter().enumerate() {
            if it.size.len() != self.dims {
                return Err(BinPackError::Dimension { item: i, got: it.size.len(), expected: self.dims });
            }
            if it.size.iter().all(|&s| s == 0) {
                return Err(BinPackError::ZeroSizeItem(i));
            }
        }
        for (i, k) in self.kinds.iter().enumerate() {
            if k.capacity.len() != self.dims {
                return Err(BinPackError::KindDimension { kind: i, got: k.capacity.len(), expected: self.dims });
            }
        }
        Ok(())
    }

    fn fingerprints(keys: &[(Vec<u64>, F)], config: &[u32]) -> Vec<F> {
        let mut out = Vec::new();
        for (k, &c) in keys.iter().zip(config) {
            for _ in 0..c {
                out.push(k.1.clone());
            }
        }
        out.sort();
        out
    }
}

fn norm1(v: &[u64]) -> u64 {
    v.iter().sum()
}

/// `(max_i ||B_i||_1^d + 1)^{#keys}`, saturating.
pub fn configuration_bound(max_norm: u64, dims: usize, keys: usize) -> u128 {
    let base = (max_norm as u128).saturating_pow(dims as u32).saturating_add(1);
    base.saturating_pow(keys as u32)
}

/// All configurations within the capacity of `kind` that its validity predicate accepts.
pub fn enumerate_configurations<F: Clone + Ord>(inst: &HetInstance<F>, kind: usize) -> Result<Vec<Configuration>, BinPackError> {
    inst.check()?;
    let (keys, _) = item_keys(&inst.items);
    let cap = &inst.kinds[kind].capacity;
    let mut out = Vec::new();
    let mut current = vec![0u32; keys.len()];
    let mut load = vec![0u64; inst.dims];
    fn rec<F>(keys: &[(Vec<u64>, F)], cap: &[u64], i: usize, current: &mut Vec<u32>, load: &mut Vec<u64>, out: &mut Vec<Configuration>) {
        if i == keys.len() {
            out.push(current.clone());
            return;
        }
        rec(keys, cap, i + 1, current, load, out);
        let size = &keys[i].0;
        let mut added = 0;
        while load.iter().zip(size).zip(cap).all(|((l, s), c)| l + s <= *c) {
            for (l, s) in load.iter_mut().zip(size) {
                *l += s;
            }
            current[i] += 1;
            added += 1;
            rec(keys, cap, i + 1, current, load, out);
        }
        for (l, s) in load.iter_mut().zip(size) {
            *l -= s * added;
        }
        current[i] = 0;
    }
    rec(&keys, cap, 0, &mut current, &mut load, &mut out);
    let max_norm = inst.kinds.iter().map(|k| norm1(&k.capacity)).max().unwrap_or(0);
    assert!(
        (out.len() as u128) <= configuration_bound(max_norm, inst.dims, keys.len()),
        "configuration count exceeds its bound"
    );
    let valid = &inst.kinds[kind].valid;
    out.retain(|c| valid(&HetInstance::fingerprints(&keys, c)));
    Ok(out)
}

/// Exact feasibility with witness. Every kind receives exactly `count` bins, so an
/// empty bin is only allowed if its kind's predicate accepts the empty multiset.
pub fn solve_het<F: Clone + Ord>(inst: &HetInstance<F>) -> Result<Option<Packing>, BinPackError> {
    inst.check()?;
    let (keys, census) = item_keys(&inst.items);
    let mut configs = Vec::with_capacity(inst.kinds.len());
    for i in 0..inst.kinds.len() {
        let mut cs = enumerate_configurations(inst, i)?;
        cs.retain(|c| c.iter().zip(&census).all(|(a, b)| a <= b));
        configs.push(cs);
    }
    // remaining capacity per dimension once kind i (and later ones) are still to fill
    let mut suffix_cap = vec![vec![0u128; inst.dims]; inst.kinds.len() + 1];
    for i in (0..inst.kinds.len()).rev() {
        for d in 0..inst.dims {
            suffix_cap[i][d] = suffix_cap[i + 1][d] + inst.kinds[i].capacity[d] as u128 * inst.kinds[i].count as u128;
        }
    }
    let sizes: Vec<&Vec<u64>> = keys.iter().map(|k| &k.0).collect();
    let mut search = Search { configs: &configs, kinds: &inst.kinds, sizes, dims: inst.dims, failed: HashSet::new(), chosen: Vec::new() };
    let mut residual = census.clone();
    let first = inst.kinds.first().map_or(0, |k| k.count);
    if !search.run(0, first, 0, &mut residual, &suffix_cap) {
        return Ok(None);
    }
    // hand out concrete items per key
    let mut pools: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, it) in inst.items.iter().enumerate() {
        let k = keys.binary_search_by(|probe| (&probe.0, &probe.1).cmp(&(&it.size, &it.fingerprint))).expect("key exists");
        pools.entry(k).or_default().push(idx);
    }
    for p in pools.values_mut() {
        p.reverse();
    }
    let mut bins = Vec::new();
    for &(kind, ci) in &search.chosen {
        let mut items = Vec::new();
        for (k, &c) in configs[kind][ci].iter().enumerate() {
            for _ in 0..c {
                items.push(pools.get_mut(&k).and_then(Vec::pop).expect("census respected"));
            }
        }
        items.sort_unstable();
        bins.push((kind, items));
    }
    Ok(Some(Packing { bins }))
}

struct Search<'a, F> {
    configs: &'a [Vec<Configuration>],
    kinds: &'a [BinKind<F>],
    sizes: Vec<&'a Vec<u64>>,
    dims: usize,
    failed: HashSet<(usize, usize, usize, Vec<u32>)>,
    chosen: Vec<(usize, usize)>,
}

impl<F> Search<'_, F> {
    fn volume_ok(&self, kind: usize, left: usize, residual: &[u32], suffix_cap: &[Vec<u128>]) -> bool {
        (0..self.dims).all(|d| {
            let need: u128 = residual.iter().zip(&self.sizes).map(|(&c, s)| c as u128 * s[d] as u128).sum();
            let have = suffix_cap[kind + 1][d] + self.kinds[kind].capacity[d] as u128 * left as u128;
            need <= have
        })
    }

    fn run(&mut self, kind: usize, left: usize, min_config: usize, residual: &mut Vec<u32>, suffix_cap: &[Vec<u128>]) -> bool {
        if kind == self.kinds.len() {
            return residual.iter().all(|&c| c == 0);
        }
        if left == 0 {
            let next = self.kinds.get(kind + 1).map_or(0, |k| k.count);
            return self.run(kind + 1, next, 0, residual, suffix_cap);
        }
        if !self.volume_ok(kind, left, residual, suffix_cap) {
            return false;
        }
        let state = (kind, left, min_config, residual.clone());
        if self.failed.contains(&state) {
            return false;
        }
        let configs = self.configs;
        for (ci, c) in configs[kind].iter().enumerate().skip(min_config) {
            if c.iter().zip(residual.iter()).any(|(a, b)| a > b) {
                continue;
            }
            for (r, a) in residual.iter_mut().zip(c) {
                *r -= a;
            }
            self.chosen.push((kind, ci));
            let ok = self.run(kind, left - 1, ci, residual, suffix_cap);
            for (r, a) in residual.iter_mut().zip(c) {
                *r += a;
            }
            if ok {
                return true;
            }
            self.chosen.pop();
        }
        self.failed.insert(state);
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinPackingInstance {
    pub sizes: Vec<u64>,
    pub capacity: u64,
    pub bins: usize,
}

/// Items grouped into at most `bins` bins (empty bins omitted), or `None`.
pub fn solve_plain(bp: &BinPackingInstance) -> Result<Option<Vec<Vec<usize>>>, BinPackError> {
    if bp.sizes.iter().any(|&s| s > bp.capacity) {
        return Ok(None);
    }
    let inst = HetInstance {
        dims: 1,
        items: bp.sizes.iter().map(|&s| HetItem { size: vec![s], fingerprint: () }).collect(),
        kinds: vec![BinKind { capacity: vec![bp.capacity], count: bp.bins, valid: always_valid() }],
    };
    Ok(solve_het(&inst)?.map(|p| p.bins.into_iter().map(|(_, items)| items).filter(|b| !b.is_empty()).collect()))
}

/// Walk endpoints (unordered, smaller first) plus whether the walk meets a depot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EndpointPair {
    pub a: Vertex,
    pub b: Vertex,
    pub depot: bool,
}

impl EndpointPair {
    pub fn new(a: Vertex, b: Vertex, depot: bool) -> EndpointPair {
        EndpointPair { a: a.min(b), b: a.max(b), depot }
    }
}

/// Whether the walks, read as one edge per pair, chain into a single trail from `u`
/// to `v` whose depot bit is the disjunction of the parts.
pub fn eulerian_trail_predicate(pairs: &[EndpointPair], target: (Vertex, Vertex), require_depot: bool) -> bool {
    let (u, v) = target;
    if pairs.iter().any(|p| p.depot) != require_depot {
        return false;
    }
    if pairs.is_empty() {
        return u == v;
    }
    let mut degree: BTreeMap<Vertex, usize> = BTreeMap::new();
    for p in pairs {
        *degree.entry(p.a).or_insert(0) += 1;
        *degree.entry(p.b).or_insert(0) += 1;
    }
    for (&x, &d) in &degree {
        let odd_wanted = u != v && (x == u || x == v);
        if (d % 2 == 1) != odd_wanted {
            return false;
        }
    }
    if u != v && (!degree.contains_key(&u) || !degree.contains_key(&v)) {
        return false;
    }
    if !degree.contains_key(&u) {
        return false;
    }
    // connectivity from u
    let mut seen = vec![u];
    let mut frontier = vec![u];
    while let Some(x) = frontier.pop() {
        for p in pairs {
            let y = if p.a == x {
                p.b
            } else if p.b == x {
                p.a
            } else {
                continue;
            };
            if !seen.contains(&y) {
                seen.push(y);
                frontier.push(y);
            }
        }
    }
    degree.keys().all(|x| seen.contains(x))
}
