//! Partitions of small vertex sets, their coarsening lattice, and sets of marked
//! partitions with the operations used by the uncapacitated tree DP.
//!
//! A partition stores, for each universe element, the minimum element of its block.
//! That vector is canonical, so partitions hash and compare structurally.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub type Elem = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("universe mismatch")]
    UniverseMismatch,
    #[error("element {0} not in universe")]
    NotInUniverse(Elem),
    #[error("element {0} already in universe")]
    AlreadyInUniverse(Elem),
    #[error("blocks do not partition the universe")]
    InvalidBlocks,
    #[error("weight overflow")]
    Overflow,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    universe: Vec<Elem>,
    rep: Vec<Elem>,
}

fn sorted_unique(mut v: Vec<Elem>) -> Vec<Elem> {
    v.sort_unstable();
    v.dedup();
    v
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        // keep the smaller index as root so roots are block minima
        parent[ra.max(rb)] = ra.min(rb);
    }
}

impl Partition {
    /// The partition with every element in its own block.
    pub fn singletons(universe: Vec<Elem>) -> Partition {
        let universe = sorted_unique(universe);
        let rep = universe.clone();
        Partition { universe, rep }
    }

    pub fn empty() -> Partition {
        Partition::default()
    }

    pub fn from_blocks(blocks: &[Vec<Elem>]) -> Result<Partition, PartitionError> {
        let mut universe: Vec<Elem> = blocks.iter().flatten().copied().collect();
        let total = universe.len();
        universe = sorted_unique(universe);
        if universe.len() != total || blocks.iter().any(|b| b.is_empty()) {
            return Err(PartitionError::InvalidBlocks);
        }
        let mut rep = vec![0; universe.len()];
        for b in blocks {
            let m = *b.iter().min().expect("nonempty");
            for &x in b {
                rep[universe.binary_search(&x).expect("present")] = m;
            }
        }
        Ok(Partition { universe, rep })
    }

    /// `U[V]`: `V` as one block, every other element a singleton.
    pub fn singleton_except(universe: Vec<Elem>, joined: &[Elem]) -> Result<Partition, PartitionError> {
        let universe = sorted_unique(universe);
        for &x in joined {
            if universe.binary_search(&x).is_err() {
                return Err(PartitionError::NotInUniverse(x));
            }
        }
        let m = joined.iter().min().copied();
        let rep = universe
            .iter()
            .map(|&x| if joined.contains(&x) { m.expect("nonempty") } else { x })
            .collect();
        Ok(Partition { universe, rep })
    }

    /// Builds the canonical partition from arbitrary per-index class labels.
    fn from_labels(universe: Vec<Elem>, labels: &[usize]) -> Partition {
        let mut first: BTreeMap<usize, Elem> = BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            first.entry(l).or_insert(universe[i]);
        }
        let rep = labels.iter().map(|l| first[l]).collect();
        Partition { universe, rep }
    }

    pub fn universe(&self) -> &[Elem] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn index_of(&self, x: Elem) -> Option<usize> {
        self.universe.binary_search(&x).ok()
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.index_of(x).is_some()
    }

    /// Minimum element of the block containing `x`.
    pub fn block_rep(&self, x: Elem) -> Option<Elem> {
        self.index_of(x).map(|i| self.rep[i])
    }

    pub fn same_block(&self, a: Elem, b: Elem) -> bool {
        matches!((self.block_rep(a), self.block_rep(b)), (Some(x), Some(y)) if x == y)
    }

    /// Blocks in canonical order (by minimum element), each sorted.
    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        let mut by_rep: BTreeMap<Elem, Vec<Elem>> = BTreeMap::new();
        for (i, &x) in self.universe.iter().enumerate() {
            by_rep.entry(self.rep[i]).or_default().push(x);
        }
        by_rep.into_values().collect()
    }

    pub fn block(&self, rep: Elem) -> Vec<Elem> {
        self.universe
            .iter()
            .zip(&self.rep)
            .filter(|(_, &r)| r == rep)
            .map(|(&x, _)| x)
            .collect()
    }

    pub fn block_count(&self) -> usize {
        self.universe.iter().zip(&self.rep).filter(|(x, r)| x == r).count()
    }

    /// `self ⊑ other`: every block of `self` lies inside a block of `other`.
    pub fn is_finer_than(&self, other: &Partition) -> bool {
        if self.universe != other.universe {
            return false;
        }
        let mut image: BTreeMap<Elem, Elem> = BTreeMap::new();
        for i in 0..self.universe.len() {
            let target = other.rep[i];
            if *image.entry(self.rep[i]).or_insert(target) != target {
                return false;
            }
        }
        true
    }

    /// Finest common coarsening.
    pub fn coarsen_join(&self, other: &Partition) -> Result<Partition, PartitionError> {
        if self.universe != other.universe {
            return Err(PartitionError::UniverseMismatch);
        }
        let n = self.universe.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for i in 0..n {
            union(&mut parent, i, self.index_of(self.rep[i]).expect("rep in universe"));
            union(&mut parent, i, self.index_of(other.rep[i]).expect("rep in universe"));
        }
        let labels: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        Ok(Partition::from_labels(self.universe.clone(), &labels))
    }

    /// Merges the blocks of `a` and `b`; same as `coarsen_join` with `U[{a, b}]`.
    pub fn merge(&self, a: Elem, b: Elem) -> Result<Partition, PartitionError> {
        let ra = self.block_rep(a).ok_or(PartitionError::NotInUniverse(a))?;
        let rb = self.block_rep(b).ok_or(PartitionError::NotInUniverse(b))?;
        if ra == rb {
            return Ok(self.clone());
        }
        let (keep, drop) = (ra.min(rb), ra.max(rb));
        let rep = self.rep.iter().map(|&r| if r == drop { keep } else { r }).collect();
        Ok(Partition { universe: self.universe.clone(), rep })
    }

    /// `P↓V`: intersect every block with `V`, dropping empty intersections.
    pub fn restrict(&self, keep: &[Elem]) -> Result<Partition, PartitionError> {
        let keep = sorted_unique(keep.to_vec());
        let mut labels = Vec::with_capacity(keep.len());
        for &x in &keep {
            labels.push(self.block_rep(x).ok_or(PartitionError::NotInUniverse(x))?);
        }
        Ok(Partition::from_labels(keep, &labels))
    }

    /// `P↑V`: add every element of `V ∖ U` as a singleton.
    pub fn extend(&self, to: &[Elem]) -> Result<Partition, PartitionError> {
        let to = sorted_unique(to.to_vec());
        for &x in &self.universe {
            if to.binary_search(&x).is_err() {
                return Err(PartitionError::NotInUniverse(x));
            }
        }
        let rep = to.iter().map(|&x| self.block_rep(x).unwrap_or(x)).collect();
        Ok(Partition { universe: to, rep })
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b:?}")?;
        }
        write!(f, "}}")
    }
}

/// A partition together with its depot-connected blocks (named by their minimum
/// element) and a weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedPartition {
    pub partition: Partition,
    pub marked: Vec<Elem>,
    pub weight: u64,
}

/// Identity of a marked partition without its weight.
pub type MarkKey = (Partition, Vec<Elem>);

impl MarkedPartition {
    pub fn new(partition: Partition, marked_blocks: &[Vec<Elem>], weight: u64) -> Result<MarkedPartition, PartitionError> {
        let mut marked = Vec::new();
        for b in marked_blocks {
            let r = *b.iter().min().ok_or(PartitionError::InvalidBlocks)?;
            if partition.block(r) != sorted_unique(b.clone()) {
                return Err(PartitionError::InvalidBlocks);
            }
            marked.push(r);
        }
        Ok(MarkedPartition { partition, marked: sorted_unique(marked), weight })
    }

    pub fn empty() -> MarkedPartition {
        MarkedPartition { partition: Partition::empty(), marked: Vec::new(), weight: 0 }
    }

    pub fn key(&self) -> MarkKey {
        (self.partition.clone(), self.marked.clone())
    }

    pub fn is_marked(&self, rep: Elem) -> bool {
        self.marked.binary_search(&rep).is_ok()
    }

    pub fn marked_blocks(&self) -> Vec<Vec<Elem>> {
        self.marked.iter().map(|&r| self.partition.block(r)).collect()
    }

    /// Re-derives marks after coarsening to `coarse`: a block is marked when it
    /// contains a previously marked block.
    fn lift_marks(coarse: &Partition, old: &[&[Elem]]) -> Vec<Elem> {
        let reps = old
            .iter()
            .flat_map(|m| m.iter())
            .map(|&r| coarse.block_rep(r).expect("marked rep in universe"))
            .collect();
        sorted_unique(reps)
    }

    pub fn glued(&self, u: Elem, v: Elem) -> Result<MarkedPartition, PartitionError> {
        let p = self.partition.merge(u, v)?;
        let marked = Self::lift_marks(&p, &[&self.marked]);
        Ok(MarkedPartition { partition: p, marked, weight: self.weight })
    }

    pub fn inserted(&self, vs: &[Elem], depots: &[Elem]) -> Result<MarkedPartition, PartitionError> {
        for &x in vs {
            if self.partition.contains(x) {
                return Err(PartitionError::AlreadyInUniverse(x));
            }
        }
        let mut to = self.partition.universe.clone();
        to.extend_from_slice(vs);
        let p = self.partition.extend(&to)?;
        let mut marked = self.marked.clone();
        marked.extend(vs.iter().copied().filter(|x| depots.contains(x)));
        Ok(MarkedPartition { partition: p, marked: sorted_unique(marked), weight: self.weight })
    }

    fn remaining(&self, vs: &[Elem]) -> Result<Vec<Elem>, PartitionError> {
        for &x in vs {
            if !self.partition.contains(x) {
                return Err(PartitionError::NotInUniverse(x));
            }
        }
        Ok(self.partition.universe.iter().copied().filter(|x| !vs.contains(x)).collect())
    }

    /// Marks carried to the restriction onto `rest`; blocks vanishing entirely drop out.
    fn restrict_marks(&self, restricted: &Partition) -> Vec<Elem> {
        let mut out = Vec::new();
        for &r in &self.marked {
            if let Some(x) = self.partition.block(r).into_iter().find(|x| restricted.contains(*x)) {
                out.push(restricted.block_rep(x).expect("present"));
            }
        }
        sorted_unique(out)
    }

    /// Removes `vs`; `None` when some element of `vs` has no block partner outside `vs`.
    pub fn projected(&self, vs: &[Elem]) -> Result<Option<MarkedPartition>, PartitionError> {
        let rest = self.remaining(vs)?;
        for &x in vs {
            let r = self.partition.block_rep(x).expect("checked");
            let has_partner = self.partition.block(r).iter().any(|y| !vs.contains(y));
            if !has_partner {
                return Ok(None);
            }
        }
        let p = self.partition.restrict(&rest)?;
        let marked = self.restrict_marks(&p);
        Ok(Some(MarkedPartition { partition: p, marked, weight: self.weight }))
    }

    /// Removes `vs`; `None` unless every block meeting `vs` lies inside `vs` and is marked.
    pub fn detached(&self, vs: &[Elem]) -> Result<Option<MarkedPartition>, PartitionError> {
        let rest = self.remaining(vs)?;
        for block in self.partition.blocks() {
            if block.iter().any(|x| vs.contains(x)) {
                let inside = block.iter().all(|x| vs.contains(x));
                if !inside || !self.is_marked(block[0]) {
                    return Ok(None);
                }
            }
        }
        let p = self.partition.restrict(&rest)?;
        let marked = self.restrict_marks(&p);
        Ok(Some(MarkedPartition { partition: p, marked, weight: self.weight }))
    }

    pub fn joined(&self, other: &MarkedPartition) -> Result<MarkedPartition, PartitionError> {
        let p = self.partition.coarsen_join(&other.partition)?;
        let marked = Self::lift_marks(&p, &[&self.marked, &other.marked]);
        let weight = self.weight.checked_add(other.weight).ok_or(PartitionError::Overflow)?;
        Ok(MarkedPartition { partition: p, marked, weight })
    }

    pub fn shifted(&self, w: u64) -> Result<MarkedPartition, PartitionError> {
        let weight = self.weight.checked_add(w).ok_or(PartitionError::Overflow)?;
        Ok(MarkedPartition { weight, ..self.clone() })
    }
}

/// Marked partitions over a common universe, at most one per (partition, marks) key.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MarkedPartitionSet {
    universe: Vec<Elem>,
    entries: BTreeMap<MarkKey, u64>,
}

impl MarkedPartitionSet {
    pub fn new(universe: Vec<Elem>) -> MarkedPartitionSet {
        MarkedPartitionSet { universe: sorted_unique(universe), entries: BTreeMap::new() }
    }

    /// `rmc` applied to an arbitrary collection.
    pub fn from_entries(universe: Vec<Elem>, entries: impl IntoIterator<Item = MarkedPartition>) -> Result<MarkedPartitionSet, PartitionError> {
        let mut set = MarkedPartitionSet::new(universe);
        for e in entries {
            set.add(e)?;
        }
        Ok(set)
    }

    pub fn universe(&self) -> &[Elem] {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts keeping the minimum weight per key. Returns true when the set changed.
    pub fn add(&mut self, e: MarkedPartition) -> Result<bool, PartitionError> {
        if e.partition.universe != self.universe {
            return Err(PartitionError::UniverseMismatch);
        }
        let key = (e.partition, e.marked);
        match self.entries.get_mut(&key) {
            Some(w) if *w <= e.weight => Ok(false),
            Some(w) => {
                *w = e.weight;
                Ok(true)
            }
            None => {
                self.entries.insert(key, e.weight);
                Ok(true)
            }
        }
    }

    pub fn get(&self, key: &MarkKey) -> Option<u64> {
        self.entries.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = MarkedPartition> + '_ {
        self.entries.iter().map(|((p, m), &w)| MarkedPartition { partition: p.clone(), marked: m.clone(), weight: w })
    }

    fn map_entries<F>(&self, universe: Vec<Elem>, f: F) -> Result<MarkedPartitionSet, PartitionError>
    where
        F: Fn(&MarkedPartition) -> Result<Option<MarkedPartition>, PartitionError>,
    {
        let mut out = MarkedPartitionSet::new(universe);
        for e in self.iter() {
            if let Some(x) = f(&e)? {
                out.add(x)?;
            }
        }
        Ok(out)
    }
}

/// Removes entries dominated by a cheaper entry with the same key.
pub fn rmc(universe: Vec<Elem>, entries: Vec<MarkedPartition>) -> Result<MarkedPartitionSet, PartitionError> {
    MarkedPartitionSet::from_entries(universe, entries)
}

pub fn union_min(a: &MarkedPartitionSet, c: &MarkedPartitionSet) -> Result<MarkedPartitionSet, PartitionError> {
    if a.universe != c.universe {
        return Err(PartitionError::UniverseMismatch);
    }
    let mut out = a.clone();
    for e in c.iter() {
        out.add(e)?;
    }
    Ok(out)
}

pub fn shift(w: u64, a: &MarkedPartitionSet) -> Result<MarkedPartitionSet, PartitionError> {
    a.map_entries(a.universe.clone(), |e| e.shifted(w).map(Some))
}

/// Merges the blocks of `u` and `v` in every entry; with `edge_weight` this is `glue_w`.
pub fn glue(u: Elem, v: Elem, a: &MarkedPartitionSet, edge_weight: Option<u64>) -> Result<MarkedPartitionSet, PartitionError> {
    for x in [u, v] {
        if a.universe.binary_search(&x).is_err() {
            return Err(PartitionError::NotInUniverse(x));
        }
    }
    a.map_entries(a.universe.clone(), |e| {
        let g = e.glued(u, v)?;
        Ok(Some(match edge_weight {
            Some(w) => g.shifted(w)?,
            None => g,
        }))
    })
}

pub fn insert(vs: &[Elem], depots: &[Elem], a: &MarkedPartitionSet) -> Result<MarkedPartitionSet, PartitionError> {
    for &x in vs {
        if a.universe.binary_search(&x).is_ok() {
            return Err(PartitionError::AlreadyInUniverse(x));
        }
    }
    let mut universe = a.universe.clone();
    universe.extend_from_slice(vs);
    a.map_entries(sorted_unique(universe), |e| e.inserted(vs, depots).map(Some))
}

pub fn project(vs: &[Elem], a: &MarkedPartitionSet) -> Result<MarkedPartitionSet, PartitionError> {
    let rest = universe_without(&a.universe, vs)?;
    a.map_entries(rest, |e| e.projected(vs))
}

pub fn detach(vs: &[Elem], a: &MarkedPartitionSet) -> Result<MarkedPartitionSet, PartitionError> {
    let rest = universe_without(&a.universe, vs)?;
    a.map_entries(rest, |e| e.detached(vs))
}

pub fn join_sets(a: &MarkedPartitionSet, c: &MarkedPartitionSet) -> Result<MarkedPartitionSet, PartitionError> {
    if a.universe != c.universe {
        return Err(PartitionError::UniverseMismatch);
    }
    let mut out = MarkedPartitionSet::new(a.universe.clone());
    for x in a.iter() {
        for y in c.iter() {
            out.add(x.joined(&y)?)?;
        }
    }
    Ok(out)
}

fn universe_without(universe: &[Elem], vs: &[Elem]) -> Result<Vec<Elem>, PartitionError> {
    for &x in vs {
        if universe.binary_search(&x).is_err() {
            return Err(PartitionError::NotInUniverse(x));
        }
    }
    Ok(universe.iter().copied().filter(|x| !vs.contains(x)).collect())
}

/// Every partition of `universe`, in a fixed order. Exponential; meant for tests and
/// exhaustive checks on tiny universes.
pub fn all_partitions(universe: &[Elem]) -> Vec<Partition> {
    fn rec(universe: &[Elem], i: usize, labels: &mut Vec<usize>, next: usize, out: &mut Vec<Partition>) {
        if i == universe.len() {
            out.push(Partition::from_labels(universe.to_vec(), labels));
            return;
        }
        for l in 0..=next {
            labels.push(l);
            rec(universe, i + 1, labels, next.max(l + 1), out);
            labels.pop();
        }
    }
    let universe = sorted_unique(universe.to_vec());
    let mut out = Vec::new();
    rec(&universe, 0, &mut Vec::new(), 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(blocks: &[&[Elem]]) -> Partition {
        Partition::from_blocks(&blocks.iter().map(|b| b.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn coarsening_example() {
        let a = p(&[&[1, 2], &[3, 4], &[5, 6]]);
        let b = p(&[&[1], &[2, 3], &[4], &[5], &[6]]);
        assert_eq!(a.coarsen_join(&b).unwrap(), p(&[&[1, 2, 3, 4], &[5, 6]]));
        assert_eq!(a.coarsen_join(&a).unwrap(), a);
        let s = Partition::singletons(vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(s.coarsen_join(&b).unwrap(), b);
    }

    #[test]
    fn finer_relation_example() {
        let a = p(&[&[1, 2], &[3], &[4, 5, 6]]);
        let b = p(&[&[1, 2, 3], &[4, 5, 6]]);
        assert!(a.is_finer_than(&b));
        assert!(!b.is_finer_than(&a));
    }

    #[test]
    fn restrict_extend_singleton_except() {
        assert_eq!(p(&[&[1, 2], &[3]]).restrict(&[1, 3]).unwrap(), p(&[&[1], &[3]]));
        assert_eq!(p(&[&[1]]).extend(&[1, 2]).unwrap(), p(&[&[1], &[2]]));
        assert_eq!(Partition::singleton_except(vec![1, 2, 3], &[1, 2]).unwrap(), p(&[&[1, 2], &[3]]));
        assert_eq!(p(&[&[1, 2]]).restrict(&[4]), Err(PartitionError::NotInUniverse(4)));
    }

    #[test]
    fn rmc_keeps_cheapest() {
        let q = p(&[&[1], &[2]]);
        let e = |m: &[Vec<Elem>], w| MarkedPartition::new(q.clone(), m, w).unwrap();
        let set = rmc(vec![1, 2], vec![e(&[vec![1]], 3), e(&[vec![1]], 5)]).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.iter().next().unwrap().weight, 3);
        let set = rmc(vec![1, 2], vec![e(&[vec![1]], 3), e(&[vec![2]], 5)]).unwrap();
        assert_eq!(set.len(), 2);
    }

    #[test]
    fn shift_and_union() {
        let q = p(&[&[1]]);
        let a = MarkedPartitionSet::from_entries(vec![1], [MarkedPartition::new(q.clone(), &[], 3).unwrap()]).unwrap();
        let c = MarkedPartitionSet::from_entries(vec![1], [MarkedPartition::new(q.clone(), &[], 1).unwrap()]).unwrap();
        assert_eq!(shift(2, &a).unwrap().iter().next().unwrap().weight, 5);
        assert_eq!(union_min(&a, &c).unwrap(), c);
        assert_eq!(union_min(&MarkedPartitionSet::new(vec![1]), &c).unwrap(), c);
        assert_eq!(shift(u64::MAX, &a), Err(PartitionError::Overflow));
    }

    #[test]
    fn glue_propagates_mark() {
        let e = MarkedPartition::new(p(&[&[1], &[2]]), &[vec![1]], 0).unwrap();
        let a = MarkedPartitionSet::from_entries(vec![1, 2], [e]).unwrap();
        let g = glue(1, 2, &a, None).unwrap();
        let out: Vec<_> = g.iter().collect();
        assert_eq!(out, vec![MarkedPartition::new(p(&[&[1, 2]]), &[vec![1, 2]], 0).unwrap()]);
        let gw = glue(1, 2, &a, Some(7)).unwrap();
        assert_eq!(gw.iter().next().unwrap().weight, 7);
        let again = glue(1, 2, &g, None).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn insert_marks_depots() {
        let a = MarkedPartitionSet::from_entries(vec![], [MarkedPartition::empty()]).unwrap();
        let d = insert(&[9], &[9], &a).unwrap();
        assert_eq!(d.iter().next().unwrap().marked_blocks(), vec![vec![9]]);
        let c = insert(&[4], &[], &a).unwrap();
        assert!(c.iter().next().unwrap().marked.is_empty());
        assert_eq!(insert(&[], &[], &a).unwrap(), a);
    }

    #[test]
    fn project_examples() {
        let (u, v) = (1, 2);
        let a = MarkedPartitionSet::from_entries(vec![u, v], [MarkedPartition::new(p(&[&[u, v]]), &[], 1).unwrap()]).unwrap();
        let out: Vec<_> = project(&[v], &a).unwrap().iter().collect();
        assert_eq!(out, vec![MarkedPartition::new(p(&[&[u]]), &[], 1).unwrap()]);
        let a = MarkedPartitionSet::from_entries(vec![u, v], [MarkedPartition::new(p(&[&[u], &[v]]), &[vec![v]], 1).unwrap()]).unwrap();
        assert!(project(&[v], &a).unwrap().is_empty());
        assert_eq!(project(&[], &a).unwrap(), a);
    }

    #[test]
    fn detach_examples() {
        let (u, v) = (1, 2);
        let marked = MarkedPartitionSet::from_entries(vec![u, v], [MarkedPartition::new(p(&[&[u], &[v]]), &[vec![v]], 2).unwrap()]).unwrap();
        let out: Vec<_> = detach(&[v], &marked).unwrap().iter().collect();
        assert_eq!(out, vec![MarkedPartition::new(p(&[&[u]]), &[], 2).unwrap()]);
        let unmarked = MarkedPartitionSet::from_entries(vec![u, v], [MarkedPartition::new(p(&[&[u], &[v]]), &[], 2).unwrap()]).unwrap();
        assert!(detach(&[v], &unmarked).unwrap().is_empty());
        let partial = MarkedPartitionSet::from_entries(vec![u, v], [MarkedPartition::new(p(&[&[u, v]]), &[vec![u, v]], 2).unwrap()]).unwrap();
        assert!(detach(&[v], &partial).unwrap().is_empty());
    }

    #[test]
    fn join_examples() {
        let (d, u) = (1, 2);
        let a = MarkedPartitionSet::from_entries(vec![d, u], [MarkedPartition::new(p(&[&[d], &[u]]), &[vec![d]], 1).unwrap()]).unwrap();
        let c = MarkedPartitionSet::from_entries(vec![d, u], [MarkedPartition::new(p(&[&[d, u]]), &[], 2).unwrap()]).unwrap();
        let out: Vec<_> = join_sets(&a, &c).unwrap().iter().collect();
        assert_eq!(out, vec![MarkedPartition::new(p(&[&[d, u]]), &[vec![d, u]], 3).unwrap()]);
        let neutral = MarkedPartitionSet::from_entries(vec![d, u], [MarkedPartition::new(Partition::singletons(vec![d, u]), &[], 0).unwrap()]).unwrap();
        assert_eq!(join_sets(&a, &neutral).unwrap(), a);
        assert!(join_sets(&MarkedPartitionSet::new(vec![d, u]), &c).unwrap().is_empty());
    }

    #[test]
    fn bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|n| all_partitions(&(0..n).collect::<Vec<_>>()).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    fn arb_partition(max: usize) -> impl Strategy<Value = Partition> {
        (0..=max).prop_flat_map(|n| proptest::collection::vec(0..n.max(1), n)).prop_map(|labels| {
            let universe: Vec<Elem> = (0..labels.len()).collect();
            Partition::from_labels(universe, &labels)
        })
    }

    fn same_universe_triple() -> impl Strategy<Value = (Partition, Partition, Partition)> {
        (0..=8usize).prop_flat_map(|n| {
            let labels = move || proptest::collection::vec(0..n.max(1), n);
            (labels(), labels(), labels()).prop_map(move |(a, b, c)| {
                let u: Vec<Elem> = (0..n).collect();
                (Partition::from_labels(u.clone(), &a), Partition::from_labels(u.clone(), &b), Partition::from_labels(u, &c))
            })
        })
    }

    proptest! {
        #[test]
        fn coarsen_join_lattice_laws((a, b, c) in same_universe_triple()) {
            let ab = a.coarsen_join(&b).unwrap();
            prop_assert_eq!(&ab, &b.coarsen_join(&a).unwrap());
            prop_assert_eq!(ab.coarsen_join(&c).unwrap(), a.coarsen_join(&b.coarsen_join(&c).unwrap()).unwrap());
            prop_assert_eq!(a.coarsen_join(&a).unwrap(), a.clone());
            prop_assert!(a.is_finer_than(&ab));
            prop_assert!(b.is_finer_than(&ab));
        }

        #[test]
        fn restrict_after_extend_is_identity(a in arb_partition(6), extra in 0..4usize) {
            let n = a.len();
            let to: Vec<Elem> = (0..n + extra).collect();
            let back = a.extend(&to).unwrap().restrict(a.universe()).unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn blocks_round_trip(a in arb_partition(8)) {
            let rebuilt = Partition::from_blocks(&a.blocks()).unwrap();
            prop_assert_eq!(rebuilt, a);
        }

        #[test]
        fn rmc_idempotent_union_commutative(ws in proptest::collection::vec((0..4usize, 0..3usize, 0..20u64), 0..12)) {
            let universe = vec![0, 1, 2];
            let parts = all_partitions(&universe);
            let mk = |(pi, mi, w): (usize, usize, u64)| {
                let part = parts[pi % parts.len()].clone();
                let blocks = part.blocks();
                let marked: Vec<Vec<Elem>> = blocks.into_iter().take(mi).collect();
                MarkedPartition::new(part, &marked, w).unwrap()
            };
            let entries: Vec<_> = ws.iter().copied().map(mk).collect();
            let (left, right) = entries.split_at(entries.len() / 2);
            let a = rmc(universe.clone(), left.to_vec()).unwrap();
            let c = rmc(universe.clone(), right.to_vec()).unwrap();
            prop_assert_eq!(rmc(universe.clone(), a.iter().collect()).unwrap(), a.clone());
            prop_assert_eq!(union_min(&a, &c).unwrap(), union_min(&c, &a).unwrap());
            prop_assert_eq!(union_min(&a, &c).unwrap(), rmc(universe, entries).unwrap());
        }
    }
}
