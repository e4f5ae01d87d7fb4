//! Dynamic programming over deficiency sequences.
//!
//! Table `T_i` summarizes partial colorful solutions that may delete the
//! classes `R_0..R_i`: for each sorted sequence of outstanding deficiencies
//! it keeps a cheapest `(U, A)` producing it, or collapses to a single zero
//! record once some `(U, A)` leaves no deficiency at all.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{EdgePair, Vertex};
use crate::instance::EditingInstance;

use super::separation::SeparationProfile;
use super::SolveError;

/// Non-empty non-decreasing sequence of positive integers, ordered by length
/// and then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DeficiencySequence(Vec<u32>);

impl DeficiencySequence {
    /// Sorts `values`; `None` if empty or containing a zero.
    pub fn new(mut values: Vec<u32>) -> Option<Self> {
        if values.is_empty() || values.contains(&0) {
            return None;
        }
        values.sort_unstable();
        Some(DeficiencySequence(values))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for DeficiencySequence {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for DeficiencySequence {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Deleted vertices and added pairs behind one table record.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableEntry {
    pub deleted: BTreeSet<Vertex>,
    pub added: BTreeSet<EdgePair>,
}

impl TableEntry {
    pub fn cost(&self) -> usize {
        self.deleted.len() + self.added.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeficiencyTable {
    Empty,
    Zero(TableEntry),
    Records(BTreeMap<DeficiencySequence, TableEntry>),
}

impl DeficiencyTable {
    /// Number of sequence records; zero for `Empty` and `Zero`.
    pub fn sequence_count(&self) -> usize {
        match self {
            DeficiencyTable::Records(m) => m.len(),
            _ => 0,
        }
    }

    fn from_records(records: BTreeMap<DeficiencySequence, TableEntry>) -> Self {
        if records.is_empty() {
            DeficiencyTable::Empty
        } else {
            DeficiencyTable::Records(records)
        }
    }
}

/// Number of partitions of `n`, by explicit enumeration.
pub fn partition_count(n: u32) -> u64 {
    fn count(rest: u32, max_part: u32) -> u64 {
        if rest == 0 {
            return 1;
        }
        (1..=max_part.min(rest)).map(|p| count(rest - p, p)).sum()
    }
    count(n, n)
}

/// `k · π(k)`, the most sequences a table for budget `k` can hold.
pub fn table_size_bound(k: u32) -> u64 {
    u64::from(k) * partition_count(k)
}

/// Calls `visit` with each set of `size` pair indices, in lexicographic
/// order, in which vertex `x` is covered at most `caps[x]` times. Stops
/// early when `visit` returns true; returns whether it stopped.
fn for_each_capped_subset(
    pairs: &[(usize, usize)],
    caps: &[u32],
    size: usize,
    visit: &mut dyn FnMut(&[usize]) -> bool,
) -> bool {
    fn rec(
        pairs: &[(usize, usize)],
        load: &mut [u32],
        caps: &[u32],
        start: usize,
        size: usize,
        chosen: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if chosen.len() == size {
            return visit(chosen);
        }
        let need = size - chosen.len();
        for i in start..pairs.len() {
            if pairs.len() - i < need {
                break;
            }
            let (a, b) = pairs[i];
            if load[a] >= caps[a] || load[b] >= caps[b] {
                continue;
            }
            load[a] += 1;
            load[b] += 1;
            chosen.push(i);
            let stop = rec(pairs, load, caps, i + 1, size, chosen, visit);
            chosen.pop();
            load[a] -= 1;
            load[b] -= 1;
            if stop {
                return true;
            }
        }
        false
    }
    let mut load = vec![0; caps.len()];
    rec(pairs, &mut load, caps, 0, size, &mut Vec::with_capacity(size), visit)
}

/// Outcome of scanning the pair sets of one auxiliary graph.
enum Scan {
    /// Some pair set leaves nothing outstanding.
    Zero(Vec<usize>),
    /// Pair sets grouped by the sequence they leave, cheapest first.
    Records(Vec<(DeficiencySequence, Vec<usize>)>),
}

/// Enumerates pair sets with sizes in `min_size..=sum(caps)/2`, smallest
/// first, returning at the first one that covers every cap exactly.
fn scan_pair_sets(pairs: &[(usize, usize)], caps: &[u32], min_size: usize) -> Scan {
    let total: u32 = caps.iter().sum();
    let max_size = (total as usize / 2).min(pairs.len());
    let mut found = Vec::new();
    let mut zero = None;
    for size in min_size..=max_size {
        let stopped = for_each_capped_subset(pairs, caps, size, &mut |chosen| {
            let mut left = caps.to_vec();
            for &i in chosen {
                left[pairs[i].0] -= 1;
                left[pairs[i].1] -= 1;
            }
            match DeficiencySequence::new(left.into_iter().filter(|&x| x > 0).collect()) {
                None => {
                    zero = Some(chosen.to_vec());
                    true
                }
                Some(seq) => {
                    found.push((seq, chosen.to_vec()));
                    false
                }
            }
        });
        if stopped {
            return Scan::Zero(zero.expect("set when stopping"));
        }
    }
    Scan::Records(found)
}

/// Non-adjacent pairs among `vertices` (by position), in canonical order.
fn free_pairs(inst: &EditingInstance, vertices: &[Vertex]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for a in 0..vertices.len() {
        for b in a + 1..vertices.len() {
            if !inst.graph().has_edge(vertices[a], vertices[b]) {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

fn budget_left(k: u32, spent: usize) -> Option<u32> {
    u32::try_from(spent).ok().and_then(|s| k.checked_sub(s))
}

/// Builds `T_0` from `R_0` and `B_0`.
pub fn build_table_initial(inst: &EditingInstance, profile: &SeparationProfile) -> DeficiencyTable {
    let r0 = &profile.classes[0];
    let b0: Vec<Vertex> = profile.boundaries[0].iter().copied().collect();
    let def_sum = profile.def_sum(&profile.boundaries[0]);
    let Some(left) = budget_left(inst.k(), r0.len()) else { return DeficiencyTable::Empty };
    if def_sum > 2 * left {
        return DeficiencyTable::Empty;
    }
    let caps: Vec<u32> = b0.iter().map(|v| profile.def[v]).collect();
    let pairs = free_pairs(inst, &b0);
    let min_size = (def_sum as usize + r0.len()).saturating_sub(inst.k() as usize);
    let entry = |chosen: &[usize]| TableEntry {
        deleted: r0.clone(),
        added: chosen
            .iter()
            .map(|&i| EdgePair::new(b0[pairs[i].0], b0[pairs[i].1]).expect("distinct"))
            .collect(),
    };
    match scan_pair_sets(&pairs, &caps, min_size) {
        Scan::Zero(chosen) => DeficiencyTable::Zero(entry(&chosen)),
        Scan::Records(found) => {
            let mut records = BTreeMap::new();
            for (seq, chosen) in found {
                records.entry(seq).or_insert_with(|| entry(&chosen));
            }
            DeficiencyTable::from_records(records)
        }
    }
}

/// Vertices of `G - U + A` below their target, sorted by (deficiency, label).
pub(crate) fn deficient_vertices(
    inst: &EditingInstance,
    entry: &TableEntry,
) -> Result<Vec<(u32, Vertex)>, SolveError> {
    let mut g = inst.graph().without_vertices(&entry.deleted);
    for &e in &entry.added {
        if !g.contains_vertex(e.u()) || !g.contains_vertex(e.v()) || !g.insert_edge(e) {
            return Err(SolveError::InternalInconsistency(format!(
                "table pair {e} cannot be added"
            )));
        }
    }
    let mut out = Vec::new();
    for v in g.vertices() {
        let (deg, target) = (g.degree(v), inst.target(v) as usize);
        if deg > target {
            return Err(SolveError::InternalInconsistency(format!(
                "vertex {v} is overfull under a table record"
            )));
        }
        if deg < target {
            out.push(((target - deg) as u32, v));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// The vertices realizing `seq` under `entry`, in sequence order.
pub(crate) fn realize(
    inst: &EditingInstance,
    seq: &DeficiencySequence,
    entry: &TableEntry,
) -> Result<Vec<Vertex>, SolveError> {
    let found = deficient_vertices(inst, entry)?;
    if !found.iter().map(|(d, _)| *d).eq(seq.values().iter().copied()) {
        return Err(SolveError::InternalInconsistency(format!(
            "record {:?} does not match the deficiencies {:?}",
            seq.values(),
            found
        )));
    }
    Ok(found.into_iter().map(|(_, v)| v).collect())
}

/// Builds `T_i` from `T_{i-1}` by optionally deleting class `R_i`.
pub fn extend_table(
    prev: &DeficiencyTable,
    inst: &EditingInstance,
    profile: &SeparationProfile,
    i: usize,
) -> Result<DeficiencyTable, SolveError> {
    if i == 0 || i > profile.t() {
        return Err(SolveError::PreconditionViolation(format!(
            "class index {i} outside 1..={}",
            profile.t()
        )));
    }
    let records = match prev {
        DeficiencyTable::Empty | DeficiencyTable::Zero(_) => return Ok(prev.clone()),
        DeficiencyTable::Records(records) => records,
    };
    let ri = &profile.classes[i];
    let bi: Vec<Vertex> = profile.boundaries[i].iter().copied().collect();
    let bi_def = profile.def_sum(&profile.boundaries[i]);
    let mut out = records.clone();

    for (seq, entry) in records {
        let spent = ri.len() + entry.cost();
        let Some(left) = budget_left(inst.k(), spent) else { continue };
        if bi_def + seq.sum() > 2 * left {
            continue;
        }
        let holders = realize(inst, seq, entry)?;

        // Positions 0..|B_i| are real vertices, the rest stand for the
        // deficient vertices of the record and are pairwise adjacent.
        let mut caps: Vec<u32> = bi.iter().map(|v| profile.def[v]).collect();
        caps.extend(seq.values());
        let mut pairs = free_pairs(inst, &bi);
        for a in 0..bi.len() {
            for j in 0..holders.len() {
                pairs.push((a, bi.len() + j));
            }
        }
        let vertex_at = |x: usize| if x < bi.len() { bi[x] } else { holders[x - bi.len()] };
        let total = (bi_def + seq.sum()) as usize;
        let min_size = (total + spent).saturating_sub(inst.k() as usize);
        let merged = |chosen: &[usize]| {
            let mut next = TableEntry {
                deleted: entry.deleted.union(ri).copied().collect(),
                added: entry.added.clone(),
            };
            for &c in chosen {
                let (a, b) = pairs[c];
                next.added.insert(EdgePair::new(vertex_at(a), vertex_at(b)).expect("distinct"));
            }
            next
        };
        match scan_pair_sets(&pairs, &caps, min_size) {
            Scan::Zero(chosen) => return Ok(DeficiencyTable::Zero(merged(&chosen))),
            Scan::Records(found) => {
                for (next_seq, chosen) in found {
                    let candidate = merged(&chosen);
                    match out.get(&next_seq) {
                        Some(existing) if existing.cost() <= candidate.cost() => {}
                        _ => {
                            out.insert(next_seq, candidate);
                        }
                    }
                }
            }
        }
    }
    Ok(DeficiencyTable::from_records(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpt::separation::{compute_separation, Coloring};
    use crate::graph::Graph;
    use crate::instance::OperationSet;

    fn seq(v: &[u32]) -> DeficiencySequence {
        DeficiencySequence::new(v.to_vec()).unwrap()
    }

    fn ep(a: Vertex, b: Vertex) -> EdgePair {
        EdgePair::new(a, b).unwrap()
    }

    fn p5() -> EditingInstance {
        let delta = [(1, 2), (2, 2), (3, 2), (4, 2), (5, 1)].into_iter().collect();
        EditingInstance::new(Graph::path(5), delta, 2, 2, OperationSet::ALL).unwrap()
    }

    fn profile(inst: &EditingInstance, red: &[Vertex]) -> SeparationProfile {
        let c = Coloring::from_red_set(inst.graph().vertices(), &red.iter().copied().collect());
        compute_separation(inst, &c).unwrap()
    }

    #[test]
    fn partitions() {
        let counts: Vec<u64> = (1..=8).map(partition_count).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(partition_count(0), 1);
        assert_eq!(table_size_bound(4), 20);
    }

    #[test]
    fn sequence_order_is_length_first() {
        let mut v = vec![seq(&[1, 1]), seq(&[3]), seq(&[1]), seq(&[1, 2])];
        v.sort();
        assert_eq!(v, vec![seq(&[1]), seq(&[3]), seq(&[1, 1]), seq(&[1, 2])]);
        assert!(DeficiencySequence::new(vec![]).is_none());
        assert!(DeficiencySequence::new(vec![0, 1]).is_none());
        assert_eq!(seq(&[2, 1]).values(), &[1, 2]);
    }

    #[test]
    fn capped_subsets_respect_caps() {
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let mut seen = Vec::new();
        for_each_capped_subset(&pairs, &[1, 1, 2], 2, &mut |c| {
            seen.push(c.to_vec());
            false
        });
        assert_eq!(seen, vec![vec![1, 2]]);
    }

    #[test]
    fn isolated_red_underfull_vertex_gives_zero() {
        let g = Graph::new(1..=3, [(1, 2)]).unwrap();
        let delta = (1..=3).map(|v| (v, 1)).collect();
        let inst = EditingInstance::new(g, delta, 1, 2, OperationSet::ALL).unwrap();
        let p = profile(&inst, &[3]);
        let t0 = build_table_initial(&inst, &p);
        assert_eq!(
            t0,
            DeficiencyTable::Zero(TableEntry { deleted: BTreeSet::from([3]), added: BTreeSet::new() })
        );
    }

    #[test]
    fn p5_tables() {
        let inst = p5();
        let p = profile(&inst, &[5]);
        let t0 = build_table_initial(&inst, &p);
        let expected: BTreeMap<_, _> = [(seq(&[1]), TableEntry::default())].into_iter().collect();
        assert_eq!(t0, DeficiencyTable::Records(expected));

        let t1 = extend_table(&t0, &inst, &p, 1).unwrap();
        assert_eq!(
            t1,
            DeficiencyTable::Zero(TableEntry {
                deleted: BTreeSet::from([5]),
                added: BTreeSet::from([ep(1, 4)])
            })
        );
        assert_eq!(extend_table(&t1, &inst, &p, 1).unwrap(), t1);
        assert!(extend_table(&t0, &inst, &p, 2).is_err());
        assert!(extend_table(&t0, &inst, &p, 0).is_err());
    }

    #[test]
    fn guard_empties_the_initial_table() {
        // Five isolated vertices wanting degree 1, budget 2.
        let g = Graph::edgeless(5);
        let delta = (1..=5).map(|v| (v, 1)).collect();
        let inst = EditingInstance::new(g, delta, 1, 2, OperationSet::ALL).unwrap();
        let p = profile(&inst, &[]);
        assert_eq!(p.def_sum(&p.boundaries[0]), 5);
        assert_eq!(build_table_initial(&inst, &p), DeficiencyTable::Empty);
    }

    #[test]
    fn isolated_pairs_close_up() {
        // Four isolated vertices wanting degree 1: two added edges finish.
        let g = Graph::edgeless(4);
        let delta = (1..=4).map(|v| (v, 1)).collect();
        let inst = EditingInstance::new(g, delta, 1, 3, OperationSet::ALL).unwrap();
        let p = profile(&inst, &[]);
        match build_table_initial(&inst, &p) {
            DeficiencyTable::Zero(e) => assert_eq!(e.added.len(), 2),
            other => panic!("expected zero, got {other:?}"),
        }
        let t = build_table_initial(&inst.with_budget(2), &p);
        assert!(matches!(t, DeficiencyTable::Zero(_)));
    }
}
