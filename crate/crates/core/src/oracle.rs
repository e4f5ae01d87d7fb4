//! Exhaustive solvers and structural checkers for small instances.
//!
//! Everything here trades speed for obviousness. [`solve_exact`] literally
//! enumerates edit sets by cost; [`solve_guided`] is an exact bounded search
//! that only tries edits touching the lowest deviating vertex, and is what
//! the FPT solver calls on instances with few edges.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::graph::{EdgePair, Graph, Vertex};
use crate::instance::{verify, EditSet, EditingInstance};

/// Node budget used when callers do not pick one.
pub const DEFAULT_WORK_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("work limit of {limit} search nodes exceeded")]
    WorkLimitExceeded { limit: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
}

struct Budget {
    used: u64,
    limit: u64,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget { used: 0, limit }
    }

    fn tick(&mut self) -> Result<(), OracleError> {
        self.used += 1;
        if self.used > self.limit {
            return Err(OracleError::WorkLimitExceeded { limit: self.limit });
        }
        Ok(())
    }
}

/// Dense view of an instance: vertices renumbered `0..n` in label order.
struct Dense {
    labels: Vec<Vertex>,
    target: Vec<i64>,
    adj: Vec<Vec<bool>>,
    degree: Vec<i64>,
}

impl Dense {
    fn new(inst: &EditingInstance) -> Self {
        let labels: Vec<Vertex> = inst.graph().vertices().collect();
        let index: BTreeMap<Vertex, usize> =
            labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = labels.len();
        let mut adj = vec![vec![false; n]; n];
        for e in inst.graph().edges() {
            let (a, b) = (index[&e.u()], index[&e.v()]);
            adj[a][b] = true;
            adj[b][a] = true;
        }
        let degree = labels.iter().map(|&v| inst.graph().degree(v) as i64).collect();
        let target = labels.iter().map(|&v| i64::from(inst.target(v))).collect();
        Dense { labels, target, adj, degree }
    }

    fn pair(&self, a: usize, b: usize) -> EdgePair {
        EdgePair::new(self.labels[a], self.labels[b]).expect("distinct indices")
    }
}

/// Calls `f` with every valid edit set of cost exactly `cost`, in
/// enumeration order (vertex subsets outermost).
fn for_each_at_cost(
    inst: &EditingInstance,
    dense: &Dense,
    cost: usize,
    budget: &mut Budget,
    f: &mut dyn FnMut(EditSet),
) -> Result<(), OracleError> {
    let n = dense.labels.len();
    let ops = inst.ops();
    let max_u = if ops.vertex_deletion() { cost.min(n) } else { 0 };
    for u_size in 0..=max_u {
        let pair_budget = cost - u_size;
        if pair_budget > 0 && !ops.edge_deletion() && !ops.edge_addition() {
            continue;
        }
        for removed in (0..n).combinations(u_size) {
            budget.tick()?;
            let mut alive = vec![true; n];
            for &x in &removed {
                alive[x] = false;
            }
            let mut gap: Vec<i64> = (0..n).map(|x| dense.target[x] - dense.degree[x]).collect();
            for &x in &removed {
                for (g, &joined) in gap.iter_mut().zip(&dense.adj[x]) {
                    if joined {
                        *g += 1;
                    }
                }
            }
            let deviating = (0..n).filter(|&x| alive[x] && gap[x] != 0).count();
            if deviating > 2 * pair_budget {
                continue;
            }
            let pairs: Vec<(usize, usize)> = (0..n)
                .filter(|&x| alive[x])
                .tuple_combinations()
                .filter(|&(a, b)| {
                    if dense.adj[a][b] {
                        ops.edge_deletion()
                    } else {
                        ops.edge_addition()
                    }
                })
                .collect();
            for chosen in pairs.iter().combinations(pair_budget) {
                budget.tick()?;
                let mut g = gap.clone();
                for &&(a, b) in &chosen {
                    let step = if dense.adj[a][b] { 1 } else { -1 };
                    g[a] += step;
                    g[b] += step;
                }
                if (0..n).all(|x| !alive[x] || g[x] == 0) {
                    let mut edits = EditSet::default();
                    edits.deleted_vertices.extend(removed.iter().map(|&x| dense.labels[x]));
                    for &&(a, b) in &chosen {
                        let p = dense.pair(a, b);
                        if dense.adj[a][b] {
                            edits.deleted_edges.insert(p);
                        } else {
                            edits.added_edges.insert(p);
                        }
                    }
                    f(edits);
                }
            }
        }
    }
    Ok(())
}

/// Minimum-cost solution by direct enumeration, with the default work limit.
///
/// Ties between minimum-cost solutions go to the least [`EditSet::sort_key`].
pub fn solve_exact(inst: &EditingInstance) -> Result<Option<EditSet>, OracleError> {
    solve_exact_with_limit(inst, DEFAULT_WORK_LIMIT)
}

pub fn solve_exact_with_limit(
    inst: &EditingInstance,
    limit: u64,
) -> Result<Option<EditSet>, OracleError> {
    let dense = Dense::new(inst);
    let mut budget = Budget::new(limit);
    for cost in 0..=inst.k() as usize {
        let mut best: Option<EditSet> = None;
        for_each_at_cost(inst, &dense, cost, &mut budget, &mut |e| {
            if best.as_ref().is_none_or(|b| e.sort_key() < b.sort_key()) {
                best = Some(e);
            }
        })?;
        if best.is_some() {
            return Ok(best);
        }
    }
    Ok(None)
}

/// Every valid edit set of cost at most `k`, ordered by cost and then by
/// [`EditSet::sort_key`].
pub fn all_solutions(inst: &EditingInstance, limit: u64) -> Result<Vec<EditSet>, OracleError> {
    let dense = Dense::new(inst);
    let mut budget = Budget::new(limit);
    let mut out = Vec::new();
    for cost in 0..=inst.k() as usize {
        let mut level = Vec::new();
        for_each_at_cost(inst, &dense, cost, &mut budget, &mut |e| level.push(e))?;
        level.sort_by_key(EditSet::sort_key);
        out.extend(level);
    }
    Ok(out)
}

/// Partial solution explored by [`solve_guided`].
struct Guided<'a> {
    inst: &'a EditingInstance,
    graph: Graph,
    edits: EditSet,
    /// Number of pairs in `D ∪ A` touching each vertex.
    touched: BTreeMap<Vertex, usize>,
    budget: Budget,
    found: Vec<EditSet>,
}

impl Guided<'_> {
    fn gap(&self, v: Vertex) -> i64 {
        i64::from(self.inst.target(v)) - self.graph.degree(v) as i64
    }

    fn free(&self, v: Vertex) -> bool {
        self.touched.get(&v).copied().unwrap_or(0) == 0
    }

    fn touch(&mut self, e: EdgePair, delta: isize) {
        for x in e.endpoints() {
            let c = self.touched.entry(x).or_insert(0);
            *c = c.checked_add_signed(delta).expect("touch count underflow");
        }
    }

    fn search(&mut self, remaining: usize) -> Result<(), OracleError> {
        self.budget.tick()?;
        let mut first = None;
        let mut under = 0usize;
        for v in self.graph.vertices() {
            let g = self.gap(v);
            if g != 0 && first.is_none() {
                first = Some((v, g));
            }
            if g > 0 {
                under += 1;
            }
        }
        let Some((v, gap)) = first else {
            self.found.push(self.edits.clone());
            return Ok(());
        };
        if remaining == 0 || under.div_ceil(2) > remaining {
            return Ok(());
        }
        let ops = self.inst.ops();

        if ops.vertex_deletion() && self.free(v) {
            self.delete_vertex(v, remaining)?;
        }
        if gap < 0 {
            let nbrs: Vec<Vertex> = self.graph.neighbors(v).collect();
            if ops.vertex_deletion() {
                for &u in &nbrs {
                    if self.free(u) {
                        self.delete_vertex(u, remaining)?;
                    }
                }
            }
            if ops.edge_deletion() {
                for &u in &nbrs {
                    let e = EdgePair::new(u, v).expect("neighbors differ");
                    if self.edits.added_edges.contains(&e) {
                        continue;
                    }
                    self.graph.remove_edge_in_place(e);
                    self.edits.deleted_edges.insert(e);
                    self.touch(e, 1);
                    self.search(remaining - 1)?;
                    self.touch(e, -1);
                    self.edits.deleted_edges.remove(&e);
                    self.graph.insert_edge(e);
                }
            }
        } else if ops.edge_addition() {
            let candidates: Vec<Vertex> = self
                .graph
                .vertices()
                .filter(|&x| x != v && !self.graph.has_edge(v, x))
                .collect();
            for x in candidates {
                let e = EdgePair::new(v, x).expect("distinct");
                if self.edits.deleted_edges.contains(&e) {
                    continue;
                }
                self.graph.insert_edge(e);
                self.edits.added_edges.insert(e);
                self.touch(e, 1);
                self.search(remaining - 1)?;
                self.touch(e, -1);
                self.edits.added_edges.remove(&e);
                self.graph.remove_edge_in_place(e);
            }
        }
        Ok(())
    }

    fn delete_vertex(&mut self, u: Vertex, remaining: usize) -> Result<(), OracleError> {
        let nbrs: Vec<Vertex> = self.graph.neighbors(u).collect();
        self.graph.remove_vertex_in_place(u);
        self.edits.deleted_vertices.insert(u);
        self.search(remaining - 1)?;
        self.edits.deleted_vertices.remove(&u);
        self.graph.insert_vertex(u);
        for w in nbrs {
            self.graph.insert_edge(EdgePair::new(u, w).expect("no loops"));
        }
        Ok(())
    }
}

/// Minimum-cost solution by bounded search, same tie-break as [`solve_exact`].
///
/// Every branch fixes the lowest-labelled vertex whose degree is off: an
/// overfull vertex loses itself, a neighbor or an incident original edge; an
/// underfull one is deleted or gains an edge. Budgets grow one at a time, so
/// the first level with a leaf holds exactly the minimum-cost solutions.
pub fn solve_guided(inst: &EditingInstance, limit: u64) -> Result<Option<EditSet>, OracleError> {
    let mut state = Guided {
        inst,
        graph: inst.graph().clone(),
        edits: EditSet::default(),
        touched: BTreeMap::new(),
        budget: Budget::new(limit),
        found: Vec::new(),
    };
    for b in 0..=inst.k() as usize {
        state.search(b)?;
        if let Some(best) = state.found.iter().min_by_key(|e| e.sort_key()) {
            return Ok(Some(best.clone()));
        }
    }
    Ok(None)
}

/// Whether no proper componentwise subset of `edits` is also a solution.
pub fn is_minimal(inst: &EditingInstance, edits: &EditSet) -> Result<bool, OracleError> {
    if !verify(inst, edits).is_valid() {
        return Err(OracleError::PreconditionViolation("edit set is not a solution".into()));
    }
    let items: Vec<(u8, Vertex, Option<EdgePair>)> = edits
        .deleted_vertices
        .iter()
        .map(|&v| (0, v, None))
        .chain(edits.deleted_edges.iter().map(|&e| (1, 0, Some(e))))
        .chain(edits.added_edges.iter().map(|&e| (2, 0, Some(e))))
        .collect();
    if items.len() >= 63 {
        return Err(OracleError::PreconditionViolation("edit set too large to enumerate".into()));
    }
    let full = (1u64 << items.len()) - 1;
    for mask in 0..full {
        let mut sub = EditSet::default();
        for (i, &(kind, v, e)) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                match (kind, e) {
                    (0, _) => {
                        sub.deleted_vertices.insert(v);
                    }
                    (1, Some(e)) => {
                        sub.deleted_edges.insert(e);
                    }
                    (_, Some(e)) => {
                        sub.added_edges.insert(e);
                    }
                    _ => unreachable!(),
                }
            }
        }
        if verify(inst, &sub).is_valid() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrailTag {
    Deleted,
    Added,
}

/// A walk `v_0, e_1, v_1, ..., e_s, v_s` with tagged edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trail {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(EdgePair, TrailTag)>,
}

impl Trail {
    pub fn start(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn end(&self) -> Vertex {
        *self.vertices.last().expect("trails have a start vertex")
    }

    /// Checks incidence, distinct edges, strict alternation and that the
    /// first and last edges are additions.
    pub fn check(&self) -> Result<(), String> {
        if self.edges.is_empty() || self.vertices.len() != self.edges.len() + 1 {
            return Err("trail must have s >= 1 edges and s + 1 vertices".into());
        }
        let mut seen = BTreeSet::new();
        for (i, &(e, tag)) in self.edges.iter().enumerate() {
            let (a, b) = (self.vertices[i], self.vertices[i + 1]);
            if EdgePair::new(a, b).ok() != Some(e) {
                return Err(format!("edge {e} does not join {a} and {b}"));
            }
            if !seen.insert(e) {
                return Err(format!("edge {e} repeats"));
            }
            if i > 0 && self.edges[i - 1].1 == tag {
                return Err(format!("tags do not alternate at edge {e}"));
            }
        }
        if self.edges[0].1 != TrailTag::Added || self.edges.last().unwrap().1 != TrailTag::Added {
            return Err("trail must start and end with added edges".into());
        }
        Ok(())
    }
}

struct TrailSearch<'a> {
    edges: Vec<(EdgePair, TrailTag)>,
    incident: BTreeMap<Vertex, Vec<usize>>,
    z: &'a BTreeSet<Vertex>,
    used: Vec<bool>,
    remaining: usize,
    trails: Vec<Trail>,
    budget: Budget,
}

impl TrailSearch<'_> {
    /// Trails are built in increasing order of their first edge, so each
    /// decomposition is reached once.
    fn cover(&mut self, min_first: usize) -> Result<bool, OracleError> {
        self.budget.tick()?;
        if self.remaining == 0 {
            return Ok(true);
        }
        let starts: Vec<(Vertex, usize)> = self
            .z
            .iter()
            .flat_map(|&z| self.open_edges(z, TrailTag::Added).into_iter().map(move |i| (z, i)))
            .filter(|&(_, i)| i >= min_first)
            .collect();
        for (z, i) in starts {
            let mut trail = Trail { vertices: vec![z], edges: Vec::new() };
            if self.extend(&mut trail, i)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn open_edges(&self, v: Vertex, tag: TrailTag) -> Vec<usize> {
        self.incident
            .get(&v)
            .into_iter()
            .flatten()
            .copied()
            .filter(|&i| !self.used[i] && self.edges[i].1 == tag)
            .collect()
    }

    /// Appends edge `i` to `trail`, then either closes the trail or keeps
    /// walking; undoes everything on failure.
    fn extend(&mut self, trail: &mut Trail, i: usize) -> Result<bool, OracleError> {
        self.budget.tick()?;
        let (e, tag) = self.edges[i];
        let here = trail.end();
        let next = e.other(here).expect("incident edge");
        self.used[i] = true;
        self.remaining -= 1;
        trail.vertices.push(next);
        trail.edges.push((e, tag));

        if tag == TrailTag::Added && self.z.contains(&next) {
            self.trails.push(trail.clone());
            let first = self.edges.binary_search(&trail.edges[0]).expect("edge is listed");
            if self.cover(first)? {
                return Ok(true);
            }
            self.trails.pop();
        }
        let wanted = match tag {
            TrailTag::Added => TrailTag::Deleted,
            TrailTag::Deleted => TrailTag::Added,
        };
        for j in self.open_edges(next, wanted) {
            if self.extend(trail, j)? {
                return Ok(true);
            }
        }

        trail.vertices.pop();
        trail.edges.pop();
        self.used[i] = false;
        self.remaining += 1;
        Ok(false)
    }
}

/// Splits `D ∪ A` into edge-disjoint alternating trails that start and end
/// with added edges at underfull vertices of `g`.
///
/// Returns `Ok(None)` when no such decomposition exists.
pub fn decompose_alternating_trails(
    g: &Graph,
    delta: &BTreeMap<Vertex, u32>,
    deleted: &BTreeSet<EdgePair>,
    added: &BTreeSet<EdgePair>,
    limit: u64,
) -> Result<Option<Vec<Trail>>, OracleError> {
    let bad = |msg: String| Err(OracleError::PreconditionViolation(msg));
    for v in g.vertices() {
        let Some(&t) = delta.get(&v) else { return bad(format!("vertex {v} has no target")) };
        if g.degree(v) > t as usize {
            return bad(format!("vertex {v} is above its target degree"));
        }
    }
    if let Some(e) = deleted.iter().find(|e| !g.contains_edge(**e)) {
        return bad(format!("deleted pair {e} is not an edge"));
    }
    if let Some(e) = added.iter().find(|e| g.contains_edge(**e)) {
        return bad(format!("added pair {e} is already an edge"));
    }
    if let Some(x) = added.iter().flat_map(|e| e.endpoints()).find(|x| !g.contains_vertex(*x)) {
        return bad(format!("added pair touches unknown vertex {x}"));
    }

    let z: BTreeSet<Vertex> = g.vertices().filter(|&v| g.degree(v) < delta[&v] as usize).collect();
    let edges: Vec<(EdgePair, TrailTag)> = added
        .iter()
        .map(|&e| (e, TrailTag::Added))
        .chain(deleted.iter().map(|&e| (e, TrailTag::Deleted)))
        .sorted()
        .collect();
    let mut incident: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
    for (i, (e, _)) in edges.iter().enumerate() {
        for x in e.endpoints() {
            incident.entry(x).or_default().push(i);
        }
    }
    let mut search = TrailSearch {
        used: vec![false; edges.len()],
        remaining: edges.len(),
        edges,
        incident,
        z: &z,
        trails: Vec::new(),
        budget: Budget::new(limit),
    };
    Ok(search.cover(0)?.then_some(search.trails))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::OperationSet;

    fn ep(a: Vertex, b: Vertex) -> EdgePair {
        EdgePair::new(a, b).unwrap()
    }

    fn uniform(g: Graph, target: u32, d: u32, k: u32) -> EditingInstance {
        let delta = g.vertices().map(|v| (v, target)).collect();
        EditingInstance::new(g, delta, d, k, OperationSet::ALL).unwrap()
    }

    #[test]
    fn path_is_fixed_by_dropping_an_end() {
        let inst = uniform(Graph::path(3), 1, 1, 2);
        let best = solve_exact(&inst).unwrap().unwrap();
        assert_eq!(best, EditSet::new([1], [], []));
        assert_eq!(solve_guided(&inst, DEFAULT_WORK_LIMIT).unwrap(), Some(best.clone()));
        assert_eq!(solve_exact(&inst.with_budget(1)).unwrap(), Some(best));
        assert_eq!(solve_exact(&inst.with_budget(0)).unwrap(), None);
        assert_eq!(solve_guided(&inst.with_budget(0), DEFAULT_WORK_LIMIT).unwrap(), None);
    }

    #[test]
    fn path_swap_is_the_cheapest_without_end_deletions() {
        // Target 2 in the middle forbids the cheap fix; closing the path into
        // a triangle is the only cost-1 answer.
        let g = Graph::path(3);
        let delta = [(1, 2), (2, 2), (3, 2)].into_iter().collect();
        let inst = EditingInstance::new(g, delta, 2, 1, OperationSet::ALL).unwrap();
        assert_eq!(solve_exact(&inst).unwrap(), Some(EditSet::new([], [], [ep(1, 3)])));
    }

    #[test]
    fn k2_with_target_two_deletes_everything() {
        let inst = uniform(Graph::path(2), 2, 2, 2);
        assert_eq!(solve_exact(&inst).unwrap(), Some(EditSet::new([1, 2], [], [])));
    }

    #[test]
    fn work_limit_is_an_error() {
        let inst = uniform(Graph::path(6), 1, 1, 3);
        assert_eq!(
            solve_exact_with_limit(&inst, 10),
            Err(OracleError::WorkLimitExceeded { limit: 10 })
        );
        assert!(solve_guided(&inst, 3).is_err());
    }

    #[test]
    fn minimality_examples() {
        let tri = uniform(Graph::complete(3), 2, 2, 1);
        assert!(is_minimal(&tri, &EditSet::default()).unwrap());

        let k2 = uniform(Graph::path(2), 2, 2, 2);
        assert!(is_minimal(&k2, &EditSet::new([1, 2], [], [])).unwrap());

        // A 4-cycle closed from a path, padded by deleting a vertex that
        // already had its target degree.
        let g = Graph::new(1..=5, [(1, 2), (2, 3), (3, 4)]).unwrap();
        let delta = [(1, 2), (2, 2), (3, 2), (4, 2), (5, 0)].into_iter().collect();
        let inst = EditingInstance::new(g, delta, 2, 2, OperationSet::ALL).unwrap();
        let lean = EditSet::new([], [], [ep(1, 4)]);
        let padded = EditSet::new([5], [], [ep(1, 4)]);
        assert!(is_minimal(&inst, &lean).unwrap());
        assert!(!is_minimal(&inst, &padded).unwrap());
        assert!(is_minimal(&inst, &EditSet::default()).is_err());
    }

    #[test]
    fn single_added_edge_is_one_trail() {
        let g = Graph::new(1..=4, [(1, 2), (3, 4)]).unwrap();
        let delta = [(1, 1), (2, 2), (3, 2), (4, 1)].into_iter().collect();
        let trails =
            decompose_alternating_trails(&g, &delta, &BTreeSet::new(), &BTreeSet::from([ep(2, 3)]), 1000)
                .unwrap()
                .unwrap();
        assert_eq!(
            trails,
            vec![Trail { vertices: vec![2, 3], edges: vec![(ep(2, 3), TrailTag::Added)] }]
        );
    }

    #[test]
    fn three_edge_alternating_trail() {
        // u = 1, x = 2, y = 3, v = 4
        let g = Graph::new(1..=4, [(2, 3)]).unwrap();
        let delta = (1..=4).map(|v| (v, 1)).collect();
        let deleted = BTreeSet::from([ep(2, 3)]);
        let added = BTreeSet::from([ep(1, 2), ep(3, 4)]);
        let trails = decompose_alternating_trails(&g, &delta, &deleted, &added, 1000)
            .unwrap()
            .unwrap();
        assert_eq!(trails.len(), 1);
        let t = &trails[0];
        t.check().unwrap();
        assert_eq!(t.vertices, vec![1, 2, 3, 4]);

        let none = decompose_alternating_trails(&g, &delta, &deleted, &BTreeSet::new(), 1000);
        assert_eq!(none, Ok(None));
    }

    #[test]
    fn trail_preconditions() {
        let g = Graph::path(2);
        let delta = [(1, 0), (2, 1)].into_iter().collect();
        assert!(matches!(
            decompose_alternating_trails(&g, &delta, &BTreeSet::new(), &BTreeSet::new(), 10),
            Err(OracleError::PreconditionViolation(_))
        ));
    }

    #[test]
    fn trail_checker_rejects_bad_trails() {
        let t = Trail { vertices: vec![1, 2], edges: vec![(ep(1, 2), TrailTag::Deleted)] };
        assert!(t.check().is_err());
        let t = Trail {
            vertices: vec![1, 2, 1],
            edges: vec![(ep(1, 2), TrailTag::Added), (ep(1, 2), TrailTag::Added)],
        };
        assert!(t.check().is_err());
    }
}
