//! Instance generators: regularization through a product with a complete
//! bipartite graph, composition of clique instances into one editing
//! instance, the matching solution for a chosen clique, and planted random
//! instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{EdgePair, Graph, Vertex};
use crate::instance::{EditSet, EditingInstance, OperationSet};

/// Attempts of the pairing construction before a profile is declared
/// unrealizable.
pub const PAIRING_RETRIES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardgenError {
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("degree profile is not realizable: {0}")]
    Unrealizable(String),
}

type Result<T> = std::result::Result<T, HardgenError>;

fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(HardgenError::PreconditionViolation(msg.into()))
}

/// Does a `d`-regular graph have a clique on `k` vertices?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueInstance {
    pub graph: Graph,
    pub d: u32,
    pub k: u32,
}

impl CliqueInstance {
    pub fn new(graph: Graph, k: u32) -> Result<Self> {
        let Some(d) = graph.regular_degree() else {
            return precondition("graph is not regular");
        };
        if d == 0 {
            return precondition("graph has no edges");
        }
        if k < 2 {
            return precondition("clique size must be at least 2");
        }
        Ok(CliqueInstance { graph, d: d as u32, k })
    }

    /// Whether `k² < d`, the regime the composition needs.
    pub fn is_small_clique(&self) -> bool {
        self.k * self.k < self.d
    }
}

/// `g × K_{k²,k²}`. Vertex `(a, b)` gets label `i·2k² + b`, where `i` is
/// the position of `a` among the labels of `g` and `b ∈ 1..=2k²`.
pub fn cartesian_regularize(g: &Graph, k: u32) -> Result<CliqueInstance> {
    if g.regular_degree().is_none_or(|d| d == 0) {
        return precondition("input must be regular of positive degree");
    }
    if k < 2 {
        return precondition("clique size must be at least 2");
    }
    let side = k * k;
    let positions: BTreeMap<Vertex, u32> = g.vertices().zip(0..).collect();
    let product = g
        .cartesian_product(&Graph::complete_bipartite(side, side), |a, b| {
            positions[&a] * 2 * side + b
        })
        .map_err(|e| HardgenError::PreconditionViolation(e.to_string()))?;
    CliqueInstance::new(product, k)
}

/// Lexicographically first clique on `k` vertices, by exhaustive search.
pub fn find_clique(g: &Graph, k: usize) -> Option<BTreeSet<Vertex>> {
    fn grow(g: &Graph, chosen: &mut Vec<Vertex>, candidates: &[Vertex], k: usize) -> bool {
        if chosen.len() == k {
            return true;
        }
        for (i, &v) in candidates.iter().enumerate() {
            if candidates.len() - i < k - chosen.len() {
                break;
            }
            let next: Vec<Vertex> =
                candidates[i + 1..].iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            chosen.push(v);
            if grow(g, chosen, &next, k) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let all: Vec<Vertex> = g.vertices().collect();
    let mut chosen = Vec::with_capacity(k);
    grow(g, &mut chosen, &all, k).then(|| chosen.into_iter().collect())
}

/// Where the parts of a composed instance ended up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionLayout {
    /// Per input, original label to composed label. Copy `i` uses labels
    /// `i·n + 1 ..= (i+1)·n`.
    pub copies: Vec<BTreeMap<Vertex, Vertex>>,
    /// `u_1..u_p`.
    pub hubs: Vec<Vertex>,
    /// `w_0..w_k`.
    pub ws: Vec<Vertex>,
    pub k: u32,
    pub d: u32,
}

impl CompositionLayout {
    pub fn p(&self) -> u32 {
        self.hubs.len() as u32
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposedInstance {
    pub instance: EditingInstance,
    pub layout: CompositionLayout,
}

/// Packs clique instances sharing `n`, `d` and `k` into one editing
/// instance that is solvable within budget `k(d-k+2)` when one of them has
/// a clique: the copies keep target `d`, a clique of `p = k(d-k+1)` hubs
/// each wants one more edge, and `k+1` further vertices tie the hubs
/// together.
pub fn cross_compose(instances: &[CliqueInstance]) -> Result<ComposedInstance> {
    let Some(first) = instances.first() else {
        return precondition("nothing to compose");
    };
    let n = first.graph.vertex_count() as u32;
    let (d, k) = (first.d, first.k);
    for (i, c) in instances.iter().enumerate() {
        if c.graph.vertex_count() as u32 != n || c.d != d || c.k != k {
            return precondition(format!("input {} differs in size, degree or k", i + 1));
        }
        if c.graph.regular_degree() != Some(d as usize) {
            return precondition(format!("input {} is not {d}-regular", i + 1));
        }
    }
    if k < 2 {
        return precondition("clique size must be at least 2");
    }
    if k * k >= d {
        return precondition(format!("need k² < d, got k = {k}, d = {d}"));
    }

    let p = k * (d - k + 1);
    let mut next = instances.len() as u32 * n + 1;
    let mut take = |count: u32| {
        let labels: Vec<Vertex> = (next..next + count).collect();
        next += count;
        labels
    };
    let copies: Vec<BTreeMap<Vertex, Vertex>> = instances
        .iter()
        .enumerate()
        .map(|(i, c)| c.graph.vertices().zip(i as u32 * n + 1..).collect())
        .collect();
    let hubs = take(p);
    let ws = take(k + 1);

    let mut edges = Vec::new();
    for (c, map) in instances.iter().zip(&copies) {
        edges.extend(c.graph.edges().map(|e| (map[&e.u()], map[&e.v()])));
    }
    let mut core: Vec<Vertex> = hubs.clone();
    core.extend(&ws);
    for (i, &a) in core.iter().enumerate() {
        for &b in &core[i + 1..] {
            edges.push((a, b));
        }
    }
    let vertices: Vec<Vertex> = copies.iter().flat_map(|m| m.values().copied()).chain(core).collect();
    let graph = Graph::new(vertices, edges).expect("labels are disjoint");

    let mut delta: BTreeMap<Vertex, u32> = BTreeMap::new();
    for m in &copies {
        delta.extend(m.values().map(|&v| (v, d)));
    }
    delta.extend(hubs.iter().map(|&u| (u, p + k + 1)));
    delta.extend(ws.iter().map(|&w| (w, p + k)));
    let instance = EditingInstance::new(graph, delta, p + k + 1, k * (d - k + 2), OperationSet::ALL)
        .expect("targets within d'");
    Ok(ComposedInstance { instance, layout: CompositionLayout { copies, hubs, ws, k, d } })
}

/// The solution for a clique `clique` (original labels) of input
/// `copy_index` (0-based): delete the clique and give every neighbor of it
/// one hub edge per lost neighbor. Neighbors are served in label order and
/// hubs handed out in label order.
pub fn forward_witness(
    composed: &ComposedInstance,
    copy_index: usize,
    clique: &BTreeSet<Vertex>,
) -> Result<EditSet> {
    let layout = &composed.layout;
    let Some(map) = layout.copies.get(copy_index) else {
        return precondition(format!("no input with index {copy_index}"));
    };
    if clique.len() != layout.k as usize {
        return precondition(format!("clique must have {} vertices", layout.k));
    }
    let mut mapped = BTreeSet::new();
    for v in clique {
        let Some(&m) = map.get(v) else {
            return precondition(format!("vertex {v} is not in input {copy_index}"));
        };
        mapped.insert(m);
    }
    let g = composed.instance.graph();
    let members: Vec<Vertex> = mapped.iter().copied().collect();
    for (i, &a) in members.iter().enumerate() {
        if let Some(&b) = members[i + 1..].iter().find(|&&b| !g.has_edge(a, b)) {
            return precondition(format!("{a} and {b} are not adjacent"));
        }
    }

    let mut hubs = layout.hubs.iter().copied();
    let mut added = Vec::new();
    for v in g.open_neighborhood(&mapped) {
        let lost = g.neighbors(v).filter(|w| mapped.contains(w)).count();
        for _ in 0..lost {
            let Some(u) = hubs.next() else {
                return Err(HardgenError::PreconditionViolation(
                    "clique neighborhood needs more hubs than exist".into(),
                ));
            };
            added.push(EdgePair::new(u, v).expect("hub differs from copy vertex"));
        }
    }
    Ok(EditSet::new(mapped, [], added))
}

/// Target degrees for [`planted_instance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeProfile {
    Uniform(u32),
    /// Target of vertex `i + 1` at position `i`.
    List(Vec<u32>),
}

/// How a planted budget splits over vertex deletions, edge deletions and
/// edge additions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BudgetSplit {
    pub deletions: u32,
    pub edge_deletions: u32,
    pub edge_additions: u32,
}

impl BudgetSplit {
    pub fn new(deletions: u32, edge_deletions: u32, edge_additions: u32) -> Self {
        BudgetSplit { deletions, edge_deletions, edge_additions }
    }

    pub fn total(&self) -> u32 {
        self.deletions + self.edge_deletions + self.edge_additions
    }
}

/// Simple graph on `1..=n` with the given degrees, by random pairing of
/// degree stubs; rejected pairings are retried.
pub fn realize_degrees(degrees: &[u32], rng: &mut impl Rng) -> Result<Graph> {
    let n = degrees.len() as u32;
    let total: u64 = degrees.iter().map(|&x| u64::from(x)).sum();
    if total % 2 == 1 {
        return Err(HardgenError::Unrealizable(format!("degree sum {total} is odd")));
    }
    if let Some(&x) = degrees.iter().find(|&&x| x >= n.max(1)) {
        if x > 0 {
            return Err(HardgenError::Unrealizable(format!("degree {x} on {n} vertices")));
        }
    }
    let mut stubs: Vec<Vertex> = Vec::with_capacity(total as usize);
    for (v, &x) in (1..).zip(degrees) {
        stubs.extend(std::iter::repeat_n(v, x as usize));
    }
    'attempt: for _ in 0..PAIRING_RETRIES {
        stubs.shuffle(rng);
        let mut edges = BTreeSet::new();
        for pair in stubs.chunks(2) {
            let Ok(e) = EdgePair::new(pair[0], pair[1]) else { continue 'attempt };
            if !edges.insert(e) {
                continue 'attempt;
            }
        }
        return Ok(Graph::new(1..=n, edges.into_iter().map(|e| (e.u(), e.v()))).expect("simple"));
    }
    Err(HardgenError::Unrealizable(format!("no simple pairing in {PAIRING_RETRIES} attempts")))
}

/// A random instance with a known solution.
///
/// A graph realizing the targets exactly is built first. Then
/// `edge_additions` of its edges are removed (the solution adds them back),
/// `edge_deletions` non-edges are inserted (the solution deletes them) and
/// `deletions` fresh vertices labelled `n+1, ...` are wired in at random
/// with random targets (the solution deletes them). The budget is the
/// split's total and `d` is the largest target, at least 1.
pub fn planted_instance(
    n: u32,
    profile: &DegreeProfile,
    split: BudgetSplit,
    seed: u64,
    ops: OperationSet,
) -> Result<(EditingInstance, EditSet)> {
    if (split.deletions > 0 && !ops.vertex_deletion())
        || (split.edge_deletions > 0 && !ops.edge_deletion())
        || (split.edge_additions > 0 && !ops.edge_addition())
    {
        return precondition(format!("budget split uses operations outside {ops}"));
    }
    let degrees = match profile {
        DegreeProfile::Uniform(x) => vec![*x; n as usize],
        DegreeProfile::List(list) if list.len() == n as usize => list.clone(),
        DegreeProfile::List(list) => {
            return precondition(format!("{} targets for {n} vertices", list.len()));
        }
    };
    let d = degrees.iter().copied().max().unwrap_or(0).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graph = realize_degrees(&degrees, &mut rng)?;

    let edges: Vec<EdgePair> = graph.edges().collect();
    if split.edge_additions as usize > edges.len() {
        return precondition(format!("cannot remove {} of {} edges", split.edge_additions, edges.len()));
    }
    let added: Vec<EdgePair> = index::sample(&mut rng, edges.len(), split.edge_additions as usize)
        .into_iter()
        .map(|i| edges[i])
        .collect();

    let non_edges: Vec<EdgePair> = (1..=n)
        .flat_map(|a| (a + 1..=n).map(move |b| EdgePair::new(a, b).expect("a < b")))
        .filter(|e| !graph.contains_edge(*e))
        .collect();
    if split.edge_deletions as usize > non_edges.len() {
        return precondition(format!(
            "cannot insert {} of {} non-edges",
            split.edge_deletions,
            non_edges.len()
        ));
    }
    let deleted: Vec<EdgePair> =
        index::sample(&mut rng, non_edges.len(), split.edge_deletions as usize)
            .into_iter()
            .map(|i| non_edges[i])
            .collect();

    for e in &added {
        graph.remove_edge_in_place(*e);
    }
    for e in &deleted {
        graph.insert_edge(*e);
    }

    let mut delta: BTreeMap<Vertex, u32> = (1..).zip(degrees).collect();
    let fresh: Vec<Vertex> = (n + 1..=n + split.deletions).collect();
    for &x in &fresh {
        let others: Vec<Vertex> = graph.vertices().collect();
        graph.insert_vertex(x);
        if !others.is_empty() {
            let want = rng.gen_range(1..=d as usize).min(others.len());
            for i in index::sample(&mut rng, others.len(), want) {
                graph.insert_edge(EdgePair::new(x, others[i]).expect("fresh label"));
            }
        }
        delta.insert(x, rng.gen_range(0..=d));
    }

    let instance = EditingInstance::new(graph, delta, d, split.total(), ops)
        .expect("targets bounded by d");
    Ok((instance, EditSet::new(fresh, deleted, added)))
}

/// Uniform random instance on `1..=n`: each pair is an edge with
/// probability `edge_probability` and each target is uniform in `0..=d`.
pub fn random_instance(
    n: u32,
    d: u32,
    k: u32,
    edge_probability: f64,
    ops: OperationSet,
    seed: u64,
) -> Result<EditingInstance> {
    if d == 0 {
        return precondition("d must be positive");
    }
    if !(0.0..=1.0).contains(&edge_probability) {
        return precondition(format!("edge probability {edge_probability} outside [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            if rng.gen_bool(edge_probability) {
                edges.push((a, b));
            }
        }
    }
    let graph = Graph::new(1..=n, edges).expect("simple");
    let delta = (1..=n).map(|v| (v, rng.gen_range(0..=d))).collect();
    Ok(EditingInstance::new(graph, delta, d, k, ops).expect("targets bounded by d"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::verify;

    #[test]
    fn product_of_c4_is_six_regular() {
        let c = cartesian_regularize(&Graph::cycle(4), 2).unwrap();
        assert_eq!(c.graph.vertex_count(), 32);
        assert_eq!(c.graph.regular_degree(), Some(6));
        assert_eq!((c.d, c.k), (6, 2));
        assert!(c.is_small_clique());
    }

    #[test]
    fn product_keeps_triangles_of_k4() {
        let c = cartesian_regularize(&Graph::complete(4), 3).unwrap();
        assert_eq!(c.graph.vertex_count(), 72);
        assert_eq!(c.d, 12);
        assert!(find_clique(&c.graph, 3).is_some());
    }

    #[test]
    fn product_of_bipartite_graphs_has_no_triangle() {
        let c = cartesian_regularize(&Graph::cycle(4), 3).unwrap();
        assert_eq!(c.graph.vertex_count(), 72);
        assert_eq!(c.d, 11);
        assert_eq!(find_clique(&c.graph, 3), None);
    }

    #[test]
    fn regularize_rejects_bad_input() {
        assert!(cartesian_regularize(&Graph::path(3), 2).is_err());
        assert!(cartesian_regularize(&Graph::cycle(4), 1).is_err());
    }

    #[test]
    fn clique_search() {
        assert_eq!(find_clique(&Graph::complete(5), 3), Some(BTreeSet::from([1, 2, 3])));
        assert_eq!(find_clique(&Graph::cycle(5), 3), None);
        assert_eq!(find_clique(&Graph::cycle(5), 0), Some(BTreeSet::new()));
    }

    fn k6() -> CliqueInstance {
        CliqueInstance::new(Graph::complete(6), 2).unwrap()
    }

    #[test]
    fn one_k6_composes_to_seventeen_vertices() {
        let c = cross_compose(&[k6()]).unwrap();
        let inst = &c.instance;
        assert_eq!(inst.graph().vertex_count(), 17);
        assert_eq!((inst.d(), inst.k()), (11, 10));
        assert_eq!(c.layout.p(), 8);
        assert!(c.layout.hubs.iter().all(|&u| inst.target(u) == 11));
        assert_eq!(c.layout.ws.len(), 3);
        assert!(c.layout.ws.iter().all(|&w| inst.target(w) == 10));
    }

    #[test]
    fn two_k6_compose_to_twenty_three_vertices() {
        let c = cross_compose(&[k6(), k6()]).unwrap();
        assert_eq!(c.instance.graph().vertex_count(), 23);
        assert_eq!(c.layout.copies[1][&1], 7);
        assert_eq!(c.layout.hubs, (13..=20).collect::<Vec<_>>());
    }

    #[test]
    fn composition_rejects_mixed_inputs() {
        let c5 = CliqueInstance::new(Graph::complete(5), 2).unwrap();
        assert!(cross_compose(&[k6(), c5]).is_err());
        let c4 = CliqueInstance::new(Graph::complete(4), 2).unwrap();
        assert!(cross_compose(&[c4]).is_err());
        assert!(cross_compose(&[]).is_err());
    }

    #[test]
    fn witness_on_second_copy() {
        let c = cross_compose(&[k6(), k6()]).unwrap();
        let w = forward_witness(&c, 1, &BTreeSet::from([2, 5])).unwrap();
        assert_eq!(w.cost(), 10);
        assert_eq!(w.deleted_vertices, BTreeSet::from([8, 11]));
        assert!(verify(&c.instance, &w).is_valid());
    }

    #[test]
    fn witness_needs_a_clique() {
        let g = Graph::complete(6).without_edge(EdgePair::new(1, 2).unwrap()).unwrap();
        let g = g.without_edge(EdgePair::new(3, 4).unwrap()).unwrap();
        let g = g.without_edge(EdgePair::new(5, 6).unwrap()).unwrap();
        let c = cross_compose(&[CliqueInstance::new(g, 2).unwrap()]);
        assert!(c.is_err(), "4-regular with k = 2 violates k² < d");
        let c = cross_compose(&[k6()]).unwrap();
        assert!(forward_witness(&c, 0, &BTreeSet::from([1])).is_err());
        assert!(forward_witness(&c, 1, &BTreeSet::from([1, 2])).is_err());
    }

    #[test]
    fn planted_single_addition() {
        let (inst, sol) =
            planted_instance(4, &DegreeProfile::Uniform(1), BudgetSplit::new(0, 0, 1), 3, OperationSet::ALL)
                .unwrap();
        assert_eq!(inst.graph().edge_count(), 1);
        assert_eq!(inst.k(), 1);
        assert_eq!(sol.added_edges.len(), 1);
        assert!(verify(&inst, &sol).is_valid());
    }

    #[test]
    fn planted_odd_profile_is_unrealizable() {
        let r = planted_instance(3, &DegreeProfile::Uniform(1), BudgetSplit::default(), 0, OperationSet::ALL);
        assert!(matches!(r, Err(HardgenError::Unrealizable(_))));
    }

    #[test]
    fn planted_zero_profile_is_edgeless() {
        let (inst, sol) =
            planted_instance(5, &DegreeProfile::Uniform(0), BudgetSplit::default(), 9, OperationSet::ALL)
                .unwrap();
        assert_eq!(inst.graph().edge_count(), 0);
        assert_eq!(inst.k(), 0);
        assert!(sol.is_empty());
    }

    #[test]
    fn planted_split_must_fit_ops() {
        let r = planted_instance(
            4,
            &DegreeProfile::Uniform(1),
            BudgetSplit::new(0, 1, 0),
            0,
            OperationSet::VERTEX_DELETION_EDGE_ADDITION,
        );
        assert!(matches!(r, Err(HardgenError::PreconditionViolation(_))));
    }

    #[test]
    fn planted_mixed_split_verifies() {
        for seed in 0..20 {
            let (inst, sol) = planted_instance(
                12,
                &DegreeProfile::Uniform(3),
                BudgetSplit::new(2, 1, 1),
                seed,
                OperationSet::ALL,
            )
            .unwrap();
            assert_eq!(inst.graph().vertex_count(), 14);
            assert_eq!(sol.cost(), 4);
            assert!(verify(&inst, &sol).is_valid(), "seed {seed}");
        }
    }
}
