//! Simple undirected graphs with stable vertex labels.
//!
//! A [`Graph`] is a value: every editing method returns a new graph and
//! leaves the receiver untouched. Labels survive deletions, so an edit set
//! computed on a reduced graph still names vertices of the original one.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Vertex label.
pub type Vertex = u32;

/// Unordered vertex pair stored as `(min, max)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgePair {
    u: Vertex,
    v: Vertex,
}

impl EdgePair {
    pub fn new(a: Vertex, b: Vertex) -> Result<Self, GraphError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(EdgePair { u: a, v: b }),
            std::cmp::Ordering::Greater => Ok(EdgePair { u: b, v: a }),
            std::cmp::Ordering::Equal => Err(GraphError::SelfLoop(a)),
        }
    }

    /// Smaller endpoint.
    pub fn u(&self) -> Vertex {
        self.u
    }

    /// Larger endpoint.
    pub fn v(&self) -> Vertex {
        self.v
    }

    pub fn endpoints(&self) -> [Vertex; 2] {
        [self.u, self.v]
    }

    pub fn contains(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite to `x`, if `x` is an endpoint.
    pub fn other(&self, x: Vertex) -> Option<Vertex> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

impl fmt::Display for EdgePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(Vertex),
    #[error("duplicate edge {0}")]
    DuplicateEdge(EdgePair),
    #[error("cannot delete {0}: not an edge")]
    NotAnEdge(EdgePair),
    #[error("cannot add {0}: already an edge")]
    AlreadyAnEdge(EdgePair),
    #[error("pair {pair} touches deleted vertex {vertex}")]
    EndpointDeleted { pair: EdgePair, vertex: Vertex },
    #[error("pair {0} listed both as deleted and as added")]
    DeletedAndAdded(EdgePair),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from a vertex list and an edge list.
    ///
    /// Rejects repeated vertices, self-loops, repeated edges (in either
    /// orientation) and edges with an undeclared endpoint.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = Vertex>,
        E: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Graph::default();
        for v in vertices {
            if g.adj.insert(v, BTreeSet::new()).is_some() {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        for (a, b) in edges {
            let e = EdgePair::new(a, b)?;
            for x in e.endpoints() {
                if !g.adj.contains_key(&x) {
                    return Err(GraphError::UnknownVertex(x));
                }
            }
            if !g.insert_edge(e) {
                return Err(GraphError::DuplicateEdge(e));
            }
        }
        Ok(g)
    }

    /// Graph on `1..=n` without edges.
    pub fn edgeless(n: u32) -> Self {
        Graph::new(1..=n, std::iter::empty()).expect("distinct labels")
    }

    /// Path `1 - 2 - ... - n`.
    pub fn path(n: u32) -> Self {
        Graph::new(1..=n, (1..n).map(|i| (i, i + 1))).expect("valid path")
    }

    /// Cycle on `1..=n`, `n >= 3`.
    pub fn cycle(n: u32) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Graph::new(1..=n, (1..=n).map(|i| (i, i % n + 1))).expect("valid cycle")
    }

    /// Complete graph on `1..=n`.
    pub fn complete(n: u32) -> Self {
        let edges = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)));
        Graph::new(1..=n, edges).expect("valid clique")
    }

    /// Complete bipartite graph with sides `1..=a` and `a+1..=a+b`.
    pub fn complete_bipartite(a: u32, b: u32) -> Self {
        let edges = (1..=a).flat_map(|x| (a + 1..=a + b).map(move |y| (x, y)));
        Graph::new(1..=a + b, edges).expect("valid biclique")
    }

    /// Star with center `1` and leaves `2..=leaves+1`.
    pub fn star(leaves: u32) -> Self {
        Graph::new(1..=leaves + 1, (2..=leaves + 1).map(|x| (1, x))).expect("valid star")
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    /// Vertices in ascending order.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    /// Edges in ascending canonical order.
    pub fn edges(&self) -> impl Iterator<Item = EdgePair> + '_ {
        self.adj.iter().flat_map(|(&a, nbrs)| {
            nbrs.range(a + 1..).map(move |&b| EdgePair { u: a, v: b })
        })
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.adj.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn contains_edge(&self, e: EdgePair) -> bool {
        self.has_edge(e.u, e.v)
    }

    /// Open neighborhood of `v`; empty for unknown vertices.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.get(&v).into_iter().flat_map(|n| n.iter().copied())
    }

    pub fn neighbor_set(&self, v: Vertex) -> Option<&BTreeSet<Vertex>> {
        self.adj.get(&v)
    }

    /// Degree of `v`; zero for unknown vertices.
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// `Some(d)` when every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let mut degrees = self.adj.values().map(BTreeSet::len);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// `N(X) = (∪ N(x)) \ X`.
    pub fn open_neighborhood(&self, x: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
        x.iter()
            .flat_map(|&v| self.neighbors(v))
            .filter(|w| !x.contains(w))
            .collect()
    }

    /// Breadth-first distances from `sources`, truncated at `limit`.
    pub fn distances_from<'a, I>(&self, sources: I, limit: usize) -> BTreeMap<Vertex, usize>
    where
        I: IntoIterator<Item = &'a Vertex>,
    {
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::new();
        for &s in sources {
            if self.contains_vertex(s) && dist.insert(s, 0).is_none() {
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            let dx = dist[&x];
            if dx == limit {
                continue;
            }
            for y in self.neighbors(x) {
                if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(y) {
                    slot.insert(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// `N^r[X]`: every vertex within distance `r` of some vertex of `x`.
    pub fn closed_neighborhood(
        &self,
        x: &BTreeSet<Vertex>,
        r: usize,
    ) -> Result<BTreeSet<Vertex>, GraphError> {
        if let Some(&missing) = x.iter().find(|v| !self.contains_vertex(**v)) {
            return Err(GraphError::UnknownVertex(missing));
        }
        Ok(self.distances_from(x, r).into_keys().collect())
    }

    /// Subgraph induced by `keep`; labels outside the graph are ignored.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> Graph {
        let mut g = Graph::default();
        for (&v, nbrs) in &self.adj {
            if keep.contains(&v) {
                let kept: BTreeSet<Vertex> =
                    nbrs.iter().copied().filter(|w| keep.contains(w)).collect();
                g.edge_count += kept.len();
                g.adj.insert(v, kept);
            }
        }
        g.edge_count /= 2;
        g
    }

    /// `G - X`.
    pub fn without_vertices(&self, x: &BTreeSet<Vertex>) -> Graph {
        if x.is_empty() {
            return self.clone();
        }
        let mut g = self.clone();
        for &v in x {
            g.remove_vertex_in_place(v);
        }
        g
    }

    pub fn without_vertex(&self, v: Vertex) -> Graph {
        let mut g = self.clone();
        g.remove_vertex_in_place(v);
        g
    }

    pub fn without_edge(&self, e: EdgePair) -> Result<Graph, GraphError> {
        if !self.contains_edge(e) {
            return Err(GraphError::NotAnEdge(e));
        }
        let mut g = self.clone();
        g.remove_edge_in_place(e);
        Ok(g)
    }

    pub fn with_edge(&self, e: EdgePair) -> Result<Graph, GraphError> {
        for x in e.endpoints() {
            if !self.contains_vertex(x) {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        let mut g = self.clone();
        if !g.insert_edge(e) {
            return Err(GraphError::AlreadyAnEdge(e));
        }
        Ok(g)
    }

    /// Adds fresh isolated vertices; existing labels are an error.
    pub fn with_vertices<I>(&self, vertices: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = Vertex>,
    {
        let mut g = self.clone();
        for v in vertices {
            if g.adj.insert(v, BTreeSet::new()).is_some() {
                return Err(GraphError::DuplicateVertex(v));
            }
        }
        Ok(g)
    }

    /// Returns `G - U - D + A`.
    ///
    /// `deleted_edges` must be edges of `G - U` and `added_pairs` non-edges
    /// of `G` with both endpoints outside `U`.
    pub fn apply_edits(
        &self,
        deleted_vertices: &BTreeSet<Vertex>,
        deleted_edges: &BTreeSet<EdgePair>,
        added_pairs: &BTreeSet<EdgePair>,
    ) -> Result<Graph, GraphError> {
        if let Some(&v) = deleted_vertices.iter().find(|v| !self.contains_vertex(**v)) {
            return Err(GraphError::UnknownVertex(v));
        }
        for (&e, must_be_edge) in deleted_edges
            .iter()
            .map(|e| (e, true))
            .chain(added_pairs.iter().map(|e| (e, false)))
        {
            for x in e.endpoints() {
                if !self.contains_vertex(x) {
                    return Err(GraphError::UnknownVertex(x));
                }
                if deleted_vertices.contains(&x) {
                    return Err(GraphError::EndpointDeleted { pair: e, vertex: x });
                }
            }
            match (must_be_edge, self.contains_edge(e)) {
                (true, false) => return Err(GraphError::NotAnEdge(e)),
                (false, true) => return Err(GraphError::AlreadyAnEdge(e)),
                _ => {}
            }
        }
        if let Some(&e) = deleted_edges.intersection(added_pairs).next() {
            return Err(GraphError::DeletedAndAdded(e));
        }
        let mut g = self.without_vertices(deleted_vertices);
        for &e in deleted_edges {
            g.remove_edge_in_place(e);
        }
        for &e in added_pairs {
            g.insert_edge(e);
        }
        Ok(g)
    }

    /// Greedy matching of `h` edges scanned in ascending canonical order.
    ///
    /// A selected edge has no endpoint in `forbidden_vertices`, no endpoint
    /// adjacent to a vertex of `forbidden_neighbors`, and shares no endpoint
    /// with an earlier selection. Returns `None` when the scan ends with
    /// fewer than `h` edges.
    pub fn greedy_matching_avoiding(
        &self,
        forbidden_vertices: &BTreeSet<Vertex>,
        forbidden_neighbors: &BTreeSet<Vertex>,
        h: usize,
    ) -> Option<Vec<EdgePair>> {
        let blocked = |x: Vertex| {
            forbidden_vertices.contains(&x)
                || self.neighbors(x).any(|y| forbidden_neighbors.contains(&y))
        };
        let mut used = BTreeSet::new();
        let mut matching = Vec::with_capacity(h);
        if h == 0 {
            return Some(matching);
        }
        for e in self.edges() {
            if used.contains(&e.u) || used.contains(&e.v) || blocked(e.u) || blocked(e.v) {
                continue;
            }
            used.insert(e.u);
            used.insert(e.v);
            matching.push(e);
            if matching.len() == h {
                return Some(matching);
            }
        }
        None
    }

    /// Cartesian product; vertex `(a, b)` is labelled by `label(a, b)`.
    pub fn cartesian_product<F>(&self, other: &Graph, label: F) -> Result<Graph, GraphError>
    where
        F: Fn(Vertex, Vertex) -> Vertex,
    {
        let mut vertices = Vec::with_capacity(self.vertex_count() * other.vertex_count());
        let mut edges = Vec::new();
        for a in self.vertices() {
            for b in other.vertices() {
                vertices.push(label(a, b));
            }
            for e in other.edges() {
                edges.push((label(a, e.u), label(a, e.v)));
            }
        }
        for e in self.edges() {
            for b in other.vertices() {
                edges.push((label(e.u, b), label(e.v, b)));
            }
        }
        Graph::new(vertices, edges)
    }

    pub(crate) fn remove_vertex_in_place(&mut self, v: Vertex) {
        if let Some(nbrs) = self.adj.remove(&v) {
            self.edge_count -= nbrs.len();
            for w in nbrs {
                if let Some(n) = self.adj.get_mut(&w) {
                    n.remove(&v);
                }
            }
        }
    }

    pub(crate) fn remove_edge_in_place(&mut self, e: EdgePair) -> bool {
        let removed = self.adj.get_mut(&e.u).is_some_and(|n| n.remove(&e.v));
        if removed {
            self.adj.get_mut(&e.v).map(|n| n.remove(&e.u));
            self.edge_count -= 1;
        }
        removed
    }

    /// Inserts an isolated vertex. Returns false if present.
    pub(crate) fn insert_vertex(&mut self, v: Vertex) -> bool {
        if self.adj.contains_key(&v) {
            return false;
        }
        self.adj.insert(v, BTreeSet::new());
        true
    }

    /// Inserts `e`; both endpoints must exist. Returns false if present.
    pub(crate) fn insert_edge(&mut self, e: EdgePair) -> bool {
        let inserted = self.adj.get_mut(&e.u).is_some_and(|n| n.insert(e.v));
        if inserted {
            self.adj.get_mut(&e.v).map(|n| n.insert(e.u));
            self.edge_count += 1;
        }
        inserted
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ep(a: Vertex, b: Vertex) -> EdgePair {
        EdgePair::new(a, b).unwrap()
    }

    fn set<T: Ord + Copy>(items: &[T]) -> BTreeSet<T> {
        items.iter().copied().collect()
    }

    #[test]
    fn edge_pair_is_canonical() {
        assert_eq!(ep(5, 2), ep(2, 5));
        assert_eq!(ep(5, 2).u(), 2);
        assert_eq!(EdgePair::new(3, 3), Err(GraphError::SelfLoop(3)));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(Graph::new([1, 2], [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            Graph::new([1, 2], [(1, 2), (2, 1)]),
            Err(GraphError::DuplicateEdge(ep(1, 2)))
        );
        assert_eq!(Graph::new([1, 2], [(1, 3)]), Err(GraphError::UnknownVertex(3)));
        assert_eq!(Graph::new([1, 1], []), Err(GraphError::DuplicateVertex(1)));
    }

    #[test]
    fn apply_nothing_is_identity() {
        let g = Graph::cycle(5);
        let h = g.apply_edits(&set(&[]), &set(&[]), &set(&[])).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn deleting_a_triangle_vertex_leaves_an_edge() {
        let g = Graph::complete(3);
        let h = g.apply_edits(&set(&[3]), &set(&[]), &set(&[])).unwrap();
        assert_eq!(h, Graph::new([1, 2], [(1, 2)]).unwrap());
        assert_eq!(g.edge_count(), 3, "input graph is untouched");
    }

    #[test]
    fn path_center_swap_for_chord() {
        let g = Graph::path(3);
        let h = g.apply_edits(&set(&[2]), &set(&[]), &set(&[ep(1, 3)])).unwrap();
        assert_eq!(h.degree(1), 1);
        assert_eq!(h.degree(3), 1);
        assert_eq!(h.vertex_count(), 2);
        assert!(h.has_edge(1, 3));
    }

    #[test]
    fn apply_edits_names_the_offender() {
        let g = Graph::path(3);
        let none: BTreeSet<Vertex> = BTreeSet::new();
        let no_pairs: BTreeSet<EdgePair> = BTreeSet::new();
        assert_eq!(
            g.apply_edits(&none, &set(&[ep(1, 3)]), &no_pairs),
            Err(GraphError::NotAnEdge(ep(1, 3)))
        );
        assert_eq!(
            g.apply_edits(&none, &no_pairs, &set(&[ep(1, 2)])),
            Err(GraphError::AlreadyAnEdge(ep(1, 2)))
        );
        assert_eq!(
            g.apply_edits(&set(&[2]), &set(&[ep(1, 2)]), &no_pairs),
            Err(GraphError::EndpointDeleted { pair: ep(1, 2), vertex: 2 })
        );
        assert_eq!(g.apply_edits(&set(&[9]), &no_pairs, &no_pairs), Err(GraphError::UnknownVertex(9)));
    }

    #[test]
    fn neighborhoods_on_paths_and_cycles() {
        let p = Graph::path(5);
        assert_eq!(p.closed_neighborhood(&set(&[1]), 0).unwrap(), set(&[1]));
        assert_eq!(p.closed_neighborhood(&set(&[1]), 2).unwrap(), set(&[1, 2, 3]));
        let c = Graph::cycle(4);
        assert_eq!(c.closed_neighborhood(&set(&[1]), 3).unwrap(), set(&[1, 2, 3, 4]));
        assert_eq!(p.closed_neighborhood(&set(&[7]), 1), Err(GraphError::UnknownVertex(7)));
    }

    #[test]
    fn greedy_matching_examples() {
        let two = Graph::new([1, 2, 3, 4], [(1, 2), (3, 4)]).unwrap();
        let none = set(&[]);
        assert_eq!(two.greedy_matching_avoiding(&none, &none, 2), Some(vec![ep(1, 2), ep(3, 4)]));

        let single = Graph::path(2);
        assert_eq!(single.greedy_matching_avoiding(&set(&[1]), &none, 1), None);

        // a-b-c-d with a = 1: ab and bc touch a or its neighbor b.
        let p4 = Graph::path(4);
        assert_eq!(p4.greedy_matching_avoiding(&none, &set(&[1]), 1), Some(vec![ep(3, 4)]));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1u32..9).prop_flat_map(|n| {
            let pairs: Vec<(u32, u32)> =
                (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b))).collect();
            let m = pairs.len();
            proptest::collection::vec(any::<bool>(), m).prop_map(move |mask| {
                let edges = pairs.iter().zip(&mask).filter(|(_, &k)| k).map(|(&e, _)| e);
                Graph::new(1..=n, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn edits_are_reversible(g in arb_graph(), picks in proptest::collection::vec(any::<u16>(), 6)) {
            let verts: Vec<Vertex> = g.vertices().collect();
            let u: BTreeSet<Vertex> = picks.iter().take(2)
                .map(|&p| verts[p as usize % verts.len()])
                .filter(|_| verts.len() > 2)
                .collect();
            let rest = g.without_vertices(&u);
            let edges: Vec<EdgePair> = rest.edges().collect();
            let non_edges: Vec<EdgePair> = rest.vertices()
                .flat_map(|a| rest.vertices().filter(move |&b| b > a).map(move |b| ep(a, b)))
                .filter(|e| !rest.contains_edge(*e))
                .collect();
            let d: BTreeSet<EdgePair> = if edges.is_empty() { BTreeSet::new() } else {
                picks[2..4].iter().map(|&p| edges[p as usize % edges.len()]).collect()
            };
            let a: BTreeSet<EdgePair> = if non_edges.is_empty() { BTreeSet::new() } else {
                picks[4..6].iter().map(|&p| non_edges[p as usize % non_edges.len()]).collect()
            };
            let edited = g.apply_edits(&u, &d, &a).unwrap();

            // Undo: restore U with its original incident edges, re-add D, drop A.
            let mut back = edited.with_vertices(u.iter().copied()).unwrap();
            for e in g.edges().filter(|e| e.endpoints().iter().any(|x| u.contains(x))) {
                back = back.with_edge(e).unwrap();
            }
            for &e in &d { back = back.with_edge(e).unwrap(); }
            for &e in &a { back = back.without_edge(e).unwrap(); }
            prop_assert_eq!(back, g);
        }

        #[test]
        fn neighborhoods_grow_to_a_fixed_point(g in arb_graph(), seed in any::<u32>()) {
            let v = g.vertices().nth(seed as usize % g.vertex_count()).unwrap();
            let x = BTreeSet::from([v]);
            let n = g.vertex_count();
            for r in 0..=n {
                let small = g.closed_neighborhood(&x, r).unwrap();
                let big = g.closed_neighborhood(&x, r + 1).unwrap();
                prop_assert!(small.is_subset(&big));
            }
            prop_assert_eq!(g.closed_neighborhood(&x, n).unwrap(), g.closed_neighborhood(&x, n + 5).unwrap());
        }

        #[test]
        fn greedy_output_is_a_valid_matching(g in arb_graph(), fv in any::<u8>(), fnb in any::<u8>(), h in 1usize..4) {
            let forbidden: BTreeSet<Vertex> = g.vertices().filter(|v| fv & (1 << (v % 8)) != 0).collect();
            let avoid: BTreeSet<Vertex> = g.vertices().filter(|v| fnb & (1 << (v % 8)) != 0).collect();
            if let Some(m) = g.greedy_matching_avoiding(&forbidden, &avoid, h) {
                prop_assert_eq!(m.len(), h);
                let mut seen = BTreeSet::new();
                for e in &m {
                    prop_assert!(g.contains_edge(*e));
                    for x in e.endpoints() {
                        prop_assert!(seen.insert(x));
                        prop_assert!(!forbidden.contains(&x));
                        prop_assert!(g.neighbors(x).all(|y| !avoid.contains(&y)));
                    }
                }
            }
        }
    }
}
