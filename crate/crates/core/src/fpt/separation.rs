//! Red/blue colorings and the class structure they induce.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::Vertex;
use crate::instance::EditingInstance;

use super::SolveError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
}

/// A color for every vertex of one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: BTreeMap<Vertex, Color>,
}

impl Coloring {
    /// Colors `vertices` red when they are in `red`, blue otherwise.
    pub fn from_red_set(
        vertices: impl IntoIterator<Item = Vertex>,
        red: &BTreeSet<Vertex>,
    ) -> Self {
        let colors = vertices
            .into_iter()
            .map(|v| (v, if red.contains(&v) { Color::Red } else { Color::Blue }))
            .collect();
        Coloring { colors }
    }

    /// Position `i` of `vertices` is red when bit `i` of `bits` is set.
    pub fn from_bits(vertices: &[Vertex], bits: u64) -> Self {
        let colors = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, if bits >> i & 1 == 1 { Color::Red } else { Color::Blue }))
            .collect();
        Coloring { colors }
    }

    /// The same coloring on a subset of the vertices.
    pub fn restricted_to(&self, vertices: impl IntoIterator<Item = Vertex>) -> Coloring {
        Coloring { colors: vertices.into_iter().map(|v| (v, self.colors[&v])).collect() }
    }

    pub fn color(&self, v: Vertex) -> Option<Color> {
        self.colors.get(&v).copied()
    }

    pub fn is_red(&self, v: Vertex) -> bool {
        self.color(v) == Some(Color::Red)
    }

    pub fn red(&self) -> BTreeSet<Vertex> {
        self.colors.iter().filter(|(_, c)| **c == Color::Red).map(|(&v, _)| v).collect()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.colors.keys().copied()
    }
}

/// Red classes `R_0..R_t`, their blue boundaries `B_0..B_t` and the
/// deficiency of every blue vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationProfile {
    /// `classes[0]` is `R_0` (possibly empty); the rest are ordered by
    /// smallest label.
    pub classes: Vec<BTreeSet<Vertex>>,
    pub boundaries: Vec<BTreeSet<Vertex>>,
    /// `δ(v) - d_{G-R}(v)` for every blue vertex.
    pub def: BTreeMap<Vertex, u32>,
}

impl SeparationProfile {
    /// Number of classes besides `R_0`.
    pub fn t(&self) -> usize {
        self.classes.len() - 1
    }

    pub fn def_sum(&self, set: &BTreeSet<Vertex>) -> u32 {
        set.iter().map(|v| self.def[v]).sum()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Groups red vertices joined by walks on which every three consecutive
/// vertices include a red one; equivalently, components of "red and at
/// distance at most 3". Classes reaching a vertex of `Z` within distance 2
/// form `R_0`.
pub fn compute_separation(
    inst: &EditingInstance,
    coloring: &Coloring,
) -> Result<SeparationProfile, SolveError> {
    let g = inst.graph();
    if !coloring.vertices().eq(g.vertices()) {
        return Err(SolveError::PreconditionViolation(
            "coloring is not defined on exactly the instance's vertices".into(),
        ));
    }
    if let Some(v) = g.vertices().find(|&v| g.degree(v) > inst.target(v) as usize) {
        return Err(SolveError::PreconditionViolation(format!("vertex {v} is overfull")));
    }

    let red: Vec<Vertex> = coloring.red().into_iter().collect();
    let index: BTreeMap<Vertex, usize> = red.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(red.len());
    for (i, &r) in red.iter().enumerate() {
        for (w, _) in g.distances_from([r].iter(), 3) {
            if let Some(&j) = index.get(&w) {
                uf.union(i, j);
            }
        }
    }

    let z: BTreeSet<Vertex> =
        g.vertices().filter(|&v| g.degree(v) < inst.target(v) as usize).collect();
    let near_z = g.distances_from(z.iter(), 2);
    let mut zero_roots = BTreeSet::new();
    for (i, r) in red.iter().enumerate() {
        if near_z.contains_key(r) {
            zero_roots.insert(uf.find(i));
        }
    }

    // Roots are the smallest index of their class, so iterating `red` in
    // order meets classes by smallest label.
    let mut classes = vec![BTreeSet::new()];
    let mut slot: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &r) in red.iter().enumerate() {
        let root = uf.find(i);
        let c = if zero_roots.contains(&root) {
            0
        } else {
            *slot.entry(root).or_insert_with(|| {
                classes.push(BTreeSet::new());
                classes.len() - 1
            })
        };
        classes[c].insert(r);
    }

    let mut boundaries: Vec<BTreeSet<Vertex>> = classes.iter().map(|c| g.open_neighborhood(c)).collect();
    boundaries[0].extend(z.iter().filter(|v| !coloring.is_red(**v)));

    let def = g
        .vertices()
        .filter(|&v| !coloring.is_red(v))
        .map(|v| {
            let blue_degree = g.neighbors(v).filter(|&w| !coloring.is_red(w)).count() as u32;
            (v, inst.target(v) - blue_degree)
        })
        .collect();
    Ok(SeparationProfile { classes, boundaries, def })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::instance::OperationSet;

    fn p5() -> EditingInstance {
        let delta = [(1, 2), (2, 2), (3, 2), (4, 2), (5, 1)].into_iter().collect();
        EditingInstance::new(Graph::path(5), delta, 2, 2, OperationSet::ALL).unwrap()
    }

    fn profile(inst: &EditingInstance, red: &[Vertex]) -> SeparationProfile {
        let coloring = Coloring::from_red_set(inst.graph().vertices(), &red.iter().copied().collect());
        compute_separation(inst, &coloring).unwrap()
    }

    #[test]
    fn far_red_end_is_its_own_class() {
        let p = profile(&p5(), &[5]);
        assert_eq!(p.t(), 1);
        assert!(p.classes[0].is_empty());
        assert_eq!(p.classes[1], BTreeSet::from([5]));
        assert_eq!(p.boundaries[0], BTreeSet::from([1]));
        assert_eq!(p.boundaries[1], BTreeSet::from([4]));
        assert_eq!(p.def[&1], 1);
        assert_eq!(p.def[&4], 1);
        assert_eq!(p.def[&2], 0);
    }

    #[test]
    fn chained_reds_join_the_zero_class() {
        let p = profile(&p5(), &[2, 5]);
        assert_eq!(p.t(), 0);
        assert_eq!(p.classes[0], BTreeSet::from([2, 5]));
    }

    #[test]
    fn red_underfull_vertex_is_in_zero_class() {
        let g = Graph::new(1..=3, [(1, 2)]).unwrap();
        let delta = (1..=3).map(|v| (v, 1)).collect();
        let inst = EditingInstance::new(g, delta, 1, 2, OperationSet::ALL).unwrap();
        let p = profile(&inst, &[3]);
        assert_eq!(p.classes, vec![BTreeSet::from([3])]);
        assert!(p.boundaries[0].is_empty());
        assert!(p.def.values().all(|&d| d == 0));
    }

    #[test]
    fn rejects_overfull_and_foreign_colorings() {
        let delta = (1..=3).map(|v| (v, 1)).collect();
        let inst = EditingInstance::new(Graph::path(3), delta, 1, 2, OperationSet::ALL).unwrap();
        let c = Coloring::from_red_set(1..=3, &BTreeSet::new());
        assert!(compute_separation(&inst, &c).is_err());
        let c = Coloring::from_red_set(1..=4, &BTreeSet::new());
        assert!(compute_separation(&p5(), &c).is_err());
    }
}
