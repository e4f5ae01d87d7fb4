//! Problem instances, edit sets and the verifier.
//!
//! [`verify`] is the ground truth the solvers are checked against: it never
//! trusts an edit set and reports every problem it finds.

mod codec;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{EdgePair, Graph, GraphError, Vertex};

pub use codec::{
    parse_instance, parse_solution, write_instance, write_solution, ParseError, ParseErrorKind,
    SolutionDocument, Verdict,
};

/// One editing operation kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operation {
    VertexDeletion,
    EdgeDeletion,
    EdgeAddition,
}

impl Operation {
    pub fn letter(self) -> char {
        match self {
            Operation::VertexDeletion => 'V',
            Operation::EdgeDeletion => 'D',
            Operation::EdgeAddition => 'A',
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Operation::VertexDeletion => "vertex deletion",
            Operation::EdgeDeletion => "edge deletion",
            Operation::EdgeAddition => "edge addition",
        };
        f.write_str(name)
    }
}

/// Non-empty subset of the three operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OperationSet {
    vertex_deletion: bool,
    edge_deletion: bool,
    edge_addition: bool,
}

impl OperationSet {
    pub const ALL: OperationSet =
        OperationSet { vertex_deletion: true, edge_deletion: true, edge_addition: true };

    /// Vertex deletion plus edge addition, the smallest set the FPT solver accepts.
    pub const VERTEX_DELETION_EDGE_ADDITION: OperationSet =
        OperationSet { vertex_deletion: true, edge_deletion: false, edge_addition: true };

    pub fn new(
        vertex_deletion: bool,
        edge_deletion: bool,
        edge_addition: bool,
    ) -> Result<Self, InstanceError> {
        if !(vertex_deletion || edge_deletion || edge_addition) {
            return Err(InstanceError::EmptyOperationSet);
        }
        Ok(OperationSet { vertex_deletion, edge_deletion, edge_addition })
    }

    /// Parses the `V`/`D`/`A` letters, which must appear in that order.
    pub fn from_letters(s: &str) -> Result<Self, InstanceError> {
        let bad = || InstanceError::BadOperationString(s.to_string());
        let mut rest = s;
        let mut take = |c: char| match rest.strip_prefix(c) {
            Some(r) => {
                rest = r;
                true
            }
            None => false,
        };
        let (v, d, a) = (take('V'), take('D'), take('A'));
        if !rest.is_empty() {
            return Err(bad());
        }
        OperationSet::new(v, d, a).map_err(|_| bad())
    }

    pub fn allows(&self, op: Operation) -> bool {
        match op {
            Operation::VertexDeletion => self.vertex_deletion,
            Operation::EdgeDeletion => self.edge_deletion,
            Operation::EdgeAddition => self.edge_addition,
        }
    }

    pub fn vertex_deletion(&self) -> bool {
        self.vertex_deletion
    }

    pub fn edge_deletion(&self) -> bool {
        self.edge_deletion
    }

    pub fn edge_addition(&self) -> bool {
        self.edge_addition
    }

    /// Whether every operation of `other` is allowed here.
    pub fn includes(&self, other: OperationSet) -> bool {
        (!other.vertex_deletion || self.vertex_deletion)
            && (!other.edge_deletion || self.edge_deletion)
            && (!other.edge_addition || self.edge_addition)
    }
}

impl fmt::Display for OperationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in [Operation::VertexDeletion, Operation::EdgeDeletion, Operation::EdgeAddition] {
            if self.allows(op) {
                write!(f, "{}", op.letter())?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("operation set must contain at least one operation")]
    EmptyOperationSet,
    #[error("bad operation string {0:?}: expected a non-empty ordered subset of \"VDA\"")]
    BadOperationString(String),
    #[error("maximum degree bound d must be positive")]
    ZeroDegreeBound,
    #[error("vertex {0} has no target degree")]
    MissingTarget(Vertex),
    #[error("target degree given for unknown vertex {0}")]
    UnknownTarget(Vertex),
    #[error("target degree {delta} of vertex {vertex} exceeds d = {d}")]
    TargetOutOfRange { vertex: Vertex, delta: u32, d: u32 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A graph, target degrees `δ`, the bound `d ≥ max δ`, the budget `k` and
/// the allowed operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditingInstance {
    graph: Graph,
    delta: BTreeMap<Vertex, u32>,
    d: u32,
    k: u32,
    ops: OperationSet,
}

impl EditingInstance {
    pub fn new(
        graph: Graph,
        delta: BTreeMap<Vertex, u32>,
        d: u32,
        k: u32,
        ops: OperationSet,
    ) -> Result<Self, InstanceError> {
        if d == 0 {
            return Err(InstanceError::ZeroDegreeBound);
        }
        if let Some(v) = graph.vertices().find(|v| !delta.contains_key(v)) {
            return Err(InstanceError::MissingTarget(v));
        }
        for (&vertex, &target) in &delta {
            if !graph.contains_vertex(vertex) {
                return Err(InstanceError::UnknownTarget(vertex));
            }
            if target > d {
                return Err(InstanceError::TargetOutOfRange { vertex, delta: target, d });
            }
        }
        Ok(EditingInstance { graph, delta, d, k, ops })
    }

    /// Same `δ` (restricted), `d` and operations on a new graph and budget.
    ///
    /// `graph` must have vertices drawn from this instance.
    pub fn derive(&self, graph: Graph, k: u32) -> EditingInstance {
        let delta = graph.vertices().map(|v| (v, self.delta[&v])).collect();
        EditingInstance { graph, delta, d: self.d, k, ops: self.ops }
    }

    pub fn with_budget(&self, k: u32) -> EditingInstance {
        EditingInstance { k, ..self.clone() }
    }

    pub fn with_ops(&self, ops: OperationSet) -> EditingInstance {
        EditingInstance { ops, ..self.clone() }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn delta(&self) -> &BTreeMap<Vertex, u32> {
        &self.delta
    }

    /// Target degree of `v`.
    ///
    /// # Panics
    /// If `v` is not a vertex of the instance.
    pub fn target(&self, v: Vertex) -> u32 {
        self.delta[&v]
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn ops(&self) -> OperationSet {
        self.ops
    }

    /// `δ(v) - deg(v)`: positive when `v` is underfull.
    pub fn gap(&self, v: Vertex) -> i64 {
        i64::from(self.delta[&v]) - self.graph.degree(v) as i64
    }

    /// Vertices below and above their target degree.
    pub fn deviation_sets(&self) -> (BTreeSet<Vertex>, BTreeSet<Vertex>) {
        let mut under = BTreeSet::new();
        let mut over = BTreeSet::new();
        for v in self.graph.vertices() {
            match self.gap(v) {
                g if g > 0 => {
                    under.insert(v);
                }
                g if g < 0 => {
                    over.insert(v);
                }
                _ => {}
            }
        }
        (under, over)
    }
}

/// Free-function form of [`EditingInstance::deviation_sets`].
pub fn deviation_sets(inst: &EditingInstance) -> (BTreeSet<Vertex>, BTreeSet<Vertex>) {
    inst.deviation_sets()
}

/// A candidate solution `(U, D, A)`: deleted vertices, deleted edges and
/// added pairs. Nothing is enforced on construction; see [`verify`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EditSet {
    pub deleted_vertices: BTreeSet<Vertex>,
    pub deleted_edges: BTreeSet<EdgePair>,
    pub added_edges: BTreeSet<EdgePair>,
}

impl EditSet {
    pub fn new(
        deleted_vertices: impl IntoIterator<Item = Vertex>,
        deleted_edges: impl IntoIterator<Item = EdgePair>,
        added_edges: impl IntoIterator<Item = EdgePair>,
    ) -> Self {
        EditSet {
            deleted_vertices: deleted_vertices.into_iter().collect(),
            deleted_edges: deleted_edges.into_iter().collect(),
            added_edges: added_edges.into_iter().collect(),
        }
    }

    pub fn cost(&self) -> usize {
        self.deleted_vertices.len() + self.deleted_edges.len() + self.added_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cost() == 0
    }

    /// Union of two edit sets made on successive graphs.
    ///
    /// A pair deleted by one side and re-added by the other cancels out: the
    /// graph is the same without both edits.
    pub fn merged(&self, later: &EditSet) -> EditSet {
        let mut out = self.clone();
        out.deleted_vertices.extend(&later.deleted_vertices);
        for &e in &later.deleted_edges {
            if !out.added_edges.remove(&e) {
                out.deleted_edges.insert(e);
            }
        }
        for &e in &later.added_edges {
            if !out.deleted_edges.remove(&e) {
                out.added_edges.insert(e);
            }
        }
        out
    }

    /// Canonical comparison key: `U`, then `D`, then `A`, each ascending.
    pub fn sort_key(&self) -> (Vec<Vertex>, Vec<EdgePair>, Vec<EdgePair>) {
        (
            self.deleted_vertices.iter().copied().collect(),
            self.deleted_edges.iter().copied().collect(),
            self.added_edges.iter().copied().collect(),
        )
    }
}

/// Why a pair in `D` or `A` cannot be applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairProblem {
    UnknownEndpoint(Vertex),
    EndpointDeleted(Vertex),
    NotAnEdge,
    AlreadyAnEdge,
    DeletedAndAdded,
}

impl fmt::Display for PairProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairProblem::UnknownEndpoint(v) => write!(f, "unknown endpoint {v}"),
            PairProblem::EndpointDeleted(v) => write!(f, "endpoint {v} is deleted"),
            PairProblem::NotAnEdge => f.write_str("deleted pair is not an edge"),
            PairProblem::AlreadyAnEdge => f.write_str("added pair is already an edge"),
            PairProblem::DeletedAndAdded => f.write_str("pair is both deleted and added"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BudgetExceeded { cost: usize, budget: u32 },
    OpNotAllowed(Operation),
    UnknownVertex(Vertex),
    IllegalPair { pair: EdgePair, problem: PairProblem },
    DegreeMismatch { vertex: Vertex, actual: usize, target: u32 },
}

impl Violation {
    /// Short tag used in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            Violation::BudgetExceeded { .. } => "BudgetExceeded",
            Violation::OpNotAllowed(_) => "OpNotAllowed",
            Violation::UnknownVertex(_) => "UnknownVertex",
            Violation::IllegalPair { .. } => "IllegalPair",
            Violation::DegreeMismatch { .. } => "DegreeMismatch",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BudgetExceeded { cost, budget } => {
                write!(f, "BudgetExceeded: cost {cost} > budget {budget}")
            }
            Violation::OpNotAllowed(op) => write!(f, "OpNotAllowed: {op}"),
            Violation::UnknownVertex(v) => write!(f, "UnknownVertex: {v}"),
            Violation::IllegalPair { pair, problem } => {
                write!(f, "IllegalPair: {} {}: {problem}", pair.u(), pair.v())
            }
            Violation::DegreeMismatch { vertex, actual, target } => {
                write!(f, "DegreeMismatch: vertex {vertex} has degree {actual}, target {target}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks an edit set against an instance.
///
/// Degrees are only checked when every edit is applicable.
pub fn verify(inst: &EditingInstance, edits: &EditSet) -> VerifyReport {
    let mut violations = Vec::new();
    let g = inst.graph();

    let cost = edits.cost();
    if cost > inst.k() as usize {
        violations.push(Violation::BudgetExceeded { cost, budget: inst.k() });
    }
    for (op, used) in [
        (Operation::VertexDeletion, !edits.deleted_vertices.is_empty()),
        (Operation::EdgeDeletion, !edits.deleted_edges.is_empty()),
        (Operation::EdgeAddition, !edits.added_edges.is_empty()),
    ] {
        if used && !inst.ops().allows(op) {
            violations.push(Violation::OpNotAllowed(op));
        }
    }

    let mut applicable = true;
    for &v in &edits.deleted_vertices {
        if !g.contains_vertex(v) {
            violations.push(Violation::UnknownVertex(v));
            applicable = false;
        }
    }
    let pair_problem = |pair: &EdgePair, deleting: bool| -> Option<PairProblem> {
        for x in pair.endpoints() {
            if !g.contains_vertex(x) {
                return Some(PairProblem::UnknownEndpoint(x));
            }
            if edits.deleted_vertices.contains(&x) {
                return Some(PairProblem::EndpointDeleted(x));
            }
        }
        match (deleting, g.contains_edge(*pair)) {
            (true, false) => Some(PairProblem::NotAnEdge),
            (false, true) => Some(PairProblem::AlreadyAnEdge),
            _ if deleting && edits.added_edges.contains(pair) => Some(PairProblem::DeletedAndAdded),
            _ => None,
        }
    };
    for (pairs, deleting) in [(&edits.deleted_edges, true), (&edits.added_edges, false)] {
        for pair in pairs {
            if let Some(problem) = pair_problem(pair, deleting) {
                violations.push(Violation::IllegalPair { pair: *pair, problem });
                applicable = false;
            }
        }
    }

    if applicable {
        let edited = g
            .apply_edits(&edits.deleted_vertices, &edits.deleted_edges, &edits.added_edges)
            .expect("applicability checked above");
        for v in edited.vertices() {
            let actual = edited.degree(v);
            let target = inst.target(v);
            if actual != target as usize {
                violations.push(Violation::DegreeMismatch { vertex: v, actual, target });
            }
        }
    }
    VerifyReport { violations }
}
