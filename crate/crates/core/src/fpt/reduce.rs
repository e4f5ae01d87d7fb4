//! Reduction rules and the branching step.

use std::collections::BTreeSet;

use crate::graph::{EdgePair, Vertex};
use crate::instance::{EditSet, EditingInstance};

use super::SolveError;

/// What [`reduce_instance`] decided. `lift` collects the edits made on the
/// way, to be merged into any solution of the reduced instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionOutcome {
    Yes(EditSet),
    No,
    NeedsBranching { inst: EditingInstance, lift: EditSet, vertex: Vertex },
    RouteToOracle { inst: EditingInstance, lift: EditSet },
    ReadyForSeparation { inst: EditingInstance, lift: EditSet },
}

/// A single edit made by a branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Edit {
    DeleteVertex(Vertex),
    DeleteEdge(EdgePair),
}

impl Edit {
    pub fn to_edit_set(self) -> EditSet {
        match self {
            Edit::DeleteVertex(v) => EditSet::new([v], [], []),
            Edit::DeleteEdge(e) => EditSet::new([], [e], []),
        }
    }
}

/// Deletes every vertex with `d(v) > δ(v) + k`, one at a time and lowest
/// label first, decrementing `k` each time.
///
/// Returns `None` when the budget runs out, or when such a vertex exists but
/// vertex deletion is not allowed (it would need more than `k` edge
/// deletions).
pub fn apply_vertex_deletion_rule(
    inst: &EditingInstance,
) -> Option<(EditingInstance, BTreeSet<Vertex>)> {
    let mut cur = inst.clone();
    let mut deleted = BTreeSet::new();
    loop {
        let k = cur.k();
        let heavy = cur
            .graph()
            .vertices()
            .find(|&v| cur.graph().degree(v) > (cur.target(v) + k) as usize);
        let Some(v) = heavy else { return Some((cur, deleted)) };
        if k == 0 || !cur.ops().vertex_deletion() {
            return None;
        }
        deleted.insert(v);
        cur = cur.derive(cur.graph().without_vertex(v), k - 1);
    }
}

/// Removes every vertex with `d(v) = δ(v) = 0`. These never need an edit.
pub fn apply_isolates_rule(inst: &EditingInstance) -> EditingInstance {
    let idle: BTreeSet<Vertex> = inst
        .graph()
        .vertices()
        .filter(|&v| inst.graph().degree(v) == 0 && inst.target(v) == 0)
        .collect();
    if idle.is_empty() {
        return inst.clone();
    }
    inst.derive(inst.graph().without_vertices(&idle), inst.k())
}

/// [`reduce_instance_with`] with the small instance rule enabled.
pub fn reduce_instance(inst: &EditingInstance) -> ReductionOutcome {
    reduce_instance_with(inst, true)
}

/// Applies the rules in order: vertex deletion, branching check, stopping,
/// isolates, small instance.
///
/// The small instance rule only fires when edge deletion is allowed and
/// `small_instance_rule` is set.
pub fn reduce_instance_with(inst: &EditingInstance, small_instance_rule: bool) -> ReductionOutcome {
    let Some((inst, deleted)) = apply_vertex_deletion_rule(inst) else {
        return ReductionOutcome::No;
    };
    let lift = EditSet::new(deleted, [], []);
    let g = inst.graph();

    let overfull = g.vertices().find(|&v| g.degree(v) > inst.target(v) as usize);
    if let Some(v) = overfull {
        if inst.k() == 0 {
            return ReductionOutcome::No;
        }
        return ReductionOutcome::NeedsBranching { inst, lift, vertex: v };
    }

    let g = inst.graph();
    let z = g.vertices().filter(|&v| g.degree(v) < inst.target(v) as usize).count();
    if z > 2 * inst.k() as usize {
        return ReductionOutcome::No;
    }
    if z == 0 {
        return ReductionOutcome::Yes(lift);
    }
    if inst.k() == 0 {
        return ReductionOutcome::No;
    }

    let inst = apply_isolates_rule(&inst);
    let (k, d) = (inst.k() as usize, inst.d() as usize);
    if small_instance_rule
        && inst.ops().edge_deletion()
        && inst.graph().edge_count() < 3 * k * d * d
    {
        return ReductionOutcome::RouteToOracle { inst, lift };
    }
    ReductionOutcome::ReadyForSeparation { inst, lift }
}

/// Children of the branching rule at an overfull vertex `v`: delete each
/// `u ∈ N[v]` in label order, then (if allowed) each edge `uv`.
pub fn branch_children(
    inst: &EditingInstance,
    v: Vertex,
) -> Result<Vec<(EditingInstance, Edit)>, SolveError> {
    let g = inst.graph();
    if !g.contains_vertex(v) {
        return Err(SolveError::PreconditionViolation(format!("unknown vertex {v}")));
    }
    if g.degree(v) <= inst.target(v) as usize {
        return Err(SolveError::PreconditionViolation(format!("vertex {v} is not overfull")));
    }
    if inst.k() == 0 {
        return Err(SolveError::PreconditionViolation("branching needs k >= 1".into()));
    }
    let k = inst.k() - 1;
    let mut closed: Vec<Vertex> = g.neighbors(v).collect();
    closed.push(v);
    closed.sort_unstable();

    let mut children = Vec::new();
    if inst.ops().vertex_deletion() {
        for &u in &closed {
            children.push((inst.derive(g.without_vertex(u), k), Edit::DeleteVertex(u)));
        }
    }
    if inst.ops().edge_deletion() {
        for u in g.neighbors(v) {
            let e = EdgePair::new(u, v).expect("no self-loops");
            let child = g.without_edge(e).expect("edge of g");
            children.push((inst.derive(child, k), Edit::DeleteEdge(e)));
        }
    }
    Ok(children)
}
