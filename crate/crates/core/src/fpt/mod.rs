//! The parameterized solver.
//!
//! [`solve`] first expands the tree of reduction rules and branches
//! ([`expand`]). Branches that end in a definite answer stop there; small
//! instances go to [`crate::oracle::solve_guided`]; the rest become leaves
//! that are attacked with red/blue colorings: each coloring is turned into a
//! [`SeparationProfile`], a chain of [`DeficiencyTable`]s and, possibly, a
//! colorful solution.
//!
//! Colorings are drawn from the configured [`Driver`] over the root's
//! vertices. The outer loop runs over colorings and the inner loop over
//! leaves, so the answer is the first success in that order.

pub mod extract;
pub mod reduce;
pub mod separation;
pub mod table;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Vertex;
use crate::instance::{verify, EditSet, EditingInstance, OperationSet};
use crate::oracle::{self, OracleError};
use crate::universal::{self, Method, UniversalError};

pub use extract::extract_colorful;
pub use reduce::{
    apply_isolates_rule, apply_vertex_deletion_rule, branch_children, reduce_instance,
    reduce_instance_with, Edit, ReductionOutcome,
};
pub use separation::{compute_separation, Color, Coloring, SeparationProfile};
pub use table::{
    build_table_initial, extend_table, partition_count, table_size_bound, DeficiencySequence,
    DeficiencyTable, TableEntry,
};

/// Default number of random colorings before giving up.
pub const DEFAULT_MAX_TRIALS: u64 = 10_000;

/// Default largest vertex count for [`Driver::ExhaustiveColorings`].
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

/// Default largest `C(n, r) · 2^r` for which the universal driver builds a
/// greedy family instead of enumerating every coloring.
pub const DEFAULT_GREEDY_WORK_LIMIT: u64 = 1 << 21;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("operation set {0} lacks vertex deletion or edge addition")]
    UnsupportedOperationSet(OperationSet),
    #[error("work limit of {limit} search nodes exceeded")]
    WorkLimitExceeded { limit: u64 },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("{n} vertices exceed the exhaustive coloring cap of {cap}")]
    ColoringCapExceeded { n: usize, cap: usize },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Universal(#[from] UniversalError),
}

impl From<OracleError> for SolveError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::WorkLimitExceeded { limit } => SolveError::WorkLimitExceeded { limit },
            OracleError::PreconditionViolation(m) => SolveError::PreconditionViolation(m),
        }
    }
}

/// Where colorings come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Driver {
    /// Independent fair colorings from a seeded generator; gives up with
    /// [`Outcome::Inconclusive`] after `max_trials`.
    Randomized { seed: u64, max_trials: u64 },
    /// All `2^n` colorings in ascending mask order.
    ExhaustiveColorings,
    /// An `(n, r)`-universal family with `r = min(4kd², n)`.
    Universal { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DriverConfig {
    pub driver: Driver,
    pub exhaustive_cap: usize,
    /// Largest `n` for which complete families are materialized.
    pub all_vectors_cap: usize,
    pub greedy_work_limit: u64,
    pub oracle_work_limit: u64,
    /// Send instances with fewer than `3kd²` edges to the exact search when
    /// edge deletion is allowed.
    pub small_instance_rule: bool,
}

impl DriverConfig {
    pub fn new(driver: Driver) -> Self {
        DriverConfig {
            driver,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            all_vectors_cap: universal::DEFAULT_ALL_VECTORS_CAP,
            greedy_work_limit: DEFAULT_GREEDY_WORK_LIMIT,
            oracle_work_limit: oracle::DEFAULT_WORK_LIMIT,
            small_instance_rule: true,
        }
    }

    pub fn randomized(seed: u64, max_trials: u64) -> Self {
        DriverConfig::new(Driver::Randomized { seed, max_trials })
    }

    pub fn exhaustive() -> Self {
        DriverConfig::new(Driver::ExhaustiveColorings)
    }

    pub fn universal(seed: u64) -> Self {
        DriverConfig::new(Driver::Universal { seed })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Yes(EditSet),
    No,
    Inconclusive { trials: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub branch_nodes: u64,
    pub leaves: u64,
    pub oracle_calls: u64,
    pub colorings_tried: u64,
    /// Largest table seen, keyed by the budget of the leaf it was built for.
    pub max_table_len: BTreeMap<u32, usize>,
}

impl SolveStats {
    fn record_table(&mut self, k: u32, len: usize) {
        let slot = self.max_table_len.entry(k).or_insert(0);
        *slot = (*slot).max(len);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: Outcome,
    pub stats: SolveStats,
}

/// An instance left for random separation, with the edits that led to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaf {
    pub inst: EditingInstance,
    pub lift: EditSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// Some branch was settled without colorings.
    Solved(EditSet),
    /// Every branch failed or became a leaf; leaves in depth-first order.
    Leaves(Vec<Leaf>),
}

/// Depth-first expansion of reductions and branches; children are visited
/// in the order [`branch_children`] lists them.
pub fn expand(
    inst: &EditingInstance,
    config: &DriverConfig,
    stats: &mut SolveStats,
) -> Result<Expansion, SolveError> {
    let mut stack = vec![(inst.clone(), EditSet::default())];
    let mut leaves = Vec::new();
    while let Some((node, lift)) = stack.pop() {
        stats.branch_nodes += 1;
        match reduce_instance_with(&node, config.small_instance_rule) {
            ReductionOutcome::No => {}
            ReductionOutcome::Yes(more) => return Ok(Expansion::Solved(lift.merged(&more))),
            ReductionOutcome::NeedsBranching { inst: reduced, lift: more, vertex } => {
                let lift = lift.merged(&more);
                let children = branch_children(&reduced, vertex)?;
                for (child, edit) in children.into_iter().rev() {
                    stack.push((child, lift.merged(&edit.to_edit_set())));
                }
            }
            ReductionOutcome::RouteToOracle { inst: reduced, lift: more } => {
                stats.oracle_calls += 1;
                if let Some(sol) = oracle::solve_guided(&reduced, config.oracle_work_limit)? {
                    return Ok(Expansion::Solved(lift.merged(&more).merged(&sol)));
                }
            }
            ReductionOutcome::ReadyForSeparation { inst: reduced, lift: more } => {
                stats.leaves += 1;
                leaves.push(Leaf { inst: reduced, lift: lift.merged(&more) });
            }
        }
    }
    Ok(Expansion::Leaves(leaves))
}

fn require_supported(ops: OperationSet) -> Result<(), SolveError> {
    if ops.includes(OperationSet::VERTEX_DELETION_EDGE_ADDITION) {
        Ok(())
    } else {
        Err(SolveError::UnsupportedOperationSet(ops))
    }
}

/// Result of the per-coloring pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorfulRun {
    pub solution: Option<EditSet>,
    /// Sequence counts of `T_0, ..., T_t`.
    pub table_lens: Vec<usize>,
}

/// Separation, tables and extraction for one coloring of `inst`.
pub fn solve_colorful(inst: &EditingInstance, coloring: &Coloring) -> Result<ColorfulRun, SolveError> {
    require_supported(inst.ops())?;
    let profile = compute_separation(inst, coloring)?;
    let mut table = build_table_initial(inst, &profile);
    let mut table_lens = vec![table.sequence_count()];
    for i in 1..=profile.t() {
        if matches!(table, DeficiencyTable::Empty | DeficiencyTable::Zero(_)) {
            break;
        }
        table = extend_table(&table, inst, &profile, i)?;
        table_lens.push(table.sequence_count());
    }
    let solution = extract_colorful(&table, inst, &profile)?;
    Ok(ColorfulRun { solution, table_lens })
}

/// Red sets over the root's vertices, as bit masks or explicit sets.
enum Colorings {
    Masks(Box<dyn Iterator<Item = u64>>),
    Random { rng: Box<ChaCha8Rng>, left: u64 },
}

fn colorings(inst: &EditingInstance, config: &DriverConfig) -> Result<Colorings, SolveError> {
    let n = inst.graph().vertex_count();
    match config.driver {
        Driver::Randomized { seed, max_trials } => {
            Ok(Colorings::Random { rng: Box::new(ChaCha8Rng::seed_from_u64(seed)), left: max_trials })
        }
        Driver::ExhaustiveColorings => {
            if n > config.exhaustive_cap || n >= 64 {
                return Err(SolveError::ColoringCapExceeded { n, cap: config.exhaustive_cap });
            }
            Ok(Colorings::Masks(Box::new(0..1u64 << n)))
        }
        Driver::Universal { seed } => {
            if n == 0 {
                return Ok(Colorings::Masks(Box::new(std::iter::once(0))));
            }
            let (k, d) = (inst.k() as usize, inst.d() as usize);
            let r = (4 * k * d * d).clamp(1, n);
            let fits_greedy = universal::demand_count(n, r) <= u128::from(config.greedy_work_limit);
            if r < n && n > config.all_vectors_cap && fits_greedy {
                let family = universal::enumerate_universal_with(
                    n,
                    r,
                    Method::Greedy { seed },
                    config.all_vectors_cap,
                    config.greedy_work_limit,
                )?;
                return Ok(Colorings::Masks(Box::new(family.vectors().to_vec().into_iter())));
            }
            if n > 64 {
                return Err(UniversalError::InvalidParameters { n, r }.into());
            }
            // The complete family, lightest colorings first.
            Ok(Colorings::Masks(Box::new(universal::vectors_by_weight(n))))
        }
    }
}

impl Colorings {
    fn next_red(&mut self, vertices: &[Vertex]) -> Option<BTreeSet<Vertex>> {
        match self {
            Colorings::Masks(it) => {
                let mask = it.next()?;
                Some(vertices.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect())
            }
            Colorings::Random { rng, left } => {
                if *left == 0 {
                    return None;
                }
                *left -= 1;
                Some(vertices.iter().copied().filter(|_| rng.gen::<bool>()).collect())
            }
        }
    }
}

/// Decides `inst`. Yes answers are verified against `inst` before they are
/// returned.
pub fn solve(inst: &EditingInstance, config: &DriverConfig) -> Result<SolveResult, SolveError> {
    require_supported(inst.ops())?;
    let mut stats = SolveStats::default();
    let checked = |sol: EditSet, stats: SolveStats| {
        let report = verify(inst, &sol);
        if !report.is_valid() {
            let reasons: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            return Err(SolveError::InternalInconsistency(format!(
                "solver produced an invalid edit set: {}",
                reasons.join("; ")
            )));
        }
        Ok(SolveResult { outcome: Outcome::Yes(sol), stats })
    };

    let leaves = match expand(inst, config, &mut stats)? {
        Expansion::Solved(sol) => return checked(sol, stats),
        Expansion::Leaves(leaves) if leaves.is_empty() => {
            return Ok(SolveResult { outcome: Outcome::No, stats });
        }
        Expansion::Leaves(leaves) => leaves,
    };

    let vertices: Vec<Vertex> = inst.graph().vertices().collect();
    let leaf_vertices: Vec<Vec<Vertex>> =
        leaves.iter().map(|l| l.inst.graph().vertices().collect()).collect();
    // Colorings that agree on a leaf's vertices give the same result there.
    let mut seen: Vec<HashSet<Vec<Vertex>>> = vec![HashSet::new(); leaves.len()];
    let mut source = colorings(inst, config)?;
    while let Some(red) = source.next_red(&vertices) {
        stats.colorings_tried += 1;
        for (i, leaf) in leaves.iter().enumerate() {
            let local: Vec<Vertex> =
                leaf_vertices[i].iter().copied().filter(|v| red.contains(v)).collect();
            if !seen[i].insert(local.clone()) {
                continue;
            }
            let local: BTreeSet<Vertex> = local.into_iter().collect();
            let coloring = Coloring::from_red_set(leaf_vertices[i].iter().copied(), &local);
            let run = solve_colorful(&leaf.inst, &coloring)?;
            for len in run.table_lens {
                stats.record_table(leaf.inst.k(), len);
            }
            if let Some(sol) = run.solution {
                return checked(leaf.lift.merged(&sol), stats);
            }
        }
    }
    let outcome = match config.driver {
        Driver::Randomized { max_trials, .. } => Outcome::Inconclusive { trials: max_trials },
        _ => Outcome::No,
    };
    Ok(SolveResult { outcome, stats })
}
