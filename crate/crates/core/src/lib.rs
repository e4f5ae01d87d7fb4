//! Editing a graph so that every vertex reaches a prescribed degree.
//!
//! The crate solves the following problem: given a graph `G`, target degrees
//! `δ(v) ≤ d`, a budget `k` and a set of allowed operations (vertex deletion,
//! edge deletion, edge addition), find at most `k` operations after which
//! every remaining vertex `v` has degree exactly `δ(v)`.
//!
//! * [`graph`] and [`instance`] hold the data model, the text formats and the
//!   verifier.
//! * [`oracle`] has exhaustive solvers for cross-checking.
//! * [`fpt`] is the parameterized solver: reduction rules, branching, random
//!   separation and a dynamic program over deficiency sequences.
//! * [`universal`] builds coloring families that replace random colorings.
//! * [`hardgen`] generates structured and planted instances.

pub mod fpt;
pub mod graph;
pub mod hardgen;
pub mod instance;
pub mod oracle;
pub mod universal;

pub use graph::{EdgePair, Graph, GraphError, Vertex};
pub use instance::{verify, EditSet, EditingInstance, Operation, OperationSet};
