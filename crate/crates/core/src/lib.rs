//! Bad cycles in directed hypergraphs described by finite state machines.
//!
//! A `k`-machine reads, for each step of a cycle, the pair of edge positions
//! the step enters and leaves through. This crate decides whether a
//! hypergraph avoids the machine's bad cycles, searches for the order
//! structures that characterize machines admitting good hypergraphs of large
//! chromatic number, and builds the explicit families used to check those
//! statements at small scale.

pub mod balanced;
pub mod coloring;
pub mod corpus;
pub mod error;
pub mod generators;
pub mod goodness;
pub mod hypergraph;
pub mod kernels;
pub mod machine;
pub mod order;
pub mod reductions;
pub mod relations;

pub use balanced::{balanced_coloring, is_alpha_balanced, BalanceVerdict, BalancedColoring};
pub use coloring::{chromatic_number_exact, chromatic_upper_greedy, ChromaticResult, Coloring};
pub use error::{Budget, Error, Result};
pub use goodness::{brute_force_is_good, build_auxiliary, is_good, BadCycleWitness, Verdict};
pub use hypergraph::{enumerate_cycles, path_digraph, CycleFilter, HyperCycle, Hypergraph};
pub use machine::{validate_machine, Machine, Semantics, StatePosition, ValidationReport};
pub use order::{CompatibleOrder, OrderSystem};
pub use reductions::{sat_to_machine, CnfInstance, Literal};
pub use relations::{Relation, RelationMachine};
