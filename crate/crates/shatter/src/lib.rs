//! Combinatorics of finite set systems with an eye on Ramsey-type clique search.
//!
//! The crate is organized around four layers that build on each other:
//!
//! * [`set_system`] — indexed families of subsets of a finite ground set, exact
//!   VC dimension, duals, shattering witnesses, and a plain text/JSON format.
//! * [`packing`] — crossing counts, greedy δ-separated packings, the Haussler
//!   packing bound, and the low-crossing partition built from a maximal packing.
//! * [`coloring`] — complete-graph edge colorings, their neighborhood families,
//!   the recursive lower-bound coloring, and an exhaustive monochromatic
//!   clique finder.
//! * [`clique`] / [`pipeline`] — certificate checking, the counting-based
//!   clique extension step, a practical neighborhood-descent finder, and a
//!   level-by-level trace of the partition-and-prune pipeline.
//!
//! Everything is deterministic: randomized constructions take explicit seeds
//! and identical inputs produce identical outputs, including serialized forms.

pub mod bits;
pub mod clique;
pub mod coloring;
pub mod packing;
pub mod pipeline;
pub mod set_system;

pub use bits::BitRow;
pub use clique::{neighborhood_descent, verify_clique, CliqueError, DescentOutcome};
pub use coloring::{
    coloring_dual_vc, find_monochromatic_clique_bruteforce, lower_bound_coloring,
    neighborhood_family, random_coloring, CliqueCertificate, EdgeColoring,
};
pub use packing::{
    crossing_count, greedy_delta_packing, haussler_bound, haussler_c1, haussler_c2, partition,
    verify_partition, Packing, Partition, PartitionReport,
};
pub use pipeline::{
    advance, apply_partition, clique_extension, color_menus, covered_edges, pipeline_trace,
    CoverageReport, EdgeSet, EdgeType, ExtensionMiss, ExtensionOutcome, PartMenus, PipelineError,
    PipelineState, PipelineTrace,
};
pub use set_system::{SetSystem, ShatterWitness, DEFAULT_SHATTER_BUDGET};
