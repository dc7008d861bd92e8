//! Trivially perfect graph editing toolkit.
//!
//! A graph is *trivially perfect* when it has no induced path or cycle on
//! four vertices. This crate bundles everything needed to study the editing,
//! deletion and completion problems around that class at desk scale:
//!
//! - [`graph`]: bitset-adjacency graphs, pair edits, obstruction search and
//!   twin/module primitives;
//! - [`tp`]: recognition with certificates, the universal clique
//!   decomposition and its vertex quasi-order, independent sets;
//! - [`matching`]: exact maximum matchings (blossom and bipartite) with
//!   threshold early exit;
//! - [`md`]: modular decomposition and candidate modules for the module
//!   reduction rule;
//! - [`kernel`]: the five reduction rules, modulator construction, comb
//!   anatomy and the kernelization driver with replayable traces;
//! - [`solver`]: exact bounded-search-tree and brute-force solvers used as
//!   correctness oracles;
//! - [`reduction`]: the 3SAT-to-editing hardness-instance construction;
//! - [`io`]: file formats, run reports, trace streams and the planted
//!   instance generator;
//! - [`oracle`]: exhaustive reference implementations for testing.

pub mod bitset;
pub mod graph;
pub mod io;
pub mod kernel;
pub mod matching;
pub mod md;
pub mod oracle;
pub mod reduction;
pub mod rng;
pub mod solver;
pub mod tp;

pub use bitset::VertexSet;
pub use graph::{EditSet, Graph, Obstruction, ObstructionKind, Pair, Vertex};
pub use kernel::{kernelize, Instance, KernelOutcome, Mode};
pub use solver::{solve_branching, solve_bruteforce, SolveOutcome, SolveResult};
