//! Weight-dynamic graph algorithms.
//!
//! Graphs here have a fixed topology and mutable positive integer edge
//! weights in `[1, W]`. A change stream mutates weights by bounded additive
//! deltas; the dynamic structures in this crate maintain a shortest
//! (s,t)-path distance, a maximum (s,t)-flow, a maximum-weight bipartite
//! matching and a minimum spanning tree across those changes, each checked
//! against from-scratch solvers. The `gadgets` module builds the
//! vector-matrix-vector instance families whose queries those structures
//! answer, plus the weight-shift transforms used to relate matching and
//! semi-matching optima to plain matching cardinality.

pub mod bruteforce;
pub mod flow;
pub mod format;
pub mod gadgets;
pub mod gen;
pub mod graph;
pub mod matching;
pub mod mst;
pub mod oracle;
pub mod semi;
pub mod sssp;
pub mod work;
