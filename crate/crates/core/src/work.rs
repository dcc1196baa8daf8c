//! Instrumented work counters for the dynamic structures.
//!
//! Wall-clock time is machine dependent; node/edge touch counts are not.
//! Every dynamic structure counts the nodes it visits and the edges it
//! inspects, both per update and cumulatively, so benchmarks and tests can
//! compare update cost against from-scratch recomputation deterministically.

/// Nodes visited and edges inspected by one or more operations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WorkCounter {
    pub nodes: u64,
    pub edges: u64,
}

impl WorkCounter {
    pub fn reset(&mut self) {
        *self = WorkCounter::default();
    }

    pub fn add(&mut self, other: WorkCounter) {
        self.nodes += other.nodes;
        self.edges += other.edges;
    }

    /// Single scalar used when comparing against a from-scratch baseline.
    pub fn total(&self) -> u64 {
        self.nodes + self.edges
    }
}
