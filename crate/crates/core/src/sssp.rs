//! Dynamic single-source shortest paths under edge weight changes.
//!
//! Maintains exact distances from a fixed source `s` (and so the (s,t)
//! distance) with a constant-time distance query. Updates repair only the
//! affected region: a weight decrease floods improvements outward from the
//! changed edge; a weight increase on a tree edge invalidates the subtree
//! hanging below it and re-settles it from the frontier of intact nodes.
//! Changes that alter no distance touch only the changed edge's endpoints
//! and, at worst, one incidence list.

use crate::graph::{EdgeId, GraphError, NodeId, WeightChange, WeightedGraph};
use crate::oracle::{Dist, OracleError};
use crate::work::WorkCounter;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
pub struct SsspState {
    source: NodeId,
    target: NodeId,
    dist: Vec<Dist>,
    parent: Vec<Option<EdgeId>>,
    total_work: WorkCounter,
    last_work: WorkCounter,
}

impl SsspState {
    /// Full Dijkstra initialization.
    pub fn init(g: &WeightedGraph, source: NodeId, target: NodeId) -> Result<Self, OracleError> {
        for x in [source, target] {
            if !g.contains_node(x) {
                return Err(OracleError::NodeOutOfRange(x, g.node_count()));
            }
        }
        let n = g.node_count();
        let mut state = SsspState {
            source,
            target,
            dist: vec![Dist::Inf; n + 1],
            parent: vec![None; n + 1],
            total_work: WorkCounter::default(),
            last_work: WorkCounter::default(),
        };
        let mut work = WorkCounter::default();
        state.dist[source] = Dist::Finite(0);
        let mut settled = vec![false; n + 1];
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0i64, source)));
        while let Some(Reverse((d, x))) = heap.pop() {
            if settled[x] {
                continue;
            }
            settled[x] = true;
            work.nodes += 1;
            for &eid in g.incident(x) {
                work.edges += 1;
                let e = g.edge(eid);
                if g.directed() && e.u != x {
                    continue;
                }
                let y = e.other(x);
                let cand = Dist::Finite(d + e.w);
                if cand < state.dist[y] {
                    state.dist[y] = cand;
                    state.parent[y] = Some(eid);
                    heap.push(Reverse((d + e.w, y)));
                }
            }
        }
        state.last_work = work;
        state.total_work = work;
        Ok(state)
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    /// O(1) distance lookup for the maintained (s,t) pair.
    pub fn query_dist(&self) -> Dist {
        self.dist[self.target]
    }

    pub fn dist_to(&self, v: NodeId) -> Dist {
        self.dist[v]
    }

    /// Nodes visited / edges inspected by the most recent operation.
    pub fn last_work(&self) -> WorkCounter {
        self.last_work
    }

    pub fn total_work(&self) -> WorkCounter {
        self.total_work
    }

    /// A shortest (s,t)-path realizing `query_dist`, extracted from the
    /// parent tree in time proportional to its length.
    pub fn query_path(&self, g: &WeightedGraph) -> Result<Vec<NodeId>, OracleError> {
        if !self.dist[self.target].is_finite() {
            return Err(OracleError::NoPath);
        }
        let mut path = vec![self.target];
        let mut cur = self.target;
        while cur != self.source {
            let eid = self.parent[cur].expect("finite distance implies a parent chain");
            cur = g.edge(eid).other(cur);
            path.push(cur);
        }
        path.reverse();
        Ok(path)
    }

    /// Applies the change to the graph and repairs the distance tree.
    /// On a range or unknown-edge error both graph and state are left
    /// untouched.
    pub fn on_weight_change(
        &mut self,
        g: &mut WeightedGraph,
        ch: &WeightChange,
    ) -> Result<(), GraphError> {
        let eid = g
            .edge_index(ch.u, ch.v)
            .ok_or(GraphError::UnknownEdge(ch.u, ch.v))?;
        let old_w = g.weight(eid);
        g.apply_change(ch)?;
        let new_w = old_w + ch.delta;

        self.last_work.reset();
        self.last_work.nodes += 2; // endpoint probes
        self.last_work.edges += 1; // the changed edge
        if new_w < old_w {
            self.repair_decrease(g, eid);
        } else if new_w > old_w {
            self.repair_increase(g, eid);
        }
        self.total_work.add(self.last_work);
        Ok(())
    }

    fn repair_decrease(&mut self, g: &WeightedGraph, eid: EdgeId) {
        let e = g.edge(eid);
        let mut heap: BinaryHeap<Reverse<(i64, NodeId)>> = BinaryHeap::new();
        {
            let mut seed = |from: NodeId, to: NodeId, state: &mut Vec<Dist>, parent: &mut Vec<Option<EdgeId>>| {
                if let Dist::Finite(d) = state[from] {
                    if Dist::Finite(d + e.w) < state[to] {
                        state[to] = Dist::Finite(d + e.w);
                        parent[to] = Some(eid);
                        heap.push(Reverse((d + e.w, to)));
                    }
                }
            };
            seed(e.u, e.v, &mut self.dist, &mut self.parent);
            if !g.directed() {
                seed(e.v, e.u, &mut self.dist, &mut self.parent);
            }
        }
        // Flood improvements; only nodes whose distance drops are touched.
        while let Some(Reverse((d, x))) = heap.pop() {
            if Dist::Finite(d) > self.dist[x] {
                continue;
            }
            self.last_work.nodes += 1;
            for &f in g.incident(x) {
                self.last_work.edges += 1;
                let fe = g.edge(f);
                if g.directed() && fe.u != x {
                    continue;
                }
                let y = fe.other(x);
                if Dist::Finite(d + fe.w) < self.dist[y] {
                    self.dist[y] = Dist::Finite(d + fe.w);
                    self.parent[y] = Some(f);
                    heap.push(Reverse((d + fe.w, y)));
                }
            }
        }
    }

    fn repair_increase(&mut self, g: &WeightedGraph, eid: EdgeId) {
        let e = g.edge(eid);
        // A non-tree edge can only make detours worse: nothing to do.
        let child = if self.parent[e.v] == Some(eid) {
            e.v
        } else if !g.directed() && self.parent[e.u] == Some(eid) {
            e.u
        } else {
            return;
        };

        // Cheap exit: another incoming edge may already give the same
        // distance. Equal candidates cannot come from the child's own
        // subtree (descendants sit strictly further from the source, as
        // weights are >= 1), so their distances are trustworthy.
        let old_child_dist = self.dist[child];
        let mut alt: Option<(Dist, EdgeId)> = None;
        for &f in g.incident(child) {
            if f == eid {
                continue;
            }
            self.last_work.nodes += 1;
            self.last_work.edges += 1;
            let fe = g.edge(f);
            if g.directed() && fe.v != child {
                continue;
            }
            let b = fe.other(child);
            let cand = self.dist[b].plus(fe.w);
            if alt.is_none_or(|(best, _)| cand < best) {
                alt = Some((cand, f));
            }
        }
        if let Some((cand, f)) = alt {
            if cand == old_child_dist {
                self.parent[child] = Some(f);
                return;
            }
        }

        // Collect the subtree hanging below the raised edge.
        let mut affected_list = vec![child];
        let mut affected = vec![false; g.node_count() + 1];
        affected[child] = true;
        let mut stack = vec![child];
        while let Some(x) = stack.pop() {
            self.last_work.nodes += 1;
            for &f in g.incident(x) {
                self.last_work.edges += 1;
                let y = g.edge(f).other(x);
                if !affected[y] && self.parent[y] == Some(f) {
                    affected[y] = true;
                    affected_list.push(y);
                    stack.push(y);
                }
            }
        }

        // Invalidate and re-settle from the frontier of intact nodes.
        for &a in &affected_list {
            self.dist[a] = Dist::Inf;
            self.parent[a] = None;
        }
        let mut heap: BinaryHeap<Reverse<(i64, NodeId, EdgeId)>> = BinaryHeap::new();
        for &a in &affected_list {
            for &f in g.incident(a) {
                self.last_work.edges += 1;
                let fe = g.edge(f);
                if g.directed() && fe.v != a {
                    continue;
                }
                let b = fe.other(a);
                if !affected[b] {
                    if let Dist::Finite(d) = self.dist[b] {
                        heap.push(Reverse((d + fe.w, a, f)));
                    }
                }
            }
        }
        while let Some(Reverse((d, a, f))) = heap.pop() {
            if self.dist[a] != Dist::Inf {
                continue;
            }
            self.dist[a] = Dist::Finite(d);
            self.parent[a] = Some(f);
            self.last_work.nodes += 1;
            for &f2 in g.incident(a) {
                self.last_work.edges += 1;
                let fe = g.edge(f2);
                if g.directed() && fe.u != a {
                    continue;
                }
                let y = fe.other(a);
                if affected[y] && self.dist[y] == Dist::Inf {
                    heap.push(Reverse((d + fe.w, y, f2)));
                }
            }
        }
    }

    /// Checks the tree invariants against the current graph: relaxed
    /// triangle inequality on every edge, parent consistency on every
    /// reached node, and distance zero at the source.
    pub fn check_invariants(&self, g: &WeightedGraph) -> Result<(), String> {
        if self.dist[self.source] != Dist::Finite(0) {
            return Err(format!("dist(source) = {}", self.dist[self.source]));
        }
        for (eid, e) in g.edges().iter().enumerate() {
            let check = |from: NodeId, to: NodeId| -> Result<(), String> {
                if self.dist[from].plus(e.w) < self.dist[to] {
                    return Err(format!(
                        "edge {eid} ({},{}) violates triangle inequality",
                        e.u, e.v
                    ));
                }
                Ok(())
            };
            check(e.u, e.v)?;
            if !g.directed() {
                check(e.v, e.u)?;
            }
        }
        for v in g.nodes() {
            if v == self.source || !self.dist[v].is_finite() {
                continue;
            }
            let eid = self.parent[v].ok_or(format!("node {v} reached without parent"))?;
            let e = g.edge(eid);
            let p = e.other(v);
            if g.directed() && e.v != v {
                return Err(format!("parent edge of {v} points the wrong way"));
            }
            if self.dist[p].plus(e.w) != self.dist[v] {
                return Err(format!("parent edge of {v} is not tight"));
            }
        }
        Ok(())
    }

    /// Distances snapshot (index 0 unused), for oracle comparisons.
    pub fn distances(&self) -> &[Dist] {
        &self.dist
    }
}
