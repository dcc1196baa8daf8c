//! Dynamic maximum (s,t)-flow under capacity changes, for directed and
//! undirected graphs.
//!
//! A change of `|delta| = k` is processed as k unit steps. Per unit:
//!
//! * decrease on an unsaturated edge: nothing to do;
//! * decrease on a saturated edge carrying flow a -> b: walk one path
//!   s -> a and one path b -> t inside the flow-support graph (arcs
//!   carrying positive flow, oriented along it), drop one unit of flow on
//!   both paths and on the edge itself, then run a single residual search
//!   and re-augment by one unit if possible;
//! * increase: run a single residual search in the enlarged residual graph
//!   and augment by one unit if a path exists. One search suffices for
//!   both orientations of an undirected edge, and the flow grows by one
//!   exactly when an augmenting path exists, so separate per-endpoint
//!   searches are unnecessary.
//!
//! Flow cycles are cancelled eagerly after every augmentation, so the
//! support graph always decomposes into s -> t paths and the two support
//! walks of the decrease step are guaranteed to exist.

use crate::graph::{EdgeId, GraphError, NodeId, WeightChange, WeightedGraph};
use crate::oracle::{static_maxflow, OracleError};
use crate::work::WorkCounter;

use std::collections::VecDeque;

/// Direction of travel across a stored edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    Forward,  // u -> v as stored
    Backward, // v -> u
}

#[derive(Debug, Clone)]
pub struct FlowState {
    s: NodeId,
    t: NodeId,
    /// Signed flow per edge: positive means along the stored orientation.
    /// Directed edges never go negative.
    flow: Vec<i64>,
    value: i64,
    total_work: WorkCounter,
    last_work: WorkCounter,
    /// Edge inspections of the costliest unit step in the last change.
    last_unit_edges: u64,
}

impl FlowState {
    pub fn init(g: &WeightedGraph, s: NodeId, t: NodeId) -> Result<Self, OracleError> {
        let mf = static_maxflow(g, s, t)?;
        let mut state = FlowState {
            s,
            t,
            flow: mf.edge_flow,
            value: mf.value,
            total_work: WorkCounter::default(),
            last_work: WorkCounter::default(),
            last_unit_edges: 0,
        };
        state.cancel_cycles(g);
        state.total_work = state.last_work;
        Ok(state)
    }

    /// O(1) lookup of the maintained maximum flow value.
    pub fn query_value(&self) -> i64 {
        self.value
    }

    pub fn edge_flow(&self) -> &[i64] {
        &self.flow
    }

    pub fn last_work(&self) -> WorkCounter {
        self.last_work
    }

    pub fn total_work(&self) -> WorkCounter {
        self.total_work
    }

    /// Edge inspections of the costliest single unit step within the most
    /// recent weight change.
    pub fn last_unit_edges(&self) -> u64 {
        self.last_unit_edges
    }

    fn residual(&self, g: &WeightedGraph, eid: EdgeId, dir: Dir) -> i64 {
        let e = g.edge(eid);
        let f = self.flow[eid];
        match dir {
            Dir::Forward => e.w - f,
            Dir::Backward => {
                if g.directed() {
                    f
                } else {
                    e.w + f
                }
            }
        }
    }

    fn push_unit(&mut self, eid: EdgeId, dir: Dir) {
        match dir {
            Dir::Forward => self.flow[eid] += 1,
            Dir::Backward => self.flow[eid] -= 1,
        }
    }

    /// Support arc out of `x` along `eid`, if the edge carries flow away
    /// from `x`.
    fn support_dir_from(&self, g: &WeightedGraph, eid: EdgeId, x: NodeId) -> Option<Dir> {
        let e = g.edge(eid);
        let f = self.flow[eid];
        if e.u == x && f > 0 {
            Some(Dir::Forward)
        } else if e.v == x && f < 0 {
            Some(Dir::Backward)
        } else {
            None
        }
    }

    /// BFS from `from` to `to` over arcs carrying positive flow. Returns
    /// the path as (edge, direction) hops.
    fn support_path(
        &mut self,
        g: &WeightedGraph,
        from: NodeId,
        to: NodeId,
    ) -> Option<Vec<(EdgeId, Dir)>> {
        let n = g.node_count();
        let mut parent: Vec<Option<(EdgeId, Dir)>> = vec![None; n + 1];
        let mut seen = vec![false; n + 1];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        'bfs: while let Some(x) = queue.pop_front() {
            self.last_work.nodes += 1;
            for &eid in g.incident(x) {
                self.last_work.edges += 1;
                let Some(dir) = self.support_dir_from(g, eid, x) else {
                    continue;
                };
                let y = g.edge(eid).other(x);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((eid, dir));
                    if y == to {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        if from == to {
            return Some(Vec::new());
        }
        if !seen[to] {
            return None;
        }
        let mut hops = Vec::new();
        let mut cur = to;
        while cur != from {
            let (eid, dir) = parent[cur].unwrap();
            hops.push((eid, dir));
            cur = g.edge(eid).other(cur);
        }
        hops.reverse();
        Some(hops)
    }

    /// BFS over the residual graph; augments one unit when `t` is
    /// reachable. Returns whether it augmented.
    fn augment_one(&mut self, g: &WeightedGraph) -> bool {
        let n = g.node_count();
        let mut parent: Vec<Option<(EdgeId, Dir)>> = vec![None; n + 1];
        let mut seen = vec![false; n + 1];
        seen[self.s] = true;
        let mut queue = VecDeque::from([self.s]);
        'bfs: while let Some(x) = queue.pop_front() {
            self.last_work.nodes += 1;
            for &eid in g.incident(x) {
                self.last_work.edges += 1;
                let e = g.edge(eid);
                let dir = if e.u == x { Dir::Forward } else { Dir::Backward };
                if self.residual(g, eid, dir) < 1 {
                    continue;
                }
                let y = e.other(x);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((eid, dir));
                    if y == self.t {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        if !seen[self.t] {
            return false;
        }
        let mut cur = self.t;
        while cur != self.s {
            let (eid, dir) = parent[cur].unwrap();
            self.push_unit(eid, dir);
            self.last_work.edges += 1;
            cur = g.edge(eid).other(cur);
        }
        self.value += 1;
        self.cancel_cycles(g);
        true
    }

    /// Removes directed cycles from the flow support; the flow value is
    /// untouched. Restarts the scan after each cancellation because the
    /// colouring is stale once flow has been removed.
    fn cancel_cycles(&mut self, g: &WeightedGraph) {
        let n = g.node_count();
        'restart: loop {
            let mut color = vec![0u8; n + 1]; // 0 white, 1 on stack, 2 done
            for root in 1..=n {
                if color[root] != 0 {
                    continue;
                }
                // Iterative DFS over support arcs; path holds the arc used
                // to enter each stacked node.
                let mut stack: Vec<(NodeId, usize)> = vec![(root, 0)];
                let mut path: Vec<(NodeId, Option<(EdgeId, Dir)>)> = vec![(root, None)];
                color[root] = 1;
                while let Some(&mut (x, ref mut idx)) = stack.last_mut() {
                    if *idx == 0 {
                        self.last_work.nodes += 1;
                    }
                    let mut advanced = false;
                    while *idx < g.incident(x).len() {
                        let eid = g.incident(x)[*idx];
                        *idx += 1;
                        self.last_work.edges += 1;
                        let Some(dir) = self.support_dir_from(g, eid, x) else {
                            continue;
                        };
                        let y = g.edge(eid).other(x);
                        if color[y] == 1 {
                            // Cycle: close it from y back to x plus (eid, dir).
                            let start = path.iter().position(|&(node, _)| node == y).unwrap();
                            let mut arcs: Vec<(EdgeId, Dir)> = path[start + 1..]
                                .iter()
                                .map(|&(_, arc)| arc.unwrap())
                                .collect();
                            arcs.push((eid, dir));
                            let cut = arcs
                                .iter()
                                .map(|&(e2, _)| self.flow[e2].abs())
                                .min()
                                .unwrap();
                            for (e2, d2) in arcs {
                                match d2 {
                                    Dir::Forward => self.flow[e2] -= cut,
                                    Dir::Backward => self.flow[e2] += cut,
                                }
                            }
                            continue 'restart;
                        }
                        if color[y] == 0 {
                            color[y] = 1;
                            stack.push((y, 0));
                            path.push((y, Some((eid, dir))));
                            advanced = true;
                            break;
                        }
                    }
                    if !advanced {
                        color[x] = 2;
                        stack.pop();
                        path.pop();
                    }
                }
            }
            return;
        }
    }

    /// Applies the change to the graph and restores maximality, one unit
    /// at a time. On a range or unknown-edge error both graph and state
    /// are untouched.
    pub fn on_weight_change(
        &mut self,
        g: &mut WeightedGraph,
        ch: &WeightChange,
    ) -> Result<(), GraphError> {
        let eid = g
            .edge_index(ch.u, ch.v)
            .ok_or(GraphError::UnknownEdge(ch.u, ch.v))?;
        // Validate the whole delta up front so the change is atomic.
        let target = g.weight(eid) + ch.delta;
        if target < 1 || target > g.weight_bound() {
            return Err(GraphError::WeightOutOfRange(
                ch.u,
                ch.v,
                target,
                g.weight_bound(),
            ));
        }
        self.last_work.reset();
        self.last_unit_edges = 0;
        let step = if ch.delta >= 0 { 1 } else { -1 };
        for _ in 0..ch.delta.abs() {
            let before = self.last_work.edges;
            g.apply_change(&WeightChange::new(ch.u, ch.v, step))
                .expect("validated above");
            if step > 0 {
                self.unit_increase(g);
            } else {
                self.unit_decrease(g, eid);
            }
            self.last_unit_edges = self.last_unit_edges.max(self.last_work.edges - before);
        }
        self.total_work.add(self.last_work);
        Ok(())
    }

    fn unit_increase(&mut self, g: &WeightedGraph) {
        self.last_work.edges += 1; // saturation probe on the changed edge
        self.augment_one(g);
    }

    fn unit_decrease(&mut self, g: &WeightedGraph, eid: EdgeId) {
        self.last_work.edges += 1; // saturation probe
        let e = g.edge(eid);
        if self.flow[eid].abs() <= e.w {
            // Not saturated before the decrease: the flow is still
            // feasible, and it was maximum for larger capacities.
            return;
        }
        let (a, b, dir) = if self.flow[eid] > 0 {
            (e.u, e.v, Dir::Forward)
        } else {
            (e.v, e.u, Dir::Backward)
        };
        let to_a = self
            .support_path(g, self.s, a)
            .expect("flow support must reach a saturated edge from s");
        let from_b = self
            .support_path(g, b, self.t)
            .expect("flow support must reach t from a saturated edge");
        for (e2, d2) in to_a.iter().chain(from_b.iter()) {
            match d2 {
                Dir::Forward => self.flow[*e2] -= 1,
                Dir::Backward => self.flow[*e2] += 1,
            }
            self.last_work.edges += 1;
        }
        match dir {
            Dir::Forward => self.flow[eid] -= 1,
            Dir::Backward => self.flow[eid] += 1,
        }
        self.value -= 1;
        self.augment_one(g);
    }

    /// Checks capacity, conservation, the stored value, and maximality
    /// (no augmenting path left) against the current graph.
    pub fn check_invariants(&self, g: &WeightedGraph) -> Result<(), String> {
        let n = g.node_count();
        let mut net_out = vec![0i64; n + 1];
        for (eid, e) in g.edges().iter().enumerate() {
            let f = self.flow[eid];
            if g.directed() && f < 0 {
                return Err(format!("negative flow {f} on directed edge {eid}"));
            }
            if f.abs() > e.w {
                return Err(format!("edge {eid}: |{f}| exceeds capacity {}", e.w));
            }
            net_out[e.u] += f;
            net_out[e.v] -= f;
        }
        for x in 1..=n {
            if x != self.s && x != self.t && net_out[x] != 0 {
                return Err(format!("conservation violated at node {x}"));
            }
        }
        if net_out[self.s] != self.value {
            return Err(format!(
                "stored value {} but net outflow {}",
                self.value, net_out[self.s]
            ));
        }
        // Maximality: no residual (s,t)-path.
        let mut seen = vec![false; n + 1];
        seen[self.s] = true;
        let mut queue = VecDeque::from([self.s]);
        while let Some(x) = queue.pop_front() {
            for &eid in g.incident(x) {
                let e = g.edge(eid);
                let dir = if e.u == x { Dir::Forward } else { Dir::Backward };
                if self.residual(g, eid, dir) < 1 {
                    continue;
                }
                let y = e.other(x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        if seen[self.t] {
            return Err("augmenting path exists: flow is not maximum".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_directed_graph, random_graph, random_trace};
    use crate::graph::QueryKind;
    use crate::oracle::static_maxflow;

    #[test]
    fn init_single_edge() {
        let g = WeightedGraph::new(false, 2, 10, &[(1, 2, 4)]).unwrap();
        let st = FlowState::init(&g, 1, 2).unwrap();
        assert_eq!(st.query_value(), 4);
        st.check_invariants(&g).unwrap();
    }

    #[test]
    fn init_disconnected_is_zero() {
        let g = WeightedGraph::new(false, 3, 10, &[(1, 2, 4)]).unwrap();
        let st = FlowState::init(&g, 1, 3).unwrap();
        assert_eq!(st.query_value(), 0);
    }

    #[test]
    fn init_rejects_equal_endpoints() {
        let g = WeightedGraph::new(false, 2, 10, &[(1, 2, 4)]).unwrap();
        assert!(matches!(
            FlowState::init(&g, 1, 1),
            Err(OracleError::SourceEqualsTarget)
        ));
    }

    #[test]
    fn bottleneck_decrease_and_restore() {
        let mut g = WeightedGraph::new(false, 2, 10, &[(1, 2, 4)]).unwrap();
        let mut st = FlowState::init(&g, 1, 2).unwrap();
        st.on_weight_change(&mut g, &WeightChange::new(1, 2, -1)).unwrap();
        assert_eq!(st.query_value(), 3);
        st.check_invariants(&g).unwrap();
        st.on_weight_change(&mut g, &WeightChange::new(1, 2, 1)).unwrap();
        assert_eq!(st.query_value(), 4);
        st.check_invariants(&g).unwrap();
    }

    #[test]
    fn unsaturated_decrease_is_a_noop_probe() {
        // Flow must route through (1,2) of capacity 2; edge (2,3) has
        // slack 7, so shrinking it changes nothing.
        let mut g = WeightedGraph::new(false, 3, 10, &[(1, 2, 2), (2, 3, 9)]).unwrap();
        let mut st = FlowState::init(&g, 1, 3).unwrap();
        assert_eq!(st.query_value(), 2);
        st.on_weight_change(&mut g, &WeightChange::new(2, 3, -1)).unwrap();
        assert_eq!(st.query_value(), 2);
        assert_eq!(st.last_work().edges, 1, "only the saturation probe");
        st.check_invariants(&g).unwrap();
    }

    #[test]
    fn increase_off_any_st_path_changes_nothing() {
        // Edge (3,4) dangles off the s-t axis.
        let mut g =
            WeightedGraph::new(false, 4, 10, &[(1, 2, 3), (2, 3, 1), (3, 4, 2)]).unwrap();
        let mut st = FlowState::init(&g, 1, 2).unwrap();
        assert_eq!(st.query_value(), 3);
        st.on_weight_change(&mut g, &WeightChange::new(3, 4, 1)).unwrap();
        assert_eq!(st.query_value(), 3);
        st.check_invariants(&g).unwrap();
    }

    #[test]
    fn multi_unit_delta_decomposes() {
        let mut g = WeightedGraph::new(false, 2, 10, &[(1, 2, 5)]).unwrap();
        let mut st = FlowState::init(&g, 1, 2).unwrap();
        st.on_weight_change(&mut g, &WeightChange::new(1, 2, -4)).unwrap();
        assert_eq!(st.query_value(), 1);
        st.on_weight_change(&mut g, &WeightChange::new(1, 2, 3)).unwrap();
        assert_eq!(st.query_value(), 4);
        st.check_invariants(&g).unwrap();
    }

    fn exercise(mut g: WeightedGraph, s: NodeId, t: NodeId, events: usize, seed: u64) {
        let trace = random_trace(&g, events, 1, None, QueryKind::Flow, seed).unwrap();
        let mut st = FlowState::init(&g, s, t).unwrap();
        let m = g.edge_count() as u64;
        for (i, ch) in trace.changes().cloned().collect::<Vec<_>>().iter().enumerate() {
            let prev = st.query_value();
            st.on_weight_change(&mut g, ch).unwrap();
            let fresh = static_maxflow(&g, s, t).unwrap().value;
            assert_eq!(st.query_value(), fresh, "seed {seed} event {i}");
            assert!(
                (st.query_value() - prev).abs() <= ch.delta.abs(),
                "value moved more than |delta|"
            );
            assert!(
                st.last_unit_edges() <= 8 * m,
                "seed {seed} event {i}: unit work {} > 8m = {}",
                st.last_unit_edges(),
                8 * m
            );
            st.check_invariants(&g).unwrap();
        }
    }

    #[test]
    fn oracle_equality_undirected_random() {
        for seed in 0..4 {
            let g = random_graph(20, 0.25, 6, 500 + seed).unwrap();
            if g.edge_count() == 0 {
                continue;
            }
            exercise(g, 1, 20, 250, 600 + seed);
        }
    }

    #[test]
    fn oracle_equality_directed_random() {
        for seed in 0..4 {
            let g = random_directed_graph(15, 0.2, 6, 700 + seed).unwrap();
            if g.edge_count() == 0 {
                continue;
            }
            exercise(g, 1, 15, 250, 800 + seed);
        }
    }
}
