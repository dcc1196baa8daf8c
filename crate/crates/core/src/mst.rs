//! Dynamic minimum spanning tree under edge weight changes, and the
//! connectivity adapter built on top of it.
//!
//! Repair is by replacement-edge search with linear traversals. Four cases
//! restore optimality after a change on edge e:
//!
//! * tree edge, decrease: tree unchanged, weight drops;
//! * non-tree edge, increase: nothing changes;
//! * non-tree edge, decrease: swap with the heaviest edge on the tree
//!   cycle of e, if that edge is strictly heavier;
//! * tree edge, increase: swap with the lightest non-tree edge crossing
//!   the cut left by removing e, if strictly lighter.
//!
//! Strict comparisons keep the tree stable under ties, so a zero delta is
//! a no-op.
//!
//! The adapter simulates unweighted dynamic connectivity: it keeps the
//! complete graph with weights in {1, 2}, where weight 1 marks a present
//! edge. Each add/remove issues exactly one weight change, and the graph
//! is connected exactly when the MST weight is n-1.

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{EdgeId, GraphError, NodeId, WeightChange, WeightedGraph};
use crate::oracle::{kruskal_mst, OracleError};
use crate::work::WorkCounter;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MstError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge ({0}, {1}) already present")]
    EdgePresent(NodeId, NodeId),
    #[error("edge ({0}, {1}) not present")]
    EdgeAbsent(NodeId, NodeId),
    #[error("adapter size {0} exceeds the guard ({1}): the complete graph would be too large")]
    AdapterTooLarge(usize, usize),
}

#[derive(Debug, Clone)]
pub struct MstState {
    in_tree: Vec<bool>,
    tree_adj: Vec<Vec<EdgeId>>,
    weight: i64,
    total_work: WorkCounter,
    last_work: WorkCounter,
}

impl MstState {
    pub fn init(g: &WeightedGraph) -> Result<Self, MstError> {
        let mst = kruskal_mst(g)?;
        let mut in_tree = vec![false; g.edge_count()];
        let mut tree_adj = vec![Vec::new(); g.node_count() + 1];
        for &eid in &mst.edges {
            in_tree[eid] = true;
            let e = g.edge(eid);
            tree_adj[e.u].push(eid);
            tree_adj[e.v].push(eid);
        }
        Ok(MstState {
            in_tree,
            tree_adj,
            weight: mst.weight,
            total_work: WorkCounter::default(),
            last_work: WorkCounter::default(),
        })
    }

    /// O(1) lookup of the maintained MST weight.
    pub fn query_weight(&self) -> i64 {
        self.weight
    }

    pub fn tree_edges(&self) -> Vec<EdgeId> {
        (0..self.in_tree.len()).filter(|&e| self.in_tree[e]).collect()
    }

    pub fn last_work(&self) -> WorkCounter {
        self.last_work
    }

    pub fn total_work(&self) -> WorkCounter {
        self.total_work
    }

    fn swap(&mut self, g: &WeightedGraph, out: EdgeId, into: EdgeId) {
        self.in_tree[out] = false;
        self.in_tree[into] = true;
        let eo = g.edge(out);
        for x in [eo.u, eo.v] {
            self.tree_adj[x].retain(|&f| f != out);
        }
        let ei = g.edge(into);
        self.tree_adj[ei.u].push(into);
        self.tree_adj[ei.v].push(into);
    }

    /// Heaviest edge on the tree path between `from` and `to`.
    fn tree_path_max(&mut self, g: &WeightedGraph, from: NodeId, to: NodeId) -> (i64, EdgeId) {
        let n = g.node_count();
        let mut parent: Vec<Option<EdgeId>> = vec![None; n + 1];
        let mut seen = vec![false; n + 1];
        seen[from] = true;
        let mut queue = std::collections::VecDeque::from([from]);
        'bfs: while let Some(x) = queue.pop_front() {
            self.last_work.nodes += 1;
            for &eid in &self.tree_adj[x] {
                self.last_work.edges += 1;
                let y = g.edge(eid).other(x);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(eid);
                    if y == to {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut best: Option<(i64, EdgeId)> = None;
        let mut cur = to;
        while cur != from {
            let eid = parent[cur].expect("tree connects all nodes");
            let w = g.weight(eid);
            if best.is_none_or(|(bw, _)| w > bw) {
                best = Some((w, eid));
            }
            cur = g.edge(eid).other(cur);
        }
        best.expect("path has at least one edge")
    }

    /// Applies the change to the graph and restores tree optimality. On an
    /// error both graph and state are untouched.
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
        self.last_work.edges += 1;

        if self.in_tree[eid] {
            if ch.delta < 0 {
                self.weight += ch.delta;
            } else if ch.delta > 0 {
                // Cut repair: lightest non-tree edge reconnecting the two
                // components left by removing e.
                let e = g.edge(eid);
                let n = g.node_count();
                let mut side = vec![false; n + 1];
                side[e.u] = true;
                let mut stack = vec![e.u];
                while let Some(x) = stack.pop() {
                    self.last_work.nodes += 1;
                    for &f in &self.tree_adj[x] {
                        self.last_work.edges += 1;
                        if f == eid {
                            continue;
                        }
                        let y = g.edge(f).other(x);
                        if !side[y] {
                            side[y] = true;
                            stack.push(y);
                        }
                    }
                }
                let mut best: Option<(i64, EdgeId)> = None;
                for (f, fe) in g.edges().iter().enumerate() {
                    self.last_work.edges += 1;
                    if f == eid || self.in_tree[f] || side[fe.u] == side[fe.v] {
                        continue;
                    }
                    if best.is_none_or(|(bw, _)| fe.w < bw) {
                        best = Some((fe.w, f));
                    }
                }
                match best {
                    Some((bw, f)) if bw < new_w => {
                        self.swap(g, eid, f);
                        self.weight += bw - old_w;
                    }
                    _ => self.weight += ch.delta,
                }
            }
        } else if ch.delta < 0 {
            // Cycle repair: e may undercut the heaviest edge on its cycle.
            let e = g.edge(eid);
            let (max_w, max_e) = self.tree_path_max(g, e.u, e.v);
            if max_w > new_w {
                self.swap(g, max_e, eid);
                self.weight += new_w - max_w;
            }
        }
        self.total_work.add(self.last_work);
        Ok(())
    }

    /// Checks that the tree spans, is acyclic, matches the stored weight,
    /// and satisfies cycle optimality (every non-tree edge is at least as
    /// heavy as everything on its tree cycle).
    pub fn check_invariants(&mut self, g: &WeightedGraph) -> Result<(), String> {
        let n = g.node_count();
        let mut uf = crate::oracle::UnionFind::new(n);
        let mut count = 0;
        let mut weight = 0;
        for eid in 0..g.edge_count() {
            if !self.in_tree[eid] {
                continue;
            }
            let e = g.edge(eid);
            if !uf.union(e.u, e.v) {
                return Err(format!("tree edge {eid} closes a cycle"));
            }
            count += 1;
            weight += e.w;
        }
        if count != n - 1 || uf.components() != 1 {
            return Err("tree does not span".into());
        }
        if weight != self.weight {
            return Err(format!("stored weight {} vs actual {weight}", self.weight));
        }
        let work_before = self.last_work;
        for eid in 0..g.edge_count() {
            if self.in_tree[eid] {
                continue;
            }
            let e = g.edge(eid);
            let (max_w, _) = self.tree_path_max(g, e.u, e.v);
            if max_w > e.w {
                return Err(format!(
                    "non-tree edge {eid} (w={}) undercuts its cycle max {max_w}",
                    e.w
                ));
            }
        }
        self.last_work = work_before;
        Ok(())
    }
}

/// Default guard on the adapter's complete graph.
pub const ADAPTER_MAX_NODES: usize = 2000;

/// Dynamic connectivity for an unweighted graph, driven entirely through
/// weight changes on a complete graph: present edges weigh 1, absent
/// edges 2, and connectivity holds exactly when the MST weighs n-1.
#[derive(Debug, Clone)]
pub struct ConnectivityAdapter {
    n: usize,
    graph: WeightedGraph,
    mst: MstState,
    shadow: HashSet<(NodeId, NodeId)>,
    changes_issued: u64,
}

impl ConnectivityAdapter {
    /// Starts with the empty simulated graph (every weight 2).
    pub fn new(n: usize) -> Result<Self, MstError> {
        if n > ADAPTER_MAX_NODES {
            return Err(MstError::AdapterTooLarge(n, ADAPTER_MAX_NODES));
        }
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for u in 1..=n {
            for v in (u + 1)..=n {
                edges.push((u, v, 2));
            }
        }
        let graph = WeightedGraph::new(false, n, 2, &edges)?;
        let mst = MstState::init(&graph)?;
        Ok(ConnectivityAdapter {
            n,
            graph,
            mst,
            shadow: HashSet::new(),
            changes_issued: 0,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Weight changes issued to the MST structure so far.
    pub fn changes_issued(&self) -> u64 {
        self.changes_issued
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.shadow.contains(&Self::key(u, v))
    }

    fn key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
        (u.min(v), u.max(v))
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), MstError> {
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        let key = Self::key(u, v);
        if self.shadow.contains(&key) {
            return Err(MstError::EdgePresent(u, v));
        }
        self.mst
            .on_weight_change(&mut self.graph, &WeightChange::new(u, v, -1))?;
        self.changes_issued += 1;
        self.shadow.insert(key);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), MstError> {
        if u == v {
            return Err(GraphError::SelfLoop(u).into());
        }
        let key = Self::key(u, v);
        if !self.shadow.contains(&key) {
            return Err(MstError::EdgeAbsent(u, v));
        }
        self.mst
            .on_weight_change(&mut self.graph, &WeightChange::new(u, v, 1))?;
        self.changes_issued += 1;
        self.shadow.remove(&key);
        Ok(())
    }

    /// True iff the simulated graph is connected.
    pub fn is_connected(&self) -> bool {
        self.mst.query_weight() == self.n as i64 - 1
    }

    pub fn mst_weight(&self) -> i64 {
        self.mst.query_weight()
    }

    /// The weight-coding invariant: present edges weigh 1, absent ones 2.
    pub fn check_invariants(&mut self) -> Result<(), String> {
        for e in self.graph.edges() {
            let present = self.shadow.contains(&Self::key(e.u, e.v));
            let expect = if present { 1 } else { 2 };
            if e.w != expect {
                return Err(format!(
                    "edge ({}, {}) has weight {}, expected {expect}",
                    e.u, e.v, e.w
                ));
            }
        }
        let graph = self.graph.clone();
        self.mst.check_invariants(&graph)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bruteforce::bruteforce_mst;
    use crate::gen::{random_connected_graph, random_trace};
    use crate::graph::QueryKind;
    use crate::oracle::UnionFind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> WeightedGraph {
        WeightedGraph::new(false, 3, 10, &[(1, 2, 1), (2, 3, 2), (1, 3, 3)]).unwrap()
    }

    #[test]
    fn init_triangle() {
        let g = triangle();
        let st = MstState::init(&g).unwrap();
        assert_eq!(st.query_weight(), 3);
    }

    #[test]
    fn init_tree_is_total_weight() {
        let g = WeightedGraph::new(false, 4, 9, &[(1, 2, 3), (2, 3, 4), (2, 4, 5)]).unwrap();
        let st = MstState::init(&g).unwrap();
        assert_eq!(st.query_weight(), g.total_weight());
    }

    #[test]
    fn init_disconnected_errors() {
        let g = WeightedGraph::new(false, 3, 9, &[(1, 2, 3)]).unwrap();
        assert!(matches!(
            MstState::init(&g),
            Err(MstError::Oracle(OracleError::NotConnected))
        ));
    }

    #[test]
    fn tree_edge_decrease_keeps_tree() {
        let mut g = triangle();
        let mut st = MstState::init(&g).unwrap();
        let before = st.tree_edges();
        st.on_weight_change(&mut g, &WeightChange::new(2, 3, -1)).unwrap();
        assert_eq!(st.tree_edges(), before);
        assert_eq!(st.query_weight(), 2);
        st.check_invariants(&g).unwrap();
    }

    #[test]
    fn non_tree_decrease_triggers_swap() {
        // Triangle 1,2,3: the weight-3 edge (1,3) is outside the MST.
        // Dropping it to 1 swaps out the weight-2 edge; new MST weight 2.
        let mut g = triangle();
        let mut st = MstState::init(&g).unwrap();
        st.on_weight_change(&mut g, &WeightChange::new(1, 3, -2)).unwrap();
        assert_eq!(st.query_weight(), 2);
        assert_eq!(st.query_weight(), bruteforce_mst(&g).unwrap());
        st.check_invariants(&g).unwrap();
    }

    #[test]
    fn inverse_pair_restores_weight() {
        let mut g = triangle();
        let mut st = MstState::init(&g).unwrap();
        st.on_weight_change(&mut g, &WeightChange::new(2, 3, 3)).unwrap();
        st.on_weight_change(&mut g, &WeightChange::new(2, 3, -3)).unwrap();
        assert_eq!(st.query_weight(), 3);
        st.check_invariants(&g).unwrap();
    }

    #[test]
    fn matches_bruteforce_on_small_graphs() {
        for seed in 0..25 {
            let g = random_connected_graph(6, 0.5, 9, 7000 + seed).unwrap();
            let st = MstState::init(&g).unwrap();
            assert_eq!(st.query_weight(), bruteforce_mst(&g).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn oracle_equality_under_random_changes() {
        for seed in 0..5 {
            let mut g = random_connected_graph(22, 0.2, 8, 8000 + seed).unwrap();
            let trace = random_trace(&g, 400, 1, None, QueryKind::Mst, 8100 + seed).unwrap();
            let mut st = MstState::init(&g).unwrap();
            for (i, ch) in trace.changes().cloned().collect::<Vec<_>>().iter().enumerate() {
                st.on_weight_change(&mut g, ch).unwrap();
                let fresh = kruskal_mst(&g).unwrap().weight;
                assert_eq!(st.query_weight(), fresh, "seed {seed} event {i}");
            }
            st.check_invariants(&g).unwrap();
        }
    }

    #[test]
    fn multi_unit_deltas_repair_in_one_pass() {
        for seed in 0..3 {
            let mut g = random_connected_graph(15, 0.3, 9, 8500 + seed).unwrap();
            let trace = random_trace(&g, 200, 4, None, QueryKind::Mst, 8600 + seed).unwrap();
            let mut st = MstState::init(&g).unwrap();
            for (i, ch) in trace.changes().cloned().collect::<Vec<_>>().iter().enumerate() {
                st.on_weight_change(&mut g, ch).unwrap();
                assert_eq!(
                    st.query_weight(),
                    kruskal_mst(&g).unwrap().weight,
                    "seed {seed} event {i}"
                );
            }
        }
    }

    #[test]
    fn adapter_path_and_bridge() {
        let mut a = ConnectivityAdapter::new(4).unwrap();
        assert!(!a.is_connected());
        a.add_edge(1, 2).unwrap();
        a.add_edge(2, 3).unwrap();
        a.add_edge(3, 4).unwrap();
        assert!(a.is_connected());
        a.remove_edge(2, 3).unwrap();
        assert!(!a.is_connected());
        assert_eq!(a.changes_issued(), 4);
        a.check_invariants().unwrap();
    }

    #[test]
    fn adapter_empty_graph_weight() {
        let a = ConnectivityAdapter::new(3).unwrap();
        // All-weight-2 complete graph: any spanning tree weighs 4 != 2.
        assert_eq!(a.mst_weight(), 4);
        assert!(!a.is_connected());
    }

    #[test]
    fn adapter_complete_graph_connected() {
        let mut a = ConnectivityAdapter::new(5).unwrap();
        for u in 1..=5 {
            for v in (u + 1)..=5 {
                a.add_edge(u, v).unwrap();
            }
        }
        assert!(a.is_connected());
        a.check_invariants().unwrap();
    }

    #[test]
    fn adapter_single_node_is_connected() {
        let a = ConnectivityAdapter::new(1).unwrap();
        assert!(a.is_connected());
    }

    #[test]
    fn adapter_rejects_double_add_and_missing_remove() {
        let mut a = ConnectivityAdapter::new(3).unwrap();
        a.add_edge(1, 2).unwrap();
        assert_eq!(a.add_edge(2, 1).unwrap_err(), MstError::EdgePresent(2, 1));
        assert_eq!(a.remove_edge(1, 3).unwrap_err(), MstError::EdgeAbsent(1, 3));
    }

    #[test]
    fn adapter_matches_union_find_stream() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 8;
        let mut a = ConnectivityAdapter::new(n).unwrap();
        let mut present: Vec<(usize, usize)> = Vec::new();
        for step in 0..400 {
            let u = rng.random_range(1..=n);
            let v = rng.random_range(1..=n);
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            let issued_before = a.changes_issued();
            if let Some(pos) = present.iter().position(|&k| k == key) {
                a.remove_edge(u, v).unwrap();
                present.swap_remove(pos);
            } else {
                a.add_edge(u, v).unwrap();
                present.push(key);
            }
            assert_eq!(a.changes_issued(), issued_before + 1, "one change per op");
            let mut uf = UnionFind::new(n);
            for &(x, y) in &present {
                uf.union(x, y);
            }
            assert_eq!(a.is_connected(), uf.components() == 1, "step {step}");
        }
        a.check_invariants().unwrap();
    }

    #[test]
    fn adapter_size_guard() {
        assert!(matches!(
            ConnectivityAdapter::new(ADAPTER_MAX_NODES + 1),
            Err(MstError::AdapterTooLarge(..))
        ));
    }
}
