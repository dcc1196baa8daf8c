//! Dynamic maximum-weight matching in bipartite graphs, plus b-matching
//! validity checking.
//!
//! The state keeps a primal-dual pair: node potentials `u` (left) and `v`
//! (right) that dominate every edge weight, are tight on matched edges,
//! stay nonnegative, and vanish on unmatched nodes. Those four conditions
//! certify optimality by weak duality, so the matching can be audited
//! without rerunning any solver.
//!
//! Internally the instance is padded to an N x N matrix (N = max side)
//! with zero entries for non-edges, so the maintained matching is perfect
//! on the padded square; pairs carried by zero entries are "unmatched" in
//! graph terms. A weight change touches one row: the repair unmatches that
//! row, row-reduces its potential, and runs one alternating-tree phase
//! with dual adjustments — one corrective search per unit of change.

use thiserror::Error;

use crate::graph::{EdgeId, GraphError, NodeId, WeightChange, WeightedGraph};
use crate::work::WorkCounter;

const NONE: usize = usize::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("node {0} appears twice in the bipartition")]
    DuplicateNode(NodeId),
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("edge ({0}, {1}) does not cross the bipartition")]
    NonBipartiteEdge(NodeId, NodeId),
    #[error("edge id {0} not in the graph")]
    UnknownEdgeId(EdgeId),
    #[error("negative capacity {1} for node {0}")]
    NegativeCapacity(NodeId, i64),
    #[error("capacity vector covers {0} nodes, graph has {1}")]
    CapacityLength(usize, usize),
}

/// Per-node capacity vector for b-matchings, indexed by node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BVector {
    caps: Vec<i64>,
}

impl BVector {
    /// `caps[v]` is the capacity of node `v`; slot 0 is ignored.
    pub fn new(caps: Vec<i64>) -> Result<Self, MatchingError> {
        for (v, &c) in caps.iter().enumerate().skip(1) {
            if c < 0 {
                return Err(MatchingError::NegativeCapacity(v, c));
            }
        }
        Ok(BVector { caps })
    }

    pub fn uniform(n: usize, b: i64) -> Result<Self, MatchingError> {
        if b < 0 {
            return Err(MatchingError::NegativeCapacity(0, b));
        }
        Ok(BVector {
            caps: vec![b; n + 1],
        })
    }

    pub fn cap(&self, v: NodeId) -> i64 {
        self.caps[v]
    }

    pub fn len(&self) -> usize {
        self.caps.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// True iff every node appears in at most `b_v` of the chosen edges. The
/// edge list is a multiset: repeated ids count repeatedly (directed graphs
/// may legitimately select both orientations).
pub fn is_valid_b_matching(
    g: &WeightedGraph,
    chosen: &[EdgeId],
    b: &BVector,
) -> Result<bool, MatchingError> {
    if b.len() != g.node_count() {
        return Err(MatchingError::CapacityLength(b.len(), g.node_count()));
    }
    let mut incidence = vec![0i64; g.node_count() + 1];
    for &eid in chosen {
        if eid >= g.edge_count() {
            return Err(MatchingError::UnknownEdgeId(eid));
        }
        let e = g.edge(eid);
        incidence[e.u] += 1;
        incidence[e.v] += 1;
    }
    Ok((1..=g.node_count()).all(|v| incidence[v] <= b.cap(v)))
}

#[derive(Debug, Clone)]
pub struct MatchingState {
    left: Vec<NodeId>,
    right: Vec<NodeId>,
    /// node id -> (is_left, side index)
    side_of: Vec<Option<(bool, usize)>>,
    size: usize,
    /// Padded weight matrix, zero on non-edges and padding.
    w: Vec<Vec<i64>>,
    /// Edge ids behind real entries.
    eid: Vec<Vec<Option<EdgeId>>>,
    u: Vec<i64>,
    v: Vec<i64>,
    match_row: Vec<usize>,
    match_col: Vec<usize>,
    weight: i64,
    total_work: WorkCounter,
    last_work: WorkCounter,
}

impl MatchingState {
    pub fn init(
        g: &WeightedGraph,
        left: &[NodeId],
        right: &[NodeId],
    ) -> Result<Self, MatchingError> {
        let n = g.node_count();
        let mut side_of: Vec<Option<(bool, usize)>> = vec![None; n + 1];
        for (idx, &x) in left.iter().enumerate() {
            if x == 0 || x > n {
                return Err(MatchingError::NodeOutOfRange(x));
            }
            if side_of[x].is_some() {
                return Err(MatchingError::DuplicateNode(x));
            }
            side_of[x] = Some((true, idx));
        }
        for (idx, &x) in right.iter().enumerate() {
            if x == 0 || x > n {
                return Err(MatchingError::NodeOutOfRange(x));
            }
            if side_of[x].is_some() {
                return Err(MatchingError::DuplicateNode(x));
            }
            side_of[x] = Some((false, idx));
        }
        let size = left.len().max(right.len());
        let mut w = vec![vec![0i64; size]; size];
        let mut eid = vec![vec![None; size]; size];
        for (id, e) in g.edges().iter().enumerate() {
            let (i, j) = match (side_of[e.u], side_of[e.v]) {
                (Some((true, i)), Some((false, j))) => (i, j),
                (Some((false, j)), Some((true, i))) => (i, j),
                _ => return Err(MatchingError::NonBipartiteEdge(e.u, e.v)),
            };
            w[i][j] = e.w;
            eid[i][j] = Some(id);
        }
        let mut state = MatchingState {
            left: left.to_vec(),
            right: right.to_vec(),
            side_of,
            size,
            w,
            eid,
            u: vec![0; size],
            v: vec![0; size],
            match_row: vec![NONE; size],
            match_col: vec![NONE; size],
            weight: 0,
            total_work: WorkCounter::default(),
            last_work: WorkCounter::default(),
        };
        for i in 0..size {
            state.u[i] = (0..size).map(|j| state.w[i][j]).max().unwrap_or(0);
        }
        for i in 0..size {
            state.phase(i);
        }
        state.normalize();
        state.weight = state.matched_weight();
        state.total_work = state.last_work;
        Ok(state)
    }

    pub fn query_weight(&self) -> i64 {
        self.weight
    }

    /// Matched real edges; extraction is proportional to the matching.
    pub fn query_matching(&self) -> Vec<EdgeId> {
        (0..self.size)
            .filter_map(|i| {
                let j = self.match_row[i];
                if j == NONE {
                    return None;
                }
                self.eid[i][j]
            })
            .collect()
    }

    pub fn last_work(&self) -> WorkCounter {
        self.last_work
    }

    pub fn total_work(&self) -> WorkCounter {
        self.total_work
    }

    fn matched_weight(&self) -> i64 {
        (0..self.size)
            .map(|i| {
                let j = self.match_row[i];
                if j == NONE {
                    0
                } else {
                    self.w[i][j]
                }
            })
            .sum()
    }

    /// One alternating-tree phase rooted at unmatched row `root`,
    /// adjusting duals until an augmenting path over tight edges exists.
    /// The padded matrix is complete, so the phase always succeeds.
    fn phase(&mut self, root: usize) {
        let n = self.size;
        let mut slack = vec![i64::MAX; n];
        let mut slack_row = vec![NONE; n];
        let mut committed_row = vec![false; n];
        let mut committed_col = vec![false; n];
        committed_row[root] = true;
        self.last_work.nodes += 1;
        for j in 0..n {
            slack[j] = self.u[root] + self.v[j] - self.w[root][j];
            slack_row[j] = root;
            self.last_work.edges += 1;
        }
        loop {
            let mut best = i64::MAX;
            let mut best_j = NONE;
            for j in 0..n {
                if !committed_col[j] && slack[j] < best {
                    best = slack[j];
                    best_j = j;
                }
                self.last_work.edges += 1;
            }
            let j_star = best_j;
            if best > 0 {
                for i in 0..n {
                    if committed_row[i] {
                        self.u[i] -= best;
                    }
                }
                for j in 0..n {
                    if committed_col[j] {
                        self.v[j] += best;
                    } else {
                        slack[j] -= best;
                    }
                }
            }
            committed_col[j_star] = true;
            self.last_work.nodes += 1;
            if self.match_col[j_star] == NONE {
                // Augment along the tree back to the root.
                let mut j = j_star;
                loop {
                    let i = slack_row[j];
                    let prev_j = self.match_row[i];
                    self.match_col[j] = i;
                    self.match_row[i] = j;
                    if i == root {
                        return;
                    }
                    j = prev_j;
                }
            }
            let i2 = self.match_col[j_star];
            committed_row[i2] = true;
            self.last_work.nodes += 1;
            for j in 0..n {
                if !committed_col[j] {
                    let cand = self.u[i2] + self.v[j] - self.w[i2][j];
                    if cand < slack[j] {
                        slack[j] = cand;
                        slack_row[j] = i2;
                    }
                }
                self.last_work.edges += 1;
            }
        }
    }

    /// Shift duals so the smallest column potential is zero. Sums are
    /// preserved, and afterwards both vectors are nonnegative and every
    /// zero-weight matched pair has both potentials zero.
    fn normalize(&mut self) {
        let delta = self.v.iter().copied().min().unwrap_or(0);
        if delta != 0 {
            for u in &mut self.u {
                *u += delta;
            }
            for v in &mut self.v {
                *v -= delta;
            }
        }
    }

    fn repair_row(&mut self, i: usize) {
        let j = self.match_row[i];
        if j != NONE {
            self.match_col[j] = NONE;
            self.match_row[i] = NONE;
        }
        self.u[i] = (0..self.size)
            .map(|j| self.w[i][j] - self.v[j])
            .max()
            .unwrap_or(0);
        self.last_work.edges += self.size as u64;
        self.phase(i);
        self.normalize();
    }

    /// Applies the change to the graph and restores the optimum, one unit
    /// at a time. On an error both graph and state are untouched.
    pub fn on_weight_change(
        &mut self,
        g: &mut WeightedGraph,
        ch: &WeightChange,
    ) -> Result<(), GraphError> {
        let edge_id = g
            .edge_index(ch.u, ch.v)
            .ok_or(GraphError::UnknownEdge(ch.u, ch.v))?;
        let target = g.weight(edge_id) + ch.delta;
        if target < 1 || target > g.weight_bound() {
            return Err(GraphError::WeightOutOfRange(
                ch.u,
                ch.v,
                target,
                g.weight_bound(),
            ));
        }
        let e = g.edge(edge_id);
        let (i, j) = match (self.side_of[e.u], self.side_of[e.v]) {
            (Some((true, i)), Some((false, j))) => (i, j),
            (Some((false, j)), Some((true, i))) => (i, j),
            _ => return Err(GraphError::UnknownEdge(ch.u, ch.v)),
        };
        self.last_work.reset();
        let step = if ch.delta >= 0 { 1 } else { -1 };
        for _ in 0..ch.delta.abs() {
            g.apply_change(&WeightChange::new(ch.u, ch.v, step))
                .expect("validated above");
            self.w[i][j] += step;
            self.last_work.edges += 1;
            let matched = self.match_row[i] == j;
            if step > 0 {
                if matched {
                    // The matched edge got heavier: the optimum shifts
                    // with it and raising u keeps the certificate tight.
                    self.u[i] += 1;
                } else if self.u[i] + self.v[j] < self.w[i][j] {
                    self.repair_row(i);
                }
            } else if matched {
                self.repair_row(i);
            }
            // Decrease on an unmatched edge only loosens its constraint.
        }
        self.weight = self.matched_weight();
        self.total_work.add(self.last_work);
        Ok(())
    }

    /// Validates the optimality certificate against the graph: dual
    /// feasibility on every edge, tightness on matched edges, nonnegative
    /// potentials, and zero potential on unmatched nodes.
    pub fn verify_certificate(&self, g: &WeightedGraph) -> Result<(), String> {
        let mut matched_node = vec![false; g.node_count() + 1];
        let mut seen_weight = 0;
        for eid in self.query_matching() {
            let e = g.edge(eid);
            if matched_node[e.u] || matched_node[e.v] {
                return Err(format!("node reused by matched edge {eid}"));
            }
            matched_node[e.u] = true;
            matched_node[e.v] = true;
            seen_weight += e.w;
        }
        if seen_weight != self.weight {
            return Err(format!(
                "stored weight {} but matched edges sum to {seen_weight}",
                self.weight
            ));
        }
        for (idx, e) in g.edges().iter().enumerate() {
            let (i, j) = match (self.side_of[e.u], self.side_of[e.v]) {
                (Some((true, i)), Some((false, j))) => (i, j),
                (Some((false, j)), Some((true, i))) => (i, j),
                _ => return Err(format!("edge {idx} outside the bipartition")),
            };
            if self.u[i] + self.v[j] < e.w {
                return Err(format!("dual infeasible on edge {idx}"));
            }
            if self.match_row[i] == j && self.u[i] + self.v[j] != e.w {
                return Err(format!("matched edge {idx} is not tight"));
            }
        }
        for (i, &x) in self.left.iter().enumerate() {
            if self.u[i] < 0 {
                return Err(format!("negative potential on left node {x}"));
            }
            if !matched_node[x] && self.u[i] != 0 {
                return Err(format!("unmatched left node {x} has potential {}", self.u[i]));
            }
        }
        for (j, &x) in self.right.iter().enumerate() {
            if self.v[j] < 0 {
                return Err(format!("negative potential on right node {x}"));
            }
            if !matched_node[x] && self.v[j] != 0 {
                return Err(format!("unmatched right node {x} has potential {}", self.v[j]));
            }
        }
        Ok(())
    }
}
