//! Weighted graphs with fixed topology and mutable integer edge weights,
//! plus the bounded weight-change event model layered on top of them.
//!
//! Topology never changes: only weights move, each weight staying inside
//! `[1, W]`. Undirected edges are stored once with endpoints in canonical
//! `u < v` order; a directed graph may carry both `(u,v)` and `(v,u)`.

use std::collections::HashMap;

use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    EmptyGraph,
    #[error("weight bound must be >= 1, got {0}")]
    BadWeightBound(i64),
    #[error("node {0} out of range 1..={1}")]
    NodeOutOfRange(NodeId, usize),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}): weight {2} outside [1, {3}]")]
    WeightOutOfRange(NodeId, NodeId, i64, i64),
    #[error("no edge ({0}, {1})")]
    UnknownEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) does not cross the declared bipartition")]
    NonBipartiteEdge(NodeId, NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub w: i64,
}

impl Edge {
    /// The endpoint opposite to `x`. Panics if `x` is not an endpoint.
    pub fn other(&self, x: NodeId) -> NodeId {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }
}

/// A simple graph `G = (V, E, w)` with nodes `1..=n`, positive integer
/// weights bounded by `weight_bound`, and an incidence index per node.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    directed: bool,
    n: usize,
    weight_bound: i64,
    edges: Vec<Edge>,
    // Incidence lists: every edge id touching the node, regardless of
    // direction. Directed algorithms filter on `Edge::u`.
    adj: Vec<Vec<EdgeId>>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
    // When set, nodes 1..=left are the L side and left+1..=n the R side,
    // and every edge crosses the partition.
    left_size: Option<usize>,
}

impl WeightedGraph {
    pub fn new(
        directed: bool,
        n: usize,
        weight_bound: i64,
        edge_list: &[(NodeId, NodeId, i64)],
    ) -> Result<Self, GraphError> {
        Self::build(directed, n, weight_bound, edge_list, None)
    }

    /// Bipartite layout: L = `1..=left`, R = `left+1..=left+right`.
    pub fn new_bipartite(
        left: usize,
        right: usize,
        weight_bound: i64,
        edge_list: &[(NodeId, NodeId, i64)],
    ) -> Result<Self, GraphError> {
        Self::build(false, left + right, weight_bound, edge_list, Some(left))
    }

    fn build(
        directed: bool,
        n: usize,
        weight_bound: i64,
        edge_list: &[(NodeId, NodeId, i64)],
        left_size: Option<usize>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        if weight_bound < 1 {
            return Err(GraphError::BadWeightBound(weight_bound));
        }
        let mut g = WeightedGraph {
            directed,
            n,
            weight_bound,
            edges: Vec::with_capacity(edge_list.len()),
            adj: vec![Vec::new(); n + 1],
            index: HashMap::with_capacity(edge_list.len()),
            left_size,
        };
        for &(u, v, w) in edge_list {
            g.insert_edge(u, v, w)?;
        }
        Ok(g)
    }

    fn key(&self, u: NodeId, v: NodeId) -> (NodeId, NodeId) {
        if self.directed || u < v {
            (u, v)
        } else {
            (v, u)
        }
    }

    fn insert_edge(&mut self, u: NodeId, v: NodeId, w: i64) -> Result<(), GraphError> {
        if u == 0 || u > self.n {
            return Err(GraphError::NodeOutOfRange(u, self.n));
        }
        if v == 0 || v > self.n {
            return Err(GraphError::NodeOutOfRange(v, self.n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if w < 1 || w > self.weight_bound {
            return Err(GraphError::WeightOutOfRange(u, v, w, self.weight_bound));
        }
        if let Some(left) = self.left_size {
            let crosses = (u <= left) != (v <= left);
            if !crosses {
                return Err(GraphError::NonBipartiteEdge(u, v));
            }
        }
        let key = self.key(u, v);
        if self.index.contains_key(&key) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        let id = self.edges.len();
        let (cu, cv) = if self.directed { (u, v) } else { key };
        self.edges.push(Edge { u: cu, v: cv, w });
        self.index.insert(key, id);
        self.adj[u].push(id);
        self.adj[v].push(id);
        Ok(())
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight_bound(&self) -> i64 {
        self.weight_bound
    }

    /// Size of the declared L side, if this graph was built bipartite.
    pub fn left_size(&self) -> Option<usize> {
        self.left_size
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn weight(&self, id: EdgeId) -> i64 {
        self.edges[id].w
    }

    /// Edge ids incident to `x` (both orientations for directed graphs).
    pub fn incident(&self, x: NodeId) -> &[EdgeId] {
        &self.adj[x]
    }

    pub fn degree(&self, x: NodeId) -> usize {
        self.adj[x].len()
    }

    pub fn nodes(&self) -> std::ops::RangeInclusive<NodeId> {
        1..=self.n
    }

    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        if u == 0 || v == 0 || u > self.n || v > self.n {
            return None;
        }
        self.index.get(&self.key(u, v)).copied()
    }

    pub fn contains_node(&self, x: NodeId) -> bool {
        x >= 1 && x <= self.n
    }

    /// Applies a weight change atomically: on any error the graph is
    /// untouched. Returns the updated weight.
    pub fn apply_change(&mut self, ch: &WeightChange) -> Result<i64, GraphError> {
        let id = self
            .edge_index(ch.u, ch.v)
            .ok_or(GraphError::UnknownEdge(ch.u, ch.v))?;
        let new_w = self.edges[id].w + ch.delta;
        if new_w < 1 || new_w > self.weight_bound {
            return Err(GraphError::WeightOutOfRange(
                ch.u,
                ch.v,
                new_w,
                self.weight_bound,
            ));
        }
        self.edges[id].w = new_w;
        Ok(new_w)
    }

    /// Sum of all edge weights.
    pub fn total_weight(&self) -> i64 {
        self.edges.iter().map(|e| e.w).sum()
    }
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.directed == other.directed
            && self.n == other.n
            && self.weight_bound == other.weight_bound
            && self.left_size == other.left_size
            && self.edges == other.edges
    }
}

impl Eq for WeightedGraph {}

/// A single additive weight change on one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeightChange {
    pub u: NodeId,
    pub v: NodeId,
    pub delta: i64,
}

impl WeightChange {
    pub fn new(u: NodeId, v: NodeId, delta: i64) -> Self {
        WeightChange { u, v, delta }
    }

    pub fn inverse(&self) -> Self {
        WeightChange {
            u: self.u,
            v: self.v,
            delta: -self.delta,
        }
    }
}

/// Query kinds a trace can ask for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Dist,
    Flow,
    Mwm,
    Mst,
    Conn,
}

impl QueryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            QueryKind::Dist => "dist",
            QueryKind::Flow => "flow",
            QueryKind::Mwm => "mwm",
            QueryKind::Mst => "mst",
            QueryKind::Conn => "conn",
        }
    }

    pub fn parse(s: &str) -> Option<QueryKind> {
        match s {
            "dist" => Some(QueryKind::Dist),
            "flow" => Some(QueryKind::Flow),
            "mwm" => Some(QueryKind::Mwm),
            "mst" => Some(QueryKind::Mst),
            "conn" => Some(QueryKind::Conn),
            _ => None,
        }
    }
}

impl std::fmt::Display for QueryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Change(WeightChange),
    Query(QueryKind),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("event {index}: delta {delta} exceeds change bound {bound}")]
    BoundExceeded { index: usize, delta: i64, bound: i64 },
    #[error("event {index}: {source}")]
    Replay { index: usize, source: GraphError },
}

/// An ordered stream of weight changes and queries, replayed against a
/// fixed starting graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeTrace {
    /// Maximum |delta| a single event may carry; `None` means unbounded.
    pub change_bound: Option<i64>,
    pub events: Vec<TraceEvent>,
}

impl ChangeTrace {
    pub fn new(change_bound: Option<i64>, events: Vec<TraceEvent>) -> Self {
        ChangeTrace {
            change_bound,
            events,
        }
    }

    pub fn changes(&self) -> impl Iterator<Item = &WeightChange> {
        self.events.iter().filter_map(|e| match e {
            TraceEvent::Change(ch) => Some(ch),
            TraceEvent::Query(_) => None,
        })
    }

    /// Checks that every change respects the declared bound and that a
    /// replay from `g` keeps all weights inside `[1, W]`. Does not mutate
    /// `g`.
    pub fn validate(&self, g: &WeightedGraph) -> Result<(), TraceError> {
        let mut sim = g.clone();
        for (index, ev) in self.events.iter().enumerate() {
            let ch = match ev {
                TraceEvent::Change(ch) => ch,
                TraceEvent::Query(_) => continue,
            };
            if let Some(bound) = self.change_bound {
                if ch.delta.abs() > bound {
                    return Err(TraceError::BoundExceeded {
                        index,
                        delta: ch.delta,
                        bound,
                    });
                }
            }
            sim.apply_change(ch)
                .map_err(|source| TraceError::Replay { index, source })?;
        }
        Ok(())
    }
}
