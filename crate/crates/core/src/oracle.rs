//! From-scratch solvers: recomputation baselines for the benchmarks and
//! correctness oracles for every dynamic structure.
//!
//! All functions here are pure in their inputs. Ties in Dijkstra and
//! Kruskal are broken by smallest node id / smallest edge index so
//! witnesses are deterministic; optimum values are tie-free regardless.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::graph::{EdgeId, NodeId, WeightedGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("node {0} out of range 1..={1}")]
    NodeOutOfRange(NodeId, usize),
    #[error("source and target must differ")]
    SourceEqualsTarget,
    #[error("graph is not connected")]
    NotConnected,
    #[error("no (s,t)-path")]
    NoPath,
    #[error("instance too large for brute force: {0}")]
    SizeGuard(String),
    #[error("invalid argument: {0}")]
    BadArgument(String),
}

/// Distance value with an explicit infinity; arithmetic on it saturates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dist {
    Finite(i64),
    Inf,
}

impl Dist {
    pub fn plus(self, w: i64) -> Dist {
        match self {
            Dist::Finite(d) => Dist::Finite(d + w),
            Dist::Inf => Dist::Inf,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Dist::Finite(_))
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Dist::Finite(d) => Some(d),
            Dist::Inf => None,
        }
    }
}

impl std::fmt::Display for Dist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dist::Finite(d) => write!(f, "{d}"),
            Dist::Inf => write!(f, "inf"),
        }
    }
}

fn check_node(g: &WeightedGraph, x: NodeId) -> Result<(), OracleError> {
    if g.contains_node(x) {
        Ok(())
    } else {
        Err(OracleError::NodeOutOfRange(x, g.node_count()))
    }
}

/// Shortest-path tree from a single source.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    pub source: NodeId,
    pub dist: Vec<Dist>,
    pub parent: Vec<Option<EdgeId>>,
}

impl ShortestPathTree {
    pub fn dist_to(&self, v: NodeId) -> Dist {
        self.dist[v]
    }

    /// Path from the source to `v`, following parent edges.
    pub fn path_to(&self, g: &WeightedGraph, v: NodeId) -> Option<Vec<NodeId>> {
        if !self.dist[v].is_finite() {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(eid) = self.parent[cur] {
            cur = g.edge(eid).other(cur);
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

/// Runs Dijkstra from `s`. Weights are positive by construction, so the
/// settled order is monotone in distance.
pub fn dijkstra(g: &WeightedGraph, s: NodeId) -> Result<ShortestPathTree, OracleError> {
    check_node(g, s)?;
    let n = g.node_count();
    let mut dist = vec![Dist::Inf; n + 1];
    let mut parent: Vec<Option<EdgeId>> = vec![None; n + 1];
    let mut settled = vec![false; n + 1];
    let mut heap: BinaryHeap<Reverse<(i64, NodeId)>> = BinaryHeap::new();
    dist[s] = Dist::Finite(0);
    heap.push(Reverse((0, s)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if settled[x] {
            continue;
        }
        settled[x] = true;
        for &eid in g.incident(x) {
            let e = g.edge(eid);
            if g.directed() && e.u != x {
                continue;
            }
            let y = e.other(x);
            let cand = d + e.w;
            if Dist::Finite(cand) < dist[y] {
                dist[y] = Dist::Finite(cand);
                parent[y] = Some(eid);
                heap.push(Reverse((cand, y)));
            }
        }
    }
    Ok(ShortestPathTree {
        source: s,
        dist,
        parent,
    })
}

/// Exact shortest (s,t)-path weight; `Dist::Inf` if unreachable.
pub fn dijkstra_dist(g: &WeightedGraph, s: NodeId, t: NodeId) -> Result<Dist, OracleError> {
    check_node(g, t)?;
    Ok(dijkstra(g, s)?.dist_to(t))
}

/// Shortest path as a node sequence, with its weight.
pub fn dijkstra_path(
    g: &WeightedGraph,
    s: NodeId,
    t: NodeId,
) -> Result<Option<(i64, Vec<NodeId>)>, OracleError> {
    check_node(g, t)?;
    let tree = dijkstra(g, s)?;
    let d = match tree.dist_to(t) {
        Dist::Finite(d) => d,
        Dist::Inf => return Ok(None),
    };
    let mut path = vec![t];
    let mut cur = t;
    while cur != s {
        let eid = tree.parent[cur].expect("finite dist implies parent chain");
        cur = g.edge(eid).other(cur);
        path.push(cur);
    }
    path.reverse();
    Ok(Some((d, path)))
}

/// Evaluates a node sequence as a path: sum of hop weights, or an error if
/// some hop is not an edge (or goes against a directed edge).
pub fn path_weight(g: &WeightedGraph, path: &[NodeId]) -> Result<i64, OracleError> {
    if path.is_empty() {
        return Err(OracleError::BadArgument("empty path".into()));
    }
    let mut total = 0;
    for win in path.windows(2) {
        let (x, y) = (win[0], win[1]);
        let eid = g
            .edge_index(x, y)
            .ok_or(OracleError::BadArgument(format!("no edge ({x}, {y})")))?;
        if g.directed() && g.edge(eid).u != x {
            return Err(OracleError::BadArgument(format!(
                "edge ({x}, {y}) traversed against its direction"
            )));
        }
        total += g.weight(eid);
    }
    Ok(total)
}

/// Maximum (s,t)-flow with a per-edge witness. Flow on edge id `e` is
/// signed relative to the stored orientation: positive means `u -> v`.
#[derive(Debug, Clone)]
pub struct MaxFlow {
    pub value: i64,
    pub edge_flow: Vec<i64>,
}

struct DinicArc {
    to: NodeId,
    cap: i64,
}

struct Dinic {
    arcs: Vec<DinicArc>,
    head: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(g: &WeightedGraph) -> Self {
        let n = g.node_count();
        let mut arcs = Vec::with_capacity(2 * g.edge_count());
        let mut head = vec![Vec::new(); n + 1];
        for e in g.edges() {
            let back_cap = if g.directed() { 0 } else { e.w };
            head[e.u].push(arcs.len());
            arcs.push(DinicArc { to: e.v, cap: e.w });
            head[e.v].push(arcs.len());
            arcs.push(DinicArc { to: e.u, cap: back_cap });
        }
        Dinic {
            arcs,
            head,
            level: vec![-1; n + 1],
            iter: vec![0; n + 1],
        }
    }

    fn bfs(&mut self, s: NodeId, t: NodeId) -> bool {
        self.level.fill(-1);
        let mut queue = std::collections::VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &a in &self.head[x] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[x] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, x: NodeId, t: NodeId, limit: i64) -> i64 {
        if x == t {
            return limit;
        }
        while self.iter[x] < self.head[x].len() {
            let a = self.head[x][self.iter[x]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > 0 && self.level[x] < self.level[to] {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0 {
                    self.arcs[a].cap -= pushed;
                    self.arcs[a ^ 1].cap += pushed;
                    return pushed;
                }
            }
            self.iter[x] += 1;
        }
        0
    }

    fn run(&mut self, s: NodeId, t: NodeId) -> i64 {
        let mut value = 0;
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let pushed = self.dfs(s, t, i64::MAX / 2);
                if pushed == 0 {
                    break;
                }
                value += pushed;
            }
        }
        value
    }
}

/// Blocking-flow (Dinic) maximum flow, the from-scratch baseline.
pub fn static_maxflow(g: &WeightedGraph, s: NodeId, t: NodeId) -> Result<MaxFlow, OracleError> {
    check_node(g, s)?;
    check_node(g, t)?;
    if s == t {
        return Err(OracleError::SourceEqualsTarget);
    }
    let mut dinic = Dinic::new(g);
    let value = dinic.run(s, t);
    let edge_flow = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            if g.directed() {
                e.w - dinic.arcs[2 * i].cap
            } else {
                (dinic.arcs[2 * i + 1].cap - dinic.arcs[2 * i].cap) / 2
            }
        })
        .collect();
    Ok(MaxFlow { value, edge_flow })
}

/// Checks capacity and conservation for a signed per-edge flow; returns
/// the flow value (net outflow of `s`) on success.
pub fn flow_value_checked(
    g: &WeightedGraph,
    edge_flow: &[i64],
    s: NodeId,
    t: NodeId,
) -> Result<i64, OracleError> {
    if edge_flow.len() != g.edge_count() {
        return Err(OracleError::BadArgument("flow vector length mismatch".into()));
    }
    let n = g.node_count();
    let mut net_out = vec![0i64; n + 1];
    for (eid, e) in g.edges().iter().enumerate() {
        let f = edge_flow[eid];
        if g.directed() && f < 0 {
            return Err(OracleError::BadArgument(format!(
                "negative flow on directed edge {eid}"
            )));
        }
        if f.abs() > e.w {
            return Err(OracleError::BadArgument(format!(
                "flow {f} exceeds capacity {} on edge {eid}",
                e.w
            )));
        }
        net_out[e.u] += f;
        net_out[e.v] -= f;
    }
    for x in 1..=n {
        if x != s && x != t && net_out[x] != 0 {
            return Err(OracleError::BadArgument(format!(
                "conservation violated at node {x}"
            )));
        }
    }
    if net_out[s] != -net_out[t] {
        return Err(OracleError::BadArgument("source/target imbalance".into()));
    }
    Ok(net_out[s])
}

/// Minimum spanning tree by Kruskal with (weight, edge index) ordering.
#[derive(Debug, Clone)]
pub struct MstResult {
    pub weight: i64,
    pub edges: Vec<EdgeId>,
}

pub fn kruskal_mst(g: &WeightedGraph) -> Result<MstResult, OracleError> {
    let n = g.node_count();
    let mut order: Vec<EdgeId> = (0..g.edge_count()).collect();
    order.sort_by_key(|&id| (g.weight(id), id));
    let mut uf = UnionFind::new(n);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut weight = 0;
    for id in order {
        let e = g.edge(id);
        if uf.union(e.u, e.v) {
            edges.push(id);
            weight += e.w;
            if edges.len() == n - 1 {
                break;
            }
        }
    }
    if edges.len() != n - 1 {
        return Err(OracleError::NotConnected);
    }
    Ok(MstResult { weight, edges })
}

/// True iff the graph (edge direction ignored) has one component.
pub fn connectivity(g: &WeightedGraph) -> bool {
    let mut uf = UnionFind::new(g.node_count());
    for e in g.edges() {
        uf.union(e.u, e.v);
    }
    uf.components() == 1
}

/// Splits nodes into the two sides of a bipartition, or `None` if the
/// graph contains an odd cycle. Uses the declared split when present.
pub fn bipartition(g: &WeightedGraph) -> Option<(Vec<NodeId>, Vec<NodeId>)> {
    if let Some(l) = g.left_size() {
        return Some(((1..=l).collect(), (l + 1..=g.node_count()).collect()));
    }
    let n = g.node_count();
    let mut color = vec![-1i8; n + 1];
    for start in 1..=n {
        if color[start] >= 0 {
            continue;
        }
        color[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &eid in g.incident(x) {
                let y = g.edge(eid).other(x);
                if color[y] < 0 {
                    color[y] = 1 - color[x];
                    queue.push_back(y);
                } else if color[y] == color[x] {
                    return None;
                }
            }
        }
    }
    let left = (1..=n).filter(|&x| color[x] == 0).collect();
    let right = (1..=n).filter(|&x| color[x] == 1).collect();
    Some((left, right))
}

/// Union-find with union by size and path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    /// Nodes are `1..=n`; slot 0 is unused.
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..=n).collect(),
            size: vec![1; n + 1],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Returns true if the sets were merged (false if already joined).
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// A solver answer: the optimum value plus an optional certificate.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub value: i64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone)]
pub enum Witness {
    /// Node sequence; evaluates to its total hop weight.
    Path(Vec<NodeId>),
    /// Edge ids; evaluates to their weight sum.
    EdgeSet(Vec<EdgeId>),
    /// Per-edge signed flow; evaluates to the net outflow of `source`
    /// after capacity/conservation checks.
    Flow {
        edge_flow: Vec<i64>,
        source: NodeId,
        target: NodeId,
    },
}

/// Re-evaluates a witness under this module's own evaluators.
pub fn witness_value(g: &WeightedGraph, w: &Witness) -> Result<i64, OracleError> {
    match w {
        Witness::Path(nodes) => path_weight(g, nodes),
        Witness::EdgeSet(edges) => Ok(edges.iter().map(|&id| g.weight(id)).sum()),
        Witness::Flow {
            edge_flow,
            source,
            target,
        } => flow_value_checked(g, edge_flow, *source, *target),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;

    fn path123() -> WeightedGraph {
        WeightedGraph::new(false, 3, 10, &[(1, 2, 2), (2, 3, 3)]).unwrap()
    }

    #[test]
    fn dijkstra_on_a_path() {
        let g = path123();
        assert_eq!(dijkstra_dist(&g, 1, 3).unwrap(), Dist::Finite(5));
        assert_eq!(dijkstra_dist(&g, 1, 1).unwrap(), Dist::Finite(0));
        let (w, p) = dijkstra_path(&g, 1, 3).unwrap().unwrap();
        assert_eq!((w, p), (5, vec![1, 2, 3]));
    }

    #[test]
    fn dijkstra_unreachable_is_inf() {
        let g = WeightedGraph::new(false, 3, 10, &[(1, 2, 2)]).unwrap();
        assert_eq!(dijkstra_dist(&g, 1, 3).unwrap(), Dist::Inf);
        assert!(dijkstra_path(&g, 1, 3).unwrap().is_none());
    }

    #[test]
    fn dijkstra_respects_direction() {
        let g = WeightedGraph::new(true, 3, 10, &[(1, 2, 2), (3, 2, 3)]).unwrap();
        assert_eq!(dijkstra_dist(&g, 1, 3).unwrap(), Dist::Inf);
        assert_eq!(dijkstra_dist(&g, 3, 2).unwrap(), Dist::Finite(3));
    }

    #[test]
    fn node_range_checked() {
        let g = path123();
        assert_eq!(
            dijkstra_dist(&g, 0, 3),
            Err(OracleError::NodeOutOfRange(0, 3))
        );
        assert_eq!(
            dijkstra_dist(&g, 1, 9),
            Err(OracleError::NodeOutOfRange(9, 3))
        );
    }

    #[test]
    fn maxflow_single_edge() {
        let g = WeightedGraph::new(false, 2, 10, &[(1, 2, 4)]).unwrap();
        let mf = static_maxflow(&g, 1, 2).unwrap();
        assert_eq!(mf.value, 4);
        assert_eq!(flow_value_checked(&g, &mf.edge_flow, 1, 2).unwrap(), 4);
    }

    #[test]
    fn maxflow_disjoint_paths_sum_bottlenecks() {
        // s=1, t=4; paths via 2 (bottleneck 2) and via 3 (bottleneck 3).
        let g = WeightedGraph::new(
            false,
            4,
            10,
            &[(1, 2, 2), (2, 4, 9), (1, 3, 3), (3, 4, 3)],
        )
        .unwrap();
        assert_eq!(static_maxflow(&g, 1, 4).unwrap().value, 5);
    }

    #[test]
    fn maxflow_rejects_equal_endpoints() {
        let g = path123();
        assert_eq!(
            static_maxflow(&g, 2, 2).unwrap_err(),
            OracleError::SourceEqualsTarget
        );
    }

    #[test]
    fn maxflow_disconnected_is_zero() {
        let g = WeightedGraph::new(false, 3, 10, &[(1, 2, 2)]).unwrap();
        assert_eq!(static_maxflow(&g, 1, 3).unwrap().value, 0);
    }

    #[test]
    fn kruskal_triangle_drops_heaviest() {
        let g = WeightedGraph::new(false, 3, 10, &[(1, 2, 1), (2, 3, 2), (1, 3, 3)]).unwrap();
        let mst = kruskal_mst(&g).unwrap();
        assert_eq!(mst.weight, 3);
        assert_eq!(mst.edges.len(), 2);
    }

    #[test]
    fn kruskal_on_tree_returns_it() {
        let g = path123();
        let mst = kruskal_mst(&g).unwrap();
        assert_eq!(mst.weight, 5);
        assert_eq!(mst.edges, vec![0, 1]);
    }

    #[test]
    fn kruskal_disconnected_errors() {
        let g = WeightedGraph::new(false, 3, 10, &[(1, 2, 2)]).unwrap();
        assert_eq!(kruskal_mst(&g).unwrap_err(), OracleError::NotConnected);
    }

    #[test]
    fn kruskal_invariant_under_edge_order() {
        let a = WeightedGraph::new(false, 4, 9, &[(1, 2, 4), (2, 3, 1), (3, 4, 2), (1, 4, 3)])
            .unwrap();
        let b = WeightedGraph::new(false, 4, 9, &[(1, 4, 3), (3, 4, 2), (1, 2, 4), (2, 3, 1)])
            .unwrap();
        assert_eq!(kruskal_mst(&a).unwrap().weight, kruskal_mst(&b).unwrap().weight);
    }

    #[test]
    fn connectivity_basics() {
        assert!(connectivity(
            &WeightedGraph::new(false, 1, 5, &[]).unwrap()
        ));
        assert!(!connectivity(
            &WeightedGraph::new(false, 2, 5, &[]).unwrap()
        ));
        assert!(connectivity(&path123()));
    }

    #[test]
    fn bipartition_finds_sides() {
        let g = path123();
        let (l, r) = bipartition(&g).unwrap();
        assert_eq!(l, vec![1, 3]);
        assert_eq!(r, vec![2]);
        let odd = WeightedGraph::new(false, 3, 5, &[(1, 2, 1), (2, 3, 1), (1, 3, 1)]).unwrap();
        assert!(bipartition(&odd).is_none());
    }

    #[test]
    fn witnesses_reevaluate_to_values() {
        let g = path123();
        let (w, p) = dijkstra_path(&g, 1, 3).unwrap().unwrap();
        assert_eq!(witness_value(&g, &Witness::Path(p)).unwrap(), w);

        let mst = kruskal_mst(&g).unwrap();
        assert_eq!(
            witness_value(&g, &Witness::EdgeSet(mst.edges)).unwrap(),
            mst.weight
        );

        let flow_g =
            WeightedGraph::new(false, 4, 10, &[(1, 2, 2), (2, 4, 9), (1, 3, 3), (3, 4, 3)])
                .unwrap();
        let mf = static_maxflow(&flow_g, 1, 4).unwrap();
        let witness = Witness::Flow {
            edge_flow: mf.edge_flow.clone(),
            source: 1,
            target: 4,
        };
        assert_eq!(witness_value(&flow_g, &witness).unwrap(), mf.value);
    }
}
