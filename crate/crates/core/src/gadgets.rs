//! Instance families tying the dynamic structures to Boolean
//! vector-matrix-vector products, and the weight-shift transforms that
//! relate matching weight and semi-matching cost to plain matching
//! cardinality.
//!
//! The shortest-path gadget encodes a Boolean matrix M and round vectors
//! (u, v) as a full bipartite graph with weights in {1, 3}: entry bits map
//! to weight `3 - 2*bit`. The (s,t) distance is exactly 3 when
//! `u^T M v = 1` and at least 5 otherwise, so one distance query answers
//! one round, and switching rounds only touches the s- and t-star edges
//! with deltas of +-2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::format::ParseError;
use crate::graph::{GraphError, NodeId, WeightChange, WeightedGraph};
use crate::oracle::Dist;
use crate::sssp::SsspState;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GadgetError {
    #[error("matrix must be non-empty and square")]
    BadMatrix,
    #[error("vector length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
    #[error("subgraph edge ({0}, {1}) outside 1..={2}")]
    SubgraphEdgeOutOfRange(usize, usize, usize),
    #[error("duplicate subgraph edge ({0}, {1})")]
    DuplicateSubgraphEdge(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One online vector-matrix-vector instance: a fixed Boolean matrix and an
/// ordered list of (u, v) round vectors, processed strictly in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OuMvInstance {
    pub n: usize,
    pub matrix: Vec<Vec<bool>>,
    pub rounds: Vec<(Vec<bool>, Vec<bool>)>,
}

impl OuMvInstance {
    pub fn new(
        matrix: Vec<Vec<bool>>,
        rounds: Vec<(Vec<bool>, Vec<bool>)>,
    ) -> Result<Self, GadgetError> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|row| row.len() != n) {
            return Err(GadgetError::BadMatrix);
        }
        for (u, v) in &rounds {
            for vec in [u, v] {
                if vec.len() != n {
                    return Err(GadgetError::VectorLength {
                        expected: n,
                        got: vec.len(),
                    });
                }
            }
        }
        Ok(OuMvInstance { n, matrix, rounds })
    }

    /// Deterministic random instance; every bit is 1 with probability
    /// `density`.
    pub fn random(n: usize, rounds: usize, density: f64, seed: u64) -> Result<Self, GadgetError> {
        if n == 0 {
            return Err(GadgetError::BadMatrix);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bit = |rng: &mut ChaCha8Rng| rng.random::<f64>() < density;
        let matrix = (0..n)
            .map(|_| (0..n).map(|_| bit(&mut rng)).collect())
            .collect();
        let rounds = (0..rounds)
            .map(|_| {
                (
                    (0..n).map(|_| bit(&mut rng)).collect(),
                    (0..n).map(|_| bit(&mut rng)).collect(),
                )
            })
            .collect();
        OuMvInstance::new(matrix, rounds)
    }

    /// Direct evaluation of one round: true iff some (i, j) has
    /// `u[i] & M[i][j] & v[j]`.
    pub fn direct_round(&self, round: usize) -> bool {
        let (u, v) = &self.rounds[round];
        direct_product(&self.matrix, u, v)
    }

    pub fn direct_all(&self) -> Vec<bool> {
        (0..self.rounds.len()).map(|r| self.direct_round(r)).collect()
    }
}

/// `u^T M v` over the Boolean semiring.
pub fn direct_product(matrix: &[Vec<bool>], u: &[bool], v: &[bool]) -> bool {
    for (i, row) in matrix.iter().enumerate() {
        if !u[i] {
            continue;
        }
        for (j, &m) in row.iter().enumerate() {
            if m && v[j] {
                return true;
            }
        }
    }
    false
}

fn parse_bits(line_no: usize, line: &str, n: usize) -> Result<Vec<bool>, ParseError> {
    let bits: Vec<bool> = line
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(ParseError::Malformed {
                line: line_no,
                msg: format!("expected bit, found `{other}`"),
            }),
        })
        .collect::<Result<_, _>>()?;
    if bits.len() != n {
        return Err(ParseError::Malformed {
            line: line_no,
            msg: format!("expected {n} bits, found {}", bits.len()),
        });
    }
    Ok(bits)
}

/// Instance file: `omv <n> <rounds>` header, n matrix rows of n bits, then
/// per round a u line and a v line.
pub fn parse_oumv(text: &str) -> Result<OuMvInstance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(ParseError::Malformed {
        line: 1,
        msg: "missing header".into(),
    })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "omv" {
        return Err(ParseError::Malformed {
            line: hline,
            msg: "expected `omv <n> <rounds>`".into(),
        });
    }
    let n: usize = toks[1].parse().map_err(|_| ParseError::Malformed {
        line: hline,
        msg: format!("invalid dimension `{}`", toks[1]),
    })?;
    let round_count: usize = toks[2].parse().map_err(|_| ParseError::Malformed {
        line: hline,
        msg: format!("invalid round count `{}`", toks[2]),
    })?;
    let mut need = |what: &str| -> Result<(usize, &str), ParseError> {
        lines.next().ok_or(ParseError::Malformed {
            line: usize::MAX,
            msg: format!("unexpected end of file, wanted {what}"),
        })
    };
    let mut matrix = Vec::with_capacity(n);
    for _ in 0..n {
        let (lno, line) = need("a matrix row")?;
        matrix.push(parse_bits(lno, line, n)?);
    }
    let mut rounds = Vec::with_capacity(round_count);
    for _ in 0..round_count {
        let (lno_u, line_u) = need("a u vector")?;
        let u = parse_bits(lno_u, line_u, n)?;
        let (lno_v, line_v) = need("a v vector")?;
        let v = parse_bits(lno_v, line_v, n)?;
        rounds.push((u, v));
    }
    OuMvInstance::new(matrix, rounds).map_err(|e| ParseError::Malformed {
        line: hline,
        msg: e.to_string(),
    })
}

fn bits_line(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn serialize_oumv(inst: &OuMvInstance) -> String {
    let mut out = format!("omv {} {}\n", inst.n, inst.rounds.len());
    for row in &inst.matrix {
        out.push_str(&bits_line(row));
        out.push('\n');
    }
    for (u, v) in &inst.rounds {
        out.push_str(&bits_line(u));
        out.push('\n');
        out.push_str(&bits_line(v));
        out.push('\n');
    }
    out
}

fn bit_weight(bit: bool) -> i64 {
    if bit {
        1
    } else {
        3
    }
}

/// The shortest-path gadget: a full bipartite graph between sides A and B
/// of size n, with s attached to all of A and t to all of B. All weights
/// lie in {1, 3}; n^2 + 2n edges on 2n + 2 nodes.
#[derive(Debug, Clone)]
pub struct SpGadget {
    n: usize,
    graph: WeightedGraph,
    u: Vec<bool>,
    v: Vec<bool>,
}

impl SpGadget {
    /// Builds the gadget for matrix `m` with both round vectors all-zero.
    pub fn build(m: &[Vec<bool>]) -> Result<Self, GadgetError> {
        let n = m.len();
        if n == 0 || m.iter().any(|row| row.len() != n) {
            return Err(GadgetError::BadMatrix);
        }
        let mut edges = Vec::with_capacity(n * n + 2 * n);
        let (a, b): (Vec<NodeId>, Vec<NodeId>) =
            ((1..=n).collect(), (n + 1..=2 * n).collect());
        let s = 2 * n + 1;
        let t = 2 * n + 2;
        for i in 0..n {
            for j in 0..n {
                edges.push((a[i], b[j], bit_weight(m[i][j])));
            }
        }
        for i in 0..n {
            edges.push((s, a[i], 3));
        }
        for j in 0..n {
            edges.push((t, b[j], 3));
        }
        let graph = WeightedGraph::new(false, 2 * n + 2, 3, &edges)?;
        Ok(SpGadget {
            n,
            graph,
            u: vec![false; n],
            v: vec![false; n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn graph_mut(&mut self) -> &mut WeightedGraph {
        &mut self.graph
    }

    pub fn a_node(&self, i: usize) -> NodeId {
        i + 1
    }

    pub fn b_node(&self, j: usize) -> NodeId {
        self.n + 1 + j
    }

    pub fn source(&self) -> NodeId {
        2 * self.n + 1
    }

    pub fn target(&self) -> NodeId {
        2 * self.n + 2
    }

    /// Emits the weight changes that move the star edges from the current
    /// round vectors to `(u, v)`: at most 2n changes, every delta +-2,
    /// never touching an A x B edge. The internal vectors advance; the
    /// caller applies the changes (normally through a dynamic structure).
    pub fn set_round_vectors(
        &mut self,
        u: &[bool],
        v: &[bool],
    ) -> Result<Vec<WeightChange>, GadgetError> {
        for vec in [u, v] {
            if vec.len() != self.n {
                return Err(GadgetError::VectorLength {
                    expected: self.n,
                    got: vec.len(),
                });
            }
        }
        let mut changes = Vec::new();
        for i in 0..self.n {
            if u[i] != self.u[i] {
                let delta = bit_weight(u[i]) - bit_weight(self.u[i]);
                changes.push(WeightChange::new(self.source(), self.a_node(i), delta));
            }
        }
        for j in 0..self.n {
            if v[j] != self.v[j] {
                let delta = bit_weight(v[j]) - bit_weight(self.v[j]);
                changes.push(WeightChange::new(self.target(), self.b_node(j), delta));
            }
        }
        self.u = u.to_vec();
        self.v = v.to_vec();
        Ok(changes)
    }
}

/// Decision rule on a queried distance: the round product is 1 exactly
/// when the distance is strictly below 5.
pub fn sp_gadget_decision(distance: Dist) -> bool {
    match distance {
        Dist::Finite(d) => d < 5,
        Dist::Inf => false,
    }
}

/// Accounting for one reduction run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReductionStats {
    pub rounds: u64,
    pub total_changes: u64,
    pub max_changes_per_round: u64,
    pub max_abs_delta: i64,
    pub queries: u64,
}

/// Runs the whole reduction: builds the gadget at all-zero vectors,
/// initializes the dynamic shortest-path structure once, then per round
/// applies the star-edge changes through it and answers with a single
/// distance query.
pub fn solve_oumv_via_sssp(
    inst: &OuMvInstance,
) -> Result<(Vec<bool>, ReductionStats), GadgetError> {
    let mut gadget = SpGadget::build(&inst.matrix)?;
    let (s, t) = (gadget.source(), gadget.target());
    let mut sssp = SsspState::init(gadget.graph(), s, t)
        .expect("gadget nodes are in range");
    let mut stats = ReductionStats::default();
    let mut outputs = Vec::with_capacity(inst.rounds.len());
    for (u, v) in &inst.rounds {
        let changes = gadget.set_round_vectors(u, v)?;
        stats.rounds += 1;
        stats.max_changes_per_round = stats.max_changes_per_round.max(changes.len() as u64);
        for ch in &changes {
            stats.total_changes += 1;
            stats.max_abs_delta = stats.max_abs_delta.max(ch.delta.abs());
            sssp.on_weight_change(gadget.graph_mut(), ch)?;
        }
        stats.queries += 1;
        outputs.push(sp_gadget_decision(sssp.query_dist()));
    }
    Ok((outputs, stats))
}

fn checked_subgraph(
    n: usize,
    subgraph: &[(usize, usize)],
) -> Result<std::collections::HashSet<(usize, usize)>, GadgetError> {
    if n == 0 {
        return Err(GadgetError::BadMatrix);
    }
    let mut set = std::collections::HashSet::with_capacity(subgraph.len());
    for &(l, r) in subgraph {
        if l == 0 || l > n || r == 0 || r > n {
            return Err(GadgetError::SubgraphEdgeOutOfRange(l, r, n));
        }
        if !set.insert((l, r)) {
            return Err(GadgetError::DuplicateSubgraphEdge(l, r));
        }
    }
    Ok(set)
}

/// Full bipartite K_{N,N} with weight 2 on the subgraph edges and 1
/// elsewhere. Its maximum matching weight is N + MCM(subgraph): a maximum
/// matching of the subgraph doubles up, and the leftover nodes pair off at
/// weight 1.
pub fn matching_shift_transform(
    n: usize,
    subgraph: &[(usize, usize)],
) -> Result<WeightedGraph, GadgetError> {
    let set = checked_subgraph(n, subgraph)?;
    let mut edges = Vec::with_capacity(n * n);
    for l in 1..=n {
        for r in 1..=n {
            let w = if set.contains(&(l, r)) { 2 } else { 1 };
            edges.push((l, n + r, w));
        }
    }
    Ok(WeightedGraph::new_bipartite(n, n, 2, &edges)?)
}

/// Full bipartite K_{N,N} with weight 1 on the subgraph edges and 2
/// elsewhere. Its optimal semi-matching cost is 2N - MCM(subgraph): one
/// task per machine, as many weight-1 edges as the subgraph can match.
pub fn semimatching_shift_transform(
    n: usize,
    subgraph: &[(usize, usize)],
) -> Result<WeightedGraph, GadgetError> {
    let set = checked_subgraph(n, subgraph)?;
    let mut edges = Vec::with_capacity(n * n);
    for l in 1..=n {
        for r in 1..=n {
            let w = if set.contains(&(l, r)) { 1 } else { 2 };
            edges.push((l, n + r, w));
        }
    }
    Ok(WeightedGraph::new_bipartite(n, n, 2, &edges)?)
}

/// The subgraph as its own bipartite graph (unit weights), for feeding the
/// cardinality oracles.
pub fn subgraph_as_graph(
    n: usize,
    subgraph: &[(usize, usize)],
) -> Result<WeightedGraph, GadgetError> {
    checked_subgraph(n, subgraph)?;
    let edges: Vec<(usize, usize, i64)> =
        subgraph.iter().map(|&(l, r)| (l, n + r, 1)).collect();
    Ok(WeightedGraph::new_bipartite(n, n, 1, &edges)?)
}

/// Deterministic random bipartite subgraph on the K_{N,N} node set.
pub fn random_subgraph(n: usize, density: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for l in 1..=n {
        for r in 1..=n {
            if rng.random::<f64>() < density {
                edges.push((l, r));
            }
        }
    }
    edges
}
