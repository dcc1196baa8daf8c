//! Exhaustive solvers for small instances.
//!
//! These are deliberately naive enumerations, independent of the
//! polynomial solvers and of the dynamic structures, and every one of them
//! fails loudly via a size guard instead of silently truncating.

use std::collections::HashMap;

use crate::graph::{EdgeId, NodeId, WeightedGraph};
use crate::oracle::{bipartition, Dist, OracleError, UnionFind};

fn guard(cond: bool, what: &str) -> Result<(), OracleError> {
    if cond {
        Ok(())
    } else {
        Err(OracleError::SizeGuard(what.to_string()))
    }
}

/// Shortest (s,t)-path weight by enumerating every simple path. n <= 8.
pub fn bruteforce_dist(g: &WeightedGraph, s: NodeId, t: NodeId) -> Result<Dist, OracleError> {
    guard(g.node_count() <= 8, "path enumeration needs n <= 8")?;
    if !g.contains_node(s) || !g.contains_node(t) {
        return Err(OracleError::NodeOutOfRange(s.max(t), g.node_count()));
    }
    let mut best = Dist::Inf;
    let mut on_path = vec![false; g.node_count() + 1];
    fn dfs(
        g: &WeightedGraph,
        x: NodeId,
        t: NodeId,
        acc: i64,
        on_path: &mut Vec<bool>,
        best: &mut Dist,
    ) {
        if x == t {
            if Dist::Finite(acc) < *best {
                *best = Dist::Finite(acc);
            }
            return;
        }
        on_path[x] = true;
        for &eid in g.incident(x) {
            let e = g.edge(eid);
            if g.directed() && e.u != x {
                continue;
            }
            let y = e.other(x);
            if !on_path[y] {
                dfs(g, y, t, acc + e.w, on_path, best);
            }
        }
        on_path[x] = false;
    }
    dfs(g, s, t, 0, &mut on_path, &mut best);
    Ok(best)
}

/// Maximum (s,t)-flow by enumerating unit-path decompositions over the
/// remaining arc capacities, memoized on the capacity vector. Any integral
/// flow decomposes into unit (s,t)-paths plus value-neutral cycles, so the
/// maximum number of packable unit paths equals the maximum flow value.
pub fn bruteforce_maxflow(
    g: &WeightedGraph,
    s: NodeId,
    t: NodeId,
) -> Result<i64, OracleError> {
    guard(
        g.node_count() <= 8 && g.edge_count() <= 12 && g.weight_bound() <= 4,
        "flow enumeration needs n <= 8, m <= 12, W <= 4",
    )?;
    if s == t {
        return Err(OracleError::SourceEqualsTarget);
    }
    // Arc 2e is u->v, arc 2e+1 is v->u (capacity 0 when directed).
    let mut caps: Vec<i64> = Vec::with_capacity(2 * g.edge_count());
    for e in g.edges() {
        caps.push(e.w);
        caps.push(if g.directed() { 0 } else { e.w });
    }
    let mut memo: HashMap<Vec<i64>, i64> = HashMap::new();
    fn unit_paths(
        g: &WeightedGraph,
        caps: &Vec<i64>,
        x: NodeId,
        t: NodeId,
        on_path: &mut Vec<bool>,
        arcs: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if x == t {
            out.push(arcs.clone());
            return;
        }
        on_path[x] = true;
        for &eid in g.incident(x) {
            let e = g.edge(eid);
            let arc = if e.u == x { 2 * eid } else { 2 * eid + 1 };
            let y = e.other(x);
            if caps[arc] > 0 && !on_path[y] {
                arcs.push(arc);
                unit_paths(g, caps, y, t, on_path, arcs, out);
                arcs.pop();
            }
        }
        on_path[x] = false;
    }
    fn best(
        g: &WeightedGraph,
        caps: &mut Vec<i64>,
        s: NodeId,
        t: NodeId,
        memo: &mut HashMap<Vec<i64>, i64>,
    ) -> i64 {
        if let Some(&v) = memo.get(caps) {
            return v;
        }
        let mut paths = Vec::new();
        let mut on_path = vec![false; g.node_count() + 1];
        unit_paths(g, caps, s, t, &mut on_path, &mut Vec::new(), &mut paths);
        let mut best_val = 0;
        for path in paths {
            for &a in &path {
                caps[a] -= 1;
            }
            best_val = best_val.max(1 + best(g, caps, s, t, memo));
            for &a in &path {
                caps[a] += 1;
            }
        }
        memo.insert(caps.clone(), best_val);
        best_val
    }
    Ok(best(g, &mut caps, s, t, &mut memo))
}

/// Minimum (s,t)-cut value by enumerating all node subsets containing `s`
/// and excluding `t`. n <= 12.
pub fn bruteforce_mincut(g: &WeightedGraph, s: NodeId, t: NodeId) -> Result<i64, OracleError> {
    guard(g.node_count() <= 12, "cut enumeration needs n <= 12")?;
    if s == t {
        return Err(OracleError::SourceEqualsTarget);
    }
    let n = g.node_count();
    let others: Vec<NodeId> = (1..=n).filter(|&x| x != s && x != t).collect();
    let mut best = i64::MAX;
    for mask in 0..(1u64 << others.len()) {
        let mut in_s = vec![false; n + 1];
        in_s[s] = true;
        for (i, &x) in others.iter().enumerate() {
            in_s[x] = mask >> i & 1 == 1;
        }
        let mut cut = 0;
        for e in g.edges() {
            let crosses = if g.directed() {
                in_s[e.u] && !in_s[e.v]
            } else {
                in_s[e.u] != in_s[e.v]
            };
            if crosses {
                cut += e.w;
            }
        }
        best = best.min(cut);
    }
    Ok(best)
}

/// Minimum spanning tree weight by enumerating all (n-1)-edge subsets.
pub fn bruteforce_mst(g: &WeightedGraph) -> Result<i64, OracleError> {
    let n = g.node_count();
    let m = g.edge_count();
    guard(n <= 8 && m <= 24, "spanning tree enumeration needs n <= 8, m <= 24")?;
    if n == 1 {
        return Ok(0);
    }
    let k = n - 1;
    if m < k {
        return Err(OracleError::NotConnected);
    }
    let mut chosen: Vec<EdgeId> = (0..k).collect();
    let mut best: Option<i64> = None;
    loop {
        let mut uf = UnionFind::new(n);
        let mut spanning = true;
        let mut weight = 0;
        for &id in &chosen {
            let e = g.edge(id);
            if !uf.union(e.u, e.v) {
                spanning = false;
                break;
            }
            weight += e.w;
        }
        if spanning && uf.components() == 1 {
            best = Some(best.map_or(weight, |b: i64| b.min(weight)));
        }
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return best.ok_or(OracleError::NotConnected);
            }
            i -= 1;
            if chosen[i] != i + m - k {
                chosen[i] += 1;
                for j in i + 1..k {
                    chosen[j] = chosen[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Objective {
    Weight,
    Cardinality,
}

fn edge_score(g: &WeightedGraph, eid: EdgeId, obj: Objective) -> i64 {
    match obj {
        Objective::Weight => g.weight(eid),
        Objective::Cardinality => 1,
    }
}

/// Branch-and-bound over the smaller bipartition side: each node is left
/// unmatched or matched to an unused neighbor.
fn matchings_bipartite(
    g: &WeightedGraph,
    side: &[NodeId],
    obj: Objective,
) -> i64 {
    // suffix[i] = best possible score from nodes i.. (one edge each)
    let mut suffix = vec![0i64; side.len() + 1];
    for i in (0..side.len()).rev() {
        let best_inc = g
            .incident(side[i])
            .iter()
            .map(|&eid| edge_score(g, eid, obj))
            .max()
            .unwrap_or(0);
        suffix[i] = suffix[i + 1] + best_inc;
    }
    fn rec(
        g: &WeightedGraph,
        side: &[NodeId],
        obj: Objective,
        suffix: &[i64],
        i: usize,
        used: &mut Vec<bool>,
        acc: i64,
        best: &mut i64,
    ) {
        if acc + suffix[i] <= *best {
            return;
        }
        if i == side.len() {
            *best = (*best).max(acc);
            return;
        }
        for &eid in g.incident(side[i]) {
            let y = g.edge(eid).other(side[i]);
            if !used[y] {
                used[y] = true;
                rec(g, side, obj, suffix, i + 1, used, acc + edge_score(g, eid, obj), best);
                used[y] = false;
            }
        }
        rec(g, side, obj, suffix, i + 1, used, acc, best);
    }
    let mut best = 0;
    let mut used = vec![false; g.node_count() + 1];
    rec(g, side, obj, &suffix, 0, &mut used, 0, &mut best);
    best
}

/// Include/exclude recursion over the edge list.
fn matchings_edges(g: &WeightedGraph, obj: Objective) -> i64 {
    let m = g.edge_count();
    let mut suffix = vec![0i64; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] + edge_score(g, i, obj);
    }
    fn rec(
        g: &WeightedGraph,
        obj: Objective,
        suffix: &[i64],
        i: usize,
        used: &mut Vec<bool>,
        acc: i64,
        best: &mut i64,
    ) {
        if acc + suffix[i] <= *best {
            return;
        }
        if i == g.edge_count() {
            *best = (*best).max(acc);
            return;
        }
        let e = g.edge(i);
        if !used[e.u] && !used[e.v] {
            used[e.u] = true;
            used[e.v] = true;
            rec(g, obj, suffix, i + 1, used, acc + edge_score(g, i, obj), best);
            used[e.u] = false;
            used[e.v] = false;
        }
        rec(g, obj, suffix, i + 1, used, acc, best);
    }
    let mut best = 0;
    let mut used = vec![false; g.node_count() + 1];
    rec(g, obj, &suffix, 0, &mut used, 0, &mut best);
    best
}

fn matchings_opt(g: &WeightedGraph, obj: Objective) -> Result<i64, OracleError> {
    if let Some((a, b)) = bipartition(g) {
        if a.len().max(b.len()) <= 8 {
            let side = if a.len() <= b.len() { a } else { b };
            return Ok(matchings_bipartite(g, &side, obj));
        }
    }
    guard(
        g.edge_count() <= 24,
        "matching enumeration needs bipartite sides <= 8 or m <= 24",
    )?;
    Ok(matchings_edges(g, obj))
}

/// Maximum matching weight by exhaustive enumeration.
pub fn bruteforce_mwm(g: &WeightedGraph) -> Result<i64, OracleError> {
    matchings_opt(g, Objective::Weight)
}

/// Maximum matching cardinality by exhaustive enumeration.
pub fn bruteforce_mcm(g: &WeightedGraph) -> Result<i64, OracleError> {
    matchings_opt(g, Objective::Cardinality)
}

/// Maximum-weight b-matching value: edge subsets with every node `v` in at
/// most `b[v]` chosen edges. `b` is indexed by node id (slot 0 unused).
pub fn bruteforce_b_matching(g: &WeightedGraph, b: &[i64]) -> Result<i64, OracleError> {
    if b.len() != g.node_count() + 1 {
        return Err(OracleError::BadArgument(format!(
            "capacity vector must have length n+1 = {}",
            g.node_count() + 1
        )));
    }
    if let Some(bad) = b[1..].iter().find(|&&c| c < 0) {
        return Err(OracleError::BadArgument(format!(
            "negative node capacity {bad}"
        )));
    }
    guard(g.edge_count() <= 24, "b-matching enumeration needs m <= 24")?;
    let m = g.edge_count();
    let mut suffix = vec![0i64; m + 1];
    for i in (0..m).rev() {
        suffix[i] = suffix[i + 1] + g.weight(i);
    }
    fn rec(
        g: &WeightedGraph,
        suffix: &[i64],
        i: usize,
        remaining: &mut Vec<i64>,
        acc: i64,
        best: &mut i64,
    ) {
        if acc + suffix[i] <= *best {
            return;
        }
        if i == g.edge_count() {
            *best = (*best).max(acc);
            return;
        }
        let e = g.edge(i);
        if remaining[e.u] > 0 && remaining[e.v] > 0 {
            remaining[e.u] -= 1;
            remaining[e.v] -= 1;
            rec(g, suffix, i + 1, remaining, acc + e.w, best);
            remaining[e.u] += 1;
            remaining[e.v] += 1;
        }
        rec(g, suffix, i + 1, remaining, acc, best);
    }
    let mut best = 0;
    let mut remaining = b.to_vec();
    rec(g, &suffix, 0, &mut remaining, 0, &mut best);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::random_graph;
    use crate::oracle::{dijkstra_dist, kruskal_mst, static_maxflow};

    #[test]
    fn dist_enumeration_matches_dijkstra() {
        for seed in 0..40 {
            let g = random_graph(7, 0.5, 6, seed).unwrap();
            let brute = bruteforce_dist(&g, 1, 7).unwrap();
            let fast = dijkstra_dist(&g, 1, 7).unwrap();
            assert_eq!(brute, fast, "seed {seed}");
        }
    }

    #[test]
    fn maxflow_matches_enumeration_and_mincut() {
        let mut tested = 0;
        for seed in 0..60 {
            let g = random_graph(6, 0.45, 4, seed).unwrap();
            if g.edge_count() > 12 {
                continue;
            }
            tested += 1;
            let fast = static_maxflow(&g, 1, 6).unwrap().value;
            assert_eq!(fast, bruteforce_maxflow(&g, 1, 6).unwrap(), "seed {seed}");
            assert_eq!(fast, bruteforce_mincut(&g, 1, 6).unwrap(), "seed {seed}");
        }
        assert!(tested >= 20, "only {tested} instances inside the guard");
    }

    #[test]
    fn maxflow_enumeration_directed() {
        // Diamond with a cross edge: greedy unit paths through the cross
        // edge get stuck at 1; the true max is 2.
        let g = WeightedGraph::new(
            true,
            4,
            4,
            &[(1, 2, 1), (1, 3, 1), (2, 3, 1), (2, 4, 1), (3, 4, 1)],
        )
        .unwrap();
        assert_eq!(bruteforce_maxflow(&g, 1, 4).unwrap(), 2);
        assert_eq!(static_maxflow(&g, 1, 4).unwrap().value, 2);
    }

    #[test]
    fn mst_enumeration_matches_kruskal() {
        for seed in 0..40 {
            let g = random_graph(7, 0.6, 9, seed).unwrap();
            match (kruskal_mst(&g), bruteforce_mst(&g)) {
                (Ok(fast), Ok(brute)) => assert_eq!(fast.weight, brute, "seed {seed}"),
                (Err(OracleError::NotConnected), Err(OracleError::NotConnected)) => {}
                (a, b) => panic!("seed {seed}: mismatch {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn matching_basics() {
        let single = WeightedGraph::new(false, 2, 9, &[(1, 2, 5)]).unwrap();
        assert_eq!(bruteforce_mwm(&single).unwrap(), 5);
        assert_eq!(bruteforce_mcm(&single).unwrap(), 1);

        // Path a-b-c, weights 3 and 4: the two edges conflict at b.
        let path = WeightedGraph::new(false, 3, 9, &[(1, 2, 3), (2, 3, 4)]).unwrap();
        assert_eq!(bruteforce_mwm(&path).unwrap(), 4);
        assert_eq!(bruteforce_mcm(&path).unwrap(), 1);
    }

    #[test]
    fn complete_bipartite_all_ones_has_perfect_matching() {
        for n in 1..=5usize {
            let mut edges = Vec::new();
            for l in 1..=n {
                for r in 1..=n {
                    edges.push((l, n + r, 1));
                }
            }
            let g = WeightedGraph::new_bipartite(n, n, 1, &edges).unwrap();
            assert_eq!(bruteforce_mcm(&g).unwrap(), n as i64);
        }
    }

    #[test]
    fn bipartite_and_edge_recursions_agree() {
        for seed in 100..120 {
            let g = crate::gen::random_bipartite_graph(4, 5, 0.6, 7, seed).unwrap();
            if g.edge_count() > 24 {
                continue;
            }
            let via_side = matchings_bipartite(&g, &(1..=4).collect::<Vec<_>>(), Objective::Weight);
            let via_edges = matchings_edges(&g, Objective::Weight);
            assert_eq!(via_side, via_edges, "seed {seed}");
        }
    }

    #[test]
    fn b_matching_reduces_to_matching_when_caps_are_one() {
        for seed in 0..20 {
            let g = random_graph(6, 0.5, 5, seed).unwrap();
            if g.edge_count() > 24 {
                continue;
            }
            let b = vec![1i64; g.node_count() + 1];
            assert_eq!(
                bruteforce_b_matching(&g, &b).unwrap(),
                bruteforce_mwm(&g).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn b_matching_star_and_loose_caps() {
        // Star centered at 1, leaf weights 1,2,3.
        let g = WeightedGraph::new(false, 4, 9, &[(1, 2, 1), (1, 3, 2), (1, 4, 3)]).unwrap();
        let mut b = vec![1i64; 5];
        b[1] = 2;
        assert_eq!(bruteforce_b_matching(&g, &b).unwrap(), 5);
        // Caps at least the degree: every edge fits.
        let loose = vec![3i64; 5];
        assert_eq!(bruteforce_b_matching(&g, &loose).unwrap(), 6);
        // Empty set is always valid: zero caps give zero weight.
        let zero = vec![0i64; 5];
        assert_eq!(bruteforce_b_matching(&g, &zero).unwrap(), 0);
    }

    #[test]
    fn b_matching_rejects_negative_cap() {
        let g = WeightedGraph::new(false, 2, 9, &[(1, 2, 5)]).unwrap();
        let b = vec![0, 1, -1];
        assert!(matches!(
            bruteforce_b_matching(&g, &b),
            Err(OracleError::BadArgument(_))
        ));
    }

    #[test]
    fn guards_fail_loudly() {
        let big = random_graph(20, 0.9, 4, 1).unwrap();
        assert!(matches!(
            bruteforce_dist(&big, 1, 20),
            Err(OracleError::SizeGuard(_))
        ));
        assert!(matches!(
            bruteforce_maxflow(&big, 1, 20),
            Err(OracleError::SizeGuard(_))
        ));
        assert!(matches!(
            bruteforce_mincut(&big, 1, 20),
            Err(OracleError::SizeGuard(_))
        ));
        assert!(matches!(
            bruteforce_mst(&big),
            Err(OracleError::SizeGuard(_))
        ));
        assert!(matches!(
            bruteforce_mwm(&big),
            Err(OracleError::SizeGuard(_))
        ));
    }
}
