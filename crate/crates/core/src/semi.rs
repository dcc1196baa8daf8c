//! Weighted semi-matchings: every task (left node) is assigned to exactly
//! one neighboring machine (right node), and each machine processes its
//! tasks in the order minimizing the sum of finishing times.
//!
//! The cost of a machine is the minimum over processing orders of the sum
//! of prefix sums of its task weights. That minimum is attained by the
//! shortest-processing-time order: sorting ascending gives the closed form
//! `sum_j (d - j + 1) * w_(j)`, which the factorial brute force pins down
//! in tests. The static solver reduces the problem to a min-cost
//! assignment on (machine, position-from-last) slots, where slot k of a
//! machine costs `k * w(task, machine)`.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{NodeId, WeightedGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemiError {
    #[error("graph carries no bipartition (build it with a bipartite layout)")]
    NotBipartite,
    #[error("task {0} is isolated: no semi-matching exists")]
    IsolatedTask(NodeId),
    #[error("node {0} is not a machine")]
    NotAMachine(NodeId),
    #[error("task {0} assigned to non-neighbor {1}")]
    AssignedToNonNeighbor(NodeId, NodeId),
    #[error("assignment vector covers {0} tasks, graph has {1}")]
    AssignmentLength(usize, usize),
    #[error("instance too large for brute force: {0}")]
    SizeGuard(String),
}

fn sides(g: &WeightedGraph) -> Result<(usize, usize), SemiError> {
    let l = g.left_size().ok_or(SemiError::NotBipartite)?;
    Ok((l, g.node_count() - l))
}

/// Total map from tasks `1..=|L|` to machines, using only graph edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiMatching {
    /// assign[l] = machine node id; slot 0 unused.
    assign: Vec<NodeId>,
}

impl SemiMatching {
    pub fn new(g: &WeightedGraph, assign: Vec<NodeId>) -> Result<Self, SemiError> {
        let (nl, _) = sides(g)?;
        if assign.len() != nl + 1 {
            return Err(SemiError::AssignmentLength(
                assign.len().saturating_sub(1),
                nl,
            ));
        }
        for l in 1..=nl {
            let r = assign[l];
            if r <= nl || r > g.node_count() {
                return Err(SemiError::NotAMachine(r));
            }
            if g.edge_index(l, r).is_none() {
                return Err(SemiError::AssignedToNonNeighbor(l, r));
            }
        }
        Ok(SemiMatching { assign })
    }

    pub fn machine_of(&self, task: NodeId) -> NodeId {
        self.assign[task]
    }

    pub fn tasks_of(&self, g: &WeightedGraph, machine: NodeId) -> Vec<NodeId> {
        let nl = g.left_size().unwrap_or(0);
        (1..=nl).filter(|&l| self.assign[l] == machine).collect()
    }
}

/// Minimum total finishing time for one machine given its task weights:
/// ascending order, weight `w_(j)` counted `d - j + 1` times.
pub fn spt_cost(weights: &[i64]) -> i64 {
    let mut sorted = weights.to_vec();
    sorted.sort_unstable();
    let d = sorted.len() as i64;
    sorted
        .iter()
        .enumerate()
        .map(|(j, &w)| (d - j as i64) * w)
        .sum()
}

/// Minimum over all processing orders of the sum of prefix sums, by
/// enumerating every permutation. Oracle for [`spt_cost`]; degree <= 8.
pub fn bruteforce_machine_cost(weights: &[i64]) -> Result<i64, SemiError> {
    if weights.len() > 8 {
        return Err(SemiError::SizeGuard(
            "ordering enumeration needs degree <= 8".into(),
        ));
    }
    if weights.is_empty() {
        return Ok(0);
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    let mut best = i64::MAX;
    // Heap's algorithm over index permutations.
    fn visit(weights: &[i64], order: &[usize], best: &mut i64) {
        let mut finish = 0;
        let mut total = 0;
        for &i in order {
            finish += weights[i];
            total += finish;
        }
        *best = (*best).min(total);
    }
    fn heaps(k: usize, order: &mut Vec<usize>, weights: &[i64], best: &mut i64) {
        if k <= 1 {
            visit(weights, order, best);
            return;
        }
        for i in 0..k {
            heaps(k - 1, order, weights, best);
            if k % 2 == 0 {
                order.swap(i, k - 1);
            } else {
                order.swap(0, k - 1);
            }
        }
    }
    heaps(order.len(), &mut order, weights, &mut best);
    Ok(best)
}

fn assigned_weights(
    g: &WeightedGraph,
    sm: &SemiMatching,
    machine: NodeId,
) -> Result<Vec<i64>, SemiError> {
    let (nl, _) = sides(g)?;
    if machine <= nl || machine > g.node_count() {
        return Err(SemiError::NotAMachine(machine));
    }
    Ok((1..=nl)
        .filter(|&l| sm.assign[l] == machine)
        .map(|l| g.weight(g.edge_index(l, machine).unwrap()))
        .collect())
}

/// Cost of one machine under the semi-matching: minimum total finishing
/// time of the tasks assigned to it.
pub fn machine_cost(
    g: &WeightedGraph,
    sm: &SemiMatching,
    machine: NodeId,
) -> Result<i64, SemiError> {
    Ok(spt_cost(&assigned_weights(g, sm, machine)?))
}

/// Sum of machine costs over all machines.
pub fn total_cost(g: &WeightedGraph, sm: &SemiMatching) -> Result<i64, SemiError> {
    let (nl, _) = sides(g)?;
    // Re-validate: `sm` may have been built against another graph.
    let validated = SemiMatching::new(g, sm.assign.clone())?;
    let mut total = 0;
    for r in nl + 1..=g.node_count() {
        total += machine_cost(g, &validated, r)?;
    }
    Ok(total)
}

// Min-cost assignment by successive shortest paths with potentials.
// All arc costs are nonnegative, so plain Dijkstra seeds the potentials.
struct Mcmf {
    // arcs stored in twin pairs: arc 2k and 2k+1 are reverses
    to: Vec<usize>,
    cap: Vec<i64>,
    cost: Vec<i64>,
    head: Vec<Vec<usize>>,
}

impl Mcmf {
    fn new(n: usize) -> Self {
        Mcmf {
            to: Vec::new(),
            cap: Vec::new(),
            cost: Vec::new(),
            head: vec![Vec::new(); n],
        }
    }

    fn link(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        let id = self.to.len();
        self.head[from].push(id);
        self.to.push(to);
        self.cap.push(cap);
        self.cost.push(cost);
        self.head[to].push(id + 1);
        self.to.push(from);
        self.cap.push(0);
        self.cost.push(-cost);
        id
    }

    /// Pushes `units` of flow from `s` to `t`, one augmentation at a time.
    /// Returns the total cost, or None if the flow is infeasible.
    fn run(&mut self, s: usize, t: usize, units: i64) -> Option<i64> {
        let n = self.head.len();
        let mut potential = vec![0i64; n];
        let mut total_cost = 0;
        for _ in 0..units {
            let mut dist = vec![i64::MAX; n];
            let mut parent_arc = vec![usize::MAX; n];
            let mut heap = std::collections::BinaryHeap::new();
            dist[s] = 0;
            heap.push(std::cmp::Reverse((0i64, s)));
            while let Some(std::cmp::Reverse((d, x))) = heap.pop() {
                if d > dist[x] {
                    continue;
                }
                for &a in &self.head[x] {
                    if self.cap[a] < 1 {
                        continue;
                    }
                    let y = self.to[a];
                    let nd = d + self.cost[a] + potential[x] - potential[y];
                    if nd < dist[y] {
                        dist[y] = nd;
                        parent_arc[y] = a;
                        heap.push(std::cmp::Reverse((nd, y)));
                    }
                }
            }
            if dist[t] == i64::MAX {
                return None;
            }
            for x in 0..n {
                if dist[x] < i64::MAX {
                    potential[x] += dist[x];
                }
            }
            let mut x = t;
            while x != s {
                let a = parent_arc[x];
                self.cap[a] -= 1;
                self.cap[a ^ 1] += 1;
                total_cost += self.cost[a];
                x = self.to[a ^ 1];
            }
        }
        Some(total_cost)
    }
}

/// Minimum-cost semi-matching via the slot reduction: task `l` may take
/// slot `(r, k)` at cost `k * w(l, r)`, where slot k means "k-th from the
/// end of machine r's schedule". Slot costs rise in k, so optima fill each
/// machine's slots contiguously from k = 1, realizing the SPT cost.
pub fn optimal_semi_matching(g: &WeightedGraph) -> Result<(SemiMatching, i64), SemiError> {
    let (nl, nr) = sides(g)?;
    for l in 1..=nl {
        if g.degree(l) == 0 {
            return Err(SemiError::IsolatedTask(l));
        }
    }
    // Node layout: 0 = source, 1..=nl tasks, then nr*nl slots, then sink.
    let slot_base = nl + 1;
    let sink = slot_base + nr * nl;
    let mut net = Mcmf::new(sink + 1);
    for l in 1..=nl {
        net.link(0, l, 1, 0);
    }
    let mut slot_arcs: HashMap<usize, (NodeId, NodeId)> = HashMap::new();
    for l in 1..=nl {
        for &eid in g.incident(l) {
            let e = g.edge(eid);
            let r = e.other(l);
            let r_idx = r - nl - 1;
            for k in 1..=nl {
                let slot = slot_base + r_idx * nl + (k - 1);
                let arc = net.link(l, slot, 1, k as i64 * e.w);
                slot_arcs.insert(arc, (l, r));
            }
        }
    }
    for slot in slot_base..sink {
        net.link(slot, sink, 1, 0);
    }
    let cost = net
        .run(0, sink, nl as i64)
        .expect("no isolated task, so an assignment exists");
    let mut assign = vec![0usize; nl + 1];
    for (&arc, &(l, r)) in &slot_arcs {
        if net.cap[arc] == 0 {
            assign[l] = r;
        }
    }
    let sm = SemiMatching::new(g, assign)?;
    debug_assert_eq!(total_cost(g, &sm)?, cost);
    Ok((sm, cost))
}

/// Exhaustive minimum over all assignments, with per-machine processing
/// orders enumerated by the factorial oracle (memoized per weight
/// multiset). |L| <= 8 and every task degree <= 5.
pub fn bruteforce_semi_matching(g: &WeightedGraph) -> Result<i64, SemiError> {
    let (nl, _) = sides(g)?;
    if nl > 8 {
        return Err(SemiError::SizeGuard("assignment enumeration needs |L| <= 8".into()));
    }
    for l in 1..=nl {
        if g.degree(l) == 0 {
            return Err(SemiError::IsolatedTask(l));
        }
        if g.degree(l) > 5 {
            return Err(SemiError::SizeGuard(
                "assignment enumeration needs task degree <= 5".into(),
            ));
        }
    }
    let mut memo: HashMap<Vec<i64>, i64> = HashMap::new();
    let mut per_machine: HashMap<NodeId, Vec<i64>> = HashMap::new();
    let mut best = i64::MAX;
    fn rec(
        g: &WeightedGraph,
        nl: usize,
        l: NodeId,
        per_machine: &mut HashMap<NodeId, Vec<i64>>,
        memo: &mut HashMap<Vec<i64>, i64>,
        best: &mut i64,
    ) -> Result<(), SemiError> {
        if l > nl {
            let mut total = 0;
            for weights in per_machine.values() {
                let mut key = weights.clone();
                key.sort_unstable();
                let cost = match memo.get(&key) {
                    Some(&c) => c,
                    None => {
                        let c = bruteforce_machine_cost(&key)?;
                        memo.insert(key, c);
                        c
                    }
                };
                total += cost;
            }
            *best = (*best).min(total);
            return Ok(());
        }
        for &eid in g.incident(l) {
            let e = g.edge(eid);
            let r = e.other(l);
            per_machine.entry(r).or_default().push(e.w);
            rec(g, nl, l + 1, per_machine, memo, best)?;
            let list = per_machine.get_mut(&r).unwrap();
            list.pop();
            if list.is_empty() {
                per_machine.remove(&r);
            }
        }
        Ok(())
    }
    rec(g, nl, 1, &mut per_machine, &mut memo, &mut best)?;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bip(l: usize, r: usize, w_bound: i64, edges: &[(usize, usize, i64)]) -> WeightedGraph {
        WeightedGraph::new_bipartite(l, r, w_bound, edges).unwrap()
    }

    #[test]
    fn machine_cost_two_tasks() {
        // Weights {1, 2}: finishing times 1 and 3 in SPT order.
        let g = bip(2, 1, 9, &[(1, 3, 1), (2, 3, 2)]);
        let sm = SemiMatching::new(&g, vec![0, 3, 3]).unwrap();
        assert_eq!(machine_cost(&g, &sm, 3).unwrap(), 4);
        assert_eq!(bruteforce_machine_cost(&[1, 2]).unwrap(), 4);
    }

    #[test]
    fn unit_weights_give_triangular_cost() {
        for d in 0..=7 {
            let weights = vec![1i64; d];
            let d = d as i64;
            assert_eq!(spt_cost(&weights), d * (d + 1) / 2);
        }
    }

    #[test]
    fn idle_machine_costs_nothing() {
        let g = bip(1, 2, 9, &[(1, 2, 4), (1, 3, 4)]);
        let sm = SemiMatching::new(&g, vec![0, 2]).unwrap();
        assert_eq!(machine_cost(&g, &sm, 3).unwrap(), 0);
        assert_eq!(total_cost(&g, &sm).unwrap(), 4);
    }

    #[test]
    fn closed_form_matches_factorial_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let d = rng.random_range(0..=6);
            let weights: Vec<i64> = (0..d).map(|_| rng.random_range(1..=9)).collect();
            assert_eq!(
                spt_cost(&weights),
                bruteforce_machine_cost(&weights).unwrap(),
                "weights {weights:?}"
            );
        }
    }

    #[test]
    fn singleton_machines_sum_edge_weights() {
        let g = bip(2, 2, 9, &[(1, 3, 5), (2, 4, 7)]);
        let sm = SemiMatching::new(&g, vec![0, 3, 4]).unwrap();
        assert_eq!(total_cost(&g, &sm).unwrap(), 12);
    }

    #[test]
    fn two_tasks_one_machine_total() {
        let g = bip(2, 1, 9, &[(1, 3, 2), (2, 3, 3)]);
        let (sm, cost) = optimal_semi_matching(&g).unwrap();
        assert_eq!(cost, 7); // 2*2 + 1*3
        assert_eq!(total_cost(&g, &sm).unwrap(), 7);
    }

    #[test]
    fn single_task_picks_lighter_machine() {
        let g = bip(1, 2, 9, &[(1, 2, 3), (1, 3, 5)]);
        let (sm, cost) = optimal_semi_matching(&g).unwrap();
        assert_eq!(cost, 3);
        assert_eq!(sm.machine_of(1), 2);
    }

    #[test]
    fn isolated_task_is_infeasible() {
        let g = bip(2, 1, 9, &[(1, 3, 1)]);
        assert_eq!(
            optimal_semi_matching(&g).unwrap_err(),
            SemiError::IsolatedTask(2)
        );
    }

    #[test]
    fn assignment_validation() {
        let g = bip(2, 2, 9, &[(1, 3, 1), (2, 3, 1)]);
        assert_eq!(
            SemiMatching::new(&g, vec![0, 3, 4]).unwrap_err(),
            SemiError::AssignedToNonNeighbor(2, 4)
        );
        assert_eq!(
            SemiMatching::new(&g, vec![0, 1, 3]).unwrap_err(),
            SemiError::NotAMachine(1)
        );
        assert_eq!(
            SemiMatching::new(&g, vec![0, 3]).unwrap_err(),
            SemiError::AssignmentLength(1, 2)
        );
    }

    fn random_bip_no_isolated(l: usize, r: usize, seed: u64) -> WeightedGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for task in 1..=l {
            let mut any = false;
            for machine in 1..=r {
                if rng.random::<f64>() < 0.55 {
                    edges.push((task, l + machine, rng.random_range(1..=6)));
                    any = true;
                }
            }
            if !any {
                let machine = rng.random_range(1..=r);
                edges.push((task, l + machine, rng.random_range(1..=6)));
            }
        }
        WeightedGraph::new_bipartite(l, r, 6, &edges).unwrap()
    }

    #[test]
    fn optimal_matches_double_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for case in 0..40 {
            let l = rng.random_range(1..=5);
            let r = rng.random_range(1..=5);
            let g = random_bip_no_isolated(l, r, 1000 + case);
            let (_, fast) = optimal_semi_matching(&g).unwrap();
            let brute = bruteforce_semi_matching(&g).unwrap();
            assert_eq!(fast, brute, "case {case} ({l}x{r})");
        }
    }

    #[test]
    fn optimum_uses_slots_contiguously() {
        // Equivalent statement: each machine's realized cost equals the
        // SPT closed form of its load, which assumes slots 1..d.
        for case in 0..10 {
            let g = random_bip_no_isolated(5, 3, 2000 + case);
            let (sm, cost) = optimal_semi_matching(&g).unwrap();
            let recomputed: i64 = (6..=g.node_count())
                .map(|r| machine_cost(&g, &sm, r).unwrap())
                .sum();
            assert_eq!(cost, recomputed, "case {case}");
        }
    }

    #[test]
    fn cost_is_monotone_in_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(321);
        for case in 0..15 {
            let g = random_bip_no_isolated(4, 3, 3000 + case);
            let (_, base) = optimal_semi_matching(&g).unwrap();
            let eid = rng.random_range(0..g.edge_count());
            let e = g.edge(eid);
            let mut edges: Vec<(usize, usize, i64)> =
                g.edges().iter().map(|e| (e.u, e.v, e.w)).collect();
            edges[eid] = (e.u, e.v, e.w + 3);
            let g2 = WeightedGraph::new_bipartite(4, 3, 9, &edges).unwrap();
            let (_, bumped) = optimal_semi_matching(&g2).unwrap();
            assert!(bumped >= base, "case {case}");
        }
    }

    #[test]
    fn cost_scales_linearly_with_weights() {
        for case in 0..10 {
            let g = random_bip_no_isolated(4, 3, 4000 + case);
            let (_, base) = optimal_semi_matching(&g).unwrap();
            for k in [2i64, 5] {
                let edges: Vec<(usize, usize, i64)> =
                    g.edges().iter().map(|e| (e.u, e.v, e.w * k)).collect();
                let gk = WeightedGraph::new_bipartite(4, 3, 6 * k, &edges).unwrap();
                let (_, scaled) = optimal_semi_matching(&gk).unwrap();
                assert_eq!(scaled, k * base, "case {case} k {k}");
            }
        }
    }

    #[test]
    fn bruteforce_guards() {
        let g = random_bip_no_isolated(9, 3, 5000);
        assert!(matches!(
            bruteforce_semi_matching(&g),
            Err(SemiError::SizeGuard(_))
        ));
        assert!(matches!(
            bruteforce_machine_cost(&[1; 9]),
            Err(SemiError::SizeGuard(_))
        ));
    }
}
