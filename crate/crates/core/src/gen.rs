//! Deterministic random instance generation for tests and benchmarks.
//!
//! All randomness flows through a ChaCha stream seeded from a caller
//! supplied `u64`, so equal parameters produce byte-identical artifacts on
//! every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{ChangeTrace, QueryKind, TraceEvent, WeightChange, WeightedGraph};

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("node count must be >= 1")]
    BadNodeCount,
    #[error("density must lie in (0, 1], got {0}")]
    BadDensity(f64),
    #[error("weight bound must be >= 1, got {0}")]
    BadWeightBound(i64),
    #[error("change bound must be >= 1, got {0}")]
    BadChangeBound(i64),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check(n: usize, density: f64, weight_bound: i64) -> Result<(), GenError> {
    if n == 0 {
        return Err(GenError::BadNodeCount);
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(GenError::BadDensity(density));
    }
    if weight_bound < 1 {
        return Err(GenError::BadWeightBound(weight_bound));
    }
    Ok(())
}

/// Undirected graph on `n` nodes; each of the n(n-1)/2 candidate edges is
/// kept with probability `density`, weights uniform in `[1, W]`.
pub fn random_graph(
    n: usize,
    density: f64,
    weight_bound: i64,
    seed: u64,
) -> Result<WeightedGraph, GenError> {
    check(n, density, weight_bound)?;
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in (u + 1)..=n {
            if rng.random::<f64>() < density {
                edges.push((u, v, rng.random_range(1..=weight_bound)));
            }
        }
    }
    WeightedGraph::new(false, n, weight_bound, &edges)
        .map_err(|e| GenError::Infeasible(e.to_string()))
}

/// Like [`random_graph`] but guaranteed connected: a random spanning tree
/// is laid down first, then the remaining pairs are sampled at `density`.
pub fn random_connected_graph(
    n: usize,
    density: f64,
    weight_bound: i64,
    seed: u64,
) -> Result<WeightedGraph, GenError> {
    check(n, density, weight_bound)?;
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    let mut in_tree = std::collections::HashSet::new();
    for v in 2..=n {
        let u = rng.random_range(1..v);
        edges.push((u, v, rng.random_range(1..=weight_bound)));
        in_tree.insert((u, v));
    }
    for u in 1..=n {
        for v in (u + 1)..=n {
            if !in_tree.contains(&(u, v)) && rng.random::<f64>() < density {
                edges.push((u, v, rng.random_range(1..=weight_bound)));
            }
        }
    }
    WeightedGraph::new(false, n, weight_bound, &edges)
        .map_err(|e| GenError::Infeasible(e.to_string()))
}

/// Directed graph: every ordered pair (u, v), u != v, is kept with
/// probability `density`, so antiparallel pairs can coexist.
pub fn random_directed_graph(
    n: usize,
    density: f64,
    weight_bound: i64,
    seed: u64,
) -> Result<WeightedGraph, GenError> {
    check(n, density, weight_bound)?;
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    for u in 1..=n {
        for v in 1..=n {
            if u != v && rng.random::<f64>() < density {
                edges.push((u, v, rng.random_range(1..=weight_bound)));
            }
        }
    }
    WeightedGraph::new(true, n, weight_bound, &edges)
        .map_err(|e| GenError::Infeasible(e.to_string()))
}

/// Bipartite graph with the standard layout (L = `1..=left`).
pub fn random_bipartite_graph(
    left: usize,
    right: usize,
    density: f64,
    weight_bound: i64,
    seed: u64,
) -> Result<WeightedGraph, GenError> {
    check(left.min(right).max(1), density, weight_bound)?;
    if left == 0 || right == 0 {
        return Err(GenError::BadNodeCount);
    }
    let mut rng = rng_for(seed);
    let mut edges = Vec::new();
    for l in 1..=left {
        for r in 1..=right {
            if rng.random::<f64>() < density {
                edges.push((l, left + r, rng.random_range(1..=weight_bound)));
            }
        }
    }
    WeightedGraph::new_bipartite(left, right, weight_bound, &edges)
        .map_err(|e| GenError::Infeasible(e.to_string()))
}

/// A change trace of `len` events over `g`, every delta drawn uniformly
/// from the feasible window `[-c, c] ∩ [1-w, W-w]`, so replay can never
/// leave `[1, W]`. When `query_every` is set, a query of `query_kind` is
/// inserted after every that many change events.
pub fn random_trace(
    g: &WeightedGraph,
    len: usize,
    change_bound: i64,
    query_every: Option<usize>,
    query_kind: QueryKind,
    seed: u64,
) -> Result<ChangeTrace, GenError> {
    if change_bound < 1 {
        return Err(GenError::BadChangeBound(change_bound));
    }
    if g.edge_count() == 0 && len > 0 {
        return Err(GenError::Infeasible("graph has no edges to change".into()));
    }
    let mut rng = rng_for(seed);
    let mut weights: Vec<i64> = g.edges().iter().map(|e| e.w).collect();
    let bound = g.weight_bound();
    let mut events = Vec::with_capacity(len);
    let mut changes_emitted = 0usize;
    while changes_emitted < len {
        let id = rng.random_range(0..g.edge_count());
        let w = weights[id];
        let lo = (-change_bound).max(1 - w);
        let hi = change_bound.min(bound - w);
        let delta = rng.random_range(lo..=hi);
        weights[id] += delta;
        let e = g.edge(id);
        events.push(TraceEvent::Change(WeightChange::new(e.u, e.v, delta)));
        changes_emitted += 1;
        if let Some(every) = query_every {
            if every > 0 && changes_emitted % every == 0 {
                events.push(TraceEvent::Query(query_kind));
            }
        }
    }
    Ok(ChangeTrace::new(Some(change_bound), events))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_graph() {
        let a = random_graph(4, 1.0, 5, 7).unwrap();
        let b = random_graph(4, 1.0, 5, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.edge_count(), 6);
    }

    #[test]
    fn different_seed_differs() {
        let a = random_graph(12, 0.5, 5, 1).unwrap();
        let b = random_graph(12, 0.5, 5, 2).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn connected_generator_spans() {
        use crate::oracle::connectivity;
        for seed in 0..20 {
            let g = random_connected_graph(15, 0.05, 9, seed).unwrap();
            assert!(connectivity(&g));
        }
    }

    #[test]
    fn trace_respects_bound_and_range() {
        let g = random_graph(8, 0.8, 5, 3).unwrap();
        let tr = random_trace(&g, 500, 2, None, QueryKind::Dist, 11).unwrap();
        assert!(tr.changes().all(|c| c.delta.abs() <= 2));
        // Replay never errors: validated on a clone.
        tr.validate(&g).unwrap();
    }

    #[test]
    fn trace_queries_inserted() {
        let g = random_graph(5, 1.0, 5, 3).unwrap();
        let tr = random_trace(&g, 10, 1, Some(5), QueryKind::Mst, 11).unwrap();
        let queries = tr
            .events
            .iter()
            .filter(|e| matches!(e, TraceEvent::Query(QueryKind::Mst)))
            .count();
        assert_eq!(queries, 2);
        assert_eq!(tr.events.len(), 12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(random_graph(0, 0.5, 5, 1), Err(GenError::BadNodeCount));
        assert!(matches!(
            random_graph(3, 0.0, 5, 1),
            Err(GenError::BadDensity(_))
        ));
        assert!(matches!(
            random_graph(3, 0.5, 0, 1),
            Err(GenError::BadWeightBound(0))
        ));
    }
}
