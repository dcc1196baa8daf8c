//! Randomized invariants for the graph model and its text formats.

use proptest::prelude::*;

use weightdyn::format::{parse_graph, parse_trace, serialize_graph, serialize_trace};
use weightdyn::gen::random_trace;
use weightdyn::graph::{QueryKind, WeightChange, WeightedGraph};

/// Arbitrary valid undirected graph: up to 9 nodes, independent edge
/// selection, weights inside [1, W].
fn arb_graph() -> impl Strategy<Value = WeightedGraph> {
    (1usize..=9, 1i64..=9).prop_flat_map(|(n, w_bound)| {
        let pairs: Vec<(usize, usize)> = (1..=n)
            .flat_map(|u| ((u + 1)..=n).map(move |v| (u, v)))
            .collect();
        let k = pairs.len();
        (
            proptest::collection::vec(any::<bool>(), k),
            proptest::collection::vec(1..=w_bound, k.max(1)),
        )
            .prop_map(move |(keep, weights)| {
                let edges: Vec<(usize, usize, i64)> = pairs
                    .iter()
                    .zip(keep.iter())
                    .enumerate()
                    .filter(|(_, (_, &k))| k)
                    .map(|(i, (&(u, v), _))| (u, v, weights[i % weights.len()]))
                    .collect();
                WeightedGraph::new(false, n, w_bound, &edges).unwrap()
            })
    })
}

proptest! {
    /// serialize -> parse is the identity on valid graphs.
    #[test]
    fn graph_roundtrip(g in arb_graph()) {
        let text = serialize_graph(&g);
        let back = parse_graph(&text).unwrap();
        prop_assert_eq!(back, g);
    }

    /// Generated traces replay without range errors, respect their bound,
    /// and round-trip through the text format.
    #[test]
    fn trace_roundtrip_and_bound(g in arb_graph(), len in 0usize..60, c in 1i64..4, seed in any::<u64>()) {
        prop_assume!(g.edge_count() > 0 || len == 0);
        let trace = random_trace(&g, len, c, Some(7), QueryKind::Dist, seed).unwrap();
        prop_assert!(trace.validate(&g).is_ok());
        prop_assert!(trace.changes().all(|ch| ch.delta.abs() <= c));
        let text = serialize_trace(&trace);
        let back = parse_trace(&text, &g).unwrap();
        prop_assert_eq!(back, trace);
    }

    /// Applying a change and then its inverse restores the exact graph.
    #[test]
    fn apply_change_inverse(g in arb_graph(), pick in any::<prop::sample::Index>(), delta in -8i64..=8) {
        prop_assume!(g.edge_count() > 0);
        let edge = g.edge(pick.index(g.edge_count()));
        let mut h = g.clone();
        let ch = WeightChange::new(edge.u, edge.v, delta);
        match h.apply_change(&ch) {
            Ok(_) => {
                h.apply_change(&ch.inverse()).unwrap();
                prop_assert_eq!(h, g);
            }
            Err(_) => prop_assert_eq!(h, g), // failed applications change nothing
        }
    }
}
