#![allow(dead_code)]

use backpush::graph::DanglingPolicy;
use backpush::walk::stream_rng;
use backpush::Graph;
use rand::Rng;

/// G(n, p) digraph with self-loops added on dangling nodes.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = stream_rng(seed, 0xd1);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap().validate_out_degrees(DanglingPolicy::AddSelfLoops).unwrap()
}

pub fn two_cycle() -> Graph {
    Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap()
}

/// `0 → 1`, `1 → 1`: `π = (0.1, 0.9)` at `α = 0.2`.
pub fn chain() -> Graph {
    Graph::from_edges(2, &[(0, 1), (1, 1)]).unwrap()
}

/// Leaves `1..=k` all point to a hub `0` with a self-loop.
pub fn in_star(k: usize) -> Graph {
    let mut edges: Vec<_> = (1..=k).map(|v| (v, 0)).collect();
    edges.push((0, 0));
    Graph::from_edges(k + 1, &edges).unwrap()
}

/// Directed cycle with chords `v → v + 2`.
pub fn chorded_cycle(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).flat_map(|v| [(v, (v + 1) % n), (v, (v + 2) % n)]).collect();
    Graph::from_edges(n, &edges).unwrap()
}

/// Named graphs with a target for the statistical suites.
pub fn test_graphs() -> Vec<(&'static str, Graph, usize)> {
    vec![
        ("two_cycle", two_cycle(), 0),
        ("chain_source", chain(), 0),
        ("chain_sink", chain(), 1),
        ("in_star", in_star(20), 0),
        ("chorded_cycle", chorded_cycle(30), 7),
        ("random_sparse", random_digraph(80, 0.04, 3), 5),
        ("random_dense", random_digraph(40, 0.2, 4), 11),
    ]
}
