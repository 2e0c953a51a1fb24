//! Immutable directed multigraph in compressed sparse row form.
//!
//! Both directions are stored: `children(v)` in edge insertion order and
//! `parents(v)` ordered by the insertion order of the corresponding edges.
//! Self-loops and parallel edges are kept as-is.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::GraphError;

/// Dense node identifier in `0..n`.
pub type NodeId = usize;

/// What to do with nodes that have no out-going edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DanglingPolicy {
    Reject,
    AddSelfLoops,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    out_offsets: Vec<usize>,
    out_targets: Vec<u32>,
    in_offsets: Vec<usize>,
    in_sources: Vec<u32>,
}

impl Graph {
    /// Builds a graph on `n` nodes from an edge list, preserving edge order.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if n > u32::MAX as usize {
            return Err(GraphError::TooLarge(n));
        }
        for &(u, v) in edges {
            let bad = if u >= n { Some(u) } else if v >= n { Some(v) } else { None };
            if let Some(node) = bad {
                return Err(GraphError::NodeOutOfRange { node, n });
            }
        }

        let out_offsets = offsets(n, edges.iter().map(|&(u, _)| u));
        let in_offsets = offsets(n, edges.iter().map(|&(_, v)| v));

        // Stable counting sort in both directions.
        let mut out_targets = vec![0u32; edges.len()];
        let mut in_sources = vec![0u32; edges.len()];
        let mut out_fill = out_offsets[..n].to_vec();
        let mut in_fill = in_offsets[..n].to_vec();
        for &(u, v) in edges {
            out_targets[out_fill[u]] = v as u32;
            out_fill[u] += 1;
            in_sources[in_fill[v]] = u as u32;
            in_fill[v] += 1;
        }

        Ok(Graph { out_offsets, out_targets, in_offsets, in_sources })
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.out_offsets.len() - 1
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.out_targets.len()
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    /// Children of `v` in insertion order.
    #[inline]
    pub fn children(&self, v: NodeId) -> &[u32] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Parents of `v`, one entry per incoming edge.
    #[inline]
    pub fn parents(&self, v: NodeId) -> &[u32] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    /// All edges, grouped by source in insertion order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.num_nodes())
            .flat_map(move |u| self.children(u).iter().map(move |&v| (u, v as NodeId)))
    }

    /// `(Δ_in, Δ_out)`.
    pub fn max_degrees(&self) -> (usize, usize) {
        (0..self.num_nodes()).fold((0, 0), |(din, dout), v| {
            (din.max(self.in_degree(v)), dout.max(self.out_degree(v)))
        })
    }

    pub fn dangling_nodes(&self) -> Vec<NodeId> {
        (0..self.num_nodes()).filter(|&v| self.out_degree(v) == 0).collect()
    }

    /// Enforces nonzero out-degrees, either by failing or by giving every
    /// dangling node a self-loop (appended after the existing edges).
    pub fn validate_out_degrees(self, policy: DanglingPolicy) -> Result<Self, GraphError> {
        let dangling = self.dangling_nodes();
        if dangling.is_empty() {
            return Ok(self);
        }
        match policy {
            DanglingPolicy::Reject => Err(GraphError::Dangling(dangling)),
            DanglingPolicy::AddSelfLoops => {
                let mut edges: Vec<_> = self.edges().collect();
                edges.extend(dangling.into_iter().map(|v| (v, v)));
                Graph::from_edges(self.num_nodes(), &edges)
            }
        }
    }
}

fn offsets(n: usize, endpoints: impl Iterator<Item = NodeId>) -> Vec<usize> {
    let mut offsets = vec![0usize; n + 1];
    for v in endpoints {
        offsets[v + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    offsets
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_cycle() -> Graph {
        Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap()
    }

    #[test]
    fn small_graphs() {
        let g = two_cycle();
        assert_eq!((g.num_nodes(), g.num_edges()), (2, 2));
        assert_eq!(g.max_degrees(), (1, 1));

        let g = Graph::from_edges(1, &[(0, 0)]).unwrap();
        assert_eq!((g.num_nodes(), g.num_edges()), (1, 1));
        assert_eq!(g.max_degrees(), (1, 1));

        let g = Graph::from_edges(2, &[(0, 1), (1, 1)]).unwrap();
        assert_eq!(g.out_degree(0), 1);
        assert_eq!(g.out_degree(1), 1);
        assert_eq!(g.in_degree(1), 2);
        assert_eq!(g.max_degrees(), (2, 1));
        assert_eq!(g.parents(1), &[0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Graph::from_edges(0, &[]), Err(GraphError::Empty));
        assert_eq!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(GraphError::NodeOutOfRange { node: 2, n: 2 })
        );
    }

    #[test]
    fn dangling_policies() {
        let g = two_cycle();
        assert_eq!(g.clone().validate_out_degrees(DanglingPolicy::Reject), Ok(g));

        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(
            g.clone().validate_out_degrees(DanglingPolicy::Reject),
            Err(GraphError::Dangling(vec![1]))
        );
        let fixed = g.validate_out_degrees(DanglingPolicy::AddSelfLoops).unwrap();
        assert_eq!(fixed.num_edges(), 2);
        assert_eq!(fixed.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn parent_order_follows_insertion() {
        let g = Graph::from_edges(4, &[(3, 0), (1, 0), (2, 0), (1, 0)]).unwrap();
        assert_eq!(g.parents(0), &[3, 1, 2, 1]);
        assert_eq!(g.children(1), &[0, 0]);
    }

    fn edge_lists() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
        (1usize..30).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..120)))
    }

    proptest! {
        #[test]
        fn degree_sums_and_adjacency_agree((n, edges) in edge_lists()) {
            let g = Graph::from_edges(n, &edges).unwrap();
            let m = edges.len();
            prop_assert_eq!((0..n).map(|v| g.out_degree(v)).sum::<usize>(), m);
            prop_assert_eq!((0..n).map(|v| g.in_degree(v)).sum::<usize>(), m);
            // multiplicity of (u, v) among children of u == multiplicity of u among parents of v
            for u in 0..n {
                for v in 0..n {
                    let fwd = g.children(u).iter().filter(|&&x| x as usize == v).count();
                    let bwd = g.parents(v).iter().filter(|&&x| x as usize == u).count();
                    prop_assert_eq!(fwd, bwd);
                }
            }
            prop_assert_eq!(Graph::from_edges(n, &edges).unwrap(), g);
        }
    }
}
