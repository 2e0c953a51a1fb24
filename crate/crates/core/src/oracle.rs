//! The arc-centric graph-access model.
//!
//! An [`Oracle`] answers five unit-cost queries: `indeg(v)`, `outdeg(v)`,
//! `parent(v, i)`, `child(v, i)` and `jump()`. The first four are *local*
//! queries; `jump` returns a uniformly random node and is the only *global*
//! query. Edge indices are 1-based. Every call is counted in the oracle's
//! own [`QueryStats`], including calls that fail.

use alloc::vec::Vec;
use core::ops::Sub;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::QueryError;
use crate::graph::{Graph, NodeId};
use crate::walk::stream_rng;

/// Per-kind query counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct QueryStats {
    pub n_indeg: u64,
    pub n_outdeg: u64,
    pub n_parent: u64,
    pub n_child: u64,
    pub n_jump: u64,
}

impl QueryStats {
    /// Local queries; `jump` is counted separately.
    pub fn local_total(&self) -> u64 {
        self.n_indeg + self.n_outdeg + self.n_parent + self.n_child
    }

    pub fn total(&self) -> u64 {
        self.local_total() + self.n_jump
    }
}

impl Sub for QueryStats {
    type Output = QueryStats;

    fn sub(self, earlier: QueryStats) -> QueryStats {
        QueryStats {
            n_indeg: self.n_indeg - earlier.n_indeg,
            n_outdeg: self.n_outdeg - earlier.n_outdeg,
            n_parent: self.n_parent - earlier.n_parent,
            n_child: self.n_child - earlier.n_child,
            n_jump: self.n_jump - earlier.n_jump,
        }
    }
}

pub trait Oracle {
    /// Number of nodes. Known to the caller; not a query.
    fn num_nodes(&self) -> usize;
    fn indeg(&mut self, v: NodeId) -> Result<usize, QueryError>;
    fn outdeg(&mut self, v: NodeId) -> Result<usize, QueryError>;
    /// The `i`-th parent of `v`, `1 <= i <= indeg(v)`.
    fn parent(&mut self, v: NodeId, i: usize) -> Result<NodeId, QueryError>;
    /// The `i`-th child of `v`, `1 <= i <= outdeg(v)`.
    fn child(&mut self, v: NodeId, i: usize) -> Result<NodeId, QueryError>;
    /// A uniformly random node drawn from `rng`.
    fn jump<R: Rng + ?Sized>(&mut self, rng: &mut R) -> NodeId;
    fn stats(&self) -> QueryStats;
    fn reset_stats(&mut self);
}

impl<O: Oracle + ?Sized> Oracle for &mut O {
    fn num_nodes(&self) -> usize {
        (**self).num_nodes()
    }
    fn indeg(&mut self, v: NodeId) -> Result<usize, QueryError> {
        (**self).indeg(v)
    }
    fn outdeg(&mut self, v: NodeId) -> Result<usize, QueryError> {
        (**self).outdeg(v)
    }
    fn parent(&mut self, v: NodeId, i: usize) -> Result<NodeId, QueryError> {
        (**self).parent(v, i)
    }
    fn child(&mut self, v: NodeId, i: usize) -> Result<NodeId, QueryError> {
        (**self).child(v, i)
    }
    fn jump<R: Rng + ?Sized>(&mut self, rng: &mut R) -> NodeId {
        (**self).jump(rng)
    }
    fn stats(&self) -> QueryStats {
        (**self).stats()
    }
    fn reset_stats(&mut self) {
        (**self).reset_stats()
    }
}

/// Counting oracle over a borrowed [`Graph`]. One instance per experiment;
/// many instances may share the graph.
#[derive(Debug, Clone)]
pub struct AccessOracle<'g> {
    graph: &'g Graph,
    stats: QueryStats,
}

impl<'g> AccessOracle<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        AccessOracle { graph, stats: QueryStats::default() }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    #[inline]
    fn check(&self, v: NodeId) -> Result<(), QueryError> {
        let n = self.graph.num_nodes();
        if v < n {
            Ok(())
        } else {
            Err(QueryError::NodeOutOfRange { node: v, n })
        }
    }
}

impl Oracle for AccessOracle<'_> {
    fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    #[inline]
    fn indeg(&mut self, v: NodeId) -> Result<usize, QueryError> {
        self.stats.n_indeg += 1;
        self.check(v)?;
        Ok(self.graph.in_degree(v))
    }

    #[inline]
    fn outdeg(&mut self, v: NodeId) -> Result<usize, QueryError> {
        self.stats.n_outdeg += 1;
        self.check(v)?;
        Ok(self.graph.out_degree(v))
    }

    #[inline]
    fn parent(&mut self, v: NodeId, i: usize) -> Result<NodeId, QueryError> {
        self.stats.n_parent += 1;
        self.check(v)?;
        let parents = self.graph.parents(v);
        match i.checked_sub(1).and_then(|j| parents.get(j)) {
            Some(&u) => Ok(u as NodeId),
            None => Err(QueryError::ParentIndex { node: v, index: i, degree: parents.len() }),
        }
    }

    #[inline]
    fn child(&mut self, v: NodeId, i: usize) -> Result<NodeId, QueryError> {
        self.stats.n_child += 1;
        self.check(v)?;
        let children = self.graph.children(v);
        match i.checked_sub(1).and_then(|j| children.get(j)) {
            Some(&w) => Ok(w as NodeId),
            None => Err(QueryError::ChildIndex { node: v, index: i, degree: children.len() }),
        }
    }

    #[inline]
    fn jump<R: Rng + ?Sized>(&mut self, rng: &mut R) -> NodeId {
        self.stats.n_jump += 1;
        rng.gen_range(0..self.graph.num_nodes())
    }

    fn stats(&self) -> QueryStats {
        self.stats
    }

    fn reset_stats(&mut self) {
        self.stats = QueryStats::default();
    }
}

/// Exposes a relabelled copy of a graph: label `x` stands for base node
/// `perm⁻¹(x)`, and every node the base returns is mapped through `perm`.
/// Adjacency order is that of the base graph.
#[derive(Debug, Clone)]
pub struct PermutedOracle<'g> {
    base: AccessOracle<'g>,
    to_label: Vec<u32>,
    to_base: Vec<u32>,
    seed: u64,
    stream: u64,
}

impl<'g> PermutedOracle<'g> {
    /// Permutation number `stream` derived from `seed`. Stream 0 is the
    /// identity; any other stream is a uniform shuffle drawn from
    /// [`stream_rng`]`(seed, stream)`.
    pub fn new(graph: &'g Graph, seed: u64, stream: u64) -> Self {
        let n = graph.num_nodes();
        let mut to_label: Vec<u32> = (0..n as u32).collect();
        if stream != 0 {
            to_label.shuffle(&mut stream_rng(seed, stream));
        }
        let mut to_base = alloc::vec![0u32; n];
        for (b, &l) in to_label.iter().enumerate() {
            to_base[l as usize] = b as u32;
        }
        PermutedOracle { base: AccessOracle::new(graph), to_label, to_base, seed, stream }
    }

    pub fn identity(graph: &'g Graph) -> Self {
        Self::new(graph, 0, 0)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Label under which base node `v` is exposed.
    #[inline]
    pub fn label_of(&self, v: NodeId) -> NodeId {
        self.to_label[v] as NodeId
    }

    /// Base node behind label `x`.
    #[inline]
    pub fn base_of(&self, x: NodeId) -> NodeId {
        self.to_base[x] as NodeId
    }

    pub fn is_identity(&self) -> bool {
        self.to_label.iter().enumerate().all(|(i, &l)| i == l as usize)
    }

    #[inline]
    fn to_base_checked(&self, x: NodeId) -> Result<NodeId, QueryError> {
        self.to_base
            .get(x)
            .map(|&b| b as NodeId)
            .ok_or(QueryError::NodeOutOfRange { node: x, n: self.to_base.len() })
    }

    fn relabel_error(&self, e: QueryError, x: NodeId) -> QueryError {
        match e {
            QueryError::ParentIndex { index, degree, .. } => QueryError::ParentIndex { node: x, index, degree },
            QueryError::ChildIndex { index, degree, .. } => QueryError::ChildIndex { node: x, index, degree },
            other => other,
        }
    }
}

impl Oracle for PermutedOracle<'_> {
    fn num_nodes(&self) -> usize {
        self.base.num_nodes()
    }

    fn indeg(&mut self, x: NodeId) -> Result<usize, QueryError> {
        match self.to_base_checked(x) {
            Ok(b) => self.base.indeg(b),
            Err(e) => {
                self.base.stats.n_indeg += 1;
                Err(e)
            }
        }
    }

    fn outdeg(&mut self, x: NodeId) -> Result<usize, QueryError> {
        match self.to_base_checked(x) {
            Ok(b) => self.base.outdeg(b),
            Err(e) => {
                self.base.stats.n_outdeg += 1;
                Err(e)
            }
        }
    }

    fn parent(&mut self, x: NodeId, i: usize) -> Result<NodeId, QueryError> {
        match self.to_base_checked(x) {
            Ok(b) => match self.base.parent(b, i) {
                Ok(u) => Ok(self.label_of(u)),
                Err(e) => Err(self.relabel_error(e, x)),
            },
            Err(e) => {
                self.base.stats.n_parent += 1;
                Err(e)
            }
        }
    }

    fn child(&mut self, x: NodeId, i: usize) -> Result<NodeId, QueryError> {
        match self.to_base_checked(x) {
            Ok(b) => match self.base.child(b, i) {
                Ok(w) => Ok(self.label_of(w)),
                Err(e) => Err(self.relabel_error(e, x)),
            },
            Err(e) => {
                self.base.stats.n_child += 1;
                Err(e)
            }
        }
    }

    fn jump<R: Rng + ?Sized>(&mut self, rng: &mut R) -> NodeId {
        let b = self.base.jump(rng);
        self.label_of(b)
    }

    fn stats(&self) -> QueryStats {
        self.base.stats()
    }

    fn reset_stats(&mut self) {
        self.base.reset_stats()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::SmallRng;
    use rand::SeedableRng;

    #[test]
    fn answers_and_counts() {
        let two_cycle = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let mut o = AccessOracle::new(&two_cycle);
        assert_eq!(o.stats(), QueryStats::default());
        assert_eq!(o.parent(0, 1), Ok(1));
        assert_eq!(o.stats(), QueryStats { n_parent: 1, ..Default::default() });
        assert_eq!(o.indeg(0), Ok(1));
        assert_eq!(o.outdeg(1), Ok(1));
        o.reset_stats();
        assert_eq!(o.stats(), QueryStats::default());

        let self_loop = Graph::from_edges(1, &[(0, 0)]).unwrap();
        let mut o = AccessOracle::new(&self_loop);
        assert_eq!(o.child(0, 1), Ok(0));
    }

    #[test]
    fn out_of_range_queries() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let mut o = AccessOracle::new(&g);
        assert_eq!(o.parent(0, 0), Err(QueryError::ParentIndex { node: 0, index: 0, degree: 1 }));
        assert_eq!(o.child(1, 2), Err(QueryError::ChildIndex { node: 1, index: 2, degree: 1 }));
        assert_eq!(o.indeg(5), Err(QueryError::NodeOutOfRange { node: 5, n: 2 }));
        assert_eq!(o.stats().local_total(), 3);
    }

    #[test]
    fn jump_is_uniform_on_two_cycle() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let mut o = AccessOracle::new(&g);
        let mut rng = SmallRng::seed_from_u64(11);
        let zeros = (0..10_000).filter(|_| o.jump(&mut rng) == 0).count();
        let freq = zeros as f64 / 10_000.0;
        assert!((0.45..=0.55).contains(&freq), "{freq}");
        assert_eq!(o.stats().n_jump, 10_000);
        assert_eq!(o.stats().local_total(), 0);
    }

    #[test]
    fn permuted_oracle_is_an_isomorphic_copy() {
        let edges = [(0, 1), (0, 2), (1, 2), (2, 0), (3, 3), (4, 0), (5, 4), (6, 5), (7, 6), (8, 7), (9, 8)];
        let g = Graph::from_edges(10, &edges).unwrap();
        assert!(PermutedOracle::identity(&g).is_identity());
        let mut p = PermutedOracle::new(&g, 7, 1);
        assert!(!p.is_identity());
        assert_ne!(PermutedOracle::new(&g, 7, 2).to_label, p.to_label);
        for v in 0..10 {
            let x = p.label_of(v);
            assert_eq!(p.base_of(x), v);
            assert_eq!(p.indeg(x).unwrap(), g.in_degree(v));
            assert_eq!(p.outdeg(x).unwrap(), g.out_degree(v));
            for (i, &c) in g.children(v).iter().enumerate() {
                assert_eq!(p.child(x, i + 1).unwrap(), p.label_of(c as usize));
            }
            for (i, &u) in g.parents(v).iter().enumerate() {
                assert_eq!(p.parent(x, i + 1).unwrap(), p.label_of(u as usize));
            }
        }
    }
}
