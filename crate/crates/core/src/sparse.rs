use alloc::vec::Vec;

use hashbrown::HashMap;
use rustc_hash::FxBuildHasher;

use crate::graph::NodeId;

/// Node-keyed map with an implicit default for absent keys.
///
/// Iteration follows first-insertion order, so runs are reproducible and
/// floating-point sums over the map do not depend on hashing.
#[derive(Debug, Clone, Default)]
pub struct SparseMap<V> {
    slots: HashMap<NodeId, usize, FxBuildHasher>,
    keys: Vec<NodeId>,
    values: Vec<V>,
}

impl<V: Copy + Default> SparseMap<V> {
    pub fn new() -> Self {
        SparseMap { slots: HashMap::with_hasher(FxBuildHasher), keys: Vec::new(), values: Vec::new() }
    }

    /// Value at `v`, or the default if `v` was never touched.
    #[inline]
    pub fn get(&self, v: NodeId) -> V {
        self.slots.get(&v).map_or_else(V::default, |&i| self.values[i])
    }

    #[inline]
    pub fn entry(&mut self, v: NodeId) -> &mut V {
        let next = self.keys.len();
        let i = *self.slots.entry(v).or_insert(next);
        if i == next {
            self.keys.push(v);
            self.values.push(V::default());
        }
        &mut self.values[i]
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.slots.contains_key(&v)
    }

    /// Number of touched nodes, including those whose value went back to the default.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, V)> + '_ {
        self.keys.iter().copied().zip(self.values.iter().copied())
    }

    pub fn values(&self) -> impl Iterator<Item = V> + '_ {
        self.values.iter().copied()
    }
}

impl SparseMap<f64> {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl SparseMap<u64> {
    pub fn sum(&self) -> u64 {
        self.values.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_and_order() {
        let mut m = SparseMap::<f64>::new();
        assert_eq!(m.get(7), 0.0);
        *m.entry(7) += 1.5;
        *m.entry(3) += 0.5;
        *m.entry(7) += 1.0;
        assert_eq!(m.get(7), 2.5);
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![(7, 2.5), (3, 0.5)]);
        assert_eq!(m.sum(), 3.0);
        assert!(m.contains(3) && !m.contains(4));
    }
}
