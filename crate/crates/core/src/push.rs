//! Backward push (`ApproxContributions`).
//!
//! Starting from residue 1 at the target `t`, a pushback on `v` moves
//! `α·r(v)` into the reserve `p(v)` and spreads `(1-α)·r(v)/d_out(u)` to each
//! parent `u`, then zeroes `r(v)`. Pushbacks continue while some residue
//! exceeds `ε`. Throughout the run, for every source `s`,
//!
//! ```text
//! π(s, t) = p(s) + Σ_v π(s, v)·r(v)
//! ```
//!
//! so on return `π(v, t) - ε ≤ p(v) ≤ π(v, t)`.
//!
//! Each pushback on `v` costs one `indeg(v)` query plus one `parent` and one
//! `outdeg` query per incoming edge. `sp[v]` counts pushbacks on `v` and
//! `rp[u]` counts the times `u` received mass, so `rp[u] = Σ_{u→w} sp[w]`.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use crate::error::Error;
use crate::graph::NodeId;
use crate::oracle::{Oracle, QueryStats};
use crate::sparse::SparseMap;

/// Which over-threshold node to push next. All orders give the same
/// guarantees; results differ numerically.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum PushOrder {
    #[default]
    Fifo,
    Lifo,
    MaxResidue,
}

/// Outcome of one backward-push run.
#[derive(Debug, Clone)]
pub struct PushResult {
    pub target: NodeId,
    pub alpha: f64,
    pub epsilon: f64,
    pub reserves: SparseMap<f64>,
    pub residues: SparseMap<f64>,
    pub sp: SparseMap<u64>,
    pub rp: SparseMap<u64>,
    pub pushbacks: u64,
    pub stats: QueryStats,
}

impl PushResult {
    pub fn reserve(&self, v: NodeId) -> f64 {
        self.reserves.get(v)
    }

    pub fn residue(&self, v: NodeId) -> f64 {
        self.residues.get(v)
    }

    pub fn reserve_sum(&self) -> f64 {
        self.reserves.sum()
    }

    pub fn max_residue(&self) -> f64 {
        self.residues.values().fold(0.0, f64::max)
    }

    /// True when no residue is left, i.e. the reserves are exact.
    pub fn is_exact(&self) -> bool {
        self.residues.values().all(|r| r == 0.0)
    }
}

/// `Σ_v r(v)`.
pub fn residual_mass(result: &PushResult) -> f64 {
    result.residues.sum()
}

/// What a single pushback did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushEvent {
    pub node: NodeId,
    /// `d_in(node)`: the number of parents that received mass.
    pub parents: usize,
    /// `Σ_{u ∈ N_in(node)} 1/d_out(u)`, read off the queries the pushback
    /// already made.
    pub inv_outdeg_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapEntry {
    residue: f64,
    node: Reverse<NodeId>,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.residue.total_cmp(&other.residue).then(self.node.cmp(&other.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
enum Worklist {
    Fifo(VecDeque<NodeId>),
    Lifo(Vec<NodeId>),
    MaxResidue(BinaryHeap<HeapEntry>),
}

/// Step-wise backward push. [`approx_contributions`] runs it to completion;
/// callers that need to watch or abort a run drive [`step`](Self::step)
/// themselves.
#[derive(Debug)]
pub struct BackwardPush<O> {
    oracle: O,
    target: NodeId,
    alpha: f64,
    epsilon: f64,
    reserves: SparseMap<f64>,
    residues: SparseMap<f64>,
    sp: SparseMap<u64>,
    rp: SparseMap<u64>,
    queued: SparseMap<bool>,
    worklist: Worklist,
    pushbacks: u64,
    start: QueryStats,
}

impl<O: Oracle> BackwardPush<O> {
    pub fn new(oracle: O, target: NodeId, alpha: f64, epsilon: f64, order: PushOrder) -> Result<Self, Error> {
        crate::check_alpha(alpha)?;
        if !(epsilon > 0.0) {
            return Err(Error::Parameter("epsilon must be positive"));
        }
        let n = oracle.num_nodes();
        if target >= n {
            return Err(Error::TargetOutOfRange { target, n });
        }
        let start = oracle.stats();
        let worklist = match order {
            PushOrder::Fifo => Worklist::Fifo(VecDeque::new()),
            PushOrder::Lifo => Worklist::Lifo(Vec::new()),
            PushOrder::MaxResidue => Worklist::MaxResidue(BinaryHeap::new()),
        };
        let mut push = BackwardPush {
            oracle,
            target,
            alpha,
            epsilon,
            reserves: SparseMap::new(),
            residues: SparseMap::new(),
            sp: SparseMap::new(),
            rp: SparseMap::new(),
            queued: SparseMap::new(),
            worklist,
            pushbacks: 0,
            start,
        };
        *push.residues.entry(target) = 1.0;
        push.enqueue(target, 1.0);
        Ok(push)
    }

    #[inline]
    fn enqueue(&mut self, v: NodeId, residue: f64) {
        if residue <= self.epsilon {
            return;
        }
        match &mut self.worklist {
            Worklist::Fifo(q) => {
                let flag = self.queued.entry(v);
                if !*flag {
                    *flag = true;
                    q.push_back(v);
                }
            }
            Worklist::Lifo(s) => {
                let flag = self.queued.entry(v);
                if !*flag {
                    *flag = true;
                    s.push(v);
                }
            }
            Worklist::MaxResidue(h) => h.push(HeapEntry { residue, node: Reverse(v) }),
        }
    }

    fn next_node(&mut self) -> Option<NodeId> {
        loop {
            let v = match &mut self.worklist {
                Worklist::Fifo(q) => q.pop_front()?,
                Worklist::Lifo(s) => s.pop()?,
                Worklist::MaxResidue(h) => {
                    let e = h.pop()?;
                    // stale heap entries carry an outdated residue
                    if e.residue != self.residues.get(e.node.0) {
                        continue;
                    }
                    e.node.0
                }
            };
            if let Worklist::Fifo(_) | Worklist::Lifo(_) = self.worklist {
                *self.queued.entry(v) = false;
            }
            if self.residues.get(v) > self.epsilon {
                return Some(v);
            }
        }
    }

    /// Performs one pushback, or returns `None` once every residue is at
    /// most `ε`.
    pub fn step(&mut self) -> Result<Option<PushEvent>, Error> {
        let Some(v) = self.next_node() else {
            return Ok(None);
        };
        let r = self.residues.get(v);
        *self.reserves.entry(v) += self.alpha * r;
        *self.residues.entry(v) = 0.0;
        *self.sp.entry(v) += 1;
        self.pushbacks += 1;

        let indeg = self.oracle.indeg(v)?;
        let mut inv_outdeg_sum = 0.0;
        for i in 1..=indeg {
            let u = self.oracle.parent(v, i)?;
            let d = self.oracle.outdeg(u)?;
            let ru = self.residues.entry(u);
            *ru += (1.0 - self.alpha) * r / d as f64;
            let ru = *ru;
            *self.rp.entry(u) += 1;
            inv_outdeg_sum += 1.0 / d as f64;
            self.enqueue(u, ru);
        }
        Ok(Some(PushEvent { node: v, parents: indeg, inv_outdeg_sum }))
    }

    /// Runs until no residue exceeds `ε`.
    pub fn run(&mut self) -> Result<(), Error> {
        while self.step()?.is_some() {}
        Ok(())
    }

    pub fn pushbacks(&self) -> u64 {
        self.pushbacks
    }

    pub fn reserves(&self) -> &SparseMap<f64> {
        &self.reserves
    }

    pub fn residues(&self) -> &SparseMap<f64> {
        &self.residues
    }

    pub fn sp(&self) -> &SparseMap<u64> {
        &self.sp
    }

    pub fn rp(&self) -> &SparseMap<u64> {
        &self.rp
    }

    /// Queries spent by this run so far.
    pub fn stats(&self) -> QueryStats {
        self.oracle.stats() - self.start
    }

    pub fn oracle(&self) -> &O {
        &self.oracle
    }

    /// Snapshot of the current state. Only a finished run carries the
    /// residue guarantee.
    pub fn result(&self) -> PushResult {
        PushResult {
            target: self.target,
            alpha: self.alpha,
            epsilon: self.epsilon,
            reserves: self.reserves.clone(),
            residues: self.residues.clone(),
            sp: self.sp.clone(),
            rp: self.rp.clone(),
            pushbacks: self.pushbacks,
            stats: self.stats(),
        }
    }

    pub fn into_result(self) -> PushResult {
        let stats = self.stats();
        PushResult {
            target: self.target,
            alpha: self.alpha,
            epsilon: self.epsilon,
            reserves: self.reserves,
            residues: self.residues,
            sp: self.sp,
            rp: self.rp,
            pushbacks: self.pushbacks,
            stats,
        }
    }
}

/// Backward push from `target` down to residue threshold `epsilon`.
///
/// `epsilon >= 1` returns the initial state (`r(t) = 1`, no reserves)
/// without touching the oracle.
pub fn approx_contributions<O: Oracle>(
    oracle: O,
    target: NodeId,
    alpha: f64,
    epsilon: f64,
    order: PushOrder,
) -> Result<PushResult, Error> {
    let mut push = BackwardPush::new(oracle, target, alpha, epsilon, order)?;
    push.run()?;
    Ok(push.into_result())
}
