//! Bidirectional single-node PageRank (BiPPR).
//!
//! A backward push from `t` to threshold `ε` leaves reserves `p` and
//! residues `r`. With `χ_v` the indicator that a [`sample_node`] walk ends at
//! `v`, the estimator
//!
//! ```text
//! q(t) = (1/n)·Σ_v p(v) + Σ_v χ_v·r(v)
//! ```
//!
//! is unbiased for `π(t)` and, since every `r(v) ≤ ε`, has variance at most
//! `ε·π(t)`. Averaging `n_r` walks divides the variance by `n_r`; with
//! `n_r ≥ 3ε/(c²π(t))` the average is within `(1 ± c)·π(t)` with
//! probability at least 2/3.
//!
//! [`bippr_adaptive`] needs neither `π(t)` nor the graph parameters. It
//! works on a query budget `B` that doubles each round. In a round, half of
//! `B` goes to backward pushes with `ε = 1, 1/2, 1/4, …` (a run that would
//! overspend is abandoned and the last finished run kept) and the rest to
//! walks. The round certifies once `n_r·π̂(t) ≥ K·ε/c²`. For `p_f < 1/3` the
//! walk phase is repeated `⌈8·ln(1/p_f)⌉` times and the median taken.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::Error;
use crate::exact;
use crate::graph::{Graph, NodeId};
use crate::oracle::{Oracle, QueryStats};
use crate::push::{approx_contributions, BackwardPush, PushOrder, PushResult};
use crate::sparse::SparseMap;
use crate::walk::{sample_node, stream_rng, WalkConfig};

/// How an estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvergedBy {
    /// Fixed parameters; no accuracy certificate.
    Fixed,
    /// The adaptive stopping rule fired.
    AdaptiveCertified,
    /// The budget passed the whole-graph cap and the graph was read in full.
    FullExploration,
}

/// A PageRank estimate with the configuration and cost that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub eps: f64,
    /// Walks per trial.
    pub n_r: u64,
    /// Median-trick repetitions of the walk phase.
    pub trials: u32,
    /// Deterministic part `(1/n)·Σ_v p(v)`; `value` never falls below it.
    pub floor: f64,
    /// Every query spent, across all rounds.
    pub queries: QueryStats,
    pub converged_by: ConvergedBy,
}

/// Cost split of the round that produced an adaptive estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseCost {
    pub push: QueryStats,
    pub walk: QueryStats,
    pub rounds: u32,
    pub budget: u64,
}

/// `q(t)` built from one push result: a constant floor plus the residue
/// of the walk's endpoint.
#[derive(Debug, Clone)]
pub struct BidirectionalEstimator<'a> {
    floor: f64,
    residues: &'a SparseMap<f64>,
}

impl<'a> BidirectionalEstimator<'a> {
    pub fn new(push: &'a PushResult, n: usize) -> Self {
        BidirectionalEstimator { floor: push.reserve_sum() / n as f64, residues: &push.residues }
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// One realisation of `q(t)` for a walk ending at `endpoint`.
    pub fn realize(&self, endpoint: NodeId) -> f64 {
        self.floor + self.residues.get(endpoint)
    }

    /// Average of `n_r` realisations.
    pub fn estimate<O: Oracle, R: Rng + ?Sized>(
        &self,
        oracle: &mut O,
        cfg: &WalkConfig,
        n_r: u64,
        rng: &mut R,
    ) -> Result<f64, Error> {
        let mut sum = 0.0;
        for _ in 0..n_r {
            sum += self.residues.get(sample_node(oracle, cfg, rng)?.node);
        }
        Ok(self.floor + sum / n_r as f64)
    }
}

/// BiPPR with fixed `ε` and `n_r`.
#[allow(clippy::too_many_arguments)]
pub fn bippr_fixed<O: Oracle, R: Rng + ?Sized>(
    oracle: &mut O,
    target: NodeId,
    alpha: f64,
    eps: f64,
    n_r: u64,
    order: PushOrder,
    rng: &mut R,
) -> Result<Estimate, Error> {
    if n_r == 0 {
        return Err(Error::Parameter("n_r must be at least 1"));
    }
    let cfg = WalkConfig::new(alpha)?;
    let start = oracle.stats();
    let push = approx_contributions(&mut *oracle, target, alpha, eps, order)?;
    let q = BidirectionalEstimator::new(&push, oracle.num_nodes());
    let value = q.estimate(oracle, &cfg, n_r, rng)?;
    Ok(Estimate {
        value,
        eps,
        n_r,
        trials: 1,
        floor: q.floor(),
        queries: oracle.stats() - start,
        converged_by: ConvergedBy::Fixed,
    })
}

/// Sample variance of single-walk `q(t)` against the bound `ε·π(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceCheck {
    pub mean: f64,
    pub var_hat: f64,
    pub bound: f64,
    pub samples: u64,
}

impl VarianceCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.var_hat <= self.bound * (1.0 + slack)
    }
}

/// Draws `samples` independent realisations of `q(t)`. `pi_t` is the true
/// PageRank of `target`, supplied by the caller from ground truth.
#[allow(clippy::too_many_arguments)]
pub fn empirical_variance_check<O: Oracle, R: Rng + ?Sized>(
    oracle: &mut O,
    target: NodeId,
    alpha: f64,
    eps: f64,
    samples: u64,
    pi_t: f64,
    rng: &mut R,
) -> Result<VarianceCheck, Error> {
    if samples < 2 {
        return Err(Error::Parameter("need at least two samples"));
    }
    let cfg = WalkConfig::new(alpha)?;
    let push = approx_contributions(&mut *oracle, target, alpha, eps, PushOrder::Fifo)?;
    let q = BidirectionalEstimator::new(&push, oracle.num_nodes());
    // Welford
    let (mut mean, mut m2) = (0.0, 0.0);
    for k in 1..=samples {
        let x = q.realize(sample_node(oracle, &cfg, rng)?.node);
        let delta = x - mean;
        mean += delta / k as f64;
        m2 += delta * (x - mean);
    }
    Ok(VarianceCheck { mean, var_hat: m2 / (samples - 1) as f64, bound: eps * pi_t, samples })
}

/// Knobs of [`bippr_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    /// Certification constant `K` in `n_r·π̂ ≥ K·ε/c²`.
    pub k_cert: f64,
    /// Query budget of the first round.
    pub initial_budget: u64,
    pub order: PushOrder,
    /// Whole-graph cost `n + m`. Once the budget passes it, the graph is read
    /// in full instead. `None` keeps doubling.
    pub work_cap: Option<u64>,
    /// Halving stops below this `ε`.
    pub min_eps: f64,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig {
            k_cert: 48.0,
            initial_budget: 64,
            order: PushOrder::Fifo,
            work_cap: None,
            min_eps: 1.0 / (1u64 << 60) as f64,
        }
    }
}

/// Median-trick repetition count for failure probability `p_f`.
pub fn median_trials(p_f: f64) -> u32 {
    if p_f >= 1.0 / 3.0 {
        1
    } else {
        libm::ceil(8.0 * libm::log(1.0 / p_f)) as u32
    }
}

/// Adaptive BiPPR: a `(1 ± c)` estimate of `π(t)` with probability at least
/// `1 - p_f`. Walk trial `k` of round `j` draws from
/// [`stream_rng`]`(seed, (j << 32) | k)`.
pub fn bippr_adaptive<O: Oracle>(
    oracle: &mut O,
    target: NodeId,
    alpha: f64,
    c: f64,
    p_f: f64,
    seed: u64,
    cfg: &AdaptiveConfig,
) -> Result<(Estimate, PhaseCost), Error> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Parameter("c must lie in (0, 1)"));
    }
    if !(p_f > 0.0 && p_f < 1.0) {
        return Err(Error::Parameter("p_f must lie in (0, 1)"));
    }
    if cfg.initial_budget == 0 {
        return Err(Error::Parameter("initial budget must be positive"));
    }
    let walk_cfg = WalkConfig::new(alpha)?;
    let n = oracle.num_nodes();
    if target >= n {
        return Err(Error::TargetOutOfRange { target, n });
    }
    let trials = median_trials(p_f);
    let start = oracle.stats();
    let mut budget = cfg.initial_budget;

    for round in 0u32.. {
        if cfg.work_cap.is_some_and(|cap| budget > cap) {
            let value = explore_whole_graph(oracle, target, alpha)?;
            let estimate = Estimate {
                value,
                eps: 0.0,
                n_r: 0,
                trials: 0,
                floor: value,
                queries: oracle.stats() - start,
                converged_by: ConvergedBy::FullExploration,
            };
            return Ok((estimate, PhaseCost { rounds: round + 1, budget, ..Default::default() }));
        }

        let push_start = oracle.stats();
        let (push, eps) = budgeted_push(&mut *oracle, target, alpha, budget / 2, cfg)?;
        let push_cost = oracle.stats() - push_start;
        let q = BidirectionalEstimator::new(&push, n);

        if push.is_exact() {
            let estimate = Estimate {
                value: q.floor(),
                eps,
                n_r: 0,
                trials: 0,
                floor: q.floor(),
                queries: oracle.stats() - start,
                converged_by: ConvergedBy::AdaptiveCertified,
            };
            let cost = PhaseCost { push: push_cost, walk: QueryStats::default(), rounds: round + 1, budget };
            return Ok((estimate, cost));
        }

        let walk_start = oracle.stats();
        let share = budget.saturating_sub(push_cost.total()) / u64::from(trials);
        let stream = |k: u32| stream_rng(seed, (u64::from(round) << 32) | u64::from(k));

        // Trial 0 spends its share and fixes n_r for the others.
        let mut rng = stream(0);
        let mut n_r = 0u64;
        let mut sum = 0.0;
        while (oracle.stats() - walk_start).total() < share {
            sum += push.residue(sample_node(oracle, &walk_cfg, &mut rng)?.node);
            n_r += 1;
        }
        if n_r > 0 {
            let mut values = Vec::with_capacity(trials as usize);
            values.push(q.floor() + sum / n_r as f64);
            for k in 1..trials {
                values.push(q.estimate(oracle, &walk_cfg, n_r, &mut stream(k))?);
            }
            values.sort_by(f64::total_cmp);
            let median = values[(values.len() - 1) / 2];
            if n_r as f64 * median >= cfg.k_cert * eps / (c * c) {
                let estimate = Estimate {
                    value: median,
                    eps,
                    n_r,
                    trials,
                    floor: q.floor(),
                    queries: oracle.stats() - start,
                    converged_by: ConvergedBy::AdaptiveCertified,
                };
                let cost = PhaseCost {
                    push: push_cost,
                    walk: oracle.stats() - walk_start,
                    rounds: round + 1,
                    budget,
                };
                return Ok((estimate, cost));
            }
        }
        budget = budget.saturating_mul(2);
    }
    unreachable!()
}

/// Backward pushes with `ε = 1, 1/2, …` from scratch until the next run
/// would push the phase past `budget` queries; returns the last finished
/// run and its `ε`.
fn budgeted_push<O: Oracle>(
    oracle: &mut O,
    target: NodeId,
    alpha: f64,
    budget: u64,
    cfg: &AdaptiveConfig,
) -> Result<(PushResult, f64), Error> {
    let phase_start = oracle.stats();
    let mut eps = 1.0;
    let mut last = approx_contributions(&mut *oracle, target, alpha, eps, cfg.order)?;
    'halving: while !last.is_exact() && eps / 2.0 >= cfg.min_eps {
        let mut run = BackwardPush::new(&mut *oracle, target, alpha, eps / 2.0, cfg.order)?;
        while run.step()?.is_some() {
            if (run.oracle().stats() - phase_start).total() > budget {
                break 'halving;
            }
        }
        last = run.into_result();
        eps /= 2.0;
    }
    Ok((last, eps))
}

/// Reads every node's out-edges through the oracle (`n + m` queries) and
/// solves PageRank on the copy.
fn explore_whole_graph<O: Oracle>(oracle: &mut O, target: NodeId, alpha: f64) -> Result<f64, Error> {
    let n = oracle.num_nodes();
    let mut edges = Vec::new();
    for v in 0..n {
        for i in 1..=oracle.outdeg(v)? {
            edges.push((v, oracle.child(v, i)?));
        }
    }
    let g = Graph::from_edges(n, &edges)?;
    Ok(exact::pagerank(&g, alpha, exact::DEFAULT_TOL)?.get(target))
}
