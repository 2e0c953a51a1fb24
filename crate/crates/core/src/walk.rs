//! α-discounted random walks (`SampleNode`) and plain Monte Carlo PageRank.
//!
//! A walk starts at `jump()` and, at every step, stops with probability `α`
//! or moves to a uniformly random child. Its endpoint is distributed as `π`.
//!
//! # Random streams
//!
//! Independent randomness is derived from one master seed with
//! [`stream_rng`]: stream `k` is ChaCha8 seeded with the master seed and
//! switched to stream number `k`. Callers that parallelise assign streams
//! by trial index, never by scheduling order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bippr::{ConvergedBy, Estimate};
use crate::error::Error;
use crate::graph::NodeId;
use crate::oracle::Oracle;

/// Independent RNG stream `stream` of master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Walk length at which the probability of a longer walk drops below 1e-15.
pub fn min_max_steps(alpha: f64) -> u64 {
    libm::ceil(libm::log(1e-15) / libm::log(1.0 - alpha)) as u64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub alpha: f64,
    /// Walks longer than this are discarded and restarted.
    pub max_steps: u64,
}

impl WalkConfig {
    pub fn new(alpha: f64) -> Result<Self, Error> {
        crate::check_alpha(alpha)?;
        Ok(WalkConfig { alpha, max_steps: min_max_steps(alpha) })
    }

    pub fn with_max_steps(alpha: f64, max_steps: u64) -> Result<Self, Error> {
        crate::check_alpha(alpha)?;
        if max_steps < min_max_steps(alpha) {
            return Err(Error::Parameter("max_steps leaves truncation probability above 1e-15"));
        }
        Ok(WalkConfig { alpha, max_steps })
    }
}

/// Endpoint of one walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    pub node: NodeId,
    /// Length of the walk that produced `node`.
    pub steps: u64,
    /// Walks discarded for exceeding `max_steps` before this one.
    pub restarts: u32,
}

/// Draws a node with probability `π(v)`.
pub fn sample_node<O: Oracle, R: Rng + ?Sized>(
    oracle: &mut O,
    cfg: &WalkConfig,
    rng: &mut R,
) -> Result<Sample, Error> {
    let mut restarts = 0;
    loop {
        let mut v = oracle.jump(rng);
        let mut steps = 0;
        while steps < cfg.max_steps {
            if rng.gen_bool(cfg.alpha) {
                return Ok(Sample { node: v, steps, restarts });
            }
            let d = oracle.outdeg(v)?;
            if d == 0 {
                return Err(Error::Parameter("walk reached a node with zero out-degree"));
            }
            v = oracle.child(v, rng.gen_range(1..=d))?;
            steps += 1;
        }
        restarts += 1;
    }
}

/// Fraction of `n_samples` walks that end at `target`.
pub fn mc_pagerank<O: Oracle, R: Rng + ?Sized>(
    oracle: &mut O,
    target: NodeId,
    cfg: &WalkConfig,
    n_samples: u64,
    rng: &mut R,
) -> Result<Estimate, Error> {
    if n_samples == 0 {
        return Err(Error::Parameter("n_samples must be at least 1"));
    }
    let n = oracle.num_nodes();
    if target >= n {
        return Err(Error::TargetOutOfRange { target, n });
    }
    let start = oracle.stats();
    let mut hits = 0u64;
    for _ in 0..n_samples {
        if sample_node(oracle, cfg, rng)?.node == target {
            hits += 1;
        }
    }
    Ok(Estimate {
        value: hits as f64 / n_samples as f64,
        eps: 1.0,
        n_r: n_samples,
        trials: 1,
        floor: 0.0,
        queries: oracle.stats() - start,
        converged_by: ConvergedBy::Fixed,
    })
}
