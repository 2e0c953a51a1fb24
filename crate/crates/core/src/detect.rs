//! δ-contributing set detection: all `v` with `π(v, t) ≥ δ·nπ(t)`.
//!
//! With `nπ(t)` known, a single push to `ε = δ·nπ(t)/2` suffices
//! ([`detect_known_npi`]). Without it, [`detect_adaptive`] pushes from
//! scratch with `ε = 1, 1/2, 1/4, …`, tracks a per-run quantity `T_ε`, and
//! stops once `Σ T_ε` would exceed `B/δ`, keeping the last finished run and
//! returning its nonzero reserves. The three `T_ε` choices bound the cost by
//! `Δ_in·ΣT`, `Δ_out·ΣT` and `√m·ΣT` respectively:
//!
//! - `Indeg`: `Σ_v SP(v)`
//! - `Outdeg`: `Σ_v RP(v)/d_out(v)`
//! - `SqrtM`: `(Σ_v SP(v))^½·(Σ_v SP(v)·g(v))^½`, `g(v) = Σ_{u→v} 1/d_out(u)`
//!
//! `Combined` tracks all three on the same runs and stops at the first one
//! to exhaust its budget.

use alloc::vec::Vec;

use crate::error::Error;
use crate::graph::NodeId;
use crate::oracle::{Oracle, QueryStats};
use crate::push::{approx_contributions, BackwardPush, PushOrder, PushResult};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Variant {
    Indeg,
    Outdeg,
    SqrtM,
    #[default]
    Combined,
}

impl Variant {
    pub const SINGLE: [Variant; 3] = [Variant::Indeg, Variant::Outdeg, Variant::SqrtM];

    fn index(self) -> usize {
        match self {
            Variant::Indeg => 0,
            Variant::Outdeg => 1,
            Variant::SqrtM => 2,
            Variant::Combined => usize::MAX,
        }
    }
}

/// `T_ε` of one run under each variant.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TEps {
    pub indeg: f64,
    pub outdeg: f64,
    pub sqrt_m: f64,
}

impl TEps {
    fn as_array(&self) -> [f64; 3] {
        [self.indeg, self.outdeg, self.sqrt_m]
    }

    pub fn get(&self, variant: Variant) -> Option<f64> {
        self.as_array().get(variant.index()).copied()
    }
}

/// One push run of the halving sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsRun {
    pub eps: f64,
    pub t_eps: TEps,
    pub pushbacks: u64,
    /// False for the run that was abandoned on budget.
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// Sorted node ids.
    pub nodes: Vec<NodeId>,
    pub final_eps: f64,
    pub history: Vec<EpsRun>,
    pub variant: Variant,
    /// The variant whose budget ended the halving, if one did.
    pub stopped_by: Option<Variant>,
    /// True when the work cap was hit and all ancestors of `t` were returned.
    pub fallback: bool,
    pub stats: QueryStats,
}

impl DetectionResult {
    pub fn contains(&self, v: NodeId) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }
}

fn check_delta(delta: f64) -> Result<(), Error> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter("delta must lie in (0, 1)"))
    }
}

/// One push at `ε = δ·npi/2`, keeping `{v : p(v) ≥ ε}`. The output contains
/// the δ-contributing set and lies inside the δ/2-contributing set.
pub fn detect_known_npi<O: Oracle>(
    oracle: &mut O,
    target: NodeId,
    alpha: f64,
    delta: f64,
    npi: f64,
    order: PushOrder,
) -> Result<DetectionResult, Error> {
    check_delta(delta)?;
    if !(npi > 0.0) {
        return Err(Error::Parameter("n·π(t) must be positive"));
    }
    let eps = delta * npi / 2.0;
    let push = approx_contributions(&mut *oracle, target, alpha, eps, order)?;
    let mut nodes: Vec<_> = push.reserves.iter().filter(|&(_, p)| p >= eps).map(|(v, _)| v).collect();
    nodes.sort_unstable();
    Ok(DetectionResult {
        nodes,
        final_eps: eps,
        history: Vec::new(),
        variant: Variant::Indeg,
        stopped_by: None,
        fallback: false,
        stats: push.stats,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectConfig {
    /// `B` in the `B/δ` budget on `Σ T_ε`. `None` means `4/(α(1-α))`.
    pub budget_const: Option<f64>,
    pub order: PushOrder,
    /// Local-query cap (typically `n + m`); past it, the ancestors of `t`
    /// are enumerated instead.
    pub work_cap: Option<u64>,
    pub min_eps: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig { budget_const: None, order: PushOrder::Fifo, work_cap: None, min_eps: 1.0 / (1u64 << 60) as f64 }
    }
}

/// The default budget constant `4/(α(1-α))`.
pub fn default_budget_const(alpha: f64) -> f64 {
    4.0 / (alpha * (1.0 - alpha))
}

/// Adaptive halving without knowledge of `nπ(t)`.
pub fn detect_adaptive<O: Oracle>(
    oracle: &mut O,
    target: NodeId,
    alpha: f64,
    delta: f64,
    variant: Variant,
    cfg: &DetectConfig,
) -> Result<DetectionResult, Error> {
    check_delta(delta)?;
    let limit = cfg.budget_const.unwrap_or_else(|| default_budget_const(alpha)) / delta;
    let start = oracle.stats();
    let governs = |k: usize| variant == Variant::Combined || variant.index() == k;

    let mut eps = 1.0;
    let mut last: PushResult = approx_contributions(&mut *oracle, target, alpha, eps, cfg.order)?;
    let mut history =
        alloc::vec![EpsRun { eps, t_eps: TEps::default(), pushbacks: last.pushbacks, completed: true }];
    let mut cumulative = [0.0f64; 3];
    let mut stopped_by = None;

    while !last.is_exact() && eps / 2.0 >= cfg.min_eps {
        let mut run = BackwardPush::new(&mut *oracle, target, alpha, eps / 2.0, cfg.order)?;
        let (mut sum_sp, mut sum_sp_g) = (0.0f64, 0.0f64);
        let mut t = [0.0f64; 3];
        let mut aborted = false;
        while let Some(ev) = run.step()? {
            sum_sp += 1.0;
            // Σ_v SP(v)·g(v) and Σ_v RP(v)/d_out(v) are the same sum,
            // regrouped by pushback instead of by receiver.
            sum_sp_g += ev.inv_outdeg_sum;
            t = [sum_sp, sum_sp_g, libm::sqrt(sum_sp * sum_sp_g)];
            if let Some(k) = (0..3).find(|&k| governs(k) && cumulative[k] + t[k] > limit) {
                stopped_by = Some(Variant::SINGLE[k]);
                aborted = true;
                break;
            }
            if cfg.work_cap.is_some_and(|cap| (run.oracle().stats() - start).local_total() > cap) {
                drop(run);
                return enumerate_ancestors(oracle, target, variant, eps, history, start);
            }
        }
        history.push(EpsRun {
            eps: eps / 2.0,
            t_eps: TEps { indeg: t[0], outdeg: t[1], sqrt_m: t[2] },
            pushbacks: run.pushbacks(),
            completed: !aborted,
        });
        for k in 0..3 {
            cumulative[k] += t[k];
        }
        if aborted {
            break;
        }
        last = run.into_result();
        eps /= 2.0;
    }

    let mut nodes: Vec<_> = last.reserves.iter().filter(|&(_, p)| p > 0.0).map(|(v, _)| v).collect();
    nodes.sort_unstable();
    Ok(DetectionResult {
        nodes,
        final_eps: eps,
        history,
        variant,
        stopped_by,
        fallback: false,
        stats: oracle.stats() - start,
    })
}

/// Reverse search from `t` through `indeg`/`parent` queries.
fn enumerate_ancestors<O: Oracle>(
    oracle: &mut O,
    target: NodeId,
    variant: Variant,
    eps: f64,
    history: Vec<EpsRun>,
    start: QueryStats,
) -> Result<DetectionResult, Error> {
    let mut seen = crate::sparse::SparseMap::<bool>::new();
    let mut stack = alloc::vec![target];
    *seen.entry(target) = true;
    while let Some(v) = stack.pop() {
        for i in 1..=oracle.indeg(v)? {
            let u = oracle.parent(v, i)?;
            let flag = seen.entry(u);
            if !*flag {
                *flag = true;
                stack.push(u);
            }
        }
    }
    let mut nodes: Vec<_> = seen.iter().map(|(v, _)| v).collect();
    nodes.sort_unstable();
    Ok(DetectionResult {
        nodes,
        final_eps: eps,
        history,
        variant,
        stopped_by: None,
        fallback: true,
        stats: oracle.stats() - start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::oracle::AccessOracle;

    #[test]
    fn known_npi_small_graphs() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let r = detect_known_npi(&mut AccessOracle::new(&g), 0, 0.2, 0.4, 1.0, PushOrder::Fifo).unwrap();
        assert_eq!(r.nodes, vec![0, 1]);
        assert_eq!(r.final_eps, 0.2);

        let g = Graph::from_edges(1, &[(0, 0)]).unwrap();
        let r = detect_known_npi(&mut AccessOracle::new(&g), 0, 0.2, 0.5, 1.0, PushOrder::Fifo).unwrap();
        assert_eq!(r.nodes, vec![0]);

        // true δ-set is empty (thresholds 1.782 / 0.891); output ⊆ {1}
        let g = Graph::from_edges(2, &[(0, 1), (1, 1)]).unwrap();
        let r = detect_known_npi(&mut AccessOracle::new(&g), 1, 0.2, 0.99, 1.8, PushOrder::Fifo).unwrap();
        assert!(r.nodes.iter().all(|&v| v == 1), "{:?}", r.nodes);
    }

    #[test]
    fn delta_must_be_in_unit_interval() {
        let g = Graph::from_edges(1, &[(0, 0)]).unwrap();
        let mut o = AccessOracle::new(&g);
        for d in [0.0, 1.0, -0.5] {
            assert!(detect_known_npi(&mut o, 0, 0.2, d, 1.0, PushOrder::Fifo).is_err());
            assert!(detect_adaptive(&mut o, 0, 0.2, d, Variant::Indeg, &DetectConfig::default()).is_err());
        }
    }

    #[test]
    fn adaptive_small_graphs() {
        let g = Graph::from_edges(1, &[(0, 0)]).unwrap();
        for v in [Variant::Indeg, Variant::Outdeg, Variant::SqrtM, Variant::Combined] {
            let r = detect_adaptive(&mut AccessOracle::new(&g), 0, 0.2, 0.5, v, &DetectConfig::default()).unwrap();
            assert_eq!(r.nodes, vec![0]);
        }
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let cfg = DetectConfig { budget_const: Some(16.0), ..Default::default() };
        let r = detect_adaptive(&mut AccessOracle::new(&g), 0, 0.2, 0.4, Variant::Indeg, &cfg).unwrap();
        assert_eq!(r.nodes, vec![0, 1]);
        assert!(r.history.iter().rev().skip(1).all(|run| run.completed));
    }

    #[test]
    fn parentless_target_terminates() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 1)]).unwrap();
        for v in [Variant::Indeg, Variant::Outdeg, Variant::SqrtM, Variant::Combined] {
            let r = detect_adaptive(&mut AccessOracle::new(&g), 0, 0.2, 0.01, v, &DetectConfig::default()).unwrap();
            assert_eq!(r.nodes, vec![0]);
        }
    }

    #[test]
    fn work_cap_falls_back_to_ancestors() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (3, 3), (2, 2)]).unwrap();
        let cfg = DetectConfig { work_cap: Some(3), ..Default::default() };
        let r = detect_adaptive(&mut AccessOracle::new(&g), 0, 0.2, 0.01, Variant::Indeg, &cfg).unwrap();
        assert!(r.fallback);
        assert_eq!(r.nodes, vec![0, 1, 2]);
    }
}
