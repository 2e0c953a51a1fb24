//! Serializable views of library results.

use std::collections::BTreeMap;
use std::ops::Range;

use backpush::bippr::{ConvergedBy, Estimate, PhaseCost};
use backpush::detect::{DetectionResult, Variant};
use backpush::hard::HardInstanceMeta;
use backpush::push::PushResult;
use backpush::{QueryStats, SparseMap};
use serde::Serialize;

/// Bumped whenever a [`BenchRecord`] column is added, removed or renamed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounts {
    pub n_indeg: u64,
    pub n_outdeg: u64,
    pub n_parent: u64,
    pub n_child: u64,
    pub n_jump: u64,
    pub local_total: u64,
}

impl From<QueryStats> for QueryCounts {
    fn from(s: QueryStats) -> Self {
        QueryCounts {
            n_indeg: s.n_indeg,
            n_outdeg: s.n_outdeg,
            n_parent: s.n_parent,
            n_child: s.n_child,
            n_jump: s.n_jump,
            local_total: s.local_total(),
        }
    }
}

fn sorted(map: &SparseMap<f64>) -> BTreeMap<usize, f64> {
    map.iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PushReport {
    pub target: usize,
    pub alpha: f64,
    pub epsilon: f64,
    pub reserves: BTreeMap<usize, f64>,
    pub residues: BTreeMap<usize, f64>,
    pub pushbacks: u64,
    pub queries: QueryCounts,
}

impl From<&PushResult> for PushReport {
    fn from(r: &PushResult) -> Self {
        PushReport {
            target: r.target,
            alpha: r.alpha,
            epsilon: r.epsilon,
            reserves: sorted(&r.reserves),
            residues: sorted(&r.residues),
            pushbacks: r.pushbacks,
            queries: r.stats.into(),
        }
    }
}

pub fn converged_by_name(c: ConvergedBy) -> &'static str {
    match c {
        ConvergedBy::Fixed => "fixed",
        ConvergedBy::AdaptiveCertified => "adaptive_certified",
        ConvergedBy::FullExploration => "full_exploration",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub value: f64,
    pub eps: f64,
    pub n_r: u64,
    pub trials: u32,
    pub floor: f64,
    pub queries: QueryCounts,
    pub converged_by: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub push_queries: Option<QueryCounts>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walk_queries: Option<QueryCounts>,
}

impl EstimateReport {
    pub fn new(e: &Estimate, cost: Option<&PhaseCost>) -> Self {
        EstimateReport {
            value: e.value,
            eps: e.eps,
            n_r: e.n_r,
            trials: e.trials,
            floor: e.floor,
            queries: e.queries.into(),
            converged_by: converged_by_name(e.converged_by),
            rounds: cost.map(|c| c.rounds),
            push_queries: cost.map(|c| c.push.into()),
            walk_queries: cost.map(|c| c.walk.into()),
        }
    }
}

pub fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Indeg => "indeg",
        Variant::Outdeg => "outdeg",
        Variant::SqrtM => "sqrt_m",
        Variant::Combined => "combined",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsEntry {
    pub eps: f64,
    pub t_indeg: f64,
    pub t_outdeg: f64,
    pub t_sqrt_m: f64,
    pub pushbacks: u64,
    pub completed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub nodes: Vec<usize>,
    pub final_eps: f64,
    pub variant: &'static str,
    pub stopped_by: Option<&'static str>,
    pub fallback: bool,
    pub t_eps_history: Vec<EpsEntry>,
    pub queries: QueryCounts,
}

impl From<&DetectionResult> for DetectionReport {
    fn from(r: &DetectionResult) -> Self {
        DetectionReport {
            nodes: r.nodes.clone(),
            final_eps: r.final_eps,
            variant: variant_name(r.variant),
            stopped_by: r.stopped_by.map(variant_name),
            fallback: r.fallback,
            t_eps_history: r
                .history
                .iter()
                .map(|run| EpsEntry {
                    eps: run.eps,
                    t_indeg: run.t_eps.indeg,
                    t_outdeg: run.t_eps.outdeg,
                    t_sqrt_m: run.t_eps.sqrt_m,
                    pushbacks: run.pushbacks,
                    completed: run.completed,
                })
                .collect(),
            queries: r.stats.into(),
        }
    }
}

/// Half-open id range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdRange {
    pub start: usize,
    pub end: usize,
}

impl From<&Range<usize>> for IdRange {
    fn from(r: &Range<usize>) -> Self {
        IdRange { start: r.start, end: r.end }
    }
}

/// Sidecar metadata written next to a generated edge list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaReport {
    pub family: &'static str,
    pub nodes: usize,
    pub edges: usize,
    pub t: usize,
    pub u: IdRange,
    pub v: IdRange,
    pub w: IdRange,
    pub x: IdRange,
    pub y: IdRange,
    pub tree_v: Vec<IdRange>,
    pub tree_y: Vec<IdRange>,
    pub filler: IdRange,
    pub u_star: Option<usize>,
    pub v_star: Option<usize>,
    pub d: usize,
    pub p: usize,
    pub i: usize,
    pub y_parents: usize,
    pub arity: Option<usize>,
    pub levels_v: usize,
    pub levels_y: usize,
    pub n_budget: usize,
    pub m_budget: usize,
    pub max_in: usize,
    pub max_out: usize,
    pub alpha: f64,
    pub exponent: Option<f64>,
    pub delta: Option<f64>,
    pub kappa: Option<f64>,
}

impl MetaReport {
    pub fn new(family: &'static str, nodes: usize, edges: usize, m: &HardInstanceMeta) -> Self {
        MetaReport {
            family,
            nodes,
            edges,
            t: m.t,
            u: (&m.u).into(),
            v: (&m.v).into(),
            w: (&m.w).into(),
            x: (&m.x).into(),
            y: (&m.y).into(),
            tree_v: m.tree_v.iter().map(IdRange::from).collect(),
            tree_y: m.tree_y.iter().map(IdRange::from).collect(),
            filler: (&m.filler).into(),
            u_star: m.u_star,
            v_star: m.v_star,
            d: m.d,
            p: m.p,
            i: m.i,
            y_parents: m.y_parents,
            arity: m.arity,
            levels_v: m.levels_v,
            levels_y: m.levels_y,
            n_budget: m.n_budget,
            m_budget: m.m_budget,
            max_in: m.max_in,
            max_out: m.max_out,
            alpha: m.alpha,
            exponent: m.exponent,
            delta: m.delta,
            kappa: m.kappa,
        }
    }
}

/// One row of machine-readable output: the full parameter set needed to
/// rerun the command, its result and its cost.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchRecord {
    pub schema_version: u32,
    pub command: String,
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub target: Option<usize>,
    pub alpha: f64,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub c: Option<f64>,
    pub p_f: Option<f64>,
    pub seed: u64,
    pub variant: Option<String>,
    pub method: Option<String>,
    pub order: Option<String>,
    pub driven: Option<String>,
    pub driven_value: Option<f64>,
    pub value: Option<f64>,
    pub set_size: Option<usize>,
    pub pushbacks: Option<u64>,
    pub n_indeg: u64,
    pub n_outdeg: u64,
    pub n_parent: u64,
    pub n_child: u64,
    pub n_jump: u64,
    pub local_total: u64,
    pub total: u64,
    pub wall_ms: f64,
    pub truth: Option<f64>,
    pub npi: Option<f64>,
    pub rel_error: Option<f64>,
    pub max_error: Option<f64>,
    pub invariant_residual: Option<f64>,
    pub superset: Option<bool>,
    pub bound_ok: Option<bool>,
}

impl BenchRecord {
    pub fn new(command: &str, graph: String, n: usize, m: usize, alpha: f64, seed: u64) -> Self {
        BenchRecord {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            graph,
            n,
            m,
            alpha,
            seed,
            ..Default::default()
        }
    }

    pub fn set_queries(&mut self, s: QueryStats) {
        self.n_indeg = s.n_indeg;
        self.n_outdeg = s.n_outdeg;
        self.n_parent = s.n_parent;
        self.n_child = s.n_child;
        self.n_jump = s.n_jump;
        self.local_total = s.local_total();
        self.total = s.total();
    }

    /// False when a `--verify` comparison failed.
    pub fn verified(&self) -> bool {
        self.superset != Some(false) && self.bound_ok != Some(false)
    }
}

/// Writes records as CSV with a header row.
pub fn write_csv<W: std::io::Write>(records: &[BenchRecord], mut out: W) -> Result<(), csv::Error> {
    if records.is_empty() {
        writeln!(out, "{}", csv_header())?;
        return Ok(());
    }
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Header row of the CSV output.
pub fn csv_header() -> String {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.serialize(BenchRecord::default()).expect("in-memory write");
    }
    String::from_utf8(buf).expect("ascii header").lines().next().unwrap_or_default().to_string()
}
