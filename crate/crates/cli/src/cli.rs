//! Argument parsing and subcommand execution.
//!
//! [`run`] never exits the process; it returns the exit code (0 success,
//! 1 runtime failure or failed `--verify`, 2 usage error) so it can be
//! driven from tests.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use backpush::bippr::{bippr_adaptive, bippr_fixed, AdaptiveConfig};
use backpush::detect::{detect_adaptive, detect_known_npi, DetectConfig, Variant};
use backpush::exact::{self, DEFAULT_TOL};
use backpush::graph::DanglingPolicy;
use backpush::hard::{
    attach_delta, family_separation, gen_contribution_hard, gen_pagerank_hard, ContribParams, PagerankParams,
};
use backpush::push::{approx_contributions, PushOrder};
use backpush::walk::{mc_pagerank, stream_rng, WalkConfig};
use backpush::{AccessOracle, Graph, NodeId};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bench::{self, contrib_descriptor, family_descriptor, order_name, NSweepConfig, Sweep};
use crate::edgelist::{read_edge_list, write_edge_list, LoadError};
use crate::report::{variant_name, write_csv, BenchRecord, DetectionReport, EstimateReport, MetaReport, PushReport};

#[derive(Debug, Parser)]
#[command(name = "backpush", version, about = "Local PageRank contributions and single-node PageRank estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate the contribution vector of a target, or detect its contributing set.
    Contributions(ContributionsArgs),
    /// Estimate the PageRank of a single node.
    Pagerank(PagerankArgs),
    /// Sweep a parameter on generated hard instances and fit the cost slope.
    BenchScaling(BenchArgs),
    /// Write a generated hard instance as an edge list.
    Generate(GenerateArgs),
    /// Ground-truth PageRank, or contributions to `--t`, by power iteration.
    Exact(ExactArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Contrib,
    PrFamily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Indeg,
    Outdeg,
    Sqrtm,
    Combined,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Indeg => Variant::Indeg,
            VariantArg::Outdeg => Variant::Outdeg,
            VariantArg::Sqrtm => Variant::SqrtM,
            VariantArg::Combined => Variant::Combined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Fifo,
    Lifo,
    MaxResidue,
}

impl From<OrderArg> for PushOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Fifo => PushOrder::Fifo,
            OrderArg::Lifo => PushOrder::Lifo,
            OrderArg::MaxResidue => PushOrder::MaxResidue,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DanglingArg {
    SelfLoops,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Mc,
    Bippr,
    BipprAdaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Eps,
    D,
    N,
}

/// Hard-instance generator parameters.
#[derive(Debug, Clone, Args)]
pub struct GenParams {
    /// Node budget.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Edge budget; defaults to `d·max(d, vsize)`.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    #[arg(long, default_value_t = 16)]
    pub vsize: usize,
    /// Family size (`pr-family`).
    #[arg(long, default_value_t = 4)]
    pub p: usize,
    /// Family member; defaults to `p`.
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub arity: usize,
    /// Replace the direct `V → t` edges by a reversed `arity`-ary tree.
    #[arg(long)]
    pub multilevel: bool,
    /// `|Y| = y_factor·|V|` in the direct PageRank family.
    #[arg(long, default_value_t = 4)]
    pub y_factor: usize,
}

impl GenParams {
    pub fn contrib(&self, alpha: f64) -> ContribParams {
        let m = self.m.unwrap_or(self.d * self.d.max(self.vsize));
        let p = ContribParams::new(self.n, m, self.d, self.vsize).alpha(alpha);
        if self.multilevel {
            p.multi_level(self.arity)
        } else {
            p
        }
    }

    pub fn family(&self, alpha: f64) -> PagerankParams {
        PagerankParams { base: self.contrib(alpha), p: self.p, i: self.i.unwrap_or(self.p), y_factor: self.y_factor }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GraphSource {
    /// Edge-list file.
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub graph: Option<PathBuf>,
    /// Generate a hard instance instead of reading a file.
    #[arg(long, value_enum)]
    pub gen: Option<GenKind>,
    #[command(flatten)]
    pub params: GenParams,
    /// Treatment of nodes without out-edges in a loaded file.
    #[arg(long, value_enum, default_value = "self-loops")]
    pub dangling: DanglingArg,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Restart probability.
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Compare against ground truth; a failed check exits with 1.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ContributionsArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    pub common: Common,
    /// Target node.
    #[arg(long)]
    pub t: NodeId,
    /// Residue threshold of a single push.
    #[arg(long, required_unless_present = "detect")]
    pub eps: Option<f64>,
    /// Detect the δ-contributing set instead of a single push.
    #[arg(long, requires = "delta")]
    pub detect: bool,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Known `n·π(t)`; detection then runs a single push.
    #[arg(long, requires = "detect")]
    pub npi: Option<f64>,
    #[arg(long, value_enum, default_value = "combined")]
    pub variant: VariantArg,
    /// Budget constant `B`; defaults to `4/(α(1-α))`.
    #[arg(long)]
    pub budget_const: Option<f64>,
    #[arg(long, value_enum, default_value = "fifo")]
    pub order: OrderArg,
}

#[derive(Debug, Clone, Args)]
pub struct PagerankArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub t: NodeId,
    #[arg(long, value_enum, default_value = "bippr-adaptive")]
    pub method: Method,
    /// Walks for `mc`.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Push threshold for `bippr`.
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Walks for `bippr`.
    #[arg(long, default_value_t = 1000)]
    pub nr: u64,
    /// Relative accuracy for `bippr-adaptive`.
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    /// Failure probability for `bippr-adaptive`.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub pf: f64,
    /// Certification constant `K` of `bippr-adaptive`.
    #[arg(long, default_value_t = 48.0)]
    pub k_cert: f64,
    #[arg(long, value_enum, default_value = "fifo")]
    pub order: OrderArg,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub sweep: SweepKind,
    /// Comma-separated driven values; each sweep has its own default grid.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    #[command(flatten)]
    pub params: GenParams,
    #[command(flatten)]
    pub common: Common,
    /// δ for the `d` sweep; defaults to each instance's attached δ.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value = "combined")]
    pub variant: VariantArg,
    #[arg(long)]
    pub budget_const: Option<f64>,
    #[arg(long, default_value_t = 0.25)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub pf: f64,
    /// Seeds per point of the `n` sweep.
    #[arg(long, default_value_t = 60)]
    pub runs: u64,
    #[arg(long, value_enum, default_value = "fifo")]
    pub order: OrderArg,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub gen: GenKind,
    #[command(flatten)]
    pub params: GenParams,
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    /// Output edge list; metadata goes to `<out>.meta.json`. Without it the
    /// edge list is written to standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    /// Contributions to this node instead of PageRank.
    #[arg(long)]
    pub t: Option<NodeId>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Algo(#[from] backpush::Error),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Contributions(a) => cmd_contributions(a, out),
        Command::Pagerank(a) => cmd_pagerank(a, out),
        Command::BenchScaling(a) => cmd_bench(a, out, err),
        Command::Generate(a) => cmd_generate(a, out),
        Command::Exact(a) => cmd_exact(a, out),
    }
}

struct Loaded {
    graph: Graph,
    descriptor: String,
}

fn load(src: &GraphSource, alpha: f64) -> Result<Loaded, CliError> {
    if let Some(path) = &src.graph {
        let file = File::open(path).map_err(|e| LoadError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        let policy = match src.dangling {
            DanglingArg::SelfLoops => DanglingPolicy::AddSelfLoops,
            DanglingArg::Reject => DanglingPolicy::Reject,
        };
        let graph = read_edge_list(BufReader::new(file))?.validate_out_degrees(policy).map_err(LoadError::from)?;
        return Ok(Loaded { graph, descriptor: format!("file:{}", path.display()) });
    }
    match src.gen {
        Some(GenKind::Contrib) => {
            let p = src.params.contrib(alpha);
            let (graph, _) = gen_contribution_hard(&p)?;
            Ok(Loaded { graph, descriptor: contrib_descriptor(&p) })
        }
        Some(GenKind::PrFamily) => {
            let p = src.params.family(alpha);
            let (graph, _) = gen_pagerank_hard(&p)?;
            Ok(Loaded { graph, descriptor: family_descriptor(&p) })
        }
        None => Err(CliError::Usage("one of --graph or --gen is required".into())),
    }
}

fn check_target(g: &Graph, t: NodeId) -> Result<(), CliError> {
    if t >= g.num_nodes() {
        return Err(CliError::Usage(format!("--t {t} is out of range for a graph with {} nodes", g.num_nodes())));
    }
    Ok(())
}

fn record(command: &str, l: &Loaded, c: &Common, t: NodeId) -> BenchRecord {
    let mut r = BenchRecord::new(command, l.descriptor.clone(), l.graph.num_nodes(), l.graph.num_edges(), c.alpha, c.seed);
    r.target = Some(t);
    r
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    record: &'a BenchRecord,
    result: T,
}

fn emit<T: Serialize>(format: Format, rec: &BenchRecord, result: T, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &Report { record: rec, result })?;
            writeln!(out)?;
        }
        Format::Csv => write_csv(std::slice::from_ref(rec), &mut *out)?,
    }
    Ok(())
}

fn verdict(rec: &BenchRecord, what: &str) -> Result<(), CliError> {
    if rec.verified() {
        Ok(())
    } else {
        Err(CliError::Verify(what.into()))
    }
}

fn cmd_contributions(a: &ContributionsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let c = &a.common;
    let l = load(&a.source, c.alpha)?;
    check_target(&l.graph, a.t)?;
    let mut rec = record("contributions", &l, c, a.t);
    rec.order = Some(order_name(a.order.into()).into());
    let clock = Instant::now();
    if a.detect {
        let delta = a.delta.ok_or_else(|| CliError::Usage("--detect needs --delta".into()))?;
        let mut oracle = AccessOracle::new(&l.graph);
        let res = match a.npi {
            Some(npi) => detect_known_npi(&mut oracle, a.t, c.alpha, delta, npi, a.order.into())?,
            None => {
                let cfg = DetectConfig {
                    budget_const: a.budget_const,
                    order: a.order.into(),
                    work_cap: Some((l.graph.num_nodes() + l.graph.num_edges()) as u64),
                    ..DetectConfig::default()
                };
                detect_adaptive(&mut oracle, a.t, c.alpha, delta, a.variant.into(), &cfg)?
            }
        };
        rec.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
        rec.delta = Some(delta);
        rec.eps = Some(res.final_eps);
        rec.variant = Some(variant_name(res.variant).into());
        rec.set_size = Some(res.nodes.len());
        rec.pushbacks = Some(if res.history.is_empty() {
            0
        } else {
            res.history.iter().map(|h| h.pushbacks).sum()
        });
        rec.set_queries(res.stats);
        if c.verify {
            let truth = exact::contributions(&l.graph, a.t, c.alpha, DEFAULT_TOL)?;
            let npi: f64 = truth.values.iter().sum();
            rec.npi = Some(npi);
            rec.superset =
                Some((0..l.graph.num_nodes()).filter(|&v| truth.get(v) >= delta * npi).all(|v| res.contains(v)));
        }
        emit(c.format, &rec, DetectionReport::from(&res), out)?;
        verdict(&rec, "a δ-contributing node is missing from the output")
    } else {
        let eps = a.eps.ok_or_else(|| CliError::Usage("--eps is required without --detect".into()))?;
        let push = approx_contributions(AccessOracle::new(&l.graph), a.t, c.alpha, eps, a.order.into())?;
        rec.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
        rec.eps = Some(eps);
        rec.pushbacks = Some(push.pushbacks);
        rec.value = Some(push.reserve_sum());
        rec.set_queries(push.stats);
        if c.verify {
            let n = l.graph.num_nodes();
            let truth = exact::contributions(&l.graph, a.t, c.alpha, DEFAULT_TOL)?;
            let residues: Vec<f64> = (0..n).map(|v| push.residue(v)).collect();
            let through = exact::weighted_contributions(&l.graph, &residues, c.alpha, DEFAULT_TOL)?;
            let max_error = (0..n).map(|v| (truth.get(v) - push.reserve(v)).abs()).fold(0.0, f64::max);
            let residual = (0..n)
                .map(|v| (truth.get(v) - push.reserve(v) - through.get(v)).abs())
                .fold(0.0, f64::max);
            let npi: f64 = truth.values.iter().sum();
            rec.npi = Some(npi);
            rec.max_error = Some(max_error);
            rec.invariant_residual = Some(residual);
            rec.bound_ok = Some(
                max_error <= eps + 1e-9
                    && residual < 1e-9
                    && push.pushbacks as f64 <= npi / (c.alpha * eps) + 1.0 + 1e-9,
            );
        }
        emit(c.format, &rec, PushReport::from(&push), out)?;
        verdict(&rec, "error, invariant or pushback bound exceeded")
    }
}

fn cmd_pagerank(a: &PagerankArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let c = &a.common;
    let l = load(&a.source, c.alpha)?;
    check_target(&l.graph, a.t)?;
    let mut rec = record("pagerank", &l, c, a.t);
    let mut oracle = AccessOracle::new(&l.graph);
    let clock = Instant::now();
    let (est, cost) = match a.method {
        Method::Mc => {
            let cfg = WalkConfig::new(c.alpha)?;
            (mc_pagerank(&mut oracle, a.t, &cfg, a.samples, &mut stream_rng(c.seed, 0))?, None)
        }
        Method::Bippr => {
            let e = bippr_fixed(&mut oracle, a.t, c.alpha, a.eps, a.nr, a.order.into(), &mut stream_rng(c.seed, 0))?;
            (e, None)
        }
        Method::BipprAdaptive => {
            let cfg = AdaptiveConfig {
                k_cert: a.k_cert,
                order: a.order.into(),
                work_cap: Some((l.graph.num_nodes() + l.graph.num_edges()) as u64),
                ..AdaptiveConfig::default()
            };
            let (e, cost) = bippr_adaptive(&mut oracle, a.t, c.alpha, a.c, a.pf, c.seed, &cfg)?;
            rec.c = Some(a.c);
            rec.p_f = Some(a.pf);
            (e, Some(cost))
        }
    };
    rec.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    rec.method = Some(
        match a.method {
            Method::Mc => "mc",
            Method::Bippr => "bippr",
            Method::BipprAdaptive => "bippr-adaptive",
        }
        .into(),
    );
    if a.method != Method::Mc {
        rec.eps = Some(est.eps);
        rec.order = Some(order_name(a.order.into()).into());
    }
    rec.value = Some(est.value);
    rec.set_queries(est.queries);
    if c.verify {
        let truth = exact::pagerank(&l.graph, c.alpha, DEFAULT_TOL)?.get(a.t);
        let rel = (est.value - truth).abs() / truth;
        rec.truth = Some(truth);
        rec.rel_error = Some(rel);
        if a.method == Method::BipprAdaptive {
            rec.bound_ok = Some(rel <= a.c);
        }
    }
    emit(c.format, &rec, EstimateReport::new(&est, cost.as_ref()), out)?;
    verdict(&rec, "estimate outside the (1 ± c) window")
}

fn default_values(kind: SweepKind) -> Vec<f64> {
    match kind {
        SweepKind::Eps => (0..=7).map(|k| 1.0 / f64::from(1u32 << k)).collect(),
        SweepKind::D => vec![2.0, 4.0, 8.0, 16.0, 32.0],
        SweepKind::N => vec![1e3, 4e3, 1.6e4, 6.4e4],
    }
}

fn as_counts(values: &[f64], flag: &str) -> Result<Vec<usize>, CliError> {
    values
        .iter()
        .map(|&x| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(CliError::Usage(format!("{flag} values must be positive integers, got {x}")))
            }
        })
        .collect()
}

#[derive(Serialize)]
struct SweepPointOut {
    x: f64,
    cost: f64,
    pass_rate: f64,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    driven: &'a str,
    slope: Option<f64>,
    violations: usize,
    points: Vec<SweepPointOut>,
    records: &'a [BenchRecord],
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let c = &a.common;
    let values = a.values.clone().unwrap_or_else(|| default_values(a.sweep));
    let mut sweep: Sweep = match a.sweep {
        SweepKind::Eps => {
            if let Some(&bad) = values.iter().find(|&&e| e.is_nan() || e <= 0.0) {
                return Err(CliError::Usage(format!("--values for the eps sweep must be positive, got {bad}")));
            }
            bench::eps_sweep(&a.params.contrib(c.alpha), &values, a.order.into())?
        }
        SweepKind::D => {
            let ds = as_counts(&values, "--values")?;
            let cfg = DetectConfig { budget_const: a.budget_const, order: a.order.into(), ..DetectConfig::default() };
            bench::d_sweep(&a.params.contrib(c.alpha), &ds, a.variant.into(), a.delta, &cfg, c.verify)?
        }
        SweepKind::N => {
            let ns = as_counts(&values, "--values")?;
            let cfg = NSweepConfig {
                d: a.params.d,
                p: a.params.p,
                i: a.params.i.unwrap_or(a.params.p),
                y_factor: a.params.y_factor,
                alpha: c.alpha,
                c: a.c,
                p_f: a.pf,
                runs: a.runs,
                seed: c.seed,
                adaptive: AdaptiveConfig { order: a.order.into(), ..AdaptiveConfig::default() },
            };
            bench::n_sweep(&ns, &cfg)?
        }
    };
    for r in &mut sweep.records {
        if a.sweep != SweepKind::N {
            r.seed = c.seed;
        }
    }
    let violations = sweep.violations();
    match c.format {
        Format::Json => {
            let report = SweepReport {
                driven: sweep.driven,
                slope: sweep.slope,
                violations,
                points: sweep.points.iter().map(|p| SweepPointOut { x: p.x, cost: p.cost, pass_rate: p.pass_rate }).collect(),
                records: &sweep.records,
            };
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            write_csv(&sweep.records, &mut *out)?;
            match sweep.slope {
                Some(s) => writeln!(err, "log-log slope vs {}: {s:.4}", sweep.driven)?,
                None => writeln!(err, "log-log slope vs {}: undefined", sweep.driven)?,
            }
        }
    }
    if violations > 0 {
        return Err(CliError::Verify(format!("{violations} row(s) failed their check")));
    }
    Ok(())
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (graph, meta, family) = match a.gen {
        GenKind::Contrib => {
            let (g, mut meta) = gen_contribution_hard(&a.params.contrib(a.alpha))?;
            attach_delta(&g, &mut meta)?;
            (g, meta, "contrib")
        }
        GenKind::PrFamily => {
            let p = a.params.family(a.alpha);
            let (g, mut meta) = gen_pagerank_hard(&p)?;
            meta.kappa = Some(family_separation(&p)?.1);
            (g, meta, "pr-family")
        }
    };
    match &a.out {
        None => write_edge_list(&graph, &mut *out)?,
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_edge_list(&graph, &mut w)?;
            w.flush()?;
            let report = MetaReport::new(family, graph.num_nodes(), graph.num_edges(), &meta);
            let mut m = BufWriter::new(File::create(meta_path(path))?);
            serde_json::to_writer_pretty(&mut m, &report)?;
            writeln!(m)?;
            m.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ExactReport<'a> {
    kind: &'a str,
    target: Option<NodeId>,
    alpha: f64,
    iterations: usize,
    scores: &'a [f64],
}

fn cmd_exact(a: &ExactArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let l = load(&a.source, a.alpha)?;
    let scores = match a.t {
        Some(t) => {
            check_target(&l.graph, t)?;
            exact::contributions(&l.graph, t, a.alpha, a.tol)?
        }
        None => exact::pagerank(&l.graph, a.alpha, a.tol)?,
    };
    match a.format {
        Format::Json => {
            let kind = if a.t.is_some() { "contributions" } else { "pagerank" };
            let report =
                ExactReport { kind, target: a.t, alpha: a.alpha, iterations: scores.iterations, scores: &scores.values };
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["node", "score"])?;
            for (v, s) in scores.values.iter().enumerate() {
                w.write_record([v.to_string(), format!("{s:e}")])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("backpush").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["contributions", "--gen", "contrib", "--eps", "0.1"]).0, 2);
        assert_eq!(run_str(&["contributions", "--t", "0", "--eps", "0.1"]).0, 2);
        assert_eq!(run_str(&["pagerank", "--gen", "contrib", "--t", "0", "--method", "walk"]).0, 2);
        assert_eq!(run_str(&["contributions", "--gen", "contrib", "--t", "999999", "--eps", "0.1"]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn runtime_errors_exit_one() {
        let (code, _, err) = run_str(&["contributions", "--graph", "/nonexistent/g.el", "--t", "0", "--eps", "0.1"]);
        assert_eq!(code, 1);
        assert!(err.contains("/nonexistent/g.el"));
        // infeasible generator parameters
        assert_eq!(run_str(&["contributions", "--gen", "contrib", "--n", "10", "--t", "0", "--eps", "0.1"]).0, 1);
    }

    #[test]
    fn generated_push_verifies() {
        let (code, out, _) = run_str(&[
            "contributions", "--gen", "contrib", "--n", "200", "--d", "4", "--vsize", "8", "--t", "0", "--eps", "0.01",
            "--verify",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["record"]["bound_ok"], true);
        assert!(v["record"]["invariant_residual"].as_f64().unwrap() < 1e-9);
    }

    #[test]
    fn csv_output_has_versioned_header() {
        let (code, out, _) =
            run_str(&["contributions", "--gen", "contrib", "--n", "200", "--vsize", "8", "--t", "0", "--eps", "0.1", "--format", "csv"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), crate::report::csv_header());
        assert!(lines.next().unwrap().starts_with("1,contributions,\"gen:contrib(n=200,"));
    }

    #[test]
    fn meta_path_appends_suffix() {
        assert_eq!(meta_path(Path::new("/tmp/a.el")), PathBuf::from("/tmp/a.el.meta.json"));
    }
}
