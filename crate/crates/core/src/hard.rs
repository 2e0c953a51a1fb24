//! Generators for the lower-bound instance families.
//!
//! The contributing-set instance `H` has a target `t` with a self-loop, a
//! set `V` of parents of `t`, and a matching `U → V` whose sources are the
//! nodes worth finding. Every `v ∈ V` also has `d` parents in `W`, so a
//! search from `t` has to sift through `d` decoys per `v` before it meets
//! the one parent in `U`. Nodes of `W` have out-degree exactly `d`, padded
//! with edges into `X`, a block of `n_budget` self-loops. An isolated filler
//! subgraph brings the edge count up to `m_budget`.
//!
//! In multi-level mode the `V → t` edges go through a reversed complete
//! `arity`-ary tree, which caps the in-degree of `t` at `arity`.
//!
//! The single-node PageRank family `H_0..H_p` adds a set `Y`: in `H_i`,
//! `⌊i·|Y|/p⌋` nodes of `Y` point to `u*` (a fixed node of `U`) and the rest
//! only have self-loops. In multi-level mode these edges enter a second tree
//! rooted at `u*`.
//!
//! Node ids are contiguous per set in the order `t, U, V, W, X, Y`, tree
//! levels of `V`, tree levels of `Y`, filler. [`permuted_family`] hides the
//! layout behind random relabelings.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::Error;
use crate::exact;
use crate::graph::{Graph, NodeId};
use crate::oracle::PermutedOracle;

#[derive(Debug, Clone, PartialEq)]
pub struct ContribParams {
    pub n_budget: usize,
    pub m_budget: usize,
    /// In-degree of each `v ∈ V` from `W`, and out-degree of each `w ∈ W`.
    pub d: usize,
    /// Requested `|V|`; multi-level mode rounds it down to a power of `arity`.
    pub v_size: usize,
    pub multi_level: bool,
    pub arity: usize,
    pub alpha: f64,
    /// Declared maximum in-degree. Defaults to `max(d, |V|)`, or
    /// `max(d, arity)` in multi-level mode.
    pub max_in: Option<usize>,
    /// Declared maximum out-degree. Defaults to `d`.
    pub max_out: Option<usize>,
}

impl ContribParams {
    pub fn new(n_budget: usize, m_budget: usize, d: usize, v_size: usize) -> Self {
        ContribParams {
            n_budget,
            m_budget,
            d,
            v_size,
            multi_level: false,
            arity: 0,
            alpha: 0.2,
            max_in: None,
            max_out: None,
        }
    }

    pub fn multi_level(mut self, arity: usize) -> Self {
        self.multi_level = true;
        self.arity = arity;
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn max_degrees(mut self, max_in: usize, max_out: usize) -> Self {
        self.max_in = Some(max_in);
        self.max_out = Some(max_out);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PagerankParams {
    pub base: ContribParams,
    pub p: usize,
    pub i: usize,
    /// `|Y| = y_factor·|V|` in direct mode.
    pub y_factor: usize,
}

impl PagerankParams {
    pub fn new(base: ContribParams, p: usize, i: usize) -> Self {
        PagerankParams { base, p, i, y_factor: 4 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardInstanceMeta {
    pub t: NodeId,
    pub u: Range<NodeId>,
    pub v: Range<NodeId>,
    pub w: Range<NodeId>,
    pub x: Range<NodeId>,
    pub y: Range<NodeId>,
    /// Tree levels below `V`, top to bottom; the last feeds `t`.
    pub tree_v: Vec<Range<NodeId>>,
    /// Tree levels below `Y`, top to bottom; the last feeds `u*`.
    pub tree_y: Vec<Range<NodeId>>,
    pub filler: Range<NodeId>,
    pub u_star: Option<NodeId>,
    pub v_star: Option<NodeId>,
    pub d: usize,
    pub p: usize,
    pub i: usize,
    /// Number of `Y` nodes with an edge towards `u*`.
    pub y_parents: usize,
    pub arity: Option<usize>,
    /// Levels of the `V` tree counting `V` itself; 0 in direct mode.
    pub levels_v: usize,
    pub levels_y: usize,
    pub n_budget: usize,
    pub m_budget: usize,
    pub max_in: usize,
    pub max_out: usize,
    pub alpha: f64,
    /// `1/(2-β)` with `β = log_k(1-α)`, `k = arity·(1-α)`; multi-level
    /// PageRank family only.
    pub exponent: Option<f64>,
    /// Largest δ for which all of `U` is δ-contributing, once attached.
    pub delta: Option<f64>,
    /// Minimum of `π_i(t)/π_{i-1}(t) - 1` over the family, once attached.
    pub kappa: Option<f64>,
}

struct Builder {
    next: usize,
    edges: Vec<(NodeId, NodeId)>,
}

impl Builder {
    fn alloc(&mut self, k: usize) -> Range<NodeId> {
        let r = self.next..self.next + k;
        self.next += k;
        r
    }

    fn edge(&mut self, u: NodeId, v: NodeId) {
        self.edges.push((u, v));
    }

    fn self_loops(&mut self, r: Range<NodeId>) {
        for x in r {
            self.edge(x, x);
        }
    }

    /// Tree levels of sizes `top/arity, top/arity², …, arity`.
    fn tree_levels(&mut self, top: usize, arity: usize) -> Vec<Range<NodeId>> {
        let mut levels = Vec::new();
        let mut size = top / arity;
        while size >= arity {
            levels.push(self.alloc(size));
            size /= arity;
        }
        levels
    }

    /// Edges from each level to the next, node `j` to node `j / arity`, and
    /// from the last level to `root`.
    fn tree_edges(&mut self, top: &Range<NodeId>, levels: &[Range<NodeId>], arity: usize, root: NodeId) {
        let mut prev = top.clone();
        for level in levels {
            for (j, a) in prev.clone().enumerate() {
                self.edge(a, level.start + j / arity);
            }
            prev = level.clone();
        }
        for a in prev {
            self.edge(a, root);
        }
    }
}

fn infeasible(msg: alloc::string::String) -> Error {
    Error::Infeasible(msg)
}

/// Largest `L ≥ 1` with `arity^L ≤ size`, and `arity^L`.
fn levels_for(size: usize, arity: usize) -> Option<(usize, usize)> {
    if size < arity {
        return None;
    }
    let (mut levels, mut pow) = (1, arity);
    while let Some(next) = pow.checked_mul(arity).filter(|&p| p <= size) {
        pow = next;
        levels += 1;
    }
    Some((levels, pow))
}

struct YSpec {
    p: usize,
    i: usize,
    y_factor: usize,
}

fn build(params: &ContribParams, y_spec: Option<YSpec>) -> Result<(Graph, HardInstanceMeta), Error> {
    let ContribParams { n_budget, m_budget, d, v_size, multi_level, arity, alpha, .. } = *params;
    crate::check_alpha(alpha)?;
    if d == 0 {
        return Err(Error::Parameter("d must be positive"));
    }
    if v_size == 0 {
        return Err(Error::Parameter("|V| must be positive"));
    }
    if n_budget == 0 {
        return Err(Error::Parameter("n budget must be positive"));
    }

    let (levels_v, v_count) = if multi_level {
        if arity < 2 {
            return Err(infeasible(format!("multi-level arity {arity} must be at least 2")));
        }
        if (arity as f64) * (1.0 - alpha) < 1.0 {
            return Err(infeasible(format!("multi-level arity {arity} times (1 - alpha) = {} is below 1", arity as f64 * (1.0 - alpha))));
        }
        levels_for(v_size, arity)
            .ok_or_else(|| infeasible(format!("|V| = {v_size} is smaller than the arity {arity}")))?
    } else {
        (0, v_size)
    };
    let w_count = d.max(v_count);
    let max_in = params.max_in.unwrap_or(if multi_level { d.max(arity) } else { w_count });
    let max_out = params.max_out.unwrap_or(d);

    if !multi_level && w_count > max_in {
        return Err(infeasible(format!(
            "maximum in-degree max(d, |V|) = {w_count} exceeds the declared {max_in}; use multi-level mode"
        )));
    }
    if multi_level && d > max_in {
        return Err(infeasible(format!("d = {d} exceeds the declared maximum in-degree {max_in}")));
    }
    if d > max_out {
        return Err(infeasible(format!("d = {d} exceeds the declared maximum out-degree {max_out}")));
    }
    if d.saturating_mul(w_count) > m_budget {
        return Err(infeasible(format!("edge count d·max(d, |V|) = {} exceeds the m budget {m_budget}", d * w_count)));
    }

    let (p, i, y_count, levels_y, exponent) = match &y_spec {
        None => (0, 0, 0, 0, None),
        Some(spec) => {
            if spec.p == 0 || spec.i > spec.p {
                return Err(Error::Parameter("family index must satisfy 0 <= i <= p with p >= 1"));
            }
            if multi_level {
                let k = arity as f64 * (1.0 - alpha);
                if k <= 1.0 {
                    return Err(infeasible(format!("arity·(1 - alpha) = {k} must exceed 1 for the Y tree")));
                }
                let beta = libm::log(1.0 - alpha) / libm::log(k);
                let levels = (libm::round(levels_v as f64 * (1.0 - beta)) as usize).max(1);
                let size = u32::try_from(levels)
                    .ok()
                    .and_then(|l| arity.checked_pow(l))
                    .ok_or_else(|| infeasible(format!("|Y| = {arity}^{levels} overflows")))?;
                (spec.p, spec.i, size, levels, Some(1.0 / (2.0 - beta)))
            } else {
                let size = spec
                    .y_factor
                    .checked_mul(v_count)
                    .filter(|&s| s > 0)
                    .ok_or_else(|| infeasible(format!("|Y| = {}·{v_count} is not a positive size", spec.y_factor)))?;
                (spec.p, spec.i, size, 0, None)
            }
        }
    };
    let y_parents = i * y_count / p.max(1);

    let mut b = Builder { next: 0, edges: Vec::new() };
    let t = b.alloc(1).start;
    let u = b.alloc(v_count);
    let v = b.alloc(v_count);
    let w = b.alloc(w_count);
    let x = b.alloc(n_budget);
    let y = b.alloc(y_count);
    let tree_v = if multi_level { b.tree_levels(v_count, arity) } else { Vec::new() };
    let tree_y = if multi_level && y_count > 0 { b.tree_levels(y_count, arity) } else { Vec::new() };

    let structural = b.next - n_budget - 1;
    if structural > 4 * n_budget {
        return Err(infeasible(format!(
            "node count: {structural} nodes outside t and X exceed four times the n budget {n_budget}"
        )));
    }

    b.edge(t, t);
    let mut w_out = alloc::vec![0usize; w_count];
    for j in 0..v_count {
        for k in 0..d {
            let wi = (j * d + k) % w_count;
            w_out[wi] += 1;
            b.edge(w.start + wi, v.start + j);
        }
    }
    for j in 0..v_count {
        b.edge(u.start + j, v.start + j);
    }
    if multi_level {
        b.tree_edges(&v, &tree_v, arity, t);
    } else {
        for a in v.clone() {
            b.edge(a, t);
        }
    }
    let mut next_x = 0;
    for (wi, &c) in w_out.iter().enumerate() {
        for _ in c..d {
            b.edge(w.start + wi, x.start + next_x % n_budget);
            next_x += 1;
        }
    }
    b.self_loops(x.clone());

    let (u_star, v_star) = if y_spec.is_some() { (Some(u.start), Some(v.start)) } else { (None, None) };
    if let Some(star) = u_star {
        let entry = |j: usize| match tree_y.first() {
            Some(level) => level.start + j / arity,
            None => star,
        };
        for (j, a) in y.clone().enumerate() {
            if j < y_parents {
                b.edge(a, entry(j));
            } else {
                b.edge(a, a);
            }
        }
        if let Some(first) = tree_y.first() {
            b.tree_edges(first, &tree_y[1..], arity, star);
        }
    }

    let filler = add_filler(&mut b, m_budget, max_in, max_out);

    let graph = Graph::from_edges(b.next, &b.edges)?;
    let meta = HardInstanceMeta {
        t,
        u,
        v,
        w,
        x,
        y,
        tree_v,
        tree_y,
        filler,
        u_star,
        v_star,
        d,
        p,
        i,
        y_parents,
        arity: multi_level.then_some(arity),
        levels_v,
        levels_y,
        n_budget,
        m_budget,
        max_in,
        max_out,
        alpha,
        exponent,
        delta: None,
        kappa: None,
    };
    Ok((graph, meta))
}

/// Circulant on `k` nodes with offsets `1..=c`, an in-star hub with
/// `max_in` parents and a self-loop, and an out-star hub with `max_out`
/// children, sized so the total edge count reaches `m_budget`.
fn add_filler(b: &mut Builder, m_budget: usize, max_in: usize, max_out: usize) -> Range<NodeId> {
    let remaining = m_budget.saturating_sub(b.edges.len());
    if remaining == 0 {
        return b.next..b.next;
    }
    let c = max_in.min(max_out).saturating_sub(1).max(1);
    let circulant_edges = remaining.saturating_sub(max_in + max_out + 1);
    let k = max_in.max(max_out).max(circulant_edges.div_ceil(c)).max(c + 1);
    let ring = b.alloc(k);
    let in_hub = b.alloc(1).start;
    let out_hub = b.alloc(1).start;
    for j in 0..k {
        for s in 1..=c {
            b.edge(ring.start + j, ring.start + (j + s) % k);
        }
    }
    for j in 0..max_in {
        b.edge(ring.start + j, in_hub);
    }
    b.edge(in_hub, in_hub);
    for j in 0..max_out {
        b.edge(out_hub, ring.start + j);
    }
    ring.start..out_hub + 1
}

/// The contributing-set instance `H`.
pub fn gen_contribution_hard(params: &ContribParams) -> Result<(Graph, HardInstanceMeta), Error> {
    build(params, None)
}

/// Member `H_i` of the single-node PageRank family.
pub fn gen_pagerank_hard(params: &PagerankParams) -> Result<(Graph, HardInstanceMeta), Error> {
    build(&params.base, Some(YSpec { p: params.p, i: params.i, y_factor: params.y_factor }))
}

/// Records in `meta` the largest δ (up to a `1e-9` relative margin) for
/// which every node of `U` is δ-contributing to `t`, from ground truth.
pub fn attach_delta(graph: &Graph, meta: &mut HardInstanceMeta) -> Result<f64, Error> {
    let contrib = exact::contributions(graph, meta.t, meta.alpha, exact::DEFAULT_TOL)?;
    let npi: f64 = contrib.values.iter().sum();
    let weakest = meta.u.clone().map(|u| contrib.get(u)).fold(f64::INFINITY, f64::min);
    let delta = weakest / npi * (1.0 - 1e-9);
    meta.delta = Some(delta);
    Ok(delta)
}

/// Ground-truth `π_i(t)` for `i = 0..=p` and the minimum successive ratio
/// minus one.
pub fn family_separation(params: &PagerankParams) -> Result<(Vec<f64>, f64), Error> {
    let mut scores = Vec::with_capacity(params.p + 1);
    for i in 0..=params.p {
        let (g, meta) = gen_pagerank_hard(&PagerankParams { i, ..params.clone() })?;
        scores.push(exact::pagerank(&g, params.base.alpha, exact::DEFAULT_TOL)?.get(meta.t));
    }
    let kappa = scores.windows(2).map(|w| w[1] / w[0] - 1.0).fold(f64::INFINITY, f64::min);
    Ok((scores, kappa))
}

/// The six parameter regimes of the contributing-set lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HardCase {
    /// `√m` smallest, `δ ≥ 1/√m`: `|V| = 1/δ`, `d = √m`.
    SqrtMCoarse,
    /// `√m` smallest, `δ < 1/√m`: `|V| = d = √m`.
    SqrtMFine,
    /// `Δ_out` smallest, `δ ≥ Δ_out/m`: `|V| = 1/δ`, `d = Δ_out`.
    OutdegCoarse,
    /// `Δ_out` smallest, `δ < Δ_out/m`: `|V| = m/Δ_out`, `d = Δ_out`.
    OutdegFine,
    /// `Δ_in` smallest, `δ ≥ Δ_in/m`: `|V| = 1/δ`, `d = Δ_in`.
    IndegCoarse,
    /// `Δ_in` smallest, `δ < Δ_in/m`: `|V| = m/Δ_in`, `d = Δ_in`.
    IndegFine,
}

impl HardCase {
    pub const ALL: [HardCase; 6] = [
        HardCase::SqrtMCoarse,
        HardCase::SqrtMFine,
        HardCase::OutdegCoarse,
        HardCase::OutdegFine,
        HardCase::IndegCoarse,
        HardCase::IndegFine,
    ];
}

/// Target graph shape for [`case_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub n: usize,
    pub m: usize,
    pub max_in: usize,
    pub max_out: usize,
    pub delta: f64,
    pub arity: usize,
    pub alpha: f64,
}

/// Generator parameters for one regime. The cases using `Δ_in` or `Δ_out`
/// route `V → t` through the multi-level tree.
pub fn case_params(case: HardCase, r: &Regime) -> ContribParams {
    let sqrt_m = r.m.isqrt().max(1);
    let inv_delta = libm::ceil(1.0 / r.delta) as usize;
    let (d, v_size, multi) = match case {
        HardCase::SqrtMCoarse => (sqrt_m, inv_delta, false),
        HardCase::SqrtMFine => (sqrt_m, sqrt_m, false),
        HardCase::OutdegCoarse => (r.max_out, inv_delta, true),
        HardCase::OutdegFine => (r.max_out, r.m / r.max_out.max(1), true),
        HardCase::IndegCoarse => (r.max_in, inv_delta, true),
        HardCase::IndegFine => (r.max_in, r.m / r.max_in.max(1), true),
    };
    let params = ContribParams::new(r.n, r.m, d, v_size).alpha(r.alpha).max_degrees(r.max_in, r.max_out);
    if multi {
        params.multi_level(r.arity)
    } else {
        params
    }
}

/// `copies` relabelings of `graph` drawn from `master_seed`; copy `k` uses
/// stream `k`, so copy 0 is the identity.
pub fn permuted_family(graph: &Graph, copies: usize, master_seed: u64) -> Vec<PermutedOracle<'_>> {
    (0..copies as u64).map(|k| PermutedOracle::new(graph, master_seed, k)).collect()
}
