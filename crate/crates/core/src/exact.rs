//! Power-iteration ground truth for PageRank and contribution vectors.
//!
//! Both solvers start from the zero vector, so iterates increase
//! monotonically towards the fixed point. Contribution iteration contracts
//! at rate `1 - α` in the max norm and PageRank iteration in the L1 norm;
//! the solvers stop once the contraction bound puts the remaining error
//! below `tol`, or after [`iteration_cap`] steps.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, GraphError};
use crate::graph::{Graph, NodeId};

pub const DEFAULT_TOL: f64 = 1e-12;

/// A dense per-node score vector and the tolerance it was solved to.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseScores {
    pub values: Vec<f64>,
    pub tol: f64,
    pub iterations: usize,
}

impl DenseScores {
    pub fn get(&self, v: NodeId) -> f64 {
        self.values[v]
    }
}

/// `⌈ln(1/tol) / ln(1/(1-α))⌉ + 8`; after that many steps from zero the
/// truncation error is below `tol`.
pub fn iteration_cap(alpha: f64, tol: f64) -> usize {
    libm::ceil(libm::log(1.0 / tol) / libm::log(1.0 / (1.0 - alpha))) as usize + 8
}

fn check(g: &Graph, alpha: f64, tol: f64) -> Result<(), Error> {
    crate::check_alpha(alpha)?;
    if !(tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive"));
    }
    let dangling = g.dangling_nodes();
    if !dangling.is_empty() {
        return Err(GraphError::Dangling(dangling).into());
    }
    Ok(())
}

/// One step of `x ← α/n + (1-α)·Σ_{u→v} x[u]/d_out(u)`.
pub fn pagerank_step(g: &Graph, alpha: f64, x: &[f64]) -> Vec<f64> {
    let n = g.num_nodes();
    let teleport = alpha / n as f64;
    let spread: Vec<f64> = (0..n).map(|u| (1.0 - alpha) * x[u] / g.out_degree(u) as f64).collect();
    (0..n)
        .map(|v| teleport + g.parents(v).iter().map(|&u| spread[u as usize]).sum::<f64>())
        .collect()
}

/// One step of `x ← α·w + (1-α)·D⁻¹A·x`.
pub fn contribution_step(g: &Graph, alpha: f64, weights: &[f64], x: &[f64]) -> Vec<f64> {
    (0..g.num_nodes())
        .map(|u| {
            let children = g.children(u);
            let mean = children.iter().map(|&v| x[v as usize]).sum::<f64>() / children.len() as f64;
            alpha * weights[u] + (1.0 - alpha) * mean
        })
        .collect()
}

/// PageRank `π` of every node.
pub fn pagerank(g: &Graph, alpha: f64, tol: f64) -> Result<DenseScores, Error> {
    check(g, alpha, tol)?;
    let cap = iteration_cap(alpha, tol);
    let mut x = vec![0.0; g.num_nodes()];
    let mut iterations = 0;
    while iterations < cap {
        let next = pagerank_step(g, alpha, &x);
        iterations += 1;
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change * (1.0 - alpha) / alpha < tol {
            break;
        }
    }
    Ok(DenseScores { values: x, tol, iterations })
}

/// Contribution vector of `t`: entry `u` is `π(u, t)`.
pub fn contributions(g: &Graph, t: NodeId, alpha: f64, tol: f64) -> Result<DenseScores, Error> {
    if t >= g.num_nodes() {
        return Err(Error::TargetOutOfRange { target: t, n: g.num_nodes() });
    }
    let mut weights = vec![0.0; g.num_nodes()];
    weights[t] = 1.0;
    weighted_contributions(g, &weights, alpha, tol)
}

/// `Σ_v weights[v]·π(·, v)`, the contribution vector of a weighted target set.
pub fn weighted_contributions(
    g: &Graph,
    weights: &[f64],
    alpha: f64,
    tol: f64,
) -> Result<DenseScores, Error> {
    check(g, alpha, tol)?;
    if weights.len() != g.num_nodes() {
        return Err(Error::Parameter("weight vector length must equal the node count"));
    }
    let scale = weights.iter().fold(0.0f64, |a, w| a.max(w.abs())).max(f64::MIN_POSITIVE);
    let cap = iteration_cap(alpha, tol / scale);
    let mut x = vec![0.0; g.num_nodes()];
    let mut iterations = 0;
    while iterations < cap {
        let next = contribution_step(g, alpha, weights, &x);
        iterations += 1;
        let change = next.iter().zip(&x).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        x = next;
        if change * (1.0 - alpha) / alpha < tol {
            break;
        }
    }
    Ok(DenseScores { values: x, tol, iterations })
}

/// Every node with a path to `t` (including `t`), i.e. the support of the
/// contribution vector of `t`.
pub fn ancestors(g: &Graph, t: NodeId) -> Vec<NodeId> {
    let mut seen = vec![false; g.num_nodes()];
    let mut stack = vec![t];
    seen[t] = true;
    let mut out = Vec::new();
    while let Some(v) = stack.pop() {
        out.push(v);
        for &u in g.parents(v) {
            if !seen[u as usize] {
                seen[u as usize] = true;
                stack.push(u as usize);
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-10
    }

    #[test]
    fn pagerank_small_graphs() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let pr = pagerank(&g, 0.2, DEFAULT_TOL).unwrap();
        assert!(close(pr.get(0), 0.5) && close(pr.get(1), 0.5));

        let g = Graph::from_edges(1, &[(0, 0)]).unwrap();
        assert!(close(pagerank(&g, 0.2, DEFAULT_TOL).unwrap().get(0), 1.0));

        // π(0) = α/n = 0.1; π(1) = 0.1 + 0.8·(π(0) + π(1)) → 0.9
        let g = Graph::from_edges(2, &[(0, 1), (1, 1)]).unwrap();
        let pr = pagerank(&g, 0.2, DEFAULT_TOL).unwrap();
        assert!(close(pr.get(0), 0.1) && close(pr.get(1), 0.9));
    }

    #[test]
    fn contributions_small_graphs() {
        // Even-length walks from 0 end at 0: Σ α(1-α)^{2k} = α/(1-(1-α)²).
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]).unwrap();
        let c = contributions(&g, 0, 0.2, DEFAULT_TOL).unwrap();
        assert!(close(c.get(0), 0.2 / 0.36) && close(c.get(1), 0.16 / 0.36));

        let g = Graph::from_edges(1, &[(0, 0)]).unwrap();
        assert!(close(contributions(&g, 0, 0.2, DEFAULT_TOL).unwrap().get(0), 1.0));

        let g = Graph::from_edges(2, &[(0, 1), (1, 1)]).unwrap();
        let c = contributions(&g, 1, 0.2, DEFAULT_TOL).unwrap();
        assert!(close(c.get(1), 1.0) && close(c.get(0), 0.8));
    }

    #[test]
    fn rejects_dangling_and_bad_parameters() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert!(matches!(pagerank(&g, 0.2, 1e-9), Err(Error::Graph(GraphError::Dangling(_)))));
        let g = Graph::from_edges(1, &[(0, 0)]).unwrap();
        assert!(pagerank(&g, 1.0, 1e-9).is_err());
        assert!(contributions(&g, 3, 0.2, 1e-9).is_err());
    }

    #[test]
    fn cap_matches_formula() {
        // ln(1e12)/ln(1.25) = 123.8
        assert_eq!(iteration_cap(0.2, 1e-12), 124 + 8);
    }

    #[test]
    fn ancestors_of_target() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 1), (2, 3), (3, 2)]).unwrap();
        assert_eq!(ancestors(&g, 1), vec![0, 1]);
        assert_eq!(ancestors(&g, 3), vec![2, 3]);
    }
}
