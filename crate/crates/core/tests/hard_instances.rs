use std::ops::Range;

use backpush::exact::{self, DEFAULT_TOL};
use backpush::hard::{
    attach_delta, family_separation, gen_contribution_hard, gen_pagerank_hard, ContribParams, HardInstanceMeta,
    PagerankParams,
};
use backpush::Graph;
use proptest::prelude::*;

fn parents_in(g: &Graph, v: usize, set: &Range<usize>) -> usize {
    g.parents(v).iter().filter(|&&u| set.contains(&(u as usize))).count()
}

/// Structural facts that must be read off the graph, not the generator.
fn check_truthful(g: &Graph, m: &HardInstanceMeta) {
    let arity = m.arity.unwrap_or(0);
    assert_eq!(m.u.len(), m.v.len());
    assert_eq!(m.w.len(), m.d.max(m.v.len()));
    assert_eq!(m.x.len(), m.n_budget);
    for (j, v) in m.v.clone().enumerate() {
        assert_eq!(g.in_degree(v), m.d + 1);
        assert_eq!(parents_in(g, v, &m.w), m.d);
        assert_eq!(g.parents(v).iter().filter(|&&u| u as usize == m.u.start + j).count(), 1);
    }
    for u in m.u.clone() {
        assert_eq!(g.out_degree(u), 1);
        assert!(m.v.contains(&(g.children(u)[0] as usize)));
    }
    for w in m.w.clone() {
        assert_eq!(g.out_degree(w), m.d);
        assert!(g.children(w).iter().all(|&c| m.v.contains(&(c as usize)) || m.x.contains(&(c as usize))));
        assert_eq!(g.in_degree(w), 0);
    }
    for x in m.x.clone() {
        assert_eq!(g.children(x), &[x as u32]);
    }
    assert!(g.children(m.t).contains(&(m.t as u32)));
    if m.tree_v.is_empty() && m.arity.is_none() {
        assert_eq!(g.in_degree(m.t), m.v.len() + 1);
        assert_eq!(parents_in(g, m.t, &m.v), m.v.len());
    } else {
        assert_eq!(m.v.len(), arity.pow(m.levels_v as u32));
        assert_eq!(m.tree_v.len() + 1, m.levels_v);
        assert_eq!(g.in_degree(m.t), arity + 1);
        let last = m.tree_v.last().unwrap_or(&m.v);
        assert_eq!(parents_in(g, m.t, last), arity);
        for level in &m.tree_v {
            for a in level.clone() {
                assert_eq!(g.in_degree(a), arity);
            }
        }
    }
    if let Some(star) = m.u_star {
        assert_eq!(m.v_star, Some(g.children(star)[0] as usize));
        let pointing = m.y.clone().filter(|&y| g.children(y) != [y as u32]).count();
        assert_eq!(pointing, m.y_parents);
        assert_eq!(m.y_parents, m.i * m.y.len() / m.p);
        if m.tree_y.is_empty() {
            assert_eq!(g.in_degree(star), m.y_parents);
        } else {
            assert_eq!(g.in_degree(star), arity);
            assert_eq!(m.y.len(), arity.pow(m.levels_y as u32));
        }
    }
    let counted = 1 + 2 * m.v.len() + m.w.len() + m.x.len() + m.y.len()
        + m.tree_v.iter().map(Range::len).sum::<usize>()
        + m.tree_y.iter().map(Range::len).sum::<usize>()
        + m.filler.len();
    assert_eq!(counted, g.num_nodes());
    assert!(g.dangling_nodes().is_empty());
    let (max_in, max_out) = g.max_degrees();
    // unit declared degrees leave the filler no room: one extra edge is allowed
    let slack = usize::from(m.max_in.min(m.max_out) < 2);
    assert!(max_out <= m.max_out + slack, "{max_out} > {}", m.max_out);
    if m.y.is_empty() || m.arity.is_some() {
        assert!(max_in <= m.max_in + 1, "{max_in} > {}", m.max_in);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn direct_metadata_is_truthful(n in 1usize..50, d in 1usize..10, v in 1usize..20, extra in 0usize..300) {
        let w = d.max(v);
        prop_assume!(2 * v + w <= 4 * n);
        let (g, m) = gen_contribution_hard(&ContribParams::new(n, d * w + extra, d, v)).unwrap();
        check_truthful(&g, &m);
    }

    #[test]
    fn multi_level_metadata_is_truthful(n in 20usize..200, d in 1usize..6, v in 4usize..300, arity in 2usize..6, extra in 0usize..300) {
        let params = ContribParams::new(n, d * d.max(v) + extra, d, v).multi_level(arity).alpha(0.5);
        if let Ok((g, m)) = gen_contribution_hard(&params) {
            check_truthful(&g, &m);
        }
    }

    #[test]
    fn family_metadata_is_truthful(n in 10usize..100, d in 1usize..6, v in 1usize..10, p in 1usize..6, i_seed in any::<usize>()) {
        let i = i_seed % (p + 1);
        let params = PagerankParams::new(ContribParams::new(n, d * d.max(v), d, v), p, i);
        if let Ok((g, m)) = gen_pagerank_hard(&params) {
            check_truthful(&g, &m);
        }
    }
}

#[test]
fn direct_pagerank_profile() {
    let alpha = 0.2;
    for (n, d, v) in [(200, 4, 8), (500, 10, 10), (1000, 3, 30)] {
        let (g, m) = gen_contribution_hard(&ContribParams::new(n, d * d.max(v), d, v)).unwrap();
        let total = g.num_nodes() as f64;
        let pi = exact::pagerank(&g, alpha, DEFAULT_TOL).unwrap();
        // closed forms: W nodes have no parents, V nodes collect d·π(w)/d + π(u)
        let w_score = alpha / total;
        let v_score = alpha / total * (1.0 + 2.0 * (1.0 - alpha));
        for w in m.w.clone() {
            assert!((pi.get(w) - w_score).abs() < 1e-12);
            let ratio = pi.get(w) * total / alpha;
            assert!((1.0 / 3.0..=3.0).contains(&ratio));
        }
        for a in m.v.clone() {
            assert!((pi.get(a) - v_score).abs() < 1e-12);
            assert!((1.0 / 3.0..=3.0).contains(&(pi.get(a) * total)));
        }
        let t_ratio = pi.get(m.t) * total / m.v.len() as f64;
        assert!((1.0 / 3.0..=3.0).contains(&t_ratio), "{t_ratio}");
    }
}

#[test]
fn multi_level_scores_double_per_level() {
    // arity 4 = 2/(1-α) at α = 0.5
    let alpha = 0.5;
    let (g, m) = gen_contribution_hard(&ContribParams::new(2000, 600, 2, 256).multi_level(4).alpha(alpha)).unwrap();
    let pi = exact::pagerank(&g, alpha, DEFAULT_TOL).unwrap();
    let mut levels = vec![m.v.clone()];
    levels.extend(m.tree_v.iter().cloned());
    let level_score: Vec<f64> = levels.iter().map(|r| pi.get(r.start)).collect();
    for r in &levels {
        assert!(r.clone().all(|a| (pi.get(a) - pi.get(r.start)).abs() < 1e-15));
    }
    for w in level_score.windows(2) {
        let ratio = w[1] / w[0];
        assert!((2.0 / 1.5..=2.0 * 1.5).contains(&ratio), "{ratio}");
    }
}

#[test]
fn contributors_meet_attached_delta() {
    for params in [
        ContribParams::new(10, 30, 2, 2),
        ContribParams::new(100, 400, 5, 12),
        ContribParams::new(200, 300, 2, 64).multi_level(4),
    ] {
        let (g, mut m) = gen_contribution_hard(&params).unwrap();
        let delta = attach_delta(&g, &mut m).unwrap();
        assert!(delta > 0.0 && delta < 1.0);
        let c = exact::contributions(&g, m.t, params.alpha, DEFAULT_TOL).unwrap();
        let npi: f64 = c.values.iter().sum();
        for u in m.u.clone() {
            assert!(c.get(u) >= delta * npi);
        }
        // Θ(1/|V|): the contributing share of one u shrinks with |V|
        let share = c.get(m.u.start) / npi;
        let scaled = share * m.v.len() as f64;
        assert!((0.05..=3.0).contains(&scaled), "{scaled}");
    }
}

#[test]
fn family_separation_at_desk_scale() {
    let params = PagerankParams::new(ContribParams::new(1000, 64, 4, 16), 3, 0);
    let (scores, kappa) = family_separation(&params).unwrap();
    assert_eq!(scores.len(), 4);
    assert!(scores.windows(2).all(|w| w[1] > w[0]));
    assert!(kappa > 0.1, "{kappa}");
    let (_, m) = gen_pagerank_hard(&params).unwrap();
    assert_eq!(m.y_parents, 0);
}
