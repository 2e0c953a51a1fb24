mod common;

use backpush::detect::{detect_adaptive, detect_known_npi, DetectConfig, DetectionResult, Variant};
use backpush::exact::{self, DEFAULT_TOL};
use backpush::hard::{attach_delta, gen_contribution_hard, ContribParams};
use backpush::push::{approx_contributions, PushOrder};
use backpush::{AccessOracle, Graph};
use proptest::prelude::*;

const ALPHA: f64 = 0.2;
const VARIANTS: [Variant; 4] = [Variant::Indeg, Variant::Outdeg, Variant::SqrtM, Variant::Combined];

fn true_set(g: &Graph, t: usize, delta: f64) -> (Vec<usize>, f64) {
    let c = exact::contributions(g, t, ALPHA, DEFAULT_TOL).unwrap();
    let npi: f64 = c.values.iter().sum();
    ((0..g.num_nodes()).filter(|&v| c.get(v) >= delta * npi).collect(), npi)
}

fn sums(r: &DetectionResult) -> (f64, f64, f64) {
    r.history.iter().fold((0.0, 0.0, 0.0), |(a, b, c), run| (a + run.t_eps.indeg, b + run.t_eps.outdeg, c + run.t_eps.sqrt_m))
}

fn check_budget_accounting(g: &Graph, r: &DetectionResult) {
    let (max_in, max_out) = g.max_degrees();
    let local = r.stats.local_total() as f64;
    let (t_in, t_out, t_sqrt) = sums(r);
    let runs = r.history.len() as f64;
    match r.variant {
        Variant::Indeg => assert!(local <= 3.0 * max_in as f64 * t_in + 1e-9, "{local} vs {t_in}"),
        Variant::Outdeg => assert!(local <= 3.0 * (max_out as f64 * t_out + runs) + 1e-9, "{local} vs {t_out}"),
        Variant::SqrtM => {
            let m = g.num_edges() as f64;
            assert!(local <= 3.0 * m.sqrt() * t_sqrt + t_in + 1e-9, "{local} vs {t_sqrt}")
        }
        Variant::Combined => {}
    }
}

fn check_t_growth(r: &DetectionResult, npi: f64) {
    for run in r.history.iter().filter(|run| run.completed) {
        let scale = npi / run.eps;
        assert!(run.t_eps.indeg <= scale / ALPHA + 1.0, "{run:?}");
        assert!(run.t_eps.outdeg <= scale / (ALPHA * (1.0 - ALPHA)) + 1e-9, "{run:?}");
        assert!(run.t_eps.sqrt_m <= scale / (ALPHA * (1.0 - ALPHA).sqrt()) + 1.0, "{run:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adaptive_detection_is_a_superset(
        n in 2usize..60,
        p in 0.02f64..0.3,
        seed in any::<u64>(),
        t_seed in any::<usize>(),
        delta in 0.01f64..0.9,
    ) {
        let g = common::random_digraph(n, p, seed);
        let t = t_seed % n;
        let (truth, npi) = true_set(&g, t, delta);
        for variant in VARIANTS {
            let r = detect_adaptive(&mut AccessOracle::new(&g), t, ALPHA, delta, variant, &DetectConfig::default()).unwrap();
            prop_assert!(truth.iter().all(|&v| r.contains(v)), "{variant:?} missed {:?}", truth);
            prop_assert!(!r.fallback);
            let first = r.history.first().unwrap();
            prop_assert_eq!(first.eps, 1.0);
            prop_assert!(r.history.windows(2).all(|w| w[1].eps == w[0].eps / 2.0));
            prop_assert!(r.history.iter().rev().skip(1).all(|run| run.completed));
            check_budget_accounting(&g, &r);
            check_t_growth(&r, npi);
        }
    }

    #[test]
    fn known_npi_detection_is_sandwiched(
        n in 2usize..60,
        p in 0.02f64..0.3,
        seed in any::<u64>(),
        t_seed in any::<usize>(),
        delta in 0.01f64..0.99,
    ) {
        let g = common::random_digraph(n, p, seed);
        let t = t_seed % n;
        let (truth, npi) = true_set(&g, t, delta);
        let (half, _) = true_set(&g, t, delta / 2.0);
        let r = detect_known_npi(&mut AccessOracle::new(&g), t, ALPHA, delta, npi, PushOrder::Fifo).unwrap();
        prop_assert!(truth.iter().all(|&v| r.contains(v)));
        prop_assert!(r.nodes.iter().all(|v| half.contains(v)));
        let plain = approx_contributions(AccessOracle::new(&g), t, ALPHA, delta * npi / 2.0, PushOrder::Fifo).unwrap();
        prop_assert_eq!(r.stats, plain.stats);
    }
}

#[test]
fn instrumentation_adds_no_queries() {
    for (name, g, t) in common::test_graphs() {
        for variant in VARIANTS {
            let r = detect_adaptive(&mut AccessOracle::new(&g), t, ALPHA, 0.05, variant, &DetectConfig::default()).unwrap();
            let mut floor = 0;
            let mut ceiling = 0;
            for run in &r.history {
                let plain = approx_contributions(AccessOracle::new(&g), t, ALPHA, run.eps, PushOrder::Fifo).unwrap();
                let q = plain.stats.total();
                ceiling += q;
                if run.completed {
                    floor += q;
                    assert_eq!(run.pushbacks, plain.pushbacks, "{name}");
                }
            }
            let got = r.stats.total();
            assert!(floor <= got && got <= ceiling, "{name} {variant:?}: {floor} <= {got} <= {ceiling}");
        }
    }
}

#[test]
fn two_cycle_with_small_budget() {
    let g = common::two_cycle();
    let cfg = DetectConfig { budget_const: Some(16.0), ..Default::default() };
    let r = detect_adaptive(&mut AccessOracle::new(&g), 0, ALPHA, 0.4, Variant::Indeg, &cfg).unwrap();
    assert!(r.contains(0) && r.contains(1));
}

#[test]
fn hard_instance_contributors_are_found() {
    for (d, v) in [(2, 2), (4, 8), (8, 3)] {
        let (g, mut meta) = gen_contribution_hard(&ContribParams::new(40, 200, d, v)).unwrap();
        let delta = attach_delta(&g, &mut meta).unwrap();
        for variant in VARIANTS {
            let r = detect_adaptive(&mut AccessOracle::new(&g), meta.t, ALPHA, delta, variant, &DetectConfig::default())
                .unwrap();
            for u in meta.u.clone().chain(meta.v.clone()).chain([meta.t]) {
                assert!(r.contains(u), "d={d} |V|={v} {variant:?}: missing {u}");
            }
        }
    }
}

#[test]
fn work_cap_returns_all_ancestors() {
    let g = common::random_digraph(50, 0.08, 5);
    let t = 4;
    let cap = (g.num_nodes() + g.num_edges()) as u64 / 4;
    let cfg = DetectConfig { work_cap: Some(cap), ..Default::default() };
    let r = detect_adaptive(&mut AccessOracle::new(&g), t, ALPHA, 1e-4, Variant::Indeg, &cfg).unwrap();
    assert!(r.fallback);
    assert_eq!(r.nodes, exact::ancestors(&g, t));
}
