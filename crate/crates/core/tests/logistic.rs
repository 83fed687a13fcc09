use proptest::prelude::*;
use revext::dynamics::BranchLabel;
use revext::logistic::{
    self, attracting_period_default, classify_regime, continuum_graph, critical_orbit,
    feigenbaum_limit_estimate, lift_gamma, mu_parameter, mu_residual, period_doubling_parameter,
    preimage_branches, superstable_parameter, window_boundaries, CascadeTable, NodeKind, RegimeTag,
};
use revext::roots::bisect;
use revext::{Error, EPS_CHAIN};

fn table() -> &'static CascadeTable {
    CascadeTable::default_table().unwrap()
}

#[test]
fn eval_examples() {
    assert_eq!(logistic::eval(1.0, 0.5).unwrap(), 1.0);
    assert_eq!(logistic::eval(0.6, 0.5).unwrap(), 0.6);
    let x = 2.0 / 3.0;
    assert!((logistic::eval(0.75, x).unwrap() - x).abs() < 1e-15);
    assert!(matches!(logistic::eval(0.5, -0.1), Err(Error::OutsideDomain { .. })));
}

#[test]
fn preimage_branch_examples() {
    let f = |x: f64| 4.0 * x * (1.0 - x) - 0.5;
    let pre = preimage_branches(1.0, 0.5);
    assert_eq!(pre[0].0, BranchLabel::Left);
    assert_eq!(pre[1].0, BranchLabel::Right);
    assert!((pre[0].1 - bisect(f, 0.0, 0.5, 0.0, "L").unwrap()).abs() < 1e-12);
    assert!((pre[1].1 - bisect(f, 0.5, 1.0, 0.0, "R").unwrap()).abs() < 1e-12);
    assert!((pre[0].1 - 0.146447).abs() < 1e-6 && (pre[1].1 - 0.853553).abs() < 1e-6);

    assert_eq!(preimage_branches(0.6, 0.6), vec![(BranchLabel::Critical, 0.5)]);
    assert!(preimage_branches(0.6, 0.9).is_empty());
}

#[test]
fn lift_examples() {
    assert_eq!(lift_gamma(1.0, 0.5), 1.0);
    assert!((lift_gamma(0.6, 0.75) - 1.45).abs() < 1e-15);
    assert!((lift_gamma(0.6, 2.25) - (4.0 + 0.45)).abs() < 1e-14);
}

#[test]
fn parametrized_extension_maps() {
    assert_eq!(logistic::tal_tent_parametrized(1.5), 3.0);
    assert_eq!(logistic::tal1_parametrized(0.25), 0.75);
    assert_eq!(logistic::tal1_parametrized(0.75), 1.25);
    assert_eq!(logistic::tal1_parametrized(1.25), 2.75);
}

#[test]
fn critical_orbit_examples() {
    let q = critical_orbit(0.2, 100);
    assert_eq!(q[0], 0.2);
    assert!(q.windows(2).all(|w| w[1] < w[0]));
    assert!(q[99] < 1e-9);

    let q = critical_orbit(0.6, 400);
    assert!((q[399] - (1.0 - 1.0 / 2.4)).abs() < 1e-9);

    assert_eq!(critical_orbit(1.0, 5), vec![1.0, 0.0, 0.0, 0.0, 0.0]);
}

#[test]
fn attracting_period_examples() {
    assert_eq!(attracting_period_default(0.6, 16), Some(1));
    assert_eq!(attracting_period_default(0.8, 16), Some(2));
    assert_eq!(attracting_period_default(0.96, 16), Some(3));
    // the critical orbit of the full map lands on the repelling fixed point 0
    assert_eq!(attracting_period_default(1.0, 16), Some(1));
    assert_eq!(critical_orbit(1.0, 3)[2], 0.0);
}

#[test]
fn superstable_examples() {
    assert_eq!(superstable_parameter(0).unwrap(), 0.5);
    // α_λ(λ) = ½ is the cubic 4λ²(1 − λ) = ½
    let cubic = |l: f64| 4.0 * l * l * (1.0 - l) - 0.5;
    let oracle = bisect(cubic, 0.75, (1.0 + 6f64.sqrt()) / 4.0, 0.0, "s1").unwrap();
    let s1 = superstable_parameter(1).unwrap();
    assert!((s1 - oracle).abs() < 1e-12, "{s1} vs {oracle}");
    let s3 = superstable_parameter(3).unwrap();
    assert!(s3 > period_doubling_parameter(3).unwrap() && s3 < period_doubling_parameter(4).unwrap());
}

#[test]
fn period_doubling_examples() {
    assert!((period_doubling_parameter(1).unwrap() - 0.75).abs() < 1e-8);
    assert!((period_doubling_parameter(2).unwrap() - (1.0 + 6f64.sqrt()) / 4.0).abs() < 1e-6);
    let t = table();
    for n in 1..t.n_max() {
        assert!(t.lambda[n] < t.superstable[n] && t.superstable[n] < t.lambda[n + 1], "n = {n}");
    }
}

#[test]
fn feigenbaum_examples() {
    assert!((feigenbaum_limit_estimate(6).unwrap() - 0.89249).abs() < 2e-3);
    let l3 = period_doubling_parameter(3).unwrap();
    let e3 = feigenbaum_limit_estimate(3).unwrap();
    assert!(e3 > l3 && e3 < 1.0);

    // successive gaps shrink by roughly the Feigenbaum ratio
    let l = &table().lambda;
    for n in 2..l.len() - 2 {
        let ratio = (l[n] - l[n - 1]) / (l[n + 1] - l[n]);
        assert!(ratio > 4.0 && ratio < 5.0, "n = {n}: {ratio}");
    }
    let errs: Vec<f64> = (4..=7)
        .map(|k| (feigenbaum_limit_estimate(k).unwrap() - table().lambda_inf).abs())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
}

#[test]
fn mu_examples() {
    assert_eq!(mu_parameter(0).unwrap(), 1.0);
    let t = table();
    assert!(t.mu[1] > t.lambda_inf && t.mu[1] < 1.0);
    assert!(t.mu[2] < t.mu[1]);
    for n in 1..t.mu.len() {
        assert!(mu_residual(t.mu[n], n).unwrap() < 1e-9);
    }
    assert!(mu_residual(0.99, 0).is_err());
}

#[test]
fn window_examples() {
    let w1 = window_boundaries(1).unwrap();
    // the period-3 saddle-node sits at 1 + √8 in the usual r = 4λ scaling
    assert!((w1.eta - (1.0 + 8f64.sqrt()) / 4.0).abs() < 1e-10, "{}", w1.eta);
    assert!(w1.eta < 0.9572 && 0.9572 <= w1.nu);
    assert_eq!(attracting_period_default(0.9572, 32), Some(3));
    let w2 = table().windows[1].edges;
    assert!(w2.eta < w1.eta && w2.nu < w1.nu);
    for w in &table().windows {
        let p = 2 * w.edges.n + 1;
        assert!(w.edges.eta < w.edges.nu);
        let mid = 0.5 * (w.edges.eta + w.edges.nu);
        assert_eq!(attracting_period_default(mid, 64), Some(p), "window {}", w.edges.n);
    }
}

#[test]
fn cascade_order() {
    let t = table();
    let mut chain: Vec<f64> = Vec::new();
    for n in 1..=t.n_max() {
        chain.push(t.lambda[n]);
        if n < t.n_max() {
            chain.push(t.superstable[n]);
        }
    }
    chain.push(t.lambda_inf);
    chain.extend(t.mu.iter().skip(1).rev());
    let w1 = t.windows[0].edges;
    chain.extend([w1.eta, w1.nu]);
    assert!(chain.windows(2).all(|w| w[0] < w[1]), "{chain:?}");
    assert!(w1.nu <= 1.0);
    assert!(t.rows().iter().all(|r| r.value > 0.0 && r.value <= 1.0));
}

#[test]
fn classify_examples() {
    let r = classify_regime(0.6).unwrap();
    assert_eq!(r.tag, RegimeTag::CascadeStage(0));
    assert_eq!(r.bracket.0, 0.25);
    assert!((r.bracket.1 - 0.75).abs() < 1e-10);
    assert!(!r.irreducible_continuum);
    assert_eq!(classify_regime(0.8).unwrap().tag, RegimeTag::CascadeStage(1));
    assert_eq!(classify_regime(1.0).unwrap().tag, RegimeTag::Full);
    assert_eq!(classify_regime(0.1).unwrap().tag, RegimeTag::CascadeStage(-1));
    assert_eq!(classify_regime(0.9572).unwrap().tag, RegimeTag::Window(1));

    let t = table();
    let r = classify_regime(t.mu[1]).unwrap();
    assert_eq!(r.tag, RegimeTag::MuPoint(1));
    assert!(r.irreducible_continuum);
    let w = &t.windows[0];
    let mid = 0.5 * (w.lambda[1] + w.lambda[2]);
    assert_eq!(classify_regime(mid).unwrap().tag, RegimeTag::WindowCascadeStage(1, 1));
    assert_eq!(classify_regime(t.lambda_inf).unwrap().tag, RegimeTag::FeigenbaumLimit);
}

#[test]
fn sweep_periods_follow_the_tables() {
    let t = table();
    // inside each stage the attracting period is the one the table predicts
    for n in 0..5 {
        let mid = 0.5 * (t.lambda[n] + t.lambda[n + 1]);
        assert_eq!(attracting_period_default(mid, 64), Some(1 << n), "stage {n}");
    }
    for w in &t.windows {
        let base = 2 * w.edges.n + 1;
        for m in 0..w.lambda.len() - 1 {
            let mid = 0.5 * (w.lambda[m] + w.lambda[m + 1]);
            assert_eq!(
                attracting_period_default(mid, 256),
                Some(base << m),
                "window {} stage {m}",
                w.edges.n
            );
        }
    }
    // period 3 shows up only in the first window
    let (lo, hi) = (t.windows[0].lambda[0], t.windows[0].lambda[1]);
    let steps = 4000;
    for i in 0..steps {
        let l = 0.75 + 0.25 * i as f64 / steps as f64;
        if attracting_period_default(l, 3) == Some(3) {
            assert!(l > lo - 1e-9 && l <= hi + 1e-9, "period 3 at {l}");
        }
    }
}

#[test]
fn continuum_examples() {
    let g = continuum_graph(RegimeTag::CascadeStage(2)).unwrap();
    assert_eq!(g.count(|k| matches!(k, NodeKind::RayR)), 1);
    assert_eq!(g.count(|k| matches!(k, NodeKind::Ray { k: 1, .. })), 2);
    assert_eq!(g.arcs(), 2);
    assert_eq!(g.endpoint_period(), 4);

    let g = continuum_graph(RegimeTag::MuPoint(1)).unwrap();
    assert_eq!((g.rays(), g.bjk()), (1, 2));
    assert_eq!(g.intersections.len(), 1);
    assert_eq!(g.intersections[0].period, 1);

    let g = continuum_graph(RegimeTag::WindowCascadeStage(1, 0)).unwrap();
    assert_eq!(g.nodes.len(), 2);
    assert!(g.intersections.is_empty());
    assert_eq!(g.closure["R"].len(), 2);
    let w = continuum_graph(RegimeTag::Window(1)).unwrap();
    assert_eq!(g.closure, w.closure);
    assert_eq!(g.permutation, w.permutation);

    for tag in [RegimeTag::CascadeStage(0), RegimeTag::Full, RegimeTag::ChaoticUnclassified] {
        assert!(matches!(continuum_graph(tag), Err(Error::UnsupportedRegime(_))));
    }
}

#[test]
fn continuum_json_and_dot() {
    let g = continuum_graph(RegimeTag::CascadeStage(2)).unwrap();
    let v = serde_json::to_value(&g).unwrap();
    for key in ["nodes", "closure", "intersections", "permutation"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v["nodes"][0].get("id").is_some() && v["nodes"][0].get("kind").is_some());
    let dot = g.to_dot();
    assert!(dot.starts_with("digraph") || dot.starts_with("graph"));
    assert!(dot.contains("I[1]"));
}

#[test]
fn table_rows_have_residuals() {
    let rows = table().rows();
    for name in ["lambda", "superstable", "lambda_inf", "mu"] {
        assert!(rows.iter().any(|r| r.name == name), "{name}");
    }
    for r in rows.iter().filter(|r| r.name == "superstable" || r.name == "mu") {
        assert!(r.residual < 1e-9, "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn y_is_exactly_the_missing_image(lambda in 0.05f64..0.999, s in 0.0f64..1.0) {
        let above = lambda + (1.0 - lambda) * s;
        if above > lambda + 1e-11 {
            prop_assert!(preimage_branches(lambda, above).is_empty());
        }
        let below = lambda * s;
        let pre = preimage_branches(lambda, below);
        prop_assert_eq!(pre.len(), 2);
        for (_, x) in pre {
            prop_assert!((logistic::eval(lambda, x).unwrap() - below).abs() <= EPS_CHAIN);
        }
    }

    #[test]
    fn lift_reduces_to_the_map(lambda in 0.05f64..0.999, t in -50.0f64..50.0) {
        let g = lift_gamma(lambda, t);
        let a = logistic::eval(lambda, t - t.floor()).unwrap();
        prop_assert!((g - g.floor() - a).abs() < 1e-11);
    }

    #[test]
    fn lift_is_injective(lambda in 0.05f64..=1.0, i in -5000i32..5000, j in -5000i32..5000) {
        prop_assume!(i != j);
        let (t, u) = (i as f64 / 1000.0, j as f64 / 1000.0);
        prop_assert_ne!(lift_gamma(lambda, t), lift_gamma(lambda, u));
    }

    #[test]
    fn continuum_graphs_satisfy_their_theorems(n in 1usize..7, m in 0usize..4, wn in 1usize..4) {
        for tag in [RegimeTag::CascadeStage(n as i32), RegimeTag::MuPoint(n), RegimeTag::WindowCascadeStage(wn, m)] {
            let g = continuum_graph(tag).unwrap();
            prop_assert_eq!(g.check(), Ok(()));
        }
        let c = continuum_graph(RegimeTag::CascadeStage(n as i32)).unwrap();
        prop_assert_eq!((c.rays(), c.arcs()), ((1 << n) - 1, 1 << (n - 1)));
        let mu = continuum_graph(RegimeTag::MuPoint(n)).unwrap();
        prop_assert_eq!((mu.rays(), mu.bjk()), ((1 << n) - 1, 1 << n));
        let w = continuum_graph(RegimeTag::WindowCascadeStage(wn, m)).unwrap();
        let odd = 2 * wn + 1;
        prop_assert_eq!(w.rays(), 1 + ((1 << m) - 1) * odd);
        prop_assert_eq!(w.arcs(), if m == 0 { 0 } else { (1 << (m - 1)) * odd });
        prop_assert_eq!(w.endpoint_period(), (1 << m) * odd);
    }
}
