use proptest::prelude::*;
use revext::circle::CircleHomeo;
use revext::dynamics::PartialMapSystem;
use revext::extension::{
    chain_distance, extension_record, factor_map, hausdorff, lift_semiconjugacy, sample_stratum,
    Chain, ChainMetricParams, ExtensionSpec, InverseOrbitRecord, StratumIndex, StratumSample,
};
use revext::logistic;
use revext::space::{Interval, IntervalSet, StateSpace};
use revext::{Error, EPS_CHAIN};

fn spec(lambda: f64) -> ExtensionSpec {
    logistic::extension_spec(lambda).unwrap()
}

#[test]
fn validate_chain_examples() {
    let s = spec(0.6);
    assert!(s.validate_chain(&Chain::terminal(vec![0.8])));
    // 0.3 < λ has preimages, so it is not in Y
    assert!(!s.system.preimages(0.3).is_empty());
    assert!(!s.validate_chain(&Chain::terminal(vec![0.3])));
    assert!(!s.validate_chain(&Chain::truncated(vec![0.5, 0.2])));
}

#[test]
fn cosurjectivity_set_must_cover_missing_image() {
    let sys = logistic::system(0.6);
    let too_small = IntervalSet::new(StateSpace::UNIT_INTERVAL, vec![Interval::new(0.8, 1.0)]);
    assert!(matches!(
        ExtensionSpec::new(sys, too_small),
        Err(Error::InvalidCosurjectivitySet { .. })
    ));
}

#[test]
fn alpha_tilde_examples() {
    let s = spec(0.6);
    let up = s.alpha_tilde(&Chain::terminal(vec![0.8])).unwrap();
    assert!(up.terminal);
    assert_eq!(up.coords.len(), 2);
    assert!((up.coords[0] - 0.384).abs() < 1e-15);
    assert_eq!(up.coords[1], 0.8);

    let rot = ExtensionSpec::new(
        PartialMapSystem::rotation(0.25),
        StateSpace::CIRCLE.whole(),
    )
    .unwrap();
    let c = rot.alpha_tilde(&Chain::truncated(vec![0.0, 0.75])).unwrap();
    assert_eq!(c.coords, vec![0.25, 0.0, 0.75]);

    assert!(matches!(
        s.alpha_tilde(&Chain::terminal(vec![1.3])),
        Err(Error::OutsideDomain { .. })
    ));
}

#[test]
fn alpha_tilde_inv_examples() {
    let s = spec(0.6);
    let c = Chain::terminal(vec![0.384, 0.8]);
    assert_eq!(s.alpha_tilde_inv(&c).unwrap(), Chain::terminal(vec![0.8]));
    assert_eq!(
        s.alpha_tilde_inv(&Chain::terminal(vec![0.8])),
        Err(Error::NotInImage)
    );
}

#[test]
fn factor_map_examples() {
    assert_eq!(factor_map(&Chain::terminal(vec![0.384, 0.8])), 0.384);
    assert_eq!(factor_map(&Chain::terminal(vec![0.3])), 0.3);
}

#[test]
fn sample_stratum_examples() {
    let s = spec(0.6);
    let m0 = sample_stratum(&s, StratumIndex::Finite(0), 5, 10).unwrap();
    let heads: Vec<f64> = m0.chains.iter().map(|c| c.coords[0]).collect();
    assert_eq!(m0.chains.len(), 5);
    for (got, want) in heads.iter().zip([0.6, 0.7, 0.8, 0.9, 1.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    assert!(m0.chains.iter().all(|c| c.terminal && c.len() == 1));

    for n in [1, 4, 9] {
        assert!(matches!(
            sample_stratum(&spec(1.0), StratumIndex::Finite(n), 8, 10),
            Err(Error::EmptyStratum { .. })
        ));
    }
}

#[test]
fn homeomorphism_strata_are_shifted_copies_of_y() {
    let tau = 0.1;
    let y = IntervalSet::new(StateSpace::CIRCLE, vec![Interval::new(0.0, 0.25)]);
    let s = ExtensionSpec::new(PartialMapSystem::rotation(tau), y.clone()).unwrap();
    let m3 = sample_stratum(&s, StratumIndex::Finite(3), 11, 10).unwrap();
    assert!(m3.chains.len() >= 11);
    for c in &m3.chains {
        assert!(c.terminal && c.depth() == 3);
        assert!(y.contains(c.coords[3]));
        let shifted = StateSpace::CIRCLE.normalize(c.coords[3] + 3.0 * tau);
        assert!(StateSpace::CIRCLE.metric(c.coords[0], shifted) < 1e-12);
    }
}

#[test]
fn unitary_case_has_only_the_inverse_limit() {
    let s = ExtensionSpec::new(
        PartialMapSystem::rotation(0.3),
        IntervalSet::empty(StateSpace::CIRCLE),
    )
    .unwrap();
    for n in 0..5 {
        assert!(sample_stratum(&s, StratumIndex::Finite(n), 8, 6).is_err());
    }
    let inf = sample_stratum(&s, StratumIndex::Infinite, 8, 6).unwrap();
    assert!(!inf.chains.is_empty());
    for c in &inf.chains {
        assert!(!c.terminal && c.len() == 7 && s.validate_chain(c));
    }
}

#[test]
fn constant_map_strata() {
    let p = 0.25;
    let sys = PartialMapSystem::constant(p);
    let s = ExtensionSpec::new(sys, StateSpace::UNIT_INTERVAL.whole()).unwrap();
    let grid = StateSpace::UNIT_INTERVAL.grid(9);
    for n in 1..5 {
        let m = sample_stratum(&s, StratumIndex::Finite(n), 9, 8).unwrap();
        let mut tails: Vec<f64> = m.chains.iter().map(|c| c.coords[n]).collect();
        tails.sort_by(f64::total_cmp);
        // the grid, plus p itself reached by backward paths
        assert!(grid.iter().all(|g| tails.iter().any(|t| (t - g).abs() < 1e-12)));
        assert!(m.chains.iter().all(|c| c.coords[..n].iter().all(|&x| x == p)));
    }
    let inf = sample_stratum(&s, StratumIndex::Infinite, 9, 8).unwrap();
    assert_eq!(inf.chains, vec![Chain::truncated(vec![p; 9])]);
}

#[test]
fn chain_distance_examples() {
    let space = StateSpace::UNIT_INTERVAL;
    let p = ChainMetricParams::default();
    let a = Chain::truncated(vec![0.3, 0.1, 0.6]);
    assert_eq!(chain_distance(&space, &a, &a, &p), 0.0);

    // one chain stops, the other continues for three more coordinates
    let stopped = Chain::terminal(vec![0.8]);
    let going = Chain::truncated(vec![0.8, 0.4, 0.2, 0.1]);
    let want = 0.5 + 0.25 + 0.125;
    assert!((chain_distance(&space, &stopped, &going, &p) - want).abs() < 1e-15);
    let half_gap = ChainMetricParams {
        terminal_gap: 0.5,
        ..p
    };
    assert!((chain_distance(&space, &stopped, &going, &half_gap) - want / 2.0).abs() < 1e-15);
}

#[test]
fn distance_shrinks_as_truncations_share_more() {
    // backward paths for λ = 1 that follow L for k steps and then switch to R
    let s = spec(1.0);
    let space = s.space();
    let p = ChainMetricParams::default();
    let path = |switch: usize| {
        let mut c = vec![0.3];
        for k in 0..12 {
            let pre = s.system.preimages(c[k]);
            c.push(if k < switch { pre[0].1 } else { pre[pre.len() - 1].1 });
        }
        Chain::truncated(c)
    };
    let base = path(12);
    let d: Vec<f64> = (1..12).map(|k| chain_distance(&space, &base, &path(k), &p)).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

#[test]
fn hausdorff_examples() {
    let s = spec(0.6);
    let space = s.space();
    let p = ChainMetricParams::default();
    let a = sample_stratum(&s, StratumIndex::Finite(4), 9, 10).unwrap();
    assert_eq!(hausdorff(&space, &a, &a, &p).unwrap(), 0.0);

    let one = |c: Chain| StratumSample {
        n: StratumIndex::Infinite,
        depth: 3,
        chains: vec![c],
    };
    let x = Chain::truncated(vec![0.2, 0.1]);
    let y = Chain::truncated(vec![0.4, 0.3]);
    let h = hausdorff(&space, &one(x.clone()), &one(y.clone()), &p).unwrap();
    assert_eq!(h, chain_distance(&space, &x, &y, &p));

    let empty = StratumSample {
        n: StratumIndex::Finite(1),
        depth: 0,
        chains: vec![],
    };
    assert!(matches!(
        hausdorff(&space, &a, &empty, &p),
        Err(Error::EmptyStratum { .. })
    ));

    let inf = sample_stratum(&s, StratumIndex::Infinite, 12, 25).unwrap();
    let near = sample_stratum(&s, StratumIndex::Finite(25), 12, 25).unwrap();
    let far = sample_stratum(&s, StratumIndex::Finite(5), 12, 25).unwrap();
    assert!(hausdorff(&space, &near, &inf, &p).unwrap() < hausdorff(&space, &far, &inf, &p).unwrap());
}

#[test]
fn stratum_json_layout() {
    let s = spec(0.6);
    let m = sample_stratum(&s, StratumIndex::Finite(1), 2, 5).unwrap();
    let v = serde_json::to_value(&m).unwrap();
    assert_eq!(v["N"], 1);
    assert_eq!(v["depth"], 1);
    assert!(v["chains"][0]["coords"].is_array());
    assert_eq!(v["chains"][0]["terminal"], true);
    let inf = sample_stratum(&s, StratumIndex::Infinite, 2, 3).unwrap();
    let v = serde_json::to_value(&inf).unwrap();
    assert_eq!(v["N"], "inf");
    let back: StratumSample = serde_json::from_value(v).unwrap();
    assert_eq!(back, inf);
}

#[test]
fn lift_of_factor_map_is_identity() {
    let s = spec(0.6);
    let mut chains = sample_stratum(&s, StratumIndex::Finite(3), 6, 10).unwrap().chains;
    chains.extend(sample_stratum(&s, StratumIndex::Infinite, 6, 5).unwrap().chains);
    let records: Vec<_> = chains.iter().map(extension_record).collect();
    let lifted = lift_semiconjugacy(factor_map, &records, &s).unwrap();
    for ((src, chain), orig) in lifted.iter().zip(&chains) {
        assert_eq!(src, orig);
        assert_eq!(chain, orig);
    }
}

#[test]
fn lift_from_rotation_gives_truncated_chains() {
    let h = CircleHomeo::rigid(0.2);
    let s = ExtensionSpec::new(h.system(), StateSpace::CIRCLE.whole()).unwrap();
    let records: Vec<InverseOrbitRecord<f64>> = (0..10)
        .map(|i| {
            let mut orbit = vec![i as f64 / 10.0];
            for _ in 0..6 {
                orbit.push(h.lift_inv(orbit[orbit.len() - 1]));
            }
            InverseOrbitRecord {
                orbit,
                terminated: false,
            }
        })
        .collect();
    let lifted = lift_semiconjugacy(|y: &f64| *y, &records, &s).unwrap();
    assert!(lifted.iter().all(|(_, c)| !c.terminal && c.len() == 7));

    let bad = lift_semiconjugacy(|y: &f64| y * y, &records, &s);
    assert!(matches!(bad, Err(Error::InvalidLift { .. })));
}

fn lambda_choice() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.2, 0.6, 0.8, 1.0])
}

/// A backward path from `x₀ = t·λ` following the branch bits.
fn backward_chain(s: &ExtensionSpec, lambda: f64, t: f64, bits: &[bool]) -> Chain {
    let mut coords = vec![t * lambda];
    for &b in bits {
        let pre = s.system.preimages(coords[coords.len() - 1]);
        if pre.is_empty() {
            break;
        }
        coords.push(if b { pre[pre.len() - 1].1 } else { pre[0].1 });
    }
    let terminal = s.system.preimages(coords[coords.len() - 1]).is_empty();
    Chain::new(coords, terminal)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn round_trips(lambda in lambda_choice(), t in 0.0f64..=1.0, bits in prop::collection::vec(any::<bool>(), 0..15)) {
        let s = spec(lambda);
        let c = backward_chain(&s, lambda, t, &bits);
        prop_assert!(s.validate_chain(&c));
        let up = s.alpha_tilde(&c).unwrap();
        prop_assert_eq!(&s.alpha_tilde_inv(&up).unwrap(), &c);
        if c.len() >= 2 {
            // x₀ is recomputed from x₁, so agreement is up to rounding
            let back = s.alpha_tilde(&s.alpha_tilde_inv(&c).unwrap()).unwrap();
            prop_assert_eq!(&back.coords[1..], &c.coords[1..]);
            prop_assert!((back.coords[0] - c.coords[0]).abs() <= EPS_CHAIN);
        }
        // same arithmetic path on both sides
        prop_assert_eq!(factor_map(&up), s.system.apply(factor_map(&c)).unwrap());
    }

    #[test]
    fn stratum_shift(lambda in prop::sample::select(vec![0.2, 0.6, 0.8]), n in 0usize..8) {
        let s = spec(lambda);
        let m = sample_stratum(&s, StratumIndex::Finite(n), 7, 10).unwrap();
        for c in &m.chains {
            let up = s.alpha_tilde(c).unwrap();
            prop_assert!(up.terminal && up.depth() == n + 1 && s.validate_chain(&up));
        }
    }

    #[test]
    fn sampled_chains_validate(lambda in lambda_choice(), n in 0usize..6) {
        let s = spec(lambda);
        if let Ok(m) = sample_stratum(&s, StratumIndex::Finite(n), 6, 8) {
            prop_assert!(m.chains.iter().all(|c| s.validate_chain(c) && c.depth() == n));
        }
        let inf = sample_stratum(&s, StratumIndex::Infinite, 6, 8).unwrap();
        prop_assert!(inf.chains.iter().all(|c| s.validate_chain(c) && !c.terminal));
        prop_assert!(inf.chains.iter().all(|c| (s.system.apply(c.coords[1]).unwrap() - c.coords[0]).abs() <= EPS_CHAIN));
    }

    #[test]
    fn chain_distance_is_symmetric(lambda in lambda_choice(), t in 0.0f64..=1.0, u in 0.0f64..=1.0,
        b1 in prop::collection::vec(any::<bool>(), 0..10), b2 in prop::collection::vec(any::<bool>(), 0..10)) {
        let s = spec(lambda);
        let p = ChainMetricParams::default();
        let a = backward_chain(&s, lambda, t, &b1);
        let b = backward_chain(&s, lambda, u, &b2);
        let d = chain_distance(&s.space(), &a, &b, &p);
        prop_assert_eq!(d, chain_distance(&s.space(), &b, &a, &p));
        prop_assert!(d >= 0.0 && d <= 2.0);
    }
}
