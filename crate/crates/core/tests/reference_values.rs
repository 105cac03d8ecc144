//! Published values that are cheap enough to check on every test run.

use std::f64::consts::PI;

use entinflate::families::{nme, w, werner, AuxQubit, RngSeed};
use entinflate::inflation::{run, EbRun, OutcomePolicy, PbMixed, PbPure, ProtocolConfig};
use entinflate::measures::{ggm, tangle, CutPolicy};
use entinflate::optsearch::analytic::{analytic_gc_nme, analytic_ggm_curve_maxent};
use entinflate::optsearch::{eb_critical, max_over_aux, pb_critical, SearchSpec};
use entinflate::povm::phi_plus;
use entinflate::state::QState;

fn pb_final(lam: f64, aux: Vec<AuxQubit>, outcomes: Vec<usize>) -> entinflate::state::PureState {
    let cfg = ProtocolConfig::pb(phi_plus(), lam, aux).with_outcomes(OutcomePolicy::Fixed(outcomes));
    run(&cfg).unwrap().final_state().as_pure().unwrap().clone()
}

#[test]
fn maxent_round_one_outcomes_are_uniform() {
    for (t, p) in [(0.0, 0.0), (1.0, 2.0), (PI, 5.0)] {
        let aux = AuxQubit::new(t, p).unwrap();
        for lam in [0.2, 2.0 / 3.0, 0.9] {
            for k in 1..=4 {
                let cfg = ProtocolConfig::pb(phi_plus(), lam, vec![aux])
                    .with_outcomes(OutcomePolicy::Fixed(vec![k]));
                let r = run(&cfg).unwrap();
                assert!((r.records[0].probability - 0.25).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn maxent_round_one_critical_point() {
    let s = pb_final(2.0 / 3.0, vec![AuxQubit::zero()], vec![1]);
    assert!((ggm(&s, CutPolicy::All).unwrap().value - 1.0 / 6.0).abs() < 1e-12);
    let r = pb_critical(&phi_plus(), 1, 1, None, &SearchSpec::default()).unwrap();
    assert!((r.lambda_c - 2.0 / 3.0).abs() < 0.005);
    assert!((r.value_c - 1.0 / 6.0).abs() < 0.002);
    assert!(r.aux_independent);
}

#[test]
fn projective_limit_is_biseparable_and_w_class() {
    for k in 1..=4 {
        let s = pb_final(1.0, vec![AuxQubit::new(0.7, 0.3).unwrap()], vec![k]);
        assert!(ggm(&s, CutPolicy::All).unwrap().value < 1e-12);
        for lam in [0.1, 0.5, 0.8] {
            let s = pb_final(lam, vec![AuxQubit::new(1.2, 0.4).unwrap()], vec![k]);
            assert!(tangle(&s).unwrap() < 1e-10);
        }
    }
}

#[test]
fn eb_maxent_outcomes_stay_uniform() {
    for lam in [0.3, 0.7] {
        let cfg = ProtocolConfig::eb(phi_plus(), lam, 3)
            .with_outcomes(OutcomePolicy::Sampled(RngSeed(3)));
        for r in run(&cfg).unwrap().records {
            assert!((r.probability - 0.25).abs() < 1e-12);
        }
    }
}

#[test]
fn eb_round_one_critical_value() {
    let r = eb_critical(&QState::Pure(phi_plus()), 1, 1, None, &SearchSpec::default()).unwrap();
    assert!((r.value_c - 0.25).abs() < 0.003);
}

#[test]
fn eb_rounds_two_and_three_coincide() {
    let seed = QState::Pure(phi_plus());
    let two = EbRun::new(&seed, 2, 1, Some(CutPolicy::All));
    let three = EbRun::new(&seed, 3, 1, Some(CutPolicy::All));
    for i in 1..20 {
        let lam = i as f64 / 20.0;
        assert!((two.value(lam) - three.value(lam)).abs() < 1e-6, "lambda {lam}");
    }
}

#[test]
fn eb_nme_is_nearly_round_independent() {
    let spec = SearchSpec::coarse(0.01, 1);
    for z in [0.6, 0.7] {
        let seed = QState::Pure(nme(z).unwrap());
        let one = eb_critical(&seed, 1, 1, None, &spec).unwrap();
        let two = eb_critical(&seed, 2, 1, None, &spec).unwrap();
        assert!((one.value_c - two.value_c).abs() < 0.02, "z {z}");
    }
}

#[test]
fn maxent_ggm_decreases_over_rounds() {
    let spec = SearchSpec::default();
    let mut last = f64::INFINITY;
    for rounds in 1..=3 {
        let k = PbPure::new(&phi_plus(), rounds, 1, None);
        let r = max_over_aux(&|x| k.ggm(2.0 / 3.0, x), k.n_angles(), &spec, None, 0);
        assert!(r.value < last - 1e-3, "round {rounds}");
        last = r.value;
    }
    assert!((analytic_ggm_curve_maxent(2.0 / 3.0) - 1.0 / 6.0).abs() < 1e-14);
}

#[test]
fn w_seed_round_one() {
    let r = pb_critical(&w(), 1, 1, None, &SearchSpec::default()).unwrap();
    assert!((r.value_c - 0.168).abs() < 0.003);
    assert!((r.lambda_c - 0.693).abs() < 0.005);
}

#[test]
fn nme_optimum_sits_at_theta_zero() {
    for z in [0.3, 0.6] {
        let k = PbPure::new(&nme(z).unwrap(), 1, 1, None);
        let r = pb_critical(&nme(z).unwrap(), 1, 1, None, &SearchSpec::default()).unwrap();
        let lam = r.lambda_c;
        let at_zero = k.ggm(lam, &[0.0, 1.3]);
        assert!((r.value_c - at_zero).abs() < 1e-6);
        assert!((at_zero - analytic_gc_nme(z).unwrap()).abs() < 1e-4);
        for i in 1..=16 {
            let th = PI * i as f64 / 16.0;
            assert!(k.ggm(lam, &[th, 1.3]) <= at_zero + 1e-9);
        }
        // phi is irrelevant at theta = 0
        assert!((k.ggm(lam, &[0.0, 4.0]) - at_zero).abs() < 1e-14);
    }
}

#[test]
fn separable_werner_has_no_monogamy_score() {
    for p in [0.0, 0.2, 1.0 / 3.0] {
        let k = PbMixed::new(&werner(p).unwrap(), 1, 1);
        for i in 0..=10 {
            let lam = i as f64 / 10.0;
            for angles in [[0.0, 0.0], [1.0, 2.0], [2.5, 4.0]] {
                assert!(k.monogamy(lam, &angles).abs() < 1e-10);
            }
        }
    }
}
