use std::f64::consts::{FRAC_PI_4, PI};

use entinflate::families::{gghz, haar_pure, nme, werner, AuxQubit, RngSeed};
use entinflate::inflation::{run, OutcomePolicy, PbPure, ProtocolConfig, Scheme};
use entinflate::linalg::{hermitian_eigenvalues, CMatrix, C64};
use entinflate::measures::{
    entanglement_entropy, ggm, monogamy_score_negativity, negativity, tangle, CutPolicy,
};
use entinflate::optsearch::{max_over_aux, pb_critical, SearchSpec};
use entinflate::povm::{apply_outcome, build_povm, outcome_distribution, phi_plus};
use entinflate::state::{
    max_schmidt_sq, partial_trace, tensor, Bipartition, MixedState, PartyLabel, PureState, QState,
};
use proptest::prelude::*;

fn pure_from(n: usize, raw: &[f64]) -> PureState {
    let amps = raw.chunks(2).take(1 << n).map(|c| C64::new(c[0], c[1])).collect();
    PureState::from_unnormalized(amps).unwrap()
}

fn mixed_from(n: usize, raw: &[f64]) -> MixedState {
    let dim = 1 << n;
    let g = CMatrix::from_fn(dim, |r, s| C64::new(raw[2 * (r * dim + s)], raw[2 * (r * dim + s) + 1]));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    MixedState::new(m.scale(C64::new(1.0 / tr, 0.0))).unwrap()
}

fn pure_state(max_n: usize) -> impl Strategy<Value = PureState> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0..1.0f64, 2 << n).prop_map(move |raw| pure_from(n, &raw))
    })
}

fn mixed_state(max_n: usize) -> impl Strategy<Value = MixedState> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-1.0..1.0f64, 2 << (2 * n)).prop_map(move |raw| mixed_from(n, &raw))
    })
}

fn cut_of(n: usize, mask: u32) -> Bipartition {
    // non-empty proper subset from the mask
    let m = (mask as usize % ((1 << n) - 2)) + 1;
    let side: Vec<PartyLabel> = (0..n).filter(|s| m >> s & 1 == 1).map(|s| PartyLabel(s + 1)).collect();
    Bipartition::new(&side, n).unwrap()
}

fn spectrum(m: &CMatrix) -> Vec<f64> {
    hermitian_eigenvalues(m).unwrap()
}

/// `e^{ia} [[e^{ib} cos g, e^{id} sin g], [-e^{-id} sin g, e^{-ib} cos g]]` on one slot.
fn apply_local_unitary(amps: &mut [C64], n: usize, slot: usize, p: [f64; 4]) {
    let [a, b, g, d] = p;
    let ph = C64::from_polar(1.0, a);
    let u = [
        [ph * C64::from_polar(g.cos(), b), ph * C64::from_polar(g.sin(), d)],
        [-ph * C64::from_polar(g.sin(), -d), ph * C64::from_polar(g.cos(), -b)],
    ];
    let m = 1 << (n - 1 - slot);
    for i in 0..amps.len() {
        if i & m == 0 {
            let (x, y) = (amps[i], amps[i | m]);
            amps[i] = u[0][0] * x + u[0][1] * y;
            amps[i | m] = u[1][0] * x + u[1][1] * y;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn schmidt_symmetry(s in pure_state(5), mask in any::<u32>()) {
        let n = s.n_parties();
        let cut = cut_of(n, mask);
        let a = spectrum(&s.reduced_density(cut.side_a()).unwrap());
        let b = spectrum(&s.reduced_density(cut.side_b()).unwrap());
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let k = a.len().min(b.len());
        for i in 0..k {
            prop_assert!((a[i] - b[i]).abs() < 1e-10);
        }
        let longer = if a.len() > b.len() { &a } else { &b };
        prop_assert!(longer[k..].iter().all(|v| v.abs() < 1e-10));
        let ms = max_schmidt_sq(&s, &cut).unwrap();
        let lo = 1.0 / (1usize << cut.smaller_side().len()) as f64;
        prop_assert!(ms >= lo - 1e-12 && ms <= 1.0 + 1e-12);
    }

    #[test]
    fn partial_trace_inverts_tensor(r in mixed_state(3), t in mixed_state(2)) {
        let joint = r.tensor(&t);
        let keep: Vec<PartyLabel> = r.parties();
        let back = partial_trace(&joint, &keep).unwrap();
        prop_assert!(back.matrix().max_abs_diff(r.matrix()) < 1e-12);
        let q = tensor(&QState::Mixed(r.clone()), &QState::Mixed(t)).unwrap();
        prop_assert_eq!(q.n_parties(), joint.n_parties());
    }

    #[test]
    fn partial_transpose_keeps_trace_and_hermiticity(r in mixed_state(4), mask in any::<u32>()) {
        let cut = cut_of(r.n_parties(), mask);
        let pt = r.partial_transpose(cut.side_a()).unwrap();
        prop_assert!((pt.trace().re - 1.0).abs() < 1e-14);
        prop_assert!(pt.trace().im.abs() < 1e-14);
        prop_assert!(pt.hermiticity_defect() < 1e-14);
        let twice = MixedState::new(pt).ok();
        // a second transpose over the same side is the identity map
        if let Some(m) = twice {
            let back = m.partial_transpose(cut.side_a()).unwrap();
            prop_assert!(back.max_abs_diff(r.matrix()) < 1e-15);
        }
    }

    #[test]
    fn root_squares_to_element(lam in 0.0..=1.0f64) {
        let p = build_povm(lam).unwrap();
        let mut sum = CMatrix::zeros(4);
        for k in 1..=4 {
            let r = p.root(k);
            prop_assert!((r * r).max_abs_diff(p.element(k)) < 1e-12);
            sum = sum.add(p.element(k));
        }
        prop_assert!(sum.max_abs_diff(&CMatrix::identity(4)) < 1e-14);
    }

    #[test]
    fn outcome_probabilities_sum_to_one(
        s in (3..=6usize).prop_flat_map(|n| prop::collection::vec(-1.0..1.0f64, 2 << n).prop_map(move |r| pure_from(n, &r))),
        r in (3..=4usize).prop_flat_map(|n| prop::collection::vec(-1.0..1.0f64, 2 << (2 * n)).prop_map(move |raw| mixed_from(n, &raw))),
        lam in 0.0..=1.0f64,
        pick in any::<(u8, u8)>(),
    ) {
        let povm = build_povm(lam).unwrap();
        for q in [QState::Pure(s), QState::Mixed(r)] {
            let n = q.n_parties();
            let i = pick.0 as usize % n;
            let j = (i + 1 + pick.1 as usize % (n - 1)) % n;
            let pair = (PartyLabel(i + 1), PartyLabel(j + 1));
            let d = outcome_distribution(&q, pair, &povm).unwrap();
            prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let direct: f64 = (1..=4).map(|k| apply_outcome(&q, pair, &povm, k).unwrap().probability).sum();
            prop_assert!((direct - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn maxent_round_one_is_outcome_symmetric(lam in 0.01..0.99f64, th in 0.0..PI, ph in 0.0..(2.0 * PI)) {
        let aux = AuxQubit::new(th, ph).unwrap();
        let g: Vec<f64> = (1..=4)
            .map(|k| {
                let cfg = ProtocolConfig::pb(phi_plus(), lam, vec![aux])
                    .with_outcomes(OutcomePolicy::Fixed(vec![k]));
                let t = run(&cfg).unwrap();
                ggm(t.final_state().as_pure().unwrap(), CutPolicy::All).unwrap().value
            })
            .collect();
        for v in &g[1..] {
            prop_assert!((v - g[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn three_party_cut_policies_agree(s in (3..=3usize).prop_flat_map(|n| prop::collection::vec(-1.0..1.0f64, 2 << n).prop_map(move |r| pure_from(n, &r)))) {
        let a = ggm(&s, CutPolicy::All).unwrap().value;
        let b = ggm(&s, CutPolicy::Reduced).unwrap().value;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn ggm_is_local_unitary_invariant(s in pure_state(5), angles in prop::collection::vec(-PI..PI, 20)) {
        let n = s.n_parties();
        let mut amps = s.amplitudes().to_vec();
        for slot in 0..n {
            let p = [angles[4 * slot], angles[4 * slot + 1], angles[4 * slot + 2], angles[4 * slot + 3]];
            apply_local_unitary(&mut amps, n, slot, p);
        }
        let u = PureState::new(amps).unwrap();
        let g0 = ggm(&s, CutPolicy::All).unwrap().value;
        let g1 = ggm(&u, CutPolicy::All).unwrap().value;
        prop_assert!((g0 - g1).abs() < 1e-10);
    }

    #[test]
    fn negativity_two_routes(s in pure_state(4), mask in any::<u32>()) {
        let cut = cut_of(s.n_parties(), mask);
        let schmidt = spectrum(&s.reduced_density(cut.side_a()).unwrap());
        // eigenvalues below the solver's absolute accuracy are zero; their
        // square roots would otherwise add ~1e-9
        let root_sum: f64 = schmidt.iter().filter(|v| **v > 1e-14).map(|v| v.sqrt()).sum();
        let want = (root_sum * root_sum - 1.0) / 2.0;
        let got = negativity(&s.to_density(), &cut).unwrap();
        prop_assert!((got - want).abs() < 1e-10);
    }

    #[test]
    fn product_focus_has_zero_monogamy_score(rest in pure_state(3), th in 0.0..PI, ph in 0.0..(2.0 * PI)) {
        let a = entinflate::families::aux_state(AuxQubit::new(th, ph).unwrap());
        let s = a.tensor(&rest);
        let r = monogamy_score_negativity(&s.to_density(), PartyLabel(1)).unwrap();
        prop_assert!(r.value.abs() < 1e-10);
        prop_assert!(r.bipartite_terms.iter().all(|t| t.1.abs() < 1e-10));
    }

    #[test]
    fn pb_ggm_vanishes_at_both_ends(s in pure_state(2), angles in prop::collection::vec(0.0..PI, 2)) {
        let k = PbPure::new(&s, 1, 1, None);
        prop_assert!(k.ggm(0.0, &angles).abs() < 1e-10);
        prop_assert!(k.ggm(1.0, &angles).abs() < 1e-10);
    }

    #[test]
    fn party_counts_follow_the_scheme(rounds in 1..=3usize, lam in 0.05..0.95f64, eb in any::<bool>(), seed in any::<u64>()) {
        let s = haar_pure(2, &mut RngSeed(seed).rng()).unwrap();
        let cfg = if eb {
            ProtocolConfig::eb(s, lam, rounds)
        } else {
            ProtocolConfig::pb(s, lam, vec![AuxQubit::new(0.4, 1.0).unwrap(); rounds])
        }
        .with_outcomes(OutcomePolicy::Sampled(RngSeed(seed)));
        let t = run(&cfg).unwrap();
        let want = if eb { 2 + 2 * rounds } else { 2 + rounds };
        prop_assert_eq!(t.final_state().n_parties(), want);
        prop_assert_eq!(t.scheme, if eb { Scheme::Eb } else { Scheme::Pb });
        for (i, r) in t.records.iter().enumerate() {
            let step = if eb { 2 } else { 1 };
            prop_assert_eq!(r.parties, 2 + step * (i + 1));
        }
    }
}

#[test]
fn povm_completeness_on_a_grid() {
    for i in 0..=10 {
        let p = build_povm(i as f64 / 10.0).unwrap();
        let sum = (1..=4).fold(CMatrix::zeros(4), |acc, k| acc.add(p.element(k)));
        assert!(sum.max_abs_diff(&CMatrix::identity(4)) < 1e-14);
    }
}

#[test]
fn gghz_tangle_is_sin_squared() {
    for i in 0..=40 {
        let z = FRAC_PI_4 * i as f64 / 40.0;
        let t = tangle(&gghz(z).unwrap()).unwrap();
        assert!((t - (2.0 * z).sin().powi(2)).abs() < 1e-10);
    }
}

#[test]
fn nme_entropy_increases() {
    let mut last = -1.0;
    for i in 1..100 {
        let e = entanglement_entropy(&nme(FRAC_PI_4 * i as f64 / 100.0).unwrap()).unwrap();
        assert!(e > last);
        last = e;
    }
}

#[test]
fn constructors_satisfy_state_invariants() {
    for i in 0..=10 {
        let p = i as f64 / 10.0;
        assert!(MixedState::new(werner(p).unwrap().matrix().clone()).is_ok());
        let z = FRAC_PI_4 * p;
        assert!(PureState::new(nme(z).unwrap().amplitudes().to_vec()).is_ok());
        assert!(PureState::new(gghz(z).unwrap().amplitudes().to_vec()).is_ok());
    }
}

#[test]
fn gghz_and_nme_share_their_curves() {
    let spec = SearchSpec::default();
    for z in [0.2, 0.5, FRAC_PI_4] {
        let a = PbPure::new(&nme(z).unwrap(), 1, 1, None);
        let b = PbPure::new(&gghz(z).unwrap(), 1, 1, None);
        for lam in [0.2, 0.5, 2.0 / 3.0, 0.8, 0.95] {
            let ra = max_over_aux(&|x| a.ggm(lam, x), 2, &spec, None, 0);
            let rb = max_over_aux(&|x| b.ggm(lam, x), 2, &spec, None, 0);
            assert!((ra.value - rb.value).abs() < 1e-6, "z {z} lambda {lam}");
        }
    }
}

#[test]
fn optimizer_is_deterministic() {
    let s = haar_pure(2, &mut RngSeed(5).rng()).unwrap();
    let spec = SearchSpec::coarse(0.05, 3);
    let a = pb_critical(&s, 2, 1, None, &spec).unwrap();
    let b = pb_critical(&s, 2, 1, None, &spec).unwrap();
    assert_eq!(a, b);
}

#[test]
fn optimizer_finds_separable_maxima_up_to_eleven_dimensions() {
    for dim in [1, 2, 5, 8, 11] {
        let peaks: Vec<f64> = (0..dim).map(|i| 0.3 + 0.37 * i as f64).collect();
        let f = |x: &[f64]| {
            x.iter()
                .zip(&peaks)
                .map(|(v, p)| 0.5 * (1.0 + (v - p).cos()))
                .product::<f64>()
        };
        let r = max_over_aux(&f, dim, &SearchSpec::default(), None, 7);
        assert!((r.value - 1.0).abs() < SearchSpec::default().tol_value, "dim {dim}: {}", r.value);
    }
}
