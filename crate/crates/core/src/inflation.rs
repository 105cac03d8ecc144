//! Product-based (PB) and entanglement-based (EB) inflation.
//!
//! PB appends a fresh auxiliary qubit each round and measures it together with
//! the newest existing party. EB appends a fresh copy of the two-party seed and
//! measures party `2n` together with the copy's first party.
//!
//! The recursion builders reconstruct the same output states from component
//! vectors without ever forming a measurement operator; they serve as an
//! independent check on the direct simulation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{check_range, Error, Result};
use crate::families::{aux_state, AuxQubit, RngSeed};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::measures::{cut_slots, ggm_raw, monogamy_raw, CutPolicy};
use crate::povm::{
    apply_outcome, apply_pair_mixed, apply_pair_pure, build_povm, outcome_distribution,
    root_array, MeasurementOutcome, WeakPovm, BELL, NULL_PROBABILITY,
};
use crate::state::{MixedState, PartyLabel, PureState, QState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Pb,
    Eb,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Pb => "pb",
            Scheme::Eb => "eb",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pb" => Ok(Scheme::Pb),
            "eb" => Ok(Scheme::Eb),
            other => Err(Error::InvalidConfig(format!("unknown scheme {other:?}"))),
        }
    }
}

/// How the outcome of each round is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum OutcomePolicy {
    /// Outcome per round (1..=4). A single entry applies to every round.
    Fixed(Vec<usize>),
    /// Drawn from the outcome distribution.
    Sampled(RngSeed),
}

impl Default for OutcomePolicy {
    fn default() -> Self {
        OutcomePolicy::Fixed(vec![1])
    }
}

#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    pub scheme: Scheme,
    pub seed_state: QState,
    pub rounds: usize,
    pub lambda: f64,
    /// One auxiliary per round (PB only).
    pub aux_params: Vec<AuxQubit>,
    pub outcome_policy: OutcomePolicy,
}

impl ProtocolConfig {
    pub fn pb(seed: impl Into<QState>, lambda: f64, aux: Vec<AuxQubit>) -> Self {
        Self {
            scheme: Scheme::Pb,
            seed_state: seed.into(),
            rounds: aux.len(),
            lambda,
            aux_params: aux,
            outcome_policy: OutcomePolicy::default(),
        }
    }

    pub fn eb(seed: impl Into<QState>, lambda: f64, rounds: usize) -> Self {
        Self {
            scheme: Scheme::Eb,
            seed_state: seed.into(),
            rounds,
            lambda,
            aux_params: Vec::new(),
            outcome_policy: OutcomePolicy::default(),
        }
    }

    pub fn with_outcomes(mut self, policy: OutcomePolicy) -> Self {
        self.outcome_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        check_range("lambda", self.lambda, 0.0, 1.0, "[0, 1]")?;
        let n0 = self.seed_state.n_parties();
        match self.scheme {
            Scheme::Pb => {
                if n0 < 2 {
                    return Err(Error::InvalidConfig("PB seed needs at least two parties".into()));
                }
                if self.aux_params.len() != self.rounds {
                    return Err(Error::InvalidConfig(format!(
                        "PB needs one auxiliary per round: {} rounds, {} auxiliaries",
                        self.rounds,
                        self.aux_params.len()
                    )));
                }
            }
            Scheme::Eb => {
                if n0 != 2 {
                    return Err(Error::InvalidConfig("EB seed must be a two-party state".into()));
                }
            }
        }
        if let OutcomePolicy::Fixed(ks) = &self.outcome_policy {
            if ks.len() != 1 && ks.len() != self.rounds {
                return Err(Error::InvalidConfig(format!(
                    "{} fixed outcomes for {} rounds",
                    ks.len(),
                    self.rounds
                )));
            }
            if let Some(k) = ks.iter().find(|k| !(1..=4).contains(*k)) {
                return Err(Error::InvalidConfig(format!("outcome {k} outside 1..=4")));
            }
        }
        Ok(())
    }

    pub fn final_parties(&self) -> usize {
        let n0 = self.seed_state.n_parties();
        match self.scheme {
            Scheme::Pb => n0 + self.rounds,
            Scheme::Eb => n0 + 2 * self.rounds,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RoundRecord {
    pub round: usize,
    pub outcome: usize,
    /// Probability of this outcome given the previous rounds.
    pub probability: f64,
    pub parties: usize,
    pub state: QState,
}

#[derive(Clone, Debug)]
pub struct RunTrajectory {
    pub scheme: Scheme,
    pub lambda: f64,
    pub records: Vec<RoundRecord>,
}

impl RunTrajectory {
    pub fn final_state(&self) -> &QState {
        &self.records.last().expect("at least one round").state
    }

    pub fn outcomes(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.outcome).collect()
    }
}

/// Joint probability of the trajectory's outcome sequence.
pub fn chained_probability(trajectory: &RunTrajectory) -> f64 {
    trajectory.records.iter().map(|r| r.probability).product()
}

fn lift_like(template: &QState, s: PureState) -> QState {
    match template {
        QState::Pure(_) => QState::Pure(s),
        QState::Mixed(_) => QState::Mixed(s.to_density()),
    }
}

/// One PB round: append `aux` and measure it with the current last party.
pub fn pb_round(state: &QState, aux: AuxQubit, povm: &WeakPovm, k: usize) -> Result<MeasurementOutcome> {
    let n = state.n_parties();
    if n < 2 {
        return Err(Error::InvalidParties("PB round needs at least two parties".into()));
    }
    let joined = crate::state::tensor(state, &lift_like(state, aux_state(aux)))?;
    apply_outcome(&joined, (PartyLabel(n), PartyLabel(n + 1)), povm, k)
}

/// One EB round: append `fresh_copy` and measure party `2n` with its first party.
pub fn eb_round(
    state: &QState,
    fresh_copy: &QState,
    povm: &WeakPovm,
    k: usize,
) -> Result<MeasurementOutcome> {
    let n = state.n_parties();
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParties(format!(
            "EB round needs an even party count, got {n}"
        )));
    }
    if fresh_copy.n_parties() != 2 {
        return Err(Error::InvalidParties("EB copy must be a two-party state".into()));
    }
    let joined = crate::state::tensor(state, fresh_copy)?;
    apply_outcome(&joined, (PartyLabel(n), PartyLabel(n + 1)), povm, k)
}

pub fn run(config: &ProtocolConfig) -> Result<RunTrajectory> {
    config.validate()?;
    let povm = build_povm(config.lambda)?;
    let mut rng = match &config.outcome_policy {
        OutcomePolicy::Sampled(seed) => Some(seed.rng()),
        OutcomePolicy::Fixed(_) => None,
    };
    let mut state = config.seed_state.clone();
    let mut records = Vec::with_capacity(config.rounds);
    for round in 1..=config.rounds {
        let n = state.n_parties();
        let k = match (&config.outcome_policy, rng.as_mut()) {
            (OutcomePolicy::Fixed(ks), _) => ks[if ks.len() == 1 { 0 } else { round - 1 }],
            (OutcomePolicy::Sampled(_), Some(rng)) => {
                let next = match config.scheme {
                    Scheme::Pb => {
                        let aux = lift_like(&state, aux_state(config.aux_params[round - 1]));
                        crate::state::tensor(&state, &aux)?
                    }
                    Scheme::Eb => crate::state::tensor(&state, &config.seed_state)?,
                };
                let dist = outcome_distribution(&next, (PartyLabel(n), PartyLabel(n + 1)), &povm)?;
                draw(&dist, rng.random::<f64>())
            }
            _ => unreachable!("rng exists exactly for sampled policies"),
        };
        let out = match config.scheme {
            Scheme::Pb => pb_round(&state, config.aux_params[round - 1], &povm, k)?,
            Scheme::Eb => eb_round(&state, &config.seed_state, &povm, k)?,
        };
        let post = out.post_state.ok_or(Error::NullOutcome { round, k })?;
        state = post;
        let expected = match config.scheme {
            Scheme::Pb => n + 1,
            Scheme::Eb => n + 2,
        };
        assert_eq!(state.n_parties(), expected, "party count bookkeeping");
        records.push(RoundRecord {
            round,
            outcome: k,
            probability: out.probability,
            parties: expected,
            state: state.clone(),
        });
    }
    assert_eq!(state.n_parties(), config.final_parties());
    Ok(RunTrajectory {
        scheme: config.scheme,
        lambda: config.lambda,
        records,
    })
}

fn draw(dist: &[f64; 4], u: f64) -> usize {
    let total: f64 = dist.iter().sum();
    let mut acc = 0.0;
    for (i, p) in dist.iter().enumerate() {
        acc += p / total;
        if u < acc && *p >= NULL_PROBABILITY {
            return i + 1;
        }
    }
    // Round-off left u above the cumulative sum: take the last possible outcome.
    (0..4).rev().find(|&i| dist[i] >= NULL_PROBABILITY).unwrap_or(0) + 1
}

/// Closed form of the second-round probability of outcome 1 (given outcome 1
/// in the first round) for the `|phi+>` seed.
pub fn conditional_p2_maxent(lambda: f64, aux1: AuxQubit, aux2: AuxQubit) -> f64 {
    let s = ((1.0 - lambda) * (1.0 + 3.0 * lambda)).sqrt();
    let (t1, f1, t2, f2) = (aux1.theta, aux1.phi, aux2.theta, aux2.phi);
    let joint = (4.0
        - 2.0 * lambda * (1.0 - lambda + s)
            * (t1.cos() * t2.cos() - (f1 - f2).cos() * t1.sin() * t2.sin()))
        / 64.0;
    joint / 0.25
}

// ---------------------------------------------------------------------------
// Recursion builders

/// Seeds with a closed-form first-round block.
#[derive(Clone, Debug, PartialEq)]
pub enum SeedFamily {
    /// `|phi+>`
    MaxEnt,
    /// `cos z |00> + sin z |11>`
    Nme { z: f64 },
    /// `a|00> + b|01> + c|10> + d|11>` as `[a, b, c, d]`.
    Haar2([C64; 4]),
    /// Coefficients of `|000>, |010>, |001>, |100>, |011>, |101>, |110>, |111>`.
    GhzClass([C64; 8]),
    /// Coefficients of `|000>, |010>, |001>, |100>`.
    WClass([C64; 4]),
    W,
}

const GHZ_CLASS_ORDER: [usize; 8] = [0b000, 0b010, 0b001, 0b100, 0b011, 0b101, 0b110, 0b111];
const W_CLASS_ORDER: [usize; 4] = [0b000, 0b010, 0b001, 0b100];

impl SeedFamily {
    pub fn haar2(state: &PureState) -> Result<Self> {
        if state.n_parties() != 2 {
            return Err(Error::WrongPartyCount { expected: 2, got: state.n_parties() });
        }
        let a = state.amplitudes();
        Ok(SeedFamily::Haar2([a[0], a[1], a[2], a[3]]))
    }

    pub fn ghz_class(state: &PureState) -> Result<Self> {
        if state.n_parties() != 3 {
            return Err(Error::WrongPartyCount { expected: 3, got: state.n_parties() });
        }
        let a = state.amplitudes();
        Ok(SeedFamily::GhzClass(GHZ_CLASS_ORDER.map(|i| a[i])))
    }

    pub fn w_class(state: &PureState) -> Result<Self> {
        if state.n_parties() != 3 {
            return Err(Error::WrongPartyCount { expected: 3, got: state.n_parties() });
        }
        let a = state.amplitudes();
        let off: f64 = [3usize, 5, 6, 7].iter().map(|&i| a[i].norm_sqr()).sum();
        if off > 1e-24 {
            return Err(Error::UnsupportedFamily(
                "state has weight outside the W-class ansatz".into(),
            ));
        }
        Ok(SeedFamily::WClass(W_CLASS_ORDER.map(|i| a[i])))
    }

    pub fn name(&self) -> &'static str {
        match self {
            SeedFamily::MaxEnt => "maxent",
            SeedFamily::Nme { .. } => "nme",
            SeedFamily::Haar2(_) => "haar2",
            SeedFamily::GhzClass(_) => "ghz-class",
            SeedFamily::WClass(_) => "w-class",
            SeedFamily::W => "w",
        }
    }

    pub fn n_parties(&self) -> usize {
        match self {
            SeedFamily::MaxEnt | SeedFamily::Nme { .. } | SeedFamily::Haar2(_) => 2,
            _ => 3,
        }
    }

    /// The seed written out as a ket.
    pub fn seed_state(&self) -> Result<PureState> {
        let n = self.n_parties();
        let mut amps = vec![ZERO; 1 << n];
        match self {
            SeedFamily::MaxEnt => return Ok(crate::povm::phi_plus()),
            SeedFamily::Nme { z } => return crate::families::nme(*z),
            SeedFamily::W => return Ok(crate::families::w()),
            SeedFamily::Haar2(c) => amps.copy_from_slice(c),
            SeedFamily::GhzClass(c) => {
                for (i, v) in GHZ_CLASS_ORDER.iter().zip(c) {
                    amps[*i] = *v;
                }
            }
            SeedFamily::WClass(c) => {
                for (i, v) in W_CLASS_ORDER.iter().zip(c) {
                    amps[*i] = *v;
                }
            }
        }
        PureState::from_unnormalized(amps)
    }

    /// The seed split on its last party: `|seed> = |u0>|0> + |u1>|1>`.
    fn split_blocks(&self) -> (Vec<C64>, Vec<C64>) {
        let r = |x: f64| C64::new(x, 0.0);
        match self {
            SeedFamily::MaxEnt => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                (vec![r(h), ZERO], vec![ZERO, r(h)])
            }
            SeedFamily::Nme { z } => (vec![r(z.cos()), ZERO], vec![ZERO, r(z.sin())]),
            SeedFamily::Haar2([a, b, c, d]) => (vec![*a, *c], vec![*b, *d]),
            SeedFamily::W => {
                // sqrt(2/3) psi+ and |00>/sqrt 3
                let t = r(1.0 / 3f64.sqrt());
                (vec![ZERO, t, t, ZERO], vec![t, ZERO, ZERO, ZERO])
            }
            SeedFamily::GhzClass([a, b, c, d, e, f, g, h]) => {
                (vec![*a, *b, *d, *g], vec![*c, *e, *f, *h])
            }
            SeedFamily::WClass([a, b, c, d]) => (vec![*a, *b, *d, ZERO], vec![*c, ZERO, ZERO, ZERO]),
        }
    }
}

/// Component vectors of a recursion together with the outcomes that built them.
#[derive(Clone, Debug)]
pub struct RecursionState {
    pub scheme: Scheme,
    /// `a, b, c, d` (PB) or `Y, Z` (EB), unnormalised.
    pub components: Vec<Vec<C64>>,
    pub outcomes: Vec<usize>,
}

impl RecursionState {
    /// Reassembles and normalises the output state.
    pub fn state(&self) -> Result<PureState> {
        let mut amps = Vec::new();
        match self.scheme {
            Scheme::Pb => {
                // a|psi+> + b|psi-> + c|phi+> + d|phi->
                let len = self.components[0].len() * 4;
                amps.resize(len, ZERO);
                for (comp, bell) in self.components.iter().zip(BELL) {
                    for (x, v) in comp.iter().enumerate() {
                        for (j, b) in bell.iter().enumerate() {
                            amps[4 * x + j] += v * b;
                        }
                    }
                }
            }
            Scheme::Eb => {
                // Y|0> + Z|1>
                let (y, z) = (&self.components[0], &self.components[1]);
                for (a, b) in y.iter().zip(z) {
                    amps.push(*a);
                    amps.push(*b);
                }
            }
        }
        PureState::from_unnormalized(amps)
    }
}

/// `m_k^i`: `sqrt(1 + 3 lambda)` on the clicked outcome, `sqrt(1 - lambda)` otherwise.
fn m_coeffs(lambda: f64, k: usize) -> [f64; 4] {
    let mut m = [(1.0 - lambda).max(0.0).sqrt(); 4];
    m[k - 1] = (1.0 + 3.0 * lambda).sqrt();
    m
}

fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

fn axpy(acc: &mut [C64], s: C64, x: &[C64]) {
    for (a, v) in acc.iter_mut().zip(x) {
        *a += s * v;
    }
}

fn combine(terms: &[(f64, &[C64])]) -> Vec<C64> {
    let mut out = vec![ZERO; terms[0].1.len()];
    for (s, v) in terms {
        axpy(&mut out, C64::new(*s, 0.0), v);
    }
    out
}

fn check_outcomes(outcomes: &[usize], rounds: usize) -> Result<()> {
    if outcomes.len() != rounds {
        return Err(Error::InvalidConfig(format!(
            "{} outcomes for {} rounds",
            outcomes.len(),
            rounds
        )));
    }
    if let Some(k) = outcomes.iter().find(|k| !(1..=4).contains(*k)) {
        return Err(Error::InvalidConfig(format!("outcome {k} outside 1..=4")));
    }
    Ok(())
}

/// PB output built from the component recursion.
pub fn recursion_pb_components(
    family: &SeedFamily,
    lambda: f64,
    aux: &[AuxQubit],
    outcomes: &[usize],
) -> Result<RecursionState> {
    check_range("lambda", lambda, 0.0, 1.0, "[0, 1]")?;
    if aux.is_empty() {
        return Err(Error::InvalidConfig("rounds must be at least 1".into()));
    }
    check_outcomes(outcomes, aux.len())?;
    let (u0, u1) = family.split_blocks();
    let (al, be) = aux[0].amplitudes();
    let m = m_coeffs(lambda, outcomes[0]);
    let lin = |s: f64, x: C64, p: &[C64], y: C64, q: &[C64]| -> Vec<C64> {
        p.iter().zip(q).map(|(a, b)| (x * a + y * b) * s).collect()
    };
    let mut a = lin(m[0], be, &u0, al, &u1);
    let mut b = lin(m[1], be, &u0, -al, &u1);
    let mut c = lin(m[2], al, &u0, be, &u1);
    let mut d = lin(m[3], al, &u0, -be, &u1);
    for (ax, &k) in aux[1..].iter().zip(&outcomes[1..]) {
        let (al, be) = ax.amplitudes();
        let chi_p = [al, be];
        let chi_m = [al, -be];
        let xi_p = [be, al];
        let xi_m = [be, -al];
        let m = m_coeffs(lambda, k);
        let t = |v: &[C64], w: &[C64; 2]| kron_vec(v, w);
        let (acp, acm, axp, axm) = (t(&a, &chi_p), t(&a, &chi_m), t(&a, &xi_p), t(&a, &xi_m));
        let (bcp, bcm, bxp, bxm) = (t(&b, &chi_p), t(&b, &chi_m), t(&b, &xi_p), t(&b, &xi_m));
        let (ccp, ccm, cxp, cxm) = (t(&c, &chi_p), t(&c, &chi_m), t(&c, &xi_p), t(&c, &xi_m));
        let (dcp, dcm, dxp, dxm) = (t(&d, &chi_p), t(&d, &chi_m), t(&d, &xi_p), t(&d, &xi_m));
        let na = combine(&[(m[0], &acp), (m[0], &bcm), (m[0], &cxp), (m[0], &dxm)]);
        let nb = combine(&[(-m[1], &acm), (-m[1], &bcp), (m[1], &cxm), (m[1], &dxp)]);
        let nc = combine(&[(m[2], &axp), (m[2], &bxm), (m[2], &ccp), (m[2], &dcm)]);
        let nd = combine(&[(-m[3], &axm), (-m[3], &bxp), (m[3], &ccm), (m[3], &dcp)]);
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    Ok(RecursionState {
        scheme: Scheme::Pb,
        components: vec![a, b, c, d],
        outcomes: outcomes.to_vec(),
    })
}

pub fn recursion_pb(
    family: &SeedFamily,
    lambda: f64,
    aux: &[AuxQubit],
    outcomes: &[usize],
) -> Result<PureState> {
    recursion_pb_components(family, lambda, aux, outcomes)?.state()
}

/// EB output built from the `Y, Z` recursion. Only the maximally and
/// non-maximally entangled seeds have one.
pub fn recursion_eb_components(
    family: &SeedFamily,
    lambda: f64,
    outcomes: &[usize],
) -> Result<RecursionState> {
    check_range("lambda", lambda, 0.0, 1.0, "[0, 1]")?;
    if outcomes.is_empty() {
        return Err(Error::InvalidConfig("rounds must be at least 1".into()));
    }
    check_outcomes(outcomes, outcomes.len())?;
    let z = match family {
        SeedFamily::MaxEnt => std::f64::consts::FRAC_PI_4,
        SeedFamily::Nme { z } => *z,
        other => return Err(Error::UnsupportedFamily(other.name().into())),
    };
    let (cz, sz) = (z.cos(), z.sin());
    let mut y = vec![C64::new(cz, 0.0), ZERO];
    let mut zz = vec![ZERO, C64::new(sz, 0.0)];
    for &k in outcomes {
        let m = m_coeffs(lambda, k);
        let mix = |p: f64, u: &[C64; 4], q: f64, v: &[C64; 4]| -> [C64; 4] {
            std::array::from_fn(|i| u[i] * p + v[i] * q)
        };
        let e_p = mix(m[0], &BELL[0], m[1], &BELL[1]);
        let e_m = mix(m[0], &BELL[0], -m[1], &BELL[1]);
        let f_p = mix(m[2], &BELL[2], m[3], &BELL[3]);
        let f_m = mix(m[2], &BELL[2], -m[3], &BELL[3]);
        let ny = combine(&[(cz, &kron_vec(&y, &f_p)), (cz, &kron_vec(&zz, &e_m))]);
        let nz = combine(&[(sz, &kron_vec(&y, &e_p)), (sz, &kron_vec(&zz, &f_m))]);
        y = ny;
        zz = nz;
    }
    Ok(RecursionState {
        scheme: Scheme::Eb,
        components: vec![y, zz],
        outcomes: outcomes.to_vec(),
    })
}

pub fn recursion_eb(family: &SeedFamily, lambda: f64, outcomes: &[usize]) -> Result<PureState> {
    recursion_eb_components(family, lambda, outcomes)?.state()
}

// ---------------------------------------------------------------------------
// Fast objectives for the optimisers. Angles are laid out
// `[theta_1, phi_1, theta_2, phi_2, ...]` and taken as-is (any real value
// names a valid auxiliary).

fn aux_from(theta: f64, phi: f64) -> (C64, C64) {
    AuxQubit { theta, phi }.amplitudes()
}

/// GGM after `rounds` PB rounds from a pure seed, outcome fixed every round.
#[derive(Clone, Debug)]
pub struct PbPure {
    seed: Vec<C64>,
    n0: usize,
    rounds: usize,
    outcome: usize,
    cuts: Vec<Vec<usize>>,
}

impl PbPure {
    pub fn new(seed: &PureState, rounds: usize, outcome: usize, policy: Option<CutPolicy>) -> Self {
        let n0 = seed.n_parties();
        let nf = n0 + rounds;
        let policy = policy.unwrap_or_else(|| CutPolicy::default_for(nf));
        Self {
            seed: seed.amplitudes().to_vec(),
            n0,
            rounds,
            outcome,
            cuts: cut_slots(nf, policy),
        }
    }

    pub fn n_angles(&self) -> usize {
        2 * self.rounds
    }

    /// Unnormalised output, `None` if some round has vanishing probability.
    pub fn state(&self, lambda: f64, angles: &[f64]) -> Option<(Vec<C64>, f64)> {
        let op = root_array(lambda, self.outcome);
        let mut amps = self.seed.clone();
        let mut n = self.n0;
        let mut prob = 1.0;
        for r in 0..self.rounds {
            let (al, be) = aux_from(angles[2 * r], angles[2 * r + 1]);
            amps = kron_vec(&amps, &[al, be]);
            n += 1;
            apply_pair_pure(&mut amps, n, n - 2, n - 1, &op);
            let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if p < NULL_PROBABILITY {
                return None;
            }
            let s = 1.0 / p.sqrt();
            amps.iter_mut().for_each(|a| *a *= s);
            prob *= p;
        }
        Some((amps, prob))
    }

    pub fn ggm(&self, lambda: f64, angles: &[f64]) -> f64 {
        match self.state(lambda, angles) {
            Some((amps, _)) => ggm_raw(&amps, self.n0 + self.rounds, &self.cuts),
            None => 0.0,
        }
    }
}

/// Negativity monogamy score (focus `A_1`) after PB rounds from a mixed seed.
#[derive(Clone, Debug)]
pub struct PbMixed {
    seed: CMatrix,
    n0: usize,
    rounds: usize,
    outcome: usize,
}

impl PbMixed {
    pub fn new(seed: &MixedState, rounds: usize, outcome: usize) -> Self {
        Self {
            seed: seed.matrix().clone(),
            n0: seed.n_parties(),
            rounds,
            outcome,
        }
    }

    pub fn n_angles(&self) -> usize {
        2 * self.rounds
    }

    pub fn state(&self, lambda: f64, angles: &[f64]) -> Option<CMatrix> {
        let op = root_array(lambda, self.outcome);
        let mut m = self.seed.clone();
        let mut n = self.n0;
        for r in 0..self.rounds {
            let (al, be) = aux_from(angles[2 * r], angles[2 * r + 1]);
            m = m.kron(&CMatrix::outer(&[al, be]));
            n += 1;
            apply_pair_mixed(m.as_mut_slice(), n, n - 2, n - 1, &op);
            let p = m.trace().re;
            if p < NULL_PROBABILITY {
                return None;
            }
            m = m.scale(C64::new(1.0 / p, 0.0));
        }
        Some(m)
    }

    pub fn monogamy(&self, lambda: f64, angles: &[f64]) -> f64 {
        match self.state(lambda, angles) {
            Some(m) => monogamy_raw(&m, self.n0 + self.rounds),
            None => 0.0,
        }
    }
}

/// EB output from a two-party seed, outcome fixed every round.
#[derive(Clone, Debug)]
pub struct EbRun {
    seed: QState,
    rounds: usize,
    outcome: usize,
    cuts: Vec<Vec<usize>>,
}

impl EbRun {
    pub fn new(seed: &QState, rounds: usize, outcome: usize, policy: Option<CutPolicy>) -> Self {
        let nf = 2 + 2 * rounds;
        let policy = policy.unwrap_or_else(|| CutPolicy::default_for(nf));
        Self {
            seed: seed.clone(),
            rounds,
            outcome,
            cuts: cut_slots(nf, policy),
        }
    }

    pub fn n_parties(&self) -> usize {
        2 + 2 * self.rounds
    }

    pub fn state(&self, lambda: f64) -> Option<QState> {
        let op = root_array(lambda, self.outcome);
        let mut n = 2;
        match &self.seed {
            QState::Pure(s) => {
                let mut amps = s.amplitudes().to_vec();
                for _ in 0..self.rounds {
                    amps = kron_vec(&amps, s.amplitudes());
                    n += 2;
                    apply_pair_pure(&mut amps, n, n - 3, n - 2, &op);
                    let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                    if p < NULL_PROBABILITY {
                        return None;
                    }
                    let sc = 1.0 / p.sqrt();
                    amps.iter_mut().for_each(|a| *a *= sc);
                }
                Some(QState::Pure(PureState::from_parts_unchecked(n, amps)))
            }
            QState::Mixed(s) => {
                let mut m = s.matrix().clone();
                for _ in 0..self.rounds {
                    m = m.kron(s.matrix());
                    n += 2;
                    apply_pair_mixed(m.as_mut_slice(), n, n - 3, n - 2, &op);
                    let p = m.trace().re;
                    if p < NULL_PROBABILITY {
                        return None;
                    }
                    m = m.scale(C64::new(1.0 / p, 0.0));
                }
                Some(QState::Mixed(MixedState::from_parts_unchecked(n, m)))
            }
        }
    }

    /// GGM for pure seeds, negativity monogamy score for mixed seeds.
    pub fn value(&self, lambda: f64) -> f64 {
        match self.state(lambda) {
            Some(QState::Pure(s)) => ggm_raw(s.amplitudes(), s.n_parties(), &self.cuts),
            Some(QState::Mixed(s)) => monogamy_raw(s.matrix(), s.n_parties()),
            None => 0.0,
        }
    }
}
