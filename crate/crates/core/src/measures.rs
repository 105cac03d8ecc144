//! Entanglement quantifiers.

use crate::error::{Error, Result};
use crate::linalg::{eigh_unchecked, eigvalsh_unchecked, CMatrix, C64};
use crate::state::{
    all_cut_slots, max_schmidt_sq_raw, partial_trace_raw, partial_transpose_raw,
    reduced_density_raw, validate_subset, Bipartition, MixedState, PartyLabel, PureState,
};

/// Which bipartitions the GGM maximisation visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutPolicy {
    /// Every non-trivial bipartition.
    All,
    /// Single sites and nearest-neighbour pairs only.
    Reduced,
}

impl CutPolicy {
    /// `All` up to seven parties, `Reduced` beyond.
    pub fn default_for(n_parties: usize) -> Self {
        if n_parties <= 7 {
            CutPolicy::All
        } else {
            CutPolicy::Reduced
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CutPolicy::All => "all",
            CutPolicy::Reduced => "reduced",
        }
    }
}

impl std::str::FromStr for CutPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(CutPolicy::All),
            "reduced" => Ok(CutPolicy::Reduced),
            other => Err(Error::InvalidConfig(format!("unknown cut policy {other:?}"))),
        }
    }
}

/// Cut list for `policy`, each cut given by the slots of its smaller side.
pub fn cut_slots(n: usize, policy: CutPolicy) -> Vec<Vec<usize>> {
    match policy {
        CutPolicy::All => all_cut_slots(n),
        CutPolicy::Reduced => {
            let canonical = |s: Vec<usize>| {
                if 2 * s.len() > n || (2 * s.len() == n && s[0] != 0) {
                    (0..n).filter(|x| !s.contains(x)).collect()
                } else {
                    s
                }
            };
            let mut cuts: Vec<Vec<usize>> = Vec::new();
            let candidates = (0..n)
                .map(|i| vec![i])
                .chain((0..n.saturating_sub(1)).map(|i| vec![i, i + 1]));
            for c in candidates {
                if c.len() >= n {
                    continue;
                }
                let c = canonical(c);
                if !cuts.contains(&c) {
                    cuts.push(c);
                }
            }
            cuts
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GgmReport {
    pub value: f64,
    pub argmax_cut: Bipartition,
    pub argmax_eigenvalue: f64,
}

/// Generalised geometric measure `1 - max_cut max Schmidt^2`.
pub fn ggm(state: &PureState, policy: CutPolicy) -> Result<GgmReport> {
    let n = state.n_parties();
    if n < 2 {
        return Err(Error::InvalidParties("GGM needs at least two parties".into()));
    }
    let cuts = cut_slots(n, policy);
    let (best, idx) = max_eig_over_cuts(state.amplitudes(), n, &cuts);
    Ok(GgmReport {
        value: (1.0 - best).max(0.0),
        argmax_cut: Bipartition::from_slots(&cuts[idx], n),
        argmax_eigenvalue: best,
    })
}

/// GGM with the default policy for the state's size.
pub fn ggm_value(state: &PureState) -> Result<f64> {
    ggm(state, CutPolicy::default_for(state.n_parties())).map(|r| r.value)
}

pub(crate) fn max_eig_over_cuts(amps: &[C64], n: usize, cuts: &[Vec<usize>]) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut idx = 0;
    for (i, c) in cuts.iter().enumerate() {
        let e = max_schmidt_sq_raw(amps, n, c);
        if e > best {
            best = e;
            idx = i;
        }
    }
    (best, idx)
}

/// GGM value over a precomputed cut list.
pub(crate) fn ggm_raw(amps: &[C64], n: usize, cuts: &[Vec<usize>]) -> f64 {
    (1.0 - max_eig_over_cuts(amps, n, cuts).0).max(0.0)
}

fn require_parties(got: usize, expected: usize) -> Result<()> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::WrongPartyCount { expected, got })
    }
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(state: &MixedState) -> Result<f64> {
    require_parties(state.n_parties(), 2)?;
    Ok(concurrence_raw(state.matrix()))
}

pub(crate) fn concurrence_raw(rho: &CMatrix) -> f64 {
    let (vals, vecs) = eigh_unchecked(rho);
    let top = vals.iter().cloned().fold(0.0, f64::max);
    // Subnormalised decomposition vectors sqrt(l_k) e_k, numerically null ones dropped.
    let ws: Vec<[C64; 4]> = (0..4)
        .filter(|&k| vals[k] > 1e-14 * top)
        .map(|k| std::array::from_fn(|r| vecs[(r, k)] * vals[k].sqrt()))
        .collect();
    concurrence_from_vectors(&ws)
}

/// Concurrence of `sum_k |w_k><w_k|`: the singular values `mu` of
/// `T_ij = w_i^T (sigma_y x sigma_y) w_j` give `max(0, mu_1 - sum_{i>1} mu_i)`.
pub(crate) fn concurrence_from_vectors(ws: &[[C64; 4]]) -> f64 {
    // sigma_y x sigma_y has -1, 1, 1, -1 on the anti-diagonal.
    const S: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
    let r = ws.len();
    if r == 0 {
        return 0.0;
    }
    let t = CMatrix::from_fn(r, |i, j| (0..4).map(|a| ws[i][a] * ws[j][3 - a] * S[a]).sum());
    if r == 1 {
        return t[(0, 0)].norm().min(1.0);
    }
    if r == 2 {
        // mu_1 - mu_2 = sqrt(|T|_F^2 - 2 |det T|), free of square roots of tiny numbers.
        let fro: f64 = t.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let det = (t[(0, 0)] * t[(1, 1)] - t[(0, 1)] * t[(1, 0)]).norm();
        return (fro - 2.0 * det).max(0.0).sqrt().min(1.0);
    }
    let tt = &t.adjoint() * &t;
    let mut mu: Vec<f64> = eigvalsh_unchecked(&tt)
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    (mu[0] - mu[1..].iter().sum::<f64>()).clamp(0.0, 1.0)
}

/// Concurrence of the `(0, j)` marginal of a pure three-qubit state from its
/// two unnormalised conditional vectors on the remaining qubit.
fn pure_pair_concurrence(amps: &[C64], j: usize) -> f64 {
    let other = 3 - j;
    let ws: Vec<[C64; 4]> = (0..2)
        .map(|k| {
            std::array::from_fn(|ab| {
                let (a, b) = (ab >> 1, ab & 1);
                let mut bits = [0usize; 3];
                bits[0] = a;
                bits[j] = b;
                bits[other] = k;
                amps[(bits[0] << 2) | (bits[1] << 1) | bits[2]]
            })
        })
        .collect();
    concurrence_from_vectors(&ws)
}

/// Three-tangle `4 det rho_A1 - C^2(A1A2) - C^2(A1A3)` of a pure three-qubit state.
pub fn tangle(state: &PureState) -> Result<f64> {
    require_parties(state.n_parties(), 3)?;
    let amps = state.amplitudes();
    let r1 = reduced_density_raw(amps, 3, &[0]);
    let det = r1[(0, 0)].re * r1[(1, 1)].re - r1[(0, 1)].norm_sqr();
    let c12 = pure_pair_concurrence(amps, 1);
    let c13 = pure_pair_concurrence(amps, 2);
    Ok((4.0 * det - c12 * c12 - c13 * c13).clamp(0.0, 1.0))
}

/// Sum of the magnitudes of the negative partial-transpose eigenvalues.
pub fn negativity(state: &MixedState, cut: &Bipartition) -> Result<f64> {
    require_parties(state.n_parties(), cut.n_parties())?;
    let slots = validate_subset(cut.smaller_side(), state.n_parties(), true)?;
    Ok(negativity_raw(state.matrix(), state.n_parties(), &slots))
}

pub(crate) fn negativity_raw(m: &CMatrix, n: usize, over: &[usize]) -> f64 {
    let pt = partial_transpose_raw(m, n, over);
    eigvalsh_unchecked(&pt)
        .into_iter()
        .filter(|&e| e < 0.0)
        .map(|e| -e)
        .sum()
}

/// `log2(2 N + 1)`.
pub fn log_negativity(state: &MixedState, cut: &Bipartition) -> Result<f64> {
    negativity(state, cut).map(|n| (2.0 * n + 1.0).log2())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonogamyReport {
    pub value: f64,
    pub focus_party: PartyLabel,
    /// Negativity between the focus party and everyone else.
    pub focus_rest: f64,
    /// Negativity of each two-party marginal `(focus, other)`.
    pub bipartite_terms: Vec<(PartyLabel, f64)>,
}

/// Negativity monogamy score `N(focus : rest) - sum_i N(focus, i)`.
pub fn monogamy_score_negativity(state: &MixedState, focus: PartyLabel) -> Result<MonogamyReport> {
    let n = state.n_parties();
    if n < 3 {
        return Err(Error::InvalidParties(
            "monogamy score needs at least three parties".into(),
        ));
    }
    let f = validate_subset(&[focus], n, true)?[0];
    let m = state.matrix();
    let focus_rest = negativity_raw(m, n, &[f]);
    let bipartite_terms: Vec<(PartyLabel, f64)> = (0..n)
        .filter(|&i| i != f)
        .map(|i| (PartyLabel(i + 1), pair_negativity(m, n, f, i)))
        .collect();
    let value = focus_rest - bipartite_terms.iter().map(|t| t.1).sum::<f64>();
    Ok(MonogamyReport {
        value,
        focus_party: focus,
        focus_rest,
        bipartite_terms,
    })
}

fn pair_negativity(m: &CMatrix, n: usize, a: usize, b: usize) -> f64 {
    let keep = [a.min(b), a.max(b)];
    let r = partial_trace_raw(m, n, &keep);
    negativity_raw(&r, 2, &[0])
}

/// Score value with focus `A_1`, no report.
pub(crate) fn monogamy_raw(m: &CMatrix, n: usize) -> f64 {
    let mut v = negativity_raw(m, n, &[0]);
    for i in 1..n {
        v -= pair_negativity(m, n, 0, i);
    }
    v
}

/// Von Neumann entropy (bits) of either qubit of a two-qubit pure state.
pub fn entanglement_entropy(state: &PureState) -> Result<f64> {
    require_parties(state.n_parties(), 2)?;
    let r = reduced_density_raw(state.amplitudes(), 2, &[0]);
    Ok(shannon_bits(&eigvalsh_unchecked(&r)))
}

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn shannon_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Binary entropy `h(p)`.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_bits(&[p, 1.0 - p])
}
