//! Bell-diagonal weak measurements on a qubit pair.

use crate::error::{check_range, Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::state::{bit_of, reduced_density_raw, MixedState, PartyLabel, PureState, QState};

/// Outcome probabilities below this are treated as impossible.
pub const NULL_PROBABILITY: f64 = 1e-14;

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Bell vectors in outcome order: psi+, psi-, phi+, phi-.
pub const BELL: [[C64; 4]; 4] = [
    [ZERO, C64::new(H, 0.0), C64::new(H, 0.0), ZERO],
    [ZERO, C64::new(H, 0.0), C64::new(-H, 0.0), ZERO],
    [C64::new(H, 0.0), ZERO, ZERO, C64::new(H, 0.0)],
    [C64::new(H, 0.0), ZERO, ZERO, C64::new(-H, 0.0)],
];

pub const BELL_NAMES: [&str; 4] = ["psi+", "psi-", "phi+", "phi-"];

/// Bell state `k` (1-based, outcome order) as a two-qubit pure state.
pub fn bell_state(k: usize) -> Result<PureState> {
    check_outcome(k)?;
    Ok(PureState::from_parts_unchecked(2, BELL[k - 1].to_vec()))
}

pub fn phi_plus() -> PureState {
    PureState::from_parts_unchecked(2, BELL[2].to_vec())
}

fn check_outcome(k: usize) -> Result<()> {
    if (1..=4).contains(&k) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "k",
            value: k as f64,
            range: "1..=4",
        })
    }
}

/// The four-outcome family `M_k = lambda |B_k><B_k| + (1 - lambda) I / 4`.
#[derive(Clone, Debug)]
pub struct WeakPovm {
    lambda: f64,
    elements: [CMatrix; 4],
    roots: [CMatrix; 4],
    fcoeffs: [[f64; 4]; 4],
}

impl WeakPovm {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `M_k` for `k` in 1..=4.
    pub fn element(&self, k: usize) -> &CMatrix {
        &self.elements[k - 1]
    }

    /// `sqrt(M_k)` for `k` in 1..=4.
    pub fn root(&self, k: usize) -> &CMatrix {
        &self.roots[k - 1]
    }

    pub fn elements(&self) -> &[CMatrix; 4] {
        &self.elements
    }

    pub fn roots(&self) -> &[CMatrix; 4] {
        &self.roots
    }

    /// `fcoeffs()[k-1][i-1]` is the eigenvalue of `sqrt(M_k)` on Bell state `i`.
    pub fn fcoeffs(&self) -> &[[f64; 4]; 4] {
        &self.fcoeffs
    }

    pub(crate) fn root_data(&self, k: usize) -> &[C64] {
        self.roots[k - 1].as_slice()
    }
}

pub fn build_povm(lambda: f64) -> Result<WeakPovm> {
    check_range("lambda", lambda, 0.0, 1.0, "[0, 1]")?;
    let strong = ((1.0 + 3.0 * lambda) / 4.0).sqrt();
    let weak = ((1.0 - lambda) / 4.0).max(0.0).sqrt();
    let mut fcoeffs = [[weak; 4]; 4];
    for (k, row) in fcoeffs.iter_mut().enumerate() {
        row[k] = strong;
    }
    let bell_diag = |w: &[f64; 4]| {
        CMatrix::from_fn(4, |r, c| {
            (0..4)
                .map(|i| BELL[i][r] * BELL[i][c].conj() * w[i])
                .sum()
        })
    };
    let roots = std::array::from_fn(|k| bell_diag(&fcoeffs[k]));
    let elements = std::array::from_fn(|k| {
        let sq = fcoeffs[k].map(|f| f * f);
        bell_diag(&sq)
    });
    Ok(WeakPovm {
        lambda,
        elements,
        roots,
        fcoeffs,
    })
}

/// `sqrt(M_k)` as a row-major 4x4 array, `k` in 1..=4, no range checks.
pub(crate) fn root_array(lambda: f64, k: usize) -> [C64; 16] {
    let strong = ((1.0 + 3.0 * lambda) / 4.0).sqrt();
    let weak = ((1.0 - lambda) / 4.0).max(0.0).sqrt();
    let mut out = [ZERO; 16];
    for (i, b) in BELL.iter().enumerate() {
        let f = if i == k - 1 { strong } else { weak };
        for r in 0..4 {
            for c in 0..4 {
                out[4 * r + c] += b[r] * b[c].conj() * f;
            }
        }
    }
    out
}

/// Result of applying one outcome.
#[derive(Clone, Debug)]
pub struct MeasurementOutcome {
    pub k: usize,
    pub probability: f64,
    /// `None` when the outcome has probability below [`NULL_PROBABILITY`].
    pub post_state: Option<QState>,
}

impl MeasurementOutcome {
    pub fn is_null(&self) -> bool {
        self.post_state.is_none()
    }
}

fn pair_slots(n: usize, pair: (PartyLabel, PartyLabel)) -> Result<(usize, usize)> {
    let (a, b) = pair;
    if a == b || a.0 == 0 || b.0 == 0 || a.0 > n || b.0 > n {
        return Err(Error::InvalidParties(format!(
            "measured pair ({a}, {b}) on a {n}-party state"
        )));
    }
    Ok((a.0 - 1, b.0 - 1))
}

/// Applies `sqrt(M_k)` to `pair` and renormalises.
pub fn apply_outcome(
    state: &QState,
    pair: (PartyLabel, PartyLabel),
    povm: &WeakPovm,
    k: usize,
) -> Result<MeasurementOutcome> {
    check_outcome(k)?;
    let n = state.n_parties();
    let (i, j) = pair_slots(n, pair)?;
    let op = povm.root_data(k);
    let (probability, post) = match state {
        QState::Pure(s) => {
            let mut amps = s.amplitudes().to_vec();
            apply_pair_pure(&mut amps, n, i, j, op);
            let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            let post = (p >= NULL_PROBABILITY).then(|| {
                let s = 1.0 / p.sqrt();
                amps.iter_mut().for_each(|a| *a *= s);
                QState::Pure(PureState::from_parts_unchecked(n, amps))
            });
            (p, post)
        }
        QState::Mixed(s) => {
            let mut m = s.matrix().clone();
            apply_pair_mixed(m.as_mut_slice(), n, i, j, op);
            let p = m.trace().re;
            let post = (p >= NULL_PROBABILITY).then(|| {
                let m = m.scale(C64::new(1.0 / p, 0.0));
                QState::Mixed(MixedState::from_parts_unchecked(n, m))
            });
            (p, post)
        }
    };
    Ok(MeasurementOutcome {
        k,
        probability: probability.clamp(0.0, 1.0),
        post_state: post,
    })
}

/// Probabilities of the four outcomes on `pair`.
pub fn outcome_distribution(
    state: &QState,
    pair: (PartyLabel, PartyLabel),
    povm: &WeakPovm,
) -> Result<[f64; 4]> {
    let n = state.n_parties();
    let (i, j) = pair_slots(n, pair)?;
    let mut keep = [i, j];
    keep.sort_unstable();
    let rho = match state {
        QState::Pure(s) => reduced_density_raw(s.amplitudes(), n, &keep),
        QState::Mixed(s) => crate::state::partial_trace_raw(s.matrix(), n, &keep),
    };
    Ok(distribution_from_pair(&rho, povm))
}

/// `p_k = sum_i f_k^i^2 <B_i|rho|B_i>`; Bell projectors are swap-symmetric so
/// the pair order inside `rho` is irrelevant.
fn distribution_from_pair(rho: &CMatrix, povm: &WeakPovm) -> [f64; 4] {
    let pops: [f64; 4] = std::array::from_fn(|b| {
        let v = rho.mul_vec(&BELL[b]);
        BELL[b]
            .iter()
            .zip(&v)
            .map(|(x, y)| x.conj() * y)
            .sum::<C64>()
            .re
    });
    std::array::from_fn(|k| {
        povm.fcoeffs[k]
            .iter()
            .zip(&pops)
            .map(|(f, p)| f * f * p)
            .sum::<f64>()
            .max(0.0)
    })
}

/// In-place `op` (4x4, row-major, basis `|a b>` with `a` on slot `i`) on a
/// pure register.
pub(crate) fn apply_pair_pure(amps: &mut [C64], n: usize, i: usize, j: usize, op: &[C64]) {
    apply_pair_bits(amps, bit_of(n, i), bit_of(n, j), op, false);
}

/// In-place `rho -> K rho K^dagger` with `K = op` on slots `(i, j)`.
pub(crate) fn apply_pair_mixed(m: &mut [C64], n: usize, i: usize, j: usize, op: &[C64]) {
    // Row-major rho is a 2n-qubit vector: row bits sit above column bits.
    apply_pair_bits(m, n + bit_of(n, i), n + bit_of(n, j), op, false);
    apply_pair_bits(m, bit_of(n, i), bit_of(n, j), op, true);
}

fn apply_pair_bits(v: &mut [C64], bi: usize, bj: usize, op: &[C64], conj: bool) {
    let mi = 1usize << bi;
    let mj = 1usize << bj;
    let mut o = [ZERO; 16];
    for (d, s) in o.iter_mut().zip(op) {
        *d = if conj { s.conj() } else { *s };
    }
    let idx = |base: usize, a: usize, b: usize| base | (a * mi) | (b * mj);
    for base in 0..v.len() {
        if base & (mi | mj) != 0 {
            continue;
        }
        let x = [
            v[idx(base, 0, 0)],
            v[idx(base, 0, 1)],
            v[idx(base, 1, 0)],
            v[idx(base, 1, 1)],
        ];
        for r in 0..4 {
            let y = o[4 * r] * x[0] + o[4 * r + 1] * x[1] + o[4 * r + 2] * x[2] + o[4 * r + 3] * x[3];
            v[idx(base, r >> 1, r & 1)] = y;
        }
    }
}
