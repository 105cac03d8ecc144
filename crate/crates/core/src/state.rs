//! Dense multi-qubit pure and mixed states.
//!
//! Parties are labelled `A_1 .. A_N`. `A_1` is the most significant bit of the
//! amplitude index, so the index `b_1 b_2 .. b_N` reads left to right exactly
//! like a ket. Tensoring appends the right operand's parties after the left's.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh_unchecked, max_eigvalsh_unchecked, CMatrix, C64, ZERO};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_SLACK: f64 = 1e-10;

/// One-based party label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartyLabel(pub usize);

impl PartyLabel {
    pub fn index(self) -> usize {
        self.0
    }

    pub(crate) fn slot(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for PartyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

pub fn parties(n: usize) -> Vec<PartyLabel> {
    (1..=n).map(PartyLabel).collect()
}

/// Bit of the amplitude index carrying the zero-based party `slot`.
#[inline]
pub(crate) fn bit_of(n: usize, slot: usize) -> usize {
    n - 1 - slot
}

pub(crate) fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Normalised pure state on `N` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<C64>,
}

impl PureState {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn from_unnormalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NotNormalized(norm));
        }
        let s = 1.0 / norm.sqrt();
        amps.iter_mut().for_each(|a| *a *= s);
        Ok(Self { n, amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_unnormalized(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index>` on `n` qubits.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Self { n, amps }
    }

    pub(crate) fn from_parts_unchecked(n: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    pub fn n_parties(&self) -> usize {
        self.n
    }

    pub fn parties(&self) -> Vec<PartyLabel> {
        parties(self.n)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn tensor(&self, right: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * right.dim());
        for a in &self.amps {
            for b in &right.amps {
                amps.push(a * b);
            }
        }
        PureState {
            n: self.n + right.n,
            amps,
        }
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|`, the phase-insensitive overlap.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.inner(other).norm()
    }

    pub fn to_density(&self) -> MixedState {
        MixedState {
            n: self.n,
            matrix: CMatrix::outer(&self.amps),
        }
    }

    /// Reduced density matrix on `keep` (party order preserved).
    pub fn reduced_density(&self, keep: &[PartyLabel]) -> Result<CMatrix> {
        let slots = validate_subset(keep, self.n, false)?;
        Ok(reduced_density_raw(&self.amps, self.n, &slots))
    }
}

/// Density matrix on `N` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    n: usize,
    matrix: CMatrix,
}

impl MixedState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let n = log2_exact(matrix.dim())?;
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let min = eigvalsh_unchecked(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_SLACK {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { n, matrix })
    }

    pub(crate) fn from_parts_unchecked(n: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), 1 << n);
        Self { n, matrix }
    }

    pub fn n_parties(&self) -> usize {
        self.n
    }

    pub fn parties(&self) -> Vec<PartyLabel> {
        parties(self.n)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn tensor(&self, right: &MixedState) -> MixedState {
        MixedState {
            n: self.n + right.n,
            matrix: self.matrix.kron(&right.matrix),
        }
    }

    pub fn partial_trace(&self, keep: &[PartyLabel]) -> Result<MixedState> {
        let slots = validate_subset(keep, self.n, true)?;
        Ok(MixedState {
            n: slots.len(),
            matrix: partial_trace_raw(&self.matrix, self.n, &slots),
        })
    }

    pub fn partial_transpose(&self, over: &[PartyLabel]) -> Result<CMatrix> {
        let slots = validate_subset(over, self.n, true)?;
        Ok(partial_transpose_raw(&self.matrix, self.n, &slots))
    }

    /// Trace distance `||self - other||_1 / 2`.
    pub fn trace_distance(&self, other: &MixedState) -> f64 {
        let diff = self.matrix.add(&other.matrix.scale(C64::new(-1.0, 0.0)));
        0.5 * eigvalsh_unchecked(&diff)
            .into_iter()
            .map(f64::abs)
            .sum::<f64>()
    }
}

/// Either kind of state.
#[derive(Clone, Debug, PartialEq)]
pub enum QState {
    Pure(PureState),
    Mixed(MixedState),
}

impl QState {
    pub fn n_parties(&self) -> usize {
        match self {
            QState::Pure(s) => s.n_parties(),
            QState::Mixed(s) => s.n_parties(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            QState::Pure(s) => Some(s),
            QState::Mixed(_) => None,
        }
    }

    pub fn as_mixed(&self) -> Option<&MixedState> {
        match self {
            QState::Mixed(s) => Some(s),
            QState::Pure(_) => None,
        }
    }

    /// Density-matrix view; pure states are lifted.
    pub fn to_mixed(&self) -> MixedState {
        match self {
            QState::Pure(s) => s.to_density(),
            QState::Mixed(s) => s.clone(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            QState::Pure(_) => "pure",
            QState::Mixed(_) => "mixed",
        }
    }
}

impl From<PureState> for QState {
    fn from(s: PureState) -> Self {
        QState::Pure(s)
    }
}

impl From<MixedState> for QState {
    fn from(s: MixedState) -> Self {
        QState::Mixed(s)
    }
}

/// Tensor product of two states of the same kind.
pub fn tensor(left: &QState, right: &QState) -> Result<QState> {
    match (left, right) {
        (QState::Pure(a), QState::Pure(b)) => Ok(QState::Pure(a.tensor(b))),
        (QState::Mixed(a), QState::Mixed(b)) => Ok(QState::Mixed(a.tensor(b))),
        _ => Err(Error::KindMismatch),
    }
}

pub fn partial_trace(state: &MixedState, keep: &[PartyLabel]) -> Result<MixedState> {
    state.partial_trace(keep)
}

pub fn partial_transpose(state: &MixedState, over: &[PartyLabel]) -> Result<CMatrix> {
    state.partial_transpose(over)
}

/// Two-sided cut of the party set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    side_a: Vec<PartyLabel>,
    side_b: Vec<PartyLabel>,
}

impl Bipartition {
    /// `side_a` against its complement in `A_1 .. A_n`.
    pub fn new(side_a: &[PartyLabel], n: usize) -> Result<Self> {
        let slots = validate_subset(side_a, n, true)?;
        Ok(Self::from_slots(&slots, n))
    }

    pub(crate) fn from_slots(slots: &[usize], n: usize) -> Self {
        let side_a: Vec<PartyLabel> = slots.iter().map(|&s| PartyLabel(s + 1)).collect();
        let side_b = (0..n)
            .filter(|s| !slots.contains(s))
            .map(|s| PartyLabel(s + 1))
            .collect();
        Self { side_a, side_b }
    }

    /// Every non-trivial cut once: the side holding at most half the parties,
    /// and for even splits the side containing `A_1`.
    pub fn all(n: usize) -> Vec<Bipartition> {
        all_cut_slots(n)
            .into_iter()
            .map(|s| Self::from_slots(&s, n))
            .collect()
    }

    pub fn side_a(&self) -> &[PartyLabel] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[PartyLabel] {
        &self.side_b
    }

    pub fn n_parties(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    pub fn smaller_side(&self) -> &[PartyLabel] {
        if self.side_a.len() <= self.side_b.len() {
            &self.side_a
        } else {
            &self.side_b
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[PartyLabel]| {
            v.iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join("")
        };
        write!(f, "{}|{}", join(&self.side_a), join(&self.side_b))
    }
}

/// Slot lists for [`Bipartition::all`].
pub(crate) fn all_cut_slots(n: usize) -> Vec<Vec<usize>> {
    let mut cuts = Vec::new();
    for mask in 1u32..(1u32 << n) - 1 {
        let size = mask.count_ones() as usize;
        if 2 * size > n || (2 * size == n && mask & 1 == 0) {
            continue;
        }
        let slots: Vec<usize> = (0..n).filter(|s| mask & (1 << s) != 0).collect();
        cuts.push(slots);
    }
    cuts.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    cuts
}

/// Largest squared Schmidt coefficient across `cut`.
pub fn max_schmidt_sq(state: &PureState, cut: &Bipartition) -> Result<f64> {
    if cut.n_parties() != state.n_parties() {
        return Err(Error::WrongPartyCount {
            expected: cut.n_parties(),
            got: state.n_parties(),
        });
    }
    let slots: Vec<usize> = cut.smaller_side().iter().map(|p| p.slot()).collect();
    Ok(max_schmidt_sq_raw(&state.amps, state.n, &slots))
}

pub(crate) fn max_schmidt_sq_raw(amps: &[C64], n: usize, slots: &[usize]) -> f64 {
    let rho = reduced_density_raw(amps, n, slots);
    max_eigvalsh_unchecked(&rho).min(1.0)
}

/// Checks a party subset and returns sorted zero-based slots.
pub(crate) fn validate_subset(set: &[PartyLabel], n: usize, proper: bool) -> Result<Vec<usize>> {
    if set.is_empty() {
        return Err(Error::InvalidParties("empty party set".into()));
    }
    let mut slots = Vec::with_capacity(set.len());
    for p in set {
        if p.0 == 0 || p.0 > n {
            return Err(Error::InvalidParties(format!("{p} not in A1..A{n}")));
        }
        slots.push(p.slot());
    }
    slots.sort_unstable();
    slots.dedup();
    if slots.len() != set.len() {
        return Err(Error::InvalidParties("repeated party".into()));
    }
    if proper && slots.len() == n {
        return Err(Error::InvalidParties("party set covers the whole register".into()));
    }
    Ok(slots)
}

/// Split of each full index into (kept index, traced index).
fn split_indices(n: usize, keep: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let dim = 1usize << n;
    let rest: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let mut kidx = vec![0usize; dim];
    let mut ridx = vec![0usize; dim];
    for x in 0..dim {
        let mut k = 0;
        for &s in keep {
            k = (k << 1) | ((x >> bit_of(n, s)) & 1);
        }
        let mut r = 0;
        for &s in &rest {
            r = (r << 1) | ((x >> bit_of(n, s)) & 1);
        }
        kidx[x] = k;
        ridx[x] = r;
    }
    (kidx, ridx)
}

pub(crate) fn reduced_density_raw(amps: &[C64], n: usize, keep: &[usize]) -> CMatrix {
    let dk = 1usize << keep.len();
    let dr = 1usize << (n - keep.len());
    // Reshape into a dk x dr matrix, then rho = M M^dagger.
    let mut m = vec![ZERO; dk * dr];
    if keep.iter().enumerate().all(|(i, &s)| s == i) {
        // Leading parties: the reshape is the identity layout.
        m.copy_from_slice(amps);
    } else {
        let (kidx, ridx) = split_indices(n, keep);
        for (x, a) in amps.iter().enumerate() {
            m[kidx[x] * dr + ridx[x]] = *a;
        }
    }
    let mut rho = CMatrix::zeros(dk);
    for i in 0..dk {
        let ri = &m[i * dr..(i + 1) * dr];
        for j in i..dk {
            let rj = &m[j * dr..(j + 1) * dr];
            let v: C64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
            rho[(i, j)] = v;
            rho[(j, i)] = v.conj();
        }
    }
    rho
}

pub(crate) fn partial_trace_raw(m: &CMatrix, n: usize, keep: &[usize]) -> CMatrix {
    let dk = 1usize << keep.len();
    let (kidx, ridx) = split_indices(n, keep);
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dk);
    for r in 0..dim {
        for c in 0..dim {
            if ridx[r] == ridx[c] {
                out[(kidx[r], kidx[c])] += m[(r, c)];
            }
        }
    }
    out
}

pub(crate) fn partial_transpose_raw(m: &CMatrix, n: usize, over: &[usize]) -> CMatrix {
    let mask: usize = over.iter().map(|&s| 1usize << bit_of(n, s)).sum();
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim);
    for r in 0..dim {
        for c in 0..dim {
            let r2 = (r & !mask) | (c & mask);
            let c2 = (c & !mask) | (r & mask);
            out[(r2, c2)] = m[(r, c)];
        }
    }
    out
}
