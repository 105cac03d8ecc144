//! Seed states, auxiliary qubits and random ensembles.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_range, Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::measures::tangle;
use crate::povm::phi_plus;
use crate::state::{MixedState, PureState};

/// GHZ-class samples with a smaller three-tangle are redrawn.
pub const GHZ_CLASS_TANGLE_FLOOR: f64 = 1e-6;

/// Single-qubit auxiliary `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxQubit {
    pub theta: f64,
    pub phi: f64,
}

impl AuxQubit {
    /// Checked constructor: `theta` in `[0, pi]`, `phi` in `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        check_range("theta", theta, 0.0, PI, "[0, pi]")?;
        if !(phi.is_finite() && (0.0..2.0 * PI).contains(&phi)) {
            return Err(Error::OutOfRange {
                name: "phi",
                value: phi,
                range: "[0, 2pi)",
            });
        }
        Ok(Self { theta, phi })
    }

    /// Maps arbitrary finite angles onto the canonical box, same state.
    pub fn wrapped(theta: f64, phi: f64) -> Self {
        let tau = 2.0 * PI;
        let mut t = theta.rem_euclid(tau);
        let mut p = phi;
        if t > PI {
            // cos((2pi - t)/2) = -cos(t/2): absorb the sign as a global phase.
            t = tau - t;
            p += PI;
        }
        Self {
            theta: t,
            phi: p.rem_euclid(tau),
        }
    }

    pub fn zero() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    /// `(alpha, beta)`.
    pub fn amplitudes(&self) -> (C64, C64) {
        let (s, c) = (0.5 * self.theta).sin_cos();
        (C64::new(c, 0.0), C64::from_polar(s, self.phi))
    }
}

pub fn aux_state(a: AuxQubit) -> PureState {
    let (alpha, beta) = a.amplitudes();
    PureState::from_parts_unchecked(1, vec![alpha, beta])
}

/// Seed for reproducible sampling; each stream is an independent ChaCha8 sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        self.stream(0)
    }

    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.0);
        r.set_stream(stream);
        r
    }
}

/// `cos z |00> + sin z |11>`, `z` in `[0, pi/4]`.
pub fn nme(z: f64) -> Result<PureState> {
    check_range("z", z, 0.0, FRAC_PI_4 + 1e-15, "[0, pi/4]")?;
    let mut amps = vec![ZERO; 4];
    amps[0] = C64::new(z.cos(), 0.0);
    amps[3] = C64::new(z.sin(), 0.0);
    Ok(PureState::from_parts_unchecked(2, amps))
}

fn gaussian_amplitude<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

fn gaussian_on<R: Rng + ?Sized>(n: usize, support: &[usize], rng: &mut R) -> PureState {
    loop {
        let mut amps = vec![ZERO; 1 << n];
        for &i in support {
            amps[i] = gaussian_amplitude(rng);
        }
        if let Ok(s) = PureState::from_unnormalized(amps) {
            return s;
        }
    }
}

/// Haar-random pure state on two or three qubits.
pub fn haar_pure<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<PureState> {
    if !(2..=3).contains(&n_qubits) {
        return Err(Error::InvalidConfig(format!(
            "Haar sampling supports 2 or 3 qubits, got {n_qubits}"
        )));
    }
    let support: Vec<usize> = (0..1 << n_qubits).collect();
    Ok(gaussian_on(n_qubits, &support, rng))
}

pub fn ghz() -> PureState {
    gghz(FRAC_PI_4).expect("pi/4 in range")
}

/// `(|001> + |010> + |100>) / sqrt 3`
pub fn w() -> PureState {
    let a = C64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut amps = vec![ZERO; 8];
    amps[1] = a;
    amps[2] = a;
    amps[4] = a;
    PureState::from_parts_unchecked(3, amps)
}

/// `cos z |000> + sin z |111>`, `z` in `[0, pi/4]`.
pub fn gghz(z: f64) -> Result<PureState> {
    check_range("z", z, 0.0, FRAC_PI_4 + 1e-15, "[0, pi/4]")?;
    let mut amps = vec![ZERO; 8];
    amps[0] = C64::new(z.cos(), 0.0);
    amps[7] = C64::new(z.sin(), 0.0);
    Ok(PureState::from_parts_unchecked(3, amps))
}

/// Gaussian amplitudes on all eight basis states, redrawn until the tangle
/// clears [`GHZ_CLASS_TANGLE_FLOOR`].
pub fn ghz_class_random<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    let support: Vec<usize> = (0..8).collect();
    loop {
        let s = gaussian_on(3, &support, rng);
        if tangle(&s).expect("three qubits") > GHZ_CLASS_TANGLE_FLOOR {
            return s;
        }
    }
}

/// Gaussian amplitudes on `|000>, |010>, |001>, |100>`.
pub fn w_class_random<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    gaussian_on(3, &[0, 2, 1, 4], rng)
}

/// `p |phi+><phi+| + (1 - p) I / 4`.
pub fn werner(p: f64) -> Result<MixedState> {
    check_range("p", p, 0.0, 1.0, "[0, 1]")?;
    let m = phi_plus()
        .to_density()
        .matrix()
        .scale(C64::new(p, 0.0))
        .add(&CMatrix::identity(4).scale(C64::new(0.25 * (1.0 - p), 0.0)));
    Ok(MixedState::from_parts_unchecked(2, m))
}
