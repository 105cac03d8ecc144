//! Seeded random ensembles shared by the histogram, scatter and verification runs.
//!
//! Sample `i` of an ensemble always draws from its own ChaCha stream, so a
//! sample's value does not depend on the ensemble size or on `--jobs`.

use rayon::prelude::*;

use entinflate::families::{ghz_class_random, haar_pure, w_class_random, RngSeed};
use entinflate::measures::{entanglement_entropy, ggm, tangle, CutPolicy};
use entinflate::optsearch::{eb_critical, pb_critical, SearchSpec};
use entinflate::state::{PureState, QState};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Critical {
    pub lambda_c: f64,
    pub value_c: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HaarSample {
    pub index: usize,
    pub e_in: f64,
    /// PB critical points for rounds `1..=pb_rounds`.
    pub pb: Vec<Critical>,
    /// EB round-one critical point, when requested.
    pub eb: Option<Critical>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassKind {
    Ghz,
    W,
}

impl ClassKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassKind::Ghz => "ghz-class",
            ClassKind::W => "w-class",
        }
    }

    fn stream_base(self) -> u64 {
        match self {
            ClassKind::Ghz => 1 << 32,
            ClassKind::W => 2 << 32,
        }
    }

    pub fn sample(self, seed: u64, index: usize) -> PureState {
        let mut rng = RngSeed(seed).stream(self.stream_base() + index as u64);
        match self {
            ClassKind::Ghz => ghz_class_random(&mut rng),
            ClassKind::W => w_class_random(&mut rng),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassSample {
    pub index: usize,
    pub ggm_in: f64,
    pub tangle: f64,
    pub pb: Critical,
}

pub fn haar_seed(seed: u64, index: usize) -> Result<PureState> {
    Ok(haar_pure(2, &mut RngSeed(seed).stream(index as u64))?)
}

fn critical(r: entinflate::optsearch::OptimizationResult) -> Critical {
    Critical {
        lambda_c: r.lambda_c,
        value_c: r.value_c,
    }
}

pub fn haar_ensemble(
    seed: u64,
    samples: usize,
    pb_rounds: usize,
    with_eb: bool,
    spec: &SearchSpec,
    policy: Option<CutPolicy>,
) -> Result<Vec<HaarSample>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = haar_seed(seed, i)?;
            let pb = (1..=pb_rounds)
                .map(|r| pb_critical(&s, r, 1, policy, spec).map(critical))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let eb = if with_eb {
                Some(critical(eb_critical(&QState::Pure(s.clone()), 1, 1, policy, spec)?))
            } else {
                None
            };
            Ok(HaarSample {
                index: i,
                e_in: entanglement_entropy(&s)?,
                pb,
                eb,
            })
        })
        .collect()
}

pub fn class_ensemble(
    seed: u64,
    kind: ClassKind,
    samples: usize,
    spec: &SearchSpec,
    policy: Option<CutPolicy>,
) -> Result<Vec<ClassSample>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = kind.sample(seed, i);
            Ok(ClassSample {
                index: i,
                ggm_in: ggm(&s, CutPolicy::All)?.value,
                tangle: tangle(&s)?,
                pb: critical(pb_critical(&s, 1, 1, policy, spec)?),
            })
        })
        .collect()
}
