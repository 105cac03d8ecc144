//! Maximisation over sharpness and auxiliary angles.
//!
//! The inner search is a multi-start coordinate pattern search over the
//! auxiliary angles; the outer search scans a sharpness grid with warm starts
//! and then narrows the best bracket by golden-section steps.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::families::{AuxQubit, RngSeed};
use crate::inflation::{EbRun, PbMixed, PbPure};
use crate::measures::CutPolicy;
use crate::state::{MixedState, PureState, QState};

pub mod analytic;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpec {
    pub lambda_lo: f64,
    pub lambda_hi: f64,
    pub lambda_step: f64,
    /// Multi-start count for a cold search.
    pub starts: usize,
    /// Warm-start each grid point from its neighbour's optimum.
    pub warm_start: bool,
    /// Starts used when a warm point is available (the warm point included).
    pub warm_starts: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub tol_value: f64,
    /// Final width of the golden-section bracket on lambda.
    pub tol_param: f64,
    /// Evaluation budget of one inner search.
    pub max_evals: usize,
    pub seed: u64,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            lambda_lo: 0.0,
            lambda_hi: 1.0,
            lambda_step: 0.005,
            starts: 8,
            warm_start: true,
            warm_starts: 2,
            initial_step: PI / 8.0,
            min_step: 1e-5,
            tol_value: 1e-9,
            tol_param: 1e-4,
            max_evals: 200_000,
            seed: 0x5eed,
        }
    }
}

impl SearchSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lambda_lo >= 0.0
            && self.lambda_hi <= 1.0
            && self.lambda_lo <= self.lambda_hi
            && self.lambda_step > 0.0
            && self.starts >= 1
            && self.warm_starts >= 1
            && self.initial_step > 0.0
            && self.min_step > 0.0
            && self.tol_param > 0.0
            && self.max_evals > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid search spec {self:?}")))
        }
    }

    /// Grid points `lo, lo + step, ..., hi` (the end point always included).
    pub fn lambda_grid(&self) -> Vec<f64> {
        let n = ((self.lambda_hi - self.lambda_lo) / self.lambda_step + 1e-9).floor() as usize;
        let mut g: Vec<f64> = (0..=n)
            .map(|i| self.lambda_lo + i as f64 * self.lambda_step)
            .collect();
        if (g[n] - self.lambda_hi).abs() > 1e-12 {
            g.push(self.lambda_hi);
        }
        g
    }

    /// Preset for large ensembles: 0.05 grid, four cold starts per point.
    pub fn ensemble() -> Self {
        Self {
            lambda_step: 0.05,
            starts: 4,
            warm_start: false,
            ..Self::default()
        }
    }

    /// Same search on a coarser grid with fewer starts.
    pub fn coarse(step: f64, starts: usize) -> Self {
        Self {
            lambda_step: step,
            starts,
            ..Self::default()
        }
    }
}

/// Result of one inner maximisation at fixed lambda.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxSearch {
    pub value: f64,
    pub angles: Vec<f64>,
    pub evals: usize,
    pub budget_exhausted: bool,
    /// The objective varied by less than `tol_value` across the start points.
    pub aux_independent: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub lambda: f64,
    pub value: f64,
    pub angles: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    pub lambda_c: f64,
    pub aux_opt: Vec<AuxQubit>,
    pub value_c: f64,
    pub curve: Vec<CurvePoint>,
    pub evals_used: usize,
    pub budget_exhausted: bool,
    pub aux_independent: bool,
}

fn angle_span(i: usize) -> f64 {
    if i % 2 == 0 {
        PI
    } else {
        2.0 * PI
    }
}

/// Angles as auxiliaries mapped onto the canonical box.
pub fn angles_to_aux(angles: &[f64]) -> Vec<AuxQubit> {
    angles
        .chunks(2)
        .map(|c| AuxQubit::wrapped(c[0], c[1]))
        .collect()
}

fn latin_hypercube(dim: usize, n: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut pts = vec![vec![0.0; dim]; n];
    for d in 0..dim {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        for (s, p) in pts.iter_mut().enumerate() {
            let u: f64 = rng.random();
            p[d] = (perm[s] as f64 + u) / n as f64 * angle_span(d);
        }
    }
    pts
}

fn explore(
    f: &dyn Fn(&[f64]) -> f64,
    x: &mut [f64],
    fx: &mut f64,
    step: f64,
    scale: Option<&[f64]>,
    budget: &mut usize,
) -> bool {
    let mut improved = false;
    for i in 0..x.len() {
        for dir in [1.0, -1.0] {
            if *budget == 0 {
                return improved;
            }
            let old = x[i];
            x[i] = old + dir * step * scale.map_or(1.0, |s| s[i]);
            let v = f(x);
            *budget -= 1;
            if v > *fx {
                *fx = v;
                improved = true;
                break;
            }
            x[i] = old;
        }
    }
    improved
}

/// Hooke-Jeeves: coordinate exploration plus pattern moves along the last
/// successful displacement, which lets the search travel along ridges.
fn pattern_search(
    f: &dyn Fn(&[f64]) -> f64,
    mut x: Vec<f64>,
    fx0: f64,
    step0: f64,
    scale: Option<&[f64]>,
    min_step: f64,
    budget: &mut usize,
) -> (f64, Vec<f64>) {
    let mut fx = fx0;
    let mut step = step0;
    while step >= min_step && *budget > 0 {
        let base = x.clone();
        if !explore(f, &mut x, &mut fx, step, scale, budget) {
            step *= 0.5;
            continue;
        }
        let mut prev = base;
        loop {
            let mut trial: Vec<f64> = x.iter().zip(&prev).map(|(a, b)| 2.0 * a - b).collect();
            if *budget == 0 {
                break;
            }
            let mut ft = f(&trial);
            *budget -= 1;
            explore(f, &mut trial, &mut ft, step, scale, budget);
            if ft > fx {
                prev = std::mem::replace(&mut x, trial);
                fx = ft;
            } else {
                break;
            }
        }
    }
    (fx, x)
}

/// Maximises `objective` over `dim` auxiliary angles (`theta, phi` pairs).
///
/// `salt` decorrelates the start points of different calls that share a
/// spec seed. A `warm` point replaces the cold Latin-hypercube design by
/// itself plus `warm_starts - 1` fresh points.
pub fn max_over_aux(
    objective: &dyn Fn(&[f64]) -> f64,
    dim: usize,
    spec: &SearchSpec,
    warm: Option<&[f64]>,
    salt: u64,
) -> AuxSearch {
    if dim == 0 {
        return AuxSearch {
            value: objective(&[]),
            angles: Vec::new(),
            evals: 1,
            budget_exhausted: false,
            aux_independent: true,
        };
    }
    let mut rng = RngSeed(spec.seed).stream(salt);
    let (mut starts, warm_step) = match warm {
        Some(w) => {
            let mut s = vec![w.to_vec()];
            s.extend(latin_hypercube(dim, spec.warm_starts - 1, &mut rng));
            (s, Some(spec.initial_step / 4.0))
        }
        None => (latin_hypercube(dim, spec.starts, &mut rng), None),
    };
    let mut budget = spec.max_evals;
    let initial: Vec<f64> = starts.iter().map(|x| objective(x)).collect();
    budget = budget.saturating_sub(starts.len());
    let lo = initial.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = initial.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let aux_independent = warm.is_none() && hi - lo < spec.tol_value;

    let mut best = (f64::NEG_INFINITY, Vec::new());
    if aux_independent {
        best = (initial[0], starts.swap_remove(0));
    } else {
        for (i, (x, fx)) in starts.into_iter().zip(initial).enumerate() {
            let step = match (i, warm_step) {
                (0, Some(s)) => s,
                _ => spec.initial_step,
            };
            let (v, xs) = pattern_search(objective, x, fx, step, None, spec.min_step, &mut budget);
            if v > best.0 {
                best = (v, xs);
            }
        }
    }
    AuxSearch {
        value: best.0,
        angles: best.1,
        evals: spec.max_evals - budget,
        budget_exhausted: budget == 0,
        aux_independent,
    }
}

/// Scans the sharpness grid (warm-starting each point from its neighbour),
/// then refines the best bracket by golden-section narrowing.
pub fn critical_point(
    objective: &dyn Fn(f64, &[f64]) -> f64,
    dim: usize,
    spec: &SearchSpec,
) -> Result<OptimizationResult> {
    spec.validate()?;
    let grid = spec.lambda_grid();
    let mut curve = Vec::with_capacity(grid.len());
    let mut evals = 0;
    let mut exhausted = false;
    let mut independent = true;
    let mut warm: Option<Vec<f64>> = None;
    for (i, &lam) in grid.iter().enumerate() {
        let f = |x: &[f64]| objective(lam, x);
        let w = if spec.warm_start { warm.as_deref() } else { None };
        let r = max_over_aux(&f, dim, spec, w, i as u64);
        evals += r.evals;
        exhausted |= r.budget_exhausted;
        if w.is_none() {
            independent &= r.aux_independent;
        }
        // A point whose search found nothing better than zero carries no
        // useful angles; keep the previous warm point.
        if r.value > 0.0 || warm.is_none() {
            warm = Some(r.angles.clone());
        }
        curve.push(CurvePoint {
            lambda: lam,
            value: r.value,
            angles: r.angles,
        });
    }
    let ib = argmax(&curve);
    let mut best = curve[ib].clone();
    if grid.len() >= 3 {
        let lo = grid[ib.saturating_sub(1)];
        let hi = grid[(ib + 1).min(grid.len() - 1)];
        let seed_angles = best.angles.clone();
        let mut salt = grid.len() as u64;
        let mut eval = |lam: f64| {
            let f = |x: &[f64]| objective(lam, x);
            salt += 1;
            let r = max_over_aux(&f, dim, spec, Some(&seed_angles), salt);
            evals += r.evals;
            exhausted |= r.budget_exhausted;
            CurvePoint {
                lambda: lam,
                value: r.value,
                angles: r.angles,
            }
        };
        let refined = golden_max(&mut eval, lo, hi, spec.tol_param);
        if refined.value > best.value {
            best = refined;
        }
    }
    Ok(OptimizationResult {
        lambda_c: best.lambda,
        aux_opt: angles_to_aux(&best.angles),
        value_c: best.value,
        curve,
        evals_used: evals,
        budget_exhausted: exhausted,
        aux_independent: independent,
    })
}

/// Multi-start pattern search over sharpness and angles together.
///
/// Much cheaper than [`critical_point`] but less reliable near kinks of the
/// objective; no curve is recorded. Sharpness moves on a scale of
/// `(hi - lo) / 2 pi` per angle radian.
pub fn joint_critical(
    objective: &dyn Fn(f64, &[f64]) -> f64,
    dim: usize,
    spec: &SearchSpec,
    salt: u64,
) -> Result<OptimizationResult> {
    spec.validate()?;
    let (lo, hi) = (spec.lambda_lo, spec.lambda_hi);
    let width = hi - lo;
    let f = |x: &[f64]| {
        if x[0] < lo || x[0] > hi {
            f64::NEG_INFINITY
        } else {
            objective(x[0], &x[1..])
        }
    };
    let mut scale = vec![1.0; dim + 1];
    scale[0] = width / (2.0 * PI);
    let mut rng = RngSeed(spec.seed).stream(salt);
    let mut starts = latin_hypercube(dim + 1, spec.starts, &mut rng);
    for s in &mut starts {
        // the first coordinate was drawn on [0, pi)
        s[0] = lo + s[0] / PI * width;
    }
    let mut budget = spec.max_evals;
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for x in starts {
        let fx = f(&x);
        budget = budget.saturating_sub(1);
        let (v, xs) = pattern_search(&f, x, fx, spec.initial_step, Some(&scale), spec.min_step, &mut budget);
        if v > best.0 {
            best = (v, xs);
        }
    }
    Ok(OptimizationResult {
        lambda_c: best.1[0],
        aux_opt: angles_to_aux(&best.1[1..]),
        value_c: best.0,
        curve: Vec::new(),
        evals_used: spec.max_evals - budget,
        budget_exhausted: budget == 0,
        aux_independent: false,
    })
}

fn argmax(curve: &[CurvePoint]) -> usize {
    let mut ib = 0;
    for (i, p) in curve.iter().enumerate() {
        if p.value > curve[ib].value {
            ib = i;
        }
    }
    ib
}

fn golden_max(
    f: &mut dyn FnMut(f64) -> CurvePoint,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> CurvePoint {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc.value >= fd.value {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc.value >= fd.value {
        fc
    } else {
        fd
    }
}

/// Critical GGM of PB inflation from a pure seed.
pub fn pb_critical(
    seed: &PureState,
    rounds: usize,
    outcome: usize,
    policy: Option<CutPolicy>,
    spec: &SearchSpec,
) -> Result<OptimizationResult> {
    let k = PbPure::new(seed, rounds, outcome, policy);
    critical_point(&|l, x| k.ggm(l, x), k.n_angles(), spec)
}

/// Critical value of EB inflation: GGM for pure seeds, monogamy score for mixed.
pub fn eb_critical(
    seed: &QState,
    rounds: usize,
    outcome: usize,
    policy: Option<CutPolicy>,
    spec: &SearchSpec,
) -> Result<OptimizationResult> {
    let k = EbRun::new(seed, rounds, outcome, policy);
    critical_point(&|l, _| k.value(l), 0, spec)
}

/// Critical negativity monogamy score of PB inflation from a Werner seed.
pub fn maximize_monogamy(werner_p: f64, rounds: usize, spec: &SearchSpec) -> Result<OptimizationResult> {
    let seed: MixedState = crate::families::werner(werner_p)?;
    let k = PbMixed::new(&seed, rounds, 1);
    critical_point(&|l, x| k.monogamy(l, x), k.n_angles(), spec)
}

/// EB counterpart of [`maximize_monogamy`]: Werner seed and Werner copies.
pub fn maximize_monogamy_eb(werner_p: f64, rounds: usize, spec: &SearchSpec) -> Result<OptimizationResult> {
    let seed = QState::Mixed(crate::families::werner(werner_p)?);
    eb_critical(&seed, rounds, 1, None, spec)
}
