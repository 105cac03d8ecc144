//! Independent reference implementations used as test oracles.
//!
//! Everything here is written from the definitions with dense loops and no
//! library kernels, so agreement with the library is a real cross-check.

#![allow(dead_code)]

use entinflate::linalg::{CMatrix, C64};

pub const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Index-by-index Kronecker product of two vectors.
pub fn kron_oracle(v: &[C64], w: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); v.len() * w.len()];
    for i in 0..v.len() {
        for j in 0..w.len() {
            out[i * w.len() + j] = v[i] * w[j];
        }
    }
    out
}

fn bit(index: usize, n: usize, slot: usize) -> usize {
    (index >> (n - 1 - slot)) & 1
}

/// Dense `2^n x 2^n` matrix of a two-qubit operator acting on slots `(i, j)`.
pub fn full_operator(n: usize, i: usize, j: usize, op: &[[C64; 4]; 4]) -> Vec<Vec<C64>> {
    let dim = 1 << n;
    let mask = (1 << (n - 1 - i)) | (1 << (n - 1 - j));
    let mut m = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for (r, row) in m.iter_mut().enumerate() {
        for (col, e) in row.iter_mut().enumerate() {
            if r & !mask != col & !mask {
                continue;
            }
            let a = 2 * bit(r, n, i) + bit(r, n, j);
            let b = 2 * bit(col, n, i) + bit(col, n, j);
            *e = op[a][b];
        }
    }
    m
}

pub fn mat_vec(m: &[Vec<C64>], v: &[C64]) -> Vec<C64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn bell_vectors() -> [[C64; 4]; 4] {
    let z = c(0.0);
    [
        [z, c(H), c(H), z],
        [z, c(H), c(-H), z],
        [c(H), z, z, c(H)],
        [c(H), z, z, c(-H)],
    ]
}

/// `sqrt(M_k)` assembled as a sum of Bell projectors.
pub fn sqrt_povm(lambda: f64, k: usize) -> [[C64; 4]; 4] {
    let b = bell_vectors();
    let mut out = [[c(0.0); 4]; 4];
    for (i, v) in b.iter().enumerate() {
        let f = if i + 1 == k {
            ((1.0 + 3.0 * lambda) / 4.0).sqrt()
        } else {
            ((1.0 - lambda) / 4.0).sqrt()
        };
        for r in 0..4 {
            for s in 0..4 {
                out[r][s] += v[r] * v[s].conj() * f;
            }
        }
    }
    out
}

pub fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

pub fn normalized(mut v: Vec<C64>) -> Vec<C64> {
    let s = 1.0 / norm_sq(&v).sqrt();
    v.iter_mut().for_each(|a| *a *= s);
    v
}

/// `|<a|b>|`
pub fn abs_overlap(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm()
}

pub fn aux_vector(theta: f64, phi: f64) -> [C64; 2] {
    [
        c((theta / 2.0).cos()),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

fn log2(dim: usize) -> usize {
    dim.trailing_zeros() as usize
}

/// Unnormalised PB chain: append an auxiliary, measure (last party, auxiliary).
pub fn direct_pb(seed: &[C64], lambda: f64, aux: &[(f64, f64)], outcomes: &[usize]) -> Vec<C64> {
    let mut v = seed.to_vec();
    for (&(t, p), &k) in aux.iter().zip(outcomes) {
        let n = log2(v.len());
        v = kron_oracle(&v, &aux_vector(t, p));
        v = mat_vec(&full_operator(n + 1, n - 1, n, &sqrt_povm(lambda, k)), &v);
    }
    v
}

/// Unnormalised EB chain: append a seed copy, measure (last party, copy's first).
pub fn direct_eb(seed: &[C64], lambda: f64, outcomes: &[usize]) -> Vec<C64> {
    let mut v = seed.to_vec();
    for &k in outcomes {
        let n = log2(v.len());
        v = kron_oracle(&v, seed);
        v = mat_vec(&full_operator(n + 2, n - 1, n, &sqrt_povm(lambda, k)), &v);
    }
    v
}

/// Reduced density matrix on `keep` (sorted slots) by explicit summation.
pub fn partial_trace_oracle(rho: &[Vec<C64>], n: usize, keep: &[usize]) -> Vec<Vec<C64>> {
    let dk = 1 << keep.len();
    let traced: Vec<usize> = (0..n).filter(|s| !keep.contains(s)).collect();
    let mut out = vec![vec![C64::new(0.0, 0.0); dk]; dk];
    let compose = |kb: usize, tb: usize| -> usize {
        let mut idx = 0;
        for (p, &s) in keep.iter().enumerate() {
            idx |= ((kb >> (keep.len() - 1 - p)) & 1) << (n - 1 - s);
        }
        for (p, &s) in traced.iter().enumerate() {
            idx |= ((tb >> (traced.len() - 1 - p)) & 1) << (n - 1 - s);
        }
        idx
    };
    for a in 0..dk {
        for b in 0..dk {
            for t in 0..1usize << traced.len() {
                out[a][b] += rho[compose(a, t)][compose(b, t)];
            }
        }
    }
    out
}

/// Partial transpose over the slots in `over` by swapping row/column bits.
pub fn partial_transpose_oracle(rho: &[Vec<C64>], n: usize, over: &[usize]) -> Vec<Vec<C64>> {
    let dim = rho.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for r in 0..dim {
        for col in 0..dim {
            let (mut r2, mut c2) = (r, col);
            for &s in over {
                let m = 1 << (n - 1 - s);
                let (br, bc) = (r & m, col & m);
                r2 = (r2 & !m) | bc;
                c2 = (c2 & !m) | br;
            }
            out[r2][c2] = rho[r][col];
        }
    }
    out
}

pub fn outer(v: &[C64]) -> Vec<Vec<C64>> {
    v.iter()
        .map(|a| v.iter().map(|b| a * b.conj()).collect())
        .collect()
}

pub fn to_rows(m: &CMatrix) -> Vec<Vec<C64>> {
    (0..m.dim())
        .map(|r| (0..m.dim()).map(|s| m[(r, s)]).collect())
        .collect()
}

pub fn from_rows(m: &[Vec<C64>]) -> CMatrix {
    CMatrix::from_fn(m.len(), |r, s| m[r][s])
}

fn mat_mul(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = a.len();
    let mut out = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Characteristic polynomial coefficients `c_0..c_n` (monic) by Faddeev-LeVerrier.
pub fn char_poly(a: &[Vec<C64>]) -> Vec<C64> {
    let n = a.len();
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = c(1.0);
    let mut m = vec![vec![C64::new(0.0, 0.0); n]; n];
    for k in 1..=n {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += coeffs[n - k + 1];
        }
        m = mat_mul(a, &m);
        let tr: C64 = (0..n).map(|i| m[i][i]).sum();
        coeffs[n - k] = -tr / k as f64;
    }
    coeffs
}

/// All roots of a monic polynomial by Durand-Kerner iteration.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let eval = |x: C64| coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ci| acc * x + ci);
    let scale = 1.0 + coeffs.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(scale * 0.9, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..2000 {
        let mut shift = 0.0f64;
        for i in 0..n {
            let mut den = c(1.0);
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            if den.norm() == 0.0 {
                continue;
            }
            let d = eval(roots[i]) / den;
            roots[i] -= d;
            shift = shift.max(d.norm());
        }
        if shift < 1e-15 {
            break;
        }
    }
    // Newton polish against the undeflated polynomial.
    let deriv: Vec<C64> = (1..=n).map(|k| coeffs[k] * k as f64).collect();
    let deval = |x: C64| deriv.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ci| acc * x + ci);
    for r in &mut roots {
        for _ in 0..3 {
            let d = deval(*r);
            if d.norm() > 1e-12 {
                *r -= eval(*r) / d;
            }
        }
    }
    roots
}

/// Averages runs of sorted (descending) values closer than 1e-4. A repeated
/// root of multiplicity m is only resolved to about eps^(1/m), but the mean of
/// its cluster is accurate.
fn merge_clusters(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    let mut i = 0;
    while i < v.len() {
        let mut j = i + 1;
        while j < v.len() && v[j - 1] - v[j] < 1e-4 {
            j += 1;
        }
        let mean = v[i..j].iter().sum::<f64>() / (j - i) as f64;
        out.extend(std::iter::repeat(mean).take(j - i));
        i = j;
    }
    out
}

fn real_roots_descending(coeffs: &[C64]) -> Vec<f64> {
    let mut v: Vec<f64> = poly_roots(coeffs).iter().map(|z| z.re).collect();
    v.sort_by(|x, y| y.partial_cmp(x).unwrap());
    merge_clusters(&v)
}

/// Eigenvalues of a Hermitian matrix as characteristic-polynomial roots, descending.
pub fn eigvals_oracle(a: &[Vec<C64>]) -> Vec<f64> {
    real_roots_descending(&char_poly(a))
}

/// Wootters concurrence through the spin-flipped product `rho (sy sy) rho* (sy sy)`.
///
/// `rank` is the known rank of `rho`: the product then has exactly
/// `4 - rank` zero eigenvalues, which are set to zero before the square roots
/// (a root-finder residue of 1e-10 would otherwise leak in as 1e-5).
pub fn concurrence_oracle(rho: &[Vec<C64>], rank: usize) -> f64 {
    // sy (x) sy is real: antidiagonal [-1, 1, 1, -1].
    let yy = |r: usize, s: usize| -> f64 {
        if r + s == 3 {
            [-1.0, 1.0, 1.0, -1.0][r]
        } else {
            0.0
        }
    };
    let flipped: Vec<Vec<C64>> = (0..4)
        .map(|r| {
            (0..4)
                .map(|s| {
                    let mut acc = C64::new(0.0, 0.0);
                    for a in 0..4 {
                        for b in 0..4 {
                            acc += yy(r, a) * rho[a][b].conj() * yy(b, s);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let r = mat_mul(rho, &flipped);
    let mut roots: Vec<f64> = poly_roots(&char_poly(&r)).iter().map(|z| z.re).collect();
    roots.sort_by(|x, y| y.abs().partial_cmp(&x.abs()).unwrap());
    roots.truncate(rank);
    roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let mut ev: Vec<f64> = merge_clusters(&roots).iter().map(|z| z.max(0.0).sqrt()).collect();
    ev.resize(4, 0.0);
    (ev[0] - ev[1] - ev[2] - ev[3]).max(0.0)
}

/// Deterministic pseudo-random numbers in `[-1, 1)` for oracle inputs.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    pub fn vector(&mut self, dim: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..dim).map(|_| C64::new(self.next(), self.next())).collect();
        normalized(v)
    }

    pub fn hermitian(&mut self, dim: usize) -> Vec<Vec<C64>> {
        let g: Vec<Vec<C64>> = (0..dim)
            .map(|_| (0..dim).map(|_| C64::new(self.next(), self.next())).collect())
            .collect();
        (0..dim)
            .map(|r| (0..dim).map(|s| (g[r][s] + g[s][r].conj()) * 0.5).collect())
            .collect()
    }
}
