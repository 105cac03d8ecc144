//! Small dense complex linear algebra.
//!
//! Everything here is sized for registers of at most eight qubits, so a
//! row-major `Vec` and a cyclic Jacobi eigensolver are all that is needed.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data. Panics if `data` is not square.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row-major data is not {dim}x{dim}");
        Self { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|v><v|`
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Kronecker product; `self` supplies the most significant index.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, c| {
            self[(r / m, c / m)] * other[(r % m, c % m)]
        })
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest elementwise modulus of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                let row = &self.data[r * self.dim..(r + 1) * self.dim];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
///
/// Rejects inputs whose Hermiticity defect exceeds `1e-10`.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let defect = m.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let mut vals = eigvalsh_unchecked(m);
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// Eigen-decomposition of a Hermitian matrix: `(values, vectors)` with the
/// eigenvectors stored as the columns of the returned matrix. Unsorted.
pub(crate) fn eigh_unchecked(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let mut a = m.clone();
    let mut v = CMatrix::identity(m.dim());
    jacobi(&mut a, Some(&mut v));
    ((0..m.dim()).map(|i| a[(i, i)].re).collect(), v)
}

/// Eigenvalues of a matrix assumed Hermitian, unsorted.
pub(crate) fn eigvalsh_unchecked(m: &CMatrix) -> Vec<f64> {
    match m.dim() {
        1 => vec![m[(0, 0)].re],
        2 => {
            let (hi, lo) = eig2(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
            vec![hi, lo]
        }
        _ => {
            let mut a = m.clone();
            jacobi(&mut a, None);
            (0..m.dim()).map(|i| a[(i, i)].re).collect()
        }
    }
}

/// Largest eigenvalue of a matrix assumed Hermitian.
pub(crate) fn max_eigvalsh_unchecked(m: &CMatrix) -> f64 {
    eigvalsh_unchecked(m)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Closed-form eigenvalues `(larger, smaller)` of `[[a, b], [b*, d]]`.
#[inline]
pub(crate) fn eig2(a: f64, d: f64, b: C64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean + half_gap, mean - half_gap)
}

/// Cyclic complex Jacobi. Diagonalises `a` in place; when `vecs` is given the
/// accumulated rotations are applied to it from the right.
fn jacobi(a: &mut CMatrix, mut vecs: Option<&mut CMatrix>) {
    let n = a.dim();
    if n < 2 {
        return;
    }
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let scale: f64 = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
    if scale == 0.0 {
        return;
    }
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= 1e-32 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if r <= 1e-300 || r <= 1e-17 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let e = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G acts on columns p, q: G_pp = c, G_pq = s e, G_qp = -s e*, G_qq = c.
                let se = e * s;
                let se_conj = se.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * se_conj;
                    a[(k, q)] = akp * se + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * se;
                    a[(q, k)] = apk * se_conj + aqk * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                if let Some(v) = vecs.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * se_conj;
                        v[(k, q)] = vkp * se + vkq * c;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn half_identity() {
        let m = CMatrix::identity(2).scale(c(0.5, 0.0));
        assert_eq!(hermitian_eigenvalues(&m).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn diagonal_sorted_descending() {
        let m = CMatrix::from_real_diagonal(&[0.3, 0.7]);
        let e = hermitian_eigenvalues(&m).unwrap();
        assert!((e[0] - 0.7).abs() < 1e-15 && (e[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(3);
        m[(0, 2)] = c(0.0, 1.0);
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn eigenvectors_reconstruct() {
        let h = CMatrix::from_fn(5, |r, col| {
            if r == col {
                c(r as f64 - 1.3, 0.0)
            } else if r < col {
                c(0.1 * (r + 2 * col) as f64, 0.3 - 0.05 * r as f64)
            } else {
                c(0.1 * (col + 2 * r) as f64, -(0.3 - 0.05 * col as f64))
            }
        });
        let (vals, v) = eigh_unchecked(&h);
        let d = CMatrix::from_real_diagonal(&vals);
        let back = &(&v * &d) * &v.adjoint();
        assert!(back.max_abs_diff(&h) < 1e-12);
        let id = &v.adjoint() * &v;
        assert!(id.max_abs_diff(&CMatrix::identity(5)) < 1e-12);
    }

    #[test]
    fn kron_places_left_factor_high() {
        let x = CMatrix::from_row_major(2, vec![ZERO, ONE, ONE, ZERO]);
        let z = CMatrix::from_real_diagonal(&[1.0, -1.0]);
        let xz = x.kron(&z);
        assert_eq!(xz[(0, 2)], ONE);
        assert_eq!(xz[(1, 3)], -ONE);
        assert_eq!(xz[(0, 1)], ZERO);
    }
}
