//! Shared helpers and independent reference implementations for the
//! integration tests.
#![allow(dead_code)]

pub mod dense;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use shlr::hankel::CMatrix;
use shlr::rng::SplitMix64;
use shlr::ComplexTensor;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn rand_vec(rng: &mut SplitMix64, n: usize) -> Vec<C> {
    (0..n)
        .map(|_| c(rng.next_gaussian(), rng.next_gaussian()))
        .collect()
}

pub fn rand_tensor(rng: &mut SplitMix64, dims: &[usize]) -> ComplexTensor {
    let n = dims.iter().product();
    ComplexTensor::new(dims.to_vec(), rand_vec(rng, n)).unwrap()
}

pub fn rand_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.next_gaussian(), rng.next_gaussian())
    })
}

pub fn rand_range(rng: &mut SplitMix64, lo: usize, hi: usize) -> usize {
    lo + (rng.next_u64() % (hi - lo + 1) as u64) as usize
}

pub fn vdot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn mdot(a: &CMatrix, b: &CMatrix) -> C {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vnorm(a: &[C]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_diff(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn rel_diff(a: &[C], b: &[C]) -> f64 {
    let d: Vec<C> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    vnorm(&d) / vnorm(b).max(f64::MIN_POSITIVE)
}

/// Direct O(N²) centred unitary DFT: DC at `⌊N/2⌋`.
pub fn naive_dft(v: &[C], inverse: bool) -> Vec<C> {
    let n = v.len();
    let ctr = (n / 2) as f64;
    let sign = if inverse { 1.0 } else { -1.0 };
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|t| {
                    let ang = sign * 2.0 * PI * (k as f64 - ctr) * (t as f64 - ctr) / n as f64;
                    v[t] * C::from_polar(s, ang)
                })
                .sum()
        })
        .collect()
}

/// Centred DFT matrix of size `n`.
pub fn dft_matrix(n: usize) -> DMatrix<C> {
    let mut m = DMatrix::zeros(n, n);
    for t in 0..n {
        let mut e = vec![C::new(0.0, 0.0); n];
        e[t] = C::new(1.0, 0.0);
        for (k, z) in naive_dft(&e, false).into_iter().enumerate() {
            m[(k, t)] = z;
        }
    }
    m
}

/// Filter weights on the centred frequency grid, by direct summation.
pub fn naive_weights(taps: &[C], n: usize) -> Vec<C> {
    let ctr = (n / 2) as f64;
    (0..n)
        .map(|k| {
            taps.iter()
                .enumerate()
                .map(|(t, w)| {
                    w * C::from_polar(1.0, -2.0 * PI * (k as f64 - ctr) * t as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

/// One-sided (Hestenes) Jacobi SVD of a complex matrix. Returns the
/// orthogonalised columns `A·V` (column norms are the singular values) and
/// the unitary `V`.
pub fn jacobi_svd(a: &CMatrix) -> (CMatrix, CMatrix) {
    let (_, n) = a.shape();
    let mut w = a.clone();
    let mut v = CMatrix::identity(n, n);
    let floor = 1e-32 * a.norm_squared();
    for _sweep in 0..200 {
        let mut off: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = w.column(i).iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w.column(j).iter().map(|z| z.norm_sqr()).sum();
                let gamma: C = w
                    .column(i)
                    .iter()
                    .zip(w.column(j).iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let g = gamma.norm();
                if g <= floor || g <= 1e-16 * (alpha * beta).sqrt() {
                    continue;
                }
                off = off.max(g / (alpha * beta).sqrt());
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let ph = (gamma / g).conj();
                for m in [&mut w, &mut v] {
                    for r in 0..m.nrows() {
                        let (x, y) = (m[(r, i)], m[(r, j)]);
                        m[(r, i)] = x * cs - y * ph * sn;
                        m[(r, j)] = x * sn + y * ph * cs;
                    }
                }
            }
        }
        if off < 1e-15 {
            break;
        }
    }
    (w, v)
}

/// Singular values, descending.
pub fn oracle_singular_values(a: &CMatrix) -> Vec<f64> {
    let (w, _) = jacobi_svd(a);
    let mut s: Vec<f64> = (0..w.ncols()).map(|k| w.column(k).norm()).collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s.truncate(a.nrows().min(a.ncols()));
    s
}

/// Singular-value soft thresholding from the Jacobi decomposition.
pub fn oracle_svt(a: &CMatrix, tau: f64) -> CMatrix {
    let (w, v) = jacobi_svd(a);
    let mut out = CMatrix::zeros(a.nrows(), a.ncols());
    for k in 0..w.ncols() {
        let s = w.column(k).norm();
        if s > tau {
            let f = (s - tau) / s;
            for r in 0..a.nrows() {
                for q in 0..a.ncols() {
                    out[(r, q)] += w[(r, k)] * v[(q, k)].conj() * f;
                }
            }
        }
    }
    out
}

/// Real `2n×2n` form of a complex-linear map (`[Re; Im]` stacking).
pub fn realify(m: &DMatrix<C>) -> DMatrix<f64> {
    let (r, q) = m.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * q);
    for i in 0..r {
        for j in 0..q {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, q + j)] = -z.im;
            out[(r + i, j)] = z.im;
            out[(r + i, q + j)] = z.re;
        }
    }
    out
}

/// Real form of complex conjugation on `n` entries.
pub fn conj_real(n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::identity(2 * n, 2 * n);
    for i in n..2 * n {
        out[(i, i)] = -1.0;
    }
    out
}

pub fn to_real(v: &[C]) -> nalgebra::DVector<f64> {
    let n = v.len();
    nalgebra::DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

pub fn from_real(v: &nalgebra::DVector<f64>) -> Vec<C> {
    let n = v.len() / 2;
    (0..n).map(|i| c(v[i], v[n + i])).collect()
}
