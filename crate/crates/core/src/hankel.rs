//! Hankel lifting and the per-vector pieces of the lifted operators:
//! sparsifying-filter weights and the virtual-coil reflection.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Hankel window length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Pencil {
    /// 23 for signals of length ≥ 64, otherwise `⌈len/3⌉ + 1` (capped at `len`).
    #[default]
    Auto,
    Fixed(usize),
}

impl Pencil {
    pub fn resolve(self, len: usize) -> Result<usize> {
        let p = match self {
            Pencil::Auto => default_pencil(len),
            Pencil::Fixed(p) => p,
        };
        ensure!(
            p >= 1 && p <= len,
            InvalidArgument,
            "pencil {p} must be in 1..={len}"
        );
        Ok(p)
    }
}

pub fn default_pencil(len: usize) -> usize {
    if len >= 64 {
        23
    } else {
        (len.div_ceil(3) + 1).min(len).max(1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HankelConfig {
    pub pencil: Pencil,
    /// 1D sparsifying filter; `[1]` disables weighting.
    pub filter_taps: Vec<Complex64>,
    pub virtual_coil: bool,
}

impl Default for HankelConfig {
    fn default() -> Self {
        Self {
            pencil: Pencil::Auto,
            filter_taps: vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            virtual_coil: false,
        }
    }
}

impl HankelConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            !self.filter_taps.is_empty(),
            InvalidArgument,
            "filter taps must be nonempty"
        );
        if let Pencil::Fixed(p) = self.pencil {
            ensure!(p >= 1, InvalidArgument, "pencil must be >= 1");
        }
        Ok(())
    }
}

/// `out[i, j] = v[i + j]`, shape `p × (N−p+1)`.
pub fn hankel_lift(v: &[Complex64], p: usize) -> Result<CMatrix> {
    let n = v.len();
    ensure!(
        p >= 1 && p <= n,
        InvalidArgument,
        "pencil {p} must be in 1..={n}"
    );
    Ok(CMatrix::from_fn(p, n - p + 1, |i, j| v[i + j]))
}

/// Anti-diagonal sums of a `p × (N−p+1)` matrix.
pub fn hankel_adjoint(m: &CMatrix, n: usize) -> Result<Vec<Complex64>> {
    let (p, k) = m.shape();
    ensure!(
        p >= 1 && p <= n && k == n - p + 1,
        ShapeMismatch,
        "{p}x{k} matrix is not a Hankel lift of length {n}"
    );
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..k {
        for i in 0..p {
            out[i + j] += m[(i, j)];
        }
    }
    Ok(out)
}

/// Number of Hankel entries sharing each vector sample, i.e. the diagonal of
/// `H* H`.
pub fn antidiagonal_counts(n: usize, p: usize) -> Vec<f64> {
    let k = n + 1 - p;
    (0..n)
        .map(|t| {
            let lo = t.saturating_sub(k - 1);
            let hi = t.min(p - 1);
            (hi + 1 - lo) as f64
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HankelDims {
    /// Per-row lifted matrix of the separable model.
    pub separable_rows: usize,
    pub separable_cols: usize,
    /// Block-Hankel matrix of a 2D `p×p` window, for comparison.
    pub block_rows: usize,
    pub block_cols: usize,
}

impl HankelDims {
    pub fn separable_entries(&self) -> u64 {
        self.separable_rows as u64 * self.separable_cols as u64
    }

    pub fn block_entries(&self) -> u64 {
        self.block_rows as u64 * self.block_cols as u64
    }

    pub fn entry_ratio(&self) -> f64 {
        self.separable_entries() as f64 / self.block_entries() as f64
    }
}

/// Lifted-matrix sizes for an `M×N×J` dataset with pencil `p` in both
/// directions.
pub fn hankel_dims(m: usize, n: usize, j: usize, p: usize, vc: bool) -> Result<HankelDims> {
    ensure!(
        p >= 1 && p <= m && p <= n && j >= 1,
        InvalidArgument,
        "pencil {p} does not fit {m}x{n}x{j}"
    );
    let copies = if vc { 2 } else { 1 };
    Ok(HankelDims {
        separable_rows: p,
        separable_cols: copies * j * (n - p + 1),
        block_rows: p * p * j,
        block_cols: (m - p + 1) * (n - p + 1),
    })
}

/// Unnormalized DFT of the zero-padded taps, DC first.
pub fn weights_from_filter(taps: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    ensure!(
        !taps.is_empty(),
        InvalidArgument,
        "filter taps must be nonempty"
    );
    ensure!(
        taps.len() <= n,
        InvalidArgument,
        "{} filter taps do not fit length {n}",
        taps.len()
    );
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..taps.len()].copy_from_slice(taps);
    rustfft::FftPlanner::new()
        .plan_fft_forward(n)
        .process(&mut buf);
    Ok(buf)
}

/// Filter weights reordered to the centered convention (DC at `⌊N/2⌋`).
pub fn centered_weights(taps: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    let mut w = weights_from_filter(taps, n)?;
    w.rotate_right(n / 2);
    Ok(w)
}

/// Conjugate and reverse: `out[n] = conj(v[N−1−n])`.
pub fn virtual_coil_dagger(v: &[Complex64]) -> Vec<Complex64> {
    v.iter().rev().map(|z| z.conj()).collect()
}
