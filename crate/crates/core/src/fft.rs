//! Centered, unitary discrete Fourier transforms.
//!
//! DC sits at index `⌊N/2⌋` in both domains:
//! `F[k] = N^{-1/2} Σ_n x[n] exp(-2πi (k-c)(n-c)/N)` with `c = ⌊N/2⌋`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure, Result};
use crate::tensor::ComplexTensor;

/// Forward and inverse plans for one length.
#[derive(Clone)]
pub struct CenteredFft {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for CenteredFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CenteredFft")
            .field("len", &self.len)
            .finish()
    }
}

impl CenteredFft {
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "FFT length must be >= 1");
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            scale: 1.0 / (len as f64).sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.forward);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.inverse);
    }

    fn run(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        assert_eq!(buf.len(), self.len);
        let c = self.len / 2;
        buf.rotate_left(c);
        plan.process(buf);
        buf.rotate_right(c);
        for z in buf.iter_mut() {
            *z *= self.scale;
        }
    }
}

pub fn fft1d_centered(v: &[Complex64]) -> Result<Vec<Complex64>> {
    ensure!(!v.is_empty(), InvalidArgument, "FFT of an empty vector");
    let mut out = v.to_vec();
    CenteredFft::new(v.len()).forward(&mut out);
    Ok(out)
}

pub fn ifft1d_centered(v: &[Complex64]) -> Result<Vec<Complex64>> {
    ensure!(!v.is_empty(), InvalidArgument, "FFT of an empty vector");
    let mut out = v.to_vec();
    CenteredFft::new(v.len()).inverse(&mut out);
    Ok(out)
}

/// Applies the centered transform along `axis` of a tensor of any rank.
pub fn fft_axis(t: &mut ComplexTensor, axis: usize, inverse: bool) {
    let dims = t.dims().to_vec();
    assert!(
        axis < dims.len(),
        "axis {axis} out of range for dims {dims:?}"
    );
    let len = dims[axis];
    if len == 1 {
        return;
    }
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let plan = CenteredFft::new(len);
    let data = t.data_mut();
    let mut line = vec![Complex64::new(0.0, 0.0); len];
    for o in 0..outer {
        let base = o * len * inner;
        for i in 0..inner {
            for (k, z) in line.iter_mut().enumerate() {
                *z = data[base + k * inner + i];
            }
            if inverse {
                plan.inverse(&mut line);
            } else {
                plan.forward(&mut line);
            }
            for (k, z) in line.iter().enumerate() {
                data[base + k * inner + i] = *z;
            }
        }
    }
}

/// Per-coil 2D transform of an `M×N×J` tensor (axes 0 and 1).
pub fn fft2d_centered(x: &ComplexTensor) -> Result<ComplexTensor> {
    x.dims3()?;
    let mut out = x.clone();
    fft_axis(&mut out, 0, false);
    fft_axis(&mut out, 1, false);
    Ok(out)
}

pub fn ifft2d_centered(k: &ComplexTensor) -> Result<ComplexTensor> {
    k.dims3()?;
    let mut out = k.clone();
    fft_axis(&mut out, 0, true);
    fft_axis(&mut out, 1, true);
    Ok(out)
}
