//! Normal operators of the X-subproblems.
//!
//! Parallel imaging (`M×N×J` image `X`):
//!
//! ```text
//! A = λ F2*U*U F2 + β Σ_m P_m* L_row* L_row P_m + β Σ_n Q_n* L_col* L_col Q_n
//!     + λ1 (G − I)*(G − I)
//! ```
//!
//! Parameter imaging (`N×L×J` phase-encoding/echo plane at one readout
//! position):
//!
//! ```text
//! A = λ F_pe*U*U F_pe + β Σ_n P_n* H* H P_n + β Σ_l Q_l* L_pe* L_pe Q_l
//! ```
//!
//! Without the self-consistency term both operators are diagonal in the
//! transformed domain, which gives a direct solve.

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::fft::fft_axis;
use crate::hankel::{HankelConfig, Pencil};
use crate::lifting::LineLift;
use crate::sampling::SamplingMask;
use crate::spirit::{SpiritKernels, SpiritOperator};
use crate::tensor::ComplexTensor;

/// Mask flags for an `rows × cols` grid; a `1 × cols` line mask is
/// broadcast along the rows.
pub fn mask_flags(mask: &SamplingMask, rows: usize, cols: usize) -> Result<Vec<bool>> {
    if mask.dims() == (rows, cols) {
        return Ok(mask.bits().to_vec());
    }
    ensure!(
        mask.rows() == 1 && mask.cols() == cols,
        ShapeMismatch,
        "mask {}x{} does not match data {rows}x{cols}",
        mask.rows(),
        mask.cols()
    );
    Ok(mask.broadcast_rows(rows)?.bits().to_vec())
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `F* U F x` where `F` transforms `axes` and the mask covers the first two
/// dims.
fn masked_projection(x: &ComplexTensor, mask: &[bool], axes: &[usize]) -> ComplexTensor {
    let mut k = x.clone();
    for &a in axes {
        fft_axis(&mut k, a, false);
    }
    let inner = x.dims()[2..].iter().product::<usize>();
    for (chunk, &b) in k.data_mut().chunks_exact_mut(inner).zip(mask) {
        if !b {
            chunk.fill(zero());
        }
    }
    for &a in axes {
        fft_axis(&mut k, a, true);
    }
    k
}

/// Divides by a diagonal in the transformed domain, mapping zero entries of
/// the diagonal to zero.
fn diagonal_solve(rhs: &ComplexTensor, diag: &[f64], axes: &[usize]) -> ComplexTensor {
    let mut k = rhs.clone();
    for &a in axes {
        fft_axis(&mut k, a, false);
    }
    let inner = rhs.dims()[2..].iter().product::<usize>();
    for (chunk, &d) in k.data_mut().chunks_exact_mut(inner).zip(diag) {
        for z in chunk {
            *z = if d > 0.0 { *z / d } else { zero() };
        }
    }
    for &a in axes {
        fft_axis(&mut k, a, true);
    }
    k
}

#[derive(Clone, Debug)]
pub struct PiNormal {
    dims: (usize, usize, usize),
    mask: Vec<bool>,
    pub rows: LineLift,
    pub cols: LineLift,
    spirit: Option<SpiritOperator>,
    lambda: f64,
    lambda1: f64,
    beta: f64,
}

impl PiNormal {
    pub fn new(
        dims: (usize, usize, usize),
        mask: &SamplingMask,
        kernels: Option<&SpiritKernels>,
        cfg: &HankelConfig,
        lambda: f64,
        lambda1: f64,
        beta: f64,
    ) -> Result<Self> {
        let (m, n, j) = dims;
        let mask = mask_flags(mask, m, n)?;
        let spirit = match kernels {
            Some(g) => {
                ensure!(
                    g.coils() == j,
                    ShapeMismatch,
                    "kernels calibrated for {} coils, data has {j}",
                    g.coils()
                );
                Some(SpiritOperator::new(g, m, n)?)
            }
            None => None,
        };
        Ok(Self {
            dims,
            mask,
            rows: LineLift::rows(dims, cfg)?,
            cols: LineLift::cols(dims, cfg)?,
            spirit,
            lambda,
            lambda1,
            beta,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn spirit(&self) -> Option<&SpiritOperator> {
        self.spirit.as_ref()
    }

    /// True when the self-consistency term contributes to the operator.
    pub fn has_spirit_term(&self) -> bool {
        self.spirit.is_some() && self.lambda1 != 0.0
    }

    pub fn apply(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        let d = x.dims3()?;
        ensure!(
            d == self.dims,
            ShapeMismatch,
            "operator built for {:?}, image is {:?}",
            self.dims,
            d
        );
        let mut out = masked_projection(x, &self.mask, &[0, 1]);
        out.scale(Complex64::new(self.lambda, 0.0));
        if self.beta != 0.0 {
            let b = Complex64::new(self.beta, 0.0);
            out.axpy(b, &self.rows.gram_apply(x)?);
            out.axpy(b, &self.cols.gram_apply(x)?);
        }
        if let (Some(g), true) = (&self.spirit, self.lambda1 != 0.0) {
            out.axpy(Complex64::new(self.lambda1, 0.0), &g.residual_gram(x)?);
        }
        Ok(out)
    }

    /// Diagonal of the operator in 2D k-space, valid when the
    /// self-consistency term is absent.
    pub fn kspace_diagonal(&self) -> Vec<f64> {
        let (m, n, _) = self.dims;
        let d_row = self.rows.spectral_gram();
        let d_col = self.cols.spectral_gram();
        (0..m * n)
            .map(|i| {
                let (km, kn) = (i / n, i % n);
                let u = if self.mask[i] { self.lambda } else { 0.0 };
                u + self.beta * (d_row[kn] + d_col[km])
            })
            .collect()
    }

    /// Direct solve `A x = rhs`; `None` when the self-consistency term
    /// prevents diagonalisation.
    pub fn direct_solve(&self, rhs: &ComplexTensor) -> Option<ComplexTensor> {
        if self.has_spirit_term() {
            return None;
        }
        Some(diagonal_solve(rhs, &self.kspace_diagonal(), &[0, 1]))
    }

    /// `λ F2* U* Y` for zero-filled k-space `Y`.
    pub fn data_rhs(&self, y: &ComplexTensor) -> Result<ComplexTensor> {
        let d = y.dims3()?;
        ensure!(
            d == self.dims,
            ShapeMismatch,
            "k-space {:?} vs operator {:?}",
            d,
            self.dims
        );
        let mut k = y.clone();
        let j = self.dims.2;
        for (chunk, &b) in k.data_mut().chunks_exact_mut(j).zip(&self.mask) {
            if !b {
                chunk.fill(zero());
            }
        }
        fft_axis(&mut k, 0, true);
        fft_axis(&mut k, 1, true);
        k.scale(Complex64::new(self.lambda, 0.0));
        Ok(k)
    }
}

/// The parallel-imaging normal operator applied once.
pub fn normal_apply(
    x: &ComplexTensor,
    mask: &SamplingMask,
    kernels: Option<&SpiritKernels>,
    cfg: &HankelConfig,
    lambda: f64,
    lambda1: f64,
    beta: f64,
) -> Result<ComplexTensor> {
    PiNormal::new(x.dims3()?, mask, kernels, cfg, lambda, lambda1, beta)?.apply(x)
}

#[derive(Clone, Debug)]
pub struct ParamNormal {
    dims: (usize, usize, usize),
    mask: Vec<bool>,
    /// Weighted Fourier lifts of each echo's phase-encoding line.
    pub pe: LineLift,
    /// Unweighted lifts of each phase-encoding position's echo train.
    pub param: LineLift,
    lambda: f64,
    beta: f64,
}

impl ParamNormal {
    pub fn new(
        dims: (usize, usize, usize),
        mask: &SamplingMask,
        cfg: &HankelConfig,
        param_pencil: Pencil,
        lambda: f64,
        beta: f64,
    ) -> Result<Self> {
        cfg.validate()?;
        let (n, l, _) = dims;
        ensure!(
            mask.dims() == (n, l),
            ShapeMismatch,
            "mask {}x{} does not match the {n}x{l} phase-encoding/echo plane",
            mask.rows(),
            mask.cols()
        );
        Ok(Self {
            dims,
            mask: mask.bits().to_vec(),
            pe: LineLift::new(
                dims,
                0,
                true,
                Some(&cfg.filter_taps),
                cfg.pencil,
                cfg.virtual_coil,
            )?,
            param: LineLift::new(dims, 1, false, None, param_pencil, false)?,
            lambda,
            beta,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn apply(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        let d = x.dims3()?;
        ensure!(
            d == self.dims,
            ShapeMismatch,
            "operator {:?}, image {:?}",
            self.dims,
            d
        );
        let mut out = masked_projection(x, &self.mask, &[0]);
        out.scale(Complex64::new(self.lambda, 0.0));
        if self.beta != 0.0 {
            let b = Complex64::new(self.beta, 0.0);
            out.axpy(b, &self.param.gram_apply(x)?);
            out.axpy(b, &self.pe.gram_apply(x)?);
        }
        Ok(out)
    }

    /// Diagonal in the (phase-encoding frequency, echo) domain.
    pub fn spectral_diagonal(&self) -> Vec<f64> {
        let (n, l, _) = self.dims;
        let d_pe = self.pe.spectral_gram();
        let c_par = self.param.spectral_gram();
        (0..n * l)
            .map(|i| {
                let (k, e) = (i / l, i % l);
                let u = if self.mask[i] { self.lambda } else { 0.0 };
                u + self.beta * (d_pe[k] + c_par[e])
            })
            .collect()
    }

    pub fn direct_solve(&self, rhs: &ComplexTensor) -> ComplexTensor {
        diagonal_solve(rhs, &self.spectral_diagonal(), &[0])
    }

    /// `λ F_pe* U* Y` for the zero-filled plane `Y`.
    pub fn data_rhs(&self, y: &ComplexTensor) -> Result<ComplexTensor> {
        let d = y.dims3()?;
        ensure!(
            d == self.dims,
            ShapeMismatch,
            "data {:?} vs operator {:?}",
            d,
            self.dims
        );
        let j = self.dims.2;
        let mut k = y.clone();
        for (chunk, &b) in k.data_mut().chunks_exact_mut(j).zip(&self.mask) {
            if !b {
                chunk.fill(zero());
            }
        }
        fft_axis(&mut k, 0, true);
        k.scale(Complex64::new(self.lambda, 0.0));
        Ok(k)
    }
}
