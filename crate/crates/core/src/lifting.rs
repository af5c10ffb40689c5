//! Separable lifted operators on `A×B×J` tensors.
//!
//! A [`LineLift`] takes every line along one axis, transforms it (centered
//! FFT or identity), multiplies by the filter weights and stacks the Hankel
//! matrices of all coils side by side. With virtual coils enabled the
//! conjugate reflection of each coil's weighted spectrum is appended as
//! another block, doubling the column count. Reflecting after weighting
//! keeps the virtual block an exact (shifted) copy of the weighted signal
//! model for even line lengths as well as odd ones.
//!
//! The virtual-coil blocks are conjugate-linear in the input, so adjoints are
//! taken with respect to the real inner product `Re⟨a, b⟩`. For
//! complex-linear configurations this coincides with the complex adjoint.

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::fft::CenteredFft;
use crate::hankel::{
    antidiagonal_counts, centered_weights, virtual_coil_dagger, CMatrix, HankelConfig, Pencil,
};
use crate::par;
use crate::tensor::ComplexTensor;

#[derive(Clone, Debug)]
pub struct LineLift {
    dims: (usize, usize, usize),
    axis: usize,
    pencil: usize,
    fft: Option<CenteredFft>,
    weights: Option<Vec<Complex64>>,
    virtual_coil: bool,
}

impl LineLift {
    /// Lifts lines running along `axis` (0 or 1) of an `A×B×J` tensor.
    /// `filter` of `None` means no weighting.
    pub fn new(
        dims: (usize, usize, usize),
        axis: usize,
        fourier: bool,
        filter: Option<&[Complex64]>,
        pencil: Pencil,
        virtual_coil: bool,
    ) -> Result<Self> {
        ensure!(
            axis < 2,
            InvalidArgument,
            "line axis must be 0 or 1, got {axis}"
        );
        let len = if axis == 0 { dims.0 } else { dims.1 };
        let pencil = pencil.resolve(len)?;
        let weights = match filter {
            Some(taps) if !(taps.len() == 1 && taps[0] == Complex64::new(1.0, 0.0)) => {
                Some(centered_weights(taps, len)?)
            }
            _ => None,
        };
        Ok(Self {
            dims,
            axis,
            pencil,
            fft: fourier.then(|| CenteredFft::new(len)),
            weights,
            virtual_coil,
        })
    }

    /// The weighted, Fourier-domain row operator of an `M×N×J` image
    /// (lines along axis 1, one per row index `m`).
    pub fn rows(dims: (usize, usize, usize), cfg: &HankelConfig) -> Result<Self> {
        cfg.validate()?;
        Self::new(
            dims,
            1,
            true,
            Some(&cfg.filter_taps),
            cfg.pencil,
            cfg.virtual_coil,
        )
    }

    /// Column counterpart of [`rows`](Self::rows) (lines along axis 0).
    pub fn cols(dims: (usize, usize, usize), cfg: &HankelConfig) -> Result<Self> {
        cfg.validate()?;
        Self::new(
            dims,
            0,
            true,
            Some(&cfg.filter_taps),
            cfg.pencil,
            cfg.virtual_coil,
        )
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn line_len(&self) -> usize {
        if self.axis == 0 {
            self.dims.0
        } else {
            self.dims.1
        }
    }

    pub fn line_count(&self) -> usize {
        if self.axis == 0 {
            self.dims.1
        } else {
            self.dims.0
        }
    }

    pub fn pencil(&self) -> usize {
        self.pencil
    }

    pub fn virtual_coil(&self) -> bool {
        self.virtual_coil
    }

    fn blocks(&self) -> usize {
        self.dims.2 * if self.virtual_coil { 2 } else { 1 }
    }

    pub fn matrix_shape(&self) -> (usize, usize) {
        let k = self.line_len() - self.pencil + 1;
        (self.pencil, self.blocks() * k)
    }

    fn offset(&self, line: usize, t: usize, coil: usize) -> usize {
        let (_, b, j) = self.dims;
        let (r, c) = if self.axis == 0 { (t, line) } else { (line, t) };
        (r * b + c) * j + coil
    }

    fn check(&self, x: &ComplexTensor) -> Result<()> {
        let d = x.dims3()?;
        ensure!(
            d == self.dims,
            ShapeMismatch,
            "operator built for {:?}, tensor is {:?}",
            self.dims,
            d
        );
        Ok(())
    }

    fn check_line(&self, line: usize) -> Result<()> {
        ensure!(
            line < self.line_count(),
            InvalidArgument,
            "line index {line} out of range 0..{}",
            self.line_count()
        );
        Ok(())
    }

    fn transformed_line(&self, x: &ComplexTensor, line: usize, coil: usize) -> Vec<Complex64> {
        let data = x.data();
        let mut v: Vec<Complex64> = (0..self.line_len())
            .map(|t| data[self.offset(line, t, coil)])
            .collect();
        if let Some(fft) = &self.fft {
            fft.forward(&mut v);
        }
        v
    }

    fn weight(&self, v: &mut [Complex64]) {
        if let Some(w) = &self.weights {
            v.iter_mut().zip(w).for_each(|(z, w)| *z *= w);
        }
    }

    fn weight_conj(&self, v: &mut [Complex64]) {
        if let Some(w) = &self.weights {
            v.iter_mut().zip(w).for_each(|(z, w)| *z *= w.conj());
        }
    }

    /// The lifted matrix of line `line`.
    pub fn lift(&self, x: &ComplexTensor, line: usize) -> Result<CMatrix> {
        self.check(x)?;
        self.check_line(line)?;
        Ok(self.lift_unchecked(x, line))
    }

    pub(crate) fn lift_unchecked(&self, x: &ComplexTensor, line: usize) -> CMatrix {
        let coils = self.dims.2;
        let p = self.pencil;
        let k = self.line_len() - p + 1;
        let mut spectra = Vec::with_capacity(self.blocks());
        let mut reflected = Vec::new();
        for coil in 0..coils {
            let mut s = self.transformed_line(x, line, coil);
            self.weight(&mut s);
            if self.virtual_coil {
                reflected.push(virtual_coil_dagger(&s));
            }
            spectra.push(s);
        }
        spectra.extend(reflected);
        let (rows, cols) = self.matrix_shape();
        CMatrix::from_fn(rows, cols, |i, c| spectra[c / k][i + c % k])
    }

    /// Lifts every line; element `i` belongs to line `i`.
    pub fn lift_all(&self, x: &ComplexTensor) -> Result<Vec<CMatrix>> {
        self.check(x)?;
        Ok(par::map_range(self.line_count(), |i| {
            self.lift_unchecked(x, i)
        }))
    }

    /// Per-coil line values produced by the adjoint of one lifted matrix.
    fn adjoint_line(&self, m: &CMatrix) -> Vec<Vec<Complex64>> {
        let coils = self.dims.2;
        let n = self.line_len();
        let p = self.pencil;
        let k = n - p + 1;
        let antidiag = |block: usize| {
            let mut t = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..k {
                let col = m.column(block * k + j);
                for i in 0..p {
                    t[i + j] += col[i];
                }
            }
            t
        };
        (0..coils)
            .map(|coil| {
                let mut acc = antidiag(coil);
                if self.virtual_coil {
                    let r = virtual_coil_dagger(&antidiag(coils + coil));
                    acc.iter_mut().zip(r).for_each(|(a, b)| *a += b);
                }
                self.weight_conj(&mut acc);
                if let Some(fft) = &self.fft {
                    fft.inverse(&mut acc);
                }
                acc
            })
            .collect()
    }

    fn check_matrix(&self, m: &CMatrix) -> Result<()> {
        ensure!(
            m.shape() == self.matrix_shape(),
            ShapeMismatch,
            "lifted matrix is {:?}, expected {:?}",
            m.shape(),
            self.matrix_shape()
        );
        Ok(())
    }

    /// Adjoint of [`lift`](Self::lift) for one line: a tensor that is zero
    /// outside line `line`.
    pub fn adjoint(&self, m: &CMatrix, line: usize) -> Result<ComplexTensor> {
        self.check_line(line)?;
        self.check_matrix(m)?;
        let (a, b, j) = self.dims;
        let mut out = ComplexTensor::zeros(&[a, b, j])?;
        self.scatter(&mut out, line, self.adjoint_line(m));
        Ok(out)
    }

    fn scatter(&self, out: &mut ComplexTensor, line: usize, values: Vec<Vec<Complex64>>) {
        for (coil, v) in values.into_iter().enumerate() {
            for (t, z) in v.into_iter().enumerate() {
                let o = self.offset(line, t, coil);
                out.data_mut()[o] = z;
            }
        }
    }

    /// `Σ_i lift_i*(m_i)` over all lines.
    pub fn adjoint_all(&self, ms: &[CMatrix]) -> Result<ComplexTensor> {
        ensure!(
            ms.len() == self.line_count(),
            ShapeMismatch,
            "expected {} lifted matrices, got {}",
            self.line_count(),
            ms.len()
        );
        for m in ms {
            self.check_matrix(m)?;
        }
        let lines = par::map_range(ms.len(), |i| self.adjoint_line(&ms[i]));
        let (a, b, j) = self.dims;
        let mut out = ComplexTensor::zeros(&[a, b, j])?;
        for (i, values) in lines.into_iter().enumerate() {
            self.scatter(&mut out, i, values);
        }
        Ok(out)
    }

    /// Diagonal of `Σ_i lift_i* lift_i` in the transformed line domain:
    /// `|w|²·c`, with `c` replaced by `c + reversed(c)` when virtual coils
    /// are on.
    pub fn spectral_gram(&self) -> Vec<f64> {
        let n = self.line_len();
        let counts = antidiagonal_counts(n, self.pencil);
        let c: Vec<f64> = if self.virtual_coil {
            (0..n).map(|t| counts[t] + counts[n - 1 - t]).collect()
        } else {
            counts
        };
        match &self.weights {
            Some(w) => w.iter().zip(&c).map(|(w, c)| w.norm_sqr() * c).collect(),
            None => c,
        }
    }

    /// Axis of the lines and whether they are Fourier transformed.
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn is_fourier(&self) -> bool {
        self.fft.is_some()
    }

    /// `Σ_i lift_i* lift_i x` without forming lifted matrices.
    pub fn gram_apply(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        self.check(x)?;
        let d = self.spectral_gram();
        let coils = self.dims.2;
        let lines = par::map_range(self.line_count(), |line| {
            (0..coils)
                .map(|coil| {
                    let mut v = self.transformed_line(x, line, coil);
                    v.iter_mut().zip(&d).for_each(|(z, d)| *z *= d);
                    if let Some(fft) = &self.fft {
                        fft.inverse(&mut v);
                    }
                    v
                })
                .collect::<Vec<_>>()
        });
        let mut out = x.zeros_like();
        for (i, values) in lines.into_iter().enumerate() {
            self.scatter(&mut out, i, values);
        }
        Ok(out)
    }
}

/// Lifted matrix of row `m` of an `M×N×J` image.
pub fn lift_rows(x: &ComplexTensor, m: usize, cfg: &HankelConfig) -> Result<CMatrix> {
    LineLift::rows(x.dims3()?, cfg)?.lift(x, m)
}

/// Lifted matrix of column `n` of an `M×N×J` image.
pub fn lift_cols(x: &ComplexTensor, n: usize, cfg: &HankelConfig) -> Result<CMatrix> {
    LineLift::cols(x.dims3()?, cfg)?.lift(x, n)
}

pub fn adjoint_lift_rows(
    mat: &CMatrix,
    m: usize,
    dims: (usize, usize, usize),
    cfg: &HankelConfig,
) -> Result<ComplexTensor> {
    LineLift::rows(dims, cfg)?.adjoint(mat, m)
}

pub fn adjoint_lift_cols(
    mat: &CMatrix,
    n: usize,
    dims: (usize, usize, usize),
    cfg: &HankelConfig,
) -> Result<ComplexTensor> {
    LineLift::cols(dims, cfg)?.adjoint(mat, n)
}
