//! Self-consistency kernels: calibration from fully sampled autocalibration
//! data and application as an image-domain operator.
//!
//! A kernel predicts target coil `i` at k-space location `r` as
//! `Σ_{o,j} w[o, j, i] · K_j(r + o − h)` over a `k×k` window centred on `r`
//! (`h = k/2`). The tap at the window centre of the target coil itself is
//! always zero.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::fft::fft_axis;
use crate::tensor::ComplexTensor;

#[derive(Clone, Debug, PartialEq)]
pub struct SpiritKernels {
    kernel_size: usize,
    coils: usize,
    /// `k×k×J×J`, indexed `[o0, o1, source, target]`.
    weights: Vec<Complex64>,
}

impl SpiritKernels {
    pub fn new(kernel_size: usize, coils: usize, weights: Vec<Complex64>) -> Result<Self> {
        ensure!(
            kernel_size % 2 == 1,
            InvalidArgument,
            "kernel size must be odd, got {kernel_size}"
        );
        ensure!(coils >= 1, InvalidArgument, "need at least one coil");
        ensure!(
            weights.len() == kernel_size * kernel_size * coils * coils,
            ShapeMismatch,
            "kernel tensor needs {} entries, got {}",
            kernel_size * kernel_size * coils * coils,
            weights.len()
        );
        let g = Self {
            kernel_size,
            coils,
            weights,
        };
        let h = kernel_size / 2;
        for j in 0..coils {
            ensure!(
                g.get(h, h, j, j) == Complex64::new(0.0, 0.0),
                InvalidArgument,
                "self-coil centre tap of coil {j} must be zero"
            );
        }
        Ok(g)
    }

    pub fn zeros(kernel_size: usize, coils: usize) -> Result<Self> {
        Self::new(
            kernel_size,
            coils,
            vec![Complex64::new(0.0, 0.0); kernel_size * kernel_size * coils * coils],
        )
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel_size
    }

    pub fn coils(&self) -> usize {
        self.coils
    }

    fn index(&self, o0: usize, o1: usize, src: usize, tgt: usize) -> usize {
        ((o0 * self.kernel_size + o1) * self.coils + src) * self.coils + tgt
    }

    pub fn get(&self, o0: usize, o1: usize, src: usize, tgt: usize) -> Complex64 {
        self.weights[self.index(o0, o1, src, tgt)]
    }

    /// As a `k×k×J×J` tensor.
    pub fn to_tensor(&self) -> ComplexTensor {
        let k = self.kernel_size;
        let j = self.coils;
        ComplexTensor::new(vec![k, k, j, j], self.weights.clone()).expect("consistent dims")
    }

    pub fn from_tensor(t: &ComplexTensor) -> Result<Self> {
        match t.dims() {
            &[k, k2, j, j2] if k == k2 && j == j2 => Self::new(k, j, t.data().to_vec()),
            d => Err(Error::ShapeMismatch(format!(
                "kernel tensor must be k×k×J×J, got {d:?}"
            ))),
        }
    }
}

pub const DEFAULT_TIKHONOV: f64 = 1e-4;
pub const DEFAULT_KERNEL_SIZE: usize = 5;

/// Least-squares kernel fit on the interior of an `a×b×J` calibration
/// block, damped by `δ = tikhonov · σ_max(A)` (`A` the full calibration
/// matrix), i.e. `min ‖A w − b‖² + δ²‖w‖²`.
pub fn spirit_calibrate(
    acs: &ComplexTensor,
    kernel_size: usize,
    tikhonov: f64,
) -> Result<SpiritKernels> {
    let (a, b, coils) = acs.dims3()?;
    ensure!(
        kernel_size % 2 == 1,
        InvalidArgument,
        "kernel size must be odd, got {kernel_size}"
    );
    ensure!(tikhonov >= 0.0, InvalidArgument, "tikhonov must be >= 0");
    ensure!(
        a > kernel_size && b > kernel_size,
        InvalidArgument,
        "calibration region {a}x{b} too small for a {kernel_size}x{kernel_size} kernel"
    );
    if acs.data().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return Err(Error::DegenerateCalibration(
            "calibration data is identically zero".into(),
        ));
    }
    let h = kernel_size / 2;
    let taps = kernel_size * kernel_size * coils;
    let rows = (a - 2 * h) * (b - 2 * h);
    let calib = DMatrix::<Complex64>::from_fn(rows, taps, |r, col| {
        let r0 = r / (b - 2 * h) + h;
        let r1 = r % (b - 2 * h) + h;
        let src = col % coils;
        let o1 = (col / coils) % kernel_size;
        let o0 = col / (coils * kernel_size);
        acs.get(&[r0 + o0 - h, r1 + o1 - h, src])
    });
    let sigma_max = calib.singular_values().max();
    ensure!(
        sigma_max > 0.0,
        DegenerateCalibration,
        "calibration matrix has no energy"
    );
    let ridge = tikhonov * sigma_max;

    let mut weights = vec![Complex64::new(0.0, 0.0); taps * coils];
    for tgt in 0..coils {
        let centre = (h * kernel_size + h) * coils + tgt;
        let cols: Vec<usize> = (0..taps).filter(|&c| c != centre).collect();
        let n = cols.len();
        let mut sys = DMatrix::<Complex64>::zeros(rows + n, n);
        for (ci, &c) in cols.iter().enumerate() {
            sys.view_mut((0, ci), (rows, 1)).copy_from(&calib.column(c));
            sys[(rows + ci, ci)] = Complex64::new(ridge, 0.0);
        }
        let mut rhs = DMatrix::<Complex64>::zeros(rows + n, 1);
        rhs.view_mut((0, 0), (rows, 1))
            .copy_from(&calib.column(centre));
        let svd = sys.svd(true, true);
        let eps = svd.singular_values.max() * 1e-12;
        let x = svd
            .solve(&rhs, eps)
            .map_err(|e| Error::DegenerateCalibration(e.to_string()))?;
        for (ci, &c) in cols.iter().enumerate() {
            // column index c = (o0·k + o1)·J + src
            weights[c * coils + tgt] = x[(ci, 0)];
        }
    }
    SpiritKernels::new(kernel_size, coils, weights)
}

/// Relative self-consistency error `‖GK − K‖ / ‖K‖` over the interior of a
/// calibration block (locations whose whole window lies inside).
pub fn calibration_residual(g: &SpiritKernels, acs: &ComplexTensor) -> Result<f64> {
    let (a, b, coils) = acs.dims3()?;
    ensure!(
        coils == g.coils,
        ShapeMismatch,
        "kernels for {} coils, data has {coils}",
        g.coils
    );
    let k = g.kernel_size;
    let h = k / 2;
    ensure!(
        a > 2 * h && b > 2 * h,
        InvalidArgument,
        "block smaller than the kernel"
    );
    let (mut err, mut total) = (0.0, 0.0);
    for r0 in h..a - h {
        for r1 in h..b - h {
            for tgt in 0..coils {
                let mut pred = Complex64::new(0.0, 0.0);
                for o0 in 0..k {
                    for o1 in 0..k {
                        for src in 0..coils {
                            pred +=
                                g.get(o0, o1, src, tgt) * acs.get(&[r0 + o0 - h, r1 + o1 - h, src]);
                        }
                    }
                }
                let v = acs.get(&[r0, r1, tgt]);
                err += (pred - v).norm_sqr();
                total += v.norm_sqr();
            }
        }
    }
    Ok((err / total).sqrt())
}

/// The kernels as an image-domain operator on `M×N×J` images: per pixel,
/// a `J×J` mixing matrix.
#[derive(Clone, Debug)]
pub struct SpiritOperator {
    dims: (usize, usize, usize),
    /// `[pixel][target][source]`
    mix: Vec<Complex64>,
}

impl SpiritOperator {
    pub fn new(g: &SpiritKernels, rows: usize, cols: usize) -> Result<Self> {
        let coils = g.coils;
        let k = g.kernel_size;
        let h = k as isize / 2;
        ensure!(
            k <= rows && k <= cols,
            InvalidArgument,
            "kernel size {k} exceeds image {rows}x{cols}"
        );
        // Zero-padded kernels, reflected about the k-space centre, one
        // channel per (target, source) pair.
        let pairs = coils * coils;
        let mut pad = ComplexTensor::zeros(&[rows, cols, pairs])?;
        let (c0, c1) = ((rows / 2) as isize, (cols / 2) as isize);
        for o0 in 0..k {
            for o1 in 0..k {
                let p0 = (c0 - (o0 as isize - h)).rem_euclid(rows as isize) as usize;
                let p1 = (c1 - (o1 as isize - h)).rem_euclid(cols as isize) as usize;
                for tgt in 0..coils {
                    for src in 0..coils {
                        let idx = pad.offset(&[p0, p1, tgt * coils + src]);
                        pad.data_mut()[idx] += g.get(o0, o1, src, tgt);
                    }
                }
            }
        }
        fft_axis(&mut pad, 0, true);
        fft_axis(&mut pad, 1, true);
        let scale = ((rows * cols) as f64).sqrt();
        pad.scale(Complex64::new(scale, 0.0));
        Ok(Self {
            dims: (rows, cols, coils),
            mix: pad.into_data(),
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    fn check(&self, x: &ComplexTensor) -> Result<()> {
        let d = x.dims3()?;
        ensure!(
            d == self.dims,
            ShapeMismatch,
            "SPIRiT operator for {:?}, image is {:?}",
            self.dims,
            d
        );
        Ok(())
    }

    fn mix(&self, x: &ComplexTensor, adjoint: bool) -> ComplexTensor {
        let j = self.dims.2;
        let mut out = x.zeros_like();
        for ((src, dst), m) in x
            .data()
            .chunks_exact(j)
            .zip(out.data_mut().chunks_exact_mut(j))
            .zip(self.mix.chunks_exact(j * j))
        {
            for t in 0..j {
                dst[t] = if adjoint {
                    (0..j).map(|s| m[s * j + t].conj() * src[s]).sum()
                } else {
                    (0..j).map(|s| m[t * j + s] * src[s]).sum()
                };
            }
        }
        out
    }

    pub fn apply(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        self.check(x)?;
        Ok(self.mix(x, false))
    }

    pub fn apply_adjoint(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        self.check(x)?;
        Ok(self.mix(x, true))
    }

    /// `(G − I)* (G − I) x`
    pub fn residual_gram(&self, x: &ComplexTensor) -> Result<ComplexTensor> {
        self.check(x)?;
        let mut r = self.mix(x, false);
        r.axpy(Complex64::new(-1.0, 0.0), x);
        let mut out = self.mix(&r, true);
        out.axpy(Complex64::new(-1.0, 0.0), &r);
        Ok(out)
    }
}

/// Applies the kernels to an `M×N×J` image (circular k-space correlation
/// realised as per-pixel coil mixing).
pub fn spirit_apply(g: &SpiritKernels, x: &ComplexTensor) -> Result<ComplexTensor> {
    let (m, n, j) = x.dims3()?;
    ensure!(
        j == g.coils,
        ShapeMismatch,
        "kernels calibrated for {} coils, image has {j}",
        g.coils
    );
    SpiritOperator::new(g, m, n)?.apply(x)
}
