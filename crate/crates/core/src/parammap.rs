//! Parameter-imaging orchestration and T2 mapping.
//!
//! Datasets are `M×N×L×J`: readout × phase encoding × echo × coil.

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::fft::fft_axis;
use crate::hankel::HankelConfig;
use crate::par;
use crate::sampling::SamplingMask;
use crate::solvers::{shlr_param_reconstruct_slice, AdmmConfig, IterationRecord};
use crate::tensor::{ComplexTensor, RealImage};

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterDataset {
    data: ComplexTensor,
    echo_times: Vec<f64>,
}

impl ParameterDataset {
    pub fn new(data: ComplexTensor, echo_times: Vec<f64>) -> Result<Self> {
        ensure!(
            data.ndim() == 4,
            ShapeMismatch,
            "expected a rank-4 tensor, got {:?}",
            data.dims()
        );
        ensure!(
            data.dims()[2] == echo_times.len(),
            ShapeMismatch,
            "{} echoes in the data but {} echo times",
            data.dims()[2],
            echo_times.len()
        );
        ensure!(
            echo_times.first().is_some_and(|t| *t > 0.0)
                && echo_times.windows(2).all(|w| w[1] > w[0]),
            InvalidArgument,
            "echo times must be positive and strictly increasing"
        );
        Ok(Self { data, echo_times })
    }

    pub fn data(&self) -> &ComplexTensor {
        &self.data
    }

    pub fn echo_times(&self) -> &[f64] {
        &self.echo_times
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        let d = self.data.dims();
        (d[0], d[1], d[2], d[3])
    }

    pub fn into_data(self) -> ComplexTensor {
        self.data
    }

    /// Coil-combined magnitude per echo, `M×N×L` row-major.
    pub fn ssos(&self) -> Vec<f64> {
        let j = self.dims().3;
        self.data
            .data()
            .chunks_exact(j)
            .map(|px| px.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .collect()
    }

    /// Coil-combined magnitude of one echo.
    pub fn echo_ssos(&self, echo: usize) -> Result<RealImage> {
        let (m, n, l, _) = self.dims();
        ensure!(
            echo < l,
            InvalidArgument,
            "echo {echo} out of range (L = {l})"
        );
        let all = self.ssos();
        RealImage::new(m, n, (0..m * n).map(|p| all[p * l + echo]).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Schedule {
    #[default]
    Parallel,
    Serial,
}

#[derive(Clone, Debug)]
pub struct ParamReconstruction {
    pub images: ParameterDataset,
    /// Iteration log of each readout position.
    pub histories: Vec<Vec<IterationRecord>>,
}

/// Inverse transform along the readout, then one independent
/// reconstruction per readout position with the same `N×L` mask.
pub fn recon_param_dataset(
    y: &ParameterDataset,
    mask: &SamplingMask,
    hcfg: &HankelConfig,
    acfg: &AdmmConfig,
) -> Result<ParamReconstruction> {
    recon_param_dataset_with(y, mask, hcfg, acfg, Schedule::Parallel)
}

pub fn recon_param_dataset_with(
    y: &ParameterDataset,
    mask: &SamplingMask,
    hcfg: &HankelConfig,
    acfg: &AdmmConfig,
    schedule: Schedule,
) -> Result<ParamReconstruction> {
    let (m, n, l, j) = y.dims();
    ensure!(
        mask.dims() == (n, l),
        ShapeMismatch,
        "mask {}x{} does not match the {n}x{l} phase-encoding/echo plane",
        mask.rows(),
        mask.cols()
    );
    let mut hybrid = y.data().clone();
    fft_axis(&mut hybrid, 0, true);
    // One scale for the whole dataset, so every slice sees the same
    // regularisation weight.
    let scale = if acfg.normalize {
        zero_filled_peak(&hybrid, mask)?
    } else {
        1.0
    };
    hybrid.scale(Complex64::new(1.0 / scale, 0.0));
    let slice_cfg = AdmmConfig {
        normalize: false,
        ..acfg.clone()
    };
    let slab = n * l * j;
    let solve = |i: usize| {
        let plane = ComplexTensor::new(
            vec![n, l, j],
            hybrid.data()[i * slab..(i + 1) * slab].to_vec(),
        )?;
        let mut out = shlr_param_reconstruct_slice(&plane, mask, hcfg, &slice_cfg)?;
        out.x.scale(Complex64::new(scale, 0.0));
        Ok(out)
    };
    let outcomes: Vec<Result<_>> = match schedule {
        Schedule::Parallel => par::map_range(m, solve),
        Schedule::Serial => (0..m).map(solve).collect(),
    };
    let mut data = Vec::with_capacity(m * slab);
    let mut histories = Vec::with_capacity(m);
    for o in outcomes {
        let o = o?;
        data.extend_from_slice(o.x.data());
        histories.push(o.history);
    }
    Ok(ParamReconstruction {
        images: ParameterDataset::new(
            ComplexTensor::new(vec![m, n, l, j], data)?,
            y.echo_times.clone(),
        )?,
        histories,
    })
}

/// Peak magnitude of the zero-filled images of a readout-transformed
/// dataset (1 when the data are all zero).
fn zero_filled_peak(hybrid: &ComplexTensor, mask: &SamplingMask) -> Result<f64> {
    let d = hybrid.dims();
    let (n, l, j) = (d[1], d[2], d[3]);
    let mut zf = hybrid.clone();
    for (i, chunk) in zf.data_mut().chunks_exact_mut(j).enumerate() {
        if !mask.bits()[i % (n * l)] {
            chunk.fill(Complex64::new(0.0, 0.0));
        }
    }
    fft_axis(&mut zf, 1, true);
    let m = zf.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(if m > 0.0 { m } else { 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct T2FitOptions {
    /// Upper end of the accepted T2 range, ms.
    pub t2_max: f64,
    /// Fits whose largest sample is not above this are rejected.
    pub floor: f64,
    pub max_steps: usize,
    pub step_tol: f64,
}

impl Default for T2FitOptions {
    fn default() -> Self {
        Self {
            t2_max: 400.0,
            floor: 0.0,
            max_steps: 50,
            step_tol: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct T2Fit {
    pub amplitude: f64,
    /// Milliseconds.
    pub t2: f64,
    pub valid: bool,
}

impl T2Fit {
    fn invalid() -> Self {
        Self {
            amplitude: 0.0,
            t2: 0.0,
            valid: false,
        }
    }
}

/// Least-squares fit of `s(TE) = A·exp(−TE/T2)`.
pub fn fit_t2(signal: &[f64], echo_times: &[f64]) -> Result<T2Fit> {
    fit_t2_with(signal, echo_times, &T2FitOptions::default())
}

/// Log-linear initialisation (weighted by `s²`), then Gauss–Newton on
/// `(A, R2 = 1/T2)` with step halving whenever the cost would increase.
pub fn fit_t2_with(signal: &[f64], echo_times: &[f64], opts: &T2FitOptions) -> Result<T2Fit> {
    ensure!(
        signal.len() == echo_times.len(),
        ShapeMismatch,
        "{} samples but {} echo times",
        signal.len(),
        echo_times.len()
    );
    ensure!(
        signal.len() >= 3,
        InvalidArgument,
        "need at least 3 echoes, got {}",
        signal.len()
    );
    if signal.iter().chain(echo_times).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite sample or echo time".into(),
        ));
    }
    let s_max = signal.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if s_max <= opts.floor || s_max <= 0.0 {
        return Ok(T2Fit::invalid());
    }

    // Weighted log-linear regression over positive samples.
    let (mut sw, mut swt, mut swtt, mut swy, mut swty) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut used = 0;
    for (&s, &t) in signal.iter().zip(echo_times) {
        if s > 0.0 {
            let w = s * s;
            let y = s.ln();
            sw += w;
            swt += w * t;
            swtt += w * t * t;
            swy += w * y;
            swty += w * t * y;
            used += 1;
        }
    }
    if used < 2 {
        return Ok(T2Fit::invalid());
    }
    let det = sw * swtt - swt * swt;
    if det.abs() <= f64::EPSILON * sw * swtt {
        return Ok(T2Fit::invalid());
    }
    let slope = (sw * swty - swt * swy) / det;
    let mut r2 = (-slope).max(1e-6);
    let mut a = ((swy - slope * swt) / sw).exp();

    let cost = |a: f64, r2: f64| -> f64 {
        signal
            .iter()
            .zip(echo_times)
            .map(|(&s, &t)| (s - a * (-r2 * t).exp()).powi(2))
            .sum()
    };
    let mut c = cost(a, r2);
    for _ in 0..opts.max_steps {
        // J = [e, −A t e]; solve (JᵀJ) δ = Jᵀ r.
        let (mut j11, mut j12, mut j22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&s, &t) in signal.iter().zip(echo_times) {
            let e = (-r2 * t).exp();
            let r = s - a * e;
            let da = e;
            let dr = -a * t * e;
            j11 += da * da;
            j12 += da * dr;
            j22 += dr * dr;
            g1 += da * r;
            g2 += dr * r;
        }
        let det = j11 * j22 - j12 * j12;
        if !(det > 0.0) {
            break;
        }
        let mut da = (j22 * g1 - j12 * g2) / det;
        let mut dr = (j11 * g2 - j12 * g1) / det;
        let mut accepted = false;
        for _ in 0..30 {
            let (na, nr) = (a + da, r2 + dr);
            let nc = cost(na, nr);
            if nr > 0.0 && nc <= c {
                a = na;
                r2 = nr;
                c = nc;
                accepted = true;
                break;
            }
            da *= 0.5;
            dr *= 0.5;
        }
        if !accepted {
            break;
        }
        let rel = (da / a).abs().max((dr / r2).abs());
        if rel < opts.step_tol {
            break;
        }
    }
    let t2 = 1.0 / r2;
    let valid = a > 0.0 && t2.is_finite() && t2 > 0.0 && t2 <= opts.t2_max;
    Ok(T2Fit {
        amplitude: a,
        t2,
        valid,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct T2Map {
    pub rows: usize,
    pub cols: usize,
    /// Milliseconds; 0 where invalid.
    pub t2: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub valid: Vec<bool>,
}

impl T2Map {
    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    /// Real part T2 (ms), imaginary part 0, as `rows×cols×1`.
    pub fn to_tensor(&self) -> ComplexTensor {
        let data = self.t2.iter().map(|t| Complex64::new(*t, 0.0)).collect();
        ComplexTensor::new(vec![self.rows, self.cols, 1], data).expect("consistent dims")
    }

    /// Validity flags as a mask.
    pub fn valid_mask(&self) -> Result<SamplingMask> {
        let meta = crate::sampling::MaskMeta {
            generator: "t2-valid".into(),
            ..Default::default()
        };
        let bits = if self.valid.iter().any(|v| *v) {
            self.valid.clone()
        } else {
            return Err(Error::InvalidArgument("no valid T2 pixels".into()));
        };
        SamplingMask::new(self.rows, self.cols, bits, meta)
    }

    /// Relative ℓ2 error against `truth` over valid pixels.
    pub fn rlne_valid(&self, truth: &RealImage) -> Result<f64> {
        ensure!(
            truth.dims() == (self.rows, self.cols),
            ShapeMismatch,
            "truth {:?} vs map {}x{}",
            truth.dims(),
            self.rows,
            self.cols
        );
        let (mut num, mut den) = (0.0, 0.0);
        for (i, &v) in self.valid.iter().enumerate() {
            if v {
                let t = truth.data()[i];
                num += (self.t2[i] - t).powi(2);
                den += t * t;
            }
        }
        ensure!(
            den > 0.0,
            InvalidArgument,
            "truth is zero over the valid pixels"
        );
        Ok((num / den).sqrt())
    }
}

/// Per-pixel fits on the coil-combined echo magnitudes, restricted to pixels
/// whose first-echo magnitude is at least `roi_threshold · max`.
pub fn t2_map(images: &ParameterDataset, roi_threshold: f64) -> Result<T2Map> {
    t2_map_with(images, roi_threshold, &T2FitOptions::default())
}

pub fn t2_map_with(
    images: &ParameterDataset,
    roi_threshold: f64,
    opts: &T2FitOptions,
) -> Result<T2Map> {
    ensure!(
        roi_threshold >= 0.0,
        InvalidArgument,
        "roi_threshold must be >= 0"
    );
    let (m, n, l, _) = images.dims();
    let mag = images.ssos();
    let first_max = (0..m * n).map(|p| mag[p * l]).fold(0.0, f64::max);
    let cutoff = roi_threshold * first_max;
    let tes = images.echo_times();
    let fits = par::map_range(m * n, |p| {
        let s = &mag[p * l..(p + 1) * l];
        if s[0] < cutoff {
            return Ok(T2Fit::invalid());
        }
        fit_t2_with(s, tes, opts)
    });
    let mut map = T2Map {
        rows: m,
        cols: n,
        t2: vec![0.0; m * n],
        amplitude: vec![0.0; m * n],
        valid: vec![false; m * n],
    };
    for (p, f) in fits.into_iter().enumerate() {
        let f = f?;
        if f.valid {
            map.t2[p] = f.t2;
            map.amplitude[p] = f.amplitude;
            map.valid[p] = true;
        }
    }
    Ok(map)
}
