//! Image quality metrics on coil-combined magnitude images.

use crate::error::{ensure, Result};
use crate::tensor::RealImage;

pub const CSV_HEADER: &str = "dataset,method,mask,rlne,mssim,runtime_s,iters";

const WINDOW: usize = 11;
const SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricReport {
    pub rlne: f64,
    pub mssim: f64,
    pub runtime_seconds: f64,
    pub iterations: usize,
}

impl MetricReport {
    pub fn compute(
        reference: &RealImage,
        rec: &RealImage,
        runtime_seconds: f64,
        iterations: usize,
    ) -> Result<Self> {
        Ok(Self {
            rlne: rlne(reference, rec)?,
            mssim: mssim(reference, rec)?,
            runtime_seconds,
            iterations,
        })
    }

    /// One CSV row matching [`CSV_HEADER`].
    pub fn csv_row(&self, dataset: &str, method: &str, mask: &str) -> String {
        format!(
            "{dataset},{method},{mask},{:.8e},{:.8},{:.4},{}",
            self.rlne, self.mssim, self.runtime_seconds, self.iterations
        )
    }
}

fn same_dims(a: &RealImage, b: &RealImage) -> Result<()> {
    ensure!(
        a.dims() == b.dims(),
        ShapeMismatch,
        "images {:?} and {:?} differ in size",
        a.dims(),
        b.dims()
    );
    Ok(())
}

/// `‖ref − rec‖₂ / ‖ref‖₂`.
pub fn rlne(reference: &RealImage, rec: &RealImage) -> Result<f64> {
    same_dims(reference, rec)?;
    let den = reference.data().iter().map(|v| v * v).sum::<f64>();
    ensure!(
        den > 0.0,
        InvalidArgument,
        "reference image is identically zero"
    );
    let num = reference
        .data()
        .iter()
        .zip(rec.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>();
    Ok((num / den).sqrt())
}

/// Normalised 1D Gaussian of length 11, σ = 1.5.
pub fn gaussian_window() -> [f64; WINDOW] {
    let c = (WINDOW / 2) as f64;
    let mut w = [0.0; WINDOW];
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SIGMA * SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Separable 'valid' filtering: output is `(rows−10) × (cols−10)`.
fn filter_valid(data: &[f64], rows: usize, cols: usize, w: &[f64; WINDOW]) -> Vec<f64> {
    let oc = cols - WINDOW + 1;
    let or = rows - WINDOW + 1;
    let mut tmp = vec![0.0; rows * oc];
    for r in 0..rows {
        let row = &data[r * cols..(r + 1) * cols];
        for c in 0..oc {
            tmp[r * oc + c] = w.iter().zip(&row[c..c + WINDOW]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; or * oc];
    for r in 0..or {
        for c in 0..oc {
            out[r * oc + c] = (0..WINDOW).map(|k| w[k] * tmp[(r + k) * oc + c]).sum();
        }
    }
    out
}

/// Mean SSIM over all 11×11 Gaussian windows (σ = 1.5) lying fully inside
/// the image, with `L = max(ref)`. Images smaller than the window are
/// treated as a single window covering the whole image with uniform weights.
pub fn mssim(reference: &RealImage, rec: &RealImage) -> Result<f64> {
    same_dims(reference, rec)?;
    let (rows, cols) = reference.dims();
    let l = reference.max();
    let c1 = (K1 * l).powi(2);
    let c2 = (K2 * l).powi(2);
    let x = reference.data();
    let y = rec.data();
    let ssim = |mx: f64, my: f64, sxx: f64, syy: f64, sxy: f64| {
        ((2.0 * mx * my + c1) * (2.0 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2))
    };

    if rows < WINDOW || cols < WINDOW {
        let n = x.len() as f64;
        let mx = x.iter().sum::<f64>() / n;
        let my = y.iter().sum::<f64>() / n;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for (a, b) in x.iter().zip(y) {
            sxx += (a - mx) * (a - mx);
            syy += (b - my) * (b - my);
            sxy += (a - mx) * (b - my);
        }
        return Ok(ssim(mx, my, sxx / n, syy / n, sxy / n));
    }

    let w = gaussian_window();
    let prod = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
        x.iter().zip(y).map(|(&a, &b)| f(a, b)).collect()
    };
    let mu_x = filter_valid(x, rows, cols, &w);
    let mu_y = filter_valid(y, rows, cols, &w);
    let e_xx = filter_valid(&prod(&|a, _| a * a), rows, cols, &w);
    let e_yy = filter_valid(&prod(&|_, b| b * b), rows, cols, &w);
    let e_xy = filter_valid(&prod(&|a, b| a * b), rows, cols, &w);
    let total: f64 = (0..mu_x.len())
        .map(|i| {
            let (mx, my) = (mu_x[i], mu_y[i]);
            ssim(
                mx,
                my,
                e_xx[i] - mx * mx,
                e_yy[i] - my * my,
                e_xy[i] - mx * my,
            )
        })
        .sum();
    Ok(total / mu_x.len() as f64)
}
