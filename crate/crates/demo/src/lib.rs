//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Three operations: sampling-mask generation, a small parallel-imaging
//! reconstruction, and a mono-exponential T2 fit. Images cross the boundary
//! as row-major `Float64Array`s of magnitudes.

use wasm_bindgen::prelude::*;

use shlr::coil::ssos;
use shlr::fft::ifft2d_centered;
use shlr::metrics::{mssim, rlne};
use shlr::parammap::fit_t2;
use shlr::sampling::{mask_gauss_cartesian, mask_random2d, mask_uniform};
use shlr::solvers::{calibrate_from_kspace, shlr_pi_reconstruct};
use shlr::synth::{gen_pi_phantom, PhantomSpec};
use shlr::{AdmmConfig, HankelConfig, PiMethod, SamplingMask};

fn js(e: shlr::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct MaskView {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
}

#[wasm_bindgen]
impl MaskView {
    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[wasm_bindgen(getter)]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// One byte per location, 1 where sampled.
    #[wasm_bindgen(getter)]
    pub fn bits(&self) -> Vec<u8> {
        self.bits.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn sampled(&self) -> usize {
        self.bits.iter().filter(|b| **b != 0).count()
    }
}

impl From<&SamplingMask> for MaskView {
    fn from(m: &SamplingMask) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            bits: m.bits().iter().map(|&b| b as u8).collect(),
        }
    }
}

fn build_mask(
    kind: &str,
    n: usize,
    rate: f64,
    r: usize,
    acs: usize,
    seed: u64,
) -> Result<SamplingMask, JsError> {
    match kind {
        "uniform" => mask_uniform(n, r, acs).map_err(js),
        "gauss" => mask_gauss_cartesian(n, rate, acs, seed).map_err(js),
        "random2d" => mask_random2d(n, n, rate, acs, seed).map_err(js),
        other => Err(JsError::new(&format!("unknown mask kind {other:?}"))),
    }
}

/// `kind` is `uniform` (uses `r`), `gauss` or `random2d` (use `rate`).
/// Cartesian masks come back as a single row.
#[wasm_bindgen]
pub fn make_mask(
    kind: &str,
    n: usize,
    rate: f64,
    r: usize,
    acs: usize,
    seed: u64,
) -> Result<MaskView, JsError> {
    Ok(MaskView::from(&build_mask(kind, n, rate, r, acs, seed)?))
}

#[wasm_bindgen]
pub struct PiResult {
    size: usize,
    truth: Vec<f64>,
    zero_filled: Vec<f64>,
    recon: Vec<f64>,
    rlne_zero_filled: f64,
    rlne: f64,
    mssim: f64,
    iterations: usize,
}

#[wasm_bindgen]
impl PiResult {
    #[wasm_bindgen(getter)]
    pub fn size(&self) -> usize {
        self.size
    }
    #[wasm_bindgen(getter)]
    pub fn truth(&self) -> Vec<f64> {
        self.truth.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn zero_filled(&self) -> Vec<f64> {
        self.zero_filled.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn recon(&self) -> Vec<f64> {
        self.recon.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn rlne_zero_filled(&self) -> f64 {
        self.rlne_zero_filled
    }
    #[wasm_bindgen(getter)]
    pub fn rlne(&self) -> f64 {
        self.rlne
    }
    #[wasm_bindgen(getter)]
    pub fn mssim(&self) -> f64 {
        self.mssim
    }
    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }
}

/// Two-coil synthetic phantom of side `size`, undersampled with the given
/// mask kind and reconstructed by `method` (`shlr`, `shlr-s`, `shlr-v`,
/// `shlr-sv`).
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn reconstruct_pi(
    size: usize,
    kind: &str,
    rate: f64,
    r: usize,
    acs: usize,
    seed: u64,
    method: &str,
    max_outer: usize,
) -> Result<PiResult, JsError> {
    let method: PiMethod = method.parse().map_err(js)?;
    let (truth, k) = gen_pi_phantom(&PhantomSpec::standard(size, size, 2), seed).map_err(js)?;
    let mask = build_mask(kind, size, rate, r, acs, seed)?;
    let y = mask
        .broadcast_rows(size)
        .and_then(|m| m.apply(&k))
        .map_err(js)?;
    let kernels = if method.uses_spirit() {
        Some(calibrate_from_kspace(&y, &mask, 5, 1e-4).map_err(js)?)
    } else {
        None
    };
    let acfg = AdmmConfig {
        max_outer,
        lambda1: 1e3,
        ..method.configure(&AdmmConfig::parallel_imaging())
    };
    let out = shlr_pi_reconstruct(&y, &mask, kernels.as_ref(), &HankelConfig::default(), &acfg)
        .map_err(js)?;
    let t = ssos(&truth).map_err(js)?;
    let zf = ssos(&ifft2d_centered(&y).map_err(js)?).map_err(js)?;
    let rec = ssos(&out.x).map_err(js)?;
    Ok(PiResult {
        size,
        rlne_zero_filled: rlne(&t, &zf).map_err(js)?,
        rlne: rlne(&t, &rec).map_err(js)?,
        mssim: mssim(&t, &rec).map_err(js)?,
        iterations: out.iterations(),
        truth: t.data().to_vec(),
        zero_filled: zf.data().to_vec(),
        recon: rec.data().to_vec(),
    })
}

#[wasm_bindgen]
pub struct T2Result {
    pub t2: f64,
    pub amplitude: f64,
    pub valid: bool,
}

/// Least-squares fit of `A·exp(−TE/T2)`; echo times in ms.
#[wasm_bindgen]
pub fn fit_decay(echo_times: &[f64], signal: &[f64]) -> Result<T2Result, JsError> {
    let f = fit_t2(signal, echo_times).map_err(js)?;
    Ok(T2Result {
        t2: f.t2,
        amplitude: f.amplitude,
        valid: f.valid,
    })
}
