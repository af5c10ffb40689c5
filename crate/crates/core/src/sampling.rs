//! Undersampling masks.
//!
//! Masks are 2D, `rows × cols`. Cartesian line masks are generated as a
//! single row (`1 × N`, one flag per phase-encoding line) and expanded along
//! the readout with [`SamplingMask::broadcast_rows`]. Parameter-imaging masks
//! live on the `N × L` phase-encoding/echo plane.
//!
//! The ACS block of `acs` lines around the centre `c = ⌊N/2⌋` occupies
//! `c − ⌊acs/2⌋ … c − ⌊acs/2⌋ + acs − 1`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::cplx::{read_cplx, write_cplx, Precision};
use crate::error::{ensure, Error, Result};
use crate::rng::SplitMix64;
use crate::tensor::ComplexTensor;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MaskMeta {
    pub generator: String,
    pub seed: Option<u64>,
    /// Requested sampling rate or reduction-derived rate.
    pub rate: f64,
    pub acs: usize,
    /// Partial-Fourier fraction, if applied (positive-frequency end removed).
    pub pf: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplingMask {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
    pub meta: MaskMeta,
}

/// `⌈rate·n⌉`, ignoring floating-point excess below 1e-9.
pub fn exact_count(rate: f64, n: usize) -> usize {
    ((rate * n as f64 - 1e-9).ceil().max(0.0) as usize).min(n)
}

fn acs_range(n: usize, acs: usize) -> std::ops::Range<usize> {
    let start = n / 2 - acs / 2;
    start..start + acs
}

impl SamplingMask {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>, meta: MaskMeta) -> Result<Self> {
        ensure!(
            rows >= 1 && cols >= 1,
            InvalidArgument,
            "mask dims must be >= 1"
        );
        ensure!(
            bits.len() == rows * cols,
            ShapeMismatch,
            "{rows}x{cols} mask needs {} flags, got {}",
            rows * cols,
            bits.len()
        );
        ensure!(
            bits.iter().any(|&b| b),
            InvalidArgument,
            "mask samples nothing"
        );
        Ok(Self {
            rows,
            cols,
            bits,
            meta,
        })
    }

    pub fn full(rows: usize, cols: usize) -> Result<Self> {
        Self::new(
            rows,
            cols,
            vec![true; rows * cols],
            MaskMeta {
                generator: "full".into(),
                rate: 1.0,
                ..MaskMeta::default()
            },
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    pub fn sampled(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampled() as f64 / self.bits.len() as f64
    }

    /// Indices of sampled columns in row `r`.
    pub fn sampled_cols(&self, r: usize) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.get(r, c)).collect()
    }

    /// Repeats a single-row line mask `rows` times.
    pub fn broadcast_rows(&self, rows: usize) -> Result<Self> {
        ensure!(
            self.rows == 1,
            InvalidArgument,
            "only 1-row line masks can be broadcast, mask is {}x{}",
            self.rows,
            self.cols
        );
        ensure!(rows >= 1, InvalidArgument, "rows must be >= 1");
        let bits = (0..rows).flat_map(|_| self.bits.iter().copied()).collect();
        Self::new(rows, self.cols, bits, self.meta.clone())
    }

    pub fn to_tensor(&self) -> ComplexTensor {
        let vals: Vec<f64> = self
            .bits
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .collect();
        ComplexTensor::from_real(vec![self.rows, self.cols], &vals).expect("valid dims")
    }

    pub fn from_tensor(t: &ComplexTensor, meta: MaskMeta) -> Result<Self> {
        let (rows, cols) = match t.dims() {
            &[r, c] => (r, c),
            &[c] => (1, c),
            d => {
                return Err(Error::ShapeMismatch(format!(
                    "mask tensor must be 1D or 2D, got {d:?}"
                )))
            }
        };
        let bits = t.data().iter().map(|z| z.norm() > 0.5).collect();
        Self::new(rows, cols, bits, meta)
    }

    /// Sidecar header path for a mask file: `<path>.meta`.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".meta");
        PathBuf::from(s)
    }

    pub fn header(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "generator={}", self.meta.generator);
        match self.meta.seed {
            Some(seed) => {
                let _ = writeln!(s, "seed={seed}");
            }
            None => s.push_str("seed=none\n"),
        }
        let _ = writeln!(s, "rate={}", self.meta.rate);
        let _ = writeln!(s, "acs={}", self.meta.acs);
        match self.meta.pf {
            Some(pf) => {
                let _ = writeln!(s, "pf={pf}");
            }
            None => s.push_str("pf=none\n"),
        }
        let _ = writeln!(s, "rows={}", self.rows);
        let _ = writeln!(s, "cols={}", self.cols);
        let _ = writeln!(s, "sampled={}", self.sampled());
        s
    }

    /// Writes the 0/1 `.cplx` file plus its `key=value` sidecar.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        write_cplx(&self.to_tensor(), path, Precision::F32)?;
        let side = Self::sidecar_path(path);
        fs::write(&side, self.header()).map_err(|e| Error::io(side, e))
    }

    /// Reads a mask; the sidecar is optional.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let t = read_cplx(path)?;
        let side = Self::sidecar_path(path);
        let meta = match fs::read_to_string(&side) {
            Ok(text) => parse_meta(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => MaskMeta::default(),
            Err(e) => return Err(Error::io(side, e)),
        };
        Self::from_tensor(&t, meta)
    }

    /// Multiplies `data` (any rank ≥ 2 whose first two dims match the mask)
    /// by the mask, broadcasting over trailing dims.
    pub fn apply(&self, data: &ComplexTensor) -> Result<ComplexTensor> {
        let d = data.dims();
        ensure!(
            d.len() >= 2 && d[0] == self.rows && d[1] == self.cols,
            ShapeMismatch,
            "mask {}x{} does not match data {:?}",
            self.rows,
            self.cols,
            d
        );
        let inner: usize = d[2..].iter().product();
        let mut out = data.clone();
        for (chunk, &b) in out.data_mut().chunks_exact_mut(inner).zip(&self.bits) {
            if !b {
                chunk.fill(Complex64::new(0.0, 0.0));
            }
        }
        Ok(out)
    }
}

fn parse_meta(text: &str) -> MaskMeta {
    let mut meta = MaskMeta::default();
    for line in text.lines() {
        let Some((k, v)) = line.split_once('=') else {
            continue;
        };
        let v = v.trim();
        match k.trim() {
            "generator" => meta.generator = v.to_string(),
            "seed" => meta.seed = v.parse().ok(),
            "rate" => meta.rate = v.parse().unwrap_or(0.0),
            "acs" => meta.acs = v.parse().unwrap_or(0),
            "pf" => meta.pf = v.parse().ok(),
            _ => {}
        }
    }
    meta
}

/// Every `r`-th line from 0, plus a centred ACS block.
pub fn mask_uniform(n: usize, r: usize, acs: usize) -> Result<SamplingMask> {
    ensure!(n >= 1, InvalidArgument, "line count must be >= 1");
    ensure!(
        r >= 1,
        InvalidArgument,
        "reduction factor must be >= 1, got {r}"
    );
    ensure!(acs <= n, InvalidArgument, "ACS {acs} exceeds {n} lines");
    let mut bits: Vec<bool> = (0..n).map(|i| i % r == 0).collect();
    for i in acs_range(n, acs) {
        bits[i] = true;
    }
    SamplingMask::new(
        1,
        n,
        bits,
        MaskMeta {
            generator: "uniform".into(),
            seed: None,
            rate: 1.0 / r as f64,
            acs,
            pf: None,
        },
    )
}

/// Weighted sampling without replacement: each candidate gets the key
/// `ln(u)/w` from one uniform draw (in candidate order); the `k` largest
/// keys win, ties going to the lower index.
fn weighted_choice(candidates: &[(usize, f64)], k: usize, rng: &mut SplitMix64) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = candidates
        .iter()
        .map(|&(idx, w)| (rng.next_f64_open().ln() / w, idx))
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().take(k).map(|(_, i)| i).collect()
}

fn gaussian(d: f64, sigma: f64) -> f64 {
    (-0.5 * (d / sigma).powi(2)).exp()
}

/// Exactly `⌈rate·N⌉` lines: the ACS block, then lines drawn with density
/// ∝ a Gaussian centred on DC with `σ = N/6`.
pub fn mask_gauss_cartesian(n: usize, rate: f64, acs: usize, seed: u64) -> Result<SamplingMask> {
    ensure!(n >= 1, InvalidArgument, "line count must be >= 1");
    ensure!(
        rate > 0.0 && rate <= 1.0,
        InvalidArgument,
        "rate must be in (0, 1], got {rate}"
    );
    let total = exact_count(rate, n).max(1);
    ensure!(
        total >= acs,
        InvalidArgument,
        "rate {rate} gives {total} lines, fewer than {acs} ACS lines"
    );
    let mut bits = vec![false; n];
    for i in acs_range(n, acs) {
        bits[i] = true;
    }
    let sigma = n as f64 / 6.0;
    let centre = (n / 2) as f64;
    let candidates: Vec<(usize, f64)> = (0..n)
        .filter(|&i| !bits[i])
        .map(|i| (i, gaussian(i as f64 - centre, sigma)))
        .collect();
    let mut rng = SplitMix64::new(seed);
    for i in weighted_choice(&candidates, total - acs, &mut rng) {
        bits[i] = true;
    }
    SamplingMask::new(
        1,
        n,
        bits,
        MaskMeta {
            generator: "gauss-cartesian".into(),
            seed: Some(seed),
            rate,
            acs,
            pf: None,
        },
    )
}

/// Exactly `⌈rate·M·N⌉` points: a fully sampled `center×center` block plus
/// points drawn with a separable Gaussian density (`σ = dim/6`).
pub fn mask_random2d(
    m: usize,
    n: usize,
    rate: f64,
    center: usize,
    seed: u64,
) -> Result<SamplingMask> {
    ensure!(m >= 1 && n >= 1, InvalidArgument, "mask dims must be >= 1");
    ensure!(
        rate > 0.0 && rate <= 1.0,
        InvalidArgument,
        "rate must be in (0, 1], got {rate}"
    );
    let total = exact_count(rate, m * n).max(1);
    ensure!(
        center <= m && center <= n && center * center <= total,
        InvalidArgument,
        "{center}x{center} centre block exceeds the budget of {total} points"
    );
    let mut bits = vec![false; m * n];
    for r in acs_range(m, center) {
        for c in acs_range(n, center) {
            bits[r * n + c] = true;
        }
    }
    let (sm, sn) = (m as f64 / 6.0, n as f64 / 6.0);
    let (cm, cn) = ((m / 2) as f64, (n / 2) as f64);
    let candidates: Vec<(usize, f64)> = (0..m * n)
        .filter(|&i| !bits[i])
        .map(|i| {
            let (r, c) = ((i / n) as f64, (i % n) as f64);
            (i, gaussian(r - cm, sm) * gaussian(c - cn, sn))
        })
        .collect();
    let mut rng = SplitMix64::new(seed);
    for i in weighted_choice(&candidates, total - center * center, &mut rng) {
        bits[i] = true;
    }
    SamplingMask::new(
        m,
        n,
        bits,
        MaskMeta {
            generator: "random2d".into(),
            seed: Some(seed),
            rate,
            acs: center,
            pf: None,
        },
    )
}

/// Removes the highest positive frequencies along the column axis: columns
/// whose DC-centred index is `≥ ⌈fraction·N⌉ − ⌊N/2⌋` are cleared.
pub fn apply_partial_fourier(mask: &SamplingMask, fraction: f64) -> Result<SamplingMask> {
    ensure!(
        fraction > 0.5 && fraction <= 1.0,
        InvalidArgument,
        "partial-Fourier fraction must be in (1/2, 1], got {fraction}"
    );
    let n = mask.cols;
    let cutoff = exact_count(fraction, n) as isize - (n / 2) as isize;
    let mut bits = mask.bits.clone();
    for r in 0..mask.rows {
        for c in 0..n {
            if c as isize - (n / 2) as isize >= cutoff {
                bits[r * n + c] = false;
            }
        }
    }
    let mut meta = mask.meta.clone();
    meta.pf = Some(fraction);
    SamplingMask::new(mask.rows, n, bits, meta)
}

/// `N × L` phase-encoding/echo mask: per echo, every `r`-th phase-encoding
/// line plus the ACS block. With `interleave`, echo `l` starts at offset
/// `l mod r`, so each line is acquired in some echo.
pub fn mask_pe_p_uniform(
    n: usize,
    echoes: usize,
    r: usize,
    acs: usize,
    interleave: bool,
) -> Result<SamplingMask> {
    ensure!(echoes >= 1, InvalidArgument, "echo count must be >= 1");
    let base = mask_uniform(n, r, acs)?;
    let mut bits = vec![false; n * echoes];
    for l in 0..echoes {
        let shift = if interleave { l % r } else { 0 };
        for i in 0..n {
            let on = (i + r - shift).is_multiple_of(r) || acs_range(n, acs).contains(&i);
            bits[i * echoes + l] = on;
        }
    }
    let mut meta = base.meta;
    meta.generator = if interleave {
        "pe-p-uniform-interleaved".into()
    } else {
        "pe-p-uniform".into()
    };
    SamplingMask::new(n, echoes, bits, meta)
}
