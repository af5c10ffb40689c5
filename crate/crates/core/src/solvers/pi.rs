//! Parallel-imaging reconstruction.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use num_complex::Complex64;

use super::admm::{self, LiftTerm, XUpdate};
use super::{peak, AdmmConfig, AdmmOutcome};
use crate::error::{ensure, Error, Result};
use crate::hankel::HankelConfig;
use crate::normal::{mask_flags, PiNormal};
use crate::sampling::SamplingMask;
use crate::spirit::{spirit_calibrate, SpiritKernels};
use crate::tensor::ComplexTensor;

/// The four model variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PiMethod {
    Shlr,
    ShlrS,
    ShlrV,
    ShlrSv,
}

impl PiMethod {
    pub const ALL: [PiMethod; 4] = [Self::Shlr, Self::ShlrS, Self::ShlrV, Self::ShlrSv];

    pub fn uses_spirit(self) -> bool {
        matches!(self, Self::ShlrS | Self::ShlrSv)
    }

    pub fn uses_virtual_coil(self) -> bool {
        matches!(self, Self::ShlrV | Self::ShlrSv)
    }

    /// `base` with the term switches set for this variant.
    pub fn configure(self, base: &AdmmConfig) -> AdmmConfig {
        AdmmConfig {
            enable_spirit: self.uses_spirit(),
            enable_vc: self.uses_virtual_coil(),
            ..base.clone()
        }
    }
}

impl fmt::Display for PiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Shlr => "SHLR",
            Self::ShlrS => "SHLR-S",
            Self::ShlrV => "SHLR-V",
            Self::ShlrSv => "SHLR-SV",
        })
    }
}

impl FromStr for PiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "SHLR" => Ok(Self::Shlr),
            "SHLR-S" => Ok(Self::ShlrS),
            "SHLR-V" => Ok(Self::ShlrV),
            "SHLR-SV" => Ok(Self::ShlrSv),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

fn centred_run(len: usize, sampled: impl Fn(usize) -> bool) -> Range<usize> {
    let c = len / 2;
    if !sampled(c) {
        return c..c;
    }
    let mut lo = c;
    while lo > 0 && sampled(lo - 1) {
        lo -= 1;
    }
    let mut hi = c + 1;
    while hi < len && sampled(hi) {
        hi += 1;
    }
    lo..hi
}

/// Largest fully sampled rectangle around the k-space centre, as
/// `(row range, column range)` on an `rows × cols` grid.
pub fn acs_block(
    mask: &SamplingMask,
    rows: usize,
    cols: usize,
) -> Result<(Range<usize>, Range<usize>)> {
    let flags = mask_flags(mask, rows, cols)?;
    let cr = rows / 2;
    let cs = centred_run(cols, |c| flags[cr * cols + c]);
    let rs = centred_run(rows, |r| cs.clone().all(|c| flags[r * cols + c]));
    Ok((rs, cs))
}

/// Calibrates self-consistency kernels on the centre block of undersampled
/// k-space.
pub fn calibrate_from_kspace(
    y: &ComplexTensor,
    mask: &SamplingMask,
    kernel_size: usize,
    tikhonov: f64,
) -> Result<SpiritKernels> {
    let (m, n, j) = y.dims3()?;
    let (rs, cs) = acs_block(mask, m, n)?;
    ensure!(
        rs.len() > kernel_size && cs.len() > kernel_size,
        DegenerateCalibration,
        "fully sampled centre {}x{} too small for a {kernel_size}x{kernel_size} kernel",
        rs.len(),
        cs.len()
    );
    let mut acs = ComplexTensor::zeros(&[rs.len(), cs.len(), j])?;
    for (a, r) in rs.clone().enumerate() {
        for (b, c) in cs.clone().enumerate() {
            for q in 0..j {
                acs.set(&[a, b, q], y.get(&[r, c, q]));
            }
        }
    }
    spirit_calibrate(&acs, kernel_size, tikhonov)
}

/// Reconstructs multi-coil images from undersampled k-space `y` (`M×N×J`).
///
/// `g` is required when `acfg.enable_spirit` is set and ignored otherwise.
/// The virtual-coil switch is taken from `acfg.enable_vc`.
pub fn shlr_pi_reconstruct(
    y: &ComplexTensor,
    mask: &SamplingMask,
    g: Option<&SpiritKernels>,
    hcfg: &HankelConfig,
    acfg: &AdmmConfig,
) -> Result<AdmmOutcome> {
    acfg.validate()?;
    let dims = y.dims3()?;
    ensure!(
        y.is_finite(),
        InvalidArgument,
        "k-space contains non-finite values"
    );
    let kernels = if acfg.enable_spirit {
        Some(g.ok_or_else(|| {
            Error::InvalidArgument("self-consistency enabled but no kernels supplied".into())
        })?)
    } else {
        None
    };
    let hcfg = HankelConfig {
        virtual_coil: acfg.enable_vc,
        ..hcfg.clone()
    };
    hcfg.validate()?;
    let op = PiNormal::new(
        dims,
        mask,
        kernels,
        &hcfg,
        acfg.lambda,
        acfg.lambda1,
        acfg.beta,
    )?;

    let mut data_rhs = op.data_rhs(y)?;
    let mut x0 = data_rhs.clone();
    x0.scale(Complex64::new(1.0 / acfg.lambda, 0.0));
    let scale = if acfg.normalize { peak(&x0) } else { 1.0 };
    data_rhs.scale(Complex64::new(1.0 / scale, 0.0));
    x0.scale(Complex64::new(1.0 / scale, 0.0));

    let normal = |x: &ComplexTensor| op.apply(x).expect("dims checked");
    let direct = |x: &ComplexTensor| op.direct_solve(x).expect("diagonal operator");
    let xu = XUpdate {
        normal: &normal,
        direct: if op.has_spirit_term() {
            None
        } else {
            Some(&direct)
        },
        data_rhs,
    };
    let threshold = 1.0 / acfg.beta;
    let terms = [
        LiftTerm {
            op: &op.rows,
            threshold,
        },
        LiftTerm {
            op: &op.cols,
            threshold,
        },
    ];
    let mut out = admm::run(&xu, &terms, x0, acfg)?;
    out.x.scale(Complex64::new(scale, 0.0));
    Ok(out)
}
