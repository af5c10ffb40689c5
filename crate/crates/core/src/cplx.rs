//! The `.cplx` container.
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes        | content                                   |
//! |--------------|-------------------------------------------|
//! | 8            | magic `CPLX0001`                          |
//! | 1            | precision code, 0 = f32, 1 = f64          |
//! | 4            | `ndim` as u32                             |
//! | 8 × ndim     | dims as u64                               |
//! | rest         | interleaved `(re, im)`, last dim fastest  |

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::ComplexTensor;

pub const MAGIC: &[u8; 8] = b"CPLX0001";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    F32,
    F64,
}

impl Precision {
    fn code(self) -> u8 {
        match self {
            Precision::F32 => 0,
            Precision::F64 => 1,
        }
    }

    fn scalar_bytes(self) -> usize {
        match self {
            Precision::F32 => 4,
            Precision::F64 => 8,
        }
    }

    /// Parses `32` or `64`.
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            32 => Ok(Precision::F32),
            64 => Ok(Precision::F64),
            other => Err(Error::InvalidArgument(format!(
                "precision must be 32 or 64, got {other}"
            ))),
        }
    }
}

pub fn encode(t: &ComplexTensor, precision: Precision) -> Vec<u8> {
    let dims = t.dims();
    let mut out = Vec::with_capacity(13 + 8 * dims.len() + 2 * precision.scalar_bytes() * t.len());
    out.extend_from_slice(MAGIC);
    out.push(precision.code());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for z in t.data() {
        match precision {
            Precision::F32 => {
                out.extend_from_slice(&(z.re as f32).to_le_bytes());
                out.extend_from_slice(&(z.im as f32).to_le_bytes());
            }
            Precision::F64 => {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
    }
    out
}

/// Decodes a `.cplx` byte buffer; `path` only labels errors.
pub fn decode(bytes: &[u8], path: &Path) -> Result<ComplexTensor> {
    let truncated = |expected: u64| Error::Truncated {
        path: path.to_path_buf(),
        expected,
        found: bytes.len() as u64,
    };
    if bytes.len() < 8 {
        return Err(truncated(13));
    }
    if &bytes[..8] != MAGIC {
        let mut found = [0u8; 8];
        found.copy_from_slice(&bytes[..8]);
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
            found,
        });
    }
    if bytes.len() < 13 {
        return Err(truncated(13));
    }
    let precision = match bytes[8] {
        0 => Precision::F32,
        1 => Precision::F64,
        code => {
            return Err(Error::BadPrecision {
                path: path.to_path_buf(),
                code,
            })
        }
    };
    let ndim = u32::from_le_bytes(bytes[9..13].try_into().unwrap()) as usize;
    let header = 13u64 + 8 * ndim as u64;
    if (bytes.len() as u64) < header {
        return Err(truncated(header));
    }
    let raw_dims: Vec<u64> = bytes[13..header as usize]
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let overflow = || Error::DimOverflow {
        path: path.to_path_buf(),
        dims: raw_dims.clone(),
    };
    if ndim == 0 || raw_dims.contains(&0) {
        return Err(overflow());
    }
    let count = raw_dims
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d))
        .ok_or_else(overflow)?;
    let payload = count
        .checked_mul(2 * precision.scalar_bytes() as u64)
        .and_then(|p| p.checked_add(header))
        .ok_or_else(overflow)?;
    if usize::try_from(payload).is_err() {
        return Err(overflow());
    }
    if (bytes.len() as u64) < payload {
        return Err(truncated(payload));
    }
    if (bytes.len() as u64) > payload {
        return Err(Error::InvalidArgument(format!(
            "{}: {} trailing bytes after payload",
            path.display(),
            bytes.len() as u64 - payload
        )));
    }
    let body = &bytes[header as usize..];
    let data: Vec<Complex64> = match precision {
        Precision::F32 => body
            .chunks_exact(8)
            .map(|c| {
                Complex64::new(
                    f32::from_le_bytes(c[..4].try_into().unwrap()) as f64,
                    f32::from_le_bytes(c[4..].try_into().unwrap()) as f64,
                )
            })
            .collect(),
        Precision::F64 => body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect(),
    };
    let dims = raw_dims.iter().map(|&d| d as usize).collect();
    ComplexTensor::new(dims, data)
}

pub fn write_cplx(t: &ComplexTensor, path: impl AsRef<Path>, precision: Precision) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(t, precision)).map_err(|e| Error::io(path, e))
}

pub fn read_cplx(path: impl AsRef<Path>) -> Result<ComplexTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, path)
}
