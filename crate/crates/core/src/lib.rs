//! Separable low-rank Hankel regularised MRI reconstruction.
//!
//! Each k-space row and column is lifted to its own small Hankel matrix
//! (optionally weighted by a finite-difference filter and augmented with a
//! virtual conjugate coil) and penalised by its nuclear norm, optionally
//! together with a self-consistency term. The models are solved with ADMM.
//! The same machinery reconstructs multi-echo data for T2 mapping, with an
//! additional low-rank penalty along the echo dimension.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coil;
pub mod cplx;
pub mod error;
pub mod fft;
pub mod hankel;
pub mod lifting;
pub mod metrics;
pub mod normal;
mod par;
pub mod parammap;
pub mod rng;
pub mod sampling;
pub mod solvers;
pub mod spirit;
pub mod synth;
pub mod tensor;

pub use error::{Error, Result};
pub use hankel::{HankelConfig, Pencil};
pub use sampling::SamplingMask;
pub use solvers::{AdmmConfig, AdmmOutcome, PiMethod};
pub use spirit::SpiritKernels;
pub use tensor::{ComplexTensor, RealImage};
