//! Singular value thresholding, the Krylov inner solver and the two ADMM
//! drivers.

mod admm;
pub mod cg;
pub mod param;
pub mod pi;
pub mod svt;

use std::fmt;

use crate::error::{ensure, Result};
use crate::hankel::Pencil;
use crate::tensor::ComplexTensor;

pub use cg::{cg_solve, CgOutcome};
pub use param::shlr_param_reconstruct_slice;
pub use pi::{acs_block, calibrate_from_kspace, shlr_pi_reconstruct, PiMethod};
pub use svt::{svt, svt_with_rank};

/// How the X-subproblem is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum XSolver {
    /// Diagonal solve in the transformed domain when the operator allows
    /// it, warm-started conjugate gradients otherwise.
    #[default]
    Auto,
    /// Always conjugate gradients.
    Cg,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmmConfig {
    /// Data-fidelity weight.
    pub lambda: f64,
    /// Self-consistency weight.
    pub lambda1: f64,
    /// Weight of the echo-direction low-rank term (parameter imaging).
    pub lambda2: f64,
    /// Penalty parameter; lifted terms are thresholded at `1/β` (`λ2/β`).
    pub beta: f64,
    /// Multiplier step size.
    pub tau: f64,
    pub max_outer: usize,
    /// Stop once `‖X⁽ᵏ⁺¹⁾ − X⁽ᵏ⁾‖²/‖X⁽ᵏ⁾‖²` drops below this.
    pub tol: f64,
    pub cg_max: usize,
    pub cg_tol: f64,
    pub enable_spirit: bool,
    /// Virtual-coil augmentation of the weighted lifts. Overrides the
    /// `virtual_coil` flag of the Hankel configuration passed to a solver.
    pub enable_vc: bool,
    /// Initial value of every multiplier entry.
    pub multiplier_init: f64,
    pub x_solver: XSolver,
    /// Pencil of the echo-direction lifts (parameter imaging only).
    pub param_pencil: Pencil,
    /// Scale the data so the zero-filled image peaks at 1 before solving,
    /// and undo the scaling afterwards. The nuclear-norm thresholds and
    /// multiplier initialisation are absolute, so without this the
    /// effective regularisation depends on the data's units.
    pub normalize: bool,
}

impl AdmmConfig {
    /// Defaults for parallel imaging: 50 outer iterations.
    pub fn parallel_imaging() -> Self {
        Self {
            lambda: 1e4,
            lambda1: 1e2,
            lambda2: 2.0,
            beta: 1.0,
            tau: 1.0,
            max_outer: 50,
            tol: 1e-6,
            cg_max: 15,
            cg_tol: 1e-8,
            enable_spirit: true,
            enable_vc: true,
            multiplier_init: 1.0,
            x_solver: XSolver::Auto,
            param_pencil: Pencil::Auto,
            normalize: true,
        }
    }

    /// Defaults for parameter imaging: 100 outer iterations, no
    /// self-consistency term.
    pub fn parameter_imaging() -> Self {
        Self {
            max_outer: 100,
            enable_spirit: false,
            ..Self::parallel_imaging()
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.lambda > 0.0, InvalidArgument, "lambda must be > 0");
        ensure!(self.lambda1 >= 0.0, InvalidArgument, "lambda1 must be >= 0");
        ensure!(self.lambda2 >= 0.0, InvalidArgument, "lambda2 must be >= 0");
        ensure!(self.beta > 0.0, InvalidArgument, "beta must be > 0");
        ensure!(self.tau > 0.0, InvalidArgument, "tau must be > 0");
        ensure!(self.tol > 0.0, InvalidArgument, "tol must be > 0");
        ensure!(
            self.max_outer >= 1,
            InvalidArgument,
            "max_outer must be >= 1"
        );
        ensure!(self.cg_tol > 0.0, InvalidArgument, "cg_tol must be > 0");
        ensure!(
            self.multiplier_init.is_finite(),
            InvalidArgument,
            "multiplier_init must be finite"
        );
        Ok(())
    }
}

/// One outer iteration, printed as `key=value` pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub rel_change: f64,
    pub cg_iterations: usize,
    pub cg_residual: f64,
}

impl fmt::Display for IterationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iter={} rel_change={:e} cg_iters={} cg_residual={:e}",
            self.iter, self.rel_change, self.cg_iterations, self.cg_residual
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
}

#[derive(Clone, Debug)]
pub struct AdmmOutcome {
    pub x: ComplexTensor,
    pub history: Vec<IterationRecord>,
    pub stop: StopReason,
}

/// Peak magnitude of `x`, used as the normalisation scale (1 for zero data).
pub(crate) fn peak(x: &ComplexTensor) -> f64 {
    let m = x.data().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

impl AdmmOutcome {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    /// The iteration log, one line per outer iteration.
    pub fn log(&self) -> String {
        self.history.iter().map(|r| format!("{r}\n")).collect()
    }
}
