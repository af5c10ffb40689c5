//! Shared outer loop: X-update, then all Z-updates, then all multiplier
//! updates, in that order.

use num_complex::Complex64;

use super::{cg_solve, svt, AdmmConfig, AdmmOutcome, IterationRecord, StopReason, XSolver};
use crate::error::{Error, Result};
use crate::hankel::CMatrix;
use crate::lifting::LineLift;
use crate::par;
use crate::tensor::ComplexTensor;

pub(crate) struct LiftTerm<'a> {
    pub op: &'a LineLift,
    pub threshold: f64,
}

pub(crate) type LinearMap<'a> = &'a (dyn Fn(&ComplexTensor) -> ComplexTensor + Sync);

pub(crate) struct XUpdate<'a> {
    pub normal: LinearMap<'a>,
    /// Exact solver, when the normal operator is diagonalisable.
    pub direct: Option<LinearMap<'a>>,
    pub data_rhs: ComplexTensor,
}

struct TermState {
    z: Vec<CMatrix>,
    d: Vec<CMatrix>,
}

pub(crate) fn run(
    xu: &XUpdate<'_>,
    terms: &[LiftTerm<'_>],
    x0: ComplexTensor,
    cfg: &AdmmConfig,
) -> Result<AdmmOutcome> {
    let beta = cfg.beta;
    let mut states: Vec<TermState> = terms
        .iter()
        .map(|t| {
            let (r, c) = t.op.matrix_shape();
            let lines = t.op.line_count();
            TermState {
                z: vec![CMatrix::zeros(r, c); lines],
                d: vec![
                    CMatrix::from_element(r, c, Complex64::new(cfg.multiplier_init, 0.0));
                    lines
                ],
            }
        })
        .collect();

    let mut x = x0;
    let mut history = Vec::new();
    let mut stop = StopReason::MaxIterations;
    for k in 1..=cfg.max_outer {
        let mut rhs = xu.data_rhs.clone();
        for (t, s) in terms.iter().zip(&states) {
            let shifted: Vec<CMatrix> =
                s.z.iter()
                    .zip(&s.d)
                    .map(|(z, d)| z - d / Complex64::new(beta, 0.0))
                    .collect();
            rhs.axpy(Complex64::new(beta, 0.0), &t.op.adjoint_all(&shifted)?);
        }

        let (x_new, cg_iterations, cg_residual) = match (xu.direct, cfg.x_solver) {
            (Some(direct), XSolver::Auto) => {
                let sol = direct(&rhs);
                let mut r = (xu.normal)(&sol);
                r.axpy(Complex64::new(-1.0, 0.0), &rhs);
                let denom = rhs.norm();
                let res = if denom > 0.0 { r.norm() / denom } else { 0.0 };
                (sol, 0, res)
            }
            _ => {
                let out = cg_solve(xu.normal, &rhs, &x, cfg.cg_max, cfg.cg_tol)?;
                (out.x, out.iterations, out.residual)
            }
        };
        if !x_new.is_finite() || !x_new.norm_sqr().is_finite() {
            return Err(Error::Divergence(format!(
                "non-finite image at iteration {k}"
            )));
        }

        for (t, s) in terms.iter().zip(states.iter_mut()) {
            let updated = par::map_range(t.op.line_count(), |i| {
                let lifted = t.op.lift_unchecked(&x_new, i);
                let z = svt(
                    &(&lifted + &s.d[i] / Complex64::new(beta, 0.0)),
                    t.threshold,
                );
                let d = &s.d[i] + (lifted - &z) * Complex64::new(cfg.tau, 0.0);
                (z, d)
            });
            for (i, (z, d)) in updated.into_iter().enumerate() {
                s.z[i] = z;
                s.d[i] = d;
            }
        }

        let mut diff = x_new.clone();
        diff.axpy(Complex64::new(-1.0, 0.0), &x);
        let prev = x.norm_sqr();
        if !diff.norm_sqr().is_finite() {
            return Err(Error::Divergence(format!(
                "iterate change overflowed at iteration {k}"
            )));
        }
        let change = if prev > 0.0 {
            diff.norm_sqr() / prev
        } else if diff.norm_sqr() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        history.push(IterationRecord {
            iter: k,
            rel_change: change,
            cg_iterations,
            cg_residual,
        });
        x = x_new;
        if change < cfg.tol {
            stop = StopReason::Converged;
            break;
        }
    }
    Ok(AdmmOutcome { x, history, stop })
}
