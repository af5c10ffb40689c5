//! Krylov solver for the X-subproblem.
//!
//! The iteration is the conjugate-residual variant of conjugate gradients:
//! search directions are `A`-conjugate in the `A`-weighted inner product, so
//! the residual norm is non-increasing. All inner products are real parts
//! of complex ones, which makes the solver valid for operators that are only
//! real-linear (such as those involving virtual coils).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::ComplexTensor;

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub x: ComplexTensor,
    pub iterations: usize,
    /// Final `‖A x − b‖ / ‖b‖`.
    pub residual: f64,
    /// Relative residual before the first and after every iteration.
    pub history: Vec<f64>,
}

/// Solves `A x = b` for self-adjoint positive semi-definite `A`, starting
/// from `x0`, until `‖A x − b‖/‖b‖ ≤ tol` or `max_iter` iterations.
pub fn cg_solve<F>(
    op: F,
    b: &ComplexTensor,
    x0: &ComplexTensor,
    max_iter: usize,
    tol: f64,
) -> Result<CgOutcome>
where
    F: Fn(&ComplexTensor) -> ComplexTensor,
{
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Ok(CgOutcome {
            x: b.zeros_like(),
            iterations: 0,
            residual: 0.0,
            history: vec![0.0],
        });
    }
    let finite = |t: &ComplexTensor, what: &str| {
        if t.is_finite() {
            Ok(())
        } else {
            Err(Error::Divergence(format!(
                "non-finite {what} in conjugate gradients"
            )))
        }
    };
    finite(b, "right-hand side")?;
    finite(x0, "initial guess")?;
    let one = Complex64::new(1.0, 0.0);

    let mut x = x0.clone();
    let mut r = b.clone();
    r.axpy(-one, &op(&x));
    finite(&r, "residual")?;
    let mut history = vec![r.norm() / b_norm];
    let mut iterations = 0;
    if history[0] <= tol {
        return Ok(CgOutcome {
            x,
            iterations,
            residual: history[0],
            history,
        });
    }
    let mut ar = op(&r);
    let mut p = r.clone();
    let mut ap = ar.clone();
    let mut r_ar = r.re_dot(&ar);

    while iterations < max_iter {
        let ap_ap = ap.re_dot(&ap);
        // An overflowed inner product would otherwise give a zero step.
        if !ap_ap.is_finite() || !r_ar.is_finite() {
            return Err(Error::Divergence(
                "non-finite curvature in conjugate gradients".into(),
            ));
        }
        if ap_ap <= 0.0 || r_ar <= 0.0 {
            break;
        }
        let alpha = r_ar / ap_ap;
        x.axpy(Complex64::new(alpha, 0.0), &p);
        r.axpy(Complex64::new(-alpha, 0.0), &ap);
        iterations += 1;
        let rel = r.norm() / b_norm;
        if !rel.is_finite() {
            return Err(Error::Divergence(
                "non-finite residual in conjugate gradients".into(),
            ));
        }
        history.push(rel);
        if rel <= tol {
            break;
        }
        ar = op(&r);
        let r_ar_new = r.re_dot(&ar);
        let beta = r_ar_new / r_ar;
        r_ar = r_ar_new;
        // p = r + βp, Ap = Ar + βAp
        p.scale(Complex64::new(beta, 0.0));
        p.axpy(one, &r);
        ap.scale(Complex64::new(beta, 0.0));
        ap.axpy(one, &ar);
    }
    finite(&x, "iterate")?;
    Ok(CgOutcome {
        residual: *history.last().unwrap(),
        x,
        iterations,
        history,
    })
}
