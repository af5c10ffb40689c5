//! Dense real-form assembly of the normal operators from explicit DFT
//! matrices, selection matrices and circulant correlations.

use nalgebra::DMatrix;

use super::{c, conj_real, dft_matrix, naive_weights, realify, C};
use shlr::spirit::SpiritKernels;

/// Selects `count` entries starting at `start` with stride `stride`.
fn selection(total: usize, start: usize, stride: usize, count: usize) -> DMatrix<C> {
    let mut s = DMatrix::zeros(count, total);
    for i in 0..count {
        s[(i, start + i * stride)] = c(1.0, 0.0);
    }
    s
}

/// Hankel lift of a length-`n` vector as a `p(n−p+1) × n` selection.
fn hankel_matrix(n: usize, p: usize) -> DMatrix<C> {
    let k = n - p + 1;
    let mut h = DMatrix::zeros(p * k, n);
    for i in 0..p {
        for q in 0..k {
            h[(i * k + q, i + q)] = c(1.0, 0.0);
        }
    }
    h
}

fn reversal(n: usize) -> DMatrix<C> {
    DMatrix::from_fn(n, n, |i, j| {
        if i + j == n - 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    })
}

/// `Σ Lᵀ L` over all lines of one lifting, in real form. `select` gives the
/// selection matrix of each line.
fn lift_gram(
    total: usize,
    lines: &[DMatrix<C>],
    n: usize,
    p: usize,
    transform: Option<&[C]>,
    vc: bool,
) -> DMatrix<f64> {
    let h = hankel_matrix(n, p);
    let pre = match transform {
        Some(taps) => {
            let w = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(naive_weights(taps, n)));
            w * dft_matrix(n)
        }
        None => DMatrix::identity(n, n),
    };
    let mut out = DMatrix::zeros(2 * total, 2 * total);
    for s in lines {
        let spec = &pre * s;
        let plain = realify(&(&h * &spec));
        out += plain.transpose() * &plain;
        if vc {
            let reflected = realify(&(&h * reversal(n))) * conj_real(n) * realify(&spec);
            out += reflected.transpose() * &reflected;
        }
    }
    out
}

/// Image-domain matrix of the k-space correlation defined by `g` on an
/// `m×n×j` grid, `F2* G F2`.
pub fn spirit_matrix(g: &SpiritKernels, m: usize, n: usize) -> DMatrix<C> {
    let j = g.coils();
    let ks = g.kernel_size();
    let h = (ks / 2) as isize;
    let total = m * n * j;
    let mut corr = DMatrix::zeros(total, total);
    for r in 0..m {
        for q in 0..n {
            for tgt in 0..j {
                for o0 in 0..ks {
                    for o1 in 0..ks {
                        let rr = (r as isize + o0 as isize - h).rem_euclid(m as isize) as usize;
                        let qq = (q as isize + o1 as isize - h).rem_euclid(n as isize) as usize;
                        for src in 0..j {
                            corr[((r * n + q) * j + tgt, (rr * n + qq) * j + src)] +=
                                g.get(o0, o1, src, tgt);
                        }
                    }
                }
            }
        }
    }
    let f2 = fourier2(m, n, j);
    f2.adjoint() * corr * f2
}

/// Centred 2D DFT acting on the first two axes of an `m×n×j` grid.
pub fn fourier2(m: usize, n: usize, j: usize) -> DMatrix<C> {
    let (fm, fn_) = (dft_matrix(m), dft_matrix(n));
    let total = m * n * j;
    DMatrix::from_fn(total, total, |a, b| {
        let (ra, qa, ja) = (a / (n * j), (a / j) % n, a % j);
        let (rb, qb, jb) = (b / (n * j), (b / j) % n, b % j);
        if ja == jb {
            fm[(ra, rb)] * fn_[(qa, qb)]
        } else {
            c(0.0, 0.0)
        }
    })
}

/// DFT along axis 0 only of an `n×l×j` grid.
fn fourier_axis0(n: usize, l: usize, j: usize) -> DMatrix<C> {
    let f = dft_matrix(n);
    let total = n * l * j;
    DMatrix::from_fn(total, total, |a, b| {
        let (ra, rest_a) = (a / (l * j), a % (l * j));
        let (rb, rest_b) = (b / (l * j), b % (l * j));
        if rest_a == rest_b {
            f[(ra, rb)]
        } else {
            c(0.0, 0.0)
        }
    })
}

fn mask_diag(mask: &[bool], j: usize) -> DMatrix<C> {
    let d: Vec<C> = mask
        .iter()
        .flat_map(|&b| std::iter::repeat_n(c(if b { 1.0 } else { 0.0 }, 0.0), j))
        .collect();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
}

/// Real form of the parallel-imaging normal operator on an `m×n×j` image.
#[allow(clippy::too_many_arguments)]
pub fn pi_normal_dense(
    m: usize,
    n: usize,
    j: usize,
    mask: &[bool],
    g: Option<&SpiritKernels>,
    taps: &[C],
    pencil_rows: usize,
    pencil_cols: usize,
    vc: bool,
    lambda: f64,
    lambda1: f64,
    beta: f64,
) -> DMatrix<f64> {
    let total = m * n * j;
    let f2 = fourier2(m, n, j);
    let mut cplx = f2.adjoint() * mask_diag(mask, j) * &f2 * c(lambda, 0.0);
    if let Some(g) = g {
        let e = spirit_matrix(g, m, n) - DMatrix::<C>::identity(total, total);
        cplx += e.adjoint() * e * c(lambda1, 0.0);
    }
    let rows: Vec<_> = (0..m)
        .flat_map(|r| (0..j).map(move |s| (r, s)))
        .map(|(r, s)| selection(total, r * n * j + s, j, n))
        .collect();
    let cols: Vec<_> = (0..n)
        .flat_map(|q| (0..j).map(move |s| (q, s)))
        .map(|(q, s)| selection(total, q * j + s, n * j, m))
        .collect();
    realify(&cplx)
        + (lift_gram(total, &rows, n, pencil_rows, Some(taps), vc)
            + lift_gram(total, &cols, m, pencil_cols, Some(taps), vc))
            * beta
}

/// Real form of the parameter-imaging normal operator on an `n×l×j` plane.
#[allow(clippy::too_many_arguments)]
pub fn param_normal_dense(
    n: usize,
    l: usize,
    j: usize,
    mask: &[bool],
    taps: &[C],
    pencil_pe: usize,
    pencil_param: usize,
    vc: bool,
    lambda: f64,
    beta: f64,
) -> DMatrix<f64> {
    let total = n * l * j;
    let f = fourier_axis0(n, l, j);
    let cplx = f.adjoint() * mask_diag(mask, j) * &f * c(lambda, 0.0);
    let pe: Vec<_> = (0..l)
        .flat_map(|e| (0..j).map(move |s| (e, s)))
        .map(|(e, s)| selection(total, e * j + s, l * j, n))
        .collect();
    let par: Vec<_> = (0..n)
        .flat_map(|k| (0..j).map(move |s| (k, s)))
        .map(|(k, s)| selection(total, k * l * j + s, j, l))
        .collect();
    realify(&cplx)
        + (lift_gram(total, &pe, n, pencil_pe, Some(taps), vc)
            + lift_gram(total, &par, l, pencil_param, None, false))
            * beta
}
