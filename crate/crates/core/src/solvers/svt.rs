use num_complex::Complex64;

use crate::hankel::CMatrix;

/// Singular value soft-thresholding: `U · max(Σ − τ, 0) · Vᴴ`.
pub fn svt(m: &CMatrix, tau: f64) -> CMatrix {
    svt_with_rank(m, tau).0
}

/// [`svt`] together with the number of singular values above `tau`.
pub fn svt_with_rank(m: &CMatrix, tau: f64) -> (CMatrix, usize) {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return (m.clone(), 0);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.as_ref().expect("left vectors requested");
    let v_t = svd.v_t.as_ref().expect("right vectors requested");
    let mut out = CMatrix::zeros(rows, cols);
    let mut rank = 0;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let shrunk = s - tau;
        if shrunk <= 0.0 {
            continue;
        }
        rank += 1;
        let scaled = u.column(i) * Complex64::new(shrunk, 0.0);
        out.ger(
            Complex64::new(1.0, 0.0),
            &scaled,
            &v_t.row(i).transpose(),
            Complex64::new(1.0, 0.0),
        );
    }
    (out, rank)
}
