//! Coil combination and compression.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::tensor::{ComplexTensor, RealImage};

/// Root-sum-of-squares combination over the last (coil) axis of `M×N×J`.
pub fn ssos(x: &ComplexTensor) -> Result<RealImage> {
    let (m, n, j) = x.dims3()?;
    let data = x
        .data()
        .chunks_exact(j)
        .map(|px| px.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    RealImage::new(m, n, data)
}

#[derive(Clone, Debug)]
pub struct CoilCompression {
    /// `M×N×J'` virtual-coil data.
    pub data: ComplexTensor,
    /// Fraction of total energy kept by the first `J'` components.
    pub energy_retained: f64,
    /// Singular values of the `(M·N)×J` data matrix, descending.
    pub singular_values: Vec<f64>,
}

/// Projects `K` onto its `target` dominant right singular vectors across
/// coils, computed from the `J×J` Gram matrix over all spatial locations.
pub fn coil_compress(k: &ComplexTensor, target: usize) -> Result<CoilCompression> {
    let (m, n, j) = k.dims3()?;
    ensure!(
        (1..=j).contains(&target),
        InvalidArgument,
        "target coil count {target} must be in 1..={j}"
    );
    let rows = m * n;
    let mut gram = DMatrix::<Complex64>::zeros(j, j);
    for px in k.data().chunks_exact(j) {
        for a in 0..j {
            let ca = px[a].conj();
            for b in 0..j {
                gram[(a, b)] += ca * px[b];
            }
        }
    }
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..j).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigvals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = eigvals.iter().sum();
    let kept: f64 = eigvals[..target].iter().sum();

    let mut out = vec![Complex64::new(0.0, 0.0); rows * target];
    for (px, dst) in k.data().chunks_exact(j).zip(out.chunks_exact_mut(target)) {
        for (t, &col) in order[..target].iter().enumerate() {
            dst[t] = (0..j).map(|c| px[c] * eig.eigenvectors[(c, col)]).sum();
        }
    }
    Ok(CoilCompression {
        data: ComplexTensor::new(vec![m, n, target], out)?,
        energy_retained: if total > 0.0 { kept / total } else { 1.0 },
        singular_values: eigvals.iter().map(|v| v.sqrt()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_four_five() {
        let x = ComplexTensor::new(
            vec![1, 1, 2],
            vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)],
        )
        .unwrap();
        assert_eq!(ssos(&x).unwrap().data(), &[5.0]);
    }

    #[test]
    fn single_coil_is_magnitude() {
        let vals: Vec<_> = (0..6)
            .map(|i| Complex64::new(i as f64 - 2.0, 1.5))
            .collect();
        let x = ComplexTensor::new(vec![2, 3, 1], vals.clone()).unwrap();
        let s = ssos(&x).unwrap();
        for (a, z) in s.data().iter().zip(&vals) {
            assert_eq!(*a, z.norm());
        }
    }

    #[test]
    fn ssos_needs_rank_three() {
        let x = ComplexTensor::zeros(&[4, 4]).unwrap();
        assert!(ssos(&x).is_err());
    }

    #[test]
    fn compress_range_checked() {
        let x = ComplexTensor::zeros(&[2, 2, 3]).unwrap();
        assert!(coil_compress(&x, 0).is_err());
        assert!(coil_compress(&x, 4).is_err());
    }
}
