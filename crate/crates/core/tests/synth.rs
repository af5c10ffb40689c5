mod common;

use common::*;
use shlr::coil::ssos;
use shlr::fft::ifft2d_centered;
use shlr::hankel::CMatrix;
use shlr::synth::*;

#[test]
fn sensitivities_span_four_lobes() {
    let (m, n, j) = (20, 18, 8);
    let s = gen_sensitivities(m, n, j).unwrap();
    let a = CMatrix::from_fn(m * n, j, |p, q| s.data()[p * j + q]);
    let sv = oracle_singular_values(&a);
    assert!(sv[SENSITIVITY_BASIS - 1] > 1e-6 * sv[0]);
    assert!(
        sv[SENSITIVITY_BASIS..].iter().all(|&v| v < 1e-10 * sv[0]),
        "{sv:?}"
    );
}

#[test]
fn single_coil_map_is_unit_magnitude() {
    let s = gen_sensitivities(9, 7, 1).unwrap();
    assert!(s.data().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
}

#[test]
fn noiseless_kspace_inverts_to_truth() {
    let spec = PhantomSpec::standard(32, 24, 3);
    let (truth, k) = gen_pi_phantom(&spec, 7).unwrap();
    assert!(ifft2d_centered(&k).unwrap().max_abs_diff(&truth) < 1e-12);
    assert!((k.norm() - truth.norm()).abs() < 1e-12 * truth.norm());
}

#[test]
fn zero_phase_phantom_is_real_up_to_coil_phase() {
    let spec = PhantomSpec {
        phase_smoothness: 0.0,
        ..PhantomSpec::standard(16, 16, 2)
    };
    let (truth, _) = gen_pi_phantom(&spec, 1).unwrap();
    let s = gen_sensitivities(16, 16, 2).unwrap();
    for (x, c) in truth.data().iter().zip(s.data()) {
        let v = x / c;
        assert!(v.im.abs() < 1e-12 && v.re >= -1e-12);
    }
    // Magnitudes are piecewise constant: SSOS equals the painted image.
    let paint = paint(16, 16, &spec.shapes);
    let img = ssos(&truth).unwrap();
    assert!(img
        .data()
        .iter()
        .zip(&paint)
        .all(|(a, b)| (a - b).abs() < 1e-12));
}

#[test]
fn piecewise_constant_rows_are_sparse_under_differences() {
    let spec = PhantomSpec::standard(40, 40, 1);
    let img = paint(40, 40, &spec.shapes);
    for r in 0..40 {
        let jumps = (1..40)
            .filter(|&q| img[r * 40 + q] != img[r * 40 + q - 1])
            .count();
        assert!(jumps <= 2 * spec.shapes.len());
    }
}

fn echo_matrix(data: &shlr::ComplexTensor, l: usize, j: usize, coil: usize) -> CMatrix {
    let pixels = data.len() / (l * j);
    CMatrix::from_fn(pixels, l, |p, e| data.data()[(p * l + e) * j + coil])
}

#[test]
fn decay_matrix_ranks() {
    let tes = default_echo_times();
    assert_eq!(tes.len(), 15);
    assert!((tes[14] - 132.0).abs() < 1e-12);
    let mut one = T2PhantomSpec::two_tissue(24, 24, 1);
    one.regions.truncate(1);
    one.regions[0].amplitude = 1000.0;
    one.regions[0].t2 = 80.0;
    let (data, _) = gen_t2_phantom(&one, 0).unwrap();
    let sv = oracle_singular_values(&echo_matrix(&data, 15, 1, 0));
    assert!(sv[1] / sv[0] < 1e-12);

    let two = T2PhantomSpec::two_tissue(24, 24, 2);
    let (data, _) = gen_t2_phantom(&two, 0).unwrap();
    for coil in 0..2 {
        let sv = oracle_singular_values(&echo_matrix(&data, 15, 2, coil));
        assert!(sv[2] / sv[0] < 1e-12);
        assert!(sv[1] / sv[0] > 1e-6);
    }
}

#[test]
fn zero_echo_time_recovers_amplitude() {
    let mut spec = T2PhantomSpec::two_tissue(20, 20, 1);
    spec.echo_times = vec![1e-12, 10.0];
    let (data, t2) = gen_t2_phantom(&spec, 0).unwrap();
    for p in 0..400 {
        let (r, q) = (p / 20, p % 20);
        let want = spec
            .regions
            .iter()
            .rev()
            .find(|reg| reg.shape.contains(r, q))
            .map_or(0.0, |reg| reg.amplitude);
        assert!((data.data()[p * 2].norm() - want).abs() < 1e-9 * want.max(1.0));
        assert_eq!(t2.data()[p] == 0.0, want == 0.0);
    }
}
