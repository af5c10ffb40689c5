//! End-to-end acceptance checks. Runs as its own binary and prints one
//! PASS/FAIL line per criterion; the process fails if any criterion does.

// `require!` negates its condition so that NaN comparisons fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::dense::pi_normal_dense;
use common::*;
use shlr::coil::ssos;
use shlr::fft::{fft1d_centered, fft2d_centered, fft_axis, ifft1d_centered, ifft2d_centered};
use shlr::hankel::{hankel_adjoint, hankel_dims, hankel_lift, Pencil};
use shlr::lifting::{adjoint_lift_cols, adjoint_lift_rows, lift_cols, lift_rows};
use shlr::metrics::{mssim, rlne};
use shlr::normal::normal_apply;
use shlr::parammap::{
    fit_t2, recon_param_dataset, recon_param_dataset_with, t2_map, ParameterDataset, Schedule,
};
use shlr::rng::SplitMix64;
use shlr::sampling::{
    mask_gauss_cartesian, mask_pe_p_uniform, mask_random2d, mask_uniform, SamplingMask,
};
use shlr::solvers::{
    calibrate_from_kspace, shlr_param_reconstruct_slice, shlr_pi_reconstruct, svt, StopReason,
};
use shlr::spirit::{SpiritKernels, SpiritOperator};
use shlr::synth::{default_echo_times, gen_pi_phantom, gen_t2_phantom, PhantomSpec, T2PhantomSpec};
use shlr::{AdmmConfig, ComplexTensor, HankelConfig, PiMethod, RealImage};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! require {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn kernels(rng: &mut SplitMix64, ks: usize, j: usize) -> SpiritKernels {
    let mut w = rand_vec(rng, ks * ks * j * j);
    let h = ks / 2;
    for t in 0..j {
        w[((h * ks + h) * j + t) * j + t] = c(0.0, 0.0);
    }
    SpiritKernels::new(ks, j, w).unwrap()
}

/// Relative defect of one inner-product identity.
fn defect(lhs: f64, rhs: f64, scale: f64) -> f64 {
    (lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE)
}

fn adjoint_suite() -> Check {
    const TRIALS: usize = 100;
    const TOL: f64 = 1e-10;
    let start = Instant::now();
    let mut rng = SplitMix64::new(1001);
    let mut worst: Vec<(&str, f64)> = Vec::new();
    let mut record = |name: &'static str, d: f64| match worst.iter_mut().find(|(n, _)| *n == name) {
        Some(e) => e.1 = e.1.max(d),
        None => worst.push((name, d)),
    };
    for _ in 0..TRIALS {
        let n = rand_range(&mut rng, 1, 40);
        let p = rand_range(&mut rng, 1, n);
        let v = rand_vec(&mut rng, n);
        let y = rand_vec(&mut rng, n);
        let mat = rand_matrix(&mut rng, p, n - p + 1);
        let hv = hankel_lift(&v, p).unwrap();
        let lhs = mdot(&hv, &mat);
        let rhs = vdot(&v, &hankel_adjoint(&mat, n).unwrap());
        record("hankel", (lhs - rhs).norm() / (hv.norm() * mat.norm()));

        let w = naive_weights(&rand_vec(&mut rng, 2.min(n)), n);
        let wv: Vec<C> = w.iter().zip(&v).map(|(a, b)| a * b).collect();
        let wy: Vec<C> = w.iter().zip(&y).map(|(a, b)| a.conj() * b).collect();
        record(
            "weighting",
            (vdot(&wv, &y) - vdot(&v, &wy)).norm() / (vnorm(&wv) * vnorm(&y)),
        );

        let fv = fft1d_centered(&v).unwrap();
        let lhs = vdot(&fv, &y);
        let rhs = vdot(&v, &ifft1d_centered(&y).unwrap());
        record("fft1d", (lhs - rhs).norm() / (vnorm(&fv) * vnorm(&y)));

        let (m, nn, j) = (
            rand_range(&mut rng, 3, 10),
            rand_range(&mut rng, 3, 10),
            rand_range(&mut rng, 1, 3),
        );
        let x = rand_tensor(&mut rng, &[m, nn, j]);
        let z = rand_tensor(&mut rng, &[m, nn, j]);
        let fx = fft2d_centered(&x).unwrap();
        let rhs = x.dot(&ifft2d_centered(&z).unwrap());
        record("fft2d", (fx.dot(&z) - rhs).norm() / (fx.norm() * z.norm()));
        let axis = rand_range(&mut rng, 0, 2);
        let (mut fa, mut fz) = (x.clone(), z.clone());
        fft_axis(&mut fa, axis, false);
        fft_axis(&mut fz, axis, true);
        record(
            "fft_axis",
            (fa.dot(&z) - x.dot(&fz)).norm() / (fa.norm() * z.norm()),
        );

        for vc in [false, true] {
            let cfg = HankelConfig {
                virtual_coil: vc,
                ..Default::default()
            };
            let row = rand_range(&mut rng, 0, m - 1);
            let l = lift_rows(&x, row, &cfg).unwrap();
            let target = rand_matrix(&mut rng, l.nrows(), l.ncols());
            let back = adjoint_lift_rows(&target, row, (m, nn, j), &cfg).unwrap();
            record(
                if vc { "lift_rows(vc)" } else { "lift_rows" },
                defect(
                    mdot(&l, &target).re,
                    x.re_dot(&back),
                    l.norm() * target.norm(),
                ),
            );
            let col = rand_range(&mut rng, 0, nn - 1);
            let l = lift_cols(&x, col, &cfg).unwrap();
            let target = rand_matrix(&mut rng, l.nrows(), l.ncols());
            let back = adjoint_lift_cols(&target, col, (m, nn, j), &cfg).unwrap();
            record(
                if vc { "lift_cols(vc)" } else { "lift_cols" },
                defect(
                    mdot(&l, &target).re,
                    x.re_dot(&back),
                    l.norm() * target.norm(),
                ),
            );
        }

        let g = kernels(&mut rng, 3, j);
        let op = SpiritOperator::new(&g, m, nn).unwrap();
        let gx = op.apply(&x).unwrap();
        let rhs = x.dot(&op.apply_adjoint(&z).unwrap());
        record("spirit", (gx.dot(&z) - rhs).norm() / (gx.norm() * z.norm()));

        let mask = mask_random2d(m, nn, 0.5, 1, rng.next_u64()).unwrap();
        let cfg = HankelConfig {
            virtual_coil: rng.next_f64() < 0.5,
            ..Default::default()
        };
        let ax = normal_apply(&x, &mask, Some(&g), &cfg, 2.0, 1.5, 0.5).unwrap();
        let az = normal_apply(&z, &mask, Some(&g), &cfg, 2.0, 1.5, 0.5).unwrap();
        record(
            "normal_apply",
            (ax.dot(&z) - x.dot(&az)).norm() / (ax.norm() * z.norm()),
        );
    }
    let elapsed = start.elapsed();
    let max = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    let detail: Vec<String> = worst.iter().map(|(n, d)| format!("{n} {d:.1e}")).collect();
    require!(
        max < TOL,
        "worst relative defect {max:.2e}: {}",
        detail.join(", ")
    );
    require!(
        elapsed < Duration::from_secs(30),
        "took {:.1}s",
        elapsed.as_secs_f64()
    );
    Ok(format!(
        "{} pairs x {TRIALS} trials, worst defect {max:.1e}",
        worst.len()
    ))
}

fn svt_oracle() -> Check {
    let mut rng = SplitMix64::new(1002);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (r, q) = (rand_range(&mut rng, 1, 16), rand_range(&mut rng, 1, 32));
        let a = rand_matrix(&mut rng, r, q);
        let tau = oracle_singular_values(&a)[0] * rng.next_f64();
        worst = worst.max((svt(&a, tau) - oracle_svt(&a, tau)).norm() / a.norm());
    }
    require!(worst < 1e-12, "worst relative error {worst:.2e}");
    Ok(format!("200 matrices, worst relative error {worst:.1e}"))
}

fn dense_normal() -> Check {
    let mut rng = SplitMix64::new(1003);
    let (m, n, j) = (6, 6, 1);
    let cfg = HankelConfig {
        virtual_coil: true,
        pencil: Pencil::Fixed(3),
        ..Default::default()
    };
    let mask = mask_random2d(m, n, 0.4, 2, 3).unwrap();
    let g = kernels(&mut rng, 3, j);
    let (lam, lam1, beta) = (3.0, 2.0, 0.7);
    let dense = pi_normal_dense(
        m,
        n,
        j,
        mask.bits(),
        Some(&g),
        &cfg.filter_taps,
        3,
        3,
        true,
        lam,
        lam1,
        beta,
    );
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let x = rand_tensor(&mut rng, &[m, n, j]);
        let got = normal_apply(&x, &mask, Some(&g), &cfg, lam, lam1, beta).unwrap();
        let want = from_real(&(&dense * to_real(x.data())));
        worst = worst.max(rel_diff(got.data(), &want));
    }
    require!(worst < 1e-8, "relative error {worst:.2e}");
    Ok(format!(
        "6x6x1, p=3, VC and SPIRiT on, relative error {worst:.1e}"
    ))
}

fn memory_claim() -> Check {
    let d = hankel_dims(256, 256, 4, 23, true).map_err(|e| e.to_string())?;
    require!(
        (d.block_rows, d.block_cols) == (2116, 54756),
        "block dims {}x{}",
        d.block_rows,
        d.block_cols
    );
    require!(d.entry_ratio() < 1e-3, "ratio {:.2e}", d.entry_ratio());
    Ok(format!(
        "block {}x{}, separable {}x{} ({} entries), ratio {:.2e}",
        d.block_rows,
        d.block_cols,
        d.separable_rows,
        d.separable_cols,
        d.separable_entries(),
        d.entry_ratio()
    ))
}

fn param_kspace(images: &ComplexTensor) -> ComplexTensor {
    let mut k = images.clone();
    fft_axis(&mut k, 0, false);
    fft_axis(&mut k, 1, false);
    k
}

fn full_sampling() -> Check {
    let start = Instant::now();
    let (_, k) = gen_pi_phantom(&PhantomSpec::standard(32, 32, 2), 7).unwrap();
    let mask = SamplingMask::full(32, 32).unwrap();
    let g = calibrate_from_kspace(&k, &mask, 5, 1e-4).unwrap();
    let acfg = PiMethod::ShlrSv.configure(&AdmmConfig {
        lambda: 1e6,
        ..AdmmConfig::parallel_imaging()
    });
    let out = shlr_pi_reconstruct(&k, &mask, Some(&g), &HankelConfig::default(), &acfg).unwrap();
    let direct = ssos(&ifft2d_centered(&k).unwrap()).unwrap();
    let e_sv = rlne(&direct, &ssos(&out.x).unwrap()).unwrap();

    let (images, _) = gen_t2_phantom(&T2PhantomSpec::two_tissue(32, 32, 2), 3).unwrap();
    let tes = default_echo_times();
    let y = ParameterDataset::new(param_kspace(&images), tes.clone()).unwrap();
    let reference = ParameterDataset::new(images, tes).unwrap().ssos();
    let acfg = AdmmConfig {
        lambda: 1e6,
        enable_vc: true,
        ..AdmmConfig::parameter_imaging()
    };
    let rec = recon_param_dataset(
        &y,
        &SamplingMask::full(32, 15).unwrap(),
        &HankelConfig::default(),
        &acfg,
    )
    .unwrap();
    let len = reference.len();
    let e_vp = rlne(
        &RealImage::new(1, len, reference).unwrap(),
        &RealImage::new(1, len, rec.images.ssos()).unwrap(),
    )
    .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    require!(
        e_sv < 1e-3 && e_vp < 1e-3,
        "RLNE SHLR-SV {e_sv:.2e}, SHLR-VP {e_vp:.2e}"
    );
    require!(elapsed < 60.0, "took {elapsed:.1}s");
    Ok(format!("RLNE SHLR-SV {e_sv:.1e}, SHLR-VP {e_vp:.1e}"))
}

/// The 64×64×2 Gaussian-Cartesian problem; returns (truth SSOS, per-method
/// reconstructions SSOS).
fn pi_problem(phase: f64, methods: &[PiMethod]) -> (RealImage, Vec<RealImage>) {
    let spec = PhantomSpec {
        phase_smoothness: phase,
        ..PhantomSpec::standard(64, 64, 2)
    };
    let (truth, k) = gen_pi_phantom(&spec, 7).unwrap();
    let mask = mask_gauss_cartesian(64, 0.5, 8, 1).unwrap();
    let y = mask.broadcast_rows(64).unwrap().apply(&k).unwrap();
    let g = calibrate_from_kspace(&y, &mask, 5, 1e-4).unwrap();
    let base = AdmmConfig {
        lambda1: 1e3,
        ..AdmmConfig::parallel_imaging()
    };
    let recs = methods
        .iter()
        .map(|m| {
            let out = shlr_pi_reconstruct(
                &y,
                &mask,
                Some(&g),
                &HankelConfig::default(),
                &m.configure(&base),
            )
            .unwrap();
            ssos(&out.x).unwrap()
        })
        .collect();
    (ssos(&truth).unwrap(), recs)
}

fn pi_recovery() -> Check {
    let start = Instant::now();
    let (truth, recs) = pi_problem(
        PhantomSpec::standard(64, 64, 2).phase_smoothness,
        &[PiMethod::ShlrSv],
    );
    let e = rlne(&truth, &recs[0]).unwrap();
    let s = mssim(&truth, &recs[0]).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    require!(e < 0.05 && s > 0.98, "SHLR-SV RLNE {e:.4}, MSSIM {s:.4}");
    require!(elapsed < 300.0, "took {elapsed:.1}s");
    Ok(format!("SHLR-SV RLNE {e:.4}, MSSIM {s:.4}"))
}

fn variant_ordering() -> Check {
    let (truth, recs) = pi_problem(0.0, &PiMethod::ALL);
    let e: Vec<f64> = recs.iter().map(|r| rlne(&truth, r).unwrap()).collect();
    let (shlr, s, v, sv) = (e[0], e[1], e[2], e[3]);
    let detail = format!("SHLR {shlr:.4}, SHLR-S {s:.4}, SHLR-V {v:.4}, SHLR-SV {sv:.4}");
    require!(
        sv <= s && s <= shlr && v <= shlr,
        "ordering violated: {detail}"
    );
    Ok(detail)
}

fn parameter_imaging() -> Check {
    let start = Instant::now();
    let (m, n, j) = (16, 48, 2);
    let spec = T2PhantomSpec::two_tissue(m, n, j);
    let (images, t2_truth) = gen_t2_phantom(&spec, 3).unwrap();
    let l = spec.echo_times.len();
    let mask = mask_pe_p_uniform(n, l, 4, 8, true).unwrap();
    let mut y = param_kspace(&images);
    for (i, chunk) in y.data_mut().chunks_exact_mut(j).enumerate() {
        if !mask.bits()[i % (n * l)] {
            chunk.fill(c(0.0, 0.0));
        }
    }
    let ds = ParameterDataset::new(y, spec.echo_times.clone()).unwrap();
    let truth = ParameterDataset::new(images, spec.echo_times.clone()).unwrap();
    let acfg = AdmmConfig {
        enable_vc: true,
        ..AdmmConfig::parameter_imaging()
    };
    let rec = recon_param_dataset(&ds, &mask, &HankelConfig::default(), &acfg).unwrap();
    let e_img = rlne(
        &RealImage::new(m * n, l, truth.ssos()).unwrap(),
        &RealImage::new(m * n, l, rec.images.ssos()).unwrap(),
    )
    .unwrap();
    let map = t2_map(&rec.images, 0.1).unwrap();
    let e_t2 = map.rlne_valid(&t2_truth).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    require!(
        e_img < 0.05 && e_t2 < 0.05,
        "SHLR-VP image RLNE {e_img:.4}, T2 RLNE {e_t2:.4}"
    );
    require!(elapsed < 600.0, "took {elapsed:.1}s");
    Ok(format!(
        "SHLR-VP image RLNE {e_img:.4}, T2 RLNE {e_t2:.4} over {} valid pixels",
        map.valid_count()
    ))
}

fn grid_search(signal: &[f64], tes: &[f64]) -> f64 {
    let mut best = (f64::INFINITY, 0.0);
    for i in 1..=40_000 {
        let t2 = i as f64 * 0.01;
        let (mut se, mut ee, mut ss) = (0.0, 0.0, 0.0);
        for (s, t) in signal.iter().zip(tes) {
            let e = (-t / t2).exp();
            se += s * e;
            ee += e * e;
            ss += s * s;
        }
        // Residual with the optimal amplitude se/ee.
        let cost = ss - se * se / ee;
        if cost < best.0 {
            best = (cost, t2);
        }
    }
    best.1
}

fn t2_fit_oracle() -> Check {
    let tes = default_echo_times();
    let mut rng = SplitMix64::new(1009);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let t2 = rng.uniform(20.0, 250.0);
        let a = rng.uniform(200.0, 2000.0);
        let s: Vec<f64> = tes
            .iter()
            .map(|t| a * (-t / t2).exp() + 0.01 * a * rng.next_gaussian())
            .collect();
        let fit = fit_t2(&s, &tes).unwrap();
        require!(fit.valid, "fit rejected for T2 {t2:.2}");
        worst = worst.max((fit.t2 - grid_search(&s, &tes)).abs());
    }
    require!(worst < 0.5, "worst deviation {worst:.3} ms");
    Ok(format!(
        "1000 decays, worst deviation from grid search {worst:.4} ms"
    ))
}

fn determinism() -> Check {
    let (_, k) = gen_pi_phantom(&PhantomSpec::standard(32, 32, 2), 5).unwrap();
    let mask = mask_gauss_cartesian(32, 0.5, 6, 2).unwrap();
    let y = mask.broadcast_rows(32).unwrap().apply(&k).unwrap();
    let g = calibrate_from_kspace(&y, &mask, 5, 1e-4).unwrap();
    for method in PiMethod::ALL {
        let acfg = method.configure(&AdmmConfig {
            max_outer: 10,
            ..AdmmConfig::parallel_imaging()
        });
        let run =
            || shlr_pi_reconstruct(&y, &mask, Some(&g), &HankelConfig::default(), &acfg).unwrap();
        let (a, b) = (run(), run());
        require!(
            a.x == b.x && a.history == b.history,
            "{method} differs between runs"
        );
    }

    let (images, _) = gen_t2_phantom(&T2PhantomSpec::two_tissue(6, 24, 2), 3).unwrap();
    let ds = ParameterDataset::new(param_kspace(&images), default_echo_times()).unwrap();
    let pmask = mask_pe_p_uniform(24, 15, 4, 4, true).unwrap();
    for vc in [false, true] {
        let acfg = AdmmConfig {
            max_outer: 10,
            enable_vc: vc,
            ..AdmmConfig::parameter_imaging()
        };
        let run =
            |s| recon_param_dataset_with(&ds, &pmask, &HankelConfig::default(), &acfg, s).unwrap();
        let (a, b, c) = (
            run(Schedule::Parallel),
            run(Schedule::Parallel),
            run(Schedule::Serial),
        );
        require!(
            a.images.data() == b.images.data(),
            "parameter run (vc={vc}) differs between runs"
        );
        require!(
            a.images.data() == c.images.data(),
            "parallel and serial slices differ (vc={vc})"
        );
    }

    require!(
        mask_gauss_cartesian(256, 0.34, 22, 9).unwrap()
            == mask_gauss_cartesian(256, 0.34, 22, 9).unwrap(),
        "Gaussian mask"
    );
    require!(
        mask_random2d(64, 64, 0.18, 12, 9).unwrap() == mask_random2d(64, 64, 0.18, 12, 9).unwrap(),
        "2D mask"
    );
    require!(
        mask_uniform(64, 4, 8).unwrap() == mask_uniform(64, 4, 8).unwrap(),
        "uniform mask"
    );
    Ok("4 PI variants, SHLR-P/VP parallel and serial, 3 mask generators: bitwise identical".into())
}

fn check_stop(out: &shlr::AdmmOutcome, cap: usize, tol: f64) -> Result<(), String> {
    let n = out.iterations();
    require!(n <= cap, "{n} iterations exceed the cap {cap}");
    let changes: Vec<f64> = out.history.iter().map(|r| r.rel_change).collect();
    let early = changes.iter().position(|&v| v < tol);
    match out.stop {
        StopReason::Converged => require!(
            early == Some(n - 1),
            "converged flag without a final small change"
        ),
        StopReason::MaxIterations => require!(
            early.is_none() && n == cap,
            "ran {n} of {cap} iterations without converging"
        ),
    }
    Ok(())
}

fn stopping_rule() -> Check {
    let pi = AdmmConfig::parallel_imaging();
    let param = AdmmConfig::parameter_imaging();
    require!(
        pi.max_outer == 50 && param.max_outer == 100,
        "caps {} / {}",
        pi.max_outer,
        param.max_outer
    );
    require!(
        pi.tol == 1e-6 && param.tol == 1e-6,
        "tolerances {} / {}",
        pi.tol,
        param.tol
    );

    let (_, k) = gen_pi_phantom(&PhantomSpec::standard(32, 32, 2), 5).unwrap();
    let mask = mask_gauss_cartesian(32, 0.5, 6, 2).unwrap();
    let y = mask.broadcast_rows(32).unwrap().apply(&k).unwrap();
    let g = calibrate_from_kspace(&y, &mask, 5, 1e-4).unwrap();
    let mut stops = Vec::new();
    for method in PiMethod::ALL {
        let out = shlr_pi_reconstruct(
            &y,
            &mask,
            Some(&g),
            &HankelConfig::default(),
            &method.configure(&pi),
        )
        .unwrap();
        check_stop(&out, 50, 1e-6)?;
        stops.push(out.iterations());
    }
    let full = SamplingMask::full(32, 32).unwrap();
    let out = shlr_pi_reconstruct(
        &k,
        &full,
        None,
        &HankelConfig::default(),
        &PiMethod::Shlr.configure(&pi),
    )
    .unwrap();
    check_stop(&out, 50, 1e-6)?;
    require!(
        out.stop == StopReason::Converged,
        "fully sampled PI run did not stop early"
    );
    let early_pi = out.iterations();

    let (images, _) = gen_t2_phantom(&T2PhantomSpec::two_tissue(8, 24, 2), 3).unwrap();
    let ds = ParameterDataset::new(param_kspace(&images), default_echo_times()).unwrap();
    let pmask = mask_pe_p_uniform(24, 15, 4, 4, true).unwrap();
    let mut hybrid = ds.data().clone();
    fft_axis(&mut hybrid, 0, true);
    let slab = 24 * 15 * 2;
    let plane =
        ComplexTensor::new(vec![24, 15, 2], hybrid.data()[4 * slab..5 * slab].to_vec()).unwrap();
    let mut zf = plane.clone();
    for (i, chunk) in zf.data_mut().chunks_exact_mut(2).enumerate() {
        if !pmask.bits()[i] {
            chunk.fill(c(0.0, 0.0));
        }
    }
    for vc in [false, true] {
        let acfg = AdmmConfig {
            enable_vc: vc,
            ..param.clone()
        };
        let out =
            shlr_param_reconstruct_slice(&zf, &pmask, &HankelConfig::default(), &acfg).unwrap();
        check_stop(&out, 100, 1e-6)?;
        stops.push(out.iterations());
        let tight = AdmmConfig {
            tol: 1e-300,
            ..acfg
        };
        let out =
            shlr_param_reconstruct_slice(&zf, &pmask, &HankelConfig::default(), &tight).unwrap();
        check_stop(&out, 100, 1e-300)?;
        require!(
            out.iterations() == 100,
            "tight tolerance stopped after {}",
            out.iterations()
        );
    }
    Ok(format!(
        "PI variants stopped after {:?}, fully sampled PI after {early_pi}; SHLR-P/VP after {:?}, cap 100 reached exactly",
        &stops[..4],
        &stops[4..]
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("adjoint suite", adjoint_suite),
        ("SVT oracle", svt_oracle),
        ("normal-operator equivalence", dense_normal),
        ("block vs separable memory", memory_claim),
        ("full-sampling consistency", full_sampling),
        ("parallel-imaging recovery", pi_recovery),
        ("variant ordering", variant_ordering),
        ("parameter imaging", parameter_imaging),
        ("T2 fitting oracle", t2_fit_oracle),
        ("determinism", determinism),
        ("algorithm fidelity", stopping_rule),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
