//! The subcommands. Each has a key schema and a runner; every run writes
//! `manifest.txt` (the resolved config, replayable with `--config`) into
//! its output directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use shlr::coil::ssos;
use shlr::cplx::{read_cplx, write_cplx, Precision};
use shlr::fft::fft_axis;
use shlr::hankel::hankel_dims;
use shlr::metrics::{mssim, rlne, MetricReport, CSV_HEADER};
use shlr::parammap::{recon_param_dataset, t2_map_with, ParameterDataset, T2FitOptions, T2Map};
use shlr::sampling::{
    apply_partial_fourier, mask_gauss_cartesian, mask_pe_p_uniform, mask_random2d, mask_uniform,
};
use shlr::solvers::{calibrate_from_kspace, shlr_pi_reconstruct, XSolver};
use shlr::synth::{gen_pi_phantom, gen_t2_phantom, PhantomSpec, T2PhantomSpec};
use shlr::{AdmmConfig, ComplexTensor, HankelConfig, Pencil, PiMethod, RealImage, SamplingMask};

use crate::config::{input, output, value, Key, RunConfig};
use crate::error::CliError;

type Outcome = Result<(), CliError>;

pub struct Subcommand {
    pub name: &'static str,
    pub about: &'static str,
    pub schema: &'static [Key],
    pub run: fn(&RunConfig) -> Outcome,
}

pub const SUBCOMMANDS: &[Subcommand] = &[
    Subcommand {
        name: "mask",
        about: "Generate a sampling mask",
        schema: MASK,
        run: cmd_mask,
    },
    Subcommand {
        name: "phantom",
        about: "Generate a synthetic phantom and its k-space",
        schema: PHANTOM,
        run: cmd_phantom,
    },
    Subcommand {
        name: "recon-pi",
        about: "Parallel-imaging reconstruction (SHLR, SHLR-S, SHLR-V, SHLR-SV)",
        schema: RECON_PI,
        run: cmd_recon_pi,
    },
    Subcommand {
        name: "recon-param",
        about: "Parameter-imaging reconstruction (SHLR-P, SHLR-VP) and T2 map",
        schema: RECON_PARAM,
        run: cmd_recon_param,
    },
    Subcommand {
        name: "t2fit",
        about: "Fit a T2 map to echo images",
        schema: T2FIT,
        run: cmd_t2fit,
    },
    Subcommand {
        name: "metrics",
        about: "RLNE and MSSIM of a reconstruction against a reference",
        schema: METRICS,
        run: cmd_metrics,
    },
    Subcommand {
        name: "bench",
        about: "Time the parallel-imaging variants over problem sizes",
        schema: BENCH,
        run: cmd_bench,
    },
];

const MASK: &[Key] = &[
    value("kind", "gauss", "uniform | gauss | random2d | pe-p"),
    value("n", "256", "phase-encoding lines (columns)"),
    value("rows", "0", "rows of a random2d mask (0: same as n)"),
    value("rate", "0.34", "sampling rate (gauss, random2d)"),
    value("r", "4", "reduction factor (uniform, pe-p)"),
    value(
        "acs",
        "22",
        "fully sampled centre lines (centre block side for random2d)",
    ),
    value(
        "pf",
        "1",
        "partial-Fourier fraction in (0.5, 1]; 1 disables",
    ),
    value("echoes", "15", "echo count (pe-p)"),
    value(
        "interleave",
        "true",
        "shift the pe-p pattern by one line per echo",
    ),
    value("seed", "1", "generator seed"),
    output("output directory"),
];

const PHANTOM: &[Key] = &[
    value("kind", "pi", "pi | t2"),
    value("rows", "64", "readout size M"),
    value("cols", "64", "phase-encoding size N"),
    value("coils", "2", "coil count J"),
    value(
        "phase_smoothness",
        "",
        "max phase gradient, rad/pixel [default: 0.05 for pi, 0 for t2]",
    ),
    value(
        "noise_sigma",
        "0",
        "complex k-space noise standard deviation (pi)",
    ),
    value("seed", "1", "generator seed"),
    output("output directory"),
];

macro_rules! admm_keys {
    ($max_outer:literal) => {
        [
            value("lambda", "1e4", "data-fidelity weight"),
            value("beta", "1", "ADMM penalty"),
            value("tau", "1", "multiplier step"),
            value("max_outer", $max_outer, "outer iteration cap"),
            value("tol", "1e-6", "relative-change stopping tolerance"),
            value("cg_max", "15", "inner solver iteration cap"),
            value("cg_tol", "1e-8", "inner solver relative residual"),
            value("multiplier_init", "1", "initial multiplier value"),
            value("x_solver", "auto", "auto (closed form when possible) | cg"),
            value(
                "normalize",
                "true",
                "scale data so the zero-filled image peaks at 1",
            ),
            value("pencil", "auto", "Hankel pencil: auto or an integer"),
            value("filter_taps", "1,-1", "sparsifying filter taps"),
            value(
                "enable_vc",
                "auto",
                "virtual coils: auto (from method) | true | false",
            ),
        ]
    };
}

const fn concat<const A: usize, const B: usize, const C: usize>(
    a: [Key; A],
    b: [Key; B],
) -> [Key; C] {
    let mut out = [a[0]; C];
    let mut i = 0;
    while i < A {
        out[i] = a[i];
        i += 1;
    }
    while i < C {
        out[i] = b[i - A];
        i += 1;
    }
    out
}

const RECON_PI: &[Key] = &concat::<11, 13, 24>(
    [
        input("kspace", "undersampled k-space, M×N×J .cplx"),
        input("mask", "mask file, M×N or 1×N"),
        value("method", "shlr-sv", "shlr | shlr-s | shlr-v | shlr-sv"),
        input(
            "reference",
            "optional reference (M×N×J or M×N) for a metrics row",
        ),
        value("lambda1", "1e2", "self-consistency weight"),
        value(
            "enable_spirit",
            "auto",
            "self-consistency term: auto (from method) | true | false",
        ),
        value("kernel_size", "5", "self-consistency kernel size"),
        value(
            "tikhonov",
            "1e-4",
            "calibration damping relative to the largest singular value",
        ),
        value(
            "dataset",
            "",
            "dataset label for the metrics row [default: k-space file stem]",
        ),
        value(
            "mask_label",
            "",
            "mask label for the metrics row [default: mask file stem]",
        ),
        output("output directory"),
    ],
    admm_keys!("50"),
);

const RECON_PARAM: &[Key] = &concat::<12, 13, 25>(
    [
        input(
            "kspace",
            "undersampled k-space, M×N×L×J .cplx (readout × phase encoding × echo × coil)",
        ),
        input("te", "echo times, one value in ms per line"),
        input("mask", "N×L phase-encoding/echo mask"),
        value("method", "shlr-vp", "shlr-p | shlr-vp"),
        value("lambda2", "1", "echo-direction weight"),
        value(
            "param_pencil",
            "auto",
            "echo-direction pencil: auto or an integer",
        ),
        value("t2", "true", "fit a T2 map to the reconstruction"),
        value(
            "roi_threshold",
            "0.1",
            "fit pixels whose first echo is at least this fraction of the maximum",
        ),
        value("t2_max", "400", "largest accepted T2, ms"),
        input("reference", "optional reference echo images, M×N×L×J"),
        input("t2_reference", "optional reference T2 map, M×N"),
        output("output directory"),
    ],
    admm_keys!("100"),
);

const T2FIT: &[Key] = &[
    input("images", "echo images, M×N×L×J .cplx"),
    input("te", "echo times, one value in ms per line"),
    value(
        "roi_threshold",
        "0.1",
        "fit pixels whose first echo is at least this fraction of the maximum",
    ),
    value("t2_max", "400", "largest accepted T2, ms"),
    output("output directory"),
];

const METRICS: &[Key] = &[
    input(
        "reference",
        "reference: M×N image, M×N×J coils or M×N×L×J echoes",
    ),
    input("recon", "reconstruction with the same layout"),
    value(
        "dataset",
        "",
        "dataset label [default: reference file stem]",
    ),
    value("method", "", "method label"),
    value("mask_label", "", "mask label"),
    value("runtime_s", "0", "runtime to record"),
    value("iters", "0", "iteration count to record"),
    output("output directory"),
];

const BENCH: &[Key] = &[
    value("sizes", "32,64", "square image sizes"),
    value("methods", "shlr,shlr-s,shlr-v,shlr-sv", "methods to time"),
    value("coils", "2", "coil count"),
    value("rate", "0.5", "Gaussian Cartesian sampling rate"),
    value("acs", "8", "ACS lines"),
    value("max_outer", "50", "outer iteration cap"),
    value("lambda1", "1e2", "self-consistency weight"),
    value("seed", "1", "phantom and mask seed"),
    output("output directory"),
];

// ---------------------------------------------------------------------------
// Shared helpers

fn out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.required("out")?;
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    write_text(&dir.join("manifest.txt"), &cfg.manifest())?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Outcome {
    fs::write(path, text)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load(cfg: &RunConfig, key: &str) -> Result<ComplexTensor, CliError> {
    Ok(read_cplx(cfg.required(key)?)?)
}

fn save(t: &ComplexTensor, path: PathBuf) -> Outcome {
    Ok(write_cplx(t, path, Precision::F64)?)
}

fn stem(path: Option<PathBuf>) -> String {
    path.and_then(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_default()
}

fn label(cfg: &RunConfig, key: &str, fallback: &str) -> String {
    let s = cfg.str(key);
    if s.is_empty() {
        stem(cfg.path(fallback))
    } else {
        s.to_string()
    }
}

fn read_echo_times(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::MissingFile(format!("{}: {e}", path.display())))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.parse().map_err(|e| {
                CliError::Usage(format!("{}: bad echo time {l:?}: {e}", path.display()))
            })
        })
        .collect()
}

fn pencil(cfg: &RunConfig, key: &str) -> Result<Pencil, CliError> {
    match cfg.str(key) {
        "auto" => Ok(Pencil::Auto),
        _ => Ok(Pencil::Fixed(cfg.get(key)?)),
    }
}

/// `auto`, `true` or `false`.
fn switch(cfg: &RunConfig, key: &str, auto: bool) -> Result<bool, CliError> {
    match cfg.str(key) {
        "auto" => Ok(auto),
        _ => cfg.get(key),
    }
}

fn hankel_config(cfg: &RunConfig) -> Result<HankelConfig, CliError> {
    let taps: Vec<f64> = cfg.list("filter_taps")?;
    let hcfg = HankelConfig {
        pencil: pencil(cfg, "pencil")?,
        filter_taps: taps.into_iter().map(|t| Complex64::new(t, 0.0)).collect(),
        virtual_coil: false,
    };
    hcfg.validate()?;
    Ok(hcfg)
}

fn admm_config(cfg: &RunConfig, base: AdmmConfig) -> Result<AdmmConfig, CliError> {
    let x_solver = match cfg.str("x_solver") {
        "auto" => XSolver::Auto,
        "cg" => XSolver::Cg,
        other => {
            return Err(CliError::Usage(format!(
                "x_solver must be auto or cg, got {other:?}"
            )))
        }
    };
    Ok(AdmmConfig {
        lambda: cfg.get("lambda")?,
        beta: cfg.get("beta")?,
        tau: cfg.get("tau")?,
        max_outer: cfg.get("max_outer")?,
        tol: cfg.get("tol")?,
        cg_max: cfg.get("cg_max")?,
        cg_tol: cfg.get("cg_tol")?,
        multiplier_init: cfg.get("multiplier_init")?,
        normalize: cfg.get("normalize")?,
        x_solver,
        ..base
    })
}

/// RLNE and MSSIM of coil-combined images. Rank-4 inputs are compared
/// echo by echo; MSSIM is the echo average.
fn compare(reference: &ComplexTensor, rec: &ComplexTensor) -> Result<(f64, f64), CliError> {
    if reference.dims() != rec.dims() {
        return Err(CliError::Dimensions(format!(
            "reference {:?} vs reconstruction {:?}",
            reference.dims(),
            rec.dims()
        )));
    }
    let d = reference.dims();
    let images = |t: &ComplexTensor| -> Result<Vec<RealImage>, CliError> {
        Ok(match d.len() {
            2 => vec![RealImage::new(
                d[0],
                d[1],
                t.data().iter().map(|z| z.norm()).collect(),
            )?],
            3 => vec![ssos(t)?],
            4 => {
                let ds = ParameterDataset::new(t.clone(), (1..=d[2]).map(|e| e as f64).collect())?;
                (0..d[2])
                    .map(|e| ds.echo_ssos(e))
                    .collect::<shlr::Result<_>>()?
            }
            _ => {
                return Err(CliError::Dimensions(format!(
                    "cannot compare rank-{} tensors",
                    d.len()
                )))
            }
        })
    };
    let (a, b) = (images(reference)?, images(rec)?);
    let flat = |v: &[RealImage]| {
        let data: Vec<f64> = v.iter().flat_map(|i| i.data().iter().copied()).collect();
        RealImage::new(1, data.len(), data)
    };
    let e = rlne(&flat(&a)?, &flat(&b)?)?;
    let s = a
        .iter()
        .zip(&b)
        .map(|(x, y)| mssim(x, y))
        .sum::<shlr::Result<f64>>()?
        / a.len() as f64;
    Ok((e, s))
}

fn write_metrics(dir: &Path, rows: &[String]) -> Outcome {
    let mut text = format!("{CSV_HEADER}\n");
    for r in rows {
        println!("{r}");
        text.push_str(r);
        text.push('\n');
    }
    write_text(&dir.join("metrics.csv"), &text)
}

fn write_t2(dir: &Path, map: &T2Map) -> Outcome {
    save(&map.to_tensor(), dir.join("t2.cplx"))?;
    Ok(map.valid_mask()?.write(dir.join("t2_valid.cplx"))?)
}

// ---------------------------------------------------------------------------
// Subcommands

fn cmd_mask(cfg: &RunConfig) -> Outcome {
    let n: usize = cfg.get("n")?;
    let acs: usize = cfg.get("acs")?;
    let seed: u64 = cfg.get("seed")?;
    let mask = match cfg.str("kind") {
        "uniform" => mask_uniform(n, cfg.get("r")?, acs)?,
        "gauss" => mask_gauss_cartesian(n, cfg.get("rate")?, acs, seed)?,
        "random2d" => {
            let rows: usize = cfg.get("rows")?;
            mask_random2d(
                if rows == 0 { n } else { rows },
                n,
                cfg.get("rate")?,
                acs,
                seed,
            )?
        }
        "pe-p" => mask_pe_p_uniform(
            n,
            cfg.get("echoes")?,
            cfg.get("r")?,
            acs,
            cfg.get("interleave")?,
        )?,
        other => return Err(CliError::Usage(format!("unknown mask kind {other:?}"))),
    };
    let pf: f64 = cfg.get("pf")?;
    let mask = if pf < 1.0 {
        apply_partial_fourier(&mask, pf)?
    } else {
        mask
    };
    let dir = out_dir(cfg)?;
    mask.write(dir.join("mask.cplx"))?;
    println!(
        "{}x{} mask, {} sampled ({:.4})",
        mask.rows(),
        mask.cols(),
        mask.sampled(),
        mask.sampling_rate()
    );
    Ok(())
}

fn cmd_phantom(cfg: &RunConfig) -> Outcome {
    let (m, n, j): (usize, usize, usize) = (cfg.get("rows")?, cfg.get("cols")?, cfg.get("coils")?);
    let seed: u64 = cfg.get("seed")?;
    let phase = |default: f64| -> Result<f64, CliError> {
        if cfg.str("phase_smoothness").is_empty() {
            Ok(default)
        } else {
            cfg.get("phase_smoothness")
        }
    };
    match cfg.str("kind") {
        "pi" => {
            let spec = PhantomSpec {
                phase_smoothness: phase(PhantomSpec::standard(m, n, j).phase_smoothness)?,
                noise_sigma: cfg.get("noise_sigma")?,
                ..PhantomSpec::standard(m, n, j)
            };
            let (truth, k) = gen_pi_phantom(&spec, seed)?;
            let dir = out_dir(cfg)?;
            save(&truth, dir.join("truth.cplx"))?;
            save(&k, dir.join("kspace.cplx"))?;
            write_text(&dir.join("phantom.txt"), &spec.manifest(seed))
        }
        "t2" => {
            let base = T2PhantomSpec::two_tissue(m, n, j);
            let spec = T2PhantomSpec {
                phase_smoothness: phase(base.phase_smoothness)?,
                ..base
            };
            let (images, t2) = gen_t2_phantom(&spec, seed)?;
            let mut k = images.clone();
            fft_axis(&mut k, 0, false);
            fft_axis(&mut k, 1, false);
            let dir = out_dir(cfg)?;
            save(&images, dir.join("truth.cplx"))?;
            save(&k, dir.join("kspace.cplx"))?;
            save(&t2.to_tensor(), dir.join("t2_truth.cplx"))?;
            let tes: String = spec
                .echo_times
                .iter()
                .map(|t| format!("{}\n", (t * 1e9).round() / 1e9))
                .collect();
            write_text(&dir.join("te.txt"), &tes)?;
            write_text(&dir.join("phantom.txt"), &spec.manifest(seed))
        }
        other => Err(CliError::Usage(format!("unknown phantom kind {other:?}"))),
    }
}

fn cmd_recon_pi(cfg: &RunConfig) -> Outcome {
    let method: PiMethod = cfg.get("method")?;
    let y = load(cfg, "kspace")?;
    let mask = SamplingMask::read(cfg.required("mask")?)?;
    let reference = cfg.path("reference").map(read_cplx).transpose()?;
    let hcfg = hankel_config(cfg)?;
    let mut acfg = admm_config(cfg, method.configure(&AdmmConfig::parallel_imaging()))?;
    acfg.lambda1 = cfg.get("lambda1")?;
    acfg.enable_spirit = switch(cfg, "enable_spirit", method.uses_spirit())?;
    acfg.enable_vc = switch(cfg, "enable_vc", method.uses_virtual_coil())?;
    acfg.validate()?;
    let (m, n, _) = y.dims3()?;
    shlr::normal::mask_flags(&mask, m, n)?;
    let dir = out_dir(cfg)?;

    let start = Instant::now();
    let kernels = if acfg.enable_spirit {
        Some(calibrate_from_kspace(
            &y,
            &mask,
            cfg.get("kernel_size")?,
            cfg.get("tikhonov")?,
        )?)
    } else {
        None
    };
    let out = shlr_pi_reconstruct(&y, &mask, kernels.as_ref(), &hcfg, &acfg)?;
    let runtime = start.elapsed().as_secs_f64();

    save(&out.x, dir.join("recon.cplx"))?;
    save(&ssos(&out.x)?.to_tensor(), dir.join("ssos.cplx"))?;
    write_text(&dir.join("iterations.log"), &out.log())?;
    println!(
        "{method}: {} iterations ({:?}) in {runtime:.2}s",
        out.iterations(),
        out.stop
    );
    if let Some(r) = reference {
        let r = if r.ndim() == 2 {
            r
        } else {
            ssos(&r)?.to_tensor()
        };
        let (e, s) = compare(&r, &ssos(&out.x)?.to_tensor())?;
        let row = MetricReport {
            rlne: e,
            mssim: s,
            runtime_seconds: runtime,
            iterations: out.iterations(),
        }
        .csv_row(
            &label(cfg, "dataset", "kspace"),
            &method.to_string(),
            &label(cfg, "mask_label", "mask"),
        );
        write_metrics(&dir, &[row])?;
    }
    Ok(())
}

fn t2_options(cfg: &RunConfig) -> Result<T2FitOptions, CliError> {
    Ok(T2FitOptions {
        t2_max: cfg.get("t2_max")?,
        ..T2FitOptions::default()
    })
}

fn cmd_recon_param(cfg: &RunConfig) -> Outcome {
    let vc_default = match cfg.str("method").to_ascii_lowercase().as_str() {
        "shlr-p" => false,
        "shlr-vp" => true,
        other => {
            return Err(CliError::Usage(format!(
                "method must be shlr-p or shlr-vp, got {other:?}"
            )))
        }
    };
    let y = load(cfg, "kspace")?;
    let tes = read_echo_times(&cfg.required("te")?)?;
    let mask = SamplingMask::read(cfg.required("mask")?)?;
    let reference = cfg.path("reference").map(read_cplx).transpose()?;
    let t2_reference = cfg.path("t2_reference").map(read_cplx).transpose()?;
    let y = ParameterDataset::new(y, tes)?;
    let hcfg = hankel_config(cfg)?;
    let mut acfg = admm_config(cfg, AdmmConfig::parameter_imaging())?;
    acfg.lambda2 = cfg.get("lambda2")?;
    acfg.param_pencil = pencil(cfg, "param_pencil")?;
    acfg.enable_vc = switch(cfg, "enable_vc", vc_default)?;
    acfg.validate()?;
    let (_, n, l, _) = y.dims();
    if mask.dims() != (n, l) {
        return Err(CliError::Dimensions(format!(
            "mask {:?} vs phase-encoding/echo plane ({n}, {l})",
            mask.dims()
        )));
    }
    let dir = out_dir(cfg)?;
    let method = if acfg.enable_vc { "SHLR-VP" } else { "SHLR-P" };

    let start = Instant::now();
    let rec = recon_param_dataset(&y, &mask, &hcfg, &acfg)?;
    let runtime = start.elapsed().as_secs_f64();
    let iters: usize = rec.histories.iter().map(Vec::len).max().unwrap_or(0);

    save(rec.images.data(), dir.join("recon.cplx"))?;
    let (m, n, l, _) = rec.images.dims();
    let ssos = ComplexTensor::from_real(vec![m, n, l], &rec.images.ssos())?;
    save(&ssos, dir.join("ssos.cplx"))?;
    let mut log = String::new();
    for (slice, h) in rec.histories.iter().enumerate() {
        for r in h {
            let _ = writeln!(log, "slice={slice} {r}");
        }
    }
    write_text(&dir.join("iterations.log"), &log)?;
    println!("{method}: {m} readout positions, at most {iters} iterations, {runtime:.2}s");

    let map = if cfg.get("t2")? {
        let map = t2_map_with(&rec.images, cfg.get("roi_threshold")?, &t2_options(cfg)?)?;
        write_t2(&dir, &map)?;
        Some(map)
    } else {
        None
    };
    let dataset = stem(cfg.path("kspace"));
    let mut rows = Vec::new();
    if let Some(r) = reference {
        let (e, s) = compare(&r, rec.images.data())?;
        rows.push(
            MetricReport {
                rlne: e,
                mssim: s,
                runtime_seconds: runtime,
                iterations: iters,
            }
            .csv_row(&dataset, method, &stem(cfg.path("mask"))),
        );
    }
    if let (Some(t), Some(map)) = (t2_reference, map.as_ref()) {
        let d = t.dims();
        if !(d.len() == 2 || (d.len() == 3 && d[2] == 1)) || (d[0], d[1]) != (map.rows, map.cols) {
            return Err(CliError::Dimensions(format!(
                "T2 reference {d:?} vs map {}x{}",
                map.rows, map.cols
            )));
        }
        let truth = RealImage::new(d[0], d[1], t.data().iter().map(|z| z.re).collect())?;
        let fitted = RealImage::new(map.rows, map.cols, map.t2.clone())?;
        let report = MetricReport {
            rlne: map.rlne_valid(&truth)?,
            mssim: mssim(&truth, &fitted)?,
            runtime_seconds: runtime,
            iterations: iters,
        };
        rows.push(report.csv_row(&format!("{dataset}-t2"), method, &stem(cfg.path("mask"))));
    }
    if !rows.is_empty() {
        write_metrics(&dir, &rows)?;
    }
    Ok(())
}

fn cmd_t2fit(cfg: &RunConfig) -> Outcome {
    let images = load(cfg, "images")?;
    let tes = read_echo_times(&cfg.required("te")?)?;
    let ds = ParameterDataset::new(images, tes)?;
    let map = t2_map_with(&ds, cfg.get("roi_threshold")?, &t2_options(cfg)?)?;
    let dir = out_dir(cfg)?;
    write_t2(&dir, &map)?;
    println!(
        "{} of {} pixels fitted",
        map.valid_count(),
        map.rows * map.cols
    );
    Ok(())
}

fn cmd_metrics(cfg: &RunConfig) -> Outcome {
    let reference = load(cfg, "reference")?;
    let rec = load(cfg, "recon")?;
    let (e, s) = compare(&reference, &rec)?;
    let dir = out_dir(cfg)?;
    let row = MetricReport {
        rlne: e,
        mssim: s,
        runtime_seconds: cfg.get("runtime_s")?,
        iterations: cfg.get("iters")?,
    }
    .csv_row(
        &label(cfg, "dataset", "reference"),
        cfg.str("method"),
        cfg.str("mask_label"),
    );
    write_metrics(&dir, &[row])
}

pub const BENCH_HEADER: &str = "size,method,iters,wall_seconds,peak_lifted_entries";

fn cmd_bench(cfg: &RunConfig) -> Outcome {
    let sizes: Vec<usize> = cfg.list("sizes")?;
    let methods: Vec<PiMethod> = cfg.list("methods")?;
    let coils: usize = cfg.get("coils")?;
    let seed: u64 = cfg.get("seed")?;
    let base = AdmmConfig {
        max_outer: cfg.get("max_outer")?,
        lambda1: cfg.get("lambda1")?,
        ..AdmmConfig::parallel_imaging()
    };
    let dir = out_dir(cfg)?;
    let mut csv = format!("{BENCH_HEADER}\n");
    for &size in &sizes {
        let (_, k) = gen_pi_phantom(&PhantomSpec::standard(size, size, coils), seed)?;
        let mask = mask_gauss_cartesian(size, cfg.get("rate")?, cfg.get("acs")?, seed)?;
        let y = mask.broadcast_rows(size)?.apply(&k)?;
        let p = Pencil::Auto.resolve(size)?;
        for &method in &methods {
            let acfg = method.configure(&base);
            let start = Instant::now();
            let kernels = if method.uses_spirit() {
                Some(calibrate_from_kspace(&y, &mask, 5, 1e-4)?)
            } else {
                None
            };
            let out =
                shlr_pi_reconstruct(&y, &mask, kernels.as_ref(), &HankelConfig::default(), &acfg)?;
            let wall = start.elapsed().as_secs_f64();
            let entries =
                hankel_dims(size, size, coils, p, method.uses_virtual_coil())?.separable_entries();
            let row = format!("{size},{method},{},{wall:.6},{entries}", out.iterations());
            println!("{row}");
            csv.push_str(&row);
            csv.push('\n');
        }
    }
    write_text(&dir.join("bench.csv"), &csv)?;
    let log: String = sizes
        .iter()
        .map(|s| format!("size={s} methods={}\n", methods.len()))
        .collect();
    write_text(&dir.join("iterations.log"), &log)
}
