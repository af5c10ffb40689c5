//! Synthetic multi-coil phantoms: smooth coil maps, bounded-gradient phase,
//! piecewise-constant anatomy and mono-exponential echo trains.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{ensure, Result};
use crate::fft::fft2d_centered;
use crate::rng::SplitMix64;
use crate::tensor::{ComplexTensor, RealImage};

/// Number of smooth lobes the coil maps are mixed from.
pub const SENSITIVITY_BASIS: usize = 4;

/// Painted regions, in pixel coordinates (row, column).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    /// Half-open box `[r0, r1) × [c0, c1)`.
    Rectangle {
        r0: usize,
        c0: usize,
        r1: usize,
        c1: usize,
    },
    /// Axis-aligned ellipse with centre `(cr, cc)` and semi-axes `(ar, ac)`.
    Ellipse { cr: f64, cc: f64, ar: f64, ac: f64 },
}

impl Shape {
    pub fn contains(&self, r: usize, c: usize) -> bool {
        match *self {
            Shape::Rectangle { r0, c0, r1, c1 } => (r0..r1).contains(&r) && (c0..c1).contains(&c),
            Shape::Ellipse { cr, cc, ar, ac } => {
                let dr = (r as f64 - cr) / ar;
                let dc = (c as f64 - cc) / ac;
                dr * dr + dc * dc <= 1.0
            }
        }
    }

    fn describe(&self) -> String {
        match *self {
            Shape::Rectangle { r0, c0, r1, c1 } => format!("rect:{r0}:{c0}:{r1}:{c1}"),
            Shape::Ellipse { cr, cc, ar, ac } => format!("ellipse:{cr}:{cc}:{ar}:{ac}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhantomSpec {
    pub rows: usize,
    pub cols: usize,
    pub coils: usize,
    /// Painted in order; later shapes overwrite earlier ones.
    pub shapes: Vec<(Shape, f64)>,
    /// Largest phase gradient, radians per pixel.
    pub phase_smoothness: f64,
    /// Standard deviation of the complex k-space noise, `E|n|² = σ²`.
    pub noise_sigma: f64,
}

impl PhantomSpec {
    /// Nested ellipses and boxes scaled to an `rows × cols` grid.
    pub fn standard(rows: usize, cols: usize, coils: usize) -> Self {
        let (m, n) = (rows as f64, cols as f64);
        let frac = |f: f64, len: usize| ((f * len as f64).round() as usize).min(len);
        Self {
            rows,
            cols,
            coils,
            shapes: vec![
                (
                    Shape::Ellipse {
                        cr: m / 2.0,
                        cc: n / 2.0,
                        ar: 0.42 * m,
                        ac: 0.36 * n,
                    },
                    1.0,
                ),
                (
                    Shape::Ellipse {
                        cr: 0.38 * m,
                        cc: 0.4 * n,
                        ar: 0.12 * m,
                        ac: 0.08 * n,
                    },
                    0.4,
                ),
                (
                    Shape::Rectangle {
                        r0: frac(0.55, rows),
                        c0: frac(0.52, cols),
                        r1: frac(0.72, rows),
                        c1: frac(0.64, cols),
                    },
                    0.7,
                ),
                (
                    Shape::Ellipse {
                        cr: 0.62 * m,
                        cc: 0.36 * n,
                        ar: 0.06 * m,
                        ac: 0.06 * n,
                    },
                    0.2,
                ),
            ],
            phase_smoothness: 0.05,
            noise_sigma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.rows >= 1 && self.cols >= 1 && self.coils >= 1,
            InvalidArgument,
            "phantom dims must be >= 1"
        );
        ensure!(
            !self.shapes.is_empty(),
            InvalidArgument,
            "phantom needs at least one shape"
        );
        ensure!(
            self.shapes.iter().all(|(_, v)| *v >= 0.0 && v.is_finite()),
            InvalidArgument,
            "shape intensities must be finite and >= 0"
        );
        ensure!(
            self.phase_smoothness >= 0.0,
            InvalidArgument,
            "phase_smoothness must be >= 0"
        );
        ensure!(
            self.noise_sigma >= 0.0,
            InvalidArgument,
            "noise_sigma must be >= 0"
        );
        Ok(())
    }

    /// `key=value` description of every field.
    pub fn manifest(&self, seed: u64) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "rows={}", self.rows);
        let _ = writeln!(s, "cols={}", self.cols);
        let _ = writeln!(s, "coils={}", self.coils);
        let _ = writeln!(s, "phase_smoothness={}", self.phase_smoothness);
        let _ = writeln!(s, "noise_sigma={}", self.noise_sigma);
        let _ = writeln!(s, "seed={seed}");
        for (i, (shape, v)) in self.shapes.iter().enumerate() {
            let _ = writeln!(s, "shape{i}={}@{v}", shape.describe());
        }
        s
    }
}

/// Piecewise-constant magnitude: shapes painted in order over zero.
pub fn paint(rows: usize, cols: usize, shapes: &[(Shape, f64)]) -> Vec<f64> {
    let mut img = vec![0.0; rows * cols];
    for (shape, v) in shapes {
        for r in 0..rows {
            for c in 0..cols {
                if shape.contains(r, c) {
                    img[r * cols + c] = *v;
                }
            }
        }
    }
    img
}

/// Smooth complex coil maps with `Σ_j |s_j|² = 1` at every pixel, mixed
/// from [`SENSITIVITY_BASIS`] Gaussian lobes.
pub fn gen_sensitivities(rows: usize, cols: usize, coils: usize) -> Result<ComplexTensor> {
    ensure!(
        rows >= 1 && cols >= 1 && coils >= 1,
        InvalidArgument,
        "dims must be >= 1"
    );
    let (m, n) = (rows as f64, cols as f64);
    let width = 0.6 * m.max(n);
    let centres = [(0.2, 0.2), (0.2, 0.8), (0.8, 0.2), (0.8, 0.8)];
    let lobe = |k: usize, r: usize, c: usize| {
        let (fr, fc) = centres[k];
        let dr = (r as f64 - fr * m) / width;
        let dc = (c as f64 - fc * n) / width;
        let phase = 0.6 * (k as f64 + 1.0) * (dr - 0.5 * dc);
        Complex64::from_polar((-(dr * dr + dc * dc)).exp(), phase)
    };
    let mix = |k: usize, j: usize| {
        let theta = 2.0 * PI * j as f64 / coils as f64;
        let phi = PI / 4.0 + PI / 2.0 * k as f64;
        Complex64::from_polar(
            (1.5 * (theta - phi).cos()).exp(),
            0.4 * (k * (j + 1)) as f64,
        )
    };
    let mut out = ComplexTensor::zeros(&[rows, cols, coils])?;
    for r in 0..rows {
        for c in 0..cols {
            let b: Vec<Complex64> = (0..SENSITIVITY_BASIS).map(|k| lobe(k, r, c)).collect();
            let s: Vec<Complex64> = (0..coils)
                .map(|j| (0..SENSITIVITY_BASIS).map(|k| b[k] * mix(k, j)).sum())
                .collect();
            let norm = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for (j, z) in s.into_iter().enumerate() {
                out.set(&[r, c, j], z / norm);
            }
        }
    }
    Ok(out)
}

/// Quadratic phase map scaled so its largest analytic gradient component is
/// `max_gradient` radians per pixel.
pub fn smooth_phase(rows: usize, cols: usize, max_gradient: f64, rng: &mut SplitMix64) -> Vec<f64> {
    let coef: Vec<f64> = (0..5).map(|_| rng.uniform(-1.0, 1.0)).collect();
    if max_gradient == 0.0 {
        return vec![0.0; rows * cols];
    }
    // Normalised coordinates in [-1, 1]; d/dpixel = (2/len) d/dx.
    let sr = 2.0 / rows.max(2) as f64;
    let sc = 2.0 / cols.max(2) as f64;
    let xy = |r: usize, c: usize| (r as f64 * sr - 1.0, c as f64 * sc - 1.0);
    let poly = |x: f64, y: f64| {
        coef[0] * x + coef[1] * y + coef[2] * x * x + coef[3] * x * y + coef[4] * y * y
    };
    let mut g_max: f64 = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            let (x, y) = xy(r, c);
            let gx = (coef[0] + 2.0 * coef[2] * x + coef[3] * y) * sr;
            let gy = (coef[1] + coef[3] * x + 2.0 * coef[4] * y) * sc;
            g_max = g_max.max(gx.abs()).max(gy.abs());
        }
    }
    let scale = if g_max > 0.0 {
        max_gradient / g_max
    } else {
        0.0
    };
    (0..rows * cols)
        .map(|i| {
            let (x, y) = xy(i / cols, i % cols);
            scale * poly(x, y)
        })
        .collect()
}

fn add_noise(k: &mut ComplexTensor, sigma: f64, rng: &mut SplitMix64) {
    if sigma == 0.0 {
        return;
    }
    let s = sigma / 2f64.sqrt();
    for z in k.data_mut() {
        *z += Complex64::new(s * rng.next_gaussian(), s * rng.next_gaussian());
    }
}

/// Multi-coil truth images and their (optionally noisy) k-space.
pub fn gen_pi_phantom(spec: &PhantomSpec, seed: u64) -> Result<(ComplexTensor, ComplexTensor)> {
    spec.validate()?;
    let (m, n, j) = (spec.rows, spec.cols, spec.coils);
    let mut rng = SplitMix64::new(seed);
    let mag = paint(m, n, &spec.shapes);
    let phase = smooth_phase(m, n, spec.phase_smoothness, &mut rng);
    let sens = gen_sensitivities(m, n, j)?;
    let mut truth = ComplexTensor::zeros(&[m, n, j])?;
    for p in 0..m * n {
        let v = Complex64::from_polar(mag[p], phase[p]);
        for q in 0..j {
            truth.data_mut()[p * j + q] = v * sens.data()[p * j + q];
        }
    }
    let mut k = fft2d_centered(&truth)?;
    add_noise(&mut k, spec.noise_sigma, &mut rng);
    Ok((truth, k))
}

/// Echo times 8.8, 17.6, …, 132 ms.
pub fn default_echo_times() -> Vec<f64> {
    (1..=15).map(|i| 8.8 * i as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct T2Region {
    pub shape: Shape,
    pub amplitude: f64,
    /// Milliseconds.
    pub t2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct T2PhantomSpec {
    pub rows: usize,
    pub cols: usize,
    pub coils: usize,
    /// Milliseconds, positive and increasing.
    pub echo_times: Vec<f64>,
    /// Painted in order; later regions overwrite earlier ones.
    pub regions: Vec<T2Region>,
    pub phase_smoothness: f64,
}

impl T2PhantomSpec {
    /// Two tissues, T2 = 50 ms and 120 ms, over the default echo train.
    pub fn two_tissue(rows: usize, cols: usize, coils: usize) -> Self {
        let (m, n) = (rows as f64, cols as f64);
        Self {
            rows,
            cols,
            coils,
            echo_times: default_echo_times(),
            regions: vec![
                T2Region {
                    shape: Shape::Ellipse {
                        cr: m / 2.0,
                        cc: n / 2.0,
                        ar: 0.42 * m,
                        ac: 0.38 * n,
                    },
                    amplitude: 1000.0,
                    t2: 50.0,
                },
                T2Region {
                    shape: Shape::Ellipse {
                        cr: 0.45 * m,
                        cc: 0.55 * n,
                        ar: 0.18 * m,
                        ac: 0.16 * n,
                    },
                    amplitude: 800.0,
                    t2: 120.0,
                },
            ],
            phase_smoothness: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.rows >= 1 && self.cols >= 1 && self.coils >= 1,
            InvalidArgument,
            "phantom dims must be >= 1"
        );
        ensure!(
            !self.echo_times.is_empty(),
            InvalidArgument,
            "need at least one echo time"
        );
        ensure!(
            self.echo_times[0] > 0.0 && self.echo_times.windows(2).all(|w| w[1] > w[0]),
            InvalidArgument,
            "echo times must be positive and strictly increasing"
        );
        ensure!(
            self.regions
                .iter()
                .all(|r| r.t2 > 0.0 && r.amplitude >= 0.0),
            InvalidArgument,
            "regions need T2 > 0 and amplitude >= 0"
        );
        ensure!(
            self.phase_smoothness >= 0.0,
            InvalidArgument,
            "phase_smoothness must be >= 0"
        );
        Ok(())
    }

    pub fn manifest(&self, seed: u64) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "rows={}", self.rows);
        let _ = writeln!(s, "cols={}", self.cols);
        let _ = writeln!(s, "coils={}", self.coils);
        let tes: Vec<String> = self.echo_times.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(s, "echo_times={}", tes.join(","));
        let _ = writeln!(s, "phase_smoothness={}", self.phase_smoothness);
        let _ = writeln!(s, "seed={seed}");
        for (i, r) in self.regions.iter().enumerate() {
            let _ = writeln!(
                s,
                "region{i}={}@{}@{}",
                r.shape.describe(),
                r.amplitude,
                r.t2
            );
        }
        s
    }
}

/// Echo images `M×N×L×J` (readout × phase encoding × echo × coil) and the
/// ground-truth T2 map (0 outside every region).
pub fn gen_t2_phantom(spec: &T2PhantomSpec, seed: u64) -> Result<(ComplexTensor, RealImage)> {
    spec.validate()?;
    let (m, n, j) = (spec.rows, spec.cols, spec.coils);
    let l = spec.echo_times.len();
    let mut amp = vec![0.0; m * n];
    let mut t2 = vec![0.0; m * n];
    for reg in &spec.regions {
        for p in 0..m * n {
            if reg.shape.contains(p / n, p % n) {
                amp[p] = reg.amplitude;
                t2[p] = reg.t2;
            }
        }
    }
    let mut rng = SplitMix64::new(seed);
    let phase = smooth_phase(m, n, spec.phase_smoothness, &mut rng);
    let sens = gen_sensitivities(m, n, j)?;
    let mut truth = ComplexTensor::zeros(&[m, n, l, j])?;
    let data = truth.data_mut();
    for p in 0..m * n {
        if amp[p] == 0.0 {
            continue;
        }
        for (e, te) in spec.echo_times.iter().enumerate() {
            let v = Complex64::from_polar(amp[p] * (-te / t2[p]).exp(), phase[p]);
            for q in 0..j {
                data[(p * l + e) * j + q] = v * sens.data()[p * j + q];
            }
        }
    }
    Ok((truth, RealImage::new(m, n, t2)?))
}
