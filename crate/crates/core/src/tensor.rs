//! Dense complex tensors and real magnitude images.
//!
//! Storage is row-major: the last dimension varies fastest. A multi-coil
//! image `M×N×J` therefore keeps the coils of one pixel adjacent.

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTensor {
    dims: Vec<usize>,
    data: Vec<Complex64>,
}

impl ComplexTensor {
    pub fn new(dims: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        check_dims(&dims)?;
        let expected = dims.iter().product::<usize>();
        ensure!(
            expected == data.len(),
            ShapeMismatch,
            "dims {dims:?} need {expected} values, got {}",
            data.len()
        );
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        let len = dims.iter().product();
        Ok(Self {
            dims: dims.to_vec(),
            data: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    /// Zero tensor with the same shape as `self`.
    pub fn zeros_like(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            data: vec![Complex64::new(0.0, 0.0); self.data.len()],
        }
    }

    pub fn from_real(dims: Vec<usize>, values: &[f64]) -> Result<Self> {
        Self::new(
            dims,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Same data, new shape with an equal element count.
    pub fn reshape(self, dims: Vec<usize>) -> Result<Self> {
        Self::new(dims, self.data)
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.dims.len());
        index.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| {
            debug_assert!(i < d);
            acc * d + i
        })
    }

    pub fn get(&self, index: &[usize]) -> Complex64 {
        self.data[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: Complex64) {
        let o = self.offset(index);
        self.data[o] = value;
    }

    /// Returns the three dimensions of a rank-3 tensor.
    pub fn dims3(&self) -> Result<(usize, usize, usize)> {
        match self.dims[..] {
            [a, b, c] => Ok((a, b, c)),
            _ => Err(Error::ShapeMismatch(format!(
                "expected a rank-3 tensor, got dims {:?}",
                self.dims
            ))),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Complex inner product `Σ conj(self)·other`.
    pub fn dot(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.dims, other.dims);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Real part of [`dot`](Self::dot): the inner product of the underlying
    /// real vector space, under which conjugating operators have adjoints.
    pub fn re_dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dims, other.dims);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// `self += alpha * other`
    pub fn axpy(&mut self, alpha: Complex64, other: &Self) {
        debug_assert_eq!(self.dims, other.dims);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: Complex64) {
        self.data.iter_mut().for_each(|z| *z *= alpha);
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    ensure!(
        !dims.is_empty(),
        InvalidArgument,
        "tensor needs at least one dimension"
    );
    ensure!(
        dims.iter().all(|&d| d >= 1),
        InvalidArgument,
        "all dimensions must be >= 1, got {dims:?}"
    );
    Ok(())
}

/// Nonnegative real image, row-major `rows × cols`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealImage {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealImage {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        ensure!(
            rows >= 1 && cols >= 1,
            InvalidArgument,
            "image dims must be >= 1"
        );
        ensure!(
            data.len() == rows * cols,
            ShapeMismatch,
            "{rows}x{cols} image needs {} values, got {}",
            rows * cols,
            data.len()
        );
        ensure!(
            data.iter().all(|&v| v >= 0.0),
            InvalidArgument,
            "image values must be nonnegative"
        );
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Stores the image as a real-valued `rows × cols` complex tensor.
    pub fn to_tensor(&self) -> ComplexTensor {
        ComplexTensor::from_real(vec![self.rows, self.cols], &self.data)
            .expect("image dims are valid")
    }
}
