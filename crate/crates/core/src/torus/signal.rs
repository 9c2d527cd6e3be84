use num_complex::Complex;
use num_traits::Zero;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::linalg::{singular_values_desc, CMatrix};
use crate::norms::{schatten_norm, weak_l1, Exponent, SingularValueProfile};
use crate::Real;

/// Upper bound on grid points, guarding against accidental huge allocations.
const MAX_POINTS: usize = 1 << 24;
/// Lines transformed per FFT batch.
const FFT_BATCH: usize = 256;

/// Samples of an `n x n` matrix-valued function on an `N^D` torus grid,
/// row-major over axes (axis 0 slowest), each fiber row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusSignal<T> {
    torus_dim: usize,
    grid_size: usize,
    fiber_dim: usize,
    samples: Vec<Complex<T>>,
}

/// Frequency carried by DFT bin `b` on an axis of size `n`.
pub fn frequency_of_bin(b: usize, n: usize) -> i64 {
    if b <= n / 2 {
        b as i64
    } else {
        b as i64 - n as i64
    }
}

/// DFT bin holding frequency `k`, if `k` lies in the balanced range.
pub fn bin_of_frequency(k: i64, n: usize) -> Option<usize> {
    let n_i = n as i64;
    let lo = -((n_i + 1) / 2); // exclusive: -ceil(N/2)
    let hi = n_i / 2;
    if k > lo && k <= hi {
        Some(k.rem_euclid(n_i) as usize)
    } else {
        None
    }
}

impl<T: Real> TorusSignal<T> {
    pub fn zeros(torus_dim: usize, grid_size: usize, fiber_dim: usize) -> Result<Self> {
        let points = checked_points(torus_dim, grid_size)?;
        if fiber_dim == 0 {
            return Err(Error::Invalid("fiber dimension must be positive".into()));
        }
        Ok(Self { torus_dim, grid_size, fiber_dim, samples: vec![Complex::zero(); points * fiber_dim * fiber_dim] })
    }

    pub fn from_samples(torus_dim: usize, grid_size: usize, fiber_dim: usize, samples: Vec<Complex<T>>) -> Result<Self> {
        let points = checked_points(torus_dim, grid_size)?;
        if fiber_dim == 0 || samples.len() != points * fiber_dim * fiber_dim {
            return Err(Error::DimMismatch(format!(
                "{} samples for grid {grid_size}^{torus_dim} with fiber {fiber_dim}",
                samples.len()
            )));
        }
        Ok(Self { torus_dim, grid_size, fiber_dim, samples })
    }

    /// Samples `f` at every grid angle vector.
    pub fn from_fn(torus_dim: usize, grid_size: usize, fiber_dim: usize, f: impl Fn(&[T]) -> CMatrix<T>) -> Result<Self> {
        let mut out = Self::zeros(torus_dim, grid_size, fiber_dim)?;
        let step = T::TAU() / T::from_usize_lossy(grid_size);
        let mut idx = vec![0usize; torus_dim];
        let mut angles = vec![T::zero(); torus_dim];
        let f2 = fiber_dim * fiber_dim;
        for p in 0..out.num_points() {
            out.unravel(p, &mut idx);
            for (a, &m) in angles.iter_mut().zip(&idx) {
                *a = step * T::from_usize_lossy(m);
            }
            let w = f(&angles);
            if w.rows() != fiber_dim || w.cols() != fiber_dim {
                return Err(Error::DimMismatch("fiber function returned the wrong shape".into()));
            }
            out.samples[p * f2..(p + 1) * f2].copy_from_slice(w.as_slice());
        }
        Ok(out)
    }

    /// Trigonometric polynomial `sum_k W_k e_k` from its coefficients.
    pub fn from_terms(torus_dim: usize, grid_size: usize, fiber_dim: usize, terms: &[(Vec<i64>, CMatrix<T>)]) -> Result<Self> {
        let mut coeffs = Self::zeros(torus_dim, grid_size, fiber_dim)?;
        let f2 = fiber_dim * fiber_dim;
        for (k, w) in terms {
            if k.len() != torus_dim || w.rows() != fiber_dim || w.cols() != fiber_dim {
                return Err(Error::DimMismatch("term shape does not match the signal".into()));
            }
            let p = coeffs.point_of_frequency(k).ok_or(Error::AliasRisk {
                grid: grid_size,
                max_freq: k.iter().map(|x| x.abs()).max().unwrap_or(0),
            })?;
            for (dst, src) in coeffs.samples[p * f2..(p + 1) * f2].iter_mut().zip(w.as_slice()) {
                *dst = *dst + src;
            }
        }
        Ok(coeffs.inverse_dft_of_coefficients())
    }

    /// The character `e_k` as a scalar (`1 x 1` fiber) signal.
    pub fn character(torus_dim: usize, grid_size: usize, k: &[i64]) -> Result<Self> {
        Self::from_terms(torus_dim, grid_size, 1, &[(k.to_vec(), CMatrix::identity(1))])
    }

    pub fn torus_dim(&self) -> usize {
        self.torus_dim
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn num_points(&self) -> usize {
        self.grid_size.pow(self.torus_dim as u32)
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.samples
    }

    /// Measure of one grid cell, `(2 pi / N)^D`.
    pub fn cell_measure(&self) -> T {
        (T::TAU() / T::from_usize_lossy(self.grid_size)).powi(self.torus_dim as i32)
    }

    pub fn fiber(&self, p: usize) -> CMatrix<T> {
        let f2 = self.fiber_dim * self.fiber_dim;
        CMatrix::from_vec(self.fiber_dim, self.fiber_dim, self.samples[p * f2..(p + 1) * f2].to_vec())
            .expect("fiber slice has n^2 entries")
    }

    pub fn set_fiber(&mut self, p: usize, w: &CMatrix<T>) {
        let f2 = self.fiber_dim * self.fiber_dim;
        self.samples[p * f2..(p + 1) * f2].copy_from_slice(w.as_slice());
    }

    /// Multi-index of grid point `p`.
    pub fn unravel(&self, mut p: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = p % self.grid_size;
            p /= self.grid_size;
        }
    }

    /// Frequency vector of coefficient slot `p`.
    pub fn frequency_of_point(&self, p: usize) -> Vec<i64> {
        let mut idx = vec![0; self.torus_dim];
        self.unravel(p, &mut idx);
        idx.iter().map(|&b| frequency_of_bin(b, self.grid_size)).collect()
    }

    pub fn point_of_frequency(&self, k: &[i64]) -> Option<usize> {
        k.iter().try_fold(0usize, |acc, &x| Some(acc * self.grid_size + bin_of_frequency(x, self.grid_size)?))
    }

    /// Maps every fiber through `f`.
    pub fn map_fibers(&self, f: impl Fn(&CMatrix<T>) -> Result<CMatrix<T>>) -> Result<Self> {
        let mut out = self.clone();
        for p in 0..self.num_points() {
            out.set_fiber(p, &f(&self.fiber(p))?);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        Ok(Self { samples, ..*self })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect();
        Ok(Self { samples, ..*self })
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self { samples: self.samples.iter().map(|z| z * c).collect(), ..*self }
    }

    /// Coefficient tensor: slot `p` holds `W_k` for `k = frequency_of_point(p)`.
    pub fn dft(&self) -> Self {
        self.clone().into_dft()
    }

    /// [`dft`](Self::dft) reusing the sample buffer.
    pub fn into_dft(mut self) -> Self {
        self.fft_in_place(FftDirection::Forward);
        let norm = T::one() / T::from_usize_lossy(self.num_points());
        self.samples.iter_mut().for_each(|z| *z = *z * norm);
        self
    }

    /// Inverse of [`dft`](Self::dft): treats `self` as a coefficient tensor.
    pub fn inverse_dft_of_coefficients(&self) -> Self {
        self.clone().into_inverse_dft()
    }

    /// [`inverse_dft_of_coefficients`](Self::inverse_dft_of_coefficients) reusing the buffer.
    pub fn into_inverse_dft(mut self) -> Self {
        self.fft_in_place(FftDirection::Inverse);
        self
    }

    /// `||self - other||_2` without materializing the difference.
    pub fn l2_distance(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        let sum = self.samples.iter().zip(&other.samples).fold(T::zero(), |a, (x, y)| a + (x - y).norm_sqr());
        Ok((sum * self.cell_measure()).sqrt())
    }

    /// `L2` norm with the product Haar measure of total mass `(2 pi)^D`.
    pub fn l2_norm(&self) -> T {
        (self.samples.iter().fold(T::zero(), |a, z| a + z.norm_sqr()) * self.cell_measure()).sqrt()
    }

    /// All fiber singular values pooled across the grid, each weighted by the cell measure.
    pub fn profile(&self) -> SingularValueProfile<T> {
        let w = self.cell_measure();
        let mut pairs = Vec::with_capacity(self.num_points() * self.fiber_dim);
        for p in 0..self.num_points() {
            let s = if self.fiber_dim == 1 {
                vec![self.samples[p].norm()]
            } else {
                singular_values_desc(&self.fiber(p))
            };
            pairs.extend(s.into_iter().map(|v| (v, w)));
        }
        SingularValueProfile::from_pairs(pairs).expect("singular values are finite and nonnegative")
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.torus_dim, self.grid_size, self.fiber_dim) != (other.torus_dim, other.grid_size, other.fiber_dim) {
            return Err(Error::DimMismatch("torus signals of different shape".into()));
        }
        Ok(())
    }

    fn fft_in_place(&mut self, direction: FftDirection) {
        let n = self.grid_size;
        let f2 = self.fiber_dim * self.fiber_dim;
        let fft = FftPlanner::<T>::new().plan_fft(n, direction);
        let mut scratch = vec![Complex::zero(); fft.get_inplace_scratch_len()];
        for axis in 0..self.torus_dim {
            let inner = n.pow((self.torus_dim - 1 - axis) as u32) * f2; // stride of this axis
            let outer = n.pow(axis as u32);
            let mut buf = vec![Complex::zero(); FFT_BATCH.min(inner) * n];
            for o in 0..outer {
                let base = o * n * inner;
                let mut start = 0;
                while start < inner {
                    let lines = FFT_BATCH.min(inner - start);
                    for j in 0..n {
                        let row = &self.samples[base + j * inner + start..][..lines];
                        for (l, z) in row.iter().enumerate() {
                            buf[l * n + j] = *z;
                        }
                    }
                    fft.process_with_scratch(&mut buf[..lines * n], &mut scratch);
                    for j in 0..n {
                        let row = &mut self.samples[base + j * inner + start..][..lines];
                        for (l, z) in row.iter_mut().enumerate() {
                            *z = buf[l * n + j];
                        }
                    }
                    start += lines;
                }
            }
        }
    }
}

fn checked_points(torus_dim: usize, grid_size: usize) -> Result<usize> {
    if torus_dim == 0 || grid_size == 0 {
        return Err(Error::Invalid("torus dimension and grid size must be positive".into()));
    }
    (0..torus_dim)
        .try_fold(1usize, |acc, _| acc.checked_mul(grid_size))
        .filter(|&p| p <= MAX_POINTS)
        .ok_or_else(|| Error::Invalid(format!("grid {grid_size}^{torus_dim} exceeds {MAX_POINTS} points")))
}

/// `L1`, `L2` and weak-`L1` norms of a sampled signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalNorms<T> {
    pub l1: T,
    pub l2: T,
    pub weak_l1: T,
}

pub fn signal_norms<T: Real>(w: &TorusSignal<T>) -> SignalNorms<T> {
    let p = w.profile();
    SignalNorms {
        l1: schatten_norm(&p, Exponent::Finite(T::one())).expect("q = 1 is valid"),
        l2: schatten_norm(&p, Exponent::Finite(T::lit(2.0))).expect("q = 2 is valid"),
        weak_l1: weak_l1(&p),
    }
}
