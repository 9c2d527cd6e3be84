//! Deterministic randomness.
//!
//! Every random draw in the crate flows through [`SeededRng`], a ChaCha8 stream
//! cipher generator keyed by a 64-bit seed (expanded with the PCG32 scheme of
//! `SeedableRng::seed_from_u64`) and a 64-bit stream id. Trial `i` of an
//! experiment uses stream `i`, so trials are independent of scheduling order.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;
use crate::Real;

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.inner.random::<f64>()
    }

    /// Uniform integer in `[lo, hi]` inclusive.
    pub fn integer(&mut self, lo: i64, hi: i64) -> i64 {
        self.inner.random_range(lo..=hi)
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.inner.random_range(0..len)
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.random()
    }

    /// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2).
    pub fn complex_normal<T: Real>(&mut self) -> Complex<T> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex::new(T::lit(s * self.normal()), T::lit(s * self.normal()))
    }

    pub fn gaussian_matrix<T: Real>(&mut self, rows: usize, cols: usize) -> CMatrix<T> {
        CMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    /// GUE-type Hermitian matrix `(G + G*) / 2`.
    pub fn hermitian_matrix<T: Real>(&mut self, n: usize) -> CMatrix<T> {
        let g = self.gaussian_matrix::<T>(n, n);
        (&g + &g.adjoint()).scale(T::lit(0.5))
    }
}
