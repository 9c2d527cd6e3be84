//! Numerical laboratory for operator-Lipschitz estimates on finite matrices.
//!
//! Double operator integrals of commuting Hermitian tuples are realized as
//! Schur multipliers in a joint eigenbasis; the weak-L1 quasi-norm is computed
//! in closed form from singular value profiles; homogeneous Fourier multipliers
//! act on matrix-valued signals sampled on uniform torus grids; and the
//! transference identity `S(I(V)) = I(T(V))` is evaluated exactly on
//! aliasing-free grids.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the type
//! aliases at the crate root fix `f64`, which is what the tolerances are sized
//! for.

// Guards are written as negated comparisons so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod doi;
pub mod error;
pub mod experiments;
pub mod functions;
pub mod io;
pub mod linalg;
pub mod norms;
pub mod rng;
mod scalar;
pub mod spectral;
pub mod torus;
pub mod transference;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix = linalg::CMatrix<f64>;
pub type Hermitian = spectral::HermitianMatrix<f64>;
pub type Tuple = spectral::CommutingTuple<f64>;
pub type Spectrum = spectral::JointSpectrum<f64>;
pub type DoiSymbol = doi::Symbol<f64>;
pub type Profile = norms::SingularValueProfile<f64>;
pub type C64 = num_complex::Complex<f64>;
pub type Signal = torus::TorusSignal<f64>;
pub type IntTuple = transference::IntegerTuple<f64>;
