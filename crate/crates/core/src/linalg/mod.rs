//! Dense complex linear algebra sized for desk-scale problems (n up to a few
//! hundred): a row-major matrix type, cyclic Jacobi for Hermitian
//! eigenproblems, one-sided Jacobi for singular values, and Gram-Schmidt
//! orthonormalization.

mod eigen;
mod matrix;
mod qr;
mod svd;

pub use eigen::{hermitian_eigen, HermitianEigen};
pub use matrix::CMatrix;
pub use qr::orthonormalize_columns;
pub use svd::singular_values_desc;
