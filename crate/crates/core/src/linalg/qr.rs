use num_complex::Complex;
use num_traits::Zero;

use super::CMatrix;
use crate::Real;

/// Orthonormalizes the columns of a square matrix by modified Gram-Schmidt,
/// applied twice for numerical orthogonality.
///
/// Equivalent to the Q factor of a QR decomposition with positive diagonal R,
/// so a complex Gaussian input yields a Haar-distributed unitary.
pub fn orthonormalize_columns<T: Real>(x: &CMatrix<T>) -> CMatrix<T> {
    let (m, n) = (x.rows(), x.cols());
    let mut q: Vec<Vec<Complex<T>>> = (0..n).map(|j| x.column(j)).collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let (done, rest) = q.split_at_mut(j);
                let proj = done[k].iter().zip(rest[0].iter()).fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * b);
                for (b, a) in rest[0].iter_mut().zip(done[k].iter()) {
                    *b = *b - *a * proj;
                }
            }
        }
        let norm = q[j].iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        if norm > T::zero() {
            for z in q[j].iter_mut() {
                *z = *z / norm;
            }
        }
    }
    CMatrix::from_fn(m, n, |i, j| q[j][i])
}
