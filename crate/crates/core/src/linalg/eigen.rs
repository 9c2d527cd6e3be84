use num_complex::Complex;
use num_traits::{Float, Zero};

use super::CMatrix;
use crate::error::{Error, Result};
use crate::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    /// Unitary whose columns are the eigenvectors.
    pub vectors: CMatrix<T>,
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first rephases column `q` so the `(p, q)` entry becomes real,
/// then applies the classical real Jacobi rotation. Only the Hermitian part of
/// the input is used.
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    if !a.is_square() {
        return Err(Error::DimMismatch(format!("eigenproblem for {}x{} matrix", a.rows(), a.cols())));
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = CMatrix::<T>::identity(n);
    let scale = m.frobenius_norm();
    let threshold = T::epsilon() * scale;

    let mut converged = n < 2 || scale.is_zero();
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        sweep += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        converged = m.off_diagonal_norm() <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence(format!("Jacobi eigensolver after {MAX_SWEEPS} sweeps")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| crate::scalar::cmp_real(&diag[i], &diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.select_columns(&order);
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi step annihilating `m[p][q]`; accumulates the rotation into `v`.
pub(crate) fn rotate<T: Real>(m: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r.is_zero() {
        return;
    }
    let n = m.rows();
    let phase = apq / r; // e^{i phi}
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (r + r);
    let t = if tau.is_zero() {
        T::one()
    } else {
        Float::signum(tau) / (Float::abs(tau) + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // W = D J with D = diag(.., e^{-i phi} at q, ..), J the real rotation.
    let dq = phase.conj();
    for i in 0..n {
        m[(i, q)] = m[(i, q)] * dq;
        v[(i, q)] = v[(i, q)] * dq;
    }
    for i in 0..n {
        m[(q, i)] = m[(q, i)] * phase;
    }
    for i in 0..n {
        let (xp, xq) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
        let (yp, yq) = (v[(i, p)], v[(i, q)]);
        v[(i, p)] = yp * c - yq * s;
        v[(i, q)] = yp * s + yq * c;
    }
    for j in 0..n {
        let (xp, xq) = (m[(p, j)], m[(q, j)]);
        m[(p, j)] = xp * c - xq * s;
        m[(q, j)] = xp * s + xq * c;
    }
    m[(p, q)] = Complex::zero();
    m[(q, p)] = Complex::zero();
    m[(p, p)] = Complex::new(m[(p, p)].re, T::zero());
    m[(q, q)] = Complex::new(m[(q, q)].re, T::zero());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn pauli_x_spectrum() {
        let x = CMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = hermitian_eigen(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reconstructs_random_hermitian() {
        let mut rng = SeededRng::new(7);
        for n in [1, 2, 5, 17] {
            let a = rng.hermitian_matrix::<f64>(n);
            let e = hermitian_eigen(&a).unwrap();
            let back = CMatrix::from_real_diag(&e.values).conjugate_back(&e.vectors).unwrap();
            assert!((&back - &a).frobenius_norm() <= 1e-12 * (1.0 + a.frobenius_norm()));
            let gram = e.vectors.adjoint().try_mul(&e.vectors).unwrap();
            assert!((&gram - &CMatrix::identity(n)).frobenius_norm() <= 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
