use num_complex::Complex;
use num_traits::{Float, Zero};

use super::CMatrix;
use crate::Real;

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
///
/// Columns are orthogonalized pairwise; the singular values are the final
/// column norms. Wide matrices are handled through their adjoint.
pub fn singular_values_desc<T: Real>(x: &CMatrix<T>) -> Vec<T> {
    let work = if x.cols() > x.rows() { x.adjoint() } else { x.clone() };
    let (m, n) = (work.rows(), work.cols());
    if m == 0 || n == 0 {
        return Vec::new();
    }
    // Column-major copy: columns are the working vectors.
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| work.column(j)).collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut alpha = T::zero();
                    let mut beta = T::zero();
                    let mut gamma = Complex::<T>::zero();
                    for (a, b) in cp.iter().zip(cq) {
                        alpha = alpha + a.norm_sqr();
                        beta = beta + b.norm_sqr();
                        gamma = gamma + a.conj() * b;
                    }
                    (alpha, beta, gamma)
                };
                let g = gamma.norm();
                if g.is_zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (g + g);
                let t = if zeta.is_zero() {
                    T::one()
                } else {
                    Float::signum(zeta) / (Float::abs(zeta) + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                // Rephase column q so that <c_p, c_q> is real, then rotate.
                let back = phase.conj();
                let (left, right) = cols.split_at_mut(q);
                let (cp, cq) = (&mut left[p], &mut right[0]);
                for (a, b) in cp.iter_mut().zip(cq.iter_mut()) {
                    let bq = *b * back;
                    let ap = *a;
                    *a = ap * c - bq * s;
                    *b = ap * s + bq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut values: Vec<T> =
        cols.iter().map(|c| c.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()).collect();
    values.sort_by(|a, b| crate::scalar::cmp_real(b, a));
    values
}
