use num_complex::Complex;
use num_traits::{FromPrimitive, Num};

use super::TorusSignal;
use crate::Real;

/// Multiplies the coefficient of every `e_k` by `m(k)`; matrix fibers are
/// only scaled.
pub fn fourier_multiplier_apply<T: Real>(m: impl Fn(&[i64]) -> Complex<T>, w: &TorusSignal<T>) -> TorusSignal<T> {
    let mut coeffs = w.dft();
    let f2 = w.fiber_dim() * w.fiber_dim();
    for p in 0..coeffs.num_points() {
        let factor = m(&coeffs.frequency_of_point(p));
        for z in &mut coeffs.samples_mut()[p * f2..(p + 1) * f2] {
            *z = *z * factor;
        }
    }
    coeffs.inverse_dft_of_coefficients()
}

/// Fejér weight `prod_j max(0, (n + 1 - |l_j|) / (n + 1))`, in any number
/// type (exact rationals included).
pub fn fejer_weight<W: Num + FromPrimitive + Clone>(l: &[i64], n: u64) -> W {
    let denom = W::from_u64(n + 1).expect("n + 1 representable");
    l.iter().fold(W::one(), |acc, &lj| {
        let count = (n as i64 + 1 - lj.abs()).max(0);
        acc * (W::from_i64(count).expect("count representable") / denom.clone())
    })
}

/// The Fejér mean `A_n W`: the average of the rectangular partial sums
/// `S_k W` over `0 <= k <= (n, ..., n)`, in closed form.
pub fn fejer<T: Real>(w: &TorusSignal<T>, n: u64) -> TorusSignal<T> {
    fourier_multiplier_apply(|l| Complex::new(fejer_weight::<T>(l, n), T::zero()), w)
}

/// Rectangular partial sum `S_k W`: keeps frequencies with `|l_j| <= k_j`.
pub fn partial_sum<T: Real>(w: &TorusSignal<T>, k: &[u64]) -> TorusSignal<T> {
    fourier_multiplier_apply(
        |l| {
            let keep = l.iter().zip(k).all(|(&lj, &kj)| lj.unsigned_abs() <= kj);
            if keep {
                Complex::new(T::one(), T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            }
        },
        w,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;
    use crate::torus::signal_norms;

    #[test]
    fn multiplier_on_characters() {
        let g = crate::torus::HomogeneousSymbol::new(1, 0).unwrap();
        let apply = |w: &TorusSignal<f64>| fourier_multiplier_apply(|k| Complex::new(g.eval_lattice(k), 0.0), w);
        let e11 = TorusSignal::<f64>::character(2, 8, &[1, 1]).unwrap();
        assert!(apply(&e11).try_sub(&e11).unwrap().l2_norm() < 1e-13);
        let e10 = TorusSignal::<f64>::character(2, 8, &[1, 0]).unwrap();
        assert!(apply(&e10).l2_norm() < 1e-13);
        let w0 = TorusSignal::<f64>::from_terms(2, 8, 2, &[(vec![0, 0], CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]))]).unwrap();
        assert!(apply(&w0).l2_norm() < 1e-13);
    }

    #[test]
    fn fejer_on_monomial_and_constant() {
        let e = TorusSignal::<f64>::character(2, 16, &[2, -1]).unwrap();
        for n in [2u64, 3, 7] {
            let want = (1.0 - 2.0 / (n as f64 + 1.0)) * (1.0 - 1.0 / (n as f64 + 1.0));
            let got = fejer(&e, n);
            assert!(got.try_sub(&e.scale(Complex::new(want, 0.0))).unwrap().l2_norm() < 1e-12);
        }
        let c = TorusSignal::<f64>::from_terms(1, 8, 1, &[(vec![0], CMatrix::identity(1).scale(3.0))]).unwrap();
        for n in 0..5 {
            assert!(fejer(&c, n).try_sub(&c).unwrap().l2_norm() < 1e-13);
        }
        // n below the degree kills the monomial.
        assert!(signal_norms(&fejer(&e, 1)).l1 < 1e-12);
    }
}
