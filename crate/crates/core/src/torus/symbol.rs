
use crate::error::{Error, Result};
use crate::Real;

/// Smooth `[0, 1] -> R` equal to `u` on `[1/2, 1]` and at least `1/3` below:
/// `u + exp(1 - 1/(1 - (2u)^2)) / 3` for `u < 1/2`. The bump term vanishes to
/// every order at `u = 1/2`.
pub fn smoothing_eval<T: Real>(u: T) -> Result<T> {
    if !(u >= T::zero() && u <= T::one()) {
        return Err(Error::DomainError(u.as_f64()));
    }
    let half = T::lit(0.5);
    if u >= half {
        return Ok(u);
    }
    let two_u = u + u;
    let gap = T::one() - two_u * two_u;
    let bump = (T::one() - T::one() / gap).exp() / T::lit(3.0);
    Ok(u + bump)
}

/// The degree-0 homogeneous symbol
/// `g(t) = t_{k0} t_{d+1} / smoothing(t_1^2 + ... + t_d^2)` on the unit sphere
/// of `R^{d+1}`, extended by `g(t) = g(t / |t|)` and `g(0) = 0`.
///
/// `k0` is zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HomogeneousSymbol {
    d: usize,
    k0: usize,
}

impl HomogeneousSymbol {
    pub fn new(d: usize, k0: usize) -> Result<Self> {
        if d == 0 || k0 >= d {
            return Err(Error::Invalid(format!("symbol needs 0 <= k0 < d (got d = {d}, k0 = {k0})")));
        }
        Ok(Self { d, k0 })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k0(&self) -> usize {
        self.k0
    }

    pub fn eval<T: Real>(&self, t: &[T]) -> T {
        symbol_eval(self, t)
    }

    pub fn eval_lattice<T: Real>(&self, k: &[i64]) -> T {
        let t: Vec<T> = k.iter().map(|&x| T::from_i64_lossy(x)).collect();
        symbol_eval(self, &t)
    }
}

pub fn symbol_eval<T: Real>(g: &HomogeneousSymbol, t: &[T]) -> T {
    assert_eq!(t.len(), g.d + 1, "symbol of dimension {} evaluated at a point of R^{}", g.d + 1, t.len());
    let norm = t.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
    if norm.is_zero() {
        return T::zero();
    }
    let horizontal = t[..g.d].iter().fold(T::zero(), |acc, &x| acc + (x / norm) * (x / norm)).min(T::one()).max(T::zero());
    let denom = smoothing_eval(horizontal).expect("clamped into [0, 1]");
    (t[g.k0] / norm) * (t[g.d] / norm) / denom
}
