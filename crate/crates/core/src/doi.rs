//! Double operator integrals of commuting tuples, realized as Schur
//! multipliers in the joint eigenbasis:
//! `(U* T_xi(V) U)_{ij} = xi(lambda_i, lambda_j) (U* V U)_{ij}`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::spectral::{apply_function, CommutingTuple, HermitianMatrix, JointSpectrum};
use crate::Real;

type SymbolFn<T> = dyn Fn(&[T], &[T]) -> Complex<T> + Send + Sync;

/// A bounded function `xi(lambda, mu)` on `R^d x R^d`.
#[derive(Clone)]
pub struct Symbol<T> {
    d: usize,
    eval: Arc<SymbolFn<T>>,
    symmetric: bool,
}

impl<T> fmt::Debug for Symbol<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol").field("d", &self.d).field("symmetric", &self.symmetric).finish_non_exhaustive()
    }
}

impl<T: Real> Symbol<T> {
    /// A symbol with no symmetry claim.
    pub fn new(d: usize, eval: impl Fn(&[T], &[T]) -> Complex<T> + Send + Sync + 'static) -> Self {
        Self { d, eval: Arc::new(eval), symmetric: false }
    }

    /// A symbol claimed to satisfy `xi(lambda, mu) = conj(xi(mu, lambda))`.
    /// The claim is spot-checked on a fixed lattice sample.
    pub fn new_symmetric(d: usize, eval: impl Fn(&[T], &[T]) -> Complex<T> + Send + Sync + 'static) -> Result<Self> {
        let s = Self { d, eval: Arc::new(eval), symmetric: true };
        if s.spot_check_symmetry() {
            Ok(s)
        } else {
            Err(Error::AsymmetricSymbol)
        }
    }

    pub fn constant(d: usize, c: Complex<T>) -> Self {
        Self { d, eval: Arc::new(move |_, _| c), symmetric: c.im.is_zero() }
    }

    /// Pointwise product `xi1 * xi2`.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        if a.d != b.d {
            return Err(Error::DimMismatch(format!("symbols of dimension {} and {}", a.d, b.d)));
        }
        let (fa, fb) = (a.eval.clone(), b.eval.clone());
        Ok(Self { d: a.d, eval: Arc::new(move |l, m| fa(l, m) * fb(l, m)), symmetric: a.symmetric && b.symmetric })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    #[inline]
    pub fn eval(&self, lambda: &[T], mu: &[T]) -> Complex<T> {
        (self.eval)(lambda, mu)
    }

    /// Checks conjugate symmetry on pairs drawn from `{-2, -1/2, 0, 1, 3/2}^d`
    /// (first 64 points), within `1e-12`.
    pub fn spot_check_symmetry(&self) -> bool {
        let grid = [-2.0, -0.5, 0.0, 1.0, 1.5];
        let points: Vec<Vec<T>> = (0..grid.len().pow(self.d.min(3) as u32))
            .take(64)
            .map(|mut idx| {
                (0..self.d)
                    .map(|_| {
                        let v = grid[idx % grid.len()];
                        idx /= grid.len();
                        T::lit(v)
                    })
                    .collect()
            })
            .collect();
        let tol = T::lit(1e-12);
        points.iter().all(|l| {
            points.iter().all(|m| {
                let (a, b) = (self.eval(l, m), self.eval(m, l).conj());
                (a - b).norm() <= tol * (T::one() + a.norm())
            })
        })
    }
}

/// The divided-difference symbol
/// `f_k(lambda, mu) = (f(lambda) - f(mu)) (lambda_k - mu_k) / |lambda - mu|^2`,
/// and `0` when `lambda == mu` (exact comparison). `k` is zero-based.
pub fn divided_difference_symbol<T: Real>(d: usize, f: impl Fn(&[T]) -> T + Send + Sync + 'static, k: usize) -> Result<Symbol<T>> {
    if k >= d {
        return Err(Error::Invalid(format!("coordinate index {k} out of range for d = {d}")));
    }
    Ok(Symbol {
        d,
        eval: Arc::new(move |l: &[T], m: &[T]| {
            if l == m {
                return Complex::zero();
            }
            let dist2 = l.iter().zip(m).fold(T::zero(), |acc, (a, b)| acc + (*a - *b) * (*a - *b));
            Complex::new((f(l) - f(m)) * (l[k] - m[k]) / dist2, T::zero())
        }),
        symmetric: true,
    })
}

fn check_compatible<T: Real>(js: &JointSpectrum<T>, xi: &Symbol<T>) -> Result<()> {
    if xi.d() != js.d() {
        return Err(Error::DimMismatch(format!("symbol dimension {} vs spectrum dimension {}", xi.d(), js.d())));
    }
    Ok(())
}

/// The matrix `[xi(lambda_i, lambda_j)]_{ij}` over the joint eigenvalue rows.
pub fn symbol_matrix<T: Real>(js: &JointSpectrum<T>, xi: &Symbol<T>) -> Result<CMatrix<T>> {
    check_compatible(js, xi)?;
    let n = js.dim();
    Ok(CMatrix::from_fn(n, n, |i, j| xi.eval(js.row(i), js.row(j))))
}

/// Applies `xi` as a Schur multiplier to a matrix already expressed in the
/// joint eigenbasis.
pub fn schur_in_eigenbasis<T: Real>(js: &JointSpectrum<T>, xi: &Symbol<T>, v_eig: &CMatrix<T>) -> Result<CMatrix<T>> {
    symbol_matrix(js, xi)?.hadamard(v_eig)
}

/// `T_xi(V) = U (xi o Lambda  .*  U* V U) U*`.
pub fn doi_apply<T: Real>(js: &JointSpectrum<T>, xi: &Symbol<T>, v: &CMatrix<T>) -> Result<CMatrix<T>> {
    if v.rows() != js.dim() || v.cols() != js.dim() {
        return Err(Error::DimMismatch(format!("{}x{} operand for dimension {}", v.rows(), v.cols(), js.dim())));
    }
    let inner = schur_in_eigenbasis(js, xi, &js.to_eigenbasis(v)?)?;
    js.from_eigenbasis(&inner)
}

/// Exact `L2 -> L2` norm of the Schur multiplier: `max_{i,j} |xi(lambda_i, lambda_j)|`.
pub fn doi_l2_norm<T: Real>(js: &JointSpectrum<T>, xi: &Symbol<T>) -> Result<T> {
    Ok(symbol_matrix(js, xi)?.max_abs())
}

/// Both sides of `sum_k T_{f_k}([A_k, B]) = [f(A), B]`.
#[derive(Debug, Clone)]
pub struct PerturbationReport<T> {
    pub lhs: CMatrix<T>,
    pub rhs: CMatrix<T>,
    /// `||lhs - rhs||_F / (1 + ||lhs||_F)`.
    pub residual: T,
    /// Largest `|f_k(lambda_i, lambda_j)|` over occupied pairs and all `k`.
    pub max_symbol: T,
    /// Whether `max_symbol` respects the supplied gradient bound.
    pub symbol_bound_ok: bool,
}

pub fn perturbation_residual<T: Real>(
    js: &JointSpectrum<T>,
    f: impl Fn(&[T]) -> T + Clone + Send + Sync + 'static,
    grad_bound: T,
    b: &HermitianMatrix<T>,
) -> Result<PerturbationReport<T>> {
    let tuple = js.source();
    if b.dim() != js.dim() {
        return Err(Error::DimMismatch(format!("B has dim {} but tuple has dim {}", b.dim(), js.dim())));
    }
    let b = b.as_matrix();
    let lhs = apply_function(js, f.clone())?.as_matrix().commutator(b)?;
    let mut rhs = CMatrix::zeros(js.dim(), js.dim());
    let mut max_symbol = T::zero();
    for k in 0..js.d() {
        let fk = divided_difference_symbol(js.d(), f.clone(), k)?;
        max_symbol = max_symbol.max(doi_l2_norm(js, &fk)?);
        let ck = tuple.get(k).commutator(b)?;
        rhs = &rhs + &doi_apply(js, &fk, &ck)?;
    }
    let residual = (&lhs - &rhs).frobenius_norm() / (T::one() + lhs.frobenius_norm());
    let symbol_bound_ok = max_symbol <= grad_bound * (T::one() + T::lit(1e-12));
    Ok(PerturbationReport { lhs, rhs, residual, max_symbol, symbol_bound_ok })
}

/// Embeds a difference problem into a commutator problem:
/// `A_k = diag(X_k, Y_k)`, `B = [[0, I], [I, 0]]`.
pub fn block_difference_embed<T: Real>(x: &CommutingTuple<T>, y: &CommutingTuple<T>) -> Result<(CommutingTuple<T>, HermitianMatrix<T>)> {
    if x.dim() != y.dim() || x.d() != y.d() {
        return Err(Error::DimMismatch(format!("tuples of shape ({}, {}) and ({}, {})", x.d(), x.dim(), y.d(), y.dim())));
    }
    let n = x.dim();
    let zero = CMatrix::<T>::zeros(n, n);
    let id = CMatrix::<T>::identity(n);
    let blocks = (0..x.d())
        .map(|k| Ok(HermitianMatrix::from_hermitian_part(&CMatrix::block2(x.get(k), &zero, &zero, y.get(k))?)))
        .collect::<Result<Vec<_>>>()?;
    let b = HermitianMatrix::from_hermitian_part(&CMatrix::block2(&zero, &id, &id, &zero)?);
    Ok((CommutingTuple::new(blocks)?, b))
}

/// Relative Frobenius residual of `T_xi1(T_xi2(V))` against `T_{xi1 xi2}(V)`.
pub fn symbol_product_check<T: Real>(js: &JointSpectrum<T>, xi1: &Symbol<T>, xi2: &Symbol<T>, v: &CMatrix<T>) -> Result<T> {
    let composed = doi_apply(js, xi1, &doi_apply(js, xi2, v)?)?;
    let direct = doi_apply(js, &Symbol::product(xi1, xi2)?, v)?;
    let scale = direct.frobenius_norm().max(composed.frobenius_norm());
    let diff = (&composed - &direct).frobenius_norm();
    Ok(if scale.is_zero() { diff } else { diff / scale })
}

/// Lower bound on the Lipschitz constant of `f` from finite differences along
/// the coordinate axes of a uniform grid on `[-radius, radius]^d`.
///
/// This is only a lower bound: no finite sample certifies a supremum.
pub fn lipschitz_lower_estimate<T: Real>(f: impl Fn(&[T]) -> T, d: usize, radius: T, steps: usize) -> T {
    let steps = steps.max(1);
    let h = (radius + radius) / T::from_usize_lossy(steps);
    let total = (steps + 1).pow(d as u32);
    let mut best = T::zero();
    let mut point = vec![T::zero(); d];
    for idx in 0..total {
        let mut rest = idx;
        for p in point.iter_mut() {
            *p = -radius + h * T::from_usize_lossy(rest % (steps + 1));
            rest /= steps + 1;
        }
        let base = f(&point);
        for k in 0..d {
            let mut next = point.clone();
            next[k] = next[k] + h;
            best = best.max(Float::abs(f(&next) - base) / h);
        }
    }
    best
}
