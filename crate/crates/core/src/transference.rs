//! Transference of double operator integrals to torus Fourier multipliers.
//!
//! For a tuple with integer joint spectrum and an integer-valued contraction
//! `h`, the unitary `U_h = sum_i p_i (x) e_(i, h(i))` conjugates `V (x) 1` into
//! the trigonometric polynomial `I(V) = sum_{i,j} p_i V p_j (x) e_(i - j, h(i) - h(j))`.
//! Compressing to `i != j` and applying the homogeneous multiplier `g` gives
//! `S(I(V)) = I(T_{h_k0}(V))`, an identity that is exact on a grid fine enough
//! to hold every occurring frequency without aliasing.
//!
//! Signals are built and transformed in the joint eigenbasis; public entry
//! points that take or return original-basis signals convert once at the
//! boundary.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::doi::{divided_difference_symbol, doi_apply};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::rng::SeededRng;
use crate::spectral::{floor_index, joint_diagonalize, CommutingTuple, JointSpectrum, EPS_RECON};
use crate::torus::{fourier_multiplier_apply, HomogeneousSymbol, TorusSignal};
use crate::Real;

/// Largest `|lambda - round(lambda)|` accepted as integral.
pub const INTEGRALITY_GATE: f64 = 1e-9;
/// Pairs sampled by [`contraction_check`] when `d >= 3`.
pub const SAMPLED_PAIRS: u64 = 1_000_000;

/// A commuting tuple whose joint spectrum is integer-valued.
///
/// The spectrum stored here carries the rounded eigenvalues, so equal integer
/// rows compare equal exactly and define the product projections `p_i`.
#[derive(Debug, Clone)]
pub struct IntegerTuple<T> {
    spectrum: JointSpectrum<T>,
    rows: Vec<Vec<i64>>,
    groups: Vec<usize>,
}

impl<T: Real> IntegerTuple<T> {
    pub fn new(tuple: &CommutingTuple<T>) -> Result<Self> {
        Self::from_spectrum(&joint_diagonalize(tuple, T::lit(EPS_RECON))?)
    }

    /// Rounds a joint spectrum after checking it against [`INTEGRALITY_GATE`].
    pub fn from_spectrum(js: &JointSpectrum<T>) -> Result<Self> {
        let deviation = js.integrality_defect();
        if !(deviation <= T::lit(INTEGRALITY_GATE)) {
            return Err(Error::NotIntegral { deviation: deviation.as_f64() });
        }
        let rounded: Vec<Vec<T>> = js.rows().map(|r| r.iter().map(|x| x.round()).collect()).collect();
        let spectrum = JointSpectrum::from_parts(js.basis().clone(), rounded, Arc::clone(js.source_arc()), T::lit(EPS_RECON))?;
        let rows: Vec<Vec<i64>> = spectrum.rows().map(|r| r.iter().map(|&x| floor_index(x)).collect()).collect();
        let mut groups = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            // Rows are sorted, so equal rows are adjacent.
            let g = match groups.last() {
                Some(&last) if rows[i - 1] == *r => last,
                Some(&last) => last + 1,
                None => 0,
            };
            groups.push(g);
        }
        Ok(Self { spectrum, rows, groups })
    }

    pub fn d(&self) -> usize {
        self.spectrum.d()
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    /// Joint spectrum with the rounded eigenvalue table.
    pub fn spectrum(&self) -> &JointSpectrum<T> {
        &self.spectrum
    }

    /// Integer eigenvalue rows, one per basis column.
    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    /// Index of the projection `p_i` each basis column belongs to.
    pub fn groups(&self) -> &[usize] {
        &self.groups
    }

    pub fn num_groups(&self) -> usize {
        self.groups.last().map_or(0, |g| g + 1)
    }

    /// `max |lambda_k|` over the table.
    pub fn spectral_radius(&self) -> i64 {
        self.rows.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }
}

/// `i -> floor((n / 2) f(i / n))`, the integer rounding of a contraction.
pub fn round_contraction<T: Real>(
    f: impl Fn(&[T]) -> T + Clone + Send + Sync + 'static,
    n: usize,
) -> impl Fn(&[i64]) -> i64 + Clone + Send + Sync + 'static {
    assert!(n >= 1, "rounding scale must be positive");
    let scale = T::from_usize_lossy(n);
    let half = scale / T::lit(2.0);
    move |i: &[i64]| {
        let x: Vec<T> = i.iter().map(|&k| T::from_i64_lossy(k) / scale).collect();
        floor_index(half * f(&x))
    }
}

/// Result of checking `|h(i) - h(j)| <= |i - j|_2` on a box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionCheck {
    pub pairs_checked: u64,
    pub violations: u64,
    /// First violating pair in scan order (points nearest the origin first).
    pub first_violation: Option<(Vec<i64>, Vec<i64>)>,
}

impl ContractionCheck {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

/// Points of `[-r, r]^d` ordered by sup norm, then `l1` norm, then
/// coordinatewise with `k` before `-k`.
pub fn box_points(d: usize, r: i64) -> Vec<Vec<i64>> {
    let side = (2 * r + 1) as usize;
    let total = side.pow(d as u32);
    let mut pts: Vec<Vec<i64>> = (0..total)
        .map(|mut p| {
            let mut v = vec![0i64; d];
            for slot in v.iter_mut().rev() {
                *slot = (p % side) as i64 - r;
                p /= side;
            }
            v
        })
        .collect();
    let key = |v: &Vec<i64>| {
        let sup = v.iter().map(|x| x.abs()).max().unwrap_or(0);
        let l1: i64 = v.iter().map(|x| x.abs()).sum();
        let coords: Vec<(i64, bool)> = v.iter().map(|&x| (x.abs(), x < 0)).collect();
        (sup, l1, coords)
    };
    pts.sort_by_cached_key(key);
    pts
}

fn dist2(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Verifies the contraction property of `h: Z^d -> Z` on `[-r, r]^d`, all
/// pairs when `d <= 2` and [`SAMPLED_PAIRS`] seeded pairs otherwise. The
/// comparison is exact: `(h(i) - h(j))^2 <= |i - j|^2` in integers.
pub fn contraction_check(h: impl Fn(&[i64]) -> i64, d: usize, r: i64, seed: u64) -> Result<ContractionCheck> {
    if r < 1 || d == 0 {
        return Err(Error::Invalid(format!("contraction check needs d >= 1 and r >= 1 (got d = {d}, r = {r})")));
    }
    let mut out = ContractionCheck { pairs_checked: 0, violations: 0, first_violation: None };
    let record = |a: &[i64], ha: i64, b: &[i64], hb: i64, out: &mut ContractionCheck| {
        out.pairs_checked += 1;
        if (ha - hb) * (ha - hb) > dist2(a, b) {
            out.violations += 1;
            if out.first_violation.is_none() {
                out.first_violation = Some((a.to_vec(), b.to_vec()));
            }
        }
    };
    if d <= 2 {
        let pts = box_points(d, r);
        let vals: Vec<i64> = pts.iter().map(|p| h(p)).collect();
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                record(&pts[a], vals[a], &pts[b], vals[b], &mut out);
            }
        }
    } else {
        let mut rng = SeededRng::new(seed);
        let draw = |rng: &mut SeededRng| -> Vec<i64> { (0..d).map(|_| rng.integer(-r, r)).collect() };
        for _ in 0..SAMPLED_PAIRS {
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            record(&a, h(&a), &b, h(&b), &mut out);
        }
    }
    Ok(out)
}

/// Largest `|g(i - j, h(i) - h(j)) - h_k0(i, j)|` over distinct pairs of a box.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolAgreement<T> {
    pub max_deviation: T,
    pub worst_pair: Option<(Vec<i64>, Vec<i64>)>,
    pub pairs_checked: u64,
}

/// Compares the homogeneous symbol on the lattice with the divided-difference
/// symbol of `h` over all unordered pairs of `[-r, r]^d` (both symbols are
/// even under swapping the pair).
pub fn symbol_agreement<T: Real>(h: impl Fn(&[i64]) -> i64, g: &HomogeneousSymbol, r: i64) -> SymbolAgreement<T> {
    let d = g.d();
    let pts = box_points(d, r);
    let vals: Vec<i64> = pts.iter().map(|p| h(p)).collect();
    let k0 = g.k0();
    let mut t = vec![T::zero(); d + 1];
    let mut out = SymbolAgreement { max_deviation: T::zero(), worst_pair: None, pairs_checked: 0 };
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            let dh = vals[a] - vals[b];
            let mut n2 = 0i64;
            for k in 0..d {
                let diff = pts[a][k] - pts[b][k];
                n2 += diff * diff;
                t[k] = T::from_i64_lossy(diff);
            }
            t[d] = T::from_i64_lossy(dh);
            let fk = T::from_i64_lossy(dh * (pts[a][k0] - pts[b][k0])) / T::from_i64_lossy(n2);
            let dev = num_traits::Float::abs(g.eval(&t) - fk);
            out.pairs_checked += 1;
            if !(dev <= out.max_deviation) {
                out.max_deviation = dev;
                out.worst_pair = Some((pts[a].clone(), pts[b].clone()));
            }
        }
    }
    out
}

/// Frequencies `kappa_i = (i, h(i))` of the basis columns.
fn torus_frequencies<T: Real>(it: &IntegerTuple<T>, h: &impl Fn(&[i64]) -> i64) -> Vec<Vec<i64>> {
    it.rows()
        .iter()
        .map(|r| {
            let mut k = r.clone();
            k.push(h(r));
            k
        })
        .collect()
}

/// Largest coordinate of `kappa_r - kappa_s` over the whole table.
fn max_frequency(kappa: &[Vec<i64>]) -> i64 {
    let mut m = 0;
    for a in kappa {
        for b in kappa {
            for (x, y) in a.iter().zip(b) {
                m = m.max((x - y).abs());
            }
        }
    }
    m
}

/// Smallest aliasing-free grid size for `(it, h)`: `2 max_freq + 2`.
pub fn minimal_grid<T: Real>(it: &IntegerTuple<T>, h: impl Fn(&[i64]) -> i64) -> usize {
    (2 * max_frequency(&torus_frequencies(it, &h)) + 2) as usize
}

fn check_grid(kappa: &[Vec<i64>], grid: usize) -> Result<()> {
    let max_freq = max_frequency(kappa);
    if (grid as i64) <= 2 * max_freq + 1 {
        return Err(Error::AliasRisk { grid, max_freq });
    }
    Ok(())
}

fn check_square<T: Real>(it: &IntegerTuple<T>, v: &CMatrix<T>) -> Result<()> {
    if v.rows() != it.dim() || v.cols() != it.dim() {
        return Err(Error::DimMismatch(format!("{}x{} operand for dimension {}", v.rows(), v.cols(), it.dim())));
    }
    Ok(())
}

/// `I(V)` with fibers expressed in the joint eigenbasis; `v_eig = U* V U`.
fn embed_in_eigenbasis<T: Real>(kappa: &[Vec<i64>], v_eig: &CMatrix<T>, grid: usize) -> Result<TorusSignal<T>> {
    let n = v_eig.rows();
    let dim = kappa.first().map_or(1, |k| k.len());
    let mut out = TorusSignal::zeros(dim, grid, n)?;
    let step = T::TAU() / T::from_usize_lossy(grid);
    let roots: Vec<Complex<T>> = (0..grid).map(|j| Complex::from_polar(T::one(), step * T::from_usize_lossy(j))).collect();
    let modulus = grid as i64;
    let mut idx = vec![0usize; dim];
    let mut chars = vec![Complex::zero(); n];
    let f2 = n * n;
    for p in 0..out.num_points() {
        out.unravel(p, &mut idx);
        // chars[r] = e^{i <kappa_r, t_p>}, from the exact integer phase mod N.
        for (c, k) in chars.iter_mut().zip(kappa) {
            let s: i64 = k.iter().zip(&idx).map(|(&kj, &m)| kj * m as i64).sum();
            *c = roots[s.rem_euclid(modulus) as usize];
        }
        let fiber = &mut out.samples_mut()[p * f2..(p + 1) * f2];
        for r in 0..n {
            let row = v_eig.row(r);
            for s in 0..n {
                fiber[r * n + s] = row[s] * chars[r] * chars[s].conj();
            }
        }
    }
    Ok(out)
}

/// Zeroes the entries of each eigenbasis fiber inside a diagonal block `p_i W p_i`.
fn compress_off_diagonal<T: Real>(groups: &[usize], w_eig: &mut TorusSignal<T>) {
    let n = groups.len();
    let f2 = n * n;
    for fiber in w_eig.samples_mut().chunks_mut(f2) {
        for r in 0..n {
            for s in 0..n {
                if groups[r] == groups[s] {
                    fiber[r * n + s] = Complex::zero();
                }
            }
        }
    }
}

fn multiplier<T: Real>(g: &HomogeneousSymbol) -> impl Fn(&[i64]) -> Complex<T> + '_ {
    move |k: &[i64]| Complex::new(g.eval_lattice(k), T::zero())
}

/// The signal `I(V) = U_h (V (x) 1) U_h*` sampled on an `N^{d+1}` grid.
pub fn build_embedding<T: Real>(it: &IntegerTuple<T>, h: impl Fn(&[i64]) -> i64, v: &CMatrix<T>, grid: usize) -> Result<TorusSignal<T>> {
    check_square(it, v)?;
    let kappa = torus_frequencies(it, &h);
    check_grid(&kappa, grid)?;
    let js = it.spectrum();
    embed_in_eigenbasis(&kappa, &js.to_eigenbasis(v)?, grid)?.map_fibers(|x| js.from_eigenbasis(x))
}

/// `S(W) = g(grad) sum_{i != j} (p_i (x) 1) W (p_j (x) 1)`.
#[allow(non_snake_case)]
pub fn apply_S<T: Real>(it: &IntegerTuple<T>, g: &HomogeneousSymbol, w: &TorusSignal<T>) -> Result<TorusSignal<T>> {
    if w.fiber_dim() != it.dim() || w.torus_dim() != it.d() + 1 || g.d() != it.d() {
        return Err(Error::DimMismatch(format!(
            "signal on T^{} with fiber {} for a {}-tuple of dimension {}",
            w.torus_dim(),
            w.fiber_dim(),
            it.d(),
            it.dim()
        )));
    }
    let js = it.spectrum();
    let mut w_eig = w.map_fibers(|x| js.to_eigenbasis(x))?;
    compress_off_diagonal(it.groups(), &mut w_eig);
    fourier_multiplier_apply(multiplier(g), &w_eig).map_fibers(|x| js.from_eigenbasis(x))
}

/// Both sides of `S(I(V)) = I(T_{h_k0}(V))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugationReport<T> {
    /// `||lhs - rhs||_2 / ||rhs||_2`, or the absolute distance when `rhs = 0`.
    pub residual: T,
    pub lhs_l2: T,
    pub rhs_l2: T,
    pub max_freq: i64,
    pub grid: usize,
}

/// Evaluates the transference identity for `V` on an `N^{d+1}` grid.
///
/// The left side runs through the grid DFT and the lattice symbol `g`; the
/// right side through the divided-difference Schur multiplier of `h` on the
/// integer spectrum. `h` must be a contraction on the occupied spectrum,
/// otherwise `g` leaves the regime where it equals `h_k0`.
pub fn verify_conjugation<T: Real>(
    it: &IntegerTuple<T>,
    h: impl Fn(&[i64]) -> i64 + Clone + Send + Sync + 'static,
    g: &HomogeneousSymbol,
    v: &CMatrix<T>,
    grid: usize,
) -> Result<ConjugationReport<T>> {
    Ok(verify_conjugation_many(it, h, std::slice::from_ref(g), v, grid)?.remove(0))
}

/// [`verify_conjugation`] for several symbols, sharing the forward DFT of
/// the compressed embedding.
pub fn verify_conjugation_many<T: Real>(
    it: &IntegerTuple<T>,
    h: impl Fn(&[i64]) -> i64 + Clone + Send + Sync + 'static,
    symbols: &[HomogeneousSymbol],
    v: &CMatrix<T>,
    grid: usize,
) -> Result<Vec<ConjugationReport<T>>> {
    check_square(it, v)?;
    let d = it.d();
    if let Some(g) = symbols.iter().find(|g| g.d() != d) {
        return Err(Error::DimMismatch(format!("symbol for d = {} on a {d}-tuple", g.d())));
    }
    let kappa = torus_frequencies(it, &h);
    check_grid(&kappa, grid)?;
    for (a, ka) in kappa.iter().enumerate() {
        for kb in &kappa[a + 1..] {
            let dh = ka[d] - kb[d];
            if dh * dh > dist2(&ka[..d], &kb[..d]) {
                return Err(Error::GuardViolation(format!(
                    "h is not a contraction between spectrum rows {:?} and {:?}",
                    &ka[..d],
                    &kb[..d]
                )));
            }
        }
    }
    let js = it.spectrum();
    let max_freq = max_frequency(&kappa);

    let mut compressed = embed_in_eigenbasis(&kappa, &js.to_eigenbasis(v)?, grid)?;
    compress_off_diagonal(it.groups(), &mut compressed);
    let coeffs = compressed.into_dft();

    let h_real = h.clone();
    let on_reals = move |x: &[T]| {
        let i: Vec<i64> = x.iter().map(|&t| floor_index(t.round())).collect();
        T::from_i64_lossy(h_real(&i))
    };
    symbols
        .iter()
        .map(|g| {
            let lhs = scale_coefficients(&coeffs, multiplier(g)).into_inverse_dft();
            let xi = divided_difference_symbol(d, on_reals.clone(), g.k0())?;
            let tv = doi_apply(js, &xi, v)?;
            let rhs = embed_in_eigenbasis(&kappa, &js.to_eigenbasis(&tv)?, grid)?;
            let diff = lhs.l2_distance(&rhs)?;
            let rhs_l2 = rhs.l2_norm();
            let residual = if rhs_l2 > T::zero() { diff / rhs_l2 } else { diff };
            Ok(ConjugationReport { residual, lhs_l2: lhs.l2_norm(), rhs_l2, max_freq, grid })
        })
        .collect()
}

/// Multiplies each coefficient slot of a DFT tensor by `m(k)`.
fn scale_coefficients<T: Real>(coeffs: &TorusSignal<T>, m: impl Fn(&[i64]) -> Complex<T>) -> TorusSignal<T> {
    let mut out = coeffs.clone();
    let f2 = out.fiber_dim() * out.fiber_dim();
    for p in 0..out.num_points() {
        let factor = m(&out.frequency_of_point(p));
        for z in &mut out.samples_mut()[p * f2..(p + 1) * f2] {
            *z = *z * factor;
        }
    }
    out
}

/// `sup |xi_n(lambda, mu) - f_k0(lambda, mu) / 2|` over pairs of distinct rows
/// of `js`, where `xi_n(lambda, mu) = (f^n)_k0(floor(n lambda), floor(n mu))`
/// and `f^n` is [`round_contraction`] of `f`.
pub fn xi_deviation<T: Real>(
    js: &JointSpectrum<T>,
    f: impl Fn(&[T]) -> T + Clone + Send + Sync + 'static,
    k0: usize,
    n: usize,
) -> Result<T> {
    let d = js.d();
    if k0 >= d {
        return Err(Error::Invalid(format!("coordinate index {k0} out of range for d = {d}")));
    }
    let fnr = round_contraction(f.clone(), n);
    let scale = T::from_usize_lossy(n);
    let cells: Vec<Vec<i64>> = js.rows().map(|r| r.iter().map(|&x| floor_index(x * scale)).collect()).collect();
    let h: Vec<i64> = cells.iter().map(|c| fnr(c)).collect();
    let fv: Vec<T> = js.rows().map(&f).collect();
    let mut worst = T::zero();
    for a in 0..js.dim() {
        for b in 0..js.dim() {
            let (la, lb) = (js.row(a), js.row(b));
            if la == lb {
                continue;
            }
            let n2: T = la.iter().zip(lb).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y));
            let half_fk = (fv[a] - fv[b]) * (la[k0] - lb[k0]) / n2 / T::lit(2.0);
            let c2 = dist2(&cells[a], &cells[b]);
            let xi = if c2 == 0 {
                T::zero()
            } else {
                T::from_i64_lossy((h[a] - h[b]) * (cells[a][k0] - cells[b][k0])) / T::from_i64_lossy(c2)
            };
            worst = worst.max(num_traits::Float::abs(xi - half_fk));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::BuiltinFn;
    use crate::norms::trace_norm;
    use crate::spectral::{random_planted_tuple, HermitianMatrix, SpectrumLaw};
    use crate::torus::signal_norms;

    fn diag_tuple(cols: &[&[f64]]) -> IntegerTuple<f64> {
        let ms = cols.iter().map(|c| HermitianMatrix::from_real_diag(c)).collect();
        IntegerTuple::new(&CommutingTuple::new(ms).unwrap()).unwrap()
    }

    #[test]
    fn rounding_identity_at_scale_four() {
        let h = round_contraction(|x: &[f64]| x[0], 4);
        assert_eq!((-3..=3).map(|i| h(&[i])).collect::<Vec<_>>(), vec![-2, -1, -1, 0, 0, 1, 1]);
        assert_eq!((h(&[3]), h(&[1])), (1, 0));
        let c = round_contraction(|_: &[f64]| 0.3, 10);
        assert_eq!(c(&[7]), 1);
    }

    #[test]
    fn contraction_examples() {
        let id4 = round_contraction(|x: &[f64]| x[0], 4);
        assert!(contraction_check(id4, 1, 30, 0).unwrap().ok());
        let abs8 = round_contraction(|x: &[f64]| x[0].abs(), 8);
        assert!(contraction_check(abs8, 1, 30, 0).unwrap().ok());
        let doubled = contraction_check(|i: &[i64]| 2 * i[0], 1, 30, 0).unwrap();
        assert!(!doubled.ok());
        assert_eq!(doubled.first_violation, Some((vec![0], vec![1])));
        assert_eq!(doubled.pairs_checked, 61 * 60 / 2);
    }

    #[test]
    fn sampled_check_in_three_dimensions() {
        let h = round_contraction(BuiltinFn::EuclidNorm.as_fn::<f64>(), 5);
        let rep = contraction_check(h, 3, 4, 9).unwrap();
        assert!(rep.ok());
        assert_eq!(rep.pairs_checked, SAMPLED_PAIRS);
    }

    #[test]
    fn non_integral_spectrum_is_rejected() {
        let t = CommutingTuple::new(vec![HermitianMatrix::from_real_diag(&[0.5, 1.0])]).unwrap();
        assert!(matches!(IntegerTuple::new(&t), Err(Error::NotIntegral { .. })));
    }

    #[test]
    fn embedding_of_identity_is_constant() {
        let it = diag_tuple(&[&[0.0, 1.0, 1.0]]);
        assert_eq!(it.num_groups(), 2);
        let w = build_embedding(&it, |i: &[i64]| i[0], &CMatrix::identity(3), 8).unwrap();
        for p in 0..w.num_points() {
            assert!((&w.fiber(p) - &CMatrix::identity(3)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn single_off_diagonal_term() {
        let it = diag_tuple(&[&[0.0, 1.0]]);
        let v = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let w = build_embedding(&it, |i: &[i64]| i[0], &v, 8).unwrap();
        let expected = TorusSignal::from_terms(2, 8, 2, &[(vec![-1, -1], v.clone())]).unwrap();
        assert!(w.try_sub(&expected).unwrap().l2_norm() < 1e-13);
        let g = HomogeneousSymbol::new(1, 0).unwrap();
        let s = apply_S(&it, &g, &w).unwrap();
        assert!(s.try_sub(&expected).unwrap().l2_norm() < 1e-13);
    }

    #[test]
    fn diagonal_fibers_are_annihilated() {
        let it = diag_tuple(&[&[0.0, 2.0]]);
        let w = TorusSignal::from_terms(2, 8, 2, &[(vec![1, 1], CMatrix::from_real_diag(&[1.0, -3.0]))]).unwrap();
        let g = HomogeneousSymbol::new(1, 0).unwrap();
        assert!(apply_S(&it, &g, &w).unwrap().l2_norm() < 1e-14);
    }

    #[test]
    fn aliasing_is_refused() {
        let it = diag_tuple(&[&[-1.0, 2.0]]);
        let v = CMatrix::identity(2);
        assert_eq!(minimal_grid(&it, |i: &[i64]| i[0].abs()), 8);
        assert!(matches!(build_embedding(&it, |i: &[i64]| i[0].abs(), &v, 7), Err(Error::AliasRisk { grid: 7, max_freq: 3 })));
        assert!(build_embedding(&it, |i: &[i64]| i[0].abs(), &v, 8).is_ok());
    }

    #[test]
    fn embedding_is_isometric() {
        let mut rng = SeededRng::new(5);
        let p = random_planted_tuple::<f64>(4, 1, &SpectrumLaw::Integer(2), &mut rng).unwrap();
        let it = IntegerTuple::new(&p.tuple).unwrap();
        let v = rng.gaussian_matrix::<f64>(4, 4);
        let w = build_embedding(&it, |i: &[i64]| i[0], &v, 12).unwrap();
        let l1 = signal_norms(&w).l1;
        let expected = std::f64::consts::TAU.powi(2) * trace_norm(&crate::norms::singular_values(&v));
        assert!((l1 - expected).abs() < 1e-10 * expected);
    }

    #[test]
    fn conjugation_small_cases() {
        let it = diag_tuple(&[&[-1.0, 2.0]]);
        let g = HomogeneousSymbol::new(1, 0).unwrap();
        let mut rng = SeededRng::new(1);
        let v = rng.gaussian_matrix::<f64>(2, 2);
        let rep = verify_conjugation(&it, |i: &[i64]| i[0].abs(), &g, &v, 16).unwrap();
        assert!(rep.residual <= 1e-9, "residual {}", rep.residual);
        assert!(rep.rhs_l2 > 0.0);

        let diag = CMatrix::from_real_diag(&[1.0, 5.0]);
        let rep = verify_conjugation(&it, |i: &[i64]| i[0].abs(), &g, &diag, 16).unwrap();
        assert!(rep.lhs_l2 < 1e-13 && rep.rhs_l2 < 1e-13);
    }

    #[test]
    fn conjugation_requires_contraction_on_spectrum() {
        let it = diag_tuple(&[&[0.0, 1.0]]);
        let g = HomogeneousSymbol::new(1, 0).unwrap();
        let v = CMatrix::identity(2);
        assert!(matches!(verify_conjugation(&it, |i: &[i64]| 3 * i[0], &g, &v, 16), Err(Error::GuardViolation(_))));
    }

    #[test]
    fn symbol_agreement_on_small_box() {
        let g = HomogeneousSymbol::new(2, 1).unwrap();
        let h = round_contraction(BuiltinFn::MaxAbs.as_fn::<f64>(), 3);
        let rep = symbol_agreement::<f64>(h, &g, 4);
        assert!(rep.max_deviation <= 1e-12);
        assert_eq!(rep.pairs_checked, 81 * 80 / 2);
    }

    #[test]
    fn xi_deviation_shrinks() {
        let mut rng = SeededRng::new(3);
        let p = random_planted_tuple::<f64>(6, 1, &SpectrumLaw::Uniform, &mut rng).unwrap();
        let js = joint_diagonalize(&p.tuple, 1e-8).unwrap();
        let f = |x: &[f64]| x[0].abs();
        let coarse = xi_deviation(&js, f, 0, 2).unwrap();
        let fine = xi_deviation(&js, f, 0, 4096).unwrap();
        assert!(fine < coarse.max(1e-3), "coarse {coarse}, fine {fine}");
    }
}
