//! Commuting Hermitian tuples, their joint diagonalization, and multivariate
//! functional calculus.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, orthonormalize_columns, CMatrix};
use crate::rng::SeededRng;
use crate::scalar::cmp_rows;
use crate::Real;

pub const EPS_HERM: f64 = 1e-12;
pub const EPS_COMM: f64 = 1e-10;
/// Default tolerance for the off-diagonal and reconstruction invariants.
pub const EPS_RECON: f64 = 1e-8;
/// Relative eigenvalue gap below which eigenvalues are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

const COMBINATION_SEED: u64 = 0x6a6f_696e_745f_6469;

/// A square matrix equal to its adjoint up to `EPS_HERM`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T>(CMatrix<T>);

impl<T: Real> HermitianMatrix<T> {
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimMismatch(format!("{}x{} is not square", m.rows(), m.cols())));
        }
        let defect = m.hermitian_defect();
        if defect > T::lit(EPS_HERM) * (T::one() + m.max_abs()) {
            return Err(Error::NotHermitian { residual: defect.as_f64() });
        }
        Ok(Self(m))
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        Self(CMatrix::from_real_diag(diag))
    }

    /// Symmetrizes `(m + m*)/2`; use only when `m` is Hermitian up to rounding.
    pub fn from_hermitian_part(m: &CMatrix<T>) -> Self {
        Self(m.hermitian_part())
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &CMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.0
    }
}

impl<T> AsRef<CMatrix<T>> for HermitianMatrix<T> {
    fn as_ref(&self) -> &CMatrix<T> {
        &self.0
    }
}

/// Pairwise commuting Hermitian matrices of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingTuple<T> {
    matrices: Vec<HermitianMatrix<T>>,
}

impl<T: Real> CommutingTuple<T> {
    pub fn new(matrices: Vec<HermitianMatrix<T>>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::Invalid("a commuting tuple needs at least one matrix".into()));
        };
        let n = first.dim();
        if let Some(bad) = matrices.iter().find(|m| m.dim() != n) {
            return Err(Error::DimMismatch(format!("tuple mixes dims {n} and {}", bad.dim())));
        }
        for k in 0..matrices.len() {
            for l in k + 1..matrices.len() {
                let (a, b) = (matrices[k].as_matrix(), matrices[l].as_matrix());
                let c = a.commutator(b)?.frobenius_norm();
                let bound = T::lit(EPS_COMM) * a.frobenius_norm() * b.frobenius_norm();
                if c > bound {
                    let denom = (a.frobenius_norm() * b.frobenius_norm()).max(T::min_positive_value());
                    return Err(Error::NonCommuting { k, l, residual: (c / denom).as_f64() });
                }
            }
        }
        Ok(Self { matrices })
    }

    pub fn d(&self) -> usize {
        self.matrices.len()
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn matrices(&self) -> &[HermitianMatrix<T>] {
        &self.matrices
    }

    pub fn get(&self, k: usize) -> &CMatrix<T> {
        self.matrices[k].as_matrix()
    }
}

/// Simultaneous eigendecomposition of a commuting tuple.
///
/// `basis` is unitary, and row `i` of the eigenvalue table is the joint
/// eigenvalue carried by column `i` of `basis`. Rows are sorted
/// lexicographically; rows belonging to one degenerate joint eigenspace are
/// bitwise equal.
#[derive(Debug, Clone)]
pub struct JointSpectrum<T> {
    basis: CMatrix<T>,
    eigenvalues: Vec<T>,
    d: usize,
    source: Arc<CommutingTuple<T>>,
}

impl<T: Real> JointSpectrum<T> {
    /// Assembles a spectrum from known data without re-diagonalizing, e.g. a
    /// generator's planted basis. Rows are re-sorted; invariants are checked
    /// against `source` with tolerance `tol`.
    pub fn from_parts(basis: CMatrix<T>, rows: Vec<Vec<T>>, source: Arc<CommutingTuple<T>>, tol: T) -> Result<Self> {
        let n = basis.rows();
        let d = source.d();
        if rows.len() != n || rows.iter().any(|r| r.len() != d) || source.dim() != n {
            return Err(Error::DimMismatch("basis, eigenvalue table and tuple disagree".into()));
        }
        let js = Self::sorted(basis, rows, source);
        js.check_invariants(tol)?;
        Ok(js)
    }

    fn sorted(basis: CMatrix<T>, rows: Vec<Vec<T>>, source: Arc<CommutingTuple<T>>) -> Self {
        let d = source.d();
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&i, &j| cmp_rows(&rows[i], &rows[j]));
        let basis = basis.select_columns(&order);
        let eigenvalues = order.iter().flat_map(|&i| rows[i].iter().copied()).collect();
        Self { basis, eigenvalues, d, source }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.eigenvalues[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.eigenvalues.chunks(self.d)
    }

    /// Column `k` of the eigenvalue table: the spectrum of `A_k`.
    pub fn column(&self, k: usize) -> Vec<T> {
        self.rows().map(|r| r[k]).collect()
    }

    pub fn source(&self) -> &CommutingTuple<T> {
        &self.source
    }

    pub fn source_arc(&self) -> &Arc<CommutingTuple<T>> {
        &self.source
    }

    /// `U* X U`.
    pub fn to_eigenbasis(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        x.conjugate_by(&self.basis)
    }

    /// `U X U*`.
    pub fn from_eigenbasis(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        x.conjugate_back(&self.basis)
    }

    /// Largest `|lambda - round(lambda)|` over the table.
    pub fn integrality_defect(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |acc, &x| acc.max(Float::abs(x - x.round())))
    }

    fn check_invariants(&self, tol: T) -> Result<()> {
        let n = self.dim();
        let gram = self.basis.adjoint().try_mul(&self.basis)?;
        let unitarity = (&gram - &CMatrix::identity(n)).frobenius_norm();
        if unitarity > T::lit(1e-10) * T::from_usize_lossy(n.max(1)) {
            return Err(Error::NoConvergence(format!("basis not unitary ({:e})", unitarity.as_f64())));
        }
        for k in 0..self.d {
            let a = self.source.get(k);
            let scale = a.frobenius_norm();
            let rotated = self.to_eigenbasis(a)?;
            let off = rotated.off_diagonal_norm();
            if off > tol * scale {
                return Err(Error::NoConvergence(format!(
                    "A_{k} off-diagonal residual {:e} in joint basis",
                    off.as_f64()
                )));
            }
            let recon = self.from_eigenbasis(&CMatrix::from_real_diag(&self.column(k)))?;
            let err = (&recon - a).frobenius_norm();
            if err > tol * scale {
                return Err(Error::NoConvergence(format!("A_{k} reconstruction residual {:e}", err.as_f64())));
            }
        }
        Ok(())
    }
}

/// Simultaneously diagonalizes a commuting tuple.
///
/// A generic combination `sum c_k A_k` is diagonalized first; eigenvalue
/// clusters (relative gap below [`CLUSTER_GAP`]) are re-diagonalized against
/// `A_1, A_2, ...` in turn; a final joint Jacobi sweep lowers the total
/// off-diagonal energy. Rows of a degenerate joint eigenspace are averaged so
/// they compare equal.
pub fn joint_diagonalize<T: Real>(tuple: &CommutingTuple<T>, tol: T) -> Result<JointSpectrum<T>> {
    let source = Arc::new(CommutingTuple::new(tuple.matrices.clone())?);
    let n = source.dim();
    let d = source.d();

    let mut rng = SeededRng::new(COMBINATION_SEED);
    let mut combo = CMatrix::<T>::zeros(n, n);
    for k in 0..d {
        let c = T::lit(rng.uniform(0.5, 1.5));
        combo = &combo + &source.get(k).scale(c);
    }
    let eig = hermitian_eigen(&combo)?;
    let mut basis = eig.vectors;

    let mut leaves: Vec<Vec<usize>> = Vec::new();
    for cluster in clusters(&eig.values, &(0..n).collect::<Vec<_>>(), combo.frobenius_norm()) {
        refine_cluster(&source, &mut basis, cluster, 0, &mut leaves)?;
    }
    let mut leaf_of = vec![0usize; n];
    for (id, leaf) in leaves.iter().enumerate() {
        for &c in leaf {
            leaf_of[c] = id;
        }
    }

    joint_jacobi_sweep(&source, &mut basis, &leaf_of)?;

    let rotated: Vec<CMatrix<T>> =
        (0..d).map(|k| source.get(k).conjugate_by(&basis)).collect::<Result<_>>()?;
    let mut rows: Vec<Vec<T>> = (0..n).map(|i| rotated.iter().map(|m| m[(i, i)].re).collect()).collect();
    for leaf in leaves.iter().filter(|l| l.len() > 1) {
        let m = T::from_usize_lossy(leaf.len());
        let mean: Vec<T> = (0..d).map(|k| leaf.iter().fold(T::zero(), |acc, &i| acc + rows[i][k]) / m).collect();
        for &i in leaf {
            rows[i].clone_from(&mean);
        }
    }

    let js = JointSpectrum::sorted(basis, rows, source);
    js.check_invariants(tol)?;
    Ok(js)
}

/// Groups sorted eigenvalues whose consecutive gap is below `CLUSTER_GAP * scale`,
/// where `scale` is the Frobenius norm of the full matrix being split.
fn clusters<T: Real>(values: &[T], members: &[usize], scale: T) -> Vec<Vec<usize>> {
    let gap = T::lit(CLUSTER_GAP) * scale.max(T::min_positive_value());
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &m) in members.iter().enumerate() {
        match out.last_mut() {
            Some(last) if i > 0 && values[i] - values[i - 1] < gap => last.push(m),
            _ => out.push(vec![m]),
        }
    }
    out
}

fn refine_cluster<T: Real>(
    source: &CommutingTuple<T>,
    basis: &mut CMatrix<T>,
    cluster: Vec<usize>,
    level: usize,
    leaves: &mut Vec<Vec<usize>>,
) -> Result<()> {
    if cluster.len() == 1 || level == source.d() {
        leaves.push(cluster);
        return Ok(());
    }
    let block = basis.select_columns(&cluster);
    let sub = source.get(level).conjugate_by(&block)?;
    let eig = hermitian_eigen(&sub)?;
    basis.set_columns(&cluster, &block.try_mul(&eig.vectors)?);
    for sub_cluster in clusters(&eig.values, &cluster, source.get(level).frobenius_norm()) {
        refine_cluster(source, basis, sub_cluster, level + 1, leaves)?;
    }
    Ok(())
}

/// One cyclic sweep of joint Jacobi rotations over all column pairs that lie
/// in different leaf clusters. For each pair the rotation angle comes from the
/// dominant eigenvector of the 3x3 Gram matrix of the pair's off-diagonal data;
/// a rotation is kept only if it lowers the pair's off-diagonal energy.
fn joint_jacobi_sweep<T: Real>(source: &CommutingTuple<T>, basis: &mut CMatrix<T>, leaf_of: &[usize]) -> Result<()> {
    let n = basis.rows();
    let d = source.d();
    let mut rotated: Vec<CMatrix<T>> = (0..d).map(|k| source.get(k).conjugate_by(basis)).collect::<Result<_>>()?;
    for p in 0..n.saturating_sub(1) {
        for q in p + 1..n {
            if leaf_of[p] == leaf_of[q] {
                continue;
            }
            let energy = |c: T, s: Complex<T>| -> T {
                rotated.iter().fold(T::zero(), |acc, m| {
                    let (app, aqq, apq, aqp) = (m[(p, p)], m[(q, q)], m[(p, q)], m[(q, p)]);
                    // (R* M R)_{pq} for R = [[c, -conj(s)], [s, c]]
                    let off = apq * (c * c) - aqp * (s.conj() * s.conj()) + (aqq - app) * s.conj() * c;
                    acc + off.norm_sqr()
                })
            };
            let current = energy(T::one(), Complex::zero());
            if current.is_zero() {
                continue;
            }
            let mut gram = CMatrix::<T>::zeros(3, 3);
            for m in &rotated {
                let h = [m[(p, p)].re - m[(q, q)].re, m[(p, q)].re + m[(p, q)].re, m[(p, q)].im + m[(p, q)].im];
                for a in 0..3 {
                    for b in 0..3 {
                        gram[(a, b)] = gram[(a, b)] + Complex::new(h[a] * h[b], T::zero());
                    }
                }
            }
            let g = hermitian_eigen(&gram)?;
            let mut x = g.vectors[(0, 2)].re;
            let mut y = g.vectors[(1, 2)].re;
            let mut z = g.vectors[(2, 2)].re;
            if x < T::zero() {
                (x, y, z) = (-x, -y, -z);
            }
            let r = (x * x + y * y + z * z).sqrt();
            if r.is_zero() {
                continue;
            }
            let c = ((x + r) / (r + r)).sqrt();
            let s0 = Complex::new(y, -z) / ((T::lit(2.0) * r * (x + r)).sqrt());
            let candidates = [s0, s0.conj(), -s0, -s0.conj()];
            let (best_s, best_e) = candidates
                .iter()
                .map(|&s| (s, energy(c, s)))
                .fold((Complex::zero(), current), |best, cand| if cand.1 < best.1 { cand } else { best });
            if best_e >= current {
                continue;
            }
            let s = best_s;
            let sc = s.conj();
            // basis <- basis R, M <- R* M R, touching only columns/rows p and q.
            let rotate_cols = |m: &mut CMatrix<T>| {
                for i in 0..m.rows() {
                    let (xp, xq) = (m[(i, p)], m[(i, q)]);
                    m[(i, p)] = xp * c + xq * s;
                    m[(i, q)] = xq * c - xp * sc;
                }
            };
            rotate_cols(basis);
            for m in rotated.iter_mut() {
                rotate_cols(m);
                for j in 0..n {
                    let (xp, xq) = (m[(p, j)], m[(q, j)]);
                    m[(p, j)] = xp * c + xq * sc;
                    m[(q, j)] = xq * c - xp * s;
                }
            }
        }
    }
    Ok(())
}

/// `U diag(f(lambda_1), ..., f(lambda_n)) U*`.
pub fn apply_function<T: Real>(js: &JointSpectrum<T>, f: impl Fn(&[T]) -> T) -> Result<HermitianMatrix<T>> {
    let values: Vec<T> = js
        .rows()
        .enumerate()
        .map(|(i, row)| {
            let v = f(row);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { row: i })
            }
        })
        .collect::<Result<_>>()?;
    let m = js.from_eigenbasis(&CMatrix::from_real_diag(&values))?;
    Ok(HermitianMatrix::from_hermitian_part(&m))
}

/// `X Y - Y X`.
pub fn commutator<T: Real>(x: &CMatrix<T>, y: &CMatrix<T>) -> Result<CMatrix<T>> {
    x.commutator(y)
}

/// Law of the eigenvalues drawn by [`random_commuting_tuple`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpectrumLaw {
    /// Uniform on `[-1, 1]`.
    Uniform,
    /// Uniform on the integers `-m..=m`.
    Integer(i64),
    /// Uniform over a user-supplied list of values.
    Grid(Vec<f64>),
}

impl std::str::FromStr for SpectrumLaw {
    type Err = Error;

    /// `uniform`, `integer:m`, or `grid:v1,v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadLaw(s.to_string());
        if s == "uniform" {
            return Ok(SpectrumLaw::Uniform);
        }
        if let Some(m) = s.strip_prefix("integer:") {
            let m: i64 = m.parse().map_err(|_| bad())?;
            return if m >= 0 { Ok(SpectrumLaw::Integer(m)) } else { Err(bad()) };
        }
        if let Some(vals) = s.strip_prefix("grid:") {
            let vals: Vec<f64> = vals.split(',').map(|v| v.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
            return if !vals.is_empty() && vals.iter().all(|v| v.is_finite()) { Ok(SpectrumLaw::Grid(vals)) } else { Err(bad()) };
        }
        Err(bad())
    }
}

impl SpectrumLaw {
    fn validate(&self) -> Result<()> {
        match self {
            SpectrumLaw::Uniform => Ok(()),
            SpectrumLaw::Integer(m) if *m >= 0 => Ok(()),
            SpectrumLaw::Grid(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(()),
            other => Err(Error::BadLaw(format!("{other:?}"))),
        }
    }

    fn draw(&self, rng: &mut SeededRng) -> f64 {
        match self {
            SpectrumLaw::Uniform => rng.uniform(-1.0, 1.0),
            SpectrumLaw::Integer(m) => rng.integer(-m, *m) as f64,
            SpectrumLaw::Grid(v) => v[rng.index(v.len())],
        }
    }
}

/// A generated tuple together with the planted basis and eigenvalues.
#[derive(Debug, Clone)]
pub struct PlantedTuple<T> {
    pub tuple: CommutingTuple<T>,
    pub basis: CMatrix<T>,
    /// `rows[i][k]` is the eigenvalue of `A_k` on column `i` of `basis`.
    pub rows: Vec<Vec<T>>,
}

/// `A_k = U diag(lambda^(k)) U*` with one Haar unitary `U` for all `k`.
pub fn random_commuting_tuple<T: Real>(n: usize, d: usize, law: &SpectrumLaw, rng: &mut SeededRng) -> Result<CommutingTuple<T>> {
    Ok(random_planted_tuple(n, d, law, rng)?.tuple)
}

pub fn random_planted_tuple<T: Real>(n: usize, d: usize, law: &SpectrumLaw, rng: &mut SeededRng) -> Result<PlantedTuple<T>> {
    if n == 0 || d == 0 {
        return Err(Error::Invalid(format!("random tuple needs n >= 1 and d >= 1 (got n={n}, d={d})")));
    }
    law.validate()?;
    let basis = orthonormalize_columns(&rng.gaussian_matrix::<T>(n, n));
    let rows: Vec<Vec<T>> = (0..n).map(|_| (0..d).map(|_| T::lit(law.draw(rng))).collect()).collect();
    let matrices = (0..d)
        .map(|k| {
            let diag: Vec<T> = rows.iter().map(|r| r[k]).collect();
            let m = CMatrix::from_real_diag(&diag).conjugate_back(&basis)?;
            Ok(HermitianMatrix::from_hermitian_part(&m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PlantedTuple { tuple: CommutingTuple::new(matrices)?, basis, rows })
}

/// Floors every eigenvalue onto the `1/n` grid: `A_{k,n} = U diag(floor(n lambda)) U*`.
pub fn discretize_tuple<T: Real>(js: &JointSpectrum<T>, n: usize) -> Result<CommutingTuple<T>> {
    let floored = discretized_rows(js, n);
    let matrices = (0..js.d())
        .map(|k| {
            let diag: Vec<T> = floored.iter().map(|r| T::from_i64_lossy(r[k])).collect();
            Ok(HermitianMatrix::from_hermitian_part(&js.from_eigenbasis(&CMatrix::from_real_diag(&diag))?))
        })
        .collect::<Result<Vec<_>>>()?;
    CommutingTuple::new(matrices)
}

/// Integer index of the grid cell `[i/n, (i+1)/n)` containing each eigenvalue.
pub fn discretized_rows<T: Real>(js: &JointSpectrum<T>, n: usize) -> Vec<Vec<i64>> {
    let scale = T::from_usize_lossy(n);
    js.rows().map(|r| r.iter().map(|&x| floor_index(x * scale)).collect()).collect()
}

pub(crate) fn floor_index<T: Real>(x: T) -> i64 {
    x.floor().to_i64().expect("grid index fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> HermitianMatrix<f64> {
        HermitianMatrix::from_real_diag(v)
    }

    #[test]
    fn already_diagonal_pair() {
        let t = CommutingTuple::new(vec![diag(&[1.0, 2.0]), diag(&[3.0, 4.0])]).unwrap();
        let js = joint_diagonalize(&t, EPS_RECON).unwrap();
        assert_eq!(js.row(0), &[1.0, 3.0]);
        assert_eq!(js.row(1), &[2.0, 4.0]);
        let gram = (&js.basis().map(|z| z * z.conj()) - &CMatrix::identity(2)).max_abs();
        assert!(gram < 1e-14);
    }

    #[test]
    fn pauli_x_joint_spectrum() {
        let x = HermitianMatrix::new(CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        let js = joint_diagonalize(&CommutingTuple::new(vec![x]).unwrap(), EPS_RECON).unwrap();
        assert!((js.row(0)[0] + 1.0).abs() < 1e-14 && (js.row(1)[0] - 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = js.basis();
        // Columns are (1, -1)/sqrt2 and (1, 1)/sqrt2 up to a phase.
        assert!(((u[(0, 0)] + u[(1, 0)]).norm()) < 1e-14);
        assert!(((u[(0, 1)] - u[(1, 1)]).norm()) < 1e-14);
        assert!((u[(0, 0)].norm() - s).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = CMatrix::<f64>::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn non_commuting_is_rejected() {
        let x = HermitianMatrix::new(CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        let z = diag(&[1.0, -1.0]);
        assert!(matches!(CommutingTuple::new(vec![x, z]), Err(Error::NonCommuting { .. })));
    }

    #[test]
    fn apply_function_examples() {
        let t = CommutingTuple::new(vec![diag(&[1.0, 2.0]), diag(&[3.0, 4.0])]).unwrap();
        let js = joint_diagonalize(&t, EPS_RECON).unwrap();
        let c = apply_function(&js, |_| 2.5).unwrap();
        assert!((c.as_matrix() - &CMatrix::identity(2).scale(2.5)).max_abs() < 1e-14);
        let sum = apply_function(&js, |l| l[0] + l[1]).unwrap();
        let direct = t.get(0) + t.get(1);
        assert!((sum.as_matrix() - &direct).max_abs() < 1e-14);
        let js1 = joint_diagonalize(&CommutingTuple::new(vec![diag(&[1.0, 2.0])]).unwrap(), EPS_RECON).unwrap();
        let sq = apply_function(&js1, |l| l[0] * l[0]).unwrap();
        assert!((sq.as_matrix() - &CMatrix::from_real_diag(&[1.0, 4.0])).max_abs() < 1e-14);
        assert!(matches!(apply_function(&js1, |l| 1.0 / (l[0] - 1.0)), Err(Error::NonFinite { row: 0 })));
    }

    #[test]
    fn commutator_examples() {
        let mut rng = SeededRng::new(1);
        let y = rng.gaussian_matrix::<f64>(4, 4);
        assert!(commutator(&CMatrix::identity(4), &y).unwrap().max_abs() < 1e-15);
        assert!(commutator(&y, &y).unwrap().max_abs() < 1e-14);
        assert!(matches!(commutator(&y, &CMatrix::identity(3)), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn generator_is_deterministic_and_scalar_case_commutes() {
        let law = SpectrumLaw::Uniform;
        let a = random_commuting_tuple::<f64>(6, 3, &law, &mut SeededRng::new(42)).unwrap();
        let b = random_commuting_tuple::<f64>(6, 3, &law, &mut SeededRng::new(42)).unwrap();
        assert_eq!(a, b);
        let s = random_commuting_tuple::<f64>(1, 4, &law, &mut SeededRng::new(5)).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(matches!(SpectrumLaw::Grid(vec![]).validate(), Err(Error::BadLaw(_))));
        assert!("cauchy".parse::<SpectrumLaw>().is_err());
        assert_eq!("integer:5".parse::<SpectrumLaw>().unwrap(), SpectrumLaw::Integer(5));
    }

    #[test]
    fn integer_law_recovers_planted_rows() {
        let planted = random_planted_tuple::<f64>(8, 2, &SpectrumLaw::Integer(5), &mut SeededRng::new(9)).unwrap();
        let js = joint_diagonalize(&planted.tuple, EPS_RECON).unwrap();
        // Exact lexicographic order sees rounding noise, so compare as sorted multisets.
        let mut want = planted.rows.clone();
        want.sort_by(|a, b| cmp_rows(a, b));
        let mut got: Vec<Vec<f64>> = js.rows().map(|r| r.to_vec()).collect();
        for row in &got {
            for g in row {
                assert!((g - g.round()).abs() < 1e-9 && g.round().abs() <= 5.0);
            }
        }
        got.iter_mut().for_each(|r| r.iter_mut().for_each(|x| *x = x.round()));
        got.sort_by(|a, b| cmp_rows(a, b));
        assert_eq!(got, want);
    }

    #[test]
    fn degenerate_rows_compare_equal() {
        let planted = random_planted_tuple::<f64>(12, 2, &SpectrumLaw::Integer(1), &mut SeededRng::new(4)).unwrap();
        let js = joint_diagonalize(&planted.tuple, EPS_RECON).unwrap();
        for i in 0..js.dim() {
            for j in 0..js.dim() {
                let near = js.row(i).iter().zip(js.row(j)).all(|(a, b)| (a - b).abs() < 1e-6);
                let equal = js.row(i) == js.row(j);
                assert_eq!(near, equal, "rows {i} and {j}");
            }
        }
    }

    #[test]
    fn discretization_examples() {
        let t = CommutingTuple::new(vec![diag(&[0.73, -0.25])]).unwrap();
        let js = joint_diagonalize(&t, EPS_RECON).unwrap();
        let rows = discretized_rows(&js, 4);
        assert_eq!(rows, vec![vec![-1], vec![2]]);
        let ints = CommutingTuple::new(vec![diag(&[-2.0, 3.0])]).unwrap();
        let js = joint_diagonalize(&ints, EPS_RECON).unwrap();
        let disc = discretize_tuple(&js, 5).unwrap();
        assert!((disc.get(0) - &CMatrix::from_real_diag(&[-10.0, 15.0])).max_abs() < 1e-12);
    }
}
