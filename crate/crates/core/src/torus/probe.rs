use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::Real;

/// Scalar trigonometric polynomial `sum_k c_k e^{i <k, t>}` on `T^D`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial<T> {
    dim: usize,
    terms: Vec<(Vec<i64>, Complex<T>)>,
}

impl<T: Real> TrigPolynomial<T> {
    pub fn new(dim: usize, terms: Vec<(Vec<i64>, Complex<T>)>) -> Result<Self> {
        if dim == 0 || terms.iter().any(|(k, _)| k.len() != dim) {
            return Err(Error::DimMismatch("frequency vectors must have the torus dimension".into()));
        }
        Ok(Self { dim, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(Vec<i64>, Complex<T>)] {
        &self.terms
    }

    /// Largest `|k_j|` over all terms.
    pub fn degree(&self) -> u64 {
        self.terms.iter().flat_map(|(k, _)| k.iter().map(|x| x.unsigned_abs())).max().unwrap_or(0)
    }

    pub fn eval(&self, t: &[T]) -> Complex<T> {
        self.terms.iter().fold(Complex::zero(), |acc, (k, c)| {
            let phase = k.iter().zip(t).fold(T::zero(), |a, (&kj, &tj)| a + T::from_i64_lossy(kj) * tj);
            acc + c * Complex::from_polar(T::one(), phase)
        })
    }

    /// `||W||_{L1(T^D)}` (Haar measure `2 pi` per axis) by the midpoint rule
    /// with `m` nodes per axis.
    pub fn torus_l1(&self, m: usize) -> T {
        let h = T::TAU() / T::from_usize_lossy(m);
        let nodes: Vec<T> = (0..m).map(|i| h * (T::from_usize_lossy(i) + T::lit(0.5))).collect();
        let tables = self.phase_tables(&nodes);
        let mut total = T::zero();
        for_each_node(self.dim, m, |idx| total = total + self.eval_tabled(&tables, idx).norm());
        total * h.powi(self.dim as i32)
    }

    /// `tables[term][axis][node] = e^{i k_axis t_node}` (coefficient folded into axis 0).
    fn phase_tables(&self, nodes: &[T]) -> Vec<Vec<Vec<Complex<T>>>> {
        self.terms
            .iter()
            .map(|(k, c)| {
                (0..self.dim)
                    .map(|a| {
                        nodes
                            .iter()
                            .map(|&t| {
                                let e = Complex::from_polar(T::one(), T::from_i64_lossy(k[a]) * t);
                                if a == 0 { e * c } else { e }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    fn eval_tabled(&self, tables: &[Vec<Vec<Complex<T>>>], idx: &[usize]) -> Complex<T> {
        tables.iter().fold(Complex::zero(), |acc, term| {
            acc + term.iter().zip(idx).fold(Complex::new(T::one(), T::zero()), |p, (axis, &i)| p * axis[i])
        })
    }
}

fn for_each_node(dim: usize, m: usize, mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; dim];
    let total = m.pow(dim as u32);
    for mut p in 0..total {
        for slot in idx.iter_mut().rev() {
            *slot = p % m;
            p /= m;
        }
        f(&idx);
    }
}

/// Outcome of a periodization probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport<T> {
    /// `integral / ((2 pi)^{-D} ||W||_{L1(T^D)})`; tends to 1 as `l` grows.
    pub ratio: T,
    /// Midpoint-rule value of `int_{[-R, R]^D} |per(W)(t)| G_l(t) dt`.
    pub integral: T,
    pub torus_l1: T,
    /// Midpoint-rule mass of `G_l` on the same grid; its distance from 1 is
    /// the combined truncation and quadrature error of the Gaussian.
    pub gaussian_mass: T,
    /// Step actually used (`2R / ceil(2R / h)`, never above the requested `h`).
    pub step: T,
}

/// Nodes per axis for the torus `L1` reference norm.
const TORUS_NODES: [usize; 2] = [8192, 1024];

/// Integrates `|per(W)| G_l` over `[-R, R]^D`, where
/// `G_l(t) = (l sqrt(2 pi))^{-D} exp(-|t|^2 / 2 l^2)`, and compares with
/// `(2 pi)^{-D} ||W||_{L1(T^D)}`.
///
/// Guards: `D <= 2`, `l > 0`, `R >= 8 l`, `h <= 2 pi / 64`.
pub fn periodization_probe<T: Real>(w: &TrigPolynomial<T>, l: T, radius: T, h: T) -> Result<ProbeReport<T>> {
    let dim = w.dim();
    if dim > 2 {
        return Err(Error::GuardViolation(format!("torus dimension {dim} exceeds 2")));
    }
    if !(l > T::zero()) || !(radius >= T::lit(8.0) * l) {
        return Err(Error::GuardViolation("need l > 0 and R >= 8 l".into()));
    }
    if !(h > T::zero()) || h > T::TAU() / T::lit(64.0) {
        return Err(Error::GuardViolation("need 0 < h <= 2 pi / 64".into()));
    }
    let cells = ((radius + radius) / h).ceil().to_usize().ok_or_else(|| Error::GuardViolation("grid too large".into()))?;
    let step = (radius + radius) / T::from_usize_lossy(cells);
    let nodes: Vec<T> = (0..cells).map(|i| -radius + step * (T::from_usize_lossy(i) + T::lit(0.5))).collect();
    let norm1 = T::one() / (l * T::TAU().sqrt());
    let gauss: Vec<T> = nodes.iter().map(|&t| norm1 * (-(t * t) / (T::lit(2.0) * l * l)).exp()).collect();
    let tables = w.phase_tables(&nodes);

    let mut integral = T::zero();
    let mut mass = T::zero();
    for_each_node(dim, cells, |idx| {
        let g = idx.iter().fold(T::one(), |acc, &i| acc * gauss[i]);
        integral = integral + w.eval_tabled(&tables, idx).norm() * g;
        mass = mass + g;
    });
    let cell = step.powi(dim as i32);
    integral = integral * cell;
    mass = mass * cell;

    let torus_l1 = w.torus_l1(TORUS_NODES[dim - 1]);
    let reference = torus_l1 / T::TAU().powi(dim as i32);
    Ok(ProbeReport { ratio: integral / reference, integral, torus_l1, gaussian_mass: mass, step })
}
