//! Singular value functions, Schatten norms, and the weak-L1 quasi-norm.
//!
//! A [`SingularValueProfile`] is the decreasing step function `mu(t)` taking
//! value `s_i` on an interval of length `w_i`. Plain matrices carry unit
//! weights; sampled torus signals carry the grid cell measure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{singular_values_desc, CMatrix};
use crate::scalar::cmp_real;
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SingularValueProfile<T> {
    values: Vec<T>,
    weights: Vec<T>,
}

/// Exponent of a Schatten norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

impl<T: Real> SingularValueProfile<T> {
    /// Validates an already sorted profile.
    pub fn new(values: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::DimMismatch(format!("{} values but {} weights", values.len(), weights.len())));
        }
        if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
            return Err(Error::Invalid("singular values must be finite and nonnegative".into()));
        }
        if weights.iter().any(|w| !(*w > T::zero()) || !w.is_finite()) {
            return Err(Error::Invalid("weights must be finite and positive".into()));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid("values must be sorted descending".into()));
        }
        Ok(Self { values, weights })
    }

    /// Sorts `(value, weight)` pairs descending by value and validates.
    pub fn from_pairs(mut pairs: Vec<(T, T)>) -> Result<Self> {
        pairs.sort_by(|a, b| cmp_real(&b.0, &a.0));
        let (values, weights) = pairs.into_iter().unzip();
        Self::new(values, weights)
    }

    /// Unit-weight profile from unsorted values.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        Self::from_pairs(values.into_iter().map(|v| (v, T::one())).collect())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Profile of `c x` for `c >= 0`.
    pub fn scaled(&self, c: T) -> Self {
        Self { values: self.values.iter().map(|&v| v * c).collect(), weights: self.weights.clone() }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.values.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Descending singular values with unit weights.
pub fn singular_values<T: Real>(x: &CMatrix<T>) -> SingularValueProfile<T> {
    let values = singular_values_desc(x);
    let weights = vec![T::one(); values.len()];
    SingularValueProfile { values, weights }
}

/// `mu(t)`: the value of the step whose cumulative weight first exceeds `t`,
/// and `0` past the total weight.
pub fn mu_at<T: Real>(p: &SingularValueProfile<T>, t: T) -> Result<T> {
    if t < T::zero() || t.is_nan() {
        return Err(Error::NegativeT(t.as_f64()));
    }
    let mut cumulative = T::zero();
    for (v, w) in p.pairs() {
        cumulative = cumulative + w;
        if cumulative > t {
            return Ok(v);
        }
    }
    Ok(T::zero())
}

/// `(sum_i w_i s_i^q)^{1/q}`, or `max_i s_i` for `q = infinity`.
pub fn schatten_norm<T: Real>(p: &SingularValueProfile<T>, q: Exponent<T>) -> Result<T> {
    match q {
        Exponent::Infinity => Ok(p.values.first().copied().unwrap_or_else(T::zero)),
        Exponent::Finite(q) if q >= T::one() && q.is_finite() => {
            // Factor out the largest value to avoid overflow for large q.
            let top = p.values.first().copied().unwrap_or_else(T::zero);
            if top == T::zero() {
                return Ok(T::zero());
            }
            let sum = p.pairs().fold(T::zero(), |acc, (v, w)| acc + w * (v / top).powf(q));
            Ok(top * sum.powf(T::one() / q))
        }
        Exponent::Finite(q) => Err(Error::BadExponent(q.as_f64())),
    }
}

/// `||x||_1 = sum_i w_i s_i`.
pub fn trace_norm<T: Real>(p: &SingularValueProfile<T>) -> T {
    p.pairs().fold(T::zero(), |acc, (v, w)| acc + v * w)
}

/// `sup_t t mu(t)`, attained at a right endpoint of some step:
/// `max_i (w_1 + ... + w_i) s_i`.
pub fn weak_l1<T: Real>(p: &SingularValueProfile<T>) -> T {
    let mut cumulative = T::zero();
    let mut best = T::zero();
    for (v, w) in p.pairs() {
        cumulative = cumulative + w;
        best = best.max(cumulative * v);
    }
    best
}

/// Profile of `x (x) y` from the profiles of `x` and `y`: all products
/// `s_i t_j` with weights `w_i v_j`, re-sorted.
pub fn tensor_profile<T: Real>(p: &SingularValueProfile<T>, q: &SingularValueProfile<T>) -> SingularValueProfile<T> {
    let pairs = p.pairs().flat_map(|(s, w)| q.pairs().map(move |(t, v)| (s * t, w * v))).collect();
    SingularValueProfile::from_pairs(pairs).expect("products of valid profiles are valid")
}

#[derive(Serialize, Deserialize)]
struct ProfileWire(Vec<[f64; 2]>);

impl<T: Real> Serialize for SingularValueProfile<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ProfileWire(self.pairs().map(|(v, w)| [v.as_f64(), w.as_f64()]).collect()).serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for SingularValueProfile<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = ProfileWire::deserialize(d)?;
        Self::new(wire.0.iter().map(|p| T::lit(p[0])).collect(), wire.0.iter().map(|p| T::lit(p[1])).collect())
            .map_err(serde::de::Error::custom)
    }
}
