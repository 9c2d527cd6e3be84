//! Built-in test functions `f: R^d -> R`, each with its exact Euclidean
//! Lipschitz constant.

use std::fmt;
use std::str::FromStr;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::Real;

/// Offset of the crease hyperplane `<(1,...,1)/sqrt(d), x> = CREASE_OFFSET`.
pub const CREASE_OFFSET: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinFn {
    /// `sum_k x_k / sqrt(d)`; the identity when `d = 1`.
    Identity,
    /// `|sum_k x_k| / sqrt(d)`; `|x|` when `d = 1`.
    Abs,
    /// `|x|_2`.
    EuclidNorm,
    /// `max_k |x_k| / sqrt(d)`.
    MaxAbs,
    /// `x_k`, one-based as written on the command line.
    Coordinate(usize),
    /// Distance to the hyperplane `<(1,...,1)/sqrt(d), x> = 1/4`.
    Crease,
    /// `sum_i c_i x_1^i`.
    Poly(Vec<f64>),
    Constant(f64),
}

impl BuiltinFn {
    /// Every parameter-free built-in with Lipschitz constant at most one in
    /// dimension `d`, including all coordinate projections.
    pub fn contractions(d: usize) -> Vec<BuiltinFn> {
        let mut out = vec![BuiltinFn::Identity, BuiltinFn::Abs, BuiltinFn::EuclidNorm, BuiltinFn::MaxAbs, BuiltinFn::Crease];
        out.extend((1..=d).map(BuiltinFn::Coordinate));
        out
    }

    pub fn eval<T: Real>(&self, x: &[T]) -> T {
        let d = T::from_usize_lossy(x.len().max(1));
        match self {
            BuiltinFn::Identity => x.iter().fold(T::zero(), |a, &b| a + b) / d.sqrt(),
            BuiltinFn::Abs => Float::abs(x.iter().fold(T::zero(), |a, &b| a + b)) / d.sqrt(),
            BuiltinFn::EuclidNorm => x.iter().fold(T::zero(), |a, &b| a + b * b).sqrt(),
            BuiltinFn::MaxAbs => x.iter().fold(T::zero(), |a, &b| a.max(Float::abs(b))) / d.sqrt(),
            BuiltinFn::Coordinate(k) => x[k - 1],
            BuiltinFn::Crease => Float::abs(x.iter().fold(T::zero(), |a, &b| a + b) / d.sqrt() - T::lit(CREASE_OFFSET)),
            BuiltinFn::Poly(c) => c.iter().rev().fold(T::zero(), |acc, &ci| acc * x[0] + T::lit(ci)),
            BuiltinFn::Constant(c) => T::lit(*c),
        }
    }

    /// Exact Lipschitz constant on `R^d`, or `None` when unbounded.
    pub fn lipschitz(&self, d: usize) -> Option<f64> {
        match self {
            BuiltinFn::MaxAbs => Some(1.0 / (d.max(1) as f64).sqrt()),
            BuiltinFn::Poly(c) => match c.len() {
                0 | 1 => Some(0.0),
                2 => Some(c[1].abs()),
                _ if c[2..].iter().all(|&x| x == 0.0) => Some(c[1].abs()),
                _ => None,
            },
            BuiltinFn::Constant(_) => Some(0.0),
            _ => Some(1.0),
        }
    }

    /// Checks that the function is defined in dimension `d`.
    pub fn validate(&self, d: usize) -> Result<()> {
        match self {
            BuiltinFn::Coordinate(k) if *k == 0 || *k > d => {
                Err(Error::Invalid(format!("coordinate:{k} is out of range for d = {d}")))
            }
            _ => Ok(()),
        }
    }

    /// Closure form for the spectral routines.
    pub fn as_fn<T: Real>(&self) -> impl Fn(&[T]) -> T + Clone + Send + Sync + 'static {
        let me = self.clone();
        move |x: &[T]| me.eval(x)
    }
}

impl fmt::Display for BuiltinFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinFn::Identity => write!(f, "id"),
            BuiltinFn::Abs => write!(f, "abs"),
            BuiltinFn::EuclidNorm => write!(f, "euclid-norm"),
            BuiltinFn::MaxAbs => write!(f, "max-abs"),
            BuiltinFn::Coordinate(k) => write!(f, "coordinate:{k}"),
            BuiltinFn::Crease => write!(f, "crease"),
            BuiltinFn::Poly(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            BuiltinFn::Constant(c) => write!(f, "const:{c}"),
        }
    }
}

impl FromStr for BuiltinFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownFunction(s.to_string());
        Ok(match s {
            "id" | "identity" => BuiltinFn::Identity,
            "abs" => BuiltinFn::Abs,
            "euclid-norm" => BuiltinFn::EuclidNorm,
            "max-abs" => BuiltinFn::MaxAbs,
            "crease" => BuiltinFn::Crease,
            _ => {
                if let Some(k) = s.strip_prefix("coordinate:") {
                    BuiltinFn::Coordinate(k.parse().map_err(|_| unknown())?)
                } else if let Some(c) = s.strip_prefix("poly:") {
                    let coeffs = c.split(',').map(|x| x.trim().parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>().map_err(|_| unknown())?;
                    BuiltinFn::Poly(coeffs)
                } else if let Some(c) = s.strip_prefix("const:") {
                    BuiltinFn::Constant(c.parse().map_err(|_| unknown())?)
                } else {
                    return Err(unknown());
                }
            }
        })
    }
}
