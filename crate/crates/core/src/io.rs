//! JSON forms of matrices and commuting tuples.
//!
//! A matrix is `{"dim": n, "entries": [[re, im], ...]}` in row-major order; a
//! tuple is a JSON array of matrices.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::spectral::{CommutingTuple, HermitianMatrix};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixWire {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixWire {
    pub fn from_matrix<T: Real>(m: &CMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimMismatch(format!("{}x{} matrix is not square", m.rows(), m.cols())));
        }
        Ok(Self { dim: m.rows(), entries: m.as_slice().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect() })
    }

    pub fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>> {
        let data = self.entries.iter().map(|p| Complex::new(T::lit(p[0]), T::lit(p[1]))).collect();
        CMatrix::from_vec(self.dim, self.dim, data)
    }
}

pub fn matrix_to_json<T: Real>(m: &CMatrix<T>) -> Result<String> {
    Ok(serde_json::to_string(&MatrixWire::from_matrix(m)?)?)
}

pub fn matrix_from_json<T: Real>(s: &str) -> Result<CMatrix<T>> {
    serde_json::from_str::<MatrixWire>(s)?.to_matrix()
}

pub fn tuple_to_json<T: Real>(t: &CommutingTuple<T>) -> Result<String> {
    let wires = t.matrices().iter().map(|h| MatrixWire::from_matrix(h.as_matrix())).collect::<Result<Vec<_>>>()?;
    Ok(serde_json::to_string(&wires)?)
}

/// Parses and validates a tuple (Hermitian, pairwise commuting).
pub fn tuple_from_json<T: Real>(s: &str) -> Result<CommutingTuple<T>> {
    let wires: Vec<MatrixWire> = serde_json::from_str(s)?;
    let ms = wires.iter().map(|w| HermitianMatrix::new(w.to_matrix()?)).collect::<Result<Vec<_>>>()?;
    CommutingTuple::new(ms)
}

pub fn read_tuple<T: Real>(path: &Path) -> Result<CommutingTuple<T>> {
    tuple_from_json(&std::fs::read_to_string(path)?)
}

pub fn read_matrix<T: Real>(path: &Path) -> Result<CMatrix<T>> {
    matrix_from_json(&std::fs::read_to_string(path)?)
}
