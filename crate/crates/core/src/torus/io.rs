//! On-disk formats for torus signals.
//!
//! JSON: `{"torus_dim": D, "grid_size": N, "fiber_dim": n, "samples": [[re, im], ...]}`
//! in the in-memory layout.
//!
//! Binary: an 8-byte header followed by `N^D n^2` little-endian `f64` pairs
//! `(re, im)` in the same layout. Header bytes: `b"TS"`, format version `1`,
//! `D` as `u8`, `N` as `u16` LE, `n` as `u16` LE.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::TorusSignal;
use crate::error::{Error, Result};
use crate::Real;

const MAGIC: [u8; 2] = *b"TS";
const VERSION: u8 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalFormat {
    Json,
    Binary,
}

impl SignalFormat {
    /// `.json` selects JSON; anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => SignalFormat::Json,
            _ => SignalFormat::Binary,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SignalWire {
    torus_dim: usize,
    grid_size: usize,
    fiber_dim: usize,
    samples: Vec<[f64; 2]>,
}

impl<T: Real> TorusSignal<T> {
    pub fn to_json(&self) -> Result<String> {
        let wire = SignalWire {
            torus_dim: self.torus_dim(),
            grid_size: self.grid_size(),
            fiber_dim: self.fiber_dim(),
            samples: self.samples().iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect(),
        };
        Ok(serde_json::to_string(&wire)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: SignalWire = serde_json::from_str(s)?;
        let samples = wire.samples.iter().map(|p| Complex::new(T::lit(p[0]), T::lit(p[1]))).collect();
        Self::from_samples(wire.torus_dim, wire.grid_size, wire.fiber_dim, samples)
    }

    pub fn write_binary(&self, mut out: impl Write) -> Result<()> {
        let d = u8::try_from(self.torus_dim()).map_err(|_| Error::Invalid("torus dimension exceeds 255".into()))?;
        let n = u16::try_from(self.grid_size()).map_err(|_| Error::Invalid("grid size exceeds 65535".into()))?;
        let f = u16::try_from(self.fiber_dim()).map_err(|_| Error::Invalid("fiber dimension exceeds 65535".into()))?;
        let mut header = Vec::with_capacity(8);
        header.extend_from_slice(&MAGIC);
        header.push(VERSION);
        header.push(d);
        header.extend_from_slice(&n.to_le_bytes());
        header.extend_from_slice(&f.to_le_bytes());
        out.write_all(&header)?;
        let mut body = Vec::with_capacity(self.samples().len() * 16);
        for z in self.samples() {
            body.extend_from_slice(&z.re.as_f64().to_le_bytes());
            body.extend_from_slice(&z.im.as_f64().to_le_bytes());
        }
        out.write_all(&body)?;
        Ok(())
    }

    pub fn read_binary(mut input: impl Read) -> Result<Self> {
        let mut header = [0u8; 8];
        input.read_exact(&mut header)?;
        if header[..2] != MAGIC || header[2] != VERSION {
            return Err(Error::Parse("not a version-1 torus signal file".into()));
        }
        let d = header[3] as usize;
        let n = u16::from_le_bytes([header[4], header[5]]) as usize;
        let f = u16::from_le_bytes([header[6], header[7]]) as usize;
        let mut body = Vec::new();
        input.read_to_end(&mut body)?;
        if body.len() % 16 != 0 {
            return Err(Error::Parse("truncated sample data".into()));
        }
        let samples = body
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        Self::from_samples(d, n, f, samples)
    }
}

pub fn write_signal<T: Real>(w: &TorusSignal<T>, path: &Path) -> Result<()> {
    match SignalFormat::from_path(path) {
        SignalFormat::Json => std::fs::write(path, w.to_json()?)?,
        SignalFormat::Binary => w.write_binary(std::io::BufWriter::new(std::fs::File::create(path)?))?,
    }
    Ok(())
}

pub fn read_signal<T: Real>(path: &Path) -> Result<TorusSignal<T>> {
    match SignalFormat::from_path(path) {
        SignalFormat::Json => TorusSignal::from_json(&std::fs::read_to_string(path)?),
        SignalFormat::Binary => TorusSignal::read_binary(std::io::BufReader::new(std::fs::File::open(path)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_header_layout() {
        let w = TorusSignal::<f64>::character(2, 3, &[1, 0]).unwrap();
        let mut buf = Vec::new();
        w.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], &[b'T', b'S', 1, 2, 3, 0, 1, 0]);
        assert_eq!(buf.len(), 8 + 9 * 16);
        assert_eq!(TorusSignal::<f64>::read_binary(&buf[..]).unwrap(), w);
        assert!(TorusSignal::<f64>::read_binary(&buf[..20]).is_err());
    }

    #[test]
    fn json_fields() {
        let w = TorusSignal::<f64>::character(1, 2, &[1]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&w.to_json().unwrap()).unwrap();
        assert_eq!(v["torus_dim"], 1);
        assert_eq!(v["grid_size"], 2);
        assert_eq!(v["fiber_dim"], 1);
        assert_eq!(v["samples"].as_array().unwrap().len(), 2);
    }
}
