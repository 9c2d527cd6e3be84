use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::functions::BuiltinFn;
use crate::spectral::SpectrumLaw;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    JsonLines,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" | "jsonl" | "json-lines" => Ok(OutputFormat::JsonLines),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Parse(format!("unknown output format {other:?}"))),
        }
    }
}

/// Parameters shared by every sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Matrix size.
    pub n: usize,
    /// Number of commuting matrices.
    pub d: usize,
    pub trials: usize,
    pub f: BuiltinFn,
    pub lipschitz_bound: f64,
    pub law: SpectrumLaw,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl ExperimentConfig {
    /// Config with the exact Lipschitz constant of `f` as the bound (`1` for
    /// constants, whose ratios vanish anyway).
    pub fn new(seed: u64, n: usize, d: usize, trials: usize, f: BuiltinFn) -> Result<Self> {
        let exact = f
            .lipschitz(d)
            .ok_or_else(|| Error::Invalid(format!("{f} has no global Lipschitz constant; supply one explicitly")))?;
        Self::with_bound(seed, n, d, trials, f, if exact > 0.0 { exact } else { 1.0 })
    }

    /// Config with a caller-supplied Lipschitz bound.
    pub fn with_bound(seed: u64, n: usize, d: usize, trials: usize, f: BuiltinFn, lipschitz_bound: f64) -> Result<Self> {
        let cfg = Self {
            seed,
            n,
            d,
            trials,
            f,
            lipschitz_bound,
            law: SpectrumLaw::Uniform,
            output_path: None,
            output_format: OutputFormat::JsonLines,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Invalid("trials must be at least 1".into()));
        }
        if self.n == 0 || self.d == 0 {
            return Err(Error::Invalid(format!("need n >= 1 and d >= 1 (got n = {}, d = {})", self.n, self.d)));
        }
        if !(self.lipschitz_bound > 0.0) || !self.lipschitz_bound.is_finite() {
            return Err(Error::Invalid(format!("lipschitz bound must be positive (got {})", self.lipschitz_bound)));
        }
        self.f.validate(self.d)
    }
}
