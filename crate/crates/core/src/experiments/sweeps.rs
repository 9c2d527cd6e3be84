//! Torus-side sweeps: de Leeuw stability, transference residuals, and
//! contraction rounding.

use crate::error::{Error, Result};
use crate::functions::BuiltinFn;
use crate::rng::SeededRng;
use crate::spectral::{joint_diagonalize, random_planted_tuple, SpectrumLaw, EPS_RECON};
use crate::torus::{fourier_multiplier_apply, signal_norms, HomogeneousSymbol, TorusSignal};
use crate::transference::{contraction_check, round_contraction, symbol_agreement, verify_conjugation_many, IntegerTuple};
use crate::{Matrix, C64};

use super::pool::run_trials;
use super::record::{with_summaries, Cell, RatioRecord, Table, TrialOutcome};

/// Residual bound for the transference identity.
pub const CONJUGATION_TOL: f64 = 1e-9;
/// Deviation bound for the lattice-symbol agreement.
pub const SYMBOL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DeLeeuwConfig {
    pub seed: u64,
    pub d: usize,
    /// Zero-based symbol coordinate.
    pub k0: usize,
    pub grids: Vec<usize>,
    pub fiber_dim: usize,
    pub family_size: usize,
    /// Frequencies are drawn from `[-max_freq, max_freq]^{d+1}`.
    pub max_freq: i64,
}

impl DeLeeuwConfig {
    pub fn new(seed: u64, d: usize) -> Self {
        Self { seed, d, k0: 0, grids: vec![32, 64, 128], fiber_dim: 2, family_size: 10, max_freq: 4 }
    }
}

/// Coefficients of the fixed signal family: signal `j` draws from stream `j`
/// and has `3 + j mod 3` terms, at least one with nonzero last frequency.
pub fn deleeuw_family(cfg: &DeLeeuwConfig) -> Vec<Vec<(Vec<i64>, Matrix)>> {
    let dim = cfg.d + 1;
    (0..cfg.family_size)
        .map(|j| {
            let mut rng = SeededRng::with_stream(cfg.seed, j as u64);
            (0..3 + j % 3)
                .map(|t| {
                    let mut k: Vec<i64> = (0..dim).map(|_| rng.integer(-cfg.max_freq, cfg.max_freq)).collect();
                    if t == 0 && k[dim - 1] == 0 {
                        k[dim - 1] = 1;
                    }
                    (k, rng.gaussian_matrix::<f64>(cfg.fiber_dim, cfg.fiber_dim))
                })
                .collect()
        })
        .collect()
}

/// For each family member and grid, `||g(grad) W||_{1,inf} / ||W||_1`; one
/// extra `spread` row per member holds `max / min` over the grids.
pub fn deleeuw_sweep(cfg: &DeLeeuwConfig) -> Result<Vec<RatioRecord>> {
    let g = HomogeneousSymbol::new(cfg.d, cfg.k0)?;
    let family = deleeuw_family(cfg);
    let t = RatioRecord {
        kind: "deleeuw".into(),
        seed: cfg.seed,
        instance: None,
        n: cfg.fiber_dim,
        d: cfg.d,
        f_name: format!("g_k0={}", cfg.k0 + 1),
        variant: String::new(),
        numerator: 0.0,
        denominator: 0.0,
        ratio: 0.0,
        skipped: None,
    };
    let outcomes = run_trials(family.len(), |j| {
        let mut rows = Vec::new();
        let mut ratios = Vec::new();
        for &grid in &cfg.grids {
            let w = TorusSignal::from_terms(cfg.d + 1, grid, cfg.fiber_dim, &family[j])?;
            let out = fourier_multiplier_apply(|k| C64::new(g.eval_lattice(k), 0.0), &w);
            let numerator = signal_norms(&out).weak_l1;
            let denominator = signal_norms(&w).l1;
            let ratio = numerator / denominator;
            ratios.push(ratio);
            rows.push(TrialOutcome::Measured(RatioRecord {
                instance: Some(j),
                variant: format!("N={grid}"),
                numerator,
                denominator,
                ratio,
                ..t.clone()
            }));
        }
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = if hi == 0.0 { 1.0 } else { hi / lo };
        rows.push(TrialOutcome::Measured(RatioRecord {
            instance: Some(j),
            variant: "spread".into(),
            numerator: hi,
            denominator: lo,
            ratio: spread,
            ..t.clone()
        }));
        Ok(rows)
    })?;
    Ok(with_summaries(outcomes.into_iter().flatten().collect(), &t))
}

/// Largest `spread` over a de Leeuw sweep.
pub fn deleeuw_spread(records: &[RatioRecord]) -> f64 {
    records.iter().filter(|r| r.variant == "spread" && !r.is_summary()).map(|r| r.ratio).fold(f64::NAN, f64::max)
}

/// How the integer map `h: Z^d -> Z` is made from a real function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegerMap {
    /// `h(i) = floor(f(i))`; a contraction only for integer-valued `f`.
    Floor,
    /// `h = floor((s / 2) f(i / s))`.
    Rounded(usize),
}

pub fn integer_map(f: &BuiltinFn, how: IntegerMap) -> impl Fn(&[i64]) -> i64 + Clone + Send + Sync + 'static {
    let f = f.clone();
    move |i: &[i64]| match how {
        IntegerMap::Floor => {
            let x: Vec<f64> = i.iter().map(|&k| k as f64).collect();
            f.eval(&x).floor() as i64
        }
        IntegerMap::Rounded(s) => round_contraction(f.as_fn::<f64>(), s)(i),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferenceConfig {
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub f: BuiltinFn,
    pub map: IntegerMap,
    pub grid: usize,
    /// Eigenvalues are drawn from `-radius..=radius`.
    pub radius: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferenceRow {
    pub instance: usize,
    /// One-based.
    pub k0: usize,
    pub max_freq: i64,
    pub residual: f64,
    pub lhs_l2: f64,
    pub rhs_l2: f64,
}

/// Per trial: a planted integer tuple, a Gaussian `V`, and the conjugation
/// residual for every `k0`.
pub fn transference_sweep(cfg: &TransferenceConfig) -> Result<Vec<TransferenceRow>> {
    cfg.f.validate(cfg.d)?;
    if cfg.trials == 0 || cfg.n == 0 || cfg.d == 0 {
        return Err(Error::Invalid("need trials, n and d at least 1".into()));
    }
    let h = integer_map(&cfg.f, cfg.map);
    let rows = run_trials(cfg.trials, |trial| {
        let mut rng = SeededRng::with_stream(cfg.seed, trial as u64);
        let planted = random_planted_tuple::<f64>(cfg.n, cfg.d, &SpectrumLaw::Integer(cfg.radius), &mut rng)?;
        let it = IntegerTuple::from_spectrum(&joint_diagonalize(&planted.tuple, EPS_RECON)?)?;
        let v = rng.gaussian_matrix::<f64>(cfg.n, cfg.n);
        let symbols = (0..cfg.d).map(|k0| HomogeneousSymbol::new(cfg.d, k0)).collect::<Result<Vec<_>>>()?;
        let reports = verify_conjugation_many(&it, h.clone(), &symbols, &v, cfg.grid)?;
        Ok(reports
            .into_iter()
            .enumerate()
            .map(|(k0, rep)| TransferenceRow {
                instance: trial,
                k0: k0 + 1,
                max_freq: rep.max_freq,
                residual: rep.residual,
                lhs_l2: rep.lhs_l2,
                rhs_l2: rep.rhs_l2,
            })
            .collect::<Vec<_>>())
    })?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn transference_table(cfg: &TransferenceConfig, rows: &[TransferenceRow]) -> Table {
    let mut t = Table::new(&[
        "kind", "seed", "instance", "n", "d", "f_name", "k0", "grid", "max_freq", "residual", "lhs_l2", "rhs_l2", "passed",
    ]);
    for r in rows {
        t.push(vec![
            "transference".into(),
            cfg.seed.into(),
            r.instance.into(),
            cfg.n.into(),
            cfg.d.into(),
            cfg.f.to_string().into(),
            r.k0.into(),
            cfg.grid.into(),
            r.max_freq.into(),
            r.residual.into(),
            r.lhs_l2.into(),
            r.rhs_l2.into(),
            (r.residual <= CONJUGATION_TOL).into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContractionRow {
    pub f_name: String,
    pub scale: usize,
    pub pairs_checked: u64,
    pub violations: u64,
    pub first_violation: Option<(Vec<i64>, Vec<i64>)>,
    /// Worst symbol-agreement deviation over all `k0`; `None` when `d >= 3`
    /// (agreement is only scanned exhaustively).
    pub symbol_deviation: Option<f64>,
}

/// Contraction rounding and symbol agreement for every function and scale.
pub fn contraction_sweep(fns: &[BuiltinFn], d: usize, r: i64, scales: &[usize], seed: u64) -> Result<Vec<ContractionRow>> {
    for f in fns {
        f.validate(d)?;
        match f.lipschitz(d) {
            Some(l) if l <= 1.0 => {}
            _ => return Err(Error::Invalid(format!("{f} is not a contraction in dimension {d}"))),
        }
    }
    let jobs: Vec<(&BuiltinFn, usize)> = fns.iter().flat_map(|f| scales.iter().map(move |&s| (f, s))).collect();
    run_trials(jobs.len(), |j| {
        let (f, s) = jobs[j];
        let h = round_contraction(f.as_fn::<f64>(), s);
        let check = contraction_check(&h, d, r, seed)?;
        let symbol_deviation = if d <= 2 {
            let mut worst = 0.0f64;
            for k0 in 0..d {
                let dev = symbol_agreement::<f64>(&h, &HomogeneousSymbol::new(d, k0)?, r).max_deviation;
                worst = if dev.is_nan() { dev } else { worst.max(dev) };
            }
            Some(worst)
        } else {
            None
        };
        Ok(ContractionRow {
            f_name: f.to_string(),
            scale: s,
            pairs_checked: check.pairs_checked,
            violations: check.violations,
            first_violation: check.first_violation,
            symbol_deviation,
        })
    })
}

pub fn contraction_table(d: usize, r: i64, rows: &[ContractionRow]) -> Table {
    let mut t = Table::new(&[
        "kind", "d", "r", "f_name", "scale", "pairs_checked", "violations", "first_violation", "symbol_deviation", "passed",
    ]);
    for row in rows {
        let passed = row.violations == 0 && row.symbol_deviation.is_none_or(|x| x <= SYMBOL_TOL);
        t.push(vec![
            "contraction".into(),
            d.into(),
            r.into(),
            row.f_name.as_str().into(),
            row.scale.into(),
            row.pairs_checked.into(),
            row.violations.into(),
            row.first_violation.as_ref().map_or(Cell::Null, |(a, b)| Cell::Text(format!("{a:?} {b:?}"))),
            row.symbol_deviation.into(),
            passed.into(),
        ]);
    }
    t
}

