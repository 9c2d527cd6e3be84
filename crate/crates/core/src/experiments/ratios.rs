//! Seeded sweeps measuring both sides of the weak-type estimates.

use crate::doi::{block_difference_embed, divided_difference_symbol, doi_apply};
use crate::error::{Error, Result};
use crate::norms::{schatten_norm, singular_values, trace_norm, weak_l1, Exponent};
use crate::rng::SeededRng;
use crate::spectral::{apply_function, joint_diagonalize, random_commuting_tuple, CommutingTuple, JointSpectrum, EPS_RECON};
use crate::{Matrix, Spectrum, Tuple};

use super::config::ExperimentConfig;
use super::pool::run_trials;
use super::record::{ratio, with_summaries, RatioRecord, TrialOutcome};

/// Largest admissible corner-block mismatch in [`difference_measure`].
pub const CROSS_CHECK_TOL: f64 = 1e-9;

type RealFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Measured numerator and denominator of one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measure {
    pub numerator: f64,
    pub denominator: f64,
}

impl Measure {
    pub fn ratio(&self) -> f64 {
        ratio(self.numerator, self.denominator)
    }
}

fn diagonalize(t: &Tuple) -> Result<Spectrum> {
    joint_diagonalize(t, EPS_RECON)
}

/// `||[f(A), B]||_{1,inf}` against `L max_k ||[A_k, B]||_1`.
pub fn commutator_measure(js: &Spectrum, f: &RealFn, lipschitz: f64, b: &Matrix) -> Result<Measure> {
    let fa = apply_function(js, f)?;
    let numerator = weak_l1(&singular_values(&fa.as_matrix().commutator(b)?));
    let mut worst = 0.0f64;
    for k in 0..js.d() {
        worst = worst.max(trace_norm(&singular_values(&js.source().get(k).commutator(b)?)));
    }
    Ok(Measure { numerator, denominator: lipschitz * worst })
}

/// Difference measure and the corner-block cross-check residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceMeasure {
    pub measure: Measure,
    /// Relative Frobenius distance between `f(X) - f(Y)` and the corner of
    /// `[f(A), B]` from the block embedding.
    pub cross_check: f64,
}

/// `||f(X) - f(Y)||_{1,inf}` against `L max_k ||X_k - Y_k||_1`.
pub fn difference_measure(x: &Tuple, y: &Tuple, f: &RealFn, lipschitz: f64) -> Result<DifferenceMeasure> {
    let n = x.dim();
    let diff = apply_function(&diagonalize(x)?, f)?.as_matrix() - apply_function(&diagonalize(y)?, f)?.as_matrix();
    let (a, b) = block_difference_embed(x, y)?;
    let corner = apply_function(&diagonalize(&a)?, f)?.as_matrix().commutator(b.as_matrix())?.block(0, n, n, n);
    let cross_check = (&corner - &diff).frobenius_norm() / (1.0 + diff.frobenius_norm());
    let mut worst = 0.0f64;
    for k in 0..x.d() {
        worst = worst.max(trace_norm(&singular_values(&(x.get(k) - y.get(k)))));
    }
    Ok(DifferenceMeasure {
        measure: Measure { numerator: weak_l1(&singular_values(&diff)), denominator: lipschitz * worst },
        cross_check,
    })
}

/// `||T_{f_k0}(V)||_{1,inf}` against `L ||V||_1`, for each zero-based `k0`.
pub fn doi_measures(js: &Spectrum, f: impl Fn(&[f64]) -> f64 + Clone + Send + Sync + 'static, lipschitz: f64, v: &Matrix) -> Result<Vec<Measure>> {
    let denominator = lipschitz * trace_norm(&singular_values(v));
    (0..js.d())
        .map(|k0| {
            let t = doi_apply(js, &divided_difference_symbol(js.d(), f.clone(), k0)?, v)?;
            Ok(Measure { numerator: weak_l1(&singular_values(&t)), denominator })
        })
        .collect()
}

/// `||T_{f_k0}(V)||_p / ||V||_p` for each zero-based `k0`.
pub fn lp_measures(js: &Spectrum, f: impl Fn(&[f64]) -> f64 + Clone + Send + Sync + 'static, p: f64, v: &Matrix) -> Result<Vec<Measure>> {
    check_exponent(p)?;
    let e = Exponent::Finite(p);
    let denominator = schatten_norm(&singular_values(v), e)?;
    (0..js.d())
        .map(|k0| {
            let t = doi_apply(js, &divided_difference_symbol(js.d(), f.clone(), k0)?, v)?;
            Ok(Measure { numerator: schatten_norm(&singular_values(&t), e)?, denominator })
        })
        .collect()
}

fn check_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::BadExponent(p))
    }
}

fn template(kind: &str, cfg: &ExperimentConfig, d: usize) -> RatioRecord {
    RatioRecord {
        kind: kind.to_string(),
        seed: cfg.seed,
        instance: None,
        n: cfg.n,
        d,
        f_name: cfg.f.to_string(),
        variant: String::new(),
        numerator: 0.0,
        denominator: 0.0,
        ratio: 0.0,
        skipped: None,
    }
}

fn outcome(t: &RatioRecord, trial: usize, variant: String, m: Measure) -> TrialOutcome {
    // A vanishing right-hand side makes the instance degenerate.
    if m.denominator > 0.0 {
        TrialOutcome::Measured(RatioRecord {
            instance: Some(trial),
            variant,
            numerator: m.numerator,
            denominator: m.denominator,
            ratio: m.ratio(),
            ..t.clone()
        })
    } else {
        TrialOutcome::Skipped { variant }
    }
}

fn trial_rng(cfg: &ExperimentConfig, trial: usize) -> SeededRng {
    SeededRng::with_stream(cfg.seed, trial as u64)
}

fn draw_tuple(cfg: &ExperimentConfig, d: usize, rng: &mut SeededRng) -> Result<Tuple> {
    random_commuting_tuple(cfg.n, d, &cfg.law, rng)
}

/// Commutator sweep: per trial a random tuple and a Gaussian `B`.
pub fn commutator_ratio(cfg: &ExperimentConfig) -> Result<Vec<RatioRecord>> {
    cfg.validate()?;
    let t = template("commutator", cfg, cfg.d);
    let f = cfg.f.as_fn::<f64>();
    let outcomes = run_trials(cfg.trials, |trial| {
        let mut rng = trial_rng(cfg, trial);
        let tuple = draw_tuple(cfg, cfg.d, &mut rng)?;
        let b = rng.gaussian_matrix::<f64>(cfg.n, cfg.n);
        let m = commutator_measure(&diagonalize(&tuple)?, &f, cfg.lipschitz_bound, &b)?;
        Ok(vec![outcome(&t, trial, "all".into(), m)])
    })?;
    Ok(with_summaries(outcomes.into_iter().flatten().collect(), &t))
}

fn difference_sweep(cfg: &ExperimentConfig, kind: &str, d: usize, draw: impl Fn(&mut SeededRng) -> Result<(Tuple, Tuple)> + Sync) -> Result<Vec<RatioRecord>> {
    cfg.validate()?;
    cfg.f.validate(d)?;
    let t = template(kind, cfg, d);
    let f = cfg.f.as_fn::<f64>();
    let outcomes = run_trials(cfg.trials, |trial| {
        let mut rng = trial_rng(cfg, trial);
        let (x, y) = draw(&mut rng)?;
        let dm = difference_measure(&x, &y, &f, cfg.lipschitz_bound)?;
        if !(dm.cross_check <= CROSS_CHECK_TOL) {
            return Err(Error::GuardViolation(format!(
                "trial {trial}: block-embedding cross-check residual {:e}",
                dm.cross_check
            )));
        }
        Ok(vec![outcome(&t, trial, "all".into(), dm.measure)])
    })?;
    Ok(with_summaries(outcomes.into_iter().flatten().collect(), &t))
}

/// Difference sweep: per trial two independent random tuples.
pub fn difference_ratio(cfg: &ExperimentConfig) -> Result<Vec<RatioRecord>> {
    difference_sweep(cfg, "difference", cfg.d, |rng| Ok((draw_tuple(cfg, cfg.d, rng)?, draw_tuple(cfg, cfg.d, rng)?)))
}

/// `X_1 + i X_2`.
pub fn normal_from_pair(x: &Tuple) -> Result<Matrix> {
    if x.d() != 2 {
        return Err(Error::DimMismatch(format!("a normal matrix needs a commuting pair, got d = {}", x.d())));
    }
    Ok(x.get(0) + &x.get(1).scale_complex(crate::C64::new(0.0, 1.0)))
}

/// `||X X* - X* X||_F / ||X||_F^2` for a square matrix.
pub fn normality_defect(x: &Matrix) -> f64 {
    let a = x.adjoint();
    let scale = x.frobenius_norm().powi(2);
    let defect = (&(x * &a) - &(&a * x)).frobenius_norm();
    if scale == 0.0 {
        defect
    } else {
        defect / scale
    }
}

/// Normal-operator sweep: commuting pairs read as `X = X_1 + i X_2` and `f`
/// evaluated through `C = R^2`.
pub fn normal_ratio(cfg: &ExperimentConfig) -> Result<Vec<RatioRecord>> {
    difference_sweep(cfg, "normal", 2, |rng| {
        let x = draw_tuple(cfg, 2, rng)?;
        let y = draw_tuple(cfg, 2, rng)?;
        for t in [&x, &y] {
            let defect = normality_defect(&normal_from_pair(t)?);
            if defect > 1e-10 {
                return Err(Error::GuardViolation(format!("drawn operator is not normal (defect {defect:e})")));
            }
        }
        Ok((x, y))
    })
}

/// DOI sweep: per trial a random tuple and a Gaussian `V`, one variant per `k0`.
pub fn doi_ratio(cfg: &ExperimentConfig) -> Result<Vec<RatioRecord>> {
    cfg.validate()?;
    let t = template("doi", cfg, cfg.d);
    let f = cfg.f.as_fn::<f64>();
    let outcomes = run_trials(cfg.trials, |trial| {
        let mut rng = trial_rng(cfg, trial);
        let tuple = draw_tuple(cfg, cfg.d, &mut rng)?;
        let v = rng.gaussian_matrix::<f64>(cfg.n, cfg.n);
        let ms = doi_measures(&diagonalize(&tuple)?, f.clone(), cfg.lipschitz_bound, &v)?;
        Ok(ms.into_iter().enumerate().map(|(k0, m)| outcome(&t, trial, format!("k0={}", k0 + 1), m)).collect::<Vec<_>>())
    })?;
    Ok(with_summaries(outcomes.into_iter().flatten().collect(), &t))
}

/// Schatten-`p` sweep, one variant per `(p, k0)`.
pub fn lp_ratio(cfg: &ExperimentConfig, ps: &[f64]) -> Result<Vec<RatioRecord>> {
    cfg.validate()?;
    for &p in ps {
        check_exponent(p)?;
    }
    let t = template("lp", cfg, cfg.d);
    let f = cfg.f.as_fn::<f64>();
    let outcomes = run_trials(cfg.trials, |trial| {
        let mut rng = trial_rng(cfg, trial);
        let tuple = draw_tuple(cfg, cfg.d, &mut rng)?;
        let v = rng.gaussian_matrix::<f64>(cfg.n, cfg.n);
        let js = diagonalize(&tuple)?;
        let mut out = Vec::new();
        for &p in ps {
            for (k0, m) in lp_measures(&js, f.clone(), p, &v)?.into_iter().enumerate() {
                out.push(outcome(&t, trial, format!("p={p},k0={}", k0 + 1), m));
            }
        }
        Ok(out)
    })?;
    Ok(with_summaries(outcomes.into_iter().flatten().collect(), &t))
}

/// Joint spectrum of an explicitly given tuple (used by fixed examples).
pub fn spectrum_of(matrices: Vec<crate::Hermitian>) -> Result<JointSpectrum<f64>> {
    diagonalize(&CommutingTuple::new(matrices)?)
}
