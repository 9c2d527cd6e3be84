//! Self-test of every exact identity and norm inequality, with a
//! deterministic machine-readable report.

use std::f64::consts::TAU;

use crate::doi::{divided_difference_symbol, doi_apply, doi_l2_norm, perturbation_residual, symbol_product_check};
use crate::error::Result;
use crate::functions::BuiltinFn;
use crate::linalg::{singular_values_desc, CMatrix};
use crate::norms::{mu_at, schatten_norm, singular_values, tensor_profile, trace_norm, weak_l1, Exponent, SingularValueProfile};
use crate::rng::SeededRng;
use crate::spectral::{joint_diagonalize, random_commuting_tuple, random_planted_tuple, HermitianMatrix, SpectrumLaw, EPS_RECON};
use crate::torus::{fejer, fourier_multiplier_apply, partial_sum, signal_norms, smoothing_eval, TorusSignal};
use crate::transference::{build_embedding, contraction_check, round_contraction, symbol_agreement, verify_conjugation, IntegerTuple};
use crate::torus::HomogeneousSymbol;
use crate::{Matrix, C64};

use super::record::format_float;

/// Options of [`run_identity_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Multiplies every tolerance. Values `<= 0` make every check fail, which
    /// is how the failure path of callers is exercised.
    pub tolerance_scale: f64,
}

impl SuiteOptions {
    pub fn new(seed: u64) -> Self {
        Self { seed, tolerance_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    /// Worst residual or inequality excess observed (`>= 0`).
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub tolerance_scale: f64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One JSON object, keys and checks in fixed order.
    pub fn render(&self) -> String {
        let checks: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!(
                    "{{\"name\":\"{}\",\"residual\":{},\"tolerance\":{},\"passed\":{}}}",
                    c.name,
                    json_num(c.residual),
                    json_num(c.tolerance),
                    c.passed
                )
            })
            .collect();
        format!(
            "{{\"seed\":{},\"tolerance_scale\":{},\"passed\":{},\"checks\":[\n{}\n]}}\n",
            self.seed,
            json_num(self.tolerance_scale),
            self.passed(),
            checks.join(",\n")
        )
    }
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        format_float(x)
    } else {
        "null".to_string()
    }
}

struct Suite {
    scale: f64,
    checks: Vec<CheckResult>,
}

impl Suite {
    fn record(&mut self, name: &'static str, tolerance: f64, residual: Result<f64>) {
        let tolerance = tolerance * self.scale;
        // An internal error is reported as an infinite residual.
        let residual = residual.unwrap_or(f64::INFINITY);
        self.checks.push(CheckResult { name, residual, tolerance, passed: residual <= tolerance });
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn random_profile(rng: &mut SeededRng) -> SingularValueProfile<f64> {
    let len = 1 + rng.index(6);
    let pairs = (0..len).map(|_| (rng.uniform(0.0, 3.0), rng.uniform(0.1, 2.0))).collect();
    SingularValueProfile::from_pairs(pairs).expect("valid random profile")
}

fn hs_inner(a: &Matrix, b: &Matrix) -> C64 {
    a.as_slice().iter().zip(b.as_slice()).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj())
}

/// Runs every check with the seeded instances; never fails early.
pub fn run_identity_suite(opts: SuiteOptions) -> SuiteReport {
    let mut s = Suite { scale: opts.tolerance_scale, checks: Vec::new() };
    let seed = opts.seed;

    s.record("joint_diagonalization", 1e-9, (|| {
        let mut worst = 0.0f64;
        for (i, law) in [SpectrumLaw::Uniform, SpectrumLaw::Integer(1)].iter().enumerate() {
            let mut rng = SeededRng::with_stream(seed, 100 + i as u64);
            let t = random_commuting_tuple::<f64>(7, 3, law, &mut rng)?;
            let js = joint_diagonalize(&t, EPS_RECON)?;
            for k in 0..3 {
                let recon = js.from_eigenbasis(&CMatrix::from_real_diag(&js.column(k)))?;
                worst = worst.max(rel((&recon - t.get(k)).frobenius_norm(), t.get(k).frobenius_norm()));
            }
        }
        Ok(worst)
    })());

    s.record("perturbation_identity", 1e-9, (|| {
        let mut worst = 0.0f64;
        for d in 1..=3 {
            let mut rng = SeededRng::with_stream(seed, 200 + d as u64);
            let t = random_commuting_tuple::<f64>(6, d, &SpectrumLaw::Uniform, &mut rng)?;
            let js = joint_diagonalize(&t, EPS_RECON)?;
            let b = HermitianMatrix::from_hermitian_part(&rng.gaussian_matrix(6, 6));
            for f in BuiltinFn::contractions(d) {
                let rep = perturbation_residual(&js, f.as_fn::<f64>(), 1.0, &b)?;
                worst = worst.max(rep.residual);
            }
        }
        Ok(worst)
    })());

    let doi_instance = |stream: u64, d: usize| -> Result<(crate::Spectrum, Matrix, Matrix)> {
        let mut rng = SeededRng::with_stream(seed, stream);
        let t = random_commuting_tuple::<f64>(6, d, &SpectrumLaw::Uniform, &mut rng)?;
        Ok((joint_diagonalize(&t, EPS_RECON)?, rng.gaussian_matrix(6, 6), rng.gaussian_matrix(6, 6)))
    };

    s.record("doi_multiplicativity", 1e-12, (|| {
        let (js, v, _) = doi_instance(300, 2)?;
        let f1 = divided_difference_symbol(2, BuiltinFn::EuclidNorm.as_fn::<f64>(), 0)?;
        let f2 = divided_difference_symbol(2, BuiltinFn::Crease.as_fn::<f64>(), 1)?;
        symbol_product_check(&js, &f1, &f2, &v)
    })());

    s.record("doi_self_adjointness", 1e-10, (|| {
        let (js, v, w) = doi_instance(301, 2)?;
        let xi = divided_difference_symbol(2, BuiltinFn::MaxAbs.as_fn::<f64>(), 1)?;
        let lhs = hs_inner(&doi_apply(&js, &xi, &v)?, &w);
        let rhs = hs_inner(&v, &doi_apply(&js, &xi, &w)?);
        Ok(rel((lhs - rhs).norm(), v.frobenius_norm() * w.frobenius_norm()))
    })());

    s.record("schur_l2_norm", 1e-10, (|| {
        let (js, _, _) = doi_instance(302, 1)?;
        let xi = divided_difference_symbol(1, BuiltinFn::Abs.as_fn::<f64>(), 0)?;
        let n = js.dim();
        let mut op = CMatrix::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                let mut e = CMatrix::zeros(n, n);
                e.as_mut_slice()[a * n + b] = C64::new(1.0, 0.0);
                let img = doi_apply(&js, &xi, &e)?;
                for (r, z) in img.as_slice().iter().enumerate() {
                    op.as_mut_slice()[r * n * n + a * n + b] = *z;
                }
            }
        }
        let top = singular_values_desc(&op)[0];
        let norm = doi_l2_norm(&js, &xi)?;
        Ok(rel((top - norm).abs(), norm))
    })());

    s.record("tensor_singular_values", 1e-10, {
        let mut rng = SeededRng::with_stream(seed, 400);
        let (a, b) = (rng.gaussian_matrix::<f64>(4, 4), rng.gaussian_matrix::<f64>(3, 3));
        let direct = singular_values(&a.kron(&b));
        let product = tensor_profile(&singular_values(&a), &singular_values(&b));
        let scale = direct.values()[0];
        Ok(direct.values().iter().zip(product.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale)
    });

    s.record("weak_tensor_inequality", 1e-12, {
        let mut rng = SeededRng::with_stream(seed, 401);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let (p, q) = (random_profile(&mut rng), random_profile(&mut rng));
            let lhs = weak_l1(&tensor_profile(&p, &q));
            let rhs = trace_norm(&p) * weak_l1(&q);
            worst = worst.max(rel(lhs - rhs, rhs));
        }
        Ok(worst)
    });

    s.record("norm_inequalities", 1e-12, (|| {
        let mut rng = SeededRng::with_stream(seed, 500);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let x = rng.gaussian_matrix::<f64>(5, 5);
            let y = rng.gaussian_matrix::<f64>(5, 5).scale(rng.uniform(0.0, 3.0));
            let (px, py, pxy) = (singular_values(&x), singular_values(&y), singular_values(&(&x + &y)));
            let (wx, wy) = (weak_l1(&px), weak_l1(&py));
            worst = worst.max(rel(weak_l1(&pxy) - 2.0 * (wx + wy), wx + wy));
            worst = worst.max(rel(wx - trace_norm(&px), trace_norm(&px)));
            let c = rng.uniform(0.0, 4.0);
            worst = worst.max(rel((weak_l1(&px.scaled(c)) - c * wx).abs(), c * wx));
            let (t1, t2) = (rng.uniform(0.0, 5.0), rng.uniform(0.0, 5.0));
            let excess = mu_at(&pxy, t1 + t2)? - mu_at(&px, t1)? - mu_at(&py, t2)?;
            worst = worst.max(rel(excess, wx + wy));
        }
        Ok(worst)
    })());

    s.record("schatten_l2_bound", 1e-12, (|| {
        let (js, v, _) = doi_instance(501, 2)?;
        let mut worst = 0.0f64;
        for k0 in 0..2 {
            let xi = divided_difference_symbol(2, BuiltinFn::EuclidNorm.as_fn::<f64>(), k0)?;
            let e = Exponent::Finite(2.0);
            let ratio = schatten_norm(&singular_values(&doi_apply(&js, &xi, &v)?), e)? / schatten_norm(&singular_values(&v), e)?;
            worst = worst.max(ratio - doi_l2_norm(&js, &xi)?);
        }
        Ok(worst)
    })());

    let signal = |stream: u64, dim: usize, grid: usize| -> Result<TorusSignal<f64>> {
        let mut rng = SeededRng::with_stream(seed, stream);
        let terms: Vec<(Vec<i64>, Matrix)> =
            (0..4).map(|_| ((0..dim).map(|_| rng.integer(-3, 3)).collect(), rng.gaussian_matrix(2, 2))).collect();
        TorusSignal::from_terms(dim, grid, 2, &terms)
    };

    s.record("dft_round_trip", 1e-10, (|| {
        let w = signal(600, 2, 16)?;
        Ok(rel(w.dft().inverse_dft_of_coefficients().try_sub(&w)?.l2_norm(), w.l2_norm()))
    })());

    s.record("plancherel", 1e-10, (|| {
        let w = signal(601, 2, 16)?;
        let coeff_l2 = w.dft().samples().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Ok(rel((w.l2_norm() - TAU * coeff_l2).abs(), w.l2_norm()))
    })());

    s.record("multiplier_composition", 1e-12, (|| {
        let w = signal(602, 2, 16)?;
        let g = HomogeneousSymbol::new(1, 0)?;
        let m1 = |k: &[i64]| C64::new(g.eval_lattice(k), 0.0);
        let m2 = |k: &[i64]| C64::new(0.0, (k[0] - 2 * k[1]) as f64 / 7.0);
        let twice = fourier_multiplier_apply(m2, &fourier_multiplier_apply(m1, &w));
        let once = fourier_multiplier_apply(|k: &[i64]| m1(k) * m2(k), &w);
        Ok(rel(twice.try_sub(&once)?.l2_norm(), w.l2_norm()))
    })());

    s.record("fejer_closed_form", 1e-14, (|| {
        let w = signal(603, 2, 8)?;
        let n = 3u64;
        let mut avg = TorusSignal::zeros(2, 8, 2)?;
        for k0 in 0..=n {
            for k1 in 0..=n {
                avg = avg.try_add(&partial_sum(&w, &[k0, k1]))?;
            }
        }
        let avg = avg.scale(C64::new(1.0 / ((n + 1) * (n + 1)) as f64, 0.0));
        Ok(rel(avg.try_sub(&fejer(&w, n))?.l2_norm(), w.l2_norm()))
    })());

    s.record("smoothing_constraints", 1e-15, (|| {
        let mut worst = 0.0f64;
        for i in 0..=1000 {
            let u = i as f64 / 1000.0;
            let v = smoothing_eval(u)?;
            worst = worst.max(if u >= 0.5 { (v - u).abs() } else { 1.0 / 3.0 - v });
        }
        Ok(worst)
    })());

    let transference_instance = |stream: u64, d: usize| -> Result<(IntegerTuple<f64>, Matrix)> {
        let mut rng = SeededRng::with_stream(seed, stream);
        let p = random_planted_tuple::<f64>(4, d, &SpectrumLaw::Integer(2), &mut rng)?;
        Ok((IntegerTuple::from_spectrum(&joint_diagonalize(&p.tuple, EPS_RECON)?)?, rng.gaussian_matrix(4, 4)))
    };

    s.record("transference_identity", 1e-9, (|| {
        let mut worst = 0.0f64;
        for d in 1..=2 {
            let (it, v) = transference_instance(700 + d as u64, d)?;
            let h = round_contraction(BuiltinFn::EuclidNorm.as_fn::<f64>(), 2);
            for k0 in 0..d {
                let rep = verify_conjugation(&it, h.clone(), &HomogeneousSymbol::new(d, k0)?, &v, 16)?;
                worst = worst.max(rep.residual);
            }
        }
        Ok(worst)
    })());

    s.record("embedding_isometry", 1e-10, (|| {
        let (it, v) = transference_instance(710, 1)?;
        let w = build_embedding(&it, |i: &[i64]| i[0], &v, 12)?;
        let expected = TAU * TAU * trace_norm(&singular_values(&v));
        Ok(rel((signal_norms(&w).l1 - expected).abs(), expected))
    })());

    s.record("contraction_rounding", 0.5, (|| {
        let mut violations = 0u64;
        for d in 1..=2 {
            for f in BuiltinFn::contractions(d) {
                for n in 1..=8 {
                    violations += contraction_check(round_contraction(f.as_fn::<f64>(), n), d, 8, seed)?.violations;
                }
            }
        }
        Ok(violations as f64)
    })());

    s.record("symbol_agreement", 1e-12, (|| {
        let mut worst = 0.0f64;
        for d in 1..=2 {
            for f in BuiltinFn::contractions(d) {
                for n in [1, 4, 8] {
                    for k0 in 0..d {
                        let h = round_contraction(f.as_fn::<f64>(), n);
                        worst = worst.max(symbol_agreement::<f64>(h, &HomogeneousSymbol::new(d, k0)?, 6).max_deviation);
                    }
                }
            }
        }
        Ok(worst)
    })());

    SuiteReport { seed, tolerance_scale: opts.tolerance_scale, checks: s.checks }
}
