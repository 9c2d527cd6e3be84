//! Property tests for the structural invariants: linearity and algebra laws of
//! Schur multipliers, quasi-norm axioms, Fourier-side identities on the torus,
//! and the integer rounding of contractions.

use num_rational::Ratio;
use proptest::prelude::*;

use oplip::doi::{divided_difference_symbol, doi_apply, Symbol};
use oplip::functions::BuiltinFn;
use oplip::linalg::CMatrix;
use oplip::norms::{mu_at, singular_values, tensor_profile, trace_norm, weak_l1, SingularValueProfile};
use oplip::rng::SeededRng;
use oplip::spectral::{joint_diagonalize, random_planted_tuple, SpectrumLaw, EPS_RECON};
use oplip::torus::{
    fejer, fejer_weight, fourier_multiplier_apply, smoothing_eval, symbol_eval, HomogeneousSymbol, TorusSignal,
};
use oplip::transference::round_contraction;
use oplip::{Matrix, Spectrum, C64};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

fn spectrum(seed: u64, n: usize, d: usize, degenerate: bool) -> Spectrum {
    let law = if degenerate { SpectrumLaw::Integer(1) } else { SpectrumLaw::Uniform };
    let mut rng = SeededRng::new(seed);
    let planted = random_planted_tuple::<f64>(n, d, &law, &mut rng).unwrap();
    joint_diagonalize(&planted.tuple, EPS_RECON).unwrap()
}

fn pick_fn(d: usize, which: usize) -> BuiltinFn {
    let mut fns = BuiltinFn::contractions(d);
    fns.push(BuiltinFn::Poly(vec![0.1, -0.5, 0.3]));
    fns[which % fns.len()].clone()
}

fn rel(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).frobenius_norm() / a.frobenius_norm().max(b.frobenius_norm()).max(f64::MIN_POSITIVE)
}

fn inner(x: &Matrix, y: &Matrix) -> C64 {
    x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| a * b.conj()).sum()
}

fn random_signal(seed: u64, dim: usize, grid: usize, fiber: usize) -> TorusSignal<f64> {
    let mut rng = SeededRng::new(seed);
    let len = grid.pow(dim as u32) * fiber * fiber;
    TorusSignal::from_samples(dim, grid, fiber, (0..len).map(|_| rng.complex_normal()).collect()).unwrap()
}

/// Deterministic bounded multiplier: `|m(k)| <= 1`.
fn bounded_multiplier(salt: u64) -> impl Fn(&[i64]) -> C64 {
    move |k: &[i64]| {
        let h = k.iter().fold(salt, |acc, &x| acc.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(x as u64));
        let r = (h % 1000) as f64 / 1000.0;
        C64::from_polar(r, (h >> 20) as f64 * 1e-3)
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn doi_is_linear(seed in any::<u64>(), n in 1usize..7, d in 1usize..4, which in 0usize..8, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let js = spectrum(seed, n, d, seed % 2 == 0);
        let xi = divided_difference_symbol(d, pick_fn(d, which).as_fn::<f64>(), which % d).unwrap();
        let mut rng = SeededRng::with_stream(seed, 1);
        let v = rng.gaussian_matrix::<f64>(n, n);
        let w = rng.gaussian_matrix::<f64>(n, n);
        let combo = &v.scale(a) + &w.scale(b);
        let lhs = doi_apply(&js, &xi, &combo).unwrap();
        let rhs = &doi_apply(&js, &xi, &v).unwrap().scale(a) + &doi_apply(&js, &xi, &w).unwrap().scale(b);
        prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-12 * (1.0 + v.frobenius_norm() + w.frobenius_norm()) * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn real_symbol_doi_is_self_adjoint(seed in any::<u64>(), n in 1usize..7, d in 1usize..4, which in 0usize..8) {
        let js = spectrum(seed, n, d, seed % 3 == 0);
        let xi = divided_difference_symbol(d, pick_fn(d, which).as_fn::<f64>(), which % d).unwrap();
        let mut rng = SeededRng::with_stream(seed, 2);
        let v = rng.gaussian_matrix::<f64>(n, n);
        let w = rng.gaussian_matrix::<f64>(n, n);
        let lhs = inner(&doi_apply(&js, &xi, &v).unwrap(), &w);
        let rhs = inner(&v, &doi_apply(&js, &xi, &w).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-10 * v.frobenius_norm() * w.frobenius_norm());
    }

    #[test]
    fn doi_is_an_algebra_morphism(seed in any::<u64>(), n in 1usize..7, d in 1usize..4, which in 0usize..8) {
        let js = spectrum(seed, n, d, false);
        let xi1 = divided_difference_symbol(d, pick_fn(d, which).as_fn::<f64>(), 0).unwrap();
        let xi2 = Symbol::new(d, |l: &[f64], m: &[f64]| C64::new(l[0] * m[0], (l[0] - m[0]).sin()));
        let v = SeededRng::with_stream(seed, 3).gaussian_matrix::<f64>(n, n);
        let composed = doi_apply(&js, &xi1, &doi_apply(&js, &xi2, &v).unwrap()).unwrap();
        let direct = doi_apply(&js, &Symbol::product(&xi1, &xi2).unwrap(), &v).unwrap();
        prop_assert!(rel(&composed, &direct) <= 1e-12);
        // The unit symbol acts as the identity.
        let one = doi_apply(&js, &Symbol::constant(d, C64::new(1.0, 0.0)), &v).unwrap();
        prop_assert!(rel(&one, &v) <= 1e-12);
    }

    #[test]
    fn weak_l1_quasi_triangle_and_homogeneity(seed in any::<u64>(), n in 1usize..9, c in -10.0f64..10.0) {
        let mut rng = SeededRng::new(seed);
        let x = rng.gaussian_matrix::<f64>(n, n);
        let y = rng.gaussian_matrix::<f64>(n, n).scale(rng.uniform(0.0, 4.0));
        let (wx, wy) = (weak_l1(&singular_values(&x)), weak_l1(&singular_values(&y)));
        prop_assert!(weak_l1(&singular_values(&(&x + &y))) <= 2.0 * (wx + wy) * (1.0 + 1e-12));
        let wc = weak_l1(&singular_values(&x.scale(c)));
        prop_assert!((wc - c.abs() * wx).abs() <= 1e-12 * (1.0 + c.abs() * wx));
        prop_assert!(wx <= trace_norm(&singular_values(&x)) * (1.0 + 1e-12));
    }

    #[test]
    fn mu_is_subadditive(seed in any::<u64>(), n in 1usize..9, t in 0.0f64..9.0, s in 0.0f64..9.0) {
        let mut rng = SeededRng::new(seed);
        let x = rng.gaussian_matrix::<f64>(n, n);
        let y = rng.gaussian_matrix::<f64>(n, n);
        let lhs = mu_at(&singular_values(&(&x + &y)), t + s).unwrap();
        let rhs = mu_at(&singular_values(&x), t).unwrap() + mu_at(&singular_values(&y), s).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn mu_is_nonincreasing_and_right_continuous(pairs in prop::collection::vec((0.0f64..5.0, 0.1f64..3.0), 1..8), t in 0.0f64..20.0) {
        let p = SingularValueProfile::from_pairs(pairs).unwrap();
        prop_assert!(mu_at(&p, t).unwrap() >= mu_at(&p, t + 0.5).unwrap());
        // Right-continuity: the value at a breakpoint is the one just after it.
        let mut cumulative = 0.0;
        for (i, w) in p.weights().iter().enumerate() {
            cumulative += w;
            let next = p.values().get(i + 1).copied().unwrap_or(0.0);
            prop_assert_eq!(mu_at(&p, cumulative).unwrap(), next);
        }
    }

    #[test]
    fn weak_tensor_inequality(seed in any::<u64>(), na in 1usize..6, nb in 1usize..6) {
        let mut rng = SeededRng::new(seed);
        let pa = singular_values(&rng.gaussian_matrix::<f64>(na, na));
        let pb = singular_values(&rng.gaussian_matrix::<f64>(nb, nb));
        let lhs = weak_l1(&tensor_profile(&pa, &pb));
        prop_assert!(lhs <= trace_norm(&pa) * weak_l1(&pb) * (1.0 + 1e-12));
        prop_assert!((trace_norm(&tensor_profile(&pa, &pb)) - trace_norm(&pa) * trace_norm(&pb)).abs() <= 1e-12 * trace_norm(&pa) * trace_norm(&pb));
    }

    #[test]
    fn dft_round_trip_and_plancherel(seed in any::<u64>(), dim in 1usize..3, grid in 2usize..12, fiber in 1usize..3) {
        let w = random_signal(seed, dim, grid, fiber);
        let coeffs = w.dft();
        let back = coeffs.inverse_dft_of_coefficients();
        prop_assert!(back.l2_distance(&w).unwrap() <= 1e-12 * w.l2_norm());
        // sum_x |W(x)|^2 = N^D sum_l |c_l|^2 for the 1/N^D-normalized DFT.
        let points = w.num_points() as f64;
        let lhs: f64 = w.samples().iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 = coeffs.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() * points;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn multipliers_compose_and_contract(seed in any::<u64>(), dim in 1usize..3, grid in 2usize..10, salt in any::<u64>()) {
        let w = random_signal(seed, dim, grid, 2);
        let (m1, m2) = (bounded_multiplier(salt), bounded_multiplier(salt ^ 0xff));
        let twice = fourier_multiplier_apply(&m2, &fourier_multiplier_apply(&m1, &w));
        let once = fourier_multiplier_apply(|k: &[i64]| m1(k) * m2(k), &w);
        prop_assert!(twice.l2_distance(&once).unwrap() <= 1e-12 * w.l2_norm());
        // |m| <= 1 on every frequency, so the L2 norm cannot grow.
        prop_assert!(fourier_multiplier_apply(&m1, &w).l2_norm() <= w.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn fejer_weights_match_rational_brute_force(l in prop::collection::vec(-6i64..7, 1..3), n in 0u64..6) {
        let total = (n + 1).pow(l.len() as u32);
        let hits = (0..total)
            .filter(|&code| l.iter().enumerate().all(|(j, lj)| lj.unsigned_abs() <= (code / (n + 1).pow(j as u32)) % (n + 1)))
            .count() as i64;
        prop_assert_eq!(fejer_weight::<Ratio<i64>>(&l, n), Ratio::new(hits, total as i64));
    }

    #[test]
    fn fejer_means_contract_in_l2(seed in any::<u64>(), dim in 1usize..3, grid in 2usize..10, n in 0u64..6) {
        let w = random_signal(seed, dim, grid, 1);
        prop_assert!(fejer(&w, n).l2_norm() <= w.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn homogeneous_symbol_is_dilation_invariant(d in 1usize..4, k0 in 0usize..3, t in prop::collection::vec(-5.0f64..5.0, 4), c in 0.01f64..100.0) {
        let k0 = k0 % d;
        let g = HomogeneousSymbol::new(d, k0).unwrap();
        let t = &t[..d + 1];
        let scaled: Vec<f64> = t.iter().map(|x| x * c).collect();
        let (a, b) = (symbol_eval(&g, t), symbol_eval(&g, &scaled));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        // On the cone |t_{d+1}| <= |(t_1, ..., t_d)| it is the plain quotient.
        let horizontal: f64 = t[..d].iter().map(|x| x * x).sum();
        if t[d] * t[d] <= horizontal && horizontal > 0.0 {
            prop_assert!((a - t[k0] * t[d] / horizontal).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn smoothing_bounds(u in 0.0f64..=1.0) {
        let s = smoothing_eval(u).unwrap();
        prop_assert!(s >= u);
        prop_assert!((1.0 / 3.0 - 1e-15..=1.0).contains(&s));
        if u >= 0.5 {
            prop_assert_eq!(s, u);
        }
    }

    #[test]
    fn rounded_contractions_stay_contractions(
        d in 1usize..4,
        which in 0usize..8,
        n in 1usize..12,
        i in prop::collection::vec(-500i64..500, 3),
        j in prop::collection::vec(-500i64..500, 3),
    ) {
        let f = BuiltinFn::contractions(d)[which % (5 + d)].clone();
        let h = round_contraction(f.as_fn::<f64>(), n);
        let (i, j) = (&i[..d], &j[..d]);
        let dh = h(i) - h(j);
        let dist2: i64 = i.iter().zip(j).map(|(a, b)| (a - b) * (a - b)).sum();
        prop_assert!(dh * dh <= dist2, "h({:?}) - h({:?}) = {}", i, j, dh);
    }

    #[test]
    fn joint_diagonalization_reconstructs(seed in any::<u64>(), n in 1usize..9, d in 1usize..4, degenerate in any::<bool>()) {
        let js = spectrum(seed, n, d, degenerate);
        for k in 0..d {
            let diag: Vec<f64> = js.column(k);
            let rebuilt = js.from_eigenbasis(&CMatrix::from_real_diag(&diag)).unwrap();
            let a = js.source().get(k);
            prop_assert!((&rebuilt - a).frobenius_norm() <= 1e-10 * (1.0 + a.frobenius_norm()));
        }
        let u = js.basis();
        prop_assert!((&(&u.adjoint() * u) - &CMatrix::identity(n)).frobenius_norm() <= 1e-12 * n as f64);
    }

    #[test]
    fn signal_files_round_trip(seed in any::<u64>(), dim in 1usize..3, grid in 1usize..6, fiber in 1usize..3) {
        let w = random_signal(seed, dim, grid, fiber);
        let json = TorusSignal::<f64>::from_json(&w.to_json().unwrap()).unwrap();
        prop_assert_eq!(&json, &w);
        let mut bytes = Vec::new();
        w.write_binary(&mut bytes).unwrap();
        prop_assert_eq!(&TorusSignal::<f64>::read_binary(bytes.as_slice()).unwrap(), &w);
    }
}

#[test]
fn bounded_multiplier_is_bounded() {
    let m = bounded_multiplier(3);
    for a in -20..20 {
        for b in -20..20 {
            assert!(m(&[a, b]).norm() <= 1.0 + 1e-15);
        }
    }
}
