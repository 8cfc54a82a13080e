//! Randomized invariants across parameter space.

use approx::assert_abs_diff_eq;
use latpoly::continuum::{hermite_fn, observed_rates};
use latpoly::dirac::{momentum, transfer_matrix, unitarity_defect, GammaSet};
use latpoly::discrete_time::hahn_s;
use latpoly::poly::{
    difference_residual, gram_matrix, orthonormal_column, pearson_residual, recurrence_residual,
};
use latpoly::{make_family, FamilyParams, Residual};
use proptest::prelude::*;

fn finite_params() -> impl Strategy<Value = FamilyParams> {
    prop_oneof![
        (0.05..0.95f64, 2usize..48).prop_map(|(p, n)| FamilyParams::Kravchuk { p, n }),
        (0.05..3.0f64, 0.05..3.0f64, 3usize..48).prop_map(|(alpha, beta, n)| FamilyParams::Hahn {
            alpha,
            beta,
            n
        }),
    ]
}

fn any_params() -> impl Strategy<Value = FamilyParams> {
    prop_oneof![
        finite_params(),
        (0.3..4.0f64, 0.1..0.8f64).prop_map(|(gamma, mu)| FamilyParams::Meixner { gamma, mu }),
        (0.2..6.0f64).prop_map(|mu| FamilyParams::Charlier { mu }),
    ]
}

fn max_off_identity(g: &nalgebra::DMatrix<f64>) -> f64 {
    let size = g.nrows();
    let mut worst = 0.0_f64;
    for i in 0..size {
        for j in 0..size {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pearson_relation_holds(params in any_params()) {
        let fam = make_family(params).unwrap();
        for x in fam.grid() {
            prop_assert!(pearson_residual(&fam, x) <= 1e-12, "x = {x}");
        }
    }

    #[test]
    fn full_degree_gram_is_identity(params in finite_params()) {
        let fam = make_family(params).unwrap();
        let g = gram_matrix(&fam, fam.max_degree().unwrap()).unwrap();
        prop_assert!(max_off_identity(&g) <= 1e-10);
    }

    #[test]
    fn difference_and_recurrence_residuals(params in any_params(), n in 0usize..8, t in 0.0..1.0f64) {
        let fam = make_family(params).unwrap();
        let last = fam.support().last() as i64;
        let n = fam.max_degree().map_or(n, |m| n.min(m.saturating_sub(1)));
        let x = 1 + ((last - 2) as f64 * t).round() as i64;
        prop_assume!(x >= 1 && x < last);
        prop_assert!(difference_residual(&fam, n, x).unwrap().relative() <= 1e-8);
        prop_assert!(recurrence_residual(&fam, n, x).unwrap().relative() <= 1e-8);
    }

    #[test]
    fn symmetric_kravchuk_parity(size in 2usize..40, x_frac in 0.0..1.0f64) {
        let fam = make_family(FamilyParams::Kravchuk { p: 0.5, n: size }).unwrap();
        let x = (size as f64 * x_frac).round() as i64;
        let a = orthonormal_column(&fam, size, x);
        let b = orthonormal_column(&fam, size, size as i64 - x);
        for n in 0..=size {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((a[n] - sign * b[n]).abs() <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn symmetric_hahn_parity(lambda in 0.3..3.0f64, size in 3usize..40, x_frac in 0.0..1.0f64) {
        let fam = make_family(FamilyParams::hahn_symmetric(lambda, size)).unwrap();
        let last = size as i64 - 1;
        let x = (last as f64 * x_frac).round() as i64;
        let a = orthonormal_column(&fam, size - 1, x);
        let b = orthonormal_column(&fam, size - 1, last - x);
        for n in 0..size {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((a[n] - sign * b[n]).abs() <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn kravchuk_self_duality(size in 2usize..40, n_frac in 0.0..1.0f64, x_frac in 0.0..1.0f64) {
        // At p = 1/2 the orthonormal matrix is symmetric in (n, x) up to a
        // product of signs fixed at the corner.
        let fam = make_family(FamilyParams::Kravchuk { p: 0.5, n: size }).unwrap();
        let n = (size as f64 * n_frac).round() as usize;
        let x = (size as f64 * x_frac).round() as i64;
        let lhs = orthonormal_column(&fam, size, x)[n];
        let rhs = orthonormal_column(&fam, size, n as i64)[x as usize];
        prop_assert!((lhs.abs() - rhs.abs()).abs() <= 1e-12);
    }

    #[test]
    fn relative_residual_is_scale_free(terms in proptest::collection::vec(-1e3..1e3f64, 1..6), k in 1e-3..1e3f64) {
        let r = Residual::from_terms(&terms);
        let scaled: Vec<f64> = terms.iter().map(|t| t * k).collect();
        let s = Residual::from_terms(&scaled);
        prop_assert!(r.relative() >= 0.0);
        if r.scale * k.min(1.0) > 1e-6 {
            prop_assert!((r.relative() - s.relative()).abs() <= 1e-12);
        }
    }

    #[test]
    fn transfer_matrix_is_unitary(
        m in proptest::collection::vec(0usize..8, 3),
        m0c in 0.0..3.0f64,
        eps in 0.1..2.0f64,
    ) {
        prop_assume!(m.iter().all(|&v| v != 4));
        let gammas = GammaSet::dirac();
        let k = [momentum(m[0], 8, eps).unwrap(), momentum(m[1], 8, eps).unwrap(), momentum(m[2], 8, eps).unwrap()];
        let u = transfer_matrix(&k, m0c, eps, &gammas).unwrap();
        prop_assert!(unitarity_defect(&u) <= 1e-12);
    }

    #[test]
    fn chirality_anticommutes(k in proptest::array::uniform4(-10.0..10.0f64)) {
        prop_assert!(GammaSet::dirac().chirality_defect(&k) <= 1e-14);
    }

    #[test]
    fn hahn_s_three_term(k in 2usize..12, x in -4.0..4.0f64) {
        let lhs = k as f64 * hahn_s(k, x);
        let rhs = x * hahn_s(k - 1, x) - (k as f64 - 1.0) * hahn_s(k - 2, x);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn power_law_rates_are_recovered(rate in 0.2..3.0f64, c in 0.1..10.0f64) {
        let sizes = [16.0, 64.0, 256.0];
        let errors: Vec<f64> = sizes.iter().map(|s: &f64| c * s.powf(-rate)).collect();
        for r in observed_rates(&sizes, &errors) {
            prop_assert!((r - rate).abs() <= 1e-12);
        }
    }
}

#[test]
fn hermite_functions_are_orthonormal() {
    // Trapezoid sums on a wide grid converge spectrally for Gaussian tails.
    let h = 0.01;
    let grid: Vec<f64> = (-1200..=1200).map(|i| i as f64 * h).collect();
    for n in 0..5 {
        for m in 0..5 {
            let s: f64 = grid
                .iter()
                .map(|&s| hermite_fn(n, s) * hermite_fn(m, s))
                .sum::<f64>()
                * h;
            assert_abs_diff_eq!(s, if n == m { 1.0 } else { 0.0 }, epsilon = 1e-12);
        }
    }
}
