use std::f64::consts::PI;

use levlab::cli::hankel_roundtrip;
use levlab::model::{ModelParams, NuParams, Params, Sign};
use levlab::opcalc::{
    apply_wave_operator, apply_wave_operator_nu, gaussian, hankel_transform, random_test_vectors,
    transpose_compose_check, wave_operator, wave_operator_nu, Calculus, GridSpec,
};
use levlab::quad::CompositeRule;
use levlab::specfun::gamma;
use levlab::spectrum::eigenvalue_count;
use levlab::{c64, Complex64, Error};
use proptest::prelude::*;

fn small_grid() -> GridSpec {
    GridSpec::new(30.0, 1 << 12).unwrap()
}

fn mp(m: (f64, f64), k: (f64, f64)) -> ModelParams {
    ModelParams::new(c64(m.0, m.1), c64(k.0, k.1)).unwrap()
}

fn bilinear(g: GridSpec, u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum::<Complex64>() * g.spacing()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn exceptional_kappa(m: Complex64, a: f64, s: f64) -> Complex64 {
    (m * c64(a, s * PI)).exp() * gamma(m).unwrap() / gamma(-m).unwrap()
}

#[test]
fn half_order_without_boundary_term_is_identity() {
    let g = small_grid();
    let p = mp((0.5, 0.0), (0.0, 0.0));
    for v in random_test_vectors(g, 4, 11) {
        for sign in [Sign::Minus, Sign::Plus] {
            let w = apply_wave_operator(&p, sign, &v, g).unwrap();
            assert!(max_diff(&w, &v) < 1e-10);
        }
    }
}

#[test]
fn kappa_zero_is_a_constant_phase_times_fourier_multiplier() {
    // at kappa = 0, |W v| = |v| for real m since the multiplier is unimodular
    let g = small_grid();
    let p = mp((0.2, 0.0), (0.0, 0.0));
    let v = gaussian(g, 0.5, 1.5, 0.7, c64(1.0, 0.3));
    let w = apply_wave_operator(&p, Sign::Minus, &v, g).unwrap();
    assert!((g.norm(&w) - g.norm(&v)).abs() < 1e-12 * g.norm(&v));
}

#[test]
fn functional_calculus_composes() {
    let g = small_grid();
    let calc = Calculus::new(g);
    let a = calc.multiplier(|t| Ok(c64(1.0 / (1.0 + t * t), 0.0))).unwrap();
    let b = calc.multiplier(|t| Ok(c64(0.0, t).exp() * (t / 3.0).tanh())).unwrap();
    let ab: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let v = gaussian(g, -1.0, 2.0, 0.4, c64(0.6, -0.2));
    let two_step = calc.apply_d(&a, &calc.apply_d(&b, &v));
    let one_step = calc.apply_d(&ab, &v);
    assert!(max_diff(&two_step, &one_step) < 1e-12);
}

#[test]
fn transpose_is_bilinear_adjoint() {
    let g = small_grid();
    let calc = Calculus::new(g);
    let ops = [
        wave_operator(&mp((0.3, 0.0), (-0.5, 0.0)), Sign::Minus, &calc).unwrap(),
        wave_operator(&mp((-0.2, 0.6), (1.0, 2.0)), Sign::Plus, &calc).unwrap(),
        wave_operator_nu(&NuParams::new(c64(0.4, 0.1)).unwrap(), Sign::Minus, &calc).unwrap(),
    ];
    let u = gaussian(g, 1.0, 1.0, -0.5, c64(1.0, 1.0));
    let v = gaussian(g, -0.5, 2.0, 1.2, c64(0.3, -0.7));
    for op in &ops {
        let lhs = bilinear(g, &u, &op.apply(&calc, &v));
        let rhs = bilinear(g, &op.apply_transpose(&calc, &u), &v);
        assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn wave_operator_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -3.0f64..3.0) {
        let g = GridSpec::new(20.0, 1 << 10).unwrap();
        let p = mp((0.35, 0.1), (-0.8, 0.2));
        let u = gaussian(g, c, 1.0, 0.3, c64(1.0, 0.0));
        let v = gaussian(g, -c, 2.0, -0.6, c64(0.0, 1.0));
        let s = c64(a, b);
        let mix: Vec<Complex64> = u.iter().zip(&v).map(|(x, y)| s * x + y).collect();
        let wu = apply_wave_operator(&p, Sign::Minus, &u, g).unwrap();
        let wv = apply_wave_operator(&p, Sign::Minus, &v, g).unwrap();
        let wmix = apply_wave_operator(&p, Sign::Minus, &mix, g).unwrap();
        let expected: Vec<Complex64> = wu.iter().zip(&wv).map(|(x, y)| s * x + y).collect();
        prop_assert!(max_diff(&wmix, &expected) < 1e-12 * (1.0 + s.norm()));
    }
}

#[test]
fn zero_vector_maps_to_zero() {
    let g = small_grid();
    let zero = vec![c64(0.0, 0.0); g.points];
    let w = apply_wave_operator(&mp((0.3, 0.2), (1.0, 0.0)), Sign::Minus, &zero, g).unwrap();
    assert!(w.iter().all(|z| z.norm() == 0.0));
    let w = apply_wave_operator_nu(&NuParams::new(c64(1.0, 0.0)).unwrap(), Sign::Plus, &zero, g).unwrap();
    assert!(w.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn wrong_length_is_rejected() {
    let g = small_grid();
    let v = vec![c64(1.0, 0.0); 100];
    assert!(matches!(
        apply_wave_operator(&mp((0.3, 0.0), (0.0, 0.0)), Sign::Minus, &v, g),
        Err(Error::Validation(_))
    ));
}

#[test]
fn unbounded_operators_are_refused() {
    let g = small_grid();
    let v = gaussian(g, 0.0, 1.0, 0.0, c64(1.0, 0.0));
    let m = c64(0.4, 0.3);
    let plus_exc = ModelParams::new(m, exceptional_kappa(m, 0.7, 1.0)).unwrap();
    assert!(matches!(
        apply_wave_operator(&plus_exc, Sign::Minus, &v, g),
        Err(Error::UnboundedOperator(_))
    ));
    assert!(apply_wave_operator(&plus_exc, Sign::Plus, &v, g).is_ok());
    let minus_exc = ModelParams::new(m, exceptional_kappa(m, -0.4, -1.0)).unwrap();
    assert!(matches!(
        apply_wave_operator(&minus_exc, Sign::Plus, &v, g),
        Err(Error::UnboundedOperator(_))
    ));
    assert!(apply_wave_operator(&minus_exc, Sign::Minus, &v, g).is_ok());

    for (s, sign) in [(1.0, Sign::Plus), (-1.0, Sign::Minus)] {
        let p = NuParams::new(c64(0.2, s * PI / 2.0)).unwrap();
        assert!(matches!(
            apply_wave_operator_nu(&p, sign, &v, g),
            Err(Error::UnboundedOperator(_))
        ));
        assert!(apply_wave_operator_nu(&p, sign.flip(), &v, g).is_ok());
    }
}

#[test]
fn left_composition_is_identity() {
    let p = Params::Model(mp((0.3, 0.0), (-0.5, 0.0)));
    let coarse = transpose_compose_check(&p, GridSpec::default(), 3, 1).unwrap();
    assert!(coarse.left_residual < 1e-2, "{}", coarse.left_residual);
    let fine = transpose_compose_check(&p, GridSpec::new(80.0, 1 << 15).unwrap(), 3, 1).unwrap();
    assert!(fine.left_residual <= 0.5 * coarse.left_residual || fine.left_residual < 1e-8);
}

#[test]
fn right_composition_is_identity_without_bound_states() {
    for (m, k) in [((0.5, 0.0), (0.0, 0.0)), ((0.3, 0.0), (0.8, 0.0)), ((-0.4, 0.0), (0.7, 0.0))] {
        let model = mp(m, k);
        let p = Params::Model(model);
        assert_eq!(eigenvalue_count(&p), Some(0));
        let r = transpose_compose_check(&p, small_grid(), 2, 5).unwrap();
        assert!(r.left_residual < 1e-6 && r.right_residual < 1e-6, "{m:?} {k:?}: {r:?}");
    }
}

#[test]
fn right_composition_misses_the_bound_state() {
    let p = Params::Model(mp((0.5, 0.0), (-1.0, 0.0)));
    let r = transpose_compose_check(&p, small_grid(), 2, 5).unwrap();
    assert!(r.left_residual < 1e-5, "{r:?}");
    assert!(r.right_residual > 0.1);
}

#[test]
fn half_order_hankel_is_sine_transform() {
    let rule = CompositeRule::new(0.0, 12.0, 24, 16);
    let f: Vec<Complex64> = rule.nodes.iter().map(|&s| c64((-(s - 4.0).powi(2)).exp(), 0.0)).collect();
    let r = [0.3, 1.0, 2.5, 6.0];
    let h = hankel_transform(c64(0.5, 0.0), &f, &rule, &r).unwrap();
    for (j, &rj) in r.iter().enumerate() {
        let sine = rule.integrate(|s| c64((2.0 / PI).sqrt() * (rj * s).sin() * (-(s - 4.0).powi(2)).exp(), 0.0));
        assert!((h[j] - sine).norm() < 1e-11);
    }
}

#[test]
fn hankel_transform_is_an_involution() {
    for m in [0.0, 0.5] {
        let rt = hankel_roundtrip(c64(m, 0.0), 2.0, 0.22).unwrap();
        assert!(rt.sup_error < 1e-3, "m = {m}: {}", rt.sup_error);
    }
}

#[test]
fn hankel_domain_checks() {
    let rule = CompositeRule::new(0.0, 10.0, 4, 8);
    let f = vec![c64(1.0, 0.0); rule.nodes.len()];
    assert!(matches!(
        hankel_transform(c64(-1.5, 0.0), &f, &rule, &[1.0]),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        hankel_transform(c64(0.0, 0.0), &f, &rule, &[20.0]),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        hankel_transform(c64(0.0, 0.0), &f[1..], &rule, &[1.0]),
        Err(Error::Validation(_))
    ));
}
