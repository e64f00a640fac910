use std::f64::consts::PI;
use std::sync::Arc;

use levlab::index::{
    a_integral, c_minus_one_closed_form, f_function, fourier_coefficient, g_function, numeric_a_integral,
    projection_terms, trace_n, verify_levinson, verify_periodic_levinson, winding_periodic, winding_square,
    AFunction, BPart, Count, SeparatedOperator, SeparatedTerm, Telescoping, PERIODIC_MODES,
};
use levlab::model::{varsigma, ModelParams, NuParams, Params, Sign};
use levlab::scattering::boundary_symbol;
use levlab::specfun::{gamma, xi};
use levlab::spectrum::eigenvalue_count;
use levlab::{c64, Complex64, Error, EULER_GAMMA};

fn model(m: Complex64, kappa: Complex64) -> Params {
    Params::Model(ModelParams::new(m, kappa).unwrap())
}

fn periodic_varsigma(n: f64, kappa: Complex64) -> Complex64 {
    varsigma(&ModelParams::new(c64(0.0, n), kappa).unwrap())
}

#[test]
fn calibration_case() {
    let p = model(c64(0.5, 0.0), c64(-1.0, 0.0));
    let b = boundary_symbol(&p, Sign::Minus).unwrap();
    let w = winding_square(&b).unwrap();
    assert_eq!(w.value, 1);
    assert!(w.rounding_residual() < 0.05);
    assert!(w.min_modulus > 1e-6);
    let r = verify_levinson(&p).unwrap();
    assert_eq!((r.winding, r.count), (1, Count::Finite(1)));
    assert!(r.passed());
}

#[test]
fn kappa_zero_winds_zero() {
    for m in [c64(0.5, 0.0), c64(-0.3, 0.8), c64(0.9, -0.1)] {
        let b = boundary_symbol(&model(m, c64(0.0, 0.0)), Sign::Minus).unwrap();
        assert_eq!(winding_square(&b).unwrap().value, 0);
    }
}

#[test]
fn verification_examples() {
    let r = verify_levinson(&Params::Nu(NuParams::new(c64(EULER_GAMMA, 0.0)).unwrap())).unwrap();
    assert_eq!((r.winding, r.count), (1, Count::Finite(1)));
    assert!(r.passed());

    // m = 0.3 + 0.4i: find a kappa with no eigenvalue
    let m = c64(0.3, 0.4);
    let kappa = [c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 1.0), c64(3.0, 0.0)]
        .into_iter()
        .find(|&k| eigenvalue_count(&model(m, k)) == Some(0))
        .expect("a zero-count kappa");
    let r = verify_levinson(&model(m, kappa)).unwrap();
    assert_eq!((r.winding, r.count), (0, Count::Finite(0)));
    assert!(r.passed());
}

#[test]
fn plus_symbol_winding_agrees() {
    for (m, k) in [((0.5, 0.0), (-1.0, 0.0)), ((0.1, 0.9), (3.0, -1.0)), ((-0.4, 0.2), (2.0, 1.0))] {
        let p = model(c64(m.0, m.1), c64(k.0, k.1));
        let minus = winding_square(&boundary_symbol(&p, Sign::Minus).unwrap()).unwrap().value;
        let plus = winding_square(&boundary_symbol(&p, Sign::Plus).unwrap()).unwrap().value;
        assert_eq!(minus, plus);
        assert_eq!(minus as usize, eigenvalue_count(&p).unwrap());
    }
}

#[test]
fn exceptional_pairs_are_not_fredholm() {
    let m = c64(0.4, 0.2);
    let ratio = gamma(m).unwrap() / gamma(-m).unwrap();
    for s in [1.0, -1.0] {
        let kappa = (m * c64(0.5, s * PI)).exp() * ratio;
        assert!(matches!(verify_levinson(&model(m, kappa)), Err(Error::NotFredholm(_))));
    }
    for im in [PI / 2.0, -PI / 2.0] {
        let p = Params::Nu(NuParams::new(c64(0.3, im)).unwrap());
        assert!(matches!(verify_levinson(&p), Err(Error::NotFredholm(_))));
    }
    assert!(matches!(verify_levinson(&model(c64(0.0, 1.0), c64(1.0, 0.0))), Err(Error::WrongAlgebra)));
}

#[test]
fn homotopy_stability() {
    let cases = [
        ((0.5, 0.0), (-1.0, 0.0)),
        ((0.3, 0.4), (1.0, 0.0)),
        ((0.2, 0.7), (-0.6, 1.4)),
        ((-0.35, -0.5), (0.4, -2.0)),
    ];
    for (m, k) in cases {
        let (m, k) = (c64(m.0, m.1), c64(k.0, k.1));
        let base = verify_levinson(&model(m, k)).unwrap();
        for f in [c64(1.01, 0.0), c64(0.99, 0.0), c64(1.0, 0.01), c64(1.0, -0.01)] {
            let p = model(m, k * f);
            if eigenvalue_count(&p) != Some(base.winding as usize) {
                continue;
            }
            assert_eq!(verify_levinson(&p).unwrap().winding, base.winding, "m = {m}, kappa = {}", k * f);
        }
    }
}

#[test]
fn periodic_winding_examples() {
    assert_eq!(winding_periodic(1.0, c64(1.0, 0.0)).unwrap().value, -1);
    assert_eq!(winding_periodic(1.0, c64(2.0 * PI.exp(), 0.0)).unwrap().value, 0);
    assert!(matches!(winding_periodic(1.0, c64(PI.exp(), 0.0)), Err(Error::NotFredholm(_))));
    assert!(matches!(winding_periodic(1.0, c64((-PI).exp(), 0.0)), Err(Error::NotFredholm(_))));
}

#[test]
fn periodic_winding_sweep() {
    for n in [0.5, 1.0, 2.0] {
        for j in 0..=40 {
            // ln|kappa| / (pi n) from -2 to 2
            let v = -2.0 + 0.1 * j as f64;
            let kappa = c64((v * PI * n).exp(), 0.0) * c64(0.0, 0.37 * j as f64).exp();
            let r = winding_periodic(n, kappa);
            if (v.abs() - 1.0).abs() < 1e-9 {
                assert!(matches!(r, Err(Error::NotFredholm(_))));
                continue;
            }
            let expected = if v.abs() < 1.0 { -1 } else { 0 };
            assert_eq!(r.unwrap().value, expected, "n = {n}, v = {v}");
        }
    }
}

#[test]
fn c_minus_one_matches_closed_form() {
    for n in [0.5, 1.0, 2.0] {
        for v in [-0.9, -0.3, 0.0, 0.5, 0.97] {
            let kappa = c64((v * PI * n).exp(), 0.0) * c64(0.0, 1.1).exp();
            let vs = periodic_varsigma(n, kappa);
            let expected = 1.0 / (vs * ((PI * n).exp() - (-PI * n).exp()));
            assert!((c_minus_one_closed_form(n, kappa).unwrap() - expected).norm() < 1e-14 * expected.norm());
            let c = fourier_coefficient(n, kappa, -1).unwrap();
            assert!((c - expected).norm() < 1e-8 * expected.norm(), "n={n} v={v}: {c} vs {expected}");
        }
        for v in [-1.7, -1.05, 1.05, 1.8] {
            let kappa = c64((v * PI * n).exp(), 0.0);
            assert_eq!(c_minus_one_closed_form(n, kappa).unwrap(), c64(0.0, 0.0));
            assert!(fourier_coefficient(n, kappa, -1).unwrap().norm() < 1e-10);
        }
    }
}

#[test]
fn fourier_series_reconstructs_f() {
    for n in [0.5, 1.0, 2.0] {
        let kappa = c64(0.0, 1.0);
        let vs = periodic_varsigma(n, kappa);
        let coeffs: Vec<(i64, Complex64)> = (-40..=40)
            .map(|l| (l, fourier_coefficient(n, kappa, l).unwrap()))
            .collect();
        for j in 0..25 {
            let x = PI / n * j as f64 / 25.0;
            let sum: Complex64 = coeffs
                .iter()
                .map(|(l, c)| c * c64(0.0, 2.0 * n * *l as f64 * x).exp())
                .sum();
            let f = f_function(n, vs, x);
            assert!((sum - f).norm() < 1e-8, "n = {n}, x = {x}: {}", (sum - f).norm());
        }
    }
}

#[test]
fn g_function_is_a_xi_product() {
    for n in [0.3, 1.0, 2.0] {
        for j in 0..=40 {
            let t = -10.0 + 0.5 * j as f64;
            let plus = xi(c64(0.0, n), -t).unwrap() * xi(c64(0.0, -n), t).unwrap();
            let minus = xi(c64(0.0, -n), -t).unwrap() * xi(c64(0.0, n), t).unwrap();
            let gp = g_function(n, Sign::Plus, t);
            let gm = g_function(n, Sign::Minus, t);
            assert!((plus - gp).norm() < 1e-10 * gp.abs().max(1.0), "n={n} xi={t}: {plus} vs {gp}");
            assert!((minus - gm).norm() < 1e-10 * gm.abs().max(1.0));
        }
    }
}

#[test]
fn g_function_cosh_identity() {
    for n in [0.3, 1.0, 2.0] {
        for j in 0..=80 {
            let t = -20.0 + 0.5 * j as f64;
            let sum = g_function(n, Sign::Minus, t - 2.0 * n) + g_function(n, Sign::Plus, t);
            let expected = 2.0 * (PI * n).cosh();
            assert!((sum - expected).abs() < 1e-10 * expected);
        }
        let jump = g_function(n, Sign::Plus, 1e6) - g_function(n, Sign::Plus, -1e6);
        assert!((jump - 2.0 * (PI * n).sinh()).abs() < 1e-12 * jump);
    }
}

#[test]
fn telescoping_integral_matches_quadrature() {
    let n = 0.8;
    for s in [-3.2, 1.6, 4.8] {
        let g = move |t: f64| c64(g_function(n, Sign::Plus, t - s) - g_function(n, Sign::Plus, t), 0.0);
        let numeric = AFunction {
            f: Arc::new(g),
            limit_minus: c64(0.0, 0.0),
            limit_plus: c64(0.0, 0.0),
            telescoping: None,
            support: s.abs(),
        };
        let analytic = AFunction {
            telescoping: Some(Telescoping {
                shift: s,
                limit_minus: c64((-PI * n).exp(), 0.0),
                limit_plus: c64((PI * n).exp(), 0.0),
            }),
            ..numeric.clone()
        };
        let a = a_integral(&analytic).unwrap();
        let q = numeric_a_integral(&numeric);
        assert!((a - q).norm() < 1e-10 * a.norm(), "shift {s}: {a} vs {q}");
    }
}

#[test]
fn trace_of_simple_operators() {
    assert_eq!(trace_n(&SeparatedOperator::default(), 1.0).unwrap(), c64(0.0, 0.0));

    // a = sech^2 has integral 2; b = 1 has mean 1
    let sech2 = AFunction {
        f: Arc::new(|t: f64| c64(1.0 / t.cosh().powi(2), 0.0)),
        limit_minus: c64(0.0, 0.0),
        limit_plus: c64(0.0, 0.0),
        telescoping: None,
        support: 0.0,
    };
    let n = 1.5;
    let op = SeparatedOperator {
        terms: vec![
            SeparatedTerm { coefficient: c64(3.0, 0.0), a: sech2.clone(), b: BPart::Fourier(0) },
            SeparatedTerm { coefficient: c64(5.0, 0.0), a: sech2.clone(), b: BPart::Fourier(2) },
            SeparatedTerm {
                coefficient: c64(1.0, 0.0),
                a: sech2,
                b: BPart::General(Arc::new(move |x: f64| c64(2.0 + (2.0 * n * x).cos(), 0.0))),
            },
        ],
    };
    let expected = (3.0 * 2.0 + 2.0 * 2.0) / (2.0 * n);
    assert!((trace_n(&op, n).unwrap() - expected).norm() < 1e-12);

    let divergent = SeparatedOperator {
        terms: vec![SeparatedTerm {
            coefficient: c64(1.0, 0.0),
            a: AFunction {
                f: Arc::new(|t: f64| c64(t.tanh(), 0.0)),
                limit_minus: c64(-1.0, 0.0),
                limit_plus: c64(1.0, 0.0),
                telescoping: None,
                support: 0.0,
            },
            b: BPart::Fourier(0),
        }],
    };
    assert!(matches!(trace_n(&divergent, n), Err(Error::DivergentTrace(_))));
}

#[test]
fn trace_of_projection_terms() {
    for n in [0.5, 1.0, 2.0] {
        for v in [-0.6, 0.2, 1.4] {
            let kappa = c64((v * PI * n).exp(), 0.0) * c64(0.0, -0.8).exp();
            let vs = periodic_varsigma(n, kappa);
            let (i_op, j_op) = projection_terms(n, kappa, PERIODIC_MODES).unwrap();
            let ti = trace_n(&i_op, n).unwrap();
            let tj = trace_n(&j_op, n).unwrap();
            let c = c_minus_one_closed_form(n, kappa).unwrap();
            let expected = vs * c * ((PI * n).exp() - (-PI * n).exp());
            assert!(ti.norm() < 1e-8);
            assert!((tj - expected).norm() < 1e-8, "n={n} v={v}: {tj} vs {expected}");
            let total = ti + tj;
            let target = if v.abs() < 1.0 { 1.0 } else { 0.0 };
            assert!((total - target).norm() < 1e-8);
        }
    }
}

#[test]
fn periodic_verification_examples() {
    let r = verify_periodic_levinson(1.0, c64(1.0, 0.0)).unwrap();
    assert_eq!(r.winding, -1);
    assert_eq!(r.count, Count::Infinite);
    assert!((r.trace.unwrap() - 1.0).abs() < 1e-8);
    assert!(r.passed());

    let r = verify_periodic_levinson(1.0, c64(2.0 * PI.exp(), 0.0)).unwrap();
    assert_eq!((r.winding, r.count), (0, Count::Finite(0)));
    assert!(r.trace.unwrap().abs() < 1e-8);
    assert!(r.passed());

    let r = verify_periodic_levinson(2.0, c64((-3.0 * PI).exp(), 0.0)).unwrap();
    assert_eq!(r.winding, 0);
    assert!(r.passed());

    assert!(matches!(
        verify_periodic_levinson(1.0, c64(PI.exp(), 0.0)),
        Err(Error::NotFredholm(_))
    ));
}

#[test]
fn report_json_fields() {
    let r = verify_levinson(&model(c64(0.5, 0.0), c64(-1.0, 0.0))).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["winding"], 1);
    assert_eq!(v["count"], 1);
    assert_eq!(v["verdict"], "pass");
    let r = verify_periodic_levinson(1.0, c64(1.0, 0.0)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["count"], "infinite");
}
