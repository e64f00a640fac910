//! Complex Gamma function (Lanczos, g = 7, nine coefficients) and the
//! oscillating Gamma ratio `xi`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Distance below which a point counts as a Gamma pole.
pub const POLE_TOL: f64 = 1e-12;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn check_pole(z: Complex64) -> Result<()> {
    if z.re <= 0.5 && z.im.abs() < POLE_TOL {
        let n = z.re.round();
        if n <= 0.0 && (z.re - n).abs() < POLE_TOL {
            return Err(Error::Pole(n));
        }
    }
    Ok(())
}

/// sin(pi z) with the integer part of Re z removed first, so that the
/// argument reduction is exact near the poles of Gamma.
fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let f = Complex64::new(z.re - n, z.im);
    let s = (f * PI).sin();
    if (n as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// Principal-branch ln sin(pi z), valid also for large |Im z| where the
/// sine itself overflows. Only the value modulo 2 pi i is meaningful.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 20.0 {
        return sin_pi(z).ln();
    }
    let n = z.re.round();
    let f = Complex64::new(z.re - n, z.im);
    let sign = if (n as i64).rem_euclid(2) == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, PI)
    };
    let core = if f.im > 0.0 {
        // sin(pi f) = e^{-i pi f} (1 - e^{2 pi i f}) i/2
        -i * PI * f + Complex64::new(0.5, 0.0).ln() + i * (PI / 2.0)
            + (Complex64::new(1.0, 0.0) - (2.0 * PI * i * f).exp()).ln()
    } else {
        i * PI * f + Complex64::new(0.5, 0.0).ln() - i * (PI / 2.0)
            + (Complex64::new(1.0, 0.0) - (-2.0 * PI * i * f).exp()).ln()
    };
    core + sign
}

fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    // Re z >= 1/2 assumed.
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_P[0], 0.0);
    for (k, p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += *p / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// ln Gamma(z), correct modulo 2 pi i (enough for every use through `exp`).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    Ok(ln_gamma_unchecked(z))
}

fn ln_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos_ln_gamma(Complex64::new(1.0, 0.0) - z)
    } else {
        lanczos_ln_gamma(z)
    }
}

/// Complex Gamma function; reflection formula for Re z < 1/2.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    if z.re < 0.5 && z.im.abs() < 100.0 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        return Ok(PI / (sin_pi(z) * lanczos_ln_gamma(one_minus).exp()));
    }
    Ok(ln_gamma_unchecked(z).exp())
}

/// Real convenience wrapper.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|g| g.re)
}

/// Xi_m(t) = e^{i ln(2) t} Gamma((m+1+it)/2) / Gamma((m+1-it)/2).
///
/// Evaluated through log-Gamma, so |t| up to 10^5 and beyond is fine.
pub fn xi(m: Complex64, t: f64) -> Result<Complex64> {
    if m.re <= -1.0 {
        return Err(Error::Domain(format!("xi needs Re(m) > -1, got {m}")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let a = (m + 1.0 + Complex64::new(0.0, t)) / 2.0;
    let b = (m + 1.0 - Complex64::new(0.0, t)) / 2.0;
    let phase = Complex64::new(0.0, std::f64::consts::LN_2 * t);
    Ok((phase + ln_gamma(a)? - ln_gamma(b)?).exp())
}

/// Limit of Xi_a(-t) Xi_b(t) as t -> +inf (`plus = true`) or t -> -inf.
///
/// Xi_a(-/+inf) Xi_b(+/-inf) = e^{-/+ i pi (a - b) / 2}; with t -> +inf the
/// first factor sits at -inf.
pub fn xi_product_limit(a: Complex64, b: Complex64, plus: bool) -> Complex64 {
    let s = if plus { -1.0 } else { 1.0 };
    (Complex64::new(0.0, s * PI / 2.0) * (a - b)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn classical_values() {
        assert!((gamma(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((gamma(c(0.5, 0.0)).unwrap() - PI.sqrt()).norm() < 1e-14);
        assert!((gamma(c(5.0, 0.0)).unwrap() - 24.0).norm() < 1e-12);
        assert!((gamma(c(-0.5, 0.0)).unwrap() + 2.0 * PI.sqrt()).norm() < 1e-13);
    }

    #[test]
    fn poles_are_rejected() {
        for n in [0.0, -1.0, -7.0] {
            assert_eq!(gamma(c(n, 0.0)), Err(Error::Pole(n)));
        }
        assert!(gamma(c(-2.0, 1e-6)).is_ok());
    }

    #[test]
    fn ln_gamma_large_imaginary_part() {
        // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
        let y = 400.0;
        let lg = ln_gamma(c(0.5, y)).unwrap();
        let expected = PI.ln() - (PI * y - std::f64::consts::LN_2);
        assert!((2.0 * lg.re - expected).abs() < 1e-9);
        let lg = ln_gamma(c(0.2, -300.0)).unwrap();
        let lg_conj = ln_gamma(c(0.2, 300.0)).unwrap();
        assert!((lg.re - lg_conj.re).abs() < 1e-9);
    }

    #[test]
    fn xi_at_zero_is_one() {
        assert_eq!(xi(c(0.3, 0.7), 0.0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn xi_rejects_bad_order() {
        assert!(xi(c(-1.0, 0.0), 1.0).is_err());
    }
}
