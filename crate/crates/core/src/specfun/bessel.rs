//! Bessel functions in the dimension-1 normalization
//! (`J~_m(z) = sqrt(pi z / 2) J_m(z)` and siblings) for complex order.
//!
//! Small arguments use the ascending series. Larger arguments use Miller's
//! backward recurrence normalized by the Neumann sum
//! `(z/2)^m / Gamma(m+1) = sum_k c_k J_{m+2k}(z)`, which stays accurate on
//! the positive real axis up to `BESSEL_MAX_ARG`. K uses its integral
//! representation away from the origin.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::gamma;
use crate::error::{Error, Result};
use crate::EULER_GAMMA;

/// Largest |z| accepted by `bessel_dim1`.
pub const BESSEL_MAX_ARG: f64 = 100.0;

/// Below this modulus the ascending series is used for J and Y.
const SERIES_MAX_ARG: f64 = 8.0;

const NEAR_INTEGER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselKind {
    J,
    Y,
    HPlus,
    HMinus,
    I,
    K,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Ascending series sum_k (s z^2/4)^k / (k! Gamma(m+k+1)), with s = -1 for J
/// and s = +1 for I.
fn power_series(m: Complex64, z: Complex64, sign: f64) -> Result<Complex64> {
    let q = sign * z * z / 4.0;
    let mut term = one() / gamma(m + 1.0)?;
    let mut sum = term;
    for k in 1..=200 {
        term *= q / (k as f64 * (m + k as f64));
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    Ok(sum)
}

fn half_power(m: Complex64, z: Complex64) -> Complex64 {
    (z / 2.0).powc(m)
}

/// Unnormalized backward recurrence for J_{m+k}(z), k = 0..=top, scaled so
/// that entry 0 is finite. Returns (values, neumann normalization sum).
fn miller(m: Complex64, z: Complex64) -> (Vec<Complex64>, Complex64) {
    let top = 2 * (((1.3 * z.norm() + 50.0) / 2.0).ceil() as usize);
    let mut f = vec![zero(); top + 2];
    f[top] = one();
    for k in (1..=top).rev() {
        let mu = m + k as f64;
        f[k - 1] = 2.0 * mu / z * f[k] - f[k + 1];
        if f[k - 1].norm() > 1e250 {
            for v in f.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    // c_0 = 1, c_k = (m + 2k) p_k with p_1 = 1, p_k = p_{k-1} (m + k - 1) / k
    let mut norm = f[0];
    let mut p = one();
    for k in 1..=top / 2 {
        if k > 1 {
            p *= (m + (k - 1) as f64) / k as f64;
        }
        norm += (m + 2.0 * k as f64) * p * f[2 * k];
    }
    f.truncate(top + 1);
    (f, norm)
}

/// Classical J_m(z), Re m > -1.
pub fn bessel_j(m: Complex64, z: Complex64) -> Result<Complex64> {
    if m.re <= -1.0 {
        return Err(Error::Domain(format!("J needs Re(m) > -1, got {m}")));
    }
    check_arg(z)?;
    if z.norm() == 0.0 {
        return Ok(if m.norm() == 0.0 { one() } else { zero() });
    }
    if z.norm() <= SERIES_MAX_ARG {
        return Ok(half_power(m, z) * power_series(m, z, -1.0)?);
    }
    let (f, norm) = miller(m, z);
    Ok(half_power(m, z) / gamma(m + 1.0)? * f[0] / norm)
}

fn check_arg(z: Complex64) -> Result<()> {
    if !(z.norm() <= BESSEL_MAX_ARG) {
        return Err(Error::Domain(format!(
            "|z| = {} exceeds the Bessel cap {BESSEL_MAX_ARG}",
            z.norm()
        )));
    }
    Ok(())
}

fn check_order_for_second_kind(m: Complex64) -> Result<()> {
    if m.re.abs() >= 1.0 {
        return Err(Error::Domain(format!("second-kind functions need |Re m| < 1, got {m}")));
    }
    if m.norm() == 0.0 {
        return Ok(());
    }
    let nearest = Complex64::new(m.re.round(), 0.0);
    if (m - nearest).norm() <= NEAR_INTEGER_TOL {
        return Err(Error::NearIntegerOrder(m.to_string()));
    }
    Ok(())
}

fn harmonic(k: usize) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum()
}

/// Y_0 via the logarithmic series (small z) or the Neumann series
/// Y_0 = (2/pi)(ln(z/2) + gamma) J_0 - (4/pi) sum_k (-1)^k J_{2k} / k.
fn bessel_y0(z: Complex64) -> Result<Complex64> {
    let log_part = (z / 2.0).ln() + EULER_GAMMA;
    if z.norm() <= SERIES_MAX_ARG {
        let q = z * z / 4.0;
        let mut term = one();
        let mut j0 = one();
        let mut tail = zero();
        for k in 1..=200 {
            term *= -q / ((k * k) as f64);
            j0 += term;
            let t = -term * harmonic(k);
            tail += t;
            if term.norm() * (1.0 + harmonic(k)) < 1e-17 * (j0.norm() + tail.norm()) {
                break;
            }
        }
        return Ok(2.0 / PI * (log_part * j0 + tail));
    }
    let (f, norm) = miller(zero(), z);
    let j = |k: usize| f[k] / norm;
    let mut tail = zero();
    for k in 1..f.len() / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        tail += sign * j(2 * k) / k as f64;
    }
    Ok(2.0 / PI * log_part * j(0) - 4.0 / PI * tail)
}

/// Classical Y_m(z) for |Re m| < 1.
pub fn bessel_y(m: Complex64, z: Complex64) -> Result<Complex64> {
    check_order_for_second_kind(m)?;
    check_arg(z)?;
    if m.norm() == 0.0 {
        return bessel_y0(z);
    }
    let jp = bessel_j(m, z)?;
    let jm = bessel_j(-m, z)?;
    let mp = m * PI;
    Ok((jp * mp.cos() - jm) / mp.sin())
}

fn bessel_i(m: Complex64, z: Complex64) -> Result<Complex64> {
    if m.re <= -1.0 {
        return Err(Error::Domain(format!("I needs Re(m) > -1, got {m}")));
    }
    check_arg(z)?;
    if z.norm() == 0.0 {
        return Ok(if m.norm() == 0.0 { one() } else { zero() });
    }
    Ok(half_power(m, z) * power_series(m, z, 1.0)?)
}

/// K_m(z) = int_0^inf exp(-z cosh t) cosh(m t) dt for Re z > 0, evaluated by
/// the trapezoidal rule (exponentially convergent for this integrand).
fn bessel_k_integral(m: Complex64, z: Complex64) -> Complex64 {
    let h = 0.02;
    let mut sum = 0.5 * (-z).exp();
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let term = (-z * t.cosh()).exp() * (m * t).cosh();
        sum += term;
        if term.norm() < 1e-18 * sum.norm() || k > 100_000 {
            break;
        }
        k += 1;
    }
    sum * h
}

fn bessel_k(m: Complex64, z: Complex64) -> Result<Complex64> {
    if m.re.abs() >= 1.0 {
        return Err(Error::Domain(format!("K needs |Re m| < 1, got {m}")));
    }
    check_arg(z)?;
    if z.norm() > 2.0 {
        if z.re <= 0.0 {
            return Err(Error::Domain(format!("K needs Re z > 0 for |z| > 2, got {z}")));
        }
        return Ok(bessel_k_integral(m, z));
    }
    if m.norm() == 0.0 {
        let q = z * z / 4.0;
        let log_part = (z / 2.0).ln() + EULER_GAMMA;
        let mut term = one();
        let mut i0 = one();
        let mut tail = zero();
        for k in 1..=100 {
            term *= q / ((k * k) as f64);
            i0 += term;
            tail += term * harmonic(k);
            if term.norm() < 1e-18 {
                break;
            }
        }
        return Ok(-log_part * i0 + tail);
    }
    check_order_for_second_kind(m)?;
    Ok(PI / 2.0 * (bessel_i(-m, z)? - bessel_i(m, z)?) / (m * PI).sin())
}

/// Dimension-1 normalized Bessel family.
///
/// J and I accept Re m > -1; Y, H and K need |Re m| < 1 and an order not
/// within 1e-6 of a non-zero integer (m = 0 has its own series).
pub fn bessel_dim1(kind: BesselKind, m: Complex64, z: Complex64) -> Result<Complex64> {
    check_arg(z)?;
    let half_sqrt = (PI * z / 2.0).sqrt();
    let value = match kind {
        BesselKind::J => half_sqrt * bessel_j(m, z)?,
        BesselKind::Y => half_sqrt * bessel_y(m, z)?,
        BesselKind::HPlus => half_sqrt * (bessel_j(m, z)? + Complex64::i() * bessel_y(m, z)?),
        BesselKind::HMinus => half_sqrt * (bessel_j(m, z)? - Complex64::i() * bessel_y(m, z)?),
        BesselKind::I => half_sqrt * bessel_i(m, z)?,
        BesselKind::K => (2.0 * z / PI).sqrt() * bessel_k(m, z)?,
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn integer_order_reference_values() {
        // A&S table values
        let j0 = bessel_j(r(0.0), r(1.0)).unwrap();
        assert!((j0.re - 0.765_197_686_557_966_6).abs() < 1e-15);
        let j0 = bessel_j(r(0.0), r(10.0)).unwrap();
        assert!((j0.re + 0.245_935_764_451_348_3).abs() < 1e-14);
        let y0 = bessel_y(r(0.0), r(1.0)).unwrap();
        assert!((y0.re - 0.088_256_964_215_676_96).abs() < 1e-14);
        let y0 = bessel_y(r(0.0), r(10.0)).unwrap();
        assert!((y0.re - 0.055_671_167_283_599_39).abs() < 1e-14);
        let j0 = bessel_j(r(0.0), r(50.0)).unwrap();
        assert!((j0.re - 0.055_812_327_669_251_85).abs() < 1e-13);
    }

    #[test]
    fn half_order_closed_forms() {
        for x in [0.3, 2.0, 9.0, 40.0, 90.0] {
            let y = bessel_dim1(BesselKind::Y, r(0.5), r(x)).unwrap();
            assert!((y.re + x.cos()).abs() < 1e-11, "x={x}");
            let h = bessel_dim1(BesselKind::HPlus, r(0.5), r(x)).unwrap();
            let expected = -Complex64::i() * Complex64::new(0.0, x).exp();
            assert!((h - expected).norm() < 1e-11);
        }
    }

    #[test]
    fn modified_functions() {
        // I~_{1/2}(x) = sinh x, K~_{1/2}(x) = e^{-x}
        for x in [0.4, 1.5, 3.0, 7.0] {
            let i = bessel_dim1(BesselKind::I, r(0.5), r(x)).unwrap();
            assert!((i.re - x.sinh()).abs() < 1e-12 * x.cosh());
            let k = bessel_dim1(BesselKind::K, r(0.5), r(x)).unwrap();
            assert!((k.re - (-x).exp()).abs() < 1e-12, "x={x} k={k}");
        }
        // K_0(1) = 0.42102443824070834
        let k0 = bessel_k(r(0.0), r(1.0)).unwrap();
        assert!((k0.re - 0.421_024_438_240_708_34).abs() < 1e-14);
        let k0 = bessel_k(r(0.0), r(3.0)).unwrap();
        assert!((k0.re - 0.034_739_504_386_279_99).abs() < 1e-14);
    }

    #[test]
    fn near_integer_order_rejected() {
        let err = bessel_dim1(BesselKind::Y, Complex64::new(1e-8, 0.0), r(1.0));
        assert!(matches!(err, Err(Error::NearIntegerOrder(_))));
        assert!(bessel_dim1(BesselKind::Y, r(0.0), r(1.0)).is_ok());
    }

    #[test]
    fn large_argument_rejected() {
        assert!(matches!(
            bessel_dim1(BesselKind::J, r(0.5), r(BESSEL_MAX_ARG + 1.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn series_and_recurrence_agree_at_the_switch() {
        let m = Complex64::new(0.3, 0.4);
        let below = bessel_j(m, r(SERIES_MAX_ARG)).unwrap();
        let (f, norm) = miller(m, r(SERIES_MAX_ARG));
        let above = half_power(m, r(SERIES_MAX_ARG)) / gamma(m + 1.0).unwrap() * f[0] / norm;
        assert!((below - above).norm() < 1e-13);
    }
}
