//! Wave-operator symbols on the square, scattering matrices, resolvent
//! kernels and the zeros of the resolvent denominators.
//!
//! In the `(X, D)` representation the wave operators are
//! `Gamma^{-/+}(X, D)` with
//! `Gamma^{-/+}(x, xi) = Xi_{1/2}(-xi) (Xi_m(xi) - vs Xi_{-m}(xi) e^{2mx})
//!  e^{-/+ i pi/2 (m - 1/2)} / (1 - vs e^{-/+ i pi m} e^{2mx})`
//! and for the `nu` family
//! `Gamma^{nu -/+}(x, xi) = Xi_{1/2}(-xi) Xi_0(xi) (gamma + x - nu - i pi/2 tanh(pi xi/2))
//!  e^{+/- i pi/4} / (gamma + x - nu -/+ i pi/2)`.
//!
//! The square boundary consists of the four restrictions
//! `Gamma_1(xi) = Gamma(-inf, xi)`, `Gamma_2(x) = Gamma(x, -inf)`,
//! `Gamma_3(xi) = Gamma(+inf, xi)` and `Gamma_4(x) = Gamma(x, +inf)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::contour::{sinh_grid, trace_phase, uniform_grid, TraceOptions};
use crate::error::{Error, Result};
use crate::model::{lambda_set, ModelParams, NuParams, Params, Sign};
use crate::specfun::{bessel_dim1, xi, xi_product_limit, BesselKind, BESSEL_MAX_ARG};
use crate::EULER_GAMMA;

/// Denominator modulus below which a symbol counts as singular.
pub const SYMBOL_SINGULAR_TOL: f64 = 1e-12;

/// Denominator modulus below which a resolvent kernel counts as singular.
pub const KERNEL_SINGULAR_TOL: f64 = 1e-10;

/// Truncation of the xi-edges (and of the nu x-edges) before the analytic
/// limit is appended.
pub const EDGE_TRUNCATION: f64 = 1e5;

/// Largest x-edge half-width for the `(m, kappa)` family.
pub const MAX_X_HALF_WIDTH: f64 = 1e6;

/// Point of the compactified real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext {
    NegInf,
    Finite(f64),
    PosInf,
}

fn i() -> Complex64 {
    Complex64::i()
}

/// `+1` for the plus symbol, `-1` for the minus symbol.
fn sigma(sign: Sign) -> f64 {
    sign.as_f64()
}

/// `Xi_{1/2}(-xi) Xi_b(xi)` including its limits at `xi = +-inf`.
fn xi_pair(b: Complex64, t: Ext) -> Result<Complex64> {
    let half = Complex64::new(0.5, 0.0);
    match t {
        Ext::NegInf => Ok(xi_product_limit(half, b, false)),
        Ext::PosInf => Ok(xi_product_limit(half, b, true)),
        Ext::Finite(t) => Ok(xi(half, -t)? * xi(b, t)?),
    }
}

/// `Gamma^{sign}_{m,kappa}` at a point of the compactified plane.
pub fn model_symbol_ext(p: &ModelParams, sign: Sign, x: Ext, t: Ext) -> Result<Complex64> {
    let m = p.m();
    let s = sigma(sign);
    let phase = (s * i() * PI / 2.0 * (m - 0.5)).exp();
    let rot = (s * i() * PI * m).exp();
    let a = xi_pair(m, t)?;
    let Some(l) = p.ln_varsigma() else {
        return Ok(a * phase);
    };
    let b = xi_pair(-m, t)?;
    // u = vs e^{2mx}; decide which of u -> 0 or u -> inf applies at +-inf
    let log_u = match x {
        Ext::Finite(x) => l + 2.0 * m * x,
        Ext::NegInf | Ext::PosInf => {
            let toward_plus = matches!(x, Ext::PosInf);
            let grows = (m.re > 0.0) == toward_plus;
            if grows {
                return Ok(b * phase / rot);
            }
            return Ok(a * phase);
        }
    };
    let x_val = match x {
        Ext::Finite(x) => x,
        _ => unreachable!(),
    };
    if log_u.re <= 0.0 {
        let u = log_u.exp();
        let den = 1.0 - u * rot;
        if den.norm() < SYMBOL_SINGULAR_TOL {
            return Err(Error::SingularPoint(x_val));
        }
        Ok((a - u * b) * phase / den)
    } else {
        let v = (-log_u).exp();
        let den = v - rot;
        if den.norm() < SYMBOL_SINGULAR_TOL {
            return Err(Error::SingularPoint(x_val));
        }
        Ok((v * a - b) * phase / den)
    }
}

/// `Gamma^{nu, sign}_0` at a point of the compactified plane.
pub fn nu_symbol_ext(p: &NuParams, sign: Sign, x: Ext, t: Ext) -> Result<Complex64> {
    let s = sigma(sign);
    // minus symbol: e^{+i pi/4} / (.. - i pi/2); plus symbol: e^{-i pi/4} / (.. + i pi/2)
    let phase = (-s * i() * PI / 4.0).exp();
    let pair = xi_pair(Complex64::new(0.0, 0.0), t)?;
    let x_val = match x {
        Ext::Finite(x) => x,
        Ext::NegInf | Ext::PosInf => return Ok(pair * phase),
    };
    let tanh = match t {
        Ext::NegInf => -1.0,
        Ext::PosInf => 1.0,
        Ext::Finite(t) => (PI * t / 2.0).tanh(),
    };
    let base = EULER_GAMMA + x_val - p.nu();
    let den = base + s * i() * PI / 2.0;
    if den.norm() < SYMBOL_SINGULAR_TOL {
        return Err(Error::SingularPoint(x_val));
    }
    Ok(pair * (base - i() * PI / 2.0 * tanh) * phase / den)
}

/// Either family's symbol at a point of the compactified plane.
pub fn symbol_ext(p: &Params, sign: Sign, x: Ext, t: Ext) -> Result<Complex64> {
    match p {
        Params::Model(mp) => model_symbol_ext(mp, sign, x, t),
        Params::Nu(np) => nu_symbol_ext(np, sign, x, t),
    }
}

pub fn symbol_full(p: &ModelParams, sign: Sign, x: f64, xi: f64) -> Result<Complex64> {
    model_symbol_ext(p, sign, Ext::Finite(x), Ext::Finite(xi))
}

pub fn symbol_nu_full(p: &NuParams, sign: Sign, x: f64, xi: f64) -> Result<Complex64> {
    nu_symbol_ext(p, sign, Ext::Finite(x), Ext::Finite(xi))
}

/// Scattering matrix `x -> e^{i pi (1/2 - m)} (1 - vs e^{i pi m} e^{2mx}) / (1 - vs e^{-i pi m} e^{2mx})`.
pub fn smatrix(p: &ModelParams) -> impl Fn(f64) -> Result<Complex64> {
    let m = p.m();
    let l = p.ln_varsigma();
    let front = (i() * PI * (0.5 - m)).exp();
    let up = (i() * PI * m).exp();
    let down = (-i() * PI * m).exp();
    move |x: f64| {
        let Some(l) = l else {
            return Ok(front);
        };
        let log_u = l + 2.0 * m * x;
        let (num, den) = if log_u.re <= 0.0 {
            let u = log_u.exp();
            (1.0 - u * up, 1.0 - u * down)
        } else {
            let v = (-log_u).exp();
            (v - up, v - down)
        };
        if den.norm() < SYMBOL_SINGULAR_TOL {
            return Err(Error::SingularPoint(x));
        }
        Ok(front * num / den)
    }
}

/// Scattering matrix of the `nu` family:
/// `x -> i (gamma + x - nu + i pi/2) / (gamma + x - nu - i pi/2)`.
pub fn smatrix_nu(p: &NuParams) -> impl Fn(f64) -> Result<Complex64> {
    let nu = p.nu();
    move |x: f64| {
        let base = EULER_GAMMA + x - nu;
        let den = base - i() * PI / 2.0;
        if den.norm() < SYMBOL_SINGULAR_TOL {
            return Err(Error::SingularPoint(x));
        }
        Ok(i() * (base + i() * PI / 2.0) / den)
    }
}

/// One of the four edge functions, sampled.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeCurve {
    /// 1..=4.
    pub edge: u8,
    /// `(parameter, value)` in increasing parameter order.
    pub samples: Vec<(f64, Complex64)>,
    /// Values at parameter `-inf` and `+inf`.
    pub limit_minus: Complex64,
    pub limit_plus: Complex64,
    /// Unwrapped phase gain from `limit_minus` to `limit_plus`.
    pub phase: f64,
    pub min_modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySymbol {
    pub params: Params,
    pub sign: Sign,
    pub edges: [EdgeCurve; 4],
    /// `|Gamma_1(-T) - Gamma_2(-X)|`, `|Gamma_2(X) - Gamma_3(-T)|`,
    /// `|Gamma_3(T) - Gamma_4(X)|`, `|Gamma_4(-X) - Gamma_1(T)|` at the
    /// truncation points.
    pub corner_residuals: [f64; 4],
}

impl BoundarySymbol {
    pub fn edge(&self, k: u8) -> &EdgeCurve {
        &self.edges[(k - 1) as usize]
    }

    pub fn max_corner_residual(&self) -> f64 {
        self.corner_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn samples_used(&self) -> usize {
        self.edges.iter().map(|e| e.samples.len()).sum()
    }
}

/// Center and half-width of the x-window outside which the symbol is at its
/// limits up to about `e^{-60}`.
fn x_window(p: &ModelParams) -> (f64, f64) {
    let m = p.m();
    match p.ln_varsigma() {
        None => (0.0, 10.0),
        Some(l) => {
            let center = -l.re / (2.0 * m.re);
            let half = (30.0 / m.re.abs()).clamp(10.0, MAX_X_HALF_WIDTH);
            (center, half)
        }
    }
}

fn x_grid(p: &Params) -> Vec<f64> {
    match p {
        Params::Model(mp) => {
            let (c, h) = x_window(mp);
            let step = 0.1 / mp.m().norm().max(0.1);
            let n = ((2.0 * h / step).ceil() as usize).clamp(400, 2_000_000);
            uniform_grid(c - h, c + h, n)
        }
        Params::Nu(np) => sinh_grid(np.nu().re - EULER_GAMMA, EDGE_TRUNCATION, 801),
    }
}

fn xi_grid() -> Vec<f64> {
    sinh_grid(0.0, EDGE_TRUNCATION, 401)
}

/// Refuse symbols that hit a zero or a pole on the square.
fn check_fredholm(p: &Params, sign: Sign) -> Result<()> {
    // Gamma^- has poles on Lambda^+ and zeros on Lambda^-; the nu symbol
    // Gamma^{nu,-} has its pole where Im nu = -pi/2 and its zero where Im nu = +pi/2.
    let (pole_side, zero_side) = match p {
        Params::Model(mp) => {
            if mp.is_periodic() {
                return Err(Error::WrongAlgebra);
            }
            (sign.flip(), sign)
        }
        Params::Nu(_) => (sign, sign.flip()),
    };
    let wide = (-1e300, 1e300);
    if let Some(&x) = lambda_set(p, pole_side, wide).first() {
        return Err(Error::SingularPoint(x));
    }
    if let Some(&x) = lambda_set(p, zero_side, wide).first() {
        return Err(Error::NotFredholm(format!(
            "exceptional parameters: the symbol vanishes at x = {x:.6} on the boundary of the square"
        )));
    }
    Ok(())
}

/// Sample the four edges of the symbol on the compactified square.
pub fn boundary_symbol(p: &Params, sign: Sign) -> Result<BoundarySymbol> {
    check_fredholm(p, sign)?;
    let opts = TraceOptions::default();
    let xg = x_grid(p);
    let tg = xi_grid();
    let build = |edge: u8| -> Result<EdgeCurve> {
        let (grid, f): (&[f64], Box<dyn Fn(f64) -> Result<Complex64>>) = match edge {
            1 => (&tg, Box::new(|t| symbol_ext(p, sign, Ext::NegInf, Ext::Finite(t)))),
            2 => (&xg, Box::new(|x| symbol_ext(p, sign, Ext::Finite(x), Ext::NegInf))),
            3 => (&tg, Box::new(|t| symbol_ext(p, sign, Ext::PosInf, Ext::Finite(t)))),
            _ => (&xg, Box::new(|x| symbol_ext(p, sign, Ext::Finite(x), Ext::PosInf))),
        };
        let (lm, lp) = match edge {
            1 => (
                symbol_ext(p, sign, Ext::NegInf, Ext::NegInf)?,
                symbol_ext(p, sign, Ext::NegInf, Ext::PosInf)?,
            ),
            2 => (
                symbol_ext(p, sign, Ext::NegInf, Ext::NegInf)?,
                symbol_ext(p, sign, Ext::PosInf, Ext::NegInf)?,
            ),
            3 => (
                symbol_ext(p, sign, Ext::PosInf, Ext::NegInf)?,
                symbol_ext(p, sign, Ext::PosInf, Ext::PosInf)?,
            ),
            _ => (
                symbol_ext(p, sign, Ext::NegInf, Ext::PosInf)?,
                symbol_ext(p, sign, Ext::PosInf, Ext::PosInf)?,
            ),
        };
        let tr = trace_phase(&f, grid, &opts)?;
        let first = tr.samples.first().expect("nonempty").1;
        let last = tr.samples.last().expect("nonempty").1;
        let phase = crate::contour::phase_step(lm, first) + tr.phase + crate::contour::phase_step(last, lp);
        Ok(EdgeCurve {
            edge,
            samples: tr.samples,
            limit_minus: lm,
            limit_plus: lp,
            phase,
            min_modulus: tr.min_modulus.min(lm.norm()).min(lp.norm()),
        })
    };
    let edges = [build(1)?, build(2)?, build(3)?, build(4)?];
    let first = |e: &EdgeCurve| e.samples.first().expect("nonempty").1;
    let last = |e: &EdgeCurve| e.samples.last().expect("nonempty").1;
    let corner_residuals = [
        (first(&edges[0]) - first(&edges[1])).norm(),
        (last(&edges[1]) - first(&edges[2])).norm(),
        (last(&edges[2]) - last(&edges[3])).norm(),
        (first(&edges[3]) - last(&edges[0])).norm(),
    ];
    Ok(BoundarySymbol {
        params: *p,
        sign,
        edges,
        corner_residuals,
    })
}

/// Kernel value of a resolvent boundary value at `(r, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEvaluation {
    pub k: f64,
    pub r: f64,
    pub s: f64,
    pub value: Complex64,
    pub sign: Sign,
}

/// `1 - vs e^{-/+ i pi m} (k/2)^{2m}` for `R(k^2 +/- i0)`.
pub fn denominator(p: &ModelParams, sign: Sign, k: f64) -> Complex64 {
    match p.ln_varsigma() {
        None => Complex64::new(1.0, 0.0),
        Some(l) => {
            let m = p.m();
            1.0 - (l - sigma(sign) * i() * PI * m + 2.0 * m * (k / 2.0).ln()).exp()
        }
    }
}

/// `gamma + ln(k/2) - nu -/+ i pi/2` for `R(k^2 +/- i0)`.
pub fn denominator_nu(p: &NuParams, sign: Sign, k: f64) -> Complex64 {
    EULER_GAMMA + (k / 2.0).ln() - p.nu() - sigma(sign) * i() * PI / 2.0
}

fn check_kernel_args(k: f64, r: f64, s: f64) -> Result<()> {
    if !(k > 0.0 && r > 0.0 && s > 0.0) {
        return Err(Error::Domain(format!("need k, r, s > 0, got k={k}, r={r}, s={s}")));
    }
    if k * r.max(s) > BESSEL_MAX_ARG {
        return Err(Error::Domain(format!(
            "k * max(r, s) = {} exceeds the Bessel range {BESSEL_MAX_ARG}",
            k * r.max(s)
        )));
    }
    Ok(())
}

fn hankel(sign: Sign) -> BesselKind {
    match sign {
        Sign::Plus => BesselKind::HPlus,
        Sign::Minus => BesselKind::HMinus,
    }
}

/// Kernel of `R_{m,kappa}(k^2 +/- i0)`.
pub fn resolvent_kernel(p: &ModelParams, sign: Sign, k: f64, r: f64, s: f64) -> Result<KernelEvaluation> {
    check_kernel_args(k, r, s)?;
    let d = denominator(p, sign, k);
    if d.norm() < KERNEL_SINGULAR_TOL {
        return Err(Error::SpectralSingularity(k));
    }
    let (near, far) = if r <= s { (r, s) } else { (s, r) };
    let m = p.m();
    let kr = Complex64::new(k * near, 0.0);
    let ks = Complex64::new(k * far, 0.0);
    let mut regular = bessel_dim1(BesselKind::J, m, kr)?;
    if let Some(l) = p.ln_varsigma() {
        let coupling = (l + 2.0 * m * (k / 2.0).ln()).exp();
        regular -= coupling * bessel_dim1(BesselKind::J, -m, kr)?;
    }
    let value = sigma(sign) * i() / (k * d) * regular * bessel_dim1(hankel(sign), m, ks)?;
    Ok(KernelEvaluation { k, r, s, value, sign })
}

/// Kernel of `R_0^nu(k^2 +/- i0)`.
pub fn resolvent_kernel_nu(p: &NuParams, sign: Sign, k: f64, r: f64, s: f64) -> Result<KernelEvaluation> {
    check_kernel_args(k, r, s)?;
    let d = denominator_nu(p, sign, k);
    if d.norm() < KERNEL_SINGULAR_TOL {
        return Err(Error::SpectralSingularity(k));
    }
    let (near, far) = if r <= s { (r, s) } else { (s, r) };
    let zero = Complex64::new(0.0, 0.0);
    let kr = Complex64::new(k * near, 0.0);
    let ks = Complex64::new(k * far, 0.0);
    let shift = EULER_GAMMA + (k / 2.0).ln() - p.nu();
    let regular = shift * bessel_dim1(BesselKind::J, zero, kr)?
        - PI / 2.0 * bessel_dim1(BesselKind::Y, zero, kr)?;
    let value = sigma(sign) * i() / (k * d) * regular * bessel_dim1(hankel(sign), zero, ks)?;
    Ok(KernelEvaluation { k, r, s, value, sign })
}

/// Zeros of `k -> denominator(p, sign, k)` in the window, found by scanning
/// `y = ln(k/2)` for local minima of the modulus and polishing them with
/// Gauss-Newton steps. Sorted ascending.
pub fn denominator_roots(p: &ModelParams, sign: Sign, k_window: (f64, f64)) -> Vec<f64> {
    let Some(l) = p.ln_varsigma() else {
        return vec![];
    };
    let m = p.m();
    let shift = l - sigma(sign) * i() * PI * m;
    let d = |y: f64| 1.0 - (shift + 2.0 * m * y).exp();
    let dd = |y: f64| -2.0 * m * (shift + 2.0 * m * y).exp();
    let y_lo = (k_window.0 / 2.0).ln();
    let y_hi = (k_window.1 / 2.0).ln();
    let h = (0.1 / m.norm()).min(0.05);
    let n = ((y_hi - y_lo) / h).ceil() as usize + 3;
    let ys: Vec<f64> = (0..n).map(|j| y_lo - h + j as f64 * h).collect();
    let vals: Vec<f64> = ys.iter().map(|&y| d(y).norm()).collect();
    let mut roots: Vec<f64> = vec![];
    for j in 1..n - 1 {
        if !(vals[j] <= vals[j - 1] && vals[j] <= vals[j + 1]) {
            continue;
        }
        let mut y = ys[j];
        for _ in 0..60 {
            let (f, g) = (d(y), dd(y));
            let g2 = g.norm_sqr();
            if g2 == 0.0 {
                break;
            }
            let step = (g.conj() * f).re / g2;
            y -= step.clamp(-h, h);
            if step.abs() < 1e-15 * y.abs().max(1.0) {
                break;
            }
        }
        if d(y).norm() < 1e-9 && y >= y_lo && y <= y_hi {
            let k = 2.0 * y.exp();
            if !roots.iter().any(|r| (r - k).abs() <= 1e-10 * k) {
                roots.push(k);
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn smatrix_nu_limits_and_zero() {
        let s = smatrix_nu(&NuParams::new(c64(0.3, 0.0)).unwrap());
        for x in [-1e7, 1e7] {
            assert!((s(x).unwrap() - i()).norm() < 1e-6);
        }
        let s = smatrix_nu(&NuParams::new(c64(EULER_GAMMA, PI / 2.0)).unwrap());
        assert!(s(0.0).unwrap().norm() < 1e-15);
    }

    #[test]
    fn periodic_params_use_another_algebra() {
        let p = Params::Model(ModelParams::new(c64(0.0, 1.0), c64(1.0, 0.0)).unwrap());
        assert_eq!(boundary_symbol(&p, Sign::Minus).unwrap_err(), Error::WrongAlgebra);
    }

    #[test]
    fn kernel_domain_guard() {
        let p = ModelParams::new(c64(0.5, 0.0), c64(0.0, 0.0)).unwrap();
        assert!(matches!(
            resolvent_kernel(&p, Sign::Plus, 10.0, 1.0, 20.0),
            Err(Error::Domain(_))
        ));
    }
}
