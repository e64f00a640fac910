//! Winding numbers of the scattering symbols, the per-period trace of
//! separated operators `a(D) b(X)`, and the checks that tie both to the
//! eigenvalue count.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::contour::{trace_phase, uniform_grid, TraceOptions};
use crate::error::{Error, Result};
use crate::model::{nearest_integer, ModelParams, Params, Sign};
use crate::quad::{periodic_mean, CompositeRule};
use crate::scattering::{boundary_symbol, smatrix, BoundarySymbol};
use crate::spectrum::{count_bounds, eigenvalue_count, CountBounds};

/// Sign relating the counter-clockwise phase gain around the square
/// (edge 2, edge 3, edge 4 reversed, edge 1 reversed, with `x` horizontal
/// and `xi` vertical) to the winding number. Pinned by `(m, kappa) = (1/2, -1)`,
/// which has exactly one eigenvalue.
pub const SQUARE_ORIENTATION: f64 = -1.0;

/// Largest distance of `phase / 2 pi` from an integer that still counts as
/// a winding number.
pub const ROUNDING_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindingResult {
    pub value: i64,
    pub phase_increment: f64,
    pub min_modulus: f64,
    pub samples_used: usize,
}

impl WindingResult {
    pub fn rounding_residual(&self) -> f64 {
        (self.phase_increment / (2.0 * PI) - self.value as f64).abs()
    }
}

fn to_winding(turns: f64, phase: f64, min_modulus: f64, samples_used: usize) -> Result<WindingResult> {
    let value = turns.round();
    if (turns - value).abs() >= ROUNDING_TOL {
        return Err(Error::Convergence(format!(
            "phase gain of {turns:.4} turns is not close to an integer"
        )));
    }
    Ok(WindingResult {
        value: value as i64,
        phase_increment: phase,
        min_modulus,
        samples_used,
    })
}

/// Winding number of a sampled boundary symbol.
pub fn winding_square(b: &BoundarySymbol) -> Result<WindingResult> {
    let [e1, e2, e3, e4] = &b.edges;
    let chain = e2.phase + e3.phase - e4.phase - e1.phase;
    let min_modulus = b.edges.iter().map(|e| e.min_modulus).fold(f64::INFINITY, f64::min);
    let phase = SQUARE_ORIENTATION * chain;
    to_winding(phase / (2.0 * PI), phase, min_modulus, b.samples_used())
}

fn periodic_params(n: f64, kappa: Complex64) -> Result<ModelParams> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::Validation(format!("n must be > 0, got {n}")));
    }
    ModelParams::new(Complex64::new(0.0, n), kappa)
}

/// Refuse `ln|kappa| / n = +-pi`.
fn check_periodic_fredholm(n: f64, kappa: Complex64) -> Result<()> {
    let v = kappa.norm().ln() / n;
    for target in [PI, -PI] {
        if (v - target).abs() <= 1e-9 * PI {
            return Err(Error::NotFredholm(format!(
                "exceptional pair: ln|kappa|/n = {v:.12} equals {}pi",
                if target > 0.0 { "" } else { "-" }
            )));
        }
    }
    Ok(())
}

/// Winding number of `x -> S_{in,kappa}(x)` over one period `[0, pi/n]`.
pub fn winding_periodic(n: f64, kappa: Complex64) -> Result<WindingResult> {
    let p = periodic_params(n, kappa)?;
    check_periodic_fredholm(n, kappa)?;
    let s = smatrix(&p);
    let f = |x: f64| s(x);
    let tr = trace_phase(&f, &uniform_grid(0.0, PI / n, 257), &TraceOptions::default())?;
    to_winding(tr.phase / (2.0 * PI), tr.phase, tr.min_modulus, tr.samples.len())
}

/// `F_{in,kappa}(x) = -1 / ((1 - vs e^{-pi n} e^{2inx}) (1 - vs e^{pi n} e^{2inx}))`.
pub fn f_function(n: f64, vs: Complex64, x: f64) -> Complex64 {
    let z = Complex64::new(0.0, 2.0 * n * x).exp();
    let alpha = vs * (-PI * n).exp();
    let beta = vs * (PI * n).exp();
    -1.0 / ((1.0 - alpha * z) * (1.0 - beta * z))
}

/// Fourier coefficient `c_ell` of `F_{in,kappa}` in the basis `e^{2 i n ell x}`.
pub fn fourier_coefficient(n: f64, kappa: Complex64, ell: i64) -> Result<Complex64> {
    let p = periodic_params(n, kappa)?;
    check_periodic_fredholm(n, kappa)?;
    let vs = crate::model::varsigma(&p);
    periodic_mean(
        |x| f_function(n, vs, x) * Complex64::new(0.0, -2.0 * n * ell as f64 * x).exp(),
        0.0,
        PI / n,
        1e-14,
    )
}

/// `c_{-1}` from the geometric-series expansion of `F`.
pub fn c_minus_one_closed_form(n: f64, kappa: Complex64) -> Result<Complex64> {
    let p = periodic_params(n, kappa)?;
    check_periodic_fredholm(n, kappa)?;
    let v = kappa.norm().ln() / n;
    if v.abs() < PI {
        let vs = crate::model::varsigma(&p);
        Ok(1.0 / (vs * 2.0 * (PI * n).sinh()))
    } else {
        Ok(Complex64::new(0.0, 0.0))
    }
}

/// `G_n^{+/-}(xi) = e^{+/- pi n} (e^{pi xi} + e^{-/+ pi n}) / (e^{pi xi} + e^{+/- pi n})`,
/// written so that it does not overflow for large `|xi|`.
pub fn g_function(n: f64, sign: Sign, xi: f64) -> f64 {
    let s = sign.as_f64();
    let e = PI * n * s;
    // e^{e} (e^{pi xi} + e^{-e}) / (e^{pi xi} + e^{e})
    if xi <= 0.0 {
        let t = (PI * xi).exp();
        e.exp() * (t + (-e).exp()) / (t + e.exp())
    } else {
        let t = (-PI * xi).exp();
        e.exp() * (1.0 + (-e).exp() * t) / (1.0 + e.exp() * t)
    }
}

pub type RealFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// `a(xi) = g(xi - shift) - g(xi)` for a function `g` with limits `g(-inf)`, `g(+inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Telescoping {
    pub shift: f64,
    pub limit_minus: Complex64,
    pub limit_plus: Complex64,
}

/// The function of `D` in a separated term.
#[derive(Clone)]
pub struct AFunction {
    pub f: RealFn,
    pub limit_minus: Complex64,
    pub limit_plus: Complex64,
    pub telescoping: Option<Telescoping>,
    /// Half-width beyond which `f` is negligible when integrable.
    pub support: f64,
}

impl std::fmt::Debug for AFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AFunction")
            .field("limit_minus", &self.limit_minus)
            .field("limit_plus", &self.limit_plus)
            .field("telescoping", &self.telescoping)
            .field("support", &self.support)
            .finish()
    }
}

/// The function of `X` in a separated term.
#[derive(Clone)]
pub enum BPart {
    /// `e^{2 i n ell x}`.
    Fourier(i64),
    /// Any `pi/n`-periodic function.
    General(RealFn),
}

impl std::fmt::Debug for BPart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BPart::Fourier(l) => write!(f, "Fourier({l})"),
            BPart::General(_) => f.write_str("General(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeparatedTerm {
    pub coefficient: Complex64,
    pub a: AFunction,
    pub b: BPart,
}

/// `sum_j coefficient_j a_j(D) b_j(X)`.
#[derive(Debug, Clone, Default)]
pub struct SeparatedOperator {
    pub terms: Vec<SeparatedTerm>,
}

/// Integral of an `a` part over the real line.
pub fn a_integral(a: &AFunction) -> Result<Complex64> {
    if let Some(t) = a.telescoping {
        // int [g(xi - s) - g(xi)] d xi = -s (g(+inf) - g(-inf))
        return Ok(-t.shift * (t.limit_plus - t.limit_minus));
    }
    let scale = 1.0 + a.limit_minus.norm().max(a.limit_plus.norm());
    if a.limit_minus.norm() > 1e-12 * scale || a.limit_plus.norm() > 1e-12 * scale {
        return Err(Error::DivergentTrace(format!(
            "a(xi) tends to {} and {} at -inf and +inf and has no telescoping form",
            a.limit_minus, a.limit_plus
        )));
    }
    Ok(numeric_a_integral(a))
}

/// Composite Gauss-Legendre over the support of `a` plus a margin of 50.
pub fn numeric_a_integral(a: &AFunction) -> Complex64 {
    let half = a.support + 50.0;
    let panels = (2.0 * half / 0.5).ceil() as usize;
    let rule = CompositeRule::new(-half, half, panels, 16);
    rule.integrate(|x| (a.f)(x))
}

/// `Trace_n(a(D) b(X)) = (1/2n) int a * (n/pi) int_0^{pi/n} b`, summed over terms.
pub fn trace_n(op: &SeparatedOperator, n: f64) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for term in &op.terms {
        let mean = match &term.b {
            BPart::Fourier(0) => Complex64::new(1.0, 0.0),
            BPart::Fourier(_) => continue,
            BPart::General(b) => {
                let b = b.clone();
                periodic_mean(move |x| b(x), 0.0, PI / n, 1e-13)?
            }
        };
        if mean.norm() == 0.0 {
            continue;
        }
        total += term.coefficient * a_integral(&term.a)? * mean / (2.0 * n);
    }
    Ok(total)
}

/// The two separated operators `I_{in,kappa}` and `J_{in,kappa}` of the
/// periodic index computation, with Fourier modes `|ell| <= max_ell`.
pub fn projection_terms(n: f64, kappa: Complex64, max_ell: i64) -> Result<(SeparatedOperator, SeparatedOperator)> {
    let p = periodic_params(n, kappa)?;
    check_periodic_fredholm(n, kappa)?;
    let vs = crate::model::varsigma(&p);
    let g_plus_lim = ((-PI * n).exp(), (PI * n).exp());
    let mut i_op = SeparatedOperator::default();
    let mut j_op = SeparatedOperator::default();
    for ell in -max_ell..=max_ell {
        let c = fourier_coefficient(n, kappa, ell)?;
        // I: vs^2 c_l G+(D) {G-(D - 2n(l+2)) - G-(D)} e^{2in(l+2)X}
        let s_i = 2.0 * n * (ell + 2) as f64;
        let f_i: RealFn = Arc::new(move |xi| {
            let v = g_function(n, Sign::Plus, xi)
                * (g_function(n, Sign::Minus, xi - s_i) - g_function(n, Sign::Minus, xi));
            Complex64::new(v, 0.0)
        });
        i_op.terms.push(SeparatedTerm {
            coefficient: vs * vs * c,
            a: AFunction {
                f: f_i,
                limit_minus: Complex64::new(0.0, 0.0),
                limit_plus: Complex64::new(0.0, 0.0),
                telescoping: None,
                support: s_i.abs(),
            },
            b: BPart::Fourier(ell + 2),
        });
        // J: vs c_l {G+(D - 2nl) - G+(D)} e^{2in(l+1)X}
        let s_j = 2.0 * n * ell as f64;
        let f_j: RealFn = Arc::new(move |xi| {
            Complex64::new(g_function(n, Sign::Plus, xi - s_j) - g_function(n, Sign::Plus, xi), 0.0)
        });
        j_op.terms.push(SeparatedTerm {
            coefficient: vs * c,
            a: AFunction {
                f: f_j,
                limit_minus: Complex64::new(0.0, 0.0),
                limit_plus: Complex64::new(0.0, 0.0),
                telescoping: Some(Telescoping {
                    shift: s_j,
                    limit_minus: Complex64::new(g_plus_lim.0, 0.0),
                    limit_plus: Complex64::new(g_plus_lim.1, 0.0),
                }),
                support: s_j.abs(),
            },
            b: BPart::Fourier(ell + 1),
        });
    }
    Ok((i_op, j_op))
}

/// Eigenvalue count: a number or `"infinite"` in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Finite(usize),
    Infinite,
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Count::Finite(n) => s.serialize_u64(*n as u64),
            Count::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub winding: i64,
    pub count: Count,
    /// `Trace_n` of the projection onto the point spectrum (periodic case).
    pub trace: Option<f64>,
    pub residuals: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, bool>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl VerificationReport {
    fn finish(
        winding: i64,
        count: Count,
        trace: Option<f64>,
        residuals: BTreeMap<String, f64>,
        checks: BTreeMap<String, bool>,
    ) -> Self {
        let verdict = if checks.values().all(|&ok| ok) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            winding,
            count,
            trace,
            residuals,
            checks,
            verdict,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Winding number of `Gamma^-` on the square against the eigenvalue count.
pub fn verify_levinson(p: &Params) -> Result<VerificationReport> {
    if let Params::Model(mp) = p {
        if mp.is_periodic() {
            return Err(Error::WrongAlgebra);
        }
    }
    let symbol = boundary_symbol(p, Sign::Minus).map_err(|e| match e {
        Error::SingularPoint(x) => Error::NotFredholm(format!(
            "exceptional parameters: the symbol has a pole at x = {x:.6} on the boundary of the square"
        )),
        other => other,
    })?;
    let w = winding_square(&symbol)?;
    let count = eigenvalue_count(p).expect("finite point spectrum when Re m != 0");
    let mut residuals = BTreeMap::new();
    residuals.insert("rounding".to_string(), w.rounding_residual());
    residuals.insert("corner".to_string(), symbol.max_corner_residual());
    residuals.insert("min_modulus".to_string(), w.min_modulus);
    let mut checks = BTreeMap::new();
    checks.insert("winding_equals_count".to_string(), w.value == count as i64);
    checks.insert("corners_match".to_string(), symbol.max_corner_residual() < 1e-3);
    Ok(VerificationReport::finish(
        w.value,
        Count::Finite(count),
        None,
        residuals,
        checks,
    ))
}

/// Number of Fourier modes used for the assembled `I` and `J` operators.
pub const PERIODIC_MODES: i64 = 40;

/// Per-period winding of `S_{in,kappa}` against `-Trace_n` of the projection
/// onto the point spectrum, assembled from its `I` and `J` parts.
pub fn verify_periodic_levinson(n: f64, kappa: Complex64) -> Result<VerificationReport> {
    let p = periodic_params(n, kappa)?;
    let w = winding_periodic(n, kappa)?;
    let vs = crate::model::varsigma(&p);
    let c_quad = fourier_coefficient(n, kappa, -1)?;
    let c_exact = c_minus_one_closed_form(n, kappa)?;
    let (i_op, j_op) = projection_terms(n, kappa, PERIODIC_MODES)?;
    let trace_i = trace_n(&i_op, n)?;
    let trace_j = trace_n(&j_op, n)?;
    let trace_j_exact = vs * c_exact * 2.0 * (PI * n).sinh();
    let trace_p = trace_i + trace_j;
    let (count, expected_trace) = match count_bounds(&p) {
        CountBounds::Infinite => (Count::Infinite, 1.0),
        CountBounds::Zero => (Count::Finite(0), 0.0),
        other => unreachable!("non-exceptional periodic pair gave {other:?}"),
    };

    // c_{-1} relative error, or its size against the scale of F when it vanishes
    let f_scale = periodic_mean(|x| Complex64::new(f_function(n, vs, x).norm(), 0.0), 0.0, PI / n, 1e-10)?.re;
    let c_err = if c_exact.norm() > 0.0 {
        (c_quad - c_exact).norm() / c_exact.norm()
    } else {
        c_quad.norm() / f_scale
    };
    let trace_p_int = nearest_integer(trace_p.re).map(|v| v as f64);

    let mut residuals = BTreeMap::new();
    residuals.insert("rounding".to_string(), w.rounding_residual());
    residuals.insert("c_minus_one".to_string(), c_err);
    residuals.insert("trace_i".to_string(), trace_i.norm());
    residuals.insert("trace_j".to_string(), (trace_j - trace_j_exact).norm());
    residuals.insert("trace_projection_imag".to_string(), trace_p.im.abs());
    let mut checks = BTreeMap::new();
    checks.insert("c_minus_one".to_string(), c_err < 1e-8);
    checks.insert("trace_i_vanishes".to_string(), trace_i.norm() < 1e-8);
    checks.insert("trace_j_formula".to_string(), (trace_j - trace_j_exact).norm() < 1e-8);
    checks.insert(
        "winding_equals_minus_trace".to_string(),
        (trace_p - expected_trace).norm() < 1e-8
            && trace_p_int == Some(expected_trace)
            && w.value as f64 == -expected_trace,
    );
    checks.insert(
        "count_matches".to_string(),
        (w.value == -1) == (count == Count::Infinite),
    );
    Ok(VerificationReport::finish(
        w.value,
        count,
        Some(trace_p.re),
        residuals,
        checks,
    ))
}
