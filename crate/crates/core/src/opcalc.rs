//! Discretized functional calculus of `X` and `D` on a periodic grid, used to
//! apply the wave operators to test vectors, and a quadrature Hankel
//! transform.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{classify_model, classify_nu, ModelParams, NuParams, Params, Sign};
use crate::quad::CompositeRule;
use crate::specfun::{bessel_dim1, xi, BesselKind, BESSEL_MAX_ARG};
use crate::EULER_GAMMA;

/// Grid `x_j = -L + j h`, `h = 2L/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: 40.0,
            points: 1 << 14,
        }
    }
}

impl GridSpec {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Validation(format!("grid half-width must be > 0, got {half_width}")));
        }
        if points < 1 << 10 || !points.is_power_of_two() {
            return Err(Error::Validation(format!(
                "grid size must be a power of two >= 1024, got {points}"
            )));
        }
        Ok(Self { half_width, points })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.x(j)).collect()
    }

    /// Frequency of FFT bin `k`; the Nyquist bin maps to `-pi N / (2L)`.
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.points as i64;
        let k = k as i64;
        let signed = if k < n / 2 { k } else { k - n };
        2.0 * PI * signed as f64 / (n as f64 * self.spacing())
    }

    pub fn norm(&self, v: &[Complex64]) -> f64 {
        (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.spacing()).sqrt()
    }
}

/// Plans and scratch for one grid.
pub struct Calculus {
    pub grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Calculus {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.points),
            inverse: planner.plan_fft_inverse(grid.points),
        }
    }

    /// Multiplier array `a(xi_k)` in FFT order. The Nyquist bin gets the
    /// average of `a` at `+-pi N / (2L)`, which makes the discrete transpose
    /// of `a(D)` exactly `a(-D)`.
    pub fn multiplier<F>(&self, a: F) -> Result<Vec<Complex64>>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        let n = self.grid.points;
        let mut out: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(|k| a(self.grid.frequency(k)))
            .collect::<Result<_>>()?;
        let nyq = self.grid.frequency(n / 2);
        out[n / 2] = 0.5 * (a(nyq)? + a(-nyq)?);
        Ok(out)
    }

    /// `a(D) v` for a multiplier array from `multiplier`.
    pub fn apply_d(&self, a: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.points;
        let mut buf = v.to_vec();
        self.forward.process(&mut buf);
        for (b, m) in buf.iter_mut().zip(a) {
            *b *= m;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter_mut().for_each(|b| *b *= scale);
        buf
    }

    /// Multiplier array of `a(-D)` given that of `a(D)`.
    pub fn reflect(a: &[Complex64]) -> Vec<Complex64> {
        let n = a.len();
        (0..n).map(|k| a[(n - k) % n]).collect()
    }
}

/// `sum_j a_j(D) b_j(X)` on a grid.
pub struct GridOperator {
    /// `(a_j in FFT order, b_j on the grid)`.
    pub terms: Vec<(Vec<Complex64>, Vec<Complex64>)>,
}

impl GridOperator {
    pub fn apply(&self, calc: &Calculus, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (a, b) in &self.terms {
            let bv: Vec<Complex64> = b.iter().zip(v).map(|(b, v)| b * v).collect();
            for (o, w) in out.iter_mut().zip(calc.apply_d(a, &bv)) {
                *o += w;
            }
        }
        out
    }

    /// The bilinear transpose `sum_j b_j(X) a_j(-D)`.
    pub fn apply_transpose(&self, calc: &Calculus, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
        for (a, b) in &self.terms {
            let w = calc.apply_d(&Calculus::reflect(a), u);
            for ((o, w), b) in out.iter_mut().zip(w).zip(b) {
                *o += b * w;
            }
        }
        out
    }
}

fn xi_pair(b: Complex64, t: f64) -> Result<Complex64> {
    Ok(xi(Complex64::new(0.5, 0.0), -t)? * xi(b, t)?)
}

fn refuse_unbounded(p: &Params, sign: Sign) -> Result<()> {
    let singular = match p {
        // W^- blows up on Lambda^+, W^+ on Lambda^-
        Params::Model(mp) => classify_model(mp).exceptional(sign.flip()),
        Params::Nu(np) => classify_nu(np).exceptional(sign),
    };
    if singular {
        return Err(Error::UnboundedOperator(format!(
            "the {sign} wave operator is unbounded for these exceptional parameters"
        )));
    }
    Ok(())
}

/// Grid form of `Gamma^{sign}(X, D)` for the `(m, kappa)` family: the
/// x-multipliers are the bounded ratios `M(x)` and `vs e^{2mx} M(x)`.
pub fn wave_operator(p: &ModelParams, sign: Sign, calc: &Calculus) -> Result<GridOperator> {
    refuse_unbounded(&Params::Model(*p), sign)?;
    let m = p.m();
    let s = sign.as_f64();
    let i = Complex64::i();
    let phase = (s * i * PI / 2.0 * (m - 0.5)).exp();
    let rot = (s * i * PI * m).exp();
    let l = p.ln_varsigma();
    let xs = calc.grid.xs();
    let mut first = Vec::with_capacity(xs.len());
    let mut second = Vec::with_capacity(xs.len());
    for &x in &xs {
        match l {
            None => {
                first.push(phase);
                second.push(Complex64::new(0.0, 0.0));
            }
            Some(l) => {
                let log_u = l + 2.0 * m * x;
                let (mx, nx) = if log_u.re <= 0.0 {
                    let u = log_u.exp();
                    let den = 1.0 - u * rot;
                    (phase / den, u * phase / den)
                } else {
                    let v = (-log_u).exp();
                    let den = v - rot;
                    (v * phase / den, phase / den)
                };
                first.push(mx);
                second.push(-nx);
            }
        }
    }
    let a1 = calc.multiplier(|t| xi_pair(m, t))?;
    let mut terms = vec![(a1, first)];
    if l.is_some() {
        terms.push((calc.multiplier(|t| xi_pair(-m, t))?, second));
    }
    Ok(GridOperator { terms })
}

/// Grid form of `Gamma^{nu, sign}(X, D)`: `P(D) [(gamma + X - nu) M(X)] -
/// P(D) (i pi/2) tanh(pi D/2) [M(X)]` with `P(xi) = Xi_{1/2}(-xi) Xi_0(xi)`.
pub fn wave_operator_nu(p: &NuParams, sign: Sign, calc: &Calculus) -> Result<GridOperator> {
    refuse_unbounded(&Params::Nu(*p), sign)?;
    let s = sign.as_f64();
    let i = Complex64::i();
    let phase = (-s * i * PI / 4.0).exp();
    let xs = calc.grid.xs();
    let mut first = Vec::with_capacity(xs.len());
    let mut second = Vec::with_capacity(xs.len());
    for &x in &xs {
        let base = EULER_GAMMA + x - p.nu();
        let mx = phase / (base + s * i * PI / 2.0);
        first.push(base * mx);
        second.push(mx);
    }
    let zero = Complex64::new(0.0, 0.0);
    let a1 = calc.multiplier(|t| xi_pair(zero, t))?;
    let a2 = calc.multiplier(|t| Ok(-xi_pair(zero, t)? * i * PI / 2.0 * (PI * t / 2.0).tanh()))?;
    Ok(GridOperator {
        terms: vec![(a1, first), (a2, second)],
    })
}

pub fn apply_wave_operator(p: &ModelParams, sign: Sign, v: &[Complex64], g: GridSpec) -> Result<Vec<Complex64>> {
    check_len(v, g)?;
    let calc = Calculus::new(g);
    Ok(wave_operator(p, sign, &calc)?.apply(&calc, v))
}

pub fn apply_wave_operator_nu(p: &NuParams, sign: Sign, v: &[Complex64], g: GridSpec) -> Result<Vec<Complex64>> {
    check_len(v, g)?;
    let calc = Calculus::new(g);
    Ok(wave_operator_nu(p, sign, &calc)?.apply(&calc, v))
}

fn check_len(v: &[Complex64], g: GridSpec) -> Result<()> {
    if v.len() != g.points {
        return Err(Error::Validation(format!(
            "vector has {} samples, grid has {}",
            v.len(),
            g.points
        )));
    }
    Ok(())
}

/// Smooth test vector: a modulated Gaussian `amp e^{i k x} e^{-(x - c)^2 / (2 w^2)}`.
pub fn gaussian(g: GridSpec, center: f64, width: f64, freq: f64, amp: Complex64) -> Vec<Complex64> {
    g.xs()
        .iter()
        .map(|&x| amp * Complex64::new(0.0, freq * x).exp() * (-(x - center).powi(2) / (2.0 * width * width)).exp())
        .collect()
}

/// Random smooth test vectors near the origin.
pub fn random_test_vectors(g: GridSpec, trials: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|t| {
            if t == 0 {
                return gaussian(g, 0.0, 2.0, 0.0, Complex64::new(1.0, 0.0));
            }
            let center = rng.gen_range(-2.0..2.0);
            let width = rng.gen_range(1.0..3.0);
            let freq = rng.gen_range(-2.0..2.0);
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            gaussian(g, center, width, freq, amp)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComposeReport {
    pub grid: GridSpec,
    pub trials: usize,
    /// max over trials of `|(W^{+#} W^- - 1) v| / |v|`.
    pub left_residual: f64,
    /// max over trials of `|(W^- W^{+#} - 1) v| / |v|`.
    pub right_residual: f64,
    pub per_trial: Vec<f64>,
}

/// Check `W^{+#} W^- = 1` on random smooth vectors, and report the
/// defect of `W^- W^{+#}` (the projection onto the continuous subspace).
pub fn transpose_compose_check(p: &Params, g: GridSpec, trials: usize, seed: u64) -> Result<ComposeReport> {
    let calc = Calculus::new(g);
    let (minus, plus) = match p {
        Params::Model(mp) => (
            wave_operator(mp, Sign::Minus, &calc)?,
            wave_operator(mp, Sign::Plus, &calc)?,
        ),
        Params::Nu(np) => (
            wave_operator_nu(np, Sign::Minus, &calc)?,
            wave_operator_nu(np, Sign::Plus, &calc)?,
        ),
    };
    let vectors = random_test_vectors(g, trials, seed);
    let rel = |w: &[Complex64], v: &[Complex64]| {
        let nv = g.norm(v);
        if nv == 0.0 {
            return 0.0;
        }
        let d: Vec<Complex64> = w.iter().zip(v).map(|(a, b)| a - b).collect();
        g.norm(&d) / nv
    };
    let results: Vec<(f64, f64)> = vectors
        .par_iter()
        .map(|v| {
            let left = plus.apply_transpose(&calc, &minus.apply(&calc, v));
            let right = minus.apply(&calc, &plus.apply_transpose(&calc, v));
            (rel(&left, v), rel(&right, v))
        })
        .collect();
    Ok(ComposeReport {
        grid: g,
        trials,
        left_residual: results.iter().map(|r| r.0).fold(0.0, f64::max),
        right_residual: results.iter().map(|r| r.1).fold(0.0, f64::max),
        per_trial: results.iter().map(|r| r.0).collect(),
    })
}

/// `(F_m f)(r) = int_0^inf sqrt(2/pi) J~_m(r s) f(s) ds` with `f` sampled on
/// the nodes of `rule`, evaluated at each point of `r_out`.
pub fn hankel_transform(
    m: Complex64,
    f_samples: &[Complex64],
    rule: &CompositeRule,
    r_out: &[f64],
) -> Result<Vec<Complex64>> {
    if m.re <= -1.0 {
        return Err(Error::Domain(format!("Hankel transform needs Re m > -1, got {m}")));
    }
    if f_samples.len() != rule.nodes.len() {
        return Err(Error::Validation("one sample per quadrature node expected".into()));
    }
    let s_max = rule.nodes.iter().fold(0.0f64, |a, &s| a.max(s.abs()));
    let r_max = r_out.iter().fold(0.0f64, |a, &r| a.max(r.abs()));
    if s_max * r_max > BESSEL_MAX_ARG {
        return Err(Error::Domain(format!(
            "r * s reaches {} beyond the Bessel range {BESSEL_MAX_ARG}",
            s_max * r_max
        )));
    }
    let c = (2.0 / PI).sqrt();
    r_out
        .par_iter()
        .map(|&r| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&s, &w), &fs) in rule.nodes.iter().zip(&rule.weights).zip(f_samples) {
                if fs == Complex64::new(0.0, 0.0) {
                    continue;
                }
                acc += w * c * bessel_dim1(BesselKind::J, m, Complex64::new(r * s, 0.0))? * fs;
            }
            Ok(acc)
        })
        .collect()
}
