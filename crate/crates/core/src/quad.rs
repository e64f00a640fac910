//! Quadrature rules shared by the index and operator modules.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Adaptive Simpson on [a, b] with absolute tolerance `tol`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let fa = f(a);
    let fb = f(b);
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut evals = 3usize;
    let out = simpson_step(&f, a, b, fa, fm, fb, whole, tol, 50, &mut evals);
    if evals > 20_000_000 {
        return Err(Error::Convergence(format!(
            "adaptive Simpson on [{a}, {b}] exceeded its evaluation budget"
        )));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.norm() <= 15.0 * tol || *evals > 20_000_000 {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, evals)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, evals)
}

/// Mean of a periodic function over one period [a, a + period), by the
/// trapezoidal rule with point doubling until successive estimates agree to
/// `rel_tol` (exponential convergence for analytic integrands). Differences
/// at the rounding level of the mean of `|f|` also count as converged, so
/// vanishing means are handled.
pub fn periodic_mean<F>(f: F, a: f64, period: f64, rel_tol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let mut n = 16usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut max_abs: f64 = 0.0;
    for j in 0..n {
        let v = f(a + period * j as f64 / n as f64);
        sum += v;
        max_abs = max_abs.max(v.norm());
    }
    let mut mean = sum / n as f64;
    while n < (1 << 22) {
        for j in 0..n {
            let v = f(a + period * (j as f64 + 0.5) / n as f64);
            sum += v;
            max_abs = max_abs.max(v.norm());
        }
        n *= 2;
        let next = sum / n as f64;
        // rounding in the running sum scales with the peak, not the mean
        let noise = 1e-14 * max_abs;
        let done = (next - mean).norm() <= rel_tol * next.norm() + noise;
        mean = next;
        if done && n >= 64 {
            return Ok(mean);
        }
    }
    Err(Error::Convergence(
        "periodic trapezoid did not converge (near-singular integrand)".into(),
    ))
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        dp = if d != 0.0 { d } else { dp };
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = order as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule: `panels` equal panels on [a, b].
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * h * (xi + 1.0));
                weights.push(0.5 * h * wi);
            }
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}
