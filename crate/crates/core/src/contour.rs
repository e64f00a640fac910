//! Adaptive sampling of a complex curve with continuous phase tracking.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    /// `|f|` below this aborts with `NotFredholm`.
    pub floor: f64,
    /// `|f|` above this aborts with `NotFredholm` (a pole on the contour).
    pub ceiling: f64,
    /// Segments whose phase step exceeds this are bisected.
    pub max_phase_step: f64,
    pub max_depth: u32,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            floor: 1e-6,
            ceiling: 1e6,
            max_phase_step: PI / 2.0,
            max_depth: 50,
        }
    }
}

/// Samples of `t -> f(t)` after refinement, with the unwrapped phase gain.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub samples: Vec<(f64, Complex64)>,
    pub phase: f64,
    pub min_modulus: f64,
}

/// Phase of `b / a` in (-pi, pi].
pub fn phase_step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

fn check_modulus(t: f64, v: Complex64, opts: &TraceOptions) -> Result<()> {
    let r = v.norm();
    if !r.is_finite() || r > opts.ceiling {
        return Err(Error::NotFredholm(format!(
            "symbol is unbounded near t = {t:.6e} (|f| = {r:.3e})"
        )));
    }
    if r < opts.floor {
        return Err(Error::NotFredholm(format!(
            "symbol vanishes near t = {t:.6e} (|f| = {r:.3e})"
        )));
    }
    Ok(())
}

/// Follow `f` along the increasing parameter list `grid`, bisecting any
/// segment whose phase step is too large or whose modulus gets close to the
/// floor.
pub fn trace_phase<F>(f: &F, grid: &[f64], opts: &TraceOptions) -> Result<PhaseTrace>
where
    F: Fn(f64) -> Result<Complex64>,
{
    assert!(grid.len() >= 2, "a contour needs at least two points");
    let mut samples = Vec::with_capacity(grid.len() * 2);
    let t0 = grid[0];
    let f0 = f(t0)?;
    check_modulus(t0, f0, opts)?;
    samples.push((t0, f0));
    for &t1 in &grid[1..] {
        let (ta, fa) = *samples.last().expect("nonempty");
        let f1 = f(t1)?;
        check_modulus(t1, f1, opts)?;
        refine(f, ta, fa, t1, f1, opts.max_depth, opts, &mut samples)?;
    }
    let phase = samples
        .windows(2)
        .map(|w| phase_step(w[0].1, w[1].1))
        .sum();
    let min_modulus = samples
        .iter()
        .map(|s| s.1.norm())
        .fold(f64::INFINITY, f64::min);
    Ok(PhaseTrace {
        samples,
        phase,
        min_modulus,
    })
}

#[allow(clippy::too_many_arguments)]
fn refine<F>(
    f: &F,
    t0: f64,
    f0: Complex64,
    t1: f64,
    f1: Complex64,
    depth: u32,
    opts: &TraceOptions,
    out: &mut Vec<(f64, Complex64)>,
) -> Result<()>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let step = phase_step(f0, f1).abs();
    let low = f0.norm().min(f1.norm()) < 10.0 * opts.floor;
    let splittable = depth > 0 && (t1 - t0).abs() > 1e-13 * t0.abs().max(1.0);
    if (step > opts.max_phase_step || low) && splittable {
        let tm = 0.5 * (t0 + t1);
        let fm = f(tm)?;
        check_modulus(tm, fm, opts)?;
        refine(f, t0, f0, tm, fm, depth - 1, opts, out)?;
        return refine(f, tm, fm, t1, f1, depth - 1, opts, out);
    }
    if step > opts.max_phase_step {
        return Err(Error::NotFredholm(format!(
            "phase jump of {step:.3} rad between t = {t0:.6e} and t = {t1:.6e} could not be resolved"
        )));
    }
    out.push((t1, f1));
    Ok(())
}

/// Grid `center + sinh(u)` for `u` uniform, covering `[center - half, center + half]`.
pub fn sinh_grid(center: f64, half: f64, points: usize) -> Vec<f64> {
    let umax = half.asinh();
    (0..points)
        .map(|j| {
            let u = -umax + 2.0 * umax * j as f64 / (points - 1) as f64;
            center + u.sinh()
        })
        .collect()
}

/// Uniform grid on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|j| a + (b - a) * j as f64 / (points - 1) as f64)
        .collect()
}
