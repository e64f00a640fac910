//! Point spectrum: eigenvalue enumeration, count bounds and the sequences of
//! eigenvalues that accumulate at a point of `(0, inf)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{periodic_im_w, ModelParams, NuParams, Params, BRANCH_TOL, MAX_BRANCH};
use crate::specfun::gamma;
use crate::EULER_GAMMA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum CountKind {
    Empty,
    Finite(usize),
    Infinite,
}

/// Eigenvalues `lambda = -4 e^{-w}` with `w = (ln varsigma + 2 pi i z)/m`,
/// `|Im w| < pi`, ordered by descending modulus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralData {
    pub eigenvalues: Vec<Complex64>,
    pub branch_indices: Vec<i64>,
    /// Size of the whole point spectrum, not of the windowed view.
    pub count_kind: CountKind,
    /// The listing of an infinite family was clipped by `MAX_BRANCH` or by
    /// the representable range of moduli.
    pub truncated: bool,
    /// Some branch sits on `|Im w| = pi` within tolerance and was dropped.
    pub on_boundary: bool,
}

/// Whether `|Im w| < pi` strictly, with `on_boundary` set within tolerance.
fn strictly_inside(im_w: f64) -> (bool, bool) {
    let gap = PI - im_w.abs();
    let boundary = gap.abs() <= BRANCH_TOL * PI;
    (gap > 0.0 && !boundary, boundary)
}

fn eigenvalue_of(w: Complex64) -> Complex64 {
    -4.0 * (-w).exp()
}

const REPRESENTABLE: (f64, f64) = (1e-300, 1e300);

/// Eigenvalues with modulus in `[lo, hi]` (use `f64::INFINITY` for no cap).
/// Infinite families are listed only for moduli in `[1e-300, 1e300]`.
pub fn eigenvalues(p: &ModelParams, modulus_window: (f64, f64)) -> SpectralData {
    let mut data = SpectralData {
        eigenvalues: vec![],
        branch_indices: vec![],
        count_kind: CountKind::Empty,
        truncated: false,
        on_boundary: false,
    };
    let Some(base) = p.branch_base() else {
        return data;
    };
    let (lo, hi) = modulus_window;
    let branches: Vec<i64> = if p.is_periodic() {
        let (inside, boundary) = strictly_inside(periodic_im_w(p));
        data.on_boundary = boundary;
        if !inside {
            return data;
        }
        data.count_kind = CountKind::Infinite;
        // |lambda_z| = 4 exp(-Re w_z), Re w_z = Re(base) - 2 pi Im(1/m) z
        let slope = -2.0 * PI * p.m().inv().im;
        let z_of = |modulus: f64| (-(modulus / 4.0).ln() - base.re) / slope;
        // moduli outside [1e-300, 1e300] are not representable; listing stops there
        let clipped = lo < REPRESENTABLE.0 || hi > REPRESENTABLE.1;
        let (a, b) = (z_of(lo.max(REPRESENTABLE.0)), z_of(hi.min(REPRESENTABLE.1)));
        let (zl, zh) = if a <= b { (a, b) } else { (b, a) };
        let max = MAX_BRANCH as f64;
        data.truncated = clipped || zl.ceil() < -max || zh.floor() > max;
        let (zl, zh) = (zl.ceil().max(-max) as i64, zh.floor().min(max) as i64);
        if zl > zh {
            vec![]
        } else {
            (zl..=zh).collect()
        }
    } else {
        let step = p.branch_step();
        let a = (-PI - base.im) / step;
        let b = (PI - base.im) / step;
        let (zl, zh) = if a <= b { (a, b) } else { (b, a) };
        let mut all = vec![];
        for z in (zl.floor() as i64 - 1)..=(zh.ceil() as i64 + 1) {
            let w = p.branch_w(z).expect("kappa != 0");
            let (inside, boundary) = strictly_inside(w.im);
            data.on_boundary |= boundary;
            if inside {
                all.push(z);
            }
        }
        data.count_kind = if all.is_empty() {
            CountKind::Empty
        } else {
            CountKind::Finite(all.len())
        };
        all
    };
    let mut pairs: Vec<(Complex64, i64)> = branches
        .into_iter()
        .map(|z| (eigenvalue_of(p.branch_w(z).expect("kappa != 0")), z))
        .filter(|(l, _)| l.norm() >= lo && l.norm() <= hi)
        .collect();
    pairs.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
    data.eigenvalues = pairs.iter().map(|p| p.0).collect();
    data.branch_indices = pairs.iter().map(|p| p.1).collect();
    data
}

/// All eigenvalues of a non-periodic pair (no window).
pub fn all_eigenvalues(p: &ModelParams) -> SpectralData {
    eigenvalues(p, (0.0, f64::INFINITY))
}

/// `-4 e^{2(nu - gamma)}` when `|Im nu| < pi/2`.
pub fn eigenvalue_nu(p: &NuParams) -> Option<Complex64> {
    let nu = p.nu();
    let (inside, _) = strictly_inside(2.0 * nu.im);
    inside.then(|| -4.0 * (2.0 * (nu - EULER_GAMMA)).exp())
}

/// Number of eigenvalues of either family; `None` for an infinite spectrum.
pub fn eigenvalue_count(p: &Params) -> Option<usize> {
    match p {
        Params::Nu(np) => Some(usize::from(eigenvalue_nu(np).is_some())),
        Params::Model(mp) => match all_eigenvalues(mp).count_kind {
            CountKind::Empty => Some(0),
            CountKind::Finite(n) => Some(n),
            CountKind::Infinite => None,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CountBounds {
    Zero,
    Infinite,
    /// `ln|kappa|/Im m = +-pi`: exceptional, no eigenvalues.
    ExceptionalBoundary,
    /// The count is `n` or `n + 1`, where `n < |m|^2/|Re m| <= n + 1`.
    Range { n: u64 },
}

pub fn count_bounds(p: &ModelParams) -> CountBounds {
    if p.kappa().norm() == 0.0 {
        return CountBounds::Zero;
    }
    let m = p.m();
    if p.is_periodic() {
        let v = periodic_im_w(p);
        let (inside, boundary) = strictly_inside(v);
        return if boundary {
            CountBounds::ExceptionalBoundary
        } else if inside {
            CountBounds::Infinite
        } else {
            CountBounds::Zero
        };
    }
    let ratio = m.norm_sqr() / m.re.abs();
    CountBounds::Range {
        n: (ratio.ceil() - 1.0).max(0.0) as u64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    pub fn contains(self, z: Complex64) -> bool {
        match self {
            HalfPlane::Upper => z.im > 0.0,
            HalfPlane::Lower => z.im < 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `H_{m,kappa}` with `m` fixed and `kappa` varying.
    Model(Complex64),
    Nu,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccumulationRun {
    pub parameter_sequence: Vec<Params>,
    pub eigenvalue_sequence: Vec<Complex64>,
    pub target: f64,
    pub half_plane: HalfPlane,
}

/// Parameters `p_1..p_n` whose eigenvalues approach `target` from the given
/// half-plane. Each eigenvalue is recomputed from its parameters.
pub fn accumulation_sequence(
    target: f64,
    family: Family,
    half_plane: HalfPlane,
    n_terms: usize,
) -> Result<AccumulationRun> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::Validation(format!("target energy must be > 0, got {target}")));
    }
    let mut run = AccumulationRun {
        parameter_sequence: Vec::with_capacity(n_terms),
        eigenvalue_sequence: Vec::with_capacity(n_terms),
        target,
        half_plane,
    };
    for n in 1..=n_terms {
        let step = 1.0 / n as f64;
        let (params, lambda) = match family {
            Family::Model(m) => {
                let a = -(target / 4.0).ln();
                let b = match half_plane {
                    HalfPlane::Upper => PI - step,
                    HalfPlane::Lower => -PI + step,
                };
                let ratio = gamma(m)? / gamma(-m)?;
                let kappa = (m * Complex64::new(a, b)).exp() * ratio;
                let p = ModelParams::new(m, kappa)?;
                let spec = all_eigenvalues(&p);
                let lambda = spec
                    .eigenvalues
                    .iter()
                    .copied()
                    .min_by(|x, y| (x - target).norm().total_cmp(&(y - target).norm()))
                    .ok_or_else(|| {
                        Error::Convergence(format!("no eigenvalue for term {n} of the sequence"))
                    })?;
                (Params::Model(p), lambda)
            }
            Family::Nu => {
                let a = EULER_GAMMA + 0.5 * (target / 4.0).ln();
                let b = match half_plane {
                    HalfPlane::Lower => PI / 2.0 - step,
                    HalfPlane::Upper => -PI / 2.0 + step,
                };
                let p = NuParams::new(Complex64::new(a, b))?;
                let lambda = eigenvalue_nu(&p).ok_or_else(|| {
                    Error::Convergence(format!("no eigenvalue for term {n} of the sequence"))
                })?;
                (Params::Nu(p), lambda)
            }
        };
        if !half_plane.contains(lambda) {
            return Err(Error::Convergence(format!(
                "term {n}: eigenvalue {lambda} is outside the {half_plane:?} half-plane"
            )));
        }
        run.parameter_sequence.push(params);
        run.eigenvalue_sequence.push(lambda);
    }
    Ok(run)
}
