//! Parameter objects, the derived coupling `varsigma`, the exceptional
//! classification and the singular sets Omega (momenta) and Lambda (positions).
//!
//! Branch bookkeeping: for `kappa != 0` write `L = ln(varsigma)` (principal) and
//! `w_z = (L + 2 pi i z) / m`, `z` an integer. Then
//! `Im w_z = Im(L/m) + 2 pi Re(1/m) z` and `Re w_z = Re(L/m) - 2 pi Im(1/m) z`.
//! Eigenvalues come from branches with `|Im w_z| < pi`; spectral singularities
//! from branches with `Im w_z = +-pi`, at momentum `k^2 = 4 e^{-Re w_z}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gamma;
use crate::EULER_GAMMA;

/// Relative tolerance for deciding that a branch index is an integer.
pub const BRANCH_TOL: f64 = 1e-9;

/// Largest branch index enumerated for unbounded geometric families.
pub const MAX_BRANCH: i64 = 1_000_000;

const REAL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Coupling exponent `m` and boundary parameter `kappa` of `H_{m,kappa}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    m: Complex64,
    kappa: Complex64,
}

impl ModelParams {
    pub fn new(m: Complex64, kappa: Complex64) -> Result<Self> {
        if !(m.re.is_finite() && m.im.is_finite()) {
            return Err(Error::Validation(format!("m must be finite, got {m}")));
        }
        if m.re.abs() >= 1.0 {
            return Err(Error::Validation(format!("|Re m| must be < 1, got {m}")));
        }
        if m.norm() == 0.0 {
            return Err(Error::Validation(
                "m = 0: H_{0,kappa} does not depend on kappa; use the nu family (NuParams)".into(),
            ));
        }
        if !(kappa.re.is_finite() && kappa.im.is_finite()) {
            return Err(Error::Validation(
                "kappa = infinity is disregarded: H_{m,inf} = H_{-m,0}; pass -m and kappa = 0".into(),
            ));
        }
        Ok(Self { m, kappa })
    }

    pub fn m(&self) -> Complex64 {
        self.m
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    /// `Re m == 0`: the symbol is periodic in x.
    pub fn is_periodic(&self) -> bool {
        self.m.re == 0.0
    }

    /// ln(varsigma) = ln(kappa) + ln Gamma(-m) - ln Gamma(m), brought to the
    /// principal branch. None when kappa = 0.
    pub fn ln_varsigma(&self) -> Option<Complex64> {
        if self.kappa.norm() == 0.0 {
            return None;
        }
        Some(varsigma(self).ln())
    }

    /// `L/m` with `L` the principal log of varsigma.
    pub fn branch_base(&self) -> Option<Complex64> {
        self.ln_varsigma().map(|l| l / self.m)
    }

    /// `w_z = (ln varsigma + 2 pi i z)/m`.
    pub fn branch_w(&self, z: i64) -> Option<Complex64> {
        self.ln_varsigma()
            .map(|l| (l + Complex64::new(0.0, 2.0 * PI * z as f64)) / self.m)
    }

    /// Im-part increment of `w_z` per branch: 2 pi Re(1/m).
    pub fn branch_step(&self) -> f64 {
        2.0 * PI * self.m.inv().re
    }
}

/// Boundary parameter of `H_0^nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuParams {
    nu: Complex64,
}

impl NuParams {
    pub fn new(nu: Complex64) -> Result<Self> {
        if !(nu.re.is_finite() && nu.im.is_finite()) {
            return Err(Error::Validation(format!("nu must be finite, got {nu}")));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> Complex64 {
        self.nu
    }
}

/// Either operator family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    Model(ModelParams),
    Nu(NuParams),
}

impl From<ModelParams> for Params {
    fn from(p: ModelParams) -> Self {
        Params::Model(p)
    }
}

impl From<NuParams> for Params {
    fn from(p: NuParams) -> Self {
        Params::Nu(p)
    }
}

/// Branch indices realizing `Im w_z = +-pi` for one sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchWitness {
    None,
    Single(i64),
    /// Every integer branch (only when Re m = 0).
    All,
}

impl BranchWitness {
    pub fn is_some(&self) -> bool {
        !matches!(self, BranchWitness::None)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub self_adjoint: bool,
    pub exceptional_plus: bool,
    pub exceptional_minus: bool,
    pub witnesses_plus: BranchWitness,
    pub witnesses_minus: BranchWitness,
}

impl Classification {
    pub fn is_exceptional(&self) -> bool {
        self.exceptional_plus || self.exceptional_minus
    }

    pub fn exceptional(&self, sign: Sign) -> bool {
        match sign {
            Sign::Plus => self.exceptional_plus,
            Sign::Minus => self.exceptional_minus,
        }
    }

    pub fn witness(&self, sign: Sign) -> BranchWitness {
        match sign {
            Sign::Plus => self.witnesses_plus,
            Sign::Minus => self.witnesses_minus,
        }
    }
}

/// varsigma = kappa Gamma(-m) / Gamma(m).
pub fn varsigma(p: &ModelParams) -> Complex64 {
    if p.kappa.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    // |Re m| < 1 and m != 0 keep both arguments off the poles.
    let num = gamma(-p.m).expect("Gamma(-m) finite for admissible m");
    let den = gamma(p.m).expect("Gamma(m) finite for admissible m");
    p.kappa * num / den
}

/// `true` if `x` is within `BRANCH_TOL` (relative) of an integer.
pub(crate) fn nearest_integer(x: f64) -> Option<i64> {
    let r = x.round();
    if (x - r).abs() <= BRANCH_TOL * x.abs().max(1.0) && r.abs() < 9.0e15 {
        Some(r as i64)
    } else {
        None
    }
}

/// `-ln|kappa|/n` for `m = i n`: the (branch independent) value of `Im w_z`.
pub(crate) fn periodic_im_w(p: &ModelParams) -> f64 {
    -p.kappa.norm().ln() / p.m.im
}

fn is_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= BRANCH_TOL * b.abs().max(1.0)
}

fn model_witness(p: &ModelParams, alpha: f64) -> BranchWitness {
    let Some(base) = p.branch_base() else {
        return BranchWitness::None;
    };
    if p.is_periodic() {
        if is_close(periodic_im_w(p), alpha) {
            BranchWitness::All
        } else {
            BranchWitness::None
        }
    } else {
        match nearest_integer((alpha - base.im) / p.branch_step()) {
            Some(z) => BranchWitness::Single(z),
            None => BranchWitness::None,
        }
    }
}

pub fn classify_model(p: &ModelParams) -> Classification {
    let self_adjoint = (p.m.im.abs() <= REAL_TOL && p.kappa.im.abs() <= REAL_TOL)
        || (p.m.re == 0.0 && (p.kappa.norm() - 1.0).abs() <= 1e-12);
    let witnesses_plus = model_witness(p, PI);
    let witnesses_minus = model_witness(p, -PI);
    Classification {
        self_adjoint,
        exceptional_plus: witnesses_plus.is_some(),
        exceptional_minus: witnesses_minus.is_some(),
        witnesses_plus,
        witnesses_minus,
    }
}

pub fn classify_nu(p: &NuParams) -> Classification {
    let half = PI / 2.0;
    let plus = (p.nu.im - half).abs() <= BRANCH_TOL * half;
    let minus = (p.nu.im + half).abs() <= BRANCH_TOL * half;
    Classification {
        self_adjoint: p.nu.im.abs() <= REAL_TOL,
        exceptional_plus: plus,
        exceptional_minus: minus,
        witnesses_plus: if plus { BranchWitness::Single(0) } else { BranchWitness::None },
        witnesses_minus: if minus { BranchWitness::Single(0) } else { BranchWitness::None },
    }
}

pub fn classify(p: &Params) -> Classification {
    match p {
        Params::Model(p) => classify_model(p),
        Params::Nu(p) => classify_nu(p),
    }
}

/// A windowed view of Omega^{sign} (momenta) for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularitySet {
    pub sign: Sign,
    /// Sorted ascending.
    pub momenta: Vec<f64>,
    pub energies: Vec<f64>,
    pub branches: Vec<i64>,
    pub infinite: bool,
    /// The window was clipped by `MAX_BRANCH`.
    pub truncated: bool,
}

impl SingularitySet {
    fn empty(sign: Sign) -> Self {
        Self {
            sign,
            momenta: vec![],
            energies: vec![],
            branches: vec![],
            infinite: false,
            truncated: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }
}

/// Momentum of the singularity carried by branch `z`:
/// `k^2 = 4 exp(-Re(L/m) + 2 pi Im(1/m) z)`.
fn branch_momentum(p: &ModelParams, base: Complex64, z: i64) -> f64 {
    let exponent = -base.re + 2.0 * PI * p.m.inv().im * z as f64;
    2.0 * (0.5 * exponent).exp()
}

/// Integer branch range whose momenta fall in `[k_min, k_max]` for the
/// periodic family, clipped to `MAX_BRANCH`.
fn periodic_branch_range(p: &ModelParams, base: Complex64, k_min: f64, k_max: f64) -> (i64, i64, bool) {
    // ln(k/2) = (-Re base + 2 pi Im(1/m) z) / 2 is affine in z
    let slope = PI * p.m.inv().im;
    let offset = -0.5 * base.re;
    let z_of = |k: f64| ((k / 2.0).ln() - offset) / slope;
    let (a, b) = (z_of(k_min), z_of(k_max));
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let lo = lo.ceil();
    let hi = hi.floor();
    let max = MAX_BRANCH as f64;
    let truncated = lo < -max || hi > max;
    (lo.max(-max) as i64, hi.min(max) as i64, truncated)
}

/// Omega^{sign}_{m,kappa} restricted to the momentum window.
pub fn omega_set(p: &ModelParams, sign: Sign, k_window: (f64, f64)) -> SingularitySet {
    let mut set = SingularitySet::empty(sign);
    let Some(base) = p.branch_base() else {
        return set;
    };
    let (k_min, k_max) = k_window;
    let mut branches: Vec<i64> = match classify_model(p).witness(sign) {
        BranchWitness::None => vec![],
        BranchWitness::Single(z) => vec![z],
        BranchWitness::All => {
            set.infinite = true;
            let (lo, hi, truncated) = periodic_branch_range(p, base, k_min, k_max);
            set.truncated = truncated;
            if lo <= hi {
                (lo..=hi).collect()
            } else {
                vec![]
            }
        }
    };
    branches.retain(|&z| {
        let k = branch_momentum(p, base, z);
        k >= k_min && k <= k_max
    });
    let mut pairs: Vec<(f64, i64)> = branches
        .into_iter()
        .map(|z| (branch_momentum(p, base, z), z))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    set.momenta = pairs.iter().map(|p| p.0).collect();
    set.energies = set.momenta.iter().map(|k| k * k).collect();
    set.branches = pairs.iter().map(|p| p.1).collect();
    set
}

/// Omega_0^nu: `k = 2 e^{Re nu - gamma}` when nu is exceptional.
pub fn omega_nu(p: &NuParams) -> SingularitySet {
    let c = classify_nu(p);
    let sign = if c.exceptional_minus { Sign::Minus } else { Sign::Plus };
    let mut set = SingularitySet::empty(sign);
    if c.is_exceptional() {
        let k = 2.0 * (p.nu.re - EULER_GAMMA).exp();
        set.momenta = vec![k];
        set.energies = vec![k * k];
        set.branches = vec![0];
    }
    set
}

/// Lambda^{sign}: the positions `x = -(Re(L/m) - 2 pi Im(1/m) z)/2` of the
/// singular branches, restricted to `[x_min, x_max]`, sorted ascending.
pub fn lambda_set(p: &Params, sign: Sign, x_window: (f64, f64)) -> Vec<f64> {
    let (x_min, x_max) = x_window;
    match p {
        Params::Model(mp) => {
            let Some(base) = mp.branch_base() else {
                return vec![];
            };
            let k_window = (2.0 * x_min.exp(), 2.0 * x_max.exp());
            let omega = omega_set(mp, sign, k_window);
            let mut xs: Vec<f64> = omega
                .branches
                .iter()
                .map(|&z| -0.5 * (base.re - 2.0 * PI * mp.m.inv().im * z as f64))
                .filter(|x| *x >= x_min && *x <= x_max)
                .collect();
            xs.sort_by(f64::total_cmp);
            xs
        }
        Params::Nu(np) => {
            let c = classify_nu(np);
            if !c.exceptional(sign) {
                return vec![];
            }
            let x = np.nu.re - EULER_GAMMA;
            if x >= x_min && x <= x_max {
                vec![x]
            } else {
                vec![]
            }
        }
    }
}
