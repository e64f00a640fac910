//! Command-line front end. `run` parses arguments, calls exactly one library
//! operation and returns the exit code with the rendered report.
//!
//! Exit codes: 0 success, 1 invalid input, 2 a verification failed,
//! 3 the request was refused for exceptional (non-Fredholm, unbounded or
//! singular) parameters.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::index::{verify_levinson, verify_periodic_levinson, winding_periodic, winding_square};
use crate::model::{
    classify, lambda_set, omega_nu, omega_set, ModelParams, NuParams, Params, Sign,
};
use crate::opcalc::{hankel_transform, transpose_compose_check, GridSpec};
use crate::quad::CompositeRule;
use crate::scattering::{
    boundary_symbol, denominator_roots, resolvent_kernel, resolvent_kernel_nu, smatrix, smatrix_nu,
};
use crate::spectrum::{
    accumulation_sequence, count_bounds, eigenvalue_nu, eigenvalues, Family, HalfPlane,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_REFUSED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "levlab", version, about = "Spectral and scattering data of half-line inverse-square operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Mk,
    Nu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HalfPlaneArg {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Coupling exponent m ("a+bi" or "[a,b]").
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Boundary parameter kappa.
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<String>,
    /// Boundary parameter nu of the m = 0 family.
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<String>,
    /// Sign of the symbol or resolvent boundary value: + or -.
    #[arg(long, default_value = "-", allow_hyphen_values = true)]
    pub sign: String,
    /// Window lo:hi (meaning depends on the command).
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Grid L:N for opcheck.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance override where a command has one.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Self-adjointness and exceptional classification.
    Classify(Common),
    /// Eigenvalues (window on |lambda|) and count bounds.
    Spectrum(Common),
    /// Spectral singularities Omega (window on k) with positions Lambda.
    Singularities(Common),
    /// Scattering matrix on an x-window.
    Smatrix {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Sampled edges of the wave-operator symbol on the square.
    Boundary(Common),
    /// Winding number of the symbol (square, or one period when Re m = 0).
    Winding(Common),
    /// Winding on the square against the eigenvalue count.
    VerifyLevinson(Common),
    /// Per-period winding against the trace of the eigenprojection.
    VerifyPeriodic {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: f64,
    },
    /// Resolvent kernel R(k^2 +/- i0; r, s).
    Resolvent {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        s: f64,
    },
    /// Eigenvalues accumulating at a positive energy.
    Accumulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: f64,
        #[arg(long, value_enum, default_value = "nu")]
        family: FamilyArg,
        #[arg(long, value_enum, default_value = "upper")]
        half_plane: HalfPlaneArg,
        #[arg(long, default_value_t = 50)]
        terms: usize,
    },
    /// Discretized check of W^{+#} W^- = 1.
    Opcheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        trials: usize,
    },
    /// Hankel transform applied twice to a Gaussian bump.
    Hankel {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2.0)]
        center: f64,
        #[arg(long, default_value_t = 0.22)]
        width: f64,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse "a+bi", "a-bi", "bi", "a", "i" or "[a,b]".
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Validation(format!("cannot parse complex number '{text}'"));
    let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            return Err(bad());
        }
        return Ok(Complex64::new(num(parts[0])?, num(parts[1])?));
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return Ok(Complex64::new(num(&s)?, 0.0));
    };
    // split before the last sign that does not start an exponent
    let bytes = body.as_bytes();
    let mut split = 0;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = k;
            break;
        }
    }
    let (re, im) = body.split_at(split);
    let re = if re.is_empty() { 0.0 } else { num(re)? };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => num(t)?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64)> {
    let bad = || Error::Validation(format!("{what} must look like lo:hi, got '{text}'"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a < b) {
        return Err(bad());
    }
    Ok((a, b))
}

fn parse_sign(text: &str) -> Result<Sign> {
    match text {
        "+" | "plus" => Ok(Sign::Plus),
        "-" | "minus" => Ok(Sign::Minus),
        _ => Err(Error::Validation(format!("sign must be + or -, got '{text}'"))),
    }
}

fn params(c: &Common) -> Result<Params> {
    match (&c.m, &c.kappa, &c.nu) {
        (Some(m), kappa, None) => {
            let kappa = kappa
                .as_deref()
                .ok_or_else(|| Error::Validation("--kappa is required with --m".into()))?;
            Ok(Params::Model(ModelParams::new(parse_complex(m)?, parse_complex(kappa)?)?))
        }
        (None, None, Some(nu)) => Ok(Params::Nu(NuParams::new(parse_complex(nu)?)?)),
        _ => Err(Error::Validation(
            "give either --m with --kappa, or --nu alone".into(),
        )),
    }
}

fn window(c: &Common, default: (f64, f64)) -> Result<(f64, f64)> {
    c.window.as_deref().map_or(Ok(default), |w| parse_pair(w, "--window"))
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn csv_rows(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

enum Report {
    Json(Value),
    Text(String),
}

struct Done {
    report: Report,
    failed: bool,
}

impl Done {
    fn ok(v: Value) -> Self {
        Done {
            report: Report::Json(v),
            failed: false,
        }
    }
}

fn render(format: Format, json_value: Value, csv: impl FnOnce() -> String) -> Report {
    match format {
        Format::Json => Report::Json(json_value),
        Format::Csv => Report::Text(csv()),
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Classify(c)
        | Command::Spectrum(c)
        | Command::Singularities(c)
        | Command::Boundary(c)
        | Command::Winding(c)
        | Command::VerifyLevinson(c) => c,
        Command::Smatrix { common, .. }
        | Command::VerifyPeriodic { common, .. }
        | Command::Resolvent { common, .. }
        | Command::Accumulate { common, .. }
        | Command::Opcheck { common, .. }
        | Command::Hankel { common, .. } => common,
    }
}

fn execute(cmd: &Command) -> Result<Done> {
    let c = common(cmd);
    match cmd {
        Command::Classify(_) => {
            let p = params(c)?;
            Ok(Done::ok(json!({ "params": to_json(&p), "classification": to_json(&classify(&p)) })))
        }
        Command::Spectrum(_) => {
            let p = params(c)?;
            match p {
                Params::Model(mp) => {
                    let data = eigenvalues(&mp, window(c, (1e-8, 1e8))?);
                    let rows: Vec<Vec<f64>> = data
                        .eigenvalues
                        .iter()
                        .zip(&data.branch_indices)
                        .map(|(l, z)| vec![l.re, l.im, *z as f64])
                        .collect();
                    let v = json!({
                        "params": to_json(&p),
                        "spectrum": to_json(&data),
                        "count_bounds": to_json(&count_bounds(&mp)),
                    });
                    Ok(Done {
                        report: render(c.format, v, || csv_rows("re,im,branch", rows)),
                        failed: false,
                    })
                }
                Params::Nu(np) => {
                    let l = eigenvalue_nu(&np);
                    let v = json!({ "params": to_json(&p), "eigenvalues": to_json(&l.into_iter().collect::<Vec<_>>()) });
                    Ok(Done {
                        report: render(c.format, v, || csv_rows("re,im", l.map(|l| vec![l.re, l.im]))),
                        failed: false,
                    })
                }
            }
        }
        Command::Singularities(_) => {
            let p = params(c)?;
            let sign = parse_sign(&c.sign)?;
            let (lo, hi) = window(c, (1e-3, 1e3))?;
            let (set, roots) = match p {
                Params::Model(mp) => (omega_set(&mp, sign, (lo, hi)), Some(denominator_roots(&mp, sign, (lo, hi)))),
                Params::Nu(np) => (omega_nu(&np), None),
            };
            let lambda = lambda_set(&p, sign, ((lo / 2.0).ln(), (hi / 2.0).ln()));
            let rows: Vec<Vec<f64>> = set.momenta.iter().map(|k| vec![*k, k * k, (k / 2.0).ln()]).collect();
            let v = json!({
                "params": to_json(&p),
                "omega": to_json(&set),
                "lambda": to_json(&lambda),
                "denominator_roots": to_json(&roots),
            });
            Ok(Done {
                report: render(c.format, v, || csv_rows("k,energy,x", rows)),
                failed: false,
            })
        }
        Command::Smatrix { points, .. } => {
            let p = params(c)?;
            let (lo, hi) = window(c, (-10.0, 10.0))?;
            let n = (*points).max(2);
            let xs: Vec<f64> = (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect();
            let values: Vec<Complex64> = match p {
                Params::Model(mp) => {
                    let s = smatrix(&mp);
                    xs.iter().map(|&x| s(x)).collect::<Result<_>>()?
                }
                Params::Nu(np) => {
                    let s = smatrix_nu(&np);
                    xs.iter().map(|&x| s(x)).collect::<Result<_>>()?
                }
            };
            let rows: Vec<Vec<f64>> = xs.iter().zip(&values).map(|(x, v)| vec![*x, v.re, v.im]).collect();
            let v = json!({ "params": to_json(&p), "x": xs, "values": to_json(&values) });
            Ok(Done {
                report: render(c.format, v, || csv_rows("param,re,im", rows)),
                failed: false,
            })
        }
        Command::Boundary(_) => {
            let p = params(c)?;
            let b = boundary_symbol(&p, parse_sign(&c.sign)?)?;
            let rows: Vec<Vec<f64>> = b
                .edges
                .iter()
                .flat_map(|e| e.samples.iter().map(move |(t, v)| vec![e.edge as f64, *t, v.re, v.im]))
                .collect();
            let v = to_json(&b);
            Ok(Done {
                report: render(c.format, v, || csv_rows("edge,param,re,im", rows)),
                failed: false,
            })
        }
        Command::Winding(_) => {
            let p = params(c)?;
            let w = match p {
                Params::Model(mp) if mp.is_periodic() => {
                    let (n, kappa) = periodic_form(&mp);
                    winding_periodic(n, kappa)?
                }
                _ => winding_square(&boundary_symbol(&p, parse_sign(&c.sign)?)?)?,
            };
            Ok(Done::ok(json!({ "params": to_json(&p), "winding": w.value, "result": to_json(&w) })))
        }
        Command::VerifyLevinson(_) => {
            let p = params(c)?;
            let r = verify_levinson(&p)?;
            Ok(Done {
                failed: !r.passed(),
                report: Report::Json(to_json(&r)),
            })
        }
        Command::VerifyPeriodic { n, .. } => {
            let kappa = parse_complex(
                c.kappa
                    .as_deref()
                    .ok_or_else(|| Error::Validation("--kappa is required".into()))?,
            )?;
            let r = verify_periodic_levinson(*n, kappa)?;
            Ok(Done {
                failed: !r.passed(),
                report: Report::Json(to_json(&r)),
            })
        }
        Command::Resolvent { k, r, s, .. } => {
            let p = params(c)?;
            let sign = parse_sign(&c.sign)?;
            let e = match p {
                Params::Model(mp) => resolvent_kernel(&mp, sign, *k, *r, *s)?,
                Params::Nu(np) => resolvent_kernel_nu(&np, sign, *k, *r, *s)?,
            };
            Ok(Done::ok(to_json(&e)))
        }
        Command::Accumulate {
            target,
            family,
            half_plane,
            terms,
            ..
        } => {
            let fam = match family {
                FamilyArg::Nu => Family::Nu,
                FamilyArg::Mk => Family::Model(parse_complex(
                    c.m.as_deref()
                        .ok_or_else(|| Error::Validation("--m is required for --family mk".into()))?,
                )?),
            };
            let hp = match half_plane {
                HalfPlaneArg::Upper => HalfPlane::Upper,
                HalfPlaneArg::Lower => HalfPlane::Lower,
            };
            let run = accumulation_sequence(*target, fam, hp, *terms)?;
            let rows: Vec<Vec<f64>> = run
                .eigenvalue_sequence
                .iter()
                .enumerate()
                .map(|(j, l)| vec![(j + 1) as f64, l.re, l.im, (l - run.target).norm()])
                .collect();
            let v = to_json(&run);
            Ok(Done {
                report: render(c.format, v, || csv_rows("n,re,im,distance", rows)),
                failed: false,
            })
        }
        Command::Opcheck { trials, .. } => {
            let p = params(c)?;
            let g = match c.grid.as_deref() {
                None => GridSpec::default(),
                Some(text) => {
                    let (l, n) = text.split_once(':').ok_or_else(|| {
                        Error::Validation(format!("--grid must look like L:N, got '{text}'"))
                    })?;
                    let l: f64 = l.parse().map_err(|_| Error::Validation(format!("bad grid half-width '{l}'")))?;
                    let n: usize = n.parse().map_err(|_| Error::Validation(format!("bad grid size '{n}'")))?;
                    GridSpec::new(l, n)?
                }
            };
            let r = transpose_compose_check(&p, g, *trials, c.seed)?;
            let tol = c.tol.unwrap_or(1e-2);
            Ok(Done {
                failed: r.left_residual >= tol,
                report: Report::Json(json!({ "params": to_json(&p), "tolerance": tol, "report": to_json(&r) })),
            })
        }
        Command::Hankel { center, width, .. } => {
            let m = parse_complex(c.m.as_deref().unwrap_or("0"))?;
            let report = hankel_roundtrip(m, *center, *width)?;
            let tol = c.tol.unwrap_or(1e-3);
            let rows: Vec<Vec<f64>> = report
                .r
                .iter()
                .zip(&report.original)
                .zip(&report.roundtrip)
                .map(|((r, f), g)| vec![*r, f.re, g.re, g.im])
                .collect();
            let failed = report.sup_error >= tol;
            let v = json!({ "m": to_json(&m), "tolerance": tol, "sup_error": report.sup_error });
            Ok(Done {
                report: render(c.format, v, || csv_rows("r,f,roundtrip_re,roundtrip_im", rows)),
                failed,
            })
        }
    }
}

/// `(n, kappa)` with `n > 0` describing the same operator as `m = i Im(m)`.
/// Uses `H_{m,kappa} = H_{-m,1/kappa}` when `Im m < 0`.
fn periodic_form(mp: &ModelParams) -> (f64, Complex64) {
    let n = mp.m().im;
    let kappa = mp.kappa();
    if n > 0.0 || kappa.norm() == 0.0 {
        (n.abs(), kappa)
    } else {
        (-n, 1.0 / kappa)
    }
}

/// Gaussian bump, its Hankel transform, and the transform applied again.
#[derive(Debug, Clone)]
pub struct HankelRoundtrip {
    pub r: Vec<f64>,
    pub original: Vec<Complex64>,
    pub roundtrip: Vec<Complex64>,
    pub sup_error: f64,
}

pub fn hankel_roundtrip(m: Complex64, center: f64, width: f64) -> Result<HankelRoundtrip> {
    let bump = |s: f64| Complex64::new((-(s - center).powi(2) / (2.0 * width * width)).exp(), 0.0);
    let lo = (center - 7.0 * width).max(0.0);
    let hi = center + 7.0 * width;
    let s_rule = CompositeRule::new(lo, hi, 24, 16);
    let rho_rule = CompositeRule::new(0.0, 25.0, 60, 16);
    let f_s: Vec<Complex64> = s_rule.nodes.iter().map(|&s| bump(s)).collect();
    let g = hankel_transform(m, &f_s, &s_rule, &rho_rule.nodes)?;
    let r: Vec<f64> = (0..=200).map(|j| 1.0 + 2.0 * j as f64 / 200.0).collect();
    let back = hankel_transform(m, &g, &rho_rule, &r)?;
    let original: Vec<Complex64> = r.iter().map(|&x| bump(x)).collect();
    let sup_error = original
        .iter()
        .zip(&back)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(HankelRoundtrip {
        r,
        original,
        roundtrip: back,
        sup_error,
    })
}

fn exit_code(e: &Error) -> i32 {
    if e.is_refusal() {
        EXIT_REFUSED
    } else {
        EXIT_INVALID
    }
}

fn refusal_message(e: &Error) -> String {
    match e {
        Error::NotFredholm(_) => format!("exceptional pair: not Fredholm ({e})"),
        Error::UnboundedOperator(_) => format!("exceptional parameters: unbounded operator ({e})"),
        _ => e.to_string(),
    }
}

/// Parse and execute one command line (first item is the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli.command) {
        Ok(done) => {
            let mut stdout = match done.report {
                Report::Json(v) => serde_json::to_string_pretty(&v).expect("json"),
                Report::Text(t) => t,
            };
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            let mut stderr = String::new();
            if done.failed {
                let _ = writeln!(stderr, "verification failed");
            }
            Outcome {
                code: if done.failed { EXIT_FAILED } else { EXIT_OK },
                stdout,
                stderr,
            }
        }
        Err(e) => {
            let code = exit_code(&e);
            let msg = if code == EXIT_REFUSED {
                refusal_message(&e)
            } else {
                format!("error: {e}")
            };
            Outcome {
                code,
                stdout: String::new(),
                stderr: format!("{msg}\n"),
            }
        }
    }
}
