use std::fmt;

use heavytail::certify::{certify_range, CertificateRecord};
use heavytail::cheb::{cheb_trial, SystemClass};
use heavytail::densities::gamma_s_density;
use heavytail::extremal::{
    alpha_body, alpha_star_body, norm_ratio_scan, phi_scan, signed_ratio_scan, verify_thm4,
    DirectionMode, DirectionOptions, Phi, ScanOptions, ScanReport,
};
use heavytail::gamma_moments::{gamma_cumulants, gamma_moments, r_poly_any, subfactorial};
use heavytail::quadrature::QuadOptions;
use heavytail::ratpoly::{rat_to_f64, rat_to_string};
use heavytail::{BigRat, Error};
use serde::Serialize;

use crate::output::{num, opt_num, vector, Emission, RunConfig, Table};
use crate::{BodyArgs, Command, Common};

#[derive(Debug)]
pub enum Failure {
    /// Bad parameters; exit status 2.
    Usage(String),
    /// Numerical or I/O failure; exit status 1.
    Runtime(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::InsufficientOrder { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("output: {e}"))
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Runs one subcommand and writes its output. `Ok(false)` means the run
/// completed but a verdict failed or a check was violated.
pub fn run(command: &Command, common: &Common) -> Result<bool, Failure> {
    if let Some(tol) = common.tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(usage(format!("--tol must lie in (0, 1), got {tol}")));
        }
    }
    let config = RunConfig::new(command, common);
    let jobs = config.jobs;
    match command {
        Command::Certify { qmax } => certify(&config, common, *qmax, jobs),
        Command::Moments { nmax } => moments(&config, common, *nmax),
        Command::GammaDensity { s, samples } => gamma_density(&config, common, *s, *samples),
        Command::RatioScan { p, q, grid, no_refine } => {
            let opts = scan_options(common, *grid, !no_refine, jobs)?;
            scan(&config, common, norm_ratio_scan(*p, *q, &opts)?)
        }
        Command::SignedScan { p, q, grid } => {
            let opts = scan_options(common, *grid, false, jobs)?;
            scan(&config, common, signed_ratio_scan(*p, *q, &opts)?)
        }
        Command::PhiScan { phi, grid, no_refine } => {
            let opts = scan_options(common, *grid, !no_refine, jobs)?;
            scan(&config, common, phi_scan(&Phi::parse(phi)?, &opts)?)
        }
        Command::Alpha(args) => {
            let opts = direction_options(common, args, jobs);
            scan(&config, common, alpha_body(args.body, args.n, args.p, args.q, &opts)?)
        }
        Command::AlphaStar(args) => {
            let opts = direction_options(common, args, jobs);
            scan(&config, common, alpha_star_body(args.body, args.n, args.p, args.q, &opts)?)
        }
        Command::Cheb { system, trials } => cheb(&config, common, system, *trials, jobs),
        Command::Thm4 { nmax, grid } => thm4(&config, common, *nmax, *grid),
    }
}

fn finish<R: Serialize>(emission: Emission<'_, R>, common: &Common) -> Result<bool, Failure> {
    emission.write(common)?;
    Ok(emission.passed)
}

#[derive(Serialize)]
struct CertifyResult {
    q_max: usize,
    all_passed: bool,
    certificates: Vec<CertificateRecord>,
}

fn certify(config: &RunConfig, common: &Common, q_max: usize, jobs: usize) -> Result<bool, Failure> {
    let certs = certify_range(q_max, jobs)?;
    let records: Vec<CertificateRecord> = certs.iter().map(|c| c.to_record()).collect();
    let all_passed = certs.iter().all(|c| c.passed());
    let mut table = Table::new(&[
        "q",
        "verdict",
        "divisible",
        "odd_coeffs_zero",
        "nonpositive_except_i1",
        "a1_positive",
        "discriminant",
        "beyond_published_claim",
        "h_tilde_coeffs",
    ]);
    for r in &records {
        table.push(vec![
            r.q.to_string(),
            if r.verdict == heavytail::certify::Verdict::Pass { "pass" } else { "fail" }.into(),
            r.divisible.to_string(),
            r.odd_coeffs_zero.to_string(),
            r.nonpositive_except_i1.to_string(),
            r.a1_positive.to_string(),
            r.discriminant.clone(),
            r.beyond_published_claim.to_string(),
            r.h_tilde_coeffs.join(" "),
        ]);
    }
    let warnings = if q_max >= heavytail::certify::PUBLISHED_Q_LIMIT {
        vec![format!(
            "q >= {} lies beyond the range of the published computation",
            heavytail::certify::PUBLISHED_Q_LIMIT
        )]
    } else {
        Vec::new()
    };
    let result = CertifyResult {
        q_max,
        all_passed,
        certificates: records,
    };
    finish(
        Emission {
            config,
            result: &result,
            table,
            passed: all_passed,
            warnings,
        },
        common,
    )
}

#[derive(Serialize)]
struct MomentRow {
    n: usize,
    cumulant: String,
    moment: String,
    subfactorial: String,
    matches: bool,
}

fn moments(config: &RunConfig, common: &Common, n_max: usize) -> Result<bool, Failure> {
    if n_max == 0 {
        return Err(usage("--nmax must be at least 1"));
    }
    let k = gamma_cumulants(n_max);
    let mu = gamma_moments(n_max);
    let rows: Vec<MomentRow> = (1..=n_max)
        .map(|n| {
            let sub = BigRat::from_integer(subfactorial(n));
            MomentRow {
                n,
                cumulant: rat_to_string(&k.values[n]),
                moment: rat_to_string(&mu.values[n]),
                subfactorial: rat_to_string(&sub),
                matches: mu.values[n] == sub,
            }
        })
        .collect();
    let mut table = Table::new(&["n", "cumulant", "moment", "subfactorial", "matches"]);
    for r in &rows {
        table.push(vec![
            r.n.to_string(),
            r.cumulant.clone(),
            r.moment.clone(),
            r.subfactorial.clone(),
            r.matches.to_string(),
        ]);
    }
    let passed = rows.iter().all(|r| r.matches);
    finish(
        Emission {
            config,
            result: &rows,
            table,
            passed,
            warnings: Vec::new(),
        },
        common,
    )
}

#[derive(Serialize)]
struct DensityPoint {
    x: f64,
    pdf: f64,
    cdf: f64,
}

#[derive(Serialize)]
struct DensityMoment {
    p: f64,
    signed: bool,
    value: f64,
    error: f64,
    /// The polynomial moment at this `s`, for integer orders.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<f64>,
}

#[derive(Serialize)]
struct DensityResult {
    s: f64,
    apex: f64,
    left_scale: f64,
    right_scale: f64,
    support: (Option<f64>, Option<f64>),
    moments: Vec<DensityMoment>,
    curve: Vec<DensityPoint>,
}

fn gamma_density(config: &RunConfig, common: &Common, s: f64, samples: usize) -> Result<bool, Failure> {
    if samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    let d = gamma_s_density(s)?;
    let quad = QuadOptions {
        rel_tol: common.tol.unwrap_or(1e-12),
        ..QuadOptions::default()
    };
    let c = d.breakpoint();
    let lo = if d.has_left_piece() { c - 20.0 * (1.0 - s) } else { c };
    let hi = if d.has_right_piece() { c + 20.0 * s } else { c };
    let curve: Vec<DensityPoint> = (0..samples)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            DensityPoint {
                x,
                pdf: d.pdf(x),
                cdf: d.cdf(x),
            }
        })
        .collect();
    // s is a binary fraction, so the polynomial moments can be evaluated exactly.
    let s_exact = BigRat::from_float(s).expect("finite s");
    let mut moments = Vec::new();
    let mut warnings = Vec::new();
    let mut passed = true;
    for (p, signed) in [(1.0, false), (2.0, false), (3.0, false), (4.0, false), (3.0, true)] {
        let m = d.moment(p, signed, quad)?;
        let exact = (signed || p as usize % 2 == 0).then(|| rat_to_f64(&r_poly_any(p as usize).eval(&s_exact)));
        if let Some(e) = exact {
            let rel = (m.value - e).abs() / e.abs().max(f64::MIN_POSITIVE);
            if rel > 1e-9 && (m.value - e).abs() > 1e-12 {
                passed = false;
                warnings.push(format!("moment p = {p}: quadrature {} vs exact {e}", m.value));
            }
        }
        moments.push(DensityMoment {
            p,
            signed,
            value: m.value,
            error: m.error,
            exact,
        });
    }
    let mut table = Table::new(&["x", "pdf", "cdf"]);
    for pt in &curve {
        table.push(vec![num(pt.x), num(pt.pdf), num(pt.cdf)]);
    }
    let (a, b) = d.support();
    let result = DensityResult {
        s,
        apex: c,
        left_scale: 1.0 - s,
        right_scale: s,
        support: (a.is_finite().then_some(a), b.is_finite().then_some(b)),
        moments,
        curve,
    };
    finish(
        Emission {
            config,
            result: &result,
            table,
            passed,
            warnings,
        },
        common,
    )
}

fn scan_options(common: &Common, grid: usize, refine: bool, jobs: usize) -> Result<ScanOptions, Failure> {
    if grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    let defaults = ScanOptions::default();
    Ok(ScanOptions {
        grid,
        refine,
        rel_tol: common.tol.unwrap_or(defaults.rel_tol),
        jobs,
        ..defaults
    })
}

fn direction_options(common: &Common, args: &BodyArgs, jobs: usize) -> DirectionOptions {
    let defaults = DirectionOptions::default();
    DirectionOptions {
        mode: match args.samples {
            Some(samples) => DirectionMode::MonteCarlo {
                samples,
                seed: common.seed,
            },
            None => DirectionMode::Exact,
        },
        budget: args.grid,
        refine: !args.no_refine,
        rel_tol: common.tol.unwrap_or(defaults.rel_tol),
        jobs,
        ..defaults
    }
}

fn scan(config: &RunConfig, common: &Common, report: ScanReport) -> Result<bool, Failure> {
    let mut table = Table::new(&["param", "direction", "value", "error", "secondary"]);
    for p in &report.points {
        table.push(vec![
            num(p.param),
            p.direction.as_deref().map(vector).unwrap_or_default(),
            num(p.value),
            num(p.error),
            opt_num(p.secondary),
        ]);
    }
    let warnings = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("check {} failed: {}", c.name, c.detail))
        .collect();
    finish(
        Emission {
            config,
            result: &report,
            table,
            passed: report.all_checks_pass(),
            warnings,
        },
        common,
    )
}

fn cheb(config: &RunConfig, common: &Common, system: &str, trials: usize, jobs: usize) -> Result<bool, Failure> {
    let class = SystemClass::parse(system)?;
    let summary = cheb_trial(&class, trials, common.seed, jobs)?;
    let mut table = Table::new(&["class", "order", "roots", "trials"]);
    for (roots, count) in summary.histogram.iter().enumerate() {
        table.push(vec![
            summary.class.clone(),
            summary.order.to_string(),
            roots.to_string(),
            count.to_string(),
        ]);
    }
    let passed = summary.violations == 0;
    finish(
        Emission {
            config,
            result: &summary,
            table,
            passed,
            warnings: Vec::new(),
        },
        common,
    )
}

fn thm4(config: &RunConfig, common: &Common, n_max: usize, grid: usize) -> Result<bool, Failure> {
    let report = verify_thm4(n_max, grid)?;
    let mut table = Table::new(&["n", "t", "value", "bound", "margin", "relative_margin", "cumulant_ratio"]);
    for r in &report.rows {
        table.push(vec![
            r.n.to_string(),
            num(r.t),
            num(r.value),
            num(r.bound),
            num(r.margin),
            num(r.relative_margin),
            num(r.cumulant_ratio),
        ]);
    }
    finish(
        Emission {
            config,
            result: &report,
            table,
            passed: report.passed(),
            warnings: Vec::new(),
        },
        common,
    )
}
