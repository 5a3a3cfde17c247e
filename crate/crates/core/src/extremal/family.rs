use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::densities::gamma_s_density;
use crate::error::{invalid, Result};
use crate::extremal::report::{best_of, Best, Claim, Method, Parameter, Refinement, ScanPoint, ScanReport};
use crate::extremal::{check_orders, golden_max, ratio_with_error, significant};
use crate::parallel::{default_jobs, par_map};
use crate::quadrature::QuadOptions;

/// Settings shared by the scans over `s ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanOptions {
    /// Number of uniformly spaced grid points, endpoints included.
    pub grid: usize,
    pub refine: bool,
    /// Golden-section refinement stops at this bracket width.
    pub refine_tol: f64,
    /// Relative quadrature tolerance per moment.
    pub rel_tol: f64,
    pub jobs: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            grid: 1001,
            refine: true,
            refine_tol: 1e-9,
            rel_tol: 1e-12,
            jobs: default_jobs(),
        }
    }
}

impl ScanOptions {
    fn quad(&self) -> QuadOptions {
        QuadOptions {
            rel_tol: self.rel_tol,
            ..QuadOptions::default()
        }
    }

    fn method(&self) -> Method {
        Method {
            mode: "quadrature",
            grid: self.grid,
            rel_tol: self.rel_tol,
            refine_tol: self.refine.then_some(self.refine_tol),
            samples: None,
            seed: None,
        }
    }
}

/// `i / (size − 1)` for `i = 0..size`.
pub fn s_grid(size: usize) -> Result<Vec<f64>> {
    if size < 2 {
        return Err(invalid("an s-grid needs at least 2 points"));
    }
    Ok((0..size).map(|i| i as f64 / (size - 1) as f64).collect())
}

/// Standard deviation of Γ^s: `√(2s² − 2s + 1)`.
pub fn family_sigma(s: f64) -> f64 {
    (2.0 * s * s - 2.0 * s + 1.0).sqrt()
}

type Eval = (f64, f64, Option<f64>);

fn scan_points<F>(opts: &ScanOptions, f: F) -> Result<Vec<ScanPoint>>
where
    F: Fn(f64) -> Result<Eval> + Sync,
{
    let grid = s_grid(opts.grid)?;
    par_map(&grid, opts.jobs, |&s| {
        f(s).map(|(value, error, secondary)| ScanPoint {
            param: s,
            direction: None,
            value,
            error,
            secondary,
        })
    })
    .into_iter()
    .collect()
}

/// Golden section over the two grid cells around the grid optimum.
fn refine_s<F>(points: &[ScanPoint], best: &Best, tol: f64, f: F) -> Result<Refinement>
where
    F: Fn(f64) -> Result<Eval>,
{
    let i = best.index.expect("grid optimum");
    let a = points[i.saturating_sub(1)].param;
    let b = points[(i + 1).min(points.len() - 1)].param;
    let g = golden_max(|s| f(s).map(|(v, e, _)| (v, e)), a, b, tol)?;
    let refined = if significant(g.value, g.error, best) {
        Best {
            index: None,
            param: g.x,
            direction: None,
            value: g.value,
            error: g.error,
        }
    } else {
        best.clone()
    };
    Ok(Refinement {
        best: refined,
        width: g.width,
        converged: g.width <= tol,
        evaluations: g.evaluations,
        bracket_variation: g.variation,
    })
}

fn endpoint_summary(points: &[ScanPoint]) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    m.insert("value_at_s0".into(), points[0].value);
    m.insert("value_at_s1".into(), points[points.len() - 1].value);
    m
}

fn max_mirror_gap(points: &[ScanPoint], odd: bool) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (a, b) = (points[i].value, points[n - 1 - i].value);
            if odd { (a + b).abs() } else { (a - b).abs() }
        })
        .fold(0.0, f64::max)
}

fn is_endpoint(s: f64) -> bool {
    s == 0.0 || s == 1.0
}

fn norm_ratio_at(s: f64, p: f64, q: f64, quad: QuadOptions) -> Result<Eval> {
    let d = gamma_s_density(s)?;
    let mq = d.moment(q, false, quad)?;
    let mp = d.moment(p, false, quad)?;
    let (v, e) = ratio_with_error((mq.value, mq.error), (mp.value, mp.error), p, q);
    Ok((v, e, None))
}

/// `‖Γ^s‖_q / ‖Γ^s‖_p` over the `s`-grid.
pub fn norm_ratio_scan(p: f64, q: f64, opts: &ScanOptions) -> Result<ScanReport> {
    check_orders(p, q)?;
    let quad = opts.quad();
    let f = |s| norm_ratio_at(s, p, q, quad);
    let points = scan_points(opts, f)?;
    let grid_best = best_of(&points);
    let refined = if opts.refine {
        Some(refine_s(&points, &grid_best, opts.refine_tol, f)?)
    } else {
        None
    };
    let mut report = ScanReport {
        claim: Claim::FamilyNormRatio,
        objective: format!("‖Γ^s‖_{q} / ‖Γ^s‖_{p}"),
        secondary: None,
        parameter: Parameter::S,
        summary: endpoint_summary(&points),
        grid_best,
        refined,
        points,
        method: opts.method(),
        checks: Vec::new(),
    };
    let gap = max_mirror_gap(&report.points, false);
    let scale = report.grid_best.value;
    report.push_check(
        "mirror-symmetry",
        gap <= 1e-10 * scale,
        format!("max |R(s) − R(1−s)| = {gap:e}"),
    );
    let s = report.best().param;
    report.push_check("endpoint-argmax", is_endpoint(s), format!("argmax s = {s}"));
    Ok(report)
}

fn signed_ratio_at(s: f64, p: f64, q: f64, quad: QuadOptions) -> Result<Eval> {
    let d = gamma_s_density(s)?;
    let sq = d.moment(q, true, quad)?;
    let mp = d.moment(p, false, quad)?;
    let norm_p = mp.value.powf(1.0 / p);
    let value = sq.value / norm_p;
    let error = sq.error / norm_p + value.abs() * mp.error / (p * mp.value);
    let (h, _) = ratio_with_error((sq.value, sq.error), (mp.value, mp.error), p, q);
    Ok((value, error, Some(h.copysign(sq.value))))
}

/// `E[|Γ^s|^q sgn Γ^s] / ‖Γ^s‖_p` over the `s`-grid. The degree-0
/// homogeneous variant `sgn(S)|S|^{1/q} / ‖Γ^s‖_p` is recorded as the
/// secondary value.
pub fn signed_ratio_scan(p: f64, q: f64, opts: &ScanOptions) -> Result<ScanReport> {
    check_orders(p, q)?;
    let quad = opts.quad();
    let points = scan_points(opts, |s| signed_ratio_at(s, p, q, quad))?;
    let grid_best = best_of(&points);
    let mut report = ScanReport {
        claim: Claim::FamilySignedRatio,
        objective: format!("E[|Γ^s|^{q} sgn Γ^s] / ‖Γ^s‖_{p}"),
        secondary: Some(format!("sgn(S)|S|^(1/{q}) / ‖Γ^s‖_{p}")),
        parameter: Parameter::S,
        summary: endpoint_summary(&points),
        grid_best,
        refined: None,
        points,
        method: ScanOptions { refine: false, ..*opts }.method(),
        checks: Vec::new(),
    };
    let gap = max_mirror_gap(&report.points, true);
    let scale = report.points.iter().map(|p| p.value.abs()).fold(0.0, f64::max);
    report.push_check(
        "mirror-antisymmetry",
        gap <= 1e-10 * scale,
        format!("max |S(s) + S(1−s)| = {gap:e}"),
    );
    let s = report.grid_best.param;
    report.push_check("argmax-at-one", s == 1.0, format!("argmax s = {s}"));
    let secondary: Vec<ScanPoint> = report
        .points
        .iter()
        .map(|p| ScanPoint {
            value: p.secondary.unwrap_or(f64::NEG_INFINITY),
            ..p.clone()
        })
        .collect();
    let hs = best_of(&secondary).param;
    report
        .summary
        .insert("secondary_argmax_s".into(), hs);
    report.push_check("secondary-argmax-at-one", hs == 1.0, format!("argmax s = {hs}"));
    Ok(report)
}

/// Test functions for the φ-functional scans, each tagged with the order `k`
/// for which `φ^{(k)} > 0` everywhere.
#[derive(Clone)]
pub enum Phi {
    /// `x³`, `k = 3`.
    Cubic,
    /// `x⁴`, `k = 4`.
    Quartic,
    /// `e^{cx}`, `0 < c < 1`, `k = 3` (every derivative is positive).
    Exp { c: f64 },
    /// `x³ + e^{cx}`, `k = 3`.
    CubicPlusExp { c: f64 },
    /// `x⁴ + e^{cx}`, `k = 4`.
    QuarticPlusExp { c: f64 },
    /// A constant; no order tag.
    Constant { value: f64 },
    /// A user function with `|φ(x)| ≤ C e^{growth·|x|}`, `growth < 1`.
    Custom {
        name: String,
        k: Option<u8>,
        growth: f64,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Phi {
    /// Parses `cubic`, `quartic`, `exp[:c]`, `cubic+exp[:c]`,
    /// `quartic+exp[:c]` and `const[:v]`.
    pub fn parse(spec: &str) -> Result<Phi> {
        let (head, arg) = match spec.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (spec, None),
        };
        let num = |default: f64| -> Result<f64> {
            arg.map_or(Ok(default), |a| {
                a.parse::<f64>().map_err(|_| invalid(format!("bad number '{a}' in phi '{spec}'")))
            })
        };
        let phi = match head {
            "cubic" | "x3" => Phi::Cubic,
            "quartic" | "x4" => Phi::Quartic,
            "exp" => Phi::Exp { c: num(0.5)? },
            "cubic+exp" => Phi::CubicPlusExp { c: num(0.5)? },
            "quartic+exp" => Phi::QuarticPlusExp { c: num(0.5)? },
            "const" => Phi::Constant { value: num(1.0)? },
            _ => return Err(invalid(format!("unknown phi '{spec}'"))),
        };
        phi.validate()?;
        Ok(phi)
    }

    pub fn name(&self) -> String {
        match self {
            Phi::Cubic => "x^3".into(),
            Phi::Quartic => "x^4".into(),
            Phi::Exp { c } => format!("exp({c}x)"),
            Phi::CubicPlusExp { c } => format!("x^3 + exp({c}x)"),
            Phi::QuarticPlusExp { c } => format!("x^4 + exp({c}x)"),
            Phi::Constant { value } => format!("{value}"),
            Phi::Custom { name, .. } => name.clone(),
        }
    }

    pub fn order(&self) -> Option<u8> {
        match self {
            Phi::Cubic | Phi::Exp { .. } | Phi::CubicPlusExp { .. } => Some(3),
            Phi::Quartic | Phi::QuarticPlusExp { .. } => Some(4),
            Phi::Constant { .. } => None,
            Phi::Custom { k, .. } => *k,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Phi::Cubic => x * x * x,
            Phi::Quartic => x.powi(4),
            Phi::Exp { c } => (c * x).exp(),
            Phi::CubicPlusExp { c } => x * x * x + (c * x).exp(),
            Phi::QuarticPlusExp { c } => x.powi(4) + (c * x).exp(),
            Phi::Constant { value } => *value,
            Phi::Custom { f, .. } => f(x),
        }
    }

    /// The normalised family has exponential tails of rate at least 1, so
    /// any exponential growth rate below 1 is integrable.
    fn validate(&self) -> Result<()> {
        let rate = match self {
            Phi::Exp { c } | Phi::CubicPlusExp { c } | Phi::QuarticPlusExp { c } => {
                if *c <= 0.0 {
                    return Err(invalid("the exponential rate c must be positive"));
                }
                *c
            }
            Phi::Custom { growth, k, .. } => {
                if let Some(k) = k {
                    if !(3..=4).contains(k) {
                        return Err(invalid("the order tag k must be 3 or 4"));
                    }
                }
                *growth
            }
            _ => 0.0,
        };
        if !(rate < 1.0 && rate.is_finite()) {
            return Err(invalid(format!(
                "growth rate {rate} is not integrable against the family (needs < 1)"
            )));
        }
        Ok(())
    }
}

/// `E φ(Γ^s/σ_s)` over the `s`-grid, `σ_s` the standard deviation of Γ^s.
///
/// For `k = 3` the claim is that the maximum sits at one endpoint; which one
/// depends on the orientation of the family. Both endpoint values are kept in
/// the summary, and `reflected_argmax_s = 1 − argmax` gives the location
/// under the opposite orientation.
pub fn phi_scan(phi: &Phi, opts: &ScanOptions) -> Result<ScanReport> {
    phi.validate()?;
    let quad = opts.quad();
    let f = |s: f64| -> Result<Eval> {
        let d = gamma_s_density(s)?;
        let sigma = family_sigma(s);
        let r = d.expect(|x| phi.eval(x / sigma), quad)?;
        Ok((r.value, r.error, None))
    };
    let points = scan_points(opts, f)?;
    let grid_best = best_of(&points);
    let refined = if opts.refine {
        Some(refine_s(&points, &grid_best, opts.refine_tol, f)?)
    } else {
        None
    };
    let mut report = ScanReport {
        claim: Claim::FamilyPhi,
        objective: format!("E φ(Γ^s/σ_s), φ(x) = {}", phi.name()),
        secondary: None,
        parameter: Parameter::S,
        summary: endpoint_summary(&points),
        grid_best,
        refined,
        points,
        method: opts.method(),
        checks: Vec::new(),
    };
    let s = report.best().param;
    report.summary.insert("argmax_s".into(), s);
    report.summary.insert("reflected_argmax_s".into(), 1.0 - s);
    if let Some(k) = phi.order() {
        report.summary.insert("k".into(), k as f64);
    }
    if phi.order() == Some(3) {
        report.push_check(
            "endpoint-argmax",
            is_endpoint(s),
            format!("argmax s = {s}; under the reflected orientation s = {}", 1.0 - s),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(grid: usize) -> ScanOptions {
        ScanOptions {
            grid,
            jobs: 1,
            ..ScanOptions::default()
        }
    }

    #[test]
    fn norm_ratio_endpoint_value() {
        let r = norm_ratio_scan(2.0, 4.0, &small(101)).unwrap();
        let target = 9f64.powf(0.25);
        assert!((r.summary["value_at_s1"] - target).abs() < 1e-10);
        assert!((r.summary["value_at_s0"] - target).abs() < 1e-10);
        assert!((r.best().value - target).abs() < 1e-10);
        assert!(r.best().param == 0.0 || r.best().param == 1.0);
        assert!(r.all_checks_pass(), "{:?}", r.checks);
    }

    #[test]
    fn norm_ratio_midpoint_from_exact_moments() {
        // r_4(1/2) = 3/2 and r_2(1/2) = 1/2.
        let r = norm_ratio_scan(2.0, 4.0, &small(3)).unwrap();
        let expected = 1.5f64.powf(0.25) / 0.5f64.sqrt();
        assert!((r.points[1].value - expected).abs() < 1e-12);
    }

    #[test]
    fn grid_best_is_the_recorded_maximum() {
        let r = norm_ratio_scan(1.5, 3.0, &small(41)).unwrap();
        let max = r.points.iter().map(|p| p.value).fold(f64::MIN, f64::max);
        assert!((r.grid_best.value - max).abs() <= 1e-12 * max);
        assert!(r.points.windows(2).all(|w| w[0].param < w[1].param));
    }

    #[test]
    fn invalid_orders_rejected() {
        assert!(norm_ratio_scan(4.0, 2.0, &small(11)).is_err());
        assert!(signed_ratio_scan(2.0, 2.0, &small(11)).is_err());
        assert!(norm_ratio_scan(2.0, 4.0, &small(1)).is_err());
    }

    #[test]
    fn signed_ratio_values() {
        let r = signed_ratio_scan(2.0, 3.0, &small(101)).unwrap();
        assert!((r.points[100].value - 2.0).abs() < 1e-10);
        assert!((r.points[0].value + 2.0).abs() < 1e-10);
        assert!(r.points[50].value.abs() < 1e-12);
        assert_eq!(r.grid_best.param, 1.0);
        assert!(r.all_checks_pass(), "{:?}", r.checks);
    }

    #[test]
    fn signed_ratio_matches_exact_third_cumulant() {
        // E[(Γ^s)³] = k_3 = 2(s³ + (s−1)³) and ‖Γ^s‖_2 = σ_s.
        let r = signed_ratio_scan(2.0, 3.0, &small(21)).unwrap();
        for pt in &r.points {
            let s = pt.param;
            let exact = 2.0 * (s.powi(3) + (s - 1.0).powi(3)) / family_sigma(s);
            assert!((pt.value - exact).abs() < 1e-10, "s = {s}");
        }
    }

    #[test]
    fn phi_catalog_values() {
        let cubic = phi_scan(&Phi::Cubic, &small(21)).unwrap();
        assert!((cubic.summary["value_at_s1"] - 2.0).abs() < 1e-10);
        assert!((cubic.summary["value_at_s0"] + 2.0).abs() < 1e-10);
        assert!(cubic.check("endpoint-argmax").unwrap().passed);
        assert_eq!(cubic.summary["reflected_argmax_s"], 0.0);

        let quartic = phi_scan(&Phi::Quartic, &small(21)).unwrap();
        assert!((quartic.best().value - 9.0).abs() < 1e-9);
        assert!((quartic.points[10].value - 6.0).abs() < 1e-10);

        let flat = phi_scan(&Phi::Constant { value: 2.5 }, &small(11)).unwrap();
        assert!(flat.points.iter().all(|p| (p.value - 2.5).abs() < 1e-12));
    }

    #[test]
    fn phi_exp_is_maximised_at_an_endpoint() {
        for phi in [Phi::Exp { c: 0.5 }, Phi::CubicPlusExp { c: 0.3 }] {
            let r = phi_scan(&phi, &small(51)).unwrap();
            assert!(r.check("endpoint-argmax").unwrap().passed, "{phi:?}");
        }
    }

    #[test]
    fn phi_parsing_and_validation() {
        assert!(matches!(Phi::parse("exp:0.25").unwrap(), Phi::Exp { c } if c == 0.25));
        assert_eq!(Phi::parse("cubic").unwrap().order(), Some(3));
        assert!(Phi::parse("exp:1.5").is_err());
        assert!(Phi::parse("exp:-1").is_err());
        assert!(Phi::parse("sine").is_err());
        let custom = Phi::Custom {
            name: "cosh".into(),
            k: Some(4),
            growth: 2.0,
            f: Arc::new(f64::cosh),
        };
        assert!(phi_scan(&custom, &small(5)).is_err());
    }

    #[test]
    fn scans_do_not_depend_on_worker_count() {
        let a = norm_ratio_scan(1.5, 3.0, &small(31)).unwrap();
        let b = norm_ratio_scan(1.5, 3.0, &ScanOptions { jobs: 3, ..small(31) }).unwrap();
        assert_eq!(a, b);
    }
}
