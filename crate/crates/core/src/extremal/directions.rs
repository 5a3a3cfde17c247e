use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::densities::{body_marginal, facet_normals, mc_body_points, normalize, BodyKind, BodySampler};
use crate::error::{invalid, Result};
use crate::extremal::report::{best_of, Best, Claim, Method, Parameter, Refinement, ScanPoint, ScanReport};
use crate::extremal::{check_orders, golden_max, ratio_with_error, significant};
use crate::parallel::{default_jobs, par_map};
use crate::quadrature::QuadOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectionMode {
    /// Exact spline (or ball) marginals; `n ∈ {2, 3}`.
    Exact,
    /// One fixed point cloud of `samples` uniform points; `n ≤ 6`.
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectionOptions {
    pub mode: DirectionMode,
    /// Grid size; `None` picks 2048 angles for `n = 2`, 4096 sphere points
    /// for `n = 3` and 256 random directions above that.
    pub budget: Option<usize>,
    pub refine: bool,
    /// Final bracket width (`n = 2`) or pattern-search step (`n ≥ 3`).
    pub refine_tol: f64,
    pub max_refine_evals: usize,
    pub rel_tol: f64,
    pub jobs: usize,
}

impl Default for DirectionOptions {
    fn default() -> Self {
        DirectionOptions {
            mode: DirectionMode::Exact,
            budget: None,
            refine: true,
            refine_tol: 1e-9,
            max_refine_evals: 4000,
            rel_tol: 1e-10,
            jobs: default_jobs(),
        }
    }
}

impl DirectionOptions {
    fn budget_for(&self, n: usize) -> usize {
        self.budget.unwrap_or(match n {
            2 => 2048,
            3 => 4096,
            _ => 256,
        })
    }
}

/// Quasi-uniform points on S²: the golden-angle spiral.
pub fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden_angle * i as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// `(param, θ)` pairs: polar angles for `n = 2`, the spiral for `n = 3`,
/// seeded Gaussian directions otherwise.
pub fn direction_grid(n: usize, budget: usize, seed: u64) -> Result<Vec<(f64, Vec<f64>)>> {
    if budget == 0 {
        return Err(invalid("direction budget must be positive"));
    }
    Ok(match n {
        0 | 1 => return Err(invalid("direction search needs n ≥ 2")),
        2 => (0..budget)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / budget as f64;
                (a, vec![a.cos(), a.sin()])
            })
            .collect(),
        3 => fibonacci_sphere(budget)
            .into_iter()
            .enumerate()
            .map(|(i, v)| (i as f64, v))
            .collect(),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            (0..budget)
                .map(|i| {
                    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                    Ok((i as f64, normalize(&v)?))
                })
                .collect::<Result<_>>()?
        }
    })
}

type Eval = (f64, f64, Option<f64>);

enum Objective<'a> {
    Exact { kind: BodyKind, n: usize, quad: QuadOptions },
    Cloud { points: &'a [f64], n: usize },
}

impl Objective<'_> {
    fn eval(&self, theta: &[f64], p: f64, q: f64, signed: bool) -> Result<Eval> {
        let (num, den) = match self {
            Objective::Exact { kind, n, quad } => {
                let m = body_marginal(*kind, *n, theta)?;
                let a = m.moment(q, signed, *quad)?;
                let b = m.moment(p, false, *quad)?;
                ((a.value, a.error), (b.value, b.error))
            }
            Objective::Cloud { points, n } => cloud_moments(points, *n, theta, p, q, signed),
        };
        let (v, e) = ratio_with_error(num, den, p, q);
        Ok((v, e, signed.then_some(num.0)))
    }
}

/// Sample means of `|y|^q` (or the signed version) and `|y|^p`, each with
/// its standard error.
fn cloud_moments(points: &[f64], n: usize, theta: &[f64], p: f64, q: f64, signed: bool) -> ((f64, f64), (f64, f64)) {
    let count = (points.len() / n) as f64;
    let (mut sa, mut sa2, mut sb, mut sb2) = (0.0, 0.0, 0.0, 0.0);
    for row in points.chunks_exact(n) {
        let y: f64 = row.iter().zip(theta).map(|(a, b)| a * b).sum();
        let ay = y.abs();
        let a = if signed { ay.powf(q).copysign(y) } else { ay.powf(q) };
        let b = ay.powf(p);
        sa += a;
        sa2 += a * a;
        sb += b;
        sb2 += b * b;
    }
    let stats = |s: f64, s2: f64| {
        let mean = s / count;
        let var = ((s2 / count - mean * mean) * count / (count - 1.0).max(1.0)).max(0.0);
        (mean, (var / count).sqrt())
    };
    (stats(sa, sa2), stats(sb, sb2))
}

fn tangent_basis(theta: &[f64]) -> Vec<Vec<f64>> {
    let n = theta.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in 0..n {
        let mut v: Vec<f64> = theta.iter().map(|t| -t * theta[k]).collect();
        v[k] += 1.0;
        for b in basis.iter().chain(std::iter::once(&theta.to_vec())) {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        if let Ok(u) = normalize(&v) {
            if v.iter().map(|x| x * x).sum::<f64>() > 1e-8 {
                basis.push(u);
            }
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis
}

struct Climb {
    theta: Vec<f64>,
    value: f64,
    error: f64,
    step: f64,
    evaluations: usize,
    variation: f64,
}

/// Compass search on the sphere: poll `±h` along a tangent basis, move on
/// the first improvement, halve `h` when none.
fn pattern_search<F>(f: &F, start: &[f64], start_value: (f64, f64), h0: f64, tol: f64, max_evals: usize) -> Result<Climb>
where
    F: Fn(&[f64]) -> Result<Eval>,
{
    let mut theta = start.to_vec();
    let (mut value, mut error) = start_value;
    let mut h = h0;
    let mut evaluations = 0;
    let mut variation = f64::INFINITY;
    while h >= tol && evaluations < max_evals {
        let mut moved = false;
        let mut spread: f64 = 0.0;
        'poll: for e in tangent_basis(&theta) {
            for sign in [1.0, -1.0] {
                let cand: Vec<f64> = theta.iter().zip(&e).map(|(t, d)| t + sign * h * d).collect();
                let cand = normalize(&cand)?;
                let (v, err, _) = f(&cand)?;
                evaluations += 1;
                if v > value {
                    theta = cand;
                    value = v;
                    error = err;
                    moved = true;
                    break 'poll;
                }
                spread = spread.max(value - v);
            }
        }
        if !moved {
            variation = spread;
            h *= 0.5;
        }
    }
    Ok(Climb {
        theta,
        value,
        error,
        step: h,
        evaluations,
        variation: if variation.is_finite() { variation } else { 0.0 },
    })
}

fn arc_distance(u: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
    let angle = |x: &[f64], y: &[f64]| dot(x, y).clamp(-1.0, 1.0).acos();
    let ab = dot(a, b);
    let w: Vec<f64> = b.iter().zip(a).map(|(bi, ai)| bi - ab * ai).collect();
    let endpoints = angle(u, a).min(angle(u, b));
    let Ok(e2) = normalize(&w) else {
        return endpoints;
    };
    let span = dot(b, &e2).atan2(ab);
    let (x, y) = (dot(u, a), dot(u, &e2));
    let psi = y.atan2(x);
    let r = x.hypot(y);
    if r > 0.0 && (0.0..=span).contains(&psi) {
        r.min(1.0).acos()
    } else {
        endpoints
    }
}

/// Angular distance from `u` to the set of directions
/// `(sθ_i − (1−s)θ_j)/|·|`, `s ∈ [0, 1]`, over ordered pairs of distinct
/// facet normals of the regular simplex.
pub fn two_normal_family_distance(n: usize, u: &[f64]) -> f64 {
    let normals = facet_normals(n);
    let mut best = f64::INFINITY;
    for (i, a) in normals.iter().enumerate() {
        for (j, b) in normals.iter().enumerate() {
            if i != j {
                let neg_b: Vec<f64> = b.iter().map(|x| -x).collect();
                best = best.min(arc_distance(u, a, &neg_b));
            }
        }
    }
    best
}

fn scan_body(kind: BodyKind, n: usize, p: f64, q: f64, signed: bool, opts: &DirectionOptions) -> Result<ScanReport> {
    check_orders(p, q)?;
    let quad = QuadOptions {
        rel_tol: opts.rel_tol,
        ..QuadOptions::default()
    };
    let (cloud, seed, samples) = match opts.mode {
        DirectionMode::Exact => {
            if !(2..=3).contains(&n) {
                return Err(invalid("exact marginals are available for n ∈ {2, 3}; use Monte Carlo mode"));
            }
            (Vec::new(), 0, None)
        }
        DirectionMode::MonteCarlo { samples, seed } => {
            if !(2..=6).contains(&n) {
                return Err(invalid("Monte Carlo direction search supports 2 ≤ n ≤ 6"));
            }
            if samples < 2 {
                return Err(invalid("Monte Carlo mode needs at least 2 samples"));
            }
            let body = BodySampler::new(kind, n, seed)?;
            (mc_body_points(&body, samples, opts.jobs), seed, Some(samples))
        }
    };
    let objective = match opts.mode {
        DirectionMode::Exact => Objective::Exact { kind, n, quad },
        DirectionMode::MonteCarlo { .. } => Objective::Cloud { points: &cloud, n },
    };
    let f = |theta: &[f64]| objective.eval(theta, p, q, signed);

    let budget = opts.budget_for(n);
    let grid = direction_grid(n, budget, seed)?;
    let points: Vec<ScanPoint> = par_map(&grid, opts.jobs, |(param, theta)| {
        f(theta).map(|(value, error, secondary)| ScanPoint {
            param: *param,
            direction: Some(theta.clone()),
            value,
            error,
            secondary,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let grid_best = best_of(&points);

    let refined = if opts.refine {
        Some(refine_direction(&f, n, &points, &grid_best, budget, opts)?)
    } else {
        None
    };
    let numerator = if signed { format!("|E[|X·θ|^{q} sgn(X·θ)]|^(1/{q})") } else { format!("‖X·θ‖_{q}") };
    let mut summary = BTreeMap::new();
    summary.insert("n".to_string(), n as f64);
    summary.insert("p".to_string(), p);
    summary.insert("q".to_string(), q);
    let mut report = ScanReport {
        claim: if signed { Claim::BodySignedRatio } else { Claim::BodyNormRatio },
        objective: format!("{numerator} / ‖X·θ‖_{p}, X uniform on the {n}-dimensional {kind}"),
        secondary: signed.then(|| format!("E[|X·θ|^{q} sgn(X·θ)]")),
        parameter: if n == 2 { Parameter::Angle } else { Parameter::DirectionIndex },
        points,
        grid_best,
        refined,
        method: Method {
            mode: if samples.is_some() { "monte-carlo" } else { "quadrature" },
            grid: budget,
            rel_tol: opts.rel_tol,
            refine_tol: opts.refine.then_some(opts.refine_tol),
            samples,
            seed: samples.map(|_| seed),
        },
        summary,
        checks: Vec::new(),
    };
    annotate(&mut report, kind, n, signed);
    Ok(report)
}

fn refine_direction<F>(f: &F, n: usize, points: &[ScanPoint], grid_best: &Best, budget: usize, opts: &DirectionOptions) -> Result<Refinement>
where
    F: Fn(&[f64]) -> Result<Eval>,
{
    if n == 2 {
        let step = 2.0 * PI / budget as f64;
        let a0 = grid_best.param;
        let g = golden_max(
            |a| f(&[a.cos(), a.sin()]).map(|(v, e, _)| (v, e)),
            a0 - step,
            a0 + step,
            opts.refine_tol,
        )?;
        let best = if significant(g.value, g.error, grid_best) {
            let a = g.x.rem_euclid(2.0 * PI);
            Best {
                index: None,
                param: a,
                direction: Some(vec![a.cos(), a.sin()]),
                value: g.value,
                error: g.error,
            }
        } else {
            grid_best.clone()
        };
        return Ok(Refinement {
            best,
            width: g.width,
            converged: g.width <= opts.refine_tol,
            evaluations: g.evaluations,
            bracket_variation: g.variation,
        });
    }
    // Climb from the few best grid points; take the best summit.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[j].value.total_cmp(&points[i].value).then(i.cmp(&j)));
    let starts = if opts.mode == DirectionMode::Exact { 4 } else { 1 };
    let h0 = if n == 3 { (4.0 * PI / budget as f64).sqrt() } else { 0.25 };
    let per_start = opts.max_refine_evals / starts;
    let mut best: Option<(usize, Climb)> = None;
    let mut evaluations = 0;
    for &i in order.iter().take(starts) {
        let pt = &points[i];
        let theta = pt.direction.as_ref().expect("direction grid");
        let climb = pattern_search(f, theta, (pt.value, pt.error), h0, opts.refine_tol, per_start)?;
        evaluations += climb.evaluations;
        if best.as_ref().is_none_or(|(_, b)| climb.value > b.value) {
            best = Some((i, climb));
        }
    }
    let (i, climb) = best.expect("at least one start");
    let best = if significant(climb.value, climb.error, grid_best) {
        Best {
            index: None,
            param: points[i].param,
            direction: Some(climb.theta),
            value: climb.value,
            error: climb.error,
        }
    } else {
        grid_best.clone()
    };
    Ok(Refinement {
        best,
        width: climb.step,
        converged: climb.step < opts.refine_tol,
        evaluations,
        bracket_variation: climb.variation,
    })
}

fn annotate(report: &mut ScanReport, kind: BodyKind, n: usize, signed: bool) {
    // A Monte Carlo objective carries noise of order N^{−1/2}; near a quadratic
    // maximum that moves the argmax by order N^{−1/4}.
    let angle_tol = match report.method.samples {
        Some(m) => (2.0 * (m as f64).powf(-0.25)).max(1e-3),
        None => 1e-3,
    };
    if kind == BodyKind::Simplex && !signed {
        let best = report.best().direction.clone().expect("direction");
        let d = two_normal_family_distance(n, &best);
        report.summary.insert("two_normal_family_distance".into(), d);
        report.push_check("two-normal-family", d <= angle_tol, format!("angular distance {d:e}"));
    }
    if kind == BodyKind::Simplex && signed {
        let best = report.best().direction.clone().expect("direction");
        let d = facet_normals(n)
            .iter()
            .map(|v| v.iter().zip(&best).map(|(a, b)| a * b).sum::<f64>().abs().min(1.0).acos())
            .fold(f64::INFINITY, f64::min);
        report.summary.insert("facet_normal_distance".into(), d);
        report.push_check("facet-normal-argmax", d <= angle_tol, format!("angular distance {d:e}"));
    }
    if kind.is_symmetric() && signed && report.method.samples.is_none() {
        let max_abs = report
            .points
            .iter()
            .map(|p| p.secondary.unwrap_or(0.0).abs())
            .fold(0.0, f64::max);
        report.summary.insert("max_abs_signed_numerator".into(), max_abs);
        report.push_check(
            "symmetric-null-numerator",
            max_abs <= 1e-9,
            format!("max |E[|X·θ|^q sgn(X·θ)]| = {max_abs:e}"),
        );
    }
    if kind == BodyKind::Ball && report.method.samples.is_none() {
        let (lo, hi) = report
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.value), hi.max(p.value)));
        report.push_check("rotation-invariant", hi - lo <= 1e-9 * hi, format!("spread {:e}", hi - lo));
    }
}

/// α(K): the largest `‖X·θ‖_q/‖X·θ‖_p` over unit `θ`, `X` uniform on `K`.
pub fn alpha_body(kind: BodyKind, n: usize, p: f64, q: f64, opts: &DirectionOptions) -> Result<ScanReport> {
    scan_body(kind, n, p, q, false, opts)
}

/// α*(K): the same search with numerator `|E[|X·θ|^q sgn(X·θ)]|^{1/q}`.
pub fn alpha_star_body(kind: BodyKind, n: usize, p: f64, q: f64, opts: &DirectionOptions) -> Result<ScanReport> {
    scan_body(kind, n, p, q, true, opts)
}
