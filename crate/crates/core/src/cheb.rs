//! Randomised checks of the Chebyshev property: count the sign changes of
//! linear combinations and compare with the order of the system.
//!
//! Roots are counted as sign changes. A tangential (even-multiplicity) root
//! does not change sign and is not counted, so counts can only err low. The
//! property under test is "never more than `k` sign changes", for which an
//! undercount cannot produce a false violation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::parallel::par_map;

/// The last member `φ` of a smooth system `{1, x, …, x^{k−1}, φ}`; each
/// choice has `φ^{(k)} > 0` everywhere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SmoothPhi {
    /// `e^{cx}`, `c > 0`.
    Exp { c: f64 },
    /// `x^k`.
    Monomial,
    /// `x^k + e^{cx}`, `c > 0`.
    MonomialPlusExp { c: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FuncSystem {
    /// `u_i(t) = |t|^{p_i}` for even `i`, `|t|^{p_i} sgn t` for odd `i`,
    /// with `p_0 = 0`, `p_1 = 1` and increasing exponents.
    PowerSgn { exponents: Vec<f64> },
    /// `{1, x, …, x^{k−1}, φ}`.
    Smooth { k: usize, phi: SmoothPhi },
}

impl FuncSystem {
    pub fn power_sgn(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(invalid("a power-sgn system needs at least one exponent"));
        }
        if exponents[0] != 0.0 || exponents.get(1).is_some_and(|&p| p != 1.0) {
            return Err(invalid("power-sgn exponents must start with 0, 1"));
        }
        if exponents.windows(2).any(|w| !(w[0] < w[1])) || exponents.iter().any(|p| !p.is_finite()) {
            return Err(invalid("power-sgn exponents must be finite and strictly increasing"));
        }
        Ok(FuncSystem::PowerSgn { exponents })
    }

    pub fn smooth(k: usize, phi: SmoothPhi) -> Result<Self> {
        if k == 0 {
            return Err(invalid("a smooth system needs k ≥ 1"));
        }
        if let SmoothPhi::Exp { c } | SmoothPhi::MonomialPlusExp { c } = phi {
            if !(c > 0.0 && c.is_finite()) {
                return Err(invalid("the exponential rate must be positive"));
            }
        }
        Ok(FuncSystem::Smooth { k, phi })
    }

    /// `k`: the system has `k + 1` members.
    pub fn order(&self) -> usize {
        match self {
            FuncSystem::PowerSgn { exponents } => exponents.len() - 1,
            FuncSystem::Smooth { k, .. } => *k,
        }
    }

    /// The spec string accepted by [`SystemClass::parse`].
    pub fn label(&self) -> String {
        match self {
            FuncSystem::PowerSgn { exponents } => {
                let e: Vec<String> = exponents.iter().map(|p| p.to_string()).collect();
                format!("power-sgn:{}", e.join(","))
            }
            FuncSystem::Smooth { k, phi } => match phi {
                SmoothPhi::Exp { c } => format!("smooth-exp:{k}:{c}"),
                SmoothPhi::Monomial => format!("smooth-monomial:{k}"),
                SmoothPhi::MonomialPlusExp { c } => format!("smooth-monomial+exp:{k}:{c}"),
            },
        }
    }

    fn member(&self, i: usize, t: f64) -> f64 {
        match self {
            FuncSystem::PowerSgn { exponents } => {
                let v = t.abs().powf(exponents[i]);
                if i % 2 == 1 { v.copysign(t) } else { v }
            }
            FuncSystem::Smooth { k, phi } => {
                if i < *k {
                    t.powi(i as i32)
                } else {
                    match phi {
                        SmoothPhi::Exp { c } => (c * t).exp(),
                        SmoothPhi::Monomial => t.powi(*k as i32),
                        SmoothPhi::MonomialPlusExp { c } => t.powi(*k as i32) + (c * t).exp(),
                    }
                }
            }
        }
    }

    fn eval(&self, coeffs: &[f64], t: f64) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, a)| a * self.member(i, t))
            .sum()
    }

    /// A positive multiple of member `i` at `t`, the same multiple for every
    /// `i`. Power-sgn members are divided by `|t|^{p_k}` beyond `|t| = 1`,
    /// which keeps far-out roots representable.
    fn scaled_member(&self, i: usize, t: f64) -> f64 {
        match self {
            FuncSystem::PowerSgn { exponents } if t.abs() > 1.0 => {
                let v = t.abs().powf(exponents[i] - exponents[exponents.len() - 1]);
                if i % 2 == 1 { v.copysign(t) } else { v }
            }
            _ => self.member(i, t),
        }
    }

    /// Has the sign of the combination at `t`.
    fn eval_scaled(&self, coeffs: &[f64], t: f64) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != 0.0)
            .map(|(i, a)| a * self.scaled_member(i, t))
            .sum()
    }

    fn radius_cap(&self) -> f64 {
        match self {
            FuncSystem::PowerSgn { .. } => 1e300,
            FuncSystem::Smooth { .. } => 1e12,
        }
    }

    fn check_coeffs(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.order() + 1 {
            return Err(invalid(format!(
                "expected {} coefficients, got {}",
                self.order() + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().all(|a| *a == 0.0) {
            return Err(invalid("the coefficient vector must not be all zero"));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(invalid("coefficients must be finite"));
        }
        Ok(())
    }

    /// Index of the member that dominates as `t → +∞` (`right`) or
    /// `t → −∞`.
    fn dominant(&self, coeffs: &[f64], right: bool) -> Option<usize> {
        let top_nonzero = |upto: usize| (0..upto).rev().find(|&i| coeffs[i] != 0.0);
        match self {
            FuncSystem::PowerSgn { .. } => top_nonzero(coeffs.len()),
            FuncSystem::Smooth { k, phi } => {
                let phi_grows_left = !matches!(phi, SmoothPhi::Exp { .. });
                if coeffs[*k] != 0.0 && (right || phi_grows_left) {
                    Some(*k)
                } else {
                    top_nonzero(*k).or(Some(*k))
                }
            }
        }
    }

    /// A radius `R ≥ 50` past which the dominant member outweighs all the
    /// others, so no sign change happens for `|t| > R`.
    pub fn tail_radius(&self, coeffs: &[f64]) -> Result<f64> {
        self.check_coeffs(coeffs)?;
        let mut r: f64 = 50.0;
        if let FuncSystem::Smooth { k, phi: SmoothPhi::Exp { c } | SmoothPhi::MonomialPlusExp { c } } = self {
            // Beyond k/c the exponential outgrows every power below k.
            r = r.max(*k as f64 / c);
        }
        let dominates = |t: f64, right: bool| -> bool {
            let Some(d) = self.dominant(coeffs, right) else {
                return true;
            };
            let x = if right { t } else { -t };
            let top = (coeffs[d] * self.scaled_member(d, x)).abs();
            let rest: f64 = (0..coeffs.len())
                .filter(|&i| i != d)
                .map(|i| (coeffs[i] * self.scaled_member(i, x)).abs())
                .sum();
            top > rest
        };
        while !(dominates(r, true) && dominates(r, false)) {
            r *= 2.0;
            if r > self.radius_cap() {
                return Err(invalid(format!(
                    "no tail radius below {:e}; coefficients are too unbalanced",
                    self.radius_cap()
                )));
            }
        }
        Ok(r)
    }
}

/// Value of `Σ a_i u_i(x)`.
pub fn combo_eval(sys: &FuncSystem, coeffs: &[f64], x: f64) -> Result<f64> {
    sys.check_coeffs(coeffs)?;
    Ok(sys.eval(coeffs, x))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignChanges {
    pub count: usize,
    /// Each crossing bracketed to width `1e−12` (relative beyond `|t| = 1`).
    pub roots: Vec<f64>,
    pub evaluations: usize,
}

fn sample_points(lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..grid)
        .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
        .collect();
    // Geometric points resolve crossings packed near 0, where the |t|^p
    // members vary on every scale.
    let top = lo.abs().max(hi.abs()).log10().ceil() as i32;
    for e in (-12 * 8)..=(top * 8) {
        let m = 10f64.powf(e as f64 / 8.0);
        for x in [m, -m] {
            if lo < x && x < hi {
                xs.push(x);
            }
        }
    }
    if lo < 0.0 && 0.0 < hi {
        xs.push(0.0);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Number of sign alternations of the combination on `[lo, hi]`.
///
/// The initial grid (uniform plus geometric points around 0) is refined
/// wherever three consecutive samples of one sign show a dip towards zero:
/// the dip is minimised by golden section and, if it crosses, the crossing
/// pair is added. Exact zeros of the samples carry no sign and are skipped.
pub fn count_sign_changes(sys: &FuncSystem, coeffs: &[f64], lo: f64, hi: f64, initial_grid: usize) -> Result<SignChanges> {
    sys.check_coeffs(coeffs)?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid("the interval must be finite with lo < hi"));
    }
    if initial_grid < 64 {
        return Err(invalid("the initial grid needs at least 64 points"));
    }
    let f = |t: f64| sys.eval_scaled(coeffs, t);
    let xs = sample_points(lo, hi, initial_grid);
    let mut samples: Vec<(f64, f64)> = xs.iter().map(|&x| (x, f(x))).collect();
    let mut evaluations = samples.len();

    let mut extra = Vec::new();
    for w in samples.windows(3) {
        let (s0, s1, s2) = (sign(w[0].1), sign(w[1].1), sign(w[2].1));
        if s1 == 0 || s0 != s1 || s1 != s2 {
            continue;
        }
        if w[1].1.abs() > w[0].1.abs() || w[1].1.abs() > w[2].1.abs() {
            continue;
        }
        let sg = s1 as f64;
        let (x, v, n) = golden_min(|t| sg * f(t), w[0].0, w[2].0);
        evaluations += n;
        if v < 0.0 {
            extra.push((x, sg * v));
        }
    }
    if !extra.is_empty() {
        samples.extend(extra);
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let signed: Vec<(f64, i8)> = samples
        .iter()
        .map(|&(x, v)| (x, sign(v)))
        .filter(|&(_, s)| s != 0)
        .collect();
    let mut roots = Vec::new();
    for w in signed.windows(2) {
        if w[0].1 != w[1].1 {
            let (mut a, mut b) = (w[0].0, w[1].0);
            let sa = w[0].1;
            while b - a > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                evaluations += 1;
                let sm = sign(f(m));
                if sm == 0 {
                    a = m;
                    b = m;
                } else if sm == sa {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
    }
    Ok(SignChanges {
        count: roots.len(),
        roots,
        evaluations,
    })
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64, usize) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut n = 2;
    while b - a > 1e-14 * a.abs().max(b.abs()).max(1e-300) && n < 200 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        n += 1;
    }
    if fc <= fd { (c, fc, n) } else { (d, fd, n) }
}

/// Which systems a randomised trial draws from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SystemClass {
    /// Power-sgn systems of the given order (≤ 4) with exponents drawn per
    /// trial: `p_2 ~ U(1.1, 4)`, `p_3 ~ U(p_2 + 0.1, 6)`, `p_4 ~ U(p_3 + 0.1, 9)`.
    PowerSgn { order: usize },
    /// One fixed system.
    Fixed { system: FuncSystem },
}

impl SystemClass {
    pub fn order(&self) -> usize {
        match self {
            SystemClass::PowerSgn { order } => *order,
            SystemClass::Fixed { system } => system.order(),
        }
    }

    /// Parses `power-sgn:K` (random exponents, `K ≤ 4`),
    /// `power-sgn:0,1,p2,…` (fixed exponents), `smooth-exp:K[:c]`,
    /// `smooth-monomial:K` and `smooth-monomial+exp:K[:c]`.
    pub fn parse(spec: &str) -> Result<SystemClass> {
        let bad = || invalid(format!("bad system '{spec}'"));
        let (head, rest) = spec.split_once(':').ok_or_else(bad)?;
        if head == "power-sgn" {
            if rest.contains(',') {
                let exps = rest
                    .split(',')
                    .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                return Ok(SystemClass::Fixed { system: FuncSystem::power_sgn(exps)? });
            }
            return Ok(SystemClass::PowerSgn { order: rest.parse().map_err(|_| bad())? });
        }
        let (k, c) = match rest.split_once(':') {
            Some((k, c)) => (k, Some(c.parse::<f64>().map_err(|_| bad())?)),
            None => (rest, None),
        };
        let k: usize = k.parse().map_err(|_| bad())?;
        let phi = match (head, c) {
            ("smooth-exp", c) => SmoothPhi::Exp { c: c.unwrap_or(1.0) },
            ("smooth-monomial", None) => SmoothPhi::Monomial,
            ("smooth-monomial+exp", c) => SmoothPhi::MonomialPlusExp { c: c.unwrap_or(1.0) },
            _ => return Err(bad()),
        };
        Ok(SystemClass::Fixed { system: FuncSystem::smooth(k, phi)? })
    }

    pub fn label(&self) -> String {
        match self {
            SystemClass::PowerSgn { order } => format!("power-sgn:{order}"),
            SystemClass::Fixed { system } => system.label(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub class: String,
    pub order: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_roots_seen: usize,
    /// Trials with more sign changes than the order.
    pub violations: usize,
    /// `histogram[r]` = number of trials with `r` sign changes.
    pub histogram: Vec<usize>,
    /// The first few violating trial indices, for replay.
    pub violating_trials: Vec<usize>,
}

const EXPONENT_RANGES: [(f64, f64); 3] = [(1.1, 4.0), (0.1, 6.0), (0.1, 9.0)];

fn draw_exponents<R: Rng>(order: usize, rng: &mut R) -> Vec<f64> {
    let mut p = vec![0.0, 1.0];
    for (i, &(lo, hi)) in EXPONENT_RANGES.iter().enumerate().take(order.saturating_sub(1)) {
        let lo = if i == 0 { lo } else { p[p.len() - 1] + lo };
        p.push(rng.random_range(lo..hi));
    }
    p.truncate(order + 1);
    p
}

/// Standard normal coefficients. For order 4 every fourth trial is generic
/// and the others are pinned to `a_4 = 1` with the sign patterns of
/// `(a_2, a_3)` that separate the cases of the order-4 argument:
/// `a_2 ≤ 0`; `a_2 > 0, a_3 ≤ 0`; `a_2 > 0, a_3 > 0`.
fn draw_coeffs<R: Rng>(order: usize, trial: usize, rng: &mut R) -> Vec<f64> {
    let mut a: Vec<f64> = (0..=order).map(|_| rng.sample(StandardNormal)).collect();
    if order == 4 {
        match trial % 4 {
            1 => {
                a[4] = 1.0;
                a[2] = -a[2].abs();
            }
            2 => {
                a[4] = 1.0;
                a[2] = a[2].abs();
                a[3] = -a[3].abs();
            }
            3 => {
                a[4] = 1.0;
                a[2] = a[2].abs();
                a[3] = a[3].abs();
            }
            _ => {}
        }
    }
    a
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Draws `trials` random combinations and counts their sign changes on
/// `[−R, R]`, `R` the tail radius of each combination.
pub fn cheb_trial(class: &SystemClass, trials: usize, seed: u64, jobs: usize) -> Result<TrialSummary> {
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    if let SystemClass::PowerSgn { order } = class {
        if !(1..=4).contains(order) {
            return Err(invalid("random power-sgn systems are defined for orders 1 to 4"));
        }
    }
    let order = class.order();
    let idx: Vec<usize> = (0..trials).collect();
    let counts = par_map(&idx, jobs, |&t| -> Result<usize> {
        let mut rng = trial_rng(seed, t);
        let sys = match class {
            SystemClass::PowerSgn { order } => FuncSystem::power_sgn(draw_exponents(*order, &mut rng))?,
            SystemClass::Fixed { system } => system.clone(),
        };
        let coeffs = draw_coeffs(order, t, &mut rng);
        let r = sys.tail_radius(&coeffs)?;
        Ok(count_sign_changes(&sys, &coeffs, -r, r, 1024)?.count)
    });
    let mut histogram = vec![0; order + 2];
    let mut violating_trials = Vec::new();
    let mut violations = 0;
    for (t, c) in counts.into_iter().enumerate() {
        let c = c?;
        if c >= histogram.len() {
            histogram.resize(c + 1, 0);
        }
        histogram[c] += 1;
        if c > order {
            violations += 1;
            if violating_trials.len() < 16 {
                violating_trials.push(t);
            }
        }
    }
    while histogram.len() > order + 1 && histogram.last() == Some(&0) {
        histogram.pop();
    }
    Ok(TrialSummary {
        class: class.label(),
        order,
        trials,
        seed,
        max_roots_seen: histogram.iter().rposition(|&h| h > 0).unwrap_or(0),
        violations,
        histogram,
        violating_trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn line() -> FuncSystem {
        FuncSystem::power_sgn(vec![0.0, 1.0]).unwrap()
    }

    fn square() -> FuncSystem {
        FuncSystem::power_sgn(vec![0.0, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(combo_eval(&line(), &[-1.0, 1.0], 1.0).unwrap(), 0.0);
        assert_eq!(combo_eval(&square(), &[-1.0, 0.0, 1.0], 1.0).unwrap(), 0.0);
        assert_eq!(combo_eval(&square(), &[-1.0, 0.0, 1.0], -1.0).unwrap(), 0.0);
        let sys = FuncSystem::power_sgn(vec![0.0, 1.0, 2.5, 3.5, 5.0]).unwrap();
        assert_eq!(combo_eval(&sys, &[0.7, -1.2, 3.0, 0.4, -2.0], 0.0).unwrap(), 0.7);
        // Odd members carry the sign of t.
        assert_eq!(combo_eval(&sys, &[0.0, 0.0, 0.0, 1.0, 0.0], -2.0).unwrap(), -(2f64.powf(3.5)));
    }

    #[test]
    fn invalid_inputs() {
        assert!(combo_eval(&square(), &[0.0, 0.0, 0.0], 1.0).is_err());
        assert!(combo_eval(&square(), &[1.0, 0.0], 1.0).is_err());
        assert!(FuncSystem::power_sgn(vec![0.0, 2.0]).is_err());
        assert!(FuncSystem::power_sgn(vec![0.0, 1.0, 3.0, 2.0]).is_err());
        assert!(FuncSystem::smooth(0, SmoothPhi::Monomial).is_err());
        assert!(FuncSystem::smooth(3, SmoothPhi::Exp { c: -1.0 }).is_err());
        assert!(count_sign_changes(&square(), &[1.0, 0.0, 0.0], -1.0, 1.0, 10).is_err());
        assert!(count_sign_changes(&square(), &[1.0, 0.0, 0.0], 1.0, -1.0, 64).is_err());
        assert!(cheb_trial(&SystemClass::PowerSgn { order: 5 }, 10, 1, 1).is_err());
    }

    #[test]
    fn counting_examples() {
        let r = count_sign_changes(&square(), &[-1.0, 0.0, 1.0], -2.0, 2.0, 64).unwrap();
        assert_eq!(r.count, 2);
        assert!((r.roots[0] + 1.0).abs() < 1e-11 && (r.roots[1] - 1.0).abs() < 1e-11);
        let r = count_sign_changes(&square(), &[1.0, 0.0, 0.0], -5.0, 7.0, 64).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn close_pair_of_roots_is_resolved() {
        // (t − 0.3)(t − 0.3001) has two roots inside one grid cell.
        let c = [0.3 * 0.3001, -0.6001, 1.0];
        let r = count_sign_changes(&square(), &c, -10.0, 10.0, 64).unwrap();
        assert_eq!(r.count, 2);
    }

    #[test]
    fn roots_near_zero_are_resolved() {
        // t(t − 1e−7) on the power-sgn system {1, t, |t|²}: roots at 0 and 1e−7.
        let c = [1e-9, -1.0, 1.0];
        let r = count_sign_changes(&square(), &c, -1.0, 1.0, 64).unwrap();
        assert_eq!(r.count, 2, "{:?}", r.roots);
    }

    #[test]
    fn interpolation_property_order_two() {
        // A combination vanishing exactly at x₁ < x₂ with leading coefficient 1.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let p: f64 = rng.random_range(1.1..4.0);
            let sys = FuncSystem::power_sgn(vec![0.0, 1.0, p]).unwrap();
            let mut x1: f64 = rng.random_range(-5.0..5.0);
            let mut x2: f64 = rng.random_range(-5.0..5.0);
            if x1 > x2 {
                std::mem::swap(&mut x1, &mut x2);
            }
            if x2 - x1 < 1e-3 {
                continue;
            }
            let (g1, g2) = (x1.abs().powf(p), x2.abs().powf(p));
            let a1 = -(g2 - g1) / (x2 - x1);
            let a0 = -g1 - a1 * x1;
            let c = [a0, a1, 1.0];
            let r = count_sign_changes(&sys, &c, -50.0, 50.0, 1024).unwrap();
            assert_eq!(r.count, 2, "p = {p}, roots {x1}, {x2}: {:?}", r.roots);
            assert!((r.roots[0] - x1).abs() < 1e-9 && (r.roots[1] - x2).abs() < 1e-9);
        }
    }

    #[test]
    fn tail_radius_contains_every_root() {
        // 1000 − t⁴ has its roots at ±5.6; a steep low-order coefficient
        // pushes the radius out.
        let sys = FuncSystem::power_sgn(vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(sys.tail_radius(&[1000.0, 0.0, 0.0, 0.0, -1.0]).unwrap(), 50.0);
        let r = sys.tail_radius(&[0.0, 0.0, 0.0, -1e6, 1.0]).unwrap();
        assert!(r > 1e6);
        let smooth = FuncSystem::smooth(3, SmoothPhi::Exp { c: 1.0 }).unwrap();
        assert!(smooth.tail_radius(&[0.0, 0.0, 1.0, 1.0]).unwrap() >= 50.0);
    }

    #[test]
    fn small_trials() {
        let s = cheb_trial(&SystemClass::PowerSgn { order: 1 }, 1000, 3, 1).unwrap();
        assert_eq!((s.max_roots_seen, s.violations), (1, 0));
        let s = cheb_trial(&SystemClass::PowerSgn { order: 4 }, 1000, 42, 1).unwrap();
        assert_eq!(s.violations, 0);
        let smooth = FuncSystem::smooth(3, SmoothPhi::Exp { c: 1.0 }).unwrap();
        let s = cheb_trial(&SystemClass::Fixed { system: smooth }, 1000, 7, 1).unwrap();
        assert_eq!(s.violations, 0);
        assert_eq!(s.histogram.iter().sum::<usize>(), 1000);
    }

    #[test]
    fn system_specs() {
        assert_eq!(SystemClass::parse("power-sgn:3").unwrap(), SystemClass::PowerSgn { order: 3 });
        assert_eq!(SystemClass::parse("power-sgn:0,1,2.5").unwrap().order(), 2);
        let s = SystemClass::parse("smooth-exp:3").unwrap();
        assert_eq!(s.order(), 3);
        assert!(matches!(
            SystemClass::parse("smooth-monomial+exp:2:0.5").unwrap(),
            SystemClass::Fixed { system: FuncSystem::Smooth { k: 2, phi: SmoothPhi::MonomialPlusExp { c } } } if c == 0.5
        ));
        for spec in ["power-sgn:3", "power-sgn:0,1,2.5", "smooth-exp:3:0.5", "smooth-monomial:2"] {
            assert_eq!(SystemClass::parse(spec).unwrap().label(), spec);
        }
        for bad in ["power-sgn", "power-sgn:0,2", "smooth-exp:0", "smooth-exp:3:-1", "smooth-monomial:2:1", "cubic:3"] {
            assert!(SystemClass::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn trials_do_not_depend_on_worker_count() {
        let a = cheb_trial(&SystemClass::PowerSgn { order: 3 }, 300, 5, 1).unwrap();
        let b = cheb_trial(&SystemClass::PowerSgn { order: 3 }, 300, 5, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exponent_sampling_is_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            let p = draw_exponents(4, &mut rng);
            assert!(FuncSystem::power_sgn(p.clone()).is_ok(), "{p:?}");
            assert!(p[2] >= 1.1 && p[2] < 4.0 && p[3] < 6.0 && p[4] < 9.0);
        }
        assert_eq!(draw_exponents(1, &mut rng), vec![0.0, 1.0]);
        assert_eq!(draw_exponents(2, &mut rng).len(), 3);
    }

    proptest! {
        #[test]
        fn count_is_scale_invariant(
            a in proptest::collection::vec(-5.0f64..5.0, 4),
            c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
        ) {
            prop_assume!(a.iter().any(|x| x.abs() > 1e-3));
            let sys = FuncSystem::power_sgn(vec![0.0, 1.0, 1.7, 2.9]).unwrap();
            let scaled: Vec<f64> = a.iter().map(|x| x * c).collect();
            let r1 = count_sign_changes(&sys, &a, -50.0, 50.0, 256).unwrap();
            let r2 = count_sign_changes(&sys, &scaled, -50.0, 50.0, 256).unwrap();
            prop_assert_eq!(r1.count, r2.count);
        }

        #[test]
        fn order_bound_holds_for_random_systems(
            p2 in 1.1f64..4.0,
            a in proptest::collection::vec(-3.0f64..3.0, 3),
        ) {
            prop_assume!(a.iter().any(|x| x.abs() > 1e-3));
            let sys = FuncSystem::power_sgn(vec![0.0, 1.0, p2]).unwrap();
            let r = sys.tail_radius(&a).unwrap();
            prop_assert!(count_sign_changes(&sys, &a, -r, r, 256).unwrap().count <= 2);
        }
    }
}
