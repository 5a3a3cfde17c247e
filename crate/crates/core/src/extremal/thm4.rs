use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::gamma_moments::{cumulant_cos_sin, moment_cos_sin, subfactorial};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thm4Row {
    pub n: usize,
    pub t: f64,
    /// μ_n(cos t·Γ − sin t·Γ′).
    pub value: f64,
    /// !n
    pub bound: f64,
    /// `!n − value`; positive when strict.
    pub margin: f64,
    pub relative_margin: f64,
    /// `|k_n| / (n − 1)!`, strictly below 1 inside `(0, π/2)`.
    pub cumulant_ratio: f64,
}

/// Sweep of `μ_n(cos t·Γ − sin t·Γ′) < !n` over even `n` and interior `t`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thm4Report {
    pub n_max: usize,
    pub t_grid: usize,
    pub rows: Vec<Thm4Row>,
    pub min_relative_margin: f64,
    pub min_margin_at: (usize, f64),
    /// `(n, t)` pairs where the strict inequality failed.
    pub violations: Vec<(usize, f64)>,
    /// `(n, t)` pairs where `|k_n| ≥ (n − 1)!` inside the interval.
    pub cumulant_violations: Vec<(usize, f64)>,
}

impl Thm4Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.cumulant_violations.is_empty()
    }
}

/// `t_j = j·(π/2)/(t_grid + 1)` for `j = 1..=t_grid` and every even
/// `4 ≤ n ≤ n_max`.
pub fn verify_thm4(n_max: usize, t_grid: usize) -> Result<Thm4Report> {
    if n_max < 4 || n_max % 2 == 1 {
        return Err(invalid(format!("n_max must be even and at least 4, got {n_max}")));
    }
    if t_grid == 0 {
        return Err(invalid("the t-grid needs at least one point"));
    }
    let step = std::f64::consts::FRAC_PI_2 / (t_grid + 1) as f64;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut cumulant_violations = Vec::new();
    let mut factorial = 1.0f64;
    let mut factorials = vec![1.0];
    for k in 1..=n_max {
        factorial *= k as f64;
        factorials.push(factorial);
    }
    for n in (4..=n_max).step_by(2) {
        let bound = subfactorial(n).to_f64().unwrap_or(f64::INFINITY);
        for j in 1..=t_grid {
            let t = step * j as f64;
            let value = moment_cos_sin(n, t)?;
            let margin = bound - value;
            let cumulant_ratio = cumulant_cos_sin(n, t).abs() / factorials[n - 1];
            if margin <= 0.0 {
                violations.push((n, t));
            }
            if cumulant_ratio >= 1.0 {
                cumulant_violations.push((n, t));
            }
            rows.push(Thm4Row {
                n,
                t,
                value,
                bound,
                margin,
                relative_margin: margin / bound,
                cumulant_ratio,
            });
        }
    }
    let worst = rows
        .iter()
        .min_by(|a, b| a.relative_margin.total_cmp(&b.relative_margin))
        .expect("non-empty sweep");
    Ok(Thm4Report {
        n_max,
        t_grid,
        min_relative_margin: worst.relative_margin,
        min_margin_at: (worst.n, worst.t),
        rows,
        violations,
        cumulant_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_sweep_is_strict() {
        let r = verify_thm4(20, 97).unwrap();
        assert!(r.passed());
        assert_eq!(r.rows.len(), 9 * 97);
        assert!(r.min_relative_margin > 0.0);
    }

    #[test]
    fn quarter_turn_value() {
        let r = verify_thm4(4, 1).unwrap();
        assert!((r.rows[0].t - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((r.rows[0].value - 6.0).abs() < 1e-12);
        assert_eq!(r.rows[0].bound, 9.0);
    }

    #[test]
    fn margin_vanishes_towards_the_boundary() {
        let r = verify_thm4(4, 10_000).unwrap();
        assert!(r.rows[0].margin < 1e-3);
        assert!(r.rows[0].margin > 0.0);
    }

    #[test]
    fn bad_arguments() {
        assert!(verify_thm4(3, 10).is_err());
        assert!(verify_thm4(2, 10).is_err());
        assert!(verify_thm4(6, 0).is_err());
    }
}
