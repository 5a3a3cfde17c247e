//! Norm-ratio and φ-functional scans over the Γ^s family and over directions
//! of the reference bodies.

mod directions;
mod family;
mod report;
mod thm4;

pub use directions::{
    alpha_body, alpha_star_body, direction_grid, fibonacci_sphere, two_normal_family_distance,
    DirectionMode, DirectionOptions,
};
pub use family::{
    family_sigma, norm_ratio_scan, phi_scan, s_grid, signed_ratio_scan, Phi, ScanOptions,
};
pub use report::{Best, Check, Claim, Method, Parameter, Refinement, ScanPoint, ScanReport};
pub use thm4::{verify_thm4, Thm4Report, Thm4Row};

use crate::error::{invalid, Result};
use report::Best as GridBest;

pub(crate) fn check_orders(p: f64, q: f64) -> Result<()> {
    if !(p.is_finite() && q.is_finite() && 1.0 < p && p < q) {
        return Err(invalid(format!("moment orders must satisfy 1 < p < q, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// `(|S|^{1/q} or M_q^{1/q}) / M_p^{1/p}` with a first-order error bound,
/// the two relative errors added linearly.
pub(crate) fn ratio_with_error(num: (f64, f64), den: (f64, f64), p: f64, q: f64) -> (f64, f64) {
    let (a, ea) = (num.0.abs(), num.1.abs());
    let (b, eb) = den;
    let top = a.powf(1.0 / q);
    let bottom = b.powf(1.0 / p);
    let value = top / bottom;
    let top_err = (a + ea).powf(1.0 / q) - top;
    let err = top_err / bottom + value * eb.abs() / (p * b);
    (value, err)
}

/// A refined optimum replaces the grid optimum only when it is larger by
/// more than both error estimates.
pub(crate) fn significant(value: f64, error: f64, grid: &GridBest) -> bool {
    value - grid.value > error.max(grid.error)
}

pub(crate) struct GoldenResult {
    pub x: f64,
    pub value: f64,
    pub error: f64,
    pub width: f64,
    pub evaluations: usize,
    pub variation: f64,
}

/// Golden-section maximisation of `f` over `[a, b]` down to bracket width
/// `tol`. `f` returns `(value, error)`.
pub(crate) fn golden_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<GoldenResult>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evaluations = 2;
    while b - a > tol && evaluations < 400 {
        if fc.0 >= fd.0 {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
        evaluations += 1;
    }
    let (x, best) = if fc.0 >= fd.0 { (c, fc) } else { (d, fd) };
    Ok(GoldenResult {
        x,
        value: best.0,
        error: best.1,
        width: b - a,
        evaluations,
        variation: (fc.0 - fd.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_interior_maximum() {
        let r = golden_max(|x| Ok((-(x - 0.3).powi(2), 0.0)), 0.0, 1.0, 1e-10).unwrap();
        assert!((r.x - 0.3).abs() < 1e-9);
        assert!(r.width <= 1e-10);
    }

    #[test]
    fn ratio_error_is_first_order() {
        let (v, e) = ratio_with_error((16.0, 0.0), (4.0, 0.0), 2.0, 4.0);
        assert_eq!((v, e), (1.0, 0.0));
        let (_, e) = ratio_with_error((16.0, 1e-6), (4.0, 1e-6), 2.0, 4.0);
        assert!(e > 0.0 && e < 1e-6);
    }

    #[test]
    fn order_validation() {
        assert!(check_orders(2.0, 4.0).is_ok());
        assert!(check_orders(4.0, 2.0).is_err());
        assert!(check_orders(1.0, 2.0).is_err());
        assert!(check_orders(2.0, f64::INFINITY).is_err());
    }
}
