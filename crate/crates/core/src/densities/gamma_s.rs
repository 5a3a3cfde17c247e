use rand::Rng;
use rand_distr::Exp1;

use crate::error::{invalid, Result};
use crate::quadrature::{integrate, sum_results, QuadOptions, QuadResult};

/// Density of Γ^s = sΓ − (1−s)Γ′, with Γ, Γ′ independent and
/// `Γ ~ e^{−(x+1)}` on `[−1, ∞)`.
///
/// The log-density is a tent with its apex (value 1) at `c = 1 − 2s`:
/// `exp((x − c)/(1 − s))` to the left and `exp(−(x − c)/s)` to the right.
/// The left piece carries mass `1 − s`, the right piece mass `s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiecewiseExpDensity {
    s: f64,
    breakpoint: f64,
}

impl PiecewiseExpDensity {
    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(invalid(format!("s must lie in [0, 1], got {s}")));
        }
        Ok(PiecewiseExpDensity {
            s,
            breakpoint: 1.0 - 2.0 * s,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn breakpoint(&self) -> f64 {
        self.breakpoint
    }

    fn left_scale(&self) -> f64 {
        1.0 - self.s
    }

    fn right_scale(&self) -> f64 {
        self.s
    }

    pub fn has_left_piece(&self) -> bool {
        self.s < 1.0
    }

    pub fn has_right_piece(&self) -> bool {
        self.s > 0.0
    }

    pub fn support(&self) -> (f64, f64) {
        let lo = if self.has_left_piece() { f64::NEG_INFINITY } else { self.breakpoint };
        let hi = if self.has_right_piece() { f64::INFINITY } else { self.breakpoint };
        (lo, hi)
    }

    /// `None` outside the support.
    pub fn log_pdf(&self, x: f64) -> Option<f64> {
        let d = x - self.breakpoint;
        if d < 0.0 {
            self.has_left_piece().then(|| d / self.left_scale())
        } else if d > 0.0 {
            self.has_right_piece().then(|| -d / self.right_scale())
        } else {
            Some(0.0)
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).map_or(0.0, f64::exp)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let d = x - self.breakpoint;
        let left_mass = self.left_scale();
        if d <= 0.0 {
            if self.has_left_piece() {
                left_mass * (d / self.left_scale()).exp()
            } else {
                0.0
            }
        } else if self.has_right_piece() {
            left_mass + self.s * (1.0 - (-d / self.right_scale()).exp())
        } else {
            1.0
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let e1: f64 = rng.sample(Exp1);
        let e2: f64 = rng.sample(Exp1);
        self.s * e1 - (1.0 - self.s) * e2 + self.breakpoint
    }

    /// `∫ w(x) f(x) dx` where `w` may have a kink at 0. The pieces are split
    /// at the breakpoint and at 0 and each tail is integrated in units of its
    /// own decay length.
    pub fn expect<W: Fn(f64) -> f64>(&self, w: W, opts: QuadOptions) -> Result<QuadResult> {
        let c = self.breakpoint;
        let mut parts = Vec::new();
        if self.has_right_piece() {
            let b = self.right_scale();
            let g = |x: f64| w(x) * (-(x - c) / b).exp();
            if c < 0.0 {
                parts.push(integrate(&g, c, 0.0, opts)?);
            }
            let start = c.max(0.0);
            let shift = -(start - c) / b;
            parts.push(upper_tail(|u| w(start + b * u) * (shift - u).exp(), b, opts)?);
        }
        if self.has_left_piece() {
            let a = self.left_scale();
            let g = |x: f64| w(x) * ((x - c) / a).exp();
            if c > 0.0 {
                parts.push(integrate(&g, 0.0, c, opts)?);
            }
            let end = c.min(0.0);
            let shift = (end - c) / a;
            parts.push(upper_tail(|u| w(end - a * u) * (shift - u).exp(), a, opts)?);
        }
        Ok(sum_results(&parts))
    }

    /// `E|X|^p`, or `E[|X|^p sgn X]` when `signed`.
    pub fn moment(&self, p: f64, signed: bool, opts: QuadOptions) -> Result<QuadResult> {
        if signed {
            self.expect(|x| x.abs().powf(p) * sign(x), opts)
        } else {
            self.expect(|x| x.abs().powf(p), opts)
        }
    }
}

pub(crate) fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `scale · ∫_0^∞ g(u) du` for an exponentially decaying `g`.
fn upper_tail<G: Fn(f64) -> f64>(g: G, scale: f64, opts: QuadOptions) -> Result<QuadResult> {
    let r = crate::quadrature::integrate_upper(g, 0.0, opts)?;
    Ok(QuadResult {
        value: r.value * scale,
        error: r.error * scale,
        evaluations: r.evaluations,
    })
}

pub fn gamma_s_density(s: f64) -> Result<PiecewiseExpDensity> {
    PiecewiseExpDensity::new(s)
}

fn moment_opts() -> QuadOptions {
    QuadOptions {
        rel_tol: 1e-13,
        ..QuadOptions::default()
    }
}

/// `E|Γ^s|^p` by adaptive quadrature.
pub fn gamma_s_moment(s: f64, p: f64) -> Result<f64> {
    if p < 0.0 {
        return Err(invalid(format!("moment order must be non-negative, got {p}")));
    }
    Ok(gamma_s_density(s)?.moment(p, false, moment_opts())?.value)
}

/// `E[|Γ^s|^q sgn(Γ^s)]` by adaptive quadrature.
pub fn gamma_s_signed_moment(s: f64, q: f64) -> Result<f64> {
    if q < 0.0 {
        return Err(invalid(format!("moment order must be non-negative, got {q}")));
    }
    Ok(gamma_s_density(s)?.moment(q, true, moment_opts())?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma_moments::r_table;
    use crate::ratpoly::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn endpoint_laws() {
        let g = gamma_s_density(1.0).unwrap();
        for x in [-1.0, -0.5, 0.0, 2.0, 7.5] {
            assert!((g.pdf(x) - (-(x + 1.0f64)).exp()).abs() < 1e-15);
        }
        assert_eq!(g.pdf(-1.5), 0.0);
        let g0 = gamma_s_density(0.0).unwrap();
        for x in [-3.0, 0.2, 1.0] {
            assert!((g0.pdf(x) - g.pdf(-x)).abs() < 1e-15);
        }
        assert!(gamma_s_density(1.2).is_err());
        assert!(gamma_s_density(-0.1).is_err());
    }

    #[test]
    fn half_is_two_sided_exponential() {
        let g = gamma_s_density(0.5).unwrap();
        for i in 0..1000 {
            let x = -8.0 + 16.0 * i as f64 / 999.0;
            assert!((g.pdf(x) - (-2.0 * x.abs()).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn apex_value_is_one() {
        for s in [0.05, 0.3, 0.5, 0.77] {
            let g = gamma_s_density(s).unwrap();
            assert_eq!(g.pdf(1.0 - 2.0 * s), 1.0);
        }
    }

    #[test]
    fn mass_and_mean() {
        let opts = QuadOptions::default();
        for i in 0..=20 {
            let s = i as f64 / 20.0;
            let g = gamma_s_density(s).unwrap();
            let mass = g.expect(|_| 1.0, opts).unwrap().value;
            let mean = g.expect(|x| x, opts).unwrap().value;
            assert!((mass - 1.0).abs() < 1e-10, "s = {s}");
            assert!(mean.abs() < 1e-10, "s = {s}");
            assert!((g.cdf(60.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn log_concave_midpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let s: f64 = rng.random_range(0.0..1.0);
            let g = gamma_s_density(s).unwrap();
            let a: f64 = rng.random_range(-4.0..4.0);
            let b: f64 = rng.random_range(-4.0..4.0);
            let (la, lb) = (g.log_pdf(a).unwrap(), g.log_pdf(b).unwrap());
            let lm = g.log_pdf(0.5 * (a + b)).unwrap();
            assert!(lm >= 0.5 * (la + lb) - 1e-12);
        }
    }

    #[test]
    fn moment_examples() {
        assert!((gamma_s_moment(1.0, 2.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((gamma_s_moment(1.0, 4.0).unwrap() - 9.0).abs() < 1e-9);
        assert!((gamma_s_moment(0.5, 4.0).unwrap() - 1.5).abs() < 1e-10);
        assert!(gamma_s_signed_moment(0.5, 3.7).unwrap().abs() < 1e-12);
        assert!((gamma_s_signed_moment(1.0, 3.0).unwrap() - 2.0).abs() < 1e-10);
        assert!((gamma_s_signed_moment(0.0, 3.0).unwrap() + 2.0).abs() < 1e-10);
    }

    #[test]
    fn quadrature_agrees_with_exact_polynomials() {
        let table = r_table(20);
        for p in (2..=20).step_by(2) {
            for j in 0..=20 {
                let exact_rat = crate::ratpoly::rat_to_f64(&table[p].eval(&rat(j, 20)));
                let quad = gamma_s_moment(j as f64 / 20.0, p as f64).unwrap();
                assert!(((quad - exact_rat) / exact_rat).abs() < 1e-9, "p = {p}, j = {j}");
            }
        }
    }

    #[test]
    fn mirror_law() {
        for j in 0..=10 {
            let s = j as f64 / 10.0;
            for p in [1.5, 2.0, 3.3] {
                let a = gamma_s_moment(s, p).unwrap();
                let b = gamma_s_moment(1.0 - s, p).unwrap();
                assert!(((a - b) / a).abs() < 1e-10);
                let sa = gamma_s_signed_moment(s, p).unwrap();
                let sb = gamma_s_signed_moment(1.0 - s, p).unwrap();
                assert!((sa + sb).abs() < 1e-10 * a);
            }
        }
    }

    #[test]
    fn closed_form_matches_monte_carlo() {
        // Kolmogorov–Smirnov distance of the sampler against the closed-form cdf.
        let n = 200_000;
        for s in [0.2, 0.5, 0.9] {
            let g = gamma_s_density(s).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1234);
            let mut xs: Vec<f64> = (0..n).map(|_| g.sample(&mut rng)).collect();
            xs.sort_by(f64::total_cmp);
            let d = crate::densities::ks_distance(&xs, |x| g.cdf(x));
            assert!(d < 1.63 / (n as f64).sqrt(), "s = {s}, D = {d}");
            // Local check of the apex value: mass of a small window around c.
            let c = g.breakpoint();
            let h = 0.005;
            let frac = xs.iter().filter(|x| (**x - c).abs() < h).count() as f64 / n as f64;
            let expected = g.cdf(c + h) - g.cdf(c - h);
            let sd = (expected * (1.0 - expected) / n as f64).sqrt();
            assert!((frac - expected).abs() < 3.0 * sd + 1e-12);
            assert!((expected / (2.0 * h) - 1.0).abs() < 0.05);
        }
    }
}
