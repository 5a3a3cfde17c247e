use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use crate::densities::gamma_s::sign;
use crate::densities::spline::{BSplineDensity, SplineMixture};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadOptions, QuadResult};

/// Centered reference bodies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyKind {
    /// Regular simplex: the centered standard basis of ℝ^{n+1}, edge √2.
    Simplex,
    /// `[−1, 1]^n`
    Cube,
    /// Unit Euclidean ball.
    Ball,
    /// Unit ℓ¹ ball.
    CrossPolytope,
}

impl BodyKind {
    pub const ALL: [BodyKind; 4] = [
        BodyKind::Simplex,
        BodyKind::Cube,
        BodyKind::Ball,
        BodyKind::CrossPolytope,
    ];

    pub fn is_symmetric(self) -> bool {
        !matches!(self, BodyKind::Simplex)
    }

    pub fn name(self) -> &'static str {
        match self {
            BodyKind::Simplex => "simplex",
            BodyKind::Cube => "cube",
            BodyKind::Ball => "ball",
            BodyKind::CrossPolytope => "cross-polytope",
        }
    }
}

impl fmt::Display for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BodyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplex" | "triangle" => Ok(BodyKind::Simplex),
            "cube" | "square" => Ok(BodyKind::Cube),
            "ball" | "disk" => Ok(BodyKind::Ball),
            "cross-polytope" | "cross" | "diamond" => Ok(BodyKind::CrossPolytope),
            other => Err(invalid(format!("unknown body '{other}'"))),
        }
    }
}

/// Vertices of the regular `n`-simplex centered at the origin: the standard
/// basis of ℝ^{n+1}, centered and written in the Helmert basis of the
/// hyperplane `Σ x_i = 0`.
pub fn regular_simplex(n: usize) -> Vec<Vec<f64>> {
    (0..=n)
        .map(|j| {
            (1..=n)
                .map(|k| {
                    let norm = ((k * (k + 1)) as f64).sqrt();
                    if j < k {
                        1.0 / norm
                    } else if j == k {
                        -(k as f64) / norm
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &[f64]) -> Result<Vec<f64>> {
    let len = norm(a);
    if len == 0.0 || !len.is_finite() {
        return Err(invalid("cannot normalize a zero or non-finite vector"));
    }
    Ok(a.iter().map(|x| x / len).collect())
}

/// Outward unit normal of the facet opposite vertex `j`.
pub fn facet_normals(n: usize) -> Vec<Vec<f64>> {
    regular_simplex(n)
        .iter()
        .map(|v| normalize(&v.iter().map(|x| -x).collect::<Vec<_>>()).expect("vertex is nonzero"))
        .collect()
}

/// `(sθ₁ − (1−s)θ₂) / |sθ₁ − (1−s)θ₂|` for two facet normals.
pub fn two_normal_direction(theta1: &[f64], theta2: &[f64], s: f64) -> Result<Vec<f64>> {
    let v: Vec<f64> = theta1
        .iter()
        .zip(theta2)
        .map(|(a, b)| s * a - (1.0 - s) * b)
        .collect();
    normalize(&v)
}

fn check_direction(n: usize, theta: &[f64]) -> Result<()> {
    if theta.len() != n {
        return Err(invalid(format!("direction has length {}, expected {n}", theta.len())));
    }
    if (norm(theta) - 1.0).abs() > 1e-9 {
        return Err(invalid("direction must be a unit vector"));
    }
    Ok(())
}

/// Density of `θ · X` for `X` uniform on the regular simplex.
pub fn simplex_marginal_density(n: usize, theta: &[f64]) -> Result<BSplineDensity> {
    if n < 2 {
        return Err(invalid("simplex dimension must be at least 2"));
    }
    check_direction(n, theta)?;
    BSplineDensity::from_knots(regular_simplex(n).iter().map(|v| dot(v, theta)).collect())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Equal-volume simplices tiling the body (Kuhn triangulation for the cube,
/// orthant simplices for the cross-polytope).
pub fn triangulation(kind: BodyKind, n: usize) -> Option<Vec<Vec<Vec<f64>>>> {
    match kind {
        BodyKind::Simplex => Some(vec![regular_simplex(n)]),
        BodyKind::Cube => Some(
            permutations(n)
                .into_iter()
                .map(|perm| {
                    let mut v = vec![-1.0; n];
                    let mut verts = vec![v.clone()];
                    for axis in perm {
                        v[axis] = 1.0;
                        verts.push(v.clone());
                    }
                    verts
                })
                .collect(),
        ),
        BodyKind::CrossPolytope => Some(
            (0..1usize << n)
                .map(|mask| {
                    let mut verts = vec![vec![0.0; n]];
                    for i in 0..n {
                        let mut e = vec![0.0; n];
                        e[i] = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
                        verts.push(e);
                    }
                    verts
                })
                .collect(),
        ),
        BodyKind::Ball => None,
    }
}

/// Marginal of the unit ball in ℝ^n: density ∝ (1 − x²)^{(n−1)/2} on [−1, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallMarginal {
    n: usize,
}

impl BallMarginal {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(invalid("ball dimension must be positive"));
        }
        Ok(BallMarginal { n })
    }

    // With x = sin φ the integrand becomes w(sin φ) cos^n φ on [−π/2, π/2].
    fn raw<W: Fn(f64) -> f64>(&self, w: W, opts: QuadOptions) -> Result<QuadResult> {
        let n = self.n as i32;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let f = |phi: f64| w(phi.sin()) * phi.cos().powi(n);
        let a = integrate(&f, -half_pi, 0.0, opts)?;
        let b = integrate(&f, 0.0, half_pi, opts)?;
        Ok(crate::quadrature::sum_results(&[a, b]))
    }

    fn normaliser(&self) -> f64 {
        // ∫_{−π/2}^{π/2} cos^n φ dφ via the Wallis recursion.
        let mut w = [std::f64::consts::PI, 2.0];
        for k in 2..=self.n {
            let next = w[0] * (k as f64 - 1.0) / k as f64;
            w = [w[1], next];
        }
        if self.n == 0 { std::f64::consts::PI } else { w[1] }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            return 0.0;
        }
        (1.0 - x * x).powf((self.n as f64 - 1.0) / 2.0) / self.normaliser()
    }

    pub fn moment(&self, p: f64, signed: bool, opts: QuadOptions) -> Result<QuadResult> {
        let z = self.normaliser();
        let r = if signed {
            self.raw(|x| x.abs().powf(p) * sign(x), opts)?
        } else {
            self.raw(|x| x.abs().powf(p), opts)?
        };
        Ok(QuadResult {
            value: r.value / z,
            error: r.error / z,
            evaluations: r.evaluations,
        })
    }
}

/// Exact one-dimensional marginal of a reference body along a direction.
#[derive(Clone, Debug, PartialEq)]
pub enum Marginal {
    Spline(BSplineDensity),
    Mixture(SplineMixture),
    Ball(BallMarginal),
}

impl Marginal {
    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Spline(d) => d.pdf(x),
            Marginal::Mixture(d) => d.pdf(x),
            Marginal::Ball(d) => d.pdf(x),
        }
    }

    pub fn moment(&self, p: f64, signed: bool, opts: QuadOptions) -> Result<QuadResult> {
        match self {
            Marginal::Spline(d) => d.moment(p, signed, opts),
            Marginal::Mixture(d) => d.moment(p, signed, opts),
            Marginal::Ball(d) => d.moment(p, signed, opts),
        }
    }
}

/// Exact marginal of `kind` in ℝ^n along the unit vector `theta`.
pub fn body_marginal(kind: BodyKind, n: usize, theta: &[f64]) -> Result<Marginal> {
    check_direction(n, theta)?;
    match kind {
        BodyKind::Simplex => Ok(Marginal::Spline(simplex_marginal_density(n, theta)?)),
        BodyKind::Ball => Ok(Marginal::Ball(BallMarginal::new(n)?)),
        BodyKind::Cube | BodyKind::CrossPolytope => {
            let parts = triangulation(kind, n).expect("polytope");
            let comps = parts
                .iter()
                .map(|verts| {
                    let knots = verts.iter().map(|v| dot(v, theta)).collect();
                    BSplineDensity::from_knots(knots).map(|d| (1.0, d))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Marginal::Mixture(SplineMixture::new(comps)?))
        }
    }
}

/// Draws uniform points from a centered reference body.
#[derive(Clone, Debug, PartialEq)]
pub struct BodySampler {
    pub kind: BodyKind,
    pub n: usize,
    pub seed: u64,
    vertices: Vec<Vec<f64>>,
}

impl BodySampler {
    pub fn new(kind: BodyKind, n: usize, seed: u64) -> Result<Self> {
        if n < 1 {
            return Err(invalid("dimension must be positive"));
        }
        let vertices = if kind == BodyKind::Simplex { regular_simplex(n) } else { Vec::new() };
        Ok(BodySampler { kind, n, seed, vertices })
    }

    /// Writes one uniform point into `out` (length `n`).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.kind {
            BodyKind::Simplex => {
                // Normalised exponential spacings are uniform barycentric weights.
                let w: Vec<f64> = (0..=self.n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                let total: f64 = w.iter().sum();
                out.fill(0.0);
                for (wj, v) in w.iter().zip(&self.vertices) {
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += wj / total * x;
                    }
                }
            }
            BodyKind::Cube => {
                for o in out.iter_mut() {
                    *o = rng.random_range(-1.0..1.0);
                }
            }
            BodyKind::Ball => {
                for o in out.iter_mut() {
                    *o = rng.sample(StandardNormal);
                }
                let len = norm(out);
                let radius = rng.random::<f64>().powf(1.0 / self.n as f64);
                for o in out.iter_mut() {
                    *o *= radius / len;
                }
            }
            BodyKind::CrossPolytope => {
                // n+1 exponentials: the first n normalised give a uniform point
                // of the positive orthant simplex, then random signs.
                let w: Vec<f64> = (0..=self.n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                let total: f64 = w.iter().sum();
                for (o, wi) in out.iter_mut().zip(&w) {
                    let sgn = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    *o = sgn * wi / total;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn simplex_is_regular_and_centered() {
        for n in 2..=5 {
            let v = regular_simplex(n);
            assert_eq!(v.len(), n + 1);
            for i in 0..n {
                let c: f64 = v.iter().map(|x| x[i]).sum();
                assert!(c.abs() < 1e-14);
            }
            for a in 0..=n {
                for b in a + 1..=n {
                    let d: Vec<f64> = v[a].iter().zip(&v[b]).map(|(x, y)| x - y).collect();
                    assert!((norm(&d) - 2f64.sqrt()).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn facet_normals_are_orthogonal_to_facets() {
        let n = 3;
        let v = regular_simplex(n);
        for (j, nu) in facet_normals(n).iter().enumerate() {
            let others: Vec<f64> = (0..=n).filter(|&i| i != j).map(|i| dot(&v[i], nu)).collect();
            assert!(others.windows(2).all(|w| (w[0] - w[1]).abs() < 1e-14));
            assert!(dot(&v[j], nu) < others[0]);
        }
    }

    #[test]
    fn triangulations_have_the_right_size() {
        assert_eq!(triangulation(BodyKind::Cube, 3).unwrap().len(), 6);
        assert_eq!(triangulation(BodyKind::CrossPolytope, 3).unwrap().len(), 8);
        assert!(triangulation(BodyKind::Ball, 3).is_none());
    }

    #[test]
    fn ball_marginal_moments() {
        let opts = QuadOptions::default();
        let disk = BallMarginal::new(2).unwrap();
        assert!((disk.moment(0.0, false, opts).unwrap().value - 1.0).abs() < 1e-12);
        assert!((disk.moment(2.0, false, opts).unwrap().value - 0.25).abs() < 1e-12);
        assert!((disk.pdf(0.0) - 2.0 / std::f64::consts::PI).abs() < 1e-14);
        let ball = BallMarginal::new(3).unwrap();
        assert!((ball.pdf(0.5) - 0.75 * 0.75).abs() < 1e-14);
        assert!((ball.moment(2.0, false, opts).unwrap().value - 0.2).abs() < 1e-12);
    }

    #[test]
    fn samplers_are_centered_and_inside() {
        for kind in BodyKind::ALL {
            for n in [2usize, 3] {
                let s = BodySampler::new(kind, n, 7).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                let mut x = vec![0.0; n];
                let mut mean = vec![0.0; n];
                let count = 40_000;
                for _ in 0..count {
                    s.sample_into(&mut rng, &mut x);
                    match kind {
                        BodyKind::Cube => assert!(x.iter().all(|c| c.abs() <= 1.0)),
                        BodyKind::Ball => assert!(norm(&x) <= 1.0),
                        BodyKind::CrossPolytope => assert!(x.iter().map(|c| c.abs()).sum::<f64>() <= 1.0),
                        BodyKind::Simplex => {}
                    }
                    for (m, c) in mean.iter_mut().zip(&x) {
                        *m += c / count as f64;
                    }
                }
                assert!(mean.iter().all(|m| m.abs() < 0.02), "{kind} n={n}: {mean:?}");
            }
        }
    }

    #[test]
    fn body_names_round_trip() {
        for kind in BodyKind::ALL {
            assert_eq!(kind.name().parse::<BodyKind>().unwrap(), kind);
        }
        assert_eq!("square".parse::<BodyKind>().unwrap(), BodyKind::Cube);
        assert!("torus".parse::<BodyKind>().is_err());
    }
}
