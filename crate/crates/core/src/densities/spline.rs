use crate::densities::gamma_s::sign;
use crate::error::{invalid, Result};
use crate::quadrature::{gauss_legendre, integrate, QuadOptions, QuadResult};

/// A polynomial piece on `[a, b]`, stored in the local variable `u = x − a`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyPiece {
    pub a: f64,
    pub b: f64,
    pub coeffs: Vec<f64>,
}

impl PolyPiece {
    pub fn eval(&self, x: f64) -> f64 {
        let u = x - self.a;
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    /// `∫_a^x` of the piece, for `x` in `[a, b]`.
    pub fn integral_to(&self, x: f64) -> f64 {
        let u = x - self.a;
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, c)| acc * u + c / (i as f64 + 1.0))
            * u
    }
}

/// Normalised B-spline (Curry–Schoenberg M-spline) with knots
/// `t_0 ≤ … ≤ t_k`: a density of degree `k − 1` supported on `[t_0, t_k]`.
///
/// The density of `θ · X` for `X` uniform on an `n`-simplex is the M-spline
/// whose `n + 1` knots are the projected vertices. Knots closer than
/// `1e-12 × span` are merged; a knot may repeat up to `k` times (a repeat of
/// `k` makes the density jump there, which is the cone case).
#[derive(Clone, Debug, PartialEq)]
pub struct BSplineDensity {
    knots: Vec<f64>,
    pieces: Vec<PolyPiece>,
}

type LocalPoly = Vec<f64>;

fn poly_add_scaled(out: &mut LocalPoly, p: &[f64], lin: (f64, f64)) {
    // out += (lin.0 + lin.1 u) * p
    if out.len() < p.len() + 1 {
        out.resize(p.len() + 1, 0.0);
    }
    for (i, c) in p.iter().enumerate() {
        out[i] += lin.0 * c;
        out[i + 1] += lin.1 * c;
    }
}

impl BSplineDensity {
    pub fn from_knots(mut knots: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("a spline density needs at least two knots"));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(invalid("knots must be finite"));
        }
        knots.sort_by(f64::total_cmp);
        let span = knots[knots.len() - 1] - knots[0];
        if span <= 0.0 {
            return Err(invalid("all knots coincide; the density is a point mass"));
        }
        let merge_tol = 1e-12 * span;
        for i in 1..knots.len() {
            if knots[i] - knots[i - 1] <= merge_tol {
                knots[i] = knots[i - 1];
            }
        }
        let order = knots.len() - 1;
        let mut pieces = Vec::new();
        for j in 0..order {
            let (a, b) = (knots[j], knots[j + 1]);
            if b <= a {
                continue;
            }
            pieces.push(PolyPiece {
                a,
                b,
                coeffs: Self::piece_on(&knots, j, order),
            });
        }
        Ok(BSplineDensity { knots, pieces })
    }

    /// Local polynomial of `M_{0,order}` on `[t_j, t_{j+1})` via the
    /// Curry–Schoenberg recursion
    /// `M_{i,r} = r((x − t_i) M_{i,r−1} + (t_{i+r} − x) M_{i+1,r−1}) / ((r − 1)(t_{i+r} − t_i))`.
    fn piece_on(t: &[f64], j: usize, order: usize) -> LocalPoly {
        let a = t[j];
        // Level r = 1: indicator / width on the active interval only.
        let mut level: Vec<LocalPoly> = (0..order)
            .map(|i| {
                if i == j {
                    vec![1.0 / (t[i + 1] - t[i])]
                } else {
                    Vec::new()
                }
            })
            .collect();
        for r in 2..=order {
            let mut next = Vec::with_capacity(order + 1 - r);
            for i in 0..=(order - r) {
                let width = t[i + r] - t[i];
                let mut out: LocalPoly = Vec::new();
                if width > 0.0 {
                    let scale = r as f64 / ((r - 1) as f64 * width);
                    // (x − t_i) = (a − t_i) + u ; (t_{i+r} − x) = (t_{i+r} − a) − u
                    poly_add_scaled(&mut out, &level[i], ((a - t[i]) * scale, scale));
                    poly_add_scaled(&mut out, &level[i + 1], ((t[i + r] - a) * scale, -scale));
                }
                next.push(out);
            }
            level = next;
        }
        let mut p = level.pop().unwrap_or_default();
        while p.last() == Some(&0.0) {
            p.pop();
        }
        p
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[PolyPiece] {
        &self.pieces
    }

    pub fn degree(&self) -> usize {
        self.knots.len() - 2
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    fn piece_index(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return None;
        }
        let idx = self.pieces.partition_point(|p| p.b <= x);
        Some(idx.min(self.pieces.len() - 1))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.piece_index(x)
            .map_or(0.0, |i| self.pieces[i].eval(x).max(0.0))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let i = self.piece_index(x).expect("inside the support");
        let full: f64 = self.pieces[..i].iter().map(|p| p.integral_to(p.b)).sum();
        (full + self.pieces[i].integral_to(x)).clamp(0.0, 1.0)
    }

    /// `E[w(X)]`, where `w` is smooth away from 0.
    pub fn expect<W: Fn(f64) -> f64>(&self, w: W, opts: QuadOptions) -> Result<QuadResult> {
        let mut value = 0.0;
        let mut error = 0.0;
        let mut evaluations = 0;
        for piece in &self.pieces {
            for (a, b) in split_at_zero(piece.a, piece.b) {
                let r = integrate(|x| w(x) * piece.eval(x), a, b, opts)?;
                value += r.value;
                error += r.error;
                evaluations += r.evaluations;
            }
        }
        Ok(QuadResult { value, error, evaluations })
    }

    /// Absolute (or signed) `p`-th moment. Integer `p` uses a Gauss–Legendre
    /// rule that is exact for the polynomial integrand on each sub-piece.
    pub fn moment(&self, p: f64, signed: bool, opts: QuadOptions) -> Result<QuadResult> {
        if p.fract() == 0.0 && (0.0..=64.0).contains(&p) {
            let pi = p as usize;
            let m = (self.degree() + pi) / 2 + 1;
            let (nodes, weights) = gauss_legendre(m);
            let mut value = 0.0;
            for piece in &self.pieces {
                for (a, b) in split_at_zero(piece.a, piece.b) {
                    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
                    let sub: f64 = nodes
                        .iter()
                        .zip(&weights)
                        .map(|(x, w)| {
                            let x = c + h * x;
                            let base = x.abs().powi(pi as i32);
                            let wgt = if signed { base * sign(x) } else { base };
                            w * wgt * piece.eval(x)
                        })
                        .sum();
                    value += h * sub;
                }
            }
            let scale = self.support().0.abs().max(self.support().1.abs()).powf(p);
            return Ok(QuadResult {
                value,
                error: 64.0 * f64::EPSILON * scale,
                evaluations: 0,
            });
        }
        if signed {
            self.expect(|x| x.abs().powf(p) * sign(x), opts)
        } else {
            self.expect(|x| x.abs().powf(p), opts)
        }
    }
}

fn split_at_zero(a: f64, b: f64) -> Vec<(f64, f64)> {
    if a < 0.0 && b > 0.0 {
        vec![(a, 0.0), (0.0, b)]
    } else {
        vec![(a, b)]
    }
}

/// Volume-weighted mixture of spline densities: the marginal of a polytope
/// cut into simplices.
#[derive(Clone, Debug, PartialEq)]
pub struct SplineMixture {
    components: Vec<(f64, BSplineDensity)>,
}

impl SplineMixture {
    pub fn new(components: Vec<(f64, BSplineDensity)>) -> Result<Self> {
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if components.is_empty() || total <= 0.0 {
            return Err(invalid("mixture needs positive total weight"));
        }
        Ok(SplineMixture {
            components: components.into_iter().map(|(w, d)| (w / total, d)).collect(),
        })
    }

    pub fn components(&self) -> &[(f64, BSplineDensity)] {
        &self.components
    }

    pub fn support(&self) -> (f64, f64) {
        self.components.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, d)| {
            let (a, b) = d.support();
            (lo.min(a), hi.max(b))
        })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.components.iter().map(|(w, d)| w * d.pdf(x)).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.components.iter().map(|(w, d)| w * d.cdf(x)).sum()
    }

    pub fn moment(&self, p: f64, signed: bool, opts: QuadOptions) -> Result<QuadResult> {
        let mut out = QuadResult { value: 0.0, error: 0.0, evaluations: 0 };
        for (w, d) in &self.components {
            let r = d.moment(p, signed, opts)?;
            out.value += w * r.value;
            out.error += w * r.error;
            out.evaluations += r.evaluations;
        }
        Ok(out)
    }
}
