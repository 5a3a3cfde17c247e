//! Closed-form and spline marginal densities, their moments, and Monte Carlo
//! oracles over the reference bodies.

mod bodies;
mod gamma_s;
mod spline;

pub use bodies::{
    body_marginal, facet_normals, norm, normalize, regular_simplex, simplex_marginal_density,
    triangulation, two_normal_direction, BallMarginal, BodyKind, BodySampler, Marginal,
};
pub use gamma_s::{
    gamma_s_density, gamma_s_moment, gamma_s_signed_moment, PiecewiseExpDensity,
};
pub use spline::{BSplineDensity, PolyPiece, SplineMixture};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::parallel::par_map;

/// Samples per Monte Carlo block. Each block owns an RNG stream derived from
/// the seed and the block index, so results do not depend on the worker count.
pub const MC_BLOCK: usize = 1 << 16;

pub(crate) fn block_rng(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

fn block_sizes(total: usize) -> Vec<(usize, usize)> {
    (0..total.div_ceil(MC_BLOCK))
        .map(|b| (b, MC_BLOCK.min(total - b * MC_BLOCK)))
        .collect()
}

/// Projections `θ · X_i` of `count` uniform samples of the body.
pub fn mc_marginal_samples(
    body: &BodySampler,
    theta: &[f64],
    count: usize,
    jobs: usize,
) -> Result<Vec<f64>> {
    if theta.len() != body.n {
        return Err(invalid("direction length does not match the body dimension"));
    }
    let blocks = block_sizes(count);
    let parts = par_map(&blocks, jobs, |&(b, size)| {
        let mut rng = block_rng(body.seed, b);
        let mut x = vec![0.0; body.n];
        (0..size)
            .map(|_| {
                body.sample_into(&mut rng, &mut x);
                x.iter().zip(theta).map(|(a, t)| a * t).sum::<f64>()
            })
            .collect::<Vec<f64>>()
    });
    Ok(parts.concat())
}

/// `count` uniform points of the body, row-major (`count × n`).
pub fn mc_body_points(body: &BodySampler, count: usize, jobs: usize) -> Vec<f64> {
    let blocks = block_sizes(count);
    let parts = par_map(&blocks, jobs, |&(b, size)| {
        let mut rng = block_rng(body.seed, b);
        let mut out = vec![0.0; size * body.n];
        for row in out.chunks_exact_mut(body.n) {
            body.sample_into(&mut rng, row);
        }
        out
    });
    parts.concat()
}

#[derive(Clone, Copy, Debug, Default)]
struct Welford {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Welford) -> Welford {
        if o.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Welford {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }
}

/// Monte Carlo estimate of `E|θ·X|^p` (or the signed version) with its
/// standard error.
pub fn mc_marginal_moment(
    body: &BodySampler,
    theta: &[f64],
    p: f64,
    count: usize,
    signed: bool,
    jobs: usize,
) -> Result<(f64, f64)> {
    if count == 0 {
        return Err(invalid("sample count must be positive"));
    }
    if theta.len() != body.n {
        return Err(invalid("direction length does not match the body dimension"));
    }
    if p == 0.0 && !signed {
        return Ok((1.0, 0.0));
    }
    let blocks = block_sizes(count);
    let parts = par_map(&blocks, jobs, |&(b, size)| {
        let mut rng = block_rng(body.seed, b);
        let mut x = vec![0.0; body.n];
        let mut acc = Welford::default();
        for _ in 0..size {
            body.sample_into(&mut rng, &mut x);
            let y: f64 = x.iter().zip(theta).map(|(a, t)| a * t).sum();
            let v = y.abs().powf(p);
            acc.push(if signed { v * y.signum() } else { v });
        }
        acc
    });
    let acc = parts.into_iter().fold(Welford::default(), Welford::merge);
    let var = if acc.n > 1.0 { acc.m2 / (acc.n - 1.0) } else { 0.0 };
    Ok((acc.mean, (var / acc.n).sqrt()))
}

/// Kolmogorov–Smirnov distance between sorted samples and a cdf.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic one-sample KS critical value at level 1%.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_6 / (n as f64).sqrt()
}

/// `(x, f(x))` on a uniform grid of `samples` points over `[lo, hi]`.
pub fn sample_curve<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize) -> Vec<(f64, f64)> {
    if samples < 2 {
        return vec![(lo, f(lo))];
    }
    (0..samples)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            (x, f(x))
        })
        .collect()
}
