//! Cumulants and moments of Γ, of the two-sided family Γ^s = sΓ − (1−s)Γ′,
//! and of the rotated combinations cos(t)Γ − sin(t)Γ′.
//!
//! Everything goes through one ring-generic cumulant-to-moment recursion
//!
//! ```text
//! μ_n = Σ_{i=1..n} C(n−1, i−1) k_i μ_{n−i},   μ_0 = 1
//! ```
//!
//! instantiated over exact rationals, over polynomials in `s`, and over `f64`
//! (with compensated summation).

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::ratpoly::{int, BigRat, Poly};

/// The operations the moment recursion needs from its coefficient ring.
pub trait MomentRing: Clone {
    fn additive_identity() -> Self;
    fn multiplicative_identity() -> Self;
    fn is_additive_identity(&self) -> bool;
    fn mul(&self, other: &Self) -> Self;
    fn scale_int(&self, c: &BigInt) -> Self;
    fn sum(terms: Vec<Self>) -> Self;
}

impl MomentRing for BigRat {
    fn additive_identity() -> Self {
        Zero::zero()
    }
    fn multiplicative_identity() -> Self {
        One::one()
    }
    fn is_additive_identity(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_int(&self, c: &BigInt) -> Self {
        self * BigRat::from_integer(c.clone())
    }
    fn sum(terms: Vec<Self>) -> Self {
        terms.into_iter().fold(Zero::zero(), |a, b| a + b)
    }
}

impl MomentRing for Poly {
    fn additive_identity() -> Self {
        Poly::zero()
    }
    fn multiplicative_identity() -> Self {
        Poly::one()
    }
    fn is_additive_identity(&self) -> bool {
        Poly::is_zero(self)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_int(&self, c: &BigInt) -> Self {
        Poly::scale_int(self, c)
    }
    fn sum(terms: Vec<Self>) -> Self {
        terms.into_iter().fold(Poly::zero(), |a, b| &a + &b)
    }
}

impl MomentRing for f64 {
    fn additive_identity() -> Self {
        0.0
    }
    fn multiplicative_identity() -> Self {
        1.0
    }
    fn is_additive_identity(&self) -> bool {
        *self == 0.0
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_int(&self, c: &BigInt) -> Self {
        self * c.to_f64().unwrap_or(f64::INFINITY)
    }
    fn sum(terms: Vec<Self>) -> Self {
        neumaier_sum(terms)
    }
}

/// Neumaier (improved Kahan–Babuška) summation.
pub fn neumaier_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in terms {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Cumulants `k_0, k_1, …, k_max_order` of a random variable.
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantSeq<R> {
    pub values: Vec<R>,
}

impl<R: MomentRing> CumulantSeq<R> {
    pub fn new(values: Vec<R>) -> Self {
        CumulantSeq { values }
    }

    pub fn max_order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

/// Raw moments `μ_0, μ_1, …, μ_max_order`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSeq<R> {
    pub values: Vec<R>,
}

impl<R> MomentSeq<R> {
    pub fn max_order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn get(&self, n: usize) -> Option<&R> {
        self.values.get(n)
    }
}

pub fn factorials(n_max: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(BigInt::one());
    for i in 1..=n_max {
        let next = &out[i - 1] * BigInt::from(i);
        out.push(next);
    }
    out
}

/// Row `n` of Pascal's triangle.
fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 1..=n {
        let next = &row[k - 1] * BigInt::from(n - k + 1) / BigInt::from(k);
        row.push(next);
    }
    row
}

/// Runs the cumulant-to-moment recursion up to order `n_max`.
pub fn moments_from_cumulants<R: MomentRing>(
    k: &CumulantSeq<R>,
    n_max: usize,
) -> Result<MomentSeq<R>> {
    if k.values.len() <= n_max {
        return Err(Error::InsufficientOrder {
            requested: n_max,
            available: k.max_order(),
        });
    }
    let mut mu: Vec<R> = Vec::with_capacity(n_max + 1);
    mu.push(R::multiplicative_identity());
    for n in 1..=n_max {
        let binom = binomial_row(n - 1);
        let terms: Vec<R> = (1..=n)
            .filter(|&i| !k.values[i].is_additive_identity() && !mu[n - i].is_additive_identity())
            .map(|i| k.values[i].mul(&mu[n - i]).scale_int(&binom[i - 1]))
            .collect();
        mu.push(R::sum(terms));
    }
    Ok(MomentSeq { values: mu })
}

/// `k_n(Γ)`: zero for `n < 2`, `(n−1)!` otherwise.
pub fn cumulant_gamma(n: usize) -> BigRat {
    if n < 2 {
        BigRat::zero()
    } else {
        BigRat::from_integer(factorials(n - 1)[n - 1].clone())
    }
}

pub fn gamma_cumulants(n_max: usize) -> CumulantSeq<BigRat> {
    let fact = factorials(n_max.max(1));
    CumulantSeq::new(
        (0..=n_max)
            .map(|n| {
                if n < 2 {
                    BigRat::zero()
                } else {
                    BigRat::from_integer(fact[n - 1].clone())
                }
            })
            .collect(),
    )
}

/// Moments of Γ up to `n_max`, via the recursion.
pub fn gamma_moments(n_max: usize) -> MomentSeq<BigRat> {
    moments_from_cumulants(&gamma_cumulants(n_max), n_max).expect("orders match")
}

/// `!n = n! Σ_{k=0..n} (−1)^k / k!`, the number of derangements of `n` items.
pub fn subfactorial(n: usize) -> BigInt {
    let fact = factorials(n);
    // n!/k! is an integer, so the alternating sum stays in ℤ.
    (0..=n)
        .map(|k| {
            let term = &fact[n] / &fact[k];
            if k % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// `k_i(Γ^s) = (s^i + (s−1)^i)(i−1)!` as a polynomial in `s`.
pub fn cumulant_mix_poly(i: usize) -> Poly {
    if i < 2 {
        return Poly::zero();
    }
    let s_pow = Poly::monomial(BigRat::one(), i);
    let sm1 = Poly::from_i64(&[-1, 1]);
    let sm1_pow = (0..i).fold(Poly::one(), |acc, _| &acc * &sm1);
    let fact = &factorials(i - 1)[i - 1];
    (&s_pow + &sm1_pow).scale_int(fact)
}

pub fn mix_cumulants(n_max: usize) -> CumulantSeq<Poly> {
    CumulantSeq::new((0..=n_max).map(cumulant_mix_poly).collect())
}

/// `μ_n(Γ^s)` for every `0 ≤ n ≤ n_max`, as polynomials in `s`.
pub fn r_table(n_max: usize) -> Vec<Poly> {
    moments_from_cumulants(&mix_cumulants(n_max), n_max)
        .expect("orders match")
        .values
}

/// `μ_n(Γ^s)` for any order `n`, odd orders included.
pub fn r_poly_any(n: usize) -> Poly {
    r_table(n).pop().expect("table is non-empty")
}

/// `r_p(s) = E[(sΓ + (s−1)Γ′)^p]` for even `p ≥ 2`.
pub fn r_poly(p: usize) -> Result<Poly> {
    if p < 2 || p % 2 == 1 {
        return Err(invalid(format!("r_poly needs an even order >= 2, got {p}")));
    }
    Ok(r_poly_any(p))
}

fn check_cos_sin_args(n: usize, t: f64) -> Result<()> {
    if n < 2 || n % 2 == 1 {
        return Err(invalid(format!("order must be even and >= 2, got {n}")));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&t) {
        return Err(invalid(format!("t must lie in [0, pi/2], got {t}")));
    }
    Ok(())
}

/// `k_i(cos(t)Γ − sin(t)Γ′) = (cos^i t + (−sin t)^i)(i−1)!`.
pub fn cumulant_cos_sin(i: usize, t: f64) -> f64 {
    if i < 2 {
        return 0.0;
    }
    let (s, c) = t.sin_cos();
    let fact = factorials(i - 1)[i - 1].to_f64().unwrap_or(f64::INFINITY);
    (c.powi(i as i32) + (-s).powi(i as i32)) * fact
}

/// `μ_n(cos(t)Γ − sin(t)Γ′)` in floating point.
pub fn moment_cos_sin(n: usize, t: f64) -> Result<f64> {
    check_cos_sin_args(n, t)?;
    let k = CumulantSeq::new((0..=n).map(|i| cumulant_cos_sin(i, t)).collect());
    Ok(moments_from_cumulants(&k, n)?.values[n])
}

/// Exact `μ_n` at `t = π/4`: odd cumulants cancel and even ones carry
/// `cos^i = sin^i = 2^{−i/2}`.
pub fn moment_cos_sin_quarter_exact(n: usize) -> Result<BigRat> {
    check_cos_sin_args(n, 0.0)?;
    let fact = factorials(n);
    let k = CumulantSeq::new(
        (0..=n)
            .map(|i| {
                if i < 2 || i % 2 == 1 {
                    BigRat::zero()
                } else {
                    let half_pow = BigRat::new(BigInt::one(), BigInt::one() << (i / 2));
                    half_pow * int(2) * BigRat::from_integer(fact[i - 1].clone())
                }
            })
            .collect(),
    );
    Ok(moments_from_cumulants(&k, n)?.values[n].clone())
}
