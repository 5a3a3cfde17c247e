//! Exact rational scalars and dense univariate polynomials over them.
//!
//! [`Poly`] keeps its coefficients in ascending order (index `i` holds the
//! coefficient of `s^i`) and is always trimmed, so two polynomials are equal
//! exactly when their coefficient vectors are equal. The zero polynomial has
//! no coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type BigRat = BigRational;

pub fn rat(num: i64, den: i64) -> BigRat {
    BigRat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

/// Renders as `"num/den"` using decimal integers, never floating point.
pub fn rat_to_string(r: &BigRat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rat_to_f64(r: &BigRat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigRat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRat::one())
    }

    pub fn constant(c: BigRat) -> Self {
        Poly::new(vec![c])
    }

    /// The polynomial `s`.
    pub fn x() -> Self {
        Poly::new(vec![BigRat::zero(), BigRat::one()])
    }

    /// `c * s^degree`
    pub fn monomial(c: BigRat, degree: usize) -> Self {
        let mut coeffs = vec![BigRat::zero(); degree + 1];
        coeffs[degree] = c;
        Poly::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<BigRat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    /// Builds `c * (s - r_1)(s - r_2)...` from its roots.
    pub fn from_roots(c: BigRat, roots: &[BigRat]) -> Self {
        roots.iter().fold(Poly::constant(c), |acc, r| {
            &acc * &Poly::new(vec![-r.clone(), BigRat::one()])
        })
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRat> {
        self.coeffs
    }

    /// Coefficient of `s^i`; zero past the degree.
    pub fn coeff(&self, i: usize) -> BigRat {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRat> {
        self.coeffs.last()
    }

    fn all_integer(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn scale(&self, c: &BigRat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn scale_int(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        if self.all_integer() {
            return Poly::new(
                self.coeffs
                    .iter()
                    .map(|a| BigRat::from_integer(a.numer() * c))
                    .collect(),
            );
        }
        self.scale(&BigRat::from_integer(c.clone()))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * BigRat::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Returns `q` with `q(s) = p(s + c)`.
    pub fn shift(&self, c: &BigRat) -> Poly {
        if c.is_zero() || self.coeffs.len() < 2 {
            return self.clone();
        }
        if self.all_integer() {
            return self.shift_integer(c);
        }
        // Horner in the ring: out <- out * (s + c) + a, from the top coefficient down.
        let mut out: Vec<BigRat> = Vec::with_capacity(self.coeffs.len());
        for a in self.coeffs.iter().rev() {
            out.push(BigRat::zero());
            for j in (1..out.len()).rev() {
                let t = &out[j] * c + &out[j - 1];
                out[j] = t;
            }
            out[0] = &out[0] * c + a;
        }
        Poly::new(out)
    }

    /// Shift of an integer polynomial by `c = a/b`, done over ℤ:
    /// `p(s + a/b) = b^{−d} p̂(bs + a)` with `p̂(u) = b^d p(u/b)`.
    fn shift_integer(&self, c: &BigRat) -> Poly {
        let d = self.coeffs.len() - 1;
        let (a, b) = (c.numer(), c.denom());
        let mut b_pows = vec![BigInt::one()];
        for i in 1..=d {
            let next = &b_pows[i - 1] * b;
            b_pows.push(next);
        }
        let mut work: Vec<BigInt> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, x)| x.numer() * &b_pows[d - i])
            .collect();
        // Integer Taylor shift by `a`.
        for i in 0..d {
            for j in (i..d).rev() {
                let t = &work[j + 1] * a;
                work[j] += t;
            }
        }
        let scale = &b_pows[d];
        Poly::new(
            work.into_iter()
                .enumerate()
                .map(|(i, x)| BigRat::new(x * &b_pows[i], scale.clone()))
                .collect(),
        )
    }

    /// Long division: `self = d * quotient + remainder`, `deg remainder < deg d`.
    pub fn div_rem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let lead = d.leading().expect("nonzero divisor");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![BigRat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / lead;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                if !dj.is_zero() {
                    rem[k + j] -= &c * dj;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRat) -> BigRat {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRat::zero(), |acc, a| acc * x + a)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * x + rat_to_f64(a))
    }

    /// `p(-s)`
    pub fn reflect(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, a)| if i % 2 == 1 { -a.clone() } else { a.clone() })
                .collect(),
        )
    }

    /// `p(c - s)`
    pub fn mirror(&self, c: &BigRat) -> Poly {
        self.reflect().shift(&-c.clone())
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Zero::is_zero)
    }

    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(Zero::is_zero)
    }

    /// Sign of the value at `x`, evaluated exactly.
    pub fn sign_at(&self, x: &BigRat) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }
}

fn add_coeffs(a: &[BigRat], b: &[BigRat], negate_b: bool) -> Vec<BigRat> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i);
            let y = b.get(i);
            match (x, y) {
                (Some(x), Some(y)) if negate_b => x - y,
                (Some(x), Some(y)) => x + y,
                (Some(x), None) => x.clone(),
                (None, Some(y)) if negate_b => -y.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            }
        })
        .collect()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::new(add_coeffs(&self.coeffs, &rhs.coeffs, false))
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::new(add_coeffs(&self.coeffs, &rhs.coeffs, true))
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|a| -a.clone()).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let n = self.coeffs.len() + rhs.coeffs.len() - 1;
        if self.all_integer() && rhs.all_integer() {
            // Integer convolution skips the gcd normalisation of every product.
            let a: Vec<&BigInt> = self.coeffs.iter().map(|c| c.numer()).collect();
            let b: Vec<&BigInt> = rhs.coeffs.iter().map(|c| c.numer()).collect();
            let mut out = vec![BigInt::zero(); n];
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += *x * *y;
                }
            }
            return Poly::new(out.into_iter().map(BigRat::from_integer).collect());
        }
        let mut out = vec![BigRat::zero(); n];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Poly::new(out)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "s")?,
                _ => write!(f, "s^{i}")?,
            }
        }
        Ok(())
    }
}

pub fn poly_add(a: &Poly, b: &Poly) -> Poly {
    a + b
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    a * b
}

pub fn poly_derivative(p: &Poly) -> Poly {
    p.derivative()
}

pub fn poly_shift(p: &Poly, c: &BigRat) -> Poly {
    p.shift(c)
}

pub fn poly_divide_exact(p: &Poly, d: &Poly) -> Result<(Poly, Poly)> {
    p.div_rem(d)
}

pub fn poly_eval(p: &Poly, x: &BigRat) -> BigRat {
    p.eval(x)
}
