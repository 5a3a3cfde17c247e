//! Exact sign certificates for the even-moment ratio `r_q^{q−2} / r_{q−2}^q`.
//!
//! For even `q ≥ 4`,
//!
//! ```text
//! h_q = (q−2) r_q′ r_{q−2} − q r_{q−2}′ r_q
//! ```
//!
//! vanishes at `s ∈ {0, 1/2, 1}`. Recentering at `1/2` (substituting
//! `s ↦ s + 1/2`) moves those roots to `{−1/2, 0, 1/2}`, and dividing by
//! `s(s − 1/2)(s + 1/2)` leaves an even polynomial `h̃_q = Σ a_i s^{2i}`. If
//! every `a_i` with `i ≠ 1` is non-positive, and a positive `a_1` is dominated
//! by the quadratic `a_0 + a_1 x + a_2 x²` having negative discriminant, then
//! `h̃_q < 0` on ℝ and the ratio peaks at the endpoints `s ∈ {0, 1}`.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::gamma_moments::r_table;
use crate::parallel::par_map;
use crate::ratpoly::{int, rat, rat_to_f64, rat_to_string, BigRat, Poly};

/// Largest `q` covered by the published computer-assisted claim.
pub const PUBLISHED_Q_LIMIT: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub q: usize,
    /// `a_i`, the coefficient of `s^{2i}` in `h̃_q`.
    pub h_tilde_coeffs: Vec<BigRat>,
    pub odd_coeffs_zero: bool,
    pub nonpositive_except_i1: bool,
    pub a1_positive: bool,
    /// `a_1² − 4 a_0 a_2`
    pub discriminant: BigRat,
    pub divisible: bool,
    pub verdict: Verdict,
    pub beyond_published_claim: bool,
    pub diagnostics: Vec<String>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// `h̃_q` rebuilt from the even coefficients.
    pub fn h_tilde_poly(&self) -> Poly {
        let mut coeffs = vec![BigRat::zero(); 2 * self.h_tilde_coeffs.len()];
        for (i, a) in self.h_tilde_coeffs.iter().enumerate() {
            coeffs[2 * i] = a.clone();
        }
        Poly::new(coeffs)
    }

    pub fn to_record(&self) -> CertificateRecord {
        CertificateRecord {
            q: self.q,
            verdict: self.verdict,
            divisible: self.divisible,
            odd_coeffs_zero: self.odd_coeffs_zero,
            nonpositive_except_i1: self.nonpositive_except_i1,
            a1_positive: self.a1_positive,
            discriminant: rat_to_string(&self.discriminant),
            h_tilde_coeffs: self.h_tilde_coeffs.iter().map(rat_to_string).collect(),
            beyond_published_claim: self.beyond_published_claim,
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Serializable view of a [`Certificate`]; rationals are `"num/den"` strings.
#[derive(Clone, Debug, Serialize)]
pub struct CertificateRecord {
    pub q: usize,
    pub verdict: Verdict,
    pub divisible: bool,
    pub odd_coeffs_zero: bool,
    pub nonpositive_except_i1: bool,
    pub a1_positive: bool,
    pub discriminant: String,
    pub h_tilde_coeffs: Vec<String>,
    pub beyond_published_claim: bool,
    pub diagnostics: Vec<String>,
}

fn check_q(q: usize) -> Result<()> {
    if q < 4 || q % 2 == 1 {
        return Err(invalid(format!("q must be even and >= 4, got {q}")));
    }
    Ok(())
}

/// `h_q` from precomputed `r_q` and `r_{q−2}`.
pub fn h_from_r(q: usize, r_q: &Poly, r_qm2: &Poly) -> Poly {
    let a = (&r_q.derivative() * r_qm2).scale(&int(q as i64 - 2));
    let b = (&r_qm2.derivative() * r_q).scale(&int(q as i64));
    &a - &b
}

pub fn h_poly(q: usize) -> Result<Poly> {
    check_q(q)?;
    let table = r_table(q);
    Ok(h_from_r(q, &table[q], &table[q - 2]))
}

/// `s(s − 1/2)(s + 1/2) = s³ − s/4`
pub fn recentred_root_factor() -> Poly {
    Poly::new(vec![int(0), rat(-1, 4), int(0), int(1)])
}

/// Recentres `h` at `1/2` and divides out the three known roots.
pub fn h_tilde_parts(h: &Poly) -> (Poly, Poly) {
    let shifted = h.shift(&rat(1, 2));
    shifted
        .div_rem(&recentred_root_factor())
        .expect("divisor is nonzero")
}

/// `h̃_q`; errors when the division leaves a remainder or the quotient has a
/// nonzero odd coefficient.
pub fn h_tilde(q: usize) -> Result<Poly> {
    let h = h_poly(q)?;
    let (quot, rem) = h_tilde_parts(&h);
    if !rem.is_zero() {
        return Err(invalid(format!("h_{q} is not divisible: remainder {rem}")));
    }
    if !quot.is_even() {
        return Err(invalid(format!("h~_{q} has a nonzero odd coefficient")));
    }
    Ok(quot)
}

/// Builds the certificate from `h_q`. Anomalies produce a failing verdict
/// with a diagnostic, never a panic.
pub fn certify_h(q: usize, h: &Poly) -> Certificate {
    let mut diagnostics = Vec::new();
    let (quot, rem) = h_tilde_parts(h);
    let divisible = !h.is_zero() && rem.is_zero();
    if h.is_zero() {
        diagnostics.push("h_q is identically zero".to_string());
    } else if !divisible {
        diagnostics.push(format!("nonzero remainder after division: {rem}"));
    }
    let odd_coeffs_zero = quot.is_even();
    if !odd_coeffs_zero {
        diagnostics.push("quotient has nonzero odd coefficients".to_string());
    }
    // The leading terms of the two products in h_q cancel, so deg h_q = 2q − 5.
    let expected_degree = 2 * q - 8;
    let degree_ok = quot.degree() == Some(expected_degree);
    if divisible && !degree_ok {
        diagnostics.push(format!(
            "unexpected degree {:?}, expected {expected_degree}",
            quot.degree()
        ));
    }

    let even: Vec<BigRat> = quot.coeffs().iter().step_by(2).cloned().collect();
    let a = |i: usize| even.get(i).cloned().unwrap_or_else(BigRat::zero);
    let nonpositive_except_i1 = even
        .iter()
        .enumerate()
        .all(|(i, c)| i == 1 || !c.is_positive());
    if !nonpositive_except_i1 {
        let bad: Vec<usize> = even
            .iter()
            .enumerate()
            .filter(|(i, c)| *i != 1 && c.is_positive())
            .map(|(i, _)| i)
            .collect();
        diagnostics.push(format!("positive coefficients at i = {bad:?}"));
    }
    let a1_positive = a(1).is_positive();
    let discriminant = a(1) * a(1) - int(4) * a(0) * a(2);
    let quadratic_ok =
        !a1_positive || (discriminant.is_negative() && a(0).is_negative() && a(2).is_negative());
    if !quadratic_ok {
        diagnostics.push("positive a_1 not dominated by a_0 + a_1 x + a_2 x^2".to_string());
    }

    let pass = divisible && degree_ok && odd_coeffs_zero && nonpositive_except_i1 && quadratic_ok;
    Certificate {
        q,
        h_tilde_coeffs: even,
        odd_coeffs_zero,
        nonpositive_except_i1,
        a1_positive,
        discriminant,
        divisible,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        beyond_published_claim: q >= PUBLISHED_Q_LIMIT,
        diagnostics,
    }
}

pub fn certify_q(q: usize) -> Result<Certificate> {
    Ok(certify_h(q, &h_poly(q)?))
}

/// Certificates for `q = 4, 6, …, q_max`, ordered by `q`. The moment table is
/// built once; the per-`q` work is spread over `parallelism` workers.
pub fn certify_range(q_max: usize, parallelism: usize) -> Result<Vec<Certificate>> {
    if q_max < 4 || q_max % 2 == 1 {
        return Err(invalid(format!("q_max must be even and >= 4, got {q_max}")));
    }
    let table = r_table(q_max);
    let qs: Vec<usize> = (4..=q_max).step_by(2).collect();
    Ok(par_map(&qs, parallelism, |&q| {
        certify_h(q, &h_from_r(q, &table[q], &table[q - 2]))
    }))
}

/// Evaluates `log(r_q^{q−2} / r_{q−2}^q)` at `s = j / (grid − 1)` and returns
/// the values with the index of the largest one (lowest index on ties).
pub fn endpoint_ratio_profile(q: usize, grid: usize) -> Result<(Vec<f64>, usize)> {
    check_q(q)?;
    if grid < 2 {
        return Err(invalid("grid must have at least 2 points"));
    }
    let table = r_table(q);
    let den = grid as i64 - 1;
    let values: Vec<f64> = (0..grid)
        .map(|j| {
            let s = rat(j as i64, den);
            let rq = rat_to_f64(&table[q].eval(&s)).ln();
            let rp = rat_to_f64(&table[q - 2].eval(&s)).ln();
            (q as f64 - 2.0) * rq - q as f64 * rp
        })
        .collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    Ok((values, best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn even_poly(scale: i64, coeffs: &[i64]) -> Poly {
        let mut c = vec![BigRat::zero(); 2 * coeffs.len()];
        for (i, a) in coeffs.iter().enumerate() {
            c[2 * i] = int(scale * a);
        }
        Poly::new(c)
    }

    #[test]
    fn h4_factorises() {
        let h4 = h_poly(4).unwrap();
        assert_eq!(h4, Poly::from_i64(&[0, -48, 144, -96]));
        assert_eq!(h4, Poly::from_roots(int(-96), &[int(0), rat(1, 2), int(1)]));
        assert!(h4.eval(&int(0)).is_zero());
    }

    #[test]
    fn h_vanishes_at_the_midpoint() {
        for q in [4, 6, 8, 10] {
            assert!(h_poly(q).unwrap().eval(&rat(1, 2)).is_zero(), "q = {q}");
        }
    }

    #[test]
    fn h_tilde_matches_displayed_polynomials() {
        assert_eq!(h_tilde(4).unwrap(), even_poly(1, &[-96]));
        assert_eq!(h_tilde(6).unwrap(), even_poly(-720, &[15, 8, 144]));
        assert_eq!(
            h_tilde(8).unwrap(),
            even_poly(-1680, &[1485, -2880, 105696, 104448, 268544])
        );
        assert_eq!(
            h_tilde(10).unwrap(),
            even_poly(
                -5040,
                &[269325, -1323000, 72560880, 280339200, 1409629440, 1162622976, 1050406912]
            )
        );
    }

    #[test]
    fn small_certificates() {
        let c4 = certify_q(4).unwrap();
        assert!(c4.passed());
        assert_eq!(c4.h_tilde_coeffs, vec![int(-96)]);
        assert!(!c4.a1_positive);

        let c8 = certify_q(8).unwrap();
        assert!(c8.passed());
        assert!(c8.a1_positive);
        assert!(c8.discriminant.is_negative());

        let c10 = certify_q(10).unwrap();
        assert!(c10.passed());
        assert!(!c10.beyond_published_claim);
        assert!(certify_q(5).is_err());
        assert!(certify_q(2).is_err());
    }

    #[test]
    fn range_is_ordered_and_parallel_agrees() {
        let serial = certify_range(16, 1).unwrap();
        let parallel = certify_range(16, 4).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial.iter().map(|c| c.q).collect::<Vec<_>>(), vec![4, 6, 8, 10, 12, 14, 16]);
        assert!(serial.iter().all(Certificate::passed));
        assert_eq!(certify_range(4, 2).unwrap().len(), 1);
        assert!(certify_range(3, 1).is_err());
        assert!(certify_range(11, 1).is_err());
    }

    #[test]
    fn structural_anomalies_fail_without_panicking() {
        let bogus = Poly::from_i64(&[1, 2, 3, 4, 5]);
        let cert = certify_h(6, &bogus);
        assert_eq!(cert.verdict, Verdict::Fail);
        assert!(!cert.divisible);
        assert!(!cert.diagnostics.is_empty());

        let zero = certify_h(6, &Poly::zero());
        assert_eq!(zero.verdict, Verdict::Fail);

        // Divisible but with a positive constant term.
        let flipped = -&h_poly(6).unwrap();
        let cert = certify_h(6, &flipped);
        assert!(cert.divisible);
        assert_eq!(cert.verdict, Verdict::Fail);
    }

    #[test]
    fn structural_identities() {
        let table = r_table(20);
        for q in (4..=20).step_by(2) {
            let h = h_from_r(q, &table[q], &table[q - 2]);
            assert_eq!(h.mirror(&BigRat::one()), -&h, "antisymmetry q = {q}");
            let centred = h.shift(&rat(1, 2));
            assert!(centred.is_odd(), "recentred h_{q} is odd");
            let cert = certify_h(q, &h);
            let ht = cert.h_tilde_poly();
            assert!(ht.is_even());
            for j in 0..33 {
                let s = rat(j - 16, 32);
                assert!(ht.eval(&s).is_negative(), "q = {q}, s = {s}");
            }
        }
    }

    #[test]
    fn ratio_peaks_at_endpoints() {
        for q in (4..=24).step_by(2) {
            let (values, best) = endpoint_ratio_profile(q, 65).unwrap();
            assert!(best == 0 || best == values.len() - 1, "q = {q}");
            assert!((values[0] - values[64]).abs() < 1e-9 * values[0].abs().max(1.0));
            assert!(values[1..64].iter().all(|v| *v < values[0]));
        }
    }

    #[test]
    fn records_use_exact_strings() {
        let rec = certify_q(6).unwrap().to_record();
        assert_eq!(rec.h_tilde_coeffs, vec!["-10800/1", "-5760/1", "-103680/1"]);
    }
}
