//! Exact and numerical tools for the extremal log-concave family
//! Γ^s = sΓ − (1−s)Γ′: moment/cumulant recursions, polynomial sign
//! certificates for even-moment norm ratios, closed-form and spline marginal
//! densities, norm-ratio scans over the family and over reference convex
//! bodies, and a randomized Chebyshev-system oracle.

pub mod certify;
pub mod cheb;
pub mod densities;
pub mod error;
pub mod extremal;
pub mod gamma_moments;
pub mod parallel;
pub mod quadrature;
pub mod ratpoly;

pub use error::{Error, Result};
pub use ratpoly::{BigRat, Poly};
