//! Exact arithmetic for Carlitz q-Bernoulli numbers and polynomials, exhaustive
//! symmetric-group checks of their symmetry identities, and a truncated p-adic
//! engine for the p-adic q-integral they come from.
//!
//! The exact engine works over [`BigRational`]; every identity check is an
//! exact equality test. The p-adic engine ([`padic`]) tracks valuations and
//! known digits explicitly and reports convergence as growth of the agreement
//! valuation.

pub mod carlitz;
pub mod error;
pub mod padic;
pub mod qcalc;
pub mod rational;
pub mod symmetry;

pub use carlitz::{beta_poly, beta_poly_at_power, carlitz_beta, classical_bernoulli, BetaCache};
pub use error::{Error, Result};
pub use padic::{PadicContext, PadicNumber, QExpPoly};
pub use qcalc::{q_number, QParam};
pub use rational::{binomial, format_rational, parse_rational, BigInt, BigRational};
pub use symmetry::{Permutation, SymmetryInstance, TheoremKind, VerificationReport, WeightVector};
