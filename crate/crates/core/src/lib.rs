//! Linear-programming lower bounds for two-party communication complexity.
//!
//! The crate is organised bottom-up:
//!
//! * [`combinatorics`]: bit strings as sets, exact binomials and the
//!   `mu_{k,n,m}` distributions over pairs of sets with a fixed intersection.
//! * [`rectangles`]: combinatorial rectangles, witness sets and exact
//!   maximum-weight-rectangle oracles.
//! * [`lp`]: the search, Lovász and smooth rectangle LPs, an exact/float
//!   simplex, constraint generation, and dual certificates.
//! * [`protocols`]: executable public-coin protocols, k-fold tasks and the
//!   reductions between them.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix the two
//! instantiations used in practice.

pub mod combinatorics;
pub mod error;
pub mod functions;
pub mod lp;
pub mod protocols;
pub mod rectangles;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Scalar, Weight};

/// Exact rational arithmetic over unbounded integers.
pub type Rational = num_rational::BigRational;

pub type ExactLp = lp::LpInstance<Rational>;
pub type FloatLp = lp::LpInstance<f64>;
pub type ExactLpResult = lp::LpResult<Rational>;
pub type FloatLpResult = lp::LpResult<f64>;
pub type ExactWeights = rectangles::WeightMatrix<Rational>;
pub type FloatWeights = rectangles::WeightMatrix<f64>;
