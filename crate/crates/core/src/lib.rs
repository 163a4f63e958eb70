//! Height statistics of weighted lattice bridges.
//!
//! A walk model is a finite set of integer jumps with positive rational
//! weights, encoded as a Laurent polynomial `P(u) = sum_j p_j u^j` with at
//! least one negative and one positive jump. This crate provides:
//!
//! - exact dynamic-programming enumeration of walks and bridges, with an
//!   optional height ceiling ([`enumerate`]);
//! - the kernel equation `1 - z P(u) = 0`: numerical root systems, branch
//!   tracking, singularity sets, and domination diagnostics ([`roots`]);
//! - truncated series expansions of the kernel branches at the dominant
//!   singularity via Newton iteration in the ramified variable `X`,
//!   `z = 1 - X^2` ([`series`]);
//! - Hermite-family polynomial tables and the Gamma constants that replace
//!   Hankel contour integrals ([`hermite`]);
//! - asymptotic height-tail expansions in powers of `n^(-1/2)` with exact
//!   oracle comparators ([`asymptotics`]).
//!
//! All derived reals use configurable-precision floating point (default 50
//! significant decimal digits); weights and DP counts are exact rationals.

pub mod asymptotics;
pub mod enumerate;
pub mod error;
pub mod hermite;
pub mod prec;
pub mod roots;
pub mod series;
pub mod walk;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;

/// Default working precision for derived reals, in decimal digits.
pub const DEFAULT_DIGITS: usize = 50;
