//! Error type shared by every module.

use thiserror::Error;

/// Errors surfaced by parsing, enumeration, root finding, and asymptotics.
#[derive(Debug, Error)]
pub enum Error {
    /// Input text failed to parse as a jump-weight list.
    #[error("parse error: {0}")]
    Parse(String),

    /// A precondition on argument values was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The walk's jump gcd exceeds 1; asymptotic operations refuse it.
    #[error("non-reduced walk (jump gcd {0}); reduce the jump set first")]
    NonReduced(u64),

    /// A repeated singularity factor was detected (|P''(v)| below tolerance),
    /// placing the walk outside the simple-singularity assumption.
    #[error("repeated singularity factor at u = {0}")]
    RepeatedFactor(String),

    /// The operation requires a centered walk (P(1) = 1 and P'(1) = 0).
    #[error("walk is not centered: {0}")]
    NotCentered(String),

    /// The operation requires a Lukasiewicz walk (only negative jump is -1).
    #[error("not a Lukasiewicz walk: largest negative jump is -{0}")]
    NotLukasiewicz(u64),

    /// Exact-rational centering was requested but tau is irrational.
    #[error("tau is irrational; exact-rational centering is unavailable")]
    IrrationalTau,

    /// An iterative solver failed to reach the requested tolerance.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// Root classification is ambiguous (moduli too close to split).
    #[error("degenerate root split: {0}")]
    DegenerateSplit(String),

    /// Two tracked branches collided within the step tolerance.
    #[error("branch collision while tracking: {0}")]
    BranchCollision(String),

    /// A series operation hit a structurally forbidden input.
    #[error("series error: {0}")]
    Series(String),

    /// A table would exceed the configured memory guard.
    #[error("memory guard exceeded: table needs {needed} entries, cap is {cap}")]
    MemoryGuard { needed: u64, cap: u64 },
}
