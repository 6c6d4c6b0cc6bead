//! Diversity-coding protection design by column generation.

pub mod baselines;
pub mod coding;
pub mod lowerbound;
pub mod lp;
pub mod master;
pub mod netgraph;
pub mod pricing;
pub mod scalar;
pub mod traffic;

pub use num_rational::BigRational;
pub use scalar::Scalar;

/// Double-precision program, the default for design runs.
pub type Lp = lp::LinearProgram<f64>;
/// Exact rational program for bound certification.
pub type ExactLp = lp::LinearProgram<BigRational>;
pub type Solution = lp::SolveResult<f64>;
pub type ExactSolution = lp::SolveResult<BigRational>;
