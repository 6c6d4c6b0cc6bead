//! Linear and mixed-integer programming.

mod factor;
mod lpfile;
mod mip;
mod model;
mod simplex;

use std::time::Instant;

pub use lpfile::write_lp_format;
pub use mip::{solve_mip, MipLimits, MipOptions};
pub use model::{
    Constraint, LinearProgram, RowId, Sense, SolveResult, Status, VarId, VarKind, Variable,
};

use crate::scalar::Scalar;
use simplex::{Outcome, Simplex};

#[derive(Debug, thiserror::Error)]
pub enum LpError {
    #[error("variable {var} ({name}) has lower bound above upper bound")]
    InvalidBounds { var: usize, name: String },
    #[error("solver stopped with status {0:?}")]
    NotSolved(Status),
}

/// Solves the continuous relaxation; integrality markers are ignored.
///
/// Duals follow the minimization convention: nonnegative on binding `>=`
/// rows, nonpositive on binding `<=` rows.
pub fn solve_lp<S: Scalar>(lp: &LinearProgram<S>) -> Result<SolveResult<S>, LpError> {
    lp.validate()?;
    let start = Instant::now();
    let mut solver = Simplex::new(lp);
    let outcome = solver.solve();
    let status = match outcome {
        Outcome::Optimal => Status::Optimal,
        Outcome::Infeasible => Status::Infeasible,
        Outcome::Unbounded => Status::Unbounded,
        Outcome::IterationLimit => Status::Limit,
    };
    if status != Status::Optimal {
        let mut r = SolveResult::without_solution(status, start.elapsed());
        r.iterations = solver.iterations;
        return Ok(r);
    }
    let objective = solver.objective();
    Ok(SolveResult {
        status,
        bound: objective.clone(),
        objective,
        values: solver.values(),
        duals: solver.duals(),
        nodes: 0,
        iterations: solver.iterations,
        elapsed: start.elapsed(),
    })
}

/// Solves `lp` with integrality enforced when it has integer variables.
pub fn solve<S: Scalar>(
    lp: &LinearProgram<S>,
    opts: &MipOptions<S>,
) -> Result<SolveResult<S>, LpError> {
    if lp.has_integers() {
        lp.validate()?;
        Ok(solve_mip(lp, opts))
    } else {
        solve_lp(lp)
    }
}
