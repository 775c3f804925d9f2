use super::cd::{support_of, SolveResult};
use crate::error::Result;
use crate::geometry::gauge_value;
use crate::numerics::{Matrix, Real, Tolerances};

/// `min 1'beta  s.t.  X beta = y, beta >= 0` by the two-phase simplex;
/// returns an optimal basic solution.
pub fn constrained_gauge<T: Real>(x: &Matrix<T>, y: &[T], tol: &Tolerances<T>) -> Result<SolveResult<T>> {
    let (objective, beta) = gauge_value(x, y, tol)?;
    Ok(SolveResult {
        support: support_of(&beta, tol.support_eps),
        beta,
        objective,
        iterations: 0,
        converged: true,
        kkt_ok: true,
    })
}
