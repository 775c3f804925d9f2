use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{axpy, dot, Matrix, Real, Tolerances, Vector};

/// Sweep-to-sweep change below which coordinate descent stops.
pub const CD_CHANGE_TOL: f64 = 1e-10;
/// Cap on coordinate-descent sweeps.
pub const CD_MAX_SWEEPS: usize = 100_000;
/// Tolerance of the optimality check run on every exit.
pub const KKT_TOL: f64 = 1e-6;

/// Output of a solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult<T> {
    pub beta: Vector<T>,
    pub objective: T,
    /// Indices with `|beta_i| > support_eps` (0-based).
    pub support: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    /// Optimality conditions verified at exit.
    pub kkt_ok: bool,
}

impl<T: Real> SolveResult<T> {
    /// Error if the solver stopped early or failed its optimality check.
    pub fn certified(self) -> Result<Self> {
        if self.converged && self.kkt_ok {
            Ok(self)
        } else {
            Err(Error::NotConverged)
        }
    }
}

/// Column-major copy of a design with cached squared norms.
#[derive(Debug, Clone)]
pub struct Design<T> {
    pub n: usize,
    pub cols: Vec<Vec<T>>,
    pub sq: Vec<T>,
}

impl<T: Real> Design<T> {
    pub fn new(x: &Matrix<T>) -> Self {
        let cols: Vec<Vec<T>> = x.columns().into_iter().map(Vector::into_vec).collect();
        let sq = cols.iter().map(|c| dot(c, c)).collect();
        Design { n: x.rows(), cols, sq }
    }

    pub fn p(&self) -> usize {
        self.cols.len()
    }

    pub fn residual(&self, y: &[T], beta: &[T]) -> Vec<T> {
        let mut r = y.to_vec();
        for (c, &b) in self.cols.iter().zip(beta) {
            if b != T::zero() {
                axpy(-b, c, &mut r);
            }
        }
        r
    }
}

pub(crate) fn support_of<T: Real>(beta: &[T], eps: T) -> Vec<usize> {
    beta.iter()
        .enumerate()
        .filter(|(_, b)| b.abs() > eps)
        .map(|(i, _)| i)
        .collect()
}

fn sweep<T: Real>(d: &Design<T>, idx: &[usize], eta: T, beta: &mut [T], r: &mut [T]) -> T {
    let two = T::lit(2.0);
    let mut max_change = T::zero();
    for &i in idx {
        let sq = d.sq[i];
        if sq == T::zero() {
            continue;
        }
        let g = two * (dot(&d.cols[i], r) + sq * beta[i]);
        let new = ((g - eta) / (two * sq)).max(T::zero());
        let delta = new - beta[i];
        if delta != T::zero() {
            axpy(-delta, &d.cols[i], r);
            beta[i] = new;
            max_change = max_change.max(delta.abs());
        }
    }
    max_change
}

/// Coordinate descent for `min ||X beta - y||^2 + eta 1'beta, beta >= 0`
/// on a prepared design, optionally warm-started and restricted to a subset
/// of columns (the others are held at zero).
pub fn cd_solve<T: Real>(
    d: &Design<T>,
    y: &[T],
    eta: T,
    restrict: Option<&[usize]>,
    warm: Option<&[T]>,
    tol: &Tolerances<T>,
) -> SolveResult<T> {
    let p = d.p();
    let allowed: Vec<usize> = match restrict {
        Some(r) => r.to_vec(),
        None => (0..p).collect(),
    };
    let mut beta = vec![T::zero(); p];
    if let Some(w) = warm {
        for &i in &allowed {
            beta[i] = w[i].max(T::zero());
        }
    }
    let mut r = d.residual(y, &beta);
    let change_tol = T::lit(CD_CHANGE_TOL);
    let mut sweeps = 0usize;
    let mut converged = false;
    // Full sweeps alternate with sweeps over the current nonzeros until a
    // full sweep moves nothing.
    while sweeps < CD_MAX_SWEEPS {
        let change = sweep(d, &allowed, eta, &mut beta, &mut r);
        sweeps += 1;
        if change < change_tol {
            converged = true;
            break;
        }
        let active: Vec<usize> = allowed.iter().copied().filter(|&i| beta[i] > T::zero()).collect();
        while sweeps < CD_MAX_SWEEPS {
            let c = sweep(d, &active, eta, &mut beta, &mut r);
            sweeps += 1;
            if c < change_tol {
                break;
            }
        }
    }
    let r = d.residual(y, &beta);
    let objective = dot(&r, &r) + eta * beta.iter().copied().sum::<T>();
    let kkt_tol = T::lit(KKT_TOL);
    let two = T::lit(2.0);
    let kkt_ok = allowed.iter().all(|&i| {
        let grad = -two * dot(&d.cols[i], &r) + eta;
        if beta[i] > T::zero() {
            grad.abs() <= kkt_tol
        } else {
            grad >= -kkt_tol
        }
    });
    SolveResult {
        support: support_of(&beta, tol.support_eps),
        beta: Vector::new(beta).expect("finite iterate"),
        objective,
        iterations: sweeps,
        converged,
        kkt_ok,
    }
}

/// Nonnegative lasso `min ||X beta - y||^2 + eta 1'beta, beta >= 0` by
/// cyclic coordinate descent.
pub fn nn_lasso_cd<T: Real>(
    x: &Matrix<T>,
    y: &[T],
    eta: T,
    restrict: Option<&[usize]>,
    tol: &Tolerances<T>,
) -> Result<SolveResult<T>> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            found: y.len(),
        });
    }
    if let Some(&bad) = restrict.and_then(|r| r.iter().find(|&&i| i >= x.cols())) {
        return Err(Error::InvalidArgument(format!("restrict index {bad} out of range")));
    }
    Ok(cd_solve(&Design::new(x), y, eta, restrict, None, tol))
}

/// Folds a nonnegative solution on `[-X X]` into signed coefficients.
pub(crate) fn fold_signed<T: Real>(b: &[T]) -> Vec<T> {
    let p = b.len() / 2;
    (0..p).map(|i| b[p + i] - b[i]).collect()
}

/// Signed lasso `min ||X beta - y||^2 + eta ||beta||_1` solved as a
/// nonnegative lasso on `[-X X]`.
pub fn lasso_symmetrized<T: Real>(x: &Matrix<T>, y: &[T], eta: T, tol: &Tolerances<T>) -> Result<SolveResult<T>> {
    let sym = crate::numerics::symmetrize_design(x);
    let r = nn_lasso_cd(&sym, y, eta, None, tol)?;
    Ok(signed_result(x, y, eta, r, tol))
}

pub(crate) fn signed_result<T: Real>(
    x: &Matrix<T>,
    y: &[T],
    eta: T,
    r: SolveResult<T>,
    tol: &Tolerances<T>,
) -> SolveResult<T> {
    let beta = fold_signed(&r.beta);
    let res = x.mul_vec(&beta).sub(y);
    let objective = res.norm_sq() + eta * beta.iter().map(|b| b.abs()).sum::<T>();
    SolveResult {
        support: support_of(&beta, tol.support_eps),
        beta: Vector::new(beta).expect("finite"),
        objective,
        iterations: r.iterations,
        converged: r.converged,
        kkt_ok: r.kkt_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional() {
        let t = Tolerances::default();
        let x = Matrix::<f64>::from_columns_f64(2, &[&[1.0, 0.0]]);
        let r = nn_lasso_cd(&x, &[1.0, 0.0], 1.0, None, &t).unwrap();
        assert!((r.beta[0] - 0.5).abs() < 1e-12);
        assert!((r.objective - 0.75).abs() < 1e-12);
        assert!(r.converged && r.kkt_ok);
        let r = nn_lasso_cd(&x, &[1.0, 0.0], 2.0, None, &t).unwrap();
        assert_eq!(r.beta[0], 0.0);
        assert!(r.support.is_empty());
    }

    #[test]
    fn signed_coefficient() {
        let t = Tolerances::default();
        let x = Matrix::<f64>::from_columns_f64(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let r = lasso_symmetrized(&x, &[-1.0, 0.0], 0.1, &t).unwrap();
        assert!((r.beta[0] + 0.95).abs() < 1e-10);
        assert_eq!(r.support, vec![0]);
    }
}
