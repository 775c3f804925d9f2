use super::qr::least_squares;
use crate::error::{Error, Result};
use crate::numerics::{axpy, dot, Matrix, Real, Tolerances, Vector};

/// Solution of a nonnegative least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution<T> {
    pub lambda: Vector<T>,
    /// `b - A lambda`
    pub residual: Vector<T>,
}

/// `min ||A lambda - b||` subject to `lambda >= 0`, with `A` given as a
/// matrix.
pub fn nnls<T: Real>(a: &Matrix<T>, b: &[T], tol: &Tolerances<T>) -> Result<NnlsSolution<T>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let cols = a.columns();
    let refs: Vec<&[T]> = cols.iter().map(|c| c.as_slice()).collect();
    nnls_columns(&refs, b, tol)
}

/// Lawson-Hanson active-set NNLS over a list of columns.
///
/// The entering index is the largest dual component, ties broken by lowest
/// index. A column that is numerically dependent on the passive set, or whose
/// unconstrained coefficient comes out nonpositive on entry, is blocked until
/// the iterate next changes. The total number of inner steps is capped at
/// `50 * cols`.
pub fn nnls_columns<T: Real>(
    cols: &[&[T]],
    b: &[T],
    tol: &Tolerances<T>,
) -> Result<NnlsSolution<T>> {
    let k = cols.len();
    let n = b.len();
    let mut x = vec![T::zero(); k];
    let mut residual = b.to_vec();
    if k == 0 {
        return Ok(NnlsSolution {
            lambda: Vector::zeros(0),
            residual: Vector::new(residual)?,
        });
    }
    if let Some(c) = cols.iter().find(|c| c.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }

    let col_max = cols
        .iter()
        .map(|c| crate::numerics::norm(c))
        .fold(T::zero(), T::max);
    let dual_tol = tol.lp_eps * T::one().max(col_max * crate::numerics::norm(b));

    let cap = 50 * k.max(1);
    let mut steps = 0usize;
    let mut passive = vec![false; k];
    let mut blocked = vec![false; k];

    loop {
        let w: Vec<T> = cols.iter().map(|c| dot(c, &residual)).collect();
        let mut entering: Option<usize> = None;
        for j in 0..k {
            if passive[j] || blocked[j] || w[j] <= dual_tol {
                continue;
            }
            if entering.is_none_or(|e| w[j] > w[e]) {
                entering = Some(j);
            }
        }
        let Some(j) = entering else { break };
        passive[j] = true;

        let mut first = true;
        loop {
            steps += 1;
            if steps > cap {
                return Err(Error::MaxIterations("nnls"));
            }
            let idx: Vec<usize> = (0..k).filter(|&i| passive[i]).collect();
            let sub: Vec<&[T]> = idx.iter().map(|&i| cols[i]).collect();
            let z = match least_squares(&sub, b) {
                Some(z) => z,
                None if first => {
                    passive[j] = false;
                    blocked[j] = true;
                    break;
                }
                None => return Err(Error::MaxIterations("nnls (rank loss)")),
            };
            if first {
                let pos = idx.iter().position(|&i| i == j).unwrap_or(0);
                if z[pos] <= T::zero() {
                    passive[j] = false;
                    blocked[j] = true;
                    break;
                }
            }
            first = false;
            if z.iter().all(|&zi| zi > T::zero()) {
                for (&i, &zi) in idx.iter().zip(&z) {
                    x[i] = zi;
                }
                blocked.iter_mut().for_each(|f| *f = false);
                break;
            }
            // Step back to the boundary of the feasible region.
            let mut alpha = T::infinity();
            let mut hit = idx[0];
            for (&i, &zi) in idx.iter().zip(&z) {
                if zi <= T::zero() {
                    let a = x[i] / (x[i] - zi);
                    if a < alpha {
                        alpha = a;
                        hit = i;
                    }
                }
            }
            for (&i, &zi) in idx.iter().zip(&z) {
                let xi = x[i];
                x[i] = xi + alpha * (zi - xi);
            }
            x[hit] = T::zero();
            for &i in &idx {
                if x[i] <= T::zero() {
                    x[i] = T::zero();
                    passive[i] = false;
                }
            }
            blocked.iter_mut().for_each(|f| *f = false);
        }
        residual.copy_from_slice(b);
        for (i, c) in cols.iter().enumerate() {
            if x[i] != T::zero() {
                axpy(-x[i], c, &mut residual);
            }
        }
    }
    Ok(NnlsSolution {
        lambda: Vector::new(x)?,
        residual: Vector::new(residual)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn identity_exact() {
        let a = Matrix::<f64>::from_columns_f64(2, &[&[1.0, 0.0], &[0.0, 1.0]]);
        let s = nnls(&a, &[2.0, 3.0], &tol()).unwrap();
        assert_eq!(s.lambda.as_slice(), &[2.0, 3.0]);
        assert!(s.residual.norm() < 1e-15);
    }

    #[test]
    fn sign_blocked() {
        let a = Matrix::<f64>::from_columns_f64(2, &[&[1.0, 0.0]]);
        let s = nnls(&a, &[-1.0, 0.0], &tol()).unwrap();
        assert_eq!(s.lambda.as_slice(), &[0.0]);
        assert_eq!(s.residual.as_slice(), &[-1.0, 0.0]);
    }

    #[test]
    fn boundary_optimum() {
        let a = Matrix::<f64>::from_columns_f64(2, &[&[1.0, 0.0], &[1.0, 1.0]]);
        let s = nnls(&a, &[0.0, 1.0], &tol()).unwrap();
        assert!(s.lambda[0].abs() < 1e-14);
        assert!((s.lambda[1] - 0.5).abs() < 1e-14);
        assert!((s.residual[0] + 0.5).abs() < 1e-14);
        assert!((s.residual[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn no_columns() {
        let s = nnls_columns::<f64>(&[], &[1.0, 2.0], &tol()).unwrap();
        assert!(s.lambda.is_empty());
        assert_eq!(s.residual.as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn single_precision() {
        let t = Tolerances::<f32>::default();
        let a = Matrix::<f32>::from_columns_f64(2, &[&[1.0, 0.0], &[1.0, 1.0]]);
        let s = nnls(&a, &[0.0, 1.0], &t).unwrap();
        assert!((s.lambda[1] - 0.5).abs() < 1e-6);
    }
}
