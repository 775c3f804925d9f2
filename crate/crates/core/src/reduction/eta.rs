use serde::{Deserialize, Serialize};

use super::loss::{LossKind, LossSpec};
use crate::error::{Error, Result};
use crate::numerics::{dot, norm, Matrix, Real, Rng, Tolerances, Vector};

/// Admissible regularization weights `lower <= eta < upper` (or `<= upper`
/// when `upper_inclusive`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaInterval<T> {
    pub lower: T,
    pub upper: T,
    pub upper_inclusive: bool,
    /// The slope `h` the interval was evaluated at.
    pub h_used: Vector<T>,
    pub valid: bool,
}

impl<T: Real> EtaInterval<T> {
    pub fn contains(&self, eta: T) -> bool {
        eta >= self.lower && (eta < self.upper || (self.upper_inclusive && eta <= self.upper))
    }
}

fn max_inner<T: Real>(x: &Matrix<T>, v: &[T]) -> T {
    x.tr_mul_vec(v).iter().copied().fold(T::neg_infinity(), T::max)
}

/// `2 ||y|| - 2 max_i <y, x_i>` for unit-norm columns.
pub fn eta_max_unit_sphere<T: Real>(x: &Matrix<T>, y: &[T], tol: &Tolerances<T>) -> Result<T> {
    let unit_tol = T::lit(1e-6).max(tol.feas_eps);
    for j in 0..x.cols() {
        if (x.column(j).norm() - T::one()).abs() > unit_tol {
            return Err(Error::NotNormalized(j));
        }
    }
    let two = T::lit(2.0);
    Ok(two * norm(y) - two * max_inner(x, y))
}

/// `2 alpha ||y||^2 - 2 max_i <y, x_i>`
pub fn eta_max_ls<T: Real>(x: &Matrix<T>, y: &[T], alpha: T) -> T {
    let two = T::lit(2.0);
    two * alpha * dot(y, y) - two * max_inner(x, y)
}

/// `2 alpha b'A^-1 b - 2 max_i <b, x_i>`
pub fn eta_max_mahalanobis<T: Real>(x: &Matrix<T>, spec: &LossSpec<T>) -> Result<T> {
    let LossKind::Mahalanobis { a, b, .. } = &spec.kind else {
        return Err(Error::InvalidSpec("not a Mahalanobis loss".into()));
    };
    let two = T::lit(2.0);
    let bab = dot(b, &a.cholesky_solve(b)?);
    Ok(two * spec.alpha * bab - two * max_inner(x, b))
}

/// `||y||_q^{q-2} (alpha (2q-2) ||y||_q^2 - q (2q-3) max_i <y, x_i>)`
pub fn eta_max_lqq<T: Real>(x: &Matrix<T>, y: &Vector<T>, alpha: T, q: T) -> T {
    let two = T::lit(2.0);
    let yq = y.norm_q(q);
    yq.powf(q - two) * (alpha * (two * q - two) * yq * yq - q * (two * q - T::lit(3.0)) * max_inner(x, y))
}

/// `q (q-1) ||y||_q^{q-2} (alpha ||y||_q^2 - max_i <y, x_i>)`
pub fn eta_max_bregman<T: Real>(x: &Matrix<T>, y: &Vector<T>, alpha: T, q: T) -> T {
    let two = T::lit(2.0);
    let yq = y.norm_q(q);
    q * (q - T::one()) * yq.powf(q - two) * (alpha * yq * yq - max_inner(x, y))
}

/// `2 max_i <x_i, y>`: above this weight zero is the unique least-squares
/// solution.
pub fn eta_zero_threshold_ls<T: Real>(x: &Matrix<T>, y: &[T]) -> T {
    T::lit(2.0) * max_inner(x, y)
}

/// Zero-solution threshold `max_i <x_i, -grad f(0)>` for any loss family.
pub fn eta_zero_threshold<T: Real>(x: &Matrix<T>, spec: &LossSpec<T>) -> T {
    max_inner(x, &spec.neg_grad_at_zero())
}

/// Solves the pair of conditions
/// `(1 - gamma) eta <= M` and `M < alpha (-conj - psi_l) - gamma eta`,
/// with `M = max_i <x_i, -h>`, for `eta >= 0`.
pub fn eta_interval_general<T: Real>(
    x: &Matrix<T>,
    h: &Vector<T>,
    conj_value: T,
    spec: &LossSpec<T>,
) -> Result<EtaInterval<T>> {
    let gamma = spec.gamma;
    if !(gamma >= T::zero() && gamma <= T::one()) {
        return Err(Error::InvalidGamma);
    }
    let neg_h = h.scaled(-T::one());
    let m = max_inner(x, &neg_h);
    let rhs = spec.alpha * (-conj_value - spec.psi_l);
    let lower = T::zero();
    let mut upper = T::infinity();
    let mut inclusive = false;
    let mut empty = false;

    if gamma > T::zero() {
        upper = (rhs - m) / gamma;
    } else if m >= rhs || m.is_nan() || rhs.is_nan() {
        empty = true;
    }
    if !spec.drop_lower {
        if gamma < T::one() {
            let u1 = m / (T::one() - gamma);
            if u1 < upper {
                upper = u1;
                inclusive = true;
            }
        } else if m < T::zero() {
            empty = true;
        }
    }
    if empty {
        upper = lower;
        inclusive = false;
    }
    Ok(EtaInterval {
        lower,
        upper,
        upper_inclusive: inclusive,
        h_used: h.clone(),
        valid: lower < upper,
    })
}

/// Interval for the loss in `spec`, from its own slope and conjugate value.
pub fn eta_interval<T: Real>(x: &Matrix<T>, spec: &LossSpec<T>) -> Result<EtaInterval<T>> {
    let (h, conj) = spec.h_and_conj();
    eta_interval_general(x, &h, conj, spec)
}

/// Improved least-squares bound as a function of an auxiliary point `v`.
fn phi<T: Real>(x: &Matrix<T>, y: &[T], v: &[T]) -> T {
    let two = T::lit(2.0);
    let d: Vec<T> = y.iter().zip(v).map(|(&a, &b)| a - b).collect();
    let r = two * max_inner(x, &d);
    let yy = dot(y, y);
    let vv = dot(v, v);
    if yy >= vv + r {
        r
    } else {
        let s = (r + vv - yy).max(T::zero()).sqrt();
        let t = vv.sqrt() + s;
        yy - t * t
    }
}

fn compass<T: Real>(x: &Matrix<T>, y: &[T], start: Vec<T>, step0: T, min_step: T) -> (T, Vec<T>) {
    let mut v = start;
    let mut best = phi(x, y, &v);
    let mut step = step0;
    let mut evals = 0usize;
    while step >= min_step && evals < 200_000 {
        let mut improved = false;
        for k in 0..v.len() {
            for sgn in [T::one(), -T::one()] {
                let mut w = v.clone();
                w[k] += sgn * step;
                let f = phi(x, y, &w);
                evals += 1;
                if f > best {
                    best = f;
                    v = w;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= T::lit(0.5);
        }
    }
    (best, v)
}

/// Easy and improved least-squares bounds on the admissible weight.
///
/// Returns `(eta_easy, eta_best, v_best)`. The improved bound maximizes a
/// nonconcave function of `v`: a dense grid with local refinement when
/// `n = 1`, otherwise a 200-start compass search (a heuristic). `v = 0`
/// is always a start and attains `eta_easy`, so `eta_best >= eta_easy`.
pub fn eta_ls_optimized<T: Real>(x: &Matrix<T>, y: &Vector<T>) -> (T, T, Vector<T>) {
    let n = y.len();
    let two = T::lit(2.0);
    let r0 = two * max_inner(x, y);
    let yy = y.norm_sq();
    let eta_easy = r0.min(two * yy - r0);
    let min_step = T::lit(1e-8).max(T::epsilon() * T::lit(16.0));
    let scale = T::one().max(y.norm());

    let mut best = (phi(x, y, &vec![T::zero(); n]), vec![T::zero(); n]);
    let mut consider = |cand: (T, Vec<T>)| {
        if cand.0 > best.0 {
            best = cand;
        }
    };
    if n == 1 {
        let radius = two * y.norm() + r0.abs().sqrt() + T::one();
        let steps = 20_000usize;
        let mut grid_best = (T::neg_infinity(), T::zero());
        for s in 0..=steps {
            let v = -radius + two * radius * T::from_usize_lossy(s) / T::from_usize_lossy(steps);
            let f = phi(x, y, &[v]);
            if f > grid_best.0 {
                grid_best = (f, v);
            }
        }
        let h = two * radius / T::from_usize_lossy(steps);
        let fine = T::lit(1e-13).max(T::epsilon() * T::lit(16.0)) * scale;
        consider(compass(x, y, vec![grid_best.1], h, fine));
        consider(compass(x, y, vec![T::zero()], h, fine));
    } else {
        let mut sampler = Rng::new(0).sampler();
        consider(compass(x, y, vec![T::zero(); n], scale * T::lit(0.5), min_step));
        for s in 1..200 {
            let start: Vec<T> = if s < 20 {
                let t = T::lit(-2.0 + 4.0 * (s as f64) / 20.0);
                y.scaled(t).into_vec()
            } else {
                sampler.gaussian_vec::<T>(n).scaled(scale).into_vec()
            };
            consider(compass(x, y, start, scale * T::lit(0.5), min_step));
        }
    }
    let (f, v) = best;
    (eta_easy, f.max(eta_easy), Vector::new(v).expect("finite search point"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn appendix_one_dimensional() {
        let x = Matrix::<f64>::from_columns_f64(1, &[&[1.0]]);
        let (easy, best, v) = eta_ls_optimized(&x, &Vector::from_f64(&[5.0]));
        assert_eq!(easy, 10.0);
        assert!((best - 16.0).abs() < 1e-6, "{best}");
        assert!((v[0] + 3.0).abs() < 1e-6, "{v:?}");
    }

    #[test]
    fn ls_example() {
        let x = Matrix::<f64>::from_columns_f64(2, &[&[1.0, 0.0], &[0.0, 1.0], &[0.6, 0.8]]);
        let e = eta_max_ls(&x, &[2.0, 1.0], 1.0 / 5f64.sqrt());
        assert!((e - (2.0 * 5f64.sqrt() - 4.0)).abs() < 1e-12);
    }
}
