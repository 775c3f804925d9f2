use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cd::{cd_solve, fold_signed, Design};
use crate::error::{Error, Result};
use crate::numerics::{symmetrize_design, Matrix, Real, Rng, Tolerances, Vector};

/// Decades spanned by the cross-validation grid.
pub const CV_GRID_DECADES: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult<T> {
    /// Strictly descending.
    pub eta_grid: Vec<T>,
    pub cv_mse: Vec<T>,
    /// Standard error of the fold MSEs at each grid point.
    pub cv_se: Vec<T>,
    pub eta_cv: T,
    pub eta_1se: T,
    pub folds: usize,
}

/// `n_eta` log-spaced weights from `2 ||X'y||_inf` down three decades.
pub fn eta_grid<T: Real>(x: &Matrix<T>, y: &[T], n_eta: usize) -> Result<Vec<T>> {
    let top = T::lit(2.0) * x.tr_mul_vec(y).max_abs();
    if top.is_nan() || top <= T::zero() || n_eta == 0 {
        return Err(Error::InvalidArgument("empty or degenerate weight grid".into()));
    }
    if n_eta == 1 {
        return Ok(vec![top]);
    }
    Ok((0..n_eta)
        .map(|k| {
            let e = -CV_GRID_DECADES * k as f64 / (n_eta - 1) as f64;
            top * T::lit(10f64.powf(e))
        })
        .collect())
}

/// Warm-started signed-lasso path over a descending grid.
pub fn lasso_path<T: Real>(x: &Matrix<T>, y: &[T], grid: &[T], tol: &Tolerances<T>) -> Vec<Vector<T>> {
    let d = Design::new(&symmetrize_design(x));
    let mut warm: Option<Vec<T>> = None;
    grid.iter()
        .map(|&eta| {
            let r = cd_solve(&d, y, eta, None, warm.as_deref(), tol);
            let signed = fold_signed(&r.beta);
            warm = Some(r.beta.into_vec());
            Vector::new(signed).expect("finite path")
        })
        .collect()
}

/// K-fold cross-validation of the signed lasso.
///
/// Each fold fits on its training rows with the weight rescaled by
/// `n_train / n`, so that the per-observation penalty matches the full-data
/// grid, and scores `||X_test beta - y_test||^2 / n_test`.
pub fn kfold_cv<T: Real>(
    x: &Matrix<T>,
    y: &[T],
    folds: usize,
    n_eta: usize,
    rng: &Rng,
    tol: &Tolerances<T>,
) -> Result<CvResult<T>> {
    let n = x.rows();
    if folds < 2 || folds > n {
        return Err(Error::InvalidArgument(format!("folds must lie in 2..={n}")));
    }
    let grid = eta_grid(x, y, n_eta)?;
    let (perm, _) = rng.permutation(n);
    let mut fold_of = vec![0usize; n];
    for (t, &i) in perm.iter().enumerate() {
        fold_of[i] = t % folds;
    }
    let nt = T::from_usize_lossy(n);

    let per_fold: Vec<Vec<T>> = (0..folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != f).collect();
            let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == f).collect();
            let xtr = x.select_rows(&train);
            let ytr: Vec<T> = train.iter().map(|&i| y[i]).collect();
            let xte = x.select_rows(&test);
            let yte: Vec<T> = test.iter().map(|&i| y[i]).collect();
            let d = Design::new(&symmetrize_design(&xtr));
            let scale = T::from_usize_lossy(train.len()) / nt;
            let mut warm: Option<Vec<T>> = None;
            grid.iter()
                .map(|&eta| {
                    let r = cd_solve(&d, &ytr, eta * scale, None, warm.as_deref(), tol);
                    let beta = fold_signed(&r.beta);
                    warm = Some(r.beta.into_vec());
                    let res = xte.mul_vec(&beta).sub(&yte);
                    res.norm_sq() / T::from_usize_lossy(test.len())
                })
                .collect()
        })
        .collect();

    let kf = T::from_usize_lossy(folds);
    let mut cv_mse = Vec::with_capacity(grid.len());
    let mut cv_se = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let vals: Vec<T> = per_fold.iter().map(|m| m[k]).collect();
        let mean = vals.iter().copied().sum::<T>() / kf;
        let var = vals.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / (kf - T::one());
        cv_mse.push(mean);
        cv_se.push((var / kf).sqrt());
    }
    let best = (0..grid.len()).fold(0, |b, k| if cv_mse[k] < cv_mse[b] { k } else { b });
    let limit = cv_mse[best] + cv_se[best];
    let one_se = (0..grid.len()).find(|&k| cv_mse[k] <= limit).unwrap_or(best);
    Ok(CvResult {
        eta_cv: grid[best],
        eta_1se: grid[one_se],
        eta_grid: grid,
        cv_mse,
        cv_se,
        folds,
    })
}
