use crate::error::{Error, Result};
use crate::numerics::{normalize_columns, normalize_vector, Matrix, Rng, Tolerances, Vector};
use crate::oracle::RaySet;

/// Synthetic regression data with unit-norm columns and response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix<f64>,
    pub y: Vector<f64>,
    /// Planted coefficients (before normalization of `X`); zero for
    /// pure-noise data.
    pub beta: Vector<f64>,
}

/// Gaussian design, `k`-sparse unit-norm coefficients on a random support,
/// `y = X beta + sigma eps`; then columns and `y` are normalized. A negative
/// `sigma` produces a pure-noise response. Returns the advanced generator.
pub fn gen_synthetic(n: usize, p: usize, sigma: f64, k: usize, rng: &Rng) -> (Dataset, Rng) {
    let mut s = rng.sampler();
    let cols: Vec<Vector<f64>> = (0..p).map(|_| s.gaussian_vec(n)).collect();
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    let x = Matrix::from_columns(n, &refs).expect("finite draws");
    let mut beta = Vector::zeros(p);
    let y_raw = if sigma < 0.0 {
        s.gaussian_vec(n)
    } else {
        let support = s.choose(p, k.min(p));
        let vals: Vector<f64> = s.gaussian_vec(support.len());
        let vals = normalize_vector(&vals).unwrap_or(vals);
        for (&i, &v) in support.iter().zip(vals.iter()) {
            beta[i] = v;
        }
        let eps: Vector<f64> = s.gaussian_vec(n);
        x.mul_vec(&beta).add(&eps.scaled(sigma))
    };
    let tol = Tolerances::default();
    let x = normalize_columns(&x, &tol).unwrap_or(x);
    let y = normalize_vector(&y_raw).unwrap_or(y_raw);
    let next = s.state(rng);
    (Dataset { x, y, beta }, next)
}

/// A pointed cone in `R^n` with exactly `s` extreme rays: `s` points on the
/// unit sphere of `R^(n-1)` lifted to height 1, plus `p - s` random strict
/// convex combinations of them, in random order. The base is `e_n`.
pub fn planted_cone(n: usize, p: usize, s: usize, rng: &Rng) -> Result<RaySet<f64>> {
    if n < 2 || s == 0 || s > p || (n == 2 && s > 2) {
        return Err(Error::InvalidArgument(format!(
            "cannot plant {s} extreme rays among {p} in dimension {n}"
        )));
    }
    let mut sm = rng.sampler();
    let lift = |v: &Vector<f64>| -> Vector<f64> {
        let mut w = v.to_vec();
        w.push(1.0);
        Vector::new(w).expect("finite")
    };
    let verts: Vec<Vector<f64>> = if n == 2 {
        [-1.0, 1.0][..s].iter().map(|&x| Vector::from_f64(&[x, 1.0])).collect()
    } else {
        (0..s).map(|_| lift(&sm.unit_sphere(n - 1))).collect()
    };
    let mut rays = verts.clone();
    for _ in s..p {
        let w: Vec<f64> = (0..s).map(|_| -(1.0 - sm.uniform::<f64>()).ln() + 1e-3).collect();
        let total: f64 = w.iter().sum();
        let scale = 0.5 + sm.uniform::<f64>();
        let mut r = vec![0.0; n];
        for (v, &wi) in verts.iter().zip(&w) {
            for (ri, &vi) in r.iter_mut().zip(v.iter()) {
                *ri += scale * wi / total * vi;
            }
        }
        rays.push(Vector::new(r).expect("finite"));
    }
    let order = sm.permutation(p);
    let rays: Vec<Vector<f64>> = order.iter().map(|&i| rays[i].clone()).collect();
    let mut g = vec![0.0; n];
    g[n - 1] = 1.0;
    RaySet::new(n, rays, Some(Vector::new(g)?), &Tolerances::default())
}
