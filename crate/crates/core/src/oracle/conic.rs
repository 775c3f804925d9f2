use serde::{Deserialize, Serialize};

use super::nnls::nnls_columns;
use super::simplex::{LinearProgram, LpStatus, Relation};
use crate::error::{Error, Result};
use crate::numerics::{dot, norm, Matrix, Real, Tolerances, Vector};

/// A finite set of nonzero rays, optionally with a base direction `g`
/// satisfying `<g, z_i> > 0` for every ray.
#[derive(Debug, Clone, PartialEq)]
pub struct RaySet<T> {
    dim: usize,
    rays: Vec<Vector<T>>,
    base: Option<Vector<T>>,
}

impl<T: Real> RaySet<T> {
    pub fn new(
        dim: usize,
        rays: Vec<Vector<T>>,
        base: Option<Vector<T>>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            if r.norm() <= tol.feas_eps {
                return Err(Error::DegenerateRay(i));
            }
        }
        let set = RaySet { dim, rays, base: None };
        match base {
            Some(g) => set.with_base(g, tol),
            None => Ok(set),
        }
    }

    /// Rays are the columns of `z`.
    pub fn from_columns(z: &Matrix<T>, base: Option<Vector<T>>, tol: &Tolerances<T>) -> Result<Self> {
        Self::new(z.rows(), z.columns(), base, tol)
    }

    /// Attaches a base after checking it against every ray.
    pub fn with_base(mut self, g: Vector<T>, tol: &Tolerances<T>) -> Result<Self> {
        if g.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: g.len(),
            });
        }
        if let Some(i) = self.rays.iter().position(|z| !base_ok(&g, z, tol)) {
            return Err(Error::InvalidBase(i));
        }
        self.base = Some(g);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn rays(&self) -> &[Vector<T>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &Vector<T> {
        &self.rays[i]
    }

    pub fn base(&self) -> Option<&Vector<T>> {
        self.base.as_ref()
    }

    /// The base if present, otherwise one computed by [`find_base`].
    pub fn base_or_find(&self, tol: &Tolerances<T>) -> Result<Vector<T>> {
        match &self.base {
            Some(g) => Ok(g.clone()),
            None => find_base(self, tol),
        }
    }

    /// Restriction to the given indices (base carried over).
    pub fn subset(&self, idx: &[usize]) -> Self {
        RaySet {
            dim: self.dim,
            rays: idx.iter().map(|&i| self.rays[i].clone()).collect(),
            base: self.base.clone(),
        }
    }
}

/// Scale-free test of `<g, z> > feas_eps` on the unit-normalized ray.
fn base_ok<T: Real>(g: &[T], z: &[T], tol: &Tolerances<T>) -> bool {
    dot(g, z) > tol.feas_eps * norm(z)
}

/// Outcome of a conic membership query, carrying a Farkas certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipCertificate<T> {
    pub inside: bool,
    /// Nonnegative coefficients with `query ~ sum lambda_i z_i` when inside.
    pub lambda: Option<Vector<T>>,
    /// Separator with `<v, query> = 1` and `<v, z_i> <= ~0` when outside.
    pub v: Option<Vector<T>>,
    pub theta: T,
    pub residual_norm: T,
}

/// Decides whether `query` lies in the conic hull of `generators`.
///
/// Generators and query are scaled to unit norm before the NNLS solve so
/// that the absolute tolerance `feas_eps` applies uniformly; coefficients and
/// separator are mapped back to the original scale.
pub fn conic_membership_of<T: Real>(
    generators: &[&[T]],
    query: &[T],
    tol: &Tolerances<T>,
) -> Result<MembershipCertificate<T>> {
    let qn = norm(query);
    if qn == T::zero() {
        return Ok(MembershipCertificate {
            inside: true,
            lambda: Some(Vector::zeros(generators.len())),
            v: None,
            theta: T::zero(),
            residual_norm: T::zero(),
        });
    }
    let norms: Vec<T> = generators.iter().map(|g| norm(g)).collect();
    let unit: Vec<Vec<T>> = generators
        .iter()
        .zip(&norms)
        .map(|(g, &gn)| g.iter().map(|&x| x / gn).collect())
        .collect();
    let refs: Vec<&[T]> = unit.iter().map(|u| u.as_slice()).collect();
    let qhat: Vec<T> = query.iter().map(|&x| x / qn).collect();
    let sol = nnls_columns(&refs, &qhat, tol)?;
    let rnorm = sol.residual.norm();

    if rnorm <= tol.feas_eps {
        let lambda: Vector<T> = sol
            .lambda
            .iter()
            .zip(&norms)
            .map(|(&l, &gn)| l * qn / gn)
            .collect();
        Ok(MembershipCertificate {
            inside: true,
            lambda: Some(lambda),
            v: None,
            theta: T::zero(),
            residual_norm: rnorm * qn,
        })
    } else {
        // <r, q> = ||r||^2 at the NNLS optimum; dividing by <r, q> makes
        // <v, q> = 1 hold to rounding.
        let rq = dot(&sol.residual, &qhat);
        let v: Vector<T> = sol.residual.iter().map(|&r| r / (rq * qn)).collect();
        Ok(MembershipCertificate {
            inside: false,
            lambda: None,
            v: Some(v),
            theta: T::one(),
            residual_norm: rnorm * qn,
        })
    }
}

/// Membership of `query` in the cone generated by the rays of `z`.
pub fn conic_membership<T: Real>(
    z: &RaySet<T>,
    query: &[T],
    tol: &Tolerances<T>,
) -> Result<MembershipCertificate<T>> {
    let refs: Vec<&[T]> = z.rays().iter().map(|r| r.as_slice()).collect();
    conic_membership_of(&refs, query, tol)
}

/// Finds `g` with `<g, z_i> > 0` for all rays by solving
/// `max t  s.t.  <g, z_i> >= t,  |g|_inf <= 1` on the unit-normalized rays.
///
/// The LP is solved in its dual form `min ||Z mu||_1` over the probability
/// simplex, which has only `n + 1` rows; `g` is read off the multipliers.
pub fn find_base<T: Real>(z: &RaySet<T>, tol: &Tolerances<T>) -> Result<Vector<T>> {
    let n = z.dim();
    let p = z.len();
    if p == 0 {
        return Ok(Vector::zeros(n));
    }
    let unit: Vec<Vec<T>> = z
        .rays()
        .iter()
        .map(|r| {
            let rn = r.norm();
            r.iter().map(|&x| x / rn).collect()
        })
        .collect();

    // Variables: mu (p), u (n), w (n). Rows: sum mu = 1; -Z mu + u - w = 0.
    let nv = p + 2 * n;
    let mut lp = LinearProgram::new(nv);
    for j in 0..n {
        lp.objective[p + j] = T::one();
        lp.objective[p + n + j] = T::one();
    }
    let mut row = vec![T::zero(); nv];
    row[..p].iter_mut().for_each(|x| *x = T::one());
    lp.add_row(row, Relation::Eq, T::one());
    for j in 0..n {
        let mut row = vec![T::zero(); nv];
        for (i, u) in unit.iter().enumerate() {
            row[i] = -u[j];
        }
        row[p + j] = T::one();
        row[p + n + j] = -T::one();
        lp.add_row(row, Relation::Eq, T::zero());
    }
    let sol = lp.solve(tol.lp_eps, tol.feas_eps)?;
    if sol.status != LpStatus::Optimal || sol.objective <= tol.feas_eps {
        return Err(Error::NotPointed);
    }
    let g: Vector<T> = sol.duals[1..].iter().copied().collect();
    if z.rays().iter().all(|r| base_ok(&g, r, tol)) {
        return Ok(g);
    }
    // Fall back to the mean direction when the multipliers are polluted by
    // rounding in a nearly flat cone.
    let mut mean = vec![T::zero(); n];
    for u in &unit {
        for (m, &x) in mean.iter_mut().zip(u) {
            *m += x;
        }
    }
    let mean = Vector::new(mean)?;
    if z.rays().iter().all(|r| base_ok(&mean, r, tol)) {
        return Ok(mean);
    }
    Err(Error::NotPointed)
}

/// Angular maximization oracle: indices in `candidates` attaining the max of
/// `<v, z_k> / <g, z_k>`, ties within `align_eps * max(1, |max|)` included.
pub fn amo<T: Real>(
    v: &[T],
    z: &RaySet<T>,
    g: &[T],
    candidates: &[usize],
    tol: &Tolerances<T>,
) -> Vec<usize> {
    let ratios: Vec<T> = candidates
        .iter()
        .map(|&k| dot(v, z.ray(k)) / dot(g, z.ray(k)))
        .collect();
    let best = ratios.iter().copied().fold(T::neg_infinity(), T::max);
    let slack = tol.align_eps * T::one().max(best.abs());
    candidates
        .iter()
        .zip(&ratios)
        .filter(|(_, &r)| r >= best - slack)
        .map(|(&k, _)| k)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn rays(v: &[&[f64]]) -> RaySet<f64> {
        let n = v[0].len();
        RaySet::new(n, v.iter().map(|r| Vector::from_f64(r)).collect(), None, &tol()).unwrap()
    }

    #[test]
    fn membership_quadrant() {
        let z = rays(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let c = conic_membership(&z, &[1.0, 1.0], &tol()).unwrap();
        assert!(c.inside);
        let l = c.lambda.unwrap();
        assert!((l[0] - 1.0).abs() < 1e-14 && (l[1] - 1.0).abs() < 1e-14);

        let c = conic_membership(&z, &[-1.0, 0.0], &tol()).unwrap();
        assert!(!c.inside);
        assert_eq!(c.theta, 1.0);
        let v = c.v.unwrap();
        assert!((v.dot(&[-1.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!(v.dot(z.ray(0)) <= 1e-9 && v.dot(z.ray(1)) <= 1e-9);
    }

    #[test]
    fn membership_shifted_example() {
        let z = rays(&[&[0.4, -0.8], &[-0.6, 0.2]]);
        let c = conic_membership(&z, &[0.1071, -0.0929], &tol()).unwrap();
        assert!(!c.inside);
    }

    #[test]
    fn base_quadrant_and_line() {
        let z = rays(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let g = find_base(&z, &tol()).unwrap();
        assert!(g[0] > 0.0 && g[1] > 0.0);
        let line = rays(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(find_base(&line, &tol()), Err(Error::NotPointed));
    }

    #[test]
    fn amo_ties_form_a_face() {
        let z = rays(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let g = [1.0, 1.0];
        assert_eq!(amo(&[1.0, 0.0], &z, &g, &[0, 1], &tol()), vec![0]);
        assert_eq!(amo(&[1.0, 1.0], &z, &g, &[0, 1], &tol()), vec![0, 1]);
        let z = rays(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        assert_eq!(amo(&[1.0, 0.0], &z, &g, &[0, 1, 2], &tol()), vec![0]);
    }

    #[test]
    fn zero_ray_rejected() {
        let r = RaySet::new(2, vec![Vector::from_f64(&[0.0, 0.0])], None, &tol());
        assert_eq!(r, Err(Error::DegenerateRay(0)));
    }
}
