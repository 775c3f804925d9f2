//! Persistent reduction end to end: shifted rays, admissible regularization
//! intervals per loss family, and the final report.

mod eta;
mod loss;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use eta::{
    eta_interval, eta_interval_general, eta_ls_optimized, eta_max_bregman, eta_max_lqq,
    eta_max_ls, eta_max_mahalanobis, eta_max_unit_sphere, eta_zero_threshold,
    eta_zero_threshold_ls, EtaInterval,
};
pub use loss::{LossKind, LossSpec};

use crate::error::{Error, Result};
use crate::extray::{ext_ray_id, ExtremeRaySet};
use crate::geometry::{vertex_noncover_check, NoncoverResult};
use crate::numerics::{dot, Matrix, Real, Tolerances, Vector};
use crate::oracle::RaySet;

/// Rays `x_i - alpha y`. The base `-y` is used when it is valid, otherwise
/// one is searched for.
pub fn shifted_rays<T: Real>(x: &Matrix<T>, y: &[T], alpha: T, tol: &Tolerances<T>) -> Result<RaySet<T>> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            found: y.len(),
        });
    }
    let rays: Vec<Vector<T>> = x
        .columns()
        .into_iter()
        .map(|c| c.iter().zip(y).map(|(&a, &b)| a - alpha * b).collect())
        .collect();
    let set = RaySet::new(x.rows(), rays, None, tol)?;
    let neg_y: Vector<T> = y.iter().map(|&v| -v).collect();
    let ok = set
        .rays()
        .iter()
        .all(|z| dot(&neg_y, z) > tol.feas_eps * z.norm());
    let g = if ok { neg_y } else { crate::oracle::find_base(&set, tol)? };
    set.with_base(g, tol)
}

/// Why a reduction's guarantee does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Violation {
    VertexNoncover,
    EtaOutOfInterval,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Violation::VertexNoncover => "vertex-noncover",
            Violation::EtaOutOfInterval => "eta-out-of-interval",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport<T> {
    /// Columns that may carry nonzero weight in an optimum (0-based).
    pub kept: Vec<usize>,
    pub eta: T,
    pub interval: EtaInterval<T>,
    pub noncover_ok: bool,
    pub noncover: NoncoverResult,
    pub alpha: T,
    pub ray_stats: ExtremeRaySet,
    /// Above this weight zero is the unique solution, so `kept` may be
    /// treated as empty.
    pub eta_zero_threshold: T,
    pub zero_solution: bool,
    pub violations: Vec<Violation>,
    pub wall_time: Duration,
}

impl<T: Real> ReductionReport<T> {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn check(&self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::ConditionViolated(v.to_string())),
        }
    }
}

/// Computes the kept column set and checks the conditions under which it
/// contains the support of every optimum at weight `eta`.
///
/// Condition failures are reported in `violations`, not as errors; errors
/// are reserved for inputs on which the rays cannot be formed.
pub fn persistent_reduce<T: Real>(
    x: &Matrix<T>,
    spec: &LossSpec<T>,
    eta: T,
    tol: &Tolerances<T>,
) -> Result<ReductionReport<T>> {
    let start = Instant::now();
    let y_scaled = spec.y.scaled(spec.alpha);
    let (noncover, rays) = rayon::join(
        || vertex_noncover_check(x, &y_scaled, tol),
        || shifted_rays(x, &spec.y, spec.alpha, tol).and_then(|z| ext_ray_id(&z, tol)),
    );
    let ray_stats = rays?;
    let interval = eta_interval(x, spec)?;
    let thr = eta_zero_threshold(x, spec);

    let mut violations = Vec::new();
    if !noncover.overall {
        violations.push(Violation::VertexNoncover);
    }
    if !interval.contains(eta) {
        violations.push(Violation::EtaOutOfInterval);
    }
    Ok(ReductionReport {
        kept: ray_stats.kept.clone(),
        eta,
        interval,
        noncover_ok: noncover.overall,
        noncover,
        alpha: spec.alpha,
        ray_stats,
        eta_zero_threshold: thr,
        zero_solution: eta > thr,
        violations,
        wall_time: start.elapsed(),
    })
}
