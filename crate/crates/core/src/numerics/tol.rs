use serde::{Deserialize, Serialize};

use super::Real;

/// Absolute tolerances calibrated to unit-scale data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances<T> {
    /// Feasibility / residual threshold.
    pub feas_eps: T,
    /// Allowed deviation of a cosine from 1 for two rays to count as aligned.
    pub align_eps: T,
    /// Threshold on |beta_i| for support membership.
    pub support_eps: T,
    /// Simplex pivot and reduced-cost threshold, also the NNLS dual threshold.
    pub lp_eps: T,
}

impl<T: Real> Default for Tolerances<T> {
    /// The nominal defaults (1e-9, 1e-10, 1e-8, 1e-10), floored at small
    /// multiples of machine epsilon so that single precision stays usable.
    fn default() -> Self {
        let eps = T::epsilon();
        let floor = |x: f64, k: f64| T::lit(x).max(eps * T::lit(k));
        Tolerances {
            feas_eps: floor(1e-9, 64.0),
            align_eps: floor(1e-10, 16.0),
            support_eps: floor(1e-8, 256.0),
            lp_eps: floor(1e-10, 32.0),
        }
    }
}

impl<T: Real> Tolerances<T> {
    pub fn is_valid(&self) -> bool {
        let z = T::zero();
        self.feas_eps > z
            && self.align_eps > z
            && self.support_eps > z
            && self.lp_eps > z
            && self.support_eps > self.feas_eps
    }
}
