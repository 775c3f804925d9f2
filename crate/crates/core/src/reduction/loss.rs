use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{dot, Matrix, Real, Tolerances, Vector};

/// Loss family together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LossKind<T> {
    /// `||u - y||^2`
    LeastSquares,
    /// `u'Au - 2b'u + c`, reference point `y = A^-1 b`.
    Mahalanobis { a: Matrix<T>, b: Vector<T>, c: T },
    /// `||u - y||_q^q`
    LqQ { q: T },
    /// Bregman divergence of `F(u) = ||u||_q^q` from `y`.
    BregmanQ { q: T },
}

/// A loss with the constants that define its admissible regularization
/// interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossSpec<T> {
    pub kind: LossKind<T>,
    /// Reference point (the minimizer of the loss).
    pub y: Vector<T>,
    /// Scaling applied to `y` when forming the shifted rays.
    pub alpha: T,
    pub gamma: T,
    pub psi_l: T,
    pub psi_h: T,
    /// Skip the `(1 - gamma) eta <= M` side of the interval; valid for convex
    /// losses with `h` taken from `(1 - gamma)` times the subdifferential at 0.
    pub drop_lower: bool,
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec("alpha must be positive".into()))
    }
}

fn check_q<T: Real>(q: T) -> Result<()> {
    if q >= T::lit(2.0) && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec("q must be at least 2".into()))
    }
}

impl<T: Real> LossSpec<T> {
    pub fn least_squares(y: Vector<T>, alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(LossSpec {
            kind: LossKind::LeastSquares,
            psi_h: y.norm_sq(),
            y,
            alpha,
            gamma: T::lit(0.5),
            psi_l: T::zero(),
            drop_lower: true,
        })
    }

    pub fn mahalanobis(a: Matrix<T>, b: Vector<T>, c: T, alpha: T, tol: &Tolerances<T>) -> Result<Self> {
        check_alpha(alpha)?;
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                expected: a.rows(),
                found: b.len(),
            });
        }
        if b.max_abs() == T::zero() {
            return Err(Error::InvalidSpec("b must be nonzero".into()));
        }
        if !a.is_symmetric(tol.feas_eps) {
            return Err(Error::SingularA);
        }
        let y = a.cholesky_solve(&b)?;
        let bab = dot(&b, &y);
        Ok(LossSpec {
            kind: LossKind::Mahalanobis { a, b, c },
            y,
            alpha,
            gamma: T::lit(0.5),
            psi_l: c - bab,
            psi_h: c,
            drop_lower: true,
        })
    }

    pub fn lqq(y: Vector<T>, q: T, alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        check_q(q)?;
        let two = T::lit(2.0);
        Ok(LossSpec {
            kind: LossKind::LqQ { q },
            psi_h: y.norm_q(q).powf(q),
            y,
            alpha,
            gamma: T::one() / (two * q - two),
            psi_l: T::zero(),
            drop_lower: true,
        })
    }

    pub fn bregman(y: Vector<T>, q: T, alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        check_q(q)?;
        Ok(LossSpec {
            kind: LossKind::BregmanQ { q },
            psi_h: (q - T::one()) * y.norm_q(q).powf(q),
            y,
            alpha,
            gamma: T::one() / q,
            psi_l: T::zero(),
            drop_lower: true,
        })
    }

    pub fn with_psi_h(mut self, psi_h: T) -> Self {
        self.psi_h = psi_h;
        self
    }

    pub fn with_gamma(mut self, gamma: T) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&gamma) {
            return Err(Error::InvalidGamma);
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: T) -> Result<Self> {
        check_alpha(alpha)?;
        self.alpha = alpha;
        Ok(self)
    }

    pub fn q(&self) -> Option<T> {
        match self.kind {
            LossKind::LqQ { q } | LossKind::BregmanQ { q } => Some(q),
            _ => None,
        }
    }

    /// The linear minorant slope `h` and the conjugate value
    /// `(f_gamma)^*(h) = -psi_h` used by the interval evaluator.
    ///
    /// For the `q`-families the slope is `(1 - gamma)` times the gradient
    /// surrogate `-q ||y||_q^{q-2} y` at the origin, which yields the closed
    /// form bounds of [`super::eta_max_lqq`] and [`super::eta_max_bregman`].
    pub fn h_and_conj(&self) -> (Vector<T>, T) {
        let one_m_g = T::one() - self.gamma;
        match &self.kind {
            LossKind::LeastSquares => (self.y.scaled(-T::one()), -self.psi_h),
            LossKind::Mahalanobis { b, c, .. } => (b.scaled(-T::one()), -*c),
            LossKind::LqQ { q } | LossKind::BregmanQ { q } => {
                let s = *q * self.y.norm_q(*q).powf(*q - T::lit(2.0));
                (self.y.scaled(-one_m_g * s), -self.psi_h)
            }
        }
    }

    /// `-grad f(0)`, whose largest inner product with a column is the
    /// regularization weight above which zero is the unique solution.
    pub fn neg_grad_at_zero(&self) -> Vector<T> {
        let two = T::lit(2.0);
        match &self.kind {
            LossKind::LeastSquares => self.y.scaled(two),
            LossKind::Mahalanobis { b, .. } => b.scaled(two),
            LossKind::LqQ { q } | LossKind::BregmanQ { q } => self
                .y
                .iter()
                .map(|&yj| *q * yj.abs().powf(*q - two) * yj)
                .collect(),
        }
    }
}
