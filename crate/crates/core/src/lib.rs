//! Persistent feature reduction for nonnegative, gauge-regularized linear
//! models.
//!
//! Given a design `X` and a reference point `y`, the columns whose shifted
//! rays `x_i - alpha * y` are extreme in the cone they generate form a
//! superset of the support of every optimal solution, for every loss and
//! regularization weight satisfying the admissibility conditions. This crate
//! computes that set output-sensitively, evaluates the admissible
//! regularization interval per loss family, and ships the reference solvers
//! and geometric checkers used to verify the guarantee.
//!
//! All numeric code is generic over [`numerics::Real`] (`f32` or `f64`);
//! the aliases below fix the scalar to `f64`.

pub mod error;
pub mod experiments;
pub mod extray;
pub mod geometry;
pub mod json;
pub mod numerics;
pub mod oracle;
pub mod reduction;
pub mod solver;

pub use error::{Error, Result};
pub use numerics::Real;

pub type Matrix = numerics::Matrix<f64>;
pub type Vector = numerics::Vector<f64>;
pub type Tolerances = numerics::Tolerances<f64>;
pub type RaySet = oracle::RaySet<f64>;
pub type MembershipCertificate = oracle::MembershipCertificate<f64>;
pub type ExtremeRaySet = extray::ExtremeRaySet;
pub type LossSpec = reduction::LossSpec<f64>;
pub type EtaInterval = reduction::EtaInterval<f64>;
pub type ReductionReport = reduction::ReductionReport<f64>;
pub type PolytopeHRep = geometry::PolytopeHRep<f64>;
pub type FaceReport = geometry::FaceReport<f64>;
pub type SolveResult = solver::SolveResult<f64>;
pub type CvResult = solver::CvResult<f64>;

pub type Matrix32 = numerics::Matrix<f32>;
pub type Vector32 = numerics::Vector<f32>;
pub type Tolerances32 = numerics::Tolerances<f32>;
pub type RaySet32 = oracle::RaySet<f32>;
