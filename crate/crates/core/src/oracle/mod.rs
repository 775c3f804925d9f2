//! Conic-hull membership with Farkas certificates, base-direction search and
//! the angular maximization oracle, plus the NNLS and simplex solvers they
//! rest on.

mod conic;
mod nnls;
mod qr;
pub mod simplex;

pub use conic::{amo, conic_membership, conic_membership_of, find_base, MembershipCertificate, RaySet};
pub use nnls::{nnls, nnls_columns, NnlsSolution};
pub use simplex::{LinearProgram, LpSolution, LpStatus, Relation};
