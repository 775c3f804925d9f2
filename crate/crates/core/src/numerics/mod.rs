//! Dense linear algebra primitives, tolerances, CSV I/O and the
//! counter-based random generator.

mod io;
mod matrix;
mod real;
mod rng;
mod tol;

pub use io::{fmt_f64, read_matrix_csv, read_vector_csv, write_matrix_csv, write_vector_csv};
pub use matrix::{
    axpy, cosine, dot, norm, normalize_columns, normalize_vector, symmetrize_design, Matrix,
    Vector,
};
pub use real::Real;
pub use rng::{Rng, Sampler};
pub use tol::Tolerances;

/// Draws `len` standard normals; see [`Rng::draw_gaussian`].
pub fn rng_draw_gaussian<T: Real>(rng: &Rng, len: usize) -> (Vector<T>, Rng) {
    rng.draw_gaussian(len)
}
