//! Gauges, facet descriptions and face objects of small polytopes, and the
//! data-condition checkers used before a reduction is trusted.

mod checks;
mod polytope;

pub use checks::{
    hull_vertices, interior_screen, tangent_necessary_check, vertex_noncover_check,
    NoncoverResult, INTERIOR_MARGIN,
};
pub use polytope::{face_report, facet_enumerate, gauge_value, FaceReport, PolytopeHRep, MAX_FACET_DIM};
