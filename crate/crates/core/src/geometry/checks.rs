use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::{norm, Matrix, Real, Tolerances, Vector};
use crate::oracle::conic_membership_of;

/// Per-point outcome of the vertex non-cover check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoncoverResult {
    /// `per_index[i]`: column `i` differs from `y` and is a vertex of the
    /// hull of all columns together with `y`.
    pub per_index: Vec<bool>,
    /// `y` itself is a vertex of that hull.
    pub y_vertex: bool,
    pub overall: bool,
}

fn lift<T: Real>(x: &[T]) -> Vec<T> {
    let mut v = x.to_vec();
    v.push(T::one());
    v
}

/// `points[i]` lies in the convex hull of the other points.
fn in_hull_of_others<T: Real>(points: &[Vec<T>], i: usize, tol: &Tolerances<T>) -> bool {
    let gens: Vec<&[T]> = points
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, p)| p.as_slice())
        .collect();
    conic_membership_of(&gens, &points[i], tol)
        .map(|c| c.inside)
        .unwrap_or(false)
}

/// Indices of the points (columns of `v`) that are vertices of their convex
/// hull. Of several coincident points only the lowest index can qualify.
pub fn hull_vertices<T: Real>(v: &Matrix<T>, tol: &Tolerances<T>) -> Vec<usize> {
    let cols = v.columns();
    let mut distinct: Vec<usize> = Vec::new();
    for (i, c) in cols.iter().enumerate() {
        if !distinct.iter().any(|&k| norm(&c.sub(&cols[k])) <= tol.feas_eps) {
            distinct.push(i);
        }
    }
    let lifted: Vec<Vec<T>> = distinct.iter().map(|&i| lift(&cols[i])).collect();
    let flags: Vec<bool> = (0..distinct.len())
        .into_par_iter()
        .map(|k| !in_hull_of_others(&lifted, k, tol))
        .collect();
    distinct
        .into_iter()
        .zip(flags)
        .filter(|(_, f)| *f)
        .map(|(i, _)| i)
        .collect()
}

/// Checks that every column of `x` and the point `y` are distinct vertices of
/// the convex hull of all of them.
pub fn vertex_noncover_check<T: Real>(x: &Matrix<T>, y: &[T], tol: &Tolerances<T>) -> NoncoverResult {
    let cols = x.columns();
    let mut lifted: Vec<Vec<T>> = cols.iter().map(|c| lift(c)).collect();
    lifted.push(lift(y));
    let p = cols.len();
    let flags: Vec<bool> = (0..=p)
        .into_par_iter()
        .map(|i| !in_hull_of_others(&lifted, i, tol))
        .collect();
    let coincide: Vec<bool> = cols.iter().map(|c| norm(&c.sub(y)) <= tol.feas_eps).collect();
    let per_index: Vec<bool> = (0..p).map(|i| flags[i] && !coincide[i]).collect();
    let y_vertex = flags[p] && !coincide.iter().any(|&c| c);
    NoncoverResult {
        overall: y_vertex && per_index.iter().all(|&f| f),
        per_index,
        y_vertex,
    }
}

/// Necessary condition for non-cover: for each `i`, the direction
/// `x_i - y` must not point into the tangent cone of `conv X` at `x_i`.
/// Returns `true` per index when the test passes.
pub fn tangent_necessary_check<T: Real>(x: &Matrix<T>, y: &[T], tol: &Tolerances<T>) -> Vec<bool> {
    let cols = x.columns();
    (0..cols.len())
        .into_par_iter()
        .map(|i| {
            let q = cols[i].sub(y);
            if q.norm() <= tol.feas_eps {
                return false;
            }
            let diffs: Vec<Vector<T>> = cols
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, c)| c.sub(&cols[i]))
                .filter(|d| d.norm() > tol.feas_eps)
                .collect();
            let gens: Vec<&[T]> = diffs.iter().map(|d| d.as_slice()).collect();
            conic_membership_of(&gens, &q, tol)
                .map(|c| !c.inside)
                .unwrap_or(false)
        })
        .collect()
}

/// Scaling margin used by [`interior_screen`].
pub const INTERIOR_MARGIN: f64 = 1e-6;

/// Columns certified removable because a slightly scaled copy still lies in
/// `conv({0} ∪ other columns)`; such columns vanish in every optimum.
pub fn interior_screen<T: Real>(x: &Matrix<T>, tol: &Tolerances<T>) -> Vec<usize> {
    let cols = x.columns();
    let n = x.rows();
    let scale = T::one() + T::lit(INTERIOR_MARGIN);
    (0..cols.len())
        .into_par_iter()
        .filter(|&i| {
            if cols[i].norm() <= tol.feas_eps {
                return false;
            }
            let mut gens: Vec<Vec<T>> = cols
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, c)| lift(c))
                .collect();
            gens.push(lift(&vec![T::zero(); n]));
            let refs: Vec<&[T]> = gens.iter().map(|g| g.as_slice()).collect();
            let q = lift(&cols[i].scaled(scale));
            conic_membership_of(&refs, &q, tol)
                .map(|c| c.inside)
                .unwrap_or(false)
        })
        .collect()
}
