//! Instance generators and independent oracles shared by the integration
//! tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use persist_core::numerics::Sampler;
use persist_core::{Matrix, RaySet, Tolerances, Vector};

pub fn tol() -> Tolerances {
    Tolerances::default()
}

pub fn from_cols(n: usize, cols: &[Vector]) -> Matrix {
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    Matrix::from_columns(n, &refs).unwrap()
}

/// `p` independent uniform points on the unit sphere of `R^n`, as columns.
pub fn sphere_matrix(s: &mut Sampler, n: usize, p: usize) -> Matrix {
    let cols: Vec<Vector> = (0..p).map(|_| s.unit_sphere(n)).collect();
    from_cols(n, &cols)
}

/// Rays from the open halfspace `<g, z> > 0.05 |z|` for a random unit `g`,
/// with occasional positive multiples of earlier rays.
pub fn random_pointed_cone(s: &mut Sampler, n: usize, p: usize) -> (RaySet, Vector) {
    let g: Vector = s.unit_sphere(n);
    let mut rays: Vec<Vector> = Vec::with_capacity(p);
    while rays.len() < p {
        if !rays.is_empty() && s.uniform::<f64>() < 0.1 {
            let j = s.index(rays.len());
            let c = s.uniform_in(0.2, 3.0);
            rays.push(rays[j].scaled(c));
            continue;
        }
        let mut z: Vector = s.gaussian_vec(n);
        let d = z.dot(&g);
        if d.abs() < 0.05 * z.norm() {
            continue;
        }
        if d < 0.0 {
            z = z.scaled(-1.0);
        }
        rays.push(z);
    }
    (RaySet::new(n, rays, None, &tol()).unwrap(), g)
}

/// Extreme rays of a pointed planar cone by sorting angles around an
/// interior direction.
pub fn angular_extremes(z: &RaySet) -> BTreeSet<usize> {
    assert_eq!(z.dim(), 2);
    let mut c = [0.0, 0.0];
    for r in z.rays() {
        let nr = r.norm();
        c[0] += r[0] / nr;
        c[1] += r[1] / nr;
    }
    let ang: Vec<f64> = z
        .rays()
        .iter()
        .map(|r| (c[0] * r[1] - c[1] * r[0]).atan2(c[0] * r[0] + c[1] * r[1]))
        .collect();
    let lo = ang.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ang.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..ang.len())
        .filter(|&i| (ang[i] - lo).abs() < 1e-9 || (ang[i] - hi).abs() < 1e-9)
        .collect()
}

pub fn set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}

pub fn subset(a: &[usize], b: &[usize]) -> bool {
    set(a).is_subset(&set(b))
}
