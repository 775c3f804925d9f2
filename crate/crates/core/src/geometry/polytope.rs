use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::checks::hull_vertices;
use crate::error::{Error, Result};
use crate::extray::ext_ray_id;
use crate::numerics::{cosine, dot, norm, Matrix, Real, Tolerances, Vector};
use crate::oracle::{LinearProgram, LpStatus, RaySet, Relation};

/// Largest ambient dimension accepted by [`facet_enumerate`].
pub const MAX_FACET_DIM: usize = 4;

/// Gauge of `theta` with respect to `conv(columns of M)` extended
/// conically: `min 1'beta  s.t.  M beta = theta, beta >= 0`.
pub fn gauge_value<T: Real>(m: &Matrix<T>, theta: &[T], tol: &Tolerances<T>) -> Result<(T, Vector<T>)> {
    if theta.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: theta.len(),
        });
    }
    let p = m.cols();
    if theta.iter().all(|&t| t == T::zero()) {
        return Ok((T::zero(), Vector::zeros(p)));
    }
    let mut lp = LinearProgram::new(p);
    lp.objective = vec![T::one(); p];
    for (i, &t) in theta.iter().enumerate() {
        lp.add_row(m.row(i).to_vec(), Relation::Eq, t);
    }
    let sol = lp.solve(tol.lp_eps, tol.feas_eps)?;
    match sol.status {
        LpStatus::Optimal => Ok((sol.objective, Vector::new(sol.x)?)),
        _ => Err(Error::Infeasible),
    }
}

/// Facet description `{x : <h_i, x> <= b_i}` of a polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeHRep<T> {
    /// Unit outward normals.
    pub normals: Vec<Vector<T>>,
    pub offsets: Vec<T>,
    /// Points the description was built from, as columns.
    pub source_vertices: Option<Matrix<T>>,
    /// Columns of `source_vertices` that are vertices of the hull.
    pub vertices: Vec<usize>,
}

impl<T: Real> PolytopeHRep<T> {
    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn contains(&self, x: &[T], tol: &Tolerances<T>) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(h, &b)| dot(h, x) <= b + tol.feas_eps)
    }

    /// Rows `h_i`, for use with matrix routines.
    pub fn normal_matrix(&self) -> Result<Matrix<T>> {
        let rows: Vec<Vec<T>> = self.normals.iter().map(|h| h.to_vec()).collect();
        Matrix::from_rows(&rows)
    }
}

fn det<T: Real>(mut a: Vec<T>, k: usize) -> T {
    let mut d = T::one();
    for c in 0..k {
        let piv = (c..k)
            .max_by(|&i, &j| {
                a[i * k + c]
                    .abs()
                    .partial_cmp(&a[j * k + c].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(c);
        if a[piv * k + c] == T::zero() {
            return T::zero();
        }
        if piv != c {
            for j in 0..k {
                a.swap(c * k + j, piv * k + j);
            }
            d = -d;
        }
        d *= a[c * k + c];
        for r in c + 1..k {
            let f = a[r * k + c] / a[c * k + c];
            for j in c..k {
                let t = a[c * k + j];
                a[r * k + j] -= f * t;
            }
        }
    }
    d
}

/// Vector orthogonal to the `n - 1` given vectors in `R^n` (generalized
/// cross product by cofactor expansion).
fn cross<T: Real>(vs: &[Vector<T>], n: usize) -> Vec<T> {
    let k = n - 1;
    (0..n)
        .map(|col| {
            let mut minor = Vec::with_capacity(k * k);
            for v in vs {
                for (j, &x) in v.iter().enumerate() {
                    if j != col {
                        minor.push(x);
                    }
                }
            }
            let d = det(minor, k);
            if col % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

fn affine_rank<T: Real>(pts: &[Vector<T>], scale: T) -> usize {
    let mut basis: Vec<Vector<T>> = Vec::new();
    let thr = T::lit(1e-10) * scale.max(T::one());
    for p in &pts[1..] {
        let mut d = p.sub(&pts[0]);
        for b in &basis {
            let c = d.dot(b);
            d = d.sub(&b.scaled(c));
        }
        let dn = d.norm();
        if dn > thr {
            basis.push(d.scaled(T::one() / dn));
        }
    }
    basis.len()
}

fn combinations(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Brute-force facet enumeration of `conv(columns of v)`: every `n`-subset
/// of points spans a candidate hyperplane, kept (oriented outward) when all
/// points lie on one side.
pub fn facet_enumerate<T: Real>(v: &Matrix<T>, tol: &Tolerances<T>) -> Result<PolytopeHRep<T>> {
    let n = v.rows();
    if n == 0 || n > MAX_FACET_DIM {
        return Err(Error::InvalidArgument(format!(
            "facet enumeration supports 1 <= n <= {MAX_FACET_DIM}, got {n}"
        )));
    }
    let pts = v.columns();
    if pts.len() < n + 1 {
        return Err(Error::DegenerateDimension);
    }
    let scale = pts.iter().map(|p| p.max_abs()).fold(T::zero(), T::max);
    if affine_rank(&pts, scale) < n {
        return Err(Error::DegenerateDimension);
    }
    let side_eps = tol.feas_eps * scale.max(T::one());
    let dedup_eps = T::lit(1e-8);
    let mut normals: Vec<Vector<T>> = Vec::new();
    let mut offsets: Vec<T> = Vec::new();
    combinations(pts.len(), n, |sub| {
        let diffs: Vec<Vector<T>> = sub[1..].iter().map(|&i| pts[i].sub(&pts[sub[0]])).collect();
        let h = cross(&diffs, n);
        let hn = norm(&h);
        if hn <= T::lit(1e-12) * scale.max(T::one()).powi(n as i32 - 1) {
            return;
        }
        let mut h: Vector<T> = h.iter().map(|&x| x / hn).collect();
        let mut b = h.dot(&pts[sub[0]]);
        let vals: Vec<T> = pts.iter().map(|p| h.dot(p) - b).collect();
        if vals.iter().all(|&s| s <= side_eps) {
        } else if vals.iter().all(|&s| s >= -side_eps) {
            h = h.scaled(-T::one());
            b = -b;
        } else {
            return;
        }
        let dup = normals.iter().zip(&offsets).any(|(g, &c)| {
            g.sub(&h).max_abs() <= dedup_eps && (c - b).abs() <= dedup_eps * scale.max(T::one())
        });
        if !dup {
            normals.push(h);
            offsets.push(b);
        }
    });
    let vertices = hull_vertices(v, tol);
    Ok(PolytopeHRep {
        normals,
        offsets,
        source_vertices: Some(v.clone()),
        vertices,
    })
}

/// Face structure of a polytope `K` seen from a point `y`. Vertex sets are
/// 0-based column indices into `K.source_vertices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceReport<T> {
    /// Gauge of `y` with respect to `K`.
    pub xi: T,
    /// Facets active at `y / xi`.
    pub j: Vec<usize>,
    /// Active facets with positive offset.
    pub j1: Vec<usize>,
    /// Vertices on some facet in `j1`.
    pub msh: Vec<usize>,
    /// Nonzero vertices sharing an active facet with `y`.
    pub w: Vec<usize>,
    /// Vertices of the face cut out by all facets in `j`.
    pub f_vertices: Vec<usize>,
    /// Gauge of `y` with respect to the polyhedron of inactive facets
    /// (`+inf` when unbounded in the direction of `y`).
    pub xi_minus_y: T,
    /// Vertices whose shifted rays `v - y` are extreme.
    pub x_extreme: Vec<usize>,
    /// False when the shifted rays do not form a pointed cone.
    pub x_extreme_available: bool,
    /// `0` interior to `K`, `y` outside `K`, `y` not a multiple of a vertex,
    /// and `xi_minus_y < 1`.
    pub hypotheses: bool,
}

/// Computes the face objects of `K` relative to `y`.
pub fn face_report<T: Real>(k: &PolytopeHRep<T>, y: &[T], tol: &Tolerances<T>) -> Result<FaceReport<T>> {
    let src = k
        .source_vertices
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("polytope has no source vertices".into()))?;
    let verts = &k.vertices;
    let vm = src.select_columns(verts);
    let xi = match gauge_value(&vm, y, tol) {
        Ok((xi, _)) => xi,
        Err(Error::Infeasible) => return Err(Error::NotInPos),
        Err(e) => return Err(e),
    };
    let ynorm = norm(y);
    let act_eps = T::lit(10.0) * tol.feas_eps * T::one().max(ynorm);
    let m = k.len();
    let active = |pt: &[T], s: T| -> BTreeSet<usize> {
        (0..m)
            .filter(|&i| (dot(&k.normals[i], pt) - k.offsets[i] * s).abs() <= act_eps)
            .collect()
    };
    let j = active(y, xi);
    let j1: BTreeSet<usize> = j.iter().copied().filter(|&i| k.offsets[i] > tol.feas_eps).collect();
    let on_facet = |v: &[T], i: usize| (dot(&k.normals[i], v) - k.offsets[i]).abs() <= act_eps;

    let cols: Vec<Vector<T>> = verts.iter().map(|&i| src.column(i)).collect();
    let mut msh = Vec::new();
    let mut w = Vec::new();
    let mut f_vertices = Vec::new();
    for (vi, v) in verts.iter().zip(&cols) {
        if j1.iter().any(|&i| on_facet(v, i)) {
            msh.push(*vi);
        }
        if j.iter().all(|&i| on_facet(v, i)) {
            f_vertices.push(*vi);
        }
        if v.norm() > tol.feas_eps {
            if let Ok((xv, _)) = gauge_value(&vm, v, tol) {
                if active(v, xv).intersection(&j).next().is_some() {
                    w.push(*vi);
                }
            }
        }
    }

    let mut xi_minus_y = T::zero();
    for i in (0..m).filter(|i| !j.contains(i)) {
        let hy = dot(&k.normals[i], y);
        let r = if k.offsets[i] > T::zero() {
            (hy / k.offsets[i]).max(T::zero())
        } else if hy > tol.feas_eps {
            T::infinity()
        } else {
            T::zero()
        };
        xi_minus_y = xi_minus_y.max(r);
    }

    let shifted: Vec<(usize, Vector<T>)> = verts
        .iter()
        .zip(&cols)
        .filter(|(_, v)| v.norm() > tol.feas_eps)
        .map(|(&i, v)| (i, v.sub(y)))
        .collect();
    let (x_extreme, x_extreme_available) = match RaySet::new(
        y.len(),
        shifted.iter().map(|(_, r)| r.clone()).collect(),
        None,
        tol,
    )
    .and_then(|z| ext_ray_id(&z, tol))
    {
        Ok(r) => (r.kept.iter().map(|&k| shifted[k].0).collect(), true),
        Err(_) => (Vec::new(), false),
    };

    let zero_interior = k.offsets.iter().all(|&b| b > tol.feas_eps);
    let vertex_multiple = ynorm > T::zero()
        && cols
            .iter()
            .any(|v| v.norm() > tol.feas_eps && cosine(v, y) >= T::one() - tol.align_eps);
    let hypotheses = zero_interior
        && xi > T::one() + act_eps
        && !vertex_multiple
        && xi_minus_y < T::one();

    Ok(FaceReport {
        xi,
        j: j.into_iter().collect(),
        j1: j1.into_iter().collect(),
        msh,
        w,
        f_vertices,
        xi_minus_y,
        x_extreme,
        x_extreme_available,
        hypotheses,
    })
}
