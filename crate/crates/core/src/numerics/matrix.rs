use std::ops::{Deref, DerefMut, Index, IndexMut};

use serde::{Deserialize, Serialize};

use super::{Real, Tolerances};
use crate::error::{Error, Result};

/// Dense vector with finite entries.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector<T>(Vec<T>);

impl<T: Real> Vector<T> {
    /// Builds a vector, rejecting NaN and infinite entries.
    pub fn new(data: Vec<T>) -> Result<Self> {
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Vector(data))
    }

    /// Builds a vector from `f64` literals; panics on non-finite input.
    pub fn from_f64(data: &[f64]) -> Self {
        Vector::new(data.iter().map(|&x| T::lit(x)).collect()).expect("finite literals")
    }

    pub fn zeros(len: usize) -> Self {
        Vector(vec![T::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn dot(&self, other: &[T]) -> T {
        dot(&self.0, other)
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }

    pub fn norm_sq(&self) -> T {
        dot(&self.0, &self.0)
    }

    /// The l_q norm for q >= 1.
    pub fn norm_q(&self, q: T) -> T {
        self.0.iter().map(|x| x.abs().powf(q)).sum::<T>().powf(T::one() / q)
    }

    pub fn scaled(&self, c: T) -> Self {
        Vector(self.0.iter().map(|&x| x * c).collect())
    }

    pub fn sub(&self, other: &[T]) -> Self {
        Vector(self.0.iter().zip(other).map(|(&a, &b)| a - b).collect())
    }

    pub fn add(&self, other: &[T]) -> Self {
        Vector(self.0.iter().zip(other).map(|(&a, &b)| a + b).collect())
    }

    pub fn max_abs(&self) -> T {
        self.0.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

impl<T> Deref for Vector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for Vector<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> From<Vector<T>> for Vec<T> {
    fn from(v: Vector<T>) -> Vec<T> {
        v.0
    }
}

impl<T: Real> FromIterator<T> for Vector<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Vector(iter.into_iter().collect())
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut s = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

pub fn norm<T: Real>(a: &[T]) -> T {
    let scale = a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    let s: T = a.iter().map(|&x| (x / scale) * (x / scale)).sum();
    scale * s.sqrt()
}

/// `y += a * x`
pub fn axpy<T: Real>(a: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Cosine of the angle between two nonzero vectors.
pub fn cosine<T: Real>(a: &[T], b: &[T]) -> T {
    dot(a, b) / (norm(a) * norm(b))
}

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    /// Builds a matrix from rows of equal length.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Builds an `n x p` matrix whose columns are the given vectors.
    pub fn from_columns(n: usize, columns: &[&[T]]) -> Result<Self> {
        let p = columns.len();
        let mut m = Self::zeros(n, p);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
            for (i, &x) in c.iter().enumerate() {
                m.data[i * p + j] = x;
            }
        }
        Self::new(n, p, m.data)
    }

    /// Columns given as `f64` literals, for examples and tests.
    pub fn from_columns_f64(n: usize, columns: &[&[f64]]) -> Self {
        let cols: Vec<Vec<T>> = columns
            .iter()
            .map(|c| c.iter().map(|&x| T::lit(x)).collect())
            .collect();
        let refs: Vec<&[T]> = cols.iter().map(|c| c.as_slice()).collect();
        Self::from_columns(n, &refs).expect("valid literal columns")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: T) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vector<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[T]) -> Vector<T> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `A^T v`
    pub fn tr_mul_vec(&self, v: &[T]) -> Vector<T> {
        assert_eq!(v.len(), self.rows, "tr_mul_vec dimension");
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            axpy(vi, self.row(i), &mut out);
        }
        Vector(out)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (k, &j) in idx.iter().enumerate() {
                m.data[i * idx.len() + k] = self.get(i, j);
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    /// Solves `A x = b` for symmetric positive definite `A` by Cholesky.
    pub fn cholesky_solve(&self, b: &[T]) -> Result<Vector<T>> {
        let n = self.rows;
        if self.cols != n || b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let mut l = vec![T::zero(); n * n];
        let scale = self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let tiny = T::epsilon() * T::lit(64.0) * scale.max(T::min_positive_value());
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if s <= tiny {
                        return Err(Error::SingularA);
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        let mut z = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let t = l[i * n + k] * z[k];
                z[i] -= t;
            }
            z[i] /= l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = l[k * n + i] * z[k];
                z[i] -= t;
            }
            z[i] /= l[i * n + i];
        }
        Ok(Vector(z))
    }

    /// Converts element type through `f64`.
    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| U::lit(x.to_f64_lossy())).collect(),
        }
    }
}

impl<T: Real> Vector<T> {
    pub fn cast<U: Real>(&self) -> Vector<U> {
        self.0.iter().map(|x| U::lit(x.to_f64_lossy())).collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Scales every column to unit Euclidean norm.
pub fn normalize_columns<T: Real>(x: &Matrix<T>, tol: &Tolerances<T>) -> Result<Matrix<T>> {
    let mut out = x.clone();
    for j in 0..x.cols() {
        let nrm = norm(&x.column(j));
        if nrm < tol.feas_eps {
            return Err(Error::ZeroColumn(j));
        }
        for i in 0..x.rows() {
            out[(i, j)] = x[(i, j)] / nrm;
        }
    }
    Ok(out)
}

/// Returns `[-X X]`.
pub fn symmetrize_design<T: Real>(x: &Matrix<T>) -> Matrix<T> {
    let (n, p) = (x.rows(), x.cols());
    let mut out = Matrix::zeros(n, 2 * p);
    for i in 0..n {
        for j in 0..p {
            out[(i, j)] = -x[(i, j)];
            out[(i, p + j)] = x[(i, j)];
        }
    }
    out
}

/// Scales a vector to unit norm; returns `None` for the zero vector.
pub fn normalize_vector<T: Real>(v: &[T]) -> Option<Vector<T>> {
    let nrm = norm(v);
    (nrm > T::zero()).then(|| v.iter().map(|&x| x / nrm).collect())
}
