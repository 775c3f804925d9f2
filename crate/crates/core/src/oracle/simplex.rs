//! Dense two-phase tableau simplex with Bland's anti-cycling rule.

use super::qr::solve_square;
use crate::error::{Error, Result};
use crate::numerics::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// `min c^T x` subject to row constraints and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub n_vars: usize,
    pub objective: Vec<T>,
    pub rows: Vec<(Vec<T>, Relation, T)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub objective: T,
    /// Simplex multipliers, one per original row (zero for rows found
    /// redundant). Sign convention: `c - A^T y >= 0` on nonbasic columns.
    pub duals: Vec<T>,
    pub pivots: usize,
}

impl<T: Real> LinearProgram<T> {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram {
            n_vars,
            objective: vec![T::zero(); n_vars],
            rows: Vec::new(),
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<T>, rel: Relation, rhs: T) {
        assert_eq!(coeffs.len(), self.n_vars, "row length");
        self.rows.push((coeffs, rel, rhs));
    }

    /// Solves with pivot / reduced-cost threshold `eps` and phase-one
    /// feasibility threshold `feas`.
    pub fn solve(&self, eps: T, feas: T) -> Result<LpSolution<T>> {
        Tableau::build(self).run(self, eps, feas)
    }
}

struct Tableau<T> {
    m: usize,
    width: usize,
    /// Row-major `m x (width + 1)`; last column is the right-hand side.
    t: Vec<T>,
    basis: Vec<usize>,
    n_struct: usize,
    first_art: usize,
    sign: Vec<T>,
    row_of: Vec<usize>,
    a_std: Vec<Vec<T>>,
}

impl<T: Real> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let m = lp.rows.len();
        let n = lp.n_vars;
        // Normalize so every right-hand side is nonnegative; a homogeneous
        // `>=` row is flipped to `<=` so its slack can start basic.
        let mut rows = Vec::with_capacity(m);
        let mut sign = Vec::with_capacity(m);
        for (a, rel, b) in &lp.rows {
            let flip = *b < T::zero() || (*b == T::zero() && *rel == Relation::Ge);
            if flip {
                let rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                rows.push((a.iter().map(|&x| -x).collect::<Vec<T>>(), rel, -*b));
                sign.push(-T::one());
            } else {
                rows.push((a.clone(), *rel, *b));
                sign.push(T::one());
            }
        }
        let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let first_art = n + n_slack;
        let width = first_art + n_art;
        let stride = width + 1;
        let mut t = vec![T::zero(); m * stride];
        let mut basis = vec![0; m];
        let mut a_std = Vec::with_capacity(m);
        let (mut s, mut a_idx) = (n, first_art);
        for (i, (a, rel, b)) in rows.iter().enumerate() {
            let row = &mut t[i * stride..(i + 1) * stride];
            row[..n].copy_from_slice(a);
            row[width] = *b;
            match rel {
                Relation::Le => {
                    row[s] = T::one();
                    basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -T::one();
                    s += 1;
                    row[a_idx] = T::one();
                    basis[i] = a_idx;
                    a_idx += 1;
                }
                Relation::Eq => {
                    row[a_idx] = T::one();
                    basis[i] = a_idx;
                    a_idx += 1;
                }
            }
            a_std.push(row[..width].to_vec());
        }
        Tableau {
            m,
            width,
            t,
            basis,
            n_struct: n,
            first_art,
            sign,
            row_of: (0..m).collect(),
            a_std,
        }
    }

    fn stride(&self) -> usize {
        self.width + 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let st = self.stride();
        let p = self.t[r * st + c];
        for j in 0..st {
            self.t[r * st + j] /= p;
        }
        let prow: Vec<T> = self.t[r * st..(r + 1) * st].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * st + c];
            if f != T::zero() {
                let row = &mut self.t[i * st..(i + 1) * st];
                for (x, &pj) in row.iter_mut().zip(&prow) {
                    *x -= f * pj;
                }
                row[c] = T::zero();
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule on cost vector `c` over columns `< allowed`.
    fn optimize(&mut self, c: &[T], allowed: usize, eps: T, pivots: &mut usize) -> Result<bool> {
        let st = self.stride();
        let cap = 50_000 + 200 * (self.m + self.width);
        loop {
            *pivots += 1;
            if *pivots > cap {
                return Err(Error::MaxIterations("simplex"));
            }
            // Reduced costs d_j = c_j - c_B^T B^-1 a_j.
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = c[j];
                for i in 0..self.m {
                    d -= c[self.basis[i]] * self.t[i * st + j];
                }
                if d < -eps {
                    entering = Some(j);
                    break;
                }
            }
            let Some(e) = entering else { return Ok(true) };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = self.t[i * st + e];
                if a > eps {
                    let ratio = self.t[i * st + self.width] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr || (ratio == lr && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, e),
            }
        }
    }

    fn run(mut self, lp: &LinearProgram<T>, eps: T, feas: T) -> Result<LpSolution<T>> {
        let st = self.stride();
        let mut pivots = 0;
        let n_rows_orig = self.m;

        if self.first_art < self.width {
            let mut c1 = vec![T::zero(); self.width];
            for c in c1.iter_mut().skip(self.first_art) {
                *c = T::one();
            }
            self.optimize(&c1, self.width, eps, &mut pivots)?;
            let infeas: T = (0..self.m)
                .filter(|&i| self.basis[i] >= self.first_art)
                .map(|i| self.t[i * st + self.width])
                .sum();
            let bmax = lp.rows.iter().fold(T::one(), |m, r| m.max(r.2.abs()));
            if infeas > feas * bmax {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: vec![T::zero(); lp.n_vars],
                    objective: T::infinity(),
                    duals: vec![T::zero(); n_rows_orig],
                    pivots,
                });
            }
            // Drive zero-level artificials out of the basis; drop rows where
            // that is impossible (they are redundant).
            let mut i = 0;
            while i < self.m {
                if self.basis[i] >= self.first_art {
                    let c = (0..self.first_art).find(|&j| self.t[i * st + j].abs() > eps);
                    match c {
                        Some(c) => {
                            self.pivot(i, c);
                            i += 1;
                        }
                        None => {
                            self.t.drain(i * st..(i + 1) * st);
                            self.basis.remove(i);
                            self.row_of.remove(i);
                            self.m -= 1;
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }

        let mut c2 = vec![T::zero(); self.width];
        c2[..self.n_struct].copy_from_slice(&lp.objective);
        let bounded = self.optimize(&c2, self.first_art, eps, &mut pivots)?;

        let mut x = vec![T::zero(); lp.n_vars];
        for i in 0..self.m {
            if self.basis[i] < self.n_struct {
                x[self.basis[i]] = self.t[i * st + self.width].max(T::zero());
            }
        }
        let objective = x.iter().zip(&lp.objective).map(|(&a, &b)| a * b).sum();
        let duals = self.duals(&c2, n_rows_orig);
        Ok(LpSolution {
            status: if bounded {
                LpStatus::Optimal
            } else {
                LpStatus::Unbounded
            },
            x,
            objective,
            duals,
            pivots,
        })
    }

    /// Solves `B^T y = c_B` on the final basis and maps back to original
    /// row signs.
    fn duals(&self, c: &[T], n_rows_orig: usize) -> Vec<T> {
        let k = self.m;
        let mut out = vec![T::zero(); n_rows_orig];
        if k == 0 {
            return out;
        }
        // Row r of B^T is basis column r over the kept rows.
        let mut bt = vec![T::zero(); k * k];
        for (r, &col) in self.basis.iter().enumerate() {
            for (q, &orig) in self.row_of.iter().enumerate() {
                bt[r * k + q] = self.a_std[orig][col];
            }
        }
        let cb: Vec<T> = self.basis.iter().map(|&j| c[j]).collect();
        if let Some(y) = solve_square(bt, cb) {
            for (q, &orig) in self.row_of.iter().enumerate() {
                out[orig] = y[q] * self.sign[orig];
            }
        }
        out
    }
}
