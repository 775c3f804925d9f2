use super::cd::{support_of, SolveResult};
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Real, Tolerances, Vector};

/// Largest column count accepted by [`lqq_support_oracle`].
pub const LQQ_MAX_COLS: usize = 16;

struct Problem<'a, T> {
    cols: Vec<&'a [T]>,
    y: &'a [T],
    eta: T,
    q: T,
}

impl<T: Real> Problem<'_, T> {
    fn residual(&self, b: &[T]) -> Vec<T> {
        let mut r: Vec<T> = self.y.iter().map(|&v| -v).collect();
        for (c, &bi) in self.cols.iter().zip(b) {
            for (ri, &ci) in r.iter_mut().zip(c.iter()) {
                *ri += bi * ci;
            }
        }
        r
    }

    fn value(&self, b: &[T]) -> T {
        let r = self.residual(b);
        r.iter().map(|x| x.abs().powf(self.q)).sum::<T>() + self.eta * b.iter().copied().sum::<T>()
    }

    fn grad(&self, b: &[T]) -> Vec<T> {
        let r = self.residual(b);
        let w: Vec<T> = r
            .iter()
            .map(|&x| self.q * x.abs().powf(self.q - T::lit(2.0)) * x)
            .collect();
        self.cols
            .iter()
            .map(|c| c.iter().zip(&w).map(|(&a, &b)| a * b).sum::<T>() + self.eta)
            .collect()
    }

    /// Projected gradient with backtracking from the origin.
    fn solve(&self) -> (T, Vec<T>) {
        let k = self.cols.len();
        let mut b = vec![T::zero(); k];
        let mut f = self.value(&b);
        let mut lip = T::one();
        let half = T::lit(0.5);
        for _ in 0..50_000 {
            let g = self.grad(&b);
            let (nb, nf) = loop {
                let nb: Vec<T> = b
                    .iter()
                    .zip(&g)
                    .map(|(&bi, &gi)| (bi - gi / lip).max(T::zero()))
                    .collect();
                let nf = self.value(&nb);
                let d: Vec<T> = nb.iter().zip(&b).map(|(&a, &c)| a - c).collect();
                let lin: T = g.iter().zip(&d).map(|(&a, &c)| a * c).sum();
                let quad: T = d.iter().map(|&x| x * x).sum();
                if nf <= f + lin + half * lip * quad + T::epsilon() * f.abs() || lip > T::lit(1e20) {
                    break (nb, nf);
                }
                lip *= T::lit(2.0);
            };
            let step = nb
                .iter()
                .zip(&b)
                .fold(T::zero(), |m, (&a, &c)| m.max((a - c).abs()));
            b = nb;
            f = nf;
            if step < T::lit(1e-14) {
                break;
            }
            lip = (lip / T::lit(1.5)).max(T::lit(1e-12));
        }
        (f, b)
    }
}

/// Ground-truth solver for tiny problems
/// `min ||X beta - y||_q^q + eta 1'beta, beta >= 0`: every support is solved
/// by projected gradient and the best objective wins.
pub fn lqq_support_oracle<T: Real>(
    x: &Matrix<T>,
    y: &[T],
    eta: T,
    q: T,
    tol: &Tolerances<T>,
) -> Result<SolveResult<T>> {
    let p = x.cols();
    if p > LQQ_MAX_COLS {
        return Err(Error::InvalidArgument(format!(
            "support enumeration limited to {LQQ_MAX_COLS} columns"
        )));
    }
    if q < T::lit(2.0) {
        return Err(Error::InvalidSpec("q must be at least 2".into()));
    }
    let cols = x.columns();
    let mut best_f = y.iter().map(|v| v.abs().powf(q)).sum::<T>();
    let mut best_b = vec![T::zero(); p];
    let mut solved = 0usize;
    for mask in 1u32..(1u32 << p) {
        let idx: Vec<usize> = (0..p).filter(|&i| mask & (1 << i) != 0).collect();
        let prob = Problem {
            cols: idx.iter().map(|&i| cols[i].as_slice()).collect(),
            y,
            eta,
            q,
        };
        let (f, b) = prob.solve();
        solved += 1;
        if f < best_f - T::lit(1e-14) * (T::one() + best_f.abs()) {
            best_f = f;
            best_b = vec![T::zero(); p];
            for (&i, &bi) in idx.iter().zip(&b) {
                best_b[i] = bi;
            }
        }
    }
    let full = Problem {
        cols: cols.iter().map(|c| c.as_slice()).collect(),
        y,
        eta,
        q,
    };
    let kkt_tol = T::lit(super::cd::KKT_TOL);
    let kkt_ok = full.grad(&best_b).iter().zip(&best_b).all(|(&g, &b)| {
        if b > T::zero() {
            g.abs() <= kkt_tol
        } else {
            g >= -kkt_tol
        }
    });
    Ok(SolveResult {
        support: support_of(&best_b, tol.support_eps),
        beta: Vector::new(best_b)?,
        objective: best_f,
        iterations: solved,
        converged: true,
        kkt_ok,
    })
}
