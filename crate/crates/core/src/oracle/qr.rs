use crate::numerics::Real;

/// Least-squares solve of `min ||A x - b||` by Householder QR, where `A` is
/// given as `k <= n` columns of length `n`. Returns `None` when `A` is
/// numerically rank deficient.
pub(crate) fn least_squares<T: Real>(cols: &[&[T]], b: &[T]) -> Option<Vec<T>> {
    let n = b.len();
    let k = cols.len();
    if k == 0 {
        return Some(Vec::new());
    }
    if k > n {
        return None;
    }
    // Column-major working copy.
    let mut a: Vec<T> = Vec::with_capacity(n * k);
    for c in cols {
        a.extend_from_slice(c);
    }
    let mut rhs = b.to_vec();
    let col_scale = cols
        .iter()
        .map(|c| c.iter().fold(T::zero(), |m, x| m.max(x.abs())))
        .fold(T::zero(), T::max);
    let rank_tol = T::epsilon() * T::lit(1e3) * T::from_usize_lossy(n) * col_scale;

    for j in 0..k {
        let col = &mut a[j * n..(j + 1) * n];
        let sigma: T = col[j..].iter().map(|&x| x * x).sum::<T>().sqrt();
        if sigma <= rank_tol {
            return None;
        }
        let alpha = if col[j] > T::zero() { -sigma } else { sigma };
        // v = x - alpha e_j, stored in place.
        col[j] -= alpha;
        let vnorm_sq: T = col[j..].iter().map(|&x| x * x).sum();
        if vnorm_sq == T::zero() {
            col[j] = alpha;
            continue;
        }
        let v: Vec<T> = col[j..].to_vec();
        let two = T::lit(2.0);
        for jj in j + 1..k {
            let c = &mut a[jj * n..(jj + 1) * n];
            let s: T = v.iter().zip(&c[j..]).map(|(&vi, &ci)| vi * ci).sum();
            let f = two * s / vnorm_sq;
            for (ci, &vi) in c[j..].iter_mut().zip(&v) {
                *ci -= f * vi;
            }
        }
        let s: T = v.iter().zip(&rhs[j..]).map(|(&vi, &ri)| vi * ri).sum();
        let f = two * s / vnorm_sq;
        for (ri, &vi) in rhs[j..].iter_mut().zip(&v) {
            *ri -= f * vi;
        }
        a[j * n + j] = alpha;
    }
    let mut x = vec![T::zero(); k];
    for j in (0..k).rev() {
        let mut s = rhs[j];
        for jj in j + 1..k {
            s -= a[jj * n + j] * x[jj];
        }
        x[j] = s / a[j * n + j];
    }
    Some(x)
}

/// Solves the square system `M x = b` by Gaussian elimination with partial
/// pivoting; `m` is row-major `k x k`.
pub(crate) fn solve_square<T: Real>(mut m: Vec<T>, mut b: Vec<T>) -> Option<Vec<T>> {
    let k = b.len();
    for c in 0..k {
        let piv = (c..k).max_by(|&i, &j| {
            m[i * k + c]
                .abs()
                .partial_cmp(&m[j * k + c].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[piv * k + c].abs() <= T::epsilon() * T::lit(16.0) {
            return None;
        }
        if piv != c {
            for j in 0..k {
                m.swap(c * k + j, piv * k + j);
            }
            b.swap(c, piv);
        }
        for r in c + 1..k {
            let f = m[r * k + c] / m[c * k + c];
            if f != T::zero() {
                for j in c..k {
                    let t = m[c * k + j];
                    m[r * k + j] -= f * t;
                }
                let t = b[c];
                b[r] -= f * t;
            }
        }
    }
    let mut x = vec![T::zero(); k];
    for r in (0..k).rev() {
        let mut s = b[r];
        for j in r + 1..k {
            s -= m[r * k + j] * x[j];
        }
        x[r] = s / m[r * k + r];
    }
    Some(x)
}
