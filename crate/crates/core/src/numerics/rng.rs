use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use super::{Real, Vector};

/// Counter-based random state: `(seed, stream, position)`.
///
/// Values are immutable; every draw returns the advanced state alongside the
/// sample, so the same `(seed, stream)` always reproduces the same sequence
/// regardless of which thread consumes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rng {
    pub seed: u64,
    pub stream: u64,
    pub position: u128,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng {
            seed,
            stream: 0,
            position: 0,
        }
    }

    /// Same seed, independent stream, position reset.
    pub fn with_stream(&self, stream: u64) -> Self {
        Rng {
            seed: self.seed,
            stream,
            position: 0,
        }
    }

    pub fn sampler(&self) -> Sampler {
        let mut inner = ChaCha20Rng::seed_from_u64(self.seed);
        inner.set_stream(self.stream);
        inner.set_word_pos(self.position);
        Sampler { inner }
    }

    /// `len` independent standard normals and the advanced state.
    pub fn draw_gaussian<T: Real>(&self, len: usize) -> (Vector<T>, Rng) {
        let mut s = self.sampler();
        let v = s.gaussian_vec(len);
        (v, s.state(self))
    }

    pub fn permutation(&self, n: usize) -> (Vec<usize>, Rng) {
        let mut s = self.sampler();
        let perm = s.permutation(n);
        (perm, s.state(self))
    }
}

/// Mutable cursor over an [`Rng`] stream, for use inside a single trial.
#[derive(Debug, Clone)]
pub struct Sampler {
    inner: ChaCha20Rng,
}

impl Sampler {
    pub fn gaussian<T: Real>(&mut self) -> T {
        T::lit(self.inner.sample::<f64, _>(StandardNormal))
    }

    pub fn gaussian_vec<T: Real>(&mut self, len: usize) -> Vector<T> {
        (0..len).map(|_| self.gaussian()).collect()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform<T: Real>(&mut self) -> T {
        T::lit(self.inner.random::<f64>())
    }

    pub fn uniform_in<T: Real>(&mut self, lo: T, hi: T) -> T {
        lo + (hi - lo) * self.uniform::<T>()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(&mut self.inner);
        v
    }

    /// `k` distinct indices from `0..n`, sorted.
    pub fn choose(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut v = self.permutation(n);
        v.truncate(k);
        v.sort_unstable();
        v
    }

    /// Uniform point on the unit sphere in `n` dimensions.
    pub fn unit_sphere<T: Real>(&mut self, n: usize) -> Vector<T> {
        loop {
            let g: Vector<T> = self.gaussian_vec(n);
            let nrm = g.norm();
            if nrm > T::lit(1e-12) {
                return g.scaled(T::one() / nrm);
            }
        }
    }

    pub fn state(&self, origin: &Rng) -> Rng {
        Rng {
            seed: origin.seed,
            stream: origin.stream,
            position: self.inner.get_word_pos(),
        }
    }
}
