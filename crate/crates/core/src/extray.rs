//! Extreme-ray identification: the output-sensitive recursive algorithm, the
//! quadratic brute-force baseline, alignment preprocessing and merging of
//! partial results.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{dot, normalize_vector, Real, Tolerances, Vector};
use crate::oracle::{amo, conic_membership_of, RaySet};

/// Result of an extreme-ray computation. All indices are 0-based positions
/// in the input ray set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremeRaySet {
    /// Indices whose rays are extreme, including aligned duplicates; sorted.
    pub kept: Vec<usize>,
    /// Complement of `kept`; sorted.
    pub discarded: Vec<usize>,
    /// Alignment classes, each sorted, ordered by representative.
    pub classes: Vec<Vec<usize>>,
    pub membership_calls: usize,
    pub lp_calls: usize,
}

impl ExtremeRaySet {
    /// Number of extreme alignment classes.
    pub fn kept_classes(&self) -> usize {
        let kept: BTreeSet<usize> = self.kept.iter().copied().collect();
        self.classes.iter().filter(|c| kept.contains(&c[0])).count()
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut i = i;
        while self.0[i] != r {
            let next = self.0[i];
            self.0[i] = r;
            i = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Partitions the rays into classes of positively proportional rays
/// (cosine at least `1 - align_eps`). The representative of each class is
/// its lowest index.
pub fn align_classes<T: Real>(z: &RaySet<T>, tol: &Tolerances<T>) -> Vec<Vec<usize>> {
    let p = z.len();
    let unit: Vec<Vector<T>> = z
        .rays()
        .iter()
        .map(|r| normalize_vector(r).expect("rays are nonzero"))
        .collect();
    // Aligned unit vectors are within sqrt(2 align_eps) of each other, hence
    // so are their projections on any unit direction; sweep a sorted window.
    let n = z.dim();
    let mut w: Vec<T> = (0..n).map(|k| T::lit(1.0 + 0.618_034 * k as f64).recip()).collect();
    let wn = crate::numerics::norm(&w);
    w.iter_mut().for_each(|x| *x /= wn);
    let proj: Vec<T> = unit.iter().map(|u| dot(u, &w)).collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| proj[a].partial_cmp(&proj[b]).unwrap_or(std::cmp::Ordering::Equal));
    let radius = (T::lit(2.0) * tol.align_eps).sqrt() * T::lit(1.0 + 1e-6);
    let cos_min = T::one() - tol.align_eps;

    let mut uf = UnionFind((0..p).collect());
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[a + 1..] {
            if proj[j] - proj[i] > radius {
                break;
            }
            if dot(&unit[i], &unit[j]) >= cos_min {
                uf.union(i, j);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..p {
        let r = uf.find(i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

#[derive(Default)]
struct Counters {
    membership_calls: usize,
    lp_calls: usize,
}

fn expand(p: usize, classes: &[Vec<usize>], kept_reps: &BTreeSet<usize>, c: Counters) -> ExtremeRaySet {
    let mut kept: Vec<usize> = classes
        .iter()
        .filter(|cl| kept_reps.contains(&cl[0]))
        .flat_map(|cl| cl.iter().copied())
        .collect();
    kept.sort_unstable();
    let keep: BTreeSet<usize> = kept.iter().copied().collect();
    ExtremeRaySet {
        discarded: (0..p).filter(|i| !keep.contains(i)).collect(),
        kept,
        classes: classes.to_vec(),
        membership_calls: c.membership_calls,
        lp_calls: c.lp_calls,
    }
}

/// Output-sensitive extreme-ray identification.
///
/// Class representatives are processed in index order. Each is tested for
/// membership in the cone of the representatives kept so far; members are
/// discarded, and for a non-member the separator `v` selects, through the
/// angular oracle, a face of the cone among the remaining rays whose extreme
/// rays are found recursively and added to the kept set.
pub fn ext_ray_id<T: Real>(z: &RaySet<T>, tol: &Tolerances<T>) -> Result<ExtremeRaySet> {
    let g = z.base_or_find(tol)?;
    let classes = align_classes(z, tol);
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let mut counters = Counters::default();
    let kept = extract(z, &g, &reps, tol, &mut counters)?;
    Ok(expand(z.len(), &classes, &kept.into_iter().collect(), counters))
}

fn extract<T: Real>(
    z: &RaySet<T>,
    g: &[T],
    set: &[usize],
    tol: &Tolerances<T>,
    c: &mut Counters,
) -> Result<Vec<usize>> {
    if set.len() <= 1 {
        return Ok(set.to_vec());
    }
    let mut kept: Vec<usize> = Vec::new();
    let mut remaining: BTreeSet<usize> = set.iter().copied().collect();
    while let Some(&j) = remaining.first() {
        let gens: Vec<&[T]> = kept.iter().map(|&k| z.ray(k).as_slice()).collect();
        let cert = conic_membership_of(&gens, z.ray(j), tol)?;
        c.membership_calls += 1;
        if cert.inside {
            remaining.remove(&j);
            continue;
        }
        c.lp_calls += 1;
        let v = cert.v.expect("separator present when outside");
        let candidates: Vec<usize> = remaining.iter().copied().collect();
        let face = amo(&v, z, g, &candidates, tol);
        let extremes = if face.len() == 1 {
            face.clone()
        } else if face.len() == set.len() {
            // Every ray ties: the recursion would not shrink.
            brute_reps(z, &face, tol, c)?
        } else {
            extract(z, g, &face, tol, c)?
        };
        kept.extend(extremes);
        for f in &face {
            remaining.remove(f);
        }
    }
    kept.sort_unstable();
    Ok(kept)
}

fn brute_reps<T: Real>(
    z: &RaySet<T>,
    reps: &[usize],
    tol: &Tolerances<T>,
    c: &mut Counters,
) -> Result<Vec<usize>> {
    let flags: Vec<bool> = reps
        .par_iter()
        .map(|&r| {
            let gens: Vec<&[T]> = reps
                .iter()
                .filter(|&&k| k != r)
                .map(|&k| z.ray(k).as_slice())
                .collect();
            conic_membership_of(&gens, z.ray(r), tol).map(|cert| !cert.inside)
        })
        .collect::<Result<Vec<bool>>>()?;
    c.membership_calls += reps.len();
    Ok(reps
        .iter()
        .zip(flags)
        .filter(|(_, f)| *f)
        .map(|(&r, _)| r)
        .collect())
}

/// Reference implementation: every class representative is tested against
/// the cone of all other representatives.
pub fn ext_ray_brute<T: Real>(z: &RaySet<T>, tol: &Tolerances<T>) -> Result<ExtremeRaySet> {
    let classes = align_classes(z, tol);
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let mut counters = Counters::default();
    let kept = brute_reps(z, &reps, tol, &mut counters)?;
    Ok(expand(z.len(), &classes, &kept.into_iter().collect(), counters))
}

/// Runs [`ext_ray_id`] on each part, then once more on the union of the
/// partial results. Parts may overlap; together they must cover the rays of
/// interest.
pub fn merge_extreme_sets<T: Real>(
    z: &RaySet<T>,
    parts: &[Vec<usize>],
    tol: &Tolerances<T>,
) -> Result<ExtremeRaySet> {
    let g = z.base_or_find(tol)?;
    let zb = z.clone().with_base(g, tol)?;
    let partial: Vec<(Vec<usize>, usize, usize)> = parts
        .par_iter()
        .map(|part| {
            let r = ext_ray_id(&zb.subset(part), tol)?;
            let kept = r.kept.iter().map(|&k| part[k]).collect();
            Ok((kept, r.membership_calls, r.lp_calls))
        })
        .collect::<Result<_>>()?;
    let mut union = BTreeSet::new();
    let mut counters = Counters::default();
    for (kept, m, l) in partial {
        union.extend(kept);
        counters.membership_calls += m;
        counters.lp_calls += l;
    }
    let union: Vec<usize> = union.into_iter().collect();
    let fin = ext_ray_id(&zb.subset(&union), tol)?;
    counters.membership_calls += fin.membership_calls;
    counters.lp_calls += fin.lp_calls;
    let kept: BTreeSet<usize> = fin.kept.iter().map(|&k| union[k]).collect();
    let classes = align_classes(z, tol);
    let mut out = expand(z.len(), &classes, &BTreeSet::new(), counters);
    out.discarded = (0..z.len()).filter(|i| !kept.contains(i)).collect();
    out.kept = kept.into_iter().collect();
    Ok(out)
}
