//! Desk-scale experiment harness: the cross-validated weight heatmap, the
//! extreme-ray count study and the output-sensitivity benchmark.

mod output;
mod synth;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use output::{
    heatmap_pgm, reference_lines_csv, write_bench_csv, write_fractions_csv, write_manifest,
    write_raycount_csv, Manifest, REFERENCE_OFFSETS, REFERENCE_SLOPE,
};
pub use synth::{gen_synthetic, planted_cone, Dataset};

use crate::error::{Error, Result};
use crate::extray::{ext_ray_brute, ext_ray_id};
use crate::numerics::{symmetrize_design, Rng, Tolerances};
use crate::reduction::{eta_max_unit_sphere, shifted_rays};
use crate::solver::kfold_cv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    EtaCvHeatmap,
    RayCount,
    ReductionBench,
}

/// Number of nonzero coefficients in synthetic data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KRule {
    SqrtP,
    Fixed(usize),
}

impl KRule {
    pub fn k(&self, p: usize) -> usize {
        match *self {
            KRule::SqrtP => ((p as f64).sqrt().round() as usize).clamp(1, p.max(1)),
            KRule::Fixed(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: ExperimentKind,
    pub n_list: Vec<usize>,
    pub p_list: Vec<usize>,
    pub trials: usize,
    /// Noise level; negative means pure-noise responses.
    pub sigma: f64,
    pub k_rule: KRule,
    pub seed: u64,
    pub folds: usize,
    pub n_eta: usize,
}

impl ExperimentConfig {
    pub fn default_for(name: ExperimentKind, seed: u64) -> Self {
        let base = ExperimentConfig {
            name,
            n_list: vec![18, 24, 30],
            p_list: vec![117, 304, 789, 2048],
            trials: 50,
            sigma: 0.1,
            k_rule: KRule::SqrtP,
            seed,
            folds: 5,
            n_eta: 100,
        };
        match name {
            ExperimentKind::EtaCvHeatmap => base,
            ExperimentKind::RayCount => ExperimentConfig {
                n_list: vec![3],
                p_list: vec![50, 200, 800, 3200],
                trials: 20,
                ..base
            },
            ExperimentKind::ReductionBench => ExperimentConfig {
                n_list: vec![3],
                p_list: vec![1000, 10000],
                trials: 3,
                k_rule: KRule::Fixed(10),
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n_list.is_empty() || self.p_list.is_empty() {
            return Err(Error::InvalidArgument("empty n or p list".into()));
        }
        if self.p_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("p list must be ascending".into()));
        }
        if self.n_list.contains(&0) || self.p_list.contains(&0) {
            return Err(Error::InvalidArgument("sizes must be positive".into()));
        }
        Ok(())
    }

    /// Stream index of trial `t` in grid cell `cell`.
    pub fn stream(cell: usize, t: usize) -> u64 {
        ((cell as u64) << 32) | t as u64
    }
}

/// Fractions of trials meeting the weight condition, indexed
/// `[p index][n index]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub n_axis: Vec<usize>,
    pub p_axis: Vec<usize>,
    /// Using the cross-validation minimizer.
    pub fraction: Vec<Vec<f64>>,
    /// Using the one-standard-error weight.
    pub fraction_1se: Vec<Vec<f64>>,
    pub trials: usize,
}

/// For each `(n, p)` cell, the fraction of synthetic trials whose
/// cross-validated lasso weight satisfies `eta_cv <= 2 - 2 ||y'X||_inf`.
pub fn exp_etacv_heatmap(cfg: &ExperimentConfig) -> Result<HeatmapGrid> {
    cfg.validate()?;
    let tol = Tolerances::<f64>::default();
    let root = Rng::new(cfg.seed);
    let cells: Vec<(usize, usize)> = (0..cfg.p_list.len())
        .flat_map(|pi| (0..cfg.n_list.len()).map(move |ni| (pi, ni)))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let outcomes: Vec<(bool, bool)> = jobs
        .par_iter()
        .map(|&(c, t)| {
            let (pi, ni) = cells[c];
            let (n, p) = (cfg.n_list[ni], cfg.p_list[pi]);
            let rng = root.with_stream(ExperimentConfig::stream(c, t));
            let (data, rng) = gen_synthetic(n, p, cfg.sigma, cfg.k_rule.k(p), &rng);
            let thr = match eta_max_unit_sphere(&symmetrize_design(&data.x), &data.y, &tol) {
                Ok(v) => v,
                Err(_) => return (false, false),
            };
            match kfold_cv(&data.x, &data.y, cfg.folds.min(n), cfg.n_eta, &rng, &tol) {
                Ok(cv) => (cv.eta_cv <= thr, cv.eta_1se <= thr),
                Err(e) => {
                    log::warn!("trial ({n}, {p}, {t}) failed: {e}");
                    (false, false)
                }
            }
        })
        .collect();
    let mut hits = vec![vec![0usize; cfg.n_list.len()]; cfg.p_list.len()];
    let mut hits_1se = hits.clone();
    for (&(c, _), &(a, b)) in jobs.iter().zip(&outcomes) {
        let (pi, ni) = cells[c];
        hits[pi][ni] += usize::from(a);
        hits_1se[pi][ni] += usize::from(b);
    }
    let frac = |h: Vec<Vec<usize>>| -> Vec<Vec<f64>> {
        h.into_iter()
            .map(|row| row.into_iter().map(|k| k as f64 / cfg.trials as f64).collect())
            .collect()
    };
    let (fraction, fraction_1se) = (frac(hits), frac(hits_1se));
    Ok(HeatmapGrid {
        n_axis: cfg.n_list.clone(),
        p_axis: cfg.p_list.clone(),
        fraction,
        fraction_1se,
        trials: cfg.trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayCountRow {
    pub n: usize,
    pub p: usize,
    pub mean_extreme: f64,
    pub sd: f64,
    pub trials: usize,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

/// Mean and standard deviation of the number of extreme classes among the
/// shifted rays `x_i - y` for uniform points on the unit sphere.
pub fn exp_raycount(cfg: &ExperimentConfig) -> Result<Vec<RayCountRow>> {
    cfg.validate()?;
    let tol = Tolerances::<f64>::default();
    let root = Rng::new(cfg.seed);
    let mut rows = Vec::new();
    let mut cell = 0;
    for &n in &cfg.n_list {
        for &p in &cfg.p_list {
            let c = cell;
            cell += 1;
            let counts: Vec<Option<f64>> = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let mut s = root.with_stream(ExperimentConfig::stream(c, t)).sampler();
                    let cols: Vec<_> = (0..p).map(|_| s.unit_sphere::<f64>(n)).collect();
                    let y = s.unit_sphere::<f64>(n);
                    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
                    let x = crate::numerics::Matrix::from_columns(n, &refs).ok()?;
                    let z = shifted_rays(&x, &y, 1.0, &tol).ok()?;
                    let r = ext_ray_id(&z, &tol).ok()?;
                    Some(r.kept_classes() as f64)
                })
                .collect();
            let ok: Vec<f64> = counts.into_iter().flatten().collect();
            if ok.is_empty() {
                return Err(Error::InvalidArgument(format!("no valid trials at n={n}, p={p}")));
            }
            let (mean, sd) = mean_sd(&ok);
            rows.push(RayCountRow {
                n,
                p,
                mean_extreme: mean,
                sd,
                trials: ok.len(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    /// Mean wall time of the output-sensitive algorithm, milliseconds.
    pub t_outputsensitive: f64,
    /// Mean wall time of the brute-force baseline, milliseconds.
    pub t_brute: f64,
    /// Largest membership-call count over trials.
    pub membership_calls: usize,
    pub brute_calls: usize,
    pub kept_classes: usize,
}

/// Times both extreme-ray algorithms on cones with `s` planted extreme rays
/// and `p - s` interior rays.
pub fn exp_bench_reduction(cfg: &ExperimentConfig) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    let tol = Tolerances::<f64>::default();
    let root = Rng::new(cfg.seed);
    let mut rows = Vec::new();
    let mut cell = 0;
    for &n in &cfg.n_list {
        for &p in &cfg.p_list {
            let s = cfg.k_rule.k(p).min(p);
            let mut t_os = 0.0;
            let mut t_br = 0.0;
            let mut calls = 0;
            let mut bcalls = 0;
            let mut kept = 0;
            for t in 0..cfg.trials {
                let rng = root.with_stream(ExperimentConfig::stream(cell, t));
                let z = planted_cone(n, p, s, &rng)?;
                let start = Instant::now();
                let a = ext_ray_id(&z, &tol)?;
                t_os += start.elapsed().as_secs_f64() * 1e3;
                let start = Instant::now();
                let b = ext_ray_brute(&z, &tol)?;
                t_br += start.elapsed().as_secs_f64() * 1e3;
                if a.kept != b.kept {
                    return Err(Error::InvalidArgument(format!(
                        "algorithms disagree at n={n}, p={p}, trial {t}"
                    )));
                }
                calls = calls.max(a.membership_calls);
                bcalls = bcalls.max(b.membership_calls);
                kept = a.kept_classes();
            }
            cell += 1;
            let k = cfg.trials as f64;
            rows.push(BenchRow {
                n,
                p,
                s,
                t_outputsensitive: t_os / k,
                t_brute: t_br / k,
                membership_calls: calls,
                brute_calls: bcalls,
                kept_classes: kept,
            });
        }
    }
    Ok(rows)
}
