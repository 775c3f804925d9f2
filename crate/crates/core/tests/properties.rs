mod common;

use common::{angular_extremes, from_cols, random_pointed_cone, set, sphere_matrix, subset, tol};
use persist_core::experiments::{gen_synthetic, planted_cone};
use persist_core::extray::{ext_ray_brute, ext_ray_id, merge_extreme_sets};
use persist_core::geometry::{
    facet_enumerate, gauge_value, interior_screen, tangent_necessary_check, vertex_noncover_check,
};
use persist_core::numerics::{dot, normalize_columns, symmetrize_design, Rng, Sampler};
use persist_core::oracle::{amo, conic_membership_of, nnls, LinearProgram, LpStatus, Relation};
use persist_core::reduction::{
    eta_interval, eta_ls_optimized, eta_max_bregman, eta_max_lqq, eta_max_ls, eta_max_unit_sphere,
    persistent_reduce, LossSpec,
};
use persist_core::solver::{kfold_cv, lasso_symmetrized, nn_lasso_cd};
use persist_core::{Matrix, RaySet, RaySet32, Tolerances32, Vector, Vector32};
use proptest::prelude::*;

fn sampler(seed: u64) -> Sampler {
    Rng::new(seed).sampler()
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn normalize_columns_is_idempotent(seed in any::<u64>(), n in 1usize..6, p in 1usize..10) {
        let mut s = sampler(seed);
        let x = Matrix::new(n, p, (0..n * p).map(|_| s.gaussian()).collect()).unwrap();
        let once = normalize_columns(&x, &tol()).unwrap();
        let twice = normalize_columns(&once, &tol()).unwrap();
        for (a, b) in once.data().iter().zip(twice.data()) {
            prop_assert!((a - b).abs() <= 1e-15);
        }
        for c in once.columns() {
            prop_assert!((c.norm() - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn symmetrized_design_reproduces_signed_products(seed in any::<u64>(), n in 1usize..6, p in 1usize..10) {
        let mut s = sampler(seed);
        let x = Matrix::new(n, p, (0..n * p).map(|_| s.gaussian()).collect()).unwrap();
        let beta: Vec<f64> = (0..p).map(|_| s.gaussian()).collect();
        let mut split = vec![0.0; 2 * p];
        for (j, &b) in beta.iter().enumerate() {
            if b < 0.0 { split[j] = -b } else { split[p + j] = b }
        }
        let lhs = x.mul_vec(&beta);
        let rhs = symmetrize_design(&x).mul_vec(&split);
        prop_assert!(lhs.sub(&rhs).norm() <= 1e-12);
    }

    #[test]
    fn membership_certificates_are_exclusive_and_match_lp(seed in any::<u64>(), n in 2usize..6, p in 1usize..10) {
        let t = tol();
        let mut s = sampler(seed);
        let z: Vec<Vector> = (0..p).map(|_| s.gaussian_vec(n)).collect();
        let q: Vector = s.gaussian_vec(n);
        let refs: Vec<&[f64]> = z.iter().map(|c| c.as_slice()).collect();
        let cert = conic_membership_of(&refs, &q, &t).unwrap();
        prop_assert!(cert.lambda.is_some() != cert.v.is_some());
        prop_assert_eq!(cert.inside, cert.lambda.is_some());
        if let Some(v) = &cert.v {
            prop_assert!((dot(v, &q) - 1.0).abs() <= 1e-6);
            for zi in &z {
                prop_assert!(dot(v, zi) <= 1e-6 * v.norm() * zi.norm());
            }
        }
        let mut lp = LinearProgram::new(p);
        for r in 0..n {
            lp.add_row(z.iter().map(|c| c[r]).collect(), Relation::Eq, q[r]);
        }
        let sol = lp.solve(t.lp_eps, t.feas_eps).unwrap();
        prop_assert_eq!(sol.status == LpStatus::Optimal, cert.inside);
    }

    #[test]
    fn membership_residual_matches_coefficients(seed in any::<u64>(), n in 2usize..6, p in 1usize..10) {
        let mut s = sampler(seed);
        let z: Vec<Vector> = (0..p).map(|_| s.gaussian_vec(n)).collect();
        let w: Vec<f64> = (0..p).map(|_| s.uniform()).collect();
        let mut q = vec![0.0; n];
        for (zi, &wi) in z.iter().zip(&w) {
            persist_core::numerics::axpy(wi, zi, &mut q);
        }
        let refs: Vec<&[f64]> = z.iter().map(|c| c.as_slice()).collect();
        let cert = conic_membership_of(&refs, &q, &tol()).unwrap();
        prop_assert!(cert.inside);
        let lambda = cert.lambda.unwrap();
        let mut r: Vec<f64> = q.iter().map(|v| -v).collect();
        for (zi, &li) in z.iter().zip(lambda.iter()) {
            prop_assert!(li >= 0.0);
            persist_core::numerics::axpy(li, zi, &mut r);
        }
        let direct = Vector::new(r).unwrap().norm();
        prop_assert!((direct - cert.residual_norm).abs() <= 1e-9 * Vector::from_f64(&q).norm().max(1.0));
    }

    #[test]
    fn amo_commutes_with_permutation(seed in any::<u64>(), n in 2usize..5, p in 3usize..20) {
        let t = tol();
        let mut s = sampler(seed);
        let (z, g) = random_pointed_cone(&mut s, n, p);
        let v: Vector = s.gaussian_vec(n);
        let all: Vec<usize> = (0..p).collect();
        let a = amo(&v, &z, &g, &all, &t);
        let perm = s.permutation(p);
        let zp = z.subset(&perm);
        let b = amo(&v, &zp, &g, &all, &t);
        let mapped: Vec<usize> = b.iter().map(|&k| perm[k]).collect();
        prop_assert_eq!(set(&a), set(&mapped));
    }
}

proptest! {
    #![proptest_config(cfg(40))]

    #[test]
    fn ext_ray_id_matches_brute_force(seed in any::<u64>(), n in 2usize..6, p in 3usize..30) {
        let mut s = sampler(seed);
        let (z, _) = random_pointed_cone(&mut s, n, p);
        let a = ext_ray_id(&z, &tol()).unwrap();
        let b = ext_ray_brute(&z, &tol()).unwrap();
        prop_assert_eq!(&a.kept, &b.kept);
        let mut all = a.kept.clone();
        all.extend(&a.discarded);
        all.sort_unstable();
        prop_assert_eq!(all, (0..p).collect::<Vec<_>>());
        if n == 2 {
            prop_assert_eq!(set(&a.kept), angular_extremes(&z));
        }
    }

    #[test]
    fn ext_ray_id_ignores_insertion_order(seed in any::<u64>(), n in 2usize..5, p in 3usize..25) {
        let mut s = sampler(seed);
        let (z, _) = random_pointed_cone(&mut s, n, p);
        let perm = s.permutation(p);
        let a = ext_ray_id(&z, &tol()).unwrap();
        let b = ext_ray_id(&z.subset(&perm), &tol()).unwrap();
        let mapped: Vec<usize> = b.kept.iter().map(|&k| perm[k]).collect();
        prop_assert_eq!(set(&a.kept), set(&mapped));
    }

    #[test]
    fn merging_partial_results_is_exact(seed in any::<u64>(), n in 2usize..5, p in 4usize..30, parts in 2usize..5) {
        let mut s = sampler(seed);
        let (z, _) = random_pointed_cone(&mut s, n, p);
        let chunks: Vec<Vec<usize>> = (0..parts)
            .map(|k| (0..p).filter(|i| i % parts == k).collect())
            .filter(|c: &Vec<usize>| !c.is_empty())
            .collect();
        let whole = ext_ray_id(&z, &tol()).unwrap();
        let merged = merge_extreme_sets(&z, &chunks, &tol()).unwrap();
        prop_assert_eq!(&merged.kept, &whole.kept);
    }

    #[test]
    fn planted_cones_have_their_planted_count(seed in any::<u64>(), n in 3usize..6, s in 3usize..10, extra in 0usize..30) {
        let z = planted_cone(n, s + extra, s, &Rng::new(seed)).unwrap();
        let r = ext_ray_id(&z, &tol()).unwrap();
        prop_assert_eq!(r.kept_classes(), s);
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn quadratic_exponent_reduces_to_least_squares(seed in any::<u64>(), n in 1usize..7, p in 1usize..15) {
        let mut s = sampler(seed);
        let x = sphere_matrix(&mut s, n, p);
        let y: Vector = s.gaussian_vec(n);
        let alpha = s.uniform_in(0.5, 2.0);
        let ls = eta_max_ls(&x, &y, alpha);
        prop_assert!(close(eta_max_lqq(&x, &y, alpha, 2.0), ls, 1e-12));
        prop_assert!(close(eta_max_bregman(&x, &y, alpha, 2.0), ls, 1e-12));
        let iv = eta_interval(&x, &LossSpec::least_squares(y.clone(), alpha).unwrap()).unwrap();
        if ls > 0.0 {
            prop_assert!(close(iv.upper, ls, 1e-12));
        } else {
            prop_assert!(!iv.valid);
        }
    }

    #[test]
    fn improved_bound_dominates_easy_bound(seed in any::<u64>(), n in 1usize..4, p in 1usize..8) {
        let mut s = sampler(seed);
        let x = sphere_matrix(&mut s, n, p);
        let y: Vector = s.gaussian_vec(n);
        let (easy, best, _) = eta_ls_optimized(&x, &y);
        prop_assert!(best >= easy);
    }

    #[test]
    fn gauge_is_positively_homogeneous(seed in any::<u64>(), n in 2usize..4, c in 0.01f64..100.0) {
        let mut s = sampler(seed);
        let p = n + 3;
        let m = Matrix::new(n, p, (0..n * p).map(|_| s.gaussian()).collect()).unwrap();
        let w: Vec<f64> = (0..p).map(|_| s.uniform()).collect();
        let th = m.mul_vec(&w);
        let (g1, _) = gauge_value(&m, &th, &tol()).unwrap();
        let (gc, _) = gauge_value(&m, &th.scaled(c), &tol()).unwrap();
        prop_assert!((gc - c * g1).abs() <= 1e-10 * (c * g1).max(1.0));
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn kept_set_is_scale_covariant(seed in any::<u64>(), n in 2usize..6, p in 5usize..25, c in 0.2f64..8.0) {
        let t = tol();
        let mut s = sampler(seed);
        let x = sphere_matrix(&mut s, n, p);
        let y: Vector = s.unit_sphere(n);
        let alpha = s.uniform_in(0.8, 1.5);
        let r0 = persistent_reduce(&x, &LossSpec::least_squares(y.clone(), alpha).unwrap(), 0.1, &t);
        prop_assume!(!matches!(r0, Err(persist_core::Error::NotPointed)));
        let r0 = r0.unwrap();
        let rc = persistent_reduce(&x, &LossSpec::least_squares(y.scaled(c), alpha / c).unwrap(), 0.1 * c, &t).unwrap();
        prop_assert_eq!(r0.kept, rc.kept);
    }

    #[test]
    fn reduced_problem_recovers_full_optimum(seed in any::<u64>(), n in 3usize..8, p in 10usize..60, frac in 0.1f64..0.95) {
        let t = persist_core::Tolerances { support_eps: 1e-8, ..tol() };
        let mut s = sampler(seed);
        let x = sphere_matrix(&mut s, n, p);
        let y: Vector = s.unit_sphere(n);
        let eta = frac * eta_max_ls(&x, &y, 1.0);
        let rep = persistent_reduce(&x, &LossSpec::least_squares(y.clone(), 1.0).unwrap(), eta, &t).unwrap();
        prop_assume!(rep.valid());
        let full = nn_lasso_cd(&x, &y, eta, None, &t).unwrap().certified().unwrap();
        let red = nn_lasso_cd(&x, &y, eta, Some(&rep.kept), &t).unwrap().certified().unwrap();
        prop_assert!(subset(&full.support, &rep.kept));
        prop_assert!((full.objective - red.objective).abs() <= 1e-8);
    }

    #[test]
    fn solver_exits_are_certified(seed in any::<u64>(), n in 2usize..8, p in 2usize..30, eta in 0.001f64..2.0) {
        let t = tol();
        let mut s = sampler(seed);
        let x = sphere_matrix(&mut s, n, p);
        let y: Vector = s.unit_sphere(n);
        let a = nn_lasso_cd(&x, &y, eta, None, &t).unwrap();
        prop_assert!(a.converged && a.kkt_ok);
        prop_assert!(a.beta.iter().all(|&b| b >= 0.0));
        let b = lasso_symmetrized(&x, &y, eta, &t).unwrap();
        prop_assert!(b.converged && b.kkt_ok);
        prop_assert!(b.objective <= a.objective + 1e-10);
    }

    #[test]
    fn facets_agree_with_hull_membership(seed in any::<u64>(), d in 2usize..4, m in 4usize..9) {
        let t = tol();
        let mut s = sampler(seed);
        let pts: Vec<Vector> = (0..m).map(|_| s.gaussian_vec(d)).collect();
        let v = from_cols(d, &pts);
        let k = facet_enumerate(&v, &t).unwrap();
        let lifted: Vec<Vec<f64>> = pts.iter().map(|p| { let mut w = p.to_vec(); w.push(1.0); w }).collect();
        let refs: Vec<&[f64]> = lifted.iter().map(|w| w.as_slice()).collect();
        for _ in 0..100 {
            let q: Vector = s.gaussian_vec(d).scaled(1.5);
            let mut ql = q.to_vec();
            ql.push(1.0);
            let inside = conic_membership_of(&refs, &ql, &t).unwrap().inside;
            // Skip probes within rounding of the boundary.
            let margin = k.normals.iter().zip(&k.offsets).map(|(a, &b)| dot(a, &q) - b).fold(f64::NEG_INFINITY, f64::max);
            if margin.abs() < 1e-6 {
                continue;
            }
            prop_assert_eq!(k.contains(&q, &t), inside);
        }
    }

    #[test]
    fn noncover_implies_tangent_condition(seed in any::<u64>(), n in 2usize..4, p in 3usize..10) {
        let t = tol();
        let mut s = sampler(seed);
        let x = sphere_matrix(&mut s, n, p);
        let y: Vector = s.gaussian_vec(n).scaled(0.5);
        let nc = vertex_noncover_check(&x, &y, &t);
        let tg = tangent_necessary_check(&x, &y, &t);
        for (i, (&ok, &tang)) in nc.per_index.iter().zip(&tg).enumerate() {
            prop_assert!(!ok || tang, "column {} passes non-cover but fails tangent", i);
        }
    }

    #[test]
    fn interior_screen_only_removes_unused_columns(seed in any::<u64>(), n in 2usize..5, p in 5usize..12, eta in 0.01f64..1.0) {
        let t = tol();
        let mut s = sampler(seed);
        let mut cols: Vec<Vector> = (0..p).map(|_| s.gaussian_vec(n)).collect();
        let a = s.index(p);
        let b = s.index(p);
        cols.push(cols[a].add(&cols[b]).scaled(0.25));
        let x = from_cols(n, &cols);
        let y: Vector = s.unit_sphere(n);
        let removable = interior_screen(&x, &t);
        prop_assert!(removable.contains(&p));
        let r = nn_lasso_cd(&x, &y, eta, None, &t).unwrap();
        prop_assert!(r.support.iter().all(|j| !removable.contains(j)));
    }
}

proptest! {
    #![proptest_config(cfg(16))]

    #[test]
    fn synthetic_data_is_reproducible(seed in any::<u64>(), stream in any::<u32>()) {
        let rng = Rng::new(seed).with_stream(stream as u64);
        let (a, na) = gen_synthetic(12, 30, 0.1, 5, &rng);
        let (b, nb) = gen_synthetic(12, 30, 0.1, 5, &rng);
        prop_assert_eq!(a.x.data(), b.x.data());
        prop_assert_eq!(a.y.as_slice(), b.y.as_slice());
        prop_assert_eq!(na, nb);
        prop_assert!((a.y.norm() - 1.0).abs() <= 1e-14);
        prop_assert_eq!(a.beta.iter().filter(|&&v| v != 0.0).count(), 5);
    }

    #[test]
    fn unit_sphere_threshold_matches_symmetrized_interval(seed in any::<u64>(), n in 2usize..8, p in 2usize..20) {
        let (d, _) = gen_synthetic(n, p, 0.1, 2.min(p), &Rng::new(seed));
        let sym = symmetrize_design(&d.x);
        let thr = eta_max_unit_sphere(&sym, &d.y, &tol()).unwrap();
        let ls = eta_max_ls(&sym, &d.y, 1.0);
        prop_assert!(close(thr, ls, 1e-12));
    }
}

#[test]
fn rng_moments() {
    let mut s = sampler(42);
    let k = 100_000;
    let xs: Vec<f64> = (0..k).map(|_| s.gaussian()).collect();
    let mean = xs.iter().sum::<f64>() / k as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (k - 1) as f64;
    assert!(mean.abs() < 0.02, "mean {mean}");
    assert!((var - 1.0).abs() < 0.02, "var {var}");
    let us: Vec<f64> = (0..k).map(|_| s.uniform()).collect();
    let um = us.iter().sum::<f64>() / k as f64;
    assert!((um - 0.5).abs() < 0.01, "uniform mean {um}");
    assert!(us.iter().all(|&u| (0.0..1.0).contains(&u)));
}

#[test]
fn rng_streams_are_independent_of_consumption_order() {
    let root = Rng::new(9);
    let a: Vec<Vector> = (0..4).map(|k| root.with_stream(k).draw_gaussian::<f64>(5).0).collect();
    let b: Vec<Vector> = (0..4).rev().map(|k| root.with_stream(k).draw_gaussian::<f64>(5).0).collect();
    for (x, y) in a.iter().zip(b.iter().rev()) {
        assert_eq!(x.as_slice(), y.as_slice());
    }
    let (first, next) = root.draw_gaussian::<f64>(3);
    let (second, _) = next.draw_gaussian::<f64>(3);
    let (both, _) = root.draw_gaussian::<f64>(6);
    assert_eq!(&both.as_slice()[..3], first.as_slice());
    assert_eq!(&both.as_slice()[3..], second.as_slice());
}

/// Brute-force minimization of `||A l - b||` over a grid on `[0, 3]^2`.
fn nnls_grid(a: &Matrix, b: &[f64]) -> f64 {
    let mut best = f64::INFINITY;
    let steps = 600;
    for i in 0..=steps {
        for j in 0..=steps {
            let l = [3.0 * i as f64 / steps as f64, 3.0 * j as f64 / steps as f64];
            best = best.min(a.mul_vec(&l).sub(b).norm());
        }
    }
    best
}

#[test]
fn nnls_matches_grid_search() {
    let cases: [(&[f64], &[f64]); 3] = [
        (&[1.0, 0.0, 1.0, 1.0, 0.0, 1.0], &[1.0, 2.0, -1.0]),
        (&[2.0, -1.0, 0.5, 1.0, 1.0, 0.0], &[-1.0, 0.0, 1.0]),
        (&[1.0, 1.0, 1.0, -1.0, 0.0, 0.0], &[1.0, 3.0, 2.0]),
    ];
    for (data, b) in cases {
        let a = Matrix::new(3, 2, data.to_vec()).unwrap();
        let sol = nnls(&a, b, &tol()).unwrap();
        assert!(sol.lambda.iter().all(|&l| l >= 0.0));
        let grid = nnls_grid(&a, b);
        let got = sol.residual.norm();
        assert!(got <= grid + 1e-12, "nnls {got} worse than grid {grid}");
        assert!(grid - got <= 5e-3, "grid {grid} far from nnls {got}");
    }
}

#[test]
fn nnls_frozen_values() {
    // A = [[1, 1], [0, 1], [1, 0]], b = (2, -1, 3): optimum at lambda = (2.5, 0).
    let a = Matrix::new(3, 2, vec![1.0, 1.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
    let sol = nnls(&a, &[2.0, -1.0, 3.0], &tol()).unwrap();
    assert!((sol.lambda[0] - 2.5).abs() < 1e-14);
    assert_eq!(sol.lambda[1], 0.0);
    assert!((sol.residual.norm() - 1.5f64.sqrt()).abs() < 1e-14);
}

#[test]
fn planar_fan_extremes_by_angle() {
    // Rays at angles 10..=80 degrees plus duplicates of the two ends.
    let mut rays: Vec<Vector> = (1..=8)
        .map(|k| {
            let a = (10.0 * k as f64).to_radians();
            Vector::from_f64(&[a.cos(), a.sin()])
        })
        .collect();
    rays.push(rays[0].scaled(4.0));
    rays.push(rays[7].scaled(0.3));
    let z = RaySet::new(2, rays, None, &tol()).unwrap();
    let r = ext_ray_id(&z, &tol()).unwrap();
    assert_eq!(r.kept, vec![0, 7, 8, 9]);
    assert_eq!(set(&r.kept), angular_extremes(&z));
    assert_eq!(r.kept_classes(), 2);
}

#[test]
fn cv_prefers_small_weights_without_noise_and_large_with_pure_noise() {
    let t = tol();
    let (clean, next) = gen_synthetic(40, 20, 0.0, 2, &Rng::new(5));
    let cv = kfold_cv(&clean.x, &clean.y, 5, 30, &next, &t).unwrap();
    let top = cv.eta_grid[0];
    assert_eq!(cv.eta_grid.len(), 30);
    assert_eq!(cv.cv_mse.len(), 30);
    assert!(cv.eta_grid.windows(2).all(|w| w[0] > w[1]));
    assert!(cv.eta_cv <= top * 1e-2 * 1.0001, "noiseless eta_cv {} vs top {top}", cv.eta_cv);
    assert!(cv.eta_1se >= cv.eta_cv);

    let (noise, next) = gen_synthetic(40, 20, -1.0, 0, &Rng::new(6));
    let cv = kfold_cv(&noise.x, &noise.y, 5, 30, &next, &t).unwrap();
    assert!(cv.eta_1se >= cv.eta_grid[0] * 0.1, "pure-noise eta_1se {} vs top {}", cv.eta_1se, cv.eta_grid[0]);
}

#[test]
fn single_precision_agrees_with_double_on_planar_fan() {
    let angles = [15.0f64, 30.0, 45.0, 60.0, 75.0];
    let r64: Vec<Vector> = angles.iter().map(|a| Vector::from_f64(&[a.to_radians().cos(), a.to_radians().sin()])).collect();
    let r32: Vec<Vector32> = r64.iter().map(|v| v.cast()).collect();
    let z64 = RaySet::new(2, r64, None, &tol()).unwrap();
    let t32 = Tolerances32::default();
    let z32 = RaySet32::new(2, r32, None, &t32).unwrap();
    let a = ext_ray_id(&z64, &tol()).unwrap();
    let b = ext_ray_id(&z32, &t32).unwrap();
    assert_eq!(a.kept, vec![0, 4]);
    assert_eq!(a.kept, b.kept);
}
