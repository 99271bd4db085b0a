mod common;

use common::{grid_optimum, max_violation, small_config, tiny, tiny_config};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sdgm_core::oracle::{dual_gradient, dual_value, kkt_residual, DEFAULT_TOLERANCE};
use sdgm_core::{compute_constants, generate_random, solve_optimal, NumProblem};

/// Duals where every user faces a price in `[lambda_bar / 20, ...]`, so all
/// native responses exist.
fn positive_duals(rng: &mut ChaCha8Rng, problem: &NumProblem, lambda_bar: f64) -> Vec<f64> {
    (0..problem.m()).map(|_| rng.random_range(lambda_bar / 20.0..lambda_bar)).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[test]
fn dual_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    for seed in 0..100u64 {
        let p = generate_random(&small_config(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        let lambda = positive_duals(&mut rng, &p, k.lambda_bar);
        let g = dual_gradient(&p, &lambda).unwrap();
        let h = 1e-6;
        for j in 0..p.m() {
            let mut up = lambda.clone();
            let mut down = lambda.clone();
            up[j] += h;
            down[j] -= h;
            let fd = (dual_value(&p, &up).unwrap() - dual_value(&p, &down).unwrap()) / (2.0 * h);
            let scale = g[j].abs().max(1.0);
            assert!((fd - g[j]).abs() <= 1e-5 * scale, "seed {seed} row {j}: fd {fd} vs {}", g[j]);
        }
        checked += 1;
    }
    assert_eq!(checked, 100);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dual_is_convex_along_segments(seed in 0u64..500, rs in any::<u64>(), alpha in 0.0f64..1.0) {
        let p = generate_random(&small_config(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(rs);
        let l1 = positive_duals(&mut rng, &p, k.lambda_bar);
        let l2 = positive_duals(&mut rng, &p, k.lambda_bar);
        let mid: Vec<f64> = l1.iter().zip(&l2).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
        let lhs = dual_value(&p, &mid).unwrap();
        let rhs = alpha * dual_value(&p, &l1).unwrap() + (1.0 - alpha) * dual_value(&p, &l2).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn dual_gradient_is_lipschitz(seed in 0u64..500, rs in any::<u64>()) {
        let p = generate_random(&small_config(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(rs);
        // Duals large enough that responses stay within [0, max_j c_j],
        // where the curvature bound mu holds.
        let floor = 1.0 / (p.max_capacity() + 0.1) * 30.0;
        let l1: Vec<f64> = (0..p.m()).map(|_| rng.random_range(floor..floor + k.lambda_bar)).collect();
        let l2: Vec<f64> = (0..p.m()).map(|_| rng.random_range(floor..floor + k.lambda_bar)).collect();
        let g1 = dual_gradient(&p, &l1).unwrap();
        let g2 = dual_gradient(&p, &l2).unwrap();
        let dg: Vec<f64> = g1.iter().zip(&g2).map(|(a, b)| a - b).collect();
        let dl: Vec<f64> = l1.iter().zip(&l2).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&dg) <= k.dual_smoothness * norm(&dl) * (1.0 + 1e-12));
    }
}

#[test]
fn optimum_dominates_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..5u64 {
        let p = generate_random(&small_config(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        let s = solve_optimal(&p, &k, DEFAULT_TOLERANCE).unwrap();
        assert!(max_violation(&p, &s.x_star) <= 1e-8);
        for _ in 0..1000 {
            // Random direction scaled back onto the feasible set.
            let x: Vec<f64> = (0..p.n()).map(|_| rng.random::<f64>()).collect();
            let load = p.a().mul_vec(&x).unwrap();
            let scale = load
                .iter()
                .zip(p.capacities())
                .map(|(l, c)| c / l)
                .fold(f64::INFINITY, f64::min)
                * rng.random::<f64>();
            let x: Vec<f64> = x.iter().map(|v| v * scale).collect();
            assert!(max_violation(&p, &x) <= 0.0);
            assert!(p.objective(&x) <= s.f_star + 1e-9);
        }
    }
}

#[test]
fn optimum_matches_grid_search_on_tiny_instances() {
    for seed in 0..20u64 {
        let p = generate_random(&tiny_config(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        let s = solve_optimal(&p, &k, DEFAULT_TOLERANCE).unwrap();
        let brute = grid_optimum(&p);
        assert!(s.kkt_residual <= DEFAULT_TOLERANCE);
        assert!((s.f_star - brute).abs() <= 1e-3, "seed {seed}: oracle {} grid {brute}", s.f_star);
        assert!(s.f_star >= brute - 1e-9, "seed {seed}: grid beats oracle by {}", brute - s.f_star);
    }
}

#[test]
fn certified_on_study_sized_instances() {
    for seed in 0..10u64 {
        let p = generate_random(&sdgm_core::GeneratorConfig::default().with_seed(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        let s = solve_optimal(&p, &k, DEFAULT_TOLERANCE).unwrap();
        assert!(s.kkt_residual <= DEFAULT_TOLERANCE, "seed {seed}: {}", s.kkt_residual);
        assert_eq!(kkt_residual(&p, &s.x_star, &s.lambda_star).unwrap(), s.kkt_residual);
        // Strong duality.
        let q = dual_value(&p, &s.lambda_star);
        if let Ok(q) = q {
            assert!((q - s.f_star).abs() <= 1e-6 * s.f_star.abs().max(1.0));
        }
    }
}

#[test]
fn tiny_weak_duality() {
    let p = tiny();
    for l in [0.5, 1.0, 5.0 / 3.0, 3.0, 10.0, 25.0] {
        let q = dual_value(&p, &[l]).unwrap();
        assert!(q >= 2.0 * 0.6f64.ln() - 1e-12);
    }
}

#[test]
fn single_user_rows_recover_native_duals() {
    // Each user alone on its link: x* = c, lambda* = f'(c).
    let p = common::problem_from(&[vec![1, 0], vec![0, 1]], vec![1.0, 1.0], &[2.0, 5.0]);
    let k = compute_constants(&p).unwrap();
    let s = solve_optimal(&p, &k, DEFAULT_TOLERANCE).unwrap();
    assert!(s.x_star.iter().all(|x| (x - 1.0).abs() < 1e-8));
    assert!((s.lambda_star[0] - 2.0 / 1.1).abs() < 1e-7);
    assert!((s.lambda_star[1] - 5.0 / 1.1).abs() < 1e-7);
}
