mod common;

use common::{max_violation, small_config, tiny};
use proptest::prelude::*;
use sdgm_core::agents::{best_response_profile_in, ResponseDomain};
use sdgm_core::baselines::{
    dgm_trial_from, fdgm_step, fdgm_trial, ndgm_trial_from, run_baseline, BaselineKind, BaselineParams, FdgmState,
};
use sdgm_core::metrics::distance;
use sdgm_core::oracle::{dual_value_in, DEFAULT_TOLERANCE};
use sdgm_core::{compute_constants, generate_random, solve_optimal, GeneratorConfig};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn duals_stay_non_negative(seed in any::<u64>()) {
        let p = generate_random(&small_config(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        for kind in [BaselineKind::Dgm, BaselineKind::Fdgm, BaselineKind::Ndgm] {
            let params = BaselineParams::defaults(kind, &p, &k, 300);
            for it in run_baseline(&p, &k, &params).unwrap() {
                prop_assert!(it.lambda.iter().all(|&l| l >= 0.0));
            }
        }
    }
}

/// Averaged-iterate infeasibility of DGM with step `1/(L sqrt(T))`, started
/// from zero prices, for growing horizons.
#[test]
fn dgm_average_infeasibility_shrinks_with_horizon() {
    for seed in 0..5u64 {
        let p = generate_random(&small_config(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        let values: Vec<f64> = [100u64, 400, 1600]
            .into_iter()
            .map(|t| {
                let mut params = BaselineParams::defaults(BaselineKind::Dgm, &p, &k, t);
                params.step = 10.0 / (k.dual_smoothness * (t as f64).sqrt());
                let run = dgm_trial_from(&p, &params, vec![0.0; p.m()]).unwrap();
                let mut avg = vec![0.0; p.n()];
                for it in &run {
                    for (a, x) in avg.iter_mut().zip(&it.x) {
                        *a += x / t as f64;
                    }
                }
                max_violation(&p, &avg).max(0.0)
            })
            .collect();
        assert!(values[0] > 0.0, "seed {seed}: no infeasibility to shrink");
        assert!(values[0] > values[1] && values[1] > values[2], "seed {seed}: {values:?}");
    }
}

#[test]
fn fdgm_optimum_is_a_fixed_point() {
    for seed in 0..10u64 {
        let p = generate_random(&small_config(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        let opt = solve_optimal(&p, &k, DEFAULT_TOLERANCE).unwrap();
        let state = FdgmState::initial(opt.lambda_star.clone());
        let x = best_response_profile_in(&p, &state.y, ResponseDomain::Compact).unwrap();
        let next = fdgm_step(&state, &x, &p, 1.0 / k.dual_smoothness).unwrap();
        for (a, b) in next.lambda.iter().zip(&opt.lambda_star) {
            assert!((a - b).abs() <= 1e-8, "seed {seed}: {a} vs {b}");
        }
    }
}

/// The dual value ripples, so check the accelerated rate
/// `q(lambda^t) - q* <= 2 L ||lambda^1 - lambda*||^2 / t^2` and that it beats DGM.
#[test]
fn fdgm_dual_gap_follows_the_accelerated_rate() {
    for (seed, p) in std::iter::once((u64::MAX, tiny()))
        .chain((0..10u64).map(|s| (s, generate_random(&small_config(s)).unwrap())))
    {
        let k = compute_constants(&p).unwrap();
        let opt = solve_optimal(&p, &k, DEFAULT_TOLERANCE).unwrap();
        let start = vec![k.lambda_bar; p.m()];
        let r0: f64 = start.iter().zip(&opt.lambda_star).map(|(a, b)| (a - b) * (a - b)).sum();
        let q = |l: &[f64]| dual_value_in(&p, l, ResponseDomain::Compact).unwrap();
        let fast = fdgm_trial(&p, &k, 200).unwrap();
        for it in &fast[1..] {
            let t = it.t as f64;
            let gap = q(&it.lambda) - opt.f_star;
            assert!(gap <= 2.0 * k.dual_smoothness * r0 / (t * t) + 1e-9, "seed {seed} t {t}: gap {gap}");
        }
        let slow = dgm_trial_from(&p, &BaselineParams::defaults(BaselineKind::Dgm, &p, &k, 100), start).unwrap();
        let (gf, gd) = (q(&fast[99].lambda) - opt.f_star, q(&slow[99].lambda) - opt.f_star);
        assert!(gf <= gd + 1e-12, "seed {seed}: fdgm gap {gf} vs dgm gap {gd}");
    }
}

fn iterations_to(target: f64, mut lambdas: impl Iterator<Item = f64>) -> Option<usize> {
    lambdas.position(|l| (l - target).abs() <= 1e-4)
}

#[test]
fn ndgm_reaches_the_optimal_price_before_dgm_on_tiny() {
    let p = tiny();
    let k = compute_constants(&p).unwrap();
    let dgm = BaselineParams::defaults(BaselineKind::Dgm, &p, &k, 5000);
    let ndgm = BaselineParams::defaults(BaselineKind::Ndgm, &p, &k, 5000);
    let start = vec![k.lambda_bar];
    let d = dgm_trial_from(&p, &dgm, start.clone()).unwrap();
    let n = ndgm_trial_from(&p, &ndgm, start).unwrap();
    let d = iterations_to(5.0 / 3.0, d.iter().map(|it| it.lambda[0])).expect("dgm converges");
    let n = iterations_to(5.0 / 3.0, n.iter().map(|it| it.lambda[0])).expect("ndgm converges");
    assert!(n < d, "ndgm {n} vs dgm {d}");
}

#[test]
fn accelerated_and_scaled_methods_end_closer_than_dgm() {
    let trials = 30u64;
    let (mut fdgm_wins, mut ndgm_wins) = (0, 0);
    for seed in 0..trials {
        let p = generate_random(&GeneratorConfig::default().with_seed(seed)).unwrap();
        let k = compute_constants(&p).unwrap();
        let opt = solve_optimal(&p, &k, DEFAULT_TOLERANCE).unwrap();
        let last = |kind| {
            let run = run_baseline(&p, &k, &BaselineParams::defaults(kind, &p, &k, 1000)).unwrap();
            distance(&run.last().unwrap().x, &opt.x_star)
        };
        let dgm = last(BaselineKind::Dgm);
        fdgm_wins += usize::from(last(BaselineKind::Fdgm) < dgm);
        ndgm_wins += usize::from(last(BaselineKind::Ndgm) < dgm);
    }
    let needed = (0.9 * trials as f64).ceil() as usize;
    assert!(fdgm_wins >= needed, "fdgm closer on {fdgm_wins}/{trials}");
    assert!(ndgm_wins >= needed, "ndgm closer on {ndgm_wins}/{trials}");
}
