#![allow(dead_code)]

use sdgm_core::{BinaryMatrix, GeneratorConfig, NumProblem, UtilitySpec};

/// All eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

pub fn dense_gram(a: &BinaryMatrix) -> Vec<Vec<f64>> {
    let n = a.cols();
    let mut g = vec![vec![0.0; n]; n];
    for (i, gi) in g.iter_mut().enumerate() {
        for (k, gik) in gi.iter_mut().enumerate() {
            *gik = (0..a.rows()).map(|j| (a.get(j, i) * a.get(j, k)) as f64).sum();
        }
    }
    g
}

/// `A A^T e` by explicit triple loop.
pub fn row_weights_naive(a: &BinaryMatrix) -> Vec<u64> {
    let (m, n) = (a.rows(), a.cols());
    let mut out = vec![0u64; m];
    for (j, w) in out.iter_mut().enumerate() {
        for k in 0..m {
            for i in 0..n {
                *w += (a.get(j, i) * a.get(k, i)) as u64;
            }
        }
    }
    out
}

pub fn problem_from(rows: &[Vec<u8>], c: Vec<f64>, theta: &[f64]) -> NumProblem {
    let a = BinaryMatrix::from_rows(rows).unwrap();
    let u = theta.iter().map(|&t| UtilitySpec::ensemble(t)).collect();
    NumProblem::new(a, c, u).unwrap()
}

pub fn tiny() -> NumProblem {
    problem_from(&[vec![1, 1]], vec![1.0], &[1.0, 1.0])
}

/// Smaller networks than the full study so property suites stay fast.
pub fn small_config(seed: u64) -> GeneratorConfig {
    GeneratorConfig {
        n_range: (4, 12),
        m_range: (2, 6),
        ..GeneratorConfig::default()
    }
    .with_seed(seed)
}

pub fn max_violation(problem: &NumProblem, x: &[f64]) -> f64 {
    problem
        .constraint_residual(x)
        .unwrap()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest feasible value of `x_i` with the other coordinates fixed, or
/// `None` if they already violate a constraint containing `i`.
fn room(problem: &NumProblem, x: &[f64], i: usize) -> Option<f64> {
    let a = problem.a();
    let mut best = f64::INFINITY;
    for j in 0..a.rows() {
        if a.get(j, i) == 0 {
            continue;
        }
        let used: f64 = (0..a.cols()).filter(|&k| k != i).map(|k| a.get(j, k) as f64 * x[k]).sum();
        best = best.min(problem.capacities()[j] - used);
    }
    (best >= 0.0).then_some(best)
}

fn scan(problem: &NumProblem, lo: &[f64], hi: &[f64], step: f64) -> (f64, Vec<f64>) {
    // The objective is increasing, so the last user takes all remaining room.
    let n = problem.n();
    let free = n - 1;
    let counts: Vec<usize> = (0..free).map(|i| ((hi[i] - lo[i]) / step).round() as usize + 1).collect();
    let total: usize = counts.iter().product();
    let mut best = (f64::NEG_INFINITY, vec![0.0; n]);
    let mut x = vec![0.0; n];
    for mut idx in 0..total {
        for i in 0..free {
            x[i] = (lo[i] + (idx % counts[i]) as f64 * step).max(0.0);
            idx /= counts[i];
        }
        x[free] = 0.0;
        let Some(r) = room(problem, &x, free) else { continue };
        x[free] = r;
        if problem.constraint_residual(&x).unwrap().iter().any(|&v| v > 1e-12) {
            continue;
        }
        let f = problem.objective(&x);
        if f > best.0 {
            best = (f, x.clone());
        }
    }
    best
}

/// Brute-force maximum of the objective over the feasible set, for `n <= 3`.
/// Coarse grid first, then successively finer grids around the incumbent,
/// ending at resolution `1e-5`.
pub fn grid_optimum(problem: &NumProblem) -> f64 {
    let n = problem.n();
    assert!((2..=3).contains(&n));
    let cap = problem.max_capacity();
    let free = n - 1;
    let (mut best, mut x) = scan(problem, &vec![0.0; free], &vec![cap; free], if n == 2 { 1e-5 } else { 1e-2 });
    if n == 3 {
        for (step, half) in [(1e-4, 2e-2), (1e-5, 2e-4)] {
            let lo: Vec<f64> = x[..free].iter().map(|v| (v - half).max(0.0)).collect();
            let hi: Vec<f64> = x[..free].iter().map(|v| (v + half).min(cap)).collect();
            let (f, y) = scan(problem, &lo, &hi, step);
            if f > best {
                best = f;
                x = y;
            }
        }
    }
    best
}

/// Tiny random instances for the brute-force comparison.
pub fn tiny_config(seed: u64) -> GeneratorConfig {
    GeneratorConfig {
        n_range: (2, 3),
        m_range: (1, 2),
        theta_range: (1.0, 3.0),
        ..GeneratorConfig::default()
    }
    .with_seed(seed)
}
