//! Reference optimum `(x*, f*, lambda*)` and its KKT certificate.

use alloc::vec::Vec;

use crate::agents::{best_response_profile_in, prices_from_duals, ResponseDomain};
use crate::error::{check_len, Error, Result};
use crate::linalg::max_abs_diff;
use crate::problem::{NumProblem, ProblemConstants, Utility};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSolution {
    pub x_star: Vec<f64>,
    pub f_star: f64,
    pub lambda_star: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations_used: u64,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const MAX_ITERATIONS: u64 = 1_000_000;
const ORACLE_CAP_FACTOR: f64 = 2.0;

/// `q(lambda) = sum_i max_x [f_i(x) - p_i x] + lambda^T c`
pub fn dual_value(problem: &NumProblem, lambda: &[f64]) -> Result<f64> {
    dual_value_in(problem, lambda, ResponseDomain::Native)
}

pub fn dual_value_in(problem: &NumProblem, lambda: &[f64], domain: ResponseDomain) -> Result<f64> {
    let x = best_response_profile_in(problem, lambda, domain)?;
    let prices = prices_from_duals(problem, lambda)?;
    let users: f64 = problem
        .utilities()
        .iter()
        .zip(x.iter().zip(prices.iter()))
        .map(|(u, (&xi, &pi))| u.value(xi) - pi * xi)
        .sum();
    let priced: f64 = lambda.iter().zip(problem.capacities()).map(|(l, c)| l * c).sum();
    Ok(users + priced)
}

/// `grad q(lambda) = c - A x(lambda)`
pub fn dual_gradient(problem: &NumProblem, lambda: &[f64]) -> Result<Vec<f64>> {
    dual_gradient_in(problem, lambda, ResponseDomain::Native)
}

pub fn dual_gradient_in(problem: &NumProblem, lambda: &[f64], domain: ResponseDomain) -> Result<Vec<f64>> {
    let x = best_response_profile_in(problem, lambda, domain)?;
    Ok(problem.constraint_residual(&x)?.into_iter().map(|r| -r).collect())
}

/// Largest violation among primal feasibility, dual feasibility, projected
/// stationarity of each user's Lagrangian term, and complementary slackness.
pub fn kkt_residual(problem: &NumProblem, x: &[f64], lambda: &[f64]) -> Result<f64> {
    check_len("dual vector", problem.m(), lambda.len())?;
    let residual = problem.constraint_residual(x)?;
    let prices = prices_from_duals(problem, lambda)?;

    let primal = residual.iter().fold(0.0f64, |acc, r| acc.max(*r));
    let dual = lambda.iter().fold(0.0f64, |acc, l| acc.max(-l));
    let stationarity = problem
        .utilities()
        .iter()
        .zip(x.iter().zip(prices.iter()))
        .map(|(u, (&xi, &pi))| {
            let (lower, upper) = u.domain();
            let g = u.derivative(xi) - pi;
            // Ascent direction blocked by the box counts as stationary.
            if (xi <= lower && g < 0.0) || (xi >= upper && g > 0.0) {
                0.0
            } else {
                g.abs()
            }
        })
        .fold(0.0f64, f64::max);
    let slackness = lambda
        .iter()
        .zip(&residual)
        .map(|(l, r)| (l * r).abs())
        .fold(0.0f64, f64::max);
    Ok(primal.max(dual).max(stationarity).max(slackness))
}

/// Minimizes the dual over `lambda >= 0` with accelerated projected gradient
/// and gradient-based momentum restart.
///
/// Users respond on `[lower_i, 2 max_j c_j]`. On that box `q` is finite
/// everywhere and smooth with constant `rho(A^T A) / mu_o`, `mu_o` being the
/// curvature bound over the wider box. The box strictly contains the feasible
/// region, so the optimal response never touches the cap and every minimizer
/// is also a minimizer of the unrestricted dual.
/// Stops once the dual step is below `tolerance / 100` and the KKT residual
/// is below `tolerance`.
pub fn solve_optimal(problem: &NumProblem, constants: &ProblemConstants, tolerance: f64) -> Result<OptimalSolution> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Error::InvalidConfig("tolerance must be positive"));
    }
    let m = problem.m();
    let cap = ORACLE_CAP_FACTOR * problem.max_capacity();
    let domain = ResponseDomain::Capped(cap);
    let mu = problem
        .utilities()
        .iter()
        .map(|u| u.min_curvature(u.lower, cap.max(u.lower)))
        .fold(f64::INFINITY, f64::min);
    let inv_l = mu / constants.spectral;
    let mut lambda = alloc::vec![constants.lambda_bar; m];
    let mut y = lambda.clone();
    let mut k: u64 = 1;
    let mut best_residual = f64::INFINITY;

    for iteration in 1..=MAX_ITERATIONS {
        let x = best_response_profile_in(problem, &y, domain)?;
        let residual = problem.constraint_residual(&x)?;
        let next: Vec<f64> = y
            .iter()
            .zip(&residual)
            .map(|(yj, rj)| (yj + inv_l * rj).max(0.0))
            .collect();

        let restart = y
            .iter()
            .zip(next.iter().zip(&lambda))
            .map(|(yj, (nj, lj))| (yj - nj) * (nj - lj))
            .sum::<f64>()
            > 0.0;
        let step = max_abs_diff(&next, &lambda);
        if restart {
            k = 1;
            y.clone_from(&next);
        } else {
            let beta = (k as f64 - 1.0) / (k as f64 + 2.0);
            for ((yj, nj), lj) in y.iter_mut().zip(&next).zip(&lambda) {
                *yj = nj + beta * (nj - lj);
            }
            k += 1;
        }
        lambda = next;

        if step <= tolerance * 1e-2 {
            let x = best_response_profile_in(problem, &lambda, domain)?;
            let kkt = kkt_residual(problem, &x, &lambda)?;
            best_residual = best_residual.min(kkt);
            if kkt <= tolerance {
                let f_star = problem.objective(&x);
                return Ok(OptimalSolution {
                    x_star: x,
                    f_star,
                    lambda_star: lambda,
                    kkt_residual: kkt,
                    iterations_used: iteration,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        what: "dual oracle",
        iterations: MAX_ITERATIONS,
        residual: best_residual,
    })
}
