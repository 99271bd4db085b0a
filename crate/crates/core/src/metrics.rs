//! Per-iteration records and the quantities reported for them.

use alloc::vec::Vec;

use crate::error::Result;
use crate::problem::NumProblem;

/// Posted duals and the demand they produced in round `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub t: u64,
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// Prefix sums of `f_star - f(x^t)`.
pub fn regret_series(objectives: &[f64], f_star: f64) -> Vec<f64> {
    objectives
        .iter()
        .scan(0.0, |acc, &f| {
            *acc += f_star - f;
            Some(*acc)
        })
        .collect()
}

/// `||[A x - c]_+||_2`
pub fn infeasibility_norm(problem: &NumProblem, x: &[f64]) -> Result<f64> {
    let r = problem.constraint_residual(x)?;
    Ok(positive_part_norm(&r))
}

pub(crate) fn positive_part_norm(residual: &[f64]) -> f64 {
    libm::sqrt(residual.iter().map(|r| r.max(0.0)).map(|r| r * r).sum::<f64>())
}

/// `min_j (c - A x)_j`; non-negative iff `x` is feasible.
pub fn min_slack(problem: &NumProblem, x: &[f64]) -> Result<f64> {
    Ok(problem
        .constraint_residual(x)?
        .iter()
        .map(|r| -r)
        .fold(f64::INFINITY, f64::min))
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: u64,
    pub objective: f64,
    pub regret_cum: f64,
    pub infeasibility: f64,
    pub distance_to_opt: f64,
    pub max_lambda: f64,
    pub min_slack: f64,
}

/// Evaluates every iterate against the reference optimum `(x_star, f_star)`.
pub fn trace_rows(problem: &NumProblem, iterates: &[Iterate], x_star: &[f64], f_star: f64) -> Result<Vec<TraceRow>> {
    let mut regret = 0.0;
    iterates
        .iter()
        .map(|it| {
            let residual = problem.constraint_residual(&it.x)?;
            let objective = problem.objective(&it.x);
            regret += f_star - objective;
            Ok(TraceRow {
                t: it.t,
                objective,
                regret_cum: regret,
                infeasibility: positive_part_norm(&residual),
                distance_to_opt: distance(&it.x, x_star),
                max_lambda: it.lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                min_slack: residual.iter().map(|r| -r).fold(f64::INFINITY, f64::min),
            })
        })
        .collect()
}
