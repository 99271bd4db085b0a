//! User best responses to posted prices.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{check_len, Error, Result};
use crate::problem::{NumProblem, Utility};

/// Per-user prices `p = A^T lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceVector(Vec<f64>);

impl PriceVector {
    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PriceVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Which box the users optimize over.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ResponseDomain {
    /// Each user's own `[lower_i, upper_i]`.
    #[default]
    Native,
    /// `[lower_i, min(upper_i, max_j c_j)]`. Contains the whole feasible
    /// region, so optima are unchanged, and every price (including zero)
    /// has a finite response.
    Compact,
    /// `[lower_i, min(upper_i, cap)]`.
    Capped(f64),
}

/// The maximizer of `f(x) - price * x` over the utility's domain.
pub fn best_response<U: Utility>(utility: &U, price: f64) -> Result<f64> {
    let (lower, upper) = utility.domain();
    best_response_in_box(utility, price, lower, upper)
}

fn best_response_in_box<U: Utility>(utility: &U, price: f64, lower: f64, upper: f64) -> Result<f64> {
    if price >= utility.derivative(lower) {
        return Ok(lower);
    }
    if price <= 0.0 {
        // f is strictly increasing, so only a finite upper bound stops it.
        return if upper.is_finite() {
            Ok(upper)
        } else {
            Err(Error::UnboundedSubproblem { user: None, price })
        };
    }
    Ok(utility.inverse_derivative(price).clamp(lower, upper))
}

pub fn prices_from_duals(problem: &NumProblem, lambda: &[f64]) -> Result<PriceVector> {
    problem.a().tmul_vec(lambda).map(PriceVector)
}

pub fn best_response_profile(problem: &NumProblem, lambda: &[f64]) -> Result<Vec<f64>> {
    best_response_profile_in(problem, lambda, ResponseDomain::Native)
}

pub fn best_response_profile_in(
    problem: &NumProblem,
    lambda: &[f64],
    domain: ResponseDomain,
) -> Result<Vec<f64>> {
    check_len("dual vector", problem.m(), lambda.len())?;
    let prices = prices_from_duals(problem, lambda)?;
    let cap = match domain {
        ResponseDomain::Native => f64::INFINITY,
        ResponseDomain::Compact => problem.max_capacity(),
        ResponseDomain::Capped(cap) => cap,
    };
    problem
        .utilities()
        .iter()
        .zip(prices.iter())
        .enumerate()
        .map(|(i, (u, &p))| {
            let (lower, upper) = u.domain();
            best_response_in_box(u, p, lower, upper.min(cap.max(lower))).map_err(|e| match e {
                Error::UnboundedSubproblem { price, .. } => Error::UnboundedSubproblem {
                    user: Some(i),
                    price,
                },
                other => other,
            })
        })
        .collect()
}
