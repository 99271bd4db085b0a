//! Safe dual gradient method.
//!
//! Prices start at the uniform cap `lambda_bar`. Each round the users respond
//! to `p = A^T lambda`, and every dual coordinate moves by a fixed amount
//! depending only on the sign of the margin-shifted constraint
//! `[A x + Delta^t - c]_j`:
//!
//! * negative: `lambda_j <- max(0, lambda_j - gamma_minus)`
//! * non-negative: `lambda_j <- min(lambda_bar, lambda_j + gamma_plus)`
//!
//! With `gamma_minus = gamma / sqrt(t)`, `gamma_plus = (m - 1) gamma_minus` and
//! `Delta_j = [A A^T e_m]_j gamma_minus / mu`, every realized demand satisfies
//! `A x^t <= c`, and the cumulative regret is `O(sqrt(T))`.

use alloc::vec::Vec;

use crate::agents::best_response_profile;
use crate::error::{check_len, Error, Result};
use crate::metrics::Iterate;
use crate::problem::{NumProblem, ProblemConstants};

#[derive(Debug, Clone, PartialEq)]
pub struct SdgmParams {
    pub gamma: f64,
    pub horizon: u64,
    pub lambda_bar: f64,
    /// `[A A^T e_m]_j / mu`
    pub margin_scale: Vec<f64>,
}

impl SdgmParams {
    pub fn new(constants: &ProblemConstants, gamma: f64, horizon: u64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidConfig("gamma must be positive and finite"));
        }
        if horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1"));
        }
        Ok(Self {
            gamma,
            horizon,
            lambda_bar: constants.lambda_bar,
            margin_scale: constants
                .row_weights
                .iter()
                .map(|&w| w as f64 / constants.mu)
                .collect(),
        })
    }

    /// Parameters with the regret-minimizing `gamma` from [`default_gamma`].
    pub fn with_default_gamma(problem: &NumProblem, constants: &ProblemConstants, horizon: u64) -> Result<Self> {
        Self::new(constants, default_gamma(problem, constants), horizon)
    }

    pub fn m(&self) -> usize {
        self.margin_scale.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSizes {
    pub minus: f64,
    pub plus: f64,
}

/// `gamma_minus = gamma / sqrt(t)`, `gamma_plus = (m - 1) gamma_minus`.
pub fn step_sizes(params: &SdgmParams, t: u64, m: usize) -> StepSizes {
    debug_assert!(t >= 1);
    let minus = params.gamma / libm::sqrt(t as f64);
    StepSizes {
        minus,
        plus: m.saturating_sub(1) as f64 * minus,
    }
}

/// `Delta^t_j = margin_scale_j * gamma_minus(t)`
pub fn safety_margin(params: &SdgmParams, t: u64) -> Vec<f64> {
    let minus = step_sizes(params, t, params.m()).minus;
    params.margin_scale.iter().map(|s| s * minus).collect()
}

/// Dual iterate and the (1-based) round it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    pub lambda: Vec<f64>,
    pub t: u64,
}

impl DualState {
    pub fn initial(params: &SdgmParams) -> Self {
        Self {
            lambda: alloc::vec![params.lambda_bar; params.m()],
            t: 1,
        }
    }
}

/// One price update from the demand `x` observed at `state.lambda`.
pub fn dual_step(state: &DualState, x: &[f64], problem: &NumProblem, params: &SdgmParams) -> Result<DualState> {
    check_len("dual state", problem.m(), state.lambda.len())?;
    check_len("safety margin", problem.m(), params.m())?;
    let steps = step_sizes(params, state.t, problem.m());
    let margin = safety_margin(params, state.t);
    let residual = problem.constraint_residual(x)?;
    let lambda = state
        .lambda
        .iter()
        .zip(residual.iter().zip(&margin))
        .map(|(&l, (&r, &d))| {
            // Ties go up.
            if r + d < 0.0 {
                (l - steps.minus).max(0.0)
            } else {
                (l + steps.plus).min(params.lambda_bar)
            }
        })
        .collect();
    Ok(DualState {
        lambda,
        t: state.t + 1,
    })
}

/// The constant `C = ||c||_1 + lambda_bar m (||A^T e_m||^2 + rho (m-1)^2 / mu) / mu`
/// of the regret bound.
pub fn regret_constant(problem: &NumProblem, constants: &ProblemConstants) -> f64 {
    let m = problem.m() as f64;
    let col_norm_sq: f64 = problem
        .a()
        .col_sums()
        .iter()
        .map(|&s| (s as f64) * (s as f64))
        .sum();
    let mu = constants.mu;
    problem.capacity_l1()
        + constants.lambda_bar * m * (col_norm_sq + constants.spectral * (m - 1.0) * (m - 1.0) / mu) / mu
}

/// `gamma = sqrt(lambda_bar^2 ||c||_1 / (2 C))`, the minimizer of the regret bound.
pub fn default_gamma(problem: &NumProblem, constants: &ProblemConstants) -> f64 {
    let c = regret_constant(problem, constants);
    libm::sqrt(constants.lambda_bar * constants.lambda_bar * problem.capacity_l1() / (2.0 * c))
}

/// `lambda_bar^2 ||c||_1 sqrt(T) / gamma + 2 C gamma sqrt(T)`
pub fn regret_bound(problem: &NumProblem, constants: &ProblemConstants, gamma: f64, horizon: u64) -> f64 {
    let root_t = libm::sqrt(horizon as f64);
    let lb = constants.lambda_bar;
    lb * lb * problem.capacity_l1() * root_t / gamma + 2.0 * regret_constant(problem, constants) * gamma * root_t
}

/// Runs `params.horizon` rounds. Iterate `t` holds the posted duals and the
/// demand they produced, before the update.
pub fn run_trial(problem: &NumProblem, params: &SdgmParams) -> Result<Vec<Iterate>> {
    let mut state = DualState::initial(params);
    let mut out = Vec::with_capacity(params.horizon as usize);
    for _ in 0..params.horizon {
        let x = best_response_profile(problem, &state.lambda)?;
        let next = dual_step(&state, &x, problem, params)?;
        out.push(Iterate {
            t: state.t,
            x,
            lambda: state.lambda,
        });
        state = next;
    }
    Ok(out)
}
