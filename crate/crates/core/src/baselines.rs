//! Comparison methods: projected dual subgradient (DGM), Nesterov-accelerated
//! dual gradient (FDGM) and the Newton-like diagonally scaled dual gradient
//! (NDGM). None of them keeps the realized demand feasible.
//!
//! All three start from `lambda_bar * e_m`, and their users respond on the
//! compact box so that a zero price produces a finite (if infeasible) demand.

use alloc::vec::Vec;

use crate::agents::{best_response_profile_in, ResponseDomain};
use crate::error::{check_len, Error, Result};
use crate::metrics::Iterate;
use crate::problem::{NumProblem, ProblemConstants, Utility};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    Dgm,
    Fdgm,
    Ndgm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineParams {
    pub kind: BaselineKind,
    /// DGM: the step `gamma`. FDGM: unused (steps are `1/L`). NDGM: damping on `D_t`.
    pub step: f64,
    pub horizon: u64,
    /// Floor on the NDGM curvature estimate.
    pub epsilon_reg: f64,
}

pub const DEFAULT_EPSILON_REG: f64 = 1e-6;

impl BaselineParams {
    /// DGM: `1/L`. FDGM: `1/L`. NDGM: `1 / max_i |{j : A_ji = 1}|`.
    pub fn defaults(kind: BaselineKind, problem: &NumProblem, constants: &ProblemConstants, horizon: u64) -> Self {
        let step = match kind {
            BaselineKind::Dgm | BaselineKind::Fdgm => 1.0 / constants.dual_smoothness,
            BaselineKind::Ndgm => {
                let widest = problem.a().col_sums().into_iter().max().unwrap_or(1).max(1);
                1.0 / widest as f64
            }
        };
        Self {
            kind,
            step,
            horizon,
            epsilon_reg: DEFAULT_EPSILON_REG,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidConfig("baseline step must be positive"));
        }
        if !(self.epsilon_reg.is_finite() && self.epsilon_reg > 0.0) {
            return Err(Error::InvalidConfig("epsilon_reg must be positive"));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1"));
        }
        Ok(())
    }
}

fn respond(problem: &NumProblem, lambda: &[f64]) -> Result<Vec<f64>> {
    best_response_profile_in(problem, lambda, ResponseDomain::Compact)
}

/// `max{0, lambda + D (A x - c)}` for a diagonal `D` given by `scaling`.
pub fn scaled_dual_step(lambda: &[f64], x: &[f64], problem: &NumProblem, scaling: &[f64]) -> Result<Vec<f64>> {
    check_len("dual vector", problem.m(), lambda.len())?;
    check_len("scaling", problem.m(), scaling.len())?;
    let residual = problem.constraint_residual(x)?;
    Ok(lambda
        .iter()
        .zip(residual.iter().zip(scaling))
        .map(|(l, (r, d))| (l + d * r).max(0.0))
        .collect())
}

/// `max{0, lambda + step (A x - c)}`
pub fn dgm_step(lambda: &[f64], x: &[f64], problem: &NumProblem, step: f64) -> Result<Vec<f64>> {
    scaled_dual_step(lambda, x, problem, &alloc::vec![step; problem.m()])
}

pub fn dgm_trial(problem: &NumProblem, constants: &ProblemConstants, params: &BaselineParams) -> Result<Vec<Iterate>> {
    dgm_trial_from(problem, params, alloc::vec![constants.lambda_bar; problem.m()])
}

pub fn dgm_trial_from(problem: &NumProblem, params: &BaselineParams, initial: Vec<f64>) -> Result<Vec<Iterate>> {
    params.check()?;
    check_len("initial duals", problem.m(), initial.len())?;
    let mut lambda = initial;
    let mut out = Vec::with_capacity(params.horizon as usize);
    for t in 1..=params.horizon {
        let x = respond(problem, &lambda)?;
        let next = dgm_step(&lambda, &x, problem, params.step)?;
        out.push(Iterate { t, x, lambda });
        lambda = next;
    }
    Ok(out)
}

/// Iterate and extrapolation point of the accelerated method; `t` starts at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FdgmState {
    pub lambda: Vec<f64>,
    pub y: Vec<f64>,
    pub t: u64,
}

impl FdgmState {
    pub fn initial(lambda: Vec<f64>) -> Self {
        Self {
            y: lambda.clone(),
            lambda,
            t: 1,
        }
    }
}

/// `lambda+ = max{0, y + (A x(y) - c) / L}`, `y+ = lambda+ + (t-1)/(t+2) (lambda+ - lambda)`.
/// `x_at_y` is the demand at the extrapolated prices.
pub fn fdgm_step(state: &FdgmState, x_at_y: &[f64], problem: &NumProblem, inv_smoothness: f64) -> Result<FdgmState> {
    let next = dgm_step(&state.y, x_at_y, problem, inv_smoothness)?;
    let t = state.t as f64;
    let beta = (t - 1.0) / (t + 2.0);
    let y = next
        .iter()
        .zip(&state.lambda)
        .map(|(n, l)| n + beta * (n - l))
        .collect();
    Ok(FdgmState {
        lambda: next,
        y,
        t: state.t + 1,
    })
}

/// Iterates record the projected dual `lambda^t` and the demand `x(y^t)` at
/// the extrapolated prices, which may leave the non-negative orthant.
pub fn fdgm_trial(problem: &NumProblem, constants: &ProblemConstants, horizon: u64) -> Result<Vec<Iterate>> {
    if horizon == 0 {
        return Err(Error::InvalidConfig("horizon must be at least 1"));
    }
    let inv_l = 1.0 / constants.dual_smoothness;
    let mut state = FdgmState::initial(alloc::vec![constants.lambda_bar; problem.m()]);
    let mut out = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        let x = respond(problem, &state.y)?;
        let next = fdgm_step(&state, &x, problem, inv_l)?;
        out.push(Iterate {
            t: state.t,
            x,
            lambda: state.lambda,
        });
        state = next;
    }
    Ok(out)
}

/// Diagonal `D_jj = 1 / max(eps, h_j)` with `h_j = sum_i A_ji / |f_i''(x_i)|`,
/// the diagonal of the dual Hessian estimate at the current demand.
pub fn ndgm_scaling(problem: &NumProblem, x: &[f64], epsilon_reg: f64) -> Result<Vec<f64>> {
    check_len("primal vector", problem.n(), x.len())?;
    let sensitivity: Vec<f64> = problem
        .utilities()
        .iter()
        .zip(x)
        .map(|(u, &xi)| {
            let k = u.curvature(xi);
            if k > 0.0 && k.is_finite() {
                1.0 / k
            } else {
                0.0
            }
        })
        .collect();
    let h = problem.a().mul_vec(&sensitivity)?;
    Ok(h.into_iter().map(|hj| 1.0 / hj.max(epsilon_reg)).collect())
}

pub fn ndgm_step(lambda: &[f64], x: &[f64], problem: &NumProblem, params: &BaselineParams) -> Result<Vec<f64>> {
    let mut scaling = ndgm_scaling(problem, x, params.epsilon_reg)?;
    for d in &mut scaling {
        *d *= params.step;
    }
    scaled_dual_step(lambda, x, problem, &scaling)
}

pub fn ndgm_trial(problem: &NumProblem, constants: &ProblemConstants, params: &BaselineParams) -> Result<Vec<Iterate>> {
    ndgm_trial_from(problem, params, alloc::vec![constants.lambda_bar; problem.m()])
}

pub fn ndgm_trial_from(problem: &NumProblem, params: &BaselineParams, initial: Vec<f64>) -> Result<Vec<Iterate>> {
    params.check()?;
    check_len("initial duals", problem.m(), initial.len())?;
    let mut lambda = initial;
    let mut out = Vec::with_capacity(params.horizon as usize);
    for t in 1..=params.horizon {
        let x = respond(problem, &lambda)?;
        let next = ndgm_step(&lambda, &x, problem, params)?;
        out.push(Iterate { t, x, lambda });
        lambda = next;
    }
    Ok(out)
}

pub fn run_baseline(problem: &NumProblem, constants: &ProblemConstants, params: &BaselineParams) -> Result<Vec<Iterate>> {
    match params.kind {
        BaselineKind::Dgm => dgm_trial(problem, constants, params),
        BaselineKind::Fdgm => fdgm_trial(problem, constants, params.horizon),
        BaselineKind::Ndgm => ndgm_trial(problem, constants, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::BinaryMatrix;
    use crate::problem::{compute_constants, UtilitySpec};
    use crate::test_support::tiny;
    use alloc::vec;

    #[test]
    fn dgm_arithmetic() {
        let p = tiny();
        // A x - c = 0.2
        let next = dgm_step(&[1.0], &[0.6, 0.6], &p, 0.5).unwrap();
        assert!((next[0] - 1.1).abs() < 1e-12);
        // A x - c = -0.5 projects to zero
        assert_eq!(dgm_step(&[0.1], &[0.25, 0.25], &p, 0.5).unwrap(), vec![0.0]);
        assert_eq!(dgm_step(&[0.7], &[0.5, 0.5], &p, 0.5).unwrap(), vec![0.7]);
    }

    #[test]
    fn uniform_scaling_is_dgm() {
        let p = tiny();
        for (l, x) in [(1.0, [0.6, 0.6]), (0.3, [0.1, 0.05]), (4.0, [2.0, 0.0])] {
            assert_eq!(
                scaled_dual_step(&[l], &x, &p, &[0.37]).unwrap(),
                dgm_step(&[l], &x, &p, 0.37).unwrap()
            );
        }
    }

    #[test]
    fn first_fdgm_step_has_no_momentum() {
        let p = tiny();
        let k = compute_constants(&p).unwrap();
        let s = FdgmState::initial(vec![3.0]);
        let x = respond(&p, &s.y).unwrap();
        let next = fdgm_step(&s, &x, &p, 1.0 / k.dual_smoothness).unwrap();
        assert_eq!(next.y, next.lambda);
        assert_eq!(next.lambda, dgm_step(&[3.0], &x, &p, 1.0 / k.dual_smoothness).unwrap());
    }

    #[test]
    fn ndgm_regularizer_caps_the_scaling() {
        let a = BinaryMatrix::from_rows(&[[1u8, 1]]).unwrap();
        let u = UtilitySpec::ensemble(1e12);
        let p = NumProblem::new(a, vec![1.0], vec![u; 2]).unwrap();
        let d = ndgm_scaling(&p, &[0.0, 0.0], 1e-6).unwrap();
        assert_eq!(d, vec![1e6]);
        assert!(d.iter().all(|d| d.is_finite()));
    }

    #[test]
    fn ndgm_default_damping() {
        let a = BinaryMatrix::from_rows(&[[1u8, 1], [1, 0], [1, 0]]).unwrap();
        let p = NumProblem::new(a, vec![1.0; 3], vec![UtilitySpec::ensemble(1.0); 2]).unwrap();
        let k = compute_constants(&p).unwrap();
        let params = BaselineParams::defaults(BaselineKind::Ndgm, &p, &k, 5);
        assert!((params.step - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn duals_stay_non_negative() {
        let p = tiny();
        let k = compute_constants(&p).unwrap();
        for kind in [BaselineKind::Dgm, BaselineKind::Fdgm, BaselineKind::Ndgm] {
            let params = BaselineParams::defaults(kind, &p, &k, 200);
            let run = run_baseline(&p, &k, &params).unwrap();
            assert_eq!(run.len(), 200);
            assert!(run.iter().all(|it| it.lambda.iter().all(|&l| l >= 0.0)));
        }
    }
}
