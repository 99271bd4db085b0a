//! NUM instances: utilities, the binary constraint matrix, capacities, the
//! random ensemble generator and the derived constants every method needs.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, Error, Result};
use crate::linalg::{spectral_radius, BinaryMatrix};

/// Contract a user utility must satisfy: strictly increasing and strongly
/// concave on its (closed) domain.
pub trait Utility {
    fn value(&self, x: f64) -> f64;
    fn derivative(&self, x: f64) -> f64;
    /// `-f''(x)`, non-negative.
    fn curvature(&self, x: f64) -> f64;
    /// The unconstrained stationary point `x` with `f'(x) = price`, for `price > 0`.
    fn inverse_derivative(&self, price: f64) -> f64;
    fn domain(&self) -> (f64, f64);

    /// Smallest curvature over `[lo, hi]`. The default assumes curvature is
    /// monotone on the interval.
    fn min_curvature(&self, lo: f64, hi: f64) -> f64 {
        self.curvature(lo).min(self.curvature(hi))
    }
}

/// `theta * ln(x + shift)` on `[lower, upper]`; `upper` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilitySpec {
    pub theta: f64,
    pub shift: f64,
    pub lower: f64,
    pub upper: f64,
}

impl UtilitySpec {
    pub const DEFAULT_SHIFT: f64 = 0.1;

    pub fn shifted_log(theta: f64, shift: f64, lower: f64, upper: f64) -> Self {
        Self {
            theta,
            shift,
            lower,
            upper,
        }
    }

    /// The ensemble utility: `theta * ln(x + 0.1)` on `[0, inf)`.
    pub fn ensemble(theta: f64) -> Self {
        Self::shifted_log(theta, Self::DEFAULT_SHIFT, 0.0, f64::INFINITY)
    }

    fn check(&self) -> Option<&'static str> {
        if !(self.theta.is_finite() && self.theta > 0.0) {
            Some("theta must be positive and finite")
        } else if !(self.shift.is_finite() && self.shift > 0.0) {
            Some("shift must be positive and finite")
        } else if !(self.lower.is_finite() && self.lower >= 0.0) {
            Some("lower bound must be non-negative and finite")
        } else if self.upper.is_nan() || self.upper <= self.lower {
            Some("upper bound must exceed lower bound")
        } else {
            None
        }
    }
}

impl Utility for UtilitySpec {
    #[inline]
    fn value(&self, x: f64) -> f64 {
        self.theta * libm::log(x + self.shift)
    }

    #[inline]
    fn derivative(&self, x: f64) -> f64 {
        self.theta / (x + self.shift)
    }

    #[inline]
    fn curvature(&self, x: f64) -> f64 {
        let s = x + self.shift;
        self.theta / (s * s)
    }

    #[inline]
    fn inverse_derivative(&self, price: f64) -> f64 {
        self.theta / price - self.shift
    }

    #[inline]
    fn domain(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    fn min_curvature(&self, _lo: f64, hi: f64) -> f64 {
        self.curvature(hi)
    }
}

/// A network utility maximization instance: maximize `sum_i f_i(x_i)`
/// subject to `A x <= c` and `x_i` in each user's domain.
#[derive(Debug, Clone, PartialEq)]
pub struct NumProblem {
    a: BinaryMatrix,
    capacities: Vec<f64>,
    utilities: Vec<UtilitySpec>,
}

impl NumProblem {
    /// Checks dimensions only; use [`validate`] for the structural assumptions.
    pub fn new(a: BinaryMatrix, capacities: Vec<f64>, utilities: Vec<UtilitySpec>) -> Result<Self> {
        check_len("capacities", a.rows(), capacities.len())?;
        check_len("utilities", a.cols(), utilities.len())?;
        Ok(Self {
            a,
            capacities,
            utilities,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    #[inline]
    pub fn a(&self) -> &BinaryMatrix {
        &self.a
    }

    #[inline]
    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    #[inline]
    pub fn utilities(&self) -> &[UtilitySpec] {
        &self.utilities
    }

    pub fn max_capacity(&self) -> f64 {
        self.capacities.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn capacity_l1(&self) -> f64 {
        self.capacities.iter().map(|c| c.abs()).sum()
    }

    /// `f(x) = sum_i f_i(x_i)`
    pub fn objective(&self, x: &[f64]) -> f64 {
        self.utilities.iter().zip(x).map(|(u, &xi)| u.value(xi)).sum()
    }

    /// `A x - c`
    pub fn constraint_residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut ax = self.a.mul_vec(x)?;
        for (r, c) in ax.iter_mut().zip(&self.capacities) {
            *r -= c;
        }
        Ok(ax)
    }
}

/// A violated structural assumption of a [`NumProblem`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonBinaryEntry { row: usize, col: usize, value: u8 },
    ZeroRow { row: usize },
    ZeroColumn { col: usize },
    NonPositiveCapacity { row: usize },
    InvalidUtility { user: usize, reason: &'static str },
    /// `A x~ < c` fails at the interior probe point for this row.
    NoSlaterPoint { row: usize },
}

impl Violation {
    pub fn name(&self) -> &'static str {
        match self {
            Violation::NonBinaryEntry { .. } => "non-binary entry",
            Violation::ZeroRow { .. } => "zero row",
            Violation::ZeroColumn { .. } => "zero column",
            Violation::NonPositiveCapacity { .. } => "non-positive capacity",
            Violation::InvalidUtility { .. } => "invalid utility",
            Violation::NoSlaterPoint { .. } => "no slater point",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonBinaryEntry { row, col, value } => {
                write!(f, "non-binary entry {value} at ({row}, {col})")
            }
            Violation::ZeroRow { row } => write!(f, "zero row {row}"),
            Violation::ZeroColumn { col } => write!(f, "zero column {col}"),
            Violation::NonPositiveCapacity { row } => write!(f, "non-positive capacity in row {row}"),
            Violation::InvalidUtility { user, reason } => {
                write!(f, "invalid utility for user {user}: {reason}")
            }
            Violation::NoSlaterPoint { row } => write!(f, "no slater point: row {row} is not strictly feasible"),
        }
    }
}

/// Interior offset used for the Slater probe `x~_i = lower_i + eps`.
pub const SLATER_OFFSET: f64 = 1e-6;

/// Every violated invariant; empty iff the problem satisfies all structural assumptions.
pub fn validate(problem: &NumProblem) -> Vec<Violation> {
    let mut out = Vec::new();
    let a = problem.a();
    for j in 0..a.rows() {
        for i in 0..a.cols() {
            let v = a.get(j, i);
            if v > 1 {
                out.push(Violation::NonBinaryEntry {
                    row: j,
                    col: i,
                    value: v,
                });
            }
        }
    }
    for (j, s) in a.row_sums().into_iter().enumerate() {
        if s == 0 {
            out.push(Violation::ZeroRow { row: j });
        }
    }
    for (i, s) in a.col_sums().into_iter().enumerate() {
        if s == 0 {
            out.push(Violation::ZeroColumn { col: i });
        }
    }
    for (j, &c) in problem.capacities().iter().enumerate() {
        if !(c.is_finite() && c > 0.0) {
            out.push(Violation::NonPositiveCapacity { row: j });
        }
    }
    let mut utilities_ok = true;
    for (i, u) in problem.utilities().iter().enumerate() {
        if let Some(reason) = u.check() {
            utilities_ok = false;
            out.push(Violation::InvalidUtility { user: i, reason });
        }
    }
    if utilities_ok {
        let probe: Vec<f64> = problem
            .utilities()
            .iter()
            .map(|u| {
                let candidate = u.lower + SLATER_OFFSET;
                if candidate < u.upper {
                    candidate
                } else {
                    0.5 * (u.lower + u.upper)
                }
            })
            .collect();
        // Dimensions were checked at construction.
        if let Ok(residual) = problem.constraint_residual(&probe) {
            for (j, r) in residual.into_iter().enumerate() {
                if r.is_nan() || r >= 0.0 {
                    out.push(Violation::NoSlaterPoint { row: j });
                }
            }
        }
    }
    out
}

/// Settings for the random ensemble. Integer ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GeneratorConfig {
    pub n_range: (usize, usize),
    pub m_range: (usize, usize),
    pub theta_range: (f64, f64),
    pub capacity_value: f64,
    pub bernoulli_p: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n_range: (10, 40),
            m_range: (5, 25),
            theta_range: (10.0, 30.0),
            capacity_value: 1.0,
            bernoulli_p: 0.5,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn check(&self) -> Result<()> {
        if self.n_range.0 == 0 || self.n_range.0 > self.n_range.1 {
            return Err(Error::InvalidConfig("n_range must be a non-empty range of positive integers"));
        }
        if self.m_range.0 == 0 || self.m_range.0 > self.m_range.1 {
            return Err(Error::InvalidConfig("m_range must be a non-empty range of positive integers"));
        }
        let (lo, hi) = self.theta_range;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::InvalidConfig("theta_range must be a non-empty positive interval"));
        }
        if !(self.capacity_value.is_finite() && self.capacity_value > 0.0) {
            return Err(Error::InvalidConfig("capacity_value must be positive"));
        }
        if !(self.bernoulli_p > 0.0 && self.bernoulli_p < 1.0) {
            return Err(Error::InvalidConfig("bernoulli_p must lie in (0, 1)"));
        }
        Ok(())
    }
}

pub const GENERATOR_MAX_ATTEMPTS: u32 = 10_000;

/// Draws one ensemble instance. A pure function of `config`: draws `n`, `m`,
/// then whole matrices until one has no zero row or column, then the `theta_i`.
pub fn generate_random(config: &GeneratorConfig) -> Result<NumProblem> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = rng.random_range(config.n_range.0..=config.n_range.1);
    let m = rng.random_range(config.m_range.0..=config.m_range.1);

    let mut accepted = None;
    for _ in 0..GENERATOR_MAX_ATTEMPTS {
        let data: Vec<u8> = (0..m * n)
            .map(|_| u8::from(rng.random_bool(config.bernoulli_p)))
            .collect();
        let a = BinaryMatrix::new(m, n, data)?;
        if a.row_sums().iter().all(|&s| s > 0) && a.col_sums().iter().all(|&s| s > 0) {
            accepted = Some(a);
            break;
        }
    }
    let a = accepted.ok_or(Error::GeneratorExhausted {
        attempts: GENERATOR_MAX_ATTEMPTS,
    })?;

    let (lo, hi) = config.theta_range;
    let utilities = (0..n)
        .map(|_| UtilitySpec::ensemble(if lo < hi { rng.random_range(lo..hi) } else { lo }))
        .collect();
    NumProblem::new(a, alloc::vec![config.capacity_value; m], utilities)
}

/// Problem-dependent quantities shared by all methods.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConstants {
    /// Strong concavity modulus of `f` over `prod_i [lower_i, max_j c_j]`.
    pub mu: f64,
    /// `rho(A^T A)`
    pub spectral: f64,
    /// `L = rho(A^T A) / mu`, the Lipschitz constant of the dual gradient.
    pub dual_smoothness: f64,
    /// Uniform dual cap: `max_i f_i'(lower_i)`.
    pub lambda_bar: f64,
    /// `A A^T e_m`
    pub row_weights: Vec<u64>,
}

pub fn compute_constants(problem: &NumProblem) -> Result<ProblemConstants> {
    let c_max = problem.max_capacity();
    let mu = problem
        .utilities()
        .iter()
        .map(|u| u.min_curvature(u.lower, c_max.max(u.lower)))
        .fold(f64::INFINITY, f64::min);
    let lambda_bar = problem
        .utilities()
        .iter()
        .map(|u| u.derivative(u.lower))
        .fold(f64::NEG_INFINITY, f64::max);
    let spectral = spectral_radius(&problem.a().gram())?;
    Ok(ProblemConstants {
        mu,
        spectral,
        dual_smoothness: spectral / mu,
        lambda_bar,
        row_weights: problem.a().row_weights(),
    })
}
