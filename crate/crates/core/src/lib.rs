//! Network utility maximization by dual decomposition, with a price update
//! that keeps every realized allocation feasible.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod agents;
pub mod baselines;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod problem;
pub mod sdgm;

use core::fmt;
use core::str::FromStr;

use alloc::vec::Vec;

pub use agents::{best_response, best_response_profile, prices_from_duals, PriceVector, ResponseDomain};
pub use baselines::{BaselineKind, BaselineParams};
pub use error::{Error, Result};
pub use linalg::{BinaryMatrix, SymMatrix};
pub use metrics::{Iterate, TraceRow};
pub use oracle::{solve_optimal, OptimalSolution};
pub use problem::{
    compute_constants, generate_random, validate, GeneratorConfig, NumProblem, ProblemConstants, Utility,
    UtilitySpec, Violation,
};
pub use sdgm::SdgmParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Algorithm {
    Sdgm,
    Dgm,
    Fdgm,
    Ndgm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Sdgm, Algorithm::Dgm, Algorithm::Fdgm, Algorithm::Ndgm];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sdgm => "sdgm",
            Algorithm::Dgm => "dgm",
            Algorithm::Fdgm => "fdgm",
            Algorithm::Ndgm => "ndgm",
        }
    }

    fn baseline(self) -> Option<BaselineKind> {
        match self {
            Algorithm::Sdgm => None,
            Algorithm::Dgm => Some(BaselineKind::Dgm),
            Algorithm::Fdgm => Some(BaselineKind::Fdgm),
            Algorithm::Ndgm => Some(BaselineKind::Ndgm),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownAlgorithm;

impl fmt::Display for UnknownAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown algorithm (expected sdgm, dgm, fdgm or ndgm)")
    }
}

impl core::error::Error for UnknownAlgorithm {}

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or(UnknownAlgorithm)
    }
}

/// Runs `algorithm` for `horizon` rounds with its default parameters.
/// `gamma` overrides the SDGM step scale and the DGM step.
pub fn run_algorithm(
    algorithm: Algorithm,
    problem: &NumProblem,
    constants: &ProblemConstants,
    horizon: u64,
    gamma: Option<f64>,
) -> Result<Vec<Iterate>> {
    match algorithm.baseline() {
        None => {
            let params = match gamma {
                Some(g) => SdgmParams::new(constants, g, horizon)?,
                None => SdgmParams::with_default_gamma(problem, constants, horizon)?,
            };
            sdgm::run_trial(problem, &params)
        }
        Some(kind) => {
            let mut params = BaselineParams::defaults(kind, problem, constants, horizon);
            if let (BaselineKind::Dgm, Some(g)) = (kind, gamma) {
                params.step = g;
            }
            baselines::run_baseline(problem, constants, &params)
        }
    }
}
