//! Experiment harness for the safe dual gradient method: problem and
//! solution documents, seeded ensemble runs, CSV traces and summaries.

pub mod config;
pub mod document;
pub mod error;
pub mod experiment;
pub mod report;
pub mod seeds;

pub use config::ExperimentConfig;
pub use document::{ProblemDocument, SolutionCache, SolutionDocument};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, run_trials, summarize, ExperimentResult, SummaryRow, TrialOutcome};
