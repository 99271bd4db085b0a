use std::path::PathBuf;

use serde_json::json;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] sdgm_core::Error),
    /// A single trial failed; the seed reproduces it with `generate --seed`.
    #[error("trial {trial_id} (seed {seed}) failed: {source}")]
    Trial {
        trial_id: usize,
        seed: u64,
        #[source]
        source: sdgm_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("invalid problem document: {0}")]
    Document(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot aggregate traces: {0}")]
    Report(String),
    #[error("{0}")]
    Usage(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }

    pub fn json(path: impl Into<PathBuf>) -> impl FnOnce(serde_json::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Json { path, source }
    }

    pub fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Csv { path, source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Core(e) | HarnessError::Trial { source: e, .. } => match e {
                sdgm_core::Error::DimensionMismatch { .. } => "dimension_mismatch",
                sdgm_core::Error::UnboundedSubproblem { .. } => "unbounded_subproblem",
                sdgm_core::Error::NonConvergence { .. } => "non_convergence",
                sdgm_core::Error::GeneratorExhausted { .. } => "generator_exhausted",
                sdgm_core::Error::InvalidConfig(_) => "invalid_config",
                sdgm_core::Error::InvalidProblem(_) => "invalid_problem",
            },
            HarnessError::Io { .. } => "io",
            HarnessError::Json { .. } => "json",
            HarnessError::Csv { .. } => "csv",
            HarnessError::Document(_) => "invalid_document",
            HarnessError::Config(_) => "invalid_config",
            HarnessError::Report(_) => "report",
            HarnessError::Usage(_) => "usage",
        }
    }

    /// The document printed on stderr when the CLI fails.
    pub fn to_json(&self) -> serde_json::Value {
        let mut error = json!({
            "kind": self.kind(),
            "message": self.to_string(),
        });
        let obj = error.as_object_mut().expect("object literal");
        if let HarnessError::Trial { trial_id, seed, .. } = self {
            obj.insert("trial_id".into(), json!(trial_id));
            obj.insert("seed".into(), json!(seed));
        }
        let core = match self {
            HarnessError::Core(e) | HarnessError::Trial { source: e, .. } => Some(e),
            _ => None,
        };
        if let Some(sdgm_core::Error::InvalidProblem(violations)) = core {
            let names: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            obj.insert("violations".into(), json!(names));
        }
        json!({ "error": error })
    }
}
