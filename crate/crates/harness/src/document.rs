//! JSON documents for problem instances and oracle solutions.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use sdgm_core::{BinaryMatrix, NumProblem, OptimalSolution, UtilitySpec};

use crate::error::{HarnessError, Result};

/// An upper bound that serializes `+inf` as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Upper(pub f64);

impl Serialize for Upper {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Upper {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(Upper(v)),
            Raw::Text(s) if s == "inf" => Ok(Upper(f64::INFINITY)),
            Raw::Text(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub n: usize,
    pub m: usize,
    /// Row-major 0/1 matrix, `m` rows of length `n`.
    #[serde(rename = "A")]
    pub a: Vec<Vec<u8>>,
    pub c: Vec<f64>,
    pub theta: Vec<f64>,
    pub shift: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<Upper>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// The fields that identify a problem, in a fixed order; the seed is excluded.
#[derive(Serialize)]
struct Content<'a> {
    n: usize,
    m: usize,
    a: &'a [Vec<u8>],
    c: &'a [f64],
    theta: &'a [f64],
    shift: f64,
    lower: &'a [f64],
    upper: &'a [Upper],
}

impl ProblemDocument {
    /// Fails if the utilities do not share one shift, which the format cannot express.
    pub fn from_problem(problem: &NumProblem, seed: Option<u64>) -> Result<Self> {
        let us = problem.utilities();
        let shift = us.first().map_or(UtilitySpec::DEFAULT_SHIFT, |u| u.shift);
        if us.iter().any(|u| u.shift != shift) {
            return Err(HarnessError::Document("all users must share one shift".into()));
        }
        let a = problem.a();
        Ok(Self {
            n: problem.n(),
            m: problem.m(),
            a: (0..a.rows()).map(|j| a.row(j).to_vec()).collect(),
            c: problem.capacities().to_vec(),
            theta: us.iter().map(|u| u.theta).collect(),
            shift,
            lower: us.iter().map(|u| u.lower).collect(),
            upper: us.iter().map(|u| Upper(u.upper)).collect(),
            seed,
        })
    }

    /// Checks the declared sizes; structural validity is left to [`sdgm_core::validate`].
    pub fn to_problem(&self) -> Result<NumProblem> {
        let bad = |what: &str, expected: usize, found: usize| {
            HarnessError::Document(format!("{what}: expected length {expected}, found {found}"))
        };
        if self.a.len() != self.m {
            return Err(bad("A rows", self.m, self.a.len()));
        }
        if let Some(row) = self.a.iter().find(|r| r.len() != self.n) {
            return Err(bad("A row", self.n, row.len()));
        }
        for (what, len) in [
            ("theta", self.theta.len()),
            ("lower", self.lower.len()),
            ("upper", self.upper.len()),
        ] {
            if len != self.n {
                return Err(bad(what, self.n, len));
            }
        }
        let a = if self.m == 0 {
            BinaryMatrix::new(0, self.n, Vec::new())?
        } else {
            BinaryMatrix::from_rows(&self.a)?
        };
        let utilities = (0..self.n)
            .map(|i| UtilitySpec::shifted_log(self.theta[i], self.shift, self.lower[i], self.upper[i].0))
            .collect();
        Ok(NumProblem::new(a, self.c.clone(), utilities)?)
    }

    /// Hex SHA-256 of the canonical JSON of the problem content.
    pub fn content_hash(&self) -> String {
        let content = Content {
            n: self.n,
            m: self.m,
            a: &self.a,
            c: &self.c,
            theta: &self.theta,
            shift: self.shift,
            lower: &self.lower,
            upper: &self.upper,
        };
        let bytes = serde_json::to_vec(&content).expect("plain data serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(HarnessError::io(path))?;
        serde_json::from_str(&text).map_err(HarnessError::json(path))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    pub problem_hash: String,
    pub x_star: Vec<f64>,
    pub f_star: f64,
    pub lambda_star: Vec<f64>,
    pub kkt_residual: f64,
    pub iterations_used: u64,
}

impl SolutionDocument {
    pub fn new(problem_hash: String, s: &OptimalSolution) -> Self {
        Self {
            problem_hash,
            x_star: s.x_star.clone(),
            f_star: s.f_star,
            lambda_star: s.lambda_star.clone(),
            kkt_residual: s.kkt_residual,
            iterations_used: s.iterations_used,
        }
    }

    pub fn into_solution(self) -> OptimalSolution {
        OptimalSolution {
            x_star: self.x_star,
            f_star: self.f_star,
            lambda_star: self.lambda_star,
            kkt_residual: self.kkt_residual,
            iterations_used: self.iterations_used,
        }
    }
}

/// Oracle solutions stored as `<dir>/<problem hash>.json`.
#[derive(Debug, Clone)]
pub struct SolutionCache {
    dir: PathBuf,
}

impl SolutionCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    fn path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.json"))
    }

    /// A cached solution for `hash`, or `None` if absent or unreadable.
    pub fn get(&self, hash: &str) -> Option<SolutionDocument> {
        let text = fs::read_to_string(self.path(hash)).ok()?;
        let doc: SolutionDocument = serde_json::from_str(&text).ok()?;
        (doc.problem_hash == hash).then_some(doc)
    }

    pub fn put(&self, doc: &SolutionDocument) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(HarnessError::io(&self.dir))?;
        write_json(&self.path(&doc.problem_hash), doc)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(HarnessError::json(path))?;
    text.push('\n');
    fs::write(path, text).map_err(HarnessError::io(path))
}
