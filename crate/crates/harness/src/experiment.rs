//! The ensemble study: generate, solve, run every algorithm, aggregate.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sdgm_core::metrics::trace_rows;
use sdgm_core::oracle::DEFAULT_TOLERANCE;
use sdgm_core::sdgm::{default_gamma, regret_bound, regret_constant};
use sdgm_core::{
    compute_constants, generate_random, run_algorithm, solve_optimal, validate, Algorithm, Error, NumProblem,
    OptimalSolution, ProblemConstants, TraceRow,
};

use crate::config::ExperimentConfig;
use crate::document::{write_json, ProblemDocument, SolutionCache, SolutionDocument};
use crate::error::{HarnessError, Result};
use crate::seeds::trial_seed;

pub const TRACE_HEADER: [&str; 9] = [
    "trial_id",
    "algorithm",
    "t",
    "objective",
    "regret_cum",
    "infeasibility",
    "distance_to_opt",
    "max_lambda",
    "min_slack",
];

pub const METRICS: [&str; 6] = [
    "objective",
    "regret_cum",
    "infeasibility",
    "distance_to_opt",
    "max_lambda",
    "min_slack",
];

pub fn metric_values(row: &TraceRow) -> [f64; 6] {
    [
        row.objective,
        row.regret_cum,
        row.infeasibility,
        row.distance_to_opt,
        row.max_lambda,
        row.min_slack,
    ]
}

/// One row of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub trial_id: usize,
    pub algorithm: Algorithm,
    pub t: u64,
    pub objective: f64,
    pub regret_cum: f64,
    pub infeasibility: f64,
    pub distance_to_opt: f64,
    pub max_lambda: f64,
    pub min_slack: f64,
}

impl TraceRecord {
    pub fn new(trial_id: usize, algorithm: Algorithm, r: &TraceRow) -> Self {
        Self {
            trial_id,
            algorithm,
            t: r.t,
            objective: r.objective,
            regret_cum: r.regret_cum,
            infeasibility: r.infeasibility,
            distance_to_opt: r.distance_to_opt,
            max_lambda: r.max_lambda,
            min_slack: r.min_slack,
        }
    }

    pub fn metrics(&self) -> [f64; 6] {
        [
            self.objective,
            self.regret_cum,
            self.infeasibility,
            self.distance_to_opt,
            self.max_lambda,
            self.min_slack,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub trial_id: usize,
    pub seed: u64,
    pub problem: NumProblem,
    pub constants: ProblemConstants,
    pub solution: OptimalSolution,
    /// The SDGM step scale actually used.
    pub gamma: f64,
    pub regret_constant: f64,
    pub runs: Vec<AlgorithmRun>,
}

impl TrialOutcome {
    pub fn run(&self, algorithm: Algorithm) -> Option<&AlgorithmRun> {
        self.runs.iter().find(|r| r.algorithm == algorithm)
    }

    /// Right-hand side of the SDGM regret bound at horizon `t`.
    pub fn regret_bound(&self, t: u64) -> f64 {
        regret_bound(&self.problem, &self.constants, self.gamma, t)
    }
}

/// Mean and standard deviation of every metric for one `(algorithm, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub t: u64,
    pub count: usize,
    pub mean: [f64; 6],
    pub std: [f64; 6],
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub outcomes: Vec<TrialOutcome>,
    pub summary: Vec<SummaryRow>,
}

/// Solves for the reference optimum, reusing `cache` when given.
pub fn oracle(problem: &NumProblem, constants: &ProblemConstants, cache: Option<&SolutionCache>) -> Result<OptimalSolution> {
    let Some(cache) = cache else {
        return Ok(solve_optimal(problem, constants, DEFAULT_TOLERANCE)?);
    };
    let hash = ProblemDocument::from_problem(problem, None)?.content_hash();
    if let Some(doc) = cache.get(&hash) {
        return Ok(doc.into_solution());
    }
    let s = solve_optimal(problem, constants, DEFAULT_TOLERANCE)?;
    cache.put(&SolutionDocument::new(hash, &s))?;
    Ok(s)
}

/// Trial `trial_id` of `config`, independent of every other trial.
pub fn run_trial(config: &ExperimentConfig, trial_id: usize, cache: Option<&SolutionCache>) -> Result<TrialOutcome> {
    let seed = trial_seed(config.master_seed, trial_id as u64);
    let wrap = |source: Error| HarnessError::Trial { trial_id, seed, source };
    let unwrap_core = |e: HarnessError| match e {
        HarnessError::Core(source) => wrap(source),
        other => other,
    };

    let problem = generate_random(&config.generator.clone().with_seed(seed)).map_err(wrap)?;
    let violations = validate(&problem);
    if !violations.is_empty() {
        return Err(wrap(Error::InvalidProblem(violations)));
    }
    let constants = compute_constants(&problem).map_err(wrap)?;
    let solution = oracle(&problem, &constants, cache).map_err(unwrap_core)?;
    let gamma = config.gamma.unwrap_or_else(|| default_gamma(&problem, &constants));

    let runs = config
        .algorithms()
        .into_iter()
        .map(|algorithm| {
            let iterates = run_algorithm(algorithm, &problem, &constants, config.horizon, config.gamma).map_err(wrap)?;
            let rows = trace_rows(&problem, &iterates, &solution.x_star, solution.f_star).map_err(wrap)?;
            Ok(AlgorithmRun { algorithm, rows })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(TrialOutcome {
        trial_id,
        seed,
        regret_constant: regret_constant(&problem, &constants),
        problem,
        constants,
        solution,
        gamma,
        runs,
    })
}

/// All trials on a pool of `workers` threads (all cores when `None`). The
/// result is ordered by trial id whatever the scheduling.
pub fn run_trials(config: &ExperimentConfig, workers: Option<usize>, cache: Option<&SolutionCache>) -> Result<Vec<TrialOutcome>> {
    config.check()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|k| run_trial(config, k, cache))
            .collect()
    })
}

/// Per `(algorithm, t)` mean and sample standard deviation across trials.
pub fn summarize(outcomes: &[TrialOutcome]) -> Vec<SummaryRow> {
    let Some(first) = outcomes.first() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for run in &first.runs {
        let algorithm = run.algorithm;
        let series: Vec<&[TraceRow]> = outcomes
            .iter()
            .filter_map(|o| o.run(algorithm))
            .map(|r| r.rows.as_slice())
            .collect();
        let count = series.len();
        for (idx, row) in run.rows.iter().enumerate() {
            let mut mean = [0.0; 6];
            let mut std = [0.0; 6];
            for k in 0..METRICS.len() {
                let values = series.iter().map(|s| metric_values(&s[idx])[k]);
                let mu = values.clone().sum::<f64>() / count as f64;
                let ss: f64 = values.map(|v| (v - mu) * (v - mu)).sum();
                mean[k] = mu;
                std[k] = if count > 1 { (ss / (count - 1) as f64).sqrt() } else { 0.0 };
            }
            out.push(SummaryRow {
                algorithm,
                t: row.t,
                count,
                mean,
                std,
            });
        }
    }
    out
}

pub fn summary_header() -> Vec<String> {
    let mut h = vec!["algorithm".to_string(), "t".to_string(), "trials".to_string()];
    for m in METRICS {
        h.push(format!("{m}_mean"));
        h.push(format!("{m}_std"));
    }
    h
}

pub fn write_summary<W: std::io::Write>(rows: &[SummaryRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(summary_header())?;
    for r in rows {
        let mut rec = vec![r.algorithm.name().to_string(), r.t.to_string(), r.count.to_string()];
        for k in 0..METRICS.len() {
            rec.push(r.mean[k].to_string());
            rec.push(r.std[k].to_string());
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace<W: std::io::Write>(trial_id: usize, run: &AlgorithmRun, out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in &run.rows {
        w.serialize(TraceRecord::new(trial_id, run.algorithm, r))?;
    }
    w.flush()?;
    Ok(())
}

/// One row per trial with the instance, its oracle certificate, and the
/// SDGM regret against its bound.
#[derive(Debug, Serialize)]
struct TrialRecord {
    trial_id: usize,
    seed: u64,
    n: usize,
    m: usize,
    f_star: f64,
    kkt_residual: f64,
    oracle_iterations: u64,
    lambda_bar: f64,
    mu: f64,
    spectral: f64,
    gamma: f64,
    regret_constant: f64,
    regret_bound: f64,
    sdgm_regret: Option<f64>,
    sdgm_regret_over_sqrt_t: Option<f64>,
}

pub fn trace_path(dir: &Path, trial_id: usize, algorithm: Algorithm) -> PathBuf {
    dir.join("traces").join(format!("trial_{trial_id:04}_{}.csv", algorithm.name()))
}

fn csv_file(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(HarnessError::csv(path))
}

/// Writes `config.json`, `trials.csv`, `summary.csv` and one trace per
/// `(trial, algorithm)` under `config.output_dir`.
pub fn write_outputs(config: &ExperimentConfig, result: &ExperimentResult) -> Result<()> {
    let dir = &config.output_dir;
    let traces = dir.join("traces");
    fs::create_dir_all(&traces).map_err(HarnessError::io(&traces))?;
    write_json(&dir.join("config.json"), config)?;

    result.outcomes.par_iter().try_for_each(|o| {
        o.runs.iter().try_for_each(|run| {
            let path = trace_path(dir, o.trial_id, run.algorithm);
            let file = fs::File::create(&path).map_err(HarnessError::io(&path))?;
            write_trace(o.trial_id, run, std::io::BufWriter::new(file)).map_err(HarnessError::csv(&path))
        })
    })?;

    let path = dir.join("trials.csv");
    let mut w = csv_file(&path)?;
    for o in &result.outcomes {
        let horizon = config.horizon;
        let regret = o.run(Algorithm::Sdgm).and_then(|r| r.rows.last()).map(|r| r.regret_cum);
        w.serialize(TrialRecord {
            trial_id: o.trial_id,
            seed: o.seed,
            n: o.problem.n(),
            m: o.problem.m(),
            f_star: o.solution.f_star,
            kkt_residual: o.solution.kkt_residual,
            oracle_iterations: o.solution.iterations_used,
            lambda_bar: o.constants.lambda_bar,
            mu: o.constants.mu,
            spectral: o.constants.spectral,
            gamma: o.gamma,
            regret_constant: o.regret_constant,
            regret_bound: o.regret_bound(horizon),
            sdgm_regret: regret,
            sdgm_regret_over_sqrt_t: regret.map(|r| r / (horizon as f64).sqrt()),
        })
        .map_err(HarnessError::csv(&path))?;
    }
    w.flush().map_err(HarnessError::io(&path))?;

    let path = dir.join("summary.csv");
    let file = fs::File::create(&path).map_err(HarnessError::io(&path))?;
    write_summary(&result.summary, std::io::BufWriter::new(file)).map_err(HarnessError::csv(&path))
}

/// Runs the whole study and writes its artifacts.
pub fn run_experiment(config: &ExperimentConfig, workers: Option<usize>, cache: Option<&SolutionCache>) -> Result<ExperimentResult> {
    let outcomes = run_trials(config, workers, cache)?;
    let summary = summarize(&outcomes);
    let result = ExperimentResult { outcomes, summary };
    write_outputs(config, &result)?;
    Ok(result)
}
