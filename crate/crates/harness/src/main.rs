use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sdgm::document::write_json;
use sdgm::experiment::{oracle, write_summary, write_trace, AlgorithmRun};
use sdgm::report::aggregate_traces;
use sdgm::seeds::trial_seed;
use sdgm::{run_experiment, ExperimentConfig, HarnessError, ProblemDocument, Result, SolutionCache, SolutionDocument};
use sdgm_core::metrics::trace_rows;
use sdgm_core::{compute_constants, generate_random, run_algorithm, validate, Algorithm, Error};

#[derive(Parser)]
#[command(name = "sdgm", version, about = "Safe dual gradient method for network utility maximization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw ensemble instances and write them as problem documents.
    Generate {
        /// Master seed; instance k uses the same derived seed as trial k of `compare`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of instances.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Output directory (one file per instance). Prints JSON lines if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Experiment config whose generator settings to use.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Solve a problem document to a certified optimum.
    Solve {
        problem: PathBuf,
        /// Directory of cached solutions keyed by problem hash.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm on one problem and emit its trace.
    Run {
        problem: PathBuf,
        #[arg(long, default_value = "sdgm")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Trace file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full ensemble study.
    Compare(CompareArgs),
    /// Aggregate existing trace files into a summary.
    Report {
        /// Experiment output directory or a directory of trace files.
        dir: PathBuf,
        /// Summary file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CompareArgs {
    /// Base configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated subset of sdgm,dgm,fdgm,ndgm.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (all cores if omitted). Does not affect results.
    #[arg(long)]
    workers: Option<usize>,
    /// Directory of cached oracle solutions.
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    path.map_or_else(|| Ok(ExperimentConfig::default()), ExperimentConfig::read)
}

fn load_problem(path: &Path) -> Result<(ProblemDocument, sdgm_core::NumProblem)> {
    let doc = ProblemDocument::read(path)?;
    let problem = doc.to_problem()?;
    let violations = validate(&problem);
    if !violations.is_empty() {
        return Err(Error::InvalidProblem(violations).into());
    }
    Ok((doc, problem))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(HarnessError::io(p)),
        None => io::stdout().write_all(text.as_bytes()).map_err(HarnessError::io("<stdout>")),
    }
}

fn generate(seed: u64, trials: usize, out: Option<PathBuf>, config: Option<PathBuf>) -> Result<()> {
    let generator = load_config(config.as_deref())?.generator;
    if let Some(dir) = &out {
        fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    }
    for k in 0..trials {
        let s = trial_seed(seed, k as u64);
        let problem = generate_random(&generator.clone().with_seed(s))
            .map_err(|source| HarnessError::Trial { trial_id: k, seed: s, source })?;
        let doc = ProblemDocument::from_problem(&problem, Some(s))?;
        match &out {
            Some(dir) => write_json(&dir.join(format!("problem_{k:04}.json")), &doc)?,
            None => {
                let mut line = serde_json::to_string(&doc).map_err(HarnessError::json("<stdout>"))?;
                line.push('\n');
                emit(None, &line)?
            }
        }
    }
    Ok(())
}

fn solve(path: &Path, cache: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let (doc, problem) = load_problem(path)?;
    let constants = compute_constants(&problem)?;
    let cache = cache.map(SolutionCache::new);
    let s = oracle(&problem, &constants, cache.as_ref())?;
    let solution = SolutionDocument::new(doc.content_hash(), &s);
    let mut text = serde_json::to_string_pretty(&solution).map_err(HarnessError::json(path))?;
    text.push('\n');
    emit(out.as_deref(), &text)
}

fn run(
    path: &Path,
    algorithm: Algorithm,
    horizon: u64,
    gamma: Option<f64>,
    cache: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<()> {
    let (_, problem) = load_problem(path)?;
    let constants = compute_constants(&problem)?;
    let cache = cache.map(SolutionCache::new);
    let s = oracle(&problem, &constants, cache.as_ref())?;
    let iterates = run_algorithm(algorithm, &problem, &constants, horizon, gamma)?;
    let rows = trace_rows(&problem, &iterates, &s.x_star, s.f_star)?;
    let mut buf = Vec::new();
    write_trace(0, &AlgorithmRun { algorithm, rows }, &mut buf).map_err(HarnessError::csv(path))?;
    emit(out.as_deref(), &String::from_utf8_lossy(&buf))
}

fn compare(args: CompareArgs) -> Result<()> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(s) = args.seed {
        config.master_seed = s;
    }
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(h) = args.horizon {
        config.horizon = h;
    }
    if args.gamma.is_some() {
        config.gamma = args.gamma;
    }
    if let Some(a) = args.algorithms {
        config.algorithms = a;
    }
    if let Some(o) = args.out {
        config.output_dir = o;
    }
    let cache = args.cache.map(SolutionCache::new);
    let result = run_experiment(&config, args.workers, cache.as_ref())?;
    let finals: Vec<_> = result
        .summary
        .iter()
        .filter(|r| r.t == config.horizon)
        .map(|r| {
            json!({
                "algorithm": r.algorithm,
                "mean_regret": r.mean[1],
                "mean_infeasibility": r.mean[2],
                "mean_distance_to_opt": r.mean[3],
            })
        })
        .collect();
    let report = json!({
        "output_dir": config.output_dir,
        "trials": result.outcomes.len(),
        "horizon": config.horizon,
        "final": finals,
    });
    let mut text = serde_json::to_string_pretty(&report).map_err(HarnessError::json("<stdout>"))?;
    text.push('\n');
    emit(None, &text)
}

fn report(dir: &Path, out: Option<PathBuf>) -> Result<()> {
    let rows = aggregate_traces(dir)?;
    let mut buf = Vec::new();
    write_summary(&rows, &mut buf).map_err(HarnessError::csv(dir))?;
    emit(out.as_deref(), &String::from_utf8_lossy(&buf))
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { seed, trials, out, config } => generate(seed, trials, out, config),
        Command::Solve { problem, cache, out } => solve(&problem, cache, out),
        Command::Run {
            problem,
            algorithm,
            horizon,
            gamma,
            cache,
            out,
        } => run(&problem, algorithm, horizon, gamma, cache, out),
        Command::Compare(args) => compare(args),
        Command::Report { dir, out } => report(&dir, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let err = HarnessError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
