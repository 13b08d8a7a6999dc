//! Multi-run experiments, summary statistics, and result files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{run_rng, ConfigError, EngineConfig, EngineKind, Search, TracePoint};
use crate::grammar::{Grammar, GrammarError};
use crate::mapping::MapOptions;
use crate::problems::ant::DEFAULT_STEP_BUDGET;
use crate::problems::regression::DEFAULT_CASES;
use crate::problems::{
    AntProblem, Benchmark, MuxProblem, ProblemKind, ProgramError, RegressionProblem, Trail,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("grammar: {0}")]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("no run records")]
    EmptyRecords,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub engine: EngineKind,
    pub problem: ProblemKind,
    pub runs: usize,
    pub population: usize,
    pub dimension: usize,
    pub max_fes: u64,
    /// Problem default when unset.
    pub target_error: Option<f64>,
    /// Problem default when unset.
    pub wraps: Option<u32>,
    pub seed: u64,
    pub grammar_path: Option<PathBuf>,
    pub trail_path: Option<PathBuf>,
    /// Seed for one regression case set shared by every run.
    pub shared_cases: Option<u64>,
    pub skip_unit_rules: bool,
    pub ant_steps: usize,
    /// Worker threads; all available cores when unset.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(engine: EngineKind, problem: ProblemKind) -> Self {
        let engine_defaults = EngineConfig::new(engine);
        ExperimentConfig {
            engine,
            problem,
            runs: 30,
            population: engine_defaults.population,
            dimension: engine_defaults.dimension,
            max_fes: engine_defaults.max_fes,
            target_error: None,
            wraps: None,
            seed: 1,
            grammar_path: None,
            trail_path: None,
            shared_cases: None,
            skip_unit_rules: false,
            ant_steps: DEFAULT_STEP_BUDGET,
            threads: None,
        }
    }

    pub fn target(&self) -> f64 {
        self.target_error
            .unwrap_or_else(|| self.problem.default_target())
    }

    pub fn wrap_limit(&self) -> u32 {
        self.wraps.unwrap_or_else(|| self.problem.default_wraps())
    }

    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            population: self.population,
            dimension: self.dimension,
            max_fes: self.max_fes,
            target_error: self.target(),
            ..EngineConfig::new(self.engine)
        }
    }

    pub fn map_options(&self) -> MapOptions {
        MapOptions {
            wrap_limit: self.wrap_limit(),
            skip_unit_rules: self.skip_unit_rules,
        }
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("bad value `{value}` for `{key}`")))
        }
        match key {
            "engine" => self.engine = value.parse().map_err(ConfigError::Invalid)?,
            "problem" => self.problem = value.parse().map_err(ConfigError::Invalid)?,
            "runs" => self.runs = num(key, value)?,
            "N" | "population" => self.population = num(key, value)?,
            "d" | "dimension" => self.dimension = num(key, value)?,
            "max_fes" => self.max_fes = num(key, value)?,
            "target_error" => self.target_error = Some(num(key, value)?),
            "wraps" => self.wraps = Some(num(key, value)?),
            "seed" => self.seed = num(key, value)?,
            "grammar_path" => self.grammar_path = Some(value.into()),
            "trail_path" => self.trail_path = Some(value.into()),
            "shared_cases" => {
                self.shared_cases = match value {
                    "" | "false" | "no" | "none" => None,
                    "true" | "yes" => Some(0),
                    seed => Some(num(key, seed)?),
                }
            }
            "skip_unit_rules" => self.skip_unit_rules = num(key, value)?,
            "ant_steps" => self.ant_steps = num(key, value)?,
            "threads" => self.threads = Some(num(key, value)?),
            other => {
                return Err(ConfigError::Invalid(format!(
                    "unknown config key `{other}`"
                )))
            }
        }
        Ok(())
    }

    /// Parses a plain `key=value` file. `engine` and `problem` are required;
    /// blank lines and `#` comments are skipped.
    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ConfigError::Invalid(format!("line {}: expected key=value", n + 1))
            })?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        let find = |key: &str| {
            pairs
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| ConfigError::Invalid(format!("missing `{key}`")))
        };
        let engine = find("engine")?.parse().map_err(ConfigError::Invalid)?;
        let problem = find("problem")?.parse().map_err(ConfigError::Invalid)?;
        let mut cfg = ExperimentConfig::new(engine, problem);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.runs == 0 {
            return Err(ConfigError::Invalid("runs must be >= 1".into()));
        }
        if self.ant_steps == 0 {
            return Err(ConfigError::Invalid("ant_steps must be >= 1".into()));
        }
        self.engine_config().validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub engine: EngineKind,
    pub problem: ProblemKind,
    pub best_error: f64,
    pub success: bool,
    pub fes_used: u64,
    pub best_program: String,
    pub wall_ms: u64,
    pub iterations: u64,
    pub invalid_evaluations: u64,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentStats {
    pub runs: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub success_count: usize,
    /// Fraction of successful runs, in `[0, 1]`.
    pub success_rate: f64,
    pub mean_fes: f64,
    pub std_fes: f64,
}

/// Mean and sample (n - 1) standard deviation. Values are summed in sorted
/// order so the result does not depend on record order. A single value has
/// standard deviation 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    if sorted.len() < 2 {
        return (mean, 0.0);
    }
    let mut sq: Vec<f64> = sorted.iter().map(|v| (v - mean) * (v - mean)).collect();
    sq.sort_by(f64::total_cmp);
    (mean, (sq.iter().sum::<f64>() / (n - 1.0)).sqrt())
}

impl ExperimentStats {
    pub fn from_records(records: &[RunRecord]) -> Result<Self, HarnessError> {
        if records.is_empty() {
            return Err(HarnessError::EmptyRecords);
        }
        let errors: Vec<f64> = records.iter().map(|r| r.best_error).collect();
        let fes: Vec<f64> = records.iter().map(|r| r.fes_used as f64).collect();
        let (mean_error, std_error) = mean_std(&errors);
        let (mean_fes, std_fes) = mean_std(&fes);
        let success_count = records.iter().filter(|r| r.success).count();
        Ok(ExperimentStats {
            runs: records.len(),
            mean_error,
            std_error,
            success_count,
            success_rate: success_count as f64 / records.len() as f64,
            mean_fes,
            std_fes,
        })
    }
}

/// Success rate in percent.
pub fn success_rate(records: &[RunRecord]) -> Result<f64, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyRecords);
    }
    let hits = records.iter().filter(|r| r.success).count();
    Ok(percent(hits, records.len()))
}

pub fn percent(count: usize, total: usize) -> f64 {
    100.0 * count as f64 / total as f64
}

/// `"9 (30.00%)"`.
pub fn format_success(count: usize, total: usize) -> String {
    format!("{count} ({:.2}%)", percent(count, total))
}

/// One summary line in the style of the published tables:
/// error mean (std), successes (rate), FEs mean (std).
pub fn summary_line(engine: EngineKind, problem: ProblemKind, stats: &ExperimentStats) -> String {
    format!(
        "{engine} {problem}: error {:.2} ({:.4}) | success {} | FEs {:.1} ({:.4})",
        stats.mean_error,
        stats.std_error,
        format_success(stats.success_count, stats.runs),
        stats.mean_fes,
        stats.std_fes
    )
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub records: Vec<RunRecord>,
    pub stats: ExperimentStats,
}

struct Prepared {
    grammar: Grammar,
    trail: Trail,
    shared_cases: Option<RegressionProblem>,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared, HarnessError> {
    let grammar_text = match &cfg.grammar_path {
        Some(p) => fs::read_to_string(p).map_err(io_err(p))?,
        None => cfg.problem.grammar_source().to_string(),
    };
    let trail = match &cfg.trail_path {
        Some(p) => Trail::parse(&fs::read_to_string(p).map_err(io_err(p))?)?,
        None => Trail::santa_fe(),
    };
    let shared_cases = cfg
        .shared_cases
        .map(|seed| RegressionProblem::generate(&mut run_rng(seed), DEFAULT_CASES));
    Ok(Prepared {
        grammar: Grammar::parse(&grammar_text)?,
        trail,
        shared_cases,
    })
}

fn run_seed(cfg: &ExperimentConfig, prep: &Prepared, seed: u64) -> Result<RunRecord, HarnessError> {
    let started = Instant::now();
    let mut rng = run_rng(seed);
    let benchmark = match cfg.problem {
        ProblemKind::Ant => Benchmark::Ant(AntProblem::new(prep.trail.clone(), cfg.ant_steps)),
        ProblemKind::Regression => Benchmark::Regression(match &prep.shared_cases {
            Some(cases) => cases.clone(),
            None => RegressionProblem::generate(&mut rng, DEFAULT_CASES),
        }),
        ProblemKind::Mux3 => Benchmark::Mux3(MuxProblem::default()),
    };
    let search = Search::with_rng(
        cfg.engine_config(),
        &prep.grammar,
        cfg.map_options(),
        &benchmark,
        rng,
    )?;
    let outcome = search.run();
    Ok(RunRecord {
        seed,
        engine: cfg.engine,
        problem: cfg.problem,
        best_error: outcome.best_error,
        success: outcome.success,
        fes_used: outcome.fes_used,
        best_program: outcome.best_program.unwrap_or_default(),
        wall_ms: started.elapsed().as_millis() as u64,
        iterations: outcome.iterations,
        invalid_evaluations: outcome.invalid_evaluations,
        trace: outcome.trace,
    })
}

/// Runs seeds `seed..seed + runs` in parallel; records come back in seed
/// order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Experiment, HarnessError> {
    let seeds: Vec<u64> = (0..cfg.runs as u64).map(|i| cfg.seed + i).collect();
    run_seeds(cfg, &seeds)
}

/// Runs an explicit seed list; records are returned sorted by seed.
pub fn run_seeds(cfg: &ExperimentConfig, seeds: &[u64]) -> Result<Experiment, HarnessError> {
    cfg.validate()?;
    let prep = prepare(cfg)?;
    let work = || -> Result<Vec<RunRecord>, HarnessError> {
        seeds.par_iter().map(|&s| run_seed(cfg, &prep, s)).collect()
    };
    let mut records = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    records.sort_by_key(|r| r.seed);
    let stats = ExperimentStats::from_records(&records)?;
    Ok(Experiment {
        config: cfg.clone(),
        records,
        stats,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExportOptions {
    pub format: ExportFormat,
    /// Write measured wall time; when off, `wall_ms` is written as 0 so
    /// reruns are byte-identical.
    pub timing: bool,
}

impl Default for ExportOptions {
    fn default() -> Self {
        ExportOptions {
            format: ExportFormat::Csv,
            timing: true,
        }
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "seed",
    "engine",
    "problem",
    "best_error",
    "success",
    "fes_used",
    "wall_ms",
    "best_program",
];

#[derive(Serialize)]
struct RunRow<'a> {
    seed: u64,
    engine: EngineKind,
    problem: &'static str,
    best_error: f64,
    success: bool,
    fes_used: u64,
    wall_ms: u64,
    best_program: &'a str,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsFile {
    pub engine: EngineKind,
    pub problem: String,
    pub std_convention: String,
    #[serde(flatten)]
    pub stats: ExperimentStats,
}

fn write_file(path: &Path, contents: &[u8]) -> Result<PathBuf, HarnessError> {
    fs::write(path, contents).map_err(io_err(path))?;
    Ok(path.to_path_buf())
}

/// Writes the run table (`runs.csv` or `runs.json`), `stats.json`,
/// `convergence.csv`, and one `programs/seed_<n>.txt` per run. Returns the
/// written paths.
pub fn export(
    records: &[RunRecord],
    stats: &ExperimentStats,
    dir: &Path,
    opts: ExportOptions,
) -> Result<Vec<PathBuf>, HarnessError> {
    let first = records.first().ok_or(HarnessError::EmptyRecords)?;
    let programs = dir.join("programs");
    fs::create_dir_all(&programs).map_err(io_err(&programs))?;
    let mut written = Vec::new();

    let rows: Vec<RunRow> = records
        .iter()
        .map(|r| RunRow {
            seed: r.seed,
            engine: r.engine,
            problem: r.problem.name(),
            best_error: r.best_error,
            success: r.success,
            fes_used: r.fes_used,
            wall_ms: if opts.timing { r.wall_ms } else { 0 },
            best_program: &r.best_program,
        })
        .collect();
    match opts.format {
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            for row in &rows {
                w.write_record([
                    row.seed.to_string(),
                    row.engine.to_string(),
                    row.problem.to_string(),
                    row.best_error.to_string(),
                    row.success.to_string(),
                    row.fes_used.to_string(),
                    row.wall_ms.to_string(),
                    row.best_program.to_string(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| io_err(dir)(e.into_error()))?;
            written.push(write_file(&dir.join("runs.csv"), &bytes)?);
        }
        ExportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(&rows)?;
            bytes.push(b'\n');
            written.push(write_file(&dir.join("runs.json"), &bytes)?);
        }
    }

    let stats_file = StatsFile {
        engine: first.engine,
        problem: first.problem.name().to_string(),
        std_convention: "sample (n-1)".into(),
        stats: stats.clone(),
    };
    let mut bytes = serde_json::to_vec_pretty(&stats_file)?;
    bytes.push(b'\n');
    written.push(write_file(&dir.join("stats.json"), &bytes)?);

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "iteration", "fe_count", "best_error"])?;
    for r in records {
        for t in &r.trace {
            w.write_record([
                r.seed.to_string(),
                t.iteration.to_string(),
                t.fe_count.to_string(),
                t.best_error.to_string(),
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| io_err(dir)(e.into_error()))?;
    written.push(write_file(&dir.join("convergence.csv"), &bytes)?);

    for r in records {
        let path = programs.join(format!("seed_{}.txt", r.seed));
        written.push(write_file(
            &path,
            format!("{}\n", r.best_program).as_bytes(),
        )?);
    }
    Ok(written)
}

pub fn read_stats(path: &Path) -> Result<StatsFile, HarnessError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(serde_json::from_str(&text)?)
}
