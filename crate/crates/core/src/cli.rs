//! Command-line front end.
//!
//! Exit status is 0 on success and 2 on configuration, parse, or I/O
//! errors (clap's own usage errors also exit with 2).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{run_rng, EngineKind};
use crate::fixtures::REPORTED_PROGRAMS;
use crate::grammar::Grammar;
use crate::harness::{self, ExperimentConfig, ExportFormat, ExportOptions};
use crate::mapping::{map_with, Genotype, MapOptions, Phenotype};
use crate::problems::ant::{parse_ant_program, DEFAULT_STEP_BUDGET};
use crate::problems::mux::{mux_error, MuxProblem};
use crate::problems::regression::{NumExpr, DEFAULT_CASES};
use crate::problems::{AntProblem, ProblemKind, RegressionProblem, Trail};

#[derive(Debug, Parser)]
#[command(
    name = "gswarm",
    version,
    about = "Grammar-based swarm programming (GMFO / GWO)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run repeated independent searches and export the results.
    Run(RunArgs),
    /// Map one genotype through a grammar.
    Map(MapArgs),
    /// Score a program text on a benchmark problem.
    Eval(EvalArgs),
    /// Re-score the published evolved programs.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_engine)]
    pub engine: Option<EngineKind>,
    #[arg(long, value_parser = parse_problem)]
    pub problem: Option<ProblemKind>,
    /// key=value config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_fes: Option<u64>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub wraps: Option<u32>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub dimension: Option<usize>,
    #[arg(long)]
    pub grammar: Option<PathBuf>,
    #[arg(long)]
    pub trail: Option<PathBuf>,
    /// Share one regression case set (drawn from this seed) across runs.
    #[arg(long)]
    pub shared_cases: Option<u64>,
    #[arg(long)]
    pub skip_unit_rules: bool,
    #[arg(long)]
    pub ant_steps: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, env = "GSWARM_OUT", default_value = "results")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,
    /// Write wall_ms as 0 so reruns export identical bytes.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long)]
    pub grammar: PathBuf,
    /// Comma-separated codons in [0, 255].
    #[arg(long)]
    pub codons: String,
    #[arg(long, default_value_t = 2)]
    pub wraps: u32,
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub skip_unit_rules: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_parser = parse_problem)]
    pub problem: ProblemKind,
    #[arg(long)]
    pub program_file: PathBuf,
    #[arg(long)]
    pub trail: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    pub ant_steps: usize,
    /// Seed of the regression case set.
    #[arg(long, default_value_t = 0)]
    pub cases_seed: u64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub trail: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    pub ant_steps: usize,
    #[arg(long, default_value_t = 0)]
    pub cases_seed: u64,
}

fn parse_engine(s: &str) -> Result<EngineKind, String> {
    s.parse()
}

fn parse_problem(s: &str) -> Result<ProblemKind, String> {
    s.parse()
}

type CliResult = Result<(), String>;

/// Parses `args` (program name first), runs the command, and returns the
/// process exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Map(a) => cmd_map(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Replay(a) => cmd_replay(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn w(out: &mut dyn Write, line: impl AsRef<str>) -> CliResult {
    writeln!(out, "{}", line.as_ref()).map_err(|e| e.to_string())
}

pub fn experiment_config(a: &RunArgs) -> Result<ExperimentConfig, String> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            ExperimentConfig::from_kv(&text).map_err(|e| e.to_string())?
        }
        None => {
            let engine = a.engine.ok_or("--engine is required")?;
            let problem = a.problem.ok_or("--problem is required")?;
            ExperimentConfig::new(engine, problem)
        }
    };
    if let Some(e) = a.engine {
        cfg.engine = e;
    }
    if let Some(p) = a.problem {
        cfg.problem = p;
    }
    macro_rules! take {
        ($($field:ident <- $arg:expr),* $(,)?) => {
            $(if let Some(v) = $arg.clone() { cfg.$field = v; })*
        };
    }
    take!(runs <- a.runs, seed <- a.seed, max_fes <- a.max_fes, population <- a.population,
          dimension <- a.dimension, ant_steps <- a.ant_steps);
    if a.target.is_some() {
        cfg.target_error = a.target;
    }
    if a.wraps.is_some() {
        cfg.wraps = a.wraps;
    }
    if a.grammar.is_some() {
        cfg.grammar_path = a.grammar.clone();
    }
    if a.trail.is_some() {
        cfg.trail_path = a.trail.clone();
    }
    if a.shared_cases.is_some() {
        cfg.shared_cases = a.shared_cases;
    }
    if a.threads.is_some() {
        cfg.threads = a.threads;
    }
    cfg.skip_unit_rules |= a.skip_unit_rules;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> CliResult {
    let cfg = experiment_config(&a)?;
    let exp = harness::run_experiment(&cfg).map_err(|e| e.to_string())?;
    for r in &exp.records {
        w(
            out,
            format!(
                "seed {} | error {} | success {} | FEs {} | {}",
                r.seed, r.best_error, r.success, r.fes_used, r.best_program
            ),
        )?;
    }
    w(
        out,
        harness::summary_line(cfg.engine, cfg.problem, &exp.stats),
    )?;
    let opts = ExportOptions {
        format: match a.format {
            FormatArg::Csv => ExportFormat::Csv,
            FormatArg::Json => ExportFormat::Json,
        },
        timing: !a.no_timing,
    };
    let written =
        harness::export(&exp.records, &exp.stats, &a.out, opts).map_err(|e| e.to_string())?;
    w(
        out,
        format!("wrote {} files to {}", written.len(), a.out.display()),
    )
}

fn parse_codons(list: &str) -> Result<Vec<u8>, String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u8>()
                .map_err(|_| format!("codon `{s}` is not an integer in [0, 255]"))
        })
        .collect()
}

fn cmd_map(a: MapArgs, out: &mut dyn Write) -> CliResult {
    let text =
        fs::read_to_string(&a.grammar).map_err(|e| format!("{}: {e}", a.grammar.display()))?;
    let grammar = Grammar::parse(&text).map_err(|e| e.to_string())?;
    let geno = Genotype::new(parse_codons(&a.codons)?);
    let opts = MapOptions {
        wrap_limit: a.wraps,
        skip_unit_rules: a.skip_unit_rules,
    };
    let mut trace = Vec::new();
    let phenotype = map_with(&grammar, &geno, opts, a.trace.then_some(&mut trace));
    match &phenotype {
        Phenotype::Valid { text, .. } => w(out, text)?,
        Phenotype::Invalid => w(out, "INVALID")?,
    }
    if a.trace {
        w(out, "step, nonterminal, codon, k, index")?;
        for step in &trace {
            w(out, step.to_string())?;
        }
    }
    Ok(())
}

fn load_trail(path: &Option<PathBuf>) -> Result<Trail, String> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Trail::parse(&text).map_err(|e| e.to_string())
        }
        None => Ok(Trail::santa_fe()),
    }
}

/// Error of `program` on `problem`; syntax errors are reported, not scored.
pub fn score(
    problem: ProblemKind,
    program: &str,
    trail: &Trail,
    ant_steps: usize,
    cases_seed: u64,
) -> Result<f64, String> {
    match problem {
        ProblemKind::Ant => {
            let p = parse_ant_program(program).map_err(|e| e.to_string())?;
            Ok(AntProblem::new(trail.clone(), ant_steps).ant_error(&p) as f64)
        }
        ProblemKind::Regression => {
            let expr = NumExpr::parse(program).map_err(|e| e.to_string())?;
            let cases = RegressionProblem::generate(&mut run_rng(cases_seed), DEFAULT_CASES);
            Ok(cases.expr_error(&expr))
        }
        ProblemKind::Mux3 => mux_error(program, &MuxProblem::default())
            .map(|e| e as f64)
            .map_err(|e| e.to_string()),
    }
}

fn cmd_eval(a: EvalArgs, out: &mut dyn Write) -> CliResult {
    let program = fs::read_to_string(&a.program_file)
        .map_err(|e| format!("{}: {e}", a.program_file.display()))?;
    let trail = load_trail(&a.trail)?;
    let error = score(a.problem, &program, &trail, a.ant_steps, a.cases_seed)?;
    w(out, error.to_string())
}

fn cmd_replay(a: ReplayArgs, out: &mut dyn Write) -> CliResult {
    let trail = load_trail(&a.trail)?;
    for p in &REPORTED_PROGRAMS {
        let error = score(p.problem, p.text, &trail, a.ant_steps, a.cases_seed)?;
        w(
            out,
            format!(
                "{} {}: error {} (reported {})",
                p.engine, p.problem, error, p.reported_error
            ),
        )?;
    }
    Ok(())
}
