//! Benchmark problems. Each one turns phenotype text into an error to
//! minimize.

pub mod ant;
pub mod mux;
pub mod prefix;
pub mod regression;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use ant::{AntProblem, AntProgram, AntWorld, Trail};
pub use mux::MuxProblem;
pub use regression::RegressionProblem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramError {
    #[error("ant program: {0}")]
    Ant(String),
    #[error("expression: {0}")]
    Expr(String),
    #[error("trail: {0}")]
    Trail(String),
}

pub trait FitnessOracle: Sync {
    /// Error of a program; syntax errors map to [`FitnessOracle::worst_error`].
    fn error(&self, program: &str) -> f64;

    fn worst_error(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Ant,
    Regression,
    Mux3,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] =
        [ProblemKind::Ant, ProblemKind::Regression, ProblemKind::Mux3];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Ant => "ant",
            ProblemKind::Regression => "regression",
            ProblemKind::Mux3 => "mux3",
        }
    }

    pub fn default_wraps(self) -> u32 {
        match self {
            ProblemKind::Ant => 3,
            ProblemKind::Regression => 2,
            ProblemKind::Mux3 => 1,
        }
    }

    pub fn default_target(self) -> f64 {
        match self {
            ProblemKind::Ant | ProblemKind::Mux3 => 0.0,
            ProblemKind::Regression => 0.01,
        }
    }

    pub fn grammar_source(self) -> &'static str {
        match self {
            ProblemKind::Ant => include_str!("../../fixtures/ant.bnf"),
            ProblemKind::Regression => include_str!("../../fixtures/regression.bnf"),
            ProblemKind::Mux3 => include_str!("../../fixtures/mux3.bnf"),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ant" | "santafe" => Ok(ProblemKind::Ant),
            "regression" => Ok(ProblemKind::Regression),
            "mux3" | "mux" => Ok(ProblemKind::Mux3),
            other => Err(format!(
                "unknown problem `{other}` (expected ant, regression or mux3)"
            )),
        }
    }
}

/// A constructed problem instance.
#[derive(Debug, Clone)]
pub enum Benchmark {
    Ant(AntProblem),
    Regression(RegressionProblem),
    Mux3(MuxProblem),
}

impl Benchmark {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Benchmark::Ant(_) => ProblemKind::Ant,
            Benchmark::Regression(_) => ProblemKind::Regression,
            Benchmark::Mux3(_) => ProblemKind::Mux3,
        }
    }
}

impl FitnessOracle for Benchmark {
    fn error(&self, program: &str) -> f64 {
        match self {
            Benchmark::Ant(p) => p.error(program),
            Benchmark::Regression(p) => p.error(program),
            Benchmark::Mux3(p) => p.error(program),
        }
    }

    fn worst_error(&self) -> f64 {
        match self {
            Benchmark::Ant(p) => p.worst_error(),
            Benchmark::Regression(p) => p.worst_error(),
            Benchmark::Mux3(p) => p.worst_error(),
        }
    }
}
