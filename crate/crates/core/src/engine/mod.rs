//! FE-budgeted population search over codon space.
//!
//! Agents move in a continuous shadow space `[0, 255]^d`; their genotype is
//! the rounded, clamped position. Only valid phenotypes are evaluated and
//! counted against the function-evaluation budget.

pub mod mfo;
pub mod woa;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::Grammar;
use crate::mapping::{map_with, random_genotype, Genotype, MapOptions, Phenotype, CODON_MAX};
use crate::problems::FitnessOracle;

pub use mfo::mfo_step;
pub use woa::woa_step;

/// One RNG stream per run.
pub type RunRng = ChaCha8Rng;

pub fn run_rng(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Agents invalid for this many consecutive sweeps are re-drawn.
pub const DEFAULT_INVALID_PATIENCE: u32 = 5;
/// A run gives up after `STALL_FACTOR * max_fes` invalid mappings.
pub const STALL_FACTOR: u64 = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EngineKind {
    #[serde(rename = "gmfo")]
    Mfo,
    #[serde(rename = "gwo")]
    Woa,
}

impl EngineKind {
    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Mfo => "gmfo",
            EngineKind::Woa => "gwo",
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gmfo" | "mfo" => Ok(EngineKind::Mfo),
            "gwo" | "woa" => Ok(EngineKind::Woa),
            other => Err(format!("unknown engine `{other}` (expected gmfo or gwo)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub engine: EngineKind,
    pub population: usize,
    pub dimension: usize,
    pub max_fes: u64,
    pub target_error: f64,
    /// Logarithmic spiral shape constant `b`.
    pub spiral_b: f64,
    pub invalid_patience: u32,
}

impl EngineConfig {
    pub fn new(engine: EngineKind) -> Self {
        EngineConfig {
            engine,
            population: 30,
            dimension: 100,
            max_fes: 30_000,
            target_error: 0.0,
            spiral_b: 1.0,
            invalid_patience: DEFAULT_INVALID_PATIENCE,
        }
    }

    /// Nominal iteration count the schedules are laid out over.
    pub fn horizon(&self) -> f64 {
        self.max_fes as f64 / self.population as f64
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.population < 2 {
            return Err(ConfigError::Invalid(format!(
                "population must be >= 2, got {}",
                self.population
            )));
        }
        if self.dimension < 1 {
            return Err(ConfigError::Invalid("dimension must be >= 1".into()));
        }
        if self.max_fes < self.population as u64 {
            return Err(ConfigError::Invalid(format!(
                "max_fes ({}) must be >= population ({})",
                self.max_fes, self.population
            )));
        }
        if self.target_error.is_nan() {
            return Err(ConfigError::Invalid("target_error is NaN".into()));
        }
        if !self.spiral_b.is_finite() {
            return Err(ConfigError::Invalid("spiral_b must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub position: Vec<f64>,
    pub genotype: Genotype,
    /// `+inf` while unevaluated or invalid.
    pub fitness: f64,
    pub invalid_streak: u32,
}

impl Agent {
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        let genotype = random_genotype(d, rng);
        Agent {
            position: genotype.codons().iter().map(|&c| f64::from(c)).collect(),
            genotype,
            fitness: f64::INFINITY,
            invalid_streak: 0,
        }
    }

    /// Clamps the position into the codon range and re-derives the genotype.
    pub fn sync_genotype(&mut self) {
        for x in &mut self.position {
            *x = clamp_coordinate(*x);
        }
        self.genotype = Genotype::from_position(&self.position);
    }
}

pub fn clamp_coordinate(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, f64::from(CODON_MAX))
    }
}

/// Logarithmic spiral offset `distance * e^(b t) * cos(2 pi t)`.
pub fn spiral(distance: f64, b: f64, t: f64) -> f64 {
    distance * (b * t).exp() * (2.0 * std::f64::consts::PI * t).cos()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Best {
    pub position: Vec<f64>,
    pub genotype: Genotype,
    pub fitness: f64,
    pub program: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flame {
    pub position: Vec<f64>,
    pub fitness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhaleMove {
    Encircle,
    Explore { partner: usize },
    Spiral,
}

/// Coefficients one whale drew in the last iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhaleDraw {
    pub a_coef: f64,
    pub c_coef: f64,
    pub l: f64,
    pub p: f64,
    pub movement: WhaleMove,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Initial,
    Mfo {
        flames: Vec<Flame>,
        flame_count: usize,
        r: f64,
    },
    Woa {
        a: f64,
        draws: Vec<WhaleDraw>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineState {
    pub agents: Vec<Agent>,
    pub best: Option<Best>,
    pub fe_count: u64,
    pub invalid_count: u64,
    /// Completed engine steps.
    pub iteration: u64,
    pub schedule: Schedule,
}

impl EngineState {
    pub fn best_error(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.fitness)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    Invalid,
    Valid(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub fe_count: u64,
    pub best_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub best_error: f64,
    pub best_program: Option<String>,
    pub best_genotype: Option<Genotype>,
    pub fes_used: u64,
    pub success: bool,
    pub iterations: u64,
    pub invalid_evaluations: u64,
    pub stalled: bool,
    pub trace: Vec<TracePoint>,
}

pub struct Search<'a> {
    config: EngineConfig,
    grammar: &'a Grammar,
    map: MapOptions,
    problem: &'a dyn FitnessOracle,
    state: EngineState,
    rng: RunRng,
    trace: Vec<TracePoint>,
}

impl<'a> Search<'a> {
    pub fn new(
        config: EngineConfig,
        grammar: &'a Grammar,
        map: MapOptions,
        problem: &'a dyn FitnessOracle,
        seed: u64,
    ) -> Result<Self, ConfigError> {
        Self::with_rng(config, grammar, map, problem, run_rng(seed))
    }

    pub fn with_rng(
        config: EngineConfig,
        grammar: &'a Grammar,
        map: MapOptions,
        problem: &'a dyn FitnessOracle,
        mut rng: RunRng,
    ) -> Result<Self, ConfigError> {
        config.validate()?;
        let agents = (0..config.population)
            .map(|_| Agent::random(config.dimension, &mut rng))
            .collect();
        Ok(Search {
            config,
            grammar,
            map,
            problem,
            state: EngineState {
                agents,
                best: None,
                fe_count: 0,
                invalid_count: 0,
                iteration: 0,
                schedule: Schedule::Initial,
            },
            rng,
            trace: Vec::new(),
        })
    }

    pub fn state(&self) -> &EngineState {
        &self.state
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn trace(&self) -> &[TracePoint] {
        &self.trace
    }

    fn stalled(&self) -> bool {
        self.state.invalid_count >= STALL_FACTOR.saturating_mul(self.config.max_fes)
    }

    pub fn is_finished(&self) -> bool {
        self.state.fe_count >= self.config.max_fes
            || self
                .state
                .best
                .as_ref()
                .is_some_and(|b| b.fitness <= self.config.target_error)
            || self.stalled()
    }

    /// Maps and scores agent `i`. Returns `None` once the run is finished.
    pub fn evaluate_agent(&mut self, i: usize) -> Option<Evaluation> {
        if self.is_finished() {
            return None;
        }
        let agent = &mut self.state.agents[i];
        match map_with(self.grammar, &agent.genotype, self.map, None) {
            Phenotype::Invalid => {
                agent.fitness = f64::INFINITY;
                agent.invalid_streak += 1;
                self.state.invalid_count += 1;
                Some(Evaluation::Invalid)
            }
            Phenotype::Valid { text, .. } => {
                let mut fitness = self.problem.error(&text);
                if fitness.is_nan() {
                    fitness = f64::INFINITY;
                }
                agent.fitness = fitness;
                agent.invalid_streak = 0;
                self.state.fe_count += 1;
                if self.state.best.as_ref().is_none_or(|b| fitness < b.fitness) {
                    self.state.best = Some(Best {
                        position: agent.position.clone(),
                        genotype: agent.genotype.clone(),
                        fitness,
                        program: text,
                    });
                }
                Some(Evaluation::Valid(fitness))
            }
        }
    }

    /// Evaluates every agent in order, stopping as soon as the run finishes.
    /// Returns whether the run is finished.
    pub fn evaluate_all(&mut self) -> bool {
        for i in 0..self.state.agents.len() {
            if self.evaluate_agent(i).is_none() {
                break;
            }
        }
        self.trace.push(TracePoint {
            iteration: self.state.iteration,
            fe_count: self.state.fe_count,
            best_error: self.state.best_error(),
        });
        self.is_finished()
    }

    /// Moves the population once, then re-draws agents that have stayed
    /// invalid too long. With no valid individual yet there is nothing to
    /// steer toward, so every agent is re-drawn instead.
    pub fn step(&mut self) {
        if self.state.best.is_none() {
            let d = self.config.dimension;
            for agent in &mut self.state.agents {
                *agent = Agent::random(d, &mut self.rng);
            }
            return;
        }
        match self.config.engine {
            EngineKind::Mfo => mfo_step(&mut self.state, &self.config, &mut self.rng),
            EngineKind::Woa => woa_step(&mut self.state, &self.config, &mut self.rng),
        }
        let (d, patience) = (self.config.dimension, self.config.invalid_patience);
        for agent in &mut self.state.agents {
            if agent.invalid_streak >= patience {
                *agent = Agent::random(d, &mut self.rng);
            }
        }
    }

    pub fn run(mut self) -> RunOutcome {
        while !self.evaluate_all() {
            self.step();
        }
        self.into_outcome()
    }

    pub fn into_outcome(self) -> RunOutcome {
        let stalled = self.stalled() && self.state.fe_count < self.config.max_fes;
        let best_error = self.state.best_error();
        let success = self.state.best.is_some() && best_error <= self.config.target_error;
        let (best_program, best_genotype) = match self.state.best {
            Some(b) => (Some(b.program), Some(b.genotype)),
            None => (None, None),
        };
        RunOutcome {
            best_error,
            best_program,
            best_genotype,
            fes_used: self.state.fe_count,
            success,
            iterations: self.state.iteration,
            invalid_evaluations: self.state.invalid_count,
            stalled,
            trace: self.trace,
        }
    }
}

/// One complete run from a seed.
pub fn run(
    config: &EngineConfig,
    problem: &dyn FitnessOracle,
    grammar: &Grammar,
    map: MapOptions,
    seed: u64,
) -> Result<RunOutcome, ConfigError> {
    Ok(Search::new(config.clone(), grammar, map, problem, seed)?.run())
}
