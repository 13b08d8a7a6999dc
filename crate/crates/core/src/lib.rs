//! Grammar-based swarm programming.
//!
//! Integer-codon genotypes are mapped through a BNF grammar into programs,
//! and a moth-flame or whale optimizer searches codon space for programs
//! that solve the Santa Fe ant trail, quartic regression, or the 3-input
//! multiplexer.

pub mod cli;
pub mod engine;
pub mod fixtures;
pub mod grammar;
pub mod harness;
pub mod mapping;
pub mod problems;

pub use engine::{run, EngineConfig, EngineKind, RunOutcome, Search};
pub use grammar::{parse_bnf, Grammar, GrammarError, Symbol};
pub use harness::{run_experiment, ExperimentConfig, ExperimentStats, RunRecord};
pub use mapping::{map, map_with, Genotype, MapOptions, Phenotype};
pub use problems::{FitnessOracle, ProblemKind};
