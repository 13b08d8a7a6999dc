//! Embedded fixture files.

use crate::engine::EngineKind;
use crate::problems::ProblemKind;

/// The example expression grammar (`<expr>`, `<op>`, `<var>`).
pub const EXPR_GRAMMAR: &str = include_str!("../fixtures/expr.bnf");

pub const GMFO_ANT: &str = include_str!("../fixtures/reference_programs/gmfo_ant.txt");
pub const GWO_ANT: &str = include_str!("../fixtures/reference_programs/gwo_ant.txt");
pub const GMFO_REGRESSION: &str = include_str!("../fixtures/reference_programs/gmfo_regression.txt");
pub const GWO_REGRESSION: &str = include_str!("../fixtures/reference_programs/gwo_regression.txt");
pub const GMFO_MUX3: &str = include_str!("../fixtures/reference_programs/gmfo_mux3.txt");
pub const GWO_MUX3: &str = include_str!("../fixtures/reference_programs/gwo_mux3.txt");

/// A published evolved program together with the result reported for it.
#[derive(Debug, Clone, Copy)]
pub struct ReportedProgram {
    pub engine: EngineKind,
    pub problem: ProblemKind,
    pub text: &'static str,
    pub reported_error: f64,
}

pub const REPORTED_PROGRAMS: [ReportedProgram; 6] = [
    ReportedProgram {
        engine: EngineKind::Mfo,
        problem: ProblemKind::Ant,
        text: GMFO_ANT,
        reported_error: 0.0,
    },
    ReportedProgram {
        engine: EngineKind::Woa,
        problem: ProblemKind::Ant,
        text: GWO_ANT,
        reported_error: 1.0,
    },
    ReportedProgram {
        engine: EngineKind::Mfo,
        problem: ProblemKind::Regression,
        text: GMFO_REGRESSION,
        reported_error: 1.7837e-15,
    },
    ReportedProgram {
        engine: EngineKind::Woa,
        problem: ProblemKind::Regression,
        text: GWO_REGRESSION,
        reported_error: 4.6668e-15,
    },
    ReportedProgram {
        engine: EngineKind::Mfo,
        problem: ProblemKind::Mux3,
        text: GMFO_MUX3,
        reported_error: 0.0,
    },
    ReportedProgram {
        engine: EngineKind::Woa,
        problem: ProblemKind::Mux3,
        text: GWO_MUX3,
        reported_error: 1.0,
    },
];
