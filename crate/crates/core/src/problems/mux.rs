//! 3-input multiplexer. `x1` is the address line, `x2` and `x3` the data
//! lines selected when `x1` is 0 and 1 respectively.

use super::prefix::{parse_term, Term};
use super::{FitnessOracle, ProgramError};

pub const ROWS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Var(usize),
    Not(Box<BoolExpr>),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Nand(Box<BoolExpr>, Box<BoolExpr>),
    Nor(Box<BoolExpr>, Box<BoolExpr>),
}

impl BoolExpr {
    pub fn parse(text: &str) -> Result<Self, ProgramError> {
        Self::from_term(&parse_term(text)?)
    }

    fn from_term(term: &Term) -> Result<Self, ProgramError> {
        match term {
            Term::Atom(a) => match a.as_str() {
                "x1" => Ok(BoolExpr::Var(0)),
                "x2" => Ok(BoolExpr::Var(1)),
                "x3" => Ok(BoolExpr::Var(2)),
                other => Err(ProgramError::Expr(format!("unknown input `{other}`"))),
            },
            Term::Call(name, args) if name == "not" => match args.as_slice() {
                [a] => Ok(BoolExpr::Not(Box::new(Self::from_term(a)?))),
                _ => Err(ProgramError::Expr("`not` takes 1 argument".into())),
            },
            Term::Call(name, args) => {
                let [a, b] = args.as_slice() else {
                    return Err(ProgramError::Expr(format!("`{name}` takes 2 arguments")));
                };
                let (a, b) = (Box::new(Self::from_term(a)?), Box::new(Self::from_term(b)?));
                match name.as_str() {
                    "and" => Ok(BoolExpr::And(a, b)),
                    "or" => Ok(BoolExpr::Or(a, b)),
                    "nand" => Ok(BoolExpr::Nand(a, b)),
                    "nor" => Ok(BoolExpr::Nor(a, b)),
                    other => Err(ProgramError::Expr(format!("unknown gate `{other}`"))),
                }
            }
        }
    }

    pub fn eval(&self, inputs: [bool; 3]) -> bool {
        match self {
            BoolExpr::Var(i) => inputs[*i],
            BoolExpr::Not(a) => !a.eval(inputs),
            BoolExpr::And(a, b) => a.eval(inputs) && b.eval(inputs),
            BoolExpr::Or(a, b) => a.eval(inputs) || b.eval(inputs),
            BoolExpr::Nand(a, b) => !(a.eval(inputs) && b.eval(inputs)),
            BoolExpr::Nor(a, b) => !(a.eval(inputs) || b.eval(inputs)),
        }
    }

    /// Outputs for rows 0..8, row `r` having inputs `(x1, x2, x3)` equal to
    /// the bits of `r` from most to least significant.
    pub fn truth_table(&self) -> [bool; ROWS] {
        std::array::from_fn(|r| self.eval(row_inputs(r)))
    }
}

pub fn row_inputs(row: usize) -> [bool; 3] {
    [row & 4 != 0, row & 2 != 0, row & 1 != 0]
}

pub fn multiplexer(inputs: [bool; 3]) -> bool {
    let [address, d0, d1] = inputs;
    if address {
        d1
    } else {
        d0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuxProblem {
    rows: [([bool; 3], bool); ROWS],
}

impl Default for MuxProblem {
    fn default() -> Self {
        MuxProblem {
            rows: std::array::from_fn(|r| {
                let inputs = row_inputs(r);
                (inputs, multiplexer(inputs))
            }),
        }
    }
}

impl MuxProblem {
    pub fn rows(&self) -> &[([bool; 3], bool); ROWS] {
        &self.rows
    }

    pub fn expr_error(&self, expr: &BoolExpr) -> usize {
        self.rows
            .iter()
            .filter(|(inputs, want)| expr.eval(*inputs) != *want)
            .count()
    }
}

/// Number of truth-table rows where the program disagrees with the target.
pub fn mux_error(text: &str, problem: &MuxProblem) -> Result<usize, ProgramError> {
    Ok(problem.expr_error(&BoolExpr::parse(text)?))
}

impl FitnessOracle for MuxProblem {
    fn error(&self, program: &str) -> f64 {
        mux_error(program, self).map_or(self.worst_error(), |e| e as f64)
    }

    fn worst_error(&self) -> f64 {
        ROWS as f64
    }
}
