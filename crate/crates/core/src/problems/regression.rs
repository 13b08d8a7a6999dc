//! Quartic symbolic regression over prefix expressions in
//! `{plus, minus, times, pdivide, x}`.

use rand::Rng;

use super::prefix::{parse_term, Term};
use super::{FitnessOracle, ProgramError};

pub const DEFAULT_CASES: usize = 100;
pub const PDIVIDE_EPSILON: f64 = 1e-12;

pub fn quartic(x: f64) -> f64 {
    x + x * x + x * x * x + x * x * x * x
}

/// `a / b`, or 1 when `|b|` is at most 1e-12.
pub fn pdivide(a: f64, b: f64) -> f64 {
    if b.abs() > PDIVIDE_EPSILON {
        a / b
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NumExpr {
    X,
    Plus(Box<NumExpr>, Box<NumExpr>),
    Minus(Box<NumExpr>, Box<NumExpr>),
    Times(Box<NumExpr>, Box<NumExpr>),
    Pdivide(Box<NumExpr>, Box<NumExpr>),
}

impl NumExpr {
    pub fn parse(text: &str) -> Result<Self, ProgramError> {
        Self::from_term(&parse_term(text)?)
    }

    fn from_term(term: &Term) -> Result<Self, ProgramError> {
        match term {
            Term::Atom(a) if a == "x" => Ok(NumExpr::X),
            Term::Atom(a) => Err(ProgramError::Expr(format!("unknown variable `{a}`"))),
            Term::Call(name, args) => {
                let [a, b] = args.as_slice() else {
                    return Err(ProgramError::Expr(format!(
                        "`{name}` takes 2 arguments, got {}",
                        args.len()
                    )));
                };
                let (a, b) = (Box::new(Self::from_term(a)?), Box::new(Self::from_term(b)?));
                match name.as_str() {
                    "plus" => Ok(NumExpr::Plus(a, b)),
                    "minus" => Ok(NumExpr::Minus(a, b)),
                    "times" => Ok(NumExpr::Times(a, b)),
                    "pdivide" => Ok(NumExpr::Pdivide(a, b)),
                    other => Err(ProgramError::Expr(format!("unknown function `{other}`"))),
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            NumExpr::X => x,
            NumExpr::Plus(a, b) => a.eval(x) + b.eval(x),
            NumExpr::Minus(a, b) => a.eval(x) - b.eval(x),
            NumExpr::Times(a, b) => a.eval(x) * b.eval(x),
            NumExpr::Pdivide(a, b) => pdivide(a.eval(x), b.eval(x)),
        }
    }
}

pub fn eval_expression(text: &str, x: f64) -> Result<f64, ProgramError> {
    Ok(NumExpr::parse(text)?.eval(x))
}

/// Fitness cases `(x, quartic(x))` with `x` uniform in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionProblem {
    cases: Vec<(f64, f64)>,
}

impl RegressionProblem {
    pub fn generate<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let cases = (0..n)
            .map(|_| {
                let x = rng.gen_range(-1.0..=1.0);
                (x, quartic(x))
            })
            .collect();
        RegressionProblem { cases }
    }

    pub fn from_inputs(xs: impl IntoIterator<Item = f64>) -> Self {
        RegressionProblem {
            cases: xs.into_iter().map(|x| (x, quartic(x))).collect(),
        }
    }

    pub fn cases(&self) -> &[(f64, f64)] {
        &self.cases
    }

    /// Sum of absolute errors over all cases; non-finite sums become +inf.
    pub fn expr_error(&self, expr: &NumExpr) -> f64 {
        let total: f64 = self
            .cases
            .iter()
            .map(|&(x, y)| (expr.eval(x) - y).abs())
            .sum();
        if total.is_finite() {
            total
        } else {
            f64::INFINITY
        }
    }
}

pub fn regression_error(text: &str, problem: &RegressionProblem) -> f64 {
    match NumExpr::parse(text) {
        Ok(e) => problem.expr_error(&e),
        Err(_) => f64::INFINITY,
    }
}

impl FitnessOracle for RegressionProblem {
    fn error(&self, program: &str) -> f64 {
        regression_error(program, self)
    }

    fn worst_error(&self) -> f64 {
        f64::INFINITY
    }
}
