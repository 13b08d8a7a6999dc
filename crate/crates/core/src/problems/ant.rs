//! Santa Fe ant trail: trail fixture, program parser, and simulator.

use std::fmt;

use super::{FitnessOracle, ProgramError};
use crate::mapping::Ast;

pub const SANTA_FE_TRAIL: &str = include_str!("../../fixtures/santafe.trail");
pub const DEFAULT_STEP_BUDGET: usize = 600;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Move,
    Left,
    Right,
    IfFoodAhead(Vec<Statement>, Vec<Statement>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AntProgram(pub Vec<Statement>);

impl AntProgram {
    pub fn statements(&self) -> &[Statement] {
        &self.0
    }

    /// Parses the terminal leaves of a mapper-produced derivation tree.
    pub fn from_ast(ast: &Ast) -> Result<Self, ProgramError> {
        parse_ant_program(&ast.leaves().join(" "))
    }
}

fn write_seq(f: &mut fmt::Formatter<'_>, stmts: &[Statement]) -> fmt::Result {
    for (i, s) in stmts.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        match s {
            Statement::Move => f.write_str("move();")?,
            Statement::Left => f.write_str("left();")?,
            Statement::Right => f.write_str("right();")?,
            Statement::IfFoodAhead(then, other) => {
                f.write_str("if(foodahead()) ")?;
                write_seq(f, then)?;
                f.write_str(" else ")?;
                write_seq(f, other)?;
                f.write_str(" end;")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for AntProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_seq(f, &self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    If,
    Else,
    End,
    Move,
    Left,
    Right,
}

const KEYWORDS: [(&str, Token); 6] = [
    ("if(foodahead())", Token::If),
    ("else", Token::Else),
    ("end;", Token::End),
    ("move();", Token::Move),
    ("left();", Token::Left),
    ("right();", Token::Right),
];

fn lex(text: &str) -> Result<Vec<Token>, ProgramError> {
    let mut tokens = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        let (kw, tok) = KEYWORDS
            .iter()
            .find(|(kw, _)| rest.starts_with(kw))
            .ok_or_else(|| {
                let snippet: String = rest.chars().take(16).collect();
                ProgramError::Ant(format!("unknown token at `{snippet}`"))
            })?;
        tokens.push(*tok);
        rest = rest[kw.len()..].trim_start();
    }
    Ok(tokens)
}

fn parse_seq(tokens: &[Token], pos: &mut usize) -> Result<Vec<Statement>, ProgramError> {
    let mut out = Vec::new();
    while let Some(&tok) = tokens.get(*pos) {
        let stmt = match tok {
            Token::Else | Token::End => break,
            Token::Move => Statement::Move,
            Token::Left => Statement::Left,
            Token::Right => Statement::Right,
            Token::If => {
                *pos += 1;
                let then = parse_seq(tokens, pos)?;
                if tokens.get(*pos) != Some(&Token::Else) {
                    return Err(ProgramError::Ant("`if` without matching `else`".into()));
                }
                *pos += 1;
                let other = parse_seq(tokens, pos)?;
                if tokens.get(*pos) != Some(&Token::End) {
                    return Err(ProgramError::Ant("`if` without matching `end;`".into()));
                }
                Statement::IfFoodAhead(then, other)
            }
        };
        *pos += 1;
        out.push(stmt);
    }
    if out.is_empty() {
        return Err(ProgramError::Ant("empty statement sequence".into()));
    }
    Ok(out)
}

pub fn parse_ant_program(text: &str) -> Result<AntProgram, ProgramError> {
    let tokens = lex(text)?;
    let mut pos = 0;
    let program = parse_seq(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(ProgramError::Ant("unbalanced `else`/`end;`".into()));
    }
    Ok(AntProgram(program))
}

/// Food layout on a toroidal grid. The ant starts at (0, 0) facing east.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trail {
    width: usize,
    height: usize,
    food: Vec<bool>,
}

impl Trail {
    /// Rows of `.` (empty) and `#` (food); all rows the same width.
    pub fn parse(text: &str) -> Result<Self, ProgramError> {
        let rows: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        let width = rows.first().map_or(0, |r| r.chars().count());
        if width == 0 {
            return Err(ProgramError::Trail("empty trail".into()));
        }
        let mut food = Vec::with_capacity(width * rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(ProgramError::Trail(format!(
                    "row {i} is not {width} cells wide"
                )));
            }
            for c in row.chars() {
                match c {
                    '#' => food.push(true),
                    '.' => food.push(false),
                    other => {
                        return Err(ProgramError::Trail(format!(
                            "unexpected cell `{other}` in row {i}"
                        )))
                    }
                }
            }
        }
        Ok(Trail {
            width,
            height: rows.len(),
            food,
        })
    }

    pub fn santa_fe() -> Self {
        Trail::parse(SANTA_FE_TRAIL).expect("embedded trail is well formed")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn food_count(&self) -> usize {
        self.food.iter().filter(|&&f| f).count()
    }

    pub fn has_food(&self, row: usize, col: usize) -> bool {
        self.food[row * self.width + col]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Heading {
    North,
    East,
    South,
    West,
}

impl Heading {
    fn left(self) -> Self {
        match self {
            Heading::North => Heading::West,
            Heading::West => Heading::South,
            Heading::South => Heading::East,
            Heading::East => Heading::North,
        }
    }

    fn right(self) -> Self {
        self.left().left().left()
    }
}

/// Per-evaluation simulation state.
#[derive(Debug, Clone)]
pub struct AntWorld {
    width: usize,
    height: usize,
    food: Vec<bool>,
    total_food: usize,
    pub row: usize,
    pub col: usize,
    pub heading: Heading,
    pub eaten: usize,
    pub steps_used: usize,
    pub step_budget: usize,
}

impl AntWorld {
    pub fn new(trail: &Trail, step_budget: usize) -> Self {
        AntWorld {
            width: trail.width,
            height: trail.height,
            food: trail.food.clone(),
            total_food: trail.food_count(),
            row: 0,
            col: 0,
            heading: Heading::East,
            eaten: 0,
            steps_used: 0,
            step_budget,
        }
    }

    pub fn total_food(&self) -> usize {
        self.total_food
    }

    pub fn finished(&self) -> bool {
        self.steps_used >= self.step_budget || self.eaten == self.total_food
    }

    fn ahead(&self) -> (usize, usize) {
        let (h, w) = (self.height, self.width);
        match self.heading {
            Heading::North => ((self.row + h - 1) % h, self.col),
            Heading::South => ((self.row + 1) % h, self.col),
            Heading::East => (self.row, (self.col + 1) % w),
            Heading::West => (self.row, (self.col + w - 1) % w),
        }
    }

    pub fn food_ahead(&self) -> bool {
        let (r, c) = self.ahead();
        self.food[r * self.width + c]
    }

    fn advance(&mut self) {
        let (r, c) = self.ahead();
        self.row = r;
        self.col = c;
        self.steps_used += 1;
        let cell = &mut self.food[r * self.width + c];
        if *cell {
            *cell = false;
            self.eaten += 1;
        }
    }

    fn exec(&mut self, stmts: &[Statement]) {
        for stmt in stmts {
            if self.finished() {
                return;
            }
            match stmt {
                Statement::Move => self.advance(),
                Statement::Left => {
                    self.heading = self.heading.left();
                    self.steps_used += 1;
                }
                Statement::Right => {
                    self.heading = self.heading.right();
                    self.steps_used += 1;
                }
                Statement::IfFoodAhead(then, other) => {
                    if self.food_ahead() {
                        self.exec(then)
                    } else {
                        self.exec(other)
                    }
                }
            }
        }
    }
}

/// Runs the program in a loop until the step budget is spent or all food
/// is eaten. Returns the number of food pieces eaten.
pub fn run_ant(program: &AntProgram, world: &mut AntWorld) -> usize {
    while !world.finished() {
        let before = world.steps_used;
        world.exec(&program.0);
        if world.steps_used == before {
            break;
        }
    }
    world.eaten
}

#[derive(Debug, Clone)]
pub struct AntProblem {
    pub trail: Trail,
    pub step_budget: usize,
}

impl Default for AntProblem {
    fn default() -> Self {
        AntProblem {
            trail: Trail::santa_fe(),
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

impl AntProblem {
    pub fn new(trail: Trail, step_budget: usize) -> Self {
        AntProblem { trail, step_budget }
    }

    pub fn eaten(&self, program: &AntProgram) -> usize {
        run_ant(program, &mut AntWorld::new(&self.trail, self.step_budget))
    }

    /// Uneaten food count.
    pub fn ant_error(&self, program: &AntProgram) -> usize {
        self.trail.food_count() - self.eaten(program)
    }
}

impl FitnessOracle for AntProblem {
    fn error(&self, program: &str) -> f64 {
        match parse_ant_program(program) {
            Ok(p) => self.ant_error(&p) as f64,
            Err(_) => self.worst_error(),
        }
    }

    fn worst_error(&self) -> f64 {
        self.trail.food_count() as f64
    }
}
