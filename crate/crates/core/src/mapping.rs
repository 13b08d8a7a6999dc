//! Genotype-to-phenotype mapping.
//!
//! Derivation is strictly leftmost from the grammar's start symbol. Each
//! expanded nonterminal reads the next codon and picks production
//! `codon % k`. When the codons run out the cursor returns to the first codon
//! ("wrapping"); once the wrap budget is spent, any remaining nonterminal
//! makes the individual invalid.

use std::fmt;

use rand::Rng;

use crate::grammar::{Grammar, Symbol};

pub const CODON_MAX: u8 = 255;

/// Fixed-length vector of codons in `[0, 255]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Genotype(Vec<u8>);

impl Genotype {
    pub fn new(codons: Vec<u8>) -> Self {
        Genotype(codons)
    }

    pub fn codons(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Codon for a continuous coordinate: rounded half away from zero, then
    /// clamped into the codon range.
    pub fn codon_from_position(x: f64) -> u8 {
        if x.is_nan() {
            return 0;
        }
        x.round().clamp(0.0, f64::from(CODON_MAX)) as u8
    }

    pub fn from_position(position: &[f64]) -> Self {
        Genotype(
            position
                .iter()
                .map(|&x| Self::codon_from_position(x))
                .collect(),
        )
    }
}

impl From<Vec<u8>> for Genotype {
    fn from(codons: Vec<u8>) -> Self {
        Genotype(codons)
    }
}

/// `round(255 * u)` for each codon, with `u` drawn from `uniform`.
pub fn genotype_from_uniform(d: usize, mut uniform: impl FnMut() -> f64) -> Genotype {
    Genotype(
        (0..d)
            .map(|_| Genotype::codon_from_position(255.0 * uniform()))
            .collect(),
    )
}

pub fn random_genotype<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Genotype {
    genotype_from_uniform(d, || rng.gen::<f64>())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ast {
    Terminal(String),
    Node {
        nonterminal: String,
        production: usize,
        children: Vec<Ast>,
    },
}

impl Ast {
    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Ast::Terminal(t) => out.push(t),
            Ast::Node { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn render(&self) -> String {
        render(self)
    }
}

/// Terminal leaves joined by single spaces.
pub fn render(ast: &Ast) -> String {
    ast.leaves().join(" ")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Phenotype {
    Valid {
        ast: Ast,
        text: String,
        codons_used: usize,
        wraps_used: u32,
    },
    Invalid,
}

impl Phenotype {
    pub fn is_valid(&self) -> bool {
        matches!(self, Phenotype::Valid { .. })
    }

    pub fn text(&self) -> Option<&str> {
        match self {
            Phenotype::Valid { text, .. } => Some(text),
            Phenotype::Invalid => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapOptions {
    pub wrap_limit: u32,
    /// Expand single-production nonterminals without reading a codon.
    pub skip_unit_rules: bool,
}

impl MapOptions {
    pub fn with_wraps(wrap_limit: u32) -> Self {
        MapOptions {
            wrap_limit,
            skip_unit_rules: false,
        }
    }
}

/// One nonterminal expansion. `codon` is `None` for unit rules expanded
/// without consumption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: usize,
    pub nonterminal: String,
    pub codon: Option<u8>,
    pub k: usize,
    pub index: usize,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.codon {
            Some(c) => write!(
                f,
                "{}, {}, {}, {}, {}",
                self.step, self.nonterminal, c, self.k, self.index
            ),
            None => write!(
                f,
                "{}, {}, -, {}, {}",
                self.step, self.nonterminal, self.k, self.index
            ),
        }
    }
}

pub fn map(g: &Grammar, geno: &Genotype, wrap_limit: u32) -> Phenotype {
    map_with(g, geno, MapOptions::with_wraps(wrap_limit), None)
}

struct Choice<'g> {
    rule: &'g crate::grammar::Rule,
    production: usize,
}

/// Full mapper. When `trace` is given, every expansion is appended to it,
/// including those of a derivation that ends up invalid.
pub fn map_with(
    g: &Grammar,
    geno: &Genotype,
    opts: MapOptions,
    mut trace: Option<&mut Vec<TraceStep>>,
) -> Phenotype {
    let codons = geno.codons();
    let d = codons.len();
    let expansion_cap = if opts.skip_unit_rules {
        (16 * d * (opts.wrap_limit as usize + 1)).max(1024)
    } else {
        usize::MAX
    };

    let mut stack: Vec<&Symbol> = Vec::new();
    let start = g.rule(g.start()).expect("start symbol has a rule");
    let mut choices: Vec<Choice> = Vec::new();
    let mut text = String::new();
    let mut cursor = 0usize;
    let mut codons_used = 0usize;
    let mut wraps_used = 0u32;

    let mut pending = Some(start);
    loop {
        let rule = match pending.take() {
            Some(rule) => rule,
            None => match stack.pop() {
                None => break,
                Some(Symbol::Terminal(t)) => {
                    if !text.is_empty() {
                        text.push(' ');
                    }
                    text.push_str(t);
                    continue;
                }
                Some(Symbol::NonTerminal(name)) => g.rule(name).expect("validated grammar"),
            },
        };

        if choices.len() >= expansion_cap {
            return Phenotype::Invalid;
        }
        let k = rule.productions.len();
        let codon = if opts.skip_unit_rules && k == 1 {
            None
        } else {
            if cursor == d {
                if wraps_used >= opts.wrap_limit || d == 0 {
                    return Phenotype::Invalid;
                }
                wraps_used += 1;
                cursor = 0;
            }
            let c = codons[cursor];
            cursor += 1;
            codons_used += 1;
            Some(c)
        };
        let index = codon.map_or(0, |c| c as usize % k);
        if let Some(trace) = trace.as_deref_mut() {
            trace.push(TraceStep {
                step: choices.len(),
                nonterminal: rule.lhs.clone(),
                codon,
                k,
                index,
            });
        }
        choices.push(Choice {
            rule,
            production: index,
        });
        stack.extend(rule.productions[index].iter().rev());
    }

    let mut replay = choices.iter();
    let ast = build_ast(&mut replay);
    Phenotype::Valid {
        ast,
        text,
        codons_used,
        wraps_used,
    }
}

/// Rebuilds the derivation tree from the preorder list of choices.
fn build_ast<'a, 'g: 'a>(choices: &mut impl Iterator<Item = &'a Choice<'g>>) -> Ast {
    let choice = choices.next().expect("choice for every expansion");
    let children = choice.rule.productions[choice.production]
        .iter()
        .map(|sym| match sym {
            Symbol::Terminal(t) => Ast::Terminal(t.clone()),
            Symbol::NonTerminal(_) => build_ast(choices),
        })
        .collect();
    Ast::Node {
        nonterminal: choice.rule.lhs.clone(),
        production: choice.production,
        children,
    }
}
