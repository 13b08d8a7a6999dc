//! BNF grammars.
//!
//! The accepted format is one rule per logical line:
//!
//! ```text
//! 1. <expr> := (<expr><op><expr>) (0) | <var> (1)
//! 2. <op>   := + | - | * | /
//! ```
//!
//! Text inside angle brackets names a nonterminal. Everything else is split
//! on whitespace into terminal tokens, so `move();` stays one token and
//! `(<expr>` yields the terminal `(` followed by the nonterminal `expr`.
//! A leading `N.` line number is ignored, and a trailing `(i)` on an
//! alternative is read as its index annotation, which must match its
//! position. A rule may continue on following lines until the next `:=`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("nonterminal <{name}> is referenced by <{referenced_by}> but never defined")]
    UndefinedNonterminal { name: String, referenced_by: String },
    #[error("unknown nonterminal <{0}>")]
    UnknownNonterminal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(String),
    NonTerminal(String),
}

impl Symbol {
    pub fn is_terminal(&self) -> bool {
        matches!(self, Symbol::Terminal(_))
    }

    pub fn text(&self) -> &str {
        match self {
            Symbol::Terminal(s) | Symbol::NonTerminal(s) => s,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Terminal(t) => f.write_str(t),
            Symbol::NonTerminal(n) => write!(f, "<{n}>"),
        }
    }
}

pub type Production = Vec<Symbol>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: String,
    pub productions: Vec<Production>,
}

/// A validated context-free grammar. The start symbol is the left-hand side
/// of the first rule in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    rules: Vec<Rule>,
    index: HashMap<String, usize>,
}

impl Grammar {
    pub fn parse(source: &str) -> Result<Self, GrammarError> {
        parse_bnf(source)
    }

    pub fn start(&self) -> &str {
        &self.rules[0].lhs
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, nonterminal: &str) -> Option<&Rule> {
        self.index.get(nonterminal).map(|&i| &self.rules[i])
    }

    /// Number of alternatives for `nonterminal`; the divisor of the MOD rule.
    pub fn production_count(&self, nonterminal: &str) -> Result<usize, GrammarError> {
        self.rule(nonterminal)
            .map(|r| r.productions.len())
            .ok_or_else(|| GrammarError::UnknownNonterminal(nonterminal.to_string()))
    }
}

/// Canonical text form. Every alternative carries its explicit index so that
/// the output re-parses to an identical grammar.
impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            write!(f, "<{}> :=", rule.lhs)?;
            for (i, prod) in rule.productions.iter().enumerate() {
                if i > 0 {
                    f.write_str(" |")?;
                }
                for sym in prod {
                    write!(f, " {sym}")?;
                }
                write!(f, " ({i})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn production_count(g: &Grammar, nonterminal: &str) -> Result<usize, GrammarError> {
    g.production_count(nonterminal)
}

fn parse_error(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Parse {
        line,
        message: message.into(),
    }
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && c != '<' && c != '>'
}

/// Splits `<name> := body` into its parts, or returns `None` when the line
/// is not a rule header.
fn split_header(line: &str, lineno: usize) -> Result<Option<(String, &str)>, GrammarError> {
    let (op_at, op_len) = match (line.find("::="), line.find(":=")) {
        (Some(i), _) => (i, 3),
        (None, Some(i)) => (i, 2),
        (None, None) => return Ok(None),
    };
    let mut lhs = line[..op_at].trim();
    // optional "12." line number
    if let Some(dot) = lhs.find('.') {
        if dot > 0 && lhs[..dot].chars().all(|c| c.is_ascii_digit()) {
            lhs = lhs[dot + 1..].trim_start();
        }
    }
    let name = lhs
        .strip_prefix('<')
        .and_then(|s| s.strip_suffix('>'))
        .ok_or_else(|| parse_error(lineno, format!("malformed rule head `{lhs}`")))?;
    if name.is_empty() || !name.chars().all(is_name_char) {
        return Err(parse_error(
            lineno,
            format!("invalid nonterminal name `<{name}>`"),
        ));
    }
    Ok(Some((name.to_string(), &line[op_at + op_len..])))
}

/// Splits a rule body on `|`, ignoring bars inside `<...>`.
fn split_alternatives(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < body.len() {
        if let Some((_, used)) = nonterminal_at(&body[i..]) {
            i += used;
            continue;
        }
        let c = body[i..].chars().next().unwrap();
        if c == '|' {
            out.push(&body[start..i]);
            start = i + 1;
        }
        i += c.len_utf8();
    }
    out.push(&body[start..]);
    out
}

/// Tries to read `<name>` at the start of `s`; returns the name and the
/// byte length consumed.
fn nonterminal_at(s: &str) -> Option<(&str, usize)> {
    let rest = s.strip_prefix('<')?;
    let end = rest.find(|c: char| !is_name_char(c))?;
    if end == 0 || !rest[end..].starts_with('>') {
        return None;
    }
    Some((&rest[..end], end + 2))
}

fn tokenize_alternative(alt: &str) -> Vec<Symbol> {
    let mut symbols = Vec::new();
    let mut term = String::new();
    let flush = |term: &mut String, symbols: &mut Vec<Symbol>| {
        if !term.is_empty() {
            symbols.push(Symbol::Terminal(std::mem::take(term)));
        }
    };
    let mut i = 0;
    while i < alt.len() {
        let rest = &alt[i..];
        if let Some((name, used)) = nonterminal_at(rest) {
            flush(&mut term, &mut symbols);
            symbols.push(Symbol::NonTerminal(name.to_string()));
            i += used;
            continue;
        }
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            flush(&mut term, &mut symbols);
        } else {
            term.push(c);
        }
        i += c.len_utf8();
    }
    flush(&mut term, &mut symbols);
    symbols
}

fn index_annotation(sym: &Symbol) -> Option<usize> {
    match sym {
        Symbol::Terminal(t) => t
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .filter(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()))
            .and_then(|s| s.parse().ok()),
        Symbol::NonTerminal(_) => None,
    }
}

fn parse_rule_body(lhs: &str, body: &str, lineno: usize) -> Result<Vec<Production>, GrammarError> {
    let mut productions = Vec::new();
    for (pos, alt) in split_alternatives(body).into_iter().enumerate() {
        let mut symbols = tokenize_alternative(alt);
        if symbols.len() > 1 {
            if let Some(idx) = symbols.last().and_then(index_annotation) {
                if idx != pos {
                    return Err(parse_error(
                        lineno,
                        format!("<{lhs}> alternative {pos} is annotated ({idx})"),
                    ));
                }
                symbols.pop();
            }
        }
        if symbols.is_empty() {
            return Err(parse_error(
                lineno,
                format!("<{lhs}> has an empty alternative at position {pos}"),
            ));
        }
        productions.push(symbols);
    }
    Ok(productions)
}

pub fn parse_bnf(source: &str) -> Result<Grammar, GrammarError> {
    // (lhs, first line number, accumulated body)
    let mut pending: Vec<(String, usize, String)> = Vec::new();
    for (n, line) in source.lines().enumerate() {
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        match split_header(line, lineno)? {
            Some((lhs, body)) => pending.push((lhs, lineno, body.to_string())),
            None => match pending.last_mut() {
                Some((_, _, body)) => {
                    body.push(' ');
                    body.push_str(line);
                }
                None => return Err(parse_error(lineno, "text before the first rule")),
            },
        }
    }
    if pending.is_empty() {
        return Err(parse_error(0, "grammar has no rules"));
    }

    let mut rules = Vec::with_capacity(pending.len());
    let mut index = HashMap::new();
    for (lhs, lineno, body) in pending {
        if index.contains_key(&lhs) {
            return Err(parse_error(lineno, format!("duplicate rule for <{lhs}>")));
        }
        let productions = parse_rule_body(&lhs, &body, lineno)?;
        index.insert(lhs.clone(), rules.len());
        rules.push(Rule { lhs, productions });
    }

    for rule in &rules {
        for sym in rule.productions.iter().flatten() {
            if let Symbol::NonTerminal(name) = sym {
                if !index.contains_key(name) {
                    return Err(GrammarError::UndefinedNonterminal {
                        name: name.clone(),
                        referenced_by: rule.lhs.clone(),
                    });
                }
            }
        }
    }
    Ok(Grammar { rules, index })
}
