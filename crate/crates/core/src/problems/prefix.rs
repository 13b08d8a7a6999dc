//! Parser for prefix call syntax such as `plus(times(x,x),x)`.
//! Whitespace between tokens is ignored, so mapper output like
//! `plus ( x , x )` parses the same way.

use super::ProgramError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Atom(String),
    Call(String, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Open,
    Close,
    Comma,
}

fn lex(text: &str) -> Result<Vec<Token>, ProgramError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '(' => tokens.push(Token::Open),
            ')' => tokens.push(Token::Close),
            ',' => tokens.push(Token::Comma),
            c if c.is_whitespace() => {}
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut ident = c.to_string();
                while let Some(&(_, n)) = chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        ident.push(n);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Ident(ident));
            }
            other => {
                return Err(ProgramError::Expr(format!(
                    "unexpected character `{other}` at byte {i}"
                )))
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn term(&mut self) -> Result<Term, ProgramError> {
        let name = match self.next() {
            Some(Token::Ident(name)) => name,
            Some(t) => return Err(ProgramError::Expr(format!("expected a name, found {t:?}"))),
            None => return Err(ProgramError::Expr("unexpected end of expression".into())),
        };
        if self.peek() != Some(&Token::Open) {
            return Ok(Term::Atom(name));
        }
        self.pos += 1;
        let mut args = vec![self.term()?];
        loop {
            match self.next() {
                Some(Token::Comma) => args.push(self.term()?),
                Some(Token::Close) => return Ok(Term::Call(name, args)),
                Some(t) => {
                    return Err(ProgramError::Expr(format!(
                        "expected `,` or `)`, found {t:?}"
                    )))
                }
                None => return Err(ProgramError::Expr(format!("unclosed call to `{name}`"))),
            }
        }
    }
}

pub fn parse_term(text: &str) -> Result<Term, ProgramError> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let term = parser.term()?;
    if parser.pos != parser.tokens.len() {
        return Err(ProgramError::Expr(
            "trailing tokens after expression".into(),
        ));
    }
    Ok(term)
}
