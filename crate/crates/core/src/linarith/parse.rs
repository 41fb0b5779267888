//! Recursive-descent parser for linear expressions and atoms.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! atom   := expr relop expr
//! relop  := "<=" | "<" | ">=" | ">" | "=" | "==" | "!="
//! expr   := ["+"|"-"] term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := number | ident | "(" expr ")" | "-" factor
//! ```
//!
//! Products must keep at least one side constant; division is by
//! constants only.

use thiserror::Error;

use num_traits::Zero;

use super::{LinearAtom, LinearExpr, Relation, Vocabulary};
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected `{found}` at offset {offset}")]
    Unexpected { found: String, offset: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("non-linear product at offset {0}")]
    NonLinear(usize),
    #[error("division by zero or by a non-constant at offset {0}")]
    BadDivision(usize),
    #[error("expected a relation (<=, <, >=, >, =, !=)")]
    MissingRelation,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    Rel(Relation),
    LParen,
    RParen,
}

fn lex(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let text = &input[start..i];
            let value = parse_rational(text).map_err(|_| ParseError::Unexpected {
                found: text.to_string(),
                offset: start,
            })?;
            out.push((Tok::Num(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(input[start..i].to_string()), start));
            continue;
        }
        let next = bytes.get(i + 1).copied().map(char::from);
        let (tok, len) = match (c, next) {
            ('<', Some('=')) => (Tok::Rel(Relation::Le), 2),
            ('>', Some('=')) => (Tok::Rel(Relation::Ge), 2),
            ('=', Some('=')) => (Tok::Rel(Relation::Eq), 2),
            ('!', Some('=')) => (Tok::Rel(Relation::Neq), 2),
            ('<', _) => (Tok::Rel(Relation::Lt), 1),
            ('>', _) => (Tok::Rel(Relation::Gt), 1),
            ('=', _) => (Tok::Rel(Relation::Eq), 1),
            ('+' | '-' | '*' | '/', _) => (Tok::Op(c), 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            _ => {
                let found = input[start..].chars().next().unwrap().to_string();
                return Err(ParseError::Unexpected { found, offset: start });
            }
        };
        out.push((tok, start));
        i += len;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vocab: VocabMode<'a>,
}

enum VocabMode<'a> {
    Intern(&'a mut Vocabulary),
    Fixed(&'a Vocabulary),
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let tok = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        tok
    }

    fn unexpected(&self) -> ParseError {
        match self.toks.get(self.pos) {
            None => ParseError::UnexpectedEnd,
            Some((tok, offset)) => ParseError::Unexpected {
                found: format!("{tok:?}"),
                offset: *offset,
            },
        }
    }

    fn expr(&mut self) -> Result<LinearExpr, ParseError> {
        let mut acc = match self.peek() {
            Some(Tok::Op('+')) => {
                self.bump();
                self.term()?
            }
            Some(Tok::Op('-')) => {
                self.bump();
                -self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Some(Tok::Op('-')) => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LinearExpr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.bump();
                    let at = self.offset();
                    let rhs = self.factor()?;
                    acc = if acc.is_constant() {
                        rhs.scale(acc.constant_term())
                    } else if rhs.is_constant() {
                        acc.scale(rhs.constant_term())
                    } else {
                        return Err(ParseError::NonLinear(at));
                    };
                }
                Some(Tok::Op('/')) => {
                    self.bump();
                    let at = self.offset();
                    let rhs = self.factor()?;
                    if !rhs.is_constant() || rhs.constant_term().is_zero() {
                        return Err(ParseError::BadDivision(at));
                    }
                    acc = acc.scale(&rhs.constant_term().recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<LinearExpr, ParseError> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(LinearExpr::constant(v)),
            Some(Tok::Ident(name)) => {
                let var = match &mut self.vocab {
                    VocabMode::Intern(v) => v.intern(&name),
                    VocabMode::Fixed(v) => v.get(&name).cloned().ok_or(ParseError::UnknownVariable(name))?,
                };
                Ok(LinearExpr::var(&var))
            }
            Some(Tok::Op('-')) => Ok(-self.factor()?),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        Err(self.unexpected())
                    }
                }
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected())
            }
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.unexpected())
        } else {
            Ok(())
        }
    }
}

fn parser<'a>(input: &str, vocab: VocabMode<'a>) -> Result<Parser<'a>, ParseError> {
    Ok(Parser {
        toks: lex(input)?,
        pos: 0,
        end: input.len(),
        vocab,
    })
}

fn run_expr(mut p: Parser<'_>) -> Result<LinearExpr, ParseError> {
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

fn run_atom(mut p: Parser<'_>) -> Result<LinearAtom, ParseError> {
    let lhs = p.expr()?;
    let rel = match p.bump() {
        Some(Tok::Rel(r)) => r,
        None => return Err(ParseError::MissingRelation),
        Some(_) => {
            p.pos -= 1;
            return Err(p.unexpected());
        }
    };
    let rhs = p.expr()?;
    p.finish()?;
    Ok(LinearAtom::compare(lhs, rel, rhs))
}

/// Parses a linear expression, interning unseen variable names.
pub fn parse_expr(input: &str, vocab: &mut Vocabulary) -> Result<LinearExpr, ParseError> {
    run_expr(parser(input, VocabMode::Intern(vocab))?)
}

/// Parses `lhs relop rhs`, interning unseen variable names.
pub fn parse_atom(input: &str, vocab: &mut Vocabulary) -> Result<LinearAtom, ParseError> {
    run_atom(parser(input, VocabMode::Intern(vocab))?)
}

/// Like [`parse_expr`] but rejects names missing from `vocab`.
pub fn parse_expr_in(input: &str, vocab: &Vocabulary) -> Result<LinearExpr, ParseError> {
    run_expr(parser(input, VocabMode::Fixed(vocab))?)
}

/// Like [`parse_atom`] but rejects names missing from `vocab`.
pub fn parse_atom_in(input: &str, vocab: &Vocabulary) -> Result<LinearAtom, ParseError> {
    run_atom(parser(input, VocabMode::Fixed(vocab))?)
}
