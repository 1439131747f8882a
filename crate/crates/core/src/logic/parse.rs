//! The prefix syntax.
//!
//! ```text
//! formula := "true" | "false"
//!          | "(" REL term+ ")"              relation atom
//!          | "(" "=" term term ")"
//!          | "(" "not" formula ")"
//!          | "(" ("and" | "or") formula* ")"
//!          | "(" ("->" | "<->") formula formula ")"
//!          | "(" ("E" | "A") VAR formula ")"
//!          | "(" ("E2" | "A2") FAMILY SVAR ["/" ARITY] formula ")"
//! FAMILY  := NAME | "[" family-spec "]"
//! term    := VAR | NUMBER
//! ```
//!
//! `E` and `A` (and `E2...`, `A2...`) only act as quantifiers when the
//! third item is a formula; `(E x y)` is an atom of a relation named `E`.
//! `#` starts a comment that runs to the end of the line.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::family::{FamilyRef, FamilySpec};
use crate::logic::ast::{Formula, SoBinder, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Word(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'#' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
        } else if c == b'(' {
            out.push((i, Tok::Open));
            i += 1;
        } else if c == b')' {
            out.push((i, Tok::Close));
            i += 1;
        } else {
            let start = i;
            let mut bracket = false;
            while i < b.len() {
                let c = b[i];
                if bracket {
                    if c == b']' {
                        bracket = false;
                    }
                } else if c == b'[' {
                    bracket = true;
                } else if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b'#' {
                    break;
                }
                i += 1;
            }
            if bracket {
                return Err(Error::Parse { pos: text.len(), message: "unclosed '['".into() });
            }
            out.push((start, Tok::Word(text[start..i].to_string())));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

fn is_ident(w: &str) -> bool {
    let mut cs = w.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Parser {
    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.0)
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos(), message: msg.to_string() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|t| &t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.1.clone());
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn expect_close(&mut self) -> Result<()> {
        match self.next() {
            Some(Tok::Close) => Ok(()),
            None => Err(Error::Parse { pos: self.end, message: "unexpected end of input, expected ')'".into() }),
            _ => {
                self.i -= 1;
                Err(self.err("expected ')'"))
            }
        }
    }

    fn word(&mut self, what: &str) -> Result<String> {
        match self.next() {
            Some(Tok::Word(w)) => Ok(w),
            None => Err(Error::Parse { pos: self.end, message: alloc::format!("unexpected end of input, expected {what}") }),
            _ => {
                self.i -= 1;
                Err(self.err(&alloc::format!("expected {what}")))
            }
        }
    }

    fn var(&mut self) -> Result<String> {
        let at = self.pos();
        let w = self.word("a variable")?;
        if !is_ident(&w) || is_reserved(&w) {
            return Err(Error::Parse { pos: at, message: alloc::format!("`{w}` is not a variable name") });
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<Term> {
        let at = self.pos();
        let w = self.word("a term")?;
        if w.bytes().all(|c| c.is_ascii_digit()) {
            return w.parse().map(Term::Const).map_err(|_| Error::Parse { pos: at, message: "constant out of range".into() });
        }
        if !is_ident(&w) || is_reserved(&w) {
            return Err(Error::Parse { pos: at, message: alloc::format!("`{w}` is not a term") });
        }
        Ok(Term::Var(w))
    }

    /// Whether the token `k` ahead starts a formula.
    fn formula_ahead(&self, k: usize) -> bool {
        match self.peek_at(k) {
            Some(Tok::Open) => true,
            Some(Tok::Word(w)) => w == "true" || w == "false",
            _ => false,
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let at = self.pos();
        match self.next() {
            None => Err(Error::Parse { pos: self.end, message: "unexpected end of input, expected a formula".into() }),
            Some(Tok::Close) => Err(Error::Parse { pos: at, message: "unexpected ')'".into() }),
            Some(Tok::Word(w)) => match w.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                _ => Err(Error::Parse { pos: at, message: alloc::format!("expected a formula, found `{w}`") }),
            },
            Some(Tok::Open) => {
                let head_at = self.pos();
                let head = self.word("a connective or relation")?;
                let f = match head.as_str() {
                    "=" => {
                        let a = self.term()?;
                        let b = self.term()?;
                        Formula::Eq(a, b)
                    }
                    "not" => Formula::Not(Box::new(self.formula()?)),
                    "and" | "or" => {
                        let mut items = Vec::new();
                        while !matches!(self.peek(), Some(Tok::Close) | None) {
                            items.push(self.formula()?);
                        }
                        if head == "and" {
                            Formula::And(items)
                        } else {
                            Formula::Or(items)
                        }
                    }
                    "->" | "<->" => {
                        let a = Box::new(self.formula()?);
                        let b = Box::new(self.formula()?);
                        if head == "->" {
                            Formula::Implies(a, b)
                        } else {
                            Formula::Iff(a, b)
                        }
                    }
                    "E" | "A" if self.formula_ahead(1) => {
                        let v = self.var()?;
                        let body = Box::new(self.formula()?);
                        if head == "E" {
                            Formula::Exists(v, body)
                        } else {
                            Formula::Forall(v, body)
                        }
                    }
                    _ if (head.starts_with("E2") || head.starts_with("A2")) && self.formula_ahead(1) => {
                        let family = parse_family_ref(&head[2..], head_at + 2)?;
                        let var_at = self.pos();
                        let raw = self.word("a relation variable")?;
                        let (var, arity) = match raw.split_once('/') {
                            Some((v, k)) => {
                                let k: usize = k.parse().map_err(|_| Error::Parse { pos: var_at, message: "bad arity".into() })?;
                                if k == 0 {
                                    return Err(Error::Parse { pos: var_at, message: "arity must be positive".into() });
                                }
                                (v.to_string(), Some(k))
                            }
                            None => (raw, None),
                        };
                        if !is_ident(&var) || is_reserved(&var) {
                            return Err(Error::Parse { pos: var_at, message: alloc::format!("`{var}` is not a relation variable") });
                        }
                        let binder = SoBinder { family, var, arity };
                        let body = Box::new(self.formula()?);
                        if head.starts_with('E') {
                            Formula::SoExists(binder, body)
                        } else {
                            Formula::SoForall(binder, body)
                        }
                    }
                    _ => {
                        if !is_ident(&head) || is_reserved(&head) {
                            return Err(Error::Parse { pos: head_at, message: alloc::format!("unknown connective `{head}`") });
                        }
                        let mut args = Vec::new();
                        while !matches!(self.peek(), Some(Tok::Close) | None) {
                            args.push(self.term()?);
                        }
                        if args.is_empty() {
                            return Err(self.err("a relation atom needs arguments"));
                        }
                        Formula::Atom(head, args)
                    }
                };
                self.expect_close()?;
                Ok(f)
            }
        }
    }
}

fn is_reserved(w: &str) -> bool {
    matches!(w, "true" | "false" | "not" | "and" | "or")
}

fn parse_family_ref(text: &str, pos: usize) -> Result<FamilyRef> {
    if let Some(inner) = text.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| Error::Parse { pos, message: "expected ']' after family spec".into() })?;
        FamilySpec::parse(inner)
            .map(FamilyRef::Inline)
            .map_err(|e| match e {
                Error::Parse { pos: p, message } => Error::Parse { pos: pos + 1 + p, message },
                other => other,
            })
    } else if !text.is_empty() && text.bytes().all(|c| c.is_ascii_alphanumeric() || c == b'_') {
        Ok(FamilyRef::Named(text.to_string()))
    } else {
        Err(Error::Parse { pos, message: "expected a family name or [spec]".into() })
    }
}

/// Parses one formula; trailing input is an error.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, i: 0, end: text.len() };
    let f = p.formula()?;
    if p.i < p.toks.len() {
        return Err(p.err("trailing input after formula"));
    }
    Ok(f)
}

/// The canonical text of a formula.
pub fn format_formula(f: &Formula) -> String {
    f.to_string()
}
