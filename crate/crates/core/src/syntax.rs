//! Concrete syntax for types, terms, paths and one-hole contexts.
//!
//! ```text
//! type  := union ('->' type)?
//! union := inter ('|' inter)*
//! inter := prim ('&' prim)*
//! prim  := IDENT | '(' type ')'
//! term  := '\' IDENT+ '.' term | appseq
//! ```
//!
//! `|` and `&` associate to the left, `->` to the right. Printing emits
//! only the parentheses needed for the binary tree to parse back unchanged.

use crate::lambda::Term;
use crate::paths::{DPath, Dir, PathSet, SPath, TypeContext};
use crate::type_core::{self, TypeExpr};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at {}..{}: {message}", span.start, span.end)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
}

fn err<T>(message: impl Into<String>, start: usize, end: usize) -> Result<T, ParseError> {
    Err(ParseError {
        message: message.into(),
        span: SourceSpan { start, end },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Arrow,
    Pipe,
    Amp,
    LParen,
    RParen,
    Hole,
    Lambda,
    Dot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Hole => f.write_str("`[]`"),
            Tok::Lambda => f.write_str("`\\`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    let end_of = |i: usize| chars.get(i).map(|p| p.0).unwrap_or(src.len());
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = |t: Tok| (t, SourceSpan { start: pos, end: pos + c.len_utf8() });
        match c {
            '|' | '∨' => out.push(single(Tok::Pipe)),
            '&' | '∧' => out.push(single(Tok::Amp)),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            '\\' | 'λ' => out.push(single(Tok::Lambda)),
            '.' => out.push(single(Tok::Dot)),
            '→' => out.push(single(Tok::Arrow)),
            '-' => {
                if chars.get(i + 1).map(|p| p.1) == Some('>') {
                    out.push((Tok::Arrow, SourceSpan { start: pos, end: pos + 2 }));
                    i += 1;
                } else {
                    return err("expected `->`", pos, pos + 1);
                }
            }
            '[' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].1.is_whitespace() {
                    j += 1;
                }
                if chars.get(j).map(|p| p.1) == Some(']') {
                    out.push((Tok::Hole, SourceSpan { start: pos, end: end_of(j + 1) }));
                    i = j;
                } else {
                    return err("expected `[]`", pos, pos + 1);
                }
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j].1) {
                    j += 1;
                }
                let s: String = chars[i..j].iter().map(|p| p.1).collect();
                out.push((Tok::Ident(s), SourceSpan { start: pos, end: end_of(j) }));
                i = j - 1;
            }
            other => return err(format!("unexpected character `{other}`"), pos, pos + other.len_utf8()),
        }
        i += 1;
    }
    out.push((Tok::Eof, SourceSpan { start: src.len(), end: src.len() }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    allow_hole: bool,
}

/// Name of the placeholder atom standing for the hole while parsing contexts.
const HOLE: &str = "[]";

impl Parser {
    fn new(src: &str, allow_hole: bool) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0, allow_hole })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, what: &str) -> Result<T, ParseError> {
        let sp = self.span();
        err(format!("expected {what}, found {}", self.peek()), sp.start, sp.end)
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<SourceSpan, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            self.unexpected(what)
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => self.unexpected("end of input"),
        }
    }

    fn ty(&mut self) -> Result<TypeExpr, ParseError> {
        let lhs = self.union()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.ty()?;
            Ok(type_core::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn union(&mut self) -> Result<TypeExpr, ParseError> {
        let mut acc = self.inter()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            acc = type_core::or(acc, self.inter()?);
        }
        Ok(acc)
    }

    fn inter(&mut self) -> Result<TypeExpr, ParseError> {
        let mut acc = self.prim()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            acc = type_core::and(acc, self.prim()?);
        }
        Ok(acc)
    }

    fn prim(&mut self) -> Result<TypeExpr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(type_core::atom(&s))
            }
            Tok::LParen => {
                let open = self.bump().1;
                let t = self.ty()?;
                if *self.peek() != Tok::RParen {
                    let sp = self.span();
                    return err("unclosed `(`", open.start, sp.end);
                }
                self.bump();
                Ok(t)
            }
            Tok::Hole if self.allow_hole => {
                self.bump();
                Ok(type_core::atom(HOLE))
            }
            _ => self.unexpected("a type"),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if *self.peek() == Tok::Lambda {
            self.bump();
            let mut names = Vec::new();
            while let Tok::Ident(s) = self.peek().clone() {
                self.bump();
                names.push(s);
            }
            if names.is_empty() {
                return self.unexpected("a bound variable");
            }
            self.expect(Tok::Dot, "`.`")?;
            let body = self.term()?;
            Ok(names.iter().rev().fold(body, |b, n| Term::abs(n, b)))
        } else {
            self.appseq()
        }
    }

    fn appseq(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.atom_term()?;
        loop {
            match self.peek() {
                Tok::Ident(_) | Tok::LParen => {
                    let arg = self.atom_term()?;
                    acc = Term::app(acc, arg);
                }
                Tok::Lambda => {
                    let arg = self.term()?;
                    return Ok(Term::app(acc, arg));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom_term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Term::var(&s))
            }
            Tok::LParen => {
                let open = self.bump().1;
                let t = self.term()?;
                if *self.peek() != Tok::RParen {
                    let sp = self.span();
                    return err("unclosed `(`", open.start, sp.end);
                }
                self.bump();
                Ok(t)
            }
            _ => self.unexpected("a term"),
        }
    }
}

pub fn parse_type(src: &str) -> Result<TypeExpr, ParseError> {
    let mut p = Parser::new(src, false)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src, false)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses a type containing exactly one hole written `[]`.
pub fn parse_context(src: &str) -> Result<TypeContext, ParseError> {
    let mut p = Parser::new(src, true)?;
    let t = p.ty()?;
    p.finish()?;
    let holes = src.matches('[').count();
    if holes != 1 {
        return err(format!("a context needs exactly one hole, found {holes}"), 0, src.len());
    }
    TypeContext::from_marked(&t, HOLE).ok_or(ParseError {
        message: "hole not found".into(),
        span: SourceSpan { start: 0, end: src.len() },
    })
}

fn prec(t: &TypeExpr) -> u8 {
    match t {
        TypeExpr::Arrow(..) => 0,
        TypeExpr::Or(..) => 1,
        TypeExpr::And(..) => 2,
        TypeExpr::Atom(_) => 3,
    }
}

fn print_prec(t: &TypeExpr, need: u8, out: &mut String) {
    let paren = prec(t) < need;
    if paren {
        out.push('(');
    }
    match t {
        TypeExpr::Atom(a) => out.push_str(a),
        TypeExpr::Arrow(l, r) => {
            print_prec(l, 1, out);
            out.push_str(" -> ");
            print_prec(r, 0, out);
        }
        TypeExpr::Or(l, r) => {
            print_prec(l, 1, out);
            out.push_str(" | ");
            print_prec(r, 2, out);
        }
        TypeExpr::And(l, r) => {
            print_prec(l, 2, out);
            out.push_str(" & ");
            print_prec(r, 3, out);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn print_type(t: &TypeExpr) -> String {
    let mut s = String::new();
    print_prec(t, 0, &mut s);
    s
}

pub fn print_context(c: &TypeContext) -> String {
    print_type(&c.plug(&type_core::atom(HOLE)))
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    print_term_into(t, &mut s);
    s
}

fn print_term_into(t: &Term, out: &mut String) {
    match t {
        Term::Var(x) => out.push_str(x),
        Term::Abs(..) => {
            out.push('\\');
            let mut cur = t;
            let mut first = true;
            while let Term::Abs(x, b) = cur {
                if !first {
                    out.push(' ');
                }
                out.push_str(x);
                first = false;
                cur = b;
            }
            out.push_str(". ");
            print_term_into(cur, out);
        }
        Term::App(f, a) => {
            if matches!(**f, Term::Abs(..)) {
                out.push('(');
                print_term_into(f, out);
                out.push(')');
            } else {
                print_term_into(f, out);
            }
            out.push(' ');
            if matches!(**a, Term::Var(_)) {
                print_term_into(a, out);
            } else {
                out.push('(');
                print_term_into(a, out);
                out.push(')');
            }
        }
    }
}

/// Parses a direction path such as `RL`; `ε` or the empty string is the empty path.
pub fn parse_dpath(src: &str) -> Result<DPath, ParseError> {
    let s = src.trim();
    if s.is_empty() || s == "ε" || s == "eps" {
        return Ok(DPath::empty());
    }
    let mut dirs = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            'L' => dirs.push(Dir::L),
            'R' => dirs.push(Dir::R),
            other => return err(format!("unexpected `{other}` in path"), i, i + other.len_utf8()),
        }
    }
    Ok(DPath(dirs))
}

/// A single path in either kind: `RL` is a direction path, `RL#` a
/// path ending in the box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyPath {
    D(DPath),
    S(SPath),
}

pub fn parse_path(src: &str) -> Result<AnyPath, ParseError> {
    let s = src.trim();
    if let Some(prefix) = s.strip_suffix('#').or_else(|| s.strip_suffix('□')) {
        Ok(AnyPath::S(SPath(parse_dpath(prefix)?)))
    } else {
        Ok(AnyPath::D(parse_dpath(s)?))
    }
}

/// Parses `{L, RL}` or `L,RL`; `{}` is the empty set.
pub fn parse_path_set(src: &str) -> Result<PathSet, ParseError> {
    let s = src.trim();
    let inner = s.strip_prefix('{').and_then(|x| x.strip_suffix('}')).unwrap_or(s);
    let mut set = PathSet::new();
    if inner.trim().is_empty() {
        return Ok(set);
    }
    for part in inner.split(',') {
        set.insert(parse_dpath(part)?);
    }
    Ok(set)
}
