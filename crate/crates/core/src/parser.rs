//! Text syntax for probabilistic and modal formulas.
//!
//! Precedence from loosest to tightest: `<->`, `->` (right associative),
//! `|`, `&`, then the prefix operators `~`, `P>= r`, `P> r`, `P<= r`,
//! `P< r`, `P= r`, `[]`, `<>`. A prefix operator binds its immediate
//! operand, so `P>=1/2 p & q` reads as `(P>=1/2 p) & q`. Bounds are written
//! `INT`, `INT/INT` or `INT.DIGITS` and converted exactly.
//!
//! The Unicode spellings `¬ ∧ ∨ → ↔ □ ◇ ≥ ≤` are accepted as synonyms.

use crate::rat::{in_unit_interval, parse_rat, to_compact_string, Rat, RatParseError};
use crate::syntax::{desugar, desugar_modal, Formula, ModalFormula, ProbRelation, Surface};
use std::fmt;

/// Byte range `start..end` into the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("probability bound {0} is outside [0,1]")]
    BoundOutOfRange(String),
    #[error("zero denominator in bound")]
    ZeroDenominator,
    #[error("malformed number `{0}`")]
    MalformedNumber(String),
    #[error("trailing input")]
    TrailingInput,
    #[error("modal operator in a probabilistic formula")]
    ModalOperator,
    #[error("probability operator in a modal formula")]
    ProbOperator,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at {span}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Prob(ProbRelation),
    Box,
    Diamond,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(n) => format!("identifier `{n}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Prob(_) => "probability operator".into(),
            Tok::Box => "`[]`".into(),
            Tok::Diamond => "`<>`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let sym = |s: &str| rest.starts_with(s);
        let (tok, len) = if sym("<->") {
            (Tok::Iff, 3)
        } else if sym("->") {
            (Tok::Implies, 2)
        } else if sym("<>") {
            (Tok::Diamond, 2)
        } else if sym("[]") {
            (Tok::Box, 2)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j + 1 < bytes.len() && (bytes[j] == b'/' || bytes[j] == b'.') && bytes[j + 1].is_ascii_digit() {
                j += 1;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
            }
            (Tok::Number(text[i..j].to_string()), j - i)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                j += 1;
            }
            let word = &text[i..j];
            match (word, prob_relation(&text[j..])) {
                ("P", Some((rel, len))) => (Tok::Prob(rel), 1 + len),
                _ => (Tok::Ident(word.to_string()), j - i),
            }
        } else {
            match c {
                '~' | '!' | '¬' => (Tok::Not, c.len_utf8()),
                '&' | '∧' => (Tok::And, c.len_utf8()),
                '|' | '∨' => (Tok::Or, c.len_utf8()),
                '→' => (Tok::Implies, c.len_utf8()),
                '↔' => (Tok::Iff, c.len_utf8()),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '□' => (Tok::Box, c.len_utf8()),
                '◇' => (Tok::Diamond, c.len_utf8()),
                _ => {
                    return Err(ParseError {
                        kind: ParseErrorKind::UnexpectedChar(c),
                        span: SourceSpan::new(start, start + c.len_utf8()),
                    })
                }
            }
        };
        i += len;
        out.push((tok, SourceSpan::new(start, i)));
    }
    Ok(out)
}

/// Relation symbol directly after a `P`, with its byte length.
fn prob_relation(after: &str) -> Option<(ProbRelation, usize)> {
    // `P<->q` and `P->q` are an atom named P followed by a connective.
    if after.starts_with("<-") || after.starts_with("->") || after.starts_with("<>") {
        return None;
    }
    [
        (">=", ProbRelation::Ge),
        ("≥", ProbRelation::Ge),
        ("<=", ProbRelation::Le),
        ("≤", ProbRelation::Le),
        (">", ProbRelation::Gt),
        ("<", ProbRelation::Lt),
        ("=", ProbRelation::Eq),
    ]
    .into_iter()
    .find(|(s, _)| after.starts_with(s))
    .map(|(s, rel)| (rel, s.len()))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Prob,
    Modal,
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    end: usize,
    mode: Mode,
}

impl Parser {
    fn new(text: &str, mode: Mode) -> Result<Self, ParseError> {
        Ok(Self {
            toks: lex(text)?,
            pos: 0,
            end: text.len(),
            mode,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn span(&self) -> SourceSpan {
        self.toks
            .get(self.pos)
            .map(|(_, s)| *s)
            .unwrap_or(SourceSpan::new(self.end, self.end))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        match self.toks.get(self.pos) {
            Some((tok, span)) => ParseError {
                kind: ParseErrorKind::Unexpected {
                    expected,
                    found: tok.describe(),
                },
                span: *span,
            },
            None => ParseError {
                kind: ParseErrorKind::UnexpectedEnd(expected),
                span: SourceSpan::new(self.end, self.end),
            },
        }
    }

    fn parse_all(&mut self) -> Result<Surface, ParseError> {
        let f = self.iff()?;
        if self.pos < self.toks.len() {
            let span = SourceSpan::new(self.span().start, self.end);
            return Err(ParseError {
                kind: ParseErrorKind::TrailingInput,
                span,
            });
        }
        Ok(f)
    }

    fn iff(&mut self) -> Result<Surface, ParseError> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            lhs = Surface::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Surface, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Surface::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Surface, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = Surface::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Surface, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Surface::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Surface, ParseError> {
        let span = self.span();
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.pos += 1;
                Ok(Surface::Not(Box::new(self.unary()?)))
            }
            Some(Tok::Prob(rel)) => {
                if self.mode == Mode::Modal {
                    return Err(ParseError {
                        kind: ParseErrorKind::ProbOperator,
                        span,
                    });
                }
                self.pos += 1;
                let bound = self.bound()?;
                Ok(Surface::Prob(rel, bound, Box::new(self.unary()?)))
            }
            Some(tok @ (Tok::Box | Tok::Diamond)) => {
                if self.mode == Mode::Prob {
                    return Err(ParseError {
                        kind: ParseErrorKind::ModalOperator,
                        span,
                    });
                }
                self.pos += 1;
                let body = Box::new(self.unary()?);
                Ok(if tok == Tok::Box {
                    Surface::Box(body)
                } else {
                    Surface::Diamond(body)
                })
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Surface::Atom(name))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    return Err(self.unexpected("`)`"));
                }
                Ok(inner)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }

    fn bound(&mut self) -> Result<Rat, ParseError> {
        let span = self.span();
        let Some(Tok::Number(text)) = self.peek().cloned() else {
            return Err(self.unexpected("a probability bound"));
        };
        self.pos += 1;
        let value = parse_rat(&text).map_err(|e| ParseError {
            kind: match e {
                RatParseError::ZeroDenominator(_) => ParseErrorKind::ZeroDenominator,
                RatParseError::Malformed(s) => ParseErrorKind::MalformedNumber(s),
            },
            span,
        })?;
        if !in_unit_interval(&value) {
            return Err(ParseError {
                kind: ParseErrorKind::BoundOutOfRange(text),
                span,
            });
        }
        Ok(value)
    }
}

/// Parses a probabilistic formula and eliminates derived connectives.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let surface = parse_surface(text)?;
    // bounds were range-checked while parsing
    Ok(desugar(&surface).expect("parser only yields valid probabilistic surface trees"))
}

/// Parses a probabilistic formula, keeping derived connectives.
pub fn parse_surface(text: &str) -> Result<Surface, ParseError> {
    Parser::new(text, Mode::Prob)?.parse_all()
}

/// Parses a modal formula; `<>` becomes `~[]~`.
pub fn parse_modal(text: &str) -> Result<ModalFormula, ParseError> {
    let surface = Parser::new(text, Mode::Modal)?.parse_all()?;
    Ok(desugar_modal(&surface).expect("parser only yields valid modal surface trees"))
}

/// Canonical text with minimal parentheses; `parse_formula` reads it back to
/// the same tree.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(n) => out.push_str(n),
        Formula::Not(a) => {
            out.push('~');
            write_operand(a, out);
        }
        Formula::Prob(s, a) => {
            out.push_str("P>=");
            out.push_str(&to_compact_string(s));
            out.push(' ');
            write_operand(a, out);
        }
        Formula::And(a, b) => {
            write_formula(a, out);
            out.push_str(" & ");
            write_operand(b, out);
        }
    }
}

fn write_operand(f: &Formula, out: &mut String) {
    if matches!(f, Formula::And(..)) {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

pub fn print_modal(f: &ModalFormula) -> String {
    fn go(f: &ModalFormula, out: &mut String) {
        match f {
            ModalFormula::Atom(n) => out.push_str(n),
            ModalFormula::Not(a) => {
                out.push('~');
                operand(a, out);
            }
            ModalFormula::Box(a) => {
                out.push_str("[]");
                operand(a, out);
            }
            ModalFormula::And(a, b) => {
                go(a, out);
                out.push_str(" & ");
                operand(b, out);
            }
        }
    }
    fn operand(f: &ModalFormula, out: &mut String) {
        if matches!(f, ModalFormula::And(..)) {
            out.push('(');
            go(f, out);
            out.push(')');
        } else {
            go(f, out);
        }
    }
    let mut out = String::new();
    go(f, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for ModalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_modal(self))
    }
}
