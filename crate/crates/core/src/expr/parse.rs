//! Recursive-descent parser for the textual expression syntax (see
//! `docs/grammar.md`).

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Expr, ExprSet};
use crate::federation::{Federation, GraphPattern, MemberId, Request};
use crate::lex::Cursor;
use crate::rdf::{Bgp, SolutionMapping, SolutionSet, Term, TriplePattern};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn at(src: &str, offset: usize, message: impl Into<String>) -> Self {
        let before = &src[..offset.min(src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
        ParseError {
            offset,
            line,
            column,
            message: message.into(),
        }
    }
}

/// Parses an expression and checks that every member id exists in `federation`.
pub fn parse_expr(text: &str, federation: &Federation) -> Result<Expr, ParseError> {
    Parser::new(text, Some(federation)).finish(|p| p.expr())
}

/// Parses an expression without resolving member ids.
pub fn parse_expr_unbound(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, None).finish(|p| p.expr())
}

/// Parses a BGP written as `{tp . tp . ...}`.
pub fn parse_bgp(text: &str) -> Result<Bgp, ParseError> {
    Parser::new(text, None).finish(|p| p.bgp())
}

pub fn parse_graph_pattern(text: &str) -> Result<GraphPattern, ParseError> {
    Parser::new(text, None).finish(|p| p.pattern())
}

struct Parser<'a> {
    src: &'a str,
    cur: Cursor<'a>,
    federation: Option<&'a Federation>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(src: &'a str, federation: Option<&'a Federation>) -> Self {
        Parser {
            src,
            cur: Cursor::new(src),
            federation,
        }
    }

    fn finish<T>(mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        self.skip_trivia();
        let value = f(&mut self)?;
        self.skip_trivia();
        if !self.cur.is_eof() {
            return Err(self.error(format!(
                "unexpected trailing input {}",
                self.cur.describe_next()
            )));
        }
        Ok(value)
    }

    /// Whitespace and `#` line comments.
    fn skip_trivia(&mut self) {
        loop {
            self.cur.skip_ws();
            if self.cur.peek() == Some('#') {
                while !matches!(self.cur.bump(), Some('\n') | None) {}
            } else {
                break;
            }
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::at(self.src, self.cur.pos(), message)
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        self.skip_trivia();
        self.cur.expect(c).map_err(|m| self.error(m))
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_trivia();
        self.cur.eat(c)
    }

    fn term(&mut self) -> PResult<Term> {
        self.skip_trivia();
        let start = self.cur.pos();
        self.cur
            .term()
            .map_err(|m| ParseError::at(self.src, start, m))
    }

    fn triple_pattern(&mut self) -> PResult<TriplePattern> {
        self.skip_trivia();
        let start = self.cur.pos();
        let s = self.term()?;
        let p = self.term()?;
        let o = self.term()?;
        TriplePattern::new(s, p, o).map_err(|e| ParseError::at(self.src, start, e.to_string()))
    }

    fn bgp(&mut self) -> PResult<Bgp> {
        self.expect('{')?;
        let mut patterns = Vec::new();
        if self.eat('}') {
            return Err(self.error("a BGP must contain at least one triple pattern"));
        }
        loop {
            patterns.push(self.triple_pattern()?);
            if self.eat('}') {
                break;
            }
            self.expect('.')?;
            // A trailing '.' before the closing brace is allowed.
            if self.eat('}') {
                break;
            }
        }
        Ok(Bgp::new(patterns).expect("nonempty by construction"))
    }

    fn pattern(&mut self) -> PResult<GraphPattern> {
        self.skip_trivia();
        if self.cur.peek() == Some('{') {
            return Ok(GraphPattern::Bgp(self.bgp()?));
        }
        let start = self.cur.pos();
        let word = self.cur.ident();
        match word {
            "and" | "unionp" => {
                self.expect('(')?;
                let left = self.pattern()?;
                self.expect(',')?;
                let right = self.pattern()?;
                self.expect(')')?;
                Ok(if word == "and" {
                    GraphPattern::and(left, right)
                } else {
                    GraphPattern::union(left, right)
                })
            }
            _ => Err(ParseError::at(
                self.src,
                start,
                "expected a graph pattern: '{', 'and(' or 'unionp('",
            )),
        }
    }

    fn request(&mut self) -> PResult<Request> {
        self.skip_trivia();
        match self.cur.peek() {
            Some('{') => Ok(Request::Bgp(self.bgp()?)),
            Some('(') => {
                self.cur.bump();
                let tp = self.triple_pattern()?;
                self.expect('|')?;
                let omega = self.mapping_set()?;
                self.expect(')')?;
                Ok(Request::BrTpf(tp, omega))
            }
            Some('a' | 'u') if matches!(self.cur.peek_ident(), "and" | "unionp") => {
                Ok(Request::from_pattern(self.pattern()?))
            }
            _ => Ok(Request::Tp(self.triple_pattern()?)),
        }
    }

    fn mapping_set(&mut self) -> PResult<SolutionSet> {
        self.expect('{')?;
        let mut set = SolutionSet::new();
        if self.eat('}') {
            return Ok(set);
        }
        loop {
            set.insert(self.mapping()?);
            if self.eat('}') {
                return Ok(set);
            }
            self.expect(';')?;
        }
    }

    fn mapping(&mut self) -> PResult<SolutionMapping> {
        if self.eat('(') {
            self.expect(')')?;
            return Ok(SolutionMapping::new());
        }
        let mut mapping = SolutionMapping::new();
        loop {
            self.skip_trivia();
            let start = self.cur.pos();
            let var = match self.term()? {
                Term::Variable(v) => v,
                other => {
                    return Err(ParseError::at(
                        self.src,
                        start,
                        format!("expected a variable, found {other}"),
                    ))
                }
            };
            if mapping.get(&var).is_some() {
                return Err(ParseError::at(
                    self.src,
                    start,
                    format!("{var} bound twice"),
                ));
            }
            self.expect('=')?;
            let start = self.cur.pos();
            let value = self.term()?;
            mapping
                .insert(var, value)
                .map_err(|e| ParseError::at(self.src, start, e.to_string()))?;
            if !self.eat(',') {
                return Ok(mapping);
            }
        }
    }

    fn member(&mut self) -> PResult<MemberId> {
        self.expect('@')?;
        self.skip_trivia();
        let start = self.cur.pos();
        let id = self.cur.ident();
        let id = MemberId::new(id).map_err(|_| {
            ParseError::at(
                self.src,
                start,
                format!("expected a member id, found {}", self.cur.describe_next()),
            )
        })?;
        if let Some(f) = self.federation {
            if f.get(&id).is_none() {
                return Err(ParseError::at(
                    self.src,
                    start,
                    format!("unknown member {id}"),
                ));
            }
        }
        Ok(id)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.skip_trivia();
        let start = self.cur.pos();
        let word = self.cur.ident();
        match word {
            "req" => {
                self.expect('[')?;
                let request = self.request()?;
                self.expect(']')?;
                let member = self.member()?;
                Ok(Expr::req(request, member))
            }
            "tpAdd" => {
                self.expect('(')?;
                let input = self.expr()?;
                self.expect(',')?;
                let tp = self.triple_pattern()?;
                self.expect(')')?;
                let member = self.member()?;
                Ok(Expr::tp_add(input, tp, member))
            }
            "bgpAdd" => {
                self.expect('(')?;
                let input = self.expr()?;
                self.expect(',')?;
                let bgp = self.bgp()?;
                self.expect(')')?;
                let member = self.member()?;
                Ok(Expr::bgp_add(input, bgp, member))
            }
            "join" | "union" => {
                self.expect('(')?;
                let left = self.expr()?;
                self.expect(',')?;
                let right = self.expr()?;
                self.expect(')')?;
                Ok(if word == "join" {
                    Expr::join(left, right)
                } else {
                    Expr::union(left, right)
                })
            }
            "mj" | "mu" => {
                self.expect('{')?;
                let mut items = BTreeSet::new();
                if self.eat('}') {
                    return Err(self.error(format!("{word} needs at least one operand")));
                }
                loop {
                    items.insert(self.expr()?);
                    if self.eat('}') {
                        break;
                    }
                    self.expect(',')?;
                }
                let set = ExprSet::new(items).expect("nonempty by construction");
                Ok(if word == "mj" {
                    Expr::Mj(set)
                } else {
                    Expr::Mu(set)
                })
            }
            "" => Err(ParseError::at(
                self.src,
                start,
                format!("expected an expression, found {}", self.cur.describe_next()),
            )),
            other => Err(ParseError::at(
                self.src,
                start,
                format!("unknown operator {other:?}"),
            )),
        }
    }
}
