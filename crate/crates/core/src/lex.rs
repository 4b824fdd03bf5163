//! Character cursor shared by the N-Triples reader, the expression parser and
//! the query-file reader.

use crate::rdf::{Term, Variable};

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    /// Byte offset into the source.
    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub(crate) fn is_eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub(crate) fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    /// Skips whitespace, then consumes `c` if it is next.
    pub(crate) fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected '{c}', found {}", self.describe_next()))
        }
    }

    pub(crate) fn describe_next(&self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        }
    }

    /// Consumes a run of identifier characters (`[A-Za-z0-9_.-]`).
    pub(crate) fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_ident_char(c)) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    /// Looks at the identifier ahead without consuming it.
    pub(crate) fn peek_ident(&self) -> &'a str {
        let rest = self.rest().trim_start();
        let end = rest.find(|c: char| !is_ident_char(c)).unwrap_or(rest.len());
        &rest[..end]
    }

    /// Parses one term: `<iri>`, `_:label`, `"literal"` or `?var`.
    pub(crate) fn term(&mut self) -> Result<Term, String> {
        self.skip_ws();
        match self.peek() {
            Some('<') => {
                self.bump();
                let start = self.pos;
                loop {
                    match self.bump() {
                        Some('>') => break,
                        Some(c) if c.is_whitespace() || c == '<' => {
                            return Err(format!("character '{c}' not allowed in IRI"))
                        }
                        Some(_) => {}
                        None => return Err("unterminated IRI".to_string()),
                    }
                }
                let body = &self.src[start..self.pos - 1];
                if body.is_empty() {
                    return Err("empty IRI".to_string());
                }
                Ok(Term::iri(body))
            }
            Some('_') => {
                self.bump();
                if self.bump() != Some(':') {
                    return Err("expected ':' after '_' in blank node".to_string());
                }
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_' || c == '-')
                {
                    self.bump();
                }
                let label = &self.src[start..self.pos];
                if label.is_empty() {
                    return Err("empty blank node label".to_string());
                }
                Ok(Term::blank(label))
            }
            Some('"') => {
                self.bump();
                let mut value = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some('"') => value.push('"'),
                            Some('\\') => value.push('\\'),
                            Some('n') => value.push('\n'),
                            Some('r') => value.push('\r'),
                            Some('t') => value.push('\t'),
                            Some(c) => return Err(format!("unknown escape '\\{c}' in literal")),
                            None => return Err("unterminated literal".to_string()),
                        },
                        Some(c) => value.push(c),
                        None => return Err("unterminated literal".to_string()),
                    }
                }
                Ok(Term::literal(value))
            }
            Some('?') => {
                self.bump();
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                    self.bump();
                }
                let name = &self.src[start..self.pos];
                if name.is_empty() {
                    return Err("empty variable name".to_string());
                }
                Ok(Term::Variable(Variable::new(name)))
            }
            _ => Err(format!("expected a term, found {}", self.describe_next())),
        }
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

/// Escapes a literal's lexical form for the quoted textual syntax.
pub(crate) fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('"');
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
