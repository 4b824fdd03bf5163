//! Line-oriented N-Triples subset: `<iri>`, `_:label` and plain `"literal"`
//! terms, one triple per line, `#` comment lines.

use thiserror::Error;

use super::{Graph, Triple};
use crate::lex::Cursor;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct NTriplesError {
    pub line: usize,
    pub message: String,
}

pub fn parse_ntriples(text: &str) -> Result<Graph, NTriplesError> {
    let mut graph = Graph::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let triple = parse_line(line).map_err(|message| NTriplesError {
            line: idx + 1,
            message,
        })?;
        graph.insert(triple);
    }
    Ok(graph)
}

fn parse_line(line: &str) -> Result<Triple, String> {
    let mut cur = Cursor::new(line);
    let s = cur.term()?;
    let p = cur.term()?;
    let o = cur.term()?;
    if [&s, &p, &o].iter().any(|t| t.is_variable()) {
        return Err("variables are not allowed in data".to_string());
    }
    cur.expect('.')?;
    cur.skip_ws();
    if !cur.is_eof() && cur.peek() != Some('#') {
        return Err(format!("unexpected trailing input {}", cur.describe_next()));
    }
    Triple::new(s, p, o).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::Term;

    #[test]
    fn single_triple() {
        let g = parse_ntriples("<a> <knows> <c> .\n").unwrap();
        let t = Triple::new(Term::iri("a"), Term::iri("knows"), Term::iri("c")).unwrap();
        assert_eq!(g, Graph::from_iter([t]));
    }

    #[test]
    fn empty_input() {
        assert!(parse_ntriples("").unwrap().is_empty());
        assert!(parse_ntriples("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn truncated_line_reports_line_number() {
        let err = parse_ntriples("<a> <knows>").unwrap_err();
        assert_eq!(err.line, 1);
        let err = parse_ntriples("<a> <b> <c> .\n<a> <knows> <c>\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn duplicates_collapse_and_literals_unescape() {
        let text = "<c> <name> \"Lee\" .\n<c> <name> \"Lee\" .\n_:b1 <says> \"a \\\"q\\\"\" .\n";
        let g = parse_ntriples(text).unwrap();
        assert_eq!(g.len(), 2);
        let said = Triple::new(
            Term::blank("b1"),
            Term::iri("says"),
            Term::literal("a \"q\""),
        )
        .unwrap();
        assert!(g.contains(&said));
        assert_eq!(parse_ntriples(&g.to_ntriples()).unwrap(), g);
    }

    #[test]
    fn rejects_ill_formed_triples() {
        assert!(parse_ntriples("\"lit\" <p> <o> .").is_err());
        assert!(parse_ntriples("<s> <p> ?o .").is_err());
        assert!(parse_ntriples("<s> <p> <o> . extra").is_err());
        assert!(parse_ntriples("<s> <p> <o> . # trailing comment").is_ok());
    }
}
