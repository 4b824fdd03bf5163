//! The node-cover reduction: an undirected graph becomes a federation with
//! one TPF member per vertex, holding one typed triple per incident edge, and
//! the single-pattern query `{?x <rdf:type> <ex:Edge>}`.

use std::collections::BTreeSet;
use std::fmt;

use super::SelectionError;
use crate::federation::{Federation, InterfaceKind, Member, MemberId};
use crate::rdf::{Bgp, Graph, Term, Triple, TriplePattern};

pub const DEFAULT_COVER_CAP: usize = 10;

/// A finite simple undirected graph. Vertex labels are nonempty runs of
/// ASCII letters, digits and underscores; edges are stored with sorted
/// endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    vertices: BTreeSet<String>,
    edges: BTreeSet<(String, String)>,
}

fn valid_label(label: &str) -> bool {
    !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl UndirectedGraph {
    /// Endpoints of edges are added to the vertex set.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, SelectionError>
    where
        V: IntoIterator<Item = String>,
        E: IntoIterator<Item = (String, String)>,
    {
        let mut g = UndirectedGraph {
            vertices: BTreeSet::new(),
            edges: BTreeSet::new(),
        };
        for v in vertices {
            g.add_vertex(v)?;
        }
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: String) -> Result<(), SelectionError> {
        if !valid_label(&v) {
            return Err(SelectionError::InvalidGraph(format!(
                "bad vertex label {v:?}"
            )));
        }
        self.vertices.insert(v);
        Ok(())
    }

    pub fn add_edge(&mut self, u: String, v: String) -> Result<(), SelectionError> {
        if u == v {
            return Err(SelectionError::InvalidGraph(format!("self-loop at {u}")));
        }
        self.add_vertex(u.clone())?;
        self.add_vertex(v.clone())?;
        self.edges.insert(if u < v { (u, v) } else { (v, u) });
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<String> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    /// Whether `cover` touches every edge.
    pub fn is_cover(&self, cover: &BTreeSet<&str>) -> bool {
        self.edges
            .iter()
            .all(|(u, v)| cover.contains(u.as_str()) || cover.contains(v.as_str()))
    }
}

impl fmt::Display for UndirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let touched: BTreeSet<&String> = self.edges.iter().flat_map(|(u, v)| [u, v]).collect();
        for v in self.vertices.iter().filter(|v| !touched.contains(v)) {
            writeln!(f, "vertex {v}")?;
        }
        for (u, v) in &self.edges {
            writeln!(f, "edge {u} {v}")?;
        }
        Ok(())
    }
}

/// Reads `edge <u> <v>` and `vertex <v>` lines; blank lines and `#` comments
/// are skipped.
pub fn parse_undirected_graph(text: &str) -> Result<UndirectedGraph, SelectionError> {
    let mut g = UndirectedGraph::new(Vec::new(), Vec::new())?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| SelectionError::GraphSyntax {
            line: idx + 1,
            message,
        };
        let words: Vec<&str> = line.split_whitespace().collect();
        let result = match words.as_slice() {
            ["edge", u, v] => g.add_edge(u.to_string(), v.to_string()),
            ["vertex", v] => g.add_vertex(v.to_string()),
            _ => {
                return Err(err(format!(
                    "expected `edge <u> <v>` or `vertex <v>`, found {line:?}"
                )))
            }
        };
        result.map_err(|e| err(e.to_string()))?;
    }
    Ok(g)
}

/// The output of the reduction: query, federation and cost bound.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub bgp: Bgp,
    pub federation: Federation,
    pub bound: usize,
}

fn rdf_type() -> Term {
    Term::iri("rdf:type")
}

fn edge_class() -> Term {
    Term::iri("ex:Edge")
}

/// `ex:edge/<u>-<v>` with sorted endpoints; injective because labels never
/// contain `-`.
pub fn edge_iri(u: &str, v: &str) -> Term {
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    Term::iri(format!("ex:edge/{a}-{b}"))
}

pub fn node_cover_reduce(g: &UndirectedGraph, k: usize) -> Result<Reduction, SelectionError> {
    if k == 0 {
        return Err(SelectionError::InvalidBound(k));
    }
    let members = g
        .vertices
        .iter()
        .map(|v| {
            let graph: Graph = g
                .edges
                .iter()
                .filter(|(a, b)| a == v || b == v)
                .map(|(a, b)| Triple::new(edge_iri(a, b), rdf_type(), edge_class()).unwrap())
                .collect();
            Ok(Member::new(
                MemberId::new(v.clone())?,
                InterfaceKind::Tpf,
                graph,
            ))
        })
        .collect::<Result<Vec<_>, SelectionError>>()?;
    let tp = TriplePattern::new(Term::var("x"), rdf_type(), edge_class()).unwrap();
    Ok(Reduction {
        bgp: Bgp::singleton(tp),
        federation: Federation::new(members)?,
        bound: k,
    })
}

pub fn min_node_cover(g: &UndirectedGraph) -> Result<usize, SelectionError> {
    min_node_cover_with_cap(g, DEFAULT_COVER_CAP)
}

/// Exact minimum vertex cover by enumerating vertex subsets by size.
pub fn min_node_cover_with_cap(g: &UndirectedGraph, cap: usize) -> Result<usize, SelectionError> {
    let n = g.vertices.len();
    if n > cap {
        return Err(SelectionError::TooLarge { vertices: n, cap });
    }
    let labels: Vec<&str> = g.vertices.iter().map(String::as_str).collect();
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let cover: BTreeSet<&str> = labels
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, l)| *l)
            .collect();
        if g.is_cover(&cover) {
            return Ok(cover.len());
        }
    }
    unreachable!("the full vertex set is a cover")
}
