//! Ground RDF data, triple patterns and the set-based algebra over solution
//! mappings (compatibility, join, union, BGP evaluation over one graph).
//!
//! All collections are ordered sets so that iteration and serialization are
//! deterministic. Terms order by kind first (IRI, blank node, literal,
//! variable) and then by their string payload.

use std::collections::{btree_map, btree_set, BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::lex::escape_literal;

mod ntriples;

pub use ntriples::{parse_ntriples, NTriplesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RdfError {
    #[error("{term} is not allowed as the {position} of {what}")]
    Position {
        term: String,
        position: &'static str,
        what: &'static str,
    },
    #[error("?{0} cannot be bound to the variable {1}")]
    VariableValue(String, String),
    #[error("incompatible solution mappings: ?{var} is bound to {left} and {right}")]
    Incompatible {
        var: String,
        left: String,
        right: String,
    },
    #[error("a basic graph pattern must contain at least one triple pattern")]
    EmptyBgp,
}

/// A query variable, identified by its name (without the leading `?`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(String);

impl Variable {
    /// # Panics
    /// If `name` is empty.
    pub fn new(name: impl Into<String>) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "variable names must be non-empty");
        Variable(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// An RDF term or a variable. Literals are opaque lexical forms.
///
/// The variant order is the canonical kind order used for sorting.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal(String),
    Variable(Variable),
}

impl Term {
    /// # Panics
    /// If `iri` is empty.
    pub fn iri(iri: impl Into<String>) -> Self {
        let iri = iri.into();
        assert!(!iri.is_empty(), "IRIs must be non-empty");
        Term::Iri(iri)
    }

    /// # Panics
    /// If `label` is empty.
    pub fn blank(label: impl Into<String>) -> Self {
        let label = label.into();
        assert!(!label.is_empty(), "blank node labels must be non-empty");
        Term::BlankNode(label)
    }

    pub fn literal(value: impl Into<String>) -> Self {
        Term::Literal(value.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(Variable::new(name))
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }

    pub fn as_variable(&self) -> Option<&Variable> {
        match self {
            Term::Variable(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::BlankNode(label) => write!(f, "_:{label}"),
            Term::Literal(value) => f.write_str(&escape_literal(value)),
            Term::Variable(v) => v.fmt(f),
        }
    }
}

fn reject(term: &Term, position: &'static str, what: &'static str) -> RdfError {
    RdfError::Position {
        term: term.to_string(),
        position,
        what,
    }
}

/// A ground RDF triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    s: Term,
    p: Term,
    o: Term,
}

impl Triple {
    pub fn new(s: Term, p: Term, o: Term) -> Result<Self, RdfError> {
        if !matches!(s, Term::Iri(_) | Term::BlankNode(_)) {
            return Err(reject(&s, "subject", "an RDF triple"));
        }
        if !matches!(p, Term::Iri(_)) {
            return Err(reject(&p, "predicate", "an RDF triple"));
        }
        if o.is_variable() {
            return Err(reject(&o, "object", "an RDF triple"));
        }
        Ok(Triple { s, p, o })
    }

    pub fn subject(&self) -> &Term {
        &self.s
    }

    pub fn predicate(&self) -> &Term {
        &self.p
    }

    pub fn object(&self) -> &Term {
        &self.o
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.s, &self.p, &self.o]
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.s, self.p, self.o)
    }
}

/// A finite set of triples.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph(BTreeSet<Triple>);

impl Graph {
    pub fn new() -> Self {
        Graph(BTreeSet::new())
    }

    /// Returns whether the triple was newly inserted.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.0.insert(triple)
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.0.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Triple> {
        self.0.iter()
    }

    pub fn blank_nodes(&self) -> BTreeSet<&str> {
        self.0
            .iter()
            .flat_map(|t| [&t.s, &t.o])
            .filter_map(|term| match term {
                Term::BlankNode(label) => Some(label.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Serializes the graph as N-Triples, one triple per line in canonical order.
    pub fn to_ntriples(&self) -> String {
        self.0.iter().map(|t| format!("{t}\n")).collect()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph(iter.into_iter().collect())
    }
}

impl Extend<Triple> for Graph {
    fn extend<I: IntoIterator<Item = Triple>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A triple pattern. Blank nodes are not permitted in any position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    s: Term,
    p: Term,
    o: Term,
}

impl TriplePattern {
    pub fn new(s: Term, p: Term, o: Term) -> Result<Self, RdfError> {
        if !matches!(s, Term::Iri(_) | Term::Variable(_)) {
            return Err(reject(&s, "subject", "a triple pattern"));
        }
        if !matches!(p, Term::Iri(_) | Term::Variable(_)) {
            return Err(reject(&p, "predicate", "a triple pattern"));
        }
        if matches!(o, Term::BlankNode(_)) {
            return Err(reject(&o, "object", "a triple pattern"));
        }
        Ok(TriplePattern { s, p, o })
    }

    pub fn subject(&self) -> &Term {
        &self.s
    }

    pub fn predicate(&self) -> &Term {
        &self.p
    }

    pub fn object(&self) -> &Term {
        &self.o
    }

    pub fn terms(&self) -> [&Term; 3] {
        [&self.s, &self.p, &self.o]
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        self.terms()
            .into_iter()
            .filter_map(Term::as_variable)
            .cloned()
            .collect()
    }

    /// Matches the pattern against a triple, binding every variable.
    pub fn match_triple(&self, triple: &Triple) -> Option<SolutionMapping> {
        let mut mapping = SolutionMapping::new();
        for (pattern_term, value) in self.terms().into_iter().zip(triple.terms()) {
            match pattern_term {
                Term::Variable(v) => match mapping.get(v) {
                    Some(bound) if bound != value => return None,
                    Some(_) => {}
                    None => {
                        mapping.0.insert(v.clone(), value.clone());
                    }
                },
                constant if constant != value => return None,
                _ => {}
            }
        }
        Some(mapping)
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.s, self.p, self.o)
    }
}

/// A basic graph pattern: a nonempty set of triple patterns.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bgp(BTreeSet<TriplePattern>);

impl Bgp {
    pub fn new<I: IntoIterator<Item = TriplePattern>>(patterns: I) -> Result<Self, RdfError> {
        let set: BTreeSet<_> = patterns.into_iter().collect();
        if set.is_empty() {
            return Err(RdfError::EmptyBgp);
        }
        Ok(Bgp(set))
    }

    pub fn singleton(tp: TriplePattern) -> Self {
        Bgp(BTreeSet::from([tp]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, TriplePattern> {
        self.0.iter()
    }

    pub fn patterns(&self) -> &BTreeSet<TriplePattern> {
        &self.0
    }

    pub fn contains(&self, tp: &TriplePattern) -> bool {
        self.0.contains(tp)
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        self.0.iter().flat_map(TriplePattern::vars).collect()
    }

    pub fn union(&self, other: &Bgp) -> Bgp {
        Bgp(self.0.union(&other.0).cloned().collect())
    }

    pub fn with(&self, tp: TriplePattern) -> Bgp {
        let mut set = self.0.clone();
        set.insert(tp);
        Bgp(set)
    }

    /// The BGP without `tp`, or `None` if nothing would remain.
    pub fn without(&self, tp: &TriplePattern) -> Option<Bgp> {
        let mut set = self.0.clone();
        set.remove(tp);
        (!set.is_empty()).then_some(Bgp(set))
    }

    /// Every nonempty subset of the BGP, smallest first.
    pub fn nonempty_subsets(&self) -> Vec<Bgp> {
        let items: Vec<_> = self.0.iter().collect();
        let mut out: Vec<Bgp> = (1u64..(1 << items.len()))
            .map(|mask| {
                Bgp(items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, tp)| (*tp).clone())
                    .collect())
            })
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// Ordered pairs `(b1, b2)` of nonempty disjoint BGPs whose union is `self`.
    pub fn splits(&self) -> Vec<(Bgp, Bgp)> {
        let items: Vec<_> = self.0.iter().collect();
        let n = items.len();
        if n < 2 {
            return Vec::new();
        }
        let full = (1u64 << n) - 1;
        (1..full)
            .map(|mask| {
                let pick = |want: bool| {
                    Bgp(items
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| (mask & (1 << i) != 0) == want)
                        .map(|(_, tp)| (*tp).clone())
                        .collect())
                };
                (pick(true), pick(false))
            })
            .collect()
    }
}

impl fmt::Display for Bgp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, tp) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" . ")?;
            }
            tp.fmt(f)?;
        }
        f.write_str("}")
    }
}

impl<'a> IntoIterator for &'a Bgp {
    type Item = &'a TriplePattern;
    type IntoIter = btree_set::Iter<'a, TriplePattern>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A partial function from variables to RDF terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolutionMapping(BTreeMap<Variable, Term>);

impl SolutionMapping {
    pub fn new() -> Self {
        SolutionMapping(BTreeMap::new())
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self, RdfError>
    where
        I: IntoIterator<Item = (Variable, Term)>,
    {
        let mut mapping = SolutionMapping::new();
        for (var, term) in pairs {
            mapping.insert(var, term)?;
        }
        Ok(mapping)
    }

    /// Binds `var`, replacing any previous value. Variables are rejected as values.
    pub fn insert(&mut self, var: Variable, term: Term) -> Result<(), RdfError> {
        if let Term::Variable(v) = &term {
            return Err(RdfError::VariableValue(
                var.name().to_string(),
                v.to_string(),
            ));
        }
        self.0.insert(var, term);
        Ok(())
    }

    pub fn get(&self, var: &Variable) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, Variable, Term> {
        self.0.iter()
    }

    pub fn domain(&self) -> BTreeSet<Variable> {
        self.0.keys().cloned().collect()
    }

    pub fn has_domain(&self, vars: &BTreeSet<Variable>) -> bool {
        self.0.len() == vars.len() && self.0.keys().all(|v| vars.contains(v))
    }

    /// The restriction of this mapping to `vars`.
    pub fn restrict(&self, vars: &BTreeSet<Variable>) -> SolutionMapping {
        SolutionMapping(
            self.0
                .iter()
                .filter(|(v, _)| vars.contains(*v))
                .map(|(v, t)| (v.clone(), t.clone()))
                .collect(),
        )
    }

    pub fn is_compatible(&self, other: &SolutionMapping) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .0
            .iter()
            .all(|(v, t)| large.0.get(v).is_none_or(|u| u == t))
    }

    /// `self ∪ other`; fails if the mappings disagree on a shared variable.
    pub fn merge(&self, other: &SolutionMapping) -> Result<SolutionMapping, RdfError> {
        let mut out = self.clone();
        for (v, t) in &other.0 {
            match out.0.get(v) {
                Some(u) if u != t => {
                    return Err(RdfError::Incompatible {
                        var: v.name().to_string(),
                        left: u.to_string(),
                        right: t.to_string(),
                    })
                }
                Some(_) => {}
                None => {
                    out.0.insert(v.clone(), t.clone());
                }
            }
        }
        Ok(out)
    }

    fn merge_unchecked(&self, other: &SolutionMapping) -> SolutionMapping {
        let mut out = self.clone();
        for (v, t) in &other.0 {
            out.0.entry(v.clone()).or_insert_with(|| t.clone());
        }
        out
    }

    pub fn substitute(&self, term: &Term) -> Term {
        match term {
            Term::Variable(v) => self.0.get(v).cloned().unwrap_or_else(|| term.clone()),
            other => other.clone(),
        }
    }

    /// Instantiates `tp`; `None` unless the result is a well-formed RDF triple.
    pub fn ground(&self, tp: &TriplePattern) -> Option<Triple> {
        let [s, p, o] = tp.terms().map(|t| self.substitute(t));
        Triple::new(s, p, o).ok()
    }
}

impl fmt::Display for SolutionMapping {
    /// Canonical form: `?v=term` pairs sorted by variable name, space separated.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}={t}")?;
        }
        Ok(())
    }
}

/// A duplicate-free set of solution mappings.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolutionSet(BTreeSet<SolutionMapping>);

impl SolutionSet {
    pub fn new() -> Self {
        SolutionSet(BTreeSet::new())
    }

    /// `{μ∅}`, the neutral element of join.
    pub fn unit() -> Self {
        SolutionSet(BTreeSet::from([SolutionMapping::new()]))
    }

    pub fn insert(&mut self, mapping: SolutionMapping) -> bool {
        self.0.insert(mapping)
    }

    pub fn contains(&self, mapping: &SolutionMapping) -> bool {
        self.0.contains(mapping)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, SolutionMapping> {
        self.0.iter()
    }

    pub fn join(&self, other: &SolutionSet) -> SolutionSet {
        let mut out = BTreeSet::new();
        for left in &self.0 {
            for right in &other.0 {
                if left.is_compatible(right) {
                    out.insert(left.merge_unchecked(right));
                }
            }
        }
        SolutionSet(out)
    }

    pub fn union(&self, other: &SolutionSet) -> SolutionSet {
        SolutionSet(self.0.union(&other.0).cloned().collect())
    }

    /// The canonical text form: one mapping per line, lines sorted lexicographically.
    pub fn canonical_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        lines.sort();
        lines
    }
}

impl FromIterator<SolutionMapping> for SolutionSet {
    fn from_iter<I: IntoIterator<Item = SolutionMapping>>(iter: I) -> Self {
        SolutionSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a SolutionSet {
    type Item = &'a SolutionMapping;
    type IntoIter = btree_set::Iter<'a, SolutionMapping>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A triple pattern after substitution: some positions may still hold variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubstitutedPattern(pub Term, pub Term, pub Term);

impl SubstitutedPattern {
    pub fn to_triple(&self) -> Option<Triple> {
        Triple::new(self.0.clone(), self.1.clone(), self.2.clone()).ok()
    }

    pub fn is_ground(&self) -> bool {
        ![&self.0, &self.1, &self.2].iter().any(|t| t.is_variable())
    }
}

pub fn compatible(m1: &SolutionMapping, m2: &SolutionMapping) -> bool {
    m1.is_compatible(m2)
}

pub fn merge(m1: &SolutionMapping, m2: &SolutionMapping) -> Result<SolutionMapping, RdfError> {
    m1.merge(m2)
}

pub fn join_sets(s1: &SolutionSet, s2: &SolutionSet) -> SolutionSet {
    s1.join(s2)
}

pub fn union_sets(s1: &SolutionSet, s2: &SolutionSet) -> SolutionSet {
    s1.union(s2)
}

/// `μ[B]`: replaces the variables of `bgp` that are bound by `mapping`.
pub fn apply_mapping(mapping: &SolutionMapping, bgp: &Bgp) -> BTreeSet<SubstitutedPattern> {
    bgp.iter()
        .map(|tp| {
            let [s, p, o] = tp.terms().map(|t| mapping.substitute(t));
            SubstitutedPattern(s, p, o)
        })
        .collect()
}

pub fn eval_triple_pattern(tp: &TriplePattern, graph: &Graph) -> SolutionSet {
    graph.iter().filter_map(|t| tp.match_triple(t)).collect()
}

/// `⟦B⟧G`, evaluated one pattern at a time with an intermediate join.
pub fn eval_bgp(bgp: &Bgp, graph: &Graph) -> SolutionSet {
    let mut acc = SolutionSet::unit();
    for tp in bgp {
        if acc.is_empty() {
            break;
        }
        acc = acc.join(&eval_triple_pattern(tp, graph));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tp(s: &str, p: &str, o: &str) -> TriplePattern {
        let term = |x: &str| {
            if let Some(v) = x.strip_prefix('?') {
                Term::var(v)
            } else if let Some(l) = x.strip_prefix('"') {
                Term::literal(l.trim_end_matches('"'))
            } else {
                Term::iri(x)
            }
        };
        TriplePattern::new(term(s), term(p), term(o)).unwrap()
    }

    fn triple(s: &str, p: &str, o: &str) -> Triple {
        let o = match o.strip_prefix('"') {
            Some(l) => Term::literal(l.trim_end_matches('"')),
            None => Term::iri(o),
        };
        Triple::new(Term::iri(s), Term::iri(p), o).unwrap()
    }

    fn mapping(pairs: &[(&str, Term)]) -> SolutionMapping {
        SolutionMapping::from_pairs(pairs.iter().map(|(v, t)| (Variable::new(*v), t.clone())))
            .unwrap()
    }

    fn g2() -> Graph {
        [
            triple("c", "name", "\"Lee\""),
            triple("d", "name", "\"Alice\""),
        ]
        .into_iter()
        .collect()
    }

    fn g3() -> Graph {
        [triple("a", "knows", "b"), triple("b", "name", "\"Peter\"")]
            .into_iter()
            .collect()
    }

    #[test]
    fn compatibility() {
        let empty = SolutionMapping::new();
        let xa = mapping(&[("x", Term::iri("a"))]);
        assert!(compatible(&empty, &xa));
        let yc = mapping(&[("y", Term::iri("c"))]);
        let ycz = mapping(&[("y", Term::iri("c")), ("z", Term::literal("Lee"))]);
        assert!(compatible(&yc, &ycz));
        let yd = mapping(&[("y", Term::iri("d"))]);
        assert!(!compatible(&yc, &yd));
    }

    #[test]
    fn merging() {
        let left = mapping(&[("x", Term::iri("a")), ("y", Term::iri("c"))]);
        let right = mapping(&[("y", Term::iri("c")), ("z", Term::literal("Lee"))]);
        let mu1 = mapping(&[
            ("x", Term::iri("a")),
            ("y", Term::iri("c")),
            ("z", Term::literal("Lee")),
        ]);
        assert_eq!(merge(&left, &right).unwrap(), mu1);
        let xa = mapping(&[("x", Term::iri("a"))]);
        assert_eq!(merge(&SolutionMapping::new(), &xa).unwrap(), xa);
        assert_eq!(merge(&xa, &xa).unwrap(), xa);
        let xb = mapping(&[("x", Term::iri("b"))]);
        assert!(matches!(
            merge(&xa, &xb),
            Err(RdfError::Incompatible { .. })
        ));
    }

    #[test]
    fn mapping_values_are_never_variables() {
        let mut m = SolutionMapping::new();
        assert!(m.insert(Variable::new("x"), Term::var("y")).is_err());
    }

    #[test]
    fn join_and_union_of_sets() {
        let g1: Graph = [triple("a", "knows", "c")].into_iter().collect();
        let left = eval_triple_pattern(&tp("?x", "knows", "?y"), &g1);
        let right = eval_triple_pattern(&tp("?y", "name", "?z"), &g2());
        let joined = join_sets(&left, &right);
        let mu1 = mapping(&[
            ("x", Term::iri("a")),
            ("y", Term::iri("c")),
            ("z", Term::literal("Lee")),
        ]);
        assert_eq!(joined, SolutionSet::from_iter([mu1.clone()]));
        assert_eq!(join_sets(&right, &SolutionSet::unit()), right);
        assert!(join_sets(&right, &SolutionSet::new()).is_empty());

        let mu2 = mapping(&[
            ("x", Term::iri("a")),
            ("y", Term::iri("b")),
            ("z", Term::literal("Peter")),
        ]);
        let both = union_sets(
            &SolutionSet::from_iter([mu1.clone()]),
            &SolutionSet::from_iter([mu2.clone()]),
        );
        assert_eq!(both, SolutionSet::from_iter([mu1, mu2]));
        assert_eq!(union_sets(&both, &both), both);
        assert_eq!(union_sets(&both, &SolutionSet::new()), both);
    }

    #[test]
    fn substitution() {
        let b = Bgp::singleton(tp("?x", "knows", "?y"));
        let full = mapping(&[("x", Term::iri("a")), ("y", Term::iri("c"))]);
        let out = apply_mapping(&full, &b);
        assert_eq!(out.len(), 1);
        let only = out.iter().next().unwrap();
        assert!(only.is_ground());
        assert_eq!(only.to_triple(), Some(triple("a", "knows", "c")));

        let unchanged = apply_mapping(&SolutionMapping::new(), &b);
        let expected = SubstitutedPattern(Term::var("x"), Term::iri("knows"), Term::var("y"));
        assert_eq!(unchanged, BTreeSet::from([expected]));

        let partial = apply_mapping(&mapping(&[("x", Term::iri("a"))]), &b);
        let expected = SubstitutedPattern(Term::iri("a"), Term::iri("knows"), Term::var("y"));
        assert_eq!(partial, BTreeSet::from([expected]));
    }

    #[test]
    fn bgp_evaluation() {
        let tp1 = tp("?x", "knows", "?y");
        let tp2 = tp("?y", "name", "?z");
        let res = eval_bgp(&Bgp::singleton(tp2.clone()), &g2());
        let expected = SolutionSet::from_iter([
            mapping(&[("y", Term::iri("c")), ("z", Term::literal("Lee"))]),
            mapping(&[("y", Term::iri("d")), ("z", Term::literal("Alice"))]),
        ]);
        assert_eq!(res, expected);
        assert!(eval_bgp(&Bgp::singleton(tp1.clone()), &g2()).is_empty());

        let b_ex = Bgp::new([tp1, tp2]).unwrap();
        let mu2 = mapping(&[
            ("x", Term::iri("a")),
            ("y", Term::iri("b")),
            ("z", Term::literal("Peter")),
        ]);
        assert_eq!(eval_bgp(&b_ex, &g3()), SolutionSet::from_iter([mu2]));
    }

    #[test]
    fn repeated_variables_must_agree() {
        let g: Graph = [triple("a", "p", "a"), triple("a", "p", "b")]
            .into_iter()
            .collect();
        let res = eval_triple_pattern(&tp("?x", "p", "?x"), &g);
        assert_eq!(
            res,
            SolutionSet::from_iter([mapping(&[("x", Term::iri("a"))])])
        );
    }

    #[test]
    fn ground_patterns_evaluate_to_unit_or_empty() {
        let g: Graph = [triple("a", "p", "b")].into_iter().collect();
        assert_eq!(
            eval_bgp(&Bgp::singleton(tp("a", "p", "b")), &g),
            SolutionSet::unit()
        );
        assert!(eval_bgp(&Bgp::singleton(tp("a", "p", "c")), &g).is_empty());
    }

    #[test]
    fn term_invariants() {
        assert!(Triple::new(Term::literal("x"), Term::iri("p"), Term::iri("o")).is_err());
        assert!(Triple::new(Term::iri("s"), Term::blank("b"), Term::iri("o")).is_err());
        assert!(Triple::new(Term::iri("s"), Term::iri("p"), Term::var("o")).is_err());
        assert!(TriplePattern::new(Term::blank("b"), Term::iri("p"), Term::var("o")).is_err());
        assert!(TriplePattern::new(Term::var("s"), Term::iri("p"), Term::blank("o")).is_err());
        assert_eq!(Bgp::new(Vec::new()), Err(RdfError::EmptyBgp));
        assert!(Term::iri("z") < Term::blank("a"));
        assert!(Term::blank("z") < Term::literal("a"));
        assert!(Term::literal("z") < Term::var("a"));
    }

    #[test]
    fn splits_cover_and_are_disjoint() {
        let b = Bgp::new([
            tp("?x", "p", "?y"),
            tp("?y", "p", "?z"),
            tp("?z", "p", "?w"),
        ])
        .unwrap();
        let splits = b.splits();
        assert_eq!(splits.len(), 6);
        for (l, r) in splits {
            assert_eq!(l.union(&r), b);
            assert!(l.patterns().is_disjoint(r.patterns()));
        }
        assert_eq!(b.nonempty_subsets().len(), 7);
    }

    // Small random data over a tiny vocabulary so that joins actually hit.
    fn arb_value() -> impl Strategy<Value = Term> {
        prop_oneof![
            (0..3u8).prop_map(|i| Term::iri(format!("e{i}"))),
            (0..2u8).prop_map(|i| Term::literal(format!("l{i}"))),
        ]
    }

    fn arb_mapping() -> impl Strategy<Value = SolutionMapping> {
        proptest::collection::btree_map(0..3u8, arb_value(), 0..3).prop_map(|m| {
            SolutionMapping(
                m.into_iter()
                    .map(|(k, v)| (Variable::new(format!("v{k}")), v))
                    .collect(),
            )
        })
    }

    fn arb_set() -> impl Strategy<Value = SolutionSet> {
        proptest::collection::btree_set(arb_mapping(), 0..5).prop_map(SolutionSet)
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        proptest::collection::btree_set((0..3u8, 0..2u8, 0..4u8), 0..8).prop_map(|raw| {
            raw.into_iter()
                .map(|(s, p, o)| {
                    let o = if o < 3 {
                        Term::iri(format!("e{o}"))
                    } else {
                        Term::literal("l0")
                    };
                    Triple::new(Term::iri(format!("e{s}")), Term::iri(format!("p{p}")), o).unwrap()
                })
                .collect()
        })
    }

    fn arb_pattern() -> impl Strategy<Value = TriplePattern> {
        let slot = |consts: u8| {
            prop_oneof![
                (0..3u8).prop_map(|i| Term::var(format!("v{i}"))),
                (0..consts).prop_map(|i| Term::iri(format!("e{i}"))),
            ]
        };
        (slot(3), (0..2u8), slot(3))
            .prop_map(|(s, p, o)| TriplePattern::new(s, Term::iri(format!("p{p}")), o).unwrap())
    }

    fn arb_bgp() -> impl Strategy<Value = Bgp> {
        proptest::collection::btree_set(arb_pattern(), 1..3).prop_map(Bgp)
    }

    proptest! {
        #[test]
        fn join_is_commutative_and_associative(a in arb_set(), b in arb_set(), c in arb_set()) {
            prop_assert_eq!(join_sets(&a, &b), join_sets(&b, &a));
            prop_assert_eq!(
                join_sets(&join_sets(&a, &b), &c),
                join_sets(&a, &join_sets(&b, &c))
            );
        }

        #[test]
        fn union_is_idempotent(a in arb_set(), b in arb_set()) {
            prop_assert_eq!(union_sets(&a, &a), a.clone());
            prop_assert_eq!(union_sets(&a, &b), union_sets(&b, &a));
        }

        #[test]
        fn bgp_evaluation_decomposes(b1 in arb_bgp(), b2 in arb_bgp(), g in arb_graph()) {
            let whole = eval_bgp(&b1.union(&b2), &g);
            prop_assert_eq!(&whole, &join_sets(&eval_bgp(&b1, &g), &eval_bgp(&b2, &g)));
            let vars = b1.union(&b2).vars();
            for mu in &whole {
                prop_assert!(mu.has_domain(&vars));
            }
        }
    }
}
