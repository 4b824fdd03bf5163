//! Data access interfaces, federation members and federation-level query
//! semantics.
//!
//! An interface is a request language together with an evaluation function
//! from (request, graph) to a solution set. The three interfaces modelled here
//! differ only in which requests they accept and how they answer them; the
//! behaviour is table-driven off [`InterfaceKind`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lex::is_ident_char;
use crate::rdf::{eval_bgp, eval_triple_pattern, Bgp, Graph, SolutionSet, TriplePattern, Variable};

mod manifest;

pub use manifest::{load_manifest, parse_manifest, ManifestError};

/// The interface a federation member exposes.
///
/// To add an interface: add a variant here, a row to the capability methods
/// ([`InterfaceKind::supports_tp_requests`], [`InterfaceKind::supports_bgp_requests`],
/// [`InterfaceKind::accepts`]), a name in [`InterfaceKind::name`] and an arm in
/// [`interface_eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InterfaceKind {
    Sparql,
    Tpf,
    BrTpf,
}

impl InterfaceKind {
    pub const ALL: [InterfaceKind; 3] = [
        InterfaceKind::Sparql,
        InterfaceKind::Tpf,
        InterfaceKind::BrTpf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InterfaceKind::Sparql => "sparql",
            InterfaceKind::Tpf => "tpf",
            InterfaceKind::BrTpf => "brtpf",
        }
    }

    pub fn supports_tp_requests(self) -> bool {
        match self {
            InterfaceKind::Sparql | InterfaceKind::Tpf | InterfaceKind::BrTpf => true,
        }
    }

    pub fn supports_bgp_requests(self) -> bool {
        match self {
            InterfaceKind::Sparql => true,
            InterfaceKind::Tpf | InterfaceKind::BrTpf => false,
        }
    }

    /// Whether `request` belongs to this interface's request language.
    pub fn accepts(self, request: &Request) -> bool {
        match request {
            Request::Tp(_) => self.supports_tp_requests(),
            Request::Bgp(_) => self.supports_bgp_requests(),
            Request::Pattern(_) => self == InterfaceKind::Sparql,
            Request::BrTpf(..) => self == InterfaceKind::BrTpf,
        }
    }
}

impl fmt::Display for InterfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InterfaceKind {
    type Err = FederationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InterfaceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| FederationError::UnknownInterface(s.to_string()))
    }
}

/// A graph pattern of the join-union fragment of SPARQL.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphPattern {
    Bgp(Bgp),
    And(Box<GraphPattern>, Box<GraphPattern>),
    Union(Box<GraphPattern>, Box<GraphPattern>),
}

impl GraphPattern {
    pub fn and(left: GraphPattern, right: GraphPattern) -> Self {
        GraphPattern::And(Box::new(left), Box::new(right))
    }

    pub fn union(left: GraphPattern, right: GraphPattern) -> Self {
        GraphPattern::Union(Box::new(left), Box::new(right))
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        match self {
            GraphPattern::Bgp(b) => b.vars(),
            GraphPattern::And(l, r) | GraphPattern::Union(l, r) => {
                let mut out = l.vars();
                out.extend(r.vars());
                out
            }
        }
    }

    /// Every triple pattern that occurs in some BGP leaf.
    pub fn triple_patterns(&self) -> BTreeSet<TriplePattern> {
        match self {
            GraphPattern::Bgp(b) => b.patterns().clone(),
            GraphPattern::And(l, r) | GraphPattern::Union(l, r) => {
                let mut out = l.triple_patterns();
                out.extend(r.triple_patterns());
                out
            }
        }
    }
}

impl fmt::Display for GraphPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphPattern::Bgp(b) => b.fmt(f),
            GraphPattern::And(l, r) => write!(f, "and({l}, {r})"),
            GraphPattern::Union(l, r) => write!(f, "unionp({l}, {r})"),
        }
    }
}

/// An expression of some interface's request language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Request {
    Tp(TriplePattern),
    Bgp(Bgp),
    /// A SPARQL graph pattern that is not a bare BGP.
    Pattern(GraphPattern),
    /// A brTPF request: a triple pattern with attached solution mappings.
    BrTpf(TriplePattern, SolutionSet),
}

impl Request {
    /// Wraps a graph pattern, using the `Bgp` form when it is a single BGP.
    pub fn from_pattern(pattern: GraphPattern) -> Self {
        match pattern {
            GraphPattern::Bgp(b) => Request::Bgp(b),
            other => Request::Pattern(other),
        }
    }

    /// The request as a SPARQL graph pattern, if it has one.
    pub fn as_pattern(&self) -> Option<GraphPattern> {
        match self {
            Request::Tp(tp) => Some(GraphPattern::Bgp(Bgp::singleton(tp.clone()))),
            Request::Bgp(b) => Some(GraphPattern::Bgp(b.clone())),
            Request::Pattern(p) => Some(p.clone()),
            Request::BrTpf(..) => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        match self {
            Request::Tp(tp) | Request::BrTpf(tp, _) => tp.vars(),
            Request::Bgp(b) => b.vars(),
            Request::Pattern(p) => p.vars(),
        }
    }

    /// A short description used in diagnostics.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Request::Tp(_) => "triple pattern",
            Request::Bgp(_) => "BGP",
            Request::Pattern(_) => "graph pattern",
            Request::BrTpf(..) => "brTPF",
        }
    }
}

impl fmt::Display for Request {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Request::Tp(tp) => tp.fmt(f),
            Request::Bgp(b) => b.fmt(f),
            Request::Pattern(p) => p.fmt(f),
            Request::BrTpf(tp, omega) => {
                write!(f, "({tp} | {{")?;
                for (i, mu) in omega.iter().enumerate() {
                    if i > 0 {
                        f.write_str("; ")?;
                    }
                    if mu.is_empty() {
                        f.write_str("()")?;
                    }
                    for (j, (v, t)) in mu.iter().enumerate() {
                        if j > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{v}={t}")?;
                    }
                }
                f.write_str("})")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FederationError {
    #[error("federation must be nonempty")]
    Empty,
    #[error("duplicate member id {0}")]
    DuplicateMember(String),
    #[error("invalid member id {0:?}")]
    InvalidMemberId(String),
    #[error("members {first} and {second} share blank nodes: {}", labels.join(", "))]
    SharedBlankNodes {
        first: String,
        second: String,
        labels: Vec<String>,
    },
    #[error("unknown interface {0:?} (expected sparql, tpf or brtpf)")]
    UnknownInterface(String),
    #[error("member {member} ({kind}) does not accept {request} requests")]
    UnsupportedRequest {
        member: String,
        kind: InterfaceKind,
        request: &'static str,
    },
    #[error("member {0} supports no triple pattern requests")]
    NotTriplePatternAccessible(String),
}

/// A federation member identifier: a nonempty run of `[A-Za-z0-9_.-]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MemberId(String);

impl MemberId {
    pub fn new(id: impl Into<String>) -> Result<Self, FederationError> {
        let id = id.into();
        if id.is_empty() || !id.chars().all(is_ident_char) {
            return Err(FederationError::InvalidMemberId(id));
        }
        Ok(MemberId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for MemberId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub id: MemberId,
    pub graph: Graph,
    pub kind: InterfaceKind,
}

impl Member {
    pub fn new(id: MemberId, kind: InterfaceKind, graph: Graph) -> Self {
        Member { id, graph, kind }
    }
}

/// A finite, nonempty set of members with pairwise disjoint blank nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Federation {
    members: BTreeMap<MemberId, Member>,
}

impl Federation {
    pub fn new(members: Vec<Member>) -> Result<Self, FederationError> {
        if members.is_empty() {
            return Err(FederationError::Empty);
        }
        let mut map = BTreeMap::new();
        for m in members {
            if map.contains_key(&m.id) {
                return Err(FederationError::DuplicateMember(m.id.to_string()));
            }
            map.insert(m.id.clone(), m);
        }
        let fed = Federation { members: map };
        fed.validate()?;
        Ok(fed)
    }

    /// Checks nonemptiness and blank-node disjointness.
    pub fn validate(&self) -> Result<(), FederationError> {
        if self.members.is_empty() {
            return Err(FederationError::Empty);
        }
        let blanks: Vec<_> = self
            .members
            .values()
            .map(|m| (m, m.graph.blank_nodes()))
            .collect();
        for (i, (first, a)) in blanks.iter().enumerate() {
            for (second, b) in &blanks[i + 1..] {
                let shared: Vec<String> = a.intersection(b).map(|l| format!("_:{l}")).collect();
                if !shared.is_empty() {
                    return Err(FederationError::SharedBlankNodes {
                        first: first.id.to_string(),
                        second: second.id.to_string(),
                        labels: shared,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &MemberId) -> Option<&Member> {
        self.members.get(id)
    }

    pub fn get_str(&self, id: &str) -> Option<&Member> {
        self.members.values().find(|m| m.id.as_str() == id)
    }

    /// Members in id order.
    pub fn members(&self) -> impl Iterator<Item = &Member> {
        self.members.values()
    }

    pub fn member_ids(&self) -> impl Iterator<Item = &MemberId> {
        self.members.keys()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Always false for a constructed federation.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Every member supports triple pattern requests.
    pub fn is_triple_pattern_accessible(&self) -> bool {
        self.members.values().all(|m| m.kind.supports_tp_requests())
    }

    pub fn require_triple_pattern_accessible(&self) -> Result<(), FederationError> {
        match self
            .members
            .values()
            .find(|m| !m.kind.supports_tp_requests())
        {
            Some(m) => Err(FederationError::NotTriplePatternAccessible(
                m.id.to_string(),
            )),
            None => Ok(()),
        }
    }

    pub fn union_graph(&self) -> Graph {
        union_graph(self)
    }
}

pub fn supports_tp_requests(kind: InterfaceKind) -> bool {
    kind.supports_tp_requests()
}

pub fn supports_bgp_requests(kind: InterfaceKind) -> bool {
    kind.supports_bgp_requests()
}

/// `⟦P⟧G` for the join-union fragment.
pub fn eval_graph_pattern(pattern: &GraphPattern, graph: &Graph) -> SolutionSet {
    match pattern {
        GraphPattern::Bgp(b) => eval_bgp(b, graph),
        GraphPattern::And(l, r) => eval_graph_pattern(l, graph).join(&eval_graph_pattern(r, graph)),
        GraphPattern::Union(l, r) => {
            eval_graph_pattern(l, graph).union(&eval_graph_pattern(r, graph))
        }
    }
}

/// The member's interface applied to `request` over the member's graph.
///
/// A brTPF request with an empty binding set is answered like a plain triple
/// pattern request, not with the empty set.
pub fn interface_eval(member: &Member, request: &Request) -> Result<SolutionSet, FederationError> {
    if !member.kind.accepts(request) {
        return Err(FederationError::UnsupportedRequest {
            member: member.id.to_string(),
            kind: member.kind,
            request: request.kind_name(),
        });
    }
    let g = &member.graph;
    Ok(match (member.kind, request) {
        (_, Request::Tp(tp)) => eval_triple_pattern(tp, g),
        (InterfaceKind::Sparql, Request::Bgp(b)) => eval_bgp(b, g),
        (InterfaceKind::Sparql, Request::Pattern(p)) => eval_graph_pattern(p, g),
        (InterfaceKind::BrTpf, Request::BrTpf(tp, omega)) => {
            let all = eval_triple_pattern(tp, g);
            if omega.is_empty() {
                all
            } else {
                all.iter()
                    .filter(|mu| omega.iter().any(|other| mu.is_compatible(other)))
                    .cloned()
                    .collect()
            }
        }
        _ => unreachable!("accepts() admitted an unsupported request"),
    })
}

pub fn union_graph(federation: &Federation) -> Graph {
    federation
        .members()
        .flat_map(|m| m.graph.iter().cloned())
        .collect()
}

/// `⟦P⟧F`, the pattern evaluated over the union of all member graphs.
pub fn eval_over_federation(pattern: &GraphPattern, federation: &Federation) -> SolutionSet {
    eval_graph_pattern(pattern, &union_graph(federation))
}

pub fn validate_federation(federation: &Federation) -> Result<(), FederationError> {
    federation.validate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{SolutionMapping, Term, Triple};

    fn iri(s: &str) -> Term {
        Term::iri(s)
    }

    fn triple(s: &str, p: &str, o: Term) -> Triple {
        Triple::new(iri(s), iri(p), o).unwrap()
    }

    fn tp1() -> TriplePattern {
        TriplePattern::new(Term::var("x"), iri("knows"), Term::var("y")).unwrap()
    }

    fn tp2() -> TriplePattern {
        TriplePattern::new(Term::var("y"), iri("name"), Term::var("z")).unwrap()
    }

    fn member(id: &str, kind: InterfaceKind, triples: Vec<Triple>) -> Member {
        Member::new(
            MemberId::new(id).unwrap(),
            kind,
            triples.into_iter().collect(),
        )
    }

    fn f_ex() -> Federation {
        Federation::new(vec![
            member(
                "m1",
                InterfaceKind::BrTpf,
                vec![triple("a", "knows", iri("c"))],
            ),
            member(
                "m2",
                InterfaceKind::Tpf,
                vec![
                    triple("c", "name", Term::literal("Lee")),
                    triple("d", "name", Term::literal("Alice")),
                ],
            ),
            member(
                "m3",
                InterfaceKind::Sparql,
                vec![
                    triple("a", "knows", iri("b")),
                    triple("b", "name", Term::literal("Peter")),
                ],
            ),
        ])
        .unwrap()
    }

    fn mapping(pairs: &[(&str, Term)]) -> SolutionMapping {
        SolutionMapping::from_pairs(pairs.iter().map(|(v, t)| (Variable::new(*v), t.clone())))
            .unwrap()
    }

    #[test]
    fn capabilities() {
        for k in InterfaceKind::ALL {
            assert!(supports_tp_requests(k));
        }
        assert!(supports_bgp_requests(InterfaceKind::Sparql));
        assert!(!supports_bgp_requests(InterfaceKind::Tpf));
        assert!(!supports_bgp_requests(InterfaceKind::BrTpf));
        assert!(f_ex().is_triple_pattern_accessible());
        assert_eq!(
            "brtpf".parse::<InterfaceKind>().unwrap(),
            InterfaceKind::BrTpf
        );
        assert!("http".parse::<InterfaceKind>().is_err());
    }

    #[test]
    fn tpf_member_answers_triple_patterns() {
        let f = f_ex();
        let m2 = f.get_str("m2").unwrap();
        let res = interface_eval(m2, &Request::Tp(tp2())).unwrap();
        let expected = SolutionSet::from_iter([
            mapping(&[("y", iri("c")), ("z", Term::literal("Lee"))]),
            mapping(&[("y", iri("d")), ("z", Term::literal("Alice"))]),
        ]);
        assert_eq!(res, expected);
        let bgp = Request::Bgp(Bgp::new([tp1(), tp2()]).unwrap());
        assert!(matches!(
            interface_eval(m2, &bgp),
            Err(FederationError::UnsupportedRequest { .. })
        ));
    }

    #[test]
    fn brtpf_filters_by_compatibility() {
        let f = f_ex();
        let m1 = f.get_str("m1").unwrap();
        let unfiltered = eval_bgp(&Bgp::singleton(tp1()), &m1.graph);
        let empty = Request::BrTpf(tp1(), SolutionSet::new());
        assert_eq!(interface_eval(m1, &empty).unwrap(), unfiltered);

        let omega = SolutionSet::from_iter([mapping(&[("y", iri("c"))])]);
        let res = interface_eval(m1, &Request::BrTpf(tp1(), omega)).unwrap();
        assert_eq!(
            res,
            SolutionSet::from_iter([mapping(&[("x", iri("a")), ("y", iri("c"))])])
        );

        let omega = SolutionSet::from_iter([mapping(&[("y", iri("zzz"))])]);
        assert!(interface_eval(m1, &Request::BrTpf(tp1(), omega))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn federation_semantics() {
        let f = f_ex();
        assert_eq!(union_graph(&f).len(), 5);
        let b_ex = GraphPattern::Bgp(Bgp::new([tp1(), tp2()]).unwrap());
        let mu1 = mapping(&[
            ("x", iri("a")),
            ("y", iri("c")),
            ("z", Term::literal("Lee")),
        ]);
        let mu2 = mapping(&[
            ("x", iri("a")),
            ("y", iri("b")),
            ("z", Term::literal("Peter")),
        ]);
        assert_eq!(
            eval_over_federation(&b_ex, &f),
            SolutionSet::from_iter([mu1, mu2])
        );

        let just_tp1 = GraphPattern::Bgp(Bgp::singleton(tp1()));
        assert_eq!(
            eval_over_federation(&just_tp1, &f),
            SolutionSet::from_iter([
                mapping(&[("x", iri("a")), ("y", iri("c"))]),
                mapping(&[("x", iri("a")), ("y", iri("b"))]),
            ])
        );
    }

    #[test]
    fn graph_patterns() {
        let g3 = f_ex().get_str("m3").unwrap().graph.clone();
        let whole = GraphPattern::Bgp(Bgp::new([tp1(), tp2()]).unwrap());
        let split = GraphPattern::and(
            GraphPattern::Bgp(Bgp::singleton(tp1())),
            GraphPattern::Bgp(Bgp::singleton(tp2())),
        );
        assert_eq!(
            eval_graph_pattern(&split, &g3),
            eval_graph_pattern(&whole, &g3)
        );
        let twice = GraphPattern::union(whole.clone(), whole.clone());
        assert_eq!(
            eval_graph_pattern(&twice, &g3),
            eval_graph_pattern(&whole, &g3)
        );
    }

    #[test]
    fn federation_invariants() {
        assert_eq!(Federation::new(vec![]), Err(FederationError::Empty));
        let b = |id: &str| {
            member(
                id,
                InterfaceKind::Tpf,
                vec![Triple::new(Term::blank("b1"), iri("p"), iri("o")).unwrap()],
            )
        };
        match Federation::new(vec![b("left"), b("right")]) {
            Err(FederationError::SharedBlankNodes {
                first,
                second,
                labels,
            }) => {
                assert_eq!((first.as_str(), second.as_str()), ("left", "right"));
                assert_eq!(labels, vec!["_:b1".to_string()]);
            }
            other => panic!("expected a blank-node error, got {other:?}"),
        }
        let dup = Federation::new(vec![
            member("m", InterfaceKind::Tpf, vec![]),
            member("m", InterfaceKind::Sparql, vec![]),
        ]);
        assert_eq!(dup, Err(FederationError::DuplicateMember("m".into())));
        assert!(MemberId::new("has space").is_err());
        assert!(MemberId::new("").is_err());
    }

    #[test]
    fn shared_triples_collapse_in_the_union_graph() {
        let t = triple("a", "p", iri("b"));
        let f = Federation::new(vec![
            member("one", InterfaceKind::Tpf, vec![t.clone()]),
            member("two", InterfaceKind::Tpf, vec![t]),
        ])
        .unwrap();
        assert_eq!(union_graph(&f).len(), 1);
    }

    #[test]
    fn brtpf_request_display() {
        let omega = SolutionSet::from_iter([
            SolutionMapping::new(),
            mapping(&[("y", iri("c")), ("z", Term::literal("L"))]),
        ]);
        let r = Request::BrTpf(tp1(), omega);
        assert_eq!(r.to_string(), "(?x <knows> ?y | {(); ?y=<c>, ?z=\"L\"})");
    }
}
