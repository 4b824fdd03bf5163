//! A small three-member federation used throughout the tests and docs.
//!
//! * `m1` (brTPF): `<a> <knows> <c>`
//! * `m2` (TPF): `<c> <name> "Lee"`, `<d> <name> "Alice"`
//! * `m3` (SPARQL): `<a> <knows> <b>`, `<b> <name> "Peter"`
//!
//! The query is `{?x <knows> ?y . ?y <name> ?z}` with answers [`mu1`] and [`mu2`].

use crate::federation::{Federation, InterfaceKind, Member, MemberId};
use crate::rdf::{Bgp, Graph, SolutionMapping, Term, Triple, TriplePattern, Variable};

fn triple(s: &str, p: &str, o: Term) -> Triple {
    Triple::new(Term::iri(s), Term::iri(p), o).expect("well-formed sample triple")
}

pub fn member_id(id: &str) -> MemberId {
    MemberId::new(id).expect("valid sample member id")
}

pub fn g1() -> Graph {
    Graph::from_iter([triple("a", "knows", Term::iri("c"))])
}

pub fn g2() -> Graph {
    Graph::from_iter([
        triple("c", "name", Term::literal("Lee")),
        triple("d", "name", Term::literal("Alice")),
    ])
}

pub fn g3() -> Graph {
    Graph::from_iter([
        triple("a", "knows", Term::iri("b")),
        triple("b", "name", Term::literal("Peter")),
    ])
}

pub fn federation() -> Federation {
    Federation::new(vec![
        Member::new(member_id("m1"), InterfaceKind::BrTpf, g1()),
        Member::new(member_id("m2"), InterfaceKind::Tpf, g2()),
        Member::new(member_id("m3"), InterfaceKind::Sparql, g3()),
    ])
    .expect("sample federation is valid")
}

/// `?x <knows> ?y`
pub fn tp1() -> TriplePattern {
    TriplePattern::new(Term::var("x"), Term::iri("knows"), Term::var("y")).unwrap()
}

/// `?y <name> ?z`
pub fn tp2() -> TriplePattern {
    TriplePattern::new(Term::var("y"), Term::iri("name"), Term::var("z")).unwrap()
}

pub fn bgp() -> Bgp {
    Bgp::new([tp1(), tp2()]).unwrap()
}

fn mapping(pairs: [(&str, Term); 3]) -> SolutionMapping {
    SolutionMapping::from_pairs(pairs.map(|(v, t)| (Variable::new(v), t))).unwrap()
}

/// `{?x=<a>, ?y=<c>, ?z="Lee"}`
pub fn mu1() -> SolutionMapping {
    mapping([
        ("x", Term::iri("a")),
        ("y", Term::iri("c")),
        ("z", Term::literal("Lee")),
    ])
}

/// `{?x=<a>, ?y=<b>, ?z="Peter"}`
pub fn mu2() -> SolutionMapping {
    mapping([
        ("x", Term::iri("a")),
        ("y", Term::iri("b")),
        ("z", Term::literal("Peter")),
    ])
}
