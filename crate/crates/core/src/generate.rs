//! Seeded random instances for property tests and the acceptance harness:
//! graphs, federations, patterns, expressions and candidate mappings over a
//! deliberately tiny vocabulary so that joins and matches actually happen.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::Expr;
use crate::federation::{Federation, GraphPattern, InterfaceKind, Member, MemberId, Request};
use crate::rdf::{Bgp, Graph, SolutionMapping, SolutionSet, Term, Triple, TriplePattern, Variable};
use crate::selection::UndirectedGraph;

const ENTITIES: usize = 3;
const PREDICATES: usize = 2;
const VARIABLES: usize = 3;

pub fn entity(i: usize) -> Term {
    Term::iri(format!("e{i}"))
}

pub fn predicate(i: usize) -> Term {
    Term::iri(format!("p{i}"))
}

pub fn variable(i: usize) -> Variable {
    Variable::new(format!("v{i}"))
}

fn literal() -> Term {
    Term::literal("l0")
}

/// A random graph with at most `max_triples` triples. Blank nodes, if any,
/// are labelled with `blank_prefix` so that members stay disjoint.
pub fn random_graph<R: Rng>(rng: &mut R, max_triples: usize, blank_prefix: &str) -> Graph {
    let n = rng.gen_range(0..=max_triples);
    let node = |rng: &mut R| -> Term {
        if rng.gen_bool(0.1) {
            Term::blank(format!("{blank_prefix}b0"))
        } else {
            entity(rng.gen_range(0..ENTITIES))
        }
    };
    (0..n)
        .map(|_| {
            let s = node(rng);
            let p = predicate(rng.gen_range(0..PREDICATES));
            let o = if rng.gen_bool(0.15) {
                literal()
            } else {
                node(rng)
            };
            Triple::new(s, p, o).expect("generated triple is well formed")
        })
        .collect()
}

pub fn random_kind<R: Rng>(rng: &mut R) -> InterfaceKind {
    *InterfaceKind::ALL.choose(rng).unwrap()
}

/// A federation of 1..=`max_members` members named `f0`, `f1`, ...
pub fn random_federation<R: Rng>(
    rng: &mut R,
    max_members: usize,
    max_triples: usize,
) -> Federation {
    let n = rng.gen_range(1..=max_members.max(1));
    let kinds: Vec<InterfaceKind> = (0..n).map(|_| random_kind(rng)).collect();
    federation_with_kinds(rng, &kinds, max_triples)
}

/// A federation with one member per entry of `kinds`, named `f0`, `f1`, ...
pub fn federation_with_kinds<R: Rng>(
    rng: &mut R,
    kinds: &[InterfaceKind],
    max_triples: usize,
) -> Federation {
    let members = kinds
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let id = MemberId::new(format!("f{i}")).unwrap();
            Member::new(id, kind, random_graph(rng, max_triples, &format!("f{i}")))
        })
        .collect();
    Federation::new(members).expect("generated federation is valid")
}

pub fn random_tp<R: Rng>(rng: &mut R) -> TriplePattern {
    let node = |rng: &mut R| -> Term {
        if rng.gen_bool(0.7) {
            Term::Variable(variable(rng.gen_range(0..VARIABLES)))
        } else {
            entity(rng.gen_range(0..ENTITIES))
        }
    };
    let s = node(rng);
    let p = if rng.gen_bool(0.1) {
        Term::Variable(variable(rng.gen_range(0..VARIABLES)))
    } else {
        predicate(rng.gen_range(0..PREDICATES))
    };
    let o = if rng.gen_bool(0.1) {
        literal()
    } else {
        node(rng)
    };
    TriplePattern::new(s, p, o).expect("generated pattern is well formed")
}

/// A BGP of 1..=`max_patterns` patterns (duplicates collapse).
pub fn random_bgp<R: Rng>(rng: &mut R, max_patterns: usize) -> Bgp {
    let n = rng.gen_range(1..=max_patterns.max(1));
    Bgp::new((0..n).map(|_| random_tp(rng))).unwrap()
}

pub fn random_graph_pattern<R: Rng>(rng: &mut R, depth: usize) -> GraphPattern {
    if depth == 0 || rng.gen_bool(0.4) {
        return GraphPattern::Bgp(random_bgp(rng, 2));
    }
    let l = random_graph_pattern(rng, depth - 1);
    let r = random_graph_pattern(rng, depth - 1);
    if rng.gen_bool(0.5) {
        GraphPattern::and(l, r)
    } else {
        GraphPattern::union(l, r)
    }
}

/// A mapping over a random subset of `vars` with values from the vocabulary.
pub fn random_mapping<R: Rng>(rng: &mut R, vars: &[Variable]) -> SolutionMapping {
    let mut mu = SolutionMapping::new();
    for v in vars {
        if rng.gen_bool(0.7) {
            let value = if rng.gen_bool(0.15) {
                literal()
            } else {
                entity(rng.gen_range(0..ENTITIES))
            };
            mu.insert(v.clone(), value).unwrap();
        }
    }
    mu
}

pub fn random_solution_set<R: Rng>(rng: &mut R, max: usize) -> SolutionSet {
    let vars: Vec<Variable> = (0..VARIABLES).map(variable).collect();
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| random_mapping(rng, &vars)).collect()
}

fn pick_member<R: Rng>(
    rng: &mut R,
    federation: &Federation,
    pred: impl Fn(InterfaceKind) -> bool,
) -> Option<MemberId> {
    let ids: Vec<&Member> = federation.members().filter(|m| pred(m.kind)).collect();
    ids.choose(rng).map(|m| m.id.clone())
}

/// A request that `kind` accepts.
pub fn random_request_for<R: Rng>(rng: &mut R, kind: InterfaceKind) -> Request {
    let mut options = vec![0];
    if kind.supports_bgp_requests() {
        options.push(1);
    }
    if kind == InterfaceKind::Sparql {
        options.push(2);
    }
    if kind == InterfaceKind::BrTpf {
        options.push(3);
    }
    match options.choose(rng).unwrap() {
        0 => Request::Tp(random_tp(rng)),
        1 => Request::Bgp(random_bgp(rng, 3)),
        2 => Request::from_pattern(random_graph_pattern(rng, 2)),
        _ => Request::BrTpf(random_tp(rng), random_solution_set(rng, 3)),
    }
}

/// A random expression over all seven operators that is valid for `federation`.
pub fn random_expr<R: Rng>(rng: &mut R, federation: &Federation, depth: usize) -> Expr {
    let leaf = |rng: &mut R| {
        let id = pick_member(rng, federation, |_| true).unwrap();
        let kind = federation.get(&id).unwrap().kind;
        Expr::req(random_request_for(rng, kind), id)
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    match rng.gen_range(0..6) {
        0 => {
            let id = pick_member(rng, federation, InterfaceKind::supports_tp_requests).unwrap();
            Expr::tp_add(random_expr(rng, federation, depth - 1), random_tp(rng), id)
        }
        1 => match pick_member(rng, federation, InterfaceKind::supports_bgp_requests) {
            Some(id) => Expr::bgp_add(
                random_expr(rng, federation, depth - 1),
                random_bgp(rng, 2),
                id,
            ),
            None => leaf(rng),
        },
        2 => Expr::join(
            random_expr(rng, federation, depth - 1),
            random_expr(rng, federation, depth - 1),
        ),
        3 => Expr::union(
            random_expr(rng, federation, depth - 1),
            random_expr(rng, federation, depth - 1),
        ),
        k => {
            let n = rng.gen_range(1..=3);
            let items = (0..n).map(|_| random_expr(rng, federation, depth - 1));
            if k == 4 {
                Expr::mj(items.collect::<Vec<_>>())
            } else {
                Expr::mu(items.collect::<Vec<_>>())
            }
        }
    }
}

/// A random expression with arbitrary member ids (`f0`..`f3`); it need not be
/// valid for any particular federation.
pub fn random_unbound_expr<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    let id = |rng: &mut R| MemberId::new(format!("f{}", rng.gen_range(0..4))).unwrap();
    if depth == 0 || rng.gen_bool(0.25) {
        let kind = random_kind(rng);
        return Expr::req(random_request_for(rng, kind), id(rng));
    }
    match rng.gen_range(0..6) {
        0 => Expr::tp_add(random_unbound_expr(rng, depth - 1), random_tp(rng), id(rng)),
        1 => Expr::bgp_add(
            random_unbound_expr(rng, depth - 1),
            random_bgp(rng, 2),
            id(rng),
        ),
        2 => Expr::join(
            random_unbound_expr(rng, depth - 1),
            random_unbound_expr(rng, depth - 1),
        ),
        3 => Expr::union(
            random_unbound_expr(rng, depth - 1),
            random_unbound_expr(rng, depth - 1),
        ),
        k => {
            let n = rng.gen_range(1..=3);
            let items: Vec<Expr> = (0..n)
                .map(|_| random_unbound_expr(rng, depth - 1))
                .collect();
            if k == 4 {
                Expr::mj(items)
            } else {
                Expr::mu(items)
            }
        }
    }
}

/// A random source assignment (only `req`, `mj`, `mu`; TP and BGP requests)
/// valid for `federation`, whose requests use patterns from `bgp`.
pub fn random_source_assignment<R: Rng>(
    rng: &mut R,
    federation: &Federation,
    bgp: &Bgp,
    depth: usize,
) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        let id = pick_member(rng, federation, |_| true).unwrap();
        let kind = federation.get(&id).unwrap().kind;
        let tps: Vec<&TriplePattern> = bgp.iter().collect();
        if kind.supports_bgp_requests() && bgp.len() > 1 && rng.gen_bool(0.4) {
            let subset: Vec<TriplePattern> = tps
                .iter()
                .filter(|_| rng.gen_bool(0.6))
                .map(|tp| (*tp).clone())
                .collect();
            if let Ok(sub) = Bgp::new(subset) {
                return Expr::req_bgp(sub, id);
            }
        }
        return Expr::req_tp((*tps.choose(rng).unwrap()).clone(), id);
    }
    let n = rng.gen_range(1..=3);
    let items: Vec<Expr> = (0..n)
        .map(|_| random_source_assignment(rng, federation, bgp, depth - 1))
        .collect();
    if rng.gen_bool(0.5) {
        Expr::mj(items)
    } else {
        Expr::mu(items)
    }
}

/// A random undirected graph on vertices `v0`.. with at least one edge.
pub fn random_undirected_graph<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
    max_edges: usize,
) -> UndirectedGraph {
    let n = rng.gen_range(2..=max_vertices.max(2));
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut all_pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            all_pairs.push((vertices[i].clone(), vertices[j].clone()));
        }
    }
    all_pairs.shuffle(rng);
    let m = rng.gen_range(1..=max_edges.max(1).min(all_pairs.len()));
    all_pairs.truncate(m);
    UndirectedGraph::new(vertices, all_pairs).expect("generated labels are valid")
}

/// The federation used for rule instances: two SPARQL members, one TPF and
/// one brTPF (`f0`..`f3`), so every rule has a member that satisfies it.
pub fn rule_federation<R: Rng>(rng: &mut R, max_triples: usize) -> Federation {
    use InterfaceKind::*;
    federation_with_kinds(rng, &[Sparql, Sparql, Tpf, BrTpf], max_triples)
}

/// A triple pattern whose variables are among those of `tp`.
fn narrower_tp<R: Rng>(rng: &mut R, tp: &TriplePattern) -> TriplePattern {
    let mut terms = tp.terms().map(Clone::clone);
    for t in terms.iter_mut() {
        if t.is_variable() && rng.gen_bool(0.3) {
            *t = entity(rng.gen_range(0..ENTITIES));
        }
    }
    let [s, p, o] = terms;
    TriplePattern::new(s, p, o).unwrap_or_else(|_| tp.clone())
}

/// An expression shaped like the left side of catalog rule `number` (1..=38),
/// valid for a federation from [`rule_federation`]. Side conditions that
/// depend on data may still fail; callers retry.
pub fn random_rule_instance<R: Rng>(rng: &mut R, f: &Federation, number: u8) -> Expr {
    let phi = |rng: &mut R| random_expr(rng, f, 2);
    let any = |rng: &mut R| pick_member(rng, f, InterfaceKind::supports_tp_requests).unwrap();
    let sparql = |rng: &mut R| pick_member(rng, f, |k| k == InterfaceKind::Sparql).unwrap();
    let brtpf = |rng: &mut R| pick_member(rng, f, |k| k == InterfaceKind::BrTpf).unwrap();
    let bgp2 = |rng: &mut R| loop {
        let b = random_bgp(rng, 3);
        if b.len() >= 2 {
            return b;
        }
    };
    let pattern_req = |rng: &mut R, m: &MemberId| match rng.gen_range(0..3) {
        0 => Expr::req_tp(random_tp(rng), m.clone()),
        1 => Expr::req_bgp(random_bgp(rng, 2), m.clone()),
        _ => Expr::req(
            Request::from_pattern(random_graph_pattern(rng, 2)),
            m.clone(),
        ),
    };
    let operands = |rng: &mut R, lo: usize| -> Vec<Expr> {
        let n = rng.gen_range(lo..=3);
        (0..n).map(|_| random_expr(rng, f, 1)).collect()
    };
    match number {
        1 => Expr::join(Expr::req_tp(random_tp(rng), any(rng)), phi(rng)),
        2 => Expr::join(
            Expr::req_tp(random_tp(rng), any(rng)),
            Expr::join(phi(rng), phi(rng)),
        ),
        3 => Expr::join(Expr::req_bgp(random_bgp(rng, 2), sparql(rng)), phi(rng)),
        4 => Expr::join(
            Expr::req_bgp(random_bgp(rng, 2), sparql(rng)),
            Expr::join(phi(rng), phi(rng)),
        ),
        5 => {
            let m = sparql(rng);
            Expr::join(
                Expr::req_bgp(random_bgp(rng, 2), m.clone()),
                Expr::req_bgp(random_bgp(rng, 2), m),
            )
        }
        6 => {
            let m = sparql(rng);
            Expr::bgp_add(
                Expr::req_bgp(random_bgp(rng, 2), m.clone()),
                random_bgp(rng, 2),
                m,
            )
        }
        7 => {
            let m = sparql(rng);
            let inner = Expr::bgp_add(phi(rng), random_bgp(rng, 2), m.clone());
            Expr::bgp_add(inner, random_bgp(rng, 2), m)
        }
        8 => Expr::req_tp(random_tp(rng), sparql(rng)),
        9 | 10 => Expr::req_bgp(bgp2(rng), sparql(rng)),
        11 => Expr::bgp_add(phi(rng), random_bgp(rng, 3), sparql(rng)),
        12 => {
            let m = sparql(rng);
            Expr::bgp_add(
                Expr::req_tp(random_tp(rng), m.clone()),
                random_bgp(rng, 2),
                m,
            )
        }
        13 => {
            let m = sparql(rng);
            Expr::tp_add(
                Expr::req_bgp(random_bgp(rng, 2), m.clone()),
                random_tp(rng),
                m,
            )
        }
        14 => {
            let m = sparql(rng);
            let inner = Expr::bgp_add(phi(rng), random_bgp(rng, 2), m.clone());
            Expr::tp_add(inner, random_tp(rng), m)
        }
        15 | 16 => {
            let tp = random_tp(rng);
            let n = rng.gen_range(1..=2);
            let reqs: Vec<Expr> = (0..n)
                .map(|_| Expr::req_tp(narrower_tp(rng, &tp), any(rng)))
                .collect();
            let input = if reqs.len() == 1 {
                reqs[0].clone()
            } else {
                Expr::mu(reqs)
            };
            if number == 15 {
                Expr::join(Expr::req_tp(tp, brtpf(rng)), input)
            } else {
                Expr::tp_add(input, tp, brtpf(rng))
            }
        }
        17 => Expr::req(Request::Pattern(random_compound_pattern(rng)), sparql(rng)),
        18 | 19 => {
            let m = sparql(rng);
            let (l, r) = (pattern_req(rng, &m), pattern_req(rng, &m));
            if number == 18 {
                Expr::union(l, r)
            } else {
                Expr::join(l, r)
            }
        }
        20 => {
            let m = sparql(rng);
            Expr::tp_add(pattern_req(rng, &m), random_tp(rng), m)
        }
        21 => {
            let m = sparql(rng);
            Expr::bgp_add(pattern_req(rng, &m), random_bgp(rng, 2), m)
        }
        22 => {
            let inner = Expr::tp_add(phi(rng), random_tp(rng), any(rng));
            Expr::tp_add(inner, random_tp(rng), any(rng))
        }
        23 => {
            let inner = Expr::bgp_add(phi(rng), random_bgp(rng, 2), sparql(rng));
            Expr::tp_add(inner, random_tp(rng), any(rng))
        }
        24 => {
            let inner = Expr::bgp_add(phi(rng), random_bgp(rng, 2), sparql(rng));
            Expr::bgp_add(inner, random_bgp(rng, 2), sparql(rng))
        }
        25 => Expr::mj(operands(rng, 2)),
        26 => Expr::mu(operands(rng, 2)),
        27 | 28 => {
            let (a, b) = (random_expr(rng, f, 1), random_expr(rng, f, 1));
            let mut items = operands(rng, 0);
            if number == 27 {
                items.push(Expr::join(a, b));
                Expr::mj(items)
            } else {
                items.push(Expr::union(a, b));
                Expr::mu(items)
            }
        }
        29 | 30 => {
            let inner = operands(rng, 1);
            let mut items = operands(rng, 0);
            if number == 29 {
                items.push(Expr::mj(inner));
                Expr::mj(items)
            } else {
                items.push(Expr::mu(inner));
                Expr::mu(items)
            }
        }
        31 => Expr::mu([phi(rng)]),
        32 => Expr::mj([phi(rng)]),
        33 => Expr::join(phi(rng), phi(rng)),
        34 => Expr::union(phi(rng), phi(rng)),
        35 => {
            let p = phi(rng);
            Expr::union(p.clone(), p)
        }
        36 => Expr::join(phi(rng), Expr::join(phi(rng), phi(rng))),
        37 => Expr::union(phi(rng), Expr::union(phi(rng), phi(rng))),
        38 => Expr::join(phi(rng), Expr::union(phi(rng), phi(rng))),
        _ => panic!("no catalog rule numbered {number}"),
    }
}

/// A graph pattern with at least one `and` or `unionp`.
fn random_compound_pattern<R: Rng>(rng: &mut R) -> GraphPattern {
    loop {
        let p = random_graph_pattern(rng, 3);
        if !matches!(p, GraphPattern::Bgp(_)) {
            return p;
        }
    }
}
