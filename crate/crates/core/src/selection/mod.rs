//! Source selection: exhaustive assignments, sa-cost, the joins-over-unions
//! classes, bounded searches for minimal correct assignments, the decision
//! problem, and the node-cover reduction used to show its hardness.

use thiserror::Error;

use crate::eval::EvalError;
use crate::expr::Expr;
use crate::federation::{Federation, FederationError, Request};
use crate::rdf::Bgp;

mod reduction;
mod search;

pub use reduction::{
    min_node_cover, min_node_cover_with_cap, node_cover_reduce, parse_undirected_graph, Reduction,
    UndirectedGraph, DEFAULT_COVER_CAP,
};
pub use search::{
    decide_source_selection, enumerate_assignments, find_minimal, find_minimal_in_class,
    CandidateSpace, Class,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SelectionError {
    #[error(transparent)]
    Federation(#[from] FederationError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("cost bound must be a positive integer, got {0}")]
    InvalidBound(usize),
    #[error("graph has {vertices} vertices, more than the cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
    #[error("line {line}: {message}")]
    GraphSyntax { line: usize, message: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
}

/// `mj` over the patterns of `b`, each a `mu` of one triple pattern request
/// per member.
pub fn exhaustive_assignment(b: &Bgp, f: &Federation) -> Result<Expr, SelectionError> {
    f.require_triple_pattern_accessible()?;
    Ok(Expr::mj(b.iter().map(|tp| {
        Expr::mu(f.member_ids().map(|m| Expr::req_tp(tp.clone(), m.clone())))
    })))
}

/// Number of `req` occurrences.
pub fn sa_cost(a: &Expr) -> usize {
    a.req_count()
}

fn is_req(a: &Expr) -> bool {
    matches!(
        a,
        Expr::Req {
            request: Request::Tp(_) | Request::Bgp(_),
            ..
        }
    )
}

fn is_union_of_reqs(a: &Expr) -> bool {
    is_req(a) || matches!(a, Expr::Mu(set) if set.iter().all(is_req))
}

/// Membership in the joins-over-unions class: a request, a `mu` of requests,
/// or an `mj` of those.
pub fn in_class_joins_over_unions(a: &Expr) -> bool {
    is_union_of_reqs(a) || matches!(a, Expr::Mj(set) if set.iter().all(is_union_of_reqs))
}

/// Membership in the restricted class: every `mu` of requests repeats one
/// request, and the operands of a top-level `mj` mention disjoint triple
/// patterns.
pub fn in_class_restricted(a: &Expr) -> bool {
    if !in_class_joins_over_unions(a) {
        return false;
    }
    let uniform = a.subexprs().into_iter().all(|s| match s {
        Expr::Mu(set) => {
            let mut requests = set.iter().map(|r| match r {
                Expr::Req { request, .. } => request,
                _ => unreachable!("class membership checked above"),
            });
            let first = requests.next().expect("nonempty operand set");
            requests.all(|r| r == first)
        }
        _ => true,
    });
    if !uniform {
        return false;
    }
    match a {
        Expr::Mj(set) => {
            let tps: Vec<_> = set.iter().map(Expr::tps).collect();
            tps.iter()
                .enumerate()
                .all(|(i, x)| tps[i + 1..].iter().all(|y| x.is_disjoint(y)))
        }
        _ => true,
    }
}
