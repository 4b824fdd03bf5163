//! Deciding `μ ∈ ⟦B⟧F` and `μ ∈ sols(a)` without materializing results.
//!
//! [`naive_membership`] is the direct recursion: a `req` leaf checks the
//! domain and looks up the substituted triples, `mu` asks its operands, and
//! `mj` demands `dom(μ) = vars(a)` and checks the restriction of `μ` to each
//! operand's variables. That `mj` step is only exact when every operand
//! produces mappings over a single domain. With a `mu` of differently shaped
//! requests under an `mj`, e.g. `mj{mu{req tp1@m1, req tp2@m2}, req tp2@m2}`,
//! a joined mapping may use a narrower domain for one operand than its full
//! variable set, and the naive test rejects it.
//!
//! [`membership_in_sols`] fixes this by tracking the possible result domains of
//! each subexpression. For `mj` it searches for one candidate domain per
//! operand such that the restrictions of `μ` are members and the domains cover
//! `dom(μ)`. On single-domain operands this coincides with the naive test.

use std::collections::BTreeSet;

use super::{EvalContext, EvalError};
use crate::expr::{validate, Expr};
use crate::federation::{Federation, Request};
use crate::rdf::{apply_mapping, Bgp, Graph, SolutionMapping, Variable};

type Domain = BTreeSet<Variable>;

/// Decides `μ ∈ ⟦b⟧F`: the domain is `vars(b)` and every
/// substituted triple occurs in some member graph.
pub fn membership_in_bgp(mu: &SolutionMapping, b: &Bgp, federation: &Federation) -> bool {
    if !mu.has_domain(&b.vars()) {
        return false;
    }
    apply_mapping(mu, b).iter().all(|t| match t.to_triple() {
        Some(triple) => federation.members().any(|m| m.graph.contains(&triple)),
        None => false,
    })
}

fn check_assignment(a: &Expr, ctx: &EvalContext<'_>) -> Result<(), EvalError> {
    if !a.is_source_assignment() {
        return Err(EvalError::NotSourceAssignment(a.to_string()));
    }
    validate(a, ctx.federation)?;
    Ok(())
}

fn request_bgp(request: &Request) -> Bgp {
    match request {
        Request::Tp(tp) => Bgp::singleton(tp.clone()),
        Request::Bgp(b) => b.clone(),
        _ => unreachable!("source assignments only carry TP and BGP requests"),
    }
}

/// The leaf check: the domain equals the request's variables and the
/// substituted request lies inside the member's graph.
fn leaf_member(mu: &SolutionMapping, request: &Request, graph: &Graph) -> bool {
    let bgp = request_bgp(request);
    if !mu.has_domain(&bgp.vars()) {
        return false;
    }
    apply_mapping(mu, &bgp)
        .iter()
        .all(|t| t.to_triple().is_some_and(|triple| graph.contains(&triple)))
}

/// Every domain a mapping in `sols(a)` can have (an over-approximation: some
/// of these domains may have no mappings at all).
pub fn possible_domains(a: &Expr) -> BTreeSet<Domain> {
    match a {
        Expr::Req { request, .. } => BTreeSet::from([request.vars()]),
        Expr::Mu(set) => set.iter().flat_map(possible_domains).collect(),
        Expr::Mj(set) => {
            let mut acc = BTreeSet::from([Domain::new()]);
            for child in set {
                let child_domains = possible_domains(child);
                acc = acc
                    .iter()
                    .flat_map(|d| {
                        child_domains
                            .iter()
                            .map(move |c| d.union(c).cloned().collect())
                    })
                    .collect();
            }
            acc
        }
        _ => unreachable!("source assignments only use req, mj and mu"),
    }
}

/// Decides `μ ∈ sols(a)` for a source assignment `a` valid for the federation.
pub fn membership_in_sols(
    mu: &SolutionMapping,
    a: &Expr,
    ctx: &EvalContext<'_>,
) -> Result<bool, EvalError> {
    check_assignment(a, ctx)?;
    Ok(member(mu, a, ctx))
}

fn member(mu: &SolutionMapping, a: &Expr, ctx: &EvalContext<'_>) -> bool {
    match a {
        Expr::Req {
            request,
            member: id,
        } => {
            let graph = &ctx.federation.get(id).expect("validated").graph;
            leaf_member(mu, request, graph)
        }
        Expr::Mu(set) => set.iter().any(|child| member(mu, child, ctx)),
        Expr::Mj(set) => {
            let dom = mu.domain();
            if !possible_domains(a).contains(&dom) {
                return false;
            }
            // For each operand, the candidate domains whose restriction of μ
            // is a member of that operand.
            let mut candidates: Vec<Vec<Domain>> = Vec::with_capacity(set.len());
            for child in set {
                let options: Vec<Domain> = possible_domains(child)
                    .into_iter()
                    .filter(|d| d.is_subset(&dom))
                    .filter(|d| member(&mu.restrict(d), child, ctx))
                    .collect();
                if options.is_empty() {
                    return false;
                }
                candidates.push(options);
            }
            covers(&candidates, &dom, &Domain::new())
        }
        _ => unreachable!("source assignments only use req, mj and mu"),
    }
}

/// Whether one domain can be picked from each list so that their union is `target`.
fn covers(candidates: &[Vec<Domain>], target: &Domain, acc: &Domain) -> bool {
    match candidates.split_first() {
        None => acc == target,
        Some((options, rest)) => options.iter().any(|d| {
            let next: Domain = acc.union(d).cloned().collect();
            covers(rest, target, &next)
        }),
    }
}

/// The naive recursion, kept for comparison. Exact only when every `mj`
/// operand produces mappings over a single domain.
pub fn naive_membership(
    mu: &SolutionMapping,
    a: &Expr,
    ctx: &EvalContext<'_>,
) -> Result<bool, EvalError> {
    check_assignment(a, ctx)?;
    Ok(naive(mu, a, ctx))
}

fn naive(mu: &SolutionMapping, a: &Expr, ctx: &EvalContext<'_>) -> bool {
    match a {
        Expr::Req {
            request,
            member: id,
        } => {
            let graph = &ctx.federation.get(id).expect("validated").graph;
            leaf_member(mu, request, graph)
        }
        Expr::Mu(set) => set.iter().any(|child| naive(mu, child, ctx)),
        Expr::Mj(set) => {
            if !mu.has_domain(&a.vars()) {
                return false;
            }
            set.iter()
                .all(|child| naive(&mu.restrict(&child.vars()), child, ctx))
        }
        _ => unreachable!("source assignments only use req, mj and mu"),
    }
}
