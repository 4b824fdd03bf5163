//! Matchers for the equivalence catalog. Each matcher inspects one
//! subexpression and returns the bindings and replacement of every way the
//! rule applies there.

use std::collections::BTreeSet;

use super::{Binding, Bindings};
use crate::eval::EvalContext;
use crate::expr::{Expr, ExprSet};
use crate::federation::{Federation, GraphPattern, InterfaceKind, MemberId, Request};
use crate::rdf::{Bgp, TriplePattern};

pub(crate) struct MatchCtx<'a> {
    pub federation: &'a Federation,
    pub eval: EvalContext<'a>,
}

pub(crate) type Found = Vec<(Bindings, Expr)>;
pub(crate) type Matcher = fn(&Expr, &MatchCtx<'_>) -> Found;

fn kind(cx: &MatchCtx<'_>, m: &MemberId) -> Option<InterfaceKind> {
    cx.federation.get(m).map(|member| member.kind)
}

fn tp_ok(cx: &MatchCtx<'_>, m: &MemberId) -> bool {
    kind(cx, m).is_some_and(InterfaceKind::supports_tp_requests)
}

fn bgp_ok(cx: &MatchCtx<'_>, m: &MemberId) -> bool {
    kind(cx, m).is_some_and(InterfaceKind::supports_bgp_requests)
}

fn both_ok(cx: &MatchCtx<'_>, m: &MemberId) -> bool {
    tp_ok(cx, m) && bgp_ok(cx, m)
}

fn is_kind(cx: &MatchCtx<'_>, m: &MemberId, k: InterfaceKind) -> bool {
    kind(cx, m) == Some(k)
}

fn req_tp(e: &Expr) -> Option<(&TriplePattern, &MemberId)> {
    match e {
        Expr::Req {
            request: Request::Tp(tp),
            member,
        } => Some((tp, member)),
        _ => None,
    }
}

fn req_bgp(e: &Expr) -> Option<(&Bgp, &MemberId)> {
    match e {
        Expr::Req {
            request: Request::Bgp(b),
            member,
        } => Some((b, member)),
        _ => None,
    }
}

/// A request with a SPARQL graph pattern reading (TP, BGP or pattern).
fn req_pattern(e: &Expr) -> Option<(GraphPattern, &MemberId)> {
    match e {
        Expr::Req { request, member } => request.as_pattern().map(|p| (p, member)),
        _ => None,
    }
}

fn req_pattern_and(e: &Expr) -> Option<(&GraphPattern, &GraphPattern, &MemberId)> {
    match e {
        Expr::Req {
            request: Request::Pattern(GraphPattern::And(l, r)),
            member,
        } => Some((l, r, member)),
        _ => None,
    }
}

fn req_pattern_union(e: &Expr) -> Option<(&GraphPattern, &GraphPattern, &MemberId)> {
    match e {
        Expr::Req {
            request: Request::Pattern(GraphPattern::Union(l, r)),
            member,
        } => Some((l, r, member)),
        _ => None,
    }
}

fn bind() -> Bindings {
    Bindings::default()
}

fn one(bindings: Bindings, e: Expr) -> Found {
    vec![(bindings, e)]
}

fn join_tree(items: impl IntoIterator<Item = Expr>) -> Expr {
    let mut it = items.into_iter();
    let first = it.next().expect("nonempty");
    it.fold(first, Expr::join)
}

fn tp_chain(base: Expr, tps: impl IntoIterator<Item = TriplePattern>, m: &MemberId) -> Expr {
    tps.into_iter()
        .fold(base, |acc, tp| Expr::tp_add(acc, tp, m.clone()))
}

// (1) join(req tp@m, φ) ≡ tpAdd(φ, tp)@m

pub(crate) fn r1_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Join(l, phi) = e else { return vec![] };
    let Some((tp, m)) = req_tp(l) else {
        return vec![];
    };
    if !tp_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("tp", tp).with("m", m).with("phi", &**phi),
        Expr::tp_add((**phi).clone(), tp.clone(), m.clone()),
    )
}

pub(crate) fn r1_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::TpAdd {
        input,
        tp,
        member: m,
    } = e
    else {
        return vec![];
    };
    if !tp_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("tp", tp).with("m", m).with("phi", &**input),
        Expr::join(Expr::req_tp(tp.clone(), m.clone()), (**input).clone()),
    )
}

// (2) join(req tp@m, join(φ, φ')) ≡ join(tpAdd(φ, tp)@m, φ')

pub(crate) fn r2_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Join(l, r) = e else { return vec![] };
    let Some((tp, m)) = req_tp(l) else {
        return vec![];
    };
    let Expr::Join(phi, phi2) = &**r else {
        return vec![];
    };
    if !tp_ok(cx, m) {
        return vec![];
    }
    one(
        bind()
            .with("tp", tp)
            .with("m", m)
            .with("phi", &**phi)
            .with("phi'", &**phi2),
        Expr::join(
            Expr::tp_add((**phi).clone(), tp.clone(), m.clone()),
            (**phi2).clone(),
        ),
    )
}

pub(crate) fn r2_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Join(l, phi2) = e else {
        return vec![];
    };
    let Expr::TpAdd {
        input: phi,
        tp,
        member: m,
    } = &**l
    else {
        return vec![];
    };
    if !tp_ok(cx, m) {
        return vec![];
    }
    one(
        bind()
            .with("tp", tp)
            .with("m", m)
            .with("phi", &**phi)
            .with("phi'", &**phi2),
        Expr::join(
            Expr::req_tp(tp.clone(), m.clone()),
            Expr::join((**phi).clone(), (**phi2).clone()),
        ),
    )
}

// (3) join(req B@m, φ) ≡ bgpAdd(φ, B)@m

pub(crate) fn r3_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Join(l, phi) = e else { return vec![] };
    let Some((b, m)) = req_bgp(l) else {
        return vec![];
    };
    if !bgp_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("B", b).with("m", m).with("phi", &**phi),
        Expr::bgp_add((**phi).clone(), b.clone(), m.clone()),
    )
}

pub(crate) fn r3_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input,
        bgp,
        member: m,
    } = e
    else {
        return vec![];
    };
    if !bgp_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("B", bgp).with("m", m).with("phi", &**input),
        Expr::join(Expr::req_bgp(bgp.clone(), m.clone()), (**input).clone()),
    )
}

// (4) join(req B@m, join(φ, φ')) ≡ join(bgpAdd(φ, B)@m, φ')

pub(crate) fn r4_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Join(l, r) = e else { return vec![] };
    let Some((b, m)) = req_bgp(l) else {
        return vec![];
    };
    let Expr::Join(phi, phi2) = &**r else {
        return vec![];
    };
    if !bgp_ok(cx, m) {
        return vec![];
    }
    one(
        bind()
            .with("B", b)
            .with("m", m)
            .with("phi", &**phi)
            .with("phi'", &**phi2),
        Expr::join(
            Expr::bgp_add((**phi).clone(), b.clone(), m.clone()),
            (**phi2).clone(),
        ),
    )
}

pub(crate) fn r4_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Join(l, phi2) = e else {
        return vec![];
    };
    let Expr::BgpAdd {
        input: phi,
        bgp,
        member: m,
    } = &**l
    else {
        return vec![];
    };
    if !bgp_ok(cx, m) {
        return vec![];
    }
    one(
        bind()
            .with("B", bgp)
            .with("m", m)
            .with("phi", &**phi)
            .with("phi'", &**phi2),
        Expr::join(
            Expr::req_bgp(bgp.clone(), m.clone()),
            Expr::join((**phi).clone(), (**phi2).clone()),
        ),
    )
}

// (5) join(req B1@m, req B2@m) ≡ req B'@m

pub(crate) fn r5_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Join(l, r) = e else { return vec![] };
    let (Some((b1, m)), Some((b2, m2))) = (req_bgp(l), req_bgp(r)) else {
        return vec![];
    };
    if m != m2 || !bgp_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("B1", b1).with("B2", b2).with("m", m),
        Expr::req_bgp(b1.union(b2), m.clone()),
    )
}

pub(crate) fn r5_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((b, m)) = req_bgp(e) else {
        return vec![];
    };
    if !bgp_ok(cx, m) {
        return vec![];
    }
    b.splits()
        .into_iter()
        .map(|(b1, b2)| {
            (
                bind().with("B1", &b1).with("B2", &b2).with("m", m),
                Expr::join(Expr::req_bgp(b1, m.clone()), Expr::req_bgp(b2, m.clone())),
            )
        })
        .collect()
}

// (6) bgpAdd(req B2@m, B1)@m ≡ req B'@m

pub(crate) fn r6_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input,
        bgp: b1,
        member: m,
    } = e
    else {
        return vec![];
    };
    let Some((b2, m2)) = req_bgp(input) else {
        return vec![];
    };
    if m != m2 || !bgp_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("B1", b1).with("B2", b2).with("m", m),
        Expr::req_bgp(b1.union(b2), m.clone()),
    )
}

pub(crate) fn r6_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((b, m)) = req_bgp(e) else {
        return vec![];
    };
    if !bgp_ok(cx, m) {
        return vec![];
    }
    b.splits()
        .into_iter()
        .map(|(b1, b2)| {
            (
                bind().with("B1", &b1).with("B2", &b2).with("m", m),
                Expr::bgp_add(Expr::req_bgp(b2, m.clone()), b1, m.clone()),
            )
        })
        .collect()
}

// (7) bgpAdd(bgpAdd(φ, B2)@m, B1)@m ≡ bgpAdd(φ, B')@m

pub(crate) fn r7_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input,
        bgp: b1,
        member: m,
    } = e
    else {
        return vec![];
    };
    let Expr::BgpAdd {
        input: phi,
        bgp: b2,
        member: m2,
    } = &**input
    else {
        return vec![];
    };
    if m != m2 || !bgp_ok(cx, m) {
        return vec![];
    }
    one(
        bind()
            .with("B1", b1)
            .with("B2", b2)
            .with("m", m)
            .with("phi", &**phi),
        Expr::bgp_add((**phi).clone(), b1.union(b2), m.clone()),
    )
}

pub(crate) fn r7_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input: phi,
        bgp,
        member: m,
    } = e
    else {
        return vec![];
    };
    if !bgp_ok(cx, m) {
        return vec![];
    }
    bgp.splits()
        .into_iter()
        .map(|(b1, b2)| {
            (
                bind()
                    .with("B1", &b1)
                    .with("B2", &b2)
                    .with("m", m)
                    .with("phi", &**phi),
                Expr::bgp_add(Expr::bgp_add((**phi).clone(), b2, m.clone()), b1, m.clone()),
            )
        })
        .collect()
}

// (8) req tp@m ≡ req {tp}@m

pub(crate) fn r8_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((tp, m)) = req_tp(e) else {
        return vec![];
    };
    if !both_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("tp", tp).with("m", m),
        Expr::req_bgp(Bgp::singleton(tp.clone()), m.clone()),
    )
}

pub(crate) fn r8_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((b, m)) = req_bgp(e) else {
        return vec![];
    };
    if b.len() != 1 || !both_ok(cx, m) {
        return vec![];
    }
    let tp = b.iter().next().unwrap();
    one(
        bind().with("tp", tp).with("m", m),
        Expr::req_tp(tp.clone(), m.clone()),
    )
}

// (9) req B@m ≡ join(...join(req tp1@m, req tp2@m)..., req tpn@m)

pub(crate) fn r9_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((b, m)) = req_bgp(e) else {
        return vec![];
    };
    if b.len() < 2 || !both_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("B", b).with("m", m),
        join_tree(b.iter().map(|tp| Expr::req_tp(tp.clone(), m.clone()))),
    )
}

fn join_leaves<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::Join(l, r) => {
            join_leaves(l, out);
            join_leaves(r, out);
        }
        other => out.push(other),
    }
}

pub(crate) fn r9_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    if !matches!(e, Expr::Join(..)) {
        return vec![];
    }
    let mut leaves = Vec::new();
    join_leaves(e, &mut leaves);
    let Some((_, m)) = req_tp(leaves[0]) else {
        return vec![];
    };
    let mut tps = Vec::new();
    for leaf in &leaves {
        match req_tp(leaf) {
            Some((tp, m2)) if m2 == m => tps.push(tp.clone()),
            _ => return vec![],
        }
    }
    if !both_ok(cx, m) {
        return vec![];
    }
    let b = Bgp::new(tps).unwrap();
    one(
        bind().with("B", &b).with("m", m),
        Expr::req_bgp(b, m.clone()),
    )
}

// (10) req B@m ≡ tpAdd(...tpAdd(req tp1@m, tp2)@m..., tpn)@m

pub(crate) fn r10_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((b, m)) = req_bgp(e) else {
        return vec![];
    };
    if b.len() < 2 || !both_ok(cx, m) {
        return vec![];
    }
    let mut tps = b.iter().cloned();
    let base = Expr::req_tp(tps.next().unwrap(), m.clone());
    one(bind().with("B", b).with("m", m), tp_chain(base, tps, m))
}

pub(crate) fn r10_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::TpAdd { member: m, .. } = e else {
        return vec![];
    };
    let mut tps = Vec::new();
    let mut cur = e;
    while let Expr::TpAdd { input, tp, member } = cur {
        if member != m {
            return vec![];
        }
        tps.push(tp.clone());
        cur = input;
    }
    match req_tp(cur) {
        Some((tp, m2)) if m2 == m => tps.push(tp.clone()),
        _ => return vec![],
    }
    if !both_ok(cx, m) {
        return vec![];
    }
    let b = Bgp::new(tps).unwrap();
    one(
        bind().with("B", &b).with("m", m),
        Expr::req_bgp(b, m.clone()),
    )
}

// (11) bgpAdd(φ, B)@m ≡ tpAdd(...tpAdd(φ, tp1)@m..., tpn)@m

pub(crate) fn r11_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input,
        bgp,
        member: m,
    } = e
    else {
        return vec![];
    };
    if !both_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("B", bgp).with("m", m).with("phi", &**input),
        tp_chain((**input).clone(), bgp.iter().cloned(), m),
    )
}

/// Collapses the top `k` operators of a `tpAdd` chain at one member, for
/// every possible `k`.
pub(crate) fn r11_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::TpAdd { member: m, .. } = e else {
        return vec![];
    };
    if !both_ok(cx, m) {
        return vec![];
    }
    let mut out = Vec::new();
    let mut tps = Vec::new();
    let mut cur = e;
    while let Expr::TpAdd { input, tp, member } = cur {
        if member != m {
            break;
        }
        tps.push(tp.clone());
        let b = Bgp::new(tps.iter().cloned()).unwrap();
        out.push((
            bind().with("B", &b).with("m", m).with("phi", &**input),
            Expr::bgp_add((**input).clone(), b, m.clone()),
        ));
        cur = input;
    }
    out
}

// (12) bgpAdd(req tp@m, B)@m ≡ req B ∪ {tp}@m

pub(crate) fn r12_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input,
        bgp,
        member: m,
    } = e
    else {
        return vec![];
    };
    let Some((tp, m2)) = req_tp(input) else {
        return vec![];
    };
    if m != m2 || !both_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("B", bgp).with("tp", tp).with("m", m),
        Expr::req_bgp(bgp.with(tp.clone()), m.clone()),
    )
}

fn pick_one(b: &Bgp) -> Vec<(TriplePattern, Bgp)> {
    b.iter()
        .filter_map(|tp| b.without(tp).map(|rest| (tp.clone(), rest)))
        .collect()
}

pub(crate) fn r12_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((b, m)) = req_bgp(e) else {
        return vec![];
    };
    if !both_ok(cx, m) {
        return vec![];
    }
    pick_one(b)
        .into_iter()
        .map(|(tp, rest)| {
            (
                bind().with("B", &rest).with("tp", &tp).with("m", m),
                Expr::bgp_add(Expr::req_tp(tp, m.clone()), rest, m.clone()),
            )
        })
        .collect()
}

// (13) tpAdd(req B@m, tp)@m ≡ req B ∪ {tp}@m

pub(crate) fn r13_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::TpAdd {
        input,
        tp,
        member: m,
    } = e
    else {
        return vec![];
    };
    let Some((b, m2)) = req_bgp(input) else {
        return vec![];
    };
    if m != m2 || !both_ok(cx, m) {
        return vec![];
    }
    one(
        bind().with("B", b).with("tp", tp).with("m", m),
        Expr::req_bgp(b.with(tp.clone()), m.clone()),
    )
}

pub(crate) fn r13_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((b, m)) = req_bgp(e) else {
        return vec![];
    };
    if !both_ok(cx, m) {
        return vec![];
    }
    pick_one(b)
        .into_iter()
        .map(|(tp, rest)| {
            (
                bind().with("B", &rest).with("tp", &tp).with("m", m),
                Expr::tp_add(Expr::req_bgp(rest, m.clone()), tp, m.clone()),
            )
        })
        .collect()
}

// (14) tpAdd(bgpAdd(φ, B)@m, tp)@m ≡ bgpAdd(φ, B ∪ {tp})@m

pub(crate) fn r14_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::TpAdd {
        input,
        tp,
        member: m,
    } = e
    else {
        return vec![];
    };
    let Expr::BgpAdd {
        input: phi,
        bgp,
        member: m2,
    } = &**input
    else {
        return vec![];
    };
    if m != m2 || !both_ok(cx, m) {
        return vec![];
    }
    one(
        bind()
            .with("B", bgp)
            .with("tp", tp)
            .with("m", m)
            .with("phi", &**phi),
        Expr::bgp_add((**phi).clone(), bgp.with(tp.clone()), m.clone()),
    )
}

pub(crate) fn r14_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input: phi,
        bgp,
        member: m,
    } = e
    else {
        return vec![];
    };
    if !both_ok(cx, m) {
        return vec![];
    }
    pick_one(bgp)
        .into_iter()
        .map(|(tp, rest)| {
            (
                bind()
                    .with("B", &rest)
                    .with("tp", &tp)
                    .with("m", m)
                    .with("phi", &**phi),
                Expr::tp_add(
                    Expr::bgp_add((**phi).clone(), rest, m.clone()),
                    tp,
                    m.clone(),
                ),
            )
        })
        .collect()
}

// (15) join(req tp@m, φ) ≡ req (tp, Ω)@m and (16) tpAdd(φ, tp)@m ≡ req (tp, Ω)@m,
// with Ω = sols(φ). Only applied when Ω is nonempty and binds no variable
// outside vars(tp); otherwise the two sides differ.

fn brtpf_request(tp: &TriplePattern, m: &MemberId, phi: &Expr, cx: &MatchCtx<'_>) -> Found {
    if !is_kind(cx, m, InterfaceKind::BrTpf) {
        return vec![];
    }
    let Ok(omega) = cx.eval.sols(phi) else {
        return vec![];
    };
    let vars = tp.vars();
    if omega.is_empty() || !omega.iter().all(|mu| mu.domain().is_subset(&vars)) {
        return vec![];
    }
    one(
        bind()
            .with("tp", tp)
            .with("m", m)
            .with("phi", phi)
            .with("Omega", &omega),
        Expr::req(Request::BrTpf(tp.clone(), omega), m.clone()),
    )
}

pub(crate) fn r15_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Join(l, phi) = e else { return vec![] };
    let Some((tp, m)) = req_tp(l) else {
        return vec![];
    };
    brtpf_request(tp, m, phi, cx)
}

pub(crate) fn r16_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::TpAdd {
        input,
        tp,
        member: m,
    } = e
    else {
        return vec![];
    };
    brtpf_request(tp, m, input, cx)
}

// (17) req P1@m ≡ req P2@m for equivalent patterns, via normal forms.

pub(crate) fn r17_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Req {
        request: Request::Pattern(p),
        member: m,
    } = e
    else {
        return vec![];
    };
    if !is_kind(cx, m, InterfaceKind::Sparql) {
        return vec![];
    }
    let normal = super::normalize_graph_pattern(p);
    if &normal == p {
        return vec![];
    }
    one(
        bind().with("P1", p).with("P2", &normal).with("m", m),
        Expr::req(Request::from_pattern(normal), m.clone()),
    )
}

// (18) union(req P1@m, req P2@m) ≡ req (P1 UNION P2)@m
// (19) join(req P1@m, req P2@m) ≡ req (P1 AND P2)@m

fn binary_pattern(
    l: &Expr,
    r: &Expr,
    cx: &MatchCtx<'_>,
    op: fn(GraphPattern, GraphPattern) -> GraphPattern,
) -> Found {
    let (Some((p1, m)), Some((p2, m2))) = (req_pattern(l), req_pattern(r)) else {
        return vec![];
    };
    if m != m2 || !is_kind(cx, m, InterfaceKind::Sparql) {
        return vec![];
    }
    one(
        bind().with("P1", &p1).with("P2", &p2).with("m", m),
        Expr::req(Request::Pattern(op(p1, p2)), m.clone()),
    )
}

fn split_pattern(
    p1: &GraphPattern,
    p2: &GraphPattern,
    m: &MemberId,
    cx: &MatchCtx<'_>,
    op: fn(Expr, Expr) -> Expr,
) -> Found {
    if !is_kind(cx, m, InterfaceKind::Sparql) {
        return vec![];
    }
    one(
        bind().with("P1", p1).with("P2", p2).with("m", m),
        op(
            Expr::req(Request::from_pattern(p1.clone()), m.clone()),
            Expr::req(Request::from_pattern(p2.clone()), m.clone()),
        ),
    )
}

pub(crate) fn r18_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Union(l, r) = e else { return vec![] };
    binary_pattern(l, r, cx, GraphPattern::union)
}

pub(crate) fn r18_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((p1, p2, m)) = req_pattern_union(e) else {
        return vec![];
    };
    split_pattern(p1, p2, m, cx, Expr::union)
}

pub(crate) fn r19_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::Join(l, r) = e else { return vec![] };
    binary_pattern(l, r, cx, GraphPattern::and)
}

pub(crate) fn r19_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((p1, p2, m)) = req_pattern_and(e) else {
        return vec![];
    };
    split_pattern(p1, p2, m, cx, Expr::join)
}

// (20) tpAdd(req P@m, tp)@m ≡ req (P AND tp)@m
// (21) bgpAdd(req P@m, B)@m ≡ req (P AND B)@m

pub(crate) fn r20_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::TpAdd {
        input,
        tp,
        member: m,
    } = e
    else {
        return vec![];
    };
    let Some((p, m2)) = req_pattern(input) else {
        return vec![];
    };
    if m != m2 || !is_kind(cx, m, InterfaceKind::Sparql) {
        return vec![];
    }
    let pattern = GraphPattern::and(p.clone(), GraphPattern::Bgp(Bgp::singleton(tp.clone())));
    one(
        bind().with("P", &p).with("tp", tp).with("m", m),
        Expr::req(Request::Pattern(pattern), m.clone()),
    )
}

pub(crate) fn r20_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((p, GraphPattern::Bgp(b), m)) = req_pattern_and(e) else {
        return vec![];
    };
    if b.len() != 1 || !is_kind(cx, m, InterfaceKind::Sparql) {
        return vec![];
    }
    let tp = b.iter().next().unwrap();
    one(
        bind().with("P", p).with("tp", tp).with("m", m),
        Expr::tp_add(
            Expr::req(Request::from_pattern(p.clone()), m.clone()),
            tp.clone(),
            m.clone(),
        ),
    )
}

pub(crate) fn r21_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input,
        bgp,
        member: m,
    } = e
    else {
        return vec![];
    };
    let Some((p, m2)) = req_pattern(input) else {
        return vec![];
    };
    if m != m2 || !is_kind(cx, m, InterfaceKind::Sparql) {
        return vec![];
    }
    let pattern = GraphPattern::and(p.clone(), GraphPattern::Bgp(bgp.clone()));
    one(
        bind().with("P", &p).with("B", bgp).with("m", m),
        Expr::req(Request::Pattern(pattern), m.clone()),
    )
}

pub(crate) fn r21_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Some((p, GraphPattern::Bgp(b), m)) = req_pattern_and(e) else {
        return vec![];
    };
    if !is_kind(cx, m, InterfaceKind::Sparql) {
        return vec![];
    }
    one(
        bind().with("P", p).with("B", b).with("m", m),
        Expr::bgp_add(
            Expr::req(Request::from_pattern(p.clone()), m.clone()),
            b.clone(),
            m.clone(),
        ),
    )
}

// (22) tpAdd(tpAdd(φ, tp2)@m2, tp1)@m1 ≡ tpAdd(tpAdd(φ, tp1)@m1, tp2)@m2

pub(crate) fn r22_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::TpAdd {
        input,
        tp: tp1,
        member: m1,
    } = e
    else {
        return vec![];
    };
    let Expr::TpAdd {
        input: phi,
        tp: tp2,
        member: m2,
    } = &**input
    else {
        return vec![];
    };
    if !tp_ok(cx, m1) || !tp_ok(cx, m2) {
        return vec![];
    }
    one(
        bind()
            .with("tp1", tp1)
            .with("tp2", tp2)
            .with("m1", m1)
            .with("m2", m2)
            .with("phi", &**phi),
        Expr::tp_add(
            Expr::tp_add((**phi).clone(), tp1.clone(), m1.clone()),
            tp2.clone(),
            m2.clone(),
        ),
    )
}

// (23) tpAdd(bgpAdd(φ, B)@m3, tp)@m1 ≡ bgpAdd(tpAdd(φ, tp)@m1, B)@m3

pub(crate) fn r23_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::TpAdd {
        input,
        tp,
        member: m1,
    } = e
    else {
        return vec![];
    };
    let Expr::BgpAdd {
        input: phi,
        bgp,
        member: m3,
    } = &**input
    else {
        return vec![];
    };
    if !tp_ok(cx, m1) || !bgp_ok(cx, m3) {
        return vec![];
    }
    one(
        bind()
            .with("tp", tp)
            .with("B", bgp)
            .with("m1", m1)
            .with("m3", m3)
            .with("phi", &**phi),
        Expr::bgp_add(
            Expr::tp_add((**phi).clone(), tp.clone(), m1.clone()),
            bgp.clone(),
            m3.clone(),
        ),
    )
}

pub(crate) fn r23_bwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input,
        bgp,
        member: m3,
    } = e
    else {
        return vec![];
    };
    let Expr::TpAdd {
        input: phi,
        tp,
        member: m1,
    } = &**input
    else {
        return vec![];
    };
    if !tp_ok(cx, m1) || !bgp_ok(cx, m3) {
        return vec![];
    }
    one(
        bind()
            .with("tp", tp)
            .with("B", bgp)
            .with("m1", m1)
            .with("m3", m3)
            .with("phi", &**phi),
        Expr::tp_add(
            Expr::bgp_add((**phi).clone(), bgp.clone(), m3.clone()),
            tp.clone(),
            m1.clone(),
        ),
    )
}

// (24) bgpAdd(bgpAdd(φ, B2)@m4, B1)@m3 ≡ bgpAdd(bgpAdd(φ, B1)@m3, B2)@m4

pub(crate) fn r24_fwd(e: &Expr, cx: &MatchCtx<'_>) -> Found {
    let Expr::BgpAdd {
        input,
        bgp: b1,
        member: m3,
    } = e
    else {
        return vec![];
    };
    let Expr::BgpAdd {
        input: phi,
        bgp: b2,
        member: m4,
    } = &**input
    else {
        return vec![];
    };
    if !bgp_ok(cx, m3) || !bgp_ok(cx, m4) {
        return vec![];
    }
    one(
        bind()
            .with("B1", b1)
            .with("B2", b2)
            .with("m3", m3)
            .with("m4", m4)
            .with("phi", &**phi),
        Expr::bgp_add(
            Expr::bgp_add((**phi).clone(), b1.clone(), m3.clone()),
            b2.clone(),
            m4.clone(),
        ),
    )
}

fn rebuild(multiway_join: bool, items: BTreeSet<Expr>) -> Expr {
    if multiway_join {
        Expr::mj(items)
    } else {
        Expr::mu(items)
    }
}

fn operands(e: &Expr, multiway_join: bool) -> Option<&ExprSet> {
    match (e, multiway_join) {
        (Expr::Mj(set), true) | (Expr::Mu(set), false) => Some(set),
        _ => None,
    }
}

fn binary(multiway_join: bool, l: Expr, r: Expr) -> Expr {
    if multiway_join {
        Expr::join(l, r)
    } else {
        Expr::union(l, r)
    }
}

fn binary_parts(e: &Expr, multiway_join: bool) -> Option<(&Expr, &Expr)> {
    match (e, multiway_join) {
        (Expr::Join(l, r), true) | (Expr::Union(l, r), false) => Some((l, r)),
        _ => None,
    }
}

// (25) mj Φ ≡ join(mj Φ', φ) and (26) mu Φ ≡ union(mu Φ', φ), Φ' = Φ - {φ}, |Φ| > 1

fn split_off(e: &Expr, j: bool) -> Found {
    let Some(set) = operands(e, j) else {
        return vec![];
    };
    if set.len() < 2 {
        return vec![];
    }
    set.iter()
        .map(|phi| {
            let rest = set.without(phi).unwrap().into_set();
            (
                bind()
                    .with("Phi", &rebuild(j, rest.clone()))
                    .with("phi", phi),
                binary(j, rebuild(j, rest), phi.clone()),
            )
        })
        .collect()
}

fn fold_in(e: &Expr, j: bool) -> Found {
    let Some((l, phi)) = binary_parts(e, j) else {
        return vec![];
    };
    let Some(set) = operands(l, j) else {
        return vec![];
    };
    // For mj, absorbing an operand that is already present would drop a join.
    if j && set.contains(phi) {
        return vec![];
    }
    let mut items = set.as_set().clone();
    items.insert(phi.clone());
    one(bind().with("Phi", l).with("phi", phi), rebuild(j, items))
}

pub(crate) fn r25_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    split_off(e, true)
}

pub(crate) fn r25_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    fold_in(e, true)
}

pub(crate) fn r26_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    split_off(e, false)
}

pub(crate) fn r26_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    fold_in(e, false)
}

// (27) mj flattening of a join operand; (28) mu flattening of a union operand.

fn flatten_binary(e: &Expr, j: bool) -> Found {
    let Some(set) = operands(e, j) else {
        return vec![];
    };
    let mut out = Vec::new();
    for member in set {
        let Some((p1, p2)) = binary_parts(member, j) else {
            continue;
        };
        let rest = set
            .without(member)
            .map(ExprSet::into_set)
            .unwrap_or_default();
        if j && (p1 == p2 || rest.contains(p1) || rest.contains(p2)) {
            continue;
        }
        let mut items = rest;
        items.insert(p1.clone());
        items.insert(p2.clone());
        out.push((
            bind().with("phi1", p1).with("phi2", p2).with("Phi", e),
            rebuild(j, items),
        ));
    }
    out
}

fn group_binary(e: &Expr, j: bool) -> Found {
    let Some(set) = operands(e, j) else {
        return vec![];
    };
    let items: Vec<&Expr> = set.iter().collect();
    let mut out = Vec::new();
    for (a, p1) in items.iter().enumerate() {
        for p2 in &items[a + 1..] {
            let combined = binary(j, (*p1).clone(), (*p2).clone());
            let mut rest = set.as_set().clone();
            rest.remove(*p1);
            rest.remove(*p2);
            if j && rest.contains(&combined) {
                continue;
            }
            rest.insert(combined);
            out.push((
                bind().with("phi1", *p1).with("phi2", *p2).with("Phi", e),
                rebuild(j, rest),
            ));
        }
    }
    out
}

pub(crate) fn r27_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    flatten_binary(e, true)
}

pub(crate) fn r27_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    group_binary(e, true)
}

pub(crate) fn r28_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    flatten_binary(e, false)
}

pub(crate) fn r28_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    group_binary(e, false)
}

// (29) mj flattening of a nested mj; (30) mu flattening of a nested mu.

fn flatten_nested(e: &Expr, j: bool) -> Found {
    let Some(set) = operands(e, j) else {
        return vec![];
    };
    let mut out = Vec::new();
    for member in set {
        let Some(inner) = operands(member, j) else {
            continue;
        };
        let rest = set
            .without(member)
            .map(ExprSet::into_set)
            .unwrap_or_default();
        if j && inner.iter().any(|x| rest.contains(x)) {
            continue;
        }
        let mut items = rest;
        items.extend(inner.iter().cloned());
        out.push((
            bind().with("Phi'", member).with("Phi", e),
            rebuild(j, items),
        ));
    }
    out
}

/// Groups every proper subset of at least two operands into a nested operator.
fn group_nested(e: &Expr, j: bool) -> Found {
    let Some(set) = operands(e, j) else {
        return vec![];
    };
    let items: Vec<&Expr> = set.iter().collect();
    let n = items.len();
    if !(3..=16).contains(&n) {
        return vec![];
    }
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut inner = BTreeSet::new();
        let mut rest = BTreeSet::new();
        for (i, x) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                inner.insert((*x).clone());
            } else {
                rest.insert((*x).clone());
            }
        }
        let nested = rebuild(j, inner);
        if j && rest.contains(&nested) {
            continue;
        }
        rest.insert(nested.clone());
        let result = rebuild(j, rest);
        out.push((bind().with("Phi'", &nested).with("Phi", e), result));
    }
    out
}

pub(crate) fn r29_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    flatten_nested(e, true)
}

pub(crate) fn r29_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    group_nested(e, true)
}

pub(crate) fn r30_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    flatten_nested(e, false)
}

pub(crate) fn r30_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    group_nested(e, false)
}

// (31) mu{φ} ≡ φ and (32) mj{φ} ≡ φ

fn unwrap_singleton(e: &Expr, j: bool) -> Found {
    match operands(e, j) {
        Some(set) if set.len() == 1 => {
            let phi = set.iter().next().unwrap();
            one(bind().with("phi", phi), phi.clone())
        }
        _ => vec![],
    }
}

pub(crate) fn r31_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    unwrap_singleton(e, false)
}

pub(crate) fn r31_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    one(bind().with("phi", e), Expr::mu([e.clone()]))
}

pub(crate) fn r32_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    unwrap_singleton(e, true)
}

pub(crate) fn r32_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    one(bind().with("phi", e), Expr::mj([e.clone()]))
}

// (33) join commutativity; (34) union commutativity

fn swap(e: &Expr, j: bool) -> Found {
    let Some((a, b)) = binary_parts(e, j) else {
        return vec![];
    };
    one(
        bind().with("phi1", a).with("phi2", b),
        binary(j, b.clone(), a.clone()),
    )
}

pub(crate) fn r33_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    swap(e, true)
}

pub(crate) fn r34_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    swap(e, false)
}

// (35) union(φ, φ) ≡ φ

pub(crate) fn r35_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    match e {
        Expr::Union(a, b) if a == b => one(bind().with("phi", &**a), (**a).clone()),
        _ => vec![],
    }
}

pub(crate) fn r35_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    one(bind().with("phi", e), Expr::union(e.clone(), e.clone()))
}

// (36) join associativity; (37) union associativity

fn assoc_left(e: &Expr, j: bool) -> Found {
    let Some((a, bc)) = binary_parts(e, j) else {
        return vec![];
    };
    let Some((b, c)) = binary_parts(bc, j) else {
        return vec![];
    };
    one(
        bind().with("phi1", a).with("phi2", b).with("phi3", c),
        binary(j, binary(j, a.clone(), b.clone()), c.clone()),
    )
}

fn assoc_right(e: &Expr, j: bool) -> Found {
    let Some((ab, c)) = binary_parts(e, j) else {
        return vec![];
    };
    let Some((a, b)) = binary_parts(ab, j) else {
        return vec![];
    };
    one(
        bind().with("phi1", a).with("phi2", b).with("phi3", c),
        binary(j, a.clone(), binary(j, b.clone(), c.clone())),
    )
}

pub(crate) fn r36_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    assoc_left(e, true)
}

pub(crate) fn r36_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    assoc_right(e, true)
}

pub(crate) fn r37_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    assoc_left(e, false)
}

pub(crate) fn r37_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    assoc_right(e, false)
}

// (38) join(φ1, union(φ2, φ3)) ≡ union(join(φ1, φ2), join(φ1, φ3))

pub(crate) fn r38_fwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    let Expr::Join(a, u) = e else { return vec![] };
    let Expr::Union(b, c) = &**u else {
        return vec![];
    };
    one(
        bind()
            .with("phi1", &**a)
            .with("phi2", &**b)
            .with("phi3", &**c),
        Expr::union(
            Expr::join((**a).clone(), (**b).clone()),
            Expr::join((**a).clone(), (**c).clone()),
        ),
    )
}

pub(crate) fn r38_bwd(e: &Expr, _: &MatchCtx<'_>) -> Found {
    let Expr::Union(l, r) = e else { return vec![] };
    let (Expr::Join(a, b), Expr::Join(a2, c)) = (&**l, &**r) else {
        return vec![];
    };
    if a != a2 {
        return vec![];
    }
    one(
        bind()
            .with("phi1", &**a)
            .with("phi2", &**b)
            .with("phi3", &**c),
        Expr::join((**a).clone(), Expr::union((**b).clone(), (**c).clone())),
    )
}

impl From<&Expr> for Binding {
    fn from(e: &Expr) -> Self {
        Binding::Expr(e.clone())
    }
}

impl From<&TriplePattern> for Binding {
    fn from(tp: &TriplePattern) -> Self {
        Binding::Tp(tp.clone())
    }
}

impl From<&Bgp> for Binding {
    fn from(b: &Bgp) -> Self {
        Binding::Bgp(b.clone())
    }
}

impl From<&MemberId> for Binding {
    fn from(m: &MemberId) -> Self {
        Binding::Member(m.clone())
    }
}

impl From<&GraphPattern> for Binding {
    fn from(p: &GraphPattern) -> Self {
        Binding::Pattern(p.clone())
    }
}

impl From<&crate::rdf::SolutionSet> for Binding {
    fn from(s: &crate::rdf::SolutionSet) -> Self {
        Binding::Solutions(s.clone())
    }
}
