//! FedQPL expressions: the seven plan operators, their canonical text form,
//! validity for a federation, and the source-assignment fragment.
//!
//! The operands of `mj` and `mu` are sets. [`ExprSet`] keeps them sorted by
//! the derived order of [`Expr`], so structural equality is set equality and
//! serialization is canonical.

use std::collections::{btree_set, BTreeSet};
use std::fmt;

use crate::federation::{MemberId, Request};
use crate::rdf::{Bgp, TriplePattern, Variable};

mod parse;
mod validity;

pub use parse::{parse_bgp, parse_expr, parse_expr_unbound, parse_graph_pattern, ParseError};
pub use validity::{is_valid, validate, ValidityError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Req {
        request: Request,
        member: MemberId,
    },
    TpAdd {
        input: Box<Expr>,
        tp: TriplePattern,
        member: MemberId,
    },
    BgpAdd {
        input: Box<Expr>,
        bgp: Bgp,
        member: MemberId,
    },
    Join(Box<Expr>, Box<Expr>),
    Union(Box<Expr>, Box<Expr>),
    Mj(ExprSet),
    Mu(ExprSet),
}

/// A nonempty set of expressions in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprSet(BTreeSet<Expr>);

impl ExprSet {
    /// `None` if `items` is empty. Duplicates collapse.
    pub fn new<I: IntoIterator<Item = Expr>>(items: I) -> Option<Self> {
        let set: BTreeSet<Expr> = items.into_iter().collect();
        (!set.is_empty()).then_some(ExprSet(set))
    }

    pub fn singleton(e: Expr) -> Self {
        ExprSet(BTreeSet::from([e]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> btree_set::Iter<'_, Expr> {
        self.0.iter()
    }

    pub fn contains(&self, e: &Expr) -> bool {
        self.0.contains(e)
    }

    pub fn as_set(&self) -> &BTreeSet<Expr> {
        &self.0
    }

    pub fn into_set(self) -> BTreeSet<Expr> {
        self.0
    }

    /// The set without `e`; `None` if nothing would remain.
    pub fn without(&self, e: &Expr) -> Option<ExprSet> {
        let mut set = self.0.clone();
        set.remove(e);
        (!set.is_empty()).then_some(ExprSet(set))
    }
}

impl<'a> IntoIterator for &'a ExprSet {
    type Item = &'a Expr;
    type IntoIter = btree_set::Iter<'a, Expr>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Expr {
    pub fn req(request: Request, member: MemberId) -> Self {
        Expr::Req { request, member }
    }

    pub fn req_tp(tp: TriplePattern, member: MemberId) -> Self {
        Expr::req(Request::Tp(tp), member)
    }

    pub fn req_bgp(bgp: Bgp, member: MemberId) -> Self {
        Expr::req(Request::Bgp(bgp), member)
    }

    pub fn tp_add(input: Expr, tp: TriplePattern, member: MemberId) -> Self {
        Expr::TpAdd {
            input: Box::new(input),
            tp,
            member,
        }
    }

    pub fn bgp_add(input: Expr, bgp: Bgp, member: MemberId) -> Self {
        Expr::BgpAdd {
            input: Box::new(input),
            bgp,
            member,
        }
    }

    pub fn join(left: Expr, right: Expr) -> Self {
        Expr::Join(Box::new(left), Box::new(right))
    }

    pub fn union(left: Expr, right: Expr) -> Self {
        Expr::Union(Box::new(left), Box::new(right))
    }

    /// # Panics
    /// If `items` is empty.
    pub fn mj<I: IntoIterator<Item = Expr>>(items: I) -> Self {
        Expr::Mj(ExprSet::new(items).expect("mj needs at least one operand"))
    }

    /// # Panics
    /// If `items` is empty.
    pub fn mu<I: IntoIterator<Item = Expr>>(items: I) -> Self {
        Expr::Mu(ExprSet::new(items).expect("mu needs at least one operand"))
    }

    /// Direct subexpressions; `mj`/`mu` operands in canonical order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Req { .. } => Vec::new(),
            Expr::TpAdd { input, .. } | Expr::BgpAdd { input, .. } => vec![input],
            Expr::Join(l, r) | Expr::Union(l, r) => vec![l, r],
            Expr::Mj(set) | Expr::Mu(set) => set.iter().collect(),
        }
    }

    /// The subexpression reached by following child indices from the root.
    pub fn at(&self, path: &[usize]) -> Option<&Expr> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i)?.at(rest),
        }
    }

    /// Replaces the subexpression at `path`. Inside `mj`/`mu` the replacement
    /// joins the operand set, so it may merge with an equal sibling.
    pub fn replace_at(&self, path: &[usize], new: Expr) -> Option<Expr> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(new);
        };
        let child = self.children().get(i).copied()?;
        let replaced = child.replace_at(rest, new)?;
        Some(match self {
            Expr::Req { .. } => return None,
            Expr::TpAdd { tp, member, .. } => Expr::tp_add(replaced, tp.clone(), member.clone()),
            Expr::BgpAdd { bgp, member, .. } => {
                Expr::bgp_add(replaced, bgp.clone(), member.clone())
            }
            Expr::Join(l, r) => match i {
                0 => Expr::join(replaced, (**r).clone()),
                _ => Expr::join((**l).clone(), replaced),
            },
            Expr::Union(l, r) => match i {
                0 => Expr::union(replaced, (**r).clone()),
                _ => Expr::union((**l).clone(), replaced),
            },
            Expr::Mj(set) | Expr::Mu(set) => {
                let mut items = set.as_set().clone();
                items.remove(child);
                items.insert(replaced);
                let set = ExprSet(items);
                if matches!(self, Expr::Mj(_)) {
                    Expr::Mj(set)
                } else {
                    Expr::Mu(set)
                }
            }
        })
    }

    /// Number of `req` occurrences (the sa-cost of a source assignment).
    pub fn req_count(&self) -> usize {
        match self {
            Expr::Req { .. } => 1,
            _ => self.children().into_iter().map(Expr::req_count).sum(),
        }
    }

    /// Number of nodes in the expression tree.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    /// Nesting height: 0 for `req`, otherwise one more than the tallest child.
    pub fn height(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    /// All member ids mentioned anywhere in the expression.
    pub fn members(&self) -> BTreeSet<&MemberId> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| match e {
            Expr::Req { member, .. } | Expr::TpAdd { member, .. } | Expr::BgpAdd { member, .. } => {
                out.insert(member);
            }
            _ => {}
        });
        out
    }

    /// Preorder traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Preorder list of (path, subexpression) pairs.
    pub fn positions(&self) -> Vec<(Vec<usize>, &Expr)> {
        fn go<'a>(e: &'a Expr, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Expr)>) {
            out.push((path.clone(), e));
            for (i, c) in e.children().into_iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Variables mentioned in the requests and patterns of the expression.
    pub fn vars(&self) -> BTreeSet<Variable> {
        match self {
            Expr::Req { request, .. } => request.vars(),
            Expr::TpAdd { input, tp, .. } => {
                let mut out = input.vars();
                out.extend(tp.vars());
                out
            }
            Expr::BgpAdd { input, bgp, .. } => {
                let mut out = input.vars();
                out.extend(bgp.vars());
                out
            }
            _ => self.children().into_iter().flat_map(Expr::vars).collect(),
        }
    }

    /// Whether the expression lies in the source-assignment fragment: only
    /// `req`, `mj` and `mu`, with triple pattern or BGP requests.
    pub fn is_source_assignment(&self) -> bool {
        match self {
            Expr::Req { request, .. } => matches!(request, Request::Tp(_) | Request::Bgp(_)),
            Expr::Mj(set) | Expr::Mu(set) => set.iter().all(Expr::is_source_assignment),
            _ => false,
        }
    }

    /// The expression together with all of its (recursive) subexpressions.
    pub fn subexprs(&self) -> BTreeSet<&Expr> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            out.insert(e);
        });
        out
    }

    /// Triple patterns mentioned by the requests of a source assignment.
    pub fn tps(&self) -> BTreeSet<TriplePattern> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Req { request, .. } = e {
                match request {
                    Request::Tp(tp) | Request::BrTpf(tp, _) => {
                        out.insert(tp.clone());
                    }
                    Request::Bgp(b) => out.extend(b.iter().cloned()),
                    Request::Pattern(p) => out.extend(p.triple_patterns()),
                }
            }
        });
        out
    }
}

pub fn is_source_assignment(e: &Expr) -> bool {
    e.is_source_assignment()
}

pub fn subexprs(a: &Expr) -> BTreeSet<&Expr> {
    a.subexprs()
}

pub fn tps_of(a: &Expr) -> BTreeSet<TriplePattern> {
    a.tps()
}

pub fn vars_of_assignment(a: &Expr) -> BTreeSet<Variable> {
    a.vars()
}

pub fn serialize_expr(e: &Expr) -> String {
    e.to_string()
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Req { request, member } => write!(f, "req[{request}]@{member}"),
            Expr::TpAdd { input, tp, member } => write!(f, "tpAdd({input}, {tp})@{member}"),
            Expr::BgpAdd { input, bgp, member } => write!(f, "bgpAdd({input}, {bgp})@{member}"),
            Expr::Join(l, r) => write!(f, "join({l}, {r})"),
            Expr::Union(l, r) => write!(f, "union({l}, {r})"),
            Expr::Mj(set) => write_set(f, "mj", set),
            Expr::Mu(set) => write_set(f, "mu", set),
        }
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, name: &str, set: &ExprSet) -> fmt::Result {
    write!(f, "{name}{{")?;
    for (i, e) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        fmt::Display::fmt(e, f)?;
    }
    f.write_str("}")
}
