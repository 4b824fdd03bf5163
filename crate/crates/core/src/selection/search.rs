//! Bounded searches over source assignments.
//!
//! The candidate space contains every source assignment of `mj`/`mu` nesting
//! depth at most `max_depth` whose requests are nonempty sub-BGPs of the
//! query, sent to members that accept them (singletons as triple pattern
//! requests). [`enumerate_assignments`] lists it structurally and is only
//! usable on tiny inputs. The minimality searches work on solution values
//! instead: per nesting level they keep, for every reachable solution set, the
//! cheapest expression producing it, and combine operands with pairwise
//! distinct values. Costs are tried in ascending order.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use super::{sa_cost, SelectionError};
use crate::eval::EvalContext;
use crate::expr::Expr;
use crate::federation::Federation;
use crate::rdf::{Bgp, SolutionSet, TriplePattern};

/// Parameters of the bounded candidate space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CandidateSpace {
    /// Maximum `mj`/`mu` nesting; requests sit at depth 0.
    pub max_depth: usize,
}

impl CandidateSpace {
    pub const DEFAULT_MAX_DEPTH: usize = 3;

    pub fn new(max_depth: usize) -> Self {
        CandidateSpace { max_depth }
    }

    /// The requests of the space, in canonical order.
    pub fn requests(&self, b: &Bgp, f: &Federation) -> Vec<Expr> {
        let mut out = BTreeSet::new();
        for sub in b.nonempty_subsets() {
            for m in f.members() {
                if sub.len() == 1 {
                    if m.kind.supports_tp_requests() {
                        let tp = sub.iter().next().unwrap().clone();
                        out.insert(Expr::req_tp(tp, m.id.clone()));
                    }
                } else if m.kind.supports_bgp_requests() {
                    out.insert(Expr::req_bgp(sub.clone(), m.id.clone()));
                }
            }
        }
        out.into_iter().collect()
    }
}

impl Default for CandidateSpace {
    fn default() -> Self {
        CandidateSpace::new(Self::DEFAULT_MAX_DEPTH)
    }
}

/// The two syntactic classes of source assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    /// Joins over unions.
    S,
    /// Restricted joins over unions.
    SStar,
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Class::S => "s",
            Class::SStar => "sstar",
        })
    }
}

impl FromStr for Class {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "s" => Ok(Class::S),
            "sstar" | "s*" => Ok(Class::SStar),
            other => Err(format!("unknown class {other:?} (expected s or sstar)")),
        }
    }
}

/// Every assignment of the space with sa-cost at most `cost_bound`, sorted by
/// cost and then serialization.
pub fn enumerate_assignments(
    b: &Bgp,
    f: &Federation,
    space: CandidateSpace,
    cost_bound: usize,
) -> Vec<Expr> {
    if cost_bound == 0 {
        return Vec::new();
    }
    let mut level: BTreeSet<Expr> = space.requests(b, f).into_iter().collect();
    for _ in 0..space.max_depth {
        let mut items: Vec<(usize, &Expr)> = level.iter().map(|e| (sa_cost(e), e)).collect();
        items.sort();
        let mut next = level.clone();
        let mut chosen = Vec::new();
        structural_subsets(&items, 0, cost_bound, &mut chosen, &mut next);
        level = next;
    }
    let mut out: Vec<(usize, String, Expr)> = level
        .into_iter()
        .map(|e| (sa_cost(&e), e.to_string(), e))
        .collect();
    out.sort();
    out.into_iter().map(|(_, _, e)| e).collect()
}

fn structural_subsets<'a>(
    items: &[(usize, &'a Expr)],
    start: usize,
    budget: usize,
    chosen: &mut Vec<&'a Expr>,
    out: &mut BTreeSet<Expr>,
) {
    for i in start..items.len() {
        let (cost, e) = items[i];
        if cost > budget {
            break;
        }
        chosen.push(e);
        out.insert(Expr::mj(chosen.iter().map(|&x| x.clone())));
        out.insert(Expr::mu(chosen.iter().map(|&x| x.clone())));
        structural_subsets(items, i + 1, budget - cost, chosen, out);
        chosen.pop();
    }
}

/// Order among witnesses of equal cost: fewer nodes, then serialization.
fn preferred(a: &Expr, b: &Expr) -> bool {
    (a.size(), a.to_string()) < (b.size(), b.to_string())
}

struct Entry {
    value: SolutionSet,
    cost: usize,
    witness: Expr,
}

/// Cheapest known witness per solution value.
#[derive(Default)]
struct Table {
    entries: Vec<Entry>,
    index: HashMap<SolutionSet, usize>,
}

impl Table {
    fn offer(&mut self, value: SolutionSet, cost: usize, witness: impl FnOnce() -> Expr) {
        match self.index.get(&value) {
            Some(&i) => {
                let entry = &mut self.entries[i];
                if cost < entry.cost {
                    entry.cost = cost;
                    entry.witness = witness();
                } else if cost == entry.cost {
                    let w = witness();
                    if preferred(&w, &entry.witness) {
                        entry.witness = w;
                    }
                }
            }
            None => {
                self.index.insert(value.clone(), self.entries.len());
                self.entries.push(Entry {
                    value,
                    cost,
                    witness: witness(),
                });
            }
        }
    }

    fn get(&self, value: &SolutionSet) -> Option<&Entry> {
        self.index.get(value).map(|&i| &self.entries[i])
    }

    fn duplicate(&self) -> Table {
        let mut out = Table::default();
        for e in &self.entries {
            out.offer(e.value.clone(), e.cost, || e.witness.clone());
        }
        out
    }
}

#[derive(Clone, Copy)]
struct Ops {
    mj: bool,
    mu: bool,
}

fn leaf_table(b: &Bgp, f: &Federation, space: CandidateSpace) -> Result<Table, SelectionError> {
    let ctx = EvalContext::new(f);
    let mut table = Table::default();
    for leaf in space.requests(b, f) {
        let value = ctx.sols(&leaf)?;
        table.offer(value, 1, || leaf);
    }
    Ok(table)
}

/// One more nesting level: `prev` plus every `mj`/`mu` over at least two
/// operands of `prev` with distinct values and total cost within `bound`.
fn combine(prev: &Table, ops: Ops, bound: usize) -> Table {
    let mut items: Vec<&Entry> = prev.entries.iter().filter(|e| e.cost <= bound).collect();
    items.sort_by_key(|e| e.cost);
    let mut out = prev.duplicate();
    let mut chosen = Vec::new();
    value_subsets(
        &items,
        0,
        bound,
        ops,
        &mut chosen,
        &SolutionSet::unit(),
        &SolutionSet::new(),
        &mut out,
    );
    out
}

#[allow(clippy::too_many_arguments)]
fn value_subsets<'a>(
    items: &[&'a Entry],
    start: usize,
    budget: usize,
    ops: Ops,
    chosen: &mut Vec<&'a Entry>,
    joined: &SolutionSet,
    united: &SolutionSet,
    out: &mut Table,
) {
    for i in start..items.len() {
        let entry = items[i];
        if entry.cost > budget {
            break;
        }
        chosen.push(entry);
        let cost: usize = chosen.iter().map(|e| e.cost).sum();
        let j = if ops.mj {
            joined.join(&entry.value)
        } else {
            SolutionSet::new()
        };
        let u = if ops.mu {
            united.union(&entry.value)
        } else {
            SolutionSet::new()
        };
        if chosen.len() > 1 {
            let witnesses = || chosen.iter().map(|e| e.witness.clone()).collect::<Vec<_>>();
            if ops.mj {
                out.offer(j.clone(), cost, || Expr::mj(witnesses()));
            }
            if ops.mu {
                out.offer(u.clone(), cost, || Expr::mu(witnesses()));
            }
        }
        value_subsets(items, i + 1, budget - entry.cost, ops, chosen, &j, &u, out);
        chosen.pop();
    }
}

const BOTH: Ops = Ops { mj: true, mu: true };

fn space_table(leaves: &Table, space: CandidateSpace, bound: usize) -> Table {
    let mut table = leaves.duplicate();
    for _ in 0..space.max_depth {
        table = combine(&table, BOTH, bound);
    }
    table
}

fn cost_cap(b: &Bgp, f: &Federation, leaves: &Table) -> usize {
    (b.len() * f.len()).max(leaves.entries.len())
}

/// A correct assignment of minimum sa-cost within the space, if the space
/// contains a correct one. Among equally cheap witnesses the one with fewest
/// nodes, then least serialization, is returned.
pub fn find_minimal(
    b: &Bgp,
    f: &Federation,
    space: CandidateSpace,
) -> Result<Option<(Expr, usize)>, SelectionError> {
    f.require_triple_pattern_accessible()?;
    let target = EvalContext::new(f).expected(b);
    let leaves = leaf_table(b, f, space)?;
    for c in 1..=cost_cap(b, f, &leaves) {
        if let Some(e) = space_table(&leaves, space, c).get(&target) {
            return Ok(Some((e.witness.clone(), e.cost)));
        }
    }
    Ok(None)
}

/// Whether the space contains a correct assignment of sa-cost at most `c`.
pub fn decide_source_selection(
    b: &Bgp,
    f: &Federation,
    c: usize,
    space: CandidateSpace,
) -> Result<bool, SelectionError> {
    if c == 0 {
        return Err(SelectionError::InvalidBound(c));
    }
    let target = EvalContext::new(f).expected(b);
    let leaves = leaf_table(b, f, space)?;
    Ok(space_table(&leaves, space, c).get(&target).is_some())
}

/// A correct assignment of minimum sa-cost within a class. Requests are
/// sub-BGPs of `b`; the restricted class is enumerated exactly over all
/// partitions of subsets of `b`.
pub fn find_minimal_in_class(
    b: &Bgp,
    f: &Federation,
    class: Class,
) -> Result<Option<(Expr, usize)>, SelectionError> {
    f.require_triple_pattern_accessible()?;
    match class {
        Class::S => minimal_in_s(b, f),
        Class::SStar => minimal_in_s_star(b, f),
    }
}

fn minimal_in_s(b: &Bgp, f: &Federation) -> Result<Option<(Expr, usize)>, SelectionError> {
    let target = EvalContext::new(f).expected(b);
    let leaves = leaf_table(b, f, CandidateSpace::default())?;
    for c in 1..=cost_cap(b, f, &leaves) {
        let unions = combine(
            &leaves,
            Ops {
                mj: false,
                mu: true,
            },
            c,
        );
        let top = combine(
            &unions,
            Ops {
                mj: true,
                mu: false,
            },
            c,
        );
        if let Some(e) = top.get(&target) {
            return Ok(Some((e.witness.clone(), e.cost)));
        }
    }
    Ok(None)
}

/// One block of a restricted assignment: a single request repeated at a
/// nonempty set of members.
struct Block {
    expr: Expr,
    cost: usize,
    value: SolutionSet,
}

fn block_options(block: &[TriplePattern], f: &Federation) -> Result<Vec<Block>, SelectionError> {
    let ctx = EvalContext::new(f);
    let capable: Vec<_> = f
        .members()
        .filter(|m| {
            if block.len() == 1 {
                m.kind.supports_tp_requests()
            } else {
                m.kind.supports_bgp_requests()
            }
        })
        .map(|m| m.id.clone())
        .collect();
    let request = |m| {
        if block.len() == 1 {
            Expr::req_tp(block[0].clone(), m)
        } else {
            Expr::req_bgp(Bgp::new(block.iter().cloned()).unwrap(), m)
        }
    };
    let mut out = Vec::new();
    for mask in 1u32..(1 << capable.len()) {
        let reqs: Vec<Expr> = capable
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, m)| request(m.clone()))
            .collect();
        let cost = reqs.len();
        let expr = if cost == 1 {
            reqs.into_iter().next().unwrap()
        } else {
            Expr::mu(reqs)
        };
        let value = ctx.sols(&expr)?;
        out.push(Block { expr, cost, value });
    }
    Ok(out)
}

/// All partitions of `items` into nonempty blocks.
fn partitions<T: Clone>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    let Some((first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first.clone());
            out.push(q);
        }
        let mut q = p;
        q.insert(0, vec![first.clone()]);
        out.push(q);
    }
    out
}

fn minimal_in_s_star(b: &Bgp, f: &Federation) -> Result<Option<(Expr, usize)>, SelectionError> {
    let target = EvalContext::new(f).expected(b);
    let mut best: Option<(Expr, usize)> = None;
    for subset in b.nonempty_subsets() {
        let tps: Vec<TriplePattern> = subset.iter().cloned().collect();
        for partition in partitions(&tps) {
            let options = partition
                .iter()
                .map(|block| block_options(block, f))
                .collect::<Result<Vec<_>, _>>()?;
            if options.iter().any(Vec::is_empty) {
                continue;
            }
            let mut chosen = Vec::new();
            choose_blocks(&options, &target, &mut chosen, &mut best);
        }
    }
    Ok(best)
}

fn choose_blocks<'a>(
    options: &'a [Vec<Block>],
    target: &SolutionSet,
    chosen: &mut Vec<&'a Block>,
    best: &mut Option<(Expr, usize)>,
) {
    let cost: usize = chosen.iter().map(|b| b.cost).sum();
    if best.as_ref().is_some_and(|(_, c)| cost > *c) {
        return;
    }
    let Some((first, rest)) = options.split_first() else {
        let value = chosen
            .iter()
            .fold(SolutionSet::unit(), |acc, b| acc.join(&b.value));
        if &value != target {
            return;
        }
        let expr = if chosen.len() == 1 {
            chosen[0].expr.clone()
        } else {
            Expr::mj(chosen.iter().map(|b| b.expr.clone()))
        };
        let better = match best {
            None => true,
            Some((e, c)) => cost < *c || (cost == *c && preferred(&expr, e)),
        };
        if better {
            *best = Some((expr, cost));
        }
        return;
    };
    for option in first {
        chosen.push(option);
        choose_blocks(rest, target, chosen, best);
        chosen.pop();
    }
}
