//! A sound canonical form for join-union graph patterns.

use std::collections::BTreeSet;

use crate::federation::GraphPattern;
use crate::rdf::Bgp;

/// Flattens nested `and`/`unionp`, merges the BGP operands of each `and`
/// into one BGP, sorts operands and drops duplicate union branches. Equal
/// normal forms imply equal results on every graph; the converse does not
/// hold.
pub fn normalize_graph_pattern(p: &GraphPattern) -> GraphPattern {
    match p {
        GraphPattern::Bgp(_) => p.clone(),
        GraphPattern::And(..) => {
            let mut operands = Vec::new();
            and_operands(p, &mut operands);
            let mut merged: Option<Bgp> = None;
            let mut rest = Vec::new();
            for op in operands {
                match op {
                    GraphPattern::Bgp(b) => {
                        merged = Some(match merged {
                            Some(m) => m.union(&b),
                            None => b,
                        })
                    }
                    other => rest.push(other),
                }
            }
            rest.extend(merged.map(GraphPattern::Bgp));
            rest.sort();
            fold(rest, GraphPattern::and)
        }
        GraphPattern::Union(..) => {
            let mut operands = Vec::new();
            union_operands(p, &mut operands);
            let set: BTreeSet<GraphPattern> = operands.into_iter().collect();
            fold(set.into_iter().collect(), GraphPattern::union)
        }
    }
}

fn and_operands(p: &GraphPattern, out: &mut Vec<GraphPattern>) {
    match p {
        GraphPattern::And(l, r) => {
            and_operands(l, out);
            and_operands(r, out);
        }
        other => match normalize_graph_pattern(other) {
            n @ GraphPattern::And(..) => and_operands(&n, out),
            n => out.push(n),
        },
    }
}

fn union_operands(p: &GraphPattern, out: &mut Vec<GraphPattern>) {
    match p {
        GraphPattern::Union(l, r) => {
            union_operands(l, out);
            union_operands(r, out);
        }
        other => match normalize_graph_pattern(other) {
            n @ GraphPattern::Union(..) => union_operands(&n, out),
            n => out.push(n),
        },
    }
}

/// Left-deep combination of nonempty `items`.
fn fold(
    items: Vec<GraphPattern>,
    op: fn(GraphPattern, GraphPattern) -> GraphPattern,
) -> GraphPattern {
    let mut it = items.into_iter();
    let first = it.next().expect("at least one operand");
    it.fold(first, op)
}
