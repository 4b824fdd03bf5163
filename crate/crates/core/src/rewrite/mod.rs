//! Rule-based rewriting over the catalog of FedQPL equivalences.
//!
//! Every rule is a pair of expression shapes with side conditions. A rule
//! applies in the forward direction (left shape to right shape) or, where it
//! is not its own mirror image, backward. Matches are found at every
//! position of an expression; applying one replaces that subexpression and
//! leaves the rest untouched.
//!
//! Two subtleties of the set-based `mj`/`mu` operands are handled here:
//! replacing an `mj` operand by something equal to one of its siblings would
//! silently drop a join, so such matches are discarded; `mu` operands may
//! merge freely.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::eval::{EvalContext, EvalError};
use crate::expr::{validate, Expr, ValidityError};
use crate::federation::{Federation, GraphPattern, MemberId};
use crate::rdf::{Bgp, SolutionSet, TriplePattern};

mod normalize;
mod rules;

pub use normalize::normalize_graph_pattern;

use rules::{MatchCtx, Matcher};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("invalid expression: {0}")]
    Invalid(#[from] ValidityError),
    #[error("rule {rule} no longer applies at position {position:?}")]
    StaleMatch { rule: RuleId, position: Vec<usize> },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("bad rule list {0:?}: expected numbers or ranges between 1 and 38, e.g. `1-14,33`")]
    InvalidRuleSpec(String),
    #[error("budget must allow at least one expression")]
    InvalidBudget,
}

/// A value bound to a metavariable of a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Expr(Expr),
    Tp(TriplePattern),
    Bgp(Bgp),
    Member(MemberId),
    Pattern(GraphPattern),
    Solutions(SolutionSet),
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Expr(e) => e.fmt(f),
            Binding::Tp(tp) => tp.fmt(f),
            Binding::Bgp(b) => b.fmt(f),
            Binding::Member(m) => m.fmt(f),
            Binding::Pattern(p) => p.fmt(f),
            Binding::Solutions(s) => {
                let lines = s.canonical_lines();
                write!(f, "{{{}}}", lines.join("; "))
            }
        }
    }
}

/// Metavariable bindings of a match, keyed by names such as `phi`, `tp`, `m`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<&'static str, Binding>);

impl Bindings {
    pub fn with(mut self, name: &'static str, value: impl Into<Binding>) -> Self {
        self.0.insert(name, value.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Binding)> {
        self.0.iter().map(|(k, v)| (*k, v))
    }
}

impl fmt::Display for Bindings {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleId {
    pub number: u8,
    pub direction: Direction,
}

impl RuleId {
    pub fn forward(number: u8) -> Self {
        RuleId {
            number,
            direction: Direction::Forward,
        }
    }

    pub fn backward(number: u8) -> Self {
        RuleId {
            number,
            direction: Direction::Backward,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        };
        write!(f, "{} {dir}", self.number)
    }
}

/// One equivalence of the catalog.
pub struct Rule {
    pub number: u8,
    /// The equivalence in text form, left side first.
    pub title: &'static str,
    /// Side condition beyond the shapes, if any.
    pub guard: Option<&'static str>,
    /// The two sides are mirror images, so the rule has no backward direction.
    pub symmetric: bool,
    /// Applying the rule evaluates a subexpression (brTPF bindings).
    pub materializing: bool,
    /// Derivable from other rules of the catalog.
    pub removable: bool,
    forward: Matcher,
    backward: Option<Matcher>,
}

impl Rule {
    pub fn has_backward(&self) -> bool {
        self.backward.is_some()
    }

    pub fn directions(&self) -> Vec<RuleId> {
        let mut out = vec![RuleId::forward(self.number)];
        if self.has_backward() {
            out.push(RuleId::backward(self.number));
        }
        out
    }

    fn matcher(&self, direction: Direction) -> Option<Matcher> {
        match direction {
            Direction::Forward => Some(self.forward),
            Direction::Backward => self.backward,
        }
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule")
            .field("number", &self.number)
            .field("title", &self.title)
            .finish_non_exhaustive()
    }
}

macro_rules! rule {
    ($n:expr, $title:expr, $fwd:path, $bwd:expr) => {
        Rule {
            number: $n,
            title: $title,
            guard: None,
            symmetric: false,
            materializing: false,
            removable: false,
            forward: $fwd,
            backward: $bwd,
        }
    };
}

static CATALOG: [Rule; 38] = {
    use rules::*;
    [
        rule!(
            1,
            "join(req tp@m, φ) ≡ tpAdd(φ, tp)@m",
            r1_fwd,
            Some(r1_bwd)
        ),
        rule!(
            2,
            "join(req tp@m, join(φ, φ')) ≡ join(tpAdd(φ, tp)@m, φ')",
            r2_fwd,
            Some(r2_bwd)
        ),
        rule!(3, "join(req B@m, φ) ≡ bgpAdd(φ, B)@m", r3_fwd, Some(r3_bwd)),
        rule!(
            4,
            "join(req B@m, join(φ, φ')) ≡ join(bgpAdd(φ, B)@m, φ')",
            r4_fwd,
            Some(r4_bwd)
        ),
        rule!(
            5,
            "join(req B1@m, req B2@m) ≡ req B1 ∪ B2@m",
            r5_fwd,
            Some(r5_bwd)
        ),
        rule!(
            6,
            "bgpAdd(req B2@m, B1)@m ≡ req B1 ∪ B2@m",
            r6_fwd,
            Some(r6_bwd)
        ),
        rule!(
            7,
            "bgpAdd(bgpAdd(φ, B2)@m, B1)@m ≡ bgpAdd(φ, B1 ∪ B2)@m",
            r7_fwd,
            Some(r7_bwd)
        ),
        rule!(8, "req tp@m ≡ req {tp}@m", r8_fwd, Some(r8_bwd)),
        rule!(
            9,
            "req {tp1, ..., tpn}@m ≡ join(...join(req tp1@m, req tp2@m)..., req tpn@m)",
            r9_fwd,
            Some(r9_bwd)
        ),
        rule!(
            10,
            "req {tp1, ..., tpn}@m ≡ tpAdd(...tpAdd(req tp1@m, tp2)@m..., tpn)@m",
            r10_fwd,
            Some(r10_bwd)
        ),
        rule!(
            11,
            "bgpAdd(φ, {tp1, ..., tpn})@m ≡ tpAdd(...tpAdd(φ, tp1)@m..., tpn)@m",
            r11_fwd,
            Some(r11_bwd)
        ),
        rule!(
            12,
            "bgpAdd(req tp@m, B)@m ≡ req B ∪ {tp}@m",
            r12_fwd,
            Some(r12_bwd)
        ),
        rule!(
            13,
            "tpAdd(req B@m, tp)@m ≡ req B ∪ {tp}@m",
            r13_fwd,
            Some(r13_bwd)
        ),
        rule!(
            14,
            "tpAdd(bgpAdd(φ, B)@m, tp)@m ≡ bgpAdd(φ, B ∪ {tp})@m",
            r14_fwd,
            Some(r14_bwd)
        ),
        Rule {
            guard: Some("m is brTPF, Ω = sols(φ) is nonempty and binds only variables of tp"),
            materializing: true,
            ..rule!(15, "join(req tp@m, φ) ≡ req (tp, Ω)@m", r15_fwd, None)
        },
        Rule {
            guard: Some("m is brTPF, Ω = sols(φ) is nonempty and binds only variables of tp"),
            materializing: true,
            ..rule!(16, "tpAdd(φ, tp)@m ≡ req (tp, Ω)@m", r16_fwd, None)
        },
        Rule {
            guard: Some("P1 and P2 have the same normal form"),
            ..rule!(17, "req P1@m ≡ req P2@m", r17_fwd, None)
        },
        rule!(
            18,
            "union(req P1@m, req P2@m) ≡ req (P1 UNION P2)@m",
            r18_fwd,
            Some(r18_bwd)
        ),
        rule!(
            19,
            "join(req P1@m, req P2@m) ≡ req (P1 AND P2)@m",
            r19_fwd,
            Some(r19_bwd)
        ),
        Rule {
            removable: true,
            ..rule!(
                20,
                "tpAdd(req P@m, tp)@m ≡ req (P AND {tp})@m",
                r20_fwd,
                Some(r20_bwd)
            )
        },
        Rule {
            removable: true,
            ..rule!(
                21,
                "bgpAdd(req P@m, B)@m ≡ req (P AND B)@m",
                r21_fwd,
                Some(r21_bwd)
            )
        },
        Rule {
            symmetric: true,
            ..rule!(
                22,
                "tpAdd(tpAdd(φ, tp2)@m2, tp1)@m1 ≡ tpAdd(tpAdd(φ, tp1)@m1, tp2)@m2",
                r22_fwd,
                None
            )
        },
        rule!(
            23,
            "tpAdd(bgpAdd(φ, B)@m3, tp)@m1 ≡ bgpAdd(tpAdd(φ, tp)@m1, B)@m3",
            r23_fwd,
            Some(r23_bwd)
        ),
        Rule {
            symmetric: true,
            ..rule!(
                24,
                "bgpAdd(bgpAdd(φ, B2)@m4, B1)@m3 ≡ bgpAdd(bgpAdd(φ, B1)@m3, B2)@m4",
                r24_fwd,
                None
            )
        },
        Rule {
            guard: Some("backward: φ ∉ Φ"),
            ..rule!(25, "mj Φ ≡ join(mj (Φ - {φ}), φ)", r25_fwd, Some(r25_bwd))
        },
        rule!(26, "mu Φ ≡ union(mu (Φ - {φ}), φ)", r26_fwd, Some(r26_bwd)),
        Rule {
            guard: Some("φ1 ≠ φ2 and neither is among the other operands"),
            ..rule!(
                27,
                "mj ({join(φ1, φ2)} ∪ Φ) ≡ mj ({φ1, φ2} ∪ Φ)",
                r27_fwd,
                Some(r27_bwd)
            )
        },
        rule!(
            28,
            "mu ({union(φ1, φ2)} ∪ Φ) ≡ mu ({φ1, φ2} ∪ Φ)",
            r28_fwd,
            Some(r28_bwd)
        ),
        Rule {
            guard: Some("Φ' and Φ are disjoint"),
            ..rule!(29, "mj ({mj Φ'} ∪ Φ) ≡ mj (Φ' ∪ Φ)", r29_fwd, Some(r29_bwd))
        },
        rule!(30, "mu ({mu Φ'} ∪ Φ) ≡ mu (Φ' ∪ Φ)", r30_fwd, Some(r30_bwd)),
        rule!(31, "mu {φ} ≡ φ", r31_fwd, Some(r31_bwd)),
        rule!(32, "mj {φ} ≡ φ", r32_fwd, Some(r32_bwd)),
        Rule {
            symmetric: true,
            ..rule!(33, "join(φ1, φ2) ≡ join(φ2, φ1)", r33_fwd, None)
        },
        Rule {
            symmetric: true,
            ..rule!(34, "union(φ1, φ2) ≡ union(φ2, φ1)", r34_fwd, None)
        },
        rule!(35, "union(φ, φ) ≡ φ", r35_fwd, Some(r35_bwd)),
        rule!(
            36,
            "join(φ1, join(φ2, φ3)) ≡ join(join(φ1, φ2), φ3)",
            r36_fwd,
            Some(r36_bwd)
        ),
        rule!(
            37,
            "union(φ1, union(φ2, φ3)) ≡ union(union(φ1, φ2), φ3)",
            r37_fwd,
            Some(r37_bwd)
        ),
        rule!(
            38,
            "join(φ1, union(φ2, φ3)) ≡ union(join(φ1, φ2), join(φ1, φ3))",
            r38_fwd,
            Some(r38_bwd)
        ),
    ]
};

/// The catalog, ordered by number.
pub fn rules() -> &'static [Rule] {
    &CATALOG
}

pub fn rule(number: u8) -> Option<&'static Rule> {
    CATALOG.get(usize::from(number).checked_sub(1)?)
}

/// A way to apply one rule at one position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleMatch {
    pub rule: RuleId,
    /// Child indices from the root, as in [`Expr::at`].
    pub position: Vec<usize>,
    pub bindings: Bindings,
    /// The subexpression that replaces the one at `position`.
    pub replacement: Expr,
    /// The whole expression after the rewrite.
    pub result: Expr,
}

/// Which rules a search may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSelection {
    pub numbers: BTreeSet<u8>,
    /// Whether rules that evaluate subexpressions (15 and 16) may fire.
    pub allow_materializing: bool,
}

impl RuleSelection {
    pub fn all() -> Self {
        RuleSelection {
            numbers: (1..=38).collect(),
            allow_materializing: false,
        }
    }

    pub fn only<I: IntoIterator<Item = u8>>(numbers: I) -> Self {
        RuleSelection {
            numbers: numbers.into_iter().collect(),
            allow_materializing: false,
        }
    }

    pub fn permits(&self, rule: &Rule) -> bool {
        self.numbers.contains(&rule.number) && (self.allow_materializing || !rule.materializing)
    }
}

impl Default for RuleSelection {
    fn default() -> Self {
        RuleSelection::all()
    }
}

/// Parses lists like `1-14,33,35-38`.
pub fn parse_rule_selection(text: &str) -> Result<BTreeSet<u8>, RewriteError> {
    let bad = || RewriteError::InvalidRuleSpec(text.to_string());
    let num = |s: &str| -> Result<u8, RewriteError> {
        let n: u8 = s.trim().parse().map_err(|_| bad())?;
        if (1..=38).contains(&n) {
            Ok(n)
        } else {
            Err(bad())
        }
    };
    let mut out = BTreeSet::new();
    for part in text.split(',') {
        if part.trim().is_empty() {
            return Err(bad());
        }
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => {
                out.insert(num(part)?);
            }
        }
    }
    Ok(out)
}

/// Replaces the subexpression at `path`, refusing if the new operand of an
/// enclosing `mj` coincides with one of its siblings.
fn replace_checked(e: &Expr, path: &[usize], new: &Expr) -> Option<Expr> {
    let Some((&i, rest)) = path.split_first() else {
        return Some(new.clone());
    };
    let child = e.children().get(i).copied()?;
    let replaced = replace_checked(child, rest, new)?;
    if let Expr::Mj(set) = e {
        if &replaced != child && set.contains(&replaced) {
            return None;
        }
    }
    e.replace_at(&[i], replaced)
}

fn matches_at(
    e: &Expr,
    position: &[usize],
    sub: &Expr,
    rule: &Rule,
    direction: Direction,
    cx: &MatchCtx<'_>,
) -> Vec<RuleMatch> {
    let Some(matcher) = rule.matcher(direction) else {
        return Vec::new();
    };
    matcher(sub, cx)
        .into_iter()
        .filter(|(_, replacement)| replacement != sub)
        .filter_map(|(bindings, replacement)| {
            let result = replace_checked(e, position, &replacement)?;
            Some(RuleMatch {
                rule: RuleId {
                    number: rule.number,
                    direction,
                },
                position: position.to_vec(),
                bindings,
                replacement,
                result,
            })
        })
        .collect()
}

fn context(f: &Federation) -> MatchCtx<'_> {
    MatchCtx {
        federation: f,
        eval: EvalContext::new(f),
    }
}

/// Every match of the selected rules in `e`, by preorder position, then rule
/// number, forward before backward.
pub fn applicable_rules_with(
    e: &Expr,
    f: &Federation,
    selection: &RuleSelection,
) -> Result<Vec<RuleMatch>, RewriteError> {
    validate(e, f)?;
    let cx = context(f);
    let mut out = Vec::new();
    for (position, sub) in e.positions() {
        for rule in rules().iter().filter(|r| selection.permits(r)) {
            for id in rule.directions() {
                out.extend(matches_at(e, &position, sub, rule, id.direction, &cx));
            }
        }
    }
    Ok(out)
}

/// Every match of every rule in `e`, materializing rules included.
pub fn applicable_rules(e: &Expr, f: &Federation) -> Result<Vec<RuleMatch>, RewriteError> {
    let selection = RuleSelection {
        allow_materializing: true,
        ..RuleSelection::all()
    };
    applicable_rules_with(e, f, &selection)
}

/// Re-checks `m` against `e` and returns the rewritten expression.
pub fn apply_rule(e: &Expr, m: &RuleMatch, f: &Federation) -> Result<Expr, RewriteError> {
    validate(e, f)?;
    let stale = || RewriteError::StaleMatch {
        rule: m.rule,
        position: m.position.clone(),
    };
    let sub = e.at(&m.position).ok_or_else(stale)?;
    let rule = rule(m.rule.number).ok_or_else(stale)?;
    let cx = context(f);
    matches_at(e, &m.position, sub, rule, m.rule.direction, &cx)
        .into_iter()
        .find(|candidate| {
            candidate.bindings == m.bindings && candidate.replacement == m.replacement
        })
        .map(|candidate| candidate.result)
        .ok_or_else(stale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteBudget {
    /// Stop once this many distinct expressions are known.
    pub max_expressions: usize,
    /// Stop after expanding this many expressions.
    pub max_steps: usize,
}

impl Default for RewriteBudget {
    fn default() -> Self {
        RewriteBudget {
            max_expressions: 1000,
            max_steps: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exploration {
    /// Every expression reached, the start included, in discovery order.
    pub expressions: Vec<Expr>,
    /// Whether the budget ran out before the search space was exhausted.
    pub truncated: bool,
}

/// Breadth-first closure of `e` under the selected rules.
pub fn explore_equivalents(
    e: &Expr,
    f: &Federation,
    budget: RewriteBudget,
    selection: &RuleSelection,
) -> Result<Exploration, RewriteError> {
    if budget.max_expressions == 0 {
        return Err(RewriteError::InvalidBudget);
    }
    validate(e, f)?;
    let mut seen: BTreeSet<Expr> = BTreeSet::from([e.clone()]);
    let mut order = vec![e.clone()];
    let mut queue = VecDeque::from([e.clone()]);
    let mut steps = 0;
    while let Some(current) = queue.pop_front() {
        if order.len() >= budget.max_expressions || steps >= budget.max_steps {
            return Ok(Exploration {
                expressions: order,
                truncated: true,
            });
        }
        steps += 1;
        for m in applicable_rules_with(&current, f, selection)? {
            if seen.insert(m.result.clone()) {
                if order.len() >= budget.max_expressions {
                    return Ok(Exploration {
                        expressions: order,
                        truncated: true,
                    });
                }
                order.push(m.result.clone());
                queue.push_back(m.result);
            }
        }
    }
    Ok(Exploration {
        expressions: order,
        truncated: false,
    })
}

#[cfg(test)]
mod tests;
