use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use super::*;
use crate::expr::parse_expr;
use crate::expr::parse_graph_pattern;
use crate::generate::{random_expr, random_federation, random_rule_instance, rule_federation};
use crate::sample;

fn parse(text: &str) -> Expr {
    parse_expr(text, &sample::federation()).unwrap()
}

fn pattern(text: &str) -> GraphPattern {
    parse_graph_pattern(text).unwrap()
}

fn results(e: &Expr, rule: RuleId) -> Vec<Expr> {
    applicable_rules(e, &sample::federation())
        .unwrap()
        .into_iter()
        .filter(|m| m.rule == rule)
        .map(|m| m.result)
        .collect()
}

#[test]
fn catalog_is_numbered_in_order() {
    assert_eq!(rules().len(), 38);
    for (i, r) in rules().iter().enumerate() {
        assert_eq!(usize::from(r.number), i + 1);
    }
    let one_way: Vec<u8> = rules()
        .iter()
        .filter(|r| !r.has_backward())
        .map(|r| r.number)
        .collect();
    assert_eq!(one_way, vec![15, 16, 17, 22, 24, 33, 34]);
    assert!(rule(0).is_none() && rule(39).is_none());
}

#[test]
fn tp_add_and_join_are_interchangeable() {
    let lhs = parse("tpAdd(req[?x <knows> ?y]@m1, ?y <name> ?z)@m2");
    let rhs = parse("join(req[?y <name> ?z]@m2, req[?x <knows> ?y]@m1)");
    assert_eq!(results(&lhs, RuleId::backward(1)), vec![rhs.clone()]);
    assert_eq!(results(&rhs, RuleId::forward(1)), vec![lhs]);
}

#[test]
fn join_commutes() {
    let e = parse("join(req[?x <knows> ?y]@m1, req[?y <name> ?z]@m2)");
    let swapped = parse("join(req[?y <name> ?z]@m2, req[?x <knows> ?y]@m1)");
    assert_eq!(results(&e, RuleId::forward(33)), vec![swapped]);
}

#[test]
fn singleton_union_unwraps() {
    let e = parse("mu{req[?x <knows> ?y]@m3}");
    assert_eq!(
        results(&e, RuleId::forward(31)),
        vec![parse("req[?x <knows> ?y]@m3")]
    );
}

#[test]
fn mj_operands_never_merge() {
    // Unwrapping the inner mj would make it equal to its sibling.
    let e = parse("mj{req[?x <knows> ?y]@m3, mj{req[?x <knows> ?y]@m3}}");
    assert!(results(&e, RuleId::forward(32)).is_empty());
    // In a union the merge is harmless.
    let u = parse("mu{req[?x <knows> ?y]@m3, mu{req[?x <knows> ?y]@m3}}");
    assert_eq!(
        results(&u, RuleId::forward(31)),
        vec![parse("mu{req[?x <knows> ?y]@m3}")]
    );
}

#[test]
fn brtpf_rule_respects_its_guard() {
    let f = sample::federation();
    // sols(φ) binds ?x and ?y, both variables of the pattern.
    let e = parse("join(req[?x <knows> ?y]@m1, req[?x <knows> ?y]@m3)");
    let found = results(&e, RuleId::forward(15));
    assert_eq!(found.len(), 1);
    assert!(EvalContext::new(&f).sem_equiv(&e, &found[0]).unwrap());
    // sols(φ) binds ?z, which the pattern lacks.
    let e = parse("join(req[?x <knows> ?y]@m1, req[?y <name> ?z]@m2)");
    assert!(results(&e, RuleId::forward(15)).is_empty());
    // Not offered when materializing rules are excluded.
    let e = parse("join(req[?x <knows> ?y]@m1, req[?x <knows> ?y]@m3)");
    let plain = applicable_rules_with(&e, &f, &RuleSelection::all()).unwrap();
    assert!(plain.iter().all(|m| m.rule.number != 15));
}

#[test]
fn apply_rule_detects_stale_matches() {
    let f = sample::federation();
    let e = parse("join(req[?x <knows> ?y]@m1, req[?y <name> ?z]@m2)");
    let m = applicable_rules(&e, &f)
        .unwrap()
        .into_iter()
        .next()
        .unwrap();
    assert_eq!(apply_rule(&e, &m, &f).unwrap(), m.result);
    let other = parse("req[?x <knows> ?y]@m3");
    assert!(matches!(
        apply_rule(&other, &m, &f),
        Err(RewriteError::StaleMatch { .. })
    ));
}

#[test]
fn invalid_expressions_are_rejected() {
    let f = sample::federation();
    let e = parse_expr("req[{?x <knows> ?y}]@m2", &f);
    let e =
        e.unwrap_or_else(|_| crate::expr::parse_expr_unbound("req[{?x <knows> ?y}]@m2").unwrap());
    assert!(matches!(
        applicable_rules(&e, &f),
        Err(RewriteError::Invalid(_))
    ));
}

#[test]
fn exploration_reaches_the_mirrored_tp_add() {
    let f = sample::federation();
    let start = parse("join(req[?y <name> ?z]@m2, req[?x <knows> ?y]@m1)");
    let target = parse("tpAdd(req[?y <name> ?z]@m2, ?x <knows> ?y)@m1");
    let found = explore_equivalents(
        &start,
        &f,
        RewriteBudget::default(),
        &RuleSelection::only([1, 33]),
    )
    .unwrap();
    assert!(!found.truncated);
    assert!(found.expressions.contains(&target));
    assert_eq!(found.expressions[0], start);
    let ctx = EvalContext::new(&f);
    for e in &found.expressions {
        assert!(ctx.sem_equiv(&start, e).unwrap());
    }
}

#[test]
fn exploration_budget_and_empty_rule_set() {
    let f = sample::federation();
    let start = parse("join(req[?y <name> ?z]@m2, req[?x <knows> ?y]@m1)");
    let tight = RewriteBudget {
        max_expressions: 1,
        max_steps: 100,
    };
    let found = explore_equivalents(&start, &f, tight, &RuleSelection::all()).unwrap();
    assert_eq!(found.expressions, vec![start.clone()]);
    assert!(found.truncated);
    let none = explore_equivalents(
        &start,
        &f,
        RewriteBudget::default(),
        &RuleSelection::only([]),
    )
    .unwrap();
    assert_eq!(none.expressions, vec![start.clone()]);
    assert!(!none.truncated);
    let zero = RewriteBudget {
        max_expressions: 0,
        max_steps: 1,
    };
    assert_eq!(
        explore_equivalents(&start, &f, zero, &RuleSelection::all()),
        Err(RewriteError::InvalidBudget)
    );
}

#[test]
fn rule_lists() {
    assert_eq!(
        parse_rule_selection("1-3,33").unwrap(),
        BTreeSet::from([1, 2, 3, 33])
    );
    assert_eq!(parse_rule_selection(" 38 ").unwrap(), BTreeSet::from([38]));
    for bad in ["", "0", "39", "3-1", "1,,2", "x", "1-"] {
        assert!(parse_rule_selection(bad).is_err(), "{bad:?}");
    }
}

#[test]
fn normal_forms() {
    let cases = [
        ("{?a <p> ?b}", "{?a <p> ?b}"),
        ("and({?b <q> ?c}, {?a <p> ?b})", "{?a <p> ?b . ?b <q> ?c}"),
        ("unionp({?a <p> ?b}, {?a <p> ?b})", "{?a <p> ?b}"),
        (
            "unionp({?b <q> ?c}, {?a <p> ?b})",
            "unionp({?a <p> ?b}, {?b <q> ?c})",
        ),
        (
            "and(unionp({?a <p> ?b}, {?c <q> ?d}), unionp({?c <q> ?d}, {?a <p> ?b}))",
            "and(unionp({?a <p> ?b}, {?c <q> ?d}), unionp({?a <p> ?b}, {?c <q> ?d}))",
        ),
        (
            "unionp({?a <p> ?b}, unionp({?c <q> ?d}, {?a <p> ?b}))",
            "unionp({?a <p> ?b}, {?c <q> ?d})",
        ),
    ];
    for (input, expected) in cases {
        assert_eq!(
            normalize_graph_pattern(&pattern(input)),
            pattern(expected),
            "{input}"
        );
    }
}

#[test]
fn pattern_rules_round_trip() {
    let f = sample::federation();
    let e = parse("union(req[?x <knows> ?y]@m3, req[{?y <name> ?z}]@m3)");
    let merged = results(&e, RuleId::forward(18));
    assert_eq!(merged.len(), 1);
    let back = applicable_rules(&merged[0], &f).unwrap();
    let split: Vec<&Expr> = back
        .iter()
        .filter(|m| m.rule == RuleId::backward(18))
        .map(|m| &m.result)
        .collect();
    assert_eq!(
        split,
        vec![&parse(
            "union(req[{?x <knows> ?y}]@m3, req[{?y <name> ?z}]@m3)"
        )]
    );
}

fn check_rule(rng: &mut StdRng, number: u8) -> Result<bool, TestCaseError> {
    let f = rule_federation(rng, 6);
    let e = random_rule_instance(rng, &f, number);
    let ctx = EvalContext::new(&f);
    let all = applicable_rules(&e, &f).unwrap();
    let Some(m) = all
        .iter()
        .find(|m| m.rule == RuleId::forward(number) && m.position.is_empty())
    else {
        return Ok(false);
    };
    prop_assert!(
        ctx.sem_equiv(&e, &m.result).unwrap(),
        "rule {} on {}",
        number,
        e
    );
    if rule(number).unwrap().has_backward() {
        for back in applicable_rules(&m.result, &f).unwrap() {
            if back.rule == RuleId::backward(number) && back.position.is_empty() {
                prop_assert!(ctx.sem_equiv(&e, &back.result).unwrap());
            }
        }
    }
    Ok(true)
}

#[test]
fn every_rule_has_instances() {
    let mut rng = StdRng::seed_from_u64(7);
    for number in 1..=38u8 {
        let hits = (0..200)
            .filter(|_| check_rule(&mut rng, number).unwrap())
            .count();
        assert!(hits > 0, "rule {number} never matched its own instances");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rule_instances_are_sound(seed in any::<u64>(), number in 1u8..=38) {
        let mut rng = StdRng::seed_from_u64(seed);
        check_rule(&mut rng, number)?;
    }

    #[test]
    fn every_match_preserves_solutions(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_federation(&mut rng, 3, 5);
        let e = random_expr(&mut rng, &f, 3);
        let ctx = EvalContext::new(&f);
        let before = ctx.sols(&e).unwrap();
        for m in applicable_rules(&e, &f).unwrap() {
            prop_assert_eq!(&ctx.sols(&m.result).unwrap(), &before, "{} at {:?}", m.rule, m.position);
        }
    }

    #[test]
    fn normal_form_preserves_results(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let p = crate::generate::random_graph_pattern(&mut rng, 3);
        let g = crate::generate::random_graph(&mut rng, 6, "n");
        let n = normalize_graph_pattern(&p);
        prop_assert_eq!(
            crate::federation::eval_graph_pattern(&p, &g),
            crate::federation::eval_graph_pattern(&n, &g)
        );
        prop_assert_eq!(normalize_graph_pattern(&n), n);
    }
}
