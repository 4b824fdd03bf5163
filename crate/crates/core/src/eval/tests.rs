use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;
use crate::expr::parse_expr;
use crate::generate;
use crate::rdf::{SolutionMapping, Term, Variable};
use crate::sample::{self, mu1, mu2};

fn parse(text: &str) -> Expr {
    parse_expr(text, &sample::federation()).unwrap()
}

const BGP_AT_M3: &str = "req[{?x <knows> ?y . ?y <name> ?z}]@m3";
const TPADD: &str = "tpAdd(req[?x <knows> ?y]@m1, ?y <name> ?z)@m2";
const UNION: &str =
    "union(req[{?x <knows> ?y . ?y <name> ?z}]@m3, tpAdd(req[?x <knows> ?y]@m1, ?y <name> ?z)@m2)";
const A_EX: &str = "mj{mu{req[?x <knows> ?y]@m1, req[?x <knows> ?y]@m3}, \
                    mu{req[?y <name> ?z]@m2, req[?y <name> ?z]@m3}}";
const A_PRIME_EX: &str =
    "mu{mj{req[?x <knows> ?y]@m1, req[?y <name> ?z]@m2}, req[{?x <knows> ?y . ?y <name> ?z}]@m3}";

fn set(items: impl IntoIterator<Item = SolutionMapping>) -> SolutionSet {
    items.into_iter().collect()
}

fn mapping(pairs: &[(&str, Term)]) -> SolutionMapping {
    SolutionMapping::from_pairs(pairs.iter().map(|(v, t)| (Variable::new(*v), t.clone()))).unwrap()
}

#[test]
fn solutions_of_the_example_plans() {
    let f = sample::federation();
    let ctx = EvalContext::new(&f);
    assert_eq!(ctx.sols(&parse(BGP_AT_M3)).unwrap(), set([mu2()]));
    assert_eq!(ctx.sols(&parse(TPADD)).unwrap(), set([mu1()]));
    assert_eq!(ctx.sols(&parse(UNION)).unwrap(), set([mu1(), mu2()]));
}

#[test]
fn invalid_expressions_are_not_evaluated() {
    let f = sample::federation();
    let ctx = EvalContext::new(&f);
    let e = parse("req[{?x <knows> ?y . ?y <name> ?z}]@m1");
    assert!(matches!(ctx.sols(&e), Err(EvalError::Invalid(_))));
    assert!(!ctx.is_correct(&e, &sample::bgp()));
}

#[test]
fn correctness() {
    let f = sample::federation();
    let ctx = EvalContext::new(&f);
    let b = sample::bgp();
    assert_eq!(ctx.expected(&b), set([mu1(), mu2()]));
    assert!(ctx.is_correct(&parse(UNION), &b));
    assert!(ctx.is_correct(&parse(A_EX), &b));
    assert!(ctx.is_correct(&parse(A_PRIME_EX), &b));
    assert!(!ctx.is_correct(&parse("req[?x <knows> ?y]@m1"), &b));
}

#[test]
fn semantic_equivalence() {
    let f = sample::federation();
    let ctx = EvalContext::new(&f);
    let swapped = parse("join(req[?y <name> ?z]@m2, req[?x <knows> ?y]@m1)");
    assert!(ctx.sem_equiv(&parse(TPADD), &swapped).unwrap());
    assert!(ctx.sem_equiv(&swapped, &swapped).unwrap());
    let a = parse("req[?x <knows> ?y]@m1");
    let b = parse("req[?y <name> ?z]@m2");
    assert!(!ctx.sem_equiv(&a, &b).unwrap());
}

#[test]
fn brtpf_requests_with_empty_bindings_are_unfiltered() {
    let f = sample::federation();
    let ctx = EvalContext::new(&f);
    let plain = ctx.sols(&parse("req[?x <knows> ?y]@m1")).unwrap();
    let empty = ctx.sols(&parse("req[(?x <knows> ?y | {})]@m1")).unwrap();
    assert_eq!(plain, empty);
    let filtered = ctx
        .sols(&parse("req[(?x <knows> ?y | {?y=<b>})]@m1"))
        .unwrap();
    assert!(filtered.is_empty());
}

#[test]
fn bgp_membership() {
    let f = sample::federation();
    let b = sample::bgp();
    assert!(membership_in_bgp(&mu1(), &b, &f));
    let partial = mapping(&[("x", Term::iri("a")), ("y", Term::iri("c"))]);
    assert!(!membership_in_bgp(&partial, &b, &f));
    let wrong = mapping(&[
        ("x", Term::iri("a")),
        ("y", Term::iri("c")),
        ("z", Term::literal("Alice")),
    ]);
    assert!(!membership_in_bgp(&wrong, &b, &f));
}

#[test]
fn assignment_membership() {
    let f = sample::federation();
    let ctx = EvalContext::new(&f);
    let a_prime = parse(A_PRIME_EX);
    assert!(membership_in_sols(&mu1(), &a_prime, &ctx).unwrap());
    assert!(membership_in_sols(&mu2(), &a_prime, &ctx).unwrap());

    let leaf = parse("req[?x <knows> ?y]@m1");
    assert!(!membership_in_sols(&mu1(), &leaf, &ctx).unwrap());
    let restricted = mapping(&[("x", Term::iri("a")), ("y", Term::iri("c"))]);
    assert!(membership_in_sols(&restricted, &leaf, &ctx).unwrap());

    let mj_branch = parse("mj{req[?x <knows> ?y]@m1, req[?y <name> ?z]@m2}");
    assert!(!membership_in_sols(&mu2(), &mj_branch, &ctx).unwrap());
    assert!(!naive_membership(&mu2(), &mj_branch, &ctx).unwrap());

    assert!(matches!(
        membership_in_sols(&mu1(), &parse(TPADD), &ctx),
        Err(EvalError::NotSourceAssignment(_))
    ));
}

#[test]
fn naive_membership_misses_narrow_join_operands() {
    let f = sample::federation();
    let ctx = EvalContext::new(&f);
    let a = parse("mj{mu{req[?x <knows> ?y]@m1, req[?y <name> ?z]@m2}, req[?y <name> ?z]@m2}");
    let mu = mapping(&[("y", Term::iri("c")), ("z", Term::literal("Lee"))]);
    assert!(ctx.sols(&a).unwrap().contains(&mu));
    assert!(membership_in_sols(&mu, &a, &ctx).unwrap());
    assert!(!naive_membership(&mu, &a, &ctx).unwrap());
}

#[test]
fn domains_of_assignments() {
    let a = parse("mj{mu{req[?x <knows> ?y]@m1, req[?y <name> ?z]@m2}, req[?y <name> ?z]@m2}");
    let names = |d: &BTreeSet<Variable>| {
        d.iter()
            .map(|v| v.name().to_string())
            .collect::<Vec<_>>()
            .join("")
    };
    let domains: Vec<String> = possible_domains(&a).iter().map(names).collect();
    assert_eq!(domains, ["xyz", "yz"]);
}

use std::collections::BTreeSet;

/// Candidate mappings: members of the actual result, their restrictions,
/// and random mappings over the assignment's variables.
fn candidates(rng: &mut StdRng, a: &Expr, actual: &SolutionSet) -> Vec<SolutionMapping> {
    let vars: Vec<Variable> = a.vars().into_iter().collect();
    let mut out: Vec<SolutionMapping> = actual.iter().take(3).cloned().collect();
    for mu in actual.iter().take(2) {
        let keep: BTreeSet<Variable> = vars.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        out.push(mu.restrict(&keep));
    }
    for _ in 0..3 {
        out.push(generate::random_mapping(rng, &vars));
    }
    out
}

proptest! {
    #[test]
    fn membership_agrees_with_materialization(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = generate::random_federation(&mut rng, 3, 5);
        let b = generate::random_bgp(&mut rng, 3);
        let a = generate::random_source_assignment(&mut rng, &f, &b, 3);
        let ctx = EvalContext::new(&f);
        let actual = ctx.sols(&a).unwrap();
        for mu in candidates(&mut rng, &a, &actual) {
            prop_assert_eq!(membership_in_sols(&mu, &a, &ctx).unwrap(), actual.contains(&mu));
        }
    }

    #[test]
    fn naive_membership_agrees_on_single_domain_operands(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = generate::random_federation(&mut rng, 3, 5);
        let b = generate::random_bgp(&mut rng, 3);
        let a = generate::random_source_assignment(&mut rng, &f, &b, 3);
        let single = a.subexprs().into_iter().all(|s| possible_domains(s).len() == 1);
        prop_assume!(single);
        let ctx = EvalContext::new(&f);
        let actual = ctx.sols(&a).unwrap();
        for mu in candidates(&mut rng, &a, &actual) {
            prop_assert_eq!(naive_membership(&mu, &a, &ctx).unwrap(), actual.contains(&mu));
        }
    }

    #[test]
    fn bgp_membership_agrees_with_evaluation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = generate::random_federation(&mut rng, 3, 6);
        let b = generate::random_bgp(&mut rng, 3);
        let ctx = EvalContext::new(&f);
        let expected = ctx.expected(&b);
        let vars: Vec<Variable> = b.vars().into_iter().collect();
        let mut cands: Vec<SolutionMapping> = expected.iter().take(3).cloned().collect();
        cands.extend((0..4).map(|_| generate::random_mapping(&mut rng, &vars)));
        for mu in cands {
            prop_assert_eq!(membership_in_bgp(&mu, &b, &f), expected.contains(&mu));
        }
    }

    #[test]
    fn operand_order_does_not_matter(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let f = generate::random_federation(&mut rng, 3, 5);
        let e = generate::random_expr(&mut rng, &f, 3);
        let ctx = EvalContext::new(&f);
        let reparsed = parse_expr(&e.to_string(), &f).unwrap();
        prop_assert_eq!(ctx.sols(&e).unwrap(), ctx.sols(&reparsed).unwrap());
    }
}
