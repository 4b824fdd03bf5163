//! End-to-end acceptance checks over the running example, the LS6 source
//! assignments and seeded random instances. Prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fedqpl::eval::{membership_in_bgp, membership_in_sols};
use fedqpl::expr::validate;
use fedqpl::federation::load_manifest;
use fedqpl::generate;
use fedqpl::rewrite::{applicable_rules, rule, rules, RuleId};
use fedqpl::sample::{mu1, mu2};
use fedqpl::selection::{
    decide_source_selection, exhaustive_assignment, find_minimal, find_minimal_in_class,
    min_node_cover, node_cover_reduce, sa_cost, CandidateSpace, Class,
};
use fedqpl::{
    parse_bgp, parse_expr, Bgp, EvalContext, Expr, Federation, SolutionMapping, SolutionSet,
    Variable,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SEED: u64 = 0x5eed_2024;
const RULE_INSTANCES: usize = 100;
const RULE_ATTEMPTS: usize = 20_000;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

fn read(rel: &str) -> String {
    fs::read_to_string(fixture(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

fn federation(dir: &str) -> Federation {
    load_manifest(&fixture(&format!("{dir}/manifest.txt"))).expect("fixture manifest loads")
}

fn query(dir: &str) -> Bgp {
    parse_bgp(read(&format!("{dir}/query.txt")).trim()).expect("fixture query parses")
}

fn expr(dir: &str, name: &str, f: &Federation) -> Expr {
    parse_expr(read(&format!("{dir}/{name}.fql")).trim(), f).expect("fixture expression parses")
}

fn set(items: impl IntoIterator<Item = SolutionMapping>) -> SolutionSet {
    items.into_iter().collect()
}

type Criterion = (fn() -> Outcome, Duration, &'static str);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c1() -> Outcome {
    let f = federation("running");
    let got = EvalContext::new(&f).expected(&query("running"));
    outcome(
        got == set([mu1(), mu2()]),
        format!("{} solutions", got.len()),
    )
}

fn c2() -> Outcome {
    let f = federation("running");
    let ctx = EvalContext::new(&f);
    let cases = [
        ("req_bgp_m3", set([mu2()])),
        ("tp_add", set([mu1()])),
        ("union", set([mu1(), mu2()])),
    ];
    let mut ok = 0;
    for (name, want) in &cases {
        if ctx.sols(&expr("running", name, &f)).ok().as_ref() == Some(want) {
            ok += 1;
        }
    }
    outcome(
        ok == cases.len(),
        format!("{ok}/{} expressions match", cases.len()),
    )
}

fn c3() -> Outcome {
    let f = federation("running");
    let valid = ["req_tp1_m1", "req_tp2_m2", "req_bgp_m3", "tp_add", "union"];
    let accepted = valid
        .iter()
        .filter(|n| validate(&expr("running", n, &f), &f).is_ok())
        .count();
    let mut rejected = 0;
    let mut messages = Vec::new();
    for name in ["invalid_bgp_req", "invalid_bgp_add"] {
        let e = fedqpl::parse_expr_unbound(read(&format!("running/{name}.fql")).trim()).unwrap();
        if let Err(err) = validate(&e, &f) {
            let msg = err.to_string();
            if msg.contains("does not support BGP requests")
                && msg.contains("m1") != msg.contains("m2")
            {
                rejected += 1;
            }
            messages.push(msg);
        }
    }
    outcome(
        accepted == valid.len() && rejected == 2,
        format!(
            "{accepted}/{} accepted, {rejected}/2 rejected: {}",
            valid.len(),
            messages.join("; ")
        ),
    )
}

fn c4() -> Outcome {
    let f = federation("running");
    let b = query("running");
    let ex = exhaustive_assignment(&b, &f)
        .map(|a| sa_cost(&a))
        .unwrap_or(0);
    let a = sa_cost(&expr("running", "a_ex", &f));
    let a2 = sa_cost(&expr("running", "a_prime_ex", &f));
    let ls6 = federation("ls6");
    let table: Vec<usize> = ["fedx", "semagrow", "costfed"]
        .iter()
        .map(|n| sa_cost(&expr("ls6", n, &ls6)))
        .collect();
    outcome(
        (ex, a, a2) == (6, 4, 3) && table == [5, 6, 2],
        format!("exhaustive {ex}, a_ex {a}, a'_ex {a2}, LS6 {table:?}"),
    )
}

fn c5() -> Outcome {
    let f = federation("running");
    let b = query("running");
    let min = find_minimal(&b, &f, CandidateSpace::default())
        .ok()
        .flatten()
        .map(|(_, c)| c);
    let s_star = find_minimal_in_class(&b, &f, Class::SStar)
        .ok()
        .flatten()
        .map(|(_, c)| c);
    let s = find_minimal_in_class(&b, &f, Class::S)
        .ok()
        .flatten()
        .map(|(_, c)| c);
    outcome(
        min == Some(3) && s_star == Some(4) && s == Some(4),
        format!("minimal {min:?}, S* {s_star:?}, S {s:?}"),
    )
}

fn c6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut ok = 0;
    for _ in 0..100 {
        let f = generate::random_federation(&mut rng, 3, 6);
        let b = generate::random_bgp(&mut rng, 3);
        let ctx = EvalContext::new(&f);
        if exhaustive_assignment(&b, &f).is_ok_and(|a| ctx.is_correct(&a, &b)) {
            ok += 1;
        }
    }
    outcome(ok == 100, format!("{ok}/100 correct"))
}

/// Counts guarded root instances per rule direction and semantic failures.
fn c7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut failures = 0;
    let mut short = Vec::new();
    let mut fewest = usize::MAX;
    for r in rules() {
        let (mut forward, mut backward) = (0, 0);
        let needs_backward = r.has_backward();
        let mut attempts = 0;
        while (forward < RULE_INSTANCES || (needs_backward && backward < RULE_INSTANCES))
            && attempts < RULE_ATTEMPTS
        {
            attempts += 1;
            let f = generate::rule_federation(&mut rng, 6);
            let lhs = generate::random_rule_instance(&mut rng, &f, r.number);
            let ctx = EvalContext::new(&f);
            let Ok(found) = applicable_rules(&lhs, &f) else {
                continue;
            };
            let root = |id: RuleId| {
                move |m: &&fedqpl::rewrite::RuleMatch| m.rule == id && m.position.is_empty()
            };
            let Some(m) = found.iter().find(root(RuleId::forward(r.number))) else {
                continue;
            };
            forward += 1;
            if !ctx.sem_equiv(&lhs, &m.result).unwrap_or(false) {
                failures += 1;
            }
            if needs_backward {
                if let Ok(back) = applicable_rules(&m.result, &f) {
                    for bm in back.iter().filter(root(RuleId::backward(r.number))) {
                        backward += 1;
                        if !ctx.sem_equiv(&m.result, &bm.result).unwrap_or(false) {
                            failures += 1;
                        }
                    }
                }
            }
        }
        let least = if needs_backward {
            forward.min(backward)
        } else {
            forward
        };
        fewest = fewest.min(least);
        if least < RULE_INSTANCES {
            short.push(format!("{}({forward}/{backward})", r.number));
        }
    }
    let guarded =
        rule(15).is_some_and(|r| r.guard.is_some()) && rule(16).is_some_and(|r| r.guard.is_some());
    outcome(
        failures == 0 && short.is_empty() && guarded,
        format!(
            "38 rules, at least {fewest} instances per direction, {failures} failures{}",
            if short.is_empty() {
                String::new()
            } else {
                format!(", too few: {}", short.join(" "))
            }
        ),
    )
}

fn c8() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let (mut sols_bad, mut bgp_bad, mut members) = (0, 0, 0);
    for _ in 0..200 {
        let f = generate::random_federation(&mut rng, 3, 5);
        let b = generate::random_bgp(&mut rng, 3);
        let a = generate::random_source_assignment(&mut rng, &f, &b, 3);
        let ctx = EvalContext::new(&f);
        let actual = ctx.sols(&a).expect("generated assignments are valid");
        let vars: Vec<Variable> = a.vars().into_iter().collect();
        let mu = if !actual.is_empty() && rng.gen_bool(0.5) {
            actual
                .iter()
                .nth(rng.gen_range(0..actual.len()))
                .unwrap()
                .clone()
        } else {
            generate::random_mapping(&mut rng, &vars)
        };
        let want = actual.contains(&mu);
        members += usize::from(want);
        if membership_in_sols(&mu, &a, &ctx).ok() != Some(want) {
            sols_bad += 1;
        }
        let expected = ctx.expected(&b);
        let bvars: Vec<Variable> = b.vars().into_iter().collect();
        let nu = match expected.iter().next() {
            Some(nu) if rng.gen_bool(0.5) => nu.clone(),
            _ => generate::random_mapping(&mut rng, &bvars),
        };
        if membership_in_bgp(&nu, &b, &f) != expected.contains(&nu) {
            bgp_bad += 1;
        }
    }
    outcome(
        sols_bad == 0 && bgp_bad == 0,
        format!("200 triples ({members} members), {sols_bad} assignment and {bgp_bad} BGP discrepancies"),
    )
}

fn c9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    for i in 0..50 {
        let g = generate::random_undirected_graph(&mut rng, 6, 9);
        let cover = min_node_cover(&g).expect("small graph");
        let red = node_cover_reduce(&g, cover).expect("cover is positive");
        let space = CandidateSpace::default();
        let min = find_minimal(&red.bgp, &red.federation, space)
            .ok()
            .flatten()
            .map(|(_, c)| c);
        let at = decide_source_selection(&red.bgp, &red.federation, cover, space).unwrap_or(false);
        let below = cover > 1
            && decide_source_selection(&red.bgp, &red.federation, cover - 1, space).unwrap_or(true);
        if min != Some(cover) || !at || below {
            bad.push(format!(
                "graph {i}: cover {cover}, min {min:?}, at {at}, below {below}"
            ));
        }
    }
    outcome(
        bad.is_empty(),
        format!("{}/50 graphs agree {}", 50 - bad.len(), bad.join("; ")),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (c1, Duration::from_secs(1), "federation semantics"),
        (c2, Duration::from_secs(1), "plan semantics"),
        (c3, Duration::from_secs(1), "validity diagnostics"),
        (c4, Duration::from_secs(1), "sa-cost"),
        (
            c5,
            Duration::from_secs(10),
            "minimal assignments and classes",
        ),
        (
            c6,
            Duration::from_secs(30),
            "exhaustive assignment correctness",
        ),
        (
            c7,
            Duration::from_secs(120),
            "equivalence catalog soundness",
        ),
        (c8, Duration::from_secs(30), "membership decisions"),
        (c9, Duration::from_secs(60), "node-cover reduction"),
    ];
    let mut failed = BTreeSet::new();
    for (i, (check, limit, name)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let pass = result.pass && elapsed <= limit;
        if !pass {
            failed.insert(i + 1);
        }
        println!(
            "criterion {}: {} {name}: {} [{:.2?} of {:?}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed,
            limit
        );
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
