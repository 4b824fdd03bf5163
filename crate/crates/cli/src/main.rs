//! `fedqpl`: command-line front end for validating, evaluating, costing,
//! selecting, rewriting and comparing FedQPL plans over a federation
//! described by a manifest, plus generation of node-cover instances.
//!
//! Exit status: 0 on success, 1 when the answer is negative (invalid plan,
//! not equivalent, no assignment within the bound), 2 on usage or I/O errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, ValueEnum};
use fedqpl::expr::{is_source_assignment, validate};
use fedqpl::federation::load_manifest;
use fedqpl::rewrite::{explore_equivalents, parse_rule_selection, RewriteBudget, RuleSelection};
use fedqpl::selection::{
    decide_source_selection, find_minimal, find_minimal_in_class, in_class_joins_over_unions,
    in_class_restricted, node_cover_reduce, parse_undirected_graph, sa_cost, CandidateSpace, Class,
};
use fedqpl::{parse_bgp, parse_expr, Bgp, EvalContext, Expr, Federation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Check the federation and, with --expr, the validity of a plan.
    Validate,
    /// Print the solutions of a plan, one canonical line per mapping.
    Eval,
    /// Print the sa-cost of a source assignment.
    Cost,
    /// Find a minimal correct source assignment, or decide one within --bound.
    SourceSelect,
    /// Report membership of an assignment in the joins-over-unions classes.
    ClassCheck,
    /// Explore equivalent plans and print the one with the fewest requests.
    Optimize,
    /// Compare the solutions of two plans.
    Equiv,
    /// Turn an undirected graph into a source-selection instance.
    Reduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassArg {
    S,
    Sstar,
}

impl From<ClassArg> for Class {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::S => Class::S,
            ClassArg::Sstar => Class::SStar,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fedqpl",
    version,
    about = "Logical query plans over federations of RDF sources"
)]
struct Cli {
    command: Command,
    /// Federation manifest: `member <id> <sparql|tpf|brtpf> <file.nt>` lines.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// File holding one BGP, e.g. `{?x <p> ?y . ?y <q> ?z}`.
    #[arg(long)]
    query: Option<PathBuf>,
    /// File holding one FedQPL expression.
    #[arg(long)]
    expr: Option<PathBuf>,
    /// Second expression file, for `equiv`.
    #[arg(long)]
    expr2: Option<PathBuf>,
    /// Cost bound for `source-select` (decision mode).
    #[arg(long)]
    bound: Option<usize>,
    /// Maximum mj/mu nesting of the candidate space.
    #[arg(long, default_value_t = CandidateSpace::DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    /// Restrict `source-select` to a class, or pick the class for `class-check`.
    #[arg(long, value_enum)]
    class: Option<ClassArg>,
    /// Rules for `optimize`, e.g. `1-14,33-38` (default: all).
    #[arg(long)]
    rules: Option<String>,
    /// Let `optimize` use rules that evaluate subexpressions.
    #[arg(long)]
    allow_materializing: bool,
    /// Graph file for `reduce`: `edge <u> <v>` and `vertex <v>` lines.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Cover size bound for `reduce`.
    #[arg(long)]
    k: Option<usize>,
    /// Output directory for `reduce`, or output file for `optimize`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A command's textual report and whether its answer was positive.
struct Report {
    text: String,
    ok: bool,
}

impl Report {
    fn new(ok: bool) -> Self {
        Report {
            text: String::new(),
            ok,
        }
    }

    fn line(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str, cmd: Command) -> Result<&'a Path> {
    value
        .as_deref()
        .ok_or_else(|| anyhow!("{} needs --{flag}", command_name(cmd)))
}

fn command_name(cmd: Command) -> String {
    cmd.to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

fn manifest(cli: &Cli) -> Result<Federation> {
    let path = required(&cli.manifest, "manifest", cli.command)?;
    load_manifest(path).map_err(|e| anyhow!("cannot load manifest: {e}"))
}

fn expression(path: &Path, f: &Federation) -> Result<Expr> {
    parse_expr(&read(path)?, f).with_context(|| format!("{}", path.display()))
}

fn query(cli: &Cli) -> Result<Bgp> {
    let path = required(&cli.query, "query", cli.command)?;
    parse_bgp(read(path)?.trim()).with_context(|| format!("{}", path.display()))
}

fn run(cli: &Cli) -> Result<Report> {
    match cli.command {
        Command::Validate => validate_cmd(cli),
        Command::Eval => eval_cmd(cli),
        Command::Cost => cost_cmd(cli),
        Command::SourceSelect => source_select_cmd(cli),
        Command::ClassCheck => class_check_cmd(cli),
        Command::Optimize => optimize_cmd(cli),
        Command::Equiv => equiv_cmd(cli),
        Command::Reduce => reduce_cmd(cli),
    }
}

fn validate_cmd(cli: &Cli) -> Result<Report> {
    let f = manifest(cli)?;
    let mut report = Report::new(true);
    report.line(format!("federation: {} members", f.len()));
    if let Some(path) = &cli.expr {
        let e = expression(path, &f)?;
        match validate(&e, &f) {
            Ok(()) => report.line("expression: valid"),
            Err(err) => {
                report.ok = false;
                report.line(format!("expression: invalid: {err}"));
            }
        }
    }
    Ok(report)
}

fn valid_expression(path: &Path, f: &Federation) -> Result<std::result::Result<Expr, String>> {
    let e = expression(path, f)?;
    Ok(validate(&e, f)
        .map(|()| e)
        .map_err(|err| format!("{}: invalid: {err}", path.display())))
}

fn eval_cmd(cli: &Cli) -> Result<Report> {
    let f = manifest(cli)?;
    let path = required(&cli.expr, "expr", cli.command)?;
    let mut report = Report::new(true);
    match valid_expression(path, &f)? {
        Ok(e) => {
            for line in EvalContext::new(&f).sols(&e)?.canonical_lines() {
                report.line(line);
            }
        }
        Err(msg) => {
            report.ok = false;
            report.line(msg);
        }
    }
    Ok(report)
}

fn cost_cmd(cli: &Cli) -> Result<Report> {
    let f = manifest(cli)?;
    let path = required(&cli.expr, "expr", cli.command)?;
    let e = expression(path, &f)?;
    let mut report = Report::new(is_source_assignment(&e));
    if report.ok {
        report.line(format!("sa-cost: {}", sa_cost(&e)));
    } else {
        report.line(format!("{}: not a source assignment", path.display()));
    }
    Ok(report)
}

fn source_select_cmd(cli: &Cli) -> Result<Report> {
    let f = manifest(cli)?;
    let b = query(cli)?;
    let space = CandidateSpace::new(cli.max_depth);
    if let Some(c) = cli.bound {
        let found = decide_source_selection(&b, &f, c, space)?;
        let mut report = Report::new(found);
        report.line(format!(
            "{}: a correct source assignment with sa-cost at most {c} {}",
            if found { "yes" } else { "no" },
            if found {
                "exists"
            } else {
                "does not exist in the candidate space"
            }
        ));
        return Ok(report);
    }
    let found = match cli.class {
        Some(class) => find_minimal_in_class(&b, &f, class.into())?,
        None => find_minimal(&b, &f, space)?,
    };
    let mut report = Report::new(found.is_some());
    match found {
        Some((a, cost)) => {
            report.line(a.to_string());
            report.line(format!("sa-cost: {cost}"));
        }
        None => report.line("no correct source assignment in the candidate space"),
    }
    Ok(report)
}

fn class_check_cmd(cli: &Cli) -> Result<Report> {
    let f = manifest(cli)?;
    let path = required(&cli.expr, "expr", cli.command)?;
    let e = expression(path, &f)?;
    let s = in_class_joins_over_unions(&e);
    let s_star = in_class_restricted(&e);
    let ok = match cli.class {
        Some(ClassArg::S) | None => s,
        Some(ClassArg::Sstar) => s_star,
    };
    let mut report = Report::new(ok);
    let yes = |b: bool| if b { "yes" } else { "no" };
    report.line(format!("s: {}", yes(s)));
    report.line(format!("sstar: {}", yes(s_star)));
    Ok(report)
}

fn optimize_cmd(cli: &Cli) -> Result<Report> {
    let f = manifest(cli)?;
    let path = required(&cli.expr, "expr", cli.command)?;
    let e = match valid_expression(path, &f)? {
        Ok(e) => e,
        Err(msg) => {
            let mut report = Report::new(false);
            report.line(msg);
            return Ok(report);
        }
    };
    let numbers = match &cli.rules {
        Some(spec) => parse_rule_selection(spec)?,
        None => (1..=38).collect(),
    };
    let selection = RuleSelection {
        numbers,
        allow_materializing: cli.allow_materializing,
    };
    let found = explore_equivalents(&e, &f, RewriteBudget::default(), &selection)?;
    // Requests are the only cost FedQPL plans carry; ties go to the smaller,
    // then lexicographically first, plan.
    let best = found
        .expressions
        .iter()
        .min_by_key(|x| (x.req_count(), x.size(), x.to_string()))
        .expect("exploration includes the start");
    if let Some(out) = &cli.out {
        let mut all = String::new();
        for x in &found.expressions {
            writeln!(all, "{x}")?;
        }
        fs::write(out, all).with_context(|| format!("cannot write {}", out.display()))?;
    }
    let mut report = Report::new(true);
    report.line(best.to_string());
    report.line(format!("req-count: {}", best.req_count()));
    report.line(format!(
        "explored: {} expressions{}",
        found.expressions.len(),
        if found.truncated {
            " (budget exhausted)"
        } else {
            ""
        }
    ));
    Ok(report)
}

fn equiv_cmd(cli: &Cli) -> Result<Report> {
    let f = manifest(cli)?;
    let mut exprs = Vec::new();
    for (value, flag) in [(&cli.expr, "expr"), (&cli.expr2, "expr2")] {
        let path = required(value, flag, cli.command)?;
        match valid_expression(path, &f)? {
            Ok(e) => exprs.push(e),
            Err(msg) => {
                let mut report = Report::new(false);
                report.line(msg);
                return Ok(report);
            }
        }
    }
    let same = EvalContext::new(&f).sem_equiv(&exprs[0], &exprs[1])?;
    let mut report = Report::new(same);
    report.line(if same { "equivalent" } else { "not equivalent" });
    Ok(report)
}

fn reduce_cmd(cli: &Cli) -> Result<Report> {
    let graph_path = required(&cli.graph, "graph", cli.command)?;
    let out = required(&cli.out, "out", cli.command)?;
    let Some(k) = cli.k else {
        bail!("reduce needs --k");
    };
    let g = parse_undirected_graph(&read(graph_path)?)
        .with_context(|| format!("{}", graph_path.display()))?;
    let red = node_cover_reduce(&g, k)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let write = |name: &str, text: String| {
        let path = out.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    };
    let mut manifest = String::new();
    for m in red.federation.members() {
        let file = format!("{}.nt", m.id);
        writeln!(manifest, "member {} {} {file}", m.id, m.kind)?;
        write(&file, m.graph.to_ntriples())?;
    }
    write("manifest.txt", manifest)?;
    write("query.txt", format!("{}\n", red.bgp))?;
    write("c.txt", format!("{}\n", red.bound))?;
    let mut report = Report::new(true);
    report.line(format!(
        "wrote {} members, query and bound {} to {}",
        red.federation.len(),
        red.bound,
        out.display()
    ));
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.text);
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
