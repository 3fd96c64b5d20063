//! `coexplore`: prove, explore, inspect and check coinductive goals.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coexplore::clj::colp::{ColpResult, DEFAULT_COLP_DEPTH};
use coexplore::clj::search::DEFAULT_SEARCH_DEPTH;
use coexplore::clj::{cert, check, colp_search, colp_to_clj, prove_analytic, Limits, Proof};
use coexplore::explore::{self, goal_atom, waterfall, Config, ExploreError, Hypothesis, Origin, Outcome, Status};
use coexplore::parse::{parse_atom, parse_goal, parse_program};
use coexplore::rewriting::{build_tree, path_string, RewritingTree, DEFAULT_TRANSITIONS, DEFAULT_TREE_DEPTH};
use coexplore::{Atom, Formula, Program, DEFAULT_CONV_FUEL};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "coexplore", version, about = "Coinductive proof search with lemma discovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut-free proof search for a goal.
    Prove(GoalArgs),
    /// Proof search with lemma discovery and cut.
    Explore(GoalArgs),
    /// Coinductive SLD resolution and its translation into a proof.
    Colp(GoalArgs),
    /// Rewriting trees and their transitions.
    Tree(TreeArgs),
    /// Check a proof certificate.
    Check(CheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct Common {
    /// Logical-rule depth bound of the analytic search.
    #[arg(long, default_value_t = DEFAULT_SEARCH_DEPTH, value_parser = positive)]
    depth: usize,
    /// Resolution depth bound of coinductive SLD search.
    #[arg(long, default_value_t = DEFAULT_COLP_DEPTH, value_parser = positive)]
    colp_depth: usize,
    /// Depth bound of rewriting trees.
    #[arg(long, default_value_t = DEFAULT_TREE_DEPTH, value_parser = positive)]
    tree_depth: usize,
    /// Number of tree transitions explored.
    #[arg(long, default_value_t = DEFAULT_TRANSITIONS, value_parser = positive)]
    transitions: usize,
    /// Fixed-point unfolding budget of conversion checks.
    #[arg(long, default_value_t = DEFAULT_CONV_FUEL, value_parser = positive)]
    conv_fuel: usize,
    /// Enabled heuristics, in order.
    #[arg(long, default_value = "circ,reg,hofix")]
    heuristics: String,
    /// Output argument position (from 0) of stream predicates; the last by default.
    #[arg(long)]
    output_arg: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Where to write the proof certificate.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GoalArgs {
    /// Program file.
    program: PathBuf,
    /// Goal formula, or `@FILE` to read it from a file.
    goal: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TreeArgs {
    program: PathBuf,
    /// Root atom, or `@FILE`.
    atom: String,
    #[arg(long, default_value_t = DEFAULT_TREE_DEPTH, value_parser = positive)]
    tree_depth: usize,
    #[arg(long, default_value_t = DEFAULT_TRANSITIONS)]
    transitions: usize,
    /// Print trees as `id parent label` edge lists.
    #[arg(long)]
    graph: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    certificate: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CONV_FUEL, value_parser = positive)]
    conv_fuel: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// An input problem, reported with exit code 2.
struct InputError(String);

type Run = Result<u8, InputError>;

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {}", path.display(), e)))
}

fn load_program(path: &Path) -> Result<Program, InputError> {
    let src = read(path)?;
    parse_program(&src).map_err(|e| InputError(format!("{}:{}", path.display(), e)))
}

fn inline_or_file(text: &str) -> Result<String, InputError> {
    match text.strip_prefix('@') {
        Some(p) => Ok(read(Path::new(p))?.trim().to_string()),
        None => Ok(text.to_string()),
    }
}

fn load_goal(p: &Program, text: &str) -> Result<Formula, InputError> {
    let src = inline_or_file(text)?;
    parse_goal(&src, &p.signature).map_err(|e| InputError(format!("goal:{}", e)))
}

fn load_atom(p: &Program, text: &str) -> Result<Atom, InputError> {
    let src = inline_or_file(text)?;
    parse_atom(&src, &p.signature)
        .map(|(a, _)| a)
        .map_err(|e| InputError(format!("atom:{}", e)))
}

fn config(c: &Common) -> Result<Config, InputError> {
    let mut heuristics = Vec::new();
    for h in c.heuristics.split(',').map(str::trim).filter(|h| !h.is_empty()) {
        let o = Origin::from_short(h)
            .ok_or_else(|| InputError(format!("unknown heuristic `{}` (expected circ, reg or hofix)", h)))?;
        heuristics.push(o);
    }
    Ok(Config {
        limits: Limits {
            depth: c.depth,
            conv_fuel: c.conv_fuel,
        },
        colp_depth: c.colp_depth,
        tree_depth: c.tree_depth,
        transitions: c.transitions,
        heuristics,
        output: c.output_arg,
    })
}

fn write_certificate(out: &Option<PathBuf>, proof: &Proof, p: &Program) -> Result<(), InputError> {
    if let Some(path) = out {
        fs::write(path, cert::to_string(proof, &p.signature))
            .map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    }
    Ok(())
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON values serialize"));
}

fn cmd_prove(a: &GoalArgs) -> Run {
    let p = load_program(&a.program)?;
    let goal = load_goal(&p, &a.goal)?;
    let cfg = config(&a.common)?;
    match prove_analytic(&p, &goal, cfg.limits) {
        Ok(proof) => {
            write_certificate(&a.common.out, &proof, &p)?;
            match a.common.format {
                Format::Text => {
                    println!("proved {}", goal);
                    print!("{}", proof.render());
                }
                Format::Structured => print_json(&cert::to_json(&proof, &p.signature)),
            }
            Ok(EXIT_OK)
        }
        Err(e) => {
            match a.common.format {
                Format::Text => println!("not proved: {}", e),
                Format::Structured => print_json(&json!({"goal": goal.to_string(), "error": e.to_string()})),
            }
            Ok(EXIT_FAIL)
        }
    }
}

fn status_json(h: &Hypothesis) -> Value {
    let (status, reason) = match &h.status {
        Status::Candidate => ("candidate", None),
        Status::Proven(_) => ("proven", None),
        Status::Discarded(r) => ("discarded", Some(r.clone())),
    };
    json!({
        "formula": h.formula.to_string(),
        "origin": h.origin.short(),
        "status": status,
        "reason": reason,
        "evidence": h.evidence,
    })
}

fn outcome_json(o: &Outcome, p: &Program, error: Option<String>) -> Value {
    json!({
        "goal": o.goal.to_string(),
        "proved": o.proof.is_some(),
        "lemma": o.lemma.as_ref().map(|h| h.formula.to_string()),
        "stream": o.lemma.as_ref().and_then(explore::stream_definition).map(|t| t.to_string()),
        "hypotheses": o.hypotheses.iter().map(status_json).collect::<Vec<_>>(),
        "log": o.log,
        "error": error,
        "certificate": o.proof.as_ref().map(|pr| cert::to_json(pr, &p.signature)),
    })
}

fn print_outcome(o: &Outcome) {
    for l in &o.log {
        println!("{}", l);
    }
    for h in &o.hypotheses {
        let st = match &h.status {
            Status::Candidate => "candidate".to_string(),
            Status::Proven(_) => "proven".to_string(),
            Status::Discarded(r) => format!("discarded ({})", r),
        };
        println!("hypothesis [{}] {}: {}", h.origin, h.formula, st);
    }
    if let Some(h) = &o.lemma {
        println!("lemma: {}", h.formula);
        if let Some(s) = explore::stream_definition(h) {
            println!("stream: {}", s);
        }
    }
    if let Some(pr) = &o.proof {
        println!(
            "proved {}{}",
            o.goal,
            if pr.contains_cut() { " (with cut)" } else { "" }
        );
        print!("{}", pr.render());
    }
}

fn cmd_explore(a: &GoalArgs) -> Run {
    let p = load_program(&a.program)?;
    let goal = load_goal(&p, &a.goal)?;
    let cfg = config(&a.common)?;
    match waterfall(&p, &goal, &cfg) {
        Ok(o) => {
            if let Some(pr) = &o.proof {
                write_certificate(&a.common.out, pr, &p)?;
            }
            match a.common.format {
                Format::Text => print_outcome(&o),
                Format::Structured => print_json(&outcome_json(&o, &p, None)),
            }
            Ok(EXIT_OK)
        }
        Err(ExploreError::Exhausted { reasons, outcome }) => {
            let msg = ExploreError::Exhausted {
                reasons,
                outcome: outcome.clone(),
            }
            .to_string();
            match a.common.format {
                Format::Text => {
                    print_outcome(&outcome);
                    println!("not proved: {}", msg);
                }
                Format::Structured => print_json(&outcome_json(&outcome, &p, Some(msg))),
            }
            Ok(EXIT_FAIL)
        }
        Err(e @ ExploreError::NotAGoal(_)) => Err(InputError(e.to_string())),
    }
}

fn colp_json(r: &ColpResult) -> Value {
    json!({
        "goal": r.goal.to_string(),
        "trace": r.render(),
        "equations": r.equations().iter().map(|u| u.to_string()).collect::<Vec<_>>(),
        "answer": r.answer().iter().map(|(v, t)| json!({"var": v, "term": t.to_string()})).collect::<Vec<_>>(),
    })
}

fn cmd_colp(a: &GoalArgs) -> Run {
    let p = load_program(&a.program)?;
    let src = inline_or_file(&a.goal)?;
    let atom = match parse_goal(&src, &p.signature) {
        Ok(g) => goal_atom(&g).ok_or_else(|| InputError("goal is not an existentially closed atom".into()))?,
        Err(_) => load_atom(&p, &src)?,
    };
    let cfg = config(&a.common)?;
    let r = match colp_search(&p, &atom, cfg.colp_depth) {
        Ok(r) => r,
        Err(e) => {
            match a.common.format {
                Format::Text => println!("no derivation: {}", e),
                Format::Structured => print_json(&json!({"goal": atom.to_string(), "error": e.to_string()})),
            }
            return Ok(EXIT_FAIL);
        }
    };
    let proof = colp_to_clj(&p, &r);
    if let Ok(pr) = &proof {
        write_certificate(&a.common.out, pr, &p)?;
    }
    match a.common.format {
        Format::Text => {
            print!("{}", r.render());
            for u in r.equations() {
                println!("unifying equations: {}", u);
            }
            for (v, t) in r.answer() {
                println!("answer: {} := {}", v, t);
            }
            match &proof {
                Ok(pr) => {
                    println!("proof:");
                    print!("{}", pr.render());
                }
                Err(e) => println!("no proof: {}", e),
            }
        }
        Format::Structured => {
            let mut v = colp_json(&r);
            v["certificate"] = match &proof {
                Ok(pr) => cert::to_json(pr, &p.signature),
                Err(e) => json!({"error": e.to_string()}),
            };
            print_json(&v);
        }
    }
    Ok(if proof.is_ok() { EXIT_OK } else { EXIT_FAIL })
}

fn tree_json(t: &RewritingTree) -> Value {
    let crit = t.critical_leaves();
    let any = !crit.is_empty();
    let nodes: Vec<Value> = t
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| {
            json!({
                "path": path_string(&n.path),
                "label": n.label.to_string(),
                "critical": crit.contains(&i) || (i == 0 && any),
                "truncated": n.truncated,
            })
        })
        .collect();
    json!({
        "irregular": matches!(t.is_irregular(), Ok(true)),
        "truncated": t.is_truncated(),
        "nodes": nodes,
    })
}

/// Follows the first transition of each tree; an irregular tree is
/// replaced by its abstract representation.
fn cmd_tree(a: &TreeArgs) -> Run {
    let p = load_program(&a.program)?;
    let root = load_atom(&p, &a.atom)?;
    let mut steps: Vec<Value> = Vec::new();
    let mut text = String::new();
    let show = |t: &RewritingTree| if a.graph { t.to_graph() } else { t.render() };

    let mut cur = build_tree(&p, &root, a.tree_depth);
    let mut index = 0;
    loop {
        let irregular = matches!(cur.is_irregular(), Ok(true));
        text.push_str(&format!(
            "tree {}{}\n{}",
            index,
            if irregular { " (irregular)" } else { "" },
            show(&cur)
        ));
        if cur.is_truncated() {
            text.push_str(&format!("truncated at depth {}\n", a.tree_depth));
        }
        steps.push(json!({"kind": "tree", "index": index, "tree": tree_json(&cur)}));
        if irregular {
            if let Ok(abs) = cur.abstract_representation(&p, a.tree_depth) {
                text.push_str(&format!("abstract representation of tree {}\n{}", index, show(&abs)));
                steps.push(json!({"kind": "abstract", "index": index, "tree": tree_json(&abs)}));
                cur = abs;
            }
        }
        if index >= a.transitions {
            break;
        }
        let Some(tr) = cur.transitions(&p, a.tree_depth).into_iter().next() else {
            text.push_str("no transitions\n");
            break;
        };
        index += 1;
        let leaf = path_string(&cur.nodes[tr.leaf].path);
        text.push_str(&format!(
            "transition {}: leaf {} by c{} with {}\n",
            index, leaf, tr.clause, tr.unifier
        ));
        steps.push(json!({
            "kind": "transition",
            "index": index,
            "leaf": leaf,
            "clause": tr.clause,
            "unifier": tr.unifier.to_string(),
        }));
        cur = tr.target;
    }
    match a.format {
        Format::Text => print!("{}", text),
        Format::Structured => print_json(&json!({"root": root.to_string(), "steps": steps})),
    }
    Ok(EXIT_OK)
}

fn cmd_check(a: &CheckArgs) -> Run {
    let src = read(&a.certificate)?;
    let c = cert::from_str(&src).map_err(|e| InputError(format!("{}: {}", a.certificate.display(), e)))?;
    let r = check(&c.proof, &c.signature, a.conv_fuel);
    match (a.format, &r) {
        (Format::Text, Ok(())) => println!("accepted: {}", c.proof.conclusion),
        (Format::Text, Err(e)) => println!("rejected {} [{}]", e, e.kind.code()),
        (Format::Structured, _) => print_json(&json!({
            "accepted": r.is_ok(),
            "path": r.as_ref().err().map(|e| e.path.clone()),
            "rule": r.as_ref().err().map(|e| e.rule.clone()),
            "kind": r.as_ref().err().map(|e| e.kind.code()),
            "error": r.as_ref().err().map(|e| e.kind.to_string()),
        })),
    }
    Ok(if r.is_ok() { EXIT_OK } else { EXIT_FAIL })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Prove(a) => cmd_prove(a),
        Command::Explore(a) => cmd_explore(a),
        Command::Colp(a) => cmd_colp(a),
        Command::Tree(a) => cmd_tree(a),
        Command::Check(a) => cmd_check(a),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(InputError(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(EXIT_INPUT)
        }
    }
}
