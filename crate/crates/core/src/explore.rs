//! Lemma discovery: the proof waterfall and its three hypothesis heuristics.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::clj::colp::DEFAULT_COLP_DEPTH;
use crate::clj::search::prove_sequent;
use crate::clj::{apply_cut, check, colp_search, colp_to_clj, prove_analytic, Limits, Proof, Sequent};
use crate::formula::{vars_in_order, Atom, Formula, Program};
use crate::rewriting::{
    build_tree, default_probes, is_productive, Productivity, RewritingTree, DEFAULT_TRANSITIONS, DEFAULT_TREE_DEPTH,
};
use crate::subst::{anti_unify_atoms, is_variant_atom, unify_atoms};
use crate::term::{fresh_name, Term};
use crate::types::Type;

const REGULAR_DEPTH: usize = 4;
const REGULAR_MAX_DESCENDANTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Circular,
    Regular,
    HigherOrderFix,
}

impl Origin {
    pub const ALL: [Origin; 3] = [Origin::Circular, Origin::Regular, Origin::HigherOrderFix];

    pub fn short(self) -> &'static str {
        match self {
            Origin::Circular => "circ",
            Origin::Regular => "reg",
            Origin::HigherOrderFix => "hofix",
        }
    }

    pub fn from_short(s: &str) -> Option<Origin> {
        Origin::ALL.into_iter().find(|o| o.short() == s)
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Origin::Circular => "circular",
            Origin::Regular => "regular",
            Origin::HigherOrderFix => "higher-order fixpoint",
        };
        write!(f, "{}", s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Candidate,
    Proven(Box<Proof>),
    Discarded(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub formula: Formula,
    pub origin: Origin,
    /// Where the candidate came from: a derivation trace or tree rendering.
    pub evidence: String,
    pub status: Status,
}

impl Hypothesis {
    pub fn is_proven(&self) -> bool {
        matches!(self.status, Status::Proven(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub limits: Limits,
    pub colp_depth: usize,
    pub tree_depth: usize,
    pub transitions: usize,
    pub heuristics: Vec<Origin>,
    /// Output argument position for stream predicates; the last by default.
    pub output: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            limits: Limits::default(),
            colp_depth: DEFAULT_COLP_DEPTH,
            tree_depth: DEFAULT_TREE_DEPTH,
            transitions: DEFAULT_TRANSITIONS,
            heuristics: Origin::ALL.to_vec(),
            output: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub goal: Formula,
    pub proof: Option<Proof>,
    /// The lemma cut in, if the proof needed one.
    pub lemma: Option<Hypothesis>,
    pub hypotheses: Vec<Hypothesis>,
    pub log: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("all heuristics failed: {}", reasons.iter().map(|(o, r)| format!("{}: {}", o, r)).collect::<Vec<_>>().join("; "))]
    Exhausted {
        reasons: Vec<(Origin, String)>,
        outcome: Box<Outcome>,
    },
    #[error("goal is not a G-formula: {0}")]
    NotAGoal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    #[error("not applicable: {0}")]
    NotApplicable(String),
}

/// Splits `∃x̄. A` into its atom; other goals have no atom matrix.
pub fn goal_atom(goal: &Formula) -> Option<Atom> {
    match goal {
        Formula::Atom(a) => Some(a.clone()),
        Formula::Exists(_, _, b) => goal_atom(b),
        _ => None,
    }
}

/// Readable names for `n` bound variables.
fn binder_names(n: usize, avoid: &dyn Fn(&str) -> bool) -> Vec<String> {
    let base: Vec<String> = if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{}", i)).collect()
    };
    let mut taken = BTreeSet::new();
    base.iter()
        .map(|b| {
            let n = fresh_name(b, |c| avoid(c) || taken.contains(c));
            taken.insert(n.clone());
            n
        })
        .collect()
}

/// Universal closure of an atom with tidy binder names.
fn closure(p: &Program, a: &Atom) -> Formula {
    let vars = vars_in_order(a);
    let names = binder_names(vars.len(), &|c| p.signature.contains(c));
    let map: std::collections::BTreeMap<String, Term> = vars
        .iter()
        .zip(&names)
        .map(|(v, n)| (v.clone(), Term::var(n)))
        .collect();
    let renamed = a.subst(&map);
    let binders: Vec<(String, Type)> = names.into_iter().map(|n| (n, Type::Iota)).collect();
    Formula::forall_many(&binders, Formula::Atom(renamed))
}

/// Coinductive SLD resolution on the goal atom; a loop's circular unifier
/// instantiates the goal.
pub fn heuristic_circular(p: &Program, goal: &Formula, cfg: &Config) -> Vec<Hypothesis> {
    let Some(a) = goal_atom(goal) else {
        return vec![];
    };
    if !a.is_fo_simple() {
        return vec![];
    }
    let Ok(r) = colp_search(p, &a, cfg.colp_depth) else {
        return vec![];
    };
    if r.equations().is_empty() {
        return vec![];
    }
    let base = p.signature.base_constants().next().map(Term::cnst);
    let mut inst = std::collections::BTreeMap::new();
    for (v, t) in r.answer() {
        let mut t = t;
        for fv in t.free_vars() {
            match &base {
                Some(c) if !p.signature.contains(&fv) => t = t.subst1(&fv, c),
                _ => {}
            }
        }
        inst.insert(v, t);
    }
    let ch = Formula::Atom(a.subst(&inst));
    if !ch.free_vars().is_empty() || !ch.is_coinduction_hypothesis(&p.signature) {
        return vec![];
    }
    vec![Hypothesis {
        formula: ch,
        origin: Origin::Circular,
        evidence: r.render(),
        status: Status::Candidate,
    }]
}

/// Same-predicate descendants of `a` under unfolding by resolution.
fn descendants(p: &Program, a: &Atom) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    let mut taken: BTreeSet<String> = p.names();
    taken.extend(a.free_vars());
    let mut queue = VecDeque::from([(a.clone(), 0usize)]);
    while let Some((g, d)) = queue.pop_front() {
        if d >= REGULAR_DEPTH || out.len() >= REGULAR_MAX_DESCENDANTS {
            break;
        }
        for nc in &p.clauses {
            let c = crate::rewriting::rename_apart(&nc.clause, &mut taken);
            let Some(theta) = unify_atoms(&g, &c.head) else {
                continue;
            };
            for b in &c.body {
                let b = theta.apply_atom(b);
                if b.pred == a.pred && out.len() < REGULAR_MAX_DESCENDANTS {
                    out.push(b.clone());
                }
                queue.push_back((b, d + 1));
            }
        }
    }
    out
}

/// Anti-unifies the goal with its same-predicate descendants and proposes
/// the universal closures of the proper generalisations, most specific
/// first.
pub fn heuristic_regular(p: &Program, goal: &Formula, _cfg: &Config) -> Vec<Hypothesis> {
    let Some(a) = goal_atom(goal) else {
        return vec![];
    };
    if !a.is_fo_simple() {
        return vec![];
    }
    let mut gens: Vec<(Atom, Atom)> = Vec::new();
    for d in descendants(p, &a) {
        let Ok(g) = anti_unify_atoms(&[&a, &d]) else {
            continue;
        };
        if is_variant_atom(&g, &a) || gens.iter().any(|(h, _)| is_variant_atom(h, &g)) {
            continue;
        }
        gens.push((g, d));
    }
    gens.sort_by_key(|(g, _)| (vars_in_order(g).len(), std::cmp::Reverse(atom_size(g))));
    gens.into_iter()
        .map(|(g, d)| Hypothesis {
            formula: closure(p, &g),
            origin: Origin::Regular,
            evidence: format!("{} ⊓ {} = {}", a, d, g),
            status: Status::Candidate,
        })
        .filter(|h| h.formula.is_coinduction_hypothesis(&p.signature))
        .collect()
}

fn atom_size(a: &Atom) -> usize {
    a.args.iter().map(|t| t.size()).sum()
}

/// Number of argument positions through which some clause threads a
/// stream: the recursive call has a variable there that sits strictly
/// inside the head's argument.
fn stream_positions(p: &Program, pred: &str) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for nc in &p.clauses {
        let c = &nc.clause;
        if c.head.pred != pred {
            continue;
        }
        for b in c.body.iter().filter(|b| b.pred == pred) {
            for (i, (h, t)) in c.head.args.iter().zip(&b.args).enumerate() {
                if let Some(v) = t.as_var() {
                    if h.as_var().is_none() && h.occurs_free(v) {
                        out.insert(i);
                    }
                }
            }
        }
    }
    out
}

struct Shape {
    inputs: Vec<String>,
    out_term: Term,
    leaf_inputs: Vec<Term>,
    stream_var: String,
}

fn shape(t: &RewritingTree, out: usize) -> Result<Shape, String> {
    if !matches!(t.is_irregular(), Ok(true)) {
        return Err("tree is not irregular".into());
    }
    let root = t.root();
    let mut inputs = Vec::new();
    for (i, a) in root.args.iter().enumerate() {
        if i == out {
            continue;
        }
        match a.as_var() {
            Some(v) if !inputs.iter().any(|w| w == v) => inputs.push(v.to_string()),
            _ => return Err(format!("abstract root {} has a non-variable input", root)),
        }
    }
    let out_term = root.args[out].clone();
    if out_term.as_var().is_some() {
        return Err("output of the abstract root is still a variable".into());
    }
    for l in t.critical_leaves() {
        let leaf = t.nodes[l].atom().expect("critical leaves are atoms");
        let Some(xn) = leaf.args[out].as_var() else {
            continue;
        };
        if !out_term.occurs_free(xn) {
            continue;
        }
        let leaf_inputs: Vec<Term> = leaf
            .args
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != out)
            .map(|(_, a)| a.clone())
            .collect();
        if leaf_inputs.iter().any(|a| a.occurs_free(xn)) {
            return Err(format!("leaf {} mentions the stream variable {} in an input", leaf, xn));
        }
        return Ok(Shape {
            inputs,
            out_term,
            leaf_inputs,
            stream_var: xn.to_string(),
        });
    }
    Err("no critical leaf has a variable output".into())
}

/// Finds an irregular tree, abstracts it, and reads a higher-order fixed
/// point off an irregular tree of the abstract search domain.
pub fn heuristic_ho_fixpoint(p: &Program, goal: &Formula, cfg: &Config) -> Result<Vec<Hypothesis>, HeuristicError> {
    let na = |s: &str| HeuristicError::NotApplicable(s.to_string());
    let a = goal_atom(goal).ok_or_else(|| na("goal is not an existentially closed atom"))?;
    if !a.is_fo_simple() {
        return Err(na("goal atom is not first-order simple"));
    }
    let n = a.args.len();
    if n == 0 {
        return Err(na("no output variable position"));
    }
    let out = cfg.output.unwrap_or(n - 1);
    if out >= n || a.args[out].as_var().is_none() {
        return Err(na("no output variable position"));
    }
    if a.args
        .iter()
        .enumerate()
        .any(|(i, t)| i != out && !t.free_vars().is_empty())
    {
        return Err(na("inputs are not ground"));
    }
    for nc in &p.clauses {
        let c = &nc.clause;
        if c.body.iter().filter(|b| b.pred == c.head.pred).count() > 1 {
            return Err(na(&format!("clause {} is not linear", c)));
        }
    }
    if stream_positions(p, &a.pred).len() > 1 {
        return Err(na("predicate defines more than one stream"));
    }
    if is_productive(p, &default_probes(p), cfg.tree_depth, cfg.transitions) == Productivity::NotProductive {
        return Err(na("not productive"));
    }

    let mut last_reason = "no irregular tree found within budget".to_string();
    let mut queue = VecDeque::from([build_tree(p, &a, cfg.tree_depth)]);
    let mut used = 0;
    while let Some(t) = queue.pop_front() {
        if matches!(t.is_irregular(), Ok(true)) {
            if let Ok(abs) = t.abstract_representation(p, cfg.tree_depth) {
                let mut inner = VecDeque::from([abs]);
                let mut steps = 0;
                while let Some(u) = inner.pop_front() {
                    match shape(&u, out) {
                        Ok(s) => return build_ho_candidate(p, &a, out, &s, &t, &u).map(|h| vec![h]),
                        Err(r) => last_reason = r,
                    }
                    for tr in u.transitions(p, cfg.tree_depth) {
                        if steps >= cfg.transitions {
                            break;
                        }
                        steps += 1;
                        inner.push_back(tr.target);
                    }
                }
            }
        }
        for tr in t.transitions(p, cfg.tree_depth) {
            if used >= cfg.transitions {
                break;
            }
            used += 1;
            queue.push_back(tr.target);
        }
    }
    Err(HeuristicError::NotApplicable(last_reason))
}

fn build_ho_candidate(
    p: &Program,
    goal: &Atom,
    out: usize,
    s: &Shape,
    irregular: &RewritingTree,
    abstract_tree: &RewritingTree,
) -> Result<Hypothesis, HeuristicError> {
    let sig = &p.signature;
    let pred_ty = sig
        .pred_type(&goal.pred)
        .cloned()
        .unwrap_or_else(|| Type::first_order_pred(goal.args.len()));
    let arg_tys = pred_ty.uncurry().0;
    let in_tys: Vec<Type> = arg_tys
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != out)
        .map(|(_, t)| t.clone())
        .collect();
    let out_ty = arg_tys.get(out).cloned().unwrap_or(Type::Iota);

    let names = binder_names(s.inputs.len(), &|c| sig.contains(c));
    let fname = fresh_name("f", |c| sig.contains(c) || names.iter().any(|n| n == c));
    let rename: std::collections::BTreeMap<String, Term> = s
        .inputs
        .iter()
        .zip(&names)
        .map(|(v, n)| (v.clone(), Term::var(n)))
        .collect();
    let call = Term::apps(Term::var(&fname), s.leaf_inputs.iter().map(|t| t.subst(&rename)));
    let mut body = s.out_term.subst1(&s.stream_var, &call).subst(&rename);
    for (n, ty) in names.iter().zip(&in_tys).rev() {
        body = Term::lam(n, ty.clone(), body);
    }
    let fix_ty = Type::curried(&in_tys, out_ty);
    let sfix = Term::fix(&fname, fix_ty, body);
    if !sfix.is_guarded(sig) {
        return Err(HeuristicError::NotApplicable(format!("{} is not guarded", sfix)));
    }
    let mut args: Vec<Term> = names.iter().map(|n| Term::var(n)).collect();
    args.insert(out, Term::apps(sfix.clone(), names.iter().map(|n| Term::var(n))));
    let binders: Vec<(String, Type)> = names.iter().cloned().zip(in_tys).collect();
    let ch = Formula::forall_many(&binders, Formula::Atom(Atom::new(&goal.pred, args)));
    if !ch.is_coinduction_hypothesis(sig) {
        return Err(HeuristicError::NotApplicable(format!(
            "{} is not a coinduction hypothesis",
            ch
        )));
    }
    Ok(Hypothesis {
        formula: ch,
        origin: Origin::HigherOrderFix,
        evidence: format!(
            "irregular tree:\n{}abstract search domain:\n{}",
            irregular.render(),
            abstract_tree.render()
        ),
        status: Status::Candidate,
    })
}

/// The fixed-point stream term of a higher-order hypothesis, if any.
pub fn stream_definition(h: &Hypothesis) -> Option<Term> {
    let mut f = &h.formula;
    while let Formula::Forall(_, _, b) = f {
        f = b;
    }
    f.as_atom()?.args.iter().find_map(|t| match t.spine().0 {
        fx @ Term::Fix(..) => Some(fx.clone()),
        _ => None,
    })
}

/// Tries to prove the hypothesis from the program alone.
pub fn validate(p: &Program, mut h: Hypothesis, limits: Limits) -> Hypothesis {
    h.status = match prove_analytic(p, &h.formula, limits) {
        Ok(proof) => Status::Proven(Box::new(proof)),
        Err(e) => Status::Discarded(e.to_string()),
    };
    h
}

fn run_heuristic(p: &Program, goal: &Formula, cfg: &Config, o: Origin) -> Result<Vec<Hypothesis>, String> {
    match o {
        Origin::Circular => Ok(heuristic_circular(p, goal, cfg)),
        Origin::Regular => Ok(heuristic_regular(p, goal, cfg)),
        Origin::HigherOrderFix => heuristic_ho_fixpoint(p, goal, cfg).map_err(|e| e.to_string()),
    }
}

/// Analytic search first; then each enabled heuristic in turn, validating
/// its candidates and cutting in the first proven one that closes the goal.
pub fn waterfall(p: &Program, goal: &Formula, cfg: &Config) -> Result<Outcome, ExploreError> {
    let sig = &p.signature;
    if !goal.is_g(sig) {
        return Err(ExploreError::NotAGoal(goal.to_string()));
    }
    let mut outcome = Outcome {
        goal: goal.clone(),
        proof: None,
        lemma: None,
        hypotheses: Vec::new(),
        log: Vec::new(),
    };
    let fuel = cfg.limits.conv_fuel;
    let sound = |proof: &Proof| check(proof, sig, fuel).is_ok();

    match prove_analytic(p, goal, cfg.limits) {
        Ok(proof) if sound(&proof) => {
            outcome
                .log
                .push(format!("step 1: analytic proof found (depth {})", cfg.limits.depth));
            outcome.proof = Some(proof);
            return Ok(outcome);
        }
        Ok(_) => outcome
            .log
            .push("step 1: analytic proof rejected by the checker".into()),
        Err(e) => outcome.log.push(format!("step 1: analytic search: {}", e)),
    }
    if let Some(a) = goal_atom(goal) {
        let closed = vars_in_order(&a).len() == goal_exists_count(goal) && a.is_fo_simple();
        if closed {
            match colp_search(p, &a, cfg.colp_depth).map(|r| colp_to_clj(p, &r)) {
                Ok(Ok(proof)) if sound(&proof) && proof.conclusion.goal.alpha_eq(goal) => {
                    outcome
                        .log
                        .push("step 1: coinductive resolution closed the goal".into());
                    outcome.proof = Some(proof);
                    return Ok(outcome);
                }
                Ok(Ok(_)) => outcome
                    .log
                    .push("step 1: coinductive resolution gave an unusable proof".into()),
                Ok(Err(e)) | Err(e) => outcome.log.push(format!("step 1: coinductive resolution: {}", e)),
            }
        }
    }

    let mut reasons = Vec::new();
    for &o in &cfg.heuristics {
        let cands = match run_heuristic(p, goal, cfg, o) {
            Ok(c) => c,
            Err(r) => {
                outcome.log.push(format!("step 2: {} heuristic: {}", o, r));
                reasons.push((o, r));
                continue;
            }
        };
        outcome
            .log
            .push(format!("step 2: {} heuristic proposed {} candidate(s)", o, cands.len()));
        if cands.is_empty() {
            reasons.push((o, "no candidates".into()));
            continue;
        }
        let mut last = String::new();
        for h in cands {
            let h = validate(p, h, cfg.limits);
            match &h.status {
                Status::Proven(lp) => {
                    outcome.log.push(format!("step 3: proved {}", h.formula));
                    let mut rest = Sequent::new(p.formulas(), goal.clone());
                    rest.gamma_a.push(h.formula.clone());
                    let closed = prove_sequent(&rest, sig, cfg.limits)
                        .map_err(|e| e.to_string())
                        .and_then(|rp| apply_cut((**lp).clone(), rp).map_err(|e| e.to_string()));
                    match closed {
                        Ok(proof) if sound(&proof) => {
                            outcome
                                .log
                                .push(format!("step 4: cut with {} closes the goal", h.formula));
                            outcome.proof = Some(proof);
                            outcome.lemma = Some(h.clone());
                            outcome.hypotheses.push(h);
                            return Ok(outcome);
                        }
                        Ok(_) => last = "cut proof rejected by the checker".into(),
                        Err(e) => {
                            last = format!("lemma {} does not close the goal: {}", h.formula, e);
                        }
                    }
                    outcome.log.push(format!("step 4: {}", last));
                }
                Status::Discarded(r) => {
                    last = format!("{} discarded: {}", h.formula, r);
                    outcome.log.push(format!("step 3: {}", last));
                }
                Status::Candidate => {}
            }
            outcome.hypotheses.push(h);
        }
        reasons.push((o, last));
    }
    Err(ExploreError::Exhausted {
        reasons,
        outcome: Box::new(outcome),
    })
}

fn goal_exists_count(goal: &Formula) -> usize {
    match goal {
        Formula::Exists(_, _, b) => 1 + goal_exists_count(b),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_goal, parse_program};

    fn setup(src: &str, goal: &str) -> (Program, Formula) {
        let p = parse_program(src).unwrap();
        let g = parse_goal(goal, &p.signature).unwrap();
        (p, g)
    }

    const GAMMA_T: &str = "type a : i.\np(X) :- p(f(X)).";
    const STREAM: &str = "type 0 : i.\nstream(cons(0, X)) :- stream(X).";
    const FROM: &str = "type 0 : i.\nfrom(X, cons(X, Y)) :- from(s(X), Y).";
    const FIB: &str = "type 0 : i.\ntype 1 : i.\nfib(X, Y, cons(X, Z)) :- fib(Y, X + Y, Z).";

    #[test]
    fn regular_on_gamma_t() {
        let (p, g) = setup(GAMMA_T, "p(a)");
        let hs = heuristic_regular(&p, &g, &Config::default());
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].formula.to_string(), "forall x. p(x)");
        assert!(heuristic_circular(&p, &g, &Config::default()).is_empty());
        assert_eq!(
            heuristic_ho_fixpoint(&p, &g, &Config::default()),
            Err(HeuristicError::NotApplicable("no output variable position".into()))
        );
    }

    #[test]
    fn regular_candidate_for_stream_is_discarded() {
        let (p, g) = setup(STREAM, "exists x. stream(cons(0, x))");
        let hs = heuristic_regular(&p, &g, &Config::default());
        assert_eq!(hs[0].formula.to_string(), "forall x. stream(x)");
        let v = validate(&p, hs[0].clone(), Limits::default());
        assert!(matches!(v.status, Status::Discarded(_)));
    }

    #[test]
    fn circular_on_stream() {
        let (p, g) = setup(STREAM, "exists t. stream(t)");
        let hs = heuristic_circular(&p, &g, &Config::default());
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].formula.to_string(), "stream(fix x. cons(0, x))");
        assert!(validate(&p, hs[0].clone(), Limits::default()).is_proven());
    }

    #[test]
    fn ho_fixpoint_from_and_fib() {
        let (p, g) = setup(FROM, "exists z. from(0, z)");
        assert!(heuristic_circular(&p, &g, &Config::default()).is_empty());
        let hs = heuristic_ho_fixpoint(&p, &g, &Config::default()).unwrap();
        assert_eq!(
            hs[0].formula.to_string(),
            "forall x. from(x, (fix f. \\x. cons(x, f(s(x))))(x))"
        );
        let (p, g) = setup(FIB, "exists z. fib(0, 1, z)");
        let hs = heuristic_ho_fixpoint(&p, &g, &Config::default()).unwrap();
        assert_eq!(
            stream_definition(&hs[0]).unwrap().to_string(),
            "fix f. \\x y. cons(x, f(y, plus(x, y)))"
        );
    }

    #[test]
    fn multi_output_is_rejected() {
        let (p, g) = setup(
            "type 0 : i.\ndouble(s(X), s(s(Y)), Z1, Z2) :- double(X, Y, cons(X, Z1), cons(Y, Z2)).",
            "exists z. double(0, 0, 0, z)",
        );
        assert!(heuristic_ho_fixpoint(&p, &g, &Config::default()).is_err());
    }

    #[test]
    fn waterfall_examples() {
        let (p, g) = setup(GAMMA_T, "p(a)");
        let o = waterfall(&p, &g, &Config::default()).unwrap();
        assert_eq!(o.lemma.unwrap().origin, Origin::Regular);
        assert!(o.proof.unwrap().contains_cut());

        let (p, g) = setup(STREAM, "exists t. stream(t)");
        let o = waterfall(&p, &g, &Config::default()).unwrap();
        assert!(o.lemma.is_none());
        assert!(!o.proof.unwrap().contains_cut());

        let (p, g) = setup(FROM, "exists z. from(0, z)");
        let o = waterfall(&p, &g, &Config::default()).unwrap();
        assert_eq!(o.lemma.unwrap().origin, Origin::HigherOrderFix);

        let (p, g) = setup(FIB, "exists z. fib(0, 1, z)");
        let o = waterfall(&p, &g, &Config::default()).unwrap();
        assert_eq!(o.lemma.unwrap().origin, Origin::HigherOrderFix);
    }
}
