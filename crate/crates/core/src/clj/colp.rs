//! Coinductive SLD resolution and its translation into the calculus.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::{premises_of, Proof, Rule, Sequent, Side};
use crate::conv::{conv, Conv, DEFAULT_CONV_FUEL};
use crate::formula::{vars_in_order, Atom, Formula, HornClause, Program};
use crate::rewriting::{path_string, rename_apart};
use crate::subst::{circular_unifier, fold_unfoldings, unifying_equations, FixSubstitution, UnifyingEquations};
use crate::term::{fresh_name, Term};
use crate::types::{Context, Type};

pub const DEFAULT_COLP_DEPTH: usize = 32;
const STEP_BUDGET: usize = 200_000;
/// Goals larger than this many symbols end their branch.
const MAX_GOAL_SIZE: usize = 2_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColpError {
    #[error("no coinductive derivation found up to depth {0}")]
    NotFound(usize),
    #[error("only non-linear loops were found: {0}")]
    NonLinearLoop(UnifyingEquations),
    #[error("cannot translate the derivation: {0}")]
    Translation(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceStep {
    /// Resolved with clause `clause`, renamed apart as `instance`.
    Resolved {
        clause: usize,
        instance: HornClause,
        children: Vec<TraceNode>,
    },
    /// Closed coinductively against the ancestor at `ancestor`.
    Loop {
        ancestor: Vec<usize>,
        equations: UnifyingEquations,
        unifier: FixSubstitution,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceNode {
    pub path: Vec<usize>,
    /// The goal under the substitution current when it was selected.
    pub goal: Atom,
    pub step: TraceStep,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColpResult {
    pub goal: Atom,
    pub trace: TraceNode,
    /// Final bindings of every variable met during the derivation, with
    /// unfoldings folded back into fixed points.
    pub bindings: BTreeMap<String, Term>,
}

impl ColpResult {
    /// The unifying equations of every loop, in trace order.
    pub fn equations(&self) -> Vec<&UnifyingEquations> {
        let mut out = Vec::new();
        collect_loops(&self.trace, &mut |n| {
            if let TraceStep::Loop { equations, .. } = &n.step {
                out.push(equations);
            }
        });
        out
    }

    /// The answer for the goal's variables.
    pub fn answer(&self) -> Vec<(String, Term)> {
        vars_in_order(&self.goal)
            .into_iter()
            .map(|v| {
                let t = self.bindings.get(&v).cloned().unwrap_or_else(|| Term::var(&v));
                (v, t)
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        render_node(&self.trace, 0, &mut out);
        out
    }
}

fn collect_loops<'a>(n: &'a TraceNode, f: &mut dyn FnMut(&'a TraceNode)) {
    f(n);
    if let TraceStep::Resolved { children, .. } = &n.step {
        for c in children {
            collect_loops(c, f);
        }
    }
}

fn render_node(n: &TraceNode, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match &n.step {
        TraceStep::Resolved {
            clause,
            instance,
            children,
        } => {
            let _ = writeln!(
                out,
                "{}{}  {}  by c{}: {}",
                pad,
                path_string(&n.path),
                n.goal,
                clause,
                instance
            );
            for c in children {
                render_node(c, depth + 1, out);
            }
        }
        TraceStep::Loop {
            ancestor,
            equations,
            unifier,
        } => {
            let _ = writeln!(
                out,
                "{}{}  {}  loop to {} with {} giving {}",
                pad,
                path_string(&n.path),
                n.goal,
                path_string(ancestor),
                equations,
                unifier
            );
        }
    }
}

#[derive(Clone)]
struct Goal {
    atom: Atom,
    path: Vec<usize>,
    ancestors: Vec<(Atom, Vec<usize>)>,
}

#[derive(Clone)]
enum Record {
    Resolved {
        clause: usize,
        instance: HornClause,
        arity: usize,
    },
    Loop {
        ancestor: Vec<usize>,
        equations: UnifyingEquations,
        unifier: FixSubstitution,
    },
}

#[derive(Clone)]
struct State {
    goals: Vec<Goal>,
    theta: BTreeMap<String, Term>,
    taken: BTreeSet<String>,
    records: BTreeMap<Vec<usize>, (Atom, Record)>,
}

struct Search<'a> {
    program: &'a Program,
    depth: usize,
    steps: usize,
    nonlinear: Option<UnifyingEquations>,
}

fn apply(theta: &BTreeMap<String, Term>, a: &Atom) -> Atom {
    a.subst(theta)
}

/// Adds `x := t` to an idempotent substitution.
fn bind(theta: &mut BTreeMap<String, Term>, x: &str, t: Term) {
    let single: BTreeMap<String, Term> = [(x.to_string(), t.clone())].into();
    for v in theta.values_mut() {
        *v = v.subst(&single);
    }
    theta.insert(x.to_string(), t);
}

/// Syntactic unification that unfolds fixed points where a constructor is
/// expected. Bindings extend `theta`; the variable of `u` is bound when both
/// sides are variables.
fn unify_rational(t: &Term, u: &Term, theta: &mut BTreeMap<String, Term>, fuel: usize) -> bool {
    let mut stack = vec![(t.clone(), u.clone())];
    let mut unfolds = 0;
    while let Some((t, u)) = stack.pop() {
        let t = t.subst(theta);
        let u = u.subst(theta);
        if t.alpha_eq(&u) {
            continue;
        }
        if let Term::Var(y) = &u {
            if t.occurs_free(y) {
                return false;
            }
            bind(theta, y, t);
            continue;
        }
        if let Term::Var(x) = &t {
            if u.occurs_free(x) {
                return false;
            }
            bind(theta, x, u);
            continue;
        }
        let (th, targs) = t.spine();
        let (uh, uargs) = u.spine();
        match (th, uh) {
            (Term::Const(c), Term::Const(d)) => {
                if c != d || targs.len() != uargs.len() {
                    return false;
                }
                for (a, b) in targs.into_iter().zip(uargs) {
                    stack.push((a.clone(), b.clone()));
                }
            }
            _ => {
                if t.has_fix() && u.has_fix() && conv(&t, &u, fuel) == Conv::Equal {
                    continue;
                }
                unfolds += 1;
                if unfolds > fuel {
                    return false;
                }
                let step = |x: &Term| x.whnf(fuel).map(|(w, _)| w);
                let (Some(t2), Some(u2)) = (step(&t), step(&u)) else {
                    return false;
                };
                if t2 == t && u2 == u {
                    return false;
                }
                stack.push((t2, u2));
            }
        }
    }
    true
}

impl Search<'_> {
    fn solve(&mut self, mut st: State) -> Option<State> {
        self.steps += 1;
        if self.steps > STEP_BUDGET {
            return None;
        }
        if st.goals.is_empty() {
            return Some(st);
        }
        let g = st.goals.remove(0);
        let a = apply(&st.theta, &g.atom);
        if a.args.iter().map(|t| t.size()).sum::<usize>() > MAX_GOAL_SIZE {
            return None;
        }

        for (anc, anc_path) in g.ancestors.iter().rev() {
            let u = unifying_equations(&apply(&st.theta, anc), &a);
            if u.is_clash() {
                continue;
            }
            if !u.is_linear() {
                self.nonlinear.get_or_insert(u);
                continue;
            }
            let Ok(delta) = circular_unifier(&u) else {
                continue;
            };
            let mut next = st.clone();
            for (x, t) in delta.iter() {
                bind(&mut next.theta, x, t.clone());
            }
            next.records.insert(
                g.path.clone(),
                (
                    a.clone(),
                    Record::Loop {
                        ancestor: anc_path.clone(),
                        equations: u,
                        unifier: delta,
                    },
                ),
            );
            if let Some(done) = self.solve(next) {
                return Some(done);
            }
        }

        if g.path.len() >= self.depth {
            return None;
        }
        for (i, nc) in self.program.clauses.iter().enumerate() {
            if nc.clause.head.pred != a.pred || nc.clause.head.args.len() != a.args.len() {
                continue;
            }
            let mut next = st.clone();
            let inst = rename_apart(&nc.clause, &mut next.taken);
            let ok = a
                .args
                .iter()
                .zip(&inst.head.args)
                .all(|(t, h)| unify_rational(t, h, &mut next.theta, DEFAULT_CONV_FUEL));
            if !ok {
                continue;
            }
            let mut ancestors = g.ancestors.clone();
            ancestors.push((g.atom.clone(), g.path.clone()));
            let children: Vec<Goal> = inst
                .body
                .iter()
                .enumerate()
                .map(|(k, b)| {
                    let mut path = g.path.clone();
                    path.push(k);
                    Goal {
                        atom: b.clone(),
                        path,
                        ancestors: ancestors.clone(),
                    }
                })
                .collect();
            next.records.insert(
                g.path.clone(),
                (
                    a.clone(),
                    Record::Resolved {
                        clause: i,
                        arity: inst.body.len(),
                        instance: inst,
                    },
                ),
            );
            let rest = std::mem::take(&mut next.goals);
            next.goals = children;
            next.goals.extend(rest);
            if let Some(done) = self.solve(next) {
                return Some(done);
            }
        }
        None
    }
}

fn build_trace(path: Vec<usize>, records: &BTreeMap<Vec<usize>, (Atom, Record)>) -> TraceNode {
    let (goal, rec) = records[&path].clone();
    let step = match rec {
        Record::Resolved {
            clause,
            instance,
            arity,
        } => TraceStep::Resolved {
            clause,
            instance,
            children: (0..arity)
                .map(|k| {
                    let mut p = path.clone();
                    p.push(k);
                    build_trace(p, records)
                })
                .collect(),
        },
        Record::Loop {
            ancestor,
            equations,
            unifier,
        } => TraceStep::Loop {
            ancestor,
            equations,
            unifier,
        },
    };
    TraceNode { path, goal, step }
}

/// Renames fixed-point and λ binders to lower-case names where that does
/// not capture anything.
fn tidy_binders(t: &Term, avoid: &dyn Fn(&str) -> bool) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::App(f, a) => Term::app(tidy_binders(f, avoid), tidy_binders(a, avoid)),
        Term::Lam(x, ty, b) | Term::Fix(x, ty, b) => {
            let body = tidy_binders(b, avoid);
            let base: String = x.trim_end_matches('\'').to_lowercase();
            let free = body.free_vars();
            let name = if !base.is_empty() && base != *x {
                fresh_name(&base, |n| (n != x && free.contains(n)) || avoid(n))
            } else {
                x.clone()
            };
            let body = if name != *x {
                body.subst1(x, &Term::var(&name))
            } else {
                body
            };
            match t {
                Term::Lam(..) => Term::lam(&name, ty.clone(), body),
                _ => Term::fix(&name, ty.clone(), body),
            }
        }
    }
}

/// Coinductive SLD resolution for `goal`, leftmost selection, with loops
/// closed when the unifying equations against an ancestor are linear.
pub fn colp_search(program: &Program, goal: &Atom, depth: usize) -> Result<ColpResult, ColpError> {
    let mut taken = program.names();
    for v in goal.free_vars() {
        taken.insert(v);
    }
    let st = State {
        goals: vec![Goal {
            atom: goal.clone(),
            path: vec![],
            ancestors: vec![],
        }],
        theta: BTreeMap::new(),
        taken,
        records: BTreeMap::new(),
    };
    let mut search = Search {
        program,
        depth,
        steps: 0,
        nonlinear: None,
    };
    match search.solve(st) {
        Some(done) => {
            let sig = &program.signature;
            let bindings = done
                .theta
                .iter()
                .map(|(x, t)| (x.clone(), tidy_binders(&fold_unfoldings(t), &|n| sig.contains(n))))
                .collect();
            Ok(ColpResult {
                goal: goal.clone(),
                trace: build_trace(vec![], &done.records),
                bindings,
            })
        }
        None => match search.nonlinear {
            Some(u) => Err(ColpError::NonLinearLoop(u)),
            None => Err(ColpError::NotFound(depth)),
        },
    }
}

struct Translator<'a> {
    program: &'a Program,
    ground: BTreeMap<String, Term>,
    bindings: &'a BTreeMap<String, Term>,
    targets: BTreeSet<Vec<usize>>,
}

impl Translator<'_> {
    /// The final instance of a variable, grounded.
    fn value(&self, v: &str) -> Term {
        let t = self.bindings.get(v).cloned().unwrap_or_else(|| Term::var(v));
        t.subst(&self.ground)
    }

    fn node(&self, rule: Rule, s: &Sequent) -> Result<(Vec<Sequent>, Proof), ColpError> {
        let ps = premises_of(&rule, s, &self.program.signature, &Context::new(), DEFAULT_CONV_FUEL)
            .map_err(|e| ColpError::Translation(format!("{} at {}: {}", rule.name(), s, e)))?;
        Ok((
            ps.into_iter().map(|p| p.sequent).collect(),
            Proof::leaf(rule, s.clone()),
        ))
    }

    fn replay(&self, n: &TraceNode, s: &Sequent) -> Result<Proof, ColpError> {
        match &n.step {
            TraceStep::Loop { .. } => {
                let pos = s
                    .gamma_a
                    .iter()
                    .position(|f| f.conv(&s.goal, DEFAULT_CONV_FUEL) == Conv::Equal)
                    .ok_or_else(|| ColpError::Translation(format!("no hypothesis closes {}", s.goal)))?;
                Ok(self.node(Rule::Ax { side: Side::A, pos }, s)?.1)
            }
            TraceStep::Resolved {
                clause,
                instance,
                children,
            } => {
                if self.targets.contains(&n.path) {
                    let (ps, mut p) = self.node(Rule::CoFix, s)?;
                    p.premises.push(self.resolve(*clause, instance, children, &ps[0])?);
                    Ok(p)
                } else {
                    self.resolve(*clause, instance, children, s)
                }
            }
        }
    }

    fn resolve(
        &self,
        clause: usize,
        instance: &HornClause,
        children: &[TraceNode],
        s: &Sequent,
    ) -> Result<Proof, ColpError> {
        let pos = clause;
        let fact = instance.body.is_empty();
        let (mut cur, root) = if fact {
            (s.clone(), None)
        } else {
            let (ps, p) = self.node(Rule::CtrT { pos }, s)?;
            (ps[0].clone(), Some(p))
        };
        let mut chain: Vec<Proof> = Vec::new();
        for (v, _) in &instance.vars {
            let w = self.value(v);
            let (ps, p) = self.node(Rule::AllLT { pos, witness: w }, &cur)?;
            chain.push(p);
            cur = ps[0].clone();
        }
        let tail = if fact {
            self.node(Rule::Ax { side: Side::T, pos }, &cur)?.1
        } else {
            let (ps, mut p) = self.node(Rule::ImplLT { pos }, &cur)?;
            let (_, ax) = self.node(Rule::Ax { side: Side::T, pos }, &ps[0])?;
            p.premises.push(ax);
            p.premises.push(self.conjunction(children, &ps[1])?);
            p
        };
        let mut proof = tail;
        while let Some(mut p) = chain.pop() {
            p.premises.push(proof);
            proof = p;
        }
        if let Some(mut r) = root {
            r.premises.push(proof);
            proof = r;
        }
        Ok(proof)
    }

    fn conjunction(&self, children: &[TraceNode], s: &Sequent) -> Result<Proof, ColpError> {
        match children {
            [] => Err(ColpError::Translation("empty body".into())),
            [only] => self.replay(only, s),
            [first, rest @ ..] => {
                let (ps, mut p) = self.node(Rule::ConjR, s)?;
                p.premises.push(self.replay(first, &ps[0])?);
                p.premises.push(self.conjunction(rest, &ps[1])?);
                Ok(p)
            }
        }
    }
}

/// Turns a coinductive derivation into a cut-free proof of the existential
/// closure of its goal.
pub fn colp_to_clj(program: &Program, result: &ColpResult) -> Result<Proof, ColpError> {
    let sig = &program.signature;
    let mut targets = BTreeSet::new();
    collect_loops(&result.trace, &mut |n| {
        if let TraceStep::Loop { ancestor, .. } = &n.step {
            targets.insert(ancestor.clone());
        }
    });
    let mut leftovers = BTreeSet::new();
    collect_loops(&result.trace, &mut |n| {
        if let TraceStep::Resolved { instance, .. } = &n.step {
            for (v, _) in &instance.vars {
                if let Some(t) = result.bindings.get(v) {
                    leftovers.extend(t.free_vars());
                } else {
                    leftovers.insert(v.clone());
                }
            }
        }
    });
    for v in vars_in_order(&result.goal) {
        match result.bindings.get(&v) {
            Some(t) => leftovers.extend(t.free_vars()),
            None => {
                leftovers.insert(v);
            }
        }
    }
    leftovers.retain(|v| !sig.contains(v));
    let ground: BTreeMap<String, Term> = if leftovers.is_empty() {
        BTreeMap::new()
    } else {
        let c = sig
            .base_constants()
            .next()
            .ok_or_else(|| ColpError::Translation("no base constant to ground the answer".into()))?;
        leftovers.into_iter().map(|v| (v, Term::cnst(c))).collect()
    };
    let tr = Translator {
        program,
        ground,
        bindings: &result.bindings,
        targets,
    };

    let vars: Vec<(String, Type)> = vars_in_order(&result.goal)
        .into_iter()
        .map(|v| (v, Type::Iota))
        .collect();
    let goal = Formula::exists_many(&vars, Formula::Atom(result.goal.clone()));
    let mut s = Sequent::new(program.formulas(), goal);
    let mut chain = Vec::new();
    for (v, _) in &vars {
        let (ps, p) = tr.node(Rule::ExR { witness: tr.value(v) }, &s)?;
        chain.push(p);
        s = ps[0].clone();
    }
    let mut proof = tr.replay(&result.trace, &s)?;
    while let Some(mut p) = chain.pop() {
        p.premises.push(proof);
        proof = p;
    }
    Ok(proof)
}
