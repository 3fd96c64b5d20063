//! Bounded analytic proof search.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use super::{premises_of, Premise, Proof, Rule, Sequent, Side};
use crate::conv::{Conv, DEFAULT_CONV_FUEL};
use crate::formula::{Atom, Formula, FormulaKey, Program};
use crate::subst::unify_atoms;
use crate::term::{fresh_name, Term};
use crate::types::{Context, Signature, Type};

pub const DEFAULT_SEARCH_DEPTH: usize = 16;
const STEP_BUDGET: usize = 2_000_000;
const MAX_GROUND_CHOICES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of logical rules on any branch.
    pub depth: usize,
    pub conv_fuel: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            depth: DEFAULT_SEARCH_DEPTH,
            conv_fuel: DEFAULT_CONV_FUEL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no proof found up to depth {0}")]
    NotFound(usize),
    #[error("the sequent is not well formed: {0}")]
    IllFormed(String),
}

/// Searches for a cut-free proof of `goal` from the clauses of `program`.
pub fn prove_analytic(program: &Program, goal: &Formula, limits: Limits) -> Result<Proof, SearchError> {
    prove_sequent(
        &Sequent::new(program.formulas(), goal.clone()),
        &program.signature,
        limits,
    )
}

/// Iterative deepening over the number of logical rules per branch.
pub fn prove_sequent(s: &Sequent, sig: &Signature, limits: Limits) -> Result<Proof, SearchError> {
    let ctx: Context = s
        .free_vars()
        .into_iter()
        .filter(|v| !sig.contains(v))
        .map(|v| (v, Type::Iota))
        .collect();
    for f in s.gamma_t.iter().chain(&s.gamma_a).chain(std::iter::once(&s.goal)) {
        f.check(sig, &ctx)
            .map_err(|e| SearchError::IllFormed(format!("{}: {}", f, e)))?;
    }
    let mut searcher = Searcher {
        sig,
        fuel: limits.conv_fuel,
        failed: HashMap::new(),
        steps: 0,
    };
    for d in 1..=limits.depth {
        if let Some(p) = searcher.prove(s, &ctx, d) {
            return Ok(p);
        }
        if searcher.steps > STEP_BUDGET {
            break;
        }
    }
    Err(SearchError::NotFound(limits.depth))
}

/// Combines a proof of `lemma` and a proof using it as an assumption.
/// `rest` must prove the same goal as wanted from the contexts of `lemma_proof`
/// extended by `lemma` in Γ_A.
pub fn apply_cut(lemma_proof: Proof, rest: Proof) -> Result<Proof, SearchError> {
    let lemma = lemma_proof.conclusion.goal.clone();
    let base = &lemma_proof.conclusion;
    let mut expect = base.with_goal(rest.conclusion.goal.clone());
    expect.gamma_a.push(lemma.clone());
    if let Some(d) = expect.difference(&rest.conclusion) {
        return Err(SearchError::IllFormed(format!("cut premises disagree: {}", d)));
    }
    Ok(Proof {
        rule: Rule::Cut { lemma },
        conclusion: base.with_goal(rest.conclusion.goal.clone()),
        premises: vec![lemma_proof, rest],
    })
}

type Key = [Vec<FormulaKey>; 4];

struct Searcher<'a> {
    sig: &'a Signature,
    fuel: usize,
    failed: HashMap<Key, usize>,
    steps: usize,
}

fn node(rule: Rule, s: &Sequent, premises: Vec<Proof>) -> Proof {
    Proof {
        rule,
        conclusion: s.clone(),
        premises,
    }
}

fn meta(i: usize) -> String {
    format!("?{}", i)
}

fn is_meta(v: &str) -> bool {
    v.starts_with('?')
}

/// Atoms a D-formula can conclude, looking through ∧, → and ∀.
fn heads(f: &Formula, out: &mut Vec<Atom>) {
    match f {
        Formula::Atom(a) => out.push(a.clone()),
        Formula::And(a, b) => {
            heads(a, out);
            heads(b, out);
        }
        Formula::Impl(_, b) => heads(b, out),
        Formula::Forall(_, _, b) => heads(b, out),
        _ => {}
    }
}

fn concludes(f: &Formula, pred: &str) -> bool {
    let mut hs = Vec::new();
    heads(f, &mut hs);
    hs.iter().any(|h| h.pred == pred)
}

fn has_impl(f: &Formula) -> bool {
    match f {
        Formula::Impl(..) => true,
        Formula::And(a, b) | Formula::Or(a, b) => has_impl(a) || has_impl(b),
        Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => has_impl(b),
        Formula::Atom(_) => false,
    }
}

/// Strips the leading ∀s, replacing the bound variables by metas.
fn open_prefix(f: &Formula) -> (Vec<(String, Type)>, Formula) {
    let mut binders = Vec::new();
    let mut cur = f.clone();
    while let Formula::Forall(x, ty, body) = cur {
        let m = meta(binders.len());
        cur = body.subst1(&x, &Term::var(&m));
        binders.push((m, ty));
    }
    (binders, cur)
}

impl<'a> Searcher<'a> {
    fn premises(&self, rule: &Rule, s: &Sequent, ctx: &Context) -> Option<Vec<Premise>> {
        premises_of(rule, s, self.sig, ctx, self.fuel).ok()
    }

    fn prove(&mut self, s: &Sequent, ctx: &Context, d: usize) -> Option<Proof> {
        if d == 0 || self.steps > STEP_BUDGET {
            return None;
        }
        self.steps += 1;
        let key = s.key();
        if self.failed.get(&key).is_some_and(|&fd| fd >= d) {
            return None;
        }
        let r = self.prove_inner(s, ctx, d);
        if r.is_none() {
            let e = self.failed.entry(key).or_insert(0);
            *e = (*e).max(d);
        }
        r
    }

    /// Proves every premise, each under the budget `d`.
    fn prove_all(&mut self, ps: Vec<Premise>, d: usize) -> Option<Vec<Proof>> {
        let mut out = Vec::new();
        for p in ps {
            out.push(self.prove(&p.sequent, &p.ctx, d)?);
        }
        Some(out)
    }

    fn apply(&mut self, rule: Rule, s: &Sequent, ctx: &Context, d: usize) -> Option<Proof> {
        let ps = self.premises(&rule, s, ctx)?;
        let sub = self.prove_all(ps, d - 1)?;
        Some(node(rule, s, sub))
    }

    fn axiom(&self, s: &Sequent) -> Option<Proof> {
        for side in [Side::T, Side::A] {
            for (pos, f) in s.side(side).iter().enumerate() {
                if f.conv(&s.goal, self.fuel) == Conv::Equal {
                    return Some(node(Rule::Ax { side, pos }, s, vec![]));
                }
            }
        }
        None
    }

    fn cofix(&mut self, s: &Sequent, ctx: &Context, d: usize) -> Option<Proof> {
        if s.gamma_c.iter().any(|c| c.alpha_eq(&s.goal)) || !s.goal.is_coinduction_hypothesis(self.sig) {
            return None;
        }
        self.apply(Rule::CoFix, s, ctx, d)
    }

    fn prove_inner(&mut self, s: &Sequent, ctx: &Context, d: usize) -> Option<Proof> {
        if let Some(p) = self.axiom(s) {
            return Some(p);
        }
        match &s.goal {
            Formula::And(..) => self.apply(Rule::ConjR, s, ctx, d),
            Formula::Or(..) => self
                .apply(Rule::DisjR1, s, ctx, d)
                .or_else(|| self.apply(Rule::DisjR2, s, ctx, d)),
            Formula::Impl(..) => self.apply(Rule::ImplR, s, ctx, d),
            Formula::Forall(x, _, _) => {
                if let Some(p) = self.cofix(s, ctx, d) {
                    return Some(p);
                }
                let taken = s.free_vars();
                let eigen = fresh_name(x, |n| taken.contains(n) || ctx.contains(n) || self.sig.contains(n));
                self.apply(Rule::AllR { eigen }, s, ctx, d)
            }
            Formula::Exists(..) => {
                for w in self.exists_candidates(s, ctx) {
                    if let Some(p) = self.apply(Rule::ExR { witness: w }, s, ctx, d) {
                        return Some(p);
                    }
                }
                None
            }
            Formula::Atom(goal) => {
                let goal = goal.clone();
                if let Some(p) = self.backchain(s, ctx, d, &goal) {
                    return Some(p);
                }
                self.cofix(s, ctx, d)
            }
        }
    }

    fn backchain(&mut self, s: &Sequent, ctx: &Context, d: usize, goal: &Atom) -> Option<Proof> {
        for side in [Side::T, Side::A] {
            for pos in 0..s.side(side).len() {
                let f = &s.side(side)[pos];
                if matches!(f, Formula::Atom(_)) || !concludes(f, &goal.pred) {
                    continue;
                }
                if let Some(p) = self.focus(s, ctx, d, side, pos, goal) {
                    return Some(p);
                }
                if has_impl(f) {
                    let ctr = match side {
                        Side::T => Rule::CtrT { pos },
                        _ => Rule::CtrA { pos },
                    };
                    let mut ps = self.premises(&ctr, s, ctx)?;
                    let p = ps.remove(0);
                    if let Some(sub) = self.focus(&p.sequent, &p.ctx, d, side, pos, goal) {
                        return Some(node(ctr, s, vec![sub]));
                    }
                }
            }
        }
        None
    }

    /// Decomposes the formula at `side`/`pos` with left rules until its
    /// head closes the atomic goal by an axiom.
    fn focus(&mut self, s: &Sequent, ctx: &Context, d: usize, side: Side, pos: usize, goal: &Atom) -> Option<Proof> {
        if d == 0 {
            return None;
        }
        self.steps += 1;
        let f = s.side(side)[pos].clone();
        match &f {
            Formula::Atom(_) => {
                let rule = Rule::Ax { side, pos };
                self.premises(&rule, s, ctx)?;
                Some(node(rule, s, vec![]))
            }
            Formula::Forall(..) => {
                for ws in self.instantiations(&f, goal, ctx) {
                    if let Some(p) = self.instantiate(s, ctx, d, side, pos, goal, &ws) {
                        return Some(p);
                    }
                }
                None
            }
            Formula::Impl(_, psi) => {
                if !concludes(psi, &goal.pred) {
                    return None;
                }
                let rule = match side {
                    Side::T => Rule::ImplLT { pos },
                    _ => Rule::ImplLG { pos },
                };
                let mut ps = self.premises(&rule, s, ctx)?;
                let right = ps.pop()?;
                let left = ps.pop()?;
                let l = self.focus(&left.sequent, &left.ctx, d - 1, side, pos, goal)?;
                let r = self.prove(&right.sequent, &right.ctx, d - 1)?;
                Some(node(rule, s, vec![l, r]))
            }
            Formula::And(a, b) => {
                for (pick, part) in [(1u8, a), (2u8, b)] {
                    if !concludes(part, &goal.pred) {
                        continue;
                    }
                    let rule = match side {
                        Side::T => Rule::ConjLT { pos, pick },
                        _ => Rule::ConjLG { pos, pick },
                    };
                    let ps = self.premises(&rule, s, ctx)?;
                    let p = &ps[0];
                    if let Some(sub) = self.focus(&p.sequent, &p.ctx, d - 1, side, pos, goal) {
                        return Some(node(rule, s, vec![sub]));
                    }
                }
                None
            }
            _ => None,
        }
    }

    /// Applies AllLT/AllLG once per witness, then keeps focusing.
    #[allow(clippy::too_many_arguments)]
    fn instantiate(
        &mut self,
        s: &Sequent,
        ctx: &Context,
        d: usize,
        side: Side,
        pos: usize,
        goal: &Atom,
        ws: &[Term],
    ) -> Option<Proof> {
        if ws.is_empty() {
            return self.focus(s, ctx, d, side, pos, goal);
        }
        if d == 0 {
            return None;
        }
        let rule = match side {
            Side::T => Rule::AllLT {
                pos,
                witness: ws[0].clone(),
            },
            _ => Rule::AllLG {
                pos,
                witness: ws[0].clone(),
            },
        };
        let ps = self.premises(&rule, s, ctx)?;
        let p = &ps[0];
        let sub = self.instantiate(&p.sequent, &p.ctx, d - 1, side, pos, goal, &ws[1..])?;
        Some(node(rule, s, vec![sub]))
    }

    /// Witness vectors for the leading ∀s of `f` that make one of its heads
    /// match `goal`.
    fn instantiations(&self, f: &Formula, goal: &Atom, ctx: &Context) -> Vec<Vec<Term>> {
        let (binders, matrix) = open_prefix(f);
        let metas: BTreeSet<String> = binders.iter().map(|(m, _)| m.clone()).collect();
        let mut hs = Vec::new();
        heads(&matrix, &mut hs);
        let mut out: Vec<Vec<Term>> = Vec::new();
        for h in hs
            .iter()
            .filter(|h| h.pred == goal.pred && h.args.len() == goal.args.len())
        {
            let mut binds = BTreeMap::new();
            let ok = h
                .args
                .iter()
                .zip(&goal.args)
                .all(|(p, t)| self.match_whnf(p, t, &metas, &mut binds));
            if !ok {
                continue;
            }
            for ws in self.complete(&binders, &binds, ctx) {
                if !out.iter().any(|o| o.iter().zip(&ws).all(|(a, b)| a.alpha_eq(b))) {
                    out.push(ws);
                }
            }
        }
        out
    }

    /// Fills unbound metas with base constants and variables in scope.
    fn complete(&self, binders: &[(String, Type)], binds: &BTreeMap<String, Term>, ctx: &Context) -> Vec<Vec<Term>> {
        let mut acc: Vec<Vec<Term>> = vec![vec![]];
        for (m, ty) in binders {
            let choices: Vec<Term> = match binds.get(m) {
                Some(t) => vec![t.clone()],
                None => self.ground_choices(ty, ctx),
            };
            let mut next = Vec::new();
            for prefix in &acc {
                for c in &choices {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    next.push(v);
                }
            }
            acc = next;
        }
        acc
    }

    fn ground_choices(&self, ty: &Type, ctx: &Context) -> Vec<Term> {
        let mut out: Vec<Term> = ctx.iter().filter(|(_, t)| t == ty).map(|(v, _)| Term::var(v)).collect();
        if *ty == Type::Iota {
            out.extend(self.sig.base_constants().map(Term::cnst));
        }
        out.truncate(MAX_GROUND_CHOICES);
        out
    }

    /// Matches `pattern` (with metavariables `metas`) against `term`,
    /// unfolding the term where the pattern is rigid.
    fn match_whnf(
        &self,
        pattern: &Term,
        term: &Term,
        metas: &BTreeSet<String>,
        binds: &mut BTreeMap<String, Term>,
    ) -> bool {
        if let Term::Var(v) = pattern {
            if metas.contains(v) {
                return match binds.get(v) {
                    Some(b) => b.alpha_eq(term) || crate::conv::conv(b, term, self.fuel) == Conv::Equal,
                    None => {
                        binds.insert(v.clone(), term.clone());
                        true
                    }
                };
            }
        }
        if !pattern.free_vars().iter().any(|v| metas.contains(v)) {
            return crate::conv::conv(pattern, term, self.fuel) != Conv::NotEqual;
        }
        let (head, args) = pattern.spine();
        if let Term::Const(c) = head {
            let Some((t, _)) = term.whnf(self.fuel) else {
                return false;
            };
            let (th, targs) = t.spine();
            return matches!(th, Term::Const(c2) if c2 == c)
                && targs.len() == args.len()
                && args
                    .iter()
                    .zip(&targs)
                    .all(|(p, u)| self.match_whnf(p, u, metas, binds));
        }
        match (pattern, term) {
            (Term::App(f, a), Term::App(g, b)) => {
                self.match_whnf(f, g, metas, binds) && self.match_whnf(a, b, metas, binds)
            }
            _ => false,
        }
    }

    /// Witnesses for an existential goal, found by unifying its first atom
    /// with the heads of the available formulas.
    fn exists_candidates(&self, s: &Sequent, ctx: &Context) -> Vec<Term> {
        let Formula::Exists(x, ty, body) = &s.goal else {
            return vec![];
        };
        let target = "?x";
        let opened = body.subst1(x, &Term::var(target));
        let Some(atom) = first_atom(&opened) else {
            return vec![];
        };
        let mut out: Vec<Term> = Vec::new();
        let push = |t: Term, out: &mut Vec<Term>| {
            if !out.iter().any(|o| o.alpha_eq(&t)) {
                out.push(t);
            }
        };
        for f in s.gamma_t.iter().chain(&s.gamma_a) {
            let (binders, matrix) = open_prefix(f);
            let renamed: BTreeMap<String, Term> = binders
                .iter()
                .map(|(m, _)| (m.clone(), Term::var(&format!("{}h", m))))
                .collect();
            let matrix = matrix.subst(&renamed);
            let mut hs = Vec::new();
            heads(&matrix, &mut hs);
            for h in hs.iter().filter(|h| h.pred == atom.pred) {
                if let Some(u) = unify_atoms(&atom, h) {
                    let w = u.apply(&Term::var(target));
                    if !w.free_vars().iter().any(|v| is_meta(v)) {
                        push(w, &mut out);
                    }
                }
            }
        }
        for c in self.ground_choices(ty, ctx) {
            push(c, &mut out);
        }
        out
    }
}

fn first_atom(f: &Formula) -> Option<Atom> {
    match f {
        Formula::Atom(a) => Some(a.clone()),
        Formula::And(a, b) | Formula::Or(a, b) => first_atom(a).or_else(|| first_atom(b)),
        Formula::Exists(_, _, b) | Formula::Forall(_, _, b) => first_atom(b),
        Formula::Impl(_, b) => first_atom(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clj::check;
    use crate::parse::{parse_goal, parse_program};

    fn prog(src: &str) -> Program {
        parse_program(src).unwrap()
    }

    #[test]
    fn stream_fixpoint_is_provable() {
        let p = prog("stream(cons(0, X)) :- stream(X).");
        let g = parse_goal("stream(fix x. cons(0, x))", &p.signature).unwrap();
        let proof = prove_analytic(&p, &g, Limits::default()).unwrap();
        check(&proof, &p.signature, DEFAULT_CONV_FUEL).unwrap();
        assert_eq!(proof.rule, Rule::CoFix);
        assert!(!proof.contains_cut());
    }

    #[test]
    fn lemma_of_gamma_t_is_provable() {
        let p = prog("type a : i.\np(X) :- p(f(X)).");
        let g = parse_goal("forall x. p(x)", &p.signature).unwrap();
        let proof = prove_analytic(&p, &g, Limits::default()).unwrap();
        check(&proof, &p.signature, DEFAULT_CONV_FUEL).unwrap();
        assert_eq!(
            proof.rule_names(),
            vec!["CoFix", "AllR", "AllLT", "ImplLT", "Ax", "AllLG", "Ax"]
        );
    }

    #[test]
    fn gamma_t_atom_is_not_provable_without_cut() {
        let p = prog("type a : i.\np(X) :- p(f(X)).");
        let g = parse_goal("p(a)", &p.signature).unwrap();
        for depth in [5, 10, 15, 20] {
            let r = prove_analytic(
                &p,
                &g,
                Limits {
                    depth,
                    conv_fuel: DEFAULT_CONV_FUEL,
                },
            );
            assert_eq!(r, Err(SearchError::NotFound(depth)));
        }
    }

    #[test]
    fn cut_with_lemma_proves_gamma_t_atom() {
        let p = prog("type a : i.\np(X) :- p(f(X)).");
        let lemma = parse_goal("forall x. p(x)", &p.signature).unwrap();
        let goal = parse_goal("p(a)", &p.signature).unwrap();
        let lp = prove_analytic(&p, &lemma, Limits::default()).unwrap();
        let mut rest = Sequent::new(p.formulas(), goal);
        rest.gamma_a.push(lemma);
        let rp = prove_sequent(&rest, &p.signature, Limits::default()).unwrap();
        let proof = apply_cut(lp, rp).unwrap();
        check(&proof, &p.signature, DEFAULT_CONV_FUEL).unwrap();
        assert!(proof.contains_cut());
    }

    #[test]
    fn from_lemma_with_fixpoint_witness() {
        let p = prog("type 0 : i.\nfrom(X, cons(X, Y)) :- from(s(X), Y).");
        let ch = parse_goal("forall x. from(x, (fix f. \\x. cons(x, f (s x))) x)", &p.signature).unwrap();
        let proof = prove_analytic(&p, &ch, Limits::default()).unwrap();
        check(&proof, &p.signature, DEFAULT_CONV_FUEL).unwrap();
        let goal = parse_goal("exists z. from(0, z)", &p.signature).unwrap();
        let mut rest = Sequent::new(p.formulas(), goal);
        rest.gamma_a.push(ch);
        let rp = prove_sequent(&rest, &p.signature, Limits::default()).unwrap();
        let Rule::ExR { witness } = &rp.rule else {
            panic!("{}", rp.render())
        };
        assert_eq!(witness.to_string(), "(fix f. \\x. cons(x, f(s(x))))(0)");
    }

    #[test]
    fn fib_lemma() {
        let p = prog("fib(X, Y, cons(X, Z)) :- fib(Y, X + Y, Z).");
        let ch = parse_goal(
            "forall x y. fib(x, y, (fix f. \\x y. cons(x, f y (x + y))) x y)",
            &p.signature,
        )
        .unwrap();
        let proof = prove_analytic(&p, &ch, Limits::default()).unwrap();
        check(&proof, &p.signature, DEFAULT_CONV_FUEL).unwrap();
    }
}
