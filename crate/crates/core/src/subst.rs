//! Substitutions, matching and unification, unifying equations, circular
//! unifiers and anti-unification.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::conv::Conv;
use crate::formula::{Atom, Formula};
use crate::term::{Nameless, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("unifying equations are not linear: `{0}` has more than one equation")]
    NotLinear(String),
    #[error("unifying equations contain a clash")]
    Clash,
    #[error("`{0}` is not a guarded first-order term")]
    NotGuarded(String),
    #[error("atoms with different predicates have no generalisation")]
    NoGeneralisation,
}

fn write_map(f: &mut fmt::Formatter<'_>, m: &BTreeMap<String, Term>) -> fmt::Result {
    write!(f, "[")?;
    for (i, (x, t)) in m.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{}/{}", t, x)?;
    }
    write!(f, "]")
}

/// `(s1 ∘ s2)(x) = s2(x)[s1]`, with identity bindings dropped.
fn compose_maps(s1: &BTreeMap<String, Term>, s2: &BTreeMap<String, Term>) -> BTreeMap<String, Term> {
    let mut out: BTreeMap<String, Term> = s2.iter().map(|(x, t)| (x.clone(), t.subst(s1))).collect();
    for (x, t) in s1 {
        out.entry(x.clone()).or_insert_with(|| t.clone());
    }
    out.retain(|x, t| t.as_var() != Some(x.as_str()));
    out
}

macro_rules! substitution_common {
    ($ty:ident) => {
        impl $ty {
            pub fn identity() -> Self {
                $ty(BTreeMap::new())
            }

            pub fn get(&self, x: &str) -> Option<&Term> {
                self.0.get(x)
            }

            pub fn domain(&self) -> impl Iterator<Item = &String> {
                self.0.keys()
            }

            pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
                self.0.iter()
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn is_identity(&self) -> bool {
                self.0.is_empty()
            }

            pub fn as_map(&self) -> &BTreeMap<String, Term> {
                &self.0
            }

            pub fn apply(&self, t: &Term) -> Term {
                t.subst(&self.0)
            }

            pub fn apply_atom(&self, a: &Atom) -> Atom {
                a.subst(&self.0)
            }

            pub fn apply_formula(&self, f: &Formula) -> Formula {
                f.subst(&self.0)
            }

            /// `self ∘ other`: apply `other` first, then `self`.
            pub fn compose(&self, other: &Self) -> Self {
                $ty(compose_maps(&self.0, &other.0))
            }

            /// Keeps only the bindings of the given variables.
            pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> Self {
                let keep: BTreeSet<&String> = vars.into_iter().collect();
                $ty(self
                    .0
                    .iter()
                    .filter(|(x, _)| keep.contains(x))
                    .map(|(x, t)| (x.clone(), t.clone()))
                    .collect())
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write_map(f, &self.0)
            }
        }
    };
}

/// Finitely supported map from variables to simple first-order terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<String, Term>);

substitution_common!(Substitution);

impl Substitution {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Term)>) -> Substitution {
        let mut m: BTreeMap<String, Term> = pairs.into_iter().collect();
        m.retain(|x, t| t.as_var() != Some(x.as_str()));
        Substitution(m)
    }

    pub fn single(x: &str, t: Term) -> Substitution {
        Substitution::from_pairs([(x.to_string(), t)])
    }

    pub fn to_fix(&self) -> FixSubstitution {
        FixSubstitution(self.0.clone())
    }
}

/// Finitely supported map from variables to guarded first-order terms.
///
/// Range terms are checked for the guarded shape only: every `fix` body
/// must be headed by a constructor. Circular unifiers can leave free
/// variables under a `fix` while the equations are still being solved.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixSubstitution(BTreeMap<String, Term>);

substitution_common!(FixSubstitution);

impl FixSubstitution {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, Term)>) -> Result<FixSubstitution, SubstError> {
        let mut m = BTreeMap::new();
        for (x, t) in pairs {
            if t.has_lam() || !t.is_structurally_guarded() {
                return Err(SubstError::NotGuarded(t.to_string()));
            }
            if t.as_var() != Some(x.as_str()) {
                m.insert(x, t);
            }
        }
        Ok(FixSubstitution(m))
    }

    pub fn single(x: &str, t: Term) -> Result<FixSubstitution, SubstError> {
        FixSubstitution::from_pairs([(x.to_string(), t)])
    }

    /// Equality of range terms up to α.
    pub fn alpha_eq(&self, other: &FixSubstitution) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .all(|(x, t)| other.0.get(x).is_some_and(|u| t.alpha_eq(u)))
    }
}

/// `t[σ] = u` for some `σ`, treating the variables of `u` as constants.
pub fn match_term(t: &Term, u: &Term) -> Option<Substitution> {
    let mut m = BTreeMap::new();
    match_into(t, u, &mut m).then(|| Substitution::from_pairs(m))
}

pub fn match_atom(a: &Atom, b: &Atom) -> Option<Substitution> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    let mut m = BTreeMap::new();
    a.args
        .iter()
        .zip(&b.args)
        .all(|(t, u)| match_into(t, u, &mut m))
        .then(|| Substitution::from_pairs(m))
}

fn match_into(t: &Term, u: &Term, m: &mut BTreeMap<String, Term>) -> bool {
    match t {
        Term::Var(x) => match m.get(x) {
            Some(prev) => prev == u,
            None => {
                m.insert(x.clone(), u.clone());
                true
            }
        },
        Term::Const(c) => matches!(u, Term::Const(d) if c == d),
        Term::App(f, a) => match u {
            Term::App(g, b) => match_into(f, g, m) && match_into(a, b, m),
            _ => false,
        },
        _ => t.alpha_eq(u),
    }
}

/// Most general unifier with occurs check. When both sides of a binding
/// are variables, the variable of `u` is bound.
pub fn unify(t: &Term, u: &Term) -> Option<Substitution> {
    unify_pairs(vec![(t.clone(), u.clone())])
}

pub fn unify_atoms(a: &Atom, b: &Atom) -> Option<Substitution> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    unify_pairs(a.args.iter().cloned().zip(b.args.iter().cloned()).collect())
}

fn unify_pairs(mut work: Vec<(Term, Term)>) -> Option<Substitution> {
    work.reverse();
    let mut s: BTreeMap<String, Term> = BTreeMap::new();
    while let Some((t, u)) = work.pop() {
        let t = t.subst(&s);
        let u = u.subst(&s);
        if t == u {
            continue;
        }
        let (x, v) = match (&t, &u) {
            (_, Term::Var(y)) => (y.clone(), t.clone()),
            (Term::Var(x), _) => (x.clone(), u.clone()),
            (Term::App(f, a), Term::App(g, b)) => {
                work.push((a.as_ref().clone(), b.as_ref().clone()));
                work.push((f.as_ref().clone(), g.as_ref().clone()));
                continue;
            }
            _ => return None,
        };
        if v.occurs_free(&x) {
            return None;
        }
        let bind: BTreeMap<String, Term> = [(x.clone(), v.clone())].into_iter().collect();
        for val in s.values_mut() {
            *val = val.subst(&bind);
        }
        s.insert(x, v);
    }
    Some(Substitution::from_pairs(s))
}

/// Equations `x = t` collected from two atoms, in traversal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnifyingEquations {
    Clash,
    Equations(Vec<(String, Term)>),
}

impl UnifyingEquations {
    pub fn is_clash(&self) -> bool {
        matches!(self, UnifyingEquations::Clash)
    }

    pub fn equations(&self) -> &[(String, Term)] {
        match self {
            UnifyingEquations::Clash => &[],
            UnifyingEquations::Equations(e) => e,
        }
    }

    /// At most one equation per variable.
    pub fn is_linear(&self) -> bool {
        match self {
            UnifyingEquations::Clash => false,
            UnifyingEquations::Equations(es) => {
                let mut seen = BTreeSet::new();
                es.iter().all(|(x, _)| seen.insert(x))
            }
        }
    }

    /// Equality up to a bijective renaming of variables, ignoring order.
    pub fn alpha_eq(&self, other: &UnifyingEquations) -> bool {
        match (self, other) {
            (UnifyingEquations::Clash, UnifyingEquations::Clash) => true,
            (UnifyingEquations::Equations(a), UnifyingEquations::Equations(b)) => {
                if a.len() != b.len() {
                    return false;
                }
                let mut b_left: Vec<&(String, Term)> = b.iter().collect();
                fn go(a: &[(String, Term)], b_left: &mut Vec<&(String, Term)>, ren: &BTreeMap<String, String>) -> bool {
                    let Some(((x, t), rest)) = a.split_first() else {
                        return true;
                    };
                    for i in 0..b_left.len() {
                        let (y, u) = b_left[i];
                        let lhs = Term::func("=", [Term::var(x), t.clone()]);
                        let rhs = Term::func("=", [Term::var(y), u.clone()]);
                        if let Some(ren2) = extend_renaming(&lhs, &rhs, ren) {
                            let taken = b_left.remove(i);
                            if go(rest, b_left, &ren2) {
                                return true;
                            }
                            b_left.insert(i, taken);
                        }
                    }
                    false
                }
                go(a, &mut b_left, &BTreeMap::new())
            }
            _ => false,
        }
    }
}

fn extend_renaming(t: &Term, u: &Term, ren: &BTreeMap<String, String>) -> Option<BTreeMap<String, String>> {
    let mut r = ren.clone();
    fn go(t: &Term, u: &Term, r: &mut BTreeMap<String, String>) -> bool {
        match (t, u) {
            (Term::Var(x), Term::Var(y)) => match r.get(x) {
                Some(z) => z == y,
                None => {
                    if r.values().any(|z| z == y) {
                        return false;
                    }
                    r.insert(x.clone(), y.clone());
                    true
                }
            },
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::App(f, a), Term::App(g, b)) => go(f, g, r) && go(a, b, r),
            _ => t.alpha_eq(u),
        }
    }
    go(t, u, &mut r).then_some(r)
}

impl fmt::Display for UnifyingEquations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnifyingEquations::Clash => write!(f, "clash"),
            UnifyingEquations::Equations(es) => {
                write!(f, "{{")?;
                for (i, (x, t)) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{} = {}", x, t)?;
                }
                write!(f, "}}")
            }
        }
    }
}

fn equations_into(t: &Term, u: &Term, out: &mut Vec<(String, Term)>) -> bool {
    let mut push = |x: &str, v: &Term| {
        let eq = (x.to_string(), v.clone());
        if !out.contains(&eq) {
            out.push(eq);
        }
        true
    };
    if let Term::Var(x) = t {
        return push(x, u);
    }
    if let Term::Var(x) = u {
        return push(x, t);
    }
    let (ht, at) = t.spine();
    let (hu, au) = u.spine();
    match (ht, hu) {
        (Term::Const(f), Term::Const(g)) if f == g && at.len() == au.len() => {
            at.iter().zip(&au).all(|(a, b)| equations_into(a, b, out))
        }
        _ => false,
    }
}

pub fn unifying_equations_terms(t: &Term, u: &Term) -> UnifyingEquations {
    let mut out = Vec::new();
    if equations_into(t, u, &mut out) {
        UnifyingEquations::Equations(out)
    } else {
        UnifyingEquations::Clash
    }
}

pub fn unifying_equations(a: &Atom, b: &Atom) -> UnifyingEquations {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return UnifyingEquations::Clash;
    }
    let mut out = Vec::new();
    for (t, u) in a.args.iter().zip(&b.args) {
        if !equations_into(t, u, &mut out) {
            return UnifyingEquations::Clash;
        }
    }
    UnifyingEquations::Equations(out)
}

/// Solves linear unifying equations in order, wrapping circular bindings
/// in `fix`.
pub fn circular_unifier(u: &UnifyingEquations) -> Result<FixSubstitution, SubstError> {
    let es = match u {
        UnifyingEquations::Clash => return Err(SubstError::Clash),
        UnifyingEquations::Equations(es) => es,
    };
    let mut seen = BTreeSet::new();
    for (x, _) in es {
        if !seen.insert(x) {
            return Err(SubstError::NotLinear(x.clone()));
        }
    }
    let mut delta: BTreeMap<String, Term> = BTreeMap::new();
    for (x, t) in es {
        let ti = t.subst(&delta);
        if ti.as_var() == Some(x.as_str()) {
            continue;
        }
        let bound = if ti.occurs_free(x) { wrap_fix(x, ti) } else { ti };
        let step: BTreeMap<String, Term> = [(x.clone(), bound)].into_iter().collect();
        delta = compose_maps(&step, &delta);
    }
    FixSubstitution::from_pairs(delta)
}

/// `fix x. t`, merging with a leading `fix` of `t` by the diagonal law
/// `fix x. fix y. M = fix y. M[y/x]` so the body stays constructor-headed.
fn wrap_fix(x: &str, t: Term) -> Term {
    match t {
        Term::Fix(y, ty, m) => {
            let body = m.subst1(x, &Term::var(&y));
            Term::fix(&y, ty, body)
        }
        t => Term::fix(x, crate::types::Type::Iota, t),
    }
}

/// Whether `a[δ] ≃ b[δ]`.
pub fn is_fixpoint_unifier(delta: &FixSubstitution, a: &Atom, b: &Atom, fuel: usize) -> Conv {
    delta.apply_atom(a).conv(&delta.apply_atom(b), fuel)
}

/// `g ≤ m`: some substitution instantiates `g` to `m`.
pub fn generalises(g: &Term, m: &Term) -> bool {
    match_term(g, m).is_some()
}

pub fn generalises_atom(g: &Atom, m: &Atom) -> bool {
    match_atom(g, m).is_some()
}

/// Mutual generalisation: equal up to renaming of variables.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    extend_renaming(a, b, &BTreeMap::new()).is_some()
}

pub fn is_variant_atom(a: &Atom, b: &Atom) -> bool {
    a.pred == b.pred
        && a.args.len() == b.args.len()
        && extend_renaming(
            &Term::func("", a.args.iter().cloned()),
            &Term::func("", b.args.iter().cloned()),
            &BTreeMap::new(),
        )
        .is_some()
}

struct AntiUnifier {
    table: HashMap<Vec<Nameless>, String>,
    avoid: BTreeSet<String>,
    counter: usize,
}

impl AntiUnifier {
    fn new(inputs: &[&Term]) -> AntiUnifier {
        let mut avoid = BTreeSet::new();
        for t in inputs {
            t.all_names(&mut avoid);
        }
        AntiUnifier {
            table: HashMap::new(),
            avoid,
            counter: 0,
        }
    }

    fn var_for(&mut self, ts: &[&Term]) -> Term {
        let key: Vec<Nameless> = ts.iter().map(|t| t.nameless()).collect();
        if let Some(v) = self.table.get(&key) {
            return Term::var(v);
        }
        let name = loop {
            self.counter += 1;
            let cand = format!("x{}", self.counter);
            if !self.avoid.contains(&cand) {
                break cand;
            }
        };
        self.table.insert(key, name.clone());
        Term::var(&name)
    }

    fn run(&mut self, ts: &[&Term]) -> Term {
        let first = ts[0];
        if ts.iter().all(|t| t.alpha_eq(first)) {
            return first.clone();
        }
        let spines: Vec<(&Term, Vec<&Term>)> = ts.iter().map(|t| t.spine()).collect();
        let same_head = match spines[0].0 {
            Term::Const(c) => spines
                .iter()
                .all(|(h, args)| matches!(h, Term::Const(d) if d == c) && args.len() == spines[0].1.len()),
            _ => false,
        };
        if !same_head || spines[0].1.is_empty() {
            return self.var_for(ts);
        }
        let n = spines[0].1.len();
        let args: Vec<Term> = (0..n)
            .map(|i| {
                let column: Vec<&Term> = spines.iter().map(|(_, a)| a[i]).collect();
                self.run(&column)
            })
            .collect();
        Term::apps(spines[0].0.clone(), args)
    }
}

/// Least general generalisation of two or more terms.
pub fn anti_unify_many(ts: &[&Term]) -> Term {
    assert!(!ts.is_empty(), "anti-unification needs at least one term");
    AntiUnifier::new(ts).run(ts)
}

pub fn anti_unify(m: &Term, n: &Term) -> Term {
    anti_unify_many(&[m, n])
}

/// Argumentwise least general generalisation with a shared variable table.
pub fn anti_unify_atoms(atoms: &[&Atom]) -> Result<Atom, SubstError> {
    let first = atoms.first().ok_or(SubstError::NoGeneralisation)?;
    if atoms
        .iter()
        .any(|a| a.pred != first.pred || a.args.len() != first.args.len())
    {
        return Err(SubstError::NoGeneralisation);
    }
    let all: Vec<&Term> = atoms.iter().flat_map(|a| a.args.iter()).collect();
    let mut au = AntiUnifier::new(&all);
    let args = (0..first.args.len())
        .map(|i| {
            let column: Vec<&Term> = atoms.iter().map(|a| &a.args[i]).collect();
            au.run(&column)
        })
        .collect::<Vec<_>>();
    Ok(Atom::new(&first.pred, args))
}

/// Replaces every subterm that is the one-step unfolding of a closed `fix`
/// subterm by that `fix`, until nothing changes.
pub fn fold_unfoldings(t: &Term) -> Term {
    let mut cur = t.clone();
    loop {
        let mut fixes: Vec<(Nameless, Term)> = Vec::new();
        collect_closed_fixes(&cur, &mut fixes);
        if fixes.is_empty() {
            return cur;
        }
        let next = fold_with(&cur, &fixes);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn collect_closed_fixes(t: &Term, out: &mut Vec<(Nameless, Term)>) {
    match t {
        Term::Fix(_, _, b) => {
            if t.is_closed() {
                if let Some(u) = t.unfold() {
                    let key = u.nameless();
                    if !out.iter().any(|(k, _)| *k == key) {
                        out.push((key, t.clone()));
                    }
                }
            }
            collect_closed_fixes(b, out);
        }
        Term::App(f, a) => {
            collect_closed_fixes(f, out);
            collect_closed_fixes(a, out);
        }
        Term::Lam(_, _, b) => collect_closed_fixes(b, out),
        _ => {}
    }
}

fn fold_with(t: &Term, fixes: &[(Nameless, Term)]) -> Term {
    if matches!(t, Term::App(..)) {
        let key = t.nameless();
        if let Some((_, fx)) = fixes.iter().find(|(k, _)| *k == key) {
            return fx.clone();
        }
    }
    match t {
        Term::App(f, a) => Term::app(fold_with(f, fixes), fold_with(a, fixes)),
        _ => t.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    fn f1(f: &str, a: Term) -> Term {
        Term::func(f, [a])
    }

    fn f2(f: &str, a: Term, b: Term) -> Term {
        Term::func(f, [a, b])
    }

    fn fx(x: &str, body: Term) -> Term {
        Term::fix(x, crate::types::Type::Iota, body)
    }

    #[test]
    fn apply_examples() {
        let s = Substitution::single("x", f2("cons", Term::cnst("0"), v("x")));
        let a = Atom::new("stream", [v("x")]);
        assert_eq!(s.apply_atom(&a).to_string(), "stream(cons(0, x))");
        assert_eq!(Substitution::identity().apply(&v("y")), v("y"));
        let d = FixSubstitution::single("y", fx("y", f1("g", f1("f", v("y"))))).unwrap();
        assert_eq!(d.apply(&f1("f", v("y"))).to_string(), "f(fix y. g(f(y)))");
    }

    #[test]
    fn compose_examples() {
        let s1 = Substitution::single("y", f2("g", v("x"), v("y")));
        let s2 = Substitution::single("x", f2("f", v("x"), v("y")));
        assert_eq!(s1.compose(&s2).to_string(), "[f(x, g(x, y))/x, g(x, y)/y]");
        assert_eq!(Substitution::identity().compose(&s2), s2);
        let d1 = FixSubstitution::single("y", fx("y", f1("g", f1("f", v("y"))))).unwrap();
        let d2 = FixSubstitution::single("x", f1("f", v("y"))).unwrap();
        assert_eq!(d1.compose(&d2).to_string(), "[f(fix y. g(f(y)))/x, fix y. g(f(y))/y]");
    }

    #[test]
    fn matching_and_unification() {
        let s = match_term(
            &f1("stream", v("x")),
            &f1("stream", f2("cons", Term::cnst("0"), v("y"))),
        );
        assert_eq!(s.unwrap().to_string(), "[cons(0, y)/x]");
        assert!(unify(&f1("p", v("x")), &f1("p", f1("f", v("x")))).is_none());
        let t = f2("p", f1("f", v("y")), f1("g", v("x")));
        let u = f2("p", v("x"), v("y"));
        assert!(unify(&t, &u).is_none());
        let mgu = unify(&f2("p", v("x"), f1("f", v("y"))), &f2("p", Term::cnst("a"), v("z"))).unwrap();
        assert_eq!(mgu.to_string(), "[a/x, f(y)/z]");
    }

    #[test]
    fn unifying_equation_examples() {
        let a = Atom::new("p", [f2("f", v("x"), v("y")), f2("g", v("x"), v("y"))]);
        let b = Atom::new("p", [v("x"), v("y")]);
        let u = unifying_equations(&a, &b);
        assert_eq!(u.to_string(), "{x = f(x, y), y = g(x, y)}");
        assert!(u.is_linear());
        let a = Atom::new("p", [f1("f", v("y")), f1("g", v("x"))]);
        let u = unifying_equations(&a, &b);
        assert_eq!(u.to_string(), "{x = f(y), y = g(x)}");
        let clash = unifying_equations(&Atom::new("p", [Term::cnst("a")]), &Atom::new("p", [Term::cnst("b")]));
        assert!(clash.is_clash());
        let same = unifying_equations(&Atom::new("p", [Term::cnst("a")]), &Atom::new("p", [Term::cnst("a")]));
        assert_eq!(same, UnifyingEquations::Equations(vec![]));
    }

    #[test]
    fn circular_unifier_examples() {
        let u = UnifyingEquations::Equations(vec![("x".into(), f2("cons", Term::cnst("0"), v("x")))]);
        let d = circular_unifier(&u).unwrap();
        let want = FixSubstitution::single("x", fx("x", f2("cons", Term::cnst("0"), v("x")))).unwrap();
        assert!(d.alpha_eq(&want));

        let u = UnifyingEquations::Equations(vec![("x".into(), f1("f", v("y"))), ("y".into(), f1("g", v("x")))]);
        let d = circular_unifier(&u).unwrap();
        let gy = fx("y", f1("g", f1("f", v("y"))));
        let want = FixSubstitution::from_pairs([("x".into(), f1("f", gy.clone())), ("y".into(), gy)]).unwrap();
        assert!(d.alpha_eq(&want), "{}", d);

        let u = UnifyingEquations::Equations(vec![
            ("x".into(), f2("f", v("x"), v("y"))),
            ("y".into(), f2("g", v("x"), v("y"))),
        ]);
        let d = circular_unifier(&u).unwrap();
        let inner = fx("y", f2("g", fx("z", f2("f", v("z"), v("y"))), v("y")));
        let want = FixSubstitution::from_pairs([
            ("x".into(), fx("x", f2("f", v("x"), inner.clone()))),
            ("y".into(), inner),
        ])
        .unwrap();
        assert!(d.alpha_eq(&want), "{}", d);
    }

    #[test]
    fn circular_unifier_merges_nested_fix() {
        let a = Atom::new("p", [f1("f", f2("g", f1("f", v("x")), v("z"))), v("z")]);
        let b = Atom::new("p", [v("x"), v("x")]);
        let d = circular_unifier(&unifying_equations(&a, &b)).unwrap();
        let want = fx("x", f1("f", f2("g", f1("f", v("x")), v("x"))));
        assert!(d.get("z").unwrap().alpha_eq(&want), "{}", d);
        assert_eq!(is_fixpoint_unifier(&d, &a, &b, 32), Conv::Equal);
    }

    #[test]
    fn circular_unifier_rejects_nonlinear() {
        let u = UnifyingEquations::Equations(vec![("x".into(), Term::cnst("a")), ("x".into(), Term::cnst("b"))]);
        assert_eq!(circular_unifier(&u), Err(SubstError::NotLinear("x".into())));
        assert_eq!(circular_unifier(&UnifyingEquations::Clash), Err(SubstError::Clash));
    }

    #[test]
    fn fixpoint_unifier_examples() {
        let d = FixSubstitution::single("x", fx("x", f2("cons", Term::cnst("0"), v("x")))).unwrap();
        let a = Atom::new("stream", [f2("cons", Term::cnst("0"), v("x"))]);
        let b = Atom::new("stream", [v("x")]);
        assert_eq!(is_fixpoint_unifier(&d, &a, &b, 32), Conv::Equal);
        let pa = Atom::new("p", [Term::cnst("a")]);
        assert_eq!(
            is_fixpoint_unifier(&FixSubstitution::identity(), &pa, &pa, 32),
            Conv::Equal
        );
        let a = Atom::new("p", [f1("f", v("y")), f1("g", v("x"))]);
        let b = Atom::new("p", [v("x"), v("y")]);
        let d = circular_unifier(&unifying_equations(&a, &b)).unwrap();
        assert_eq!(is_fixpoint_unifier(&d, &a, &b, 32), Conv::Equal);
    }

    #[test]
    fn anti_unification_examples() {
        let pa = Atom::new("p", [Term::cnst("a")]);
        let pb = Atom::new("p", [Term::cnst("b")]);
        let g = anti_unify_atoms(&[&pa, &pb]).unwrap();
        assert!(is_variant_atom(&g, &Atom::new("p", [v("x")])));
        let t = f2("f", v("y"), Term::cnst("a"));
        assert_eq!(anti_unify(&t, &t), t);
        let r = Atom::new("from", [Term::cnst("0"), v("y")]);
        let l = Atom::new("from", [v("x"), v("z")]);
        let g = anti_unify_atoms(&[&r, &l]).unwrap();
        assert!(is_variant_atom(&g, &Atom::new("from", [v("u"), v("w")])));
        let q = Atom::new("q", [v("x")]);
        assert_eq!(anti_unify_atoms(&[&pa, &q]), Err(SubstError::NoGeneralisation));
        // repeated pairs share a variable
        let m = f2("f", Term::cnst("a"), Term::cnst("a"));
        let n = f2("f", Term::cnst("b"), Term::cnst("b"));
        let g = anti_unify(&m, &n);
        assert!(is_variant(&g, &f2("f", v("x"), v("x"))));
    }

    #[test]
    fn folding_recovers_fixpoint() {
        let z = fx("X1", f2("cons", Term::cnst("0"), v("X1")));
        let unfolded = f2("cons", Term::cnst("0"), z.clone());
        assert!(fold_unfoldings(&unfolded).alpha_eq(&z));
        let twice = f2("cons", Term::cnst("0"), unfolded);
        assert!(fold_unfoldings(&twice).alpha_eq(&z));
    }

    #[test]
    fn equations_alpha() {
        let a = UnifyingEquations::Equations(vec![("x".into(), f2("cons", Term::cnst("0"), v("x")))]);
        let b = UnifyingEquations::Equations(vec![("X1".into(), f2("cons", Term::cnst("0"), v("X1")))]);
        assert!(a.alpha_eq(&b));
        let c = UnifyingEquations::Equations(vec![("y".into(), f2("cons", Term::cnst("0"), v("x")))]);
        assert!(!a.alpha_eq(&c));
    }
}
