//! Simply-typed λ/fix terms: construction, capture-avoiding substitution,
//! α-equivalence, typing, reduction and the guardedness classes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::TermError;
use crate::types::{Context, Signature, Type};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(Arc<Term>, Arc<Term>),
    Lam(String, Type, Arc<Term>),
    Fix(String, Type, Arc<Term>),
}

/// De Bruijn form used for α-equivalence and hashing. Free variables keep
/// their names.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Nameless {
    Free(String),
    Bound(usize),
    Const(String),
    App(Box<Nameless>, Box<Nameless>),
    Lam(Type, Box<Nameless>),
    Fix(Type, Box<Nameless>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn cnst(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    /// `head a1 ... an`.
    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// First-order application sugar `f(a1, ..., an)` with `f` a constant.
    pub fn func(f: &str, args: impl IntoIterator<Item = Term>) -> Term {
        Term::apps(Term::cnst(f), args)
    }

    pub fn lam(x: &str, ty: Type, body: Term) -> Term {
        Term::Lam(x.to_string(), ty, Arc::new(body))
    }

    pub fn fix(x: &str, ty: Type, body: Term) -> Term {
        Term::Fix(x.to_string(), ty, Arc::new(body))
    }

    /// Splits an application spine into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(x) => Some(x),
            _ => None,
        }
    }

    /// Head constant name of a spine, if the head is a constant.
    pub fn head_const(&self) -> Option<&str> {
        match self.spine().0 {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Term::Lam(x, _, b) | Term::Fix(x, _, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => x == y,
            Term::Const(_) => false,
            Term::App(f, a) => f.occurs_free(x) || a.occurs_free(x),
            Term::Lam(y, _, b) | Term::Fix(y, _, b) => y != x && b.occurs_free(x),
        }
    }

    /// Every variable name mentioned, free or bound.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Const(_) => {}
            Term::App(f, a) => {
                f.all_names(out);
                a.all_names(out);
            }
            Term::Lam(x, _, b) | Term::Fix(x, _, b) => {
                out.insert(x.clone());
                b.all_names(out);
            }
        }
    }

    pub fn constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::App(f, a) => {
                f.constants(out);
                a.constants(out);
            }
            Term::Lam(_, _, b) | Term::Fix(_, _, b) => b.constants(out),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn has_fix(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::App(f, a) => f.has_fix() || a.has_fix(),
            Term::Lam(_, _, b) => b.has_fix(),
            Term::Fix(..) => true,
        }
    }

    pub fn has_lam(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::App(f, a) => f.has_lam() || a.has_lam(),
            Term::Lam(..) => true,
            Term::Fix(_, _, b) => b.has_lam(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(f, a) => f.size() + a.size(),
            Term::Lam(_, _, b) | Term::Fix(_, _, b) => 1 + b.size(),
        }
    }

    /// Simple terms contain no `fix`.
    pub fn is_simple(&self) -> bool {
        !self.has_fix()
    }

    /// First-order, λ- and fix-free application tree.
    pub fn is_fo_simple(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::App(..) => {
                let (h, args) = self.spine();
                matches!(h, Term::Const(_)) && args.iter().all(|a| a.is_fo_simple())
            }
            _ => false,
        }
    }

    /// Capture-avoiding simultaneous substitution.
    pub fn subst(&self, map: &BTreeMap<String, Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::App(f, a) => Term::app(f.subst(map), a.subst(map)),
            Term::Lam(x, ty, body) | Term::Fix(x, ty, body) => {
                let (x2, body2) = subst_under_binder(x, body, map);
                match self {
                    Term::Lam(..) => Term::Lam(x2, ty.clone(), Arc::new(body2)),
                    _ => Term::Fix(x2, ty.clone(), Arc::new(body2)),
                }
            }
        }
    }

    pub fn subst1(&self, x: &str, by: &Term) -> Term {
        let mut m = BTreeMap::new();
        m.insert(x.to_string(), by.clone());
        self.subst(&m)
    }

    pub fn rename_var(&self, from: &str, to: &str) -> Term {
        self.subst1(from, &Term::var(to))
    }

    pub fn nameless(&self) -> Nameless {
        self.nameless_in(&mut Vec::new())
    }

    pub(crate) fn nameless_in(&self, env: &mut Vec<String>) -> Nameless {
        match self {
            Term::Var(x) => match env.iter().rev().position(|b| b == x) {
                Some(i) => Nameless::Bound(i),
                None => Nameless::Free(x.clone()),
            },
            Term::Const(c) => Nameless::Const(c.clone()),
            Term::App(f, a) => Nameless::App(Box::new(f.nameless_in(env)), Box::new(a.nameless_in(env))),
            Term::Lam(x, ty, b) | Term::Fix(x, ty, b) => {
                env.push(x.clone());
                let inner = Box::new(b.nameless_in(env));
                env.pop();
                if matches!(self, Term::Lam(..)) {
                    Nameless::Lam(ty.clone(), inner)
                } else {
                    Nameless::Fix(ty.clone(), inner)
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self == other || self.nameless() == other.nameless()
    }

    /// One fix-unfolding `fix x. M ⇒ M[fix x. M / x]`.
    pub fn unfold(&self) -> Option<Term> {
        match self {
            Term::Fix(x, _, body) => Some(body.subst1(x, self)),
            _ => None,
        }
    }

    /// One leftmost-outermost step. `fix` is unfolded only in head position
    /// of the whole term; elsewhere only β-redexes are contracted.
    pub fn reduce_step(&self) -> Option<Term> {
        let (head, args) = self.spine();
        if let Term::Fix(..) = head {
            let unfolded = head.unfold()?;
            return Some(Term::apps(unfolded, args.into_iter().cloned()));
        }
        self.beta_step()
    }

    fn beta_step(&self) -> Option<Term> {
        match self {
            Term::Var(_) | Term::Const(_) => None,
            Term::App(f, a) => {
                if let Term::Lam(x, _, body) = &**f {
                    return Some(body.subst1(x, a));
                }
                if let Some(f2) = f.beta_step() {
                    return Some(Term::App(Arc::new(f2), a.clone()));
                }
                a.beta_step().map(|a2| Term::App(f.clone(), Arc::new(a2)))
            }
            Term::Lam(x, ty, b) => b.beta_step().map(|b2| Term::Lam(x.clone(), ty.clone(), Arc::new(b2))),
            Term::Fix(x, ty, b) => b.beta_step().map(|b2| Term::Fix(x.clone(), ty.clone(), Arc::new(b2))),
        }
    }

    /// Reduces the head until it is a variable, a constant or an unapplied λ.
    /// Returns the result together with the number of fix-unfoldings, or
    /// `None` if `limit` head steps did not suffice.
    pub fn whnf(&self, limit: usize) -> Option<(Term, usize)> {
        let mut cur = self.clone();
        let mut unfolds = 0;
        for _ in 0..=limit {
            let (head, args) = cur.spine();
            match head {
                Term::Fix(..) => {
                    let u = head.unfold()?;
                    cur = Term::apps(u, args.into_iter().cloned());
                    unfolds += 1;
                }
                Term::Lam(x, _, body) if !args.is_empty() => {
                    let reduced = body.subst1(x, args[0]);
                    cur = Term::apps(reduced, args[1..].iter().map(|a| (*a).clone()));
                }
                _ => return Some((cur, unfolds)),
            }
        }
        None
    }

    /// Repeated `reduce_step`, at most `limit` steps.
    pub fn normalize(&self, limit: usize) -> (Term, bool) {
        let mut cur = self.clone();
        for _ in 0..limit {
            match cur.reduce_step() {
                Some(n) => cur = n,
                None => return (cur, true),
            }
        }
        (cur, false)
    }

    pub fn infer_type(&self, sig: &Signature, ctx: &Context) -> Result<Type, TermError> {
        match self {
            Term::Var(x) => ctx
                .lookup(x)
                .cloned()
                .ok_or_else(|| TermError::UnboundVariable(x.clone())),
            Term::Const(c) => sig
                .term_type(c)
                .cloned()
                .ok_or_else(|| TermError::UnknownSymbol(c.clone())),
            Term::App(f, a) => {
                let ft = f.infer_type(sig, ctx)?;
                match ft {
                    Type::Arrow(dom, cod) => {
                        let at = a.infer_type(sig, ctx)?;
                        if at != *dom {
                            return Err(TermError::TypeMismatch {
                                term: self.to_string(),
                                expected: (*dom).clone(),
                                found: at,
                            });
                        }
                        Ok((*cod).clone())
                    }
                    _ => Err(TermError::NotAFunction(f.to_string())),
                }
            }
            Term::Lam(x, ty, b) => {
                let bt = b.infer_type(sig, &ctx.extend(x, ty.clone()))?;
                Ok(Type::arrow(ty.clone(), bt))
            }
            Term::Fix(x, ty, b) => {
                let bt = b.infer_type(sig, &ctx.extend(x, ty.clone()))?;
                if bt != *ty {
                    return Err(TermError::TypeMismatch {
                        term: self.to_string(),
                        expected: ty.clone(),
                        found: bt,
                    });
                }
                Ok(ty.clone())
            }
        }
    }

    /// Guarded base term judgement; returns the type on success.
    pub fn guarded_base_type(&self, sig: &Signature, ctx: &Context) -> Option<Type> {
        match self {
            Term::Var(x) => ctx.lookup(x).filter(|t| t.order() <= 1).cloned(),
            Term::Const(c) => sig.term_type(c).cloned(),
            Term::App(f, a) => match f.guarded_base_type(sig, ctx)? {
                Type::Arrow(dom, cod) => {
                    let at = a.guarded_base_type(sig, ctx)?;
                    (at == *dom).then(|| (*cod).clone())
                }
                _ => None,
            },
            Term::Lam(..) => None,
            Term::Fix(x, ty, body) => {
                if ty.order() > 1 {
                    return None;
                }
                let ar = ty.arity().ok()?;
                let mut inner = ctx.extend(x, ty.clone());
                let mut cur: &Term = body;
                for _ in 0..ar {
                    match cur {
                        Term::Lam(y, yt, b) if *yt == Type::Iota => {
                            inner = inner.extend(y, Type::Iota);
                            cur = b;
                        }
                        _ => return None,
                    }
                }
                let (head, args) = cur.spine();
                let f = match head {
                    Term::Const(f) => f,
                    _ => return None,
                };
                let fty = sig.term_type(f)?;
                if fty.order() > 1 || fty.arity().ok()? != args.len() || args.is_empty() {
                    return None;
                }
                for m in args {
                    if m.guarded_base_type(sig, &inner)? != Type::Iota {
                        return None;
                    }
                }
                Some(ty.clone())
            }
        }
    }

    pub fn is_guarded_base(&self, sig: &Signature, ctx: &Context) -> bool {
        self.guarded_base_type(sig, ctx).is_some()
    }

    /// Guarded terms: closed guarded base terms closed under constants,
    /// variables, application and λ.
    pub fn is_guarded(&self, sig: &Signature) -> bool {
        if !self.has_fix() {
            return true;
        }
        if self.is_closed() && self.is_guarded_base(sig, &Context::new()) {
            return true;
        }
        match self {
            Term::App(f, a) => f.is_guarded(sig) && a.is_guarded(sig),
            Term::Lam(_, _, b) => b.is_guarded(sig),
            Term::Fix(..) => false,
            Term::Var(_) | Term::Const(_) => true,
        }
    }

    /// Signature-free shape check: every `fix` body, after its λ prefix, is
    /// an application headed by a constant.
    pub fn is_structurally_guarded(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::App(f, a) => f.is_structurally_guarded() && a.is_structurally_guarded(),
            Term::Lam(_, _, b) => b.is_structurally_guarded(),
            Term::Fix(_, _, b) => {
                let mut cur: &Term = b;
                while let Term::Lam(_, _, inner) = cur {
                    cur = inner;
                }
                let (head, args) = cur.spine();
                matches!(head, Term::Const(_)) && !args.is_empty() && args.iter().all(|a| a.is_structurally_guarded())
            }
        }
    }

    /// Type of order at most one, with every variable (free or bound) of
    /// base type.
    pub fn is_first_order(&self, sig: &Signature, ctx: &Context) -> bool {
        let ty = match self.infer_type(sig, ctx) {
            Ok(t) => t,
            Err(_) => return false,
        };
        if ty.order() > 1 {
            return false;
        }
        let fv_ok = self
            .free_vars()
            .iter()
            .all(|x| ctx.lookup(x).is_some_and(|t| t.order() == 0));
        fv_ok && self.binders_base()
    }

    fn binders_base(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::App(f, a) => f.binders_base() && a.binders_base(),
            Term::Lam(_, t, b) | Term::Fix(_, t, b) => t.order() == 0 && b.binders_base(),
        }
    }
}

fn subst_under_binder(x: &str, body: &Term, map: &BTreeMap<String, Term>) -> (String, Term) {
    let mut inner: BTreeMap<String, Term> = map
        .iter()
        .filter(|(k, _)| k.as_str() != x && body.occurs_free(k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if inner.is_empty() {
        return (x.to_string(), body.clone());
    }
    let range_fv: BTreeSet<String> = inner.values().flat_map(|v| v.free_vars()).collect();
    if !range_fv.contains(x) {
        return (x.to_string(), body.subst(&inner));
    }
    let mut avoid = range_fv;
    avoid.extend(body.free_vars());
    avoid.extend(inner.keys().cloned());
    let fresh = fresh_name(x, |n| avoid.contains(n));
    inner.insert(x.to_string(), Term::var(&fresh));
    (fresh, body.subst(&inner))
}

/// `base` if free, otherwise `base'`, `base''`, ...
pub fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    let mut cand = base.to_string();
    while taken(&cand) {
        cand.push('\'');
    }
    cand
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) | Term::Const(x) => write!(f, "{}", x),
            Term::Lam(..) => {
                let mut names = Vec::new();
                let mut cur = self;
                while let Term::Lam(x, _, b) = cur {
                    names.push(x.as_str());
                    cur = b;
                }
                write!(f, "\\{}. {}", names.join(" "), cur)
            }
            Term::Fix(x, _, b) => write!(f, "fix {}. {}", x, b),
            Term::App(..) => {
                let (head, args) = self.spine();
                match head {
                    Term::Var(_) | Term::Const(_) => write!(f, "{}(", head)?,
                    _ => write!(f, "({})(", head)?,
                }
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
        }
    }
}
