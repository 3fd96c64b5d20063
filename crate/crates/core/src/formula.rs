//! Atoms, formulae, the D/G/H classes, Horn clauses and programs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::conv::{conv, Conv};
use crate::term::{fresh_name, Nameless, Term};
use crate::types::{Context, Signature, Type};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: impl IntoIterator<Item = Term>) -> Atom {
        Atom {
            pred: pred.to_string(),
            args: args.into_iter().collect(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        self.args.iter().flat_map(|a| a.free_vars()).collect()
    }

    pub fn subst(&self, map: &BTreeMap<String, Term>) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.subst(map)).collect(),
        }
    }

    pub fn alpha_eq(&self, other: &Atom) -> bool {
        self.pred == other.pred
            && self.args.len() == other.args.len()
            && self.args.iter().zip(&other.args).all(|(a, b)| a.alpha_eq(b))
    }

    /// Argumentwise convertibility.
    pub fn conv(&self, other: &Atom, fuel: usize) -> Conv {
        if self.pred != other.pred || self.args.len() != other.args.len() {
            return Conv::NotEqual;
        }
        let mut unknown = false;
        for (a, b) in self.args.iter().zip(&other.args) {
            match conv(a, b, fuel) {
                Conv::Equal => {}
                Conv::NotEqual => return Conv::NotEqual,
                Conv::Unknown => unknown = true,
            }
        }
        if unknown {
            Conv::Unknown
        } else {
            Conv::Equal
        }
    }

    /// Well-formedness against the predicate's proposition type.
    pub fn check(&self, sig: &Signature, ctx: &Context) -> Result<(), String> {
        let pty = sig
            .pred_type(&self.pred)
            .ok_or_else(|| format!("unknown predicate `{}`", self.pred))?;
        let (params, _) = pty.uncurry();
        if params.len() != self.args.len() {
            return Err(format!(
                "predicate `{}` expects {} arguments, found {}",
                self.pred,
                params.len(),
                self.args.len()
            ));
        }
        for (p, a) in params.iter().zip(&self.args) {
            let t = a.infer_type(sig, ctx).map_err(|e| e.to_string())?;
            if t != *p {
                return Err(format!("argument `{}` has type {}, expected {}", a, t, p));
            }
        }
        Ok(())
    }

    pub fn is_first_order(&self, sig: &Signature, ctx: &Context) -> bool {
        sig.pred_type(&self.pred).is_some_and(|t| t.order() <= 1)
            && self.args.iter().all(|a| a.is_first_order(sig, ctx))
    }

    pub fn is_guarded(&self, sig: &Signature) -> bool {
        self.args.iter().all(|a| a.is_guarded(sig))
    }

    pub fn is_simple(&self) -> bool {
        self.args.iter().all(|a| a.is_simple())
    }

    /// Member of the first-order simple atoms, checked syntactically.
    pub fn is_fo_simple(&self) -> bool {
        self.args.iter().all(|a| a.is_fo_simple())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return write!(f, "{}", self.pred);
        }
        write!(f, "{}(", self.pred)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Impl(Box<Formula>, Box<Formula>),
    Forall(String, Type, Box<Formula>),
    Exists(String, Type, Box<Formula>),
}

/// Nameless form of a formula for α-comparison.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormulaKey {
    Atom(String, Vec<Nameless>),
    And(Box<FormulaKey>, Box<FormulaKey>),
    Or(Box<FormulaKey>, Box<FormulaKey>),
    Impl(Box<FormulaKey>, Box<FormulaKey>),
    Forall(Type, Box<FormulaKey>),
    Exists(Type, Box<FormulaKey>),
}

impl Formula {
    pub fn atom(pred: &str, args: impl IntoIterator<Item = Term>) -> Formula {
        Formula::Atom(Atom::new(pred, args))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Impl(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, ty: Type, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), ty, Box::new(body))
    }

    pub fn exists(x: &str, ty: Type, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), ty, Box::new(body))
    }

    /// Universal closure over the listed variables, outermost first.
    pub fn forall_many(vars: &[(String, Type)], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, (x, t)| Formula::forall(x, t.clone(), acc))
    }

    pub fn exists_many(vars: &[(String, Type)], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, (x, t)| Formula::exists(x, t.clone(), acc))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Formula::Atom(a) => a.free_vars(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Impl(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            Formula::Forall(x, _, b) | Formula::Exists(x, _, b) => {
                let mut s = b.free_vars();
                s.remove(x);
                s
            }
        }
    }

    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => a.args.iter().for_each(|t| t.all_names(out)),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Impl(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            Formula::Forall(x, _, b) | Formula::Exists(x, _, b) => {
                out.insert(x.clone());
                b.all_names(out);
            }
        }
    }

    pub fn constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => a.args.iter().for_each(|t| t.constants(out)),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Impl(a, b) => {
                a.constants(out);
                b.constants(out);
            }
            Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => b.constants(out),
        }
    }

    /// Capture-avoiding simultaneous substitution.
    pub fn subst(&self, map: &BTreeMap<String, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::Atom(a) => Formula::Atom(a.subst(map)),
            Formula::And(a, b) => Formula::and(a.subst(map), b.subst(map)),
            Formula::Or(a, b) => Formula::or(a.subst(map), b.subst(map)),
            Formula::Impl(a, b) => Formula::implies(a.subst(map), b.subst(map)),
            Formula::Forall(x, ty, body) | Formula::Exists(x, ty, body) => {
                let fv = body.free_vars();
                let mut inner: BTreeMap<String, Term> = map
                    .iter()
                    .filter(|(k, _)| k.as_str() != x && fv.contains(k.as_str()))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                let mut binder = x.clone();
                let range_fv: BTreeSet<String> = inner.values().flat_map(|v| v.free_vars()).collect();
                if range_fv.contains(x) {
                    let mut avoid = range_fv;
                    avoid.extend(fv);
                    avoid.extend(inner.keys().cloned());
                    binder = fresh_name(x, |n| avoid.contains(n));
                    inner.insert(x.clone(), Term::var(&binder));
                }
                let b2 = Box::new(body.subst(&inner));
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(binder, ty.clone(), b2)
                } else {
                    Formula::Exists(binder, ty.clone(), b2)
                }
            }
        }
    }

    pub fn subst1(&self, x: &str, by: &Term) -> Formula {
        let mut m = BTreeMap::new();
        m.insert(x.to_string(), by.clone());
        self.subst(&m)
    }

    pub fn key(&self) -> FormulaKey {
        self.key_in(&mut Vec::new())
    }

    fn key_in(&self, env: &mut Vec<String>) -> FormulaKey {
        match self {
            Formula::Atom(a) => FormulaKey::Atom(a.pred.clone(), a.args.iter().map(|t| t.nameless_in(env)).collect()),
            Formula::And(a, b) => FormulaKey::And(Box::new(a.key_in(env)), Box::new(b.key_in(env))),
            Formula::Or(a, b) => FormulaKey::Or(Box::new(a.key_in(env)), Box::new(b.key_in(env))),
            Formula::Impl(a, b) => FormulaKey::Impl(Box::new(a.key_in(env)), Box::new(b.key_in(env))),
            Formula::Forall(x, t, b) | Formula::Exists(x, t, b) => {
                env.push(x.clone());
                let inner = Box::new(b.key_in(env));
                env.pop();
                if matches!(self, Formula::Forall(..)) {
                    FormulaKey::Forall(t.clone(), inner)
                } else {
                    FormulaKey::Exists(t.clone(), inner)
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        self == other || self.key() == other.key()
    }

    /// Structural comparison with convertibility at the atoms.
    pub fn conv(&self, other: &Formula, fuel: usize) -> Conv {
        match (self, other) {
            (Formula::Atom(a), Formula::Atom(b)) => a.conv(b, fuel),
            (Formula::And(a1, b1), Formula::And(a2, b2))
            | (Formula::Or(a1, b1), Formula::Or(a2, b2))
            | (Formula::Impl(a1, b1), Formula::Impl(a2, b2)) => match (a1.conv(a2, fuel), b1.conv(b2, fuel)) {
                (Conv::Equal, Conv::Equal) => Conv::Equal,
                (Conv::NotEqual, _) | (_, Conv::NotEqual) => Conv::NotEqual,
                _ => Conv::Unknown,
            },
            (Formula::Forall(x, t1, b1), Formula::Forall(y, t2, b2))
            | (Formula::Exists(x, t1, b1), Formula::Exists(y, t2, b2)) => {
                if t1 != t2 {
                    return Conv::NotEqual;
                }
                let mut names = BTreeSet::new();
                self.all_names(&mut names);
                other.all_names(&mut names);
                let z = fresh_name(x, |n| names.contains(n));
                let v = Term::var(&z);
                b1.subst1(x, &v).conv(&b2.subst1(y, &v), fuel)
            }
            _ => Conv::NotEqual,
        }
    }

    /// Guarded atoms are exactly the atoms whose arguments are guarded.
    fn guarded_atom(&self, sig: &Signature) -> bool {
        matches!(self, Formula::Atom(a) if a.is_guarded(sig))
    }

    /// `D ::= guardedAt | G → D | D ∧ D | ∀x. D`
    pub fn is_d(&self, sig: &Signature) -> bool {
        match self {
            Formula::Atom(_) => self.guarded_atom(sig),
            Formula::Impl(g, d) => g.is_g(sig) && d.is_d(sig),
            Formula::And(a, b) => a.is_d(sig) && b.is_d(sig),
            Formula::Forall(_, _, b) => b.is_d(sig),
            _ => false,
        }
    }

    /// `G ::= guardedAt | G ∧ G | G ∨ G | ∃x. G | D → G | ∀x. G`
    pub fn is_g(&self, sig: &Signature) -> bool {
        match self {
            Formula::Atom(_) => self.guarded_atom(sig),
            Formula::And(a, b) | Formula::Or(a, b) => a.is_g(sig) && b.is_g(sig),
            Formula::Exists(_, _, b) | Formula::Forall(_, _, b) => b.is_g(sig),
            Formula::Impl(d, g) => d.is_d(sig) && g.is_g(sig),
        }
    }

    /// `∀x̄. A1 ∧ ... ∧ An → A0` with every `Ak` first-order simple.
    pub fn is_h(&self, sig: &Signature) -> bool {
        if !self.is_d(sig) {
            return false;
        }
        let mut cur = self;
        while let Formula::Forall(_, _, b) = cur {
            cur = b;
        }
        fn fo_simple(f: &Formula) -> bool {
            matches!(f, Formula::Atom(a) if a.is_fo_simple())
        }
        fn conj_of_atoms(f: &Formula) -> bool {
            match f {
                Formula::And(a, b) => conj_of_atoms(a) && conj_of_atoms(b),
                _ => fo_simple(f),
            }
        }
        match cur {
            Formula::Impl(body, head) => conj_of_atoms(body) && fo_simple(head),
            other => fo_simple(other),
        }
    }

    pub fn is_coinduction_hypothesis(&self, sig: &Signature) -> bool {
        self.is_d(sig) && self.is_g(sig)
    }

    /// Well-formedness derivable from the formula rules.
    pub fn check(&self, sig: &Signature, ctx: &Context) -> Result<(), String> {
        match self {
            Formula::Atom(a) => a.check(sig, ctx),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Impl(a, b) => {
                a.check(sig, ctx)?;
                b.check(sig, ctx)
            }
            Formula::Forall(x, t, b) | Formula::Exists(x, t, b) => b.check(sig, &ctx.extend(x, t.clone())),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Impl(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Atom(_) => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::Atom(a) => write!(f, "{}", a),
            Formula::And(a, b) => {
                a.fmt_prec(f, 4)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 3)
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 2)
            }
            Formula::Impl(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)
            }
            Formula::Forall(..) | Formula::Exists(..) => {
                let is_all = matches!(self, Formula::Forall(..));
                let mut names = Vec::new();
                let mut cur = self;
                loop {
                    match cur {
                        Formula::Forall(x, _, b) if is_all => {
                            names.push(x.as_str());
                            cur = b;
                        }
                        Formula::Exists(x, _, b) if !is_all => {
                            names.push(x.as_str());
                            cur = b;
                        }
                        _ => break,
                    }
                }
                let kw = if is_all { "forall" } else { "exists" };
                write!(f, "{} {}. ", kw, names.join(" "))?;
                cur.fmt_prec(f, 0)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// `∀x̄. B1 ∧ ... ∧ Bn → A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornClause {
    pub vars: Vec<(String, Type)>,
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl HornClause {
    /// Builds a clause quantifying its variables in order of first
    /// occurrence, head first.
    pub fn new(head: Atom, body: Vec<Atom>) -> HornClause {
        let mut vars: Vec<(String, Type)> = Vec::new();
        let mut push = |a: &Atom| {
            for t in &a.args {
                let mut seen = Vec::new();
                collect_in_order(t, &mut seen);
                for v in seen {
                    if !vars.iter().any(|(n, _)| *n == v) {
                        vars.push((v, Type::Iota));
                    }
                }
            }
        };
        push(&head);
        body.iter().for_each(&mut push);
        HornClause { vars, body, head }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty()
    }

    pub fn body_formula(&self) -> Option<Formula> {
        let mut it = self.body.iter().rev();
        let last = Formula::Atom(it.next()?.clone());
        Some(it.fold(last, |acc, a| Formula::and(Formula::Atom(a.clone()), acc)))
    }

    pub fn to_formula(&self) -> Formula {
        let matrix = match self.body_formula() {
            None => Formula::Atom(self.head.clone()),
            Some(b) => Formula::implies(b, Formula::Atom(self.head.clone())),
        };
        Formula::forall_many(&self.vars, matrix)
    }

    /// Renames every clause variable through `rename`.
    pub fn rename(&self, mut rename: impl FnMut(&str) -> String) -> HornClause {
        let mut map = BTreeMap::new();
        let vars = self
            .vars
            .iter()
            .map(|(v, t)| {
                let n = rename(v);
                map.insert(v.clone(), Term::var(&n));
                (n, t.clone())
            })
            .collect();
        HornClause {
            vars,
            body: self.body.iter().map(|a| a.subst(&map)).collect(),
            head: self.head.subst(&map),
        }
    }
}

fn collect_in_order(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(x) => {
            if !out.contains(x) {
                out.push(x.clone())
            }
        }
        Term::Const(_) => {}
        Term::App(f, a) => {
            collect_in_order(f, out);
            collect_in_order(a, out);
        }
        Term::Lam(..) | Term::Fix(..) => {
            for v in t.free_vars() {
                if !out.contains(&v) {
                    out.push(v)
                }
            }
        }
    }
}

/// Variables of an atom in order of first occurrence.
pub fn vars_in_order(a: &Atom) -> Vec<String> {
    let mut out = Vec::new();
    a.args.iter().for_each(|t| collect_in_order(t, &mut out));
    out
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", b)?;
            }
        }
        write!(f, ".")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedClause {
    pub name: String,
    pub clause: HornClause,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Program {
    pub signature: Signature,
    pub clauses: Vec<NamedClause>,
}

/// Declarations first, then one clause per line; reparses to the same program.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in &self.signature.terms {
            writeln!(f, "type {} : {}.", n, t)?;
        }
        for (n, t) in &self.signature.preds {
            writeln!(f, "pred {} : {}.", n, t)?;
        }
        for c in &self.clauses {
            writeln!(f, "{}", c.clause)?;
        }
        Ok(())
    }
}

impl Program {
    pub fn new(signature: Signature, clauses: Vec<HornClause>) -> Program {
        let clauses = clauses
            .into_iter()
            .enumerate()
            .map(|(i, clause)| NamedClause {
                name: format!("c{}", i),
                clause,
            })
            .collect();
        Program { signature, clauses }
    }

    pub fn clause(&self, i: usize) -> &HornClause {
        &self.clauses[i].clause
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// The program as the theory context of a sequent.
    pub fn formulas(&self) -> Vec<Formula> {
        self.clauses.iter().map(|c| c.clause.to_formula()).collect()
    }

    /// Every name used by the program: symbols and clause variables.
    pub fn names(&self) -> BTreeSet<String> {
        let mut s: BTreeSet<String> = self.signature.terms.keys().cloned().collect();
        s.extend(self.signature.preds.keys().cloned());
        for c in &self.clauses {
            s.extend(c.clause.vars.iter().map(|(v, _)| v.clone()));
        }
        s
    }

    /// Renders the program back into the surface syntax.
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for (n, t) in &self.signature.terms {
            out.push_str(&format!("type {} : {}.\n", n, t));
        }
        for (n, t) in &self.signature.preds {
            out.push_str(&format!("pred {} : {}.\n", n, t));
        }
        for c in &self.clauses {
            out.push_str(&format!("{}\n", c.clause));
        }
        out
    }
}
