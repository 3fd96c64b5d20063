//! Surface syntax for programs, goals and terms.
//!
//! Programs are Prolog-like:
//!
//! ```text
//! % comment
//! type cons : i -> i -> i.
//! pred stream : i -> o.
//! stream(cons(0, X)) :- stream(X).
//! ```
//!
//! Identifiers starting with an uppercase letter or `_` are clause
//! variables; every other identifier (including numerals such as `0`) is a
//! symbol. Undeclared symbols are first-order over `i`, with arity taken
//! from their first use. `a + b` abbreviates `plus(a, b)`.
//!
//! Goals use the formula grammar
//!
//! ```text
//! F ::= forall x y. F | exists x. F | F -> F | F | F | F & F | (F) | atom
//! t ::= fix x. t | \x y. t | t t | f(t, ..., t) | t + t | (t)
//! ```
//!
//! with `/\`, `\/`, `∧`, `∨`, `→`, `∀`, `∃` and `λ` accepted as
//! alternatives. A binder may carry a type, as in `forall (f : i -> i). F`;
//! otherwise its type is inferred, defaulting to `i`.

use crate::error::{ParseError, ParseErrorKind};
use crate::formula::{Atom, Formula, HornClause, Program};
use crate::term::Term;
use crate::types::{Context, Signature, Type};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Neck,
    And,
    Or,
    Arrow,
    Lambda,
    Plus,
    Forall,
    Exists,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let adv = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            adv(1, &mut i, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, n) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            '+' => (Tok::Plus, 1),
            '&' | '∧' => (Tok::And, 1),
            '|' | '∨' => (Tok::Or, 1),
            '→' => (Tok::Arrow, 1),
            'λ' => (Tok::Lambda, 1),
            '∀' => (Tok::Forall, 1),
            '∃' => (Tok::Exists, 1),
            ':' if next == Some('-') => (Tok::Neck, 2),
            ':' => (Tok::Colon, 1),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '/' if next == Some('\\') => (Tok::And, 2),
            '\\' if next == Some('/') => (Tok::Or, 2),
            '\\' => (Tok::Lambda, 1),
            _ if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    _ => Tok::Ident(word),
                };
                (tok, j - i)
            }
            _ => {
                return Err(ParseError::new(
                    ParseErrorKind::Syntax,
                    format!("unexpected character `{}`", c),
                    line,
                    col,
                ))
            }
        };
        adv(n, &mut i, &mut col);
        out.push(Spanned { tok, line: l0, col: c0 });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

fn is_variable_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_uppercase() || c == '_')
}

/// Untyped surface term.
#[derive(Clone, Debug)]
enum UTerm {
    Name(String, usize, usize),
    App(Box<UTerm>, Box<UTerm>),
    Lam(String, Option<Type>, Box<UTerm>),
    Fix(String, Option<Type>, Box<UTerm>),
}

impl UTerm {
    fn pos(&self) -> (usize, usize) {
        match self {
            UTerm::Name(_, l, c) => (*l, *c),
            UTerm::App(f, _) => f.pos(),
            UTerm::Lam(_, _, b) | UTerm::Fix(_, _, b) => b.pos(),
        }
    }
}

#[derive(Clone, Debug)]
enum UFormula {
    Atom(String, Vec<UTerm>, usize, usize),
    And(Box<UFormula>, Box<UFormula>),
    Or(Box<UFormula>, Box<UFormula>),
    Impl(Box<UFormula>, Box<UFormula>),
    Forall(String, Option<Type>, Box<UFormula>),
    Exists(String, Option<Type>, Box<UFormula>),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (l, c) = self.here();
        Err(ParseError::new(ParseErrorKind::Syntax, msg, l, c))
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Eof => "end of input".to_string(),
            other => format!("{:?}", other).to_lowercase(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!(
                "expected {}, found {}",
                Self::describe(&t),
                Self::describe(self.peek())
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), ParseError> {
        let (l, c) = self.here();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, l, c))
            }
            other => self.err(format!("expected identifier, found {}", Self::describe(&other))),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let dom = match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                t
            }
            Tok::Ident(s) if s == "i" => {
                self.bump();
                Type::Iota
            }
            Tok::Ident(s) if s == "o" => {
                self.bump();
                Type::Prop
            }
            other => return self.err(format!("expected a type, found {}", Self::describe(&other))),
        };
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    /// `x y (z : t) .`
    fn binders(&mut self) -> Result<Vec<(String, Option<Type>)>, ParseError> {
        let mut out = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(_) => {
                    let (x, _, _) = self.ident()?;
                    if *self.peek() == Tok::Colon {
                        self.bump();
                        let t = self.ty()?;
                        out.push((x, Some(t)));
                    } else {
                        out.push((x, None));
                    }
                }
                Tok::LParen => {
                    self.bump();
                    let mut names = vec![self.ident()?.0];
                    while let Tok::Ident(_) = self.peek() {
                        names.push(self.ident()?.0);
                    }
                    self.expect(Tok::Colon)?;
                    let t = self.ty()?;
                    self.expect(Tok::RParen)?;
                    out.extend(names.into_iter().map(|n| (n, Some(t.clone()))));
                }
                Tok::Dot if !out.is_empty() => {
                    self.bump();
                    return Ok(out);
                }
                other => return self.err(format!("expected binder, found {}", Self::describe(&other))),
            }
        }
    }

    fn term(&mut self) -> Result<UTerm, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "fix" => {
                self.bump();
                let bs = self.binders()?;
                let body = self.term()?;
                Ok(bs
                    .into_iter()
                    .rev()
                    .fold(body, |acc, (x, t)| UTerm::Fix(x, t, Box::new(acc))))
            }
            Tok::Lambda => {
                self.bump();
                let bs = self.binders()?;
                let body = self.term()?;
                Ok(bs
                    .into_iter()
                    .rev()
                    .fold(body, |acc, (x, t)| UTerm::Lam(x, t, Box::new(acc))))
            }
            _ => {
                let mut lhs = self.app()?;
                while *self.peek() == Tok::Plus {
                    let (l, c) = self.here();
                    self.bump();
                    let rhs = self.app()?;
                    lhs = UTerm::App(
                        Box::new(UTerm::App(Box::new(UTerm::Name("plus".into(), l, c)), Box::new(lhs))),
                        Box::new(rhs),
                    );
                }
                Ok(lhs)
            }
        }
    }

    fn starts_arg(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen | Tok::Lambda)
    }

    fn app(&mut self) -> Result<UTerm, ParseError> {
        let mut head = match self.peek().clone() {
            Tok::Ident(s) if s != "fix" => {
                let (s2, l, c) = self.ident()?;
                debug_assert_eq!(s, s2);
                UTerm::Name(s2, l, c)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                if *self.peek() == Tok::Comma {
                    return self.err("unexpected `,` outside an argument list");
                }
                self.expect(Tok::RParen)?;
                t
            }
            other => return self.err(format!("expected a term, found {}", Self::describe(&other))),
        };
        while self.starts_arg() {
            match self.peek() {
                Tok::LParen => {
                    for a in self.arg_list()? {
                        head = UTerm::App(Box::new(head), Box::new(a));
                    }
                }
                Tok::Ident(s) if s == "fix" => {
                    let a = self.term()?;
                    return Ok(UTerm::App(Box::new(head), Box::new(a)));
                }
                Tok::Lambda => {
                    let a = self.term()?;
                    return Ok(UTerm::App(Box::new(head), Box::new(a)));
                }
                _ => {
                    let (s, l, c) = self.ident()?;
                    head = UTerm::App(Box::new(head), Box::new(UTerm::Name(s, l, c)));
                }
            }
        }
        Ok(head)
    }

    fn arg_list(&mut self) -> Result<Vec<UTerm>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn formula(&mut self) -> Result<UFormula, ParseError> {
        if let Some(q) = self.quantifier() {
            return q;
        }
        let lhs = self.disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(UFormula::Impl(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn quantifier(&mut self) -> Option<Result<UFormula, ParseError>> {
        let is_all = match self.peek() {
            Tok::Forall => true,
            Tok::Exists => false,
            _ => return None,
        };
        self.bump();
        Some((|| {
            let bs = self.binders()?;
            let body = self.formula()?;
            Ok(bs.into_iter().rev().fold(body, |acc, (x, t)| {
                if is_all {
                    UFormula::Forall(x, t, Box::new(acc))
                } else {
                    UFormula::Exists(x, t, Box::new(acc))
                }
            }))
        })())
    }

    fn disj(&mut self) -> Result<UFormula, ParseError> {
        let lhs = self.conj()?;
        if *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.disj()?;
            return Ok(UFormula::Or(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<UFormula, ParseError> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::And {
            self.bump();
            let rhs = self.conj()?;
            return Ok(UFormula::And(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<UFormula, ParseError> {
        if let Some(q) = self.quantifier() {
            return q;
        }
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) => {
                let (p, l, c) = self.ident()?;
                let mut args = Vec::new();
                loop {
                    match self.peek() {
                        Tok::LParen => args.extend(self.arg_list()?),
                        Tok::Ident(s) if s != "fix" => {
                            let (s, l2, c2) = self.ident()?;
                            args.push(UTerm::Name(s, l2, c2));
                        }
                        _ => break,
                    }
                }
                Ok(UFormula::Atom(p, args, l, c))
            }
            other => self.err(format!("expected a formula, found {}", Self::describe(&other))),
        }
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Dot {
            self.bump();
        }
        if *self.peek() != Tok::Eof {
            return self.err(format!("unexpected {}", Self::describe(self.peek())));
        }
        Ok(())
    }
}

/// Type with inference variables.
#[derive(Clone, Debug, PartialEq)]
enum MType {
    Iota,
    Prop,
    Arrow(Box<MType>, Box<MType>),
    Meta(usize),
}

impl MType {
    fn from_type(t: &Type) -> MType {
        match t {
            Type::Iota => MType::Iota,
            Type::Prop => MType::Prop,
            Type::Arrow(a, b) => MType::Arrow(Box::new(MType::from_type(a)), Box::new(MType::from_type(b))),
        }
    }
}

/// How names that are neither bound nor declared are treated.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Closed,
    Open,
}

struct Infer<'a> {
    sig: &'a Signature,
    mode: Mode,
    metas: Vec<Option<MType>>,
    free: Vec<(String, MType)>,
    binders: Vec<MType>,
}

impl<'a> Infer<'a> {
    fn new(sig: &'a Signature, mode: Mode, ctx: &Context) -> Infer<'a> {
        Infer {
            sig,
            mode,
            metas: Vec::new(),
            free: ctx.iter().map(|(n, t)| (n.clone(), MType::from_type(t))).collect(),
            binders: Vec::new(),
        }
    }

    fn fresh(&mut self) -> MType {
        self.metas.push(None);
        MType::Meta(self.metas.len() - 1)
    }

    fn resolve(&self, t: &MType) -> MType {
        match t {
            MType::Meta(i) => match &self.metas[*i] {
                Some(u) => self.resolve(u),
                None => t.clone(),
            },
            MType::Arrow(a, b) => MType::Arrow(Box::new(self.resolve(a)), Box::new(self.resolve(b))),
            _ => t.clone(),
        }
    }

    fn occurs(&self, m: usize, t: &MType) -> bool {
        match self.resolve(t) {
            MType::Meta(j) => j == m,
            MType::Arrow(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
            _ => false,
        }
    }

    fn unify(&mut self, a: &MType, b: &MType) -> bool {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (MType::Meta(i), MType::Meta(j)) if i == j => true,
            (MType::Meta(i), t) | (t, MType::Meta(i)) => {
                if self.occurs(*i, t) {
                    return false;
                }
                self.metas[*i] = Some(t.clone());
                true
            }
            (MType::Arrow(a1, b1), MType::Arrow(a2, b2)) => self.unify(a1, a2) && self.unify(b1, b2),
            _ => a == b,
        }
    }

    fn finish(&self, t: &MType) -> Type {
        match self.resolve(t) {
            MType::Iota | MType::Meta(_) => Type::Iota,
            MType::Prop => Type::Prop,
            MType::Arrow(a, b) => Type::arrow(self.finish(&a), self.finish(&b)),
        }
    }

    fn type_err<T>(&self, msg: String, (l, c): (usize, usize)) -> Result<T, ParseError> {
        Err(ParseError::new(ParseErrorKind::Type, msg, l, c))
    }

    fn show(&self, t: &MType) -> String {
        self.finish(t).to_string()
    }

    fn term(&mut self, t: &UTerm, env: &mut Vec<(String, MType)>) -> Result<MType, ParseError> {
        match t {
            UTerm::Name(n, l, c) => {
                if let Some((_, ty)) = env.iter().rev().find(|(x, _)| x == n) {
                    return Ok(ty.clone());
                }
                if let Some(ty) = self.sig.term_type(n) {
                    return Ok(MType::from_type(ty));
                }
                if let Some((_, ty)) = self.free.iter().find(|(x, _)| x == n) {
                    return Ok(ty.clone());
                }
                if self.sig.pred_type(n).is_some() {
                    return Err(ParseError::new(
                        ParseErrorKind::Signature,
                        format!("predicate `{}` used as a term", n),
                        *l,
                        *c,
                    ));
                }
                if self.mode == Mode::Closed {
                    let msg = if is_variable_name(n) {
                        format!("free variable `{}`", n)
                    } else {
                        format!("undeclared symbol `{}`", n)
                    };
                    return Err(ParseError::new(ParseErrorKind::Signature, msg, *l, *c));
                }
                let m = self.fresh();
                self.free.push((n.clone(), m.clone()));
                Ok(m)
            }
            UTerm::App(f, a) => {
                let ft = self.term(f, env)?;
                let at = self.term(a, env)?;
                let r = self.fresh();
                let want = MType::Arrow(Box::new(at.clone()), Box::new(r.clone()));
                if !self.unify(&ft, &want) {
                    let ft = self.resolve(&ft);
                    let msg = match ft {
                        MType::Arrow(d, _) => {
                            format!("argument has type {}, expected {}", self.show(&at), self.show(&d))
                        }
                        _ => format!("term of type {} is applied to an argument", self.show(&ft)),
                    };
                    return self.type_err(msg, a.pos());
                }
                Ok(r)
            }
            UTerm::Lam(x, ann, body) | UTerm::Fix(x, ann, body) => {
                let tx = match ann {
                    Some(t) => MType::from_type(t),
                    None => self.fresh(),
                };
                self.binders.push(tx.clone());
                env.push((x.clone(), tx.clone()));
                let bt = self.term(body, env);
                env.pop();
                let bt = bt?;
                if let UTerm::Lam(..) = t {
                    Ok(MType::Arrow(Box::new(tx), Box::new(bt)))
                } else {
                    if !self.unify(&tx, &bt) {
                        let msg = format!(
                            "fixpoint body has type {}, binder has type {}",
                            self.show(&bt),
                            self.show(&tx)
                        );
                        return self.type_err(msg, body.pos());
                    }
                    Ok(tx)
                }
            }
        }
    }

    fn formula(&mut self, f: &UFormula, env: &mut Vec<(String, MType)>) -> Result<(), ParseError> {
        match f {
            UFormula::Atom(p, args, l, c) => {
                let pty = match self.sig.pred_type(p) {
                    Some(t) => t.clone(),
                    None => {
                        return Err(ParseError::new(
                            ParseErrorKind::Signature,
                            format!("undeclared predicate `{}`", p),
                            *l,
                            *c,
                        ))
                    }
                };
                let (params, _) = pty.uncurry();
                if params.len() != args.len() {
                    return self.type_err(
                        format!(
                            "predicate `{}` expects {} arguments, found {}",
                            p,
                            params.len(),
                            args.len()
                        ),
                        (*l, *c),
                    );
                }
                for (a, want) in args.iter().zip(&params) {
                    let at = self.term(a, env)?;
                    let want = MType::from_type(want);
                    if !self.unify(&at, &want) {
                        return self.type_err(
                            format!(
                                "argument of `{}` has type {}, expected {}",
                                p,
                                self.show(&at),
                                self.show(&want)
                            ),
                            a.pos(),
                        );
                    }
                }
                Ok(())
            }
            UFormula::And(a, b) | UFormula::Or(a, b) | UFormula::Impl(a, b) => {
                self.formula(a, env)?;
                self.formula(b, env)
            }
            UFormula::Forall(x, ann, body) | UFormula::Exists(x, ann, body) => {
                let tx = match ann {
                    Some(t) => MType::from_type(t),
                    None => self.fresh(),
                };
                self.binders.push(tx.clone());
                env.push((x.clone(), tx));
                let r = self.formula(body, env);
                env.pop();
                r
            }
        }
    }
}

/// Rebuilds typed syntax; visits binders in the same order as [`Infer`].
struct Elab<'a, 'b> {
    inf: &'b Infer<'a>,
    next: usize,
}

impl Elab<'_, '_> {
    fn binder_type(&mut self) -> Type {
        let t = self.inf.finish(&self.inf.binders[self.next]);
        self.next += 1;
        t
    }

    fn term(&mut self, t: &UTerm, env: &mut Vec<String>) -> Term {
        match t {
            UTerm::Name(n, _, _) => {
                if env.contains(n) || self.inf.sig.term_type(n).is_none() {
                    Term::var(n)
                } else {
                    Term::cnst(n)
                }
            }
            UTerm::App(f, a) => Term::app(self.term(f, env), self.term(a, env)),
            UTerm::Lam(x, _, b) | UTerm::Fix(x, _, b) => {
                let ty = self.binder_type();
                env.push(x.clone());
                let body = self.term(b, env);
                env.pop();
                if let UTerm::Lam(..) = t {
                    Term::lam(x, ty, body)
                } else {
                    Term::fix(x, ty, body)
                }
            }
        }
    }

    fn formula(&mut self, f: &UFormula, env: &mut Vec<String>) -> Formula {
        match f {
            UFormula::Atom(p, args, _, _) => {
                Formula::atom(p, args.iter().map(|a| self.term(a, env)).collect::<Vec<_>>())
            }
            UFormula::And(a, b) => Formula::and(self.formula(a, env), self.formula(b, env)),
            UFormula::Or(a, b) => Formula::or(self.formula(a, env), self.formula(b, env)),
            UFormula::Impl(a, b) => Formula::implies(self.formula(a, env), self.formula(b, env)),
            UFormula::Forall(x, _, b) | UFormula::Exists(x, _, b) => {
                let ty = self.binder_type();
                env.push(x.clone());
                let body = self.formula(b, env);
                env.pop();
                if let UFormula::Forall(..) = f {
                    Formula::forall(x, ty, body)
                } else {
                    Formula::exists(x, ty, body)
                }
            }
        }
    }
}

fn elaborate_formula(src: &str, sig: &Signature, ctx: &Context, mode: Mode) -> Result<(Formula, Context), ParseError> {
    let mut p = Parser::new(src)?;
    let uf = p.formula()?;
    p.end()?;
    let mut inf = Infer::new(sig, mode, ctx);
    inf.formula(&uf, &mut Vec::new())?;
    let mut el = Elab { inf: &inf, next: 0 };
    let f = el.formula(&uf, &mut Vec::new());
    let free = inf.free.iter().map(|(n, t)| (n.clone(), inf.finish(t))).collect();
    Ok((f, free))
}

/// Parses a closed goal formula; every name must be bound or declared.
pub fn parse_goal(src: &str, sig: &Signature) -> Result<Formula, ParseError> {
    elaborate_formula(src, sig, &Context::new(), Mode::Closed).map(|(f, _)| f)
}

/// Parses a formula whose undeclared names are free variables, returning
/// their inferred types alongside (in order of first occurrence, after
/// the entries of `ctx`).
pub fn parse_formula(src: &str, sig: &Signature, ctx: &Context) -> Result<(Formula, Context), ParseError> {
    elaborate_formula(src, sig, ctx, Mode::Open)
}

/// Parses an atom, allowing free variables.
pub fn parse_atom(src: &str, sig: &Signature) -> Result<(Atom, Context), ParseError> {
    let (f, ctx) = parse_formula(src, sig, &Context::new())?;
    match f {
        Formula::Atom(a) => Ok((a, ctx)),
        _ => Err(ParseError::new(ParseErrorKind::Syntax, "expected an atom", 1, 1)),
    }
}

/// Parses a term in context; undeclared names become free variables.
pub fn parse_term(src: &str, sig: &Signature, ctx: &Context) -> Result<(Term, Type), ParseError> {
    let mut p = Parser::new(src)?;
    let ut = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", Parser::describe(p.peek())));
    }
    let mut inf = Infer::new(sig, Mode::Open, ctx);
    let ty = inf.term(&ut, &mut Vec::new())?;
    let mut el = Elab { inf: &inf, next: 0 };
    let t = el.term(&ut, &mut Vec::new());
    Ok((t, inf.finish(&ty)))
}

/// Parses a type such as `i -> i -> o`.
pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {}", Parser::describe(p.peek())));
    }
    Ok(t)
}

/// First-order clause term before symbol resolution.
#[derive(Clone, Debug)]
enum PTerm {
    Var(String),
    Fun(String, Vec<PTerm>, usize, usize),
}

struct RawClause {
    head: (String, Vec<PTerm>, usize, usize),
    body: Vec<(String, Vec<PTerm>, usize, usize)>,
}

impl Parser {
    fn pterm(&mut self) -> Result<PTerm, ParseError> {
        let mut lhs = self.pprim()?;
        while *self.peek() == Tok::Plus {
            let (l, c) = self.here();
            self.bump();
            let rhs = self.pprim()?;
            lhs = PTerm::Fun("plus".into(), vec![lhs, rhs], l, c);
        }
        Ok(lhs)
    }

    fn pprim(&mut self) -> Result<PTerm, ParseError> {
        if *self.peek() == Tok::LParen {
            self.bump();
            let t = self.pterm()?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        let (name, l, c) = self.ident()?;
        if is_variable_name(&name) {
            if *self.peek() == Tok::LParen {
                return self.err(format!("variable `{}` cannot be applied", name));
            }
            return Ok(PTerm::Var(name));
        }
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            args.push(self.pterm()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.pterm()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok(PTerm::Fun(name, args, l, c))
    }

    fn patom(&mut self) -> Result<(String, Vec<PTerm>, usize, usize), ParseError> {
        let (name, l, c) = self.ident()?;
        if is_variable_name(&name) {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                format!("predicate name `{}` must not start with an uppercase letter", name),
                l,
                c,
            ));
        }
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            args.push(self.pterm()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.pterm()?);
            }
            self.expect(Tok::RParen)?;
        }
        Ok((name, args, l, c))
    }
}

struct ProgramBuilder {
    sig: Signature,
    anon: usize,
}

impl ProgramBuilder {
    fn symbol(&mut self, name: &str, n: usize, pred: bool, l: usize, c: usize) -> Result<(), ParseError> {
        let (mine, other, kind) = if pred {
            (&mut self.sig.preds, &self.sig.terms, "predicate")
        } else {
            (&mut self.sig.terms, &self.sig.preds, "function symbol")
        };
        if other.contains_key(name) {
            return Err(ParseError::new(
                ParseErrorKind::Signature,
                format!("`{}` is used both as a predicate and as a function symbol", name),
                l,
                c,
            ));
        }
        match mine.get(name) {
            None => {
                let ty = if pred {
                    Type::first_order_pred(n)
                } else {
                    Type::first_order_fn(n)
                };
                mine.insert(name.to_string(), ty);
                Ok(())
            }
            Some(ty) => {
                let want = if pred {
                    Type::first_order_pred(n)
                } else {
                    Type::first_order_fn(n)
                };
                if *ty != want {
                    return Err(ParseError::new(
                        ParseErrorKind::Type,
                        format!("{} `{}` has type {} but is used with {} arguments", kind, name, ty, n),
                        l,
                        c,
                    ));
                }
                Ok(())
            }
        }
    }

    fn term(&mut self, t: &PTerm) -> Result<Term, ParseError> {
        match t {
            PTerm::Var(v) if v == "_" => {
                self.anon += 1;
                Ok(Term::var(&format!("_G{}", self.anon)))
            }
            PTerm::Var(v) => Ok(Term::var(v)),
            PTerm::Fun(f, args, l, c) => {
                self.symbol(f, args.len(), false, *l, *c)?;
                let args = args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::func(f, args))
            }
        }
    }

    fn atom(&mut self, a: &(String, Vec<PTerm>, usize, usize)) -> Result<Atom, ParseError> {
        let (p, args, l, c) = a;
        self.symbol(p, args.len(), true, *l, *c)?;
        let args = args.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
        Ok(Atom::new(p, args))
    }
}

/// Parses a program: signature header lines and Horn clauses.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let mut decls: Vec<(bool, String, Type, usize, usize)> = Vec::new();
    let mut raws = Vec::new();
    while *p.peek() != Tok::Eof {
        let is_decl = matches!(p.peek(), Tok::Ident(s) if s == "type" || s == "pred")
            && matches!(p.peek_at(1), Tok::Ident(_))
            && *p.peek_at(2) == Tok::Colon;
        if is_decl {
            let pred = matches!(p.bump(), Tok::Ident(s) if s == "pred");
            let (name, l, c) = p.ident()?;
            p.expect(Tok::Colon)?;
            let ty = p.ty()?;
            p.expect(Tok::Dot)?;
            decls.push((pred, name, ty, l, c));
            continue;
        }
        let head = p.patom()?;
        let mut body = Vec::new();
        if *p.peek() == Tok::Neck {
            p.bump();
            body.push(p.patom()?);
            while *p.peek() == Tok::Comma {
                p.bump();
                body.push(p.patom()?);
            }
        }
        p.expect(Tok::Dot)?;
        raws.push(RawClause { head, body });
    }

    let mut sig = Signature::new();
    for (pred, name, ty, l, c) in decls {
        let bad = |m: String| Err(ParseError::new(ParseErrorKind::Signature, m, l, c));
        if sig.contains(&name) {
            return bad(format!("`{}` is declared twice", name));
        }
        if pred {
            if !ty.is_prop_type() {
                return bad(format!("`{}` : {} is not a proposition type", name, ty));
            }
            sig.preds.insert(name, ty);
        } else {
            if !ty.is_term_type() {
                return bad(format!("`{}` : {} is not a term type", name, ty));
            }
            sig.terms.insert(name, ty);
        }
    }

    let mut b = ProgramBuilder { sig, anon: 0 };
    let mut clauses = Vec::new();
    for r in &raws {
        let head = b.atom(&r.head)?;
        let body = r.body.iter().map(|a| b.atom(a)).collect::<Result<Vec<_>, _>>()?;
        clauses.push(HornClause::new(head, body));
    }
    Ok(Program::new(b.sig, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;

    const STREAM0: &str = "% the stream of zeros\nstream(cons(0,X)) :- stream(X).\n";

    #[test]
    fn stream_program() {
        let p = parse_program(STREAM0).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(
            p.clause(0).to_formula().to_string(),
            "forall X. stream(X) -> stream(cons(0, X))"
        );
        assert_eq!(p.signature.term_type("cons"), Some(&Type::first_order_fn(2)));
        assert_eq!(p.signature.pred_type("stream"), Some(&Type::first_order_pred(1)));
        assert!(p.clause(0).to_formula().is_h(&p.signature));
    }

    #[test]
    fn fib_plus_is_uninterpreted() {
        let p = parse_program("fib(X,Y,cons(X,Z)) :- fib(Y,X+Y,Z).").unwrap();
        assert_eq!(p.signature.term_type("plus"), Some(&Type::first_order_fn(2)));
        assert_eq!(
            p.clause(0).to_string(),
            "fib(X, Y, cons(X, Z)) :- fib(Y, plus(X, Y), Z)."
        );
    }

    #[test]
    fn header_declarations() {
        let p = parse_program("type a : i.\npred p : i -> o.\np(X) :- p(f(X)).").unwrap();
        assert_eq!(p.signature.term_type("a"), Some(&Type::Iota));
        let g = parse_goal("p(a)", &p.signature).unwrap();
        assert_eq!(g, Formula::atom("p", [Term::cnst("a")]));
    }

    #[test]
    fn arity_clash_is_type_error() {
        let e = parse_program("p(f(X)).\np(f(X, X)).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Type);
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn syntax_error_location() {
        let e = parse_program("p(X) :- q(X)\nq(a).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!(e.line, 2);
    }

    #[test]
    fn undeclared_goal_symbol() {
        let p = parse_program(STREAM0).unwrap();
        let e = parse_goal("stream(ones)", &p.signature).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Signature);
        assert_eq!(e.column, 8);
    }

    #[test]
    fn goal_with_fixpoints() {
        let p = parse_program("from(X, cons(X, Y)) :- from(s(X), Y).").unwrap();
        let g = parse_goal("forall x. from(x, (fix f. \\x. cons(x, f (s x))) x)", &p.signature).unwrap();
        assert_eq!(g.to_string(), "forall x. from(x, (fix f. \\x. cons(x, f(s(x))))(x))");
        assert!(g.is_coinduction_hypothesis(&p.signature));
        match &g {
            Formula::Forall(_, _, body) => match &**body {
                Formula::Atom(a) => match a.args[1].spine().0 {
                    Term::Fix(_, ty, _) => assert_eq!(*ty, Type::first_order_fn(1)),
                    other => panic!("{}", other),
                },
                _ => panic!(),
            },
            _ => panic!(),
        }
        let e = parse_goal("exists z. from(0, z) & stream(z)", &p.signature).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Signature);
    }

    #[test]
    fn applied_fixpoint_round_trips() {
        let p = parse_program("type 0 : i.\nfrom(X, cons(X, Y)) :- from(s(X), Y).").unwrap();
        let src = "from(0, (fix f. \\x. cons(x, f(s(x))))(0))";
        let g = parse_goal(src, &p.signature).unwrap();
        assert_eq!(g.to_string(), src);
    }

    #[test]
    fn open_atoms_collect_free_variables() {
        let p = parse_program(STREAM0).unwrap();
        let (a, ctx) = parse_atom("stream(cons(0, x))", &p.signature).unwrap();
        assert_eq!(a.args[0], Term::func("cons", [Term::cnst("0"), Term::var("x")]));
        assert_eq!(ctx.lookup("x"), Some(&Type::Iota));
    }

    #[test]
    fn connective_precedence() {
        let sig = Signature::new().with_pred("q", Type::Prop).with_pred("r", Type::Prop);
        let f = parse_goal("q & r | q -> r -> q", &sig).unwrap();
        assert_eq!(f.to_string(), "q & r | q -> r -> q");
        let g = parse_goal("(q -> r) -> q", &sig).unwrap();
        assert!(matches!(g, Formula::Impl(ref a, _) if matches!(**a, Formula::Impl(..))));
        let h = parse_goal("q /\\ r \\/ q → r", &sig).unwrap();
        assert_eq!(h.to_string(), "q & r | q -> r");
    }

    #[test]
    fn ill_typed_goal() {
        let p = parse_program(STREAM0).unwrap();
        let e = parse_goal("stream(cons(0))", &p.signature).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Type);
        let e = parse_goal("stream(fix x. x)", &p.signature);
        // fix with an unguarded body still type-checks; guardedness is separate
        assert!(e.is_ok());
    }

    #[test]
    fn program_round_trip() {
        let src = "type a : i.\nfib(X, Y, cons(X, Z)) :- fib(Y, plus(X, Y), Z).\nq(a).\n";
        let p = parse_program(src).unwrap();
        let again = parse_program(&p.to_source()).unwrap();
        assert_eq!(p, again);
    }
}
