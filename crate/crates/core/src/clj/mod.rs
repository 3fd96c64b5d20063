//! The coinductive sequent calculus: sequents, proof objects and the
//! premises each rule demands of a conclusion.

pub mod cert;
pub mod check;
pub mod colp;
pub mod search;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::conv::Conv;
use crate::formula::{Formula, FormulaKey};
use crate::term::Term;
use crate::types::{Context, Signature, Type};

pub use check::{check, CheckError};
pub use colp::{colp_search, colp_to_clj, ColpError, ColpResult};
pub use search::{apply_cut, prove_analytic, Limits, SearchError};

/// `Γ_T + Γ_A + Γ_C ⊢ goal`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub gamma_t: Vec<Formula>,
    pub gamma_a: Vec<Formula>,
    pub gamma_c: Vec<Formula>,
    pub goal: Formula,
}

impl Sequent {
    pub fn new(gamma_t: Vec<Formula>, goal: Formula) -> Sequent {
        Sequent {
            gamma_t,
            gamma_a: Vec::new(),
            gamma_c: Vec::new(),
            goal,
        }
    }

    pub fn with_goal(&self, goal: Formula) -> Sequent {
        Sequent { goal, ..self.clone() }
    }

    pub fn side(&self, side: Side) -> &Vec<Formula> {
        match side {
            Side::T => &self.gamma_t,
            Side::A => &self.gamma_a,
            Side::C => &self.gamma_c,
        }
    }

    fn side_mut(&mut self, side: Side) -> &mut Vec<Formula> {
        match side {
            Side::T => &mut self.gamma_t,
            Side::A => &mut self.gamma_a,
            Side::C => &mut self.gamma_c,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut s = self.context_free_vars();
        s.extend(self.goal.free_vars());
        s
    }

    /// Free variables of the three contexts.
    pub fn context_free_vars(&self) -> BTreeSet<String> {
        self.gamma_t
            .iter()
            .chain(&self.gamma_a)
            .chain(&self.gamma_c)
            .flat_map(|f| f.free_vars())
            .collect()
    }

    pub fn key(&self) -> [Vec<FormulaKey>; 4] {
        let k = |v: &Vec<Formula>| v.iter().map(|f| f.key()).collect::<Vec<_>>();
        [
            k(&self.gamma_t),
            k(&self.gamma_a),
            k(&self.gamma_c),
            vec![self.goal.key()],
        ]
    }

    pub fn alpha_eq(&self, other: &Sequent) -> bool {
        fn same(a: &[Formula], b: &[Formula]) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.alpha_eq(y))
        }
        same(&self.gamma_t, &other.gamma_t)
            && same(&self.gamma_a, &other.gamma_a)
            && same(&self.gamma_c, &other.gamma_c)
            && self.goal.alpha_eq(&other.goal)
    }

    /// Describes the first difference from `other`, if any.
    pub fn difference(&self, other: &Sequent) -> Option<String> {
        for side in [Side::T, Side::A, Side::C] {
            let (a, b) = (self.side(side), other.side(side));
            if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| !x.alpha_eq(y)) {
                return Some(format!("Γ_{} is [{}], expected [{}]", side, list(b), list(a)));
            }
        }
        if !self.goal.alpha_eq(&other.goal) {
            return Some(format!("goal is {}, expected {}", other.goal, self.goal));
        }
        None
    }
}

fn list(fs: &[Formula]) -> String {
    fs.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] + [{}] + [{}] ⊢ {}",
            list(&self.gamma_t),
            list(&self.gamma_a),
            list(&self.gamma_c),
            self.goal
        )
    }
}

/// Which of the three contexts a rule addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    T,
    A,
    C,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Side::T => "T",
            Side::A => "A",
            Side::C => "C",
        };
        write!(f, "{}", s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Ax { side: Side, pos: usize },
    ConjR,
    ConjLT { pos: usize, pick: u8 },
    ConjLG { pos: usize, pick: u8 },
    AllR { eigen: String },
    ExR { witness: Term },
    AllLT { pos: usize, witness: Term },
    AllLG { pos: usize, witness: Term },
    ImplR,
    ImplLT { pos: usize },
    ImplLG { pos: usize },
    DisjR1,
    DisjR2,
    CoFix,
    Cut { lemma: Formula },
    WeakT { pos: usize },
    ExchT { pos: usize },
    CtrT { pos: usize },
    WeakA { pos: usize },
    ExchA { pos: usize },
    CtrA { pos: usize },
}

pub const RULE_NAMES: [&str; 21] = [
    "Ax", "ConjR", "ConjLT", "ConjLG", "AllR", "ExR", "AllLT", "AllLG", "ImplR", "ImplLT", "ImplLG", "DisjR1",
    "DisjR2", "CoFix", "Cut", "WeakT", "ExchT", "CtrT", "WeakA", "ExchA", "CtrA",
];

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Ax { .. } => "Ax",
            Rule::ConjR => "ConjR",
            Rule::ConjLT { .. } => "ConjLT",
            Rule::ConjLG { .. } => "ConjLG",
            Rule::AllR { .. } => "AllR",
            Rule::ExR { .. } => "ExR",
            Rule::AllLT { .. } => "AllLT",
            Rule::AllLG { .. } => "AllLG",
            Rule::ImplR => "ImplR",
            Rule::ImplLT { .. } => "ImplLT",
            Rule::ImplLG { .. } => "ImplLG",
            Rule::DisjR1 => "DisjR1",
            Rule::DisjR2 => "DisjR2",
            Rule::CoFix => "CoFix",
            Rule::Cut { .. } => "Cut",
            Rule::WeakT { .. } => "WeakT",
            Rule::ExchT { .. } => "ExchT",
            Rule::CtrT { .. } => "CtrT",
            Rule::WeakA { .. } => "WeakA",
            Rule::ExchA { .. } => "ExchA",
            Rule::CtrA { .. } => "CtrA",
        }
    }

    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Rule::WeakT { .. }
                | Rule::ExchT { .. }
                | Rule::CtrT { .. }
                | Rule::WeakA { .. }
                | Rule::ExchA { .. }
                | Rule::CtrA { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub premises: Vec<Proof>,
}

impl Proof {
    pub fn leaf(rule: Rule, conclusion: Sequent) -> Proof {
        Proof {
            rule,
            conclusion,
            premises: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(|p| p.height()).max().unwrap_or(0)
    }

    pub fn contains_cut(&self) -> bool {
        self.any(&|p| matches!(p.rule, Rule::Cut { .. }))
    }

    pub fn any(&self, f: &dyn Fn(&Proof) -> bool) -> bool {
        f(self) || self.premises.iter().any(|p| p.any(f))
    }

    /// Rule names in pre-order.
    pub fn rule_names(&self) -> Vec<&'static str> {
        let mut out = vec![self.rule.name()];
        for p in &self.premises {
            out.extend(p.rule_names());
        }
        out
    }

    /// Indented text rendering, conclusion first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let extra = match &self.rule {
            Rule::Ax { side, pos } => format!(" {}{}", side, pos),
            Rule::ConjLT { pos, pick } | Rule::ConjLG { pos, pick } => {
                format!(" @{} pick {}", pos, pick)
            }
            Rule::AllR { eigen } => format!(" {}", eigen),
            Rule::ExR { witness } => format!(" {}", witness),
            Rule::AllLT { pos, witness } | Rule::AllLG { pos, witness } => {
                format!(" @{} {}", pos, witness)
            }
            Rule::ImplLT { pos }
            | Rule::ImplLG { pos }
            | Rule::WeakT { pos }
            | Rule::ExchT { pos }
            | Rule::CtrT { pos }
            | Rule::WeakA { pos }
            | Rule::ExchA { pos }
            | Rule::CtrA { pos } => format!(" @{}", pos),
            Rule::Cut { lemma } => format!(" {}", lemma),
            _ => String::new(),
        };
        out.push_str(&format!(
            "{}{}{}: {}\n",
            "  ".repeat(depth),
            self.rule.name(),
            extra,
            self.conclusion
        ));
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }
}

/// Why a rule does not apply to a conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("wrong number of premises: expected {expected}, found {found}")]
    WrongPremiseCount { expected: usize, found: usize },
    #[error("premise does not match the rule: {0}")]
    ContextMismatch(String),
    #[error("axiom reads the coinduction context Γ_C")]
    AxiomUsesGammaC,
    #[error("eigenvariable `{0}` occurs free in the conclusion")]
    EigenvariableCapture(String),
    #[error("CoFix goal is not a coinduction hypothesis: {0}")]
    NonCHCoFix(String),
    #[error("axiom formula is not convertible to the goal: {0}")]
    ConvFailure(String),
    #[error("ill-typed witness `{0}`")]
    IllTypedWitness(String),
    #[error("witness `{0}` is not guarded")]
    UnguardedWitness(String),
    #[error("position {pos} is out of range for Γ_{side}")]
    BadPosition { side: Side, pos: usize },
    #[error("principal formula has the wrong shape: {0}")]
    WrongPrincipal(String),
    #[error("ill-formed sequent: {0}")]
    IllFormed(String),
}

impl RuleError {
    /// Stable variant name, for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            RuleError::WrongPremiseCount { .. } => "WrongPremiseCount",
            RuleError::ContextMismatch(_) => "ContextMismatch",
            RuleError::AxiomUsesGammaC => "AxiomUsesGammaC",
            RuleError::EigenvariableCapture(_) => "EigenvariableCapture",
            RuleError::NonCHCoFix(_) => "NonCHCoFix",
            RuleError::ConvFailure(_) => "ConvFailure",
            RuleError::IllTypedWitness(_) => "IllTypedWitness",
            RuleError::UnguardedWitness(_) => "UnguardedWitness",
            RuleError::BadPosition { .. } => "BadPosition",
            RuleError::WrongPrincipal(_) => "WrongPrincipal",
            RuleError::IllFormed(_) => "IllFormed",
        }
    }
}

/// A premise together with the typing context it lives in.
pub struct Premise {
    pub sequent: Sequent,
    pub ctx: Context,
}

fn at(s: &Sequent, side: Side, pos: usize) -> Result<&Formula, RuleError> {
    s.side(side).get(pos).ok_or(RuleError::BadPosition { side, pos })
}

fn check_witness(sig: &Signature, ctx: &Context, w: &Term, ty: &Type) -> Result<(), RuleError> {
    match w.infer_type(sig, ctx) {
        Ok(t) if t == *ty => {}
        _ => return Err(RuleError::IllTypedWitness(w.to_string())),
    }
    if !w.is_guarded(sig) {
        return Err(RuleError::UnguardedWitness(w.to_string()));
    }
    Ok(())
}

fn replaced(s: &Sequent, side: Side, pos: usize, f: Formula) -> Sequent {
    let mut out = s.clone();
    out.side_mut(side)[pos] = f;
    out
}

/// The premises `rule` requires of conclusion `s` under typing context
/// `ctx`. Axioms are checked here and yield no premises.
pub fn premises_of(
    rule: &Rule,
    s: &Sequent,
    sig: &Signature,
    ctx: &Context,
    fuel: usize,
) -> Result<Vec<Premise>, RuleError> {
    let same = |seq: Sequent| Premise {
        sequent: seq,
        ctx: ctx.clone(),
    };
    let shape = |what: &str, f: &Formula| RuleError::WrongPrincipal(format!("expected {}, found {}", what, f));
    let out = match rule {
        Rule::Ax { side, pos } => {
            if *side == Side::C {
                return Err(RuleError::AxiomUsesGammaC);
            }
            let f = at(s, *side, *pos)?;
            match f.conv(&s.goal, fuel) {
                Conv::Equal => vec![],
                Conv::NotEqual => return Err(RuleError::ConvFailure(format!("{} ≄ {}", f, s.goal))),
                Conv::Unknown => {
                    return Err(RuleError::ConvFailure(format!(
                        "{} ≃ {} undecided within fuel {}",
                        f, s.goal, fuel
                    )))
                }
            }
        }
        Rule::ConjR => match &s.goal {
            Formula::And(a, b) => vec![same(s.with_goal((**a).clone())), same(s.with_goal((**b).clone()))],
            g => return Err(shape("a conjunction goal", g)),
        },
        Rule::ConjLT { pos, pick } | Rule::ConjLG { pos, pick } => {
            let side = if matches!(rule, Rule::ConjLT { .. }) {
                Side::T
            } else {
                Side::A
            };
            match at(s, side, *pos)? {
                Formula::And(a, b) => {
                    let chosen = match pick {
                        1 => a,
                        2 => b,
                        _ => return Err(RuleError::WrongPrincipal(format!("pick {} is not 1 or 2", pick))),
                    };
                    vec![same(replaced(s, side, *pos, (**chosen).clone()))]
                }
                f => return Err(shape("a conjunction", f)),
            }
        }
        Rule::AllR { eigen } => match &s.goal {
            Formula::Forall(x, ty, body) => {
                if s.context_free_vars().contains(eigen)
                    || s.goal.free_vars().contains(eigen)
                    || sig.contains(eigen)
                    || ctx.contains(eigen)
                {
                    return Err(RuleError::EigenvariableCapture(eigen.clone()));
                }
                vec![Premise {
                    sequent: s.with_goal(body.subst1(x, &Term::var(eigen))),
                    ctx: ctx.extend(eigen, ty.clone()),
                }]
            }
            g => return Err(shape("a universal goal", g)),
        },
        Rule::ExR { witness } => match &s.goal {
            Formula::Exists(x, ty, body) => {
                check_witness(sig, ctx, witness, ty)?;
                vec![same(s.with_goal(body.subst1(x, witness)))]
            }
            g => return Err(shape("an existential goal", g)),
        },
        Rule::AllLT { pos, witness } | Rule::AllLG { pos, witness } => {
            let side = if matches!(rule, Rule::AllLT { .. }) {
                Side::T
            } else {
                Side::A
            };
            match at(s, side, *pos)? {
                Formula::Forall(x, ty, body) => {
                    check_witness(sig, ctx, witness, ty)?;
                    vec![same(replaced(s, side, *pos, body.subst1(x, witness)))]
                }
                f => return Err(shape("a universal formula", f)),
            }
        }
        Rule::ImplR => match &s.goal {
            Formula::Impl(a, b) => {
                let mut p = s.with_goal((**b).clone());
                p.gamma_a.push((**a).clone());
                vec![same(p)]
            }
            g => return Err(shape("an implication goal", g)),
        },
        Rule::ImplLT { pos } => match at(s, Side::T, *pos)? {
            Formula::Impl(xi, psi) => {
                let left = replaced(s, Side::T, *pos, (**psi).clone());
                let mut gamma_t = s.gamma_t.clone();
                gamma_t.remove(*pos);
                let mut gamma_a = s.gamma_a.clone();
                gamma_a.extend(s.gamma_c.iter().cloned());
                let right = Sequent {
                    gamma_t,
                    gamma_a,
                    gamma_c: Vec::new(),
                    goal: (**xi).clone(),
                };
                vec![same(left), same(right)]
            }
            f => return Err(shape("an implication", f)),
        },
        Rule::ImplLG { pos } => match at(s, Side::A, *pos)? {
            Formula::Impl(xi, psi) => {
                let left = replaced(s, Side::A, *pos, (**psi).clone());
                let mut right = s.with_goal((**xi).clone());
                right.gamma_a.remove(*pos);
                vec![same(left), same(right)]
            }
            f => return Err(shape("an implication", f)),
        },
        Rule::DisjR1 | Rule::DisjR2 => match &s.goal {
            Formula::Or(a, b) => {
                let g = if matches!(rule, Rule::DisjR1) { a } else { b };
                vec![same(s.with_goal((**g).clone()))]
            }
            g => return Err(shape("a disjunction goal", g)),
        },
        Rule::CoFix => {
            if !s.goal.is_coinduction_hypothesis(sig) {
                return Err(RuleError::NonCHCoFix(s.goal.to_string()));
            }
            let mut p = s.clone();
            p.gamma_c.push(s.goal.clone());
            vec![same(p)]
        }
        Rule::Cut { lemma } => {
            let lctx: Context = ctx
                .iter()
                .cloned()
                .chain(
                    lemma
                        .free_vars()
                        .into_iter()
                        .filter(|v| !ctx.contains(v))
                        .map(|v| (v, Type::Iota)),
                )
                .collect();
            lemma
                .check(sig, &lctx)
                .map_err(|e| RuleError::IllFormed(format!("cut formula {}: {}", lemma, e)))?;
            if !lemma.is_g(sig) && !lemma.is_d(sig) {
                return Err(RuleError::IllFormed(format!(
                    "cut formula {} is neither a D- nor a G-formula",
                    lemma
                )));
            }
            let mut right = s.clone();
            right.gamma_a.push(lemma.clone());
            vec![same(s.with_goal(lemma.clone())), same(right)]
        }
        Rule::WeakT { pos } | Rule::WeakA { pos } => {
            let side = if matches!(rule, Rule::WeakT { .. }) {
                Side::T
            } else {
                Side::A
            };
            at(s, side, *pos)?;
            let mut p = s.clone();
            p.side_mut(side).remove(*pos);
            vec![same(p)]
        }
        Rule::ExchT { pos } | Rule::ExchA { pos } => {
            let side = if matches!(rule, Rule::ExchT { .. }) {
                Side::T
            } else {
                Side::A
            };
            at(s, side, *pos)?;
            at(s, side, *pos + 1)?;
            let mut p = s.clone();
            p.side_mut(side).swap(*pos, *pos + 1);
            vec![same(p)]
        }
        Rule::CtrT { pos } | Rule::CtrA { pos } => {
            let side = if matches!(rule, Rule::CtrT { .. }) {
                Side::T
            } else {
                Side::A
            };
            let f = at(s, side, *pos)?.clone();
            let mut p = s.clone();
            p.side_mut(side).insert(*pos + 1, f);
            vec![same(p)]
        }
    };
    Ok(out)
}
