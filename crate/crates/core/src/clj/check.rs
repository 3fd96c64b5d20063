//! Independent proof checking.

use std::fmt;

use thiserror::Error;

use super::{premises_of, Proof, RuleError, Sequent};
use crate::types::{Context, Signature, Type};

/// A rejected node: its path from the root (premise indices) and the reason.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {}: {} ({rule})", PathDisplay(.path), .kind)]
pub struct CheckError {
    pub path: Vec<usize>,
    pub rule: String,
    pub kind: RuleError,
}

struct PathDisplay<'a>(&'a [usize]);

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "root")
        } else {
            let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
            write!(f, "root.{}", parts.join("."))
        }
    }
}

/// Checks a derivation against the calculus. The root sequent may mention
/// free variables; they are taken to be of base type.
pub fn check(proof: &Proof, sig: &Signature, fuel: usize) -> Result<(), CheckError> {
    let ctx: Context = proof
        .conclusion
        .free_vars()
        .into_iter()
        .filter(|v| !sig.contains(v))
        .map(|v| (v, Type::Iota))
        .collect();
    let mut path = Vec::new();
    well_formed(&proof.conclusion, sig, &ctx).map_err(|kind| CheckError {
        path: Vec::new(),
        rule: proof.rule.name().to_string(),
        kind,
    })?;
    check_node(proof, sig, &ctx, fuel, &mut path)
}

fn well_formed(s: &Sequent, sig: &Signature, ctx: &Context) -> Result<(), RuleError> {
    let all = s
        .gamma_t
        .iter()
        .chain(&s.gamma_a)
        .chain(&s.gamma_c)
        .chain(std::iter::once(&s.goal));
    for f in all {
        f.check(sig, ctx)
            .map_err(|e| RuleError::IllFormed(format!("{}: {}", f, e)))?;
    }
    for f in &s.gamma_t {
        if !f.is_d(sig) {
            return Err(RuleError::IllFormed(format!("{} in Γ_T is not a D-formula", f)));
        }
    }
    for f in &s.gamma_a {
        if !f.is_g(sig) && !f.is_d(sig) {
            return Err(RuleError::IllFormed(format!(
                "{} in Γ_A is neither a G- nor a D-formula",
                f
            )));
        }
    }
    for f in &s.gamma_c {
        if !f.is_coinduction_hypothesis(sig) {
            return Err(RuleError::IllFormed(format!(
                "{} in Γ_C is not a coinduction hypothesis",
                f
            )));
        }
    }
    if !s.goal.is_g(sig) {
        return Err(RuleError::IllFormed(format!("goal {} is not a G-formula", s.goal)));
    }
    Ok(())
}

fn check_node(
    proof: &Proof,
    sig: &Signature,
    ctx: &Context,
    fuel: usize,
    path: &mut Vec<usize>,
) -> Result<(), CheckError> {
    let fail = |path: &Vec<usize>, kind| CheckError {
        path: path.clone(),
        rule: proof.rule.name().to_string(),
        kind,
    };
    let expected = premises_of(&proof.rule, &proof.conclusion, sig, ctx, fuel).map_err(|k| fail(path, k))?;
    if expected.len() != proof.premises.len() {
        return Err(fail(
            path,
            RuleError::WrongPremiseCount {
                expected: expected.len(),
                found: proof.premises.len(),
            },
        ));
    }
    for (i, (want, got)) in expected.iter().zip(&proof.premises).enumerate() {
        if let Some(d) = want.sequent.difference(&got.conclusion) {
            return Err(fail(path, RuleError::ContextMismatch(format!("premise {}: {}", i, d))));
        }
    }
    for (i, (want, got)) in expected.iter().zip(&proof.premises).enumerate() {
        path.push(i);
        check_node(got, sig, &want.ctx, fuel, path)?;
        path.pop();
    }
    Ok(())
}
