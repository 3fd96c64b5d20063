//! Simple types, signatures and typing contexts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::TermError;

/// A simple type. Proposition types are arrow chains ending in [`Type::Prop`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    /// The base type of individuals.
    Iota,
    /// The base proposition type.
    Prop,
    Arrow(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Arc::new(dom), Arc::new(cod))
    }

    /// `ι → ... → ι → ι` with `n` arguments.
    pub fn first_order_fn(n: usize) -> Type {
        (0..n).fold(Type::Iota, |acc, _| Type::arrow(Type::Iota, acc))
    }

    /// `ι → ... → ι → o` with `n` arguments.
    pub fn first_order_pred(n: usize) -> Type {
        (0..n).fold(Type::Prop, |acc, _| Type::arrow(Type::Iota, acc))
    }

    /// Builds `a1 → ... → an → cod`.
    pub fn curried(args: &[Type], cod: Type) -> Type {
        args.iter().rev().fold(cod, |acc, a| Type::arrow(a.clone(), acc))
    }

    /// Splits `a1 → ... → an → r` into `([a1..an], r)` where `r` is not an arrow.
    pub fn uncurry(&self) -> (Vec<Type>, Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Type::Arrow(d, c) = cur {
            args.push((**d).clone());
            cur = c;
        }
        (args, cur.clone())
    }

    pub fn order(&self) -> usize {
        match self {
            Type::Iota | Type::Prop => 0,
            Type::Arrow(d, c) => (d.order() + 1).max(c.order()),
        }
    }

    /// Arity, defined for types of order at most one.
    pub fn arity(&self) -> Result<usize, TermError> {
        if self.order() > 1 {
            return Err(TermError::ArityUndefined(self.clone()));
        }
        let mut n = 0;
        let mut cur = self;
        while let Type::Arrow(_, c) = cur {
            n += 1;
            cur = c;
        }
        Ok(n)
    }

    /// A term type never mentions `Prop`.
    pub fn is_term_type(&self) -> bool {
        match self {
            Type::Iota => true,
            Type::Prop => false,
            Type::Arrow(d, c) => d.is_term_type() && c.is_term_type(),
        }
    }

    /// `o` or `σ → ρ` with `σ` a term type and `ρ` a proposition type.
    pub fn is_prop_type(&self) -> bool {
        match self {
            Type::Prop => true,
            Type::Iota => false,
            Type::Arrow(d, c) => d.is_term_type() && c.is_prop_type(),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Iota => write!(f, "i"),
            Type::Prop => write!(f, "o"),
            Type::Arrow(d, c) => {
                if matches!(**d, Type::Arrow(..)) {
                    write!(f, "({}) -> {}", d, c)
                } else {
                    write!(f, "{} -> {}", d, c)
                }
            }
        }
    }
}

/// Term and predicate signatures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub terms: BTreeMap<String, Type>,
    pub preds: BTreeMap<String, Type>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term(mut self, name: &str, ty: Type) -> Self {
        self.terms.insert(name.to_string(), ty);
        self
    }

    pub fn with_pred(mut self, name: &str, ty: Type) -> Self {
        self.preds.insert(name.to_string(), ty);
        self
    }

    pub fn term_type(&self, name: &str) -> Option<&Type> {
        self.terms.get(name)
    }

    pub fn pred_type(&self, name: &str) -> Option<&Type> {
        self.preds.get(name)
    }

    pub fn is_first_order(&self) -> bool {
        self.terms.values().all(|t| t.order() <= 1) && self.preds.values().all(|t| t.order() <= 1)
    }

    /// Nullary constants of base type, in name order.
    pub fn base_constants(&self) -> impl Iterator<Item = &str> {
        self.terms
            .iter()
            .filter(|(_, t)| **t == Type::Iota)
            .map(|(n, _)| n.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.terms.contains_key(name) || self.preds.contains_key(name)
    }
}

/// Ordered typing context. Later entries shadow earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context(Vec<(String, Type)>);

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.0.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    /// Returns a context extended with `name : ty`, replacing an earlier
    /// binding of the same name so the list stays duplicate free.
    pub fn extend(&self, name: &str, ty: Type) -> Context {
        let mut v: Vec<_> = self.0.iter().filter(|(n, _)| n != name).cloned().collect();
        v.push((name.to_string(), ty));
        Context(v)
    }

    pub fn push(&mut self, name: &str, ty: Type) {
        self.0.retain(|(n, _)| n != name);
        self.0.push((name.to_string(), ty));
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, Type)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, Type)> for Context {
    fn from_iter<I: IntoIterator<Item = (String, Type)>>(iter: I) -> Self {
        let mut c = Context::new();
        for (n, t) in iter {
            c.push(&n, t);
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct transcription of the recursive definitions, kept separate from
    // the iterative implementation above.
    fn ord_oracle(t: &Type) -> usize {
        match t {
            Type::Iota | Type::Prop => 0,
            Type::Arrow(a, b) => std::cmp::max(ord_oracle(a) + 1, ord_oracle(b)),
        }
    }

    fn ar_oracle(t: &Type) -> Option<usize> {
        if ord_oracle(t) > 1 {
            return None;
        }
        match t {
            Type::Iota | Type::Prop => Some(0),
            Type::Arrow(_, b) => ar_oracle(b).map(|n| n + 1),
        }
    }

    #[test]
    fn order_and_arity_examples() {
        assert_eq!(Type::Iota.order(), 0);
        assert_eq!(Type::Iota.arity().unwrap(), 0);
        let cons = Type::first_order_fn(2);
        assert_eq!(cons.order(), 1);
        assert_eq!(cons.arity().unwrap(), 2);
        let ho = Type::arrow(Type::first_order_fn(1), Type::Iota);
        assert_eq!(ho.order(), 2);
        assert!(matches!(ho.arity(), Err(TermError::ArityUndefined(_))));
    }

    #[test]
    fn order_matches_recursive_oracle() {
        let mut types = vec![Type::Iota];
        for _ in 0..3 {
            let snapshot = types.clone();
            for a in &snapshot {
                for b in &snapshot {
                    types.push(Type::arrow(a.clone(), b.clone()));
                }
            }
            types.truncate(200);
        }
        for t in &types {
            assert_eq!(t.order(), ord_oracle(t), "{}", t);
            assert_eq!(t.arity().ok(), ar_oracle(t), "{}", t);
        }
    }

    #[test]
    fn prop_types() {
        assert!(Type::first_order_pred(2).is_prop_type());
        assert!(!Type::arrow(Type::Prop, Type::Prop).is_prop_type());
        assert!(!Type::first_order_fn(1).is_prop_type());
    }

    #[test]
    fn context_has_no_duplicates() {
        let c = Context::new()
            .extend("x", Type::Iota)
            .extend("x", Type::first_order_fn(1));
        assert_eq!(c.len(), 1);
        assert_eq!(c.lookup("x"), Some(&Type::first_order_fn(1)));
    }
}
