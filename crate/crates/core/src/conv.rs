//! Convertibility of guarded terms up to β and fix-unfolding.
//!
//! λ-free terms are compared by bisimulation over their fix-unfoldings.
//! Terms with λ-abstractions get a bounded number of fix-unfoldings.

use std::collections::HashSet;

use crate::error::TermError;
use crate::term::{fresh_name, Nameless, Term};
use crate::types::{Context, Signature};

pub const DEFAULT_CONV_FUEL: usize = 32;

/// Head-reduction steps allowed per whnf call before giving up.
const WHNF_LIMIT: usize = 512;
/// Upper bound on explored pairs for the λ-free route.
const PAIR_LIMIT: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Conv {
    Equal,
    NotEqual,
    Unknown,
}

impl Conv {
    pub fn is_equal(self) -> bool {
        self == Conv::Equal
    }
}

/// Type-checks both sides before comparing them.
pub fn conv_typed(sig: &Signature, ctx: &Context, t: &Term, u: &Term, fuel: usize) -> Result<Conv, TermError> {
    let tt = t.infer_type(sig, ctx)?;
    let ut = u.infer_type(sig, ctx)?;
    if tt != ut {
        return Err(TermError::TypeMismatch {
            term: u.to_string(),
            expected: tt,
            found: ut,
        });
    }
    Ok(conv(t, u, fuel))
}

pub fn conv(t: &Term, u: &Term, fuel: usize) -> Conv {
    if t.alpha_eq(u) {
        return Conv::Equal;
    }
    let bounded = t.has_lam() || u.has_lam();
    let mut budget = fuel;
    let mut seen: HashSet<(Nameless, Nameless)> = HashSet::new();
    let mut stack = vec![(t.clone(), u.clone())];
    let mut names = std::collections::BTreeSet::new();
    t.all_names(&mut names);
    u.all_names(&mut names);

    while let Some((a, b)) = stack.pop() {
        if a.alpha_eq(&b) {
            continue;
        }
        if !seen.insert((a.nameless(), b.nameless())) {
            continue;
        }
        if seen.len() > PAIR_LIMIT {
            return Conv::Unknown;
        }
        let (a, ua) = match a.whnf(WHNF_LIMIT) {
            Some(r) => r,
            None => return Conv::Unknown,
        };
        let (b, ub) = match b.whnf(WHNF_LIMIT) {
            Some(r) => r,
            None => return Conv::Unknown,
        };
        if bounded {
            let used = ua + ub;
            if used > budget {
                return Conv::Unknown;
            }
            budget -= used;
        }
        if matches!(a, Term::Lam(..)) || matches!(b, Term::Lam(..)) {
            let v = fresh_name("v", |n| names.contains(n));
            names.insert(v.clone());
            stack.push((Term::app(a, Term::var(&v)), Term::app(b, Term::var(&v))));
            continue;
        }
        let (ha, args_a) = a.spine();
        let (hb, args_b) = b.spine();
        let heads_agree = match (ha, hb) {
            (Term::Var(x), Term::Var(y)) => x == y,
            (Term::Const(x), Term::Const(y)) => x == y,
            _ => false,
        };
        if !heads_agree || args_a.len() != args_b.len() {
            return Conv::NotEqual;
        }
        for (x, y) in args_a.into_iter().zip(args_b).rev() {
            stack.push((x.clone(), y.clone()));
        }
    }
    Conv::Equal
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Depth-bounded observation of the infinite tree a term denotes.
    use crate::term::Term;

    #[derive(Debug, PartialEq, Eq, Clone)]
    pub enum Obs {
        Cut,
        Node(String, Vec<Obs>),
        Stuck,
    }

    pub fn observe(t: &Term, depth: usize) -> Obs {
        if depth == 0 {
            return Obs::Cut;
        }
        let mut cur = t.clone();
        for _ in 0..64 {
            let (head, args) = cur.spine();
            let next = match head {
                Term::Fix(..) => Term::apps(head.unfold().unwrap(), args.into_iter().cloned()),
                Term::Lam(x, _, body) if !args.is_empty() => {
                    Term::apps(body.subst1(x, args[0]), args[1..].iter().map(|a| (*a).clone()))
                }
                Term::Var(n) | Term::Const(n) => {
                    let kids = args.iter().map(|a| observe(a, depth - 1)).collect();
                    return Obs::Node(n.clone(), kids);
                }
                _ => return Obs::Stuck,
            };
            cur = next;
        }
        Obs::Stuck
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::observe;
    use super::*;
    use crate::types::Type;

    fn zeros(c: &str) -> Term {
        Term::fix("x", Type::Iota, Term::func("cons", [Term::cnst(c), Term::var("x")]))
    }

    fn f_from() -> Term {
        Term::fix(
            "f",
            Type::first_order_fn(1),
            Term::lam(
                "x",
                Type::Iota,
                Term::func(
                    "cons",
                    [
                        Term::var("x"),
                        Term::app(Term::var("f"), Term::func("s", [Term::var("x")])),
                    ],
                ),
            ),
        )
    }

    #[test]
    fn unfold_equal() {
        let z = zeros("0");
        let u = Term::func("cons", [Term::cnst("0"), z.clone()]);
        assert_eq!(conv(&z, &u, DEFAULT_CONV_FUEL), Conv::Equal);
        assert_eq!(conv(&u, &z, DEFAULT_CONV_FUEL), Conv::Equal);
    }

    #[test]
    fn differing_heads() {
        assert_eq!(conv(&zeros("0"), &zeros("1"), DEFAULT_CONV_FUEL), Conv::NotEqual);
    }

    #[test]
    fn higher_order_stream_unfolds() {
        let f = f_from();
        let lhs = Term::app(f.clone(), Term::cnst("0"));
        let rhs = Term::func(
            "cons",
            [
                Term::cnst("0"),
                Term::app(f.clone(), Term::func("s", [Term::cnst("0")])),
            ],
        );
        assert_eq!(conv(&lhs, &rhs, DEFAULT_CONV_FUEL), Conv::Equal);
        // agrees with the depth-k observation oracle
        for k in 1..6 {
            assert_eq!(observe(&lhs, k), observe(&rhs, k));
        }
        let other = Term::app(f, Term::func("s", [Term::cnst("0")]));
        assert_eq!(conv(&lhs, &other, DEFAULT_CONV_FUEL), Conv::NotEqual);
    }

    #[test]
    fn distinct_rational_trees_with_same_prefix() {
        // 0,0,0,... versus 0,0,1,0,0,1,...
        let a = zeros("0");
        let b = Term::fix(
            "y",
            Type::Iota,
            Term::func(
                "cons",
                [
                    Term::cnst("0"),
                    Term::func(
                        "cons",
                        [Term::cnst("0"), Term::func("cons", [Term::cnst("1"), Term::var("y")])],
                    ),
                ],
            ),
        );
        assert_eq!(conv(&a, &b, 0), Conv::NotEqual);
        // same stream written with a period of two
        let c = Term::fix(
            "y",
            Type::Iota,
            Term::func(
                "cons",
                [Term::cnst("0"), Term::func("cons", [Term::cnst("0"), Term::var("y")])],
            ),
        );
        assert_eq!(conv(&a, &c, 0), Conv::Equal);
    }

    #[test]
    fn exhausted_fuel_is_unknown() {
        // Two λ-streams that agree forever but are not syntactically related.
        let g = Term::fix(
            "g",
            Type::first_order_fn(1),
            Term::lam(
                "x",
                Type::Iota,
                Term::func(
                    "cons",
                    [
                        Term::var("x"),
                        Term::app(Term::var("g"), Term::func("s", [Term::var("x")])),
                    ],
                ),
            ),
        );
        let h = Term::fix(
            "h",
            Type::first_order_fn(1),
            Term::lam(
                "y",
                Type::Iota,
                Term::func(
                    "cons",
                    [
                        Term::var("y"),
                        Term::func(
                            "cons",
                            [
                                Term::func("s", [Term::var("y")]),
                                Term::app(Term::var("h"), Term::func("s", [Term::func("s", [Term::var("y")])])),
                            ],
                        ),
                    ],
                ),
            ),
        );
        let l = Term::app(g, Term::cnst("0"));
        let r = Term::app(h, Term::cnst("0"));
        assert_eq!(conv(&l, &r, 8), Conv::Unknown);
    }

    #[test]
    fn typed_mismatch() {
        let sig = Signature::new()
            .with_term("0", Type::Iota)
            .with_term("s", Type::first_order_fn(1));
        let r = conv_typed(&sig, &Context::new(), &Term::cnst("0"), &Term::cnst("s"), 4);
        assert!(matches!(r, Err(TermError::TypeMismatch { .. })));
    }
}
