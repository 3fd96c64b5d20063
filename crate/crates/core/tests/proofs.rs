use proptest::prelude::*;

use coexplore::clj::{check, colp_search, colp_to_clj, prove_analytic, Limits, Proof, Rule, SearchError, Side};
use coexplore::parse::{parse_atom, parse_goal, parse_program};
use coexplore::subst::match_atom;
use coexplore::{Formula, Program, DEFAULT_CONV_FUEL};

/// Stream programs: each clause prefixes one or two constants to a
/// recursive call, possibly through a second predicate.
fn stream_program() -> impl Strategy<Value = (Program, String)> {
    let prefix = prop::collection::vec(prop_oneof![Just("0"), Just("1")], 1..3);
    (prefix.clone(), prefix, any::<bool>(), any::<bool>()).prop_map(|(a, b, mutual, fact)| {
        let wrap = |xs: &[&str], inner: &str| {
            xs.iter()
                .rev()
                .fold(inner.to_string(), |t, c| format!("cons({}, {})", c, t))
        };
        let mut src = String::from("type 0 : i.\ntype 1 : i.\ntype nil : i.\n");
        if mutual {
            src += &format!("p({}) :- q(X).\n", wrap(&a, "X"));
            src += &format!("q({}) :- p(X).\n", wrap(&b, "X"));
        } else {
            src += &format!("p({}) :- p(X).\n", wrap(&a, "X"));
        }
        if fact {
            src += "p(nil).\n";
        }
        let p = parse_program(&src).unwrap();
        (p, src)
    })
}

fn strip_forall(f: &Formula) -> &Formula {
    match f {
        Formula::Forall(_, _, b) => strip_forall(b),
        f => f,
    }
}

/// On every path from a CoFix node to an axiom that reads an instance of
/// its hypothesis from Γ_A, some ImplLT node intervenes.
fn guarded_paths(p: &Proof, open: &mut Vec<(Formula, bool)>) -> Result<(), String> {
    if let Rule::Ax { side: Side::A, pos } = p.rule {
        let used = p.conclusion.gamma_a[pos].as_atom().cloned();
        for (h, crossed) in open.iter() {
            if let (Some(u), Some(ha)) = (&used, strip_forall(h).as_atom()) {
                if match_atom(ha, u).is_some() && !crossed {
                    return Err(format!("{} read from Γ_A without ImplLT since CoFix", u));
                }
            }
        }
    }
    let pushed = matches!(p.rule, Rule::CoFix);
    if pushed {
        open.push((p.conclusion.goal.clone(), false));
    }
    for (i, q) in p.premises.iter().enumerate() {
        let saved: Vec<bool> = open.iter().map(|(_, c)| *c).collect();
        if matches!(p.rule, Rule::ImplLT { .. }) && i == 1 {
            open.iter_mut().for_each(|(_, c)| *c = true);
        }
        guarded_paths(q, open)?;
        open.iter_mut().zip(saved).for_each(|((_, c), s)| *c = s);
    }
    if pushed {
        open.pop();
    }
    Ok(())
}

fn assert_sound(p: &Proof, prog: &Program) -> Result<(), TestCaseError> {
    prop_assert!(!p.contains_cut(), "cut in\n{}", p.render());
    if let Err(e) = check(p, &prog.signature, DEFAULT_CONV_FUEL) {
        prop_assert!(false, "{}\n{}", e, p.render());
    }
    if let Err(e) = guarded_paths(p, &mut Vec::new()) {
        prop_assert!(false, "{}\n{}", e, p.render());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn colp_translations_are_cut_free_and_checked((prog, src) in stream_program()) {
        let (a, _) = parse_atom("p(t)", &prog.signature).unwrap();
        match colp_search(&prog, &a, 16) {
            Ok(r) => {
                let proof = colp_to_clj(&prog, &r).map_err(|e| TestCaseError::fail(format!("{}: {}", src, e)))?;
                assert_sound(&proof, &prog)?;
            }
            Err(e) => prop_assert!(false, "{}: {}", src, e),
        }
    }

    #[test]
    fn analytic_proofs_are_cut_free_and_checked((prog, _src) in stream_program(), goal in 0usize..3) {
        let g = ["exists t. p(t)", "p(fix x. cons(0, x))", "p(cons(1, fix x. cons(0, cons(1, x))))"][goal];
        let g = parse_goal(g, &prog.signature).unwrap();
        match prove_analytic(&prog, &g, Limits { depth: 8, conv_fuel: DEFAULT_CONV_FUEL }) {
            Ok(proof) => {
                prop_assert!(proof.conclusion.goal.alpha_eq(&g));
                assert_sound(&proof, &prog)?;
            }
            Err(SearchError::NotFound(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

#[test]
fn bad_sequent_is_never_proved() {
    let p = parse_program("type a : i.\np(X) :- p(f(X)).").unwrap();
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
        assert!(matches!(r, Err(SearchError::NotFound(_))), "depth {}", depth);
    }
}
