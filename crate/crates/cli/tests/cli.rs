use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn program(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "programs", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coexplore"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn tree_stream0_matches_golden() {
    let o = run(&["tree", &program("stream0.pl"), "stream(x)", "--transitions", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), golden("tree_stream0.txt"));
}

#[test]
fn tree_from_matches_golden() {
    let o = run(&["tree", &program("from.pl"), "from(0,y)", "--transitions", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), golden("tree_from.txt"));
}

#[test]
fn tree_gamma_t_is_truncated() {
    let o = run(&["tree", &program("ptail.pl"), "p(a)", "--tree-depth", "6"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("truncated at depth 6"), "{}", stdout(&o));
}

#[test]
fn prove_exit_codes() {
    let o = run(&["prove", &program("stream0.pl"), "stream(fix x. cons(0,x))"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["prove", &program("ptail.pl"), "p(a)", "--depth", "8"]);
    assert_eq!(code(&o), 1);
    let o = run(&["prove", "no-such-program.pl", "p(a)"]);
    assert_eq!(code(&o), 2);
    let o = run(&["prove", &program("ptail.pl"), "p(a"]);
    assert_eq!(code(&o), 2);
    let o = run(&["prove", &program("ptail.pl"), "p(a)", "--depth", "0"]);
    assert_eq!(code(&o), 2);
    let o = run(&["explore", &program("ptail.pl"), "p(a)", "--heuristics", "circ,bogus"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn goal_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("goal.txt");
    std::fs::write(&g, "stream(fix x. cons(0, x))\n").unwrap();
    let o = run(&["prove", &program("stream0.pl"), &format!("@{}", g.display())]);
    assert_eq!(code(&o), 0);
}

#[test]
fn explore_reports_lemmas() {
    let o = run(&["explore", &program("ptail.pl"), "p(a)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("lemma: forall x. p(x)"));

    let o = run(&["explore", &program("from.pl"), "exists z. from(0, z)"]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("stream: fix f. \\x. cons(x, f(s(x)))"),
        "{}",
        stdout(&o)
    );

    let o = run(&["explore", &program("fib.pl"), "exists z. fib(0, 1, z)"]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("stream: fix f. \\x y. cons(x, f(y, plus(x, y)))"),
        "{}",
        stdout(&o)
    );

    let o = run(&["explore", &program("ptail.pl"), "p(a)", "--heuristics", "circ"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn certificates_recheck_in_a_separate_process() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &str, &str); 5] = [
        ("explore", "ptail.pl", "p(a)"),
        ("explore", "from.pl", "exists z. from(0, z)"),
        ("explore", "fib.pl", "exists z. fib(0, 1, z)"),
        ("colp", "stream0.pl", "exists t. stream(t)"),
        ("prove", "stream0.pl", "stream(fix x. cons(0, x))"),
    ];
    for (i, (cmd, prog, goal)) in cases.iter().enumerate() {
        let out = dir.path().join(format!("c{}.json", i));
        let out = out.to_str().unwrap();
        let o = run(&[cmd, &program(prog), goal, "--out", out]);
        assert_eq!(code(&o), 0, "{} {}", cmd, prog);
        let o = run(&["check", out]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        assert!(stdout(&o).starts_with("accepted"));
    }
}

#[test]
fn check_reports_node_of_mutation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&["explore", &program("ptail.pl"), "p(a)", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // Cut / CoFix / AllR / AllLT / ImplLT / Ax
    let ax = &mut v["proof"]["premises"][0]["premises"][0]["premises"][0]["premises"][0]["premises"][0];
    assert_eq!(ax["rule"], "Ax");
    ax["side"] = Value::String("C".into());
    ax["pos"] = Value::from(0);
    std::fs::write(&out, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["check", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let s = stdout(&o);
    assert!(s.starts_with("rejected at root.0.0.0.0.0"), "{}", s);
    assert!(s.contains("(Ax) [AxiomUsesGammaC]"), "{}", s);

    let o = run(&["check", out.to_str().unwrap(), "--format", "structured"]);
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["accepted"], false);
    assert_eq!(r["path"], serde_json::json!([0, 0, 0, 0, 0]));
    assert_eq!(r["kind"], "AxiomUsesGammaC");

    std::fs::write(&out, "{\"format\": \"coexplore-certificate/1\", \"proof\"").unwrap();
    assert_eq!(code(&run(&["check", out.to_str().unwrap()])), 2);
}

#[test]
fn structured_output_is_deterministic() {
    let args = [
        "explore",
        &program("from.pl"),
        "exists z. from(0, z)",
        "--format",
        "structured",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["proved"], true);
    assert_eq!(v["lemma"], "forall x. from(x, (fix f. \\x. cons(x, f(s(x))))(x))");
}
