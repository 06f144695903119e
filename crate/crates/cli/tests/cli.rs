use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn kctape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kctape")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

#[test]
fn converse_commutes_with_star() {
    let o = kctape(&["check-cr", "(R^)*", "(R*)^", "--max-size", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "no countermodel up to size 3\n");
    let o = kctape(&["check-cr", "(R^)*", "(R*)^", "--max-size", "3", "--equiv"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn transitivity_is_refuted_by_the_swap() {
    let o = kctape(&["check-cr", "R;R", "R", "--max-size", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("R={(0,1),(1,0)}"), "{}", stdout(&o));
}

#[test]
fn json_report_carries_verdict_witness_and_seed() {
    let o = kctape(&["check-cr", "R;R", "R", "--max-size", "2", "--format", "json", "--seed", "9"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "fails");
    assert_eq!(v["seed"], 9);
    assert_eq!(v["witness"]["pair"], serde_json::json!([0, 0]));
    assert_eq!(v["countermodel"]["symbols"]["R"]["pairs"], serde_json::json!([[[0], [1]], [[1], [0]]]));
}

#[test]
fn equivalence_checks_both_directions() {
    let o = kctape(&["check-cr", "R", "R*", "--max-size", "2"]);
    assert_eq!(code(&o), 0);
    let o = kctape(&["check-cr", "R", "R*", "--max-size", "2", "--equiv"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("refuted: R* ≤ R"));
}

#[test]
fn eval_identity() {
    let o = kctape(&["eval", &data("id.sx"), &data("a2.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "{(0,0),(1,1)}\n");
}

#[test]
fn typecheck_prints_the_type() {
    let o = kctape(&["typecheck", &data("id.sx")]);
    assert_eq!(stdout(&o), "A → A\n");
}

#[test]
fn encoded_loop_evaluates_to_its_guard() {
    let o = kctape(&["encode", &data("loop.imp"), "--context", "x:A, y:A"]);
    assert_eq!(code(&o), 0);
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("loop.sx");
    std::fs::write(&out, stdout(&o)).unwrap();
    let path = out.display().to_string();
    assert_eq!(stdout(&kctape(&["typecheck", &path])), "A⊗A → A⊗A\n");
    // diverges where x = 0, skips where x = 1
    let o = kctape(&["eval", &path, &data("z2.json")]);
    assert_eq!(stdout(&o), "{((1,0),(1,0)),((1,1),(1,1))}\n");
    let explicit = kctape(&["encode", &data("loop.imp"), "--context", "x:A, y:A", "--signature", &data("z2.json")]);
    assert_eq!(stdout(&explicit), stdout(&kctape(&["encode", &data("loop.imp"), "--context", "x:A, y:A"])));
}

#[test]
fn triples_hold_or_name_a_state() {
    let o = kctape(&["check-triple", &data("flip.hoare"), &data("z2.json")]);
    assert_eq!((code(&o), stdout(&o)), (0, "holds\n".into()));
    let o = kctape(&["check-triple", &data("wrong.hoare"), &data("z2.json")]);
    assert_eq!((code(&o), stdout(&o)), (1, "fails at state (x=1, y=0)\n".into()));
}

#[test]
fn frame_violation_is_witnessed() {
    let o = kctape(&["check-triple", &data("frame.rhl"), &data("z2.json"), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["witness"]["shown"], "state (x=1, w=1, y=1)");
}

#[test]
fn theory_check_reports_the_failing_axiom() {
    let o = kctape(&["check-theory", &data("order.json"), &data("chain3.json")]);
    assert_eq!((code(&o), stdout(&o)), (1, "fails: axiom 1 at (0,2)\n".into()));
    let o = kctape(&["check-theory", &data("order.json"), &data("leq3.json")]);
    assert_eq!((code(&o), stdout(&o)), (0, "holds: 2 axioms\n".into()));
}

#[test]
fn search_finds_the_empty_relation_first() {
    let o = kctape(&["search", &data("order.json"), "--max-size", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("countermodel: A=1; R={}"));
}

#[test]
fn sampled_runs_are_byte_identical() {
    let args = ["search", &data("order.json"), "--max-size", "3", "--budget", "10", "--seed", "5", "--format", "json"];
    assert_eq!(kctape(&args).stdout, kctape(&args).stdout);
    let laws = ["laws", "--suite", "trace", "--samples", "3", "--seed", "11"];
    let (a, b) = (kctape(&laws), kctape(&laws));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("(seed 11)"));
}

#[test]
fn dot_rendering_is_nested_and_balanced() {
    let o = kctape(&["render", &data("order_body.sx")]);
    assert_eq!(code(&o), 0);
    let g = stdout(&o);
    assert!(g.starts_with("digraph term {") && g.trim_end().ends_with('}'));
    assert_eq!(g.matches('{').count(), g.matches('}').count());
    assert!(g.contains("subgraph cluster_0"));
    assert!(g.contains("label=\"R\", shape=box"));
    let t = kctape(&["render", &data("order_body.sx"), "--format", "text"]);
    assert!(stdout(&t).starts_with("; : A → A\n"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&kctape(&["eval", &data("missing.sx"), &data("a2.json")])), 2);
    assert_eq!(code(&kctape(&["check-cr", "R;", "R"])), 2);
    assert_eq!(code(&kctape(&["check-cr", "R", "R", "--max-size", "0"])), 2);
    assert_eq!(code(&kctape(&["laws", "--suite", "nope"])), 2);
    assert_eq!(code(&kctape(&["frobnicate"])), 2);
    assert_eq!(code(&kctape(&["eval", &data("a2.json"), &data("a2.json")])), 2);
    assert_eq!(code(&kctape(&["--help"])), 0);
}
