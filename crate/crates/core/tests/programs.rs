//! Program encodings against direct execution on random models.

mod common;

use kctape::eval::{check_theory, eval, Interpretation};
use kctape::imp::{encode_cmd, encode_pred, parse_program, Cmd, Pred};
use kctape::logics::{check_triple, parse_spec, Spec, Triple, TripleKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn triple_holds_directly(t: &Triple, m: &Interpretation) -> bool {
    let sig = sweep_signature();
    let st = States::new(&t.context, m);
    let pre = satisfying(&t.pre, &t.context, &sig, m);
    let post = satisfying(&t.post, &t.context, &sig, m);
    match t.kind {
        // every terminating run from P ends in Q
        TripleKind::Hoare => pre.iter().all(|&i| exec(&t.cmd, &st, i, &sig, m).is_subset(&post)),
        // every Q-state is reached from some P-state
        TripleKind::Incorrectness => {
            let reached = common::post(&pre, &t.cmd, &t.context, &sig, m);
            post.is_subset(&reached)
        }
        // every P-state has a run into Q
        TripleKind::SufficientIncorrectness => {
            pre.iter().all(|&i| exec(&t.cmd, &st, i, &sig, m).iter().any(|j| post.contains(j)))
        }
        // every Q-state is reachable only from P-states
        TripleKind::Necessary => {
            (0..st.count()).filter(|i| !pre.contains(i)).all(|i| exec(&t.cmd, &st, i, &sig, m).is_disjoint(&post))
        }
    }
}

#[test]
fn commands_match_direct_execution() {
    let sig = sweep_signature();
    let ctx = sweep_context();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..300 {
        let m = random_model(&sig, 3, &mut rng);
        let c = random_cmd(3, &mut rng);
        let tape = eval(&encode_cmd(&ctx, &c, &sig).unwrap(), &m).unwrap();
        assert_eq!(tape, simulate(&c, &ctx, &sig, &m), "instance {k}: {c}");
    }
}

#[test]
fn predicates_are_coreflexives_of_their_states() {
    let sig = sweep_signature();
    let ctx = sweep_context();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..300 {
        let m = random_model(&sig, 3, &mut rng);
        let p = random_pred(3, &mut rng);
        let r = eval(&encode_pred(&ctx, &p, &sig).unwrap(), &m).unwrap();
        let states = satisfying(&p, &ctx, &sig, &m);
        assert_eq!(r.pairs().map(|(i, _)| i).collect::<std::collections::BTreeSet<_>>(), states, "{p}");
        assert_eq!(r.len(), states.len());
    }
}

#[test]
fn random_models_satisfy_the_program_theory() {
    let sig = sweep_signature();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let m = random_model(&sig, 3, &mut rng);
        sig.check_model(&m).unwrap();
        assert!(check_theory(&sig.theory(), &m).unwrap().is_holds());
    }
}

#[test]
fn broken_models_are_rejected_by_both_routes() {
    let sig = sweep_signature();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let m = random_model(&sig, 2, &mut rng);
    let mut broken = m.clone();
    let f = m.get("f").unwrap();
    let mut r = f.clone();
    for (i, j) in f.pairs() {
        r.remove(i, j);
    }
    broken.set("f", r).unwrap();
    assert!(sig.check_model(&broken).is_err());
    assert!(!check_theory(&sig.theory(), &broken).unwrap().is_holds());
}

#[test]
fn all_triple_kinds_match_their_direct_reading() {
    let sig = sweep_signature();
    let ctx = sweep_context();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen = [0usize; 2];
    for _ in 0..400 {
        let m = random_model(&sig, 3, &mut rng);
        let kind =
            [TripleKind::Hoare, TripleKind::Incorrectness, TripleKind::SufficientIncorrectness, TripleKind::Necessary]
                [rand::Rng::gen_range(&mut rng, 0..4)];
        let t = Triple {
            kind,
            context: ctx.clone(),
            pre: random_pred(1, &mut rng),
            cmd: random_cmd(2, &mut rng),
            post: random_pred(1, &mut rng),
        };
        let holds = check_triple(&t, &sig, &m).unwrap().is_holds();
        assert_eq!(holds, triple_holds_directly(&t, &m), "{t}");
        seen[usize::from(holds)] += 1;
    }
    assert!(seen[0] > 20 && seen[1] > 20, "both verdicts exercised: {seen:?}");
}

#[test]
fn printed_programs_parse_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let c = random_cmd(4, &mut rng);
        assert_eq!(parse_program(&c.to_string()).unwrap(), c, "{c}");
    }
}

#[test]
fn spec_files_parse() {
    let text = "context x:A, y:A\n{p(x) && !q(x, y)} while p(x) do x := f(x) end {!p(x)}\n";
    let Spec::Triple(t) = parse_spec(text).unwrap() else { panic!("a triple") };
    assert_eq!(t.kind, TripleKind::Hoare);
    assert_eq!(t.post, Pred::atom("p", vec![kctape::imp::Expr::var("x")]).negate());
    assert!(matches!(t.cmd, Cmd::While(..)));
    assert!(parse_spec("context x:A\n{p(x)} skip").is_err());
}
