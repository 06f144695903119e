//! Program logics as inclusions of relations: Hoare, incorrectness,
//! sufficient-incorrectness and necessary triples, relational Hoare
//! quadruples, and semantic checks of Hoare rule instances.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::error::EvalError;
use crate::eval::{check_inclusion, CheckReport, Interpretation};
use crate::imp::{
    encode_cmd, encode_pred, parse_context, parse_pred, parse_program, typecheck_cmd, typecheck_pred, Cmd, Context,
    ImpError, NotAModel, Pred, ProgramSignature,
};
use crate::poly::Polynomial;
use crate::sugar;
use crate::term::Tape;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Imp(#[from] ImpError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    NotAModel(#[from] NotAModel),
    #[error("rule instance does not match the schema: {0}")]
    SchemaMismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripleKind {
    /// `{P} C {Q}`: every run from `P` that terminates ends in `Q`.
    Hoare,
    /// `[P] C [Q]`: every state of `Q` is reachable from `P`.
    Incorrectness,
    /// `<<P>> C <<Q>>`: every state of `P` can reach `Q`.
    SufficientIncorrectness,
    /// `(P) C (Q)`: every state that can reach `Q` satisfies `P`.
    Necessary,
}

impl TripleKind {
    fn delimiters(self) -> (&'static str, &'static str) {
        match self {
            TripleKind::Hoare => ("{", "}"),
            TripleKind::Incorrectness => ("[", "]"),
            TripleKind::SufficientIncorrectness => ("<<", ">>"),
            TripleKind::Necessary => ("(", ")"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub kind: TripleKind,
    pub context: Context,
    pub pre: Pred,
    pub cmd: Cmd,
    pub post: Pred,
}

impl Triple {
    pub fn hoare(context: &Context, pre: Pred, cmd: Cmd, post: Pred) -> Triple {
        Triple { kind: TripleKind::Hoare, context: context.clone(), pre, cmd, post }
    }

    pub fn typecheck(&self, sig: &ProgramSignature) -> Result<(), ImpError> {
        typecheck_pred(&self.context, &self.pre, sig)?;
        typecheck_cmd(&self.context, &self.cmd, sig)?;
        typecheck_pred(&self.context, &self.post, sig)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = self.kind.delimiters();
        write!(f, "{l}{}{r} {} {l}{}{r}", self.pre, self.cmd, self.post)
    }
}

/// A relational Hoare quadruple over two disjoint contexts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quadruple {
    pub left: Context,
    pub right: Context,
    pub pre: Pred,
    pub left_cmd: Cmd,
    pub right_cmd: Cmd,
    pub post: Pred,
}

impl Quadruple {
    /// The joint context `Γ₁, Γ₂`.
    pub fn context(&self) -> Result<Context, ImpError> {
        self.left.concat(&self.right)
    }
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rel {{{}}} {} ~ {} {{{}}}", self.pre, self.left_cmd, self.right_cmd, self.post)
    }
}

/// Contents of a specification file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Spec {
    Triple(Triple),
    Quadruple(Quadruple),
}

// ---------------------------------------------------------------------------
// parsing

fn shift(e: ImpError, by: usize) -> LogicError {
    match e {
        ImpError::Syntax { pos, msg } => LogicError::Syntax { pos: pos + by, msg },
        other => other.into(),
    }
}

/// Span of the delimited group opening at `start` (which must hold `open`),
/// balancing nested parentheses.
fn group_end(text: &str, start: usize, open: &str, close: &str) -> Option<usize> {
    if open == "(" {
        let mut depth = 0usize;
        for (k, c) in text[start..].char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(start + k);
                    }
                }
                _ => {}
            }
        }
        None
    } else {
        text[start + open.len()..].find(close).map(|k| start + open.len() + k)
    }
}

/// Start of the delimited group that closes at the end of `text`.
fn group_start(text: &str, open: &str, close: &str) -> Option<usize> {
    if !text.ends_with(close) {
        return None;
    }
    if open == "(" {
        let mut depth = 0usize;
        for (k, c) in text.char_indices().rev() {
            match c {
                ')' => depth += 1,
                '(' => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(k);
                    }
                }
                _ => {}
            }
        }
        None
    } else {
        text[..text.len() - close.len()].rfind(open)
    }
}

/// Splits `⟨P⟩ C ⟨Q⟩` into its three parts with their offsets.
fn split_triple(text: &str, base: usize, kind: TripleKind) -> Result<[(usize, &str); 3], LogicError> {
    let (open, close) = kind.delimiters();
    let bad = |msg: &str| LogicError::Syntax { pos: base, msg: msg.to_string() };
    let pre_end = group_end(text, 0, open, close).ok_or_else(|| bad("unterminated precondition"))?;
    let post_start = group_start(text, open, close).ok_or_else(|| bad("missing postcondition"))?;
    if post_start <= pre_end {
        return Err(bad("missing postcondition"));
    }
    let pre = (base + open.len(), &text[open.len()..pre_end]);
    let cmd = (base + pre_end + close.len(), &text[pre_end + close.len()..post_start]);
    let post = (base + post_start + open.len(), &text[post_start + open.len()..text.len() - close.len()]);
    Ok([pre, cmd, post])
}

fn context_line(text: &str) -> Result<(&str, &str, usize), LogicError> {
    let trimmed = text.trim_start();
    let lead = text.len() - trimmed.len();
    let Some(rest) = trimmed.strip_prefix("context") else {
        return Err(LogicError::Syntax { pos: lead, msg: "expected `context` declaration".into() });
    };
    let line_end = rest.find('\n').unwrap_or(rest.len());
    let body_start = lead + "context".len() + line_end;
    Ok((&rest[..line_end], &text[body_start..], body_start))
}

/// Parses a file `context x:A, y:B` followed by a triple `{P} C {Q}`,
/// `[P] C [Q]`, `<<P>> C <<Q>>` or `(P) C (Q)`; or `context Γ₁ ~ Γ₂`
/// followed by a quadruple `rel {P} C₁ ~ C₂ {Q}`.
pub fn parse_spec(text: &str) -> Result<Spec, LogicError> {
    let (ctx, body, offset) = context_line(text)?;
    let trimmed = body.trim();
    let base = offset + (body.len() - body.trim_start().len());
    if let Some(rest) = trimmed.strip_prefix("rel") {
        let (l, r) = ctx
            .split_once('~')
            .ok_or_else(|| LogicError::Syntax { pos: 0, msg: "quadruple needs `context Γ1 ~ Γ2`".into() })?;
        let (left, right) = (parse_context(l)?, parse_context(r)?);
        let inner = rest.trim_start();
        let base = base + trimmed.len() - inner.len();
        let [(pp, p), (cp, c), (qp, q)] = split_triple(inner, base, TripleKind::Hoare)?;
        let (c1, c2) =
            c.split_once('~').ok_or_else(|| LogicError::Syntax { pos: cp, msg: "expected `C1 ~ C2`".into() })?;
        let quad = Quadruple {
            left,
            right,
            pre: parse_pred(p).map_err(|e| shift(e, pp))?,
            left_cmd: parse_program(c1).map_err(|e| shift(e, cp))?,
            right_cmd: parse_program(c2).map_err(|e| shift(e, cp + c1.len() + 1))?,
            post: parse_pred(q).map_err(|e| shift(e, qp))?,
        };
        quad.context()?;
        return Ok(Spec::Quadruple(quad));
    }
    let context = parse_context(ctx)?;
    let kind = if trimmed.starts_with("<<") {
        TripleKind::SufficientIncorrectness
    } else if trimmed.starts_with('{') {
        TripleKind::Hoare
    } else if trimmed.starts_with('[') {
        TripleKind::Incorrectness
    } else if trimmed.starts_with('(') {
        TripleKind::Necessary
    } else {
        return Err(LogicError::Syntax { pos: base, msg: "expected a triple or `rel` quadruple".into() });
    };
    let [(pp, p), (cp, c), (qp, q)] = split_triple(trimmed, base, kind)?;
    Ok(Spec::Triple(Triple {
        kind,
        context,
        pre: parse_pred(p).map_err(|e| shift(e, pp))?,
        cmd: parse_program(c).map_err(|e| shift(e, cp))?,
        post: parse_pred(q).map_err(|e| shift(e, qp))?,
    }))
}

// ---------------------------------------------------------------------------
// checking

/// Renames the witness of a report over states of `gamma`.
fn name_states(mut report: CheckReport, gamma: &Context, lhs: &Tape, interp: &Interpretation) -> CheckReport {
    if let Some(w) = report.witness.as_mut() {
        let dom = interp.carrier(lhs.dom()).expect("evaluated already");
        let cod = interp.carrier(lhs.cod()).expect("evaluated already");
        let (i, j) = w.pair;
        // one side of every inclusion here is the unit; the state is the other
        let state = if lhs.dom() == &Polynomial::one() { cod.decode(j).1 } else { dom.decode(i).1 };
        w.shown = format!("state {}", gamma.show_state(&state));
    }
    report
}

/// The two sides of the inclusion a triple stands for.
pub fn triple_inclusion(t: &Triple, sig: &ProgramSignature) -> Result<(Tape, Tape), LogicError> {
    t.typecheck(sig)?;
    let p = encode_pred(&t.context, &t.pre, sig)?;
    let c = encode_cmd(&t.context, &t.cmd, sig)?;
    let q = encode_pred(&t.context, &t.post, sig)?;
    let ok = "encodings are well-typed";
    let forward = || sugar::converse(&p).seq(&c).expect(ok);
    let backward = || c.seq(&q).expect(ok);
    Ok(match t.kind {
        TripleKind::Hoare => (forward(), sugar::converse(&q)),
        TripleKind::Incorrectness => (sugar::converse(&q), forward()),
        TripleKind::SufficientIncorrectness => (p.clone(), backward()),
        TripleKind::Necessary => (backward(), p.clone()),
    })
}

/// Checks a triple in one model of the program theory.
pub fn check_triple(t: &Triple, sig: &ProgramSignature, interp: &Interpretation) -> Result<CheckReport, LogicError> {
    sig.check_model(interp)?;
    let (lhs, rhs) = triple_inclusion(t, sig)?;
    let report = check_inclusion(&lhs, &rhs, interp)?;
    Ok(name_states(report, &t.context, &lhs, interp))
}

/// `⟦P⟧† ; (⟦C₁⟧ ⊗ ⟦C₂⟧) ⊆ ⟦Q⟧†` over the joint context.
pub fn quadruple_inclusion(q: &Quadruple, sig: &ProgramSignature) -> Result<(Tape, Tape), LogicError> {
    let joint = q.context()?;
    typecheck_pred(&joint, &q.pre, sig)?;
    typecheck_pred(&joint, &q.post, sig)?;
    let c1 = encode_cmd(&q.left, &q.left_cmd, sig)?;
    let c2 = encode_cmd(&q.right, &q.right_cmd, sig)?;
    let p = encode_pred(&joint, &q.pre, sig)?;
    let post = encode_pred(&joint, &q.post, sig)?;
    let lhs = sugar::converse(&p).seq(&sugar::tensor(&c1, &c2)).expect("joint context types agree");
    Ok((lhs, sugar::converse(&post)))
}

pub fn check_quadruple(
    q: &Quadruple,
    sig: &ProgramSignature,
    interp: &Interpretation,
) -> Result<CheckReport, LogicError> {
    sig.check_model(interp)?;
    let (lhs, rhs) = quadruple_inclusion(q, sig)?;
    let report = check_inclusion(&lhs, &rhs, interp)?;
    Ok(name_states(report, &q.context()?, &lhs, interp))
}

pub fn check_spec(s: &Spec, sig: &ProgramSignature, interp: &Interpretation) -> Result<CheckReport, LogicError> {
    match s {
        Spec::Triple(t) => check_triple(t, sig, interp),
        Spec::Quadruple(q) => check_quadruple(q, sig, interp),
    }
}

/// `P ⊆ Q` as predicates.
fn pred_leq(
    gamma: &Context,
    p: &Pred,
    q: &Pred,
    sig: &ProgramSignature,
    interp: &Interpretation,
) -> Result<bool, LogicError> {
    let (p, q) = (encode_pred(gamma, p, sig)?, encode_pred(gamma, q, sig)?);
    Ok(check_inclusion(&p, &q, interp)?.is_holds())
}

// ---------------------------------------------------------------------------
// Hoare rule instances

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HoareRule {
    Skip,
    Assn,
    Conseq,
    Seq,
    If,
    While,
}

impl HoareRule {
    pub const ALL: [HoareRule; 6] =
        [HoareRule::Skip, HoareRule::Assn, HoareRule::Conseq, HoareRule::Seq, HoareRule::If, HoareRule::While];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleVerdict {
    /// Premises and conclusion hold.
    Sound,
    /// Some premise (or side condition) fails, so nothing is claimed.
    Vacuous,
    /// Premises hold but the conclusion fails.
    Violated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleCheck {
    pub verdict: RuleVerdict,
    /// Index of the first failing premise; side conditions of the
    /// consequence rule follow the premises.
    pub failing_premise: Option<usize>,
    pub conclusion: CheckReport,
}

fn schema(ok: bool, what: &str) -> Result<(), LogicError> {
    if ok {
        Ok(())
    } else {
        Err(LogicError::SchemaMismatch(what.to_string()))
    }
}

/// Checks the shape of an instance against the rule schema.
pub fn match_rule(rule: HoareRule, premises: &[Triple], conclusion: &Triple) -> Result<(), LogicError> {
    let all = premises.iter().chain([conclusion]);
    for t in all {
        schema(t.kind == TripleKind::Hoare, "all triples must be Hoare triples")?;
        schema(t.context == conclusion.context, "all triples must share one context")?;
    }
    let c = conclusion;
    let arity = |n: usize| schema(premises.len() == n, &format!("rule takes {n} premise(s)"));
    match rule {
        HoareRule::Skip => {
            arity(0)?;
            schema(c.cmd == Cmd::Skip && c.pre == c.post, "expected {P} skip {P}")
        }
        HoareRule::Assn => {
            arity(0)?;
            let Cmd::Assign(x, e) = &c.cmd else {
                return schema(false, "expected an assignment");
            };
            schema(c.pre == c.post.substitute(e, x), "expected {P[e/x]} x := e {P}")
        }
        HoareRule::Conseq => {
            arity(1)?;
            schema(premises[0].cmd == c.cmd, "premise and conclusion must share the command")
        }
        HoareRule::Seq => {
            arity(2)?;
            let (p1, p2) = (&premises[0], &premises[1]);
            schema(c.cmd == Cmd::seq(p1.cmd.clone(), p2.cmd.clone()), "expected C1; C2")?;
            schema(p1.pre == c.pre && p1.post == p2.pre && p2.post == c.post, "expected {P}C1{R}, {R}C2{Q}")
        }
        HoareRule::If => {
            arity(2)?;
            let Cmd::If(b, c1, c2) = &c.cmd else {
                return schema(false, "expected a conditional");
            };
            let (p1, p2) = (&premises[0], &premises[1]);
            schema(p1.cmd == **c1 && p2.cmd == **c2, "premises must be the branches")?;
            schema(
                p1.pre == Pred::and(c.pre.clone(), b.clone()) && p2.pre == Pred::and(c.pre.clone(), b.negate()),
                "expected {P && B} C1 {Q}, {P && ¬B} C2 {Q}",
            )?;
            schema(p1.post == c.post && p2.post == c.post, "premises must share the postcondition")
        }
        HoareRule::While => {
            arity(1)?;
            let Cmd::While(b, body) = &c.cmd else {
                return schema(false, "expected a loop");
            };
            let p = &premises[0];
            schema(p.cmd == **body, "premise must be the loop body")?;
            schema(p.pre == Pred::and(c.pre.clone(), b.clone()) && p.post == c.pre, "expected {P && B} C {P}")?;
            schema(c.post == Pred::and(c.pre.clone(), b.negate()), "expected {P} while B do C end {P && ¬B}")
        }
    }
}

/// In one model: if the premises (and, for consequence, the side
/// conditions `P₁ ⊆ P₂`, `Q₂ ⊆ Q₁`) hold, does the conclusion hold?
pub fn verify_hoare_rule_instance(
    rule: HoareRule,
    premises: &[Triple],
    conclusion: &Triple,
    sig: &ProgramSignature,
    interp: &Interpretation,
) -> Result<RuleCheck, LogicError> {
    match_rule(rule, premises, conclusion)?;
    let mut failing = None;
    for (k, p) in premises.iter().enumerate() {
        if !check_triple(p, sig, interp)?.is_holds() {
            failing = Some(k);
            break;
        }
    }
    if failing.is_none() && rule == HoareRule::Conseq {
        let (p2, c) = (&premises[0], conclusion);
        if !pred_leq(&c.context, &c.pre, &p2.pre, sig, interp)? {
            failing = Some(1);
        } else if !pred_leq(&c.context, &p2.post, &c.post, sig, interp)? {
            failing = Some(2);
        }
    }
    let report = check_triple(conclusion, sig, interp)?;
    let verdict = match (failing, report.is_holds()) {
        (Some(_), _) => RuleVerdict::Vacuous,
        (None, true) => RuleVerdict::Sound,
        (None, false) => RuleVerdict::Violated,
    };
    Ok(RuleCheck { verdict, failing_premise: failing, conclusion: report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imp::Expr;
    use crate::poly::{Monomial, Signature, Sort};
    use crate::rel::{Carrier, FinRel};

    /// `A = Z_n`, `s = +1`, `eqK`.
    fn zn(n: usize) -> (ProgramSignature, Interpretation) {
        let mut sig = Signature::new();
        sig.add_sort(Sort::new("A"));
        let a = Monomial::of(&["A"]);
        sig.add_symbol("s", a.clone(), a.clone()).unwrap();
        for k in 0..3 {
            sig.add_symbol(&format!("eq{k}"), a.clone(), Monomial::unit()).unwrap();
        }
        let psig = ProgramSignature::from_signature(&sig).unwrap();
        let mut i = Interpretation::with_sizes(psig.signature(), &[("A", n)]).unwrap();
        let c = Carrier::of_sort("A", n);
        i.set("s", FinRel::graph(&c, &c, |x| (x + 1) % n)).unwrap();
        for k in 0..3 {
            i.set(&format!("eq{k}"), FinRel::from_pairs(&c, &Carrier::one(), (k < n).then_some((k, 0))).unwrap())
                .unwrap();
        }
        (psig.clone(), psig.complete(&i).unwrap())
    }

    fn triple(text: &str) -> Triple {
        match parse_spec(text).unwrap() {
            Spec::Triple(t) => t,
            Spec::Quadruple(_) => panic!("expected a triple"),
        }
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(triple("context x:A\n{eq0(x)} x := s(x) {eq1(x)}").kind, TripleKind::Hoare);
        assert_eq!(triple("context x:A\n[eq1(x)] x := s(x) [eq2(x)]").kind, TripleKind::Incorrectness);
        assert_eq!(triple("context x:A\n<<true>> skip <<true>>").kind, TripleKind::SufficientIncorrectness);
        let t = triple("context x:A\n(eq0(x) || (eq1(x))) skip (eq0(s(x)))");
        assert_eq!(t.kind, TripleKind::Necessary);
        assert_eq!(t.post, Pred::atom("eq0", vec![Expr::app("s", vec![Expr::var("x")])]));
        let Spec::Quadruple(q) = parse_spec("context x:A ~ y:A\nrel {true} skip ~ y := s(y) {true}").unwrap() else {
            panic!()
        };
        assert_eq!(q.right_cmd, Cmd::assign("y", Expr::app("s", vec![Expr::var("y")])));
        assert!(parse_spec("context x:A ~ x:A\nrel {true} skip ~ skip {true}").is_err());
        let err = parse_spec("context x:A\n{eq0(x)} x := {true}").unwrap_err();
        assert!(matches!(err, LogicError::Syntax { pos, .. } if pos >= 20), "{err:?}");
    }

    #[test]
    fn triples_over_z3() {
        let (psig, i) = zn(3);
        let h = triple("context x:A\n{eq0(x)} x := s(x) {eq1(x)}");
        assert!(check_triple(&h, &psig, &i).unwrap().is_holds());
        let inc = triple("context x:A\n[eq1(x)] x := s(x) [eq2(x)]");
        assert!(check_triple(&inc, &psig, &i).unwrap().is_holds());
        let bad = triple("context x:A\n{true} x := s(x) {eq1(x)}");
        let rep = check_triple(&bad, &psig, &i).unwrap();
        assert_eq!(rep.witness.unwrap().shown, "state (x=0)");
        let lp = triple("context x:A, y:A\n{true} while eq0(x) do y := s(y) end {!eq0(x)}");
        assert!(check_triple(&lp, &psig, &i).unwrap().is_holds());
    }

    #[test]
    fn rejects_non_models() {
        let (psig, mut i) = zn(2);
        let c = Carrier::of_sort("A", 2);
        i.set("s", FinRel::empty(&c, &c)).unwrap();
        let t = triple("context x:A\n{true} skip {true}");
        assert!(matches!(check_triple(&t, &psig, &i), Err(LogicError::NotAModel(_))));
    }

    #[test]
    fn rule_instances() {
        let (psig, i) = zn(3);
        let g = Context::of(&[("x", "A"), ("y", "A")]);
        let p = parse_pred("eq1(x)").unwrap();
        let e = parse_expr_("s(x)");
        let assn = Triple::hoare(&g, p.substitute(&e, "x"), Cmd::Assign("x".into(), e), p.clone());
        let r = verify_hoare_rule_instance(HoareRule::Assn, &[], &assn, &psig, &i).unwrap();
        assert_eq!(r.verdict, RuleVerdict::Sound);
        let skip = Triple::hoare(&g, p.clone(), Cmd::Skip, p.clone());
        assert_eq!(
            verify_hoare_rule_instance(HoareRule::Skip, &[], &skip, &psig, &i).unwrap().verdict,
            RuleVerdict::Sound
        );
        let b = parse_pred("eq0(x)").unwrap();
        let body = parse_program("y := s(y)").unwrap();
        let prem = Triple::hoare(&g, Pred::and(Pred::True, b.clone()), body.clone(), Pred::True);
        let concl = Triple::hoare(&g, Pred::True, Cmd::while_(b.clone(), body), Pred::and(Pred::True, b.negate()));
        let r = verify_hoare_rule_instance(HoareRule::While, &[prem], &concl, &psig, &i).unwrap();
        assert_eq!(r.verdict, RuleVerdict::Sound);
        let wrong = Triple::hoare(&g, Pred::False, Cmd::Skip, Pred::True);
        assert!(matches!(
            verify_hoare_rule_instance(HoareRule::Skip, &[], &wrong, &psig, &i),
            Err(LogicError::SchemaMismatch(_))
        ));
    }

    fn parse_expr_(s: &str) -> Expr {
        crate::imp::parse_expr(s).unwrap()
    }
}
