//! Shared test oracles: a direct state-set interpreter for programs and
//! random generators for expressions, predicates and commands.

#![allow(dead_code)]

use std::collections::BTreeSet;

use kctape::eval::{random_interpretation, Interpretation};
use kctape::imp::{Cmd, Context, Expr, Pred, ProgramSignature};
use kctape::rel::{Carrier, FinRel};
use kctape::{Monomial, Polynomial, Signature, Sort};
use rand::Rng;

/// States of a context, numbered as in the relational semantics.
pub struct States {
    pub carrier: Carrier,
    pub vars: Vec<String>,
}

impl States {
    pub fn new(ctx: &Context, interp: &Interpretation) -> States {
        let p: Polynomial = ctx.monomial().into();
        States {
            carrier: interp.carrier(&p).expect("sorts interpreted"),
            vars: ctx.vars().iter().map(|(x, _)| x.clone()).collect(),
        }
    }

    pub fn count(&self) -> usize {
        self.carrier.size()
    }

    pub fn values(&self, i: usize) -> Vec<usize> {
        self.carrier.decode(i).1
    }

    pub fn index(&self, vals: &[usize]) -> usize {
        self.carrier.encode(0, vals).expect("in range")
    }
}

fn tuple_index(interp: &Interpretation, arity: &Monomial, vals: &[usize]) -> usize {
    interp.monomial_carrier(arity).expect("sorts").encode(0, vals).expect("in range")
}

/// All values an expression can take in a state (one for function models).
pub fn expr_values(
    e: &Expr,
    st: &States,
    vals: &[usize],
    sig: &ProgramSignature,
    interp: &Interpretation,
) -> Vec<usize> {
    match e {
        Expr::Var(x) => vec![vals[st.vars.iter().position(|v| v == x).expect("bound")]],
        Expr::App(f, args) => {
            let (arity, _) = &sig.functions()[f];
            let rel = interp.get(f).expect("interpreted");
            let mut out = BTreeSet::new();
            for tuple in arg_tuples(args, st, vals, sig, interp) {
                let i = tuple_index(interp, arity, &tuple);
                out.extend((0..rel.cod().size()).filter(|&j| rel.contains(i, j)));
            }
            out.into_iter().collect()
        }
    }
}

fn arg_tuples(
    args: &[Expr],
    st: &States,
    vals: &[usize],
    sig: &ProgramSignature,
    interp: &Interpretation,
) -> Vec<Vec<usize>> {
    let mut acc = vec![Vec::new()];
    for a in args {
        let vs = expr_values(a, st, vals, sig, interp);
        acc = acc
            .into_iter()
            .flat_map(|t| {
                vs.iter().map(move |v| {
                    let mut t = t.clone();
                    t.push(*v);
                    t
                })
            })
            .collect();
    }
    acc
}

pub fn holds(p: &Pred, st: &States, vals: &[usize], sig: &ProgramSignature, interp: &Interpretation) -> bool {
    match p {
        Pred::True => true,
        Pred::False => false,
        Pred::And(a, b) => holds(a, st, vals, sig, interp) && holds(b, st, vals, sig, interp),
        Pred::Or(a, b) => holds(a, st, vals, sig, interp) || holds(b, st, vals, sig, interp),
        Pred::Atom(r, args) | Pred::NAtom(r, args) => {
            let name = match p {
                Pred::Atom(..) => r.clone(),
                _ => kctape::imp::complement_name(r),
            };
            let arity = &sig.predicates()[r];
            let rel = interp.get(&name).expect("interpreted");
            arg_tuples(args, st, vals, sig, interp).iter().any(|t| rel.contains(tuple_index(interp, arity, t), 0))
        }
    }
}

/// Final states reachable from state `i`.
pub fn exec(c: &Cmd, st: &States, i: usize, sig: &ProgramSignature, interp: &Interpretation) -> BTreeSet<usize> {
    let vals = st.values(i);
    match c {
        Cmd::Abort => BTreeSet::new(),
        Cmd::Skip => BTreeSet::from([i]),
        Cmd::Assign(x, e) => {
            let k = st.vars.iter().position(|v| v == x).expect("bound");
            expr_values(e, st, &vals, sig, interp)
                .into_iter()
                .map(|v| {
                    let mut w = vals.clone();
                    w[k] = v;
                    st.index(&w)
                })
                .collect()
        }
        Cmd::Seq(a, b) => exec(a, st, i, sig, interp).into_iter().flat_map(|j| exec(b, st, j, sig, interp)).collect(),
        Cmd::If(p, a, b) => {
            let mut out = BTreeSet::new();
            if holds(p, st, &vals, sig, interp) {
                out.extend(exec(a, st, i, sig, interp));
            }
            if holds(&p.negate(), st, &vals, sig, interp) {
                out.extend(exec(b, st, i, sig, interp));
            }
            out
        }
        Cmd::While(p, body) => {
            let mut seen = BTreeSet::from([i]);
            let mut stack = vec![i];
            let mut out = BTreeSet::new();
            while let Some(j) = stack.pop() {
                let v = st.values(j);
                if holds(&p.negate(), st, &v, sig, interp) {
                    out.insert(j);
                }
                if holds(p, st, &v, sig, interp) {
                    for k in exec(body, st, j, sig, interp) {
                        if seen.insert(k) {
                            stack.push(k);
                        }
                    }
                }
            }
            out
        }
    }
}

/// The input–output relation of a command, computed state by state.
pub fn simulate(c: &Cmd, ctx: &Context, sig: &ProgramSignature, interp: &Interpretation) -> FinRel {
    let st = States::new(ctx, interp);
    let mut r = FinRel::empty(&st.carrier, &st.carrier);
    for i in 0..st.count() {
        for j in exec(c, &st, i, sig, interp) {
            r.insert(i, j);
        }
    }
    r
}

/// States satisfying a predicate.
pub fn satisfying(p: &Pred, ctx: &Context, sig: &ProgramSignature, interp: &Interpretation) -> BTreeSet<usize> {
    let st = States::new(ctx, interp);
    (0..st.count()).filter(|&i| holds(p, &st, &st.values(i), sig, interp)).collect()
}

/// Strongest postcondition of a state set through a command.
pub fn post(
    pre: &BTreeSet<usize>,
    c: &Cmd,
    ctx: &Context,
    sig: &ProgramSignature,
    interp: &Interpretation,
) -> BTreeSet<usize> {
    let st = States::new(ctx, interp);
    pre.iter().flat_map(|&i| exec(c, &st, i, sig, interp)).collect()
}

// ---------------------------------------------------------------------------
// random programs

pub const STATE_PREDS: [&str; 4] = ["S0", "S1", "S2", "S3"];

/// One sort `A`; `f : A → A`, `g : A A → A`, `p : A`, `q : A A`, and the
/// state predicates `S0..S3 : A A` used to pin pre/postconditions to exact
/// state sets.
pub fn sweep_signature() -> ProgramSignature {
    let mut sig = Signature::new();
    sig.add_sort(Sort::new("A"));
    let a = Monomial::of(&["A"]);
    let aa = Monomial::of(&["A", "A"]);
    sig.add_symbol("f", a.clone(), a.clone()).unwrap();
    sig.add_symbol("g", aa.clone(), a.clone()).unwrap();
    sig.add_symbol("p", a.clone(), Monomial::unit()).unwrap();
    sig.add_symbol("q", aa.clone(), Monomial::unit()).unwrap();
    for s in STATE_PREDS {
        sig.add_symbol(s, aa.clone(), Monomial::unit()).unwrap();
    }
    ProgramSignature::from_signature(&sig).unwrap()
}

pub fn sweep_context() -> Context {
    Context::of(&[("x", "A"), ("y", "A")])
}

/// A random model of the program theory with `|A| ≤ max_size`.
pub fn random_model<R: Rng>(sig: &ProgramSignature, max_size: usize, rng: &mut R) -> Interpretation {
    random_interpretation(sig.signature(), max_size, &sig.search_mode(), rng).unwrap()
}

/// Sets state predicate `name` to exactly `states` (and its complement).
pub fn pin(sig: &ProgramSignature, interp: &Interpretation, name: &str, states: &BTreeSet<usize>) -> Interpretation {
    let ctx = sweep_context();
    let st = States::new(&ctx, interp);
    let rel = FinRel::from_pairs(&st.carrier, &Carrier::one(), states.iter().map(|&i| (i, 0))).unwrap();
    let mut out = interp.clone();
    out.set(name, rel).unwrap();
    sig.complete(&out).unwrap()
}

pub fn state_atom(name: &str) -> Pred {
    Pred::atom(name, vec![Expr::var("x"), Expr::var("y")])
}

pub fn random_expr<R: Rng>(depth: usize, rng: &mut R) -> Expr {
    let var = |rng: &mut R| Expr::var(if rng.gen_bool(0.5) { "x" } else { "y" });
    if depth == 0 {
        return var(rng);
    }
    match rng.gen_range(0..3) {
        0 => var(rng),
        1 => Expr::app("f", vec![random_expr(depth - 1, rng)]),
        _ => Expr::app("g", vec![random_expr(depth - 1, rng), random_expr(depth - 1, rng)]),
    }
}

/// Random predicate over `p`, `q` (no state predicates).
pub fn random_pred<R: Rng>(depth: usize, rng: &mut R) -> Pred {
    let atom = |rng: &mut R| {
        let a = if rng.gen_bool(0.5) {
            Pred::atom("p", vec![random_expr(1, rng)])
        } else {
            Pred::atom("q", vec![random_expr(1, rng), random_expr(1, rng)])
        };
        if rng.gen_bool(0.3) {
            a.negate()
        } else {
            a
        }
    };
    if depth == 0 {
        return atom(rng);
    }
    match rng.gen_range(0..6) {
        0 => Pred::True,
        1 => Pred::False,
        2 => Pred::and(random_pred(depth - 1, rng), random_pred(depth - 1, rng)),
        3 => Pred::or(random_pred(depth - 1, rng), random_pred(depth - 1, rng)),
        _ => atom(rng),
    }
}

pub fn random_cmd<R: Rng>(depth: usize, rng: &mut R) -> Cmd {
    let assign = |rng: &mut R| Cmd::assign(if rng.gen_bool(0.5) { "x" } else { "y" }, random_expr(2, rng));
    if depth == 0 {
        return match rng.gen_range(0..6) {
            0 => Cmd::Skip,
            1 => Cmd::Abort,
            _ => assign(rng),
        };
    }
    match rng.gen_range(0..6) {
        0 => Cmd::seq(random_cmd(depth - 1, rng), random_cmd(depth - 1, rng)),
        1 => Cmd::if_(random_pred(1, rng), random_cmd(depth - 1, rng), random_cmd(depth - 1, rng)),
        2 => Cmd::while_(random_pred(1, rng), random_cmd(depth - 1, rng)),
        _ => random_cmd(0, rng),
    }
}
