//! Syntactic sugar, expanded eagerly into the core grammar: monomial and
//! polynomial whiskerings, distributors, polynomial symmetries and
//! (co)monoids, the tensor of tapes, traces over polynomials and the derived
//! lattice/Kleene operations.
//!
//! A few degenerate cases are short-circuited (a singleton polynomial is
//! whiskered by its monomial directly, `⊕` with `id₀` is dropped, `⊗` with
//! `id₁` is dropped). They yield terms of the same type whose semantics agree
//! with the unabbreviated inductive definitions.

use crate::error::TypeError;
use crate::poly::{Monomial, Polynomial, Sort};
use crate::term::{Circuit, CircuitKind, Tape, TapeKind};

// ---------------------------------------------------------------------------
// circuits

/// `c ⊗ d`, dropping `id₁` operands.
pub fn ctensor(c: &Circuit, d: &Circuit) -> Circuit {
    match (c.kind(), d.kind()) {
        (CircuitKind::IdUnit, _) => d.clone(),
        (_, CircuitKind::IdUnit) => c.clone(),
        _ => c.tensor(d),
    }
}

fn cseq(c: &Circuit, d: &Circuit) -> Circuit {
    c.seq(d).expect("sugar builds well-typed circuits")
}

fn cseq_all(cs: &[Circuit]) -> Circuit {
    let mut it = cs.iter();
    let first = it.next().expect("nonempty composite").clone();
    it.fold(first, |acc, c| cseq(&acc, c))
}

/// Tensor of a list of circuits; the empty list gives `id₁`.
pub fn ctensor_all(cs: &[Circuit]) -> Circuit {
    cs.iter().fold(Circuit::id_unit(), |acc, c| ctensor(&acc, c))
}

/// `id_U` for a monomial.
pub fn circuit_id(u: &Monomial) -> Circuit {
    ctensor_all(&u.factors().iter().map(Circuit::id_sort).collect::<Vec<_>>())
}

fn per_factor(u: &Monomial, f: impl Fn(&Sort) -> Circuit) -> Circuit {
    ctensor_all(&u.factors().iter().map(f).collect::<Vec<_>>())
}

/// `σ_{U,V} : UV → VU` built from sort symmetries.
pub fn circuit_symmetry(u: &Monomial, v: &Monomial) -> Circuit {
    match u.split_first() {
        None => circuit_id(v),
        Some((a, rest)) => {
            // σ_{AU',V} = (id_A ⊗ σ_{U',V}) ; (σ_{A,V} ⊗ id_{U'})
            let inner = ctensor(&Circuit::id_sort(&a), &circuit_symmetry(&rest, v));
            let outer = ctensor(&sort_past(&a, v), &circuit_id(&rest));
            cseq(&inner, &outer)
        }
    }
}

/// `σ_{A,V} : AV → VA`.
fn sort_past(a: &Sort, v: &Monomial) -> Circuit {
    match v.split_first() {
        None => Circuit::id_sort(a),
        Some((b, rest)) => {
            let step = ctensor(&Circuit::symmetry(a, &b), &circuit_id(&rest));
            let tail = ctensor(&Circuit::id_sort(&b), &sort_past(a, &rest));
            cseq(&step, &tail)
        }
    }
}

/// `◁_U : U → UU`.
pub fn circuit_copier(u: &Monomial) -> Circuit {
    match u.split_first() {
        None => Circuit::id_unit(),
        Some((a, rest)) if rest.is_unit() => Circuit::copier(&a),
        Some((a, rest)) => {
            // ◁_{AU'} = (◁_A ⊗ ◁_{U'}) ; (id_A ⊗ σ_{A,U'} ⊗ id_{U'})
            let split = ctensor(&Circuit::copier(&a), &circuit_copier(&rest));
            let a_m: Monomial = a.clone().into();
            let swap = ctensor_all(&[Circuit::id_sort(&a), circuit_symmetry(&a_m, &rest), circuit_id(&rest)]);
            cseq(&split, &swap)
        }
    }
}

/// `▷_U : UU → U`.
pub fn circuit_cocopier(u: &Monomial) -> Circuit {
    match u.split_first() {
        None => Circuit::id_unit(),
        Some((a, rest)) if rest.is_unit() => Circuit::cocopier(&a),
        Some((a, rest)) => {
            let a_m: Monomial = a.clone().into();
            let swap = ctensor_all(&[Circuit::id_sort(&a), circuit_symmetry(&rest, &a_m), circuit_id(&rest)]);
            let merge = ctensor(&Circuit::cocopier(&a), &circuit_cocopier(&rest));
            cseq(&swap, &merge)
        }
    }
}

/// `!_U : U → 1`.
pub fn circuit_discharger(u: &Monomial) -> Circuit {
    per_factor(u, Circuit::discharger)
}

/// `¡_U : 1 → U`.
pub fn circuit_codischarger(u: &Monomial) -> Circuit {
    per_factor(u, Circuit::codischarger)
}

/// n-fold copier `◁ⁿ_U : U → Uⁿ`, with `◁⁰ = !` and `◁ⁿ⁺¹ = ◁ ; (◁ⁿ ⊗ id)`.
pub fn circuit_copier_n(n: usize, u: &Monomial) -> Circuit {
    if n == 0 {
        return circuit_discharger(u);
    }
    let rest = ctensor(&circuit_copier_n(n - 1, u), &circuit_id(u));
    cseq(&circuit_copier(u), &rest)
}

/// Converse of a circuit via the cup/cap construction.
pub fn circuit_converse(c: &Circuit) -> Circuit {
    let (x, y) = (c.dom(), c.cod());
    let (idx, idy) = (circuit_id(x), circuit_id(y));
    cseq_all(&[
        ctensor(&circuit_codischarger(x), &idy),
        ctensor(&circuit_copier(x), &idy),
        ctensor_all(&[idx.clone(), c.clone(), idy.clone()]),
        ctensor(&idx, &circuit_cocopier(y)),
        ctensor(&idx, &circuit_discharger(y)),
    ])
}

/// `c ⊓ d = ◁ ; (c ⊗ d) ; ▷`.
pub fn circuit_meet(c: &Circuit, d: &Circuit) -> Result<Circuit, TypeError> {
    if c.dom() != d.dom() || c.cod() != d.cod() {
        return Err(TypeError::TypeMismatch(format!(
            "meet of {} → {} and {} → {}",
            c.dom(),
            c.cod(),
            d.dom(),
            d.cod()
        )));
    }
    Ok(cseq_all(&[circuit_copier(c.dom()), c.tensor(d), circuit_cocopier(c.cod())]))
}

/// `⊤ = ! ; ¡`.
pub fn circuit_top(u: &Monomial, v: &Monomial) -> Circuit {
    cseq(&circuit_discharger(u), &circuit_codischarger(v))
}

// ---------------------------------------------------------------------------
// tapes: small combinators

fn seq(a: &Tape, b: &Tape) -> Tape {
    a.seq(b).expect("sugar builds well-typed tapes")
}

pub(crate) fn seq_all(ts: &[Tape]) -> Tape {
    let mut it = ts.iter();
    let first = it.next().expect("nonempty composite").clone();
    it.fold(first, |acc, t| seq(&acc, t))
}

/// `a ⊕ b`, dropping `id₀` operands.
pub fn plus(a: &Tape, b: &Tape) -> Tape {
    match (a.kind(), b.kind()) {
        (TapeKind::IdZero, _) => b.clone(),
        (_, TapeKind::IdZero) => a.clone(),
        _ => a.sum(b),
    }
}

/// Right-nested `⊕` of a list; the empty list gives `id₀`.
pub fn plus_all(ts: &[Tape]) -> Tape {
    ts.iter().rev().fold(Tape::id_zero(), |acc, t| plus(t, &acc))
}

fn mono(u: &Monomial) -> Polynomial {
    u.clone().into()
}

/// `id_P` for a polynomial.
pub fn id(p: &Polynomial) -> Tape {
    plus_all(&p.summands().iter().map(Tape::id_monomial).collect::<Vec<_>>())
}

/// Polynomial `⊕`-symmetry `σ⊕_{P,Q} : P ⊕ Q → Q ⊕ P` from monomial swaps.
pub fn symmetry_plus(p: &Polynomial, q: &Polynomial) -> Tape {
    match p.split_first() {
        _ if q.is_zero() => id(p),
        None => id(q),
        Some((u, rest)) => {
            let first = plus(&Tape::id_monomial(&u), &symmetry_plus(&rest, q));
            let second = plus(&monomial_past(&u, q), &id(&rest));
            seq(&first, &second)
        }
    }
}

/// `U ⊕ Q → Q ⊕ U`.
fn monomial_past(u: &Monomial, q: &Polynomial) -> Tape {
    match q.split_first() {
        None => Tape::id_monomial(u),
        Some((v, rest)) => {
            let step = plus(&Tape::symmetry_plus(u, &v), &id(&rest));
            let tail = plus(&Tape::id_monomial(&v), &monomial_past(u, &rest));
            seq(&step, &tail)
        }
    }
}

// ---------------------------------------------------------------------------
// whiskering

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Monomial left whiskering `L_U(t) : U⊗P → U⊗Q`.
pub fn whisker_left_monomial(u: &Monomial, t: &Tape) -> Tape {
    let w = |v: &Monomial| u.concat(v);
    match t.kind() {
        TapeKind::IdZero => Tape::id_zero(),
        TapeKind::IdMonomial(v) => Tape::id_monomial(&w(v)),
        TapeKind::Embed(c) => Tape::embed(&ctensor(&circuit_id(u), c)),
        TapeKind::SymmetryPlus(v, x) => Tape::symmetry_plus(&w(v), &w(x)),
        TapeKind::Seq(a, b) => seq(&whisker_left_monomial(u, a), &whisker_left_monomial(u, b)),
        TapeKind::Sum(a, b) => whisker_left_monomial(u, a).sum(&whisker_left_monomial(u, b)),
        TapeKind::Bang(v) => Tape::bang(&w(v)),
        TapeKind::Diag(v) => Tape::diag(&w(v)),
        TapeKind::Cobang(v) => Tape::cobang(&w(v)),
        TapeKind::Codiag(v) => Tape::codiag(&w(v)),
        TapeKind::Trace(v, body) => Tape::trace(&w(v), &whisker_left_monomial(u, body)).expect("whiskered trace"),
    }
}

/// Monomial right whiskering `R_U(t) : P⊗U → Q⊗U`.
pub fn whisker_right_monomial(u: &Monomial, t: &Tape) -> Tape {
    let w = |v: &Monomial| v.concat(u);
    match t.kind() {
        TapeKind::IdZero => Tape::id_zero(),
        TapeKind::IdMonomial(v) => Tape::id_monomial(&w(v)),
        TapeKind::Embed(c) => Tape::embed(&ctensor(c, &circuit_id(u))),
        TapeKind::SymmetryPlus(v, x) => Tape::symmetry_plus(&w(v), &w(x)),
        TapeKind::Seq(a, b) => seq(&whisker_right_monomial(u, a), &whisker_right_monomial(u, b)),
        TapeKind::Sum(a, b) => whisker_right_monomial(u, a).sum(&whisker_right_monomial(u, b)),
        TapeKind::Bang(v) => Tape::bang(&w(v)),
        TapeKind::Diag(v) => Tape::diag(&w(v)),
        TapeKind::Cobang(v) => Tape::cobang(&w(v)),
        TapeKind::Codiag(v) => Tape::codiag(&w(v)),
        TapeKind::Trace(v, body) => Tape::trace(&w(v), &whisker_right_monomial(u, body)).expect("whiskered trace"),
    }
}

/// Polynomial whiskering. Left: `X⊗P → X⊗Q`; right: `P⊗X → Q⊗X`, inserting
/// left distributors between the summands of `X`.
pub fn whisker(side: Side, x: &Polynomial, t: &Tape) -> Tape {
    match side {
        Side::Left => plus_all(&x.summands().iter().map(|w| whisker_left_monomial(w, t)).collect::<Vec<_>>()),
        Side::Right => match x.split_first() {
            None => Tape::id_zero(),
            Some((w, rest)) if rest.is_zero() => whisker_right_monomial(&w, t),
            Some((w, rest)) => {
                let w_p = mono(&w);
                seq_all(&[
                    distributor(t.dom(), &w_p, &rest),
                    whisker_right_monomial(&w, t).sum(&whisker(Side::Right, &rest, t)),
                    distributor_inv(t.cod(), &w_p, &rest),
                ])
            }
        },
    }
}

/// Left distributor `δˡ_{P,Q,R} : P⊗(Q⊕R) → P⊗Q ⊕ P⊗R`; the identity when
/// `P` has at most one summand.
pub fn distributor(p: &Polynomial, q: &Polynomial, r: &Polynomial) -> Tape {
    match p.split_first() {
        None => Tape::id_zero(),
        Some((_, rest)) if rest.is_zero() => id(&p.product(&q.sum(r))),
        Some((u, rest)) => {
            let u_p = mono(&u);
            let first = plus(&id(&u_p.product(&q.sum(r))), &distributor(&rest, q, r));
            let second = plus_all(&[
                id(&u_p.product(q)),
                symmetry_plus(&u_p.product(r), &rest.product(q)),
                id(&rest.product(r)),
            ]);
            seq(&first, &second)
        }
    }
}

/// Inverse left distributor `P⊗Q ⊕ P⊗R → P⊗(Q⊕R)`.
pub fn distributor_inv(p: &Polynomial, q: &Polynomial, r: &Polynomial) -> Tape {
    match p.split_first() {
        None => Tape::id_zero(),
        Some((_, rest)) if rest.is_zero() => id(&p.product(&q.sum(r))),
        Some((u, rest)) => {
            let u_p = mono(&u);
            let first = plus_all(&[
                id(&u_p.product(q)),
                symmetry_plus(&rest.product(q), &u_p.product(r)),
                id(&rest.product(r)),
            ]);
            let second = plus(&id(&u_p.product(&q.sum(r))), &distributor_inv(&rest, q, r));
            seq(&first, &second)
        }
    }
}

/// `t1 ⊗ t2 = L_P(t2) ; R_S(t1)` for `t1 : P → Q`, `t2 : R → S`.
pub fn tensor(t1: &Tape, t2: &Tape) -> Tape {
    seq(&whisker(Side::Left, t1.dom(), t2), &whisker(Side::Right, t2.cod(), t1))
}

// ---------------------------------------------------------------------------
// polynomial structure

/// The structural tapes available for every polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structural {
    Copier,
    Discharger,
    Cocopier,
    Codischarger,
    Diag,
    Bang,
    Codiag,
    Cobang,
    /// `σ⊗_{X,Q} : X⊗Q → Q⊗X`
    SymmetryTensor(Polynomial),
    /// `δˡ_{X,Q,R}`
    DistributorLeft(Polynomial, Polynomial),
    /// `(δˡ_{X,Q,R})⁻¹`
    DistributorLeftInv(Polynomial, Polynomial),
}

/// Builds the expanded structural tape of the given kind on `x`.
pub fn structural(kind: &Structural, x: &Polynomial) -> Tape {
    match kind {
        Structural::Copier => copier(x),
        Structural::Discharger => discharger(x),
        Structural::Cocopier => cocopier(x),
        Structural::Codischarger => codischarger(x),
        Structural::Diag => diag(x),
        Structural::Bang => bang(x),
        Structural::Codiag => codiag(x),
        Structural::Cobang => cobang(x),
        Structural::SymmetryTensor(q) => symmetry_tensor(x, q),
        Structural::DistributorLeft(q, r) => distributor(x, q, r),
        Structural::DistributorLeftInv(q, r) => distributor_inv(x, q, r),
    }
}

/// `◁_P : P → P⊗P`.
pub fn copier(p: &Polynomial) -> Tape {
    match p.split_first() {
        None => Tape::id_zero(),
        Some((u, rest)) if rest.is_zero() => Tape::embed(&circuit_copier(&u)),
        Some((u, rest)) => {
            let u_p = mono(&u);
            let tail = seq(&plus(&cobang(&rest.product(&u_p)), &copier(&rest)), &distributor_inv(&rest, &u_p, &rest));
            plus_all(&[Tape::embed(&circuit_copier(&u)), cobang(&u_p.product(&rest)), tail])
        }
    }
}

/// `▷_P : P⊗P → P`.
pub fn cocopier(p: &Polynomial) -> Tape {
    match p.split_first() {
        None => Tape::id_zero(),
        Some((u, rest)) if rest.is_zero() => Tape::embed(&circuit_cocopier(&u)),
        Some((u, rest)) => {
            let u_p = mono(&u);
            let tail = seq(&distributor(&rest, &u_p, &rest), &plus(&bang(&rest.product(&u_p)), &cocopier(&rest)));
            plus_all(&[Tape::embed(&circuit_cocopier(&u)), bang(&u_p.product(&rest)), tail])
        }
    }
}

/// `!_P : P → 1`.
pub fn discharger(p: &Polynomial) -> Tape {
    match p.split_first() {
        None => Tape::cobang(&Monomial::unit()),
        Some((u, rest)) if rest.is_zero() => Tape::embed(&circuit_discharger(&u)),
        Some((u, rest)) => {
            seq(&Tape::embed(&circuit_discharger(&u)).sum(&discharger(&rest)), &Tape::codiag(&Monomial::unit()))
        }
    }
}

/// `¡_P : 1 → P`.
pub fn codischarger(p: &Polynomial) -> Tape {
    match p.split_first() {
        None => Tape::bang(&Monomial::unit()),
        Some((u, rest)) if rest.is_zero() => Tape::embed(&circuit_codischarger(&u)),
        Some((u, rest)) => {
            seq(&Tape::diag(&Monomial::unit()), &Tape::embed(&circuit_codischarger(&u)).sum(&codischarger(&rest)))
        }
    }
}

/// `◁⊕_P : P → P ⊕ P`.
pub fn diag(p: &Polynomial) -> Tape {
    match p.split_first() {
        None => Tape::id_zero(),
        Some((u, rest)) if rest.is_zero() => Tape::diag(&u),
        Some((u, rest)) => seq(
            &Tape::diag(&u).sum(&diag(&rest)),
            &plus_all(&[Tape::id_monomial(&u), symmetry_plus(&mono(&u), &rest), id(&rest)]),
        ),
    }
}

/// `▷⊕_P : P ⊕ P → P`.
pub fn codiag(p: &Polynomial) -> Tape {
    match p.split_first() {
        None => Tape::id_zero(),
        Some((u, rest)) if rest.is_zero() => Tape::codiag(&u),
        Some((u, rest)) => seq(
            &plus_all(&[Tape::id_monomial(&u), symmetry_plus(&rest, &mono(&u)), id(&rest)]),
            &Tape::codiag(&u).sum(&codiag(&rest)),
        ),
    }
}

/// `!⊕_P : P → 0`.
pub fn bang(p: &Polynomial) -> Tape {
    plus_all(&p.summands().iter().map(Tape::bang).collect::<Vec<_>>())
}

/// `¡⊕_P : 0 → P`.
pub fn cobang(p: &Polynomial) -> Tape {
    plus_all(&p.summands().iter().map(Tape::cobang).collect::<Vec<_>>())
}

/// `σ⊗_{P,Q} : P⊗Q → Q⊗P`.
pub fn symmetry_tensor(p: &Polynomial, q: &Polynomial) -> Tape {
    match q.split_first() {
        None => Tape::id_zero(),
        Some((v, rest)) if rest.is_zero() => {
            plus_all(&p.summands().iter().map(|u| Tape::embed(&circuit_symmetry(u, &v))).collect::<Vec<_>>())
        }
        Some((v, rest)) => {
            let v_p = mono(&v);
            seq(&distributor(p, &v_p, &rest), &plus(&symmetry_tensor(p, &v_p), &symmetry_tensor(p, &rest)))
        }
    }
}

/// `tr_P t` for `t : P ⊕ X → P ⊕ Y`, as nested monomial traces
/// (`tr_{U⊕P'} = tr_{P'} ∘ tr_U`).
pub fn trace_poly(p: &Polynomial, t: &Tape) -> Result<Tape, TypeError> {
    match p.split_first() {
        None => Ok(t.clone()),
        Some((u, rest)) => trace_poly(&rest, &Tape::trace(&u, t)?),
    }
}

// ---------------------------------------------------------------------------
// derived operations

/// The derived operations of Cartesian and Kleene bicategories.
#[derive(Clone, Debug)]
pub enum Derived {
    Meet(Tape, Tape),
    Top(Polynomial, Polynomial),
    Converse(Tape),
    Join(Tape, Tape),
    Bot(Polynomial, Polynomial),
    Star(Tape),
}

pub fn derived(kind: &Derived) -> Result<Tape, TypeError> {
    match kind {
        Derived::Meet(a, b) => meet(a, b),
        Derived::Top(p, q) => Ok(top(p, q)),
        Derived::Converse(t) => Ok(converse(t)),
        Derived::Join(a, b) => join(a, b),
        Derived::Bot(p, q) => Ok(bot(p, q)),
        Derived::Star(t) => star(t),
    }
}

fn same_type(op: &str, a: &Tape, b: &Tape) -> Result<(), TypeError> {
    if a.dom() != b.dom() || a.cod() != b.cod() {
        return Err(TypeError::TypeMismatch(format!(
            "{op} of {} → {} and {} → {}",
            a.dom(),
            a.cod(),
            b.dom(),
            b.cod()
        )));
    }
    Ok(())
}

/// `t1 ⊓ t2 = ◁ ; (t1 ⊗ t2) ; ▷`.
pub fn meet(a: &Tape, b: &Tape) -> Result<Tape, TypeError> {
    same_type("meet", a, b)?;
    Ok(seq_all(&[copier(a.dom()), tensor(a, b), cocopier(a.cod())]))
}

/// `⊤_{P,Q} = !_P ; ¡_Q`.
pub fn top(p: &Polynomial, q: &Polynomial) -> Tape {
    seq(&discharger(p), &codischarger(q))
}

/// `t† : Y → X` for `t : X → Y`, by bending wires with (co)copiers.
pub fn converse(t: &Tape) -> Tape {
    let (x, y) = (t.dom(), t.cod());
    let (idx, idy) = (id(x), id(y));
    seq_all(&[
        tensor(&codischarger(x), &idy),
        tensor(&copier(x), &idy),
        tensor(&tensor(&idx, t), &idy),
        tensor(&idx, &cocopier(y)),
        tensor(&idx, &discharger(y)),
    ])
}

/// `t1 ⊔ t2 = ◁⊕ ; (t1 ⊕ t2) ; ▷⊕`.
pub fn join(a: &Tape, b: &Tape) -> Result<Tape, TypeError> {
    same_type("join", a, b)?;
    Ok(seq_all(&[diag(a.dom()), a.sum(b), codiag(a.cod())]))
}

/// `⊥_{P,Q} = !⊕_P ; ¡⊕_Q`.
pub fn bot(p: &Polynomial, q: &Polynomial) -> Tape {
    seq(&bang(p), &cobang(q))
}

/// `t* = tr_P((t ⊕ id_P) ; ▷⊕_P ; ◁⊕_P)`.
pub fn star(t: &Tape) -> Result<Tape, TypeError> {
    if t.dom() != t.cod() {
        return Err(TypeError::TypeMismatch(format!("star of non-endo {} → {}", t.dom(), t.cod())));
    }
    let p = t.dom();
    let body = seq_all(&[t.sum(&id(p)), codiag(p), diag(p)]);
    trace_poly(p, &body)
}
