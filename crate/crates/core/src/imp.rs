//! A small imperative language: syntax, typing, substitution, negation of
//! predicates and the encoding of commands into tapes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::error::{EvalError, TypeError};
use crate::eval::{AxiomKind, Interpretation, SearchMode, Theory};
use crate::poly::{Monomial, Polynomial, Signature, Sort};
use crate::rel::{ArrowProperty, FinRel};
use crate::sugar::{self, circuit_copier, circuit_copier_n, circuit_discharger, circuit_id, ctensor, ctensor_all};
use crate::term::{Circuit, Tape};

// ---------------------------------------------------------------------------
// syntax

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    App(String, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pred {
    Atom(String, Vec<Expr>),
    /// The complement atom `!R(…)`.
    NAtom(String, Vec<Expr>),
    True,
    False,
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Cmd {
    Abort,
    Skip,
    If(Pred, Box<Cmd>, Box<Cmd>),
    While(Pred, Box<Cmd>),
    Seq(Box<Cmd>, Box<Cmd>),
    Assign(String, Expr),
}

impl Expr {
    pub fn var(x: &str) -> Expr {
        Expr::Var(x.to_string())
    }

    pub fn app(f: &str, args: Vec<Expr>) -> Expr {
        Expr::App(f.to_string(), args)
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    /// `self[t/x]`.
    pub fn substitute(&self, t: &Expr, x: &str) -> Expr {
        match self {
            Expr::Var(y) if y == x => t.clone(),
            Expr::Var(_) => self.clone(),
            Expr::App(f, args) => Expr::App(f.clone(), args.iter().map(|a| a.substitute(t, x)).collect()),
        }
    }
}

impl Pred {
    pub fn atom(r: &str, args: Vec<Expr>) -> Pred {
        Pred::Atom(r.to_string(), args)
    }

    pub fn and(a: Pred, b: Pred) -> Pred {
        Pred::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Pred, b: Pred) -> Pred {
        Pred::Or(Box::new(a), Box::new(b))
    }

    /// De Morgan negation; complement atoms swap with atoms.
    pub fn negate(&self) -> Pred {
        match self {
            Pred::Atom(r, a) => Pred::NAtom(r.clone(), a.clone()),
            Pred::NAtom(r, a) => Pred::Atom(r.clone(), a.clone()),
            Pred::True => Pred::False,
            Pred::False => Pred::True,
            Pred::And(p, q) => Pred::or(p.negate(), q.negate()),
            Pred::Or(p, q) => Pred::and(p.negate(), q.negate()),
        }
    }

    /// `self[t/x]`; there are no binders, so this is plain replacement.
    pub fn substitute(&self, t: &Expr, x: &str) -> Pred {
        let sub = |args: &[Expr]| args.iter().map(|a| a.substitute(t, x)).collect();
        match self {
            Pred::Atom(r, a) => Pred::Atom(r.clone(), sub(a)),
            Pred::NAtom(r, a) => Pred::NAtom(r.clone(), sub(a)),
            Pred::True | Pred::False => self.clone(),
            Pred::And(p, q) => Pred::and(p.substitute(t, x), q.substitute(t, x)),
            Pred::Or(p, q) => Pred::or(p.substitute(t, x), q.substitute(t, x)),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Pred::Atom(_, a) | Pred::NAtom(_, a) => a.iter().for_each(|e| e.vars(out)),
            Pred::True | Pred::False => {}
            Pred::And(p, q) | Pred::Or(p, q) => {
                p.vars(out);
                q.vars(out);
            }
        }
    }
}

impl Cmd {
    pub fn seq(a: Cmd, b: Cmd) -> Cmd {
        Cmd::Seq(Box::new(a), Box::new(b))
    }

    pub fn assign(x: &str, e: Expr) -> Cmd {
        Cmd::Assign(x.to_string(), e)
    }

    pub fn if_(p: Pred, a: Cmd, b: Cmd) -> Cmd {
        Cmd::If(p, Box::new(a), Box::new(b))
    }

    pub fn while_(p: Pred, body: Cmd) -> Cmd {
        Cmd::While(p, Box::new(body))
    }

    /// Variables assigned anywhere in the command.
    pub fn assigned(&self, out: &mut BTreeSet<String>) {
        match self {
            Cmd::Abort | Cmd::Skip => {}
            Cmd::If(_, a, b) | Cmd::Seq(a, b) => {
                a.assigned(out);
                b.assigned(out);
            }
            Cmd::While(_, c) => c.assigned(out),
            Cmd::Assign(x, _) => {
                out.insert(x.clone());
            }
        }
    }
}

fn fmt_args(f: &mut fmt::Formatter<'_>, name: &str, args: &[Expr]) -> fmt::Result {
    f.write_str(name)?;
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(x) => f.write_str(x),
            Expr::App(g, args) => fmt_args(f, g, args),
        }
    }
}

impl Pred {
    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = match self {
            Pred::Or(..) => 0,
            Pred::And(..) => 1,
            _ => 2,
        };
        if prec < min {
            f.write_str("(")?;
        }
        match self {
            Pred::Atom(r, a) => fmt_args(f, r, a)?,
            Pred::NAtom(r, a) => {
                f.write_str("!")?;
                fmt_args(f, r, a)?
            }
            Pred::True => f.write_str("true")?,
            Pred::False => f.write_str("false")?,
            Pred::And(p, q) | Pred::Or(p, q) => {
                p.fmt_at(prec, f)?;
                f.write_str(if prec == 0 { " || " } else { " && " })?;
                q.fmt_at(prec + 1, f)?;
            }
        }
        if prec < min {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}

impl Cmd {
    fn fmt_at(&self, top: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cmd::Abort => f.write_str("abort"),
            Cmd::Skip => f.write_str("skip"),
            Cmd::Assign(x, e) => write!(f, "{x} := {e}"),
            Cmd::If(p, a, b) => write!(f, "if {p} then {a} else {b} end"),
            Cmd::While(p, c) => write!(f, "while {p} do {c} end"),
            Cmd::Seq(a, b) => {
                // `;` parses left-associatively, so only a sequence on the
                // right needs parentheses
                if !top {
                    f.write_str("(")?;
                }
                a.fmt_at(true, f)?;
                f.write_str("; ")?;
                b.fmt_at(false, f)?;
                if !top {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Cmd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(true, f)
    }
}

// ---------------------------------------------------------------------------
// contexts and signatures

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ImpError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("`{symbol}` expects {expected} argument(s), got {found}")]
    ArityMismatch { symbol: String, expected: usize, found: usize },
    #[error("sort mismatch in {at}: expected {expected}, found {found}")]
    SortMismatch { at: String, expected: String, found: String },
    #[error("unknown function or predicate `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` is neither a function (one output sort) nor a predicate (no output)")]
    BadSymbol(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}

/// An ordered list of distinct typed variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Context(Vec<(String, Sort)>);

impl Context {
    pub fn new(vars: Vec<(String, Sort)>) -> Result<Context, ImpError> {
        let mut seen = BTreeSet::new();
        for (x, _) in &vars {
            if !seen.insert(x.clone()) {
                return Err(ImpError::DuplicateVariable(x.clone()));
            }
        }
        Ok(Context(vars))
    }

    /// `Context::of(&[("x", "A"), ("y", "A")])`.
    pub fn of(vars: &[(&str, &str)]) -> Context {
        Context::new(vars.iter().map(|(x, s)| (x.to_string(), Sort::new(s))).collect()).expect("distinct variables")
    }

    pub fn vars(&self) -> &[(String, Sort)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, x: &str) -> Option<usize> {
        self.0.iter().position(|(y, _)| y == x)
    }

    pub fn sort_of(&self, x: &str) -> Result<&Sort, ImpError> {
        self.0.iter().find(|(y, _)| y == x).map(|(_, s)| s).ok_or_else(|| ImpError::UnboundVariable(x.to_string()))
    }

    /// The state space: the product of the sorts in declaration order.
    pub fn monomial(&self) -> Monomial {
        Monomial::new(self.0.iter().map(|(_, s)| s.clone()).collect())
    }

    pub fn polynomial(&self) -> Polynomial {
        self.monomial().into()
    }

    /// Concatenation; fails if a variable occurs in both.
    pub fn concat(&self, other: &Context) -> Result<Context, ImpError> {
        Context::new([self.0.clone(), other.0.clone()].concat())
    }

    /// Renders a state, e.g. `(x=0, y=2)`.
    pub fn show_state(&self, values: &[usize]) -> String {
        let parts: Vec<String> = self.0.iter().zip(values).map(|((x, _), v)| format!("{x}={v}")).collect();
        format!("({})", parts.join(", "))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(x, s)| format!("{x}:{s}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Name of the complement of predicate `r`.
pub fn complement_name(r: &str) -> String {
    format!("!{r}")
}

/// Sorts, functions `A₁⋯Aₙ → A`, predicates `A₁⋯Aₙ → 1`, and an
/// automatically declared complement `!R` for each predicate `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramSignature {
    signature: Signature,
    functions: BTreeMap<String, (Monomial, Sort)>,
    predicates: BTreeMap<String, Monomial>,
}

impl ProgramSignature {
    /// Classifies the symbols of `sig` by coarity; existing complement
    /// declarations are accepted if their type matches.
    pub fn from_signature(sig: &Signature) -> Result<ProgramSignature, ImpError> {
        let mut full = sig.clone();
        let mut functions = BTreeMap::new();
        let mut predicates = BTreeMap::new();
        for (name, (d, c)) in sig.symbols() {
            if let Some(base) = name.strip_prefix('!') {
                match sig.symbol(base) {
                    Some((bd, bc)) if bd == d && bc == c && c.is_unit() => continue,
                    _ => return Err(ImpError::BadSymbol(name.clone())),
                }
            }
            match c.factors() {
                [] => {
                    predicates.insert(name.clone(), d.clone());
                    full.add_symbol(&complement_name(name), d.clone(), Monomial::unit())?;
                }
                [s] => {
                    functions.insert(name.clone(), (d.clone(), s.clone()));
                }
                _ => return Err(ImpError::BadSymbol(name.clone())),
            }
        }
        Ok(ProgramSignature { signature: full, functions, predicates })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn functions(&self) -> &BTreeMap<String, (Monomial, Sort)> {
        &self.functions
    }

    pub fn predicates(&self) -> &BTreeMap<String, Monomial> {
        &self.predicates
    }

    /// Counter-model search restricted to models of the program theory.
    pub fn search_mode(&self) -> SearchMode {
        SearchMode::Restricted {
            functions: self.functions.keys().cloned().collect(),
            complements: self.predicates.keys().map(|r| (complement_name(r), r.clone())).collect(),
        }
    }

    /// The theory of the signature: functions are single-valued and total,
    /// each predicate and its complement partition the state space.
    pub fn theory(&self) -> Theory {
        let mut th = Theory::new(self.signature.clone());
        let ok = "axioms are well-typed";
        for (f, (u, a)) in &self.functions {
            let am: Monomial = a.clone().into();
            let g = Tape::embed(&Circuit::generator(f, u.clone(), am.clone()));
            let up: Polynomial = u.clone().into();
            let ap: Polynomial = am.into();
            let sv_l = sugar::copier(&up).seq(&sugar::tensor(&g, &g)).expect(ok);
            let sv_r = g.seq(&sugar::copier(&ap)).expect(ok);
            th.add_axiom(sv_l, sv_r, AxiomKind::Leq).expect(ok);
            let tot_r = g.seq(&sugar::discharger(&ap)).expect(ok);
            th.add_axiom(sugar::discharger(&up), tot_r, AxiomKind::Leq).expect(ok);
        }
        for (r, u) in &self.predicates {
            let up: Polynomial = u.clone().into();
            let p = Tape::embed(&Circuit::generator(r, u.clone(), Monomial::unit()));
            let np = Tape::embed(&Circuit::generator(&complement_name(r), u.clone(), Monomial::unit()));
            let one = Polynomial::one();
            th.add_axiom(sugar::join(&p, &np).expect(ok), sugar::discharger(&up), AxiomKind::Eq).expect(ok);
            th.add_axiom(sugar::meet(&p, &np).expect(ok), sugar::bot(&up, &one), AxiomKind::Eq).expect(ok);
        }
        th
    }

    /// Checks directly that `interp` is a model of [`ProgramSignature::theory`].
    pub fn check_model(&self, interp: &Interpretation) -> Result<(), NotAModel> {
        let get =
            |n: &str| interp.get(n).ok_or_else(|| NotAModel { symbol: n.to_string(), reason: "uninterpreted".into() });
        for f in self.functions.keys() {
            let r = get(f)?;
            for (p, what) in [(ArrowProperty::Sv, "not single-valued"), (ArrowProperty::Tot, "not total")] {
                if !r.has_property(p).unwrap_or(false) {
                    return Err(NotAModel { symbol: f.clone(), reason: what.into() });
                }
            }
        }
        for r in self.predicates.keys() {
            let name = complement_name(r);
            let (p, np) = (get(r)?, get(&name)?);
            let disjoint = p.intersection(np).map(|m| m.is_empty()).unwrap_or(false);
            let covers = p.union(np).map(|u| u.len() == p.dom().size()).unwrap_or(false);
            if !(disjoint && covers) {
                return Err(NotAModel { symbol: name, reason: format!("not the complement of `{r}`") });
            }
        }
        Ok(())
    }

    /// Adds the complement relations to an interpretation of the base
    /// symbols (replacing any given ones).
    pub fn complete(&self, interp: &Interpretation) -> Result<Interpretation, EvalError> {
        let mut out = interp.extended(&self.signature)?;
        for r in self.predicates.keys() {
            let p = out.get(r).expect("declared").clone();
            let mut np = FinRel::full(p.dom(), p.cod());
            for (i, j) in p.pairs() {
                np.remove(i, j);
            }
            out.set(&complement_name(r), np)?;
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("not a model: `{symbol}` is {reason}")]
pub struct NotAModel {
    pub symbol: String,
    pub reason: String,
}

// ---------------------------------------------------------------------------
// typing

fn check_args(
    gamma: &Context,
    sig: &ProgramSignature,
    name: &str,
    arity: &Monomial,
    args: &[Expr],
) -> Result<(), ImpError> {
    if arity.len() != args.len() {
        return Err(ImpError::ArityMismatch { symbol: name.to_string(), expected: arity.len(), found: args.len() });
    }
    for (k, (a, s)) in args.iter().zip(arity.factors()).enumerate() {
        let found = typecheck_expr(gamma, a, sig)?;
        if &found != s {
            return Err(ImpError::SortMismatch {
                at: format!("argument {} of `{name}`", k + 1),
                expected: s.to_string(),
                found: found.to_string(),
            });
        }
    }
    Ok(())
}

pub fn typecheck_expr(gamma: &Context, e: &Expr, sig: &ProgramSignature) -> Result<Sort, ImpError> {
    match e {
        Expr::Var(x) => gamma.sort_of(x).cloned(),
        Expr::App(f, args) => {
            let (arity, out) = sig.functions.get(f).ok_or_else(|| ImpError::UnknownSymbol(f.clone()))?;
            check_args(gamma, sig, f, arity, args)?;
            Ok(out.clone())
        }
    }
}

pub fn typecheck_pred(gamma: &Context, p: &Pred, sig: &ProgramSignature) -> Result<(), ImpError> {
    match p {
        Pred::Atom(r, args) | Pred::NAtom(r, args) => {
            let arity = sig.predicates.get(r).ok_or_else(|| ImpError::UnknownSymbol(r.clone()))?;
            check_args(gamma, sig, r, arity, args)
        }
        Pred::True | Pred::False => Ok(()),
        Pred::And(a, b) | Pred::Or(a, b) => {
            typecheck_pred(gamma, a, sig)?;
            typecheck_pred(gamma, b, sig)
        }
    }
}

pub fn typecheck_cmd(gamma: &Context, c: &Cmd, sig: &ProgramSignature) -> Result<(), ImpError> {
    match c {
        Cmd::Abort | Cmd::Skip => Ok(()),
        Cmd::If(p, a, b) => {
            typecheck_pred(gamma, p, sig)?;
            typecheck_cmd(gamma, a, sig)?;
            typecheck_cmd(gamma, b, sig)
        }
        Cmd::While(p, body) => {
            typecheck_pred(gamma, p, sig)?;
            typecheck_cmd(gamma, body, sig)
        }
        Cmd::Seq(a, b) => {
            typecheck_cmd(gamma, a, sig)?;
            typecheck_cmd(gamma, b, sig)
        }
        Cmd::Assign(x, e) => {
            let want = gamma.sort_of(x)?;
            let found = typecheck_expr(gamma, e, sig)?;
            if &found != want {
                return Err(ImpError::SortMismatch {
                    at: format!("assignment to `{x}`"),
                    expected: want.to_string(),
                    found: found.to_string(),
                });
            }
            Ok(())
        }
    }
}

/// Substitution with its typing precondition: `t` must have `x`'s sort.
pub fn substitute_pred(gamma: &Context, p: &Pred, t: &Expr, x: &str, sig: &ProgramSignature) -> Result<Pred, ImpError> {
    let want = gamma.sort_of(x)?;
    let found = typecheck_expr(gamma, t, sig)?;
    if &found != want {
        return Err(ImpError::SortMismatch {
            at: format!("substitution for `{x}`"),
            expected: want.to_string(),
            found: found.to_string(),
        });
    }
    Ok(p.substitute(t, x))
}

// ---------------------------------------------------------------------------
// encoding

/// Applies a symbol to argument circuits: `◁ⁿ ; (e₁ ⊗ ⋯ ⊗ eₙ) ; f`.
fn apply(gamma: &Monomial, symbol: Circuit, args: Vec<Circuit>) -> Circuit {
    circuit_copier_n(args.len(), gamma)
        .seq(&ctensor_all(&args))
        .and_then(|c| c.seq(&symbol))
        .expect("typechecked application")
}

fn expr_circuit(gamma: &Context, e: &Expr, sig: &ProgramSignature) -> Result<Circuit, ImpError> {
    let g = gamma.monomial();
    match e {
        Expr::Var(x) => {
            let k = gamma.position(x).ok_or_else(|| ImpError::UnboundVariable(x.clone()))?;
            let f = g.factors();
            Ok(ctensor_all(&[
                circuit_discharger(&Monomial::new(f[..k].to_vec())),
                Circuit::id_sort(&f[k]),
                circuit_discharger(&Monomial::new(f[k + 1..].to_vec())),
            ]))
        }
        Expr::App(name, args) => {
            let (arity, out) = &sig.functions[name];
            let args = args.iter().map(|a| expr_circuit(gamma, a, sig)).collect::<Result<_, _>>()?;
            Ok(apply(&g, Circuit::generator(name, arity.clone(), out.clone().into()), args))
        }
    }
}

/// `⟦Γ ⊢ e : A⟧ : Γ → A`.
pub fn encode_expr(gamma: &Context, e: &Expr, sig: &ProgramSignature) -> Result<Tape, ImpError> {
    typecheck_expr(gamma, e, sig)?;
    Ok(Tape::embed(&expr_circuit(gamma, e, sig)?))
}

/// `⟦Γ ⊢ P⟧ : Γ → 1`.
pub fn encode_pred(gamma: &Context, p: &Pred, sig: &ProgramSignature) -> Result<Tape, ImpError> {
    typecheck_pred(gamma, p, sig)?;
    let t = pred_tape(gamma, p, sig)?;
    debug_assert!(t.dom() == &gamma.polynomial() && t.cod() == &Polynomial::one());
    Ok(t)
}

fn pred_tape(gamma: &Context, p: &Pred, sig: &ProgramSignature) -> Result<Tape, ImpError> {
    let g = gamma.monomial();
    let gp = gamma.polynomial();
    let ok = "typechecked predicate";
    Ok(match p {
        Pred::Atom(r, args) | Pred::NAtom(r, args) => {
            let name = if matches!(p, Pred::Atom(..)) { r.clone() } else { complement_name(r) };
            let arity = sig.predicates[r].clone();
            let args = args.iter().map(|a| expr_circuit(gamma, a, sig)).collect::<Result<_, _>>()?;
            Tape::embed(&apply(&g, Circuit::generator(&name, arity, Monomial::unit()), args))
        }
        Pred::True => Tape::embed(&circuit_discharger(&g)),
        Pred::False => sugar::bot(&gp, &Polynomial::one()),
        Pred::Or(a, b) => sugar::join(&pred_tape(gamma, a, sig)?, &pred_tape(gamma, b, sig)?).expect(ok),
        Pred::And(a, b) => {
            let both = sugar::tensor(&pred_tape(gamma, a, sig)?, &pred_tape(gamma, b, sig)?);
            sugar::copier(&gp).seq(&both).expect(ok)
        }
    })
}

/// The coreflexive of a predicate tape `g : X → 1`: `◁_X ; (id_X ⊗ g)`.
pub fn coreflexive(g: &Tape) -> Result<Tape, TypeError> {
    if g.cod() != &Polynomial::one() {
        return Err(TypeError::TypeMismatch(format!("coreflexive of {} → {}", g.dom(), g.cod())));
    }
    let x = g.dom();
    sugar::copier(x).seq(&sugar::tensor(&sugar::id(x), g))
}

/// The predicate of a coreflexive `f : X → X`: `f† ; !_X`.
pub fn image(f: &Tape) -> Result<Tape, TypeError> {
    if f.dom() != f.cod() {
        return Err(TypeError::TypeMismatch(format!("image of {} → {}", f.dom(), f.cod())));
    }
    sugar::converse(f).seq(&sugar::discharger(f.dom()))
}

/// Semantic check that a relation is coreflexive.
pub fn ensure_coreflexive(r: &FinRel) -> Result<(), EvalError> {
    if r.has_property(ArrowProperty::Cor)? {
        Ok(())
    } else {
        Err(EvalError::BadInterpretation("relation is not coreflexive".into()))
    }
}

/// `⟦Γ ⊢ C⟧ : Γ → Γ`.
pub fn encode_cmd(gamma: &Context, c: &Cmd, sig: &ProgramSignature) -> Result<Tape, ImpError> {
    typecheck_cmd(gamma, c, sig)?;
    let t = cmd_tape(gamma, c, sig)?;
    debug_assert!(t.dom() == &gamma.polynomial() && t.cod() == &gamma.polynomial());
    Ok(t)
}

fn guard(gamma: &Context, p: &Pred, sig: &ProgramSignature) -> Result<Tape, ImpError> {
    Ok(coreflexive(&pred_tape(gamma, p, sig)?)?)
}

fn cmd_tape(gamma: &Context, c: &Cmd, sig: &ProgramSignature) -> Result<Tape, ImpError> {
    let gp = gamma.polynomial();
    let ok = "typechecked command";
    Ok(match c {
        Cmd::Abort => sugar::bot(&gp, &gp),
        Cmd::Skip => sugar::id(&gp),
        Cmd::Seq(a, b) => cmd_tape(gamma, a, sig)?.seq(&cmd_tape(gamma, b, sig)?).expect(ok),
        Cmd::If(p, a, b) => {
            let then = guard(gamma, p, sig)?.seq(&cmd_tape(gamma, a, sig)?).expect(ok);
            let other = guard(gamma, &p.negate(), sig)?.seq(&cmd_tape(gamma, b, sig)?).expect(ok);
            sugar::join(&then, &other).expect(ok)
        }
        Cmd::While(p, body) => {
            let step = guard(gamma, p, sig)?.seq(&cmd_tape(gamma, body, sig)?).expect(ok);
            sugar::star(&step).expect(ok).seq(&guard(gamma, &p.negate(), sig)?).expect(ok)
        }
        Cmd::Assign(x, e) => {
            let k = gamma.position(x).ok_or_else(|| ImpError::UnboundVariable(x.clone()))?;
            let g = gamma.monomial();
            let f = g.factors();
            let before = Monomial::new(f[..k].to_vec());
            let after = Monomial::new(f[k + 1..].to_vec());
            let copy = ctensor_all(&[circuit_copier(&before), Circuit::id_sort(&f[k]), circuit_copier(&after)]);
            let body = ctensor(&ctensor(&circuit_id(&before), &expr_circuit(gamma, e, sig)?), &circuit_id(&after));
            Tape::embed(&copy.seq(&body).expect(ok))
        }
    })
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Punct(&'static str),
}

const PUNCT: &[&str] = &[":=", "&&", "||", "(", ")", ",", ";", "!", ":"];
const KEYWORDS: &[&str] = &["skip", "abort", "if", "then", "else", "end", "while", "do", "true", "false"];

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ImpError> {
    let mut out = Vec::new();
    let mut i = 0;
    let bytes = src.as_bytes();
    while i < src.len() {
        let c = src[i..].chars().next().expect("in bounds");
        if c.is_whitespace() {
            i += c.len_utf8();
        } else if c == '#' {
            i = src[i..].find('\n').map_or(src.len(), |k| i + k);
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < src.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if let Some(p) = PUNCT.iter().find(|p| src[i..].starts_with(**p)) {
            out.push((i, Tok::Punct(p)));
            i += p.len();
        } else {
            return Err(ImpError::Syntax { pos: i, msg: format!("unexpected `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser, ImpError> {
        Ok(Parser { toks: lex(src)?, at: 0, end: src.len() })
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ImpError> {
        let msg = msg.into();
        let msg = if self.at >= self.toks.len() { format!("{msg} at end of input") } else { msg };
        Err(ImpError::Syntax { pos: self.pos(), msg })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == k)
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), ImpError> {
        if self.is_punct(p) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected `{p}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<(), ImpError> {
        if self.is_kw(k) {
            self.at += 1;
            Ok(())
        } else {
            self.err(format!("expected `{k}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ImpError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn finish(&self) -> Result<(), ImpError> {
        if self.at < self.toks.len() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }

    fn args(&mut self) -> Result<Vec<Expr>, ImpError> {
        self.expect_punct("(")?;
        let mut args = Vec::new();
        if !self.is_punct(")") {
            loop {
                args.push(self.expr()?);
                if !self.is_punct(",") {
                    break;
                }
                self.at += 1;
            }
        }
        self.expect_punct(")")?;
        Ok(args)
    }

    fn expr(&mut self) -> Result<Expr, ImpError> {
        let name = self.ident()?;
        if self.is_punct("(") {
            Ok(Expr::App(name, self.args()?))
        } else {
            Ok(Expr::Var(name))
        }
    }

    fn pred(&mut self) -> Result<Pred, ImpError> {
        let mut acc = self.conj()?;
        while self.is_punct("||") {
            self.at += 1;
            acc = Pred::or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Pred, ImpError> {
        let mut acc = self.pred_atom()?;
        while self.is_punct("&&") {
            self.at += 1;
            acc = Pred::and(acc, self.pred_atom()?);
        }
        Ok(acc)
    }

    fn pred_atom(&mut self) -> Result<Pred, ImpError> {
        if self.is_punct("(") {
            self.at += 1;
            let p = self.pred()?;
            self.expect_punct(")")?;
            return Ok(p);
        }
        if self.is_kw("true") || self.is_kw("false") {
            let v = self.is_kw("true");
            self.at += 1;
            return Ok(if v { Pred::True } else { Pred::False });
        }
        let negated = self.is_punct("!");
        if negated {
            self.at += 1;
        }
        let r = self.ident()?;
        let args = if self.is_punct("(") { self.args()? } else { Vec::new() };
        Ok(if negated { Pred::NAtom(r, args) } else { Pred::Atom(r, args) })
    }

    fn cmd(&mut self) -> Result<Cmd, ImpError> {
        let mut acc = self.cmd_atom()?;
        while self.is_punct(";") {
            self.at += 1;
            acc = Cmd::seq(acc, self.cmd_atom()?);
        }
        Ok(acc)
    }

    fn cmd_atom(&mut self) -> Result<Cmd, ImpError> {
        if self.is_punct("(") {
            self.at += 1;
            let c = self.cmd()?;
            self.expect_punct(")")?;
            return Ok(c);
        }
        for (kw, c) in [("skip", Cmd::Skip), ("abort", Cmd::Abort)] {
            if self.is_kw(kw) {
                self.at += 1;
                return Ok(c);
            }
        }
        if self.is_kw("if") {
            self.at += 1;
            let p = self.pred()?;
            self.expect_kw("then")?;
            let a = self.cmd()?;
            self.expect_kw("else")?;
            let b = self.cmd()?;
            self.expect_kw("end")?;
            return Ok(Cmd::if_(p, a, b));
        }
        if self.is_kw("while") {
            self.at += 1;
            let p = self.pred()?;
            self.expect_kw("do")?;
            let body = self.cmd()?;
            self.expect_kw("end")?;
            return Ok(Cmd::while_(p, body));
        }
        let x = self.ident()?;
        self.expect_punct(":=")?;
        Ok(Cmd::Assign(x, self.expr()?))
    }

    fn context(&mut self) -> Result<Context, ImpError> {
        let mut vars = Vec::new();
        if self.at < self.toks.len() {
            loop {
                let x = self.ident()?;
                self.expect_punct(":")?;
                let s = self.ident()?;
                vars.push((x, Sort::new(&s)));
                if !self.is_punct(",") {
                    break;
                }
                self.at += 1;
            }
        }
        Context::new(vars)
    }
}

/// Parses a command: `skip`, `abort`, `x := e`, `c1; c2`,
/// `if P then c1 else c2 end`, `while P do c end`, parentheses for grouping.
pub fn parse_program(text: &str) -> Result<Cmd, ImpError> {
    let mut p = Parser::new(text)?;
    let c = p.cmd()?;
    p.finish()?;
    Ok(c)
}

/// Parses a predicate: `R(e, …)`, `!R(e, …)`, `true`, `false`, `P && Q`,
/// `P || Q`, with `&&` binding tighter than `||`.
pub fn parse_pred(text: &str) -> Result<Pred, ImpError> {
    let mut p = Parser::new(text)?;
    let q = p.pred()?;
    p.finish()?;
    Ok(q)
}

pub fn parse_expr(text: &str) -> Result<Expr, ImpError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses `x:A, y:B`; duplicate variables are rejected.
pub fn parse_context(text: &str) -> Result<Context, ImpError> {
    let mut p = Parser::new(text)?;
    let c = p.context()?;
    p.finish()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{check_theory, eval};
    use crate::rel::Carrier;

    /// Sort `A` of size `n` with `s = +1 mod n`, `z = 0`, and predicates
    /// `eqK(x) ⇔ x = K`.
    fn zn(n: usize) -> (ProgramSignature, Interpretation) {
        let mut sig = Signature::new();
        sig.add_sort(Sort::new("A"));
        let a = Monomial::of(&["A"]);
        sig.add_symbol("s", a.clone(), a.clone()).unwrap();
        sig.add_symbol("z", Monomial::unit(), a.clone()).unwrap();
        for k in 0..3 {
            sig.add_symbol(&format!("eq{k}"), a.clone(), Monomial::unit()).unwrap();
        }
        let psig = ProgramSignature::from_signature(&sig).unwrap();
        let mut i = Interpretation::with_sizes(psig.signature(), &[("A", n)]).unwrap();
        let c = Carrier::of_sort("A", n);
        i.set("s", FinRel::graph(&c, &c, |x| (x + 1) % n)).unwrap();
        i.set("z", FinRel::graph(&Carrier::one(), &c, |_| 0)).unwrap();
        for k in 0..3 {
            let r = FinRel::from_pairs(&c, &Carrier::one(), (k < n).then_some((k, 0))).unwrap();
            i.set(&format!("eq{k}"), r).unwrap();
        }
        let i = psig.complete(&i).unwrap();
        (psig, i)
    }

    #[test]
    fn parsing() {
        assert_eq!(
            parse_program("x := f(x,y); skip").unwrap(),
            Cmd::seq(Cmd::assign("x", Expr::app("f", vec![Expr::var("x"), Expr::var("y")])), Cmd::Skip)
        );
        assert_eq!(
            parse_program("while eq0(x) do y := s(y) end").unwrap(),
            Cmd::while_(
                Pred::atom("eq0", vec![Expr::var("x")]),
                Cmd::assign("y", Expr::app("s", vec![Expr::var("y")]))
            )
        );
        let e = parse_program("if p then skip end").unwrap_err();
        assert!(matches!(e, ImpError::Syntax { ref msg, .. } if msg.contains("else")), "{e}");
        assert_eq!(
            parse_pred("a || b && !c(x)").unwrap(),
            Pred::or(
                Pred::atom("a", vec![]),
                Pred::and(Pred::atom("b", vec![]), Pred::NAtom("c".into(), vec![Expr::var("x")]))
            )
        );
        assert!(matches!(parse_context("x:A, x:B"), Err(ImpError::DuplicateVariable(_))));
        for src in [
            "x := s(x); y := x; skip",
            "x := s(x); (y := x; skip)",
            "if a() || b() && c() then abort else while true do skip end end",
        ] {
            let c = parse_program(src).unwrap();
            assert_eq!(parse_program(&c.to_string()).unwrap(), c);
        }
    }

    #[test]
    fn typing() {
        let (psig, _) = zn(2);
        let g = Context::of(&[("x", "A")]);
        assert!(typecheck_cmd(&g, &parse_program("x := s(x)").unwrap(), &psig).is_ok());
        assert_eq!(
            typecheck_cmd(&g, &parse_program("y := x").unwrap(), &psig),
            Err(ImpError::UnboundVariable("y".into()))
        );
        assert!(matches!(
            typecheck_pred(&g, &parse_pred("eq0(x, x)").unwrap(), &psig),
            Err(ImpError::ArityMismatch { expected: 1, found: 2, .. })
        ));
        assert!(psig.signature().symbol("!eq0").is_some());
    }

    #[test]
    fn encodings_have_expected_types() {
        let (psig, i) = zn(3);
        let g = Context::of(&[("x", "A"), ("y", "A")]);
        let skip = encode_cmd(&g, &Cmd::Skip, &psig).unwrap();
        assert_eq!(skip, sugar::id(&g.polynomial()));
        let f = encode_pred(&g, &Pred::False, &psig).unwrap();
        assert_eq!(f.cod(), &Polynomial::one());
        assert!(eval(&f, &i).unwrap().is_empty());
        let abort = encode_cmd(&g, &Cmd::Abort, &psig).unwrap();
        assert!(eval(&abort, &i).unwrap().is_empty());
    }

    #[test]
    fn assignments_commute_to_same_relation() {
        let mut sig = Signature::new();
        sig.add_sort(Sort::new("A"));
        let psig = ProgramSignature::from_signature(&sig).unwrap();
        let i = Interpretation::with_sizes(psig.signature(), &[("A", 2)]).unwrap();
        let g = Context::of(&[("x", "A"), ("y", "A"), ("z", "A")]);
        let a = eval(&encode_cmd(&g, &parse_program("x := z; y := z").unwrap(), &psig).unwrap(), &i).unwrap();
        let b = eval(&encode_cmd(&g, &parse_program("y := z; x := z").unwrap(), &psig).unwrap(), &i).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 8);
        for (s, t) in a.pairs() {
            let (_, st) = a.dom().decode(s);
            assert_eq!(a.cod().decode(t).1, vec![st[2]; 3]);
        }
    }

    #[test]
    fn coreflexive_and_image() {
        let (psig, i) = zn(2);
        let g = Context::of(&[("x", "A")]);
        let p = encode_pred(&g, &parse_pred("eq0(x)").unwrap(), &psig).unwrap();
        let c = coreflexive(&p).unwrap();
        assert_eq!(eval(&c, &i).unwrap().show(), "{(0,0)}");
        assert_eq!(eval(&image(&c).unwrap(), &i).unwrap(), eval(&p, &i).unwrap());
        let q = parse_pred("eq0(x) && !eq1(s(x)) || true").unwrap();
        assert_eq!(q.negate().negate(), q);
    }

    #[test]
    fn substitution_lemma_instance() {
        let (psig, i) = zn(3);
        let g = Context::of(&[("x", "A")]);
        let p = parse_pred("eq0(x)").unwrap();
        let t = parse_expr("s(x)").unwrap();
        let lhs = encode_pred(&g, &substitute_pred(&g, &p, &t, "x", &psig).unwrap(), &psig).unwrap();
        let rhs = encode_cmd(&g, &Cmd::Assign("x".into(), t.clone()), &psig)
            .unwrap()
            .seq(&encode_pred(&g, &p, &psig).unwrap())
            .unwrap();
        let l = eval(&lhs, &i).unwrap();
        assert_eq!(l, eval(&rhs, &i).unwrap());
        assert_eq!(l.show(), "{(2,•)}");
        assert_eq!(Expr::var("x").substitute(&t, "x"), t);
        assert_eq!(Expr::var("y").substitute(&t, "x"), Expr::var("y"));
    }

    #[test]
    fn theory_agrees_with_direct_model_check() {
        let (psig, i) = zn(3);
        assert!(psig.check_model(&i).is_ok());
        assert!(check_theory(&psig.theory(), &i).unwrap().is_holds());
        let mut bad = i.clone();
        let c = Carrier::of_sort("A", 3);
        bad.set("s", FinRel::from_pairs(&c, &c, [(0, 1), (0, 2), (1, 1), (2, 2)]).unwrap()).unwrap();
        assert_eq!(psig.check_model(&bad).unwrap_err().symbol, "s");
        assert!(!check_theory(&psig.theory(), &bad).unwrap().is_holds());
    }
}
