//! The two-layer term grammar: circuits (the ⊗ layer, typed by monomials)
//! and tapes (the ⊕ layer, typed by polynomials).
//!
//! Every node caches its type, computed when the node is built; the checked
//! constructors refuse to build ill-typed nodes.

use std::fmt;
use std::sync::Arc;

use crate::error::TypeError;
use crate::poly::{Monomial, Polynomial, Signature, Sort};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum CircuitKind {
    IdSort(Sort),
    IdUnit,
    Generator(String),
    Symmetry(Sort, Sort),
    Seq(Circuit, Circuit),
    Tensor(Circuit, Circuit),
    Discharger(Sort),
    Copier(Sort),
    Codischarger(Sort),
    Cocopier(Sort),
}

#[derive(PartialEq, Eq, Hash, Debug)]
struct CircuitNode {
    kind: CircuitKind,
    dom: Monomial,
    cod: Monomial,
}

/// A circuit term `c : U → V`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Circuit(Arc<CircuitNode>);

impl Circuit {
    fn node(kind: CircuitKind, dom: Monomial, cod: Monomial) -> Circuit {
        Circuit(Arc::new(CircuitNode { kind, dom, cod }))
    }

    pub fn kind(&self) -> &CircuitKind {
        &self.0.kind
    }

    pub fn dom(&self) -> &Monomial {
        &self.0.dom
    }

    pub fn cod(&self) -> &Monomial {
        &self.0.cod
    }

    pub fn id_sort(a: &Sort) -> Circuit {
        let m = Monomial::from(a.clone());
        Circuit::node(CircuitKind::IdSort(a.clone()), m.clone(), m)
    }

    pub fn id_unit() -> Circuit {
        Circuit::node(CircuitKind::IdUnit, Monomial::unit(), Monomial::unit())
    }

    /// A generator with an explicitly stated type; `typecheck` later compares
    /// it against a signature.
    pub fn generator(name: &str, dom: Monomial, cod: Monomial) -> Circuit {
        Circuit::node(CircuitKind::Generator(name.to_string()), dom, cod)
    }

    /// A generator typed from its declaration in `sig`.
    pub fn symbol(sig: &Signature, name: &str) -> Result<Circuit, TypeError> {
        let (d, c) = sig.symbol(name).ok_or_else(|| TypeError::UnknownSymbol(name.to_string()))?;
        Ok(Circuit::generator(name, d.clone(), c.clone()))
    }

    pub fn symmetry(a: &Sort, b: &Sort) -> Circuit {
        Circuit::node(
            CircuitKind::Symmetry(a.clone(), b.clone()),
            Monomial::new(vec![a.clone(), b.clone()]),
            Monomial::new(vec![b.clone(), a.clone()]),
        )
    }

    pub fn seq(&self, next: &Circuit) -> Result<Circuit, TypeError> {
        if self.cod() != next.dom() {
            return Err(TypeError::CompositionMismatch { left: self.cod().to_string(), right: next.dom().to_string() });
        }
        Ok(Circuit::node(CircuitKind::Seq(self.clone(), next.clone()), self.dom().clone(), next.cod().clone()))
    }

    pub fn tensor(&self, other: &Circuit) -> Circuit {
        Circuit::node(
            CircuitKind::Tensor(self.clone(), other.clone()),
            self.dom().concat(other.dom()),
            self.cod().concat(other.cod()),
        )
    }

    pub fn discharger(a: &Sort) -> Circuit {
        Circuit::node(CircuitKind::Discharger(a.clone()), a.clone().into(), Monomial::unit())
    }

    pub fn copier(a: &Sort) -> Circuit {
        Circuit::node(CircuitKind::Copier(a.clone()), a.clone().into(), Monomial::new(vec![a.clone(), a.clone()]))
    }

    pub fn codischarger(a: &Sort) -> Circuit {
        Circuit::node(CircuitKind::Codischarger(a.clone()), Monomial::unit(), a.clone().into())
    }

    pub fn cocopier(a: &Sort) -> Circuit {
        Circuit::node(CircuitKind::Cocopier(a.clone()), Monomial::new(vec![a.clone(), a.clone()]), a.clone().into())
    }
}

impl fmt::Debug for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::sexpr::dump_circuit(self))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum TapeKind {
    IdMonomial(Monomial),
    IdZero,
    Embed(Circuit),
    SymmetryPlus(Monomial, Monomial),
    Seq(Tape, Tape),
    Sum(Tape, Tape),
    Bang(Monomial),
    Diag(Monomial),
    Cobang(Monomial),
    Codiag(Monomial),
    Trace(Monomial, Tape),
}

#[derive(PartialEq, Eq, Hash, Debug)]
struct TapeNode {
    kind: TapeKind,
    dom: Polynomial,
    cod: Polynomial,
}

/// A tape term `t : P → Q`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tape(Arc<TapeNode>);

impl Tape {
    fn node(kind: TapeKind, dom: Polynomial, cod: Polynomial) -> Tape {
        Tape(Arc::new(TapeNode { kind, dom, cod }))
    }

    pub fn kind(&self) -> &TapeKind {
        &self.0.kind
    }

    pub fn dom(&self) -> &Polynomial {
        &self.0.dom
    }

    pub fn cod(&self) -> &Polynomial {
        &self.0.cod
    }

    pub fn id_monomial(u: &Monomial) -> Tape {
        Tape::node(TapeKind::IdMonomial(u.clone()), u.clone().into(), u.clone().into())
    }

    pub fn id_zero() -> Tape {
        Tape::node(TapeKind::IdZero, Polynomial::zero(), Polynomial::zero())
    }

    pub fn embed(c: &Circuit) -> Tape {
        Tape::node(TapeKind::Embed(c.clone()), c.dom().clone().into(), c.cod().clone().into())
    }

    pub fn symmetry_plus(u: &Monomial, v: &Monomial) -> Tape {
        Tape::node(
            TapeKind::SymmetryPlus(u.clone(), v.clone()),
            Polynomial::new(vec![u.clone(), v.clone()]),
            Polynomial::new(vec![v.clone(), u.clone()]),
        )
    }

    pub fn seq(&self, next: &Tape) -> Result<Tape, TypeError> {
        if self.cod() != next.dom() {
            return Err(TypeError::CompositionMismatch { left: self.cod().to_string(), right: next.dom().to_string() });
        }
        Ok(Tape::node(TapeKind::Seq(self.clone(), next.clone()), self.dom().clone(), next.cod().clone()))
    }

    pub fn sum(&self, other: &Tape) -> Tape {
        Tape::node(TapeKind::Sum(self.clone(), other.clone()), self.dom().sum(other.dom()), self.cod().sum(other.cod()))
    }

    pub fn bang(u: &Monomial) -> Tape {
        Tape::node(TapeKind::Bang(u.clone()), u.clone().into(), Polynomial::zero())
    }

    pub fn cobang(u: &Monomial) -> Tape {
        Tape::node(TapeKind::Cobang(u.clone()), Polynomial::zero(), u.clone().into())
    }

    pub fn diag(u: &Monomial) -> Tape {
        Tape::node(TapeKind::Diag(u.clone()), u.clone().into(), Polynomial::new(vec![u.clone(), u.clone()]))
    }

    pub fn codiag(u: &Monomial) -> Tape {
        Tape::node(TapeKind::Codiag(u.clone()), Polynomial::new(vec![u.clone(), u.clone()]), u.clone().into())
    }

    /// `tr_U t` for `t : U ⊕ P → U ⊕ Q`; the traced summand is the first one.
    pub fn trace(u: &Monomial, body: &Tape) -> Result<Tape, TypeError> {
        let (dom, cod) = trace_type(u, body.dom(), body.cod())?;
        Ok(Tape::node(TapeKind::Trace(u.clone(), body.clone()), dom, cod))
    }

    /// Number of nodes, counting shared subterms once per occurrence.
    pub fn size(&self) -> usize {
        match self.kind() {
            TapeKind::Embed(c) => 1 + circuit_size(c),
            TapeKind::Seq(a, b) | TapeKind::Sum(a, b) => 1 + a.size() + b.size(),
            TapeKind::Trace(_, t) => 1 + t.size(),
            _ => 1,
        }
    }
}

fn circuit_size(c: &Circuit) -> usize {
    match c.kind() {
        CircuitKind::Seq(a, b) | CircuitKind::Tensor(a, b) => 1 + circuit_size(a) + circuit_size(b),
        _ => 1,
    }
}

impl fmt::Debug for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::sexpr::dump_tape(self))
    }
}

fn trace_type(u: &Monomial, dom: &Polynomial, cod: &Polynomial) -> Result<(Polynomial, Polynomial), TypeError> {
    let prefix = Polynomial::from(u.clone());
    if !dom.starts_with(&prefix) || !cod.starts_with(&prefix) {
        return Err(TypeError::TraceShapeMismatch {
            traced: u.to_string(),
            dom: dom.to_string(),
            cod: cod.to_string(),
        });
    }
    Ok((dom.split_at(1).1, cod.split_at(1).1))
}

/// Either layer of the grammar, for operations that accept both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Circuit(Circuit),
    Tape(Tape),
}

impl Term {
    /// The term viewed as a tape (circuits are embedded).
    pub fn into_tape(self) -> Tape {
        match self {
            Term::Circuit(c) => Tape::embed(&c),
            Term::Tape(t) => t,
        }
    }
}

fn check_sort(sig: &Signature, s: &Sort) -> Result<(), TypeError> {
    if sig.has_sort(s) {
        Ok(())
    } else {
        Err(TypeError::UnknownSort(s.name().to_string()))
    }
}

fn check_monomial(sig: &Signature, u: &Monomial) -> Result<(), TypeError> {
    u.factors().iter().try_for_each(|s| check_sort(sig, s))
}

/// Re-derives the type of a circuit from the typing rules, checking every
/// generator against `sig`.
pub fn typecheck_circuit(c: &Circuit, sig: &Signature) -> Result<(Monomial, Monomial), TypeError> {
    let derived = match c.kind() {
        CircuitKind::IdSort(a) => {
            check_sort(sig, a)?;
            (a.clone().into(), a.clone().into())
        }
        CircuitKind::IdUnit => (Monomial::unit(), Monomial::unit()),
        CircuitKind::Generator(name) => {
            let (d, k) = sig.symbol(name).ok_or_else(|| TypeError::UnknownSymbol(name.clone()))?;
            if d != c.dom() || k != c.cod() {
                return Err(TypeError::SymbolType {
                    name: name.clone(),
                    used: format!("{} → {}", c.dom(), c.cod()),
                    declared: format!("{d} → {k}"),
                });
            }
            (d.clone(), k.clone())
        }
        CircuitKind::Symmetry(a, b) => {
            check_sort(sig, a)?;
            check_sort(sig, b)?;
            (Monomial::new(vec![a.clone(), b.clone()]), Monomial::new(vec![b.clone(), a.clone()]))
        }
        CircuitKind::Seq(l, r) => {
            let (d, m1) = typecheck_circuit(l, sig)?;
            let (m2, k) = typecheck_circuit(r, sig)?;
            if m1 != m2 {
                return Err(TypeError::CompositionMismatch { left: m1.to_string(), right: m2.to_string() });
            }
            (d, k)
        }
        CircuitKind::Tensor(l, r) => {
            let (d1, k1) = typecheck_circuit(l, sig)?;
            let (d2, k2) = typecheck_circuit(r, sig)?;
            (d1.concat(&d2), k1.concat(&k2))
        }
        CircuitKind::Discharger(a)
        | CircuitKind::Copier(a)
        | CircuitKind::Codischarger(a)
        | CircuitKind::Cocopier(a) => {
            check_sort(sig, a)?;
            (c.dom().clone(), c.cod().clone())
        }
    };
    debug_assert_eq!((&derived.0, &derived.1), (c.dom(), c.cod()));
    Ok(derived)
}

/// Re-derives the type of a tape from the typing rules.
pub fn typecheck_tape(t: &Tape, sig: &Signature) -> Result<(Polynomial, Polynomial), TypeError> {
    let derived = match t.kind() {
        TapeKind::IdMonomial(u) => {
            check_monomial(sig, u)?;
            (u.clone().into(), u.clone().into())
        }
        TapeKind::IdZero => (Polynomial::zero(), Polynomial::zero()),
        TapeKind::Embed(c) => {
            let (d, k) = typecheck_circuit(c, sig)?;
            (d.into(), k.into())
        }
        TapeKind::SymmetryPlus(u, v) => {
            check_monomial(sig, u)?;
            check_monomial(sig, v)?;
            (t.dom().clone(), t.cod().clone())
        }
        TapeKind::Seq(l, r) => {
            let (d, m1) = typecheck_tape(l, sig)?;
            let (m2, k) = typecheck_tape(r, sig)?;
            if m1 != m2 {
                return Err(TypeError::CompositionMismatch { left: m1.to_string(), right: m2.to_string() });
            }
            (d, k)
        }
        TapeKind::Sum(l, r) => {
            let (d1, k1) = typecheck_tape(l, sig)?;
            let (d2, k2) = typecheck_tape(r, sig)?;
            (d1.sum(&d2), k1.sum(&k2))
        }
        TapeKind::Bang(u) | TapeKind::Diag(u) | TapeKind::Cobang(u) | TapeKind::Codiag(u) => {
            check_monomial(sig, u)?;
            (t.dom().clone(), t.cod().clone())
        }
        TapeKind::Trace(u, body) => {
            let (d, k) = typecheck_tape(body, sig)?;
            trace_type(u, &d, &k)?
        }
    };
    debug_assert_eq!((&derived.0, &derived.1), (t.dom(), t.cod()));
    Ok(derived)
}

/// Typechecks either layer; circuits report their monomial types as
/// single-summand polynomials.
pub fn typecheck(term: &Term, sig: &Signature) -> Result<(Polynomial, Polynomial), TypeError> {
    match term {
        Term::Circuit(c) => typecheck_circuit(c, sig).map(|(d, k)| (d.into(), k.into())),
        Term::Tape(t) => typecheck_tape(t, sig),
    }
}

/// Collects the signature implied by the generators occurring in a tape.
pub fn implied_signature(t: &Tape) -> Result<Signature, TypeError> {
    let mut sig = Signature::new();
    collect_tape(t, &mut sig)?;
    Ok(sig)
}

fn add_sorts(sig: &mut Signature, u: &Monomial) {
    for s in u.factors() {
        sig.add_sort(s.clone());
    }
}

fn collect_circuit(c: &Circuit, sig: &mut Signature) -> Result<(), TypeError> {
    add_sorts(sig, c.dom());
    add_sorts(sig, c.cod());
    match c.kind() {
        CircuitKind::Generator(name) => sig.add_symbol(name, c.dom().clone(), c.cod().clone()),
        CircuitKind::Seq(a, b) | CircuitKind::Tensor(a, b) => {
            collect_circuit(a, sig)?;
            collect_circuit(b, sig)
        }
        _ => Ok(()),
    }
}

fn collect_tape(t: &Tape, sig: &mut Signature) -> Result<(), TypeError> {
    for u in t.dom().summands().iter().chain(t.cod().summands()) {
        add_sorts(sig, u);
    }
    match t.kind() {
        TapeKind::Embed(c) => collect_circuit(c, sig),
        TapeKind::Seq(a, b) | TapeKind::Sum(a, b) => {
            collect_tape(a, sig)?;
            collect_tape(b, sig)
        }
        TapeKind::Trace(u, b) => {
            add_sorts(sig, u);
            collect_tape(b, sig)
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut s = Signature::new();
        s.add_sort(Sort::new("A"));
        s.add_sort(Sort::new("B"));
        s.add_symbol("f", Monomial::of(&["A"]), Monomial::of(&["B"])).unwrap();
        s
    }

    #[test]
    fn identity_rule() {
        let ab = Monomial::of(&["A", "B"]);
        let t = Tape::id_monomial(&ab);
        assert_eq!(typecheck(&Term::Tape(t), &sig()).unwrap(), (ab.clone().into(), ab.into()));
    }

    #[test]
    fn seq_mismatch() {
        let a = Sort::new("A");
        let b = Sort::new("B");
        let err = Circuit::id_sort(&a).seq(&Circuit::id_sort(&b)).unwrap_err();
        assert!(matches!(err, TypeError::CompositionMismatch { .. }));
    }

    #[test]
    fn trace_rule() {
        let u = Monomial::of(&["A"]);
        let p = Monomial::of(&["B"]);
        let body = Tape::symmetry_plus(&u, &p).seq(&Tape::symmetry_plus(&p, &u)).unwrap();
        let tr = Tape::trace(&u, &body).unwrap();
        assert_eq!(tr.dom(), &Polynomial::from(p.clone()));
        assert_eq!(typecheck_tape(&tr, &sig()).unwrap().1, Polynomial::from(p.clone()));
        // σ⊕_{A,B} : A⊕B → B⊕A does not have A as its first output summand
        let bad = Tape::trace(&u, &Tape::symmetry_plus(&u, &p)).unwrap_err();
        assert!(matches!(bad, TypeError::TraceShapeMismatch { .. }));
    }

    #[test]
    fn unknown_symbol() {
        let g = Circuit::generator("g", Monomial::of(&["A"]), Monomial::of(&["A"]));
        assert_eq!(typecheck_circuit(&g, &sig()), Err(TypeError::UnknownSymbol("g".into())));
        let f = Circuit::generator("f", Monomial::of(&["A"]), Monomial::of(&["A"]));
        assert!(matches!(typecheck_circuit(&f, &sig()), Err(TypeError::SymbolType { .. })));
    }
}
