//! Objects of the free rig category: sorts, monomials (words of sorts) and
//! polynomials (words of monomials).
//!
//! `⊕` on polynomials is list concatenation and `⊗` is the right-strict
//! product: `(⊕ᵢ Uᵢ) ⊗ (⊕ⱼ Vⱼ) = ⊕ᵢ ⊕ⱼ UᵢVⱼ`, enumerated i-major. No
//! reordering or normalization is ever applied implicitly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::TypeError;

/// A basic sort (generating object).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(Arc<str>);

impl Sort {
    pub fn new(name: &str) -> Sort {
        assert!(!name.is_empty(), "sort names are nonempty");
        Sort(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A word over sorts; the empty word is the unit `1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<Sort>);

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn new(factors: Vec<Sort>) -> Monomial {
        Monomial(factors)
    }

    /// Builds a monomial from sort names, e.g. `Monomial::of(&["A", "B"])`.
    pub fn of(names: &[&str]) -> Monomial {
        Monomial(names.iter().map(|n| Sort::new(n)).collect())
    }

    pub fn factors(&self) -> &[Sort] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation `UV`.
    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Monomial(v)
    }

    /// Splits off the first factor: `AU' ↦ (A, U')`.
    pub fn split_first(&self) -> Option<(Sort, Monomial)> {
        self.0.split_first().map(|(a, rest)| (a.clone(), Monomial(rest.to_vec())))
    }
}

impl From<Sort> for Monomial {
    fn from(s: Sort) -> Self {
        Monomial(vec![s])
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("⊗")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// A word of monomials; the empty word is the zero object `0`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Polynomial(Vec<Monomial>);

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial(Vec::new())
    }

    pub fn one() -> Polynomial {
        Polynomial(vec![Monomial::unit()])
    }

    pub fn new(summands: Vec<Monomial>) -> Polynomial {
        Polynomial(summands)
    }

    pub fn summands(&self) -> &[Monomial] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The single summand, if this polynomial is a monomial.
    pub fn as_monomial(&self) -> Option<&Monomial> {
        match self.0.as_slice() {
            [u] => Some(u),
            _ => None,
        }
    }

    /// `P ⊕ Q`: concatenation.
    pub fn sum(&self, other: &Polynomial) -> Polynomial {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Polynomial(v)
    }

    /// `P ⊗ Q`, i-major.
    pub fn product(&self, other: &Polynomial) -> Polynomial {
        let mut v = Vec::with_capacity(self.0.len() * other.0.len());
        for u in &self.0 {
            for w in &other.0 {
                v.push(u.concat(w));
            }
        }
        Polynomial(v)
    }

    /// `(U ⊕ P')` ↦ `(U, P')`.
    pub fn split_first(&self) -> Option<(Monomial, Polynomial)> {
        self.0.split_first().map(|(u, rest)| (u.clone(), Polynomial(rest.to_vec())))
    }

    /// Splits after the first `k` summands.
    pub fn split_at(&self, k: usize) -> (Polynomial, Polynomial) {
        let (a, b) = self.0.split_at(k);
        (Polynomial(a.to_vec()), Polynomial(b.to_vec()))
    }

    /// `true` if `prefix` is a list prefix of `self`.
    pub fn starts_with(&self, prefix: &Polynomial) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.0.iter().flat_map(|u| u.0.iter())
    }
}

impl From<Monomial> for Polynomial {
    fn from(u: Monomial) -> Self {
        Polynomial(vec![u])
    }
}

impl From<Sort> for Polynomial {
    fn from(s: Sort) -> Self {
        Polynomial(vec![Monomial::from(s)])
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, u) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ⊕ ")?;
            }
            write!(f, "{u}")?;
        }
        Ok(())
    }
}

/// A monoidal signature: sorts plus symbols typed by monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: BTreeSet<Sort>,
    symbols: BTreeMap<String, (Monomial, Monomial)>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn add_sort(&mut self, s: Sort) {
        self.sorts.insert(s);
    }

    /// Declares a symbol; all sorts in its type must already be declared.
    pub fn add_symbol(&mut self, name: &str, arity: Monomial, coarity: Monomial) -> Result<(), TypeError> {
        for s in arity.factors().iter().chain(coarity.factors()) {
            if !self.sorts.contains(s) {
                return Err(TypeError::UnknownSort(s.name().to_string()));
            }
        }
        if let Some(prev) = self.symbols.get(name) {
            if prev != &(arity.clone(), coarity.clone()) {
                return Err(TypeError::ConflictingSymbol(name.to_string()));
            }
        }
        self.symbols.insert(name.to_string(), (arity, coarity));
        Ok(())
    }

    pub fn sorts(&self) -> &BTreeSet<Sort> {
        &self.sorts
    }

    pub fn symbols(&self) -> &BTreeMap<String, (Monomial, Monomial)> {
        &self.symbols
    }

    pub fn symbol(&self, name: &str) -> Option<&(Monomial, Monomial)> {
        self.symbols.get(name)
    }

    pub fn has_sort(&self, s: &Sort) -> bool {
        self.sorts.contains(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(ms: &[&[&str]]) -> Polynomial {
        Polynomial::new(ms.iter().map(|m| Monomial::of(m)).collect())
    }

    #[test]
    fn product_is_i_major() {
        let l = p(&[&["A"], &["B"]]);
        let r = p(&[&["C"], &["D"]]);
        assert_eq!(l.product(&r), p(&[&["A", "C"], &["A", "D"], &["B", "C"], &["B", "D"]]));
    }

    #[test]
    fn units_and_annihilator() {
        let x = p(&[&["A", "B"], &[], &["C"]]);
        assert_eq!(x.product(&Polynomial::one()), x);
        assert_eq!(Polynomial::one().product(&x), x);
        assert_eq!(x.product(&Polynomial::zero()), Polynomial::zero());
        assert_eq!(Polynomial::zero().product(&x), Polynomial::zero());
        assert_eq!(x.sum(&Polynomial::zero()), x);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[&["A", "B"], &[]]).to_string(), "A⊗B ⊕ 1");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }

    #[test]
    fn symbol_sorts_must_be_declared() {
        let mut sig = Signature::new();
        sig.add_sort(Sort::new("A"));
        assert!(sig.add_symbol("f", Monomial::of(&["A"]), Monomial::of(&["A"])).is_ok());
        assert_eq!(
            sig.add_symbol("g", Monomial::of(&["B"]), Monomial::unit()),
            Err(TypeError::UnknownSort("B".into()))
        );
    }
}
