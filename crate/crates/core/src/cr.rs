//! The calculus of relations: expressions over one sort, a concrete
//! syntax, a direct semantics, and the encoding into tapes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::error::EvalError;
use crate::eval::Interpretation;
use crate::poly::{Monomial, Polynomial, Signature, Sort};
use crate::rel::{Carrier, FinRel};
use crate::sugar;
use crate::term::{Circuit, Tape};

/// The single sort of the calculus.
pub const CR_SORT: &str = "A";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CrExpr {
    Sym(String),
    Id,
    Top,
    Bot,
    Seq(Box<CrExpr>, Box<CrExpr>),
    Meet(Box<CrExpr>, Box<CrExpr>),
    Join(Box<CrExpr>, Box<CrExpr>),
    Converse(Box<CrExpr>),
    Star(Box<CrExpr>),
}

impl CrExpr {
    pub fn sym(name: &str) -> CrExpr {
        CrExpr::Sym(name.to_string())
    }

    pub fn seq(a: CrExpr, b: CrExpr) -> CrExpr {
        CrExpr::Seq(Box::new(a), Box::new(b))
    }

    pub fn meet(a: CrExpr, b: CrExpr) -> CrExpr {
        CrExpr::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: CrExpr, b: CrExpr) -> CrExpr {
        CrExpr::Join(Box::new(a), Box::new(b))
    }

    pub fn converse(a: CrExpr) -> CrExpr {
        CrExpr::Converse(Box::new(a))
    }

    pub fn star(a: CrExpr) -> CrExpr {
        CrExpr::Star(Box::new(a))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            CrExpr::Sym(_) | CrExpr::Id | CrExpr::Top | CrExpr::Bot => 1,
            CrExpr::Converse(a) | CrExpr::Star(a) => 1 + a.size(),
            CrExpr::Seq(a, b) | CrExpr::Meet(a, b) | CrExpr::Join(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            CrExpr::Sym(s) => {
                out.insert(s.clone());
            }
            CrExpr::Id | CrExpr::Top | CrExpr::Bot => {}
            CrExpr::Converse(a) | CrExpr::Star(a) => a.collect(out),
            CrExpr::Seq(a, b) | CrExpr::Meet(a, b) | CrExpr::Join(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            CrExpr::Join(..) => 0,
            CrExpr::Meet(..) => 1,
            CrExpr::Seq(..) => 2,
            CrExpr::Converse(_) | CrExpr::Star(_) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            CrExpr::Sym(s) => f.write_str(s)?,
            CrExpr::Id => f.write_str("id")?,
            CrExpr::Top => f.write_str("top")?,
            CrExpr::Bot => f.write_str("bot")?,
            CrExpr::Converse(a) => {
                a.fmt_at(3, f)?;
                f.write_str("^")?;
            }
            CrExpr::Star(a) => {
                a.fmt_at(3, f)?;
                f.write_str("*")?;
            }
            CrExpr::Seq(a, b) | CrExpr::Meet(a, b) | CrExpr::Join(a, b) => {
                let p = self.precedence();
                let op = [" | ", " & ", ";"][p as usize];
                a.fmt_at(p, f)?;
                f.write_str(op)?;
                b.fmt_at(p + 1, f)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for CrExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(0, f)
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("syntax error at {pos}: {msg}")]
pub struct CrSyntaxError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CrSyntaxError> {
        let msg = msg.into();
        let msg = if self.pos >= self.src.len() { format!("{msg} at end of input") } else { msg };
        Err(CrSyntaxError { pos: self.pos, msg })
    }

    fn binary(
        &mut self,
        op: char,
        next: fn(&mut Self) -> Result<CrExpr, CrSyntaxError>,
        build: fn(CrExpr, CrExpr) -> CrExpr,
    ) -> Result<CrExpr, CrSyntaxError> {
        let mut acc = next(self)?;
        while self.peek() == Some(op) {
            self.pos += 1;
            acc = build(acc, next(self)?);
        }
        Ok(acc)
    }

    fn join(&mut self) -> Result<CrExpr, CrSyntaxError> {
        self.binary('|', Self::meet, CrExpr::join)
    }

    fn meet(&mut self) -> Result<CrExpr, CrSyntaxError> {
        self.binary('&', Self::seq, CrExpr::meet)
    }

    fn seq(&mut self) -> Result<CrExpr, CrSyntaxError> {
        self.binary(';', Self::postfix, CrExpr::seq)
    }

    fn postfix(&mut self) -> Result<CrExpr, CrSyntaxError> {
        let mut e = self.atom()?;
        loop {
            match self.peek() {
                Some('^') => e = CrExpr::converse(e),
                Some('*') => e = CrExpr::star(e),
                _ => return Ok(e),
            }
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<CrExpr, CrSyntaxError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.join()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                let len = self.src[start..]
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .unwrap_or(self.src.len() - start);
                self.pos += len;
                Ok(match &self.src[start..self.pos] {
                    "id" => CrExpr::Id,
                    "top" => CrExpr::Top,
                    "bot" => CrExpr::Bot,
                    name => CrExpr::sym(name),
                })
            }
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("expected an expression"),
        }
    }
}

/// Parses an expression. Postfix `^` (converse) and `*` (star) bind
/// tightest and apply left to right, so `R^*` is `(R^)*`; then `;`, `&`
/// (intersection), `|` (union), all left-associative.
pub fn parse_cr(text: &str) -> Result<CrExpr, CrSyntaxError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.join()?;
    match p.peek() {
        None => Ok(e),
        Some(c) => p.err(format!("unexpected `{c}`")),
    }
}

// ---------------------------------------------------------------------------
// semantics

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CrError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("relation for `{0}` is not an endorelation on the carrier")]
    BadRelation(String),
}

/// A carrier `{0..n-1}` and a relation on it for each symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrInterp {
    carrier: Carrier,
    rho: BTreeMap<String, FinRel>,
}

impl CrInterp {
    pub fn new(n: usize) -> CrInterp {
        CrInterp { carrier: Carrier::of_sort(CR_SORT, n), rho: BTreeMap::new() }
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn set(&mut self, name: &str, r: FinRel) -> Result<(), CrError> {
        if r.dom() != &self.carrier || r.cod() != &self.carrier {
            return Err(CrError::BadRelation(name.to_string()));
        }
        self.rho.insert(name.to_string(), r);
        Ok(())
    }

    pub fn set_pairs(&mut self, name: &str, pairs: &[(usize, usize)]) -> Result<(), CrError> {
        let r = FinRel::from_pairs(&self.carrier, &self.carrier, pairs.iter().copied())
            .map_err(|_| CrError::BadRelation(name.to_string()))?;
        self.set(name, r)
    }

    pub fn get(&self, name: &str) -> Option<&FinRel> {
        self.rho.get(name)
    }

    /// Random relations for the given symbols.
    pub fn random<R: Rng>(n: usize, symbols: &BTreeSet<String>, density: f64, rng: &mut R) -> CrInterp {
        let mut i = CrInterp::new(n);
        for s in symbols {
            let r = FinRel::random(&i.carrier, &i.carrier, density, rng);
            i.rho.insert(s.clone(), r);
        }
        i
    }

    /// The same data as an interpretation of [`cr_signature`].
    pub fn to_interpretation(&self) -> Result<Interpretation, EvalError> {
        let names: Vec<&str> = self.rho.keys().map(String::as_str).collect();
        let sig = cr_signature(&names);
        let mut i = Interpretation::new(&sig, [(Sort::new(CR_SORT), self.carrier.size())].into())?;
        for (name, r) in &self.rho {
            i.set(name, r.clone())?;
        }
        Ok(i)
    }
}

/// One sort and an endo-symbol `A → A` per name.
pub fn cr_signature<S: AsRef<str>>(names: &[S]) -> Signature {
    let mut sig = Signature::new();
    sig.add_sort(Sort::new(CR_SORT));
    let a = Monomial::of(&[CR_SORT]);
    for n in names {
        sig.add_symbol(n.as_ref(), a.clone(), a.clone()).expect("sort is declared");
    }
    sig
}

/// Direct semantics.
pub fn eval_cr(e: &CrExpr, interp: &CrInterp) -> Result<FinRel, CrError> {
    let x = &interp.carrier;
    let bin = |a: &CrExpr, b: &CrExpr| -> Result<(FinRel, FinRel), CrError> {
        Ok((eval_cr(a, interp)?, eval_cr(b, interp)?))
    };
    let same = "carriers agree by construction";
    Ok(match e {
        CrExpr::Sym(s) => interp.get(s).cloned().ok_or_else(|| CrError::UnknownSymbol(s.clone()))?,
        CrExpr::Id => FinRel::identity(x),
        CrExpr::Top => FinRel::full(x, x),
        CrExpr::Bot => FinRel::empty(x, x),
        CrExpr::Seq(a, b) => {
            let (a, b) = bin(a, b)?;
            a.compose(&b).expect(same)
        }
        CrExpr::Meet(a, b) => {
            let (a, b) = bin(a, b)?;
            a.intersection(&b).expect(same)
        }
        CrExpr::Join(a, b) => {
            let (a, b) = bin(a, b)?;
            a.union(&b).expect(same)
        }
        CrExpr::Converse(a) => eval_cr(a, interp)?.converse(),
        CrExpr::Star(a) => eval_cr(a, interp)?.star().expect(same),
    })
}

/// The homomorphic encoding into tapes `A → A`.
pub fn encode_cr(e: &CrExpr) -> Tape {
    let a = Monomial::of(&[CR_SORT]);
    let ap: Polynomial = a.clone().into();
    let well_typed = "all subterms are A → A";
    match e {
        CrExpr::Sym(s) => Tape::embed(&Circuit::generator(s, a.clone(), a)),
        CrExpr::Id => Tape::embed(&Circuit::id_sort(&Sort::new(CR_SORT))),
        CrExpr::Top => sugar::top(&ap, &ap),
        CrExpr::Bot => sugar::bot(&ap, &ap),
        CrExpr::Seq(l, r) => encode_cr(l).seq(&encode_cr(r)).expect(well_typed),
        CrExpr::Meet(l, r) => sugar::meet(&encode_cr(l), &encode_cr(r)).expect(well_typed),
        CrExpr::Join(l, r) => sugar::join(&encode_cr(l), &encode_cr(r)).expect(well_typed),
        CrExpr::Converse(x) => sugar::converse(&encode_cr(x)),
        CrExpr::Star(x) => sugar::star(&encode_cr(x)).expect(well_typed),
    }
}

/// A random expression of depth at most `depth` over `symbols`.
pub fn random_cr<R: Rng>(depth: usize, symbols: &[&str], rng: &mut R) -> CrExpr {
    let leaf = |rng: &mut R| match rng.gen_range(0..symbols.len() + 3) {
        0 => CrExpr::Id,
        1 => CrExpr::Top,
        2 => CrExpr::Bot,
        k => CrExpr::sym(symbols[k - 3]),
    };
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng);
    }
    let sub = |rng: &mut R| random_cr(depth - 1, symbols, rng);
    match rng.gen_range(0..5) {
        0 => CrExpr::seq(sub(rng), sub(rng)),
        1 => CrExpr::meet(sub(rng), sub(rng)),
        2 => CrExpr::join(sub(rng), sub(rng)),
        3 => CrExpr::converse(sub(rng)),
        _ => CrExpr::star(sub(rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn precedence() {
        let e = parse_cr("R;S* & id").unwrap();
        assert_eq!(e, CrExpr::meet(CrExpr::seq(CrExpr::sym("R"), CrExpr::star(CrExpr::sym("S"))), CrExpr::Id));
        let conv_star = CrExpr::star(CrExpr::converse(CrExpr::sym("R")));
        assert_eq!(parse_cr("(R^)*").unwrap(), conv_star);
        assert_eq!(parse_cr("R^*").unwrap(), conv_star);
        assert_eq!(parse_cr("a | b | c").unwrap().to_string(), "a | b | c");
        assert_eq!(parse_cr("a | (b | c)").unwrap().to_string(), "a | (b | c)");
    }

    #[test]
    fn syntax_errors() {
        let e = parse_cr("R &").unwrap_err();
        assert_eq!(e.pos, 3);
        assert!(e.msg.contains("end of input"));
        assert!(parse_cr("(R").is_err());
        assert!(parse_cr("R S").is_err());
    }

    #[test]
    fn display_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let e = random_cr(5, &["R", "S"], &mut rng);
            assert_eq!(parse_cr(&e.to_string()).unwrap(), e, "{e}");
        }
    }

    #[test]
    fn direct_semantics() {
        let mut i = CrInterp::new(3);
        i.set_pairs("R", &[(0, 1)]).unwrap();
        assert_eq!(eval_cr(&CrExpr::Id, &i).unwrap(), FinRel::identity(i.carrier()));
        assert!(eval_cr(&CrExpr::Bot, &i).unwrap().is_empty());
        let a = eval_cr(&parse_cr("(R*)^").unwrap(), &i).unwrap();
        let b = eval_cr(&parse_cr("(R^)*").unwrap(), &i).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.show(), "{(0,0),(1,0),(1,1),(2,2)}");
        assert_eq!(eval_cr(&CrExpr::sym("Q"), &i), Err(CrError::UnknownSymbol("Q".into())));
    }

    #[test]
    fn encoding_is_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let e = random_cr(4, &["R", "S"], &mut rng);
            let n = rng.gen_range(1..=3);
            let i = CrInterp::random(n, &["R".into(), "S".into()].into(), 0.4, &mut rng);
            let t = encode_cr(&e);
            assert_eq!(eval_cr(&e, &i).unwrap(), eval(&t, &i.to_interpretation().unwrap()).unwrap(), "{e}");
        }
    }
}
