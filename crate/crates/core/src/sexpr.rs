//! S-expression dump and parse for terms. The format round-trips exactly:
//! `parse_tape(&dump_tape(t)) == t`.
//!
//! ```text
//! monomial  [A B]           unit: []
//! circuit   (id A) (id1) (gen f [A] [B]) (swap A B) (seq c c) (tensor c c)
//!           (discard A) (copy A) (codiscard A) (cocopy A)
//! tape      (id [A B]) (id0) (embed c) (swap+ [U] [V]) (seq t t) (sum t t)
//!           (bang [U]) (diag [U]) (cobang [U]) (codiag [U]) (trace [U] t)
//! ```
//!
//! `#` starts a comment running to the end of the line.

use std::fmt::Write;

use thiserror::Error;

use crate::poly::{Monomial, Sort};
use crate::term::{Circuit, CircuitKind, Tape, TapeKind, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct SexprError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, SexprError> {
    Err(SexprError { pos, msg: msg.into() })
}

fn dump_monomial(out: &mut String, u: &Monomial) {
    out.push('[');
    for (i, s) in u.factors().iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(s.name());
    }
    out.push(']');
}

fn write_circuit(out: &mut String, c: &Circuit) {
    match c.kind() {
        CircuitKind::IdSort(a) => write!(out, "(id {a})").unwrap(),
        CircuitKind::IdUnit => out.push_str("(id1)"),
        CircuitKind::Generator(name) => {
            write!(out, "(gen {name} ").unwrap();
            dump_monomial(out, c.dom());
            out.push(' ');
            dump_monomial(out, c.cod());
            out.push(')');
        }
        CircuitKind::Symmetry(a, b) => write!(out, "(swap {a} {b})").unwrap(),
        CircuitKind::Seq(l, r) | CircuitKind::Tensor(l, r) => {
            let head = if matches!(c.kind(), CircuitKind::Seq(..)) { "seq" } else { "tensor" };
            write!(out, "({head} ").unwrap();
            write_circuit(out, l);
            out.push(' ');
            write_circuit(out, r);
            out.push(')');
        }
        CircuitKind::Discharger(a) => write!(out, "(discard {a})").unwrap(),
        CircuitKind::Copier(a) => write!(out, "(copy {a})").unwrap(),
        CircuitKind::Codischarger(a) => write!(out, "(codiscard {a})").unwrap(),
        CircuitKind::Cocopier(a) => write!(out, "(cocopy {a})").unwrap(),
    }
}

fn write_tape(out: &mut String, t: &Tape) {
    let mono = |out: &mut String, head: &str, u: &Monomial| {
        write!(out, "({head} ").unwrap();
        dump_monomial(out, u);
        out.push(')');
    };
    match t.kind() {
        TapeKind::IdMonomial(u) => mono(out, "id", u),
        TapeKind::IdZero => out.push_str("(id0)"),
        TapeKind::Embed(c) => {
            out.push_str("(embed ");
            write_circuit(out, c);
            out.push(')');
        }
        TapeKind::SymmetryPlus(u, v) => {
            out.push_str("(swap+ ");
            dump_monomial(out, u);
            out.push(' ');
            dump_monomial(out, v);
            out.push(')');
        }
        TapeKind::Seq(l, r) | TapeKind::Sum(l, r) => {
            let head = if matches!(t.kind(), TapeKind::Seq(..)) { "seq" } else { "sum" };
            write!(out, "({head} ").unwrap();
            write_tape(out, l);
            out.push(' ');
            write_tape(out, r);
            out.push(')');
        }
        TapeKind::Bang(u) => mono(out, "bang", u),
        TapeKind::Diag(u) => mono(out, "diag", u),
        TapeKind::Cobang(u) => mono(out, "cobang", u),
        TapeKind::Codiag(u) => mono(out, "codiag", u),
        TapeKind::Trace(u, body) => {
            out.push_str("(trace ");
            dump_monomial(out, u);
            out.push(' ');
            write_tape(out, body);
            out.push(')');
        }
    }
}

pub fn dump_circuit(c: &Circuit) -> String {
    let mut s = String::new();
    write_circuit(&mut s, c);
    s
}

pub fn dump_tape(t: &Tape) -> String {
    let mut s = String::new();
    write_tape(&mut s, t);
    s
}

pub fn dump_term(t: &Term) -> String {
    match t {
        Term::Circuit(c) => dump_circuit(c),
        Term::Tape(t) => dump_tape(t),
    }
}

// ---------------------------------------------------------------------------
// reading

#[derive(Debug, Clone)]
enum Sx {
    Atom(String, usize),
    List(Vec<Sx>, usize),
    Bracket(Vec<(String, usize)>, usize),
}

impl Sx {
    fn pos(&self) -> usize {
        match self {
            Sx::Atom(_, p) | Sx::List(_, p) | Sx::Bracket(_, p) => *p,
        }
    }
}

fn is_atom_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '[' | ']' | '#')
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_ws(&mut self) {
        loop {
            let rest = &self.src[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                let nl = trimmed.find('\n').unwrap_or(trimmed.len());
                self.pos += nl;
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn atom(&mut self) -> Option<(String, usize)> {
        let start = self.pos;
        let len: usize = self.src[start..].chars().take_while(|&c| is_atom_char(c)).map(char::len_utf8).sum();
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some((self.src[start..start + len].to_string(), start))
    }

    fn read(&mut self) -> Result<Sx, SexprError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => err(start, "unexpected end of input"),
            Some('(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(')') => {
                            self.pos += 1;
                            return Ok(Sx::List(items, start));
                        }
                        None => return err(self.pos, "unclosed `(`"),
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some('[') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek() {
                        Some(']') => {
                            self.pos += 1;
                            return Ok(Sx::Bracket(items, start));
                        }
                        None => return err(self.pos, "unclosed `[`"),
                        _ => match self.atom() {
                            Some(a) => items.push(a),
                            None => return err(self.pos, "expected a sort name"),
                        },
                    }
                }
            }
            Some(c) if is_atom_char(c) => {
                let (a, p) = self.atom().expect("nonempty atom");
                Ok(Sx::Atom(a, p))
            }
            Some(c) => err(start, format!("unexpected `{c}`")),
        }
    }
}

fn read_one(src: &str) -> Result<Sx, SexprError> {
    let mut r = Reader { src, pos: 0 };
    let sx = r.read()?;
    r.skip_ws();
    if r.pos != src.len() {
        return err(r.pos, "trailing input after term");
    }
    Ok(sx)
}

fn monomial(sx: &Sx) -> Result<Monomial, SexprError> {
    match sx {
        Sx::Bracket(items, _) => Ok(Monomial::new(items.iter().map(|(n, _)| Sort::new(n)).collect())),
        other => err(other.pos(), "expected a monomial `[...]`"),
    }
}

fn sort(sx: &Sx) -> Result<Sort, SexprError> {
    match sx {
        Sx::Atom(a, _) => Ok(Sort::new(a)),
        other => err(other.pos(), "expected a sort name"),
    }
}

fn head(sx: &Sx) -> Result<(&str, &[Sx], usize), SexprError> {
    match sx {
        Sx::List(items, pos) => match items.split_first() {
            Some((Sx::Atom(h, _), rest)) => Ok((h.as_str(), rest, *pos)),
            _ => err(*pos, "expected an operator name"),
        },
        other => err(other.pos(), "expected `(`"),
    }
}

fn arity<'a>(args: &'a [Sx], n: usize, op: &str, pos: usize) -> Result<&'a [Sx], SexprError> {
    if args.len() != n {
        return err(pos, format!("`{op}` takes {n} argument(s), got {}", args.len()));
    }
    Ok(args)
}

fn to_circuit(sx: &Sx) -> Result<Circuit, SexprError> {
    let (h, args, pos) = head(sx)?;
    let typed = |r: Result<Circuit, crate::error::TypeError>| r.or_else(|e| err(pos, e.to_string()));
    match h {
        "id" => Ok(Circuit::id_sort(&sort(&arity(args, 1, h, pos)?[0])?)),
        "id1" => {
            arity(args, 0, h, pos)?;
            Ok(Circuit::id_unit())
        }
        "gen" => {
            let a = arity(args, 3, h, pos)?;
            let Sx::Atom(name, _) = &a[0] else { return err(a[0].pos(), "expected a symbol name") };
            Ok(Circuit::generator(name, monomial(&a[1])?, monomial(&a[2])?))
        }
        "swap" => {
            let a = arity(args, 2, h, pos)?;
            Ok(Circuit::symmetry(&sort(&a[0])?, &sort(&a[1])?))
        }
        "seq" => {
            let a = arity(args, 2, h, pos)?;
            typed(to_circuit(&a[0])?.seq(&to_circuit(&a[1])?))
        }
        "tensor" => {
            let a = arity(args, 2, h, pos)?;
            Ok(to_circuit(&a[0])?.tensor(&to_circuit(&a[1])?))
        }
        "discard" => Ok(Circuit::discharger(&sort(&arity(args, 1, h, pos)?[0])?)),
        "copy" => Ok(Circuit::copier(&sort(&arity(args, 1, h, pos)?[0])?)),
        "codiscard" => Ok(Circuit::codischarger(&sort(&arity(args, 1, h, pos)?[0])?)),
        "cocopy" => Ok(Circuit::cocopier(&sort(&arity(args, 1, h, pos)?[0])?)),
        other => err(pos, format!("unknown circuit operator `{other}`")),
    }
}

fn to_tape(sx: &Sx) -> Result<Tape, SexprError> {
    let (h, args, pos) = head(sx)?;
    let typed = |r: Result<Tape, crate::error::TypeError>| r.or_else(|e| err(pos, e.to_string()));
    let mono1 = |args: &[Sx]| -> Result<Monomial, SexprError> { monomial(&arity(args, 1, h, pos)?[0]) };
    match h {
        "id" => Ok(Tape::id_monomial(&mono1(args)?)),
        "id0" => {
            arity(args, 0, h, pos)?;
            Ok(Tape::id_zero())
        }
        "embed" => Ok(Tape::embed(&to_circuit(&arity(args, 1, h, pos)?[0])?)),
        "swap+" => {
            let a = arity(args, 2, h, pos)?;
            Ok(Tape::symmetry_plus(&monomial(&a[0])?, &monomial(&a[1])?))
        }
        "seq" => {
            let a = arity(args, 2, h, pos)?;
            typed(to_tape(&a[0])?.seq(&to_tape(&a[1])?))
        }
        "sum" => {
            let a = arity(args, 2, h, pos)?;
            Ok(to_tape(&a[0])?.sum(&to_tape(&a[1])?))
        }
        "bang" => Ok(Tape::bang(&mono1(args)?)),
        "diag" => Ok(Tape::diag(&mono1(args)?)),
        "cobang" => Ok(Tape::cobang(&mono1(args)?)),
        "codiag" => Ok(Tape::codiag(&mono1(args)?)),
        "trace" => {
            let a = arity(args, 2, h, pos)?;
            typed(Tape::trace(&monomial(&a[0])?, &to_tape(&a[1])?))
        }
        other => err(pos, format!("unknown tape operator `{other}`")),
    }
}

pub fn parse_circuit(src: &str) -> Result<Circuit, SexprError> {
    to_circuit(&read_one(src)?)
}

pub fn parse_tape(src: &str) -> Result<Tape, SexprError> {
    to_tape(&read_one(src)?)
}

/// Parses a term of either layer: tape syntax is tried first, then circuit
/// syntax; the tape error is reported if both fail.
pub fn parse_term(src: &str) -> Result<Term, SexprError> {
    let sx = read_one(src)?;
    match to_tape(&sx) {
        Ok(t) => Ok(Term::Tape(t)),
        Err(e) => to_circuit(&sx).map(Term::Circuit).map_err(|_| e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Polynomial;
    use crate::sugar;

    #[test]
    fn roundtrip_structural() {
        let x = Polynomial::new(vec![Monomial::of(&["A", "B"]), Monomial::unit(), Monomial::of(&["C"])]);
        for t in [
            sugar::copier(&x),
            sugar::codischarger(&x),
            sugar::star(&sugar::id(&x)).unwrap(),
            sugar::converse(&sugar::diag(&x)),
        ] {
            let s = dump_tape(&t);
            assert_eq!(parse_tape(&s).unwrap(), t);
        }
    }

    #[test]
    fn circuit_terms() {
        let c = parse_circuit("(seq (gen f [A] [B B]) (tensor (id B) (discard B)))").unwrap();
        assert_eq!(c.dom(), &Monomial::of(&["A"]));
        assert_eq!(c.cod(), &Monomial::of(&["B"]));
        assert_eq!(parse_circuit(&dump_circuit(&c)).unwrap(), c);
        assert!(matches!(parse_term("(copy A)").unwrap(), Term::Circuit(_)));
        assert!(matches!(parse_term("(id [A])").unwrap(), Term::Tape(_)));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_tape("(seq (id [A]) (id [B]))").unwrap_err();
        assert_eq!(e.pos, 0);
        assert!(e.msg.contains("composition"));
        let e = parse_tape("(id [A]").unwrap_err();
        assert_eq!(e.pos, 7);
        assert!(parse_tape("(frob [A])").is_err());
        assert!(parse_tape("(id0) x").is_err());
    }

    #[test]
    fn comments_are_skipped() {
        let t = parse_tape("# identity\n(id [A]) # trailing\n").unwrap();
        assert_eq!(t, Tape::id_monomial(&Monomial::of(&["A"])));
    }
}
