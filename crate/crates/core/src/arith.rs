//! Addition on natural numbers as a traced tape, evaluated over finite
//! truncations `{0..n}` of the naturals.

use crate::error::EvalError;
use crate::eval::Interpretation;
use crate::poly::{Monomial, Polynomial, Signature, Sort};
use crate::rel::{Carrier, FinRel};
use crate::sugar::{circuit_converse, circuit_id, codiag, ctensor, diag, trace_poly};
use crate::term::{Circuit, Tape};

pub const NAT: &str = "N";
pub const SUCC: &str = "s";
pub const ZERO: &str = "z";

/// Sort `N` with `s : N → N` and `z : 1 → N`.
pub fn naturals_signature() -> Signature {
    let mut sig = Signature::new();
    sig.add_sort(Sort::new(NAT));
    let n = Monomial::of(&[NAT]);
    sig.add_symbol(SUCC, n.clone(), n.clone()).expect("fresh");
    sig.add_symbol(ZERO, Monomial::unit(), n).expect("fresh");
    sig
}

/// `N = {0..n}`, `s = {(k,k+1) | k < n}`, `z = {(•,0)}`.
pub fn truncated_naturals(n: usize) -> Interpretation {
    let sig = naturals_signature();
    let mut i = Interpretation::with_sizes(&sig, &[(NAT, n + 1)]).expect("one sort");
    let c = Carrier::of_sort(NAT, n + 1);
    let succ = FinRel::from_pairs(&c, &c, (0..n).map(|k| (k, k + 1))).expect("in range");
    let zero = FinRel::from_pairs(&Carrier::one(), &c, [(0, 0)]).expect("in range");
    i.set(SUCC, succ).expect("typed");
    i.set(ZERO, zero).expect("typed");
    i
}

fn nat() -> Monomial {
    Monomial::of(&[NAT])
}

pub fn succ() -> Circuit {
    Circuit::generator(SUCC, nat(), nat())
}

pub fn zero() -> Circuit {
    Circuit::generator(ZERO, Monomial::unit(), nat())
}

/// `add : N⊗N → N`, the loop `while x > 0 { x := x-1; y := y+1 }; return y`:
/// `tr_{NN}(▷⊕ ; ◁⊕ ; ((s† ⊗ s) ⊕ (z† ⊗ id)))`. The converse `s†` acts both as
/// the test `x > 0` and as the decrement; `z†` is the exit test `x = 0`.
pub fn addition_tape() -> Tape {
    let nn: Polynomial = Monomial::of(&[NAT, NAT]).into();
    let step = Tape::embed(&ctensor(&circuit_converse(&succ()), &succ()));
    let exit = Tape::embed(&ctensor(&circuit_converse(&zero()), &circuit_id(&nat())));
    let body = codiag(&nn).seq(&diag(&nn)).and_then(|t| t.seq(&step.sum(&exit))).expect("well-typed loop body");
    trace_poly(&nn, &body).expect("traced over the state")
}

/// `(z ⊗ id) ; add`, which should be `id_N`.
pub fn add_zero_left() -> Tape {
    Tape::embed(&ctensor(&zero(), &circuit_id(&nat()))).seq(&addition_tape()).expect("typed")
}

/// `(s ⊗ id) ; add` and `add ; s`, which should agree.
pub fn add_succ_sides() -> (Tape, Tape) {
    let lhs = Tape::embed(&ctensor(&succ(), &circuit_id(&nat()))).seq(&addition_tape()).expect("typed");
    let rhs = addition_tape().seq(&Tape::embed(&succ())).expect("typed");
    (lhs, rhs)
}

/// Evaluates the addition tape over `{0..n}`.
pub fn eval_addition(n: usize) -> Result<FinRel, EvalError> {
    crate::eval::eval(&addition_tape(), &truncated_naturals(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval;
    use crate::term::typecheck_tape;

    #[test]
    fn addition_is_typed() {
        let (d, c) = typecheck_tape(&addition_tape(), &naturals_signature()).unwrap();
        assert_eq!(d, Monomial::of(&[NAT, NAT]).into());
        assert_eq!(c, nat().into());
    }

    #[test]
    fn addition_over_three() {
        let r = eval_addition(3).unwrap();
        let nn = Carrier::new(&Monomial::of(&[NAT, NAT]).into(), |_| 4);
        let pairs: Vec<(usize, usize)> = r.pairs().collect();
        let mut expected = Vec::new();
        for x in 0..4 {
            for y in 0..4 {
                if x + y <= 3 {
                    expected.push((nn.encode(0, &[x, y]).unwrap(), x + y));
                }
            }
        }
        expected.sort();
        assert_eq!(pairs, expected);
    }

    #[test]
    fn zero_is_left_unit() {
        let i = truncated_naturals(4);
        let r = eval(&add_zero_left(), &i).unwrap();
        assert_eq!(r, FinRel::identity(&Carrier::of_sort(NAT, 5)));
    }
}
