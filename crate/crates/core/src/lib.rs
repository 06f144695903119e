//! Kleene-Cartesian tape diagrams with a finite-relation semantics.

pub mod arith;
pub mod cr;
pub mod error;
pub mod eval;
pub mod imp;
pub mod kleene;
pub mod laws;
pub mod logics;
pub mod poly;
pub mod rel;
pub mod sexpr;
pub mod sugar;
pub mod term;

pub use error::{EvalError, RelError, TypeError};
pub use poly::{Monomial, Polynomial, Signature, Sort};
pub use term::{Circuit, CircuitKind, Tape, TapeKind, Term};
