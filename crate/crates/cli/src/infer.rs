//! Infers symbol types for a program from its context, so `encode` can run
//! without a signature file.
//!
//! Argument sorts come from variables and from applications whose result
//! sort is known; a result sort comes from the variable it is assigned to,
//! or from the only sort in the context.

use std::collections::BTreeMap;

use anyhow::{bail, Result};
use kctape::imp::{Cmd, Context, Expr, Pred};
use kctape::{Monomial, Signature, Sort};

#[derive(Default)]
struct Table {
    results: BTreeMap<String, Sort>,
    args: BTreeMap<String, Vec<Option<Sort>>>,
    preds: BTreeMap<String, Vec<Option<Sort>>>,
    changed: bool,
}

impl Table {
    fn set(slot: &mut Option<Sort>, s: Sort, what: &str, changed: &mut bool) -> Result<()> {
        match slot {
            Some(old) if *old != s => bail!("{what} is used at sorts {old} and {s}"),
            Some(_) => Ok(()),
            None => {
                *slot = Some(s);
                *changed = true;
                Ok(())
            }
        }
    }

    fn result(&mut self, f: &str, s: Sort) -> Result<()> {
        let mut slot = self.results.get(f).cloned();
        Table::set(&mut slot, s, &format!("the result of `{f}`"), &mut self.changed)?;
        self.results.insert(f.to_string(), slot.expect("just set"));
        Ok(())
    }

    fn sort_of(&self, ctx: &Context, e: &Expr, default: &Option<Sort>) -> Result<Option<Sort>> {
        Ok(match e {
            Expr::Var(x) => Some(ctx.sort_of(x)?.clone()),
            Expr::App(f, _) => self.results.get(f).cloned().or_else(|| default.clone()),
        })
    }

    fn expr(&mut self, ctx: &Context, e: &Expr, default: &Option<Sort>) -> Result<()> {
        if let Expr::App(f, args) = e {
            self.apply(ctx, f, args, false, default)?;
        }
        Ok(())
    }

    fn apply(&mut self, ctx: &Context, f: &str, args: &[Expr], pred: bool, default: &Option<Sort>) -> Result<()> {
        let mut slots = {
            let table = if pred { &self.preds } else { &self.args };
            table.get(f).cloned().unwrap_or_else(|| vec![None; args.len()])
        };
        if slots.len() != args.len() {
            bail!("`{f}` is applied to {} and {} arguments", slots.len(), args.len());
        }
        for (k, a) in args.iter().enumerate() {
            if let Some(s) = self.sort_of(ctx, a, default)? {
                Table::set(&mut slots[k], s, &format!("argument {} of `{f}`", k + 1), &mut self.changed)?;
            }
            self.expr(ctx, a, default)?;
        }
        let table = if pred { &mut self.preds } else { &mut self.args };
        table.insert(f.to_string(), slots);
        Ok(())
    }

    fn pred(&mut self, ctx: &Context, p: &Pred, default: &Option<Sort>) -> Result<()> {
        match p {
            Pred::True | Pred::False => Ok(()),
            Pred::Atom(r, args) | Pred::NAtom(r, args) => self.apply(ctx, r, args, true, default),
            Pred::And(a, b) | Pred::Or(a, b) => {
                self.pred(ctx, a, default)?;
                self.pred(ctx, b, default)
            }
        }
    }

    fn cmd(&mut self, ctx: &Context, c: &Cmd, default: &Option<Sort>) -> Result<()> {
        match c {
            Cmd::Abort | Cmd::Skip => Ok(()),
            Cmd::Assign(x, e) => {
                if let Expr::App(f, _) = e {
                    self.result(f, ctx.sort_of(x)?.clone())?;
                }
                self.expr(ctx, e, default)
            }
            Cmd::Seq(a, b) => {
                self.cmd(ctx, a, default)?;
                self.cmd(ctx, b, default)
            }
            Cmd::If(p, a, b) => {
                self.pred(ctx, p, default)?;
                self.cmd(ctx, a, default)?;
                self.cmd(ctx, b, default)
            }
            Cmd::While(p, body) => {
                self.pred(ctx, p, default)?;
                self.cmd(ctx, body, default)
            }
        }
    }
}

fn arity(name: &str, slots: &[Option<Sort>]) -> Result<Monomial> {
    let sorts = slots
        .iter()
        .cloned()
        .collect::<Option<Vec<Sort>>>()
        .ok_or_else(|| anyhow::anyhow!("cannot infer the arity of `{name}`; pass --signature"))?;
    Ok(Monomial::new(sorts))
}

pub fn program_signature(ctx: &Context, cmd: &Cmd) -> Result<Signature> {
    let mut sorts: Vec<Sort> = ctx.vars().iter().map(|(_, s)| s.clone()).collect();
    sorts.sort();
    sorts.dedup();
    let default = if sorts.len() == 1 { Some(sorts[0].clone()) } else { None };
    let mut t = Table::default();
    loop {
        t.changed = false;
        t.cmd(ctx, cmd, &default)?;
        if !t.changed {
            break;
        }
    }
    let mut sig = Signature::new();
    for s in sorts {
        sig.add_sort(s);
    }
    for (f, slots) in &t.args {
        let result = t
            .results
            .get(f)
            .cloned()
            .or_else(|| default.clone())
            .ok_or_else(|| anyhow::anyhow!("cannot infer the result sort of `{f}`; pass --signature"))?;
        sig.add_sort(result.clone());
        sig.add_symbol(f, arity(f, slots)?, result.into())?;
    }
    for (r, slots) in &t.preds {
        sig.add_symbol(r, arity(r, slots)?, Monomial::unit())?;
    }
    Ok(sig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kctape::imp::{parse_context, parse_program};

    #[test]
    fn single_sort_programs_need_no_annotations() {
        let ctx = parse_context("x:A, y:A").unwrap();
        let c = parse_program("while eq0(x) do y := s(y) end").unwrap();
        let sig = program_signature(&ctx, &c).unwrap();
        assert_eq!(sig.symbol("s"), Some(&(Monomial::of(&["A"]), Monomial::of(&["A"]))));
        assert_eq!(sig.symbol("eq0"), Some(&(Monomial::of(&["A"]), Monomial::unit())));
    }

    #[test]
    fn results_follow_assignments() {
        let ctx = parse_context("x:A, n:N").unwrap();
        let c = parse_program("n := len(x); x := f(g(n))").unwrap();
        assert!(program_signature(&ctx, &c).is_err(), "g's result is unconstrained");
        let c = parse_program("n := len(x); if p(x, n) then n := len(x) else skip end").unwrap();
        let sig = program_signature(&ctx, &c).unwrap();
        assert_eq!(sig.symbol("len"), Some(&(Monomial::of(&["A"]), Monomial::of(&["N"]))));
        assert_eq!(sig.symbol("p"), Some(&(Monomial::of(&["A", "N"]), Monomial::unit())));
    }
}
