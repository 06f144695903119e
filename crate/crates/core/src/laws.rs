//! Randomised and exhaustive law harnesses over the relational semantics.
//!
//! Each suite states laws on tapes, evaluates both sides in `Rel` on fresh
//! random instances and reports the first violation of every failing law.
//! Where a law can be checked against a direct set-theoretic construction,
//! the two routes are kept separate.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::error::EvalError;
use crate::eval::{eval, Interpretation};
use crate::imp::{coreflexive, image};
use crate::kleene::{
    bool_mat_to_rel, check_ka_laws, check_ka_laws_on, rel_to_bool_mat, BoolKa, LawReport, Mat, MatKa, RelKa,
};
use crate::poly::{Monomial, Polynomial, Signature, Sort};
use crate::rel::{ArrowProperty, Carrier, FinRel, GeneratorKind};
use crate::sugar::{self, plus, Structural};
use crate::term::{Circuit, Tape};

/// Suite names accepted by [`run_suite`].
pub const SUITES: &[&str] =
    &["tape", "trace", "cb", "coherence", "kozen", "star-trace", "normal-form", "coreflexive", "derived"];

#[derive(Debug, Error)]
pub enum LawError {
    #[error("unknown suite `{0}` (expected one of: {})", SUITES.join(", "))]
    UnknownSuite(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Runs a named suite with `samples` random instances per law.
pub fn run_suite(name: &str, samples: usize, seed: u64) -> Result<LawReport, LawError> {
    Ok(match name {
        "tape" => run_laws(TAPE_LAWS, samples, seed, 4)?,
        "trace" => run_laws(TRACE_LAWS, samples, seed, 4)?,
        "cb" => run_laws(CB_LAWS, samples, seed, 4)?,
        "coherence" => run_laws(COHERENCE_LAWS, samples, seed, 4)?,
        "derived" => run_laws(DERIVED_LAWS, samples, seed, 3)?,
        "kozen" => kozen(samples, seed),
        "star-trace" => star_trace(samples, seed)?,
        "normal-form" => normal_form(samples, seed)?,
        "coreflexive" => coreflexives(seed)?,
        other => return Err(LawError::UnknownSuite(other.to_string())),
    })
}

// ---------------------------------------------------------------------------
// random instances

/// A scratch signature with random sort sizes, into which random arrows are
/// added as fresh symbols.
pub struct Lab {
    rng: ChaCha8Rng,
    sig: Signature,
    sizes: BTreeMap<Sort, usize>,
    rels: BTreeMap<String, FinRel>,
    cached: Option<Interpretation>,
    /// Upper bound on the carrier size of objects drawn by [`Lab::obj`].
    pub bound: usize,
}

impl Lab {
    /// Sorts `A` and `B` with sizes in `1..=max_size`.
    pub fn new(rng: &mut impl Rng, max_size: usize) -> Lab {
        let mut rng = ChaCha8Rng::seed_from_u64(rng.gen());
        let a = rng.gen_range(1..=max_size);
        let b = rng.gen_range(1..=max_size);
        Lab::with_sizes(rng, &[("A", a), ("B", b)])
    }

    pub fn with_sizes(rng: ChaCha8Rng, sizes: &[(&str, usize)]) -> Lab {
        let mut sig = Signature::new();
        let mut map = BTreeMap::new();
        for (n, k) in sizes {
            sig.add_sort(Sort::new(n));
            map.insert(Sort::new(n), *k);
        }
        Lab { rng, sig, sizes: map, rels: BTreeMap::new(), cached: None, bound: 16 }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn carrier(&self, p: &Polynomial) -> Carrier {
        Carrier::new(p, |s| self.sizes[s])
    }

    pub fn monomial(&mut self, max_len: usize) -> Monomial {
        let sorts: Vec<Sort> = self.sizes.keys().cloned().collect();
        let len = self.rng.gen_range(0..=max_len);
        Monomial::new((0..len).map(|_| sorts[self.rng.gen_range(0..sorts.len())].clone()).collect())
    }

    /// A random polynomial; the zero polynomial comes up occasionally.
    pub fn poly(&mut self, max_summands: usize, max_len: usize) -> Polynomial {
        let n = if self.rng.gen_bool(0.1) { 0 } else { self.rng.gen_range(1..=max_summands) };
        Polynomial::new((0..n).map(|_| self.monomial(max_len)).collect())
    }

    /// A random object whose carrier has at most `bound` elements.
    pub fn obj(&mut self) -> Polynomial {
        loop {
            let p = self.poly(2, 2);
            if self.carrier(&p).size() <= self.bound {
                return p;
            }
        }
    }

    /// A random relation with a random density.
    pub fn rel(&mut self, p: &Polynomial, q: &Polynomial) -> FinRel {
        let density = self.rng.gen_range(0.05..0.6);
        FinRel::random(&self.carrier(p), &self.carrier(q), density, &mut self.rng)
    }

    /// A random relation in which every element has an image.
    pub fn total_rel(&mut self, p: &Polynomial, q: &Polynomial) -> FinRel {
        let mut r = self.rel(p, q);
        let m = r.cod().size();
        if m > 0 {
            for i in 0..r.dom().size() {
                if !(0..m).any(|j| r.contains(i, j)) {
                    let j = self.rng.gen_range(0..m);
                    r.insert(i, j);
                }
            }
        }
        r
    }

    /// A fresh generator `u → v` interpreted as `rel`.
    pub fn symbol(&mut self, u: &Monomial, v: &Monomial, rel: FinRel) -> Circuit {
        let name = format!("f{}", self.rels.len());
        self.sig.add_symbol(&name, u.clone(), v.clone()).expect("fresh symbol");
        self.rels.insert(name.clone(), rel);
        self.cached = None;
        Circuit::generator(&name, u.clone(), v.clone())
    }

    /// A tape denoting exactly `rel : P → Q`, built as a matrix of fresh
    /// generators: `(⊕ᵢ ◁⊕ⁿ ; (eᵢ₁ ⊕ … ⊕ eᵢₘ)) ; ▷⊕ⁿ`.
    pub fn arrow_from(&mut self, p: &Polynomial, q: &Polynomial, rel: &FinRel) -> Tape {
        let (pc, qc) = (self.carrier(p), self.carrier(q));
        let (n, m) = (p.len(), q.len());
        if n == 0 {
            return sugar::cobang(q);
        }
        if m == 0 {
            return sugar::bang(p);
        }
        let mut rows = Vec::with_capacity(n);
        for (i, u) in p.summands().iter().enumerate() {
            let mut entries = Vec::with_capacity(m);
            for (j, v) in q.summands().iter().enumerate() {
                let (uc, vc) = (self.carrier(&u.clone().into()), self.carrier(&v.clone().into()));
                let mut block = FinRel::empty(&uc, &vc);
                for a in 0..uc.size() {
                    for b in 0..vc.size() {
                        if rel.contains(pc.offset(i) + a, qc.offset(j) + b) {
                            block.insert(a, b);
                        }
                    }
                }
                entries.push(Tape::embed(&self.symbol(u, v, block)));
            }
            rows.push(seq(&copies(u, m), &sugar::plus_all(&entries)));
        }
        seq(&sugar::plus_all(&rows), &merges(q, n))
    }

    /// A random arrow `P → Q`.
    pub fn arrow(&mut self, p: &Polynomial, q: &Polynomial) -> Tape {
        let r = self.rel(p, q);
        self.arrow_from(p, q, &r)
    }

    pub fn interpretation(&mut self) -> Result<&Interpretation, EvalError> {
        if self.cached.is_none() {
            let mut i = Interpretation::new(&self.sig, self.sizes.clone())?;
            for (n, r) in &self.rels {
                i.set(n, r.clone())?;
            }
            self.cached = Some(i);
        }
        Ok(self.cached.as_ref().expect("just built"))
    }

    pub fn ev(&mut self, t: &Tape) -> Result<FinRel, EvalError> {
        eval(t, self.interpretation()?)
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.sizes.iter().map(|(s, n)| format!("{s}={n}")).collect();
        parts.extend(self.rels.iter().map(|(n, r)| format!("{n}={}", r.show())));
        parts.join("; ")
    }
}

fn seq(a: &Tape, b: &Tape) -> Tape {
    a.seq(b).expect("harness builds well-typed tapes")
}

fn seqs(ts: &[&Tape]) -> Tape {
    ts[1..].iter().fold(ts[0].clone(), |acc, t| seq(&acc, t))
}

/// `U → U ⊕ … ⊕ U` (`m` copies).
fn copies(u: &Monomial, m: usize) -> Tape {
    match m {
        0 => Tape::bang(u),
        1 => Tape::id_monomial(u),
        _ => seq(&Tape::diag(u), &plus(&Tape::id_monomial(u), &copies(u, m - 1))),
    }
}

/// `Q ⊕ … ⊕ Q → Q` (`n` copies).
fn merges(q: &Polynomial, n: usize) -> Tape {
    match n {
        0 => sugar::cobang(q),
        1 => sugar::id(q),
        _ => seq(&plus(&sugar::id(q), &merges(q, n - 1)), &sugar::codiag(q)),
    }
}

// ---------------------------------------------------------------------------
// law runner

/// Result of one law on one instance.
pub enum Outcome {
    Pass,
    Fail(String),
    /// The premise of an implication did not hold.
    Vacuous,
}

type Build = fn(&mut Lab) -> Result<Outcome, EvalError>;

fn differ(lab: &Lab, l: &FinRel, r: &FinRel) -> Result<Outcome, EvalError> {
    if l == r {
        return Ok(Outcome::Pass);
    }
    if let Some((i, j)) = l.first_missing(r)? {
        return Ok(Outcome::Fail(format!(
            "({},{}) only on the left; {}",
            l.dom().show(i),
            l.cod().show(j),
            lab.describe()
        )));
    }
    let (i, j) = r.first_missing(l)?.expect("relations differ");
    Ok(Outcome::Fail(format!("({},{}) only on the right; {}", r.dom().show(i), r.cod().show(j), lab.describe())))
}

fn rel_eq(lab: &Lab, l: &FinRel, r: &FinRel) -> Result<Outcome, EvalError> {
    if l.dom() != r.dom() || l.cod() != r.cod() {
        return Ok(Outcome::Fail(format!("types differ: {l:?} vs {r:?}")));
    }
    differ(lab, l, r)
}

fn rel_leq(lab: &Lab, l: &FinRel, r: &FinRel) -> Result<Outcome, EvalError> {
    Ok(match l.first_missing(r)? {
        None => Outcome::Pass,
        Some((i, j)) => {
            Outcome::Fail(format!("({},{}) on the left only; {}", l.dom().show(i), l.cod().show(j), lab.describe()))
        }
    })
}

fn eq(lab: &mut Lab, l: &Tape, r: &Tape) -> Result<Outcome, EvalError> {
    let (a, b) = (lab.ev(l)?, lab.ev(r)?);
    rel_eq(lab, &a, &b)
}

fn leq(lab: &mut Lab, l: &Tape, r: &Tape) -> Result<Outcome, EvalError> {
    let (a, b) = (lab.ev(l)?, lab.ev(r)?);
    rel_leq(lab, &a, &b)
}

fn run_laws(laws: &[(&str, Build)], samples: usize, seed: u64, max_size: usize) -> Result<LawReport, EvalError> {
    let reports: Vec<Result<LawReport, EvalError>> = laws
        .par_iter()
        .enumerate()
        .map(|(k, (name, build))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut rep = LawReport::default();
            for _ in 0..samples {
                let mut lab = Lab::new(&mut rng, max_size);
                match build(&mut lab)? {
                    Outcome::Pass | Outcome::Vacuous => {}
                    Outcome::Fail(w) => rep.fail(name, || w),
                }
                rep.checked += 1;
            }
            Ok(rep)
        })
        .collect();
    let mut out = LawReport::default();
    for r in reports {
        out.merge(r?);
    }
    Ok(out)
}

/// Law names of a suite built from tape laws, in checking order.
pub fn law_names(suite: &str) -> Vec<&'static str> {
    let table = match suite {
        "tape" => TAPE_LAWS,
        "trace" => TRACE_LAWS,
        "cb" => CB_LAWS,
        "coherence" => COHERENCE_LAWS,
        "derived" => DERIVED_LAWS,
        _ => return Vec::new(),
    };
    table.iter().map(|(n, _)| *n).collect()
}

// ---------------------------------------------------------------------------
// biproduct tape axioms

fn sym(p: &Polynomial, q: &Polynomial) -> Tape {
    sugar::symmetry_plus(p, q)
}

fn idp(p: &Polynomial) -> Tape {
    sugar::id(p)
}

static TAPE_LAWS: &[(&str, Build)] = &[
    ("σ⊕ ; σ⊕ = id", |lab| {
        let (p, q) = (lab.obj(), lab.obj());
        eq(lab, &seq(&sym(&p, &q), &sym(&q, &p)), &idp(&p.sum(&q)))
    }),
    ("(f ⊕ g) ; σ⊕ = σ⊕ ; (g ⊕ f)", |lab| {
        let (p, q, r, s) = (lab.obj(), lab.obj(), lab.obj(), lab.obj());
        let (f, g) = (lab.arrow(&p, &r), lab.arrow(&q, &s));
        eq(lab, &seq(&plus(&f, &g), &sym(&r, &s)), &seq(&sym(&p, &q), &plus(&g, &f)))
    }),
    ("◁⊕ ; (◁⊕ ⊕ id) = ◁⊕ ; (id ⊕ ◁⊕)", |lab| {
        let p = lab.obj();
        let d = sugar::diag(&p);
        eq(lab, &seq(&d, &plus(&d, &idp(&p))), &seq(&d, &plus(&idp(&p), &d)))
    }),
    ("◁⊕ ; (id ⊕ !⊕) = id", |lab| {
        let p = lab.obj();
        eq(lab, &seq(&sugar::diag(&p), &plus(&idp(&p), &sugar::bang(&p))), &idp(&p))
    }),
    ("◁⊕ ; σ⊕ = ◁⊕", |lab| {
        let p = lab.obj();
        eq(lab, &seq(&sugar::diag(&p), &sym(&p, &p)), &sugar::diag(&p))
    }),
    ("(▷⊕ ⊕ id) ; ▷⊕ = (id ⊕ ▷⊕) ; ▷⊕", |lab| {
        let p = lab.obj();
        let c = sugar::codiag(&p);
        eq(lab, &seq(&plus(&c, &idp(&p)), &c), &seq(&plus(&idp(&p), &c), &c))
    }),
    ("(id ⊕ ¡⊕) ; ▷⊕ = id", |lab| {
        let p = lab.obj();
        eq(lab, &seq(&plus(&idp(&p), &sugar::cobang(&p)), &sugar::codiag(&p)), &idp(&p))
    }),
    ("σ⊕ ; ▷⊕ = ▷⊕", |lab| {
        let p = lab.obj();
        eq(lab, &seq(&sym(&p, &p), &sugar::codiag(&p)), &sugar::codiag(&p))
    }),
    ("▷⊕ ; ◁⊕ = ◁⊕_{P⊕P} ; (▷⊕ ⊕ ▷⊕)", |lab| {
        let p = lab.obj();
        let c = sugar::codiag(&p);
        let rhs = seq(&sugar::diag(&p.sum(&p)), &plus(&c, &c));
        eq(lab, &seq(&c, &sugar::diag(&p)), &rhs)
    }),
    ("¡⊕ ; !⊕ = id₀", |lab| {
        let p = lab.obj();
        eq(lab, &seq(&sugar::cobang(&p), &sugar::bang(&p)), &Tape::id_zero())
    }),
    ("¡⊕ ; ◁⊕ = ¡⊕ ⊕ ¡⊕", |lab| {
        let p = lab.obj();
        let z = sugar::cobang(&p);
        eq(lab, &seq(&z, &sugar::diag(&p)), &z.sum(&z))
    }),
    ("▷⊕ ; !⊕ = !⊕ ⊕ !⊕", |lab| {
        let p = lab.obj();
        let b = sugar::bang(&p);
        eq(lab, &seq(&sugar::codiag(&p), &b), &b.sum(&b))
    }),
    ("f ; !⊕ = !⊕", |lab| {
        let (p, q) = (lab.obj(), lab.obj());
        let f = lab.arrow(&p, &q);
        eq(lab, &seq(&f, &sugar::bang(&q)), &sugar::bang(&p))
    }),
    ("f ; ◁⊕ = ◁⊕ ; (f ⊕ f)", |lab| {
        let (p, q) = (lab.obj(), lab.obj());
        let f = lab.arrow(&p, &q);
        eq(lab, &seq(&f, &sugar::diag(&q)), &seq(&sugar::diag(&p), &plus(&f, &f)))
    }),
    ("¡⊕ ; f = ¡⊕", |lab| {
        let (p, q) = (lab.obj(), lab.obj());
        let f = lab.arrow(&p, &q);
        eq(lab, &seq(&sugar::cobang(&p), &f), &sugar::cobang(&q))
    }),
    ("▷⊕ ; f = (f ⊕ f) ; ▷⊕", |lab| {
        let (p, q) = (lab.obj(), lab.obj());
        let f = lab.arrow(&p, &q);
        eq(lab, &seq(&sugar::codiag(&p), &f), &seq(&plus(&f, &f), &sugar::codiag(&q)))
    }),
    ("id ≤ ▷⊕ ; ◁⊕", |lab| {
        let p = lab.obj();
        leq(lab, &idp(&p.sum(&p)), &seq(&sugar::codiag(&p), &sugar::diag(&p)))
    }),
    ("◁⊕ ; ▷⊕ ≤ id", |lab| {
        let p = lab.obj();
        leq(lab, &seq(&sugar::diag(&p), &sugar::codiag(&p)), &idp(&p))
    }),
    ("!⊕ ; ¡⊕ ≤ id", |lab| {
        let p = lab.obj();
        leq(lab, &seq(&sugar::bang(&p), &sugar::cobang(&p)), &idp(&p))
    }),
    ("id₀ ≤ ¡⊕ ; !⊕", |lab| {
        let p = lab.obj();
        leq(lab, &Tape::id_zero(), &seq(&sugar::cobang(&p), &sugar::bang(&p)))
    }),
];

// ---------------------------------------------------------------------------
// trace axioms

fn tr(p: &Polynomial, t: &Tape) -> Tape {
    sugar::trace_poly(p, t).expect("harness builds well-shaped traces")
}

static TRACE_LAWS: &[(&str, Build)] = &[
    ("tr_P σ⊕_{P,P} = id_P", |lab| {
        let p = lab.obj();
        eq(lab, &tr(&p, &sym(&p, &p)), &idp(&p))
    }),
    ("tr_P(▷⊕ ; ◁⊕) = id_P", |lab| {
        let p = lab.obj();
        eq(lab, &tr(&p, &seq(&sugar::codiag(&p), &sugar::diag(&p))), &idp(&p))
    }),
    ("tr_P((id ⊕ u) ; t ; (id ⊕ v)) = u ; tr_P t ; v", |lab| {
        let (p, x, y, x2, y2) = (lab.obj(), lab.obj(), lab.obj(), lab.obj(), lab.obj());
        let t = lab.arrow(&p.sum(&x), &p.sum(&y));
        let (u, v) = (lab.arrow(&x2, &x), lab.arrow(&y, &y2));
        let lhs = tr(&p, &seqs(&[&plus(&idp(&p), &u), &t, &plus(&idp(&p), &v)]));
        eq(lab, &lhs, &seqs(&[&u, &tr(&p, &t), &v]))
    }),
    ("tr_P(t ⊕ s) = tr_P t ⊕ s", |lab| {
        let (p, x, y, z, w) = (lab.obj(), lab.obj(), lab.obj(), lab.obj(), lab.obj());
        let t = lab.arrow(&p.sum(&x), &p.sum(&y));
        let s = lab.arrow(&z, &w);
        eq(lab, &tr(&p, &plus(&t, &s)), &plus(&tr(&p, &t), &s))
    }),
    ("tr_Q tr_P t = tr_{P⊕Q} t", |lab| {
        let (p, q, x, y) = (lab.obj(), lab.obj(), lab.obj(), lab.obj());
        let pq = p.sum(&q);
        let t = lab.arrow(&pq.sum(&x), &pq.sum(&y));
        let nested = lab.ev(&tr(&q, &tr(&p, &t)))?;
        let whole = lab.ev(&t)?.trace(&pq)?;
        rel_eq(lab, &nested, &whole)
    }),
    ("tr_0 t = t", |lab| {
        let (x, y) = (lab.obj(), lab.obj());
        let f = lab.arrow(&x, &y);
        let t = lab.ev(&f)?;
        rel_eq(lab, &t.trace(&Polynomial::zero())?, &t)
    }),
    ("tr_P(t ; (u ⊕ id)) = tr_Q((u ⊕ id) ; t)", |lab| {
        let (p, q, x, y) = (lab.obj(), lab.obj(), lab.obj(), lab.obj());
        let t = lab.arrow(&p.sum(&x), &q.sum(&y));
        let u = lab.arrow(&q, &p);
        let lhs = tr(&p, &seq(&t, &plus(&u, &idp(&y))));
        eq(lab, &lhs, &tr(&q, &seq(&plus(&u, &idp(&x)), &t)))
    }),
    ("f ; (r ⊕ id) ≤ (r ⊕ id) ; g ⇒ tr f ≤ tr g", |lab| {
        let (s, t, x, y) = (lab.obj(), lab.obj(), lab.obj(), lab.obj());
        let (xc, yc) = (lab.carrier(&x), lab.carrier(&y));
        // g contains (r†⊕id);f;(r⊕id), which meets the premise when r is total
        let r = lab.total_rel(&s, &t);
        let f = lab.rel(&s.sum(&x), &s.sum(&y));
        let noise = lab.rel(&t.sum(&x), &t.sum(&y));
        let r_y = r.sum(&FinRel::identity(&yc));
        let r_x = r.sum(&FinRel::identity(&xc));
        let g = r.converse().sum(&FinRel::identity(&xc)).compose(&f)?.compose(&r_y)?.union(&noise)?;
        if !f.compose(&r_y)?.is_subset(&r_x.compose(&g)?)? {
            return Ok(Outcome::Vacuous);
        }
        let ft = lab.arrow_from(&s.sum(&x), &s.sum(&y), &f);
        let gt = lab.arrow_from(&t.sum(&x), &t.sum(&y), &g);
        leq(lab, &tr(&s, &ft), &tr(&t, &gt))
    }),
    ("(r ⊕ id) ; f ≤ g ; (r ⊕ id) ⇒ tr f ≤ tr g", |lab| {
        let (s, t, x, y) = (lab.obj(), lab.obj(), lab.obj(), lab.obj());
        let (xc, yc) = (lab.carrier(&x), lab.carrier(&y));
        // r : T → S surjective, so g = (r⊕id);f;(r†⊕id) ∪ noise meets the premise
        let r = lab.total_rel(&s, &t).converse();
        let f = lab.rel(&s.sum(&x), &s.sum(&y));
        let noise = lab.rel(&t.sum(&x), &t.sum(&y));
        let r_x = r.sum(&FinRel::identity(&xc));
        let r_y = r.sum(&FinRel::identity(&yc));
        let g = r_x.compose(&f)?.compose(&r.converse().sum(&FinRel::identity(&yc)))?.union(&noise)?;
        if !r_x.compose(&f)?.is_subset(&g.compose(&r_y)?)? {
            return Ok(Outcome::Vacuous);
        }
        let ft = lab.arrow_from(&s.sum(&x), &s.sum(&y), &f);
        let gt = lab.arrow_from(&t.sum(&x), &t.sum(&y), &g);
        leq(lab, &tr(&s, &ft), &tr(&t, &gt))
    }),
];

// ---------------------------------------------------------------------------
// Cartesian bicategory axioms

fn small(lab: &mut Lab) -> Polynomial {
    lab.bound = 6;
    lab.obj()
}

fn ten(a: &Tape, b: &Tape) -> Tape {
    sugar::tensor(a, b)
}

static CB_LAWS: &[(&str, Build)] = &[
    ("σ⊗ ; σ⊗ = id", |lab| {
        let (p, q) = (small(lab), small(lab));
        let lhs = seq(&sugar::symmetry_tensor(&p, &q), &sugar::symmetry_tensor(&q, &p));
        eq(lab, &lhs, &idp(&p.product(&q)))
    }),
    ("(f ⊗ g) ; σ⊗ = σ⊗ ; (g ⊗ f)", |lab| {
        let (p, q, r, s) = (small(lab), small(lab), small(lab), small(lab));
        let (f, g) = (lab.arrow(&p, &r), lab.arrow(&q, &s));
        let lhs = seq(&ten(&f, &g), &sugar::symmetry_tensor(&r, &s));
        eq(lab, &lhs, &seq(&sugar::symmetry_tensor(&p, &q), &ten(&g, &f)))
    }),
    ("◁ ; (◁ ⊗ id) = ◁ ; (id ⊗ ◁)", |lab| {
        let p = small(lab);
        let c = sugar::copier(&p);
        eq(lab, &seq(&c, &ten(&c, &idp(&p))), &seq(&c, &ten(&idp(&p), &c)))
    }),
    ("◁ ; (! ⊗ id) = id", |lab| {
        let p = small(lab);
        eq(lab, &seq(&sugar::copier(&p), &ten(&sugar::discharger(&p), &idp(&p))), &idp(&p))
    }),
    ("◁ ; σ⊗ = ◁", |lab| {
        let p = small(lab);
        eq(lab, &seq(&sugar::copier(&p), &sugar::symmetry_tensor(&p, &p)), &sugar::copier(&p))
    }),
    ("(▷ ⊗ id) ; ▷ = (id ⊗ ▷) ; ▷", |lab| {
        let p = small(lab);
        let c = sugar::cocopier(&p);
        eq(lab, &seq(&ten(&c, &idp(&p)), &c), &seq(&ten(&idp(&p), &c), &c))
    }),
    ("(¡ ⊗ id) ; ▷ = id", |lab| {
        let p = small(lab);
        eq(lab, &seq(&ten(&sugar::codischarger(&p), &idp(&p)), &sugar::cocopier(&p)), &idp(&p))
    }),
    ("σ⊗ ; ▷ = ▷", |lab| {
        let p = small(lab);
        eq(lab, &seq(&sugar::symmetry_tensor(&p, &p), &sugar::cocopier(&p)), &sugar::cocopier(&p))
    }),
    ("◁ ; ▷ = id", |lab| {
        let p = small(lab);
        eq(lab, &seq(&sugar::copier(&p), &sugar::cocopier(&p)), &idp(&p))
    }),
    ("(id ⊗ ◁) ; (▷ ⊗ id) = ▷ ; ◁", |lab| {
        let p = small(lab);
        let lhs = seq(&ten(&idp(&p), &sugar::copier(&p)), &ten(&sugar::cocopier(&p), &idp(&p)));
        eq(lab, &lhs, &seq(&sugar::cocopier(&p), &sugar::copier(&p)))
    }),
    ("f ; ◁ ≤ ◁ ; (f ⊗ f)", |lab| {
        let (p, q) = (small(lab), small(lab));
        let f = lab.arrow(&p, &q);
        leq(lab, &seq(&f, &sugar::copier(&q)), &seq(&sugar::copier(&p), &ten(&f, &f)))
    }),
    ("f ; ! ≤ !", |lab| {
        let (p, q) = (small(lab), small(lab));
        let f = lab.arrow(&p, &q);
        leq(lab, &seq(&f, &sugar::discharger(&q)), &sugar::discharger(&p))
    }),
    ("¡ ; ! ≤ id₁", |lab| {
        let p = small(lab);
        leq(lab, &seq(&sugar::codischarger(&p), &sugar::discharger(&p)), &idp(&Polynomial::one()))
    }),
    ("id ≤ ! ; ¡", |lab| {
        let p = small(lab);
        leq(lab, &idp(&p), &seq(&sugar::discharger(&p), &sugar::codischarger(&p)))
    }),
    ("▷ ; ◁ ≤ id", |lab| {
        let p = small(lab);
        leq(lab, &seq(&sugar::cocopier(&p), &sugar::copier(&p)), &idp(&p.product(&p)))
    }),
    ("id ≤ ◁ ; ▷", |lab| {
        let p = small(lab);
        leq(lab, &idp(&p), &seq(&sugar::copier(&p), &sugar::cocopier(&p)))
    }),
];

// ---------------------------------------------------------------------------
// coherence of the polynomial structure with the direct relational one

fn structural_vs_direct(lab: &mut Lab, kind: Structural, g: GeneratorKind) -> Result<Outcome, EvalError> {
    lab.bound = 8;
    let p = lab.obj();
    let direct = FinRel::generator(g, &lab.carrier(&p));
    let via = lab.ev(&sugar::structural(&kind, &p))?;
    rel_eq(lab, &via, &direct)
}

static COHERENCE_LAWS: &[(&str, Build)] = &[
    ("◁_P = {(x,(x,x))}", |lab| structural_vs_direct(lab, Structural::Copier, GeneratorKind::Copier)),
    ("!_P = {(x,•)}", |lab| structural_vs_direct(lab, Structural::Discharger, GeneratorKind::Discharger)),
    ("▷_P = {((x,x),x)}", |lab| structural_vs_direct(lab, Structural::Cocopier, GeneratorKind::Cocopier)),
    ("¡_P = {(•,x)}", |lab| structural_vs_direct(lab, Structural::Codischarger, GeneratorKind::Codischarger)),
    ("◁⊕_P = {(x,ι₁x),(x,ι₂x)}", |lab| structural_vs_direct(lab, Structural::Diag, GeneratorKind::Diag)),
    ("▷⊕_P = {(ι₁x,x),(ι₂x,x)}", |lab| structural_vs_direct(lab, Structural::Codiag, GeneratorKind::Codiag)),
    ("!⊕_P = ∅", |lab| structural_vs_direct(lab, Structural::Bang, GeneratorKind::Bang)),
    ("¡⊕_P = ∅", |lab| structural_vs_direct(lab, Structural::Cobang, GeneratorKind::Cobang)),
    ("σ⊗_{P,Q} = {((x,y),(y,x))}", |lab| {
        lab.bound = 8;
        let (p, q) = (lab.obj(), lab.obj());
        let direct = FinRel::symmetry_tensor(&lab.carrier(&p), &lab.carrier(&q));
        let via = lab.ev(&sugar::symmetry_tensor(&p, &q))?;
        rel_eq(lab, &via, &direct)
    }),
    ("σ⊕_{P,Q} = {(ι₁x,ι₂x),(ι₂y,ι₁y)}", |lab| {
        let (p, q) = (lab.obj(), lab.obj());
        let direct = FinRel::symmetry_sum(&lab.carrier(&p), &lab.carrier(&q));
        let via = lab.ev(&sym(&p, &q))?;
        rel_eq(lab, &via, &direct)
    }),
    ("δˡ_{P,Q,R} = {((x,ιᵢy),ιᵢ(x,y))}", |lab| {
        lab.bound = 6;
        let (p, q, r) = (lab.obj(), lab.obj(), lab.obj());
        let direct = FinRel::distributor(&lab.carrier(&p), &lab.carrier(&q), &lab.carrier(&r));
        let via = lab.ev(&sugar::distributor(&p, &q, &r))?;
        let inv = lab.ev(&sugar::distributor_inv(&p, &q, &r))?;
        match rel_eq(lab, &via, &direct)? {
            Outcome::Pass => rel_eq(lab, &inv, &direct.converse()),
            other => Ok(other),
        }
    }),
    ("f ⊕ g = direct sum", |lab| {
        let (p, q, r, s) = (lab.obj(), lab.obj(), lab.obj(), lab.obj());
        let (f, g) = (lab.arrow(&p, &q), lab.arrow(&r, &s));
        let direct = lab.ev(&f)?.sum(&lab.ev(&g)?);
        let via = lab.ev(&plus(&f, &g))?;
        rel_eq(lab, &via, &direct)
    }),
    ("f ⊗ g = {((x,y),(x',y'))}", |lab| {
        let (p, q, r, s) = (small(lab), small(lab), small(lab), small(lab));
        let (f, g) = (lab.arrow(&p, &q), lab.arrow(&r, &s));
        let direct = lab.ev(&f)?.tensor(&lab.ev(&g)?);
        let via = lab.ev(&ten(&f, &g))?;
        rel_eq(lab, &via, &direct)
    }),
    ("f† = {(y,x) | (x,y) ∈ f}", |lab| {
        let (p, q) = (small(lab), small(lab));
        let f = lab.arrow(&p, &q);
        let direct = lab.ev(&f)?.converse();
        let via = lab.ev(&sugar::converse(&f))?;
        rel_eq(lab, &via, &direct)
    }),
    ("tr_S f ⊗ id_Z = tr_{S⊗Z}(f ⊗ id_Z)", |lab| {
        let (s, x, y, z) = (small(lab), small(lab), small(lab), small(lab));
        let f = lab.arrow(&s.sum(&x), &s.sum(&y));
        let lhs = ten(&tr(&s, &f), &idp(&z));
        eq(lab, &lhs, &tr(&s.product(&z), &ten(&f, &idp(&z))))
    }),
];

// ---------------------------------------------------------------------------
// derived laws

fn meet(a: &Tape, b: &Tape) -> Tape {
    sugar::meet(a, b).expect("same type")
}

fn join(a: &Tape, b: &Tape) -> Tape {
    sugar::join(a, b).expect("same type")
}

fn star(a: &Tape) -> Tape {
    sugar::star(a).expect("endo")
}

fn dag(a: &Tape) -> Tape {
    sugar::converse(a)
}

/// Two small objects and three random arrows between them.
fn hom3(lab: &mut Lab) -> (Polynomial, Polynomial, Tape, Tape, Tape) {
    let (p, q) = (small(lab), small(lab));
    let (f, g, h) = (lab.arrow(&p, &q), lab.arrow(&p, &q), lab.arrow(&p, &q));
    (p, q, f, g, h)
}

fn endo(lab: &mut Lab) -> (Polynomial, Tape) {
    let p = small(lab);
    let f = lab.arrow(&p, &p);
    (p, f)
}

static DERIVED_LAWS: &[(&str, Build)] = &[
    ("(f ⊓ g) ⊓ h = f ⊓ (g ⊓ h)", |lab| {
        let (_, _, f, g, h) = hom3(lab);
        eq(lab, &meet(&meet(&f, &g), &h), &meet(&f, &meet(&g, &h)))
    }),
    ("f ⊓ g = g ⊓ f", |lab| {
        let (_, _, f, g, _) = hom3(lab);
        eq(lab, &meet(&f, &g), &meet(&g, &f))
    }),
    ("f ⊓ ⊤ = f", |lab| {
        let (p, q, f, _, _) = hom3(lab);
        eq(lab, &meet(&f, &sugar::top(&p, &q)), &f)
    }),
    ("f ⊓ f = f", |lab| {
        let (_, _, f, _, _) = hom3(lab);
        eq(lab, &meet(&f, &f), &f)
    }),
    ("(f ⊓ g) ; h ≤ f;h ⊓ g;h", |lab| {
        let (p, q, f, g, _) = hom3(lab);
        let r = small(lab);
        let h = lab.arrow(&q, &r);
        let _ = p;
        leq(lab, &seq(&meet(&f, &g), &h), &meet(&seq(&f, &h), &seq(&g, &h)))
    }),
    ("h ; (f ⊓ g) ≤ h;f ⊓ h;g", |lab| {
        let (p, _, f, g, _) = hom3(lab);
        let r = small(lab);
        let h = lab.arrow(&r, &p);
        leq(lab, &seq(&h, &meet(&f, &g)), &meet(&seq(&h, &f), &seq(&h, &g)))
    }),
    ("f ; ⊤ ≤ ⊤", |lab| {
        let (p, q, f, _, _) = hom3(lab);
        let r = small(lab);
        leq(lab, &seq(&f, &sugar::top(&q, &r)), &sugar::top(&p, &r))
    }),
    ("⊤ ; f ≤ ⊤", |lab| {
        let (p, q, f, _, _) = hom3(lab);
        let r = small(lab);
        leq(lab, &seq(&sugar::top(&r, &p), &f), &sugar::top(&r, &q))
    }),
    ("(f ; g)† = g† ; f†", |lab| {
        let (p, q, r) = (small(lab), small(lab), small(lab));
        let (f, g) = (lab.arrow(&p, &q), lab.arrow(&q, &r));
        eq(lab, &dag(&seq(&f, &g)), &seq(&dag(&g), &dag(&f)))
    }),
    ("(f ⊗ g)† = f† ⊗ g†", |lab| {
        let (p, q, r, s) = (small(lab), small(lab), small(lab), small(lab));
        let (f, g) = (lab.arrow(&p, &q), lab.arrow(&r, &s));
        eq(lab, &dag(&ten(&f, &g)), &ten(&dag(&f), &dag(&g)))
    }),
    ("id† = id", |lab| {
        let p = small(lab);
        eq(lab, &dag(&idp(&p)), &idp(&p))
    }),
    ("f†† = f", |lab| {
        let (_, _, f, _, _) = hom3(lab);
        eq(lab, &dag(&dag(&f)), &f)
    }),
    ("f ⊓ (g ⊔ h) = (f ⊓ g) ⊔ (f ⊓ h)", |lab| {
        let (_, _, f, g, h) = hom3(lab);
        eq(lab, &meet(&f, &join(&g, &h)), &join(&meet(&f, &g), &meet(&f, &h)))
    }),
    ("f ⊔ (g ⊓ h) = (f ⊔ g) ⊓ (f ⊔ h)", |lab| {
        let (_, _, f, g, h) = hom3(lab);
        eq(lab, &join(&f, &meet(&g, &h)), &meet(&join(&f, &g), &join(&f, &h)))
    }),
    ("f ⊔ ⊤ = ⊤", |lab| {
        let (p, q, f, _, _) = hom3(lab);
        eq(lab, &join(&f, &sugar::top(&p, &q)), &sugar::top(&p, &q))
    }),
    ("f ⊓ ⊥ = ⊥", |lab| {
        let (p, q, f, _, _) = hom3(lab);
        eq(lab, &meet(&f, &sugar::bot(&p, &q)), &sugar::bot(&p, &q))
    }),
    ("(f ⊗ g)* ≤ f* ⊗ g*", |lab| {
        let ((_, f), (_, g)) = (endo(lab), endo(lab));
        leq(lab, &star(&ten(&f, &g)), &ten(&star(&f), &star(&g)))
    }),
    ("(f ⊓ g)* ≤ f* ⊓ g*", |lab| {
        let p = small(lab);
        let (f, g) = (lab.arrow(&p, &p), lab.arrow(&p, &p));
        leq(lab, &star(&meet(&f, &g)), &meet(&star(&f), &star(&g)))
    }),
    ("(f†)* = (f*)†", |lab| {
        let (_, f) = endo(lab);
        eq(lab, &star(&dag(&f)), &dag(&star(&f)))
    }),
    ("⊤* = ⊤", |lab| {
        let p = small(lab);
        eq(lab, &star(&sugar::top(&p, &p)), &sugar::top(&p, &p))
    }),
    ("(f ⊕ g)† = f† ⊕ g†", |lab| {
        let (p, q, r, s) = (small(lab), small(lab), small(lab), small(lab));
        let (f, g) = (lab.arrow(&p, &q), lab.arrow(&r, &s));
        eq(lab, &dag(&plus(&f, &g)), &plus(&dag(&f), &dag(&g)))
    }),
    ("(f ⊔ g)† = f† ⊔ g†", |lab| {
        let (_, _, f, g, _) = hom3(lab);
        eq(lab, &dag(&join(&f, &g)), &join(&dag(&f), &dag(&g)))
    }),
    ("⊥† = ⊥", |lab| {
        let (p, q) = (small(lab), small(lab));
        eq(lab, &dag(&sugar::bot(&p, &q)), &sugar::bot(&q, &p))
    }),
    ("f* ⊗ id = (f ⊗ id)*", |lab| {
        let (_, f) = endo(lab);
        let z = small(lab);
        eq(lab, &ten(&star(&f), &idp(&z)), &star(&ten(&f, &idp(&z))))
    }),
    ("id ⊗ f* = (id ⊗ f)*", |lab| {
        let (_, f) = endo(lab);
        let z = small(lab);
        eq(lab, &ten(&idp(&z), &star(&f)), &star(&ten(&idp(&z), &f)))
    }),
    ("f* ⊗ g* = ((f ⊗ id) ⊔ (id ⊗ g))*", |lab| {
        let ((p, f), (q, g)) = (endo(lab), endo(lab));
        let body = join(&ten(&f, &idp(&q)), &ten(&idp(&p), &g));
        eq(lab, &ten(&star(&f), &star(&g)), &star(&body))
    }),
    ("f* = id ⊔ f ; f*", |lab| {
        let (p, f) = endo(lab);
        eq(lab, &star(&f), &join(&idp(&p), &seq(&f, &star(&f))))
    }),
    ("(f ⊔ g)* = (f* ; g)* ; f*", |lab| {
        let p = small(lab);
        let (f, g) = (lab.arrow(&p, &p), lab.arrow(&p, &p));
        eq(lab, &star(&join(&f, &g)), &seq(&star(&seq(&star(&f), &g)), &star(&f)))
    }),
    ("(f ; g)* ; f = f ; (g ; f)*", |lab| {
        let (p, q) = (small(lab), small(lab));
        let (f, g) = (lab.arrow(&p, &q), lab.arrow(&q, &p));
        eq(lab, &seq(&star(&seq(&f, &g)), &f), &seq(&f, &star(&seq(&g, &f))))
    }),
];

// ---------------------------------------------------------------------------
// Kozen's axioms on relations and boolean matrices

/// Random endo-relations of sizes 1..=5, typed relation matrices, and every
/// boolean matrix up to 4×4 (with random companions for the binary laws).
pub fn kozen(samples: usize, seed: u64) -> LawReport {
    let mut rep = LawReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=5 {
        let a = Carrier::of_sort("A", n);
        let per = samples.div_ceil(5).max(1);
        rep.merge(check_ka_laws(&RelKa, &a, per, &mut rng, |r| {
            let d = r.gen_range(0.05..0.6);
            FinRel::random(&a, &a, d, r)
        }));
    }
    let objs = vec![Carrier::of_sort("A", 2), Carrier::of_sort("B", 3)];
    rep.merge(check_ka_laws(&MatKa(RelKa), &objs, samples.div_ceil(5).max(1), &mut rng, |r| {
        Mat::from_fn(objs.clone(), objs.clone(), |i, j| FinRel::random(&objs[i], &objs[j], 0.3, r))
    }));
    let parts: Vec<LawReport> = (1..=4usize).into_par_iter().map(|n| exhaustive_boolean(n, seed)).collect();
    for p in parts {
        rep.merge(p);
    }
    rep
}

fn bool_mat(n: usize, mask: u32) -> Mat<BoolKa> {
    Mat::from_fn(vec![(); n], vec![(); n], |i, j| mask >> (i * n + j) & 1 == 1)
}

fn exhaustive_boolean(n: usize, seed: u64) -> LawReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let total = 1u32 << (n * n);
    let obj = vec![(); n];
    let triples: Vec<_> = (0..total)
        .map(|k| {
            let g = rng.gen_range(0..total);
            let h = rng.gen_range(0..total);
            (bool_mat(n, k), bool_mat(n, g), bool_mat(n, h))
        })
        .collect();
    let mut rep = check_ka_laws_on(&MatKa(BoolKa), &obj, triples);
    for k in 0..total {
        let m = bool_mat(n, k);
        let by_blocks = bool_mat_to_rel(&m.star(&BoolKa).expect("square"));
        let by_fixpoint = bool_mat_to_rel(&m).star().expect("endo");
        if by_blocks != by_fixpoint {
            rep.fail("block star = fixpoint star", || format!("matrix {}", bool_mat_to_rel(&m).show()));
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// star from trace and trace from star

/// `tr_S` of `f : S ⊕ X → S ⊕ Y` by path search: `x` reaches `y` directly,
/// or through a nonempty walk inside `S`.
pub fn trace_by_paths(f: &FinRel, s: &Polynomial) -> FinRel {
    let (sc, dom) = f.dom().split_at(s.len());
    let (_, cod) = f.cod().split_at(s.len());
    let ns = sc.size();
    let mut out = FinRel::empty(&dom, &cod);
    let (nx, ny) = (dom.size(), cod.size());
    for x in 0..nx {
        let mut seen = vec![false; ns];
        let mut stack: Vec<usize> = (0..ns).filter(|&s| f.contains(ns + x, s)).collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            for (t, done) in seen.iter_mut().enumerate() {
                if !*done && f.contains(s, t) {
                    *done = true;
                    stack.push(t);
                }
            }
        }
        for y in 0..ny {
            if f.contains(ns + x, ns + y) || (0..ns).any(|s| seen[s] && f.contains(s, ns + y)) {
                out.insert(x, y);
            }
        }
    }
    out
}

fn star_trace_one(lab: &mut Lab, r: &FinRel, rep: &mut LawReport) -> Result<(), EvalError> {
    let a: Polynomial = Monomial::of(&["A"]).into();
    let t = lab.arrow_from(&a, &a, r);
    let fix = r.star()?;
    let via_trace = lab.ev(&star(&t))?;
    if via_trace != fix {
        rep.fail("R* = tr((R ⊕ id) ; ▷⊕ ; ◁⊕)", || format!("R = {}", r.show()));
    }
    let blocks = bool_mat_to_rel(&rel_to_bool_mat(r).star(&BoolKa).expect("square"));
    if blocks != fix {
        rep.fail("R* = block-recursive matrix star", || format!("R = {}", r.show()));
    }
    rep.checked += 1;
    Ok(())
}

fn trace_star_one(lab: &mut Lab, rep: &mut LawReport) -> Result<(), EvalError> {
    let (s, x, y) = (lab.obj(), lab.obj(), lab.obj());
    let (sx, sy) = (s.sum(&x), s.sum(&y));
    let t = lab.arrow(&sx, &sy);
    let traced = lab.ev(&tr(&s, &t))?;
    // blocks of t picked out with injections and projections
    let inj_s = plus(&idp(&s), &sugar::cobang(&x));
    let inj_x = plus(&sugar::cobang(&s), &idp(&x));
    let prj_s = plus(&idp(&s), &sugar::bang(&y));
    let prj_y = plus(&sugar::bang(&s), &idp(&y));
    let t_ss = seqs(&[&inj_s, &t, &prj_s]);
    let t_sy = seqs(&[&inj_s, &t, &prj_y]);
    let t_xs = seqs(&[&inj_x, &t, &prj_s]);
    let t_xy = seqs(&[&inj_x, &t, &prj_y]);
    let via_star = join(&seqs(&[&t_xs, &star(&t_ss), &t_sy]), &t_xy);
    let by_star = lab.ev(&via_star)?;
    if by_star != traced {
        let w = lab.describe();
        rep.fail("tr_S t = t_XS ; t_SS* ; t_SY ⊔ t_XY", || w);
    }
    let paths = trace_by_paths(&lab.ev(&t)?, &s);
    if paths != traced {
        let w = lab.describe();
        rep.fail("tr_S t = path semantics", || w);
    }
    rep.checked += 1;
    Ok(())
}

/// Star via fixpoint against star via trace (every relation on carriers of
/// size ≤ 3, random ones at sizes 4 and 5), and trace via star against
/// trace via paths on random polynomial-typed tapes.
pub fn star_trace(samples: usize, seed: u64) -> Result<LawReport, EvalError> {
    let mut rep = LawReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=3usize {
        let mut lab = Lab::with_sizes(ChaCha8Rng::seed_from_u64(seed), &[("A", n)]);
        let a = Carrier::of_sort("A", n);
        for mask in 0..1u128 << (n * n) {
            star_trace_one(&mut lab, &FinRel::from_mask(&a, &a, mask), &mut rep)?;
        }
    }
    for k in 0..samples {
        let n = 4 + k % 2;
        let mut lab = Lab::with_sizes(ChaCha8Rng::seed_from_u64(rng.gen()), &[("A", n)]);
        let a = Carrier::of_sort("A", n);
        let d = rng.gen_range(0.05..0.5);
        let r = FinRel::random(&a, &a, d, &mut rng);
        star_trace_one(&mut lab, &r, &mut rep)?;
    }
    for _ in 0..samples {
        let mut lab = Lab::new(&mut rng, 4);
        trace_star_one(&mut lab, &mut rep)?;
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// matrix normal form

fn part(name: &str, n: usize) -> Polynomial {
    if n == 0 {
        Polynomial::zero()
    } else {
        Monomial::of(&[name]).into()
    }
}

fn part_sizes() -> Vec<(usize, usize)> {
    (0..=3).flat_map(|a| (0..=3).map(move |b| (a, b))).filter(|(a, b)| a + b <= 4).collect()
}

fn blocks_leq(f: &crate::rel::Blocks, g: &crate::rel::Blocks) -> bool {
    let le = |a: &FinRel, b: &FinRel| a.is_subset(b).expect("same carriers");
    le(&f.st, &g.st) && le(&f.sy, &g.sy) && le(&f.xt, &g.xt) && le(&f.xy, &g.xy)
}

/// Every relation `S ⊕ X → T ⊕ Y` with both sides of size ≤ 4 splits into
/// blocks that recompose to it; the order is blockwise, checked on every pair
/// when there are at most 2⁸ relations and on `samples` random pairs
/// otherwise. Random tapes also compare the block tapes built from
/// injections and projections with the direct split.
pub fn normal_form(samples: usize, seed: u64) -> Result<LawReport, EvalError> {
    let shapes: Vec<_> = part_sizes().into_iter().flat_map(|d| part_sizes().into_iter().map(move |c| (d, c))).collect();
    let parts: Vec<Result<LawReport, EvalError>> = shapes
        .par_iter()
        .enumerate()
        .map(|(k, &((s, x), (t, y)))| {
            let sizes = |so: &Sort| match so.name() {
                "S" => s,
                "X" => x,
                "T" => t,
                _ => y,
            };
            let (ps, pt) = (part("S", s), part("T", t));
            let dom = Carrier::new(&ps.sum(&part("X", x)), sizes);
            let cod = Carrier::new(&pt.sum(&part("Y", y)), sizes);
            let bits = dom.size() * cod.size();
            let mut rep = LawReport::default();
            let all: Vec<(FinRel, crate::rel::Blocks)> = (0..1u128 << bits)
                .map(|m| {
                    let f = FinRel::from_mask(&dom, &cod, m);
                    let b = f.blocks(&ps, &pt)?;
                    Ok((f, b))
                })
                .collect::<Result<_, EvalError>>()?;
            for (f, b) in &all {
                rep.checked += 1;
                if &FinRel::recompose(b)? != f {
                    rep.fail("recompose ∘ blocks = id", || f.show());
                }
            }
            let mut order = |f: &(FinRel, crate::rel::Blocks), g: &(FinRel, crate::rel::Blocks)| {
                rep.checked += 1;
                if f.0.is_subset(&g.0).expect("same carriers") != blocks_leq(&f.1, &g.1) {
                    rep.fail("f ≤ g ⇔ blockwise ≤", || format!("f = {}, g = {}", f.0.show(), g.0.show()));
                }
            };
            if bits <= 8 {
                for f in &all {
                    for g in &all {
                        order(f, g);
                    }
                }
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(k as u64);
                for _ in 0..samples {
                    let f = &all[rng.gen_range(0..all.len())];
                    // g ⊇ f half of the time so that both verdicts occur
                    let g = if rng.gen_bool(0.5) {
                        let extra = &all[rng.gen_range(0..all.len())];
                        let u = f.0.union(&extra.0)?;
                        let b = u.blocks(&ps, &pt)?;
                        (u, b)
                    } else {
                        all[rng.gen_range(0..all.len())].clone()
                    };
                    order(f, &g);
                }
            }
            Ok(rep)
        })
        .collect();
    let mut rep = LawReport::default();
    for p in parts {
        rep.merge(p?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut lab = Lab::new(&mut rng, 3);
        let (s, x, t, y) = (lab.obj(), lab.obj(), lab.obj(), lab.obj());
        let f = lab.arrow(&s.sum(&x), &t.sum(&y));
        let direct = lab.ev(&f)?.blocks(&s, &t)?;
        let sel = |a: &Tape, b: &Tape| seqs(&[a, &f, b]);
        let inj = [plus(&idp(&s), &sugar::cobang(&x)), plus(&sugar::cobang(&s), &idp(&x))];
        let prj = [plus(&idp(&t), &sugar::bang(&y)), plus(&sugar::bang(&t), &idp(&y))];
        let via = crate::rel::Blocks {
            st: lab.ev(&sel(&inj[0], &prj[0]))?,
            sy: lab.ev(&sel(&inj[0], &prj[1]))?,
            xt: lab.ev(&sel(&inj[1], &prj[0]))?,
            xy: lab.ev(&sel(&inj[1], &prj[1]))?,
        };
        rep.checked += 1;
        if via != direct {
            let w = lab.describe();
            rep.fail("f_ST = (id ⊕ ¡⊕) ; f ; (id ⊕ !⊕) etc.", || w);
        }
    }
    Ok(rep)
}

// ---------------------------------------------------------------------------
// predicates and coreflexives

/// Monomials with carriers of size ≤ 4 together with the sort sizes.
fn small_monomials() -> Vec<(Monomial, Vec<(&'static str, usize)>)> {
    let mut out = vec![(Monomial::unit(), vec![("A", 1)])];
    for n in 1..=4 {
        out.push((Monomial::of(&["A"]), vec![("A", n)]));
    }
    for a in 1..=4usize {
        for b in 1..=4usize {
            if a * b <= 4 {
                out.push((Monomial::of(&["A", "B"]), vec![("A", a), ("B", b)]));
            }
        }
    }
    for n in 1..=2 {
        out.push((Monomial::of(&["A", "A"]), vec![("A", n)]));
    }
    out
}

/// `i ∘ c = id` on every predicate and `c ∘ i = id` on every coreflexive over
/// carriers of size ≤ 4; coreflexive ⇔ transitive ∧ symmetric ∧ single-valued
/// on every endo-relation of size ≤ 3, through both the direct and the
/// inequational form of each property.
pub fn coreflexives(seed: u64) -> Result<LawReport, EvalError> {
    let mut rep = LawReport::default();
    for (u, sizes) in small_monomials() {
        let mut lab = Lab::with_sizes(ChaCha8Rng::seed_from_u64(seed), &sizes);
        let up: Polynomial = u.clone().into();
        let one = Polynomial::one();
        let (uc, oc) = (lab.carrier(&up), lab.carrier(&one));
        let n = uc.size();
        for mask in 0..1u128 << n {
            rep.checked += 1;
            let g = FinRel::from_mask(&uc, &oc, mask);
            let gt = lab.arrow_from(&up, &one, &g);
            let c = coreflexive(&gt)?;
            let cr = lab.ev(&c)?;
            let mut direct = FinRel::empty(&uc, &uc);
            (0..n).filter(|&x| g.contains(x, 0)).for_each(|x| direct.insert(x, x));
            if cr != direct {
                rep.fail("c(g) = {(x,x) | (x,•) ∈ g}", || g.show());
            }
            if lab.ev(&image(&c)?)? != g {
                rep.fail("i(c(g)) = g", || g.show());
            }
            let kt = lab.arrow_from(&up, &up, &direct);
            if lab.ev(&coreflexive(&image(&kt)?)?)? != direct {
                rep.fail("c(i(k)) = k", || direct.show());
            }
        }
    }
    for n in 1..=3usize {
        let a = Carrier::of_sort("A", n);
        for mask in 0..1u128 << (n * n) {
            rep.checked += 1;
            let r = FinRel::from_mask(&a, &a, mask);
            let props = |check: &dyn Fn(ArrowProperty) -> bool| {
                let cor = check(ArrowProperty::Cor);
                let rest = check(ArrowProperty::Trn) && check(ArrowProperty::Sym) && check(ArrowProperty::Sv);
                (cor, rest)
            };
            let direct = props(&|p| r.has_property(p).expect("endo"));
            let adjoint = props(&|p| r.has_property_adjoint(p).expect("endo"));
            if direct.0 != direct.1 || adjoint.0 != adjoint.1 {
                rep.fail("COR ⇔ TRN ∧ SYM ∧ SV", || r.show());
            }
            if direct != adjoint {
                rep.fail("direct and inequational properties agree", || r.show());
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_tapes_denote_their_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let mut lab = Lab::new(&mut rng, 3);
            let (p, q) = (lab.obj(), lab.obj());
            let r = lab.rel(&p, &q);
            let t = lab.arrow_from(&p, &q, &r);
            assert_eq!(lab.ev(&t).unwrap(), r);
        }
    }

    #[test]
    fn path_trace_matches_backend() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let mut lab = Lab::new(&mut rng, 3);
            let (s, x, y) = (lab.obj(), lab.obj(), lab.obj());
            let f = lab.rel(&s.sum(&x), &s.sum(&y));
            assert_eq!(trace_by_paths(&f, &s), f.trace(&s).unwrap());
        }
    }

    #[test]
    fn small_runs_hold() {
        for suite in ["tape", "trace", "cb", "coherence", "derived"] {
            let rep = run_suite(suite, 5, 1).unwrap();
            assert!(rep.holds(), "{suite}: {rep:?}");
            assert_eq!(rep.checked, 5 * law_names(suite).len());
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("nope", 1, 0), Err(LawError::UnknownSuite(_))));
    }
}
