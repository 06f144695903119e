//! Interpretations, the semantic functor from tapes to relations, theory
//! model checking and bounded counter-model search.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{EvalError, TypeError};
use crate::poly::{Monomial, Polynomial, Signature, Sort};
use crate::rel::{Carrier, FinRel, GeneratorKind};
use crate::sexpr;
use crate::term::{typecheck_tape, Circuit, CircuitKind, Tape, TapeKind};

/// Carriers for sorts and a relation for every symbol of a signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    signature: Signature,
    sizes: BTreeMap<Sort, usize>,
    symbols: BTreeMap<String, FinRel>,
}

impl Interpretation {
    /// An interpretation with the given sort sizes and every symbol empty.
    pub fn new(signature: &Signature, sizes: BTreeMap<Sort, usize>) -> Result<Interpretation, EvalError> {
        for s in signature.sorts() {
            if !sizes.contains_key(s) {
                return Err(EvalError::NoCarrier(s.name().to_string()));
            }
        }
        let mut i = Interpretation { signature: signature.clone(), sizes, symbols: BTreeMap::new() };
        for (name, (d, c)) in signature.symbols() {
            let rel = FinRel::empty(&i.monomial_carrier(d)?, &i.monomial_carrier(c)?);
            i.symbols.insert(name.clone(), rel);
        }
        Ok(i)
    }

    /// Single-sorted shorthand.
    pub fn with_sizes(signature: &Signature, sizes: &[(&str, usize)]) -> Result<Interpretation, EvalError> {
        Interpretation::new(signature, sizes.iter().map(|(n, k)| (Sort::new(n), *k)).collect())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn sizes(&self) -> &BTreeMap<Sort, usize> {
        &self.sizes
    }

    pub fn size_of(&self, s: &Sort) -> Result<usize, EvalError> {
        self.sizes.get(s).copied().ok_or_else(|| EvalError::NoCarrier(s.name().to_string()))
    }

    pub fn carrier(&self, p: &Polynomial) -> Result<Carrier, EvalError> {
        for s in p.sorts() {
            self.size_of(s)?;
        }
        Ok(Carrier::new(p, |s| self.sizes[s]))
    }

    pub fn monomial_carrier(&self, u: &Monomial) -> Result<Carrier, EvalError> {
        self.carrier(&u.clone().into())
    }

    /// Sets the relation of a declared symbol, checking its carriers.
    pub fn set(&mut self, name: &str, rel: FinRel) -> Result<(), EvalError> {
        let (d, c) = self.signature.symbol(name).ok_or_else(|| TypeError::UnknownSymbol(name.to_string()))?;
        if rel.dom() != &self.monomial_carrier(d)? || rel.cod() != &self.monomial_carrier(c)? {
            return Err(EvalError::BadInterpretation(format!(
                "relation for `{name}` has carriers {:?} → {:?}",
                rel.dom(),
                rel.cod()
            )));
        }
        self.symbols.insert(name.to_string(), rel);
        Ok(())
    }

    /// The same interpretation over a larger signature; new symbols start
    /// empty.
    pub fn extended(&self, signature: &Signature) -> Result<Interpretation, EvalError> {
        let mut out = Interpretation::new(signature, self.sizes.clone())?;
        for (name, rel) in &self.symbols {
            out.set(name, rel.clone())?;
        }
        Ok(out)
    }

    pub fn get(&self, name: &str) -> Option<&FinRel> {
        self.symbols.get(name)
    }

    pub fn symbols(&self) -> &BTreeMap<String, FinRel> {
        &self.symbols
    }

    /// Short human-readable summary, e.g. `A=2; R={(0,1),(1,0)}`.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.sizes.iter().map(|(s, n)| format!("{s}={n}")).collect();
        parts.extend(self.symbols.iter().map(|(n, r)| format!("{n}={}", r.show())));
        parts.join("; ")
    }

    pub fn from_json(text: &str) -> Result<Interpretation, EvalError> {
        let doc: InterpDoc = serde_json::from_str(text).map_err(|e| EvalError::BadInterpretation(e.to_string()))?;
        doc.build()
    }

    pub fn to_json(&self) -> String {
        let doc = InterpDoc {
            sorts: self.sizes.iter().map(|(s, n)| (s.name().to_string(), *n)).collect(),
            symbols: self
                .symbols
                .iter()
                .map(|(name, rel)| {
                    let (d, c) = self.signature.symbol(name).expect("declared");
                    let pairs = rel.pairs().map(|(i, j)| (rel.dom().decode(i).1, rel.cod().decode(j).1)).collect();
                    (name.clone(), SymbolDoc { arity: names(d), coarity: names(c), pairs })
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

fn names(u: &Monomial) -> Vec<String> {
    u.factors().iter().map(|s| s.name().to_string()).collect()
}

fn monomial_of(names: &[String]) -> Monomial {
    Monomial::new(names.iter().map(|n| Sort::new(n)).collect())
}

#[derive(Serialize, Deserialize)]
struct SymbolDoc {
    arity: Vec<String>,
    coarity: Vec<String>,
    #[serde(default)]
    pairs: Vec<(Vec<usize>, Vec<usize>)>,
}

#[derive(Serialize, Deserialize)]
struct InterpDoc {
    sorts: BTreeMap<String, usize>,
    #[serde(default)]
    symbols: BTreeMap<String, SymbolDoc>,
}

impl InterpDoc {
    fn build(&self) -> Result<Interpretation, EvalError> {
        let mut sig = Signature::new();
        for s in self.sorts.keys() {
            if s.is_empty() {
                return Err(EvalError::BadInterpretation("empty sort name".into()));
            }
            sig.add_sort(Sort::new(s));
        }
        for (name, sym) in &self.symbols {
            sig.add_symbol(name, monomial_of(&sym.arity), monomial_of(&sym.coarity))?;
        }
        let sizes = self.sorts.iter().map(|(s, n)| (Sort::new(s), *n)).collect();
        let mut interp = Interpretation::new(&sig, sizes)?;
        for (name, sym) in &self.symbols {
            let dom = interp.monomial_carrier(&monomial_of(&sym.arity))?;
            let cod = interp.monomial_carrier(&monomial_of(&sym.coarity))?;
            let mut pairs = Vec::new();
            for (x, y) in &sym.pairs {
                let bad = |_| EvalError::BadInterpretation(format!("`{name}`: pair {x:?},{y:?} out of range"));
                pairs.push((dom.encode(0, x).map_err(bad)?, cod.encode(0, y).map_err(bad)?));
            }
            interp.set(name, FinRel::from_pairs(&dom, &cod, pairs)?)?;
        }
        Ok(interp)
    }
}

// ---------------------------------------------------------------------------
// the semantic functor

/// `⟦c⟧` for a circuit.
pub fn eval_circuit(c: &Circuit, interp: &Interpretation) -> Result<FinRel, EvalError> {
    let sort = |a: &Sort| -> Result<Carrier, EvalError> { interp.monomial_carrier(&a.clone().into()) };
    Ok(match c.kind() {
        CircuitKind::IdSort(a) => FinRel::identity(&sort(a)?),
        CircuitKind::IdUnit => FinRel::identity(&Carrier::one()),
        CircuitKind::Generator(name) => {
            let (d, k) = interp.signature().symbol(name).ok_or_else(|| TypeError::UnknownSymbol(name.clone()))?;
            if d != c.dom() || k != c.cod() {
                return Err(TypeError::SymbolType {
                    name: name.clone(),
                    used: format!("{} → {}", c.dom(), c.cod()),
                    declared: format!("{d} → {k}"),
                }
                .into());
            }
            interp.get(name).ok_or_else(|| EvalError::Uninterpreted(name.clone()))?.clone()
        }
        CircuitKind::Symmetry(a, b) => FinRel::symmetry_tensor(&sort(a)?, &sort(b)?),
        CircuitKind::Seq(l, r) => eval_circuit(l, interp)?.compose(&eval_circuit(r, interp)?)?,
        CircuitKind::Tensor(l, r) => eval_circuit(l, interp)?.tensor(&eval_circuit(r, interp)?),
        CircuitKind::Discharger(a) => FinRel::generator(GeneratorKind::Discharger, &sort(a)?),
        CircuitKind::Copier(a) => FinRel::generator(GeneratorKind::Copier, &sort(a)?),
        CircuitKind::Codischarger(a) => FinRel::generator(GeneratorKind::Codischarger, &sort(a)?),
        CircuitKind::Cocopier(a) => FinRel::generator(GeneratorKind::Cocopier, &sort(a)?),
    })
}

/// `⟦t⟧` for a tape, by structural recursion.
pub fn eval(t: &Tape, interp: &Interpretation) -> Result<FinRel, EvalError> {
    let mono = |u: &Monomial| interp.monomial_carrier(u);
    Ok(match t.kind() {
        TapeKind::IdMonomial(u) => FinRel::identity(&mono(u)?),
        TapeKind::IdZero => FinRel::identity(&Carrier::zero()),
        TapeKind::Embed(c) => eval_circuit(c, interp)?,
        TapeKind::SymmetryPlus(u, v) => FinRel::symmetry_sum(&mono(u)?, &mono(v)?),
        TapeKind::Seq(l, r) => eval(l, interp)?.compose(&eval(r, interp)?)?,
        TapeKind::Sum(l, r) => eval(l, interp)?.sum(&eval(r, interp)?),
        TapeKind::Bang(u) => FinRel::generator(GeneratorKind::Bang, &mono(u)?),
        TapeKind::Diag(u) => FinRel::generator(GeneratorKind::Diag, &mono(u)?),
        TapeKind::Cobang(u) => FinRel::generator(GeneratorKind::Cobang, &mono(u)?),
        TapeKind::Codiag(u) => FinRel::generator(GeneratorKind::Codiag, &mono(u)?),
        TapeKind::Trace(u, body) => eval(body, interp)?.trace(&u.clone().into())?,
    })
}

// ---------------------------------------------------------------------------
// checking

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

/// A pair present on the left-hand side of an inclusion but not on the right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Index of the offending axiom, when checking a theory.
    pub axiom: Option<usize>,
    pub pair: (usize, usize),
    /// The pair with elements rendered as tuples.
    pub shown: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl CheckReport {
    pub fn holds() -> CheckReport {
        CheckReport { verdict: Verdict::Holds, witness: None }
    }

    pub fn is_holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    /// Compares two already evaluated relations.
    pub fn of_inclusion(lhs: &FinRel, rhs: &FinRel) -> Result<CheckReport, EvalError> {
        Ok(match lhs.first_missing(rhs)? {
            None => CheckReport::holds(),
            Some((i, j)) => CheckReport {
                verdict: Verdict::Fails,
                witness: Some(Witness {
                    axiom: None,
                    pair: (i, j),
                    shown: format!("({},{})", lhs.dom().show(i), lhs.cod().show(j)),
                }),
            },
        })
    }
}

fn same_type(lhs: &Tape, rhs: &Tape) -> Result<(), TypeError> {
    if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
        return Err(TypeError::TypeMismatch(format!("{} → {} vs {} → {}", lhs.dom(), lhs.cod(), rhs.dom(), rhs.cod())));
    }
    Ok(())
}

/// Does `⟦lhs⟧ ⊆ ⟦rhs⟧` hold? The witness is the least missing pair.
pub fn check_inclusion(lhs: &Tape, rhs: &Tape, interp: &Interpretation) -> Result<CheckReport, EvalError> {
    same_type(lhs, rhs)?;
    CheckReport::of_inclusion(&eval(lhs, interp)?, &eval(rhs, interp)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomKind {
    Leq,
    Eq,
}

/// One inclusion of a theory, remembering which axiom it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub axiom: usize,
    pub lhs: Tape,
    pub rhs: Tape,
}

/// A signature with axioms; equalities are stored as two inclusions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    pub signature: Signature,
    pub inclusions: Vec<Inclusion>,
    axioms: usize,
}

impl Theory {
    pub fn new(signature: Signature) -> Theory {
        Theory { signature, inclusions: Vec::new(), axioms: 0 }
    }

    /// Adds an axiom; returns its index.
    pub fn add_axiom(&mut self, lhs: Tape, rhs: Tape, kind: AxiomKind) -> Result<usize, TypeError> {
        typecheck_tape(&lhs, &self.signature)?;
        typecheck_tape(&rhs, &self.signature)?;
        same_type(&lhs, &rhs)?;
        let axiom = self.axioms;
        self.axioms += 1;
        if kind == AxiomKind::Eq {
            self.inclusions.push(Inclusion { axiom, lhs: lhs.clone(), rhs: rhs.clone() });
            self.inclusions.push(Inclusion { axiom, lhs: rhs, rhs: lhs });
        } else {
            self.inclusions.push(Inclusion { axiom, lhs, rhs });
        }
        Ok(axiom)
    }

    pub fn axiom_count(&self) -> usize {
        self.axioms
    }

    /// Parses `{"signature": …, "axioms": [{"lhs", "rhs", "kind"}]}`.
    pub fn from_json(text: &str) -> Result<Theory, EvalError> {
        let doc: TheoryDoc = serde_json::from_str(text).map_err(|e| EvalError::BadInterpretation(e.to_string()))?;
        let mut sig = Signature::new();
        for s in &doc.signature.sorts {
            sig.add_sort(Sort::new(s));
        }
        for (name, sym) in &doc.signature.symbols {
            sig.add_symbol(name, monomial_of(&sym.arity), monomial_of(&sym.coarity))?;
        }
        let mut th = Theory::new(sig);
        for (k, ax) in doc.axioms.iter().enumerate() {
            let parse =
                |s: &str| sexpr::parse_tape(s).map_err(|e| EvalError::BadInterpretation(format!("axiom {k}: {e}")));
            th.add_axiom(parse(&ax.lhs)?, parse(&ax.rhs)?, ax.kind)?;
        }
        Ok(th)
    }
}

#[derive(Deserialize)]
struct SigDoc {
    sorts: Vec<String>,
    #[serde(default)]
    symbols: BTreeMap<String, SymbolDoc>,
}

#[derive(Deserialize)]
struct AxiomDoc {
    lhs: String,
    rhs: String,
    kind: AxiomKind,
}

#[derive(Deserialize)]
struct TheoryDoc {
    signature: SigDoc,
    axioms: Vec<AxiomDoc>,
}

/// Checks every inclusion of `theory`; reports the first failure.
pub fn check_theory(theory: &Theory, interp: &Interpretation) -> Result<CheckReport, EvalError> {
    for inc in &theory.inclusions {
        let mut r = check_inclusion(&inc.lhs, &inc.rhs, interp)?;
        if let Some(w) = r.witness.as_mut() {
            w.axiom = Some(inc.axiom);
            return Ok(r);
        }
    }
    Ok(CheckReport::holds())
}

// ---------------------------------------------------------------------------
// counter-model search

/// Which relations a symbol may denote during enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum SearchMode {
    /// Every relation.
    #[default]
    Raw,
    /// Function symbols range over function graphs; each complement symbol
    /// (keyed by name, valued by its base predicate) is the complement of
    /// its base.
    Restricted { functions: BTreeSet<String>, complements: BTreeMap<String, String> },
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub max_size: usize,
    /// Largest space enumerated exhaustively; also the sample count otherwise.
    pub budget: u64,
    pub seed: u64,
    pub mode: SearchMode,
}

impl SearchConfig {
    pub fn new(max_size: usize, budget: u64, seed: u64) -> SearchConfig {
        SearchConfig { max_size, budget, seed, mode: SearchMode::Raw }
    }
}

#[derive(Clone, Debug)]
pub struct Countermodel {
    pub interpretation: Interpretation,
    pub report: CheckReport,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub countermodel: Option<Countermodel>,
    /// Whether the whole space was enumerated.
    pub exhaustive: bool,
    /// Candidates generated (the full space or the sample count).
    pub candidates: u64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
enum Choice {
    Raw { dom: Carrier, cod: Carrier },
    Function { dom: Carrier, cod: Carrier },
    Complement { base: String },
}

impl Choice {
    fn count(&self) -> u128 {
        match self {
            Choice::Raw { dom, cod } => {
                let bits = dom.size() * cod.size();
                if bits >= 127 {
                    u128::MAX
                } else {
                    1u128 << bits
                }
            }
            Choice::Function { dom, cod } => {
                (0..dom.size()).try_fold(1u128, |acc, _| acc.checked_mul(cod.size() as u128)).unwrap_or(u128::MAX)
            }
            Choice::Complement { .. } => 1,
        }
    }

    fn decode(&self, mut idx: u128) -> Option<FinRel> {
        match self {
            Choice::Raw { dom, cod } => Some(FinRel::from_mask(dom, cod, idx)),
            Choice::Function { dom, cod } => {
                let m = cod.size() as u128;
                let mut r = FinRel::empty(dom, cod);
                for i in 0..dom.size() {
                    r.insert(i, (idx % m) as usize);
                    idx /= m;
                }
                Some(r)
            }
            Choice::Complement { .. } => None,
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Option<FinRel> {
        match self {
            Choice::Raw { dom, cod } => Some(FinRel::random(dom, cod, 0.5, rng)),
            Choice::Function { dom, cod } => {
                if cod.size() == 0 {
                    return Some(FinRel::empty(dom, cod));
                }
                let table: Vec<usize> = (0..dom.size()).map(|_| rng.gen_range(0..cod.size())).collect();
                Some(FinRel::graph(dom, cod, |i| table[i]))
            }
            Choice::Complement { .. } => None,
        }
    }
}

fn complement(r: &FinRel) -> FinRel {
    let mut out = FinRel::full(r.dom(), r.cod());
    for (i, j) in r.pairs() {
        out.remove(i, j);
    }
    out
}

/// A family of interpretations of one signature at fixed sort sizes.
struct Space {
    base: Interpretation,
    choices: Vec<(String, Choice)>,
}

impl Space {
    fn new(sig: &Signature, sizes: BTreeMap<Sort, usize>, mode: &SearchMode) -> Result<Space, EvalError> {
        let base = Interpretation::new(sig, sizes)?;
        let mut choices = Vec::new();
        for (name, (d, c)) in sig.symbols() {
            let dom = base.monomial_carrier(d)?;
            let cod = base.monomial_carrier(c)?;
            let choice = match mode {
                SearchMode::Restricted { functions, .. } if functions.contains(name) => Choice::Function { dom, cod },
                SearchMode::Restricted { complements, .. } if complements.contains_key(name) => {
                    Choice::Complement { base: complements[name].clone() }
                }
                _ => Choice::Raw { dom, cod },
            };
            choices.push((name.clone(), choice));
        }
        Ok(Space { base, choices })
    }

    fn count(&self) -> u128 {
        self.choices.iter().fold(1u128, |acc, (_, c)| acc.saturating_mul(c.count()))
    }

    fn finish(&self, mut interp: Interpretation) -> Interpretation {
        for (name, c) in &self.choices {
            if let Choice::Complement { base } = c {
                let comp = complement(interp.get(base).expect("base predicate is declared"));
                interp.symbols.insert(name.clone(), comp);
            }
        }
        interp
    }

    /// Mixed-radix decoding with the first symbol least significant.
    fn nth(&self, mut idx: u128) -> Interpretation {
        let mut interp = self.base.clone();
        for (name, c) in &self.choices {
            let n = c.count();
            if let Some(r) = c.decode(idx % n) {
                interp.symbols.insert(name.clone(), r);
            }
            idx /= n;
        }
        self.finish(interp)
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Interpretation {
        let mut interp = self.base.clone();
        for (name, c) in &self.choices {
            if let Some(r) = c.sample(rng) {
                interp.symbols.insert(name.clone(), r);
            }
        }
        self.finish(interp)
    }
}

/// All assignments of sizes `1..=max` to the sorts.
fn size_tuples(sig: &Signature, max: usize) -> Vec<BTreeMap<Sort, usize>> {
    let sorts: Vec<Sort> = sig.sorts().iter().cloned().collect();
    let mut out = vec![BTreeMap::new()];
    for s in &sorts {
        out = out
            .into_iter()
            .flat_map(|m| {
                (1..=max).map(move |k| {
                    let mut m = m.clone();
                    m.insert(s.clone(), k);
                    m
                })
            })
            .collect();
    }
    // smallest total first, then lexicographic with the last sort fastest
    out.sort_by_key(|m| (m.values().sum::<usize>(), m.values().copied().collect::<Vec<_>>()));
    out
}

/// One random interpretation with sort sizes drawn from `1..=max_size`.
pub fn random_interpretation<R: Rng>(
    sig: &Signature,
    max_size: usize,
    mode: &SearchMode,
    rng: &mut R,
) -> Result<Interpretation, EvalError> {
    let sizes = sig.sorts().iter().map(|s| (s.clone(), rng.gen_range(1..=max_size))).collect();
    Ok(Space::new(sig, sizes, mode)?.sample(rng))
}

/// Looks for an interpretation where `lhs ⊆ rhs` fails. Enumerates
/// exhaustively (sizes ascending, then relation masks ascending) when the
/// space fits in the budget, otherwise draws `budget` seeded samples. The
/// first failure in enumeration order is returned. Not finding one proves
/// nothing.
pub fn search_countermodel(
    lhs: &Tape,
    rhs: &Tape,
    sig: &Signature,
    cfg: &SearchConfig,
) -> Result<SearchOutcome, EvalError> {
    assert!(cfg.max_size >= 1, "max_size must be at least 1");
    typecheck_tape(lhs, sig)?;
    typecheck_tape(rhs, sig)?;
    same_type(lhs, rhs)?;
    let spaces: Vec<Space> = size_tuples(sig, cfg.max_size)
        .into_iter()
        .map(|sizes| Space::new(sig, sizes, &cfg.mode))
        .collect::<Result<_, _>>()?;
    let total = spaces.iter().fold(0u128, |acc, s| acc.saturating_add(s.count()));
    let test = |interp: Interpretation| -> Option<Countermodel> {
        match check_inclusion(lhs, rhs, &interp) {
            Ok(report) if !report.is_holds() => Some(Countermodel { interpretation: interp, report }),
            _ => None,
        }
    };
    if total <= cfg.budget as u128 {
        for space in &spaces {
            let n = space.count() as u64;
            if let Some(cm) = (0..n).into_par_iter().find_map_first(|i| test(space.nth(i as u128))) {
                return Ok(SearchOutcome {
                    countermodel: Some(cm),
                    exhaustive: true,
                    candidates: total as u64,
                    seed: cfg.seed,
                });
            }
        }
        return Ok(SearchOutcome { countermodel: None, exhaustive: true, candidates: total as u64, seed: cfg.seed });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples: Vec<Interpretation> = (0..cfg.budget)
        .map(|_| {
            let space = &spaces[rng.gen_range(0..spaces.len())];
            space.sample(&mut rng)
        })
        .collect();
    let found = samples.into_par_iter().find_map_first(test);
    Ok(SearchOutcome { countermodel: found, exhaustive: false, candidates: cfg.budget, seed: cfg.seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sugar;

    fn endo_sig(names: &[&str]) -> Signature {
        let mut sig = Signature::new();
        sig.add_sort(Sort::new("A"));
        for n in names {
            sig.add_symbol(n, Monomial::of(&["A"]), Monomial::of(&["A"])).unwrap();
        }
        sig
    }

    fn gen(sig: &Signature, n: &str) -> Tape {
        Tape::embed(&Circuit::symbol(sig, n).unwrap())
    }

    #[test]
    fn generator_and_identity() {
        let sig = endo_sig(&["s"]);
        let mut i = Interpretation::with_sizes(&sig, &[("A", 3)]).unwrap();
        let a = Carrier::of_sort("A", 3);
        let succ = FinRel::graph(&a, &a, |x| (x + 1) % 3);
        i.set("s", succ.clone()).unwrap();
        assert_eq!(eval(&gen(&sig, "s"), &i).unwrap(), succ);
        let id = Tape::id_monomial(&Monomial::of(&["A"]));
        assert_eq!(eval(&id, &i).unwrap(), FinRel::identity(&a));
        assert_eq!(eval(&id, &Interpretation::with_sizes(&sig, &[("A", 2)]).unwrap()).unwrap().show(), "{(0,0),(1,1)}");
    }

    #[test]
    fn inclusion_witness() {
        let sig = endo_sig(&["R"]);
        let mut i = Interpretation::with_sizes(&sig, &[("A", 2)]).unwrap();
        let a = Carrier::of_sort("A", 2);
        i.set("R", FinRel::from_pairs(&a, &a, [(0, 1), (1, 0)]).unwrap()).unwrap();
        let id = Tape::id_monomial(&Monomial::of(&["A"]));
        let r = gen(&sig, "R");
        assert!(check_inclusion(&r, &r, &i).unwrap().is_holds());
        let rep = check_inclusion(&id, &r, &i).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        assert_eq!(rep.witness.unwrap().pair, (0, 0));
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"sorts":{"A":2},"symbols":{"R":{"arity":["A"],"coarity":["A"],"pairs":[[[0],[1]]]},
            "p":{"arity":["A","A"],"coarity":[],"pairs":[[[1,0],[]]]}}}"#;
        let i = Interpretation::from_json(text).unwrap();
        assert_eq!(i.get("R").unwrap().show(), "{(0,1)}");
        assert_eq!(i.get("p").unwrap().show(), "{((1,0),•)}");
        assert_eq!(Interpretation::from_json(&i.to_json()).unwrap(), i);
        assert!(Interpretation::from_json(
            r#"{"sorts":{"A":1},"symbols":{"R":{"arity":["A"],"coarity":["A"],"pairs":[[[3],[0]]]}}}"#
        )
        .is_err());
    }

    #[test]
    fn search_finds_canonical_witness() {
        let sig = endo_sig(&["R"]);
        let r = gen(&sig, "R");
        let rr = r.seq(&r).unwrap();
        let out = search_countermodel(&rr, &r, &sig, &SearchConfig::new(2, 1 << 20, 0)).unwrap();
        assert!(out.exhaustive);
        let cm = out.countermodel.unwrap();
        assert_eq!(cm.interpretation.get("R").unwrap().show(), "{(0,1),(1,0)}");
        assert_eq!(cm.report.witness.unwrap().shown, "(0,0)");
    }

    #[test]
    fn search_valid_inclusions() {
        let sig = endo_sig(&["f"]);
        let f = gen(&sig, "f");
        let id = Tape::id_monomial(&Monomial::of(&["A"]));
        let cfg = SearchConfig::new(2, 1 << 20, 0);
        assert!(search_countermodel(&id, &id, &sig, &cfg).unwrap().countermodel.is_none());
        let a: Polynomial = Monomial::of(&["A"]).into();
        let m = sugar::meet(&f, &sugar::top(&a, &a)).unwrap();
        let out = search_countermodel(&m, &f, &sig, &cfg).unwrap();
        assert!(out.exhaustive && out.countermodel.is_none());
        assert!(search_countermodel(&f, &m, &sig, &cfg).unwrap().countermodel.is_none());
    }

    #[test]
    fn sampling_is_deterministic() {
        let sig = endo_sig(&["R", "S"]);
        let lhs = gen(&sig, "R").seq(&gen(&sig, "S")).unwrap();
        let rhs = gen(&sig, "S").seq(&gen(&sig, "R")).unwrap();
        let cfg = SearchConfig::new(3, 50, 7);
        let a = search_countermodel(&lhs, &rhs, &sig, &cfg).unwrap();
        let b = search_countermodel(&lhs, &rhs, &sig, &cfg).unwrap();
        assert!(!a.exhaustive);
        assert_eq!(a.countermodel.map(|c| c.interpretation), b.countermodel.map(|c| c.interpretation));
    }

    #[test]
    fn restricted_mode_enumerates_functions() {
        let mut sig = endo_sig(&["f"]);
        sig.add_symbol("p", Monomial::of(&["A"]), Monomial::unit()).unwrap();
        sig.add_symbol("!p", Monomial::of(&["A"]), Monomial::unit()).unwrap();
        let mode = SearchMode::Restricted {
            functions: ["f".to_string()].into(),
            complements: [("!p".to_string(), "p".to_string())].into(),
        };
        let space = Space::new(&sig, [(Sort::new("A"), 3)].into(), &mode).unwrap();
        assert_eq!(space.count(), 27 * 8);
        for k in [0u128, 5, 100, 215] {
            let i = space.nth(k);
            assert!(i.get("f").unwrap().has_property(crate::rel::ArrowProperty::Sv).unwrap());
            assert!(i.get("f").unwrap().has_property(crate::rel::ArrowProperty::Tot).unwrap());
            let p = i.get("p").unwrap();
            let np = i.get("!p").unwrap();
            assert!(p.intersection(np).unwrap().is_empty());
            assert_eq!(p.union(np).unwrap().len(), 3);
        }
    }
}
