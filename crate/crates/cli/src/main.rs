//! `kctape`: typecheck, evaluate, encode, check and render tape diagrams.
//!
//! Exit status: 0 when the check holds, 1 when it is refuted (a witness is
//! printed), 2 on usage, parse or type errors.

mod infer;
mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kctape::cr::{cr_signature, encode_cr, parse_cr};
use kctape::eval::{
    check_theory, eval, search_countermodel, CheckReport, Interpretation, SearchConfig, SearchOutcome, Theory,
};
use kctape::imp::{encode_cmd, parse_context, parse_program, ProgramSignature};
use kctape::laws::{law_names, run_suite, SUITES};
use kctape::logics::{check_spec, parse_spec};
use kctape::rel::FinRel;
use kctape::sexpr::{dump_tape, parse_term};
use kctape::term::{implied_signature, typecheck};
use kctape::Tape;

/// Seed used by every randomized command unless `--seed` is given.
const DEFAULT_SEED: u64 = 2024;

#[derive(Parser)]
#[command(name = "kctape", version, about = "Kleene-Cartesian tape diagrams over finite relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Drawing {
    Dot,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Print the type of a term.
    Typecheck { term: PathBuf },
    /// Evaluate a tape in a finite interpretation.
    Eval {
        term: PathBuf,
        interp: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Encode a program into a tape and print its dump.
    Encode {
        program: PathBuf,
        /// Variable declarations, e.g. `x:A, y:A`.
        #[arg(long)]
        context: String,
        /// Interpretation file whose symbol declarations type the program;
        /// inferred from the program when absent.
        #[arg(long)]
        signature: Option<PathBuf>,
    },
    /// Check a Hoare-style triple or a relational quadruple in an interpretation.
    CheckTriple {
        spec: PathBuf,
        interp: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Search for a relation model refuting `lhs ≤ rhs` in the calculus of relations.
    CheckCr {
        lhs: String,
        rhs: String,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Check both inclusions.
        #[arg(long)]
        equiv: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check every axiom of a theory in an interpretation.
    CheckTheory {
        theory: PathBuf,
        interp: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Search for a countermodel of the axioms in a theory file.
    Search {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Only consider models of the program theory (functions are
        /// functions, `!R` is the complement of `R`).
        #[arg(long)]
        restricted: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Draw a term.
    Render {
        term: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Drawing,
    },
    /// Run a randomized law suite against the relational semantics.
    Laws {
        /// One of the suite names, or `all`.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Result of a command that ran to completion.
enum Status {
    Holds,
    Fails,
}

impl Status {
    fn of(holds: bool) -> Status {
        if holds {
            Status::Holds
        } else {
            Status::Fails
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_tape(path: &Path) -> Result<Tape> {
    let term = parse_term(&read(path)?).with_context(|| format!("{}", path.display()))?;
    Ok(term.into_tape())
}

fn read_interp(path: &Path) -> Result<Interpretation> {
    Interpretation::from_json(&read(path)?).with_context(|| format!("{}", path.display()))
}

/// Adds `!R` as the complement of `R` for every complement symbol the tape
/// mentions but the interpretation leaves out.
fn with_complements(interp: Interpretation, t: &Tape) -> Result<Interpretation> {
    let mut sig = interp.signature().clone();
    let mut missing = Vec::new();
    for (name, (d, c)) in implied_signature(t)?.symbols() {
        let Some(base) = name.strip_prefix('!') else { continue };
        if interp.get(name).is_none() && interp.signature().symbol(base) == Some(&(d.clone(), c.clone())) {
            sig.add_symbol(name, d.clone(), c.clone())?;
            missing.push((name.clone(), base.to_string()));
        }
    }
    if missing.is_empty() {
        return Ok(interp);
    }
    let mut out = interp.extended(&sig)?;
    for (name, base) in missing {
        let p = interp.get(&base).expect("declared");
        let mut np = FinRel::full(p.dom(), p.cod());
        for (i, j) in p.pairs() {
            np.remove(i, j);
        }
        out.set(&name, np)?;
    }
    Ok(out)
}

fn emit(format: Format, text: String, value: Value) {
    match format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("serializable")),
    }
}

fn verdict(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "fails"
    }
}

fn report_json(r: &CheckReport) -> Value {
    json!({ "verdict": verdict(r.is_holds()), "witness": r.witness })
}

fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Typecheck { term } => {
            let t = parse_term(&read(&term)?).with_context(|| format!("{}", term.display()))?;
            let sig = implied_signature(&t.clone().into_tape())?;
            let (d, c) = typecheck(&t, &sig)?;
            println!("{d} → {c}");
            Ok(Status::Holds)
        }
        Command::Eval { term, interp, format } => {
            let t = read_tape(&term)?;
            let i = with_complements(read_interp(&interp)?, &t)?;
            let r = eval(&t, &i)?;
            let pairs: Vec<Value> = r.pairs().map(|(a, b)| json!([r.dom().decode(a), r.cod().decode(b)])).collect();
            emit(format, format!("{}\n", r.show()), json!({ "relation": r.show(), "pairs": pairs }));
            Ok(Status::Holds)
        }
        Command::Encode { program, context, signature } => {
            let cmd = parse_program(&read(&program)?).with_context(|| format!("{}", program.display()))?;
            let ctx = parse_context(&context).context("--context")?;
            let sig = match signature {
                Some(p) => read_interp(&p)?.signature().clone(),
                None => infer::program_signature(&ctx, &cmd)?,
            };
            let psig = ProgramSignature::from_signature(&sig)?;
            println!("{}", dump_tape(&encode_cmd(&ctx, &cmd, &psig)?));
            Ok(Status::Holds)
        }
        Command::CheckTriple { spec, interp, format } => {
            let s = parse_spec(&read(&spec)?).with_context(|| format!("{}", spec.display()))?;
            let i = read_interp(&interp)?;
            let psig = ProgramSignature::from_signature(i.signature())?;
            let complete = psig.predicates().keys().all(|r| i.get(&kctape::imp::complement_name(r)).is_some());
            let i = if complete { i.extended(psig.signature())? } else { psig.complete(&i)? };
            let r = check_spec(&s, &psig, &i)?;
            let text = match &r.witness {
                None => "holds\n".to_string(),
                Some(w) => format!("fails at {}\n", w.shown),
            };
            emit(format, text, report_json(&r));
            Ok(Status::of(r.is_holds()))
        }
        Command::CheckCr { lhs, rhs, max_size, budget, seed, equiv, format } => {
            if max_size == 0 {
                bail!("--max-size must be at least 1");
            }
            let (l, r) = (parse_cr(&lhs).context("lhs")?, parse_cr(&rhs).context("rhs")?);
            let names: Vec<String> = l.symbols().union(&r.symbols()).cloned().collect();
            let sig = cr_signature(&names);
            let (lt, rt) = (encode_cr(&l), encode_cr(&r));
            let cfg = SearchConfig::new(max_size, budget, seed);
            let mut goals = vec![(format!("{lhs} ≤ {rhs}"), &lt, &rt)];
            if equiv {
                goals.push((format!("{rhs} ≤ {lhs}"), &rt, &lt));
            }
            let mut outcomes = Vec::new();
            for (goal, a, b) in goals {
                let out = search_countermodel(a, b, &sig, &cfg)?;
                let refuted = out.countermodel.is_some();
                outcomes.push((goal, out));
                if refuted {
                    break;
                }
            }
            search_report(format, max_size, seed, &outcomes)
        }
        Command::CheckTheory { theory, interp, format } => {
            let th = Theory::from_json(&read(&theory)?).with_context(|| format!("{}", theory.display()))?;
            let i = read_interp(&interp)?.extended(&th.signature)?;
            let r = check_theory(&th, &i)?;
            let text = match &r.witness {
                None => format!("holds: {} axioms\n", th.axiom_count()),
                Some(w) => format!("fails: axiom {} at {}\n", w.axiom.unwrap_or(0), w.shown),
            };
            emit(format, text, report_json(&r));
            Ok(Status::of(r.is_holds()))
        }
        Command::Search { file, max_size, budget, seed, restricted, format } => {
            if max_size == 0 {
                bail!("--max-size must be at least 1");
            }
            let th = Theory::from_json(&read(&file)?).with_context(|| format!("{}", file.display()))?;
            let mut sig = th.signature.clone();
            let mut cfg = SearchConfig::new(max_size, budget, seed);
            if restricted {
                let psig = ProgramSignature::from_signature(&sig)?;
                cfg.mode = psig.search_mode();
                sig = psig.signature().clone();
            }
            let mut outcomes = Vec::new();
            for inc in &th.inclusions {
                let out = search_countermodel(&inc.lhs, &inc.rhs, &sig, &cfg)?;
                let refuted = out.countermodel.is_some();
                outcomes.push((format!("axiom {}", inc.axiom), out));
                if refuted {
                    break;
                }
            }
            search_report(format, max_size, seed, &outcomes)
        }
        Command::Render { term, format } => {
            let t = parse_term(&read(&term)?).with_context(|| format!("{}", term.display()))?;
            print!(
                "{}",
                match format {
                    Drawing::Dot => render::dot(&t),
                    Drawing::Text => render::text(&t),
                }
            );
            Ok(Status::Holds)
        }
        Command::Laws { suite, samples, seed, format } => {
            let suites: Vec<&str> = if suite == "all" {
                SUITES.to_vec()
            } else if SUITES.contains(&suite.as_str()) {
                vec![suite.as_str()]
            } else {
                bail!("unknown suite `{suite}`; expected one of {} or all", SUITES.join(", "));
            };
            let mut text = String::new();
            let mut rows = Vec::new();
            let mut holds = true;
            for s in suites {
                let r = run_suite(s, samples, seed)?;
                holds &= r.holds();
                text.push_str(&format!(
                    "{s}: {} laws, {} checks, {} failures (seed {seed})\n",
                    law_names(s).len(),
                    r.checked,
                    r.failures.len()
                ));
                for f in &r.failures {
                    text.push_str(&format!("  FAIL {}: {}\n", f.law, f.witness));
                }
                let failures: Vec<Value> =
                    r.failures.iter().map(|f| json!({ "law": f.law, "witness": f.witness })).collect();
                rows.push(json!({ "suite": s, "checked": r.checked, "failures": failures }));
            }
            emit(format, text, json!({ "verdict": verdict(holds), "seed": seed, "suites": rows }));
            Ok(Status::of(holds))
        }
    }
}

fn search_report(format: Format, max_size: usize, seed: u64, outcomes: &[(String, SearchOutcome)]) -> Result<Status> {
    let found = outcomes.iter().find_map(|(goal, o)| o.countermodel.as_ref().map(|c| (goal, c)));
    let candidates: u64 = outcomes.iter().map(|(_, o)| o.candidates).sum();
    let exhaustive = outcomes.iter().all(|(_, o)| o.exhaustive);
    let (text, value) = match found {
        Some((goal, cm)) => (
            format!(
                "refuted: {goal}\ncountermodel: {}\nwitness: {}\n",
                cm.interpretation.describe(),
                cm.report.witness.as_ref().map(|w| w.shown.as_str()).unwrap_or("-")
            ),
            json!({
                "verdict": "fails",
                "goal": goal,
                "countermodel": serde_json::from_str::<Value>(&cm.interpretation.to_json()).expect("valid json"),
                "witness": cm.report.witness,
                "seed": seed,
            }),
        ),
        None if exhaustive => (
            format!("no countermodel up to size {max_size}\n"),
            json!({ "verdict": "holds", "exhaustive": true, "candidates": candidates, "seed": seed }),
        ),
        None => (
            format!("no countermodel in {candidates} samples up to size {max_size} (seed {seed})\n"),
            json!({ "verdict": "holds", "exhaustive": false, "candidates": candidates, "seed": seed }),
        ),
    };
    emit(format, text, value);
    Ok(Status::of(found.is_none()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Status::Holds) => ExitCode::SUCCESS,
        Ok(Status::Fails) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
