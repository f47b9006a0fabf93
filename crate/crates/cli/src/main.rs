//! `dualforget`: strong and weak forgetting, SNC and WSC from the command
//! line.
//!
//! Exit codes: 0 success, 1 parse or usage error, 2 elimination failed (or
//! the requested fragment was not reached), 3 verification failure or
//! internal error, 4 `check-equiv` found a counterexample.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use dualforget::oracle::{counterexample_prop, equiv_fo_finite, FoVerdict, OracleError};
use dualforget::{
    forget_strong, forget_weak, parse_formula, parse_theory, snc, wsc, Formula, Outcome,
    Signature, Status, Theory,
};

#[derive(Parser, Debug)]
#[command(name = "dualforget", version, about = "Strong and weak forgetting by second-order quantifier elimination")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forget symbols from a theory file.
    Forget {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Symbols to forget, comma separated, eliminated in this order.
        #[arg(long, value_delimiter = ',', required = true)]
        vars: Vec<String>,
        theory: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Strongest necessary condition of a query on the kept symbols.
    Snc(Condition),
    /// Weakest sufficient condition of a query on the kept symbols.
    Wsc(Condition),
    /// Compare two formulas (or theory files) with the oracle.
    CheckEquiv {
        left: String,
        right: String,
        /// Largest domain for first-order comparison.
        #[arg(long, default_value_t = 2)]
        domain_size: usize,
    },
}

#[derive(clap::Args, Debug)]
struct Condition {
    /// Background theory; empty when omitted.
    #[arg(long)]
    theory: Option<PathBuf>,
    #[arg(long)]
    query: String,
    /// Symbols to keep, comma separated.
    #[arg(long, value_delimiter = ',')]
    keep: Vec<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Print every elimination step on stderr.
    #[arg(long, env = "DF_TRACE")]
    trace: bool,
    /// Check the result against the oracle.
    #[arg(long)]
    verify: bool,
    /// Largest domain used by --verify on first-order results.
    #[arg(long, default_value_t = 2)]
    domain_size: usize,
    /// Require the result to be in this fragment.
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    /// Write the result here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Strong,
    Weak,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Emit {
    Prop,
    Fo,
    Fixpoint,
}

/// An error with its exit code.
struct Exit(u8, String);

impl From<anyhow::Error> for Exit {
    fn from(e: anyhow::Error) -> Exit {
        Exit(3, format!("{e:#}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Exit(code, msg)) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Exit> {
    match cli.command {
        Command::Forget { mode, vars, theory, common } => {
            let (_, th) = read_theory(&theory)?;
            let outcome = match mode {
                Mode::Strong => forget_strong(&th, &vars),
                Mode::Weak => forget_weak(&th, &vars),
            }
            .map_err(|e| Exit(1, e.to_string()))?;
            let quantified = quantify(mode, &vars, th.conjunction());
            finish(outcome, quantified, &common)
        }
        Command::Snc(c) => condition(c, Mode::Strong),
        Command::Wsc(c) => condition(c, Mode::Weak),
        Command::CheckEquiv { left, right, domain_size } => check_equiv(&left, &right, domain_size),
    }
}

fn quantify(mode: Mode, vars: &[String], f: Formula) -> Formula {
    match mode {
        Mode::Strong => Formula::exists2_many(vars.to_vec(), f),
        Mode::Weak => Formula::forall2_many(vars.to_vec(), f),
    }
}

fn read_theory(path: &Path) -> Result<(Signature, Theory), Exit> {
    let text = fs::read_to_string(path)
        .map_err(|e| Exit(1, format!("cannot read {}: {e}", path.display())))?;
    let (sig, mut th) = parse_theory(&text).map_err(|e| Exit(1, format!("{}:{e}", path.display())))?;
    if th.name.is_empty() || th.name == "theory" {
        if let Some(stem) = path.file_stem() {
            th.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok((sig, th))
}

fn condition(c: Condition, mode: Mode) -> Result<(), Exit> {
    let (sig, th) = match &c.theory {
        Some(path) => read_theory(path)?,
        None => (Signature::new(), Theory::empty()),
    };
    let query = parse_formula(&c.query, &sig).map_err(|e| Exit(1, format!("query:{e}")))?;
    let overlap: Vec<&String> = c.keep.iter().filter(|k| !th.vocabulary().contains(k) && !query.mentions(k)).collect();
    if !overlap.is_empty() {
        eprintln!("note: kept symbols not in the vocabulary: {}", join(&overlap));
    }
    let forget = dualforget::forget::forget_set(&th, &query, &c.keep);
    let (outcome, quantified) = match mode {
        Mode::Strong => (
            snc(&th, &query, &c.keep),
            Formula::exists2_many(forget, Formula::and([th.conjunction(), query.clone()])),
        ),
        Mode::Weak => (
            wsc(&th, &query, &c.keep),
            Formula::forall2_many(forget, Formula::implies(th.conjunction(), query.clone())),
        ),
    };
    let outcome = outcome.map_err(|e| Exit(1, e.to_string()))?;
    finish(outcome, quantified, &c.common)
}

fn join<S: AsRef<str>>(xs: &[S]) -> String {
    xs.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(", ")
}

fn finish(outcome: Outcome, quantified: Formula, common: &Common) -> Result<(), Exit> {
    if common.trace {
        eprint!("{}", outcome.trace);
    }
    if outcome.is_failed() {
        emit(&outcome.formula, common)?;
        let reason = outcome.reason.unwrap_or_default();
        return Err(Exit(2, format!("elimination failed: {reason}")));
    }
    let fragment_ok = match common.emit {
        None | Some(Emit::Fixpoint) => true,
        Some(Emit::Fo) => outcome.status != Status::Fixpoint,
        Some(Emit::Prop) => outcome.formula.is_propositional(),
    };
    if !fragment_ok {
        let what = match common.emit {
            Some(Emit::Fo) => "no first-order equivalent found by this procedure",
            _ => "the result is not propositional",
        };
        return Err(Exit(2, format!("{what} (status {})", outcome.status)));
    }
    emit(&outcome.formula, common)?;
    if common.verify {
        verify(&outcome.formula, &quantified, common.domain_size)?;
    }
    Ok(())
}

fn emit(f: &Formula, common: &Common) -> Result<(), Exit> {
    let text = format!("{f}\n");
    match &common.output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Exit::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(result: &Formula, expected: &Formula, domain: usize) -> Result<(), Exit> {
    let verdict = compare(result, expected, domain).map_err(|e| Exit(3, format!("verify: {e}")))?;
    match verdict {
        None => {
            eprintln!("verify: PASS");
            Ok(())
        }
        Some(witness) => Err(Exit(3, format!("verify: FAIL on {witness}"))),
    }
}

/// `None` when equivalent, otherwise a description of a distinguishing
/// valuation or model.
fn compare(f: &Formula, g: &Formula, domain: usize) -> Result<Option<String>, OracleError> {
    if f.is_propositional() && g.is_propositional() {
        return Ok(counterexample_prop(f, g)?.map(|v| {
            let parts: Vec<String> = v
                .iter()
                .map(|(p, b)| format!("{p} = {}", if *b { "T" } else { "F" }))
                .collect();
            if parts.is_empty() {
                "the empty valuation".to_string()
            } else {
                parts.join(", ")
            }
        }));
    }
    Ok(match equiv_fo_finite(f, g, &Signature::new(), domain)? {
        FoVerdict::Equivalent => None,
        FoVerdict::Counterexample { model, env } => {
            let mut s = model.to_string();
            for (v, e) in env {
                s.push_str(&format!("; {v} := {e}"));
            }
            Some(s)
        }
    })
}

/// A theory file when `arg` names an existing file, otherwise formula text.
fn formula_arg(arg: &str) -> Result<Formula, Exit> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(read_theory(path)?.1.conjunction());
    }
    parse_formula(arg, &Signature::new()).map_err(|e| Exit(1, format!("`{arg}`:{e}")))
}

fn check_equiv(left: &str, right: &str, domain: usize) -> Result<(), Exit> {
    let f = formula_arg(left)?;
    let g = formula_arg(right)?;
    match compare(&f, &g, domain).map_err(|e| Exit(3, e.to_string()))? {
        None => {
            println!("equivalent");
            Ok(())
        }
        Some(witness) => {
            println!("counterexample: {witness}");
            Err(Exit(4, String::new()))
        }
    }
}
