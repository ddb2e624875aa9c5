//! Command-line front end for the meadow library.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use meadow::decide::{self, Outcome, Verdict};
use meadow::fo_logic::{translate_ordered, translate_phi};
use meadow::model_lab::{self, check_axioms, classify_range, format_counter};
use meadow::normal_forms::{canon_poly, canon_smf, pseudo_simplify, to_smf, to_ssmf};
use meadow::prover::{audit_corpus, check_proof, corpus, AuditConfig, ProofScript, Theory};
use meadow::semantics::{Model, SampleConfig};
use meadow::term::{self, Signature, Term};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_INVALID_PROOF: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "meadow", version, about = "Compute, normalize, prove and decide equations in meadows")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Seed for sampled assignments.
    #[arg(long, global = true, env = "MEADOW_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Number of random samples after the structured ones.
    #[arg(long, global = true, env = "MEADOW_BUDGET", default_value_t = 1000,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Bound on numerators and denominators of sampled values.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub magnitude: u64,
    /// Largest index of indexed axiom schemes.
    #[arg(long, global = true, default_value_t = 8)]
    pub bound: usize,
    /// Model: q0, c0 or zmod:<n>.
    #[arg(long, global = true, default_value = "q0")]
    pub model: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a term under an assignment such as `x=3/4 y=1+2i`.
    Eval { term: String, assignment: Vec<String> },
    /// Print a normal form of a term.
    Normalize {
        #[arg(long, value_enum, default_value_t = Form::Smf)]
        form: Form,
        term: String,
    },
    /// Translate an equation into a first-order formula.
    Translate {
        #[arg(long, value_enum, default_value_t = Target::FieldQf)]
        target: Target,
        equation: Vec<String>,
    },
    /// Decide an equation in the selected model.
    Decide {
        /// For c0: decide the real and imaginary parts over q0.
        #[arg(long)]
        split: bool,
        equation: Vec<String>,
    },
    /// Search for a counterexample by sampling.
    Refute { equation: Vec<String> },
    /// Check a JSON proof script.
    Check { file: PathBuf },
    /// Audit or export the built-in proof corpus.
    Corpus {
        /// Check, cross-check and mutate every script.
        #[arg(long)]
        run_all: bool,
        /// Write every script as `<name>.mpf` into this directory.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Mutants per script for `--run-all`.
        #[arg(long, default_value_t = 20)]
        mutations: usize,
    },
    /// Classify Z/nZ for n up to a bound.
    Modelcheck {
        #[arg(long, default_value_t = 50)]
        max_n: u64,
        /// Also check this theory's axioms exhaustively on every meadow found.
        #[arg(long)]
        theory: Option<String>,
    },
    /// Split a complex term into real and imaginary real forms.
    SplitComplex { term: String },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Form {
    Smf,
    Ssmf,
    Canon,
    Pseudo,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Target {
    FieldQf,
    OrderedField,
}

/// An error reported with exit code 3.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

type Res = Result<i32, Usage>;

/// Runs the command line and returns the exit code; output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Res {
    let cfg = &cli.config;
    match &cli.command {
        Command::Eval { term, assignment } => eval(cfg, term, assignment, out),
        Command::Normalize { form, term } => normalize(*form, term, out),
        Command::Translate { target, equation } => translate(*target, equation, out),
        Command::Decide { split, equation } => decide_cmd(cfg, *split, equation, out),
        Command::Refute { equation } => refute_cmd(cfg, equation, out),
        Command::Check { file } => check(cfg, file, out),
        Command::Corpus { run_all, emit, mutations } => corpus_cmd(cfg, *run_all, emit.as_deref(), *mutations, out),
        Command::Modelcheck { max_n, theory } => modelcheck(cfg, *max_n, theory.as_deref(), out),
        Command::SplitComplex { term } => split_complex(term, out),
    }
}

fn model(cfg: &Config) -> Result<Model, Usage> {
    Ok(cfg.model.parse::<Model>()?)
}

fn parse_term(text: &str, sig: Signature) -> Result<Term, Usage> {
    Ok(term::parse(text, sig)?)
}

/// Two term arguments, or one argument of the form `s = t`.
fn parse_equation(args: &[String], sig: Signature) -> Result<(Term, Term), Usage> {
    match args {
        [s, t] => Ok((parse_term(s, sig)?, parse_term(t, sig)?)),
        [eq] => {
            let mut parts = eq.split('=');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(s), Some(t), None) => Ok((parse_term(s, sig)?, parse_term(t, sig)?)),
                _ => Err(Usage(format!("expected `<s> = <t>`, got `{eq}`"))),
            }
        }
        _ => Err(Usage("expected an equation as two terms or one `<s> = <t>` argument".into())),
    }
}

fn eval(cfg: &Config, text: &str, assignment: &[String], out: &mut dyn Write) -> Res {
    let m = model(cfg)?;
    let t = parse_term(text, m.signature())?;
    let a = m.parse_assignment(assignment)?;
    writeln!(out, "{}", m.eval(&t, &a)?)?;
    Ok(EXIT_OK)
}

fn normalize(form: Form, text: &str, out: &mut dyn Write) -> Res {
    let t = parse_term(text, Signature::SignedMeadow)?;
    let signed = t.has_sign();
    let e = t.expand_derived();
    match form {
        Form::Pseudo => writeln!(out, "{}", pseudo_simplify(&t))?,
        Form::Smf => writeln!(out, "{}", to_smf(&e)?.render_pretty())?,
        Form::Ssmf => writeln!(out, "{}", to_ssmf(&e)?.render_pretty())?,
        Form::Canon => match canon_poly(&e) {
            Ok(p) => writeln!(out, "{p}")?,
            Err(_) => {
                let f = if signed { to_ssmf(&e)? } else { to_smf(&e)? };
                writeln!(out, "{}", canon_smf(&f)?.render_pretty())?
            }
        },
    }
    Ok(EXIT_OK)
}

fn translate(target: Target, equation: &[String], out: &mut dyn Write) -> Res {
    let f = match target {
        Target::FieldQf => {
            let (s, t) = parse_equation(equation, Signature::Meadow)?;
            translate_phi(&to_smf(&s.expand_derived())?, &to_smf(&t.expand_derived())?)?
        }
        Target::OrderedField => {
            let (s, t) = parse_equation(equation, Signature::SignedMeadow)?;
            translate_ordered(&s.expand_derived(), &t.expand_derived())?
        }
    };
    writeln!(out, "{f}")?;
    Ok(EXIT_OK)
}

fn header(out: &mut dyn Write, command: &str, cfg: &Config, model: &str) -> std::io::Result<()> {
    writeln!(out, "# meadow {command} model={model} seed={} budget={}", cfg.seed, cfg.budget)
}

fn sample_config(cfg: &Config) -> SampleConfig {
    SampleConfig { magnitude: cfg.magnitude }
}

fn report_verdict(out: &mut dyn Write, s: &Term, t: &Term, model: &Model, v: &Verdict) -> Res {
    writeln!(out, "{s} = {t}")?;
    let code = match &v.outcome {
        Outcome::Proved => {
            writeln!(out, "proved by {}", v.engine)?;
            EXIT_OK
        }
        Outcome::Refuted { lhs, rhs, .. } => {
            writeln!(out, "refuted: lhs is {lhs}, rhs is {rhs}")?;
            EXIT_REFUTED
        }
        Outcome::ProbableValid { samples, degree_bound } => {
            write!(out, "probable-valid: no disagreement in {samples} samples")?;
            if *model == Model::Q0 {
                write!(out, " (rational samples only; not a proof over the reals)")?;
            }
            writeln!(out)?;
            if let Some(d) = degree_bound {
                writeln!(out, "total degree of the polynomial difference: {d}")?;
            }
            EXIT_OK
        }
        Outcome::Unknown => {
            writeln!(out, "unknown")?;
            EXIT_UNKNOWN
        }
    };
    writeln!(out, "{v}")?;
    Ok(code)
}

fn decide_cmd(cfg: &Config, split: bool, equation: &[String], out: &mut dyn Write) -> Res {
    let m = model(cfg)?;
    let (s, t) = parse_equation(equation, m.signature())?;
    if split {
        if !matches!(m, Model::C0 { .. }) {
            return Err(Usage("--split needs --model c0".into()));
        }
        header(out, "decide --split", cfg, &m.to_string())?;
        let v = decide::decide_complex_with(&s, &t, cfg.budget, cfg.seed, &sample_config(cfg))?;
        return report_verdict(out, &s, &t, &m, &v);
    }
    header(out, "decide", cfg, &m.to_string())?;
    let v = decide::decide_with(&s, &t, &m, cfg.budget, cfg.seed, &sample_config(cfg))?;
    report_verdict(out, &s, &t, &m, &v)
}

fn refute_cmd(cfg: &Config, equation: &[String], out: &mut dyn Write) -> Res {
    let m = model(cfg)?;
    let (s, t) = parse_equation(equation, m.signature())?;
    header(out, "refute", cfg, &m.to_string())?;
    writeln!(out, "{s} = {t}")?;
    match decide::refute_with(&s, &t, &m, cfg.budget, cfg.seed, &sample_config(cfg))? {
        Some(w) => {
            let (l, r) = (m.eval(&s, &w)?, m.eval(&t, &w)?);
            writeln!(out, "counterexample: lhs is {l}, rhs is {r}")?;
            writeln!(out, "refuted=yes witness={}", meadow::semantics::format_assignment(&w))?;
            Ok(EXIT_REFUTED)
        }
        None => {
            writeln!(out, "no counterexample found")?;
            writeln!(out, "refuted=no witness=")?;
            Ok(EXIT_OK)
        }
    }
}

fn check(cfg: &Config, file: &Path, out: &mut dyn Write) -> Res {
    let text = fs::read_to_string(file).map_err(|e| Usage(format!("{}: {e}", file.display())))?;
    let script = ProofScript::from_json_with_bound(&text, cfg.bound)?;
    let verdict = check_proof(&script);
    writeln!(out, "{} in {}: {}", script.goal, script.theory, verdict)?;
    writeln!(out, "valid={} steps={}", if verdict.is_valid() { "yes" } else { "no" }, script.steps.len())?;
    Ok(if verdict.is_valid() { EXIT_OK } else { EXIT_INVALID_PROOF })
}

/// File name used for a corpus script: dots become underscores.
pub fn script_file_name(name: &str) -> String {
    format!("{}.mpf", name.replace('.', "_"))
}

fn corpus_cmd(cfg: &Config, run_all: bool, emit: Option<&Path>, mutations: usize, out: &mut dyn Write) -> Res {
    if !run_all && emit.is_none() {
        return Err(Usage("corpus needs --run-all or --emit DIR".into()));
    }
    let mut code = EXIT_OK;
    if let Some(dir) = emit {
        fs::create_dir_all(dir)?;
        let scripts = corpus();
        for s in &scripts {
            fs::write(dir.join(script_file_name(&s.name)), s.script.to_json())?;
        }
        writeln!(out, "emitted={} dir={}", scripts.len(), dir.display())?;
    }
    if run_all {
        writeln!(out, "# meadow corpus seed={} mutations={mutations}", cfg.seed)?;
        let reports = audit_corpus(&AuditConfig { mutations, samples: 100, seed: cfg.seed });
        let mut failed = 0;
        for r in &reports {
            let sem = match &r.semantic {
                Ok(()) => "ok".to_string(),
                Err(e) => format!("counterexample {e}"),
            };
            writeln!(
                out,
                "{:<28} {:<16} steps={:<6} check={} semantic={} mutants={}/{}",
                r.name,
                r.theory.name(),
                r.steps,
                if r.verdict.is_valid() { "valid" } else { "invalid" },
                sem,
                r.mutants_rejected,
                r.mutants
            )?;
            if !r.passed() {
                failed += 1;
            }
        }
        writeln!(out, "scripts={} failed={failed}", reports.len())?;
        if failed > 0 {
            code = EXIT_INVALID_PROOF;
        }
    }
    Ok(code)
}

fn modelcheck(cfg: &Config, max_n: u64, theory: Option<&str>, out: &mut dyn Write) -> Res {
    if max_n == 0 {
        return Err(Usage("--max-n must be at least 1".into()));
    }
    let theory = theory.map(|t| t.parse::<Theory>().map(|t| t.with_bound(cfg.bound))).transpose()?;
    let rows = classify_range(max_n);
    writeln!(out, "{}", model_lab::table_header())?;
    for r in &rows {
        writeln!(out, "{}", r.row())?;
    }
    if let Some(th) = &theory {
        for m in rows.iter().filter_map(|r| r.construction.meadow()) {
            let failing: Vec<String> = check_axioms(m, th)?
                .into_iter()
                .filter_map(|a| {
                    a.counter.map(|c| if c.is_empty() { a.axiom.clone() } else { format!("{}({})", a.axiom, format_counter(&c)) })
                })
                .collect();
            writeln!(out, "n={} theory={} failing={}", m.n, th.name(), failing.join(" "))?;
        }
    }
    let meadows = rows.iter().filter(|r| r.is_meadow()).count();
    writeln!(out, "checked={max_n} meadows={meadows}")?;
    Ok(EXIT_OK)
}

fn split_complex(text: &str, out: &mut dyn Write) -> Res {
    let t = parse_term(text, Signature::ComplexMeadow)?;
    let (re, im) = decide::split_complex(&t)?;
    writeln!(out, "re: {re}")?;
    writeln!(out, "im: {im}")?;
    Ok(EXIT_OK)
}
