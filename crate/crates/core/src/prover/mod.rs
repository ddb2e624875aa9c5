//! Equational proofs over the meadow axiom theories.
//!
//! A [`ProofScript`] is a list of steps, each naming one inference rule and
//! the equation it concludes. [`check_with`] replays every step against the
//! axioms, earlier steps and previously verified lemmas. Goal matching is
//! modulo expansion of derived operators and nothing else.

mod audit;
mod corpus;
mod tactic;
mod theory;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::{self, Head, Signature, Substitution, Term, TermError};

pub use audit::{audit_corpus, cross_check, reference_model, AuditConfig, ScriptReport};
pub use corpus::{corpus, NamedScript};
pub use tactic::{Fact, ProofBuilder};
pub use theory::{scheme_var, Scheme, Theory, DEFAULT_BOUND};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("unknown theory component `{0}`")]
    UnknownTheory(String),
    #[error("axiom `{name}` is not in {theory}")]
    UnknownAxiom { name: String, theory: String },
    #[error("axiom `{0}` needs an index")]
    MissingIndex(String),
    #[error("axiom `{0}` takes no index")]
    UnexpectedIndex(String),
    #[error("index {index} of `{name}` exceeds the scheme bound {bound}")]
    IndexOutOfBound { name: String, index: usize, bound: usize },
    #[error("no verified lemma `{0}` usable in this theory")]
    UnknownLemma(String),
    #[error("malformed proof script: {0}")]
    Format(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("tactic failed: {0}")]
    Tactic(String),
}

/// An equation `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Statement {
    pub lhs: Term,
    pub rhs: Term,
}

impl Statement {
    pub fn new(lhs: Term, rhs: Term) -> Statement {
        Statement { lhs, rhs }
    }

    pub fn substitute(&self, sub: &Substitution) -> Statement {
        Statement::new(self.lhs.substitute(sub), self.rhs.substitute(sub))
    }

    pub fn expand_derived(&self) -> Statement {
        Statement::new(self.lhs.expand_derived(), self.rhs.expand_derived())
    }

    pub fn signature(&self) -> Signature {
        self.lhs.signature().join(self.rhs.signature())
    }

    /// Equality after expanding derived operators on both sides.
    pub fn matches(&self, other: &Statement) -> bool {
        self.expand_derived() == other.expand_derived()
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    Axiom { name: String, index: Option<usize>, subst: Substitution },
    Refl,
    Sym(usize),
    Trans(usize, usize),
    Cong { op: Head, refs: Vec<usize> },
    Subst { of: usize, subst: Substitution },
    Lemma { name: String, subst: Substitution },
    /// Both sides agree with the referenced step's after expanding derived operators.
    ExpandDerived(usize),
}

impl Rule {
    pub fn refs(&self) -> Vec<usize> {
        match self {
            Rule::Sym(r) | Rule::Subst { of: r, .. } | Rule::ExpandDerived(r) => vec![*r],
            Rule::Trans(a, b) => vec![*a, *b],
            Rule::Cong { refs, .. } => refs.clone(),
            _ => Vec::new(),
        }
    }

    fn keyword(&self) -> &'static str {
        match self {
            Rule::Axiom { .. } => "axiom",
            Rule::Refl => "refl",
            Rule::Sym(_) => "sym",
            Rule::Trans(..) => "trans",
            Rule::Cong { .. } => "cong",
            Rule::Subst { .. } => "subst",
            Rule::Lemma { .. } => "lemma",
            Rule::ExpandDerived(_) => "expand-derived",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofStep {
    pub id: usize,
    pub statement: Statement,
    pub rule: Rule,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofScript {
    pub theory: Theory,
    pub goal: Statement,
    pub steps: Vec<ProofStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// `step` is `None` when every step checks but the goal is not reached.
    Invalid { step: Option<usize>, reason: String },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "valid"),
            Verdict::Invalid { step: Some(id), reason } => write!(f, "invalid at step {id}: {reason}"),
            Verdict::Invalid { step: None, reason } => write!(f, "invalid: {reason}"),
        }
    }
}

/// A verified equation available to the `lemma` rule.
#[derive(Clone, Debug)]
pub struct LibraryEntry {
    pub name: String,
    pub theory: Theory,
    pub goal: Statement,
}

/// Lemmas usable by scripts, in the order they were verified.
#[derive(Clone, Debug, Default)]
pub struct Library {
    entries: Vec<LibraryEntry>,
}

impl Library {
    pub fn new() -> Library {
        Library::default()
    }

    /// Adds an entry without checking it; callers are responsible for having verified it.
    pub fn push(&mut self, entry: LibraryEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LibraryEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&LibraryEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// The lemma `name` if its theory is contained in `theory`.
    pub fn lookup(&self, name: &str, theory: &Theory) -> Result<&LibraryEntry, ProverError> {
        self.get(name)
            .filter(|e| theory.includes(&e.theory))
            .ok_or_else(|| ProverError::UnknownLemma(name.to_string()))
    }

    /// Checks the scripts in order, each against the lemmas verified before it.
    /// Returns the library of valid scripts and the verdict of every script.
    pub fn verify(scripts: &[NamedScript]) -> (Library, Vec<Verdict>) {
        let mut lib = Library::new();
        let mut verdicts = Vec::with_capacity(scripts.len());
        for s in scripts {
            let v = check_with(&s.script, &lib);
            if v.is_valid() {
                lib.push(LibraryEntry { name: s.name.clone(), theory: s.script.theory.clone(), goal: s.script.goal.clone() });
            }
            verdicts.push(v);
        }
        (lib, verdicts)
    }

    /// The shipped corpus, verified once per process.
    pub fn builtin() -> &'static Library {
        static LIB: OnceLock<Library> = OnceLock::new();
        LIB.get_or_init(|| Library::verify(&corpus()).0)
    }
}

/// Checks a script against the shipped corpus as its lemma library.
pub fn check_proof(script: &ProofScript) -> Verdict {
    check_with(script, Library::builtin())
}

/// Checks every step and the final goal match.
pub fn check_with(script: &ProofScript, lib: &Library) -> Verdict {
    match replay(script, lib) {
        Err((step, reason)) => Verdict::Invalid { step, reason },
        Ok(last) => {
            if last.matches(&script.goal) {
                Verdict::Valid
            } else {
                Verdict::Invalid { step: None, reason: format!("last step proves `{last}`, not the goal `{}`", script.goal) }
            }
        }
    }
}

/// The statement of the last step if every step checks.
pub fn proven_statement(script: &ProofScript, lib: &Library) -> Option<Statement> {
    replay(script, lib).ok()
}

fn replay(script: &ProofScript, lib: &Library) -> Result<Statement, (Option<usize>, String)> {
    let theory = &script.theory;
    let sig = theory.signature();
    if let Err(e) = script.goal.lhs.check_signature(sig).and_then(|_| script.goal.rhs.check_signature(sig)) {
        return Err((None, format!("goal: {e}")));
    }
    let mut proved: HashMap<usize, &Statement> = HashMap::new();
    let mut last = None;
    for step in &script.steps {
        let fail = |reason: String| Err((Some(step.id), reason));
        if proved.contains_key(&step.id) {
            return fail("duplicate step id".into());
        }
        let st = &step.statement;
        if let Err(e) = st.lhs.check_signature(sig).and_then(|_| st.rhs.check_signature(sig)) {
            return fail(e.to_string());
        }
        let get = |r: usize| proved.get(&r).copied().ok_or(format!("reference {r} is not an earlier step"));
        let expected: Result<Statement, String> = match &step.rule {
            Rule::Axiom { name, index, subst } => {
                theory.instantiate_axiom(name, *index, subst).map_err(|e| e.to_string())
            }
            Rule::Refl => Ok(Statement::new(st.lhs.clone(), st.lhs.clone())),
            Rule::Sym(r) => get(*r).map(|s| Statement::new(s.rhs.clone(), s.lhs.clone())),
            Rule::Trans(a, b) => match (get(*a), get(*b)) {
                (Ok(x), Ok(y)) if x.rhs == y.lhs => Ok(Statement::new(x.lhs.clone(), y.rhs.clone())),
                (Ok(_), Ok(_)) => Err("middle terms differ".into()),
                (Err(e), _) | (_, Err(e)) => Err(e),
            },
            Rule::Cong { op, refs } => {
                if op.arity() == 0 || op.arity() != refs.len() {
                    Err(format!("operator `{}` takes {} arguments, got {}", op.name(), op.arity(), refs.len()))
                } else {
                    refs.iter()
                        .map(|r| get(*r))
                        .collect::<Result<Vec<_>, _>>()
                        .and_then(|args| {
                            let l = Term::build(op, args.iter().map(|s| s.lhs.clone()).collect());
                            let r = Term::build(op, args.iter().map(|s| s.rhs.clone()).collect());
                            l.zip(r).map(|(l, r)| Statement::new(l, r)).ok_or_else(|| "bad operator".to_string())
                        })
                }
            }
            Rule::Subst { of, subst } => get(*of).map(|s| s.substitute(subst)),
            Rule::Lemma { name, subst } => {
                lib.lookup(name, theory).map(|e| e.goal.substitute(subst)).map_err(|e| e.to_string())
            }
            Rule::ExpandDerived(r) => match get(*r) {
                Ok(s) if s.matches(st) => Ok(st.clone()),
                Ok(_) => Err("sides differ from the referenced step after expansion".into()),
                Err(e) => Err(e),
            },
        };
        match expected {
            Err(e) => return fail(e),
            Ok(e) if &e != st => {
                return fail(format!("{} yields `{e}`, step states `{st}`", step.rule.keyword()));
            }
            Ok(_) => {}
        }
        proved.insert(step.id, st);
        last = Some(st);
    }
    last.cloned().ok_or((None, "script has no steps".into()))
}

// ---------------------------------------------------------------------------
// File format

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptFile {
    theory: String,
    goal: GoalFile,
    steps: Vec<StepFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GoalFile {
    lhs: String,
    rhs: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepFile {
    id: usize,
    lhs: String,
    rhs: String,
    rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    refs: Vec<usize>,
    /// Axiom name, lemma name, or congruence operator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axiom: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    subst: BTreeMap<String, String>,
}

fn subst_to_file(s: &Substitution) -> BTreeMap<String, String> {
    s.iter().map(|(v, t)| (v.clone(), term::print(t))).collect()
}

impl ProofScript {
    pub fn to_json(&self) -> String {
        let steps = self
            .steps
            .iter()
            .map(|s| {
                let (axiom, index, subst) = match &s.rule {
                    Rule::Axiom { name, index, subst } => (Some(name.clone()), *index, subst_to_file(subst)),
                    Rule::Lemma { name, subst } => (Some(name.clone()), None, subst_to_file(subst)),
                    Rule::Subst { subst, .. } => (None, None, subst_to_file(subst)),
                    Rule::Cong { op, .. } => (Some(op.name()), None, BTreeMap::new()),
                    _ => (None, None, BTreeMap::new()),
                };
                StepFile {
                    id: s.id,
                    lhs: term::print(&s.statement.lhs),
                    rhs: term::print(&s.statement.rhs),
                    rule: s.rule.keyword().to_string(),
                    refs: s.rule.refs(),
                    axiom,
                    index,
                    subst,
                }
            })
            .collect();
        let file = ScriptFile {
            theory: self.theory.name(),
            goal: GoalFile { lhs: term::print(&self.goal.lhs), rhs: term::print(&self.goal.rhs) },
            steps,
        };
        let mut out = serde_json::to_string_pretty(&file).expect("script serializes");
        out.push('\n');
        out
    }

    /// Parses a `.mpf` document. Terms are read in the theory's signature.
    pub fn from_json(text: &str) -> Result<ProofScript, ProverError> {
        Self::from_json_with_bound(text, DEFAULT_BOUND)
    }

    pub fn from_json_with_bound(text: &str, bound: usize) -> Result<ProofScript, ProverError> {
        let file: ScriptFile = serde_json::from_str(text).map_err(|e| ProverError::Format(e.to_string()))?;
        let theory = file.theory.parse::<Theory>()?.with_bound(bound);
        let sig = theory.signature();
        let parse = |s: &str| term::parse(s, sig).map_err(ProverError::from);
        let parse_subst = |m: &BTreeMap<String, String>| -> Result<Substitution, ProverError> {
            m.iter()
                .map(|(v, s)| {
                    if !term::is_valid_var(v) {
                        return Err(ProverError::Format(format!("invalid variable `{v}` in substitution")));
                    }
                    Ok((v.clone(), parse(s)?))
                })
                .collect()
        };
        let goal = Statement::new(parse(&file.goal.lhs)?, parse(&file.goal.rhs)?);
        let mut steps = Vec::with_capacity(file.steps.len());
        for s in &file.steps {
            let bad = |msg: &str| ProverError::Format(format!("step {}: {msg}", s.id));
            let need_refs = |n: usize| {
                if s.refs.len() == n {
                    Ok(())
                } else {
                    Err(bad(&format!("rule `{}` takes {n} refs", s.rule)))
                }
            };
            let name = || s.axiom.clone().ok_or_else(|| bad("missing `axiom` field"));
            let rule = match s.rule.as_str() {
                "axiom" => {
                    need_refs(0)?;
                    Rule::Axiom { name: name()?, index: s.index, subst: parse_subst(&s.subst)? }
                }
                "refl" => {
                    need_refs(0)?;
                    Rule::Refl
                }
                "sym" => {
                    need_refs(1)?;
                    Rule::Sym(s.refs[0])
                }
                "trans" => {
                    need_refs(2)?;
                    Rule::Trans(s.refs[0], s.refs[1])
                }
                "cong" => {
                    let op = Head::from_operator_name(&name()?).ok_or_else(|| bad("unknown operator"))?;
                    Rule::Cong { op, refs: s.refs.clone() }
                }
                "subst" => {
                    need_refs(1)?;
                    Rule::Subst { of: s.refs[0], subst: parse_subst(&s.subst)? }
                }
                "lemma" => {
                    need_refs(0)?;
                    Rule::Lemma { name: name()?, subst: parse_subst(&s.subst)? }
                }
                "expand-derived" => {
                    need_refs(1)?;
                    Rule::ExpandDerived(s.refs[0])
                }
                other => return Err(bad(&format!("unknown rule `{other}`"))),
            };
            steps.push(ProofStep { id: s.id, statement: Statement::new(parse(&s.lhs)?, parse(&s.rhs)?), rule });
        }
        Ok(ProofScript { theory, goal, steps })
    }
}

// ---------------------------------------------------------------------------
// Mutation

fn positions(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(path.clone());
    for (k, c) in t.children().into_iter().enumerate() {
        path.push(k);
        positions(c, path, out);
        path.pop();
    }
}

fn replace_at(t: &Term, path: &[usize], f: &dyn Fn(&Term) -> Term) -> Term {
    match path.split_first() {
        None => f(t),
        Some((k, rest)) => {
            let mut idx = 0;
            t.map_children(|c| {
                let out = if idx == *k { replace_at(c, rest, f) } else { c.clone() };
                idx += 1;
                out
            })
        }
    }
}

/// One random single-step mutation: a perturbed term node or a redirected reference.
pub fn mutate(script: &ProofScript, rng: &mut impl Rng) -> ProofScript {
    let mut out = script.clone();
    if out.steps.is_empty() {
        return out;
    }
    let k = rng.gen_range(0..out.steps.len());
    let earlier: Vec<usize> = out.steps[..k].iter().map(|s| s.id).collect();
    let step = &mut out.steps[k];
    let refs = step.rule.refs();
    if !refs.is_empty() && rng.gen_bool(0.5) {
        let old = refs[rng.gen_range(0..refs.len())];
        let choices: Vec<usize> = earlier.into_iter().filter(|&r| r != old).collect();
        if let Some(&new) = choices.choose(rng) {
            let swap = |r: &mut usize| {
                if *r == old {
                    *r = new;
                }
            };
            match &mut step.rule {
                Rule::Sym(r) | Rule::Subst { of: r, .. } | Rule::ExpandDerived(r) => swap(r),
                Rule::Trans(a, b) => {
                    swap(a);
                    swap(b);
                }
                Rule::Cong { refs, .. } => refs.iter_mut().for_each(swap),
                _ => {}
            }
            return out;
        }
    }
    let side = if rng.gen_bool(0.5) { &mut step.statement.lhs } else { &mut step.statement.rhs };
    let mut all = Vec::new();
    positions(side, &mut Vec::new(), &mut all);
    let path = all.choose(rng).expect("a term has a root").clone();
    let kind = rng.gen_range(0..3);
    *side = replace_at(side, &path, &|u: &Term| match kind {
        0 => term::neg(u.clone()),
        1 => term::add(u.clone(), Term::One),
        _ if *u != Term::Zero => Term::Zero,
        _ => Term::One,
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::sample_rng;

    fn t(s: &str) -> Term {
        term::parse(s, Signature::ComplexSignedMeadow).unwrap()
    }

    fn step(id: usize, l: &str, r: &str, rule: Rule) -> ProofStep {
        ProofStep { id, statement: Statement::new(t(l), t(r)), rule }
    }

    fn axiom(name: &str, pairs: &[(&str, &str)]) -> Rule {
        Rule::Axiom { name: name.into(), index: None, subst: pairs.iter().map(|(v, s)| (v.to_string(), t(s))).collect() }
    }

    fn zero_add_script() -> ProofScript {
        ProofScript {
            theory: "CR".parse().unwrap(),
            goal: Statement::new(t("0 + x"), t("x")),
            steps: vec![
                step(1, "0 + x", "x + 0", axiom("CR2", &[("x", "0"), ("y", "x")])),
                step(2, "x + 0", "x", axiom("CR3", &[])),
                step(3, "0 + x", "x", Rule::Trans(1, 2)),
            ],
        }
    }

    #[test]
    fn small_script_checks() {
        let lib = Library::new();
        assert_eq!(check_with(&zero_add_script(), &lib), Verdict::Valid);
        let mut bad = zero_add_script();
        bad.steps[1].statement.rhs = t("0");
        assert!(matches!(check_with(&bad, &lib), Verdict::Invalid { step: Some(2), .. }));
        let mut bad = zero_add_script();
        bad.steps[2].rule = Rule::Trans(2, 1);
        assert!(matches!(check_with(&bad, &lib), Verdict::Invalid { step: Some(3), .. }));
        let mut bad = zero_add_script();
        bad.goal = Statement::new(t("x"), t("0 + x"));
        assert!(matches!(check_with(&bad, &lib), Verdict::Invalid { step: None, .. }));
    }

    #[test]
    fn forward_references_and_arity_are_rejected() {
        let lib = Library::new();
        let mut s = zero_add_script();
        s.steps[0].rule = Rule::Sym(2);
        assert!(matches!(check_with(&s, &lib), Verdict::Invalid { step: Some(1), .. }));
        let s = ProofScript {
            theory: "CR".parse().unwrap(),
            goal: Statement::new(t("-x"), t("-x")),
            steps: vec![step(1, "x", "x", Rule::Refl), step(2, "-x", "-x", Rule::Cong { op: Head::Add, refs: vec![1] })],
        };
        assert!(matches!(check_with(&s, &lib), Verdict::Invalid { step: Some(2), .. }));
    }

    #[test]
    fn goal_matches_modulo_expansion_only() {
        let lib = Library::new();
        let s = ProofScript {
            theory: "Md".parse().unwrap(),
            goal: Statement::new(t("one(x)"), t("x * x^-1")),
            steps: vec![step(1, "x * x^-1", "x * x^-1", Rule::Refl)],
        };
        assert!(check_with(&s, &lib).is_valid());
        let s = ProofScript {
            theory: "Md".parse().unwrap(),
            goal: Statement::new(t("x^-1 * x"), t("x * x^-1")),
            steps: vec![step(1, "x * x^-1", "x * x^-1", Rule::Refl)],
        };
        assert!(!check_with(&s, &lib).is_valid());
    }

    #[test]
    fn signature_is_enforced() {
        let s = ProofScript {
            theory: "Md".parse().unwrap(),
            goal: Statement::new(t("s(x)"), t("s(x)")),
            steps: vec![step(1, "s(x)", "s(x)", Rule::Refl)],
        };
        assert!(!check_with(&s, &Library::new()).is_valid());
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let s = zero_add_script();
        let text = s.to_json();
        assert_eq!(ProofScript::from_json(&text).unwrap(), s);
        let extra = text.replacen("\"theory\"", "\"note\": \"x\",\n  \"theory\"", 1);
        assert!(matches!(ProofScript::from_json(&extra), Err(ProverError::Format(_))));
        let step_extra = text.replacen("\"rule\"", "\"why\": 1, \"rule\"", 1);
        assert!(ProofScript::from_json(&step_extra).is_err());
    }

    #[test]
    fn mutations_break_the_small_script() {
        let lib = Library::new();
        let s = zero_add_script();
        let mut rng = sample_rng(3, 0);
        for _ in 0..50 {
            let m = mutate(&s, &mut rng);
            assert_ne!(m, s);
            let proven = proven_statement(&m, &lib);
            assert!(proven.is_none_or(|p| !p.matches(&s.goal)));
        }
    }
}
