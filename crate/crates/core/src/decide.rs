//! Deciding equations in a model: canonical forms prove, sampling refutes,
//! and complex equations reduce to pairs of real ones.

use std::fmt;

use thiserror::Error;

use crate::normal_forms::{canon_poly, canon_smf, pseudo_simplify, to_smf, to_ssmf, Smf};
use crate::semantics::{
    eval_c0, format_assignment, random_assignment, structured_assignments, Assignment, EvalError, GaussRat, MeadowValue,
    Model, Rat, SampleConfig,
};
use crate::term::{self, Term, TermError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecideError {
    #[error(transparent)]
    Signature(#[from] TermError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("sign nodes have no complex real/imaginary split")]
    SignNode,
    #[error("variable `{0}` is not covered by the pairing")]
    Uncovered(String),
}

/// Which procedure produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    CanonicalForm,
    Sampling,
    ComplexSplit,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::CanonicalForm => "canonical-form",
            Engine::Sampling => "sampling",
            Engine::ComplexSplit => "complex-split",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Outcome {
    Proved,
    Refuted { witness: Assignment, lhs: MeadowValue, rhs: MeadowValue },
    /// No disagreement in `samples` evaluations. `degree_bound` is the total degree of the
    /// polynomial difference when both sides are polynomials.
    ProbableValid { samples: u64, degree_bound: Option<u32> },
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub engine: Engine,
    /// Evaluations performed.
    pub samples: u64,
}

impl Verdict {
    pub fn is_proved(&self) -> bool {
        matches!(self.outcome, Outcome::Proved)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.outcome, Outcome::Refuted { .. })
    }

    pub fn is_probable_valid(&self) -> bool {
        matches!(self.outcome, Outcome::ProbableValid { .. })
    }

    pub fn witness(&self) -> Option<&Assignment> {
        match &self.outcome {
            Outcome::Refuted { witness, .. } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self.outcome {
            Outcome::Proved => "proved",
            Outcome::Refuted { .. } => "refuted",
            Outcome::ProbableValid { .. } => "probable-valid",
            Outcome::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    /// `verdict=<label> samples=<n> witness=<x=..,y=..>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "verdict={} samples={} witness=", self.label(), self.samples)?;
        if let Some(w) = self.witness() {
            write!(f, "{}", format_assignment(w))?;
        }
        Ok(())
    }
}

fn check_signature(s: &Term, t: &Term, model: &Model) -> Result<(), DecideError> {
    s.check_signature(model.signature())?;
    t.check_signature(model.signature())?;
    Ok(())
}

fn canonical_form(t: &Term, signed: bool) -> Option<Smf> {
    let t = pseudo_simplify(&t.expand_derived());
    let f = if signed { to_ssmf(&t) } else { to_smf(&t) };
    canon_smf(&f.ok()?).ok()
}

/// True when both sides have the same canonical form, which makes them equal in every
/// model the forms are sound for (every meadow, or every ordered one with signs).
fn canonically_equal(s: &Term, t: &Term, model: &Model) -> bool {
    if s == t {
        return true;
    }
    if let (Ok(p), Ok(q)) = (canon_poly(&s.expand_derived()), canon_poly(&t.expand_derived())) {
        return p == q;
    }
    let signed = s.has_sign() || t.has_sign();
    if signed && !model.is_ordered() {
        return false;
    }
    match (canonical_form(s, signed), canonical_form(t, signed)) {
        (Some(a), Some(b)) => a == b,
        _ => false,
    }
}

fn degree_bound(s: &Term, t: &Term) -> Option<u32> {
    let p = canon_poly(&s.expand_derived()).ok()?;
    let q = canon_poly(&t.expand_derived()).ok()?;
    Some(p.sub(&q).total_degree())
}

struct Sampled {
    witness: Option<(Assignment, MeadowValue, MeadowValue)>,
    samples: u64,
}

/// Structured points first, then `budget` seeded random points; stops at the first disagreement.
fn sample(s: &Term, t: &Term, model: &Model, budget: u64, seed: u64, cfg: &SampleConfig) -> Result<Sampled, DecideError> {
    let mut vars = s.free_vars();
    vars.extend(&t.free_vars());
    let vars = vars.to_vec();
    let structured = if budget == 0 { Vec::new() } else { structured_assignments(model, &vars) };
    let random = (0..budget).map(|k| random_assignment(model, &vars, seed, k, cfg));
    let mut samples = 0;
    for a in structured.into_iter().chain(random) {
        samples += 1;
        let l = model.eval(s, &a)?;
        let r = model.eval(t, &a)?;
        if l != r {
            assert_ne!(model.eval(s, &a)?, model.eval(t, &a)?, "witness must re-verify");
            return Ok(Sampled { witness: Some((a, l, r)), samples });
        }
    }
    Ok(Sampled { witness: None, samples })
}

/// Decides `s = t` in `model`: canonical forms, then sampling.
pub fn decide(s: &Term, t: &Term, model: &Model, budget: u64, seed: u64) -> Result<Verdict, DecideError> {
    decide_with(s, t, model, budget, seed, &SampleConfig::default())
}

pub fn decide_with(
    s: &Term,
    t: &Term,
    model: &Model,
    budget: u64,
    seed: u64,
    cfg: &SampleConfig,
) -> Result<Verdict, DecideError> {
    check_signature(s, t, model)?;
    if canonically_equal(s, t, model) {
        return Ok(Verdict { outcome: Outcome::Proved, engine: Engine::CanonicalForm, samples: 0 });
    }
    let run = sample(s, t, model, budget, seed, cfg)?;
    let outcome = match run.witness {
        Some((witness, lhs, rhs)) => Outcome::Refuted { witness, lhs, rhs },
        None if run.samples == 0 => Outcome::Unknown,
        None => Outcome::ProbableValid { samples: run.samples, degree_bound: degree_bound(s, t) },
    };
    Ok(Verdict { outcome, engine: Engine::Sampling, samples: run.samples })
}

/// An assignment where `s` and `t` differ, by sampling only.
pub fn refute(s: &Term, t: &Term, model: &Model, budget: u64, seed: u64) -> Result<Option<Assignment>, DecideError> {
    refute_with(s, t, model, budget, seed, &SampleConfig::default())
}

pub fn refute_with(
    s: &Term,
    t: &Term,
    model: &Model,
    budget: u64,
    seed: u64,
    cfg: &SampleConfig,
) -> Result<Option<Assignment>, DecideError> {
    check_signature(s, t, model)?;
    Ok(sample(s, t, model, budget, seed, cfg)?.witness.map(|(a, _, _)| a))
}

// ---------------------------------------------------------------------------
// Complex to real

fn is_zero(t: &Term) -> bool {
    *t == Term::Zero
}

fn add(a: Term, b: Term) -> Term {
    match (is_zero(&a), is_zero(&b)) {
        (true, _) => b,
        (_, true) => a,
        _ => term::add(a, b),
    }
}

fn neg(a: Term) -> Term {
    match a {
        Term::Zero => Term::Zero,
        Term::Neg(x) => *x,
        _ => term::neg(a),
    }
}

fn sub(a: Term, b: Term) -> Term {
    match (is_zero(&a), is_zero(&b)) {
        (_, true) => a,
        (true, _) => neg(b),
        _ => term::sub(a, b),
    }
}

fn mul(a: Term, b: Term) -> Term {
    match (&a, &b) {
        (Term::Zero, _) | (_, Term::Zero) => Term::Zero,
        (Term::One, _) => b,
        (_, Term::One) => a,
        _ => term::mul(a, b),
    }
}

fn inv(a: Term) -> Term {
    match a {
        Term::Zero | Term::One => a,
        _ => term::inv(a),
    }
}

fn split(t: &Term) -> Result<(Term, Term), DecideError> {
    Ok(match t {
        Term::Zero => (Term::Zero, Term::Zero),
        Term::One => (Term::One, Term::Zero),
        Term::I => (Term::Zero, Term::One),
        Term::Var(_) => (term::re(t.clone()), term::im(t.clone())),
        Term::Neg(a) => {
            let (a1, a2) = split(a)?;
            (neg(a1), neg(a2))
        }
        Term::Add(a, b) => {
            let ((a1, a2), (b1, b2)) = (split(a)?, split(b)?);
            (add(a1, b1), add(a2, b2))
        }
        Term::Mul(a, b) => {
            let ((a1, a2), (b1, b2)) = (split(a)?, split(b)?);
            (
                sub(mul(a1.clone(), b1.clone()), mul(a2.clone(), b2.clone())),
                add(mul(a1, b2), mul(a2, b1)),
            )
        }
        Term::Inv(a) => {
            let (a1, a2) = split(a)?;
            if is_zero(&a2) {
                return Ok((inv(a1), Term::Zero));
            }
            let norm = inv(add(mul(a1.clone(), a1.clone()), mul(a2.clone(), a2.clone())));
            (mul(a1, norm.clone()), mul(neg(a2), norm))
        }
        Term::Conj(a) => {
            let (a1, a2) = split(a)?;
            (a1, neg(a2))
        }
        Term::Re(a) => (split(a)?.0, Term::Zero),
        Term::Im(a) => (split(a)?.1, Term::Zero),
        Term::Sign(_) => return Err(DecideError::SignNode),
        Term::Sub(a, b) => {
            let ((a1, a2), (b1, b2)) = (split(a)?, split(b)?);
            (sub(a1, b1), sub(a2, b2))
        }
        _ => split(&t.expand_derived())?,
    })
}

/// Real and imaginary part of a sign-free complex term as real forms.
pub fn split_complex(t: &Term) -> Result<(Term, Term), DecideError> {
    if t.has_sign() {
        return Err(DecideError::SignNode);
    }
    split(t)
}

/// Membership in the real forms: `0`, `1`, `re(x)`, `im(x)` closed under `-`, `^-1`, `+`, `*`
/// (binary `-` read as `a + -b`).
pub fn is_real_form(t: &Term) -> bool {
    match t {
        Term::Zero | Term::One => true,
        Term::Re(a) | Term::Im(a) => matches!(**a, Term::Var(_)),
        Term::Neg(a) | Term::Inv(a) => is_real_form(a),
        Term::Add(a, b) | Term::Mul(a, b) | Term::Sub(a, b) => is_real_form(a) && is_real_form(b),
        _ => false,
    }
}

/// `(x, y) -> z`: `x` becomes `re(z)` and `y` becomes `im(z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing {
    pub re: String,
    pub im: String,
    pub var: String,
}

impl Pairing {
    pub fn new(re: &str, im: &str, var: &str) -> Pairing {
        Pairing { re: re.to_string(), im: im.to_string(), var: var.to_string() }
    }
}

/// The starred term `u[x_k := re(z_k)][y_k := im(z_k)]`.
pub fn star_substitute(u: &Term, pairing: &[Pairing]) -> Result<Term, DecideError> {
    let mut map = term::Substitution::new();
    for p in pairing {
        map.insert(p.re.clone(), term::re(term::var(&p.var)));
        map.insert(p.im.clone(), term::im(term::var(&p.var)));
    }
    if let Some(v) = u.free_vars().iter().find(|v| !map.contains_key(*v)) {
        return Err(DecideError::Uncovered(v.clone()));
    }
    Ok(u.substitute(&map))
}

fn real_name(z: &str, part: &str) -> String {
    format!("{z}_{part}")
}

/// Replaces `re(z)` and `im(z)` by plain variables `z_re` and `z_im`.
fn unstar(t: &Term) -> Term {
    match t {
        Term::Re(a) | Term::Im(a) if matches!(**a, Term::Var(_)) => {
            let Term::Var(z) = &**a else { unreachable!() };
            term::var(&real_name(z, if matches!(t, Term::Re(_)) { "re" } else { "im" }))
        }
        _ => t.map_children(unstar),
    }
}

fn rat_of(v: Option<&MeadowValue>) -> Rat {
    match v {
        Some(MeadowValue::Rat(r)) => r.clone(),
        _ => Rat::zero(),
    }
}

/// Decides `s = t` in the Gaussian rationals by deciding the real and imaginary part of `s - t` in `q0`.
pub fn decide_complex(s: &Term, t: &Term, budget: u64, seed: u64) -> Result<Verdict, DecideError> {
    decide_complex_with(s, t, budget, seed, &SampleConfig::default())
}

pub fn decide_complex_with(s: &Term, t: &Term, budget: u64, seed: u64, cfg: &SampleConfig) -> Result<Verdict, DecideError> {
    if s.has_sign() || t.has_sign() {
        return Err(DecideError::SignNode);
    }
    let (r1, r2) = split_complex(&term::sub(s.clone(), t.clone()))?;
    let parts = [unstar(&r1), unstar(&r2)];
    let mut samples = 0;
    let mut proved = true;
    let mut degree: Option<u32> = Some(0);
    for (k, p) in parts.iter().enumerate() {
        let v = decide_with(p, &Term::Zero, &Model::Q0, budget, seed.wrapping_add(k as u64), cfg)?;
        samples += v.samples;
        match v.outcome {
            Outcome::Proved => {}
            Outcome::Refuted { witness, .. } => {
                let mut vars = s.free_vars();
                vars.extend(&t.free_vars());
                let complex: Assignment = vars
                    .iter()
                    .map(|z| {
                        let re = rat_of(witness.get(&real_name(z, "re")));
                        let im = rat_of(witness.get(&real_name(z, "im")));
                        (z.clone(), MeadowValue::Gauss(GaussRat::new(re, im)))
                    })
                    .collect();
                let (l, r) = (eval_c0(s, &complex)?, eval_c0(t, &complex)?);
                assert_ne!(l, r, "complex witness must re-verify");
                let outcome = Outcome::Refuted { witness: complex, lhs: MeadowValue::Gauss(l), rhs: MeadowValue::Gauss(r) };
                return Ok(Verdict { outcome, engine: Engine::ComplexSplit, samples });
            }
            Outcome::ProbableValid { degree_bound, .. } => {
                proved = false;
                degree = degree.zip(degree_bound).map(|(a, b)| a.max(b));
            }
            Outcome::Unknown => {
                proved = false;
                degree = None;
            }
        }
    }
    let outcome = if proved {
        Outcome::Proved
    } else if samples == 0 {
        Outcome::Unknown
    } else {
        Outcome::ProbableValid { samples, degree_bound: degree }
    };
    Ok(Verdict { outcome, engine: Engine::ComplexSplit, samples })
}
