//! First-order formulas over field terms, and the translations of meadow
//! equations into them: a quantifier-free field formula from two standard
//! meadow forms, and sign elimination into ordered-field formulas.

use std::fmt;

use thiserror::Error;

use crate::normal_forms::{to_ssmf, NfError, Smf};
use crate::term::{self, tokenize, Parser, Signature, Term, TermError, Tok, VarSet};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FoError {
    #[error("sign symbol in input; use the signed translation")]
    SignedInput,
    #[error("variable `{0}` occurs in the term it should name")]
    VariableOccurs(String),
    #[error("inverse in a term that must be inverse-free")]
    InverseInTerm,
    #[error("complex symbol in a field term")]
    ComplexInTerm,
    #[error(transparent)]
    NormalForm(#[from] NfError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Less(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ForAll(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

pub fn eq(a: Term, b: Term) -> Formula {
    Formula::Eq(a, b)
}
pub fn neq(a: Term, b: Term) -> Formula {
    not(eq(a, b))
}
pub fn less(a: Term, b: Term) -> Formula {
    Formula::Less(a, b)
}
pub fn not(a: Formula) -> Formula {
    Formula::Not(Box::new(a))
}
pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}
pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}
pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}
pub fn forall(v: &str, a: Formula) -> Formula {
    Formula::ForAll(v.to_string(), Box::new(a))
}
pub fn exists(v: &str, a: Formula) -> Formula {
    Formula::Exists(v.to_string(), Box::new(a))
}

impl Formula {
    pub fn free_vars(&self) -> VarSet {
        match self {
            Formula::Eq(a, b) | Formula::Less(a, b) => {
                let mut v = a.free_vars();
                v.extend(&b.free_vars());
                v
            }
            Formula::Not(a) => a.free_vars(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let mut v = a.free_vars();
                v.extend(&b.free_vars());
                v
            }
            Formula::ForAll(x, a) | Formula::Exists(x, a) => a.free_vars().iter().filter(|v| *v != x).cloned().collect(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Eq(..) | Formula::Less(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::ForAll(..) | Formula::Exists(..) => false,
        }
    }

    /// All atom terms, left to right.
    pub fn atom_terms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        match self {
            Formula::Eq(a, b) | Formula::Less(a, b) => {
                out.push(a);
                out.push(b);
            }
            Formula::Not(a) | Formula::ForAll(_, a) | Formula::Exists(_, a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    pub fn has_order(&self) -> bool {
        match self {
            Formula::Less(..) => true,
            Formula::Eq(..) => false,
            Formula::Not(a) | Formula::ForAll(_, a) | Formula::Exists(_, a) => a.has_order(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.has_order() || b.has_order(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(a, b) | Formula::Less(a, b) => 1 + a.size() + b.size(),
            Formula::Not(a) | Formula::ForAll(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Replaces every equation atom by the formula `f` builds from its sides.
    pub fn map_equations<E>(&self, f: &mut dyn FnMut(&Term, &Term) -> Result<Formula, E>) -> Result<Formula, E> {
        Ok(match self {
            Formula::Eq(a, b) => f(a, b)?,
            Formula::Less(..) => self.clone(),
            Formula::Not(a) => not(a.map_equations(f)?),
            Formula::And(a, b) => and(a.map_equations(f)?, b.map_equations(f)?),
            Formula::Or(a, b) => or(a.map_equations(f)?, b.map_equations(f)?),
            Formula::Implies(a, b) => implies(a.map_equations(f)?, b.map_equations(f)?),
            Formula::ForAll(x, a) => forall(x, a.map_equations(f)?),
            Formula::Exists(x, a) => exists(x, a.map_equations(f)?),
        })
    }
}

// ---------------------------------------------------------------------------
// Rendering and parsing

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Imp,
    Or,
    And,
    Not,
}

fn level_of(f: &Formula) -> Level {
    match f {
        Formula::Implies(..) | Formula::ForAll(..) | Formula::Exists(..) => Level::Imp,
        Formula::Or(..) => Level::Or,
        Formula::And(..) => Level::And,
        Formula::Not(..) | Formula::Eq(..) | Formula::Less(..) => Level::Not,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, x: &Formula, min: Level) -> fmt::Result {
    if level_of(x) < min {
        write!(f, "(")?;
        write_formula(f, x)?;
        write!(f, ")")
    } else {
        write_formula(f, x)
    }
}

fn write_formula(f: &mut fmt::Formatter<'_>, x: &Formula) -> fmt::Result {
    match x {
        Formula::Eq(a, b) => write!(f, "{a} = {b}"),
        Formula::Less(a, b) => write!(f, "{a} < {b}"),
        Formula::Not(a) => {
            write!(f, "~")?;
            if matches!(**a, Formula::Eq(..) | Formula::Less(..)) {
                write!(f, "(")?;
                write_formula(f, a)?;
                write!(f, ")")
            } else {
                write_at(f, a, Level::Not)
            }
        }
        Formula::And(a, b) => {
            write_at(f, a, Level::And)?;
            write!(f, " & ")?;
            write_at(f, b, Level::Not)
        }
        Formula::Or(a, b) => {
            write_at(f, a, Level::Or)?;
            write!(f, " | ")?;
            write_at(f, b, Level::And)
        }
        Formula::Implies(a, b) => {
            write_at(f, a, Level::Or)?;
            write!(f, " -> ")?;
            write_at(f, b, Level::Imp)
        }
        Formula::ForAll(v, a) => {
            write!(f, "forall {v}. ")?;
            write_formula(f, a)
        }
        Formula::Exists(v, a) => {
            write!(f, "exists {v}. ")?;
            write_formula(f, a)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}

struct FormulaParser<'a> {
    p: Parser<'a>,
}

impl FormulaParser<'_> {
    fn formula(&mut self) -> Result<Formula, TermError> {
        let lhs = self.disj()?;
        if self.p.eat("->") {
            return Ok(implies(lhs, self.formula()?));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, TermError> {
        let mut acc = self.conj()?;
        while self.p.eat("|") {
            acc = or(acc, self.conj()?);
        }
        Ok(acc)
    }

    fn conj(&mut self) -> Result<Formula, TermError> {
        let mut acc = self.unary()?;
        while self.p.eat("&") {
            acc = and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, TermError> {
        if self.p.eat("~") {
            return Ok(not(self.unary()?));
        }
        if let (Some(Tok::Ident(kw)), Some(Tok::Ident(v))) = (self.p.peek().cloned(), self.p.peek_at(1).cloned()) {
            if kw == "forall" || kw == "exists" {
                self.p.idx += 2;
                self.p.expect(".")?;
                let body = self.formula()?;
                return Ok(if kw == "forall" { forall(&v, body) } else { exists(&v, body) });
            }
        }
        let start = self.p.idx;
        match self.atom() {
            Ok(a) => Ok(a),
            Err(atom_err) => {
                self.p.idx = start;
                if self.p.eat("(") {
                    let inner = self.formula();
                    if let Ok(f) = inner {
                        if self.p.eat(")") {
                            return Ok(f);
                        }
                    }
                }
                self.p.idx = start;
                Err(atom_err)
            }
        }
    }

    fn atom(&mut self) -> Result<Formula, TermError> {
        let a = self.p.term()?;
        if self.p.eat("=") {
            Ok(eq(a, self.p.term()?))
        } else if self.p.eat("<") {
            Ok(less(a, self.p.term()?))
        } else {
            self.p.err("expected `=` or `<`")
        }
    }
}

/// Parses the rendering produced by `Display`; bound variables may use the
/// fresh namespace `_g*`.
pub fn parse_formula(text: &str, sig: Signature) -> Result<Formula, TermError> {
    let toks = tokenize(text, true)?;
    let mut fp = FormulaParser { p: Parser::new(&toks, text.len(), sig, true) };
    let f = fp.formula()?;
    if !fp.p.at_end() {
        return fp.p.err("trailing input");
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Translations

/// Quantifier-free field formula equivalent (under cancellation) to the
/// equation of two sign-free standard meadow forms.
pub fn translate_phi(s: &Smf, t: &Smf) -> Result<Formula, FoError> {
    if s.has_sign() || t.has_sign() {
        return Err(FoError::SignedInput);
    }
    Ok(phi(s, t))
}

/// The same recursion with sign-bearing leaves and guards allowed.
pub fn translate_phi_signed(s: &Smf, t: &Smf) -> Formula {
    phi(s, t)
}

fn phi(s: &Smf, t: &Smf) -> Formula {
    match (s, t) {
        (Smf::Leaf(a), Smf::Leaf(b)) => {
            let (s1, s2, t1, t2) = (&a.num, &a.den, &b.num, &b.den);
            let zero = || Term::Zero;
            and(
                and(
                    implies(eq(s2.clone(), zero()), or(eq(t1.clone(), zero()), eq(t2.clone(), zero()))),
                    implies(eq(t2.clone(), zero()), or(eq(s1.clone(), zero()), eq(s2.clone(), zero()))),
                ),
                implies(
                    neq(term::mul(s2.clone(), t2.clone()), zero()),
                    eq(term::mul(s1.clone(), t2.clone()), term::mul(t1.clone(), s2.clone())),
                ),
            )
        }
        (Smf::Leaf(_), Smf::Guard { guard, zero, one }) => and(
            implies(eq(guard.clone(), Term::Zero), phi(s, zero)),
            implies(neq(guard.clone(), Term::Zero), phi(s, one)),
        ),
        (Smf::Guard { guard, zero, one }, _) => and(
            implies(eq(guard.clone(), Term::Zero), phi(zero, t)),
            implies(neq(guard.clone(), Term::Zero), phi(one, t)),
        ),
    }
}

/// Supplier of bound variables `_g0, _g1, ...`, which the term parser never
/// produces without opting in.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    next: usize,
}

impl Fresh {
    /// Starts past every `_gN` already used in `vars`.
    pub fn avoiding(vars: &VarSet) -> Fresh {
        let next = vars
            .iter()
            .filter_map(|v| v.strip_prefix("_g").and_then(|n| n.parse::<usize>().ok()))
            .map(|n| n + 1)
            .max()
            .unwrap_or(0);
        Fresh { next }
    }

    pub fn var(&mut self) -> String {
        let v = format!("_g{}", self.next);
        self.next += 1;
        v
    }
}

fn check_field_term(t: &Term) -> Result<(), FoError> {
    if t.has_inverse() {
        return Err(FoError::InverseInTerm);
    }
    if t.has_complex() {
        return Err(FoError::ComplexInTerm);
    }
    Ok(())
}

/// Ordered-field formula with free variables `Var(t) ∪ {x}` that holds
/// exactly when `x` equals `t`; signs are eliminated through the order.
pub fn translate_gamma(x: &str, t: &Term) -> Result<Formula, FoError> {
    let mut vars = t.free_vars();
    vars.insert(x);
    gamma_with(x, t, &mut Fresh::avoiding(&vars))
}

pub fn gamma_with(x: &str, t: &Term, fresh: &mut Fresh) -> Result<Formula, FoError> {
    if t.contains_var(x) {
        return Err(FoError::VariableOccurs(x.to_string()));
    }
    let t = t.expand_derived();
    check_field_term(&t)?;
    Ok(gamma(x, &t, fresh))
}

fn gamma(x: &str, t: &Term, fresh: &mut Fresh) -> Formula {
    let xv = || Term::Var(x.to_string());
    match t {
        Term::Neg(a) => {
            let z = fresh.var();
            let g = gamma(&z, a, fresh);
            forall(&z, implies(g, eq(xv(), term::neg(Term::Var(z.clone())))))
        }
        Term::Add(a, b) | Term::Mul(a, b) => {
            let y = fresh.var();
            let z = fresh.var();
            let ga = gamma(&y, a, fresh);
            let gb = gamma(&z, b, fresh);
            let (yv, zv) = (Term::Var(y.clone()), Term::Var(z.clone()));
            let combined = if matches!(t, Term::Add(..)) { term::add(yv, zv) } else { term::mul(yv, zv) };
            forall(&y, forall(&z, implies(and(ga, gb), eq(xv(), combined))))
        }
        Term::Sign(a) => {
            let same = gamma(x, a, fresh);
            let z = fresh.var();
            let gz = gamma(&z, a, fresh);
            let zv = || Term::Var(z.clone());
            let cases = or(
                and(less(Term::Zero, zv()), eq(xv(), Term::One)),
                and(less(zv(), Term::Zero), eq(xv(), term::neg(Term::One))),
            );
            and(implies(eq(xv(), Term::Zero), same), implies(neq(xv(), Term::Zero), forall(&z, implies(gz, cases))))
        }
        _ => eq(xv(), t.clone()),
    }
}

/// `forall x. forall y. (gamma(x, s) & gamma(y, t)) -> x = y` with fresh
/// `x`, `y`.
pub fn translate_psi(s: &Term, t: &Term) -> Result<Formula, FoError> {
    let mut vars = s.free_vars();
    vars.extend(&t.free_vars());
    psi_with(s, t, &mut Fresh::avoiding(&vars))
}

fn psi_with(s: &Term, t: &Term, fresh: &mut Fresh) -> Result<Formula, FoError> {
    let x = fresh.var();
    let y = fresh.var();
    let gs = gamma_with(&x, s, fresh)?;
    let gt = gamma_with(&y, t, fresh)?;
    Ok(forall(&x, forall(&y, implies(and(gs, gt), eq(Term::Var(x.clone()), Term::Var(y.clone()))))))
}

/// Ordered-field formula for a signed meadow equation: the signed
/// quantifier-free translation of the signed normal forms, with each
/// equation atom replaced by its sign-free `psi` form.
pub fn translate_ordered(s: &Term, t: &Term) -> Result<Formula, FoError> {
    let phi = translate_phi_signed(&to_ssmf(s)?, &to_ssmf(t)?);
    let mut fresh = Fresh::avoiding(&phi.free_vars());
    phi.map_equations(&mut |a, b| {
        if a.has_sign() || b.has_sign() {
            psi_with(a, b, &mut fresh)
        } else {
            Ok(eq(a.clone(), b.clone()))
        }
    })
}
