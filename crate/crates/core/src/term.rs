//! Terms over the meadow signatures.
//!
//! The AST carries the core operators (`0 1 - + * ^-1`), the sign and complex
//! extensions, and the derived operators (subtraction, pseudo constants,
//! `re`/`im`, numerals, integer powers). Derived nodes stay in the tree until
//! [`Term::expand_derived`] is called, so printed output and proof scripts can
//! refer to `one(t)` and `zero(t)` directly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// The operator families a term may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signature {
    /// `0, 1, -, +, *, ^-1`
    Meadow,
    /// Meadow plus the sign function `s`.
    SignedMeadow,
    /// Meadow plus `i` and conjugation.
    ComplexMeadow,
    /// Complex meadow plus `s`, used by the `Signs*` axioms.
    ComplexSignedMeadow,
}

impl Signature {
    pub fn has_sign(self) -> bool {
        matches!(self, Signature::SignedMeadow | Signature::ComplexSignedMeadow)
    }

    pub fn has_complex(self) -> bool {
        matches!(self, Signature::ComplexMeadow | Signature::ComplexSignedMeadow)
    }

    /// Smallest signature containing both.
    pub fn join(self, other: Signature) -> Signature {
        let sign = self.has_sign() || other.has_sign();
        let complex = self.has_complex() || other.has_complex();
        Signature::from_flags(sign, complex)
    }

    pub fn from_flags(sign: bool, complex: bool) -> Signature {
        match (sign, complex) {
            (false, false) => Signature::Meadow,
            (true, false) => Signature::SignedMeadow,
            (false, true) => Signature::ComplexMeadow,
            (true, true) => Signature::ComplexSignedMeadow,
        }
    }

    /// True when every operator of `self` is also in `other`.
    pub fn within(self, other: Signature) -> bool {
        (!self.has_sign() || other.has_sign()) && (!self.has_complex() || other.has_complex())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Signature::Meadow => "meadow",
            Signature::SignedMeadow => "signed-meadow",
            Signature::ComplexMeadow => "complex-meadow",
            Signature::ComplexSignedMeadow => "complex-signed-meadow",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Zero,
    One,
    /// The imaginary unit.
    I,
    Var(String),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Inv(Box<Term>),
    Sign(Box<Term>),
    Conj(Box<Term>),
    Sub(Box<Term>, Box<Term>),
    /// `1_t = t * t^-1`
    PseudoOne(Box<Term>),
    /// `0_t = 1 - 1_t`
    PseudoZero(Box<Term>),
    Re(Box<Term>),
    Im(Box<Term>),
    Numeral(u64),
    Pow(Box<Term>, i64),
}

/// Head symbol of a term, used by congruence steps and diffing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    Zero,
    One,
    I,
    Var(String),
    Neg,
    Add,
    Mul,
    Inv,
    Sign,
    Conj,
    Sub,
    PseudoOne,
    PseudoZero,
    Re,
    Im,
    Numeral(u64),
    Pow(i64),
}

impl Head {
    pub fn arity(&self) -> usize {
        match self {
            Head::Zero | Head::One | Head::I | Head::Var(_) | Head::Numeral(_) => 0,
            Head::Add | Head::Mul | Head::Sub => 2,
            _ => 1,
        }
    }

    /// Operator name as used in proof scripts.
    pub fn name(&self) -> String {
        match self {
            Head::Zero => "0".into(),
            Head::One => "1".into(),
            Head::I => "i".into(),
            Head::Var(v) => v.clone(),
            Head::Neg => "neg".into(),
            Head::Add => "add".into(),
            Head::Mul => "mul".into(),
            Head::Inv => "inv".into(),
            Head::Sign => "s".into(),
            Head::Conj => "conj".into(),
            Head::Sub => "sub".into(),
            Head::PseudoOne => "one".into(),
            Head::PseudoZero => "zero".into(),
            Head::Re => "re".into(),
            Head::Im => "im".into(),
            Head::Numeral(n) => format!("n{n}"),
            Head::Pow(k) => format!("pow{k}"),
        }
    }

    /// Inverse of [`Head::name`] for the operators that take arguments.
    pub fn from_operator_name(name: &str) -> Option<Head> {
        Some(match name {
            "neg" => Head::Neg,
            "add" => Head::Add,
            "mul" => Head::Mul,
            "inv" => Head::Inv,
            "s" => Head::Sign,
            "conj" => Head::Conj,
            "sub" => Head::Sub,
            "one" => Head::PseudoOne,
            "zero" => Head::PseudoZero,
            "re" => Head::Re,
            "im" => Head::Im,
            other => {
                let k = other.strip_prefix("pow")?.parse().ok()?;
                Head::Pow(k)
            }
        })
    }
}

/// Deterministically ordered set of variable names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarSet(BTreeSet<String>);

impl VarSet {
    pub fn new() -> VarSet {
        VarSet(BTreeSet::new())
    }

    pub fn insert(&mut self, v: impl Into<String>) -> bool {
        self.0.insert(v.into())
    }

    pub fn contains(&self, v: &str) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &String> {
        self.0.iter()
    }

    pub fn extend(&mut self, other: &VarSet) {
        self.0.extend(other.0.iter().cloned());
    }

    pub fn to_vec(&self) -> Vec<String> {
        self.0.iter().cloned().collect()
    }
}

impl FromIterator<String> for VarSet {
    fn from_iter<T: IntoIterator<Item = String>>(iter: T) -> Self {
        VarSet(iter.into_iter().collect())
    }
}

impl<'a> FromIterator<&'a str> for VarSet {
    fn from_iter<T: IntoIterator<Item = &'a str>>(iter: T) -> Self {
        VarSet(iter.into_iter().map(String::from).collect())
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

pub type Substitution = BTreeMap<String, Term>;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("symbol `{symbol}` is not in the {signature} signature")]
    NotInSignature { symbol: String, signature: Signature },
}

// Smart constructors.
pub fn var(name: &str) -> Term {
    Term::Var(name.to_string())
}
pub fn neg(a: Term) -> Term {
    Term::Neg(Box::new(a))
}
pub fn add(a: Term, b: Term) -> Term {
    Term::Add(Box::new(a), Box::new(b))
}
pub fn mul(a: Term, b: Term) -> Term {
    Term::Mul(Box::new(a), Box::new(b))
}
pub fn inv(a: Term) -> Term {
    Term::Inv(Box::new(a))
}
pub fn sign(a: Term) -> Term {
    Term::Sign(Box::new(a))
}
pub fn conj(a: Term) -> Term {
    Term::Conj(Box::new(a))
}
pub fn sub(a: Term, b: Term) -> Term {
    Term::Sub(Box::new(a), Box::new(b))
}
pub fn one_of(a: Term) -> Term {
    Term::PseudoOne(Box::new(a))
}
pub fn zero_of(a: Term) -> Term {
    Term::PseudoZero(Box::new(a))
}
pub fn re(a: Term) -> Term {
    Term::Re(Box::new(a))
}
pub fn im(a: Term) -> Term {
    Term::Im(Box::new(a))
}
pub fn numeral(n: u64) -> Term {
    Term::Numeral(n)
}
/// `a^k`; an exponent of -1 yields the inverse node.
pub fn pow(a: Term, k: i64) -> Term {
    if k == -1 {
        inv(a)
    } else {
        Term::Pow(Box::new(a), k)
    }
}

/// Left-nested sum; the empty sum is `0`.
pub fn sum_of(terms: impl IntoIterator<Item = Term>) -> Term {
    terms.into_iter().reduce(add).unwrap_or(Term::Zero)
}

/// Left-nested product; the empty product is `1`.
pub fn product_of(terms: impl IntoIterator<Item = Term>) -> Term {
    terms.into_iter().reduce(mul).unwrap_or(Term::One)
}

impl Term {
    pub fn head(&self) -> Head {
        match self {
            Term::Zero => Head::Zero,
            Term::One => Head::One,
            Term::I => Head::I,
            Term::Var(v) => Head::Var(v.clone()),
            Term::Neg(_) => Head::Neg,
            Term::Add(..) => Head::Add,
            Term::Mul(..) => Head::Mul,
            Term::Inv(_) => Head::Inv,
            Term::Sign(_) => Head::Sign,
            Term::Conj(_) => Head::Conj,
            Term::Sub(..) => Head::Sub,
            Term::PseudoOne(_) => Head::PseudoOne,
            Term::PseudoZero(_) => Head::PseudoZero,
            Term::Re(_) => Head::Re,
            Term::Im(_) => Head::Im,
            Term::Numeral(n) => Head::Numeral(*n),
            Term::Pow(_, k) => Head::Pow(*k),
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Zero | Term::One | Term::I | Term::Var(_) | Term::Numeral(_) => vec![],
            Term::Add(a, b) | Term::Mul(a, b) | Term::Sub(a, b) => vec![a, b],
            Term::Neg(a)
            | Term::Inv(a)
            | Term::Sign(a)
            | Term::Conj(a)
            | Term::PseudoOne(a)
            | Term::PseudoZero(a)
            | Term::Re(a)
            | Term::Im(a)
            | Term::Pow(a, _) => vec![a],
        }
    }

    /// Rebuilds a node from a head and children; `None` on arity mismatch.
    pub fn build(head: &Head, mut args: Vec<Term>) -> Option<Term> {
        if args.len() != head.arity() {
            return None;
        }
        let one = |args: &mut Vec<Term>| Box::new(args.pop().unwrap());
        Some(match head {
            Head::Zero => Term::Zero,
            Head::One => Term::One,
            Head::I => Term::I,
            Head::Var(v) => Term::Var(v.clone()),
            Head::Numeral(n) => Term::Numeral(*n),
            Head::Add | Head::Mul | Head::Sub => {
                let b = Box::new(args.pop().unwrap());
                let a = Box::new(args.pop().unwrap());
                match head {
                    Head::Add => Term::Add(a, b),
                    Head::Mul => Term::Mul(a, b),
                    _ => Term::Sub(a, b),
                }
            }
            Head::Neg => Term::Neg(one(&mut args)),
            Head::Inv => Term::Inv(one(&mut args)),
            Head::Sign => Term::Sign(one(&mut args)),
            Head::Conj => Term::Conj(one(&mut args)),
            Head::PseudoOne => Term::PseudoOne(one(&mut args)),
            Head::PseudoZero => Term::PseudoZero(one(&mut args)),
            Head::Re => Term::Re(one(&mut args)),
            Head::Im => Term::Im(one(&mut args)),
            Head::Pow(k) => Term::Pow(one(&mut args), *k),
        })
    }

    /// Applies `f` to every child and rebuilds the node.
    pub fn map_children(&self, mut f: impl FnMut(&Term) -> Term) -> Term {
        let args = self.children().into_iter().map(&mut f).collect();
        Term::build(&self.head(), args).expect("arity preserved")
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn free_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut VarSet) {
        if let Term::Var(v) = self {
            out.insert(v.clone());
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            _ => self.children().iter().any(|c| c.contains_var(name)),
        }
    }

    /// True if some node satisfies `pred`.
    pub fn any_node(&self, pred: &dyn Fn(&Term) -> bool) -> bool {
        pred(self) || self.children().iter().any(|c| c.any_node(pred))
    }

    pub fn has_inverse(&self) -> bool {
        self.any_node(&|t| matches!(t, Term::Inv(_) | Term::PseudoOne(_) | Term::PseudoZero(_) | Term::Re(_) | Term::Im(_)) || matches!(t, Term::Pow(_, k) if *k < 0))
    }

    pub fn has_sign(&self) -> bool {
        self.any_node(&|t| matches!(t, Term::Sign(_)))
    }

    pub fn has_complex(&self) -> bool {
        self.any_node(&|t| matches!(t, Term::I | Term::Conj(_) | Term::Re(_) | Term::Im(_)))
    }

    /// Smallest signature admitting every node.
    pub fn signature(&self) -> Signature {
        Signature::from_flags(self.has_sign(), self.has_complex())
    }

    /// Fails with the first node that `sig` does not admit.
    pub fn check_signature(&self, sig: Signature) -> Result<(), TermError> {
        let bad = |symbol: &str| TermError::NotInSignature { symbol: symbol.to_string(), signature: sig };
        match self {
            Term::Sign(_) if !sig.has_sign() => return Err(bad("s")),
            Term::I if !sig.has_complex() => return Err(bad("i")),
            Term::Conj(_) if !sig.has_complex() => return Err(bad("conj")),
            Term::Re(_) if !sig.has_complex() => return Err(bad("re")),
            Term::Im(_) if !sig.has_complex() => return Err(bad("im")),
            _ => {}
        }
        for c in self.children() {
            c.check_signature(sig)?;
        }
        Ok(())
    }

    /// Simultaneous substitution; unmapped variables are left alone.
    pub fn substitute(&self, map: &Substitution) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            _ => self.map_children(|c| c.substitute(map)),
        }
    }

    /// Rewrites every derived operator into the core operators.
    pub fn expand_derived(&self) -> Term {
        match self {
            Term::Sub(a, b) => add(a.expand_derived(), neg(b.expand_derived())),
            Term::PseudoOne(a) => {
                let a = a.expand_derived();
                mul(a.clone(), inv(a))
            }
            Term::PseudoZero(a) => {
                let a = a.expand_derived();
                add(Term::One, neg(mul(a.clone(), inv(a))))
            }
            Term::Numeral(n) => expand_numeral(*n),
            Term::Pow(a, k) => expand_power(a.expand_derived(), *k),
            Term::Re(a) => {
                let a = a.expand_derived();
                mul(inv(expand_numeral(2)), add(a.clone(), conj(a)))
            }
            Term::Im(a) => {
                let a = a.expand_derived();
                mul(
                    neg(mul(Term::I, inv(expand_numeral(2)))),
                    add(a.clone(), neg(conj(a))),
                )
            }
            _ => self.map_children(|c| c.expand_derived()),
        }
    }

    /// Like [`Term::expand_derived`] but rejects nodes outside `sig` first.
    pub fn expand_derived_in(&self, sig: Signature) -> Result<Term, TermError> {
        self.check_signature(sig)?;
        Ok(self.expand_derived())
    }

    /// True if the term uses only core nodes of its signature.
    pub fn is_core(&self) -> bool {
        !self.any_node(&|t| {
            matches!(
                t,
                Term::Sub(..) | Term::PseudoOne(_) | Term::PseudoZero(_) | Term::Re(_) | Term::Im(_) | Term::Numeral(_) | Term::Pow(..)
            )
        })
    }
}

/// `n(0) = 0`, `n(1) = 1`, `n(k+1) = n(k) + 1`.
pub fn expand_numeral(n: u64) -> Term {
    match n {
        0 => Term::Zero,
        _ => (1..n).fold(Term::One, |acc, _| add(acc, Term::One)),
    }
}

/// `a^0 = 1`, `a^k = a^(k-1) * a`, `a^-k = (a^-1)^k`.
fn expand_power(base: Term, k: i64) -> Term {
    let (base, k) = if k < 0 { (inv(base), k.unsigned_abs()) } else { (base, k as u64) };
    match k {
        0 => Term::One,
        _ => (1..k).fold(base.clone(), |acc, _| mul(acc, base.clone())),
    }
}

// ---------------------------------------------------------------------------
// Parsing

const RESERVED: &[&str] = &["s", "conj", "one", "zero", "re", "im", "n", "i"];

pub fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// Checks the variable lexical grammar `[a-z][a-z0-9_]*`, excluding reserved words.
pub fn is_valid_var(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') && !is_reserved(name)
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    Sym(&'static str),
}

pub(crate) fn tokenize(text: &str, allow_fresh: bool) -> Result<Vec<(usize, Tok)>, TermError> {
    const SYMS: &[&str] = &["->", "<", "=", "+", "-", "*", "^", "(", ")", "&", "|", "~", ".", ","];
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        if c.is_whitespace() {
            pos += 1;
            continue;
        }
        if c.is_ascii_lowercase() || (allow_fresh && c == '_') {
            let start = pos;
            while pos < bytes.len() {
                let d = bytes[pos] as char;
                if d.is_ascii_lowercase() || d.is_ascii_digit() || d == '_' {
                    pos += 1;
                } else {
                    break;
                }
            }
            out.push((start, Tok::Ident(text[start..pos].to_string())));
            continue;
        }
        if c.is_ascii_digit() {
            let start = pos;
            while pos < bytes.len() && (bytes[pos] as char).is_ascii_digit() {
                pos += 1;
            }
            let value = text[start..pos]
                .parse()
                .map_err(|_| TermError::Syntax { pos: start, msg: "integer literal too large".into() })?;
            out.push((start, Tok::Int(value)));
            continue;
        }
        match SYMS.iter().find(|s| text[pos..].starts_with(**s)) {
            Some(s) => {
                out.push((pos, Tok::Sym(s)));
                pos += s.len();
            }
            None => return Err(TermError::Syntax { pos, msg: format!("unexpected character `{c}`") }),
        }
    }
    Ok(out)
}

pub(crate) struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pub(crate) idx: usize,
    end: usize,
    sig: Signature,
    allow_fresh: bool,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [(usize, Tok)], end: usize, sig: Signature, allow_fresh: bool) -> Self {
        Parser { toks, idx: 0, end, sig, allow_fresh }
    }

    pub(crate) fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|t| t.0).unwrap_or(self.end)
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|t| &t.1)
    }

    pub(crate) fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.idx + k).map(|t| &t.1)
    }

    pub(crate) fn err<T>(&self, msg: impl Into<String>) -> Result<T, TermError> {
        Err(TermError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    pub(crate) fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, sym: &str) -> Result<(), TermError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.err(format!("expected `{sym}`"))
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.idx >= self.toks.len()
    }

    pub(crate) fn term(&mut self) -> Result<Term, TermError> {
        let mut acc = self.prod()?;
        loop {
            if self.eat("+") {
                acc = add(acc, self.prod()?);
            } else if matches!(self.peek(), Some(Tok::Sym("-"))) {
                self.idx += 1;
                acc = sub(acc, self.prod()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn prod(&mut self) -> Result<Term, TermError> {
        let mut acc = self.unary()?;
        while self.eat("*") {
            acc = mul(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Term, TermError> {
        if self.eat("-") {
            return Ok(neg(self.unary()?));
        }
        let mut t = self.atom()?;
        while self.eat("^") {
            let negative = self.eat("-");
            let k = match self.peek() {
                Some(Tok::Int(k)) => *k,
                _ => return self.err("expected integer exponent"),
            };
            self.idx += 1;
            let k = i64::try_from(k).or_else(|_| self.err("exponent too large"))?;
            t = if negative { pow(t, -k) } else { pow(t, k) };
        }
        Ok(t)
    }

    fn gate(&self, symbol: &str, ok: bool) -> Result<(), TermError> {
        if ok {
            Ok(())
        } else {
            Err(TermError::NotInSignature { symbol: symbol.to_string(), signature: self.sig })
        }
    }

    fn atom(&mut self) -> Result<Term, TermError> {
        let start = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(0)) => {
                self.idx += 1;
                Ok(Term::Zero)
            }
            Some(Tok::Int(1)) => {
                self.idx += 1;
                Ok(Term::One)
            }
            Some(Tok::Int(k)) => self.err(format!("integer literal {k} is not a term; write n({k})")),
            Some(Tok::Sym("(")) => {
                self.idx += 1;
                let t = self.term()?;
                self.expect(")")?;
                Ok(t)
            }
            Some(Tok::Ident(name)) => {
                self.idx += 1;
                let call = matches!(self.peek(), Some(Tok::Sym("(")));
                match name.as_str() {
                    "i" => {
                        self.gate("i", self.sig.has_complex())?;
                        Ok(Term::I)
                    }
                    "n" if call => {
                        self.idx += 1;
                        let k = match self.peek() {
                            Some(Tok::Int(k)) => *k,
                            _ => return self.err("expected natural number in n(...)"),
                        };
                        self.idx += 1;
                        self.expect(")")?;
                        Ok(Term::Numeral(k))
                    }
                    "s" | "conj" | "one" | "zero" | "re" | "im" if call => {
                        match name.as_str() {
                            "s" => self.gate("s", self.sig.has_sign())?,
                            "one" | "zero" => {}
                            other => self.gate(other, self.sig.has_complex())?,
                        }
                        self.idx += 1;
                        let arg = self.term()?;
                        self.expect(")")?;
                        Ok(match name.as_str() {
                            "s" => sign(arg),
                            "conj" => conj(arg),
                            "one" => one_of(arg),
                            "zero" => zero_of(arg),
                            "re" => re(arg),
                            _ => im(arg),
                        })
                    }
                    _ if is_reserved(&name) => Err(TermError::Syntax { pos: start, msg: format!("reserved word `{name}` used as a variable") }),
                    _ if name.starts_with('_') && !self.allow_fresh => {
                        Err(TermError::Syntax { pos: start, msg: format!("invalid variable `{name}`") })
                    }
                    _ if call => Err(TermError::NotInSignature { symbol: name, signature: self.sig }),
                    _ => Ok(Term::Var(name)),
                }
            }
            Some(_) => self.err("expected a term"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a term under the given signature.
pub fn parse(text: &str, sig: Signature) -> Result<Term, TermError> {
    parse_with(text, sig, false)
}

/// Parses with an option to accept the reserved fresh-variable namespace `_g*`.
pub fn parse_with(text: &str, sig: Signature, allow_fresh: bool) -> Result<Term, TermError> {
    let toks = tokenize(text, allow_fresh)?;
    let mut p = Parser::new(&toks, text.len(), sig, allow_fresh);
    let t = p.term()?;
    if !p.at_end() {
        return p.err("trailing input");
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// Printing

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Level {
    Sum,
    Prod,
    Unary,
    Postfix,
}

fn level_of(t: &Term) -> Level {
    match t {
        Term::Add(..) | Term::Sub(..) => Level::Sum,
        Term::Mul(..) => Level::Prod,
        Term::Neg(_) => Level::Unary,
        _ => Level::Postfix,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, t: &Term, min: Level) -> fmt::Result {
    if level_of(t) < min {
        write!(f, "(")?;
        write_term(f, t)?;
        write!(f, ")")
    } else {
        write_term(f, t)
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    match t {
        Term::Zero => write!(f, "0"),
        Term::One => write!(f, "1"),
        Term::I => write!(f, "i"),
        Term::Var(v) => write!(f, "{v}"),
        Term::Numeral(n) => write!(f, "n({n})"),
        Term::Add(a, b) | Term::Sub(a, b) => {
            write_at(f, a, Level::Sum)?;
            write!(f, "{}", if matches!(t, Term::Add(..)) { " + " } else { " - " })?;
            write_at(f, b, Level::Prod)
        }
        Term::Mul(a, b) => {
            write_at(f, a, Level::Prod)?;
            write!(f, " * ")?;
            write_at(f, b, Level::Unary)
        }
        Term::Neg(a) => {
            write!(f, "-")?;
            write_at(f, a, Level::Unary)
        }
        Term::Inv(a) => {
            write_at(f, a, Level::Postfix)?;
            write!(f, "^-1")
        }
        Term::Pow(a, k) => {
            write_at(f, a, Level::Postfix)?;
            write!(f, "^{k}")
        }
        Term::Sign(a) => write!(f, "s({a})"),
        Term::Conj(a) => write!(f, "conj({a})"),
        Term::PseudoOne(a) => write!(f, "one({a})"),
        Term::PseudoZero(a) => write!(f, "zero({a})"),
        Term::Re(a) => write!(f, "re({a})"),
        Term::Im(a) => write!(f, "im({a})"),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self)
    }
}

/// Renders a term in the concrete grammar accepted by [`parse`].
pub fn print(t: &Term) -> String {
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse(s, Signature::ComplexSignedMeadow).unwrap()
    }

    #[test]
    fn parse_print_examples() {
        let t = parse("zero(x)*x", Signature::Meadow).unwrap();
        assert_eq!(t, mul(zero_of(var("x")), var("x")));
        assert_eq!(print(&t), "zero(x) * x");
        assert_eq!(parse("x^-1", Signature::Meadow).unwrap(), inv(var("x")));
        assert!(matches!(
            parse("s(x)", Signature::Meadow),
            Err(TermError::NotInSignature { ref symbol, .. }) if symbol == "s"
        ));
        assert_eq!(print(&one_of(var("x"))), "one(x)");
        assert_eq!(print(&numeral(3)), "n(3)");
        assert_eq!(print(&mul(add(var("x"), var("y")), inv(var("z")))), "(x + y) * z^-1");
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-x*y"), mul(neg(var("x")), var("y")));
        assert_eq!(p("x - y - z"), sub(sub(var("x"), var("y")), var("z")));
        assert_eq!(p("x - (y - z)"), sub(var("x"), sub(var("y"), var("z"))));
        assert_eq!(p("-x^2"), neg(pow(var("x"), 2)));
        assert_eq!(p("(-x)^-1"), inv(neg(var("x"))));
        assert_eq!(p("x^-3"), pow(var("x"), -3));
        assert_eq!(print(&p("(-x)^2")), "(-x)^2");
        assert_eq!(print(&neg(neg(var("x")))), "--x");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("x + * y", Signature::Meadow) {
            Err(TermError::Syntax { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse("2", Signature::Meadow).is_err());
        assert!(parse("f(x)", Signature::Meadow).is_err());
        assert!(parse("x +", Signature::Meadow).is_err());
        assert!(parse("n", Signature::Meadow).is_err());
        assert!(parse("i", Signature::Meadow).is_err());
        assert!(parse("_g0", Signature::Meadow).is_err());
        assert!(parse_with("_g0", Signature::Meadow, true).is_ok());
    }

    #[test]
    fn expand_examples() {
        assert_eq!(p("one(x)").expand_derived(), p("x * x^-1"));
        assert_eq!(p("n(3)").expand_derived(), p("(1 + 1) + 1"));
        assert_eq!(p("re(x)").expand_derived(), p("n(2)^-1 * (x + conj(x))").expand_derived());
        assert_eq!(p("re(x)").expand_derived(), p("(1 + 1)^-1 * (x + conj(x))"));
        assert_eq!(p("zero(x)").expand_derived(), p("1 + -(x * x^-1)"));
        assert_eq!(p("x^0").expand_derived(), Term::One);
        assert_eq!(p("x^3").expand_derived(), p("x * x * x"));
        assert_eq!(p("x^-2").expand_derived(), p("x^-1 * x^-1"));
        assert_eq!(p("im(x)").expand_derived(), p("-(i * (1 + 1)^-1) * (x + -conj(x))"));
        assert!(p("re(x)").expand_derived_in(Signature::Meadow).is_err());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut m = Substitution::new();
        m.insert("x".into(), Term::Zero);
        assert_eq!(p("x + y").substitute(&m), p("0 + y"));
        let mut m = Substitution::new();
        m.insert("x".into(), p("x * x"));
        assert_eq!(p("x").substitute(&m), p("x * x"));
        let mut m = Substitution::new();
        m.insert("x".into(), var("y"));
        m.insert("y".into(), var("x"));
        assert_eq!(p("x + y").substitute(&m), p("y + x"));
    }

    #[test]
    fn free_vars_examples() {
        assert_eq!(p("x + y^-1").free_vars().to_vec(), vec!["x", "y"]);
        assert!(p("n(5)").free_vars().is_empty());
        assert_eq!(p("one(x) * 0").free_vars().to_vec(), vec!["x"]);
    }
}
