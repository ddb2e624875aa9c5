//! Polynomial canonical forms, pseudo-constant simplification and standard
//! meadow forms (nested guards over fraction leaves).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::term::{self, Term, VarSet};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NfError {
    #[error("`{0}` is not allowed here")]
    Disallowed(String),
}

// ---------------------------------------------------------------------------
// Polynomials

/// A polynomial indeterminate: a variable, or the sign of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Var(String),
    Sign(Polynomial),
}

/// A power product; atoms sorted, exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Atom, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn atom(a: Atom) -> Monomial {
        Monomial(vec![(a, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    fn mul(&self, o: &Monomial) -> Monomial {
        let mut map: BTreeMap<Atom, u32> = self.0.iter().cloned().collect();
        for (a, e) in &o.0 {
            *map.entry(a.clone()).or_insert(0) += e;
        }
        Monomial(map.into_iter().collect())
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: higher degree is larger; ties broken by the
    /// exponent of the earliest atom.
    fn cmp(&self, o: &Monomial) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(o.0.iter()) {
                match a.0.cmp(&b.0) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match a.1.cmp(&b.1) {
                        Ordering::Equal => {}
                        other => return other,
                    },
                }
            }
            self.0.len().cmp(&o.0.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Monomial) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Sparse polynomial with exact integer coefficients and no zero terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Polynomial {
        let c = c.into();
        let mut p = Polynomial::zero();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(1)
    }

    pub fn atom(a: Atom) -> Polynomial {
        let mut p = Polynomial::zero();
        p.terms.insert(Monomial::atom(a), BigInt::one());
        p
    }

    pub fn var(name: &str) -> Polynomial {
        Polynomial::atom(Atom::Var(name.to_string()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no indeterminates.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.as_constant(), Some(c) if c.abs().is_one())
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn push(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let sum = self.terms.remove(&m).unwrap_or_else(BigInt::zero) + c;
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.push(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.push(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Variables, including those under sign atoms.
    pub fn vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut VarSet) {
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                match a {
                    Atom::Var(v) => {
                        out.insert(v.clone());
                    }
                    Atom::Sign(p) => p.collect_vars(out),
                }
            }
        }
    }

    pub fn has_sign(&self) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(a, _)| matches!(a, Atom::Sign(_))))
    }

    /// Multiplies by `-1` if needed so the leading coefficient is positive;
    /// reports whether it flipped.
    pub fn sign_normalized(&self) -> (Polynomial, bool) {
        match self.leading() {
            Some((_, c)) if c.is_negative() => (self.neg(), true),
            _ => (self.clone(), false),
        }
    }

    /// Gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn div_exact(&self, d: &BigInt) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), c / d)).collect() }
    }

    /// Renders as a term: monomials in descending order, negative
    /// coefficients after the first as subtraction.
    pub fn to_term(&self) -> Term {
        let mut acc: Option<Term> = None;
        for (m, c) in self.terms.iter().rev() {
            let mag = monomial_term(m, &c.abs());
            acc = Some(match acc {
                None if c.is_negative() => term::neg(mag),
                None => mag,
                Some(a) if c.is_negative() => term::sub(a, mag),
                Some(a) => term::add(a, mag),
            });
        }
        acc.unwrap_or(Term::Zero)
    }
}

impl Ord for Polynomial {
    /// Orders sign atoms like the variables inside them: `s(x) < s(y)`.
    fn cmp(&self, o: &Polynomial) -> Ordering {
        o.terms.iter().rev().cmp(self.terms.iter().rev())
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, o: &Polynomial) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// A nonnegative integer as a term.
pub fn int_term(c: &BigInt) -> Term {
    if c.is_negative() {
        return term::neg(int_term(&-c));
    }
    match c.to_u64() {
        Some(0) => Term::Zero,
        Some(1) => Term::One,
        Some(k) => Term::Numeral(k),
        None => {
            let base = BigInt::from(1u64 << 32);
            let (q, r) = c.div_rem(&base);
            let hi = term::mul(int_term(&q), Term::Numeral(1u64 << 32));
            if r.is_zero() {
                hi
            } else {
                term::add(hi, int_term(&r))
            }
        }
    }
}

fn atom_term(a: &Atom) -> Term {
    match a {
        Atom::Var(v) => Term::Var(v.clone()),
        Atom::Sign(p) => term::sign(p.to_term()),
    }
}

fn monomial_term(m: &Monomial, c: &BigInt) -> Term {
    let factors = m.0.iter().map(|(a, e)| if *e == 1 { atom_term(a) } else { term::pow(atom_term(a), *e as i64) });
    if m.0.is_empty() {
        return int_term(c);
    }
    let prod = term::product_of(factors);
    if c.is_one() {
        prod
    } else {
        term::mul(int_term(c), prod)
    }
}

/// The sign of a polynomial as a polynomial in sign atoms, simplified by
/// valid sign laws: constants, `s(-p) = -s(p)`, `s(c*p) = s(p)` for positive
/// integers `c`, products of atoms split (`s(x*y) = s(x)*s(y)`), odd powers
/// `s(x)^3 = s(x)`, and `s(s(p)) = s(p)`.
pub fn sign_poly(p: &Polynomial) -> Polynomial {
    if let Some(c) = p.as_constant() {
        return Polynomial::constant(match c.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        });
    }
    let (q, flipped) = p.sign_normalized();
    let content = q.content();
    let q = q.div_exact(&content);
    let body = if q.len() == 1 {
        let (m, _) = q.leading().unwrap();
        let mut acc = Polynomial::one();
        for (a, e) in &m.0 {
            let s = match a {
                Atom::Sign(inner) => Polynomial::atom(Atom::Sign(inner.clone())),
                Atom::Var(_) => Polynomial::atom(Atom::Sign(Polynomial::atom(a.clone()))),
            };
            let reduced = if e % 2 == 1 { 1 } else { 2 };
            acc = acc.mul(&s.pow(reduced));
        }
        acc
    } else {
        Polynomial::atom(Atom::Sign(q))
    };
    if flipped {
        body.neg()
    } else {
        body
    }
}

/// Polynomial of an inverse-free term; sign nodes become atoms when
/// `allow_sign` is set.
pub fn poly_of(t: &Term, allow_sign: bool) -> Result<Polynomial, NfError> {
    let rec = |t: &Term| poly_of(t, allow_sign);
    Ok(match t {
        Term::Zero => Polynomial::zero(),
        Term::One => Polynomial::one(),
        Term::Var(v) => Polynomial::var(v),
        Term::Neg(a) => rec(a)?.neg(),
        Term::Add(a, b) => rec(a)?.add(&rec(b)?),
        Term::Sub(a, b) => rec(a)?.sub(&rec(b)?),
        Term::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        Term::Numeral(k) => Polynomial::constant(*k),
        Term::Pow(a, k) if *k >= 0 => rec(a)?.pow(*k as u32),
        Term::Sign(a) if allow_sign => sign_poly(&rec(a)?),
        other => return Err(NfError::Disallowed(other.head().name())),
    })
}

/// Canonical polynomial of an inverse-free, sign-free, complex-free term.
/// Two terms have equal images exactly when they are equal in every
/// commutative ring.
pub fn canon_poly(t: &Term) -> Result<Polynomial, NfError> {
    poly_of(t, false)
}

// ---------------------------------------------------------------------------
// Pseudo-constant simplification

fn is_square_of(t: &Term) -> Option<&Term> {
    match t {
        Term::Pow(a, 2) => Some(a),
        Term::Mul(a, b) if a == b => Some(a),
        _ => None,
    }
}

fn pc_step(t: &Term) -> Option<Term> {
    use Term::*;
    match t {
        PseudoZero(a) if **a == Zero => Some(One),
        PseudoZero(a) if **a == One => Some(Zero),
        PseudoOne(a) if **a == One => Some(One),
        PseudoOne(a) if **a == Zero => Some(Zero),
        PseudoZero(a) => is_square_of(a).map(|b| term::zero_of(b.clone())),
        PseudoOne(a) => is_square_of(a).map(|b| term::one_of(b.clone())),
        Add(a, b) => match (&**a, &**b) {
            (PseudoZero(x), PseudoOne(y)) | (PseudoOne(x), PseudoZero(y)) if x == y => Some(One),
            _ => None,
        },
        Mul(a, b) => match (&**a, &**b) {
            (PseudoZero(x), PseudoZero(y)) if x == y => Some((**a).clone()),
            (PseudoOne(x), PseudoOne(y)) if x == y => Some((**a).clone()),
            (PseudoZero(x), PseudoOne(y)) | (PseudoOne(x), PseudoZero(y)) if x == y => Some(Zero),
            (PseudoZero(x), y) | (y, PseudoZero(x)) if **x == *y => Some(Zero),
            (PseudoOne(x), y) | (y, PseudoOne(x)) if **x == *y => Some(y.clone()),
            (PseudoZero(x), PseudoZero(y)) => split_zero_sum(x, y).or_else(|| split_zero_sum(y, x)),
            (PseudoOne(s), PseudoOne(u)) => Some(term::one_of(term::mul((**s).clone(), (**u).clone()))),
            _ => None,
        },
        _ => None,
    }
}

/// `zero(s) * zero(s + t) = zero(s) * zero(t)`, with `s` on either side of the sum.
fn split_zero_sum(s: &Term, st: &Term) -> Option<Term> {
    match st {
        Term::Add(l, r) if **l == *s => Some(term::mul(term::zero_of(s.clone()), term::zero_of((**r).clone()))),
        Term::Add(l, r) if **r == *s => Some(term::mul(term::zero_of(s.clone()), term::zero_of((**l).clone()))),
        _ => None,
    }
}

fn pc_pass(t: &Term) -> Term {
    let t = t.map_children(pc_pass);
    let mut cur = t;
    while let Some(next) = pc_step(&cur) {
        cur = next.map_children(pc_pass);
    }
    cur
}

/// Applies the pseudo-constant laws left to right until nothing changes.
/// Every rule strictly shrinks the term, so this terminates.
pub fn pseudo_simplify(t: &Term) -> Term {
    let mut cur = t.clone();
    loop {
        let next = pc_pass(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

// ---------------------------------------------------------------------------
// Standard meadow forms

/// A level-0 form `num * den^-1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: Term,
    pub den: Term,
}

/// A standard meadow form: a fraction leaf, or a guard `t` denoting
/// `zero(t) * zero_branch + one(t) * one_branch`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Smf {
    Leaf(Fraction),
    Guard { guard: Term, zero: Box<Smf>, one: Box<Smf> },
}

impl Smf {
    pub fn leaf(num: Term, den: Term) -> Smf {
        Smf::Leaf(Fraction { num, den })
    }

    pub fn guard(guard: Term, zero: Smf, one: Smf) -> Smf {
        Smf::Guard { guard, zero: Box::new(zero), one: Box::new(one) }
    }

    pub fn level(&self) -> usize {
        match self {
            Smf::Leaf(_) => 0,
            Smf::Guard { zero, one, .. } => 1 + zero.level().max(one.level()),
        }
    }

    /// The term this form stands for.
    pub fn denotation(&self) -> Term {
        match self {
            Smf::Leaf(f) => term::mul(f.num.clone(), term::inv(f.den.clone())),
            Smf::Guard { guard, zero, one } => term::add(
                term::mul(term::zero_of(guard.clone()), zero.denotation()),
                term::mul(term::one_of(guard.clone()), one.denotation()),
            ),
        }
    }

    pub fn free_vars(&self) -> VarSet {
        match self {
            Smf::Leaf(f) => {
                let mut v = f.num.free_vars();
                v.extend(&f.den.free_vars());
                v
            }
            Smf::Guard { guard, zero, one } => {
                let mut v = guard.free_vars();
                v.extend(&zero.free_vars());
                v.extend(&one.free_vars());
                v
            }
        }
    }

    /// Structural predicate: guards and fraction parts are inverse-free
    /// field terms (sign allowed when `signed`), no complex symbols.
    pub fn is_well_formed(&self, signed: bool) -> bool {
        let ok = |t: &Term| !t.has_inverse() && !t.has_complex() && (signed || !t.has_sign());
        match self {
            Smf::Leaf(f) => ok(&f.num) && ok(&f.den),
            Smf::Guard { guard, zero, one } => ok(guard) && zero.is_well_formed(signed) && one.is_well_formed(signed),
        }
    }

    pub fn has_sign(&self) -> bool {
        match self {
            Smf::Leaf(f) => f.num.has_sign() || f.den.has_sign(),
            Smf::Guard { guard, zero, one } => guard.has_sign() || zero.has_sign() || one.has_sign(),
        }
    }

    /// Pads every branch to exactly `level` with `guard(1){L | L}` wrappers,
    /// so both children of every guard have equal level.
    pub fn pad(&self, level: usize) -> Smf {
        match self {
            Smf::Leaf(_) if level == 0 => self.clone(),
            Smf::Leaf(_) => {
                let inner = self.pad(level - 1);
                Smf::guard(Term::One, inner.clone(), inner)
            }
            Smf::Guard { guard, zero, one } => {
                let k = level.saturating_sub(1);
                Smf::guard(guard.clone(), zero.pad(k), one.pad(k))
            }
        }
    }

    /// Single-line rendering `guard(t){Z | O}` / `frac(num, den)`.
    pub fn render(&self) -> String {
        match self {
            Smf::Leaf(f) => format!("frac({}, {})", f.num, f.den),
            Smf::Guard { guard, zero, one } => format!("guard({guard}){{{} | {}}}", zero.render(), one.render()),
        }
    }

    /// Indented rendering with a level comment on each guard.
    pub fn render_pretty(&self) -> String {
        let mut out = String::new();
        self.pretty_into(&mut out, 0);
        out
    }

    fn pretty_into(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        match self {
            Smf::Leaf(f) => out.push_str(&format!("{pad}frac({}, {})\n", f.num, f.den)),
            Smf::Guard { guard, zero, one } => {
                out.push_str(&format!("{pad}guard({guard}){{  # level {}\n", self.level()));
                zero.pretty_into(out, depth + 1);
                out.push_str(&format!("{pad}|\n"));
                one.pretty_into(out, depth + 1);
                out.push_str(&format!("{pad}}}\n"));
            }
        }
    }
}

impl fmt::Display for Smf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// A leaf during construction: `±(num factors) * (den factors)^-1`, each
/// factor sign-normalized and not a unit. Zero is the single factor `0`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Frac {
    neg: bool,
    num: Vec<Polynomial>,
    den: Vec<Polynomial>,
}

impl Frac {
    fn zero() -> Frac {
        Frac { neg: false, num: vec![Polynomial::zero()], den: Vec::new() }
    }

    fn new(neg: bool, num: impl IntoIterator<Item = Polynomial>, den: impl IntoIterator<Item = Polynomial>) -> Frac {
        let mut out = Frac { neg, num: Vec::new(), den: Vec::new() };
        for (src, into_num) in [(num.into_iter().collect::<Vec<_>>(), true), (den.into_iter().collect(), false)] {
            for p in src {
                if p.is_zero() {
                    return Frac::zero();
                }
                let (q, flipped) = p.sign_normalized();
                out.neg ^= flipped;
                if !q.is_unit() {
                    if into_num { out.num.push(q) } else { out.den.push(q) }
                }
            }
        }
        out.num.sort();
        out.den.sort();
        out
    }

    fn is_zero(&self) -> bool {
        self.num.first().is_some_and(Polynomial::is_zero)
    }

    fn mul(&self, o: &Frac) -> Frac {
        if self.is_zero() || o.is_zero() {
            return Frac::zero();
        }
        Frac::new(self.neg ^ o.neg, self.num.iter().chain(&o.num).cloned(), self.den.iter().chain(&o.den).cloned())
    }

    fn inv(&self) -> Frac {
        if self.is_zero() {
            return Frac::zero();
        }
        Frac { neg: self.neg, num: self.den.clone(), den: self.num.clone() }
    }

    fn negate(&self) -> Frac {
        if self.is_zero() {
            return Frac::zero();
        }
        Frac { neg: !self.neg, ..self.clone() }
    }

    fn product(fs: &[Polynomial]) -> Polynomial {
        fs.iter().fold(Polynomial::one(), |acc, f| acc.mul(f))
    }

    /// Signed numerator, expanded.
    fn num_poly(&self) -> Polynomial {
        let p = Frac::product(&self.num);
        if self.neg {
            p.neg()
        } else {
            p
        }
    }

    fn factored_term(fs: &[Polynomial]) -> Term {
        if fs.is_empty() {
            return Term::One;
        }
        term::product_of(fs.iter().map(Polynomial::to_term))
    }
}

/// Multiset difference and intersection of sorted factor lists.
fn split_common(a: &[Polynomial], b: &[Polynomial]) -> (Vec<Polynomial>, Vec<Polynomial>, Vec<Polynomial>) {
    let (mut common, mut only_a, mut only_b) = (Vec::new(), Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                common.push(x.clone());
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                only_a.push(x.clone());
                i += 1;
            }
            (Some(_), Some(y)) => {
                only_b.push(y.clone());
                j += 1;
            }
            (Some(x), None) => {
                only_a.push(x.clone());
                i += 1;
            }
            (None, Some(y)) => {
                only_b.push(y.clone());
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (common, only_a, only_b)
}

/// Working representation during construction.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Tree {
    Leaf(Frac),
    Guard(Polynomial, Box<Tree>, Box<Tree>),
}

/// Guards already decided on the current path: `(guard, is_zero)`.
type Ctx = Vec<(Polynomial, bool)>;

fn decided(ctx: &Ctx, f: &Polynomial) -> Option<bool> {
    ctx.iter().find(|(h, _)| h == f).map(|(_, z)| *z)
}

/// Splits on `g`, consulting the path context and deciding trivial guards.
fn split(g: &Polynomial, ctx: &mut Ctx, mut branch: impl FnMut(bool, &mut Ctx) -> Tree) -> Tree {
    let (g, _) = g.sign_normalized();
    if g.is_zero() {
        return branch(true, ctx);
    }
    if g.is_unit() {
        return branch(false, ctx);
    }
    if let Some(z) = decided(ctx, &g) {
        return branch(z, ctx);
    }
    ctx.push((g.clone(), true));
    let zero = branch(true, ctx);
    ctx.pop();
    ctx.push((g.clone(), false));
    let one = branch(false, ctx);
    ctx.pop();
    if zero == one {
        return zero;
    }
    Tree::Guard(g, Box::new(zero), Box::new(one))
}

/// Turns a fraction into a tree under the path context: factors known to
/// vanish make it zero, and a factor cancelled completely from numerator
/// and denominator leaves a guard (`f * f^-1 = one(f)`); a factor that
/// survives on either side needs none (`f * f * f^-1 = f`).
fn settle(f: Frac, ctx: &mut Ctx) -> Tree {
    if f.is_zero() || f.num.iter().chain(&f.den).any(|p| decided(ctx, p) == Some(true)) {
        return Tree::Leaf(Frac::zero());
    }
    let (common, num, den) = split_common(&f.num, &f.den);
    let mut guards = Vec::new();
    for c in &common {
        if num.contains(c) || den.contains(c) {
            continue;
        }
        if decided(ctx, c).is_none() && !guards.contains(c) {
            guards.push(c.clone());
        }
    }
    let reduced = Frac { neg: f.neg, num, den };
    nest_guards(&guards, reduced, ctx)
}

fn nest_guards(guards: &[Polynomial], leaf: Frac, ctx: &mut Ctx) -> Tree {
    match guards.split_first() {
        None => Tree::Leaf(leaf),
        Some((g, rest)) => split(g, ctx, |is_zero, ctx| if is_zero { Tree::Leaf(Frac::zero()) } else { nest_guards(rest, leaf.clone(), ctx) }),
    }
}

/// Lifts a leaf-level binary operation through both guard trees.
fn combine(a: &Tree, b: &Tree, ctx: &mut Ctx, op: &dyn Fn(&Frac, &Frac, &mut Ctx) -> Tree) -> Tree {
    match (a, b) {
        (Tree::Guard(g, z, o), _) => split(g, ctx, |is_zero, ctx| combine(if is_zero { z } else { o }, b, ctx, op)),
        (_, Tree::Guard(g, z, o)) => split(g, ctx, |is_zero, ctx| combine(a, if is_zero { z } else { o }, ctx, op)),
        (Tree::Leaf(x), Tree::Leaf(y)) => op(x, y, ctx),
    }
}

fn map_leaves(t: &Tree, ctx: &mut Ctx, f: &dyn Fn(&Frac, &mut Ctx) -> Tree) -> Tree {
    match t {
        Tree::Leaf(x) => f(x, ctx),
        Tree::Guard(g, z, o) => split(g, ctx, |is_zero, ctx| map_leaves(if is_zero { z } else { o }, ctx, f)),
    }
}

fn vanishes(f: &Frac, ctx: &Ctx) -> bool {
    f.is_zero() || f.num.iter().chain(&f.den).any(|p| decided(ctx, p) == Some(true))
}

/// `a/b + c/d`. A denominator factor not shared by both sides is split on:
/// if it vanishes that summand is zero. Once all are nonzero the sum is
/// taken over the common denominator.
fn add_leaves(x: &Frac, y: &Frac, ctx: &mut Ctx) -> Tree {
    if vanishes(x, ctx) {
        return settle(y.clone(), ctx);
    }
    if vanishes(y, ctx) {
        return settle(x.clone(), ctx);
    }
    let (common, bx, dy) = split_common(&x.den, &y.den);
    if let Some(f) = bx.iter().chain(&dy).find(|f| decided(ctx, f).is_none()).cloned() {
        return split(&f, ctx, |_, ctx| add_leaves(x, y, ctx));
    }
    let (shared, ax, cy) = split_common(&x.num, &y.num);
    let sx = Frac::product(&ax).mul(&Frac::product(&dy));
    let sy = Frac::product(&cy).mul(&Frac::product(&bx));
    let sx = if x.neg { sx.neg() } else { sx };
    let sy = if y.neg { sy.neg() } else { sy };
    let sum = sx.add(&sy);
    let den = common.into_iter().chain(bx).chain(dy);
    settle(Frac::new(false, shared.into_iter().chain([sum]), den), ctx)
}

fn build(t: &Term, signed: bool, ctx: &mut Ctx) -> Result<Tree, NfError> {
    let leaf = |p: Polynomial| Tree::Leaf(Frac::new(false, [p], []));
    Ok(match t {
        Term::Zero => leaf(Polynomial::zero()),
        Term::One => leaf(Polynomial::one()),
        Term::Var(v) => leaf(Polynomial::var(v)),
        Term::Numeral(k) => leaf(Polynomial::constant(*k)),
        Term::Neg(a) => {
            let a = build(a, signed, ctx)?;
            map_leaves(&a, ctx, &|x, _| Tree::Leaf(x.negate()))
        }
        Term::Add(a, b) => {
            let (a, b) = (build(a, signed, ctx)?, build(b, signed, ctx)?);
            combine(&a, &b, ctx, &add_leaves)
        }
        Term::Mul(a, b) => {
            let (a, b) = (build(a, signed, ctx)?, build(b, signed, ctx)?);
            combine(&a, &b, ctx, &|x, y, ctx| settle(x.mul(y), ctx))
        }
        Term::Inv(a) => {
            let a = build(a, signed, ctx)?;
            map_leaves(&a, ctx, &|x, _| Tree::Leaf(x.inv()))
        }
        Term::Sign(a) if signed => {
            // s(±n * d^-1) = ±s(n1)...s(nk) * s(d1)...s(dm)
            let a = build(a, signed, ctx)?;
            map_leaves(&a, ctx, &|x, ctx| {
                if x.is_zero() {
                    return Tree::Leaf(Frac::zero());
                }
                let signs: Vec<Polynomial> = x.num.iter().chain(&x.den).map(sign_poly).collect();
                settle(Frac::new(x.neg, signs, []), ctx)
            })
        }
        Term::Sign(_) | Term::I | Term::Conj(_) | Term::Re(_) | Term::Im(_) => {
            return Err(NfError::Disallowed(t.head().name()))
        }
        derived => build(&derived.expand_derived(), signed, ctx)?,
    })
}

/// Renders a tree; canonical mode expands numerator and denominator.
fn tree_to_smf(t: &Tree, expanded: bool) -> Smf {
    match t {
        Tree::Leaf(f) if f.is_zero() => Smf::leaf(Term::Zero, Term::One),
        Tree::Leaf(f) if expanded => Smf::leaf(f.num_poly().to_term(), Frac::product(&f.den).to_term()),
        Tree::Leaf(f) => {
            let num = Frac::factored_term(&f.num);
            Smf::leaf(if f.neg { term::neg(num) } else { num }, Frac::factored_term(&f.den))
        }
        Tree::Guard(g, z, o) => Smf::guard(g.to_term(), tree_to_smf(z, expanded), tree_to_smf(o, expanded)),
    }
}

/// Wraps `smf` in `guard(v){T | T}` for each variable of `vars` it lost.
fn restore_vars(smf: Smf, vars: &VarSet) -> Smf {
    let have = smf.free_vars();
    vars.to_vec().into_iter().rev().filter(|v| !have.contains(v)).fold(smf, |acc, v| Smf::guard(Term::Var(v), acc.clone(), acc))
}

fn to_form(t: &Term, signed: bool) -> Result<Smf, NfError> {
    let tree = build(t, signed, &mut Vec::new())?;
    Ok(restore_vars(tree_to_smf(&tree, false), &t.free_vars()))
}

/// Standard meadow form of a plain meadow term, with the same variables.
pub fn to_smf(t: &Term) -> Result<Smf, NfError> {
    to_form(t, false)
}

/// Signed standard meadow form: signs are pushed through guards and land
/// on leaves as products of signs of polynomials.
pub fn to_ssmf(t: &Term) -> Result<Smf, NfError> {
    to_form(t, true)
}

/// Reduces a guard polynomial: sign-normalized, and a single monomial with
/// unit coefficient replaced by its radical (`zero(x^2*y) = zero(x*y)`).
fn reduce_guard(g: &Polynomial) -> Polynomial {
    let (g, _) = g.sign_normalized();
    if g.len() == 1 {
        let (m, c) = g.leading().unwrap();
        if c.is_one() {
            let rad = Monomial(m.0.iter().map(|(a, _)| (a.clone(), 1)).collect());
            let mut p = Polynomial::zero();
            p.push(rad, BigInt::one());
            return p;
        }
    }
    g
}

fn canon_tree(smf: &Smf, ctx: &mut Ctx) -> Result<Tree, NfError> {
    Ok(match smf {
        Smf::Leaf(f) => settle(Frac::new(false, [poly_of(&f.num, true)?], [poly_of(&f.den, true)?]), ctx),
        Smf::Guard { guard, zero, one } => {
            let g = reduce_guard(&poly_of(guard, true)?);
            let mut err = None;
            let t = split(&g, ctx, |is_zero, ctx| {
                let branch = if is_zero { zero } else { one };
                canon_tree(branch, ctx).unwrap_or_else(|e| {
                    err = Some(e);
                    Tree::Leaf(Frac::zero())
                })
            });
            if let Some(e) = err {
                return Err(e);
            }
            t
        }
    })
}

/// Canonical representative: polynomial parts expanded into canonical
/// form, guards sign-normalized and reduced, repeated guards on a path
/// resolved, equal branches collapsed, and lost variables restored.
pub fn canon_smf(f: &Smf) -> Result<Smf, NfError> {
    let tree = canon_tree(f, &mut Vec::new())?;
    Ok(restore_vars(tree_to_smf(&tree, true), &f.free_vars()))
}
