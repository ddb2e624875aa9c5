//! Exact evaluation in the concrete meadows: the zero-totalized rationals
//! (with sign), the Gaussian rationals (with `i` and conjugation) and the
//! residue rings `Z/nZ` for squarefree `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fo_logic::Formula;
use crate::term::{Signature, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),
    #[error("variable `{var}` has a value from the wrong model ({found})")]
    WrongValueKind { var: String, found: String },
    #[error("symbol `{symbol}` cannot be evaluated in {model}")]
    OutOfSignature { symbol: String, model: String },
    #[error("modulus {0} is not squarefree, so Z/{0}Z carries no meadow inverse")]
    NotSquarefree(u64),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("cannot parse value `{0}`")]
    BadValue(String),
    #[error("cannot parse model `{0}` (expected q0, c0 or zmod:<n>)")]
    BadModel(String),
    #[error("quantifier over `{0}` is not guarded by a defining subformula")]
    UnguardedQuantifier(String),
    #[error("order atom in the unordered model {0}")]
    OrderInUnorderedModel(String),
}

// ---------------------------------------------------------------------------
// Carriers

/// A zero-totalized rational number.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }
    pub fn one() -> Rat {
        Rat(BigRational::one())
    }
    pub fn from_int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }
    pub fn new(num: i64, den: i64) -> Rat {
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
    pub fn add(&self, o: &Rat) -> Rat {
        Rat(&self.0 + &o.0)
    }
    pub fn mul(&self, o: &Rat) -> Rat {
        Rat(&self.0 * &o.0)
    }
    pub fn neg(&self) -> Rat {
        Rat(-&self.0)
    }
    /// Total inverse with `0^-1 = 0`.
    pub fn inv(&self) -> Rat {
        if self.is_zero() {
            Rat::zero()
        } else {
            Rat(self.0.recip())
        }
    }
    pub fn signum(&self) -> Rat {
        Rat(self.0.signum())
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rat {
    type Err = EvalError;
    fn from_str(s: &str) -> Result<Rat, EvalError> {
        let s = s.trim();
        let bad = || EvalError::BadValue(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat(BigRational::new(n, d)))
    }
}

/// A Gaussian rational `re + im*i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn new(re: Rat, im: Rat) -> GaussRat {
        GaussRat { re, im }
    }
    pub fn real(re: Rat) -> GaussRat {
        GaussRat { re, im: Rat::zero() }
    }
    pub fn zero() -> GaussRat {
        GaussRat::real(Rat::zero())
    }
    pub fn one() -> GaussRat {
        GaussRat::real(Rat::one())
    }
    pub fn i() -> GaussRat {
        GaussRat::new(Rat::zero(), Rat::one())
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn add(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(self.re.add(&o.re), self.im.add(&o.im))
    }
    pub fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat::new(
            self.re.mul(&o.re).add(&self.im.mul(&o.im).neg()),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }
    pub fn neg(&self) -> GaussRat {
        GaussRat::new(self.re.neg(), self.im.neg())
    }
    pub fn conj(&self) -> GaussRat {
        GaussRat::new(self.re.clone(), self.im.neg())
    }
    pub fn norm(&self) -> Rat {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }
    /// `conj(z) / |z|^2`; the norm vanishes only at zero, which maps to zero.
    pub fn inv(&self) -> GaussRat {
        let n = self.norm();
        if n.is_zero() {
            return GaussRat::zero();
        }
        let k = n.inv();
        GaussRat::new(self.re.mul(&k), self.im.neg().mul(&k))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im = if self.im == Rat::one() {
            "i".to_string()
        } else if self.im == Rat::from_int(-1) {
            "-i".to_string()
        } else {
            format!("{}i", self.im)
        };
        if self.re.is_zero() {
            write!(f, "{im}")
        } else if im.starts_with('-') {
            write!(f, "{}{}", self.re, im)
        } else {
            write!(f, "{}+{}", self.re, im)
        }
    }
}

impl FromStr for GaussRat {
    type Err = EvalError;
    fn from_str(s: &str) -> Result<GaussRat, EvalError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || EvalError::BadValue(s.clone());
        let Some(body) = s.strip_suffix('i') else {
            return Ok(GaussRat::real(s.parse()?));
        };
        // split "a+b" / "a-b" at the last sign that is not leading
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other.strip_prefix('+').unwrap_or(other),
        };
        let re: Rat = re.parse().map_err(|_| bad())?;
        let im: Rat = im.parse().map_err(|_| bad())?;
        Ok(GaussRat::new(re, im))
    }
}

/// A residue in `Z/nZ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZmodVal {
    pub modulus: u64,
    pub residue: u64,
}

impl ZmodVal {
    pub fn new(modulus: u64, value: i128) -> ZmodVal {
        let m = modulus as i128;
        ZmodVal { modulus, residue: value.rem_euclid(m) as u64 }
    }
    pub fn add(self, o: ZmodVal) -> ZmodVal {
        ZmodVal::new(self.modulus, self.residue as i128 + o.residue as i128)
    }
    pub fn mul(self, o: ZmodVal) -> ZmodVal {
        ZmodVal::new(self.modulus, self.residue as i128 * o.residue as i128)
    }
    pub fn neg(self) -> ZmodVal {
        ZmodVal::new(self.modulus, -(self.residue as i128))
    }
}

impl fmt::Display for ZmodVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

pub fn is_squarefree(n: u64) -> bool {
    prime_factors(n).iter().all(|&(_, e)| e == 1)
}

/// Trial-division factorization as `(prime, exponent)` pairs.
pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mod_inverse_prime(x: u64, p: u64) -> u64 {
    let g = (x as i128).extended_gcd(&(p as i128));
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(p as i128) as u64
}

/// The meadow inverse in `Z/nZ`, computed per prime factor and recombined
/// with the Chinese remainder theorem: zero components stay zero, nonzero
/// components are inverted.
pub fn zmod_inverse(n: u64, x: ZmodVal) -> Result<ZmodVal, EvalError> {
    if n == 0 {
        return Err(EvalError::ZeroModulus);
    }
    if !is_squarefree(n) {
        return Err(EvalError::NotSquarefree(n));
    }
    let mut acc: i128 = 0;
    for (p, _) in prime_factors(n) {
        let r = x.residue % p;
        let inv_r = if r == 0 { 0 } else { mod_inverse_prime(r, p) };
        let m = (n / p) as i128;
        let m_inv = mod_inverse_prime((m % p as i128) as u64, p) as i128;
        acc = (acc + inv_r as i128 * m % n as i128 * m_inv) % n as i128;
    }
    Ok(ZmodVal::new(n, acc))
}

// ---------------------------------------------------------------------------
// Models and assignments

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MeadowValue {
    Rat(Rat),
    Gauss(GaussRat),
    Zmod(ZmodVal),
}

impl fmt::Display for MeadowValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeadowValue::Rat(r) => write!(f, "{r}"),
            MeadowValue::Gauss(g) => write!(f, "{g}"),
            MeadowValue::Zmod(z) => write!(f, "{z}"),
        }
    }
}

pub type Assignment = BTreeMap<String, MeadowValue>;

/// Renders an assignment as `x=1,y=3/4`.
pub fn format_assignment(a: &Assignment) -> String {
    a.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// Rationals with sign.
    Q0,
    /// Gaussian rationals; `complex_sign` enables `s(z) = s(re z)`.
    C0 { complex_sign: bool },
    Zmod(u64),
}

impl Model {
    pub fn c0() -> Model {
        Model::C0 { complex_sign: false }
    }

    pub fn signature(&self) -> Signature {
        match self {
            Model::Q0 => Signature::SignedMeadow,
            Model::C0 { complex_sign: false } => Signature::ComplexMeadow,
            Model::C0 { complex_sign: true } => Signature::ComplexSignedMeadow,
            Model::Zmod(_) => Signature::Meadow,
        }
    }

    pub fn is_ordered(&self) -> bool {
        matches!(self, Model::Q0)
    }

    /// Parses a literal for this model.
    pub fn parse_value(&self, s: &str) -> Result<MeadowValue, EvalError> {
        Ok(match self {
            Model::Q0 => MeadowValue::Rat(s.parse()?),
            Model::C0 { .. } => MeadowValue::Gauss(s.parse()?),
            Model::Zmod(n) => {
                let v: i128 = s.trim().parse().map_err(|_| EvalError::BadValue(s.to_string()))?;
                MeadowValue::Zmod(ZmodVal::new(*n, v))
            }
        })
    }

    /// Parses `x=3/4,y=1+2i` style assignment lists.
    pub fn parse_assignment(&self, items: &[String]) -> Result<Assignment, EvalError> {
        let mut out = Assignment::new();
        for item in items.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| EvalError::BadValue(item.to_string()))?;
            out.insert(k.trim().to_string(), self.parse_value(v)?);
        }
        Ok(out)
    }

    /// Evaluates a term to a model value.
    pub fn eval(&self, t: &Term, a: &Assignment) -> Result<MeadowValue, EvalError> {
        Ok(match self {
            Model::Q0 => MeadowValue::Rat(eval_q0(t, a)?),
            Model::C0 { complex_sign } => MeadowValue::Gauss(eval_c0_with(t, a, *complex_sign)?),
            Model::Zmod(n) => MeadowValue::Zmod(eval_zmod(*n, t, a)?),
        })
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Q0 => write!(f, "q0"),
            Model::C0 { .. } => write!(f, "c0"),
            Model::Zmod(n) => write!(f, "zmod:{n}"),
        }
    }
}

impl FromStr for Model {
    type Err = EvalError;
    fn from_str(s: &str) -> Result<Model, EvalError> {
        match s.trim() {
            "q0" => Ok(Model::Q0),
            "c0" => Ok(Model::c0()),
            other => {
                let n: u64 = other
                    .strip_prefix("zmod:")
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| EvalError::BadModel(s.to_string()))?;
                if n == 0 {
                    return Err(EvalError::ZeroModulus);
                }
                if !is_squarefree(n) {
                    return Err(EvalError::NotSquarefree(n));
                }
                Ok(Model::Zmod(n))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation

/// Operations an evaluation carrier provides.
trait Carrier: Clone {
    fn model_name(&self) -> String;
    fn zero(&self) -> Self;
    fn one(&self) -> Self;
    fn add(&self, a: &Self, b: &Self) -> Self;
    fn mul(&self, a: &Self, b: &Self) -> Self;
    fn neg(&self, a: &Self) -> Self;
    fn inv(&self, a: &Self) -> Self;
    fn sign(&self, _a: &Self) -> Option<Self> {
        None
    }
    fn i(&self) -> Option<Self> {
        None
    }
    fn conj(&self, _a: &Self) -> Option<Self> {
        None
    }
    fn lookup(&self, v: &MeadowValue, name: &str) -> Result<Self, EvalError>;
}

impl Carrier for Rat {
    fn model_name(&self) -> String {
        "q0".into()
    }
    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a.add(b)
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a.mul(b)
    }
    fn neg(&self, a: &Rat) -> Rat {
        a.neg()
    }
    fn inv(&self, a: &Rat) -> Rat {
        a.inv()
    }
    fn sign(&self, a: &Rat) -> Option<Rat> {
        Some(a.signum())
    }
    fn lookup(&self, v: &MeadowValue, name: &str) -> Result<Rat, EvalError> {
        match v {
            MeadowValue::Rat(r) => Ok(r.clone()),
            other => Err(EvalError::WrongValueKind { var: name.into(), found: other.to_string() }),
        }
    }
}

/// Gaussian value tagged with whether the complex sign is enabled.
#[derive(Clone)]
struct CVal(GaussRat, bool);

impl Carrier for CVal {
    fn model_name(&self) -> String {
        "c0".into()
    }
    fn zero(&self) -> CVal {
        CVal(GaussRat::zero(), self.1)
    }
    fn one(&self) -> CVal {
        CVal(GaussRat::one(), self.1)
    }
    fn add(&self, a: &CVal, b: &CVal) -> CVal {
        CVal(a.0.add(&b.0), self.1)
    }
    fn mul(&self, a: &CVal, b: &CVal) -> CVal {
        CVal(a.0.mul(&b.0), self.1)
    }
    fn neg(&self, a: &CVal) -> CVal {
        CVal(a.0.neg(), self.1)
    }
    fn inv(&self, a: &CVal) -> CVal {
        CVal(a.0.inv(), self.1)
    }
    fn sign(&self, a: &CVal) -> Option<CVal> {
        self.1.then(|| CVal(GaussRat::real(a.0.re.signum()), self.1))
    }
    fn i(&self) -> Option<CVal> {
        Some(CVal(GaussRat::i(), self.1))
    }
    fn conj(&self, a: &CVal) -> Option<CVal> {
        Some(CVal(a.0.conj(), self.1))
    }
    fn lookup(&self, v: &MeadowValue, name: &str) -> Result<CVal, EvalError> {
        match v {
            MeadowValue::Gauss(g) => Ok(CVal(g.clone(), self.1)),
            MeadowValue::Rat(r) => Ok(CVal(GaussRat::real(r.clone()), self.1)),
            other => Err(EvalError::WrongValueKind { var: name.into(), found: other.to_string() }),
        }
    }
}

impl Carrier for ZmodVal {
    fn model_name(&self) -> String {
        format!("zmod:{}", self.modulus)
    }
    fn zero(&self) -> ZmodVal {
        ZmodVal::new(self.modulus, 0)
    }
    fn one(&self) -> ZmodVal {
        ZmodVal::new(self.modulus, 1)
    }
    fn add(&self, a: &ZmodVal, b: &ZmodVal) -> ZmodVal {
        ZmodVal::add(*a, *b)
    }
    fn mul(&self, a: &ZmodVal, b: &ZmodVal) -> ZmodVal {
        ZmodVal::mul(*a, *b)
    }
    fn neg(&self, a: &ZmodVal) -> ZmodVal {
        ZmodVal::neg(*a)
    }
    fn inv(&self, a: &ZmodVal) -> ZmodVal {
        zmod_inverse(self.modulus, *a).expect("modulus checked before evaluation")
    }
    fn lookup(&self, v: &MeadowValue, name: &str) -> Result<ZmodVal, EvalError> {
        match v {
            MeadowValue::Zmod(z) if z.modulus == self.modulus => Ok(*z),
            other => Err(EvalError::WrongValueKind { var: name.into(), found: other.to_string() }),
        }
    }
}

fn eval_generic<C: Carrier>(c: &C, t: &Term, a: &Assignment) -> Result<C, EvalError> {
    let ev = |t: &Term| eval_generic(c, t, a);
    let unsupported = |symbol: &str| EvalError::OutOfSignature { symbol: symbol.into(), model: c.model_name() };
    Ok(match t {
        Term::Zero => c.zero(),
        Term::One => c.one(),
        Term::I => c.i().ok_or_else(|| unsupported("i"))?,
        Term::Var(v) => {
            let val = a.get(v).ok_or_else(|| EvalError::MissingAssignment(v.clone()))?;
            c.lookup(val, v)?
        }
        Term::Neg(x) => c.neg(&ev(x)?),
        Term::Add(x, y) => c.add(&ev(x)?, &ev(y)?),
        Term::Mul(x, y) => c.mul(&ev(x)?, &ev(y)?),
        Term::Inv(x) => c.inv(&ev(x)?),
        Term::Sign(x) => {
            let v = ev(x)?;
            c.sign(&v).ok_or_else(|| unsupported("s"))?
        }
        Term::Conj(x) => {
            let v = ev(x)?;
            c.conj(&v).ok_or_else(|| unsupported("conj"))?
        }
        Term::Sub(x, y) => c.add(&ev(x)?, &c.neg(&ev(y)?)),
        Term::PseudoOne(x) => {
            let v = ev(x)?;
            c.mul(&v, &c.inv(&v))
        }
        Term::PseudoZero(x) => {
            let v = ev(x)?;
            c.add(&c.one(), &c.neg(&c.mul(&v, &c.inv(&v))))
        }
        Term::Re(x) | Term::Im(x) => {
            let v = ev(x)?;
            let cv = c.conj(&v).ok_or_else(|| unsupported(if matches!(t, Term::Re(_)) { "re" } else { "im" }))?;
            let two = c.add(&c.one(), &c.one());
            let half = c.inv(&two);
            if matches!(t, Term::Re(_)) {
                c.mul(&half, &c.add(&v, &cv))
            } else {
                let i = c.i().ok_or_else(|| unsupported("im"))?;
                c.mul(&c.neg(&c.mul(&i, &half)), &c.add(&v, &c.neg(&cv)))
            }
        }
        Term::Numeral(n) => {
            // binary expansion keeps large numerals cheap
            let mut acc = c.zero();
            let mut base = c.one();
            let mut k = *n;
            while k > 0 {
                if k & 1 == 1 {
                    acc = c.add(&acc, &base);
                }
                base = c.add(&base, &base);
                k >>= 1;
            }
            acc
        }
        Term::Pow(x, k) => {
            let mut base = ev(x)?;
            if *k < 0 {
                base = c.inv(&base);
            }
            let mut acc = c.one();
            for _ in 0..k.unsigned_abs() {
                acc = c.mul(&acc, &base);
            }
            acc
        }
    })
}

/// Evaluates in the signed meadow of rationals.
pub fn eval_q0(t: &Term, a: &Assignment) -> Result<Rat, EvalError> {
    eval_generic(&Rat::zero(), t, a)
}

/// Evaluates in the meadow of Gaussian rationals without a sign function.
pub fn eval_c0(t: &Term, a: &Assignment) -> Result<GaussRat, EvalError> {
    eval_c0_with(t, a, false)
}

/// Evaluates in the Gaussian rationals; with `complex_sign`, `s(z)` is the
/// sign of the real part of `z`.
pub fn eval_c0_with(t: &Term, a: &Assignment, complex_sign: bool) -> Result<GaussRat, EvalError> {
    eval_generic(&CVal(GaussRat::zero(), complex_sign), t, a).map(|v| v.0)
}

/// Evaluates in `Z/nZ`; `n` must be squarefree.
pub fn eval_zmod(n: u64, t: &Term, a: &Assignment) -> Result<ZmodVal, EvalError> {
    if n == 0 {
        return Err(EvalError::ZeroModulus);
    }
    if !is_squarefree(n) {
        return Err(EvalError::NotSquarefree(n));
    }
    eval_generic(&ZmodVal::new(n, 0), t, a)
}

// ---------------------------------------------------------------------------
// Formulas

/// Evaluates a formula. Quantifiers must be guarded: a block
/// `forall v1. ... forall vk. A -> B` (or `exists v. A & B`) whose premise
/// `A` pins every `vi` to one value, as the sign-elimination translation
/// produces. The pinned values are computed and the body checked there.
pub fn eval_formula(f: &Formula, a: &Assignment, model: &Model) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::Eq(l, r) => model.eval(l, a)? == model.eval(r, a)?,
        Formula::Less(l, r) => {
            if !model.is_ordered() {
                return Err(EvalError::OrderInUnorderedModel(model.to_string()));
            }
            match (model.eval(l, a)?, model.eval(r, a)?) {
                (MeadowValue::Rat(x), MeadowValue::Rat(y)) => x < y,
                _ => return Err(EvalError::OrderInUnorderedModel(model.to_string())),
            }
        }
        Formula::Not(x) => !eval_formula(x, a, model)?,
        Formula::And(x, y) => eval_formula(x, a, model)? && eval_formula(y, a, model)?,
        Formula::Or(x, y) => eval_formula(x, a, model)? || eval_formula(y, a, model)?,
        Formula::Implies(x, y) => !eval_formula(x, a, model)? || eval_formula(y, a, model)?,
        Formula::ForAll(..) => {
            let (vars, body) = quantifier_block(f, true);
            let Formula::Implies(premise, conclusion) = body else {
                return Err(EvalError::UnguardedQuantifier(vars[0].clone()));
            };
            let env = pin_block(&vars, premise, a, model)?;
            !eval_formula(premise, &env, model)? || eval_formula(conclusion, &env, model)?
        }
        Formula::Exists(..) => {
            let (vars, body) = quantifier_block(f, false);
            let Formula::And(premise, conclusion) = body else {
                return Err(EvalError::UnguardedQuantifier(vars[0].clone()));
            };
            let env = pin_block(&vars, premise, a, model)?;
            eval_formula(premise, &env, model)? && eval_formula(conclusion, &env, model)?
        }
    })
}

/// Splits off a run of same-kind quantifiers.
fn quantifier_block(f: &Formula, universal: bool) -> (Vec<String>, &Formula) {
    let mut vars = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::ForAll(v, b) if universal => {
                vars.push(v.clone());
                cur = b;
            }
            Formula::Exists(v, b) if !universal => {
                vars.push(v.clone());
                cur = b;
            }
            _ => return (vars, cur),
        }
    }
}

fn pin_block(vars: &[String], premise: &Formula, a: &Assignment, model: &Model) -> Result<Assignment, EvalError> {
    let mut env = a.clone();
    for v in vars {
        let val = pin(premise, v, a, model)?.ok_or_else(|| EvalError::UnguardedQuantifier(v.clone()))?;
        env.insert(v.clone(), val);
    }
    Ok(env)
}

fn is_var(t: &Term, v: &str) -> bool {
    matches!(t, Term::Var(w) if w == v)
}

/// The value `f` forces on `v`, recognizing the defining shapes: `v = t`,
/// a guarded block concluding `v = t`, and the two-case sign definition.
fn pin(f: &Formula, v: &str, a: &Assignment, model: &Model) -> Result<Option<MeadowValue>, EvalError> {
    match f {
        Formula::Eq(l, r) if is_var(l, v) && !r.contains_var(v) => model.eval(r, a).map(Some),
        Formula::Eq(l, r) if is_var(r, v) && !l.contains_var(v) => model.eval(l, a).map(Some),
        Formula::ForAll(..) => {
            let (vars, body) = quantifier_block(f, true);
            match body {
                Formula::Implies(premise, conclusion) => match &**conclusion {
                    Formula::Eq(l, r) if is_var(l, v) && !vars.iter().any(|b| b == v) => {
                        let env = pin_block(&vars, premise, a, model)?;
                        model.eval(r, &env).map(Some)
                    }
                    _ => Ok(None),
                },
                _ => Ok(None),
            }
        }
        Formula::And(x, y) => {
            if let (Formula::Implies(c0, _), Formula::Implies(c1, rest)) = (&**x, &**y) {
                let zero_test = matches!(&**c0, Formula::Eq(l, Term::Zero) if is_var(l, v));
                let nonzero_test = matches!(&**c1, Formula::Not(e) if matches!(&**e, Formula::Eq(l, Term::Zero) if is_var(l, v)));
                if zero_test && nonzero_test {
                    if let Formula::ForAll(z, body) = &**rest {
                        if let Formula::Implies(premise, _) = &**body {
                            let Some(inner) = pin(premise, z, a, model)? else { return Ok(None) };
                            let mut env = a.clone();
                            env.insert(z.clone(), inner);
                            return model.eval(&crate::term::sign(Term::Var(z.clone())), &env).map(Some);
                        }
                    }
                }
            }
            match pin(x, v, a, model)? {
                Some(val) => Ok(Some(val)),
                None => pin(y, v, a, model),
            }
        }
        _ => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// Sampling

/// Bounds for random value generation.
#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    /// Numerators and denominators are drawn with magnitude at most this.
    pub magnitude: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { magnitude: 1_000_000 }
    }
}

/// Derives an independent generator for `(seed, index)`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

/// Random rational; about one draw in eight is a small value in `{-2..2}`.
pub fn random_rat(rng: &mut impl Rng, cfg: &SampleConfig) -> Rat {
    let m = cfg.magnitude.max(1) as i64;
    if rng.gen_ratio(1, 8) {
        return Rat::from_int(rng.gen_range(-2..=2));
    }
    let num = rng.gen_range(-m..=m);
    let den = rng.gen_range(1..=m);
    Rat::new(num, den)
}

pub fn random_gauss(rng: &mut impl Rng, cfg: &SampleConfig) -> GaussRat {
    let re = random_rat(rng, cfg);
    let im = if rng.gen_ratio(1, 8) { Rat::zero() } else { random_rat(rng, cfg) };
    GaussRat::new(re, im)
}

pub fn random_value(model: &Model, rng: &mut impl Rng, cfg: &SampleConfig) -> MeadowValue {
    match model {
        Model::Q0 => MeadowValue::Rat(random_rat(rng, cfg)),
        Model::C0 { .. } => MeadowValue::Gauss(random_gauss(rng, cfg)),
        Model::Zmod(n) => MeadowValue::Zmod(ZmodVal::new(*n, rng.gen_range(0..*n) as i128)),
    }
}

/// A seeded random assignment for `vars`; deterministic per `(seed, index)`.
pub fn random_assignment(model: &Model, vars: &[String], seed: u64, index: u64, cfg: &SampleConfig) -> Assignment {
    let mut rng = sample_rng(seed, index);
    vars.iter().map(|v| (v.clone(), random_value(model, &mut rng, cfg))).collect()
}

/// Small values probed before random sampling: `0, 1, -1` (plus `i, -i` in
/// the complex model, `n-1` for residues).
pub fn structured_values(model: &Model) -> Vec<MeadowValue> {
    match model {
        Model::Q0 => [0, 1, -1].iter().map(|&k| MeadowValue::Rat(Rat::from_int(k))).collect(),
        Model::C0 { .. } => vec![
            MeadowValue::Gauss(GaussRat::zero()),
            MeadowValue::Gauss(GaussRat::one()),
            MeadowValue::Gauss(GaussRat::one().neg()),
            MeadowValue::Gauss(GaussRat::i()),
            MeadowValue::Gauss(GaussRat::i().neg()),
        ],
        Model::Zmod(n) => {
            let mut v: Vec<u64> = vec![0, 1, n.saturating_sub(1)];
            v.dedup();
            v.retain(|&r| r < *n);
            v.into_iter().map(|r| MeadowValue::Zmod(ZmodVal::new(*n, r as i128))).collect()
        }
    }
}

/// The structured assignments: every combination of [`structured_values`]
/// over the first three variables (remaining variables fixed to the first
/// value), first variable most significant.
pub fn structured_assignments(model: &Model, vars: &[String]) -> Vec<Assignment> {
    let values = structured_values(model);
    let k = vars.len().min(3);
    let total = values.len().pow(k as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut digits = vec![0; k];
        for d in digits.iter_mut().rev() {
            *d = code % values.len();
            code /= values.len();
        }
        let mut a = Assignment::new();
        for (j, v) in vars.iter().enumerate() {
            let idx = if j < k { digits[j] } else { 0 };
            a.insert(v.clone(), values[idx].clone());
        }
        out.push(a);
    }
    out
}

/// Converts a small rational back to an `i64`, if integral.
pub fn rat_to_i64(r: &Rat) -> Option<i64> {
    if r.denom().is_one() {
        r.numer().to_i64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse, Signature};

    fn t(s: &str) -> Term {
        parse(s, Signature::ComplexSignedMeadow).unwrap()
    }

    fn q(pairs: &[(&str, &str)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), MeadowValue::Rat(v.parse().unwrap()))).collect()
    }

    fn c(pairs: &[(&str, &str)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), MeadowValue::Gauss(v.parse().unwrap()))).collect()
    }

    #[test]
    fn q0_examples() {
        assert_eq!(eval_q0(&t("0^-1"), &q(&[])).unwrap(), Rat::zero());
        assert_eq!(eval_q0(&t("s(n(2) - n(5))"), &q(&[])).unwrap(), Rat::from_int(-1));
        assert_eq!(eval_q0(&t("one(x)"), &q(&[("x", "3/4")])).unwrap(), Rat::one());
        assert_eq!(eval_q0(&t("one(x)"), &q(&[("x", "0")])).unwrap(), Rat::zero());
        assert!(matches!(eval_q0(&t("x"), &q(&[])), Err(EvalError::MissingAssignment(_))));
        assert!(matches!(eval_q0(&t("i"), &q(&[])), Err(EvalError::OutOfSignature { .. })));
    }

    #[test]
    fn c0_examples() {
        assert_eq!(eval_c0(&t("i * i"), &c(&[])).unwrap(), GaussRat::one().neg());
        assert_eq!(eval_c0(&t("conj(i)"), &c(&[])).unwrap(), GaussRat::i().neg());
        assert_eq!(eval_c0(&t("x * x^-1"), &c(&[("x", "1+i")])).unwrap(), GaussRat::one());
        assert!(matches!(eval_c0(&t("s(x)"), &c(&[("x", "1")])), Err(EvalError::OutOfSignature { .. })));
        assert_eq!(eval_c0_with(&t("s(x)"), &c(&[("x", "-2+5i")]), true).unwrap(), GaussRat::one().neg());
        assert_eq!(eval_c0(&t("re(x)"), &c(&[("x", "3/2-7i")])).unwrap(), GaussRat::real("3/2".parse().unwrap()));
        assert_eq!(eval_c0(&t("im(x)"), &c(&[("x", "3/2-7i")])).unwrap(), GaussRat::real(Rat::from_int(-7)));
    }

    /// Brute-force oracle: the meadow inverse is the unique `y` with
    /// `x*x*y = x` and `y*y*x = y`.
    fn brute_inverse(n: u64, x: u64) -> Vec<u64> {
        (0..n).filter(|&y| (x * x * y) % n == x % n && (y * y * x) % n == y).collect()
    }

    #[test]
    fn zmod_inverse_examples() {
        let z = |n, v| ZmodVal::new(n, v);
        assert_eq!(zmod_inverse(10, z(10, 2)).unwrap().residue, 8);
        assert_eq!(zmod_inverse(10, z(10, 0)).unwrap().residue, 0);
        assert_eq!(zmod_inverse(6, z(6, 5)).unwrap().residue, 5);
        assert_eq!(brute_inverse(6, 5), vec![5]);
        assert_eq!(brute_inverse(10, 2), vec![8]);
        assert!(matches!(zmod_inverse(12, z(12, 5)), Err(EvalError::NotSquarefree(12))));
    }

    #[test]
    fn zmod_inverse_matches_brute_force() {
        for n in 1..=60u64 {
            if !is_squarefree(n) {
                continue;
            }
            for x in 0..n {
                let y = zmod_inverse(n, ZmodVal::new(n, x as i128)).unwrap().residue;
                assert_eq!(brute_inverse(n, x), vec![y], "n={n} x={x}");
                let back = zmod_inverse(n, ZmodVal::new(n, y as i128)).unwrap().residue;
                assert_eq!(back, x);
            }
        }
    }

    #[test]
    fn zmod_eval_examples() {
        let e = Assignment::new();
        assert_eq!(eval_zmod(10, &t("n(2) * n(5)"), &e).unwrap().residue, 0);
        assert_eq!(eval_zmod(10, &t("one(n(2))"), &e).unwrap().residue, 6);
        assert_eq!(eval_zmod(10, &t("0^-1"), &e).unwrap().residue, 0);
        assert!(eval_zmod(10, &t("s(1)"), &e).is_err());
        assert!(eval_zmod(8, &t("1"), &e).is_err());
    }

    #[test]
    fn value_literals() {
        assert_eq!("1+2i".parse::<GaussRat>().unwrap(), GaussRat::new(Rat::one(), Rat::from_int(2)));
        assert_eq!("-i".parse::<GaussRat>().unwrap(), GaussRat::i().neg());
        assert_eq!("3/4-1/2i".parse::<GaussRat>().unwrap(), GaussRat::new(Rat::new(3, 4), Rat::new(-1, 2)));
        assert_eq!("i".parse::<GaussRat>().unwrap(), GaussRat::i());
        assert_eq!("-5".parse::<GaussRat>().unwrap(), GaussRat::real(Rat::from_int(-5)));
        for g in ["1+2i", "-i", "i", "3/4-1/2i", "7", "-2/3i"] {
            let v: GaussRat = g.parse().unwrap();
            assert_eq!(v.to_string().parse::<GaussRat>().unwrap(), v);
        }
        assert_eq!("zmod:10".parse::<Model>().unwrap(), Model::Zmod(10));
        assert!("zmod:4".parse::<Model>().is_err());
        let a = Model::Zmod(10).parse_assignment(&["z=17".to_string()]).unwrap();
        assert_eq!(a["z"], MeadowValue::Zmod(ZmodVal::new(10, 7)));
    }

    #[test]
    fn structured_order_puts_first_variable_outermost() {
        let vars = vec!["a".to_string(), "b".to_string()];
        let s = structured_assignments(&Model::c0(), &vars);
        assert_eq!(s.len(), 25);
        assert_eq!(s[5]["a"], MeadowValue::Gauss(GaussRat::one()));
        assert_eq!(s[5]["b"], MeadowValue::Gauss(GaussRat::zero()));
        assert_eq!(s[8]["b"], MeadowValue::Gauss(GaussRat::i()));
    }

    #[test]
    fn formula_examples() {
        use crate::fo_logic::{eq, translate_gamma, translate_phi, translate_psi};
        use crate::normal_forms::Smf;
        assert!(eval_formula(&eq(Term::Zero, Term::Zero), &Assignment::new(), &Model::Q0).unwrap());
        let phi = translate_phi(&Smf::leaf(t("x"), t("y")), &Smf::leaf(Term::One, Term::One)).unwrap();
        assert!(eval_formula(&phi, &q(&[("x", "2"), ("y", "2")]), &Model::Q0).unwrap());
        assert!(!eval_formula(&phi, &q(&[("x", "1"), ("y", "2")]), &Model::Q0).unwrap());
        let g = translate_gamma("w", &t("s(y)")).unwrap();
        assert!(eval_formula(&g, &q(&[("w", "1"), ("y", "5")]), &Model::Q0).unwrap());
        assert!(!eval_formula(&g, &q(&[("w", "-1"), ("y", "5")]), &Model::Q0).unwrap());
        assert!(eval_formula(&translate_psi(&Term::Zero, &Term::Zero).unwrap(), &Assignment::new(), &Model::Q0).unwrap());
        let psi = translate_psi(&t("s(c)"), &Term::One).unwrap();
        assert!(eval_formula(&psi, &q(&[("c", "3")]), &Model::Q0).unwrap());
        assert!(!eval_formula(&psi, &q(&[("c", "-3")]), &Model::Q0).unwrap());
    }

    #[test]
    fn formula_errors() {
        use crate::fo_logic::{eq, forall, less};
        let unguarded = forall("z", eq(t("z"), t("z")));
        assert!(matches!(eval_formula(&unguarded, &Assignment::new(), &Model::Q0), Err(EvalError::UnguardedQuantifier(_))));
        let order = less(Term::Zero, Term::One);
        assert!(matches!(eval_formula(&order, &Assignment::new(), &Model::c0()), Err(EvalError::OrderInUnorderedModel(_))));
    }

    #[test]
    fn sampling_is_deterministic() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let cfg = SampleConfig::default();
        let a = random_assignment(&Model::Q0, &vars, 7, 3, &cfg);
        let b = random_assignment(&Model::Q0, &vars, 7, 3, &cfg);
        assert_eq!(a, b);
        assert_ne!(a, random_assignment(&Model::Q0, &vars, 7, 4, &cfg));
    }
}
