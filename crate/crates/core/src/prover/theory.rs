//! Axiom schemes and their instantiation.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::term::{self, Signature, Substitution, Term};

use super::{ProverError, Statement};

/// Default upper bound on the index of indexed schemes.
pub const DEFAULT_BOUND: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    CR,
    Md,
    C0,
    EFR,
    AEFR,
    Signs,
    CC,
    SSAV,
    SignsStar,
}

impl Scheme {
    pub const ALL: [Scheme; 9] = [
        Scheme::CR,
        Scheme::Md,
        Scheme::C0,
        Scheme::EFR,
        Scheme::AEFR,
        Scheme::Signs,
        Scheme::CC,
        Scheme::SSAV,
        Scheme::SignsStar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::CR => "CR",
            Scheme::Md => "Md",
            Scheme::C0 => "C0",
            Scheme::EFR => "EFR",
            Scheme::AEFR => "AEFR",
            Scheme::Signs => "Signs",
            Scheme::CC => "CC",
            Scheme::SSAV => "SSAV",
            Scheme::SignsStar => "Signs*",
        }
    }

    /// Axiom names of the scheme; indexed schemes have a single name.
    pub fn axiom_names(self) -> &'static [&'static str] {
        match self {
            Scheme::CR => &["CR1", "CR2", "CR3", "CR4", "CR5", "CR6", "CR7", "CR8"],
            Scheme::Md => &["INV", "RIL"],
            Scheme::C0 => &["C0"],
            Scheme::EFR => &["EFR"],
            Scheme::AEFR => &["AEFR"],
            Scheme::Signs => &["S1", "S2", "S3", "S4", "S5", "S6"],
            Scheme::CC => &["CC0", "CC1", "CC2", "CC3", "CC4", "CC5", "CC6", "CC7", "CC8", "CC9"],
            Scheme::SSAV => &["SSAV"],
            Scheme::SignsStar => &["S1", "S2", "S3", "S*4", "S*5", "S*6", "S*7", "S*8"],
        }
    }

    pub fn is_indexed(self) -> bool {
        matches!(self, Scheme::C0 | Scheme::EFR | Scheme::AEFR | Scheme::SSAV)
    }
}

impl FromStr for Scheme {
    type Err = ProverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ProverError::UnknownTheory(s.to_string()))
    }
}

/// A set of axiom schemes with a common bound for the indexed ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    schemes: BTreeSet<Scheme>,
    pub bound: usize,
}

impl Theory {
    /// `Md` brings `CR` along.
    pub fn new(schemes: impl IntoIterator<Item = Scheme>, bound: usize) -> Theory {
        let mut set: BTreeSet<Scheme> = schemes.into_iter().collect();
        if set.contains(&Scheme::Md) {
            set.insert(Scheme::CR);
        }
        Theory { schemes: set, bound }
    }

    pub fn with_bound(mut self, bound: usize) -> Theory {
        self.bound = bound;
        self
    }

    pub fn schemes(&self) -> impl Iterator<Item = Scheme> + '_ {
        self.schemes.iter().copied()
    }

    pub fn contains(&self, scheme: Scheme) -> bool {
        self.schemes.contains(&scheme)
    }

    /// Canonical `+`-joined name; `CR` is left implicit next to `Md`.
    pub fn name(&self) -> String {
        let md = self.contains(Scheme::Md);
        self.schemes
            .iter()
            .filter(|k| !(md && **k == Scheme::CR))
            .map(|k| k.name())
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn signature(&self) -> Signature {
        let sign = self.contains(Scheme::Signs) || self.contains(Scheme::SignsStar);
        let complex = self.contains(Scheme::CC) || self.contains(Scheme::SSAV) || self.contains(Scheme::SignsStar);
        Signature::from_flags(sign, complex)
    }

    /// Every axiom of `other` is an axiom of `self`.
    pub fn includes(&self, other: &Theory) -> bool {
        other.schemes.is_subset(&self.schemes) && (other.bound <= self.bound || !other.schemes.iter().any(|k| k.is_indexed()))
    }

    /// `(name, indexed)` for every axiom, without duplicates.
    pub fn axiom_names(&self) -> Vec<(&'static str, bool)> {
        let mut out: Vec<(&'static str, bool)> = Vec::new();
        for k in &self.schemes {
            for n in k.axiom_names() {
                if !out.iter().any(|(m, _)| m == n) {
                    out.push((n, k.is_indexed()));
                }
            }
        }
        out
    }

    fn scheme_of(&self, name: &str) -> Option<Scheme> {
        self.schemes.iter().copied().find(|k| k.axiom_names().contains(&name))
    }

    /// The uninstantiated axiom.
    pub fn axiom(&self, name: &str, index: Option<usize>) -> Result<Statement, ProverError> {
        let scheme = self
            .scheme_of(name)
            .ok_or_else(|| ProverError::UnknownAxiom { name: name.to_string(), theory: self.name() })?;
        match (scheme.is_indexed(), index) {
            (true, None) => Err(ProverError::MissingIndex(name.to_string())),
            (false, Some(_)) => Err(ProverError::UnexpectedIndex(name.to_string())),
            (true, Some(n)) if n > self.bound => Err(ProverError::IndexOutOfBound { name: name.to_string(), index: n, bound: self.bound }),
            (true, Some(n)) => Ok(indexed_axiom(scheme, n)),
            (false, None) => Ok(plain_axiom(name)),
        }
    }

    /// The axiom with `sub` applied to both sides.
    pub fn instantiate_axiom(&self, name: &str, index: Option<usize>, sub: &Substitution) -> Result<Statement, ProverError> {
        Ok(self.axiom(name, index)?.substitute(sub))
    }
}

impl Default for Theory {
    fn default() -> Self {
        Theory::new([Scheme::Md], DEFAULT_BOUND)
    }
}

impl FromStr for Theory {
    type Err = ProverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let schemes = s
            .split('+')
            .map(|part| part.trim().parse::<Scheme>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Theory::new(schemes, DEFAULT_BOUND))
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn st(text: &str) -> Statement {
    let (l, r) = text.split_once(" = ").expect("axiom text has one ` = `");
    let sig = Signature::ComplexSignedMeadow;
    Statement::new(term::parse(l, sig).expect("axiom lhs parses"), term::parse(r, sig).expect("axiom rhs parses"))
}

fn plain_axiom(name: &str) -> Statement {
    st(match name {
        "CR1" => "(x + y) + z = x + (y + z)",
        "CR2" => "x + y = y + x",
        "CR3" => "x + 0 = x",
        "CR4" => "x + -x = 0",
        "CR5" => "(x * y) * z = x * (y * z)",
        "CR6" => "x * y = y * x",
        "CR7" => "1 * x = x",
        "CR8" => "x * (y + z) = x * y + x * z",
        "INV" => "(x^-1)^-1 = x",
        "RIL" => "x * (x * x^-1) = x",
        "S1" => "s(one(x)) = one(x)",
        "S2" => "s(zero(x)) = zero(x)",
        "S3" => "s(-1) = -1",
        "S4" => "s(x^-1) = s(x)",
        "S5" => "s(x * y) = s(x) * s(y)",
        "S6" => "zero(s(x) - s(y)) * (s(x + y) - s(x)) = 0",
        "CC0" => "conj(0) = 0",
        "CC1" => "conj(1) = 1",
        "CC2" => "conj(i) = -i",
        "CC3" => "conj(-x) = -conj(x)",
        "CC4" => "conj(x + y) = conj(x) + conj(y)",
        "CC5" => "conj(x * y) = conj(x) * conj(y)",
        "CC6" => "conj(x^-1) = conj(x)^-1",
        "CC7" => "conj(conj(x)) = x",
        "CC8" => "i * i = -1",
        "CC9" => "one(conj(x)) = one(x)",
        "S*4" => "s(re(x)^-1) = s(re(x))",
        "S*5" => "s(re(x) * re(y)) = s(re(x)) * s(re(y))",
        "S*6" => "zero(s(re(x)) - s(re(y))) * (s(re(x) + re(y)) - s(re(x))) = 0",
        "S*7" => "s(x) = s(re(x))",
        "S*8" => "conj(s(x)) = s(x)",
        other => unreachable!("no plain axiom {other}"),
    })
}

/// Variables `x0..xn` of the indexed schemes.
pub fn scheme_var(k: usize) -> Term {
    Term::Var(format!("x{k}"))
}

fn indexed_axiom(scheme: Scheme, n: usize) -> Statement {
    let squares = || term::sum_of((0..=n).map(|k| term::pow(scheme_var(k), 2)));
    match scheme {
        Scheme::C0 => Statement::new(term::one_of(term::numeral(n as u64 + 1)), Term::One),
        Scheme::EFR => Statement::new(term::mul(term::zero_of(squares()), scheme_var(0)), Term::Zero),
        Scheme::AEFR => Statement::new(term::one_of(term::add(Term::One, squares())), Term::One),
        Scheme::SSAV => {
            let norms = (0..=n).map(|k| term::mul(scheme_var(k), term::conj(scheme_var(k))));
            Statement::new(term::one_of(term::sum_of(std::iter::once(Term::One).chain(norms))), Term::One)
        }
        _ => unreachable!("{scheme:?} is not indexed"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse;

    fn t(s: &str) -> Term {
        parse(s, Signature::ComplexSignedMeadow).unwrap()
    }

    fn sub(pairs: &[(&str, &str)]) -> Substitution {
        pairs.iter().map(|(v, s)| (v.to_string(), t(s))).collect()
    }

    #[test]
    fn instantiation_examples() {
        let th: Theory = "Md+Signs".parse().unwrap();
        let s5 = th.instantiate_axiom("S5", None, &sub(&[("x", "a + b"), ("y", "c")])).unwrap();
        assert_eq!(s5, Statement::new(t("s((a + b) * c)"), t("s(a + b) * s(c)")));

        let md: Theory = "Md".parse().unwrap();
        let ril = md.instantiate_axiom("RIL", None, &sub(&[("x", "0")])).unwrap();
        assert_eq!(ril, Statement::new(t("0 * (0 * 0^-1)"), t("0")));

        let efr: Theory = "Md+EFR".parse().unwrap();
        let e = efr.instantiate_axiom("EFR", Some(1), &sub(&[("x0", "a"), ("x1", "b")])).unwrap();
        assert_eq!(e, Statement::new(t("zero(a^2 + b^2) * a"), t("0")));
    }

    #[test]
    fn instantiation_errors() {
        let md: Theory = "Md".parse().unwrap();
        assert!(matches!(md.axiom("S5", None), Err(ProverError::UnknownAxiom { .. })));
        let efr: Theory = "Md+EFR".parse().unwrap();
        assert!(matches!(efr.axiom("EFR", Some(9)), Err(ProverError::IndexOutOfBound { .. })));
        assert!(matches!(efr.axiom("EFR", None), Err(ProverError::MissingIndex(_))));
        assert!(matches!(md.axiom("RIL", Some(0)), Err(ProverError::UnexpectedIndex(_))));
        assert!("Md+Foo".parse::<Theory>().is_err());
    }

    #[test]
    fn names_and_inclusion() {
        let th: Theory = "Signs+Md".parse().unwrap();
        assert_eq!(th.name(), "Md+Signs");
        assert!(th.includes(&"CR".parse().unwrap()));
        assert!(!th.includes(&"Md+CC".parse().unwrap()));
        assert_eq!(th.signature(), Signature::SignedMeadow);
        let star: Theory = "Md+CC+Signs*".parse().unwrap();
        assert_eq!(star.signature(), Signature::ComplexSignedMeadow);
        assert!(star.axiom("S1", None).is_ok());
        assert_eq!(star.axiom_names().iter().filter(|(n, _)| *n == "S1").count(), 1);
    }

    #[test]
    fn indexed_shapes() {
        let th = Theory::new(Scheme::ALL, 8);
        assert_eq!(th.axiom("C0", Some(1)).unwrap(), Statement::new(t("one(n(2))"), t("1")));
        assert_eq!(th.axiom("AEFR", Some(0)).unwrap(), Statement::new(t("one(1 + x0^2)"), t("1")));
        assert_eq!(th.axiom("SSAV", Some(1)).unwrap(), Statement::new(t("one(1 + x0 * conj(x0) + x1 * conj(x1))"), t("1")));
    }
}
