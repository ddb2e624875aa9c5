//! Finite meadows on `Z/nZ`: construction, impossibility search and exhaustive axiom checks.

use std::fmt;

use thiserror::Error;

use crate::prover::{Statement, Theory};
use crate::semantics::{is_squarefree, zmod_inverse, ZmodVal};
use crate::term::{Signature, Term};

/// Upper limit on the assignments `check_axioms` enumerates for one axiom instance.
pub const MAX_ASSIGNMENTS: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("theory {0} is not over the plain meadow signature")]
    Signature(String),
    #[error("{axiom} needs {count} assignments over Z/{n}Z, above the limit {MAX_ASSIGNMENTS}")]
    TooManyAssignments { axiom: String, n: u64, count: u128 },
    #[error("the inverse table for Z/{n}Z violates {axiom} at {assignment}")]
    Unsound { n: u64, axiom: String, assignment: String },
}

/// A meadow on `Z/nZ` given by its inverse table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMeadow {
    pub n: u64,
    pub inverse: Vec<u64>,
    pub cancellation: bool,
    /// First pair `(a, b)` with `a, b != 0` and `a * b = 0`.
    pub zero_divisors: Option<(u64, u64)>,
}

/// Why `Z/nZ` carries no meadow inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Impossibility {
    /// No `y` satisfies `x * x * y = x`.
    NoCandidate { x: u64 },
    /// Every involutive choice from the candidate sets was tried; `nodes` counts search steps.
    Exhausted { nodes: u64 },
}

impl fmt::Display for Impossibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Impossibility::NoCandidate { x } => write!(f, "no-candidate x={x}"),
            Impossibility::Exhausted { nodes } => write!(f, "exhausted nodes={nodes}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Meadow(FiniteMeadow),
    Impossible(Impossibility),
}

impl Construction {
    pub fn meadow(&self) -> Option<&FiniteMeadow> {
        match self {
            Construction::Meadow(m) => Some(m),
            Construction::Impossible(_) => None,
        }
    }
}

impl FiniteMeadow {
    /// Builds the structure from an inverse table and scans for zero divisors.
    pub fn from_table(n: u64, inverse: Vec<u64>) -> FiniteMeadow {
        let zero_divisors = (1..n).flat_map(|a| (a..n).map(move |b| (a, b))).find(|&(a, b)| a * b % n == 0);
        FiniteMeadow { n, inverse, cancellation: zero_divisors.is_none(), zero_divisors }
    }

    /// Evaluates a plain meadow term with variables given as residues.
    pub fn eval(&self, t: &Term, a: &dyn Fn(&str) -> u64) -> u64 {
        let n = self.n;
        match t {
            Term::Zero => 0,
            Term::One => 1 % n,
            Term::Var(v) => a(v) % n,
            Term::Neg(x) => (n - self.eval(x, a)) % n,
            Term::Add(x, y) => (self.eval(x, a) + self.eval(y, a)) % n,
            Term::Mul(x, y) => self.eval(x, a) * self.eval(y, a) % n,
            Term::Inv(x) => self.inverse[self.eval(x, a) as usize],
            Term::Sub(x, y) => (self.eval(x, a) + n - self.eval(y, a)) % n,
            Term::PseudoOne(x) => {
                let v = self.eval(x, a);
                v * self.inverse[v as usize] % n
            }
            Term::PseudoZero(x) => {
                let v = self.eval(x, a);
                (1 + n - v * self.inverse[v as usize] % n) % n
            }
            Term::Numeral(k) => k % n,
            _ => self.eval(&t.expand_derived(), a),
        }
    }

    /// First assignment (variables in sorted order, last one fastest) where the sides differ.
    pub fn counterexample(&self, st: &Statement) -> Option<Vec<(String, u64)>> {
        let mut vars = st.lhs.free_vars();
        vars.extend(&st.rhs.free_vars());
        let vars = vars.to_vec();
        let (lhs, rhs) = (st.lhs.expand_derived(), st.rhs.expand_derived());
        let mut values = vec![0u64; vars.len()];
        loop {
            let lookup = |v: &str| values[vars.iter().position(|w| w == v).expect("bound variable")];
            if self.eval(&lhs, &lookup) != self.eval(&rhs, &lookup) {
                return Some(vars.iter().cloned().zip(values.iter().copied()).collect());
            }
            let mut k = vars.len();
            loop {
                if k == 0 {
                    return None;
                }
                k -= 1;
                values[k] += 1;
                if values[k] < self.n {
                    break;
                }
                values[k] = 0;
            }
        }
    }
}

fn md_theory() -> Theory {
    Theory::default()
}

fn verify_md(m: &FiniteMeadow) -> Result<(), ModelError> {
    for r in check_axioms(m, &md_theory())? {
        if let Some(c) = r.counter {
            return Err(ModelError::Unsound { n: m.n, axiom: r.axiom, assignment: format_counter(&c) });
        }
    }
    Ok(())
}

/// Candidate inverses of `x`: all `y` with `x * x * y = x`.
fn candidates(n: u64, x: u64) -> Vec<u64> {
    (0..n).filter(|&y| x * x % n * y % n == x).collect()
}

/// Depth-first search for an involutive table choosing `inv(x)` from the candidate sets.
fn search(cands: &[Vec<u64>], table: &mut [Option<u64>], nodes: &mut u64) -> bool {
    *nodes += 1;
    let Some(x) = table.iter().position(Option::is_none) else { return true };
    for &y in &cands[x] {
        let yi = y as usize;
        if yi != x && (table[yi].is_some() || !cands[yi].contains(&(x as u64))) {
            continue;
        }
        table[x] = Some(y);
        table[yi] = Some(x as u64);
        if search(cands, table, nodes) {
            return true;
        }
        table[x] = None;
        table[yi] = None;
    }
    false
}

/// The meadow on `Z/nZ`, or why none exists.
pub fn zmod_meadow(n: u64) -> Result<Construction, ModelError> {
    if n == 0 {
        return Err(ModelError::ZeroModulus);
    }
    if is_squarefree(n) {
        let table = (0..n)
            .map(|x| zmod_inverse(n, ZmodVal::new(n, x as i128)).map(|v| v.residue))
            .collect::<Result<Vec<_>, _>>()
            .expect("squarefree modulus");
        let m = FiniteMeadow::from_table(n, table);
        verify_md(&m)?;
        return Ok(Construction::Meadow(m));
    }
    let cands: Vec<Vec<u64>> = (0..n).map(|x| candidates(n, x)).collect();
    if let Some(x) = cands.iter().position(Vec::is_empty) {
        return Ok(Construction::Impossible(Impossibility::NoCandidate { x: x as u64 }));
    }
    let mut table = vec![None; n as usize];
    let mut nodes = 0;
    if search(&cands, &mut table, &mut nodes) {
        let m = FiniteMeadow::from_table(n, table.into_iter().map(|v| v.expect("complete table")).collect());
        verify_md(&m)?;
        Ok(Construction::Meadow(m))
    } else {
        Ok(Construction::Impossible(Impossibility::Exhausted { nodes }))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub n: u64,
    pub construction: Construction,
    pub squarefree: bool,
}

impl Classification {
    pub fn is_meadow(&self) -> bool {
        self.construction.meadow().is_some()
    }

    /// Fixed-width row `n meadow squarefree cancellation`.
    pub fn row(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let cancellation = self.construction.meadow().map_or("-", |m| yn(m.cancellation));
        format!("{:>4} {:>6} {:>10} {:>12}", self.n, yn(self.is_meadow()), yn(self.squarefree), cancellation)
    }
}

pub fn table_header() -> String {
    format!("{:>4} {:>6} {:>10} {:>12}", "n", "meadow", "squarefree", "cancellation")
}

/// `zmod_meadow` for every `n` in `1..=max_n`.
pub fn classify_range(max_n: u64) -> Vec<Classification> {
    (1..=max_n)
        .map(|n| Classification {
            n,
            construction: zmod_meadow(n).expect("n >= 1"),
            squarefree: is_squarefree(n),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    /// Axiom name, with `_k` appended for instances of indexed schemes.
    pub axiom: String,
    pub counter: Option<Vec<(String, u64)>>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.counter.is_none()
    }
}

pub fn format_counter(c: &[(String, u64)]) -> String {
    c.iter().map(|(v, x)| format!("{v}={x}")).collect::<Vec<_>>().join(",")
}

/// Every axiom instance of `theory` (indexed schemes up to the theory bound), checked over all assignments.
pub fn check_axioms(model: &FiniteMeadow, theory: &Theory) -> Result<Vec<AxiomReport>, ModelError> {
    if theory.signature() != Signature::Meadow {
        return Err(ModelError::Signature(theory.name()));
    }
    let mut out = Vec::new();
    for (name, indexed) in theory.axiom_names() {
        let indices: Vec<Option<usize>> = if indexed { (0..=theory.bound).map(Some).collect() } else { vec![None] };
        for index in indices {
            let st = theory.axiom(name, index).expect("listed axiom");
            let axiom = index.map_or(name.to_string(), |k| format!("{name}_{k}"));
            let mut vars = st.lhs.free_vars();
            vars.extend(&st.rhs.free_vars());
            let count = (model.n as u128).checked_pow(vars.len() as u32).unwrap_or(u128::MAX);
            if count > MAX_ASSIGNMENTS as u128 {
                return Err(ModelError::TooManyAssignments { axiom, n: model.n, count });
            }
            out.push(AxiomReport { axiom, counter: model.counterexample(&st) });
        }
    }
    Ok(out)
}
