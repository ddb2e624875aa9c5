//! Script construction: a step-emitting builder and a proof-producing ring normalizer.
//!
//! Nothing here is trusted. Every step the builder emits is replayed by the
//! checker, so the tactics only have to be complete enough to be useful.

use std::collections::{BTreeMap, HashMap};

use crate::term::{self, Head, Substitution, Term};

use super::{Library, ProofScript, ProofStep, ProverError, Rule, Statement, Theory};

/// A proved equation together with the id of the step proving it.
#[derive(Clone, Debug, PartialEq)]
pub struct Fact {
    pub id: usize,
    pub lhs: Term,
    pub rhs: Term,
}

impl Fact {
    pub fn statement(&self) -> Statement {
        Statement::new(self.lhs.clone(), self.rhs.clone())
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, ProverError> {
    Err(ProverError::Tactic(msg.into()))
}

pub fn subst_of(pairs: &[(&str, Term)]) -> Substitution {
    pairs.iter().map(|(v, t)| (v.to_string(), t.clone())).collect()
}

/// Emits proof steps, sharing steps with identical statements.
pub struct ProofBuilder<'a> {
    theory: Theory,
    lib: &'a Library,
    steps: Vec<ProofStep>,
    seen: HashMap<(Term, Term), usize>,
}

impl<'a> ProofBuilder<'a> {
    pub fn new(theory: Theory, lib: &'a Library) -> ProofBuilder<'a> {
        ProofBuilder { theory, lib, steps: Vec::new(), seen: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    fn push(&mut self, lhs: Term, rhs: Term, rule: Rule) -> Fact {
        let key = (lhs, rhs);
        if let Some(&id) = self.seen.get(&key) {
            return Fact { id, lhs: key.0, rhs: key.1 };
        }
        let id = self.steps.len() + 1;
        self.steps.push(ProofStep { id, statement: Statement::new(key.0.clone(), key.1.clone()), rule });
        self.seen.insert(key.clone(), id);
        Fact { id, lhs: key.0, rhs: key.1 }
    }

    pub fn axiom(&mut self, name: &str, pairs: &[(&str, Term)]) -> Result<Fact, ProverError> {
        self.axiom_indexed(name, None, pairs)
    }

    pub fn axiom_indexed(&mut self, name: &str, index: Option<usize>, pairs: &[(&str, Term)]) -> Result<Fact, ProverError> {
        let subst = subst_of(pairs);
        let st = self.theory.instantiate_axiom(name, index, &subst)?;
        Ok(self.push(st.lhs, st.rhs, Rule::Axiom { name: name.to_string(), index, subst }))
    }

    pub fn lemma(&mut self, name: &str, pairs: &[(&str, Term)]) -> Result<Fact, ProverError> {
        let subst = subst_of(pairs);
        let st = self.lib.lookup(name, &self.theory)?.goal.substitute(&subst);
        Ok(self.push(st.lhs, st.rhs, Rule::Lemma { name: name.to_string(), subst }))
    }

    pub fn refl(&mut self, t: &Term) -> Fact {
        self.push(t.clone(), t.clone(), Rule::Refl)
    }

    pub fn sym(&mut self, f: &Fact) -> Fact {
        if f.lhs == f.rhs {
            return f.clone();
        }
        self.push(f.rhs.clone(), f.lhs.clone(), Rule::Sym(f.id))
    }

    pub fn trans(&mut self, f: &Fact, g: &Fact) -> Result<Fact, ProverError> {
        if f.rhs != g.lhs {
            return fail(format!("cannot chain `{} = {}` with `{} = {}`", f.lhs, f.rhs, g.lhs, g.rhs));
        }
        if f.lhs == f.rhs {
            return Ok(g.clone());
        }
        if g.lhs == g.rhs {
            return Ok(f.clone());
        }
        Ok(self.push(f.lhs.clone(), g.rhs.clone(), Rule::Trans(f.id, g.id)))
    }

    pub fn chain(&mut self, facts: &[Fact]) -> Result<Fact, ProverError> {
        let mut acc = facts.first().cloned().ok_or_else(|| ProverError::Tactic("empty chain".into()))?;
        for f in &facts[1..] {
            acc = self.trans(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn cong(&mut self, op: Head, args: &[Fact]) -> Result<Fact, ProverError> {
        let l = Term::build(&op, args.iter().map(|f| f.lhs.clone()).collect());
        let r = Term::build(&op, args.iter().map(|f| f.rhs.clone()).collect());
        match (l, r) {
            (Some(l), Some(r)) if l == r => Ok(self.refl(&l)),
            (Some(l), Some(r)) => Ok(self.push(l, r, Rule::Cong { op, refs: args.iter().map(|f| f.id).collect() })),
            _ => fail(format!("operator `{}` does not take {} arguments", op.name(), args.len())),
        }
    }

    pub fn subst(&mut self, f: &Fact, pairs: &[(&str, Term)]) -> Fact {
        let subst = subst_of(pairs);
        let st = f.statement().substitute(&subst);
        self.push(st.lhs, st.rhs, Rule::Subst { of: f.id, subst })
    }

    /// `lhs = rhs` from a fact whose sides agree with these after expansion.
    pub fn expand_to(&mut self, f: &Fact, lhs: Term, rhs: Term) -> Result<Fact, ProverError> {
        if !f.statement().matches(&Statement::new(lhs.clone(), rhs.clone())) {
            return fail(format!("`{lhs} = {rhs}` is not a derived-operator variant of `{} = {}`", f.lhs, f.rhs));
        }
        if f.lhs == lhs && f.rhs == rhs {
            return Ok(f.clone());
        }
        Ok(self.push(lhs, rhs, Rule::ExpandDerived(f.id)))
    }

    /// `t = expand(t)`.
    pub fn unfold(&mut self, t: &Term) -> Fact {
        let e = t.expand_derived();
        let r = self.refl(t);
        if e == *t {
            return r;
        }
        self.push(t.clone(), e, Rule::ExpandDerived(r.id))
    }

    /// `a = b` when they differ only at positions where a given fact (either direction) applies.
    pub fn by(&mut self, a: &Term, b: &Term, facts: &[Fact]) -> Result<Fact, ProverError> {
        self.diff(a, b, facts).ok_or_else(|| ProverError::Tactic(format!("no congruence proof of `{a} = {b}`")))
    }

    fn diff(&mut self, a: &Term, b: &Term, facts: &[Fact]) -> Option<Fact> {
        if a == b {
            return Some(self.refl(a));
        }
        for f in facts {
            if f.lhs == *a && f.rhs == *b {
                return Some(f.clone());
            }
            if f.rhs == *a && f.lhs == *b {
                return Some(self.sym(f));
            }
        }
        if a.head() != b.head() || a.children().is_empty() {
            return None;
        }
        let pairs: Vec<(Term, Term)> =
            a.children().into_iter().cloned().zip(b.children().into_iter().cloned()).collect();
        let mut args = Vec::with_capacity(pairs.len());
        for (x, y) in &pairs {
            args.push(self.diff(x, y, facts)?);
        }
        self.cong(a.head(), &args).ok()
    }

    /// Closes the script; the last fact must match the goal modulo expansion.
    pub fn finish(self, goal: Statement, last: &Fact) -> Result<ProofScript, ProverError> {
        if !last.statement().matches(&goal) {
            return fail(format!("last fact `{} = {}` does not match goal `{goal}`", last.lhs, last.rhs));
        }
        let mut steps = self.steps;
        // Drop steps after the last fact is first proved; they are unused scaffolding.
        steps.truncate(last.id);
        Ok(ProofScript { theory: self.theory, goal, steps })
    }
}

// ---------------------------------------------------------------------------
// Ring normalization.
//
// Normal form: a right-nested sum `m1 + (m2 + (... + 0))` of signed monomials,
// sorted with repetitions and without a monomial next to its negation; a
// monomial is `a1 * (a2 * (... * 1))` over sorted atoms, or `1` when empty.
// Atoms are variables, `i`, and `^-1`/`s`/`conj` nodes with normalized arguments.

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct SMono {
    atoms: Vec<Term>,
    neg: bool,
}

impl SMono {
    fn unsigned(&self) -> SMono {
        SMono { atoms: self.atoms.clone(), neg: false }
    }

    fn flipped(&self) -> SMono {
        SMono { atoms: self.atoms.clone(), neg: !self.neg }
    }
}

fn render_atoms(atoms: &[Term]) -> Term {
    match atoms.split_first() {
        None => Term::One,
        Some(_) => atoms.iter().rev().fold(Term::One, |acc, a| term::mul(a.clone(), acc)),
    }
}

fn render_mono(m: &SMono) -> Term {
    let t = render_atoms(&m.atoms);
    if m.neg {
        term::neg(t)
    } else {
        t
    }
}

fn render_nf(list: &[SMono]) -> Term {
    list.iter().rev().fold(Term::Zero, |acc, m| term::add(render_mono(m), acc))
}

/// Polynomial over atoms with integer coefficients.
pub(crate) type Poly = BTreeMap<Vec<Term>, i64>;

fn poly_add(p: &mut Poly, q: &Poly, k: i64) {
    for (m, c) in q {
        let e = p.entry(m.clone()).or_insert(0);
        *e += k * c;
        if *e == 0 {
            p.remove(m);
        }
    }
}

fn mono_mul(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut v: Vec<Term> = a.iter().chain(b).cloned().collect();
    v.sort();
    v
}

fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = Poly::new();
    for (a, c) in p {
        for (b, d) in q {
            let mut single = Poly::new();
            single.insert(mono_mul(a, b), c * d);
            poly_add(&mut out, &single, 1);
        }
    }
    out
}

fn atom_head(t: &Term) -> Option<Head> {
    match t {
        Term::Inv(_) | Term::Sign(_) | Term::Conj(_) => Some(t.head()),
        _ => None,
    }
}

/// Polynomial of a core term.
pub(crate) fn poly_of(t: &Term) -> Poly {
    let atom = |a: Term| Poly::from([(vec![a], 1)]);
    match t {
        Term::Zero => Poly::new(),
        Term::One => Poly::from([(vec![], 1)]),
        Term::Var(_) | Term::I => atom(t.clone()),
        Term::Add(a, b) => {
            let mut p = poly_of(a);
            poly_add(&mut p, &poly_of(b), 1);
            p
        }
        Term::Neg(a) => {
            let mut p = Poly::new();
            poly_add(&mut p, &poly_of(a), -1);
            p
        }
        Term::Mul(a, b) => poly_mul(&poly_of(a), &poly_of(b)),
        Term::Inv(a) | Term::Sign(a) | Term::Conj(a) => {
            let inner = render_nf(&poly_list(&poly_of(a)));
            atom(Term::build(&t.head(), vec![inner]).expect("unary"))
        }
        _ => poly_of(&t.expand_derived()),
    }
}

fn poly_list(p: &Poly) -> Vec<SMono> {
    let mut out = Vec::new();
    for (m, c) in p {
        for _ in 0..c.unsigned_abs() {
            out.push(SMono { atoms: m.clone(), neg: *c < 0 });
        }
    }
    out
}

/// Polynomial rendered as a plain term.
fn poly_term(p: &Poly) -> Term {
    let monos = p.iter().map(|(m, c)| {
        let base = m.iter().cloned().reduce(term::mul);
        let k = term::numeral(c.unsigned_abs());
        let t = match (base, c.unsigned_abs()) {
            (None, _) => k,
            (Some(b), 1) => b,
            (Some(b), _) => term::mul(k, b),
        };
        if *c < 0 {
            term::neg(t)
        } else {
            t
        }
    });
    monos.reduce(term::add).unwrap_or(Term::Zero)
}

fn divides(small: &[Term], big: &[Term]) -> Option<Vec<Term>> {
    let mut rest = big.to_vec();
    for a in small {
        let pos = rest.iter().position(|b| b == a)?;
        rest.remove(pos);
    }
    Some(rest)
}

const REDUCTION_LIMIT: usize = 20_000;

/// Atoms of a term replaced by fresh variables, one per ring-equal class.
struct Abstraction {
    used: term::VarSet,
    opaque: Vec<Term>,
    keys: HashMap<Term, usize>,
    reps: Vec<(String, Term)>,
}

impl Abstraction {
    fn abstract_atoms(&mut self, t: &Term) -> Term {
        let key = if atom_head(t).is_some() {
            poly_of(t).into_keys().next().expect("an atom is one monomial").remove(0)
        } else if self.opaque.contains(t) {
            t.clone()
        } else {
            return t.map_children(|c| self.abstract_atoms(c));
        };
        let k = match self.keys.get(&key) {
            Some(&k) => k,
            None => {
                let mut n = self.reps.len();
                let name = loop {
                    let name = format!("ring_{n}");
                    if !self.used.contains(&name) {
                        break name;
                    }
                    n += 1;
                };
                self.used.insert(name.clone());
                self.reps.push((name, t.clone()));
                self.keys.insert(key, self.reps.len() - 1);
                self.reps.len() - 1
            }
        };
        term::var(&self.reps[k].0)
    }
}

/// Pairs of differing atoms at matching positions.
fn atom_variants(e: &Term, target: &Term, out: &mut Vec<(Term, Term)>) {
    if e == target {
        return;
    }
    if atom_head(e).is_some() {
        out.push((e.clone(), target.clone()));
        return;
    }
    for (x, y) in e.children().into_iter().zip(target.children()) {
        atom_variants(x, y, out);
    }
}

impl<'a> ProofBuilder<'a> {
    fn cr(&mut self, name: &str, pairs: &[(&str, &Term)]) -> Fact {
        let pairs: Vec<(&str, Term)> = pairs.iter().map(|(v, t)| (*v, (*t).clone())).collect();
        if name.starts_with("CR") {
            self.axiom(name, &pairs).expect("ring axioms are in every theory")
        } else {
            self.lemma(name, &pairs).unwrap_or_else(|e| panic!("ring lemma {name}: {e}"))
        }
    }

    fn trans_all(&mut self, facts: &[Fact]) -> Fact {
        self.chain(facts).expect("normalizer chains line up")
    }

    fn atom_nf(&mut self, a: &Term) -> (Vec<SMono>, Fact) {
        let f1 = self.cr("cr.mul_one", &[("x", a)]);
        let f1 = self.sym(&f1);
        let a1 = f1.rhs.clone();
        let f2 = self.cr("CR3", &[("x", &a1)]);
        let f2 = self.sym(&f2);
        let f = self.trans_all(&[f1, f2]);
        (vec![SMono { atoms: vec![a.clone()], neg: false }], f)
    }

    fn norm(&mut self, t: &Term) -> Result<(Vec<SMono>, Fact), ProverError> {
        Ok(match t {
            Term::Zero => (Vec::new(), self.refl(t)),
            Term::One => {
                let f = self.cr("CR3", &[("x", &Term::One)]);
                (vec![SMono { atoms: vec![], neg: false }], self.sym(&f))
            }
            Term::Var(_) | Term::I => self.atom_nf(t),
            Term::Add(a, b) | Term::Mul(a, b) => {
                let (pa, fa) = self.norm(a)?;
                let (pb, fb) = self.norm(b)?;
                let c = self.cong(t.head(), &[fa, fb])?;
                let (p, g) = if matches!(t, Term::Add(..)) { self.add_nf(&pa, &pb) } else { self.mul_nf(&pa, &pb) };
                (p, self.trans_all(&[c, g]))
            }
            Term::Neg(a) => {
                let (pa, fa) = self.norm(a)?;
                let c = self.cong(Head::Neg, &[fa])?;
                let (p, g) = self.neg_nf(&pa);
                (p, self.trans_all(&[c, g]))
            }
            _ if atom_head(t).is_some() => {
                let (_, fa) = self.norm(t.children()[0])?;
                let c = self.cong(t.head(), &[fa])?;
                let atom = c.rhs.clone();
                let (p, g) = self.atom_nf(&atom);
                (p, self.trans_all(&[c, g]))
            }
            _ => return fail(format!("ring normalizer needs an expanded term, got `{t}`")),
        })
    }

    fn add_nf(&mut self, p: &[SMono], q: &[SMono]) -> (Vec<SMono>, Fact) {
        let rq = render_nf(q);
        match p.split_first() {
            None => (q.to_vec(), self.cr("cr.add_zero_left", &[("x", &rq)])),
            Some((m, rest)) => {
                let rm = render_mono(m);
                let f1 = self.cr("CR1", &[("x", &rm), ("y", &render_nf(rest)), ("z", &rq)]);
                let (r, f2) = self.add_nf(rest, q);
                let refl = self.refl(&rm);
                let f3 = self.cong(Head::Add, &[refl, f2]).expect("binary");
                let (s, f4) = self.insert(m, &r);
                (s, self.trans_all(&[f1, f3, f4]))
            }
        }
    }

    fn insert(&mut self, m: &SMono, r: &[SMono]) -> (Vec<SMono>, Fact) {
        let rm = render_mono(m);
        let Some((first, rest)) = r.split_first() else {
            let t = term::add(rm, Term::Zero);
            return (vec![m.clone()], self.refl(&t));
        };
        let tail = render_nf(rest);
        if first.atoms == m.atoms && first.neg != m.neg {
            let base = render_mono(&m.unsigned());
            let f = if m.neg {
                self.cr("cr.add_cancel_neg", &[("x", &base), ("y", &tail)])
            } else {
                self.cr("cr.add_cancel", &[("x", &base), ("y", &tail)])
            };
            return (rest.to_vec(), f);
        }
        if m <= first {
            let mut out = vec![m.clone()];
            out.extend_from_slice(r);
            let t = render_nf(&out);
            return (out, self.refl(&t));
        }
        let rf = render_mono(first);
        let f1 = self.cr("cr.add_left_comm", &[("x", &rm), ("y", &rf), ("z", &tail)]);
        let (s, f2) = self.insert(m, rest);
        let refl = self.refl(&rf);
        let f3 = self.cong(Head::Add, &[refl, f2]).expect("binary");
        let mut out = vec![first.clone()];
        out.extend(s);
        (out, self.trans_all(&[f1, f3]))
    }

    fn neg_nf(&mut self, p: &[SMono]) -> (Vec<SMono>, Fact) {
        match p.split_first() {
            None => (Vec::new(), self.cr("cr.neg_zero", &[])),
            Some((m, rest)) => {
                let rm = render_mono(m);
                let f1 = self.cr("cr.neg_add", &[("x", &rm), ("y", &render_nf(rest))]);
                let (q, f2) = self.neg_nf(rest);
                let f3 = if m.neg {
                    self.cr("cr.neg_neg", &[("x", &render_mono(&m.unsigned()))])
                } else {
                    self.refl(&term::neg(rm))
                };
                let f4 = self.cong(Head::Add, &[f3, f2]).expect("binary");
                let mut out = vec![m.flipped()];
                out.extend(q);
                (out, self.trans_all(&[f1, f4]))
            }
        }
    }

    fn mul_nf(&mut self, p: &[SMono], q: &[SMono]) -> (Vec<SMono>, Fact) {
        let rq = render_nf(q);
        match p.split_first() {
            None => (Vec::new(), self.cr("cr.zero_mul", &[("x", &rq)])),
            Some((m, rest)) => {
                let rm = render_mono(m);
                let f1 = self.cr("cr.add_mul", &[("x", &rm), ("y", &render_nf(rest)), ("z", &rq)]);
                let (s1, f2) = self.scale(m, q);
                let (s2, f3) = self.mul_nf(rest, q);
                let f4 = self.cong(Head::Add, &[f2, f3]).expect("binary");
                let (s, f5) = self.add_nf(&s1, &s2);
                (s, self.trans_all(&[f1, f4, f5]))
            }
        }
    }

    fn scale(&mut self, m: &SMono, q: &[SMono]) -> (Vec<SMono>, Fact) {
        let rm = render_mono(m);
        match q.split_first() {
            None => (Vec::new(), self.cr("cr.mul_zero", &[("x", &rm)])),
            Some((n, rest)) => {
                let f1 = self.cr("CR8", &[("x", &rm), ("y", &render_mono(n)), ("z", &render_nf(rest))]);
                let (k, f2) = self.mono_mul(m, n);
                let (s, f3) = self.scale(m, rest);
                let f4 = self.cong(Head::Add, &[f2, f3]).expect("binary");
                let (out, f5) = self.insert(&k, &s);
                (out, self.trans_all(&[f1, f4, f5]))
            }
        }
    }

    fn mono_mul(&mut self, m: &SMono, n: &SMono) -> (SMono, Fact) {
        let (rm, rn) = (render_mono(m), render_mono(n));
        if m.neg || n.neg {
            let f1 = if m.neg {
                self.cr("cr.neg_mul", &[("x", &render_mono(&m.unsigned())), ("y", &rn)])
            } else {
                self.cr("cr.mul_neg", &[("x", &rm), ("y", &render_mono(&n.unsigned()))])
            };
            let (mu, nu) = if m.neg { (m.unsigned(), n.clone()) } else { (m.clone(), n.unsigned()) };
            let (k, f2) = self.mono_mul(&mu, &nu);
            let f3 = self.cong(Head::Neg, &[f2]).expect("unary");
            if k.neg {
                let f4 = self.cr("cr.neg_neg", &[("x", &render_mono(&k.unsigned()))]);
                (k.unsigned(), self.trans_all(&[f1, f3, f4]))
            } else {
                (k.flipped(), self.trans_all(&[f1, f3]))
            }
        } else {
            let (atoms, f) = self.prod_merge(&m.atoms, &n.atoms);
            (SMono { atoms, neg: false }, f)
        }
    }

    fn prod_merge(&mut self, a: &[Term], b: &[Term]) -> (Vec<Term>, Fact) {
        let rb = render_atoms(b);
        match a.split_first() {
            None => (b.to_vec(), self.cr("CR7", &[("x", &rb)])),
            Some((x, rest)) => {
                let f1 = self.cr("CR5", &[("x", x), ("y", &render_atoms(rest)), ("z", &rb)]);
                let (c, f2) = self.prod_merge(rest, b);
                let refl = self.refl(x);
                let f3 = self.cong(Head::Mul, &[refl, f2]).expect("binary");
                let (d, f4) = self.insert_atom(x, &c);
                (d, self.trans_all(&[f1, f3, f4]))
            }
        }
    }

    fn insert_atom(&mut self, x: &Term, c: &[Term]) -> (Vec<Term>, Fact) {
        let mut sorted = vec![x.clone()];
        sorted.extend_from_slice(c);
        match c.split_first() {
            Some((first, rest)) if x > first => {
                let f1 = self.cr("cr.mul_left_comm", &[("x", x), ("y", first), ("z", &render_atoms(rest))]);
                let (d, f2) = self.insert_atom(x, rest);
                let refl = self.refl(first);
                let f3 = self.cong(Head::Mul, &[refl, f2]).expect("binary");
                let mut out = vec![first.clone()];
                out.extend(d);
                (out, self.trans_all(&[f1, f3]))
            }
            _ => {
                let t = render_atoms(&sorted);
                (sorted, self.refl(&t))
            }
        }
    }

    /// `a = b` for expanded terms without atoms other than variables and `i`.
    fn ring_core(&mut self, a: &Term, b: &Term) -> Result<Fact, ProverError> {
        let (pa, fa) = self.norm(a)?;
        let (pb, fb) = self.norm(b)?;
        debug_assert_eq!(pa, pb);
        let fb = self.sym(&fb);
        self.trans(&fa, &fb)
    }

    /// `a = b` by the commutative ring axioms, treating inverses, signs and conjugates as atoms.
    ///
    /// Atoms are replaced by fresh variables, the abstracted equation is normalized, and
    /// one substitution step puts the atoms back.
    pub fn ring(&mut self, a: &Term, b: &Term) -> Result<Fact, ProverError> {
        self.ring_opaque(a, b, &[])
    }

    /// Like `ring`, also treating the given subterms as atoms wherever they occur literally.
    pub fn ring_opaque(&mut self, a: &Term, b: &Term, opaque: &[Term]) -> Result<Fact, ProverError> {
        if a == b {
            return Ok(self.refl(a));
        }
        let ua = self.unfold(a);
        let ub = self.unfold(b);
        let (ea, eb) = (ua.rhs.clone(), ub.rhs.clone());
        let pa = poly_of(&ea);
        let pb = poly_of(&eb);
        if pa != pb {
            let mut diff = pa.clone();
            poly_add(&mut diff, &pb, -1);
            return fail(format!("`{a}` and `{b}` differ by `{}` as polynomials", poly_term(&diff)));
        }
        let mut used = ea.free_vars();
        used.extend(&eb.free_vars());
        let opaque: Vec<Term> = opaque.iter().map(|t| t.expand_derived()).collect();
        let mut abs = Abstraction { used, opaque, keys: HashMap::new(), reps: Vec::new() };
        let xa = abs.abstract_atoms(&ea);
        let xb = abs.abstract_atoms(&eb);
        let core = self.ring_core(&xa, &xb)?;
        let pairs: Vec<(&str, Term)> = abs.reps.iter().map(|(v, r)| (v.as_str(), r.clone())).collect();
        let inst = if pairs.is_empty() { core } else { self.subst(&core, &pairs) };
        let fa = self.align(&ea, &inst.lhs)?;
        let fb = self.align(&eb, &inst.rhs)?;
        let fb = self.sym(&fb);
        let ub = self.sym(&ub);
        self.chain(&[ua, fa, inst, fb, ub])
    }

    /// `e = target` where the two differ only in atoms with ring-equal arguments.
    fn align(&mut self, e: &Term, target: &Term) -> Result<Fact, ProverError> {
        if e == target {
            return Ok(self.refl(e));
        }
        let mut pairs = Vec::new();
        atom_variants(e, target, &mut pairs);
        let mut facts = Vec::with_capacity(pairs.len());
        for (v, r) in pairs {
            let inner = self.ring(v.children()[0], r.children()[0])?;
            facts.push(self.cong(v.head(), &[inner])?);
        }
        self.by(e, target, &facts)
    }

    /// `a = b` from `a - b = Σ c·(l - r)` over the given facts `l = r`.
    pub fn linear(&mut self, a: &Term, b: &Term, combo: &[(Term, Fact)]) -> Result<Fact, ProverError> {
        self.linear_opaque(a, b, combo, &[])
    }

    /// `linear` with the given subterms kept as atoms by the ring steps.
    pub fn linear_opaque(&mut self, a: &Term, b: &Term, combo: &[(Term, Fact)], opaque: &[Term]) -> Result<Fact, ProverError> {
        if combo.is_empty() {
            return self.ring_opaque(a, b, opaque);
        }
        let mut t1 = b.clone();
        let mut t2 = b.clone();
        for (c, h) in combo {
            t1 = term::add(t1, term::mul(c.clone(), term::sub(h.lhs.clone(), h.rhs.clone())));
            t2 = term::add(t2, term::mul(c.clone(), term::sub(h.rhs.clone(), h.rhs.clone())));
        }
        let f1 = self.ring_opaque(a, &t1, opaque)?;
        let f2 = self.cong_sum(b, combo)?;
        let f3 = self.ring_opaque(&t2, b, opaque)?;
        self.chain(&[f1, f2, f3])
    }

    fn cong_sum(&mut self, b: &Term, combo: &[(Term, Fact)]) -> Result<Fact, ProverError> {
        let mut acc = self.refl(b);
        for (c, h) in combo {
            let rr = self.refl(&h.rhs);
            let d = self.cong(Head::Sub, &[h.clone(), rr])?;
            let rc = self.refl(c);
            let m = self.cong(Head::Mul, &[rc, d])?;
            acc = self.cong(Head::Add, &[acc, m])?;
        }
        Ok(acc)
    }

    /// `a = b` by rewriting with the facts, each oriented left to right.
    /// Every fact's left side must be a single monomial as a polynomial.
    pub fn ring_hyps(&mut self, a: &Term, b: &Term, hyps: &[Fact]) -> Result<Fact, ProverError> {
        let mut rules = Vec::with_capacity(hyps.len());
        for h in hyps {
            let l = poly_of(&h.lhs.expand_derived());
            let r = poly_of(&h.rhs.expand_derived());
            if l.len() != 1 {
                return fail(format!("left side of `{} = {}` is not a monomial", h.lhs, h.rhs));
            }
            let (m, c) = l.iter().next().map(|(m, c)| (m.clone(), *c)).expect("one entry");
            let mut g = l.clone();
            poly_add(&mut g, &r, -1);
            rules.push((m, c, g));
        }
        let mut p = poly_of(&a.expand_derived());
        poly_add(&mut p, &poly_of(&b.expand_derived()), -1);
        let mut coefs: Vec<Poly> = vec![Poly::new(); hyps.len()];
        let mut steps = 0;
        'outer: while !p.is_empty() {
            steps += 1;
            if steps > REDUCTION_LIMIT {
                return fail("reduction does not terminate");
            }
            for (mono, d) in p.iter().rev() {
                for (j, (m, c, g)) in rules.iter().enumerate() {
                    if d % c != 0 {
                        continue;
                    }
                    if let Some(u) = divides(m, mono) {
                        let k = d / c;
                        let mut factor = Poly::new();
                        factor.insert(u, k);
                        poly_add(&mut p, &poly_mul(&factor, g), -1);
                        poly_add(&mut coefs[j], &factor, 1);
                        continue 'outer;
                    }
                }
            }
            return fail(format!("`{a} = {b}` leaves remainder `{}`", poly_term(&p)));
        }
        let combo: Vec<(Term, Fact)> = coefs
            .iter()
            .zip(hyps)
            .filter(|(c, _)| !c.is_empty())
            .map(|(c, h)| (poly_term(c), h.clone()))
            .collect();
        self.linear(a, b, &combo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse, Signature};

    fn t(s: &str) -> Term {
        parse(s, Signature::ComplexSignedMeadow).unwrap()
    }

    #[test]
    fn poly_sees_through_atoms() {
        assert_eq!(poly_of(&t("(x + y)^-1")), poly_of(&t("(y + x)^-1")));
        assert_ne!(poly_of(&t("x * x^-1")), poly_of(&t("1")));
        assert_eq!(poly_of(&t("(x + 1) * (x - 1)")), poly_of(&t("x * x - 1")));
        assert!(poly_of(&t("x - x")).is_empty());
    }

    #[test]
    fn poly_term_renders_equivalently() {
        for s in ["x * y - n(3) * x + 1", "-(x + y)^-1 * i", "0"] {
            let p = poly_of(&t(s).expand_derived());
            assert_eq!(poly_of(&poly_term(&p).expand_derived()), p);
        }
    }

    #[test]
    fn divisibility() {
        assert_eq!(divides(&[t("x")], &[t("x"), t("x"), t("y")]), Some(vec![t("x"), t("y")]));
        assert_eq!(divides(&[t("z")], &[t("x")]), None);
    }
}
