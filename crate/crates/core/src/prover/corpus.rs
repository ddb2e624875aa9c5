//! The shipped proof scripts.
//!
//! Scripts are built in dependency order; each may cite the goals of the
//! scripts before it through the `lemma` rule. The ring lemmas `cr.*` come
//! first and are proved by hand because the ring tactic depends on them.

use crate::term::{self, Signature, Term};

use super::tactic::{Fact, ProofBuilder};
use super::theory::scheme_var;
use super::{Library, LibraryEntry, ProofScript, ProverError, Statement, Theory};

#[derive(Clone, Debug)]
pub struct NamedScript {
    pub name: String,
    pub script: ProofScript,
}

fn t(s: &str) -> Term {
    term::parse(s, Signature::ComplexSignedMeadow).unwrap_or_else(|e| panic!("corpus term `{s}`: {e}"))
}

type Build<'b> = Box<dyn FnOnce(&mut ProofBuilder) -> Result<Fact, ProverError> + 'b>;

struct Corpus {
    lib: Library,
    scripts: Vec<NamedScript>,
}

impl Corpus {
    fn add_goal(&mut self, name: &str, theory: &str, goal: Statement, build: Build) {
        let theory: Theory = theory.parse().expect("corpus theory");
        let mut b = ProofBuilder::new(theory.clone(), &self.lib);
        let script = build(&mut b)
            .and_then(|last| b.finish(goal.clone(), &last))
            .unwrap_or_else(|e| panic!("corpus script {name}: {e}"));
        self.lib.push(LibraryEntry { name: name.to_string(), theory, goal });
        self.scripts.push(NamedScript { name: name.to_string(), script });
    }

    fn add(&mut self, name: &str, theory: &str, lhs: &str, rhs: &str, build: Build) {
        self.add_goal(name, theory, Statement::new(t(lhs), t(rhs)), build);
    }
}

/// All shipped scripts in dependency order.
pub fn corpus() -> Vec<NamedScript> {
    let mut c = Corpus { lib: Library::new(), scripts: Vec::new() };
    ring_lemmas(&mut c);
    meadow_identities(&mut c);
    pseudo_constants(&mut c);
    signs(&mut c);
    appendix(&mut c);
    complex(&mut c);
    c.scripts
}

fn x() -> Term {
    t("x")
}
fn y() -> Term {
    t("y")
}
fn z() -> Term {
    t("z")
}

// ---------------------------------------------------------------------------
// Commutative ring lemmas used by the ring tactic.

fn ring_lemmas(c: &mut Corpus) {
    c.add(
        "cr.add_zero_left",
        "CR",
        "0 + x",
        "x",
        Box::new(|b| {
            let f1 = b.axiom("CR2", &[("x", t("0")), ("y", x())])?;
            let f2 = b.axiom("CR3", &[("x", x())])?;
            b.trans(&f1, &f2)
        }),
    );
    c.add(
        "cr.add_left_comm",
        "CR",
        "x + (y + z)",
        "y + (x + z)",
        Box::new(|b| {
            let f1 = b.axiom("CR1", &[("x", x()), ("y", y()), ("z", z())])?;
            let f1 = b.sym(&f1);
            let comm = b.axiom("CR2", &[("x", x()), ("y", y())])?;
            let f2 = b.by(&t("(x + y) + z"), &t("(y + x) + z"), &[comm])?;
            let f3 = b.axiom("CR1", &[("x", y()), ("y", x()), ("z", z())])?;
            b.chain(&[f1, f2, f3])
        }),
    );
    c.add(
        "cr.add_neg_left",
        "CR",
        "-x + x",
        "0",
        Box::new(|b| {
            let f1 = b.axiom("CR2", &[("x", t("-x")), ("y", x())])?;
            let f2 = b.axiom("CR4", &[("x", x())])?;
            b.trans(&f1, &f2)
        }),
    );
    for (name, first, second, cancel) in [
        ("cr.add_cancel", "x", "-x", "CR4"),
        ("cr.add_cancel_neg", "-x", "x", "cr.add_neg_left"),
    ] {
        let lhs = format!("{first} + ({second} + y)");
        c.add(
            name,
            "CR",
            &lhs,
            "y",
            Box::new(move |b| {
                let f1 = b.axiom("CR1", &[("x", t(first)), ("y", t(second)), ("z", y())])?;
                let f1 = b.sym(&f1);
                let zero = if cancel == "CR4" { b.axiom("CR4", &[("x", x())])? } else { b.lemma(cancel, &[("x", x())])? };
                let f2 = b.by(&f1.rhs.clone(), &t("0 + y"), &[zero])?;
                let f3 = b.lemma("cr.add_zero_left", &[("x", y())])?;
                b.chain(&[f1, f2, f3])
            }),
        );
    }
    c.add(
        "cr.add_mul",
        "CR",
        "(x + y) * z",
        "x * z + y * z",
        Box::new(|b| {
            let f1 = b.axiom("CR6", &[("x", t("x + y")), ("y", z())])?;
            let f2 = b.axiom("CR8", &[("x", z()), ("y", x()), ("z", y())])?;
            let c1 = b.axiom("CR6", &[("x", z()), ("y", x())])?;
            let c2 = b.axiom("CR6", &[("x", z()), ("y", y())])?;
            let f3 = b.by(&t("z * x + z * y"), &t("x * z + y * z"), &[c1, c2])?;
            b.chain(&[f1, f2, f3])
        }),
    );
    c.add(
        "cr.zero_mul",
        "CR",
        "0 * x",
        "0",
        Box::new(|b| {
            let a = t("0 * x");
            let na = term::neg(a.clone());
            let f1 = b.axiom("CR3", &[("x", a.clone())])?;
            let f1 = b.sym(&f1);
            let cancel = b.axiom("CR4", &[("x", a.clone())])?;
            let f2 = b.by(&f1.rhs.clone(), &term::add(a.clone(), term::add(a.clone(), na.clone())), std::slice::from_ref(&cancel))?;
            let f3 = b.axiom("CR1", &[("x", a.clone()), ("y", a.clone()), ("z", na.clone())])?;
            let f3 = b.sym(&f3);
            let dist = b.lemma("cr.add_mul", &[("x", t("0")), ("y", t("0")), ("z", x())])?;
            let f4 = b.by(&f3.rhs.clone(), &term::add(t("(0 + 0) * x"), na.clone()), &[dist])?;
            let zz = b.axiom("CR3", &[("x", t("0"))])?;
            let f5 = b.by(&f4.rhs.clone(), &term::add(a.clone(), na), &[zz])?;
            b.chain(&[f1, f2, f3, f4, f5, cancel])
        }),
    );
    c.add(
        "cr.mul_zero",
        "CR",
        "x * 0",
        "0",
        Box::new(|b| {
            let f1 = b.axiom("CR6", &[("x", x()), ("y", t("0"))])?;
            let f2 = b.lemma("cr.zero_mul", &[("x", x())])?;
            b.trans(&f1, &f2)
        }),
    );
    c.add(
        "cr.neg_zero",
        "CR",
        "-0",
        "0",
        Box::new(|b| {
            let f1 = b.lemma("cr.add_zero_left", &[("x", t("-0"))])?;
            let f1 = b.sym(&f1);
            let f2 = b.axiom("CR4", &[("x", t("0"))])?;
            b.trans(&f1, &f2)
        }),
    );
    c.add(
        "cr.neg_mul",
        "CR",
        "-x * y",
        "-(x * y)",
        Box::new(|b| {
            let a = t("-x * y");
            let p = t("x * y");
            let np = term::neg(p.clone());
            let f1 = b.axiom("CR3", &[("x", a.clone())])?;
            let f1 = b.sym(&f1);
            let cancel = b.axiom("CR4", &[("x", p.clone())])?;
            let f2 = b.by(&f1.rhs.clone(), &term::add(a.clone(), term::add(p.clone(), np.clone())), &[cancel])?;
            let f3 = b.axiom("CR1", &[("x", a.clone()), ("y", p.clone()), ("z", np.clone())])?;
            let f3 = b.sym(&f3);
            let dist = b.lemma("cr.add_mul", &[("x", t("-x")), ("y", x()), ("z", y())])?;
            let f4 = b.by(&f3.rhs.clone(), &term::add(t("(-x + x) * y"), np.clone()), &[dist])?;
            let nl = b.lemma("cr.add_neg_left", &[("x", x())])?;
            let f5 = b.by(&f4.rhs.clone(), &term::add(t("0 * y"), np.clone()), &[nl])?;
            let zm = b.lemma("cr.zero_mul", &[("x", y())])?;
            let f6 = b.by(&f5.rhs.clone(), &term::add(t("0"), np.clone()), &[zm])?;
            let f7 = b.lemma("cr.add_zero_left", &[("x", np)])?;
            b.chain(&[f1, f2, f3, f4, f5, f6, f7])
        }),
    );
    c.add(
        "cr.mul_neg",
        "CR",
        "x * -y",
        "-(x * y)",
        Box::new(|b| {
            let f1 = b.axiom("CR6", &[("x", x()), ("y", t("-y"))])?;
            let f2 = b.lemma("cr.neg_mul", &[("x", y()), ("y", x())])?;
            let comm = b.axiom("CR6", &[("x", y()), ("y", x())])?;
            let f3 = b.by(&t("-(y * x)"), &t("-(x * y)"), &[comm])?;
            b.chain(&[f1, f2, f3])
        }),
    );
    c.add(
        "cr.neg_neg",
        "CR",
        "-(-x)",
        "x",
        Box::new(|b| {
            let a = t("-(-x)");
            let f1 = b.axiom("CR3", &[("x", a.clone())])?;
            let f1 = b.sym(&f1);
            let nl = b.lemma("cr.add_neg_left", &[("x", x())])?;
            let f2 = b.by(&f1.rhs.clone(), &term::add(a.clone(), t("-x + x")), &[nl])?;
            let f3 = b.axiom("CR1", &[("x", a.clone()), ("y", t("-x")), ("z", x())])?;
            let f3 = b.sym(&f3);
            let nl2 = b.lemma("cr.add_neg_left", &[("x", t("-x"))])?;
            let f4 = b.by(&f3.rhs.clone(), &t("0 + x"), &[nl2])?;
            let f5 = b.lemma("cr.add_zero_left", &[("x", x())])?;
            b.chain(&[f1, f2, f3, f4, f5])
        }),
    );
    c.add(
        "cr.neg_add",
        "CR",
        "-(x + y)",
        "-x + -y",
        Box::new(|b| {
            let s = t("x + y");
            let u = t("-x + -y");
            let g1 = b.axiom("CR1", &[("x", x()), ("y", y()), ("z", u.clone())])?;
            let lc = b.lemma("cr.add_left_comm", &[("x", y()), ("y", t("-x")), ("z", t("-y"))])?;
            let g2 = b.by(&g1.rhs.clone(), &t("x + (-x + (y + -y))"), &[lc])?;
            let c4 = b.axiom("CR4", &[("x", y())])?;
            let g3 = b.by(&g2.rhs.clone(), &t("x + (-x + 0)"), &[c4])?;
            let c3 = b.axiom("CR3", &[("x", t("-x"))])?;
            let g4 = b.by(&g3.rhs.clone(), &t("x + -x"), &[c3])?;
            let g5 = b.axiom("CR4", &[("x", x())])?;
            let sum_zero = b.chain(&[g1, g2, g3, g4, g5])?;
            let ns = term::neg(s.clone());
            let f1 = b.axiom("CR3", &[("x", ns.clone())])?;
            let f1 = b.sym(&f1);
            let f2 = b.by(&f1.rhs.clone(), &term::add(ns, term::add(s.clone(), u.clone())), &[sum_zero])?;
            let f3 = b.lemma("cr.add_cancel_neg", &[("x", s), ("y", u)])?;
            b.chain(&[f1, f2, f3])
        }),
    );
    c.add(
        "cr.mul_one",
        "CR",
        "x * 1",
        "x",
        Box::new(|b| {
            let f1 = b.axiom("CR6", &[("x", x()), ("y", t("1"))])?;
            let f2 = b.axiom("CR7", &[("x", x())])?;
            b.trans(&f1, &f2)
        }),
    );
    c.add(
        "cr.mul_left_comm",
        "CR",
        "x * (y * z)",
        "y * (x * z)",
        Box::new(|b| {
            let f1 = b.axiom("CR5", &[("x", x()), ("y", y()), ("z", z())])?;
            let f1 = b.sym(&f1);
            let comm = b.axiom("CR6", &[("x", x()), ("y", y())])?;
            let f2 = b.by(&t("(x * y) * z"), &t("(y * x) * z"), &[comm])?;
            let f3 = b.axiom("CR5", &[("x", y()), ("y", x()), ("z", z())])?;
            b.chain(&[f1, f2, f3])
        }),
    );
    c.add(
        "cr.square_of_sum",
        "CR",
        "(x + y)^2",
        "x^2 + n(2) * x * y + y^2",
        Box::new(|b| b.ring(&t("(x + y)^2"), &t("x^2 + n(2) * x * y + y^2"))),
    );
}

// ---------------------------------------------------------------------------
// Meadow identities.

/// `u^-1 = w` from `u*w*u = u` and `w*u*w = w`: a pseudo-inverse in a commutative ring is unique.
fn unique_inverse(b: &mut ProofBuilder, u: &Term, w: &Term, uwu: &Fact, wuw: &Fact) -> Result<Fact, ProverError> {
    let v = term::inv(u.clone());
    let ril_u = b.axiom("RIL", &[("x", u.clone())])?;
    let ril_v = b.axiom("RIL", &[("x", v.clone())])?;
    let inv_u = b.axiom("INV", &[("x", u.clone())])?;
    let uw1 = term::sub(term::mul(u.clone(), w.clone()), Term::One);
    let vv = term::mul(v.clone(), v.clone());
    b.linear_opaque(
        &v,
        w,
        &[
            (uw1.clone(), ril_v),
            (term::neg(term::mul(uw1, vv.clone())), inv_u),
            (term::neg(vv), uwu.clone()),
            (term::sub(Term::One, term::mul(u.clone(), v.clone())), wuw.clone()),
            (term::mul(w.clone(), w.clone()), ril_u),
        ],
        &[u.clone(), w.clone()],
    )
}

fn meadow_identities(c: &mut Corpus) {
    c.add("md.zero_mul", "Md", "0 * x", "0", Box::new(|b| b.ring(&t("0 * x"), &t("0"))));
    c.add("md.mul_neg", "Md", "x * -y", "-(x * y)", Box::new(|b| b.ring(&t("x * -y"), &t("-(x * y)"))));
    c.add("md.neg_neg", "Md", "-(-x)", "x", Box::new(|b| b.ring(&t("-(-x)"), &x())));
    c.add(
        "md.one_inverse",
        "Md",
        "1^-1",
        "1",
        Box::new(|b| {
            let ril = b.axiom("RIL", &[("x", t("1"))])?;
            b.ring_hyps(&t("1^-1"), &t("1"), &[ril])
        }),
    );
    c.add(
        "md.zero_inverse",
        "Md",
        "0^-1",
        "0",
        Box::new(|b| {
            let inv = b.axiom("INV", &[("x", t("0"))])?;
            let ril = b.axiom("RIL", &[("x", t("0^-1"))])?;
            let ril = b.sym(&ril);
            b.ring_hyps(&t("0^-1"), &t("0"), &[inv, ril])
        }),
    );
    c.add(
        "md.inv_ril",
        "Md",
        "x^-1 * x^-1 * x",
        "x^-1",
        Box::new(|b| {
            let ril = b.axiom("RIL", &[("x", t("x^-1"))])?;
            let inv = b.axiom("INV", &[("x", x())])?;
            let inv = b.sym(&inv);
            b.ring_hyps(&t("x^-1 * x^-1 * x"), &t("x^-1"), &[ril, inv])
        }),
    );
    c.add(
        "md.mul_inverse",
        "Md",
        "(x * y)^-1",
        "x^-1 * y^-1",
        Box::new(|b| {
            let (u, w) = (t("x * y"), t("x^-1 * y^-1"));
            let rx = b.axiom("RIL", &[("x", x())])?;
            let ry = b.axiom("RIL", &[("x", y())])?;
            let uwu = b.ring_hyps(&t("x * y * (x^-1 * y^-1) * (x * y)"), &u, &[rx, ry])?;
            let ix = b.lemma("md.inv_ril", &[("x", x())])?;
            let iy = b.lemma("md.inv_ril", &[("x", y())])?;
            let wuw = b.ring_hyps(&t("x^-1 * y^-1 * (x * y) * (x^-1 * y^-1)"), &w, &[ix, iy])?;
            unique_inverse(b, &u, &w, &uwu, &wuw)
        }),
    );
    c.add(
        "md.neg_inverse",
        "Md",
        "(-x)^-1",
        "-(x^-1)",
        Box::new(|b| {
            let (u, w) = (t("-x"), t("-(x^-1)"));
            let rx = b.axiom("RIL", &[("x", x())])?;
            let uwu = b.ring_hyps(&t("-x * -(x^-1) * -x"), &u, &[rx])?;
            let ix = b.lemma("md.inv_ril", &[("x", x())])?;
            let wuw = b.ring_hyps(&t("-(x^-1) * -x * -(x^-1)"), &w, &[ix])?;
            unique_inverse(b, &u, &w, &uwu, &wuw)
        }),
    );
}

// ---------------------------------------------------------------------------
// Pseudo constants.

fn pseudo_constants(c: &mut Corpus) {
    c.add("pc.zero_zero", "Md", "zero(0)", "1", Box::new(|b| b.ring(&t("zero(0)"), &t("1"))));
    c.add(
        "pc.one_one",
        "Md",
        "one(1)",
        "1",
        Box::new(|b| {
            let oi = b.lemma("md.one_inverse", &[])?;
            b.ring_hyps(&t("one(1)"), &t("1"), &[oi])
        }),
    );
    c.add("pc.sum", "Md", "zero(x) + one(x)", "1", Box::new(|b| b.ring(&t("zero(x) + one(x)"), &t("1"))));
    for (name, lhs, rhs) in [
        ("pc.pc1", "zero(x) * zero(x)", "zero(x)"),
        ("pc.pc3", "zero(x) * x", "0"),
        ("pc.pc5", "one(x) * one(x)", "one(x)"),
        ("pc.pc7", "one(x) * x", "x"),
    ] {
        c.add(
            name,
            "Md",
            lhs,
            rhs,
            Box::new(move |b| {
                let ril = b.axiom("RIL", &[("x", x())])?;
                b.ring_hyps(&t(lhs), &t(rhs), &[ril])
            }),
        );
    }
    for (name, lhs, rhs) in [("pc.pc2", "zero(x^2)", "zero(x)"), ("pc.pc6", "one(x^2)", "one(x)")] {
        c.add(
            name,
            "Md",
            lhs,
            rhs,
            Box::new(move |b| {
                let mi = b.lemma("md.mul_inverse", &[("x", x()), ("y", x())])?;
                let ril = b.axiom("RIL", &[("x", x())])?;
                b.ring_hyps(&t(lhs), &t(rhs), &[mi, ril])
            }),
        );
    }
    c.add(
        "pc.pc4",
        "Md",
        "zero(x) * zero(x + y)",
        "zero(x) * zero(y)",
        Box::new(|b| {
            // 0_x * (x + y) = 0_x * y
            let pc3 = b.lemma("pc.pc3", &[("x", x())])?;
            let a = b.linear(&t("zero(x) * (x + y)"), &t("zero(x) * y"), &[(t("1"), pc3)])?;
            // (0_x * (x + y))^-1 = (0_x * y)^-1, then split both inverses
            let ia = b.cong(term::Head::Inv, std::slice::from_ref(&a))?;
            let m1 = b.lemma("md.mul_inverse", &[("x", t("zero(x)")), ("y", t("x + y"))])?;
            let m1 = b.sym(&m1);
            let m2 = b.lemma("md.mul_inverse", &[("x", t("zero(x)")), ("y", y())])?;
            let cc = b.ring_hyps(&t("zero(x)^-1 * (x + y)^-1"), &t("zero(x)^-1 * y^-1"), &[m1, ia, m2])?;
            // 0_x * (x + y)^-1 = 0_x^2 * 0_x^-1 * (x + y)^-1 = 0_x * y^-1
            let ril = b.axiom("RIL", &[("x", t("zero(x)"))])?;
            let d = b.linear(
                &t("zero(x) * (x + y)^-1"),
                &t("zero(x) * y^-1"),
                &[(t("-((x + y)^-1 - y^-1)"), ril), (t("zero(x) * zero(x)"), cc)],
            )?;
            b.linear(&t("zero(x) * zero(x + y)"), &t("zero(x) * zero(y)"), &[(t("-(x + y)"), d), (t("-(y^-1)"), a)])
        }),
    );
    c.add(
        "pc.pc8",
        "Md",
        "one(x) * one(y)",
        "one(x * y)",
        Box::new(|b| {
            let mi = b.lemma("md.mul_inverse", &[("x", x()), ("y", y())])?;
            b.ring_hyps(&t("one(x) * one(y)"), &t("one(x * y)"), &[mi])
        }),
    );
}

// ---------------------------------------------------------------------------
// Consequences of the sign axioms.

/// `s(e) = e` for an idempotent `e`, given `e*e = e` and `e*e*e = e`.
fn sign_of_idempotent(b: &mut ProofBuilder, e: &Term, sq: &Fact, cube: &Fact) -> Result<Fact, ProverError> {
    let inv = unique_inverse(b, e, e, cube, cube)?;
    let one_e = term::one_of(e.clone());
    let one = b.linear_opaque(&one_e, e, &[(e.clone(), inv), (Term::One, sq.clone())], std::slice::from_ref(e))?;
    let s1 = b.axiom("S1", &[("x", e.clone())])?;
    let lift = b.cong(term::Head::Sign, std::slice::from_ref(&one))?;
    let lift = b.sym(&lift);
    b.chain(&[lift, s1, one])
}

fn signs(c: &mut Corpus) {
    c.add(
        "signs.s_zero",
        "Md+Signs",
        "s(0)",
        "0",
        Box::new(|b| {
            let e1 = b.ring(&t("one(0)"), &t("0"))?;
            let lift = b.cong(term::Head::Sign, std::slice::from_ref(&e1))?;
            let lift = b.sym(&lift);
            let s1 = b.axiom("S1", &[("x", t("0"))])?;
            b.chain(&[lift, s1, e1])
        }),
    );
    c.add(
        "signs.s_one",
        "Md+Signs",
        "s(1)",
        "1",
        Box::new(|b| {
            let e1 = b.lemma("pc.one_one", &[])?;
            let lift = b.cong(term::Head::Sign, std::slice::from_ref(&e1))?;
            let lift = b.sym(&lift);
            let s1 = b.axiom("S1", &[("x", t("1"))])?;
            b.chain(&[lift, s1, e1])
        }),
    );
    c.add(
        "signs.s_neg",
        "Md+Signs",
        "s(-x)",
        "-s(x)",
        Box::new(|b| {
            let e1 = b.ring(&t("-x"), &t("-1 * x"))?;
            let lift = b.cong(term::Head::Sign, &[e1])?;
            let s5 = b.axiom("S5", &[("x", t("-1")), ("y", x())])?;
            let s3 = b.axiom("S3", &[])?;
            let e3 = b.by(&t("s(-1) * s(x)"), &t("-1 * s(x)"), &[s3])?;
            let e4 = b.ring(&t("-1 * s(x)"), &t("-s(x)"))?;
            b.chain(&[lift, s5, e3, e4])
        }),
    );
    c.add(
        "signs.s9",
        "Md+Signs",
        "one(x) * s(x)",
        "s(x)",
        Box::new(|b| {
            let pc7 = b.lemma("pc.pc7", &[("x", x())])?;
            let pc7 = b.sym(&pc7);
            let lift = b.cong(term::Head::Sign, &[pc7])?;
            let s5 = b.axiom("S5", &[("x", t("one(x)")), ("y", x())])?;
            let s1 = b.axiom("S1", &[("x", x())])?;
            let e3 = b.by(&t("s(one(x)) * s(x)"), &t("one(x) * s(x)"), &[s1])?;
            let all = b.chain(&[lift, s5, e3])?;
            Ok(b.sym(&all))
        }),
    );
    c.add(
        "signs.sign_square",
        "Md+Signs",
        "s(x) * s(x)",
        "one(x)",
        Box::new(|b| {
            let s1 = b.axiom("S1", &[("x", x())])?;
            let e1 = b.sym(&s1);
            let r = b.refl(&t("s(one(x))"));
            let e2 = b.expand_to(&r, t("s(one(x))"), t("s(x * x^-1)"))?;
            let e3 = b.axiom("S5", &[("x", x()), ("y", t("x^-1"))])?;
            let s4 = b.axiom("S4", &[("x", x())])?;
            let e4 = b.by(&t("s(x) * s(x^-1)"), &t("s(x) * s(x)"), &[s4])?;
            let all = b.chain(&[e1, e2, e3, e4])?;
            Ok(b.sym(&all))
        }),
    );
    c.add(
        "signs.s7",
        "Md+Signs",
        "s(x^2)",
        "one(x)",
        Box::new(|b| {
            let r = b.refl(&t("s(x^2)"));
            let e1 = b.expand_to(&r, t("s(x^2)"), t("s(x * x)"))?;
            let e2 = b.axiom("S5", &[("x", x()), ("y", x())])?;
            let e3 = b.lemma("signs.sign_square", &[("x", x())])?;
            b.chain(&[e1, e2, e3])
        }),
    );
    c.add(
        "signs.s8",
        "Md+Signs",
        "s(x^3)",
        "s(x)",
        Box::new(|b| {
            let r = b.refl(&t("s(x^3)"));
            let e1 = b.expand_to(&r, t("s(x^3)"), t("s(x^2 * x)"))?;
            let e2 = b.axiom("S5", &[("x", t("x^2")), ("y", x())])?;
            let s7 = b.lemma("signs.s7", &[("x", x())])?;
            let e3 = b.by(&t("s(x^2) * s(x)"), &t("one(x) * s(x)"), &[s7])?;
            let e4 = b.lemma("signs.s9", &[("x", x())])?;
            b.chain(&[e1, e2, e3, e4])
        }),
    );
    c.add(
        "signs.sign_cube",
        "Md+Signs",
        "s(x) * s(x) * s(x)",
        "s(x)",
        Box::new(|b| {
            let sq = b.lemma("signs.sign_square", &[("x", x())])?;
            let s9 = b.lemma("signs.s9", &[("x", x())])?;
            b.ring_hyps(&t("s(x) * s(x) * s(x)"), &t("s(x)"), &[sq, s9])
        }),
    );
    c.add(
        "signs.s10",
        "Md+Signs",
        "s(x)^-1",
        "s(x)",
        Box::new(|b| {
            let cube = b.lemma("signs.sign_cube", &[("x", x())])?;
            unique_inverse(b, &t("s(x)"), &t("s(x)"), &cube, &cube)
        }),
    );
    c.add(
        "signs.two",
        "Md+Signs",
        "s(n(2))",
        "1",
        Box::new(|b| {
            let s6 = b.axiom("S6", &[("x", t("1")), ("y", t("1"))])?;
            let one = b.lemma("signs.s_one", &[])?;
            b.linear(&t("s(n(2))"), &t("1"), &[(t("1"), s6), (t("1"), one)])
        }),
    );
    c.add(
        "signs.c0_1",
        "Md+Signs",
        "one(n(2))",
        "1",
        Box::new(|b| {
            let s7 = b.lemma("signs.s7", &[("x", t("n(2)"))])?;
            let e1 = b.sym(&s7);
            let r = b.refl(&t("s(n(2)^2)"));
            let e2 = b.expand_to(&r, t("s(n(2)^2)"), t("s(n(2) * n(2))"))?;
            let e3 = b.axiom("S5", &[("x", t("n(2)")), ("y", t("n(2)"))])?;
            let two = b.lemma("signs.two", &[])?;
            let e4 = b.by(&t("s(n(2)) * s(n(2))"), &t("1 * 1"), &[two])?;
            let e5 = b.ring(&t("1 * 1"), &t("1"))?;
            b.chain(&[e1, e2, e3, e4, e5])
        }),
    );
    c.add(
        "signs.s11",
        "Md+Signs",
        "s(s(x))",
        "s(x)",
        Box::new(|b| {
            let a = t("s(x)");
            let sa = t("s(s(x))");
            let p = t("n(2)^-1 * (s(x) * s(x) + s(x))");
            let q = t("n(2)^-1 * (s(x) * s(x) - s(x))");
            let cube = b.lemma("signs.sign_cube", &[("x", x())])?;
            let sq = b.lemma("signs.sign_square", &[("x", x())])?;
            let two = b.lemma("signs.c0_1", &[])?;
            let rules = [cube.clone(), two.clone()];
            let idem = |b: &mut ProofBuilder, e: &Term| -> Result<Fact, ProverError> {
                let e2 = b.ring_hyps(&term::mul(e.clone(), e.clone()), e, &rules)?;
                let e3 = b.ring_hyps(&term::product_of([e.clone(), e.clone(), e.clone()]), e, &rules)?;
                sign_of_idempotent(b, e, &e2, &e3)
            };
            let sp = idem(b, &p)?;
            let sq_q = idem(b, &q)?;
            // s(-q) = -q
            let sn = b.lemma("signs.s_neg", &[("x", q.clone())])?;
            let sn2 = b.by(&sn.rhs.clone(), &term::neg(q.clone()), std::slice::from_ref(&sq_q))?;
            let s_negq = b.trans(&sn, &sn2)?;
            // a * p = p and a * -q = q
            let ap = b.ring_hyps(&term::mul(a.clone(), p.clone()), &p, std::slice::from_ref(&cube))?;
            let aq = b.ring_hyps(&term::mul(a.clone(), term::neg(q.clone())), &q, std::slice::from_ref(&cube))?;
            // s(a) * p = p
            let g1 = {
                let e1 = b.by(&term::mul(sa.clone(), p.clone()), &term::mul(sa.clone(), term::sign(p.clone())), std::slice::from_ref(&sp))?;
                let s5 = b.axiom("S5", &[("x", a.clone()), ("y", p.clone())])?;
                let e2 = b.sym(&s5);
                let e3 = b.cong(term::Head::Sign, &[ap])?;
                b.chain(&[e1, e2, e3, sp])?
            };
            // s(a) * -q = q
            let g2 = {
                let e1 = b.by(
                    &term::mul(sa.clone(), term::neg(q.clone())),
                    &term::mul(sa.clone(), term::sign(term::neg(q.clone()))),
                    &[s_negq],
                )?;
                let s5 = b.axiom("S5", &[("x", a.clone()), ("y", term::neg(q.clone()))])?;
                let e2 = b.sym(&s5);
                let e3 = b.cong(term::Head::Sign, &[aq])?;
                b.chain(&[e1, e2, e3, sq_q])?
            };
            // s(a) = one(x) * s(a)
            let g3 = {
                let s9 = b.lemma("signs.s9", &[("x", x())])?;
                let s9 = b.sym(&s9);
                let e1 = b.cong(term::Head::Sign, &[s9])?;
                let e2 = b.axiom("S5", &[("x", t("one(x)")), ("y", a.clone())])?;
                let s1 = b.axiom("S1", &[("x", x())])?;
                let e3 = b.by(&e2.rhs.clone(), &term::mul(t("one(x)"), sa.clone()), &[s1])?;
                b.chain(&[e1, e2, e3])?
            };
            let coef = term::sub(a.clone(), term::product_of([a.clone(), a.clone(), sa.clone()]));
            b.linear(&sa, &a, &[(t("1"), g3), (t("1"), g1), (t("-1"), g2), (term::neg(sa.clone()), sq), (coef, two)])
        }),
    );
}

// ---------------------------------------------------------------------------
// The syntactic proof of EFR_n from Md + Signs.

fn squares(vars: &[Term]) -> Term {
    term::sum_of(vars.iter().map(|v| term::pow(v.clone(), 2)))
}

fn xs(n: usize) -> Vec<Term> {
    (0..=n).map(scheme_var).collect()
}

fn appendix(c: &mut Corpus) {
    for n in 0..=3 {
        let vars = xs(n);
        let prod = term::product_of(vars.clone());
        let goal = Statement::new(term::mul(term::one_of(prod.clone()), term::sign(squares(&vars))), term::one_of(prod.clone()));
        let (vars2, prod2) = (vars.clone(), prod.clone());
        c.add_goal(
            &format!("appendix.dagger_{n}"),
            "Md+Signs",
            goal,
            Box::new(move |b| {
                let (vars, prod) = (vars2, prod2);
                let x0 = scheme_var(0);
                if n == 0 {
                    let s7 = b.lemma("signs.s7", &[("x", x0.clone())])?;
                    let lhs = term::mul(term::one_of(x0.clone()), term::sign(term::pow(x0.clone(), 2)));
                    let e1 = b.by(&lhs, &t("one(x0) * one(x0)"), &[s7])?;
                    let e2 = b.lemma("pc.pc5", &[("x", x0)])?;
                    return b.chain(&[e1, e2]);
                }
                let last = scheme_var(n);
                let q = term::product_of(vars[..n].to_vec());
                let a = squares(&vars[..n]);
                let sq_last = term::pow(last.clone(), 2);
                let one_p = term::one_of(prod.clone());
                let one_q = term::one_of(q.clone());
                let one_l = term::one_of(last.clone());
                let ih = b.lemma(&format!("appendix.dagger_{}", n - 1), &[])?;
                let pc8 = b.lemma("pc.pc8", &[("x", q.clone()), ("y", last.clone())])?;
                let opaque = [one_p.clone(), one_q.clone()];
                let h1 = b.linear_opaque(
                    &term::mul(one_p.clone(), term::sign(a.clone())),
                    &one_p,
                    &[(term::sub(Term::One, term::sign(a.clone())), pc8.clone()), (one_l.clone(), ih)],
                    &opaque,
                )?;
                let s7 = b.lemma("signs.s7", &[("x", last.clone())])?;
                let pc5 = b.lemma("pc.pc5", &[("x", last.clone())])?;
                let h2 = b.linear_opaque(
                    &term::mul(one_p.clone(), term::sign(sq_last.clone())),
                    &one_p,
                    &[(one_p.clone(), s7), (term::sub(Term::One, one_l), pc8), (one_q, pc5)],
                    &opaque,
                )?;
                let d = term::sub(term::sign(a.clone()), term::sign(sq_last.clone()));
                let h3 = b.linear_opaque(
                    &term::mul(one_p.clone(), term::zero_of(d.clone())),
                    &one_p,
                    &[(term::neg(term::inv(d.clone())), h1.clone()), (term::inv(d), h2)],
                    &opaque,
                )?;
                let s6 = b.axiom("S6", &[("x", a.clone()), ("y", sq_last)])?;
                let big = squares(&vars);
                let xdiff = term::sub(term::sign(big.clone()), term::sign(a));
                b.linear_opaque(
                    &term::mul(one_p.clone(), term::sign(big)),
                    &one_p,
                    &[(one_p.clone(), s6), (term::neg(xdiff), h3), (Term::One, h1)],
                    &opaque,
                )
            }),
        );
        let goal = Statement::new(term::mul(term::zero_of(squares(&vars)), term::one_of(prod.clone())), Term::Zero);
        c.add_goal(
            &format!("appendix.useful_{n}"),
            "Md+Signs",
            goal,
            Box::new(move |b| {
                let sum = squares(&vars);
                let z = term::zero_of(sum.clone());
                let one_p = term::one_of(prod.clone());
                let e1 = b.lemma("pc.pc3", &[("x", sum.clone())])?;
                let e2 = b.cong(term::Head::Sign, &[e1])?;
                let e3 = b.axiom("S5", &[("x", z.clone()), ("y", sum.clone())])?;
                let e4 = b.axiom("S2", &[("x", sum.clone())])?;
                let e5 = b.lemma("signs.s_zero", &[])?;
                let e6 = b.lemma(&format!("appendix.dagger_{n}"), &[])?;
                let z_opaque = z.clone();
                b.linear_opaque(
                    &term::mul(z.clone(), one_p.clone()),
                    &Term::Zero,
                    &[
                        (term::neg(z), e6),
                        (term::neg(term::mul(one_p.clone(), term::sign(sum))), e4),
                        (one_p.clone(), e5),
                        (one_p.clone(), e2),
                        (term::neg(one_p.clone()), e3),
                    ],
                    &[z_opaque, one_p],
                )
            }),
        );
    }
    for n in 0..=3 {
        let vars = xs(n);
        let goal = Statement::new(term::mul(term::zero_of(squares(&vars)), scheme_var(0)), Term::Zero);
        c.add_goal(
            &format!("appendix.efr_{n}"),
            "Md+Signs",
            goal.clone(),
            Box::new(move |b| {
                let x0 = scheme_var(0);
                if n == 0 {
                    let pc2 = b.lemma("pc.pc2", &[("x", x0.clone())])?;
                    let e1 = b.by(&goal.lhs, &t("zero(x0) * x0"), &[pc2])?;
                    let e2 = b.lemma("pc.pc3", &[("x", x0)])?;
                    return b.chain(&[e1, e2]);
                }
                let sum = squares(&vars);
                let zs = term::zero_of(sum.clone());
                // (‡): 0_Σ * 0_{x_i} * x0 = 0 for every i
                let mut ddag = Vec::new();
                for i in 0..=n {
                    let xi = scheme_var(i);
                    let lhs = term::product_of([zs.clone(), term::zero_of(xi.clone()), x0.clone()]);
                    let f = if i == 0 {
                        let pc3 = b.lemma("pc.pc3", &[("x", x0.clone())])?;
                        b.linear(&lhs, &Term::Zero, &[(zs.clone(), pc3)])?
                    } else {
                        let rest: Vec<Term> = vars.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| v.clone()).collect();
                        let r = squares(&rest);
                        let sq_i = term::pow(xi.clone(), 2);
                        let pc2 = b.lemma("pc.pc2", &[("x", xi.clone())])?;
                        let pc4 = b.lemma("pc.pc4", &[("x", sq_i.clone()), ("y", r)])?;
                        let renaming: Vec<(String, Term)> =
                            rest.iter().enumerate().map(|(k, v)| (format!("x{k}"), v.clone())).collect();
                        let renaming: Vec<(&str, Term)> = renaming.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
                        let ih = b.lemma(&format!("appendix.efr_{}", n - 1), &renaming)?;
                        b.linear(
                            &lhs,
                            &Term::Zero,
                            &[(term::neg(term::mul(zs.clone(), x0.clone())), pc2), (x0.clone(), pc4), (term::zero_of(sq_i), ih)],
                        )?
                    };
                    ddag.push(f);
                }
                // Π 1_{x_j} = 1_{x0 ⋯ xn}
                let mut pc8s = Vec::new();
                for k in 1..=n {
                    let pk = term::product_of(vars[..k].to_vec());
                    pc8s.push(b.lemma("pc.pc8", &[("x", pk), ("y", scheme_var(k))])?);
                }
                let ones = term::product_of(vars.iter().map(|v| term::one_of(v.clone())));
                let prod = term::product_of(vars.clone());
                let merged = b.ring_hyps(&ones, &term::one_of(prod), &pc8s)?;
                let useful = b.lemma(&format!("appendix.useful_{n}"), &[])?;
                let mut combo = Vec::new();
                for (i, f) in ddag.into_iter().enumerate() {
                    combo.push((term::product_of(vars[..i].iter().map(|v| term::one_of(v.clone()))), f));
                }
                combo.push((term::mul(x0.clone(), zs.clone()), merged));
                combo.push((x0, useful));
                let opaque = [zs, term::one_of(term::product_of(vars.clone()))];
                b.linear_opaque(&goal.lhs, &Term::Zero, &combo, &opaque)
            }),
        );
    }
    for n in 0..=3 {
        let vars = xs(n);
        let x0 = scheme_var(0);
        let goal = Statement::new(x0.clone(), term::mul(term::one_of(squares(&vars)), x0));
        c.add_goal(
            &format!("cefr.cefr_{n}"),
            "Md+EFR",
            goal.clone(),
            Box::new(move |b| {
                let efr = b.axiom_indexed("EFR", Some(n), &[])?;
                b.linear(&goal.lhs, &goal.rhs, &[(Term::One, efr)])
            }),
        );
    }
}

// ---------------------------------------------------------------------------
// Complex conjugation, real and imaginary parts.

const CX: &str = "Md+CC+SSAV";

fn complex(c: &mut Corpus) {
    c.add(
        "ssav.c0_1",
        CX,
        "one(n(2))",
        "1",
        Box::new(|b| {
            let e1 = b.axiom_indexed("SSAV", Some(0), &[("x0", t("1"))])?;
            let cc1 = b.axiom("CC1", &[])?;
            let e2 = b.ring_hyps(&t("1 + 1 * conj(1)"), &t("n(2)"), &[cc1])?;
            let e3 = b.cong(term::Head::PseudoOne, &[e2])?;
            let e3 = b.sym(&e3);
            b.chain(&[e3, e1])
        }),
    );
    c.add(
        "cc.half_conj",
        CX,
        "conj(n(2)^-1)",
        "n(2)^-1",
        Box::new(|b| {
            let e1 = b.axiom("CC6", &[("x", t("n(2)"))])?;
            let cc4 = b.axiom("CC4", &[("x", t("1")), ("y", t("1"))])?;
            let cc1 = b.axiom("CC1", &[])?;
            let e2 = b.ring_hyps(&t("conj(n(2))"), &t("n(2)"), &[cc4, cc1])?;
            let e3 = b.cong(term::Head::Inv, &[e2])?;
            b.chain(&[e1, e3])
        }),
    );
    c.add(
        "cc.norm",
        CX,
        "x * conj(x)",
        "re(x) * re(x) + im(x) * im(x)",
        Box::new(|b| {
            let cc8 = b.axiom("CC8", &[])?;
            let two = b.lemma("ssav.c0_1", &[])?;
            b.ring_hyps(&t("x * conj(x)"), &t("re(x) * re(x) + im(x) * im(x)"), &[cc8, two])
        }),
    );
    c.add(
        "cc.inv_form",
        CX,
        "x^-1",
        "(x * conj(x))^-1 * conj(x)",
        Box::new(|b| {
            let mi = b.lemma("md.mul_inverse", &[("x", x()), ("y", t("conj(x)"))])?;
            let cc9 = b.axiom("CC9", &[("x", x())])?;
            let ir = b.lemma("md.inv_ril", &[("x", x())])?;
            b.ring_hyps(&t("x^-1"), &t("(x * conj(x))^-1 * conj(x)"), &[mi, cc9, ir])
        }),
    );

    // Rows that follow by rewriting with conjugation axioms and ring algebra.
    type Hyps = fn(&mut ProofBuilder) -> Result<Vec<Fact>, ProverError>;
    fn ax(b: &mut ProofBuilder, name: &str, pairs: &[(&str, &str)]) -> Result<Fact, ProverError> {
        let pairs: Vec<(&str, Term)> = pairs.iter().map(|(v, s)| (*v, t(s))).collect();
        b.axiom(name, &pairs)
    }
    let rows: Vec<(&str, &str, &str, Hyps)> = vec![
        ("ri.ri0", "x", "re(x) + im(x) * i", |b| Ok(vec![ax(b, "CC8", &[])?, b.lemma("ssav.c0_1", &[])?])),
        ("ri.ri1", "re(x)", "conj(re(x))", |b| {
            Ok(vec![
                ax(b, "CC5", &[("x", "n(2)^-1"), ("y", "x + conj(x)")])?,
                b.lemma("cc.half_conj", &[])?,
                ax(b, "CC4", &[("x", "x"), ("y", "conj(x)")])?,
                ax(b, "CC7", &[("x", "x")])?,
            ])
        }),
        ("ri.ri2", "im(x)", "conj(im(x))", |b| {
            Ok(vec![
                ax(b, "CC5", &[("x", "-(i * n(2)^-1)"), ("y", "x - conj(x)")])?,
                ax(b, "CC3", &[("x", "i * n(2)^-1")])?,
                ax(b, "CC5", &[("x", "i"), ("y", "n(2)^-1")])?,
                ax(b, "CC2", &[])?,
                b.lemma("cc.half_conj", &[])?,
                ax(b, "CC4", &[("x", "x"), ("y", "-conj(x)")])?,
                ax(b, "CC3", &[("x", "conj(x)")])?,
                ax(b, "CC7", &[("x", "x")])?,
            ])
        }),
        ("ri.ri3", "re(re(x))", "re(x)", |b| {
            let r1 = b.lemma("ri.ri1", &[("x", x())])?;
            Ok(vec![b.sym(&r1), b.lemma("ssav.c0_1", &[])?])
        }),
        ("ri.ri4", "re(im(x))", "im(x)", |b| {
            let r2 = b.lemma("ri.ri2", &[("x", x())])?;
            Ok(vec![b.sym(&r2), b.lemma("ssav.c0_1", &[])?])
        }),
        ("ri.ri5", "im(re(x))", "0", |b| {
            let r1 = b.lemma("ri.ri1", &[("x", x())])?;
            Ok(vec![b.sym(&r1)])
        }),
        ("ri.ri6", "im(im(x))", "0", |b| {
            let r2 = b.lemma("ri.ri2", &[("x", x())])?;
            Ok(vec![b.sym(&r2)])
        }),
        ("ri.ri7", "re(0)", "0", |b| Ok(vec![ax(b, "CC0", &[])?])),
        ("ri.ri8", "re(1)", "1", |b| Ok(vec![ax(b, "CC1", &[])?, b.lemma("ssav.c0_1", &[])?])),
        ("ri.ri9", "re(i)", "0", |b| Ok(vec![ax(b, "CC2", &[])?])),
        ("ri.ri10", "re(-x)", "-re(x)", |b| Ok(vec![ax(b, "CC3", &[("x", "x")])?])),
        ("ri.ri11", "re(x + y)", "re(x) + re(y)", |b| Ok(vec![ax(b, "CC4", &[("x", "x"), ("y", "y")])?])),
        ("ri.ri12", "re(x * y)", "re(x) * re(y) - im(x) * im(y)", |b| {
            Ok(vec![ax(b, "CC5", &[("x", "x"), ("y", "y")])?, ax(b, "CC8", &[])?, b.lemma("ssav.c0_1", &[])?])
        }),
        ("ri.ri14", "re(conj(x))", "re(x)", |b| Ok(vec![ax(b, "CC7", &[("x", "x")])?])),
        ("ri.ri15", "im(0)", "0", |b| Ok(vec![ax(b, "CC0", &[])?])),
        ("ri.ri16", "im(1)", "0", |b| Ok(vec![ax(b, "CC1", &[])?])),
        ("ri.ri17", "im(i)", "1", |b| Ok(vec![ax(b, "CC2", &[])?, ax(b, "CC8", &[])?, b.lemma("ssav.c0_1", &[])?])),
        ("ri.ri18", "im(-x)", "-im(x)", |b| Ok(vec![ax(b, "CC3", &[("x", "x")])?])),
        ("ri.ri19", "im(x + y)", "im(x) + im(y)", |b| Ok(vec![ax(b, "CC4", &[("x", "x"), ("y", "y")])?])),
        ("ri.ri20", "im(x * y)", "re(x) * im(y) + im(x) * re(y)", |b| {
            Ok(vec![ax(b, "CC5", &[("x", "x"), ("y", "y")])?, b.lemma("ssav.c0_1", &[])?])
        }),
        ("ri.ri22", "im(conj(x))", "-im(x)", |b| Ok(vec![ax(b, "CC7", &[("x", "x")])?])),
    ];
    for (name, lhs, rhs, hyps) in rows {
        c.add(
            name,
            CX,
            lhs,
            rhs,
            Box::new(move |b| {
                let h = hyps(b)?;
                b.ring_hyps(&t(lhs), &t(rhs), &h)
            }),
        );
        if name == "ri.ri12" {
            inverse_rows(c);
        }
    }
    c.add(
        "signs_star.c0_1",
        "Md+CC+Signs*",
        "one(n(2))",
        "1",
        Box::new(|b| {
            let s1 = b.axiom("S1", &[("x", t("n(2)"))])?;
            let e1 = b.sym(&s1);
            let cc1 = b.axiom("CC1", &[])?;
            let e2 = b.ring_hyps(&t("one(n(2))"), &t("re(1)"), &[cc1])?;
            let e3 = b.cong(term::Head::Sign, &[e2])?;
            let s7 = b.axiom("S*7", &[("x", t("1"))])?;
            let e4 = b.sym(&s7);
            let oo = b.lemma("pc.one_one", &[])?;
            let back = b.sym(&oo);
            let e5 = b.cong(term::Head::Sign, &[back])?;
            let e6 = b.axiom("S1", &[("x", t("1"))])?;
            b.chain(&[e1, e3, e4, e5, e6, oo])
        }),
    );
}

/// RI13 and RI21 through `t^-1 = (t * conj(t))^-1 * conj(t)`.
fn inverse_rows(c: &mut Corpus) {
    for (name, lhs, rhs) in [
        ("ri.ri13", "re(x^-1)", "re(x) * (re(x) * re(x) + im(x) * im(x))^-1"),
        ("ri.ri21", "im(x^-1)", "-im(x) * (re(x) * re(x) + im(x) * im(x))^-1"),
    ] {
        c.add(
            name,
            CX,
            lhs,
            rhs,
            Box::new(move |b| {
                let norm_x = b.lemma("cc.norm", &[("x", x())])?;
                let cc6 = b.axiom("CC6", &[("x", x())])?;
                let f1 = b.lemma("cc.inv_form", &[("x", x())])?;
                let f2 = b.lemma("cc.inv_form", &[("x", t("conj(x)"))])?;
                let cc7 = b.axiom("CC7", &[("x", x())])?;
                let f3 = b.cong(term::Head::Inv, std::slice::from_ref(&norm_x))?;
                let conj_norm = b.ring_hyps(&t("conj(x) * conj(conj(x))"), &norm_x.rhs.clone(), &[cc7.clone(), norm_x])?;
                let f4 = b.cong(term::Head::Inv, &[conj_norm])?;
                b.ring_hyps(&t(lhs), &t(rhs), &[cc6, f1, f2, cc7, f3, f4])
            }),
        );
    }
}
