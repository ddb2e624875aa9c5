//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::time::{Duration, Instant};

use meadow::decide::{decide, decide_complex, split_complex, Outcome};
use meadow::fo_logic::{translate_phi, translate_psi};
use meadow::gen::{random_term, GenConfig};
use meadow::model_lab::{classify_range, zmod_meadow, Construction, Impossibility};
use meadow::normal_forms::{to_smf, to_ssmf};
use meadow::prover::{audit_corpus, corpus, cross_check, reference_model, AuditConfig, Scheme, Statement, Theory};
use meadow::semantics::{
    eval_formula, format_assignment, random_assignment, sample_rng, structured_assignments, Assignment, MeadowValue, Model,
    Rat, SampleConfig, ZmodVal,
};
use meadow::term::{parse, Signature, Term};

const SEED: u64 = 0;

type Outcomes = Result<String, String>;

fn t(s: &str) -> Term {
    parse(s, Signature::ComplexSignedMeadow).unwrap()
}

fn vars(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("x{k}")).collect()
}

/// Every axiom and every table identity, in its reference model, at 200 random points plus the structured ones.
fn axiom_soundness() -> Outcomes {
    let mut checks: Vec<(String, Statement, Model)> = Vec::new();
    for scheme in Scheme::ALL {
        let theory = Theory::new([Scheme::Md, scheme], 8);
        let mut models = vec![reference_model(&theory)];
        if matches!(scheme, Scheme::CR | Scheme::Md) {
            models.push(Model::c0());
        }
        for (name, indexed) in theory.axiom_names() {
            let indices: Vec<Option<usize>> = if indexed { (0..=8).map(Some).collect() } else { vec![None] };
            for idx in indices {
                let ax = theory.axiom(name, idx).unwrap();
                for m in &models {
                    let label = idx.map_or(name.to_string(), |k| format!("{name}{k}"));
                    checks.push((label, ax.clone(), *m));
                }
            }
        }
    }
    for s in corpus() {
        if ["pc.", "ri.", "signs.", "md."].iter().any(|p| s.name.starts_with(p)) {
            checks.push((s.name.clone(), s.script.goal.clone(), reference_model(&s.script.theory)));
        }
    }
    let mut failures = Vec::new();
    for (k, (name, st, m)) in checks.iter().enumerate() {
        if let Err(e) = cross_check(st, m, 200, SEED ^ k as u64) {
            failures.push(format!("{name} in {m}: {e}"));
        }
    }
    if failures.is_empty() {
        Ok(format!("identities={} samples=200 failures=0", checks.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn formal_realness() -> Outcomes {
    let efr = Theory::new([Scheme::Md, Scheme::EFR], 4);
    for n in 0..=4 {
        let ax = efr.axiom("EFR", Some(n)).unwrap();
        let v = decide(&ax.lhs, &ax.rhs, &Model::Q0, 1000, SEED).unwrap();
        if !(v.is_proved() || v.is_probable_valid()) || (v.is_probable_valid() && v.samples < 1000) {
            return Err(format!("EFR{n} over q0: {v}"));
        }
    }
    let ax = efr.axiom("EFR", Some(1)).unwrap();
    let v = decide(&ax.lhs, &ax.rhs, &Model::c0(), 1000, SEED).unwrap();
    let Outcome::Refuted { witness, lhs, .. } = &v.outcome else { return Err(format!("EFR1 over c0: {v}")) };
    let expected = format_assignment(witness);
    if expected != "x0=1,x1=i" || lhs.to_string() != "1" || v.samples > 200 {
        return Err(format!("EFR1 over c0: {v} lhs={lhs}"));
    }
    if Model::c0().eval(&ax.lhs, witness).unwrap().to_string() != "1" {
        return Err("EFR1 witness does not re-evaluate to 1".into());
    }
    Ok(format!("efr_q0=0..4 efr1_c0_witness={expected} lhs={lhs} samples={}", v.samples))
}

/// Structured points, then random points with some variables forced to zero.
fn oracle_points(k: u64, count: u64) -> Vec<Assignment> {
    let vs = vars(4);
    let mut pts = structured_assignments(&Model::Q0, &vs);
    let cfg = SampleConfig { magnitude: 10 };
    let mut i = 0;
    while (pts.len() as u64) < count {
        let mut a = random_assignment(&Model::Q0, &vs, k, i, &cfg);
        for (j, v) in vs.iter().enumerate() {
            if (i >> (2 * j)) & 3 == 0 {
                a.insert(v.clone(), MeadowValue::Rat(Rat::zero()));
            }
        }
        pts.push(a);
        i += 1;
    }
    pts
}

fn smf_oracle() -> Outcomes {
    let mut rng = sample_rng(SEED, 3);
    let cfg = GenConfig::meadow(40, 4);
    let mut zmod_terms = 0;
    for k in 0..1000u64 {
        let term = random_term(&mut rng, &cfg);
        let den = to_smf(&term).map_err(|e| format!("{term}: {e}"))?.denotation();
        for a in oracle_points(k, 100) {
            if Model::Q0.eval(&term, &a).unwrap() != Model::Q0.eval(&den, &a).unwrap() {
                return Err(format!("{term} at {}", format_assignment(&a)));
            }
        }
        let vs = term.free_vars().to_vec();
        if vs.len() <= 2 {
            zmod_terms += 1;
            for code in 0..10u64.pow(vs.len() as u32) {
                let a: Assignment = vs
                    .iter()
                    .enumerate()
                    .map(|(p, v)| (v.clone(), MeadowValue::Zmod(ZmodVal::new(10, ((code / 10u64.pow(p as u32)) % 10) as i128))))
                    .collect();
                let m = Model::Zmod(10);
                if m.eval(&term, &a).unwrap() != m.eval(&den, &a).unwrap() {
                    return Err(format!("{term} over zmod:10 at {}", format_assignment(&a)));
                }
            }
        }
    }
    let cfg = GenConfig::meadow(40, 4).with_sign();
    for k in 0..500u64 {
        let term = random_term(&mut rng, &cfg);
        let den = to_ssmf(&term).map_err(|e| format!("{term}: {e}"))?.denotation();
        for a in oracle_points(5000 + k, 100) {
            if Model::Q0.eval(&term, &a).unwrap() != Model::Q0.eval(&den, &a).unwrap() {
                return Err(format!("signed {term} at {}", format_assignment(&a)));
            }
        }
    }
    Ok(format!("smf_terms=1000 points=100 zmod10_terms={zmod_terms} ssmf_terms=500 mismatches=0"))
}

fn translation_agreement() -> Outcomes {
    let mut rng = sample_rng(SEED, 4);
    let vs = vars(3);
    let cfg = GenConfig::meadow(12, 3);
    let mut equal = 0;
    for k in 0..300u64 {
        let s = random_term(&mut rng, &cfg);
        let u = if k % 3 == 0 { s.clone() } else { random_term(&mut rng, &cfg) };
        let f = translate_phi(&to_smf(&s).unwrap(), &to_smf(&u).unwrap()).map_err(|e| e.to_string())?;
        for m in [Model::Q0, Model::c0()] {
            for i in 0..50 {
                let a = random_assignment(&m, &vs, k, i, &SampleConfig { magnitude: 2 });
                let holds = m.eval(&s, &a).unwrap() == m.eval(&u, &a).unwrap();
                equal += holds as u32;
                if holds != eval_formula(&f, &a, &m).unwrap() {
                    return Err(format!("phi: {s} = {u} in {m} at {}", format_assignment(&a)));
                }
            }
        }
    }
    let cfg = GenConfig::meadow(12, 3).with_sign().without_inverse();
    let mut psi_equal = 0;
    for k in 0..300u64 {
        let s = random_term(&mut rng, &cfg);
        let u = if k % 3 == 0 { s.clone() } else { random_term(&mut rng, &cfg) };
        let f = translate_psi(&s, &u).map_err(|e| e.to_string())?;
        for i in 0..50 {
            let a = random_assignment(&Model::Q0, &vs, 1000 + k, i, &SampleConfig { magnitude: 2 });
            let holds = Model::Q0.eval(&s, &a).unwrap() == Model::Q0.eval(&u, &a).unwrap();
            psi_equal += holds as u32;
            if holds != eval_formula(&f, &a, &Model::Q0).unwrap() {
                return Err(format!("psi: {s} = {u} at {}", format_assignment(&a)));
            }
        }
    }
    Ok(format!("phi_pairs=300 phi_true={equal}/30000 psi_pairs=300 psi_true={psi_equal}/15000 mismatches=0"))
}

const REQUIRED_SCRIPTS: &[&str] = &[
    "md.zero_mul", "md.mul_neg", "md.neg_neg", "md.one_inverse", "md.zero_inverse", "md.inv_ril", "md.mul_inverse",
    "md.neg_inverse", "pc.pc1", "pc.pc2", "pc.pc3", "pc.pc4", "pc.pc5", "pc.pc6", "pc.pc7", "pc.pc8", "signs.s7",
    "signs.s8", "signs.s9", "signs.s10", "signs.s11", "appendix.useful_0", "appendix.useful_1", "appendix.useful_2",
    "appendix.useful_3", "appendix.efr_0", "appendix.efr_1", "appendix.efr_2", "appendix.efr_3", "ri.ri0", "ri.ri1",
    "ri.ri2", "ri.ri13", "ri.ri21", "signs_star.c0_1",
];

fn proof_corpus() -> Outcomes {
    let start = Instant::now();
    let reports = audit_corpus(&AuditConfig { mutations: 20, samples: 100, seed: SEED });
    let elapsed = start.elapsed();
    if reports.len() < 40 {
        return Err(format!("only {} scripts", reports.len()));
    }
    for name in REQUIRED_SCRIPTS {
        if !reports.iter().any(|r| r.name == *name) {
            return Err(format!("missing script {name}"));
        }
    }
    let failed: Vec<String> = reports.iter().filter(|r| !r.passed()).map(|r| r.name.clone()).collect();
    if !failed.is_empty() {
        return Err(format!("failing scripts: {}", failed.join(", ")));
    }
    if elapsed > Duration::from_secs(30) {
        return Err(format!("audit took {elapsed:?}"));
    }
    let mutants: usize = reports.iter().map(|r| r.mutants_rejected).sum();
    Ok(format!("scripts={} valid={} mutants_rejected={mutants}", reports.len(), reports.len()))
}

fn squarefree(n: u64) -> bool {
    (2..=n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d * d))
}

fn finite_models() -> Outcomes {
    let start = Instant::now();
    let rows = classify_range(50);
    for r in &rows {
        if r.is_meadow() != squarefree(r.n) {
            return Err(format!("n={} classified {}", r.n, r.is_meadow()));
        }
    }
    let z10 = zmod_meadow(10).unwrap();
    let m = z10.meadow().ok_or("Z/10 is not a meadow")?;
    if m.cancellation || m.zero_divisors != Some((2, 5)) {
        return Err(format!("Z/10: cancellation={} witness={:?}", m.cancellation, m.zero_divisors));
    }
    if zmod_meadow(4).unwrap() != Construction::Impossible(Impossibility::NoCandidate { x: 2 }) {
        return Err("Z/4 does not report witness 2".into());
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        return Err(format!("classification took {elapsed:?}"));
    }
    let meadows = rows.iter().filter(|r| r.is_meadow()).count();
    Ok(format!("n<=50 meadows={meadows} z10_zero_divisors=2,5 z4_witness=2"))
}

/// Rows `re(t) = r` / `im(t) = r` must come out of `split_complex(t)` verbatim; RI0-RI2 must split both sides alike.
fn complex_pipeline() -> Outcomes {
    let ri = corpus().into_iter().filter(|s| s.name.starts_with("ri.")).collect::<Vec<_>>();
    if ri.len() != 23 {
        return Err(format!("{} RI rows", ri.len()));
    }
    for s in &ri {
        let g = &s.script.goal;
        let both_sides = ["ri.ri0", "ri.ri1", "ri.ri2"].contains(&s.name.as_str());
        let ok = match &g.lhs {
            Term::Re(a) if !both_sides => split_complex(a).map(|p| p.0 == g.rhs),
            Term::Im(a) if !both_sides => split_complex(a).map(|p| p.1 == g.rhs),
            _ => split_complex(&g.lhs).and_then(|l| split_complex(&g.rhs).map(|r| l == r)),
        };
        if ok != Ok(true) {
            return Err(format!("{}: {} = {} not reproduced", s.name, g.lhs, g.rhs));
        }
        cross_check(g, &Model::c0(), 100, SEED).map_err(|e| format!("{}: {e}", s.name))?;
    }
    for (s, u) in [("conj(conj(x))", "x"), ("i * i", "-1")] {
        let v = decide_complex(&t(s), &t(u), 1000, SEED).unwrap();
        if !v.is_proved() {
            return Err(format!("{s} = {u}: {v}"));
        }
    }
    let v = decide_complex(&t("conj(x)"), &t("x"), 1000, SEED).unwrap();
    let w = v.witness().ok_or_else(|| format!("conj(x) = x: {v}"))?;
    if Model::c0().eval(&t("conj(x)"), w).unwrap() == Model::c0().eval(&t("x"), w).unwrap() {
        return Err("conj(x) = x witness does not re-verify".into());
    }
    Ok(format!("ri_rows=23 cc7=proved cc8=proved conj_witness={}", format_assignment(w)))
}

fn cli_lines() -> String {
    let runs: [&[&str]; 4] = [
        &["meadow", "decide", "--model", "c0", "zero(x^2 + y^2)*x", "0"],
        &["meadow", "decide", "zero(x0^2 + x1^2 + x2^2)*x0 = 0"],
        &["meadow", "refute", "--budget", "10", "(x+y)^2", "x^2+y^2"],
        &["meadow", "modelcheck", "--max-n", "50"],
    ];
    let mut all = String::new();
    for args in runs {
        let mut out = Vec::new();
        let code = meadow_cli::run(args.iter().copied(), &mut out, &mut Vec::new());
        all += &format!("exit={code}\n{}", String::from_utf8(out).unwrap());
    }
    all
}

type Criterion = (&'static str, fn() -> Outcomes);

const CRITERIA: [Criterion; 7] = [
    ("axiom soundness sweep", axiom_soundness),
    ("formal-realness split", formal_realness),
    ("SMF/SSMF oracle equivalence", smf_oracle),
    ("translation agreement", translation_agreement),
    ("proof corpus", proof_corpus),
    ("finite-model classification", finite_models),
    ("complex pipeline", complex_pipeline),
];

fn report(k: usize, name: &str, res: &Outcomes, elapsed: Duration) -> bool {
    match res {
        Ok(detail) => println!("criterion {k} PASS {name}: {detail} ({:.1}s)", elapsed.as_secs_f64()),
        Err(e) => println!("criterion {k} FAIL {name}: {e} ({:.1}s)", elapsed.as_secs_f64()),
    }
    res.is_ok()
}

fn main() {
    let mut first = Vec::new();
    let mut all_ok = true;
    for (k, (name, run)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let res = run();
        all_ok &= report(k + 1, name, &res, start.elapsed());
        first.push(res);
    }

    let start = Instant::now();
    let mut diffs = Vec::new();
    for (k, (_, run)) in CRITERIA.iter().enumerate() {
        if run() != first[k] {
            diffs.push(format!("criterion {}", k + 1));
        }
    }
    if cli_lines() != cli_lines() {
        diffs.push("cli output".into());
    }
    let det = if diffs.is_empty() {
        Ok("criteria 1-7 and cli output repeat byte-identically".to_string())
    } else {
        Err(format!("output differs on rerun: {}", diffs.join(", ")))
    };
    all_ok &= report(8, "determinism", &det, start.elapsed());

    if !all_ok {
        std::process::exit(1);
    }
}
