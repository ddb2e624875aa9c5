use meadow::prover::*;
use meadow::term::{parse, Signature};

#[test]
fn corpus_audit_passes() {
    let reports = audit_corpus(&AuditConfig::default());
    assert!(reports.len() >= 40);
    for r in &reports {
        assert!(r.verdict.is_valid(), "{}: {}", r.name, r.verdict);
        assert!(r.semantic.is_ok(), "{}: {:?}", r.name, r.semantic);
        assert_eq!(r.mutants_rejected, r.mutants, "{}", r.name);
    }
}

#[test]
fn shipped_lemmas_hold_in_finite_prime_fields() {
    // Md-only lemmas hold in every squarefree Z/n.
    for s in corpus().iter().filter(|s| s.script.theory.to_string() == "Md") {
        for n in [2u64, 3, 5, 6, 7] {
            let m = meadow::semantics::Model::Zmod(n);
            assert!(cross_check(&s.script.goal, &m, 20, 3).is_ok(), "{} in Z/{n}", s.name);
        }
    }
}

#[test]
fn json_round_trip_of_corpus_scripts() {
    for s in corpus().iter().filter(|s| s.script.steps.len() < 300) {
        let back = ProofScript::from_json(&s.script.to_json()).unwrap();
        assert_eq!(back, s.script, "{}", s.name);
        assert!(check_proof(&back).is_valid());
    }
}

#[test]
fn false_goal_is_rejected() {
    let th: Theory = "Md".parse().unwrap();
    let lib = Library::new();
    let mut b = ProofBuilder::new(th, &lib);
    let t = |s| parse(s, Signature::Meadow).unwrap();
    assert!(b.ring(&t("x * x^-1"), &t("1")).is_err());
    let f = b.axiom("RIL", &[("x", t("x"))]).unwrap();
    assert!(b.finish(Statement::new(t("x * x^-1"), t("1")), &f).is_err());
}
