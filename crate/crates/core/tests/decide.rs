mod common;

use common::{term_strategy, RING, SIGNED};
use meadow::decide::{decide, decide_complex, refute, split_complex, Outcome};
use meadow::gen::{random_term, GenConfig};
use meadow::normal_forms::{canon_poly, pseudo_simplify, to_smf};
use meadow::prover::{reference_model, Scheme, Theory};
use meadow::semantics::{eval_c0, random_assignment, sample_rng, GaussRat, MeadowValue, Model, SampleConfig};
use meadow::term::{parse, Signature, Term};
use proptest::prelude::*;

fn t(s: &str) -> Term {
    parse(s, Signature::ComplexSignedMeadow).unwrap()
}

#[test]
fn refutation_witnesses_reverify() {
    let mut rng = sample_rng(31, 0);
    let cases = [
        (Model::Q0, GenConfig::meadow(10, 2).with_sign()),
        (Model::c0(), GenConfig::meadow(10, 2).with_complex()),
        (Model::Zmod(6), GenConfig::meadow(10, 2)),
    ];
    let mut refuted = 0;
    for k in 0..500 {
        let (model, cfg) = &cases[k % cases.len()];
        let s = random_term(&mut rng, cfg);
        let u = random_term(&mut rng, cfg);
        let v = decide(&s, &u, model, 30, k as u64).unwrap();
        if let Outcome::Refuted { witness, lhs, rhs } = &v.outcome {
            refuted += 1;
            assert_eq!(&model.eval(&s, witness).unwrap(), lhs);
            assert_eq!(&model.eval(&u, witness).unwrap(), rhs);
            assert_ne!(lhs, rhs);
        }
        if let Some(w) = refute(&s, &u, model, 30, k as u64).unwrap() {
            assert_ne!(model.eval(&s, &w).unwrap(), model.eval(&u, &w).unwrap());
        }
    }
    assert!(refuted > 250, "only {refuted} refutations");
}

#[test]
fn proved_equations_hold_at_fresh_points() {
    let mut rng = sample_rng(32, 0);
    let cfg = GenConfig::meadow(14, 3);
    let vars: Vec<String> = (0..3).map(|k| format!("x{k}")).collect();
    let mut proved = 0;
    for k in 0..100u64 {
        let s = random_term(&mut rng, &cfg);
        let rhs = match k % 3 {
            0 => to_smf(&s).unwrap().denotation(),
            1 => pseudo_simplify(&s.expand_derived()),
            _ => random_term(&mut rng, &cfg),
        };
        let v = decide(&s, &rhs, &Model::Q0, 20, k).unwrap();
        if v.is_proved() {
            proved += 1;
            for i in 0..1000 {
                let a = random_assignment(&Model::Q0, &vars, 1000 + k, i, &SampleConfig::default());
                assert_eq!(Model::Q0.eval(&s, &a).unwrap(), Model::Q0.eval(&rhs, &a).unwrap(), "{s} = {rhs}");
            }
        }
    }
    assert!(proved >= 60, "only {proved} proved");
}

#[test]
fn axioms_are_valid_in_their_reference_models() {
    for scheme in Scheme::ALL {
        let theory = Theory::new([Scheme::Md, scheme], 4);
        let mut models = vec![reference_model(&theory)];
        if scheme == Scheme::Md || scheme == Scheme::CR {
            models.push(Model::c0());
            models.push(Model::Zmod(30));
        }
        for (name, indexed) in theory.axiom_names() {
            let indices: Vec<Option<usize>> = if indexed { (0..=4).map(Some).collect() } else { vec![None] };
            for idx in indices {
                let ax = theory.axiom(name, idx).unwrap();
                for m in &models {
                    let v = decide(&ax.lhs, &ax.rhs, m, 200, 1).unwrap();
                    assert!(v.is_proved() || v.is_probable_valid(), "{name} {idx:?} in {m}: {v}");
                }
            }
        }
    }
}

#[test]
fn invalid_equations_are_refuted() {
    let cases = [
        ("x * x^-1", "1", Model::Q0),
        ("zero(x0^2 + x1^2) * x0", "0", Model::c0()),
        ("one(x + y)", "one(x) * one(y)", Model::Q0),
        ("s(x + y)", "s(x) + s(y)", Model::Q0),
        ("conj(x)", "x", Model::c0()),
        ("one(n(2))", "1", Model::Zmod(10)),
        ("(x + y)^2", "x^2 + y^2", Model::Q0),
    ];
    for (s, u, m) in cases {
        let v = decide(&t(s), &t(u), &m, 1000, 0).unwrap();
        assert!(v.is_refuted(), "{s} = {u} in {m}: {v}");
    }
}

#[test]
fn split_complex_matches_evaluation() {
    let mut rng = sample_rng(33, 0);
    let cfg = GenConfig::meadow(8, 2).with_complex();
    let vars = ["x0".to_string(), "x1".to_string()];
    for k in 0..200u64 {
        let u = random_term(&mut rng, &cfg);
        let (re, im) = split_complex(&u).unwrap();
        for i in 0..10 {
            let a = random_assignment(&Model::c0(), &vars, k, i, &SampleConfig { magnitude: 4 });
            let v = eval_c0(&u, &a).unwrap();
            assert_eq!(eval_c0(&re, &a).unwrap(), GaussRat::real(v.re.clone()), "{u}");
            assert_eq!(eval_c0(&im, &a).unwrap(), GaussRat::real(v.im.clone()), "{u}");
        }
    }
}

#[test]
fn complex_decisions() {
    for (s, u) in [("conj(conj(x))", "x"), ("i * i", "-1"), ("conj(x * y)", "conj(x) * conj(y)"), ("one(conj(x))", "one(x)")] {
        let v = decide_complex(&t(s), &t(u), 200, 0).unwrap();
        assert!(v.is_proved() || v.is_probable_valid(), "{s} = {u}: {v}");
    }
    let v = decide_complex(&t("conj(x)"), &t("x"), 200, 0).unwrap();
    let w = v.witness().unwrap();
    let MeadowValue::Gauss(x) = &w["x"] else { panic!() };
    assert!(!x.im.is_zero());
    assert_ne!(eval_c0(&t("conj(x)"), w).unwrap(), eval_c0(&t("x"), w).unwrap());
    assert!(decide_complex(&t("x * x"), &t("x"), 200, 0).unwrap().is_refuted());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn verdicts_are_deterministic_and_monotone(s in term_strategy(SIGNED), u in term_strategy(SIGNED), seed in 0u64..1000) {
        let a = decide(&s, &u, &Model::Q0, 20, seed).unwrap();
        prop_assert_eq!(&a, &decide(&s, &u, &Model::Q0, 20, seed).unwrap());
        if a.is_refuted() {
            prop_assert!(decide(&s, &u, &Model::Q0, 80, seed).unwrap().is_refuted());
        }
    }

    #[test]
    fn polynomial_fragment_is_decided_exactly(s in term_strategy(RING), u in term_strategy(RING)) {
        let zero = canon_poly(&s).unwrap().sub(&canon_poly(&u).unwrap()).is_zero();
        for m in [Model::Q0, Model::c0()] {
            let v = decide(&s, &u, &m, 50, 3).unwrap();
            prop_assert_eq!(v.is_proved(), zero);
            if !zero {
                prop_assert!(v.is_refuted(), "{} = {} in {}: {}", s, u, m, v);
            }
        }
    }
}
