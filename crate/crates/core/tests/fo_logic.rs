mod common;

use common::{q0_assignment, term_strategy, MEADOW};
use meadow::fo_logic::{parse_formula, translate_ordered, translate_phi, translate_psi};
use meadow::gen::{random_term, GenConfig};
use meadow::normal_forms::to_smf;
use meadow::semantics::{eval_formula, eval_q0, format_assignment, random_assignment, sample_rng, Model, SampleConfig};
use meadow::term::Signature;
use proptest::prelude::*;

fn vars() -> Vec<String> {
    (0..3).map(|k| format!("x{k}")).collect()
}

#[test]
fn phi_agrees_with_equality_over_q0_and_gaussians() {
    let mut rng = sample_rng(9, 0);
    let cfg = GenConfig::meadow(12, 3);
    for k in 0..150u64 {
        let s = random_term(&mut rng, &cfg);
        let t = if k % 3 == 0 { s.clone() } else { random_term(&mut rng, &cfg) };
        let f = translate_phi(&to_smf(&s).unwrap(), &to_smf(&t).unwrap()).unwrap();
        assert!(f.is_quantifier_free());
        for model in [Model::Q0, Model::c0()] {
            for i in 0..20 {
                let a = random_assignment(&model, &vars(), k, i, &SampleConfig { magnitude: 2 });
                let holds = model.eval(&s, &a).unwrap() == model.eval(&t, &a).unwrap();
                assert_eq!(holds, eval_formula(&f, &a, &model).unwrap(), "{s} = {t} at {}", format_assignment(&a));
            }
        }
    }
}

#[test]
fn psi_and_ordered_agree_over_ordered_q0() {
    let mut rng = sample_rng(10, 0);
    let cfg = GenConfig::meadow(12, 3).with_sign().without_inverse();
    for k in 0..150u64 {
        let s = random_term(&mut rng, &cfg);
        let t = if k % 3 == 0 { s.clone() } else { random_term(&mut rng, &cfg) };
        let psi = translate_psi(&s, &t).unwrap();
        let ord = translate_ordered(&s, &t).unwrap();
        for i in 0..20 {
            let a = random_assignment(&Model::Q0, &vars(), k, i, &SampleConfig { magnitude: 2 });
            let holds = eval_q0(&s, &a).unwrap() == eval_q0(&t, &a).unwrap();
            assert_eq!(holds, eval_formula(&psi, &a, &Model::Q0).unwrap(), "{s} = {t}");
            assert_eq!(holds, eval_formula(&ord, &a, &Model::Q0).unwrap(), "{s} = {t}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn phi_is_equality(s in term_strategy(MEADOW), t in term_strategy(MEADOW), a in q0_assignment()) {
        let f = translate_phi(&to_smf(&s).unwrap(), &to_smf(&t).unwrap()).unwrap();
        let holds = eval_q0(&s, &a).unwrap() == eval_q0(&t, &a).unwrap();
        prop_assert_eq!(holds, eval_formula(&f, &a, &Model::Q0).unwrap());
    }

    #[test]
    fn rendered_formulas_parse_back(s in term_strategy(MEADOW), t in term_strategy(MEADOW)) {
        let f = translate_phi(&to_smf(&s).unwrap(), &to_smf(&t).unwrap()).unwrap();
        prop_assert_eq!(parse_formula(&f.to_string(), Signature::Meadow).unwrap(), f);
    }
}
