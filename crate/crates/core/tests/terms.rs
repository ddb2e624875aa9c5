mod common;

use common::{q0_assignment, rat_strategy, term_strategy, MEADOW, SIGNED};
use meadow::semantics::{eval_q0, eval_zmod, Assignment, GaussRat, MeadowValue, Model, Rat, ZmodVal};
use meadow::term::{parse, print, Signature, Substitution, Term};
use proptest::prelude::*;

fn zmod_assignment(n: u64) -> impl Strategy<Value = Assignment> {
    prop::collection::vec(0..n, 3).prop_map(move |vals| {
        common::VARS.iter().zip(vals).map(|(v, r)| (v.to_string(), MeadowValue::Zmod(ZmodVal::new(n, r as i128)))).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn printing_round_trips(t in term_strategy(SIGNED)) {
        prop_assert_eq!(parse(&print(&t), Signature::SignedMeadow).unwrap(), t);
    }

    #[test]
    fn expansion_preserves_value_and_variables(t in term_strategy(SIGNED), a in q0_assignment()) {
        let e = t.expand_derived();
        prop_assert!(e.is_core());
        prop_assert_eq!(e.free_vars(), t.free_vars());
        prop_assert_eq!(eval_q0(&t, &a).unwrap(), eval_q0(&e, &a).unwrap());
    }

    #[test]
    fn substitution_commutes_with_evaluation(t in term_strategy(MEADOW), u in term_strategy(MEADOW), a in q0_assignment()) {
        let map: Substitution = [("x".to_string(), u.clone())].into_iter().collect();
        let mut b = a.clone();
        b.insert("x".into(), MeadowValue::Rat(eval_q0(&u, &a).unwrap()));
        prop_assert_eq!(eval_q0(&t.substitute(&map), &a).unwrap(), eval_q0(&t, &b).unwrap());
    }

    #[test]
    fn meadow_laws_hold_in_q0(x in rat_strategy(), y in rat_strategy()) {
        prop_assert_eq!(x.inv().inv(), x.clone());
        prop_assert_eq!(x.mul(&x.mul(&x.inv())), x.clone());
        prop_assert_eq!(x.mul(&y).inv(), x.inv().mul(&y.inv()));
        prop_assert_eq!(x.inv().signum(), x.signum());
    }

    #[test]
    fn meadow_laws_hold_in_gaussians(a in rat_strategy(), b in rat_strategy(), c in rat_strategy()) {
        let x = GaussRat::new(a, b);
        let y = GaussRat::new(c, Rat::one());
        prop_assert_eq!(x.inv().inv(), x.clone());
        prop_assert_eq!(x.mul(&x.mul(&x.inv())), x.clone());
        prop_assert_eq!(x.mul(&y).conj(), x.conj().mul(&y.conj()));
        prop_assert_eq!(x.mul(&y).inv(), x.inv().mul(&y.inv()));
    }

    #[test]
    fn terms_agree_in_z30_and_its_factors(t in term_strategy(MEADOW), a in zmod_assignment(30)) {
        // Z/30 is the product of Z/2, Z/3 and Z/5, so values reduce componentwise.
        let v = eval_zmod(30, &t, &a).unwrap();
        for p in [2u64, 3, 5] {
            let b: Assignment = a.iter().map(|(k, m)| {
                let MeadowValue::Zmod(z) = m else { unreachable!() };
                (k.clone(), MeadowValue::Zmod(ZmodVal::new(p, z.residue as i128)))
            }).collect();
            prop_assert_eq!(eval_zmod(p, &t, &b).unwrap().residue, v.residue % p);
        }
    }
}

#[test]
fn model_selectors_parse() {
    assert_eq!("q0".parse::<Model>().unwrap(), Model::Q0);
    assert_eq!("zmod:10".parse::<Model>().unwrap(), Model::Zmod(10));
    assert!("zmod:4".parse::<Model>().is_err());
    let t: Term = parse("n(2) * n(5)", Signature::Meadow).unwrap();
    assert_eq!(Model::Zmod(10).eval(&t, &Assignment::new()).unwrap().to_string(), "0");
}
