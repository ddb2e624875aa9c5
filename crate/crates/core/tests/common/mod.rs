#![allow(dead_code)]

use meadow::semantics::{Assignment, MeadowValue, Rat};
use meadow::term::{self, Term};
use proptest::prelude::*;

pub const VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Copy, Debug)]
pub struct Symbols {
    pub inverse: bool,
    pub sign: bool,
}

pub const MEADOW: Symbols = Symbols { inverse: true, sign: false };
pub const SIGNED: Symbols = Symbols { inverse: true, sign: true };
pub const RING: Symbols = Symbols { inverse: false, sign: false };

/// Terms over `x, y, z` built from the core operations (plus `s` and `^-1` when enabled).
pub fn term_strategy(sym: Symbols) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Zero),
        Just(Term::One),
        prop::sample::select(VARS.to_vec()).prop_map(term::var),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let mut ops: Vec<BoxedStrategy<Term>> = vec![
            inner.clone().prop_map(term::neg).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| term::add(a, b)).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| term::mul(a, b)).boxed(),
        ];
        if sym.inverse {
            ops.push(inner.clone().prop_map(term::inv).boxed());
        }
        if sym.sign {
            ops.push(inner.clone().prop_map(term::sign).boxed());
        }
        prop::strategy::Union::new(ops)
    })
}

/// Small rationals with zero and ±1 heavily represented.
pub fn rat_strategy() -> impl Strategy<Value = Rat> {
    prop_oneof![
        3 => prop::sample::select(vec![0i64, 1, -1]).prop_map(Rat::from_int),
        2 => (-9i64..=9, 1i64..=5).prop_map(|(n, d)| Rat::new(n, d)),
    ]
}

pub fn q0_assignment() -> impl Strategy<Value = Assignment> {
    prop::collection::vec(rat_strategy(), VARS.len()).prop_map(|vals| {
        VARS.iter().zip(vals).map(|(v, r)| (v.to_string(), MeadowValue::Rat(r))).collect()
    })
}
