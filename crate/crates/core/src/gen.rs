//! Seeded random term generation for sampling-based checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::term::{self, Term};

/// Which symbols a generated term may use.
#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_nodes: usize,
    pub vars: Vec<String>,
    pub inverse: bool,
    pub sign: bool,
    pub complex: bool,
    /// Subtraction, pseudo constants, numerals and powers (never `^0`).
    pub derived: bool,
}

impl GenConfig {
    /// Plain meadow terms over `x0..x{nvars-1}`.
    pub fn meadow(max_nodes: usize, nvars: usize) -> GenConfig {
        GenConfig {
            max_nodes,
            vars: (0..nvars).map(|k| format!("x{k}")).collect(),
            inverse: true,
            sign: false,
            complex: false,
            derived: true,
        }
    }

    pub fn with_sign(mut self) -> GenConfig {
        self.sign = true;
        self
    }

    pub fn with_complex(mut self) -> GenConfig {
        self.complex = true;
        self
    }

    pub fn without_inverse(mut self) -> GenConfig {
        self.inverse = false;
        self
    }

    pub fn without_derived(mut self) -> GenConfig {
        self.derived = false;
        self
    }
}

#[derive(Clone, Copy)]
enum Op {
    Neg,
    Add,
    Mul,
    Inv,
    Sign,
    Conj,
    Sub,
    One,
    Zero,
    Pow,
}

/// A random term with at most `cfg.max_nodes` nodes.
pub fn random_term(rng: &mut impl Rng, cfg: &GenConfig) -> Term {
    let budget = rng.gen_range(1..=cfg.max_nodes.max(1));
    build(rng, cfg, budget)
}

fn leaf(rng: &mut impl Rng, cfg: &GenConfig) -> Term {
    let roll = rng.gen_range(0..10);
    match roll {
        0 => Term::Zero,
        1 => Term::One,
        2 if cfg.complex => Term::I,
        3 if cfg.derived => term::numeral(rng.gen_range(2..=4)),
        _ if !cfg.vars.is_empty() => Term::Var(cfg.vars.choose(rng).unwrap().clone()),
        _ => Term::One,
    }
}

fn build(rng: &mut impl Rng, cfg: &GenConfig, budget: usize) -> Term {
    if budget <= 1 {
        return leaf(rng, cfg);
    }
    let mut ops = vec![Op::Neg, Op::Add, Op::Add, Op::Mul, Op::Mul];
    if cfg.inverse {
        ops.extend([Op::Inv, Op::Inv]);
    }
    if cfg.sign {
        ops.extend([Op::Sign, Op::Sign]);
    }
    if cfg.complex {
        ops.push(Op::Conj);
    }
    if cfg.derived {
        ops.push(Op::Sub);
        ops.push(Op::Pow);
        if cfg.inverse {
            ops.extend([Op::One, Op::Zero]);
        }
    }
    if budget == 2 {
        ops.retain(|o| !matches!(o, Op::Add | Op::Mul | Op::Sub));
    }
    let op = *ops.choose(rng).unwrap();
    let unary = |rng: &mut _| build(rng, cfg, budget - 1);
    match op {
        Op::Neg => term::neg(unary(rng)),
        Op::Inv => term::inv(unary(rng)),
        Op::Sign => term::sign(unary(rng)),
        Op::Conj => term::conj(unary(rng)),
        Op::One => term::one_of(unary(rng)),
        Op::Zero => term::zero_of(unary(rng)),
        Op::Pow => {
            let mut k = rng.gen_range(-2i64..=3);
            if k == 0 || (k < 0 && !cfg.inverse) {
                k = 2;
            }
            term::pow(unary(rng), k)
        }
        Op::Add | Op::Mul | Op::Sub => {
            let left = rng.gen_range(1..budget - 1);
            let a = build(rng, cfg, left);
            let b = build(rng, cfg, budget - 1 - left);
            match op {
                Op::Add => term::add(a, b),
                Op::Mul => term::mul(a, b),
                _ => term::sub(a, b),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::sample_rng;

    #[test]
    fn respects_size_and_symbols() {
        let cfg = GenConfig::meadow(40, 4);
        let mut rng = sample_rng(1, 0);
        for _ in 0..500 {
            let t = random_term(&mut rng, &cfg);
            assert!(t.size() <= 40);
            assert!(!t.has_sign() && !t.has_complex());
            assert!(t.free_vars().iter().all(|v| cfg.vars.contains(v)));
        }
        let cfg = GenConfig::meadow(20, 2).with_sign().without_inverse();
        for _ in 0..500 {
            let t = random_term(&mut rng, &cfg);
            assert!(!t.expand_derived().has_inverse());
        }
    }
}
