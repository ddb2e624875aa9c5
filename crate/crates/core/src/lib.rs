//! Meadows: terms, exact evaluation, fraction normal forms, first-order
//! translations, a proof checker with a lemma corpus, and decision
//! procedures for equations.

pub mod decide;
pub mod fo_logic;
pub mod gen;
pub mod model_lab;
pub mod normal_forms;
pub mod prover;
pub mod semantics;
pub mod term;
