//! Corpus audit: checking, semantic cross-check and mutation testing.

use crate::semantics::{format_assignment, random_assignment, sample_rng, structured_assignments, Model, SampleConfig};

use super::{check_with, corpus, mutate, proven_statement, Library, LibraryEntry, Scheme, Statement, Theory, Verdict};

/// The model every axiom of the theory holds in: `c0` once conjugation is present, `q0` otherwise.
pub fn reference_model(theory: &Theory) -> Model {
    if theory.contains(Scheme::CC) || theory.contains(Scheme::SSAV) || theory.contains(Scheme::SignsStar) {
        Model::C0 { complex_sign: theory.contains(Scheme::SignsStar) }
    } else {
        Model::Q0
    }
}

/// Evaluates both sides at the structured points and `samples` random points.
/// Returns a rendering of the first assignment where they differ.
pub fn cross_check(goal: &Statement, model: &Model, samples: u64, seed: u64) -> Result<(), String> {
    let mut vars = goal.lhs.free_vars();
    vars.extend(&goal.rhs.free_vars());
    let vars = vars.to_vec();
    let cfg = SampleConfig { magnitude: 1000 };
    let random = (0..samples).map(|k| random_assignment(model, &vars, seed, k, &cfg));
    for a in structured_assignments(model, &vars).into_iter().chain(random) {
        let l = model.eval(&goal.lhs, &a).map_err(|e| e.to_string())?;
        let r = model.eval(&goal.rhs, &a).map_err(|e| e.to_string())?;
        if l != r {
            return Err(format!("{} gives {l} and {r}", format_assignment(&a)));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
pub struct AuditConfig {
    pub mutations: usize,
    pub samples: u64,
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { mutations: 20, samples: 100, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub struct ScriptReport {
    pub name: String,
    pub theory: Theory,
    pub goal: Statement,
    pub steps: usize,
    pub verdict: Verdict,
    /// `Err` holds a counterexample to the goal in the reference model.
    pub semantic: Result<(), String>,
    /// Mutants that were invalid or proved something other than the goal.
    pub mutants_rejected: usize,
    pub mutants: usize,
}

impl ScriptReport {
    pub fn passed(&self) -> bool {
        self.verdict.is_valid() && self.semantic.is_ok() && self.mutants_rejected == self.mutants
    }
}

/// Builds, checks, cross-checks and mutates every corpus script.
pub fn audit_corpus(cfg: &AuditConfig) -> Vec<ScriptReport> {
    let scripts = corpus();
    let mut lib = Library::new();
    let mut out = Vec::with_capacity(scripts.len());
    for (k, s) in scripts.iter().enumerate() {
        let verdict = check_with(&s.script, &lib);
        let goal = &s.script.goal;
        let semantic = cross_check(goal, &reference_model(&s.script.theory), cfg.samples, cfg.seed ^ k as u64);
        let mut rng = sample_rng(cfg.seed, k as u64);
        let mut rejected = 0;
        for _ in 0..cfg.mutations {
            let m = mutate(&s.script, &mut rng);
            match proven_statement(&m, &lib) {
                Some(st) if st.matches(goal) => {}
                _ => rejected += 1,
            }
        }
        if verdict.is_valid() {
            lib.push(LibraryEntry { name: s.name.clone(), theory: s.script.theory.clone(), goal: goal.clone() });
        }
        out.push(ScriptReport {
            name: s.name.clone(),
            theory: s.script.theory.clone(),
            goal: goal.clone(),
            steps: s.script.steps.len(),
            verdict,
            semantic,
            mutants_rejected: rejected,
            mutants: cfg.mutations,
        });
    }
    out
}
