use meadow::model_lab::{check_axioms, classify_range, zmod_meadow, Construction, FiniteMeadow, Impossibility};
use meadow::prover::{Statement, Theory};
use meadow::term::{parse, Signature};

/// Squarefree test by trial division, independent of the library.
fn squarefree(n: u64) -> bool {
    (2..=n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d * d))
}

fn st(l: &str, r: &str) -> Statement {
    Statement::new(parse(l, Signature::Meadow).unwrap(), parse(r, Signature::Meadow).unwrap())
}

#[test]
fn classification_matches_squarefree_up_to_50() {
    for c in classify_range(50) {
        assert_eq!(c.is_meadow(), squarefree(c.n), "n={}", c.n);
        assert_eq!(c.squarefree, squarefree(c.n));
        if let Construction::Impossible(why) = &c.construction {
            match why {
                Impossibility::NoCandidate { x } => {
                    let x = *x;
                    assert!((0..c.n).all(|y| x * x % c.n * y % c.n != x), "n={} x={x}", c.n);
                }
                Impossibility::Exhausted { .. } => {}
            }
        }
    }
    let rows = classify_range(50);
    assert!(rows[29].is_meadow());
    assert!(!rows[48].is_meadow());
}

#[test]
fn cancellation_is_absence_of_zero_divisors() {
    for c in classify_range(50) {
        if let Some(m) = c.construction.meadow() {
            let prime_or_one = c.n == 1 || (2..c.n).all(|d| c.n % d != 0);
            assert_eq!(m.cancellation, prime_or_one, "n={}", c.n);
        }
    }
}

fn derived_identities() -> Vec<Statement> {
    vec![
        st("0^-1", "0"),
        st("1^-1", "1"),
        st("(-x)^-1", "-(x^-1)"),
        st("(x * y)^-1", "x^-1 * y^-1"),
        st("x^-1 * x^-1 * x", "x^-1"),
        st("0 * x", "0"),
        st("one(x) * one(x)", "one(x)"),
        st("zero(x) * x", "0"),
        st("one(x * y)", "one(x) * one(y)"),
        st("zero(x)^-1", "zero(x)"),
    ]
}

#[test]
fn constructed_meadows_satisfy_md_and_derived_identities() {
    for c in classify_range(30) {
        let Some(m) = c.construction.meadow() else { continue };
        for r in check_axioms(m, &Theory::default()).unwrap() {
            assert!(r.holds(), "{} fails in Z/{}", r.axiom, m.n);
        }
        for s in derived_identities() {
            assert_eq!(m.counterexample(&s), None, "{s} in Z/{}", m.n);
        }
    }
}

#[test]
fn inverse_laws_fail_exactly_without_cancellation() {
    let law = st("x * x^-1", "1");
    for c in classify_range(30) {
        let Some(m) = c.construction.meadow() else { continue };
        // x = 0 always breaks the plain inverse law; restrict to nonzero x.
        let broken = (1..m.n).any(|x| x * m.inverse[x as usize] % m.n != 1 % m.n);
        assert_eq!(broken, !m.cancellation, "n={}", m.n);
        assert!(m.counterexample(&law).is_some() || m.n == 1);
    }
}

#[test]
fn hand_written_tables_are_checked() {
    // In Z/3 every element is its own inverse; swapping 1 and 2 breaks RIL at x = 1.
    let ok = FiniteMeadow::from_table(3, vec![0, 1, 2]);
    assert!(check_axioms(&ok, &Theory::default()).unwrap().iter().all(|r| r.holds()));
    let bad = FiniteMeadow::from_table(3, vec![0, 2, 1]);
    let failing: Vec<String> =
        check_axioms(&bad, &Theory::default()).unwrap().into_iter().filter(|r| !r.holds()).map(|r| r.axiom).collect();
    assert_eq!(failing, vec!["RIL"]);
    let Construction::Impossible(Impossibility::NoCandidate { x }) = zmod_meadow(12).unwrap() else { panic!() };
    let empty = |x: u64| (0..12).all(|y| x * x * y % 12 != x);
    assert!(empty(x));
    assert!((0..x).all(|z| !empty(z)));
}
