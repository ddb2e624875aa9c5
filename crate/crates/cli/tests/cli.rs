use std::fs;
use std::path::PathBuf;
use std::process::Command;

use meadow::prover::{check_proof, corpus, ProofScript};
use meadow_cli::{run, script_file_name};

fn meadow(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("meadow").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

fn proofs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../proofs")
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn eval_in_z10() {
    assert_eq!(meadow(&["eval", "--model", "zmod:10", "n(2)*n(5)"]), (0, "0\n".into()));
    assert_eq!(meadow(&["eval", "x^-1 + y", "x=3/4", "y=1"]), (0, "7/3\n".into()));
    assert_eq!(meadow(&["eval", "--model", "c0", "conj(x) * x", "x=1+2i"]), (0, "5\n".into()));
}

#[test]
fn decide_outputs_match_golden_files() {
    let cases: [(&[&str], i32, &str); 5] = [
        (&["decide", "--model", "c0", "zero(x^2 + y^2)*x", "0"], 1, "decide_efr1_c0.txt"),
        (&["decide", "zero(x^2 + y^2)*x = 0"], 0, "decide_efr1_q0.txt"),
        (&["decide", "x * x^-1", "1"], 1, "decide_inverse_law.txt"),
        (&["decide", "--model", "c0", "--split", "conj(conj(x)) = x"], 0, "decide_split_cc7.txt"),
        (&["refute", "--budget", "10", "(x+y)^2", "x^2+y^2"], 1, "refute_square.txt"),
    ];
    for (args, code, file) in cases {
        let (c, out) = meadow(args);
        assert_eq!(c, code, "{args:?}\n{out}");
        assert_eq!(out, golden(file), "{args:?}");
    }
}

#[test]
fn verdict_trailer_is_machine_readable() {
    let (_, out) = meadow(&["decide", "--model", "c0", "zero(x^2 + y^2)*x", "0"]);
    let last = out.lines().last().unwrap();
    assert_eq!(last, "verdict=refuted samples=9 witness=x=1,y=i");
    let (code, out) = meadow(&["decide", "(x+y)^2 = x^2 + n(2)*x*y + y^2"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("verdict=proved samples=0 witness=\n"));
    let (_, out) = meadow(&["decide", "one(x^2) = one(x)"]);
    assert!(out.contains("not a proof over the reals") || out.contains("verdict=proved"), "{out}");
}

#[test]
fn output_is_deterministic_and_seeded() {
    let args = ["decide", "--seed", "7", "--budget", "50", "s(x + y)", "s(x) + s(y)"];
    let first = meadow(&args);
    assert_eq!(first, meadow(&args));
    assert!(first.1.starts_with("# meadow decide model=q0 seed=7 budget=50\n"));
    let other = meadow(&["refute", "--seed", "3", "--budget", "20", "x*y", "x"]);
    assert_eq!(other, meadow(&["refute", "--seed", "3", "--budget", "20", "x*y", "x"]));
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(meadow(&["bogus"]).0, 3);
    assert_eq!(meadow(&["eval", "x +"]).0, 3);
    assert_eq!(meadow(&["eval", "--model", "zmod:4", "1"]).0, 3);
    assert_eq!(meadow(&["decide", "x", "y", "z"]).0, 3);
    assert_eq!(meadow(&["decide", "--budget", "0", "x", "x"]).0, 3);
    assert_eq!(meadow(&["decide", "--model", "zmod:5", "s(x)", "x"]).0, 3);
    assert_eq!(meadow(&["split-complex", "s(x)"]).0, 3);
    assert_eq!(meadow(&["corpus"]).0, 3);
    assert_eq!(meadow(&["--help"]).0, 0);
}

#[test]
fn normalize_and_translate() {
    let (code, out) = meadow(&["normalize", "--form", "smf", "x^-1 + y"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("normalize_smf.txt"));
    assert_eq!(meadow(&["normalize", "--form", "canon", "(x+y)^2"]), (0, "x^2 + n(2) * (x * y) + y^2\n".into()));
    assert_eq!(meadow(&["normalize", "--form", "pseudo", "one(x^2)*x"]), (0, "x\n".into()));
    let (code, out) = meadow(&["normalize", "--form", "ssmf", "s(x * y^-1)"]);
    assert_eq!(code, 0);
    assert!(out.contains("s("), "{out}");
    let (code, out) = meadow(&["translate", "x * x^-1 = 1"]);
    assert_eq!(code, 0);
    assert!(!out.contains("forall") && !out.contains("^-1"), "{out}");
    let (code, out) = meadow(&["translate", "--target", "ordered-field", "s(x) = 1"]);
    assert_eq!(code, 0);
    assert!(out.contains("forall") && !out.contains("s("), "{out}");
}

#[test]
fn split_complex_prints_real_forms() {
    assert_eq!(meadow(&["split-complex", "i"]), (0, "re: 0\nim: 1\n".into()));
    assert_eq!(
        meadow(&["split-complex", "x * y"]),
        (0, "re: re(x) * re(y) - im(x) * im(y)\nim: re(x) * im(y) + im(x) * re(y)\n".into())
    );
}

#[test]
fn modelcheck_table() {
    let (code, out) = meadow(&["modelcheck", "--max-n", "12"]);
    assert_eq!(code, 0);
    assert_eq!(out, golden("modelcheck_12.txt"));
    let (code, out) = meadow(&["modelcheck", "--max-n", "10", "--theory", "Md+C0", "--bound", "10"]);
    assert_eq!(code, 0);
    let z10 = out.lines().find(|l| l.starts_with("n=10 ")).unwrap();
    assert!(z10.contains("C0_9"), "{z10}");
}

#[test]
fn env_overrides_seed_and_budget() {
    let exe = env!("CARGO_BIN_EXE_meadow");
    let out = Command::new(exe)
        .args(["decide", "x", "y"])
        .env("MEADOW_SEED", "11")
        .env("MEADOW_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("# meadow decide model=q0 seed=11 budget=5\n"));
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_meadow");
    let code = |args: &[&str]| Command::new(exe).args(args).output().unwrap().status.code();
    assert_eq!(code(&["eval", "--model", "zmod:10", "n(2)*n(5)"]), Some(0));
    assert_eq!(code(&["decide", "--model", "c0", "zero(x^2 + y^2)*x", "0"]), Some(1));
    let path = proofs_dir().join("appendix_efr_2.mpf");
    assert_eq!(code(&["check", path.to_str().unwrap()]), Some(0));
    assert_eq!(code(&["bogus"]), Some(3));
}

#[test]
fn invalid_proof_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(proofs_dir().join("md_one_inverse.mpf")).unwrap();
    let bad = dir.path().join("bad.mpf");
    fs::write(&bad, text.replacen("\"RIL\"", "\"INV\"", 1)).unwrap();
    let (code, out) = meadow(&["check", bad.to_str().unwrap()]);
    assert_eq!(code, 4, "{out}");
    assert!(out.ends_with("valid=no steps=110\n"), "{out}");
}

#[test]
fn shipped_proofs_match_the_corpus_and_check() {
    let scripts = corpus();
    let mut shipped = 0;
    for s in &scripts {
        let path = proofs_dir().join(script_file_name(&s.name));
        let Ok(text) = fs::read_to_string(&path) else { continue };
        shipped += 1;
        assert_eq!(text, s.script.to_json(), "{} is stale; regenerate with `meadow corpus --emit proofs`", path.display());
        let parsed = ProofScript::from_json(&text).unwrap();
        assert!(check_proof(&parsed).is_valid(), "{}", s.name);
    }
    assert!(shipped >= 40, "only {shipped} shipped scripts");
    assert!(proofs_dir().join("appendix_efr_2.mpf").exists());
}

#[test]
fn corpus_emit_writes_every_script() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = meadow(&["corpus", "--emit", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    let n = corpus().len();
    assert!(out.starts_with(&format!("emitted={n} ")));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), n);
}
