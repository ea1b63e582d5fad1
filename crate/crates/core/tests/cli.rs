use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::OnceLock;

use wmfcc::corpus::load_features;

fn wmfcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmfcc"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = wmfcc(args);
    assert!(
        out.status.success(),
        "wmfcc {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// One synthesized corpus and its /u/ feature store, shared by every test.
fn fixture() -> &'static (PathBuf, PathBuf) {
    static DIR: OnceLock<(PathBuf, PathBuf)> = OnceLock::new();
    DIR.get_or_init(|| {
        let root = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-fixture");
        let _ = std::fs::remove_dir_all(&root);
        let corpus = root.join("corpus");
        ok(&["synth", "--out", s(&corpus), "--seed", "1", "--spread", "0"]);
        let features = root.join("u.csv");
        ok(&[
            "extract",
            "--manifest",
            s(&corpus.join("manifest.csv")),
            "--vowel",
            "u",
            "--out",
            s(&features),
        ]);
        (corpus, features)
    })
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().display().to_string();
                files.push((rel, std::fs::read(&p).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn synth_is_reproducible() {
    let (corpus, _) = fixture();
    let tmp = tempfile::tempdir().unwrap();
    let again = tmp.path().join("again");
    let stdout = ok(&["synth", "--out", s(&again), "--seed", "1", "--spread", "0"]);
    assert!(stdout.contains("120"), "{stdout}");
    let a = tree(corpus);
    assert_eq!(a.len(), 121);
    assert!(a == tree(&again), "synth output differs between runs");
}

#[test]
fn extract_all_vowels_and_rerun_identical() {
    let (corpus, _) = fixture();
    let tmp = tempfile::tempdir().unwrap();
    let manifest = corpus.join("manifest.csv");
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    ok(&["extract", "--manifest", s(&manifest), "--out", s(&a)]);
    ok(&["extract", "--manifest", s(&manifest), "--out", s(&b)]);
    let table = load_features(&a).unwrap();
    assert_eq!((table.len(), table.dim()), (120, 19));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c = tmp.path().join("c.csv");
    ok(&[
        "extract",
        "--manifest",
        s(&manifest),
        "--out",
        s(&c),
        "--no-drop-c1",
        "--vowel",
        "a",
    ]);
    let wide = load_features(&c).unwrap();
    assert_eq!(
        (wide.len(), wide.dim(), wide.first_coefficient),
        (40, 20, 1)
    );
}

#[test]
fn corpus_weighting_writes_sidecar() {
    let (corpus, _) = fixture();
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("pooled.csv");
    ok(&[
        "extract",
        "--manifest",
        s(&corpus.join("manifest.csv")),
        "--out",
        s(&out),
        "--vowel",
        "o",
        "--weighting",
        "corpus",
    ]);
    assert!(tmp.path().join("pooled.weights.csv").exists());
}

#[test]
fn eval_loo_is_deterministic() {
    let (_, features) = fixture();
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let out = ok(&["eval", "--features", s(features), "--loo", "--out", s(&a)]);
    ok(&["eval", "--features", s(features), "--loo", "--out", s(&b)]);
    assert!(out.contains("leave-one-out"), "{out}");
    assert!(out.contains("accuracy"), "{out}");
    assert_eq!(
        std::fs::read(a.join("report.toml")).unwrap(),
        std::fs::read(b.join("report.toml")).unwrap()
    );
    let rendered = ok(&["report", s(&a.join("report.toml"))]);
    assert_eq!(
        rendered,
        std::fs::read_to_string(a.join("report.txt")).unwrap()
    );
}

#[test]
fn sweep_ranks_every_coefficient() {
    let (_, features) = fixture();
    let tmp = tempfile::tempdir().unwrap();
    let out = ok(&[
        "sweep",
        "--features",
        s(features),
        "--k",
        "5",
        "--out",
        s(tmp.path()),
    ]);
    let rows = out
        .lines()
        .filter(|l| {
            let mut cols = l.split_whitespace();
            cols.next().is_some_and(|r| r.parse::<usize>().is_ok())
                && cols.next().is_some_and(|c| c.starts_with('c'))
        })
        .count();
    assert_eq!(rows, 19, "{out}");
}

#[test]
fn train_is_deterministic_and_scores_a_test_set() {
    let (_, features) = fixture();
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.json");
    let b = tmp.path().join("b.json");
    ok(&["train", "--features", s(features), "--out", s(&a)]);
    ok(&["train", "--features", s(features), "--out", s(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    // Scoring the training store itself with the saved model.
    let out = ok(&[
        "eval",
        "--features",
        s(features),
        "--test-set",
        s(features),
        "--model",
        s(&a),
        "--out",
        s(&tmp.path().join("holdout")),
    ]);
    assert!(out.contains("accuracy"), "{out}");
}

#[test]
fn bad_input_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wmfcc(&["synth", "--out", s(tmp.path()), "--subjects-pd", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--subjects-pd"));

    let missing = wmfcc(&["eval", "--features", s(&tmp.path().join("nope.csv"))]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error:"));
}
