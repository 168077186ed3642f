use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CAT_SAT: &str = "(S (NP (DT the) (NN cat)) (VP (VB sat)))";

fn syntrav(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syntrav")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn workdir() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("cat.txt"), format!("{CAT_SAT}\n")).unwrap();
    fs::write(dir.path().join("lex.txt"), "the DH AH\ncat K AE T\nsat S AE T\n").unwrap();
    dir
}

#[test]
fn parse_prints_canonical_trees() {
    let dir = workdir();
    fs::write(dir.path().join("three.txt"), "(S (NP (NN a)) (VP (VB b)))\n\n(A (B x) y)\n(X  (Y z) )\n").unwrap();
    let o = syntrav(&["parse", "three.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(S (NP (NN a)) (VP (VB b)))\n(A (B x) (XX y))\n(X (Y z))\n");
}

#[test]
fn parse_reports_the_bad_line() {
    let dir = workdir();
    fs::write(dir.path().join("bad.txt"), "(S (A x))\n(S (A x)\n(S (B y))\n").unwrap();
    let o = syntrav(&["parse", "bad.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.txt:2"), "{}", stderr(&o));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn parse_of_empty_file_is_silent() {
    let dir = workdir();
    fs::write(dir.path().join("empty.txt"), "").unwrap();
    let o = syntrav(&["parse", "empty.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn linearize_cat_sat() {
    let dir = workdir();
    let o = syntrav(&["linearize", "cat.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        concat!(
            r#"{"left":{"labels":["S","NP","DT","NN","VP","VB"],"word_pos":[2,3,5]},"#,
            r#""right":{"labels":["S","VP","VB","NP","NN","DT"],"word_pos":[5,4,2]},"#,
            r#""words":["the","cat","sat"]}"#,
            "\n"
        )
    );
}

#[test]
fn usage_errors_exit_two() {
    let dir = workdir();
    for args in [
        &["--dims", "1,2", "parse", "cat.txt"][..],
        &["frobnicate"],
        &["--lexicon-policy", "lenient", "parse", "cat.txt"],
        &["ambiguity", "--words", "9"],
    ] {
        assert_eq!(syntrav(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn train_with_missing_corpus_names_the_path() {
    let dir = workdir();
    let o = syntrav(&["train", "missing-corpus.txt", "--out", "m.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing-corpus.txt"));
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = workdir();
    fs::write(dir.path().join("cfg.json"), r#"{"lambda": 0.1, "momentum": 0.9}"#).unwrap();
    let o = syntrav(&["--config", "cfg.json", "train", "cat.txt", "--out", "m.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("momentum"));
}

fn train_model(dir: &Path, extra: &[&str], out: &str) -> Output {
    let corpus = syntrav(&["synth-corpus", "--sentences", "40"], dir);
    fs::write(dir.join("corpus.txt"), &corpus.stdout).unwrap();
    let mut args = vec!["train", "corpus.txt", "--out", out, "--epochs", "8", "--dims", "8,8,4"];
    args.extend_from_slice(extra);
    syntrav(&args, dir)
}

#[test]
fn train_eval_featurize_export_round() {
    let dir = workdir();
    let o = train_model(dir.path(), &[], "m.json");
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let logs = json_lines(&o);
    assert_eq!(logs.len(), 8);
    for l in &logs {
        let (t, n, total) = (l["task_loss"].as_f64().unwrap(), l["nml"].as_f64().unwrap(), l["total_loss"].as_f64().unwrap());
        assert!((total - (t + 0.05 * n)).abs() <= 1e-12);
    }

    let eval = json_lines(&syntrav(&["eval", "m.json", "corpus.txt"], dir.path()));
    assert!(eval[0]["accuracy"].as_f64().unwrap() >= eval[0]["majority_baseline"].as_f64().unwrap());

    let f = syntrav(&["featurize", "m.json", "cat.txt", "lex.txt"], dir.path());
    assert_eq!(f.status.code(), Some(0), "{}", stderr(&f));
    let f = &json_lines(&f)[0];
    let keys: Vec<&String> = f.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["words", "phonemes", "syntactic", "phoneme_level"]);
    let rows = f["phoneme_level"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0].as_array().unwrap().len(), 2 * 8 + 4);
    assert_eq!(rows[0].as_array().unwrap()[..16], rows[1].as_array().unwrap()[..16]);

    let e = &json_lines(&syntrav(&["export-embeddings", "m.json"], dir.path()))[0];
    let labels = e["labels"].as_array().unwrap().len();
    assert_eq!(e["pca"].as_array().unwrap().len(), labels);
    let s: f64 = e["singular_values"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).sum();
    assert!((s - e["nuclear_norm"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn nml_raises_exported_nuclear_norm() {
    let dir = workdir();
    assert!(train_model(dir.path(), &["--lambda", "0.05"], "with.json").status.success());
    assert!(train_model(dir.path(), &["--lambda", "0"], "without.json").status.success());
    let norm = |m: &str| json_lines(&syntrav(&["export-embeddings", m], dir.path()))[0]["nuclear_norm"].as_f64().unwrap();
    assert!(norm("with.json") > norm("without.json"));
}

#[test]
fn featurize_strict_and_fallback() {
    let dir = workdir();
    assert!(train_model(dir.path(), &[], "m.json").status.success());
    fs::write(dir.path().join("small.txt"), "the DH AH\n").unwrap();
    let strict = syntrav(&["featurize", "m.json", "cat.txt", "small.txt"], dir.path());
    assert_eq!(strict.status.code(), Some(1));
    assert!(stderr(&strict).contains("cat"));
    let loose = syntrav(&["--lexicon-policy", "fallback", "featurize", "m.json", "cat.txt", "small.txt"], dir.path());
    assert_eq!(loose.status.code(), Some(0));
    assert_eq!(json_lines(&loose)[0]["phonemes"].as_array().unwrap().len(), 2 + 3 + 3);
}

#[test]
fn unsupported_format_version_is_rejected() {
    let dir = workdir();
    assert!(train_model(dir.path(), &[], "m.json").status.success());
    assert_eq!(syntrav(&["--format-version", "2", "eval", "m.json", "cat.txt"], dir.path()).status.code(), Some(2));
    let text = fs::read_to_string(dir.path().join("m.json")).unwrap();
    fs::write(dir.path().join("v2.json"), text.replacen("\"format_version\":1", "\"format_version\":2", 1)).unwrap();
    assert_eq!(syntrav(&["eval", "v2.json", "cat.txt"], dir.path()).status.code(), Some(1));
}

#[test]
fn ambiguity_report_and_witness() {
    let dir = workdir();
    let o = syntrav(&["ambiguity", "--witness"], dir.path());
    let lines = json_lines(&o);
    assert_eq!(lines[0]["tree_count"], 2106);
    assert!(lines[0]["pair_collision_classes"].as_u64() < lines[0]["left_collision_classes"].as_u64());
    assert_eq!(lines[1]["left_collision_separated_by_pair"].as_array().unwrap().len(), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = workdir();
    let b = workdir();
    for dir in [&a, &b] {
        assert!(train_model(dir.path(), &["--seed", "7"], "m.json").status.success());
    }
    let read = |d: &TempDir, f: &str| fs::read(d.path().join(f)).unwrap();
    assert_eq!(read(&a, "corpus.txt"), read(&b, "corpus.txt"));
    assert_eq!(read(&a, "m.json"), read(&b, "m.json"));
    for args in [
        &["linearize", "corpus.txt"][..],
        &["featurize", "m.json", "cat.txt", "lex.txt"],
        &["export-embeddings", "m.json"],
        &["eval", "m.json", "corpus.txt"],
        &["ambiguity", "--witness"],
        &["synth-corpus"],
    ] {
        assert_eq!(syntrav(args, a.path()).stdout, syntrav(args, b.path()).stdout, "{args:?}");
    }
}

#[test]
fn seed_flag_reaches_the_generator() {
    let dir = workdir();
    let default = syntrav(&["synth-corpus", "--sentences", "5"], dir.path()).stdout;
    let explicit = syntrav(&["--seed", "42", "synth-corpus", "--sentences", "5"], dir.path()).stdout;
    let other = syntrav(&["--seed", "43", "synth-corpus", "--sentences", "5"], dir.path()).stdout;
    assert_eq!(default, explicit);
    assert_ne!(default, other);
}
