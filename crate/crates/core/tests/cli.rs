//! The command-line front end, driven in-process.

use std::path::Path;

use tracelink::cli::{main_with_args, RunManifest, EXIT_INPUT, EXIT_OK, MANIFEST_FILE};

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("tracelink").chain(args.iter().copied()))
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn synth(dir: &Path) -> String {
    let out = p(dir, "syn");
    let code = run(&["synth", "--out-dir", &out, "--seed", "2", "--n-sources", "40", "--n-targets", "30", "--corpus-lines", "400"]);
    assert_eq!(code, EXIT_OK);
    out
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(&["corpus-build", "--artifacts", "/does/not/exist.jsonl", "--out-dir", &p(dir.path(), "o")]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(run(&["no-such-command"]), EXIT_INPUT);
    assert_eq!(run(&["train", "--artifacts", "a"]), EXIT_INPUT);
}

#[test]
fn corpus_build_is_reproducible_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let syn = synth(dir.path());
    let arts = format!("{syn}/artifacts.jsonl");
    let (a, b) = (p(dir.path(), "a"), p(dir.path(), "b"));
    assert_eq!(run(&["corpus-build", "--artifacts", &arts, "--out-dir", &a]), EXIT_OK);
    assert_eq!(run(&["corpus-build", "--artifacts", &arts, "--out-dir", &b]), EXIT_OK);
    let ma = RunManifest::read(&Path::new(&a).join(MANIFEST_FILE)).unwrap();
    let mb = RunManifest::read(&Path::new(&b).join(MANIFEST_FILE)).unwrap();
    assert_eq!(ma.outputs, mb.outputs);
    assert!(ma.outputs.contains_key("vocab.tsv"));
    assert!(ma.stale_inputs().is_empty());
}

#[test]
fn eval_of_identical_methods() {
    let dir = tempfile::tempdir().unwrap();
    let syn = synth(dir.path());
    let arts = format!("{syn}/artifacts.jsonl");
    let links = format!("{syn}/links.csv");
    let base = p(dir.path(), "base");
    assert_eq!(run(&["baseline", "--artifacts", &arts, "--links", &links, "--method", "vsm", "--out-dir", &base]), EXIT_OK);
    // the same scores under a second method name
    let scores = std::fs::read_to_string(format!("{base}/baseline_scores.csv")).unwrap();
    let copy = scores.replace(",vsm", ",copy");
    let copy_path = p(dir.path(), "copy.csv");
    std::fs::write(&copy_path, copy).unwrap();
    let ev = p(dir.path(), "eval");
    let code = run(&[
        "eval", "--artifacts", &arts, "--links", &links, "--scores", &format!("{base}/baseline_scores.csv"), "--scores", &copy_path,
        "--out-dir", &ev,
    ]);
    assert_eq!(code, EXIT_OK);
    let stats = std::fs::read_to_string(format!("{ev}/stats.txt")).unwrap();
    assert!(stats.starts_with("Kruskal-Wallis H = 0.000000"), "{stats}");
    let row = stats.lines().find(|l| l.starts_with("vsm")).unwrap();
    assert!(row.contains("1.000000e0"), "{row}");
    let metrics = std::fs::read_to_string(format!("{ev}/metrics.csv")).unwrap();
    assert!(metrics.lines().any(|l| l.starts_with("copy,MAP,")));
}

#[test]
fn pipeline_train_and_gates() {
    let dir = tempfile::tempdir().unwrap();
    let syn = synth(dir.path());
    let arts = format!("{syn}/artifacts.jsonl");
    let links = format!("{syn}/links.csv");
    let emb = p(dir.path(), "emb");
    assert_eq!(run(&["embed", "--corpus", &format!("{syn}/corpus.txt"), "--dim", "8", "--epochs", "1", "--out-dir", &emb]), EXIT_OK);
    let net = p(dir.path(), "net");
    let code = run(&[
        "train", "--artifacts", &arts, "--links", &links, "--embeddings", &format!("{emb}/embeddings.txt"), "--epochs", "2",
        "--hidden", "30", "--out-dir", &net,
    ]);
    assert_eq!(code, EXIT_OK);
    let log = std::fs::read_to_string(format!("{net}/run_log.csv")).unwrap();
    assert_eq!(log.lines().count(), 3);
    let g = p(dir.path(), "gates");
    let text = "one two three four five six seven eight nine ten";
    let code = run(&[
        "gates", "--checkpoint", &format!("{net}/model.ckpt"), "--embeddings", &format!("{emb}/embeddings.txt"), "--text", text, "--dims",
        "12,24", "--out-dir", &g,
    ]);
    assert_eq!(code, EXIT_OK);
    let csv = std::fs::read_to_string(format!("{g}/gates.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn config_file_sections_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = p(dir.path(), "cfg.json");
    std::fs::write(&cfg, r#"{"synth": {"n_sources": 7, "n_targets": 5, "corpus_lines": 50}}"#).unwrap();
    let out = p(dir.path(), "s");
    assert_eq!(run(&["synth", "--config", &cfg, "--n-targets", "6", "--out-dir", &out]), EXIT_OK);
    let m = RunManifest::read(&Path::new(&out).join(MANIFEST_FILE)).unwrap();
    assert_eq!(m.config["synth"]["n_sources"], 7);
    assert_eq!(m.config["synth"]["n_targets"], 6);
    std::fs::write(&cfg, r#"{"synthh": {}}"#).unwrap();
    assert_eq!(run(&["synth", "--config", &cfg, "--out-dir", &out]), EXIT_INPUT);
}
