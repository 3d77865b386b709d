mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lexcomp::pipeline::read_manifest;

fn lexcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexcomp"))
        .args(args)
        .env_remove("LEXCOMP_SEED")
        .output()
        .expect("spawn lexcomp")
}

fn lexcomp_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexcomp"))
        .args(args)
        .env(key, value)
        .output()
        .expect("spawn lexcomp")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const HEADER: &str = "id\tcorpus\tsentence\ttoken\tcomplexity\n";

#[test]
fn preprocess_quotes_targets() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    let output = dir.path().join("out.tsv");
    fs::write(
        &input,
        format!(
            "{HEADER}a1\tbible\tThe cat sat\tcat\t0.25\na2\tbiomed\tA dog, barking\tdog\t0.5\n"
        ),
    )
    .unwrap();
    let o = lexcomp(&["preprocess", "--in", p(&input), "--out", p(&output)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&output).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].split('\t').nth(2), Some("The 'cat' sat"));
    assert_eq!(rows[1].split('\t').nth(2), Some("A 'dog', barking"));
}

#[test]
fn preprocess_empty_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    let output = dir.path().join("out.tsv");
    fs::write(&input, "").unwrap();
    let o = lexcomp(&["preprocess", "--in", p(&input), "--out", p(&output)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&output).unwrap(), "");
}

#[test]
fn preprocess_missing_target_lists_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    let output = dir.path().join("out.tsv");
    fs::write(
        &input,
        format!(
            "{HEADER}ok1\tbible\tThe cat sat\tcat\t0.25\nbad7\tbible\tThe cat sat\tzebra\t0.5\n"
        ),
    )
    .unwrap();
    let o = lexcomp(&["preprocess", "--in", p(&input), "--out", p(&output)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("bad7"), "{}", stderr(&o));
    assert!(!stderr(&o).contains("ok1"));
}

#[test]
fn gen_annotations_rows() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    let out1 = dir.path().join("a.tsv");
    let out2 = dir.path().join("b.tsv");
    fs::write(
        &input,
        format!("{HEADER}r1\tbible\tx y\ty\t0.2\nr2\tbible\tx y\ty\t1\nr3\tbible\tx y\ty\t0.8\n"),
    )
    .unwrap();
    let o = lexcomp(&[
        "gen-annotations",
        "--in",
        p(&input),
        "--out",
        p(&out1),
        "--rho",
        "0",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out1).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r1\t0.2\t0,0.25,0.25,0.25,0.25");
    assert_eq!(lines[1], "r2\t1\t1,1,1,1,1");
    assert_eq!(lines[2], "r3\t0.8\t0.75,0.75,0.75,0.75,1");

    let args = [
        "gen-annotations",
        "--in",
        p(&input),
        "--n",
        "20",
        "--rho",
        "0.5",
        "--seed",
        "9",
    ];
    let o = lexcomp(&[&args[..], &["--out", p(&out1)]].concat());
    assert!(o.status.success());
    let o = lexcomp(&[&args[..], &["--out", p(&out2)]].concat());
    assert!(o.status.success());
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn seed_env_overrides_config_but_not_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    let mut body = HEADER.to_string();
    for i in 0..30 {
        body.push_str(&format!("r{i}\tbible\tx y\ty\t0.{i:02}\n"));
    }
    fs::write(&input, body).unwrap();
    let run = |extra: &[&str], env: Option<&str>, name: &str| {
        let out = dir.path().join(name);
        let args = [
            &[
                "gen-annotations",
                "--in",
                p(&input),
                "--out",
                p(&out),
                "--n",
                "10",
                "--rho",
                "0.5",
            ],
            extra,
        ]
        .concat();
        let o = match env {
            Some(v) => lexcomp_env(&args, "LEXCOMP_SEED", v),
            None => lexcomp(&args),
        };
        assert!(o.status.success(), "{}", stderr(&o));
        fs::read(out).unwrap()
    };
    let seed5 = run(&["--seed", "5"], None, "a");
    let seed6 = run(&["--seed", "6"], None, "b");
    assert_ne!(seed5, seed6);
    assert_eq!(run(&[], Some("5"), "c"), seed5);
    assert_eq!(run(&["--seed", "6"], Some("5"), "d"), seed6);
}

#[test]
fn evaluate_reports_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold.tsv");
    let pred = dir.path().join("pred.tsv");
    fs::write(
        &gold,
        format!("{HEADER}a\tbible\ts a\ta\t0.1\nb\tbible\ts b\tb\t0.3\nc\tbible\ts c\tc\t0.2\nd\tbible\ts d\td\t0.4\n"),
    )
    .unwrap();
    // Shuffled order: the join is on id.
    fs::write(&pred, "d\t0.4\nb\t0.2\na\t0.1\nc\t0.3\n").unwrap();
    let o = lexcomp(&["evaluate", "--pred", p(&pred), "--gold", p(&gold), "--json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 4);
    assert!((v["mae"].as_f64().unwrap() - 0.05).abs() < 1e-12);
    assert!((v["mse"].as_f64().unwrap() - 0.005).abs() < 1e-12);
    assert!((v["pearson"].as_f64().unwrap() - 0.8).abs() < 1e-12);

    let o = lexcomp(&["evaluate", "--pred", p(&pred), "--gold", p(&gold)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("metric\tvalue\n"));
    assert!(text.contains("\nn\t4\n") || text.ends_with("n\t4\n"));
}

#[test]
fn evaluate_rejects_disjoint_ids() {
    let dir = tempfile::tempdir().unwrap();
    let gold = dir.path().join("gold.tsv");
    let pred = dir.path().join("pred.tsv");
    fs::write(
        &gold,
        format!("{HEADER}a\tbible\ts a\ta\t0.1\nb\tbible\ts b\tb\t0.3\n"),
    )
    .unwrap();
    fs::write(&pred, "x\t0.1\ny\t0.3\n").unwrap();
    let o = lexcomp(&["evaluate", "--pred", p(&pred), "--gold", p(&gold)]);
    assert!(!o.status.success());
}

#[test]
fn train_predict_export() {
    let dir = tempfile::tempdir().unwrap();
    let s = common::synthetic(5, 40, 10);
    s.write_to(dir.path());
    let model = dir.path().join("model");
    let pred = dir.path().join("pred.tsv");
    let o = lexcomp(&[
        "train",
        "--train",
        p(&dir.path().join("train.tsv")),
        "--glove",
        p(&dir.path().join("glove.txt")),
        "--glove-dim",
        "8",
        "--model-dir",
        p(&model),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = String::from_utf8(o.stdout).unwrap();
    assert!(summary.starts_with("slot\tclass1\tclass2\tclass3\tclass4\tclass5\n"));
    let manifest = read_manifest(&model).unwrap();
    let cls = manifest.classification.unwrap();
    assert_eq!(cls.slot_files.len(), 5);
    for f in &cls.slot_files {
        assert!(model.join(f).is_file());
    }
    assert!(model.join(manifest.regression.unwrap().file).is_file());

    // Glove settings come from the model directory's saved config.
    let o = lexcomp(&[
        "predict",
        "--model-dir",
        p(&model),
        "--in",
        p(&dir.path().join("test.tsv")),
        "--out",
        p(&pred),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&pred).unwrap();
    assert_eq!(text.lines().count(), 10);
    for line in text.lines() {
        let (_, v) = line.split_once('\t').unwrap();
        let v: f64 = v.parse().unwrap();
        assert!((0.0..=1.0).contains(&v));
    }

    let o = lexcomp(&[
        "evaluate",
        "--pred",
        p(&pred),
        "--gold",
        p(&dir.path().join("test.tsv")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let exported = dir.path().join("manifest.json");
    let o = lexcomp(&[
        "export-manifest",
        "--model-dir",
        p(&model),
        "--out",
        p(&exported),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&exported).unwrap()).unwrap();
    assert_eq!(
        v["classification"]["slot_files"].as_array().unwrap().len(),
        5
    );
}

#[test]
fn train_single_slot() {
    let dir = tempfile::tempdir().unwrap();
    let s = common::synthetic(6, 30, 0);
    s.write_to(dir.path());
    let model = dir.path().join("model");
    let o = lexcomp(&[
        "train",
        "--train",
        p(&dir.path().join("train.tsv")),
        "--glove",
        p(&dir.path().join("glove.txt")),
        "--glove-dim",
        "8",
        "--model-dir",
        p(&model),
        "--n",
        "1",
        "--pipelines",
        "classification",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = read_manifest(&model).unwrap();
    assert_eq!(manifest.classification.unwrap().slot_files.len(), 1);
    assert!(manifest.regression.is_none());
}

#[test]
fn train_without_glove_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let s = common::synthetic(7, 10, 0);
    s.write_to(dir.path());
    let o = lexcomp(&[
        "train",
        "--train",
        p(&dir.path().join("train.tsv")),
        "--model-dir",
        p(&dir.path().join("model")),
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("glove"), "{}", stderr(&o));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let s = common::synthetic(8, 30, 0);
    s.write_to(dir.path());
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!(
            "# experiment\nglove = {}\nglove_dim = 8\nn = 3\npipelines = classification\n",
            p(&dir.path().join("glove.txt"))
        ),
    )
    .unwrap();
    let model = dir.path().join("model");
    let o = lexcomp(&[
        "--config",
        p(&cfg),
        "train",
        "--train",
        p(&dir.path().join("train.tsv")),
        "--model-dir",
        p(&model),
        "--n",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = read_manifest(&model).unwrap();
    assert_eq!(manifest.classification.unwrap().slot_files.len(), 2);
}
