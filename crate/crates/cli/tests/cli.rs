use std::path::Path;
use std::process::{Command, Output};

fn edae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edae")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

/// Data rows of a `t,...` CSV, split into cells.
fn rows(path: &Path) -> Vec<Vec<String>> {
    read(path)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn generate_random(dir: &Path, name: &str, n: &str) -> std::path::PathBuf {
    let out = dir.join(name);
    let o = edae(&["generate", "--kind", "random", "--n", n, "--seed", "7", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn generate_random_and_power() {
    let dir = tempfile::tempdir().unwrap();
    let x = generate_random(dir.path(), "x.csv", "1000");
    assert_eq!(rows(&x).len(), 1000);
    assert!(read(&x).starts_with("t,x\n"));

    let power = dir.path().join("p.csv");
    let o = edae(&["generate", "--kind", "power", "--days", "7", "--out", p(&power)]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&power);
    assert_eq!(r.len(), 10080);
    assert!(r.iter().all(|row| row.len() == 4));

    let echo: serde_json::Value = serde_json::from_str(&read(&dir.path().join("p.csv.config.json"))).unwrap();
    assert_eq!(echo["kind"], "power");
    assert_eq!(echo["power"]["days"], 7);
    assert_eq!(echo["power"]["samples_per_day"], 1440);
}

#[test]
fn invalid_kind_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = edae(&["generate", "--kind", "walk", "--out", p(&dir.path().join("q.csv"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert!(!dir.path().join("q.csv").exists());
}

#[test]
fn missing_output_is_a_usage_error() {
    let o = edae(&["generate", "--kind", "random"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("out"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gen.json");
    let out = dir.path().join("g.csv");
    std::fs::write(&cfg, format!(r#"{{"random": {{"n": 50, "seed": 3}}, "out": {:?}}}"#, p(&out))).unwrap();
    let o = edae(&["generate", "--config", p(&cfg), "--n", "40"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&out).len(), 40);
    let echo: serde_json::Value = serde_json::from_str(&read(&dir.path().join("g.csv.config.json"))).unwrap();
    assert_eq!(echo["random"]["n"], 40);
    assert_eq!(echo["random"]["seed"], 3);

    std::fs::write(&cfg, r#"{"random": {"n": 50}, "extra": true}"#).unwrap();
    let o = edae(&["generate", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn corrupt_counts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let x = generate_random(dir.path(), "x.csv", "1000");
    let run = |tag: &str| {
        let out = dir.path().join(format!("c{tag}.csv"));
        let mask = dir.path().join(format!("m{tag}.csv"));
        let o = edae(&[
            "corrupt", "--input", p(&x), "--rho", "0.2", "--seed", "3", "--out", p(&out), "--mask-out", p(&mask),
        ]);
        assert!(o.status.success());
        (out, mask)
    };
    let (c1, m1) = run("1");
    let (c2, m2) = run("2");
    let ones = rows(&m1).iter().filter(|r| r[1] == "1").count();
    assert_eq!(ones, 200);
    assert_eq!(read(&c1), read(&c2));
    assert_eq!(read(&m1), read(&m2));

    let o = edae(&[
        "corrupt",
        "--input",
        p(&x),
        "--rho",
        "1.5",
        "--out",
        p(&dir.path().join("bad.csv")),
        "--mask-out",
        p(&dir.path().join("badm.csv")),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn train_reconstruct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let x = generate_random(dir.path(), "x.csv", "300");
    let (c, m) = (dir.path().join("c.csv"), dir.path().join("m.csv"));
    let o = edae(&["corrupt", "--input", p(&x), "--rho", "0.2", "--seed", "1", "--out", p(&c), "--mask-out", p(&m)]);
    assert!(o.status.success());

    let train = |out: &Path| {
        let o = edae(&[
            "train", "--input", p(&x), "--method", "EDAE_LSTM", "--epochs", "2", "--seed", "5", "--model-out", p(out),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    let (m1, m2) = (dir.path().join("m1.json"), dir.path().join("m2.json"));
    train(&m1);
    train(&m2);
    assert_eq!(std::fs::read(&m1).unwrap(), std::fs::read(&m2).unwrap());
    let echo: serde_json::Value = serde_json::from_str(&read(&dir.path().join("m1.json.config.json"))).unwrap();
    assert_eq!(echo["train"]["epochs"], 2);
    assert_eq!(echo["train"]["window"]["k_back"], 5);

    let r = dir.path().join("r.csv");
    let o = edae(&["reconstruct", "--model", p(&m1), "--input", p(&c), "--mask", p(&m), "--out", p(&r)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (corrupted, mask, rec) = (rows(&c), rows(&m), rows(&r));
    assert_eq!(rec.len(), corrupted.len());
    let mut changed = 0;
    for ((a, b), flag) in corrupted.iter().zip(&rec).zip(&mask) {
        if flag[1] == "1" {
            changed += usize::from(a[1] != b[1]);
        } else {
            assert_eq!(a, b);
        }
    }
    assert!(changed > 0);
}

#[test]
fn reconstruct_with_wrong_channel_count_fails() {
    let dir = tempfile::tempdir().unwrap();
    let x = generate_random(dir.path(), "x.csv", "100");
    let model = dir.path().join("im.json");
    let o = edae(&["train", "--input", p(&x), "--method", "IM", "--model-out", p(&model)]);
    assert!(o.status.success());

    let power = dir.path().join("p.csv");
    assert!(edae(&["generate", "--kind", "power", "--days", "1", "--out", p(&power)]).status.success());
    let (c, m) = (dir.path().join("c.csv"), dir.path().join("m.csv"));
    let o = edae(&["corrupt", "--input", p(&power), "--rho", "0.1", "--out", p(&c), "--mask-out", p(&m)]);
    assert!(o.status.success());
    let o = edae(&[
        "reconstruct",
        "--model",
        p(&model),
        "--input",
        p(&c),
        "--mask",
        p(&m),
        "--out",
        p(&dir.path().join("r.csv")),
    ]);
    assert_ne!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shape mismatch"));
}

#[test]
fn damaged_model_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let x = generate_random(dir.path(), "x.csv", "100");
    let (c, m) = (dir.path().join("c.csv"), dir.path().join("m.csv"));
    assert!(edae(&["corrupt", "--input", p(&x), "--out", p(&c), "--mask-out", p(&m)]).status.success());
    let model = dir.path().join("bad.json");
    std::fs::write(&model, "{\"format_version\": 1, \"kind\": ").unwrap();
    let o = edae(&[
        "reconstruct",
        "--model",
        p(&model),
        "--input",
        p(&c),
        "--mask",
        p(&m),
        "--out",
        p(&dir.path().join("r.csv")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_im_is_fast_and_table_shaped() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let started = std::time::Instant::now();
    let o = edae(&["bench", "--methods", "IM", "--out-dir", p(&out)]);
    assert!(started.elapsed().as_secs_f64() < 1.0);
    assert!(o.status.success());
    let table = read(&out.join("nmse_table.csv"));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "method,0.1,0.2,0.3,0.4,0.5");
    assert!(lines[1].starts_with("IM,"));
    for f in ["nmse_table.txt", "nmse_cells.csv", "report.json", "config.json", "plot_IM.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn bench_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        r#"{"plan": {"dataset": {"kind": "random", "n": 200}, "methods": ["IM", "DAE", "EDAE_LSTM"],
            "proportions": [0.1, 0.3], "repeats": 2, "train": {"epochs": 2, "lstm_hidden": 4, "lstm_output": 4}}}"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = edae(&["bench", "--config", p(&plan), "--out-dir", p(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 8);
    for name in names {
        let (x, y) = (std::fs::read(a.join(&name)).unwrap(), std::fs::read(b.join(&name)).unwrap());
        if name == "config.json" {
            // differs only in the echoed out_dir
            continue;
        }
        assert_eq!(x, y, "{name:?}");
    }
}

#[test]
fn bench_failed_cell_warns_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let o = edae(&["bench", "--methods", "IM", "--proportions", "0.5,1.0", "--repeats", "1", "--out-dir", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(read(&out.join("nmse_table.txt")).contains("FAILED"));
    assert!(read(&out.join("nmse_cells.csv")).contains("FAILED"));
}

#[test]
fn unknown_method_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = edae(&["bench", "--methods", "PCA", "--out-dir", p(&dir.path().join("b"))]);
    assert_eq!(o.status.code(), Some(1));
    let x = generate_random(dir.path(), "x.csv", "50");
    let o = edae(&["train", "--input", p(&x), "--method", "PCA", "--model-out", p(&dir.path().join("m.json"))]);
    assert_eq!(o.status.code(), Some(1));
}
