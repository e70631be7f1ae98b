use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use uniprot::data::write_similarity;
use uniprot::similarity::SimilarityMatrix;

fn uniprot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uniprot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = uniprot(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn indices(v: &Value) -> Vec<usize> {
    v["indices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i.as_u64().unwrap() as usize)
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_csvs_and_manifest() {
    let dir = TempDir::new().unwrap();
    ok(&["gen", "--out", s(dir.path())]);
    for name in ["source.csv", "target.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().next(), Some("x0,x1,label"));
    }
    assert_eq!(fs::read_to_string(dir.path().join("source.csv")).unwrap().lines().count(), 501);
    assert_eq!(fs::read_to_string(dir.path().join("target.csv")).unwrap().lines().count(), 501);
    let manifest = json(dir.path().join("manifest.json"));
    assert_eq!(manifest["seed"], 0);
    assert_eq!(manifest["config"]["command"], "gen");
    assert!(manifest["version"].is_string());
}

#[test]
fn gen_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["gen", "--seed", "7", "--skew", "0:0.05,3:0.05", "--out"];
    ok(&[&args[..], &[s(a.path())]].concat());
    ok(&[&args[..], &[s(b.path())]].concat());
    for name in ["source.csv", "target.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
}

#[test]
fn invalid_skew_fails_with_message() {
    let dir = TempDir::new().unwrap();
    let out = uniprot(&["gen", "--skew", "0:0.7,1:0.6", "--out", s(dir.path())]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(uniprot::Error::InfeasibleSkew(String::new()).code()));
    assert!(String::from_utf8_lossy(&out.stderr).contains("skew"));
    assert!(!dir.path().join("source.csv").exists());
}

fn write_raw(dir: &Path, rows: &[Vec<f64>]) -> String {
    let path = dir.join("s.upsm");
    write_similarity(&path, &SimilarityMatrix::from_rows(rows).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn select_uniprot_on_worked_instance() {
    let dir = TempDir::new().unwrap();
    let sim = write_raw(dir.path(), &[vec![3.0, 1.0], vec![1.0, 3.0], vec![2.0, 2.0]]);
    let out = dir.path().join("out");
    for solver in ["exact", "entropic"] {
        ok(&["select", "--similarity", &sim, "--k", "2", "--solver", solver, "--out", s(&out)]);
        let sel = json(out.join("selection.json"));
        assert_eq!(indices(&sel), [0, 1], "{solver}");
        assert_eq!(sel["method"], "uniprot_approx");
        assert_eq!(sel["manifest"], "manifest.json");
        let last = sel["step_values"][1].as_f64().unwrap();
        assert!((last - 6.0).abs() < 1e-3, "{solver}: {last}");
    }
}

#[test]
fn kmedoids_weights_are_skewed() {
    let dir = TempDir::new().unwrap();
    let sim = write_raw(dir.path(), &[vec![5.0, 5.0, 5.0], vec![1.0, 1.0, 9.0]]);
    let out = dir.path().join("out");
    ok(&["select", "--similarity", &sim, "--k", "2", "--method", "kmedoids", "--format", "csv", "--out", s(&out)]);
    let sel = json(out.join("selection.json"));
    let w: Vec<f64> = sel["weights"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(indices(&sel), [0, 1]);
    assert!((w[0] - 2.0 / 3.0).abs() < 1e-12 && (w[1] - 1.0 / 3.0).abs() < 1e-12);
    let table = fs::read_to_string(out.join("selection.csv")).unwrap();
    assert!(table.lines().next().unwrap().ends_with(",manifest"));
    assert_eq!(table.lines().count(), 3);
}

fn two_source_csvs(dir: &Path) -> (String, String) {
    let source = dir.join("source.csv");
    let target = dir.join("target.csv");
    fs::write(&source, "x,y,label\n0,0,0\n0.2,0,0\n5,5,1\n5.2,5,1\n5,5.3,1\n").unwrap();
    fs::write(&target, "x,y,label\n0,0.1,0\n5,5.1,1\n0.1,0,0\n").unwrap();
    (s(&source).to_owned(), s(&target).to_owned())
}

#[test]
fn per_source_takes_one_from_each() {
    let dir = TempDir::new().unwrap();
    let (source, target) = two_source_csvs(dir.path());
    let out = dir.path().join("out");
    ok(&[
        "select", "--source", &source, "--target", &target, "--k", "2", "--per-source", "--budgets", "1,1",
        "--out", s(&out),
    ]);
    let sel = json(out.join("selection.json"));
    let idx = indices(&sel);
    assert_eq!(idx.len(), 2);
    assert!(idx[0] < 2, "{idx:?}");
    assert!(idx[1] >= 2, "{idx:?}");
    assert_eq!(sel["per_source"].as_array().unwrap().len(), 2);
}

#[test]
fn per_source_rejects_bad_budgets() {
    let dir = TempDir::new().unwrap();
    let (source, target) = two_source_csvs(dir.path());
    let out = dir.path().join("out");
    let code = uniprot::Error::InvalidBudget { k: 0, what: String::new() }.code();
    for budgets in ["3,1", "1,2"] {
        let k = if budgets == "3,1" { "4" } else { "2" };
        let res = uniprot(&[
            "select", "--source", &source, "--target", &target, "--k", k, "--per-source", "--budgets", budgets,
            "--out", s(&out),
        ]);
        assert_eq!(res.status.code(), Some(code), "{budgets}");
    }
}

#[test]
fn verify_lemma4_has_no_failures() {
    let dir = TempDir::new().unwrap();
    ok(&["verify", "--suite", "lemma4", "--trials", "200", "--format", "csv", "--out", s(dir.path())]);
    let report = json(dir.path().join("verify.json"));
    let r = &report["reports"][0];
    assert_eq!(r["suite"], "lemma4");
    assert_eq!(r["trials"], 200);
    assert_eq!(r["failures"], 0);
    assert!(dir.path().join("verify.csv").exists());
}

#[test]
fn bench_gain_ratio_stays_below_one() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "bench", "gain-ratio", "--points", "40", "--classes", "4", "--dim", "2", "--k", "6", "--out",
        s(dir.path()),
    ]);
    let mut rdr = csv::Reader::from_path(dir.path().join("gain_ratio.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (ratio, exact) = (col("ratio"), col("f_exact_greedy"));
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let r: f64 = row[ratio].parse().unwrap();
        assert!(r > 0.0 && r <= 1.0 + 1e-9, "{r}");
        assert!(!row[exact].is_empty());
    }
    let summary = json(dir.path().join("bench.json"));
    assert!(summary["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-9);
}

#[test]
fn eval_on_separated_data_is_accurate() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("data");
    ok(&["gen", "--num-classes", "5", "--per-class-source", "30", "--target-total", "200", "--out", s(&data)]);
    let (source, target) = (data.join("source.csv"), data.join("target.csv"));
    let sel = dir.path().join("sel");
    ok(&["select", "--source", s(&source), "--target", s(&target), "--k", "10", "--out", s(&sel)]);
    let ev = dir.path().join("eval");
    ok(&[
        "eval", "--source", s(&source), "--target", s(&target), "--selection",
        s(&sel.join("selection.json")), "--format", "csv", "--out", s(&ev),
    ]);
    let report = json(ev.join("eval.json"));
    let acc = report["classification"]["overall_accuracy"].as_f64().unwrap();
    assert!(acc >= 0.99, "{acc}");
    assert_eq!(report["weights"]["std_dev"], 0.0);
    assert_eq!(fs::read_to_string(ev.join("eval.csv")).unwrap().lines().count(), 6);
}

#[test]
fn missing_input_reports_io_code() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.csv");
    let out = uniprot(&["select", "--source", s(&missing), "--target", s(&missing), "--k", "1", "--out", s(dir.path())]);
    let io = uniprot::Error::Io {
        path: missing.clone(),
        source: std::io::Error::other("x"),
    };
    assert_eq!(out.status.code(), Some(io.code()));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
