use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fir(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fir"))
        .args(args)
        .env_remove("FIR_THREADS")
        .output()
        .expect("binary runs")
}

fn fir_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fir"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_schema(name: &str, doc: &Value) {
    let schema_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../docs/schemas/{name}.schema.json"));
    let schema = read_json(&schema_path);
    if let Err(e) = jsonschema::validate(&schema, doc) {
        panic!("{name} output violates schema: {e}");
    }
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn simulate(dir: &TempDir, name: &str, extra: &[&str]) -> PathBuf {
    let prefix = dir.path().join(name);
    let mut args = vec!["simulate", "--out", path_str(&prefix)];
    args.extend_from_slice(extra);
    let out = fir(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    prefix
}

fn labels(prefix: &Path) -> Vec<bool> {
    let (header, rows) = read_csv(&PathBuf::from(format!("{}.labels.csv", prefix.display())));
    assert_eq!(header, vec!["is_outlier"]);
    rows.iter().map(|r| r[0] == 1.0).collect()
}

#[test]
fn simulate_point_counts_and_truth() {
    let dir = TempDir::new().unwrap();
    let prefix = simulate(
        &dir,
        "d",
        &[
            "--kind", "point", "--n", "1000", "--p", "10", "--eps", "0.4", "--seed", "7",
        ],
    );
    let (header, rows) = read_csv(&PathBuf::from(format!("{}.csv", prefix.display())));
    assert_eq!(header.len(), 10);
    assert_eq!(header[0], "x1");
    assert_eq!(rows.len(), 1000);
    assert_eq!(labels(&prefix).iter().filter(|&&l| l).count(), 400);
    let truth = read_json(&PathBuf::from(format!("{}.truth.json", prefix.display())));
    assert_schema("truth", &truth);
    assert_eq!(truth["n_outliers"], 400);
}

#[test]
fn simulate_clean_has_no_outliers_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = simulate(&dir, "a", &["--n", "50", "--p", "3", "--seed", "4"]);
    let b = simulate(&dir, "b", &["--n", "50", "--p", "3", "--seed", "4"]);
    assert!(labels(&a).iter().all(|&l| !l));
    for suffix in [".csv", ".labels.csv", ".truth.json"] {
        let x = std::fs::read(format!("{}{suffix}", a.display())).unwrap();
        let y = std::fs::read(format!("{}{suffix}", b.display())).unwrap();
        assert_eq!(x, y, "{suffix} differs");
    }
}

#[test]
fn estimate_fir_output_shape() {
    let dir = TempDir::new().unwrap();
    let prefix = simulate(&dir, "a", &["--n", "200", "--p", "5", "--seed", "1"]);
    let json_path = dir.path().join("est.json");
    let out = fir(&[
        "estimate",
        &format!("{}.csv", prefix.display()),
        "--out",
        path_str(&json_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&json_path);
    assert_schema("estimate", &doc);
    assert_eq!(doc["mu"].as_array().unwrap().len(), 5);
    assert_eq!(doc["h_indices"].as_array().unwrap().len(), 140);
    assert_eq!(doc["config"]["batch"], 20);
}

#[test]
fn estimate_classical_round_trips_sample_moments() {
    let dir = TempDir::new().unwrap();
    let prefix = simulate(
        &dir,
        "c",
        &[
            "--kind", "radial", "--n", "80", "--p", "3", "--eps", "0.1", "--seed", "2",
        ],
    );
    let csv_path = format!("{}.csv", prefix.display());
    let out = fir(&["estimate", &csv_path, "--method", "classical"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema("estimate", &doc);
    let h: Vec<u64> = doc["h_indices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(h, (0..80).collect::<Vec<u64>>());

    let (_, rows) = read_csv(Path::new(&csv_path));
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..3).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    for j in 0..3 {
        assert!((doc["mu"][j].as_f64().unwrap() - mean[j]).abs() <= 1e-12);
        for k in 0..3 {
            let cov = rows.iter().map(|r| (r[j] - mean[j]) * (r[k] - mean[k])).sum::<f64>() / (n - 1.0);
            assert!((doc["sigma"][j][k].as_f64().unwrap() - cov).abs() <= 1e-12);
        }
    }
}

#[test]
fn estimate_fir_excludes_distant_point_outliers() {
    let dir = TempDir::new().unwrap();
    let prefix = simulate(
        &dir,
        "p",
        &[
            "--kind", "point", "--n", "1000", "--p", "10", "--eps", "0.4", "--r", "12", "--seed", "7",
        ],
    );
    let out = fir(&[
        "estimate",
        &format!("{}.csv", prefix.display()),
        "--alpha",
        "0.5",
        "--batch",
        "100",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let flags = labels(&prefix);
    assert!(doc["h_indices"]
        .as_array()
        .unwrap()
        .iter()
        .all(|i| !flags[i.as_u64().unwrap() as usize]));
    assert!(!doc["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_csv_reports_line_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n1,2\n3,4\n5,oops\n").unwrap();
    let out = fir(&["estimate", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4") && err.contains("column 2"), "{err}");

    std::fs::write(&bad, "a,b\n1,2\n3\n").unwrap();
    let out = fir(&["estimate", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn wide_input_rejected_by_estimate_and_pca_unless_allowed() {
    let dir = TempDir::new().unwrap();
    let prefix = simulate(&dir, "w", &["--n", "20", "--p", "40", "--seed", "3"]);
    let csv_path = format!("{}.csv", prefix.display());
    for cmd in ["estimate", "pca"] {
        let out = fir(&[cmd, &csv_path, "--out", path_str(&dir.path().join(cmd))]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("p exceeds n unsupported"));
    }
    // Generic wide data keeps n - 1 dimensions, which leaves no valid subset size.
    let out = fir(&[
        "pca",
        &csv_path,
        "--allow-wide",
        "--out",
        path_str(&dir.path().join("generic")),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let low = simulate(
        &dir,
        "low",
        &[
            "--kind", "lowrank", "--rank", "3", "--n", "20", "--p", "40", "--seed", "3",
        ],
    );
    let out = fir(&[
        "pca",
        &format!("{}.csv", low.display()),
        "--allow-wide",
        "--alpha",
        "0.8",
        "--out",
        path_str(&dir.path().join("wide")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let model = read_json(&dir.path().join("wide/model.json"));
    assert_eq!(model["r0"], 3);
}

#[test]
fn numeric_failure_exits_3() {
    let dir = TempDir::new().unwrap();
    let flat = dir.path().join("flat.csv");
    let mut text = String::from("a,b\n");
    for _ in 0..30 {
        text.push_str("1.5,2.5\n");
    }
    std::fs::write(&flat, text).unwrap();
    let out = fir(&["estimate", path_str(&flat)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn pca_outlier_map_on_lowrank_data() {
    let dir = TempDir::new().unwrap();
    let prefix = simulate(
        &dir,
        "lr",
        &[
            "--kind", "lowrank", "--n", "300", "--p", "10", "--eps", "0.1", "--seed", "5",
        ],
    );
    let out_dir = dir.path().join("pca");
    let svg = dir.path().join("map.svg");
    let out = fir(&[
        "pca",
        &format!("{}.csv", prefix.display()),
        "--out",
        path_str(&out_dir),
        "--svg",
        path_str(&svg),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let model = read_json(&out_dir.join("model.json"));
    assert_schema("model", &model);
    let r1 = model["r1"].as_u64().unwrap() as usize;

    let (header, scores) = read_csv(&out_dir.join("scores.csv"));
    assert_eq!(header.len(), r1);
    assert_eq!(scores.len(), 300);

    let (header, map) = read_csv(&out_dir.join("outliermap.csv"));
    assert_eq!(header, vec!["index", "sd", "od", "flag"]);
    let flags = labels(&prefix);
    let hits = map.iter().filter(|r| r[3] == 1.0 && flags[r[0] as usize]).count();
    assert!(hits >= 27, "{hits}/30 injected rows flagged");

    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<circle").count(), 300);
}

#[test]
fn pca_options_are_echoed() {
    let dir = TempDir::new().unwrap();
    let prefix = simulate(
        &dir,
        "c",
        &["--kind", "cluster", "--n", "120", "--p", "4", "--eps", "0.1"],
    );
    let out_dir = dir.path().join("pca");
    let out = fir(&[
        "pca",
        &format!("{}.csv", prefix.display()),
        "--method",
        "cpca",
        "--variance",
        "squared",
        "--center",
        "literal",
        "--od-cutoff",
        "raw",
        "--out",
        path_str(&out_dir),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let model = read_json(&out_dir.join("model.json"));
    assert_schema("model", &model);
    assert_eq!(model["method"], "classical");
    assert_eq!(model["config"]["variance_form"], "squared_eigenvalues");
    assert_eq!(model["config"]["od_cutoff"], "raw");
}

fn write_bench_config(dir: &TempDir, body: &str) -> PathBuf {
    let path = dir.path().join("bench.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn bench_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_bench_config(
        &dir,
        r#"{"datasets":[{"name":"A","n":100,"p":4}],"kinds":["clean","cluster"],"eps_list":[0.1],
            "replications":3,"tau":100,"base_seed":9}"#,
    );
    let run = |threads: &str, name: &str| {
        let out_dir = dir.path().join(name);
        let out = fir_env(
            &["bench", path_str(&cfg), "--out", path_str(&out_dir)],
            "FIR_THREADS",
            threads,
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let a = run("1", "a");
    let b = run("3", "b");
    let c = run("0", "c");
    let results = |d: &Path| std::fs::read(d.join("results.csv")).unwrap();
    assert_eq!(results(&a), results(&b));
    assert_eq!(results(&a), results(&c));

    let (header, rows) = {
        let mut reader = csv::Reader::from_path(a.join("results.csv")).unwrap();
        let h: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
        (h, reader.records().count())
    };
    assert_eq!(header[..5], ["method", "dataset", "kind", "eps", "replication"]);
    // 2 cells x 3 methods x 3 replications.
    assert_eq!(rows, 18);
    let summary = read_json(&a.join("summary.json"));
    assert_schema("summary", &summary);
    assert_eq!(summary["cells"].as_array().unwrap().len(), 6);
}

#[test]
fn bench_single_replication_has_zero_std() {
    let dir = TempDir::new().unwrap();
    let cfg = write_bench_config(
        &dir,
        r#"{"datasets":[{"name":"A","n":100,"p":4}],"kinds":["clean"],"replications":1,"tau":50}"#,
    );
    let out_dir = dir.path().join("o");
    let out = fir(&["bench", path_str(&cfg), "--out", path_str(&out_dir)]);
    assert!(out.status.success());
    let summary = read_json(&out_dir.join("summary.json"));
    assert_schema("summary", &summary);
    for cell in summary["cells"].as_array().unwrap() {
        assert_eq!(cell["e_mu"]["std"], 0.0);
        assert!(cell["e_mu"]["table"].as_str().unwrap().ends_with("(0.00)"));
    }
}

#[test]
fn bench_with_every_cell_skipped_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_bench_config(
        &dir,
        r#"{"datasets":[{"name":"A","n":100,"p":4}],"kinds":["clean"],"methods":["fdb"],
            "alpha":0.3,"replications":2,"tau":50}"#,
    );
    let out_dir = dir.path().join("o");
    let out = fir(&["bench", path_str(&cfg), "--out", path_str(&out_dir)]);
    assert_eq!(out.status.code(), Some(3));
    let text = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains(",skipped,")));
}

#[test]
fn bench_rejects_bad_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_bench_config(&dir, r#"{"datasets":[],"kinds":["clean"]}"#);
    assert_eq!(fir(&["bench", path_str(&cfg)]).status.code(), Some(2));
    let cfg = write_bench_config(&dir, "{not json");
    assert_eq!(fir(&["bench", path_str(&cfg)]).status.code(), Some(2));
    let out = fir_env(&["bench", path_str(&cfg)], "FIR_THREADS", "many");
    assert_eq!(out.status.code(), Some(2));
}
