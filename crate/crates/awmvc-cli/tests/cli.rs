//! Black-box tests of the `awmvc` binary: flag handling, file outputs,
//! exit-code discipline.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn awmvc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awmvc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn gen_dataset(dir: &Path, n: usize, seed: u64) {
    let out = awmvc(&[
        "gen",
        "--n",
        &n.to_string(),
        "--views",
        "3",
        "--clusters",
        "5",
        "--seed",
        &seed.to_string(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "gen failed: {out:?}");
}

#[test]
fn gen_then_run_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    gen_dataset(&data, 400, 7);
    let report_path = tmp.path().join("report.json");
    let out = awmvc(&[
        "run",
        "--data",
        data.to_str().unwrap(),
        "--clusters",
        "5",
        "--tol",
        "1e-3",
        "--seed",
        "7",
        "--output",
        report_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "run failed: {out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["dataset"]["n"], 400);
    assert_eq!(report["config"]["variant"], "full");
    assert!(report["metrics"]["acc"].as_f64().unwrap() >= 0.95);
    // stdout carries the same JSON document.
    let from_stdout: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(from_stdout["schema"], 1);
}

#[test]
fn gen_is_deterministic_at_the_byte_level() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    gen_dataset(&a, 120, 3);
    gen_dataset(&b, 120, 3);
    for file in ["meta.json", "labels.csv", "view_0.bin", "view_1.bin", "view_2.bin"] {
        let fa = fs::read(a.join(file)).unwrap();
        let fb = fs::read(b.join(file)).unwrap();
        assert_eq!(fa, fb, "{file} differs between identical gen invocations");
    }
}

#[test]
fn gen_rejects_fewer_samples_than_clusters() {
    let tmp = tempfile::tempdir().unwrap();
    let out = awmvc(&[
        "gen",
        "--n",
        "3",
        "--clusters",
        "5",
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = awmvc(&["run", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_dataset_directory_is_an_io_error() {
    let out = awmvc(&["run", "--data", "/definitely/not/here", "--clusters", "3"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn corrupted_shape_metadata_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    gen_dataset(&data, 60, 1);
    let meta_path = data.join("meta.json");
    let mut meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&meta_path).unwrap()).unwrap();
    meta["n"] = serde_json::json!(61);
    fs::write(&meta_path, meta.to_string()).unwrap();
    let out = awmvc(&["run", "--data", data.to_str().unwrap(), "--clusters", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn overflowing_data_is_a_numeric_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("d");
    fs::create_dir_all(&dir).unwrap();
    // Hand-written dataset whose magnitudes overflow the residual.
    let n = 6;
    let row = vec!["1e200"; n].join(",");
    fs::write(dir.join("view_0.csv"), format!("{row}\n{row}\n{row}\n{row}\n")).unwrap();
    fs::write(
        dir.join("meta.json"),
        serde_json::json!({
            "name": "overflow",
            "n": n,
            "views": [{"name": "v0", "d": 4, "file": "view_0.csv", "format": "csv"}],
            "labels_file": null
        })
        .to_string(),
    )
    .unwrap();
    let out = awmvc(&["run", "--data", dir.to_str().unwrap(), "--clusters", "2", "--m", "1"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn clusters_default_to_label_count() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    gen_dataset(&data, 200, 5);
    let out = awmvc(&[
        "run",
        "--data",
        data.to_str().unwrap(),
        "--tol",
        "1e-3",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["config"]["clusters"], 5);
}

#[test]
fn fixed_dim_variant_reports_a_single_dimension() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    gen_dataset(&data, 200, 9);
    let out = awmvc(&[
        "run",
        "--data",
        data.to_str().unwrap(),
        "--variant",
        "fixed-dim",
        "--tol",
        "1e-3",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["config"]["m"], 1);
    assert_eq!(report["config"]["dims"], serde_json::json!([5]));
    assert_eq!(report["weights"]["alpha"], serde_json::json!([1.0]));
}

#[test]
fn equal_alpha_variant_keeps_uniform_weights_every_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    gen_dataset(&data, 200, 11);
    let out = awmvc(&[
        "run",
        "--data",
        data.to_str().unwrap(),
        "--variant",
        "equal-alpha",
        "--tol",
        "1e-3",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    for sweep in report["fit"]["alpha_trace"].as_array().unwrap() {
        for a in sweep.as_array().unwrap() {
            assert!((a.as_f64().unwrap() - 1.0 / 3.0).abs() <= 1e-15);
        }
    }
}

#[test]
fn trace_csv_has_one_row_per_iteration() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    gen_dataset(&data, 200, 13);
    let trace_path = tmp.path().join("trace.csv");
    let out = awmvc(&[
        "run",
        "--data",
        data.to_str().unwrap(),
        "--tol",
        "1e-3",
        "--trace",
        trace_path.to_str().unwrap(),
        "--trace-evolution",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let iterations = report["fit"]["iterations"].as_u64().unwrap() as usize;
    let trace = fs::read_to_string(&trace_path).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines.len(), iterations + 1, "header plus one row per sweep");
    assert_eq!(
        lines[0],
        "iter,objective,alpha_1,alpha_2,alpha_3,beta_1,beta_2,beta_3,acc_of_m"
    );
    // Evolution accuracy ends high on this easy dataset.
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    let final_acc: f64 = last.last().unwrap().parse().unwrap();
    assert!(final_acc >= 0.95);
}

#[test]
fn trace_evolution_without_labels_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d");
    gen_dataset(&data, 60, 1);
    // Strip the labels from the dataset.
    let meta_path = data.join("meta.json");
    let mut meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&meta_path).unwrap()).unwrap();
    meta.as_object_mut().unwrap().remove("labels_file");
    fs::write(&meta_path, meta.to_string()).unwrap();
    let out = awmvc(&[
        "run",
        "--data",
        data.to_str().unwrap(),
        "--clusters",
        "5",
        "--trace-evolution",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn eval_scores_identical_permuted_and_hand_cases() {
    let tmp = tempfile::tempdir().unwrap();
    let truth = tmp.path().join("truth.csv");
    fs::write(&truth, "0\n0\n1\n1\n2\n2\n").unwrap();
    let out = awmvc(&["eval", "--pred", truth.to_str().unwrap(), "--truth", truth.to_str().unwrap()]);
    assert_eq!(
        stdout_str(&out).trim(),
        "{\"acc\": 100.00, \"nmi\": 100.00, \"purity\": 100.00, \"fscore\": 100.00}"
    );

    // Relabeled prediction still scores 100 everywhere.
    let permuted = tmp.path().join("perm.csv");
    fs::write(&permuted, "7\n7\n3\n3\n1\n1\n").unwrap();
    let out = awmvc(&["eval", "--pred", permuted.to_str().unwrap(), "--truth", truth.to_str().unwrap()]);
    assert_eq!(
        stdout_str(&out).trim(),
        "{\"acc\": 100.00, \"nmi\": 100.00, \"purity\": 100.00, \"fscore\": 100.00}"
    );

    // Pairwise F hand example lands at exactly 40.00.
    let pred = tmp.path().join("pred.csv");
    fs::write(&pred, "0\n0\n1\n1\n").unwrap();
    let truth4 = tmp.path().join("truth4.csv");
    fs::write(&truth4, "0\n0\n0\n1\n").unwrap();
    let out = awmvc(&["eval", "--pred", pred.to_str().unwrap(), "--truth", truth4.to_str().unwrap()]);
    let json = stdout_str(&out);
    assert!(json.contains("\"fscore\": 40.00"), "got {json}");
}

#[test]
fn eval_length_mismatch_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.csv");
    let b = tmp.path().join("b.csv");
    fs::write(&a, "0\n1\n").unwrap();
    fs::write(&b, "0\n").unwrap();
    let out = awmvc(&["eval", "--pred", a.to_str().unwrap(), "--truth", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bench_emits_rows_in_the_given_order() {
    let tmp = tempfile::tempdir().unwrap();
    let csv_path = tmp.path().join("bench.csv");
    let out = awmvc(&[
        "bench",
        "--n-list",
        "900,600",
        "--iters",
        "2",
        "--kmeans-restarts",
        "5",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "bench failed: {out:?}");
    let csv = fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "n,fit_seconds,kmeans_seconds");
    assert!(lines[1].starts_with("900,"));
    assert!(lines[2].starts_with("600,"));
    assert_eq!(stdout_str(&out), csv);
}

#[test]
fn bench_single_size_emits_one_row() {
    let out = awmvc(&["bench", "--n-list", "500", "--iters", "2", "--kmeans-restarts", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout_str(&out).lines().count(), 2);
}
