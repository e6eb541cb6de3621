use std::path::Path;
use std::process::{Command, Output};

fn ssr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssr"))
        .args(args)
        .output()
        .expect("binary must launch")
}

fn write_json(path: &Path, v: serde_json::Value) {
    std::fs::write(path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_run_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let data = dir.path().join("data.csv");
    let config = dir.path().join("run.json");
    let rows = dir.path().join("rows.csv");
    let svg = dir.path().join("chart.svg");

    write_json(
        &spec,
        serde_json::json!({
            "d": 4, "k": 1, "design": "iid_gaussian", "seed": 3, "loss_kind": "squared"
        }),
    );
    let out = ssr(&["gen", "--spec", p(&spec), "--out", p(&data), "--n", "40"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().next().unwrap(), "y,x0,x1,x2,x3");
    assert_eq!(text.lines().count(), 41);

    write_json(
        &config,
        serde_json::json!({
            "stream": {"file": {
                "path": data, "format": "dense_csv", "loss_kind": "squared", "d": 4
            }},
            "algo": "sgd",
            "hp": {"eta": 0.2},
            "T": 40,
            "window": 10,
            "seeds": [1, 2],
            "record_every": 10
        }),
    );
    let out = ssr(&["run", "--config", p(&config), "--out", p(&rows)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(&rows).unwrap();
    assert_eq!(text.lines().count(), 9, "header plus 4 rows per seed");

    let out = ssr(&["report", "--in", p(&rows)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let summary = stdout_of(&out);
    let header = summary.lines().next().unwrap();
    assert!(header.starts_with("algo,t,seeds,window_loss_med"));
    assert!(summary.lines().any(|l| l.starts_with("sgd,10,2,")));
    assert!(summary.lines().any(|l| l.starts_with("sgd,40,2,")));

    // File replays carry no ground truth, so the chart has one loss panel.
    let out = ssr(&["report", "--in", p(&rows), "--svg", p(&svg), "--logy"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let chart = std::fs::read_to_string(&svg).unwrap();
    assert!(chart.starts_with("<svg"));
    assert!(chart.contains("windowed loss"));
    assert!(!chart.contains("parameter error"));
}

#[test]
fn gen_writes_sparse_text() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let data = dir.path().join("data.txt");
    write_json(
        &spec,
        serde_json::json!({
            "d": 3, "k": 1, "design": "random_sign", "seed": 5, "loss_kind": "logistic"
        }),
    );
    let out = ssr(&[
        "gen", "--spec", p(&spec), "--out", p(&data), "--n", "5", "--format", "sparse_text",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = std::fs::read_to_string(&data).unwrap();
    assert_eq!(text.lines().count(), 5);
    let first = text.lines().next().unwrap();
    let mut parts = first.split_whitespace();
    parts.next().unwrap().parse::<f64>().unwrap();
    let feat = parts.next().unwrap();
    let (idx, val) = feat.split_once(':').unwrap();
    idx.parse::<usize>().unwrap();
    val.parse::<f64>().unwrap();
}

#[test]
fn diag_prints_identity_design_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    write_json(
        &spec,
        serde_json::json!({
            "d": 6, "k": 2, "design": "iid_gaussian", "seed": 11, "loss_kind": "squared"
        }),
    );
    let out = ssr(&["diag", "--spec", p(&spec)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    let field = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}: ")))
            .unwrap_or_else(|| panic!("missing {key} in {text}"))
            .parse()
            .unwrap()
    };
    assert_eq!(field("alpha"), 1.0);
    assert_eq!(field("rho"), 0.0);
    assert_eq!(field("classic_irrep"), 0.0);
    assert!(field("l1_radius") > 0.0);
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    write_json(
        &config,
        serde_json::json!({
            "stream": {"synthetic": {
                "d": 3, "k": 1, "design": "iid_gaussian", "seed": 1, "loss_kind": "squared"
            }},
            "algo": "sgd",
            "hp": {"eta": 0.1},
            "T": 5,
            "seeds": [1],
            "turbo": true
        }),
    );
    let out = ssr(&["run", "--config", p(&config), "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("turbo"));
}

#[test]
fn missing_and_short_data_files_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let data = dir.path().join("tiny.csv");
    let make_cfg = |path: &Path| {
        serde_json::json!({
            "stream": {"file": {"path": path, "format": "dense_csv", "loss_kind": "squared"}},
            "algo": "sgd",
            "hp": {"eta": 0.1},
            "T": 10,
            "seeds": [1]
        })
    };

    write_json(&config, make_cfg(&dir.path().join("absent.csv")));
    let out = ssr(&["run", "--config", p(&config), "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr_of(&out));

    std::fs::write(&data, "y,x0\n1,1\n2,1\n3,1\n").unwrap();
    write_json(&config, make_cfg(&data));
    let out = ssr(&["run", "--config", p(&config), "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_of(&out).contains("T=10"));
}

#[test]
fn poisoned_seeds_exit_4_after_writing_healthy_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let rows = dir.path().join("rows.csv");
    // A zero denominator with a nonzero thresholded statistic has no finite
    // weight, so every seed of this run dies as a numerical failure.
    write_json(
        &config,
        serde_json::json!({
            "stream": {"synthetic": {
                "d": 3, "k": 1, "design": "iid_gaussian", "seed": 7, "loss_kind": "squared"
            }},
            "algo": "ssr",
            "hp": {"eta": 0.0, "epsilon": 0.0, "lambda": 0.01, "schedule": "constant"},
            "T": 20,
            "seeds": [1, 2]
        }),
    );
    let out = ssr(&["run", "--config", p(&config), "--out", p(&rows)]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr_of(&out));
    let err = stderr_of(&out);
    assert!(err.contains("2 of 2 seeds failed"), "{err}");
    // The CSV still exists with its header so downstream tooling sees schema.
    let text = std::fs::read_to_string(&rows).unwrap();
    assert_eq!(text.lines().count(), 1);
}

#[test]
fn sweep_writes_grid_csv_and_prints_best_hp() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    let grid = dir.path().join("grid.csv");
    write_json(
        &config,
        serde_json::json!({
            "base": {
                "stream": {"synthetic": {
                    "d": 6, "k": 2, "design": "iid_gaussian", "seed": 13, "loss_kind": "squared"
                }},
                "algo": "sgd",
                "T": 1,
                "seeds": [1],
                "record_every": 50
            },
            "grid": {"eta": [0.5, 5.0]},
            "dev_size": 200,
            "selection_metric": "window_loss"
        }),
    );
    let out = ssr(&["sweep", "--config", p(&config), "--out", p(&grid)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let best: serde_json::Value = serde_json::from_str(stdout_of(&out).trim()).unwrap();
    let eta = best.get("eta").and_then(|v| v.as_f64()).unwrap();
    assert!(eta == 0.5 || eta == 5.0);

    let table = std::fs::read_to_string(&grid).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "grid_index,eta,metric,failed,selected");
    assert_eq!(lines.clone().count(), 2);
    let winners = lines.filter(|l| l.ends_with(",1")).count();
    assert_eq!(winners, 1, "exactly one selected row");
}

#[test]
fn report_rejects_schema_drift() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(
        &bad,
        "run_id,seed,algo,t,loss,window_loss,param_err,avg_param_err,regret,\
         support_size,support_precision,support_recall,elapsed_ns\n",
    )
    .unwrap();
    let out = ssr(&["report", "--in", p(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_of(&out).contains("inst_loss"), "{}", stderr_of(&out));
}

#[test]
fn report_with_no_rows_leaves_no_svg_behind() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    let svg = dir.path().join("chart.svg");
    std::fs::write(
        &empty,
        format!("{}\n", ssr_harness::RESULT_COLUMNS.join(",")),
    )
    .unwrap();
    let out = ssr(&["report", "--in", p(&empty), "--svg", p(&svg)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!svg.exists(), "no partial chart on error");
}

#[test]
fn usage_errors_exit_2() {
    let out = ssr(&["run"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    // Valid config without an output sink anywhere.
    write_json(
        &config,
        serde_json::json!({
            "stream": {"synthetic": {
                "d": 3, "k": 1, "design": "iid_gaussian", "seed": 1, "loss_kind": "squared"
            }},
            "algo": "sgd",
            "hp": {"eta": 0.1},
            "T": 5,
            "seeds": [1]
        }),
    );
    let out = ssr(&["run", "--config", p(&config)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("output"));
}
